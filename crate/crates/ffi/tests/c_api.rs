use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "fo2.h"

int main(void) {
    Fo2Dfa *dfa = NULL;
    Fo2Monoid *m = NULL;
    int32_t level = 0;
    char *json = NULL;
    size_t pos = 0;
    bool condensed = false;

    if (fo2_dfa_from_regex("a(a|b)*", NULL, &dfa) != FO2_STATUS_OK) return 10;
    if (fo2_monoid_from_dfa(dfa, &m) != FO2_STATUS_OK) return 11;
    if (fo2_monoid_level(m, 6, &level) != FO2_STATUS_OK) return 12;
    if (fo2_monoid_analyze_json(m, 6, &json) != FO2_STATUS_OK) return 13;
    if (fo2_ranker_eval("bca", "Xa Yb Xc", &pos, &condensed) != FO2_STATUS_OK) return 14;
    printf("states=%zu size=%zu level=%d pos=%zu condensed=%d\n",
           fo2_dfa_num_states(dfa), fo2_monoid_size(m), level, pos, (int)condensed);
    printf("json=%s\n", strstr(json, "\"fo2_level\":2") ? "ok" : json);
    fo2_string_free(json);
    fo2_monoid_free(m);
    fo2_dfa_free(dfa);

    if (fo2_dfa_from_regex("(a", NULL, &dfa) != FO2_STATUS_PARSE) return 15;
    printf("error=%s\n", fo2_last_error() ? "set" : "missing");
    return 0;
}
"#;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let mut names = Vec::new();
    let mut lines = src.lines();
    while let Some(line) = lines.next() {
        if line.trim() == "#[no_mangle]" {
            let sig = lines.next().unwrap();
            let name = sig.split("fn ").nth(1).unwrap().split('(').next().unwrap();
            names.push(name.to_string());
        }
    }
    names
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/fo2.h")).unwrap();
    let names = exported_functions();
    assert!(names.len() >= 10);
    for name in names {
        assert!(header.contains(&format!("{name}(")), "{name} missing from fo2.h");
    }
    assert!(header.contains("typedef struct Fo2Dfa Fo2Dfa;"));
    assert!(header.contains("typedef struct Fo2Monoid Fo2Monoid;"));
}

fn static_lib() -> Option<PathBuf> {
    let deps = std::env::current_exe().ok()?.parent()?.to_path_buf();
    [deps.join("libfo2_ffi.a"), deps.parent()?.join("libfo2_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("no C compiler on PATH; skipping");
        return;
    }
    let lib = static_lib().expect("static library next to the test binary");
    let dir = std::env::temp_dir().join(format!("fo2-c-api-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    let exe = dir.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = crate_dir().join("include");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg(format!("-I{}", include.display()))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(Path::new(&exe)).output().unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        stdout,
        "states=3 size=3 level=2 pos=2 condensed=1\njson=ok\nerror=set\n"
    );
}
