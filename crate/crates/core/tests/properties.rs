use std::collections::BTreeSet;

use fo2::automata::{parse_regex, regex_to_min_dfa, Alphabet, Dfa};
use fo2::identities::{self, Identity};
use fo2::monoid::{FiniteMonoid, TransitionMonoid, DEFAULT_SIZE_CAP};
use fo2::rankers::{self, Dir, Ranker, Step};
use proptest::prelude::*;

fn regex_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("a".to_string()), Just("b".to_string()), Just("~".to_string())];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("{x}{y}")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("({x}|{y})")),
            inner.prop_map(|x| format!("({x})*")),
        ]
    })
}

fn word(letters: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..letters, 0..=max_len)
}

fn dfa() -> impl Strategy<Value = Dfa> {
    (1usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(0..n, 2), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(delta, finals)| Dfa::new(Alphabet::from_chars("ab").unwrap(), 0, finals, delta).unwrap())
    })
}

fn ranker(letters: usize, max_depth: usize) -> impl Strategy<Value = Ranker> {
    prop::collection::vec((any::<bool>(), 0..letters), 1..=max_depth).prop_map(|steps| {
        Ranker::new(
            steps
                .into_iter()
                .map(|(x, letter)| Step {
                    dir: if x { Dir::X } else { Dir::Y },
                    letter,
                })
                .collect(),
        )
        .unwrap()
    })
}

fn monoid_of(d: &Dfa) -> FiniteMonoid {
    TransitionMonoid::build(&d.minimize(), DEFAULT_SIZE_CAP).unwrap().monoid
}

/// Positions are 1-based; `0` and `len + 1` are the word boundaries.
fn naive_eval(r: &Ranker, u: &[usize]) -> Option<usize> {
    let mut pos = match r.start() {
        Dir::X => 0,
        Dir::Y => u.len() + 1,
    };
    for s in r.steps() {
        pos = match s.dir {
            Dir::X => (pos + 1..=u.len()).find(|&p| u[p - 1] == s.letter)?,
            Dir::Y => (1..pos).rev().find(|&p| u[p - 1] == s.letter)?,
        };
    }
    Some(pos)
}

/// Interval chain: each step must land strictly inside the current open
/// interval, which then shrinks on the side the next step moves away from.
fn naive_condensed(r: &Ranker, u: &[usize]) -> bool {
    let (mut lo, mut hi) = (0, u.len() + 1);
    let mut pos = match r.start() {
        Dir::X => 0,
        Dir::Y => u.len() + 1,
    };
    let steps = r.steps();
    for (i, s) in steps.iter().enumerate() {
        let next = match s.dir {
            Dir::X => (pos + 1..=u.len()).find(|&p| u[p - 1] == s.letter),
            Dir::Y => (1..pos).rev().find(|&p| u[p - 1] == s.letter),
        };
        let Some(p) = next else { return false };
        if p <= lo || p >= hi {
            return false;
        }
        match steps.get(i + 1).map(|t| t.dir) {
            Some(Dir::X) => lo = p,
            Some(Dir::Y) => hi = p,
            None => {}
        }
        pos = p;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regex_matcher_agrees_with_minimal_dfa(text in regex_text(), words in prop::collection::vec(word(2, 10), 20)) {
        let ab = Alphabet::from_chars("ab").unwrap();
        let re = parse_regex(&text, Some(&ab)).unwrap();
        let d = regex_to_min_dfa(&re);
        for w in &words {
            prop_assert_eq!(re.root.matches(w), d.accepts(w).unwrap(), "{} on {:?}", text, w);
        }
    }

    #[test]
    fn minimization_is_idempotent_and_language_preserving(d in dfa(), words in prop::collection::vec(word(2, 8), 20)) {
        let m = d.minimize();
        prop_assert!(m.num_states() <= d.num_states());
        prop_assert_eq!(m.minimize().canonical(), m.canonical());
        for w in &words {
            prop_assert_eq!(d.accepts(w).unwrap(), m.accepts(w).unwrap());
        }
    }

    #[test]
    fn transition_monoid_recognizes_the_language(d in dfa(), words in prop::collection::vec(word(2, 8), 20)) {
        let min = d.minimize();
        let tm = TransitionMonoid::build(&min, DEFAULT_SIZE_CAP).unwrap();
        for w in &words {
            let x = tm.monoid.eval_word(w).unwrap();
            prop_assert_eq!(tm.accepting[x], d.accepts(w).unwrap());
        }
    }

    #[test]
    fn evaluation_is_a_morphism(d in dfa(), u in word(2, 6), v in word(2, 6)) {
        let m = monoid_of(&d);
        let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(m.eval_word(&uv).unwrap(), m.mul(m.eval_word(&u).unwrap(), m.eval_word(&v).unwrap()));
    }

    #[test]
    fn omega_power_is_the_idempotent_power(d in dfa()) {
        let m = monoid_of(&d);
        for x in 0..m.size() {
            let mut p = x;
            let mut seen = BTreeSet::new();
            while m.mul(p, p) != p {
                prop_assert!(seen.insert(p), "no idempotent power");
                p = m.mul(p, x);
            }
            prop_assert_eq!(m.omega_power(x), p);
        }
    }

    #[test]
    fn greens_r_matches_right_ideals(d in dfa()) {
        let m = monoid_of(&d);
        let g = m.greens();
        let ideal = |x: usize| (0..m.size()).map(|y| m.mul(x, y)).collect::<BTreeSet<_>>();
        let coideal = |x: usize| (0..m.size()).map(|y| m.mul(y, x)).collect::<BTreeSet<_>>();
        for x in 0..m.size() {
            for y in 0..m.size() {
                prop_assert_eq!(g.r_class[x] == g.r_class[y], ideal(x) == ideal(y));
                prop_assert_eq!(g.l_class[x] == g.l_class[y], coideal(x) == coideal(y));
            }
        }
    }

    #[test]
    fn da_identity_matches_da_test(d in dfa()) {
        let m = monoid_of(&d);
        let by_identity = identities::find_counterexample(&m, &Identity::da(), u128::MAX).unwrap().is_none();
        prop_assert_eq!(by_identity, m.is_in_da());
    }

    #[test]
    fn ranker_evaluation_matches_a_scan(r in ranker(3, 5), u in word(3, 9)) {
        prop_assert_eq!(r.eval(&u), naive_eval(&r, &u));
        prop_assert_eq!(r.is_condensed(&u), naive_condensed(&r, &u));
        if r.is_condensed(&u) {
            prop_assert!(r.eval(&u).is_some());
        }
    }

    #[test]
    fn ranker_text_round_trips(r in ranker(3, 6)) {
        let abc = Alphabet::from_chars("abc").unwrap();
        prop_assert_eq!(Ranker::parse(&r.format(&abc), &abc).unwrap(), r);
    }

    #[test]
    fn right_and_left_relations_are_mirrors(u in word(2, 6), v in word(2, 6), m in 1usize..=3, n in 1usize..=3) {
        let rev = |w: &Vec<usize>| w.iter().rev().copied().collect::<Vec<_>>();
        prop_assert_eq!(rankers::rel_right(&u, &v, m, n), rankers::rel_left(&rev(&u), &rev(&v), m, n));
        prop_assert_eq!(rankers::equiv_wi(&u, &v, m, n), rankers::equiv_wi(&rev(&u), &rev(&v), m, n));
    }

    #[test]
    fn relations_are_reflexive_and_symmetric(u in word(2, 6), v in word(2, 6), m in 1usize..=3, n in 1usize..=3) {
        for rel in [rankers::Relation::Right, rankers::Relation::Left, rankers::Relation::Equiv] {
            prop_assert!(rankers::related(rel, &u, &u, m, n));
            prop_assert_eq!(rankers::related(rel, &u, &v, m, n), rankers::related(rel, &v, &u, m, n));
        }
    }

    #[test]
    fn word_index_inverts_enumeration(k in 1usize..=3, len in 0usize..=5) {
        for (i, w) in rankers::words_up_to(k, len).iter().enumerate() {
            prop_assert_eq!(rankers::word_index(k, w), i);
        }
    }
}
