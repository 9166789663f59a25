//! Regular expressions, DFA files and minimal complete DFAs.
//!
//! Every language enters the rest of the crate as a [`Dfa`]. The minimal
//! DFA is numbered canonically (breadth-first from the initial state,
//! letters in alphabet order), so two descriptions of the same language
//! produce identical automata.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a symbol in an [`Alphabet`].
pub type Letter = usize;

/// A word as a sequence of letter indices.
pub type Word = Vec<Letter>;

/// An ordered, duplicate-free list of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("bad symbol `{s}`")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidArgument(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Alphabet of single-character symbols, in the given order.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().filter(|c| !c.is_whitespace()).map(String::from))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.symbols[letter]
    }

    pub fn index_of(&self, symbol: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == symbol)
    }

    fn single_chars(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word. Single-character alphabets read one symbol per
    /// character; otherwise symbols are whitespace separated.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let lookup = |tok: &str| self.index_of(tok).ok_or_else(|| Error::UnknownSymbol(tok.into()));
        if self.single_chars() {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| lookup(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        let sep = if self.single_chars() { "" } else { " " };
        word.iter()
            .map(|&l| self.symbols[l].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbols.join(" "))
    }
}

/// Regular expression tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegexNode {
    Epsilon,
    Letter(Letter),
    Concat(Vec<RegexNode>),
    Union(Vec<RegexNode>),
    Star(Box<RegexNode>),
}

impl RegexNode {
    fn concat(mut parts: Vec<RegexNode>) -> RegexNode {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts.drain(..) {
            match p {
                RegexNode::Concat(inner) => flat.extend(inner),
                RegexNode::Epsilon => {}
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => RegexNode::Epsilon,
            1 => flat.pop().unwrap(),
            _ => RegexNode::Concat(flat),
        }
    }

    fn union(parts: Vec<RegexNode>) -> RegexNode {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                RegexNode::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            RegexNode::Union(flat)
        }
    }

    fn star(inner: RegexNode) -> RegexNode {
        match inner {
            RegexNode::Epsilon => RegexNode::Epsilon,
            s @ RegexNode::Star(_) => s,
            other => RegexNode::Star(Box::new(other)),
        }
    }

    /// Direct recursive matcher; used as an independent check of the
    /// automaton construction.
    pub fn matches(&self, word: &[Letter]) -> bool {
        self.match_ends(word, 0).contains(&word.len())
    }

    // All end positions reachable by matching self starting at `start`.
    fn match_ends(&self, word: &[Letter], start: usize) -> Vec<usize> {
        let mut out = match self {
            RegexNode::Epsilon => vec![start],
            RegexNode::Letter(l) => {
                if word.get(start) == Some(l) {
                    vec![start + 1]
                } else {
                    vec![]
                }
            }
            RegexNode::Concat(parts) => {
                let mut cur = vec![start];
                for p in parts {
                    let mut next: Vec<usize> = cur.iter().flat_map(|&s| p.match_ends(word, s)).collect();
                    next.sort_unstable();
                    next.dedup();
                    cur = next;
                }
                cur
            }
            RegexNode::Union(parts) => parts.iter().flat_map(|p| p.match_ends(word, start)).collect(),
            RegexNode::Star(inner) => {
                let mut seen = vec![start];
                let mut frontier = vec![start];
                while let Some(s) = frontier.pop() {
                    for e in inner.match_ends(word, s) {
                        if !seen.contains(&e) {
                            seen.push(e);
                            frontier.push(e);
                        }
                    }
                }
                seen
            }
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A parsed regular expression together with its alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regex {
    pub alphabet: Alphabet,
    pub root: RegexNode,
}

const SPECIAL: &[char] = &['|', '*', '(', ')', '~'];

struct RegexParser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl RegexParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map_or_else(|| self.chars.last().map_or(0, |&(i, c)| i + c.len_utf8()), |&(i, _)| i)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn union(&mut self) -> Result<RegexNode> {
        let mut parts = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(RegexNode::union(parts))
    }

    fn concat(&mut self) -> Result<RegexNode> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.starred()?);
        }
        if parts.is_empty() {
            return self.err("expected an expression");
        }
        Ok(RegexNode::concat(parts))
    }

    fn starred(&mut self) -> Result<RegexNode> {
        let mut node = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            node = RegexNode::star(node);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<RegexNode> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.union()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('~') => {
                self.pos += 1;
                Ok(RegexNode::Epsilon)
            }
            Some(c) if !SPECIAL.contains(&c) => {
                let letter = self
                    .alphabet
                    .index_of(c.encode_utf8(&mut [0; 4]))
                    .ok_or_else(|| Error::UnknownSymbol(c.to_string()))?;
                self.pos += 1;
                Ok(RegexNode::Letter(letter))
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a regular expression. Juxtaposition is concatenation, `|` is
/// union, `*` is star and `~` is the empty word. Without an explicit
/// alphabet, the sorted set of letters occurring in `text` is used.
pub fn parse_regex(text: &str, alphabet: Option<&Alphabet>) -> Result<Regex> {
    let alphabet = match alphabet {
        Some(a) => {
            if !a.single_chars() {
                return Err(Error::InvalidArgument(
                    "regex alphabets must consist of single characters".into(),
                ));
            }
            a.clone()
        }
        None => {
            let mut letters: Vec<char> = text
                .chars()
                .filter(|c| !c.is_whitespace() && !SPECIAL.contains(c))
                .collect();
            letters.sort_unstable();
            letters.dedup();
            Alphabet::new(letters.into_iter().map(String::from))?
        }
    };
    let mut parser = RegexParser {
        chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
        pos: 0,
        alphabet: &alphabet,
    };
    let root = parser.union()?;
    if parser.pos != parser.chars.len() {
        return parser.err("unexpected `)`");
    }
    Ok(Regex { alphabet, root })
}

/// A complete deterministic automaton. States are `0..num_states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    finals: Vec<bool>,
    // row-major: delta[state * |A| + letter]
    delta: Vec<usize>,
}

impl Dfa {
    /// Builds a DFA from a full transition table `delta[state][letter]`.
    pub fn new(alphabet: Alphabet, initial: usize, finals: Vec<bool>, delta: Vec<Vec<usize>>) -> Result<Self> {
        let n = finals.len();
        if initial >= n {
            return Err(Error::InvalidArgument(format!("initial state {initial} out of range")));
        }
        if delta.len() != n {
            return Err(Error::InvalidArgument(
                "transition table has wrong number of rows".into(),
            ));
        }
        let k = alphabet.len();
        let mut flat = Vec::with_capacity(n * k);
        for row in &delta {
            if row.len() != k || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidArgument("malformed transition row".into()));
            }
            flat.extend_from_slice(row);
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals,
            delta: flat,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, state: usize) -> bool {
        self.finals[state]
    }

    pub fn step(&self, state: usize, letter: Letter) -> usize {
        self.delta[state * self.alphabet.len() + letter]
    }

    /// State reached from `state` on `word`, or `None` if a letter is out of range.
    pub fn run_from(&self, state: usize, word: &[Letter]) -> Option<usize> {
        word.iter()
            .try_fold(state, |q, &l| (l < self.alphabet.len()).then(|| self.step(q, l)))
    }

    pub fn accepts(&self, word: &[Letter]) -> Result<bool> {
        match self.run_from(self.initial, word) {
            Some(q) => Ok(self.finals[q]),
            None => Err(Error::UnknownSymbol(format!(
                "letter index out of range for alphabet {{{}}}",
                self.alphabet
            ))),
        }
    }

    pub fn accepts_str(&self, word: &str) -> Result<bool> {
        self.accepts(&self.alphabet.parse_word(word)?)
    }

    /// Renumbers reachable states breadth-first from the initial state,
    /// dropping unreachable ones.
    pub fn canonical(&self) -> Dfa {
        let k = self.alphabet.len();
        let mut order = vec![usize::MAX; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        let mut seen = vec![self.initial];
        order[self.initial] = 0;
        while let Some(q) = queue.pop_front() {
            for l in 0..k {
                let t = self.step(q, l);
                if order[t] == usize::MAX {
                    order[t] = seen.len();
                    seen.push(t);
                    queue.push_back(t);
                }
            }
        }
        let delta = seen
            .iter()
            .flat_map(|&q| (0..k).map(move |l| (q, l)))
            .map(|(q, l)| order[self.step(q, l)])
            .collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            finals: seen.iter().map(|&q| self.finals[q]).collect(),
            delta,
        }
    }

    /// Minimal complete DFA for the same language (Moore partition
    /// refinement), canonically numbered.
    pub fn minimize(&self) -> Dfa {
        let reach = self.canonical();
        let n = reach.num_states();
        let k = reach.alphabet.len();
        let mut class: Vec<usize> = reach.finals.iter().map(|&f| usize::from(f)).collect();
        let mut num_classes = 0;
        loop {
            let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|q| {
                    let mut sig = Vec::with_capacity(k + 1);
                    sig.push(class[q]);
                    sig.extend((0..k).map(|l| class[reach.step(q, l)]));
                    let fresh = ids.len();
                    *ids.entry(sig).or_insert(fresh)
                })
                .collect();
            let count = ids.len();
            class = next;
            if count == num_classes {
                break;
            }
            num_classes = count;
        }
        let mut delta = vec![vec![0; k]; num_classes];
        let mut finals = vec![false; num_classes];
        for q in 0..n {
            finals[class[q]] = reach.finals[q];
            for (l, slot) in delta[class[q]].iter_mut().enumerate() {
                *slot = class[reach.step(q, l)];
            }
        }
        Dfa::new(reach.alphabet.clone(), class[reach.initial], finals, delta)
            .expect("quotient automaton is well formed")
            .canonical()
    }
}

impl fmt::Display for Dfa {
    /// Renders the automaton in the DFA file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.num_states()).map(|q| format!("q{q}")).collect();
        writeln!(f, "alphabet: {}", self.alphabet)?;
        writeln!(f, "states: {}", names.join(" "))?;
        writeln!(f, "initial: {}", names[self.initial])?;
        let finals: Vec<&str> = (0..self.num_states())
            .filter(|&q| self.finals[q])
            .map(|q| names[q].as_str())
            .collect();
        writeln!(f, "final: {}", finals.join(" "))?;
        for q in 0..self.num_states() {
            for l in 0..self.alphabet.len() {
                writeln!(f, "{} {} {}", names[q], self.alphabet.symbol(l), names[self.step(q, l)])?;
            }
        }
        Ok(())
    }
}

// Thompson construction: state 0 of each fragment is entered, `end` is left.
#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(Letter, usize)>>,
}

impl Nfa {
    fn add_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, node: &RegexNode) -> (usize, usize) {
        match node {
            RegexNode::Epsilon => {
                let s = self.add_state();
                let e = self.add_state();
                self.eps[s].push(e);
                (s, e)
            }
            RegexNode::Letter(l) => {
                let s = self.add_state();
                let e = self.add_state();
                self.moves[s].push((*l, e));
                (s, e)
            }
            RegexNode::Concat(parts) => {
                let (start, mut end) = self.build(&parts[0]);
                for p in &parts[1..] {
                    let (s, e) = self.build(p);
                    self.eps[end].push(s);
                    end = e;
                }
                (start, end)
            }
            RegexNode::Union(parts) => {
                let s = self.add_state();
                let e = self.add_state();
                for p in parts {
                    let (ps, pe) = self.build(p);
                    self.eps[s].push(ps);
                    self.eps[pe].push(e);
                }
                (s, e)
            }
            RegexNode::Star(inner) => {
                let s = self.add_state();
                let e = self.add_state();
                let (is, ie) = self.build(inner);
                self.eps[s].extend([is, e]);
                self.eps[ie].extend([is, e]);
                (s, e)
            }
        }
    }

    fn closure(&self, set: &mut Vec<usize>) {
        let mut stack = set.clone();
        let mut mark = vec![false; self.eps.len()];
        for &q in set.iter() {
            mark[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if !mark[t] {
                    mark[t] = true;
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        set.sort_unstable();
    }
}

/// Thompson construction, subset construction and minimization.
pub fn regex_to_min_dfa(regex: &Regex) -> Dfa {
    let mut nfa = Nfa::default();
    let (start, end) = nfa.build(&regex.root);
    let k = regex.alphabet.len();

    let mut init = vec![start];
    nfa.closure(&mut init);
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::from([(init.clone(), 0)]);
    let mut sets = vec![init];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = Vec::with_capacity(k);
        for l in 0..k {
            let mut target: Vec<usize> = sets[i]
                .iter()
                .flat_map(|&q| nfa.moves[q].iter().filter(|(m, _)| *m == l).map(|&(_, t)| t))
                .collect();
            target.sort_unstable();
            target.dedup();
            nfa.closure(&mut target);
            let fresh = sets.len();
            let id = *ids.entry(target.clone()).or_insert_with(|| {
                sets.push(target);
                fresh
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let finals = sets.iter().map(|s| s.binary_search(&end).is_ok()).collect();
    Dfa::new(regex.alphabet.clone(), 0, finals, delta)
        .expect("subset construction yields a complete automaton")
        .minimize()
}

/// Parses the line-based DFA file format. Missing transitions go to a
/// non-final sink appended as the last state; the result is not minimized.
pub fn parse_dfa_file(text: &str) -> Result<Dfa> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, Vec<String>)> {
        match lines.next() {
            Some((no, line)) => match line.strip_prefix(key).and_then(|r| r.strip_prefix(':')) {
                Some(rest) => Ok((no, rest.split_whitespace().map(String::from).collect())),
                None => Err(Error::Format {
                    line: no,
                    msg: format!("missing header line `{key}:`"),
                }),
            },
            None => Err(Error::Format {
                line: 0,
                msg: format!("missing header line `{key}:`"),
            }),
        }
    };

    let (_, symbols) = header("alphabet")?;
    let alphabet = Alphabet::new(symbols)?;
    let (states_line, names) = header("states")?;
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(Error::Format {
                line: states_line,
                msg: format!("duplicate state `{n}`"),
            });
        }
    }
    let state_index = |line: usize, name: &str| -> Result<usize> {
        names.iter().position(|n| n == name).ok_or_else(|| Error::Format {
            line,
            msg: format!("unknown state `{name}`"),
        })
    };
    let (init_line, init) = header("initial")?;
    if init.len() != 1 {
        return Err(Error::Format {
            line: init_line,
            msg: "expected exactly one initial state".into(),
        });
    }
    let initial = state_index(init_line, &init[0])?;
    let (final_line, final_names) = header("final")?;
    let mut finals = vec![false; names.len()];
    for f in &final_names {
        finals[state_index(final_line, f)?] = true;
    }

    let k = alphabet.len();
    let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; k]; names.len()];
    for (no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::Format {
                line: no,
                msg: "expected `SRC SYM DST`".into(),
            });
        }
        let src = state_index(no, toks[0])?;
        let sym = alphabet.index_of(toks[1]).ok_or_else(|| Error::Format {
            line: no,
            msg: format!("unknown symbol `{}`", toks[1]),
        })?;
        let dst = state_index(no, toks[2])?;
        if table[src][sym].replace(dst).is_some() {
            return Err(Error::DuplicateTransition {
                line: no,
                state: toks[0].into(),
                symbol: toks[1].into(),
            });
        }
    }

    let needs_sink = table.iter().flatten().any(Option::is_none);
    let sink = names.len();
    let mut delta: Vec<Vec<usize>> = table
        .into_iter()
        .map(|row| row.into_iter().map(|t| t.unwrap_or(sink)).collect())
        .collect();
    if needs_sink {
        delta.push(vec![sink; k]);
        finals.push(false);
    }
    Dfa::new(alphabet, initial, finals, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_chars("ab").unwrap()
    }

    #[test]
    fn parses_star_of_concat() {
        let r = parse_regex("(ab)*", None).unwrap();
        assert_eq!(
            r.root,
            RegexNode::Star(Box::new(RegexNode::Concat(vec![
                RegexNode::Letter(0),
                RegexNode::Letter(1)
            ])))
        );
    }

    #[test]
    fn parses_tilde_as_empty_word() {
        let a = Alphabet::from_chars("a").unwrap();
        assert_eq!(parse_regex("~", Some(&a)).unwrap().root, RegexNode::Epsilon);
        assert_eq!(parse_regex("~", None).unwrap_err(), Error::EmptyAlphabet);
    }

    #[test]
    fn parses_letter_then_star_of_union() {
        let r = parse_regex("a(a|b)*", None).unwrap();
        assert_eq!(
            r.root,
            RegexNode::Concat(vec![
                RegexNode::Letter(0),
                RegexNode::Star(Box::new(RegexNode::Union(vec![
                    RegexNode::Letter(0),
                    RegexNode::Letter(1)
                ])))
            ])
        );
    }

    #[test]
    fn regex_errors() {
        assert!(matches!(parse_regex("(ab", None), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_regex("a|", None), Err(Error::Syntax { .. })));
        assert!(matches!(parse_regex("ab)", None), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_regex("*a", None), Err(Error::Syntax { pos: 0, .. })));
        assert_eq!(
            parse_regex("ac", Some(&ab())).unwrap_err(),
            Error::UnknownSymbol("c".into())
        );
    }

    #[test]
    fn universal_language_has_one_state() {
        let d = regex_to_min_dfa(&parse_regex("(a|b)*", None).unwrap());
        assert_eq!(d.num_states(), 1);
        assert!(d.is_final(0));
        assert_eq!(d.initial(), 0);
    }

    #[test]
    fn ab_star_has_three_states() {
        let d = regex_to_min_dfa(&parse_regex("(ab)*", None).unwrap());
        assert_eq!(d.num_states(), 3);
        assert!(d.is_final(0));
        assert!(d.accepts_str("abab").unwrap());
        assert!(!d.accepts_str("aba").unwrap());
        assert!(d.accepts_str("").unwrap());
        // canonical BFS order: 0 start, 0-a->1, 0-b->2 (sink)
        assert_eq!(d.step(0, 0), 1);
        assert_eq!(d.step(0, 1), 2);
        assert_eq!(d.step(1, 1), 0);
    }

    #[test]
    fn a_then_anything_has_three_states() {
        let d = regex_to_min_dfa(&parse_regex("a(a|b)*", None).unwrap());
        assert_eq!(d.num_states(), 3);
        assert!(!d.accepts_str("").unwrap());
        assert!(d.accepts_str("abb").unwrap());
        assert!(!d.accepts_str("ba").unwrap());
    }

    #[test]
    fn dfa_file_completes_with_sink() {
        let text = "# (ab)*\nalphabet: a b\nstates: q0 q1\ninitial: q0\nfinal: q0\nq0 a q1\nq1 b q0\n";
        let d = parse_dfa_file(text).unwrap();
        assert_eq!(d.num_states(), 3);
        assert_eq!(d.step(0, 1), 2);
        assert_eq!(d.step(2, 0), 2);
        assert!(!d.is_final(2));
        assert!(d.accepts_str("abab").unwrap());
        assert_eq!(d.minimize().num_states(), 3);
    }

    #[test]
    fn dfa_file_errors() {
        let dup = "alphabet: a\nstates: q0 q1 q2\ninitial: q0\nfinal: q0\nq0 a q1\nq0 a q2\n";
        assert!(matches!(
            parse_dfa_file(dup),
            Err(Error::DuplicateTransition { line: 6, .. })
        ));
        let err = parse_dfa_file(dup).unwrap_err().to_string();
        assert!(err.contains("duplicate transition"), "{err}");

        let missing = "alphabet: a\ninitial: q0\n";
        assert!(matches!(parse_dfa_file(missing), Err(Error::Format { line: 2, .. })));
        let unknown = "alphabet: a\nstates: q0\ninitial: q0\nfinal:\nq0 b q0\n";
        assert!(matches!(parse_dfa_file(unknown), Err(Error::Format { line: 5, .. })));
        let unknown_state = "alphabet: a\nstates: q0\ninitial: q0\nfinal:\nq0 a q9\n";
        assert!(matches!(parse_dfa_file(unknown_state), Err(Error::Format { .. })));
    }

    #[test]
    fn empty_final_list_is_empty_language() {
        let d = parse_dfa_file("alphabet: a b\nstates: q0\ninitial: q0\nfinal:\nq0 a q0\nq0 b q0\n").unwrap();
        assert_eq!(d.num_states(), 1);
        assert!(!d.accepts_str("").unwrap());
        assert!(!d.accepts_str("abba").unwrap());
    }

    #[test]
    fn minimize_drops_unreachable_and_is_idempotent() {
        let one = Dfa::new(ab(), 0, vec![true], vec![vec![0, 0]]).unwrap();
        assert_eq!(one.minimize(), one);

        // state 3 is unreachable
        let d = Dfa::new(
            ab(),
            0,
            vec![true, false, false, true],
            vec![vec![1, 2], vec![2, 0], vec![2, 2], vec![0, 0]],
        )
        .unwrap();
        let m = d.minimize();
        assert_eq!(m.num_states(), 3);
        assert_eq!(m.minimize(), m);
    }

    #[test]
    fn accepts_rejects_out_of_range_letters() {
        let d = regex_to_min_dfa(&parse_regex("(ab)*", None).unwrap());
        assert!(d.accepts(&[5]).is_err());
        assert!(d.accepts_str("abc").is_err());
    }

    #[test]
    fn display_round_trips() {
        let d = regex_to_min_dfa(&parse_regex("(ab)*|b", None).unwrap());
        assert_eq!(parse_dfa_file(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn multi_char_symbols() {
        let a = Alphabet::new(["foo", "bar"]).unwrap();
        assert_eq!(a.parse_word("foo bar foo").unwrap(), vec![0, 1, 0]);
        assert_eq!(a.format_word(&[1, 0]), "bar foo");
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
    }
}
