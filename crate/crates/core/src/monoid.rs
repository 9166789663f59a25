//! Finite monoids given by multiplication tables.
//!
//! Elements are `0..size`. The syntactic monoid of a language is built as
//! the transition monoid of its minimal complete DFA; element order is the
//! breadth-first discovery order from the identity, letters in alphabet
//! order, so element indices are reproducible.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::automata::{Alphabet, Dfa, Letter};
use crate::error::{Error, Result};

/// Element index.
pub type Elem = usize;

/// Default refusal threshold for transition monoids.
pub const DEFAULT_SIZE_CAP: usize = 100_000;

/// Images of the letters under the morphism from the free monoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    pub alphabet: Alphabet,
    pub images: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    size: usize,
    table: Vec<Elem>,
    identity: Elem,
    gens: Option<Generators>,
    labels: Option<Vec<String>>,
}

impl FiniteMonoid {
    /// Validates and builds a monoid from `table[i][j] = i*j`.
    pub fn new(table: Vec<Vec<Elem>>, identity: Elem, gens: Option<Generators>) -> Result<Self> {
        let size = table.len();
        if size == 0 {
            return Err(Error::InvalidArgument("a monoid needs at least one element".into()));
        }
        let mut flat = Vec::with_capacity(size * size);
        for (r, row) in table.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= size) {
                return Err(Error::InvalidArgument(format!(
                    "entry {bad} in row {r} is out of range"
                )));
            }
            flat.extend_from_slice(row);
        }
        if identity >= size {
            return Err(Error::BadIdentity(identity));
        }
        let m = FiniteMonoid {
            size,
            table: flat,
            identity,
            gens: None,
            labels: None,
        };
        for x in 0..size {
            if m.mul(identity, x) != x || m.mul(x, identity) != x {
                return Err(Error::BadIdentity(identity));
            }
        }
        for a in 0..size {
            for b in 0..size {
                let ab = m.mul(a, b);
                for c in 0..size {
                    if m.mul(ab, c) != m.mul(a, m.mul(b, c)) {
                        return Err(Error::NotAssociative { a, b, c });
                    }
                }
            }
        }
        match gens {
            Some(g) => m.with_generators(g),
            None => Ok(m),
        }
    }

    // Caller guarantees the monoid laws.
    pub(crate) fn from_parts_unchecked(
        size: usize,
        table: Vec<Elem>,
        identity: Elem,
        gens: Option<Generators>,
        labels: Option<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(table.len(), size * size);
        FiniteMonoid {
            size,
            table,
            identity,
            gens,
            labels,
        }
    }

    /// Attaches a generator map; the generators must generate the monoid.
    pub fn with_generators(mut self, gens: Generators) -> Result<Self> {
        if gens.images.len() != gens.alphabet.len() || gens.images.iter().any(|&g| g >= self.size) {
            return Err(Error::InvalidArgument("generator images out of range".into()));
        }
        let mut seen = vec![false; self.size];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens.images {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "generators do not generate element {missing}"
            )));
        }
        self.gens = Some(gens);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn generators(&self) -> Option<&Generators> {
        self.gens.as_ref()
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.size + b]
    }

    pub fn product<I: IntoIterator<Item = Elem>>(&self, elems: I) -> Elem {
        elems.into_iter().fold(self.identity, |acc, x| self.mul(acc, x))
    }

    /// Human-readable name of an element: a representative word when the
    /// monoid came from an automaton, otherwise the index.
    pub fn label(&self, x: Elem) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub(crate) fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Image of a word under the generator morphism.
    pub fn eval_word(&self, word: &[Letter]) -> Result<Elem> {
        let gens = self.gens.as_ref().ok_or(Error::NoGenerators)?;
        word.iter().try_fold(self.identity, |acc, &l| {
            gens.images
                .get(l)
                .map(|&g| self.mul(acc, g))
                .ok_or_else(|| Error::UnknownSymbol(format!("letter index {l}")))
        })
    }

    pub fn eval_str(&self, word: &str) -> Result<Elem> {
        let gens = self.gens.as_ref().ok_or(Error::NoGenerators)?;
        self.eval_word(&gens.alphabet.parse_word(word)?)
    }

    pub fn idempotents(&self) -> Vec<Elem> {
        (0..self.size).filter(|&x| self.mul(x, x) == x).collect()
    }

    /// The unique idempotent power of `x`.
    pub fn omega_power(&self, x: Elem) -> Elem {
        let mut p = x;
        loop {
            if self.mul(p, p) == p {
                return p;
            }
            p = self.mul(p, x);
        }
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|a| (a + 1..self.size).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_aperiodic(&self) -> bool {
        (0..self.size).all(|x| {
            let e = self.omega_power(x);
            self.mul(x, e) == e
        })
    }

    /// A pair `(x, y)` violating `(xy)^w x (xy)^w = (xy)^w`, if any.
    pub fn da_witness(&self) -> Option<(Elem, Elem)> {
        (0..self.size)
            .flat_map(|x| (0..self.size).map(move |y| (x, y)))
            .find(|&(x, y)| {
                let e = self.omega_power(self.mul(x, y));
                self.mul(self.mul(e, x), e) != e
            })
    }

    pub fn is_in_da(&self) -> bool {
        self.da_witness().is_none()
    }

    /// Commutative and idempotent.
    pub fn is_in_j1(&self) -> bool {
        self.is_commutative() && (0..self.size).all(|x| self.mul(x, x) == x)
    }

    pub fn greens(&self) -> GreensData {
        GreensData::compute(self)
    }

    pub fn is_j_trivial(&self) -> bool {
        self.greens().is_j_trivial()
    }

    pub fn is_r_trivial(&self) -> bool {
        self.greens().is_r_trivial()
    }

    pub fn is_l_trivial(&self) -> bool {
        self.greens().is_l_trivial()
    }

    /// The opposite monoid: `x * y` becomes `y * x`.
    pub fn reverse(&self) -> FiniteMonoid {
        let n = self.size;
        let table = (0..n * n).map(|i| self.mul(i % n, i / n)).collect();
        FiniteMonoid::from_parts_unchecked(n, table, self.identity, self.gens.clone(), None)
    }

    // Generator set used for ideal closures.
    fn closure_generators(&self) -> Vec<Elem> {
        match &self.gens {
            Some(g) => {
                let mut v = g.images.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
            None => (0..self.size).collect(),
        }
    }
}

impl fmt::Display for FiniteMonoid {
    /// Renders the monoid in the monoid file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size: {}", self.size)?;
        writeln!(f, "identity: {}", self.identity)?;
        if let Some(g) = &self.gens {
            for (l, &x) in g.images.iter().enumerate() {
                writeln!(f, "gen {} {}", g.alphabet.symbol(l), x)?;
            }
        }
        writeln!(f, "table")?;
        for r in 0..self.size {
            let row: Vec<String> = (0..self.size).map(|c| self.mul(r, c).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Parses the monoid file format: `size: N`, `identity: i`, optional
/// `gen SYMBOL i` lines, then `table` and N rows of N indices.
pub fn parse_monoid_file(text: &str) -> Result<FiniteMonoid> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let fmt_err = |line: usize, msg: String| Error::Format { line, msg };
    let num = |line: usize, tok: &str| -> Result<usize> {
        tok.parse()
            .map_err(|_| fmt_err(line, format!("expected a number, found `{tok}`")))
    };
    let mut header = |key: &str| -> Result<(usize, usize)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| fmt_err(0, format!("missing `{key}:` line")))?;
        let rest = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| fmt_err(no, format!("expected `{key}:`")))?;
        Ok((no, num(no, rest.trim())?))
    };
    let (_, size) = header("size")?;
    let (_, identity) = header("identity")?;

    let mut symbols = Vec::new();
    let mut images = Vec::new();
    loop {
        let (no, line) = lines.next().ok_or_else(|| fmt_err(0, "missing `table` line".into()))?;
        if line == "table" {
            break;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "gen" {
            return Err(fmt_err(no, "expected `gen SYMBOL i` or `table`".into()));
        }
        symbols.push(toks[1].to_string());
        images.push(num(no, toks[2])?);
    }
    let mut table = Vec::with_capacity(size);
    for r in 0..size {
        let (no, line) = lines
            .next()
            .ok_or_else(|| fmt_err(0, format!("table has {r} rows, expected {size}")))?;
        let row = line
            .split_whitespace()
            .map(|t| num(no, t))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != size {
            return Err(fmt_err(no, format!("row has {} entries, expected {size}", row.len())));
        }
        table.push(row);
    }
    if let Some((no, _)) = lines.next() {
        return Err(fmt_err(no, "unexpected content after the table".into()));
    }
    let gens = if symbols.is_empty() {
        None
    } else {
        Some(Generators {
            alphabet: Alphabet::new(symbols)?,
            images,
        })
    };
    FiniteMonoid::new(table, identity, gens)
}

/// Transition monoid of a complete DFA, with the transformations and the
/// accepting element set kept alongside.
#[derive(Debug, Clone)]
pub struct TransitionMonoid {
    pub monoid: FiniteMonoid,
    /// `transformations[x][q]` = state reached from `q` by any word of `x`.
    pub transformations: Vec<Vec<u32>>,
    /// Elements mapping the initial state to a final state.
    pub accepting: Vec<bool>,
}

impl TransitionMonoid {
    pub fn build(dfa: &Dfa, cap: usize) -> Result<Self> {
        let s = dfa.num_states();
        let k = dfa.alphabet().len();
        let id: Vec<u32> = (0..s as u32).collect();
        let mut index: HashMap<Vec<u32>, Elem> = HashMap::from([(id.clone(), 0)]);
        let mut elems = vec![id];
        // parent[x] = (y, l) with x = y * l
        let mut parent: Vec<Option<(Elem, Letter)>> = vec![None];
        let mut right: Vec<Elem> = Vec::new();
        let mut i = 0;
        while i < elems.len() {
            for l in 0..k {
                let t: Vec<u32> = elems[i].iter().map(|&q| dfa.step(q as usize, l) as u32).collect();
                let fresh = elems.len();
                let j = *index.entry(t).or_insert(fresh);
                if j == fresh {
                    if fresh >= cap {
                        return Err(Error::MonoidTooLarge { cap });
                    }
                    elems.push(elems[i].iter().map(|&q| dfa.step(q as usize, l) as u32).collect());
                    parent.push(Some((i, l)));
                }
                right.push(j);
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![0; n * n];
        for x in 0..n {
            table[x * n] = x;
            for y in 1..n {
                let (p, l) = parent[y].expect("non-identity elements have a parent");
                table[x * n + y] = right[table[x * n + p] * k + l];
            }
        }
        let alphabet = dfa.alphabet().clone();
        let mut words: Vec<Vec<Letter>> = vec![Vec::new(); n];
        for y in 1..n {
            let (p, l) = parent[y].unwrap();
            let mut w = words[p].clone();
            w.push(l);
            words[y] = w;
        }
        let labels = words
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    alphabet.format_word(w)
                }
            })
            .collect();
        let gens = Generators {
            images: (0..k).map(|l| right[l]).collect(),
            alphabet,
        };
        let accepting = elems.iter().map(|t| dfa.is_final(t[dfa.initial()] as usize)).collect();
        Ok(TransitionMonoid {
            monoid: FiniteMonoid::from_parts_unchecked(n, table, 0, Some(gens), Some(labels)),
            transformations: elems,
            accepting,
        })
    }
}

/// Transition monoid of a complete DFA. Pass a minimal DFA to obtain the
/// syntactic monoid.
pub fn transition_monoid(dfa: &Dfa) -> Result<FiniteMonoid> {
    TransitionMonoid::build(dfa, DEFAULT_SIZE_CAP).map(|t| t.monoid)
}

/// Square boolean matrix packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let stride = n.div_ceil(64);
        BitMatrix {
            n,
            stride,
            bits: vec![0; n * stride],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.stride + c / 64] |= 1 << (c % 64);
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Green's preorders and the class partitions they induce.
///
/// `jleq.get(u, v)` holds iff `u` lies in `MvM`; likewise `rleq` for `vM`
/// and `lleq` for `Mv`. Class labels are numbered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreensData {
    pub jleq: BitMatrix,
    pub rleq: BitMatrix,
    pub lleq: BitMatrix,
    pub j_class: Vec<usize>,
    pub r_class: Vec<usize>,
    pub l_class: Vec<usize>,
}

impl GreensData {
    pub fn compute(m: &FiniteMonoid) -> Self {
        let n = m.size();
        let gens = m.closure_generators();
        let closure = |right: bool, left: bool| {
            // row u of the result marks every v with u <= v, so fill by
            // searching from each v and setting (u, v) for reached u.
            let mut mat = BitMatrix::new(n);
            let mut seen = vec![usize::MAX; n];
            let mut stack = Vec::new();
            for v in 0..n {
                seen[v] = v;
                stack.push(v);
                while let Some(x) = stack.pop() {
                    mat.set(x, v);
                    for &g in &gens {
                        if right {
                            let y = m.mul(x, g);
                            if seen[y] != v {
                                seen[y] = v;
                                stack.push(y);
                            }
                        }
                        if left {
                            let y = m.mul(g, x);
                            if seen[y] != v {
                                seen[y] = v;
                                stack.push(y);
                            }
                        }
                    }
                }
            }
            mat
        };
        let rleq = closure(true, false);
        let lleq = closure(false, true);
        let jleq = closure(true, true);
        let classes = |mat: &BitMatrix| {
            let mut label = vec![usize::MAX; n];
            let mut next = 0;
            for u in 0..n {
                if label[u] == usize::MAX {
                    for (v, l) in label.iter_mut().enumerate().skip(u) {
                        if mat.get(u, v) && mat.get(v, u) {
                            *l = next;
                        }
                    }
                    next += 1;
                }
            }
            label
        };
        GreensData {
            j_class: classes(&jleq),
            r_class: classes(&rleq),
            l_class: classes(&lleq),
            jleq,
            rleq,
            lleq,
        }
    }

    /// `u <_J v`: below and not equivalent.
    #[inline]
    pub fn j_strictly_below(&self, u: Elem, v: Elem) -> bool {
        self.jleq.get(u, v) && !self.jleq.get(v, u)
    }

    #[inline]
    pub fn r_strictly_below(&self, u: Elem, v: Elem) -> bool {
        self.rleq.get(u, v) && !self.rleq.get(v, u)
    }

    #[inline]
    pub fn l_strictly_below(&self, u: Elem, v: Elem) -> bool {
        self.lleq.get(u, v) && !self.lleq.get(v, u)
    }

    fn discrete(labels: &[usize]) -> bool {
        labels.iter().enumerate().all(|(i, &l)| l == i)
    }

    pub fn is_j_trivial(&self) -> bool {
        Self::discrete(&self.j_class)
    }

    pub fn is_r_trivial(&self) -> bool {
        Self::discrete(&self.r_class)
    }

    pub fn is_l_trivial(&self) -> bool {
        Self::discrete(&self.l_class)
    }

    pub fn num_j_classes(&self) -> usize {
        self.j_class.iter().max().map_or(0, |&m| m + 1)
    }
}
