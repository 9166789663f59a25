//! Rankers, condensed rankers and the word relations they induce.
//!
//! Positions are 1-based; `0` and `|u| + 1` are the virtual boundaries.
//! The relations `▷_{m,n}`, `◁_{m,n}` and `≡_{m,n}` are decided by
//! comparing per-word signatures computed over a trie of all rankers in
//! `R_{m,n}`, so partitioning a word set costs one trie pass per word.

use std::collections::HashMap;
use std::fmt;

use crate::automata::{Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::monoid::{Elem, FiniteMonoid};

/// Default cap on `words * rankers` for the partition oracles.
pub const DEFAULT_ORACLE_BUDGET: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    X,
    Y,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::X => Dir::Y,
            Dir::Y => Dir::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub dir: Dir,
    pub letter: Letter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderType {
    Lt,
    Eq,
    Gt,
}

impl OrderType {
    pub fn of(i: usize, j: usize) -> Self {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => OrderType::Lt,
            std::cmp::Ordering::Equal => OrderType::Eq,
            std::cmp::Ordering::Greater => OrderType::Gt,
        }
    }
}

/// `X_a(u, x)`: the least `a`-position strictly after `x`.
pub fn next_pos(u: &[Letter], a: Letter, x: usize) -> Option<usize> {
    (x + 1..=u.len()).find(|&y| u[y - 1] == a)
}

/// `Y_a(u, x)`: the greatest `a`-position strictly before `x`.
pub fn prev_pos(u: &[Letter], a: Letter, x: usize) -> Option<usize> {
    (1..x.min(u.len() + 1)).rev().find(|&y| u[y - 1] == a)
}

fn apply(u: &[Letter], step: Step, x: usize) -> Option<usize> {
    match step.dir {
        Dir::X => next_pos(u, step.letter, x),
        Dir::Y => prev_pos(u, step.letter, x),
    }
}

/// A nonempty sequence of `X_a` / `Y_a` instructions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ranker {
    steps: Vec<Step>,
}

impl Ranker {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidArgument("a ranker needs at least one instruction".into()));
        }
        Ok(Ranker { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn blocks(&self) -> usize {
        1 + self.steps.windows(2).filter(|w| w[0].dir != w[1].dir).count()
    }

    pub fn start(&self) -> Dir {
        self.steps[0].dir
    }

    /// Position defined on `u`, if any.
    pub fn eval(&self, u: &[Letter]) -> Option<usize> {
        let first = match self.start() {
            Dir::X => 0,
            Dir::Y => u.len() + 1,
        };
        self.steps.iter().try_fold(first, |x, &s| apply(u, s, x))
    }

    /// Interval-chain test: each visited position must lie strictly inside
    /// the current open interval, which starts as `(0, |u|+1)` and after
    /// every step has the new position as its left bound if the following
    /// instruction is an `X`, as its right bound otherwise.
    pub fn is_condensed(&self, u: &[Letter]) -> bool {
        let (mut lo, mut hi) = (0, u.len() + 1);
        let mut x = match self.start() {
            Dir::X => lo,
            Dir::Y => hi,
        };
        for (i, &s) in self.steps.iter().enumerate() {
            let Some(p) = apply(u, s, x) else { return false };
            if p <= lo || p >= hi {
                return false;
            }
            match self.steps.get(i + 1).map(|n| n.dir) {
                Some(Dir::X) => lo = p,
                Some(Dir::Y) => hi = p,
                None => {}
            }
            x = p;
        }
        true
    }

    /// Condensedness read as "no previously visited position is overrun":
    /// a step from `p` to `p'` fails if some visited position lies in
    /// `(p, p']` (resp. `[p', p)`).
    pub fn is_condensed_by_overrun(&self, u: &[Letter]) -> bool {
        let mut visited: Vec<usize> = Vec::with_capacity(self.depth());
        let mut x = match self.start() {
            Dir::X => 0,
            Dir::Y => u.len() + 1,
        };
        for &s in &self.steps {
            let Some(p) = apply(u, s, x) else { return false };
            let overrun = visited.iter().any(|&v| match s.dir {
                Dir::X => x < v && v <= p,
                Dir::Y => p <= v && v < x,
            });
            if overrun {
                return false;
            }
            visited.push(p);
            x = p;
        }
        true
    }

    /// Parses `Xa Yb Xc`: whitespace-separated tokens, a direction followed
    /// by one alphabet symbol.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut steps = Vec::new();
        let mut offset = 0;
        for token in text.split_whitespace() {
            let pos = offset + text[offset..].find(token).unwrap_or(0);
            offset = pos + token.len();
            let dir = match token.chars().next() {
                Some('X') => Dir::X,
                Some('Y') => Dir::Y,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: format!("expected `X` or `Y` at the start of `{token}`"),
                    })
                }
            };
            let symbol = &token[1..];
            if symbol.is_empty() {
                return Err(Error::Syntax {
                    pos: pos + 1,
                    msg: "missing letter after direction".into(),
                });
            }
            let letter = alphabet
                .index_of(symbol)
                .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
            steps.push(Step { dir, letter });
        }
        if steps.is_empty() {
            return Err(Error::Syntax {
                pos: 0,
                msg: "empty ranker".into(),
            });
        }
        Ranker::new(steps)
    }

    pub fn format(&self, alphabet: &Alphabet) -> String {
        self.steps
            .iter()
            .map(|s| {
                let d = if s.dir == Dir::X { 'X' } else { 'Y' };
                format!("{d}{}", alphabet.symbol(s.letter))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Ranker {
    /// Letters are shown by index, e.g. `X0 Y1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let d = if s.dir == Dir::X { 'X' } else { 'Y' };
            write!(f, "{d}{}", s.letter)?;
        }
        Ok(())
    }
}

pub fn eval_ranker(r: &Ranker, u: &[Letter]) -> Option<usize> {
    r.eval(u)
}

pub fn is_condensed(r: &Ranker, u: &[Letter]) -> bool {
    r.is_condensed(u)
}

const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    step: Step,
    depth: u32,
    blocks: u32,
    start: Dir,
}

/// All rankers of `R_{m,n}` over `alphabet_size` letters as a trie, in
/// depth-major order and lexicographic on `(direction, letter)` within
/// each depth, `X` before `Y`.
#[derive(Debug, Clone)]
pub struct RankerTable {
    alphabet_size: usize,
    max_blocks: usize,
    max_depth: usize,
    nodes: Vec<Node>,
}

/// Per-word evaluation of a [`RankerTable`].
#[derive(Debug, Clone)]
pub struct TableEval {
    // 0 = undefined
    pos: Vec<u32>,
    condensed: Vec<bool>,
}

impl TableEval {
    pub fn position(&self, id: usize) -> Option<usize> {
        match self.pos[id] {
            0 => None,
            p => Some(p as usize),
        }
    }

    pub fn is_condensed(&self, id: usize) -> bool {
        self.condensed[id]
    }
}

impl RankerTable {
    pub fn new(alphabet_size: usize, max_blocks: usize, max_depth: usize) -> Self {
        let mut nodes = Vec::new();
        if max_blocks >= 1 && max_depth >= 1 {
            for dir in [Dir::X, Dir::Y] {
                for letter in 0..alphabet_size {
                    nodes.push(Node {
                        parent: NO_PARENT,
                        step: Step { dir, letter },
                        depth: 1,
                        blocks: 1,
                        start: dir,
                    });
                }
            }
        }
        let mut i = 0;
        while i < nodes.len() {
            let node = nodes[i];
            if (node.depth as usize) < max_depth {
                for dir in [Dir::X, Dir::Y] {
                    let blocks = node.blocks + u32::from(dir != node.step.dir);
                    if blocks as usize > max_blocks {
                        continue;
                    }
                    for letter in 0..alphabet_size {
                        nodes.push(Node {
                            parent: i as u32,
                            step: Step { dir, letter },
                            depth: node.depth + 1,
                            blocks,
                            start: node.start,
                        });
                    }
                }
            }
            i += 1;
        }
        RankerTable {
            alphabet_size,
            max_blocks,
            max_depth,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn max_blocks(&self) -> usize {
        self.max_blocks
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn ranker(&self, id: usize) -> Ranker {
        let mut steps = Vec::with_capacity(self.nodes[id].depth as usize);
        let mut cur = id as u32;
        while cur != NO_PARENT {
            let n = &self.nodes[cur as usize];
            steps.push(n.step);
            cur = n.parent;
        }
        steps.reverse();
        Ranker { steps }
    }

    /// Whether ranker `id` lies in `R^{start}_{m,n}`.
    pub fn in_class(&self, id: usize, start: Dir, m: usize, n: usize) -> bool {
        let node = &self.nodes[id];
        node.start == start && node.blocks as usize <= m && node.depth as usize <= n
    }

    pub fn eval(&self, u: &[Letter]) -> TableEval {
        let len = u.len();
        // next[a][x], prev[a][x] for x in 0..=len+1, 0 = none
        let k = self.alphabet_size;
        let mut next = vec![0u32; k * (len + 2)];
        let mut prev = vec![0u32; k * (len + 2)];
        for a in 0..k {
            let row = a * (len + 2);
            let mut nearest = 0u32;
            for x in (0..=len).rev() {
                next[row + x] = nearest;
                if x >= 1 && u[x - 1] == a {
                    nearest = x as u32;
                }
            }
            nearest = 0;
            for x in 1..=len + 1 {
                prev[row + x] = nearest;
                if x <= len && u[x - 1] == a {
                    nearest = x as u32;
                }
            }
        }
        let step = |s: Step, x: u32| -> u32 {
            let row = s.letter * (len + 2);
            if s.letter >= k {
                return 0;
            }
            match s.dir {
                Dir::X if (x as usize) <= len => next[row + x as usize],
                Dir::Y if x >= 1 => prev[row + x as usize],
                _ => 0,
            }
        };
        let n = self.nodes.len();
        let mut pos = vec![0u32; n];
        let mut condensed = vec![false; n];
        // open interval in which each node's own position must lie
        let mut lo = vec![0u32; n];
        let mut hi = vec![0u32; n];
        let top = len as u32 + 1;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.parent == NO_PARENT {
                let from = if node.step.dir == Dir::X { 0 } else { top };
                pos[i] = step(node.step, from);
                lo[i] = 0;
                hi[i] = top;
                condensed[i] = pos[i] != 0;
                continue;
            }
            let p = node.parent as usize;
            if pos[p] == 0 {
                continue;
            }
            pos[i] = step(node.step, pos[p]);
            if condensed[p] && pos[i] != 0 {
                let (l, h) = match node.step.dir {
                    Dir::X => (pos[p], hi[p]),
                    Dir::Y => (lo[p], pos[p]),
                };
                lo[i] = l;
                hi[i] = h;
                condensed[i] = l < pos[i] && pos[i] < h;
            }
        }
        TableEval { pos, condensed }
    }

    /// Canonical key of the class of `u` under `rel` at `(m, n)`, which
    /// must not exceed the table's bounds.
    pub fn signature(&self, eval: &TableEval, rel: Relation, m: usize, n: usize) -> Vec<u32> {
        assert!(
            m <= self.max_blocks && n <= self.max_depth,
            "signature bounds exceed the table"
        );
        let ids = 0..self.nodes.len();
        let (m1, n1) = (m.saturating_sub(1), n.saturating_sub(1));
        match rel {
            Relation::Right | Relation::Left => {
                let (d, e) = if rel == Relation::Right {
                    (Dir::X, Dir::Y)
                } else {
                    (Dir::Y, Dir::X)
                };
                pack_bits(
                    ids.filter(|&i| self.in_class(i, d, m, n) || self.in_class(i, e, m1, n1))
                        .map(|i| eval.condensed[i]),
                )
            }
            Relation::Equiv => {
                let mut sig = pack_bits(
                    ids.filter(|&i| self.nodes[i].blocks as usize <= m && self.nodes[i].depth as usize <= n)
                        .map(|i| eval.pos[i] != 0),
                );
                let clauses = [
                    (Dir::X, m, n, Dir::Y, m, n1),
                    (Dir::Y, m, n, Dir::X, m, n1),
                    (Dir::X, m, n, Dir::X, m1, n1),
                    (Dir::Y, m, n, Dir::Y, m1, n1),
                ];
                for (d1, bm1, bn1, d2, bm2, bn2) in clauses {
                    self.push_order_clause(
                        &mut sig,
                        eval,
                        |i| self.in_class(i, d1, bm1, bn1),
                        |i| self.in_class(i, d2, bm2, bn2),
                    );
                }
                sig
            }
        }
    }

    // The order types between defined members of two ranker sets are
    // captured by the sequence of their positions, grouped by position,
    // with adjacent groups merged when both contain members of only the
    // same one set (their relative order is then unobservable).
    fn push_order_clause(
        &self,
        sig: &mut Vec<u32>,
        eval: &TableEval,
        first: impl Fn(usize) -> bool,
        second: impl Fn(usize) -> bool,
    ) {
        let mut items: Vec<(u32, u32)> = Vec::new();
        for i in 0..self.nodes.len() {
            if eval.pos[i] == 0 {
                continue;
            }
            if first(i) {
                items.push((eval.pos[i], i as u32));
            }
            if second(i) {
                items.push((eval.pos[i], i as u32 | TAG2));
            }
        }
        sig.push(CLAUSE_END);
        if items.is_empty() {
            return;
        }
        items.sort_unstable();
        let mut blocks: Vec<(u8, Vec<u32>)> = Vec::new();
        let mut start = 0;
        while start < items.len() {
            let p = items[start].0;
            let end = start + items[start..].iter().take_while(|it| it.0 == p).count();
            let group: Vec<u32> = items[start..end].iter().map(|it| it.1).collect();
            let kind = group.iter().fold(0u8, |k, &id| k | if id & TAG2 == 0 { 1 } else { 2 });
            match blocks.last_mut() {
                Some((last, members)) if kind != 3 && *last == kind => members.extend(group),
                _ => blocks.push((kind, group)),
            }
            start = end;
        }
        for (_, mut members) in blocks {
            members.sort_unstable();
            sig.extend(members);
            sig.push(BLOCK_END);
        }
    }
}

const TAG2: u32 = 1 << 31;
const BLOCK_END: u32 = u32::MAX;
const CLAUSE_END: u32 = u32::MAX - 1;

fn pack_bits(bits: impl Iterator<Item = bool>) -> Vec<u32> {
    let mut out = Vec::new();
    for (i, b) in bits.enumerate() {
        if i % 31 == 0 {
            out.push(0);
        }
        if b {
            *out.last_mut().unwrap() |= 1 << (i % 31);
        }
    }
    out
}

/// Rankers of `R_{m,n}` (restricted to those starting with `start` if
/// given), in the canonical enumeration order.
pub fn enumerate_rankers(alphabet_size: usize, m: usize, n: usize, start: Option<Dir>) -> Vec<Ranker> {
    let table = RankerTable::new(alphabet_size, m, n);
    (0..table.len())
        .filter(|&i| start.is_none_or(|d| table.nodes[i].start == d))
        .map(|i| table.ranker(i))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `▷_{m,n}`: same condensed rankers in `R^X_{m,n} ∪ R^Y_{m-1,n-1}`.
    Right,
    /// `◁_{m,n}`: same condensed rankers in `R^Y_{m,n} ∪ R^X_{m-1,n-1}`.
    Left,
    /// `≡_{m,n}`.
    Equiv,
}

fn implied_alphabet(words: &[&[Letter]]) -> usize {
    words.iter().flat_map(|w| w.iter()).max().map_or(1, |&a| a + 1)
}

/// Whether `u` and `v` are related by `rel` at `(m, n)`. Bounds of `0`
/// give empty ranker classes, hence the universal relation.
pub fn related(rel: Relation, u: &[Letter], v: &[Letter], m: usize, n: usize) -> bool {
    let table = RankerTable::new(implied_alphabet(&[u, v]), m, n);
    table.signature(&table.eval(u), rel, m, n) == table.signature(&table.eval(v), rel, m, n)
}

pub fn rel_right(u: &[Letter], v: &[Letter], m: usize, n: usize) -> bool {
    related(Relation::Right, u, v, m, n)
}

pub fn rel_left(u: &[Letter], v: &[Letter], m: usize, n: usize) -> bool {
    related(Relation::Left, u, v, m, n)
}

pub fn equiv_wi(u: &[Letter], v: &[Letter], m: usize, n: usize) -> bool {
    related(Relation::Equiv, u, v, m, n)
}

/// All words of length at most `max_len` over `k` letters, shortlex.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for a in 0..k {
                let mut x: Word = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Index of `w` in [`words_up_to`] order.
pub fn word_index(k: usize, w: &[Letter]) -> usize {
    let shorter: usize = (0..w.len()).map(|l| k.pow(l as u32)).sum();
    shorter + w.iter().fold(0, |acc, &a| acc * k + a)
}

/// Class ids (numbered by first occurrence) of `words` under `rel`.
pub fn partition(
    words: &[Word],
    alphabet_size: usize,
    rel: Relation,
    m: usize,
    n: usize,
    budget: u128,
) -> Result<Vec<usize>> {
    let table = RankerTable::new(alphabet_size, m, n);
    let work = words.len() as u128 * table.len() as u128;
    if work > budget {
        return Err(Error::BudgetExceeded { work, cap: budget });
    }
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
    Ok(words
        .iter()
        .map(|w| {
            let sig = table.signature(&table.eval(w), rel, m, n);
            let fresh = ids.len();
            *ids.entry(sig).or_insert(fresh)
        })
        .collect())
}

/// A pair of words related by `rel` at `(m, n)` but mapped to different
/// elements of `monoid`, searched over all words up to `max_len`.
pub fn kernel_counterexample(
    monoid: &FiniteMonoid,
    rel: Relation,
    m: usize,
    n: usize,
    max_len: usize,
    budget: u128,
) -> Result<Option<(Word, Word)>> {
    let k = monoid.generators().ok_or(Error::NoGenerators)?.images.len();
    let words = words_up_to(k, max_len);
    let classes = partition(&words, k, rel, m, n, budget)?;
    let mut seen: HashMap<usize, (usize, Elem)> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let value = monoid.eval_word(w)?;
        let (first, expected) = *seen.entry(classes[i]).or_insert((i, value));
        if expected != value {
            return Ok(Some((words[first].clone(), w.clone())));
        }
    }
    Ok(None)
}

/// Checks `≡_{m,n} ⊆ ker φ` on words up to `max_len`; `None` means it holds.
pub fn oracle_prop_main(
    monoid: &FiniteMonoid,
    m: usize,
    n: usize,
    max_len: usize,
    budget: u128,
) -> Result<Option<(Word, Word)>> {
    kernel_counterexample(monoid, Relation::Equiv, m, n, max_len, budget)
}

/// Least `n <= max_n` for which [`oracle_prop_main`] holds.
pub fn least_oracle_n(
    monoid: &FiniteMonoid,
    m: usize,
    max_n: usize,
    max_len: usize,
    budget: u128,
) -> Result<Option<usize>> {
    for n in 1..=max_n {
        if oracle_prop_main(monoid, m, n, max_len, budget)?.is_none() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `u = p_0 a_0 p_1 a_1 ... a_{k-1} p_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub pieces: Vec<Word>,
    pub markers: Vec<Letter>,
}

impl Factorization {
    pub fn concat(&self) -> Word {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            out.extend(p);
            if let Some(&a) = self.markers.get(i) {
                out.push(a);
            }
        }
        out
    }

    fn reversed(mut self) -> Self {
        self.pieces.reverse();
        for p in &mut self.pieces {
            p.reverse();
        }
        self.markers.reverse();
        self
    }
}

/// R-factorization: a marker letter at every strict R-descent of the
/// prefix images, pieces keeping the R-class.
pub fn r_factorize(monoid: &FiniteMonoid, u: &[Letter]) -> Result<Factorization> {
    let gens = monoid.generators().ok_or(Error::NoGenerators)?;
    let greens = monoid.greens();
    let mut f = Factorization {
        pieces: vec![Vec::new()],
        markers: Vec::new(),
    };
    let mut p = monoid.identity();
    for &a in u {
        let g = *gens
            .images
            .get(a)
            .ok_or_else(|| Error::UnknownSymbol(format!("letter index {a}")))?;
        let q = monoid.mul(p, g);
        if greens.r_strictly_below(q, p) {
            f.markers.push(a);
            f.pieces.push(Vec::new());
        } else {
            f.pieces.last_mut().unwrap().push(a);
        }
        p = q;
    }
    Ok(f)
}

/// L-factorization: the mirror image of the R-factorization read from
/// the right.
pub fn l_factorize(monoid: &FiniteMonoid, u: &[Letter]) -> Result<Factorization> {
    let rev: Word = u.iter().rev().copied().collect();
    Ok(r_factorize(&monoid.reverse(), &rev)?.reversed())
}
