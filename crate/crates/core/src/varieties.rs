//! Congruences on finite monoids and membership in the variety
//! hierarchy `R_m`, `L_m`.
//!
//! `R_1 = L_1 = J`, `R_{m+1} = K (m) L_m` and `L_{m+1} = D (m) R_m`, where
//! membership in a Mal'cev product `K (m) V` means the quotient by `~K`
//! lies in `V`. A language sits at alternation level `m` of two-variable
//! logic exactly when its syntactic monoid lies in `R_{m+1}` and `L_{m+1}`.

use std::collections::HashMap;
use std::ptr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoid::{Elem, FiniteMonoid, Generators, GreensData};

/// Default cap on the alternation level searched by [`fo2_level`].
pub const DEFAULT_MAX_LEVEL: usize = 6;

/// An equivalence on the elements of a particular monoid.
#[derive(Debug, Clone)]
pub struct Congruence<'m> {
    parent: &'m FiniteMonoid,
    class_of: Vec<usize>,
    num_classes: usize,
}

impl PartialEq for Congruence<'_> {
    fn eq(&self, other: &Self) -> bool {
        ptr::eq(self.parent, other.parent) && self.class_of == other.class_of
    }
}

impl<'m> Congruence<'m> {
    /// Groups elements by a key; classes are numbered by smallest member.
    pub fn from_key<K, F>(parent: &'m FiniteMonoid, mut key: F) -> Self
    where
        K: std::hash::Hash + Eq,
        F: FnMut(Elem) -> K,
    {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let class_of: Vec<usize> = (0..parent.size())
            .map(|x| {
                let fresh = ids.len();
                *ids.entry(key(x)).or_insert(fresh)
            })
            .collect();
        Congruence {
            parent,
            num_classes: ids.len(),
            class_of,
        }
    }

    pub fn identity(parent: &'m FiniteMonoid) -> Self {
        Self::from_key(parent, |x| x)
    }

    pub fn universal(parent: &'m FiniteMonoid) -> Self {
        Self::from_key(parent, |_| ())
    }

    pub fn parent(&self) -> &'m FiniteMonoid {
        self.parent
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn related(&self, u: Elem, v: Elem) -> bool {
        self.class_of[u] == self.class_of[v]
    }

    /// Members of each class, classes in index order.
    pub fn members(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Every pair related here is related in `other`.
    pub fn refines(&self, other: &Congruence<'_>) -> Result<bool> {
        if !ptr::eq(self.parent, other.parent) {
            return Err(Error::ForeignCongruence);
        }
        let mut image = vec![usize::MAX; self.num_classes];
        for (x, &c) in self.class_of.iter().enumerate() {
            let o = other.class_of[x];
            if image[c] == usize::MAX {
                image[c] = o;
            } else if image[c] != o {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least congruence containing both relations.
    pub fn join(&self, other: &Congruence<'m>) -> Result<Congruence<'m>> {
        if !ptr::eq(self.parent, other.parent) {
            return Err(Error::ForeignCongruence);
        }
        let m = self.parent;
        let n = m.size();
        let mut uf = UnionFind::new(n);
        let mut pending = Vec::new();
        for rel in [self, other] {
            let mut first = vec![usize::MAX; rel.num_classes];
            for x in 0..n {
                let c = rel.class_of[x];
                if first[c] == usize::MAX {
                    first[c] = x;
                } else {
                    pending.push((first[c], x));
                }
            }
        }
        let mults: Vec<Elem> = match m.generators() {
            Some(g) => g.images.clone(),
            None => (0..n).collect(),
        };
        while let Some((u, v)) = pending.pop() {
            if uf.union(u, v) {
                for &g in &mults {
                    pending.push((m.mul(u, g), m.mul(v, g)));
                    pending.push((m.mul(g, u), m.mul(g, v)));
                }
            }
        }
        Ok(Congruence::from_key(m, |x| uf.find(x)))
    }

    /// Checks that the classes of two elements determine the class of
    /// their product.
    pub fn verify(&self) -> Result<()> {
        self.class_table().map(|_| ())
    }

    fn class_table(&self) -> Result<Vec<usize>> {
        let m = self.parent;
        let k = self.num_classes;
        let mut table = vec![usize::MAX; k * k];
        for u in 0..m.size() {
            for v in 0..m.size() {
                let slot = self.class_of[u] * k + self.class_of[v];
                let c = self.class_of[m.mul(u, v)];
                if table[slot] == usize::MAX {
                    table[slot] = c;
                } else if table[slot] != c {
                    return Err(Error::NotCongruence { u, v });
                }
            }
        }
        Ok(table)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

// `None` stands for "strictly J-below the idempotent".
fn below_or(greens: &GreensData, value: Elem, idem: Elem) -> Option<Elem> {
    (!greens.j_strictly_below(value, idem)).then_some(value)
}

/// `u ~K v` iff for every idempotent `e`: `eu, ev <_J e` or `eu = ev`.
pub fn sim_k(m: &FiniteMonoid) -> Congruence<'_> {
    sim_k_with(m, &m.greens())
}

pub fn sim_k_with<'m>(m: &'m FiniteMonoid, greens: &GreensData) -> Congruence<'m> {
    let idem = m.idempotents();
    Congruence::from_key(m, |u| {
        idem.iter()
            .map(|&e| below_or(greens, m.mul(e, u), e))
            .collect::<Vec<_>>()
    })
}

/// `u ~D v` iff for every idempotent `f`: `uf, vf <_J f` or `uf = vf`.
pub fn sim_d(m: &FiniteMonoid) -> Congruence<'_> {
    sim_d_with(m, &m.greens())
}

pub fn sim_d_with<'m>(m: &'m FiniteMonoid, greens: &GreensData) -> Congruence<'m> {
    let idem = m.idempotents();
    Congruence::from_key(m, |u| {
        idem.iter()
            .map(|&f| below_or(greens, m.mul(u, f), f))
            .collect::<Vec<_>>()
    })
}

/// `u ~LI v` iff for all J-equivalent idempotents `e, f`:
/// `euf, evf <_J e` or `euf = evf`.
pub fn sim_li(m: &FiniteMonoid) -> Congruence<'_> {
    let greens = m.greens();
    let idem = m.idempotents();
    let pairs: Vec<(Elem, Elem)> = idem
        .iter()
        .flat_map(|&e| idem.iter().map(move |&f| (e, f)))
        .filter(|&(e, f)| greens.j_class[e] == greens.j_class[f])
        .collect();
    Congruence::from_key(m, |u| {
        pairs
            .iter()
            .map(|&(e, f)| below_or(&greens, m.mul(m.mul(e, u), f), e))
            .collect::<Vec<_>>()
    })
}

/// Quotient monoid; fails if `c` is not compatible with multiplication.
pub fn quotient(m: &FiniteMonoid, c: &Congruence<'_>) -> Result<FiniteMonoid> {
    if !ptr::eq(m, c.parent) {
        return Err(Error::ForeignCongruence);
    }
    let table = c.class_table()?;
    let gens = m.generators().map(|g| Generators {
        alphabet: g.alphabet.clone(),
        images: g.images.iter().map(|&x| c.class_of(x)).collect(),
    });
    let labels = m
        .labels()
        .map(|l| c.members().iter().map(|cls| l[cls[0]].clone()).collect());
    Ok(FiniteMonoid::from_parts_unchecked(
        c.num_classes(),
        table,
        c.class_of(m.identity()),
        gens,
        labels,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    K,
    D,
}

/// Alternating quotient chain `M, M/~K, (M/~K)/~D, ...` (or starting with
/// `~D`), built lazily. Entry `j` of the `~K`-first chain is J-trivial iff
/// `M` is in `R_{j+1}`; dually for the `~D`-first chain and `L_{j+1}`.
struct QuotientChain {
    first: Side,
    monoids: Vec<FiniteMonoid>,
    j_trivial: Vec<bool>,
}

impl QuotientChain {
    fn new(m: &FiniteMonoid, first: Side) -> Self {
        QuotientChain {
            first,
            j_trivial: vec![m.is_j_trivial()],
            monoids: vec![m.clone()],
        }
    }

    fn extend_to(&mut self, len: usize) -> Result<()> {
        while self.monoids.len() < len {
            let idx = self.monoids.len();
            let side = match (idx % 2 == 1, self.first) {
                (true, s) => s,
                (false, Side::K) => Side::D,
                (false, Side::D) => Side::K,
            };
            let cur = self.monoids.last().unwrap();
            let greens = cur.greens();
            let cong = match side {
                Side::K => sim_k_with(cur, &greens),
                Side::D => sim_d_with(cur, &greens),
            };
            let next = quotient(cur, &cong)?;
            self.j_trivial.push(next.is_j_trivial());
            self.monoids.push(next);
        }
        Ok(())
    }

    // Two consecutive identity quotients: the chain is constant from here on.
    fn stalled(&self) -> bool {
        let n = self.monoids.len();
        n >= 3 && (n - 3..n).all(|i| self.monoids[i].size() == self.monoids[n - 1].size())
    }
}

/// Membership in `R_m`: J-trivial for `m = 1`, otherwise the quotient by
/// `~K` lies in `L_{m-1}`.
pub fn in_rm(m: &FiniteMonoid, level: usize) -> Result<bool> {
    match level {
        0 => Err(Error::InvalidArgument("R_m needs m >= 1".into())),
        1 => Ok(m.is_j_trivial()),
        _ => in_lm(&quotient(m, &sim_k(m))?, level - 1),
    }
}

/// Membership in `L_m`: J-trivial for `m = 1`, otherwise the quotient by
/// `~D` lies in `R_{m-1}`.
pub fn in_lm(m: &FiniteMonoid, level: usize) -> Result<bool> {
    match level {
        0 => Err(Error::InvalidArgument("L_m needs m >= 1".into())),
        1 => Ok(m.is_j_trivial()),
        _ => in_rm(&quotient(m, &sim_d(m))?, level - 1),
    }
}

/// Outcome of the level search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fo2Level {
    /// The monoid is not in DA.
    NotFo2,
    /// Least `m` with the monoid in `R_{m+1}` and `L_{m+1}`.
    Level(usize),
    /// In DA, but the level is above the requested cap.
    Exceeded(usize),
}

impl Fo2Level {
    pub fn level(self) -> Option<usize> {
        match self {
            Fo2Level::Level(m) => Some(m),
            _ => None,
        }
    }
}

/// Least alternation level of two-variable logic for languages recognized
/// by `m`, computed through the quotient chains.
pub fn fo2_level(m: &FiniteMonoid, max_level: usize) -> Result<Fo2Level> {
    if max_level == 0 {
        return Err(Error::InvalidArgument("max level must be at least 1".into()));
    }
    if !m.is_in_da() {
        return Ok(Fo2Level::NotFo2);
    }
    let bound = max_level.max(2 * m.size() + 2);
    let mut r = QuotientChain::new(m, Side::K);
    let mut l = QuotientChain::new(m, Side::D);
    for level in 1..=bound {
        r.extend_to(level + 1)?;
        l.extend_to(level + 1)?;
        if r.j_trivial[level] && l.j_trivial[level] {
            return Ok(if level <= max_level {
                Fo2Level::Level(level)
            } else {
                Fo2Level::Exceeded(max_level)
            });
        }
        if (r.stalled() && !r.j_trivial[level]) || (l.stalled() && !l.j_trivial[level]) {
            break;
        }
    }
    Err(Error::Inconsistency(format!(
        "monoid of size {} is in DA but its quotient chains never reach a J-trivial monoid",
        m.size()
    )))
}

/// Whether the join of two congruences is contained in `target`.
pub fn join_refines_check(c1: &Congruence<'_>, c2: &Congruence<'_>, target: &Congruence<'_>) -> Result<bool> {
    if !ptr::eq(c1.parent, c2.parent) {
        return Err(Error::ForeignCongruence);
    }
    let c2 = Congruence {
        parent: c1.parent,
        class_of: c2.class_of.clone(),
        num_classes: c2.num_classes,
    };
    c1.join(&c2)?.refines(target)
}

/// Entry `j` of the returned vectors says whether the monoid lies in
/// `R_{j+1}` (resp. `L_{j+1}`), for `j < len`.
pub fn membership_profile(m: &FiniteMonoid, len: usize) -> Result<(Vec<bool>, Vec<bool>)> {
    let mut r = QuotientChain::new(m, Side::K);
    let mut l = QuotientChain::new(m, Side::D);
    r.extend_to(len)?;
    l.extend_to(len)?;
    r.j_trivial.truncate(len);
    l.j_trivial.truncate(len);
    Ok((r.j_trivial, l.j_trivial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::fixtures::*;

    #[test]
    fn sim_k_examples() {
        assert_eq!(sim_k(&trivial()).num_classes(), 1);
        let lz = left_zero();
        assert_eq!(sim_k(&lz).classes(), &[0, 1, 1]);
        let z = zero();
        assert_eq!(sim_k(&z).classes(), &[0, 1]);
    }

    #[test]
    fn sim_d_examples() {
        assert_eq!(sim_d(&trivial()).num_classes(), 1);
        let lz = left_zero();
        assert_eq!(sim_d(&lz).classes(), &[0, 1, 2]);
        let rz = right_zero();
        assert_eq!(sim_d(&rz).classes(), &[0, 1, 1]);
    }

    #[test]
    fn sim_li_examples() {
        assert_eq!(sim_li(&trivial()).num_classes(), 1);
        let z = zero();
        assert_eq!(sim_li(&z).classes(), &[0, 1]);
        for m in [
            left_zero(),
            right_zero(),
            syntactic("(ab)*").monoid,
            syntactic("a(a|b)*b").monoid,
        ] {
            let li = sim_li(&m);
            assert!(sim_k(&m).refines(&li).unwrap());
            assert!(sim_d(&m).refines(&li).unwrap());
        }
    }

    #[test]
    fn quotient_examples() {
        let lz = left_zero();
        let copy = quotient(&lz, &Congruence::identity(&lz)).unwrap();
        assert_eq!(copy, lz);
        let q = quotient(&lz, &sim_k(&lz)).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(q.idempotents(), vec![0, 1]);
        assert_eq!(q.mul(1, 1), 1);
        assert_eq!(quotient(&lz, &Congruence::universal(&lz)).unwrap().size(), 1);
    }

    #[test]
    fn quotient_rejects_non_congruence() {
        // {1,0}: merging 1 with nothing is fine; on the left-zero monoid,
        // merging 1 and a but not b breaks compatibility: 1*b = b, a*b = a.
        let lz = left_zero();
        let bad = Congruence::from_key(&lz, |x| x == 2);
        assert!(matches!(quotient(&lz, &bad), Err(Error::NotCongruence { .. })));
    }

    #[test]
    fn foreign_congruence_is_rejected() {
        let a = left_zero();
        let b = left_zero();
        assert_eq!(quotient(&a, &sim_k(&b)).unwrap_err(), Error::ForeignCongruence);
    }

    #[test]
    fn rm_lm_examples() {
        assert!(in_rm(&zero(), 1).unwrap());
        assert!(in_lm(&zero(), 1).unwrap());
        let lz = left_zero();
        assert!(in_rm(&lz, 2).unwrap());
        assert!(!in_lm(&lz, 2).unwrap());
        assert!(in_lm(&lz, 3).unwrap());
        let ab = syntactic("(ab)*").monoid;
        for m in 1..=ab.size() {
            assert!(!in_rm(&ab, m).unwrap());
            assert!(!in_lm(&ab, m).unwrap());
        }
        assert!(in_rm(&lz, 0).is_err());
    }

    #[test]
    fn level_examples() {
        assert_eq!(fo2_level(&trivial(), 6).unwrap(), Fo2Level::Level(1));
        let lz = syntactic("a(a|b)*").monoid;
        assert_eq!(lz.size(), 3);
        assert_eq!(fo2_level(&lz, 6).unwrap(), Fo2Level::Level(2));
        assert_eq!(fo2_level(&lz, 1).unwrap(), Fo2Level::Exceeded(1));
        assert_eq!(fo2_level(&syntactic("(ab)*").monoid, 6).unwrap(), Fo2Level::NotFo2);
        assert_eq!(
            fo2_level(&syntactic("(a|b)*a(a|b)*").monoid, 6).unwrap(),
            Fo2Level::Level(1)
        );
        assert!(fo2_level(&lz, 0).is_err());
    }

    #[test]
    fn level_agrees_with_recursive_definition() {
        for re in [
            "a(a|b)*",
            "(a|b)*a",
            "a(a|b)*b",
            "(a|b)*ab(a|b)*",
            "b*a(a|b)*",
            "(a|b)*a(b)*",
        ] {
            let m = syntactic(re).monoid;
            let lvl = fo2_level(&m, 6).unwrap();
            if let Fo2Level::Level(k) = lvl {
                assert!(in_rm(&m, k + 1).unwrap() && in_lm(&m, k + 1).unwrap(), "{re}");
                if k > 1 {
                    assert!(!(in_rm(&m, k).unwrap() && in_lm(&m, k).unwrap()), "{re}");
                }
            }
            let (r, l) = membership_profile(&m, 5).unwrap();
            for j in 0..5 {
                assert_eq!(r[j], in_rm(&m, j + 1).unwrap(), "{re} R{}", j + 1);
                assert_eq!(l[j], in_lm(&m, j + 1).unwrap(), "{re} L{}", j + 1);
            }
        }
    }

    #[test]
    fn join_examples() {
        let lz = left_zero();
        let k = sim_k(&lz);
        let d = sim_d(&lz);
        assert_eq!(k.join(&k).unwrap(), k);
        assert_eq!(Congruence::identity(&lz).join(&k).unwrap(), k);
        assert_eq!(k.join(&d).unwrap().classes(), &[0, 1, 1]);
        assert!(join_refines_check(&k, &d, &k).unwrap());
        assert!(!join_refines_check(&k, &d, &d).unwrap());
    }

    #[test]
    fn join_closes_under_products() {
        // merging a and b in (ab)* forces their products together as well
        let m = syntactic("(ab)*").monoid;
        let a = m.eval_str("a").unwrap();
        let b = m.eval_str("b").unwrap();
        let merge = Congruence::from_key(&m, |x| if x == b { a } else { x });
        let j = Congruence::identity(&m).join(&merge).unwrap();
        j.verify().unwrap();
        assert!(j.related(m.eval_str("ab").unwrap(), m.eval_str("aa").unwrap()));
    }
}
