//! Omega-terms and exhaustive identity checking.
//!
//! `R_m` (`m >= 2`) is the class of finite monoids satisfying the DA
//! identity `(xy)^w x (xy)^w = (xy)^w` together with `phi(G_m) = phi(I_m)`,
//! where `G_m`, `I_m` are words over variables and `phi` substitutes an
//! omega-term for each variable. `L_m` uses the mirrored words. Checking
//! these identities over every assignment gives a decision procedure that
//! is independent of the quotient chains in [`crate::varieties`].

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoid::{Elem, FiniteMonoid};
use crate::varieties::Fo2Level;

/// Default cap on `|M|^v` assignments per identity.
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 10_000_000;

/// Omega-term over variables `x1, x2, ...` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OmegaTerm {
    Var(usize),
    Product(Vec<Arc<OmegaTerm>>),
    Omega(Arc<OmegaTerm>),
}

pub type Term = Arc<OmegaTerm>;

pub fn var(k: usize) -> Term {
    assert!(k >= 1, "variables are 1-based");
    Arc::new(OmegaTerm::Var(k))
}

pub fn product(parts: Vec<Term>) -> Term {
    assert!(!parts.is_empty(), "empty product");
    Arc::new(OmegaTerm::Product(parts))
}

pub fn omega(t: Term) -> Term {
    Arc::new(OmegaTerm::Omega(t))
}

impl OmegaTerm {
    /// Largest variable index occurring in the term.
    pub fn num_vars(&self) -> usize {
        match self {
            OmegaTerm::Var(k) => *k,
            OmegaTerm::Product(parts) => parts.iter().map(|p| p.num_vars()).max().unwrap_or(0),
            OmegaTerm::Omega(t) => t.num_vars(),
        }
    }
}

impl fmt::Display for OmegaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaTerm::Var(k) => write!(f, "x{k}"),
            OmegaTerm::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            OmegaTerm::Omega(t) => write!(f, "({t})^w"),
        }
    }
}

/// A nonempty word over the variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarWord(Vec<usize>);

impl VarWord {
    pub fn new(vars: Vec<usize>) -> Self {
        assert!(!vars.is_empty() && vars.iter().all(|&v| v >= 1));
        VarWord(vars)
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mirror(&self) -> VarWord {
        VarWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &VarWord) -> VarWord {
        VarWord(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for VarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

fn check_level(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "G_m and I_m are defined for m >= 2, got {m}"
        )));
    }
    Ok(())
}

/// `G_2 = x2 x1`, `G_{m+1} = x_{m+1} mirror(G_m)`.
pub fn build_g(m: usize) -> Result<VarWord> {
    check_level(m)?;
    let mut g = VarWord(vec![2, 1]);
    for k in 3..=m {
        let mut next = vec![k];
        next.extend(g.mirror().0);
        g = VarWord(next);
    }
    Ok(g)
}

/// `I_2 = x2 x1 x2`, `I_{m+1} = G_{m+1} x_{m+1} mirror(I_m)`.
pub fn build_i(m: usize) -> Result<VarWord> {
    check_level(m)?;
    let mut i = VarWord(vec![2, 1, 2]);
    for k in 3..=m {
        let mut next = build_g(k)?.0;
        next.push(k);
        next.extend(i.mirror().0);
        i = VarWord(next);
    }
    Ok(i)
}

/// Memoized substitution `phi`:
/// `phi(x1) = (x1^w x2^w x1^w)^w`, `phi(x2) = x2^w` and
/// `phi(x_{m+1}) = (x_{m+1}^w phi(G_m mirror(G_m))^w x_{m+1}^w)^w`.
#[derive(Debug, Default)]
pub struct Phi {
    cache: HashMap<usize, Term>,
}

impl Phi {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of_var(&mut self, k: usize) -> Term {
        if let Some(t) = self.cache.get(&k) {
            return t.clone();
        }
        let t = match k {
            0 => panic!("variables are 1-based"),
            1 => omega(product(vec![omega(var(1)), omega(var(2)), omega(var(1))])),
            2 => omega(var(2)),
            _ => {
                let g = build_g(k - 1).expect("k - 1 >= 2");
                let inner = self.of_word(&g.concat(&g.mirror()));
                omega(product(vec![omega(var(k)), omega(inner), omega(var(k))]))
            }
        };
        self.cache.insert(k, t.clone());
        t
    }

    pub fn of_word(&mut self, w: &VarWord) -> Term {
        product(w.0.iter().map(|&k| self.of_var(k)).collect())
    }
}

/// `phi(x_k)`.
pub fn phi_of(k: usize) -> Term {
    Phi::new().of_var(k)
}

// Hash-consed evaluation program; node ids are topologically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Var(usize),
    Product(Vec<usize>),
    Omega(usize),
}

#[derive(Debug, Default)]
struct Program {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
    by_ptr: HashMap<*const OmegaTerm, usize>,
}

impl Program {
    fn add(&mut self, t: &Term) -> usize {
        let key = Arc::as_ptr(t);
        if let Some(&id) = self.by_ptr.get(&key) {
            return id;
        }
        let node = match &**t {
            OmegaTerm::Var(k) => Node::Var(k - 1),
            OmegaTerm::Product(parts) => Node::Product(parts.iter().map(|p| self.add(p)).collect()),
            OmegaTerm::Omega(inner) => Node::Omega(self.add(inner)),
        };
        let fresh = self.nodes.len();
        let id = *self.ids.entry(node.clone()).or_insert_with(|| {
            self.nodes.push(node);
            fresh
        });
        self.by_ptr.insert(key, id);
        id
    }

    fn run(&self, m: &FiniteMonoid, omega_table: &[Elem], assignment: &[Elem], values: &mut Vec<Elem>) {
        values.clear();
        for node in &self.nodes {
            let v = match node {
                Node::Var(k) => assignment[*k],
                Node::Product(parts) => parts.iter().fold(m.identity(), |acc, &p| m.mul(acc, values[p])),
                Node::Omega(p) => omega_table[values[*p]],
            };
            values.push(v);
        }
    }
}

/// Evaluates a term under an assignment `x_k -> assignment[k - 1]`.
pub fn eval_term(m: &FiniteMonoid, t: &Term, assignment: &[Elem]) -> Result<Elem> {
    let needed = t.num_vars();
    if assignment.len() < needed {
        return Err(Error::InvalidArgument(format!(
            "assignment covers {} variables, term uses x{needed}",
            assignment.len()
        )));
    }
    if let Some(&bad) = assignment.iter().find(|&&x| x >= m.size()) {
        return Err(Error::InvalidArgument(format!("element {bad} is out of range")));
    }
    let mut prog = Program::default();
    let root = prog.add(t);
    let omega_table: Vec<Elem> = (0..m.size()).map(|x| m.omega_power(x)).collect();
    let mut values = Vec::new();
    prog.run(m, &omega_table, assignment, &mut values);
    Ok(values[root])
}

/// An identity `lhs = rhs` between omega-terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Identity { lhs, rhs }
    }

    pub fn num_vars(&self) -> usize {
        self.lhs.num_vars().max(self.rhs.num_vars())
    }

    /// `(x1 x2)^w x1 (x1 x2)^w = (x1 x2)^w`.
    pub fn da() -> Self {
        let e = omega(product(vec![var(1), var(2)]));
        Identity::new(product(vec![e.clone(), var(1), e.clone()]), e)
    }

    /// `x1^{w+1} = x1^w`.
    pub fn aperiodic() -> Self {
        Identity::new(product(vec![var(1), omega(var(1))]), omega(var(1)))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// A failing assignment, `assignment[k - 1]` being the value of `x_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub identity: String,
    pub assignment: Vec<Elem>,
}

/// First assignment (in lexicographic order) on which the two sides
/// differ, or `None` if the identity holds.
pub fn find_counterexample(m: &FiniteMonoid, id: &Identity, cap: u128) -> Result<Option<Vec<Elem>>> {
    let vars = id.num_vars();
    let total = (m.size() as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
    if total > cap {
        return Err(Error::IdentityCheckTooLarge {
            assignments: total,
            cap,
        });
    }
    if Arc::ptr_eq(&id.lhs, &id.rhs) || id.lhs == id.rhs {
        return Ok(None);
    }
    let mut prog = Program::default();
    let lhs = prog.add(&id.lhs);
    let rhs = prog.add(&id.rhs);
    let omega_table: Vec<Elem> = (0..m.size()).map(|x| m.omega_power(x)).collect();
    let mut assignment = vec![0; vars];
    let mut values = Vec::with_capacity(prog.nodes.len());
    loop {
        prog.run(m, &omega_table, &assignment, &mut values);
        if values[lhs] != values[rhs] {
            return Ok(Some(assignment));
        }
        // odometer, last variable fastest
        let mut k = vars;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            assignment[k] += 1;
            if assignment[k] < m.size() {
                break;
            }
            assignment[k] = 0;
        }
    }
}

pub fn satisfies_identity(m: &FiniteMonoid, lhs: &Term, rhs: &Term) -> Result<bool> {
    let id = Identity::new(lhs.clone(), rhs.clone());
    Ok(find_counterexample(m, &id, DEFAULT_ASSIGNMENT_CAP)?.is_none())
}

/// Which side of the hierarchy an identity check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    R,
    L,
}

/// The identity `phi(G_m) = phi(I_m)` (mirrored words for `L_m`).
pub fn level_identity(m: usize, side: Side) -> Result<Identity> {
    let (g, i) = (build_g(m)?, build_i(m)?);
    let (g, i) = match side {
        Side::R => (g, i),
        Side::L => (g.mirror(), i.mirror()),
    };
    let mut phi = Phi::new();
    Ok(Identity::new(phi.of_word(&g), phi.of_word(&i)))
}

/// Checks the identities defining `R_m` / `L_m`; returns the first failure.
pub fn level_counterexample(m: &FiniteMonoid, level: usize, side: Side, cap: u128) -> Result<Option<Witness>> {
    check_level(level)?;
    for id in [Identity::da(), level_identity(level, side)?] {
        if let Some(assignment) = find_counterexample(m, &id, cap)? {
            return Ok(Some(Witness {
                identity: id.to_string(),
                assignment,
            }));
        }
    }
    Ok(None)
}

pub fn in_rm_by_identities(m: &FiniteMonoid, level: usize) -> Result<bool> {
    Ok(level_counterexample(m, level, Side::R, DEFAULT_ASSIGNMENT_CAP)?.is_none())
}

pub fn in_lm_by_identities(m: &FiniteMonoid, level: usize) -> Result<bool> {
    Ok(level_counterexample(m, level, Side::L, DEFAULT_ASSIGNMENT_CAP)?.is_none())
}

/// Level search through identities only. The witness, if any, is the
/// failing DA assignment.
pub fn fo2_level_by_identities(m: &FiniteMonoid, max_level: usize, cap: u128) -> Result<(Fo2Level, Option<Witness>)> {
    if max_level == 0 {
        return Err(Error::InvalidArgument("max level must be at least 1".into()));
    }
    let da = Identity::da();
    if let Some(assignment) = find_counterexample(m, &da, cap)? {
        return Ok((
            Fo2Level::NotFo2,
            Some(Witness {
                identity: da.to_string(),
                assignment,
            }),
        ));
    }
    for level in 1..=max_level {
        let r = find_counterexample(m, &level_identity(level + 1, Side::R)?, cap)?.is_none();
        if r && find_counterexample(m, &level_identity(level + 1, Side::L)?, cap)?.is_none() {
            return Ok((Fo2Level::Level(level), None));
        }
    }
    Ok((Fo2Level::Exceeded(max_level), None))
}

fn chain(vars: impl IntoIterator<Item = usize>) -> Term {
    product(vars.into_iter().map(var).collect())
}

/// Straubing's conjectured pair `(u_m, v_m)`: `u_1 = (x1 x2)^w`,
/// `v_1 = (x2 x1)^w`, and
/// `u_{n+1} = (x1..x_{2n} x_{2n+1})^w u_n (x_{2n+2} x1..x_{2n})^w`,
/// likewise for `v`. The recursion index is read as `n = m`.
pub fn straubing_terms(m: usize) -> Result<(Term, Term)> {
    if m == 0 {
        return Err(Error::InvalidArgument("Straubing terms start at m = 1".into()));
    }
    let mut u = omega(chain([1, 2]));
    let mut v = omega(chain([2, 1]));
    for n in 1..m {
        let left = omega(chain((1..=2 * n + 1).collect::<Vec<_>>()));
        let right = omega(chain(std::iter::once(2 * n + 2).chain(1..=2 * n)));
        u = product(vec![left.clone(), u, right.clone()]);
        v = product(vec![left, v, right]);
    }
    Ok((u, v))
}

/// Experimental: aperiodicity plus `u_m = v_m`.
pub fn check_straubing(m: &FiniteMonoid, level: usize, cap: u128) -> Result<bool> {
    let (u, v) = straubing_terms(level)?;
    if find_counterexample(m, &Identity::aperiodic(), cap)?.is_some() {
        return Ok(false);
    }
    Ok(find_counterexample(m, &Identity::new(u, v), cap)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::fixtures::*;

    fn w(v: &[usize]) -> VarWord {
        VarWord::new(v.to_vec())
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(w(&[2, 1]).mirror(), w(&[1, 2]));
        assert_eq!(w(&[2, 1, 2]).mirror(), w(&[2, 1, 2]));
        assert_eq!(w(&[3]).mirror(), w(&[3]));
    }

    #[test]
    fn g_and_i_words() {
        assert_eq!(build_g(2).unwrap(), w(&[2, 1]));
        assert_eq!(build_i(2).unwrap(), w(&[2, 1, 2]));
        assert_eq!(build_g(3).unwrap(), w(&[3, 1, 2]));
        assert_eq!(build_i(3).unwrap(), w(&[3, 1, 2, 3, 2, 1, 2]));
        assert!(build_g(1).is_err());
        assert!(build_i(0).is_err());
        for m in 3..8 {
            let g = build_g(m).unwrap();
            assert_eq!(g.len(), m);
            let mut vars = g.vars().to_vec();
            vars.sort_unstable();
            assert_eq!(vars, (1..=m).collect::<Vec<_>>());
            assert_eq!(build_i(m).unwrap().len(), m + 1 + build_i(m - 1).unwrap().len());
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_of(1).to_string(), "((x1)^w.(x2)^w.(x1)^w)^w");
        assert_eq!(phi_of(2).to_string(), "(x2)^w");
        let inner = Phi::new().of_word(&w(&[2, 1, 1, 2]));
        let expected = omega(product(vec![omega(var(3)), omega(inner), omega(var(3))]));
        assert_eq!(phi_of(3), expected);
        assert_eq!(phi_of(3).num_vars(), 3);
    }

    #[test]
    fn eval_examples() {
        let m = syntactic("(ab)*").monoid;
        let a = m.eval_str("a").unwrap();
        let b = m.eval_str("b").unwrap();
        assert_eq!(eval_term(&m, &var(1), &[a]).unwrap(), a);
        let ab = m.eval_str("ab").unwrap();
        assert_eq!(eval_term(&m, &omega(var(1)), &[ab]).unwrap(), ab);
        assert_eq!(eval_term(&m, &omega(chain([1, 2])), &[a, b]).unwrap(), ab);
        assert!(eval_term(&m, &var(2), &[a]).is_err());
    }

    #[test]
    fn identity_examples() {
        let da = Identity::da();
        assert!(satisfies_identity(&zero(), &da.lhs, &da.rhs).unwrap());
        let m = syntactic("(ab)*").monoid;
        let cex = find_counterexample(&m, &da, DEFAULT_ASSIGNMENT_CAP).unwrap().unwrap();
        let (x, y) = m.da_witness().unwrap();
        assert_eq!(cex, vec![x, y]);
        let t = phi_of(3);
        assert!(satisfies_identity(&m, &t, &t).unwrap());
    }

    #[test]
    fn level_identity_examples() {
        let lz = left_zero();
        assert!(in_rm_by_identities(&lz, 2).unwrap());
        assert!(!in_lm_by_identities(&lz, 2).unwrap());
        assert!(in_rm_by_identities(&zero(), 2).unwrap());
        assert!(in_rm_by_identities(&lz, 1).is_err());
    }

    #[test]
    fn identity_cap() {
        let m = syntactic("(ab)*").monoid;
        let err = find_counterexample(&m, &level_identity(3, Side::R).unwrap(), 100).unwrap_err();
        assert_eq!(
            err,
            Error::IdentityCheckTooLarge {
                assignments: 216,
                cap: 100
            }
        );
    }

    #[test]
    fn level_by_identities() {
        assert_eq!(
            fo2_level_by_identities(&syntactic("a(a|b)*").monoid, 6, DEFAULT_ASSIGNMENT_CAP)
                .unwrap()
                .0,
            Fo2Level::Level(2)
        );
        let (lvl, wit) = fo2_level_by_identities(&syntactic("(ab)*").monoid, 6, DEFAULT_ASSIGNMENT_CAP).unwrap();
        assert_eq!(lvl, Fo2Level::NotFo2);
        assert!(wit.unwrap().identity.starts_with("(x1.x2)^w.x1"));
    }

    #[test]
    fn straubing_examples() {
        let (u, v) = straubing_terms(1).unwrap();
        assert_eq!(u.to_string(), "(x1.x2)^w");
        assert_eq!(v.to_string(), "(x2.x1)^w");
        let (u2, _) = straubing_terms(2).unwrap();
        assert_eq!(u2.to_string(), "(x1.x2.x3)^w.(x1.x2)^w.(x4.x1.x2)^w");
        for m in 1..=3 {
            assert!(check_straubing(&trivial(), m, DEFAULT_ASSIGNMENT_CAP).unwrap());
        }
        assert!(!check_straubing(&cyclic2(), 1, DEFAULT_ASSIGNMENT_CAP).unwrap());
    }

    #[test]
    fn omega_terms_evaluate_to_idempotents() {
        let m = syntactic("(a|b)*ab(a|b)*|b*").monoid;
        let t = omega(product(vec![var(1), var(2), var(1)]));
        for x in 0..m.size() {
            for y in 0..m.size() {
                let e = eval_term(&m, &t, &[x, y]).unwrap();
                assert_eq!(m.mul(e, e), e);
            }
        }
    }
}
