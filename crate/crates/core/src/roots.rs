//! The root system of type `D_l`, the subsystems `Φ_x` of roots vanishing on
//! a torus point, deterministic bases, and Weyl-group orders.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::Qz;
use crate::torus::AdTorusElem;
use crate::weyl::SignedPerm;

/// `si·e_i + sj·e_j` with `i < j` (0-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Root {
    i: u8,
    j: u8,
    si: i8,
    sj: i8,
    rank: u8,
}

impl Root {
    pub fn new(rank: usize, i: usize, si: i64, j: usize, sj: i64) -> Root {
        assert!(i != j && i < rank && j < rank);
        assert!(si.abs() == 1 && sj.abs() == 1);
        let (i, si, j, sj) = if i < j { (i, si, j, sj) } else { (j, sj, i, si) };
        Root { i: i as u8, j: j as u8, si: si as i8, sj: sj as i8, rank: rank as u8 }
    }

    /// Parses an integer vector with exactly two entries `±1`.
    pub fn from_vec(v: &[i64]) -> Option<Root> {
        let nz: Vec<usize> = (0..v.len()).filter(|&k| v[k] != 0).collect();
        match nz.as_slice() {
            &[i, j] if v[i].abs() == 1 && v[j].abs() == 1 => Some(Root::new(v.len(), i, v[i], j, v[j])),
            _ => None,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn to_vec(&self) -> Vec<i64> {
        let mut v = vec![0; self.rank()];
        v[self.i as usize] = self.si as i64;
        v[self.j as usize] = self.sj as i64;
        v
    }

    pub fn neg(&self) -> Root {
        Root { si: -self.si, sj: -self.sj, ..*self }
    }

    /// Positive for the lexicographic order: first nonzero coordinate positive.
    pub fn is_positive(&self) -> bool {
        self.si > 0
    }

    pub fn signs(&self) -> (i64, i64) {
        (self.si as i64, self.sj as i64)
    }

    pub fn support(&self) -> (usize, usize) {
        (self.i as usize, self.j as usize)
    }

    pub fn dot(&self, other: &Root) -> i64 {
        self.to_vec().iter().zip(other.to_vec()).map(|(a, b)| a * b).sum()
    }

    /// `α(t) = si·t_i + sj·t_j`, well defined modulo the half-shift.
    pub fn eval(&self, x: &AdTorusElem) -> Qz {
        let t = x.vector();
        let a = if self.si > 0 { t[self.i as usize] } else { -t[self.i as usize] };
        let b = if self.sj > 0 { t[self.j as usize] } else { -t[self.j as usize] };
        a + b
    }

    pub fn apply(&self, w: &SignedPerm) -> Root {
        Root::from_vec(&w.apply_int(&self.to_vec())).expect("signed permutations permute roots")
    }

    /// The reflection `s_α` as a signed permutation.
    pub fn reflection(&self) -> SignedPerm {
        let (i, j) = self.support();
        let t = SignedPerm::transposition(self.rank(), i, j);
        if self.si == self.sj {
            SignedPerm::sign_change(self.rank(), &[i, j]) * t
        } else {
            t
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: i8| if x > 0 { '+' } else { '-' };
        write!(f, "{}e{}{}e{}", s(self.si), self.i + 1, s(self.sj), self.j + 1)
    }
}

impl Serialize for Root {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All `2l(l−1)` roots `±e_i ± e_j` of `D_l`, sorted.
pub fn all_roots(rank: usize) -> Vec<Root> {
    let mut out = Vec::with_capacity(2 * rank * (rank - 1));
    for i in 0..rank {
        for j in i + 1..rank {
            for si in [-1, 1] {
                for sj in [-1, 1] {
                    out.push(Root::new(rank, i, si, j, sj));
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum ComponentKind {
    A,
    D,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub rank: usize,
    /// 0-based coordinates touched by the component's roots.
    pub support: Vec<usize>,
}

impl Component {
    pub fn name(&self) -> String {
        format!("{:?}{}", self.kind, self.rank)
    }

    pub fn root_count(&self) -> usize {
        match self.kind {
            ComponentKind::A => self.rank * (self.rank + 1),
            ComponentKind::D => 2 * self.rank * (self.rank - 1),
        }
    }

    pub fn weyl_order(&self) -> u64 {
        let fact = |n: usize| (1..=n as u64).product::<u64>();
        match self.kind {
            ComponentKind::A => fact(self.rank + 1),
            ComponentKind::D => (1u64 << (self.rank - 1)) * fact(self.rank),
        }
    }
}

/// A closed subsystem of `Φ(D_l)` with a chosen basis and its decomposition
/// into irreducible components.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RootSubsystem {
    pub rank: usize,
    pub roots: BTreeSet<Root>,
    pub basis: Vec<Root>,
    pub components: Vec<Component>,
}

impl RootSubsystem {
    pub fn from_roots(rank: usize, roots: BTreeSet<Root>) -> Result<RootSubsystem> {
        let basis = choose_basis(&roots)?;
        let components = classify(rank, &roots, &basis)?;
        Ok(RootSubsystem { rank, roots, basis, components })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Type string such as `D3`, `A1^3` or `A1^2+A3`; `trivial` when empty.
    pub fn type_name(&self) -> String {
        if self.components.is_empty() {
            return "trivial".into();
        }
        let mut names: Vec<String> = self.components.iter().map(Component::name).collect();
        names.sort();
        let mut parts: Vec<String> = Vec::new();
        let mut k = 0;
        while k < names.len() {
            let n = names[k..].iter().take_while(|x| **x == names[k]).count();
            parts.push(if n == 1 { names[k].clone() } else { format!("{}^{}", names[k], n) });
            k += n;
        }
        parts.join("+")
    }

    pub fn weyl_order(&self) -> u64 {
        weyl_order(self)
    }

    /// `w(Δ) = Δ` as a set.
    pub fn stabilizes_basis(&self, w: &SignedPerm) -> bool {
        let set: HashSet<Root> = self.basis.iter().copied().collect();
        self.basis.iter().all(|r| set.contains(&r.apply(w)))
    }

    pub fn is_permuted_by(&self, w: &SignedPerm) -> bool {
        self.roots.iter().all(|r| self.roots.contains(&r.apply(w)))
    }
}

/// `Φ_x = {α ∈ Φ : α(x) = 0}`.
pub fn phi_x(x: &AdTorusElem) -> RootSubsystem {
    let l = x.rank();
    let roots: BTreeSet<Root> = all_roots(l).into_iter().filter(|r| r.eval(x).is_zero()).collect();
    RootSubsystem::from_roots(l, roots).expect("root subsystems of a torus point are closed and classifiable")
}

fn root_sum(a: &Root, b: &Root) -> Option<Root> {
    let s: Vec<i64> = a.to_vec().iter().zip(b.to_vec()).map(|(x, y)| x + y).collect();
    Root::from_vec(&s)
}

fn indecomposables(positive: &[Root]) -> Vec<Root> {
    let set: HashSet<Root> = positive.iter().copied().collect();
    let mut sums: HashSet<Root> = HashSet::new();
    for (k, a) in positive.iter().enumerate() {
        for b in &positive[k + 1..] {
            if let Some(s) = root_sum(a, b) {
                if set.contains(&s) {
                    sums.insert(s);
                }
            }
        }
    }
    let mut basis: Vec<Root> = positive.iter().copied().filter(|r| !sums.contains(r)).collect();
    basis.sort();
    basis
}

fn check_negation_closed(s: &BTreeSet<Root>) -> Result<()> {
    if s.iter().all(|r| s.contains(&r.neg())) {
        Ok(())
    } else {
        Err(Error::NotClosedUnderNegation)
    }
}

/// Basis of the positive system cut out by the lexicographic order.
pub fn choose_basis(s: &BTreeSet<Root>) -> Result<Vec<Root>> {
    check_negation_closed(s)?;
    let positive: Vec<Root> = s.iter().copied().filter(Root::is_positive).collect();
    Ok(indecomposables(&positive))
}

/// Basis of the positive system `{α : ⟨ρ, α⟩ > 0}` for a regular functional `ρ`.
pub fn basis_for_functional(s: &BTreeSet<Root>, rho: &[i64]) -> Result<Vec<Root>> {
    check_negation_closed(s)?;
    let pair = |r: &Root| -> i64 { r.to_vec().iter().zip(rho).map(|(a, b)| a * b).sum() };
    if s.iter().any(|r| pair(r) == 0) {
        return Err(Error::Config("functional is not regular for the subsystem".into()));
    }
    let positive: Vec<Root> = s.iter().copied().filter(|r| pair(r) > 0).collect();
    Ok(indecomposables(&positive))
}

fn classify(rank: usize, roots: &BTreeSet<Root>, basis: &[Root]) -> Result<Vec<Component>> {
    let n = basis.len();
    let mut comp_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if comp_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp_of[start] = id;
        let mut k = 0;
        while k < members.len() {
            let a = members[k];
            for b in 0..n {
                if comp_of[b] == usize::MAX && basis[a].dot(&basis[b]) != 0 {
                    comp_of[b] = id;
                    members.push(b);
                }
            }
            k += 1;
        }
        let r = members.len();
        let degree = |a: usize| members.iter().filter(|&&b| b != a && basis[a].dot(&basis[b]) != 0).count();
        let edges: usize = members.iter().map(|&a| degree(a)).sum::<usize>() / 2;
        let max_deg = members.iter().map(|&a| degree(a)).max().unwrap_or(0);
        let mut support: Vec<usize> = members
            .iter()
            .flat_map(|&a| {
                let (i, j) = basis[a].support();
                [i, j]
            })
            .collect();
        support.sort();
        support.dedup();
        if edges + 1 != r || max_deg > 3 {
            return Err(Error::UnclassifiableComponent(r));
        }
        let kind = if max_deg == 3 {
            let branch = members.iter().filter(|&&a| degree(a) == 3).count();
            if branch != 1 || r < 4 {
                return Err(Error::UnclassifiableComponent(r));
            }
            ComponentKind::D
        } else if r == 3 && support.len() == 3 {
            ComponentKind::D
        } else {
            ComponentKind::A
        };
        components.push(Component { kind, rank: r, support });
    }
    let total: usize = components.iter().map(Component::root_count).sum();
    if total != roots.len() {
        return Err(Error::UnclassifiableComponent(n));
    }
    let _ = rank;
    Ok(components)
}

/// `|W(S)|` from the component types.
pub fn weyl_order(s: &RootSubsystem) -> u64 {
    s.components.iter().map(Component::weyl_order).product()
}

/// The reflection group `W(S)` as an explicit set of signed permutations,
/// generated by the reflections in the basis of `S`.
pub fn reflection_group(s: &RootSubsystem, bound: u128) -> Result<Vec<SignedPerm>> {
    let order = weyl_order(s) as u128;
    if order > bound {
        return Err(Error::BoundExceeded { what: "reflection group", needed: order, bound });
    }
    let gens: Vec<SignedPerm> = s.basis.iter().map(Root::reflection).collect();
    let id = SignedPerm::identity(s.rank);
    let mut seen: HashSet<SignedPerm> = HashSet::from([id]);
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for r in &gens {
            let h = *r * g;
            if seen.insert(h) {
                frontier.push(h);
            }
        }
    }
    let mut out: Vec<SignedPerm> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::DlGroup;

    fn x(s: &str) -> AdTorusElem {
        DlGroup::shared(s.split(',').count(), 5).unwrap().parse_ad(s).unwrap()
    }

    fn names(rs: &[Root]) -> Vec<String> {
        rs.iter().map(Root::to_string).collect()
    }

    #[test]
    fn root_count() {
        for l in 4..=8 {
            assert_eq!(all_roots(l).len(), 2 * l * (l - 1));
        }
    }

    #[test]
    fn phi_x_examples() {
        let full = phi_x(&x("0,0,0,0"));
        assert_eq!(full.len(), 24);
        assert_eq!(full.type_name(), "D4");
        let d3 = phi_x(&x("0,0,0,1/2"));
        assert_eq!(d3.len(), 12);
        assert_eq!(d3.type_name(), "D3");
        assert_eq!(d3.components[0].support, vec![0, 1, 2]);
        let a1 = phi_x(&x("0,1/4,1/2,3/4"));
        assert_eq!(names(&a1.roots.iter().copied().collect::<Vec<_>>()), ["-e2-e4", "+e2+e4"]);
        assert_eq!(a1.type_name(), "A1");
    }

    #[test]
    fn basis_examples() {
        assert_eq!(names(&phi_x(&x("0,0,0,0")).basis), ["+e1-e2", "+e2-e3", "+e3-e4", "+e3+e4"]);
        assert_eq!(names(&phi_x(&x("0,1/4,1/2,3/4")).basis), ["+e2+e4"]);
        let d3 = phi_x(&x("0,0,0,1/2"));
        assert_eq!(d3.basis.len(), 3);
        // every positive root is a nonnegative integer combination of the basis
        let b: Vec<Vec<i64>> = d3.basis.iter().map(Root::to_vec).collect();
        for r in d3.roots.iter().filter(|r| r.is_positive()) {
            let target = r.to_vec();
            let found = (0..4i64).any(|c0| {
                (0..4i64).any(|c1| {
                    (0..4i64).any(|c2| (0..4).all(|k| c0 * b[0][k] + c1 * b[1][k] + c2 * b[2][k] == target[k]))
                })
            });
            assert!(found, "{r} is not a nonnegative combination");
        }
    }

    #[test]
    fn choose_basis_rejects_unclosed_sets() {
        let s: BTreeSet<Root> = [Root::new(4, 0, 1, 1, -1)].into_iter().collect();
        assert_eq!(choose_basis(&s), Err(Error::NotClosedUnderNegation));
    }

    #[test]
    fn choose_basis_is_order_independent() {
        let s = phi_x(&x("0,0,0,1/2")).roots;
        let mut shuffled: Vec<Root> = s.iter().copied().collect();
        shuffled.reverse();
        let again: BTreeSet<Root> = shuffled.into_iter().collect();
        assert_eq!(choose_basis(&again).unwrap(), choose_basis(&s).unwrap());
        let basis = choose_basis(&s).unwrap();
        let rebuilt: BTreeSet<Root> = basis.iter().flat_map(|r| [*r, r.neg()]).collect();
        assert_eq!(choose_basis(&rebuilt).unwrap().len(), basis.len());
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order(&phi_x(&x("0,0,0,0"))), 192);
        assert_eq!(weyl_order(&phi_x(&x("0,0,0,1/2"))), 24);
        assert_eq!(weyl_order(&phi_x(&x("0,1/4,1/2,3/4"))), 2);
        assert_eq!(weyl_order(&phi_x(&x("1/3,1/8,1/7,1/11"))), 1);
        assert_eq!(phi_x(&x("0,0,1/2,1/2")).type_name(), "A1^4");
    }

    #[test]
    fn reflection_group_examples() {
        let empty = phi_x(&x("1/3,1/8,1/7,1/11"));
        assert_eq!(reflection_group(&empty, 10).unwrap(), vec![SignedPerm::identity(4)]);
        let a1 = phi_x(&x("0,1/4,1/2,3/4"));
        let g = reflection_group(&a1, 10).unwrap();
        let s = "perm=[1,4,3,2];flips={2,4}".parse::<SignedPerm>().unwrap();
        assert_eq!(g, vec![SignedPerm::identity(4), s]);
        let d3 = reflection_group(&phi_x(&x("0,0,0,1/2")), 1000).unwrap();
        assert_eq!(d3.len(), 24);
        assert!(d3.iter().all(SignedPerm::is_even));
        let full = phi_x(&x("0,0,0,0"));
        assert_eq!(reflection_group(&full, 1000).unwrap().len(), 192);
        assert!(matches!(reflection_group(&full, 100), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn phi_x_well_defined_on_half_shift() {
        let t: crate::exactnum::QzVector = "1/4,3/4,1/8,1/2".parse().unwrap();
        let a = phi_x(&AdTorusElem::from_vector(t.clone()));
        let b = phi_x(&AdTorusElem::from_vector(t.shifted_by_half()));
        assert_eq!(a, b);
        for r in all_roots(4) {
            assert_eq!(r.eval(&AdTorusElem::from_vector(t.clone())), {
                let v = r.to_vec();
                (0..4).fold(Qz::ZERO, |acc, k| acc + t[k].mul_int(v[k] as i128))
            });
        }
    }
}
