//! Centralizers of torus points at the Weyl-group level.
//!
//! For `x` in the adjoint torus, the centralizer `C_H(x)` is generated by the
//! connected part (torus plus root subgroups of `Φ_x`) and the stabilizer of
//! `x` in the complement `W̌`. The complement `B̌` is the part of that
//! stabilizer which also preserves the chosen basis `Δ_x`; it maps
//! isomorphically onto the component group.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result, Verdict};
use crate::exactnum::{Qz, QzVector};
use crate::roots::{phi_x, reflection_group, Root, RootSubsystem};
use crate::torus::{AdTorusElem, CenterElem, DlGroup};
use crate::weyl::{even_signed_perms, ExtElem, SignedPerm};

/// Restricts a search to one coset of the even subgroup.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParityFilter {
    Even,
    Odd,
    Any,
}

impl ParityFilter {
    pub fn from_parity(parity: u8) -> ParityFilter {
        if parity.is_multiple_of(2) {
            ParityFilter::Even
        } else {
            ParityFilter::Odd
        }
    }

    fn accepts(self, v: &SignedPerm) -> bool {
        match self {
            ParityFilter::Even => v.is_even(),
            ParityFilter::Odd => !v.is_even(),
            ParityFilter::Any => true,
        }
    }
}

struct Search<'a> {
    from: &'a [Qz],
    target: &'a [Qz],
    perm: Vec<usize>,
    flips: Vec<usize>,
    used: u16,
    filter: ParityFilter,
    bound: u128,
    out: &'a mut Vec<SignedPerm>,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Result<()> {
        let l = self.from.len();
        if i == l {
            let v = SignedPerm::new(&self.perm, &self.flips)?;
            if self.filter.accepts(&v) {
                self.out.push(v);
                if self.out.len() as u128 > self.bound {
                    return Err(Error::BoundExceeded {
                        what: "stabilizer search",
                        needed: self.out.len() as u128,
                        bound: self.bound,
                    });
                }
            }
            return Ok(());
        }
        let c = self.from[i];
        for j in 0..l {
            if self.used >> j & 1 == 1 {
                continue;
            }
            for negate in [false, true] {
                let val = if negate { -c } else { c };
                if val != self.target[j] {
                    continue;
                }
                self.used |= 1 << j;
                self.perm[i] = j;
                if negate {
                    self.flips.push(j);
                }
                let r = self.run(i + 1);
                if negate {
                    self.flips.pop();
                }
                self.used &= !(1 << j);
                r?;
            }
        }
        Ok(())
    }
}

/// All signed permutations `v` in the requested coset with `v(from) ≡ to`
/// modulo the half-shift, found by backtracking over coordinate values.
pub fn transporters(g: &DlGroup, from: &QzVector, to: &AdTorusElem, filter: ParityFilter) -> Result<Vec<SignedPerm>> {
    let l = g.rank();
    if from.len() != l || to.rank() != l {
        return Err(Error::RankMismatch(from.len(), l));
    }
    let mut out = Vec::new();
    let shifted = to.vector().shifted_by_half();
    for target in [to.vector(), &shifted] {
        let mut s = Search {
            from: from.coords(),
            target: target.coords(),
            perm: vec![0; l],
            flips: Vec::new(),
            used: 0,
            filter,
            bound: g.bound(),
            out: &mut out,
        };
        s.run(0)?;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `{w ∈ W̌ : w·x = x}` in the adjoint torus.
pub fn stabilizer(g: &DlGroup, x: &AdTorusElem) -> Result<Vec<SignedPerm>> {
    transporters(g, x.vector(), x, ParityFilter::Even)
}

/// Brute-force stabilizer by enumerating all of `W̌`; an oracle for small rank.
pub fn stabilizer_brute_force(g: &DlGroup, x: &AdTorusElem) -> Vec<SignedPerm> {
    let mut out: Vec<SignedPerm> = even_signed_perms(g.rank())
        .into_iter()
        .filter(|w| &AdTorusElem::from_vector(w.apply(x.vector())) == x)
        .collect();
    out.sort();
    out
}

/// Centralizer data of a torus point: `Φ_x`, `Δ_x`, the stabilizer, the
/// complement `B̌` and the values of `ω` on it.
#[derive(Clone, Debug)]
pub struct CentralizerData {
    pub x: AdTorusElem,
    pub phi: RootSubsystem,
    pub stab: Vec<SignedPerm>,
    pub reflections: Vec<SignedPerm>,
    pub b_check: Vec<SignedPerm>,
    pub a_order: usize,
    pub omega_table: Vec<(SignedPerm, CenterElem)>,
}

impl CentralizerData {
    pub fn weyl_order(&self) -> usize {
        self.reflections.len()
    }

    pub fn in_b_check(&self, w: &SignedPerm) -> bool {
        self.b_check.binary_search(w).is_ok()
    }

    /// The nontrivial element of `B̌` when `|B̌| = 2`.
    pub fn b_generator(&self) -> Option<SignedPerm> {
        (self.b_check.len() == 2).then(|| self.b_check[1])
    }

    pub fn omega_of(&self, w: &SignedPerm) -> Option<&CenterElem> {
        self.omega_table.iter().find(|(v, _)| v == w).map(|(_, c)| c)
    }

    /// The element of `B̌` in the same `W(Φ_x)`-coset as `w ∈ stab`.
    pub fn complement_part(&self, w: &SignedPerm) -> Option<SignedPerm> {
        self.b_check.iter().copied().find(|b| self.reflections.binary_search(&(b.inverse() * *w)).is_ok())
    }
}

fn is_abelian(xs: &[SignedPerm]) -> bool {
    xs.iter().all(|a| xs.iter().all(|b| *a * *b == *b * *a))
}

/// Computes the component group data of `x` and checks its invariants.
pub fn component_group(g: &DlGroup, x: &AdTorusElem) -> Result<CentralizerData> {
    let phi = phi_x(x);
    let stab = stabilizer(g, x)?;
    let reflections = reflection_group(&phi, g.bound())?;
    let b_check: Vec<SignedPerm> = stab.iter().copied().filter(|w| phi.stabilizes_basis(w)).collect();
    let omega_table = b_check.iter().map(|w| Ok((*w, g.omega(x, w)?))).collect::<Result<Vec<_>>>()?;
    let data = CentralizerData { x: x.clone(), a_order: b_check.len(), phi, stab, reflections, b_check, omega_table };
    check_invariants(&data)?;
    Ok(data)
}

fn check_invariants(d: &CentralizerData) -> Result<()> {
    let fail = |m: &str| Err(Error::Invariant(format!("{m} at x = {}", d.x)));
    if !d.reflections.iter().all(|r| d.stab.binary_search(r).is_ok()) {
        return fail("W(Φ_x) is not contained in the stabilizer");
    }
    if d.stab.len() != d.reflections.len() * d.b_check.len() {
        return fail("|stab| != |W(Φ_x)|·|B̌|");
    }
    if !is_abelian(&d.b_check) {
        return fail("B̌ is not abelian");
    }
    if ![1, 2, 4].contains(&d.a_order) {
        return fail("|B̌| is not 1, 2 or 4");
    }
    let values: HashSet<&CenterElem> = d.omega_table.iter().map(|(_, c)| c).collect();
    if values.len() != d.omega_table.len() {
        return fail("ω is not injective on B̌");
    }
    Ok(())
}

/// `B̌` recomputed for another basis of `Φ_x`.
pub fn complement_for_basis(d: &CentralizerData, basis: &[Root]) -> Vec<SignedPerm> {
    let set: HashSet<Root> = basis.iter().copied().collect();
    d.stab.iter().copied().filter(|w| basis.iter().all(|r| set.contains(&r.apply(w)))).collect()
}

/// Representatives of `B̌_E` in the coset `W̌ γ^parity F_p^a`.
#[derive(Clone, Debug, Serialize)]
pub struct CosetReps {
    pub a: u32,
    pub parity: u8,
    pub reps: Vec<ExtElem>,
}

/// All `(v, a)` of the given flip parity fixing `x` and stabilizing `Δ_x`.
pub fn coset_reps(g: &DlGroup, d: &CentralizerData, a: u32, parity: u8) -> Result<CosetReps> {
    let from = d.x.vector().mul_pow(g.p(), a);
    let reps = transporters(g, &from, &d.x, ParityFilter::from_parity(parity))?
        .into_iter()
        .filter(|v| d.phi.stabilizes_basis(v))
        .map(|v| ExtElem::new(v, a))
        .collect();
    Ok(CosetReps { a, parity: parity % 2, reps })
}

/// Coset representatives for `F_0`, `γ` and `F_0 γ`.
pub fn standard_cosets(g: &DlGroup, d: &CentralizerData, f0: &ExtElem) -> Result<Vec<CosetReps>> {
    let p0 = f0.gamma_parity();
    Ok(vec![coset_reps(g, d, f0.a, p0)?, coset_reps(g, d, 0, 1)?, coset_reps(g, d, f0.a, 1 - p0)?])
}

#[derive(Clone, Debug, Serialize)]
pub struct SemidirectReport {
    pub x: AdTorusElem,
    pub phi_type: String,
    pub stab_order: usize,
    pub weyl_order: usize,
    pub a_order: usize,
    pub checks: BTreeMap<&'static str, bool>,
    pub omega: BTreeMap<String, String>,
    pub coset_sizes: BTreeMap<String, usize>,
    pub verdict: Verdict,
}

impl SemidirectReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

/// Checks the semidirect factorization `Stab = W(Φ_x) ⋊ B̌` and the stability
/// of `B̌` under the extended complement for the Frobenius `f0`.
pub fn verify_semidirect(g: &DlGroup, x: &AdTorusElem, f0: &ExtElem) -> Result<SemidirectReport> {
    let d = component_group(g, x)?;
    let cosets = standard_cosets(g, &d, f0)?;
    Ok(semidirect_report(&d, &cosets))
}

pub fn semidirect_report(d: &CentralizerData, cosets: &[CosetReps]) -> SemidirectReport {
    let mut checks = BTreeMap::new();
    let in_w = |w: &SignedPerm| d.reflections.binary_search(w).is_ok();
    let gens: Vec<SignedPerm> = d.phi.basis.iter().map(Root::reflection).collect();
    checks.insert("reflections_in_stab", d.reflections.iter().all(|r| d.stab.binary_search(r).is_ok()));
    checks.insert("normal", d.stab.iter().all(|s| gens.iter().all(|r| in_w(&r.conjugate_by(s)))));
    checks.insert("trivial_intersection", d.b_check.iter().filter(|b| in_w(b)).count() == 1);
    checks.insert("order_product", d.stab.len() == d.reflections.len() * d.b_check.len());
    checks.insert("abelian", is_abelian(&d.b_check));
    checks.insert("a_order_divides_4", [1, 2, 4].contains(&d.a_order));
    let omega_vals: HashSet<&CenterElem> = d.omega_table.iter().map(|(_, c)| c).collect();
    checks.insert("omega_injective", omega_vals.len() == d.b_check.len());
    let all_reps: Vec<&ExtElem> = cosets.iter().flat_map(|c| c.reps.iter()).collect();
    checks
        .insert("complement_stable", all_reps.iter().all(|e| d.b_check.iter().all(|b| d.in_b_check(&e.conjugate(b)))));
    let f0_reps = cosets.first().map(|c| c.reps.as_slice()).unwrap_or(&[]);
    checks.insert(
        "commutators_in_complement",
        f0_reps.iter().all(|f| all_reps.iter().all(|s| d.in_b_check(&ExtElem::commutator(f, s).expect("same rank")))),
    );
    let verdict = Verdict::from_checks(checks.values());
    SemidirectReport {
        x: d.x.clone(),
        phi_type: d.phi.type_name(),
        stab_order: d.stab.len(),
        weyl_order: d.reflections.len(),
        a_order: d.a_order,
        checks,
        omega: d.omega_table.iter().map(|(w, c)| (w.to_string(), c.label.to_string())).collect(),
        coset_sizes: cosets.iter().map(|c| (format!("a={};parity={}", c.a, c.parity), c.reps.len())).collect(),
        verdict,
    }
}

/// A permutation of the four lifts `[u, u+h_0, u+z, u+z+h_0]`.
pub type FiberPerm = [u8; 4];

/// Translation by `h_0` on the fiber: `(0 1)(2 3)`.
pub const H0_TRANSLATION: FiberPerm = [1, 0, 3, 2];

pub fn compose_fiber(a: &FiberPerm, b: &FiberPerm) -> FiberPerm {
    [a[b[0] as usize], a[b[1] as usize], a[b[2] as usize], a[b[3] as usize]]
}

/// Centralizer of `(0 1)(2 3)` in `S_4`, by enumeration.
pub fn h0_centralizer() -> Vec<FiberPerm> {
    let mut out = Vec::new();
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let p = [a, b, c, d];
                    let distinct: HashSet<u8> = p.iter().copied().collect();
                    if distinct.len() == 4 && compose_fiber(&p, &H0_TRANSLATION) == compose_fiber(&H0_TRANSLATION, &p) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Permutation of `π^{-1}(x)` induced by an extended element fixing `x`.
pub fn fiber_action(g: &DlGroup, x: &AdTorusElem, sigma: &ExtElem) -> Result<FiberPerm> {
    if &g.act_ad(sigma, x) != x {
        return Err(Error::NotFixed);
    }
    let fiber = g.fiber(x);
    let mut perm = [0u8; 4];
    for (k, u) in fiber.iter().enumerate() {
        let img = g.act_sc(sigma, u);
        perm[k] =
            fiber.iter().position(|w| *w == img).ok_or_else(|| Error::Invariant("image is not a lift of x".into()))?
                as u8;
    }
    if compose_fiber(&perm, &H0_TRANSLATION) != compose_fiber(&H0_TRANSLATION, &perm) {
        return Err(Error::Invariant("fiber action does not commute with h0".into()));
    }
    Ok(perm)
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub x: AdTorusElem,
    pub reps: usize,
    pub checks: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
}

/// Fiber action of all coset representatives: commuting with `h_0`, landing
/// in the dihedral centralizer, and injectivity of `(fiber action, E-part)`.
pub fn fiber_report(g: &DlGroup, d: &CentralizerData, cosets: &[CosetReps]) -> Result<FiberReport> {
    let dihedral: HashSet<FiberPerm> = h0_centralizer().into_iter().collect();
    let mut commute = true;
    let mut in_dihedral = true;
    let mut seen: HashSet<(FiberPerm, u32, u8)> = HashSet::new();
    let mut injective = true;
    let b_reps = d.b_check.iter().map(|b| ExtElem::new(*b, 0));
    let mut count = 0;
    for e in cosets.iter().flat_map(|c| c.reps.iter().copied()).chain(b_reps) {
        let perm = match fiber_action(g, &d.x, &e) {
            Ok(p) => p,
            Err(Error::Invariant(_)) => {
                commute = false;
                continue;
            }
            Err(err) => return Err(err),
        };
        in_dihedral &= dihedral.contains(&perm);
        if !seen.insert((perm, e.a, e.gamma_parity())) {
            // the same element may appear in several cosets
            let dup = cosets.iter().flat_map(|c| c.reps.iter()).filter(|r| **r == e).count()
                + usize::from(e.a == 0 && d.in_b_check(&e.v));
            injective &= dup > 1;
        }
        count += 1;
    }
    let mut checks = BTreeMap::new();
    checks.insert("commutes_with_h0", commute);
    checks.insert("in_dihedral_centralizer", in_dihedral);
    checks.insert("injective_with_e_part", injective);
    let verdict = Verdict::from_checks(checks.values());
    Ok(FiberReport { x: d.x.clone(), reps: count, checks, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(s: &str) -> (DlGroup, AdTorusElem) {
        let g = DlGroup::new(4, 5).unwrap();
        let x = g.parse_ad(s).unwrap();
        (g, x)
    }

    #[test]
    fn stabilizer_examples() {
        let (g, x) = setup("0,0,0,0");
        assert_eq!(stabilizer(&g, &x).unwrap().len(), 192);
        let (g, x) = setup("0,0,0,1/2");
        assert_eq!(stabilizer(&g, &x).unwrap().len(), 48);
        let (g, x) = setup("0,1/4,1/2,3/4");
        let st = stabilizer(&g, &x).unwrap();
        assert_eq!(st.len(), 8);
        let dbl = "perm=[3,4,1,2];flips={}".parse::<SignedPerm>().unwrap();
        assert!(st.contains(&dbl));
        assert_eq!(st, stabilizer_brute_force(&g, &x));
    }

    #[test]
    fn component_group_examples() {
        let (g, x) = setup("0,0,0,0");
        let d = component_group(&g, &x).unwrap();
        assert_eq!(d.b_check, vec![SignedPerm::identity(4)]);
        let (g, x) = setup("0,0,0,1/2");
        assert_eq!(component_group(&g, &x).unwrap().a_order, 2);
        let (g, x) = setup("0,1/4,1/2,3/4");
        let d = component_group(&g, &x).unwrap();
        assert_eq!(d.a_order, 4);
        let expected: Vec<SignedPerm> = [
            "perm=[1,2,3,4];flips={}",
            "perm=[1,2,3,4];flips={1,3}",
            "perm=[3,4,1,2];flips={}",
            "perm=[3,4,1,2];flips={1,3}",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
        assert_eq!(d.b_check, expected);
        // ω maps B̌ onto Z(H_0)
        let labels: HashSet<_> = d.omega_table.iter().map(|(_, c)| c.label).collect();
        assert_eq!(labels.len(), 4);
    }

    #[test]
    fn omega_is_a_homomorphism_on_b_check() {
        let (g, x) = setup("0,1/4,1/2,3/4");
        let d = component_group(&g, &x).unwrap();
        for (a, wa) in &d.omega_table {
            for (b, wb) in &d.omega_table {
                let ab = g.omega(&x, &(*a * *b)).unwrap();
                assert_eq!(ab.u, wa.u.add(&wb.u));
            }
        }
    }

    #[test]
    fn coset_reps_examples() {
        let (g, x) = setup("0,0,0,0");
        let d = component_group(&g, &x).unwrap();
        assert_eq!(coset_reps(&g, &d, 1, 0).unwrap().reps, vec![ExtElem::frobenius(4, 1)]);
        assert_eq!(coset_reps(&g, &d, 0, 1).unwrap().reps, vec![ExtElem::gamma(4)]);
        let (g, x) = setup("0,1/4,1/2,3/4");
        let d = component_group(&g, &x).unwrap();
        let c = coset_reps(&g, &d, 1, 0).unwrap();
        assert!(c.reps.contains(&ExtElem::frobenius(4, 1)));
        assert_eq!(c.reps.len(), 4);
    }

    #[test]
    fn semidirect_reports() {
        let (g, x) = setup("0,0,0,0");
        let r = verify_semidirect(&g, &x, &ExtElem::frobenius(4, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
        let (g, x) = setup("0,1/4,1/2,3/4");
        let r = verify_semidirect(&g, &x, &ExtElem::frobenius(4, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.phi_type, "A1");
        assert_eq!(r.stab_order, 8);
    }

    #[test]
    fn b_check_independent_of_basis_up_to_conjugacy() {
        let (g, x) = setup("0,0,0,1/2");
        let d = component_group(&g, &x).unwrap();
        let other = crate::roots::basis_for_functional(&d.phi.roots, &[1, 3, -7, 100]).unwrap();
        assert_ne!(other, d.phi.basis);
        let b2: std::collections::BTreeSet<SignedPerm> = complement_for_basis(&d, &other).into_iter().collect();
        assert_eq!(b2.len(), d.b_check.len());
        let found = d
            .stab
            .iter()
            .any(|c| d.b_check.iter().map(|b| b.conjugate_by(c)).collect::<std::collections::BTreeSet<_>>() == b2);
        assert!(found);
    }

    #[test]
    fn fiber_action_examples() {
        let (g, x) = setup("0,0,0,1/2");
        assert_eq!(fiber_action(&g, &x, &ExtElem::identity(4)).unwrap(), [0, 1, 2, 3]);
        let dihedral = h0_centralizer();
        assert_eq!(dihedral.len(), 8);
        for w in stabilizer(&g, &x).unwrap() {
            let p = fiber_action(&g, &x, &ExtElem::new(w, 0)).unwrap();
            assert!(dihedral.contains(&p));
        }
        let y = g.parse_ad("0,1/4,1/2,3/4").unwrap();
        assert_eq!(fiber_action(&g, &y, &ExtElem::new(SignedPerm::transposition(4, 0, 1), 0)), Err(Error::NotFixed));
    }

    #[test]
    fn fiber_action_is_multiplicative() {
        let (g, x) = setup("0,1/4,1/2,3/4");
        let d = component_group(&g, &x).unwrap();
        let cosets = standard_cosets(&g, &d, &ExtElem::frobenius(4, 1)).unwrap();
        let elems: Vec<ExtElem> = cosets.iter().flat_map(|c| c.reps.clone()).collect();
        for a in &elems {
            for b in &elems {
                let ab = a.compose(b).unwrap();
                let lhs = fiber_action(&g, &x, &ab).unwrap();
                let rhs = compose_fiber(&fiber_action(&g, &x, a).unwrap(), &fiber_action(&g, &x, b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let r = fiber_report(&g, &d, &cosets).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}
