//! Geometric classes of torus points, their Frobenius/γ stability, and the
//! rational classes inside a stable geometric class, keyed by `Θ`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::centralizer::{component_group, coset_reps, stabilizer, transporters, ParityFilter};
use crate::error::{Error, Result, Verdict};
use crate::exactnum::{Qz, QzVector};
use crate::roots::phi_x;
use crate::torus::{AdTorusElem, CenterElem, CenterLabel, DlGroup, ScTorusElem, ThetaValue};
use crate::weyl::{even_signed_perms, ExtElem, SignedPerm};

/// `|W̌| = 2^{l-1} l!`.
pub fn weyl_complement_order(l: usize) -> u64 {
    (1..=l as u64).product::<u64>() << (l - 1)
}

/// Least element of the `W̌`-orbit of `t` in `[0, 1)^l`, ignoring the half-shift.
///
/// Each coordinate can be replaced by `min(c, 1 - c)` with an even number of
/// sign changes. If no coordinate is self-negative and the number of
/// coordinates above `1/2` is odd, one sign change is left over and goes on
/// the largest absolute value.
pub fn orbit_normal_form(t: &QzVector) -> QzVector {
    let mut abs: Vec<Qz> = t.iter().map(|c| std::cmp::min(*c, -*c)).collect();
    abs.sort();
    let free = t.iter().any(|c| *c == -*c);
    let big = t.iter().filter(|c| **c > -**c).count();
    if !free && big % 2 == 1 {
        let last = abs.len() - 1;
        abs[last] = -abs[last];
    }
    QzVector::new(abs)
}

/// Canonical representative of the geometric class of `t` in the adjoint torus.
pub fn class_rep(t: &QzVector) -> QzVector {
    std::cmp::min(orbit_normal_form(t), orbit_normal_form(&t.shifted_by_half()))
}

/// The same representative by enumerating the whole orbit.
pub fn class_rep_brute_force(t: &QzVector) -> QzVector {
    let shifted = t.shifted_by_half();
    even_signed_perms(t.len()).iter().flat_map(|w| [w.apply(t), w.apply(&shifted)]).min().expect("W̌ is nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeomClass {
    pub rep: AdTorusElem,
    /// Number of adjoint torus points in the class.
    pub orbit_size: u64,
    pub stab_order: usize,
    pub a_order: usize,
    pub phi_type: String,
}

pub fn geom_class(g: &DlGroup, x: &AdTorusElem) -> Result<GeomClass> {
    let rep = AdTorusElem::from_vector(class_rep(x.vector()));
    let stab = stabilizer(g, &rep)?;
    let phi = phi_x(&rep);
    let w = phi.weyl_order() as usize;
    if stab.len() % w != 0 {
        return Err(Error::Invariant(format!("|W(Φ_x)| does not divide |stab| at {rep}")));
    }
    Ok(GeomClass {
        orbit_size: weyl_complement_order(g.rank()) / stab.len() as u64,
        stab_order: stab.len(),
        a_order: stab.len() / w,
        phi_type: phi.type_name(),
        rep,
    })
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn multisets(l: usize, top: u64) -> Vec<Vec<u64>> {
    fn rec(l: usize, lo: u64, top: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for k in lo..=top {
            cur.push(k);
            rec(l, k, top, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, 0, top, &mut Vec::with_capacity(l), &mut out);
    out
}

/// One vector per `W̌`-orbit with the given sorted absolute values `k/n`.
fn orbit_candidates(m: &[u64], n: u64) -> Vec<QzVector> {
    let base = QzVector::new(m.iter().map(|&k| Qz::from_ratio(k as i128, n as i128)).collect());
    if m.iter().any(|&k| k == 0 || 2 * k == n) {
        return vec![base];
    }
    let mut odd = base.coords().to_vec();
    let last = odd.len() - 1;
    odd[last] = -odd[last];
    vec![base, QzVector::new(odd)]
}

/// All geometric classes meeting `((1/n)ℤ/ℤ)^l`, sorted by representative.
pub fn enumerate_geom_classes(g: &DlGroup, n: u64) -> Result<Vec<GeomClass>> {
    if n == 0 {
        return Err(Error::Config("denominator must be positive".into()));
    }
    if n.is_multiple_of(g.p()) {
        return Err(Error::DenominatorDivisibleByP { den: n, p: g.p() });
    }
    let l = g.rank();
    let needed = binomial(n / 2 + l as u64, l as u64);
    if needed > g.bound() {
        return Err(Error::BoundExceeded { what: "class census", needed, bound: g.bound() });
    }
    let reps: BTreeSet<QzVector> = multisets(l, n / 2)
        .par_iter()
        .flat_map_iter(|m| orbit_candidates(m, n).into_iter().map(|t| class_rep(&t)))
        .collect();
    let reps: Vec<QzVector> = reps.into_iter().collect();
    reps.par_iter().map(|r| geom_class(g, &AdTorusElem::from_vector(r.clone()))).collect()
}

/// An even `v` with `v(σ(x)) = x`, if one exists.
pub fn corrector(g: &DlGroup, x: &AdTorusElem, sigma: &ExtElem) -> Result<Option<SignedPerm>> {
    let sx = g.act_ad(sigma, x);
    Ok(transporters(g, sx.vector(), x, ParityFilter::Even)?.into_iter().next())
}

/// Whether the geometric class of `x` is stable under `σ`.
pub fn class_stable(g: &DlGroup, x: &AdTorusElem, sigma: &ExtElem) -> Result<bool> {
    Ok(corrector(g, x, sigma)?.is_some())
}

/// The twisted Frobenius `(w∘v_F, a_F)`.
pub fn twisted(f: &ExtElem, w: &SignedPerm) -> ExtElem {
    ExtElem::new(*w * f.v, f.a)
}

fn fixes_theta(g: &DlGroup, sigma: &ExtElem, theta: &ThetaValue) -> bool {
    theta.coset.contains(&g.act_center(sigma, &theta.rep))
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalEntry {
    pub theta: ThetaValue,
    /// Least twist `w` with `Θ_{wF}(x)` equal to `theta`.
    pub twist: SignedPerm,
    pub twists: usize,
    pub gamma_stable: bool,
    pub f0_stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalClassTable {
    pub geom: GeomClass,
    pub x: AdTorusElem,
    pub frobenius: ExtElem,
    pub base: ExtElem,
    pub entries: Vec<RationalEntry>,
    /// Orbits of twisted conjugation on the twists, computed without `Θ`.
    pub conjugacy_count: usize,
    /// `|A / [A, F]|` from the action of `F` on `B̌`.
    pub independent_count: usize,
    /// Whether `Θ` hits every coset of `[Z(H_0), F]`. Reported only.
    pub surjective: bool,
    pub checks: BTreeMap<&'static str, bool>,
}

impl RationalClassTable {
    pub fn consistent(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    pub fn theta_values(&self) -> BTreeSet<CenterElem> {
        self.entries.iter().flat_map(|e| e.theta.coset.iter().cloned()).collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Rational classes in the geometric class of `x` for the Frobenius `f`.
///
/// `base` is the Frobenius whose stability is reported alongside `γ`.
pub fn rational_classes(g: &DlGroup, x: &AdTorusElem, f: &ExtElem, base: &ExtElem) -> Result<RationalClassTable> {
    if f.a == 0 {
        return Err(Error::FrobeniusPowerZero);
    }
    let fx = g.act_ad(f, x);
    let twists = transporters(g, fx.vector(), x, ParityFilter::Even)?;
    if twists.is_empty() {
        return Err(Error::NotStable(f.to_string()));
    }
    let data = component_group(g, x)?;
    let gamma = ExtElem::gamma(g.rank());
    let thetas: Vec<ThetaValue> = twists.iter().map(|w| g.theta(x, &twisted(f, w))).collect::<Result<_>>()?;

    let mut grouped: BTreeMap<CenterElem, (usize, usize)> = BTreeMap::new();
    for (i, t) in thetas.iter().enumerate() {
        grouped.entry(t.rep.clone()).or_insert((i, 0)).1 += 1;
    }
    let entries: Vec<RationalEntry> = grouped
        .values()
        .map(|&(i, count)| RationalEntry {
            theta: thetas[i].clone(),
            twist: twists[i],
            twists: count,
            gamma_stable: fixes_theta(g, &gamma, &thetas[i]),
            f0_stable: fixes_theta(g, base, &thetas[i]),
        })
        .collect();

    let index = |w: &SignedPerm| -> Result<usize> {
        twists
            .binary_search(w)
            .map_err(|_| Error::Invariant(format!("{w} does not twist F into a Frobenius fixing {x}")))
    };

    // twists related by W(Φ_x) on the left or by twisted conjugation in the stabilizer
    let reflections: Vec<SignedPerm> = data.phi.basis.iter().map(|r| r.reflection()).collect();
    let conj_gens: Vec<SignedPerm> = reflections.iter().chain(data.b_check.iter()).copied().collect();
    let vf_inv = f.v.inverse();
    let mut uf = UnionFind((0..twists.len()).collect());
    for (i, w) in twists.iter().enumerate() {
        for r in &reflections {
            uf.union(i, index(&(*r * *w))?);
        }
        for c in &conj_gens {
            uf.union(i, index(&(*c * *w * f.v * c.inverse() * vf_inv))?);
        }
    }
    let mut orbit_theta: BTreeMap<usize, BTreeSet<&CenterElem>> = BTreeMap::new();
    for (i, t) in thetas.iter().enumerate() {
        orbit_theta.entry(uf.find(i)).or_default().insert(&t.rep);
    }
    let conjugacy_count = orbit_theta.len();

    let f_rep = coset_reps(g, &data, f.a, f.gamma_parity())?
        .reps
        .first()
        .copied()
        .ok_or_else(|| Error::Invariant(format!("no coset representative for {f} at {x}")))?;
    let commutators: BTreeSet<SignedPerm> = data.b_check.iter().map(|b| *b * f_rep.conjugate(b).inverse()).collect();
    let independent_count = data.a_order / commutators.len();

    let mut checks = BTreeMap::new();
    checks.insert("theta_constant_on_classes", orbit_theta.values().all(|s| s.len() == 1));
    checks.insert("theta_injective", conjugacy_count == entries.len());
    checks.insert("count_matches_component_group", independent_count == entries.len());
    for (name, sigma) in [("gamma_equivariant", gamma), ("base_equivariant", *base)] {
        if let Some(ok) = equivariance(g, x, f, &sigma, &twists, &thetas)? {
            checks.insert(name, ok);
        }
    }
    let modulus = g.center_commutator(f);
    Ok(RationalClassTable {
        geom: geom_class(g, x)?,
        x: x.clone(),
        frobenius: *f,
        base: *base,
        surjective: entries.len() * modulus.len() == g.center().len(),
        entries,
        conjugacy_count,
        independent_count,
        checks,
    })
}

/// Transports every twist along `σ` and compares `Θ` of the image with the
/// `σ`-image of `Θ`. `None` when `σ` does not stabilize the class.
fn equivariance(
    g: &DlGroup,
    x: &AdTorusElem,
    f: &ExtElem,
    sigma: &ExtElem,
    twists: &[SignedPerm],
    thetas: &[ThetaValue],
) -> Result<Option<bool>> {
    let Some(u) = corrector(g, x, sigma)? else {
        return Ok(None);
    };
    let (s, s_inv, vf_inv, u_inv) = (sigma.v, sigma.v.inverse(), f.v.inverse(), u.inverse());
    for (w, theta) in twists.iter().zip(thetas) {
        let w2 = u * s * *w * f.v * s_inv * u_inv * vf_inv;
        if twists.binary_search(&w2).is_err() {
            return Ok(Some(false));
        }
        let t2 = g.theta(x, &twisted(f, &w2))?;
        if !t2.coset.contains(&g.act_center(sigma, &theta.rep)) {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremBReport {
    pub x: AdTorusElem,
    pub frobenius: ExtElem,
    pub table: RationalClassTable,
    pub witness_twist: Option<SignedPerm>,
    pub witness_lift: Option<ScTorusElem>,
    pub checks: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
}

/// For `|A| = 4` and a class stable under `F_0` and `γ`: `Θ_{F_0}` is a
/// bijection, and the class with trivial `Θ` is `γ`-stable and contains the
/// image of an `F_0`-fixed point of `T_0`.
pub fn theorem_b_check(g: &DlGroup, x: &AdTorusElem, f0: &ExtElem) -> Result<TheoremBReport> {
    let data = component_group(g, x)?;
    if data.a_order != 4 {
        return Err(Error::HypothesisViolated(format!("|A| = {}, expected 4", data.a_order)));
    }
    if !class_stable(g, x, f0)? {
        return Err(Error::NotStable(f0.to_string()));
    }
    if !class_stable(g, x, &ExtElem::gamma(g.rank()))? {
        return Err(Error::NotStable("gamma".into()));
    }
    let table = rational_classes(g, x, f0, f0)?;
    let target = g.center().len() / g.center_commutator(f0).len();
    let witness = table.entries.iter().find(|e| e.theta.is_trivial());
    let witness_lift = witness.and_then(|e| {
        let ff = twisted(f0, &e.twist);
        g.fiber(x).into_iter().find(|u| g.act_sc(&ff, u) == *u)
    });
    let mut checks = BTreeMap::new();
    checks.insert("table_consistent", table.consistent());
    checks.insert("theta_bijective", table.entries.len() == target);
    checks.insert("trivial_theta_class_exists", witness.is_some());
    checks.insert("trivial_theta_class_gamma_stable", witness.is_some_and(|e| e.gamma_stable));
    checks.insert("fixed_lift_exists", witness_lift.is_some());
    Ok(TheoremBReport {
        x: x.clone(),
        frobenius: *f0,
        witness_twist: witness.map(|e| e.twist),
        witness_lift,
        verdict: Verdict::from_checks(checks.values()),
        checks,
        table,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor32Report {
    pub x: AdTorusElem,
    pub f0: ExtElem,
    pub k: u32,
    pub a_order: usize,
    pub theta_image: Vec<CenterElem>,
    pub commutator: Option<SignedPerm>,
    pub checks: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
}

/// Checks for a class stable under `F_0` and `γ` none of whose
/// `F_0`-rational classes is `γ`-stable, with `F = F_0^{2k}`.
pub fn cor32_check(g: &DlGroup, x: &AdTorusElem, f0: &ExtElem, k: u32) -> Result<Cor32Report> {
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    if f0.a == 0 {
        return Err(Error::FrobeniusPowerZero);
    }
    let gamma = ExtElem::gamma(g.rank());
    if !class_stable(g, x, f0)? {
        return Err(Error::HypothesisViolated(format!("class is not stable under {f0}")));
    }
    if !class_stable(g, x, &gamma)? {
        return Err(Error::HypothesisViolated("class is not gamma-stable".into()));
    }
    let table0 = rational_classes(g, x, f0, f0)?;
    if table0.entries.iter().any(|e| e.gamma_stable) {
        return Err(Error::HypothesisViolated("some rational class is gamma-stable".into()));
    }
    let data = component_group(g, x)?;
    let mut checks = BTreeMap::new();
    checks.insert("f0_trivial_on_center", g.center().iter().all(|c| g.act_center(f0, c) == *c));
    checks.insert("component_group_order_two", data.a_order == 2);
    let omega_labels: BTreeSet<CenterLabel> = data.omega_table.iter().map(|(_, c)| c.label).collect();
    checks.insert("omega_image_is_h0", omega_labels == BTreeSet::from([CenterLabel::One, CenterLabel::H0]));
    let theta_image: Vec<CenterElem> = table0.theta_values().into_iter().collect();
    let outside: Vec<CenterElem> = g.center().iter().filter(|c| !c.in_h0_subgroup()).cloned().collect();
    checks.insert("theta_image_is_center_minus_h0", theta_image == outside);

    let table = rational_classes(g, x, &f0.power(2 * k), f0)?;
    checks.insert("tables_consistent", table0.consistent() && table.consistent());
    checks.insert("power_classes_fixed_by_gamma_and_f0", table.entries.iter().all(|e| e.gamma_stable && e.f0_stable));

    let cf = coset_reps(g, &data, f0.a, f0.gamma_parity())?.reps;
    let cg = coset_reps(g, &data, 0, 1)?.reps;
    let lift = g.lift(x);
    checks.insert(
        "twist_commutators_outside_h0",
        !cf.is_empty()
            && cf.iter().all(|f| g.center_elem(&g.act_sc(f, &lift).sub(&lift)).is_some_and(|c| !c.in_h0_subgroup())),
    );
    let b = data.b_generator();
    checks.insert(
        "coset_commutators_are_generator",
        b.is_some()
            && !cf.is_empty()
            && !cg.is_empty()
            && cf.iter().all(|f| cg.iter().all(|h| ExtElem::commutator(f, h).ok() == b)),
    );
    Ok(Cor32Report {
        x: x.clone(),
        f0: *f0,
        k,
        a_order: data.a_order,
        theta_image,
        commutator: b,
        verdict: Verdict::from_checks(checks.values()),
        checks,
    })
}

/// Where a geometric class sits relative to `F_0` and `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioCase {
    NotStable,
    GammaStableClassExists,
    NoGammaStableClass,
}

pub fn classify(g: &DlGroup, x: &AdTorusElem, f0: &ExtElem) -> Result<ScenarioCase> {
    if !class_stable(g, x, f0)? || !class_stable(g, x, &ExtElem::gamma(g.rank()))? {
        return Ok(ScenarioCase::NotStable);
    }
    let table = rational_classes(g, x, f0, f0)?;
    Ok(if table.entries.iter().any(|e| e.gamma_stable) {
        ScenarioCase::GammaStableClassExists
    } else {
        ScenarioCase::NoGammaStableClass
    })
}

pub fn default_scenario_denominator(q: u64) -> u64 {
    2 * (q * q - 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioFinding {
    pub class: GeomClass,
    pub theta_image: Vec<CenterElem>,
    pub report: Cor32Report,
}

/// Classes of denominator dividing `n` that are stable under `F_0` and `γ`
/// while none of their `F_0`-rational classes is `γ`-stable.
pub fn scenario_search(g: &DlGroup, f0: &ExtElem, n: u64) -> Result<Vec<ScenarioFinding>> {
    let classes = enumerate_geom_classes(g, n)?;
    let found: Vec<Option<ScenarioFinding>> = classes
        .par_iter()
        .map(|c| {
            if classify(g, &c.rep, f0)? != ScenarioCase::NoGammaStableClass {
                return Ok(None);
            }
            let report = cor32_check(g, &c.rep, f0, 1)?;
            Ok(Some(ScenarioFinding { class: c.clone(), theta_image: report.theta_image.clone(), report }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Per-class classification of a census.
pub fn classify_census(g: &DlGroup, f0: &ExtElem, n: u64) -> Result<Vec<(GeomClass, ScenarioCase)>> {
    enumerate_geom_classes(g, n)?
        .into_par_iter()
        .map(|c| {
            let case = classify(g, &c.rep, f0)?;
            Ok((c, case))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Cor26Report {
    pub x: AdTorusElem,
    pub frobenius: ExtElem,
    pub f0: ExtElem,
    /// `F_0`-rational classes whose `Θ` is fixed by `F`.
    pub compatible_classes: usize,
    pub pairs_checked: usize,
    pub commuting_pairs: usize,
    pub pair: Option<(ExtElem, ExtElem)>,
    pub verdict: Verdict,
}

/// Searches the `F_0`- and `F`-cosets of `B̌_E` for commuting representatives.
/// Absence is a finding, not an error.
pub fn cor26_explore(g: &DlGroup, x: &AdTorusElem, f: &ExtElem, f0: &ExtElem) -> Result<Cor26Report> {
    for s in [f, f0] {
        if !class_stable(g, x, s)? {
            return Err(Error::NotStable(s.to_string()));
        }
    }
    let table0 = rational_classes(g, x, f0, f0)?;
    let compatible_classes = table0.entries.iter().filter(|e| fixes_theta(g, f, &e.theta)).count();
    let data = component_group(g, x)?;
    let c0 = coset_reps(g, &data, f0.a, f0.gamma_parity())?.reps;
    let c1 = coset_reps(g, &data, f.a, f.gamma_parity())?.reps;
    let pairs: Vec<(ExtElem, ExtElem)> = c0
        .iter()
        .flat_map(|a| c1.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| ExtElem::commutator(a, b).is_ok_and(|c| c.is_identity()))
        .collect();
    Ok(Cor26Report {
        x: x.clone(),
        frobenius: *f,
        f0: *f0,
        compatible_classes,
        pairs_checked: c0.len() * c1.len(),
        commuting_pairs: pairs.len(),
        verdict: if pairs.is_empty() { Verdict::Fail } else { Verdict::Pass },
        pair: pairs.first().copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::CenterLabel;

    fn grp(p: u64) -> DlGroup {
        DlGroup::new(4, p).unwrap()
    }

    fn frob(a: u32) -> ExtElem {
        ExtElem::frobenius(4, a)
    }

    #[test]
    fn normal_form_matches_orbit_minimum() {
        for n in [3i128, 4, 6] {
            let vals: Vec<Qz> = (0..n).map(|k| Qz::from_ratio(k, n)).collect();
            for a in &vals {
                for b in &vals {
                    for c in &vals {
                        for d in &vals {
                            let t = QzVector::new(vec![*a, *b, *c, *d]);
                            assert_eq!(class_rep(&t), class_rep_brute_force(&t), "{t}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn census_small() {
        let g = grp(5);
        assert_eq!(enumerate_geom_classes(&g, 1).unwrap().len(), 1);
        let c2 = enumerate_geom_classes(&g, 2).unwrap();
        let reps: Vec<String> = c2.iter().map(|c| c.rep.to_string()).collect();
        assert_eq!(reps, ["0,0,0,0", "0,0,0,1/2", "0,0,1/2,1/2"]);
    }

    #[test]
    fn census_matches_brute_force() {
        let g = grp(5);
        let n = 4i128;
        let mut brute = BTreeSet::new();
        for code in 0..n.pow(4) {
            let t = QzVector::new((0..4).map(|i| Qz::from_ratio(code / n.pow(i) % n, n)).collect());
            brute.insert(class_rep_brute_force(&t));
        }
        let census: BTreeSet<QzVector> =
            enumerate_geom_classes(&g, 4).unwrap().into_iter().map(|c| c.rep.vector().clone()).collect();
        assert_eq!(census, brute);
    }

    #[test]
    fn orbit_sizes_cover_the_grid() {
        let g = grp(5);
        for n in [2u64, 3, 4, 6, 8] {
            let total: u64 = enumerate_geom_classes(&g, n).unwrap().iter().map(|c| c.orbit_size).sum();
            let expected = if n % 2 == 0 { n.pow(4) / 2 } else { n.pow(4) };
            assert_eq!(total, expected, "n = {n}");
        }
    }

    #[test]
    fn census_rejects_bad_denominators() {
        let g = grp(5);
        assert_eq!(enumerate_geom_classes(&g, 10), Err(Error::DenominatorDivisibleByP { den: 10, p: 5 }));
        let small =
            DlGroup::with_options(4, 5, crate::torus::GroupOptions { bound: 10, allow_large_rank: false }).unwrap();
        assert!(matches!(enumerate_geom_classes(&small, 8), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn stability_examples() {
        let g = grp(5);
        let x = g.parse_ad("0,1/4,1/2,3/4").unwrap();
        assert!(class_stable(&g, &x, &ExtElem::identity(4)).unwrap());
        assert!(class_stable(&g, &x, &ExtElem::gamma(4)).unwrap());
        let v = "perm=[1,2,3,4];flips={1,4}".parse::<SignedPerm>().unwrap();
        assert_eq!(g.act_ad(&ExtElem::new(v, 0), &g.act_ad(&ExtElem::gamma(4), &x)), x);
        assert_eq!(g.act_ad(&frob(1), &x), x);
    }

    #[test]
    fn rational_classes_identity() {
        let g = grp(5);
        let t = rational_classes(&g, &g.parse_ad("0,0,0,0").unwrap(), &frob(1), &frob(1)).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert!(t.entries[0].theta.is_trivial());
        assert!(t.consistent(), "{:?}", t.checks);
    }

    #[test]
    fn rational_classes_full_component_group() {
        let g = grp(5);
        let x = g.parse_ad("0,1/4,1/2,3/4").unwrap();
        let t = rational_classes(&g, &x, &frob(1), &frob(1)).unwrap();
        assert_eq!(t.entries.len(), 4);
        assert_eq!(t.theta_values().len(), 4);
        assert_eq!(t.independent_count, 4);
        assert!(t.surjective);
        assert!(t.consistent(), "{:?}", t.checks);
    }

    #[test]
    fn theorem_b_examples() {
        let g = grp(5);
        let x = g.parse_ad("0,1/4,1/2,3/4").unwrap();
        let r = theorem_b_check(&g, &x, &frob(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
        assert!(r.witness_lift.is_some());
        let y = g.parse_ad("0,0,0,1/2").unwrap();
        assert!(matches!(theorem_b_check(&g, &y, &frob(1)), Err(Error::HypothesisViolated(_))));
        let g3 = grp(3);
        let x3 = g3.parse_ad("0,1/4,1/2,3/4").unwrap();
        match theorem_b_check(&g3, &x3, &frob(1)) {
            Ok(r) => {
                assert!(class_stable(&g3, &x3, &frob(1)).unwrap());
                assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
            }
            Err(e) => {
                assert!(matches!(e, Error::NotStable(_)));
                assert!(!class_stable(&g3, &x3, &frob(1)).unwrap());
            }
        }
    }

    #[test]
    fn known_no_gamma_stable_class() {
        let g = grp(5);
        let x = g.parse_ad("0,1/2,1/24,17/24").unwrap();
        assert_eq!(classify(&g, &x, &frob(1)).unwrap(), ScenarioCase::NoGammaStableClass);
        let t = rational_classes(&g, &x, &frob(1), &frob(1)).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert!(t.entries.iter().all(|e| !e.gamma_stable));
        let labels: BTreeSet<CenterLabel> = t.theta_values().iter().map(|c| c.label).collect();
        assert_eq!(labels, BTreeSet::from([CenterLabel::Z, CenterLabel::ZH0]));
        for k in [1, 2] {
            let r = cor32_check(&g, &x, &frob(1), k).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
        }
    }

    #[test]
    fn cor32_hypotheses() {
        let g = grp(5);
        for s in ["0,0,0,1/2", "0,0,0,0"] {
            let x = g.parse_ad(s).unwrap();
            assert!(matches!(cor32_check(&g, &x, &frob(1), 1), Err(Error::HypothesisViolated(_))), "{s}");
        }
    }

    #[test]
    fn scenario_small_denominators() {
        let g = grp(5);
        assert!(scenario_search(&g, &frob(1), 2).unwrap().is_empty());
        let cases = classify_census(&g, &frob(1), 4).unwrap();
        assert_eq!(cases.len(), enumerate_geom_classes(&g, 4).unwrap().len());
        assert!(cases.iter().all(|(_, c)| *c != ScenarioCase::NoGammaStableClass));
    }

    #[test]
    fn cor26_examples() {
        let g = grp(5);
        let x = g.parse_ad("0,0,0,0").unwrap();
        let r = cor26_explore(&g, &x, &frob(2), &frob(1)).unwrap();
        assert_eq!(r.pair, Some((frob(1), frob(2))));
        let y = g.parse_ad("0,1/4,1/2,3/4").unwrap();
        assert!(cor26_explore(&g, &y, &frob(2), &frob(1)).unwrap().pair.is_some());
        let z = g.parse_ad("0,1/2,1/24,17/24").unwrap();
        assert!(cor26_explore(&g, &z, &frob(2), &frob(1)).unwrap().pair.is_some());
    }

    #[test]
    fn gamma_twisted_theta_not_injective() {
        // ω(B̌) = ⟨h_0⟩ = [Z, γF]: two rational classes, one Θ value
        let g = grp(5);
        let x = g.parse_ad("0,0,0,1/2").unwrap();
        let f = ExtElem::new(SignedPerm::gamma(4), 1);
        let t = rational_classes(&g, &x, &f, &frob(1)).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.conjugacy_count, 2);
        assert_eq!(t.independent_count, 2);
        assert!(!t.checks["theta_injective"]);
        assert!(t.checks["theta_constant_on_classes"]);
        let u = rational_classes(&g, &x, &frob(1), &frob(1)).unwrap();
        assert!(u.consistent());
        assert_eq!(u.entries.len(), 2);
    }

    #[test]
    fn weyl_complement_orders() {
        assert_eq!(weyl_complement_order(4), 192);
        assert_eq!(weyl_complement_order(5), 1920);
    }
}
