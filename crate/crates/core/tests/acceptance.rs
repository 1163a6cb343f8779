//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use dlad_core::centralizer::{
    component_group, fiber_report, semidirect_report, stabilizer_brute_force, standard_cosets,
};
use dlad_core::matmodel::{crosscheck_action, verify_graph_auto, verify_prop21, GaloisField, MatrixModel};
use dlad_core::rational::{
    class_stable, enumerate_geom_classes, rational_classes, scenario_search, theorem_b_check, GeomClass,
};
use dlad_core::torus::CenterLabel;
use dlad_core::weyl::all_signed_perms;
use dlad_core::{AdTorusElem, DlGroup, ExtElem, Qz, QzVector, ScTorusElem, SignedPerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, ok: bool, detail: &str) {
    println!("criterion {n} {}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {name} ({detail})");
}

fn census(p: u64, n: u64) -> (DlGroup, Vec<GeomClass>) {
    let g = DlGroup::new(4, p).unwrap();
    let classes = enumerate_geom_classes(&g, n).unwrap();
    (g, classes)
}

#[test]
fn criterion_1_signed_permutation_complement() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (l, q, order) in [(4, 3, 192), (4, 5, 192), (5, 3, 1920)] {
        let r = verify_prop21(l, q, 7).unwrap();
        if !r.verdict.is_pass() || r.w_order != order {
            failures.push(format!("l={l} q={q} order={} checks={:?}", r.w_order, r.checks));
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(30);
    report(1, "signed permutation matrices complement the torus", ok, &format!("{elapsed:.2?} {failures:?}"));
}

#[test]
fn criterion_2_graph_automorphism() {
    let mut failures = Vec::new();
    for q in [3, 5, 9] {
        let r = verify_graph_auto(4, q, 25, 11).unwrap();
        if !r.verdict.is_pass() || r.samples < 20 {
            failures.push(format!("q={q} samples={} checks={:?}", r.samples, r.checks));
        }
    }
    report(2, "graph automorphism realized by the last sign change", failures.is_empty(), &format!("{failures:?}"));
}

#[test]
fn criterion_3_semidirect_factorization() {
    let mut failures = Vec::new();
    let mut total = 0;
    for p in [3, 5] {
        let (g, classes) = census(p, 8);
        let f0 = ExtElem::frobenius(4, 1);
        for c in &classes {
            let d = component_group(&g, &c.rep).unwrap();
            let cosets = standard_cosets(&g, &d, &f0).unwrap();
            let r = semidirect_report(&d, &cosets);
            let brute = stabilizer_brute_force(&g, &c.rep);
            if !r.verdict.is_pass() || brute != d.stab || d.stab.len() != d.reflections.len() * d.a_order {
                failures.push(format!("p={p} x={} {:?}", c.rep, r.checks));
            }
            total += 1;
        }
    }
    let ok = failures.is_empty() && total > 0;
    report(3, "stabilizer = W(Phi_x) x| B, omega injective", ok, &format!("{total} classes, failures {failures:?}"));
}

#[test]
fn criterion_4_fiber_action() {
    let mut failures = Vec::new();
    let mut total = 0;
    for p in [3, 5] {
        let (g, classes) = census(p, 8);
        let f0 = ExtElem::frobenius(4, 1);
        for c in &classes {
            let d = component_group(&g, &c.rep).unwrap();
            let cosets = standard_cosets(&g, &d, &f0).unwrap();
            let r = fiber_report(&g, &d, &cosets).unwrap();
            if !r.verdict.is_pass() {
                failures.push(format!("p={p} x={} {:?}", c.rep, r.checks));
            }
            total += 1;
        }
    }
    let ok = failures.is_empty() && total > 0;
    report(4, "fiber action commutes with h0 and is injective", ok, &format!("{total} classes, failures {failures:?}"));
}

#[test]
fn criterion_5_four_rational_classes() {
    let start = Instant::now();
    let g = DlGroup::new(4, 5).unwrap();
    let x = g.parse_ad("0,1/4,1/2,3/4").unwrap();
    let r = theorem_b_check(&g, &x, &ExtElem::frobenius(4, 1)).unwrap();
    let labels: BTreeSet<CenterLabel> = r.table.entries.iter().map(|e| e.theta.rep.label).collect();
    let trivial_gamma = r.table.entries.iter().any(|e| e.theta.is_trivial() && e.gamma_stable);
    let elapsed = start.elapsed();
    let ok = r.verdict.is_pass()
        && r.table.entries.len() == 4
        && labels.len() == 4
        && r.table.theta_values().len() == g.center().len()
        && trivial_gamma
        && elapsed < Duration::from_secs(10);
    report(5, "four rational classes separated by theta", ok, &format!("{elapsed:.2?} labels {labels:?}"));
}

#[test]
fn criterion_6_no_gamma_stable_scenario() {
    let start = Instant::now();
    let g = DlGroup::new(4, 5).unwrap();
    let f0 = ExtElem::frobenius(4, 1);
    let found = scenario_search(&g, &f0, 48).unwrap();
    let required = [
        "f0_trivial_on_center",
        "component_group_order_two",
        "omega_image_is_h0",
        "theta_image_is_center_minus_h0",
        "power_classes_fixed_by_gamma_and_f0",
        "twist_commutators_outside_h0",
        "coset_commutators_are_generator",
    ];
    let mut failures = Vec::new();
    for f in &found {
        let missing: Vec<&str> = required.iter().copied().filter(|k| f.report.checks.get(k) != Some(&true)).collect();
        if !missing.is_empty() || !f.report.verdict.is_pass() {
            failures.push(format!("{} {missing:?}", f.class.rep));
        }
    }
    let elapsed = start.elapsed();
    let ok = !found.is_empty() && failures.is_empty() && elapsed < Duration::from_secs(600);
    report(
        6,
        "classes without gamma-stable rational classes",
        ok,
        &format!("{} found in {elapsed:.2?}, failures {failures:?}", found.len()),
    );
}

fn random_point<R: Rng>(rng: &mut R, l: usize, den: u64) -> QzVector {
    QzVector::new((0..l).map(|_| Qz::from_ratio(rng.gen_range(0..den) as i128, den as i128)).collect())
}

#[test]
fn criterion_7_matrix_model_faithful() {
    let g = DlGroup::new(4, 3).unwrap();
    let dens: Vec<u64> = (1..=16).filter(|d| d % 3 != 0).collect();
    let mut models: HashMap<u64, MatrixModel> = HashMap::new();
    let perms = all_signed_perms(4);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cross_fail = 0;
    for _ in 0..100 {
        let den = dens[rng.gen_range(0..dens.len())];
        let model = models.entry(den).or_insert_with(|| MatrixModel::new(4, GaloisField::splitting(3, den).unwrap()));
        let x = g.ad(random_point(&mut rng, 4, den)).unwrap();
        let v = perms[rng.gen_range(0..perms.len())];
        if !crosscheck_action(model, &x, &v).unwrap() {
            cross_fail += 1;
        }
    }
    let mut trip_fail = 0;
    for _ in 0..1000 {
        let den = dens[rng.gen_range(0..dens.len())];
        let x: AdTorusElem = g.ad(random_point(&mut rng, 4, den)).unwrap();
        let lifts = g.fiber(&x);
        let u: &ScTorusElem = &lifts[rng.gen_range(0..4)];
        if g.project(u) != x || g.project(&g.lift(&x)) != x {
            trip_fail += 1;
        }
    }
    let ok = cross_fail == 0 && trip_fail == 0;
    report(
        7,
        "matrix conjugation matches the abstract action",
        ok,
        &format!("{cross_fail} cross, {trip_fail} round trip"),
    );
}

#[test]
fn criterion_8_theta_contracts() {
    let (g, classes) = census(5, 8);
    let base = ExtElem::frobenius(4, 1);
    let gamma = ExtElem::gamma(4);
    let frobs = [base, ExtElem::new(SignedPerm::gamma(4), 1)];
    let mut failures = Vec::new();
    let mut tables = 0;
    for f in &frobs {
        for c in &classes {
            if !class_stable(&g, &c.rep, f).unwrap() {
                continue;
            }
            let t = rational_classes(&g, &c.rep, f, &base).unwrap();
            tables += 1;
            let reps: BTreeSet<_> = t.entries.iter().map(|e| e.theta.rep.clone()).collect();
            let counts_ok = t.entries.len() == reps.len()
                && t.entries.len() == t.independent_count
                && t.entries.len() == t.conjugacy_count;
            let values = t.theta_values();
            let mut closed = true;
            for sigma in [gamma, base] {
                if !class_stable(&g, &c.rep, &sigma).unwrap() {
                    continue;
                }
                closed &= t.entries.iter().all(|e| values.contains(&g.act_center(&sigma, &e.theta.rep)));
            }
            if !counts_ok || !closed || !t.consistent() {
                let checks: BTreeMap<_, _> = t.checks.clone();
                failures.push(format!("F={f} x={} {checks:?}", c.rep));
            }
        }
    }
    let ok = failures.is_empty() && tables > 0;
    report(8, "theta is injective and equivariant", ok, &format!("{tables} tables, failures {failures:?}"));
}
