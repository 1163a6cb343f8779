//! Command-line front end: census, centralizer reports, rational-class
//! tables and the checker suites, as JSON or TSV.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::centralizer::{component_group, fiber_report, semidirect_report, standard_cosets};
use crate::error::{Error, Result, Verdict};
use crate::exactnum::{Qz, QzVector};
use crate::matmodel::{crosscheck_action, verify_graph_auto, verify_prop21, GaloisField, MatrixModel};
use crate::rational::{
    class_stable, cor32_check, default_scenario_denominator, enumerate_geom_classes, rational_classes, scenario_search,
    theorem_b_check,
};
use crate::torus::{AdTorusElem, DlGroup, GroupOptions, ScTorusElem};
use crate::weyl::{all_signed_perms, ExtElem, SignedPerm};

#[derive(Parser, Debug)]
#[command(name = "dlad", version, about = "Centralizers and rational classes in adjoint groups of type D")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Census of geometric classes with denominator dividing --denom.
    Classes(RunConfig),
    /// Centralizer, component group and fiber action of --x.
    Centralizer(RunConfig),
    /// Rational classes of --x for the Frobenius given by --q/--twist/--gamma.
    Rational(RunConfig),
    /// Run a checker suite.
    Check {
        which: Suite,
        #[command(flatten)]
        cfg: RunConfig,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Prop21,
    Graphauto,
    #[value(name = "thmA")]
    ThmA,
    #[value(name = "thmB")]
    ThmB,
    Cor32,
    Rem24,
    Crosscheck,
    Scenario,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    /// Characteristic; inferred from --q when omitted.
    #[arg(long)]
    pub p: Option<u64>,
    /// Power of p fixing the Frobenius F_0 = F_q.
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub denom: Option<u64>,
    /// Torus point, comma-separated fractions.
    #[arg(long)]
    pub x: Option<String>,
    /// Weyl twist of the Frobenius, "perm=[..];flips={..}".
    #[arg(long)]
    pub twist: Option<String>,
    /// Compose the Frobenius with the graph automorphism.
    #[arg(long)]
    pub gamma: bool,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Search bound; overrides DLAD_MAX_ORBIT.
    #[arg(long)]
    pub bound: Option<u128>,
    #[arg(long)]
    pub allow_large_rank: bool,
}

struct Resolved {
    group: DlGroup,
    q: u64,
    a: u32,
}

impl RunConfig {
    fn resolve(&self) -> Result<Resolved> {
        let p = match (self.p, self.q) {
            (Some(p), _) => p,
            (None, Some(q)) => GaloisField::from_q(q)?.p(),
            (None, None) => return Err(Error::Config("one of --p or --q is required".into())),
        };
        let mut options = GroupOptions { allow_large_rank: self.allow_large_rank, ..GroupOptions::default() };
        if let Some(b) = self.bound {
            options.bound = b;
        }
        let group = DlGroup::with_options(self.rank, p, options)?;
        let q = self.q.unwrap_or(p);
        let mut a = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            a += 1;
        }
        if r != 1 || a == 0 {
            return Err(Error::Config(format!("q = {q} is not a power of p = {p}")));
        }
        Ok(Resolved { group, q, a })
    }

    fn point(&self, g: &DlGroup) -> Result<AdTorusElem> {
        let s = self.x.as_deref().ok_or_else(|| Error::Config("--x is required".into()))?;
        g.parse_ad(s)
    }

    fn denom(&self) -> Result<u64> {
        self.denom.ok_or_else(|| Error::Config("--denom is required".into()))
    }

    /// `F_0 = (id, a)`.
    fn base_frobenius(&self, r: &Resolved) -> ExtElem {
        ExtElem::frobenius(self.rank, r.a)
    }

    /// `(twist∘γ^gamma, a)`.
    fn frobenius(&self, r: &Resolved) -> Result<ExtElem> {
        let mut v = match &self.twist {
            Some(s) => s.parse::<SignedPerm>()?,
            None => SignedPerm::identity(self.rank),
        };
        if v.rank() != self.rank {
            return Err(Error::RankMismatch(v.rank(), self.rank));
        }
        if self.gamma {
            v = v * SignedPerm::gamma(self.rank);
        }
        Ok(ExtElem::new(v, r.a))
    }
}

/// What a command produced: JSON lines or a single report.
enum Output {
    Lines(Vec<Value>),
    Report(Value),
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn verdict_of(v: &Value) -> Option<&str> {
    v.get("verdict").and_then(Value::as_str)
}

fn tsv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_tsv(out: &mut dyn Write, output: &Output) -> std::io::Result<()> {
    match output {
        Output::Lines(rows) => {
            if let Some(Value::Object(first)) = rows.first() {
                writeln!(out, "{}", first.keys().cloned().collect::<Vec<_>>().join("\t"))?;
            }
            for row in rows {
                if let Value::Object(m) = row {
                    writeln!(out, "{}", m.values().map(tsv_cell).collect::<Vec<_>>().join("\t"))?;
                }
            }
        }
        Output::Report(v) => {
            if let Some(Value::Object(checks)) = v.get("checks") {
                for (k, b) in checks {
                    writeln!(out, "{k}\t{}", tsv_cell(b))?;
                }
            }
            for key in ["phi_type", "a_order", "classes", "failures", "findings"] {
                if let Some(x) = v.get(key) {
                    let n = x.as_array().map_or_else(|| tsv_cell(x), |a| a.len().to_string());
                    writeln!(out, "{key}\t{n}")?;
                }
            }
            writeln!(out, "verdict\t{}", verdict_of(v).unwrap_or("pass"))?;
        }
    }
    Ok(())
}

fn write_output(out: &mut dyn Write, output: &Output, format: Format) -> std::io::Result<()> {
    match format {
        Format::Tsv => write_tsv(out, output),
        Format::Json => match output {
            Output::Lines(rows) => rows.iter().try_for_each(|r| writeln!(out, "{r}")),
            Output::Report(v) => writeln!(out, "{v}"),
        },
    }
}

fn cmd_classes(cfg: &RunConfig) -> Result<Output> {
    let r = cfg.resolve()?;
    let g = &r.group;
    let f0 = cfg.base_frobenius(&r);
    let gamma = ExtElem::gamma(cfg.rank);
    let rows = enumerate_geom_classes(g, cfg.denom()?)?
        .into_iter()
        .map(|c| {
            let mut v = to_value(&c);
            v["f0_stable"] = json!(class_stable(g, &c.rep, &f0)?);
            v["gamma_stable"] = json!(class_stable(g, &c.rep, &gamma)?);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(Output::Lines(rows))
}

fn centralizer_value(g: &DlGroup, x: &AdTorusElem, f0: &ExtElem) -> Result<Value> {
    let d = component_group(g, x)?;
    let cosets = standard_cosets(g, &d, f0)?;
    let semi = semidirect_report(&d, &cosets);
    let fiber = fiber_report(g, &d, &cosets)?;
    let verdict = Verdict::from_checks(&[semi.verdict.is_pass(), fiber.verdict.is_pass()]);
    Ok(json!({
        "x": x,
        "phi_type": d.phi.type_name(),
        "a_order": d.a_order,
        "phi": d.phi.roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "basis": d.phi.basis.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "b_check": d.b_check.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "cosets": cosets,
        "semidirect": semi,
        "fiber": fiber,
        "verdict": verdict,
    }))
}

fn cmd_centralizer(cfg: &RunConfig) -> Result<Output> {
    let r = cfg.resolve()?;
    let x = cfg.point(&r.group)?;
    Ok(Output::Report(centralizer_value(&r.group, &x, &cfg.base_frobenius(&r))?))
}

fn cmd_rational(cfg: &RunConfig) -> Result<Output> {
    let r = cfg.resolve()?;
    let x = cfg.point(&r.group)?;
    let table = rational_classes(&r.group, &x, &cfg.frobenius(&r)?, &cfg.base_frobenius(&r))?;
    let mut v = to_value(&table);
    v["verdict"] = json!(Verdict::from_checks(table.checks.values()));
    Ok(Output::Report(v))
}

/// Runs `per_class` on the census (or on --x alone) and collects failures.
fn census_suite(cfg: &RunConfig, per_class: impl Fn(&DlGroup, &AdTorusElem) -> Result<Value>) -> Result<Output> {
    let r = cfg.resolve()?;
    let g = &r.group;
    let points: Vec<AdTorusElem> = match &cfg.x {
        Some(_) => vec![cfg.point(g)?],
        None => enumerate_geom_classes(g, cfg.denom.unwrap_or(8))?.into_iter().map(|c| c.rep).collect(),
    };
    let mut failures = Vec::new();
    for x in &points {
        let v = per_class(g, x)?;
        if verdict_of(&v) != Some("pass") {
            failures.push(v);
        }
    }
    let verdict = if failures.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(Output::Report(json!({ "classes": points.len(), "failures": failures, "verdict": verdict })))
}

fn crosscheck(cfg: &RunConfig) -> Result<Output> {
    let r = cfg.resolve()?;
    let g = &r.group;
    let p = g.p();
    let den = cfg.denom.unwrap_or(16);
    let model = MatrixModel::new(cfg.rank, GaloisField::splitting(p, den)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let perms = all_signed_perms(cfg.rank);
    let divisors: Vec<u64> = (1..=den).filter(|d| den.is_multiple_of(*d)).collect();
    let random_point = |rng: &mut ChaCha8Rng| {
        let d = divisors[rng.gen_range(0..divisors.len())];
        QzVector::new((0..cfg.rank).map(|_| Qz::from_ratio(rng.gen_range(0..d) as i128, d as i128)).collect())
    };
    let mut action_ok = 0;
    for _ in 0..100 {
        let x = AdTorusElem::from_vector(random_point(&mut rng));
        let v = perms[rng.gen_range(0..perms.len())];
        action_ok += usize::from(crosscheck_action(&model, &x, &v)?);
    }
    let mut lift_ok = 0;
    for _ in 0..1000 {
        let x = AdTorusElem::from_vector(random_point(&mut rng));
        let u = ScTorusElem::new(random_point(&mut rng));
        let ok = g.project(&g.lift(&x)) == x && g.fiber(&g.project(&u)).contains(&u);
        lift_ok += usize::from(ok);
    }
    let checks = json!({ "action_crosschecks": action_ok == 100, "lift_project_round_trips": lift_ok == 1000 });
    let verdict = Verdict::from_checks(&[action_ok == 100, lift_ok == 1000]);
    Ok(Output::Report(json!({
        "field": format!("GF({}^{})", p, model.field().k()),
        "action_passed": action_ok,
        "round_trips_passed": lift_ok,
        "checks": checks,
        "verdict": verdict,
    })))
}

fn cmd_check(which: Suite, cfg: &RunConfig) -> Result<Output> {
    match which {
        Suite::Prop21 => {
            let r = cfg.resolve()?;
            Ok(Output::Report(to_value(&verify_prop21(cfg.rank, r.q, cfg.seed)?)))
        }
        Suite::Graphauto => {
            let r = cfg.resolve()?;
            Ok(Output::Report(to_value(&verify_graph_auto(cfg.rank, r.q, 20, cfg.seed)?)))
        }
        Suite::ThmA => {
            let f0 = cfg.base_frobenius(&cfg.resolve()?);
            census_suite(cfg, |g, x| {
                let d = component_group(g, x)?;
                Ok(to_value(&semidirect_report(&d, &standard_cosets(g, &d, &f0)?)))
            })
        }
        Suite::Rem24 => {
            let f0 = cfg.base_frobenius(&cfg.resolve()?);
            census_suite(cfg, |g, x| {
                let d = component_group(g, x)?;
                Ok(to_value(&fiber_report(g, &d, &standard_cosets(g, &d, &f0)?)?))
            })
        }
        Suite::ThmB => {
            let r = cfg.resolve()?;
            let x = cfg.point(&r.group)?;
            Ok(Output::Report(to_value(&theorem_b_check(&r.group, &x, &cfg.base_frobenius(&r))?)))
        }
        Suite::Cor32 => {
            let r = cfg.resolve()?;
            let x = cfg.point(&r.group)?;
            Ok(Output::Report(to_value(&cor32_check(&r.group, &x, &cfg.base_frobenius(&r), cfg.k)?)))
        }
        Suite::Crosscheck => crosscheck(cfg),
        Suite::Scenario => {
            let r = cfg.resolve()?;
            let n = cfg.denom.unwrap_or_else(|| default_scenario_denominator(r.q));
            let found = scenario_search(&r.group, &cfg.base_frobenius(&r), n)?;
            let ok = !found.is_empty() && found.iter().all(|f| f.report.verdict.is_pass());
            Ok(Output::Report(json!({
                "denom": n,
                "findings": found,
                "verdict": if ok { Verdict::Pass } else { Verdict::Fail },
            })))
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::HypothesisViolated(_) | Error::NotStable(_) | Error::Invariant(_) | Error::NotFixed => 1,
        _ => 2,
    }
}

/// Runs a parsed command, writing to `out`; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (cfg, result) = match &cli.command {
        Command::Classes(cfg) => (cfg, cmd_classes(cfg)),
        Command::Centralizer(cfg) => (cfg, cmd_centralizer(cfg)),
        Command::Rational(cfg) => (cfg, cmd_rational(cfg)),
        Command::Check { which, cfg } => (cfg, cmd_check(*which, cfg)),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            let code = exit_code_for(&e);
            if code == 1 {
                let verdict = match e {
                    Error::HypothesisViolated(_) | Error::NotStable(_) => Verdict::HypothesisViolated,
                    _ => Verdict::Fail,
                };
                let report = Output::Report(json!({ "error": e.to_string(), "verdict": verdict }));
                let _ = write_output(out, &report, cfg.format);
            }
            let _ = writeln!(err, "dlad: {e}");
            return code;
        }
    };
    if let Err(e) = write_output(out, &output, cfg.format) {
        let _ = writeln!(err, "dlad: {e}");
        return 2;
    }
    match &output {
        Output::Report(v) if verdict_of(v).is_some_and(|s| s != "pass") => 1,
        _ => 0,
    }
}
