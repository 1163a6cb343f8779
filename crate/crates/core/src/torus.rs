//! Points of the adjoint torus `T` of `D_{l,ad}`, of the torus `T_0` of the
//! simply connected cover `H_0`, the isogeny `π: T_0 → T` between them, the
//! center `Z(H_0) = ker π`, and the maps `ω` and `Θ` built from lifts.
//!
//! Coordinates:
//! * adjoint points are vectors `t ∈ (ℚ/ℤ)^l` on the `SO_{2l}` torus taken
//!   modulo the half-shift `(1/2, …, 1/2)` (the image of `−Id`);
//! * simply connected points are vectors `u ∈ (ℚ/ℤ)^l` in the coroot basis
//!   `B = [e_1−e_2, …, e_{l−1}−e_l, e_{l−1}+e_l]`, with `t = B·u`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{coroot_basis, BasisSolver, IntMatrix, QzVector};
use crate::weyl::{ExtElem, SignedPerm, MAX_RANK};

/// Default bound on group sizes enumerated by searches.
pub const DEFAULT_BOUND: u128 = 1_000_000;

/// Search bound, overridable through `DLAD_MAX_ORBIT`.
pub fn default_bound() -> u128 {
    std::env::var("DLAD_MAX_ORBIT").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BOUND)
}

/// A point of the adjoint torus, stored as the lexicographically smaller of
/// `t` and `t + (1/2, …, 1/2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AdTorusElem {
    t: QzVector,
}

impl AdTorusElem {
    pub fn from_vector(t: QzVector) -> AdTorusElem {
        let s = t.shifted_by_half();
        AdTorusElem { t: if s < t { s } else { t } }
    }

    pub fn vector(&self) -> &QzVector {
        &self.t
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn is_identity(&self) -> bool {
        self.t.is_zero()
    }
}

impl fmt::Display for AdTorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.t.fmt(f)
    }
}

impl Serialize for AdTorusElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.t.to_string())
    }
}

/// A point of `T_0` in coroot-basis coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ScTorusElem {
    u: QzVector,
}

impl ScTorusElem {
    pub fn new(u: QzVector) -> ScTorusElem {
        ScTorusElem { u }
    }

    pub fn coords(&self) -> &QzVector {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_zero()
    }

    pub fn add(&self, other: &ScTorusElem) -> ScTorusElem {
        ScTorusElem { u: &self.u + &other.u }
    }

    pub fn sub(&self, other: &ScTorusElem) -> ScTorusElem {
        ScTorusElem { u: &self.u - &other.u }
    }

    pub fn mul_int(&self, k: i128) -> ScTorusElem {
        ScTorusElem { u: self.u.mul_int(k) }
    }
}

impl fmt::Display for ScTorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.u.fmt(f)
    }
}

impl Serialize for ScTorusElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.u.to_string())
    }
}

/// Names of the four central elements of `H_0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum CenterLabel {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "h0")]
    H0,
    #[serde(rename = "z")]
    Z,
    #[serde(rename = "zh0")]
    ZH0,
}

impl fmt::Display for CenterLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CenterLabel::One => "1",
            CenterLabel::H0 => "h0",
            CenterLabel::Z => "z",
            CenterLabel::ZH0 => "zh0",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CenterElem {
    pub u: ScTorusElem,
    pub label: CenterLabel,
}

impl CenterElem {
    pub fn is_identity(&self) -> bool {
        self.label == CenterLabel::One
    }

    /// Member of `⟨h_0⟩ = ker(H_0 → SO_{2l})`.
    pub fn in_h0_subgroup(&self) -> bool {
        matches!(self.label, CenterLabel::One | CenterLabel::H0)
    }
}

impl fmt::Display for CenterElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.label, self.u)
    }
}

impl Serialize for CenterElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CenterType {
    /// `(ℤ/2)²`, `l` even.
    #[serde(rename = "Z2xZ2")]
    Klein,
    /// `ℤ/4`, `l` odd.
    #[serde(rename = "Z4")]
    Cyclic4,
}

/// A coset `rep + [Z(H_0), F]` of the center, the value of `Θ_F`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct ThetaValue {
    pub rep: CenterElem,
    pub coset: Vec<CenterElem>,
    #[serde(rename = "mod")]
    pub modulus: Vec<CenterElem>,
}

impl ThetaValue {
    pub fn is_trivial(&self) -> bool {
        self.rep.is_identity()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GroupOptions {
    pub bound: u128,
    pub allow_large_rank: bool,
}

impl Default for GroupOptions {
    fn default() -> Self {
        GroupOptions { bound: default_bound(), allow_large_rank: false }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The data of `D_{l,ad}` in characteristic `p` needed by every torus-level
/// computation: rank, characteristic, coroot basis and the center of `H_0`.
#[derive(Debug)]
pub struct DlGroup {
    rank: usize,
    p: u64,
    solver: BasisSolver,
    center: Vec<CenterElem>,
    center_type: CenterType,
    options: GroupOptions,
}

impl DlGroup {
    pub fn new(rank: usize, p: u64) -> Result<DlGroup> {
        DlGroup::with_options(rank, p, GroupOptions::default())
    }

    pub fn with_options(rank: usize, p: u64, options: GroupOptions) -> Result<DlGroup> {
        let max = if options.allow_large_rank { MAX_RANK } else { 6 };
        if rank < 4 || rank > max {
            return Err(Error::Config(format!("rank {rank} outside supported range 4..={max}")));
        }
        if p == 2 || !is_prime(p) {
            return Err(Error::Config(format!("characteristic {p} must be an odd prime")));
        }
        let solver = BasisSolver::new(&coroot_basis(rank))?;
        let mut g = DlGroup { rank, p, solver, center: Vec::new(), center_type: CenterType::Klein, options };
        g.build_center()?;
        Ok(g)
    }

    /// Memoized per `(rank, p)` with default options.
    pub fn shared(rank: usize, p: u64) -> Result<Arc<DlGroup>> {
        type Cache = Mutex<HashMap<(usize, u64), Arc<DlGroup>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("group cache poisoned");
        if let Some(g) = map.get(&(rank, p)) {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(DlGroup::new(rank, p)?);
        map.insert((rank, p), Arc::clone(&g));
        Ok(g)
    }

    fn build_center(&mut self) -> Result<()> {
        let l = self.rank;
        // ker(expand_so) = B^{-1} ℤ^l / ℤ^l, of order |det B| = 2
        let h0 = (0..l)
            .map(|k| {
                let e: Vec<i128> = (0..l).map(|i| i128::from(i == k)).collect();
                self.solver.solve_rational(&e, 1)
            })
            .find(|u| !u.is_zero())
            .ok_or_else(|| Error::Invariant("expansion map has trivial kernel".into()))?;
        let h0 = ScTorusElem::new(h0);
        let z = ScTorusElem::new(self.solver.solve(&QzVector::half(l))?);
        if !h0.mul_int(2).is_identity() || !self.expand_so(&h0).is_zero() {
            return Err(Error::Invariant("h0 is not an order-2 kernel element".into()));
        }
        let z2 = z.mul_int(2);
        self.center_type = if z2.is_identity() {
            CenterType::Klein
        } else if z2 == h0 {
            CenterType::Cyclic4
        } else {
            return Err(Error::Invariant("2z is neither 1 nor h0".into()));
        };
        let zh0 = z.add(&h0);
        self.center = vec![
            CenterElem { u: ScTorusElem::new(QzVector::zeros(l)), label: CenterLabel::One },
            CenterElem { u: h0, label: CenterLabel::H0 },
            CenterElem { u: z, label: CenterLabel::Z },
            CenterElem { u: zh0, label: CenterLabel::ZH0 },
        ];
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn bound(&self) -> u128 {
        self.options.bound
    }

    pub fn basis(&self) -> &IntMatrix {
        self.solver.basis()
    }

    pub fn center(&self) -> &[CenterElem] {
        &self.center
    }

    pub fn center_type(&self) -> CenterType {
        self.center_type
    }

    pub fn h0(&self) -> &CenterElem {
        &self.center[1]
    }

    pub fn z(&self) -> &CenterElem {
        &self.center[2]
    }

    /// Validated adjoint torus point.
    pub fn ad(&self, t: QzVector) -> Result<AdTorusElem> {
        if t.len() != self.rank {
            return Err(Error::RankMismatch(t.len(), self.rank));
        }
        t.check_coprime(self.p)?;
        Ok(AdTorusElem::from_vector(t))
    }

    pub fn parse_ad(&self, s: &str) -> Result<AdTorusElem> {
        self.ad(s.parse()?)
    }

    fn check_rank(&self, r: usize) -> Result<()> {
        if r == self.rank {
            Ok(())
        } else {
            Err(Error::RankMismatch(r, self.rank))
        }
    }

    /// `t ↦ p^a · v(t)` on the adjoint torus.
    pub fn act_ad(&self, x: &ExtElem, t: &AdTorusElem) -> AdTorusElem {
        debug_assert_eq!(x.rank(), self.rank);
        AdTorusElem::from_vector(x.v.apply(t.vector()).mul_pow(self.p, x.a))
    }

    /// The integer matrix `B^{-1} M(v) B` of `v` in coroot coordinates.
    pub fn sc_matrix(&self, v: &SignedPerm) -> IntMatrix {
        let m = self.solver.adjugate().mul(&v.matrix()).mul(self.basis());
        let det = self.solver.det();
        let n = self.rank;
        let mut out = IntMatrix::new(n, vec![0; n * n]);
        for i in 0..n {
            for j in 0..n {
                let e = m.get(i, j);
                assert!(e % det == 0, "signed permutation does not preserve the coroot lattice");
                out.set(i, j, e / det);
            }
        }
        out
    }

    /// Action on `T_0`, in coroot coordinates.
    pub fn act_sc(&self, x: &ExtElem, u: &ScTorusElem) -> ScTorusElem {
        debug_assert_eq!(x.rank(), self.rank);
        ScTorusElem::new(self.sc_matrix(&x.v).apply(&u.u).mul_pow(self.p, x.a))
    }

    /// `H_0 → SO_{2l}` on tori: `u ↦ B·u`.
    pub fn expand_so(&self, u: &ScTorusElem) -> QzVector {
        self.basis().apply(&u.u)
    }

    /// `π`.
    pub fn project(&self, u: &ScTorusElem) -> AdTorusElem {
        AdTorusElem::from_vector(self.expand_so(u))
    }

    /// Deterministic preimage under `π`: solves `B·u = t` on the stored representative.
    pub fn lift(&self, x: &AdTorusElem) -> ScTorusElem {
        ScTorusElem::new(self.solver.solve(x.vector()).expect("rank checked"))
    }

    /// `π^{-1}(x)` as `[u, u+h_0, u+z, u+z+h_0]`.
    pub fn fiber(&self, x: &AdTorusElem) -> [ScTorusElem; 4] {
        let u = self.lift(x);
        [u.clone(), u.add(&self.center[1].u), u.add(&self.center[2].u), u.add(&self.center[3].u)]
    }

    pub fn center_elem(&self, u: &ScTorusElem) -> Option<CenterElem> {
        self.center.iter().find(|c| &c.u == u).cloned()
    }

    /// Action of an extended element on `Z(H_0)`.
    pub fn act_center(&self, x: &ExtElem, c: &CenterElem) -> CenterElem {
        self.center_elem(&self.act_sc(x, &c.u)).expect("center is stable")
    }

    /// `[Z(H_0), F] = {F(ζ) − ζ}`, sorted.
    pub fn center_commutator(&self, f: &ExtElem) -> Vec<CenterElem> {
        let mut out: Vec<CenterElem> = self
            .center
            .iter()
            .map(|c| self.center_elem(&self.act_sc(f, &c.u).sub(&c.u)).expect("center is stable"))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The coset `d + modulus`, with its least element as representative.
    pub fn coset(&self, d: &CenterElem, modulus: &[CenterElem]) -> ThetaValue {
        let mut coset: Vec<CenterElem> =
            modulus.iter().map(|m| self.center_elem(&d.u.add(&m.u)).expect("center is a group")).collect();
        coset.sort();
        coset.dedup();
        ThetaValue { rep: coset[0].clone(), coset, modulus: modulus.to_vec() }
    }

    /// `ω_x(w) = w(x_0) − x_0` for `w` even in the stabilizer of `x`.
    pub fn omega(&self, x: &AdTorusElem, w: &SignedPerm) -> Result<CenterElem> {
        self.check_rank(w.rank())?;
        self.check_rank(x.rank())?;
        if !w.is_even() {
            return Err(Error::OddParity);
        }
        let we = ExtElem::new(*w, 0);
        if &self.act_ad(&we, x) != x {
            return Err(Error::NotInStabilizer);
        }
        let fiber = self.fiber(x);
        let d = self.act_sc(&we, &fiber[0]).sub(&fiber[0]);
        for u in &fiber[1..] {
            if self.act_sc(&we, u).sub(u) != d {
                return Err(Error::Invariant("omega depends on the chosen lift".into()));
            }
        }
        self.center_elem(&d).ok_or_else(|| Error::Invariant("commutator with the lift is not central".into()))
    }

    /// `Θ_F(x) = x_0^{-1} F(x_0) [Z(H_0), F]` for a Frobenius `F` fixing `x`.
    pub fn theta(&self, x: &AdTorusElem, f: &ExtElem) -> Result<ThetaValue> {
        self.check_rank(f.rank())?;
        self.check_rank(x.rank())?;
        if f.a == 0 {
            return Err(Error::FrobeniusPowerZero);
        }
        if &self.act_ad(f, x) != x {
            return Err(Error::NotFixed);
        }
        let modulus = self.center_commutator(f);
        let mut value: Option<ThetaValue> = None;
        let other_rep = AdTorusElem { t: x.vector().shifted_by_half() };
        let lifts = self
            .fiber(x)
            .into_iter()
            .chain(std::iter::once(ScTorusElem::new(self.solver.solve(other_rep.vector()).expect("rank checked"))));
        for u in lifts {
            let d = self.act_sc(f, &u).sub(&u);
            let d = self.center_elem(&d).ok_or_else(|| Error::Invariant("F(x_0) - x_0 is not central".into()))?;
            let v = self.coset(&d, &modulus);
            match &value {
                None => value = Some(v),
                Some(prev) if prev.rep != v.rep => {
                    return Err(Error::Invariant("theta depends on the chosen lift".into()))
                }
                Some(_) => {}
            }
        }
        Ok(value.expect("fiber is nonempty"))
    }
}
