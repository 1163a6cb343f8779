//! Signed permutations of `{1..l}` (the hyperoctahedral group `ℤ/2 ≀ S_l`),
//! its even subgroup of type `D_l`, and extended elements pairing a signed
//! permutation with a power of the `p`-power Frobenius.
//!
//! The odd coset of the even subgroup is the graph-automorphism coset: the
//! graph automorphism itself is the single sign change of the last coordinate.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::QzVector;

pub const MAX_RANK: usize = 8;

/// `v(e_i) = ε_{π(i)} e_{π(i)}`: a permutation `π` followed by sign changes
/// at the positions in `flips`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    rank: u8,
    perm: [u8; MAX_RANK],
    flips: u8,
}

fn map_mask(perm: &[u8; MAX_RANK], rank: usize, mask: u8) -> u8 {
    (0..rank).filter(|&j| mask >> j & 1 == 1).fold(0u8, |acc, j| acc | 1 << perm[j])
}

impl SignedPerm {
    pub fn identity(rank: usize) -> SignedPerm {
        assert!(rank <= MAX_RANK, "rank {rank} exceeds {MAX_RANK}");
        let mut perm = [0u8; MAX_RANK];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        SignedPerm { rank: rank as u8, perm, flips: 0 }
    }

    /// Builds from 0-based images `perm[i] = π(i)` and 0-based flip positions.
    pub fn new(perm: &[usize], flips: &[usize]) -> Result<SignedPerm> {
        let rank = perm.len();
        if rank > MAX_RANK {
            return Err(Error::Config(format!("rank {rank} exceeds {MAX_RANK}")));
        }
        let mut v = SignedPerm::identity(rank);
        let mut seen = 0u16;
        for (i, &p) in perm.iter().enumerate() {
            if p >= rank || seen >> p & 1 == 1 {
                return Err(Error::Parse(format!("not a permutation: {perm:?}")));
            }
            seen |= 1 << p;
            v.perm[i] = p as u8;
        }
        for &f in flips {
            if f >= rank {
                return Err(Error::Parse(format!("flip position {} out of range", f + 1)));
            }
            v.flips |= 1 << f;
        }
        Ok(v)
    }

    /// Transposition of coordinates `i` and `j` (0-based), no sign changes.
    pub fn transposition(rank: usize, i: usize, j: usize) -> SignedPerm {
        let mut v = SignedPerm::identity(rank);
        v.perm.swap(i, j);
        v
    }

    /// Pure sign change at the given 0-based positions.
    pub fn sign_change(rank: usize, positions: &[usize]) -> SignedPerm {
        let mut v = SignedPerm::identity(rank);
        for &f in positions {
            assert!(f < rank);
            v.flips ^= 1 << f;
        }
        v
    }

    /// The graph automorphism `γ`, realized as the sign change of the last coordinate.
    pub fn gamma(rank: usize) -> SignedPerm {
        SignedPerm::sign_change(rank, &[rank - 1])
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    /// `π(i)`.
    pub fn image(&self, i: usize) -> usize {
        self.perm[i] as usize
    }

    /// Sign applied at position `j` (after permuting).
    pub fn sign_at(&self, j: usize) -> i64 {
        if self.flips >> j & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// `v(e_i) = sign · e_index`.
    pub fn maps(&self, i: usize) -> (usize, i64) {
        let j = self.image(i);
        (j, self.sign_at(j))
    }

    pub fn flip_mask(&self) -> u8 {
        self.flips
    }

    pub fn flip_positions(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&j| self.flips >> j & 1 == 1).collect()
    }

    /// Parity of the number of sign changes; 0 exactly on the type-`D` Weyl group.
    pub fn flip_parity(&self) -> u8 {
        (self.flips.count_ones() % 2) as u8
    }

    pub fn is_even(&self) -> bool {
        self.flip_parity() == 0
    }

    pub fn is_identity(&self) -> bool {
        *self == SignedPerm::identity(self.rank())
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SignedPerm) -> Result<SignedPerm> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank(), other.rank()));
        }
        let r = self.rank();
        let mut out = SignedPerm::identity(r);
        for i in 0..r {
            out.perm[i] = self.perm[other.perm[i] as usize];
        }
        out.flips = map_mask(&self.perm, r, other.flips) ^ self.flips;
        Ok(out)
    }

    pub fn inverse(&self) -> SignedPerm {
        let r = self.rank();
        let mut inv = SignedPerm::identity(r);
        for i in 0..r {
            inv.perm[self.perm[i] as usize] = i as u8;
        }
        inv.flips = map_mask(&inv.perm, r, self.flips);
        inv
    }

    /// `by ∘ self ∘ by⁻¹`.
    pub fn conjugate_by(&self, by: &SignedPerm) -> SignedPerm {
        *by * *self * by.inverse()
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(x: &SignedPerm, y: &SignedPerm) -> SignedPerm {
        *x * *y * x.inverse() * y.inverse()
    }

    /// Action on torus coordinates: `(v·t)_{π(i)} = ε_{π(i)} t_i`.
    pub fn apply(&self, t: &QzVector) -> QzVector {
        assert_eq!(t.len(), self.rank(), "rank mismatch");
        let mut out = t.clone().into_inner();
        for i in 0..self.rank() {
            let (j, s) = self.maps(i);
            out[j] = if s < 0 { -t[i] } else { t[i] };
        }
        QzVector::new(out)
    }

    /// Action on integer vectors (characters and cocharacters alike, since
    /// signed permutation matrices are orthogonal).
    pub fn apply_int(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.rank(), "rank mismatch");
        let mut out = vec![0; x.len()];
        for (i, &xi) in x.iter().enumerate() {
            let (j, s) = self.maps(i);
            out[j] = s * xi;
        }
        out
    }

    /// The `l×l` signed permutation matrix `M` with `M e_i = v(e_i)`.
    pub fn matrix(&self) -> crate::exactnum::IntMatrix {
        let r = self.rank();
        let mut m = crate::exactnum::IntMatrix::new(r, vec![0; r * r]);
        for i in 0..r {
            let (j, s) = self.maps(i);
            m.set(j, i, s);
        }
        m
    }
}

impl Mul for SignedPerm {
    type Output = SignedPerm;
    fn mul(self, rhs: SignedPerm) -> SignedPerm {
        self.compose(&rhs).expect("rank mismatch")
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All `2^l · l!` signed permutations, in a deterministic order.
pub fn all_signed_perms(rank: usize) -> Vec<SignedPerm> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..rank).collect();
    loop {
        for mask in 0..(1u16 << rank) {
            let flips: Vec<usize> = (0..rank).filter(|&j| mask >> j & 1 == 1).collect();
            out.push(SignedPerm::new(&p, &flips).expect("valid permutation"));
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

/// The Weyl group of type `D_l`: signed permutations with an even number of sign changes.
pub fn even_signed_perms(rank: usize) -> Vec<SignedPerm> {
    all_signed_perms(rank).into_iter().filter(SignedPerm::is_even).collect()
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<String> = (0..self.rank()).map(|i| (self.image(i) + 1).to_string()).collect();
        let flips: Vec<String> = self.flip_positions().iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "perm=[{}];flips={{{}}}", imgs.join(","), flips.join(","))
    }
}

impl fmt::Debug for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_list(s: &str, open: char, close: char) -> Result<Vec<usize>> {
    let inner = s
        .trim()
        .strip_prefix(open)
        .and_then(|r| r.strip_suffix(close))
        .ok_or_else(|| Error::Parse(format!("expected {open}...{close}, got {s:?}")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            let k: usize = x.trim().parse().map_err(|_| Error::Parse(format!("bad index {x:?}")))?;
            k.checked_sub(1).ok_or_else(|| Error::Parse("indices are 1-based".into()))
        })
        .collect()
}

fn parse_fields(s: &str) -> Result<(SignedPerm, Option<u32>)> {
    let mut perm = None;
    let mut flips = Vec::new();
    let mut a = None;
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, val) =
            part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        match key.trim() {
            "perm" => perm = Some(parse_list(val, '[', ']')?),
            "flips" => flips = parse_list(val, '{', '}')?,
            "a" => a = Some(val.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {val:?}")))?),
            other => return Err(Error::Parse(format!("unknown field {other:?}"))),
        }
    }
    let perm = perm.ok_or_else(|| Error::Parse("missing perm=[...]".into()))?;
    Ok((SignedPerm::new(&perm, &flips)?, a))
}

impl FromStr for SignedPerm {
    type Err = Error;

    /// Parses `perm=[3,1,2,4];flips={2,4}` (1-based images and positions).
    fn from_str(s: &str) -> Result<SignedPerm> {
        match parse_fields(s)? {
            (v, None) => Ok(v),
            (_, Some(_)) => Err(Error::Parse("unexpected a= field in a signed permutation".into())),
        }
    }
}

/// `(v, a)`: the composite of the signed permutation `v` with the `p^a`-power
/// Frobenius. On the torus it acts as `t ↦ p^a · v(t)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtElem {
    pub v: SignedPerm,
    pub a: u32,
}

impl ExtElem {
    pub fn new(v: SignedPerm, a: u32) -> ExtElem {
        ExtElem { v, a }
    }

    pub fn identity(rank: usize) -> ExtElem {
        ExtElem { v: SignedPerm::identity(rank), a: 0 }
    }

    /// The plain `p^a`-power Frobenius `(id, a)`.
    pub fn frobenius(rank: usize, a: u32) -> ExtElem {
        ExtElem { v: SignedPerm::identity(rank), a }
    }

    pub fn gamma(rank: usize) -> ExtElem {
        ExtElem { v: SignedPerm::gamma(rank), a: 0 }
    }

    pub fn rank(&self) -> usize {
        self.v.rank()
    }

    /// Parity of the graph-automorphism part.
    pub fn gamma_parity(&self) -> u8 {
        self.v.flip_parity()
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.v.is_identity()
    }

    pub fn compose(&self, other: &ExtElem) -> Result<ExtElem> {
        Ok(ExtElem { v: self.v.compose(&other.v)?, a: self.a + other.a })
    }

    /// `self^k`.
    pub fn power(&self, k: u32) -> ExtElem {
        (0..k).fold(ExtElem::identity(self.rank()), |acc, _| acc.compose(self).expect("same rank"))
    }

    /// Defined only when there is no Frobenius part.
    pub fn inverse(&self) -> Option<ExtElem> {
        (self.a == 0).then(|| ExtElem { v: self.v.inverse(), a: 0 })
    }

    /// Group commutator; the Frobenius parts cancel because `F_p` commutes
    /// with every signed permutation.
    pub fn commutator(x: &ExtElem, y: &ExtElem) -> Result<SignedPerm> {
        if x.rank() != y.rank() {
            return Err(Error::RankMismatch(x.rank(), y.rank()));
        }
        Ok(SignedPerm::commutator(&x.v, &y.v))
    }

    /// The signed-permutation automorphism induced on the Weyl group.
    pub fn conjugate(&self, w: &SignedPerm) -> SignedPerm {
        w.conjugate_by(&self.v)
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};a={}", self.v, self.a)
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExtElem> {
        let (v, a) = parse_fields(s)?;
        Ok(ExtElem { v, a: a.unwrap_or(0) })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(SignedPerm);
string_serde!(ExtElem);
