//! Exact arithmetic in the group of prime-to-`p` roots of unity, written
//! additively as `(ℚ/ℤ)_{p'}`, plus the small integer linear algebra needed to
//! change between torus coordinates.
//!
//! A root of unity of order `n` corresponds to a fraction `a/n` modulo 1, so
//! multiplication of torus coordinates becomes addition of [`Qz`] values and
//! the `p`-power Frobenius becomes multiplication by `p`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Index, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// `base^exp mod modulus`.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// An element of `ℚ/ℤ`, stored as the reduced fraction `num/den` with
/// `0 <= num < den`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Qz {
    num: u64,
    den: u64,
}

impl Qz {
    pub const ZERO: Qz = Qz { num: 0, den: 1 };
    pub const HALF: Qz = Qz { num: 1, den: 2 };

    /// Reduces `a/b` modulo 1. `b` must be nonzero; a negative `b` flips the sign.
    pub fn from_ratio(a: i128, b: i128) -> Qz {
        assert!(b != 0, "zero denominator");
        let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
        let r = a.rem_euclid(b) as u128;
        let b = b as u128;
        let g = gcd(r, b);
        let (num, den) = (r / g, b / g);
        Qz {
            num: u64::try_from(num).expect("numerator overflow"),
            den: u64::try_from(den).expect("denominator overflow"),
        }
    }

    /// The class of `a/b` modulo 1 without any characteristic check.
    pub fn new(a: i64, b: u64) -> Result<Qz> {
        if b == 0 {
            return Err(Error::Parse("denominator must be at least 1".into()));
        }
        Ok(Qz::from_ratio(a as i128, b as i128))
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Order of the element in `ℚ/ℤ`.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn check_coprime(&self, p: u64) -> Result<()> {
        if p > 1 && self.den.is_multiple_of(p) {
            Err(Error::DenominatorDivisibleByP { den: self.den, p })
        } else {
            Ok(())
        }
    }

    pub fn mul_int(self, k: i128) -> Qz {
        let d = self.den as i128;
        let k = k.rem_euclid(d);
        Qz::from_ratio((self.num as i128) * k % d, d)
    }

    /// Multiplication by `p^a`, the action of the `p^a`-power map.
    pub fn mul_pow(self, p: u64, a: u32) -> Qz {
        if self.num == 0 {
            return self;
        }
        let f = mod_pow(p, a as u64, self.den);
        Qz::from_ratio(((self.num as u128 * f as u128) % self.den as u128) as i128, self.den as i128)
    }

    /// Value as a rational number in `[0, 1)`, as `(num, den)` of type `i128`.
    pub fn as_i128_pair(&self) -> (i128, i128) {
        (self.num as i128, self.den as i128)
    }
}

/// `qz(a, b, p)`: the class of `a/b` with the requirement that its reduced
/// denominator is prime to `p`.
pub fn qz(a: i64, b: i64, p: u64) -> Result<Qz> {
    if b < 1 {
        return Err(Error::Parse(format!("denominator {b} must be at least 1")));
    }
    let x = Qz::new(a, b as u64)?;
    x.check_coprime(p)?;
    Ok(x)
}

impl Ord for Qz {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        l.cmp(&r)
    }
}

impl PartialOrd for Qz {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Qz {
    type Output = Qz;
    fn add(self, rhs: Qz) -> Qz {
        if self.den == rhs.den {
            let d = self.den as u128;
            let n = (self.num as u128 + rhs.num as u128) % d;
            return Qz::from_ratio(n as i128, d as i128);
        }
        let l = lcm(self.den as u128, rhs.den as u128);
        let n = (self.num as u128 * (l / self.den as u128) + rhs.num as u128 * (l / rhs.den as u128)) % l;
        Qz::from_ratio(n as i128, l as i128)
    }
}

impl AddAssign for Qz {
    fn add_assign(&mut self, rhs: Qz) {
        *self = *self + rhs;
    }
}

impl Neg for Qz {
    type Output = Qz;
    fn neg(self) -> Qz {
        if self.num == 0 {
            self
        } else {
            Qz { num: self.den - self.num, den: self.den }
        }
    }
}

impl Sub for Qz {
    type Output = Qz;
    fn sub(self, rhs: Qz) -> Qz {
        self + (-rhs)
    }
}

impl fmt::Display for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Qz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Qz> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a fraction: {s:?}"));
        match s.split_once('/') {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                Qz::new(a, b)
            }
            None => {
                let a: i64 = s.parse().map_err(|_| bad())?;
                Qz::new(a, 1)
            }
        }
    }
}

impl Serialize for Qz {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", self.num, self.den))
    }
}

impl<'de> Deserialize<'de> for Qz {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Qz, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A coordinate vector in `(ℚ/ℤ)^l`, ordered lexicographically by value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct QzVector(Vec<Qz>);

impl QzVector {
    pub fn new(coords: Vec<Qz>) -> QzVector {
        QzVector(coords)
    }

    pub fn zeros(l: usize) -> QzVector {
        QzVector(vec![Qz::ZERO; l])
    }

    /// The half-shift `(1/2, …, 1/2)`.
    pub fn half(l: usize) -> QzVector {
        QzVector(vec![Qz::HALF; l])
    }

    pub fn from_fractions(pairs: &[(i64, u64)]) -> Result<QzVector> {
        pairs.iter().map(|&(a, b)| Qz::new(a, b)).collect::<Result<Vec<_>>>().map(QzVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[Qz] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Qz> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Qz::is_zero)
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self) -> u64 {
        self.0.iter().fold(1u128, |acc, c| lcm(acc, c.den() as u128)) as u64
    }

    pub fn check_coprime(&self, p: u64) -> Result<()> {
        self.0.iter().try_for_each(|c| c.check_coprime(p))
    }

    pub fn mul_pow(&self, p: u64, a: u32) -> QzVector {
        QzVector(self.0.iter().map(|c| c.mul_pow(p, a)).collect())
    }

    pub fn mul_int(&self, k: i128) -> QzVector {
        QzVector(self.0.iter().map(|c| c.mul_int(k)).collect())
    }

    pub fn shifted_by_half(&self) -> QzVector {
        QzVector(self.0.iter().map(|&c| c + Qz::HALF).collect())
    }

    pub fn into_inner(self) -> Vec<Qz> {
        self.0
    }
}

impl Index<usize> for QzVector {
    type Output = Qz;
    fn index(&self, i: usize) -> &Qz {
        &self.0[i]
    }
}

impl Add for &QzVector {
    type Output = QzVector;
    fn add(self, rhs: &QzVector) -> QzVector {
        assert_eq!(self.len(), rhs.len(), "rank mismatch");
        QzVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &QzVector {
    type Output = QzVector;
    fn sub(self, rhs: &QzVector) -> QzVector {
        assert_eq!(self.len(), rhs.len(), "rank mismatch");
        QzVector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl Neg for &QzVector {
    type Output = QzVector;
    fn neg(self) -> QzVector {
        QzVector(self.0.iter().map(|&a| -a).collect())
    }
}

impl fmt::Display for QzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for QzVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<QzVector> {
        s.split(',').map(str::parse).collect::<Result<Vec<Qz>>>().map(QzVector)
    }
}

impl Serialize for QzVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QzVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<QzVector, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<i64>) -> IntMatrix {
        assert_eq!(entries.len(), n * n, "matrix must be square");
        IntMatrix { n, entries }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::new(n, vec![0; n * n]);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        IntMatrix::new(n, out)
    }

    /// Integer matrix applied to a vector of `ℚ/ℤ` coordinates.
    pub fn apply(&self, t: &QzVector) -> QzVector {
        assert_eq!(self.n, t.len());
        QzVector::new(
            (0..self.n)
                .map(|i| (0..self.n).fold(Qz::ZERO, |acc, j| acc + t[j].mul_int(self.get(i, j) as i128)))
                .collect(),
        )
    }

    pub fn det(&self) -> i128 {
        let rows: Vec<Vec<i128>> = (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) as i128).collect()).collect();
        det_bareiss(rows)
    }

    /// The adjugate matrix, so that `self * adj = det * Id`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.n;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i128>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| self.get(r, c) as i128).collect())
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                // adj[j][i] = cofactor(i, j)
                adj[j * n + i] = (sign * det_bareiss(minor)) as i64;
            }
        }
        IntMatrix::new(n, adj)
    }
}

fn det_bareiss(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// The coroot basis of `D_l` in the standard coordinates of the `SO_{2l}`
/// torus: columns `e_1−e_2, …, e_{l−1}−e_l, e_{l−1}+e_l`.
pub fn coroot_basis(l: usize) -> IntMatrix {
    assert!(l >= 2);
    let mut b = IntMatrix::new(l, vec![0; l * l]);
    for k in 0..l - 1 {
        b.set(k, k, 1);
        b.set(k + 1, k, -1);
    }
    b.set(l - 2, l - 1, 1);
    b.set(l - 1, l - 1, 1);
    b
}

/// Solves `B·u ≡ t (mod 1)` through the explicit inverse `B^{-1} = adj(B)/det(B)`.
#[derive(Clone, Debug)]
pub struct BasisSolver {
    basis: IntMatrix,
    adj: IntMatrix,
    det: i64,
    kernel: Option<QzVector>,
}

impl BasisSolver {
    pub fn new(basis: &IntMatrix) -> Result<BasisSolver> {
        let det = basis.det();
        if !matches!(det, -2 | -1 | 1 | 2) {
            return Err(Error::SingularBasis(det as i64));
        }
        let adj = basis.adjugate();
        let n = basis.size();
        // nonzero element of {u : B·u ≡ 0}, present when |det| = 2
        let kernel = (det.abs() == 2)
            .then(|| {
                (0..n)
                    .map(|k| QzVector::new((0..n).map(|i| Qz::from_ratio(adj.get(i, k) as i128, det)).collect()))
                    .find(|h| !h.is_zero())
            })
            .flatten();
        Ok(BasisSolver { basis: basis.clone(), adj, det: det as i64, kernel })
    }

    /// The nonzero element of the kernel of `u ↦ B·u` modulo 1, if any.
    pub fn kernel(&self) -> Option<&QzVector> {
        self.kernel.as_ref()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn adjugate(&self) -> &IntMatrix {
        &self.adj
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// `B^{-1}·t` for the rational vector `nums/den`, reduced modulo 1.
    pub fn solve_rational(&self, nums: &[i128], den: i128) -> QzVector {
        let n = self.basis.size();
        assert_eq!(nums.len(), n);
        QzVector::new(
            (0..n)
                .map(|i| {
                    let s: i128 = (0..n).map(|j| self.adj.get(i, j) as i128 * nums[j]).sum();
                    Qz::from_ratio(s, den * self.det as i128)
                })
                .collect(),
        )
    }

    /// The lexicographically least `u` with `B·u ≡ t`.
    pub fn solve(&self, t: &QzVector) -> Result<QzVector> {
        if t.len() != self.basis.size() {
            return Err(Error::RankMismatch(t.len(), self.basis.size()));
        }
        let den = t.denominator() as i128;
        let nums: Vec<i128> = t.iter().map(|c| c.num() as i128 * (den / c.den() as i128)).collect();
        let u = self.solve_rational(&nums, den);
        Ok(match &self.kernel {
            Some(h) => std::cmp::min(&u + h, u),
            None => u,
        })
    }
}

/// One-shot `solve_basis(B, t)`.
pub fn solve_basis(basis: &IntMatrix, t: &QzVector) -> Result<QzVector> {
    BasisSolver::new(basis)?.solve(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> QzVector {
        s.parse().unwrap()
    }

    #[test]
    fn qz_examples() {
        let h = qz(1, 2, 5).unwrap();
        assert_eq!(h + h, Qz::ZERO);
        assert_eq!(format!("{:?}", h + h), "0/1");
        assert_eq!(qz(1, 48, 5).unwrap().mul_int(5), qz(5, 48, 5).unwrap());
        assert_eq!(qz(1, 3, 3), Err(Error::DenominatorDivisibleByP { den: 3, p: 3 }));
        assert_eq!(qz(2, 6, 3), Err(Error::DenominatorDivisibleByP { den: 3, p: 3 }));
        // reduction happens before the check
        assert_eq!(qz(3, 6, 3).unwrap(), Qz::HALF);
        assert!(qz(1, 0, 5).is_err());
    }

    #[test]
    fn qz_negative_and_parse() {
        assert_eq!("-1/4".parse::<Qz>().unwrap(), "3/4".parse().unwrap());
        assert_eq!("7/4".parse::<Qz>().unwrap(), "3/4".parse().unwrap());
        assert_eq!("0".parse::<Qz>().unwrap(), Qz::ZERO);
        assert!("x/2".parse::<Qz>().is_err());
        assert_eq!(Qz::new(5, 48).unwrap().mul_pow(5, 2), Qz::new(125, 48).unwrap());
    }

    #[test]
    fn coroot_basis_has_det_two() {
        for l in 2..=8 {
            assert_eq!(coroot_basis(l).det(), 2, "l = {l}");
            let b = coroot_basis(l);
            let prod = b.mul(&b.adjugate());
            assert_eq!(prod, {
                let mut m = IntMatrix::identity(l);
                for i in 0..l {
                    m.set(i, i, 2);
                }
                m
            });
        }
    }

    #[test]
    fn solve_basis_examples() {
        let b = coroot_basis(4);
        assert_eq!(solve_basis(&b, &QzVector::zeros(4)).unwrap(), QzVector::zeros(4));
        assert_eq!(solve_basis(&b, &v("0,1/4,1/2,3/4")).unwrap(), v("0,1/4,0,3/4"));
        assert_eq!(solve_basis(&b, &v("1/2,1/2,1/2,1/2")).unwrap(), v("1/2,0,0,1/2"));
    }

    #[test]
    fn singular_basis_rejected() {
        let m = IntMatrix::new(2, vec![1, 1, 1, 1]);
        assert_eq!(solve_basis(&m, &QzVector::zeros(2)), Err(Error::SingularBasis(0)));
        let m = IntMatrix::new(2, vec![3, 0, 0, 1]);
        assert_eq!(solve_basis(&m, &QzVector::zeros(2)), Err(Error::SingularBasis(3)));
    }

    #[test]
    fn vector_roundtrip_display() {
        let t = v("0,1/4,1/2,3/4");
        assert_eq!(t.to_string(), "0,1/4,1/2,3/4");
        assert_eq!(t.denominator(), 4);
        assert_eq!(t.shifted_by_half(), v("1/2,3/4,0,1/4"));
    }
}
