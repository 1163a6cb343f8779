//! The natural representation of `SO_{2l}` over a finite field.
//!
//! The basis is indexed `(1, …, l, -l, …, -1)`, so the symmetric form `J` is
//! antidiagonal and signed permutations act by literal permutation matrices.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result, Verdict};
use crate::exactnum::{gcd, QzVector};
use crate::roots::{all_roots, Root};
use crate::torus::AdTorusElem;
use crate::weyl::{all_signed_perms, SignedPerm};

/// A field element, encoded by its coefficients in base `p` (constant term lowest).
pub type Fe = u64;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least `k ≥ 1` with `den | p^k - 1`.
pub fn split_degree(p: u64, den: u64) -> Result<u32> {
    if den == 0 || gcd(p as u128, den as u128) != 1 {
        return Err(Error::DenominatorDivisibleByP { den, p });
    }
    let mut x = p % den;
    let mut k = 1;
    while x != 1 % den {
        x = x * p % den;
        k += 1;
    }
    Ok(k)
}

// polynomials over GF(p) as coefficient vectors, constant term first

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = poly_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = crate::exactnum::mod_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        for code in 0..p.pow(d as u32) {
            let mut g: Vec<u64> = (0..d).map(|i| code / p.pow(i as u32) % p).collect();
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// `GF(p^k)` with the least irreducible modulus and least primitive element,
/// both in the base-`p` encoding.
#[derive(Clone, Debug)]
pub struct GaloisField {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: Fe,
}

impl GaloisField {
    pub fn new(p: u64, k: u32) -> Result<GaloisField> {
        if !is_prime(p) || p == 2 {
            return Err(Error::Config(format!("{p} is not an odd prime")));
        }
        if k == 0 || p.checked_pow(k).is_none_or(|q| q > 1 << 20) {
            return Err(Error::Config(format!("unsupported extension degree {k}")));
        }
        let q = p.pow(k);
        let modulus = (0..q)
            .map(|code| {
                let mut f: Vec<u64> = (0..k).map(|i| code / p.pow(i) % p).collect();
                f.push(1);
                f
            })
            .find(|f| poly_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        let mut field = GaloisField { p, k, q, modulus, generator: 0 };
        let factors = prime_factors(q - 1);
        field.generator = (1..q)
            .find(|&g| factors.iter().all(|r| field.pow(g, (q - 1) / r) != 1))
            .expect("the multiplicative group is cyclic");
        Ok(field)
    }

    /// Parses a prime power `q`.
    pub fn from_q(q: u64) -> Result<GaloisField> {
        let p = *prime_factors(q).first().ok_or_else(|| Error::Config(format!("{q} is not a prime power")))?;
        let mut k = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            k += 1;
        }
        if r != 1 {
            return Err(Error::Config(format!("{q} is not a prime power")));
        }
        GaloisField::new(p, k)
    }

    /// The smallest field of characteristic `p` containing the `den`-th roots of unity.
    pub fn splitting(p: u64, den: u64) -> Result<GaloisField> {
        GaloisField::new(p, split_degree(p, den)?)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Fe {
        self.generator
    }

    fn digits(&self, e: Fe) -> Vec<u64> {
        (0..self.k).map(|i| e / self.p.pow(i) % self.p).collect()
    }

    fn encode(&self, d: &[u64]) -> Fe {
        d.iter().rev().fold(0, |acc, c| acc * self.p + c)
    }

    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let (da, db) = (self.digits(a), self.digits(b));
        self.encode(&da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: Fe) -> Fe {
        self.encode(&self.digits(a).iter().map(|x| (self.p - x) % self.p).collect::<Vec<_>>())
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            return a * b % self.p;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k as usize, 0);
        self.encode(&r)
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let (mut base, mut acc) = (a, 1);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Fe {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.q - 2)
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p)
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Fe {
        rng.gen_range(0..self.q)
    }

    /// `c0+c1*x+c2*x^2`, dropping zero terms.
    pub fn format(&self, a: Fe) -> String {
        let terms: Vec<String> = self
            .digits(a)
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// A square matrix over a [`GaloisField`], row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FMat {
    n: usize,
    e: Vec<Fe>,
}

impl FMat {
    pub fn zero(n: usize) -> FMat {
        FMat { n, e: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> FMat {
        let mut m = FMat::zero(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.e[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> FMat {
        let mut m = FMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0))
    }
}

/// `SO_{2l}(GF(q))` in the natural representation.
#[derive(Clone, Debug)]
pub struct MatrixModel {
    field: GaloisField,
    l: usize,
}

impl MatrixModel {
    pub fn new(l: usize, field: GaloisField) -> MatrixModel {
        MatrixModel { field, l }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        2 * self.l
    }

    /// Row/column of the signed index `±i` (1-based).
    pub fn position(&self, signed: i64) -> usize {
        if signed > 0 {
            signed as usize - 1
        } else {
            (2 * self.l as i64 + signed) as usize
        }
    }

    pub fn j_form(&self) -> FMat {
        let n = self.dim();
        let mut m = FMat::zero(n);
        for i in 0..n {
            m.set(i, n - 1 - i, 1);
        }
        m
    }

    pub fn mul(&self, a: &FMat, b: &FMat) -> FMat {
        let n = a.n;
        let f = &self.field;
        let mut m = FMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = a.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let y = b.get(k, j);
                    if y != 0 {
                        m.set(i, j, f.add(m.get(i, j), f.mul(x, y)));
                    }
                }
            }
        }
        m
    }

    pub fn neg(&self, a: &FMat) -> FMat {
        FMat { n: a.n, e: a.e.iter().map(|x| self.field.neg(*x)).collect() }
    }

    /// Entrywise `x ↦ x^p`.
    pub fn frobenius(&self, a: &FMat) -> FMat {
        FMat { n: a.n, e: a.e.iter().map(|x| self.field.frobenius(*x)).collect() }
    }

    pub fn is_orthogonal(&self, m: &FMat) -> bool {
        let j = self.j_form();
        self.mul(&self.mul(&m.transpose(), &j), m) == j
    }

    /// Inverse of an orthogonal matrix: `J·ᵗM·J`.
    pub fn orth_inverse(&self, m: &FMat) -> FMat {
        let j = self.j_form();
        self.mul(&self.mul(&j, &m.transpose()), &j)
    }

    pub fn conjugate(&self, by: &FMat, m: &FMat) -> FMat {
        self.mul(&self.mul(by, m), &self.orth_inverse(by))
    }

    pub fn det(&self, m: &FMat) -> Fe {
        let f = &self.field;
        let n = m.n;
        let mut a = m.clone();
        let mut det = 1;
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| a.get(r, c) != 0) else {
                return 0;
            };
            if r != c {
                for j in 0..n {
                    let t = a.get(r, j);
                    a.set(r, j, a.get(c, j));
                    a.set(c, j, t);
                }
                det = f.neg(det);
            }
            let piv = a.get(c, c);
            det = f.mul(det, piv);
            let piv_inv = f.inv(piv);
            for r in c + 1..n {
                let factor = f.mul(a.get(r, c), piv_inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    a.set(r, j, f.sub(a.get(r, j), f.mul(factor, a.get(c, j))));
                }
            }
        }
        det
    }

    /// Permutation matrix of `v`, acting on signed indices by `v(-i) = -v(i)`.
    pub fn perm_matrix(&self, v: &SignedPerm) -> FMat {
        assert_eq!(v.rank(), self.l);
        let mut m = FMat::zero(self.dim());
        for i in 0..self.l {
            let (j, s) = v.maps(i);
            let (src, dst) = ((i + 1) as i64, s * (j + 1) as i64);
            m.set(self.position(dst), self.position(src), 1);
            m.set(self.position(-dst), self.position(-src), 1);
        }
        m
    }

    /// `diag(g^{e_1}, …, g^{e_l}, g^{-e_l}, …, g^{-e_1})` with `e_i = num_i·(q-1)/den_i`.
    pub fn torus_matrix(&self, t: &QzVector) -> Result<FMat> {
        assert_eq!(t.len(), self.l);
        let f = &self.field;
        let q1 = f.order() - 1;
        let mut m = FMat::identity(self.dim());
        for (i, c) in t.iter().enumerate() {
            if !q1.is_multiple_of(c.den()) {
                return Err(Error::DenominatorNotSplit {
                    den: c.den(),
                    p: f.p(),
                    k: f.k(),
                    suggested: split_degree(f.p(), c.den())?,
                });
            }
            let e = c.num() * (q1 / c.den());
            let x = f.pow(f.generator(), e);
            let idx = (i + 1) as i64;
            m.set(self.position(idx), self.position(idx), x);
            m.set(self.position(-idx), self.position(-idx), f.inv(x));
        }
        Ok(m)
    }

    /// Signed indices `(A, B)` with `α = e_A - e_B`.
    fn root_indices(&self, alpha: &Root) -> (i64, i64) {
        let (i, j) = alpha.support();
        let (si, sj) = alpha.signs();
        (si * (i + 1) as i64, -sj * (j + 1) as i64)
    }

    /// `x_α(s) = Id + s(E_{A,B} - E_{-B,-A})` for `α = e_A - e_B`.
    pub fn root_subgroup(&self, alpha: &Root, s: Fe) -> FMat {
        let (a, b) = self.root_indices(alpha);
        let mut m = FMat::identity(self.dim());
        m.set(self.position(a), self.position(b), s);
        m.set(self.position(-b), self.position(-a), self.field.neg(s));
        m
    }

    /// `α(T)` for a diagonal torus matrix.
    pub fn root_value(&self, alpha: &Root, t: &FMat) -> Fe {
        let (a, b) = self.root_indices(alpha);
        let f = &self.field;
        f.mul(t.get(self.position(a), self.position(a)), f.inv(t.get(self.position(b), self.position(b))))
    }

    pub fn random_torus_vector<R: Rng>(&self, rng: &mut R) -> QzVector {
        let q1 = self.field.order() - 1;
        QzVector::new(
            (0..self.l).map(|_| crate::exactnum::Qz::from_ratio(rng.gen_range(0..q1) as i128, q1 as i128)).collect(),
        )
    }

    /// Row-major entries as strings.
    pub fn format(&self, m: &FMat) -> Vec<Vec<String>> {
        (0..m.n).map(|i| (0..m.n).map(|j| self.field.format(m.get(i, j))).collect()).collect()
    }
}

/// Simple roots `e_1-e_2, …, e_{l-1}-e_l, e_{l-1}+e_l`.
pub fn simple_roots(l: usize) -> Vec<Root> {
    let mut out: Vec<Root> = (0..l - 1).map(|i| Root::new(l, i, 1, i + 1, -1)).collect();
    out.push(Root::new(l, l - 2, 1, l - 1, 1));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub rank: usize,
    pub q: u64,
    pub w_order: usize,
    pub samples: usize,
    pub checks: BTreeMap<&'static str, bool>,
    pub verdict: Verdict,
}

fn check_rank(l: usize) -> Result<()> {
    if !(4..=6).contains(&l) {
        return Err(Error::Config(format!("matrix checks need rank 4..=6, got {l}")));
    }
    Ok(())
}

/// The signed permutation matrices: a complement to the diagonal torus in its
/// normalizer, with the odd ones outside `SO`.
pub fn verify_prop21(l: usize, q: u64, seed: u64) -> Result<MatrixReport> {
    check_rank(l)?;
    let model = MatrixModel::new(l, GaloisField::from_q(q)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms = all_signed_perms(l);
    let mats: Vec<FMat> = perms.iter().map(|v| model.perm_matrix(v)).collect();
    let one = 1;
    let minus_one = model.field.neg(1);
    let dets: Vec<Fe> = mats.iter().map(|m| model.det(m)).collect();
    let w_bar: Vec<&FMat> = mats.iter().zip(&dets).filter(|(_, d)| **d == one).map(|(m, _)| m).collect();
    let distinct: HashSet<&FMat> = mats.iter().collect();
    let id = FMat::identity(model.dim());
    let samples = 3;
    let tori: Vec<FMat> =
        (0..samples).map(|_| model.torus_matrix(&model.random_torus_vector(&mut rng))).collect::<Result<_>>()?;
    let paired = |m: &FMat| {
        m.is_diagonal()
            && (1..=l as i64).all(|i| {
                let (a, b) = (model.position(i), model.position(-i));
                model.field.mul(m.get(a, a), m.get(b, b)) == 1
            })
    };

    let mut checks = BTreeMap::new();
    checks.insert("orthogonal", mats.iter().all(|m| model.is_orthogonal(m)));
    checks.insert("distinct", distinct.len() == perms.len());
    checks.insert(
        "special_iff_even",
        perms.iter().zip(&dets).all(|(v, d)| if v.is_even() { *d == one } else { *d == minus_one }),
    );
    checks.insert("order", w_bar.len() == crate::rational::weyl_complement_order(l) as usize);
    checks.insert("meets_torus_trivially", w_bar.iter().all(|m| !m.is_diagonal() || **m == id));
    checks.insert("normalizes_torus", w_bar.iter().all(|w| tori.iter().all(|t| paired(&model.conjugate(w, t)))));
    checks.insert("fixed_by_frobenius", mats.iter().all(|m| model.frobenius(m) == *m));
    checks.insert("minus_identity_not_a_permutation", !distinct.contains(&model.neg(&id)));
    Ok(MatrixReport {
        rank: l,
        q,
        w_order: w_bar.len(),
        samples,
        verdict: Verdict::from_checks(checks.values()),
        checks,
    })
}

/// Conjugation by the matrix of the transposition `(l, -l)` on root subgroups.
pub fn verify_graph_auto(l: usize, q: u64, samples: usize, seed: u64) -> Result<MatrixReport> {
    check_rank(l)?;
    let model = MatrixModel::new(l, GaloisField::from_q(q)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = SignedPerm::gamma(l);
    let p = model.perm_matrix(&gamma);
    let simple = simple_roots(l);
    let values: Vec<Fe> = (0..samples).map(|_| model.field.random(&mut rng)).collect();
    let conj = |m: &FMat| model.conjugate(&p, m);

    let mut fixed = true;
    let mut swapped = true;
    let mut involution = true;
    for &s in &values {
        for (i, alpha) in simple.iter().enumerate() {
            let x = model.root_subgroup(alpha, s);
            let image = conj(&x);
            if i < l - 2 {
                fixed &= image == x;
            } else {
                let other = &simple[if i == l - 2 { l - 1 } else { l - 2 }];
                swapped &= image == model.root_subgroup(other, s);
            }
            involution &= conj(&image) == x;
        }
    }
    let positive: Vec<Root> = all_roots(l).into_iter().filter(Root::is_positive).collect();
    let preserved = values.iter().take(3).all(|&s| {
        positive.iter().all(|alpha| {
            let image = alpha.apply(&gamma);
            image.is_positive() && conj(&model.root_subgroup(alpha, s)) == model.root_subgroup(&image, s)
        })
    });
    let mut checks = BTreeMap::new();
    checks.insert("fixes_first_simple_roots", fixed);
    checks.insert("swaps_last_two_simple_roots", swapped);
    checks.insert("preserves_positive_root_groups", preserved);
    checks.insert("involution", involution);
    Ok(MatrixReport { rank: l, q, w_order: 2, samples, verdict: Verdict::from_checks(checks.values()), checks })
}

/// Whether conjugating the torus matrix of `x` by the matrix of `v` gives the
/// torus matrix of `v·x`, up to the sign `±Id` lost in the adjoint quotient.
pub fn crosscheck_action(model: &MatrixModel, x: &AdTorusElem, v: &SignedPerm) -> Result<bool> {
    let t = model.torus_matrix(x.vector())?;
    let moved = AdTorusElem::from_vector(v.apply(x.vector()));
    let expected = model.torus_matrix(moved.vector())?;
    let got = model.conjugate(&model.perm_matrix(v), &t);
    Ok(got == expected || got == model.neg(&expected))
}
