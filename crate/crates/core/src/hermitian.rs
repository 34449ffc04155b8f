//! Sparse polynomial algebra in the conjugate pair (z, z̄), plus the
//! univariate holomorphic polynomials it is built from.
//!
//! A [`HermitianBipoly`] stores `sum c_ab z^a z̄^b`. When the hermitian
//! flag is set the coefficients satisfy `c_ab = conj(c_ba)` and the
//! polynomial is real-valued on the plane. Gram determinants of curve lifts
//! are assembled entirely in this ring, so the Plücker identities that relate
//! them hold up to coefficient rounding only.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Result, TodaError};

/// Relative tolerance for the imaginary residue of a real evaluation.
pub const REAL_EVAL_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Commutative ring operations needed by [`determinant`].
pub trait Ring: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Determinant of a square matrix over a commutative ring, by Laplace
/// expansion along rows with memoized column-subset minors.
pub fn determinant<T: Ring>(m: &[Vec<T>]) -> T {
    let k = m.len();
    if k == 0 {
        return T::one();
    }
    assert!(k <= 20, "determinant expansion limited to 20x20");
    let mut memo: HashMap<u32, T> = HashMap::new();
    minor(m, 0, (1u32 << k) - 1, &mut memo)
}

fn minor<T: Ring>(m: &[Vec<T>], row: usize, cols: u32, memo: &mut HashMap<u32, T>) -> T {
    if cols == 0 {
        return T::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let mut acc = T::zero();
    let mut sign_positive = true;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let sub = minor(m, row + 1, cols & !(1 << c), memo);
        let term = m[row][c].mul(&sub);
        acc = if sign_positive {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
        sign_positive = !sign_positive;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Univariate complex polynomial in z, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Complex64, degree: usize) -> Self {
        let mut coeffs = vec![ZERO; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree after discarding coefficients below `tol` times the largest one.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > tol * scale)
    }

    /// Drops leading coefficients of modulus at most `abs_tol`.
    pub fn trim_leading(&self, abs_tol: f64) -> Self {
        let keep = self.coeffs.iter().rposition(|c| c.norm() > abs_tol).map_or(0, |d| d + 1);
        Self::new(self.coeffs[..keep].to_vec())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(ZERO, |acc, c| acc * z + c)
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + other.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &other.scale(Complex64::new(-1.0, 0.0)))
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Polynomial `sum c_ab z^a z̄^b` with sparse complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HermitianBipoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
    hermitian: bool,
}

impl HermitianBipoly {
    /// The zero polynomial (hermitian).
    pub fn zero() -> Self {
        Self {
            coeffs: BTreeMap::new(),
            hermitian: true,
        }
    }

    pub fn one() -> Self {
        Self::real_constant(1.0)
    }

    pub fn real_constant(c: f64) -> Self {
        Self::from_terms([((0, 0), Complex64::new(c, 0.0))], true)
    }

    /// Builds a polynomial from `((a, b), c)` terms, summing repeats and
    /// dropping exact zeros. The flag is trusted; see [`Self::hermitian_defect`].
    pub fn from_terms<I>(terms: I, hermitian: bool) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c: &mut Complex64| !c.is_zero());
        Self { coeffs, hermitian }
    }

    /// The monomial `c z^a z̄^b`; flagged hermitian only when `a == b` and `c` is real.
    pub fn monomial(c: Complex64, a: u32, b: u32) -> Self {
        let hermitian = a == b && c.im == 0.0;
        Self::from_terms([((a, b), c)], hermitian)
    }

    /// `p(z) * conj(q(z))`. Hermitian whenever `p` and `q` are the same polynomial.
    pub fn holo_times_conj(p: &Poly, q: &Poly) -> Self {
        let terms = p.coeffs().iter().enumerate().flat_map(|(a, ca)| {
            q.coeffs()
                .iter()
                .enumerate()
                .map(move |(b, cb)| ((a as u32, b as u32), ca * cb.conj()))
        });
        Self::from_terms(terms, p == q)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.coeffs.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest total degree a + b present, or `None` when zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|(a, b)| a + b).max()
    }

    /// Largest |c_ab - conj(c_ba)| over all pairs.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(a, b), c)| (c - self.coeff(b, a).conj()).norm())
            .chain(
                self.coeffs
                    .keys()
                    .filter(|(a, b)| !self.coeffs.contains_key(&(*b, *a)))
                    .map(|&(a, b)| self.coeff(a, b).norm()),
            )
            .fold(0.0, f64::max)
    }

    /// Re-flags the polynomial as hermitian if its coefficients are
    /// conjugate-symmetric to within `tol` relative.
    pub fn with_hermitian_check(mut self, tol: f64) -> Self {
        self.hermitian = self.hermitian_defect() <= tol * self.max_abs_coeff().max(f64::MIN_POSITIVE);
        self
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let hermitian = self.hermitian && s.im == 0.0;
        Self::from_terms(self.coeffs.iter().map(|(&k, c)| (k, c * s)), hermitian)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Formal partial derivative in z.
    pub fn dz(&self) -> Self {
        Self::from_terms(
            self.coeffs
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|(&(a, b), c)| ((a - 1, b), c * a as f64)),
            false,
        )
    }

    /// Formal partial derivative in z̄.
    pub fn dzbar(&self) -> Self {
        Self::from_terms(
            self.coeffs
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|(&(a, b), c)| ((a, b - 1), c * b as f64)),
            false,
        )
    }

    /// Mixed derivative ∂z∂z̄; hermitian whenever `self` is.
    pub fn dz_dzbar(&self) -> Self {
        let mut out = self.dz().dzbar();
        out.hermitian = self.hermitian;
        out
    }

    /// The polynomial with conjugated coefficients and swapped exponents,
    /// i.e. the complex conjugate of `self` as a function of z.
    pub fn conj_swap(&self) -> Self {
        Self::from_terms(
            self.coeffs.iter().map(|(&(a, b), c)| ((b, a), c.conj())),
            self.hermitian,
        )
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_scale(z).0
    }

    /// Value together with `sum |c_ab| |z|^{a+b}`, the natural scale for
    /// judging rounding in the value.
    pub fn eval_with_scale(&self, z: Complex64) -> (Complex64, f64) {
        let (max_a, max_b) = self
            .coeffs
            .keys()
            .fold((0u32, 0u32), |(ma, mb), &(a, b)| (ma.max(a), mb.max(b)));
        let zp = powers(z, max_a as usize);
        let zbp = powers(z.conj(), max_b as usize);
        let r = z.norm();
        let mut value = ZERO;
        let mut scale = 0.0;
        for (&(a, b), c) in &self.coeffs {
            value += c * zp[a as usize] * zbp[b as usize];
            scale += c.norm() * r.powi((a + b) as i32);
        }
        (value, scale)
    }

    /// Real value at `z`; errors if the imaginary residue exceeds
    /// [`REAL_EVAL_TOL`] relative to the evaluation scale.
    pub fn eval_real(&self, z: Complex64) -> Result<f64> {
        let (v, scale) = self.eval_with_scale(z);
        if v.im.abs() > REAL_EVAL_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(TodaError::NotReal {
                residue: v.im.abs() / scale,
            });
        }
        Ok(v.re)
    }

    /// The polynomial `q(w, w̄) = p(z0 + w, z̄0 + w̄)`.
    pub fn shift(&self, z0: Complex64) -> Self {
        let mut out: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        let (max_a, max_b) = self
            .coeffs
            .keys()
            .fold((0u32, 0u32), |(ma, mb), &(a, b)| (ma.max(a), mb.max(b)));
        let binom = binomial_table(max_a.max(max_b) as usize);
        let zp = powers(z0, max_a as usize);
        let zbp = powers(z0.conj(), max_b as usize);
        for (&(a, b), c) in &self.coeffs {
            for i in 0..=a {
                let ca = c * binom[a as usize][i as usize] * zp[(a - i) as usize];
                for j in 0..=b {
                    let term = ca * binom[b as usize][j as usize] * zbp[(b - j) as usize];
                    *out.entry((i, j)).or_insert(ZERO) += term;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self {
            coeffs: out,
            hermitian: self.hermitian,
        }
    }

    /// Lowest total degree a + b among coefficients above `threshold` in modulus.
    pub fn lowest_total_degree(&self, threshold: f64) -> Option<u32> {
        self.coeffs
            .iter()
            .filter(|(_, c)| c.norm() > threshold)
            .map(|(&(a, b), _)| a + b)
            .min()
    }

    /// Largest coefficient difference against `other`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        Ring::sub(self, other).max_abs_coeff()
    }
}

fn powers(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        p.push(acc);
        acc *= z;
    }
    p
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1.0;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j < i { t[i - 1][j] } else { 0.0 };
        }
    }
    t
}

impl Ring for HermitianBipoly {
    fn zero() -> Self {
        HermitianBipoly::zero()
    }
    fn one() -> Self {
        HermitianBipoly::one()
    }
    fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            *coeffs.entry(*k).or_insert(ZERO) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self {
            coeffs,
            hermitian: self.hermitian && other.hermitian,
        }
    }
    fn sub(&self, other: &Self) -> Self {
        Ring::add(self, &other.scale_real(-1.0))
    }
    fn mul(&self, other: &Self) -> Self {
        let mut coeffs: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (&(a1, b1), c1) in &self.coeffs {
            for (&(a2, b2), c2) in &other.coeffs {
                *coeffs.entry((a1 + a2, b1 + b2)).or_insert(ZERO) += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Self {
            coeffs,
            hermitian: self.hermitian && other.hermitian,
        }
    }
}

impl Add for &HermitianBipoly {
    type Output = HermitianBipoly;
    fn add(self, rhs: Self) -> HermitianBipoly {
        Ring::add(self, rhs)
    }
}

impl Sub for &HermitianBipoly {
    type Output = HermitianBipoly;
    fn sub(self, rhs: Self) -> HermitianBipoly {
        Ring::sub(self, rhs)
    }
}

impl Mul for &HermitianBipoly {
    type Output = HermitianBipoly;
    fn mul(self, rhs: Self) -> HermitianBipoly {
        Ring::mul(self, rhs)
    }
}

impl Neg for &HermitianBipoly {
    type Output = HermitianBipoly;
    fn neg(self) -> HermitianBipoly {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_plus_zzbar() -> HermitianBipoly {
        HermitianBipoly::from_terms([((0, 0), c(1.0, 0.0)), ((1, 1), c(1.0, 0.0))], true)
    }

    #[test]
    fn binomial_square() {
        let p = one_plus_zzbar();
        let sq = &p * &p;
        let want = HermitianBipoly::from_terms(
            [
                ((0, 0), c(1.0, 0.0)),
                ((1, 1), c(2.0, 0.0)),
                ((2, 2), c(1.0, 0.0)),
            ],
            true,
        );
        assert_eq!(sq, want);
        assert!(sq.is_hermitian());
    }

    #[test]
    fn additive_identity() {
        let p = one_plus_zzbar();
        assert_eq!(&p + &HermitianBipoly::zero(), p);
    }

    #[test]
    fn z_times_zbar_is_hermitian() {
        let z = HermitianBipoly::monomial(c(1.0, 0.0), 1, 0);
        let zb = HermitianBipoly::monomial(c(1.0, 0.0), 0, 1);
        assert!(!z.is_hermitian());
        let prod = (&z * &zb).with_hermitian_check(0.0);
        assert_eq!(prod, HermitianBipoly::monomial(c(1.0, 0.0), 1, 1));
        assert!(prod.is_hermitian());
    }

    #[test]
    fn derivatives() {
        let p = one_plus_zzbar();
        assert_eq!(p.dz(), HermitianBipoly::monomial(c(1.0, 0.0), 0, 1));
        let q = HermitianBipoly::monomial(c(1.0, 0.0), 2, 2);
        let mixed = q.dz_dzbar();
        assert_eq!(mixed.coeff(1, 1), c(4.0, 0.0));
        assert_eq!(mixed.len(), 1);
        assert!(mixed.is_hermitian());
        let holo = HermitianBipoly::from_terms(
            [((3, 0), c(2.0, 1.0)), ((1, 0), c(0.5, 0.0))],
            false,
        );
        assert!(holo.dzbar().is_zero());
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(one_plus_zzbar().eval_real(c(1.0, 1.0)).unwrap(), 3.0);
        assert_eq!(HermitianBipoly::zero().eval(c(0.3, -2.0)), c(0.0, 0.0));
        let z_plus_zbar = HermitianBipoly::from_terms(
            [((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))],
            true,
        );
        assert_eq!(z_plus_zbar.eval(c(0.0, 1.0)), c(0.0, 0.0));
    }

    #[test]
    fn corrupted_hermitian_structure_detected() {
        let bad = HermitianBipoly::from_terms([((1, 0), c(1.0, 0.0))], true);
        assert!(matches!(
            bad.eval_real(c(0.0, 1.0)),
            Err(TodaError::NotReal { .. })
        ));
    }

    #[test]
    fn shift_and_order() {
        // (z - 1)(z̄ - 1) = |z - 1|^2 vanishes to order 2 at z0 = 1.
        let p = HermitianBipoly::from_terms(
            [
                ((1, 1), c(1.0, 0.0)),
                ((1, 0), c(-1.0, 0.0)),
                ((0, 1), c(-1.0, 0.0)),
                ((0, 0), c(1.0, 0.0)),
            ],
            true,
        );
        let s = p.shift(c(1.0, 0.0));
        assert_eq!(s.lowest_total_degree(1e-12), Some(2));
        assert_eq!(p.lowest_total_degree(1e-12), Some(0));
    }

    #[test]
    fn determinant_of_scalars() {
        let m = vec![
            vec![c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(4.0, 0.0)],
        ];
        // 2(12-1) - 1(4-0) = 18
        assert_eq!(determinant(&m), c(18.0, 0.0));
        assert_eq!(determinant::<Complex64>(&[]), c(1.0, 0.0));
    }

    fn arb_bipoly() -> impl Strategy<Value = HermitianBipoly> {
        proptest::collection::vec(((0u32..4, 0u32..4), (-2.0f64..2.0, -2.0f64..2.0)), 0..8)
            .prop_map(|terms| {
                HermitianBipoly::from_terms(
                    terms.into_iter().map(|(k, (re, im))| (k, c(re, im))),
                    false,
                )
            })
    }

    fn hermitize(p: &HermitianBipoly) -> HermitianBipoly {
        Ring::add(p, &p.conj_swap())
            .with_hermitian_check(1e-14)
    }

    proptest! {
        #[test]
        fn evaluation_is_a_homomorphism(p in arb_bipoly(), q in arb_bipoly(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let z = c(re, im);
            let (lhs, scale) = (&p * &q).eval_with_scale(z);
            let rhs = p.eval(z) * q.eval(z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + scale));
        }

        #[test]
        fn hermitian_closure(p in arb_bipoly(), q in arb_bipoly(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let (hp, hq) = (hermitize(&p), hermitize(&q));
            prop_assert!(hp.is_hermitian() && hq.is_hermitian());
            let sum = &hp + &hq;
            let prod = &hp * &hq;
            let lap = hp.dz_dzbar();
            prop_assert!(sum.is_hermitian() && prod.is_hermitian() && lap.is_hermitian());
            for poly in [&sum, &prod, &lap] {
                prop_assert!(poly.hermitian_defect() <= 1e-12 * (1.0 + poly.max_abs_coeff()));
                prop_assert!(poly.eval_real(c(re, im)).is_ok());
            }
        }

        #[test]
        fn conj_swap_evaluates_to_conjugate(p in arb_bipoly(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let z = c(re, im);
            let (v, scale) = p.eval_with_scale(z);
            let w = p.conj_swap().eval(z);
            prop_assert!((v.conj() - w).norm() <= 1e-12 * (1.0 + scale));
        }
    }
}
