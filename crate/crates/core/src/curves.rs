//! Rational curves in CP^N given by polynomial lifts, the linear group action
//! on them, and the ladder of Gram determinants of their osculating frames.
//!
//! Index convention: `h_k` is the squared norm of `v ∧ v' ∧ … ∧ v^{(k-1)}`
//! (k vectors), so `h_0 = 1` and `h_{N+1} = |W|^2` with `W` the Wronskian.
//! With this convention the Plücker relation
//! `h_k ∂∂̄h_k − ∂h_k ∂̄h_k = h_{k−1} h_{k+1}` holds for `k = 1..N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DegeneracyCertificate, Result, TodaError};
use crate::hermitian::{determinant, HermitianBipoly, Poly, Ring};

/// Relative threshold below which a Wronskian coefficient counts as zero.
pub const WRONSKIAN_TOL: f64 = 1e-10;
/// Leading coefficients of minors below this fraction of their natural
/// scale are treated as rounding residue.
pub const NUMERICAL_DEGREE_TOL: f64 = 1e-12;
/// Smallest admissible |det g| for a group element.
pub const SINGULAR_DET_TOL: f64 = 1e-10;
/// Minimum |det| accepted when drawing random group elements.
pub const RANDOM_GROUP_MIN_DET: f64 = 0.1;

/// A curve `z ↦ [p_0(z) : … : p_N(z)]` in CP^N.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalCurve {
    n: usize,
    components: Vec<Poly>,
}

impl RationalCurve {
    /// Validates that there are `n + 1` components, not all zero, with no
    /// common zero (the lift is reduced).
    pub fn new(n: usize, components: Vec<Poly>) -> Result<Self> {
        if n == 0 {
            return Err(TodaError::InvalidRank(n));
        }
        if components.len() != n + 1 {
            return Err(TodaError::DimensionMismatch {
                expected: n + 1,
                got: components.len(),
            });
        }
        if components.iter().all(Poly::is_zero) {
            return Err(TodaError::InvalidArgument(
                "all curve components are zero".into(),
            ));
        }
        let curve = Self { n, components };
        if let Some(z0) = curve.common_zero() {
            return Err(TodaError::InvalidArgument(format!(
                "components share a common zero at {} + {}i; the lift is not reduced",
                z0.re, z0.im
            )));
        }
        Ok(curve)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        self.components.iter().map(|p| p.eval(z)).collect()
    }

    /// A root of the lowest-degree nonzero component at which every
    /// component vanishes, if any.
    fn common_zero(&self) -> Option<Complex64> {
        let pivot = self
            .components
            .iter()
            .filter(|p| !p.is_zero())
            .min_by_key(|p| p.degree())?;
        roots(pivot).into_iter().find(|&z0| {
            self.components.iter().all(|p| {
                let scale: f64 = p
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * z0.norm().powi(k as i32))
                    .sum();
                p.eval(z0).norm() <= 1e-8 * scale.max(1.0)
            })
        })
    }

    /// `g · v`, acting on the column of components.
    pub fn apply_group(&self, g: &DMatrix<Complex64>) -> Result<Self> {
        let dim = self.n + 1;
        if g.nrows() != dim || g.ncols() != dim {
            return Err(TodaError::DimensionMismatch {
                expected: dim,
                got: g.nrows().max(g.ncols()),
            });
        }
        let det_abs = g.determinant().norm();
        if !(det_abs >= SINGULAR_DET_TOL) {
            return Err(TodaError::SingularGroupElement { det_abs });
        }
        let components = (0..dim)
            .map(|i| {
                (0..dim).fold(Poly::zero(), |acc, j| {
                    Ring::add(&acc, &self.components[j].scale(g[(i, j)]))
                })
            })
            .collect();
        RationalCurve::new(self.n, components)
    }

    fn scaled(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            components: self.components.iter().map(|p| p.scale(s)).collect(),
        }
    }

    /// Derivatives `p_m^{(a)}` for `a = 0..=order`, indexed `[a][m]`.
    fn derivative_table(&self, order: usize) -> Vec<Vec<Poly>> {
        let mut table = vec![self.components.clone()];
        for _ in 0..order {
            let next = table.last().unwrap().iter().map(Poly::derivative).collect();
            table.push(next);
        }
        table
    }

    /// `det(v, v', …, v^{(N)})`, with rounding-level leading terms removed.
    pub fn wronskian(&self) -> Poly {
        let table = self.derivative_table(self.n);
        determinant(&table).trim_leading(NUMERICAL_DEGREE_TOL * minor_scale(&table, self.n + 1))
    }

    fn degeneracy_certificate(&self, wronskian: &Poly) -> DegeneracyCertificate {
        let dim = self.n + 1;
        let width = self
            .components
            .iter()
            .map(|p| p.coeffs().len())
            .max()
            .unwrap_or(0)
            .max(dim);
        // Rows: coefficient index, columns: component.
        let mut coeffs = DMatrix::<Complex64>::zeros(width, dim);
        for (m, p) in self.components.iter().enumerate() {
            for (k, c) in p.coeffs().iter().enumerate() {
                coeffs[(k, m)] = *c;
            }
        }
        let svd = coeffs.svd(false, true);
        let sigma = &svd.singular_values;
        let smax = sigma.max();
        let rank = sigma.iter().filter(|s| **s > 1e-10 * smax).count();
        let (imin, _) = sigma
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, s)| if *s < best.1 { (i, *s) } else { best });
        let v_t = svd.v_t.expect("requested");
        let relation = (0..dim)
            .map(|m| {
                let c = v_t[(imin, m)].conj();
                [c.re, c.im]
            })
            .collect();
        DegeneracyCertificate {
            wronskian_max_coeff: wronskian.max_abs_coeff(),
            rank,
            relation,
        }
    }

    fn is_degenerate(&self, wronskian: &Poly) -> bool {
        // Scale: product over derivative orders of the largest coefficient.
        let table = self.derivative_table(self.n);
        let scale = minor_scale(&table, self.n + 1);
        wronskian.max_abs_coeff() <= WRONSKIAN_TOL * scale.max(f64::MIN_POSITIVE)
    }

    /// The `(N+1)`-dimensional Veronese curve with components `sqrt(C(n,k)) z^k`.
    pub fn veronese(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(TodaError::InvalidRank(n));
        }
        let components = (0..=n)
            .map(|k| Poly::monomial(Complex64::new(binomial(n, k).sqrt(), 0.0), k))
            .collect();
        RationalCurve::new(n, components)
    }

    /// Parses the JSON curve document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CurveDocument =
            serde_json::from_str(text).map_err(|e| TodaError::Parse(e.to_string()))?;
        doc.into_curve()
    }

    pub fn to_document(&self) -> CurveDocument {
        CurveDocument {
            n: self.n,
            components: self
                .components
                .iter()
                .map(|p| p.coeffs().iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }
}

/// Serialized form `{ "n": …, "components": [[[re, im], …], …] }`, with each
/// component's coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub n: usize,
    pub components: Vec<Vec<[f64; 2]>>,
}

impl CurveDocument {
    pub fn into_curve(self) -> Result<RationalCurve> {
        let components = self
            .components
            .into_iter()
            .map(|c| Poly::new(c.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()))
            .collect();
        RationalCurve::new(self.n, components)
    }
}

/// Parses a group matrix written as nested `[re, im]` arrays.
pub fn group_from_json(text: &str) -> Result<DMatrix<Complex64>> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_str(text).map_err(|e| TodaError::Parse(e.to_string()))?;
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(TodaError::Parse("group matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn group_to_json(g: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..g.nrows())
        .map(|i| (0..g.ncols()).map(|j| [g[(i, j)].re, g[(i, j)].im]).collect())
        .collect()
}

/// A seeded random element of GL(n+1, C) with entries uniform on [−1, 1]^2,
/// redrawn until |det| ≥ [`RANDOM_GROUP_MIN_DET`].
pub fn random_group(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = n + 1;
    loop {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        });
        if g.determinant().norm() >= RANDOM_GROUP_MIN_DET {
            return g;
        }
    }
}

/// Gram-determinant ladder `h_0, …, h_{N+1}` of a curve lift.
#[derive(Debug, Clone, PartialEq)]
pub struct GramLadder {
    curve: RationalCurve,
    h: Vec<HermitianBipoly>,
    wronskian: Poly,
    normalized: bool,
}

impl GramLadder {
    pub fn build(curve: &RationalCurve) -> Result<Self> {
        let n = curve.n();
        let wronskian = curve.wronskian();
        if curve.is_degenerate(&wronskian) {
            return Err(TodaError::DegenerateCurve(
                curve.degeneracy_certificate(&wronskian),
            ));
        }
        let table = curve.derivative_table(n);
        // Cauchy-Binet: h_k = Σ_I |det of rows 0..k, columns I|².
        let mut h = Vec::with_capacity(n + 2);
        h.push(HermitianBipoly::one());
        for k in 1..=n {
            let cutoff = NUMERICAL_DEGREE_TOL * minor_scale(&table, k);
            let hk = column_subsets(n + 1, k).iter().fold(HermitianBipoly::zero(), |acc, cols| {
                let minor: Vec<Vec<Poly>> = table[..k]
                    .iter()
                    .map(|row| cols.iter().map(|&m| row[m].clone()).collect())
                    .collect();
                let m = determinant(&minor).trim_leading(cutoff);
                Ring::add(&acc, &HermitianBipoly::holo_times_conj(&m, &m))
            });
            h.push(hk);
        }
        h.push(HermitianBipoly::holo_times_conj(&wronskian, &wronskian));
        Ok(Self {
            curve: curve.clone(),
            h,
            wronskian,
            normalized: false,
        })
    }

    /// Rescales the lift so that |W| = 1 and rebuilds the ladder.
    pub fn normalize(&self) -> Result<Self> {
        match self.wronskian.effective_degree(WRONSKIAN_TOL) {
            Some(0) => {}
            Some(degree) => return Err(TodaError::NormalizationUnavailable { degree }),
            None => {
                return Err(TodaError::DegenerateCurve(
                    self.curve.degeneracy_certificate(&self.wronskian),
                ))
            }
        }
        let w0 = self.wronskian.coeffs()[0].norm();
        let lambda = w0.powf(-1.0 / (self.curve.n() + 1) as f64);
        let rescaled = self.curve.scaled(Complex64::new(lambda, 0.0));
        let mut ladder = GramLadder::build(&rescaled)?;
        ladder.normalized = true;
        Ok(ladder)
    }

    pub fn n(&self) -> usize {
        self.curve.n()
    }

    pub fn curve(&self) -> &RationalCurve {
        &self.curve
    }

    /// `h_k` for `k = 0..=N+1`.
    pub fn h(&self, k: usize) -> &HermitianBipoly {
        &self.h[k]
    }

    pub fn ladder(&self) -> &[HermitianBipoly] {
        &self.h
    }

    pub fn wronskian(&self) -> &Poly {
        &self.wronskian
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Left side minus right side of the Plücker relation for `k`, as a
    /// bipolynomial, together with the coefficient scale of its terms.
    pub fn plucker_defect(&self, k: usize) -> (HermitianBipoly, f64) {
        assert!((1..=self.n()).contains(&k));
        let h = &self.h[k];
        let lhs = Ring::sub(&Ring::mul(h, &h.dz_dzbar()), &Ring::mul(&h.dz(), &h.dzbar()));
        let rhs = Ring::mul(&self.h[k - 1], &self.h[k + 1]);
        let scale = lhs.max_abs_coeff().max(rhs.max_abs_coeff());
        (Ring::sub(&lhs, &rhs), scale)
    }

    /// Fubini-Study pullback density `h_{k−1} h_{k+1} / h_k^2` of the k-th
    /// associated curve.
    pub fn associated_density(&self, k: usize, z: Complex64) -> Result<f64> {
        let num = self.h[k - 1].eval_real(z)? * self.h[k + 1].eval_real(z)?;
        let hk = self.h[k].eval_real(z)?;
        Ok(num / (hk * hk))
    }

    /// Vanishing order at `z0` of the density of the k-th associated curve,
    /// halved. Zero means unramified at `z0`.
    pub fn ramification_index(&self, k: usize, z0: Complex64) -> Result<u32> {
        if !(1..=self.n()).contains(&k) {
            return Err(TodaError::InvalidArgument(format!(
                "ramification index needs 1 <= k <= {}, got {k}",
                self.n()
            )));
        }
        let numerator = Ring::mul(&self.h[k - 1], &self.h[k + 1]);
        let top = vanishing_order(&numerator, z0);
        let bottom = vanishing_order(&self.h[k], z0);
        Ok(top.saturating_sub(2 * bottom) / 2)
    }
}

fn vanishing_order(p: &HermitianBipoly, z0: Complex64) -> u32 {
    let r = 1.0 + z0.norm();
    let scale: f64 = p
        .terms()
        .map(|(&(a, b), c)| c.norm() * r.powi((a + b) as i32))
        .sum();
    p.shift(z0)
        .lowest_total_degree(1e-9 * scale)
        .unwrap_or(0)
}

/// Natural size of a k×k minor of the derivative table: the product of the
/// largest coefficients of its first k rows.
fn minor_scale(table: &[Vec<Poly>], k: usize) -> f64 {
    table[..k]
        .iter()
        .map(|row| row.iter().map(Poly::max_abs_coeff).fold(0.0, f64::max))
        .product()
}

/// All increasing k-subsets of `0..n`.
fn column_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn walk(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for m in start..n {
            current.push(m);
            walk(m + 1, n, k, current, out);
            current.pop();
        }
    }
    walk(0, n, k, &mut current, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Roots of a univariate polynomial from its companion matrix.
fn roots(p: &Poly) -> Vec<Complex64> {
    let Some(d) = p.degree() else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let c = p.coeffs();
    let lead = c[d];
    let companion = DMatrix::from_fn(d, d, |i, j| {
        if i == 0 {
            -c[d - 1 - j] / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    companion
        .schur()
        .eigenvalues()
        .map(|e| e.iter().copied().collect())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> Poly {
        Poly::new(coeffs.iter().map(|&x| c(x, 0.0)).collect())
    }

    fn one_plus_zzbar() -> HermitianBipoly {
        HermitianBipoly::from_terms([((0, 0), c(1.0, 0.0)), ((1, 1), c(1.0, 0.0))], true)
    }

    fn assert_bipoly_close(a: &HermitianBipoly, b: &HermitianBipoly, tol: f64) {
        let d = a.max_coeff_diff(b);
        assert!(d <= tol, "coefficient difference {d:e} exceeds {tol:e}");
    }

    #[test]
    fn veronese_components() {
        let v1 = RationalCurve::veronese(1).unwrap();
        assert_eq!(v1.components(), &[poly(&[1.0]), poly(&[0.0, 1.0])]);
        assert_eq!(v1.eval(c(0.0, 0.0)), vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let v2 = RationalCurve::veronese(2).unwrap();
        assert_eq!(
            v2.components(),
            &[poly(&[1.0]), poly(&[0.0, 2f64.sqrt()]), poly(&[0.0, 0.0, 1.0])]
        );
    }

    #[test]
    fn group_action_examples() {
        let v1 = RationalCurve::veronese(1).unwrap();
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert_eq!(v1.apply_group(&id).unwrap(), v1);

        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(0.5, 0.0)]));
        let moved = v1.apply_group(&diag).unwrap();
        assert_eq!(moved.components(), &[poly(&[2.0]), poly(&[0.0, 0.5])]);

        let singular = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(
            v1.apply_group(&singular),
            Err(TodaError::SingularGroupElement { .. })
        ));
    }

    #[test]
    fn unitary_action_preserves_ladder_n1() {
        let v1 = RationalCurve::veronese(1).unwrap();
        let s = 0.5f64.sqrt();
        let u = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let a = GramLadder::build(&v1).unwrap();
        let b = GramLadder::build(&v1.apply_group(&u).unwrap()).unwrap();
        assert_bipoly_close(a.h(1), b.h(1), 1e-14);
    }

    #[test]
    fn ladder_veronese_one() {
        let l = GramLadder::build(&RationalCurve::veronese(1).unwrap()).unwrap();
        assert_eq!(l.h(0), &HermitianBipoly::one());
        assert_bipoly_close(l.h(1), &one_plus_zzbar(), 0.0);
        assert_eq!(l.wronskian(), &poly(&[1.0]));
        assert_bipoly_close(l.h(2), &HermitianBipoly::one(), 0.0);
    }

    #[test]
    fn ladder_veronese_two() {
        let l = GramLadder::build(&RationalCurve::veronese(2).unwrap()).unwrap();
        let sq = Ring::mul(&one_plus_zzbar(), &one_plus_zzbar());
        assert_bipoly_close(l.h(1), &sq, 1e-14);
        assert_bipoly_close(l.h(2), &sq.scale_real(2.0), 1e-14);
        assert_eq!(l.wronskian().coeffs().len(), 1);
        assert!((l.wronskian().coeffs()[0] - c(2.0 * 2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert_bipoly_close(l.h(3), &HermitianBipoly::real_constant(8.0), 1e-13);
    }

    #[test]
    fn ramified_wronskian() {
        let curve = RationalCurve::new(1, vec![poly(&[1.0]), poly(&[0.0, 0.0, 1.0])]).unwrap();
        let l = GramLadder::build(&curve).unwrap();
        assert_eq!(l.wronskian(), &poly(&[0.0, 2.0]));
        assert_eq!(
            l.normalize(),
            Err(TodaError::NormalizationUnavailable { degree: 1 })
        );
        assert_eq!(l.ramification_index(1, c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(l.ramification_index(1, c(0.5, 0.2)).unwrap(), 0);
    }

    #[test]
    fn normalization() {
        let l1 = GramLadder::build(&RationalCurve::veronese(1).unwrap()).unwrap();
        let n1 = l1.normalize().unwrap();
        assert!(n1.is_normalized());
        assert_bipoly_close(n1.h(1), l1.h(1), 1e-15);

        let l2 = GramLadder::build(&RationalCurve::veronese(2).unwrap()).unwrap();
        let n2 = l2.normalize().unwrap();
        let sq = Ring::mul(&one_plus_zzbar(), &one_plus_zzbar());
        assert_bipoly_close(n2.h(1), &sq.scale_real(0.5), 1e-14);
        assert!((n2.wronskian().coeffs()[0].norm() - 1.0).abs() < 1e-12);
        assert_bipoly_close(n2.h(3), &HermitianBipoly::one(), 1e-12);
    }

    #[test]
    fn veronese_unramified() {
        let l = GramLadder::build(&RationalCurve::veronese(2).unwrap()).unwrap();
        for z0 in [c(0.0, 0.0), c(1.0, -2.0), c(0.3, 0.4)] {
            for k in 1..=2 {
                assert_eq!(l.ramification_index(k, z0).unwrap(), 0);
            }
        }
        let moved = RationalCurve::veronese(1)
            .unwrap()
            .apply_group(&random_group(1, 7))
            .unwrap();
        let lm = GramLadder::build(&moved).unwrap();
        assert_eq!(lm.ramification_index(1, c(-0.7, 1.3)).unwrap(), 0);
    }

    #[test]
    fn degenerate_curve_has_certificate() {
        let p = poly(&[0.0, 1.0, 3.0]);
        let curve = RationalCurve::new(2, vec![poly(&[1.0]), p.clone(), p]).unwrap();
        match GramLadder::build(&curve) {
            Err(TodaError::DegenerateCurve(cert)) => {
                assert_eq!(cert.rank, 2);
                assert_eq!(cert.wronskian_max_coeff, 0.0);
                let r = &cert.relation;
                assert!(r[0][0].hypot(r[0][1]) < 1e-12);
                let (a, b) = (c(r[1][0], r[1][1]), c(r[2][0], r[2][1]));
                assert!((a + b).norm() < 1e-12 && a.norm() > 0.5);
            }
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn non_reduced_lift_rejected() {
        // Both components vanish at z = 1.
        let err = RationalCurve::new(1, vec![poly(&[-1.0, 1.0]), poly(&[0.0, -1.0, 1.0])]);
        assert!(matches!(err, Err(TodaError::InvalidArgument(_))));
    }

    #[test]
    fn gram_top_matches_wronskian() {
        // Cauchy-Binet: the full (N+1)-vector Gram determinant equals |W|^2.
        for n in 1..=3 {
            let curve = RationalCurve::veronese(n)
                .unwrap()
                .apply_group(&random_group(n, 11))
                .unwrap();
            let table = curve.derivative_table(n);
            let gram: Vec<Vec<HermitianBipoly>> = (0..=n)
                .map(|a| {
                    (0..=n)
                        .map(|b| {
                            (0..=n).fold(HermitianBipoly::zero(), |acc, m| {
                                Ring::add(&acc, &HermitianBipoly::holo_times_conj(&table[a][m], &table[b][m]))
                            })
                        })
                        .collect()
                })
                .collect();
            let full = determinant(&gram);
            let l = GramLadder::build(&curve).unwrap();
            let scale = l.h(n + 1).max_abs_coeff();
            assert!(full.max_coeff_diff(l.h(n + 1)) <= 1e-10 * scale);
        }
    }

    #[test]
    fn curve_document_round_trip() {
        let curve = RationalCurve::veronese(2).unwrap();
        let text = serde_json::to_string(&curve.to_document()).unwrap();
        assert_eq!(RationalCurve::from_json(&text).unwrap(), curve);
        assert!(matches!(
            RationalCurve::from_json("{\"n\": 1}"),
            Err(TodaError::Parse(_))
        ));
    }

    #[test]
    fn random_group_is_seeded_and_invertible() {
        let a = random_group(3, 42);
        assert_eq!(a, random_group(3, 42));
        assert_ne!(a, random_group(3, 43));
        assert!(a.determinant().norm() >= RANDOM_GROUP_MIN_DET);
    }
}
