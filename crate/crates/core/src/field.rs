//! Toda solutions as evaluatable fields.
//!
//! Every field exposes, at a point z, the values `u_i`, the holomorphic
//! derivatives `∂z u_i`, the second derivatives `∂z∂z u_i`, and the
//! Laplacians `Δu_i = 4 ∂z∂z̄ u_i`, for `i = 0..N` (zero-based). Ladder
//! fields compute all of these from exact bipolynomial derivatives; the
//! closed-form and derived fields use analytic formulas and the chain rule.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanData, GammaVector};
use crate::curves::GramLadder;
use crate::error::{Result, TodaError};
use crate::hermitian::{HermitianBipoly, Ring};

/// Number of equispaced samples used for circle averages.
pub const CIRCLE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Domain {
    Plane,
    PuncturedPlane,
    PuncturedDisk { r_max: f64 },
    Annulus { r_min: f64, r_max: f64 },
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        if !r.is_finite() {
            return false;
        }
        match *self {
            Domain::Plane => true,
            Domain::PuncturedPlane => r > 0.0,
            Domain::PuncturedDisk { r_max } => r > 0.0 && r < r_max,
            Domain::Annulus { r_min, r_max } => r > r_min && r < r_max,
        }
    }

    pub fn is_punctured(&self) -> bool {
        !matches!(self, Domain::Plane)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    Ladder,
    ClosedFormSingular { m: u32 },
    Inverted { parent: Box<Provenance> },
    Perturbed { parent: Box<Provenance>, amplitude: f64 },
    Constant,
}

/// Values and derivatives of all components at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldJet {
    pub u: Vec<f64>,
    pub du: Vec<Complex64>,
    pub d2u: Vec<Complex64>,
    pub laplacian: Vec<f64>,
}

pub trait SolutionField: Send + Sync {
    fn n(&self) -> usize;
    fn domain(&self) -> Domain;
    fn provenance(&self) -> Provenance;

    /// Full jet at `z`; errors outside the domain.
    fn jet(&self, z: Complex64) -> Result<FieldJet>;

    /// Values only.
    fn values(&self, z: Complex64) -> Result<Vec<f64>> {
        Ok(self.jet(z)?.u)
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        if self.domain().contains(z) {
            Ok(())
        } else {
            Err(TodaError::SingularPoint { re: z.re, im: z.im })
        }
    }
}

fn check_index(f: &dyn SolutionField, i: usize) -> Result<()> {
    if i < f.n() {
        Ok(())
    } else {
        Err(TodaError::InvalidArgument(format!(
            "component index {i} out of range for N = {}",
            f.n()
        )))
    }
}

fn check_cartan(f: &dyn SolutionField, c: &CartanData) -> Result<()> {
    if f.n() == c.n() {
        Ok(())
    } else {
        Err(TodaError::DimensionMismatch {
            expected: f.n(),
            got: c.n(),
        })
    }
}

/// Per-component polynomial data for a ladder field.
#[derive(Debug, Clone)]
struct LadderTerm {
    h: HermitianBipoly,
    hz: HermitianBipoly,
    /// h ∂∂̄h − ∂h ∂̄h, so that ∂∂̄ log h = mixed / h².
    mixed: HermitianBipoly,
    /// h ∂²h − (∂h)², so that ∂² log h = hess / h².
    hess: HermitianBipoly,
}

/// `u_i = log 2 − Σ_j a_ij log h_j` built from a normalized Gram ladder.
///
/// For a ramified curve whose Wronskian is `c z^k` the same formula, with
/// the boundary term `log h_{N+1} = log |W|²` added to `u_N`, gives a
/// solution on the punctured plane with a singularity at the origin; see
/// [`LadderField::ramified`].
#[derive(Debug, Clone)]
pub struct LadderField {
    cartan: CartanData,
    terms: Vec<LadderTerm>,
    /// `log |W|²` as `(log |c|², k)` with `|W|² = |c|² |z|^{2k}`; zero for normalized ladders.
    boundary: Option<(f64, u32)>,
}

impl LadderField {
    pub fn new(ladder: &GramLadder, cartan: &CartanData) -> Result<Self> {
        if !ladder.is_normalized() {
            return Err(TodaError::NotNormalized);
        }
        Self::build(ladder, cartan, None)
    }

    /// Field of a curve whose Wronskian vanishes only at the origin.
    pub fn ramified(ladder: &GramLadder, cartan: &CartanData) -> Result<Self> {
        let w = ladder.wronskian();
        let scale = w.max_abs_coeff();
        let support: Vec<usize> = w
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-12 * scale)
            .map(|(k, _)| k)
            .collect();
        let &[k] = support.as_slice() else {
            return Err(TodaError::InvalidArgument(
                "ramified field needs a monomial Wronskian c z^k".into(),
            ));
        };
        let log_c = w.coeffs()[k].norm_sqr().ln();
        Self::build(ladder, cartan, Some((log_c, k as u32)))
    }

    fn build(ladder: &GramLadder, cartan: &CartanData, boundary: Option<(f64, u32)>) -> Result<Self> {
        if ladder.n() != cartan.n() {
            return Err(TodaError::DimensionMismatch {
                expected: ladder.n(),
                got: cartan.n(),
            });
        }
        let terms = (1..=ladder.n())
            .map(|k| {
                let h = ladder.h(k).clone();
                let hz = h.dz();
                let hzb = h.dzbar();
                let hzz = hz.dz();
                let mixed = Ring::sub(&Ring::mul(&h, &h.dz_dzbar()), &Ring::mul(&hz, &hzb))
                    .with_hermitian_check(1e-12);
                let hess = Ring::sub(&Ring::mul(&h, &hzz), &Ring::mul(&hz, &hz));
                LadderTerm { h, hz, mixed, hess }
            })
            .collect();
        Ok(Self {
            cartan: cartan.clone(),
            terms,
            boundary,
        })
    }

    fn boundary_value(&self, z: Complex64) -> f64 {
        self.boundary
            .map_or(0.0, |(log_c, k)| log_c + k as f64 * z.norm_sqr().ln())
    }

    fn log_h(&self, z: Complex64) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| {
                let h = t.h.eval_real(z)?;
                if h > 0.0 && h.is_finite() {
                    Ok(h.ln())
                } else {
                    Err(TodaError::SingularPoint { re: z.re, im: z.im })
                }
            })
            .collect()
    }

    fn combine<T>(&self, per_j: &[T], i: usize) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Default,
    {
        (0..per_j.len()).fold(T::default(), |acc, j| acc + per_j[j] * self.cartan.entry(i, j))
    }
}

impl SolutionField for LadderField {
    fn n(&self) -> usize {
        self.terms.len()
    }

    fn domain(&self) -> Domain {
        match self.boundary {
            Some((_, k)) if k > 0 => Domain::PuncturedPlane,
            _ => Domain::Plane,
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::Ladder
    }

    fn values(&self, z: Complex64) -> Result<Vec<f64>> {
        self.check_point(z)?;
        let log_h = self.log_h(z)?;
        let mut u: Vec<f64> = (0..self.n())
            .map(|i| std::f64::consts::LN_2 - self.combine(&log_h, i))
            .collect();
        *u.last_mut().expect("n >= 1") += self.boundary_value(z);
        Ok(u)
    }

    fn jet(&self, z: Complex64) -> Result<FieldJet> {
        self.check_point(z)?;
        let n = self.n();
        let mut log_h = Vec::with_capacity(n);
        let mut dlog = Vec::with_capacity(n);
        let mut mixed = Vec::with_capacity(n);
        let mut hess = Vec::with_capacity(n);
        for t in &self.terms {
            let h = t.h.eval_real(z)?;
            if !(h > 0.0 && h.is_finite()) {
                return Err(TodaError::SingularPoint { re: z.re, im: z.im });
            }
            log_h.push(h.ln());
            dlog.push(t.hz.eval(z) / h);
            mixed.push(t.mixed.eval_real(z)? / (h * h));
            hess.push(t.hess.eval(z) / (h * h));
        }
        let mut jet = FieldJet {
            u: (0..n)
                .map(|i| std::f64::consts::LN_2 - self.combine(&log_h, i))
                .collect(),
            du: (0..n).map(|i| -self.combine(&dlog, i)).collect(),
            d2u: (0..n).map(|i| -self.combine(&hess, i)).collect(),
            laplacian: (0..n).map(|i| -4.0 * self.combine(&mixed, i)).collect(),
        };
        if let Some((_, k)) = self.boundary {
            // log|z|^{2k} is harmonic with ∂z = k/z.
            let k = k as f64;
            jet.u[n - 1] += self.boundary_value(z);
            jet.du[n - 1] += k / z;
            jet.d2u[n - 1] -= k / (z * z);
        }
        Ok(jet)
    }
}

/// The N = 1 family `u = log(2m²) + (2m−2) log|z| − 2 log(1 + |z|^{2m})`,
/// coming from the map z ↦ z^m. Singular at the origin with
/// exponent `μ = 2 − 2m` unless `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularLiouville {
    m: u32,
}

impl SingularLiouville {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(TodaError::InvalidArgument("singular family needs m >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Singularity exponent μ with `u = −μ log|z| + O(1)` near 0.
    pub fn mu(&self) -> f64 {
        2.0 - 2.0 * self.m as f64
    }
}

impl SolutionField for SingularLiouville {
    fn n(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        if self.m == 1 {
            Domain::Plane
        } else {
            Domain::PuncturedPlane
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedFormSingular { m: self.m }
    }

    fn jet(&self, z: Complex64) -> Result<FieldJet> {
        self.check_point(z)?;
        let m = self.m as i32;
        let mf = m as f64;
        let r2 = z.norm_sqr();
        let t = r2.powi(m);
        let zb = z.conj();
        let u = (2.0 * mf * mf).ln() + (mf - 1.0) * r2.ln() - 2.0 * (1.0 + t).ln();
        let u = if m == 1 { 2f64.ln() - 2.0 * (1.0 + t).ln() } else { u };
        // ∂z u = (m−1)/z − 2m z^{m−1} z̄^m / (1 + t)
        let mut du = -2.0 * mf * z.powi(m - 1) * zb.powi(m) / (1.0 + t);
        // ∂z∂z u = −(m−1)/z² − 2m[(m−1) z^{m−2} z̄^m/(1+t) − m z^{2m−2} z̄^{2m}/(1+t)²]
        let mut d2u = 2.0 * mf * mf * z.powi(2 * m - 2) * zb.powi(2 * m) / ((1.0 + t) * (1.0 + t));
        if m > 1 {
            du += (mf - 1.0) / z;
            d2u -= (mf - 1.0) / (z * z)
                + 2.0 * mf * (mf - 1.0) * z.powi(m - 2) * zb.powi(m) / (1.0 + t);
        }
        let laplacian = -8.0 * mf * mf * r2.powi(m - 1) / ((1.0 + t) * (1.0 + t));
        Ok(FieldJet {
            u: vec![u],
            du: vec![du],
            d2u: vec![d2u],
            laplacian: vec![laplacian],
        })
    }
}

/// `v_i(z) = u_i(1/z) − 4 log|z|` for a parent field on the whole plane.
#[derive(Clone)]
pub struct InvertedField {
    parent: Arc<dyn SolutionField>,
}

impl InvertedField {
    pub fn new(parent: Arc<dyn SolutionField>) -> Result<Self> {
        if parent.domain() != Domain::Plane {
            return Err(TodaError::InvalidArgument(
                "inversion needs a parent field defined on the whole plane".into(),
            ));
        }
        Ok(Self { parent })
    }
}

impl SolutionField for InvertedField {
    fn n(&self) -> usize {
        self.parent.n()
    }

    fn domain(&self) -> Domain {
        Domain::PuncturedPlane
    }

    fn provenance(&self) -> Provenance {
        Provenance::Inverted {
            parent: Box::new(self.parent.provenance()),
        }
    }

    fn values(&self, z: Complex64) -> Result<Vec<f64>> {
        self.check_point(z)?;
        let shift = 4.0 * z.norm().ln();
        Ok(self
            .parent
            .values(z.inv())?
            .into_iter()
            .map(|u| u - shift)
            .collect())
    }

    fn jet(&self, z: Complex64) -> Result<FieldJet> {
        self.check_point(z)?;
        let zeta = z.inv();
        let p = self.parent.jet(zeta)?;
        let shift = 4.0 * z.norm().ln();
        let z2 = z * z;
        let z3 = z2 * z;
        let z4 = z2 * z2;
        let r4 = z.norm_sqr().powi(2);
        Ok(FieldJet {
            u: p.u.iter().map(|u| u - shift).collect(),
            du: p.du.iter().map(|d| -d / z2 - 2.0 / z).collect(),
            d2u: p
                .d2u
                .iter()
                .zip(&p.du)
                .map(|(dd, d)| dd / z4 + 2.0 * d / z3 + 2.0 / z2)
                .collect(),
            laplacian: p.laplacian.iter().map(|l| l / r4).collect(),
        })
    }
}

/// Adds `amplitude · |z|²` to the first component of a parent field. Not a
/// solution; serves as a negative control for the residual detectors.
#[derive(Clone)]
pub struct PerturbedField {
    parent: Arc<dyn SolutionField>,
    amplitude: f64,
}

impl PerturbedField {
    pub fn new(parent: Arc<dyn SolutionField>, amplitude: f64) -> Self {
        Self { parent, amplitude }
    }
}

impl SolutionField for PerturbedField {
    fn n(&self) -> usize {
        self.parent.n()
    }

    fn domain(&self) -> Domain {
        self.parent.domain()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Perturbed {
            parent: Box::new(self.parent.provenance()),
            amplitude: self.amplitude,
        }
    }

    fn jet(&self, z: Complex64) -> Result<FieldJet> {
        let mut jet = self.parent.jet(z)?;
        jet.u[0] += self.amplitude * z.norm_sqr();
        jet.du[0] += self.amplitude * z.conj();
        jet.laplacian[0] += 4.0 * self.amplitude;
        Ok(jet)
    }
}

/// The field `u_i ≡ value` on the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField {
    pub n: usize,
    pub value: f64,
}

impl SolutionField for ConstantField {
    fn n(&self) -> usize {
        self.n
    }

    fn domain(&self) -> Domain {
        Domain::Plane
    }

    fn provenance(&self) -> Provenance {
        Provenance::Constant
    }

    fn jet(&self, _z: Complex64) -> Result<FieldJet> {
        Ok(FieldJet {
            u: vec![self.value; self.n],
            du: vec![Complex64::new(0.0, 0.0); self.n],
            d2u: vec![Complex64::new(0.0, 0.0); self.n],
            laplacian: vec![0.0; self.n],
        })
    }
}

/// `e^{u_i(z)}`.
pub fn density(f: &dyn SolutionField, i: usize, z: Complex64) -> Result<f64> {
    check_index(f, i)?;
    Ok(f.values(z)?[i].exp())
}

/// `−½Δu_i − Σ_j a_ij e^{u_j}` at `z`, for every component.
pub fn pde_residuals(f: &dyn SolutionField, c: &CartanData, z: Complex64) -> Result<Vec<Residual>> {
    check_cartan(f, c)?;
    let jet = f.jet(z)?;
    let e: Vec<f64> = jet.u.iter().map(|u| u.exp()).collect();
    Ok((0..f.n())
        .map(|i| {
            let rhs: f64 = (0..f.n()).map(|j| c.entry(i, j) * e[j]).sum();
            Residual {
                value: -0.5 * jet.laplacian[i] - rhs,
                laplacian: jet.laplacian[i],
            }
        })
        .collect())
}

/// Residual of one component together with the Laplacian it was measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub laplacian: f64,
}

impl Residual {
    /// `|residual| / (1 + |Δu|)`.
    pub fn relative(&self) -> f64 {
        self.value.abs() / (1.0 + self.laplacian.abs())
    }
}

pub fn pde_residual(f: &dyn SolutionField, c: &CartanData, i: usize, z: Complex64) -> Result<f64> {
    check_index(f, i)?;
    Ok(pde_residuals(f, c, z)?[i].value)
}

/// `Σ_{j,k} a^{jk} (∂²u_k − ½ ∂u_j ∂u_k)`, which is holomorphic for any
/// solution and vanishes identically for finite-mass ones.
pub fn pohozaev_function(f: &dyn SolutionField, c: &CartanData, z: Complex64) -> Result<Complex64> {
    check_cartan(f, c)?;
    let jet = f.jet(z)?;
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..f.n() {
        for k in 0..f.n() {
            total += c.inverse_f64(j, k) * (jet.d2u[k] - 0.5 * jet.du[j] * jet.du[k]);
        }
    }
    Ok(total)
}

/// Least-squares fit of the circle average of `u_i` against `−log r` and 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub gamma: GammaVector,
    pub a: Vec<f64>,
    /// Root-mean-square deviation of the circle averages from the fitted line.
    pub residual: f64,
}

/// Mean of `u` over the circle of radius `r`, 64-point trapezoid rule.
pub fn circle_average(f: &dyn SolutionField, r: f64) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; f.n()];
    for s in 0..CIRCLE_SAMPLES {
        let theta = std::f64::consts::TAU * s as f64 / CIRCLE_SAMPLES as f64;
        let u = f.values(Complex64::from_polar(r, theta))?;
        acc.iter_mut().zip(u).for_each(|(a, v)| *a += v);
    }
    Ok(acc.into_iter().map(|a| a / CIRCLE_SAMPLES as f64).collect())
}

/// Fits `u_i ≈ −γ_i log r + a_i` for every component.
pub fn asymptotic_fit(f: &dyn SolutionField, radii: &[f64]) -> Result<AsymptoticFit> {
    if radii.len() < 3 {
        return Err(TodaError::InvalidArgument(format!(
            "asymptotic fit needs at least 3 radii, got {}",
            radii.len()
        )));
    }
    let (rmin, rmax) = radii
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if !(rmin > 0.0) || rmax < 10.0 * rmin * (1.0 - 1e-12) {
        return Err(TodaError::InvalidArgument(
            "asymptotic fit radii must be positive and span at least one decade".into(),
        ));
    }
    let averages = radii
        .iter()
        .map(|&r| circle_average(f, r))
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = radii.iter().map(|r| -r.ln()).collect();
    let m = x.len() as f64;
    let xbar = x.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|xi| (xi - xbar).powi(2)).sum();
    let mut gamma = Vec::with_capacity(f.n());
    let mut intercept = Vec::with_capacity(f.n());
    let mut sq = 0.0;
    for i in 0..f.n() {
        let y: Vec<f64> = averages.iter().map(|a| a[i]).collect();
        let ybar = y.iter().sum::<f64>() / m;
        let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - xbar) * (yi - ybar)).sum();
        let slope = sxy / sxx;
        let a = ybar - slope * xbar;
        sq += x
            .iter()
            .zip(&y)
            .map(|(xi, yi)| (yi - (slope * xi + a)).powi(2))
            .sum::<f64>();
        gamma.push(slope);
        intercept.push(a);
    }
    Ok(AsymptoticFit {
        gamma: GammaVector(gamma),
        a: intercept,
        residual: (sq / (m * f.n() as f64)).sqrt(),
    })
}

/// CSV dump over a square grid `[-extent, extent]²` with `resolution` points
/// per side. Points outside the domain are skipped.
pub fn csv_dump(
    f: &dyn SolutionField,
    c: &CartanData,
    extent: f64,
    resolution: usize,
) -> Result<String> {
    check_cartan(f, c)?;
    if resolution < 2 {
        return Err(TodaError::InvalidArgument("grid resolution must be >= 2".into()));
    }
    let n = f.n();
    let mut out = String::from("x,y");
    for prefix in ["u", "exp_u", "residual"] {
        for i in 1..=n {
            let _ = write!(out, ",{prefix}_{i}");
        }
    }
    out.push('\n');
    for (x, y) in grid(extent, resolution) {
        let z = Complex64::new(x, y);
        if !f.domain().contains(z) {
            continue;
        }
        let u = f.values(z)?;
        let res = pde_residuals(f, c, z)?;
        let _ = write!(out, "{},{}", fmt9(x), fmt9(y));
        for v in &u {
            let _ = write!(out, ",{}", fmt9(*v));
        }
        for v in &u {
            let _ = write!(out, ",{}", fmt9(v.exp()));
        }
        for r in &res {
            let _ = write!(out, ",{}", fmt9(r.value));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Row-major grid points of `[-extent, extent]²`.
pub fn grid(extent: f64, resolution: usize) -> impl Iterator<Item = (f64, f64)> {
    let step = 2.0 * extent / (resolution - 1) as f64;
    (0..resolution).flat_map(move |iy| {
        (0..resolution).map(move |ix| (-extent + ix as f64 * step, -extent + iy as f64 * step))
    })
}

/// Nine significant digits.
fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{random_group, RationalCurve};
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn veronese_field(n: usize) -> LadderField {
        let ladder = GramLadder::build(&RationalCurve::veronese(n).unwrap())
            .unwrap()
            .normalize()
            .unwrap();
        LadderField::new(&ladder, &CartanData::new(n).unwrap()).unwrap()
    }

    #[test]
    fn unnormalized_ladder_rejected() {
        let ladder = GramLadder::build(&RationalCurve::veronese(2).unwrap()).unwrap();
        assert!(matches!(
            LadderField::new(&ladder, &CartanData::new(2).unwrap()),
            Err(TodaError::NotNormalized)
        ));
    }

    #[test]
    fn veronese_one_closed_form() {
        let f = veronese_field(1);
        assert!((f.values(c(0.0, 0.0)).unwrap()[0] - LN_2).abs() < 1e-15);
        for z in [c(0.3, -0.2), c(2.0, 1.0), c(-5.0, 0.1)] {
            let want = 2.0 / (1.0 + z.norm_sqr()).powi(2);
            assert!((density(&f, 0, z).unwrap() - want).abs() < 1e-14 * (1.0 + want));
        }
        assert!((density(&f, 0, c(0.0, 0.0)).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn veronese_two_closed_form() {
        let f = veronese_field(2);
        for z in [c(0.0, 0.0), c(0.5, 0.5), c(-1.5, 3.0)] {
            let u = f.values(z).unwrap();
            let want = 4f64.ln() - 2.0 * (1.0 + z.norm_sqr()).ln();
            assert!((u[0] - want).abs() < 1e-13);
            assert!((u[1] - want).abs() < 1e-13);
        }
        assert!((density(&f, 1, c(0.0, 0.0)).unwrap() - 4.0).abs() < 1e-13);
        assert!(density(&f, 0, c(10.0, 0.0)).unwrap() < density(&f, 0, c(0.0, 0.0)).unwrap());
    }

    #[test]
    fn residual_vanishes_at_origin() {
        for n in 1..=2 {
            let f = veronese_field(n);
            let cartan = CartanData::new(n).unwrap();
            let res = pde_residuals(&f, &cartan, c(0.0, 0.0)).unwrap();
            for r in res {
                assert!((-0.5 * r.laplacian - 4.0).abs() < 1e-13);
                assert!(r.value.abs() < 1e-13);
            }
        }
    }

    #[test]
    fn du_matches_finite_differences() {
        let curve = RationalCurve::veronese(3).unwrap().apply_group(&random_group(3, 5)).unwrap();
        let ladder = GramLadder::build(&curve).unwrap().normalize().unwrap();
        let f = LadderField::new(&ladder, &CartanData::new(3).unwrap()).unwrap();
        let z = c(0.4, -0.3);
        let h = 1e-5;
        let jet = f.jet(z).unwrap();
        for i in 0..3 {
            let dx = (f.values(z + h).unwrap()[i] - f.values(z - h).unwrap()[i]) / (2.0 * h);
            let dy = (f.values(z + c(0.0, h)).unwrap()[i] - f.values(z - c(0.0, h)).unwrap()[i])
                / (2.0 * h);
            let dz = 0.5 * c(dx, -dy);
            assert!((jet.du[i] - dz).norm() < 1e-6 * (1.0 + dz.norm()));
        }
    }

    #[test]
    fn ramified_ladder_matches_singular_family() {
        let curve = RationalCurve::new(
            1,
            vec![
                crate::hermitian::Poly::constant(c(1.0, 0.0)),
                crate::hermitian::Poly::monomial(c(1.0, 0.0), 2),
            ],
        )
        .unwrap();
        let ladder = GramLadder::build(&curve).unwrap();
        let cartan = CartanData::new(1).unwrap();
        let f = LadderField::ramified(&ladder, &cartan).unwrap();
        let s = SingularLiouville::new(2).unwrap();
        assert_eq!(f.domain(), Domain::PuncturedPlane);
        for z in [c(0.5, 0.0), c(-0.3, 1.1), c(2.0, 2.0)] {
            let (a, b) = (f.jet(z).unwrap(), s.jet(z).unwrap());
            assert!((a.u[0] - b.u[0]).abs() < 1e-13);
            assert!((a.du[0] - b.du[0]).norm() < 1e-12);
            assert!((a.d2u[0] - b.d2u[0]).norm() < 1e-11);
            assert!((a.laplacian[0] - b.laplacian[0]).abs() < 1e-11);
        }
        let non_monomial = RationalCurve::new(
            1,
            vec![
                crate::hermitian::Poly::constant(c(1.0, 0.0)),
                crate::hermitian::Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]),
            ],
        )
        .unwrap();
        let l2 = GramLadder::build(&non_monomial).unwrap();
        assert!(LadderField::ramified(&l2, &cartan).is_err());
    }

    #[test]
    fn singular_family() {
        let s1 = SingularLiouville::new(1).unwrap();
        let v1 = veronese_field(1);
        for z in [c(0.0, 0.0), c(0.7, -0.1), c(3.0, 2.0)] {
            let (a, b) = (s1.jet(z).unwrap(), v1.jet(z).unwrap());
            assert!((a.u[0] - b.u[0]).abs() < 1e-13);
            assert!((a.du[0] - b.du[0]).norm() < 1e-13);
            assert!((a.d2u[0] - b.d2u[0]).norm() < 1e-12);
            assert!((a.laplacian[0] - b.laplacian[0]).abs() < 1e-12);
        }
        let s2 = SingularLiouville::new(2).unwrap();
        assert_eq!(s2.mu(), -2.0);
        let cartan = CartanData::new(1).unwrap();
        assert!(pde_residual(&s2, &cartan, 0, c(0.5, 0.0)).unwrap().abs() < 1e-10);
        assert!(matches!(s2.jet(c(0.0, 0.0)), Err(TodaError::SingularPoint { .. })));
        assert!(SingularLiouville::new(0).is_err());
    }

    #[test]
    fn singular_family_second_derivative() {
        let cartan = CartanData::new(1).unwrap();
        for m in 2..=4 {
            let s = SingularLiouville::new(m).unwrap();
            let z = c(0.6, 0.45);
            let h = 1e-5;
            let jet = s.jet(z).unwrap();
            let ddx = (s.jet(z + h).unwrap().du[0] - s.jet(z - h).unwrap().du[0]) / (2.0 * h);
            let ddy = (s.jet(z + c(0.0, h)).unwrap().du[0] - s.jet(z - c(0.0, h)).unwrap().du[0])
                / (2.0 * h);
            let dzz = 0.5 * (ddx - c(0.0, 1.0) * ddy);
            assert!((jet.d2u[0] - dzz).norm() < 1e-6 * (1.0 + dzz.norm()));
            assert!(pohozaev_function(&s, &cartan, z).unwrap().norm() > 1e-3 || m == 1);
        }
    }

    #[test]
    fn inversion() {
        let parent: Arc<dyn SolutionField> = Arc::new(veronese_field(1));
        let inv = InvertedField::new(parent.clone()).unwrap();
        for z in [c(0.3, 0.1), c(2.0, -1.0), c(-0.05, 0.02)] {
            let (a, b) = (inv.jet(z).unwrap(), parent.jet(z).unwrap());
            assert!((a.u[0] - b.u[0]).abs() < 1e-12);
            assert!((a.du[0] - b.du[0]).norm() < 1e-10 * (1.0 + b.du[0].norm()));
        }
        let cartan = CartanData::new(1).unwrap();
        assert!(pde_residual(&inv, &cartan, 0, c(2.0, 0.0)).unwrap().abs() < 1e-8);
        assert!(matches!(inv.jet(c(0.0, 0.0)), Err(TodaError::SingularPoint { .. })));
        assert!(InvertedField::new(Arc::new(SingularLiouville::new(2).unwrap())).is_err());
    }

    #[test]
    fn asymptotic_fits() {
        let f1 = veronese_field(1);
        let fit = asymptotic_fit(&f1, &[10.0, 30.0, 100.0]).unwrap();
        assert!((fit.gamma.0[0] - 4.0).abs() < 1e-2);
        // Offsets from the r^{-2} correction, frozen from an independent
        // least-squares fit of log 2 - 2 log(1 + r^2) at the same radii.
        assert!((fit.gamma.0[0] - 4.0 - -0.00844627).abs() < 1e-7);
        assert!((fit.a[0] - LN_2 - -0.03646463).abs() < 1e-7);

        let f2 = veronese_field(2);
        let fit = asymptotic_fit(&f2, &[10.0, 30.0, 100.0]).unwrap();
        for g in &fit.gamma.0 {
            assert!((g - 4.0).abs() < 1e-2);
        }

        let zero = ConstantField { n: 2, value: 0.0 };
        let fit = asymptotic_fit(&zero, &[1.0, 5.0, 10.0]).unwrap();
        assert_eq!(fit.gamma.0, vec![0.0, 0.0]);
        assert_eq!(fit.residual, 0.0);

        assert!(asymptotic_fit(&f1, &[10.0, 100.0]).is_err());
        assert!(asymptotic_fit(&f1, &[10.0, 20.0, 30.0]).is_err());
    }

    #[test]
    fn pohozaev_function_vanishes_on_solutions() {
        let f1 = veronese_field(1);
        let c1 = CartanData::new(1).unwrap();
        assert!(pohozaev_function(&f1, &c1, c(0.3, 0.7)).unwrap().norm() < 1e-9);

        let f2 = veronese_field(2);
        let c2 = CartanData::new(2).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.2 + 0.15 * k as f64, 0.9 * k as f64);
            assert!(pohozaev_function(&f2, &c2, z).unwrap().norm() < 1e-9);
        }

        let perturbed = PerturbedField::new(Arc::new(f2), 0.1);
        let worst = (0..20)
            .map(|k| {
                let z = Complex64::from_polar(0.2 + 0.15 * k as f64, 0.9 * k as f64);
                pohozaev_function(&perturbed, &c2, z).unwrap().norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
    }

    #[test]
    fn csv_layout() {
        let f = veronese_field(2);
        let cartan = CartanData::new(2).unwrap();
        let text = csv_dump(&f, &cartan, 1.0, 3).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,u_1,u_2,exp_u_1,exp_u_2,residual_1,residual_2");
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[5].split(',').count(), 8);
        assert!(lines[5].starts_with("0.00000000e0,0.00000000e0,1.38629436e0"));

        let inv = InvertedField::new(Arc::new(f)).unwrap();
        assert_eq!(csv_dump(&inv, &cartan, 1.0, 3).unwrap().lines().count(), 9);
    }
}
