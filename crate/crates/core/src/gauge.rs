//! The flat connection of a Toda solution: gauge frame, connection
//! matrices, zero-curvature residual and holonomy around circles.
//!
//! Frame: `u_i = 2(w_i − w_{i−1}) + log 2` for `i = 1..N` with `Σ w_i = 0`.
//! Connection `α = U dz + V dz̄` with
//!
//! ```text
//! U = −diag(∂z w_i) + Σ_k e^{w_k − w_{k−1}} E_{k−1,k}
//! V =  diag(∂z̄ w_i) − Σ_k e^{w_k − w_{k−1}} E_{k,k−1}
//! ```
//!
//! so that `V = −U†`, `tr U = 0`, and `U_z̄ − V_z = [U, V]` holds exactly
//! when `u` solves `−½Δu_i = Σ_j a_ij e^{u_j}`.

use std::f64::consts::{LN_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};
use crate::field::{Domain, SolutionField};

/// Drift above which a holonomy integration is flagged unreliable.
pub const UNRELIABLE_DRIFT: f64 = 1e-4;
/// Drift at or below which a holonomy integration is accepted.
pub const ACCEPTED_DRIFT: f64 = 1e-6;
pub const MIN_HOLONOMY_STEPS: usize = 256;

type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFrame {
    pub w: Vec<f64>,
    /// `∂z w_i`.
    pub wz: Vec<Complex64>,
}

/// Solves `w_i − w_{i−1} = d_i`, `Σ w = 0` for a vector of increments.
fn integrate_increments<T>(d: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n1 = (d.len() + 1) as f64;
    // w_0 = −(1/(N+1)) Σ_k (N+1−k) d_k
    let w0 = d
        .iter()
        .enumerate()
        .fold(T::default(), |acc, (k, dk)| acc + *dk * ((n1 - (k + 1) as f64) / n1));
    let w0 = w0 * -1.0;
    let mut w = Vec::with_capacity(d.len() + 1);
    w.push(w0);
    for dk in d {
        let prev = *w.last().expect("nonempty");
        w.push(prev + *dk);
    }
    w
}

pub fn gauge_frame(f: &dyn SolutionField, z: Complex64) -> Result<GaugeFrame> {
    let jet = f.jet(z)?;
    let d: Vec<f64> = jet.u.iter().map(|u| 0.5 * (u - LN_2)).collect();
    let dz: Vec<Complex64> = jet.du.iter().map(|du| 0.5 * du).collect();
    Ok(GaugeFrame {
        w: integrate_increments(&d),
        wz: integrate_increments(&dz),
    })
}

/// The matrices `U`, `V` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionSample {
    pub u: CMatrix,
    pub v: CMatrix,
}

impl ConnectionSample {
    pub fn from_frame(frame: &GaugeFrame) -> Self {
        let dim = frame.w.len();
        let mut u = CMatrix::zeros(dim, dim);
        let mut v = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            u[(i, i)] = -frame.wz[i];
            v[(i, i)] = frame.wz[i].conj();
        }
        for k in 1..dim {
            let e = Complex64::new((frame.w[k] - frame.w[k - 1]).exp(), 0.0);
            u[(k - 1, k)] = e;
            v[(k, k - 1)] = -e;
        }
        Self { u, v }
    }

    /// `α_θ = i z U − i z̄ V`, the angular component on the circle through `z`.
    pub fn angular_component(&self, z: Complex64) -> CMatrix {
        &self.u * (I * z) - &self.v * (I * z.conj())
    }
}

pub fn connection(f: &dyn SolutionField, z: Complex64) -> Result<ConnectionSample> {
    Ok(ConnectionSample::from_frame(&gauge_frame(f, z)?))
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn check_stencil(domain: Domain, z: Complex64, radius: f64) -> Result<()> {
    let bad = (domain.is_punctured() && z.norm() <= radius)
        || (0..8).any(|k| !domain.contains(z + Complex64::from_polar(radius, TAU * k as f64 / 8.0)));
    if bad {
        Err(TodaError::InvalidArgument(format!(
            "disk of radius {radius} around {z} leaves the field domain"
        )))
    } else {
        Ok(())
    }
}

/// `U_z̄ − V_z − [U, V]` with derivatives by central differences of step `h`.
pub fn curvature_defect(f: &dyn SolutionField, z: Complex64, h: f64) -> Result<CMatrix> {
    if !(h > 0.0) {
        return Err(TodaError::InvalidArgument("finite-difference step must be positive".into()));
    }
    check_stencil(f.domain(), z, 2.0 * h)?;
    let at = |p: Complex64| connection(f, p);
    let (xp, xm) = (at(z + h)?, at(z - h)?);
    let (yp, ym) = (at(z + I * h)?, at(z - I * h)?);
    let c = at(z)?;
    let scale = Complex64::new(1.0 / (2.0 * h), 0.0);
    let ux = (&xp.u - &xm.u) * scale;
    let uy = (&yp.u - &ym.u) * scale;
    let vx = (&xp.v - &xm.v) * scale;
    let vy = (&yp.v - &ym.v) * scale;
    let half = Complex64::new(0.5, 0.0);
    let u_zbar = (ux + uy * I) * half;
    let v_z = (vx - vy * I) * half;
    let commutator = &c.u * &c.v - &c.v * &c.u;
    Ok(u_zbar - v_z - commutator)
}

/// Operator norm of [`curvature_defect`].
pub fn curvature_residual(f: &dyn SolutionField, z: Complex64, h: f64) -> Result<f64> {
    Ok(operator_norm(&curvature_defect(f, z, h)?))
}

/// Residual at steps `h` and `h/2`, the observed order, and the norm of the
/// Richardson combination `(4 E(h/2) − E(h)) / 3`, which cancels the `h²` term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureStudy {
    pub residual: f64,
    pub residual_half: f64,
    pub order: f64,
    pub extrapolated: f64,
}

pub fn curvature_study(f: &dyn SolutionField, z: Complex64, h: f64) -> Result<CurvatureStudy> {
    let coarse = curvature_defect(f, z, h)?;
    let fine = curvature_defect(f, z, 0.5 * h)?;
    let residual = operator_norm(&coarse);
    let residual_half = operator_norm(&fine);
    let extrapolated = operator_norm(&((fine * Complex64::new(4.0, 0.0) - coarse) / Complex64::new(3.0, 0.0)));
    Ok(CurvatureStudy {
        residual,
        residual_half,
        order: (residual / residual_half).log2(),
        extrapolated,
    })
}

/// Endpoint of parallel transport `dφ/dθ = −α_θ φ`, `φ(0) = I`, around the
/// circle of radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyResult {
    pub matrix: CMatrix,
    /// `‖φ†φ − I‖` (operator norm).
    pub unitarity_drift: f64,
    /// `|det φ − 1|`.
    pub det_drift: f64,
    pub radius: f64,
    pub steps: usize,
}

impl HolonomyResult {
    pub fn reliable(&self) -> bool {
        self.unitarity_drift <= UNRELIABLE_DRIFT && self.det_drift <= UNRELIABLE_DRIFT
    }

    pub fn accepted(&self) -> bool {
        self.unitarity_drift <= ACCEPTED_DRIFT && self.det_drift <= ACCEPTED_DRIFT
    }
}

/// Fourth-order Runge-Kutta in θ over `[0, 2π]`; no re-unitarization.
pub fn holonomy(f: &dyn SolutionField, r: f64, steps: usize) -> Result<HolonomyResult> {
    if steps < MIN_HOLONOMY_STEPS {
        return Err(TodaError::InvalidArgument(format!(
            "holonomy needs at least {MIN_HOLONOMY_STEPS} steps, got {steps}"
        )));
    }
    if !(r > 0.0) {
        return Err(TodaError::InvalidArgument("holonomy radius must be positive".into()));
    }
    let domain = f.domain();
    let dim = f.n() + 1;
    let dtheta = TAU / steps as f64;
    // Generator −α_θ at θ = j·dθ/2 for j = 0..=2·steps.
    let generators = (0..=2 * steps)
        .map(|j| {
            let z = Complex64::from_polar(r, 0.5 * dtheta * j as f64);
            if !domain.contains(z) {
                return Err(TodaError::InvalidArgument(format!(
                    "circle of radius {r} leaves the field domain"
                )));
            }
            Ok(-connection(f, z)?.angular_component(z))
        })
        .collect::<Result<Vec<CMatrix>>>()?;
    let h = Complex64::new(dtheta, 0.0);
    let half = Complex64::new(0.5 * dtheta, 0.0);
    let mut phi = CMatrix::identity(dim, dim);
    for step in 0..steps {
        let (a0, am, a1) = (
            &generators[2 * step],
            &generators[2 * step + 1],
            &generators[2 * step + 2],
        );
        let k1 = a0 * &phi;
        let k2 = am * (&phi + &k1 * half);
        let k3 = am * (&phi + &k2 * half);
        let k4 = a1 * (&phi + &k3 * h);
        phi += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dtheta / 6.0, 0.0);
    }
    let unitarity_drift = operator_norm(&(phi.adjoint() * &phi - CMatrix::identity(dim, dim)));
    let det_drift = (phi.determinant() - Complex64::new(1.0, 0.0)).norm();
    Ok(HolonomyResult {
        matrix: phi,
        unitarity_drift,
        det_drift,
        radius: r,
        steps,
    })
}

/// Diagonal holonomy predicted from the singularity exponents `μ_i`
/// (`u_i = −μ_i log|z| + O(1)` at the puncture).
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyPrediction {
    pub beta: Vec<f64>,
    pub matrix: CMatrix,
}

/// Solves `β_i − β_{i−1} = μ_i / 2`, `Σ β = 0`; the transported frame picks
/// up `e^{−2πi β_k}` on the k-th axis.
pub fn predicted_holonomy(mu: &[f64]) -> Result<HolonomyPrediction> {
    if mu.is_empty() {
        return Err(TodaError::InvalidRank(0));
    }
    if let Some((index, &value)) = mu.iter().enumerate().find(|(_, m)| !(**m < 2.0)) {
        return Err(TodaError::ExponentTooLarge {
            index: index + 1,
            value,
        });
    }
    let half: Vec<f64> = mu.iter().map(|m| 0.5 * m).collect();
    let beta = integrate_increments(&half);
    let matrix = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        beta.len(),
        beta.iter().map(|b| Complex64::from_polar(1.0, -TAU * b)),
    ));
    Ok(HolonomyPrediction { beta, matrix })
}

/// Serializable holonomy report with matrices as `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub unitarity_drift: f64,
    pub det_drift: f64,
    pub radius: f64,
    pub steps: usize,
    pub reliable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prediction: Option<PredictionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    /// Operator-norm distance between computed and predicted holonomy.
    pub deviation: f64,
}

pub fn matrix_entries(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

impl HolonomyReport {
    pub fn new(result: &HolonomyResult, mu: Option<&[f64]>) -> Result<Self> {
        let prediction = mu
            .map(|mu| -> Result<PredictionReport> {
                let p = predicted_holonomy(mu)?;
                Ok(PredictionReport {
                    mu: mu.to_vec(),
                    deviation: operator_norm(&(&result.matrix - &p.matrix)),
                    beta: p.beta,
                    matrix: matrix_entries(&p.matrix),
                })
            })
            .transpose()?;
        Ok(Self {
            matrix: matrix_entries(&result.matrix),
            unitarity_drift: result.unitarity_drift,
            det_drift: result.det_drift,
            radius: result.radius,
            steps: result.steps,
            reliable: result.reliable(),
            prediction,
        })
    }
}
