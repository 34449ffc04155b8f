//! Integration of solution densities over the plane.
//!
//! Polar coordinates with the compactifying substitution `r = s / (1 − s)`.
//! The radial variable is integrated on adaptively bisected Gauss-Legendre
//! panels over `s ∈ [0, s_R]`, the angle by the trapezoid rule (64 points,
//! doubled until converged), and the region `r > R` by the `C r^{−4}` tail
//! model: with `C = ρ̄(R) R⁴` the tail contributes `π C / R²`.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanData, GammaVector};
use crate::curves::GramLadder;
use crate::error::{Result, TodaError};
use crate::field::SolutionField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Radius R beyond which the tail model replaces integration.
    pub cutoff_radius: f64,
    /// Gauss-Legendre points per radial panel.
    pub panel_order: usize,
    pub max_panels: usize,
    pub angular_min: usize,
    pub angular_max: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            cutoff_radius: 1e3,
            panel_order: 32,
            max_panels: 4000,
            angular_min: 64,
            angular_max: 8192,
        }
    }
}

/// Result of integrating a vector of densities over the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneIntegral {
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub tails: Vec<f64>,
    pub converged: bool,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    priority: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

struct PlaneIntegrator<'a, F> {
    density: &'a F,
    dim: usize,
    tol: f64,
    opts: QuadratureOptions,
    fine: GaussLegendre,
    coarse: GaussLegendre,
}

impl<F> PlaneIntegrator<'_, F>
where
    F: Fn(Complex64) -> Result<Vec<f64>>,
{
    /// `∫_0^{2π} ρ(r e^{iθ}) dθ`, trapezoid rule doubled until successive
    /// estimates agree.
    fn angular(&self, r: f64) -> Result<Vec<f64>> {
        let mut n = self.opts.angular_min;
        let mut sum = vec![0.0; self.dim];
        for k in 0..n {
            add(&mut sum, &(self.density)(Complex64::from_polar(r, TAU * k as f64 / n as f64))?);
        }
        let mut estimate: Vec<f64> = sum.iter().map(|s| s * TAU / n as f64).collect();
        while n < self.opts.angular_max {
            for k in 0..n {
                let theta = TAU * (k as f64 + 0.5) / n as f64;
                add(&mut sum, &(self.density)(Complex64::from_polar(r, theta))?);
            }
            n *= 2;
            let refined: Vec<f64> = sum.iter().map(|s| s * TAU / n as f64).collect();
            let settled = refined
                .iter()
                .zip(&estimate)
                .all(|(a, b)| (a - b).abs() <= 1e-2 * self.tol * a.abs());
            estimate = refined;
            if settled {
                break;
            }
        }
        Ok(estimate)
    }

    /// Radial integrand in s: angular integral times r dr/ds.
    fn radial(&self, s: f64) -> Result<Vec<f64>> {
        let one_minus = 1.0 - s;
        let r = s / one_minus;
        let jac = r / (one_minus * one_minus);
        Ok(self.angular(r)?.into_iter().map(|g| g * jac).collect())
    }

    fn rule(&self, rule: &GaussLegendre, a: f64, b: f64) -> Result<Vec<f64>> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = vec![0.0; self.dim];
        for (x, w) in rule.as_node_weight_pairs() {
            let v = self.radial(mid + half * x)?;
            acc.iter_mut().zip(v).for_each(|(a, v)| *a += w * half * v);
        }
        Ok(acc)
    }

    fn panel(&self, a: f64, b: f64, scale: &[f64]) -> Result<Panel> {
        let value = self.rule(&self.fine, a, b)?;
        let coarse = self.rule(&self.coarse, a, b)?;
        let error: Vec<f64> = value.iter().zip(&coarse).map(|(f, c)| (f - c).abs()).collect();
        let priority = error
            .iter()
            .zip(scale)
            .map(|(e, s)| e / s.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        Ok(Panel {
            a,
            b,
            value,
            error,
            priority,
        })
    }

    fn run(&self) -> Result<PlaneIntegral> {
        let big_r = self.opts.cutoff_radius;
        let s_max = big_r / (1.0 + big_r);
        let mut breaks = vec![0.0, 1e-4, 1e-3, 1e-2];
        breaks.extend((1..=16).map(|j| s_max * j as f64 / 16.0).filter(|s| *s > 1e-2));

        let unit = vec![1.0; self.dim];
        let mut heap = BinaryHeap::new();
        for w in breaks.windows(2) {
            heap.push(self.panel(w[0], w[1], &unit)?);
        }
        let mut converged = false;
        loop {
            let total: Vec<f64> = sum_panels(heap.iter().map(|p| &p.value), self.dim);
            let err: Vec<f64> = sum_panels(heap.iter().map(|p| &p.error), self.dim);
            if err
                .iter()
                .zip(&total)
                .all(|(e, t)| *e <= self.tol * t.abs() || *e == 0.0)
            {
                converged = true;
                break;
            }
            if heap.len() >= self.opts.max_panels {
                break;
            }
            let worst = heap.pop().expect("nonempty");
            let mid = 0.5 * (worst.a + worst.b);
            let scale: Vec<f64> = total.iter().map(|t| t.abs()).collect();
            heap.push(self.panel(worst.a, mid, &scale)?);
            heap.push(self.panel(mid, worst.b, &scale)?);
            // Re-weight stale priorities against the current totals.
            if heap.len() % 64 == 0 {
                heap = heap
                    .into_iter()
                    .map(|mut p| {
                        p.priority = p
                            .error
                            .iter()
                            .zip(&scale)
                            .map(|(e, s)| e / s.max(f64::MIN_POSITIVE))
                            .fold(0.0, f64::max);
                        p
                    })
                    .collect();
            }
        }
        let values = sum_panels(heap.iter().map(|p| &p.value), self.dim);
        let error_estimates = sum_panels(heap.iter().map(|p| &p.error), self.dim);
        // ρ̄(R) = angular integral / 2π; tail = π ρ̄(R) R².
        let tails: Vec<f64> = self
            .angular(big_r)?
            .into_iter()
            .map(|g| PI * (g / TAU) * big_r * big_r)
            .collect();
        Ok(PlaneIntegral {
            values: values.iter().zip(&tails).map(|(v, t)| v + t).collect(),
            error_estimates,
            tails,
            converged,
            panels: heap.len(),
        })
    }
}

fn add(acc: &mut [f64], v: &[f64]) {
    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
}

fn sum_panels<'a>(it: impl Iterator<Item = &'a Vec<f64>>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for v in it {
        add(&mut acc, v);
    }
    acc
}

/// Integrates a vector of `dim` densities over the plane to relative
/// tolerance `tol`.
pub fn integrate_plane<F>(
    density: &F,
    dim: usize,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<PlaneIntegral>
where
    F: Fn(Complex64) -> Result<Vec<f64>>,
{
    if !(tol > 0.0) {
        return Err(TodaError::InvalidArgument("tolerance must be positive".into()));
    }
    let order = opts.panel_order.max(4);
    let integrator = PlaneIntegrator {
        density,
        dim,
        tol,
        opts,
        fine: GaussLegendre::new(order).expect("order >= 2"),
        coarse: GaussLegendre::new(order / 2).expect("order >= 2"),
    };
    integrator.run()
}

/// One component's mass `∫ e^{u_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub tail: f64,
    pub converged: bool,
}

/// Masses of all components and the exponents they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub masses: Vec<f64>,
    pub gamma: GammaVector,
    pub pohozaev_form_value: f64,
    /// Largest tail contribution relative to its mass.
    pub tail_fraction: f64,
    /// Largest relative error estimate.
    pub error_estimate: f64,
    pub converged: bool,
}

impl MassReport {
    pub fn accepted(&self) -> bool {
        self.converged && self.masses.iter().all(|m| *m > 0.0) && self.tail_fraction < 0.05
    }
}

fn field_integral(f: &dyn SolutionField, tol: f64, opts: QuadratureOptions) -> Result<PlaneIntegral> {
    let density = |z: Complex64| -> Result<Vec<f64>> {
        Ok(f.values(z)?.into_iter().map(f64::exp).collect())
    };
    integrate_plane(&density, f.n(), tol, opts)
}

pub fn mass(f: &dyn SolutionField, i: usize, tol: f64) -> Result<MassEstimate> {
    if i >= f.n() {
        return Err(TodaError::InvalidArgument(format!(
            "component index {i} out of range for N = {}",
            f.n()
        )));
    }
    let out = field_integral(f, tol, QuadratureOptions::default())?;
    Ok(MassEstimate {
        value: out.values[i],
        error_estimate: out.error_estimates[i],
        tail: out.tails[i],
        converged: out.converged,
    })
}

/// `γ_i = (1/π) Σ_j a_ij m_j`.
pub fn gamma_vector(masses: &[f64], c: &CartanData) -> Result<GammaVector> {
    if masses.len() != c.n() {
        return Err(TodaError::DimensionMismatch {
            expected: c.n(),
            got: masses.len(),
        });
    }
    Ok(GammaVector(
        (0..c.n())
            .map(|i| (0..c.n()).map(|j| c.entry(i, j) * masses[j]).sum::<f64>() / PI)
            .collect(),
    ))
}

pub fn mass_report(f: &dyn SolutionField, c: &CartanData, tol: f64) -> Result<MassReport> {
    mass_report_with(f, c, tol, QuadratureOptions::default())
}

pub fn mass_report_with(
    f: &dyn SolutionField,
    c: &CartanData,
    tol: f64,
    opts: QuadratureOptions,
) -> Result<MassReport> {
    let out = field_integral(f, tol, opts)?;
    let gamma = gamma_vector(&out.values, c)?;
    let pohozaev_form_value = c.pohozaev_form(&gamma)?;
    let ratio = |num: &[f64]| {
        num.iter()
            .zip(&out.values)
            .map(|(a, m)| if *m == 0.0 { 0.0 } else { (a / m).abs() })
            .fold(0.0, f64::max)
    };
    Ok(MassReport {
        tail_fraction: ratio(&out.tails),
        error_estimate: ratio(&out.error_estimates),
        masses: out.values,
        gamma,
        pohozaev_form_value,
        converged: out.converged,
    })
}

/// Area of the k-th associated curve: the integral of
/// `h_{k−1} h_{k+1} / h_k²` over the plane.
pub fn associated_area(l: &GramLadder, k: usize, tol: f64) -> Result<MassEstimate> {
    if !(1..=l.n()).contains(&k) {
        return Err(TodaError::InvalidArgument(format!(
            "associated curve index must be in 1..={}, got {k}",
            l.n()
        )));
    }
    let density = |z: Complex64| -> Result<Vec<f64>> { Ok(vec![l.associated_density(k, z)?]) };
    let out = integrate_plane(&density, 1, tol, QuadratureOptions::default())?;
    Ok(MassEstimate {
        value: out.values[0],
        error_estimate: out.error_estimates[0],
        tail: out.tails[0],
        converged: out.converged,
    })
}
