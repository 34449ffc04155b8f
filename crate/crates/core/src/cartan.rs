//! The type-A Cartan matrix, its exact rational inverse, and the Pohozaev
//! quadratic form built from it.

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};

/// Cartan matrix of SU(N+1) together with its inverse in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanData {
    n: usize,
    entries: Vec<Vec<i64>>,
    inverse: Vec<Vec<Rational64>>,
}

/// Asymptotic exponents gamma_1..gamma_N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GammaVector(pub Vec<f64>);

impl GammaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TodaError::InvalidArgument(
                "gamma entries must be finite".into(),
            ));
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl CartanData {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(TodaError::InvalidRank(n));
        }
        let entries: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        let inverse = invert_exact(&entries);
        Ok(Self {
            n,
            entries,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn inverse(&self) -> &[Vec<Rational64>] {
        &self.inverse
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j] as f64
    }

    pub fn inverse_f64(&self, i: usize, j: usize) -> f64 {
        self.inverse[i][j].to_f64().unwrap_or(f64::NAN)
    }

    /// Exact product K * K^{-1}.
    pub fn product_with_inverse(&self) -> Vec<Vec<Rational64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        (0..self.n).fold(Rational64::zero(), |acc, k| {
                            acc + Rational64::from_integer(self.entries[i][k]) * self.inverse[k][j]
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn min_inverse_entry(&self) -> Rational64 {
        self.inverse
            .iter()
            .flatten()
            .copied()
            .min()
            .expect("n >= 1")
    }

    /// Sum over j,k of a^{jk} (4 gamma_k - gamma_j gamma_k).
    pub fn pohozaev_form(&self, gamma: &GammaVector) -> Result<f64> {
        if gamma.len() != self.n {
            return Err(TodaError::DimensionMismatch {
                expected: self.n,
                got: gamma.len(),
            });
        }
        let g = &gamma.0;
        let mut total = 0.0;
        for j in 0..self.n {
            for k in 0..self.n {
                total += self.inverse_f64(j, k) * (4.0 * g[k] - g[j] * g[k]);
            }
        }
        Ok(total)
    }
}

/// Gauss-Jordan elimination over the rationals.
fn invert_exact(m: &[Vec<i64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational64::one()
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrix is nonsingular");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col];
            for j in 0..n {
                let (ac, ic) = (a[col][j], inv[col][j]);
                a[r][j] -= factor * ac;
                inv[r][j] -= factor * ic;
            }
        }
    }
    inv
}
