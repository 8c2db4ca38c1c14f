//! Transverse load `g(t, x')`, shared by the plate and slab solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plate2d::Grid2;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Forcing2 {
    #[default]
    Zero,
    Constant { value: f64 },
    /// `a cos(omega t) cos(k1 x1) cos(k2 x2)`.
    CosProduct { amplitude: f64, omega: f64, k1: f64, k2: f64 },
    /// Nodal snapshots at increasing times, linearly interpolated and held
    /// constant outside the table.
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
}

impl Forcing2 {
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant { value } => *value == 0.0,
            Self::CosProduct { amplitude, .. } => *amplitude == 0.0,
            Self::Tabulated { values, .. } => values.iter().flatten().all(|v| *v == 0.0),
        }
    }

    pub fn check(&self, grid: &Grid2) -> Result<()> {
        match self {
            Self::Zero => Ok(()),
            Self::Constant { value } if value.is_finite() => Ok(()),
            Self::CosProduct { amplitude, omega, k1, k2 }
                if [amplitude, omega, k1, k2].iter().all(|x| x.is_finite()) =>
            {
                Ok(())
            }
            Self::Tabulated { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::Domain("tabulated forcing needs one snapshot per time".into()));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Domain("tabulated forcing times must increase".into()));
                }
                if values.iter().any(|s| s.len() != grid.len() || s.iter().any(|v| !v.is_finite())) {
                    return Err(Error::Domain(format!(
                        "tabulated forcing snapshots must hold {} finite values",
                        grid.len()
                    )));
                }
                Ok(())
            }
            _ => Err(Error::Domain("forcing parameters must be finite".into())),
        }
    }

    /// Writes `g(t, .)` at the grid nodes into `out`.
    pub fn sample_into(&self, t: f64, grid: &Grid2, out: &mut [f64]) {
        match self {
            Self::Zero => out.fill(0.0),
            Self::Constant { value } => out.fill(*value),
            Self::CosProduct { amplitude, omega, k1, k2 } => {
                let a = amplitude * (omega * t).cos();
                for j in 0..grid.n2 {
                    let c2 = (k2 * grid.x2(j)).cos();
                    for i in 0..grid.n1 {
                        out[grid.index(i, j)] = a * (k1 * grid.x1(i)).cos() * c2;
                    }
                }
            }
            Self::Tabulated { times, values } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    out.copy_from_slice(&values[0]);
                } else if t >= times[last] {
                    out.copy_from_slice(&values[last]);
                } else {
                    let k = times.partition_point(|s| *s <= t) - 1;
                    let w = (t - times[k]) / (times[k + 1] - times[k]);
                    for (o, (a, b)) in out.iter_mut().zip(values[k].iter().zip(&values[k + 1])) {
                        *o = (1.0 - w) * a + w * b;
                    }
                }
            }
        }
    }

    pub fn sample(&self, t: f64, grid: &Grid2) -> Vec<f64> {
        let mut out = vec![0.0; grid.len()];
        self.sample_into(t, grid, &mut out);
        out
    }
}
