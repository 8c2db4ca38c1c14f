//! Builtin scalar field expressions used for initial data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plate2d::Grid2;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldExpr {
    #[default]
    Zero,
    /// `a cos(k1 x1 + p1) cos(k2 x2 + p2)`.
    CosProduct {
        amplitude: f64,
        k1: f64,
        k2: f64,
        #[serde(default)]
        phase1: f64,
        #[serde(default)]
        phase2: f64,
    },
    /// `a (1 + cos(pi x1 / L)) (1 + cos(pi x2 / L)) / 4`; vanishes with its
    /// gradient on the boundary of `(-L, L)^2` and is periodic.
    Bump { amplitude: f64 },
    /// Nodal values in grid order (`i + n1 * j`).
    Samples { values: Vec<f64> },
}

impl FieldExpr {
    pub fn cos_product(amplitude: f64, k1: f64, k2: f64) -> Self {
        Self::CosProduct { amplitude, k1, k2, phase1: 0.0, phase2: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::CosProduct { amplitude, .. } | Self::Bump { amplitude } => *amplitude == 0.0,
            Self::Samples { values } => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Rejects expressions that are not `2L`-periodic on a periodic grid.
    pub fn check(&self, grid: &Grid2) -> Result<()> {
        match self {
            Self::CosProduct { amplitude, k1, k2, phase1, phase2 } => {
                if ![*amplitude, *k1, *k2, *phase1, *phase2].iter().all(|x| x.is_finite()) {
                    return Err(Error::Domain("cos_product parameters must be finite".into()));
                }
                if grid.is_periodic() {
                    for k in [k1, k2] {
                        let periods = k * grid.half_width / std::f64::consts::PI;
                        if (periods - periods.round()).abs() > 1e-9 {
                            return Err(Error::Domain(format!(
                                "wave number {k} is not periodic on (-{L}, {L})",
                                L = grid.half_width
                            )));
                        }
                    }
                }
                Ok(())
            }
            Self::Bump { amplitude } if !amplitude.is_finite() => {
                Err(Error::Domain("bump amplitude must be finite".into()))
            }
            Self::Samples { values } => {
                if values.len() != grid.len() {
                    return Err(Error::Domain(format!(
                        "expected {} samples, got {}",
                        grid.len(),
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("samples must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x1: f64, x2: f64, half_width: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            Self::Zero | Self::Samples { .. } => 0.0,
            Self::CosProduct { amplitude, k1, k2, phase1, phase2 } => {
                amplitude * (k1 * x1 + phase1).cos() * (k2 * x2 + phase2).cos()
            }
            Self::Bump { amplitude } => {
                amplitude * 0.25 * (1.0 + (PI * x1 / half_width).cos()) * (1.0 + (PI * x2 / half_width).cos())
            }
        }
    }

    pub fn sample(&self, grid: &Grid2) -> Result<Vec<f64>> {
        self.check(grid)?;
        if let Self::Samples { values } = self {
            return Ok(values.clone());
        }
        let mut out = vec![0.0; grid.len()];
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                out[grid.index(i, j)] = self.eval(grid.x1(i), grid.x2(j), grid.half_width);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_periodic_wave_rejected() {
        let g = Grid2::periodic(std::f64::consts::PI, 16, 16).unwrap();
        assert!(FieldExpr::cos_product(1.0, 1.5, 1.0).sample(&g).is_err());
        assert!(FieldExpr::cos_product(1.0, 2.0, 1.0).sample(&g).is_ok());
    }

    #[test]
    fn bump_vanishes_on_boundary() {
        let g = Grid2::clamped(1.0, 9, 9).unwrap();
        let v = FieldExpr::Bump { amplitude: 2.0 }.sample(&g).unwrap();
        assert!(v[g.index(0, 4)].abs() < 1e-15);
        assert!((v[g.index(4, 4)] - 2.0).abs() < 1e-15);
    }
}
