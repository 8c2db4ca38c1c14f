//! Hyperelastic stored-energy densities vanishing on SO(3).
//!
//! Two models are provided:
//!
//! * `SquaredDistSO3`: `W(F) = kappa * dist^2(F, SO(3))`, with
//!   `DW(F) = 2 kappa (F - Pi(F))` where `Pi(F)` is the nearest rotation.
//!   It is frame indifferent, coercive with constant `kappa`, C^2 near SO(3)
//!   and has linear growth of `DW`.
//! * `StVenantKirchhoff`: `W(F) = mu |E|^2 + lambda/2 (tr E)^2`,
//!   `E = (F^T F - Id)/2`. Frame indifferent and C^2, but `DW` grows cubically
//!   and `W` also vanishes on reflections, so it is only used at desk scale
//!   and as a second elastic tensor for the plate reduction.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ElasticTensor3, Mat3};

/// Relative threshold below which `sigma2 + sigma3` is treated as zero.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialModel {
    #[serde(rename = "dist_so3")]
    SquaredDistSO3 { kappa: f64 },
    #[serde(rename = "svk")]
    StVenantKirchhoff { mu: f64, lambda: f64 },
}

/// Which structural hypotheses on `W` a model satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub frame_indifferent: bool,
    pub vanishes_on_rotations: bool,
    pub quadratic_lower_bound: bool,
    pub c2_near_rotations: bool,
    pub linear_stress_growth: bool,
}

impl MaterialModel {
    pub fn dist_so3(kappa: f64) -> Result<Self> {
        Self::SquaredDistSO3 { kappa }.validated()
    }

    pub fn svk(mu: f64, lambda: f64) -> Result<Self> {
        Self::StVenantKirchhoff { mu, lambda }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let problems = self.violations();
        if problems.is_empty() {
            Ok(self)
        } else {
            let msgs: Vec<String> = problems.into_iter().map(|(f, m)| format!("{f}: {m}")).collect();
            Err(Error::Domain(msgs.join("; ")))
        }
    }

    /// Parameter violations as `(field, message)` pairs.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        match *self {
            Self::SquaredDistSO3 { kappa } => {
                if !(kappa.is_finite() && kappa > 0.0) {
                    out.push(("kappa", format!("must be > 0 (got {kappa})")));
                }
            }
            Self::StVenantKirchhoff { mu, lambda } => {
                if !(mu.is_finite() && mu > 0.0) {
                    out.push(("mu", format!("must be > 0 (got {mu})")));
                }
                if !(lambda.is_finite() && lambda >= 0.0) {
                    out.push(("lambda", format!("must be >= 0 (got {lambda})")));
                }
            }
        }
        out
    }

    pub fn hypotheses(&self) -> Hypotheses {
        match self {
            Self::SquaredDistSO3 { .. } => Hypotheses {
                frame_indifferent: true,
                vanishes_on_rotations: true,
                quadratic_lower_bound: true,
                c2_near_rotations: true,
                linear_stress_growth: true,
            },
            Self::StVenantKirchhoff { .. } => Hypotheses {
                frame_indifferent: true,
                vanishes_on_rotations: true,
                // W vanishes on reflections too
                quadratic_lower_bound: false,
                c2_near_rotations: true,
                linear_stress_growth: false,
            },
        }
    }

    pub fn energy_density(&self, f: &Mat3) -> Result<f64> {
        check_finite(f)?;
        Ok(match *self {
            Self::SquaredDistSO3 { kappa } => kappa * dist_squared_to_rotations(f),
            Self::StVenantKirchhoff { mu, lambda } => {
                let e = green_strain(f);
                let tr = e.trace();
                mu * e.norm_squared() + 0.5 * lambda * tr * tr
            }
        })
    }

    /// First Piola-Kirchhoff stress `DW(F)`.
    pub fn stress(&self, f: &Mat3) -> Result<Mat3> {
        check_finite(f)?;
        match *self {
            Self::SquaredDistSO3 { kappa } => {
                let rot = nearest_rotation(f)?;
                Ok((f - rot) * (2.0 * kappa))
            }
            Self::StVenantKirchhoff { mu, lambda } => {
                let e = green_strain(f);
                let s = e * (2.0 * mu) + Mat3::identity() * (lambda * e.trace());
                Ok(f * s)
            }
        }
    }

    /// `D^2 W(Id)` in Voigt form. Both models linearize to an isotropic tensor:
    /// `Q3(F) = 2 kappa |sym F|^2` and `Q3(F) = 2 mu |sym F|^2 + lambda (tr F)^2`.
    pub fn tangent_at_identity(&self) -> ElasticTensor3 {
        match *self {
            Self::SquaredDistSO3 { kappa } => ElasticTensor3::isotropic(kappa, 0.0),
            Self::StVenantKirchhoff { mu, lambda } => ElasticTensor3::isotropic(mu, lambda),
        }
    }
}

fn check_finite(f: &Mat3) -> Result<()> {
    if f.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("deformation gradient has non-finite entries".into()))
    }
}

fn green_strain(f: &Mat3) -> Mat3 {
    (f.transpose() * f - Mat3::identity()) * 0.5
}

/// Sorted SVD `F = U diag(s1, s2, s3) V^T` together with `d = det(U V^T)`;
/// the nearest rotation is `U diag(1, 1, d) V^T`.
struct SignedSvd {
    u: Mat3,
    v_t: Mat3,
    sigma: [f64; 3],
    /// `det(U V^T)`, +1 or -1.
    sign: f64,
}

fn signed_svd(f: &Mat3) -> SignedSvd {
    let svd = SVD::new(*f, true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let sign = if (u * v_t).determinant() < 0.0 { -1.0 } else { 1.0 };
    SignedSvd { u, v_t, sigma: [s[0], s[1], s[2]], sign }
}

fn dist_squared_to_rotations(f: &Mat3) -> f64 {
    let svd = signed_svd(f);
    let [s1, s2, s3] = svd.sigma;
    (s1 - 1.0).powi(2) + (s2 - 1.0).powi(2) + (s3 - svd.sign).powi(2)
}

/// Nearest rotation for any finite `F`, failing only where it is not unique.
fn nearest_rotation(f: &Mat3) -> Result<Mat3> {
    let svd = signed_svd(f);
    let [s1, s2, s3] = svd.sigma;
    let gap = s2 + svd.sign * s3;
    if gap.abs() <= SINGULAR_TOL * s1.max(1.0) {
        return Err(Error::SingularPoint(gap));
    }
    let d = Mat3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, svd.sign));
    Ok(svd.u * d * svd.v_t)
}

/// Rotation minimizing `|F - R|` over SO(3), for `det F > 0`.
pub fn polar_rotation(f: &Mat3) -> Result<Mat3> {
    check_finite(f)?;
    let det = f.determinant();
    if det <= 0.0 {
        return Err(Error::Orientation(det));
    }
    nearest_rotation(f)
}

/// Squared distance of `F` from SO(3).
pub fn dist_squared(f: &Mat3) -> f64 {
    dist_squared_to_rotations(f)
}
