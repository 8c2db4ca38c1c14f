use serde::Serialize;

use super::grid::Grid3;
use super::integrator::slab_energy;
use super::mechanics::{cell_gradients, GAUSS_LEVELS};
use super::state::{build_initial_data, InitialDataSpec, SlabState, Vec3};
use crate::error::Result;
use crate::material::{polar_rotation, MaterialModel};
use crate::plate2d::Grid2;
use crate::reduction::reduce;
use crate::tensor::{Mat2, Mat3};

/// Thickness averages on the lateral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Averages {
    /// `h^-(alpha-1) int (y' - x') dx3`.
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// `h^-(alpha-2) int y3 dx3`.
    pub v: Vec<f64>,
    /// `h^-(alpha-2) int w3 dx3`.
    pub dv: Vec<f64>,
    /// `int x3 (y - (x', h x3)) dx3`.
    pub zeta: Vec<Vec3>,
}

/// Trapezoid averages in `x3`; the first moment is integrated exactly for
/// the piecewise-linear interpolant.
pub fn averages(s: &SlabState) -> Averages {
    let g = &s.grid;
    let n = g.lateral_len();
    let s_in = s.h.powf(-(s.alpha - 1.0));
    let s_out = s.h.powf(-(s.alpha - 2.0));
    let mut out = Averages {
        u1: vec![0.0; n],
        u2: vec![0.0; n],
        v: vec![0.0; n],
        dv: vec![0.0; n],
        zeta: vec![Vec3::zeros(); n],
    };
    for j in 0..g.n2 {
        for i in 0..g.n1 {
            let q = i + g.n1 * j;
            let mut mean = Vec3::zeros();
            let mut w3 = 0.0;
            for k in 0..g.n3 {
                let wk = g.layer_weight(k);
                mean += s.displacement(i, j, k) * wk;
                w3 += wk * s.w[g.index(i, j, k)][2];
            }
            let mut moment = Vec3::zeros();
            for k in 0..g.n3 - 1 {
                let (a, b) = (g.x3(k), g.x3(k + 1));
                let (fa, fb) = (s.displacement(i, j, k), s.displacement(i, j, k + 1));
                moment += (fa * (2.0 * a + b) + fb * (a + 2.0 * b)) * ((b - a) / 6.0);
            }
            out.u1[q] = s_in * mean[0];
            out.u2[q] = s_in * mean[1];
            out.v[q] = s_out * (mean[2]);
            out.dv[q] = s_out * w3;
            out.zeta[q] = moment;
        }
    }
    out
}

/// Rotation proxy and strain decomposition `grad_h y = R (Id + h^2 G)`.
#[derive(Debug, Clone)]
pub struct Rigidity {
    /// `R_h` per lateral cell `ci + n1 cj`.
    pub rotations: Vec<Mat3>,
    /// `(R_h - Id) / h` per lateral cell.
    pub a: Vec<Mat3>,
    /// `(R_h^T F_g - Id) / h^2` per slab cell and Gauss level.
    pub g: Vec<[Mat3; 2]>,
    /// `||sym A||_{L2} / max(||A||_{L2}, eps)`.
    pub sym_ratio: f64,
    pub a_norm: f64,
    /// Largest `|sym((R - Id)/h^2) + A^T A / 2|`, zero up to rounding.
    pub identity_defect: f64,
}

const RATIO_EPS: f64 = 1e-300;

pub fn rigidity_diagnostics(s: &SlabState) -> Result<Rigidity> {
    let g = &s.grid;
    let lateral = g.lateral_len();
    let grads = cell_gradients(s);
    let half = 0.5 * g.dx3();
    let mut mean = vec![Mat3::zeros(); lateral];
    for (c, f) in grads.iter().enumerate() {
        mean[c % lateral] += (f[0] + f[1]) * half;
    }
    let id = Mat3::identity();
    let area = g.dx1() * g.dx2();
    let (mut sym2, mut all2, mut defect) = (0.0, 0.0, 0.0f64);
    let mut rotations = Vec::with_capacity(lateral);
    let mut a = Vec::with_capacity(lateral);
    for f in &mean {
        let r = polar_rotation(f)?;
        let ah = (r - id) / s.h;
        let sym = (ah + ah.transpose()) * 0.5;
        sym2 += area * sym.norm_squared();
        all2 += area * ah.norm_squared();
        let lhs = (r - id) / (s.h * s.h);
        defect = defect.max(((lhs + lhs.transpose()) * 0.5 + ah.transpose() * ah * 0.5).norm());
        rotations.push(r);
        a.push(ah);
    }
    let inv_h2 = 1.0 / (s.h * s.h);
    let strains = grads
        .iter()
        .enumerate()
        .map(|(c, f)| {
            let rt = rotations[c % lateral].transpose();
            [(rt * f[0] - id) * inv_h2, (rt * f[1] - id) * inv_h2]
        })
        .collect();
    Ok(Rigidity {
        rotations,
        a,
        g: strains,
        sym_ratio: sym2.sqrt() / all2.sqrt().max(RATIO_EPS),
        a_norm: all2.sqrt(),
        identity_defect: defect,
    })
}

/// Thickness moments of the rescaled stress `E = DW(Id + h^2 G) / h^2`.
#[derive(Debug, Clone)]
pub struct StressMoments {
    /// `E` per slab cell and Gauss level.
    pub e: Vec<[Mat3; 2]>,
    /// `int E dx3` per lateral cell.
    pub e_bar: Vec<Mat3>,
    /// `int x3 E dx3` per lateral cell.
    pub e_hat: Vec<Mat3>,
    /// `||E e3||_{L2}` over the slab.
    pub e3_norm: f64,
}

pub fn stress_moments(s: &SlabState, rig: &Rigidity, model: &MaterialModel) -> Result<StressMoments> {
    let g = &s.grid;
    let lateral = g.lateral_len();
    let (h2, half) = (s.h * s.h, 0.5 * g.dx3());
    let id = Mat3::identity();
    let mut e = Vec::with_capacity(rig.g.len());
    let mut e_bar = vec![Mat3::zeros(); lateral];
    let mut e_hat = vec![Mat3::zeros(); lateral];
    let mut e3 = 0.0;
    for (c, gc) in rig.g.iter().enumerate() {
        let k = c / lateral;
        let mut pair = [Mat3::zeros(); 2];
        for level in 0..2 {
            let stress = model.stress(&(id + gc[level] * h2))? / h2;
            let x3 = g.x3(k) + GAUSS_LEVELS[level] * g.dx3();
            e_bar[c % lateral] += stress * half;
            e_hat[c % lateral] += stress * (half * x3);
            e3 += half * g.dx1() * g.dx2() * stress.column(2).norm_squared();
            pair[level] = stress;
        }
        e.push(pair);
    }
    Ok(StressMoments { e, e_bar, e_hat, e3_norm: e3.sqrt() })
}

/// Cell-centre gradient of a nodal field (edge differences averaged over the cell).
pub fn cell_gradient(grid: &Grid2, f: &[f64]) -> Vec<[f64; 2]> {
    let (n1, n2) = (grid.n1, grid.n2);
    let mut out = Vec::with_capacity(n1 * n2);
    for cj in 0..n2 {
        for ci in 0..n1 {
            let (i1, j1) = ((ci + 1) % n1, (cj + 1) % n2);
            let at = |i, j| f[grid.index(i, j)];
            out.push([
                0.5 * (at(i1, cj) - at(ci, cj) + at(i1, j1) - at(ci, j1)) / grid.dx1(),
                0.5 * (at(ci, j1) - at(ci, cj) + at(i1, j1) - at(i1, cj)) / grid.dx2(),
            ]);
        }
    }
    out
}

/// `||E_bar'' - L2(sym D u + 1/2 Dv (x) Dv)||_{L2}` with cell-centre gradients of the limit fields.
pub fn membrane_moment_error(
    moments: &StressMoments,
    grid: &Grid3,
    model: &MaterialModel,
    u1: &[f64],
    u2: &[f64],
    v: &[f64],
) -> Result<f64> {
    let l2 = reduce(&model.tangent_at_identity())?;
    let lateral = grid.lateral();
    let (g1, g2, gv) = (cell_gradient(&lateral, u1), cell_gradient(&lateral, u2), cell_gradient(&lateral, v));
    let area = grid.dx1() * grid.dx2();
    let mut sum = 0.0;
    for c in 0..lateral.len() {
        let shear = 0.5 * (g1[c][1] + g2[c][0]);
        let eps = Mat2::new(
            g1[c][0] + 0.5 * gv[c][0] * gv[c][0],
            shear + 0.5 * gv[c][0] * gv[c][1],
            shear + 0.5 * gv[c][0] * gv[c][1],
            g2[c][1] + 0.5 * gv[c][1] * gv[c][1],
        );
        let target = l2.apply(&eps);
        let got = moments.e_bar[c].fixed_view::<2, 2>(0, 0).into_owned();
        sum += area * (got - target).norm_squared();
    }
    Ok(sum.sqrt())
}

/// `||E_hat'' + (1/12) L2(sym D theta)||_{L2}` for rotation fields `theta`.
pub fn bending_moment_error(
    moments: &StressMoments,
    grid: &Grid3,
    model: &MaterialModel,
    theta1: &[f64],
    theta2: &[f64],
) -> Result<f64> {
    let l2 = reduce(&model.tangent_at_identity())?;
    let lateral = grid.lateral();
    let (g1, g2) = (cell_gradient(&lateral, theta1), cell_gradient(&lateral, theta2));
    let area = grid.dx1() * grid.dx2();
    let mut sum = 0.0;
    for c in 0..lateral.len() {
        let shear = 0.5 * (g1[c][1] + g2[c][0]);
        let hess = Mat2::new(g1[c][0], shear, shear, g2[c][1]);
        let target = -l2.apply(&hess) / 12.0;
        let got = moments.e_hat[c].fixed_view::<2, 2>(0, 0).into_owned();
        sum += area * (got - target).norm_squared();
    }
    Ok(sum.sqrt())
}

/// Initial energy against the predicted scaling `h^(2 alpha - 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub h: f64,
    pub energy: f64,
    pub ratio: f64,
}

pub fn verify_scaling(
    spec: &InitialDataSpec,
    hs: &[f64],
    alpha: f64,
    grid: Grid3,
    model: &MaterialModel,
) -> Result<Vec<ScalingPoint>> {
    hs.iter()
        .map(|&h| {
            let s = build_initial_data(spec, h, alpha, grid, model)?;
            let e = slab_energy(&s, model, 0.0)?;
            let energy = e.total();
            Ok(ScalingPoint { h, energy, ratio: energy / h.powf(2.0 * alpha - 2.0) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_state_diagnostics_vanish() {
        let grid = Grid3::new(1.0, 8, 8, 3).unwrap();
        let s = SlabState::reference(grid, 0.1, 3.0).unwrap();
        let av = averages(&s);
        assert!(av.u1.iter().chain(&av.u2).chain(&av.v).chain(&av.dv).all(|x| *x == 0.0));
        assert!(av.zeta.iter().all(|z| z.norm() == 0.0));
        let rig = rigidity_diagnostics(&s).unwrap();
        assert!(rig.a.iter().all(|a| a.norm() < 1e-14));
        assert!(rig.g.iter().flatten().all(|g| g.norm() < 1e-12));
        assert_eq!(rig.sym_ratio, 0.0);
        let m = MaterialModel::dist_so3(1.0).unwrap();
        let mom = stress_moments(&s, &rig, &m).unwrap();
        assert!(mom.e3_norm < 1e-10);
    }

    #[test]
    fn first_moment_is_exact_for_affine_profiles() {
        let grid = Grid3::new(1.0, 8, 8, 4).unwrap();
        let mut s = SlabState::reference(grid, 0.1, 3.0).unwrap();
        for k in 0..grid.n3 {
            for q in 0..grid.lateral_len() {
                s.d[q + k * grid.lateral_len()] = Vec3::new(1.0 + 2.0 * grid.x3(k), 0.0, 0.0);
            }
        }
        // int x3 (1 + 2 x3) over (-1/2, 1/2) = 1/6
        assert!(averages(&s).zeta.iter().all(|z| (z[0] - 1.0 / 6.0).abs() < 1e-15));
    }
}
