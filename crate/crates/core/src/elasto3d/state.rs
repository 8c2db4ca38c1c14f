use nalgebra::Vector3;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::Grid3;
use crate::error::{Error, Result};
use crate::fields::FieldExpr;
use crate::material::MaterialModel;
use crate::plate2d::{Grid2, MembraneSolver};
use crate::reduction::{reduce, relaxed_out_of_plane};
use crate::tensor::{ElasticTensor3, Mat2};

pub type Vec3 = Vector3<f64>;
use crate::tensor::Mat3;

/// Deformation `y = B (x1, x2, h x3) + d` with `d` laterally periodic, and velocity `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabState {
    pub grid: Grid3,
    /// Homogeneous part `B`; the identity for the plate reference configuration.
    pub base: Mat3,
    pub d: Vec<Vec3>,
    pub w: Vec<Vec3>,
    pub t: f64,
    pub h: f64,
    pub alpha: f64,
}

impl SlabState {
    /// Undeformed slab `y = (x', h x3)` at rest.
    pub fn reference(grid: Grid3, h: f64, alpha: f64) -> Result<Self> {
        check_scaling(h, alpha)?;
        Ok(Self {
            grid,
            base: Mat3::identity(),
            d: vec![Vec3::zeros(); grid.len()],
            w: vec![Vec3::zeros(); grid.len()],
            t: 0.0,
            h,
            alpha,
        })
    }

    /// Scaled reference position `(x1, x2, h x3)` of a node.
    pub fn reference_position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        let g = &self.grid;
        Vec3::new(g.x1(i), g.x2(j), self.h * g.x3(k))
    }

    pub fn position(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.base * self.reference_position(i, j, k) + self.d[self.grid.index(i, j, k)]
    }

    /// `y - (x', h x3)` at a node.
    pub fn displacement(&self, i: usize, j: usize, k: usize) -> Vec3 {
        (self.base - Mat3::identity()) * self.reference_position(i, j, k) + self.d[self.grid.index(i, j, k)]
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().chain(&self.w).all(|v| v.iter().all(|x| x.is_finite()))
    }
}

pub(crate) fn check_scaling(h: f64, alpha: f64) -> Result<()> {
    let mut problems = Vec::new();
    if !(h > 0.0 && h <= 1.0) {
        problems.push(format!("h must lie in (0, 1] (got {h})"));
    }
    if !(alpha >= 3.0 && alpha.is_finite()) {
        problems.push(format!("alpha must be >= 3 (got {alpha})"));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Domain(problems.join("; ")))
    }
}

/// Limit plate data the slab is started from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    #[serde(default)]
    pub u1: FieldExpr,
    #[serde(default)]
    pub u2: FieldExpr,
    #[serde(default)]
    pub v0: FieldExpr,
    #[serde(default)]
    pub vhat0: FieldExpr,
    /// Replace `(u1, u2)` by the membrane equilibrium of `v0`.
    #[serde(default)]
    pub equilibrate_u0: bool,
    /// Add the thickness correction that makes the leading-order stress
    /// traction free across the thickness (see [`relax_transverse_strain`]).
    #[serde(default)]
    pub relax_transverse: bool,
}

/// Sampled limit fields on the lateral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFields {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub v0: Vec<f64>,
    pub vhat0: Vec<f64>,
}

impl InitialDataSpec {
    pub fn is_zero(&self) -> bool {
        self.u1.is_zero() && self.u2.is_zero() && self.v0.is_zero() && self.vhat0.is_zero()
    }

    pub fn check(&self, grid: &Grid2) -> Result<()> {
        for (name, f) in [("u1", &self.u1), ("u2", &self.u2), ("v0", &self.v0), ("vhat0", &self.vhat0)] {
            f.check(grid).map_err(|e| Error::Domain(format!("initial.{name}: {e}")))?;
        }
        Ok(())
    }

    /// Samples the fields, solving for the membrane equilibrium when requested.
    pub fn sample(&self, grid: &Grid2, model: &MaterialModel) -> Result<LimitFields> {
        if !grid.is_periodic() {
            return Err(Error::Domain("slab initial data must be periodic".into()));
        }
        self.check(grid)?;
        let v0 = self.v0.sample(grid)?;
        let (mut u1, mut u2) = (self.u1.sample(grid)?, self.u2.sample(grid)?);
        if self.equilibrate_u0 {
            let l2 = reduce(&model.tangent_at_identity())?;
            MembraneSolver::new(*grid, l2).solve(&v0, &mut u1, &mut u2)?;
        }
        Ok(LimitFields { u1, u2, v0, vhat0: self.vhat0.sample(grid)? })
    }
}

/// Periodic gradient `theta` with `(theta_i + theta_{i+1}) / 2 = (v_{i+1} - v_i) / dx`
/// along each grid line, the rotation that makes the transverse shear of the
/// ansatz vanish at cell midpoints. The Nyquist mode has no such gradient and is dropped.
pub fn kirchhoff_gradient(grid: &Grid2, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (n1, n2) = (grid.n1, grid.n2);
    let mut planner = FftPlanner::new();
    let mut theta1 = vec![0.0; v.len()];
    let mut theta2 = vec![0.0; v.len()];
    let mut line = |n: usize, dx: f64, get: &dyn Fn(usize) -> f64, set: &mut dyn FnMut(usize, f64)| {
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut buf: Vec<Complex<f64>> = (0..n).map(|m| Complex::new(get(m), 0.0)).collect();
        fwd.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            if 2 * k == n {
                *c = Complex::new(0.0, 0.0);
            } else {
                let factor = 2.0 / dx * (std::f64::consts::PI * k as f64 / n as f64).tan();
                *c *= Complex::new(0.0, factor);
            }
        }
        inv.process(&mut buf);
        for (m, c) in buf.iter().enumerate() {
            set(m, c.re / n as f64);
        }
    };
    for j in 0..n2 {
        line(n1, grid.dx1(), &|m| v[grid.index(m, j)], &mut |m, x| theta1[grid.index(m, j)] = x);
    }
    for i in 0..n1 {
        line(n2, grid.dx2(), &|m| v[grid.index(i, m)], &mut |m, x| theta2[grid.index(i, m)] = x);
    }
    (theta1, theta2)
}

/// Recovery ansatz
/// `y = (x' + h^(a-1) (u0 - x3 theta), h x3 + h^(a-2) v0)`, `w = (0, 0, h^(a-2) vhat0)`
/// with `theta` the discrete Kirchhoff gradient of `v0`.
pub fn build_initial_data(
    spec: &InitialDataSpec,
    h: f64,
    alpha: f64,
    grid: Grid3,
    model: &MaterialModel,
) -> Result<SlabState> {
    let lateral = grid.lateral();
    let fields = spec.sample(&lateral, model)?;
    let mut s = from_limit_fields(&fields, h, alpha, grid)?;
    if spec.relax_transverse {
        relax_transverse_strain(&mut s, &fields, &model.tangent_at_identity())?;
    }
    Ok(s)
}

/// Inverts the four-corner cell average `c = (q00 + q10 + q01 + q11) / 4`
/// on a periodic lattice. Modes annihilated by the average are set to zero.
fn invert_cell_average(grid: &Grid2, cells: &[f64]) -> Vec<f64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let mut planner = FftPlanner::new();
    let (f1, i1) = (planner.plan_fft_forward(n1), planner.plan_fft_inverse(n1));
    let (f2, i2) = (planner.plan_fft_forward(n2), planner.plan_fft_inverse(n2));
    let mut data: Vec<Complex<f64>> = cells.iter().map(|c| Complex::new(*c, 0.0)).collect();
    let mut col = vec![Complex::new(0.0, 0.0); n2];
    let columns = |data: &mut Vec<Complex<f64>>, col: &mut Vec<Complex<f64>>, plan: &dyn rustfft::Fft<f64>| {
        for i in 0..n1 {
            for j in 0..n2 {
                col[j] = data[i + n1 * j];
            }
            plan.process(col);
            for j in 0..n2 {
                data[i + n1 * j] = col[j];
            }
        }
    };
    for row in data.chunks_mut(n1) {
        f1.process(row);
    }
    columns(&mut data, &mut col, f2.as_ref());
    for j in 0..n2 {
        for i in 0..n1 {
            let phase = |k: usize, n: usize| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (Complex::new(1.0, 0.0) + Complex::new(a.cos(), a.sin())) * 0.5
            };
            let symbol = phase(i, n1) * phase(j, n2);
            let c = &mut data[i + n1 * j];
            *c = if symbol.norm() < 1e-10 { Complex::new(0.0, 0.0) } else { *c / symbol };
        }
    }
    columns(&mut data, &mut col, i2.as_ref());
    for row in data.chunks_mut(n1) {
        i1.process(row);
    }
    let scale = 1.0 / (n1 * n2) as f64;
    data.iter().map(|c| c.re * scale).collect()
}

/// Adds a thickness profile to `d` so that, cell by cell, the out-of-plane
/// strain equals the minimizing completion of the in-plane strain and the
/// leading-order stress `L G e3` vanishes.
///
/// The in-plane strain of the ansatz is
/// `h^(a-1) (sym Du - x3 D theta) + h^(2a-4) Dv (x) Dv / 2`
/// and its rotation already produces `e33 = h^(2a-4) |Dv|^2 / 2`; the
/// correction supplies the difference. Thickness means of the correction
/// are removed so the averaged fields are unchanged.
pub fn relax_transverse_strain(s: &mut SlabState, fields: &LimitFields, tangent: &ElasticTensor3) -> Result<()> {
    let grid = s.grid;
    let lateral = grid.lateral();
    let (h, alpha) = (s.h, s.alpha);
    let (t1, t2) = kirchhoff_gradient(&lateral, &fields.v0);
    let grad = |f: &[f64]| super::diagnostics::cell_gradient(&lateral, f);
    let (gu1, gu2, gv, gt1, gt2) = (grad(&fields.u1), grad(&fields.u2), grad(&fields.v0), grad(&t1), grad(&t2));
    let s_in = h.powf(alpha - 1.0);
    let s_nl = h.powf(2.0 * alpha - 4.0);
    let sym = |a: [f64; 2], b: [f64; 2]| Mat2::new(a[0], 0.5 * (a[1] + b[0]), 0.5 * (a[1] + b[0]), b[1]);
    let n = lateral.len();
    // per cell: constant and x3-slope of the third-column increment (F13, F23, F33)
    let mut coeffs = vec![[0.0; 6]; n];
    for c in 0..n {
        let g = gv[c];
        let outer = Mat2::new(g[0] * g[0], g[0] * g[1], g[0] * g[1], g[1] * g[1]);
        let gamma0 = sym(gu1[c], gu2[c]) * s_in + outer * (0.5 * s_nl);
        let gamma1 = -sym(gt1[c], gt2[c]) * s_in;
        let z0 = relaxed_out_of_plane(tangent, &gamma0)?;
        let z1 = relaxed_out_of_plane(tangent, &gamma1)?;
        let present = 0.5 * s_nl * (g[0] * g[0] + g[1] * g[1]);
        coeffs[c] = [z0[2], z0[1], z0[0] - present, z1[2], z1[1], z1[0]];
    }
    let mut nodal = [(); 6].map(|_| Vec::new());
    for (m, out) in nodal.iter_mut().enumerate() {
        let cells: Vec<f64> = coeffs.iter().map(|c| c[m]).collect();
        *out = invert_cell_average(&lateral, &cells);
    }
    // profile h (a0 x3 + a1 x3^2 / 2) minus its trapezoid mean
    let layer_mean: f64 = (0..grid.n3).map(|k| grid.layer_weight(k) * grid.x3(k).powi(2)).sum::<f64>() * 0.5;
    for k in 0..grid.n3 {
        let x3 = grid.x3(k);
        for q in 0..n {
            let node = q + k * n;
            for r in 0..3 {
                let (a0, a1) = (nodal[r][q], nodal[r + 3][q]);
                s.d[node][r] += h * (a0 * x3 + a1 * (0.5 * x3 * x3 - layer_mean));
            }
        }
    }
    Ok(())
}

/// As [`build_initial_data`] for already sampled fields.
pub fn from_limit_fields(fields: &LimitFields, h: f64, alpha: f64, grid: Grid3) -> Result<SlabState> {
    let mut s = SlabState::reference(grid, h, alpha)?;
    let lateral = grid.lateral();
    let (t1, t2) = kirchhoff_gradient(&lateral, &fields.v0);
    let s_in = h.powf(alpha - 1.0);
    let s_out = h.powf(alpha - 2.0);
    for k in 0..grid.n3 {
        let x3 = grid.x3(k);
        for q in 0..grid.lateral_len() {
            let node = q + k * grid.lateral_len();
            s.d[node] = Vec3::new(
                s_in * (fields.u1[q] - x3 * t1[q]),
                s_in * (fields.u2[q] - x3 * t2[q]),
                s_out * fields.v0[q],
            );
            s.w[node] = Vec3::new(0.0, 0.0, s_out * fields.vhat0[q]);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kirchhoff_gradient_midpoint_identity() {
        let g = Grid2::periodic(std::f64::consts::PI, 12, 10).unwrap();
        let v = FieldExpr::cos_product(1.0, 1.0, 2.0).sample(&g).unwrap();
        let (t1, t2) = kirchhoff_gradient(&g, &v);
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let (a, b) = (g.index(i, j), g.index((i + 1) % g.n1, j));
                assert!((0.5 * (t1[a] + t1[b]) - (v[b] - v[a]) / g.dx1()).abs() < 1e-12);
                let c = g.index(i, (j + 1) % g.n2);
                assert!((0.5 * (t2[a] + t2[c]) - (v[c] - v[a]) / g.dx2()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_spec_gives_reference_state() {
        let grid = Grid3::new(1.0, 8, 8, 3).unwrap();
        let m = MaterialModel::dist_so3(1.0).unwrap();
        let s = build_initial_data(&InitialDataSpec::default(), 0.1, 3.0, grid, &m).unwrap();
        assert_eq!(s, SlabState::reference(grid, 0.1, 3.0).unwrap());
    }

    #[test]
    fn rejects_bad_scaling() {
        let grid = Grid3::new(1.0, 8, 8, 3).unwrap();
        assert!(SlabState::reference(grid, 0.0, 3.0).is_err());
        assert!(SlabState::reference(grid, 0.1, 2.5).is_err());
    }
}
