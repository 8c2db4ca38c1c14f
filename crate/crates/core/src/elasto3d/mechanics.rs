//! Discrete elastic energy `sum_cells sum_g (V/2) W(F_g)` and its nodal gradient.
//!
//! In each cell the scaled gradient is that of the trilinear interpolant,
//! taken at the lateral cell centre and at the two Gauss levels across the
//! cell's thickness. A single lateral point keeps the stencil compact; two
//! thickness points integrate the bending energy, which is quadratic in `x3`,
//! exactly.

use super::grid::Grid3;
use super::state::{SlabState, Vec3};
use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::tensor::Mat3;

/// Local thickness coordinates of the two Gauss levels inside a cell.
pub const GAUSS_LEVELS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Corner `c = a + 2 b + 4 c3` of cell `(ci, cj, k)`.
#[inline]
pub(crate) fn cell_corners(g: &Grid3, ci: usize, cj: usize, k: usize) -> [usize; 8] {
    let i1 = (ci + 1) % g.n1;
    let j1 = (cj + 1) % g.n2;
    [
        g.index(ci, cj, k),
        g.index(i1, cj, k),
        g.index(ci, j1, k),
        g.index(i1, j1, k),
        g.index(ci, cj, k + 1),
        g.index(i1, cj, k + 1),
        g.index(ci, j1, k + 1),
        g.index(i1, j1, k + 1),
    ]
}

/// `dF_g / dd_c = e (x) coef[g][c]`, the third entry already divided by `h`.
pub(crate) fn gradient_coefficients(g: &Grid3, h: f64) -> [[Vec3; 8]; 2] {
    let mut out = [[Vec3::zeros(); 8]; 2];
    for (gi, zeta) in GAUSS_LEVELS.iter().enumerate() {
        for c in 0..8 {
            let (a, b, top) = (c & 1, (c >> 1) & 1, (c >> 2) & 1);
            let sa = if a == 1 { 1.0 } else { -1.0 };
            let sb = if b == 1 { 1.0 } else { -1.0 };
            let sc = if top == 1 { 1.0 } else { -1.0 };
            let level = if top == 1 { *zeta } else { 1.0 - zeta };
            out[gi][c] = Vec3::new(
                sa * 0.5 * level / g.dx1(),
                sb * 0.5 * level / g.dx2(),
                sc * 0.25 / (g.dx3() * h),
            );
        }
    }
    out
}

/// Number of cells `n1 * n2 * (n3 - 1)`; cell `(ci, cj, k)` has index `ci + n1 (cj + n2 k)`.
pub fn cell_count(g: &Grid3) -> usize {
    g.n1 * g.n2 * (g.n3 - 1)
}

/// Scaled gradients `[F_lower, F_upper]` at the two Gauss levels of every cell.
pub fn cell_gradients(s: &SlabState) -> Vec<[Mat3; 2]> {
    let g = &s.grid;
    let coef = gradient_coefficients(g, s.h);
    let mut out = Vec::with_capacity(cell_count(g));
    for k in 0..g.n3 - 1 {
        for cj in 0..g.n2 {
            for ci in 0..g.n1 {
                let corners = cell_corners(g, ci, cj, k);
                let mut f = [s.base, s.base];
                for (gi, fg) in f.iter_mut().enumerate() {
                    for (c, &node) in corners.iter().enumerate() {
                        *fg += s.d[node] * coef[gi][c].transpose();
                    }
                }
                out.push(f);
            }
        }
    }
    out
}

/// `int W(grad_h y)`.
pub fn elastic_energy(s: &SlabState, model: &MaterialModel) -> Result<f64> {
    let half = 0.5 * s.grid.cell_volume();
    let mut e = 0.0;
    for f in cell_gradients(s) {
        e += half * (model.energy_density(&f[0])? + model.energy_density(&f[1])?);
    }
    Ok(e)
}

/// Nodal force `-dE/dd`, the weak form of `div_h DW(grad_h y)` with traction-free faces.
pub fn internal_force(s: &SlabState, model: &MaterialModel, out: &mut [Vec3]) -> Result<()> {
    let g = &s.grid;
    let coef = gradient_coefficients(g, s.h);
    let half = 0.5 * g.cell_volume();
    out.iter_mut().for_each(|f| *f = Vec3::zeros());
    let mut cell = 0;
    for k in 0..g.n3 - 1 {
        for cj in 0..g.n2 {
            for ci in 0..g.n1 {
                let corners = cell_corners(g, ci, cj, k);
                for cg in &coef {
                    let mut f = s.base;
                    for (c, &node) in corners.iter().enumerate() {
                        f += s.d[node] * cg[c].transpose();
                    }
                    let p = model.stress(&f).map_err(|e| match e {
                        Error::Domain(_) => Error::BlowUp { time: s.t, reason: format!("non-finite stress in cell {cell}") },
                        other => other,
                    })? * half;
                    for (c, &node) in corners.iter().enumerate() {
                        out[node] -= p * cg[c];
                    }
                }
                cell += 1;
            }
        }
    }
    Ok(())
}

/// Nodal scaled gradient: centred lateral differences (periodic), centred
/// differences inside the thickness and one-sided second-order differences
/// on the faces, third column divided by `h`.
pub fn scaled_gradient(s: &SlabState) -> Vec<Mat3> {
    let g = &s.grid;
    let mut out = Vec::with_capacity(g.len());
    let (dx1, dx2, dx3) = (g.dx1(), g.dx2(), g.dx3());
    let d = |i: usize, j: usize, k: usize| s.d[g.index(i, j, k)];
    for k in 0..g.n3 {
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let (ip, im) = ((i + 1) % g.n1, (i + g.n1 - 1) % g.n1);
                let (jp, jm) = ((j + 1) % g.n2, (j + g.n2 - 1) % g.n2);
                let c1 = (d(ip, j, k) - d(im, j, k)) / (2.0 * dx1);
                let c2 = (d(i, jp, k) - d(i, jm, k)) / (2.0 * dx2);
                let c3 = if k == 0 {
                    (-3.0 * d(i, j, 0) + 4.0 * d(i, j, 1) - d(i, j, 2)) / (2.0 * dx3)
                } else if k + 1 == g.n3 {
                    (3.0 * d(i, j, k) - 4.0 * d(i, j, k - 1) + d(i, j, k - 2)) / (2.0 * dx3)
                } else {
                    (d(i, j, k + 1) - d(i, j, k - 1)) / (2.0 * dx3)
                };
                let mut f = s.base;
                for r in 0..3 {
                    f[(r, 0)] += c1[r];
                    f[(r, 1)] += c2[r];
                    f[(r, 2)] += c3[r] / s.h;
                }
                out.push(f);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn grid() -> Grid3 {
        Grid3::new(1.0, 8, 8, 4).unwrap()
    }

    fn perturbed(h: f64, amp: f64) -> SlabState {
        let mut s = SlabState::reference(grid(), h, 3.0).unwrap();
        for (n, d) in s.d.iter_mut().enumerate() {
            let x = n as f64;
            *d = Vec3::new((1.3 * x).sin(), (0.7 * x).cos(), (2.1 * x).sin()) * amp;
        }
        s
    }

    #[test]
    fn reference_state_is_stress_free() {
        let s = SlabState::reference(grid(), 0.1, 3.0).unwrap();
        let m = MaterialModel::dist_so3(1.0).unwrap();
        let mut f = vec![Vec3::zeros(); s.grid.len()];
        internal_force(&s, &m, &mut f).unwrap();
        assert!(f.iter().all(|v| v.norm() == 0.0));
        assert_eq!(elastic_energy(&s, &m).unwrap(), 0.0);
        assert!(scaled_gradient(&s).iter().all(|f| (f - Mat3::identity()).norm() == 0.0));
    }

    #[test]
    fn affine_maps_are_recovered() {
        let mut s = SlabState::reference(grid(), 0.2, 3.0).unwrap();
        s.base = Mat3::new(1.1, 0.2, -0.3, 0.05, 0.9, 0.1, 0.0, 0.3, 1.2);
        for f in cell_gradients(&s).iter().flatten().chain(scaled_gradient(&s).iter()) {
            assert!((f - s.base).norm() < 1e-14);
        }
        // a thickness-direction affine displacement lives in d
        let mut t = SlabState::reference(grid(), 0.2, 3.0).unwrap();
        for k in 0..t.grid.n3 {
            for q in 0..t.grid.lateral_len() {
                t.d[q + k * t.grid.lateral_len()] = Vec3::new(0.1, -0.2, 0.05) * (0.2 * t.grid.x3(k));
            }
        }
        let mut expect = Mat3::identity();
        expect[(0, 2)] += 0.1;
        expect[(1, 2)] -= 0.2;
        expect[(2, 2)] += 0.05;
        for f in cell_gradients(&t).iter().flatten().chain(scaled_gradient(&t).iter()) {
            assert!((f - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn rigid_rotation_is_force_free() {
        let mut s = SlabState::reference(grid(), 0.1, 3.0).unwrap();
        s.base = *Rotation3::from_scaled_axis(Vec3::new(0.4, -0.2, 0.9)).matrix();
        let m = MaterialModel::dist_so3(1.0).unwrap();
        let mut f = vec![Vec3::zeros(); s.grid.len()];
        internal_force(&s, &m, &mut f).unwrap();
        assert!(f.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn force_is_energy_gradient_and_sums_to_zero() {
        let m = MaterialModel::svk(1.0, 0.5).unwrap();
        let s = perturbed(0.3, 0.01);
        let mut f = vec![Vec3::zeros(); s.grid.len()];
        internal_force(&s, &m, &mut f).unwrap();
        let total: Vec3 = f.iter().sum();
        assert!(total.norm() < 1e-12);
        for node in [0, 77, 200] {
            for r in 0..3 {
                let eps = 1e-6;
                let (mut a, mut b) = (s.clone(), s.clone());
                a.d[node][r] += eps;
                b.d[node][r] -= eps;
                let fd = -(elastic_energy(&a, &m).unwrap() - elastic_energy(&b, &m).unwrap()) / (2.0 * eps);
                assert!((fd - f[node][r]).abs() < 1e-7 * fd.abs().max(1e-3), "{fd} {}", f[node][r]);
            }
        }
    }

    #[test]
    fn forces_rotate_with_the_body() {
        let m = MaterialModel::dist_so3(1.0).unwrap();
        let s = perturbed(0.2, 0.02);
        let r = *Rotation3::from_scaled_axis(Vec3::new(-0.3, 0.8, 0.25)).matrix();
        let mut rs = s.clone();
        rs.base = r * s.base;
        rs.d.iter_mut().for_each(|d| *d = r * *d);
        let (mut f, mut rf) = (vec![Vec3::zeros(); s.grid.len()], vec![Vec3::zeros(); s.grid.len()]);
        internal_force(&s, &m, &mut f).unwrap();
        internal_force(&rs, &m, &mut rf).unwrap();
        for (a, b) in f.iter().zip(&rf) {
            assert!((r * a - b).norm() < 1e-10);
        }
    }
}
