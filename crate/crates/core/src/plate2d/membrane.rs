//! In-plane equilibrium `div L2(sym grad u + 1/2 grad v (x) grad v) = 0`.
//!
//! The membrane energy `1/2 int Q2(sym grad u + 1/2 grad v (x) grad v)` is
//! discretized with bilinear elements on the node lattice and 2x2 Gauss
//! quadrature; `u` minimizes it for given `v` (one CG solve), and the
//! coupling force on `v` is minus its `v`-gradient at that `u`.

use super::grid::Grid2;
use crate::cg::{self, CgOptions};
use crate::error::Result;
use crate::tensor::{Mat2, ReducedTensor2};

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

#[derive(Debug, Clone)]
pub struct MembraneSolver {
    grid: Grid2,
    l2: ReducedTensor2,
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// Cell corner nodes `[p00, p10, p01, p11]`.
type Corners = [usize; 4];

#[derive(Clone, Copy)]
struct ShapeGrad {
    d1: [f64; 4],
    d2: [f64; 4],
}

impl ShapeGrad {
    fn at(xi: f64, eta: f64, dx1: f64, dx2: f64) -> Self {
        Self {
            d1: [-(1.0 - eta) / dx1, (1.0 - eta) / dx1, -eta / dx1, eta / dx1],
            d2: [-(1.0 - xi) / dx2, -xi / dx2, (1.0 - xi) / dx2, xi / dx2],
        }
    }

    #[inline]
    fn grad(&self, f: &[f64], c: &Corners) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..4 {
            g[0] += self.d1[k] * f[c[k]];
            g[1] += self.d2[k] * f[c[k]];
        }
        g
    }
}

impl MembraneSolver {
    pub fn new(grid: Grid2, l2: ReducedTensor2) -> Self {
        Self { grid, l2, tolerance: 1e-11, max_iterations: 10 * grid.len() }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    fn cells(&self) -> Vec<Corners> {
        let g = &self.grid;
        let (nc1, nc2) = g.cells();
        let mut out = Vec::with_capacity(nc1 * nc2);
        for cj in 0..nc2 {
            for ci in 0..nc1 {
                let at = |di, dj| g.offset(ci, cj, di, dj).expect("cell corner inside lattice");
                out.push([at(0, 0), at(1, 0), at(0, 1), at(1, 1)]);
            }
        }
        out
    }

    fn shapes(&self) -> [ShapeGrad; 4] {
        let (dx1, dx2) = (self.grid.dx1(), self.grid.dx2());
        [
            ShapeGrad::at(GAUSS[0], GAUSS[0], dx1, dx2),
            ShapeGrad::at(GAUSS[1], GAUSS[0], dx1, dx2),
            ShapeGrad::at(GAUSS[0], GAUSS[1], dx1, dx2),
            ShapeGrad::at(GAUSS[1], GAUSS[1], dx1, dx2),
        ]
    }

    fn quad_weight(&self) -> f64 {
        0.25 * self.grid.dx1() * self.grid.dx2()
    }

    /// Visits every quadrature point with `(corners, shape gradients, strain)`.
    fn for_each_point<F>(&self, u1: Option<(&[f64], &[f64])>, v: Option<&[f64]>, mut f: F)
    where
        F: FnMut(&Corners, &ShapeGrad, [f64; 2], Mat2),
    {
        let shapes = self.shapes();
        for c in self.cells() {
            for s in &shapes {
                let gv = v.map(|v| s.grad(v, &c)).unwrap_or([0.0; 2]);
                let mut eps = Mat2::new(
                    0.5 * gv[0] * gv[0],
                    0.5 * gv[0] * gv[1],
                    0.5 * gv[0] * gv[1],
                    0.5 * gv[1] * gv[1],
                );
                if let Some((a, b)) = u1 {
                    let ga = s.grad(a, &c);
                    let gb = s.grad(b, &c);
                    eps[(0, 0)] += ga[0];
                    eps[(1, 1)] += gb[1];
                    let shear = 0.5 * (ga[1] + gb[0]);
                    eps[(0, 1)] += shear;
                    eps[(1, 0)] += shear;
                }
                f(&c, s, gv, eps);
            }
        }
    }

    /// `1/2 sum w Q2(eps)`.
    pub fn energy(&self, u1: &[f64], u2: &[f64], v: &[f64]) -> f64 {
        let w = self.quad_weight();
        let mut e = 0.0;
        self.for_each_point(Some((u1, u2)), Some(v), |_, _, _, eps| e += 0.5 * w * self.l2.quadratic(&eps));
        e
    }

    /// Gradient of the membrane energy with respect to `u` (stacked `[u1, u2]`),
    /// zeroed on constrained nodes.
    fn u_gradient(&self, u: Option<(&[f64], &[f64])>, v: Option<&[f64]>, out: &mut [f64]) {
        let n = self.grid.len();
        let w = self.quad_weight();
        out.fill(0.0);
        self.for_each_point(u, v, |c, s, _, eps| {
            let stress = self.l2.apply(&eps);
            for k in 0..4 {
                out[c[k]] += w * (stress[(0, 0)] * s.d1[k] + stress[(0, 1)] * s.d2[k]);
                out[n + c[k]] += w * (stress[(1, 0)] * s.d1[k] + stress[(1, 1)] * s.d2[k]);
            }
        });
        self.zero_constrained(out);
    }

    fn zero_constrained(&self, stacked: &mut [f64]) {
        let g = &self.grid;
        let n = g.len();
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                if !g.is_free(i, j) {
                    let k = g.index(i, j);
                    stacked[k] = 0.0;
                    stacked[n + k] = 0.0;
                }
            }
        }
    }

    fn project_mean(&self, stacked: &mut [f64]) {
        let n = self.grid.len();
        let (a, b) = stacked.split_at_mut(n);
        cg::remove_mean(a);
        cg::remove_mean(b);
    }

    /// Weak residual tested against each free nodal basis function, stacked `[e1 tests, e2 tests]`.
    pub fn residual_vector(&self, u1: &[f64], u2: &[f64], v: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; 2 * self.grid.len()];
        self.u_gradient(Some((u1, u2)), Some(v), &mut r);
        r
    }

    /// Max-norm of [`Self::residual_vector`].
    pub fn residual(&self, u1: &[f64], u2: &[f64], v: &[f64]) -> f64 {
        self.residual_vector(u1, u2, v).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Solves for `u` given `v`; `u1`, `u2` hold the initial guess on entry.
    pub fn solve(&self, v: &[f64], u1: &mut [f64], u2: &mut [f64]) -> Result<f64> {
        let n = self.grid.len();
        let mut rhs = vec![0.0; 2 * n];
        self.u_gradient(None, Some(v), &mut rhs);
        rhs.iter_mut().for_each(|x| *x = -*x);
        let mut x = vec![0.0; 2 * n];
        x[..n].copy_from_slice(u1);
        x[n..].copy_from_slice(u2);
        self.zero_constrained(&mut x);
        let apply = |p: &[f64], out: &mut [f64]| self.u_gradient(Some((&p[..n], &p[n..])), None, out);
        let opts = CgOptions { tolerance: self.tolerance, max_iterations: self.max_iterations };
        let outcome = if self.grid.is_periodic() {
            cg::solve(apply, &rhs, &mut x, opts, Some(|p: &mut [f64]| self.project_mean(p)))?
        } else {
            cg::solve(apply, &rhs, &mut x, opts, None::<fn(&mut [f64])>)?
        };
        u1.copy_from_slice(&x[..n]);
        u2.copy_from_slice(&x[n..]);
        Ok(outcome.residual)
    }

    /// `out = -M^{-1} dE_membrane/dv` on free nodes, the coupling term
    /// `div[L2(eps) grad v]` of the transverse equation.
    pub fn transverse_force(&self, u1: &[f64], u2: &[f64], v: &[f64], out: &mut [f64]) {
        let w = self.quad_weight();
        out.fill(0.0);
        self.for_each_point(Some((u1, u2)), Some(v), |c, s, gv, eps| {
            let m = self.l2.apply(&eps);
            let q = [m[(0, 0)] * gv[0] + m[(0, 1)] * gv[1], m[(1, 0)] * gv[0] + m[(1, 1)] * gv[1]];
            for k in 0..4 {
                out[c[k]] -= w * (q[0] * s.d1[k] + q[1] * s.d2[k]);
            }
        });
        let g = &self.grid;
        let mass = g.dx1() * g.dx2();
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let k = g.index(i, j);
                out[k] = if g.is_free(i, j) { out[k] / mass } else { 0.0 };
            }
        }
    }
}
