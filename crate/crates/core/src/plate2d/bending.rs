//! Discrete bending energy `(1/24) sum Q2(hess v)` and its gradient.
//!
//! Diagonal curvatures live on nodes (3-point second differences, reflected
//! ghost nodes on clamped edges), the mixed curvature on cell centres
//! (4-point cross difference). For an isotropic plate tensor the gradient is
//! the 13-point biharmonic stencil scaled by `(lambda* + 2 mu)/12`.

use super::grid::{Boundary, Grid2};
use crate::tensor::ReducedTensor2;

#[derive(Debug, Clone)]
pub struct BendingOperator {
    grid: Grid2,
    l2: ReducedTensor2,
}

/// Discrete Hessian of a nodal field.
#[derive(Debug, Clone)]
pub struct Curvatures {
    pub k11: Vec<f64>,
    pub k22: Vec<f64>,
    /// Mixed curvature per cell, cell `(ci, cj)` stored at `ci + nc1 * cj`.
    pub k12: Vec<f64>,
}

impl BendingOperator {
    pub fn new(grid: Grid2, l2: ReducedTensor2) -> Self {
        Self { grid, l2 }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }

    /// Node index for a possibly out-of-range lattice position: wraps when
    /// periodic, reflects across the boundary line when clamped.
    #[inline]
    fn source(&self, a: isize, b: isize) -> usize {
        let g = &self.grid;
        let (n1, n2) = (g.n1 as isize, g.n2 as isize);
        let (a, b) = match g.boundary {
            Boundary::Periodic => (a.rem_euclid(n1), b.rem_euclid(n2)),
            Boundary::Clamped => (reflect(a, n1), reflect(b, n2)),
        };
        g.index(a as usize, b as usize)
    }

    fn cell_nodes(&self, ci: usize, cj: usize) -> [usize; 4] {
        let (a, b) = (ci as isize, cj as isize);
        [self.source(a, b), self.source(a + 1, b), self.source(a, b + 1), self.source(a + 1, b + 1)]
    }

    fn has_cross_terms(&self) -> bool {
        self.l2.c(0, 2) != 0.0 || self.l2.c(1, 2) != 0.0
    }

    pub fn curvatures(&self, v: &[f64]) -> Curvatures {
        let g = &self.grid;
        let (h1, h2) = (g.dx1() * g.dx1(), g.dx2() * g.dx2());
        let mut k11 = vec![0.0; g.len()];
        let mut k22 = vec![0.0; g.len()];
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let (a, b) = (i as isize, j as isize);
                let c = v[g.index(i, j)];
                k11[g.index(i, j)] = (v[self.source(a - 1, b)] - 2.0 * c + v[self.source(a + 1, b)]) / h1;
                k22[g.index(i, j)] = (v[self.source(a, b - 1)] - 2.0 * c + v[self.source(a, b + 1)]) / h2;
            }
        }
        let (nc1, nc2) = g.cells();
        let area = g.dx1() * g.dx2();
        let mut k12 = vec![0.0; nc1 * nc2];
        for cj in 0..nc2 {
            for ci in 0..nc1 {
                let [p00, p10, p01, p11] = self.cell_nodes(ci, cj);
                k12[ci + nc1 * cj] = (v[p11] - v[p10] - v[p01] + v[p00]) / area;
            }
        }
        Curvatures { k11, k22, k12 }
    }

    /// Average of the mixed curvature over the cells touching node `(i, j)`.
    fn node_mixed(&self, k12: &[f64], i: usize, j: usize) -> f64 {
        let (nc1, _) = self.grid.cells();
        let cells = self.adjacent_cells(i, j);
        let n = cells.iter().flatten().count() as f64;
        cells.iter().flatten().map(|&(ci, cj)| k12[ci + nc1 * cj]).sum::<f64>() / n
    }

    fn adjacent_cells(&self, i: usize, j: usize) -> [Option<(usize, usize)>; 4] {
        let g = &self.grid;
        let (nc1, nc2) = g.cells();
        let mut out = [None; 4];
        let mut k = 0;
        for dj in [-1isize, 0] {
            for di in [-1isize, 0] {
                let (ci, cj) = (i as isize + di, j as isize + dj);
                out[k] = match g.boundary {
                    Boundary::Periodic => {
                        Some((ci.rem_euclid(nc1 as isize) as usize, cj.rem_euclid(nc2 as isize) as usize))
                    }
                    Boundary::Clamped => {
                        if ci >= 0 && cj >= 0 && (ci as usize) < nc1 && (cj as usize) < nc2 {
                            Some((ci as usize, cj as usize))
                        } else {
                            None
                        }
                    }
                };
                k += 1;
            }
        }
        out
    }

    /// `(1/24) sum Q2(hess v)` with trapezoidal node weights and unit cell weights.
    pub fn energy(&self, v: &[f64]) -> f64 {
        let g = &self.grid;
        let c = |a, b| self.l2.c(a, b);
        let k = self.curvatures(v);
        let cross = self.has_cross_terms();
        let mut e = 0.0;
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let n = g.index(i, j);
                let (a, b) = (k.k11[n], k.k22[n]);
                let mut q = c(0, 0) * a * a + c(1, 1) * b * b + 2.0 * c(0, 1) * a * b;
                if cross {
                    let m = self.node_mixed(&k.k12, i, j);
                    q += 4.0 * (c(0, 2) * a + c(1, 2) * b) * m;
                }
                e += g.weight(i, j) * q;
            }
        }
        let area = g.dx1() * g.dx2();
        e += k.k12.iter().map(|m| area * 4.0 * c(2, 2) * m * m).sum::<f64>();
        e / 24.0
    }

    /// `out = M^{-1} dE/dv` on free nodes (zero elsewhere), `M` the lumped mass.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let c = |a, b| self.l2.c(a, b);
        let k = self.curvatures(v);
        let (h1, h2) = (g.dx1() * g.dx1(), g.dx2() * g.dx2());
        let area = g.dx1() * g.dx2();
        let (nc1, nc2) = g.cells();
        let cross = self.has_cross_terms();
        out.fill(0.0);

        let mut m12 = vec![0.0; nc1 * nc2];
        for cj in 0..nc2 {
            for ci in 0..nc1 {
                let idx = ci + nc1 * cj;
                m12[idx] = area * 4.0 * c(2, 2) * k.k12[idx] / 12.0;
            }
        }
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let n = g.index(i, j);
                let w = g.weight(i, j);
                let (a, b) = (k.k11[n], k.k22[n]);
                let mixed = if cross { self.node_mixed(&k.k12, i, j) } else { 0.0 };
                let m11 = w * (c(0, 0) * a + c(0, 1) * b + 2.0 * c(0, 2) * mixed) / 12.0;
                let m22 = w * (c(0, 1) * a + c(1, 1) * b + 2.0 * c(1, 2) * mixed) / 12.0;
                let (ai, bj) = (i as isize, j as isize);
                out[self.source(ai - 1, bj)] += m11 / h1;
                out[n] -= 2.0 * m11 / h1;
                out[self.source(ai + 1, bj)] += m11 / h1;
                out[self.source(ai, bj - 1)] += m22 / h2;
                out[n] -= 2.0 * m22 / h2;
                out[self.source(ai, bj + 1)] += m22 / h2;
                if cross {
                    let mn = w * (2.0 * c(0, 2) * a + 2.0 * c(1, 2) * b) / 12.0;
                    let cells = self.adjacent_cells(i, j);
                    let count = cells.iter().flatten().count() as f64;
                    for &(ci, cj) in cells.iter().flatten() {
                        m12[ci + nc1 * cj] += mn / count;
                    }
                }
            }
        }
        for cj in 0..nc2 {
            for ci in 0..nc1 {
                let m = m12[ci + nc1 * cj] / area;
                let [p00, p10, p01, p11] = self.cell_nodes(ci, cj);
                out[p11] += m;
                out[p10] -= m;
                out[p01] -= m;
                out[p00] += m;
            }
        }
        for j in 0..g.n2 {
            for i in 0..g.n1 {
                let n = g.index(i, j);
                out[n] = if g.is_free(i, j) { out[n] / area } else { 0.0 };
            }
        }
    }
}

/// Mirror index across `0` and `n - 1`.
#[inline]
fn reflect(a: isize, n: isize) -> isize {
    if a < 0 {
        -a
    } else if a >= n {
        2 * (n - 1) - a
    } else {
        a
    }
}
