use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `u = 0`, `v = 0`, `grad v = 0` on the boundary of the square.
    Clamped,
    /// All fields `2L`-periodic in both directions.
    Periodic,
}

/// Uniform node lattice on `(-L, L)^2`.
///
/// Clamped grids include both boundary lines (`dx = 2L/(n-1)`); periodic grids
/// drop the duplicated right/top line (`dx = 2L/n`). Node `(i, j)` is stored at
/// `i + n1 * j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub half_width: f64,
    pub n1: usize,
    pub n2: usize,
    pub boundary: Boundary,
}

impl Grid2 {
    pub fn new(half_width: f64, n1: usize, n2: usize, boundary: Boundary) -> Result<Self> {
        if n1 < 8 || n2 < 8 {
            return Err(Error::Domain(format!("grid needs at least 8 nodes per direction, got {n1}x{n2}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { half_width, n1, n2, boundary })
    }

    pub fn periodic(half_width: f64, n1: usize, n2: usize) -> Result<Self> {
        Self::new(half_width, n1, n2, Boundary::Periodic)
    }

    pub fn clamped(half_width: f64, n1: usize, n2: usize) -> Result<Self> {
        Self::new(half_width, n1, n2, Boundary::Clamped)
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    fn spacing(&self, n: usize) -> f64 {
        match self.boundary {
            Boundary::Clamped => 2.0 * self.half_width / (n - 1) as f64,
            Boundary::Periodic => 2.0 * self.half_width / n as f64,
        }
    }

    pub fn dx1(&self) -> f64 {
        self.spacing(self.n1)
    }

    pub fn dx2(&self) -> f64 {
        self.spacing(self.n2)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.n1 * j
    }

    pub fn x1(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx1()
    }

    pub fn x2(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx2()
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        match self.boundary {
            Boundary::Periodic => false,
            Boundary::Clamped => i == 0 || j == 0 || i + 1 == self.n1 || j + 1 == self.n2,
        }
    }

    /// Nodes carrying unknowns: all nodes (periodic) or interior nodes (clamped).
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        !self.is_boundary(i, j)
    }

    /// Trapezoidal quadrature weight of node `(i, j)`.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let cell = self.dx1() * self.dx2();
        match self.boundary {
            Boundary::Periodic => cell,
            Boundary::Clamped => {
                let edge = |k: usize, n: usize| if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
                cell * edge(i, self.n1) * edge(j, self.n2)
            }
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                w[self.index(i, j)] = self.weight(i, j);
            }
        }
        w
    }

    /// Number of cells per direction.
    pub fn cells(&self) -> (usize, usize) {
        match self.boundary {
            Boundary::Periodic => (self.n1, self.n2),
            Boundary::Clamped => (self.n1 - 1, self.n2 - 1),
        }
    }

    /// Index of the neighbour `(i + di, j + dj)` inside the node lattice;
    /// periodic grids wrap, clamped grids return `None` outside.
    #[inline]
    pub fn offset(&self, i: usize, j: usize, di: isize, dj: isize) -> Option<usize> {
        let (a, b) = (i as isize + di, j as isize + dj);
        let (n1, n2) = (self.n1 as isize, self.n2 as isize);
        match self.boundary {
            Boundary::Periodic => Some(self.index(a.rem_euclid(n1) as usize, b.rem_euclid(n2) as usize)),
            Boundary::Clamped => {
                if a < 0 || b < 0 || a >= n1 || b >= n2 {
                    None
                } else {
                    Some(self.index(a as usize, b as usize))
                }
            }
        }
    }

    /// Weighted L2 norm of a nodal field.
    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        let mut s = 0.0;
        for j in 0..self.n2 {
            for i in 0..self.n1 {
                let k = self.index(i, j);
                s += self.weight(i, j) * f[k] * f[k];
            }
        }
        s.sqrt()
    }

    /// Largest stable-looking step for the explicit membrane coupling.
    pub fn dt_cap(&self, q2_max: f64) -> f64 {
        let dx = self.dx1().min(self.dx2());
        0.5 * dx * dx * (12.0 / q2_max).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacings_and_weights() {
        let g = Grid2::clamped(1.0, 11, 11).unwrap();
        assert!((g.dx1() - 0.2).abs() < 1e-15);
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0).abs() < 1e-12);
        let p = Grid2::periodic(1.0, 10, 10).unwrap();
        assert!((p.dx1() - 0.2).abs() < 1e-15);
        assert!((p.weights().iter().sum::<f64>() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn small_grids_rejected() {
        assert!(Grid2::periodic(1.0, 7, 16).is_err());
    }

    #[test]
    fn offsets_wrap_only_when_periodic() {
        let p = Grid2::periodic(1.0, 8, 8).unwrap();
        assert_eq!(p.offset(0, 0, -1, 0), Some(p.index(7, 0)));
        let c = Grid2::clamped(1.0, 8, 8).unwrap();
        assert_eq!(c.offset(0, 0, -1, 0), None);
    }
}
