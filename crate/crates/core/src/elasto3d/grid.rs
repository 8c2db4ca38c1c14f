use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plate2d::Grid2;

/// Node lattice on `(-L, L)^2 x (-1/2, 1/2)`, periodic in the lateral directions.
///
/// Node `(i, j, k)` sits at `(-L + i dx1, -L + j dx2, -1/2 + k dx3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub half_width: f64,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Grid3 {
    pub fn new(half_width: f64, n1: usize, n2: usize, n3: usize) -> Result<Self> {
        let g = Self { half_width, n1, n2, n3 };
        let problems = g.violations();
        if problems.is_empty() {
            Ok(g)
        } else {
            Err(Error::Domain(problems.join("; ")))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            out.push(format!("half_width must be > 0 (got {})", self.half_width));
        }
        if self.n1 < 8 || self.n2 < 8 {
            out.push(format!("lateral node counts must be >= 8 (got {}x{})", self.n1, self.n2));
        }
        if self.n3 < 3 {
            out.push(format!("n3 must be >= 3 (got {})", self.n3));
        }
        out
    }

    /// The lateral (periodic) plate grid with the same nodes.
    pub fn lateral(&self) -> Grid2 {
        Grid2::periodic(self.half_width, self.n1, self.n2).expect("validated lateral grid")
    }

    pub fn dx1(&self) -> f64 {
        2.0 * self.half_width / self.n1 as f64
    }

    pub fn dx2(&self) -> f64 {
        2.0 * self.half_width / self.n2 as f64
    }

    pub fn dx3(&self) -> f64 {
        1.0 / (self.n3 - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lateral_len(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n1 * (j + self.n2 * k)
    }

    pub fn x1(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx1()
    }

    pub fn x2(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx2()
    }

    pub fn x3(&self, k: usize) -> f64 {
        -0.5 + k as f64 * self.dx3()
    }

    /// Lumped nodal volume (halved on the two faces).
    pub fn node_volume(&self, k: usize) -> f64 {
        let v = self.dx1() * self.dx2() * self.dx3();
        if k == 0 || k + 1 == self.n3 {
            0.5 * v
        } else {
            v
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx1() * self.dx2() * self.dx3()
    }

    /// Thickness trapezoid weight of layer `k`.
    pub fn layer_weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n3 {
            0.5 * self.dx3()
        } else {
            self.dx3()
        }
    }
}
