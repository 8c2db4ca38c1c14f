//! Plate tensor from a 3D elasticity tensor.
//!
//! `Q2(G) = min { Q3(F) : F'' = G }`. Because `Q3` only sees `sym F`, the
//! minimum runs over the three symmetric completion slots `(e33, 2e23, 2e13)`
//! and is the Schur complement of the out-of-plane block of the Voigt matrix.

use nalgebra::{Matrix3, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::tensor::{
    embed, strain_voigt2, ElasticTensor3, Mat2, Mat3, ReducedTensor2, IN_PLANE, OUT_OF_PLANE,
};

/// `Q3(F) = L F : F`.
pub fn q3(l: &ElasticTensor3, f: &Mat3) -> f64 {
    l.quadratic(f)
}

/// `Q2(G) = L2 G : G`.
pub fn q2(l2: &ReducedTensor2, g: &Mat2) -> f64 {
    l2.quadratic(g)
}

struct Blocks {
    in_in: Matrix3<f64>,
    in_out: Matrix3<f64>,
    out_out: Matrix3<f64>,
}

fn blocks(l: &ElasticTensor3) -> Blocks {
    let c = l.matrix();
    let pick = |rows: [usize; 3], cols: [usize; 3]| {
        Matrix3::from_fn(|a, b| c[(rows[a], cols[b])])
    };
    Blocks {
        in_in: pick(IN_PLANE, IN_PLANE),
        in_out: pick(IN_PLANE, OUT_OF_PLANE),
        out_out: pick(OUT_OF_PLANE, OUT_OF_PLANE),
    }
}

/// Schur complement `A - B C^{-1} B^T` of the out-of-plane block.
pub fn reduce(l: &ElasticTensor3) -> Result<ReducedTensor2> {
    let b = blocks(l);
    let chol = b
        .out_out
        .cholesky()
        .ok_or_else(|| Error::Reduction("out-of-plane block is not positive definite".into()))?;
    let correction = b.in_out * chol.solve(&b.in_out.transpose());
    let l2 = b.in_in - correction;
    Ok(ReducedTensor2((l2 + l2.transpose()) * 0.5))
}

/// Direct minimization of `Q3` over the symmetric completions of `G`.
///
/// Solves the 3x3 stationarity system for the free slots and evaluates the
/// full 6x6 quadratic form at the minimizer.
pub fn reduce_bruteforce(l: &ElasticTensor3, g: &Mat2) -> Result<f64> {
    let c = l.matrix();
    let gv = strain_voigt2(g);
    // d/dz_a of strain^T C strain = 2 sum_j C[out_a, j] strain_j = 0
    let mut system = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for a in 0..3 {
        for b in 0..3 {
            system[(a, b)] = c[(OUT_OF_PLANE[a], OUT_OF_PLANE[b])];
        }
        rhs[a] = -(0..3).map(|b| c[(OUT_OF_PLANE[a], IN_PLANE[b])] * gv[b]).sum::<f64>();
    }
    let row_scale: f64 = system.row_iter().map(|r| r.norm()).product();
    if system.determinant().abs() <= 1e-14 * row_scale {
        return Err(Error::Reduction("stationarity system is singular".into()));
    }
    let z = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Reduction("stationarity system is singular".into()))?;
    let mut full = Vector6::zeros();
    for a in 0..3 {
        full[IN_PLANE[a]] = gv[a];
        full[OUT_OF_PLANE[a]] = z[a];
    }
    let value = full.dot(&(c * full));
    if value < 0.0 {
        return Err(Error::Reduction("minimum is negative; tensor is not positive".into()));
    }
    Ok(value)
}

/// Minimizing completion `(e33, 2 e23, 2 e13)` of the in-plane strain `G`,
/// i.e. the out-of-plane strain with `L F e3 = 0`.
pub fn relaxed_out_of_plane(l: &ElasticTensor3, g: &Mat2) -> Result<Vector3<f64>> {
    let b = blocks(l);
    let chol = b
        .out_out
        .cholesky()
        .ok_or_else(|| Error::Reduction("out-of-plane block is not positive definite".into()))?;
    Ok(-chol.solve(&(b.in_out.transpose() * strain_voigt2(g))))
}

/// `Q3` of the zero-padded embedding of `G`; an upper bound for `Q2(G)`.
pub fn q3_of_embedding(l: &ElasticTensor3, g: &Mat2) -> f64 {
    l.quadratic(&embed(g))
}

/// Plane-stress effective modulus `2 mu lambda / (lambda + 2 mu)`.
pub fn effective_lambda(mu: f64, lambda: f64) -> f64 {
    2.0 * mu * lambda / (lambda + 2.0 * mu)
}
