//! Voigt representations of symmetric strains and of elasticity tensors.
//!
//! Strains are mapped with engineering shear factors:
//! 3D `(e11, e22, e33, 2e23, 2e13, 2e12)`, 2D `(e11, e22, 2e12)`.
//! Stresses carry no factor. With this pairing `stress . strain` equals the
//! tensor contraction `S : E`, and a Voigt matrix `C` represents the quadratic
//! form `Q(E) = strain^T C strain`.

use nalgebra::{Matrix2, Matrix3, Matrix6, SymmetricEigen, Vector3, Vector6};

pub type Mat3 = Matrix3<f64>;
pub type Mat2 = Matrix2<f64>;

/// In-plane Voigt slots of the 3D ordering: 11, 22, 12.
pub const IN_PLANE: [usize; 3] = [0, 1, 5];
/// Out-of-plane Voigt slots of the 3D ordering: 33, 23, 13.
pub const OUT_OF_PLANE: [usize; 3] = [2, 3, 4];

pub fn strain_voigt3(f: &Mat3) -> Vector6<f64> {
    Vector6::new(
        f[(0, 0)],
        f[(1, 1)],
        f[(2, 2)],
        f[(1, 2)] + f[(2, 1)],
        f[(0, 2)] + f[(2, 0)],
        f[(0, 1)] + f[(1, 0)],
    )
}

pub fn stress_from_voigt3(s: &Vector6<f64>) -> Mat3 {
    Mat3::new(s[0], s[5], s[4], s[5], s[1], s[3], s[4], s[3], s[2])
}

pub fn strain_voigt2(g: &Mat2) -> Vector3<f64> {
    Vector3::new(g[(0, 0)], g[(1, 1)], g[(0, 1)] + g[(1, 0)])
}

pub fn stress_from_voigt2(s: &Vector3<f64>) -> Mat2 {
    Mat2::new(s[0], s[2], s[2], s[1])
}

/// Pads a 2x2 matrix with zeros to a 3x3 matrix (`F'' = G`, other entries 0).
pub fn embed(g: &Mat2) -> Mat3 {
    let mut f = Mat3::zeros();
    f.fixed_view_mut::<2, 2>(0, 0).copy_from(g);
    f
}

/// Upper-left 2x2 block `F''`.
pub fn in_plane_block(f: &Mat3) -> Mat2 {
    f.fixed_view::<2, 2>(0, 0).into_owned()
}

/// Fourth-order elasticity tensor on symmetric 3x3 matrices (6x6 Voigt).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticTensor3(pub Matrix6<f64>);

impl ElasticTensor3 {
    /// `L F = 2 mu sym F + lambda tr(F) Id`.
    pub fn isotropic(mu: f64, lambda: f64) -> Self {
        let mut c = Matrix6::zeros();
        for i in 0..3 {
            for j in 0..3 {
                c[(i, j)] = lambda;
            }
            c[(i, i)] += 2.0 * mu;
            c[(i + 3, i + 3)] = mu;
        }
        Self(c)
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    /// `L F` as a (symmetric) stress; only `sym F` contributes.
    pub fn apply(&self, f: &Mat3) -> Mat3 {
        stress_from_voigt3(&(self.0 * strain_voigt3(f)))
    }

    pub fn quadratic(&self, f: &Mat3) -> f64 {
        let e = strain_voigt3(f);
        e.dot(&(self.0 * e))
    }

    pub fn max_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0).eigenvalues.max()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0).eigenvalues.min()
    }
}

/// Plate tensor on symmetric 2x2 matrices (3x3 Voigt, ordering 11, 22, 12).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTensor2(pub Matrix3<f64>);

impl ReducedTensor2 {
    /// Isotropic plate tensor with shear modulus `mu` and effective modulus `lambda_star`.
    pub fn isotropic(mu: f64, lambda_star: f64) -> Self {
        Self(Matrix3::new(
            lambda_star + 2.0 * mu,
            lambda_star,
            0.0,
            lambda_star,
            lambda_star + 2.0 * mu,
            0.0,
            0.0,
            0.0,
            mu,
        ))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, g: &Mat2) -> Mat2 {
        stress_from_voigt2(&(self.0 * strain_voigt2(g)))
    }

    /// `Q2(G) = L2 G : G`.
    pub fn quadratic(&self, g: &Mat2) -> f64 {
        let e = strain_voigt2(g);
        e.dot(&(self.0 * e))
    }

    pub fn max_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.0).eigenvalues.max()
    }

    /// Voigt entry accessor, `(a, b)` in the ordering 11, 22, 12.
    pub fn c(&self, a: usize, b: usize) -> f64 {
        self.0[(a, b)]
    }
}
