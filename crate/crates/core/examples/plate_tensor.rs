//! Plate tensors of the two material laws, and the energy of a bent and
//! stretched plate element computed both by the Schur complement and by
//! direct minimization over the transverse strain.

use vonkarman::material::dist_squared;
use vonkarman::reduction::effective_lambda;
use vonkarman::{q2, reduce, reduce_bruteforce, Mat2, Mat3, MaterialModel};

fn main() -> vonkarman::Result<()> {
    let models = [MaterialModel::svk(1.0, 1.0)?, MaterialModel::dist_so3(1.0)?];
    let g = Mat2::new(0.01, 0.004, -0.002, -0.005);
    for m in &models {
        let l3 = m.tangent_at_identity();
        let l2 = reduce(&l3)?;
        println!("{m:?}");
        println!("  hypotheses {:?}", m.hypotheses());
        println!("  L2 (Voigt 11, 22, 12) = {}", l2.matrix());
        println!("  Q2(G) Schur = {:.15e}", q2(&l2, &g));
        println!("  Q2(G) brute = {:.15e}", reduce_bruteforce(&l3, &g)?);
    }
    println!("lambda* for mu = lambda = 1: {}", effective_lambda(1.0, 1.0));

    // the squared-distance law is exactly kappa dist^2
    let f = Mat3::new(1.1, 0.2, 0.0, -0.1, 0.95, 0.05, 0.0, 0.1, 1.02);
    let w = models[1].energy_density(&f)?;
    println!("dist model: W(F) = {w:.6e}, dist^2(F, SO3) = {:.6e}", dist_squared(&f));
    Ok(())
}
