//! Matrix-free conjugate gradients for symmetric positive (semi)definite operators.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CgOptions {
    /// Converged once the max-norm of the residual is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `A x = b` starting from the contents of `x`.
///
/// `project`, when given, is applied to the right-hand side, the residual and
/// the search direction every iteration; it is used to remove the constant
/// null space of periodic operators.
pub fn solve<A, P>(
    mut apply: A,
    b: &[f64],
    x: &mut [f64],
    opts: CgOptions,
    mut project: Option<P>,
) -> Result<CgOutcome>
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&mut [f64]),
{
    let n = b.len();
    let mut rhs = b.to_vec();
    if let Some(p) = project.as_mut() {
        p(&mut rhs);
        p(x);
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if let Some(p) = project.as_mut() {
        p(&mut r);
    }
    let mut res = max_abs(&r);
    if res <= opts.tolerance {
        return Ok(CgOutcome { iterations: 0, residual: res });
    }
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let mut ad = vec![0.0; n];
    for it in 1..=opts.max_iterations {
        apply(&d, &mut ad);
        let dad = dot(&d, &ad);
        if dad <= 0.0 {
            return Err(Error::Solver { iterations: it, residual: res });
        }
        let step = rr / dad;
        for i in 0..n {
            x[i] += step * d[i];
            r[i] -= step * ad[i];
        }
        if let Some(p) = project.as_mut() {
            p(&mut r);
        }
        res = max_abs(&r);
        if res <= opts.tolerance {
            if let Some(p) = project.as_mut() {
                p(x);
            }
            return Ok(CgOutcome { iterations: it, residual: res });
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    Err(Error::Solver { iterations: opts.max_iterations, residual: res })
}

/// Subtracts the mean of `v`.
pub fn remove_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}
