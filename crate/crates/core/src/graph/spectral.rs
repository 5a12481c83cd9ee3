//! Power iteration on the adjacency operator of a regular graph, restricted
//! to the complement of the all-ones eigenvector.

use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::seed;

pub const POWER_ITERATION_CAP: usize = 50_000;

/// Largest absolute eigenvalue of the adjacency matrix orthogonal to the
/// all-ones vector, `max(|λ₂|, |λₙ|)`, within `tol`.
///
/// This is the quantity the expander mixing lemma needs. Iterates on `A²`
/// so that a pair `±λ` cannot make the iteration oscillate.
pub fn spectral_second_eigenvalue(g: &Graph, tol: f64) -> Result<f64> {
    let _ = g.regular_degree().ok_or(Error::NotRegular)?;
    let mu = top_of_complement(g, tol, |x, out, scratch| {
        apply(g, x, scratch);
        apply(g, scratch, out);
    })?;
    Ok(mu.max(0.0).sqrt())
}

/// Second largest (signed) adjacency eigenvalue `λ₂` of a regular graph,
/// computed on the shifted operator `A + dI`.
pub fn second_largest_eigenvalue(g: &Graph, tol: f64) -> Result<f64> {
    let d = g.regular_degree().ok_or(Error::NotRegular)? as f64;
    let mu = top_of_complement(g, tol, |x, out, _| {
        apply(g, x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o += d * xi;
        }
    })?;
    Ok(mu - d)
}

fn apply(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (u, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(u).iter().map(|&v| x[v]).sum();
    }
}

fn center_and_normalize(x: &mut [f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Dominant eigenvalue of a positive semidefinite operator that preserves
/// the all-ones direction, restricted to the orthogonal complement.
/// Terminates once the residual `‖Bx − μx‖` drops below `tol`.
fn top_of_complement<F>(g: &Graph, tol: f64, op: F) -> Result<f64>
where
    F: Fn(&[f64], &mut [f64], &mut [f64]),
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    let n = g.n();
    let mut rng = seed::stream_rng(0x5EED_5EED, 0);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    center_and_normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for _ in 0..POWER_ITERATION_CAP {
        op(&x, &mut y, &mut scratch);
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter_mut().for_each(|v| *v -= mean);
        let mu: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let residual = x.iter().zip(&y).map(|(a, b)| (b - mu * a).powi(2)).sum::<f64>().sqrt();
        if residual <= tol {
            return Ok(mu);
        }
        std::mem::swap(&mut x, &mut y);
        if center_and_normalize(&mut x) == 0.0 {
            // The complement is annihilated: every other eigenvalue is zero.
            return Ok(0.0);
        }
    }
    Err(Error::NoConvergence { iterations: POWER_ITERATION_CAP })
}
