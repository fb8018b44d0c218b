//! Dual function of the regularized program
//!
//! ```text
//! D(λ) = min_{0≤x≤1} 1ᵀx + (δ/2)‖x‖² + λᵀ(1 − A x)
//! ```
//!
//! `A` is symmetric, so the minimum separates per coordinate with minimizer
//! `x̂_i(λ) = P_[0,1](((Aλ)_i − 1)/δ)` and `∇D(λ) = 1 − A x̂(λ)`.

use crate::error::{Error, Result};
use crate::problem::{Allocation, FdsInstance};

use super::inner_minimizer_unchecked;

fn check(lambda: &[f64], inst: &FdsInstance) -> Result<()> {
    if lambda.len() != inst.n() {
        return Err(Error::LengthMismatch {
            expected: inst.n(),
            found: lambda.len(),
        });
    }
    match lambda.iter().position(|&l| l.is_nan() || l < 0.0) {
        Some(index) => Err(Error::NegativeDual {
            index,
            value: lambda[index],
        }),
        None => Ok(()),
    }
}

fn neighborhood_sums(values: &[f64], inst: &FdsInstance) -> Vec<f64> {
    let g = inst.graph();
    (0..g.n())
        .map(|i| g.closed_neighborhood(i).into_iter().map(|j| values[j]).sum())
        .collect()
}

/// Lagrangian minimizer `x̂(λ)`.
pub fn dual_minimizer(lambda: &[f64], inst: &FdsInstance) -> Result<Allocation> {
    check(lambda, inst)?;
    let delta = inst.delta();
    Ok(Allocation(
        neighborhood_sums(lambda, inst)
            .into_iter()
            .map(|s| inner_minimizer_unchecked(s, delta))
            .collect(),
    ))
}

pub fn dual_value(lambda: &[f64], inst: &FdsInstance) -> Result<f64> {
    check(lambda, inst)?;
    let delta = inst.delta();
    let sums = neighborhood_sums(lambda, inst);
    let separable: f64 = sums
        .iter()
        .map(|&s| {
            let x = inner_minimizer_unchecked(s, delta);
            x * (1.0 - s) + 0.5 * delta * x * x
        })
        .sum();
    Ok(lambda.iter().sum::<f64>() + separable)
}

pub fn dual_gradient(lambda: &[f64], inst: &FdsInstance) -> Result<Vec<f64>> {
    let x_hat = dual_minimizer(lambda, inst)?;
    Ok(neighborhood_sums(x_hat.as_slice(), inst)
        .into_iter()
        .map(|s| 1.0 - s)
        .collect())
}

/// Lipschitz constant `(d_max+1)²/δ` of `∇D`.
pub fn lipschitz_constant(inst: &FdsInstance) -> f64 {
    let d = (inst.graph().d_max() + 1) as f64;
    d * d / inst.delta()
}
