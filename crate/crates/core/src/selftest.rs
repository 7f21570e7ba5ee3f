//! Quick oracle-equivalence battery behind `multipole selftest`.

use num_complex::Complex64;

use crate::angular::HalfInteger;
use crate::bipartite::{product_moments, product_moments_oracle, Partition};
use crate::linalg::{frobenius, real_to_complex};
use crate::states::{dicke_state, moments_of, random_separable_mixture, random_state, state_from_moments};
use crate::tensors::tensor_basis;
use crate::witness::{
    cross_correlation, equal_split_block, ppt_negativity, scaling_check, spin_squeezing_matrix,
    spin_squeezing_prefactor,
};
use crate::Result;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst residual or offending value.
    pub detail: f64,
}

fn check(name: &'static str, worst: f64, limit: f64) -> Check {
    Check {
        name,
        passed: worst.is_finite() && worst < limit,
        detail: worst,
    }
}

fn orthogonality() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=5 {
        let basis = tensor_basis(n)?;
        for (a, ta) in basis.iter().enumerate() {
            for (b, tb) in basis.iter().enumerate() {
                let g = (ta.matrix() * tb.matrix().adjoint()).trace();
                let expect = if a == b { (n + 1) as f64 } else { 0.0 };
                worst = worst.max((g - Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    Ok(worst)
}

fn roundtrip() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let s = random_state(n, 1000 + n as u64)?;
        let back = state_from_moments(&moments_of(&s))?;
        worst = worst.max(frobenius(&(back.matrix() - s.matrix())));
    }
    Ok(worst)
}

fn composition() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 2..=5 {
        let s = random_state(n, 2000 + n as u64)?;
        let t = moments_of(&s);
        for part in Partition::all(n) {
            worst = worst.max(product_moments(&t, part)?.max_abs_diff(&product_moments_oracle(&s, part)?));
        }
    }
    Ok(worst)
}

fn scaling() -> Result<f64> {
    let mut worst = 0.0f64;
    let s = random_state(6, 3000)?;
    for part in Partition::all(6) {
        for k in 1..=part.n1().min(part.n2()) {
            worst = worst.max(scaling_check(&s, k, part)?);
        }
    }
    Ok(worst)
}

/// Most negative eigenvalue over a few separable mixtures; the check wants it `>= -1e-9`.
fn separable_positivity() -> Result<f64> {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let n = 2 + (seed as usize % 5);
        let (state, _) = random_separable_mixture(n, 1 + seed as usize % 4, 4000 + seed)?;
        for k in 1..=n / 2 {
            worst = worst.min(equal_split_block(&state, k)?.min_eigenvalue());
        }
    }
    Ok(-worst)
}

fn spin_squeezing() -> Result<f64> {
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let s = random_state(n, 5000 + n as u64)?;
        let m = spin_squeezing_matrix(&s)?;
        for part in Partition::all(n) {
            let c = cross_correlation(&s, 1, part)?.to_cartesian()?;
            let a = spin_squeezing_prefactor(part);
            let target = real_to_complex(&nalgebra::DMatrix::from_fn(3, 3, |i, j| a * m[(i, j)]));
            worst = worst.max(frobenius(&(c - target)));
        }
    }
    Ok(worst)
}

/// Largest min-eigenvalue over entangled Dicke states; must be negative.
fn dicke_negativity() -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for n in 2..=6i64 {
        for tm in (-n + 2..=n - 2).step_by(2) {
            let s = dicke_state(n as usize, HalfInteger::from_twice(tm))?;
            for k in 1..=(n as usize) / 2 {
                worst = worst.max(equal_split_block(&s, k)?.min_eigenvalue());
            }
        }
    }
    Ok(worst)
}

fn bell_ppt() -> Result<f64> {
    let s = dicke_state(2, HalfInteger::ZERO)?;
    Ok((ppt_negativity(&s, Partition::new(1, 1)?)? + 0.5).abs())
}

pub fn run() -> Result<Vec<Check>> {
    Ok(vec![
        check("tensor orthogonality", orthogonality()?, 1e-9),
        check("moment roundtrip", roundtrip()?, 1e-12),
        check("composition law vs direct trace", composition()?, 1e-9),
        check("partition scaling", scaling()?, 1e-9),
        check("separable positivity", separable_positivity()?, 1e-9),
        check("spin-squeezing equivalence", spin_squeezing()?, 1e-9),
        check("Dicke negativity", dicke_negativity()? + 1e-10, 0.0),
        check("Bell-state partial transpose", bell_ppt()?, 1e-12),
    ])
}
