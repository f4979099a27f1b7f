//! Null-steering cooperative beamforming.
//!
//! A source UT and its relays transmit a common re-encoded symbol through a
//! weight vector `w` chosen to put zero signal at every eavesdropper while
//! maximising the array gain toward the intended receiver under the shared
//! power budget:
//!
//! ```text
//! w* = argmax |w' h_TR|^2   s.t.  w' w <= P0,  w' H_TE = 0
//! ```
//!
//! The optimum is the power-scaled projection of the receiver channel onto
//! the orthogonal complement of the eavesdropper span:
//! `w* = sqrt(P0) * (I - U) h_TR / ||(I - U) h_TR||` with
//! `U = H_TE (H_TE' H_TE)^-1 H_TE'`. The projector is applied through an
//! orthonormal basis of the eavesdropper columns (modified Gram-Schmidt with
//! reorthogonalization) instead of forming the inverse; rank deficiency is
//! flagged when a column loses all but a 1e-12 relative fraction of its norm.

mod rates;

pub use rates::{
    broadcast_cost, broadcast_power, coalition_transmission, coalition_utility,
    cooperative_payoff, direct_secrecy_rate, CoalitionTransmission, TransmissionMode,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative threshold below which a projected column counts as linearly
/// dependent (and a projected receiver channel as fully nulled).
const RANK_TOLERANCE: f64 = 1e-12;

/// Inputs for one coalition-to-receiver transmission slot.
#[derive(Clone, Debug)]
pub struct BeamformingProblem {
    /// Channel from each of the `n` coalition members to the receiver.
    pub h_tr: Vec<Complex64>,
    /// One column per eavesdropper: channels from the `n` members to it.
    pub h_te: Vec<Vec<Complex64>>,
    /// Total transmit power budget, watts.
    pub power_budget: f64,
}

/// The optimal weights together with the two quantities callers consume.
#[derive(Clone, Debug)]
pub struct BeamformingSolution {
    pub weights: Vec<Complex64>,
    /// `|w' h_TR|^2`.
    pub array_gain: f64,
    /// `max_s |w' h_TE_s|`; zero up to rounding by construction.
    pub residual_leakage: f64,
}

/// `sum conj(a_i) * b_i`.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Subtract from `v` its components along each (orthonormal) basis vector.
/// Two passes keep the residual orthogonal to working precision.
fn project_out(basis: &[Vec<Complex64>], v: &mut Vec<Complex64>) {
    for _ in 0..2 {
        for q in basis {
            let coeff = dot(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= coeff * qi;
            }
        }
    }
}

/// Orthonormal basis of the column span via modified Gram-Schmidt.
fn orthonormal_basis(columns: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(columns.len());
    for col in columns {
        let original_norm = norm(col);
        if original_norm == 0.0 {
            return Err(Error::SingularProjector);
        }
        let mut residual = col.clone();
        project_out(&basis, &mut residual);
        let residual_norm = norm(&residual);
        if residual_norm <= RANK_TOLERANCE * original_norm {
            return Err(Error::SingularProjector);
        }
        for x in &mut residual {
            *x /= residual_norm;
        }
        basis.push(residual);
    }
    Ok(basis)
}

/// Closed-form solution of the null-steering problem.
///
/// Requires `n > S` members so the nullspace of the eavesdropper channels
/// has room for a non-trivial weight vector. Fails with
/// [`Error::SingularProjector`] when the eavesdropper columns are linearly
/// dependent and [`Error::ZeroProjection`] when the receiver channel lies
/// entirely inside their span (no gain survives the nulling).
pub fn null_steering_weights(problem: &BeamformingProblem) -> Result<BeamformingSolution> {
    let n = problem.h_tr.len();
    let s = problem.h_te.len();
    if n == 0 {
        return Err(Error::Config("beamforming problem with zero members".into()));
    }
    if n <= s {
        return Err(Error::Config(format!(
            "null-steering needs more members than eavesdroppers: n = {n}, S = {s}"
        )));
    }
    if problem.h_te.iter().any(|col| col.len() != n) {
        return Err(Error::Config("eavesdropper column length mismatch".into()));
    }
    if !(problem.power_budget.is_finite() && problem.power_budget > 0.0) {
        return Err(Error::Config(format!(
            "power budget must be positive, got {}",
            problem.power_budget
        )));
    }

    let basis = orthonormal_basis(&problem.h_te)?;
    let mut residual = problem.h_tr.clone();
    project_out(&basis, &mut residual);
    let residual_norm = norm(&residual);
    if residual_norm <= RANK_TOLERANCE * norm(&problem.h_tr) {
        return Err(Error::ZeroProjection);
    }

    let scale = problem.power_budget.sqrt() / residual_norm;
    let weights: Vec<Complex64> = residual.iter().map(|x| x * scale).collect();

    let array_gain = dot(&weights, &problem.h_tr).norm_sqr();
    let residual_leakage = problem
        .h_te
        .iter()
        .map(|col| dot(&weights, col).norm())
        .fold(0.0, f64::max);

    Ok(BeamformingSolution { weights, array_gain, residual_leakage })
}
