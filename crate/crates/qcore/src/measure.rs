use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::{TOL_ALGEBRAIC, TOL_SPECTRAL};

/// Expectation value `Tr(obs · ρ)` of a Hermitian observable.
///
/// The trace is computed in complex arithmetic; an imaginary residue at or
/// above `1e-10` is an error, below that it is discarded.
pub fn expectation(rho: &DensityMatrix, obs: &Operator) -> Result<f64> {
    if rho.layout() != obs.layout() {
        return Err(Error::LayoutMismatch(
            "observable and state live on different spaces".into(),
        ));
    }
    let defect = obs.hermiticity_defect();
    if defect > TOL_ALGEBRAIC {
        return Err(Error::NotHermitian(defect));
    }
    let value = trace_of_product(obs, rho);
    if value.im.abs() >= TOL_SPECTRAL {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

/// Born-rule probabilities `pᵢ = Tr(Πᵢ ρ)` for a complete set of mutually
/// orthogonal projectors.
///
/// The projector set is validated first: each `Πᵢ` must be Hermitian and
/// idempotent, distinct projectors must annihilate each other, and the set
/// must sum to the identity, all within `1e-10`. Probabilities within
/// `1e-12` below 0 or above 1 are clamped to `[0, 1]`; anything further out
/// is an error, as is a total differing from 1 by `1e-10` or more.
pub fn born_probabilities(rho: &DensityMatrix, projectors: &[Operator]) -> Result<Vec<f64>> {
    validate_projectors(projectors)?;
    if projectors[0].layout() != rho.layout() {
        return Err(Error::LayoutMismatch(
            "projector and state live on different spaces".into(),
        ));
    }
    let mut probs = Vec::with_capacity(projectors.len());
    for p in projectors {
        let value = trace_of_product(p, rho);
        if value.im.abs() >= TOL_SPECTRAL {
            return Err(Error::ImaginaryResidue(value.im));
        }
        let prob = value.re;
        if !(-TOL_ALGEBRAIC..=1.0 + TOL_ALGEBRAIC).contains(&prob) {
            return Err(Error::InvalidProbability(prob));
        }
        probs.push(prob.clamp(0.0, 1.0));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > TOL_SPECTRAL {
        return Err(Error::NotADistribution(total));
    }
    Ok(probs)
}

/// Checks that a projector set is a complete orthogonal resolution of the
/// identity: every element Hermitian within `1e-12` and idempotent within
/// `1e-10`, distinct elements annihilating each other and the whole set
/// summing to the identity within `1e-10`.
pub fn validate_projectors(projectors: &[Operator]) -> Result<()> {
    let first = projectors.first().ok_or(Error::Empty)?;
    let layout = first.layout();
    for p in projectors {
        if p.layout() != layout {
            return Err(Error::LayoutMismatch(
                "projectors live on different spaces".into(),
            ));
        }
        let defect = p.hermiticity_defect();
        if defect > TOL_ALGEBRAIC {
            return Err(Error::NotHermitian(defect));
        }
        let idempotence = max_entry_norm_diff(&p.compose(p)?, p);
        if idempotence > TOL_SPECTRAL {
            return Err(Error::BadProjectors(format!(
                "projector is not idempotent (defect {idempotence:.3e})"
            )));
        }
    }
    for (i, p) in projectors.iter().enumerate() {
        for q in &projectors[i + 1..] {
            let overlap = p
                .compose(q)?
                .matrix()
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if overlap > TOL_SPECTRAL {
                return Err(Error::BadProjectors(format!(
                    "projectors are not mutually orthogonal (overlap {overlap:.3e})"
                )));
            }
        }
    }
    let mut sum = projectors[0].clone();
    for p in &projectors[1..] {
        sum = &sum + p;
    }
    let completeness = max_entry_norm_diff(&sum, &Operator::identity(layout.clone()));
    if completeness > TOL_SPECTRAL {
        return Err(Error::BadProjectors(format!(
            "projectors do not sum to the identity (defect {completeness:.3e})"
        )));
    }
    Ok(())
}

fn trace_of_product(op: &Operator, rho: &DensityMatrix) -> Complex64 {
    let d = rho.dim();
    let mut sum = Complex64::ZERO;
    for i in 0..d {
        for k in 0..d {
            sum += op.matrix()[(i, k)] * rho.matrix()[(k, i)];
        }
    }
    sum
}

fn max_entry_norm_diff(a: &Operator, b: &Operator) -> f64 {
    (a.matrix() - b.matrix())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}
