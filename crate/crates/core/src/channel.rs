//! The quasiclassical communication channel between the friend and the
//! superobserver. The friend writes her result into a record basis
//! `{|r₀⟩, |r₁⟩}`; the channel measures in a message basis parametrized by
//! `(θ, φ)` and forwards the outcome. The basis angle controls how much
//! which-outcome information the messages carry, interpolating between full
//! collapse (`θ = 0`) and intact unitary statistics for each message
//! (`θ = π/4`, `φ = 0`).

use num_complex::Complex64;

use wfsim_qcore::{
    apply_channel, born_probabilities, tensor_operators, Axis, DensityMatrix, KrausChannel,
    Operator, OutcomeDistribution, SpaceLayout, StateVector, TOL_ALGEBRAIC,
};

use crate::error::{Error, Result};
use crate::scenarios::{record_state, SourceAmplitudes, WignerBasis, WignerOutcome};

/// Channel angles `(θ, φ)`.
///
/// The statistics are periodic with period π in θ and 2π in φ; raw values
/// are kept for the math and canonicalized into `θ ∈ [0, π)`,
/// `φ ∈ [0, 2π)` for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    theta: f64,
    phi: f64,
}

impl ChannelParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFiniteParameter);
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn canonical_theta(&self) -> f64 {
        self.theta.rem_euclid(std::f64::consts::PI)
    }

    pub fn canonical_phi(&self) -> f64 {
        self.phi.rem_euclid(std::f64::consts::TAU)
    }
}

/// Channel message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageOutcome {
    M0,
    M1,
}

impl MessageOutcome {
    pub const ALL: [MessageOutcome; 2] = [MessageOutcome::M0, MessageOutcome::M1];

    pub fn label(&self) -> &'static str {
        match self {
            MessageOutcome::M0 => "0",
            MessageOutcome::M1 => "1",
        }
    }

    pub fn index(&self) -> usize {
        match self {
            MessageOutcome::M0 => 0,
            MessageOutcome::M1 => 1,
        }
    }
}

/// Orthonormal message basis on the record space:
/// `|0⟩ = cos θ |r₀⟩ + e^{iφ} sin θ |r₁⟩`,
/// `|1⟩ = e^{−iφ} sin θ |r₀⟩ − cos θ |r₁⟩`.
#[derive(Debug, Clone)]
pub struct MessageBasis {
    kets: [StateVector; 2],
}

impl MessageBasis {
    fn build(params: &ChannelParams) -> Self {
        let layout = SpaceLayout::qubit("R");
        let (cos_t, sin_t) = (params.theta.cos(), params.theta.sin());
        let phase = Complex64::from_polar(1.0, params.phi);
        let m0 = StateVector::new(
            layout.clone(),
            vec![Complex64::new(cos_t, 0.0), phase * sin_t],
        )
        .expect("message kets are normalized");
        let m1 = StateVector::new(
            layout,
            vec![phase.conj() * sin_t, Complex64::new(-cos_t, 0.0)],
        )
        .expect("message kets are normalized");
        let basis = Self { kets: [m0, m1] };
        debug_assert!(basis.orthonormality_defect() <= TOL_ALGEBRAIC);
        debug_assert!(basis.completeness_defect() <= TOL_ALGEBRAIC);
        basis
    }

    pub fn ket(&self, m: MessageOutcome) -> &StateVector {
        &self.kets[m.index()]
    }

    /// Overlap `⟨m|rᵢ⟩` with the record basis.
    pub fn overlap_with_record(&self, m: MessageOutcome, i: usize) -> Complex64 {
        self.kets[m.index()].amplitude(i).conj()
    }

    /// Largest deviation of the kets from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let norm0 = (self.kets[0].amplitudes().norm() - 1.0).abs();
        let norm1 = (self.kets[1].amplitudes().norm() - 1.0).abs();
        let overlap = self.kets[0]
            .inner(&self.kets[1])
            .expect("kets share a layout")
            .norm();
        norm0.max(norm1).max(overlap)
    }

    /// Largest deviation in the completeness identity
    /// `Σₘ ⟨m|rᵢ⟩⟨rⱼ|m⟩ = δᵢⱼ`, which makes the record-ignoring statistics
    /// independent of the channel parameters.
    pub fn completeness_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut sum = Complex64::ZERO;
                for m in MessageOutcome::ALL {
                    sum += self.overlap_with_record(m, i) * self.overlap_with_record(m, j).conj();
                }
                let expected = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                defect = defect.max((sum - expected).norm());
            }
        }
        defect
    }

    pub fn projectors(&self) -> [Operator; 2] {
        [
            Operator::projector(&self.kets[0]),
            Operator::projector(&self.kets[1]),
        ]
    }
}

/// Message basis for the given channel parameters.
pub fn message_basis(params: &ChannelParams) -> MessageBasis {
    MessageBasis::build(params)
}

/// Measure-and-prepare channel `C[σ] = Σₘ ⟨m|σ|m⟩ |m⟩⟨m|` in the message
/// basis, as a Kraus set `{|m⟩⟨m|}`.
pub fn dephasing_channel(basis: &MessageBasis) -> KrausChannel {
    KrausChannel::new(basis.projectors().to_vec())
        .expect("projectors onto an orthonormal basis are complete")
}

/// State the superobserver measures after the record passed through the
/// channel: `(𝟙 ⊗ C)[|Ψʳ⟩⟨Ψʳ|]` on system ⊗ memory ⊗ record.
pub fn post_channel_state(src: &SourceAmplitudes, params: &ChannelParams) -> DensityMatrix {
    let rho = DensityMatrix::from_pure(&record_state(src));
    let channel = dephasing_channel(&message_basis(params));
    apply_channel(&rho, &channel, "R").expect("channel and record dimensions match")
}

fn wigner_axis() -> Axis {
    Axis::new("w", WignerOutcome::ALL.map(|w| w.label())).expect("fixed axis is valid")
}

fn message_axis() -> Axis {
    Axis::new("n", MessageOutcome::ALL.map(|m| m.label())).expect("fixed axis is valid")
}

/// Joint distribution `p(w, n)` over the superobserver's outcome and the
/// channel message. Marginalizing over `n` reproduces the collapse table
/// for every channel parameter; conditioning on `n` interpolates between
/// collapse and unitary statistics.
pub fn joint_probs_wn(
    src: &SourceAmplitudes,
    wb: &WignerBasis,
    params: &ChannelParams,
) -> OutcomeDistribution {
    let rho = post_channel_state(src, params);
    let message_projectors = message_basis(params).projectors();
    let mut projectors = Vec::with_capacity(6);
    for pw in wb.projectors() {
        for pn in &message_projectors {
            projectors.push(tensor_operators(&[&pw, pn]).expect("disjoint factors concatenate"));
        }
    }
    let probs =
        born_probabilities(&rho, &projectors).expect("product projectors form a complete set");
    OutcomeDistribution::new(vec![wigner_axis(), message_axis()], probs)
        .expect("Born rule is normalized")
}

/// One row of a partial-collapse sweep: conditional outcome probabilities
/// for both messages at a fixed `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialCollapseRow {
    pub theta: f64,
    pub phi: f64,
    pub p_w1_given_n0: f64,
    pub p_w2_given_n0: f64,
    pub p_w1_given_n1: f64,
    pub p_w2_given_n1: f64,
    pub p_n0: f64,
}

/// Sweeps the channel angle θ at fixed φ and tabulates the conditional
/// probabilities of the superobserver's outcomes given each message.
pub fn sweep_partial_collapse(
    src: &SourceAmplitudes,
    wb: &WignerBasis,
    phi: f64,
    theta_grid: &[f64],
) -> Result<Vec<PartialCollapseRow>> {
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let params = ChannelParams::new(theta, phi)?;
        let joint = joint_probs_wn(src, wb, &params);
        let given_n0 = joint.condition_on("n", "0")?;
        let given_n1 = joint.condition_on("n", "1")?;
        let p_n0 = joint.marginal(&["n"])?.prob(&["0"])?;
        rows.push(PartialCollapseRow {
            theta,
            phi,
            p_w1_given_n0: given_n0.prob(&["1"])?,
            p_w2_given_n0: given_n0.prob(&["2"])?,
            p_w1_given_n1: given_n1.prob(&["1"])?,
            p_w2_given_n1: given_n1.prob(&["2"])?,
            p_n0,
        });
    }
    Ok(rows)
}
