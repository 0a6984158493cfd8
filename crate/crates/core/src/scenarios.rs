//! The simple Wigner's-friend experiment: a source qubit is measured by the
//! friend, whose memory entangles with it, and the superobserver then
//! measures both. Collapse and unitary descriptions assign different
//! statistics unless a which-outcome record exists.

use num_complex::Complex64;

use wfsim_qcore::{
    born_probabilities, tensor_operators, Axis, DensityMatrix, Operator, OutcomeDistribution,
    SpaceLayout, StateVector, TOL_ALGEBRAIC,
};

use crate::error::{Error, Result};

/// Source amplitudes `(α, β)` of the qubit `α|0⟩ + β|1⟩`, normalized
/// within `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceAmplitudes {
    alpha: Complex64,
    beta: Complex64,
}

impl SourceAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        check_amplitude_pair(alpha, beta)?;
        Ok(Self { alpha, beta })
    }

    /// The equal superposition `(1/√2, 1/√2)`.
    pub fn balanced() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: s, beta: s }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Amplitudes `(a, b)` defining the superobserver's measurement kets
/// `|1⟩ = a|0,0⟩ + b|1,1⟩` and `|2⟩ = b*|0,0⟩ − a*|1,1⟩`, normalized
/// within `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerBasis {
    a: Complex64,
    b: Complex64,
}

impl WignerBasis {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        check_amplitude_pair(a, b)?;
        let basis = Self { a, b };
        // orthonormality of the derived kets follows from normalization,
        // but it is part of the contract, so verify it explicitly
        let w1 = basis.ket_one();
        let w2 = basis.ket_two();
        let overlap = w1.inner(&w2)?.norm();
        if overlap > TOL_ALGEBRAIC {
            return Err(Error::Qcore(wfsim_qcore::Error::NotNormalized(overlap)));
        }
        Ok(basis)
    }

    /// The Bell-type basis `a = b = 1/√2`, where the measurement outcomes
    /// correspond to the states `(|0,0⟩ ± |1,1⟩)/√2`.
    pub fn bell() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { a: s, b: s }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Measurement ket for outcome 1 on the system–memory pair.
    pub fn ket_one(&self) -> StateVector {
        branch_superposition(self.a, self.b)
    }

    /// Measurement ket for outcome 2 on the system–memory pair.
    pub fn ket_two(&self) -> StateVector {
        branch_superposition(self.b.conj(), -self.a.conj())
    }

    /// Complete projector set `(|1⟩⟨1|, |2⟩⟨2|, complement)`.
    pub fn projectors(&self) -> [Operator; 3] {
        let p1 = Operator::projector(&self.ket_one());
        let p2 = Operator::projector(&self.ket_two());
        let perp = &(&Operator::identity(system_friend_layout()) - &p1) - &p2;
        [p1, p2, perp]
    }
}

fn check_amplitude_pair(x: Complex64, y: Complex64) -> Result<()> {
    for c in [x, y] {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Qcore(wfsim_qcore::Error::NonFinite));
        }
    }
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if (norm - 1.0).abs() > TOL_ALGEBRAIC {
        return Err(Error::Qcore(wfsim_qcore::Error::NotNormalized(norm)));
    }
    Ok(())
}

/// Result stored in the friend's memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FriendOutcome {
    Zero,
    One,
}

impl FriendOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            FriendOutcome::Zero => "0",
            FriendOutcome::One => "1",
        }
    }
}

/// Result of the superobserver's measurement. `Perp` is the
/// orthogonal-complement outcome completing the two-outcome measurement to
/// a full projective one; scenario states never populate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerOutcome {
    W1,
    W2,
    Perp,
}

impl WignerOutcome {
    pub const ALL: [WignerOutcome; 3] = [WignerOutcome::W1, WignerOutcome::W2, WignerOutcome::Perp];

    pub fn label(&self) -> &'static str {
        match self {
            WignerOutcome::W1 => "1",
            WignerOutcome::W2 => "2",
            WignerOutcome::Perp => "perp",
        }
    }
}

/// System ⊗ friend-memory space.
pub fn system_friend_layout() -> SpaceLayout {
    SpaceLayout::new([("S", 2), ("F", 2)]).expect("fixed layout is valid")
}

/// System ⊗ friend-memory ⊗ record space.
pub fn system_friend_record_layout() -> SpaceLayout {
    SpaceLayout::new([("S", 2), ("F", 2), ("R", 2)]).expect("fixed layout is valid")
}

fn branch_superposition(on_zero: Complex64, on_one: Complex64) -> StateVector {
    let mut amplitudes = vec![Complex64::ZERO; 4];
    amplitudes[0] = on_zero; // |0,0⟩
    amplitudes[3] = on_one; // |1,1⟩
    StateVector::new(system_friend_layout(), amplitudes)
        .expect("normalized amplitude pair gives a normalized state")
}

fn wigner_axis() -> Axis {
    Axis::new("w", WignerOutcome::ALL.map(|w| w.label())).expect("fixed axis is valid")
}

fn record_axis() -> Axis {
    Axis::new("j", ["0", "1"]).expect("fixed axis is valid")
}

/// Unitary description of the friend's measurement: the source qubit is
/// copied into her memory, giving `α|0,0⟩ + β|1,1⟩`.
pub fn friend_isometry(src: &SourceAmplitudes) -> StateVector {
    branch_superposition(src.alpha, src.beta)
}

/// Probabilities of the superobserver's outcomes according to the friend,
/// who applies collapse dynamics after observing her result:
/// `p(1) = |α|²|a|² + |β|²|b|²` and `p(2) = |α|²|b|² + |β|²|a|²`.
pub fn collapse_probs(src: &SourceAmplitudes, wb: &WignerBasis) -> OutcomeDistribution {
    let (a2, b2) = (wb.a.norm_sqr(), wb.b.norm_sqr());
    let (al2, be2) = (src.alpha.norm_sqr(), src.beta.norm_sqr());
    OutcomeDistribution::new(
        vec![wigner_axis()],
        vec![al2 * a2 + be2 * b2, al2 * b2 + be2 * a2, 0.0],
    )
    .expect("closed form is normalized")
}

/// Probabilities of the superobserver's outcomes according to his unitary
/// description, computed by the Born rule on the entangled state.
pub fn unitary_probs(src: &SourceAmplitudes, wb: &WignerBasis) -> OutcomeDistribution {
    let rho = DensityMatrix::from_pure(&friend_isometry(src));
    let probs = born_probabilities(&rho, &wb.projectors())
        .expect("measurement projectors form a complete set");
    OutcomeDistribution::new(vec![wigner_axis()], probs).expect("Born rule is normalized")
}

/// State with a which-outcome record: `α|0,0⟩|r₀⟩ + β|1,1⟩|r₁⟩`.
pub fn record_state(src: &SourceAmplitudes) -> StateVector {
    let layout = system_friend_record_layout();
    let mut amplitudes = vec![Complex64::ZERO; 8];
    amplitudes[0] = src.alpha; // |0,0,r₀⟩
    amplitudes[7] = src.beta; // |1,1,r₁⟩
    StateVector::new(layout, amplitudes).expect("normalized amplitude pair")
}

/// Joint distribution `p(w, j)` over the superobserver's outcome and the
/// record content, evaluated on the record state. The marginal over `j`
/// reproduces [`collapse_probs`]: the mere existence of the record
/// collapses the statistics.
pub fn record_joint_probs(src: &SourceAmplitudes, wb: &WignerBasis) -> OutcomeDistribution {
    let rho = DensityMatrix::from_pure(&record_state(src));
    let r_layout = SpaceLayout::qubit("R");
    let record_projectors: Vec<Operator> = (0..2)
        .map(|j| Operator::projector(&StateVector::basis(r_layout.clone(), j).unwrap()))
        .collect();
    let mut projectors = Vec::with_capacity(6);
    for pw in wb.projectors() {
        for pj in &record_projectors {
            projectors.push(tensor_operators(&[&pw, pj]).expect("disjoint factors concatenate"));
        }
    }
    let probs =
        born_probabilities(&rho, &projectors).expect("product projectors form a complete set");
    OutcomeDistribution::new(vec![wigner_axis(), record_axis()], probs)
        .expect("Born rule is normalized")
}

/// Probabilities with a trivial (one-dimensional) record, which cannot
/// carry outcome information: the record factors out and the statistics
/// equal [`unitary_probs`] exactly.
pub fn trivial_record_probs(src: &SourceAmplitudes, wb: &WignerBasis) -> OutcomeDistribution {
    let layout = SpaceLayout::new([("S", 2), ("F", 2), ("R", 1)]).expect("fixed layout");
    let mut amplitudes = vec![Complex64::ZERO; 4];
    amplitudes[0] = src.alpha;
    amplitudes[3] = src.beta;
    let state = StateVector::new(layout, amplitudes).expect("normalized amplitude pair");
    let rho = DensityMatrix::from_pure(&state);
    let trivial_record = Operator::identity(SpaceLayout::new([("R", 1)]).expect("fixed layout"));
    let projectors: Vec<Operator> = wb
        .projectors()
        .iter()
        .map(|pw| tensor_operators(&[pw, &trivial_record]).expect("disjoint factors"))
        .collect();
    let probs =
        born_probabilities(&rho, &projectors).expect("measurement projectors form a complete set");
    OutcomeDistribution::new(vec![wigner_axis()], probs).expect("Born rule is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn src(alpha: Complex64, beta: Complex64) -> SourceAmplitudes {
        SourceAmplitudes::new(alpha, beta).unwrap()
    }

    #[test]
    fn friend_isometry_on_basis_input() {
        let state = friend_isometry(&src(Complex64::ONE, Complex64::ZERO));
        assert_eq!(state.amplitude(0), Complex64::ONE);
        for i in 1..4 {
            assert_eq!(state.amplitude(i), Complex64::ZERO);
        }
    }

    #[test]
    fn friend_isometry_is_linear_and_norm_preserving() {
        let state = friend_isometry(&SourceAmplitudes::balanced());
        assert_abs_diff_eq!(state.amplitude(0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(state.amplitude(3).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(state.amplitude(1), Complex64::ZERO);
        assert_eq!(state.amplitude(2), Complex64::ZERO);
    }

    #[test]
    fn collapse_and_unitary_tables_for_generic_real_amplitudes() {
        // p^W = ((αa+βb)², (βa−αb)²), p^F = (α²a²+β²b², β²a²+α²b²)
        let (alpha, beta) = (0.6, 0.8);
        let (a, b) = (0.28, 0.96);
        let s = src(c(alpha, 0.0), c(beta, 0.0));
        let wb = WignerBasis::new(c(a, 0.0), c(b, 0.0)).unwrap();

        let clps = collapse_probs(&s, &wb);
        assert_abs_diff_eq!(
            clps.prob(&["1"]).unwrap(),
            alpha * alpha * a * a + beta * beta * b * b,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            clps.prob(&["2"]).unwrap(),
            beta * beta * a * a + alpha * alpha * b * b,
            epsilon = 1e-14
        );

        let uni = unitary_probs(&s, &wb);
        let w1 = alpha * a + beta * b;
        let w2 = beta * a - alpha * b;
        assert_abs_diff_eq!(uni.prob(&["1"]).unwrap(), w1 * w1, epsilon = 1e-14);
        assert_abs_diff_eq!(uni.prob(&["2"]).unwrap(), w2 * w2, epsilon = 1e-14);
        assert_abs_diff_eq!(uni.prob(&["perp"]).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn balanced_case_is_maximally_paradoxical() {
        let s = SourceAmplitudes::balanced();
        let wb = WignerBasis::bell();
        let clps = collapse_probs(&s, &wb);
        assert_abs_diff_eq!(clps.prob(&["1"]).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(clps.prob(&["2"]).unwrap(), 0.5, epsilon = 1e-14);
        let uni = unitary_probs(&s, &wb);
        assert_abs_diff_eq!(uni.prob(&["1"]).unwrap(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(uni.prob(&["2"]).unwrap(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn without_superposition_descriptions_coincide() {
        let s = src(Complex64::ONE, Complex64::ZERO);
        let wb = WignerBasis::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let clps = collapse_probs(&s, &wb);
        let uni = unitary_probs(&s, &wb);
        for w in ["1", "2", "perp"] {
            assert_abs_diff_eq!(
                clps.prob(&[w]).unwrap(),
                uni.prob(&[w]).unwrap(),
                epsilon = 1e-13
            );
        }
        assert_abs_diff_eq!(clps.prob(&["1"]).unwrap(), 0.36, epsilon = 1e-14);
        assert_abs_diff_eq!(clps.prob(&["2"]).unwrap(), 0.64, epsilon = 1e-14);
    }

    #[test]
    fn record_state_has_single_branch_for_basis_input() {
        let state = record_state(&src(Complex64::ONE, Complex64::ZERO));
        assert_eq!(state.amplitude(0), Complex64::ONE);
        for i in 1..8 {
            assert_eq!(state.amplitude(i), Complex64::ZERO);
        }
    }

    #[test]
    fn tracing_out_the_record_leaves_the_branch_mixture() {
        let s = src(c(0.6, 0.0), c(0.0, 0.8));
        let rho = DensityMatrix::from_pure(&record_state(&s))
            .partial_trace(&["R"])
            .unwrap();
        // |α|² |0,0⟩⟨0,0| + |β|² |1,1⟩⟨1,1| with all coherence gone
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i, j) {
                    (0, 0) => 0.36,
                    (3, 3) => 0.64,
                    _ => 0.0,
                };
                assert_abs_diff_eq!(rho.matrix()[(i, j)].norm(), expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn record_reveals_the_observed_result() {
        let s = src(c(0.6, 0.0), c(0.0, 0.8));
        let wb = WignerBasis::new(c(0.28, 0.0), c(0.96, 0.0)).unwrap();
        let joint = record_joint_probs(&s, &wb);

        // p(j) = (|α|², |β|²)
        let p_j = joint.marginal(&["j"]).unwrap();
        assert_abs_diff_eq!(p_j.prob(&["0"]).unwrap(), 0.36, epsilon = 1e-14);
        assert_abs_diff_eq!(p_j.prob(&["1"]).unwrap(), 0.64, epsilon = 1e-14);

        // p(w|0) = (|a|², |b|²), p(w|1) = (|b|², |a|²)
        let given_0 = joint.condition_on("j", "0").unwrap();
        assert_abs_diff_eq!(given_0.prob(&["1"]).unwrap(), 0.0784, epsilon = 1e-13);
        assert_abs_diff_eq!(given_0.prob(&["2"]).unwrap(), 0.9216, epsilon = 1e-13);
        let given_1 = joint.condition_on("j", "1").unwrap();
        assert_abs_diff_eq!(given_1.prob(&["1"]).unwrap(), 0.9216, epsilon = 1e-13);
        assert_abs_diff_eq!(given_1.prob(&["2"]).unwrap(), 0.0784, epsilon = 1e-13);
    }

    #[test]
    fn ignoring_the_record_gives_collapse_statistics() {
        let s = src(c(0.48, 0.36), c(0.0, 0.8));
        let wb = WignerBasis::new(c(0.6, 0.0), c(-0.48, 0.64)).unwrap();
        let joint = record_joint_probs(&s, &wb);
        let marginal = joint.marginal(&["w"]).unwrap();
        let clps = collapse_probs(&s, &wb);
        for w in ["1", "2", "perp"] {
            assert_abs_diff_eq!(
                marginal.prob(&[w]).unwrap(),
                clps.prob(&[w]).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn trivial_record_preserves_the_disagreement() {
        let s = SourceAmplitudes::balanced();
        let wb = WignerBasis::bell();
        let trivial = trivial_record_probs(&s, &wb);
        assert_abs_diff_eq!(trivial.prob(&["1"]).unwrap(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(trivial.prob(&["2"]).unwrap(), 0.0, epsilon = 1e-13);

        // without coherence the record is irrelevant either way
        let s = src(c(0.6, 0.0), c(0.0, 0.8));
        let wb_product = WignerBasis::new(Complex64::ONE, Complex64::ZERO).unwrap();
        let trivial = trivial_record_probs(&s, &wb_product);
        let uni = unitary_probs(&s, &wb_product);
        for w in ["1", "2", "perp"] {
            assert_abs_diff_eq!(
                trivial.prob(&[w]).unwrap(),
                uni.prob(&[w]).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        assert!(SourceAmplitudes::new(Complex64::ONE, Complex64::ONE).is_err());
        assert!(WignerBasis::new(c(0.9, 0.0), c(0.9, 0.0)).is_err());
        assert!(SourceAmplitudes::new(c(f64::NAN, 0.0), Complex64::ZERO).is_err());
    }
}
