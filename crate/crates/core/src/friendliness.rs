//! The extended Wigner's-friend setup: a maximally entangled pair shared
//! between Bob and a friend-in-a-box, with the superobserver measuring the
//! friend together with her system. The CHSH-like local-friendliness
//! expression reaches 2√2 without records, drops to √2 once a which-outcome
//! record exists, and conditioning on a channel message recovers anything
//! from 0 to 2√2 depending on the channel angles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use wfsim_qcore::{
    apply_channel, expectation, tensor_operators, DensityMatrix, Operator, SpaceLayout,
    StateVector, TOL_SPECTRAL,
};

use crate::channel::{dephasing_channel, message_basis, ChannelParams, MessageOutcome};
use crate::error::{Error, Result};

/// Bob's qubit ⊗ friend's system ⊗ friend's memory.
pub fn extended_layout() -> SpaceLayout {
    SpaceLayout::new([("1", 2), ("2", 2), ("F", 2)]).expect("fixed layout is valid")
}

/// Bob's qubit ⊗ friend's system ⊗ friend's memory ⊗ record.
pub fn extended_record_layout() -> SpaceLayout {
    SpaceLayout::new([("1", 2), ("2", 2), ("F", 2), ("R", 2)]).expect("fixed layout is valid")
}

/// Measurement setting of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    Z,
    X,
}

/// The four fixed observables: Bob's `B_z = (Z+X)/√2` and
/// `B_x = (Z−X)/√2` on his qubit, and the superobserver's `W_z` and `W_x`
/// acting on the two-dimensional branch span of system ⊗ memory, with zero
/// action on its complement.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    bob_z: Operator,
    bob_x: Operator,
    wigner_z: Operator,
    wigner_x: Operator,
}

impl ObservableSet {
    pub fn standard() -> Self {
        let bob_layout = SpaceLayout::qubit("1");
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let bob_z = Operator::hermitian(
            bob_layout.clone(),
            DMatrix::from_row_slice(2, 2, &[s, s, s, -s]),
        )
        .expect("fixed matrix is Hermitian");
        let bob_x =
            Operator::hermitian(bob_layout, DMatrix::from_row_slice(2, 2, &[s, -s, -s, -s]))
                .expect("fixed matrix is Hermitian");

        let wigner_layout = SpaceLayout::new([("2", 2), ("F", 2)]).expect("fixed layout");
        let mut wz = DMatrix::zeros(4, 4);
        wz[(0, 0)] = Complex64::ONE; // |0,0⟩⟨0,0|
        wz[(3, 3)] = -Complex64::ONE; // −|1,1⟩⟨1,1|
        let wigner_z =
            Operator::hermitian(wigner_layout.clone(), wz).expect("fixed matrix is Hermitian");
        let mut wx = DMatrix::zeros(4, 4);
        wx[(0, 3)] = Complex64::ONE; // |0,0⟩⟨1,1|
        wx[(3, 0)] = Complex64::ONE; // |1,1⟩⟨0,0|
        let wigner_x = Operator::hermitian(wigner_layout, wx).expect("fixed matrix is Hermitian");

        Self {
            bob_z,
            bob_x,
            wigner_z,
            wigner_x,
        }
    }

    pub fn bob(&self, setting: Setting) -> &Operator {
        match setting {
            Setting::Z => &self.bob_z,
            Setting::X => &self.bob_x,
        }
    }

    pub fn wigner(&self, setting: Setting) -> &Operator {
        match setting {
            Setting::Z => &self.wigner_z,
            Setting::X => &self.wigner_x,
        }
    }
}

impl Default for ObservableSet {
    fn default() -> Self {
        Self::standard()
    }
}

/// Sign pattern of the CHSH expression: four `(bob, wigner, negated)`
/// terms with exactly one negated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChshSpec {
    terms: [(Setting, Setting, bool); 4],
}

impl ChshSpec {
    pub fn new(terms: [(Setting, Setting, bool); 4]) -> Result<Self> {
        if terms.iter().filter(|(_, _, negated)| *negated).count() != 1 {
            return Err(Error::BadSignPattern);
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(Setting, Setting, bool); 4] {
        &self.terms
    }
}

impl Default for ChshSpec {
    /// `⟨B_z W_z⟩ + ⟨B_x W_z⟩ − ⟨B_z W_x⟩ + ⟨B_x W_x⟩`
    fn default() -> Self {
        Self {
            terms: [
                (Setting::Z, Setting::Z, false),
                (Setting::X, Setting::Z, false),
                (Setting::Z, Setting::X, true),
                (Setting::X, Setting::X, false),
            ],
        }
    }
}

/// The shared state without records:
/// `(|0⟩₁|0,0⟩ − |1⟩₁|1,1⟩)/√2` on Bob ⊗ system ⊗ memory.
pub fn extended_state() -> StateVector {
    let mut amplitudes = vec![Complex64::ZERO; 8];
    amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[7] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    StateVector::new(extended_layout(), amplitudes).expect("fixed state is normalized")
}

/// The shared state with a which-outcome record:
/// `(|0⟩₁|0,0⟩|r₀⟩ − |1⟩₁|1,1⟩|r₁⟩)/√2`.
pub fn extended_record_state() -> StateVector {
    let mut amplitudes = vec![Complex64::ZERO; 16];
    amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amplitudes[15] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    StateVector::new(extended_record_layout(), amplitudes).expect("fixed state is normalized")
}

/// The record state after the channel acted on the record factor:
/// `(𝟙 ⊗ C)[|Ψʳ⟩⟨Ψʳ|]`. Tracing out the record gives the same collapsed
/// state for every channel parameter.
pub fn channel_extended_state(params: &ChannelParams) -> DensityMatrix {
    let rho = DensityMatrix::from_pure(&extended_record_state());
    let channel = dephasing_channel(&message_basis(params));
    apply_channel(&rho, &channel, "R").expect("channel and record dimensions match")
}

/// Signed sum of the four correlators on `rho`, which may carry extra
/// factors (such as the record) beyond Bob's qubit and the measured pair.
pub fn chsh_value(
    rho: &DensityMatrix,
    observables: &ObservableSet,
    spec: &ChshSpec,
) -> Result<f64> {
    let mut value = 0.0;
    for (bob, wigner, negated) in spec.terms() {
        let product = tensor_operators(&[observables.bob(*bob), observables.wigner(*wigner)])?;
        let embedded = product.embed(rho.layout())?;
        let correlator = expectation(rho, &embedded)?;
        value += if *negated { -correlator } else { correlator };
    }
    Ok(value)
}

/// Probability of message `n` on a state carrying the record factor.
pub fn message_probability(
    rho: &DensityMatrix,
    n: MessageOutcome,
    params: &ChannelParams,
) -> Result<f64> {
    let projector = Operator::projector(message_basis(params).ket(n));
    Ok(expectation(rho, &projector.embed(rho.layout())?)?)
}

/// Correlator `⟨B ⊗ W⟩` conditioned on the channel message `n`, following
/// the convention that it is 0 when the message never occurs.
pub fn conditional_expectation(
    rho: &DensityMatrix,
    bob: &Operator,
    wigner: &Operator,
    n: MessageOutcome,
    params: &ChannelParams,
) -> Result<f64> {
    let p_n = message_probability(rho, n, params)?;
    if p_n <= 0.0 {
        return Ok(0.0);
    }
    let projector = Operator::projector(message_basis(params).ket(n));
    let product = tensor_operators(&[bob, wigner, &projector])?;
    let joint = expectation(rho, &product.embed(rho.layout())?)?;
    Ok(joint / p_n)
}

/// One point of a message-conditioned CHSH evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalChshRow {
    pub n: MessageOutcome,
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

impl ConditionalChshRow {
    fn new(n: MessageOutcome, theta: f64, phi: f64, value: f64) -> Self {
        assert!(
            value.abs() <= 2.0 * SQRT_2 + TOL_SPECTRAL,
            "CHSH value {value} beyond the quantum bound"
        );
        Self {
            n,
            theta,
            phi,
            value,
        }
    }
}

fn conditional_chsh_on(
    rho: &DensityMatrix,
    n: MessageOutcome,
    params: &ChannelParams,
    observables: &ObservableSet,
    spec: &ChshSpec,
) -> f64 {
    let mut value = 0.0;
    for (bob, wigner, negated) in spec.terms() {
        let correlator = conditional_expectation(
            rho,
            observables.bob(*bob),
            observables.wigner(*wigner),
            n,
            params,
        )
        .expect("fixed observables on the fixed layout");
        value += if *negated { -correlator } else { correlator };
    }
    value
}

/// CHSH value conditioned on message `n` for the default observables and
/// sign pattern, evaluated on the channel-extended state.
pub fn conditional_chsh(n: MessageOutcome, params: &ChannelParams) -> ConditionalChshRow {
    let rho = channel_extended_state(params);
    let value = conditional_chsh_on(
        &rho,
        n,
        params,
        &ObservableSet::standard(),
        &ChshSpec::default(),
    );
    ConditionalChshRow::new(n, params.theta(), params.phi(), value)
}

/// Sweeps the channel angle θ at fixed φ; returns one row per message per
/// grid point, message 0 first.
pub fn sweep_chsh(phi: f64, theta_grid: &[f64]) -> Result<Vec<ConditionalChshRow>> {
    if theta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let observables = ObservableSet::standard();
    let spec = ChshSpec::default();
    let mut rows = Vec::with_capacity(theta_grid.len() * 2);
    for &theta in theta_grid {
        let params = ChannelParams::new(theta, phi)?;
        let rho = channel_extended_state(&params);
        for n in MessageOutcome::ALL {
            let value = conditional_chsh_on(&rho, n, &params, &observables, &spec);
            rows.push(ConditionalChshRow::new(n, theta, phi, value));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn extended_state_is_maximally_entangled() {
        let state = extended_state();
        assert_abs_diff_eq!(state.amplitudes().norm(), 1.0, epsilon = 1e-15);
        let reduced = DensityMatrix::from_pure(&state)
            .partial_trace(&["2", "F"])
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(reduced.matrix()[(i, j)].norm(), expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn single_correlator_on_extended_state() {
        let observables = ObservableSet::standard();
        let product =
            tensor_operators(&[observables.bob(Setting::Z), observables.wigner(Setting::Z)])
                .unwrap();
        let rho = DensityMatrix::from_pure(&extended_state());
        let value = expectation(&rho, &product).unwrap();
        assert_abs_diff_eq!(value, FRAC_1_SQRT_2, epsilon = 1e-14);
    }

    #[test]
    fn no_record_state_violates_maximally() {
        let rho = DensityMatrix::from_pure(&extended_state());
        let value = chsh_value(&rho, &ObservableSet::standard(), &ChshSpec::default()).unwrap();
        assert_abs_diff_eq!(value, 2.0 * SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn record_state_does_not_violate() {
        let rho = DensityMatrix::from_pure(&extended_record_state());
        let value = chsh_value(&rho, &ObservableSet::standard(), &ChshSpec::default()).unwrap();
        assert_abs_diff_eq!(value, SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn maximally_mixed_state_gives_zero() {
        let rho = DensityMatrix::maximally_mixed(extended_layout());
        let value = chsh_value(&rho, &ObservableSet::standard(), &ChshSpec::default()).unwrap();
        assert_abs_diff_eq!(value, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn traced_record_state_kills_coherent_correlators() {
        let reduced = DensityMatrix::from_pure(&extended_record_state())
            .partial_trace(&["R"])
            .unwrap();
        // ½(|0⟩⟨0| ⊗ |0,0⟩⟨0,0| + |1⟩⟨1| ⊗ |1,1⟩⟨1,1|)
        for (i, j, expected) in [(0, 0, 0.5), (7, 7, 0.5), (0, 7, 0.0)] {
            assert_abs_diff_eq!(reduced.matrix()[(i, j)].norm(), expected, epsilon = 1e-14);
        }
        let observables = ObservableSet::standard();
        for bob in [Setting::Z, Setting::X] {
            let product =
                tensor_operators(&[observables.bob(bob), observables.wigner(Setting::X)]).unwrap();
            let value = expectation(&reduced, &product).unwrap();
            assert_abs_diff_eq!(value, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn conditioning_on_the_friend_outcome_also_kills_them() {
        // project the record (equivalently the memory) onto one branch
        let rho = DensityMatrix::from_pure(&extended_record_state());
        let observables = ObservableSet::standard();
        for branch in 0..2 {
            for conditioning_factor in ["R", "F"] {
                let layout = SpaceLayout::qubit(conditioning_factor);
                let projector = Operator::projector(&StateVector::basis(layout, branch).unwrap())
                    .embed(rho.layout())
                    .unwrap();
                let p = expectation(&rho, &projector).unwrap();
                assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
                for bob in [Setting::Z, Setting::X] {
                    let product =
                        tensor_operators(&[observables.bob(bob), observables.wigner(Setting::X)])
                            .unwrap()
                            .embed(rho.layout())
                            .unwrap();
                    let conditioned = projector
                        .compose(&product)
                        .unwrap()
                        .compose(&projector)
                        .unwrap();
                    let value = expectation(&rho, &conditioned).unwrap() / p;
                    assert_abs_diff_eq!(value, 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn message_probabilities_are_half_for_all_parameters() {
        for (theta, phi) in [(0.0, 0.0), (0.7, 2.3), (FRAC_PI_4, 1.0), (2.9, 5.8)] {
            let params = ChannelParams::new(theta, phi).unwrap();
            let rho = channel_extended_state(&params);
            assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-13);
            for n in MessageOutcome::ALL {
                let p = message_probability(&rho, n, &params).unwrap();
                assert_abs_diff_eq!(p, 0.5, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn traced_record_is_independent_of_channel_parameters() {
        let first = channel_extended_state(&ChannelParams::new(0.0, 0.0).unwrap())
            .partial_trace(&["R"])
            .unwrap();
        let second = channel_extended_state(&ChannelParams::new(FRAC_PI_4, 1.0).unwrap())
            .partial_trace(&["R"])
            .unwrap();
        let defect = (first.matrix() - second.matrix())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-13);
    }

    #[test]
    fn conditional_correlators_match_the_channel_geometry() {
        let observables = ObservableSet::standard();
        for (theta, phi) in [(0.3, 0.0), (1.1, 2.0), (FRAC_PI_4, 0.7)] {
            let params = ChannelParams::new(theta, phi).unwrap();
            let rho = channel_extended_state(&params);
            for n in MessageOutcome::ALL {
                // ⟨B_z ⊗ W_z⟩ is untouched by the channel
                let zz = conditional_expectation(
                    &rho,
                    observables.bob(Setting::Z),
                    observables.wigner(Setting::Z),
                    n,
                    &params,
                )
                .unwrap();
                assert_abs_diff_eq!(zz, FRAC_1_SQRT_2, epsilon = 1e-13);

                let zx = conditional_expectation(
                    &rho,
                    observables.bob(Setting::Z),
                    observables.wigner(Setting::X),
                    n,
                    &params,
                )
                .unwrap();
                let sign = if n == MessageOutcome::M0 { 1.0 } else { -1.0 };
                assert_abs_diff_eq!(
                    zx,
                    -sign * FRAC_1_SQRT_2 * (2.0 * theta).sin() * phi.cos(),
                    epsilon = 1e-13
                );

                let xx = conditional_expectation(
                    &rho,
                    observables.bob(Setting::X),
                    observables.wigner(Setting::X),
                    n,
                    &params,
                )
                .unwrap();
                assert_abs_diff_eq!(xx, -zx, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn conditional_chsh_extremes() {
        let unbiased = ChannelParams::new(FRAC_PI_4, 0.0).unwrap();
        let row0 = conditional_chsh(MessageOutcome::M0, &unbiased);
        assert_abs_diff_eq!(row0.value, 2.0 * SQRT_2, epsilon = 1e-13);
        let row1 = conditional_chsh(MessageOutcome::M1, &unbiased);
        assert_abs_diff_eq!(row1.value, 0.0, epsilon = 1e-13);

        for theta in [0.0, FRAC_PI_2] {
            for phi in [0.0, 1.3] {
                let revealing = ChannelParams::new(theta, phi).unwrap();
                for n in MessageOutcome::ALL {
                    let row = conditional_chsh(n, &revealing);
                    assert_abs_diff_eq!(row.value, SQRT_2, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn sweep_rows_mirror_about_sqrt_two() {
        let grid: Vec<f64> = (0..17)
            .map(|k| k as f64 * std::f64::consts::PI / 16.0)
            .collect();
        let rows = sweep_chsh(0.0, &grid).unwrap();
        assert_eq!(rows.len(), 34);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].n, MessageOutcome::M0);
            assert_eq!(pair[1].n, MessageOutcome::M1);
            assert_abs_diff_eq!(pair[0].value + pair[1].value, 2.0 * SQRT_2, epsilon = 1e-12);
        }
        // φ = 0, θ = π/8 conditions message 0 to √2 + 1
        let row = rows
            .iter()
            .find(|r| {
                (r.theta - std::f64::consts::FRAC_PI_8).abs() < 1e-12 && r.n == MessageOutcome::M0
            })
            .unwrap();
        assert_abs_diff_eq!(row.value, SQRT_2 + 1.0, epsilon = 1e-13);
    }

    #[test]
    fn sign_pattern_must_have_exactly_one_negation() {
        assert!(ChshSpec::new([
            (Setting::Z, Setting::Z, false),
            (Setting::X, Setting::Z, false),
            (Setting::Z, Setting::X, false),
            (Setting::X, Setting::X, false),
        ])
        .is_err());
        assert!(ChshSpec::new([
            (Setting::Z, Setting::Z, true),
            (Setting::X, Setting::Z, false),
            (Setting::Z, Setting::X, true),
            (Setting::X, Setting::X, false),
        ])
        .is_err());
        // an alternative single-negation pattern is allowed
        let alternative = ChshSpec::new([
            (Setting::Z, Setting::Z, true),
            (Setting::X, Setting::Z, false),
            (Setting::Z, Setting::X, false),
            (Setting::X, Setting::X, false),
        ])
        .unwrap();
        let rho = DensityMatrix::from_pure(&extended_state());
        let value = chsh_value(&rho, &ObservableSet::standard(), &alternative).unwrap();
        assert!(value.abs() <= 2.0 * SQRT_2 + 1e-10);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(matches!(sweep_chsh(0.0, &[]), Err(Error::EmptyGrid)));
    }
}
