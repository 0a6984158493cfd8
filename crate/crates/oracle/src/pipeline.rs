//! Generic density-matrix pipeline: prepare a pure state, expand factors
//! through isometries, decohere a factor through a channel, and read out
//! joint Born-rule statistics for any number of commuting measurements.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use wfsim_qcore::{
    apply_channel, born_probabilities, expectation, tensor_operators, validate_projectors, Axis,
    DensityMatrix, Error, KrausChannel, Operator, OutcomeDistribution, Result, SpaceLayout,
    StateVector,
};

use crate::closed_form::message_overlaps;
use crate::config::TrialConfig;

/// Inner isometry `V` with `V†V = 𝟙`, replacing one factor by a group of
/// output factors (for example a measurement that copies a qubit into a
/// memory register).
#[derive(Debug, Clone)]
pub struct Isometry {
    output: SpaceLayout,
    matrix: DMatrix<Complex64>,
}

impl Isometry {
    /// `matrix` has one column per input basis state and one row per basis
    /// state of the output factor group.
    pub fn new(output: SpaceLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != output.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for an output space of dimension {}",
                matrix.nrows(),
                output.total_dim()
            )));
        }
        let gram = matrix.adjoint() * &matrix;
        let defect = (gram - DMatrix::identity(matrix.ncols(), matrix.ncols()))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if defect > 1e-12 {
            return Err(Error::DimensionMismatch(format!(
                "matrix is not an isometry (V†V defect {defect:.3e})"
            )));
        }
        Ok(Self { output, matrix })
    }

    /// The copying isometry `|i⟩ ↦ |i⟩|i⟩` from one qubit factor into two.
    pub fn copy_qubit(from: &str, to: &str) -> Self {
        let output = SpaceLayout::new([(from, 2), (to, 2)]).unwrap();
        let mut matrix = DMatrix::zeros(4, 2);
        matrix[(0, 0)] = Complex64::ONE; // |0⟩ ↦ |0,0⟩
        matrix[(3, 1)] = Complex64::ONE; // |1⟩ ↦ |1,1⟩
        Self::new(output, matrix).unwrap()
    }

    fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// Applies the isometry to the factor named `on` of a pure state.
    fn apply(&self, state: &StateVector, on: &str) -> Result<StateVector> {
        let pos = state
            .layout()
            .position(on)
            .ok_or_else(|| Error::UnknownLabel(on.to_string()))?;
        let (_, dim) = &state.layout().factors()[pos];
        if *dim != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "isometry with input dimension {} applied to factor `{on}` of dimension {dim}",
                self.input_dim()
            )));
        }
        let mut new_factors: Vec<(String, usize)> = Vec::new();
        for (i, factor) in state.layout().factors().iter().enumerate() {
            if i == pos {
                new_factors.extend(self.output.factors().iter().cloned());
            } else {
                new_factors.push(factor.clone());
            }
        }
        let new_layout = SpaceLayout::new(new_factors)?;
        let out_factors = self.output.num_factors();

        let mut amplitudes = vec![Complex64::ZERO; new_layout.total_dim()];
        for old_index in 0..state.dim() {
            let amp = state.amplitude(old_index);
            if amp == Complex64::ZERO {
                continue;
            }
            let old_digits = state.layout().digits(old_index);
            for out_index in 0..self.output.total_dim() {
                let weight = self.matrix[(out_index, old_digits[pos])];
                if weight == Complex64::ZERO {
                    continue;
                }
                let out_digits = self.output.digits(out_index);
                let mut new_digits = Vec::with_capacity(new_layout.num_factors());
                new_digits.extend_from_slice(&old_digits[..pos]);
                new_digits.extend_from_slice(&out_digits);
                new_digits.extend_from_slice(&old_digits[pos + 1..]);
                debug_assert_eq!(new_digits.len(), old_digits.len() - 1 + out_factors);
                amplitudes[new_layout.index_of(&new_digits)] += weight * amp;
            }
        }
        StateVector::new(new_layout, amplitudes)
    }
}

/// One step of a measurement pipeline.
#[derive(Debug, Clone)]
pub enum PipelineStep {
    /// Initial pure state; must come first and appear exactly once.
    Prepare(StateVector),
    /// Isometry applied to the factor named `on`.
    Isometry { on: String, isometry: Isometry },
    /// Channel applied to the factor named `on`.
    Channel { on: String, channel: KrausChannel },
    /// Projective measurement: named outcomes with projectors on any
    /// subset of factors. All measurements are read out jointly at the
    /// end, so different measure steps must touch disjoint factors.
    Measure {
        name: String,
        projectors: Vec<(String, Operator)>,
    },
}

/// Runs the pipeline and returns the joint distribution over all declared
/// measurements, axes in declaration order.
pub fn run_pipeline(steps: &[PipelineStep]) -> Result<OutcomeDistribution> {
    let mut pure: Option<StateVector> = None;
    let mut mixed: Option<DensityMatrix> = None;
    let mut measures: Vec<(String, Vec<(String, Operator)>)> = Vec::new();

    for step in steps {
        match step {
            PipelineStep::Prepare(state) => {
                if pure.is_some() || mixed.is_some() {
                    return Err(Error::LayoutMismatch(
                        "pipeline state prepared twice".into(),
                    ));
                }
                pure = Some(state.clone());
            }
            PipelineStep::Isometry { on, isometry } => match (&pure, &mixed) {
                (Some(state), None) => pure = Some(isometry.apply(state, on)?),
                (None, Some(_)) => {
                    return Err(Error::LayoutMismatch(
                        "isometry after the state became mixed".into(),
                    ))
                }
                _ => return Err(Error::LayoutMismatch("isometry before prepare".into())),
            },
            PipelineStep::Channel { on, channel } => {
                let rho = match (pure.take(), mixed.take()) {
                    (Some(state), None) => DensityMatrix::from_pure(&state),
                    (None, Some(rho)) => rho,
                    _ => return Err(Error::LayoutMismatch("channel before prepare".into())),
                };
                mixed = Some(apply_channel(&rho, channel, on)?);
            }
            PipelineStep::Measure { name, projectors } => {
                measures.push((name.clone(), projectors.clone()));
            }
        }
    }

    let rho = match (pure, mixed) {
        (Some(state), None) => DensityMatrix::from_pure(&state),
        (None, Some(rho)) => rho,
        _ => return Err(Error::Empty),
    };
    if measures.is_empty() {
        return Err(Error::Empty);
    }

    let mut axes = Vec::with_capacity(measures.len());
    for (name, projectors) in &measures {
        axes.push(Axis::new(
            name.clone(),
            projectors.iter().map(|(label, _)| label.clone()),
        )?);
        validate_projectors(
            &projectors
                .iter()
                .map(|(_, p)| p.clone())
                .collect::<Vec<_>>(),
        )?;
    }

    // Tensor products of complete orthogonal sets are again complete and
    // orthogonal, so when the measured factor groups tile the whole space in
    // declaration order the joint projectors are plain Kronecker products.
    // Otherwise each projector is embedded and the commuting embeddings
    // multiplied, with the joint set re-validated by `born_probabilities`.
    let measure_layouts: Vec<&SpaceLayout> = measures
        .iter()
        .map(|(_, projectors)| projectors[0].1.layout())
        .collect();
    let tiles_whole_space =
        SpaceLayout::concat(&measure_layouts).is_ok_and(|concat| &concat == rho.layout());

    let sizes: Vec<usize> = measures.iter().map(|(_, p)| p.len()).collect();
    let combos: usize = sizes.iter().product();
    let mut probs = Vec::with_capacity(combos);
    let mut joint = Vec::with_capacity(combos);
    for flat in 0..combos {
        let mut rem = flat;
        let mut picks = vec![0usize; sizes.len()];
        for (slot, size) in picks.iter_mut().zip(&sizes).rev() {
            *slot = rem % size;
            rem /= size;
        }
        let parts: Vec<&Operator> = picks
            .iter()
            .enumerate()
            .map(|(m, &pick)| &measures[m].1[pick].1)
            .collect();
        if tiles_whole_space {
            let projector = tensor_operators(&parts)?;
            let p = expectation(&rho, &projector)?;
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            probs.push(p.clamp(0.0, 1.0));
        } else {
            let mut product = parts[0].embed(rho.layout())?;
            for part in &parts[1..] {
                product = product.compose(&part.embed(rho.layout())?)?;
            }
            joint.push(product);
        }
    }
    if !tiles_whole_space {
        probs = born_probabilities(&rho, &joint)?;
    }
    OutcomeDistribution::new(axes, probs)
}

// ---------------------------------------------------------------------------
// Scenario builders
// ---------------------------------------------------------------------------

fn source_ket(cfg: &TrialConfig) -> StateVector {
    StateVector::new(SpaceLayout::qubit("S"), vec![cfg.alpha, cfg.beta])
        .expect("sampled amplitude pairs are normalized")
}

fn wigner_kets(cfg: &TrialConfig, layout: &SpaceLayout) -> (StateVector, StateVector) {
    let d = layout.total_dim();
    debug_assert_eq!(d, 4);
    let mut w1 = vec![Complex64::ZERO; d];
    w1[0] = cfg.a;
    w1[3] = cfg.b;
    let mut w2 = vec![Complex64::ZERO; d];
    w2[0] = cfg.b.conj();
    w2[3] = -cfg.a.conj();
    (
        StateVector::new(layout.clone(), w1).expect("basis amplitudes are normalized"),
        StateVector::new(layout.clone(), w2).expect("basis amplitudes are normalized"),
    )
}

fn wigner_measure(cfg: &TrialConfig, layout: &SpaceLayout) -> PipelineStep {
    let (w1, w2) = wigner_kets(cfg, layout);
    let p1 = Operator::projector(&w1);
    let p2 = Operator::projector(&w2);
    let perp = &(&Operator::identity(layout.clone()) - &p1) - &p2;
    PipelineStep::Measure {
        name: "w".into(),
        projectors: vec![("1".into(), p1), ("2".into(), p2), ("perp".into(), perp)],
    }
}

fn record_basis_measure(name: &str) -> PipelineStep {
    let layout = SpaceLayout::qubit("R");
    PipelineStep::Measure {
        name: name.into(),
        projectors: (0..2)
            .map(|i| {
                (
                    i.to_string(),
                    Operator::projector(&StateVector::basis(layout.clone(), i).unwrap()),
                )
            })
            .collect(),
    }
}

fn message_kets(theta: f64, phi: f64) -> [StateVector; 2] {
    let layout = SpaceLayout::qubit("R");
    let ovl = message_overlaps(theta, phi);
    // ⟨n|rᵢ⟩ are the conjugated coordinates of |n⟩ in the record basis
    [0, 1].map(|n| {
        StateVector::new(layout.clone(), vec![ovl[n][0].conj(), ovl[n][1].conj()])
            .expect("message kets are normalized")
    })
}

fn message_channel(theta: f64, phi: f64) -> KrausChannel {
    let kets = message_kets(theta, phi);
    KrausChannel::new(kets.iter().map(Operator::projector).collect())
        .expect("projectors onto an orthonormal basis are complete")
}

fn message_measure(theta: f64, phi: f64) -> PipelineStep {
    let kets = message_kets(theta, phi);
    PipelineStep::Measure {
        name: "n".into(),
        projectors: kets
            .iter()
            .enumerate()
            .map(|(n, ket)| (n.to_string(), Operator::projector(ket)))
            .collect(),
    }
}

/// Simple experiment without any record: source, friend memory, Wigner
/// measurement. The distribution realizes the unitary description.
pub fn simple_unitary_steps(cfg: &TrialConfig) -> Vec<PipelineStep> {
    let sf = SpaceLayout::new([("S", 2), ("F", 2)]).unwrap();
    vec![
        PipelineStep::Prepare(source_ket(cfg)),
        PipelineStep::Isometry {
            on: "S".into(),
            isometry: Isometry::copy_qubit("S", "F"),
        },
        wigner_measure(cfg, &sf),
    ]
}

/// Simple experiment with a which-outcome record, read out in the record
/// basis: joint distribution over `(w, j)`.
pub fn simple_record_steps(cfg: &TrialConfig) -> Vec<PipelineStep> {
    let sf = SpaceLayout::new([("S", 2), ("F", 2)]).unwrap();
    vec![
        PipelineStep::Prepare(source_ket(cfg)),
        PipelineStep::Isometry {
            on: "S".into(),
            isometry: Isometry::copy_qubit("S", "F"),
        },
        PipelineStep::Isometry {
            on: "F".into(),
            isometry: Isometry::copy_qubit("F", "R"),
        },
        wigner_measure(cfg, &sf),
        record_basis_measure("j"),
    ]
}

/// Simple experiment with the record passed through the communication
/// channel: joint distribution over `(w, n)`.
pub fn simple_channel_steps(cfg: &TrialConfig) -> Vec<PipelineStep> {
    let sf = SpaceLayout::new([("S", 2), ("F", 2)]).unwrap();
    vec![
        PipelineStep::Prepare(source_ket(cfg)),
        PipelineStep::Isometry {
            on: "S".into(),
            isometry: Isometry::copy_qubit("S", "F"),
        },
        PipelineStep::Isometry {
            on: "F".into(),
            isometry: Isometry::copy_qubit("F", "R"),
        },
        PipelineStep::Channel {
            on: "R".into(),
            channel: message_channel(cfg.theta, cfg.phi),
        },
        wigner_measure(cfg, &sf),
        message_measure(cfg.theta, cfg.phi),
    ]
}

/// Bob's measurement settings `(Z ± X)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BobSetting {
    Z,
    X,
}

/// Wigner's measurement settings on the friend-plus-system pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerSetting {
    Z,
    X,
}

fn bob_measure(setting: BobSetting) -> PipelineStep {
    let layout = SpaceLayout::qubit("1");
    // (Z + X)/√2 has eigenvectors at Bloch angle π/4, (Z − X)/√2 at −π/4
    let half = std::f64::consts::FRAC_PI_8;
    let (c8, s8) = (half.cos(), half.sin());
    let (plus, minus) = match setting {
        BobSetting::Z => ([c8, s8], [-s8, c8]),
        BobSetting::X => ([c8, -s8], [s8, c8]),
    };
    let ket = |coords: [f64; 2]| {
        StateVector::new(
            layout.clone(),
            coords
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    };
    PipelineStep::Measure {
        name: "b".into(),
        projectors: vec![
            ("+1".into(), Operator::projector(&ket(plus))),
            ("-1".into(), Operator::projector(&ket(minus))),
        ],
    }
}

fn wigner_setting_measure(setting: WignerSetting) -> PipelineStep {
    let layout = SpaceLayout::new([("2", 2), ("F", 2)]).unwrap();
    let branch = |weights: [Complex64; 2]| {
        let mut amps = vec![Complex64::ZERO; 4];
        amps[0] = weights[0];
        amps[3] = weights[1];
        StateVector::new(layout.clone(), amps).unwrap()
    };
    let one = Complex64::ONE;
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (plus, minus) = match setting {
        WignerSetting::Z => (
            branch([one, Complex64::ZERO]),
            branch([Complex64::ZERO, one]),
        ),
        WignerSetting::X => (branch([s, s]), branch([s, -s])),
    };
    let p_plus = Operator::projector(&plus);
    let p_minus = Operator::projector(&minus);
    let zero = &(&Operator::identity(layout) - &p_plus) - &p_minus;
    PipelineStep::Measure {
        name: "w".into(),
        projectors: vec![
            ("+1".into(), p_plus),
            ("-1".into(), p_minus),
            ("0".into(), zero),
        ],
    }
}

/// Extended experiment with records and channel for one pair of settings:
/// joint distribution over `(b, w, n)`.
pub fn extended_chsh_steps(
    theta: f64,
    phi: f64,
    bob: BobSetting,
    wigner: WignerSetting,
) -> Vec<PipelineStep> {
    let pair = SpaceLayout::new([("1", 2), ("2", 2)]).unwrap();
    let mut amps = vec![Complex64::ZERO; 4];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[3] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    let source = StateVector::new(pair, amps).unwrap();
    vec![
        PipelineStep::Prepare(source),
        PipelineStep::Isometry {
            on: "2".into(),
            isometry: Isometry::copy_qubit("2", "F"),
        },
        PipelineStep::Isometry {
            on: "F".into(),
            isometry: Isometry::copy_qubit("F", "R"),
        },
        PipelineStep::Channel {
            on: "R".into(),
            channel: message_channel(theta, phi),
        },
        bob_measure(bob),
        wigner_setting_measure(wigner),
        message_measure(theta, phi),
    ]
}

fn outcome_value(label: &str) -> f64 {
    match label {
        "+1" => 1.0,
        "-1" => -1.0,
        "0" => 0.0,
        other => panic!("unexpected outcome label `{other}`"),
    }
}

/// Message-conditioned CHSH values `[⟨CHSH⟩^{|0}, ⟨CHSH⟩^{|1}]` computed
/// purely from pipeline distributions, with the sign pattern
/// `⟨B_z W_z⟩ + ⟨B_x W_z⟩ − ⟨B_z W_x⟩ + ⟨B_x W_x⟩`.
pub fn conditional_chsh_pipeline(theta: f64, phi: f64) -> Result<[f64; 2]> {
    let settings = [
        (BobSetting::Z, WignerSetting::Z, 1.0),
        (BobSetting::X, WignerSetting::Z, 1.0),
        (BobSetting::Z, WignerSetting::X, -1.0),
        (BobSetting::X, WignerSetting::X, 1.0),
    ];
    let mut chsh = [0.0; 2];
    for (bob, wigner, sign) in settings {
        let dist = run_pipeline(&extended_chsh_steps(theta, phi, bob, wigner))?;
        for (n, slot) in chsh.iter_mut().enumerate() {
            let n_label = n.to_string();
            let p_n = dist.marginal(&["n"])?.prob(&[&n_label])?;
            if p_n == 0.0 {
                continue;
            }
            let given_n = dist.condition_on("n", &n_label)?;
            let mut correlator = 0.0;
            for (labels, p) in given_n.iter() {
                correlator += outcome_value(labels[0]) * outcome_value(labels[1]) * p;
            }
            *slot += sign * correlator;
        }
    }
    Ok(chsh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn prepare_and_measure_basis_state() {
        let layout = SpaceLayout::qubit("q");
        let steps = vec![
            PipelineStep::Prepare(StateVector::basis(layout.clone(), 0).unwrap()),
            PipelineStep::Measure {
                name: "z".into(),
                projectors: (0..2)
                    .map(|i| {
                        (
                            i.to_string(),
                            Operator::projector(&StateVector::basis(layout.clone(), i).unwrap()),
                        )
                    })
                    .collect(),
            },
        ];
        let dist = run_pipeline(&steps).unwrap();
        assert_eq!(dist.prob(&["0"]).unwrap(), 1.0);
        assert_eq!(dist.prob(&["1"]).unwrap(), 0.0);
    }

    #[test]
    fn unitary_pipeline_matches_closed_form() {
        let cfg = TrialConfig {
            alpha: Complex64::new(0.6, 0.0),
            beta: Complex64::new(0.0, 0.8),
            a: Complex64::from_polar(0.3f64.cos(), 0.2),
            b: Complex64::from_polar(0.3f64.sin(), 1.1),
            theta: 0.7,
            phi: 2.1,
        };
        let dist = run_pipeline(&simple_unitary_steps(&cfg)).unwrap();
        let expected = closed_form::unitary_table(&cfg);
        assert!((dist.prob(&["1"]).unwrap() - expected[0]).abs() < 1e-13);
        assert!((dist.prob(&["2"]).unwrap() - expected[1]).abs() < 1e-13);
        assert!(dist.prob(&["perp"]).unwrap() < 1e-13);
    }

    #[test]
    fn unbiased_channel_reaches_tsirelson_for_one_message() {
        let chsh = conditional_chsh_pipeline(FRAC_PI_4, 0.0).unwrap();
        assert!((chsh[0] - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(chsh[1].abs() < 1e-12);
    }

    #[test]
    fn double_prepare_is_rejected() {
        let layout = SpaceLayout::qubit("q");
        let state = StateVector::basis(layout, 0).unwrap();
        let steps = vec![
            PipelineStep::Prepare(state.clone()),
            PipelineStep::Prepare(state),
        ];
        assert!(matches!(
            run_pipeline(&steps),
            Err(Error::LayoutMismatch(_))
        ));
    }
}
