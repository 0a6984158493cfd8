use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SpaceLayout;
use crate::state::StateVector;
use crate::{TOL_ALGEBRAIC, TOL_SPECTRAL};

/// Mixed quantum state on a labeled tensor-product space.
///
/// Every constructor validates the full set of density-matrix invariants:
/// Hermiticity within `1e-12`, unit trace within `1e-12`, and positive
/// semidefiniteness with eigenvalues above `-1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SpaceLayout,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(layout: SpaceLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a space of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                d
            )));
        }
        if matrix
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let hermiticity = (&matrix - matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if hermiticity > TOL_ALGEBRAIC {
            return Err(Error::NotHermitian(hermiticity));
        }
        let trace = matrix.trace();
        let trace_defect = (trace - Complex64::ONE).norm();
        if trace_defect > TOL_ALGEBRAIC {
            return Err(Error::TraceNotOne(trace_defect));
        }
        let min_eig = crate::eig::hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -TOL_SPECTRAL {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { layout, matrix })
    }

    /// Pure-state density matrix `|ψ⟩⟨ψ|`.
    ///
    /// The outer product of a normalized vector is Hermitian, positive
    /// semidefinite, and has unit trace by construction, so no spectral
    /// check is run here.
    pub fn from_pure(state: &StateVector) -> Self {
        let matrix = state.amplitudes() * state.amplitudes().adjoint();
        Self {
            layout: state.layout().clone(),
            matrix,
        }
    }

    /// Convex mixture `Σᵢ pᵢ |ψᵢ⟩⟨ψᵢ|` of pure states on a common space.
    pub fn from_mixture(parts: &[(f64, &StateVector)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::Empty)?;
        let layout = first.layout().clone();
        let d = layout.total_dim();
        let mut matrix = DMatrix::zeros(d, d);
        for (weight, state) in parts {
            if *weight < 0.0 || !weight.is_finite() {
                return Err(Error::InvalidProbability(*weight));
            }
            if state.layout() != &layout {
                return Err(Error::LayoutMismatch(
                    "mixture of states on different spaces".into(),
                ));
            }
            matrix +=
                (state.amplitudes() * state.amplitudes().adjoint()) * Complex64::new(*weight, 0.0);
        }
        Self::from_matrix(layout, matrix)
    }

    /// Maximally mixed state `𝟙/d`.
    pub fn maximally_mixed(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        let matrix = DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0);
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::eig::hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Traces out the factors named in `discard`, keeping the remaining
    /// factors in their original order.
    pub fn partial_trace(&self, discard: &[&str]) -> Result<DensityMatrix> {
        let kept_layout = self.layout.without(discard)?;
        let kept_positions: Vec<usize> = self
            .layout
            .factors()
            .iter()
            .enumerate()
            .filter(|(_, (l, _))| !discard.contains(&l.as_str()))
            .map(|(i, _)| i)
            .collect();
        let disc_positions: Vec<usize> = self
            .layout
            .factors()
            .iter()
            .enumerate()
            .filter(|(_, (l, _))| discard.contains(&l.as_str()))
            .map(|(i, _)| i)
            .collect();
        let disc_dim: usize = disc_positions
            .iter()
            .map(|&p| self.layout.factors()[p].1)
            .product();
        let disc_layout_dims: Vec<usize> = disc_positions
            .iter()
            .map(|&p| self.layout.factors()[p].1)
            .collect();

        let kd = kept_layout.total_dim();
        let mut out = DMatrix::zeros(kd, kd);
        let mut full_row = vec![0usize; self.layout.num_factors()];
        let mut full_col = vec![0usize; self.layout.num_factors()];
        for row in 0..kd {
            let rd = kept_layout.digits(row);
            for col in 0..kd {
                let cd = kept_layout.digits(col);
                let mut sum = Complex64::ZERO;
                for k in 0..disc_dim {
                    // decompose k over the discarded factors
                    let mut rem = k;
                    let mut disc_digits = vec![0usize; disc_positions.len()];
                    for (slot, dim) in disc_digits.iter_mut().zip(&disc_layout_dims).rev() {
                        *slot = rem % dim;
                        rem /= dim;
                    }
                    for (i, &p) in kept_positions.iter().enumerate() {
                        full_row[p] = rd[i];
                        full_col[p] = cd[i];
                    }
                    for (i, &p) in disc_positions.iter().enumerate() {
                        full_row[p] = disc_digits[i];
                        full_col[p] = disc_digits[i];
                    }
                    sum += self.matrix[(
                        self.layout.index_of(&full_row),
                        self.layout.index_of(&full_col),
                    )];
                }
                out[(row, col)] = sum;
            }
        }
        DensityMatrix::from_matrix(kept_layout, out)
    }

    /// Kronecker product of density matrices.
    pub fn tensor(parts: &[&DensityMatrix]) -> Result<DensityMatrix> {
        if parts.is_empty() {
            return Err(Error::Empty);
        }
        let layout = SpaceLayout::concat(&parts.iter().map(|p| p.layout()).collect::<Vec<_>>())?;
        let mut matrix = parts[0].matrix.clone();
        for part in &parts[1..] {
            matrix = matrix.kronecker(&part.matrix);
        }
        DensityMatrix::from_matrix(layout, matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::tensor_states;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_out_product_state() {
        let zero_a = StateVector::basis(SpaceLayout::qubit("a"), 0).unwrap();
        let zero_b = StateVector::basis(SpaceLayout::qubit("b"), 0).unwrap();
        let rho = DensityMatrix::from_pure(&tensor_states(&[&zero_a, &zero_b]).unwrap());
        let reduced = rho.partial_trace(&["b"]).unwrap();
        assert_eq!(reduced.layout(), zero_a.layout());
        assert_abs_diff_eq!(reduced.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(reduced.matrix()[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_out_half_of_maximally_entangled_pair() {
        let layout = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        let bell = StateVector::new(
            layout,
            vec![
                c(FRAC_1_SQRT_2, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let reduced = DensityMatrix::from_pure(&bell)
            .partial_trace(&["b"])
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(reduced.matrix()[(i, j)].re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(reduced.matrix()[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_unknown_label_errors() {
        let rho = DensityMatrix::maximally_mixed(SpaceLayout::qubit("a"));
        assert!(matches!(
            rho.partial_trace(&["x"]),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn partial_trace_inverts_tensor() {
        let a = DensityMatrix::from_pure(
            &StateVector::new(SpaceLayout::qubit("a"), vec![c(0.8, 0.0), c(0.0, 0.6)]).unwrap(),
        );
        let b = DensityMatrix::maximally_mixed(SpaceLayout::qubit("b"));
        let joint = DensityMatrix::tensor(&[&a, &b]).unwrap();
        let back = joint.partial_trace(&["b"]).unwrap();
        let defect = (back.matrix() - a.matrix())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-12);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let layout = SpaceLayout::qubit("a");
        let non_hermitian =
            DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(
            DensityMatrix::from_matrix(layout.clone(), non_hermitian),
            Err(Error::NotHermitian(_))
        ));
        let wrong_trace =
            DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert!(matches!(
            DensityMatrix::from_matrix(layout.clone(), wrong_trace),
            Err(Error::TraceNotOne(_))
        ));
        let negative =
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)]);
        assert!(matches!(
            DensityMatrix::from_matrix(layout, negative),
            Err(Error::NotPositiveSemidefinite(_))
        ));
    }
}
