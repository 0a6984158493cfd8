use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SpaceLayout;
use crate::TOL_ALGEBRAIC;

/// Normalized pure state on a labeled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SpaceLayout,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Builds a state from amplitudes; rejects non-finite entries and any
    /// vector whose Euclidean norm differs from 1 by more than `1e-12`.
    pub fn new(layout: SpaceLayout, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        if amplitudes
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOL_ALGEBRAIC {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Basis ket `|index⟩`.
    pub fn basis(layout: SpaceLayout, index: usize) -> Result<Self> {
        if index >= layout.total_dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: layout.total_dim(),
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; layout.total_dim()];
        amplitudes[index] = Complex64::ONE;
        Self::new(layout, amplitudes)
    }

    /// Basis ket addressed by one digit per factor.
    pub fn basis_digits(layout: SpaceLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.num_factors() {
            return Err(Error::DimensionMismatch(format!(
                "{} digits for {} factors",
                digits.len(),
                layout.num_factors()
            )));
        }
        for (digit, (label, dim)) in digits.iter().zip(layout.factors()) {
            if digit >= dim {
                return Err(Error::IndexOutOfRange {
                    index: *digit,
                    dim: layout.dim_of(label).unwrap(),
                });
            }
        }
        let index = layout.index_of(digits);
        Self::basis(layout, index)
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(
                "inner product between different spaces".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// Kronecker product of states; the result layout is the concatenation of
/// the part layouts, leftmost factor most significant.
pub fn tensor_states(parts: &[&StateVector]) -> Result<StateVector> {
    if parts.is_empty() {
        return Err(Error::Empty);
    }
    let layout = SpaceLayout::concat(&parts.iter().map(|p| p.layout()).collect::<Vec<_>>())?;
    let mut amplitudes = parts[0].amplitudes.clone();
    for part in &parts[1..] {
        amplitudes = amplitudes.kronecker(&part.amplitudes);
    }
    StateVector::new(layout, amplitudes.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ket(label: &str, amplitudes: [Complex64; 2]) -> StateVector {
        StateVector::new(SpaceLayout::qubit(label), amplitudes.to_vec()).unwrap()
    }

    #[test]
    fn basis_product_is_basis() {
        let zero_a = StateVector::basis(SpaceLayout::qubit("a"), 0).unwrap();
        let zero_b = StateVector::basis(SpaceLayout::qubit("b"), 0).unwrap();
        let product = tensor_states(&[&zero_a, &zero_b]).unwrap();
        assert_eq!(product.dim(), 4);
        assert_abs_diff_eq!(product.amplitude(0).re, 1.0);
        for i in 1..4 {
            assert_abs_diff_eq!(product.amplitude(i).norm(), 0.0);
        }
    }

    #[test]
    fn tensor_distributes_over_basis() {
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::new(0.0, 0.8);
        let left = ket("a", [alpha, beta]);
        let right = StateVector::basis(SpaceLayout::qubit("b"), 0).unwrap();
        let product = tensor_states(&[&left, &right]).unwrap();
        assert_eq!(product.amplitude(0), alpha);
        assert_eq!(product.amplitude(1), Complex64::ZERO);
        assert_eq!(product.amplitude(2), beta);
        assert_eq!(product.amplitude(3), Complex64::ZERO);
    }

    #[test]
    fn rejects_unnormalized_and_empty() {
        let bad = StateVector::new(
            SpaceLayout::qubit("a"),
            vec![Complex64::ONE, Complex64::ONE],
        );
        assert!(matches!(bad, Err(Error::NotNormalized(_))));
        assert!(matches!(tensor_states(&[]), Err(Error::Empty)));
    }

    #[test]
    fn tensor_rejects_repeated_labels() {
        let a = StateVector::basis(SpaceLayout::qubit("a"), 0).unwrap();
        assert!(matches!(
            tensor_states(&[&a, &a]),
            Err(Error::DuplicateLabel(_))
        ));
    }
}
