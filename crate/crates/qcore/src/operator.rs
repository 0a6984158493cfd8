use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SpaceLayout;
use crate::state::StateVector;
use crate::TOL_ALGEBRAIC;

/// Square complex matrix acting on a labeled tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: SpaceLayout,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(layout: SpaceLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
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
        Ok(Self { layout, matrix })
    }

    /// Like [`Operator::new`] but additionally requires Hermiticity within
    /// `1e-12`.
    pub fn hermitian(layout: SpaceLayout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let op = Self::new(layout, matrix)?;
        let defect = op.hermiticity_defect();
        if defect > TOL_ALGEBRAIC {
            return Err(Error::NotHermitian(defect));
        }
        Ok(op)
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        Self {
            layout,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Rank-one projector `|ket⟩⟨ket|`.
    pub fn projector(ket: &StateVector) -> Self {
        let matrix = ket.amplitudes() * ket.amplitudes().adjoint();
        Self {
            layout: ket.layout().clone(),
            matrix,
        }
    }

    /// Outer product `|ket⟩⟨bra|` of two states on the same space.
    pub fn ketbra(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        if ket.layout() != bra.layout() {
            return Err(Error::LayoutMismatch(
                "outer product between different spaces".into(),
            ));
        }
        Ok(Self {
            layout: ket.layout().clone(),
            matrix: ket.amplitudes() * bra.amplitudes().adjoint(),
        })
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

    pub fn adjoint(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Matrix product `self · rhs` on the same space.
    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.layout != rhs.layout {
            return Err(Error::LayoutMismatch(
                "product of operators on different spaces".into(),
            ));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    /// Embeds the operator into `target`, acting as the identity on every
    /// factor not covered by its own layout. The operator's factors must
    /// appear in `target` with the same dimensions and in the same relative
    /// order.
    pub fn embed(&self, target: &SpaceLayout) -> Result<Self> {
        let mut positions = Vec::with_capacity(self.layout.num_factors());
        for (label, dim) in self.layout.factors() {
            let pos = target
                .position(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            let (_, target_dim) = &target.factors()[pos];
            if target_dim != dim {
                return Err(Error::DimensionMismatch(format!(
                    "factor `{label}` has dimension {dim} here but {target_dim} in the target"
                )));
            }
            if positions.last().is_some_and(|&last| pos <= last) {
                return Err(Error::LayoutMismatch(format!(
                    "factor `{label}` is ordered differently in the target"
                )));
            }
            positions.push(pos);
        }
        let d = target.total_dim();
        let digit_table: Vec<Vec<usize>> = (0..d).map(|i| target.digits(i)).collect();
        let embedded_in_positions = |f: usize| -> bool { positions.contains(&f) };
        let mut matrix = DMatrix::zeros(d, d);
        for row in 0..d {
            let rd = &digit_table[row];
            'cols: for col in 0..d {
                let cd = &digit_table[col];
                for f in 0..target.num_factors() {
                    if !embedded_in_positions(f) && rd[f] != cd[f] {
                        continue 'cols;
                    }
                }
                let sub_row: Vec<usize> = positions.iter().map(|&p| rd[p]).collect();
                let sub_col: Vec<usize> = positions.iter().map(|&p| cd[p]).collect();
                matrix[(row, col)] = self.matrix[(
                    self.layout.index_of(&sub_row),
                    self.layout.index_of(&sub_col),
                )];
            }
        }
        Ok(Self {
            layout: target.clone(),
            matrix,
        })
    }
}

/// Kronecker product of operators, leftmost factor most significant.
pub fn tensor_operators(parts: &[&Operator]) -> Result<Operator> {
    if parts.is_empty() {
        return Err(Error::Empty);
    }
    let layout = SpaceLayout::concat(&parts.iter().map(|p| p.layout()).collect::<Vec<_>>())?;
    let mut matrix = parts[0].matrix.clone();
    for part in &parts[1..] {
        matrix = matrix.kronecker(&part.matrix);
    }
    Operator::new(layout, matrix)
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "operator sum on different spaces");
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(
            self.layout, rhs.layout,
            "operator difference on different spaces"
        );
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;

    fn mul(self, scale: Complex64) -> Operator {
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix * scale,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;

    fn mul(self, scale: f64) -> Operator {
        self * Complex64::new(scale, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::tensor_states;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let a = Operator::identity(SpaceLayout::qubit("a"));
        let b = Operator::identity(SpaceLayout::qubit("b"));
        let product = tensor_operators(&[&a, &b]).unwrap();
        assert_eq!(product.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn embed_middle_factor() {
        // X on the middle qubit of a three-qubit space
        let layout = SpaceLayout::new([("a", 2), ("b", 2), ("c", 2)]).unwrap();
        let x = Operator::new(
            SpaceLayout::qubit("b"),
            DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        )
        .unwrap();
        let embedded = x.embed(&layout).unwrap();
        // reference: 1 ⊗ X ⊗ 1 by explicit kron
        let id = Operator::identity(SpaceLayout::qubit("a"));
        let id_c = Operator::identity(SpaceLayout::qubit("c"));
        let reference = tensor_operators(&[&id, &x, &id_c]).unwrap();
        assert_eq!(embedded.matrix(), reference.matrix());
    }

    #[test]
    fn empty_part_list_is_rejected() {
        assert!(matches!(tensor_operators(&[]), Err(Error::Empty)));
    }

    #[test]
    fn embed_rejects_reordered_factors() {
        let layout = SpaceLayout::new([("a", 2), ("b", 2)]).unwrap();
        let op_layout = SpaceLayout::new([("b", 2), ("a", 2)]).unwrap();
        let op = Operator::identity(op_layout);
        assert!(matches!(op.embed(&layout), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn projector_of_entangled_state_is_hermitian_idempotent() {
        let a = StateVector::new(
            SpaceLayout::qubit("a"),
            vec![
                c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                c(0.0, std::f64::consts::FRAC_1_SQRT_2),
            ],
        )
        .unwrap();
        let b = StateVector::basis(SpaceLayout::qubit("b"), 1).unwrap();
        let state = tensor_states(&[&a, &b]).unwrap();
        let p = Operator::projector(&state);
        assert!(p.is_hermitian(1e-15));
        let squared = p.compose(&p).unwrap();
        let defect = (squared.matrix() - p.matrix())
            .iter()
            .map(|x| x.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-14);
    }
}
