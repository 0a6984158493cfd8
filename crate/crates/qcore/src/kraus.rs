use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::layout::SpaceLayout;
use crate::operator::Operator;
use crate::TOL_SPECTRAL;

/// Completely positive trace-preserving map given by Kraus operators
/// `{Kᵢ}` with `Σᵢ Kᵢ†Kᵢ = 𝟙` within `1e-10`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    layout: SpaceLayout,
    operators: Vec<Operator>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Operator>) -> Result<Self> {
        let first = operators.first().ok_or(Error::Empty)?;
        let layout = first.layout().clone();
        if operators.iter().any(|op| op.layout() != &layout) {
            return Err(Error::LayoutMismatch(
                "Kraus operators on different spaces".into(),
            ));
        }
        let d = layout.total_dim();
        let mut sum = DMatrix::zeros(d, d);
        for op in &operators {
            sum += op.matrix().adjoint() * op.matrix();
        }
        let defect = (sum - DMatrix::identity(d, d))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if defect > TOL_SPECTRAL {
            return Err(Error::IncompleteKraus(defect));
        }
        Ok(Self { layout, operators })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }
}

/// Applies `ch` to the factor named `on`, acting as the identity elsewhere:
/// `ρ ↦ Σᵢ (𝟙 ⊗ Kᵢ) ρ (𝟙 ⊗ Kᵢ)†`.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel, on: &str) -> Result<DensityMatrix> {
    let dim = rho
        .layout()
        .dim_of(on)
        .ok_or_else(|| Error::UnknownLabel(on.to_string()))?;
    if ch.layout().total_dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "channel of dimension {} applied to factor `{on}` of dimension {dim}",
            ch.layout().total_dim()
        )));
    }
    let target_factor = SpaceLayout::new([(on, dim)])?;
    let d = rho.dim();
    let mut out = DMatrix::zeros(d, d);
    for kraus in ch.operators() {
        let embedded =
            Operator::new(target_factor.clone(), kraus.matrix().clone())?.embed(rho.layout())?;
        out += embedded.matrix() * rho.matrix() * embedded.matrix().adjoint();
    }
    DensityMatrix::from_matrix(rho.layout().clone(), out)
}
