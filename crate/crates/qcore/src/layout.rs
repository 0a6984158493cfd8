use crate::error::{Error, Result};

/// Ordered list of labeled tensor factors.
///
/// The leftmost factor is the most significant digit of a basis index, so a
/// basis ket `|i, j, k⟩` on dimensions `(dᵢ, dⱼ, dₖ)` has the flat index
/// `(i · dⱼ + j) · dₖ + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<(String, usize)>,
    total_dim: usize,
}

impl SpaceLayout {
    /// Builds a layout from `(label, dimension)` pairs. Labels must be
    /// unique and dimensions at least 1.
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> = factors
            .into_iter()
            .map(|(label, dim)| (label.into(), dim))
            .collect();
        let mut total_dim = 1usize;
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::ZeroDimension(label.clone()));
            }
            if factors[..i].iter().any(|(other, _)| other == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            total_dim *= dim;
        }
        Ok(Self { factors, total_dim })
    }

    /// Single qubit factor.
    pub fn qubit(label: &str) -> Self {
        Self::new([(label, 2)]).expect("single factor is always valid")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|(l, _)| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.factors
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    /// Decomposes a flat basis index into one digit per factor.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        debug_assert!(index < self.total_dim);
        let mut digits = vec![0; self.factors.len()];
        let mut rem = index;
        for (slot, (_, dim)) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = rem % dim;
            rem /= dim;
        }
        digits
    }

    /// Flat basis index of a per-factor digit tuple.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        let mut index = 0;
        for (digit, (_, dim)) in digits.iter().zip(&self.factors) {
            debug_assert!(digit < dim);
            index = index * dim + digit;
        }
        index
    }

    /// Concatenation of several layouts into one, preserving order.
    pub fn concat(parts: &[&SpaceLayout]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty);
        }
        let factors = parts
            .iter()
            .flat_map(|p| p.factors.iter().cloned())
            .collect::<Vec<_>>();
        Self::new(factors)
    }

    /// Layout with the given factors removed, keeping the order of the rest.
    pub fn without(&self, labels: &[&str]) -> Result<Self> {
        for label in labels {
            if !self.contains(label) {
                return Err(Error::UnknownLabel((*label).to_string()));
            }
        }
        Self::new(
            self.factors
                .iter()
                .filter(|(l, _)| !labels.contains(&l.as_str()))
                .cloned()
                .collect::<Vec<_>>(),
        )
    }
}
