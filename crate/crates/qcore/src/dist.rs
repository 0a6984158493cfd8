use crate::error::{Error, Result};
use crate::{TOL_ALGEBRAIC, TOL_SPECTRAL};

/// One named outcome axis of a joint probability table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axis {
    name: String,
    labels: Vec<String>,
}

impl Axis {
    pub fn new<S: Into<String>, L: Into<String>>(
        name: S,
        labels: impl IntoIterator<Item = L>,
    ) -> Result<Self> {
        let name = name.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Empty);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { name, labels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Joint probability table over one or more labeled outcome axes, stored
/// row-major with the leftmost axis most significant.
///
/// Entries are clamped to `[0, 1]` after a tolerance check; a normalized
/// table must sum to 1 within `1e-10`. Conditioning on a zero-probability
/// outcome yields an all-zero table, following the convention
/// `p(x|y) = 0` when `p(y) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self> {
        let dist = Self::unnormalized(axes, probs)?;
        let total = dist.sum();
        if (total - 1.0).abs() > TOL_SPECTRAL {
            return Err(Error::NotADistribution(total));
        }
        Ok(dist)
    }

    /// Builds a table without the unit-sum check. Used for conditional
    /// tables, which are all zeros when the conditioning outcome has
    /// probability zero.
    pub(crate) fn unnormalized(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Empty);
        }
        for (i, axis) in axes.iter().enumerate() {
            if axes[..i].iter().any(|a| a.name == axis.name) {
                return Err(Error::DuplicateLabel(axis.name.clone()));
            }
        }
        let expected: usize = axes.iter().map(Axis::len).product();
        if probs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for a table of size {expected}",
                probs.len()
            )));
        }
        let mut clamped = Vec::with_capacity(probs.len());
        for p in probs {
            if !p.is_finite() || !(-TOL_ALGEBRAIC..=1.0 + TOL_ALGEBRAIC).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            clamped.push(p.clamp(0.0, 1.0));
        }
        Ok(Self {
            axes,
            probs: clamped,
        })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, name: &str) -> Result<&Axis> {
        self.axes
            .iter()
            .find(|a| a.name == name)
            .ok_or_else(|| Error::UnknownOutcome(name.to_string()))
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability of a full outcome assignment, one label per axis in
    /// axis order.
    pub fn prob(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.axes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} axes",
                labels.len(),
                self.axes.len()
            )));
        }
        let mut index = 0;
        for (label, axis) in labels.iter().zip(&self.axes) {
            let i = axis
                .index_of(label)
                .ok_or_else(|| Error::UnknownOutcome((*label).to_string()))?;
            index = index * axis.len() + i;
        }
        Ok(self.probs[index])
    }

    /// Iterates over `(labels, probability)` pairs in table order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<&str>, f64)> + '_ {
        (0..self.probs.len()).map(move |flat| {
            let mut labels = Vec::with_capacity(self.axes.len());
            let mut rem = flat;
            let mut sizes = self.axes.iter().map(Axis::len).collect::<Vec<_>>();
            sizes.reverse();
            let mut rev_digits = Vec::with_capacity(self.axes.len());
            for size in sizes {
                rev_digits.push(rem % size);
                rem /= size;
            }
            for (axis, digit) in self.axes.iter().zip(rev_digits.iter().rev()) {
                labels.push(axis.labels[*digit].as_str());
            }
            (labels, self.probs[flat])
        })
    }

    /// Marginal table over the named axes, in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<OutcomeDistribution> {
        let kept_axes: Vec<Axis> = keep
            .iter()
            .map(|name| self.axis(name).cloned())
            .collect::<Result<_>>()?;
        let size: usize = kept_axes.iter().map(Axis::len).product();
        let mut probs = vec![0.0; size];
        for (labels, p) in self.iter() {
            let mut index = 0;
            for (axis, name) in kept_axes.iter().zip(keep) {
                let pos = self
                    .axes
                    .iter()
                    .position(|a| a.name == **name)
                    .expect("axis exists");
                let i = axis.index_of(labels[pos]).expect("label exists");
                index = index * axis.len() + i;
            }
            probs[index] += p;
        }
        // marginalizing cannot push entries out of [0, 1] beyond roundoff
        OutcomeDistribution::unnormalized(kept_axes, probs)
    }

    /// Conditional table over the remaining axes given `axis = label`.
    /// All-zero when the conditioning outcome has probability zero.
    pub fn condition_on(&self, axis: &str, label: &str) -> Result<OutcomeDistribution> {
        let cond_pos = self
            .axes
            .iter()
            .position(|a| a.name == axis)
            .ok_or_else(|| Error::UnknownOutcome(axis.to_string()))?;
        if self.axes.len() < 2 {
            return Err(Error::DimensionMismatch(
                "conditioning needs at least two axes".into(),
            ));
        }
        if self.axes[cond_pos].index_of(label).is_none() {
            return Err(Error::UnknownOutcome(label.to_string()));
        }
        let rest_axes: Vec<Axis> = self
            .axes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != cond_pos)
            .map(|(_, a)| a.clone())
            .collect();
        let size: usize = rest_axes.iter().map(Axis::len).product();
        let mut joint = vec![0.0; size];
        let mut cond_prob = 0.0;
        for (labels, p) in self.iter() {
            if labels[cond_pos] != label {
                continue;
            }
            cond_prob += p;
            let mut index = 0;
            for (axis, (i, _)) in rest_axes
                .iter()
                .zip(self.axes.iter().enumerate().filter(|(i, _)| *i != cond_pos))
            {
                let li = axis.index_of(labels[i]).expect("label exists");
                index = index * axis.len() + li;
            }
            joint[index] += p;
        }
        let probs = if cond_prob == 0.0 {
            vec![0.0; size]
        } else {
            joint.iter().map(|p| p / cond_prob).collect()
        };
        OutcomeDistribution::unnormalized(rest_axes, probs)
    }
}
