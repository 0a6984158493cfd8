//! Explicit collapse-dynamics enumeration: the friend's measurement
//! branches the state with Born weights, and each branch is measured again
//! by the superobserver. This is the second independent ground-truth route,
//! next to the density-matrix pipeline.

use num_complex::Complex64;

use wfsim_qcore::{born_probabilities, DensityMatrix, Operator, SpaceLayout, StateVector};

use crate::config::TrialConfig;

/// One branch of the collapse tree. `probability` is the joint probability
/// of reaching this node from the root.
#[derive(Debug, Clone)]
pub struct BranchNode {
    pub outcome: String,
    pub probability: f64,
    pub state: StateVector,
    pub children: Vec<BranchNode>,
}

/// Collapse tree of the simple experiment: friend outcomes at depth 1,
/// superobserver outcomes at depth 2. Zero-probability branches are pruned.
#[derive(Debug, Clone)]
pub struct BranchTree {
    pub root: BranchNode,
}

impl BranchTree {
    /// Total probability per depth, root first. Each entry must be 1.
    pub fn level_sums(&self) -> Vec<f64> {
        let mut sums = Vec::new();
        let mut level = vec![&self.root];
        while !level.is_empty() {
            sums.push(level.iter().map(|n| n.probability).sum());
            level = level.iter().flat_map(|n| n.children.iter()).collect();
        }
        sums
    }

    /// Joint leaf probabilities `p(f, w)`.
    pub fn leaf_joint(&self) -> Vec<((String, String), f64)> {
        let mut joint = Vec::new();
        for friend in &self.root.children {
            for wigner in &friend.children {
                joint.push((
                    (friend.outcome.clone(), wigner.outcome.clone()),
                    wigner.probability,
                ));
            }
        }
        joint
    }

    /// Marginal over the superobserver outcome, ordered `(1, 2, perp)`.
    pub fn wigner_marginal(&self) -> [f64; 3] {
        let mut marginal = [0.0; 3];
        for ((_, w), p) in self.leaf_joint() {
            marginal[wigner_slot(&w)] += p;
        }
        marginal
    }

    /// Conditional table `p(w | f)`, ordered `(1, 2, perp)`; all zeros if
    /// the friend outcome has probability zero.
    pub fn conditional_given_friend(&self, f: usize) -> [f64; 3] {
        let mut table = [0.0; 3];
        let label = f.to_string();
        for friend in &self.root.children {
            if friend.outcome != label {
                continue;
            }
            for wigner in &friend.children {
                table[wigner_slot(&wigner.outcome)] += wigner.probability / friend.probability;
            }
        }
        table
    }
}

fn wigner_slot(label: &str) -> usize {
    match label {
        "1" => 0,
        "2" => 1,
        "perp" => 2,
        other => panic!("unexpected Wigner outcome `{other}`"),
    }
}

/// Runs the collapse description: the friend observes `f` with probability
/// `|α|²` or `|β|²` and assigns the product state `|f, f⟩`; the
/// superobserver then measures each branch.
pub fn collapse_enumeration(cfg: &TrialConfig) -> BranchTree {
    let s_layout = SpaceLayout::qubit("S");
    let sf_layout = SpaceLayout::new([("S", 2), ("F", 2)]).unwrap();
    let source = StateVector::new(s_layout, vec![cfg.alpha, cfg.beta])
        .expect("sampled amplitude pairs are normalized");

    let mut w1 = vec![Complex64::ZERO; 4];
    w1[0] = cfg.a;
    w1[3] = cfg.b;
    let mut w2 = vec![Complex64::ZERO; 4];
    w2[0] = cfg.b.conj();
    w2[3] = -cfg.a.conj();
    let w1 = StateVector::new(sf_layout.clone(), w1).unwrap();
    let w2 = StateVector::new(sf_layout.clone(), w2).unwrap();
    let p1 = Operator::projector(&w1);
    let p2 = Operator::projector(&w2);
    let perp = &(&Operator::identity(sf_layout.clone()) - &p1) - &p2;

    let mut friend_children = Vec::new();
    for (f, weight) in [(0usize, cfg.alpha.norm_sqr()), (1, cfg.beta.norm_sqr())] {
        if weight == 0.0 {
            continue;
        }
        let branch = StateVector::basis_digits(sf_layout.clone(), &[f, f]).unwrap();
        let rho = DensityMatrix::from_pure(&branch);
        let probs = born_probabilities(&rho, &[p1.clone(), p2.clone(), perp.clone()])
            .expect("Wigner projectors form a complete set");

        let mut wigner_children = Vec::new();
        for (slot, (label, post)) in [("1", Some(&w1)), ("2", Some(&w2)), ("perp", None)]
            .iter()
            .enumerate()
        {
            let p = probs[slot];
            if p == 0.0 {
                continue;
            }
            let state = match post {
                Some(ket) => (*ket).clone(),
                // the complement never fires on branch states; if it did,
                // renormalizing the projection would go here
                None => branch.clone(),
            };
            wigner_children.push(BranchNode {
                outcome: (*label).to_string(),
                probability: weight * p,
                state,
                children: Vec::new(),
            });
        }
        friend_children.push(BranchNode {
            outcome: f.to_string(),
            probability: weight,
            state: branch,
            children: wigner_children,
        });
    }

    BranchTree {
        root: BranchNode {
            outcome: String::new(),
            probability: 1.0,
            state: source,
            children: friend_children,
        },
    }
}
