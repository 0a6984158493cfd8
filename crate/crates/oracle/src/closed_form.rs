//! Closed-form probability tables as plain scalar arithmetic.
//!
//! These are the textbook expressions for the friend's collapse assignment,
//! the superobserver's unitary assignment, the record-conditioned tables,
//! the joint distribution over measurement result and channel message, and
//! the message-conditioned CHSH values. Nothing here touches a matrix; the
//! density-matrix pipeline must reproduce every value.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::config::TrialConfig;

/// Collapse-dynamics probabilities `(p(w=1), p(w=2))`:
/// `p(1) = |α|²|a|² + |β|²|b|²`, `p(2) = |α|²|b|² + |β|²|a|²`.
pub fn collapse_table(cfg: &TrialConfig) -> [f64; 2] {
    let (a2, b2) = (cfg.a.norm_sqr(), cfg.b.norm_sqr());
    let (al2, be2) = (cfg.alpha.norm_sqr(), cfg.beta.norm_sqr());
    [al2 * a2 + be2 * b2, al2 * b2 + be2 * a2]
}

/// Unitary-dynamics probabilities `(p(w=1), p(w=2))`:
/// `p(1) = |αa* + βb*|²`, `p(2) = |βa − αb|²`.
pub fn unitary_table(cfg: &TrialConfig) -> [f64; 2] {
    let amp1 = cfg.alpha * cfg.a.conj() + cfg.beta * cfg.b.conj();
    let amp2 = cfg.beta * cfg.a - cfg.alpha * cfg.b;
    [amp1.norm_sqr(), amp2.norm_sqr()]
}

/// Joint table `p(w, j)` over Wigner's result and a which-outcome record,
/// indexed `[j][w−1]`: the record `j` occurs with probability `|α|²` or
/// `|β|²` and conditions the result on the corresponding branch.
pub fn record_joint_table(cfg: &TrialConfig) -> [[f64; 2]; 2] {
    let (a2, b2) = (cfg.a.norm_sqr(), cfg.b.norm_sqr());
    let (al2, be2) = (cfg.alpha.norm_sqr(), cfg.beta.norm_sqr());
    [[al2 * a2, al2 * b2], [be2 * b2, be2 * a2]]
}

/// Overlaps `⟨n|rᵢ⟩` of the message basis with the record basis,
/// indexed `[n][i]`, for the parametrization
/// `|0⟩ = cos θ |r₀⟩ + e^{iφ} sin θ |r₁⟩`,
/// `|1⟩ = e^{−iφ} sin θ |r₀⟩ − cos θ |r₁⟩`.
pub fn message_overlaps(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let phase = Complex64::from_polar(1.0, phi);
    [
        [Complex64::new(cos_t, 0.0), phase.conj() * sin_t],
        [phase * sin_t, Complex64::new(-cos_t, 0.0)],
    ]
}

/// Joint table `p(w, n)` over Wigner's result and the channel message,
/// indexed `[n][w−1]`.
pub fn joint_wn_table(cfg: &TrialConfig) -> [[f64; 2]; 2] {
    let ovl = message_overlaps(cfg.theta, cfg.phi);
    let (a2, b2) = (cfg.a.norm_sqr(), cfg.b.norm_sqr());
    let (al2, be2) = (cfg.alpha.norm_sqr(), cfg.beta.norm_sqr());
    let coherence = cfg.alpha * cfg.beta.conj() * cfg.a.conj() * cfg.b;
    let mut table = [[0.0; 2]; 2];
    for n in 0..2 {
        let (o0, o1) = (ovl[n][0], ovl[n][1]);
        let cross = 2.0 * (coherence * o0 * o1.conj()).re;
        table[n][0] = al2 * a2 * o0.norm_sqr() + be2 * b2 * o1.norm_sqr() + cross;
        table[n][1] = al2 * b2 * o0.norm_sqr() + be2 * a2 * o1.norm_sqr() - cross;
    }
    table
}

/// Message probabilities `p(n) = |α|²|⟨n|r₀⟩|² + |β|²|⟨n|r₁⟩|²`.
pub fn message_probs(cfg: &TrialConfig) -> [f64; 2] {
    let ovl = message_overlaps(cfg.theta, cfg.phi);
    let (al2, be2) = (cfg.alpha.norm_sqr(), cfg.beta.norm_sqr());
    [
        al2 * ovl[0][0].norm_sqr() + be2 * ovl[0][1].norm_sqr(),
        al2 * ovl[1][0].norm_sqr() + be2 * ovl[1][1].norm_sqr(),
    ]
}

/// Message-conditioned CHSH value of the extended setup:
/// `√2 + (−1)ⁿ √2 · cos φ · sin 2θ`.
pub fn conditional_chsh(n: usize, theta: f64, phi: f64) -> f64 {
    debug_assert!(n < 2);
    let sign = if n == 0 { 1.0 } else { -1.0 };
    SQRT_2 + sign * SQRT_2 * phi.cos() * (2.0 * theta).sin()
}
