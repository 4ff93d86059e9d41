//! Standard-normal density, distribution and the ψ building block.
//!
//! ψ(a, b, μ, σ) is the upper-tail partial improvement
//! ∫_b^∞ (z − a) φ_{μ,σ}(z) dz = σ·φ(s) + (μ − a)·(1 − Φ(s)) with
//! s = (b − μ)/σ. Its differences give expected 1-D improvements over
//! intervals, which is the only way the exact EHVI schemes touch the Gaussian:
//!
//!   ∫_l^u (z − a) φ_{μ,σ}(z) dz = psi(a, l, μ, σ) − psi(a, u, μ, σ)
//!
//! The identity is the normative contract; `psi` evaluates finitely for
//! b = ±∞ so that sentinel cells need no special casing.

use std::f64::consts::PI;

/// Standard normal density φ(s) = exp(−s²/2)/√(2π); φ(±∞) = 0.
pub fn std_normal_pdf(s: f64) -> f64 {
    if s.is_infinite() {
        return 0.0;
    }
    (-0.5 * s * s).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF Φ(s) = (1 + erf(s/√2))/2, computed through erfc for
/// full accuracy in both tails; Φ(−∞) = 0, Φ(+∞) = 1.
pub fn std_normal_cdf(s: f64) -> f64 {
    if s == f64::INFINITY {
        return 1.0;
    }
    if s == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * libm::erfc(-s / std::f64::consts::SQRT_2)
}

/// Survival function 1 − Φ(s) without cancellation in the upper tail.
pub(crate) fn std_normal_sf(s: f64) -> f64 {
    if s == f64::INFINITY {
        return 0.0;
    }
    if s == f64::NEG_INFINITY {
        return 1.0;
    }
    0.5 * libm::erfc(s / std::f64::consts::SQRT_2)
}

/// ψ(a, b, μ, σ) = ∫_b^∞ (z − a) φ_{μ,σ}(z) dz. `b` may be ±∞.
///
/// Panics if σ ≤ 0.
pub fn psi(a: f64, b: f64, mu: f64, sigma: f64) -> f64 {
    assert!(sigma > 0.0, "psi requires sigma > 0, got {sigma}");
    let s = (b - mu) / sigma;
    sigma * std_normal_pdf(s) + (mu - a) * std_normal_sf(s)
}

/// Expected 1-D improvement over the best value `fbest` restricted to the
/// interval [l, u]: ∫_l^u (z − fbest) φ_{μ,σ}(z) dz. Requires l ≤ u,
/// l ≥ fbest and σ > 0; returns 0 when l = u.
pub fn partial_ei_1d(fbest: f64, l: f64, u: f64, mu: f64, sigma: f64) -> f64 {
    assert!(l <= u, "partial_ei_1d requires l <= u, got l={l}, u={u}");
    assert!(l >= fbest, "partial_ei_1d requires l >= fbest");
    psi(fbest, l, mu, sigma) - psi(fbest, u, mu, sigma)
}
