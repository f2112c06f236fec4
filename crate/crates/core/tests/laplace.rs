//! Laplace transform of the Prabhakar kernel against its closed form:
//! ∫₀^∞ e^{−σt} t^{β−1} E^γ_{ρ,β}(−t^ρ) dt = σ^{−β} / (1 + σ^{−ρ})^γ, σ = s + 1.

use mlgamma_core::quad::{integrate, QuadOptions};
use mlgamma_core::specfun::{eval_ml, MLParams};
use proptest::prelude::*;

/// Truncated transform on [0, T] with `t = u²`, which removes the `t^{β−1}`
/// endpoint singularity. Returns the value and the quadrature error estimate.
fn truncated_transform(p: &MLParams, sigma: f64, t_max: f64) -> (f64, f64) {
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let t = u * u;
        let e = eval_ml(p, -t.powf(p.rho)).expect("kernel evaluates");
        let w = 2.0 * u * (-sigma * t).exp() * t.powf(p.mu - 1.0);
        w * e.value
    };
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_panels: 4000,
        initial_panels: 32,
    };
    let r = integrate(f, 0.0, t_max.sqrt(), opts);
    (r.value, r.abs_err)
}

fn closed_form(p: &MLParams, sigma: f64) -> f64 {
    sigma.powf(-p.mu) / (1.0 + sigma.powf(-p.rho)).powf(p.gamma)
}

/// Bound on the discarded tail: |E^γ_{ρ,β}(−x)| ≤ 1 on the test set, so the
/// tail is below ∫_T^∞ e^{−σt} t^{β−1} dt ≤ e^{−σT} T^{β−1} / (σ − (β−1)/T).
fn tail_bound(p: &MLParams, sigma: f64, t: f64) -> f64 {
    (-sigma * t).exp() * t.powf(p.mu - 1.0) / (sigma - (p.mu - 1.0).max(0.0) / t)
}

const SET: [(f64, f64, f64); 6] = [
    (0.5, 1.0, 1.0),
    (0.8, 1.2, 2.0),
    (1.0, 0.5, 1.0),
    (1.5, 2.0, 1.0),
    (1.9, 2.5, 0.5),
    (2.0, 3.0, 1.0),
];

#[test]
fn transform_matches_closed_form() {
    let t_max = 60.0;
    for (rho, beta, gamma) in SET {
        let p = MLParams::new(rho, beta, gamma).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let sigma = s + 1.0;
            let (v, err) = truncated_transform(&p, sigma, t_max);
            let want = closed_form(&p, sigma);
            let allowed = 1e-6 + tail_bound(&p, sigma, t_max) + err;
            assert!(
                (v - want).abs() <= allowed,
                "(rho, beta, gamma) = ({rho}, {beta}, {gamma}), s = {s}: {v} vs {want}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_holds_inside_the_nonnegative_region(
        rho in 0.2f64..1.0,
        extra in 0.0f64..2.0,
        gamma in 0.3f64..2.0,
        s in 0.5f64..2.0,
    ) {
        // μ ≥ ργ with ρ ≤ 1 keeps the kernel in [0, 1/Γ(μ)]
        let beta = (rho * gamma + extra).max(0.3);
        let p = MLParams::new(rho, beta, gamma).unwrap();
        let sigma = s + 1.0;
        let (v, err) = truncated_transform(&p, sigma, 60.0);
        let want = closed_form(&p, sigma);
        prop_assert!((v - want).abs() <= 1e-6 + tail_bound(&p, sigma, 60.0) + err, "{v} vs {want}");
    }
}
