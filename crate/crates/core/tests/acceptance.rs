//! Acceptance criteria 1-9, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails when a criterion fails, unless the failing check is a
//! known disagreement listed in the decisions ledger; those print FAIL with
//! the reason and do not abort the run.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::Instant;

use mlgamma_core::classify::{self, bounds_lu, classify_existence, classify_two_param, Outcome};
use mlgamma_core::dists::{self, AlphaCauchyParams, GammaTypeParams, QuadratureCdf, SampleBatch};
use mlgamma_core::gamma::{gamma, ln_gamma, rgamma};
use mlgamma_core::idcert::{self, Mode, Status};
use mlgamma_core::mellin::{duplication_rewrite, eval_at, expr_gamma, janson_gate, power};
use mlgamma_core::rational::Rational;
use mlgamma_core::specfun::{eval_ml_two, ml_mellin_integral, sign_scan, MLParams};
use mlgamma_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion.
struct Verdict {
    pass: bool,
    detail: String,
    /// Failing check that is a recorded disagreement rather than a defect.
    known: Option<String>,
}

/// Collects sub-check results of a criterion.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    known: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failed.push(what);
        }
    }

    fn known_failure(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.known.push(what);
        }
    }

    fn finish(self) -> Verdict {
        let pass = self.failed.is_empty() && self.known.is_empty();
        let detail = if self.failed.is_empty() && self.known.is_empty() {
            self.notes.join("; ")
        } else {
            self.failed
                .iter()
                .chain(&self.known)
                .cloned()
                .collect::<Vec<_>>()
                .join("; ")
        };
        let known =
            (self.failed.is_empty() && !self.known.is_empty()).then(|| self.known.join("; "));
        Verdict {
            pass,
            detail,
            known,
        }
    }
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

fn criterion_1() -> Verdict {
    let mut worst = [0.0f64; 4];
    let (t0, t1) = (0.1f64, 50.0f64);
    for i in 0..64 {
        let t = t0 * (t1 / t0).powf(i as f64 / 63.0);
        let e = |rho, mu, z| eval_ml_two(rho, mu, z).map(|r| r.value).unwrap_or(f64::NAN);
        let diffs = [
            e(1.0, 1.0, -t) - (-t).exp(),
            t * e(2.0, 2.0, -t * t) - t.sin(),
            e(2.0, 1.0, -t * t) - t.cos(),
            t * t * e(2.0, 3.0, -t * t) - (1.0 - t.cos()),
        ];
        for (w, d) in worst.iter_mut().zip(diffs) {
            *w = if d.is_nan() {
                f64::INFINITY
            } else {
                w.max(d.abs())
            };
        }
    }
    let max = worst.iter().cloned().fold(0.0, f64::max);
    let mut c = Checks::default();
    c.check(
        max <= 1e-9,
        format!(
            "max error {max:.2e} (exp {:.1e}, sin {:.1e}, cos {:.1e}, 1-cos {:.1e})",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
    c.finish()
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut errors = 0;
    for _ in 0..200 {
        let rho: f64 = 2.0 - 2.0 * rng.random::<f64>();
        let mu: f64 = 5.0 - 4.8 * rng.random::<f64>();
        let z: f64 = -50.0 * rng.random::<f64>();
        let lhs = eval_ml_two(rho, mu, z);
        let shifted = eval_ml_two(rho, mu + rho, z);
        match (lhs, shifted) {
            (Ok(l), Ok(s)) => {
                let rhs = rgamma(mu) + z * s.value;
                worst = worst.max((l.value - rhs).abs() / (1.0 + l.value.abs()));
            }
            _ => errors += 1,
        }
    }
    let mut c = Checks::default();
    c.check(errors == 0, format!("{errors} evaluation errors"));
    c.check(
        worst <= 1e-8,
        format!("max |E - 1/G(mu) - z E_shift| / (1 + |E|) = {worst:.2e} over 200 draws"),
    );
    c.finish()
}

fn criterion_3() -> Verdict {
    let mut c = Checks::default();
    let mut worst = 0.0f64;
    for (a, b, cc, d) in [
        (0.5, 0.5, 2.0, 2.0),
        (0.5, 0.5, 2.0, 1.5),
        (0.25, 0.25, 1.5, 1.5),
    ] {
        let ml = MLParams::new(d, cc + b * d, a + b).unwrap();
        for s in [-0.2, 0.0, 0.2] {
            let closed =
                (ln_gamma(b + s) + ln_gamma(a - s) - ln_gamma(a + b) - ln_gamma(cc - d * s)).exp();
            match ml_mellin_integral(&ml, s + b, 1e4) {
                Ok(q) => {
                    let rel = (q.value - closed).abs() / closed.abs();
                    worst = worst.max(rel);
                    c.check(
                        rel <= 1e-6,
                        format!("({a},{b},{cc},{d}) s={s}: rel {rel:.1e}"),
                    );
                }
                Err(e) => c.check(false, format!("({a},{b},{cc},{d}) s={s}: {e}")),
            }
        }
    }
    c.notes = vec![format!("9 points, max relative difference {worst:.2e}")];
    c.finish()
}

fn criterion_4() -> Verdict {
    let mut c = Checks::default();
    for (rho, mu, want) in [
        (0.8, 0.9, Outcome::Exists),
        (1.2, 1.6, Outcome::Exists),
        (1.8, 2.0, Outcome::NotExists),
        (2.0, 2.9, Outcome::NotExists),
    ] {
        match classify_two_param(rho, mu) {
            Ok(v) => c.check(
                v.outcome == want,
                format!("({rho},{mu}) -> {:?} [{}]", v.outcome, v.rule),
            ),
            Err(e) => c.check(false, format!("({rho},{mu}): {e}")),
        }
    }
    let u = bounds_lu(1.2).unwrap().u_val;
    c.check((u - 1.6).abs() < 1e-12, format!("U(1.2) = {u}"));
    let l = bounds_lu(1.8).unwrap().l_val;
    c.check((l - 2.428).abs() < 1e-12, format!("L(1.8) = {l}"));
    match classify_two_param(1.5, 1.8) {
        Ok(v) => {
            let band_ok = v
                .band
                .is_some_and(|[lo, hi]| (lo - 1.675).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
            c.check(
                v.outcome == Outcome::Unknown && band_ok,
                format!("(1.5,1.8) -> {:?} band {:?}", v.outcome, v.band),
            );
        }
        Err(e) => c.check(false, format!("(1.5,1.8): {e}")),
    }
    match sign_scan(&MLParams::two(1.8, 2.0).unwrap(), 200.0, 1e-10) {
        Ok(s) => c.check(
            s.certified && s.min_value.abs() > s.err_at_min,
            format!(
                "scan (1.8,2.0): min {:.4} at t={:.3}, err {:.1e}",
                s.min_value, s.argmin, s.err_at_min
            ),
        ),
        Err(e) => c.check(false, format!("scan (1.8,2.0): {e}")),
    }
    c.finish()
}

fn criterion_5() -> Verdict {
    let mut c = Checks::default();
    let table = [
        ((1.0, 1.0, 1.0, 3.0), Outcome::NotExists, "I.1"),
        ((0.5, 0.5, 2.0, 2.0), Outcome::Exists, "d2-iff"),
        ((1.0, 0.5, 0.8, 1.0), Outcome::NotExists, "I.2"),
        ((0.5, 0.5, 0.6, 1.0), Outcome::Exists, "II.1"),
        ((0.25, 0.25, 1.5, 1.5), Outcome::Exists, "II.3"),
        ((0.6, 0.6, 1.0, 1.5), Outcome::NotExists, "I.4"),
        ((0.3, 0.3, 0.5, 1.5), Outcome::Unknown, "f-band"),
    ];
    let mut matched = 0;
    for ((a, b, cc, d), outcome, rule) in table {
        let v = classify_existence(&GammaTypeParams::new(a, b, cc, d).unwrap());
        match v {
            Ok(v) if v.outcome == outcome && v.rule == rule => matched += 1,
            Ok(v) => c.check(
                false,
                format!(
                    "({a},{b},{cc},{d}) -> {:?} [{}], want {outcome:?} [{rule}]",
                    v.outcome, v.rule
                ),
            ),
            Err(e) => c.check(false, format!("({a},{b},{cc},{d}): {e}")),
        }
    }
    let band = classify_existence(&GammaTypeParams::new(0.3, 0.3, 0.5, 1.5).unwrap())
        .unwrap()
        .band;
    c.check(
        band.is_some_and(|[lo, hi]| (lo - 0.625).abs() < 1e-12 && (hi - 0.95).abs() < 1e-12),
        format!("band of (0.3,0.3,0.5,1.5) = {band:?}"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..100 {
        let a: f64 = rng.random_range(0.05..2.0);
        let b: f64 = rng.random_range((1.0 - a).max(0.05)..2.5);
        // half the draws straddle the threshold closely
        let th = 3.0 * a + b;
        let cc = if rng.random::<bool>() {
            th + rng.random_range(-0.01..0.01)
        } else {
            rng.random_range(0.1..2.0 * th)
        };
        let v = classify_existence(&GammaTypeParams::new(a, b, cc, 2.0).unwrap()).unwrap();
        let want = if cc >= th {
            Outcome::Exists
        } else {
            Outcome::NotExists
        };
        if v.outcome != want {
            mismatches += 1;
        }
    }
    c.check(
        mismatches == 0,
        format!("{matched}/7 table rows; d=2 sweep: {mismatches}/100 mismatches"),
    );
    c.finish()
}

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn criterion_6() -> Verdict {
    let mut c = Checks::default();
    let cases: &[(&str, &[(&str, f64)])] = &[
        ("cauchy-gamma-ratio", &[("alpha", 1.5)]),
        ("cauchy-gamma-ratio", &[("alpha", 2.0)]),
        (
            "cauchy-half-power",
            &[("alpha", 1.5), ("q", 4.0 / 3.0), ("eps", 1.0)],
        ),
        (
            "cauchy-half-power",
            &[("alpha", 1.5), ("q", 4.0 / 3.0), ("eps", -1.0)],
        ),
        (
            "x-halving",
            &[("a", 0.5), ("b", 0.5), ("c", 2.0), ("d", 1.5)],
        ),
        (
            "x-beta-extension",
            &[("a", 0.25), ("b", 0.5), ("c", 2.0), ("d", 1.5)],
        ),
        (
            "x-m-gamma",
            &[("a", 1.5), ("b", 0.5), ("c", 2.0), ("d", 0.5)],
        ),
        ("x-beta-gamma", &[("a", 0.5), ("b", 1.5), ("c", 2.0)]),
        ("half-stable-mixture", &[("alpha", 2.0 / 3.0)]),
        ("half-student-mixture", &[("nu", 0.5)]),
        ("half-student-mixture", &[("nu", 1.0)]),
    ];
    let mut passed = 0;
    for (name, kv) in cases {
        match idcert::verify_identity(name, &params(kv), Mode::Symbolic, 0, 0) {
            Ok(rep) => {
                let cmp = rep.comparison.as_ref();
                let exact = cmp.is_some_and(|c| {
                    c.symbolic && c.residual.numer.is_empty() && c.residual.denom.is_empty()
                });
                let numeric = cmp.is_some_and(|c| c.max_rel_diff <= 1e-11);
                if rep.pass && exact && numeric {
                    passed += 1;
                } else {
                    c.check(
                        false,
                        format!(
                            "{name} {kv:?}: pass={} exact={exact} numeric={numeric}",
                            rep.pass
                        ),
                    );
                }
            }
            Err(e) => c.check(false, format!("{name} {kv:?}: {e}")),
        }
    }
    // duplication constants, Γ(2s + c) = 2^{2s+c-1} Γ(s + c/2) Γ(s + c/2 + 1/2) / √π
    let mut dup_worst = 0.0f64;
    for cv in [r(1, 1), r(1, 2), r(3, 2), r(7, 3)] {
        let e = power(&expr_gamma(cv).unwrap(), r(2, 1)).unwrap();
        let d = duplication_rewrite(&e);
        for s in [-0.2, 0.0, 0.3, 0.9, 2.5] {
            let direct = gamma(2.0 * s + *cv.numer() as f64 / *cv.denom() as f64)
                / gamma(*cv.numer() as f64 / *cv.denom() as f64);
            let (x, y) = (eval_at(&e, s).unwrap(), eval_at(&d, s).unwrap());
            dup_worst = dup_worst
                .max((x - y).abs() / x.abs())
                .max((x - direct).abs() / direct.abs());
        }
    }
    c.check(
        dup_worst <= 1e-11,
        format!(
            "{passed}/{} identities exact; duplication max rel {dup_worst:.1e}",
            cases.len()
        ),
    );
    c.finish()
}

/// `|C_2|`, folded density `2 f(t)` on `t > 0`.
fn half_c2_pdf(t: f64) -> f64 {
    2.0 * dists::alpha_cauchy_pdf(&AlphaCauchyParams::new(2.0).unwrap(), t)
}

fn ks_against_half_c2(values: Vec<f64>) -> f64 {
    let batch = SampleBatch {
        n: values.len(),
        values,
        seed: 42,
        dist_tag: String::new(),
    };
    let mut cdf = QuadratureCdf::new(half_c2_pdf, 0.0, 1.0);
    dists::ks_distance(&batch, |x| cdf.cdf(x))
}

fn criterion_7() -> Verdict {
    const N: usize = 200_000;
    const SEED: u64 = 42;
    let mut c = Checks::default();
    for alpha in [1.5, 2.0] {
        let p = AlphaCauchyParams::new(alpha).unwrap();
        let batch = dists::sample_alpha_cauchy(&p, N, SEED);
        let mut cdf =
            QuadratureCdf::new(|t| dists::alpha_cauchy_pdf(&p, t), f64::NEG_INFINITY, 1.0);
        let ks = dists::ks_distance(&batch, |x| cdf.cdf(x));
        c.check(ks < 0.01, format!("alpha={alpha} KS {ks:.4}"));
        for s in [-0.3, 0.25] {
            let m = batch.abs_moment(s, dists::alpha_cauchy_abs_moment(&p, s).unwrap());
            c.check(
                m.z_score.abs() < 3.0,
                format!("alpha={alpha} s={s} z {:.2}", m.z_score),
            );
        }
    }
    let p2 = AlphaCauchyParams::new(2.0).unwrap();
    let analytic = dists::alpha_cauchy_abs_moment(&p2, 0.5).unwrap();
    c.check(
        (analytic - SQRT_2).abs() <= 1e-9,
        format!("E|C2|^1/2 analytic - sqrt2 = {:.1e}", analytic - SQRT_2),
    );
    let m = dists::sample_alpha_cauchy(&p2, N, SEED).abs_moment(0.5, SQRT_2);
    c.check(
        m.z_score.abs() < 3.0,
        format!(
            "E|C2|^1/2 empirical {:.5} ({:.2} SE)",
            m.empirical, m.z_score
        ),
    );

    let t1: Vec<f64> = dists::sample_student(1.0, N, SEED)
        .unwrap()
        .values
        .into_iter()
        .map(f64::abs)
        .collect();
    let ks_t = ks_against_half_c2(t1);
    c.check(ks_t < 0.01, format!("|T1| vs |C2| KS {ks_t:.4}"));

    let z: Vec<f64> = dists::sample_sym_stable(0.5, N, SEED)
        .unwrap()
        .values
        .into_iter()
        .map(f64::abs)
        .collect();
    let ks_z = ks_against_half_c2(z);
    c.known_failure(
        ks_z < 0.01,
        format!("|Z_(1/2,1/2)| vs |C2| KS {ks_z:.4} (laws differ: Mellin strips (-1,1/2) and (-1,1); recorded in the ledger)"),
    );
    let z1: Vec<f64> = dists::sample_sym_stable(1.0, N, SEED)
        .unwrap()
        .values
        .into_iter()
        .map(f64::abs)
        .collect();
    let ks_z1 = ks_against_half_c2(z1);
    c.check(
        ks_z1 < 0.01,
        format!("alpha=1 variant |Z_(1,1/2)| vs |C2| KS {ks_z1:.4}"),
    );
    c.finish()
}

fn criterion_8() -> Verdict {
    let mut c = Checks::default();
    for alpha in [1.01, 1.1, 1.2, 2.0] {
        let s = idcert::certify_alpha_cauchy(alpha).map(|x| x.status);
        c.check(
            s.as_ref().is_ok_and(|s| *s == Status::IdCertified),
            format!("alpha={alpha}: {s:?}"),
        );
    }
    for alpha in [1.3, 1.5, 1.9] {
        let s = idcert::certify_alpha_cauchy(alpha).map(|x| x.status);
        c.check(
            s.as_ref().is_ok_and(|s| !s.is_certified()),
            format!("alpha={alpha}: {s:?}"),
        );
    }
    let rows = [
        (1.5, 1i8, 5.0 / 6.0),
        (3.0, 1, 1.5),
        (1.5, -1, 0.75),
        (3.0, -1, 5.0 / 3.0),
    ];
    let mut boundary_ok = 0;
    for (alpha, eps, th) in rows {
        let computed = idcert::half_power_threshold(alpha, eps);
        c.check(
            (computed - th).abs() < 1e-12,
            format!("threshold({alpha},{eps:+}) = {computed}"),
        );
        let at = idcert::certify_half_power(alpha, th, eps).map(|x| x.status);
        let below = idcert::certify_half_power(alpha, th - 0.01, eps).map(|x| x.status);
        let ok = at.as_ref().is_ok_and(|s| s.is_certified())
            && below.as_ref().is_ok_and(|s| !s.is_certified());
        if ok {
            boundary_ok += 2;
        } else {
            c.check(
                false,
                format!("half-power ({alpha},{eps:+}) at {th}: {at:?}, below: {below:?}"),
            );
        }
    }
    c.check(
        boundary_ok == 8,
        format!("half-power boundary cases {boundary_ok}/8"),
    );
    let st = |nu: f64| idcert::certify_half_student(nu).map(|x| x.status.is_certified());
    let flips = st(0.5) == Ok(true)
        && st(1.0) == Ok(true)
        && st(1.0 + 1e-9) == Ok(false)
        && st(1.5) == Ok(false);
    c.check(
        flips,
        format!("half-student certified for nu in {{0.5, 1}}, not for {{1+1e-9, 1.5}}: {flips}"),
    );
    c.finish()
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut janson, mut contradictions, mut exists, mut certified_neg, mut param_errors) =
        (0, 0, 0, 0, 0);
    for _ in 0..1000 {
        let a: f64 = rng.random_range(0.05..2.0);
        let b: f64 = rng.random_range(0.05..2.0);
        let c: f64 = rng.random_range(0.05..6.0);
        let d: f64 = rng.random_range(0.1..2.5);
        let p = GammaTypeParams::new(a, b, c, d).unwrap();
        match classify::cross_check(&p, 60.0) {
            Ok(x) => {
                if x.existence.outcome == Outcome::Exists {
                    exists += 1;
                    // the soundness cross-check, restated outside the classifier
                    if let Ok(e) = p.expr() {
                        if !janson_gate(&e).passes {
                            janson += 1;
                        }
                    }
                }
                if x.scan.as_ref().is_some_and(|s| s.certified) {
                    certified_neg += 1;
                }
            }
            Err(Error::Consistency(m)) => {
                if m.contains("Janson") {
                    janson += 1;
                } else {
                    contradictions += 1;
                }
            }
            Err(_) => param_errors += 1,
        }
    }
    let mut c = Checks::default();
    c.check(janson == 0, format!("{janson} Janson-gate contradictions"));
    c.check(
        contradictions == 0,
        format!("{contradictions} classifier/scanner contradictions"),
    );
    c.check(
        param_errors == 0,
        format!("{param_errors} evaluation errors"),
    );
    c.notes.push(format!(
        "1000 tuples: {exists} exist, {certified_neg} certified negative scans"
    ));
    c.finish()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("closed-form ML oracle", criterion_1),
        ("recurrence property", criterion_2),
        ("Mellin-Barnes moment oracle", criterion_3),
        ("D band reproduction", criterion_4),
        ("existence truth table", criterion_5),
        ("symbolic identity suite", criterion_6),
        ("sampling suite", criterion_7),
        ("certification gates", criterion_8),
        ("consistency sweep", criterion_9),
    ];
    let mut hard_failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let secs = t.elapsed().as_secs_f64();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{tag}] {name} ({secs:.1}s): {}",
            i + 1,
            v.detail
        );
        if !v.pass {
            match &v.known {
                Some(why) => println!("    known disagreement, not a defect: {why}"),
                None => hard_failures += 1,
            }
        }
    }
    if hard_failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{hard_failures} criteria failed");
        ExitCode::FAILURE
    }
}
