//! Densities, fractional moments, samplers and quadrature oracles.
//!
//! Every sampler draws from a ChaCha8 stream keyed by `(seed, dist_tag)`, so
//! a batch is a pure function of its parameters, size and seed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::gamma::{gamma, ln_gamma, ln_gamma_sign, sin_pi};
use crate::mellin::{self, MellinExpr};
use crate::quad::{
    integrate, integrate_half_line, integrate_positive_axis, QuadOptions, QuadResult,
};
use crate::rational::{exact, Rational};
use crate::specfun::{
    eval_ml, eval_wright, ml_algebraic_integral, ml_mellin_integral, IntegralEstimate, MLParams,
};
use crate::{param_err, Error, Result};

/// Nodes of the numeric inverse-CDF tables.
pub const TABLE_NODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaCauchyParams {
    pub alpha: f64,
}

impl AlphaCauchyParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(param_err!("alpha-Cauchy needs alpha > 1, got {alpha}"));
        }
        Ok(AlphaCauchyParams { alpha })
    }
}

/// Parameters of `X_{a,b,c,d}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GammaTypeParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GammaTypeParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = GammaTypeParams { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(param_err!("{name} must be positive, got {v}"));
            }
        }
        if !(self.d.is_finite() && self.d != 0.0) {
            return Err(param_err!("d must be nonzero, got {}", self.d));
        }
        Ok(())
    }

    /// Exact rational copies of `(a, b, c, d)`.
    pub fn rationals(&self) -> Result<[Rational; 4]> {
        Ok([
            exact(self.a, "a")?,
            exact(self.b, "b")?,
            exact(self.c, "c")?,
            exact(self.d, "d")?,
        ])
    }

    pub fn expr(&self) -> Result<MellinExpr> {
        self.validate()?;
        let [a, b, c, d] = self.rationals()?;
        mellin::expr_x(a, b, c, d)
    }

    /// `E[X^s] = Γ(c)/(Γ(a)Γ(b)) · Γ(a+s)Γ(b−s)/Γ(c+ds)` on `(−a, b)`.
    pub fn moment(&self, s: f64) -> Result<f64> {
        self.validate()?;
        if !(s > -self.a && s < self.b) {
            return Err(Error::Range(format!(
                "s = {s} lies outside the strip ({}, {})",
                -self.a, self.b
            )));
        }
        let (l, sg) = ln_gamma_sign(self.c + self.d * s);
        let v = ln_gamma(self.c) - ln_gamma(self.a) - ln_gamma(self.b)
            + ln_gamma(self.a + s)
            + ln_gamma(self.b - s)
            - l;
        Ok(if sg == 0.0 { 0.0 } else { sg * v.exp() })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub n: usize,
    pub dist_tag: String,
}

impl SampleBatch {
    /// Empirical `E|X|^s` against an analytic value.
    pub fn abs_moment(&self, s: f64, analytic: f64) -> MomentReport {
        moment_report(&self.values, s, analytic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentReport {
    pub s: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub z_score: f64,
}

/// Mean of `|x|^s` with its standard error and the z-score against `analytic`.
pub fn moment_report(values: &[f64], s: f64, analytic: f64) -> MomentReport {
    let n = values.len() as f64;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, v) in values.iter().enumerate() {
        let y = v.abs().powf(s);
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
    let stderr = (var / n).sqrt();
    let z_score = if stderr > 0.0 {
        (mean - analytic) / stderr
    } else {
        0.0
    };
    MomentReport {
        s,
        empirical: mean,
        stderr,
        analytic,
        z_score,
    }
}

fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The stream used by every sampler: ChaCha8 seeded from `seed`, stream
/// number from the FNV-1a hash of `tag`.
pub fn stream_rng(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(tag));
    rng
}

fn batch(values: Vec<f64>, seed: u64, tag: String) -> SampleBatch {
    SampleBatch {
        n: values.len(),
        values,
        seed,
        dist_tag: tag,
    }
}

fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// `ln G` for `G ~ Gamma(shape)`, safe for shapes far below one where `G`
/// itself underflows.
fn ln_gamma_variate<R: Rng>(rng: &mut R, shape: f64) -> f64 {
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("shape checked by caller");
        g.sample(rng).ln()
    } else {
        // G_a = G_{a+1} U^{1/a}
        let g = Gamma::new(shape + 1.0, 1.0).expect("shape checked by caller");
        g.sample(rng).ln() + uniform(rng).ln() / shape
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(param_err!("{what} must be positive, got {v}"))
    }
}

// ---------------------------------------------------------------------------
// α-Cauchy
// ---------------------------------------------------------------------------

/// `sin(π/α)/(2π/α) · 1/(1+|t|^α)`.
pub fn alpha_cauchy_pdf(p: &AlphaCauchyParams, t: f64) -> f64 {
    let a = p.alpha;
    (PI / a).sin() / (2.0 * PI / a) / (1.0 + t.abs().powf(a))
}

/// `E|C_α|^s = sin(π/α)/π · Γ(1/α + s/α) Γ(1 − 1/α − s/α)` on `(−1, α−1)`.
pub fn alpha_cauchy_abs_moment(p: &AlphaCauchyParams, s: f64) -> Result<f64> {
    let a = p.alpha;
    if !(s > -1.0 && s < a - 1.0) {
        return Err(Error::Range(format!(
            "s = {s} lies outside the strip (-1, {})",
            a - 1.0
        )));
    }
    let l = ((PI / a).sin() / PI).ln() + ln_gamma((1.0 + s) / a) + ln_gamma(1.0 - (1.0 + s) / a);
    Ok(l.exp())
}

/// Signed α-Cauchy samples: `|C_α| = (G_{1/α}/G_{1−1/α})^{1/α}`, the
/// beta-prime form of `(B/(1−B))^{1/α}` with `B ~ Beta(1/α, 1−1/α)`, times an
/// independent sign.
pub fn sample_alpha_cauchy(p: &AlphaCauchyParams, n: usize, seed: u64) -> SampleBatch {
    let a = p.alpha;
    let tag = format!("alpha-cauchy(alpha={a})");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let l1 = ln_gamma_variate(&mut rng, 1.0 / a);
            let l2 = ln_gamma_variate(&mut rng, 1.0 - 1.0 / a);
            let mag = ((l1 - l2) / a).exp();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();
    batch(values, seed, tag)
}

// ---------------------------------------------------------------------------
// Gamma, beta, stable, Student
// ---------------------------------------------------------------------------

pub fn sample_gamma(c: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    positive(c, "c")?;
    let tag = format!("gamma(c={c})");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| ln_gamma_variate(&mut rng, c).exp())
        .collect();
    Ok(batch(values, seed, tag))
}

pub fn sample_beta(a: f64, b: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    positive(a, "a")?;
    positive(b, "b")?;
    let tag = format!("beta(a={a},b={b})");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let la = ln_gamma_variate(&mut rng, a);
            let lb = ln_gamma_variate(&mut rng, b);
            // G_a/(G_a+G_b) = 1/(1+e^{lb−la})
            1.0 / (1.0 + (lb - la).exp())
        })
        .collect();
    Ok(batch(values, seed, tag))
}

/// Symmetric strictly stable samples with `E e^{iθZ} = e^{−|θ|^α}`,
/// α ∈ (0, 1], by the Chambers–Mallows–Stuck transformation.
pub fn sample_sym_stable(alpha: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param_err!(
            "symmetric stable sampler needs alpha in (0, 1], got {alpha}"
        ));
    }
    let tag = format!("sym-stable(alpha={alpha})");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let u = PI * (uniform(&mut rng) - 0.5);
            if alpha == 1.0 {
                return u.tan();
            }
            let w: f64 = Exp1.sample(&mut rng);
            (alpha * u).sin() / u.cos().powf(1.0 / alpha)
                * (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) / alpha)
        })
        .collect();
    Ok(batch(values, seed, tag))
}

/// `E|Z|^s = Γ(1+s)Γ(1−s/α)/(Γ(1+s/2)Γ(1−s/2))` on `(−1, α)`.
pub fn sym_stable_abs_moment(alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param_err!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(s > -1.0 && s < alpha) {
        return Err(Error::Range(format!(
            "s = {s} lies outside the strip (-1, {alpha})"
        )));
    }
    Ok(gamma(1.0 + s) * gamma(1.0 - s / alpha) / (gamma(1.0 + s / 2.0) * gamma(1.0 - s / 2.0)))
}

/// Student-t samples as `N/√(χ²_ν/ν)`.
pub fn sample_student(nu: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    positive(nu, "nu")?;
    let tag = format!("student(nu={nu})");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            // χ²_ν = 2 G_{ν/2}
            let lchi = LN2 + ln_gamma_variate(&mut rng, nu / 2.0);
            z * (0.5 * (nu.ln() - lchi)).exp()
        })
        .collect();
    Ok(batch(values, seed, tag))
}

const LN2: f64 = core::f64::consts::LN_2;

/// Samples of `Y` with density `½(1+x)e^{−x}`, the equal mixture of `Γ_1`
/// and `Γ_2`.
pub fn sample_y(n: usize, seed: u64) -> SampleBatch {
    let tag = String::from("y");
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let e: f64 = Exp1.sample(&mut rng);
            if rng.random::<bool>() {
                let e2: f64 = Exp1.sample(&mut rng);
                e + e2
            } else {
                e
            }
        })
        .collect();
    batch(values, seed, tag)
}

pub fn student_pdf(nu: f64, t: f64) -> f64 {
    let l = ln_gamma((nu + 1.0) / 2.0)
        - 0.5 * (PI * nu).ln()
        - ln_gamma(nu / 2.0)
        - (nu + 1.0) / 2.0 * (t * t / nu).ln_1p();
    l.exp()
}

/// `E|T_ν|^s = ν^{s/2} Γ(1/2 + s/2) Γ(ν/2 − s/2) / (√π Γ(ν/2))` on `(−1, ν)`.
pub fn student_abs_moment(nu: f64, s: f64) -> Result<f64> {
    positive(nu, "nu")?;
    if !(s > -1.0 && s < nu) {
        return Err(Error::Range(format!(
            "s = {s} lies outside the strip (-1, {nu})"
        )));
    }
    let l = 0.5 * s * nu.ln() + ln_gamma(0.5 + 0.5 * s) + ln_gamma(0.5 * nu - 0.5 * s)
        - 0.5 * PI.ln()
        - ln_gamma(0.5 * nu);
    Ok(l.exp())
}

// ---------------------------------------------------------------------------
// Wright M family
// ---------------------------------------------------------------------------

fn check_m(alpha: f64, beta: f64, t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(param_err!("alpha must lie in [0, 1), got {alpha}"));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(param_err!("beta must be non-negative, got {beta}"));
    }
    if !(t.is_finite() && t > -1.0) {
        return Err(param_err!("t must exceed -1, got {t}"));
    }
    if alpha * (1.0 + t) + beta <= 0.0 {
        return Err(param_err!("alpha(1+t)+beta must be positive"));
    }
    Ok(())
}

/// Density `Γ(α(1+t)+β)/Γ(1+t) · x^t φ(−α, β, −x)` of `M_{α,β,t}`.
pub fn wright_m_pdf(alpha: f64, beta: f64, t: f64, x: f64) -> Result<f64> {
    check_m(alpha, beta, t)?;
    if !(x > 0.0) {
        return Err(param_err!("x must be positive, got {x}"));
    }
    let phi = eval_wright(alpha, beta, x)?.value;
    let k = alpha * (1.0 + t) + beta;
    Ok((ln_gamma(k) - ln_gamma(1.0 + t) + t * x.ln()).exp() * phi)
}

/// `E[M^s] = Γ(α(1+t)+β)/Γ(1+t) · Γ(1+t+s)/Γ(α(1+t)+β+αs)` on `(−1−t, ∞)`.
pub fn wright_m_moment(alpha: f64, beta: f64, t: f64, s: f64) -> Result<f64> {
    check_m(alpha, beta, t)?;
    if !(s > -1.0 - t) {
        return Err(Error::Range(format!(
            "s = {s} lies outside the strip ({}, inf)",
            -1.0 - t
        )));
    }
    let k = alpha * (1.0 + t) + beta;
    let (l, sg) = ln_gamma_sign(k + alpha * s);
    Ok(sg * (ln_gamma(k) - ln_gamma(1.0 + t) + ln_gamma(1.0 + t + s) - l).exp())
}

pub fn sample_wright_m(alpha: f64, beta: f64, t: f64, n: usize, seed: u64) -> Result<SampleBatch> {
    check_m(alpha, beta, t)?;
    let tag = format!("wright-m(alpha={alpha},beta={beta},t={t})");
    let table = InverseCdfTable::build(
        |x| wright_m_pdf(alpha, beta, t, x).map(|v| v.max(0.0)),
        1.0 + t,
        RightTail::Light,
    )?;
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n).map(|_| table.sample(&mut rng)).collect();
    Ok(batch(values, seed, tag))
}

// ---------------------------------------------------------------------------
// X_{a,b,c,d}
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PdfEval {
    /// Clamped at zero.
    pub value: f64,
    pub raw: f64,
    pub abs_err: f64,
    pub clamped: bool,
}

/// Density of `X_{a,b,c,d}^{−1}`, `d > 0`:
/// `Γ(a+b)Γ(c)/(Γ(a)Γ(b)) · t^{b−1} E^{a+b}_{d,c+bd}(−t)`. Negative raw values
/// are clamped to zero and flagged.
pub fn xabcd_inverse_pdf_eval(p: &GammaTypeParams, t: f64) -> Result<PdfEval> {
    p.validate()?;
    if p.d < 0.0 {
        return Err(param_err!(
            "the inverse density needs d > 0; use X_(b,a,c,-d) for d < 0"
        ));
    }
    if !(t > 0.0) {
        return Err(param_err!("t must be positive, got {t}"));
    }
    let ml = MLParams::new(p.d, p.c + p.b * p.d, p.a + p.b)?;
    let e = eval_ml(&ml, -t)?;
    let k = (ln_gamma(p.a + p.b) + ln_gamma(p.c) - ln_gamma(p.a) - ln_gamma(p.b)
        + (p.b - 1.0) * t.ln())
    .exp();
    let raw = k * e.value;
    let abs_err = k * e.abs_err_est;
    Ok(PdfEval {
        value: raw.max(0.0),
        raw,
        abs_err,
        clamped: raw < 0.0,
    })
}

pub fn xabcd_inverse_pdf(p: &GammaTypeParams, t: f64) -> Result<f64> {
    xabcd_inverse_pdf_eval(p, t).map(|v| v.value)
}

/// `∫_0^∞ t^s · pdf_{X^{−1}}(t) dt` by quadrature of the Mittag-Leffler
/// density on `[0, 10⁴]` plus its large-argument expansion beyond. This is
/// the numeric side of `E[X^{−s}]`, for `−b < s < a`.
pub fn xabcd_inverse_moment_quadrature(p: &GammaTypeParams, s: f64) -> Result<IntegralEstimate> {
    p.validate()?;
    if p.d < 0.0 {
        return Err(param_err!("the inverse density needs d > 0"));
    }
    let ml = MLParams::new(p.d, p.c + p.b * p.d, p.a + p.b)?;
    let k = (ln_gamma(p.a + p.b) + ln_gamma(p.c) - ln_gamma(p.a) - ln_gamma(p.b)).exp();
    let r = ml_mellin_integral(&ml, s + p.b, 1e4)?;
    Ok(IntegralEstimate {
        value: k * r.value,
        abs_err: k * r.abs_err,
    })
}

/// Samples of `X_{a,b,c,d}`: the `X^{−1}` density is tabulated and inverted,
/// then reciprocated. For `d < 0`, `X_{a,b,c,d} = X_{b,a,c,−d}^{−1}` is read
/// off the table of `X_{b,a,c,−d}^{−1}` directly.
pub fn sample_xabcd(p: &GammaTypeParams, n: usize, seed: u64) -> Result<SampleBatch> {
    p.validate()?;
    let tag = format!("xabcd(a={},b={},c={},d={})", p.a, p.b, p.c, p.d);
    let (q, flip) = if p.d > 0.0 {
        (*p, true)
    } else {
        (
            GammaTypeParams {
                a: p.b,
                b: p.a,
                c: p.c,
                d: -p.d,
            },
            false,
        )
    };
    // X^{-1} has Mellin strip (−b, a)
    let ml = MLParams::new(q.d, q.c + q.b * q.d, q.a + q.b)?;
    let k = (ln_gamma(q.a + q.b) + ln_gamma(q.c) - ln_gamma(q.a) - ln_gamma(q.b)).exp();
    // for d > 1 the density carries a factor oscillating in t^{1/d}; once a
    // period is below 3e-3 in ln t only the algebraic part has mass
    let t_osc = if q.d > 1.0 {
        (2.0 * PI * q.d / (3e-3 * sin_pi(1.0 / q.d)))
            .powf(q.d)
            .max(1e4)
    } else {
        f64::INFINITY
    };
    let mass = |t1: f64, t2: f64| {
        (t1 >= t_osc).then(|| ml_algebraic_integral(&ml, q.b, t1, t2).map(|r| k * r.value))
    };
    let table = InverseCdfTable::build_with_mass(
        |t| xabcd_inverse_pdf(&q, t),
        mass,
        q.b,
        RightTail::Algebraic(q.a),
    )?;
    let mut rng = stream_rng(seed, &tag);
    let values = (0..n)
        .map(|_| {
            let v = table.sample(&mut rng);
            if flip {
                1.0 / v
            } else {
                v
            }
        })
        .collect();
    Ok(batch(values, seed, tag))
}

// ---------------------------------------------------------------------------
// Numeric inverse CDF
// ---------------------------------------------------------------------------

/// Decay of a density on `(0, ∞)` beyond the last table node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightTail {
    /// `pdf(x) ~ x^{−1−r}`: moments exist exactly for `s < r`.
    Algebraic(f64),
    /// Faster than any power.
    Light,
}

/// Inverse CDF of a density on `(0, ∞)`, tabulated on [`TABLE_NODES`]
/// log-spaced nodes.
///
/// `ln x` is interpolated as a monotone cubic in the logit `w = ln F − ln S`
/// of the CDF, which keeps both tails resolved. Beyond the table the left
/// tail follows `F ∝ x^κ` (κ the left edge of the Mellin strip) and the right
/// tail follows the given [`RightTail`].
#[derive(Debug, Clone)]
pub struct InverseCdfTable {
    ln_x: Vec<f64>,
    w: Vec<f64>,
    slope: Vec<f64>,
    ln_f0: f64,
    ln_sn: f64,
    x_last: f64,
    pdf_last: f64,
    left_exponent: f64,
    right: RightTail,
    /// `|∫pdf − 1|` as tabulated.
    pub normalization_error: f64,
}

const TAIL_MASS: f64 = 1e-14;
const X_FLOOR: f64 = 1e-280;
const X_CEIL: f64 = 1e280;

impl InverseCdfTable {
    /// `left_exponent` is κ > 0 with `pdf(x) ~ x^{κ−1}` at zero.
    pub fn build<F: FnMut(f64) -> Result<f64>>(
        pdf: F,
        left_exponent: f64,
        right: RightTail,
    ) -> Result<Self> {
        Self::build_with_mass(pdf, |_, _| None, left_exponent, right)
    }

    /// As [`build`](Self::build), with `mass(x₁, x₂)` supplying the
    /// probability of `(x₁, x₂)` (`x₂` possibly infinite) where the density
    /// is too oscillatory for quadrature; `None` falls back to quadrature.
    pub fn build_with_mass<F, M>(
        mut pdf: F,
        mut mass: M,
        left_exponent: f64,
        right: RightTail,
    ) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
        M: FnMut(f64, f64) -> Option<Result<f64>>,
    {
        if !(left_exponent > 0.0) {
            return Err(param_err!("left tail exponent must be positive"));
        }
        if let RightTail::Algebraic(r) = right {
            if !(r > 0.0) {
                return Err(param_err!("right tail exponent must be positive"));
            }
        }
        // walk out until the tail masses are negligible
        let mut lo = 1.0;
        loop {
            let v = pdf(lo)?;
            if lo * v / left_exponent < TAIL_MASS || lo < X_FLOOR {
                break;
            }
            lo /= 10.0;
        }
        let mut hi = 1.0;
        loop {
            let tail = match mass(hi, f64::INFINITY) {
                Some(m) => m?,
                None => {
                    let v = pdf(hi)?;
                    match right {
                        RightTail::Algebraic(r) => hi * v / r,
                        RightTail::Light => hi * v,
                    }
                }
            };
            if (tail < TAIL_MASS && hi > 1.0) || hi > X_CEIL {
                break;
            }
            hi *= 10.0;
        }
        let (ulo, uhi) = (lo.ln(), hi.ln());
        let h = (uhi - ulo) / (TABLE_NODES - 1) as f64;
        let ln_x: Vec<f64> = (0..TABLE_NODES).map(|i| ulo + h * i as f64).collect();
        let mut dens = Vec::with_capacity(TABLE_NODES);
        for &u in &ln_x {
            dens.push(pdf(u.exp())?);
        }
        let mut err = None;
        let mut pieces = Vec::with_capacity(TABLE_NODES - 1);
        let mut averaged = alloc::vec![false; TABLE_NODES - 1];
        for i in 0..TABLE_NODES - 1 {
            if let Some(m) = mass(ln_x[i].exp(), ln_x[i + 1].exp()) {
                pieces.push(m?);
                averaged[i] = true;
                continue;
            }
            let r = integrate(
                |u: f64| match pdf(u.exp()) {
                    Ok(v) => v * u.exp(),
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                },
                ln_x[i],
                ln_x[i + 1],
                QuadOptions {
                    abs_tol: 1e-300,
                    rel_tol: 1e-10,
                    max_panels: 64,
                    initial_panels: 1,
                },
            );
            pieces.push(r.value);
        }
        if let Some(e) = err {
            return Err(e);
        }
        let x0 = lo;
        let left_mass = x0 * dens[0] / left_exponent;
        let xn = hi;
        let right_mass = match mass(xn, f64::INFINITY) {
            Some(m) => m?,
            None => match right {
                RightTail::Algebraic(r) => xn * dens[TABLE_NODES - 1] / r,
                RightTail::Light => 0.0,
            },
        };
        let total = left_mass + pieces.iter().sum::<f64>() + right_mass;
        let normalization_error = (total - 1.0).abs();
        if !(normalization_error < 1e-4) {
            return Err(Error::NonConvergence(format!(
                "inverse-CDF tabulation: density integrates to {total}"
            )));
        }
        let mut cum_f = Vec::with_capacity(TABLE_NODES);
        let mut acc = left_mass;
        cum_f.push(acc);
        for p in &pieces {
            acc += p;
            cum_f.push(acc);
        }
        let mut cum_s = alloc::vec![0.0; TABLE_NODES];
        let mut acc = right_mass;
        cum_s[TABLE_NODES - 1] = acc;
        for i in (0..TABLE_NODES - 1).rev() {
            acc += pieces[i];
            cum_s[i] = acc;
        }
        // keep nodes where the logit is finite and strictly increasing
        let mut lx = Vec::new();
        let mut w = Vec::new();
        let mut dwdu = Vec::new();
        for i in 0..TABLE_NODES {
            let (f, s) = (cum_f[i] / total, cum_s[i] / total);
            if !(f > 0.0 && s > 0.0) {
                continue;
            }
            let wi = f.ln() - s.ln();
            if w.last().is_some_and(|&prev| wi <= prev) {
                continue;
            }
            let x = ln_x[i].exp();
            // dF/du, from the pieces themselves where the density was averaged
            let next = (i < TABLE_NODES - 1).then_some(i);
            let prev = i.checked_sub(1);
            let dfdu = if [prev, next].iter().flatten().any(|&j| averaged[j]) {
                let adj: Vec<f64> = [prev, next]
                    .iter()
                    .flatten()
                    .map(|&j| pieces[j] / h)
                    .collect();
                adj.iter().sum::<f64>() / adj.len() as f64
            } else {
                x * dens[i]
            };
            lx.push(ln_x[i]);
            w.push(wi);
            // dw/du = (dF/du)/(F S)
            dwdu.push(dfdu / total / (f * s));
        }
        if w.len() < 4 {
            return Err(Error::NonConvergence(String::from(
                "inverse-CDF tabulation: density too concentrated",
            )));
        }
        let slope = monotone_slopes(&w, &lx, &dwdu);
        let m = w.len();
        let ln_f0 = {
            let e = w[0];
            -(-e).exp().ln_1p()
        };
        let ln_sn = -(w[m - 1]).exp().ln_1p();
        Ok(InverseCdfTable {
            x_last: lx[m - 1].exp(),
            pdf_last: dens[TABLE_NODES - 1] / total,
            ln_x: lx,
            w,
            slope,
            ln_f0,
            ln_sn,
            left_exponent,
            right,
            normalization_error,
        })
    }

    /// Quantile from `(ln F, ln(1 − F))`.
    pub fn quantile_ln(&self, ln_f: f64, ln_s: f64) -> f64 {
        let w = ln_f - ln_s;
        let m = self.w.len();
        if w <= self.w[0] {
            return (self.ln_x[0] + (ln_f - self.ln_f0) / self.left_exponent).exp();
        }
        if w >= self.w[m - 1] {
            return match self.right {
                RightTail::Algebraic(r) => (self.ln_x[m - 1] - (ln_s - self.ln_sn) / r).exp(),
                RightTail::Light => {
                    let sn = self.ln_sn.exp();
                    self.x_last + (self.ln_sn - ln_s) * sn / self.pdf_last.max(f64::MIN_POSITIVE)
                }
            };
        }
        let k = self.w.partition_point(|&v| v <= w) - 1;
        let (w0, w1) = (self.w[k], self.w[k + 1]);
        let h = w1 - w0;
        let t = (w - w0) / h;
        let (y0, y1) = (self.ln_x[k], self.ln_x[k + 1]);
        let (m0, m1) = (self.slope[k] * h, self.slope[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let y = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        y.exp()
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.quantile_ln(u.ln(), (-u).ln_1p())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.quantile(uniform(rng))
    }
}

/// Fritsch–Carlson limited Hermite slopes of `y(x)`, seeded with exact
/// derivatives `dx/dy` given as `dxdy` (here `dw/du`).
fn monotone_slopes(x: &[f64], y: &[f64], dxdy: &[f64]) -> Vec<f64> {
    let m = x.len();
    let secant: Vec<f64> = (0..m - 1)
        .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
        .collect();
    let mut d: Vec<f64> = (0..m)
        .map(|i| {
            let exact = 1.0 / dxdy[i];
            if exact.is_finite() && exact > 0.0 {
                exact
            } else if i == 0 {
                secant[0]
            } else if i == m - 1 {
                secant[m - 2]
            } else {
                0.5 * (secant[i - 1] + secant[i])
            }
        })
        .collect();
    for k in 0..m - 1 {
        let s = secant[k];
        if s == 0.0 {
            d[k] = 0.0;
            d[k + 1] = 0.0;
            continue;
        }
        let a = d[k] / s;
        let b = d[k + 1] / s;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[k] = tau * a * s;
            d[k + 1] = tau * b * s;
        }
    }
    d
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// `∫_0^∞ t^s pdf(t) dt`, requested to relative tolerance 1e−8. The achieved
/// error is in the result; it is an error only beyond 1e−6 relative.
pub fn mellin_quadrature<F: FnMut(f64) -> f64>(mut pdf: F, s: f64) -> Result<QuadResult> {
    let opts = QuadOptions {
        max_panels: 4000,
        ..QuadOptions::rel(1e-8)
    };
    let integrand = |t: f64| {
        let p = if t > 0.0 { pdf(t) } else { 0.0 };
        // t^s alone may overflow where the density has underflowed
        if p == 0.0 {
            0.0
        } else {
            p.signum() * (s * t.ln() + p.abs().ln()).exp()
        }
    };
    let r = integrate_positive_axis(integrand, 1.0, opts);
    if !(r.value.is_finite() && (r.converged || r.abs_err <= 1e-6 * r.value.abs())) {
        return Err(Error::NonConvergence(format!(
            "Mellin quadrature at s = {s}: estimated error {}",
            r.abs_err
        )));
    }
    Ok(r)
}

/// Kolmogorov–Smirnov sup-distance between a batch and a CDF. The CDF is
/// called at the sorted sample points in increasing order.
pub fn ks_distance<F: FnMut(f64) -> f64>(batch: &SampleBatch, mut cdf: F) -> f64 {
    let mut v = batch.values.clone();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// CDF obtained by accumulating adaptive quadrature of a density between
/// successive, increasing query points. Meant for [`ks_distance`].
pub struct QuadratureCdf<F: FnMut(f64) -> f64> {
    pdf: F,
    lower: f64,
    scale: f64,
    at: Option<(f64, f64)>,
}

impl<F: FnMut(f64) -> f64> QuadratureCdf<F> {
    /// `lower` is the left end of the support; `-inf` is allowed.
    pub fn new(pdf: F, lower: f64, scale: f64) -> Self {
        QuadratureCdf {
            pdf,
            lower,
            scale,
            at: None,
        }
    }

    fn from_lower(&mut self, x: f64) -> f64 {
        let opts = QuadOptions::rel(1e-11);
        let pdf = &mut self.pdf;
        if self.lower == f64::NEG_INFINITY {
            integrate_half_line(|v| pdf(x - v), 0.0, self.scale, opts).value
        } else {
            integrate(pdf, self.lower, x, opts).value
        }
    }

    pub fn cdf(&mut self, x: f64) -> f64 {
        if x <= self.lower {
            return 0.0;
        }
        let f = match self.at {
            Some((x0, f0)) if x >= x0 => {
                if x == x0 {
                    f0
                } else {
                    f0 + integrate(&mut self.pdf, x0, x, QuadOptions::rel(1e-11)).value
                }
            }
            _ => self.from_lower(x),
        };
        self.at = Some((x, f));
        f.clamp(0.0, 1.0)
    }
}
