//! Infinite-divisibility certificates and a registry of distributional
//! identities between gamma-type laws.
//!
//! A [`Certificate`] names a target law, a factorization chain, the rules
//! that turn the chain into infinite divisibility and the reports backing
//! every step. Certified statuses rest on classifier verdicts and closed-form
//! gates only; a sign scan can at most make a certificate
//! [`Status::NumericSupported`].
//!
//! Rules that may appear in `rules` of a certified chain:
//!
//! | rule                  | statement                                                        |
//! |-----------------------|------------------------------------------------------------------|
//! | `symmetric-times-Y`   | `V` symmetric, `Y` independent with density `½(1+x)e^{−x}` ⇒ `VY` is ID |
//! | `gamma2-mixture`      | `Γ_2 × W` is ID for every independent `W ≥ 0` (Kristiansen)      |
//! | `HCM-closure`         | `Γ_c^t` is HCM for `|t| ≥ 1`, HCM is closed under independent products, HCM ⇒ ID |
//! | `cm-product`          | products of completely monotone functions are completely monotone |
//! | `stable-law`          | the Cauchy law is stable, hence ID                               |

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::classify::{
    bounds_lu, classify_existence, classify_m, classify_two_param, Outcome, Verdict, TIE_TOL,
};
use crate::dists::{
    alpha_cauchy_abs_moment, alpha_cauchy_pdf, ks_distance, mellin_quadrature, moment_report,
    sample_alpha_cauchy, sample_beta, sample_gamma, sample_student, sample_sym_stable,
    sample_wright_m, sample_xabcd, sample_y, student_abs_moment, student_pdf,
    sym_stable_abs_moment, wright_m_pdf, xabcd_inverse_moment_quadrature, AlphaCauchyParams,
    GammaTypeParams, MomentReport, QuadratureCdf, SampleBatch,
};
use crate::gamma::{ln_gamma, ln_gamma_sign};
use crate::mellin::{self, compare, Comparison, MellinExpr};
use crate::quad::{integrate_zero_to, QuadOptions};
use crate::rational::{from_f64, to_f64, Rational};
use crate::specfun::{sign_scan, MLParams, SignScanReport};
use crate::{param_err, Error, Result};

pub const RULE_SYMMETRIC_Y: &str = "symmetric-times-Y";
pub const RULE_GAMMA2_MIXTURE: &str = "gamma2-mixture";
pub const RULE_HCM: &str = "HCM-closure";
pub const RULE_CM_PRODUCT: &str = "cm-product";
pub const RULE_STABLE: &str = "stable-law";

/// The rules a certified chain may cite.
pub const AXIOMS: [&str; 5] = [
    RULE_SYMMETRIC_Y,
    RULE_GAMMA2_MIXTURE,
    RULE_HCM,
    RULE_CM_PRODUCT,
    RULE_STABLE,
];

/// Tolerance of symbolic comparisons on the float constants.
pub const SYMBOLIC_TOL: f64 = 1e-11;
/// Relative agreement required between the two sides in quadrature mode.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Relative agreement of closed-form values when parameters are not rational.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// KS bound in Monte Carlo mode; small samples get the 0.1% critical value
/// instead when it is larger.
pub const KS_LIMIT: f64 = 0.01;
pub const Z_LIMIT: f64 = 4.0;

/// Range of the sign scan used for α-Cauchy certificates.
pub const SCAN_T_MAX: f64 = 200.0;
pub const SCAN_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Laws and factors
// ---------------------------------------------------------------------------

/// Positive laws that appear in factorization chains.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "dist", content = "params", rename_all = "kebab-case")
)]
pub enum Law {
    Gamma {
        c: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    WrightM {
        alpha: f64,
        beta: f64,
        t: f64,
    },
    Xabcd {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
    },
    /// Density `½(1+x)e^{−x}`.
    Y,
    CauchyAbs {
        alpha: f64,
    },
    /// `|Z|` for the symmetric stable `Z` with `E e^{iθZ} = e^{−|θ|^α}`.
    StableAbs {
        alpha: f64,
    },
    StudentAbs {
        nu: f64,
    },
}

/// Numeric Mellin value with its error estimate and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NumericMoment {
    pub value: f64,
    pub abs_err: f64,
    pub method: String,
}

fn finite_pos(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(param_err!("{what} must be positive, got {v}"))
    }
}

/// `ln Γ(x)` with its sign folded into a second return value.
fn lg(x: f64) -> (f64, f64) {
    ln_gamma_sign(x)
}

fn unit_interval_moment(a: f64, b: f64, s: f64) -> Result<NumericMoment> {
    // ∫_0^1 x^{s+a−1}(1−x)^{b−1} dx / B(a,b), split at 1/2
    let ln_b = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let opts = QuadOptions {
        max_panels: 2000,
        ..QuadOptions::rel(1e-11)
    };
    let left = integrate_zero_to(
        |x| ((s + a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp(),
        0.5,
        opts,
    );
    let right = integrate_zero_to(
        |y| ((s + a - 1.0) * (-y).ln_1p() + (b - 1.0) * y.ln() - ln_b).exp(),
        0.5,
        opts,
    );
    let value = left.value + right.value;
    let abs_err = left.abs_err + right.abs_err;
    if !(value.is_finite() && abs_err <= 1e-8 * value.abs()) {
        return Err(Error::NonConvergence(format!(
            "beta moment quadrature at s = {s}: error {abs_err}"
        )));
    }
    Ok(NumericMoment {
        value,
        abs_err,
        method: String::from("quadrature"),
    })
}

fn density_moment<F: FnMut(f64) -> f64>(pdf: F, s: f64) -> Result<NumericMoment> {
    let r = mellin_quadrature(pdf, s)?;
    Ok(NumericMoment {
        value: r.value,
        abs_err: r.abs_err,
        method: String::from("quadrature"),
    })
}

/// `x` as a rational with denominator at most 10⁶, accepted only when it
/// reproduces `x` to a few ulps. Looser matches would let independently
/// rounded parameters of one chain disagree symbolically.
fn exact(x: f64, what: &str) -> Result<Rational> {
    from_f64(x, 1_000_000)
        .filter(|r| (to_f64(r) - x).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0))
        .ok_or_else(|| param_err!("{what} = {x} is not a small-denominator rational"))
}

fn closed(value: f64) -> NumericMoment {
    NumericMoment {
        value,
        abs_err: 0.0,
        method: String::from("closed-form"),
    }
}

impl Law {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Law::Gamma { c } => finite_pos(c, "c"),
            Law::Beta { a, b } => finite_pos(a, "a").and(finite_pos(b, "b")),
            Law::WrightM { alpha, beta, t } => {
                if !((0.0..=1.0).contains(&alpha)
                    && beta.is_finite()
                    && beta >= 0.0
                    && t.is_finite()
                    && t > -1.0)
                {
                    return Err(param_err!("M law needs alpha in [0, 1], beta >= 0, t > -1"));
                }
                finite_pos(alpha * (1.0 + t) + beta, "alpha(1+t)+beta")
            }
            Law::Xabcd { a, b, c, d } => GammaTypeParams::new(a, b, c, d).map(|_| ()),
            Law::Y => Ok(()),
            Law::CauchyAbs { alpha } => AlphaCauchyParams::new(alpha).map(|_| ()),
            Law::StableAbs { alpha } => {
                if alpha > 0.0 && alpha <= 1.0 {
                    Ok(())
                } else {
                    Err(param_err!(
                        "half-stable law needs alpha in (0, 1], got {alpha}"
                    ))
                }
            }
            Law::StudentAbs { nu } => finite_pos(nu, "nu"),
        }
    }

    /// Mellin strip `(lo, hi)`; infinite ends are `±inf`.
    pub fn strip(&self) -> (f64, f64) {
        let inf = f64::INFINITY;
        match *self {
            Law::Gamma { c } => (-c, inf),
            Law::Beta { a, .. } => (-a, inf),
            Law::WrightM { alpha, beta, t } => {
                if alpha == 1.0 && beta == 0.0 {
                    (-inf, inf)
                } else {
                    (-1.0 - t, inf)
                }
            }
            Law::Xabcd { a, b, d, .. } => {
                if d > 0.0 {
                    (-a, b)
                } else {
                    (-b, a)
                }
            }
            Law::Y => (-1.0, inf),
            Law::CauchyAbs { alpha } => (-1.0, alpha - 1.0),
            Law::StableAbs { alpha } => (-1.0, alpha),
            Law::StudentAbs { nu } => (-1.0, nu),
        }
    }

    /// Exact Mellin expression; fails unless every parameter is a
    /// small-denominator rational.
    pub fn expr(&self) -> Result<MellinExpr> {
        match *self {
            Law::Gamma { c } => mellin::expr_gamma(exact(c, "c")?),
            Law::Beta { a, b } => mellin::expr_beta(exact(a, "a")?, exact(b, "b")?),
            Law::WrightM { alpha, beta, t } => {
                mellin::expr_m(exact(alpha, "alpha")?, exact(beta, "beta")?, exact(t, "t")?)
            }
            Law::Xabcd { a, b, c, d } => mellin::expr_x(
                exact(a, "a")?,
                exact(b, "b")?,
                exact(c, "c")?,
                exact(d, "d")?,
            ),
            Law::Y => Ok(mellin::expr_y()),
            Law::CauchyAbs { alpha } => mellin::expr_cauchy_abs(exact(alpha, "alpha")?),
            Law::StableAbs { alpha } => mellin::expr_stable_abs(exact(alpha, "alpha")?),
            Law::StudentAbs { nu } => mellin::expr_student_abs(exact(nu, "nu")?),
        }
    }

    /// Closed-form `E[L^s]` in floating point.
    pub fn moment(&self, s: f64) -> Result<f64> {
        self.validate()?;
        let (lo, hi) = self.strip();
        if !(s > lo && s < hi) {
            return Err(Error::Range(format!(
                "s = {s} lies outside the strip ({lo}, {hi}) of {}",
                self.label()
            )));
        }
        let ratio = |num: &[f64], den: &[f64], log_const: f64| {
            let mut acc = log_const;
            let mut sign = 1.0;
            for &x in num {
                let (l, sg) = lg(x);
                acc += l;
                sign *= sg;
            }
            for &x in den {
                let (l, sg) = lg(x);
                if sg == 0.0 {
                    return 0.0;
                }
                acc -= l;
                sign *= sg;
            }
            sign * acc.exp()
        };
        Ok(match *self {
            Law::Gamma { c } => ratio(&[c + s], &[c], 0.0),
            Law::Beta { a, b } => ratio(&[a + b, a + s], &[a, a + b + s], 0.0),
            Law::WrightM { alpha, beta, t } => {
                let k = alpha * (1.0 + t) + beta;
                ratio(&[k, 1.0 + t + s], &[1.0 + t, k + alpha * s], 0.0)
            }
            Law::Xabcd { a, b, c, d } => {
                if d > 0.0 {
                    ratio(&[c, a + s, b - s], &[a, b, c + d * s], 0.0)
                } else {
                    ratio(&[c, b - s, a + s], &[a, b, c - d * s], 0.0)
                }
            }
            Law::Y => ratio(&[s + 3.0, s + 1.0], &[s + 2.0], -LN_2),
            Law::CauchyAbs { alpha } => {
                alpha_cauchy_abs_moment(&AlphaCauchyParams::new(alpha)?, s)?
            }
            Law::StableAbs { alpha } => sym_stable_abs_moment(alpha, s)?,
            Law::StudentAbs { nu } => student_abs_moment(nu, s)?,
        })
    }

    /// Density on `(0, ∞)` where a cheap closed form exists.
    pub fn density(&self, x: f64) -> Option<f64> {
        if !(x > 0.0) {
            return Some(0.0);
        }
        match *self {
            Law::Gamma { c } => Some(((c - 1.0) * x.ln() - x - ln_gamma(c)).exp()),
            Law::Y => Some(0.5 * (1.0 + x) * (-x).exp()),
            Law::CauchyAbs { alpha } => AlphaCauchyParams::new(alpha)
                .ok()
                .map(|p| 2.0 * alpha_cauchy_pdf(&p, x)),
            Law::StudentAbs { nu } => Some(2.0 * student_pdf(nu, x)),
            _ => None,
        }
    }

    pub fn has_density(&self) -> bool {
        self.density(1.0).is_some()
    }

    /// `E[L^s]` integrated from a density, independently of the closed form.
    /// The half-stable law has no density here and reports its closed form.
    pub fn moment_quadrature(&self, s: f64) -> Result<NumericMoment> {
        self.validate()?;
        let (lo, hi) = self.strip();
        if !(s > lo && s < hi) {
            return Err(Error::Range(format!(
                "s = {s} lies outside the strip ({lo}, {hi}) of {}",
                self.label()
            )));
        }
        match *self {
            Law::Beta { a, b } => unit_interval_moment(a, b, s),
            Law::WrightM { alpha, beta, t } => {
                if alpha == 0.0 {
                    Law::Gamma { c: 1.0 + t }.moment_quadrature(s)
                } else if alpha == 1.0 {
                    // M_{1,β,t} = B_{1+t,β}, degenerate at 1 for β = 0
                    if beta == 0.0 {
                        Ok(closed(1.0))
                    } else {
                        unit_interval_moment(1.0 + t, beta, s)
                    }
                } else {
                    density_moment(|x| wright_m_pdf(alpha, beta, t, x).unwrap_or(f64::NAN), s)
                }
            }
            Law::Xabcd { a, b, c, d } => {
                let (p, s_inv) = if d > 0.0 {
                    (GammaTypeParams::new(a, b, c, d)?, -s)
                } else {
                    (GammaTypeParams::new(b, a, c, -d)?, s)
                };
                let r = xabcd_inverse_moment_quadrature(&p, s_inv)?;
                Ok(NumericMoment {
                    value: r.value,
                    abs_err: r.abs_err,
                    method: String::from("ml-quadrature"),
                })
            }
            Law::StableAbs { .. } => self.moment(s).map(closed),
            _ => {
                let law = *self;
                density_moment(|x| law.density(x).unwrap_or(f64::NAN), s)
            }
        }
    }

    /// `n` independent draws.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        self.validate()?;
        let abs = |b: SampleBatch| b.values.into_iter().map(f64::abs).collect();
        Ok(match *self {
            Law::Gamma { c } => sample_gamma(c, n, seed)?.values,
            Law::Beta { a, b } => sample_beta(a, b, n, seed)?.values,
            Law::WrightM { alpha, beta, t } => {
                if alpha == 0.0 {
                    sample_gamma(1.0 + t, n, seed)?.values
                } else if alpha == 1.0 {
                    if beta == 0.0 {
                        vec![1.0; n]
                    } else {
                        sample_beta(1.0 + t, beta, n, seed)?.values
                    }
                } else {
                    sample_wright_m(alpha, beta, t, n, seed)?.values
                }
            }
            Law::Xabcd { a, b, c, d } => {
                sample_xabcd(&GammaTypeParams::new(a, b, c, d)?, n, seed)?.values
            }
            Law::Y => sample_y(n, seed).values,
            Law::CauchyAbs { alpha } => abs(sample_alpha_cauchy(
                &AlphaCauchyParams::new(alpha)?,
                n,
                seed,
            )),
            Law::StableAbs { alpha } => abs(sample_sym_stable(alpha, n, seed)?),
            Law::StudentAbs { nu } => abs(sample_student(nu, n, seed)?),
        })
    }

    pub fn label(&self) -> String {
        match *self {
            Law::Gamma { c } => format!("Gamma_{{{c}}}"),
            Law::Beta { a, b } => format!("B_{{{a},{b}}}"),
            Law::WrightM { alpha, beta, t } => format!("M_{{{alpha},{beta},{t}}}"),
            Law::Xabcd { a, b, c, d } => format!("X_{{{a},{b},{c},{d}}}"),
            Law::Y => String::from("Y"),
            Law::CauchyAbs { alpha } => format!("|C_{{{alpha}}}|"),
            Law::StableAbs { alpha } => format!("|Z_{{{alpha},1/2}}|"),
            Law::StudentAbs { nu } => format!("|T_{{{nu}}}|"),
        }
    }
}

/// `scale · L^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Factor {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub law: Law,
    pub exponent: f64,
    pub scale: f64,
}

impl Factor {
    pub fn new(law: Law) -> Self {
        Factor {
            law,
            exponent: 1.0,
            scale: 1.0,
        }
    }

    pub fn pow(self, e: f64) -> Self {
        Factor {
            exponent: self.exponent * e,
            scale: self.scale.powf(e),
            ..self
        }
    }

    pub fn scaled(self, c: f64) -> Self {
        Factor {
            scale: self.scale * c,
            ..self
        }
    }

    pub fn strip(&self) -> (f64, f64) {
        let (lo, hi) = self.law.strip();
        let e = self.exponent;
        if e > 0.0 {
            (lo / e, hi / e)
        } else {
            (hi / e, lo / e)
        }
    }

    pub fn expr(&self) -> Result<MellinExpr> {
        let mut e = self.law.expr()?;
        if self.exponent != 1.0 {
            e = mellin::power(&e, exact(self.exponent, "exponent")?)?;
        }
        if self.scale != 1.0 {
            e = mellin::scale(&e, self.scale)?;
        }
        Ok(e)
    }

    pub fn moment(&self, s: f64) -> Result<f64> {
        Ok(self.scale.powf(s) * self.law.moment(self.exponent * s)?)
    }

    pub fn moment_quadrature(&self, s: f64) -> Result<NumericMoment> {
        let m = self.law.moment_quadrature(self.exponent * s)?;
        let c = self.scale.powf(s);
        Ok(NumericMoment {
            value: c * m.value,
            abs_err: c * m.abs_err,
            method: m.method,
        })
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let (e, c) = (self.exponent, self.scale);
        Ok(self
            .law
            .sample(n, seed)?
            .into_iter()
            .map(|v| c * v.powf(e))
            .collect())
    }

    pub fn label(&self) -> String {
        let mut out = self.law.label();
        if self.exponent != 1.0 {
            out = format!("{out}^{{{}}}", self.exponent);
        }
        if self.scale != 1.0 {
            out = format!("{} {out}", self.scale);
        }
        out
    }
}

fn intersect(strips: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    strips
        .into_iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(l, h), (a, b)| {
            (l.max(a), h.min(b))
        })
}

/// `n` interior points of a float strip, spread like
/// [`mellin::Strip::sample_points`].
fn strip_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo + 6.0),
        (false, true) => (hi - 6.0, hi),
        (false, false) => (-3.0, 3.0),
    };
    (0..n)
        .map(|i| l + (h - l) * (0.1 + 0.8 * (i as f64 + 0.5) / n as f64))
        .collect()
}

// ---------------------------------------------------------------------------
// Identity reports
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mode {
    /// Exact Mellin algebra.
    Symbolic,
    /// Both sides integrated numerically from densities.
    Quadrature,
    MonteCarlo,
    /// Float gamma ratios, used when parameters are not rational.
    ClosedForm,
}

impl core::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(Mode::Symbolic),
            "quadrature" => Ok(Mode::Quadrature),
            "monte-carlo" => Ok(Mode::MonteCarlo),
            "closed-form" => Ok(Mode::ClosedForm),
            _ => Err(param_err!(
                "unknown mode {s:?}; expected symbolic, quadrature, monte-carlo or closed-form"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PointCheck {
    pub s: f64,
    pub lhs: NumericMoment,
    pub rhs: NumericMoment,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KsCheck {
    pub statistic: f64,
    pub limit: f64,
    /// `"lhs-cdf"` (one sample against the quadrature CDF of the left side)
    /// or `"two-sample"`.
    pub against: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IdentityReport {
    pub identity: String,
    pub mode: Mode,
    pub lhs: Factor,
    pub rhs: Vec<Factor>,
    pub statement: String,
    /// Common Mellin strip of both sides.
    pub strip: [f64; 2],
    pub pass: bool,
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Option::is_none", default)
    )]
    pub comparison: Option<Comparison>,
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Vec::is_empty", default)
    )]
    pub points: Vec<PointCheck>,
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Option::is_none", default)
    )]
    pub ks: Option<KsCheck>,
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Vec::is_empty", default)
    )]
    pub moments: Vec<MomentReport>,
    pub n: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

fn statement(lhs: &Factor, rhs: &[Factor]) -> String {
    let r: Vec<String> = rhs.iter().map(Factor::label).collect();
    format!("{} = {}", lhs.label(), r.join(" x "))
}

fn report_base(name: &str, mode: Mode, lhs: &Factor, rhs: &[Factor]) -> IdentityReport {
    let (lo, hi) = intersect(core::iter::once(lhs.strip()).chain(rhs.iter().map(Factor::strip)));
    IdentityReport {
        identity: name.to_string(),
        mode,
        lhs: *lhs,
        rhs: rhs.to_vec(),
        statement: statement(lhs, rhs),
        strip: [lo, hi],
        pass: false,
        comparison: None,
        points: Vec::new(),
        ks: None,
        moments: Vec::new(),
        n: 0,
        seed: 0,
        notes: Vec::new(),
    }
}

fn symbolic_report(name: &str, lhs: &Factor, rhs: &[Factor]) -> Result<IdentityReport> {
    let le = lhs.expr()?;
    let exprs = rhs.iter().map(Factor::expr).collect::<Result<Vec<_>>>()?;
    let re = mellin::product_all(exprs.iter())?;
    let cmp = compare(&le, &re, SYMBOLIC_TOL)?;
    let mut r = report_base(name, Mode::Symbolic, lhs, rhs);
    r.pass = cmp.equal();
    r.comparison = Some(cmp);
    Ok(r)
}

fn point_report<F, G>(
    name: &str,
    mode: Mode,
    lhs: &Factor,
    rhs: &[Factor],
    tol: f64,
    mut fl: F,
    mut fr: G,
) -> Result<IdentityReport>
where
    F: FnMut(&Factor, f64) -> Result<NumericMoment>,
    G: FnMut(&Factor, f64) -> Result<NumericMoment>,
{
    let mut r = report_base(name, mode, lhs, rhs);
    let [lo, hi] = r.strip;
    if !(lo < hi) {
        return Err(Error::EmptyStrip);
    }
    let mut pass = true;
    for s in strip_points(lo, hi, 5) {
        let l = fl(lhs, s)?;
        let mut value = 1.0;
        let mut rel_err = 0.0;
        let mut methods: Vec<String> = Vec::new();
        for f in rhs {
            let m = fr(f, s)?;
            value *= m.value;
            rel_err += m.abs_err / m.value.abs();
            if !methods.contains(&m.method) {
                methods.push(m.method);
            }
        }
        let rhs_m = NumericMoment {
            value,
            abs_err: rel_err * value.abs(),
            method: methods.join("+"),
        };
        let rel_diff = (l.value - rhs_m.value).abs() / l.value.abs();
        pass &= rel_diff <= tol;
        r.points.push(PointCheck {
            s,
            lhs: l,
            rhs: rhs_m,
            rel_diff,
        });
    }
    r.pass = pass;
    Ok(r)
}

fn closed_form_report(name: &str, lhs: &Factor, rhs: &[Factor]) -> Result<IdentityReport> {
    let m = |f: &Factor, s: f64| f.moment(s).map(closed);
    point_report(name, Mode::ClosedForm, lhs, rhs, CLOSED_FORM_TOL, m, m)
}

fn quadrature_report(name: &str, lhs: &Factor, rhs: &[Factor]) -> Result<IdentityReport> {
    let m = |f: &Factor, s: f64| f.moment_quadrature(s);
    let mut r = point_report(name, Mode::Quadrature, lhs, rhs, QUADRATURE_TOL, m, m)?;
    if matches!(lhs.law, Law::StableAbs { .. }) {
        r.notes.push(String::from(
            "the left side has no density here; its closed form is used",
        ));
    }
    Ok(r)
}

/// Seed of the `i`-th right-hand factor: distinct streams even when a law
/// repeats.
fn factor_seed(seed: u64, i: usize) -> u64 {
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = if x[i] <= y[j] { x[i] } else { y[j] };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

fn monte_carlo_report(
    name: &str,
    lhs: &Factor,
    rhs: &[Factor],
    n: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if n < 100 {
        return Err(param_err!("monte-carlo mode needs n >= 100, got {n}"));
    }
    let mut r = report_base(name, Mode::MonteCarlo, lhs, rhs);
    r.n = n;
    r.seed = seed;
    let mut prod = vec![1.0; n];
    for (i, f) in rhs.iter().enumerate() {
        for (p, v) in prod.iter_mut().zip(f.sample(n, factor_seed(seed, i))?) {
            *p *= v;
        }
    }
    let nf = n as f64;
    let (ks, lhs_samples) = if lhs.law.has_density() {
        // compare L itself: undo the scale and power on the product
        let back: Vec<f64> = prod
            .iter()
            .map(|v| (v / lhs.scale).powf(1.0 / lhs.exponent))
            .collect();
        let law = lhs.law;
        let mut cdf = QuadratureCdf::new(move |x| law.density(x).unwrap_or(0.0), 0.0, 1.0);
        let batch = SampleBatch {
            values: back,
            seed,
            n,
            dist_tag: String::from("rhs"),
        };
        let stat = ks_distance(&batch, |x| cdf.cdf(x));
        (
            KsCheck {
                statistic: stat,
                limit: KS_LIMIT.max(1.95 / nf.sqrt()),
                against: String::from("lhs-cdf"),
            },
            None,
        )
    } else {
        let l = lhs.sample(n, seed)?;
        let stat = two_sample_ks(&l, &prod);
        (
            KsCheck {
                statistic: stat,
                limit: KS_LIMIT.max(1.95 / (nf / 2.0).sqrt()),
                against: String::from("two-sample"),
            },
            Some(l),
        )
    };
    let mut pass = ks.statistic < ks.limit;
    // moments with finite variance: 2s inside the strip
    let [lo, hi] = r.strip;
    for s in [0.25 * lo.max(-2.0), 0.25 * hi.min(2.0)] {
        let analytic = lhs.moment(s)?;
        let m = moment_report(&prod, s, analytic);
        pass &= m.z_score.abs() < Z_LIMIT;
        r.moments.push(m);
        if let Some(l) = &lhs_samples {
            let m = moment_report(l, s, analytic);
            pass &= m.z_score.abs() < Z_LIMIT;
            r.moments.push(m);
        }
    }
    r.ks = Some(ks);
    r.pass = pass;
    Ok(r)
}

/// Exact comparison when the parameters are rational, closed-form float
/// comparison otherwise.
fn soundness_report(name: &str, lhs: &Factor, rhs: &[Factor]) -> Result<IdentityReport> {
    match symbolic_report(name, lhs, rhs) {
        Err(Error::Parameter(msg)) => {
            let mut r = closed_form_report(name, lhs, rhs)?;
            r.notes.push(format!("symbolic mode unavailable: {msg}"));
            Ok(r)
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Identity registry
// ---------------------------------------------------------------------------

/// Registered identities and their parameter names.
pub const IDENTITIES: [(&str, &[&str]); 9] = [
    ("cauchy-gamma-ratio", &["alpha"]),
    ("cauchy-half-power", &["alpha", "q", "eps", "mu"]),
    ("cauchy-v-y", &["alpha"]),
    ("x-halving", &["a", "b", "c", "d"]),
    ("x-beta-extension", &["a", "b", "c", "d"]),
    ("x-m-gamma", &["a", "b", "c", "d"]),
    ("x-beta-gamma", &["a", "b", "c"]),
    ("half-stable-mixture", &["alpha"]),
    ("half-student-mixture", &["nu"]),
];

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySides {
    pub lhs: Factor,
    pub rhs: Vec<Factor>,
    pub notes: Vec<String>,
}

struct Params<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, key: &str) -> Result<f64> {
        let v = *self
            .map
            .get(key)
            .ok_or_else(|| param_err!("identity {} needs parameter {key}", self.name))?;
        if !v.is_finite() {
            return Err(param_err!("parameter {key} must be finite, got {v}"));
        }
        Ok(v)
    }
    fn opt(&self, key: &str) -> Result<Option<f64>> {
        if self.map.contains_key(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }
}

fn refuse(name: &str, why: String) -> Error {
    Error::Parameter(format!("identity {name} does not apply: {why}"))
}

/// Refuses when the classifier certifies that a right-hand `X` does not
/// exist; notes an undecided one.
fn x_exists_or_refuse(
    name: &str,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    notes: &mut Vec<String>,
) -> Result<()> {
    let v = classify_existence(&GammaTypeParams::new(a, b, c, d)?)?;
    match v.outcome {
        Outcome::Exists => Ok(()),
        Outcome::NotExists => Err(refuse(
            name,
            format!("X_{{{a},{b},{c},{d}}} does not exist (rule {})", v.rule),
        )),
        Outcome::Unknown => {
            notes.push(format!(
                "existence of X_{{{a},{b},{c},{d}}} is undecided by the classifier (rule {})",
                v.rule
            ));
            Ok(())
        }
    }
}

fn v_factor(alpha: f64) -> Factor {
    Factor::new(Law::Xabcd {
        a: 1.0 + 1.0 / alpha,
        b: 1.0 - 1.0 / alpha,
        c: 3.0,
        d: alpha,
    })
    .pow(1.0 / alpha)
}

/// `μ` default of the half-power decomposition: `f(2) = 3`, else `U(d)`.
fn u_threshold(d: f64) -> Result<f64> {
    if tie(d, 2.0) {
        Ok(3.0)
    } else {
        Ok(bounds_lu(d)?.u_val)
    }
}

/// Both sides of the half-power decomposition
/// `|C_α|^{ε qα/2} = X^{q/2}_{a,b,c',2/q} × Γ_{c'}`.
fn half_power_sides(alpha: f64, q: f64, eps: f64, mu: f64) -> (Factor, Factor, f64) {
    let d = 2.0 / q;
    let (a, b, shift) = if eps > 0.0 {
        (
            1.0 / alpha,
            1.0 - 1.0 / alpha,
            2.0 * (alpha - 1.0) / (q * alpha),
        )
    } else {
        (1.0 - 1.0 / alpha, 1.0 / alpha, 2.0 / (q * alpha))
    };
    let c = mu - shift;
    let target = Factor::new(Law::CauchyAbs { alpha }).pow(eps * q * alpha / 2.0);
    (
        target,
        Factor::new(Law::Xabcd { a, b, c, d }).pow(q / 2.0),
        c,
    )
}

/// Both sides of a registered identity at the given parameters. Parameters
/// outside the identity's validity region are refused with the violated
/// precondition.
pub fn identity_sides(name: &str, params: &BTreeMap<String, f64>) -> Result<IdentitySides> {
    let Some((_, keys)) = IDENTITIES.iter().find(|(n, _)| *n == name) else {
        let names: Vec<&str> = IDENTITIES.iter().map(|(n, _)| *n).collect();
        return Err(param_err!(
            "unknown identity {name:?}; registered: {}",
            names.join(", ")
        ));
    };
    if let Some(k) = params.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(param_err!(
            "identity {name} takes parameters {}, got {k}",
            keys.join(", ")
        ));
    }
    let p = Params { name, map: params };
    let mut notes = Vec::new();
    let sides = |lhs, rhs, notes| Ok(IdentitySides { lhs, rhs, notes });
    match name {
        "cauchy-gamma-ratio" => {
            let alpha = p.get("alpha")?;
            if !(alpha > 1.0) {
                return Err(refuse(name, format!("needs alpha > 1, got {alpha}")));
            }
            let rhs = vec![
                Factor::new(Law::Gamma { c: 1.0 / alpha }).pow(1.0 / alpha),
                Factor::new(Law::Gamma {
                    c: 1.0 - 1.0 / alpha,
                })
                .pow(-1.0 / alpha),
            ];
            sides(Factor::new(Law::CauchyAbs { alpha }), rhs, notes)
        }
        "cauchy-half-power" => {
            let (alpha, q, eps) = (p.get("alpha")?, p.get("q")?, p.get("eps")?);
            if !(alpha > 1.0) {
                return Err(refuse(name, format!("needs alpha > 1, got {alpha}")));
            }
            if !(q >= 1.0 && q < 2.0) {
                return Err(refuse(name, format!("needs q in [1, 2), got {q}")));
            }
            if eps != 1.0 && eps != -1.0 {
                return Err(refuse(name, format!("needs eps = +1 or -1, got {eps}")));
            }
            let mu = match p.opt("mu")? {
                Some(m) => m,
                None => u_threshold(2.0 / q)?,
            };
            let (target, x, c) = half_power_sides(alpha, q, eps, mu);
            if !(c > 0.0) {
                return Err(refuse(
                    name,
                    format!("the gamma index mu - shift = {c} must be positive"),
                ));
            }
            let Law::Xabcd { a, b, c, d } = x.law else {
                unreachable!()
            };
            x_exists_or_refuse(name, a, b, c, d, &mut notes)?;
            sides(target, vec![x, Factor::new(Law::Gamma { c })], notes)
        }
        "cauchy-v-y" => {
            let alpha = p.get("alpha")?;
            if !(alpha > 1.0 && alpha <= 2.0) {
                return Err(refuse(name, format!("needs alpha in (1, 2], got {alpha}")));
            }
            x_exists_or_refuse(
                name,
                1.0 + 1.0 / alpha,
                1.0 - 1.0 / alpha,
                3.0,
                alpha,
                &mut notes,
            )?;
            if alpha <= 1.2 {
                notes.push(String::from(
                    "for alpha <= 6/5, X exists since E_{alpha,1+alpha/2}(-t) >= 0 and products of completely monotone functions are completely monotone",
                ));
            }
            sides(
                Factor::new(Law::CauchyAbs { alpha }),
                vec![v_factor(alpha), Factor::new(Law::Y)],
                notes,
            )
        }
        "x-halving" => {
            let (a, b, c, d) = (p.get("a")?, p.get("b")?, p.get("c")?, p.get("d")?);
            GammaTypeParams::new(a, b, c, d)?;
            if !(d > 0.0 && d <= 2.0) {
                return Err(refuse(name, format!("needs 0 < d <= 2, got {d}")));
            }
            x_exists_or_refuse(name, a, b, 2.0 * c / d, 2.0, &mut notes)?;
            let rhs = vec![
                Factor::new(Law::Xabcd {
                    a,
                    b,
                    c: 2.0 * c / d,
                    d: 2.0,
                }),
                Factor::new(Law::WrightM {
                    alpha: d / 2.0,
                    beta: 0.0,
                    t: 2.0 * c / d - 1.0,
                })
                .pow(2.0),
            ];
            sides(Factor::new(Law::Xabcd { a, b, c, d }), rhs, notes)
        }
        "x-beta-extension" => {
            let (a, b, c, d) = (p.get("a")?, p.get("b")?, p.get("c")?, p.get("d")?);
            GammaTypeParams::new(a, b, c, d)?;
            if !(a + b < 1.0) {
                return Err(refuse(name, format!("needs a + b < 1, got {}", a + b)));
            }
            if !(d > 0.0) {
                return Err(refuse(name, format!("needs d > 0, got {d}")));
            }
            x_exists_or_refuse(name, a, 1.0 - a, c, d, &mut notes)?;
            let rhs = vec![
                Factor::new(Law::Xabcd {
                    a,
                    b: 1.0 - a,
                    c,
                    d,
                }),
                Factor::new(Law::Beta {
                    a: b,
                    b: 1.0 - a - b,
                })
                .pow(-1.0),
            ];
            sides(Factor::new(Law::Xabcd { a, b, c, d }), rhs, notes)
        }
        "x-m-gamma" => {
            let (a, b, c, d) = (p.get("a")?, p.get("b")?, p.get("c")?, p.get("d")?);
            GammaTypeParams::new(a, b, c, d)?;
            if !(d > 0.0 && d <= 1.0) {
                return Err(refuse(name, format!("needs 0 < d <= 1, got {d}")));
            }
            if !ge_tie(c, a * d) {
                return Err(refuse(
                    name,
                    format!("needs c >= ad, got c = {c} < {}", a * d),
                ));
            }
            let beta = (c - a * d).max(0.0);
            let rhs = vec![
                Factor::new(Law::WrightM {
                    alpha: d,
                    beta,
                    t: a - 1.0,
                }),
                Factor::new(Law::Gamma { c: b }).pow(-1.0),
            ];
            sides(Factor::new(Law::Xabcd { a, b, c, d }), rhs, notes)
        }
        "x-beta-gamma" => {
            let (a, b, c) = (p.get("a")?, p.get("b")?, p.get("c")?);
            GammaTypeParams::new(a, b, c, 1.0)?;
            if !(c > a) {
                return Err(refuse(name, format!("needs c > a, got c = {c}, a = {a}")));
            }
            let rhs = vec![
                Factor::new(Law::Beta { a, b: c - a }),
                Factor::new(Law::Gamma { c: b }).pow(-1.0),
            ];
            sides(Factor::new(Law::Xabcd { a, b, c, d: 1.0 }), rhs, notes)
        }
        "half-stable-mixture" => {
            let alpha = p.get("alpha")?;
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(refuse(name, format!("needs alpha in (0, 1], got {alpha}")));
            }
            sides(
                Factor::new(Law::StableAbs { alpha }),
                half_stable_chain(alpha),
                notes,
            )
        }
        "half-student-mixture" => {
            let nu = p.get("nu")?;
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(refuse(
                    name,
                    format!("needs nu in (0, 1], got {nu}; X_(1/2,nu/2,2,2) does not exist beyond"),
                ));
            }
            sides(
                Factor::new(Law::StudentAbs { nu }),
                half_student_chain(nu),
                notes,
            )
        }
        _ => unreachable!(),
    }
}

fn half_stable_chain(alpha: f64) -> Vec<Factor> {
    vec![
        Factor::new(Law::Gamma { c: 2.0 }),
        Factor::new(Law::Xabcd {
            a: 0.5,
            b: 0.5,
            c: 2.0,
            d: 2.0,
        })
        .pow(0.5),
        Factor::new(Law::WrightM {
            alpha,
            beta: 1.0 - alpha,
            t: 0.0,
        })
        .pow(-1.0 / alpha),
    ]
}

fn half_student_chain(nu: f64) -> Vec<Factor> {
    vec![
        Factor::new(Law::Gamma { c: 2.0 }).scaled(nu.sqrt()),
        Factor::new(Law::Xabcd {
            a: 0.5,
            b: 0.5 * nu,
            c: 2.0,
            d: 2.0,
        })
        .pow(0.5),
    ]
}

/// Checks a registered identity in the requested mode. `n` and `seed` are
/// used by Monte Carlo mode only.
pub fn verify_identity(
    name: &str,
    params: &BTreeMap<String, f64>,
    mode: Mode,
    n: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let sides = identity_sides(name, params)?;
    let mut r = match mode {
        Mode::Symbolic => symbolic_report(name, &sides.lhs, &sides.rhs)?,
        Mode::Quadrature => quadrature_report(name, &sides.lhs, &sides.rhs)?,
        Mode::MonteCarlo => monte_carlo_report(name, &sides.lhs, &sides.rhs, n, seed)?,
        Mode::ClosedForm => closed_form_report(name, &sides.lhs, &sides.rhs)?,
    };
    r.notes.extend(sides.notes);
    Ok(r)
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Status {
    #[cfg_attr(feature = "serde", serde(rename = "HCM"))]
    Hcm,
    #[cfg_attr(feature = "serde", serde(rename = "ID-certified"))]
    IdCertified,
    #[cfg_attr(feature = "serde", serde(rename = "numeric-supported"))]
    NumericSupported,
    #[cfg_attr(feature = "serde", serde(rename = "unknown"))]
    Unknown,
    #[cfg_attr(feature = "serde", serde(rename = "route-fails"))]
    RouteFails,
}

impl Status {
    /// HCM and ID-certified; both imply infinite divisibility.
    pub fn is_certified(&self) -> bool {
        matches!(self, Status::Hcm | Status::IdCertified)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum Report {
    /// A classifier verdict. `required` verdicts must be `Exists` for a
    /// certified status; the others document a route that was not taken.
    Membership {
        subject: String,
        required: bool,
        verdict: Verdict,
    },
    /// A closed-form inequality `lhs relation rhs`, with ties at [`TIE_TOL`].
    Gate {
        subject: String,
        lhs: f64,
        relation: String,
        rhs: f64,
        holds: bool,
        boundary: bool,
    },
    Identity(IdentityReport),
    Scan(SignScanReport),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub target: Factor,
    /// The certified variable is the symmetric law whose absolute value is
    /// `target`.
    pub symmetric: bool,
    pub status: Status,
    /// The factorization route was attempted and shown not to apply.
    pub route_failed: bool,
    pub chain: Vec<Factor>,
    pub rules: Vec<String>,
    pub reports: Vec<Report>,
    pub notes: Vec<String>,
}

fn tie(x: f64, y: f64) -> bool {
    (x - y).abs() <= TIE_TOL * x.abs().max(y.abs()).max(1.0)
}

fn ge_tie(x: f64, y: f64) -> bool {
    tie(x, y) || x > y
}

fn gate(subject: &str, lhs: f64, relation: &str, rhs: f64) -> Report {
    let boundary = tie(lhs, rhs);
    let holds = match relation {
        ">=" => boundary || lhs > rhs,
        "<=" => boundary || lhs < rhs,
        ">" => !boundary && lhs > rhs,
        _ => !boundary && lhs < rhs,
    };
    Report::Gate {
        subject: subject.to_string(),
        lhs,
        relation: relation.to_string(),
        rhs,
        holds,
        boundary,
    }
}

fn gate_holds(r: &Report) -> bool {
    matches!(r, Report::Gate { holds: true, .. })
}

impl Certificate {
    fn new(target: Factor, symmetric: bool) -> Self {
        Certificate {
            target,
            symmetric,
            status: Status::Unknown,
            route_failed: false,
            chain: Vec::new(),
            rules: Vec::new(),
            reports: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn attach_soundness(&mut self, name: &str) -> Result<()> {
        let r = soundness_report(name, &self.target, &self.chain)?;
        self.reports.push(Report::Identity(r));
        Ok(())
    }

    fn membership(&mut self, subject: &str, required: bool, verdict: Verdict) {
        self.reports.push(Report::Membership {
            subject: subject.to_string(),
            required,
            verdict,
        });
    }

    /// The structural invariants every emitted certificate satisfies.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |why: &str| {
            Err(Error::Consistency(format!(
                "certificate for {}: {why}",
                self.target.label()
            )))
        };
        for r in &self.reports {
            if let Report::Identity(i) = r {
                if !i.pass {
                    return fail("chain does not reproduce the target's Mellin transform");
                }
            }
        }
        match self.status {
            Status::Hcm | Status::IdCertified => {
                if self.rules.is_empty() || self.rules.iter().any(|r| !AXIOMS.contains(&r.as_str()))
                {
                    return fail("certified status cites a rule outside the axiom list");
                }
                for r in &self.reports {
                    match r {
                        Report::Membership {
                            required: true,
                            verdict,
                            ..
                        } if verdict.outcome != Outcome::Exists => {
                            return fail(
                                "certified status with a membership that is not certified Exists",
                            );
                        }
                        Report::Gate { holds: false, .. } => {
                            return fail("certified status with a failing gate")
                        }
                        Report::Scan(_) => return fail("certified status resting on a sign scan"),
                        _ => {}
                    }
                }
            }
            Status::NumericSupported => {
                if !self
                    .reports
                    .iter()
                    .any(|r| matches!(r, Report::Scan(s) if !s.negativity_found))
                {
                    return fail("numeric-supported without a clean sign scan");
                }
            }
            Status::Unknown | Status::RouteFails => {}
        }
        Ok(())
    }

    fn finish(self) -> Result<Self> {
        self.check_invariants()?;
        Ok(self)
    }
}

/// Infinite divisibility of the α-Cauchy law, `1 < α ≤ 2`, through
/// `C_α = V_α × Y` with `|V_α| = X_{1+1/α,1−1/α,3,α}^{1/α}`.
///
/// `α ≤ 6/5` is certified through `E_{α,1+α/2}(−t) ≥ 0`; `α = 2` is the
/// stable Cauchy law. In between, a sign scan of `E_{α,1+α/2}` can only
/// support the route numerically or show that it fails.
pub fn certify_alpha_cauchy(alpha: f64) -> Result<Certificate> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(param_err!(
            "certify_alpha_cauchy needs alpha in (1, 2], got {alpha}"
        ));
    }
    let mut cert = Certificate::new(Factor::new(Law::CauchyAbs { alpha }), true);
    if tie(alpha, 2.0) {
        let v = classify_existence(&GammaTypeParams::new(1.5, 0.5, 3.0, 2.0)?)?;
        cert.route_failed = v.outcome == Outcome::NotExists;
        cert.membership("|V_2| base X_{3/2,1/2,3,2}", false, v);
        cert.status = Status::IdCertified;
        cert.rules.push(RULE_STABLE.to_string());
        cert.notes.push(String::from(
            "C_2 is the Cauchy law, which is stable; V_2 does not exist since c = 3 < 3a+b = 5",
        ));
        return cert.finish();
    }
    let mu = 1.0 + alpha / 2.0;
    let g = gate("1+alpha/2 >= 4 alpha/3", mu, ">=", 4.0 * alpha / 3.0);
    let gate_ok = gate_holds(&g);
    cert.reports.push(g);
    cert.chain = vec![v_factor(alpha), Factor::new(Law::Y)];
    cert.attach_soundness("cauchy-v-y")?;
    let two = classify_two_param(alpha, mu)?;
    let outcome = two.outcome;
    cert.membership("E_{alpha,1+alpha/2}(-t) >= 0", true, two);
    match (gate_ok, outcome) {
        (true, Outcome::Exists) => {
            cert.status = Status::IdCertified;
            cert.rules = vec![RULE_CM_PRODUCT.to_string(), RULE_SYMMETRIC_Y.to_string()];
            cert.notes.push(String::from(
                "E_{alpha,1+alpha/2}(-t) >= 0 gives E^2_{alpha,2+alpha}(-t) >= 0 by products of completely monotone functions, so V_alpha exists",
            ));
        }
        (true, _) | (false, Outcome::Exists) => {
            return Err(Error::Consistency(format!(
                "alpha = {alpha}: closed-form gate and two-parameter classifier disagree"
            )));
        }
        (false, Outcome::NotExists) => {
            cert.status = Status::RouteFails;
            cert.route_failed = true;
            cert.notes.push(String::from("E_{alpha,1+alpha/2} takes negative values; this does not disprove infinite divisibility"));
        }
        (false, Outcome::Unknown) => {
            let scan = sign_scan(&MLParams::two(alpha, mu)?, SCAN_T_MAX, SCAN_TOL)?;
            if scan.certified {
                cert.status = Status::RouteFails;
                cert.route_failed = true;
                cert.notes.push(String::from(
                    "the scan certifies negative values of E_{alpha,1+alpha/2}; this does not disprove infinite divisibility",
                ));
            } else if !scan.negativity_found {
                cert.status = Status::NumericSupported;
                cert.notes.push(String::from(
                    "the scan found no negative values; this is evidence, not a proof",
                ));
            } else {
                cert.notes.push(String::from(
                    "the scan found negative values within the error estimate",
                ));
            }
            cert.reports.push(Report::Scan(scan));
        }
    }
    cert.finish()
}

/// Threshold on `p` above which `|C_α|^{εp}` is certified a Γ₂-mixture.
pub fn half_power_threshold(alpha: f64, eps: i8) -> f64 {
    match (eps > 0, alpha <= 2.0) {
        (true, true) => (alpha + 1.0) / 3.0,
        (true, false) => alpha / 2.0,
        (false, true) => alpha / 2.0,
        (false, false) => (2.0 * alpha - 1.0) / 3.0,
    }
}

/// Infinite divisibility of `|C_α|^{εp}`, `α > 1`, `p > 0`, `ε = ±1`.
///
/// `p ≥ α` is HCM. Below `α/2` there is no Γ₂-mixture. From the threshold
/// of [`half_power_threshold`] on, the decomposition
/// `|C_α|^{εqα/2} = X^{q/2}_{·,·,c',2/q} × Γ_{c'}` with `q = 2p/α` and `μ` at
/// the upper bound `U(2/q)` has `c' ≤ 2`, which makes the variable a
/// Γ₂-mixture.
pub fn certify_half_power(alpha: f64, p: f64, eps: i8) -> Result<Certificate> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(param_err!(
            "certify_half_power needs alpha > 1, got {alpha}"
        ));
    }
    finite_pos(p, "p")?;
    if eps != 1 && eps != -1 {
        return Err(param_err!("eps must be +1 or -1, got {eps}"));
    }
    let e = f64::from(eps);
    let mut cert = Certificate::new(Factor::new(Law::CauchyAbs { alpha }).pow(e * p), false);
    let hcm = gate("p >= alpha", p, ">=", alpha);
    if gate_holds(&hcm) {
        cert.reports.push(hcm);
        cert.status = Status::Hcm;
        cert.rules.push(RULE_HCM.to_string());
        cert.chain = vec![
            Factor::new(Law::Gamma { c: 1.0 / alpha }).pow(e * p / alpha),
            Factor::new(Law::Gamma {
                c: 1.0 - 1.0 / alpha,
            })
            .pow(-e * p / alpha),
        ];
        cert.attach_soundness("cauchy-gamma-ratio")?;
        return cert.finish();
    }
    let mix = gate("p >= alpha/2", p, ">=", alpha / 2.0);
    if !gate_holds(&mix) {
        cert.reports.push(mix);
        cert.notes.push(String::from(
            "p < alpha/2: the variable is not a Gamma_2-mixture",
        ));
        return cert.finish();
    }
    cert.reports.push(mix);
    let thr = half_power_threshold(alpha, eps);
    let g = gate("p >= threshold", p, ">=", thr);
    let above = gate_holds(&g);
    cert.reports.push(g);

    let q = 2.0 * p / alpha;
    let d = alpha / p;
    let mu = u_threshold(d)?;
    let (_, x, c) = half_power_sides(alpha, q, e, mu);
    let Law::Xabcd { a, b, .. } = x.law else {
        unreachable!()
    };
    let verdict = classify_existence(&GammaTypeParams::new(a, b, c, d)?)?;
    let x_ok = verdict.outcome == Outcome::Exists;
    cert.membership("X factor of the decomposition", true, verdict);
    let shape = gate("gamma index c' <= 2", c, "<=", 2.0);
    let shape_ok = gate_holds(&shape);
    cert.reports.push(shape);
    cert.notes
        .push(format!("q = {q}, mu = U(2/q) = {mu}, c' = {c}"));
    if above != (x_ok && shape_ok) {
        return Err(Error::Consistency(format!(
            "half power (alpha = {alpha}, p = {p}, eps = {eps}): threshold and decomposition gates disagree"
        )));
    }
    cert.chain = vec![x];
    if above {
        // Γ_{c'} = Γ_2 × B_{c',2−c'}
        if !tie(c, 2.0) {
            cert.chain.push(Factor::new(Law::Beta { a: c, b: 2.0 - c }));
        }
        cert.chain.push(Factor::new(Law::Gamma { c: 2.0 }));
        cert.status = Status::IdCertified;
        cert.rules.push(RULE_GAMMA2_MIXTURE.to_string());
    } else {
        cert.chain.push(Factor::new(Law::Gamma { c }));
        cert.notes.push(String::from(
            "p lies between alpha/2 and the sufficient threshold; the decomposition has c' > 2",
        ));
    }
    cert.attach_soundness("cauchy-half-power")?;
    cert.finish()
}

/// `|Z_{α,1/2}| = Γ_2 × X_{1/2,1/2,2,2}^{1/2} × M_{α,1−α}^{−1/α}`, `0 < α ≤ 1`.
pub fn certify_half_stable(alpha: f64) -> Result<Certificate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param_err!(
            "certify_half_stable needs alpha in (0, 1], got {alpha}"
        ));
    }
    let mut cert = Certificate::new(Factor::new(Law::StableAbs { alpha }), false);
    cert.chain = half_stable_chain(alpha);
    cert.membership(
        "X_{1/2,1/2,2,2}",
        true,
        classify_existence(&GammaTypeParams::new(0.5, 0.5, 2.0, 2.0)?)?,
    );
    cert.membership(
        "M_{alpha,1-alpha}",
        true,
        classify_m(alpha, 1.0 - alpha, 0.0)?,
    );
    cert.attach_soundness("half-stable-mixture")?;
    cert.status = Status::IdCertified;
    cert.rules.push(RULE_GAMMA2_MIXTURE.to_string());
    if tie(alpha, 1.0) {
        cert.notes.push(String::from(
            "|Z_{1,1/2}| is the half-Cauchy |C_2|; the Mellin strip is (-1, 1)",
        ));
    } else if tie(alpha, 0.5) {
        cert.notes.push(String::from(
            "|Z_{1/2,1/2}| has Mellin strip (-1, 1/2) while |C_2| has (-1, 1); the two laws differ",
        ));
    }
    cert.finish()
}

/// `|T_ν| = √ν Γ_2 × X_{1/2,ν/2,2,2}^{1/2}`, certified exactly when the `X`
/// factor exists, `ν ≤ 1`.
pub fn certify_half_student(nu: f64) -> Result<Certificate> {
    finite_pos(nu, "nu")?;
    let mut cert = Certificate::new(Factor::new(Law::StudentAbs { nu }), false);
    cert.chain = half_student_chain(nu);
    let g = gate("c = 2 >= 3a+b = 3/2+nu/2", 2.0, ">=", 1.5 + 0.5 * nu);
    let gate_ok = gate_holds(&g);
    cert.reports.push(g);
    let v = classify_existence(&GammaTypeParams::new(0.5, 0.5 * nu, 2.0, 2.0)?)?;
    let exists = v.outcome == Outcome::Exists;
    cert.membership("X_{1/2,nu/2,2,2}", true, v);
    if exists != gate_ok {
        return Err(Error::Consistency(format!(
            "nu = {nu}: gate and existence classifier disagree"
        )));
    }
    cert.attach_soundness("half-student-mixture")?;
    if exists {
        cert.status = Status::IdCertified;
        cert.rules.push(RULE_GAMMA2_MIXTURE.to_string());
        if tie(nu, 1.0) {
            cert.notes
                .push(String::from("|T_1| is the half-Cauchy |C_2|"));
        }
    } else {
        cert.route_failed = true;
        cert.notes.push(String::from(
            "route fails: X_{1/2,nu/2,2,2} does not exist for nu > 1; the case stays open",
        ));
    }
    cert.finish()
}
