//! Existence of `X_{a,b,c,d}`, membership of `(ρ, μ)` in the non-negativity
//! domain `D` of `E_{ρ,μ}`, and non-negativity of `E^γ_{ρ,μ}` on the negative
//! half line.
//!
//! The boundary function `f` of `D` is unknown in closed form. It is only
//! used through the certified bounds `L(ρ) < f(ρ) < U(ρ)` and the exact values
//! `f(1) = 1`, `f(2) = 3`; parameters between the bounds get an
//! [`Outcome::Unknown`] verdict carrying the threshold band.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::dists::GammaTypeParams;
use crate::mellin::janson_gate;
use crate::specfun::{sign_scan, MLParams, SignScanReport};
use crate::{param_err, Error, Result};

/// Relative tolerance under which two sides of an inequality count as equal.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Outcome {
    /// The variable exists, or the function is non-negative / `(ρ, μ) ∈ D`.
    Exists,
    /// The variable does not exist, or the function takes negative values.
    NotExists,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub outcome: Outcome,
    /// Identifier of the rule that decided, e.g. `"I.2"`, `"II.3"`, `"f-band"`.
    pub rule: String,
    /// Threshold interval `[lo, hi]`; present exactly for `rule == "f-band"`.
    #[cfg_attr(
        feature = "serde",
        serde(skip_serializing_if = "Option::is_none", default)
    )]
    pub band: Option<[f64; 2]>,
    /// Some inequality of the deciding rule held with equality up to [`TIE_TOL`].
    pub boundary: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl Verdict {
    fn new(outcome: Outcome, rule: &str, ties: Ties, inputs: &[(&str, f64)]) -> Self {
        Verdict {
            outcome,
            rule: rule.to_string(),
            band: None,
            boundary: ties.0,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn with_band(mut self, lo: f64, hi: f64) -> Self {
        self.band = Some([lo, hi]);
        self
    }

    pub fn is_certified(&self) -> bool {
        self.outcome != Outcome::Unknown
    }
}

/// Inequalities with the tie convention: sides within [`TIE_TOL`] are equal,
/// so `<` fails and `≥` holds. Records whether a tie was hit.
#[derive(Debug, Clone, Copy, Default)]
struct Ties(bool);

impl Ties {
    fn tie(&mut self, x: f64, y: f64) -> bool {
        let t = (x - y).abs() <= TIE_TOL * x.abs().max(y.abs()).max(1.0);
        self.0 |= t;
        t
    }
    fn ge(&mut self, x: f64, y: f64) -> bool {
        self.tie(x, y) || x > y
    }
    fn lt(&mut self, x: f64, y: f64) -> bool {
        !self.ge(x, y)
    }
    fn le(&mut self, x: f64, y: f64) -> bool {
        self.tie(x, y) || x < y
    }
    fn gt(&mut self, x: f64, y: f64) -> bool {
        !self.le(x, y)
    }
    fn eq(&mut self, x: f64, y: f64) -> bool {
        self.tie(x, y)
    }
}

/// Runs `cond` on fresh tie bookkeeping and returns it when the rule fires.
fn rule(cond: impl FnOnce(&mut Ties) -> bool) -> Option<Ties> {
    let mut t = Ties::default();
    cond(&mut t).then_some(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainBounds {
    pub rho: f64,
    pub l_val: f64,
    pub u_val: f64,
}

/// `L(ρ)` and `U(ρ)` for `1 < ρ < 2`, branch split at `ρ = 3/2`.
pub fn bounds_lu(rho: f64) -> Result<DomainBounds> {
    if !(rho > 1.0 && rho < 2.0) {
        return Err(param_err!("L and U are defined for 1 < rho < 2, got {rho}"));
    }
    let (l_val, u_val) = if rho < 1.5 {
        let cot = 1.0 / (PI * (1.0 - 1.0 / rho)).tan();
        (rho + (-PI * cot).exp(), 4.0 * rho / 3.0)
    } else {
        (
            3.0 * (rho - 1.0) + 0.7 * (2.0 - rho) * (2.0 - rho),
            2.0 * rho - 1.0,
        )
    };
    Ok(DomainBounds { rho, l_val, u_val })
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(param_err!("{name} must be positive, got {v}"))
    }
}

/// Membership of `(ρ, μ)` in `D = {(ρ, μ) : E_{ρ,μ}(−t) ≥ 0 ∀t > 0}`.
pub fn classify_two_param(rho: f64, mu: f64) -> Result<Verdict> {
    positive(rho, "rho")?;
    positive(mu, "mu")?;
    let inputs = [("rho", rho), ("mu", mu)];
    let v = |o, r, t| Ok(Verdict::new(o, r, t, &inputs));
    if let Some(t) = rule(|t| t.lt(mu, rho)) {
        return v(Outcome::NotExists, "mu<rho", t);
    }
    if let Some(t) = rule(|t| t.gt(rho, 2.0)) {
        return v(Outcome::NotExists, "rho>2", t);
    }
    // μ ≥ ρ from here on
    if let Some(t) = rule(|t| t.le(rho, 1.0)) {
        return v(Outcome::Exists, "rho<=1,mu>=rho", t);
    }
    let mut t2 = Ties::default();
    if t2.eq(rho, 2.0) {
        return if let Some(t) = rule(|t| t.ge(mu, 3.0)) {
            v(Outcome::Exists, "rho=2,mu>=3", Ties(t.0 | t2.0))
        } else {
            v(Outcome::NotExists, "rho=2,mu<3", t2)
        };
    }
    let b = bounds_lu(rho)?;
    if let Some(t) = rule(|t| t.ge(mu, b.u_val)) {
        return v(Outcome::Exists, "U-bound", t);
    }
    if let Some(t) = rule(|t| t.le(mu, b.l_val)) {
        return v(Outcome::NotExists, "L-bound", t);
    }
    Ok(
        Verdict::new(Outcome::Unknown, "f-band", Ties::default(), &inputs)
            .with_band(b.l_val, b.u_val),
    )
}

/// Smallest `c` meeting the sufficient pair `2c/d ≥ 3a+b`,
/// `2(c/d − a)(c/d + 1/2 − a) ≥ a+b`.
fn sufficient_pair_threshold(a: f64, b: f64, d: f64) -> f64 {
    // y = c/d − a solves 2y(y + 1/2) = a + b
    let y = 0.5 * (-0.5 + (0.25 + 2.0 * (a + b)).sqrt());
    d * (0.5 * (3.0 * a + b)).max(a + y)
}

/// Existence of `X_{a,b,c,d}` with `E[X^s] ∝ Γ(a+s)Γ(b−s)/Γ(c+ds)`.
///
/// Rules in order: `I.1` d > 2, `I.2` c < ad, `I.3` d = 2 and 3a+b > c,
/// `II.1` d ≤ 1 and c ≥ ad, `d2-iff` d = 2 and a+b ≥ 1, `II.3` the
/// sufficient pair, then `I.4`/`II.2` through `L`/`U` (exact at d = 2).
/// `d < 0` is decided on `X_{b,a,c,−d}`, the reciprocal.
///
/// An `Exists` verdict whose Mellin transform fails the Janson condition is
/// reported as [`Error::Consistency`].
pub fn classify_existence(p: &GammaTypeParams) -> Result<Verdict> {
    p.validate()?;
    if p.d < 0.0 {
        let q = GammaTypeParams {
            a: p.b,
            b: p.a,
            c: p.c,
            d: -p.d,
        };
        let mut v = classify_existence(&q)?;
        v.rule = format!("inversion/{}", v.rule);
        v.inputs = inputs_x(p);
        return Ok(v);
    }
    let v = existence_rules(p)?;
    if v.outcome == Outcome::Exists {
        janson_consistency(p)?;
    }
    Ok(v)
}

fn inputs_x(p: &GammaTypeParams) -> BTreeMap<String, f64> {
    [("a", p.a), ("b", p.b), ("c", p.c), ("d", p.d)]
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

fn existence_rules(p: &GammaTypeParams) -> Result<Verdict> {
    let GammaTypeParams { a, b, c, d } = *p;
    let inputs = [("a", a), ("b", b), ("c", c), ("d", d)];
    let v = |o, r, t| Ok(Verdict::new(o, r, t, &inputs));
    let d_is_2 = |t: &mut Ties| t.eq(d, 2.0);
    if let Some(t) = rule(|t| t.gt(d, 2.0)) {
        return v(Outcome::NotExists, "I.1", t);
    }
    if let Some(t) = rule(|t| t.lt(c, a * d)) {
        return v(Outcome::NotExists, "I.2", t);
    }
    if let Some(t) = rule(|t| d_is_2(t) && t.gt(3.0 * a + b, c)) {
        return v(Outcome::NotExists, "I.3", t);
    }
    if let Some(t) = rule(|t| t.le(d, 1.0) && t.ge(c, a * d)) {
        return v(Outcome::Exists, "II.1", t);
    }
    // c ≥ 3a + b holds here since I.3 did not fire
    if let Some(t) = rule(|t| d_is_2(t) && t.ge(a + b, 1.0)) {
        return v(Outcome::Exists, "d2-iff", t);
    }
    if let Some(t) = rule(|t| {
        let r = c / d;
        t.ge(2.0 * r, 3.0 * a + b) && t.ge(2.0 * (r - a) * (r + 0.5 - a), a + b)
    }) {
        return v(Outcome::Exists, "II.3", t);
    }
    if let Some(t0) = rule(d_is_2) {
        // f(2) = 3 exactly; a + b < 1 here, so only II.2 can still fire
        if let Some(t) = rule(|t| t.ge(c, 2.0 * a + 1.0)) {
            return v(Outcome::Exists, "II.2", Ties(t.0 | t0.0));
        }
        return v(Outcome::Unknown, "open", t0);
    }
    let bd = bounds_lu(d)?;
    let lo = a * d - d + bd.l_val;
    let hi = a * d - d + bd.u_val;
    if let Some(t) = rule(|t| t.ge(a + b, 1.0) && t.lt(c, lo)) {
        return v(Outcome::NotExists, "I.4", t);
    }
    if let Some(t) = rule(|t| t.le(a + b, 1.0) && t.ge(c, hi)) {
        return v(Outcome::Exists, "II.2", t);
    }
    let hi = hi.min(sufficient_pair_threshold(a, b, d)).max(lo);
    Ok(Verdict::new(Outcome::Unknown, "f-band", Ties::default(), &inputs).with_band(lo, hi))
}

/// Janson's necessary condition on the Mellin transform: `γ > 0`, or `γ = 0`
/// and `δ ≤ 0`, with `γ = 2 − |d|`, `δ = a + b − c − 1/2`.
fn janson_consistency(p: &GammaTypeParams) -> Result<()> {
    let passes = match p.expr() {
        Ok(e) => janson_gate(&e).passes,
        // not representable with small denominators: same sums in floating point
        Err(_) => {
            let mut t = Ties::default();
            let g = 2.0 - p.d.abs();
            let delta = p.a + p.b - p.c - 0.5;
            if t.eq(g, 0.0) {
                t.le(delta, 0.0)
            } else {
                g > 0.0
            }
        }
    };
    if passes {
        Ok(())
    } else {
        Err(Error::Consistency(format!(
            "existence verdict for {p:?} violates the Janson condition"
        )))
    }
}

/// Sign of `E^γ_{ρ,μ}(−t)` on `t > 0`: `Exists` means non-negative,
/// `NotExists` means negative values occur.
///
/// Same rule set as [`classify_existence`] under `ρ = d`, `μ = c + bd`,
/// `γ = a + b`.
pub fn classify_ml_nonneg(p: &MLParams) -> Result<Verdict> {
    p.validate()?;
    let MLParams { rho, mu, gamma } = *p;
    let inputs = [("rho", rho), ("mu", mu), ("gamma", gamma)];
    let v = |o, r, t| Ok(Verdict::new(o, r, t, &inputs));
    let rho_is_2 = |t: &mut Ties| t.eq(rho, 2.0);
    if let Some(t) = rule(|t| t.gt(rho, 2.0)) {
        return v(Outcome::NotExists, "I.1", t);
    }
    if let Some(t) = rule(|t| t.lt(mu, gamma * rho)) {
        return v(Outcome::NotExists, "I.2", t);
    }
    if let Some(t) = rule(|t| rho_is_2(t) && t.lt(mu, 3.0 * gamma)) {
        return v(Outcome::NotExists, "I.3", t);
    }
    if let Some(t) = rule(|t| t.le(rho, 1.0) && t.ge(mu, rho * gamma)) {
        return v(Outcome::Exists, "II.1", t);
    }
    if let Some(t) = rule(|t| rho_is_2(t) && t.ge(gamma, 1.0)) {
        return v(Outcome::Exists, "d2-iff", t);
    }
    if let Some(t) = rule(|t| {
        let r = mu / rho;
        t.ge(2.0 * mu, 3.0 * gamma * rho) && t.ge(2.0 * (r - gamma) * (r - gamma + 0.5), gamma)
    }) {
        return v(Outcome::Exists, "II.3", t);
    }
    if let Some(t0) = rule(rho_is_2) {
        if let Some(t) = rule(|t| t.ge(mu, 2.0 * gamma + 1.0)) {
            return v(Outcome::Exists, "II.2", Ties(t.0 | t0.0));
        }
        return v(Outcome::Unknown, "open", t0);
    }
    let bd = bounds_lu(rho)?;
    let lo = gamma * rho - rho + bd.l_val;
    let hi = gamma * rho - rho + bd.u_val;
    if let Some(t) = rule(|t| t.ge(gamma, 1.0) && t.lt(mu, lo)) {
        return v(Outcome::NotExists, "I.4", t);
    }
    if let Some(t) = rule(|t| t.le(gamma, 1.0) && t.ge(mu, hi)) {
        return v(Outcome::Exists, "II.2", t);
    }
    // the sufficient pair in terms of μ: μ ≥ ρ·max(3γ/2, γ + y), 2y(y + 1/2) = γ
    let y = 0.5 * (-0.5 + (0.25 + 2.0 * gamma).sqrt());
    let hi = hi.min(rho * (1.5 * gamma).max(gamma + y)).max(lo);
    Ok(Verdict::new(Outcome::Unknown, "f-band", Ties::default(), &inputs).with_band(lo, hi))
}

/// Existence verdict with the two cross-checks through the ML mapping
/// `ρ = d`, `μ = c + bd`, `γ = a + b`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCheck {
    pub existence: Verdict,
    pub ml_params: MLParams,
    pub ml_nonneg: Verdict,
    /// `None` when the scan itself failed to evaluate.
    pub scan: Option<SignScanReport>,
}

/// Runs [`classify_existence`], [`classify_ml_nonneg`] on the mapped
/// parameters and a [`sign_scan`] up to `t_max`.
///
/// Certified verdicts that disagree, or a certified negative scan against a
/// certified `Exists`, are [`Error::Consistency`]. `d < 0` is checked on the
/// reciprocal `X_{b,a,c,−d}`.
pub fn cross_check(p: &GammaTypeParams, t_max: f64) -> Result<CrossCheck> {
    let existence = classify_existence(p)?;
    let q = if p.d < 0.0 {
        GammaTypeParams {
            a: p.b,
            b: p.a,
            c: p.c,
            d: -p.d,
        }
    } else {
        *p
    };
    let ml_params = MLParams::new(q.d, q.c + q.b * q.d, q.a + q.b)?;
    let ml_nonneg = classify_ml_nonneg(&ml_params)?;
    if existence.is_certified()
        && ml_nonneg.is_certified()
        && existence.outcome != ml_nonneg.outcome
    {
        return Err(Error::Consistency(format!(
            "{p:?}: existence rule {} and ML rule {} disagree",
            existence.rule, ml_nonneg.rule
        )));
    }
    let scan = sign_scan(&ml_params, t_max, 1e-10).ok();
    if let Some(s) = &scan {
        let claims_nonneg =
            existence.outcome == Outcome::Exists || ml_nonneg.outcome == Outcome::Exists;
        if s.certified && claims_nonneg {
            return Err(Error::Consistency(format!(
                "{p:?}: certified negative value {} at t = {} contradicts rule {}",
                s.min_value, s.argmin, existence.rule
            )));
        }
    }
    Ok(CrossCheck {
        existence,
        ml_params,
        ml_nonneg,
        scan,
    })
}

/// Existence of `M_{α,β,t}`, `t > −1`: exactly for `α ∈ [0, 1]`, `β ≥ 0`.
pub fn classify_m(alpha: f64, beta: f64, t: f64) -> Result<Verdict> {
    if !(alpha.is_finite() && beta.is_finite() && t.is_finite() && t > -1.0) {
        return Err(param_err!("M law needs finite parameters and t > -1"));
    }
    let inputs = [("alpha", alpha), ("beta", beta), ("t", t)];
    let mut ties = Ties::default();
    let ok = ties.ge(alpha, 0.0) && ties.le(alpha, 1.0) && ties.ge(beta, 0.0);
    let outcome = if ok {
        Outcome::Exists
    } else {
        Outcome::NotExists
    };
    Ok(Verdict::new(outcome, "M-iff", ties, &inputs))
}

/// Existence of the law with `E[D^s] ∝ Γ(a+s)Γ(b−s)/(Γ(c+s)Γ(d+s))`.
pub fn ksw_d_exists(a: f64, b: f64, c: f64, d: f64) -> Result<Verdict> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
        positive(v, name)?;
    }
    let inputs = [("a", a), ("b", b), ("c", c), ("d", d)];
    let v = |o, r, t| Ok(Verdict::new(o, r, t, &inputs));
    if let Some(t) = rule(|t| t.lt(c + d, 3.0 * a + b + 0.5) || t.le(c.min(d), a)) {
        return v(Outcome::NotExists, "KSW(b)", t);
    }
    if let Some(t) = rule(|t| {
        t.gt(c, a)
            && t.gt(d, a)
            && t.ge(c + d, 3.0 * a + b + 0.5)
            && t.ge(2.0 * (c - a) * (d - a), a + b)
    }) {
        return v(Outcome::Exists, "KSW(a)", t);
    }
    v(Outcome::Unknown, "KSW-gap", Ties::default())
}

/// One cell of a classification grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionCell {
    pub rho: f64,
    pub mu: f64,
    pub gamma: Option<f64>,
    pub verdict: Verdict,
    /// Minimum of `E(−t)` found by a sign scan; only for `Unknown` verdicts
    /// (numeric-only evidence).
    pub numeric_min: Option<f64>,
    pub numeric_negative: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub step: f64,
    pub gamma: Option<f64>,
    /// Scan range for `Unknown` cells.
    pub scan_t_max: f64,
}

impl RegionSpec {
    pub fn validate(&self) -> Result<()> {
        positive(self.step, "step")?;
        positive(self.rho_min, "rho_min")?;
        positive(self.mu_min, "mu_min")?;
        positive(self.scan_t_max, "scan_t_max")?;
        if let Some(g) = self.gamma {
            positive(g, "gamma")?;
        }
        if !(self.rho_max >= self.rho_min && self.mu_max >= self.mu_min) {
            return Err(param_err!("empty range"));
        }
        Ok(())
    }

    pub fn rho_axis(&self) -> Vec<f64> {
        axis(self.rho_min, self.rho_max, self.step)
    }

    pub fn mu_axis(&self) -> Vec<f64> {
        axis(self.mu_min, self.mu_max, self.step)
    }
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

pub fn region_cell(rho: f64, mu: f64, gamma: Option<f64>, scan_t_max: f64) -> Result<RegionCell> {
    let verdict = match gamma {
        None => classify_two_param(rho, mu)?,
        Some(g) => classify_ml_nonneg(&MLParams::new(rho, mu, g)?)?,
    };
    let (numeric_min, numeric_negative) = if verdict.outcome == Outcome::Unknown {
        match sign_scan(
            &MLParams::new(rho, mu, gamma.unwrap_or(1.0))?,
            scan_t_max,
            1e-10,
        ) {
            Ok(r) => (Some(r.min_value), Some(r.certified)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    Ok(RegionCell {
        rho,
        mu,
        gamma,
        verdict,
        numeric_min,
        numeric_negative,
    })
}

/// One row (fixed `ρ`) of [`region_map`].
pub fn region_row(spec: &RegionSpec, rho: f64) -> Result<Vec<RegionCell>> {
    spec.mu_axis()
        .into_iter()
        .map(|mu| region_cell(rho, mu, spec.gamma, spec.scan_t_max))
        .collect()
}

/// Row-major grid over `ρ` (rows) and `μ` (columns).
pub fn region_map(spec: &RegionSpec) -> Result<Vec<Vec<RegionCell>>> {
    spec.validate()?;
    spec.rho_axis()
        .into_iter()
        .map(|rho| region_row(spec, rho))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn m_family_existence() {
        for (a, b) in [(0.5, 0.5), (1.0, 0.0), (0.0, 2.0)] {
            assert_eq!(classify_m(a, b, 0.0).unwrap().outcome, Outcome::Exists);
        }
        for (a, b) in [(1.2, 0.0), (0.5, -0.1)] {
            assert_eq!(classify_m(a, b, 0.0).unwrap().outcome, Outcome::NotExists);
        }
        assert!(classify_m(1.0, 0.0, 0.0).unwrap().boundary);
        assert!(classify_m(0.5, 0.5, -1.0).is_err());
    }

    fn x(a: f64, b: f64, c: f64, d: f64) -> Verdict {
        classify_existence(&GammaTypeParams::new(a, b, c, d).unwrap()).unwrap()
    }

    #[test]
    fn bounds_values() {
        let b = bounds_lu(1.2).unwrap();
        assert_relative_eq!(b.u_val, 1.6, max_relative = 1e-15);
        assert_relative_eq!(
            b.l_val,
            1.2 + (-PI * 3f64.sqrt()).exp(),
            max_relative = 1e-14
        );
        assert_relative_eq!(b.l_val, 1.2043334205, epsilon = 1e-10);
        let b = bounds_lu(1.5).unwrap();
        assert_relative_eq!(b.l_val, 1.675, max_relative = 1e-15);
        assert_relative_eq!(b.u_val, 2.0, max_relative = 1e-15);
        let b = bounds_lu(1.8).unwrap();
        assert_relative_eq!(b.l_val, 2.428, max_relative = 1e-14);
        assert_relative_eq!(b.u_val, 2.6, max_relative = 1e-14);
        assert!(bounds_lu(1.0).is_err());
        assert!(bounds_lu(2.0).is_err());
    }

    #[test]
    fn bounds_are_ordered() {
        // below ρ ≈ 1.03 the excess e^{−π cot(π(1−1/ρ))} is lost against ρ
        for i in 6..200 {
            let rho = 1.0 + i as f64 / 200.0;
            let b = bounds_lu(rho).unwrap();
            assert!(
                rho < b.l_val && b.l_val < b.u_val && b.u_val < 1.5 * rho,
                "{b:?}"
            );
        }
    }

    #[test]
    fn two_param_examples() {
        let v = classify_two_param(0.8, 0.9).unwrap();
        assert_eq!(
            (v.outcome, v.rule.as_str()),
            (Outcome::Exists, "rho<=1,mu>=rho")
        );
        let v = classify_two_param(1.2, 1.6).unwrap();
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::Exists, "U-bound"));
        assert!(v.boundary);
        let v = classify_two_param(1.8, 2.0).unwrap();
        assert_eq!(
            (v.outcome, v.rule.as_str()),
            (Outcome::NotExists, "L-bound")
        );
        let v = classify_two_param(2.0, 2.9).unwrap();
        assert_eq!(
            (v.outcome, v.rule.as_str()),
            (Outcome::NotExists, "rho=2,mu<3")
        );
        assert_eq!(
            classify_two_param(2.0, 3.0).unwrap().outcome,
            Outcome::Exists
        );
        assert_eq!(classify_two_param(2.5, 100.0).unwrap().rule, "rho>2");
        assert_eq!(classify_two_param(0.5, 0.4).unwrap().rule, "mu<rho");
        let v = classify_two_param(1.5, 1.8).unwrap();
        assert_eq!(v.outcome, Outcome::Unknown);
        let [lo, hi] = v.band.unwrap();
        assert_relative_eq!(lo, 1.675, max_relative = 1e-15);
        assert_relative_eq!(hi, 2.0, max_relative = 1e-15);
        assert!(classify_two_param(0.0, 1.0).is_err());
    }

    #[test]
    fn existence_examples() {
        let cases = [
            ((1.0, 1.0, 1.0, 3.0), Outcome::NotExists, "I.1"),
            ((0.5, 0.5, 2.0, 2.0), Outcome::Exists, "d2-iff"),
            ((1.0, 0.5, 0.8, 1.0), Outcome::NotExists, "I.2"),
            ((0.5, 0.5, 0.6, 1.0), Outcome::Exists, "II.1"),
            ((0.25, 0.25, 1.5, 1.5), Outcome::Exists, "II.3"),
            ((0.6, 0.6, 1.0, 1.5), Outcome::NotExists, "I.4"),
            ((0.3, 0.3, 0.5, 1.5), Outcome::Unknown, "f-band"),
        ];
        for ((a, b, c, d), o, r) in cases {
            let v = x(a, b, c, d);
            assert_eq!((v.outcome, v.rule.as_str()), (o, r), "{a} {b} {c} {d}");
            assert_eq!(v.band.is_some(), r == "f-band");
        }
        let [lo, hi] = x(0.3, 0.3, 0.5, 1.5).band.unwrap();
        assert_relative_eq!(lo, 0.625, max_relative = 1e-14);
        assert_relative_eq!(hi, 0.95, max_relative = 1e-14);
    }

    #[test]
    fn negative_d_goes_through_inversion() {
        let v = x(0.5, 0.5, 2.0, -2.0);
        assert_eq!(
            (v.outcome, v.rule.as_str()),
            (Outcome::Exists, "inversion/d2-iff")
        );
        assert_eq!(v.inputs["d"], -2.0);
        assert_eq!(x(0.5, 1.0, 0.8, -1.0).rule, "inversion/I.2");
    }

    #[test]
    fn d_two_exact_and_open_region() {
        // a + b < 1: I.3 below 3a+b; the sufficient pair takes over before
        // the exact II.2 threshold 2a + 1
        assert_eq!(x(0.2, 0.3, 0.85, 2.0).rule, "I.3");
        assert_eq!(x(0.2, 0.3, 1.02, 2.0).rule, "II.3");
        let v = x(0.2, 0.3, 0.95, 2.0);
        assert_eq!(
            (v.outcome, v.rule.as_str(), v.band),
            (Outcome::Unknown, "open", None)
        );
    }

    #[test]
    fn ml_examples() {
        let ml = |r, m, g| classify_ml_nonneg(&MLParams::new(r, m, g).unwrap()).unwrap();
        let v = ml(0.8, 1.0, 1.2);
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::Exists, "II.1"));
        let v = ml(2.0, 5.0, 2.0);
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::NotExists, "I.3"));
        let v = ml(2.5, 4.0, 1.0);
        assert_eq!((v.outcome, v.rule.as_str()), (Outcome::NotExists, "I.1"));
    }

    #[test]
    fn ksw_examples() {
        let v = ksw_d_exists(0.5, 0.5, 1.0, 1.5).unwrap();
        assert_eq!((v.outcome, v.boundary), (Outcome::Exists, true));
        assert_eq!(
            ksw_d_exists(1.0, 1.0, 1.0, 1.0).unwrap().outcome,
            Outcome::NotExists
        );
        assert_eq!(
            ksw_d_exists(0.5, 0.5, 0.9, 1.2).unwrap().outcome,
            Outcome::NotExists
        );
        // c + d large but 2(c−a)(d−a) small
        assert_eq!(ksw_d_exists(0.5, 0.5, 0.6, 5.0).unwrap().rule, "KSW-gap");
    }

    #[test]
    fn region_grid_labels() {
        let spec = RegionSpec {
            rho_min: 0.8,
            rho_max: 1.8,
            mu_min: 0.9,
            mu_max: 2.0,
            step: 0.1,
            gamma: None,
            scan_t_max: 200.0,
        };
        let grid = region_map(&spec).unwrap();
        let find = |r: f64, m: f64| {
            grid.iter()
                .flatten()
                .find(|c| (c.rho - r).abs() < 1e-9 && (c.mu - m).abs() < 1e-9)
                .unwrap()
                .clone()
        };
        assert_eq!(find(0.8, 0.9).verdict.outcome, Outcome::Exists);
        assert_eq!(find(1.8, 2.0).verdict.outcome, Outcome::NotExists);
        let u = find(1.5, 1.8);
        assert_eq!(u.verdict.outcome, Outcome::Unknown);
        assert!(u.numeric_min.is_some());
        // halving the step keeps every certified label
        let fine = region_map(&RegionSpec { step: 0.05, ..spec }).unwrap();
        for c in grid.iter().flatten().filter(|c| c.verdict.is_certified()) {
            let f = fine
                .iter()
                .flatten()
                .find(|f| (f.rho - c.rho).abs() < 1e-9 && (f.mu - c.mu).abs() < 1e-9);
            assert_eq!(f.unwrap().verdict.outcome, c.verdict.outcome);
        }
    }

    mod props {
        use super::*;
        use crate::specfun::sign_scan;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = GammaTypeParams> {
            (0.05f64..3.0, 0.05f64..3.0, 0.05f64..6.0, 0.1f64..2.5)
                .prop_map(|(a, b, c, d)| GammaTypeParams::new(a, b, c, d).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn exists_implies_janson(p in params()) {
                let v = classify_existence(&p).unwrap();
                if v.outcome == Outcome::Exists {
                    let gamma = 2.0 - p.d;
                    let delta = p.a + p.b - p.c - 0.5;
                    prop_assert!(gamma > 0.0 || (gamma.abs() < 1e-12 && delta <= 1e-12), "{v:?}");
                }
            }

            #[test]
            fn existence_and_ml_agree(p in params()) {
                let v = classify_existence(&p).unwrap();
                let m = classify_ml_nonneg(&MLParams::new(p.d, p.c + p.b * p.d, p.a + p.b).unwrap()).unwrap();
                prop_assert!(
                    !(v.outcome == Outcome::Exists && m.outcome == Outcome::NotExists)
                        && !(v.outcome == Outcome::NotExists && m.outcome == Outcome::Exists),
                    "{v:?} vs {m:?}"
                );
            }

            #[test]
            fn d_two_iff(a in 0.05f64..2.0, b in 0.05f64..2.0, c in 0.05f64..8.0) {
                prop_assume!(a + b >= 1.0);
                let v = x(a, b, c, 2.0);
                prop_assert_eq!(v.outcome == Outcome::Exists, c >= 3.0 * a + b);
                prop_assert!(v.band.is_none());
            }

            #[test]
            fn band_contains_nothing_certified(rho in 1.01f64..1.99, mu in 1.0f64..3.0) {
                let v = classify_two_param(rho, mu).unwrap();
                let b = bounds_lu(rho).unwrap();
                match v.outcome {
                    Outcome::Unknown => prop_assert!(mu > b.l_val && mu < b.u_val),
                    Outcome::Exists => prop_assert!(mu >= b.u_val * (1.0 - 1e-12)),
                    Outcome::NotExists => prop_assert!(mu <= b.l_val * (1.0 + 1e-12)),
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn certified_negativity_never_meets_exists(rho in 0.3f64..2.0, mu in 0.3f64..3.5, gamma in 0.3f64..2.0) {
                let p = MLParams::new(rho, mu, gamma).unwrap();
                let v = classify_ml_nonneg(&p).unwrap();
                if let Ok(r) = sign_scan(&p, 200.0, 1e-10) {
                    if r.certified {
                        prop_assert!(v.outcome != Outcome::Exists, "{v:?} {r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn band_endpoint_flips_upward() {
        // a + b ≤ 1: crossing ad − d + U(d) turns Unknown into Exists
        let (a, b, d) = (0.3, 0.3, 1.5);
        let hi = a * d - d + bounds_lu(d).unwrap().u_val;
        assert_eq!(x(a, b, hi * (1.0 - 1e-6), d).outcome, Outcome::Unknown);
        assert_eq!(x(a, b, hi * (1.0 + 1e-6), d).outcome, Outcome::Exists);
        // a + b ≥ 1: crossing ad − d + L(d) upward leaves NotExists
        let (a, b) = (0.6, 0.6);
        let lo = a * d - d + bounds_lu(d).unwrap().l_val;
        assert_eq!(x(a, b, lo * (1.0 - 1e-6), d).outcome, Outcome::NotExists);
        assert_ne!(x(a, b, lo * (1.0 + 1e-6), d).outcome, Outcome::NotExists);
    }

    #[test]
    fn scan_confirms_negative_verdict() {
        let r = sign_scan(&MLParams::two(1.8, 2.0).unwrap(), 200.0, 1e-10).unwrap();
        assert!(r.certified && r.min_value.abs() > r.err_at_min);
        assert_eq!(
            classify_two_param(1.8, 2.0).unwrap().outcome,
            Outcome::NotExists
        );
    }

    #[test]
    fn cross_check_agrees_on_examples() {
        let c = cross_check(&GammaTypeParams::new(0.5, 0.5, 2.0, 2.0).unwrap(), 200.0).unwrap();
        assert_eq!(c.existence.outcome, Outcome::Exists);
        assert_eq!(c.ml_params, MLParams::new(2.0, 3.0, 1.0).unwrap());
        assert_eq!(c.ml_nonneg.outcome, Outcome::Exists);
        assert!(!c.scan.unwrap().certified);

        // E_{1.8,2} dips below zero; X_{1/2,1/2,1.1,1.8} maps onto it
        let c = cross_check(&GammaTypeParams::new(0.5, 0.5, 1.1, 1.8).unwrap(), 200.0).unwrap();
        assert_eq!(c.ml_params, MLParams::new(1.8, 2.0, 1.0).unwrap());
        assert_ne!(c.existence.outcome, Outcome::Exists);
        assert!(c.scan.unwrap().certified);
    }
}
