//! Adaptive Gauss–Kronrod quadrature.
//!
//! Panels are integrated with the 10-point Gauss / 21-point Kronrod pair and
//! the panel with the largest error estimate is bisected until the requested
//! tolerance is met. Half-line integrals are mapped onto (−1, 1) through a
//! logarithmic substitution at the finite end and an exponential (power-type)
//! one at infinity, which turns algebraic endpoint behaviour into exponential
//! decay in the new variable.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_482_734_524_209,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error (Kronrod−Gauss difference plus rounding slack).
    pub abs_err: f64,
    /// Estimate of ∫|f|, used to size rounding errors by callers.
    pub abs_integral: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Number of equal panels the interval is cut into before adapting.
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_panels: 2000,
            initial_panels: 4,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One Gauss–Kronrod 10/21 panel: (kronrod, |kronrod − gauss|, ∫|f|).
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rabs = fc.abs() * WGK[10];
    let mut rg = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        rk += WGK[j] * (f1 + f2);
        rabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = rk * h;
    let abs = rabs * h.abs();
    let err = ((rk - rg) * h).abs() + 50.0 * f64::EPSILON * abs;
    (value, err, abs)
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let (value, err, abs) = gk21(f, a, b);
    Panel {
        a,
        b,
        value,
        err,
        abs,
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_err: 0.0,
            abs_integral: 0.0,
            evals: 0,
            converged: true,
        };
    }
    let n0 = opts.initial_panels.max(1);
    let mut heap = BinaryHeap::with_capacity(opts.max_panels + n0);
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 {
            b
        } else {
            a + width * (i + 1) as f64
        };
        heap.push(panel(&mut f, lo, hi));
    }
    let mut evals = 21 * n0;
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut v = 0.0;
        let mut e = 0.0;
        let mut s = 0.0;
        for p in heap.iter() {
            v += p.value;
            e += p.err;
            s += p.abs;
        }
        (v, e, s)
    };
    let (mut value, mut err, mut abs) = totals(&heap);
    let mut converged = false;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        // truncation error below the rounding floor: refining cannot help
        let at_roundoff = err <= 2.0 * 50.0 * f64::EPSILON * abs;
        if err <= tol || at_roundoff || !err.is_finite() && !value.is_finite() {
            converged = err <= tol || at_roundoff;
            break;
        }
        if heap.len() >= opts.max_panels {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot subdivide further in floating point
            heap.push(Panel { err: 0.0, ..worst });
            err -= worst.err;
            continue;
        }
        let left = panel(&mut f, worst.a, mid);
        let right = panel(&mut f, mid, worst.b);
        evals += 42;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        // refresh running sums now and then to stop drift
        if heap.len() % 64 == 0 {
            (value, err, abs) = totals(&heap);
        }
    }
    let (value, abs_err, abs_integral) = totals(&heap);
    QuadResult {
        value,
        abs_err,
        abs_integral,
        evals,
        converged,
    }
}

/// ∫_a^∞ f(t) dt with `t = a + scale·e^u` and `u = v/(1−v²)`, `v ∈ (−1, 1)`.
///
/// `scale` should be the length scale on which `f` varies near `a`.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    let g = move |v: f64| {
        let one_m = 1.0 - v * v;
        if one_m <= 0.0 {
            return 0.0;
        }
        let u = v / one_m;
        if u > 700.0 || u < -700.0 {
            return 0.0;
        }
        let eu = scale * u.exp();
        let t = a + eu;
        if t == a || !t.is_finite() {
            return 0.0;
        }
        let w = eu * (1.0 + v * v) / (one_m * one_m);
        let fv = f(t);
        if fv == 0.0 {
            0.0
        } else {
            fv * w
        }
    };
    integrate(
        g,
        -1.0,
        1.0,
        QuadOptions {
            initial_panels: opts.initial_panels.max(8),
            ..opts
        },
    )
}

/// ∫_0^∞ f(t) dt; see [`integrate_half_line`].
pub fn integrate_positive_axis<F: FnMut(f64) -> f64>(
    f: F,
    scale: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_half_line(f, 0.0, scale, opts)
}

/// ∫_0^b f(t) dt with `t = b·e^{−u}` and `u = w/(1−w)`, `w ∈ [0, 1)`.
///
/// Suited to integrands with an algebraic singularity at zero that vary on a
/// logarithmic scale up to `b`.
pub fn integrate_zero_to<F: FnMut(f64) -> f64>(mut f: F, b: f64, opts: QuadOptions) -> QuadResult {
    let g = move |w: f64| {
        let one_m = 1.0 - w;
        if one_m <= 0.0 {
            return 0.0;
        }
        let u = w / one_m;
        if u > 700.0 {
            return 0.0;
        }
        let t = b * (-u).exp();
        if t == 0.0 {
            return 0.0;
        }
        let fv = f(t);
        if fv == 0.0 {
            0.0
        } else {
            fv * t / (one_m * one_m)
        }
    };
    integrate(
        g,
        0.0,
        1.0,
        QuadOptions {
            initial_panels: opts.initial_panels.max(8),
            ..opts
        },
    )
}
