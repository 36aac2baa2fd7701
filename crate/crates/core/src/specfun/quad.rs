//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |I|)`. The rule never samples the
//! interval endpoints, so integrable endpoint singularities are fine.
//! Semi-infinite ranges are mapped onto (0, 1) with `x = s t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and work limit for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive and max_subdivisions >= 1 \
                 (got {rel_tol}, {abs_tol}, {max_subdivisions})"
            )));
        }
        Ok(QuadratureSpec { rel_tol, abs_tol, max_subdivisions })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000 }
    }
}

/// `∫_a^b f(x) dx`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must satisfy a < b and be finite (got {a}, {b})"
        )));
    }
    adaptive(&f, a, b, quad)
}

/// `∫_0^∞ f(x) dx`.
pub fn integrate_semi_infinite<F>(f: F, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_semi_infinite_scaled(f, 1.0, quad)
}

/// `∫_0^∞ f(x) dx` with the map centred on the length scale `scale`, i.e.
/// `t = 1/2` corresponds to `x = scale`.
pub fn integrate_semi_infinite_scaled<F>(f: F, scale: f64, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("semi-infinite map scale must be positive (got {scale})")));
    }
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let x = scale * t / one_minus;
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * scale / (one_minus * one_minus)
        }
    };
    adaptive(&mapped, 0.0, 1.0, quad)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F>(f: &F, a: f64, b: f64, quad: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let first = gauss_kronrod(f, a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    // Segments too narrow to bisect further keep contributing their value
    // and error but leave the heap.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut subdivisions = 0;

    loop {
        let target = quad.abs_tol.max(quad.rel_tol * total.abs());
        // The single-rule estimate can be fooled by a kink, so always
        // compare against at least one bisection.
        if total_err <= target && subdivisions > 0 {
            break;
        }
        let Some(worst) = heap.pop() else {
            if total_err <= 10.0 * target {
                // only frozen, round-off limited segments remain
                break;
            }
            return Err(Error::NonConvergence { subdivisions, estimate: total, abs_error: total_err });
        };
        if subdivisions >= quad.max_subdivisions {
            return Err(Error::NonConvergence { subdivisions, estimate: total, abs_error: total_err });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 4.0 * f64::EPSILON * mid.abs() {
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        let mut left = gauss_kronrod(f, worst.a, mid)?;
        let mut right = gauss_kronrod(f, mid, worst.b)?;
        subdivisions += 1;
        let refine_gap = (left.value + right.value - worst.value).abs();
        let child_err = left.error + right.error;
        if refine_gap > child_err {
            if child_err > 0.0 {
                left.error *= refine_gap / child_err;
                right.error *= refine_gap / child_err;
            } else {
                left.error = 0.5 * refine_gap;
                right.error = 0.5 * refine_gap;
            }
        }
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if subdivisions % 64 == 0 {
            // refresh the running sums to stop drift
            total = heap.iter().map(|s| s.value).sum::<f64>() + frozen_value;
            total_err = heap.iter().map(|s| s.error).sum::<f64>() + frozen_err;
        }
    }
    Ok(heap.iter().map(|s| s.value).sum::<f64>() + frozen_value)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_751_497,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = WGK[10] * fc.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}
