//! Numerical substrate: adaptive Gauss–Kronrod quadrature on finite and
//! semi-infinite intervals, central differences, bracketed root finding and
//! seeded, splittable uniform random streams.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for closed-form validation work.
pub const VALIDATION_REL_TOL: f64 = 1e-8;
/// Relative tolerance for everything else.
pub const DEFAULT_REL_TOL: f64 = 1e-6;
/// Maximum number of live panels before quadrature gives up.
pub const MAX_PANELS: usize = 1 << 15;

/// Integration domain `[lower, upper]`; `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval lower bound must be finite, got {lower}"
            )));
        }
        if upper.is_nan() || upper <= lower || upper == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "interval requires lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Interval { lower, upper })
    }

    /// `[lower, +inf)`.
    pub fn from(lower: f64) -> Result<Self> {
        Interval::new(lower, f64::INFINITY)
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Outcome of a quadrature: the estimate, its error estimate and the number
/// of panels the adaptive scheme ended with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    segment: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<G>(g: &G, segment: usize, a: f64, b: f64) -> Result<Panel>
where
    G: Fn(usize, f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = g(segment, x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("integrand is not finite ({v}) near {x}")))
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        segment,
        a,
        b,
        value,
        error,
    })
}

fn adaptive<G>(g: G, segments: &[(f64, f64)], rel_tol: f64) -> Result<Quadrature>
where
    G: Fn(usize, f64) -> f64,
{
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for (i, &(a, b)) in segments.iter().enumerate() {
        heap.push(gauss_kronrod(&g, i, a, b)?);
    }

    let totals = |heap: &BinaryHeap<Panel>, frozen: &[Panel]| {
        heap.iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    let (mut value, mut error) = totals(&heap, &frozen);
    let mut iterations = 0usize;
    loop {
        let tol = rel_tol * value.abs().max(1e-12);
        if error <= tol {
            break;
        }
        let panels = heap.len() + frozen.len();
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::IntegrationFailure {
                    estimate: value,
                    error_estimate: error,
                    panels,
                })
            }
        };
        if panels >= MAX_PANELS {
            heap.push(worst);
            return Err(Error::IntegrationFailure {
                estimate: value,
                error_estimate: error,
                panels,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let resolvable = mid > worst.a
            && mid < worst.b
            && (worst.b - worst.a) > 1e-150
            && (worst.b - worst.a) > 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs());
        if !resolvable {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&g, worst.segment, worst.a, mid)?;
        let right = gauss_kronrod(&g, worst.segment, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        iterations += 1;
        if iterations % 128 == 0 {
            (value, error) = totals(&heap, &frozen);
        }
    }

    let (value, error) = totals(&heap, &frozen);
    Ok(Quadrature {
        value,
        error,
        panels: heap.len() + frozen.len(),
    })
}

/// Integrates `f` over `domain`, returning the estimate with its error
/// estimate.
///
/// Semi-infinite domains use `x = lower + u/(1-u)`. The half `u > 1/2` is
/// parametrized by `w = 1 - u` so that the far tail keeps full floating-point
/// resolution.
pub fn integrate_with_error<F>(f: F, domain: Interval, rel_tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    if !(rel_tol > 0.0 && rel_tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in (0, 1e-2], got {rel_tol}"
        )));
    }
    let lower = domain.lower;
    if domain.is_bounded() {
        adaptive(|_, x| f(x), &[(lower, domain.upper)], rel_tol)
    } else {
        adaptive(
            |segment, p| {
                if segment == 0 {
                    let d = 1.0 - p;
                    let v = f(lower + p / d);
                    if v == 0.0 {
                        0.0
                    } else {
                        v / (d * d)
                    }
                } else {
                    let v = f(lower + (1.0 - p) / p);
                    if v == 0.0 {
                        0.0
                    } else {
                        v / (p * p)
                    }
                }
            },
            &[(0.0, 0.5), (0.0, 0.5)],
            rel_tol,
        )
    }
}

/// Integrates `f` over `domain` to relative tolerance `rel_tol`.
pub fn integrate<F>(f: F, domain: Interval, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_with_error(f, domain, rel_tol).map(|q| q.value)
}

/// Central difference `(f(t+step) - f(t-step)) / (2 step)`.
pub fn differentiate<F>(f: F, t: f64, step: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    let hi = f(t + step);
    let lo = f(t - step);
    if !hi.is_finite() || !lo.is_finite() {
        return Err(Error::Domain(format!(
            "function undefined on [{}, {}]",
            t - step,
            t + step
        )));
    }
    Ok((hi - lo) / (2.0 * step))
}

/// Root of an increasing function on `[lo, hi]` with `g(lo) < 0 <= g(hi)`,
/// located by bisection until the bracket is below `x_tol` relative.
pub fn bisect_increasing<G>(g: G, mut lo: f64, mut hi: f64, x_tol: f64) -> f64
where
    G: Fn(f64) -> f64,
{
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= x_tol * mid.abs().max(f64::MIN_POSITIVE) {
            return mid;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Streams sharing a seed but differing in `stream_id` are independent
/// ChaCha8 streams over the same key. Instances are single-owner.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Next uniform draw, strictly inside `(0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Borrowing iterator over uniform draws.
    pub fn uniforms(&mut self) -> impl Iterator<Item = f64> + '_ {
        std::iter::repeat_with(move || self.next_uniform())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Owning, infinite iterator of open-interval uniforms.
#[derive(Debug, Clone)]
pub struct UniformStream(RngStream);

impl Iterator for UniformStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.0.next_uniform())
    }
}

pub fn uniform_stream(rng: RngStream) -> UniformStream {
    UniformStream(rng)
}

/// Stable 64-bit mixer (SplitMix64 finalizer) used to derive stream ids.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable hash over a sequence of words; independent of platform and
/// toolchain, unlike `std::hash`.
pub fn hash_words(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, &w| mix64(acc ^ mix64(w)))
}

/// FNV-1a over a string, for folding labels into [`hash_words`].
pub fn hash_label(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |acc, b| {
        (acc ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x, unit(), 1e-8).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inverse_square_tail() {
        let v = integrate(|x| x.powi(-2), Interval::from(1.0).unwrap(), 1e-8).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exponential_normalization() {
        let v = integrate(|x| (-x).exp(), Interval::from(0.0).unwrap(), 1e-8).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn heavy_power_tail() {
        // ∫_1^∞ x^{-1.25} dx = 4
        let v = integrate(|x| x.powf(-1.25), Interval::from(1.0).unwrap(), 1e-10).unwrap();
        assert!((v - 4.0).abs() < 4e-10, "{v}");
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate(|x| x.powf(-0.5), unit(), 1e-10).unwrap();
        assert!((v - 2.0).abs() < 2e-10, "{v}");
    }

    #[test]
    fn divergent_integral_fails_with_estimate() {
        let err = integrate(|x| 1.0 / x, Interval::from(1.0).unwrap(), 1e-8).unwrap_err();
        assert!(matches!(err, Error::IntegrationFailure { .. }), "{err:?}");
    }

    #[test]
    fn rejects_bad_tolerance_and_interval() {
        assert!(integrate(|x| x, unit(), 0.0).is_err());
        assert!(integrate(|x| x, unit(), 0.5).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 1.0).is_err());
    }

    #[test]
    fn linearity_and_additivity() {
        let d = Interval::from(0.0).unwrap();
        let f = |x: f64| (-x).exp();
        let g = |x: f64| 1.0 / (1.0 + x).powi(3);
        let tol = 1e-8;
        let lhs = integrate(|x| 2.0 * f(x) - 3.0 * g(x), d, tol).unwrap();
        let rhs = 2.0 * integrate(f, d, tol).unwrap() - 3.0 * integrate(g, d, tol).unwrap();
        assert!((lhs - rhs).abs() <= 2.0 * tol * rhs.abs().max(1.0));

        let ab = integrate(g, Interval::new(0.0, 2.0).unwrap(), tol).unwrap();
        let bc = integrate(g, Interval::from(2.0).unwrap(), tol).unwrap();
        let ac = integrate(g, d, tol).unwrap();
        assert!((ab + bc - ac).abs() <= 2.0 * tol * ac);
    }

    #[test]
    fn derivative_examples() {
        let d = differentiate(|x| x * x, 1.0, 1e-4).unwrap();
        assert!((d - 2.0).abs() < 1e-6);
        assert_eq!(differentiate(|_| 3.0, 7.0, 1e-3).unwrap(), 0.0);
        let e = differentiate(f64::exp, 0.0, 1e-4).unwrap();
        assert!((e - 1.0).abs() < 1e-7);
    }

    #[test]
    fn derivative_error_is_second_order() {
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&h| (differentiate(f64::sin, 1.0, h).unwrap() - 1f64.cos()).abs())
            .collect();
        // truncation error cos(1) h^2 / 6
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 50.0, "errors {errs:?}");
        }
    }

    #[test]
    fn derivative_domain_error() {
        let err = differentiate(|x: f64| x.ln(), 0.0, 1e-3).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(differentiate(|x| x, 0.0, 0.0).is_err());
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<f64> = uniform_stream(RngStream::new(9, 3)).take(1000).collect();
        let b: Vec<f64> = uniform_stream(RngStream::new(9, 3)).take(1000).collect();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn uniforms_are_open_and_centered() {
        let xs: Vec<f64> = uniform_stream(RngStream::new(1, 0)).take(100_000).collect();
        assert!(xs.iter().all(|&u| u > 0.0 && u < 1.0));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let n = 10_000;
        let a: Vec<f64> = uniform_stream(RngStream::new(5, 1)).take(n).collect();
        let b: Vec<f64> = uniform_stream(RngStream::new(5, 2)).take(n).collect();
        let ma = a.iter().sum::<f64>() / n as f64;
        let mb = b.iter().sum::<f64>() / n as f64;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(&b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma).powi(2);
            sbb += (y - mb).powi(2);
        }
        let r = sab / (saa * sbb).sqrt();
        assert!(r.abs() < 0.05, "{r}");
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }
}
