//! Population samplers and the two quantile functions the baselines need.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, Sample, SeedSpec, Statistic};

/// Set of values the target parameter can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterDomain {
    Unbounded,
    /// Proportions: `[0, 1]`.
    UnitInterval,
}

impl ParameterDomain {
    pub fn contains(self, value: f64) -> bool {
        match self {
            ParameterDomain::Unbounded => true,
            ParameterDomain::UnitInterval => (0.0..=1.0).contains(&value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Population {
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Bernoulli { p: f64 },
}

impl Population {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter("normal mean must be finite"));
        }
        if !(sd.is_finite() && sd > 0.0) {
            return Err(Error::InvalidParameter("normal sd must be positive"));
        }
        Ok(Population::Normal { mean, sd })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter("exponential rate must be positive"));
        }
        Ok(Population::Exponential { rate })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(
                "bernoulli p must lie strictly between 0 and 1",
            ));
        }
        Ok(Population::Bernoulli { p })
    }

    /// Mean for the continuous families, `p` for Bernoulli.
    pub fn true_parameter(&self) -> f64 {
        match *self {
            Population::Normal { mean, .. } => mean,
            Population::Exponential { rate } => 1.0 / rate,
            Population::Bernoulli { p } => p,
        }
    }

    pub fn true_sd(&self) -> f64 {
        match *self {
            Population::Normal { sd, .. } => sd,
            Population::Exponential { rate } => 1.0 / rate,
            Population::Bernoulli { p } => libm::sqrt(p * (1.0 - p)),
        }
    }

    pub fn domain(&self) -> ParameterDomain {
        match self {
            Population::Bernoulli { .. } => ParameterDomain::UnitInterval,
            _ => ParameterDomain::Unbounded,
        }
    }

    /// Estimator targeting [`Population::true_parameter`].
    pub fn statistic(&self) -> Statistic {
        match self {
            Population::Bernoulli { .. } => Statistic::Proportion,
            _ => Statistic::Mean,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Population::Normal { .. } => "normal",
            Population::Exponential { .. } => "exponential",
            Population::Bernoulli { .. } => "bernoulli",
        }
    }

    /// Short label such as `normal(1,1)`, `exponential(1)` or `bernoulli(0.1)`.
    pub fn label(&self) -> String {
        match *self {
            Population::Normal { mean, sd } => format!("normal({mean},{sd})"),
            Population::Exponential { rate } => format!("exponential({rate})"),
            Population::Bernoulli { p } => format!("bernoulli({p})"),
        }
    }

    /// Parameter text used in the `param` column of the metrics table.
    pub fn param_text(&self) -> String {
        match *self {
            Population::Normal { mean, sd } => format!("mean={mean};sd={sd}"),
            Population::Exponential { rate } => format!("rate={rate}"),
            Population::Bernoulli { p } => format!("p={p}"),
        }
    }

    /// One variate. Normal uses the ziggurat method (exact), exponential the
    /// inverse transform `-ln(U)/rate` with `U` in (0, 1], Bernoulli `U < p`.
    #[inline]
    pub fn draw_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Population::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            Population::Exponential { rate } => {
                let u = 1.0 - rng.random::<f64>();
                -libm::log(u) / rate
            }
            Population::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.draw_one(rng)).collect()
    }
}

/// `n` i.i.d. draws from `pop` on the stream named by `seed`.
pub fn draw_sample(pop: &Population, n: usize, seed: &SeedSpec) -> Result<Sample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = seed.rng();
    Ok(Sample::from_trusted(pop.draw(&mut rng, n)))
}

// Wichura's AS241 (PPND16), accurate to about 1e-16. Coefficients are kept
// as published.
#[allow(clippy::excessive_precision)]
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
#[allow(clippy::excessive_precision)]
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
#[allow(clippy::excessive_precision)]
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn check_probability(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(q))
    }
}

/// Standard normal quantile Φ⁻¹(q).
pub fn normal_quantile(q: f64) -> Result<f64> {
    check_probability(q)?;
    let dq = q - 0.5;
    if dq.abs() <= 0.425 {
        let r = 0.180_625 - dq * dq;
        return Ok(dq * poly(&A, r) / poly(&B, r));
    }
    let tail = if dq < 0.0 { q } else { 1.0 - q };
    let mut r = libm::sqrt(-libm::log(tail));
    let magnitude = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    Ok(if dq < 0.0 { -magnitude } else { magnitude })
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..100_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, with `y = 1 - x` supplied
/// separately so callers can avoid cancellation.
fn regularized_beta(a: f64, b: f64, x: f64, y: f64, ln_x: f64, ln_y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let front = libm::exp(a * ln_x + b * ln_y - ln_beta(a, b));
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, y) / b
    }
}

/// Upper tail P(T > t) of Student's t for `t >= 0`.
fn t_upper_tail(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    // x = df/(df+t²), y = t²/(df+t²)
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    let ln_x = -libm::log1p(t2 / df);
    let ln_y = if t2 == 0.0 {
        f64::NEG_INFINITY
    } else {
        libm::log(t2) - libm::log(df + t2)
    };
    0.5 * regularized_beta(df / 2.0, 0.5, x, y, ln_x, ln_y)
}

fn t_density(t: f64, df: f64) -> f64 {
    let ln_norm = libm::lgamma((df + 1.0) / 2.0) - libm::lgamma(df / 2.0) - 0.5 * libm::log(df * PI);
    libm::exp(ln_norm - (df + 1.0) / 2.0 * libm::log1p(t * t / df))
}

/// Student t distribution function.
pub fn student_t_cdf(t: f64, df: u64) -> Result<f64> {
    if df == 0 {
        return Err(Error::InvalidDegreesOfFreedom);
    }
    let tail = t_upper_tail(t.abs(), df as f64);
    Ok(if t >= 0.0 { 1.0 - tail } else { tail })
}

/// Student t quantile with `df` degrees of freedom.
pub fn student_t_quantile(q: f64, df: u64) -> Result<f64> {
    check_probability(q)?;
    if df == 0 {
        return Err(Error::InvalidDegreesOfFreedom);
    }
    if q == 0.5 {
        return Ok(0.0);
    }
    let sign = if q < 0.5 { -1.0 } else { 1.0 };
    let tail = if q < 0.5 { q } else { 1.0 - q };
    let magnitude = match df {
        1 => 1.0 / libm::tan(PI * tail),
        2 => {
            let c = 1.0 - 2.0 * tail;
            libm::sqrt(2.0 * c * c / (4.0 * tail * (1.0 - tail)))
        }
        _ => solve_t_tail(tail, df as f64),
    };
    Ok(sign * magnitude)
}

/// Solves `P(T > t) = tail` for t > 0 by safeguarded Newton on log-tail.
fn solve_t_tail(tail: f64, df: f64) -> f64 {
    let z = -normal_quantile(tail).expect("tail in (0, 0.5)");
    // Cornish-Fisher start
    let z2 = z * z;
    let mut t = z
        + (z2 * z + z) / (4.0 * df)
        + (5.0 * z2 * z2 * z + 16.0 * z2 * z + 3.0 * z) / (96.0 * df * df);

    let mut lo = 0.0;
    let mut hi = t.max(1.0);
    while t_upper_tail(hi, df) > tail {
        lo = hi;
        hi *= 2.0;
    }
    if !(t > lo && t < hi) {
        t = 0.5 * (lo + hi);
    }
    let ln_target = libm::log(tail);
    for _ in 0..200 {
        let s = t_upper_tail(t, df);
        if s > tail {
            lo = t;
        } else {
            hi = t;
        }
        let step = (libm::log(s) - ln_target) * s / t_density(t, df);
        let mut next = t + step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * t.max(1.0) {
            return next;
        }
        t = next;
    }
    t
}
