//! Bessel functions of half-integer order `nu = l + 1/2`.
//!
//! Every function the radial Dirac problem needs reduces to these orders, and
//! all of them are elementary: they follow from `sinh`, `cosh`, `exp`, `sin`
//! and `cos` through three-term recurrences.
//!
//! * `I` is the minimal solution of its recurrence as the order grows, so it
//!   is computed by Miller's downward recurrence normalised against
//!   `I_{-1/2}(x) = sqrt(2/(pi x)) cosh x`, which has no cancellation.
//! * `K` is dominant and is generated upwards from `K_{1/2}` and `K_{3/2}`.
//! * Spherical `j_l` go upwards while `l <= x` and downwards otherwise;
//!   spherical `y_l` always go upwards.
//!
//! `I` and `K` are returned as [`ScaledPair`]s so that products such as
//! `I_nu(x) K_nu(x)` stay representable when either factor alone would
//! overflow or underflow.

use std::f64::consts::{LN_2, PI};
use std::ops::Mul;

use crate::error::{positive, Result};

/// 2^900; recurrences are rescaled by an exact power of two past this size.
const BIG: f64 = f64::from_bits((1023 + 900) << 52);
const TINY: f64 = f64::from_bits((1023 - 900) << 52);
const RESCALE_LN: f64 = 900.0 * LN_2;

/// Extra orders above `max(l, x)` where Miller's recurrences start.
const MILLER_MARGIN: usize = 40;

/// Half-integer order `l + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfOrder(pub u32);

impl HalfOrder {
    pub fn order(self) -> f64 {
        self.0 as f64 + 0.5
    }
}

impl From<u32> for HalfOrder {
    fn from(l: u32) -> Self {
        HalfOrder(l)
    }
}

/// A number stored as `value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPair {
    pub value: f64,
    pub log_scale: f64,
}

impl ScaledPair {
    pub fn new(value: f64, log_scale: f64) -> Self {
        Self { value, log_scale }
    }

    /// The represented number, which may overflow to infinity or underflow to zero.
    pub fn unscaled(self) -> f64 {
        if self.value == 0.0 {
            return 0.0;
        }
        let direct = self.value * self.log_scale.exp();
        if direct.is_finite() && direct.abs() > f64::MIN_POSITIVE && self.log_scale.abs() < 700.0 {
            return direct;
        }
        self.value.signum() * (self.value.abs().ln() + self.log_scale).exp()
    }

    pub fn ln_abs(self) -> f64 {
        self.value.abs().ln() + self.log_scale
    }

    /// Same number with the scale moved to `log_scale`.
    pub fn rescaled_to(self, log_scale: f64) -> f64 {
        if self.value == 0.0 {
            return 0.0;
        }
        self.value * (self.log_scale - log_scale).exp()
    }
}

impl Mul for ScaledPair {
    type Output = ScaledPair;

    fn mul(self, rhs: ScaledPair) -> ScaledPair {
        // Multiply mantissas and add binary exponents separately so the
        // product cannot overflow; the exponent goes back into `value`
        // exactly whenever that is representable.
        let (m1, e1) = split_exponent(self.value);
        let (m2, e2) = split_exponent(rhs.value);
        let exponent = e1 + e2;
        let log_scale = self.log_scale + rhs.log_scale;
        if exponent.abs() <= 1000 {
            ScaledPair::new(m1 * m2 * pow2(exponent), log_scale)
        } else {
            ScaledPair::new(m1 * m2, log_scale + exponent as f64 * LN_2)
        }
    }
}

/// `v = m * 2^e` with `1 <= |m| < 2`; zero and non-finite values pass through.
fn split_exponent(v: f64) -> (f64, i32) {
    if v == 0.0 || !v.is_finite() {
        return (v, 0);
    }
    let (v, shift) = if v.abs() < f64::MIN_POSITIVE {
        (v * pow2(64), -64)
    } else {
        (v, 0)
    };
    let bits = v.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let mantissa = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (mantissa, exponent + shift)
}

/// Exact `2^e` for `|e| <= 1000`, split in two so subnormal results round once.
fn pow2(e: i32) -> f64 {
    let half = e / 2;
    let one = |k: i32| f64::from_bits(((1023 + k) as u64) << 52);
    one(half) * one(e - half)
}

fn argument(x: f64) -> Result<f64> {
    positive("x", x)
}

fn miller_start(l_max: u32, x: f64) -> usize {
    (l_max as usize).max(x.ceil() as usize) + MILLER_MARGIN
}

/// `I_{l+1/2}(x)` for `l = 0..=l_max`.
///
/// Each entry carries the factor `e^{x}` in its `log_scale`, plus whatever
/// binary rescaling the recurrence needed.
pub fn bessel_i_half_ladder(l_max: u32, x: f64) -> Result<Vec<ScaledPair>> {
    let x = argument(x)?;
    let start = miller_start(l_max, x);
    let keep = l_max as usize;

    // Unnormalised values u_l, with u_{start+1} = 0 and u_start = 1.
    // `rescales` counts multiplications by TINY applied so far.
    let mut stored = vec![(0.0_f64, 0_i32); keep + 1];
    let mut above = 0.0_f64;
    let mut current = 1.0_f64;
    let mut rescales = 0_i32;
    for l in (0..=start).rev() {
        if l <= keep {
            stored[l] = (current, rescales);
        }
        // I_{nu-1} = I_{nu+1} + (2 nu / x) I_nu with nu = l + 1/2.
        let below = above + (2 * l + 1) as f64 / x * current;
        above = current;
        current = below;
        if current.abs() > BIG {
            current *= TINY;
            above *= TINY;
            rescales += 1;
        }
    }

    // current is u_{-1}; e^{-x} I_{-1/2}(x) = sqrt(2/(pi x)) (1 + e^{-2x}) / 2.
    let minus_half = (2.0 / (PI * x)).sqrt() * 0.5 * (1.0 + (-2.0 * x).exp());
    let norm = minus_half / current;
    Ok(stored
        .into_iter()
        .map(|(u, count)| {
            ScaledPair::new(u * norm, x + (count - rescales) as f64 * RESCALE_LN)
        })
        .collect())
}

/// `K_{l+1/2}(x)` for `l = 0..=l_max`, each carrying `e^{-x}` in its scale.
pub fn bessel_k_half_ladder(l_max: u32, x: f64) -> Result<Vec<ScaledPair>> {
    let x = argument(x)?;
    let mut out = Vec::with_capacity(l_max as usize + 1);
    let mut previous = (PI / (2.0 * x)).sqrt();
    out.push(ScaledPair::new(previous, -x));
    if l_max == 0 {
        return Ok(out);
    }
    let mut current = previous * (1.0 + 1.0 / x);
    let mut rescales = 0_i32;
    out.push(ScaledPair::new(current, -x));
    for l in 1..l_max {
        // K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu with nu = l + 1/2.
        let next = previous + (2 * l + 1) as f64 / x * current;
        previous = current;
        current = next;
        if current > BIG {
            current *= TINY;
            previous *= TINY;
            rescales += 1;
        }
        out.push(ScaledPair::new(current, -x + rescales as f64 * RESCALE_LN));
    }
    Ok(out)
}

/// Spherical Bessel `j_l(x)` for `l = 0..=l_max`.
pub fn spherical_j_ladder(l_max: u32, x: f64) -> Result<Vec<f64>> {
    let x = argument(x)?;
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l_max == 0 {
        return Ok(vec![j0]);
    }
    if (l_max as f64) <= x {
        let mut out = Vec::with_capacity(l_max as usize + 1);
        out.push(j0);
        out.push(s / (x * x) - c / x);
        for l in 1..l_max as usize {
            let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
            out.push(next);
        }
        return Ok(out);
    }

    let start = miller_start(l_max, x);
    let keep = l_max as usize;
    let mut stored = vec![(0.0_f64, 0_i32); keep + 1];
    let mut above = 0.0_f64;
    let mut current = 1.0e-30_f64;
    let mut rescales = 0_i32;
    for l in (1..=start).rev() {
        if l <= keep {
            stored[l] = (current, rescales);
        }
        let below = (2 * l + 1) as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > BIG {
            current *= TINY;
            above *= TINY;
            rescales += 1;
        }
    }
    stored[0] = (current, rescales);

    let u0 = current;
    let u1 = stored[1].0 * f64::powi(2.0, 900 * (stored[1].1 - rescales));
    let norm = if x < 1.0 {
        j0 / u0
    } else {
        // Least-squares fit against j0 and j1; one of them is always well away from a zero.
        let j1 = s / (x * x) - c / x;
        let r = u0.abs().max(u1.abs());
        let (v0, v1) = (u0 / r, u1 / r);
        (j0 * v0 + j1 * v1) / (v0 * v0 + v1 * v1) / r
    };
    Ok(stored
        .into_iter()
        .map(|(u, count)| u * norm * f64::powi(2.0, 900 * (count - rescales)))
        .collect())
}

/// Spherical Bessel `y_l(x)` for `l = 0..=l_max`.
pub fn spherical_y_ladder(l_max: u32, x: f64) -> Result<Vec<f64>> {
    let x = argument(x)?;
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(l_max as usize + 1);
    out.push(-c / x);
    if l_max == 0 {
        return Ok(out);
    }
    out.push(-c / (x * x) - s / x);
    for l in 1..l_max as usize {
        let next = (2 * l + 1) as f64 / x * out[l] - out[l - 1];
        out.push(next);
    }
    Ok(out)
}

/// `J_{l+1/2}(x)` for `l = 0..=l_max`.
pub fn bessel_j_half_ladder(l_max: u32, x: f64) -> Result<Vec<f64>> {
    let factor = (2.0 * x / PI).sqrt();
    Ok(spherical_j_ladder(l_max, x)?
        .into_iter()
        .map(|v| factor * v)
        .collect())
}

/// `Y_{l+1/2}(x)` for `l = 0..=l_max`.
pub fn bessel_y_half_ladder(l_max: u32, x: f64) -> Result<Vec<f64>> {
    let factor = (2.0 * x / PI).sqrt();
    Ok(spherical_y_ladder(l_max, x)?
        .into_iter()
        .map(|v| factor * v)
        .collect())
}

/// Modified Bessel function of the first kind, `I_{l+1/2}(x)`.
pub fn bessel_i_half(l: HalfOrder, x: f64) -> Result<ScaledPair> {
    Ok(bessel_i_half_ladder(l.0, x)?[l.0 as usize])
}

/// Modified Bessel function of the second kind, `K_{l+1/2}(x)`.
pub fn bessel_k_half(l: HalfOrder, x: f64) -> Result<ScaledPair> {
    Ok(bessel_k_half_ladder(l.0, x)?[l.0 as usize])
}

pub fn bessel_j_half(l: HalfOrder, x: f64) -> Result<f64> {
    Ok(bessel_j_half_ladder(l.0, x)?[l.0 as usize])
}

pub fn bessel_y_half(l: HalfOrder, x: f64) -> Result<f64> {
    Ok(bessel_y_half_ladder(l.0, x)?[l.0 as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn i(l: u32, x: f64) -> f64 {
        bessel_i_half(HalfOrder(l), x).unwrap().unscaled()
    }

    fn k(l: u32, x: f64) -> f64 {
        bessel_k_half(HalfOrder(l), x).unwrap().unscaled()
    }

    #[test]
    fn elementary_seeds() {
        assert_relative_eq!(i(0, 1.0), (2.0 / PI).sqrt() * 1f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(k(0, 1.0), (PI / 2.0).sqrt() * (-1f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(k(1, 1.0), 2.0 * (PI / 2.0).sqrt() * (-1f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(k(1, 1.0), 0.922137, epsilon = 1e-6);
    }

    #[test]
    fn wronskian_at_one() {
        // I_{1/2} K_{-1/2} + I_{-1/2} K_{1/2} with K_{-1/2} = K_{1/2}.
        let x = 1.0;
        let i_minus = (2.0 / (PI * x)).sqrt() * x.cosh();
        let value = i(0, x) * k(0, x) + i_minus * k(0, x);
        assert_relative_eq!(value, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn small_argument_product_limit() {
        for x in [1e-3, 1e-6, 1e-9] {
            assert_relative_eq!(i(0, x) * k(0, x), 1.0, epsilon = 2.0 * x);
        }
    }

    #[test]
    fn j_and_y_closed_forms() {
        let j = |l, x| bessel_j_half(HalfOrder(l), x).unwrap();
        let y = |l, x| bessel_y_half(HalfOrder(l), x).unwrap();
        assert!(j(0, PI).abs() < 1e-15);
        assert_relative_eq!(j(0, PI / 2.0), (2.0 * (PI / 2.0) / PI).sqrt() * 2.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(j(1, PI), 2f64.sqrt() / PI, max_relative = 1e-14);
        assert!(y(0, PI / 2.0).abs() < 1e-15);
        assert_relative_eq!(y(0, PI), 2f64.sqrt() / PI, max_relative = 1e-14);
        let x = 1.0;
        let cross = j(1, x) * y(0, x) - j(0, x) * y(1, x);
        assert_relative_eq!(cross, 2.0 / (PI * x), max_relative = 1e-14);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_i_half(HalfOrder(0), 0.0).is_err());
        assert!(bessel_k_half(HalfOrder(2), -1.0).is_err());
        assert!(bessel_j_half(HalfOrder(1), f64::NAN).is_err());
        assert!(bessel_y_half(HalfOrder(1), 0.0).is_err());
    }

    #[test]
    fn positivity() {
        for &x in &[1e-4, 0.3, 2.0, 15.0, 80.0] {
            for (a, b) in bessel_i_half_ladder(40, x)
                .unwrap()
                .into_iter()
                .zip(bessel_k_half_ladder(40, x).unwrap())
            {
                assert!(a.value > 0.0 && b.value > 0.0);
            }
        }
    }

    #[test]
    fn products_survive_extreme_scales() {
        // I_{60.5}(1e-6) underflows and K_{60.5}(1e-6) overflows; the product is 1/(2l+1) to leading order.
        let p = bessel_i_half_ladder(60, 1e-6).unwrap()[60] * bessel_k_half_ladder(60, 1e-6).unwrap()[60];
        assert!(p.value.is_finite());
        assert_relative_eq!(p.unscaled(), 1.0 / 121.0, max_relative = 1e-9);
    }
}
