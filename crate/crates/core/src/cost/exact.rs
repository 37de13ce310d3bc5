//! Exact rationals and certified interval bounds for `log2`.
//!
//! Intervals are fixed-point numbers `a / 2^p` with directed rounding, so
//! every computed interval contains the true value. `ln` uses the series
//! `ln f = 2·atanh((f − 1)/(f + 1))` on `f ∈ [1, 2)` with an explicit tail
//! bound, and `log2 f = atanh(t) / atanh(1/3)`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// A positive rational `num / den` in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ratio {
    pub num: BigUint,
    pub den: BigUint,
}

impl Ratio {
    pub fn new(num: BigUint, den: BigUint) -> Ratio {
        assert!(!den.is_zero());
        let g = num.gcd(&den);
        if g.is_one() || g.is_zero() {
            Ratio { num, den }
        } else {
            Ratio { num: num / &g, den: den / &g }
        }
    }

    pub fn integer(v: impl Into<BigUint>) -> Ratio {
        Ratio { num: v.into(), den: BigUint::one() }
    }

    /// Exact value of a finite, non-negative `f64`.
    pub fn from_f64(v: f64) -> Option<Ratio> {
        if !v.is_finite() || v < 0.0 {
            return None;
        }
        if v == 0.0 {
            return Some(Ratio::integer(0u32));
        }
        let bits = v.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigUint::from(mantissa);
        Some(if e >= 0 {
            Ratio::new(m << (e as usize), BigUint::one())
        } else {
            Ratio::new(m, BigUint::one() << ((-e) as usize))
        })
    }

    /// The decimal number printed by the shortest round-trip representation
    /// of `v` (so `0.1` becomes exactly `1/10`).
    pub fn from_f64_decimal(v: f64) -> Option<Ratio> {
        if !v.is_finite() || v < 0.0 {
            return None;
        }
        let text = format!("{v}");
        let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
        let digits = format!("{int_part}{frac_part}");
        let num = BigUint::parse_bytes(digits.as_bytes(), 10)?;
        let den = BigUint::from(10u32).pow(frac_part.len() as u32);
        Some(Ratio::new(num, den))
    }

    pub fn mul(&self, o: &Ratio) -> Ratio {
        Ratio::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &Ratio) -> Ratio {
        Ratio::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn cmp_one(&self) -> Ordering {
        self.num.cmp(&self.den)
    }

    pub fn ceil(&self) -> BigUint {
        let (q, r) = self.num.div_rem(&self.den);
        if r.is_zero() { q } else { q + 1u32 }
    }

    /// `k` if the value is exactly `2^k`.
    pub fn exact_log2(&self) -> Option<i64> {
        let is_pow2 = |v: &BigUint| v.count_ones() == 1;
        if is_pow2(&self.num) && is_pow2(&self.den) {
            Some(self.num.bits() as i64 - self.den.bits() as i64)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Scale so the quotient carries 64 significant bits.
        let shift = 64i64 - (self.num.bits() as i64 - self.den.bits() as i64);
        let q = if shift >= 0 {
            (&self.num << shift as usize) / &self.den
        } else {
            &self.num / (&self.den << (-shift) as usize)
        };
        q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32)
    }
}

/// Closed interval `[lo, hi] / 2^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    pub lo: BigUint,
    pub hi: BigUint,
    pub prec: u32,
}

fn div_floor(a: &BigUint, b: &BigUint) -> BigUint {
    a / b
}

fn div_ceil(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() { q } else { q + 1u32 }
}

/// `Σ t^{2k+1}/(2k+1)` bounded from below with `t = t_fp / 2^p`.
fn atanh_lower(t_fp: &BigUint, p: u32) -> BigUint {
    let t2 = (t_fp * t_fp) >> p as usize;
    let mut power = t_fp.clone();
    let mut sum = BigUint::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        sum += &power / BigUint::from(2 * k + 1);
        power = (&power * &t2) >> p as usize;
        k += 1;
    }
    sum
}

/// Upper bound of the same series for `t ≤ 1/3`.
fn atanh_upper(t_fp: &BigUint, p: u32) -> BigUint {
    let unit = BigUint::one() << p as usize;
    let t2 = div_ceil(&(t_fp * t_fp), &unit);
    let mut power = t_fp.clone();
    let mut sum = BigUint::zero();
    let mut k = 0u64;
    let one = BigUint::one();
    loop {
        sum += div_ceil(&power, &BigUint::from(2 * k + 1));
        power = div_ceil(&(&power * &t2), &unit);
        k += 1;
        if power <= one {
            // Tail Σ_{j≥k} t^{2j+1}/(2j+1) ≤ t^{2k+1}/(1 − t²) ≤ (9/8)·2^{-p}.
            sum += 2u32;
            return sum;
        }
    }
}

/// Certified enclosure of `log2(r)` for a rational `r ≥ 1`.
pub fn log2_interval(r: &Ratio, prec: u32) -> Fixed {
    assert!(r.cmp_one() != Ordering::Less, "log2_interval needs r >= 1");
    // r = 2^e · f with f ∈ [1, 2)
    let mut e = r.num.bits() as i64 - r.den.bits() as i64;
    let (mut a, mut b) = (r.num.clone(), r.den.clone());
    if e >= 0 {
        b <<= e as usize;
    } else {
        a <<= (-e) as usize;
    }
    if a < b {
        e -= 1;
        a <<= 1;
    }
    let p = prec + 8;
    let unit = BigUint::one() << p as usize;
    let e_fixed = BigUint::from(e as u64) << prec as usize;
    if a == b {
        return Fixed { lo: e_fixed.clone(), hi: e_fixed, prec };
    }
    // t = (f − 1)/(f + 1) = (a − b)/(a + b) ∈ (0, 1/3)
    let tn = &a - &b;
    let td = &a + &b;
    let t_lo = div_floor(&(&tn * &unit), &td);
    let t_hi = div_ceil(&(&tn * &unit), &td);
    let third_lo = div_floor(&unit, &BigUint::from(3u32));
    let third_hi = div_ceil(&unit, &BigUint::from(3u32));
    let s_lo = atanh_lower(&t_lo, p);
    let s_hi = atanh_upper(&t_hi, p);
    let l_lo = atanh_lower(&third_lo, p);
    let l_hi = atanh_upper(&third_hi, p);
    let scale = BigUint::one() << prec as usize;
    let f_lo = div_floor(&(&s_lo * &scale), &l_hi);
    let f_hi = div_ceil(&(&s_hi * &scale), &l_lo);
    Fixed { lo: &e_fixed + f_lo, hi: &e_fixed + f_hi, prec }
}

impl Fixed {
    /// Multiplies by a non-negative rational with outward rounding.
    pub fn mul_ratio(&self, r: &Ratio) -> Fixed {
        Fixed {
            lo: div_floor(&(&self.lo * &r.num), &r.den),
            hi: div_ceil(&(&self.hi * &r.num), &r.den),
            prec: self.prec,
        }
    }

    /// `⌈value⌉` if the enclosure determines it.
    pub fn ceil(&self) -> Option<BigUint> {
        let c = |v: &BigUint| {
            let unit = BigUint::one() << self.prec as usize;
            div_ceil(v, &unit)
        };
        let (a, b) = (c(&self.lo), c(&self.hi));
        (a == b).then_some(a)
    }

    /// `⌈√value⌉` if the enclosure determines it.
    pub fn ceil_sqrt(&self) -> Option<BigUint> {
        let (a, b) = (ceil_sqrt_fixed(&self.lo, self.prec), ceil_sqrt_fixed(&self.hi, self.prec));
        (a == b).then_some(a)
    }
}

/// Smallest integer `k` with `k² ≥ v / 2^prec`.
fn ceil_sqrt_fixed(v: &BigUint, prec: u32) -> BigUint {
    let mut k = (v >> prec as usize).sqrt();
    while ((&k * &k) << (prec as usize)) < *v {
        k += 1u32;
    }
    k
}

/// `⌈√n⌉` for an integer.
pub fn ceil_sqrt_int(n: &BigUint) -> BigUint {
    ceil_sqrt_fixed(n, 0)
}
