//! Extended-precision summation for the real-argument series.
//!
//! Every raw function handled here has the shape
//!
//! ```text
//! F(x) = C * x^p * sum_n  w^n / ((a)_n (b)_n),    w = -x^2/4,
//! ```
//!
//! and its k-th derivative is `C x^(p-k) sum_n (p+2n)_(k) w^n / ((a)_n (b)_n)` with
//! `(.)_(k)` the falling factorial. For large x the individual terms reach
//! about `e^x` while the sum stays O(1), so the terms are carried as big-integer
//! mantissas whose width is chosen from a cheap log-magnitude pre-pass. The
//! parameters `a`, `b`, `p` and `x` enter as exact dyadic rationals, which keeps
//! every per-term factor exact up to the working precision.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{EvalOptions, SeriesValue};
use crate::error::{Error, Result};

/// Exact binary rational `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub(crate) fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "dyadic conversion of a non-finite value");
        if v == 0.0 {
            return Dyadic {
                mant: BigInt::zero(),
                exp: 0,
            };
        }
        let bits = v.to_bits();
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut m, mut e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let tz = m.trailing_zeros();
        m >>= tz;
        e += tz as i64;
        let mant = if v < 0.0 {
            -BigInt::from(m)
        } else {
            BigInt::from(m)
        };
        Dyadic { mant, exp: e }
    }

    pub(crate) fn from_i64(v: i64) -> Self {
        Dyadic {
            mant: BigInt::from(v),
            exp: 0,
        }
    }

    pub(crate) fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.min(other.exp);
        let lhs = &self.mant << (self.exp - exp) as usize;
        let rhs = &other.mant << (other.exp - exp) as usize;
        Dyadic {
            mant: lhs + rhs,
            exp,
        }
    }

    pub(crate) fn add_f64(&self, v: f64) -> Dyadic {
        self.add(&Dyadic::from_f64(v))
    }

    pub(crate) fn halve(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp - 1,
        }
    }

    /// Smallest `s >= 0` such that `self * 2^s` is an integer.
    pub(crate) fn scale(&self) -> i64 {
        if self.mant.is_zero() {
            0
        } else {
            (-self.exp).max(0)
        }
    }

    /// `self * 2^s` as an integer; `s` must be at least `self.scale()`.
    pub(crate) fn numerator_at(&self, s: i64) -> BigInt {
        debug_assert!(s >= self.scale());
        let shift = self.exp + s;
        if shift >= 0 {
            &self.mant << shift as usize
        } else {
            // only reachable for zero mantissa
            BigInt::zero()
        }
    }

    pub(crate) fn to_f64(&self) -> f64 {
        big_to_f64(&self.mant, self.exp)
    }

    pub(crate) fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }
}

/// `m * 2^exp` rounded to the nearest double (up to one ulp).
pub(crate) fn big_to_f64(m: &BigInt, exp: i64) -> f64 {
    let bits = m.bits() as i64;
    if bits == 0 {
        return 0.0;
    }
    let shift = (bits - 64).max(0);
    let top = if shift > 0 {
        (m >> shift as usize).to_f64().unwrap_or(0.0)
    } else {
        m.to_f64().unwrap_or(0.0)
    };
    let e = (exp + shift).clamp(i32::MIN as i64 / 2, i32::MAX as i64 / 2);
    libm::ldexp(top, e as i32)
}

fn shift_signed(v: BigInt, by: i64) -> BigInt {
    if by >= 0 {
        v << by as usize
    } else {
        v >> (-by) as usize
    }
}

/// One member of the `C x^p 1F2`-type family.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    pub prefactor: f64,
    pub power: Dyadic,
    pub a: Dyadic,
    pub b: Dyadic,
}

impl Kernel {
    pub(crate) fn new(prefactor: f64, power: Dyadic, a: Dyadic, b: Dyadic) -> Self {
        assert!(
            a.is_positive() && b.is_positive(),
            "series denominators must stay positive"
        );
        Kernel {
            prefactor,
            power,
            a,
            b,
        }
    }

    /// Falling-factorial multiplier `(p+2n)(p+2n-1)...(p+2n-k+1)` in f64.
    fn multiplier_f64(&self, n: usize, k: u32) -> f64 {
        let p = self.power.to_f64();
        (0..k).fold(1.0, |acc, j| acc * (p + 2.0 * n as f64 - j as f64))
    }

    /// Numerator of the multiplier over `2^(scale * k)`.
    fn multiplier_exact(&self, n: usize, k: u32, pnum: &BigInt, scale: i64) -> BigInt {
        let mut acc = BigInt::from(1);
        for j in 0..k as i64 {
            let shift = BigInt::from(2 * n as i64 - j) << scale as usize;
            acc *= pnum + shift;
        }
        acc
    }

    /// Value of the derivatives listed in `orders` at `x >= 0`, sharing one pass.
    pub(crate) fn evaluate(
        &self,
        x: f64,
        orders: &[u32],
        opts: &EvalOptions,
    ) -> Result<Vec<SeriesValue<f64>>> {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::domain(format!("argument must be finite and >= 0, got {x}")));
        }
        if x == 0.0 {
            return orders.iter().map(|&k| self.at_origin(k)).collect();
        }
        let p = self.power.to_f64();
        let scales: Vec<f64> = orders
            .iter()
            .map(|&k| self.prefactor * x.powf(p - k as f64))
            .collect();
        let max_scale_log2 = scales
            .iter()
            .map(|s| s.abs().log2())
            .fold(f64::NEG_INFINITY, f64::max);

        let plan = self.plan(x, orders, &scales, opts);
        let frac_bits = 74 + log2_ceil(plan.terms + 1) + max_scale_log2.max(0.0).ceil() as i64;
        let prec = plan.peak_log2.max(0.0).ceil() as i64 + frac_bits + 8;

        let xd = Dyadic::from_f64(x);
        let x2 = &xd.mant * &xd.mant;
        let s = self.a.scale().max(self.b.scale());
        let a_num = self.a.numerator_at(s);
        let b_num = self.b.numerator_at(s);
        let w_shift = 2 * xd.exp - 2 + 2 * s;
        let p_scale = self.power.scale();
        let p_num = self.power.numerator_at(p_scale);
        let alternating_from = orders
            .iter()
            .map(|&k| ((k as f64 - 1.0 - p) / 2.0).floor().max(0.0) as usize + 1)
            .max()
            .unwrap_or(1);

        let mut mant = BigInt::from(1) << prec as usize;
        let mut exp = -prec;
        let mut sums = vec![BigInt::zero(); orders.len()];
        let scale_log2: Vec<f64> = scales.iter().map(|s| s.abs().log2()).collect();
        let (a, b) = (self.a.to_f64(), self.b.to_f64());
        let x2f = x * x / 4.0;
        let mut n = 0usize;

        loop {
            // fold term n into every requested order
            for (j, &k) in orders.iter().enumerate() {
                if k == 0 {
                    sums[j] += shift_signed(mant.clone(), exp + frac_bits);
                } else {
                    let contrib = &mant * self.multiplier_exact(n, k, &p_num, p_scale);
                    sums[j] += shift_signed(contrib, exp - p_scale * k as i64 + frac_bits);
                }
            }

            // advance to term n+1
            let n_big = BigInt::from(n) << s as usize;
            let denom = (&n_big + &a_num) * (&n_big + &b_num);
            let num = &mant * &x2;
            let extra = (prec + denom.bits() as i64 + 2 - num.bits() as i64).max(0);
            let mut next = -((num << extra as usize) / &denom);
            exp += w_shift - extra;
            let excess = next.bits() as i64 - prec;
            if excess > 0 {
                next >>= excess as usize;
                exp += excess;
            }
            let base_ratio = x2f / ((n as f64 + a) * (n as f64 + b));
            mant = next;
            n += 1;

            // cheap magnitude tests; exact values are only formed on exit
            let term_log2 = mant.bits() as f64 + exp as f64;
            let converged = n >= opts.min_terms
                && n >= alternating_from
                && orders.iter().enumerate().all(|(j, &k)| {
                    let m_next = self.multiplier_f64(n, k).abs();
                    let m_prev = self.multiplier_f64(n - 1, k).abs();
                    let decreasing = base_ratio * m_next < m_prev;
                    let next_log2 = scale_log2[j] + term_log2 + m_next.log2();
                    let sum_bits = sums[j].bits() as f64;
                    let value_lower_log2 = if sum_bits == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        scale_log2[j] + sum_bits - 1.0 - frac_bits as f64
                    };
                    decreasing && next_log2 < opts.tolerance.log2() + value_lower_log2.max(0.0)
                });
            if converged || n >= opts.max_terms {
                // term m carries a relative error below (m+1) 2^(2-prec); each fold
                // into the fixed-point sums truncates once more
                let nf = n as f64 + 1.0;
                let rounding_rel = nf * nf * (plan.peak_log2 - prec as f64 + 3.0).exp2()
                    + nf * (-(frac_bits as f64) + 1.0).exp2();
                let next_term = big_to_f64(&mant, exp);
                let out: Vec<SeriesValue<f64>> = orders
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| {
                        let value = scales[j] * big_to_f64(&sums[j], -frac_bits);
                        let omitted = (scales[j] * next_term * self.multiplier_f64(n, k)).abs();
                        SeriesValue {
                            value,
                            error_bound: omitted
                                + scales[j].abs() * rounding_rel
                                + 4.0 * f64::EPSILON * value.abs(),
                            terms_used: n,
                        }
                    })
                    .collect();
                if converged {
                    return Ok(out);
                }
                let worst = &out[0];
                return Err(Error::Truncation {
                    best: worst.value.into(),
                    bound: worst.error_bound,
                    terms: n,
                });
            }
        }
    }

    /// Peak term magnitude (log2) and a term-count estimate.
    fn plan(&self, x: f64, orders: &[u32], scales: &[f64], opts: &EvalOptions) -> Plan {
        let lw = (x * x / 4.0).log2();
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        let tol_log2 = opts.tolerance.log2();
        let mut lg = 0.0f64;
        let mut peak = 0.0f64;
        let mut n = 0usize;
        loop {
            let mut small = true;
            for (&k, sc) in orders.iter().zip(scales) {
                let m = self.multiplier_f64(n, k).abs();
                if m == 0.0 {
                    continue;
                }
                let l = lg + m.log2();
                peak = peak.max(l);
                if l + sc.abs().log2() > tol_log2 - 12.0 {
                    small = false;
                }
            }
            let ratio_log2 = lw - (n as f64 + a).log2() - (n as f64 + b).log2();
            if (small && ratio_log2 < 0.0 && n >= opts.min_terms) || n >= opts.max_terms {
                return Plan {
                    peak_log2: peak,
                    terms: n + 1,
                };
            }
            lg += ratio_log2;
            n += 1;
        }
    }

    /// `F^(k)(0)`: only the term with `p + 2n - k = 0` survives.
    fn at_origin(&self, k: u32) -> Result<SeriesValue<f64>> {
        let p = self.power.to_f64();
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        let mut coeff = 1.0;
        for n in 0..=(k as usize) {
            let expo = p + 2.0 * n as f64 - k as f64;
            let mult = self.multiplier_f64(n, k);
            if expo < 0.0 && mult != 0.0 {
                return Err(Error::domain(format!(
                    "derivative of order {k} is singular at the origin"
                )));
            }
            if expo == 0.0 {
                return Ok(SeriesValue {
                    value: self.prefactor * mult * coeff,
                    error_bound: 0.0,
                    terms_used: n + 1,
                });
            }
            coeff *= -0.25 / ((n as f64 + a) * (n as f64 + b));
        }
        Ok(SeriesValue {
            value: 0.0,
            error_bound: 0.0,
            terms_used: 1,
        })
    }
}

struct Plan {
    peak_log2: f64,
    terms: usize,
}

fn log2_ceil(n: usize) -> i64 {
    (usize::BITS - n.leading_zeros()) as i64
}
