//! Real Bessel functions J0 and J1.
//!
//! Two evaluation regimes: an extended-precision power series below
//! `series_cutoff` and the large-argument cosine expansion above it. The
//! series regime runs in double-double arithmetic because the alternating
//! terms grow to ~exp(|z|) before cancelling; plain f64 summation would lose
//! the accuracy target well before the regimes meet.

use crate::error::{Error, Result};

/// Evaluation policy for the Bessel kernel functions.
#[derive(Debug, Clone, Copy)]
pub struct BesselAccuracy {
    /// Relative error target inside the supported range `|z| <= 1e4`.
    pub target_rel_error: f64,
    /// Argument magnitude separating the series and asymptotic regimes.
    pub series_cutoff: f64,
}

impl Default for BesselAccuracy {
    fn default() -> Self {
        Self {
            target_rel_error: 1e-12,
            series_cutoff: 16.0,
        }
    }
}

/// Largest argument magnitude inside the accuracy contract.
pub const BESSEL_CONTRACT_RANGE: f64 = 1e4;

// ---------------------------------------------------------------------------
// Double-double helpers (value = hi + lo, |lo| <= ulp(hi)/2).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, f64::mul_add(a, b, -p))
}

impl Dd {
    #[inline]
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let (p, e) = two_prod(q, d);
        let r = ((self.hi - p) - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q, r);
        Dd { hi, lo }
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

// ---------------------------------------------------------------------------
// Power-series regime.
// ---------------------------------------------------------------------------

/// J_nu(z) for nu in {0, 1} and 0 <= z <= series cutoff, by the ascending
/// series with multiplicative term updates in double-double precision.
fn j_series(nu: u32, z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * z;
    let (qh, ql) = two_prod(half, half);
    let q = Dd { hi: qh, lo: ql };

    let mut term = if nu == 0 { Dd::from(1.0) } else { Dd::from(half) };
    let mut sum = term;
    for k in 1..400u32 {
        let denom = (k as f64) * ((k + nu) as f64);
        term = term.mul(q.neg()).div_f64(denom);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && k > 4 {
            break;
        }
    }
    sum.value()
}

// ---------------------------------------------------------------------------
// Large-argument regime.
// ---------------------------------------------------------------------------

/// Modulus/phase expansion coefficients P(mu, z), Q(mu, z) with mu = 4 nu^2,
/// summed to optimal truncation.
fn asymptotic_pq(mu: f64, z: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    for m in 0..40u32 {
        let odd = (2 * m + 1) as f64;
        term *= (mu - odd * odd) / (8.0 * z * (m + 1) as f64);
        if term.abs() >= prev {
            break; // divergent tail of the asymptotic series
        }
        prev = term.abs();
        let k = m + 1; // term index in the Stokes sequence
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn j_asymptotic(nu: u32, z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mu = (4 * nu * nu) as f64;
    let (p, q) = asymptotic_pq(mu, z);
    let chi = z - (2.0 * nu as f64 + 1.0) * std::f64::consts::FRAC_PI_4;
    let (s, c) = chi.sin_cos();
    (2.0 / (std::f64::consts::PI * z)).sqrt() * (p * c - q * s)
}

// ---------------------------------------------------------------------------
// Public surface.
// ---------------------------------------------------------------------------

impl BesselAccuracy {
    /// J0 under this policy. Returns the value and whether `z` lies inside
    /// the accuracy contract.
    pub fn eval_j0(&self, z: f64) -> Result<(f64, bool)> {
        if !z.is_finite() {
            return Err(Error::domain("bessel_j0", format!("non-finite argument {z}")));
        }
        let az = z.abs();
        let value = if az <= self.series_cutoff {
            j_series(0, az)
        } else {
            j_asymptotic(0, az)
        };
        Ok((value, az <= BESSEL_CONTRACT_RANGE))
    }

    /// J1 under this policy; odd symmetry is exact by construction.
    pub fn eval_j1(&self, z: f64) -> Result<(f64, bool)> {
        if !z.is_finite() {
            return Err(Error::domain("bessel_j1", format!("non-finite argument {z}")));
        }
        let az = z.abs();
        let v = if az <= self.series_cutoff {
            j_series(1, az)
        } else {
            j_asymptotic(1, az)
        };
        let v = if z.is_sign_negative() { -v } else { v };
        Ok((v, az <= BESSEL_CONTRACT_RANGE))
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(z: f64) -> Result<f64> {
    BesselAccuracy::default().eval_j0(z).map(|(v, _)| v)
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(z: f64) -> Result<f64> {
    BesselAccuracy::default().eval_j1(z).map(|(v, _)| v)
}

/// Infallible J1 for hot loops that have already validated their inputs.
#[inline]
pub(crate) fn j1_raw(z: f64) -> f64 {
    let az = z.abs();
    let v = if az <= 16.0 {
        j_series(1, az)
    } else {
        j_asymptotic(1, az)
    };
    if z.is_sign_negative() {
        -v
    } else {
        v
    }
}
