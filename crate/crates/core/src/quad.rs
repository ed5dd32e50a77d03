//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7/15-point Kronrod pair on each segment, with global error control by
//! repeated bisection of the segment carrying the largest error estimate.
//! The subdivision order is deterministic, so results are bit-reproducible
//! across runs and independent of any outer parallelism.

use num_complex::Complex64;

/// Gauss-Kronrod 7-15 abscissae (positive half, Kronrod ordering).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
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

/// Scalar types the quadrature engine can accumulate.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn norm(self) -> f64 {
        self.norm()
    }
}

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the total integral.
    pub abs_tol: f64,
    /// Relative tolerance on the total integral.
    pub rel_tol: f64,
    /// Maximum number of segments before giving up.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 400,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn target(&self, value_norm: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value_norm)
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// One Kronrod 7-15 panel; returns (integral, error estimate).
fn kronrod_panel<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    let mut res_abs = fc.norm() * WGK[7];

    let mut values = [T::zero(); 15];
    values[7] = fc;

    for j in 0..7 {
        let abscissa = half * XGK[j];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        values[j] = f1;
        values[14 - j] = f2;
        let pair = f1.add(f2);
        kronrod = kronrod.add(pair.scale(WGK[j]));
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            // Odd Kronrod indices carry the embedded Gauss nodes.
            gauss = gauss.add(pair.scale(WG[j / 2]));
        }
    }

    let mean = kronrod.scale(0.5);
    let mut res_asc = WGK[7] * values[7].sub(mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * (values[j].sub(mean).norm() + values[14 - j].sub(mean).norm());
    }

    let raw_err = kronrod.sub(gauss).norm() * half.abs();
    let res_asc = res_asc * half.abs();
    let res_abs = res_abs * half.abs();

    // QUADPACK-style error rescaling.
    let mut err = raw_err;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let round_floor = 50.0 * f64::EPSILON * res_abs;
    if round_floor > err {
        err = round_floor;
    }

    (kronrod.scale(half), err)
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> QuadResult<T> {
    integrate_segmented(&mut f, &[a, b], cfg)
}

/// Integrate with caller-supplied initial breakpoints (sorted, endpoints included).
///
/// Breakpoints let the caller pre-split around known narrow features so the
/// first panels already see them.
pub fn integrate_segmented<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> QuadResult<T> {
    debug_assert!(points.len() >= 2);
    let mut evaluations = 0usize;
    let mut segments: Vec<Segment<T>> = Vec::with_capacity(points.len().max(16));

    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = kronrod_panel(f, a, b);
        evaluations += 15;
        segments.push(Segment { a, b, value, error });
    }
    if segments.is_empty() {
        return QuadResult {
            value: T::zero(),
            abs_error: 0.0,
            evaluations,
            converged: true,
        };
    }

    loop {
        let mut total = T::zero();
        let mut total_err = 0.0;
        for s in &segments {
            total = total.add(s.value);
            total_err += s.error;
        }
        if total_err <= cfg.target(total.norm()) {
            return QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
                converged: true,
            };
        }
        if segments.len() >= cfg.max_intervals {
            return QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
                converged: false,
            };
        }

        // Deterministic choice: first segment attaining the maximal error.
        let mut worst = 0;
        for (i, s) in segments.iter().enumerate() {
            if s.error > segments[worst].error {
                worst = i;
            }
        }
        let Segment { a, b, .. } = segments[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval at floating-point resolution; cannot split further.
            let mut total = T::zero();
            let mut total_err = 0.0;
            for s in &segments {
                total = total.add(s.value);
                total_err += s.error;
            }
            return QuadResult {
                value: total,
                abs_error: total_err,
                evaluations,
                converged: total_err <= cfg.target(total.norm()),
            };
        }
        let (v1, e1) = kronrod_panel(f, a, mid);
        let (v2, e2) = kronrod_panel(f, mid, b);
        evaluations += 30;
        segments[worst] = Segment {
            a,
            b: mid,
            value: v1,
            error: e1,
        };
        segments.push(Segment {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }
}

/// Builds `[a, .., b]` from interior candidate points, dropping those outside.
pub fn breakpoints(a: f64, b: f64, interior: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(interior.len() + 2);
    pts.push(a);
    for &p in interior {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    pts
}
