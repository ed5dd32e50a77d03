//! Space-time solution fields on uniform rectangular grids.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::theta::StripDomain;

/// Callable initial datum.
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Callable boundary datum.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Callable source `(x, t) -> value`.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Callable semilinear source `(x, t, u) -> value`.
pub type StateSourceFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Solution values sampled on a uniform `(x, t)` grid over `[0, L] x [0, T]`.
///
/// Storage is t-major: `values[it * nx + ix]`.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub nx: usize,
    pub nt: usize,
    pub domain: StripDomain,
    pub values: Vec<f64>,
    /// Provenance tag of the producing operation.
    pub metadata: String,
}

impl SpaceTimeField {
    pub fn zeros(nx: usize, nt: usize, domain: StripDomain, metadata: impl Into<String>) -> Result<Self> {
        if nx < 3 || nt < 2 {
            return Err(Error::Grid(format!(
                "field grid must satisfy nx >= 3 and nt >= 2, got {nx} x {nt}"
            )));
        }
        domain.validate()?;
        Ok(Self {
            nx,
            nt,
            domain,
            values: vec![0.0; nx * nt],
            metadata: metadata.into(),
        })
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.domain.width / (self.nx - 1) as f64
    }

    #[inline]
    pub fn ht(&self) -> f64 {
        self.domain.horizon / (self.nt - 1) as f64
    }

    #[inline]
    pub fn x_coord(&self, ix: usize) -> f64 {
        self.hx() * ix as f64
    }

    #[inline]
    pub fn t_coord(&self, it: usize) -> f64 {
        self.ht() * it as f64
    }

    #[inline]
    pub fn at(&self, ix: usize, it: usize) -> f64 {
        self.values[it * self.nx + ix]
    }

    #[inline]
    pub fn set(&mut self, ix: usize, it: usize, v: f64) {
        self.values[it * self.nx + ix] = v;
    }

    pub fn assert_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Data(format!(
                "field '{}' contains non-finite values",
                self.metadata
            )))
        }
    }

    /// Sup-norm of the nodewise difference; grids must match.
    pub fn sup_distance(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.nx != other.nx || self.nt != other.nt {
            return Err(Error::Grid(format!(
                "grid mismatch: {}x{} vs {}x{}",
                self.nx, self.nt, other.nx, other.nt
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation; arguments are clamped to the grid box.
    pub fn sample(&self, x: f64, t: f64) -> f64 {
        let fx = (x / self.hx()).clamp(0.0, (self.nx - 1) as f64);
        let ft = (t / self.ht()).clamp(0.0, (self.nt - 1) as f64);
        let ix = (fx.floor() as usize).min(self.nx - 2);
        let it = (ft.floor() as usize).min(self.nt - 2);
        let ax = fx - ix as f64;
        let at = ft - it as f64;
        let v00 = self.at(ix, it);
        let v10 = self.at(ix + 1, it);
        let v01 = self.at(ix, it + 1);
        let v11 = self.at(ix + 1, it + 1);
        (1.0 - at) * ((1.0 - ax) * v00 + ax * v10) + at * ((1.0 - ax) * v01 + ax * v11)
    }

    /// CSV serialization: header `x,t,u`, rows ordered by t then x,
    /// 17-significant-digit decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 60 + 16);
        out.push_str("x,t,u\n");
        for it in 0..self.nt {
            let t = self.t_coord(it);
            for ix in 0..self.nx {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    self.x_coord(ix),
                    t,
                    self.at(ix, it)
                ));
            }
        }
        out
    }
}
