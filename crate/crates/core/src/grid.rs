use crate::error::{Error, Result};

/// Uniform measurement grid `x_k = a + (k/count)(b − a)` for `k = 1..=count`.
///
/// The left endpoint is excluded and the right endpoint included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    points: Vec<f64>,
}

pub const DEFAULT_GRID_COUNT: usize = 1000;

impl Grid {
    pub fn new(a: f64, b: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidGrid(format!(
                "need finite a < b, got [{a}, {b}]"
            )));
        }
        let n = count as f64;
        let points = (1..=count).map(|k| a + (k as f64 / n) * (b - a)).collect();
        Ok(Self { a, b, points })
    }

    pub fn from_interval((a, b): (f64, f64), count: usize) -> Result<Self> {
        Self::new(a, b, count)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}
