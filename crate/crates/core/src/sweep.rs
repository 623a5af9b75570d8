//! Sweep axes, parallel grid evaluation, and extremum location.
//!
//! `map_grid` evaluates a function over the cartesian product of two axes.
//! With the `parallel` feature (default) rows are distributed across the
//! rayon pool; `map_grid_seq` is always available and produces identical
//! output in the same order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Axis spacing for sweep grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis: `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "Axis::default_spacing")]
    pub spacing: Spacing,
}

impl Axis {
    fn default_spacing() -> Spacing {
        Spacing::Linear
    }

    pub fn linear(name: &str, min: f64, max: f64, points: usize) -> Self {
        Axis {
            name: name.to_string(),
            min,
            max,
            points,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, points: usize) -> Self {
        Axis {
            name: name.to_string(),
            min,
            max,
            points,
            spacing: Spacing::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::validation(
                format!("axis {}", self.name),
                "sweep axis needs at least 2 points",
            ));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(Error::validation(
                format!("axis {}", self.name),
                "axis bounds must be finite with min < max",
            ));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::validation(
                format!("axis {}", self.name),
                "log axis requires min > 0",
            ));
        }
        Ok(())
    }

    /// Materializes the axis values. Endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            let v = match self.spacing {
                Spacing::Linear => self.min + (self.max - self.min) * t,
                Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
            };
            out.push(v);
        }
        out[0] = self.min;
        out[n - 1] = self.max;
        out
    }
}

/// Sequential grid map: `out[i][j] = f(xs[i], ys[j])`.
pub fn map_grid_seq<T, F>(xs: &[f64], ys: &[f64], f: F) -> Vec<Vec<T>>
where
    F: Fn(f64, f64) -> T,
{
    xs.iter()
        .map(|&x| ys.iter().map(|&y| f(x, y)).collect())
        .collect()
}

/// Parallel grid map with row-major ordering identical to `map_grid_seq`.
#[cfg(feature = "parallel")]
pub fn map_grid<T, F>(xs: &[f64], ys: &[f64], f: F) -> Vec<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> T + Sync,
{
    xs.par_iter()
        .map(|&x| ys.iter().map(|&y| f(x, y)).collect())
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_grid<T, F>(xs: &[f64], ys: &[f64], f: F) -> Vec<Vec<T>>
where
    T: Send,
    F: Fn(f64, f64) -> T + Sync,
{
    map_grid_seq(xs, ys, f)
}

/// Sequential 1-D map.
pub fn map_values_seq<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    F: Fn(f64) -> T,
{
    xs.iter().map(|&x| f(x)).collect()
}

/// Parallel 1-D map with ordering identical to `map_values_seq`.
#[cfg(feature = "parallel")]
pub fn map_values<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    xs.par_iter().map(|&x| f(x)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_values<T, F>(xs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    map_values_seq(xs, f)
}

/// Grid extremum with all tied locations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridExtremum {
    pub value: f64,
    /// Row/column indices of every cell within the tie tolerance.
    pub locations: Vec<(usize, usize)>,
}

/// Finds the grid minimum, reporting every location whose value lies within
/// `rel_tol` (relative) of the minimum. NaN cells are ignored.
pub fn grid_min(values: &[Vec<f64>], rel_tol: f64) -> Option<GridExtremum> {
    let mut min = f64::INFINITY;
    for row in values {
        for &v in row {
            if v.is_finite() && v < min {
                min = v;
            }
        }
    }
    if !min.is_finite() {
        return None;
    }
    let tol = rel_tol * min.abs().max(f64::MIN_POSITIVE);
    let mut locations = Vec::new();
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.is_finite() && v - min <= tol {
                locations.push((i, j));
            }
        }
    }
    Some(GridExtremum {
        value: min,
        locations,
    })
}

/// Finds the grid maximum, reporting every tied location (see `grid_min`).
pub fn grid_max(values: &[Vec<f64>], rel_tol: f64) -> Option<GridExtremum> {
    let negated: Vec<Vec<f64>> = values
        .iter()
        .map(|row| row.iter().map(|v| -v).collect())
        .collect();
    grid_min(&negated, rel_tol).map(|m| GridExtremum {
        value: -m.value,
        locations: m.locations,
    })
}

/// Index of the maximum value of a 1-D slice, ignoring NaN. Returns None for
/// empty or all-NaN input.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best.map_or(true, |(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}
