//! Piecewise-linear functions on `[0,1]` with exact rational
//! breakpoints. Evaluation, composition, crossings, and sorted
//! envelopes are all exact; no floating point enters anywhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlError {
    #[error("a path needs at least two breakpoints (t=0 and t=1)")]
    TooFewBreakpoints,
    #[error("breakpoints must start at t=0 and end at t=1")]
    BadEndpoints,
    #[error("breakpoint parameters must be strictly increasing")]
    NonIncreasing,
    #[error("evaluation parameter {0} outside [0,1]")]
    Domain(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A piecewise-linear function `[0,1] -> Q` given by breakpoints
/// `(t, value)` with strictly increasing `t` from 0 to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlPath {
    points: Vec<(BigRational, BigRational)>,
}

impl PlPath {
    pub fn new(points: Vec<(BigRational, BigRational)>) -> Result<PlPath, PlError> {
        if points.len() < 2 {
            return Err(PlError::TooFewBreakpoints);
        }
        if !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
            return Err(PlError::BadEndpoints);
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PlError::NonIncreasing);
            }
        }
        Ok(PlPath { points })
    }

    pub fn constant(v: BigRational) -> PlPath {
        PlPath {
            points: vec![(rat_int(0), v.clone()), (rat_int(1), v)],
        }
    }

    pub fn identity() -> PlPath {
        PlPath {
            points: vec![(rat_int(0), rat_int(0)), (rat_int(1), rat_int(1))],
        }
    }

    /// The straight line from `(0, a)` to `(1, b)`.
    pub fn line(a: BigRational, b: BigRational) -> PlPath {
        PlPath {
            points: vec![(rat_int(0), a), (rat_int(1), b)],
        }
    }

    pub fn points(&self) -> &[(BigRational, BigRational)] {
        &self.points
    }

    pub fn breakpoint_params(&self) -> Vec<BigRational> {
        self.points.iter().map(|(t, _)| t.clone()).collect()
    }

    pub fn value_at_zero(&self) -> &BigRational {
        &self.points[0].1
    }

    pub fn value_at_one(&self) -> &BigRational {
        &self.points[self.points.len() - 1].1
    }

    pub fn eval(&self, t: &BigRational) -> Result<BigRational, PlError> {
        if t.is_negative() || t > &rat_int(1) {
            return Err(PlError::Domain(t.to_string()));
        }
        let mut idx = self.points.len() - 2;
        for i in 0..self.points.len() - 1 {
            if t <= &self.points[i + 1].0 {
                idx = i;
                break;
            }
        }
        let (t0, v0) = &self.points[idx];
        let (t1, v1) = &self.points[idx + 1];
        if t == t0 {
            return Ok(v0.clone());
        }
        if t == t1 {
            return Ok(v1.clone());
        }
        let slope = (v1 - v0) / (t1 - t0);
        Ok(v0 + slope * (t - t0))
    }

    /// Exact composite `self(inner(t))`. The inner path must take
    /// values in `[0,1]`.
    pub fn compose(&self, inner: &PlPath) -> Result<PlPath, PlError> {
        let mut params: Vec<BigRational> = inner.breakpoint_params();
        // Inside each linear segment of `inner`, add the parameters
        // where it crosses a breakpoint level of `self`.
        for w in inner.points.windows(2) {
            let (t0, v0) = (&w[0].0, &w[0].1);
            let (t1, v1) = (&w[1].0, &w[1].1);
            if v0 == v1 {
                continue;
            }
            for (level, _) in &self.points {
                let lo = v0.min(v1);
                let hi = v0.max(v1);
                if level > lo && level < hi {
                    let t = t0 + (t1 - t0) * (level - v0) / (v1 - v0);
                    params.push(t);
                }
            }
        }
        params.sort();
        params.dedup();
        let mut points = Vec::with_capacity(params.len());
        for t in params {
            let v = self.eval(&inner.eval(&t)?)?;
            points.push((t, v));
        }
        Ok(PlPath { points }.simplified())
    }

    /// Drops interior breakpoints that lie on the segment through
    /// their neighbors.
    pub fn simplified(&self) -> PlPath {
        let mut points: Vec<(BigRational, BigRational)> = vec![self.points[0].clone()];
        for i in 1..self.points.len() - 1 {
            let (t0, v0) = points.last().unwrap().clone();
            let (t1, v1) = self.points[i].clone();
            let (t2, v2) = self.points[i + 1].clone();
            // collinear iff (v1-v0)(t2-t1) == (v2-v1)(t1-t0)
            let lhs = (&v1 - &v0) * (&t2 - &t1);
            let rhs = (&v2 - &v1) * (&t1 - &t0);
            if lhs != rhs {
                points.push((t1, v1));
            }
        }
        points.push(self.points[self.points.len() - 1].clone());
        PlPath { points }
    }

    pub fn min_value(&self) -> BigRational {
        self.points.iter().map(|(_, v)| v).min().unwrap().clone()
    }

    pub fn max_value(&self) -> BigRational {
        self.points.iter().map(|(_, v)| v).max().unwrap().clone()
    }

    /// Total variation: sum of |value jumps| over the breakpoints.
    pub fn total_variation(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for w in self.points.windows(2) {
            acc += (&w[1].1 - &w[0].1).abs();
        }
        acc
    }

    /// Exact supremum of |self - other| over [0,1].
    pub fn sup_distance(&self, other: &PlPath) -> BigRational {
        let mut params = self.breakpoint_params();
        params.extend(other.breakpoint_params());
        params.sort();
        params.dedup();
        params
            .iter()
            .map(|t| (self.eval(t).unwrap() - other.eval(t).unwrap()).abs())
            .max()
            .unwrap()
    }

    /// Whether all values lie in `[0,1]`.
    pub fn within_unit_interval(&self) -> bool {
        !self.min_value().is_negative() && self.max_value() <= rat_int(1)
    }
}

/// Parameters where two paths cross or touch.
pub fn crossing_params(a: &PlPath, b: &PlPath) -> Vec<BigRational> {
    let mut params = a.breakpoint_params();
    params.extend(b.breakpoint_params());
    params.sort();
    params.dedup();
    let mut out = Vec::new();
    for w in params.windows(2) {
        let (t0, t1) = (&w[0], &w[1]);
        let d0 = a.eval(t0).unwrap() - b.eval(t0).unwrap();
        let d1 = a.eval(t1).unwrap() - b.eval(t1).unwrap();
        if d0.is_zero() {
            out.push(t0.clone());
        }
        if !d0.is_zero() && !d1.is_zero() && d0.is_negative() != d1.is_negative() {
            let t = t0 + (t1 - t0) * &d0 / (&d0 - &d1);
            out.push(t);
        }
    }
    if let Some(last) = params.last() {
        if (a.eval(last).unwrap() - b.eval(last).unwrap()).is_zero() {
            out.push(last.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Replaces a family of paths by its sorted envelopes: the k-th output
/// path takes, at every parameter, the k-th smallest value of the
/// family. The pointwise multiset of values is preserved and each
/// envelope is continuous piecewise-linear.
pub fn sorted_envelopes(paths: &[PlPath]) -> Vec<PlPath> {
    if paths.len() <= 1 {
        return paths.to_vec();
    }
    let mut params: Vec<BigRational> = Vec::new();
    for p in paths {
        params.extend(p.breakpoint_params());
    }
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            params.extend(crossing_params(&paths[i], &paths[j]));
        }
    }
    params.sort();
    params.dedup();
    let mut columns: Vec<Vec<BigRational>> = Vec::with_capacity(params.len());
    for t in &params {
        let mut vals: Vec<BigRational> = paths.iter().map(|p| p.eval(t).unwrap()).collect();
        vals.sort();
        columns.push(vals);
    }
    (0..paths.len())
        .map(|k| {
            let pts: Vec<(BigRational, BigRational)> = params
                .iter()
                .cloned()
                .zip(columns.iter().map(|c| c[k].clone()))
                .collect();
            PlPath { points: pts }.simplified()
        })
        .collect()
}

/// Optimal matching distance between two multisets of rationals of the
/// same size: sort both and take the maximal coordinate gap (optimal
/// in one dimension).
pub fn matching_distance(a: &[BigRational], b: &[BigRational]) -> BigRational {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x.iter()
        .zip(y.iter())
        .map(|(u, v)| (u - v).abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
