//! Bounded time scales as canonical unions of disjoint closed segments.
//!
//! A [`TimeScale`] is stored as an ordered list of [`Segment`]s with strictly
//! positive gaps between them. Isolated points are degenerate segments
//! (`lo == hi`), so a lattice is simply a list of degenerate segments and the
//! real interval `[a, b]` is a single segment.
//!
//! The jump operators follow the usual conventions: `sigma` at the maximum and
//! `rho` at the minimum return the point itself.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A closed segment `[lo, hi]`; `lo == hi` encodes an isolated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(Error::ReversedSegment { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(t: f64) -> Result<Self> {
        Self::new(t, t)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

impl From<Segment> for [f64; 2] {
    fn from(s: Segment) -> Self {
        [s.lo, s.hi]
    }
}

impl TryFrom<[f64; 2]> for Segment {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Segment::new(v[0], v[1])
    }
}

/// Left/right density of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Scattered,
    Dense,
}

/// Classification of a point of a time scale.
///
/// At the extremes the missing side is reported as scattered exactly when the
/// point is isolated, so an isolated maximum reads as scattered on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub right: Density,
    pub left: Density,
    pub is_min: bool,
    pub is_max: bool,
}

/// A nonempty, bounded, closed subset of the real line in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    segments: Vec<Segment>,
}

impl TimeScale {
    /// Canonicalize with exact endpoint comparison (snap tolerance 0).
    pub fn new(raw: impl IntoIterator<Item = Segment>) -> Result<Self> {
        Self::with_snap(raw, 0.0)
    }

    /// Canonicalize, merging segments whose gap does not exceed `snap`.
    ///
    /// A near-duplicate isolated point is absorbed instead of widening into a
    /// short dense segment.
    pub fn with_snap(raw: impl IntoIterator<Item = Segment>, snap: f64) -> Result<Self> {
        let mut raw: Vec<Segment> = raw.into_iter().collect();
        if raw.is_empty() {
            return Err(Error::EmptyScale);
        }
        for s in &raw {
            Segment::new(s.lo, s.hi)?;
        }
        raw.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));
        let snap = snap.max(0.0);
        let mut out: Vec<Segment> = Vec::with_capacity(raw.len());
        for s in raw {
            let Some(cur) = out.last_mut() else {
                out.push(s);
                continue;
            };
            if s.lo <= cur.hi {
                cur.hi = cur.hi.max(s.hi);
            } else if s.lo - cur.hi <= snap {
                if !s.is_point() {
                    cur.hi = s.hi;
                }
            } else {
                out.push(s);
            }
        }
        Ok(Self { segments: out })
    }

    /// The real interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::BadInterval { a, b });
        }
        Self::new([Segment::new(a, b)?])
    }

    /// Arithmetic lattice `start, start + step, ...` up to `stop` (inclusive).
    pub fn lattice(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidScaleSpec(format!("lattice step must be positive, got {step}")));
        }
        if !(start <= stop) {
            return Err(Error::BadInterval { a: start, b: stop });
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        let pts = (0..=n).map(|k| Segment::point(start + k as f64 * step));
        Self::new(pts.collect::<Result<Vec<_>>>()?)
    }

    /// Geometric points `min * q^k <= max`, with `q > 1` and `min > 0`.
    pub fn geometric(q: f64, min: f64, max: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidScaleSpec(format!("geometric ratio must exceed 1, got {q}")));
        }
        if !(min > 0.0) || !(min <= max) || !max.is_finite() {
            return Err(Error::InvalidScaleSpec(format!("geometric range needs 0 < min <= max, got {min}..{max}")));
        }
        let mut pts = Vec::new();
        let mut k = 0i32;
        loop {
            let t = min * q.powi(k);
            if t > max * (1.0 + 1e-12) {
                break;
            }
            pts.push(Segment::point(t)?);
            k += 1;
        }
        Self::new(pts)
    }

    /// Union of several scales.
    pub fn union<'a>(scales: impl IntoIterator<Item = &'a TimeScale>) -> Result<Self> {
        Self::new(scales.into_iter().flat_map(|s| s.segments.iter().copied()))
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn min(&self) -> f64 {
        self.segments[0].lo
    }

    pub fn max(&self) -> f64 {
        self.segments[self.segments.len() - 1].hi
    }

    /// True when every segment is an isolated point.
    pub fn is_discrete(&self) -> bool {
        self.segments.iter().all(Segment::is_point)
    }

    /// Index of the segment containing `t`.
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        let i = self.segments.partition_point(|s| s.hi < t);
        (i < self.segments.len() && self.segments[i].lo <= t).then_some(i)
    }

    fn locate(&self, t: f64) -> Result<usize> {
        self.segment_index(t).ok_or(Error::NotInScale { t })
    }

    /// The segment containing `t`.
    pub fn segment_of(&self, t: f64) -> Result<Segment> {
        Ok(self.segments[self.locate(t)?])
    }

    pub fn contains(&self, t: f64) -> bool {
        self.segment_index(t).is_some()
    }

    /// Forward jump operator.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let seg = self.segments[i];
        Ok(if t < seg.hi {
            t
        } else if i + 1 < self.segments.len() {
            self.segments[i + 1].lo
        } else {
            t
        })
    }

    /// Backward jump operator.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        let seg = self.segments[i];
        Ok(if t > seg.lo {
            t
        } else if i > 0 {
            self.segments[i - 1].hi
        } else {
            t
        })
    }

    /// Graininess `sigma(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.sigma(t)? - t)
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let i = self.locate(t)?;
        let seg = self.segments[i];
        let is_min = t == self.min();
        let is_max = t == self.max();
        let right = if is_max {
            if seg.is_point() {
                Density::Scattered
            } else {
                Density::Dense
            }
        } else if self.sigma(t)? > t {
            Density::Scattered
        } else {
            Density::Dense
        };
        let left = if is_min {
            if seg.is_point() {
                Density::Scattered
            } else {
                Density::Dense
            }
        } else if self.rho(t)? < t {
            Density::Scattered
        } else {
            Density::Dense
        };
        Ok(PointClass { right, left, is_min, is_max })
    }

    /// `T ∩ [a, b]` for `a < b` both in the scale.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        self.locate(a)?;
        self.locate(b)?;
        if !(a < b) {
            return Err(Error::BadInterval { a, b });
        }
        let segments = self
            .segments
            .iter()
            .filter(|s| s.hi >= a && s.lo <= b)
            .map(|s| Segment { lo: s.lo.max(a), hi: s.hi.min(b) })
            .collect();
        Ok(Self { segments })
    }

    /// Sorted sample of the scale: every segment endpoint, every isolated
    /// point, and a uniform grid on each dense segment no coarser than
    /// `max_dense_step`.
    pub fn scale_points(&self, max_dense_step: f64) -> Vec<f64> {
        let step = if max_dense_step > 0.0 { max_dense_step } else { f64::INFINITY };
        self.sample(|seg| (seg.len() / step).ceil().max(1.0) as usize)
    }

    /// Like [`scale_points`](Self::scale_points) but with a fixed number of
    /// intervals per dense segment.
    pub fn scale_points_per_segment(&self, per_segment: usize) -> Vec<f64> {
        self.sample(|_| per_segment.max(1))
    }

    fn sample(&self, intervals: impl Fn(&Segment) -> usize) -> Vec<f64> {
        let mut out = Vec::new();
        for seg in &self.segments {
            if seg.is_point() {
                out.push(seg.lo);
                continue;
            }
            let n = intervals(seg);
            let h = seg.len() / n as f64;
            out.extend((0..n).map(|i| seg.lo + i as f64 * h));
            out.push(seg.hi);
        }
        out.dedup();
        out
    }

    /// Short stable digest of the canonical segment list.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for s in &self.segments {
            hasher.update(s.lo.to_bits().to_le_bytes());
            hasher.update(s.hi.to_bits().to_le_bytes());
        }
        hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if s.is_point() {
                write!(f, "{}", s.lo)?;
            } else {
                write!(f, "[{}, {}]", s.lo, s.hi)?;
            }
        }
        write!(f, "}}")
    }
}
