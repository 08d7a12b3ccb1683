//! JSON scale descriptions and the compact command-line shorthands.
//!
//! ```json
//! {"segments": [[0, 1], [2, 2]]}
//! {"interval": [0, 1]}
//! {"lattice": {"start": 0, "stop": 3, "step": 1}}
//! {"geometric": {"q": 2, "min": 1, "max": 16}}
//! {"union": [{"interval": [0, 1]}, {"lattice": {"start": 2, "stop": 4, "step": 1}}]}
//! ```

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scale::{Segment, TimeScale};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSpec {
    Segments(Vec<Segment>),
    Interval([f64; 2]),
    Lattice { start: f64, stop: f64, step: f64 },
    Geometric { q: f64, min: f64, max: f64 },
    Union(Vec<ScaleSpec>),
}

impl ScaleSpec {
    pub fn build(&self) -> Result<TimeScale> {
        match self {
            ScaleSpec::Segments(segs) => TimeScale::new(segs.iter().copied()),
            ScaleSpec::Interval([a, b]) => TimeScale::interval(*a, *b),
            ScaleSpec::Lattice { start, stop, step } => TimeScale::lattice(*start, *stop, *step),
            ScaleSpec::Geometric { q, min, max } => TimeScale::geometric(*q, *min, *max),
            ScaleSpec::Union(parts) => {
                let built = parts.iter().map(ScaleSpec::build).collect::<Result<Vec<_>>>()?;
                TimeScale::union(built.iter())
            }
        }
    }

    /// Parse `interval:a..b`, `lattice:a..b:step` or `geometric:q:min..max`.
    pub fn from_shorthand(text: &str) -> Result<Self> {
        let bad = || Error::InvalidScaleSpec(format!("unrecognized scale shorthand `{text}`"));
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        match kind {
            "interval" => {
                let (a, b) = parse_range(rest).ok_or_else(bad)?;
                Ok(ScaleSpec::Interval([a, b]))
            }
            "lattice" => {
                let (range, step) = rest.rsplit_once(':').ok_or_else(bad)?;
                let (start, stop) = parse_range(range).ok_or_else(bad)?;
                let step = step.trim().parse().map_err(|_| bad())?;
                Ok(ScaleSpec::Lattice { start, stop, step })
            }
            "geometric" => {
                let (q, range) = rest.split_once(':').ok_or_else(bad)?;
                let q = q.trim().parse().map_err(|_| bad())?;
                let (min, max) = parse_range(range).ok_or_else(bad)?;
                Ok(ScaleSpec::Geometric { q, min, max })
            }
            _ => Err(bad()),
        }
    }
}

fn parse_range(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once("..")?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Load a scale from its JSON text; the result is canonical.
pub fn scale_from_json(text: &str) -> Result<TimeScale> {
    let spec: ScaleSpec = serde_json::from_str(text).map_err(|e| Error::InvalidScaleSpec(e.to_string()))?;
    spec.build()
}

impl Serialize for TimeScale {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScaleSpec::Segments(self.segments().to_vec()).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TimeScale {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = ScaleSpec::deserialize(deserializer)?;
        spec.build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_every_form() {
        let t = scale_from_json(r#"{"segments": [[1, 2], [0, 1], [3, 3]]}"#).unwrap();
        assert_eq!(t.segments().len(), 2);
        assert_eq!(t.max(), 3.0);

        let t = scale_from_json(r#"{"lattice": {"start": 0, "stop": 3, "step": 1}}"#).unwrap();
        assert_eq!(t.scale_points(1.0), vec![0.0, 1.0, 2.0, 3.0]);

        let t = scale_from_json(r#"{"geometric": {"q": 2, "min": 1, "max": 5}}"#).unwrap();
        assert_eq!(t.scale_points(1.0), vec![1.0, 2.0, 4.0]);

        let t =
            scale_from_json(r#"{"union": [{"interval": [0, 1]}, {"lattice": {"start": 1, "stop": 3, "step": 1}}]}"#)
                .unwrap();
        assert_eq!(t.segments().len(), 3);
        assert_eq!(t.segments()[0], Segment::new(0.0, 1.0).unwrap());
    }

    #[test]
    fn rejects_malformed() {
        assert!(scale_from_json(r#"{"segments": []}"#).is_err());
        assert!(scale_from_json(r#"{"segments": [[2, 1]]}"#).is_err());
        assert!(scale_from_json(r#"{"circle": 1}"#).is_err());
        assert!(scale_from_json("not json").is_err());
    }

    #[test]
    fn serializes_canonical_segments() {
        let t = TimeScale::new([Segment::new(0.0, 1.0).unwrap(), Segment::point(2.0).unwrap()]).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"segments":[[0.0,1.0],[2.0,2.0]]}"#);
        let back: TimeScale = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn shorthands() {
        assert_eq!(ScaleSpec::from_shorthand("interval:-1..2").unwrap(), ScaleSpec::Interval([-1.0, 2.0]));
        assert_eq!(
            ScaleSpec::from_shorthand("lattice:0..3:1").unwrap(),
            ScaleSpec::Lattice { start: 0.0, stop: 3.0, step: 1.0 }
        );
        assert_eq!(
            ScaleSpec::from_shorthand("geometric:2:1..16").unwrap(),
            ScaleSpec::Geometric { q: 2.0, min: 1.0, max: 16.0 }
        );
        assert!(ScaleSpec::from_shorthand("lattice:0..3").is_err());
        assert!(ScaleSpec::from_shorthand("blob:1").is_err());
    }
}
