//! JSON forms of zero sets and singular measures.
//!
//! Zero sets:
//! `{"model": "disc" | "half-plane", "zeros": [{"re", "im", "mult", "depth"?}],
//!   "tail_bound"?, "tail_max_depth"?, "metadata"?}`.
//! Coordinates are given in the named model. For disc zeros the optional `depth`
//! carries `1 - |z|` beyond the resolution of `re`, `im`.
//!
//! Measures: `{"atoms": [{"angle_turns": "p/q" | float, "mass"}]}`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::eval::SingularMeasure;
use crate::eval::{Atom, Model, Provenance, TailBound, Zero, ZeroSet};
use crate::geometry::{cayley, cayley_inverse, DiscPoint, HalfPlanePoint};

/// Largest disagreement accepted between a stated depth and `1 - |(re, im)|`.
pub const DEPTH_CONSISTENCY: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroJson {
    re: f64,
    im: f64,
    #[serde(default = "one")]
    mult: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<f64>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZeroSetJson {
    model: Model,
    zeros: Vec<ZeroJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_max_depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
    /// Written by tools that embed run information; ignored on input.
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    provenance: Option<serde_json::Value>,
}

fn zero_to_json(model: Model, z: &Zero) -> ZeroJson {
    match model {
        Model::Disc => ZeroJson {
            re: z.point.re(),
            im: z.point.im(),
            mult: z.mult,
            depth: Some(z.point.depth()),
        },
        Model::HalfPlane => {
            let h = cayley_inverse(&z.point);
            ZeroJson {
                re: h.re(),
                im: h.im(),
                mult: z.mult,
                depth: None,
            }
        }
    }
}

fn zero_from_json(model: Model, i: usize, z: &ZeroJson) -> Result<Zero> {
    if z.mult == 0 {
        return Err(invalid("mult", format!("zero #{i} has multiplicity 0")));
    }
    let point = match (model, z.depth) {
        (Model::Disc, None) => DiscPoint::new(z.re, z.im)?,
        (Model::Disc, Some(d)) => {
            if !(d > 0.0 && d <= 1.0) {
                return Err(invalid(
                    "depth",
                    format!("zero #{i}: must lie in (0, 1], got {d}"),
                ));
            }
            let coarse = 1.0 - z.re.hypot(z.im);
            if (coarse - d).abs() > DEPTH_CONSISTENCY {
                return Err(invalid(
                    "depth",
                    format!("zero #{i}: depth {d} disagrees with 1 - |z| = {coarse}"),
                ));
            }
            DiscPoint::from_parts(num_complex::Complex64::new(z.re, z.im), d)?
        }
        (Model::HalfPlane, None) => cayley(&HalfPlanePoint::new(z.re, z.im)?),
        (Model::HalfPlane, Some(_)) => {
            return Err(invalid(
                "depth",
                format!("zero #{i}: only disc zeros carry a depth"),
            ))
        }
    };
    Ok(Zero {
        point,
        mult: z.mult,
    })
}

impl Serialize for ZeroSet {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        ZeroSetJson {
            model: self.model,
            zeros: self
                .zeros()
                .iter()
                .map(|z| zero_to_json(self.model, z))
                .collect(),
            tail_bound: self.tail.map(|t| t.blaschke_sum),
            tail_max_depth: self.tail.and_then(|t| t.max_depth),
            metadata: self
                .provenance
                .as_ref()
                .map(|p| serde_json::to_value(p).unwrap_or(serde_json::Value::Null)),
            provenance: None,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZeroSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = ZeroSetJson::deserialize(d)?;
        zero_set_from_raw(raw).map_err(serde::de::Error::custom)
    }
}

fn zero_set_from_raw(raw: ZeroSetJson) -> Result<ZeroSet> {
    let zeros = raw
        .zeros
        .iter()
        .enumerate()
        .map(|(i, z)| zero_from_json(raw.model, i, z))
        .collect::<Result<Vec<_>>>()?;
    let mut zs = ZeroSet::new(raw.model, zeros)?;
    match (raw.tail_bound, raw.tail_max_depth) {
        (Some(b), d) => {
            zs = zs.with_tail(TailBound {
                blaschke_sum: b,
                max_depth: d,
            })?
        }
        (None, Some(_)) => {
            return Err(invalid("tail_max_depth", "given without tail_bound"));
        }
        (None, None) => {}
    }
    if let Some(meta) = raw.metadata {
        let prov = serde_json::from_value::<Provenance>(meta.clone()).unwrap_or(Provenance {
            generator: "external".into(),
            params: meta,
            stages: Vec::new(),
            transforms: Vec::new(),
        });
        zs = zs.with_provenance(prov);
    }
    Ok(zs)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomJson {
    angle_turns: crate::turns::Turns,
    mass: f64,
}

impl<'de> Deserialize<'de> for SingularMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = MeasureJson::deserialize(d)?;
        raw.atoms
            .into_iter()
            .map(|a| Atom::new(a.angle_turns, a.mass))
            .collect::<Result<Vec<_>>>()
            .and_then(SingularMeasure::new)
            .map_err(serde::de::Error::custom)
    }
}
