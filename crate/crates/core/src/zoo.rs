//! Parametric zero-set constructions and zero-set transformations.
//!
//! Each generator truncates an infinite construction at caps given in its
//! [`GeneratorSpec`] and records the caps, the stage boundaries (rows, levels) and,
//! when one is known in closed form, a certified bound on the omitted tail.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{BoundaryArc, BoundarySet};
use crate::error::{invalid, Result};
use crate::eval::{Model, Provenance, TailBound, Zero, ZeroSet};
use crate::geometry::{cayley, hyp_dist, mobius, DiscPoint, HalfPlanePoint};
use crate::turns::Turns;

/// Largest index accepted by [`gen_thin`]; `2^-(n+1)^2` must stay a normal double.
pub const THIN_MAX_N: usize = 30;

/// Cap applied to `N_n` by [`int_not_sipable_rows`].
pub const INT_NOT_SIPABLE_COUNT_CAP: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRule {
    /// `x_{n+1} = x_n + 2 L_n`.
    #[default]
    Tight,
    /// `x_{n+1} = x_n + 2 L_n + L_{n+1}`: the tripled intervals are pairwise disjoint.
    Separated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    /// `1 - |a_k| = 2^{-k^2}`.
    #[default]
    DoubleExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleRule {
    /// Every zero on the positive real axis.
    #[default]
    Fixed,
    /// Angles drawn uniformly from the seeded stream.
    Spread,
}

/// A zero-set transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    /// Drop every zero at hyperbolic distance `< radius` from one of the centers.
    RemoveInDiscs {
        centers: Vec<PointSpec>,
        radius: f64,
    },
    /// Move each zero to a random point of its pseudohyperbolic disc of radius `max_rho`.
    Perturb { max_rho: f64, seed: u64 },
}

/// A point given in the model of the zero set it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub re: f64,
    pub im: f64,
}

/// Declarative description of a generator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Exponential {
        q: f64,
        n: usize,
        #[serde(default)]
        angle: f64,
    },
    TreilGrid {
        n_max: usize,
        half_width: usize,
    },
    RectGrid {
        lengths: Vec<f64>,
        counts: Vec<u64>,
        #[serde(default)]
        gap_rule: GapRule,
    },
    StolzMult {
        n: usize,
    },
    FiniteCross {
        r: f64,
    },
    Thin {
        n: usize,
        #[serde(default)]
        radius_rule: RadiusRule,
        #[serde(default)]
        angles: AngleRule,
        #[serde(default)]
        seed: u64,
    },
    CantorLike {
        depth: u32,
        ratio: f64,
    },
}

/// What a generator produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Zeros(ZeroSet),
    Boundary(BoundarySet),
}

impl GeneratorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GeneratorSpec::Exponential { .. } => "exponential",
            GeneratorSpec::TreilGrid { .. } => "treil_grid",
            GeneratorSpec::RectGrid { .. } => "rect_grid",
            GeneratorSpec::StolzMult { .. } => "stolz_mult",
            GeneratorSpec::FiniteCross { .. } => "finite_cross",
            GeneratorSpec::Thin { .. } => "thin",
            GeneratorSpec::CantorLike { .. } => "cantor_like",
        }
    }

    pub fn generate(&self) -> Result<Generated> {
        Ok(match *self {
            GeneratorSpec::Exponential { q, n, angle } => {
                Generated::Zeros(gen_exponential(q, n, angle)?)
            }
            GeneratorSpec::TreilGrid { n_max, half_width } => {
                Generated::Zeros(gen_treil_grid(n_max, half_width)?)
            }
            GeneratorSpec::RectGrid {
                ref lengths,
                ref counts,
                gap_rule,
            } => Generated::Zeros(gen_rect_grid(lengths, counts, gap_rule)?),
            GeneratorSpec::StolzMult { n } => Generated::Zeros(gen_stolz_mult(n)?),
            GeneratorSpec::FiniteCross { r } => Generated::Zeros(gen_finite_cross(r)?),
            GeneratorSpec::Thin {
                n,
                radius_rule,
                angles,
                seed,
            } => Generated::Zeros(gen_thin(n, radius_rule, angles, seed)?),
            GeneratorSpec::CantorLike { depth, ratio } => {
                Generated::Boundary(gen_cantor_like(depth, ratio)?)
            }
        })
    }
}

fn provenance(spec: &GeneratorSpec, stages: Vec<usize>) -> Provenance {
    Provenance {
        generator: spec.kind().to_string(),
        params: serde_json::to_value(spec).unwrap_or(serde_json::Value::Null),
        stages,
        transforms: Vec::new(),
    }
}

/// Zeros `(1 - q^j) e^{i angle}`, `j = 1..=n`.
pub fn gen_exponential(q: f64, n: usize, angle: f64) -> Result<ZeroSet> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid("q", format!("must lie in (0, 1), got {q}")));
    }
    let mut zeros = Vec::with_capacity(n);
    for j in 1..=n {
        let depth = q.powi(j as i32);
        if !(depth > 0.0) {
            return Err(invalid("n", format!("q^{j} underflows; lower n")));
        }
        zeros.push(Zero {
            point: DiscPoint::from_depth_angle(depth, angle)?,
            mult: 1,
        });
    }
    let spec = GeneratorSpec::Exponential { q, n, angle };
    let next = q.powi(n as i32 + 1);
    let zs =
        ZeroSet::new(Model::Disc, zeros)?.with_provenance(provenance(&spec, (1..=n).collect()));
    if next > 0.0 {
        zs.with_tail(TailBound {
            blaschke_sum: next / (1.0 - q),
            max_depth: Some(next),
        })
    } else {
        Ok(zs)
    }
}

/// Rows `y_n = n^3` with `delta_n = 1/n`: zeros `k n^2 + i n^3`, `|k| <= half_width`,
/// generated in the half-plane and stored through the Cayley map.
pub fn gen_treil_grid(n_max: usize, half_width: usize) -> Result<ZeroSet> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    let hw = half_width as i64;
    let mut zeros = Vec::new();
    let mut stages = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        let y = nf * nf * nf;
        let spacing = nf * nf;
        for k in -hw..=hw {
            let p = HalfPlanePoint::new(k as f64 * spacing, y)?;
            zeros.push(Zero {
                point: cayley(&p),
                mult: 1,
            });
        }
        stages.push(zeros.len());
    }
    let spec = GeneratorSpec::TreilGrid { n_max, half_width };
    let tail = treil_tail(n_max, half_width);
    let mut zs = ZeroSet::new(Model::HalfPlane, zeros)?.with_provenance(provenance(&spec, stages));
    zs = zs.with_tail(tail)?;
    Ok(zs)
}

/// Tail of the Treil grid: columns `|k| > half_width` of the kept rows plus all rows
/// beyond `n_max`, bounded through `1 - |w| <= 1 - |w|^2 = 4y / (x^2 + (y+1)^2)`.
fn treil_tail(n_max: usize, half_width: usize) -> TailBound {
    let big_n = n_max as f64;
    let hw = half_width as f64;
    let mut sum = 2.0 / (big_n * big_n) + 4.0 * PI / big_n;
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        let nf = n as f64;
        sum += 8.0 / (nf * nf) * (0.5 * PI - (hw / nf).atan());
        let x = (hw + 1.0) * nf * nf;
        let y = nf * nf * nf;
        worst = worst.max(4.0 * y / (x * x + (y + 1.0) * (y + 1.0)));
    }
    let y = (big_n + 1.0).powi(3);
    worst = worst.max(4.0 * y / ((y + 1.0) * (y + 1.0)));
    TailBound {
        blaschke_sum: sum,
        // 1 - |w| <= 1 - |w|^2
        max_depth: Some(worst.min(1.0)),
    }
}

/// Rows `z_{n,k} = x_n + k L_n / N_n + i L_n / N_n`, `0 <= k < N_n`, in the half-plane,
/// with `x_1 = 0` and spacing fixed by `gap_rule`.
pub fn gen_rect_grid(lengths: &[f64], counts: &[u64], gap_rule: GapRule) -> Result<ZeroSet> {
    if lengths.len() != counts.len() {
        return Err(invalid(
            "counts",
            format!(
                "has {} entries but lengths has {}",
                counts.len(),
                lengths.len()
            ),
        ));
    }
    if let Some(i) = lengths.iter().position(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(invalid("lengths", format!("entry {i} must be positive")));
    }
    if let Some(i) = lengths.windows(2).position(|w| w[1] >= w[0]) {
        return Err(invalid(
            "lengths",
            format!(
                "must be strictly decreasing; entry {} does not decrease",
                i + 1
            ),
        ));
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(invalid("counts", format!("entry {i} must be at least 1")));
    }
    let mut zeros = Vec::new();
    let mut stages = Vec::with_capacity(lengths.len());
    let mut x = 0.0;
    for (n, (&l, &count)) in lengths.iter().zip(counts).enumerate() {
        let h = l / count as f64;
        for k in 0..count {
            let p = HalfPlanePoint::new(x + k as f64 * h, h)?;
            zeros.push(Zero {
                point: cayley(&p),
                mult: 1,
            });
        }
        stages.push(zeros.len());
        x += 2.0 * l;
        if gap_rule == GapRule::Separated {
            if let Some(&next) = lengths.get(n + 1) {
                x += next;
            }
        }
    }
    let spec = GeneratorSpec::RectGrid {
        lengths: lengths.to_vec(),
        counts: counts.to_vec(),
        gap_rule,
    };
    Ok(ZeroSet::new(Model::HalfPlane, zeros)?.with_provenance(provenance(&spec, stages)))
}

/// Left endpoints `x_n` of the rectangle-grid intervals.
pub fn rect_grid_offsets(lengths: &[f64], gap_rule: GapRule) -> Vec<f64> {
    let mut out = Vec::with_capacity(lengths.len());
    let mut x = 0.0;
    for (n, &l) in lengths.iter().enumerate() {
        out.push(x);
        x += 2.0 * l;
        if gap_rule == GapRule::Separated {
            if let Some(&next) = lengths.get(n + 1) {
                x += next;
            }
        }
    }
    out
}

/// Default rows for the non-SIP-able variant: `L_n = n^-2`, `N_n = 2^{n^3}` capped at
/// [`INT_NOT_SIPABLE_COUNT_CAP`].
pub fn int_not_sipable_rows(rows: usize) -> (Vec<f64>, Vec<u64>) {
    (1..=rows)
        .map(|n| {
            let nf = n as f64;
            let cube = (n * n * n) as u32;
            let count = if cube >= 15 {
                INT_NOT_SIPABLE_COUNT_CAP
            } else {
                (1u64 << cube).min(INT_NOT_SIPABLE_COUNT_CAP)
            };
            (1.0 / (nf * nf), count)
        })
        .unzip()
}

/// Zeros `1 - 2^-j` with multiplicity `j`, `j = 1..=n`.
pub fn gen_stolz_mult(n: usize) -> Result<ZeroSet> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if n > 1000 {
        return Err(invalid("n", format!("must be at most 1000, got {n}")));
    }
    let zeros = (1..=n)
        .map(|j| {
            Ok(Zero {
                point: DiscPoint::from_depth_angle((-(j as f64)).exp2(), 0.0)?,
                mult: j as u32,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GeneratorSpec::StolzMult { n };
    let nf = n as f64;
    ZeroSet::new(Model::Disc, zeros)?
        .with_provenance(provenance(&spec, (1..=n).collect()))
        .with_tail(TailBound {
            // sum_{j > n} j 2^-j = (n + 2) 2^-n
            blaschke_sum: (nf + 2.0) * (-nf).exp2(),
            max_depth: Some((-(nf + 1.0)).exp2()),
        })
}

/// Four simple zeros `r e^{i pi (2k + 1)/4}`.
pub fn gen_finite_cross(r: f64) -> Result<ZeroSet> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
    }
    let zeros = (0..4)
        .map(|k| {
            Ok(Zero {
                point: DiscPoint::from_depth_angle(1.0 - r, FRAC_PI_4 * (2 * k + 1) as f64)?,
                mult: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GeneratorSpec::FiniteCross { r };
    Ok(ZeroSet::new(Model::Disc, zeros)?.with_provenance(provenance(&spec, vec![4])))
}

/// Radii `1 - 2^{-k^2}`, `k = 1..=n`.
pub fn gen_thin(
    n: usize,
    radius_rule: RadiusRule,
    angles: AngleRule,
    seed: u64,
) -> Result<ZeroSet> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if n > THIN_MAX_N {
        return Err(invalid(
            "n",
            format!("must be at most {THIN_MAX_N}, got {n}"),
        ));
    }
    let RadiusRule::DoubleExp = radius_rule;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = (1..=n)
        .map(|k| {
            let angle = match angles {
                AngleRule::Fixed => 0.0,
                AngleRule::Spread => rng.gen_range(0.0..TAU),
            };
            Ok(Zero {
                point: DiscPoint::from_depth_angle((-((k * k) as f64)).exp2(), angle)?,
                mult: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = GeneratorSpec::Thin {
        n,
        radius_rule,
        angles,
        seed,
    };
    let next = (-(((n + 1) * (n + 1)) as f64)).exp2();
    ZeroSet::new(Model::Disc, zeros)?
        .with_provenance(provenance(&spec, (1..=n).collect()))
        .with_tail(TailBound {
            // sum_{k > n} 2^{-k^2} <= 2 * 2^{-(n+1)^2}
            blaschke_sum: 2.0 * next,
            max_depth: Some(next),
        })
}

/// Base arc of [`gen_cantor_like`], in turns.
pub const CANTOR_BASE: (f64, f64) = (0.0, 0.25);

/// Repeated removal: every arc keeps its two end pieces of relative length `ratio`.
/// Depth `d` gives `2^d` closed arcs of length `ratio^d` times the base arc.
pub fn gen_cantor_like(depth: u32, ratio: f64) -> Result<BoundarySet> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(invalid(
            "ratio",
            format!("must lie in (0, 1/2), got {ratio}"),
        ));
    }
    if depth > 24 {
        return Err(invalid("depth", format!("must be at most 24, got {depth}")));
    }
    let mut arcs = vec![CANTOR_BASE];
    for _ in 0..depth {
        arcs = arcs
            .into_iter()
            .flat_map(|(a, b)| {
                let piece = ratio * (b - a);
                [(a, a + piece), (b - piece, b)]
            })
            .collect();
    }
    BoundarySet::new(
        arcs.into_iter()
            .map(|(a, b)| BoundaryArc::new(Turns::Approx(a), Turns::Approx(b)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Applies a transformation; multiplicities travel with their points.
pub fn transform_zeros(zs: &ZeroSet, op: &Transform) -> Result<ZeroSet> {
    let mut out = match op {
        Transform::RemoveInDiscs { centers, radius } => {
            if !(*radius >= 0.0) {
                return Err(invalid(
                    "radius",
                    format!("must be nonnegative, got {radius}"),
                ));
            }
            let centers = centers
                .iter()
                .map(|c| point_in_model(zs.model, c))
                .collect::<Result<Vec<_>>>()?;
            let kept = zs
                .zeros()
                .iter()
                .filter(|z| centers.iter().all(|c| hyp_dist(&z.point, c) >= *radius))
                .copied()
                .collect();
            let mut out = ZeroSet::new(zs.model, kept)?;
            out.tail = zs.tail;
            out
        }
        Transform::Perturb { max_rho, seed } => {
            if !(*max_rho >= 0.0 && *max_rho < 1.0) {
                return Err(invalid(
                    "max_rho",
                    format!("must lie in [0, 1), got {max_rho}"),
                ));
            }
            if *max_rho == 0.0 {
                zs.clone()
            } else {
                let moved = zs
                    .zeros()
                    .iter()
                    .enumerate()
                    .map(|(i, z)| {
                        let w = sample_disc(*max_rho, *seed, i as u64);
                        Zero {
                            point: mobius(&z.point, &w),
                            mult: z.mult,
                        }
                    })
                    .collect();
                let mut out = ZeroSet::new(zs.model, moved)?;
                // 1 - |phi_z(w)| <= (1 + |w|)/(1 - |w|) (1 - |z|)
                let grow = (1.0 + max_rho) / (1.0 - max_rho);
                out.tail = zs.tail.map(|t| TailBound {
                    blaschke_sum: t.blaschke_sum * grow,
                    max_depth: t.max_depth.map(|d| (d * grow).min(1.0)),
                });
                out
            }
        }
    };
    let mut prov = zs.provenance.clone().unwrap_or_default();
    if matches!(op, Transform::RemoveInDiscs { .. }) {
        // stage boundaries no longer index the surviving entries
        prov.stages.clear();
    }
    prov.transforms
        .push(serde_json::to_string(op).unwrap_or_default());
    out.provenance = Some(prov);
    Ok(out)
}

fn point_in_model(model: Model, c: &PointSpec) -> Result<DiscPoint> {
    match model {
        Model::Disc => DiscPoint::new(c.re, c.im),
        Model::HalfPlane => Ok(cayley(&HalfPlanePoint::new(c.re, c.im)?)),
    }
}

/// Uniform point of the Euclidean disc of radius `r` by rejection, from the stream
/// `(seed, index)`.
fn sample_disc(r: f64, seed: u64, index: u64) -> DiscPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let u: f64 = rng.gen_range(-1.0..1.0);
        let v: f64 = rng.gen_range(-1.0..1.0);
        if u * u + v * v < 1.0 {
            return DiscPoint::new(r * u, r * v).expect("scaled sample is interior");
        }
    }
}
