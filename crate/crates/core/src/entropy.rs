//! Closed boundary sets, their entropy integral, Whitney-type dyadic families and the
//! Blaschke products `B1`, `B2` built from them.
//!
//! Boundary angles are kept in turns; dyadic arcs are half-open,
//! `[k 2^-m, (k + 1) 2^-m)` turns.

use std::cmp::Ordering;
use std::f64::consts::{LN_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::eval::{
    BlaschkeEvaluator, InnerEvaluator, InnerFunction, Model, Provenance, SingularMeasure, Zero,
    ZeroSet,
};
use crate::geometry::{DiscPoint, DyadicArc};
use crate::turns::Turns;

/// Coarsest level of the dyadic scan.
pub const FIRST_LEVEL: u32 = 2;

/// Deepest level accepted by the scans.
pub const MAX_SCAN_LEVEL: u32 = 40;

/// Largest `L` family that [`family_L`] materializes.
pub const MAX_L_ARCS: u64 = 1 << 22;

/// A closed arc `[start, end]` of the circle in turns, `0 <= end - start < 1`.
/// A point is an arc with `start == end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArc {
    start: Turns,
    end: Turns,
}

impl BoundaryArc {
    pub fn new(start: Turns, end: Turns) -> Result<Self> {
        let len = end.minus(&start);
        if !(0.0..1.0).contains(&len) {
            return Err(invalid(
                "arcs",
                format!("arc [{start}, {end}] must satisfy 0 <= end - start < 1"),
            ));
        }
        let norm = start.normalized();
        let shift = norm.minus(&start).round() as i64;
        Ok(BoundaryArc {
            start: start.shifted(shift),
            end: end.shifted(shift),
        })
    }

    pub fn point(at: Turns) -> Result<Self> {
        Self::new(at, at)
    }

    pub fn start(&self) -> Turns {
        self.start
    }

    pub fn end(&self) -> Turns {
        self.end
    }

    pub fn length_turns(&self) -> f64 {
        self.end.minus(&self.start)
    }

    /// Whether the closed arc meets the half-open dyadic window `[lo, hi) / 2^level`.
    fn meets_window(&self, lo: i64, hi: i64, level: u32) -> bool {
        (-1..=1).any(|n| {
            let a = self.start.shifted(n);
            let b = self.end.shifted(n);
            let below_hi = match a.cmp_dyadic(hi, level) {
                Ordering::Less => true,
                // a float within the guard of the open end counts as a hit
                Ordering::Equal => !a.is_exact(),
                Ordering::Greater => false,
            };
            below_hi && b.cmp_dyadic(lo, level) != Ordering::Less
        })
    }

    fn contains(&self, t: &Turns) -> bool {
        let t = t.normalized();
        (-1..=1).any(|n| {
            t.cmp_guarded(&self.start.shifted(n)) != Ordering::Less
                && t.cmp_guarded(&self.end.shifted(n)) != Ordering::Greater
        })
    }
}

impl Serialize for BoundaryArc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        (self.start, self.end).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryArc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let (a, b) = <(Turns, Turns)>::deserialize(d)?;
        BoundaryArc::new(a, b).map_err(serde::de::Error::custom)
    }
}

/// A nonempty finite union of pairwise disjoint closed arcs, sorted by start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySet {
    arcs: Vec<BoundaryArc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundarySet {
    arcs: Vec<BoundaryArc>,
    /// Run information written by tools; ignored.
    #[serde(default)]
    #[allow(dead_code)]
    provenance: Option<serde_json::Value>,
}

impl<'de> Deserialize<'de> for BoundarySet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = RawBoundarySet::deserialize(d)?;
        BoundarySet::new(raw.arcs).map_err(serde::de::Error::custom)
    }
}

impl BoundarySet {
    pub fn new(mut arcs: Vec<BoundaryArc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::EmptyBoundarySet);
        }
        arcs.sort_by(|a, b| a.start.cmp_guarded(&b.start));
        for w in arcs.windows(2) {
            if w[0].end.cmp_guarded(&w[1].start) != Ordering::Less {
                return Err(invalid(
                    "arcs",
                    format!(
                        "arcs ending at {} and starting at {} overlap",
                        w[0].end, w[1].start
                    ),
                ));
            }
        }
        let (first, last) = (arcs[0], arcs[arcs.len() - 1]);
        if last.end.cmp_guarded(&first.start.shifted(1)) != Ordering::Less {
            return Err(invalid("arcs", "arcs cover or wrap onto each other"));
        }
        Ok(BoundarySet { arcs })
    }

    /// Finite set of points.
    pub fn points(at: impl IntoIterator<Item = Turns>) -> Result<Self> {
        Self::new(
            at.into_iter()
                .map(BoundaryArc::point)
                .collect::<Result<_>>()?,
        )
    }

    pub fn arcs(&self) -> &[BoundaryArc] {
        &self.arcs
    }

    /// Total length in turns.
    pub fn measure_turns(&self) -> f64 {
        self.arcs.iter().map(|a| a.length_turns()).sum()
    }

    /// Sets of positive measure have infinite entropy; the gap sums still make sense.
    pub fn has_positive_measure(&self) -> bool {
        self.arcs.iter().any(|a| a.length_turns() > 0.0)
    }

    /// Lengths of the complementary arcs in turns, in order after each arc.
    pub fn gaps_turns(&self) -> Vec<f64> {
        let n = self.arcs.len();
        (0..n)
            .map(|i| {
                let next = if i + 1 < n {
                    self.arcs[i + 1].start
                } else {
                    self.arcs[0].start.shifted(1)
                };
                next.minus(&self.arcs[i].end).max(0.0)
            })
            .collect()
    }

    pub fn contains(&self, t: &Turns) -> bool {
        self.arcs.iter().any(|a| a.contains(t))
    }

    /// Whether `2J` meets the set, `J` the dyadic arc.
    pub fn meets_doubled(&self, j: &DyadicArc) -> bool {
        let k = j.index as i64;
        let (lo, hi, level) = (2 * k - 1, 2 * k + 3, j.level + 1);
        self.arcs.iter().any(|a| a.meets_window(lo, hi, level))
    }
}

/// `\int log(1 / dist(zeta, E)) |d zeta|` over the complement of `E`, arclength distance.
/// A gap of arclength `l` contributes `l (1 + log 2 - log l)`.
pub fn entropy_integral(e: &BoundarySet) -> f64 {
    e.gaps_turns()
        .into_iter()
        .map(|g| gap_entropy(TAU * g))
        .sum()
}

/// `\int_0^l log(1 / min(x, l - x)) dx`.
pub fn gap_entropy(l: f64) -> f64 {
    if l <= 0.0 {
        0.0
    } else {
        l * (1.0 + LN_2 - l.ln())
    }
}

/// Result of the top-down dyadic scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyScan {
    /// Maximal arcs with `2J` disjoint from `E`.
    pub g: Vec<DyadicArc>,
    /// Arcs with `2I` meeting `E`, levels `FIRST_LEVEL..=max_level`.
    pub f: Vec<DyadicArc>,
    /// `F` arcs at `max_level`, whose subdivision was not examined.
    pub residual: Vec<DyadicArc>,
    pub max_level: u32,
}

/// Scans levels `FIRST_LEVEL..=max_level`, subdividing only arcs of `F`.
pub fn whitney_scan(e: &BoundarySet, max_level: u32) -> Result<WhitneyScan> {
    check_level(max_level)?;
    let mut g = Vec::new();
    let mut f = Vec::new();
    let mut frontier: Vec<DyadicArc> = (0..1u64 << FIRST_LEVEL)
        .map(|index| DyadicArc {
            level: FIRST_LEVEL,
            index,
        })
        .collect();
    let mut residual = Vec::new();
    for level in FIRST_LEVEL..=max_level {
        let mut hits = Vec::new();
        for j in frontier {
            if e.meets_doubled(&j) {
                hits.push(j);
            } else {
                g.push(j);
            }
        }
        f.extend_from_slice(&hits);
        if level == max_level {
            residual = hits;
            break;
        }
        frontier = hits.iter().flat_map(|j| j.children()).collect();
    }
    g.sort();
    f.sort();
    residual.sort();
    Ok(WhitneyScan {
        g,
        f,
        residual,
        max_level,
    })
}

fn check_level(max_level: u32) -> Result<()> {
    if !(FIRST_LEVEL..=MAX_SCAN_LEVEL).contains(&max_level) {
        return Err(invalid(
            "max_level",
            format!("must lie in [{FIRST_LEVEL}, {MAX_SCAN_LEVEL}], got {max_level}"),
        ));
    }
    Ok(())
}

#[allow(non_snake_case)]
pub fn whitney_G(e: &BoundarySet, max_level: u32) -> Result<Vec<DyadicArc>> {
    Ok(whitney_scan(e, max_level)?.g)
}

#[allow(non_snake_case)]
pub fn family_F(e: &BoundarySet, max_level: u32) -> Result<Vec<DyadicArc>> {
    Ok(whitney_scan(e, max_level)?.f)
}

/// Number of `L` arcs under `J`: levels `m..=2m`, `2^{m+1} - 1` arcs.
pub fn l_count_for(j: &DyadicArc) -> u64 {
    (1u64 << (j.level + 1)) - 1
}

pub fn l_count(g: &[DyadicArc]) -> u64 {
    g.iter().map(l_count_for).fold(0u64, u64::saturating_add)
}

/// All dyadic sub-arcs `L` of arcs `J` in `g` with `|L| >= |J|^2`, ordered by `(level, index)`.
#[allow(non_snake_case)]
pub fn family_L(g: &[DyadicArc]) -> Result<Vec<DyadicArc>> {
    let total = l_count(g);
    if total > MAX_L_ARCS {
        return Err(invalid(
            "max_level",
            format!("L family would hold {total} arcs, above the limit {MAX_L_ARCS}"),
        ));
    }
    let mut out = Vec::with_capacity(total as usize);
    for j in g {
        let m = j.level;
        for level in m..=2 * m {
            let shift = level - m;
            let first = j.index << shift;
            out.extend((first..first + (1u64 << shift)).map(|index| DyadicArc { level, index }));
        }
    }
    out.sort();
    Ok(out)
}

/// `sum |J| log(1/|J|)` over `g`, arclength.
pub fn g_entropy_sum(g: &[DyadicArc]) -> f64 {
    g.iter()
        .map(|j| {
            let l = j.arclength();
            -l * l.ln()
        })
        .sum()
}

/// `sum |J| log_2(1/|J|)` with `|J|` in turns; for `J` at level `m` this is `m 2^-m`.
pub fn g_entropy_sum_dyadic(g: &[DyadicArc]) -> f64 {
    g.iter().map(|j| j.level as f64 * j.turns()).sum()
}

/// `sum |I|` over a family, arclength.
pub fn length_sum(arcs: &[DyadicArc]) -> f64 {
    arcs.iter().map(|a| a.arclength()).sum()
}

/// `sum_{L} |L| = sum_J (m + 1) |J|` without listing `L`.
pub fn l_length_sum(g: &[DyadicArc]) -> f64 {
    g.iter().map(|j| (j.level + 1) as f64 * j.arclength()).sum()
}

/// The three families with their level of truncation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyFamilies {
    #[serde(rename = "G")]
    pub g: Vec<DyadicArc>,
    #[serde(rename = "F")]
    pub f: Vec<DyadicArc>,
    #[serde(rename = "L")]
    pub l: Vec<DyadicArc>,
    pub residual: Vec<DyadicArc>,
    pub depth: u32,
}

pub fn whitney_families(e: &BoundarySet, max_level: u32) -> Result<WhitneyFamilies> {
    let scan = whitney_scan(e, max_level)?;
    let l = family_L(&scan.g)?;
    Ok(WhitneyFamilies {
        g: scan.g,
        f: scan.f,
        l,
        residual: scan.residual,
        depth: max_level,
    })
}

/// Top centers of the anchored arcs (level above [`FIRST_LEVEL`]), and the number skipped.
fn top_center_zeros(arcs: &[DyadicArc]) -> Result<(Vec<Zero>, usize)> {
    let mut zeros = Vec::with_capacity(arcs.len());
    let mut skipped = 0;
    for a in arcs {
        match a.top_center() {
            Ok(point) => zeros.push(Zero { point, mult: 1 }),
            Err(Error::CoarseDyadicArc { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((zeros, skipped))
}

/// Output of [`build_sipification`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sipification {
    pub b1: ZeroSet,
    pub b2: ZeroSet,
    /// `F` arcs too coarse to carry a top-center point.
    pub unanchored_f: usize,
    /// `L` arcs too coarse to carry a top-center point.
    pub unanchored_l: usize,
    pub g: Vec<DyadicArc>,
    pub f_count: usize,
    pub l_count: usize,
    pub residual_count: usize,
    pub max_level: u32,
    pub g_entropy_sum: f64,
    pub f_length_sum: f64,
    pub l_length_sum: f64,
    pub b2_blaschke_sum: f64,
    /// The boundary set had positive measure, so its entropy is infinite.
    pub positive_measure: bool,
}

impl Sipification {
    /// `f = B1 S_mu`.
    pub fn composite(&self, mu: &SingularMeasure) -> InnerFunction {
        InnerFunction::new(self.b1.clone(), mu.clone())
    }
}

/// Zeros of `B1` at `z_I`, `I` in `F`, and of `B2` at `z_L`, `L` in `L`.
pub fn build_sipification(
    mu: &SingularMeasure,
    e: &BoundarySet,
    max_level: u32,
) -> Result<Sipification> {
    for atom in mu.atoms() {
        if !e.contains(&atom.angle_turns) {
            return Err(Error::AtomOutsideSet {
                angle_turns: atom.angle_turns.to_f64(),
            });
        }
    }
    let scan = whitney_scan(e, max_level)?;
    let l = family_L(&scan.g)?;
    let (z1, unanchored_f) = top_center_zeros(&scan.f)?;
    let (z2, unanchored_l) = top_center_zeros(&l)?;
    let params = serde_json::json!({ "max_level": max_level, "atoms": mu.atoms().len() });
    let prov = |name: &str, stages: Vec<usize>| Provenance {
        generator: name.to_string(),
        params: params.clone(),
        stages,
        transforms: Vec::new(),
    };
    let b1 =
        ZeroSet::new(Model::Disc, z1)?.with_provenance(prov("sipify_b1", level_stages(&scan.f)));
    let b2 = ZeroSet::new(Model::Disc, z2)?.with_provenance(prov("sipify_b2", level_stages(&l)));
    Ok(Sipification {
        b2_blaschke_sum: b2.blaschke_sum(),
        b1,
        b2,
        unanchored_f,
        unanchored_l,
        f_count: scan.f.len(),
        l_count: l.len(),
        residual_count: scan.residual.len(),
        max_level,
        g_entropy_sum: g_entropy_sum(&scan.g),
        f_length_sum: length_sum(&scan.f),
        l_length_sum: l_length_sum(&scan.g),
        g: scan.g,
        positive_measure: e.has_positive_measure(),
    })
}

/// Cumulative counts of anchored arcs at each level, for arcs sorted by level.
fn level_stages(arcs: &[DyadicArc]) -> Vec<usize> {
    let anchored: Vec<_> = arcs.iter().filter(|a| a.arclength() < 1.0).collect();
    let mut stages = Vec::new();
    for (i, a) in anchored.iter().enumerate() {
        if anchored.get(i + 1).map_or(true, |b| b.level != a.level) {
            stages.push(i + 1);
        }
    }
    stages
}

/// Probe over the midpoint of `J` at depth `factor |J|^2`; `None` when that is not inside
/// the disc.
pub fn probe_over(j: &DyadicArc, factor: f64) -> Option<DiscPoint> {
    let l = j.arclength();
    let depth = factor * l * l;
    (depth > 0.0 && depth < 1.0)
        .then(|| DiscPoint::from_depth_angle(depth, j.center_angle()).ok())
        .flatten()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimSample {
    pub arc: DyadicArc,
    /// `log(1 / |f(z)|)`.
    pub log_inv: f64,
    /// `log(1/|f(z)|) |J|^2 / (1 - |z|)`.
    pub ratio: f64,
}

/// Ratios `log(1/|f(z)|) |J|^2/(1 - |z|)` at depth `|J|^2 / 2` over every `J` in `g`
/// that admits such a probe, and their maximum (the fitted constant).
pub fn claim_ratios(f: &InnerFunction, g: &[DyadicArc]) -> (Vec<ClaimSample>, f64) {
    let ev = InnerEvaluator::new(f);
    let samples: Vec<ClaimSample> = g
        .iter()
        .filter_map(|j| {
            let z = probe_over(j, 0.5)?;
            let log_inv = -ev.probe(&z).0;
            let l = j.arclength();
            Some(ClaimSample {
                arc: *j,
                log_inv,
                ratio: log_inv * l * l / z.depth(),
            })
        })
        .collect();
    let c = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    (samples, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSample {
    pub eps: f64,
    /// Largest `log(1/|B2(z)|)` over the probes at depth `eps |J|^2`.
    pub max_log_inv: f64,
    pub mean_log_inv: f64,
    pub probes: usize,
}

/// `log(1/|B2|)` over each `J` in `g` at depth `eps |J|^2`, for every `eps`.
pub fn b2_tail_profile(b2: &ZeroSet, g: &[DyadicArc], eps: &[f64]) -> Vec<TailSample> {
    let ev = BlaschkeEvaluator::new(b2);
    eps.iter()
        .map(|&e| {
            let vals: Vec<f64> = g
                .iter()
                .filter_map(|j| probe_over(j, e))
                .map(|z| -ev.log_modulus_and_gap(&z).0)
                .collect();
            let n = vals.len();
            TailSample {
                eps: e,
                max_log_inv: vals.iter().copied().fold(0.0, f64::max),
                mean_log_inv: if n == 0 {
                    0.0
                } else {
                    vals.iter().sum::<f64>() / n as f64
                },
                probes: n,
            }
        })
        .collect()
}
