//! Estimates of `eta(t) = inf { |Theta(z)| : rho(z, Z) >= t }` and of its pseudo-inverse
//! `kappa(lambda) = inf { t : eta(t) > lambda }`.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::mesh::{HyperbolicMesh, ProbeId};
use crate::error::{invalid, Result};
use crate::eval::{InnerEvaluator, InnerFunction};
use crate::geometry::DiscPoint;

/// Default outer radius of the probed region, `1 - 2^-12`.
pub const DEFAULT_R_MAX: f64 = 1.0 - 1.0 / 4096.0;

/// Relative slack in the admission test `rho(z, Z) >= t (1 - slack)`.
pub const ADMISSION_SLACK: f64 = 1e-12;

/// Ratio between adjacent estimates above which a jump is reported.
pub const JUMP_RATIO: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaSample {
    pub t: f64,
    /// `None` when no probe was admitted at this `t`.
    pub estimate: Option<f64>,
    pub argmin: Option<DiscPoint>,
    pub n_probes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaCurve {
    pub samples: Vec<EtaSample>,
    pub r_max: f64,
    pub resolution: f64,
    pub total_probes: u64,
    /// Adjacent sample pairs `(t_i, t_{i+1})` whose estimates grow by more than
    /// [`JUMP_RATIO`].
    pub jump_candidates: Vec<(f64, f64)>,
}

impl EtaCurve {
    /// The estimate at the largest `t` that admitted probes.
    pub fn last_estimate(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .rev()
            .find_map(|s| s.estimate.map(|e| (s.t, e)))
    }

    pub fn all_absent(&self) -> bool {
        self.samples.iter().all(|s| s.estimate.is_none())
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    id: ProbeId,
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if (y.value, y.id) < (x.value, x.id) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

pub(crate) fn validate_t(t_values: &[f64]) -> Result<()> {
    if t_values.is_empty() {
        return Err(invalid("t_values", "must not be empty"));
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(invalid(
            "t_values",
            format!("each must lie in (0, 1), got {t}"),
        ));
    }
    if t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("t_values", "must be strictly increasing"));
    }
    Ok(())
}

/// One pass over the mesh: every probe lands in the bucket of the largest `t` it is
/// admitted at, and a suffix minimum turns buckets into per-`t` estimates. The
/// estimates are minima of certified lower bounds of `|Theta|`.
pub fn eta_curve(f: &InnerFunction, t_values: &[f64], r_max: f64, mesh: f64) -> Result<EtaCurve> {
    validate_t(t_values)?;
    let grid = HyperbolicMesh::new(mesh, r_max)?;
    let ev = InnerEvaluator::new(f);
    let thresholds: Vec<f64> = t_values
        .iter()
        .map(|t| t * (1.0 - ADMISSION_SLACK))
        .collect();
    let nt = t_values.len();

    let partials: Vec<(Vec<Option<Best>>, Vec<u64>)> = grid
        .chunks()
        .into_par_iter()
        .map(|(ring, start, end)| {
            let mut best = vec![None; nt];
            let mut counts = vec![0u64; nt];
            for j in start..end {
                let id = ProbeId { ring, j };
                let z = grid.point(id);
                let (_, gap, lower) = ev.probe(&z);
                let k = thresholds.partition_point(|&th| th <= gap);
                if k == 0 {
                    continue;
                }
                counts[k - 1] += 1;
                best[k - 1] = better(best[k - 1], Some(Best { value: lower, id }));
            }
            (best, counts)
        })
        .collect();

    let mut best = vec![None; nt];
    let mut counts = vec![0u64; nt];
    for (b, c) in partials {
        for k in 0..nt {
            best[k] = better(best[k], b[k]);
            counts[k] += c[k];
        }
    }

    let mut samples = vec![
        EtaSample {
            t: 0.0,
            estimate: None,
            argmin: None,
            n_probes: 0
        };
        nt
    ];
    let mut run: Option<Best> = None;
    let mut run_count = 0;
    for k in (0..nt).rev() {
        run = better(run, best[k]);
        run_count += counts[k];
        samples[k] = EtaSample {
            t: t_values[k],
            estimate: run.map(|b| b.value),
            argmin: run.map(|b| grid.point(b.id)),
            n_probes: run_count,
        };
    }

    let jump_candidates = samples
        .windows(2)
        .filter_map(|w| match (w[0].estimate, w[1].estimate) {
            (Some(a), Some(b)) if b > JUMP_RATIO * a => Some((w[0].t, w[1].t)),
            _ => None,
        })
        .collect();

    Ok(EtaCurve {
        samples,
        r_max,
        resolution: mesh,
        total_probes: grid.len(),
        jump_candidates,
    })
}

/// Smallest sampled `t` with estimate above `lambda`, interpolated against the previous
/// present sample; 1 when no estimate exceeds `lambda`.
pub fn kappa(curve: &EtaCurve, lambda: f64) -> f64 {
    let mut prev: Option<(f64, f64)> = None;
    for s in &curve.samples {
        let Some(e) = s.estimate else { continue };
        if e > lambda {
            return match prev {
                Some((t0, e0)) if e > e0 => {
                    let frac = ((lambda - e0) / (e - e0)).clamp(0.0, 1.0);
                    t0 + frac * (s.t - t0)
                }
                _ => s.t,
            };
        }
        prev = Some((s.t, e));
    }
    1.0
}

/// `t` grid `step, 2 step, ...` below 1, with `extra` values appended.
pub fn uniform_t_grid(step: f64, extra: &[f64]) -> Vec<f64> {
    let n = (1.0 / step).ceil() as usize;
    let mut out: Vec<f64> = (1..n)
        .map(|i| i as f64 * step)
        .filter(|t| *t < 1.0)
        .collect();
    out.extend(extra.iter().copied().filter(|t| *t > 0.0 && *t < 1.0));
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
