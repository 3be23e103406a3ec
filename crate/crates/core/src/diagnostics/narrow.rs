//! Search for large hyperbolic discs inside sublevel sets of `|Theta|`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::mesh::{HyperbolicMesh, ProbeId};
use crate::error::{invalid, Result};
use crate::eval::{InnerEvaluator, InnerFunction};
use crate::geometry::{mobius, DiscPoint, PairTerms, Polar};

/// Which sublevel set is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NarrowMode {
    /// `{0 < |Theta| < 1 - eps}`.
    Sip,
    /// `{eps < |Theta| < 1 - eps}`.
    MClass,
    /// `{|Theta| < 1 - eps}`.
    PClass,
}

/// Centers come from a nested mesh of step `mesh` over `|c| <= r_max`. A disc of radius
/// `k r_step` is accepted when its samples `phi_c(tanh(k r_step i / n_r) e^{2 pi i j / n_a})`
/// all lie in the set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NarrowSearch {
    pub mesh: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub r_count: usize,
    pub n_r: usize,
    pub n_a: usize,
}

impl Default for NarrowSearch {
    fn default() -> Self {
        NarrowSearch {
            mesh: 0.1,
            r_max: 0.999,
            r_step: 0.05,
            r_count: 40,
            n_r: 6,
            n_a: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NarrowResult {
    /// Largest accepted hyperbolic radius, 0 when none.
    pub r_found: f64,
    pub center: DiscPoint,
    /// Whether `r_found` reached the top of the searched radii.
    pub capped: bool,
}

struct Checker<'a> {
    ev: &'a InnerEvaluator,
    zeros: Vec<Polar>,
    eps: f64,
    mode: NarrowMode,
    /// Sample offsets per radius index, outermost circle first.
    offsets: Vec<Vec<DiscPoint>>,
    radii: Vec<f64>,
}

impl Checker<'_> {
    fn inside(&self, z: &DiscPoint) -> bool {
        let (log_mod, _, lower) = self.ev.probe(z);
        let upper = log_mod.exp();
        let below = upper < 1.0 - self.eps;
        match self.mode {
            NarrowMode::Sip | NarrowMode::PClass => below,
            NarrowMode::MClass => below && lower > self.eps,
        }
    }

    /// Whether the disc of radius index `k` (1-based) around `c` passes.
    fn passes(&self, c: &DiscPoint, k: usize) -> bool {
        if self.mode == NarrowMode::Sip {
            let r = self.radii[k - 1].tanh();
            let pc = Polar::from(c);
            if self.zeros.iter().any(|a| PairTerms::new(&pc, a).rho() <= r) {
                return false;
            }
        }
        self.offsets[k - 1]
            .iter()
            .all(|w| self.inside(&mobius(c, w)))
    }

    fn radius_at(&self, c: &DiscPoint, best: usize) -> usize {
        let top = self.radii.len();
        if best >= top || !self.passes(c, best + 1) {
            return 0;
        }
        if !(1..=best).all(|k| self.passes(c, k)) {
            return 0;
        }
        let mut k = best + 1;
        while k < top && self.passes(c, k + 1) {
            k += 1;
        }
        k
    }
}

pub fn narrowness_probe(
    f: &InnerFunction,
    eps: f64,
    mode: NarrowMode,
    search: &NarrowSearch,
) -> Result<NarrowResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0, 1), got {eps}")));
    }
    if mode == NarrowMode::MClass && !(eps < 0.5) {
        return Err(invalid(
            "eps",
            format!("must be below 1/2 in m_class mode, got {eps}"),
        ));
    }
    if !(search.r_step > 0.0) || search.r_count == 0 || search.n_r == 0 || search.n_a == 0 {
        return Err(invalid(
            "search",
            "r_step must be positive and r_count, n_r, n_a at least 1",
        ));
    }
    let grid = HyperbolicMesh::new(search.mesh, search.r_max)?;
    let radii: Vec<f64> = (1..=search.r_count)
        .map(|k| k as f64 * search.r_step)
        .collect();
    let offsets = radii
        .iter()
        .map(|&r| {
            let mut pts = Vec::with_capacity(search.n_r * search.n_a + 1);
            for i in (1..=search.n_r).rev() {
                let d = r * i as f64 / search.n_r as f64;
                let depth = crate::diagnostics::mesh::depth_at(d);
                for j in 0..search.n_a {
                    let angle = TAU * (j as f64 / search.n_a as f64);
                    pts.push(DiscPoint::from_depth_angle(depth, angle)?);
                }
            }
            pts.push(DiscPoint::ORIGIN);
            Ok(pts)
        })
        .collect::<Result<Vec<_>>>()?;
    let ev = InnerEvaluator::new(f);
    let checker = Checker {
        ev: &ev,
        zeros: f.blaschke.points().map(Polar::from).collect(),
        eps,
        mode,
        offsets,
        radii,
    };

    // each chunk keeps its own running best, so the witness is the first center in
    // probe order that attains the maximum, whatever the thread count
    let partials: Vec<(usize, Option<ProbeId>)> = grid
        .chunks()
        .into_par_iter()
        .map(|(ring, start, end)| {
            let mut best = 0usize;
            let mut at = None;
            for j in start..end {
                let id = ProbeId { ring, j };
                let k = checker.radius_at(&grid.point(id), best);
                if k > best {
                    best = k;
                    at = Some(id);
                }
            }
            (best, at)
        })
        .collect();
    let (best, at) = partials
        .into_iter()
        .fold((0, None), |acc, p| if p.0 > acc.0 { p } else { acc });
    Ok(NarrowResult {
        r_found: best as f64 * search.r_step,
        center: at.map_or(DiscPoint::ORIGIN, |id| grid.point(id)),
        capped: best == search.r_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::ZeroSet;

    fn small() -> NarrowSearch {
        NarrowSearch {
            mesh: 0.05,
            r_max: 0.9,
            r_step: 0.02,
            r_count: 30,
            n_r: 4,
            n_a: 32,
        }
    }

    #[test]
    fn single_zero_sip() {
        let f = InnerFunction::blaschke(ZeroSet::simple([DiscPoint::ORIGIN]));
        let r = narrowness_probe(&f, 0.5, NarrowMode::Sip, &small()).unwrap();
        // largest disc inside 0 < |z| < 1/2: center 2 - sqrt 3, radius atanh(2 - sqrt 3)
        let want = (2.0 - 3f64.sqrt()).atanh();
        assert!(
            r.r_found <= want + 0.02 && r.r_found >= want - 0.07,
            "{r:?}"
        );
    }

    #[test]
    fn eps_near_one_finds_nothing() {
        let f = InnerFunction::blaschke(ZeroSet::simple([DiscPoint::ORIGIN]));
        let r = narrowness_probe(&f, 0.999, NarrowMode::Sip, &small()).unwrap();
        assert_eq!(r.r_found, 0.0);
    }

    #[test]
    fn p_contains_m() {
        let f = InnerFunction::blaschke(ZeroSet::simple([
            DiscPoint::new(0.3, 0.0).unwrap(),
            DiscPoint::new(-0.2, 0.5).unwrap(),
        ]));
        let p = narrowness_probe(&f, 0.3, NarrowMode::PClass, &small()).unwrap();
        let m = narrowness_probe(&f, 0.3, NarrowMode::MClass, &small()).unwrap();
        assert!(p.r_found >= m.r_found);
        assert!(narrowness_probe(&f, 0.6, NarrowMode::MClass, &small()).is_err());
    }
}
