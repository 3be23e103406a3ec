//! Assembly of all diagnostics into a report with three-valued evidence labels.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::diagnostics::carleson::{box_sup, cn_constant};
use crate::diagnostics::eta::{eta_curve, kappa, uniform_t_grid, EtaCurve, DEFAULT_R_MAX};
use crate::diagnostics::narrow::{narrowness_probe, NarrowMode, NarrowResult, NarrowSearch};
use crate::diagnostics::profiles::{separation_profile, thin_profile};
use crate::error::Result;
use crate::eval::{poisson, InnerFunction, SingularMeasure, ZeroSet};
use crate::geometry::DiscPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Evidence,
    pub thresholds: BTreeMap<String, f64>,
    pub note: String,
}

impl Verdict {
    fn new(label: Evidence, thresholds: &[(&str, f64)], note: impl Into<String>) -> Self {
        Verdict {
            label,
            thresholds: thresholds
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub t_values: Vec<f64>,
    pub r_max: f64,
    pub mesh: f64,
    /// CN evidence requires the constant below this value.
    pub cn_threshold: f64,
    /// CN evidence requires relative growth below this from the half to the full truncation.
    pub cn_stable_growth: f64,
    /// Relative growth above which CN is judged divergent.
    pub cn_divergent_growth: f64,
    /// SIP evidence requires `eta(t_max) > 1 - sip_tol`.
    pub sip_tol: f64,
    /// `eta(t_max)` below this counts against SIP.
    pub sip_against: f64,
    /// WEP evidence requires `eta(t_min)` above this; below it at `t_max` counts against.
    pub wep_floor: f64,
    /// Thin evidence requires the last tail sum below this.
    pub thin_tol: f64,
    pub deltas: Vec<f64>,
    pub narrow_eps: f64,
    pub narrow: NarrowSearch,
    /// M evidence requires the embedded radius in `{eps < |Theta| < 1 - eps}` at most this.
    pub narrow_radius: f64,
    /// Level `C` of the area integral over `{P[mu] >= C}`.
    pub area_level: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            t_values: uniform_t_grid(0.05, &[0.99, 0.999]),
            r_max: DEFAULT_R_MAX,
            mesh: 0.1,
            cn_threshold: 50.0,
            cn_stable_growth: 0.05,
            cn_divergent_growth: 0.2,
            sip_tol: 0.1,
            sip_against: 0.5,
            wep_floor: 1e-8,
            thin_tol: 0.01,
            deltas: vec![1.0, 0.25, 0.0625],
            narrow_eps: 0.25,
            narrow: NarrowSearch::default(),
            narrow_radius: 1.0,
            area_level: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnSummary {
    pub value: f64,
    pub half_truncation: usize,
    pub half_value: f64,
    pub growth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaIntegral {
    pub level: f64,
    /// `\int_{P[mu] >= level, |z| <= r_max} dA / (1 - |z|)` by a polar midpoint rule.
    pub value: f64,
    pub r_max: f64,
    pub n_depth: usize,
    pub n_angle: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub n_zeros: usize,
    pub n_atoms: usize,
    pub cn_constant: CnSummary,
    pub thin_tail: Option<f64>,
    pub thin_derivative_product: Option<f64>,
    pub separation: Option<f64>,
    pub box_sup_by_delta: Vec<(f64, f64)>,
    pub box_sup_factor: f64,
    pub eta_curve: EtaCurve,
    pub kappa_half: f64,
    pub narrow_m: NarrowResult,
    pub area_integral: Option<AreaIntegral>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub config: ClassifyConfig,
}

/// Truncation compared with the full set: the middle recorded stage, else half the entries.
fn half_truncation(zs: &ZeroSet) -> usize {
    let stages = zs.stages();
    if stages.len() >= 2 {
        stages[(stages.len() - 1) / 2]
    } else {
        zs.len() / 2
    }
}

/// `\int dA/(1 - |z|)` over `{P[mu] >= level}` in `|z| <= r_max`, with a midpoint rule in
/// `(log(1 - |z|), arg z)`.
pub fn area_integral(
    mu: &SingularMeasure,
    level: f64,
    r_max: f64,
    n_depth: usize,
    n_angle: usize,
) -> AreaIntegral {
    let lo = (1.0 - r_max).ln();
    let step = -lo / n_depth as f64;
    let dth = TAU / n_angle as f64;
    let mut value = 0.0;
    for i in 0..n_depth {
        let u = lo + (i as f64 + 0.5) * step;
        let s = u.exp();
        // dA / s = (1 - s) ds dtheta / s = (1 - s) du dtheta
        let w = (1.0 - s) * step * dth;
        for j in 0..n_angle {
            let z =
                DiscPoint::from_depth_angle(s, (j as f64 + 0.5) * dth).expect("depth in (0, 1)");
            if poisson(mu, &z) >= level {
                value += w;
            }
        }
    }
    AreaIntegral {
        level,
        value,
        r_max,
        n_depth,
        n_angle,
    }
}

pub fn classify(f: &InnerFunction, config: &ClassifyConfig) -> Result<Report> {
    let zs = &f.blaschke;
    let mut verdicts = BTreeMap::new();

    let cn = cn_constant(zs);
    let half = half_truncation(zs);
    let cn_half = cn_constant(&zs.prefix(half));
    let growth = if cn_half > 0.0 {
        cn / cn_half - 1.0
    } else {
        0.0
    };
    let cn_thresholds = [
        ("cn_threshold", config.cn_threshold),
        ("stable_growth", config.cn_stable_growth),
        ("divergent_growth", config.cn_divergent_growth),
    ];
    // a single recorded stage without a tail bound is a complete finite product
    let finite = zs.tail.is_none() && zs.stages().len() <= 1;
    let cn_label = if zs.is_empty() || (finite && cn < config.cn_threshold) {
        Evidence::EvidenceFor
    } else if finite {
        Evidence::Inconclusive
    } else if cn < config.cn_threshold && growth < config.cn_stable_growth {
        Evidence::EvidenceFor
    } else if cn >= config.cn_threshold || growth > config.cn_divergent_growth {
        Evidence::EvidenceAgainst
    } else {
        Evidence::Inconclusive
    };
    verdicts.insert(
        "CN".to_string(),
        Verdict::new(
            cn_label,
            &cn_thresholds,
            if finite {
                format!("constant {cn} for a finite set of {} entries", zs.len())
            } else {
                format!("constant {cn} at {} entries, {cn_half} at {half}", zs.len())
            },
        ),
    );

    let thin = thin_profile(zs);
    let last = thin.last().copied();
    let sep = separation_profile(zs).last().map(|e| e.1);
    let thin_label = match last {
        _ if finite => Evidence::Inconclusive,
        None => Evidence::Inconclusive,
        Some(e) if e.multiple => Evidence::EvidenceAgainst,
        Some(e) if e.tail_sum < config.thin_tol => Evidence::EvidenceFor,
        Some(e) if e.tail_sum > 0.5 => Evidence::EvidenceAgainst,
        Some(_) => Evidence::Inconclusive,
    };
    verdicts.insert(
        "thin".to_string(),
        Verdict::new(
            thin_label,
            &[("tail_sum", config.thin_tol), ("against_tail_sum", 0.5)],
            if finite {
                "finite set: no tail to test"
            } else {
                "tail sum at the last listed zero"
            },
        ),
    );

    let box_sup_by_delta = config.deltas.iter().map(|&d| (d, box_sup(zs, d))).collect();

    let curve = eta_curve(f, &config.t_values, config.r_max, config.mesh)?;
    let first = curve
        .samples
        .iter()
        .find_map(|s| s.estimate.map(|e| (s.t, e)));
    let last_eta = curve.last_estimate();
    let sip_label = match last_eta {
        Some((_, e)) if e > 1.0 - config.sip_tol => Evidence::EvidenceFor,
        Some((_, e)) if e < config.sip_against => Evidence::EvidenceAgainst,
        _ => Evidence::Inconclusive,
    };
    let mut sip = Verdict::new(
        sip_label,
        &[
            ("eta_min", 1.0 - config.sip_tol),
            ("against_below", config.sip_against),
            ("t_max", last_eta.map_or(f64::NAN, |p| p.0)),
        ],
        format!(
            "eta at the largest probed t; region |z| <= {}, mesh {}",
            config.r_max, config.mesh
        ),
    );
    let wep_label = match (first, last_eta) {
        (Some((_, e)), _) if e > config.wep_floor => Evidence::EvidenceFor,
        (_, Some((_, e))) if e <= config.wep_floor => Evidence::EvidenceAgainst,
        _ => Evidence::Inconclusive,
    };
    verdicts.insert(
        "WEP".to_string(),
        Verdict::new(
            wep_label,
            &[("floor", config.wep_floor)],
            "eta at the smallest and largest probed t",
        ),
    );

    let narrow_m = narrowness_probe(f, config.narrow_eps, NarrowMode::MClass, &config.narrow)?;
    let m_label = if narrow_m.r_found <= config.narrow_radius {
        Evidence::EvidenceFor
    } else if narrow_m.capped {
        Evidence::EvidenceAgainst
    } else {
        Evidence::Inconclusive
    };
    let mut m = Verdict::new(
        m_label,
        &[
            ("eps", config.narrow_eps),
            ("max_radius", config.narrow_radius),
        ],
        format!(
            "largest disc found in the two-sided sublevel set: {}",
            narrow_m.r_found
        ),
    );

    // SIP lies inside M
    if sip.label == Evidence::EvidenceFor {
        match m.label {
            Evidence::EvidenceAgainst => {
                sip.label = Evidence::Inconclusive;
                m.label = Evidence::Inconclusive;
                sip.note.push_str("; conflicts with the M probe");
                m.note.push_str("; conflicts with the SIP evidence");
            }
            Evidence::Inconclusive => {
                m.label = Evidence::EvidenceFor;
                m.note.push_str("; implied by the SIP evidence");
            }
            Evidence::EvidenceFor => {}
        }
    }
    let p_label = match (cn_label, m.label) {
        (Evidence::EvidenceFor, Evidence::EvidenceFor) => Evidence::EvidenceFor,
        (Evidence::EvidenceAgainst, _) | (_, Evidence::EvidenceAgainst) => {
            Evidence::EvidenceAgainst
        }
        _ => Evidence::Inconclusive,
    };
    verdicts.insert(
        "P".to_string(),
        Verdict::new(p_label, &[], "requires both CN and M evidence"),
    );
    verdicts.insert("SIP".to_string(), sip);
    verdicts.insert("M".to_string(), m);

    let area = (!f.singular.is_empty())
        .then(|| area_integral(&f.singular, config.area_level, config.r_max, 256, 512));

    Ok(Report {
        n_zeros: zs.len(),
        n_atoms: f.singular.atoms().len(),
        cn_constant: CnSummary {
            value: cn,
            half_truncation: half,
            half_value: cn_half,
            growth,
        },
        thin_tail: last.map(|e| e.tail_sum),
        thin_derivative_product: last.map(|e| e.derivative_product),
        separation: sep,
        box_sup_by_delta,
        box_sup_factor: 4.0,
        kappa_half: kappa(&curve, 0.5),
        eta_curve: curve,
        narrow_m,
        area_integral: area,
        verdicts,
        config: config.clone(),
    })
}
