//! Carleson-type sums over a zero set.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::eval::ZeroSet;
use crate::geometry::{reduce_angle, DiscPoint, PairTerms, Polar};

/// `S_t(z) = sum_{rho(z, a_j) >= t} mult_j (1 - rho(z, a_j))`.
pub fn s_t_sum(zs: &ZeroSet, z: &DiscPoint, t: f64) -> f64 {
    let pz = Polar::from(z);
    zs.zeros()
        .iter()
        .filter_map(|a| {
            let p = PairTerms::new(&pz, &Polar::from(&a.point));
            (p.rho() >= t).then(|| a.mult as f64 * p.one_minus_rho())
        })
        .sum()
}

/// Row sums `sum_j mult_j (1 - rho(a_j, a_k)^2)` for every listed zero.
pub fn cn_rows(zs: &ZeroSet) -> Vec<f64> {
    let polar: Vec<(Polar, f64)> = zs
        .zeros()
        .iter()
        .map(|a| (Polar::from(&a.point), a.mult as f64))
        .collect();
    polar
        .par_iter()
        .map(|(pk, _)| {
            polar
                .iter()
                .map(|(pj, mj)| mj * PairTerms::new(pk, pj).one_minus_rho_sq())
                .sum()
        })
        .collect()
}

/// `sup_k sum_j (1 - rho(a_j, a_k)^2)`, multiplicities counted; 0 for an empty set.
pub fn cn_constant(zs: &ZeroSet) -> f64 {
    cn_rows(zs).into_iter().fold(0.0, f64::max)
}

/// Approximate `sup_{theta, h} h^-1 sum_{a in Q(theta, h, delta)} (1 - |a|)`.
///
/// Candidate boxes are centred at zero arguments with `h = (1 - |a_k|) 2^m / delta`,
/// `h <= pi`, and are closed (the limit of boxes shrinking onto `h`). Moving an arbitrary
/// box to such a candidate loses at most a factor 4. For `delta` a power of two the
/// candidates of `delta / 4` are candidates of `delta`, so values along
/// `1, 1/4, 1/16, ...` are nonincreasing.
pub fn box_sup(zs: &ZeroSet, delta: f64) -> f64 {
    if zs.is_empty() || !(delta > 0.0 && delta <= 1.0) {
        return 0.0;
    }
    let items: Vec<(f64, f64, f64)> = zs
        .zeros()
        .iter()
        .map(|a| (a.point.angle(), a.point.depth(), a.mult as f64))
        .collect();
    items
        .par_iter()
        .map(|&(theta, d0, _)| {
            let mut best: f64 = 0.0;
            let mut h = d0 / delta;
            while h <= PI {
                let cap = delta * h;
                let mass: f64 = items
                    .iter()
                    .filter(|&&(a, d, _)| d <= cap && reduce_angle(a - theta).abs() <= h)
                    .map(|&(_, d, m)| m * d)
                    .sum();
                best = best.max(mass / h);
                h *= 2.0;
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}
