//! Per-zero thinness and tail separation profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::eval::ZeroSet;
use crate::geometry::{PairTerms, Polar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinEntry {
    pub k: usize,
    /// `(1 - |a_k|^2) |B'(a_k)| = prod_{j != k} rho(a_k, a_j)`; 0 for a multiple zero.
    pub derivative_product: f64,
    /// `sum_{j != k} (1 - rho(a_k, a_j)^2)`.
    pub tail_sum: f64,
    pub multiple: bool,
}

pub fn thin_profile(zs: &ZeroSet) -> Vec<ThinEntry> {
    let polar: Vec<(Polar, f64)> = zs
        .zeros()
        .iter()
        .map(|a| (Polar::from(&a.point), a.mult as f64))
        .collect();
    (0..polar.len())
        .into_par_iter()
        .map(|k| {
            let (pk, mk) = polar[k];
            let mut log = 0.0;
            let mut tail = (mk - 1.0).max(0.0);
            for (j, (pj, mj)) in polar.iter().enumerate() {
                if j == k {
                    continue;
                }
                let t = PairTerms::new(&pk, pj);
                log += mj * t.log_rho();
                tail += mj * t.one_minus_rho_sq();
            }
            let multiple = mk > 1.0;
            ThinEntry {
                k,
                derivative_product: if multiple { 0.0 } else { log.exp() },
                tail_sum: tail,
                multiple,
            }
        })
        .collect()
}

/// `(N, inf { rho(a_j, a_k) : j != k, j, k >= N })` for every `N` leaving two entries.
/// A multiple zero contributes distance 0 while it is in the tail.
pub fn separation_profile(zs: &ZeroSet) -> Vec<(usize, f64)> {
    let zeros = zs.zeros();
    let n = zeros.len();
    if n < 2 {
        return Vec::new();
    }
    let polar: Vec<Polar> = zeros.iter().map(|a| Polar::from(&a.point)).collect();
    // nearest later neighbour of each entry
    let row_min: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let own = if zeros[j].mult > 1 {
                0.0
            } else {
                f64::INFINITY
            };
            polar[j + 1..]
                .iter()
                .map(|q| PairTerms::new(&polar[j], q).rho())
                .fold(own, f64::min)
        })
        .collect();
    let mut out = Vec::with_capacity(n - 1);
    let mut run = if zeros[n - 1].mult > 1 {
        0.0
    } else {
        f64::INFINITY
    };
    for start in (0..n - 1).rev() {
        run = run.min(row_min[start]);
        out.push((start, run));
    }
    out.reverse();
    out
}
