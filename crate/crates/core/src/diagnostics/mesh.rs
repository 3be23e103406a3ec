//! Nested hyperbolic probe meshes.
//!
//! Rings sit at hyperbolic radii `i h` (plus one ring at `r_max`); ring `i` carries
//! `2^k` equally spaced points, `2^k` the least power of two at least its hyperbolic
//! circumference divided by `h`. Halving `h` keeps every ring and doubles every count,
//! so the probes of a mesh are a subset of the probes of its refinement.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::DiscPoint;

/// Largest number of points placed on one ring.
pub const MAX_RING_POINTS: u64 = 1 << 24;

/// Fixed chunk size for splitting rings into work units.
pub(crate) const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ring {
    /// Hyperbolic radius.
    pub radius: f64,
    /// `1 - tanh(radius)`.
    pub depth: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicMesh {
    pub h: f64,
    pub r_max: f64,
    pub rings: Vec<Ring>,
}

/// Index of a probe: ring, then position on the ring. Ordered as (radius, angle).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ProbeId {
    pub ring: usize,
    pub j: u64,
}

fn ring_count(radius: f64, h: f64) -> u64 {
    if radius == 0.0 {
        return 1;
    }
    let x = PI * (2.0 * radius).sinh() / h;
    let mut n = 1u64;
    while (n as f64) < x && n < MAX_RING_POINTS {
        n *= 2;
    }
    n
}

/// `1 - tanh(d)` without cancellation.
pub(crate) fn depth_at(d: f64) -> f64 {
    2.0 / ((2.0 * d).exp() + 1.0)
}

impl HyperbolicMesh {
    pub fn new(h: f64, r_max: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid("mesh", format!("must be positive, got {h}")));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(invalid("r_max", format!("must lie in (0, 1), got {r_max}")));
        }
        let outer_depth = 1.0 - r_max;
        let mut rings = Vec::new();
        let mut i = 0u64;
        loop {
            let radius = i as f64 * h;
            let depth = depth_at(radius);
            if depth < outer_depth {
                break;
            }
            rings.push(Ring {
                radius,
                depth,
                count: ring_count(radius, h),
            });
            i += 1;
        }
        let last = rings.last().map_or(1.0, |r| r.depth);
        if last > outer_depth {
            let radius = r_max.atanh();
            rings.push(Ring {
                radius,
                depth: outer_depth,
                count: ring_count(radius, h),
            });
        }
        Ok(HyperbolicMesh { h, r_max, rings })
    }

    pub fn len(&self) -> u64 {
        self.rings.iter().map(|r| r.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    pub fn point(&self, id: ProbeId) -> DiscPoint {
        let ring = &self.rings[id.ring];
        if ring.radius == 0.0 {
            return DiscPoint::ORIGIN;
        }
        let angle = TAU * (id.j as f64 / ring.count as f64);
        DiscPoint::from_depth_angle(ring.depth, angle).expect("ring depth lies in (0, 1]")
    }

    /// Work units `(ring, j_start, j_end)` in probe order; independent of the thread count.
    pub(crate) fn chunks(&self) -> Vec<(usize, u64, u64)> {
        let mut out = Vec::new();
        for (ri, r) in self.rings.iter().enumerate() {
            let mut start = 0;
            while start < r.count {
                let end = (start + CHUNK).min(r.count);
                out.push((ri, start, end));
                start = end;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hyp_dist;

    #[test]
    fn refinement_is_nested() {
        let coarse = HyperbolicMesh::new(0.2, 0.99).unwrap();
        let fine = HyperbolicMesh::new(0.1, 0.99).unwrap();
        for (ci, ring) in coarse.rings.iter().enumerate() {
            let fi = fine
                .rings
                .iter()
                .position(|r| r.radius == ring.radius)
                .expect("ring kept");
            let want = if ring.radius == 0.0 {
                1
            } else {
                2 * ring.count
            };
            assert_eq!(fine.rings[fi].count, want);
            for j in 0..ring.count {
                let a = coarse.point(ProbeId { ring: ci, j });
                let scale = fine.rings[fi].count / ring.count;
                let b = fine.point(ProbeId {
                    ring: fi,
                    j: j * scale,
                });
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn covering_radius() {
        let h = 0.1;
        let mesh = HyperbolicMesh::new(h, 0.9).unwrap();
        // neighbours on a ring are at most h apart
        for (ri, r) in mesh.rings.iter().enumerate().skip(1) {
            let a = mesh.point(ProbeId { ring: ri, j: 0 });
            let b = mesh.point(ProbeId { ring: ri, j: 1 });
            assert!(
                hyp_dist(&a, &b) <= h * (1.0 + 1e-9),
                "ring {ri} radius {}",
                r.radius
            );
        }
        assert_eq!(mesh.rings.last().unwrap().depth, 1.0 - 0.9);
    }
}
