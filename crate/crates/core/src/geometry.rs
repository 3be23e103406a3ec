//! Hyperbolic geometry of the unit disc and the upper half-plane.
//!
//! Points of the disc carry their distance to the unit circle (`depth = 1 - |z|`)
//! alongside the Cartesian coordinates. Every distance formula below is written in
//! terms of depths and unit directions, so points at depth far below `f64::EPSILON`
//! (the zeros of a thin sequence sit at depth `2^-144`) keep full relative accuracy.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscPoint {
    re: f64,
    im: f64,
    depth: f64,
}

impl DiscPoint {
    /// The origin.
    pub const ORIGIN: DiscPoint = DiscPoint {
        re: 0.0,
        im: 0.0,
        depth: 1.0,
    };

    /// Builds a point from Cartesian coordinates; `|z| >= 1` is rejected.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let r = re.hypot(im);
        if !(r < 1.0) || !re.is_finite() || !im.is_finite() {
            return Err(Error::OutsideDisc { re, im });
        }
        Ok(DiscPoint {
            re,
            im,
            depth: 1.0 - r,
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// Builds `(1 - depth) e^{i angle}`. The depth is kept exactly, so it may be far
    /// smaller than the spacing of doubles near 1.
    pub fn from_depth_angle(depth: f64, angle: f64) -> Result<Self> {
        if !(depth > 0.0 && depth <= 1.0) || !angle.is_finite() {
            return Err(invalid(
                "depth",
                format!("must lie in (0, 1], got {depth} at angle {angle}"),
            ));
        }
        let r = 1.0 - depth;
        Ok(DiscPoint {
            re: r * angle.cos(),
            im: r * angle.sin(),
            depth,
        })
    }

    /// Polar constructor by modulus.
    pub fn from_polar(modulus: f64, angle: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&modulus) {
            return Err(invalid(
                "modulus",
                format!("must lie in [0, 1), got {modulus}"),
            ));
        }
        Self::from_depth_angle(1.0 - modulus, angle)
    }

    /// Internal constructor when an accurate depth is known from a closed form.
    pub(crate) fn from_parts(z: Complex64, depth: f64) -> Result<Self> {
        if !(depth > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::OutsideDisc { re: z.re, im: z.im });
        }
        Ok(DiscPoint {
            re: z.re,
            im: z.im,
            depth: depth.min(1.0),
        })
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// `1 - |z|`, accurate to full relative precision.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn modulus(&self) -> f64 {
        1.0 - self.depth
    }

    /// `1 - |z|^2`.
    pub fn one_minus_mod_sq(&self) -> f64 {
        self.depth * (2.0 - self.depth)
    }

    /// Argument in (-pi, pi]; 0 at the origin.
    pub fn angle(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Unit direction `z/|z|`, `(1, 0)` at the origin.
    pub(crate) fn direction(&self) -> (f64, f64) {
        let r = self.re.hypot(self.im);
        if r == 0.0 {
            (1.0, 0.0)
        } else {
            (self.re / r, self.im / r)
        }
    }
}

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    re: f64,
    im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(Error::OutsideHalfPlane { re, im });
        }
        Ok(HalfPlanePoint { re, im })
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Reduces an angle to (-pi, pi].
pub fn reduce_angle(theta: f64) -> f64 {
    let mut r = theta.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// Depth and direction of a point, the form used by the pair formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Polar {
    pub ux: f64,
    pub uy: f64,
    pub depth: f64,
}

impl From<&DiscPoint> for Polar {
    fn from(p: &DiscPoint) -> Self {
        let (ux, uy) = p.direction();
        Polar {
            ux,
            uy,
            depth: p.depth,
        }
    }
}

/// `|z - w|^2`, `|1 - conj(w) z|^2` and `(1 - |z|^2)(1 - |w|^2)` for a pair of points.
///
/// With `s, t` the depths and `c = |u_z - u_w|^2` the squared chord between directions:
/// `|z - w|^2 = (t - s)^2 + p c` and `|1 - conj(w) z|^2 = (1 - p)^2 + p c`, `p = (1-s)(1-t)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairTerms {
    pub num: f64,
    pub den: f64,
    pub gram: f64,
}

impl PairTerms {
    #[inline]
    pub fn new(a: &Polar, b: &Polar) -> Self {
        let (s, t) = if a.depth >= b.depth {
            (a.depth, b.depth)
        } else {
            (b.depth, a.depth)
        };
        let dx = a.ux - b.ux;
        let dy = a.uy - b.uy;
        let chord2 = dx * dx + dy * dy;
        let p = (1.0 - s) * (1.0 - t);
        let one_minus_p = s + t * (1.0 - s);
        let diff = s - t;
        PairTerms {
            num: diff * diff + p * chord2,
            den: one_minus_p * one_minus_p + p * chord2,
            gram: s * (2.0 - s) * t * (2.0 - t),
        }
    }

    #[inline]
    pub fn rho_sq(&self) -> f64 {
        (self.num / self.den).min(1.0)
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho_sq().sqrt()
    }

    /// `1 - rho^2`, accurate when rho is close to 1.
    #[inline]
    pub fn one_minus_rho_sq(&self) -> f64 {
        (self.gram / self.den).min(1.0)
    }

    /// `1 - rho`, accurate when rho is close to 1.
    #[inline]
    pub fn one_minus_rho(&self) -> f64 {
        self.one_minus_rho_sq() / (1.0 + self.rho())
    }

    /// `log rho`; `-inf` when the points coincide.
    #[inline]
    pub fn log_rho(&self) -> f64 {
        let r2 = self.rho_sq();
        if r2 < 0.5 {
            0.5 * r2.ln()
        } else {
            0.5 * (-self.one_minus_rho_sq()).ln_1p()
        }
    }
}

/// Pseudohyperbolic distance `|(z - w)/(1 - conj(w) z)|`.
pub fn pseudo_dist(z: &DiscPoint, w: &DiscPoint) -> f64 {
    PairTerms::new(&z.into(), &w.into()).rho()
}

/// `1 - rho(z, w)^2 = (1 - |z|^2)(1 - |w|^2) / |1 - conj(w) z|^2`.
pub fn one_minus_pseudo_dist_sq(z: &DiscPoint, w: &DiscPoint) -> f64 {
    PairTerms::new(&z.into(), &w.into()).one_minus_rho_sq()
}

/// Hyperbolic distance `atanh rho(z, w)`.
pub fn hyp_dist(z: &DiscPoint, w: &DiscPoint) -> f64 {
    let t = PairTerms::new(&z.into(), &w.into());
    let rho = t.rho();
    if rho < 0.5 {
        rho.atanh()
    } else {
        0.5 * ((1.0 + rho) / t.one_minus_rho()).ln()
    }
}

/// The involutive automorphism `phi_a(w) = (a - w)/(1 - conj(a) w)`.
pub fn mobius(a: &DiscPoint, w: &DiscPoint) -> DiscPoint {
    let t = PairTerms::new(&a.into(), &w.into());
    let ac = a.to_complex();
    let wc = w.to_complex();
    let value = (ac - wc) / (Complex64::new(1.0, 0.0) - ac.conj() * wc);
    let depth = t.one_minus_rho();
    // depth > 0 because both inputs are interior; the fallback only guards underflow
    DiscPoint::from_parts(value, depth.max(f64::MIN_POSITIVE)).expect("automorphism keeps the disc")
}

/// Cayley transform `z -> (z - i)/(z + i)` from the upper half-plane onto the disc.
pub fn cayley(p: &HalfPlanePoint) -> DiscPoint {
    let (x, y) = (p.re, p.im);
    let d = x * x + (y + 1.0) * (y + 1.0);
    let re = ((x * x + y * y) - 1.0) / d;
    let im = -2.0 * x / d;
    let one_minus_sq = 4.0 * y / d;
    let modulus = re.hypot(im).min(1.0);
    let depth = one_minus_sq / (1.0 + modulus);
    DiscPoint::from_parts(Complex64::new(re, im), depth).expect("Cayley image is interior")
}

/// Inverse Cayley transform `w -> i(1 + w)/(1 - w)`.
pub fn cayley_inverse(w: &DiscPoint) -> HalfPlanePoint {
    let s = w.depth;
    let alpha = w.angle();
    let half = (0.5 * alpha).sin();
    // |1 - w|^2 = s^2 + 4(1 - s) sin^2(alpha/2)
    let d = s * s + 4.0 * (1.0 - s) * half * half;
    let re = -2.0 * w.im / d;
    let im = w.one_minus_mod_sq() / d;
    HalfPlanePoint { re, im }
}

/// Pseudohyperbolic distance computed directly in the half-plane:
/// `1 - rho^2 = 4 Im z Im w / ((Re z - Re w)^2 + (Im z + Im w)^2)`.
pub fn pseudo_dist_half_plane(z: &HalfPlanePoint, w: &HalfPlanePoint) -> f64 {
    let dx = z.re - w.re;
    let dy = z.im - w.im;
    let sy = z.im + w.im;
    ((dx * dx + dy * dy) / (dx * dx + sy * sy)).sqrt()
}

/// An arc of the unit circle, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub center_angle: f64,
    pub half_length: f64,
}

impl Arc {
    pub fn new(center_angle: f64, half_length: f64) -> Result<Self> {
        if !(half_length > 0.0 && half_length <= PI) {
            return Err(invalid(
                "half_length",
                format!("must lie in (0, pi], got {half_length}"),
            ));
        }
        Ok(Arc {
            center_angle: reduce_angle(center_angle),
            half_length,
        })
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    /// The arc with the same center and twice the length (capped at the full circle).
    pub fn doubled(&self) -> Arc {
        Arc {
            center_angle: self.center_angle,
            half_length: (2.0 * self.half_length).min(PI),
        }
    }

    /// Whether the direction `angle` lies in the half-open arc `[c - h, c + h)`.
    pub fn contains_angle(&self, angle: f64) -> bool {
        if self.half_length >= PI {
            return true;
        }
        let d = reduce_angle(angle - self.center_angle);
        -self.half_length <= d && d < self.half_length
    }

    /// Membership in the Carleson square `{z : z/|z| in I, 1 - |z| <= |I|}`.
    pub fn carleson_square_contains(&self, z: &DiscPoint) -> bool {
        z.depth <= self.length() && self.contains_angle(z.angle())
    }
}

/// The dyadic arc `{e^{i theta} : k 2^-m <= theta / 2 pi < (k + 1) 2^-m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicArc {
    pub level: u32,
    pub index: u64,
}

impl DyadicArc {
    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > 62 {
            return Err(invalid("level", format!("must be at most 62, got {level}")));
        }
        if index >= 1u64 << level {
            return Err(invalid(
                "index",
                format!("must be below 2^{level}, got {index}"),
            ));
        }
        Ok(DyadicArc { level, index })
    }

    /// Length as a fraction of the circle, `2^-m`.
    pub fn turns(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Arclength `2 pi 2^-m`.
    pub fn arclength(&self) -> f64 {
        TAU * self.turns()
    }

    /// Midpoint angle in radians.
    pub fn center_angle(&self) -> f64 {
        TAU * (self.index as f64 + 0.5) * self.turns()
    }

    pub fn arc(&self) -> Arc {
        Arc {
            center_angle: reduce_angle(self.center_angle()),
            half_length: 0.5 * self.arclength(),
        }
    }

    pub fn parent(&self) -> Option<DyadicArc> {
        (self.level > 0).then(|| DyadicArc {
            level: self.level - 1,
            index: self.index / 2,
        })
    }

    pub fn children(&self) -> [DyadicArc; 2] {
        let level = self.level + 1;
        [
            DyadicArc {
                level,
                index: 2 * self.index,
            },
            DyadicArc {
                level,
                index: 2 * self.index + 1,
            },
        ]
    }

    /// Whether `other` is a (non-strict) dyadic descendant of `self`.
    pub fn contains(&self, other: &DyadicArc) -> bool {
        other.level >= self.level && (other.index >> (other.level - self.level)) == self.index
    }

    /// The point `(1 - l) e^{i theta_c}` above the arc, `l` the arclength.
    /// Levels with `l >= 1` (levels 0, 1 and 2) have no such point.
    pub fn top_center(&self) -> Result<DiscPoint> {
        let l = self.arclength();
        if l >= 1.0 {
            return Err(Error::CoarseDyadicArc { level: self.level });
        }
        DiscPoint::from_depth_angle(l, self.center_angle())
    }
}

/// The region `Q(theta, h, delta) = {r e^{i t} : 0 < 1 - r < delta h, |t - theta| < h}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonBox {
    pub theta: f64,
    pub h: f64,
    pub delta: f64,
}

impl CarlesonBox {
    pub fn new(theta: f64, h: f64, delta: f64) -> Result<Self> {
        if !(h > 0.0 && h <= PI) {
            return Err(invalid("h", format!("must lie in (0, pi], got {h}")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1], got {delta}")));
        }
        Ok(CarlesonBox {
            theta: reduce_angle(theta),
            h,
            delta,
        })
    }

    pub fn contains(&self, z: &DiscPoint) -> bool {
        box_contains(self, z)
    }
}

/// Strict membership in `Q(theta, h, delta)`.
pub fn box_contains(b: &CarlesonBox, z: &DiscPoint) -> bool {
    let d = z.depth;
    if !(d > 0.0 && d < b.delta * b.h) {
        return false;
    }
    reduce_angle(z.angle() - b.theta).abs() < b.h
}
