//! Evaluation of Blaschke products, singular inner functions and their products.
//!
//! Products are accumulated as a log-modulus and an argument, so thousands of
//! factors neither underflow nor lose the phase. When a zero set carries a
//! certified bound on the Blaschke sum of omitted zeros, evaluation returns an
//! interval for `|B(z)|` that covers the untruncated product.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{mobius, DiscPoint, PairTerms, Polar};
use crate::turns::Turns;

/// Which model a zero set was generated in. Storage is always in the disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "disc")]
    Disc,
    #[serde(rename = "half-plane")]
    HalfPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub point: DiscPoint,
    pub mult: u32,
}

/// Bound on the zeros left out of a truncated sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Upper bound for the sum of `mult * (1 - |a|)` over omitted zeros.
    pub blaschke_sum: f64,
    /// Every omitted zero satisfies `1 - |a| <= max_depth`.
    pub max_depth: Option<f64>,
}

/// Where a zero set came from and how it was truncated.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub params: serde_json::Value,
    /// Cumulative entry counts at the end of each generator stage (row, level, ...).
    pub stages: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<String>,
}

/// Finite multiset of zeros, the data of a finite (or truncated) Blaschke product.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub model: Model,
    zeros: Vec<Zero>,
    pub tail: Option<TailBound>,
    pub provenance: Option<Provenance>,
}

impl ZeroSet {
    pub fn new(model: Model, zeros: Vec<Zero>) -> Result<Self> {
        if let Some(i) = zeros.iter().position(|z| z.mult == 0) {
            return Err(invalid("mult", format!("zero #{i} has multiplicity 0")));
        }
        Ok(ZeroSet {
            model,
            zeros,
            tail: None,
            provenance: None,
        })
    }

    pub fn empty() -> Self {
        ZeroSet {
            model: Model::Disc,
            zeros: Vec::new(),
            tail: None,
            provenance: None,
        }
    }

    /// Simple zeros at the given points.
    pub fn simple(points: impl IntoIterator<Item = DiscPoint>) -> Self {
        ZeroSet {
            model: Model::Disc,
            zeros: points
                .into_iter()
                .map(|point| Zero { point, mult: 1 })
                .collect(),
            tail: None,
            provenance: None,
        }
    }

    pub fn with_tail(mut self, tail: TailBound) -> Result<Self> {
        if !(tail.blaschke_sum >= 0.0) || !tail.blaschke_sum.is_finite() {
            return Err(invalid(
                "tail_bound",
                format!(
                    "must be a finite nonnegative number, got {}",
                    tail.blaschke_sum
                ),
            ));
        }
        if let Some(d) = tail.max_depth {
            if !(d > 0.0 && d <= 1.0) {
                return Err(invalid(
                    "tail_max_depth",
                    format!("must lie in (0, 1], got {d}"),
                ));
            }
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Number of zeros counted with multiplicity.
    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|z| z.mult as u64).sum()
    }

    /// `sum mult * (1 - |a|)` over the listed zeros.
    pub fn blaschke_sum(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| z.mult as f64 * z.point.depth())
            .sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &DiscPoint> + '_ {
        self.zeros.iter().map(|z| &z.point)
    }

    /// The first `n` entries, without tail metadata.
    pub fn prefix(&self, n: usize) -> ZeroSet {
        ZeroSet {
            model: self.model,
            zeros: self.zeros[..n.min(self.zeros.len())].to_vec(),
            tail: None,
            provenance: self.provenance.clone(),
        }
    }

    /// The stage boundaries recorded by the generator, or `[len]` when absent.
    pub fn stages(&self) -> Vec<usize> {
        match &self.provenance {
            Some(p) if !p.stages.is_empty() => p.stages.clone(),
            _ => vec![self.zeros.len()],
        }
    }
}

/// A point mass of a singular boundary measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle_turns: Turns,
    pub mass: f64,
}

impl Atom {
    pub fn new(angle_turns: Turns, mass: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(invalid("mass", format!("must be positive, got {mass}")));
        }
        Ok(Atom {
            angle_turns: angle_turns.normalized(),
            mass,
        })
    }

    pub fn angle(&self) -> f64 {
        self.angle_turns.radians()
    }
}

/// Finite atomic measure on the circle; the data of `S_mu`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SingularMeasure {
    atoms: Vec<Atom>,
}

impl SingularMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.mass > 0.0) {
                return Err(invalid("mass", format!("atom #{i} has mass {}", a.mass)));
            }
            let ai = a.angle_turns.normalized();
            for b in &atoms[..i] {
                if ai.cmp_guarded(&b.angle_turns.normalized()).is_eq() {
                    return Err(invalid(
                        "angle_turns",
                        format!("atom #{i} repeats the angle {}", a.angle_turns),
                    ));
                }
            }
        }
        Ok(SingularMeasure { atoms })
    }

    pub fn empty() -> Self {
        SingularMeasure::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// `Theta = B * S_mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFunction {
    pub blaschke: ZeroSet,
    pub singular: SingularMeasure,
}

impl InnerFunction {
    pub fn new(blaschke: ZeroSet, singular: SingularMeasure) -> Self {
        InnerFunction { blaschke, singular }
    }

    pub fn blaschke(zs: ZeroSet) -> Self {
        InnerFunction {
            blaschke: zs,
            singular: SingularMeasure::empty(),
        }
    }

    pub fn singular(mu: SingularMeasure) -> Self {
        InnerFunction {
            blaschke: ZeroSet::empty(),
            singular: mu,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.blaschke.is_empty() && self.singular.is_empty()
    }
}

/// A value with a certified interval for its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalResult {
    pub value: Complex64,
    /// `log |value|` of the listed factors.
    pub log_modulus: f64,
    pub modulus_lower: f64,
    pub modulus_upper: f64,
    /// A tail bound was present but could not be applied at this point.
    pub tail_uncertified: bool,
}

/// `b_a(z) = (|a|/a)(a - z)/(1 - conj(a) z)`, with `b_0(z) = z`.
pub fn blaschke_factor(a: &DiscPoint, z: &DiscPoint) -> Complex64 {
    let ac = a.to_complex();
    let zc = z.to_complex();
    if ac == Complex64::new(0.0, 0.0) {
        return zc;
    }
    let unit = ac.conj() / ac.norm();
    unit * (ac - zc) / (Complex64::new(1.0, 0.0) - ac.conj() * zc)
}

#[derive(Debug, Clone, Copy)]
struct PreparedZero {
    polar: Polar,
    a: Complex64,
    unit: Complex64,
    mult: f64,
}

/// A zero set prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct BlaschkeEvaluator {
    zeros: Vec<PreparedZero>,
    tail: Option<TailBound>,
}

impl BlaschkeEvaluator {
    pub fn new(zs: &ZeroSet) -> Self {
        let zeros = zs
            .zeros()
            .iter()
            .map(|z| {
                let a = z.point.to_complex();
                let n = a.norm();
                PreparedZero {
                    polar: Polar::from(&z.point),
                    a,
                    unit: if n == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        a.conj() / n
                    },
                    mult: z.mult as f64,
                }
            })
            .collect();
        BlaschkeEvaluator {
            zeros,
            tail: zs.tail,
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// `log |B(z)|` and the pseudohyperbolic distance from `z` to the nearest listed zero
    /// (`+inf` for an empty set).
    #[inline]
    pub fn log_modulus_and_gap(&self, z: &DiscPoint) -> (f64, f64) {
        let pz = Polar::from(z);
        let mut log_mod = 0.0;
        let mut min_rho_sq = f64::INFINITY;
        for q in &self.zeros {
            let t = PairTerms::new(&pz, &q.polar);
            let r2 = t.rho_sq();
            if r2 < min_rho_sq {
                min_rho_sq = r2;
            }
            log_mod += q.mult * t.log_rho();
        }
        (log_mod, min_rho_sq.sqrt())
    }

    /// Multiplicative factor `exp(-C(z) T)` accounting for omitted zeros, and whether
    /// the bound could not be certified at `z`.
    pub fn tail_factor(&self, z: &DiscPoint) -> (f64, bool) {
        let Some(tail) = self.tail else {
            return (1.0, false);
        };
        if tail.blaschke_sum == 0.0 {
            return (1.0, false);
        }
        let sz = z.depth();
        let certified = match tail.max_depth {
            // inf of rho(z, a) over 1 - |a| <= sm is (|a| - |z|)/(1 - |a||z|) at 1 - |a| = sm
            Some(sm) => sz > sm && (sz - sm) / (sz + sm * (1.0 - sz)) >= 0.5,
            None => false,
        };
        if !certified {
            return (0.0, true);
        }
        // rho >= 1/2 gives log(1/rho) <= 2(1 - rho^2) <= 2 (1 - |a|^2)(1 - |z|^2)/(1 - |z|)^2
        let c = 4.0 * (2.0 - sz) / sz;
        ((-c * tail.blaschke_sum).exp(), false)
    }

    pub fn eval(&self, z: &DiscPoint) -> EvalResult {
        let pz = Polar::from(z);
        let zc = z.to_complex();
        let mut log_mod = 0.0;
        let mut arg = 0.0;
        for q in &self.zeros {
            let t = PairTerms::new(&pz, &q.polar);
            log_mod += q.mult * t.log_rho();
            let f = if q.a == Complex64::new(0.0, 0.0) {
                zc
            } else {
                q.unit * (q.a - zc) / (Complex64::new(1.0, 0.0) - q.a.conj() * zc)
            };
            arg += q.mult * f.arg();
        }
        let modulus = log_mod.exp();
        let value = Complex64::from_polar(modulus, arg.rem_euclid(TAU));
        let (factor, flagged) = self.tail_factor(z);
        EvalResult {
            value,
            log_modulus: log_mod,
            modulus_lower: modulus * factor,
            modulus_upper: modulus,
            tail_uncertified: flagged,
        }
    }
}

/// `B(z) = prod b_{a_j}(z)^{mult_j}` with certified modulus bounds.
pub fn eval_blaschke(zs: &ZeroSet, z: &DiscPoint) -> EvalResult {
    BlaschkeEvaluator::new(zs).eval(z)
}

/// As [`eval_blaschke`], but an evaluation point on a listed zero is an error.
pub fn eval_blaschke_nonzero(zs: &ZeroSet, z: &DiscPoint) -> Result<EvalResult> {
    if let Some(index) = zs.points().position(|a| a == z) {
        return Err(Error::ZeroHit { index });
    }
    let r = eval_blaschke(zs, z);
    if r.modulus_upper == 0.0 {
        let index = zs
            .points()
            .position(|a| crate::geometry::pseudo_dist(a, z) == 0.0)
            .unwrap_or(0);
        return Err(Error::ZeroHit { index });
    }
    Ok(r)
}

/// Poisson kernel term `(1 - |z|^2)/|xi - z|^2` and the conjugate term
/// `2 Im(z conj(xi))/|xi - z|^2` for an atom at angle `alpha`.
#[inline]
fn herglotz_terms(pz: &Polar, alpha: f64) -> (f64, f64) {
    let (sa, ca) = alpha.sin_cos();
    let s = pz.depth;
    let dx = pz.ux - ca;
    let dy = pz.uy - sa;
    let chord2 = dx * dx + dy * dy;
    let dist2 = s * s + (1.0 - s) * chord2;
    let p = s * (2.0 - s) / dist2;
    let q = 2.0 * (1.0 - s) * (pz.uy * ca - pz.ux * sa) / dist2;
    (p, q)
}

/// `P[mu](z) = sum mass (1 - |z|^2)/|xi - z|^2`.
pub fn poisson(mu: &SingularMeasure, z: &DiscPoint) -> f64 {
    let pz = Polar::from(z);
    mu.atoms()
        .iter()
        .map(|a| a.mass * herglotz_terms(&pz, a.angle()).0)
        .sum()
}

/// `S_mu(z) = exp(-sum mass (xi + z)/(xi - z))`.
pub fn eval_singular(mu: &SingularMeasure, z: &DiscPoint) -> Complex64 {
    let pz = Polar::from(z);
    let (mut p, mut q) = (0.0, 0.0);
    for a in mu.atoms() {
        let (pa, qa) = herglotz_terms(&pz, a.angle());
        p += a.mass * pa;
        q += a.mass * qa;
    }
    Complex64::from_polar((-p).exp(), (-q).rem_euclid(TAU))
}

/// `Theta(z) = B(z) S_mu(z)` with bounds propagated from the Blaschke part.
pub fn eval_inner(f: &InnerFunction, z: &DiscPoint) -> EvalResult {
    InnerEvaluator::new(f).eval(z)
}

/// An inner function prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct InnerEvaluator {
    blaschke: BlaschkeEvaluator,
    atoms: Vec<(f64, f64)>,
}

impl InnerEvaluator {
    pub fn new(f: &InnerFunction) -> Self {
        InnerEvaluator {
            blaschke: BlaschkeEvaluator::new(&f.blaschke),
            atoms: f
                .singular
                .atoms()
                .iter()
                .map(|a| (a.angle(), a.mass))
                .collect(),
        }
    }

    pub fn blaschke(&self) -> &BlaschkeEvaluator {
        &self.blaschke
    }

    #[inline]
    fn singular_terms(&self, z: &DiscPoint) -> (f64, f64) {
        let pz = Polar::from(z);
        let (mut p, mut q) = (0.0, 0.0);
        for &(alpha, mass) in &self.atoms {
            let (pa, qa) = herglotz_terms(&pz, alpha);
            p += mass * pa;
            q += mass * qa;
        }
        (p, q)
    }

    /// `log |Theta(z)|` of the listed factors, the distance to the nearest zero, and the
    /// certified lower bound for `|Theta(z)|`.
    #[inline]
    pub fn probe(&self, z: &DiscPoint) -> (f64, f64, f64) {
        let (log_b, gap) = self.blaschke.log_modulus_and_gap(z);
        let (p, _) = self.singular_terms(z);
        let log_mod = log_b - p;
        let (factor, _) = self.blaschke.tail_factor(z);
        (log_mod, gap, log_mod.exp() * factor)
    }

    pub fn eval(&self, z: &DiscPoint) -> EvalResult {
        let b = self.blaschke.eval(z);
        let (p, q) = self.singular_terms(z);
        let s_mod = (-p).exp();
        let value = b.value * Complex64::from_polar(s_mod, -q);
        EvalResult {
            value,
            log_modulus: b.log_modulus - p,
            modulus_lower: b.modulus_lower * s_mod,
            modulus_upper: b.modulus_upper * s_mod,
            tail_uncertified: b.tail_uncertified,
        }
    }
}

/// `(1 - |a_k|^2)|B'(a_k)| = prod_{j != k} rho(a_k, a_j)^{mult_j}` for a simple zero `a_k`.
pub fn zero_derivative_product(zs: &ZeroSet, k: usize) -> Result<f64> {
    let zeros = zs.zeros();
    let Some(target) = zeros.get(k) else {
        return Err(invalid(
            "k",
            format!("index {k} out of range for {} zeros", zeros.len()),
        ));
    };
    if target.mult > 1 {
        return Err(Error::MultipleZero {
            index: k,
            mult: target.mult,
        });
    }
    let pk = Polar::from(&target.point);
    let log: f64 = zeros
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, z)| z.mult as f64 * PairTerms::new(&pk, &Polar::from(&z.point)).log_rho())
        .sum();
    Ok(log.exp())
}

/// Tolerance (in pseudohyperbolic distance) below which a zero is considered to sit
/// on the Jensen integration circle.
pub const JENSEN_CIRCLE_GUARD: f64 = 1e-9;

/// Both sides of Jensen's formula for `Theta o phi_z` on the circle of radius `r`:
/// the trapezoidal mean of `-log|Theta(phi_z(r e^{it}))|`, and
/// `-log|Theta(z)| - sum_{rho(z, a) < r} mult log(r / rho(z, a))`.
pub fn jensen_mean(zs: &ZeroSet, z: &DiscPoint, r: f64, n_quad: usize) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid("r", format!("must lie in (0, 1), got {r}")));
    }
    if n_quad == 0 {
        return Err(invalid("n_quad", "must be positive"));
    }
    let pz = Polar::from(z);
    let mut inside = 0.0;
    for (index, a) in zs.zeros().iter().enumerate() {
        let t = PairTerms::new(&pz, &Polar::from(&a.point));
        let rho = t.rho();
        if rho == 0.0 {
            return Err(Error::ZeroHit { index });
        }
        let distance = (rho - r).abs();
        if distance < JENSEN_CIRCLE_GUARD {
            return Err(Error::NearIntegrationCircle { index, distance });
        }
        if rho < r {
            inside += a.mult as f64 * (r / rho).ln();
        }
    }
    let eval = BlaschkeEvaluator::new(zs);
    let (log_at_z, _) = eval.log_modulus_and_gap(z);
    let rhs = -log_at_z - inside;

    let mut sum = 0.0;
    for k in 0..n_quad {
        let theta = TAU * k as f64 / n_quad as f64;
        let w = mobius(z, &DiscPoint::from_polar(r, theta)?);
        sum -= eval.log_modulus_and_gap(&w).0;
    }
    Ok((sum / n_quad as f64, rhs))
}
