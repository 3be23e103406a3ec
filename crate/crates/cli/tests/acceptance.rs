//! Acceptance criteria 1-9. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! The criteria run one at a time so their wall-clock budgets are measured without
//! interference from each other.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use innerfn::diagnostics::{
    box_sup, cn_constant, eta_curve, thin_profile, uniform_t_grid, DEFAULT_R_MAX,
};
use innerfn::entropy::{
    b2_tail_profile, build_sipification, claim_ratios, entropy_integral, family_L, g_entropy_sum,
    l_count_for, length_sum, whitney_scan, BoundaryArc, BoundarySet,
};
use innerfn::eval::{eval_blaschke, jensen_mean, Atom, InnerFunction, SingularMeasure, ZeroSet};
use innerfn::geometry::{cayley_inverse, mobius, pseudo_dist, pseudo_dist_half_plane, DiscPoint};
use innerfn::turns::Turns;
use innerfn::zoo::{
    gen_cantor_like, gen_exponential, gen_finite_cross, gen_stolz_mult, gen_thin, gen_treil_grid,
    AngleRule, RadiusRule,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

/// Runs one criterion under the lock, prints its line and fails the test on FAIL.
fn criterion(n: u32, budget: Duration, body: impl FnOnce() -> (bool, String)) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {verdict} ({detail}; {:.2} s, budget {} s)",
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    assert!(ok && in_time, "criterion {n} failed: {detail}");
}

fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> DiscPoint {
    let r = r_max * rng.gen::<f64>().sqrt();
    DiscPoint::from_polar(r, rng.gen_range(0.0..TAU)).unwrap()
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

#[test]
fn criterion_1_exact_values() {
    criterion(1, Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut at_zero, mut closed): (f64, f64) = (0.0, 0.0);
        for r in [0.05, 0.1, 0.2] {
            let zs = gen_finite_cross(r).unwrap();
            at_zero =
                at_zero.max((eval_blaschke(&zs, &DiscPoint::ORIGIN).value - r.powi(4)).norm());
            for _ in 0..1000 {
                let z = random_point(&mut rng, 0.999);
                let w = z.to_complex();
                let want = (w.powi(4) + r.powi(4)) / (one() + r.powi(4) * w.powi(4));
                closed = closed.max((eval_blaschke(&zs, &z).value - want).norm());
            }
        }
        (
            at_zero < 1e-12 && closed < 1e-12,
            format!("max |B(0) - r^4| = {at_zero:.1e}, max closed-form error = {closed:.1e}"),
        )
    });
}

#[test]
fn criterion_2_eta_jump() {
    criterion(2, Duration::from_secs(30), || {
        let r: f64 = 0.05;
        let f = InnerFunction::blaschke(gen_finite_cross(r).unwrap());
        let ts = [r, r + 0.001, r + 0.02];
        let curve = eta_curve(&f, &ts, DEFAULT_R_MAX, 0.02).unwrap();
        let at = |i: usize| curve.samples[i].estimate.unwrap_or(f64::NAN);
        let r4 = r.powi(4);
        let s = SQRT_2 * r / (1.0 + r * r);
        let near = curve.samples[1].argmin.map_or(f64::NAN, |p| p.modulus());
        let jump_witness = curve.samples[2].argmin.unwrap();
        let zs = &f.blaschke;
        let witness_rho = zs
            .points()
            .map(|a| pseudo_dist(&jump_witness, a))
            .fold(1.0, f64::min);
        let ok_r = ((at(0) - r4) / r4).abs() < 0.05;
        let ok_jump = at(2) >= 2.0 * r4;
        let ok_s = (near - s).abs() < 0.01;
        (
            ok_r && ok_jump && ok_s,
            format!(
                "eta(r) = {:.4e} vs r^4 = {r4:.4e}; eta(r + 0.02) = {:.4e} vs 2r^4; \
                 witness |z| = {near:.4} at t = r + 0.001 vs s = {s:.4}; \
                 witness at t = r + 0.02: |z| = {:.4}, rho to zeros = {witness_rho:.4}",
                at(0),
                at(2),
                jump_witness.modulus()
            ),
        )
    });
}

#[test]
fn criterion_3_jensen() {
    criterion(3, Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let n = rng.gen_range(1..=20);
            let zs = ZeroSet::simple((0..n).map(|_| random_point(&mut rng, 0.95)));
            let z = random_point(&mut rng, 0.8);
            let radius = rng.gen_range(0.1..0.9);
            let (lhs, rhs) = jensen_mean(&zs, &z, radius, 8192).unwrap();
            worst = worst.max((lhs - rhs).abs());
        }
        (
            worst < 1e-6,
            format!("max |lhs - rhs| = {worst:.2e} over 100 products"),
        )
    });
}

#[test]
fn criterion_4_invariance() {
    criterion(4, Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (mut inv, mut invol, mut half): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..10_000 {
            let (a, z, w) = (
                random_point(&mut rng, 0.999),
                random_point(&mut rng, 0.999),
                random_point(&mut rng, 0.999),
            );
            let d = pseudo_dist(&z, &w);
            inv = inv.max((pseudo_dist(&mobius(&a, &z), &mobius(&a, &w)) - d).abs());
            invol = invol.max((mobius(&a, &mobius(&a, &z)).to_complex() - z.to_complex()).norm());
            half = half
                .max((pseudo_dist_half_plane(&cayley_inverse(&z), &cayley_inverse(&w)) - d).abs());
        }
        (
            inv < 1e-12 && invol < 1e-12 && half < 1e-12,
            format!(
                "rho invariance {inv:.1e}, involution {invol:.1e}, half-plane formula {half:.1e}"
            ),
        )
    });
}

fn criterion_inputs() -> Vec<(&'static str, ZeroSet)> {
    vec![
        ("exponential", gen_exponential(0.5, 30, 0.0).unwrap()),
        (
            "thin",
            gen_thin(12, RadiusRule::DoubleExp, AngleRule::Fixed, 0).unwrap(),
        ),
        ("stolz", gen_stolz_mult(8).unwrap()),
        ("treil", gen_treil_grid(3, 4).unwrap()),
    ]
}

#[test]
fn criterion_5_monotonicity() {
    criterion(5, Duration::from_secs(60), || {
        let mut bad = Vec::new();
        let ts = uniform_t_grid(0.05, &[0.99, 0.999]);
        for (name, zs) in criterion_inputs() {
            let curve = eta_curve(
                &InnerFunction::blaschke(zs.clone()),
                &ts,
                DEFAULT_R_MAX,
                0.1,
            )
            .unwrap();
            let est: Vec<f64> = curve.samples.iter().filter_map(|s| s.estimate).collect();
            if est.len() != ts.len() || est.windows(2).any(|w| w[1] < w[0]) {
                bad.push(format!("{name} eta {est:?}"));
            }
            let boxes: Vec<f64> = [1.0, 0.25, 0.0625]
                .iter()
                .map(|&d| box_sup(&zs, d))
                .collect();
            if boxes.windows(2).any(|w| w[1] > w[0]) {
                bad.push(format!("{name} box_sup {boxes:?}"));
            }
        }
        let detail = if bad.is_empty() {
            "eta nondecreasing and box_sup nonincreasing on 4 inputs".to_string()
        } else {
            bad.join("; ")
        };
        (bad.is_empty(), detail)
    });
}

/// `sup_k sum_j (1 - rho^2)` from the half-plane formula, zeros repeated by multiplicity.
fn brute_cn(zs: &ZeroSet) -> f64 {
    let pts: Vec<(f64, f64)> = zs
        .zeros()
        .iter()
        .flat_map(|z| {
            let h = cayley_inverse(&z.point);
            std::iter::repeat((h.re(), h.im())).take(z.mult as usize)
        })
        .collect();
    pts.iter()
        .map(|&(xa, ya)| {
            pts.iter()
                .map(|&(xb, yb)| 4.0 * ya * yb / ((xa - xb).powi(2) + (ya + yb).powi(2)))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_6_cn_dichotomy() {
    criterion(6, Duration::from_secs(30), || {
        let thin = |n| gen_thin(n, RadiusRule::DoubleExp, AngleRule::Fixed, 0).unwrap();
        let pairs: Vec<(&str, ZeroSet, ZeroSet, bool)> = vec![
            (
                "exponential",
                gen_exponential(0.5, 20, 0.0).unwrap(),
                gen_exponential(0.5, 40, 0.0).unwrap(),
                true,
            ),
            ("thin", thin(6), thin(12), true),
            (
                "stolz",
                gen_stolz_mult(8).unwrap(),
                gen_stolz_mult(16).unwrap(),
                false,
            ),
            (
                "treil",
                gen_treil_grid(3, 4).unwrap(),
                gen_treil_grid(6, 4).unwrap(),
                false,
            ),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, small, big, stable) in pairs {
            let (a, b) = (cn_constant(&small), cn_constant(&big));
            let (oa, ob) = (brute_cn(&small), brute_cn(&big));
            let agree = (a - oa).abs() <= 1e-9 * oa && (b - ob).abs() <= 1e-9 * ob;
            let growth = b / a - 1.0;
            ok &= agree && if stable { growth < 0.05 } else { growth > 0.2 };
            parts.push(format!("{name} {a:.4} -> {b:.4} ({:+.1}%)", 100.0 * growth));
        }
        (ok, parts.join(", "))
    });
}

/// Fourth-order central difference of `prod (|a|/a)(a - z)/(1 - conj(a) z)` along the ray
/// through `a`.
fn fd_derivative(raw: &[Complex64], a: Complex64, h: f64) -> Complex64 {
    let product = |z: Complex64| {
        raw.iter().fold(one(), |acc, &b| {
            acc * (b.conj() / b.norm()) * (b - z) / (one() - b.conj() * z)
        })
    };
    let dir = a / a.norm();
    let f = |s: f64| product(a + dir * s);
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h) / dir
}

#[test]
fn criterion_7_thinness() {
    criterion(7, Duration::from_secs(5), || {
        let thin = gen_thin(12, RadiusRule::DoubleExp, AngleRule::Fixed, 0).unwrap();
        let last = thin_profile(&thin).last().unwrap().derivative_product;
        let exp = gen_exponential(0.5, 20, 0.0).unwrap();
        let products: Vec<f64> = thin_profile(&exp)
            .iter()
            .map(|e| e.derivative_product)
            .collect();
        let max_exp = products.iter().copied().fold(0.0, f64::max);
        let raw: Vec<Complex64> = exp.points().map(|p| p.to_complex()).collect();
        let mut fd_err: f64 = 0.0;
        for (zero, product) in exp.zeros().iter().zip(&products).take(19).skip(1) {
            let a = zero.point;
            let fd = (1.0 - a.modulus() * a.modulus())
                * fd_derivative(&raw, a.to_complex(), 1e-2 * a.depth()).norm();
            fd_err = fd_err.max((fd - product).abs());
        }
        (
            last > 0.99 && max_exp < 0.9 && fd_err < 1e-6,
            format!("thin(12) last = {last:.6}, exponential max = {max_exp:.4}, finite-difference error {fd_err:.1e}"),
        )
    });
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn arc_dist(arcs: &[(f64, f64)], x: f64) -> f64 {
    arcs.iter()
        .map(|&(a, b)| {
            if (x - a).rem_euclid(1.0) <= b - a {
                0.0
            } else {
                let da = (a - x).rem_euclid(1.0).min((x - a).rem_euclid(1.0));
                let db = (b - x).rem_euclid(1.0).min((x - b).rem_euclid(1.0));
                da.min(db)
            }
        })
        .fold(f64::INFINITY, f64::min)
        * TAU
}

/// `\int log(1/dist)` over the gaps, Gauss-Legendre panels graded toward both ends.
fn entropy_quadrature(arcs: &[(f64, f64)]) -> f64 {
    let gl = gauss_legendre(20);
    let mut sorted = arcs.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0.0;
    for i in 0..sorted.len() {
        let lo = sorted[i].1;
        let hi = if i + 1 < sorted.len() {
            sorted[i + 1].0
        } else {
            sorted[0].0 + 1.0
        };
        let half = 0.5 * (hi - lo);
        for k in 0..40 {
            let (p, q) = (
                half * (-(k as f64) - 1.0).exp2(),
                half * (-(k as f64)).exp2(),
            );
            for &(side, sign) in &[(lo, 1.0), (hi, -1.0)] {
                for &(x, w) in &gl {
                    let t = side + sign * (0.5 * (p + q) + 0.5 * (q - p) * x);
                    total += -arc_dist(arcs, t).ln() * w * 0.5 * (q - p) * TAU;
                }
            }
        }
    }
    total
}

#[test]
fn criterion_8_entropy_machinery() {
    criterion(8, Duration::from_secs(60), || {
        let mut parts = Vec::new();
        let mut ok = true;

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut quad_err: f64 = 0.0;
        for _ in 0..20 {
            let mut starts: Vec<f64> = (0..5).map(|_| rng.gen::<f64>()).collect();
            starts.sort_by(f64::total_cmp);
            let arcs: Vec<(f64, f64)> = (0..5)
                .map(|i| {
                    let next = if i + 1 < 5 {
                        starts[i + 1]
                    } else {
                        starts[0] + 1.0
                    };
                    (
                        starts[i],
                        starts[i] + 0.3 * rng.gen::<f64>() * (next - starts[i]),
                    )
                })
                .collect();
            let e = BoundarySet::new(
                arcs.iter()
                    .map(|&(a, b)| {
                        BoundaryArc::new(Turns::approx(a).unwrap(), Turns::approx(b).unwrap())
                            .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            quad_err = quad_err.max((entropy_integral(&e) - entropy_quadrature(&arcs)).abs());
        }
        ok &= quad_err < 1e-6;
        parts.push(format!("closed form vs quadrature {quad_err:.1e}"));

        // depth 12 resolves the set below the finest level scanned here
        let cantor = gen_cantor_like(12, 1.0 / 3.0).unwrap();
        let levels = [8u32, 10, 12, 14];
        let scans: Vec<_> = levels
            .iter()
            .map(|&m| whitney_scan(&cantor, m).unwrap())
            .collect();
        let g_ent: Vec<f64> = scans.iter().map(|s| g_entropy_sum(&s.g)).collect();
        let f_sum: Vec<f64> = scans.iter().map(|s| length_sum(&s.f)).collect();
        let (dg, df) = (g_ent[3] - g_ent[2], f_sum[3] - f_sum[2]);
        let stable = dg.abs() < 1e-2 && df.abs() < 1e-2;
        ok &= stable;
        parts.push(format!(
            "Whitney sums level 12 -> 14: G entropy {:.4} -> {:.4}, F {:.4} -> {:.4} ({})",
            g_ent[2],
            g_ent[3],
            f_sum[2],
            f_sum[3],
            if stable {
                "stable"
            } else {
                "NOT stable to 1e-2"
            }
        ));

        // bounded: increments over successive level pairs shrink geometrically
        let shrinking = |v: &[f64]| {
            let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            inc.iter().all(|d| *d >= 0.0) && inc.windows(2).all(|w| w[1] <= 0.9 * w[0])
        };
        let bounded = shrinking(&g_ent) && shrinking(&f_sum);
        ok &= bounded;
        let tail = |v: &[f64]| {
            let (a, b) = (v[2] - v[1], v[3] - v[2]);
            v[3] + b * (b / a) / (1.0 - b / a)
        };
        parts.push(format!(
            "geometric tails {} (extrapolated G {:.3}, F {:.3})",
            if bounded { "hold" } else { "fail" },
            tail(&g_ent),
            tail(&f_sum)
        ));

        let mut l_ok = true;
        for s in &scans[..2] {
            let l = family_L(&s.g).unwrap();
            for j in &s.g {
                let count = l.iter().filter(|a| j.contains(a)).count() as u64;
                l_ok &= count == l_count_for(j) && count == (1u64 << (j.level + 1)) - 1;
            }
        }
        ok &= l_ok;
        parts.push(format!("L counts {}", if l_ok { "exact" } else { "wrong" }));

        // the two claim checks, on an atom at an endpoint of the set
        let mu = SingularMeasure::new(vec![Atom::new(Turns::exact(0, 1).unwrap(), 1.0).unwrap()])
            .unwrap();
        let e = gen_cantor_like(4, 1.0 / 3.0).unwrap();
        let mut fitted = Vec::new();
        let mut tails_ok = true;
        for m in [6u32, 8, 10] {
            let s = build_sipification(&mu, &e, m).unwrap();
            let (samples, c) = claim_ratios(&s.composite(&mu), &s.g);
            // a level-2 arc has |J| = pi/2, so the probe height |J|^2/2 leaves the disc
            let probed = s.g.iter().filter(|j| j.level >= 3).count();
            tails_ok &= samples.len() == probed;
            fitted.push(c);
            let tail = b2_tail_profile(&s.b2, &s.g, &[0.1, 0.01, 0.001]);
            tails_ok &= tail.windows(2).all(|w| w[1].max_log_inv < w[0].max_log_inv);
        }
        let claim_ok =
            fitted.iter().all(|c| c.is_finite()) && fitted[2] <= 2.0 * fitted[0] && tails_ok;
        ok &= claim_ok;
        parts.push(format!("claim constants {fitted:.3?}, every J past level 2 probed and B2 tails decreasing: {tails_ok}"));

        (ok, parts.join("; "))
    });
}

fn innerfn(workers: usize, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_innerfn"))
        .arg("--workers")
        .arg(workers.to_string())
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn suite(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../suite")
        .join(name)
}

/// generate -> diagnose (with eta CSV) for every zero-set spec, sublevel data for the
/// cross, and cantor -> entropy -> sipify.
fn pipeline(dir: &Path, workers: usize) {
    let s = |p: &Path| p.to_str().unwrap().to_string();
    for name in [
        "finite_cross",
        "thin",
        "thin_spread",
        "exponential",
        "stolz",
        "treil",
    ] {
        let zeros = dir.join(format!("{name}.json"));
        innerfn(
            workers,
            &[
                "generate",
                "--spec",
                &s(&suite(&format!("{name}.json"))),
                "-o",
                &s(&zeros),
            ],
        );
        innerfn(
            workers,
            &[
                "diagnose",
                "--zeros",
                &s(&zeros),
                "-o",
                &s(&dir.join(format!("{name}.report.json"))),
                "--eta-csv",
                &s(&dir.join(format!("{name}.eta.csv"))),
            ],
        );
    }
    let perturbed = dir.join("exponential_perturbed.json");
    innerfn(
        workers,
        &[
            "generate",
            "--spec",
            &s(&suite("exponential.json")),
            "--transforms",
            &s(&suite("perturb.json")),
            "-o",
            &s(&perturbed),
        ],
    );
    innerfn(
        workers,
        &[
            "eta",
            "--zeros",
            &s(&perturbed),
            "--t-values",
            "0.5,0.9",
            "-o",
            &s(&dir.join("perturbed.eta.csv")),
        ],
    );
    innerfn(
        workers,
        &[
            "sublevel",
            "--zeros",
            &s(&dir.join("finite_cross.json")),
            "--eps",
            "0.5",
            "-o",
            &s(&dir.join("cross.csv")),
        ],
    );
    let set = dir.join("cantor.json");
    innerfn(
        workers,
        &[
            "generate",
            "--spec",
            &s(&suite("cantor.json")),
            "-o",
            &s(&set),
        ],
    );
    innerfn(
        workers,
        &[
            "entropy",
            "--set",
            &s(&set),
            "--with-l",
            "-o",
            &s(&dir.join("entropy.json")),
        ],
    );
    innerfn(
        workers,
        &[
            "sipify",
            "--measure",
            &s(&suite("atom.json")),
            "--set",
            &s(&set),
            "--out-dir",
            &s(&dir.join("sipify")),
        ],
    );
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_9_determinism() {
    criterion(9, Duration::from_secs(120), || {
        let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
        for (d, workers) in dirs.iter().zip([1, 1, 8]) {
            pipeline(d.path(), workers);
        }
        let trees: Vec<_> = dirs.iter().map(|d| tree(d.path())).collect();
        let files = trees[0].len();
        let bytes: usize = trees[0].iter().map(|(_, b)| b.len()).sum();
        let same_runs = trees[0] == trees[1];
        let same_workers = trees[0] == trees[2];
        (
            same_runs && same_workers && files > 0,
            format!(
                "{files} files, {bytes} bytes; two runs identical: {same_runs}; 1 vs 8 workers identical: {same_workers}"
            ),
        )
    });
}
