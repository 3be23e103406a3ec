use innerfn::diagnostics::cn_constant;
use innerfn::eval::eval_blaschke;
use innerfn::geometry::{cayley, cayley_inverse, pseudo_dist, HalfPlanePoint};
use innerfn::zoo::{
    gen_exponential, gen_rect_grid, gen_treil_grid, rect_grid_offsets, transform_zeros, GapRule,
    Transform,
};
use num_complex::Complex64;

/// `prod |(w - z)/(w - conj z)|` over the half-plane zeros.
fn half_plane_modulus(zeros: &[Complex64], w: Complex64) -> f64 {
    zeros
        .iter()
        .map(|z| ((w - z) / (w - z.conj())).norm())
        .product()
}

#[test]
fn rect_grid_probes_stay_below_c0() {
    let lengths: Vec<f64> = (1..=6).map(|n| 4f64.powi(-n)).collect();
    let counts: Vec<u64> = (1..=6).map(|n| 1u64 << n).collect();
    let zs = gen_rect_grid(&lengths, &counts, GapRule::Tight).unwrap();
    let raw: Vec<Complex64> = zs
        .points()
        .map(|p| cayley_inverse(p).to_complex())
        .collect();
    let xs = rect_grid_offsets(&lengths, GapRule::Tight);
    let mut worst: f64 = 0.0;
    for (x, l) in xs.iter().zip(&lengths) {
        let w = HalfPlanePoint::new(*x, *l).unwrap();
        let lib = eval_blaschke(&zs, &cayley(&w)).value.norm();
        let oracle = half_plane_modulus(&raw, w.to_complex());
        assert!((lib - oracle).abs() < 1e-9, "{lib} {oracle}");
        worst = worst.max(lib);
    }
    assert!(worst < 0.9, "{worst}");
    for w in xs.windows(2).zip(&lengths) {
        assert!(w.0[1] - w.0[0] >= 2.0 * w.1);
    }
}

#[test]
fn exponential_cn_under_geometric_bound() {
    for q in [0.3, 0.5, 0.7] {
        let zs = gen_exponential(q, 60, 0.0).unwrap();
        let bound = 1.0 + 2.0 * (1..200).map(|m| 4.0 * q.powi(m) / (1.0 - q)).sum::<f64>();
        assert!(cn_constant(&zs) <= bound);
        for w in zs.points().collect::<Vec<_>>().windows(2) {
            assert!((w[1].depth() / w[0].depth() - q).abs() < 1e-12);
        }
    }
}

#[test]
fn treil_rows_follow_spacing() {
    let zs = gen_treil_grid(4, 2).unwrap();
    let pts: Vec<HalfPlanePoint> = zs.points().map(cayley_inverse).collect();
    for n in 1..=4usize {
        let y = (n * n * n) as f64;
        let row: Vec<f64> = pts
            .iter()
            .filter(|p| (p.im() / y - 1.0).abs() < 1e-9)
            .map(|p| p.re())
            .collect();
        assert_eq!(row.len(), 5);
        for w in row.windows(2) {
            assert!((w[1] - w[0] - y / n as f64).abs() < 1e-9 * y);
        }
    }
}

#[test]
fn perturbation_respects_radius() {
    let zs = gen_exponential(0.5, 25, 0.0).unwrap();
    let moved = transform_zeros(
        &zs,
        &Transform::Perturb {
            max_rho: 0.3,
            seed: 9,
        },
    )
    .unwrap();
    let worst = zs
        .points()
        .zip(moved.points())
        .map(|(a, b)| pseudo_dist(a, b))
        .fold(0.0, f64::max);
    assert!(worst <= 0.3 + 1e-12 && worst > 0.0);
    let again = transform_zeros(
        &zs,
        &Transform::Perturb {
            max_rho: 0.3,
            seed: 9,
        },
    )
    .unwrap();
    assert_eq!(moved.zeros(), again.zeros());
}

#[test]
fn cantor_entropy_converges_geometrically() {
    let h: Vec<f64> = [6, 8, 10, 12]
        .iter()
        .map(|&d| {
            innerfn::entropy::entropy_integral(
                &innerfn::zoo::gen_cantor_like(d, 1.0 / 3.0).unwrap(),
            )
        })
        .collect();
    let steps: Vec<f64> = h.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.iter().all(|d| *d > 0.0), "{h:?}");
    for w in steps.windows(2) {
        assert!(w[1] < 0.8 * w[0], "{steps:?}");
    }
}
