//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and
//! asserts the criterion at its pinned tolerance.
//!
//! Run with `cargo test -p steklov-core --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steklov_core::bounds::{check_decay, check_han_hua, run_sweep, ExperimentRecord};
use steklov_core::cayley::{estimate_growth_order, growth_table, DEFAULT_BALL_CAP};
use steklov_core::steklov::{oracle_full_eigen, solve, steklov_residuals, ZERO_TOL};
use steklov_core::subgraph::{induce, instantiate_family, isoperimetric_ratio, ShapeFamily, SubgraphWithBoundary};
use steklov_core::{GroupElement, GroupSpec, GrowthOrder};

const SEED: u64 = 0x5EC1_0F00;

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "[{}] criterion {id}: {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

/// Random connected polyomino of the given size grown from the origin.
fn random_polyomino(rng: &mut ChaCha8Rng, size: usize) -> Vec<GroupElement> {
    let z2 = GroupSpec::lattice(2);
    let mut cells: BTreeSet<GroupElement> = BTreeSet::from([z2.identity()]);
    while cells.len() < size {
        let frontier: Vec<GroupElement> = cells
            .iter()
            .flat_map(|c| z2.neighbors(c).unwrap())
            .filter(|n| !cells.contains(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pick = frontier[rng.random_range(0..frontier.len())].clone();
        cells.insert(pick);
    }
    cells.into_iter().collect()
}

fn random_subgraphs() -> Vec<SubgraphWithBoundary> {
    let z2 = GroupSpec::lattice(2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..20)
        .map(|_| {
            let size = rng.random_range(3..=30);
            induce(&z2, random_polyomino(&mut rng, size)).unwrap()
        })
        .collect()
}

fn named_fixtures() -> Vec<SubgraphWithBoundary> {
    let z2 = GroupSpec::lattice(2);
    [(ShapeFamily::Ball, 1), (ShapeFamily::Ball, 2), (ShapeFamily::PuncturedBall, 2)]
        .into_iter()
        .map(|(f, n)| induce(&z2, instantiate_family(&z2, &f, n, DEFAULT_BALL_CAP).unwrap()).unwrap())
        .collect()
}

fn ball_sweep(spec: &GroupSpec, lo: u32, hi: u32, k: usize) -> Vec<ExperimentRecord> {
    run_sweep(spec, &ShapeFamily::Ball, lo..=hi, k, DEFAULT_BALL_CAP).unwrap()
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2}s < {:.0}s", e.as_secs_f64(), limit.as_secs_f64()))
}

#[test]
fn c01_spectrum_structure() {
    let t = Instant::now();
    let mut bad = Vec::new();
    for (i, sub) in random_subgraphs().iter().enumerate() {
        assert!((3..=30).contains(&sub.n_interior()));
        let s = solve(sub, None).unwrap();
        let ev = &s.eigenvalues;
        let ok = ev.len() == sub.n_boundary()
            && ev[0] <= 1e-9
            && ev[1] >= 1e-9
            && ev.windows(2).all(|w| w[0] <= w[1]);
        if !ok {
            bad.push(i);
        }
    }
    let (fast, time) = within(t, Duration::from_secs(5));
    verdict(
        1,
        "spectrum structure",
        bad.is_empty() && fast,
        format!("20 random subgraphs, violations {bad:?}, {time}"),
    );
}

#[test]
fn c02_star_fixture() {
    let z2 = GroupSpec::lattice(2);
    let s = solve(&induce(&z2, [z2.identity()]).unwrap(), None).unwrap();
    let err = s
        .eigenvalues
        .iter()
        .zip([0.0, 1.0, 1.0, 1.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    verdict(
        2,
        "star fixture",
        s.len() == 4 && err <= 1e-10,
        format!("spectrum {:?}, max error {err:.2e} <= 1e-10", s.eigenvalues),
    );
}

/// `|a - b| <= 1e-8 max(|a|, |b|)`, floored at the zero tolerance for `σ_0`.
fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= (1e-8 * a.abs().max(b.abs())).max(ZERO_TOL * scale.max(1.0))
}

#[test]
fn c03_oracle_equivalence() {
    let t = Instant::now();
    let mut fixtures = random_subgraphs();
    fixtures.extend(named_fixtures());
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (i, sub) in fixtures.iter().enumerate() {
        let schur = solve(sub, None).unwrap();
        let oracle = oracle_full_eigen(sub).unwrap();
        assert_eq!(schur.len(), oracle.len());
        let scale = schur.max();
        for (a, b) in schur.eigenvalues.iter().zip(&oracle.eigenvalues) {
            if *a > ZERO_TOL * scale.max(1.0) {
                worst = worst.max((a - b).abs() / a.abs());
            }
            if !close(*a, *b, scale) {
                bad.push(i);
            }
        }
    }
    let (fast, time) = within(t, Duration::from_secs(30));
    verdict(
        3,
        "oracle equivalence",
        bad.is_empty() && fast,
        format!("{} subgraphs, worst relative gap {worst:.2e} <= 1e-8, {time}", fixtures.len()),
    );
}

#[test]
fn c04_harmonicity() {
    let mut fixtures = random_subgraphs();
    fixtures.extend(named_fixtures());
    let (mut lap_max, mut normal_max) = (0.0f64, 0.0f64);
    let mut pairs = 0;
    for sub in &fixtures {
        let s = solve(sub, None).unwrap();
        let q = s.eigenvectors.as_ref().unwrap();
        for (k, &sigma) in s.eigenvalues.iter().enumerate() {
            let ub: Vec<f64> = q.column(k).iter().copied().collect();
            let (lap, normal) = steklov_residuals(sub, sigma, &ub).unwrap();
            lap_max = lap_max.max(lap);
            normal_max = normal_max.max(normal);
            pairs += 1;
        }
    }
    verdict(
        4,
        "harmonicity",
        lap_max <= 1e-8 && normal_max <= 1e-8,
        format!("{pairs} eigenpairs, max |Δu| {lap_max:.2e}, max |∂u/∂ν - σu| {normal_max:.2e} <= 1e-8"),
    );
}

#[test]
fn c05_han_hua_inequality() {
    let t = Instant::now();
    let z2 = GroupSpec::lattice(2);
    let z3 = GroupSpec::lattice(3);
    let a = check_han_hua(&z2, &ball_sweep(&z2, 2, 12, 3)).unwrap();
    let b = check_han_hua(&z3, &ball_sweep(&z3, 2, 6, 3)).unwrap();
    let min_a = a.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min);
    let min_b = b.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min);
    let (fast, time) = within(t, Duration::from_secs(60));
    verdict(
        5,
        "lattice eigenvalue inequality",
        a.len() == 11 && b.len() == 5 && min_a >= 0.0 && min_b >= 0.0 && fast,
        format!("min margin Z^2 {min_a:.4}, Z^3 {min_b:.4} (>= 0), {time}"),
    );
}

#[test]
fn c06_decay_rate() {
    let t = Instant::now();
    let z2 = GroupSpec::lattice(2);
    let z3 = GroupSpec::lattice(3);
    let s2 = check_decay(&ball_sweep(&z2, 3, 20, 1), 1).unwrap()[0].slope;
    let s3 = check_decay(&ball_sweep(&z3, 3, 10, 1), 1).unwrap()[0].slope;
    let (fast, time) = within(t, Duration::from_secs(120));
    verdict(
        6,
        "first eigenvalue decay",
        s2 <= -0.85 && s3 <= -0.35 && fast,
        format!("slope Z^2 {s2:.4} <= -0.85, Z^3 {s3:.4} <= -0.35, {time}"),
    );
}

#[test]
fn c07_corollary_endpoints() {
    let z2 = GroupSpec::lattice(2);
    let h = GroupSpec::heisenberg();
    let z_small = &ball_sweep(&z2, 3, 3, 3)[0];
    let z_large = &ball_sweep(&z2, 20, 20, 3)[0];
    let h_small = &ball_sweep(&h, 2, 2, 3)[0];
    let h_large = &ball_sweep(&h, 6, 6, 3)[0];
    let mut lines = Vec::new();
    let mut pass = true;
    for k in 0..3 {
        pass &= z_large.sigma[k] < z_small.sigma[k] && h_large.sigma[k] < h_small.sigma[k];
        lines.push(format!(
            "k={}: Z^2 {:.4}->{:.4}, H3 {:.4}->{:.4}",
            k + 1,
            z_small.sigma[k],
            z_large.sigma[k],
            h_small.sigma[k],
            h_large.sigma[k]
        ));
    }
    verdict(7, "decay endpoints", pass, lines.join("; "));
}

#[test]
fn c08_main_bound_certificate() {
    let z2 = GroupSpec::lattice(2);
    let recs = ball_sweep(&z2, 3, 20, 5);
    let mut pass = true;
    let mut lines = Vec::new();
    for k in 0..5 {
        let (argmax, max) = recs
            .iter()
            .map(|r| (r.n, r.r_main[k]))
            .fold((0, f64::NEG_INFINITY), |a, x| if x.1 > a.1 { x } else { a });
        let tail: Vec<f64> = recs.iter().filter(|r| r.n >= 10).map(|r| r.r_main[k]).collect();
        let spread = tail.iter().cloned().fold(f64::MIN, f64::max) / tail.iter().cloned().fold(f64::MAX, f64::min);
        pass &= argmax <= 8 && spread <= 2.0;
        lines.push(format!("k={} argmax n={argmax} sup={max:.3} tail spread {spread:.3}", k + 1));
    }
    verdict(8, "main bound no-blow-up", pass, lines.join("; "));
}

#[test]
fn c09_growth_orders() {
    let t = Instant::now();
    let slope = |spec: GroupSpec, n_max: u32| {
        estimate_growth_order(&growth_table(&spec, n_max, DEFAULT_BALL_CAP).unwrap(), 4).unwrap()
    };
    let s2 = slope(GroupSpec::lattice(2), 20);
    let s3 = slope(GroupSpec::lattice(3), 14);
    let sh = slope(GroupSpec::heisenberg(), 12);
    let (fast, time) = within(t, Duration::from_secs(60));
    verdict(
        9,
        "growth orders",
        (s2 - 2.0).abs() <= 0.2 && (s3 - 3.0).abs() <= 0.2 && (sh - 4.0).abs() <= 0.5 && fast,
        format!("Z^2 {s2:.4} (2±0.2), Z^3 {s3:.4} (3±0.2), H3 {sh:.4} (4±0.5), {time}"),
    );
}

#[test]
fn c10_isoperimetric_boundedness() {
    let z2 = GroupSpec::lattice(2);
    let ratios: Vec<f64> = (2..=20)
        .map(|n| {
            let omega = instantiate_family(&z2, &ShapeFamily::Ball, n, DEFAULT_BALL_CAP).unwrap();
            isoperimetric_ratio(&induce(&z2, omega).unwrap(), GrowthOrder(2))
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    verdict(
        10,
        "isoperimetric boundedness",
        max / min <= 3.0,
        format!("max/min {:.4} <= 3 (max {max:.4}, min {min:.4})", max / min),
    );
}
