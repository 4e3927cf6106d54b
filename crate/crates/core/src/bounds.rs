//! Family sweeps and empirical checks of the Steklov eigenvalue bounds.
//!
//! For a record with growth order `d` and boundary size `|B|`:
//!
//! * main ratio `r_k = σ_k · |B|^{1/(d-1)} · k^{-(d+2)/d}`, `k ≥ 1`;
//! * first-eigenvalue ratio `σ_1 · |B|^{1/(d-1)}`;
//! * lattice inequality `Σ_{l=1}^{d} 1/σ_l ≥ C̄ |Ω|^{1/d} - C'/|Ω|` with
//!   `C̄ = (64 d³ ω_d^{1/d})⁻¹`, `C' = 1/(32 d)`.
//!
//! The constants in the first two bounds are existential, so those checks
//! are decay-rate and no-blow-up certificates rather than comparisons.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit;
use crate::group::{GroupSpec, GrowthOrder};
use crate::steklov;
use crate::subgraph::{induce, instantiate_family, isoperimetric_ratio, ShapeFamily};

/// Allowance on the fitted decay slope above the asymptotic rate.
pub const DECAY_SLOPE_TOLERANCE: f64 = 0.15;

/// One family member.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub family: String,
    pub n: u32,
    pub d: GrowthOrder,
    pub omega: usize,
    pub omega_bar: usize,
    pub b: usize,
    /// `σ_1..=σ_K`.
    pub sigma: Vec<f64>,
    /// `r_k` for `k = 1..=K`.
    pub r_main: Vec<f64>,
    pub perrin_ratio: f64,
    /// `Σ_{l=1}^{d} 1/σ_l`, when `|B| > d`.
    pub hh_lhs: Option<f64>,
    /// Right-hand side of the lattice inequality; lattices only.
    pub hh_rhs: Option<f64>,
    pub iso_ratio: f64,
    pub sigma0: f64,
    pub sigma_max: f64,
    pub n_eigenvalues: usize,
    /// False when only a prefix of the spectrum was computed.
    pub complete: bool,
    pub max_boundary_degree: usize,
}

/// `σ_k · |B|^{1/(d-1)} · k^{-(d+2)/d}`.
pub fn main_ratio(sigma_k: f64, b: usize, k: usize, d: GrowthOrder) -> f64 {
    let d = d.as_f64();
    sigma_k * (b as f64).powf(1.0 / (d - 1.0)) * (k as f64).powf(-(d + 2.0) / d)
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    let half = d as f64 / 2.0;
    PI.powf(half) / gamma_half_integer(d + 2)
}

/// `Γ(m/2)` for a positive integer `m`, from `Γ(1) = 1`, `Γ(1/2) = √π`
/// and `Γ(x+1) = x Γ(x)`.
pub fn gamma_half_integer(m: u32) -> f64 {
    assert!(m > 0, "Γ has a pole at 0");
    let (mut x, mut g) = if m % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while 2.0 * x < m as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Explicit constants of the lattice inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HanHuaConstants {
    pub d: u32,
    pub omega_d: f64,
    pub c_bar: f64,
    pub c_prime: f64,
}

impl HanHuaConstants {
    pub fn new(d: u32) -> Self {
        let omega_d = unit_ball_volume(d);
        let df = d as f64;
        HanHuaConstants {
            d,
            omega_d,
            c_bar: 1.0 / (64.0 * df.powi(3) * omega_d.powf(1.0 / df)),
            c_prime: 1.0 / (32.0 * df),
        }
    }

    /// `C̄ |Ω|^{1/d} - C'/|Ω|`.
    pub fn rhs(&self, omega: usize) -> f64 {
        let o = omega as f64;
        self.c_bar * o.powf(1.0 / self.d as f64) - self.c_prime / o
    }
}

/// Solves every member of `family` for `n` in `n_range` and records the
/// first `k` nontrivial eigenvalues (fewer when `|B| - 1 < k`). Members
/// are solved in parallel; the result is in ascending `n`.
pub fn run_sweep(
    spec: &GroupSpec,
    family: &ShapeFamily,
    n_range: RangeInclusive<u32>,
    k: usize,
    cap: usize,
) -> Result<Vec<ExperimentRecord>> {
    if k == 0 {
        return Err(Error::Config("K must be at least 1".into()));
    }
    let d = spec.growth_order();
    if d.get() < 2 {
        return Err(Error::Scope(format!(
            "normalized bounds need growth order >= 2, {spec} has {}",
            d.get()
        )));
    }
    let name = family.to_string();
    let ns: Vec<u32> = n_range.collect();
    ns.par_iter()
        .map(|&n| {
            record(spec, family, n, k, cap).map_err(|e| Error::Sweep {
                family: name.clone(),
                n,
                source: Box::new(e),
            })
        })
        .collect()
}

fn record(spec: &GroupSpec, family: &ShapeFamily, n: u32, k: usize, cap: usize) -> Result<ExperimentRecord> {
    let d = spec.growth_order();
    let omega = instantiate_family(spec, family, n, cap)?;
    let sub = induce(spec, omega)?;
    let b = sub.n_boundary();
    let want = k.max(d.get() as usize);
    let spectrum = steklov::solve(&sub, Some(want))?;
    let ev = &spectrum.eigenvalues;
    let kk = k.min(b - 1);
    let sigma: Vec<f64> = ev[1..=kk].to_vec();
    let r_main = sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| main_ratio(s, b, i + 1, d))
        .collect();
    let dd = d.get() as usize;
    let hh_lhs = (ev.len() > dd).then(|| ev[1..=dd].iter().map(|s| 1.0 / s).sum());
    let hh_rhs = spec
        .kind()
        .as_lattice()
        .map(|dim| HanHuaConstants::new(dim).rhs(sub.n_interior()));
    Ok(ExperimentRecord {
        family: family.to_string(),
        n,
        d,
        omega: sub.n_interior(),
        omega_bar: sub.n_total(),
        b,
        perrin_ratio: ev.get(1).copied().unwrap_or(f64::NAN) * (b as f64).powf(1.0 / (d.as_f64() - 1.0)),
        sigma,
        r_main,
        hh_lhs,
        hh_rhs,
        iso_ratio: isoperimetric_ratio(&sub, d),
        sigma0: ev[0],
        sigma_max: spectrum.max(),
        n_eigenvalues: spectrum.len(),
        complete: spectrum.len() == b,
        max_boundary_degree: sub.boundary_degrees.iter().copied().max().unwrap_or(0),
    })
}

/// One row of `checks.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub family: String,
    pub k: Option<usize>,
    pub value: f64,
    pub threshold: Option<f64>,
    pub pass: bool,
}

impl CheckRow {
    /// Failures of these checks indicate a bug rather than a desk-scale effect.
    pub fn is_unconditional(&self) -> bool {
        matches!(self.check, "han-hua" | "spectrum")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HanHuaOutcome {
    pub n: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Evaluates the lattice inequality on every record. Only defined on `Z^d`.
pub fn check_han_hua(spec: &GroupSpec, records: &[ExperimentRecord]) -> Result<Vec<HanHuaOutcome>> {
    let d = spec.kind().as_lattice().ok_or_else(|| {
        Error::Scope(format!(
            "the lattice eigenvalue inequality applies to Z^d only, not {spec}"
        ))
    })?;
    let consts = HanHuaConstants::new(d);
    records
        .iter()
        .map(|r| {
            let lhs = r.hh_lhs.ok_or_else(|| {
                Error::InsufficientData(format!("n={}: fewer than {d} nontrivial eigenvalues", r.n))
            })?;
            let rhs = consts.rhs(r.omega);
            Ok(HanHuaOutcome {
                n: r.n,
                lhs,
                rhs,
                margin: lhs - rhs,
                holds: lhs >= rhs,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayOutcome {
    pub k: usize,
    pub slope: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Fits `ln σ_k` against `ln |B|` for each `k ≤ k_max` and compares with
/// the rate `-1/(d-1)` plus [`DECAY_SLOPE_TOLERANCE`].
pub fn check_decay(records: &[ExperimentRecord], k_max: usize) -> Result<Vec<DecayOutcome>> {
    if records.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs at least 5 records, have {}",
            records.len()
        )));
    }
    if !records.windows(2).all(|w| w[0].b < w[1].b) {
        return Err(Error::InsufficientData(
            "decay fit needs strictly increasing boundary sizes".into(),
        ));
    }
    let d = records[0].d.as_f64();
    let threshold = -1.0 / (d - 1.0) + DECAY_SLOPE_TOLERANCE;
    let available = records.iter().map(|r| r.sigma.len()).min().unwrap_or(0);
    (1..=k_max.min(available))
        .map(|k| {
            let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.b as f64, r.sigma[k - 1])).collect();
            let slope = fit::log_log_slope(&pts)
                .ok_or_else(|| Error::InsufficientData("degenerate decay fit".into()))?;
            Ok(DecayOutcome {
                k,
                slope,
                threshold,
                pass: slope <= threshold,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainBoundOutcome {
    pub k: usize,
    pub sup: f64,
    pub argmax_n: u32,
    pub pass: bool,
}

/// Supremum of `r_k` over the family per `k`. Passes when the supremum is
/// attained in the first third of the `n` range, or when `r_k` is
/// nonincreasing over the last half.
pub fn check_main_bound(records: &[ExperimentRecord]) -> Vec<MainBoundOutcome> {
    if records.is_empty() {
        return Vec::new();
    }
    let n_lo = records.first().map(|r| r.n).unwrap_or(0) as f64;
    let n_hi = records.last().map(|r| r.n).unwrap_or(0) as f64;
    let early = n_lo + (n_hi - n_lo) / 3.0;
    let late = n_lo + (n_hi - n_lo) / 2.0;
    let available = records.iter().map(|r| r.r_main.len()).min().unwrap_or(0);
    (1..=available)
        .map(|k| {
            let (argmax_n, sup) = records
                .iter()
                .map(|r| (r.n, r.r_main[k - 1]))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            let tail: Vec<f64> = records
                .iter()
                .filter(|r| r.n as f64 >= late)
                .map(|r| r.r_main[k - 1])
                .collect();
            let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0]);
            MainBoundOutcome {
                k,
                sup,
                argmax_n,
                pass: sup.is_finite() && (argmax_n as f64 <= early || nonincreasing),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOutcome {
    pub violations: usize,
}

/// Structural spectrum invariants: `|B|` eigenvalues, trivial `σ_0`,
/// positive `σ_1`, and `σ_max ≤` max boundary degree.
pub fn check_spectrum(records: &[ExperimentRecord]) -> SpectrumOutcome {
    let violations = records
        .iter()
        .filter(|r| {
            let zero = steklov::ZERO_TOL * r.sigma_max.max(1.0);
            let ascending = r.sigma.windows(2).all(|w| w[0] <= w[1]);
            let sized = if r.complete {
                r.n_eigenvalues == r.b && r.sigma_max <= r.max_boundary_degree as f64 + 1e-9
            } else {
                r.n_eigenvalues < r.b
            };
            !(sized && r.sigma0.abs() <= zero && r.sigma.first().is_some_and(|s| *s > zero) && ascending)
        })
        .count();
    SpectrumOutcome { violations }
}

/// Names accepted in a check list.
pub const CHECK_NAMES: [&str; 4] = ["spectrum", "han-hua", "decay", "main-bound"];

/// Runs the named checks and flattens them into report rows.
pub fn run_checks(
    spec: &GroupSpec,
    records: &[ExperimentRecord],
    checks: &[String],
    k_max: usize,
) -> Result<Vec<CheckRow>> {
    let family = records.first().map(|r| r.family.clone()).unwrap_or_default();
    let mut rows = Vec::new();
    for name in checks {
        match name.as_str() {
            "spectrum" => {
                let o = check_spectrum(records);
                rows.push(CheckRow {
                    check: "spectrum",
                    family: family.clone(),
                    k: None,
                    value: o.violations as f64,
                    threshold: Some(0.0),
                    pass: o.violations == 0,
                });
            }
            "han-hua" => {
                let out = check_han_hua(spec, records)?;
                let min_margin = out.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min);
                rows.push(CheckRow {
                    check: "han-hua",
                    family: family.clone(),
                    k: Some(spec.growth_order().get() as usize),
                    value: min_margin,
                    threshold: Some(0.0),
                    pass: out.iter().all(|o| o.holds),
                });
            }
            "decay" => {
                for o in check_decay(records, k_max)? {
                    rows.push(CheckRow {
                        check: "decay",
                        family: family.clone(),
                        k: Some(o.k),
                        value: o.slope,
                        threshold: Some(o.threshold),
                        pass: o.pass,
                    });
                }
            }
            "main-bound" => {
                for o in check_main_bound(records) {
                    rows.push(CheckRow {
                        check: "main-bound",
                        family: family.clone(),
                        k: Some(o.k),
                        value: o.sup,
                        threshold: None,
                        pass: o.pass,
                    });
                }
            }
            other => return Err(Error::Config(format!("unknown check `{other}`"))),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::DEFAULT_BALL_CAP;

    #[test]
    fn gamma_and_ball_volumes() {
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(2), 1.0);
        assert_eq!(gamma_half_integer(8), 6.0);
        assert!((gamma_half_integer(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn han_hua_constants_for_the_plane() {
        let c = HanHuaConstants::new(2);
        assert!((c.c_bar - 1.0 / (512.0 * PI.sqrt())).abs() < 1e-18);
        assert_eq!(c.c_prime, 1.0 / 64.0);
        assert!((c.rhs(1) - (1.0 / (512.0 * PI.sqrt()) - 1.0 / 64.0)).abs() < 1e-15);
        assert!((c.rhs(1) + 0.0145).abs() < 1e-3);
    }

    #[test]
    fn star_han_hua() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 0..=0, 3, DEFAULT_BALL_CAP).unwrap();
        assert!(recs[0].sigma.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert!((recs[0].hh_lhs.unwrap() - 2.0).abs() < 1e-12);
        let out = check_han_hua(&z2, &recs).unwrap();
        assert!(out[0].holds);
        assert!((out[0].margin - (2.0 - HanHuaConstants::new(2).rhs(1))).abs() < 1e-12);
    }

    #[test]
    fn ball_sweep_records() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 2..=12, 5, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(recs.len(), 11);
        assert!(recs.windows(2).all(|w| w[0].b < w[1].b && w[0].n < w[1].n));
        for r in &recs {
            assert_eq!(r.b, 4 * (r.n as usize + 1));
            assert_eq!(r.sigma.len(), 5);
            assert!(r.sigma.iter().all(|s| *s > 0.0));
            assert_eq!(r.omega_bar, r.omega + r.b);
        }
        assert_eq!(check_spectrum(&recs).violations, 0);
        assert!(check_han_hua(&z2, &recs).unwrap().iter().all(|o| o.holds && o.margin > 0.0));
    }

    #[test]
    fn punctured_ball_sweep_has_origin_on_boundary() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::PuncturedBall, 2..=8, 3, DEFAULT_BALL_CAP).unwrap();
        for r in &recs {
            // boundary is the outer sphere plus the origin
            assert_eq!(r.b, 4 * (r.n as usize + 1) + 1);
            assert_eq!(r.omega, 2 * (r.n * r.n + r.n) as usize);
        }
    }

    #[test]
    fn heisenberg_sweep_uses_order_four() {
        let h = GroupSpec::heisenberg();
        let recs = run_sweep(&h, &ShapeFamily::Ball, 2..=4, 3, DEFAULT_BALL_CAP).unwrap();
        for r in &recs {
            assert_eq!(r.d, GrowthOrder(4));
            assert!(r.hh_rhs.is_none());
            let want = r.sigma[2] * (r.b as f64).powf(1.0 / 3.0) * 3f64.powf(-1.5);
            assert!((r.r_main[2] - want).abs() < 1e-12);
        }
        assert!(matches!(check_han_hua(&h, &recs), Err(Error::Scope(_))));
    }

    #[test]
    fn k_is_clipped_to_boundary() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 0..=1, 50, DEFAULT_BALL_CAP).unwrap();
        assert_eq!(recs[0].sigma.len(), 3);
        assert_eq!(recs[1].sigma.len(), 7);
    }

    #[test]
    fn sweep_rejects_degenerate_input() {
        let z1 = GroupSpec::lattice(1);
        assert!(matches!(
            run_sweep(&z1, &ShapeFamily::Ball, 1..=3, 1, DEFAULT_BALL_CAP),
            Err(Error::Scope(_))
        ));
        let z2 = GroupSpec::lattice(2);
        assert!(run_sweep(&z2, &ShapeFamily::Ball, 1..=3, 0, DEFAULT_BALL_CAP).is_err());
        let err = run_sweep(&z2, &ShapeFamily::PuncturedBall, 1..=3, 1, DEFAULT_BALL_CAP).unwrap_err();
        match err {
            Error::Sweep { family, n, source } => {
                assert_eq!(family, "punctured-ball");
                assert_eq!(n, 1);
                assert!(matches!(*source, Error::Disconnected { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decay_and_main_bound_on_small_sweep() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 3..=12, 3, DEFAULT_BALL_CAP).unwrap();
        let decay = check_decay(&recs, 3).unwrap();
        assert_eq!(decay.len(), 3);
        assert!(decay[0].pass, "{:?}", decay[0]);
        assert!((decay[0].threshold + 0.85).abs() < 1e-15);
        let main = check_main_bound(&recs);
        assert_eq!(main.len(), 3);
        assert!(main.iter().all(|m| m.sup.is_finite()));
        assert!(check_decay(&recs[..4], 1).is_err());
    }

    #[test]
    fn main_bound_singleton() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 4..=4, 2, DEFAULT_BALL_CAP).unwrap();
        let out = check_main_bound(&recs);
        assert_eq!(out[0].sup, recs[0].r_main[0]);
        assert_eq!(out[1].sup, recs[0].r_main[1]);
        assert!(check_main_bound(&[]).is_empty());
    }

    #[test]
    fn check_rows() {
        let z2 = GroupSpec::lattice(2);
        let recs = run_sweep(&z2, &ShapeFamily::Ball, 2..=7, 2, DEFAULT_BALL_CAP).unwrap();
        let names: Vec<String> = CHECK_NAMES.iter().map(|s| s.to_string()).collect();
        let rows = run_checks(&z2, &recs, &names, 2).unwrap();
        assert_eq!(rows.len(), 1 + 1 + 2 + 2);
        assert!(rows.iter().filter(|r| r.is_unconditional()).all(|r| r.pass));
        assert!(run_checks(&z2, &recs, &["bogus".into()], 2).is_err());
        let h = GroupSpec::heisenberg();
        assert!(matches!(
            run_checks(&h, &recs, &["han-hua".into()], 2),
            Err(Error::Scope(_))
        ));
    }
}
