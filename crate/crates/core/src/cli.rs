//! Command implementations behind the `steklov` binary.
//!
//! Exit codes: 0 success, 1 I/O or numerical failure, 2 configuration or
//! theorem-scope error, 3 resource cap, 4 disconnected or empty interior,
//! 5 an unconditional check failed (reports are still written).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bounds::{self, CHECK_NAMES};
use crate::cayley::{self, DEFAULT_BALL_CAP};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, GroupSpec};
use crate::report;
use crate::steklov;
use crate::subgraph::{self, ShapeFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_DISCONNECTED: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::GroupParse { .. }
        | Error::Config(_)
        | Error::InvalidGenerators(_)
        | Error::InvalidElement { .. }
        | Error::InvalidShape(_)
        | Error::Scope(_)
        | Error::Parse { .. }
        | Error::InsufficientData(_) => EXIT_CONFIG,
        Error::ResourceCap { .. } | Error::OracleCap { .. } => EXIT_CAP,
        Error::Disconnected { .. } | Error::EmptyOmega => EXIT_DISCONNECTED,
        _ => EXIT_FAILURE,
    }
}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub group: String,
    /// `;`-separated coordinate tuples, e.g. `1,0;-1,0;0,1;0,-1`.
    pub generators: Option<String>,
    pub family: String,
    pub n_min: Option<u32>,
    pub n_max: u32,
    /// Family parameter for a single `spectrum` instance.
    pub n: Option<u32>,
    pub k: usize,
    pub out_dir: PathBuf,
    pub ball_cap: usize,
    /// `None` selects the defaults for the group.
    pub checks: Option<Vec<String>>,
    pub omega: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: "Z^2".into(),
            generators: None,
            family: "ball".into(),
            n_min: None,
            n_max: 12,
            n: None,
            k: 5,
            out_dir: PathBuf::from("out"),
            ball_cap: DEFAULT_BALL_CAP,
            checks: None,
            omega: None,
        }
    }
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults; `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                reason: format!("expected key = value, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim().trim_matches('"'))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<u64> {
            v.replace('_', "")
                .parse()
                .map_err(|_| Error::Config(format!("`{key}` expects an integer, got `{v}`")))
        };
        match key {
            "group" => self.group = value.to_string(),
            "generators" => self.generators = Some(value.to_string()),
            "family" => self.family = value.to_string(),
            "n_min" | "n-min" => self.n_min = Some(num(value)? as u32),
            "n_max" | "n-max" => self.n_max = num(value)? as u32,
            "n" => self.n = Some(num(value)? as u32),
            "k" | "K" => self.k = num(value)? as usize,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value),
            "ball_cap" | "ball-cap" => self.ball_cap = num(value)? as usize,
            "checks" => self.checks = Some(parse_checks(value)),
            "omega" => self.omega = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Serializes to `from_kv` input.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("group = {}\n", self.group));
        if let Some(g) = &self.generators {
            out.push_str(&format!("generators = {g}\n"));
        }
        out.push_str(&format!("family = {}\n", self.family));
        if let Some(n) = self.n_min {
            out.push_str(&format!("n_min = {n}\n"));
        }
        out.push_str(&format!("n_max = {}\n", self.n_max));
        if let Some(n) = self.n {
            out.push_str(&format!("n = {n}\n"));
        }
        out.push_str(&format!("k = {}\n", self.k));
        out.push_str(&format!("out = {}\n", self.out_dir.display()));
        out.push_str(&format!("ball_cap = {}\n", self.ball_cap));
        if let Some(c) = &self.checks {
            let list = if c.is_empty() { "none".to_string() } else { c.join(",") };
            out.push_str(&format!("checks = {list}\n"));
        }
        if let Some(o) = &self.omega {
            out.push_str(&format!("omega = {}\n", o.display()));
        }
        out
    }

    pub fn group_spec(&self) -> Result<GroupSpec> {
        let kind: GroupKind = self.group.parse()?;
        match &self.generators {
            None => Ok(GroupSpec::new(kind)),
            Some(text) => {
                let gens = text
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|tuple| {
                        tuple
                            .trim_matches(|c| c == '(' || c == ')')
                            .split(',')
                            .map(|c| {
                                c.trim()
                                    .parse::<i64>()
                                    .map_err(|_| Error::Config(format!("bad generator `{tuple}`")))
                            })
                            .collect::<Result<Vec<i64>>>()
                            .map(GroupElement)
                    })
                    .collect::<Result<Vec<_>>>()?;
                GroupSpec::with_generators(kind, gens)
            }
        }
    }

    pub fn shape(&self) -> Result<ShapeFamily> {
        self.family.parse()
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        if let Some(lo) = self.n_min {
            if lo > self.n_max {
                return Err(Error::Config(format!("n_min {lo} exceeds n_max {}", self.n_max)));
            }
        }
        self.group_spec()?;
        Ok(())
    }

    /// Checks to run, resolving the default list for the group.
    pub fn resolved_checks(&self, spec: &GroupSpec) -> Result<Vec<String>> {
        let list = match &self.checks {
            Some(c) => c.clone(),
            None => {
                let mut c = vec!["spectrum".to_string()];
                if spec.kind().as_lattice().is_some() {
                    c.push("han-hua".into());
                }
                c.push("decay".into());
                c.push("main-bound".into());
                c
            }
        };
        for name in &list {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown check `{name}` (expected one of {})",
                    CHECK_NAMES.join(", ")
                )));
            }
            if name == "han-hua" && spec.kind().as_lattice().is_none() {
                return Err(Error::Scope(format!(
                    "the lattice eigenvalue inequality applies to Z^d only, not {spec}"
                )));
            }
        }
        Ok(list)
    }
}

/// Comma-separated list; `none` or empty means no checks.
pub fn parse_checks(value: &str) -> Vec<String> {
    let v = value.trim();
    if v.is_empty() || v.eq_ignore_ascii_case("none") {
        return Vec::new();
    }
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Short decimal form used on stdout.
fn fmt_short(x: f64) -> String {
    let s = format!("{:.12}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

/// `growth`: writes `growth.csv` and prints the fitted growth order.
pub fn cmd_growth(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    cfg.validate()?;
    let spec = cfg.group_spec()?;
    let table = cayley::growth_table(&spec, cfg.n_max, cfg.ball_cap)?;
    let path = cfg.out_dir.join("growth.csv");
    write_file(&path, &table.to_csv())?;
    let n_min = cfg.n_min.unwrap_or(4);
    let slope = cayley::estimate_growth_order(&table, n_min)?;
    say(out, format!("wrote {}", path.display()))?;
    say(
        out,
        format!(
            "estimated growth order over n in [{n_min}, {}]: {slope:.4} (known order {})",
            cfg.n_max,
            spec.growth_order().get()
        ),
    )?;
    Ok(EXIT_OK)
}

/// `spectrum`: one subgraph, from an `omega` file or a family instance.
/// Writes `spectrum.csv` and `subgraph.txt`.
pub fn cmd_spectrum(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    cfg.validate()?;
    let spec = cfg.group_spec()?;
    let omega = match &cfg.omega {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            subgraph::read_omega(&spec, &text)?
        }
        None => {
            let n = cfg.n.unwrap_or(cfg.n_max);
            subgraph::instantiate_family(&spec, &cfg.shape()?, n, cfg.ball_cap)?
        }
    };
    let sub = subgraph::induce(&spec, omega)?;
    let spectrum = steklov::solve(&sub, None)?;
    write_file(&cfg.out_dir.join("spectrum.csv"), &spectrum.to_csv())?;
    write_file(&cfg.out_dir.join("subgraph.txt"), &sub.to_text())?;
    say(
        out,
        format!(
            "|Omega| = {}, |B| = {}, |E'| = {}",
            sub.n_interior(),
            sub.n_boundary(),
            sub.edges.len()
        ),
    )?;
    let last = cfg.k.min(spectrum.len() - 1);
    let shown: Vec<String> = spectrum.eigenvalues[..=last]
        .iter()
        .map(|&s| if spectrum.is_trivial(s.abs()) { "0".into() } else { fmt_short(s) })
        .collect();
    say(out, shown.join(", "))?;
    Ok(EXIT_OK)
}

/// `sweep`: family sweep, checks, and reports. Exits with
/// [`EXIT_CHECK_FAILED`] when an unconditional check fails.
pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    cfg.validate()?;
    let spec = cfg.group_spec()?;
    let family = cfg.shape()?;
    let checks = cfg.resolved_checks(&spec)?;
    let n_min = cfg.n_min.unwrap_or(2);
    let records = bounds::run_sweep(&spec, &family, n_min..=cfg.n_max, cfg.k, cfg.ball_cap)?;
    let rows = bounds::run_checks(&spec, &records, &checks, cfg.k)?;
    let files = report::emit_report(&cfg.out_dir, &records, &rows)?;
    write_file(&cfg.out_dir.join("run.cfg"), &cfg.to_kv())?;

    say(out, format!("{} records -> {}", records.len(), files.records.display()))?;
    for r in &rows {
        say(
            out,
            format!(
                "{:<10} k={:<3} value={:<12} threshold={:<10} {}",
                r.check,
                r.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
                fmt_short(r.value),
                r.threshold.map(fmt_short).unwrap_or_else(|| "-".into()),
                if r.pass { "PASS" } else { "FAIL" }
            ),
        )?;
    }
    if rows.iter().any(|r| r.is_unconditional() && !r.pass) {
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let cfg = RunConfig {
            group: "Z^1 x H3".into(),
            generators: None,
            family: "box:1x2x1x1".into(),
            n_min: Some(3),
            n_max: 9,
            n: Some(4),
            k: 7,
            out_dir: PathBuf::from("/tmp/x y"),
            ball_cap: 1234,
            checks: Some(vec![]),
            omega: Some(PathBuf::from("omega.txt")),
        };
        assert_eq!(RunConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_kv(&d.to_kv()).unwrap(), d);
        let c = RunConfig {
            checks: Some(vec!["decay".into(), "spectrum".into()]),
            generators: Some("1,0;-1,0;0,1;0,-1".into()),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_kv(&c.to_kv()).unwrap(), c);
    }

    #[test]
    fn kv_errors() {
        assert!(RunConfig::from_kv("nonsense").is_err());
        assert!(RunConfig::from_kv("k = five").is_err());
        assert!(RunConfig::from_kv("colour = red").is_err());
        let c = RunConfig::from_kv("group = \"H3\"  # comment\nn_max = 3\n").unwrap();
        assert_eq!(c.group, "H3");
        assert_eq!(c.n_max, 3);
    }

    #[test]
    fn custom_generators() {
        let c = RunConfig {
            generators: Some("(1,0);(-1,0);(1,1);(-1,-1)".into()),
            ..RunConfig::default()
        };
        assert_eq!(c.group_spec().unwrap().generators().len(), 4);
        let bad = RunConfig {
            generators: Some("1,0".into()),
            ..RunConfig::default()
        };
        assert!(matches!(bad.group_spec(), Err(Error::InvalidGenerators(_))));
    }

    #[test]
    fn default_checks_depend_on_group() {
        let c = RunConfig::default();
        assert!(c.resolved_checks(&GroupSpec::lattice(2)).unwrap().contains(&"han-hua".to_string()));
        assert!(!c.resolved_checks(&GroupSpec::heisenberg()).unwrap().contains(&"han-hua".to_string()));
        let forced = RunConfig {
            checks: Some(vec!["han-hua".into()]),
            ..c
        };
        let err = forced.resolved_checks(&GroupSpec::heisenberg()).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::ResourceCap { radius: 1, cap: 1 }), EXIT_CAP);
        assert_eq!(exit_code(&Error::EmptyOmega), EXIT_DISCONNECTED);
        let wrapped = Error::Sweep {
            family: "ball".into(),
            n: 2,
            source: Box::new(Error::ResourceCap { radius: 2, cap: 1 }),
        };
        assert_eq!(exit_code(&wrapped), EXIT_CAP);
        assert_eq!(exit_code(&Error::Overflow), EXIT_FAILURE);
    }

    #[test]
    fn short_format() {
        assert_eq!(fmt_short(1.0), "1");
        assert_eq!(fmt_short(-0.0), "0");
        assert_eq!(fmt_short(0.25), "0.25");
    }

    #[test]
    fn checks_list() {
        assert!(parse_checks("none").is_empty());
        assert!(parse_checks("").is_empty());
        assert_eq!(parse_checks("decay, spectrum"), vec!["decay", "spectrum"]);
    }
}
