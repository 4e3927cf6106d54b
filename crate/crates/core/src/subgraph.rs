//! Graphs with boundary induced by a finite connected vertex set of a
//! Cayley graph, and the shape families used to generate them.
//!
//! For an interior set `Ω` the boundary is every vertex outside `Ω` with a
//! neighbour in `Ω`, and the edge set keeps exactly the edges that touch
//! `Ω`. Edges between two boundary vertices are therefore never present.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::cayley::generate_ball;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec, GrowthOrder};

/// Which side of the boundary a vertex sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Interior,
    Boundary,
}

/// `(Ω, B)` with edge set `E'`.
///
/// Vertex ids: interior vertices are `0..|Ω|`, boundary vertices are
/// `|Ω|..|Ω|+|B|`; each block is sorted lexicographically by coordinates.
/// Edges are stored as `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphWithBoundary {
    pub spec: GroupSpec,
    pub interior: Vec<GroupElement>,
    pub boundary: Vec<GroupElement>,
    pub edges: Vec<(usize, usize)>,
    pub interior_degrees: Vec<usize>,
    pub boundary_degrees: Vec<usize>,
}

impl SubgraphWithBoundary {
    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    /// `|Ω̄| = |Ω| + |B|`.
    pub fn n_total(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn role(&self, v: usize) -> Role {
        if v < self.interior.len() {
            Role::Interior
        } else {
            Role::Boundary
        }
    }

    pub fn vertex(&self, v: usize) -> &GroupElement {
        match self.role(v) {
            Role::Interior => &self.interior[v],
            Role::Boundary => &self.boundary[v - self.interior.len()],
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        match self.role(v) {
            Role::Interior => self.interior_degrees[v],
            Role::Boundary => self.boundary_degrees[v - self.interior.len()],
        }
    }

    /// Sorted adjacency lists over all `|Ω̄|` vertices.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_total()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Text form: a `# group` header, one `id,role,coords...` line per
    /// vertex (role `I` or `B`), then one `u,v` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# group {}", self.spec);
        for v in 0..self.n_total() {
            let role = match self.role(v) {
                Role::Interior => 'I',
                Role::Boundary => 'B',
            };
            let _ = write!(out, "{v},{role}");
            for c in self.vertex(v).coords() {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        for (u, v) in &self.edges {
            let _ = writeln!(out, "{u},{v}");
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Degrees are recomputed from
    /// the edge lines.
    pub fn from_text(spec: &GroupSpec, text: &str) -> Result<Self> {
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| Error::Parse {
                line: lineno + 1,
                reason,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match fields.get(1).copied() {
                Some("I") | Some("B") => {
                    let id: usize = fields[0]
                        .parse()
                        .map_err(|_| err(format!("bad vertex id `{}`", fields[0])))?;
                    let coords = parse_coords(&fields[2..]).map_err(err)?;
                    let x = GroupElement(coords);
                    spec.check(&x)?;
                    let expected = interior.len() + boundary.len();
                    if id != expected {
                        return Err(err(format!("vertex id {id}, expected {expected}")));
                    }
                    if fields[1] == "I" {
                        if !boundary.is_empty() {
                            return Err(err("interior vertex after boundary block".into()));
                        }
                        interior.push(x);
                    } else {
                        boundary.push(x);
                    }
                }
                _ => {
                    if fields.len() != 2 {
                        return Err(err(format!("expected `u,v`, got `{line}`")));
                    }
                    let u: usize = fields[0].parse().map_err(|_| err("bad edge".into()))?;
                    let v: usize = fields[1].parse().map_err(|_| err("bad edge".into()))?;
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
        let n = interior.len() + boundary.len();
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if v >= n || u == v {
                return Err(Error::Parse {
                    line: 0,
                    reason: format!("edge ({u},{v}) out of range"),
                });
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        let boundary_degrees = degree.split_off(interior.len());
        Ok(SubgraphWithBoundary {
            spec: spec.clone(),
            interior,
            boundary,
            edges,
            interior_degrees: degree,
            boundary_degrees,
        })
    }
}

fn parse_coords(fields: &[&str]) -> std::result::Result<Vec<i64>, String> {
    fields
        .iter()
        .map(|f| f.parse::<i64>().map_err(|_| format!("bad coordinate `{f}`")))
        .collect()
}

/// Reads an interior set from text. Accepts either the full subgraph
/// serialization (interior `I` lines are kept, everything else ignored)
/// or bare coordinate lines. Duplicates collapse.
pub fn read_omega(spec: &GroupSpec, text: &str) -> Result<Vec<GroupElement>> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
        .collect();
    let serialized = lines
        .iter()
        .any(|(_, f)| matches!(f.get(1).copied(), Some("I") | Some("B")));
    let mut set = BTreeSet::new();
    for (line, fields) in lines {
        let coords = if serialized {
            if fields.get(1).copied() != Some("I") {
                continue;
            }
            parse_coords(&fields[2..])
        } else {
            parse_coords(&fields)
        }
        .map_err(|reason| Error::Parse { line, reason })?;
        let x = GroupElement(coords);
        spec.check(&x)?;
        set.insert(x);
    }
    Ok(set.into_iter().collect())
}

/// Checks that `omega` is connected in the Cayley graph. On failure the
/// error names the first vertex and the smallest vertex it cannot reach.
fn check_connected(spec: &GroupSpec, omega: &[GroupElement], index: &HashMap<&GroupElement, usize>) -> Result<()> {
    let mut seen = vec![false; omega.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for w in spec.neighbors(&omega[u])? {
            if let Some(&j) = index.get(&w) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    match seen.iter().position(|s| !s) {
        None => Ok(()),
        Some(j) => Err(Error::Disconnected {
            first: omega[0].0.clone(),
            second: omega[j].0.clone(),
        }),
    }
}

/// Builds `(Ω, B)` from a finite connected interior set, querying the
/// infinite Cayley graph through group arithmetic.
pub fn induce<I>(spec: &GroupSpec, omega: I) -> Result<SubgraphWithBoundary>
where
    I: IntoIterator<Item = GroupElement>,
{
    let interior: Vec<GroupElement> = omega.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if interior.is_empty() {
        return Err(Error::EmptyOmega);
    }
    for x in &interior {
        spec.check(x)?;
    }
    let interior_index: HashMap<&GroupElement, usize> =
        interior.iter().enumerate().map(|(i, x)| (x, i)).collect();
    check_connected(spec, &interior, &interior_index)?;

    let neighbors: Vec<Vec<GroupElement>> = interior
        .iter()
        .map(|x| spec.neighbors(x))
        .collect::<Result<_>>()?;
    let boundary: Vec<GroupElement> = neighbors
        .iter()
        .flatten()
        .filter(|w| !interior_index.contains_key(w))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let offset = interior.len();
    let boundary_index: HashMap<&GroupElement, usize> = boundary
        .iter()
        .enumerate()
        .map(|(i, x)| (x, offset + i))
        .collect();

    let mut edges = HashSet::new();
    for (a, nbrs) in neighbors.iter().enumerate() {
        for w in nbrs {
            let b = interior_index
                .get(w)
                .or_else(|| boundary_index.get(w))
                .copied()
                .expect("every neighbour of the interior is classified");
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
    edges.sort_unstable();

    let mut degree = vec![0usize; offset + boundary.len()];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let boundary_degrees = degree.split_off(offset);

    Ok(SubgraphWithBoundary {
        spec: spec.clone(),
        interior,
        boundary,
        edges,
        interior_degrees: degree,
        boundary_degrees,
    })
}

/// `|Ω̄|^{(d-1)/d} / |B|`.
pub fn isoperimetric_ratio(sub: &SubgraphWithBoundary, d: GrowthOrder) -> f64 {
    let d = d.as_f64();
    (sub.n_total() as f64).powf((d - 1.0) / d) / sub.n_boundary() as f64
}

/// A one-parameter family of interior sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeFamily {
    /// `B(n)`.
    Ball,
    /// `B(n) \ {e}`.
    PuncturedBall,
    /// Coordinate box `[0, n·m_i)` per coordinate; empty multipliers mean all ones.
    Box { multipliers: Vec<u32> },
    /// `B(n) \ B(inner)`.
    BallMinusBall { inner: u32 },
}

impl fmt::Display for ShapeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeFamily::Ball => write!(f, "ball"),
            ShapeFamily::PuncturedBall => write!(f, "punctured-ball"),
            ShapeFamily::Box { multipliers } if multipliers.is_empty() => write!(f, "box"),
            ShapeFamily::Box { multipliers } => {
                let m: Vec<String> = multipliers.iter().map(u32::to_string).collect();
                write!(f, "box:{}", m.join("x"))
            }
            ShapeFamily::BallMinusBall { inner } => write!(f, "ball-minus-ball:{inner}"),
        }
    }
}

impl FromStr for ShapeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidShape(format!("unknown family `{s}`"));
        match (name, arg) {
            ("ball", None) => Ok(ShapeFamily::Ball),
            ("punctured-ball", None) => Ok(ShapeFamily::PuncturedBall),
            ("box", None) => Ok(ShapeFamily::Box {
                multipliers: Vec::new(),
            }),
            ("box", Some(a)) => {
                let multipliers = a
                    .split('x')
                    .map(|m| m.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                if multipliers.contains(&0) {
                    return Err(Error::InvalidShape("box multipliers must be positive".into()));
                }
                Ok(ShapeFamily::Box { multipliers })
            }
            ("ball-minus-ball", Some(a)) => Ok(ShapeFamily::BallMinusBall {
                inner: a.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// The interior set of `family` at parameter `param`, verified to be
/// nonempty and connected.
pub fn instantiate_family(
    spec: &GroupSpec,
    family: &ShapeFamily,
    param: u32,
    cap: usize,
) -> Result<Vec<GroupElement>> {
    let omega: Vec<GroupElement> = match family {
        ShapeFamily::Ball => generate_ball(spec, param, cap)?.vertices,
        ShapeFamily::PuncturedBall => {
            if param < 1 {
                return Err(Error::InvalidShape("punctured ball needs n >= 1".into()));
            }
            let mut v = generate_ball(spec, param, cap)?.vertices;
            v.remove(0);
            v
        }
        ShapeFamily::BallMinusBall { inner } => {
            if *inner >= param {
                return Err(Error::InvalidShape(format!(
                    "outer radius {param} must exceed inner radius {inner}"
                )));
            }
            let ball = generate_ball(spec, param, cap)?;
            ball.vertices
                .into_iter()
                .zip(ball.dist_from_e)
                .filter(|(_, d)| d > inner)
                .map(|(v, _)| v)
                .collect()
        }
        ShapeFamily::Box { multipliers } => {
            let dim = spec.dim();
            let sides: Vec<u64> = if multipliers.is_empty() {
                vec![param as u64; dim]
            } else if multipliers.len() == dim {
                multipliers.iter().map(|m| *m as u64 * param as u64).collect()
            } else {
                return Err(Error::InvalidShape(format!(
                    "box has {} sides but the group has {dim} coordinates",
                    multipliers.len()
                )));
            };
            let total = sides.iter().try_fold(1u64, |acc, s| acc.checked_mul(*s));
            match total {
                Some(t) if t as usize <= cap => {}
                _ => return Err(Error::ResourceCap { radius: param, cap }),
            }
            let mut out = vec![Vec::with_capacity(dim)];
            for &side in &sides {
                out = out
                    .into_iter()
                    .flat_map(|prefix: Vec<i64>| {
                        (0..side as i64).map(move |c| {
                            let mut p = prefix.clone();
                            p.push(c);
                            p
                        })
                    })
                    .collect();
            }
            out.into_iter().map(GroupElement).collect()
        }
    };
    if omega.is_empty() {
        return Err(Error::InvalidShape(format!("{family} at n={param} is empty")));
    }
    let index: HashMap<&GroupElement, usize> = omega.iter().enumerate().map(|(i, x)| (x, i)).collect();
    check_connected(spec, &omega, &index)?;
    Ok(omega)
}
