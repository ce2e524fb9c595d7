//! Flat `key = value` configuration files.
//!
//! ```text
//! # Fokker-Planck with V = x²/2
//! problem = fokker-planck
//! lambda = 1
//! N = 256
//! T = 1
//! n = 64
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};

use crate::euclidean::QuadraticFunctional;
use crate::wass1d::{EntropyKind, Ordering, PotentialSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Splits config text into key/value pairs. `#` starts a comment; blank lines
/// are ignored; duplicate keys are an error.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return err(format!("line {}: empty key", lineno + 1));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Euclidean,
    FokkerPlanck,
    PorousMedium,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    Zero,
    Quadratic { lambda: f64 },
    LogCosh { scale: f64 },
}

impl PotentialKind {
    pub fn spec(self) -> PotentialSpec {
        match self {
            PotentialKind::Zero => PotentialSpec::zero(),
            PotentialKind::Quadratic { lambda } => {
                PotentialSpec::quadratic(lambda).expect("validated at parse time")
            }
            PotentialKind::LogCosh { scale } => {
                PotentialSpec::log_cosh(scale).expect("validated at parse time")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemConfig {
    Euclidean {
        f1: QuadraticFunctional,
        f2: QuadraticFunctional,
        x0: DVector<f64>,
    },
    /// Boltzmann entropy plus a potential, started from `N(m0, σ0²)`.
    FokkerPlanck {
        potential: PotentialKind,
        order: Ordering,
        cells: usize,
        m0: f64,
        sigma0: f64,
    },
    /// Rényi entropy plus a potential, started from the Barenblatt profile at
    /// time `t0`.
    PorousMedium {
        potential: PotentialKind,
        order: Ordering,
        cells: usize,
        m: f64,
        t0: f64,
    },
}

impl ProblemConfig {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemConfig::Euclidean { .. } => ProblemKind::Euclidean,
            ProblemConfig::FokkerPlanck { .. } => ProblemKind::FokkerPlanck,
            ProblemConfig::PorousMedium { .. } => ProblemKind::PorousMedium,
        }
    }

    pub fn entropy_kind(&self) -> Option<EntropyKind> {
        match self {
            ProblemConfig::Euclidean { .. } => None,
            ProblemConfig::FokkerPlanck { .. } => Some(EntropyKind::Boltzmann),
            ProblemConfig::PorousMedium { m, .. } => Some(EntropyKind::Renyi { m: *m }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `n` steps of size `T/(2n)`.
    Uniform(usize),
    /// Explicit step sizes `h_k`.
    Explicit(Vec<f64>),
}

impl Schedule {
    pub fn len(&self) -> usize {
        match self {
            Schedule::Uniform(n) => *n,
            Schedule::Explicit(h) => h.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Lowers the running sum `Δ_k` at the middle step.
    DecreaseDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    Fine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub total_time: f64,
    pub schedule: Schedule,
    pub step_counts: Vec<usize>,
    pub reference: Option<ReferenceKind>,
    pub reference_steps: Option<usize>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub snapshots: Vec<usize>,
    pub probes: usize,
    pub corrupt: Option<Corruption>,
}

const KNOWN_KEYS: &[&str] = &[
    "problem",
    "T",
    "n",
    "steps",
    "step_counts",
    "reference",
    "reference_steps",
    "seed",
    "output_dir",
    "snapshots",
    "probes",
    "corrupt",
    "a1",
    "b1",
    "c1",
    "a2",
    "b2",
    "c2",
    "x0",
    "N",
    "potential",
    "lambda",
    "order",
    "m0",
    "sigma0",
    "m",
    "t0",
];

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    fn usize_opt(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    ConfigError(format!(
                        "`{key}`: expected a nonnegative integer, got `{v}`"
                    ))
                })
            })
            .transpose()
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(format!("`{key}`: expected a finite number, got `{v}`")),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| ConfigError(format!("`{key}`: cannot parse list entry `{s}`")))
        })
        .collect()
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let xs: Vec<f64> = parse_list(key, v)?;
    if xs.iter().any(|x| !x.is_finite()) {
        return err(format!("`{key}`: entries must be finite"));
    }
    Ok(xs)
}

/// Rows separated by `;`, entries by `,`.
fn parse_matrix(key: &str, v: &str) -> Result<DMatrix<f64>, ConfigError> {
    let rows: Vec<Vec<f64>> = v
        .split(';')
        .map(|r| parse_f64_list(key, r))
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return err(format!("`{key}`: matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn parse_order(v: &str) -> Result<Ordering, ConfigError> {
    match v {
        "entropy-first" => Ok(Ordering::EntropyFirst),
        "potential-first" => Ok(Ordering::PotentialFirst),
        _ => err(format!(
            "`order`: expected entropy-first or potential-first, got `{v}`"
        )),
    }
}

fn parse_potential(
    fields: &Fields,
    default: &str,
    default_lambda: f64,
) -> Result<PotentialKind, ConfigError> {
    let lambda = fields.f64_or("lambda", default_lambda)?;
    if lambda < 0.0 {
        return err("`lambda` must be >= 0");
    }
    match fields.raw("potential").unwrap_or(default) {
        "zero" => Ok(PotentialKind::Zero),
        "quadratic" => Ok(PotentialKind::Quadratic { lambda }),
        "log-cosh" => Ok(PotentialKind::LogCosh { scale: lambda }),
        other => err(format!(
            "`potential`: expected zero, quadratic or log-cosh, got `{other}`"
        )),
    }
}

fn parse_cells(fields: &Fields, default: usize) -> Result<usize, ConfigError> {
    let n = fields.usize_opt("N")?.unwrap_or(default);
    if n < 4 {
        return err(format!("`N` must be at least 4, got {n}"));
    }
    Ok(n)
}

fn quadratic(
    fields: &Fields,
    a: &str,
    b: &str,
    c: &str,
    dim: usize,
) -> Result<QuadraticFunctional, ConfigError> {
    let am = match fields.raw(a) {
        Some(v) => parse_matrix(a, v)?,
        None => DMatrix::identity(dim, dim),
    };
    let bv = match fields.raw(b) {
        Some(v) => DVector::from_vec(parse_f64_list(b, v)?),
        None => DVector::zeros(dim),
    };
    let c0 = fields.f64_or(c, 0.0)?;
    QuadraticFunctional::new(am, bv, c0).map_err(|e| ConfigError(format!("`{a}`/`{b}`: {e}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let map = parse_key_values(text)?;
        if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return err(format!("unknown key `{k}`"));
        }
        let fields = Fields(map);

        let problem = match fields.raw("problem") {
            None => return err("missing required key `problem`"),
            Some("euclidean") => {
                let x0 = match fields.raw("x0") {
                    Some(v) => DVector::from_vec(parse_f64_list("x0", v)?),
                    None => DVector::from_element(1, 1.0),
                };
                if x0.is_empty() {
                    return err("`x0` must be nonempty");
                }
                let dim = x0.len();
                let f1 = quadratic(&fields, "a1", "b1", "c1", dim)?;
                let f2 = quadratic(&fields, "a2", "b2", "c2", dim)?;
                if f1.dim() != dim || f2.dim() != dim {
                    return err(format!(
                        "dimension mismatch: x0 has {dim} entries, phi1 {}, phi2 {}",
                        f1.dim(),
                        f2.dim()
                    ));
                }
                ProblemConfig::Euclidean { f1, f2, x0 }
            }
            Some("fokker-planck") => {
                let sigma0 = fields.f64_or("sigma0", 2.0)?;
                if sigma0 <= 0.0 {
                    return err("`sigma0` must be positive");
                }
                ProblemConfig::FokkerPlanck {
                    potential: parse_potential(&fields, "quadratic", 1.0)?,
                    order: parse_order(fields.raw("order").unwrap_or("entropy-first"))?,
                    cells: parse_cells(&fields, 256)?,
                    m0: fields.f64_or("m0", 1.0)?,
                    sigma0,
                }
            }
            Some("porous-medium") => {
                let m = fields.f64_or("m", 2.0)?;
                if !(m > 1.0 && m <= 4.0) {
                    return err(format!("`m` must lie in (1, 4], got {m}"));
                }
                let t0 = fields.f64_or("t0", 1.0)?;
                if t0 <= 0.0 {
                    return err("`t0` must be positive");
                }
                ProblemConfig::PorousMedium {
                    potential: parse_potential(&fields, "zero", 0.0)?,
                    order: parse_order(fields.raw("order").unwrap_or("entropy-first"))?,
                    cells: parse_cells(&fields, 256)?,
                    m,
                    t0,
                }
            }
            Some(other) => {
                return err(format!(
                    "`problem`: expected euclidean, fokker-planck or porous-medium, got `{other}`"
                ))
            }
        };

        let steps = fields
            .raw("steps")
            .map(|v| parse_f64_list("steps", v))
            .transpose()?;
        let n = fields.usize_opt("n")?;
        let (schedule, total_time) = match (n, steps) {
            (Some(_), Some(_)) => return err("give either `n` or `steps`, not both"),
            (Some(0), None) => return err("`n` must be positive"),
            (Some(n), None) => (Schedule::Uniform(n), fields.f64_or("T", 1.0)?),
            (None, Some(h)) => {
                if h.is_empty() || h.iter().any(|v| *v <= 0.0) {
                    return err("`steps` must be a nonempty list of positive sizes");
                }
                let implied = 2.0 * h.iter().sum::<f64>();
                let t = fields.f64_or("T", implied)?;
                if (t - implied).abs() > 1e-12 * t.abs().max(1.0) {
                    return err(format!(
                        "`steps` sum to T = {implied}, but T = {t} was given"
                    ));
                }
                (Schedule::Explicit(h), implied)
            }
            (None, None) => (Schedule::Uniform(64), fields.f64_or("T", 1.0)?),
        };
        if total_time <= 0.0 {
            return err("`T` must be positive");
        }

        let step_counts: Vec<usize> = match fields.raw("step_counts") {
            Some(v) => parse_list("step_counts", v)?,
            None => Vec::new(),
        };
        if step_counts.contains(&0) || step_counts.windows(2).any(|w| w[1] <= w[0]) {
            return err("`step_counts` must be positive and strictly increasing");
        }
        let reference = match fields.raw("reference") {
            None => None,
            Some("exact") => Some(ReferenceKind::Exact),
            Some("fine") => Some(ReferenceKind::Fine),
            Some(other) => {
                return err(format!(
                    "`reference`: expected exact or fine, got `{other}`"
                ))
            }
        };

        let snapshots: Vec<usize> = match fields.raw("snapshots") {
            Some(v) => parse_list("snapshots", v)?,
            None => Vec::new(),
        };
        if let Some(k) = snapshots.iter().find(|&&k| k > schedule.len()) {
            return err(format!(
                "snapshot step {k} exceeds the number of steps {}",
                schedule.len()
            ));
        }
        if !snapshots.is_empty() && problem.kind() == ProblemKind::Euclidean {
            return err("`snapshots` apply to Wasserstein problems only");
        }

        let corrupt = match fields.raw("corrupt") {
            None | Some("none") => None,
            Some("decrease-delta") => Some(Corruption::DecreaseDelta),
            Some(other) => return err(format!("`corrupt`: unknown corruption `{other}`")),
        };

        let probes = fields.usize_opt("probes")?.unwrap_or(10);
        if probes == 0 {
            return err("`probes` must be positive");
        }

        Ok(RunConfig {
            problem,
            total_time,
            schedule,
            step_counts,
            reference,
            reference_steps: fields.usize_opt("reference_steps")?,
            seed: fields.usize_opt("seed")?.unwrap_or(0) as u64,
            output_dir: fields.raw("output_dir").map(PathBuf::from),
            snapshots,
            probes,
            corrupt,
        })
    }
}
