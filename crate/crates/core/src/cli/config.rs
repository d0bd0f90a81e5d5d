use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::funcspace::{Modulus, Weight};
use crate::geometry::PointCloud;

use super::io::{read_cloud, read_columns};
use super::CliError;

/// Every recognized key with its help text. Each key is accepted in a config
/// file and as a `--key value` flag.
pub const KEYS: &[(&str, &str)] = &[
    ("dim", "ambient dimension m (default 2)"),
    ("grid.size", "number of support directions (default depends on dim)"),
    ("omega.kind", "power | lipschitz | capped_linear | tabulated"),
    ("omega.c", "power modulus constant (default 1)"),
    ("omega.alpha", "power modulus exponent (default 1)"),
    ("omega.slope", "capped_linear slope"),
    ("omega.cap", "capped_linear cap"),
    ("omega.t", "tabulated modulus abscissae, comma separated"),
    ("omega.values", "tabulated modulus values, comma separated"),
    ("omega.file", "tabulated modulus as a two-column CSV"),
    ("weight.kind", "constant_one | polynomial | tabulated"),
    ("weight.coeffs", "polynomial coefficients in ascending order"),
    ("weight.x", "tabulated weight abscissae"),
    ("weight.values", "tabulated weight values"),
    ("weight.file", "tabulated weight as a two-column CSV"),
    ("knots", "explicit list | midpoints:n | optimize:n | file:path"),
    ("epsilons", "sample errors: one value, a list, or file:path"),
    ("samples", "comma separated point-cloud CSV files, one per knot"),
    ("optimize.starts", "starting configurations for knot optimization (default 3)"),
    ("optimize.max_sweeps", "coordinate-descent sweep limit (default 200)"),
    ("seed", "random seed (default 0)"),
    ("tol.integral", "refinement tolerance of the set-valued integral (default 1e-6)"),
    ("tol.min_cells", "smallest partition allowed to stop the refinement (default 1)"),
    ("trajectory.kind", "rotating_segment | constant | extremal | sampled"),
    ("trajectory.cloud", "point-cloud CSV of the constant trajectory"),
    ("trajectory.direction", "unit vector of the extremal trajectory (default e1)"),
    ("trajectory.times", "sample times of the sampled trajectory"),
    ("trajectory.samples", "point-cloud CSV files of the sampled trajectory"),
    ("trajectory.sample_tol", "largest ω(step) accepted for sampled trajectories (default 0.01)"),
    ("sharpness", "also report the sharpness certificate (true/false)"),
    ("study.n_min", "first n of the sweep (default 1)"),
    ("study.n_max", "last n of the sweep (default 16)"),
    ("asymptotics.n", "n values, comma separated (default 16,64,256,1024,4096)"),
    ("asymptotics.ratios", "also compute R_n/(n·Ω(B/n)) (true/false)"),
    ("output.csv", "main CSV output"),
    ("output.body", "support-function CSV of the computed body"),
    ("output.log", "refinement log CSV"),
    ("output.cells", "cell table CSV"),
];

/// Flat `key -> value` map; later inserts override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("line {}: expected `key = value`", no + 1)))?;
            let key = key.trim();
            check_key(key)?;
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(RawConfig(map))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        RawConfig::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        check_key(key)?;
        self.0.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.iter().any(|(k, _)| *k == key) {
        Ok(())
    } else {
        Err(CliError::config(format!("unknown key `{key}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KnotsSource {
    Explicit(Vec<f64>),
    Midpoints(usize),
    Optimize(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySource {
    RotatingSegment,
    Constant(PointCloud),
    Extremal(Vec<f64>),
    Sampled { times: Vec<f64>, clouds: Vec<PointCloud>, tol: f64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub body: Option<PathBuf>,
    pub log: Option<PathBuf>,
    pub cells: Option<PathBuf>,
}

/// Validated settings of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub grid_size: Option<usize>,
    pub omega: Modulus,
    pub weight: Weight,
    pub knots: Option<KnotsSource>,
    /// Either one uniform value or one value per knot.
    pub epsilons: Option<Vec<f64>>,
    pub samples: Option<Vec<PointCloud>>,
    pub starts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
    pub integral_tol: f64,
    pub min_cells: usize,
    pub trajectory: TrajectorySource,
    pub sharpness: bool,
    pub study_range: (usize, usize),
    pub asymptotics_n: Vec<usize>,
    pub ratios: bool,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let dim = parse_or(raw, "dim", 2usize)?;
        if dim == 0 {
            return Err(CliError::config("dim must be at least 1"));
        }
        let cfg = RunConfig {
            dim,
            grid_size: parse_opt(raw, "grid.size")?,
            omega: omega(raw)?,
            weight: weight(raw)?,
            knots: raw.get("knots").map(knots).transpose()?,
            epsilons: raw.get("epsilons").map(|s| list_or_file(s, "epsilons")).transpose()?,
            samples: raw
                .get("samples")
                .map(|s| paths(s).iter().map(|p| load_cloud(p)).collect())
                .transpose()?,
            starts: parse_or(raw, "optimize.starts", 3)?,
            max_sweeps: parse_or(raw, "optimize.max_sweeps", 200)?,
            seed: parse_or(raw, "seed", 0)?,
            integral_tol: parse_or(raw, "tol.integral", 1e-6)?,
            min_cells: parse_or(raw, "tol.min_cells", 1)?,
            trajectory: trajectory(raw)?,
            sharpness: parse_or(raw, "sharpness", false)?,
            study_range: (parse_or(raw, "study.n_min", 1)?, parse_or(raw, "study.n_max", 16)?),
            asymptotics_n: match raw.get("asymptotics.n") {
                Some(s) => list::<usize>(s, "asymptotics.n")?,
                None => vec![16, 64, 256, 1024, 4096],
            },
            ratios: parse_or(raw, "asymptotics.ratios", false)?,
            outputs: Outputs {
                csv: raw.get("output.csv").map(PathBuf::from),
                body: raw.get("output.body").map(PathBuf::from),
                log: raw.get("output.log").map(PathBuf::from),
                cells: raw.get("output.cells").map(PathBuf::from),
            },
        };
        if !(cfg.integral_tol > 0.0) {
            return Err(CliError::config("tol.integral must be positive"));
        }
        if cfg.study_range.0 == 0 || cfg.study_range.1 < cfg.study_range.0 {
            return Err(CliError::config("study range must satisfy 1 <= n_min <= n_max"));
        }
        Ok(cfg)
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, s: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("invalid value `{s}` for `{key}`")))
}

fn parse_opt<T: std::str::FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>, CliError> {
    raw.get(key).map(|s| parse_value(key, s)).transpose()
}

fn parse_or<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> Result<T, CliError> {
    Ok(parse_opt(raw, key)?.unwrap_or(default))
}

fn require<T: std::str::FromStr>(raw: &RawConfig, key: &str) -> Result<T, CliError> {
    parse_opt(raw, key)?.ok_or_else(|| CliError::config(format!("missing `{key}`")))
}

fn list<T: std::str::FromStr>(s: &str, key: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_value(key, p))
        .collect()
}

fn paths(s: &str) -> Vec<PathBuf> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .collect()
}

fn existing(path: &Path) -> Result<&Path, CliError> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::config(format!("input file {} does not exist", path.display())))
    }
}

fn load_cloud(path: &Path) -> Result<PointCloud, CliError> {
    read_cloud(existing(path)?)
}

fn list_or_file(s: &str, key: &str) -> Result<Vec<f64>, CliError> {
    match s.strip_prefix("file:") {
        Some(p) => Ok(read_columns(existing(Path::new(p.trim()))?, 1)?.remove(0)),
        None => list(s, key),
    }
}

fn two_columns(raw: &RawConfig, prefix: &str, xkey: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    if let Some(p) = raw.get(&format!("{prefix}.file")) {
        let mut cols = read_columns(existing(Path::new(p))?, 2)?;
        let v = cols.pop().expect("two columns");
        return Ok((cols.pop().expect("two columns"), v));
    }
    let xs = raw
        .get(&format!("{prefix}.{xkey}"))
        .ok_or_else(|| CliError::config(format!("missing `{prefix}.{xkey}` or `{prefix}.file`")))?;
    let vs = raw
        .get(&format!("{prefix}.values"))
        .ok_or_else(|| CliError::config(format!("missing `{prefix}.values`")))?;
    Ok((list(xs, xkey)?, list(vs, "values")?))
}

fn omega(raw: &RawConfig) -> Result<Modulus, CliError> {
    let m = match raw.get("omega.kind").unwrap_or("lipschitz") {
        "lipschitz" => Modulus::lipschitz(),
        "power" => Modulus::power(parse_or(raw, "omega.c", 1.0)?, parse_or(raw, "omega.alpha", 1.0)?)?,
        "capped_linear" => Modulus::capped_linear(require(raw, "omega.slope")?, require(raw, "omega.cap")?)?,
        "tabulated" => {
            let (t, v) = two_columns(raw, "omega", "t")?;
            Modulus::tabulated(t, v)?
        }
        other => return Err(CliError::config(format!("unknown omega.kind `{other}`"))),
    };
    Ok(m)
}

fn weight(raw: &RawConfig) -> Result<Weight, CliError> {
    let w = match raw.get("weight.kind").unwrap_or("constant_one") {
        "constant_one" => Weight::ConstantOne,
        "polynomial" => Weight::polynomial(list(
            raw.get("weight.coeffs").ok_or_else(|| CliError::config("missing `weight.coeffs`"))?,
            "weight.coeffs",
        )?)?,
        "tabulated" => {
            let (x, v) = two_columns(raw, "weight", "x")?;
            Weight::tabulated(x, v)?
        }
        other => return Err(CliError::config(format!("unknown weight.kind `{other}`"))),
    };
    Ok(w)
}

fn knots(s: &str) -> Result<KnotsSource, CliError> {
    if let Some(n) = s.strip_prefix("midpoints:") {
        Ok(KnotsSource::Midpoints(parse_value("knots", n)?))
    } else if let Some(n) = s.strip_prefix("optimize:") {
        Ok(KnotsSource::Optimize(parse_value("knots", n)?))
    } else {
        Ok(KnotsSource::Explicit(list_or_file(s, "knots")?))
    }
}

fn trajectory(raw: &RawConfig) -> Result<TrajectorySource, CliError> {
    Ok(match raw.get("trajectory.kind").unwrap_or("rotating_segment") {
        "rotating_segment" => TrajectorySource::RotatingSegment,
        "constant" => TrajectorySource::Constant(load_cloud(Path::new(
            raw.get("trajectory.cloud")
                .ok_or_else(|| CliError::config("missing `trajectory.cloud`"))?,
        ))?),
        "extremal" => TrajectorySource::Extremal(match raw.get("trajectory.direction") {
            Some(s) => list(s, "trajectory.direction")?,
            None => {
                let mut e1 = vec![0.0; parse_or(raw, "dim", 2usize)?];
                e1[0] = 1.0;
                e1
            }
        }),
        "sampled" => TrajectorySource::Sampled {
            times: list(
                raw.get("trajectory.times")
                    .ok_or_else(|| CliError::config("missing `trajectory.times`"))?,
                "trajectory.times",
            )?,
            clouds: paths(
                raw.get("trajectory.samples")
                    .ok_or_else(|| CliError::config("missing `trajectory.samples`"))?,
            )
            .iter()
            .map(|p| load_cloud(p))
            .collect::<Result<_, _>>()?,
            tol: parse_or(raw, "trajectory.sample_tol", 0.01)?,
        },
        other => return Err(CliError::config(format!("unknown trajectory.kind `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_and_comments() {
        let raw = RawConfig::parse("# sweep\nomega.kind = power\n\nomega.alpha = 0.5 # half\nknots=midpoints:3\n").unwrap();
        assert_eq!(raw.get("omega.alpha"), Some("0.5"));
        let cfg = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.omega, Modulus::power(1.0, 0.5).unwrap());
        assert_eq!(cfg.knots, Some(KnotsSource::Midpoints(3)));
        assert_eq!(cfg.weight, Weight::ConstantOne);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RawConfig::parse("nonsense").is_err());
        assert!(RawConfig::parse("omega.colour = red").is_err());
        let raw = RawConfig::parse("omega.kind = power\nomega.alpha = 2").unwrap();
        assert!(RunConfig::from_raw(&raw).is_err());
        let raw = RawConfig::parse("samples = /nonexistent/a.csv").unwrap();
        assert_eq!(RunConfig::from_raw(&raw).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn later_values_override() {
        let mut raw = RawConfig::parse("knots = 0.2, 0.7").unwrap();
        assert_eq!(RunConfig::from_raw(&raw).unwrap().knots, Some(KnotsSource::Explicit(vec![0.2, 0.7])));
        raw.set("knots", "optimize:5").unwrap();
        assert_eq!(RunConfig::from_raw(&raw).unwrap().knots, Some(KnotsSource::Optimize(5)));
    }
}
