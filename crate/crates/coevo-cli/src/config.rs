//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Lists (grids, seed lists, explicit vectors) are comma-separated. The
//! format is deliberately trivial so configs are diffable and parseable from
//! any language.

use std::fmt;
use std::str::FromStr;

/// Parse or validation failure, carrying the offending line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.file, line, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// How the initial population is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    /// Opinions uniform on [0, 1]; actions copied from the opinions.
    UniformYEqualsX,
    /// Opinions and actions drawn independently (opinions first).
    UniformIndependent,
    /// Vectors given verbatim in the config.
    Explicit,
}

impl InitMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitMode::UniformYEqualsX => "uniform_y_equals_x",
            InitMode::UniformIndependent => "uniform_independent",
            InitMode::Explicit => "explicit",
        }
    }
}

/// Which files a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFlags {
    pub trajectory_csv: bool,
    pub matrices_csv: bool,
    pub graphs_dot: bool,
    pub report_json: bool,
}

impl Default for OutputFlags {
    fn default() -> Self {
        Self {
            trajectory_csv: true,
            matrices_csv: false,
            graphs_dot: false,
            report_json: true,
        }
    }
}

/// A fully resolved single-run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub epsilon: f64,
    pub phi: f64,
    pub seed: u64,
    pub horizon: usize,
    pub tol_consensus: f64,
    pub tol_containment: f64,
    pub window: usize,
    pub init_mode: InitMode,
    pub x0: Option<Vec<f64>>,
    pub y0: Option<Vec<f64>>,
    pub outputs: OutputFlags,
}

/// A sweep: the cartesian product of the grids and seed entries over a base
/// run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub epsilon_grid: Vec<f64>,
    pub phi_grid: Vec<f64>,
    pub seeds: Vec<u64>,
}

struct RawEntry {
    line: usize,
    key: String,
    value: String,
}

struct Raw<'a> {
    file: &'a str,
    entries: Vec<RawEntry>,
}

impl<'a> Raw<'a> {
    fn parse(text: &str, file: &'a str) -> Result<Self, ConfigError> {
        let mut entries: Vec<RawEntry> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    file: file.into(),
                    line: Some(line),
                    message: format!("expected `key = value`, found `{content}`"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError {
                    file: file.into(),
                    line: Some(line),
                    message: "empty key".into(),
                });
            }
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                return Err(ConfigError {
                    file: file.into(),
                    line: Some(line),
                    message: format!("duplicate key `{key}` (first set on line {})", prev.line),
                });
            }
            entries.push(RawEntry { line, key, value });
        }
        Ok(Self { file, entries })
    }

    fn err(&self, line: Option<usize>, message: String) -> ConfigError {
        ConfigError {
            file: self.file.into(),
            line,
            message,
        }
    }

    fn take(&mut self, key: &str) -> Option<RawEntry> {
        let pos = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(pos))
    }

    fn parse_scalar<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<(usize, T)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value.parse::<T>() {
                Ok(v) => Ok(Some((e.line, v))),
                Err(_) => Err(self.err(
                    Some(e.line),
                    format!("`{key}` must be {what}, found `{}`", e.value),
                )),
            },
        }
    }

    fn parse_list<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<(usize, Vec<T>)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => {
                let mut out = Vec::new();
                for piece in e.value.split(',') {
                    let piece = piece.trim();
                    match piece.parse::<T>() {
                        Ok(v) => out.push(v),
                        Err(_) => {
                            return Err(self.err(
                                Some(e.line),
                                format!("`{key}` must be a comma-separated list of {what}, found `{piece}`"),
                            ))
                        }
                    }
                }
                Ok(Some((e.line, out)))
            }
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(e) = self.entries.first() {
            return Err(self.err(Some(e.line), format!("unknown key `{}`", e.key)));
        }
        Ok(())
    }
}

fn check_unit(raw: &Raw, line: usize, key: &str, v: f64) -> Result<(), ConfigError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(raw.err(Some(line), format!("`{key}` = {v} outside [0, 1]")));
    }
    Ok(())
}

fn parse_common(raw: &mut Raw) -> Result<RunConfig, ConfigError> {
    let n = match raw.parse_scalar::<usize>("n", "a positive integer")? {
        Some((line, 0)) => return Err(raw.err(Some(line), "`n` must be at least 1".into())),
        Some((_, v)) => v,
        None => return Err(raw.err(None, "missing required key `n`".into())),
    };
    let seed = match raw.parse_scalar::<u64>("seed", "an unsigned 64-bit integer")? {
        Some((_, v)) => v,
        None => return Err(raw.err(None, "missing required key `seed`".into())),
    };
    let horizon = match raw.parse_scalar::<usize>("horizon", "an integer >= 2")? {
        Some((line, v)) if v < 2 => {
            return Err(raw.err(Some(line), format!("`horizon` = {v} must be at least 2")))
        }
        Some((_, v)) => v,
        None => 200,
    };
    let window = match raw.parse_scalar::<usize>("window", "an integer >= 1")? {
        Some((line, 0)) => return Err(raw.err(Some(line), "`window` must be at least 1".into())),
        Some((_, v)) => v,
        None => 10,
    };
    let tol_consensus = match raw.parse_scalar::<f64>("tol_consensus", "a positive real")? {
        Some((line, v)) if v <= 0.0 || v.is_nan() => {
            return Err(raw.err(Some(line), format!("`tol_consensus` = {v} must be positive")))
        }
        Some((_, v)) => v,
        None => 1e-9,
    };
    let tol_containment = match raw.parse_scalar::<f64>("tol_containment", "a positive real")? {
        Some((line, v)) if v <= 0.0 || v.is_nan() => {
            return Err(raw.err(Some(line), format!("`tol_containment` = {v} must be positive")))
        }
        Some((_, v)) => v,
        None => 1e-6,
    };

    let init_mode = match raw.take("init_mode") {
        None => InitMode::UniformYEqualsX,
        Some(e) => match e.value.as_str() {
            "uniform_y_equals_x" => InitMode::UniformYEqualsX,
            "uniform_independent" => InitMode::UniformIndependent,
            "explicit" => InitMode::Explicit,
            other => {
                return Err(raw.err(
                    Some(e.line),
                    format!(
                        "`init_mode` must be one of uniform_y_equals_x, \
                         uniform_independent, explicit; found `{other}`"
                    ),
                ))
            }
        },
    };

    let x0 = raw.parse_list::<f64>("x0", "reals")?;
    let y0 = raw.parse_list::<f64>("y0", "reals")?;
    let (x0, y0) = match init_mode {
        InitMode::Explicit => {
            let Some((x_line, x)) = x0 else {
                return Err(raw.err(None, "init_mode explicit requires `x0`".into()));
            };
            let Some((y_line, y)) = y0 else {
                return Err(raw.err(None, "init_mode explicit requires `y0`".into()));
            };
            for (line, name, v) in [(x_line, "x0", &x), (y_line, "y0", &y)] {
                if v.len() != n {
                    return Err(raw.err(
                        Some(line),
                        format!("`{name}` has {} entries, expected n = {n}", v.len()),
                    ));
                }
                for &value in v.iter() {
                    check_unit(raw, line, name, value)?;
                }
            }
            (Some(x), Some(y))
        }
        _ => {
            if let Some((line, _)) = x0 {
                return Err(raw.err(
                    Some(line),
                    format!("`x0` is only valid with init_mode explicit (have {})", init_mode.as_str()),
                ));
            }
            if let Some((line, _)) = y0 {
                return Err(raw.err(
                    Some(line),
                    format!("`y0` is only valid with init_mode explicit (have {})", init_mode.as_str()),
                ));
            }
            (None, None)
        }
    };

    let mut outputs = OutputFlags::default();
    if let Some((_, v)) = parse_bool(raw, "trajectory_csv")? {
        outputs.trajectory_csv = v;
    }
    if let Some((_, v)) = parse_bool(raw, "matrices_csv")? {
        outputs.matrices_csv = v;
    }
    if let Some((_, v)) = parse_bool(raw, "graphs_dot")? {
        outputs.graphs_dot = v;
    }
    if let Some((_, v)) = parse_bool(raw, "report_json")? {
        outputs.report_json = v;
    }

    Ok(RunConfig {
        n,
        epsilon: f64::NAN, // placeholders, filled by the callers
        phi: f64::NAN,
        seed,
        horizon,
        tol_consensus,
        tol_containment,
        window,
        init_mode,
        x0,
        y0,
        outputs,
    })
}

fn parse_bool(raw: &mut Raw, key: &str) -> Result<Option<(usize, bool)>, ConfigError> {
    match raw.take(key) {
        None => Ok(None),
        Some(e) => match e.value.as_str() {
            "true" => Ok(Some((e.line, true))),
            "false" => Ok(Some((e.line, false))),
            other => Err(raw.err(
                Some(e.line),
                format!("`{key}` must be true or false, found `{other}`"),
            )),
        },
    }
}

/// Parses and validates a single-run configuration.
pub fn parse_run_config(text: &str, file: &str) -> Result<RunConfig, ConfigError> {
    let mut raw = Raw::parse(text, file)?;
    for grid_key in ["epsilon_grid", "phi_grid", "seeds"] {
        if let Some(e) = raw.take(grid_key) {
            return Err(raw.err(
                Some(e.line),
                format!("`{grid_key}` is a sweep key; use the sweep command"),
            ));
        }
    }
    let mut cfg = parse_common(&mut raw)?;
    let epsilon = match raw.parse_scalar::<f64>("epsilon", "a real in [0, 1]")? {
        Some((line, v)) => {
            check_unit(&raw, line, "epsilon", v)?;
            v
        }
        None => return Err(raw.err(None, "missing required key `epsilon`".into())),
    };
    let phi = match raw.parse_scalar::<f64>("phi", "a real in [0, 1]")? {
        Some((line, v)) => {
            check_unit(&raw, line, "phi", v)?;
            v
        }
        None => return Err(raw.err(None, "missing required key `phi`".into())),
    };
    raw.finish()?;
    cfg.epsilon = epsilon;
    cfg.phi = phi;
    Ok(cfg)
}

/// Parses and validates a sweep configuration.
pub fn parse_sweep_config(text: &str, file: &str) -> Result<SweepConfig, ConfigError> {
    let mut raw = Raw::parse(text, file)?;
    for fixed_key in ["epsilon", "phi"] {
        if let Some(e) = raw.take(fixed_key) {
            return Err(raw.err(
                Some(e.line),
                format!("`{fixed_key}` is fixed per run; sweeps take `{fixed_key}_grid`"),
            ));
        }
    }
    let epsilon_grid = match raw.parse_list::<f64>("epsilon_grid", "reals in [0, 1]")? {
        Some((line, v)) => {
            if v.is_empty() {
                return Err(raw.err(Some(line), "`epsilon_grid` must not be empty".into()));
            }
            for &value in &v {
                check_unit(&raw, line, "epsilon_grid", value)?;
            }
            v
        }
        None => return Err(raw.err(None, "missing required key `epsilon_grid`".into())),
    };
    let phi_grid = match raw.parse_list::<f64>("phi_grid", "reals in [0, 1]")? {
        Some((line, v)) => {
            if v.is_empty() {
                return Err(raw.err(Some(line), "`phi_grid` must not be empty".into()));
            }
            for &value in &v {
                check_unit(&raw, line, "phi_grid", value)?;
            }
            v
        }
        None => return Err(raw.err(None, "missing required key `phi_grid`".into())),
    };
    let seeds = match raw.parse_list::<u64>("seeds", "unsigned integers")? {
        Some((line, v)) => {
            if v.is_empty() {
                return Err(raw.err(Some(line), "`seeds` must not be empty".into()));
            }
            v
        }
        None => return Err(raw.err(None, "missing required key `seeds`".into())),
    };
    let mut base = parse_common(&mut raw)?;
    raw.finish()?;
    // base epsilon/phi are never read by sweep cells, but keep them valid
    base.epsilon = epsilon_grid[0];
    base.phi = phi_grid[0];
    Ok(SweepConfig {
        base,
        epsilon_grid,
        phi_grid,
        seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "n = 10\nepsilon = 0.3\nphi = 0.5\nseed = 42\n";

    #[test]
    fn minimal_run_config_gets_defaults() {
        let cfg = parse_run_config(MINIMAL, "test.cfg").unwrap();
        assert_eq!(cfg.n, 10);
        assert_eq!(cfg.epsilon, 0.3);
        assert_eq!(cfg.phi, 0.5);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.horizon, 200);
        assert_eq!(cfg.window, 10);
        assert_eq!(cfg.tol_consensus, 1e-9);
        assert_eq!(cfg.tol_containment, 1e-6);
        assert_eq!(cfg.init_mode, InitMode::UniformYEqualsX);
        assert!(cfg.outputs.report_json && cfg.outputs.trajectory_csv);
        assert!(!cfg.outputs.matrices_csv && !cfg.outputs.graphs_dot);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# scenario\n\nn = 3 # agents\nepsilon = 0.1\nphi = 0.5\nseed = 7\n";
        assert!(parse_run_config(text, "c").is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_run_config("n = 10\nepsilon 0.3\n", "c").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.message.contains("key = value"));

        let err = parse_run_config("n = ten\nepsilon = 0.3\nphi = 0.5\nseed = 1\n", "c")
            .unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("`n`"));

        let err =
            parse_run_config("n = 2\nepsilon = 1.5\nphi = 0.5\nseed = 1\n", "c").unwrap_err();
        assert_eq!(err.line, Some(2));

        let err = parse_run_config(&format!("{MINIMAL}horzon = 5\n"), "c").unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.message.contains("unknown key"));

        let err = parse_run_config(&format!("{MINIMAL}n = 11\n"), "c").unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn missing_required_keys_are_reported() {
        let err = parse_run_config("epsilon = 0.3\nphi = 0.5\nseed = 1\n", "c").unwrap_err();
        assert!(err.message.contains("`n`"));
        let err = parse_run_config("n = 2\nphi = 0.5\nseed = 1\n", "c").unwrap_err();
        assert!(err.message.contains("`epsilon`"));
    }

    #[test]
    fn explicit_init_requires_matching_vectors() {
        let good = "n = 2\nepsilon = 0.3\nphi = 0.5\nseed = 1\ninit_mode = explicit\n\
                    x0 = 0.1, 0.9\ny0 = 0.2, 0.8\n";
        let cfg = parse_run_config(good, "c").unwrap();
        assert_eq!(cfg.x0, Some(vec![0.1, 0.9]));
        assert_eq!(cfg.y0, Some(vec![0.2, 0.8]));

        let short = "n = 3\nepsilon = 0.3\nphi = 0.5\nseed = 1\ninit_mode = explicit\n\
                     x0 = 0.1, 0.9\ny0 = 0.2, 0.8, 0.5\n";
        let err = parse_run_config(short, "c").unwrap_err();
        assert_eq!(err.line, Some(6));

        let range = "n = 2\nepsilon = 0.3\nphi = 0.5\nseed = 1\ninit_mode = explicit\n\
                     x0 = 0.1, 1.9\ny0 = 0.2, 0.8\n";
        assert!(parse_run_config(range, "c").is_err());

        let stray = format!("{MINIMAL}x0 = 0.1\n");
        let err = parse_run_config(&stray, "c").unwrap_err();
        assert!(err.message.contains("only valid with init_mode explicit"));
    }

    #[test]
    fn run_config_rejects_sweep_keys_and_vice_versa() {
        let err = parse_run_config(&format!("{MINIMAL}seeds = 1,2\n"), "c").unwrap_err();
        assert!(err.message.contains("sweep key"));

        let sweep_text = "n = 10\nseed = 42\nepsilon_grid = 0.05, 0.3\nphi_grid = 0.5\nseeds = 1, 2, 3\n";
        let cfg = parse_sweep_config(sweep_text, "c").unwrap();
        assert_eq!(cfg.epsilon_grid, vec![0.05, 0.3]);
        assert_eq!(cfg.phi_grid, vec![0.5]);
        assert_eq!(cfg.seeds, vec![1, 2, 3]);

        let err = parse_sweep_config(&format!("epsilon = 0.3\n{sweep_text}"), "c").unwrap_err();
        assert!(err.message.contains("sweeps take"));

        let err = parse_sweep_config("n = 10\nseed = 42\nphi_grid = 0.5\nseeds = 1\n", "c")
            .unwrap_err();
        assert!(err.message.contains("`epsilon_grid`"));
    }

    #[test]
    fn bool_flags_parse_strictly() {
        let cfg = parse_run_config(&format!("{MINIMAL}graphs_dot = true\nreport_json = false\n"), "c")
            .unwrap();
        assert!(cfg.outputs.graphs_dot);
        assert!(!cfg.outputs.report_json);

        let err = parse_run_config(&format!("{MINIMAL}graphs_dot = yes\n"), "c").unwrap_err();
        assert_eq!(err.line, Some(5));
    }
}
