//! Run configuration: TOML file merged with command-line overrides, then
//! validated as a whole. Validation collects every problem at once instead
//! of stopping at the first.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use torbif_core::bounds::BoundConstants;
use torbif_core::continuation::ContinuationConfig;
use torbif_core::multiplier::MultiplierSpec;
use torbif_core::operator::ProblemSpec;

/// All configuration errors found, reported together.
#[derive(Debug)]
pub struct ConfigError {
    pub messages: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "configuration is invalid:")?;
        for m in &self.messages {
            writeln!(f, "  - {m}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    multiplier: Option<String>,
    s: Option<f64>,
    p: Option<f64>,
    #[serde(alias = "N")]
    n: Option<usize>,
    delta: Option<f64>,
    table: Option<Vec<f64>>,
    m0: Option<f64>,
    m1: Option<f64>,
    kmax: Option<usize>,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    continuation: Option<ContinuationSection>,
    bounds: Option<BoundsSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuationSection {
    ds0: Option<f64>,
    ds_min: Option<f64>,
    ds_max: Option<f64>,
    max_steps: Option<usize>,
    newton_tol: Option<f64>,
    max_corrector_iter: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsSection {
    c_gns: Option<f64>,
    rho: Option<f64>,
    c_rho: Option<f64>,
    a_p1: Option<f64>,
    a_2p: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    format: Option<String>,
}

/// Command-line overrides (all optional; flags win over the file).
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub multiplier: Option<String>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub delta: Option<f64>,
    pub kmax: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub continuation: ContinuationConfig,
    pub bound_constants: BoundConstants,
    pub kmax: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
}

pub fn build_config(
    file: Option<&std::path::Path>,
    flags: &Overrides,
) -> Result<RunConfig, ConfigError> {
    let mut errors = Vec::new();

    let fc: FileConfig = match file {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match toml::from_str(&text) {
                Ok(fc) => fc,
                Err(e) => {
                    errors.push(format!("cannot parse {}: {e}", path.display()));
                    FileConfig::default()
                }
            },
            Err(e) => {
                errors.push(format!("cannot read {}: {e}", path.display()));
                FileConfig::default()
            }
        },
        None => FileConfig::default(),
    };

    let kind = flags
        .multiplier
        .clone()
        .or(fc.multiplier)
        .unwrap_or_else(|| "fractional".into());
    let s = flags.s.or(fc.s).unwrap_or(0.5);
    let p = flags.p.or(fc.p).unwrap_or(2.0);
    let n = flags.n.or(fc.n).unwrap_or(256);
    let delta = flags.delta.or(fc.delta);

    if s < 0.5 {
        errors.push(format!("s = {s} rejected: the analysis requires s >= 1/2"));
    }
    if p < 2.0 {
        errors.push(format!("p = {p} rejected: the analysis requires p >= 2"));
    }
    if n == 0 {
        errors.push("truncation n must be at least 1".into());
    }

    let multiplier = match kind.as_str() {
        "fractional" => {
            let mut spec = MultiplierSpec::fractional(s);
            if let (Some(m0), Some(m1)) = (fc.m0, fc.m1) {
                spec = spec.with_bounds(m0, m1);
            }
            Some(spec)
        }
        "ilw" => match delta {
            Some(d) if d > 0.0 => {
                let mut spec = MultiplierSpec::ilw(s, d);
                if let (Some(m0), Some(m1)) = (fc.m0, fc.m1) {
                    spec = spec.with_bounds(m0, m1);
                }
                Some(spec)
            }
            Some(d) => {
                errors.push(format!("ilw depth delta = {d} must be positive"));
                None
            }
            None => {
                errors.push("multiplier \"ilw\" needs delta".into());
                None
            }
        },
        "table" => match (&fc.table, fc.m0, fc.m1) {
            (Some(values), Some(m0), Some(m1)) if !values.is_empty() => {
                Some(MultiplierSpec::table(s, values.clone(), m0, m1))
            }
            (Some(_), _, _) => {
                // bounds are a stated hypothesis, never inferred from data
                errors.push(
                    "table multiplier needs explicit m0 and m1 (and a non-empty table)".into(),
                );
                None
            }
            _ => {
                errors.push("multiplier \"table\" needs table = [...] plus m0/m1".into());
                None
            }
        },
        other => {
            errors.push(format!(
                "unknown multiplier \"{other}\" (expected fractional, ilw or table)"
            ));
            None
        }
    };

    // hypothesis check happens before any solve touches the symbol
    if let Some(spec) = &multiplier {
        let report = spec.validate(n);
        for v in &report.violations {
            errors.push(format!("multiplier hypothesis violated: {v:?}"));
        }
    }

    let scalars_ok = s >= 0.5 && p >= 2.0 && n >= 1;
    let problem = multiplier.and_then(|spec| {
        if !scalars_ok {
            return None;
        }
        match ProblemSpec::new(spec, p, n) {
            Ok(ps) => Some(ps),
            Err(e) => {
                errors.push(format!("problem construction failed: {e}"));
                None
            }
        }
    });

    let cs = fc.continuation.unwrap_or_default();
    let mut continuation = ContinuationConfig::default();
    if let Some(v) = cs.ds0 {
        continuation.ds0 = v;
    }
    if let Some(v) = cs.ds_min {
        continuation.ds_min = v;
    }
    if let Some(v) = cs.ds_max {
        continuation.ds_max = v;
    }
    if let Some(v) = cs.max_steps {
        continuation.max_steps = v;
    }
    if let Some(v) = cs.newton_tol {
        continuation.newton_tol = v;
    }
    if let Some(v) = cs.max_corrector_iter {
        continuation.max_corrector_iter = v;
    }
    if let Err(e) = continuation.validate() {
        errors.push(e.to_string());
    }

    let bs = fc.bounds.unwrap_or_default();
    let bound_constants = BoundConstants {
        c_gns: bs.c_gns.unwrap_or(1.0),
        rho: bs.rho.unwrap_or(1.0),
        c_rho: bs.c_rho.unwrap_or(1.0),
        a_p1: bs.a_p1.unwrap_or(1.0),
        a_2p: bs.a_2p.unwrap_or(1.0),
    };
    if let Err(e) = bound_constants.validate() {
        errors.push(e.to_string());
    }

    let os = fc.output.unwrap_or_default();
    let out_dir = flags
        .out
        .clone()
        .or(os.dir)
        .unwrap_or_else(|| PathBuf::from("out"));
    let format = match flags
        .format
        .clone()
        .or(os.format)
        .unwrap_or_else(|| "csv".into())
        .as_str()
    {
        "csv" => Some(OutputFormat::Csv),
        "json" => Some(OutputFormat::Json),
        other => {
            errors.push(format!("unknown format \"{other}\" (expected csv or json)"));
            None
        }
    };

    let kmax = flags.kmax.or(fc.kmax).unwrap_or(2);
    let lambda_min = flags.lambda_min.or(fc.lambda_min).unwrap_or(-3.0);
    let lambda_max = flags.lambda_max.or(fc.lambda_max).unwrap_or(5.0);
    if lambda_min >= lambda_max {
        errors.push(format!(
            "lambda range is empty: [{lambda_min}, {lambda_max}]"
        ));
    }

    if !errors.is_empty() {
        return Err(ConfigError { messages: errors });
    }
    Ok(RunConfig {
        problem: problem.expect("validated"),
        continuation,
        bound_constants,
        kmax,
        lambda_min,
        lambda_max,
        out_dir,
        format: format.expect("validated"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "multiplier = \"fractional\"\ns = 0.5\np = 2\nN = 128\n").unwrap();
        let cfg = build_config(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(cfg.problem.n, 128);
        assert_eq!(cfg.kmax, 2);
        assert_eq!(cfg.format, OutputFormat::Csv);
    }

    #[test]
    fn small_s_and_p_rejected_together() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "s = 0.3\np = 1.5\n").unwrap();
        let err = build_config(Some(&path), &Overrides::default()).unwrap_err();
        assert!(err.messages.iter().any(|m| m.contains("s = 0.3")));
        assert!(err.messages.iter().any(|m| m.contains("p = 1.5")));
    }

    #[test]
    fn bad_table_is_surfaced_before_solving() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "multiplier = \"table\"\ntable = [2.0, 1.0]\nm0 = 0.5\nm1 = 3.0\nn = 2\n",
        )
        .unwrap();
        let err = build_config(Some(&path), &Overrides::default()).unwrap_err();
        assert!(err
            .messages
            .iter()
            .any(|m| m.contains("hypothesis violated")));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "s = 0.5\nn = 64\n").unwrap();
        let flags = Overrides {
            n: Some(32),
            s: Some(1.0),
            ..Default::default()
        };
        let cfg = build_config(Some(&path), &flags).unwrap();
        assert_eq!(cfg.problem.n, 32);
        assert_eq!(cfg.problem.s(), 1.0);
    }
}
