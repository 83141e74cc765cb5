use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::Deserialize;
use uqdecomp::simulate::{check_schedule, DEFAULT_SCHEDULE};
use uqdecomp::{
    aleatoric_bounds, decompose, ensemble_decompose, parse_matrix, validate, BayesState64,
    Categorical64, DistributionSpec, EngineConfig, EnsemblePrediction64, LearningCurve, Scale,
    SecondOrder64,
};

use crate::args::{Cli, Command, Format, GlobalOpts};
use crate::output::{curve_csv, json, records_csv, CurveRow, Record};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or parameters (exit 2).
    Input(String),
    /// Numerical engine failure (exit 3).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<uqdecomp::Error> for CliError {
    fn from(e: uqdecomp::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    let config = engine_config(g)?;
    let scale = Scale::new(g.unit.into(), !g.raw);
    let rendered = match &cli.command {
        Command::Eval { spec, name } => {
            let spec = parse_spec(&read_input(spec)?)?;
            let record = eval_record(name, &spec, scale, &config)?;
            render_records(g.format, &[record], false)
        }
        Command::Panel { panels } => {
            let set = match panels {
                Some(path) => load_panels(path)?,
                None => default_panels(),
            };
            let records = set
                .iter()
                .map(|p| eval_record(&p.name, &p.spec, scale, &config))
                .collect::<CliResult<Vec<_>>>()?;
            render_records(g.format, &records, true)
        }
        Command::Curve {
            theta,
            prior,
            schedule,
            replications,
        } => {
            let theta_star =
                Categorical64::from_f64(theta).map_err(|e| input(format!("--theta: {e}")))?;
            let prior = match prior {
                Some(p) => {
                    BayesState64::new(p.clone()).map_err(|e| input(format!("--prior: {e}")))?
                }
                None => BayesState64::uniform(theta_star.k())?,
            };
            let schedule = schedule
                .clone()
                .unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
            check_schedule(&schedule).map_err(|e| input(format!("--schedule: {e}")))?;
            let curve = LearningCurve {
                theta_star,
                prior,
                schedule,
                replications: *replications,
                seed: g.seed,
                scale,
            }
            .run()?;
            let rows: Vec<CurveRow> = curve.iter().map(CurveRow::from).collect();
            match g.format {
                Format::Csv => curve_csv(&rows),
                Format::Json => json(&rows),
            }
        }
        Command::Ensemble { file } => {
            let text = read_input(file)?;
            let ensemble = parse_ensemble(&text)?;
            let triple = ensemble_decompose(&ensemble, scale);
            let bounds = ensemble
                .to_second_order()
                .map(|q| aleatoric_bounds(&q, scale))?;
            let mut record = Record::new(
                format!("ensemble_M{}_K{}", ensemble.len(), ensemble.k()),
                &triple,
                &bounds,
            );
            record.members = Some(ensemble.len());
            record.k = Some(ensemble.k());
            render_records(g.format, &[record], false)
        }
    };
    write_output(g, &rendered)
}

fn engine_config(g: &GlobalOpts) -> CliResult<EngineConfig> {
    let config = EngineConfig {
        tolerance: g.tolerance,
        mc_samples: g.mc_samples,
        seed: g.seed,
        ..EngineConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Inline JSON if the argument starts with `{`, standard input for `-`,
/// otherwise a file path.
fn read_input(arg: &str) -> CliResult<String> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| input(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(arg).map_err(|e| input(format!("reading {arg}: {e}")))
}

fn parse_spec(text: &str) -> CliResult<DistributionSpec> {
    serde_json::from_str(text).map_err(|e| input(format!("invalid distribution spec: {e}")))
}

fn eval_record(
    name: &str,
    spec: &DistributionSpec,
    scale: Scale,
    config: &EngineConfig,
) -> CliResult<Record> {
    let q: SecondOrder64 = validate(spec).map_err(|e| input(format!("{name}: {e}")))?;
    let triple = decompose(&q, scale, config)?;
    let bounds = aleatoric_bounds(&q, scale);
    Ok(Record::new(name, &triple, &bounds))
}

fn parse_ensemble(text: &str) -> CliResult<EnsemblePrediction64> {
    if text.trim_start().starts_with('{') {
        let spec = parse_spec(text)?;
        let DistributionSpec::Ensemble { members } = spec else {
            return Err(input("expected a JSON spec of kind \"ensemble\""));
        };
        return EnsemblePrediction64::from_rows(&members).map_err(|e| input(e.to_string()));
    }
    parse_matrix(text).map_err(|e| input(e.to_string()))
}

fn render_records(format: Format, records: &[Record], as_list: bool) -> String {
    match format {
        Format::Csv => records_csv(records),
        Format::Json if as_list => json(records),
        Format::Json => json(&records[0]),
    }
}

fn write_output(g: &GlobalOpts, text: &str) -> CliResult<()> {
    match &g.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| input(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Panel {
    pub name: String,
    pub spec: DistributionSpec,
}

fn load_panels(path: &Path) -> CliResult<Vec<Panel>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("reading {}: {e}", path.display())))?;
    let panels: Vec<Panel> =
        serde_json::from_str(&text).map_err(|e| input(format!("invalid panel file: {e}")))?;
    if panels.is_empty() {
        return Err(input("panel file lists no panels"));
    }
    if let Some(p) = panels.iter().find(|p| p.name.contains([',', '\n', '"'])) {
        return Err(input(format!(
            "panel name {:?} cannot appear in CSV",
            p.name
        )));
    }
    Ok(panels)
}

/// Uniform on [0,1], Dirac at ½, uniforms on [0.3,1], [0.3,0.7], [0.6,1],
/// and the equal mixture of Diracs at 0 and 1.
pub fn default_panels() -> Vec<Panel> {
    let interval = |lo, hi| DistributionSpec::IntervalUniform { lo, hi };
    let point = |t: f64| DistributionSpec::Point {
        theta: vec![t, 1.0 - t],
    };
    vec![
        Panel {
            name: "uniform_full".into(),
            spec: interval(0.0, 1.0),
        },
        Panel {
            name: "dirac_half".into(),
            spec: point(0.5),
        },
        Panel {
            name: "uniform_03_10".into(),
            spec: interval(0.3, 1.0),
        },
        Panel {
            name: "uniform_03_07".into(),
            spec: interval(0.3, 0.7),
        },
        Panel {
            name: "uniform_06_10".into(),
            spec: interval(0.6, 1.0),
        },
        Panel {
            name: "dirac_mixture_01".into(),
            spec: DistributionSpec::Mixture {
                weights: vec![0.5, 0.5],
                components: vec![point(1.0), point(0.0)],
            },
        },
    ]
}
