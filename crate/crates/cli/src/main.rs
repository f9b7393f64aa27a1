use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use saas_tco::pricing::sensitivity;
use saas_tco::report::{self, Report};
use saas_tco::scenario::CompareAxis;
use saas_tco::{Error, Scenario};

/// Cost and pricing estimates for migrating a single-tenant application to multi-tenant SaaS.
#[derive(Parser)]
#[command(name = "saas-tco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: forecast, scaling plan, costs, TCO and pricing.
    Estimate(Common),
    /// Scaling plan only.
    Rightscale(Common),
    /// Side-by-side costs along one axis, with deltas against the scenario's own choice.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: Axis,
    },
    /// TCO and price over a grid of multipliers for one parameter.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        /// usage_multiplier, tenant_count_multiplier or rate_multiplier.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated multipliers, e.g. 0.5,1,2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<String>>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Write one CSV file per table into this directory instead of printing text.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Redundancy,
    #[value(name = "vm_type")]
    VmType,
}

impl From<Axis> for CompareAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::Redundancy => CompareAxis::Redundancy,
            Axis::VmType => CompareAxis::VmType,
        }
    }
}

fn parse_grid(raw: &[String]) -> Result<Vec<f64>, Error> {
    raw.iter()
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("--grid: `{v}` is not a number")))
        })
        .collect()
}

fn run(command: Command) -> Result<(Report, Option<PathBuf>), Error> {
    let load = |c: &Common| Scenario::load(&c.scenario);
    Ok(match command {
        Command::Estimate(c) => {
            let s = load(&c)?;
            let e = s.evaluate()?;
            let sens = match &s.sensitivity {
                Some(cfg) => Some(sensitivity(&s, &cfg.parameter, &cfg.grid)?),
                None => None,
            };
            (report::estimate_report(&s, &e, sens.as_ref()), c.csv)
        }
        Command::Rightscale(c) => {
            let s = load(&c)?;
            let e = s.evaluate()?;
            let tables = vec![report::scaling_table(&e.plan, &s.schedule)];
            (Report { tables }, c.csv)
        }
        Command::Compare { common, axis } => {
            let s = load(&common)?;
            let cmp = s.compare(axis.into())?;
            let tables = vec![report::comparison_table(&cmp)];
            (Report { tables }, common.csv)
        }
        Command::Sensitivity {
            common,
            param,
            grid,
        } => {
            let s = load(&common)?;
            let grid = match grid {
                Some(raw) => parse_grid(&raw)?,
                None => s
                    .sensitivity
                    .as_ref()
                    .map(|c| c.grid.clone())
                    .ok_or_else(|| {
                        Error::InvalidArgument(
                            "--grid not given and scenario has no sensitivity.grid".into(),
                        )
                    })?,
            };
            let param = match param {
                Some(p) => p,
                None => s
                    .sensitivity
                    .as_ref()
                    .map(|c| c.parameter.clone())
                    .ok_or_else(|| {
                        Error::InvalidArgument(
                            "--param not given and scenario has no sensitivity.parameter".into(),
                        )
                    })?,
            };
            let result = sensitivity(&s, &param, &grid)?;
            let tables = vec![report::sensitivity_table(&result)];
            (Report { tables }, common.csv)
        }
    })
}

fn emit(report: &Report, csv: Option<&Path>) -> Result<(), Error> {
    match csv {
        Some(dir) => {
            for path in report.write_csv_dir(dir)? {
                println!("{}", path.display());
            }
        }
        None => print!("{}", report.to_text()),
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Csv(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: ").trim());
            return ExitCode::from(1);
        }
    };
    let outcome = run(cli.command).and_then(|(report, csv)| emit(&report, csv.as_deref()));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            for line in err.diagnostics() {
                eprintln!("error: {line}");
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
