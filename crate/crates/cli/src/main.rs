//! `qhje` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain or bracket error,
//! 3 solver error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qhje::figures::{figure_data, FigureSeries};
use qhje::io::{action_table, coarse_table, eigen_table, momentum_table, study_table, Table};
use qhje::limits::{
    classical_reference, coarse_grain, coarse_grain_field, convergence_study, level_bracket,
    level_energy, SourceKind, DEFAULT_BINS,
};
use qhje::qhj::{
    default_seed, far_point, general_solution_ho, integrate_x, integrate_xe, integrate_y_forbidden,
    special_field_ho, MomentumSeries, Provenance,
};
use qhje::spectrum::{find_eigenvalue, find_eigenvalues, scan_brackets, shooting_oracle, Method};
use qhje::{linspace, EnergySlice, PotentialModel, Region};

use config::{check_grid, parse_levels, parse_range, FileConfig, RunConfig};

const DEFAULT_GRID: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "qhje",
    version,
    about = "Quantum Hamilton-Jacobi solutions of one-dimensional bound states"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// harmonic, quartic or polynomial
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    m: Option<f64>,
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Polynomial coefficients c0,c1,... of V = sum c_k x^k
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    coefficients: Option<Vec<f64>>,
    /// Output file; standard output when absent
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalue table
    Eigen {
        /// Level N or inclusive range A..B
        #[arg(long)]
        n: Option<String>,
        /// Single energy bracket LO:HI
        #[arg(long, allow_hyphen_values = true, conflicts_with = "scan")]
        bracket: Option<String>,
        /// Energy range LO:HI scanned for sign changes
        #[arg(long, allow_hyphen_values = true)]
        scan: Option<String>,
        /// Energies sampled by --scan
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Matching)]
        method: MethodArg,
    },
    /// Data series of figure ID (1 to 11)
    Figure { id: u8 },
    /// Action field X, X', X'', Y, Y' of one level
    Action {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = RegionArg::II)]
        region: RegionArg,
        /// Add the energy derivative X_E (region II only)
        #[arg(long)]
        xe: bool,
    },
    /// Quantum momentum of one level across region II
    Momentum {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value_t = PathArg::General)]
        path: PathArg,
    },
    /// Coarse-grained field component against its classical counterpart
    Coarse {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value = "momentum-re")]
        source: String,
    },
    /// Coarse-graining deviations over several levels
    Study {
        /// Comma-separated levels, or A..B
        #[arg(long, default_value = "6,20,60")]
        n: String,
        #[arg(long)]
        bins: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Matching,
    Shooting,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[allow(clippy::upper_case_acronyms)]
enum RegionArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PathArg {
    Special,
    General,
    Classical,
}

enum Failure {
    Usage(String),
    Lib(qhje::Error),
}

impl From<qhje::Error> for Failure {
    fn from(e: qhje::Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage<T>(r: Result<T, String>) -> Outcome<T> {
    r.map_err(Failure::Usage)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { 2 } else { 3 })
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let g = &cli.global;
    let file = match &g.config {
        Some(p) => usage(FileConfig::load(p))?,
        None => FileConfig::default(),
    };
    let flags = FileConfig {
        model: g.model.clone(),
        m: g.m,
        omega: g.omega,
        lambda: g.lambda,
        hbar: g.hbar,
        coefficients: g.coefficients.clone(),
        out: g.out.clone(),
        format: g.format.clone(),
        ..Default::default()
    };
    let rc = usage(RunConfig::build(&file, &flags))?;
    let model = rc.potential()?;
    let grid = |flag: Option<usize>| usage(check_grid(flag.or(file.grid).unwrap_or(DEFAULT_GRID)));
    let level = |flag: Option<usize>| -> Outcome<usize> {
        match flag {
            Some(n) => Ok(n),
            None => match &file.n {
                Some(s) => match usage(parse_levels(s))?.as_slice() {
                    [n] => Ok(*n),
                    _ => Err(Failure::Usage(format!(
                        "this command takes a single level, got '{s}'"
                    ))),
                },
                None => Ok(0),
            },
        }
    };

    match cli.command {
        Command::Eigen {
            n,
            bracket,
            scan,
            points,
            method,
        } => {
            let method = match method {
                MethodArg::Matching => Method::Matching,
                MethodArg::Shooting => Method::ShootingOracle,
            };
            let bracket = bracket.or_else(|| {
                if scan.is_none() {
                    file.bracket.clone()
                } else {
                    None
                }
            });
            let rows = if let Some(b) = bracket {
                let b = usage(parse_range(&b))?;
                vec![match method {
                    Method::Matching => find_eigenvalue(&model, b)?,
                    Method::ShootingOracle => shooting_oracle(&model, b)?,
                }]
            } else if let Some(s) = scan {
                let (lo, hi) = usage(parse_range(&s))?;
                let brackets = scan_brackets(&model, lo, hi, points)?;
                find_eigenvalues(&model, &brackets, method)?
            } else {
                let levels = usage(parse_levels(
                    n.as_deref().or(file.n.as_deref()).unwrap_or("0"),
                ))?;
                let brackets = levels
                    .iter()
                    .map(|&k| level_bracket(&model, k))
                    .collect::<qhje::Result<Vec<_>>>()?;
                find_eigenvalues(&model, &brackets, method)?
            };
            emit(&[(None, eigen_table(&model, &rows))], &rc)
        }
        Command::Figure { id } => {
            let series = figure_data(&model, id)?;
            let named: Vec<_> = series
                .into_iter()
                .map(|FigureSeries { suffix, table }| (suffix, table))
                .collect();
            emit(&named, &rc)
        }
        Command::Action {
            n,
            grid: g,
            region,
            xe,
        } => {
            let n = level(n)?;
            let samples = grid(g)?;
            let s = level_slice(&model, n)?;
            let field = match region {
                RegionArg::II => {
                    let pts = linspace(s.x1, s.x2, samples);
                    let f = integrate_x(&s, &default_seed(&s)?, &pts)?;
                    if xe {
                        integrate_xe(&f, &pts)?
                    } else {
                        f
                    }
                }
                RegionArg::I | RegionArg::III => {
                    if xe {
                        return Err(Failure::Usage("--xe applies to region II only".into()));
                    }
                    let (side, pts) = if matches!(region, RegionArg::I) {
                        (
                            Region::I,
                            linspace(far_point(&s, Region::I)?, s.x1, samples),
                        )
                    } else {
                        (
                            Region::III,
                            linspace(s.x2, far_point(&s, Region::III)?, samples),
                        )
                    };
                    integrate_y_forbidden(&s, side, &pts)?
                }
            };
            emit(&[(None, action_table(&field))], &rc)
        }
        Command::Momentum { n, grid: g, path } => {
            let n = level(n)?;
            let samples = grid(g)?;
            let s = level_slice(&model, n)?;
            let pts = linspace(s.x1, s.x2, samples);
            let p = match path {
                PathArg::Special => {
                    let f = special_field_ho(n, &model, &pts)?;
                    MomentumSeries {
                        grid: f.grid,
                        re: f.real_d1,
                        im: f.imag_d1,
                        provenance: Provenance::Special,
                    }
                }
                PathArg::General if model.omega().is_some() => {
                    general_solution_ho(n, &model, &pts, None, None)?.1
                }
                PathArg::General => integrate_x(&s, &default_seed(&s)?, &pts)?.momentum(),
                PathArg::Classical => MomentumSeries::classical(&s, &pts),
            };
            emit(&[(None, momentum_table(&s, &p))], &rc)
        }
        Command::Coarse {
            n,
            grid: g,
            bins,
            source,
        } => {
            let n = level(n)?;
            let kind: SourceKind = source.parse()?;
            let bins = bins.or(file.bins).unwrap_or(DEFAULT_BINS);
            if bins == 0 {
                return Err(Failure::Usage("--bins must be positive".into()));
            }
            let samples = grid(g.or(Some(qhje::limits::study_samples(n))))?;
            let s = level_slice(&model, n)?;
            let pts = linspace(s.x1, s.x2, samples);
            let coarse = if kind == SourceKind::Density {
                density_coarse(&model, &s, n, &pts, bins)?
            } else {
                let f = integrate_x(&s, &default_seed(&s)?, &pts)?;
                let f = if kind == SourceKind::EnergyDerivative {
                    integrate_xe(&f, &pts)?
                } else {
                    f
                };
                coarse_grain_field(&f, kind, bins)?
            };
            let reference = classical_reference(&s, &coarse)?;
            emit(&[(None, coarse_table(&s, &coarse, Some(&reference)))], &rc)
        }
        Command::Study { n, bins } => {
            let levels = if n.contains("..") {
                usage(parse_levels(&n))?
            } else {
                n.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Failure::Usage(format!("bad level list '{n}'")))
                    })
                    .collect::<Outcome<Vec<_>>>()?
            };
            let rows = convergence_study(&model, &levels, bins.or(file.bins));
            emit(&[(None, study_table(&model, &rows))], &rc)
        }
    }
}

fn level_slice(model: &PotentialModel, n: usize) -> qhje::Result<EnergySlice> {
    model.slice(level_energy(model, n)?)
}

/// Coarse `|ψ|²` of an oscillator level over region II.
fn density_coarse(
    model: &PotentialModel,
    s: &EnergySlice,
    n: usize,
    pts: &[f64],
    bins: usize,
) -> qhje::Result<qhje::limits::CoarseSeries> {
    let st = qhje::qhj::OscillatorState::new(model, n)?;
    let rho: Vec<f64> = pts.iter().map(|&x| st.eigenfunction(x).0.powi(2)).collect();
    coarse_grain(
        pts,
        &rho,
        qhje::limits::binning_range(s),
        bins,
        SourceKind::Density,
    )
}

/// Writes each table to standard output, or to `--out` with
/// `stem_suffix.ext` names for the extra series of a figure.
fn emit(tables: &[(Option<&str>, Table)], rc: &RunConfig) -> Outcome<()> {
    match &rc.out {
        None => {
            for (_, t) in tables {
                print!("{}", t.render(rc.format));
            }
            Ok(())
        }
        Some(out) => {
            for (suffix, t) in tables {
                let path = match suffix {
                    None => out.clone(),
                    Some(sfx) => suffixed(out, sfx),
                };
                t.save(&path, rc.format)?;
            }
            Ok(())
        }
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffix_names() {
        assert_eq!(
            suffixed(Path::new("out/fig9.csv"), "classical"),
            PathBuf::from("out/fig9_classical.csv")
        );
        assert_eq!(
            suffixed(Path::new("fig9"), "classical"),
            PathBuf::from("fig9_classical")
        );
    }

    #[test]
    fn parses_commands() {
        let c = Cli::try_parse_from(["qhje", "eigen", "--n", "0..5", "--hbar", "0.5"]).unwrap();
        assert_eq!(c.global.hbar, Some(0.5));
        assert!(Cli::try_parse_from(["qhje", "eigen", "--bracket", "-1:2"]).is_ok());
        assert!(Cli::try_parse_from(["qhje", "figure", "x"]).is_err());
        assert!(Cli::try_parse_from(["qhje", "action", "--region", "IV"]).is_err());
    }
}
