use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dprupture::dispersion::{classify_parity, dispersion_errors, dispersion_table, interior_symbol, SymbolKind};
use dprupture::sbp::{verify_operator, Family, SbpOperatorSet, SHIPPED};
use dprupture::scenarios::mms::{run_mms, write_mms_csv};
use dprupture::time_driver::{run, RunConfig};
use dprupture::Error;

#[derive(Parser)]
#[command(name = "dprupture", version, about = "SBP finite-difference elastic wave and dynamic rupture solver")]
struct Cli {
    /// Directory for output files (overrides the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads for the right-hand side.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Steps between fault snapshots (overrides the config).
    #[arg(long, global = true)]
    snapshot_stride: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a TOML config.
    Simulate { config: PathBuf },
    /// Check SBP identity, semidefiniteness and accuracy of every shipped operator.
    VerifyOperators,
    /// Print the interior dispersion relation of one operator.
    Dispersion { family: Family, order: usize },
    /// Manufactured-solution convergence study for a config with a [manufactured] section.
    Mms { config: PathBuf },
}

/// Exit status per failure category.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Toml(_) | Error::Unsupported(_) | Error::Scenario(_) => 2,
        Error::Io(_) => 3,
        Error::Divergence { .. } | Error::SolverDivergence { .. } | Error::TensileFault { .. } => 4,
        Error::Construction(_) | Error::ToleranceInfeasible { .. } => 5,
        _ => 1,
    }
}

fn load(cli: &Cli, path: &PathBuf) -> dprupture::Result<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(dir) = &cli.output_dir {
        cfg.output.dir = Some(dir.clone());
    }
    if let Some(stride) = cli.snapshot_stride {
        cfg.output.snapshot_stride = stride;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> dprupture::Result<bool> {
    match &cli.command {
        Command::Simulate { config } => {
            let cfg = load(cli, config)?;
            let out = run(&cfg)?;
            let s = &out.summary;
            println!("{}: {} steps, dt = {:.6e} s", s.name, s.steps, s.dt);
            println!("max slip rate {:.6e} m/s at t = {:.4} s", s.max_slip_rate, s.max_slip_rate_time);
            println!("final slip: max {:.6e} m, mean {:.6e} m", s.final_slip_max, s.final_slip_mean);
            println!("wall time {:.2} s", s.wall_time);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
        Command::VerifyOperators => {
            let mut all = true;
            println!("family       order    n   sbp_residual  max_eig_S+   min_eig_S-  accuracy  ok");
            for (family, order) in SHIPPED {
                for n in [16, 32, 64] {
                    let ops = SbpOperatorSet::build(family, order, n, None)?;
                    let r = verify_operator(&ops);
                    let acc = r.boundary_accuracy.iter().chain(&r.interior_accuracy).fold(0.0f64, |m, v| m.max(*v));
                    println!(
                        "{:<12} {:>5} {:>4} {:>13.3e} {:>12.3e} {:>12.3e} {:>9.2e}  {}",
                        family.to_string(),
                        order,
                        n,
                        r.sbp_residual.unwrap_or(f64::NAN),
                        r.s_plus_max.unwrap_or(f64::NAN),
                        r.s_minus_min.unwrap_or(f64::NAN),
                        acc,
                        if r.verified { "yes" } else { "NO" }
                    );
                    all &= r.verified;
                }
            }
            Ok(all)
        }
        Command::Dispersion { family, order } => {
            let ops = SbpOperatorSet::build(*family, *order, 64, None)?;
            let e = dispersion_errors(&ops)?;
            let parity = classify_parity(&interior_symbol(&ops, SymbolKind::Plus)?)?;
            println!("# {family} order {order}: L2 relative {:.4}%, max relative {:.4}%", 100.0 * e.l2_relative, 100.0 * e.max_relative);
            println!("# parity {:?}, leading order {}, beta {:.4e}", parity.parity, parity.order, parity.beta);
            println!("kh,re,im,relative_error");
            for row in dispersion_table(&ops, 64)? {
                println!("{},{},{},{}", row[0], row[1], row[2], row[3]);
            }
            Ok(true)
        }
        Command::Mms { config } => {
            let cfg = load(cli, config)?;
            let levels = match cfg.manufactured.as_ref().map(|m| m.levels.clone()) {
                Some(l) if !l.is_empty() => l,
                _ => vec![12, 24, 48],
            };
            let rows = run_mms(&cfg, &levels)?;
            write_mms_csv(&rows, std::io::stdout().lock())?;
            if let Some(dir) = &cfg.output.dir {
                std::fs::create_dir_all(dir)?;
                write_mms_csv(&rows, std::fs::File::create(dir.join("mms.csv"))?)?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error [config]: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error [verification]: at least one operator failed its checks");
            ExitCode::from(5)
        }
        Err(e) => {
            let code = exit_code(&e);
            let category = match code {
                2 => "config",
                3 => "io",
                4 => "numerical",
                5 => "verification",
                _ => "internal",
            };
            eprintln!("error [{category}]: {e}");
            ExitCode::from(code)
        }
    }
}
