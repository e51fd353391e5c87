use clap::{Parser, Subcommand};
use contactflow::config::Config;
use contactflow::experiments::{self, Lab};
use contactflow::io;
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical laboratory for planar mean curvature flow with a constant
/// contact angle and its phase-field approximation.
#[derive(Parser)]
#[command(name = "contactflow", version, about)]
struct Cli {
    /// Configuration file (flat `key = value` sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON/snapshot files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Concurrent width runs in the sweep commands.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sampled invariant suites for the configured setup.
    Validate,
    /// Build the calibration triple and check every condition.
    Calibrate,
    /// Run the phase-field solver and export energies and snapshots.
    Simulate,
    /// Measure how the initial relative energy and bulk error scale.
    Prepare,
    /// Width sweep with L1 convergence-rate and growth-constant fits.
    Converge,
}

fn load_config(cli: &Cli) -> Result<Config, experiments::AnyError> {
    match &cli.config {
        Some(path) => Config::from_file(path).map_err(|e| -> experiments::AnyError {
            format!("{}: {e}", path.display()).into()
        }),
        None => Ok(Config::from_text("[sigma]\nalpha = pi/2\n[interface]\nkind = diameter\n")
            .expect("builtin default config")),
    }
}

fn run(cli: Cli) -> Result<bool, experiments::AnyError> {
    let cfg = load_config(&cli)?;
    let lab = Lab::new(cfg)?;
    match cli.command {
        Command::Validate => {
            let lines = experiments::cmd_validate(&lab)?;
            let mut all = true;
            for l in &lines {
                all &= l.pass;
                println!(
                    "{} {}{}",
                    if l.pass { "PASS" } else { "FAIL" },
                    l.name,
                    if l.detail.is_empty() {
                        String::new()
                    } else {
                        format!(" ({})", l.detail)
                    }
                );
            }
            Ok(all)
        }
        Command::Calibrate => {
            let times: Vec<f64> = lab
                .cfg
                .report_fractions
                .iter()
                .map(|f| f * lab.cfg.t_end)
                .collect();
            let outcome = experiments::cmd_calibrate(&lab, &times)?;
            std::fs::create_dir_all(&cli.out)?;
            for (t, rep) in &outcome.reports {
                let json = io::check_report_json(rep);
                let path = cli.out.join(format!("calibration_t{t}.json"));
                io::write_atomic(&path, &serde_json::to_string_pretty(&json)?)?;
                println!("t = {t}: {} samples, fitted c = {:.3e}", rep.total_samples, rep.fitted_c);
                for c in rep.equalities.iter() {
                    println!(
                        "  {} eq {:<34} {:.3e}",
                        if c.value <= lab.cfg.tol_equality { "PASS" } else { "FAIL" },
                        c.name,
                        c.value
                    );
                }
                for c in rep.ratios.iter() {
                    println!("  INFO ratio {:<31} {:.3e}", c.name, c.value);
                }
                for hf in &rep.hard_failures {
                    println!("  FAIL hard {hf}");
                }
            }
            Ok(outcome.pass)
        }
        Command::Simulate => {
            let eps_list = lab.cfg.eps.clone();
            for (i, &eps) in eps_list.iter().enumerate() {
                experiments::cmd_simulate(&lab, &cli.out, eps, i)?;
                println!("simulated eps = {eps}");
            }
            Ok(true)
        }
        Command::Prepare => {
            let rep = experiments::cmd_prepare(&lab)?;
            std::fs::create_dir_all(&cli.out)?;
            let mut csv = io::CsvTable::new("eps,n_rings,E_relEn,E_relEn_boundary,E_bulk");
            csv.meta("identity", lab.cfg.identity())
                .meta("version", env!("CARGO_PKG_VERSION"))
                .meta("slope_total", rep.slope_total)
                .meta("slope_boundary", rep.slope_boundary)
                .meta("slope_bulk", rep.slope_bulk);
            for p in &rep.points {
                csv.row(&[p.eps, p.n_rings as f64, p.rel_energy, p.rel_energy_boundary, p.bulk_error]);
            }
            csv.write(&cli.out.join("preparedness.csv"))?;
            println!(
                "slopes: total {:.3}, boundary {:.3}, bulk {:.3}",
                rep.slope_total, rep.slope_boundary, rep.slope_bulk
            );
            Ok(true)
        }
        Command::Converge => {
            let outcome = experiments::cmd_converge(&lab, cli.threads, true)?;
            experiments::write_converge_outputs(&lab, &cli.out, &outcome)?;
            println!(
                "l1 rate {:.3}{}, sqrt(E0) slope {:.3}, growth constants in [{:.3}, {:.3}]",
                outcome.l1_rate,
                outcome
                    .l1_rate_filtered
                    .map(|f| format!(" (filtered {f:.3})"))
                    .unwrap_or_default(),
                outcome.sqrt_e0_slope,
                outcome.gronwall_spread.0,
                outcome.gronwall_spread.1
            );
            for o in &outcome.per_eps {
                println!(
                    "  eps {:>6}: rings {:>4}, l1(T) = {:.5e}, E0 = {:.5e}, C = {:.3}{}",
                    o.eps,
                    o.n_rings,
                    o.l1_final,
                    o.e0,
                    o.gronwall_c,
                    if o.under_resolved { " [under-resolved]" } else { "" }
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
