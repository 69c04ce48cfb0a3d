use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trawl_cli::{emit_plotdata, load_scenario, run_scenario, simulate_scenario, CliError, Overrides, Scenario, THREADS_ENV};
use trawl_core::stats::trawl_fourth_central_moment;
use trawl_core::sums::limit_constants;
use trawl_core::trawl::acf;

#[derive(Parser)]
#[command(name = "trawl", version, about = "Simulate trawl processes and check their limit theorems")]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunOpts {
    /// Override the scenario's path count.
    #[arg(long)]
    paths: Option<usize>,
    /// Override the scenario's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunOpts {
    fn overrides(&self) -> Overrides {
        Overrides { num_paths: self.paths, master_seed: self.seed }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run scenarios and write `<out>/<name>.csv` and `<out>/<name>.json`.
    Verify {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Also write `<out>/<name>.plot.csv`, optionally for one metric.
        #[arg(long)]
        plotdata: Option<Option<String>>,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Simulate paths on the first grid of a scenario. `.csv` output is
    /// text; anything else is little-endian f64 with a JSON sidecar.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Print the model autocovariance at lags `kΔ` for the first grid.
    Acf {
        scenario: PathBuf,
        #[arg(long, default_value_t = 10)]
        lags: usize,
    },
    /// Print the fourth central moment of `X_t`.
    Moment4 { scenario: PathBuf },
    /// Print the limit constants of the scenario's regime as JSON.
    Constants { scenario: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<Scenario, CliError> {
    load_scenario(path)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be ≥ 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Verify { scenarios, out, plotdata, run } => {
            std::fs::create_dir_all(&out)?;
            let mut all_ok = true;
            for path in &scenarios {
                let sc = load(path)?;
                let report = run_scenario(&sc, run.overrides())?;
                std::fs::write(out.join(format!("{}.csv", sc.name)), report.to_csv())?;
                std::fs::write(out.join(format!("{}.json", sc.name)), report.to_json())?;
                if let Some(metric) = &plotdata {
                    std::fs::write(out.join(format!("{}.plot.csv", sc.name)), emit_plotdata(&report, metric.as_deref())?)?;
                }
                let ok = report.passed();
                all_ok &= ok;
                let failed = report.failed_metrics();
                if ok {
                    println!("{}: PASS", sc.name);
                } else {
                    println!("{}: FAIL ({})", sc.name, failed.join(", "));
                }
            }
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Simulate { scenario, out, run } => {
            let sc = load(&scenario)?;
            let ens = simulate_scenario(&sc, run.overrides())?;
            if out.extension().is_some_and(|e| e == "csv") {
                ens.write_csv(&out, Some(&sc.source))?;
            } else {
                ens.write_binary(&out, Some(&sc.source))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Acf { scenario, lags } => {
            let sc = load(&scenario)?;
            let var = sc.seed.as_ref().ok_or_else(|| CliError::Usage("scenario has no fixed seed".into()))?.variance()?;
            let delta = sc.scheme(sc.n_list[0])?.delta();
            println!("lag,h,acf");
            for k in 0..=lags {
                let h = k as f64 * delta;
                println!("{k},{h},{}", acf(&sc.trawl, var, h));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Moment4 { scenario } => {
            let sc = load(&scenario)?;
            let seed = sc.seed.as_ref().ok_or_else(|| CliError::Usage("scenario has no fixed seed".into()))?;
            let f = trawl_fourth_central_moment(seed, &sc.trawl)?;
            println!("cumulant_form,{}\ndisplayed_form,{}", f.cumulant_form, f.displayed_form);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Constants { scenario } => {
            let sc = load(&scenario)?;
            let spec = sc.regime.regime_spec().ok_or_else(|| CliError::Usage(format!("{} has no limit regime", sc.regime.kind())))?;
            let c = limit_constants(&spec, &sc.trawl, sc.seed())?;
            let json = serde_json::json!({
                "regime": spec.name(),
                "sigma_a2": c.sigma_a2,
                "sigma_a2_displayed": c.sigma_a2_displayed,
                "sigma_kappa2": c.sigma_kappa2,
                "hurst": c.hurst,
                "c_alpha": c.c_alpha,
                "rho_a": c.rho_a,
                "k_plus_kappa": c.k_plus_kappa,
                "k_minus_kappa": c.k_minus_kappa,
                "sigma_zero": c.sigma_zero,
                "rho_zero": c.rho_zero,
                "target_var": c.target_var,
                "target_stable": c.target_stable,
            });
            println!("{}", serde_json::to_string_pretty(&json).expect("json"));
            Ok(ExitCode::SUCCESS)
        }
    }
}
