use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wrkit::bounds::{wave_steps_heuristic, wave_steps_needed, BoundCurve, BoundKind};
use wrkit::harness::{
    compare_methods, load_config, preset_spec, presets, run_experiment, ExperimentResult,
    ExperimentSpec, HarnessError,
};

#[derive(Parser)]
#[command(name = "wrkit", version, about = "Waveform relaxation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a shipped experiment, or list/print them.
    Preset {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the preset's config instead of running it.
        #[arg(long)]
        print: bool,
        #[arg(long)]
        list: bool,
    },
    /// Evaluate a convergence estimate.
    Bound {
        #[arg(long, value_enum)]
        kind: BoundArg,
        /// `key=value` pairs: widths=1,1,1 nu=1 T=2 kmax=20 (heat) or
        /// widths=... speeds=... T=5 strict=false (wave-steps).
        #[arg(long, num_args = 1.., required = true)]
        params: Vec<String>,
    },
    /// Run several configs that differ only in method settings.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    HeatUnequal,
    HeatEven,
    HeatEqual,
    WaveSteps,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<(), String> {
    match command {
        Command::Run { config, out } => {
            let mut spec = read_spec(&config)?;
            if out.is_some() {
                spec.out = out;
            }
            run_and_report(&spec)
        }
        Command::Preset { name, out, print, list } => {
            if list {
                for p in presets() {
                    println!("{}\t{}s", p.name, p.budget_secs);
                }
                return Ok(());
            }
            let name = name.ok_or("give a preset name or --list")?;
            if print {
                let p = wrkit::harness::find_preset(&name).map_err(|e| e.to_string())?;
                print!("{}", p.text());
                return Ok(());
            }
            let mut spec = preset_spec(&name).map_err(|e| e.to_string())?;
            spec.out = Some(out.unwrap_or_else(|| PathBuf::from("out")));
            run_and_report(&spec)
        }
        Command::Bound { kind, params } => bound(kind, &params),
        Command::Compare { configs, out } => {
            let specs = configs.iter().map(read_spec).collect::<Result<Vec<_>, _>>()?;
            let table = compare_methods(&specs).map_err(|e| e.to_string())?;
            let csv = table.to_csv();
            print!("{csv}");
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                let path = dir.join("compare.csv");
                fs::write(&path, csv).map_err(|e| e.to_string())?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn read_spec(path: &PathBuf) -> Result<ExperimentSpec, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_config(&text).map_err(|e: HarnessError| format!("{}: {e}", path.display()))
}

fn run_and_report(spec: &ExperimentSpec) -> Result<(), String> {
    let r: ExperimentResult = run_experiment(spec).map_err(|e| e.to_string())?;
    let converged = r.report.converged_at.map_or("no".to_string(), |k| format!("at iteration {k}"));
    println!("{}: {} iterations, converged {converged}", spec.name, r.report.iterations());
    println!("initial error {:e}, final error {:e}", r.report.initial_max(), r.report.max.last().copied().unwrap_or(0.0));
    if let Some(dir) = &spec.out {
        println!("wrote {}/{}.csv and .manifest.txt", dir.display(), spec.name);
    } else {
        print!("{}", r.csv);
    }
    Ok(())
}

fn bound(kind: BoundArg, params: &[String]) -> Result<(), String> {
    let mut map = HashMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("`{p}` is not key=value"))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    let list = |key: &str| -> Result<Vec<f64>, String> {
        let v = map.get(key).ok_or_else(|| format!("missing parameter `{key}`"))?;
        v.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number")))
            .collect()
    };
    let scalar = |key: &str, default: Option<f64>| -> Result<f64, String> {
        match map.get(key) {
            Some(v) => v.parse().map_err(|_| format!("`{v}` is not a number")),
            None => default.ok_or_else(|| format!("missing parameter `{key}`")),
        }
    };
    let widths = list("widths")?;
    let t_end = scalar("T", None)?;
    let kind = match kind {
        BoundArg::WaveSteps => {
            let speeds = list("speeds")?;
            let strict = map.get("strict").is_some_and(|v| v == "true");
            let k = wave_steps_needed(t_end, &widths, &speeds, strict).map_err(|e| e.to_string())?;
            println!("{k}");
            if wave_steps_heuristic(&speeds) {
                eprintln!("note: speeds differ between subdomains; count is heuristic");
            }
            return Ok(());
        }
        BoundArg::HeatUnequal => BoundKind::HeatUnequal,
        BoundArg::HeatEven => BoundKind::HeatEven,
        BoundArg::HeatEqual => BoundKind::HeatEqual,
    };
    let nu = scalar("nu", Some(1.0))?;
    let k_max = scalar("kmax", Some(20.0))? as u32;
    let curve = BoundCurve::evaluate(kind, &widths, nu, t_end, k_max).map_err(|e| e.to_string())?;
    println!("k,bound");
    for (k, v) in curve.ks.iter().zip(&curve.values) {
        println!("{k},{v:?}");
    }
    Ok(())
}
