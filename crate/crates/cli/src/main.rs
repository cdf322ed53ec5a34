//! `waveguide`: checks the Lieb–Thirring-type bound on trapped-mode Riesz
//! means for preset or configured waveguides and writes JSON/CSV reports.
//!
//! Exit status: 0 all inequalities hold, 2 an inequality is violated beyond
//! the discretization tolerance, 3 the numerical solver failed, 4 bad
//! configuration or arguments.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use waveguide_core::discretize::assemble_geometry;
use waveguide_core::scenario::AsymptoticsTable;
use waveguide_core::{bound_only, run_asymptotics, run_convergence, run_scenario, AsymptoticsConfig, Family, Scenario, ScenarioOutcome};

use config::{load_scenarios, preset_scenario, Preset, PresetArgs};
use output::Artifacts;

const EXIT_VIOLATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "waveguide", version, about = "Trapped modes of perturbed waveguides against Lieb–Thirring-type bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve each scenario on its grid ladder and compare tr H₋^σ with the bound.
    Run {
        #[command(flatten)]
        scenarios: ScenarioArgs,
        /// Also dump the finest operator as `<name>.matrix.coo`.
        #[arg(long)]
        write_matrix: bool,
    },
    /// Grid convergence table with Richardson extrapolation.
    Convergence {
        #[command(flatten)]
        scenarios: ScenarioArgs,
        /// Number of refinement levels (at least 3).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Weak- or strong-coupling table for a one-parameter family.
    Asymptotics {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// Coupling parameters, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Riesz order of the strong family.
        #[arg(long)]
        sigma: Option<f64>,
        /// Transverse cells on the finest level.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the bound side only (no eigensolve).
    BoundOnly {
        #[command(flatten)]
        scenarios: ScenarioArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML file with `[[scenario]]` tables.
    config: Option<PathBuf>,
    /// Built-in scenario instead of a config file.
    #[arg(long, value_enum, conflicts_with = "config")]
    preset: Option<Preset>,
    #[command(flatten)]
    preset_args: PresetArgs,
    /// Riesz orders, comma separated; replaces the configured list.
    #[arg(long, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,
    /// Transverse cells on the finest level; replaces the configured value.
    #[arg(long)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: waveguide_core::Error| e.to_string())
}

impl ScenarioArgs {
    /// Scenarios with overrides applied, all validated before any solve.
    fn scenarios(&self) -> Result<Vec<Scenario>> {
        let mut list = match (&self.config, self.preset) {
            (Some(path), None) => load_scenarios(path)?,
            (None, Some(p)) => vec![preset_scenario(p, &self.preset_args)?],
            (None, None) => bail!("give a config file or --preset"),
            (Some(_), Some(_)) => unreachable!("clap rejects config with --preset"),
        };
        if self.preset.is_none() && self.preset_args_given() {
            bail!("--alpha, --b, --rect, --r and --width need --preset");
        }
        for s in &mut list {
            if let Some(sigma) = &self.sigma {
                s.sigma.clone_from(sigma);
            }
            if let Some(n) = self.grid {
                s.grid.cells_per_width = n;
            }
            s.validate().with_context(|| format!("scenario {}", s.name))?;
        }
        Ok(list)
    }

    fn preset_args_given(&self) -> bool {
        let p = &self.preset_args;
        p.alpha.is_some() || p.b.is_some() || p.rect.is_some() || p.r.is_some() || p.width.is_some()
    }
}

/// Exit status for an error: solver failures anywhere in the chain give 3,
/// everything else is a configuration problem.
fn exit_code_of(err: &anyhow::Error) -> u8 {
    let solver = err
        .chain()
        .filter_map(|c| c.downcast_ref::<waveguide_core::Error>())
        .any(|e| e.is_solver_failure());
    if solver {
        EXIT_SOLVER
    } else {
        EXIT_CONFIG
    }
}

fn print_outcome(out: &ScenarioOutcome) {
    for r in &out.reports {
        let solve = r.diagnostics.solve.as_ref();
        let eps = solve.and_then(|s| s.eps_disc).unwrap_or(0.0);
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        let verdict = match r.slack_ratio {
            None => "bound only",
            Some(_) if r.holds_within(eps) => "holds",
            Some(_) => "VIOLATED",
        };
        println!(
            "{} σ={} bound={:.6} riesz_mean={} slack={} eps_disc={:.1e} eigenvalues={} {verdict}",
            out.name,
            r.sigma,
            r.bound,
            fmt(r.riesz_mean),
            fmt(r.slack_ratio),
            eps,
            solve.map_or("-".to_string(), |s| s.eigenvalues.len().to_string()),
        );
    }
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

/// Runs every scenario even if one fails; the worst status wins.
fn run_each(list: Vec<Scenario>, mut one: impl FnMut(&Scenario) -> Result<u8>) -> u8 {
    let mut status = 0;
    for s in &list {
        match one(s) {
            Ok(code) => status = status.max(code),
            Err(e) => {
                eprintln!("error: scenario {}: {e:#}", s.name);
                status = status.max(exit_code_of(&e));
            }
        }
    }
    status
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run { scenarios, write_matrix } => {
            let list = scenarios.scenarios()?;
            let art = Artifacts::new(&scenarios.out)?;
            Ok(run_each(list, |s| {
                let out = run_scenario(s)?;
                print_outcome(&out);
                let mut paths = art.outcome(&out)?;
                if write_matrix || s.output.write_matrix {
                    if let Some(level) = out.finest() {
                        let op = assemble_geometry(&s.geometry, 0, &level.grid)?;
                        paths.push(art.matrix(&s.name, |w| op.write_coo(w))?);
                    }
                }
                report_paths(&paths);
                Ok(if out.holds() { 0 } else { EXIT_VIOLATION })
            }))
        }
        Command::Convergence { scenarios, levels } => {
            let list = scenarios.scenarios()?;
            let art = Artifacts::new(&scenarios.out)?;
            Ok(run_each(list, |s| {
                let mut s = s.clone();
                s.grid.levels = levels;
                let t = run_convergence(&s)?;
                for l in &t.levels {
                    println!(
                        "{} cells={} ground={:.10} threshold={:.10} bound_states={}",
                        t.name,
                        l.cells_per_width,
                        l.ground,
                        l.discrete_threshold,
                        l.bound_states.len()
                    );
                }
                let order = t.ground.observed_order.map_or("-".to_string(), |p| format!("{p:.3}"));
                println!(
                    "{} limit ground={:.10} (error {:.1e}, observed order {order})",
                    t.name, t.ground.limit, t.ground.error_estimate
                );
                report_paths(&art.convergence(&format!("{}-convergence", s.name), &t)?);
                Ok(0)
            }))
        }
        Command::Asymptotics {
            family,
            alphas,
            sigma,
            grid,
            out,
        } => {
            let mut cfg = AsymptoticsConfig {
                family,
                ..AsymptoticsConfig::default()
            };
            if family == Family::Strong {
                cfg.alphas = vec![10.0, 20.0, 40.0];
            }
            if let Some(a) = alphas {
                cfg.alphas = a;
            }
            if let Some(s) = sigma {
                cfg.sigma = s;
            }
            if let Some(n) = grid {
                cfg.grid.cells_per_width = n;
            }
            let art = Artifacts::new(&out)?;
            let t = run_asymptotics(&cfg)?;
            let ok = match &t {
                AsymptoticsTable::Weak { rows, .. } => {
                    for r in rows {
                        println!(
                            "weak α={} Λ={} asymptote={:.6} lower={:.6} {}",
                            r.alpha,
                            r.lambda.map_or("-".to_string(), |v| format!("{v:.6}")),
                            r.asymptote,
                            r.lower_bound,
                            if r.satisfied { "holds" } else { "VIOLATED" }
                        );
                    }
                    rows.iter().all(|r| r.satisfied)
                }
                AsymptoticsTable::Strong { rows, .. } => {
                    for r in rows {
                        println!(
                            "strong α={} tr={:.6} bracket=[{:.6}, {:.6}] lt_bound={:.6} {}",
                            r.alpha,
                            r.trace,
                            r.bracket_lower,
                            r.bracket_upper,
                            r.lt_bound,
                            if r.within { "holds" } else { "VIOLATED" }
                        );
                    }
                    rows.iter().all(|r| r.within)
                }
            };
            let name = match family {
                Family::Weak => "asymptotics-weak",
                Family::Strong => "asymptotics-strong",
            };
            report_paths(&art.asymptotics(name, &t)?);
            Ok(if ok { 0 } else { EXIT_VIOLATION })
        }
        Command::BoundOnly { scenarios } => {
            let list = scenarios.scenarios()?;
            let art = Artifacts::new(&scenarios.out)?;
            Ok(run_each(list, |s| {
                let out = bound_only(s)?;
                print_outcome(&out);
                report_paths(&art.outcome(&out)?);
                Ok(0)
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_of(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_status_wins() {
        let list = vec![Scenario::corollary1(1.0, 1.0).unwrap(), Scenario::corollary2(1.0, 1.0).unwrap()];
        let mut codes = vec![EXIT_VIOLATION, 0].into_iter();
        assert_eq!(run_each(list.clone(), |_| Ok(codes.next().unwrap())), EXIT_VIOLATION);
        let mut calls = 0;
        let status = run_each(list, |_| {
            calls += 1;
            if calls == 1 {
                Err(waveguide_core::Error::NoConvergence("test".into()).into())
            } else {
                Ok(EXIT_VIOLATION)
            }
        });
        assert_eq!((status, calls), (EXIT_SOLVER, 2));
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let solver: anyhow::Error = waveguide_core::Error::NoConvergence("x".into()).into();
        assert_eq!(exit_code_of(&solver.context("scenario a")), EXIT_SOLVER);
        let bad = Scenario::corollary1(1.0, 0.2).unwrap_err();
        assert_eq!(exit_code_of(&anyhow::Error::from(bad)), EXIT_CONFIG);
        assert_eq!(exit_code_of(&anyhow::anyhow!("io")), EXIT_CONFIG);
    }
}
