use std::io::{self, Write};

use log::warn;
use rayon::prelude::*;
use thiserror::Error;

use fracsica::equilibria::equilibrium_set;
use fracsica::lyapunov::{dfe_lyapunov, endemic_lyapunov};
use fracsica::model::{simulate, SimulationError};
use fracsica::stability::classify_dfe;
use fracsica::{EquilibriumSet, SolverConfig, State, Trajectory};

use crate::config::{ConfigError, Mode, RunConfig};
use crate::format::sig12;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "FRACSICA_THREADS";

pub const TRAJECTORY_HEADER: &str = "t,S,I,C,A,N,V_dfe,V_ee";
pub const SWEEP_HEADER: &str = "alpha,time_to_eps,final_distance,V_final";
pub const STABILITY_HEADER: &str =
    "alpha,b1,b2,b3,discriminant,min_arg_margin,applied_rule,verdict";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration")]
    Config(Vec<ConfigError>),
    #[error("solver aborted: {0}")]
    Solver(#[from] SimulationError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

/// Exit status for a sweep in which some order never settled within ε.
pub const EXIT_UNREACHED: i32 = 4;

fn checked(config: &RunConfig, mode: Mode) -> Result<(), CliError> {
    let warnings = config.validate(mode).map_err(CliError::Config)?;
    for w in warnings {
        warn!("{w}");
    }
    Ok(())
}

fn write_equilibria(out: &mut dyn Write, eq: &EquilibriumSet) -> io::Result<()> {
    let k = &eq.constants;
    writeln!(out, "xi1 = {}", sig12(k.xi1))?;
    writeln!(out, "xi2 = {}", sig12(k.xi2))?;
    writeln!(out, "xi3 = {}", sig12(k.xi3))?;
    writeln!(out, "script_N = {}", sig12(k.script_n))?;
    writeln!(out, "script_D = {}", sig12(k.script_d))?;
    writeln!(out, "r0 = {}", sig12(eq.r0))?;
    writeln!(out, "sigma0 = {}", state_text(&eq.sigma0))?;
    match &eq.sigma_star {
        Some(s) => writeln!(out, "sigma_star = {}", state_text(s)),
        None => writeln!(out, "sigma_star = none"),
    }
}

fn state_text(x: &State) -> String {
    x.to_array().map(sig12).join(",")
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub equilibria: EquilibriumSet,
    pub trajectory: Trajectory,
}

/// Integrates the configured scenario and writes the trajectory CSV to `csv`,
/// with R₀ and the equilibria to `summary`.
pub fn run_simulate(
    config: &RunConfig,
    csv: &mut dyn Write,
    summary: &mut dyn Write,
) -> Result<SimulateOutcome, CliError> {
    checked(config, Mode::Simulate)?;
    let p = &config.parameters;
    let eq = equilibrium_set(p);
    write_equilibria(summary, &eq)?;

    let traj = simulate(p, &config.initial_state, &config.solver)?;
    writeln!(csv, "{TRAJECTORY_HEADER}")?;
    for (t, x) in traj.iter() {
        let state = State::from_slice(x);
        let v_dfe = dfe_lyapunov(p, &state).map(sig12).unwrap_or_default();
        let v_ee = eq
            .sigma_star
            .and_then(|star| endemic_lyapunov(p, &star, &state).ok())
            .map(sig12)
            .unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{},{v_dfe},{v_ee}",
            sig12(t),
            sig12(state.s),
            sig12(state.i),
            sig12(state.c),
            sig12(state.a),
            sig12(state.total()),
        )?;
    }
    writeln!(
        summary,
        "final_state = {}",
        state_text(&State::from_slice(traj.last_state()))
    )?;
    Ok(SimulateOutcome {
        equilibria: eq,
        trajectory: traj,
    })
}

/// Writes the key-value report to `report` and the per-α stability table to `csv`.
pub fn run_analyze(
    config: &RunConfig,
    report: &mut dyn Write,
    csv: &mut dyn Write,
) -> Result<EquilibriumSet, CliError> {
    checked(config, Mode::Analyze)?;
    let p = &config.parameters;
    let eq = equilibrium_set(p);
    write_equilibria(report, &eq)?;
    writeln!(csv, "{STABILITY_HEADER}")?;
    for &alpha in &config.alphas {
        let r = classify_dfe(p, alpha).map_err(|e| {
            CliError::Config(vec![ConfigError {
                line: None,
                message: e.to_string(),
            }])
        })?;
        let c = &r.coefficients;
        let key = format!("dfe[alpha={}]", sig12(alpha));
        writeln!(report, "{key}.b1 = {}", sig12(c.b1))?;
        writeln!(report, "{key}.b2 = {}", sig12(c.b2))?;
        writeln!(report, "{key}.b3 = {}", sig12(c.b3))?;
        writeln!(
            report,
            "{key}.b1b2_minus_b3 = {}",
            sig12(c.b1 * c.b2 - c.b3)
        )?;
        writeln!(report, "{key}.discriminant = {}", sig12(r.discriminant))?;
        let eigs: Vec<String> = r
            .eigenvalues
            .iter()
            .map(|z| {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                format!("{}{sign}{}i", sig12(z.re), sig12(z.im.abs()))
            })
            .collect();
        writeln!(report, "{key}.eigenvalues = {}", eigs.join(";"))?;
        writeln!(report, "{key}.min_arg_margin = {}", sig12(r.min_arg_margin))?;
        writeln!(report, "{key}.applied_rule = {}", r.applied_rule)?;
        writeln!(report, "{key}.rule_agrees = {}", r.rule_agrees)?;
        writeln!(report, "{key}.verdict = {}", r.verdict)?;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            sig12(alpha),
            sig12(c.b1),
            sig12(c.b2),
            sig12(c.b3),
            sig12(r.discriminant),
            sig12(r.min_arg_margin),
            r.applied_rule,
            r.verdict
        )?;
    }
    Ok(eq)
}

/// First grid time after which `‖x(t) − target‖∞ < epsilon` for the rest of the run.
pub fn time_to_epsilon(traj: &Trajectory, target: &State, epsilon: f64) -> Option<f64> {
    let last_outside = traj
        .iter()
        .enumerate()
        .filter(|(_, (_, x))| State::from_slice(x).distance(target) >= epsilon)
        .map(|(k, _)| k)
        .last();
    match last_outside {
        None => Some(traj.times()[0]),
        Some(k) if k + 1 < traj.len() => Some(traj.times()[k + 1]),
        Some(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    /// `None` when the run never settles within ε.
    pub time_to_eps: Option<f64>,
    pub final_distance: f64,
    pub v_final: Option<f64>,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            sig12(self.alpha),
            sig12(self.time_to_eps.unwrap_or(f64::INFINITY)),
            sig12(self.final_distance),
            self.v_final.map(sig12).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub equilibria: EquilibriumSet,
    pub target: State,
    pub rows: Vec<SweepRow>,
}

impl SweepOutcome {
    pub fn all_reached(&self) -> bool {
        self.rows.iter().all(|r| r.time_to_eps.is_some())
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_reached() {
            0
        } else {
            EXIT_UNREACHED
        }
    }
}

fn sweep_one(
    config: &RunConfig,
    eq: &EquilibriumSet,
    target: &State,
    alpha: f64,
) -> Result<SweepRow, SimulationError> {
    let p = &config.parameters;
    let solver = SolverConfig {
        alpha,
        ..config.solver
    };
    let traj = simulate(p, &config.initial_state, &solver)?;
    let last = State::from_slice(traj.last_state());
    let v_final = match eq.sigma_star {
        Some(star) => endemic_lyapunov(p, &star, &last).ok(),
        None => dfe_lyapunov(p, &last).ok(),
    };
    Ok(SweepRow {
        alpha,
        time_to_eps: time_to_epsilon(&traj, target, config.epsilon),
        final_distance: last.distance(target),
        v_final,
    })
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            warn!("ignoring {THREADS_ENV}={raw}: expected a positive integer");
            None
        }
    }
}

/// Runs one simulation per α (in parallel, at most `threads` workers) and records how long
/// each takes to settle within ε of the equilibrium selected by R₀.
pub fn run_sweep(
    config: &RunConfig,
    threads: Option<usize>,
    csv: &mut dyn Write,
) -> Result<SweepOutcome, CliError> {
    checked(config, Mode::Sweep)?;
    let eq = equilibrium_set(&config.parameters);
    let target = eq.sigma_star.unwrap_or(eq.sigma0);

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(io::Error::other)?;
    let rows: Result<Vec<SweepRow>, SimulationError> = pool.install(|| {
        config
            .alphas
            .par_iter()
            .map(|&alpha| sweep_one(config, &eq, &target, alpha))
            .collect()
    });
    let rows = rows?;

    writeln!(csv, "{SWEEP_HEADER}")?;
    for row in &rows {
        writeln!(csv, "{}", row.csv_line())?;
    }
    Ok(SweepOutcome {
        equilibria: eq,
        target,
        rows,
    })
}
