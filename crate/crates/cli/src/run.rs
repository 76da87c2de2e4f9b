use std::path::PathBuf;

use ibvp_core::exec::Execution;
use ibvp_core::ibvp::IbvpProblem;
use ibvp_core::solver::{l1_cells, solve, solve_via_gamma, GridSpec, SolutionField, SolverConfig};
use ibvp_core::traffic::{build_problem, sweep_speed_limits};
use ibvp_core::verify::certificates::{certify_batch, random_problems, run_certificates_with, Allowances};
use ibvp_core::verify::random::ProblemShape;
use ibvp_core::verify::CertificateReport;

use crate::config::{Mode, RunConfig};
use crate::error::{from_build, from_solve, CliError, CliResult};
use crate::output::{self, GammaLevel};

/// Files written by a run, manifest last.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub artifacts: Vec<PathBuf>,
}

/// The problem a solve, certify or gamma-check run operates on.
fn main_problem(cfg: &RunConfig) -> CliResult<(IbvpProblem, f64)> {
    match (&cfg.problem, &cfg.scenario) {
        (Some(p), _) => Ok((p.build()?, p.record_dt_s)),
        (None, Some(s)) => {
            let sc = s.to_scenario();
            Ok((build_problem(&sc).map_err(from_build)?, sc.record_dt))
        }
        (None, None) => Err(CliError::Config("no [scenario] or [problem] given".into())),
    }
}

fn solve_main(cfg: &RunConfig, problem: &IbvpProblem, record_dt: f64, cells: usize) -> CliResult<SolutionField> {
    let grid = GridSpec::covering(problem, cells).map_err(from_build)?;
    let sc = SolverConfig::with_cfl(cfg.grid.cfl).uniform_records(problem.horizon, record_dt);
    solve(problem, &grid, &sc).map_err(from_solve)
}

pub fn run(cfg: &RunConfig) -> CliResult<Summary> {
    let out = &cfg.out;
    let mut artifacts = vec![];
    let mut failure = None;
    let (x_lo, x_hi) = match cfg.mode {
        Mode::Solve => {
            let (p, rdt) = main_problem(cfg)?;
            let field = solve_main(cfg, &p, rdt, cfg.grid.cells)?;
            artifacts.push(output::write_file(out, "profile.csv", &output::profile_csv(&field, cfg.output.profile_stride))?);
            (field.grid.x_lo, field.grid.x_hi)
        }
        Mode::Sweep => {
            let s = cfg
                .scenario
                .as_ref()
                .ok_or_else(|| CliError::Config("sweep mode needs [scenario]".into()))?
                .to_scenario();
            let rows = sweep_speed_limits(&s, &cfg.sweep.speeds_kmh, cfg.grid.cells, cfg.grid.cfl, Execution::Parallel)
                .map_err(from_solve)?;
            artifacts.push(output::write_file(out, "sweep.csv", &output::sweep_csv(&rows))?);
            (0.0, s.road_length)
        }
        Mode::Certify => {
            let (p, rdt) = main_problem(cfg)?;
            let field = solve_main(cfg, &p, rdt, cfg.grid.cells)?;
            let allow = Allowances {
                entropy: cfg.certify.entropy(),
                ..Allowances::default()
            };
            let mut groups: Vec<(String, Vec<CertificateReport>)> =
                vec![("main".into(), run_certificates_with(&field, &p, &allow))];
            if cfg.certify.random_problems > 0 {
                let shape = ProblemShape::default();
                let problems = random_problems(&shape, cfg.seed, cfg.certify.random_problems).map_err(from_build)?;
                let sc = SolverConfig::with_cfl(cfg.grid.cfl).uniform_records(shape.horizon, shape.horizon / 40.0);
                let reports =
                    certify_batch(&problems, cfg.grid.cells, &sc, &allow, Execution::Parallel).map_err(from_solve)?;
                for (i, r) in reports.into_iter().enumerate() {
                    groups.push((format!("random_{i:03}"), r));
                }
            }
            let failed: Vec<String> = groups
                .iter()
                .flat_map(|(g, rs)| rs.iter().filter(|r| !r.pass).map(move |r| format!("{g}.{}", r.check)))
                .collect();
            if !failed.is_empty() {
                failure = Some(CliError::Certificate(format!("failed checks: {}", failed.join(", "))));
            }
            artifacts.push(output::write_file(out, "certificates.csv", &output::certificates_csv(&groups))?);
            (field.grid.x_lo, field.grid.x_hi)
        }
        Mode::GammaCheck => {
            let (p, _) = main_problem(cfg)?;
            let sc = SolverConfig::with_cfl(cfg.grid.cfl).uniform_records(p.horizon, p.horizon);
            let mut levels = vec![];
            for k in 0..3 {
                let cells = cfg.grid.cells << k;
                let grid = GridSpec::covering(&p, cells).map_err(from_build)?;
                let a = solve(&p, &grid, &sc).map_err(from_solve)?;
                let b = solve_via_gamma(&p, &grid, &sc).map_err(from_solve)?;
                levels.push(GammaLevel {
                    cells,
                    dx: grid.dx(),
                    l1_gap: l1_cells(a.last(), b.last(), grid.dx()),
                    mass: a.mass(a.len() - 1),
                });
            }
            if !levels.windows(2).all(|w| w[1].l1_gap < w[0].l1_gap) {
                failure = Some(CliError::Certificate("gamma gap not decreasing under refinement".into()));
            }
            artifacts.push(output::write_file(out, "gamma_check.csv", &output::gamma_csv(&levels))?);
            (0.0, p.length())
        }
    };
    let manifest = output::manifest(cfg, x_lo, x_hi, &artifacts);
    artifacts.push(output::write_file(out, "manifest.toml", &manifest)?);
    match failure {
        Some(e) => Err(e),
        None => Ok(Summary { artifacts }),
    }
}
