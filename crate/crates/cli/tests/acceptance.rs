//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::Command;
use std::sync::Arc;

use ibvp_core::flux::{kmh_to_ms, LwrFlux, SpeedProfile};
use ibvp_core::solver::l1_cells;
use ibvp_core::traffic::{capacity, run_scenario, sweep_speed_limits, TrafficScenario, REFERENCE_SPEEDS_KMH};
use ibvp_core::verify::certificates::{
    data_stability_certificate, flux_stability_certificate, range_certificate, tv_certificate, Allowances,
};
use ibvp_core::verify::random::{rng, ProblemShape};
use ibvp_core::verify::riemann::riemann_at;
use ibvp_core::verify::{check_entropy_inequality, EntropyConfig};
use ibvp_core::{solve, solve_via_gamma, Error, Execution, GridSpec, IbvpProblem, SolutionField, SolverConfig, StepFn};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn solved(p: &IbvpProblem, n: usize, record_dt: f64) -> SolutionField {
    let grid = GridSpec::covering(p, n).unwrap();
    solve(p, &grid, &SolverConfig::default().uniform_records(p.horizon, record_dt)).unwrap()
}

fn segment(u0: StepFn, left: f64, right: f64, speed: SpeedProfile, horizon: f64) -> IbvpProblem {
    IbvpProblem::segment(
        u0,
        StepFn::constant(0.0, horizon, left).unwrap(),
        StepFn::constant(0.0, horizon, right).unwrap(),
        speed,
        Arc::new(LwrFlux::new(0.2).unwrap()),
    )
    .unwrap()
}

fn sweep_ordering() -> Outcome {
    let rows =
        sweep_speed_limits(&TrafficScenario::reference(40.0), &REFERENCE_SPEEDS_KMH, 500, 0.9, Execution::Parallel)
            .map_err(|e| e.to_string())?;
    let best = rows.iter().min_by(|a, b| a.j.total_cmp(&b.j)).unwrap();
    let (j40, j70) = (rows[0].j, rows[6].j);
    ensure(
        best.v_red_kmh == 40.0 && j40 < j70,
        format!("argmin V = {} km/h, J(40) = {j40:.2}, J(70) = {j70:.2}", best.v_red_kmh),
    )
}

fn equal_throughput() -> Outcome {
    let rows =
        sweep_speed_limits(&TrafficScenario::reference(40.0), &REFERENCE_SPEEDS_KMH, 500, 0.9, Execution::Parallel)
            .map_err(|e| e.to_string())?;
    let d: Vec<f64> = rows.iter().map(|r| r.total_discharge).collect();
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = d.iter().copied().fold(0.0, f64::max);
    let spread = (hi - lo) / hi;
    ensure(spread < 0.01, format!("relative spread {spread:.2e}"))
}

fn feasibility_boundary() -> Outcome {
    let g = TrafficScenario::reference(40.0).flux().map_err(|e| e.to_string())?;
    let cap = capacity(kmh_to_ms(40.0), &g) * 3600.0;
    let ok40 = TrafficScenario::reference(40.0).validate().is_ok();
    let rejected39 = matches!(TrafficScenario::reference(39.0).validate(), Err(Error::Infeasible { .. }));
    ensure(
        (cap - 2000.0).abs() < 1e-9 && ok40 && rejected39,
        format!("capacity(40) = {cap} cars/h, 40 feasible: {ok40}, 39 rejected: {rejected39}"),
    )
}

fn riemann_convergence() -> Outcome {
    let r = 0.2;
    let (v, t) = (10.0, 4.0);
    let mut details = vec![];
    let mut ok = true;
    for (name, ul, ur) in [("shock", 0.2 * r, 0.8 * r), ("rarefaction", r, 0.0)] {
        let p = segment(StepFn::new(vec![0.0, 50.0, 100.0], vec![ul, ur]).unwrap(), ul, ur, SpeedProfile::constant(v, t).unwrap(), t);
        let exact = riemann_at(ul, ur, 50.0, v, r).unwrap();
        let errs: Vec<f64> = [100, 200, 400, 800]
            .iter()
            .map(|&n| {
                let f = solved(&p, n, t);
                let e = f.grid.edges();
                let reference: Vec<f64> = e.windows(2).map(|w| exact.integral(t, w[0], w[1]) / (w[1] - w[0])).collect();
                l1_cells(f.last(), &reference, f.grid.dx())
            })
            .collect();
        let factors: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
        ok &= factors.iter().all(|&f| f >= 1.3);
        details.push(format!("{name} factors {factors:.2?}"));
    }
    ensure(ok, details.join("; "))
}

fn gamma_equivalence() -> Outcome {
    let t = 10.0;
    let p = IbvpProblem::segment(
        StepFn::new(vec![0.0, 40.0, 100.0], vec![0.05, 0.15]).unwrap(),
        StepFn::new(vec![0.0, 3.0, t], vec![0.08, 0.02]).unwrap(),
        StepFn::constant(0.0, t, 0.1).unwrap(),
        SpeedProfile::new(vec![0.0, 4.0, t], vec![15.0, 6.0], 6.0).unwrap(),
        Arc::new(LwrFlux::new(0.2).unwrap()),
    )
    .unwrap();
    let cfg = SolverConfig::default().uniform_records(t, t);
    let mut gaps = vec![];
    let mut mass = 0.0;
    for n in [100, 200, 400] {
        let grid = GridSpec::covering(&p, n).unwrap();
        let a = solve(&p, &grid, &cfg).map_err(|e| e.to_string())?;
        let b = solve_via_gamma(&p, &grid, &cfg).map_err(|e| e.to_string())?;
        gaps.push(l1_cells(a.last(), b.last(), grid.dx()));
        mass = a.mass(a.len() - 1);
    }
    let last = *gaps.last().unwrap();
    ensure(
        gaps.windows(2).all(|w| w[1] < w[0]) && last < 0.01 * mass,
        format!("gaps {gaps:.3?}, finest / mass = {:.2e}", last / mass),
    )
}

fn range_and_tv() -> Outcome {
    let shape = ProblemShape::default();
    let allow = Allowances::default();
    let mut r = rng(2024);
    let mut failures = vec![];
    let mut worst_margin = f64::INFINITY;
    for i in 0..20 {
        let p = shape.segment(&mut r).map_err(|e| e.to_string())?;
        let f = solved(&p, 400, 0.25);
        for c in [range_certificate(&f, &p, allow.range), tv_certificate(&f, &p, &allow)] {
            worst_margin = worst_margin.min(c.margin);
            if !c.pass {
                failures.push(format!("{i}.{}", c.check));
            }
        }
    }
    ensure(failures.is_empty(), format!("20 problems, failures {failures:?}, min margin {worst_margin:.3e}"))
}

fn stability() -> Outcome {
    let shape = ProblemShape::default();
    let allow = Allowances::default();
    let mut r = rng(99);
    let mut failures = vec![];
    for i in 0..20 {
        let (p, q) = shape.data_pair(&mut r).map_err(|e| e.to_string())?;
        let c = data_stability_certificate(&p, &q, &solved(&p, 400, 0.25), &solved(&q, 400, 0.25), &allow)
            .map_err(|e| e.to_string())?;
        if !c.pass {
            failures.push(format!("data {i}"));
        }
        let (p, q) = shape.speed_pair(&mut r).map_err(|e| e.to_string())?;
        let c = flux_stability_certificate(&p, &q, &solved(&p, 400, 0.25), &solved(&q, 400, 0.25), &allow)
            .map_err(|e| e.to_string())?;
        if !c.pass {
            failures.push(format!("speed {i}"));
        }
    }
    ensure(failures.is_empty(), format!("20 data + 20 speed pairs, failures {failures:?}"))
}

fn entropy() -> Outcome {
    let allow = Allowances::default();
    let run = run_scenario(&TrafficScenario::reference(50.0), 500, 0.9).map_err(|e| e.to_string())?;
    let tol = allow.entropy_tol(&run.field);
    let (rep, worst) = check_entropy_inequality(&run.field, &run.problem, &allow.entropy, tol);
    let traffic_worst = worst.map_or(0.0, |w| w.normalized());

    // stationary expansion shock held fixed in time
    let r = 0.2;
    let (ul, ur) = (0.8 * r, 0.2 * r);
    let p = segment(
        StepFn::new(vec![0.0, 50.0, 100.0], vec![ul, ur]).unwrap(),
        ul,
        ur,
        SpeedProfile::constant(10.0, 10.0).unwrap(),
        10.0,
    );
    let grid = GridSpec::covering(&p, 400).unwrap();
    let profile: Vec<f64> = grid.centers().iter().map(|&x| if x < 50.0 { ul } else { ur }).collect();
    let times: Vec<f64> = (0..=400).map(|i| 10.0 * i as f64 / 400.0).collect();
    let fake = SolutionField {
        profiles: vec![profile; times.len()],
        times,
        grid,
        diagnostics: Default::default(),
    };
    let (_, bad) = check_entropy_inequality(&fake, &p, &EntropyConfig::default(), allow.entropy_tol(&fake));
    let bad = bad.ok_or("no residuals for the expansion shock")?;
    ensure(
        rep.pass && bad.normalized() < -0.1 && bad.k > ur && bad.k < ul,
        format!(
            "traffic worst {traffic_worst:.3e} (tol {tol:.3e}); expansion shock {:.3} at k = {:.3}",
            bad.normalized(),
            bad.k
        ),
    )
}

fn determinism() -> Outcome {
    let root = env!("CARGO_MANIFEST_DIR");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = [
        ("sweep", vec!["--cells", "150"], "sweep.csv"),
        ("certify", vec!["--cells", "100", "--seed", "7"], "certificates.csv"),
        ("solve", vec!["--cells", "100"], "profile.csv"),
    ];
    let mut checked = vec![];
    for (name, extra, csv) in runs {
        let mut outputs = vec![];
        for k in 0..2 {
            let out = dir.path().join(format!("{name}_{k}"));
            let status = Command::new(env!("CARGO_BIN_EXE_ibvp"))
                .arg("--config")
                .arg(format!("{root}/../../configs/{name}.toml"))
                .args(&extra)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{name} exited with {:?}", status.status.code()));
            }
            let manifest = std::fs::read_to_string(out.join("manifest.toml")).map_err(|e| e.to_string())?;
            let manifest: String = manifest.lines().filter(|l| !l.starts_with("out = ")).collect();
            outputs.push((std::fs::read(out.join(csv)).map_err(|e| e.to_string())?, manifest));
        }
        if outputs[0].0 != outputs[1].0 {
            return Err(format!("{name}: {csv} differs between runs"));
        }
        if outputs[0].1 != outputs[1].1 {
            return Err(format!("{name}: manifest differs beyond the out path"));
        }
        checked.push(format!("{csv} ({} bytes)", outputs[0].0.len()));
    }
    Ok(format!("identical: {}", checked.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sweep ordering", sweep_ordering),
        ("equal throughput", equal_throughput),
        ("feasibility boundary", feasibility_boundary),
        ("riemann convergence", riemann_convergence),
        ("gamma equivalence", gamma_equivalence),
        ("maximum principle and tv", range_and_tv),
        ("stability certificates", stability),
        ("entropy residual", entropy),
        ("determinism", determinism),
    ];
    let mut failed = vec![];
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("[{}] {name}: PASS ({d})", i + 1),
            Err(d) => {
                println!("[{}] {name}: FAIL ({d})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
