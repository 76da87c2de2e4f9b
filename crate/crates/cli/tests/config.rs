use ibvp_cli::config::{DomainSpec, ScenarioSpec};
use ibvp_cli::output::{config_from_manifest, config_hash, manifest};
use ibvp_cli::{parse_config, parse_config_str, CliError, Mode, Overrides};
use std::path::PathBuf;

fn parse(text: &str) -> Result<ibvp_cli::RunConfig, CliError> {
    parse_config_str(text, &Overrides::default())
}

fn config_message(r: Result<ibvp_cli::RunConfig, CliError>) -> String {
    match r {
        Err(e @ CliError::Config(_)) => {
            assert_eq!(e.exit_code(), 2);
            e.to_string()
        }
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn minimal_sweep_gets_defaults() {
    let c = parse("mode = \"sweep\"\n[grid]\ncells = 500\n[sweep]\nspeeds_kmh = [40, 45, 50, 55, 60, 65, 70]\n").unwrap();
    assert_eq!(c.mode, Mode::Sweep);
    assert_eq!(c.grid.cfl, 0.9);
    assert_eq!(c.seed, 0);
    assert_eq!(c.out, PathBuf::from("out"));
    assert_eq!(c.scenario, Some(ScenarioSpec::default()));
    assert_eq!(c.sweep.speeds_kmh, vec![40.0, 45.0, 50.0, 55.0, 60.0, 65.0, 70.0]);
    assert_eq!(c.output.profile_stride, 1);
}

#[test]
fn empty_file_lists_required_keys() {
    let msg = config_message(parse(""));
    assert!(msg.contains("mode") && msg.contains("grid.cells"), "{msg}");
}

#[test]
fn speed_below_capacity_limit_is_rejected() {
    let msg = config_message(parse("mode = \"sweep\"\n[grid]\ncells = 100\n[sweep]\nspeeds_kmh = [39, 40]\n"));
    assert!(msg.contains("39") && msg.contains("capacity"), "{msg}");
    let msg = config_message(parse("mode = \"solve\"\n[grid]\ncells = 100\n[scenario]\nv_red_kmh = 39\n"));
    assert!(msg.contains("capacity"), "{msg}");
}

#[test]
fn unknown_keys_report_line_and_key() {
    let msg = config_message(parse("mode = \"sweep\"\n[grid]\ncells = 100\nsells = 3\n"));
    assert!(msg.contains("sells") && msg.contains("line 4"), "{msg}");
}

#[test]
fn range_violations_name_the_key() {
    assert!(config_message(parse("mode = \"solve\"\n[grid]\ncells = 100\ncfl = 1.5\n")).contains("grid.cfl"));
    assert!(config_message(parse("mode = \"solve\"\n[grid]\ncells = 2\n")).contains("grid.cells"));
}

#[test]
fn overrides_take_precedence() {
    let over = Overrides {
        mode: Some(Mode::Solve),
        cells: Some(64),
        cfl: Some(0.5),
        seed: Some(9),
        out: Some("elsewhere".into()),
    };
    let c = parse_config_str("mode = \"sweep\"\n[grid]\ncells = 100\n", &over).unwrap();
    assert_eq!((c.mode, c.grid.cells, c.grid.cfl, c.seed), (Mode::Solve, 64, 0.5, 9));
    assert_eq!(c.out, PathBuf::from("elsewhere"));
    // a flag can supply a missing required key
    assert!(parse_config_str("[grid]\ncells = 10\n", &over).is_ok());
}

#[test]
fn problem_sections_validate() {
    let base = "mode = \"solve\"\n[grid]\ncells = 50\n[problem]\ndomain = \"segment\"\nmax_density_per_km = 200\nrecord_dt_s = 1\ninitial = { breaks = [0, 10], values = [0] }\nleft = { breaks = [0, 5], values = [10] }\nspeed_kmh = { breaks = [0, 5], values = [36] }\n";
    assert!(config_message(parse(base)).contains("problem.right"));
    let ok = format!("{base}right = {{ breaks = [0, 5], values = [0] }}\n");
    let c = parse(&ok).unwrap();
    assert_eq!(c.problem.as_ref().unwrap().domain, DomainSpec::Segment);
    assert!(c.scenario.is_none());
    let unsorted = ok.replace("breaks = [0, 10]", "breaks = [10, 0]");
    assert!(config_message(parse(&unsorted)).contains("problem.initial"));
}

#[test]
fn manifest_round_trips_the_config() {
    let root = env!("CARGO_MANIFEST_DIR");
    for name in ["sweep", "solve", "certify", "zero", "gamma"] {
        let c = parse_config(&PathBuf::from(format!("{root}/../../configs/{name}.toml"))).unwrap();
        let text = manifest(&c, 0.0, 100.0, &[]);
        let back = config_from_manifest(&text).unwrap();
        assert_eq!(back, c, "{name}");
        assert_eq!(config_hash(&back), config_hash(&c));
        assert_eq!(parse(&c.to_toml()).unwrap(), c, "{name}");
    }
}
