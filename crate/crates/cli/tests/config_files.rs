use qbrown_cli::config::Value;
use qbrown_cli::{parse_config, Error, Scenario};

fn issues(text: &str) -> Vec<qbrown_cli::ConfigIssue> {
    match parse_config(text) {
        Err(Error::Config(issues)) => issues,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_file_gets_every_default() {
    let cfg = parse_config("scenario = free-high-friction\n").unwrap();
    assert_eq!(cfg.scenario, Scenario::FreeHighFriction);
    assert_eq!(cfg.get("scenario").unwrap().line, Some(1));
    let defaulted: Vec<_> = cfg.settings().iter().filter(|s| s.line.is_none()).collect();
    assert!(defaulted.len() + 1 == cfg.settings().len());
    assert!(cfg.params.temperature() > 0.0);
    assert!(cfg.number("time.t_max_tc") > cfg.number("time.t_min_tc"));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# header\n\nscenario = vacuum-spreading  # trailing\ninit.sigma0 = 0.5\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.number("init.sigma0"), 0.5);
    assert_eq!(cfg.get("init.sigma0").unwrap().line, Some(4));
}

#[test]
fn negative_mass_is_one_issue_on_its_line() {
    let found = issues("scenario = harmonic\nparams.mass = -1\n");
    assert_eq!(found.len(), 1, "{found:?}");
    assert_eq!(found[0].line, Some(2));
    assert!(found[0].message.contains("params.mass"));
}

#[test]
fn duplicate_key_names_both_lines() {
    let found = issues("scenario = harmonic\nparams.friction = 1\n# x\nparams.friction = 2\n");
    assert_eq!(found.len(), 1, "{found:?}");
    let msg = found[0].to_string();
    assert!(msg.contains("line 2") && msg.contains("line 4"), "{msg}");
}

#[test]
fn all_problems_are_reported_together() {
    let found = issues("scenario = harmonic\nparams.mass = 0\nbogus.key = 1\nparams.friction = abc\n");
    assert_eq!(found.len(), 3, "{found:?}");
    let lines: Vec<_> = found.iter().map(|i| i.line).collect();
    assert_eq!(lines, vec![Some(2), Some(3), Some(4)]);
}

#[test]
fn unknown_key_for_scenario_is_rejected() {
    let found = issues("scenario = free-zero-T\npde.n = 100\n");
    assert_eq!(found[0].line, Some(2));
    assert!(found[0].message.contains("pde.n"));
}

#[test]
fn missing_scenario_is_reported() {
    let found = issues("params.mass = 1\n");
    assert!(found.iter().any(|i| i.message.contains("scenario")), "{found:?}");
}

#[test]
fn unknown_scenario_is_reported() {
    let found = issues("scenario = warp-drive\n");
    assert_eq!(found[0].line, Some(1));
}

#[test]
fn required_keys_are_enforced() {
    let found = issues("scenario = vacuum-spreading\n");
    assert!(found.iter().any(|i| i.message.contains("init.sigma0")), "{found:?}");
    let found = issues("scenario = semiclassical-pde\npde.potential = quartic\n");
    assert!(found.iter().any(|i| i.message.contains("pde.k4")), "{found:?}");
}

#[test]
fn malformed_line_is_reported() {
    let found = issues("scenario = harmonic\nthis line has no equals sign\n");
    assert_eq!(found[0].line, Some(2));
}

#[test]
fn every_scenario_parses_with_defaults() {
    for s in Scenario::ALL {
        let mut text = format!("scenario = {}\n", s.name());
        if s == Scenario::VacuumSpreading {
            text.push_str("init.sigma0 = 1\n");
        }
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", s.name()));
        assert_eq!(cfg.scenario, s);
        assert!(matches!(cfg.get("output.dir").unwrap().value, Value::Text(_)));
    }
}

#[test]
fn shipped_configs_are_valid() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            qbrown_cli::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert_eq!(seen, Scenario::ALL.len());
}
