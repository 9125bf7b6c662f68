use std::path::{Path, PathBuf};
use std::process::Command;

use rfwpt::power::{dac_power, signal_power, PowerParams};
use rfwpt_cli::{RunConfig, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK};
use serde_json::Value;

const QUICK_SWARM: &str = "[swarm]\nparticles = 8\niterations = 10\n";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["rfwpt"];
    full.extend_from_slice(args);
    rfwpt_cli::run(full)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn simulate_dumps_six_stages_and_consistent_totals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[chain]\ndac_bits = 2\n");
    let out = dir.path().join("sim.json");
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    let doc = json(&out);
    let stages = doc["stages"].as_object().unwrap();
    for name in ["digital", "dac", "lowpass", "mixer", "hpa", "receiver"] {
        let s = &stages[name];
        let n = s["re"].as_array().unwrap().len();
        assert!(n > 0);
        assert_eq!(s["spectrum_mag"].as_array().unwrap().len(), n);
    }

    // Recompute the fixed parts of the breakdown independently.
    let p = PowerParams {
        supply_voltage: 3.0,
        unit_current: 10e-6,
        parasitic_capacitance: 1e-12,
        correction: 1.0,
        mixer: 23e-3,
        local_oscillator: 5e-3,
        hpa_input_resistance: 1.0,
        hpa_output_resistance: 1.0,
    };
    let power = &doc["power"];
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    assert!(rel(f(&power["p_dac"]), dac_power(2, 100e6, &p)) < 1e-8);
    let tones = rfwpt::ToneSet64::uniform(8, 0.5, 1.25e6).unwrap();
    assert!(rel(f(&power["p_s"]), signal_power(&tones)) < 1e-8);
    let sum: f64 = ["p_dac", "p_mix", "p_lo", "p_hpa", "p_s"].iter().map(|k| f(&power[*k])).sum();
    assert!(rel(f(&power["p_total"]), sum) < 1e-8);

    // DAC output has energy above BW, the filtered stage does not.
    let above = |stage: &str| -> f64 {
        let s = &stages[stage];
        s["freq_hz"]
            .as_array()
            .unwrap()
            .iter()
            .zip(s["spectrum_mag"].as_array().unwrap())
            .filter(|(fr, _)| f(fr).abs() > 10e6 + 1.0)
            .map(|(_, m)| f(m).powi(2))
            .sum()
    };
    assert!(above("dac") > 1e-6);
    assert_eq!(above("lowpass"), 0.0);
}

#[test]
fn zero_tones_give_zero_stages() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[waveform]\ntones = 4\namplitudes = [0.0, 0.0, 0.0, 0.0]\n");
    let out = dir.path().join("sim.json");
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    let doc = json(&out);
    assert_eq!(f(&doc["harvest"]["p_out_dc"]), 0.0);
    for (_, s) in doc["stages"].as_object().unwrap() {
        assert!(s["re"].as_array().unwrap().iter().all(|v| f(v) == 0.0));
    }
}

#[test]
fn table_output_has_fixed_header_and_nine_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    assert_eq!(run(&["simulate", "--format", "table", "--out", out.to_str().unwrap()]), EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "stage,sample,time_s,re,im,freq_hz,spectrum_mag");
    let row = text.lines().find(|l| l.starts_with("mixer,3,")).unwrap();
    let re = row.split(',').nth(3).unwrap();
    let mantissa = re.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 9, "{re}");
}

#[test]
fn optimize_is_deterministic_and_feasible_without_requirement() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{QUICK_SWARM}required_dc_w = 0.0\n"));
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let code = run(&["optimize", "--config", cfg.to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let doc = json(&a);
    assert_eq!(doc["feasible"], Value::Bool(true));
    assert_eq!(doc["seed"].as_u64(), Some(9));
    // The floor is the fixed consumption of DAC, mixer and oscillator.
    assert!(f(&doc["power"]["p_total"]) >= 1.455e-3 + 23e-3 + 5e-3 - 1e-12);
    let trace: Vec<f64> = doc["fitness_trace"].as_array().unwrap().iter().map(f).collect();
    assert_eq!(trace.len(), 11);
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn unreachable_requirement_exits_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{QUICK_SWARM}required_dc_w = 1.0\n"));
    let out = dir.path().join("o.csv");
    let code = run(&["optimize", "--config", cfg.to_str().unwrap(), "--format", "table", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(std::fs::read_to_string(&out).unwrap().contains("feasible,false"));
}

#[test]
fn bad_configs_exit_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[chain]\ndac_bits = 0\n");
    assert_eq!(run(&["simulate", "--config", bad.to_str().unwrap()]), EXIT_CONFIG);
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["optimize", "--config", missing.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(run(&["simulate", "--format", "xml"]), EXIT_CONFIG);
}

#[test]
fn sweep_rows_follow_order_and_record_failures() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{QUICK_SWARM}seed = 3\n[[sweep]]\npath = \"chain.dac_bits\"\nvalues = [1, 3]\n[[sweep]]\npath = \"chain.ps_bits\"\nvalues = [0, 2]\n"
    );
    let cfg = write(dir.path(), "s.toml", &text);
    let out = dir.path().join("s.csv");
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# format_version=1"));
    assert_eq!(lines.next().unwrap(), rfwpt_cli::output::SWEEP_COLUMNS.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let assignments: Vec<&str> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(
        assignments,
        ["chain.dac_bits=1;chain.ps_bits=0", "chain.dac_bits=1;chain.ps_bits=2", "chain.dac_bits=3;chain.ps_bits=0", "chain.dac_bits=3;chain.ps_bits=2"]
    );
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        assert_eq!(r[1], rfwpt_cli::commands::point_seed(3, i).to_string());
        let failed = assignments[i].ends_with("ps_bits=0");
        assert_eq!(!r[14].is_empty(), failed, "{r:?}");
        assert_eq!(r[3].is_empty(), failed);
    }
}

#[test]
fn single_point_sweep_matches_optimize() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{QUICK_SWARM}[[sweep]]\npath = \"chain.dac_bits\"\nvalues = [4]\n");
    let cfg = write(dir.path(), "s.toml", &text);
    let parsed = RunConfig::load(&cfg).unwrap();
    let rows = rfwpt_cli::commands::sweep(&parsed).unwrap();
    assert_eq!(rows.len(), 1);
    let from_sweep = rows[0].outcome.clone().unwrap();

    let mut single = parsed.clone();
    single.sweep.clear();
    single.chain.dac_bits = 4;
    single.swarm.seed = rows[0].seed;
    let direct = rfwpt_cli::commands::optimize(&single).unwrap();
    assert_eq!(from_sweep, direct);
}

#[test]
fn binary_reports_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_rfwpt");
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[rectenna]\nideality = 0.5\n");
    let status = Command::new(exe).args(["simulate", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&status.stderr).contains("rectenna.ideality"));
    let ok = Command::new(exe).args(["simulate", "--profile", "desk"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(serde_json::from_slice::<Value>(&ok.stdout).is_ok());
}
