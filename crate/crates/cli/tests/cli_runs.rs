use std::path::Path;
use std::process::{Command, Output};

use cfield::sampler::Schedule;
use cfield_cli::config::RunConfig;
use cfield_cli::pipeline::{field_mu, mean_field, run_point};
use cfield_cli::table::{data_lines, ResultTable};

const SMALL: &str = "\
model.atoms = 60
model.coupling = 0.5
model.temperature = 4
grid.oversample = 2
sampler.burn_in = 2000
sampler.sweeps = 6000
sampler.thinning = 4
minimize.steps = 50000
";

fn cfield(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfield"))
        .args(args)
        .current_dir(dir)
        .env("CFIELD_WORKERS", "2")
        .output()
        .expect("spawn cfield")
}

fn diagnostic(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

#[test]
fn repeated_runs_give_identical_data() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), SMALL).unwrap();
    for out in ["a", "b"] {
        let o = cfield(&["run", "--config", "run.cfg", "--out", out, "--chains", "2"], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 9, "{names:?}");
    for name in names {
        let a = std::fs::read_to_string(dir.path().join("a").join(&name)).unwrap();
        let b = std::fs::read_to_string(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(data_lines(&a), data_lines(&b), "{name:?}");
        let t = ResultTable::parse(&a).unwrap();
        assert!(t.meta("config_hash").is_some());
    }
}

#[test]
fn sweep_writes_one_summary_row_per_temperature() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.cfg"), SMALL).unwrap();
    let o = cfield(&["sweep", "--config", "run.cfg", "--temps", "2,4,6", "--out", "s"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = ResultTable::read(&dir.path().join("s/summary.tsv")).unwrap();
    assert_eq!(t.column("T").unwrap(), vec![2.0, 4.0, 6.0]);
    assert!(t.meta("crossover_T").is_some());
}

#[test]
fn config_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "model.atoms = 60\nmodel.colour = red\n").unwrap();
    let o = cfield(&["run", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let d = diagnostic(&o);
    assert_eq!(d["error"], "config");
    assert!(d["message"].as_str().unwrap().contains("model.colour"));

    let o = cfield(&["sweep", "--config", "missing.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(diagnostic(&o)["error"], "io");

    let o = cfield(&["ideal-ref", "--atoms", "10", "--temp=-1", "--cutoff", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(diagnostic(&o)["error"], "config");

    let o = cfield(&["run", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ideal_reference_for_a_single_atom() {
    let dir = tempfile::tempdir().unwrap();
    let o = cfield(&["ideal-ref", "--atoms", "1", "--temp", "2", "--cutoff", "3", "--out", "r"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = String::from_utf8(o.stdout).unwrap();
    let t = ResultTable::read(&dir.path().join(path.trim())).unwrap();
    let p = t.column("quantum_probability").unwrap();
    assert_eq!(p.len(), 2);
    // one atom: P(N_ex = 1) = xi
    let xi = (-0.5f64).exp();
    assert!((p[1] - xi).abs() < 1e-14);
    assert!((p[0] + p[1] - 1.0).abs() < 1e-14);
}

#[test]
fn check_fast_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = cfield(&["check", "--fast"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn four_short_chains_agree_with_one_long_chain() {
    let base = RunConfig {
        atoms: 100.0,
        coupling: 0.1,
        oversample: 2.0,
        base_seed: 9,
        ..RunConfig::default()
    };
    let mu = field_mu(&mean_field(&base).unwrap());
    let four = RunConfig { chains: 4, schedule: Schedule { sweeps: 30_000, burn_in: 5_000, thinning: 5 }, ..base.clone() };
    let one = RunConfig { chains: 1, schedule: Schedule { sweeps: 105_000, burn_in: 5_000, thinning: 5 }, ..base };
    let a = run_point(&four, 8.0, mu, 0, 2).unwrap();
    let b = run_point(&one, 8.0, mu, 1, 1).unwrap();
    assert_eq!(a.series.len(), 4);
    let d = (a.occupation.mean - b.occupation.mean).abs();
    let s = a.occupation.mean_error.hypot(b.occupation.mean_error);
    assert!(d < 4.0 * s, "{} vs {} (combined error {s})", a.occupation.mean, b.occupation.mean);
}
