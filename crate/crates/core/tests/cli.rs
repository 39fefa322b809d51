//! End-to-end runs of the `nlsa` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "n_points = 64\nlength = 30\ndt = 0.01\nt_final = 2\n";

fn nlsa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlsa"))
        .args(args)
        .arg("--output")
        .arg(out)
        .env_remove("NLSA_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn run_config(sub: &str, body: &str) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, body).unwrap();
    let out = nlsa(&[sub, "--config", cfg.to_str().unwrap()], dir.path());
    (out, dir)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn decay_on_valid_config_writes_csv() {
    let body = format!("{BASE}gamma = 1\ninitial = gaussian:1,15,2\nforcing = gaussian:0.1,15,2\n");
    let (out, dir) = run_config("decay", &body);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("decay_mass.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,mass,balance_residual,linf"));
    assert_eq!(csv.lines().count(), 202);
    assert!(stdout(&out).starts_with("decay:"));
}

#[test]
fn decay_without_damping_is_a_config_error() {
    let body = format!("{BASE}gamma = 0\ninitial = gaussian:1,15,2\n");
    let (out, _dir) = run_config("decay", &body);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("envelope requires damping"), "{}", stderr(&out));
}

#[test]
fn convergence_prints_ratio_table_in_band() {
    let body = "n_points = 256\nlength = 50.26548245743669\ngamma = 0.5\ndt = 0.004\n\
                t_final = 1\ninitial = plane:1,1\n";
    let (out, dir) = run_config("convergence", body);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let ratios: Vec<f64> = text
        .lines()
        .skip(2)
        .take(2)
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 2, "{text}");
    assert!(ratios.iter().all(|r| (3.3..=4.7).contains(r)), "{ratios:?}");
    assert!(dir.path().join("convergence.csv").exists());
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nlsa(&["simulate"], dir.path()).status.code(), Some(2));
    assert_eq!(nlsa(&["frobnicate", "--config", "x"], dir.path()).status.code(), Some(2));
    let missing = dir.path().join("missing.cfg");
    let out = nlsa(&["simulate", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let (out, _d) = run_config("simulate", &format!("{BASE}gamma = 1\nbogus = 3\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key bogus"), "{}", stderr(&out));

    let (out, _d) = run_config("simulate", "n_points = 64\nlength = 30\ngamma = 1\ndt = 0.01\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing key t_final"), "{}", stderr(&out));
}

#[test]
fn help_exits_0() {
    let out = Command::new(env!("CARGO_BIN_EXE_nlsa")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("omega-limit"));
}

#[test]
fn failed_invariant_exits_1() {
    // A descending mode ladder makes the pairing gap grow.
    let body = "n_points = 128\nlength = 50\ngamma = 0.1\ndt = 0.01\nt_final = 0.5\n\
                initial = gaussian:0.2,10,1\nbump = gaussian:1,25,1\n\
                test_function = gaussian:1,25,1\nmode_list = 8,4,2\n";
    let (out, dir) = run_config("weak-continuity", body);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(dir.path().join("weak_continuity.csv").exists());
}

#[test]
fn omega_limit_before_absorption_exits_1() {
    let body = format!(
        "{BASE}gamma = 1\ninitial = gaussian:1,15,2\nforcing = gaussian:0.05,15,2\n\
         t_star = 0.5\nn_samples = 3\nspacing = 0.5\n"
    );
    let (out, _dir) = run_config("omega-limit", &body);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sampling before absorption"), "{}", stderr(&out));
}

#[test]
fn every_subcommand_runs() {
    let forced = format!("{BASE}gamma = 1\ninitial = gaussian:0.5,15,2\nforcing = gaussian:0.1,15,2\n");
    let cases = [
        ("simulate", forced.clone(), vec!["simulate_mass.csv", "final.nlsa"]),
        ("absorb", forced.clone(), vec!["absorb.csv"]),
        ("ball-identity", format!("{forced}tau = 1\n"), vec!["ball_identity.csv"]),
        ("norms", format!("{forced}k_interval = 10,20\n"), vec!["norms.csv"]),
        (
            "smoothing",
            format!("{BASE}gamma = 0\ninitial = gaussian:1,15,1\nscale_list = 0.5,1\n"),
            vec!["smoothing.csv"],
        ),
        (
            "omega-limit",
            format!(
                "{BASE}gamma = 1\nforcing = gaussian:0.1,15,2\nt_star = 1\nn_samples = 3\nspacing = 0.5\n"
            ),
            vec!["omega_limit.csv", "omega_000.nlsa", "omega_002.nlsa"],
        ),
    ];
    for (sub, body, files) in cases {
        let (out, dir) = run_config(sub, &body);
        assert_eq!(out.status.code(), Some(0), "{sub}: {}", stderr(&out));
        assert!(stdout(&out).starts_with(&format!("{sub}:")), "{sub}: {}", stdout(&out));
        for f in files {
            assert!(dir.path().join(f).exists(), "{sub} did not write {f}");
        }
    }
}

#[test]
fn output_env_var_is_the_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let target = dir.path().join("from_env");
    fs::create_dir(&target).unwrap();
    fs::write(&cfg, format!("{BASE}gamma = 1\n")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nlsa"))
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .env("NLSA_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(target.join("simulate_mass.csv").exists());
}

#[test]
fn identical_seeds_give_identical_files() {
    let body = format!("{BASE}gamma = 0.5\ninitial = random:1\nforcing = random:0.2\nseed = 9\n");
    let read = |seed_body: &str| {
        let (out, dir) = run_config("simulate", seed_body);
        assert_eq!(out.status.code(), Some(0));
        (
            fs::read(dir.path().join("simulate_mass.csv")).unwrap(),
            fs::read(dir.path().join("final.nlsa")).unwrap(),
        )
    };
    let a = read(&body);
    let b = read(&body);
    assert_eq!(a, b);
    let c = read(&body.replace("seed = 9", "seed = 10"));
    assert_ne!(a.1, c.1);
}
