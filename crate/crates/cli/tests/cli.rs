use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use illusion_core::formats::{parse_model, Format};

fn sim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_illusion-sim"))
        .args(args)
        .current_dir(cwd)
        .env("ILLUSION_SIM_THREADS", "2")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("m.txt"),
        "# four spins\nising 4\nh 0 0.5\nJ 0 1 1\nJ 1 2 -0.5\nJ 2 3 1\nJ 3 0 0.25\n",
    )
    .unwrap();
    dir
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn help_and_usage_exit_codes() {
    let dir = workspace();
    assert_eq!(code(&sim(&["--help"], dir.path())), 0);
    assert_eq!(code(&sim(&["sample", "--help"], dir.path())), 0);
    assert_eq!(code(&sim(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&sim(&["sample", "--model", "m.txt"], dir.path())), 1);
    assert_eq!(
        code(&sim(
            &[
                "partition",
                "--model",
                "m.txt",
                "--k",
                "2",
                "--capacity",
                "1",
                "--out",
                "o"
            ],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&sim(
            &["sample", "--model", "m.txt", "--beta", "-1", "--out", "o"],
            dir.path()
        )),
        1
    );
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_illusion-sim"))
        .args(["sample", "--model", "m.txt", "--out", "o"])
        .current_dir(dir.path())
        .env("ILLUSION_SIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad_threads), 1);
}

#[test]
fn data_errors_exit_2_with_line_numbers() {
    let dir = workspace();
    let o = sim(
        &["sample", "--model", "missing.txt", "--out", "o"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    fs::write(dir.path().join("dup.txt"), "ising 2\nJ 0 1 1\nJ 1 0 2\n").unwrap();
    let o = sim(&["sample", "--model", "dup.txt", "--out", "o"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert!(!dir.path().join("o").exists());
}

#[test]
fn plotdata_on_empty_results_writes_nothing() {
    let dir = workspace();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let o = sim(&["plotdata", "--results", "empty"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not found"));
    assert_eq!(fs::read_dir(dir.path().join("empty")).unwrap().count(), 0);
}

#[test]
fn single_chip_run_matches_ideal_and_single_run_tables_have_one_row() {
    let dir = workspace();
    let o = sim(
        &[
            "illusion",
            "--model",
            "m.txt",
            "--k",
            "1",
            "--beta",
            "0.5",
            "--sweeps",
            "3000",
            "--burn-in",
            "100",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("r/metrics.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][1], "sync");
    assert_eq!(rows[1][7], "0");
    assert_eq!(rows[0][5], rows[1][5]);

    let o = sim(
        &[
            "sample", "--model", "m.txt", "--beta", "0.5", "--sweeps", "1000", "--out", "s",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    assert_eq!(code(&sim(&["plotdata", "--results", "s"], dir.path())), 0);
    for table in [
        "accuracy_vs_tau.csv",
        "walltime_vs_k.csv",
        "tv_vs_sweeps.csv",
    ] {
        assert_eq!(
            csv_rows(&dir.path().join("s").join(table)).len(),
            1,
            "{table}"
        );
    }
}

#[test]
fn tau_grid_gives_one_row_per_tau() {
    let dir = workspace();
    let o = sim(
        &[
            "--seed", "4", "illusion", "--model", "m.txt", "--mode", "async", "--tau", "1,2,4,8",
            "--delay", "1", "--beta", "0.5", "--sweeps", "2000", "--out", "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("r/metrics.csv"));
    let taus: Vec<&str> = rows
        .iter()
        .filter(|r| r[1] == "async")
        .map(|r| r[3].as_str())
        .collect();
    assert_eq!(taus, ["1", "2", "4", "8"]);
    assert_eq!(
        code(&sim(
            &["plotdata", "--results", "r", "--out", "plots"],
            dir.path()
        )),
        0
    );
    let acc = csv_rows(&dir.path().join("plots/accuracy_vs_tau.csv"));
    assert_eq!(acc.len(), 5);
    let energy = csv_rows(&dir.path().join("r/sweep_energy.csv"));
    assert_eq!(energy.len(), 5 * 2000);
}

#[test]
fn convert_round_trips_through_native() {
    let dir = workspace();
    fs::write(dir.path().join("g.txt"), "3 3\n1 2 1.5\n2 3 2\n1 3 0.25\n").unwrap();
    let o = sim(
        &[
            "convert",
            "--input",
            "g.txt",
            "--from",
            "gset",
            "--output",
            "out/g_native.txt",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let native = fs::read_to_string(dir.path().join("out/g_native.txt")).unwrap();
    let gset = fs::read_to_string(dir.path().join("g.txt")).unwrap();
    assert_eq!(
        parse_model(&native, Format::Native).unwrap().model,
        parse_model(&gset, Format::Gset).unwrap().model
    );
    let o = sim(
        &[
            "partition",
            "--model",
            "out/g_native.txt",
            "--k",
            "2",
            "--out",
            "p",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p/partition.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["result"]["assignment"].as_array().unwrap().len(), 3);
}

#[test]
fn seed_changes_the_output() {
    let dir = workspace();
    for (seed, out) in [("1", "a"), ("2", "b")] {
        let o = sim(
            &[
                "--seed", seed, "sample", "--model", "m.txt", "--sweeps", "500", "--out", out,
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0);
    }
    let a = fs::read(dir.path().join("a/sweep_energy.csv")).unwrap();
    let b = fs::read(dir.path().join("b/sweep_energy.csv")).unwrap();
    assert_ne!(a, b);
}
