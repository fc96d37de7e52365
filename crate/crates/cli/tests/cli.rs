//! End-to-end tests of the binary: report round-trips, sweep row
//! isolation, the exit-code contract, and file output.

use std::process::{Command, Output};

use geomgate_cli::commands::SWEEP_HEADER;
use geomgate_cli::report::Report;

fn geomgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomgate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = geomgate(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {path}: {e}"))
}

/// Stored reports deserialize into the schema types and re-render to
/// the identical bytes, so the schema and the files stay in lock step.
#[test]
fn golden_reports_round_trip_exactly() {
    for name in ["phases_circle.json", "controlled_u_worked.json"] {
        let text = golden(name);
        let report: Report = serde_json::from_str(&text)
            .unwrap_or_else(|e| panic!("{name} does not parse into the schema: {e}"));
        assert_eq!(report.schema_version, "1");
        assert_eq!(report.render_json(), text, "{name} re-render differs");
    }
}

fn csv_rows(table: &str) -> Vec<Vec<String>> {
    table
        .lines()
        .skip(1)
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

/// A row whose parameters are invalid keeps its inputs, carries the
/// error code in the last column, and never disturbs its neighbours.
#[test]
fn sweep_isolates_failed_rows() {
    let table = stdout_of(&[
        "sweep",
        "--axis",
        "omega1",
        "--values",
        "0.2,1.5,0.5",
        "--omega",
        "1",
        "--circle",
    ]);
    assert!(table.starts_with(SWEEP_HEADER));
    let rows = csv_rows(&table);
    assert_eq!(rows.len(), 3);
    for (index, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 14, "row {index} has wrong arity: {row:?}");
        assert_eq!(row[0], index.to_string());
    }

    // omega1 = 1.5 lies outside the circle's domain.
    assert_eq!(rows[1][13], "OutOfDomain");
    assert!(rows[1][4].is_empty(), "failed row leaks a lambda value");
    assert!(!rows[1][1].is_empty() && !rows[1][2].is_empty(), "inputs must stay");

    for index in [0, 2] {
        let row = &rows[index];
        assert!(row[13].is_empty(), "healthy row {index} carries an error");
        let lambda: f64 = row[4].parse().expect("lambda parses");
        assert!(lambda > 0.0);
    }
}

/// A degenerate invariant (omega1 = omega, omega2 = 0) is a row error,
/// not a process error.
#[test]
fn sweep_flags_degenerate_rows() {
    let table = stdout_of(&[
        "sweep", "--axis", "omega2", "--values", "0,0.5", "--omega1", "1",
    ]);
    let rows = csv_rows(&table);
    assert_eq!(rows[0][13], "DegenerateInvariant");
    assert!(rows[1][13].is_empty());
}

/// On the zero-dynamic-phase circle every row's dynamic columns vanish
/// and the constraint sits exactly on k = 0.
#[test]
fn circle_sweep_kills_dynamic_phase() {
    let table = stdout_of(&[
        "sweep",
        "--axis",
        "omega1",
        "--values",
        "0.1,0.3,0.5,0.7,0.9",
        "--omega",
        "1",
        "--circle",
    ]);
    for row in csv_rows(&table) {
        assert!(row[13].is_empty(), "circle row failed: {row:?}");
        let dynamic_upper: f64 = row[7].parse().unwrap();
        let dynamic_lower: f64 = row[8].parse().unwrap();
        let nearest_k: i64 = row[11].parse().unwrap();
        let residual: f64 = row[12].parse().unwrap();
        assert!(dynamic_upper.abs() <= 1e-12);
        assert!(dynamic_lower.abs() <= 1e-12);
        assert_eq!(nearest_k, 0);
        assert!(residual.abs() <= 1e-12);
    }
}

#[test]
fn empty_sweep_emits_header_only() {
    let table = stdout_of(&["sweep", "--axis", "omega2", "--values", "", "--omega1", "0.5"]);
    assert_eq!(table, format!("{SWEEP_HEADER}\n"));
}

/// Configuration mistakes exit 2; simulation and solver failures exit 1.
#[test]
fn exit_codes_follow_the_contract() {
    // Parameter outside its validated range.
    let out = geomgate(&["phases", "--omega1", "-1", "--omega2", "0.5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigParseError"));

    // Malformed value expression (rejected by the argument parser).
    let out = geomgate(&["phases", "--omega1", "2*sqrt(-3)/4", "--omega2", "0.5"]);
    assert_eq!(exit_code(&out), 2);

    // Flags from both drive families at once.
    let out = geomgate(&["phases", "--omega1", "0.5", "--omega2", "0.5", "--J", "0.1"]);
    assert_eq!(exit_code(&out), 2);

    // Sweeps are CSV; reports are JSON.
    let out = geomgate(&[
        "sweep", "--axis", "omega1", "--values", "0.5", "--omega2", "0.2", "--format", "json",
    ]);
    assert_eq!(exit_code(&out), 2);
    let out = geomgate(&["phases", "--omega1", "0.5", "--omega2", "0.5", "--format", "csv"]);
    assert_eq!(exit_code(&out), 2);

    // Synthesis and constraint modes cannot be mixed.
    let out = geomgate(&["solve", "--gamma", "2.0", "--K", "1"]);
    assert_eq!(exit_code(&out), 2);

    // No cycle count closes the fast block for this drive.
    let out = geomgate(&["controlled-u", "--J", "0.5", "--omega0", "0.3"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("NoCommensurateCycle"));

    // Commensurate (lambda1 = 5/3 exactly) but off the elimination
    // constraint: J^2 - J omega + omega0^2 = -1/45.
    let out = geomgate(&["controlled-u", "--J", "3/5", "--omega0", "7/15"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConstraintViolated"));

    // Collapsed invariant gap (omega1 = omega, omega2 = 0).
    let out = geomgate(&["phases", "--omega1", "1", "--omega2", "0"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateInvariant"));

    // A target phase at the collapse point of the invariant gap.
    let out = geomgate(&["solve", "--gamma", "3.141592653589793"]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnreachablePhase"));
}

/// A verify run that misses its tolerances is a soft completion: the
/// full report is still written, `pass` goes false, and the process
/// exits 0 — nonzero status is reserved for hard errors.
#[test]
fn verify_soft_failure_reports_pass_false() {
    let out = geomgate(&[
        "verify",
        "--omega1",
        "5",
        "--omega2",
        "5",
        "--steps",
        "1000",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: Report =
        serde_json::from_slice(&out.stdout).expect("soft failure still prints the report");
    let rendered = report.render_json();
    assert!(rendered.contains("\"pass\": false"));
}

#[test]
fn output_flag_writes_the_report_file() {
    let path = format!("{}/phases_report.json", env!("CARGO_TARGET_TMPDIR"));
    let _ = std::fs::remove_file(&path);
    let out = geomgate(&[
        "phases",
        "--omega1",
        "0.5",
        "--omega2",
        "0.5",
        "--no-timestamp",
        "--output",
        &path,
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty(), "report must go to the file, not stdout");
    let written = std::fs::read_to_string(&path).expect("file written");
    assert_eq!(written, golden("phases_circle.json"));
    let _ = std::fs::remove_file(&path);
}

/// Timestamped runs carry the two volatile fields; reproducible runs
/// omit them entirely.
#[test]
fn timestamp_fields_toggle() {
    let with = stdout_of(&["phases", "--omega1", "0.5", "--omega2", "0.5"]);
    assert!(with.contains("\"timestamp_unix_s\""));
    assert!(with.contains("\"runtime_ms\""));
    let without = stdout_of(&["phases", "--omega1", "0.5", "--omega2", "0.5", "--no-timestamp"]);
    assert!(!without.contains("timestamp_unix_s"));
    assert!(!without.contains("runtime_ms"));
}
