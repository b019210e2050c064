use std::fs;

use spincav_cli::config::parse_config;
use spincav_cli::emit::{emit, read_rows, write_rows, Format};
use spincav_cli::sweep::{run_sweep, Engine, Observable, SweepRow, SweepSpec, SweepVariable};
use spincav_core::{Direction, FockDims, PhysicalParams};

fn small(points: usize) -> SweepSpec {
    SweepSpec {
        variable: SweepVariable::Detuning,
        start: -25.0,
        stop: 25.0,
        points,
        directions: Direction::BOTH.to_vec(),
        observables: Observable::ALL.into_iter().collect(),
        cutoff: FockDims::square(3).unwrap(),
        engine: Engine::Both,
        detuning_override: None,
        tolerance: 1e-8,
        timing: false,
    }
}

fn table(rows: &[SweepRow], format: Format) -> Vec<u8> {
    let mut out = Vec::new();
    write_rows(rows, format, false, &mut out).unwrap();
    out
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x == y || (x - y).abs() <= 1e-11 * x.abs().max(y.abs()),
        _ => false,
    }
}

#[test]
fn round_trip_keeps_twelve_digits() {
    let rows = run_sweep(&small(5), &PhysicalParams::default(), 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for format in [Format::Csv, Format::Jsonl] {
        let path = dir.path().join("rows");
        emit(&rows, format, false, &path).unwrap();
        let back = read_rows(&path, format).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!((a.variable, a.direction, a.sweep_value), (b.variable, b.direction, b.sweep_value));
            assert_eq!(a.status, b.status);
            for (x, y) in [
                (a.t_total, b.t_total),
                (a.t_interference, b.t_interference),
                (a.g2_output_numeric, b.g2_output_numeric),
                (a.g2_output_analytic, b.g2_output_analytic),
                (a.g2_cavity_l_numeric, b.g2_cavity_l_numeric),
                (a.solver_residual, b.solver_residual),
            ] {
                assert!(close(x, y), "{x:?} vs {y:?}");
            }
        }
    }
}

#[test]
fn single_point_single_direction_is_one_csv_row() {
    let spec = SweepSpec { start: 20.0, stop: 20.0, points: 1, directions: vec![Direction::Cw], ..small(1) };
    let rows = run_sweep(&spec, &PhysicalParams::default(), 1).unwrap();
    let text = String::from_utf8(table(&rows, Format::Csv)).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("variable,sweep_value,direction,"));
    assert!(!text.contains("wall_time_ms"));
}

#[test]
fn output_is_byte_identical_across_runs_and_workers() {
    let p = PhysicalParams::default();
    let one = table(&run_sweep(&small(9), &p, 1).unwrap(), Format::Csv);
    let again = table(&run_sweep(&small(9), &p, 1).unwrap(), Format::Csv);
    let many = table(&run_sweep(&small(9), &p, 3).unwrap(), Format::Csv);
    assert_eq!(one, again);
    assert_eq!(one, many);
    let jsonl = table(&run_sweep(&small(9), &p, 2).unwrap(), Format::Jsonl);
    assert_eq!(jsonl, table(&run_sweep(&small(9), &p, 1).unwrap(), Format::Jsonl));
}

#[test]
fn timing_adds_a_column() {
    let spec = SweepSpec { timing: true, ..small(2) };
    let rows = run_sweep(&spec, &PhysicalParams::default(), 1).unwrap();
    let mut out = Vec::new();
    write_rows(&rows, Format::Csv, true, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",status,wall_time_ms"));
    assert!(rows.iter().all(|r| r.wall_time_ms.is_some()));
}

#[test]
fn zero_power_rows_are_flagged() {
    let config = parse_config("[device]\npower_fw = 0.0\n").unwrap();
    let rows = run_sweep(&small(3), &config.physical, 1).unwrap();
    assert!(rows.iter().all(|r| r.status == "ZERO_DRIVE" && r.t_total.is_none()));
    let text = String::from_utf8(table(&rows, Format::Jsonl)).unwrap();
    assert!(text.lines().all(|l| l.contains("\"t_total\":null") && l.contains("\"status\":\"ZERO_DRIVE\"")));
}

#[test]
fn empty_tables_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let err = emit(&[], Format::Csv, false, &dir.path().join("x.csv")).unwrap_err();
    assert_eq!(err.code(), "FORMAT_ERROR");
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = spincav_cli::config::load_config(&path).unwrap();
        config.sweep.to_spec(SweepVariable::Detuning).unwrap();
        config.sweep.to_spec(SweepVariable::RotationFreq).unwrap();
        seen += 1;
    }
    assert!(seen >= 2);
}
