use std::f64::consts::PI;

use euler_align::diagnostics::DiagnosticsRecord;
use euler_align::dynamics::{Formulation, SimState};
use euler_align::grid::{Grid, ScalarField, VectorField};
use euler_align::io::{
    decode_snapshot, encode_snapshot, read_series, read_snapshot, write_series, write_snapshot,
    SERIES_HEADER,
};
use euler_align::Error;

#[test]
fn series_header_is_fixed() {
    assert_eq!(
        SERIES_HEADER,
        "time,e_l2,e_hs,u_diss,grad_sigma_diss,cross,lyapunov,mass,max_grad_u,young_ok,threshold_margin"
    );
}

#[test]
fn empty_series_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_series(&path, &[]).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{SERIES_HEADER}\n"));
    assert!(read_series(&path).unwrap().is_empty());
}

#[test]
fn stored_values_survive_a_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let r = DiagnosticsRecord {
        time: 0.1,
        e_l2: PI / 7.0,
        e_hs: 1.0 / 3.0,
        u_diss: 5e-324,
        grad_sigma_diss: 1.7976931348623157e308,
        cross: -0.0,
        lyapunov: 0.30000000000000004,
        mass: PI,
        max_grad_u: 2.0f64.sqrt(),
        young_ok: true,
        threshold_margin: 1.5,
    };
    write_series(&path, &[r]).unwrap();
    let back = read_series(&path).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].e_l2.to_bits(), r.e_l2.to_bits());
    assert_eq!(back[0].lyapunov.to_bits(), r.lyapunov.to_bits());
    assert_eq!(back[0], r);
}

#[test]
fn missing_series_file_names_the_path() {
    let err = read_series(std::path::Path::new("/nonexistent/series.csv")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/series.csv"));
}

fn sample_state() -> SimState {
    let g = Grid::new(2, 2.0 * PI, 16).unwrap();
    SimState::new(
        Formulation::Symmetrized,
        ScalarField::from_fn(g, |x| 0.01 * (x[0] + 2.0 * x[1]).sin()),
        VectorField::from_fn(g, |x| [x[1].cos(), -x[0].sin() / 3.0]),
        1.25,
    )
    .unwrap()
}

#[test]
fn snapshot_file_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.bin");
    let s = sample_state();
    write_snapshot(&path, &s).unwrap();
    assert_eq!(read_snapshot(&path).unwrap(), s);
    let header = std::fs::read(&path).unwrap();
    let line = header.split(|&b| b == b'\n').next().unwrap();
    assert!(std::str::from_utf8(line).unwrap().starts_with("EALSNAP v1 dim=2 n=16 "));
}

#[test]
fn snapshot_version_mismatch_is_reported() {
    let bytes = encode_snapshot(&sample_state());
    let text = String::from_utf8_lossy(&bytes[..12]).replace("v1", "v9");
    let mut changed = text.into_bytes();
    changed.extend_from_slice(&bytes[12..]);
    match decode_snapshot(&changed) {
        Err(Error::Snapshot(m)) => assert!(m.contains("v9")),
        other => panic!("expected snapshot error, got {other:?}"),
    }
}

#[test]
fn snapshot_payload_length_must_match_header() {
    let bytes = encode_snapshot(&sample_state());
    let end = bytes.iter().position(|&b| b == b'\n').unwrap();
    let header = std::str::from_utf8(&bytes[..end]).unwrap().replace("n=16", "n=32");
    let mut changed = header.into_bytes();
    changed.extend_from_slice(&bytes[end..]);
    match decode_snapshot(&changed) {
        Err(Error::Snapshot(m)) => assert!(m.contains("payload")),
        other => panic!("expected snapshot error, got {other:?}"),
    }
}
