mod common;

use common::{dirichlet, matrix, neumann};
use turing_unilateral::sweep::{
    emit_curves, format_float, read_curves, render_svg, sweep_curves, Spacing, SweepMode,
    SweepOptions, SweepWindow, CSV_HEADER,
};
use turing_unilateral::{Placement, SourceSinkProfile};

#[test]
fn window_spacing() {
    let lin = SweepWindow::new(1.0, 3.0, 3, Spacing::Linear).unwrap().points();
    assert_eq!(lin, vec![1.0, 2.0, 3.0]);
    let log = SweepWindow::new(1.0, 100.0, 3, Spacing::Log).unwrap().points();
    assert!((log[1] - 10.0).abs() < 1e-12);
    assert_eq!(log[2], 100.0);
    assert!(SweepWindow::new(2.0, 1.0, 4, Spacing::Log).is_err());
    assert!(SweepWindow::new(0.0, 1.0, 4, Spacing::Log).is_err());
}

#[test]
fn csv_round_trip_and_svg() {
    let b = matrix();
    let basis = neumann(256, 24);
    let sink = SourceSinkProfile::constant(0.0, 0.1, Placement::Interior, &basis).unwrap();
    let window = SweepWindow::new(1.0, 4.0, 3, Spacing::Log).unwrap();
    let result = sweep_curves(&window, &b, &basis, &sink, &SweepOptions::default()).unwrap();
    assert_eq!(result.samples.len(), 3);
    assert!(result.eps_est.unwrap() > 0.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curves.csv");
    emit_curves(&result.samples, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], CSV_HEADER.join(","));

    let back = read_curves(&path).unwrap();
    for (r, s) in back.iter().zip(&result.samples) {
        assert_eq!(r.d2, s.d2);
        assert_eq!(r.d1_max, s.d1_max);
        assert_eq!(r.d1_max_beta, s.d1_max_beta);
        assert_eq!(r.gap, s.gap);
        assert_eq!(r.argmax, s.argmax);
        assert_eq!(r.residual, s.residual);
        assert_eq!(r.sign_ok, s.sign_ok);
    }

    let svg = render_svg(&result.samples);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains(">d2<") && svg.contains(">d1<"));
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let b = matrix();
    let basis = dirichlet(256, 24);
    let prof = SourceSinkProfile::constant(0.5, 0.2, Placement::Interior, &basis).unwrap();
    let window = SweepWindow::new(0.5, 10.0, 6, Spacing::Log).unwrap();
    let seq = sweep_curves(&window, &b, &basis, &prof, &SweepOptions::default()).unwrap();
    let par_opts = SweepOptions {
        mode: SweepMode::ParallelCold,
        ..SweepOptions::default()
    };
    let par = sweep_curves(&window, &b, &basis, &prof, &par_opts).unwrap();
    for (a, c) in seq.samples.iter().zip(&par.samples) {
        let (x, y) = (a.d1_max_beta.unwrap(), c.d1_max_beta.unwrap());
        assert!((x - y).abs() <= 1e-8 * x.abs(), "{} {x} {y}", a.d2);
    }
}

#[test]
fn floats_round_trip() {
    assert_eq!(format_float(0.1), "0.1");
    assert_eq!(format_float(2.0), "2");
    assert_eq!(format_float(1.5e-9), "1.5e-9");
    assert_eq!(format_float(0.0), "0");
    for x in [0.16231645190283514, 1.0 / 3.0, 6.02e23, -4.4e-17] {
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
