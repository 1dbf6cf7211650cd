mod common;

use std::fs;
use std::process::{Command, Output};

use descriptor_pencil::cli::config::{Engine, ScenarioConfig};
use descriptor_pencil::cli::output::{parse_csv, polyline_points, render_svg, PlotFrame, Series};
use descriptor_pencil::cli::scenario::{verify, Fault};
use descriptor_pencil::cli::{plot_svg, simulate_csv};

fn dpencil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpencil"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    fs::write(&bad_key, "a = 0.5\nflavour = mint\n").unwrap();
    let cases: [(&[&str], i32); 7] = [
        (&["simulate"], 0),
        (&["simulate", "--horizon", "ten"], 1),
        (&["simulate", "--config", bad_key.to_str().unwrap()], 1),
        (&["simulate", "--b", "-1"], 2),
        (&["simulate", "--horizon", "2"], 2),
        (&["simulate", "--config", "/no/such/file.cfg"], 3),
        (&["simulate", "--out", "/no/such/dir/out.csv"], 3),
    ];
    for (args, code) in cases {
        assert_eq!(dpencil(args).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn validation_message_names_the_bound() {
    let out = dpencil(&["eigen", "--a", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("a = 1.5") && err.contains("0 < a < 1"),
        "{err}"
    );
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    let csv = dir.path().join("out.csv");
    fs::write(
        &cfg,
        "# damped cycle\na = 0.5\nb = 1\nexpenditure = 1, 1, 1, 1, 1, 1\nhorizon = 5\nengine = oracle\n",
    )
    .unwrap();
    let out = dpencil(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.contains("\n5,2.5,1.25,0.25,1\n"), "{text}");

    // flags win over the file
    let out = dpencil(&["simulate", "--config", cfg.to_str().unwrap(), "--gbar", "2"]);
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows[2].t, 2.0);
    assert_eq!(rows.last().unwrap().g, Some(2.0));
}

#[test]
fn short_inline_expenditure_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "expenditure = 1, 1, 1\nhorizon = 5\n").unwrap();
    assert_eq!(
        dpencil(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn engines_write_the_same_prefix() {
    let texts: Vec<String> = ["pencil", "closed_form", "oracle"]
        .iter()
        .map(|e| stdout(&dpencil(&["simulate", "--engine", e, "--horizon", "3"])))
        .collect();
    for t in &texts {
        assert!(
            t.starts_with("k,T,C,I,G\n0,0,,,1\n1,0,0,,1\n2,1,0,0,1\n3,2,0.5,0.5,1\n"),
            "{t}"
        );
    }
}

#[test]
fn eigen_report_lists_structure() {
    let text = stdout(&dpencil(&["eigen"]));
    for line in [
        "det(sF - G) = 1.00000000000 s^2 - 1.00000000000 s + 0.500000000000",
        "s1 = 0.500000000000 + 0.500000000000i",
        "s2 = 0.500000000000 - 0.500000000000i",
        "p = 2",
        "q = 1",
        "q_star = 1",
        "regime = oscillatory, stable",
    ] {
        assert!(text.contains(line), "missing `{line}` in\n{text}");
    }
    let unstable = stdout(&dpencil(&["eigen", "--b", "4"]));
    assert!(unstable.contains("unstable"), "{unstable}");
}

#[test]
fn verify_reports_and_grid() {
    let out = dpencil(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("result: PASS\n"));
    let grid = dpencil(&["verify", "--grid", "--horizon", "30"]);
    assert_eq!(grid.status.code(), Some(0));
    assert_eq!(
        stdout(&grid)
            .lines()
            .filter(|l| l.starts_with("a=") && l.contains(": PASS"))
            .count(),
        135
    );
}

#[test]
fn verify_fault_injection_fails() {
    let cfg = ScenarioConfig::default();
    let params = cfg.validate().unwrap();
    let fault = Fault {
        engine: Engine::Pencil,
        k: 10,
        delta: 1e-3,
    };
    let report = verify(&cfg, &params, Some(fault)).unwrap();
    assert!(!report.pass);
    assert!((report.pencil.absolute - 1e-3).abs() < 1e-9);
    assert!(report.closed_form.absolute < 1e-12);
    assert!(report.render().ends_with("result: FAIL\n"));
}

#[test]
fn verify_zero_scenario_at_minimum_horizon() {
    let out = dpencil(&[
        "verify",
        "--horizon",
        "3",
        "--gbar",
        "0",
        "--t0",
        "0",
        "--t1",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("pencil: max abs deviation 0.00000000000"),
        "{text}"
    );
}

#[test]
fn plot_of_zero_trajectory_is_flat_on_the_baseline() {
    let cfg = ScenarioConfig {
        expenditure: descriptor_pencil::cli::config::Expenditure::Constant(0.0),
        horizon: 20,
        ..Default::default()
    };
    let svg = plot_svg(&cfg).unwrap();
    for id in ["T", "C", "I"] {
        let pts = polyline_points(&svg, id).unwrap();
        assert_eq!(pts.len(), 19);
        // baseline y of value 0 is the bottom margin
        assert!(pts.iter().all(|&(_, y)| y == 460.0), "{id}: {pts:?}");
    }
}

#[test]
fn plot_of_damped_cycle_has_decaying_swings() {
    let cfg = ScenarioConfig {
        horizon: 80,
        t1: 6.0,
        ..Default::default()
    };
    let svg = plot_svg(&cfg).unwrap();
    let pts = polyline_points(&svg, "T").unwrap();
    let (_, steady_y) = plot_frame(&cfg).to_px(0.0, 2.0);
    // successive local extrema of |y - steady| shrink
    let dev: Vec<f64> = pts.iter().map(|&(_, y)| (y - steady_y).abs()).collect();
    let peaks: Vec<f64> = (1..dev.len() - 1)
        .filter(|&j| dev[j] >= dev[j - 1] && dev[j] >= dev[j + 1] && dev[j] > 1e-3)
        .map(|j| dev[j])
        .collect();
    assert!(peaks.len() >= 3, "{peaks:?}");
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

fn plot_frame(cfg: &ScenarioConfig) -> PlotFrame {
    let csv = parse_csv(&simulate_csv(cfg).unwrap()).unwrap();
    let body = &csv[2..];
    let cols: [Vec<f64>; 3] = [
        body.iter().map(|r| r.t).collect(),
        body.iter().map(|r| r.c.unwrap()).collect(),
        body.iter().map(|r| r.i.unwrap()).collect(),
    ];
    let series: Vec<Series> = cols
        .iter()
        .zip(["T", "C", "I"])
        .map(|(v, name)| Series {
            name,
            color: "black",
            values: v,
        })
        .collect();
    render_svg("", 2, &series).1
}

#[test]
fn plotted_point_maps_back_to_data() {
    let cfg = ScenarioConfig {
        horizon: 12,
        ..Default::default()
    };
    let svg = plot_svg(&cfg).unwrap();
    let frame = plot_frame(&cfg);
    let pts = polyline_points(&svg, "T").unwrap();
    // third point is k = 4, where T = 2.5
    let (k, t) = frame.to_data(pts[2].0, pts[2].1);
    assert!(
        (k - 4.0).abs() < 1e-3 && (t - 2.5).abs() < 1e-3,
        "({k}, {t})"
    );
}

#[test]
fn plot_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.svg");
    let out = dpencil(&["plot", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 4);
}
