use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wql::svg::fit_slope;
use wql::REPORT_COLUMNS;
use wql_core::domain::{gen_point_set, PointSet, PointSetKind};

fn wql(mode: &str, dir: &Path, config: &str) -> Output {
    let cfg = dir.join(format!("{mode}.cfg"));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_wql"))
        .arg(mode)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn read_csv(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn col(head: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = head.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn eval_of_constant_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = wql(
        "eval",
        dir.path(),
        "d=2\nm=16\nN=4\npointset=midpoint_grid\nfamily=linear\ncoeffs=0,0\noffset=7\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/eval.csv"));
    assert_eq!(head, REPORT_COLUMNS);
    assert_eq!(rows.len(), 1);
    for c in ["E", "ratio_kr", "ratio_theorem", "ratio_prop"] {
        assert_eq!(col(&head, &rows, c), vec![0.0]);
    }
}

#[test]
fn eval_rows_are_self_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let out = wql(
        "eval",
        dir.path(),
        "mode=eval\nd=2\nm=32\nN=9\npointset=jittered\nseeds=4,2\nfamily=extremal_eps\neps=0.03,0.08\n",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/eval.csv"));
    assert_eq!(rows.len(), 4);
    let seeds = col(&head, &rows, "seed");
    assert_eq!(seeds, vec![2.0, 2.0, 4.0, 4.0]);
    let e = col(&head, &rows, "E");
    for (rhs, ratio) in [("rhs_kr", "ratio_kr"), ("rhs_theorem", "ratio_theorem"), ("rhs_prop", "ratio_prop")] {
        for ((e, r), q) in e.iter().zip(col(&head, &rows, rhs)).zip(col(&head, &rows, ratio)) {
            assert!((e / r - q).abs() <= 1e-9);
        }
    }
    let (dh, drows) = read_csv(dir.path().join("out/eval_delta.csv"));
    assert_eq!(drows.len(), 12);
    assert_eq!(col(&dh, &drows, "delta")[..3], [0.5, 1.0, 2.0]);
}

#[test]
fn sweep_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let m = 64;
    let out = wql(
        "sweep",
        dir.path(),
        &format!("d=2\nm={m}\nsweep_N=64,4,16\npointset=midpoint_grid\nfamily=extremal_eps\neps_rel=0.25\n"),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/sweep.csv"));
    assert_eq!(col(&head, &rows, "N"), vec![4.0, 16.0, 64.0]);
    let winf = col(&head, &rows, "winf");
    for (w, k) in winf.iter().zip([2.0, 4.0, 8.0]) {
        assert!((w - 2f64.sqrt() / (2.0 * k)).abs() <= 2.0 / m as f64);
    }
    let eps = col(&head, &rows, "eps_or_delta");
    for (e, w) in eps.iter().zip(&winf) {
        assert!((e - w / 4.0).abs() < 1e-15);
    }

    let input = dir.path().join("out/sweep.csv");
    let out = wql("plot", dir.path(), &format!("input={}\nx=N\ny=winf\noutput=winf.svg\n", input.display()));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(dir.path().join("out/winf.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);

    // map the polyline back to log-log data through the advertised ranges
    let attr = |name: &str| -> Vec<f64> {
        let start = svg.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end].split([' ', ',']).map(|t| t.parse().unwrap()).collect()
    };
    let (lx, ly) = (attr("data-log-x"), attr("data-log-y"));
    let pts = attr("points");
    let (left, right, top, bottom) = (72.0, 640.0 - 24.0, 36.0, 420.0 - 52.0);
    let xs: Vec<f64> = pts.chunks(2).map(|p| lx[0] + (p[0] - left) / (right - left) * (lx[1] - lx[0])).collect();
    let ys: Vec<f64> = pts.chunks(2).map(|p| ly[0] + (bottom - p[1]) / (bottom - top) * (ly[1] - ly[0])).collect();
    for (x, n) in xs.iter().zip([4.0f64, 16.0, 64.0]) {
        assert!((x - n.log10()).abs() < 1e-3);
    }
    let slope = fit_slope(&xs, &ys);
    assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
    assert!((attr("data-slope")[0] - slope).abs() < 1e-3);
}

#[test]
fn lemma_modes_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = wql("lemma1", dir.path(), "d=2\nm=128\nscenario=ball\nradius=0.5\ncap=0.05,0.1\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/lemma1.csv"));
    assert_eq!(rows.len(), 2);
    for r in col(&head, &rows, "ratio") {
        assert!(r > 0.3 && r < 0.7);
    }

    let out = wql("lemma1", dir.path(), "d=2\nm=128\nscenario=cone\nradius=1\ncap=0.05\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("half_width"));

    let out = wql("lemma4", dir.path(), "d=2\nm=128\nfamily=distance_cap\nradius=0.25,1\n");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/lemma4.csv"));
    let r = col(&head, &rows, "ratio");
    assert!((r[0] / r[1] - 1.0).abs() < 0.05);
}

#[test]
fn audit_and_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = wql("gen-points", dir.path(), "d=2\nN=16\npointset=full_random\nseed=7\n");
    assert!(out.status.success());
    let path = dir.path().join("out/points.txt");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("d=2 n=16\n"));
    let pts = PointSet::from_text(&text, "file").unwrap();
    let direct = gen_point_set(PointSetKind::FullRandom, 2, 16, 7).unwrap();
    assert_eq!(pts.coords(), direct.coords());

    let out = wql(
        "audit",
        dir.path(),
        &format!("d=2\nm=32\npoints={}\nfamily=extremal_eps\neps=0.05\n", path.display()),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (head, rows) = read_csv(dir.path().join("out/audit.csv"));
    assert_eq!(rows.len(), 1);
    assert!(col(&head, &rows, "triangle_slack")[0] >= -1e-9);
    assert!(col(&head, &rows, "overlap_ratio")[0] <= col(&head, &rows, "overlap_bound")[0]);
    assert!(col(&head, &rows, "density_ratio")[0] <= 1.0);
    let (_, regions) = read_csv(dir.path().join("out/audit_regions.csv"));
    assert_eq!(regions.len(), 16);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = wql("eval", dir.path(), "d=0\n");
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`d`"));

    let unknown = wql("eval", dir.path(), "unknownkey=1\n");
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknownkey"));

    let mismatch = wql("sweep", dir.path(), "mode=eval\nd=2\nN=4\nfamily=linear\ncoeffs=1,0\n");
    assert_eq!(mismatch.status.code(), Some(1));

    let not_power = wql("eval", dir.path(), "d=2\nN=5\nfamily=linear\ncoeffs=1,0\n");
    assert_eq!(not_power.status.code(), Some(1));

    // 200^3 cells exceed the grid budget: a numerical failure
    let budget = wql("eval", dir.path(), "d=3\nm=200\nN=1\npointset=single\nfamily=linear\ncoeffs=1,0,0\n");
    assert_eq!(budget.status.code(), Some(2), "{}", String::from_utf8_lossy(&budget.stderr));

    let status = Command::new(env!("CARGO_BIN_EXE_wql")).arg("nonsense").output().unwrap();
    assert_eq!(status.status.code(), Some(1));
}
