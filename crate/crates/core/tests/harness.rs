use std::fs;
use std::process::Command;

use cdhdg::harness::{run_checks, run_convergence, run_fields, MeshChoice, ProblemChoice, RunConfig};
use cdhdg::hdg::Method;
use cdhdg::linalg::{cond2, SparseRowMatrix};
use cdhdg::mesh::Diagonal;
use cdhdg::post::convergence_orders;
use cdhdg::problems::CustomProblem;

fn builtin(name: &str) -> ProblemChoice {
    ProblemChoice::Builtin(name.into())
}

#[test]
fn zero_data_gives_zero_solution() {
    let config = RunConfig {
        problem: ProblemChoice::Custom(CustomProblem {
            name: "zero".into(),
            beta: ["1".into(), "0.5".into()],
            source: "0".into(),
            dirichlet: "0".into(),
            exact: Some("0".into()),
        }),
        epsilons: vec![1e-3],
        ks: vec![0, 2],
        levels: vec![2, 4],
        methods: Method::ALL.to_vec(),
        ..RunConfig::default()
    };
    for t in run_convergence(&config).unwrap() {
        for r in &t.rows {
            assert!(r.u_error.unwrap() <= 1e-12);
            assert!(r.q_error.unwrap() <= 1e-12);
            assert_eq!(r.u_order, None, "{} k={} n={}", t.method, r.k, r.n);
        }
    }
}

fn field_range(problem: &str, eps: f64, k: usize) -> (f64, f64) {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { problem: builtin(problem), epsilons: vec![eps], ks: vec![k], levels: vec![8], ..RunConfig::default() };
    let arts = run_fields(&config, dir.path()).unwrap();
    assert_eq!(arts.len(), 1);
    assert!(arts[0].all_finite);
    assert!(arts[0].path.exists());
    (arts[0].min, arts[0].max)
}

#[test]
fn field_values_stay_in_range() {
    for (problem, eps, k, lo, hi) in [("rotating", 1e-6, 0, -0.05, 1.05), ("interior_layer", 1e-9, 0, -0.05, 1.05), ("smooth", 1.0, 2, -1.2, 1.2)] {
        let (min, max) = field_range(problem, eps, k);
        assert!(min >= lo && max <= hi, "{problem}: [{min}, {max}]");
    }
}

#[test]
fn checks_pass_on_coarse_meshes() {
    let config = RunConfig { epsilons: vec![1.0, 1e-9], ks: vec![0, 1], levels: vec![2], methods: Method::ALL.to_vec(), ..RunConfig::default() };
    let report = run_checks(&config).unwrap();
    for o in report.outcomes.iter().filter(|o| o.required) {
        assert!(o.pass, "{}: {}", o.name, o.detail);
    }
    assert!(report.all_pass);
    assert!(report.find("tau_zero_rejected").count() > 0);
    let differs: Vec<_> = report.find("mhdg_differs").collect();
    assert!(!differs.is_empty());
    for o in differs {
        assert!(o.pass, "{}", o.detail);
    }
}

#[test]
fn one_by_one_condition_number() {
    let a = SparseRowMatrix::from_triplets(1, 1, &[(0, 0, -3.5)]);
    assert_eq!(cond2(&a).unwrap().value, 1.0);
}

fn read_all(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv" || x == "vtk"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let config = RunConfig { ks: vec![0, 1, 2], levels: vec![4, 8, 16], methods: Method::ALL.to_vec(), postprocess: true, ..RunConfig::default() };
    let runs: Vec<_> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            for t in run_convergence(&config).unwrap() {
                t.write_to_dir(dir.path()).unwrap();
            }
            run_fields(&RunConfig { levels: vec![4], ..config.clone() }, dir.path()).unwrap();
            let files = read_all(dir.path());
            assert!(!files.is_empty());
            files
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn csv_orders_follow_errors() {
    let config = RunConfig { ks: vec![1], levels: vec![2, 4, 8], mesh: MeshChoice::Structured { diagonal: Diagonal::NW }, ..RunConfig::default() };
    let dir = tempfile::tempdir().unwrap();
    let table = run_convergence(&config).unwrap().remove(0);
    let path = table.write_to_dir(dir.path()).unwrap();
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (ih, ie, io) = (col("h"), col("u_error"), col("u_order"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let hs: Vec<f64> = rows.iter().map(|r| r[ih].parse().unwrap()).collect();
    let es: Vec<f64> = rows.iter().map(|r| r[ie].parse().unwrap()).collect();
    assert!(rows[0][io].is_empty());
    for (r, o) in rows[1..].iter().zip(convergence_orders(&es, &hs)) {
        let printed: f64 = r[io].parse().unwrap();
        assert!((printed - o.unwrap()).abs() < 1e-3, "{printed} vs {o:?}");
    }
}

#[test]
fn cli_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_cdhdg"))
        .args(["convergence", "--k", "0,1", "--levels", "2,4", "--method", "hdg1,hdg3", "--epsilon", "1e-3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "convergence");
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    for o in outputs {
        assert!(std::path::Path::new(o.as_str().unwrap()).exists());
    }

    let bad = Command::new(env!("CARGO_BIN_EXE_cdhdg")).args(["convergence", "--problem", "nope", "--out"]).arg(&out).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn cli_checks_and_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_cdhdg")).args(args).arg("--out").arg(dir.path()).output().unwrap();
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    };
    run(&["checks", "--k", "0", "--epsilon", "1e-6"]);
    assert!(dir.path().join("checks.json").exists());
    run(&["mesh", "generate", "--n", "5", "--kind", "streamline"]);
    let mesh = dir.path().join("mesh_streamline_n5.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_cdhdg")).args(["mesh", "validate"]).arg(&mesh).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("mesh assumption (C=1): pass"));
}
