use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use cdhdg::harness::{run_checks, run_conditioning, run_convergence, run_fields, HarnessError, Manifest, ProblemChoice, RunConfig, ScalingMode};
use cdhdg::hdg::Method;
use cdhdg::mesh::{check_mesh_assumption, read_text, streamline_mesh, structured_unit_square, write_text, write_vtk, Diagonal, Mesh, StreamlineOptions};

#[derive(Parser)]
#[command(name = "cdhdg", version, about = "HDG solver for convection-diffusion on the unit square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error tables over mesh refinement.
    Convergence(RunArgs),
    /// Condition numbers of the trace operator.
    Conditioning(RunArgs),
    /// Sampled solution fields as VTK.
    Fields(RunArgs),
    /// Validator, mesh assumption, MH-DG and identity checks.
    Checks(RunArgs),
    /// Generate or validate a mesh.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem name.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Mesh levels n (n x n squares).
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<Method>>,
    #[arg(long)]
    scaling: Option<ScalingMode>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.problem {
            c.problem = ProblemChoice::Builtin(p.clone());
        }
        if let Some(v) = &self.epsilon {
            c.epsilons = v.clone();
        }
        if let Some(v) = &self.k {
            c.ks = v.clone();
        }
        if let Some(v) = &self.levels {
            c.levels = v.clone();
        }
        if let Some(v) = &self.method {
            c.methods = v.clone();
        }
        if let Some(s) = self.scaling {
            c.scaling = s;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand)]
enum MeshAction {
    /// Structured or streamline mesh of the unit square.
    Generate {
        #[arg(long)]
        n: usize,
        /// ne, nw or streamline.
        #[arg(long, default_value = "ne")]
        kind: String,
        /// Constant velocity used by the streamline mesher and the checker.
        #[arg(long, value_delimiter = ',', default_value = "1,1")]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reads a mesh file, checks consistency and the mesh assumption.
    Validate {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,1")]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

fn write_manifest(command: &str, config: &RunConfig, out: &Path, start: Instant, outputs: &[PathBuf]) -> Result<(), HarnessError> {
    fs::create_dir_all(out).map_err(|e| HarnessError::Io { path: out.into(), message: e.to_string() })?;
    let names = outputs.iter().map(|p| p.display().to_string()).collect();
    let path = Manifest::new(command, config, start.elapsed(), names).write(out)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn beta_pair(v: &[f64]) -> Result<[f64; 2], String> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(format!("--beta takes two components, got {}", v.len())),
    }
}

fn mesh_command(action: &MeshAction) -> Result<(), String> {
    match action {
        MeshAction::Generate { n, kind, beta, c, out } => {
            let b = beta_pair(beta)?;
            let mesh: Mesh = match kind.as_str() {
                "ne" => structured_unit_square(*n, Diagonal::NE).map_err(|e| e.to_string())?,
                "nw" => structured_unit_square(*n, Diagonal::NW).map_err(|e| e.to_string())?,
                "streamline" => {
                    let opts = StreamlineOptions { c: *c, ..StreamlineOptions::default() };
                    let s = streamline_mesh(&move |_| b, 1.0 / *n as f64, opts).map_err(|e| e.to_string())?;
                    println!("streamline mesh: {} elements, {} repair sweeps", s.mesh.n_elements(), s.sweeps);
                    s.mesh
                }
                other => return Err(format!("unknown mesh kind {other:?}, expected ne, nw or streamline")),
            };
            let rep = check_mesh_assumption(&mesh, &move |_| b, *c);
            println!("mesh assumption (C={c}): {} ({} violations)", if rep.pass { "pass" } else { "fail" }, rep.violations.len());
            fs::create_dir_all(out).map_err(|e| e.to_string())?;
            let stem = format!("mesh_{kind}_n{n}");
            let txt = out.join(format!("{stem}.txt"));
            write_text(&mesh, fs::File::create(&txt).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let tris: Vec<[usize; 3]> = mesh.elements.iter().map(|e| e.vertices).collect();
            let vtk = out.join(format!("{stem}.vtk"));
            write_vtk(fs::File::create(&vtk).map_err(|e| e.to_string())?, &stem, &mesh.vertices, &tris, &[]).map_err(|e| e.to_string())?;
            println!("wrote {} and {}", txt.display(), vtk.display());
            Ok(())
        }
        MeshAction::Validate { path, beta, c } => {
            let b = beta_pair(beta)?;
            let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mesh = read_text(BufReader::new(file)).map_err(|e| e.to_string())?;
            mesh.validate()?;
            println!("{}: {} elements, {} faces, consistent", path.display(), mesh.n_elements(), mesh.n_faces());
            let rep = check_mesh_assumption(&mesh, &move |_| b, *c);
            println!("mesh assumption (C={c}): {} ({} violations)", if rep.pass { "pass" } else { "fail" }, rep.violations.len());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let start = Instant::now();
    let err = |e: HarnessError| e.to_string();
    match &cli.command {
        Command::Convergence(a) => {
            let config = a.resolve().map_err(err)?;
            let mut outputs = Vec::new();
            for t in run_convergence(&config).map_err(err)? {
                let p = t.write_to_dir(&a.out).map_err(err)?;
                println!("wrote {}", p.display());
                outputs.push(p);
            }
            write_manifest("convergence", &config, &a.out, start, &outputs).map_err(err)?;
        }
        Command::Conditioning(a) => {
            let config = a.resolve().map_err(err)?;
            let mut outputs = Vec::new();
            for t in run_conditioning(&config).map_err(err)? {
                let p = t.write_to_dir(&a.out).map_err(err)?;
                println!("wrote {}", p.display());
                outputs.push(p);
            }
            write_manifest("conditioning", &config, &a.out, start, &outputs).map_err(err)?;
        }
        Command::Fields(a) => {
            let mut config = a.resolve().map_err(err)?;
            if a.config.is_none() && a.levels.is_none() {
                config.levels = vec![8];
            }
            let arts = run_fields(&config, &a.out).map_err(err)?;
            for f in &arts {
                println!("wrote {} (u_h in [{:.4}, {:.4}])", f.path.display(), f.min, f.max);
            }
            let outputs: Vec<_> = arts.into_iter().map(|f| f.path).collect();
            write_manifest("fields", &config, &a.out, start, &outputs).map_err(err)?;
        }
        Command::Checks(a) => {
            let mut config = a.resolve().map_err(err)?;
            if a.config.is_none() && a.levels.is_none() {
                config.levels = vec![2];
            }
            let report = run_checks(&config).map_err(err)?;
            for o in &report.outcomes {
                let tag = match (o.pass, o.required) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "info",
                };
                println!("{tag} {} {}", o.name, o.detail);
            }
            fs::create_dir_all(&a.out).map_err(|e| e.to_string())?;
            let path = a.out.join("checks.json");
            fs::write(&path, serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n").map_err(|e| e.to_string())?;
            write_manifest("checks", &config, &a.out, start, &[path]).map_err(err)?;
            return Ok(report.all_pass);
        }
        Command::Mesh { action } => mesh_command(action)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
