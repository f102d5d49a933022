use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use jamgraph::corpus::{demo13_sphere, tammes13_reference};
use jamgraph::io::{self, EmbeddingFile, Meta};
use jamgraph::render::{render_svg, RenderOptions};
use jamgraph::solver::{
    initial_embedding, is_m_representation, solve_stable, InitStrategy, MRepReport, SolverParams,
};
use jamgraph::validation::{
    check_pseudo_embedding, faces_from_embedding, faces_match, jamming_report, with_outer_cycle,
    FaceList, JammingReport, PseudoEmbeddingReport, Verdict, TOL_FLAT,
};
use jamgraph::Error;

const EXIT_INVALID: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "jamgraph",
    version,
    about = "Stable representations of graphs and jamming checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Auto,
    Centroid,
    Random,
    Spectral,
}

impl From<Init> for InitStrategy {
    fn from(i: Init) -> Self {
        match i {
            Init::Auto => InitStrategy::Auto,
            Init::Centroid => InitStrategy::Centroid,
            Init::Random => InitStrategy::Random,
            Init::Spectral => InitStrategy::Spectral,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the stable representation of a graph file.
    Solve {
        graph: PathBuf,
        #[arg(long, env = "JAMGRAPH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_sweeps: Option<usize>,
        /// Sweep displacement below which the relaxation stops.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "auto")]
        init: Init,
        /// Embedding output path (standard output if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the full solver trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check an embedding file; prints a JSON report. Runs every check when
    /// no check is selected.
    Check {
        embedding: PathBuf,
        #[arg(long)]
        jamming: bool,
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        mrep: bool,
        /// Tolerance of the M-representation check.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Draw an embedding file as SVG.
    Render {
        embedding: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        /// Overlay disks of the packing radius.
        #[arg(long)]
        disks: bool,
    },
    /// Solve the bundled 13-point contact graph on the sphere.
    Demo13 {
        #[arg(long, env = "JAMGRAPH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        init: Init,
        /// Also write the solved embedding.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(path: &Path, err: &Error) -> ExitCode {
    match err {
        Error::Json(j) => eprintln!(
            "error: {}: malformed JSON at line {} column {}: {j}",
            path.display(),
            j.line(),
            j.column()
        ),
        other => eprintln!("error: {}: {other}", path.display()),
    }
    ExitCode::from(EXIT_INVALID)
}

fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn base_dir(path: &Path) -> Option<&Path> {
    path.parent().filter(|p| !p.as_os_str().is_empty())
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    path: &Path,
    seed: u64,
    max_sweeps: Option<usize>,
    tol: Option<f64>,
    init: Init,
    out: Option<&Path>,
    trace_out: Option<&Path>,
) -> ExitCode {
    let gf = match io::read_graph(path) {
        Ok(gf) => gf,
        Err(e) => return fail(path, &e),
    };
    let (g, start) = match gf.to_graph() {
        Ok(x) => x,
        Err(e) => return fail(path, &e),
    };
    let mut params = SolverParams {
        rng_seed: seed,
        init: init.into(),
        ..SolverParams::default()
    };
    if let Some(m) = max_sweeps {
        params.max_sweeps = m;
    }
    if let Some(t) = tol {
        params.tol_displacement = t;
    }
    let solved =
        initial_embedding(&g, &params, Some(&start)).and_then(|e0| solve_stable(&g, &e0, &params));
    let (e, trace) = match solved {
        Ok(x) => x,
        Err(e) => return fail(path, &e),
    };
    let meta = Meta {
        solver: Some((&params).into()),
        trace: Some((&trace).into()),
    };
    let mut file = EmbeddingFile::new(&g, &e, meta);
    if let Some(graph) = file.graph.as_mut() {
        graph.faces = gf.faces.clone();
    }
    if let Err(err) = write_out(out, &io::to_json(&file)) {
        return fail(out.unwrap_or(path), &err.into());
    }
    if let Some(t) = trace_out {
        if let Err(err) = std::fs::write(t, io::to_json(&trace)) {
            return fail(t, &err.into());
        }
    }
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "{}: {} after {} sweeps and {} descent steps",
        path.display(),
        if trace.converged {
            "converged"
        } else {
            "not converged"
        },
        trace.sweeps,
        trace.descent_steps
    );
    if trace.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    }
}

#[derive(Serialize)]
struct PseudoSection {
    faces: FaceList,
    #[serde(skip_serializing_if = "Option::is_none")]
    supplied_faces_match: Option<bool>,
    report: PseudoEmbeddingReport,
    pass: bool,
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    mrep: Option<MRepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pseudo: Option<PseudoSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jamming: Option<JammingReport>,
    pass: bool,
}

fn cmd_check(
    path: &Path,
    mut jamming: bool,
    mut pseudo: bool,
    mut mrep: bool,
    tol: f64,
) -> ExitCode {
    if !(jamming || pseudo || mrep) {
        (jamming, pseudo, mrep) = (true, true, true);
    }
    let resolved = io::read_embedding(path).and_then(|f| f.resolve(base_dir(path)));
    let (g, e, gf) = match resolved {
        Ok(x) => x,
        Err(err) => return fail(path, &err),
    };
    let run = || -> jamgraph::Result<CheckReport> {
        let mut pass = true;
        let mrep = if mrep {
            let r = is_m_representation(&g, &e, tol)?;
            pass &= r.is_m_representation;
            Some(r)
        } else {
            None
        };
        let pseudo = if pseudo {
            let go = with_outer_cycle(&g);
            let faces = faces_from_embedding(&go, &e, TOL_FLAT)?;
            let report = check_pseudo_embedding(&go, &e, &faces)?;
            let supplied_faces_match = gf.faces.as_ref().map(|s| faces_match(s, &faces));
            let ok = report.is_pseudo_embedding && supplied_faces_match != Some(false);
            pass &= ok;
            Some(PseudoSection {
                faces,
                supplied_faces_match,
                report,
                pass: ok,
            })
        } else {
            None
        };
        let jamming = if jamming {
            let r = jamming_report(&g, &e)?;
            pass &= r.verdict == Verdict::Jammed;
            Some(r)
        } else {
            None
        };
        Ok(CheckReport {
            mrep,
            pseudo,
            jamming,
            pass,
        })
    };
    match run() {
        Ok(report) => {
            print!("{}", io::to_json(&report));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(err) => fail(path, &err),
    }
}

fn cmd_render(path: &Path, out: &Path, width: u32, disks: bool) -> ExitCode {
    let resolved = io::read_embedding(path).and_then(|f| f.resolve(base_dir(path)));
    let (g, e, _) = match resolved {
        Ok(x) => x,
        Err(err) => return fail(path, &err),
    };
    match render_svg(&g, &e, &RenderOptions { width, disks }) {
        Ok(svg) => match std::fs::write(out, svg) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => fail(out, &err.into()),
        },
        Err(err) => fail(path, &err),
    }
}

#[derive(Serialize)]
struct Demo13Report {
    seed: u64,
    converged: bool,
    sweeps: usize,
    descent_steps: usize,
    min_angle_deg: f64,
    reference_min_angle_deg: f64,
    angle_error_deg: f64,
    regular: bool,
    verdict: Verdict,
}

fn min_angle_deg(pts: &[jamgraph::surface::Vec3]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.min(p.dot(q).clamp(-1.0, 1.0).acos());
        }
    }
    best.to_degrees()
}

fn cmd_demo13(seed: u64, init: Init, out: Option<&Path>) -> ExitCode {
    let here = Path::new("demo13");
    let g = demo13_sphere();
    let params = SolverParams {
        rng_seed: seed,
        init: init.into(),
        ..SolverParams::default()
    };
    let solved = initial_embedding(&g, &params, None).and_then(|e0| solve_stable(&g, &e0, &params));
    let (e, trace) = match solved {
        Ok(x) => x,
        Err(err) => return fail(here, &err),
    };
    let jam = match jamming_report(&g, &e) {
        Ok(r) => r,
        Err(err) => return fail(here, &err),
    };
    let angle = min_angle_deg(&e.sphere_points());
    let reference = min_angle_deg(&tammes13_reference().0);
    let report = Demo13Report {
        seed,
        converged: trace.converged,
        sweeps: trace.sweeps,
        descent_steps: trace.descent_steps,
        min_angle_deg: angle,
        reference_min_angle_deg: reference,
        angle_error_deg: (angle - reference).abs(),
        regular: jam.regular,
        verdict: jam.verdict,
    };
    if let Some(p) = out {
        let meta = Meta {
            solver: Some((&params).into()),
            trace: Some((&trace).into()),
        };
        if let Err(err) = std::fs::write(p, io::to_json(&EmbeddingFile::new(&g, &e, meta))) {
            return fail(p, &err.into());
        }
    }
    print!("{}", io::to_json(&report));
    if trace.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve {
            graph,
            seed,
            max_sweeps,
            tol,
            init,
            out,
            trace,
        } => cmd_solve(
            &graph,
            seed,
            max_sweeps,
            tol,
            init,
            out.as_deref(),
            trace.as_deref(),
        ),
        Command::Check {
            embedding,
            jamming,
            pseudo,
            mrep,
            tol,
        } => cmd_check(&embedding, jamming, pseudo, mrep, tol),
        Command::Render {
            embedding,
            out,
            width,
            disks,
        } => cmd_render(&embedding, &out, width, disks),
        Command::Demo13 { seed, init, out } => cmd_demo13(seed, init, out.as_deref()),
    }
}
