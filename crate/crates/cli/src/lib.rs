//! Command-line front end for the femform drivers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use femform::fespace::FeSpace;
use femform::io::{msh_from_mesh, read_freefem_msh, write_freefem_msh, write_results, ResultTable};
use femform::mesh::{square_mesh, uniform_refine, Mesh2d, MeshTopology};
use femform::problems::{
    run_biharmonic, run_elasticity_displacement, run_elasticity_tensor, run_heat, run_ns_newton, run_poisson,
    run_stokes, BiharmonicMode, BiharmonicSpec, ElasticitySpec, HeatSpec, MeshSource, NsSpec, PoissonSpec,
    StokesSpec, TimeStep, H1, L2, P_L2,
};
use femform::system::RateReport;

#[derive(Debug, Parser)]
#[command(name = "fem", version, about = "2D finite element problem suite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a model problem on a sequence of refined meshes.
    Run(RunArgs),
    /// Generate or inspect a mesh.
    Mesh(MeshArgs),
    /// Rewrite a FreeFEM mesh, optionally refining it.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Poisson,
    ElasticityDisp,
    ElasticityTensor,
    BiharmonicBlock,
    BiharmonicVector,
    Stokes,
    Heat,
    NsNewton,
}

#[derive(Debug, Clone, Args)]
pub struct MeshOpts {
    /// FreeFEM `.msh` file for the coarse mesh.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Rectangle `x0,x1,y0,y1` for a generated mesh.
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
    pub square: Option<[f64; 4]>,
    /// Grid spacing of the generated mesh.
    #[arg(long)]
    pub h: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub problem: Problem,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Number of mesh levels.
    #[arg(long, default_value_t = 4)]
    pub refine: usize,
    /// Boundary selector, e.g. "x==0"; may be repeated.
    #[arg(long = "bdstr")]
    pub bd_str: Vec<String>,
    #[command(flatten)]
    pub mesh: MeshOpts,
    /// CSV file for the error table.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Time step for the heat problem; defaults to h^(k+1).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct MeshArgs {
    #[command(flatten)]
    pub mesh: MeshOpts,
    /// Uniform refinements applied after loading or generating.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    /// Print node, triangle and edge counts.
    #[arg(long)]
    pub info: bool,
    /// Write the mesh as a FreeFEM `.msh` file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
}

fn parse_bbox(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid number `{t}`")))
        .collect::<Result<_, _>>()?;
    let b: [f64; 4] = v.try_into().map_err(|_| "expected x0,x1,y0,y1".to_string())?;
    if !(b[0] < b[1] && b[2] < b[3]) {
        return Err("expected x0 < x1 and y0 < y1".into());
    }
    Ok(b)
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(femform::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<femform::Error> for CliError {
    fn from(e: femform::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

/// A `run` invocation with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: Problem,
    pub space: FeSpace,
    pub quad_order: usize,
    pub levels: usize,
    pub bd_str: Vec<String>,
    pub mesh: MeshSource,
    pub out: Option<PathBuf>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub nu: Option<f64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn mesh_source(opts: &MeshOpts) -> Result<MeshSource, CliError> {
    match (&opts.mesh, opts.square) {
        (Some(_), Some(_)) => Err(usage("--mesh and --square are mutually exclusive")),
        (Some(_), None) if opts.h.is_some() => Err(usage("--h only applies to generated meshes")),
        (Some(path), None) => Ok(MeshSource::Mesh(read_freefem_msh(path)?.mesh)),
        (None, bbox) => {
            let h = opts.h.unwrap_or(0.25);
            if !(h > 0.0) {
                return Err(usage(format!("--h must be positive, got {h}")));
            }
            Ok(MeshSource::Square {
                bbox: bbox.unwrap_or([0.0, 1.0, 0.0, 1.0]),
                h,
            })
        }
    }
}

pub fn validate(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mixed = matches!(args.problem, Problem::Stokes | Problem::NsNewton);
    let degree = args.degree.unwrap_or(if mixed { 2 } else { 1 });
    if !(1..=3).contains(&degree) {
        return Err(usage(format!("--degree must be 1, 2 or 3, got {degree}")));
    }
    if args.problem == Problem::Stokes && degree < 2 {
        return Err(usage("stokes needs velocity degree 2 or 3"));
    }
    if args.problem == Problem::NsNewton && degree != 2 {
        return Err(usage("ns-newton uses P2/P1 elements only"));
    }
    if args.refine == 0 {
        return Err(usage("--refine must be at least 1"));
    }
    let space = FeSpace::from_degree(degree).map_err(|e| usage(e.to_string()))?;
    let quad_order = args.quad_order.unwrap_or(match args.problem {
        Problem::Stokes => 5,
        Problem::NsNewton => 7,
        _ => space.default_quad_order(),
    });
    if quad_order == 0 {
        return Err(usage("--quad-order must be positive"));
    }
    let positive = |name: &str, v: Option<f64>| match v {
        Some(x) if !(x > 0.0) => Err(usage(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    };
    positive("dt", args.dt)?;
    positive("t-end", args.t_end)?;
    positive("nu", args.nu)?;
    positive("tol", args.tol)?;
    Ok(RunConfig {
        problem: args.problem,
        space,
        quad_order,
        levels: args.refine,
        bd_str: args.bd_str.clone(),
        mesh: mesh_source(&args.mesh)?,
        out: args.out.clone(),
        dt: args.dt,
        t_end: args.t_end,
        nu: args.nu,
        max_iter: args.max_iter,
        tol: args.tol,
    })
}

/// Error table with `#Dof` (triangle count), `h` and the error columns.
pub fn report_table(report: &RateReport) -> ResultTable {
    let mut table = ResultTable::new(["#Dof".to_string(), "h".to_string()].into_iter().chain(report.names().iter().map(|s| s.to_string())));
    for i in 0..report.levels() {
        let mut row = vec![report.n_elems[i] as f64, report.h[i]];
        row.extend(report.columns.iter().map(|(_, c)| c[i]));
        table.push_row(row).expect("row width matches headers");
    }
    table
}

/// Prints the table, with a slope row when there are two or more levels,
/// and writes the CSV if a path is given.
pub fn emit_table(report: &RateReport, sink: &mut dyn Write, csv: Option<&std::path::Path>) -> Result<(), CliError> {
    if report.levels() == 0 {
        return Err(CliError::Runtime(femform::Error::InvalidArgument("empty error table".into())));
    }
    let table = report_table(report);
    let mut cells: Vec<Vec<String>> = vec![table.headers.clone()];
    for row in &table.rows {
        cells.push(row.iter().enumerate().map(|(c, &v)| table.format_cell(c, v)).collect());
    }
    if report.levels() >= 2 {
        let mut row = vec!["slope".to_string(), String::new()];
        row.extend(report.slopes()?.iter().map(|s| format!("{s:.2}")));
        cells.push(row);
    }
    let widths: Vec<usize> = (0..table.headers.len()).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut text = String::from("Table: Error\n");
    for row in &cells {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        writeln!(text, "{}", line.join("  ")).expect("write to string");
    }
    sink.write_all(text.as_bytes())?;
    if let Some(path) = csv {
        write_results(path, &table)?;
    }
    Ok(())
}

fn ns_spec(cfg: &RunConfig) -> NsSpec {
    let mut spec = NsSpec::new(cfg.mesh.clone());
    spec.refine = cfg.levels - 1;
    spec.quad_order = cfg.quad_order;
    if let Some(nu) = cfg.nu {
        spec.nu = nu;
    }
    if let Some(n) = cfg.max_iter {
        spec.max_iter = n;
    }
    if let Some(t) = cfg.tol {
        spec.tol = t;
    }
    spec
}

pub fn execute_run(cfg: &RunConfig, sink: &mut dyn Write) -> Result<(), CliError> {
    let disc = |d: &mut femform::problems::Discretization| {
        d.mesh = cfg.mesh.clone();
        d.quad_order = Some(cfg.quad_order);
    };
    let report = match cfg.problem {
        Problem::Poisson => {
            let mut spec = PoissonSpec::new(cfg.space, cfg.levels);
            disc(&mut spec.disc);
            spec.bd_str = cfg.bd_str.clone();
            run_poisson(&spec)?.report
        }
        Problem::ElasticityDisp | Problem::ElasticityTensor => {
            let mut spec = ElasticitySpec::new(cfg.space, cfg.levels);
            disc(&mut spec.disc);
            if !cfg.bd_str.is_empty() {
                spec.bd_str = cfg.bd_str.clone();
            }
            if cfg.problem == Problem::ElasticityDisp {
                run_elasticity_displacement(&spec)?.report
            } else {
                run_elasticity_tensor(&spec)?.report
            }
        }
        Problem::BiharmonicBlock | Problem::BiharmonicVector => {
            let mode = if cfg.problem == Problem::BiharmonicBlock { BiharmonicMode::Block } else { BiharmonicMode::Vector };
            let mut spec = BiharmonicSpec::new(cfg.space, cfg.levels, mode);
            disc(&mut spec.disc);
            run_biharmonic(&spec)?.report
        }
        Problem::Stokes => {
            let mut spec = StokesSpec::new(cfg.levels);
            spec.disc.space = cfg.space;
            disc(&mut spec.disc);
            if let Some(nu) = cfg.nu {
                spec.nu = nu;
            }
            run_stokes(&spec)?.report
        }
        Problem::Heat => {
            let mut spec = HeatSpec::new(cfg.space, cfg.levels);
            disc(&mut spec.disc);
            spec.bd_str = cfg.bd_str.clone();
            if let Some(dt) = cfg.dt {
                spec.step = TimeStep::Fixed(dt);
            }
            if let Some(t) = cfg.t_end {
                spec.t_end = t;
            }
            run_heat(&spec)?.report
        }
        Problem::NsNewton => {
            let out = run_ns_newton(&ns_spec(cfg))?;
            let mut text = String::from("Newton increments\n");
            for (i, d) in out.increments.iter().enumerate() {
                writeln!(text, "{:>4}  {}", i + 1, femform::io::format_sci(*d)).expect("write to string");
            }
            sink.write_all(text.as_bytes())?;
            if !out.converged {
                return Err(CliError::Runtime(femform::Error::InvalidArgument(format!(
                    "Newton iteration did not reach tolerance in {} steps",
                    out.increments.len()
                ))));
            }
            let h = match &cfg.mesh {
                MeshSource::Square { h, .. } => h / f64::powi(2.0, cfg.levels as i32 - 1),
                MeshSource::Mesh(_) => longest_edge(&out.mesh)?,
            };
            let mut report = RateReport::new(&[L2, H1, P_L2]);
            report.push(out.mesh.n_elems(), h, &out.errors)?;
            report
        }
    };
    emit_table(&report, sink, cfg.out.as_deref())
}

fn longest_edge(mesh: &Mesh2d) -> femform::Result<f64> {
    let topo = MeshTopology::new(mesh)?;
    Ok(topo
        .edge
        .iter()
        .map(|&[a, b]| {
            let (p, q) = (mesh.node[a], mesh.node[b]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .fold(0.0, f64::max))
}

fn refined(mut mesh: Mesh2d, times: usize) -> femform::Result<Mesh2d> {
    for _ in 0..times {
        mesh = uniform_refine(&mesh)?;
    }
    Ok(mesh)
}

pub fn execute_mesh(args: &MeshArgs, sink: &mut dyn Write) -> Result<(), CliError> {
    let mesh = match mesh_source(&args.mesh)? {
        MeshSource::Square { bbox, h } => square_mesh(bbox, h)?,
        MeshSource::Mesh(m) => m,
    };
    let mesh = refined(mesh, args.refine)?;
    let topo = MeshTopology::new(&mesh)?;
    if args.info || args.out.is_none() {
        writeln!(sink, "N={} NT={} NE={}", mesh.n_nodes(), mesh.n_elems(), topo.edge.len())?;
    }
    if let Some(path) = &args.out {
        write_freefem_msh(path, &msh_from_mesh(&mesh, &topo))?;
    }
    Ok(())
}

/// Reads a `.msh` file and writes it back with counterclockwise triangles;
/// labels survive unless the mesh is refined.
pub fn execute_convert(args: &ConvertArgs) -> Result<(), CliError> {
    let mut data = read_freefem_msh(&args.input)?;
    if args.refine > 0 {
        let mesh = refined(data.mesh, args.refine)?;
        let topo = MeshTopology::new(&mesh)?;
        data = msh_from_mesh(&mesh, &topo);
    } else {
        data.mesh.orient_counterclockwise();
    }
    write_freefem_msh(&args.output, &data)?;
    Ok(())
}

pub fn execute(cli: &Cli, sink: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => execute_run(&validate(args)?, sink),
        Command::Mesh(args) => execute_mesh(args, sink),
        Command::Convert(args) => execute_convert(args),
    }
}
