//! Drivers for the model problems: each one assembles, solves and
//! measures errors over a sequence of uniformly refined meshes.

pub mod exact;

mod biharmonic;
mod elasticity;
mod heat;
mod navier_stokes;
mod poisson;
mod stokes;

pub use biharmonic::{run_biharmonic, BiharmonicMode, BiharmonicSpec};
pub use elasticity::{
    elasticity_strain_form, elasticity_strain_form_expanded, run_elasticity_displacement, run_elasticity_tensor,
    ElasticitySpec,
};
pub use exact::Field;
pub use heat::{run_heat, HeatExact, HeatSpec, TimeStep};
pub use navier_stokes::{run_ns_newton, NsInitial, NsOutput, NsSpec};
pub use poisson::{run_poisson, PoissonSpec};
pub use stokes::{run_stokes, StokesSpec};

use crate::fespace::{DofMap, FeSpace};
use crate::mesh::{square_mesh, uniform_refine, BoundaryPartition, Mesh2d, MeshTopology};
use crate::system::{error_h1_semi, error_l2, RateReport};
use crate::{Error, Result};

/// Column names shared by the drivers.
pub const L2: &str = "||u-u_h||";
pub const H1: &str = "|u-u_h|_1";
pub const P_L2: &str = "||p-p_h||";
pub const W_L2: &str = "||w-w_h||";
pub const W_H1: &str = "|w-w_h|_1";

/// Where the coarsest mesh comes from.
#[derive(Debug, Clone)]
pub enum MeshSource {
    /// `square_mesh(bbox, h)`.
    Square { bbox: [f64; 4], h: f64 },
    Mesh(Mesh2d),
}

impl MeshSource {
    pub fn unit_square(h: f64) -> Self {
        MeshSource::Square {
            bbox: [0.0, 1.0, 0.0, 1.0],
            h,
        }
    }
}

impl Default for MeshSource {
    fn default() -> Self {
        Self::unit_square(0.25)
    }
}

/// One mesh of a refinement sequence.
#[derive(Debug, Clone)]
pub struct Level {
    pub mesh: Mesh2d,
    pub topo: MeshTopology,
    /// Grid spacing for square meshes, longest edge otherwise.
    pub h: f64,
}

impl Level {
    pub fn new(mesh: Mesh2d, h: f64) -> Result<Self> {
        let topo = MeshTopology::new(&mesh)?;
        Ok(Self { mesh, topo, h })
    }

    pub fn partition<S: AsRef<str>>(&self, selectors: &[S]) -> Result<BoundaryPartition> {
        BoundaryPartition::classify(&self.mesh, &self.topo, selectors)
    }
}

fn max_edge_length(mesh: &Mesh2d, topo: &MeshTopology) -> f64 {
    topo.edge
        .iter()
        .map(|&[a, b]| {
            let (p, q) = (mesh.node[a], mesh.node[b]);
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .fold(0.0, f64::max)
}

/// The coarse mesh followed by `levels - 1` uniform refinements.
pub fn mesh_levels(source: &MeshSource, levels: usize) -> Result<Vec<Level>> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one mesh level is required".into()));
    }
    let (mut mesh, h0) = match source {
        MeshSource::Square { bbox, h } => (square_mesh(*bbox, *h)?, Some(*h)),
        MeshSource::Mesh(m) => {
            m.validate()?;
            (m.clone(), None)
        }
    };
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        if k > 0 {
            mesh = uniform_refine(&mesh)?;
        }
        let topo = MeshTopology::new(&mesh)?;
        let h = match h0 {
            Some(h) => h / f64::powi(2.0, k as i32),
            None => max_edge_length(&mesh, &topo),
        };
        out.push(Level {
            mesh: mesh.clone(),
            topo,
            h,
        });
    }
    Ok(out)
}

/// Degree, quadrature order and mesh sequence common to all drivers.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: MeshSource,
    pub levels: usize,
    pub space: FeSpace,
    /// Defaults to degree + 2.
    pub quad_order: Option<usize>,
}

impl Discretization {
    pub fn new(space: FeSpace, levels: usize) -> Self {
        Self {
            mesh: MeshSource::default(),
            levels,
            space,
            quad_order: None,
        }
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order.unwrap_or_else(|| self.space.default_quad_order())
    }
}

/// Final-level solution and the error table of a driver run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RateReport,
    pub mesh: Mesh2d,
    pub spaces: Vec<FeSpace>,
    /// Dofs per component on `mesh`.
    pub solution: Vec<Vec<f64>>,
}

/// L2 and H1-seminorm errors of a vector field, summed in quadrature
/// over components.
pub(crate) fn vector_errors(
    level: &Level,
    dofmaps: &[&DofMap],
    fields: &[&Field],
    dofs: &[&[f64]],
    order: usize,
) -> Result<(f64, f64)> {
    let (mut l2, mut h1) = (0.0, 0.0);
    for ((dm, f), u) in dofmaps.iter().zip(fields).zip(dofs) {
        l2 += error_l2(&level.mesh, &level.topo, dm, order, f.value.as_ref(), u)?.powi(2);
        h1 += error_h1_semi(&level.mesh, &level.topo, dm, order, f.grad.as_ref(), u)?.powi(2);
    }
    Ok((l2.sqrt(), h1.sqrt()))
}

/// Regions carrying natural (Neumann or Robin) data and the Dirichlet
/// region: with `S` selectors, regions `0..S` are natural and the
/// trailing region `S` is Dirichlet; with none, the whole boundary is
/// Dirichlet.
pub(crate) fn natural_and_dirichlet(partition: &BoundaryPartition) -> (Vec<usize>, usize) {
    let s = partition.selectors.len();
    ((0..s).collect(), s)
}
