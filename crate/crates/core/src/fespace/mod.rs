//! Continuous P1/P2/P3 Lagrange spaces on triangles.

mod basis;
mod tabulate;

pub use basis::{local_dof_lambdas, shape_lambda_derivatives, shape_values, trace_local_dofs};
pub use tabulate::{
    coef_matrix_from_dofs, coef_matrix_on_edges, evaluate_at_points, fe_values, integrate_fe, interpolate_nodal,
    lambda_gradients, tabulate_basis, tabulate_gradient, CoefMatrix, Domain, QuadGeometry, QuadTable,
};

use std::fmt;
use std::str::FromStr;

use crate::mesh::{Mesh2d, MeshTopology};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeSpace {
    P1,
    P2,
    P3,
}

impl FeSpace {
    pub fn from_degree(k: usize) -> Result<Self> {
        match k {
            1 => Ok(Self::P1),
            2 => Ok(Self::P2),
            3 => Ok(Self::P3),
            _ => Err(Error::UnknownSpace(format!("P{k}"))),
        }
    }

    pub fn degree(self) -> usize {
        match self {
            Self::P1 => 1,
            Self::P2 => 2,
            Self::P3 => 3,
        }
    }

    /// Local dof count `(k+1)(k+2)/2`.
    pub fn ndof(self) -> usize {
        let k = self.degree();
        (k + 1) * (k + 2) / 2
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::P1 => "P1",
            Self::P2 => "P2",
            Self::P3 => "P3",
        }
    }

    /// Quadrature order used when none is given, `k + 2`.
    pub fn default_quad_order(self) -> usize {
        self.degree() + 2
    }
}

impl fmt::Display for FeSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "P1" => Ok(Self::P1),
            "P2" => Ok(Self::P2),
            "P3" => Ok(Self::P3),
            other => Err(Error::UnknownSpace(other.to_string())),
        }
    }
}

/// Which derivative of a basis function to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Deriv {
    Val,
    Dx,
    Dy,
}

/// Global numbering of a Lagrange space.
///
/// Vertices come first, then edge dofs in global edge order (two per edge
/// for P3, running from the smaller to the larger vertex index), then one
/// interior dof per triangle for P3.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub space: FeSpace,
    elem2dof: Vec<usize>,
    pub n_dof: usize,
    pub dof_point: Vec<[f64; 2]>,
    n_nodes: usize,
}

pub fn build_dof_map(mesh: &Mesh2d, topo: &MeshTopology, space: FeSpace) -> DofMap {
    DofMap::new(mesh, topo, space)
}

impl DofMap {
    pub fn new(mesh: &Mesh2d, topo: &MeshTopology, space: FeSpace) -> Self {
        let (n, ne, nt) = (mesh.n_nodes(), topo.n_edges(), mesh.n_elems());
        let ndof = space.ndof();
        let mut elem2dof = Vec::with_capacity(nt * ndof);
        for (e, tri) in mesh.elem.iter().enumerate() {
            elem2dof.extend_from_slice(tri);
            for i in 0..3 {
                let k = topo.elem2edge[e][i];
                let forward = tri[(i + 1) % 3] < tri[(i + 2) % 3];
                match space {
                    FeSpace::P1 => {}
                    FeSpace::P2 => elem2dof.push(n + k),
                    FeSpace::P3 if forward => elem2dof.extend([n + 2 * k, n + 2 * k + 1]),
                    FeSpace::P3 => elem2dof.extend([n + 2 * k + 1, n + 2 * k]),
                }
            }
            if space == FeSpace::P3 {
                elem2dof.push(n + 2 * ne + e);
            }
        }

        let mut dof_point = mesh.node.clone();
        let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        match space {
            FeSpace::P1 => {}
            FeSpace::P2 => {
                dof_point.extend(topo.edge.iter().map(|&[a, b]| lerp(mesh.node[a], mesh.node[b], 0.5)));
            }
            FeSpace::P3 => {
                for &[a, b] in &topo.edge {
                    dof_point.push(lerp(mesh.node[a], mesh.node[b], 1.0 / 3.0));
                    dof_point.push(lerp(mesh.node[a], mesh.node[b], 2.0 / 3.0));
                }
                dof_point.extend(mesh.elem.iter().map(|&[a, b, c]| {
                    let (pa, pb, pc) = (mesh.node[a], mesh.node[b], mesh.node[c]);
                    [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]
                }));
            }
        }
        let n_dof = match space {
            FeSpace::P1 => n,
            FeSpace::P2 => n + ne,
            FeSpace::P3 => n + 2 * ne + nt,
        };
        debug_assert_eq!(dof_point.len(), n_dof);
        Self {
            space,
            elem2dof,
            n_dof,
            dof_point,
            n_nodes: n,
        }
    }

    pub fn n_elems(&self) -> usize {
        self.elem2dof.len() / self.space.ndof()
    }

    pub fn elem_dofs(&self, e: usize) -> &[usize] {
        let nd = self.space.ndof();
        &self.elem2dof[e * nd..(e + 1) * nd]
    }

    /// Dofs strictly inside global edge `k`, ordered from the smaller to the
    /// larger endpoint.
    pub fn edge_interior_dofs(&self, k: usize) -> Vec<usize> {
        let n = self.n_nodes;
        match self.space {
            FeSpace::P1 => vec![],
            FeSpace::P2 => vec![n + k],
            FeSpace::P3 => vec![n + 2 * k, n + 2 * k + 1],
        }
    }
}
