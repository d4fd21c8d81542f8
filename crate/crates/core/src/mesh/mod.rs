//! Triangular meshes: construction, refinement, edge topology and boundary
//! partitioning.
//!
//! A mesh is the pair `node` (vertex coordinates) and `elem` (vertex index
//! triples, counterclockwise). Everything else is derived by
//! [`MeshTopology::new`] and [`BoundaryPartition::classify`].

mod boundary;
mod selector;
mod topology;

pub use boundary::{classify_boundary, BoundaryPartition, BoundaryRegion};
pub use selector::{parse_selector, Selector};
pub use topology::{build_topology, BoundaryEdge, MeshTopology};

use crate::{Error, Result};

/// Vertex coordinates and counterclockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2d {
    pub node: Vec<[f64; 2]>,
    pub elem: Vec<[usize; 3]>,
}

impl Mesh2d {
    /// Validates indices and orientation.
    pub fn new(node: Vec<[f64; 2]>, elem: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Self { node, elem };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.node.len();
        for (e, tri) in self.elem.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {e} references vertex {v} but there are only {n} vertices"
                )));
            }
            let area = self.signed_area(e);
            if !(area > 0.0) {
                return Err(Error::Orientation { elem: e, area });
            }
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.node.len()
    }

    pub fn n_elems(&self) -> usize {
        self.elem.len()
    }

    pub fn vertices(&self, e: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.elem[e];
        [self.node[a], self.node[b], self.node[c]]
    }

    pub fn signed_area(&self, e: usize) -> f64 {
        let [p1, p2, p3] = self.vertices(e);
        0.5 * ((p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elems()).map(|e| self.signed_area(e)).sum()
    }

    /// Flips clockwise triangles so that every signed area is positive.
    pub fn orient_counterclockwise(&mut self) {
        for e in 0..self.elem.len() {
            if self.signed_area(e) < 0.0 {
                self.elem[e].swap(1, 2);
            }
        }
    }
}

/// Uniform grid on `[x0, x1] x [y0, y1]` with spacing `h`, each cell split
/// along its lower-left to upper-right diagonal.
///
/// Vertices are numbered row by row starting at `(x0, y0)`.
pub fn square_mesh(bbox: [f64; 4], h: f64) -> Result<Mesh2d> {
    let [x0, x1, y0, y1] = bbox;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("mesh spacing must be positive, got {h}")));
    }
    if !(x1 > x0) || !(y1 > y0) {
        return Err(Error::InvalidArgument(format!("degenerate bounding box {bbox:?}")));
    }
    let cells = |len: f64| -> Result<usize> {
        let n = (len / h).round();
        if n < 1.0 || ((n * h - len).abs() > 1e-9 * len.max(1.0)) {
            return Err(Error::InvalidArgument(format!(
                "spacing {h} does not divide side length {len}"
            )));
        }
        Ok(n as usize)
    };
    let nx = cells(x1 - x0)?;
    let ny = cells(y1 - y0)?;

    let mut node = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // interpolate rather than accumulate so the far sides are exact
        let y = y0 + (y1 - y0) * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = x0 + (x1 - x0) * i as f64 / nx as f64;
            node.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elem = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (p00, p10, p11, p01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            elem.push([p00, p10, p11]);
            elem.push([p00, p11, p01]);
        }
    }
    Ok(Mesh2d { node, elem })
}

/// Splits every triangle into four through its edge midpoints.
///
/// The midpoint of global edge `k` becomes vertex `N + k`, so `N' = N + NE`
/// and `NT' = 4 NT`.
pub fn uniform_refine(mesh: &Mesh2d) -> Result<Mesh2d> {
    let topo = MeshTopology::new(mesh)?;
    let n = mesh.n_nodes();
    let mut node = mesh.node.clone();
    node.extend(topo.edge.iter().map(|&[a, b]| {
        let (pa, pb) = (mesh.node[a], mesh.node[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }));
    let mut elem = Vec::with_capacity(4 * mesh.n_elems());
    for (tri, e2e) in mesh.elem.iter().zip(&topo.elem2edge) {
        let [a, b, c] = *tri;
        let [m0, m1, m2] = [n + e2e[0], n + e2e[1], n + e2e[2]];
        elem.push([a, m2, m1]);
        elem.push([m2, b, m0]);
        elem.push([m1, m0, c]);
        elem.push([m0, m1, m2]);
    }
    Ok(Mesh2d { node, elem })
}

/// Grid spacing of a structured unit-square mesh, `1/(sqrt(N) - 1)`.
pub fn unit_square_spacing(mesh: &Mesh2d) -> f64 {
    1.0 / ((mesh.n_nodes() as f64).sqrt() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(h: f64) -> Mesh2d {
        square_mesh([0.0, 1.0, 0.0, 1.0], h).unwrap()
    }

    #[test]
    fn square_mesh_counts() {
        let m = unit(0.5);
        assert_eq!((m.n_nodes(), m.n_elems()), (9, 8));
        let m = unit(1.0);
        assert_eq!((m.n_nodes(), m.n_elems()), (4, 2));
        let m = square_mesh([0.0, 2.0, 0.0, 1.0], 0.5).unwrap();
        assert_eq!((m.n_nodes(), m.n_elems()), (15, 16));
        assert!(m.validate().is_ok());
    }

    #[test]
    fn square_mesh_rejects_bad_input() {
        assert!(square_mesh([0.0, 1.0, 0.0, 1.0], 0.0).is_err());
        assert!(square_mesh([0.0, 1.0, 0.0, 1.0], -0.5).is_err());
        assert!(square_mesh([1.0, 1.0, 0.0, 1.0], 0.5).is_err());
        assert!(square_mesh([0.0, 1.0, 0.0, 1.0], 0.3).is_err());
    }

    #[test]
    fn refine_counts_and_area() {
        let m = unit(0.5);
        let r = uniform_refine(&m).unwrap();
        assert_eq!((r.n_nodes(), r.n_elems()), (25, 32));
        assert!(r.validate().is_ok());
        assert!((r.total_area() - 1.0).abs() < 1e-12);

        let r2 = uniform_refine(&r).unwrap();
        assert_eq!(unit_square_spacing(&r2), 0.125);
    }

    #[test]
    fn refine_single_triangle() {
        let m = Mesh2d::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let r = uniform_refine(&m).unwrap();
        assert_eq!((r.n_nodes(), r.n_elems()), (6, 4));
        for e in 0..4 {
            assert!((r.signed_area(e) - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_clockwise_and_out_of_range() {
        let node = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        match Mesh2d::new(node.clone(), vec![[0, 2, 1]]) {
            Err(Error::Orientation { elem: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(Mesh2d::new(node, vec![[0, 1, 3]]).is_err());
    }
}
