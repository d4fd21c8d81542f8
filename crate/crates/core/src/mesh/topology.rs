use super::Mesh2d;
use crate::{Error, Result};

/// A boundary edge, oriented counterclockwise with respect to its only
/// adjacent triangle so that the domain lies to its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// Index into [`MeshTopology::edge`].
    pub edge: usize,
    pub nodes: [usize; 2],
    pub elem: usize,
    /// Local edge index in `elem` (the edge opposite local vertex `local`).
    pub local: usize,
}

impl BoundaryEdge {
    pub fn midpoint(&self, mesh: &Mesh2d) -> [f64; 2] {
        let (a, b) = (mesh.node[self.nodes[0]], mesh.node[self.nodes[1]]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn length(&self, mesh: &Mesh2d) -> f64 {
        let (a, b) = (mesh.node[self.nodes[0]], mesh.node[self.nodes[1]]);
        (b[0] - a[0]).hypot(b[1] - a[1])
    }

    /// Outward unit normal.
    pub fn normal(&self, mesh: &Mesh2d) -> [f64; 2] {
        let (a, b) = (mesh.node[self.nodes[0]], mesh.node[self.nodes[1]]);
        let (tx, ty) = (b[0] - a[0], b[1] - a[1]);
        let len = tx.hypot(ty);
        [ty / len, -tx / len]
    }
}

/// Edge list and adjacency derived from a [`Mesh2d`].
#[derive(Debug, Clone)]
pub struct MeshTopology {
    /// Unique edges, `edge[k][0] < edge[k][1]`, sorted lexicographically.
    pub edge: Vec<[usize; 2]>,
    /// `elem2edge[e][i]` is the global edge opposite local vertex `i`.
    pub elem2edge: Vec<[usize; 3]>,
    /// Boundary edges in increasing global edge order.
    pub bd_edge: Vec<BoundaryEdge>,
    pub area: Vec<f64>,
    pub edge_length: Vec<f64>,
}

pub fn build_topology(mesh: &Mesh2d) -> Result<MeshTopology> {
    MeshTopology::new(mesh)
}

impl MeshTopology {
    pub fn new(mesh: &Mesh2d) -> Result<Self> {
        mesh.validate()?;
        let nt = mesh.n_elems();

        // (min, max, elem, local)
        let mut half: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * nt);
        for (e, tri) in mesh.elem.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                half.push((a.min(b), a.max(b), e, i));
            }
        }
        half.sort_unstable();

        let mut edge = Vec::new();
        let mut elem2edge = vec![[usize::MAX; 3]; nt];
        let mut bd_edge = Vec::new();
        let mut s = 0;
        while s < half.len() {
            let (a, b, _, _) = half[s];
            let mut t = s;
            while t < half.len() && half[t].0 == a && half[t].1 == b {
                t += 1;
            }
            let k = edge.len();
            edge.push([a, b]);
            for &(_, _, e, i) in &half[s..t] {
                elem2edge[e][i] = k;
            }
            match t - s {
                1 => {
                    let (_, _, e, i) = half[s];
                    let tri = mesh.elem[e];
                    bd_edge.push(BoundaryEdge {
                        edge: k,
                        nodes: [tri[(i + 1) % 3], tri[(i + 2) % 3]],
                        elem: e,
                        local: i,
                    });
                }
                2 => {}
                m => {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({a}, {b}) is shared by {m} triangles"
                    )))
                }
            }
            s = t;
        }

        let area = (0..nt).map(|e| mesh.signed_area(e)).collect();
        let edge_length = edge
            .iter()
            .map(|&[a, b]| {
                let (pa, pb) = (mesh.node[a], mesh.node[b]);
                (pb[0] - pa[0]).hypot(pb[1] - pa[1])
            })
            .collect();
        Ok(Self {
            edge,
            elem2edge,
            bd_edge,
            area,
            edge_length,
        })
    }

    pub fn n_edges(&self) -> usize {
        self.edge.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.bd_edge.len()
    }

    /// Boundary edges as oriented vertex pairs.
    pub fn bd_edge_nodes(&self) -> Vec<[usize; 2]> {
        self.bd_edge.iter().map(|b| b.nodes).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{square_mesh, uniform_refine};

    #[test]
    fn unit_square_topology() {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        assert_eq!(t.n_edges(), 16);
        assert_eq!(t.n_boundary_edges(), 8);
        assert_eq!(t.n_edges(), m.n_nodes() + m.n_elems() - 1);
    }

    #[test]
    fn single_triangle() {
        let m = Mesh2d::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        assert_eq!(t.area, vec![0.5]);
        assert_eq!(t.n_boundary_edges(), 3);
        // edge opposite vertex 0 joins vertices 1 and 2
        assert_eq!(t.edge[t.elem2edge[0][0]], [1, 2]);
        assert_eq!(t.edge[t.elem2edge[0][2]], [0, 1]);
    }

    #[test]
    fn edges_sorted_and_multiplicity() {
        let m = uniform_refine(&square_mesh([0.0, 2.0, 0.0, 1.0], 0.5).unwrap()).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        assert!(t.edge.iter().all(|e| e[0] < e[1]));
        let mut count = vec![0usize; t.n_edges()];
        for row in &t.elem2edge {
            for &k in row {
                count[k] += 1;
            }
        }
        let bd: Vec<usize> = t.bd_edge.iter().map(|b| b.edge).collect();
        for (k, &c) in count.iter().enumerate() {
            assert_eq!(c, if bd.contains(&k) { 1 } else { 2 });
        }
        assert_eq!(t.n_edges(), m.n_nodes() + m.n_elems() - 1);
    }

    #[test]
    fn boundary_normals_point_outward() {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        for b in &t.bd_edge {
            let mid = b.midpoint(&m);
            let n = b.normal(&m);
            let c = [mid[0] - 0.5, mid[1] - 0.5];
            assert!(n[0] * c[0] + n[1] * c[1] > 0.0);
        }
    }

    #[test]
    fn reports_orientation_error() {
        let m = Mesh2d {
            node: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            elem: vec![[0, 2, 1]],
        };
        assert!(matches!(MeshTopology::new(&m), Err(Error::Orientation { elem: 0, .. })));
    }
}
