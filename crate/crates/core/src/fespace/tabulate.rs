use super::basis::{shape_lambda_derivatives, shape_values, trace_local_dofs};
use super::{Deriv, DofMap, FeSpace};
use crate::mesh::{BoundaryEdge, Mesh2d, MeshTopology};
use crate::quadrature::{segment_rule, triangle_rule, MAX_SEGMENT_ORDER};
use crate::vform::{Tag, Term};
use crate::{Error, Result};

/// Dense `cells x points` table, row major.
///
/// Used both for tabulated basis functions and for coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTable {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

pub type CoefMatrix = QuadTable;

impl QuadTable {
    pub fn filled(nrows: usize, ncols: usize, value: f64) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![value; nrows * ncols],
        }
    }

    pub fn from_vec(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::Length {
                expected: nrows * ncols,
                got: data.len(),
            });
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.data.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// Elementwise sum of two tables of equal shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                expected: format!("{:?}", self.shape()),
                got: format!("{:?}", other.shape()),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { data, ..*self })
    }

    /// Elementwise product of two tables of equal shape.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                expected: format!("{:?}", self.shape()),
                got: format!("{:?}", other.shape()),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(Self { data, ..*self })
    }
}

/// Where a form is integrated.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    Interior,
    /// The listed boundary edges, with the trace of the 2D basis.
    Boundary(&'a [BoundaryEdge]),
}

/// Quadrature points, weights and cell measures for a [`Domain`].
///
/// A cell is a triangle for [`Domain::Interior`] and a boundary edge
/// otherwise.
#[derive(Debug, Clone)]
pub struct QuadGeometry {
    pub weights: Vec<f64>,
    pub measure: Vec<f64>,
    /// Physical coordinates of the quadrature points.
    pub x: QuadTable,
    pub y: QuadTable,
    lambda: Vec<[f64; 3]>,
    elem: Vec<usize>,
    /// Local edge of each boundary cell, empty for the interior.
    local_edge: Vec<usize>,
    /// Boundary cells carry their own barycentric points; interior cells
    /// share the rule's.
    boundary: bool,
}

impl QuadGeometry {
    pub fn new(mesh: &Mesh2d, topo: &MeshTopology, domain: Domain<'_>, quad_order: usize) -> Result<Self> {
        match domain {
            Domain::Interior => {
                let rule = triangle_rule(quad_order)?;
                let (nt, ng) = (mesh.n_elems(), rule.len());
                let mut x = QuadTable::filled(nt, ng, 0.0);
                let mut y = QuadTable::filled(nt, ng, 0.0);
                for e in 0..nt {
                    let z = mesh.vertices(e);
                    for (p, pt) in rule.points_on(&z).enumerate() {
                        x.data[e * ng + p] = pt[0];
                        y.data[e * ng + p] = pt[1];
                    }
                }
                Ok(Self {
                    weights: rule.weight.clone(),
                    measure: topo.area.clone(),
                    x,
                    y,
                    lambda: rule.lambda,
                    elem: (0..nt).collect(),
                    local_edge: Vec::new(),
                    boundary: false,
                })
            }
            Domain::Boundary(edges) => {
                let rule = segment_rule(quad_order.clamp(1, MAX_SEGMENT_ORDER))?;
                let (nb, ng) = (edges.len(), rule.len());
                let mut x = QuadTable::filled(nb, ng, 0.0);
                let mut y = QuadTable::filled(nb, ng, 0.0);
                let mut lambda = Vec::with_capacity(nb * ng);
                for (c, b) in edges.iter().enumerate() {
                    let (pa, pb) = (mesh.node[b.nodes[0]], mesh.node[b.nodes[1]]);
                    for (p, &t) in rule.points.iter().enumerate() {
                        x.data[c * ng + p] = pa[0] + t * (pb[0] - pa[0]);
                        y.data[c * ng + p] = pa[1] + t * (pb[1] - pa[1]);
                        let mut l = [0.0; 3];
                        l[(b.local + 1) % 3] = 1.0 - t;
                        l[(b.local + 2) % 3] = t;
                        lambda.push(l);
                    }
                }
                Ok(Self {
                    weights: rule.weight,
                    measure: edges.iter().map(|b| topo.edge_length[b.edge]).collect(),
                    x,
                    y,
                    lambda,
                    elem: edges.iter().map(|b| b.elem).collect(),
                    local_edge: edges.iter().map(|b| b.local).collect(),
                    boundary: true,
                })
            }
        }
    }

    pub fn n_cells(&self) -> usize {
        self.measure.len()
    }

    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary
    }

    fn lambda_at(&self, cell: usize, p: usize) -> [f64; 3] {
        if self.boundary {
            self.lambda[cell * self.n_points() + p]
        } else {
            self.lambda[p]
        }
    }

    /// Local basis indices integrated on each cell.
    pub fn local_functions(&self, space: FeSpace, cell: usize) -> Vec<usize> {
        match self.local_edge.get(cell) {
            Some(&i) => trace_local_dofs(space, i),
            None => (0..space.ndof()).collect(),
        }
    }

    /// Number of local functions per cell.
    pub fn n_local(&self, space: FeSpace) -> usize {
        if self.boundary {
            space.degree() + 1
        } else {
            space.ndof()
        }
    }

    /// Global dofs of the local functions of `cell`.
    pub fn cell_dofs(&self, dofmap: &DofMap, cell: usize) -> Vec<usize> {
        let dofs = dofmap.elem_dofs(self.elem[cell]);
        self.local_functions(dofmap.space, cell).into_iter().map(|j| dofs[j]).collect()
    }

    /// One table per local function: the requested derivative at every
    /// quadrature point of every cell.
    pub fn tabulate(&self, mesh: &Mesh2d, space: FeSpace, deriv: Deriv) -> Vec<QuadTable> {
        let (nc, ng) = (self.n_cells(), self.n_points());
        let nl = self.n_local(space);
        let mut tables = vec![QuadTable::filled(nc, ng, 0.0); nl];
        let mut grads = [[0.0; 2]; 3];
        let mut last_elem = usize::MAX;
        for c in 0..nc {
            let e = self.elem[c];
            if deriv != Deriv::Val && e != last_elem {
                grads = lambda_gradients(mesh, e);
                last_elem = e;
            }
            let locals = self.local_functions(space, c);
            for p in 0..ng {
                let l = self.lambda_at(c, p);
                match deriv {
                    Deriv::Val => {
                        let phi = shape_values(space, l);
                        for (t, &j) in locals.iter().enumerate() {
                            tables[t].data[c * ng + p] = phi[j];
                        }
                    }
                    Deriv::Dx | Deriv::Dy => {
                        let axis = if deriv == Deriv::Dx { 0 } else { 1 };
                        let d = shape_lambda_derivatives(space, l);
                        for (t, &j) in locals.iter().enumerate() {
                            tables[t].data[c * ng + p] =
                                d[j][0] * grads[0][axis] + d[j][1] * grads[1][axis] + d[j][2] * grads[2][axis];
                        }
                    }
                }
            }
        }
        tables
    }

    /// Values (or a derivative) of the finite element function `dofs` at
    /// every quadrature point.
    pub fn fe_values(&self, mesh: &Mesh2d, dofmap: &DofMap, dofs: &[f64], deriv: Deriv) -> Result<QuadTable> {
        if dofs.len() != dofmap.n_dof {
            return Err(Error::Length {
                expected: dofmap.n_dof,
                got: dofs.len(),
            });
        }
        let tables = self.tabulate(mesh, dofmap.space, deriv);
        let (nc, ng) = (self.n_cells(), self.n_points());
        let mut out = QuadTable::filled(nc, ng, 0.0);
        for c in 0..nc {
            let gdofs = self.cell_dofs(dofmap, c);
            let row = out.row_mut(c);
            for (t, &g) in gdofs.iter().enumerate() {
                let coef = dofs[g];
                for (acc, v) in row.iter_mut().zip(tables[t].row(c)) {
                    *acc += coef * v;
                }
            }
        }
        Ok(out)
    }

    /// Evaluates `f` at every quadrature point.
    pub fn eval<F: Fn(f64, f64) -> f64 + ?Sized>(&self, f: &F) -> QuadTable {
        let data = self.x.data.iter().zip(&self.y.data).map(|(&x, &y)| f(x, y)).collect();
        QuadTable {
            nrows: self.x.nrows,
            ncols: self.x.ncols,
            data,
        }
    }
}

/// Gradients of the barycentric coordinates of triangle `e` (constant on
/// the triangle).
pub fn lambda_gradients(mesh: &Mesh2d, e: usize) -> [[f64; 2]; 3] {
    let z = mesh.vertices(e);
    let two_area = 2.0 * mesh.signed_area(e);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (a, b) = (z[(i + 1) % 3], z[(i + 2) % 3]);
        g[i] = [(a[1] - b[1]) / two_area, (b[0] - a[0]) / two_area];
    }
    g
}

pub fn tabulate_basis(
    deriv: Deriv,
    mesh: &Mesh2d,
    topo: &MeshTopology,
    space: FeSpace,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<Vec<QuadTable>> {
    Ok(QuadGeometry::new(mesh, topo, domain, quad_order)?.tabulate(mesh, space, deriv))
}

/// The `(dx, dy)` pair of tables for a gradient term.
pub fn tabulate_gradient(
    mesh: &Mesh2d,
    topo: &MeshTopology,
    space: FeSpace,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<(Vec<QuadTable>, Vec<QuadTable>)> {
    let geom = QuadGeometry::new(mesh, topo, domain, quad_order)?;
    Ok((geom.tabulate(mesh, space, Deriv::Dx), geom.tabulate(mesh, space, Deriv::Dy)))
}

/// Nodal interpolant: `f` evaluated at every dof point.
pub fn interpolate_nodal<F: Fn(f64, f64) -> f64 + ?Sized>(f: &F, dofmap: &DofMap) -> Vec<f64> {
    dofmap.dof_point.iter().map(|p| f(p[0], p[1])).collect()
}

pub fn fe_values(
    dofs: &[f64],
    deriv: Deriv,
    mesh: &Mesh2d,
    topo: &MeshTopology,
    dofmap: &DofMap,
    quad_order: usize,
    domain: Domain<'_>,
) -> Result<QuadTable> {
    QuadGeometry::new(mesh, topo, domain, quad_order)?.fe_values(mesh, dofmap, dofs, deriv)
}

/// Coefficient matrix of a finite element function given by its dofs;
/// `term` selects the derivative, e.g. `"u1.dx"`.
pub fn coef_matrix_from_dofs(
    dofs: &[f64],
    term: &str,
    mesh: &Mesh2d,
    topo: &MeshTopology,
    dofmap: &DofMap,
    quad_order: usize,
) -> Result<CoefMatrix> {
    let term: Term = term.parse()?;
    let deriv = match term.tag {
        Tag::Val => Deriv::Val,
        Tag::Dx => Deriv::Dx,
        Tag::Dy => Deriv::Dy,
        Tag::Grad => {
            return Err(Error::InvalidForm(format!(
                "`{term}` has two components; use .dx and .dy separately"
            )))
        }
    };
    fe_values(dofs, deriv, mesh, topo, dofmap, quad_order, Domain::Interior)
}

/// Coefficient matrix on boundary edges. A scalar `f` is sampled
/// directly; a two-component `f` is contracted with the outward unit
/// normal, giving `f1 n1 + f2 n2`.
pub fn coef_matrix_on_edges<F>(
    f: &F,
    mesh: &Mesh2d,
    topo: &MeshTopology,
    edges: &[BoundaryEdge],
    quad_order: usize,
) -> Result<CoefMatrix>
where
    F: Fn(f64, f64) -> Vec<f64> + ?Sized,
{
    let geom = QuadGeometry::new(mesh, topo, Domain::Boundary(edges), quad_order)?;
    let (nc, ng) = (geom.n_cells(), geom.n_points());
    let mut out = QuadTable::filled(nc, ng, 0.0);
    for (c, b) in edges.iter().enumerate() {
        let n = b.normal(mesh);
        for p in 0..ng {
            let v = f(geom.x.get(c, p), geom.y.get(c, p));
            out.data[c * ng + p] = match v.as_slice() {
                [s] => *s,
                [a, b] => a * n[0] + b * n[1],
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "edge data must have 1 or 2 components, got {}",
                        other.len()
                    )))
                }
            };
        }
    }
    Ok(out)
}

/// `∫_Ω u_h` by quadrature.
pub fn integrate_fe(values: &[f64], mesh: &Mesh2d, topo: &MeshTopology, dofmap: &DofMap, quad_order: usize) -> Result<f64> {
    let geom = QuadGeometry::new(mesh, topo, Domain::Interior, quad_order)?;
    let uh = geom.fe_values(mesh, dofmap, values, Deriv::Val)?;
    Ok((0..geom.n_cells())
        .map(|e| geom.measure[e] * uh.row(e).iter().zip(&geom.weights).map(|(u, w)| u * w).sum::<f64>())
        .sum())
}

/// Point evaluation of a finite element function. Points outside every
/// triangle (barycentric tolerance `1e-12`) yield `None`.
pub fn evaluate_at_points(dofs: &[f64], mesh: &Mesh2d, dofmap: &DofMap, points: &[[f64; 2]]) -> Result<Vec<Option<f64>>> {
    if dofs.len() != dofmap.n_dof {
        return Err(Error::Length {
            expected: dofmap.n_dof,
            got: dofs.len(),
        });
    }
    const TOL: f64 = 1e-12;
    Ok(points
        .iter()
        .map(|&[px, py]| {
            (0..mesh.n_elems()).find_map(|e| {
                let z = mesh.vertices(e);
                let g = lambda_gradients(mesh, e);
                let mut l = [0.0; 3];
                for i in 0..3 {
                    // λ_i is affine and vanishes on the edge opposite vertex i
                    let a = z[(i + 1) % 3];
                    l[i] = g[i][0] * (px - a[0]) + g[i][1] * (py - a[1]);
                }
                if l.iter().any(|&v| v < -TOL) {
                    return None;
                }
                let phi = shape_values(dofmap.space, l);
                Some(dofmap.elem_dofs(e).iter().zip(phi).map(|(&g, v)| dofs[g] * v).sum())
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::square_mesh;

    fn single() -> (Mesh2d, MeshTopology) {
        let m = Mesh2d::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        (m, t)
    }

    fn unit(h: f64) -> (Mesh2d, MeshTopology) {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], h).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        (m, t)
    }

    #[test]
    fn p1_values_are_barycentric() {
        let (m, t) = unit(0.5);
        let tabs = tabulate_basis(Deriv::Val, &m, &t, FeSpace::P1, 3, Domain::Interior).unwrap();
        let rule = triangle_rule(3).unwrap();
        assert_eq!(tabs.len(), 3);
        for e in 0..m.n_elems() {
            for p in 0..rule.len() {
                let s: f64 = tabs.iter().map(|tb| tb.get(e, p)).sum();
                assert!((s - 1.0).abs() < 1e-15);
                for i in 0..3 {
                    assert!((tabs[i].get(e, p) - rule.lambda[p][i]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn p1_dx_on_reference_triangle() {
        let (m, t) = single();
        let tabs = tabulate_basis(Deriv::Dx, &m, &t, FeSpace::P1, 1, Domain::Interior).unwrap();
        let got: Vec<f64> = tabs.iter().map(|tb| tb.get(0, 0)).collect();
        assert_eq!(got, vec![-1.0, 1.0, 0.0]);
    }

    #[test]
    fn p2_at_edge_midpoints() {
        let (m, t) = single();
        let dm = DofMap::new(&m, &t, FeSpace::P2);
        // edge 3+i midpoint: only local function 3+i is nonzero
        for i in 0..3 {
            let mut l = [0.0; 3];
            l[(i + 1) % 3] = 0.5;
            l[(i + 2) % 3] = 0.5;
            let phi = shape_values(FeSpace::P2, l);
            for j in 0..6 {
                let expect = if j == 3 + i { 1.0 } else { 0.0 };
                assert!((phi[j] - expect).abs() < 1e-15);
            }
        }
        assert_eq!(dm.n_dof, 6);
    }

    #[test]
    fn gradients_sum_to_zero() {
        let (m, t) = unit(0.25);
        for space in [FeSpace::P1, FeSpace::P2, FeSpace::P3] {
            for deriv in [Deriv::Dx, Deriv::Dy] {
                let tabs = tabulate_basis(deriv, &m, &t, space, 5, Domain::Interior).unwrap();
                for e in 0..m.n_elems() {
                    for p in 0..tabs[0].ncols() {
                        let s: f64 = tabs.iter().map(|tb| tb.get(e, p)).sum();
                        assert!(s.abs() < 1e-12, "{space:?} {deriv:?} {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn interpolation_and_coef_matrices() {
        let (m, t) = unit(0.5);
        let dm = DofMap::new(&m, &t, FeSpace::P1);
        assert!(interpolate_nodal(&|_, _| 1.0, &dm).iter().all(|&v| v == 1.0));
        let lin = interpolate_nodal(&|x, y| x + 2.0 * y, &dm);
        for (v, p) in lin.iter().zip(&dm.dof_point) {
            assert_eq!(*v, p[0] + 2.0 * p[1]);
        }
        let five = interpolate_nodal(&|_, _| 5.0, &dm);
        let c = coef_matrix_from_dofs(&five, "u.val", &m, &t, &dm, 3).unwrap();
        assert!(c.as_slice().iter().all(|&v| (v - 5.0).abs() < 1e-14));
        let xs = interpolate_nodal(&|x, _| x, &dm);
        let c = coef_matrix_from_dofs(&xs, "u1.dx", &m, &t, &dm, 3).unwrap();
        assert!(c.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-13));
        assert!(coef_matrix_from_dofs(&xs[..3], "u.val", &m, &t, &dm, 3).is_err());
        assert!(coef_matrix_from_dofs(&xs, "u.grad", &m, &t, &dm, 3).is_err());
    }

    #[test]
    fn edge_coefficients() {
        let (m, t) = unit(0.5);
        let bottom: Vec<BoundaryEdge> = t.bd_edge.iter().copied().filter(|b| b.midpoint(&m)[1] == 0.0).collect();
        let right: Vec<BoundaryEdge> = t.bd_edge.iter().copied().filter(|b| b.midpoint(&m)[0] == 1.0).collect();
        let c = coef_matrix_on_edges(&|_, _| vec![0.0, 1.0], &m, &t, &bottom, 3).unwrap();
        assert!(c.as_slice().iter().all(|&v| (v + 1.0).abs() < 1e-15));
        let c = coef_matrix_on_edges(&|_, _| vec![3.0], &m, &t, &bottom, 3).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 3.0));
        let c = coef_matrix_on_edges(&|x, y| vec![x, y], &m, &t, &right, 3).unwrap();
        assert!(c.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(coef_matrix_on_edges(&|_, _| vec![1.0, 2.0, 3.0], &m, &t, &right, 3).is_err());
    }

    #[test]
    fn integrals() {
        let (m, t) = unit(0.5);
        let p1 = DofMap::new(&m, &t, FeSpace::P1);
        let ones = vec![1.0; p1.n_dof];
        assert!((integrate_fe(&ones, &m, &t, &p1, 3).unwrap() - 1.0).abs() < 1e-14);
        let x = interpolate_nodal(&|x, _| x, &p1);
        assert!((integrate_fe(&x, &m, &t, &p1, 3).unwrap() - 0.5).abs() < 1e-14);
        let p2 = DofMap::new(&m, &t, FeSpace::P2);
        let x2 = interpolate_nodal(&|x, _| x * x, &p2);
        assert!((integrate_fe(&x2, &m, &t, &p2, 4).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn point_evaluation() {
        let (m, t) = unit(0.5);
        let p1 = DofMap::new(&m, &t, FeSpace::P1);
        let u = interpolate_nodal(&|x, y| x + y, &p1);
        let v = evaluate_at_points(&u, &m, &p1, &[[0.3, 0.4], [10.0, 10.0], [1.0, 1.0]]).unwrap();
        assert!((v[0].unwrap() - 0.7).abs() < 1e-14);
        assert!(v[1].is_none());
        assert!((v[2].unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_tables_have_k_plus_one_functions() {
        let (m, t) = unit(0.5);
        for space in [FeSpace::P1, FeSpace::P2, FeSpace::P3] {
            let tabs = tabulate_basis(Deriv::Val, &m, &t, space, 4, Domain::Boundary(&t.bd_edge)).unwrap();
            assert_eq!(tabs.len(), space.degree() + 1);
            for tb in &tabs {
                assert_eq!(tb.nrows(), t.n_boundary_edges());
            }
            for c in 0..tabs[0].nrows() {
                for p in 0..tabs[0].ncols() {
                    let s: f64 = tabs.iter().map(|tb| tb.get(c, p)).sum();
                    assert!((s - 1.0).abs() < 1e-13);
                }
            }
        }
    }
}
