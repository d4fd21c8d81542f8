//! Dirichlet elimination, sparse direct solves, error norms and rate fits.

mod rates;

pub use rates::{error_h1_semi, error_l2, fit_rate, RateReport};

use std::sync::Once;

use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};

use crate::assembly::{AssembledSystem, CsrMatrix};
use crate::fespace::DofMap;
use crate::mesh::BoundaryPartition;
use crate::{Error, Result, ScalarFn};

/// Boundary values per region and component. A `None` component is left
/// free on that region. When a dof lies on several listed regions the
/// first listed region supplies its value.
#[derive(Clone, Default)]
pub struct DirichletSpec {
    pub regions: Vec<(usize, Vec<Option<ScalarFn>>)>,
}

impl DirichletSpec {
    /// The same component functions on every region in `regions`.
    pub fn new(regions: &[usize], values: Vec<Option<ScalarFn>>) -> Self {
        Self {
            regions: regions.iter().map(|&r| (r, values.clone())).collect(),
        }
    }

    /// One scalar function on one region.
    pub fn scalar(region: usize, g: ScalarFn) -> Self {
        Self::new(&[region], vec![Some(g)])
    }

    pub fn push(&mut self, region: usize, values: Vec<Option<ScalarFn>>) {
        self.regions.push((region, values));
    }
}

impl std::fmt::Debug for DirichletSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut l = f.debug_list();
        for (r, v) in &self.regions {
            let mask: Vec<bool> = v.iter().map(Option::is_some).collect();
            l.entry(&(r, mask));
        }
        l.finish()
    }
}

/// Global indices of constrained dofs and their prescribed values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixedDofs {
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
}

/// Collects the dofs fixed by `spec`: every vertex of a region's edges and
/// every edge-interior dof of those edges, for each constrained component.
/// Components are laid out one after another in `dofmaps` order.
pub fn fixed_dofs(partition: &BoundaryPartition, dofmaps: &[DofMap], spec: &DirichletSpec) -> Result<FixedDofs> {
    let mut offset = Vec::with_capacity(dofmaps.len());
    let mut n = 0;
    for dm in dofmaps {
        offset.push(n);
        n += dm.n_dof;
    }
    let mut taken = vec![false; n];
    let mut out = FixedDofs::default();
    for (region, funcs) in &spec.regions {
        let reg = partition.region(*region)?;
        if funcs.len() != dofmaps.len() {
            return Err(Error::Length {
                expected: dofmaps.len(),
                got: funcs.len(),
            });
        }
        for (c, g) in funcs.iter().enumerate() {
            let Some(g) = g else { continue };
            let dm = &dofmaps[c];
            let local = reg
                .nodes
                .iter()
                .copied()
                .chain(reg.edges.iter().flat_map(|e| dm.edge_interior_dofs(e.edge)));
            for d in local {
                let gd = offset[c] + d;
                if !taken[gd] {
                    taken[gd] = true;
                    let p = dm.dof_point[d];
                    out.dofs.push(gd);
                    out.values.push(g(p[0], p[1]));
                }
            }
        }
    }
    Ok(out)
}

static SEQUENTIAL: Once = Once::new();

/// Factorization of the free block `A_ff` of a matrix with some dofs
/// eliminated, reusable for many right-hand sides and boundary values.
pub struct DirichletSolver {
    n: usize,
    fixed: Vec<usize>,
    free: Vec<usize>,
    a_ff: CsrMatrix,
    a_fc: CsrMatrix,
    lu: Option<Lu<usize, f64>>,
}

fn singular(fixed_empty: bool, detail: &str) -> Error {
    let hint = if fixed_empty {
        "; no Dirichlet dofs were given, so a pure Neumann problem is only defined up to a constant"
    } else {
        ""
    };
    Error::Singular(format!("{detail}{hint}"))
}

impl DirichletSolver {
    pub fn new(a: &CsrMatrix, fixed: &[usize]) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Shape {
                expected: format!("{n}x{n}"),
                got: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        let mut is_fixed = vec![false; n];
        for &d in fixed {
            if d >= n {
                return Err(Error::IndexOutOfRange {
                    row: d,
                    col: d,
                    nrows: n,
                    ncols: n,
                });
            }
            is_fixed[d] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
        let fixed: Vec<usize> = (0..n).filter(|&i| is_fixed[i]).collect();
        let a_ff = a.select(&free, &free);
        let a_fc = a.select(&free, &fixed);
        let lu = if free.is_empty() {
            None
        } else {
            // sequential kernels keep repeated solves bit-identical
            SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
            let nf = free.len();
            let trip: Vec<Triplet<usize, usize, f64>> = (0..nf)
                .flat_map(|i| a_ff.row(i).map(move |(j, v)| Triplet::new(i, j, v)))
                .collect();
            let m = SparseColMat::<usize, f64>::try_new_from_triplets(nf, nf, &trip)
                .map_err(|e| Error::Singular(format!("{e:?}")))?;
            Some(m.sp_lu().map_err(|e| singular(fixed.is_empty(), &format!("sparse LU failed: {e:?}")))?)
        };
        Ok(Self {
            n,
            fixed,
            free,
            a_ff,
            a_fc,
            lu,
        })
    }

    pub fn n_dof(&self) -> usize {
        self.n
    }

    /// Fixed dofs in increasing order.
    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    fn lu_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let lu = self.lu.as_ref().expect("free dofs exist");
        let mut x = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        lu.solve_in_place(x.as_mut());
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }

    /// Solves with right-hand side `b` (full length) and prescribed values
    /// for the fixed dofs, given as `(dof, value)` in any order.
    pub fn solve(&self, b: &[f64], fixed_values: &FixedDofs) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                got: b.len(),
            });
        }
        let mut full = vec![0.0; self.n];
        let mut seen = vec![false; self.n];
        for (&d, &v) in fixed_values.dofs.iter().zip(&fixed_values.values) {
            if d >= self.n {
                return Err(Error::InvalidArgument(format!("fixed dof {d} out of range")));
            }
            full[d] = v;
            seen[d] = true;
        }
        if self.fixed.iter().any(|&d| !seen[d]) || fixed_values.dofs.len() != self.fixed.len() {
            return Err(Error::InvalidArgument(
                "boundary values must cover exactly the solver's fixed dofs".into(),
            ));
        }
        if self.free.is_empty() {
            return Ok(full);
        }
        let uc: Vec<f64> = self.fixed.iter().map(|&d| full[d]).collect();
        let lift = self.a_fc.matvec(&uc)?;
        let rhs: Vec<f64> = self.free.iter().zip(&lift).map(|(&i, l)| b[i] - l).collect();

        let mut x = self.lu_solve(&rhs);
        // one step of iterative refinement
        let r: Vec<f64> = self.a_ff.matvec(&x)?.iter().zip(&rhs).map(|(ax, b)| b - ax).collect();
        let dx = self.lu_solve(&r);
        x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);

        let ax = self.a_ff.matvec(&x)?;
        let res = ax.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = norm2(&rhs).max(self.a_ff.frobenius_norm() * norm2(&x)).max(f64::MIN_POSITIVE);
        if !x.iter().all(|v| v.is_finite()) || res > 1e-8 * scale {
            return Err(singular(
                self.fixed.is_empty(),
                &format!("matrix is numerically singular (residual {res:.3e})"),
            ));
        }
        for (&i, v) in self.free.iter().zip(x) {
            full[i] = v;
        }
        Ok(full)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse direct solve of `A x = b`.
pub fn solve_sparse(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    DirichletSolver::new(a, &[])?.solve(b, &FixedDofs::default())
}

/// Eliminates the dofs fixed by `spec` and solves the remaining system.
pub fn apply_dirichlet_and_solve(
    system: &AssembledSystem,
    partition: &BoundaryPartition,
    dofmaps: &[DofMap],
    spec: &DirichletSpec,
) -> Result<Vec<f64>> {
    let sizes: Vec<usize> = dofmaps.iter().map(|d| d.n_dof).collect();
    if sizes != system.nndofu {
        return Err(Error::Shape {
            expected: format!("{:?}", system.nndofu),
            got: format!("{sizes:?}"),
        });
    }
    let fixed = fixed_dofs(partition, dofmaps, spec)?;
    DirichletSolver::new(&system.matrix, &fixed.dofs)?.solve(&system.rhs, &fixed)
}
