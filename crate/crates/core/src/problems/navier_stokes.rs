use std::sync::Arc;

use super::exact::{stokes_example, Field};
use super::{mesh_levels, vector_errors, MeshSource};
use crate::assembly::Assembler;
use crate::fespace::{coef_matrix_from_dofs, integrate_fe, interpolate_nodal, DofMap, Domain, FeSpace, QuadTable};
use crate::mesh::Mesh2d;
use crate::system::{error_l2, fixed_dofs, DirichletSolver, DirichletSpec, FixedDofs};
use crate::vform::{standardize_symbols, Coef, VarForm};
use crate::{Error, Result, ScalarFn};

/// Starting point of the Newton iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum NsInitial {
    /// Nodal interpolant of the exact solution.
    Exact,
    /// Exact boundary velocity, zero elsewhere.
    Boundary,
    /// Dofs `[u1, u2, p]`.
    Given([Vec<f64>; 3]),
}

/// Steady Navier-Stokes `-νΔu + (u·∇)u + ∇p = f`, `div u = 0` on
/// Taylor-Hood elements, solved by Newton's method.
#[derive(Clone)]
pub struct NsSpec {
    pub mesh: MeshSource,
    /// Uniform refinements applied to the source mesh.
    pub refine: usize,
    pub nu: f64,
    pub eps: f64,
    pub quad_order: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// `[u1, u2, p]`; supplies the forcing and the boundary velocity.
    pub exact: [Field; 3],
    pub initial: NsInitial,
}

impl NsSpec {
    pub fn new(mesh: MeshSource) -> Self {
        Self {
            mesh,
            refine: 0,
            nu: 1.0,
            eps: 1e-10,
            quad_order: 7,
            max_iter: 15,
            tol: 1e-8,
            exact: stokes_example(),
            initial: NsInitial::Boundary,
        }
    }

    pub fn source(&self) -> [ScalarFn; 2] {
        let nu = self.nu;
        let [u1, u2, p] = self.exact.clone();
        let (l1, l2) = (u1.laplacian(), u2.laplacian());
        let (a, b, pg) = (u1.clone(), u2.clone(), p.grad.clone());
        let conv = move |x: f64, y: f64| {
            let (v1, v2) = ((a.value)(x, y), (b.value)(x, y));
            let (g1, g2) = ((a.grad)(x, y), (b.grad)(x, y));
            [v1 * g1[0] + v2 * g1[1], v1 * g2[0] + v2 * g2[1]]
        };
        let c2 = conv.clone();
        let pg2 = pg.clone();
        [
            Arc::new(move |x, y| -nu * l1(x, y) + conv(x, y)[0] + pg(x, y)[0]),
            Arc::new(move |x, y| -nu * l2(x, y) + c2(x, y)[1] + pg2(x, y)[1]),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct NsOutput {
    pub mesh: Mesh2d,
    pub spaces: [FeSpace; 3],
    /// `[u1, u2, p]` after each Newton step, starting with the initial guess.
    pub iterates: Vec<[Vec<f64>; 3]>,
    /// `‖δ‖_∞` of each step.
    pub increments: Vec<f64>,
    pub converged: bool,
    /// `‖u - u_h‖`, `|u - u_h|_1`, `‖p - p_h‖` of the last iterate.
    pub errors: [f64; 3],
}

const VSTR: [&str; 3] = ["v1", "v2", "q"];
const USTR: [&str; 3] = ["du1", "du2", "dp"];

struct State {
    u1c: QuadTable,
    u2c: QuadTable,
    pc: QuadTable,
    u1xc: QuadTable,
    u1yc: QuadTable,
    u2xc: QuadTable,
    u2yc: QuadTable,
}

impl State {
    fn new(level: &super::Level, dm: &[DofMap], x: &[Vec<f64>; 3], order: usize) -> Result<Self> {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let c = |dofs: &[f64], term: &str, d: &DofMap| coef_matrix_from_dofs(dofs, term, mesh, topo, d, order);
        Ok(Self {
            u1c: c(&x[0], "u1.val", &dm[0])?,
            u2c: c(&x[1], "u2.val", &dm[1])?,
            pc: c(&x[2], "p.val", &dm[2])?,
            u1xc: c(&x[0], "u1.dx", &dm[0])?,
            u1yc: c(&x[0], "u1.dy", &dm[0])?,
            u2xc: c(&x[1], "u2.dx", &dm[1])?,
            u2yc: c(&x[1], "u2.dy", &dm[1])?,
        })
    }

    /// Jacobian `DF(u, p)` applied to `(δu, δp)`.
    fn jacobian(&self, nu: f64, eps: f64) -> Result<VarForm> {
        let m = |t: &QuadTable| Coef::matrix(t.clone());
        let coef = vec![
            m(&self.u1xc),
            m(&self.u1yc),
            m(&self.u2xc),
            m(&self.u2yc),
            m(&self.u1c),
            m(&self.u2c),
            m(&self.u1c),
            m(&self.u2c),
            nu.into(),
            nu.into(),
            nu.into(),
            nu.into(),
            (-1.0).into(),
            (-1.0).into(),
            (-1.0).into(),
            (-1.0).into(),
            (-eps).into(),
        ];
        let test = [
            "v1.val", "v1.val", "v2.val", "v2.val", "v1.val", "v1.val", "v2.val", "v2.val", "v1.dx", "v1.dy", "v2.dx",
            "v2.dy", "v1.dx", "v2.dy", "q.val", "q.val", "q.val",
        ];
        let trial = [
            "du1.val", "du2.val", "du1.val", "du2.val", "du1.dx", "du1.dy", "du2.dx", "du2.dy", "du1.dx", "du1.dy",
            "du2.dx", "du2.dy", "dp.val", "dp.val", "du1.dx", "du2.dy", "dp.val",
        ];
        standardize_symbols(&VSTR, &USTR, &VarForm::bilinear(coef, &test, &trial)?)
    }

    /// Residual `F(u, p)` tested against `(v, q)`.
    fn residual(&self, nu: f64, eps: f64, f: &[ScalarFn; 2]) -> Result<VarForm> {
        let conv1 = self.u1c.mul(&self.u1xc)?.add(&self.u2c.mul(&self.u1yc)?)?;
        let conv2 = self.u1c.mul(&self.u2xc)?.add(&self.u2c.mul(&self.u2yc)?)?;
        let div = self.u1xc.add(&self.u2yc)?;
        let m = |t: QuadTable| Coef::matrix(t);
        let (f1, f2) = (f[0].clone(), f[1].clone());
        let coef = vec![
            m(conv1),
            m(conv2),
            m(self.u1xc.clone().scale(nu)),
            m(self.u1yc.clone().scale(nu)),
            m(self.u2xc.clone().scale(nu)),
            m(self.u2yc.clone().scale(nu)),
            m(self.pc.clone().scale(-1.0)),
            m(self.pc.clone().scale(-1.0)),
            m(div.scale(-1.0)),
            m(self.pc.clone().scale(-eps)),
            Coef::func(move |x, y| -f1(x, y)),
            Coef::func(move |x, y| -f2(x, y)),
        ];
        let test = [
            "v1.val", "v2.val", "v1.dx", "v1.dy", "v2.dx", "v2.dy", "v1.dx", "v2.dy", "q.val", "q.val", "v1.val",
            "v2.val",
        ];
        standardize_symbols(&VSTR, &USTR, &VarForm::linear(coef, &test)?)
    }
}

pub fn run_ns_newton(spec: &NsSpec) -> Result<NsOutput> {
    let level = mesh_levels(&spec.mesh, spec.refine + 1)?.pop().expect("one level");
    let (mesh, topo) = (&level.mesh, &level.topo);
    let spaces = [FeSpace::P2, FeSpace::P2, FeSpace::P1];
    let order = spec.quad_order;
    let f = spec.source();
    let [e1, e2, ep] = &spec.exact;

    let dm: Vec<DofMap> = spaces.iter().map(|&s| DofMap::new(mesh, topo, s)).collect();
    let mut x: [Vec<f64>; 3] = match &spec.initial {
        NsInitial::Exact => [
            interpolate_nodal(e1.value.as_ref(), &dm[0]),
            interpolate_nodal(e2.value.as_ref(), &dm[1]),
            interpolate_nodal(ep.value.as_ref(), &dm[2]),
        ],
        NsInitial::Boundary => [vec![0.0; dm[0].n_dof], vec![0.0; dm[1].n_dof], vec![0.0; dm[2].n_dof]],
        NsInitial::Given(x) => {
            for (c, d) in x.iter().zip(&dm) {
                if c.len() != d.n_dof {
                    return Err(Error::Length {
                        expected: d.n_dof,
                        got: c.len(),
                    });
                }
            }
            x.clone()
        }
    };
    let partition = level.partition::<&str>(&[])?;
    let bc = fixed_dofs(
        &partition,
        &dm,
        &DirichletSpec::new(&[0], vec![Some(e1.value.clone()), Some(e2.value.clone()), None]),
    )?;
    let offsets = [0, dm[0].n_dof, dm[0].n_dof + dm[1].n_dof];
    if spec.initial == NsInitial::Boundary {
        for (&d, &g) in bc.dofs.iter().zip(&bc.values) {
            let c = offsets.iter().rposition(|&o| o <= d).unwrap();
            x[c][d - offsets[c]] = g;
        }
    }

    let area = mesh.total_area();
    let mut iterates = vec![x.clone()];
    let mut increments = Vec::new();
    let mut converged = false;
    for it in 1..=spec.max_iter {
        let state = State::new(&level, &dm, &x, order)?;
        let mut asm = Assembler::new(mesh, topo, &spaces, order)?;
        asm.add(&state.jacobian(spec.nu, spec.eps)?, Domain::Interior)?;
        asm.add(&state.residual(spec.nu, spec.eps, &f)?, Domain::Interior)?;
        let system = asm.finish()?;
        let flat: Vec<f64> = x.concat();
        // the increment carries the current boundary mismatch
        let fixed = FixedDofs {
            dofs: bc.dofs.clone(),
            values: bc.dofs.iter().zip(&bc.values).map(|(&d, g)| flat[d] - g).collect(),
        };
        let delta = DirichletSolver::new(&system.matrix, &fixed.dofs)?.solve(&system.rhs, &fixed)?;
        let mut parts = system.split(&delta)?;
        // only the tiny penalty fixes the pressure constant, so round-off
        // in that mode is amplified by 1/ε; keep the increment mean free
        let mean = integrate_fe(&parts[2], mesh, topo, &dm[2], order)? / area;
        parts[2].iter_mut().for_each(|v| *v -= mean);
        let norm = parts.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !norm.is_finite() || norm > 1e12 {
            return Err(Error::Diverged {
                iterate: it,
                increment: norm,
            });
        }
        for (xc, dc) in x.iter_mut().zip(&parts) {
            xc.iter_mut().zip(dc).for_each(|(a, d)| *a -= d);
        }
        iterates.push(x.clone());
        increments.push(norm);
        if norm < spec.tol {
            converged = true;
            break;
        }
        // three growing increments in a row after the first step
        let n = increments.len();
        if n >= 4 && increments[n - 3..].windows(2).all(|w| w[1] > w[0]) && increments[n - 1] > increments[0] {
            return Err(Error::Diverged {
                iterate: it,
                increment: norm,
            });
        }
    }

    let eorder = order;
    let (l2, h1) = vector_errors(&level, &[&dm[0], &dm[1]], &[e1, e2], &[&x[0], &x[1]], eorder)?;
    let pl2 = error_l2(mesh, topo, &dm[2], eorder, ep.value.as_ref(), &x[2])?;
    Ok(NsOutput {
        mesh: level.mesh.clone(),
        spaces,
        iterates,
        increments,
        converged,
        errors: [l2, h1, pl2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::exact::ns_polynomial;

    #[test]
    fn root_start_stops_immediately() {
        let mut spec = NsSpec::new(MeshSource::unit_square(0.25));
        spec.exact = ns_polynomial();
        spec.initial = NsInitial::Exact;
        let out = run_ns_newton(&spec).unwrap();
        assert!(out.converged);
        assert!(out.increments[0] <= 1e-8, "{:?}", out.increments);
        assert!(out.errors.iter().all(|e| *e < 1e-8), "{:?}", out.errors);
    }

    #[test]
    fn converges_from_boundary_data() {
        let mut spec = NsSpec::new(MeshSource::unit_square(0.25));
        spec.nu = 1.0;
        let out = run_ns_newton(&spec).unwrap();
        assert!(out.converged, "{:?}", out.increments);
        assert!(out.increments.len() >= 3);
    }
}
