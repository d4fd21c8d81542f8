use std::f64::consts::PI;
use std::sync::Arc;

use super::{mesh_levels, natural_and_dirichlet, Discretization, RunOutput, H1, L2};
use crate::assembly::{assemble_matrix, assemble_vector};
use crate::fespace::{coef_matrix_on_edges, interpolate_nodal, DofMap, Domain, FeSpace};
use crate::system::{error_h1_semi, error_l2, fixed_dofs, DirichletSolver, DirichletSpec, RateReport};
use crate::vform::{Coef, VarForm};
use crate::{Error, Result};

pub type TimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type TimeGradFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>;

/// Exact solution `u(x, y, t)`, its spatial gradient and the source
/// `f = u_t - Δu`.
#[derive(Clone)]
pub struct HeatExact {
    pub u: TimeFn,
    pub grad: TimeGradFn,
    pub f: TimeFn,
}

impl HeatExact {
    /// `u = sin(πx) sin(y) e^{-t}`.
    pub fn decaying_mode() -> Self {
        Self {
            u: Arc::new(|x, y, t| (PI * x).sin() * y.sin() * (-t).exp()),
            grad: Arc::new(|x, y, t| {
                let e = (-t).exp();
                [PI * (PI * x).cos() * y.sin() * e, (PI * x).sin() * y.cos() * e]
            }),
            // u_t = -u, Δu = -(π² + 1) u
            f: Arc::new(|x, y, t| PI * PI * (PI * x).sin() * y.sin() * (-t).exp()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// Largest step not above the given one that divides the interval.
    Fixed(f64),
    Steps(usize),
    /// `Δt ≈ h^{k+1}` on each level.
    PowerOfH,
}

/// `u_t - Δu = f` with backward Euler in time, Neumann data on the
/// selector regions and Dirichlet data on the rest.
#[derive(Clone)]
pub struct HeatSpec {
    pub disc: Discretization,
    pub t_end: f64,
    pub step: TimeStep,
    pub bd_str: Vec<String>,
    pub exact: HeatExact,
}

impl HeatSpec {
    pub fn new(space: FeSpace, levels: usize) -> Self {
        Self {
            disc: Discretization::new(space, levels),
            t_end: 1.0,
            step: TimeStep::PowerOfH,
            bd_str: vec!["x==0".into()],
            exact: HeatExact::decaying_mode(),
        }
    }

    fn n_steps(&self, h: f64) -> Result<usize> {
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidArgument(format!("final time must be positive, got {}", self.t_end)));
        }
        let dt = match self.step {
            TimeStep::Steps(0) => return Err(Error::InvalidArgument("at least one time step is required".into())),
            TimeStep::Steps(n) => return Ok(n),
            TimeStep::Fixed(dt) => dt,
            TimeStep::PowerOfH => h.powi(self.disc.space.degree() as i32 + 1),
        };
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(((self.t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
    }
}

fn solve_level(spec: &HeatSpec, level: &super::Level, order: usize) -> Result<(DofMap, Vec<f64>)> {
    let space = spec.disc.space;
    let (mesh, topo) = (&level.mesh, &level.topo);
    let nt = spec.n_steps(level.h)?;
    let dt = spec.t_end / nt as f64;
    let ex = &spec.exact;

    let partition = level.partition(&spec.bd_str)?;
    let (natural, on) = natural_and_dirichlet(&partition);
    let dofmap = DofMap::new(mesh, topo, space);
    let kk = assemble_matrix(
        mesh,
        topo,
        &VarForm::bilinear(vec![(1.0 / dt).into(), 1.0.into()], &["v.val", "v.grad"], &["u.val", "u.grad"])?,
        space,
        space,
        order,
        Domain::Interior,
    )?;
    let boundary_at = |t: f64| {
        let u = ex.u.clone();
        DirichletSpec::scalar(on, Arc::new(move |x, y| u(x, y, t)))
    };
    let dofmaps = std::slice::from_ref(&dofmap);
    let solver = DirichletSolver::new(&kk, &fixed_dofs(&partition, dofmaps, &boundary_at(0.0))?.dofs)?;

    let u0 = ex.u.clone();
    let mut u = interpolate_nodal(&move |x, y| u0(x, y, 0.0), &dofmap);
    for n in 1..=nt {
        let t = n as f64 * dt;
        let f = ex.f.clone();
        let prev: Vec<f64> = u.iter().map(|v| v / dt).collect();
        let mut rhs = assemble_vector(
            mesh,
            topo,
            &VarForm::linear(
                vec![Coef::func(move |x, y| f(x, y, t)), Coef::dofs(prev, space)],
                &["v.val", "v.val"],
            )?,
            space,
            order,
            Domain::Interior,
        )?;
        for &r in &natural {
            let edges = &partition.region(r)?.edges;
            if edges.is_empty() {
                continue;
            }
            let g = ex.grad.clone();
            let gn = coef_matrix_on_edges(&move |x: f64, y: f64| g(x, y, t).to_vec(), mesh, topo, edges, order)?;
            let b = assemble_vector(
                mesh,
                topo,
                &VarForm::linear(vec![Coef::matrix(gn)], &["v.val"])?,
                space,
                order,
                Domain::Boundary(edges),
            )?;
            rhs.iter_mut().zip(b).for_each(|(r, b)| *r += b);
        }
        let fixed = fixed_dofs(&partition, dofmaps, &boundary_at(t))?;
        u = solver.solve(&rhs, &fixed)?;
    }
    Ok((dofmap, u))
}

/// Errors at the final time on each level.
pub fn run_heat(spec: &HeatSpec) -> Result<RunOutput> {
    let space = spec.disc.space;
    let order = spec.disc.quad_order();
    let eorder = order;
    let te = spec.t_end;
    let mut report = RateReport::new(&[L2, H1]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (dofmap, u) = solve_level(spec, &level, order)?;
        let (ue, ge) = (spec.exact.u.clone(), spec.exact.grad.clone());
        let e0 = error_l2(&level.mesh, &level.topo, &dofmap, eorder, &move |x, y| ue(x, y, te), &u)?;
        let e1 = error_h1_semi(&level.mesh, &level.topo, &dofmap, eorder, &move |x, y| ge(x, y, te), &u)?;
        report.push(level.mesh.n_elems(), level.h, &[e0, e1])?;
        last = Some((level.mesh, u));
    }
    let (mesh, u) = last.expect("at least one level");
    Ok(RunOutput {
        report,
        mesh,
        spaces: vec![space],
        solution: vec![u],
    })
}
