use std::sync::Arc;

use super::exact::{one_plus_xy, sin_cos, Field};
use super::{mesh_levels, natural_and_dirichlet, Discretization, RunOutput, H1, L2};
use crate::assembly::Assembler;
use crate::fespace::{coef_matrix_on_edges, Domain, FeSpace};
use crate::system::{apply_dirichlet_and_solve, error_h1_semi, error_l2, DirichletSpec, RateReport};
use crate::vform::{Coef, VarForm};
use crate::{scalar_fn, Result, ScalarFn};

/// `-div(a ∇u) + c u = f` with Robin data `g_R u + a ∂ₙu = g_N` on the
/// selector regions and `u = g_D` on the rest.
#[derive(Clone)]
pub struct PoissonSpec {
    pub disc: Discretization,
    pub a: Field,
    pub c: ScalarFn,
    pub g_r: ScalarFn,
    pub exact: Field,
    pub bd_str: Vec<String>,
}

impl PoissonSpec {
    pub fn new(space: FeSpace, levels: usize) -> Self {
        Self {
            disc: Discretization::new(space, levels),
            a: one_plus_xy(),
            c: scalar_fn(|_, _| 1.0),
            g_r: scalar_fn(|x, y| 1.0 + x + y),
            exact: sin_cos(),
            bd_str: vec!["x==0".into()],
        }
    }

    /// `f = -a Δu - ∇a·∇u + c u`.
    pub fn source(&self) -> ScalarFn {
        let (a, c, u) = (self.a.clone(), self.c.clone(), self.exact.clone());
        let lap = u.laplacian();
        Arc::new(move |x, y| {
            let ga = (a.grad)(x, y);
            let gu = (u.grad)(x, y);
            -(a.value)(x, y) * lap(x, y) - ga[0] * gu[0] - ga[1] * gu[1] + c(x, y) * (u.value)(x, y)
        })
    }
}

pub fn run_poisson(spec: &PoissonSpec) -> Result<RunOutput> {
    let space = spec.disc.space;
    let order = spec.disc.quad_order();
    let eorder = order;
    let f = spec.source();
    let mut report = RateReport::new(&[L2, H1]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let partition = level.partition(&spec.bd_str)?;
        let (natural, on) = natural_and_dirichlet(&partition);

        let mut asm = Assembler::new(mesh, topo, &[space], order)?;
        let a = spec.a.value.clone();
        asm.add(
            &VarForm::bilinear(vec![a.into(), spec.c.clone().into()], &["v.grad", "v.val"], &["u.grad", "u.val"])?,
            Domain::Interior,
        )?;
        asm.add(&VarForm::linear(vec![f.clone().into()], &["v.val"])?, Domain::Interior)?;
        for &r in &natural {
            let edges = &partition.region(r)?.edges;
            if edges.is_empty() {
                continue;
            }
            asm.add(
                &VarForm::bilinear(vec![spec.g_r.clone().into()], &["v.val"], &["u.val"])?,
                Domain::Boundary(edges),
            )?;
            // g_N = g_R u + a ∇u·n
            let (av, gu) = (spec.a.value.clone(), spec.exact.grad.clone());
            let flux = coef_matrix_on_edges(
                &move |x: f64, y: f64| {
                    let g = gu(x, y);
                    let a = av(x, y);
                    vec![a * g[0], a * g[1]]
                },
                mesh,
                topo,
                edges,
                order,
            )?;
            let (gr, u) = (spec.g_r.clone(), spec.exact.value.clone());
            let robin = coef_matrix_on_edges(&move |x: f64, y: f64| vec![gr(x, y) * u(x, y)], mesh, topo, edges, order)?;
            asm.add(&VarForm::linear(vec![Coef::matrix(flux.add(&robin)?)], &["v.val"])?, Domain::Boundary(edges))?;
        }
        let dofmap = asm.dofmaps()[0].clone();
        let system = asm.finish()?;
        let dirichlet = DirichletSpec::scalar(on, spec.exact.value.clone());
        let uh = apply_dirichlet_and_solve(&system, &partition, std::slice::from_ref(&dofmap), &dirichlet)?;

        let e0 = error_l2(mesh, topo, &dofmap, eorder, spec.exact.value.as_ref(), &uh)?;
        let e1 = error_h1_semi(mesh, topo, &dofmap, eorder, spec.exact.grad.as_ref(), &uh)?;
        report.push(mesh.n_elems(), level.h, &[e0, e1])?;
        last = Some((level.mesh, uh));
    }
    let (mesh, uh) = last.expect("at least one level");
    Ok(RunOutput {
        report,
        mesh,
        spaces: vec![space],
        solution: vec![uh],
    })
}
