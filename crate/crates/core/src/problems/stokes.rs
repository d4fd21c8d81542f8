use std::sync::Arc;

use super::exact::{stokes_example, Field};
use super::{mesh_levels, vector_errors, Discretization, RunOutput, H1, L2, P_L2};
use crate::assembly::Assembler;
use crate::fespace::{Domain, FeSpace};
use crate::system::{apply_dirichlet_and_solve, error_l2, DirichletSpec, RateReport};
use crate::vform::{standardize_symbols, VarForm};
use crate::{Result, ScalarFn};

/// Stokes flow `-νΔu + ∇p = f`, `div u = 0` with Taylor-Hood elements
/// `{P2, P2, P1}` and a small pressure penalty `ε`.
#[derive(Clone)]
pub struct StokesSpec {
    pub disc: Discretization,
    pub nu: f64,
    pub eps: f64,
    /// `[u1, u2, p]`.
    pub exact: [Field; 3],
}

impl StokesSpec {
    pub fn new(levels: usize) -> Self {
        let mut disc = Discretization::new(FeSpace::P2, levels);
        disc.quad_order = Some(5);
        Self {
            disc,
            nu: 1.0,
            eps: 1e-10,
            exact: stokes_example(),
        }
    }

    pub fn source(&self) -> [ScalarFn; 2] {
        let nu = self.nu;
        let [u1, u2, p] = self.exact.clone();
        let (l1, l2) = (u1.laplacian(), u2.laplacian());
        let (g1, g2) = (p.grad.clone(), p.grad);
        [
            Arc::new(move |x, y| -nu * l1(x, y) + g1(x, y)[0]),
            Arc::new(move |x, y| -nu * l2(x, y) + g2(x, y)[1]),
        ]
    }
}

pub fn run_stokes(spec: &StokesSpec) -> Result<RunOutput> {
    let vspace = spec.disc.space;
    let pspace = FeSpace::from_degree(vspace.degree() - 1)?;
    let spaces = [vspace, vspace, pspace];
    let order = spec.disc.quad_order.unwrap_or(5);
    let eorder = order;
    let (vstr, ustr) = (["v1", "v2", "q"], ["u1", "u2", "p"]);
    let nu = spec.nu;
    let form = standardize_symbols(
        &vstr,
        &ustr,
        &VarForm::bilinear(
            vec![nu.into(), nu.into(), (-1.0).into(), (-1.0).into(), (-1.0).into(), (-1.0).into(), (-spec.eps).into()],
            &["v1.grad", "v2.grad", "v1.dx", "v2.dy", "q.val", "q.val", "q.val"],
            &["u1.grad", "u2.grad", "p.val", "p.val", "u1.dx", "u2.dy", "p.val"],
        )?,
    )?;
    let [f1, f2] = spec.source();
    let load = standardize_symbols(
        &vstr,
        &ustr,
        &VarForm::linear(vec![f1.into(), f2.into()], &["v1.val", "v2.val"])?,
    )?;
    let [u1, u2, p] = &spec.exact;

    let mut report = RateReport::new(&[L2, H1, P_L2]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let mut asm = Assembler::new(mesh, topo, &spaces, order)?;
        asm.add(&form, Domain::Interior)?;
        asm.add(&load, Domain::Interior)?;
        let dofmaps = asm.dofmaps().to_vec();
        let system = asm.finish()?;
        let partition = level.partition::<&str>(&[])?;
        let dirichlet = DirichletSpec::new(&[0], vec![Some(u1.value.clone()), Some(u2.value.clone()), None]);
        let x = apply_dirichlet_and_solve(&system, &partition, &dofmaps, &dirichlet)?;
        let parts = system.split(&x)?;
        let (l2, h1) = vector_errors(&level, &[&dofmaps[0], &dofmaps[1]], &[u1, u2], &[&parts[0], &parts[1]], eorder)?;
        let pl2 = error_l2(mesh, topo, &dofmaps[2], eorder, p.value.as_ref(), &parts[2])?;
        report.push(mesh.n_elems(), level.h, &[l2, h1, pl2])?;
        last = Some((level.mesh, parts));
    }
    let (mesh, solution) = last.expect("at least one level");
    Ok(RunOutput {
        report,
        mesh,
        spaces: spaces.to_vec(),
        solution,
    })
}
