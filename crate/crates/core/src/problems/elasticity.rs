use std::sync::Arc;

use super::exact::{elasticity_example, Field};
use super::{mesh_levels, natural_and_dirichlet, vector_errors, Discretization, RunOutput, H1, L2};
use crate::assembly::{assemble_matrix, Assembler};
use crate::fespace::{coef_matrix_on_edges, Domain, FeSpace};
use crate::system::{apply_dirichlet_and_solve, DirichletSpec, RateReport};
use crate::vform::{Coef, VarForm};
use crate::{Result, ScalarFn};

/// Linear elasticity `-div σ(u) = f`, `σ = 2μ ε(u) + λ div u I`.
#[derive(Clone)]
pub struct ElasticitySpec {
    pub disc: Discretization,
    pub lambda: f64,
    pub mu: f64,
    pub exact: [Field; 2],
    /// Traction regions for the tensor form; the displacement form is
    /// always clamped on the whole boundary.
    pub bd_str: Vec<String>,
}

impl ElasticitySpec {
    pub fn new(space: FeSpace, levels: usize) -> Self {
        Self {
            disc: Discretization::new(space, levels),
            lambda: 2.0,
            mu: 1.0,
            exact: elasticity_example(),
            bd_str: vec!["y==0 | x==1".into()],
        }
    }

    /// `f = -μ Δu - (λ + μ) ∇(div u)`.
    pub fn source(&self) -> [ScalarFn; 2] {
        let (lam, mu) = (self.lambda, self.mu);
        let [h1, h2] = [self.exact[0].hess.clone(), self.exact[1].hess.clone()];
        let (g1, g2) = (h1.clone(), h2.clone());
        [
            Arc::new(move |x, y| {
                let (a, b) = (g1(x, y), g2(x, y));
                -mu * (a[0] + a[2]) - (lam + mu) * (a[0] + b[1])
            }),
            Arc::new(move |x, y| {
                let (a, b) = (h1(x, y), h2(x, y));
                -mu * (b[0] + b[2]) - (lam + mu) * (a[1] + b[2])
            }),
        ]
    }

    /// `[σ11, σ22, σ12]` of the exact solution.
    pub fn stress(&self) -> impl Fn(f64, f64) -> [f64; 3] + Send + Sync + Clone + 'static {
        let (lam, mu) = (self.lambda, self.mu);
        let (g1, g2) = (self.exact[0].grad.clone(), self.exact[1].grad.clone());
        move |x, y| {
            let (a, b) = (g1(x, y), g2(x, y));
            let div = a[0] + b[1];
            [2.0 * mu * a[0] + lam * div, 2.0 * mu * b[1] + lam * div, mu * (a[1] + b[0])]
        }
    }
}

/// `ε(v):ε(u)` in short form, three entries with summed terms.
pub fn elasticity_strain_form() -> Result<VarForm> {
    VarForm::bilinear(
        vec![1.0.into(), 1.0.into(), 0.5.into()],
        &["v1.dx", "v2.dy", "v1.dy + v2.dx"],
        &["u1.dx", "u2.dy", "u1.dy + u2.dx"],
    )
}

/// `ε(v):ε(u)` written out as six elementary pairs.
pub fn elasticity_strain_form_expanded() -> Result<VarForm> {
    VarForm::bilinear(
        vec![1.0.into(), 1.0.into(), 0.5.into(), 0.5.into(), 0.5.into(), 0.5.into()],
        &["v1.dx", "v2.dy", "v1.dy", "v1.dy", "v2.dx", "v2.dx"],
        &["u1.dx", "u2.dy", "u1.dy", "u2.dx", "u1.dy", "u2.dx"],
    )
}

fn tensor_form(mu: f64, lambda: f64) -> Result<VarForm> {
    let mut form = elasticity_strain_form()?;
    for e in &mut form.entries {
        if let Coef::Const(c) = e.coef {
            e.coef = Coef::Const(2.0 * mu * c);
        }
    }
    form.entries
        .extend(VarForm::bilinear(vec![lambda.into()], &["v1.dx + v2.dy"], &["u1.dx + u2.dy"])?.entries);
    Ok(form)
}

fn finish_level(
    spec: &ElasticitySpec,
    level: &super::Level,
    asm: Assembler<'_>,
    partition: &crate::mesh::BoundaryPartition,
    on: usize,
    eorder: usize,
    report: &mut RateReport,
) -> Result<Vec<Vec<f64>>> {
    let dofmaps = asm.dofmaps().to_vec();
    let system = asm.finish()?;
    let dirichlet = DirichletSpec::new(
        &[on],
        vec![Some(spec.exact[0].value.clone()), Some(spec.exact[1].value.clone())],
    );
    let x = apply_dirichlet_and_solve(&system, partition, &dofmaps, &dirichlet)?;
    let parts = system.split(&x)?;
    let (l2, h1) = vector_errors(
        level,
        &[&dofmaps[0], &dofmaps[1]],
        &[&spec.exact[0], &spec.exact[1]],
        &[&parts[0], &parts[1]],
        eorder,
    )?;
    report.push(level.mesh.n_elems(), level.h, &[l2, h1])?;
    Ok(parts)
}

/// Displacement form: blocks `μA + (λ+μ)B₁`, `(λ+μ)B₂`, `(λ+μ)B₃`,
/// `μA + (λ+μ)B₄` assembled from scalar matrices, clamped everywhere.
pub fn run_elasticity_displacement(spec: &ElasticitySpec) -> Result<RunOutput> {
    let space = spec.disc.space;
    let order = spec.disc.quad_order();
    let eorder = order;
    let (lam, mu) = (spec.lambda, spec.mu);
    let [f1, f2] = spec.source();
    let mut report = RateReport::new(&[L2, H1]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let scalar = |t: &str, u: &str| -> Result<_> {
            assemble_matrix(mesh, topo, &VarForm::bilinear(vec![1.0.into()], &[t], &[u])?, space, space, order, Domain::Interior)
        };
        let a = scalar("v.grad", "u.grad")?;
        let b1 = scalar("v.dx", "u.dx")?;
        let b2 = scalar("v.dx", "u.dy")?;
        let b3 = scalar("v.dy", "u.dx")?;
        let b4 = scalar("v.dy", "u.dy")?;
        let s = lam + mu;
        let mut asm = Assembler::new(mesh, topo, &[space, space], order)?;
        asm.add_block(0, 0, &a.scale(mu).add(&b1.scale(s))?.to_triples())?;
        asm.add_block(0, 1, &b2.scale(s).to_triples())?;
        asm.add_block(1, 0, &b3.scale(s).to_triples())?;
        asm.add_block(1, 1, &a.scale(mu).add(&b4.scale(s))?.to_triples())?;
        asm.add(
            &VarForm::linear(vec![f1.clone().into(), f2.clone().into()], &["v1.val", "v2.val"])?,
            Domain::Interior,
        )?;
        let partition = level.partition::<&str>(&[])?;
        let parts = finish_level(spec, &level, asm, &partition, 0, eorder, &mut report)?;
        last = Some((level.mesh, parts));
    }
    let (mesh, solution) = last.expect("at least one level");
    Ok(RunOutput {
        report,
        mesh,
        spaces: vec![space; 2],
        solution,
    })
}

/// Tensor form `2μ ε(v):ε(u) + λ div v div u` with traction `σn` on the
/// selector regions and the exact displacement on the rest.
pub fn run_elasticity_tensor(spec: &ElasticitySpec) -> Result<RunOutput> {
    let space = spec.disc.space;
    let order = spec.disc.quad_order();
    let eorder = order;
    let form = tensor_form(spec.mu, spec.lambda)?;
    let [f1, f2] = spec.source();
    let sigma = spec.stress();
    let mut report = RateReport::new(&[L2, H1]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let partition = level.partition(&spec.bd_str)?;
        let (natural, on) = natural_and_dirichlet(&partition);
        let mut asm = Assembler::new(mesh, topo, &[space, space], order)?;
        asm.add(&form, Domain::Interior)?;
        asm.add(
            &VarForm::linear(vec![Coef::components([f1.clone().into(), f2.clone().into()])], &["v.val"])?,
            Domain::Interior,
        )?;
        for r in natural {
            let edges = &partition.region(r)?.edges;
            if edges.is_empty() {
                continue;
            }
            let (s1, s2) = (sigma.clone(), sigma.clone());
            let c1 = coef_matrix_on_edges(
                &move |x: f64, y: f64| {
                    let s = s1(x, y);
                    vec![s[0], s[2]]
                },
                mesh,
                topo,
                edges,
                order,
            )?;
            let c2 = coef_matrix_on_edges(
                &move |x: f64, y: f64| {
                    let s = s2(x, y);
                    vec![s[2], s[1]]
                },
                mesh,
                topo,
                edges,
                order,
            )?;
            asm.add(
                &VarForm::linear(vec![Coef::components([Coef::matrix(c1), Coef::matrix(c2)])], &["v.val"])?,
                Domain::Boundary(edges),
            )?;
        }
        let parts = finish_level(spec, &level, asm, &partition, on, eorder, &mut report)?;
        last = Some((level.mesh, parts));
    }
    let (mesh, solution) = last.expect("at least one level");
    Ok(RunOutput {
        report,
        mesh,
        spaces: vec![space; 2],
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{square_mesh, MeshTopology};

    #[test]
    fn rigid_translation_is_reproduced() {
        let mut spec = ElasticitySpec::new(FeSpace::P1, 1);
        spec.lambda = 7.5;
        spec.mu = 0.3;
        spec.exact = [Field::constant(0.25), Field::constant(-1.5)];
        for out in [run_elasticity_tensor(&spec).unwrap(), run_elasticity_displacement(&spec).unwrap()] {
            assert!(out.report.columns[0].1[0] < 1e-12, "{:?}", out.report);
        }
    }

    #[test]
    fn linear_displacement_patch_test() {
        let mut spec = ElasticitySpec::new(FeSpace::P1, 1);
        spec.exact = [Field::linear(0.1, 1.0, 2.0), Field::linear(-0.3, 0.5, -1.0)];
        for out in [run_elasticity_tensor(&spec).unwrap(), run_elasticity_displacement(&spec).unwrap()] {
            assert!(out.report.columns[0].1[0] < 1e-10, "{:?}", out.report);
            assert!(out.report.columns[1].1[0] < 1e-10, "{:?}", out.report);
        }
    }

    #[test]
    fn tensor_form_scaling() {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.5).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let f = tensor_form(2.0, 3.0).unwrap();
        assert_eq!(f.len(), 4);
        let sys = crate::assembly::assemble_system(&m, &t, &f, &[FeSpace::P1; 2], 3, Domain::Interior).unwrap();
        // rigid translations lie in the kernel
        let mut x = vec![1.0; sys.n_dof()];
        x[..sys.nndofu[0]].iter_mut().for_each(|v| *v = 0.0);
        let y = sys.matrix.matvec(&x).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-13));
    }
}
