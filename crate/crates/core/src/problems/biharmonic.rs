use super::exact::{biharmonic_clamped, BiharmonicExample};
use super::{mesh_levels, vector_errors, Discretization, RunOutput, H1, L2, W_H1, W_L2};
use crate::assembly::{assemble_matrix, Assembler};
use crate::fespace::{coef_matrix_on_edges, Domain, FeSpace};
use crate::system::{apply_dirichlet_and_solve, DirichletSpec, RateReport};
use crate::vform::{Coef, VarForm};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiharmonicMode {
    /// `[A, B; Bᵀ, O]` from scalar mass and stiffness matrices.
    Block,
    /// One three-entry vector form.
    Vector,
}

/// `Δ²u = f` split as `w = -Δu`, `-Δw = f`, with `u` and `∂ₙu` given on
/// the boundary. Unknowns are ordered `(w, u)`.
pub struct BiharmonicSpec {
    pub disc: Discretization,
    pub data: BiharmonicExample,
    pub mode: BiharmonicMode,
}

impl BiharmonicSpec {
    pub fn new(space: FeSpace, levels: usize, mode: BiharmonicMode) -> Self {
        Self {
            disc: Discretization::new(space, levels),
            data: biharmonic_clamped(),
            mode,
        }
    }
}

/// Columns: u errors followed by w errors. The solution holds `[w, u]`.
pub fn run_biharmonic(spec: &BiharmonicSpec) -> Result<RunOutput> {
    let space = spec.disc.space;
    let order = spec.disc.quad_order();
    let eorder = order;
    let d = &spec.data;
    let mut report = RateReport::new(&[L2, H1, W_L2, W_H1]);
    let mut last = None;
    for level in mesh_levels(&spec.disc.mesh, spec.disc.levels)? {
        let (mesh, topo) = (&level.mesh, &level.topo);
        let mut asm = Assembler::new(mesh, topo, &[space, space], order)?;
        match spec.mode {
            BiharmonicMode::Block => {
                let scalar = |t: &str, u: &str| -> Result<_> {
                    let f = VarForm::bilinear(vec![1.0.into()], &[t], &[u])?;
                    assemble_matrix(mesh, topo, &f, space, space, order, Domain::Interior)
                };
                let a = scalar("v.val", "u.val")?.scale(-1.0);
                let b = scalar("v.grad", "u.grad")?;
                asm.add_block(0, 0, &a.to_triples())?;
                asm.add_block(0, 1, &b.to_triples())?;
                asm.add_block(1, 0, &b.transpose().to_triples())?;
            }
            BiharmonicMode::Vector => {
                let form = VarForm::bilinear(
                    vec![(-1.0).into(), 1.0.into(), 1.0.into()],
                    &["v1.val", "v1.grad", "v2.grad"],
                    &["u1.val", "u2.grad", "u1.grad"],
                )?;
                asm.add(&form, Domain::Interior)?;
            }
        }
        asm.add(&VarForm::linear(vec![d.f.clone().into()], &["v2.val"])?, Domain::Interior)?;
        let edges = &topo.bd_edge;
        let dudn = coef_matrix_on_edges(&d.u.grad_vec(), mesh, topo, edges, order)?;
        asm.add(&VarForm::linear(vec![Coef::matrix(dudn)], &["v1.val"])?, Domain::Boundary(edges))?;

        let dofmaps = asm.dofmaps().to_vec();
        let system = asm.finish()?;
        let partition = level.partition::<&str>(&[])?;
        let dirichlet = DirichletSpec::new(&[0], vec![None, Some(d.u.value.clone())]);
        let x = apply_dirichlet_and_solve(&system, &partition, &dofmaps, &dirichlet)?;
        let parts = system.split(&x)?;
        let (ul2, uh1) = vector_errors(&level, &[&dofmaps[1]], &[&d.u], &[&parts[1]], eorder)?;
        let (wl2, wh1) = vector_errors(&level, &[&dofmaps[0]], &[&d.w], &[&parts[0]], eorder)?;
        report.push(mesh.n_elems(), level.h, &[ul2, uh1, wl2, wh1])?;
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
    use crate::problems::exact::biharmonic_example;

    #[test]
    fn block_and_vector_modes_agree() {
        let run = |mode| {
            let mut spec = BiharmonicSpec::new(FeSpace::P2, 1, mode);
            spec.data = biharmonic_example();
            run_biharmonic(&spec).unwrap()
        };
        let (b, v) = (run(BiharmonicMode::Block), run(BiharmonicMode::Vector));
        for (p, q) in b.solution.iter().zip(&v.solution) {
            let diff = p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-11, "{diff}");
        }
    }
}
