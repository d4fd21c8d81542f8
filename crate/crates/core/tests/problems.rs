use std::f64::consts::PI;
use std::sync::Arc;

use femform::assembly::{assemble_matrix, assemble_system};
use femform::fespace::{Domain, FeSpace};
use femform::io::read_freefem_msh;
use femform::mesh::{square_mesh, MeshTopology};
use femform::problems::{
    run_elasticity_displacement, run_elasticity_tensor, run_heat, run_poisson, run_stokes, ElasticitySpec, Field,
    HeatExact, HeatSpec, MeshSource, PoissonSpec, StokesSpec, TimeStep, H1, L2,
};
use femform::scalar_fn;
use femform::vform::VarForm;

fn fixture() -> MeshSource {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/square5.msh");
    MeshSource::Mesh(read_freefem_msh(path).unwrap().mesh)
}

#[test]
fn elasticity_rates() {
    // P1 is pre-asymptotic on the coarsest mesh
    for (space, levels, l2, h1) in [(FeSpace::P1, 4, 2.0, 1.0), (FeSpace::P2, 3, 3.0, 2.0)] {
        let spec = ElasticitySpec::new(space, levels);
        for out in [run_elasticity_displacement(&spec).unwrap(), run_elasticity_tensor(&spec).unwrap()] {
            let (a, b) = (out.report.slope(L2).unwrap(), out.report.slope(H1).unwrap());
            assert!((a - l2).abs() < 0.25 && (b - h1).abs() < 0.25, "{space}: {a} {b}");
        }
    }
}

#[test]
fn displacement_blocks_match_vector_form() {
    let (lam, mu) = (2.0, 1.0);
    let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.25).unwrap();
    let t = MeshTopology::new(&m).unwrap();
    let sp = FeSpace::P2;
    let scalar = |v: &str, u: &str| {
        assemble_matrix(&m, &t, &VarForm::bilinear(vec![1.0.into()], &[v], &[u]).unwrap(), sp, sp, 4, Domain::Interior)
            .unwrap()
            .to_dense()
    };
    let a = scalar("v.grad", "u.grad");
    let bs = [scalar("v.dx", "u.dx"), scalar("v.dx", "u.dy"), scalar("v.dy", "u.dx"), scalar("v.dy", "u.dy")];
    let form = VarForm::bilinear(
        vec![mu.into(), mu.into(), (lam + mu).into()],
        &["v1.grad", "v2.grad", "v1.dx + v2.dy"],
        &["u1.grad", "u2.grad", "u1.dx + u2.dy"],
    )
    .unwrap();
    let sys = assemble_system(&m, &t, &form, &[sp, sp], 4, Domain::Interior).unwrap();
    let big = sys.matrix.to_dense();
    let n = a.len();
    let mut worst: f64 = 0.0;
    for bi in 0..2 {
        for bj in 0..2 {
            let b = &bs[2 * bi + bj];
            for i in 0..n {
                for j in 0..n {
                    let diag = if bi == bj { mu * a[i][j] } else { 0.0 };
                    let want = diag + (lam + mu) * b[i][j];
                    worst = worst.max((big[bi * n + i][bj * n + j] - want).abs());
                }
            }
        }
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn one_huge_heat_step_is_the_elliptic_solve() {
    let s = |x: f64, y: f64| (PI * x).sin() * y.sin();
    let mut heat = HeatSpec::new(FeSpace::P1, 2);
    heat.exact = HeatExact {
        u: Arc::new(move |x, y, _| s(x, y)),
        grad: Arc::new(|x, y, _| [PI * (PI * x).cos() * y.sin(), (PI * x).sin() * y.cos()]),
        f: Arc::new(move |x, y, _| (PI * PI + 1.0) * s(x, y)),
    };
    heat.step = TimeStep::Steps(1);
    heat.t_end = 1e8;
    let h = run_heat(&heat).unwrap();

    let mut ell = PoissonSpec::new(FeSpace::P1, 2);
    ell.a = Field::constant(1.0);
    ell.c = scalar_fn(|_, _| 0.0);
    ell.g_r = scalar_fn(|_, _| 0.0);
    ell.exact = Field::new(
        s,
        |x, y| [PI * (PI * x).cos() * y.sin(), (PI * x).sin() * y.cos()],
        |x, y| {
            let (a, b) = (PI * x, y);
            [-PI * PI * a.sin() * b.sin(), PI * a.cos() * b.cos(), -a.sin() * b.sin()]
        },
    );
    let e = run_poisson(&ell).unwrap();
    let diff = h.solution[0].iter().zip(&e.solution[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn stokes_reproduces_linear_flow() {
    let mut spec = StokesSpec::new(1);
    // div u = 0, Δu = 0
    let p = |x: f64, y: f64| x + y - 1.0;
    spec.exact = [Field::linear(0.0, 1.0, 0.0), Field::linear(0.0, 0.0, -1.0), Field::linear(-1.0, 1.0, 1.0)];
    let out = run_stokes(&spec).unwrap();
    for c in [L2, H1] {
        let e = out.report.column(c).unwrap()[0];
        assert!(e < 1e-10, "{c}: {e}");
    }
    // the constant pressure mode is fixed only by the small penalty, so
    // compare vertex values up to a constant
    let diff: Vec<f64> = out.mesh.node.iter().zip(&out.solution[2]).map(|(q, v)| v - p(q[0], q[1])).collect();
    let mean = diff.iter().sum::<f64>() / diff.len() as f64;
    assert!(diff.iter().all(|d| (d - mean).abs() < 1e-9), "{diff:?}");
}

#[test]
fn stokes_rates_on_three_levels() {
    let out = run_stokes(&StokesSpec::new(3)).unwrap();
    let s = out.report.slopes().unwrap();
    assert!((s[0] - 3.0).abs() < 0.3 && (s[1] - 2.0).abs() < 0.3 && (s[2] - 2.0).abs() < 0.3, "{s:?}");
}

#[test]
fn poisson_on_a_file_mesh() {
    let quad = Field::new(
        |x, y| x * x - 2.0 * x * y + 0.5 * y,
        |x, y| [2.0 * x - 2.0 * y, -2.0 * x + 0.5],
        |_, _| [2.0, -2.0, 0.0],
    );
    for (space, exact) in [(FeSpace::P1, Field::linear(1.0, -0.5, 2.0)), (FeSpace::P2, quad)] {
        let mut spec = PoissonSpec::new(space, 2);
        spec.disc.mesh = fixture();
        spec.exact = exact;
        let out = run_poisson(&spec).unwrap();
        assert_eq!(out.report.n_elems, [4, 16]);
        for c in [L2, H1] {
            assert!(out.report.column(c).unwrap().iter().all(|e| *e < 1e-10), "{space} {:?}", out.report);
        }
    }
}
