use femform::assembly::assemble_matrix;
use femform::fespace::{Domain, FeSpace};
use femform::io::format_sci;
use femform::mesh::{square_mesh, uniform_refine, BoundaryPartition, MeshTopology};
use femform::quadrature::{triangle_rule, MAX_TRIANGLE_ORDER};
use femform::vform::VarForm;
use proptest::prelude::*;

/// Box with sides that are whole multiples of the returned spacing.
fn grid() -> impl Strategy<Value = ([f64; 4], f64)> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.1..0.8f64, 1usize..5, 1usize..5)
        .prop_map(|(x0, y0, h, nx, ny)| ([x0, x0 + h * nx as f64, y0, y0 + h * ny as f64], h))
}

fn space() -> impl Strategy<Value = FeSpace> {
    prop_oneof![Just(FeSpace::P1), Just(FeSpace::P2), Just(FeSpace::P3)]
}

#[test]
fn quadrature_weights_sum_to_one() {
    for order in 1..=MAX_TRIANGLE_ORDER {
        let r = triangle_rule(order).unwrap();
        assert!((r.weight.iter().sum::<f64>() - 1.0).abs() < 1e-14, "order {order}");
        for l in &r.lambda {
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_characteristic_and_counts((b, h) in grid()) {
        let m = square_mesh(b, h).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        prop_assert_eq!(m.n_nodes() + m.n_elems(), t.edge.len() + 1);
        let r = uniform_refine(&m).unwrap();
        prop_assert_eq!(r.n_elems(), 4 * m.n_elems());
        prop_assert!((r.total_area() - m.total_area()).abs() < 1e-12 * m.total_area());
        prop_assert!((m.total_area() - (b[1] - b[0]) * (b[3] - b[2])).abs() < 1e-12 * m.total_area());
    }

    #[test]
    fn mass_sums_to_area_and_stiffness_kills_constants((b, h) in grid(), sp in space()) {
        let m = square_mesh(b, h).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let order = sp.default_quad_order();
        let mass = assemble_matrix(&m, &t, &VarForm::bilinear(vec![1.0.into()], &["v.val"], &["u.val"]).unwrap(), sp, sp, order, Domain::Interior).unwrap();
        let stiff = assemble_matrix(&m, &t, &VarForm::bilinear(vec![1.0.into()], &["v.grad"], &["u.grad"]).unwrap(), sp, sp, order, Domain::Interior).unwrap();
        let ones = vec![1.0; mass.ncols()];
        let total: f64 = mass.matvec(&ones).unwrap().iter().sum();
        prop_assert!((total - m.total_area()).abs() < 1e-12 * m.total_area());
        let scale = stiff.frobenius_norm();
        prop_assert!(stiff.matvec(&ones).unwrap().iter().all(|v| v.abs() < 1e-12 * scale));
    }

    #[test]
    fn partition_covers_each_boundary_edge_once(cut in 0.1..0.9f64) {
        let m = square_mesh([0.0, 1.0, 0.0, 1.0], 0.125).unwrap();
        let t = MeshTopology::new(&m).unwrap();
        let sel = [format!("x<={cut}"), "y==0".to_string()];
        let p = BoundaryPartition::classify(&m, &t, &sel).unwrap();
        prop_assert_eq!(p.regions.len(), 3);
        let mut seen: Vec<usize> = p.regions.iter().flat_map(|r| r.edges.iter().map(|e| e.edge)).collect();
        seen.sort_unstable();
        let all: Vec<usize> = t.bd_edge.iter().map(|e| e.edge).collect();
        prop_assert_eq!(seen, all);
    }

    #[test]
    fn sci_format_keeps_six_digits(v in -1e12..1e12f64) {
        let s = format_sci(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-6 * v.abs() + f64::MIN_POSITIVE);
    }
}
