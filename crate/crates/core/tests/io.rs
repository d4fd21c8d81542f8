use femform::io::{
    msh_from_mesh, read_freefem_msh, read_freefem_solution, read_results, write_freefem_msh, write_freefem_solution,
    write_results, ResultTable,
};
use femform::mesh::{square_mesh, MeshTopology};
use femform::Error;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/square5.msh");

#[test]
fn fixture_labels_and_partition() {
    let data = read_freefem_msh(FIXTURE).unwrap();
    assert_eq!((data.mesh.n_nodes(), data.mesh.n_elems(), data.edges.len()), (5, 4, 4));
    assert!((data.mesh.total_area() - 1.0).abs() < 1e-14);
    let topo = MeshTopology::new(&data.mesh).unwrap();
    let labels = data.edge_labels();
    let p = data.partition(&topo, &labels[..1]).unwrap();
    assert_eq!(p.regions.len(), 2);
    assert_eq!(p.regions[0].edges.len() + p.regions[1].edges.len(), 4);
}

#[test]
fn mesh_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.msh");
    let m = square_mesh([0.0, 2.0, -1.0, 0.5], 0.5).unwrap();
    let t = MeshTopology::new(&m).unwrap();
    let data = msh_from_mesh(&m, &t);
    write_freefem_msh(&path, &data).unwrap();
    let back = read_freefem_msh(&path).unwrap();
    assert_eq!(back.mesh.elem, data.mesh.elem);
    assert_eq!(back.edges, data.edges);
    let worst = back
        .mesh
        .node
        .iter()
        .zip(&data.mesh.node)
        .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
        .fold(0.0, f64::max);
    assert!(worst < 1e-14);
}

#[test]
fn solution_and_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("u.txt");
    let values = vec![0.0, -1.5, 3.25e-7, 1e20];
    write_freefem_solution(&sol, &values).unwrap();
    assert_eq!(read_freefem_solution(&sol).unwrap(), values);

    let csv = dir.path().join("t.csv");
    let mut table = ResultTable::new(["#Dof", "h", "err"]);
    table.push_row(vec![32.0, 0.25, 1.234567e-3]).unwrap();
    table.push_row(vec![128.0, 0.125, 3.0e-4]).unwrap();
    write_results(&csv, &table).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "32,2.50000e-01,1.23457e-03");
    let back = read_results(&csv).unwrap();
    assert_eq!(back.headers, table.headers);
    assert_eq!(back.rows[1], table.rows[1]);
}

#[test]
fn truncated_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("short.txt");
    std::fs::write(&sol, "3\n1.0 2.0\n").unwrap();
    assert!(read_freefem_solution(&sol).is_err());

    let msh = dir.path().join("short.msh");
    std::fs::write(&msh, "3 1 3\n0 0 1\n1 0 1\n").unwrap();
    assert!(matches!(read_freefem_msh(&msh), Err(Error::Parse { .. })));
    assert!(read_freefem_msh(dir.path().join("missing.msh")).is_err());
}
