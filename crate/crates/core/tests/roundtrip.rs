//! Every file the tool writes can be read back by its own readers.

use std::path::Path;

use lcfpost::exec::Parallelism;
use lcfpost::keyvalue;
use lcfpost::material::{parse_material, MaterialParams};
use lcfpost::mesh::builders::{annular_sector, tet_block};
use lcfpost::mesh::io::{format_mesh, parse_mesh};
use lcfpost::quadrature::FaceRules;
use lcfpost::reliability::assess;
use lcfpost::reliability::output::{parse_vtk_polydata, read_faces_csv, read_pof_csv};
use nalgebra::Vector3;

#[test]
fn mesh_text_round_trip_is_exact() {
    let mut mesh = annular_sector(10.0, 17.5, 0.3, 2.0, [2, 2, 1]);
    mesh.set_displacements(|x| Vector3::new(1e-3 * x.y.sin(), 2e-4 * x.x, -1e-4 * x.z * x.x));
    let back = parse_mesh(&format_mesh(&mesh)).unwrap();
    assert_eq!(back.nodes(), mesh.nodes());
    assert_eq!(back.elements(), mesh.elements());
}

#[test]
fn material_round_trip_is_exact() {
    let mut p = MaterialParams::example();
    p.cmb.sigma_f = 1234.567_890_123;
    p.weibull_shape = 2.0 / 3.0 + 4.0;
    assert_eq!(parse_material(&p.to_file_string()).unwrap(), p);
}

#[test]
fn analysis_outputs_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let mut mesh = tet_block([2.0, 1.0, 1.0], [2, 1, 1]);
    mesh.set_displacements(|x| Vector3::new(2e-3 * x.x + 5e-4 * x.y * x.y, -6e-4 * x.y, -6e-4 * x.z));
    let mesh_path = dir.path().join("block.mesh");
    std::fs::write(&mesh_path, format_mesh(&mesh)).unwrap();
    let material_path = dir.path().join("material.txt");
    let params = MaterialParams::example();
    std::fs::write(&material_path, params.to_file_string()).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let code = lcfpost::cli::run([
        "lcfpost".to_string(),
        "analyze".into(),
        "--mesh".into(),
        s(&mesh_path),
        "--material".into(),
        s(&material_path),
        "--grid-count".into(),
        "17".into(),
        "--out".into(),
        s(dir.path()),
    ]);
    assert_eq!(code, 0);

    let direct = assess(&mesh, &params, &FaceRules::new(4).unwrap(), Parallelism::Sequential).unwrap();

    let pof = read_pof_csv(std::fs::File::open(dir.path().join("pof.csv")).unwrap()).unwrap();
    assert_eq!(pof.len(), 17);
    assert!(pof.windows(2).all(|w| w[0].n < w[1].n && w[0].pof <= w[1].pof));
    for row in &pof {
        assert_eq!(row.pof, direct.pof(row.n));
    }

    let faces = read_faces_csv(std::fs::File::open(dir.path().join("faces.csv")).unwrap()).unwrap();
    assert_eq!(faces.len(), direct.faces().len());
    for (row, f) in faces.iter().zip(direct.faces()) {
        assert_eq!((row.element_id, row.face, row.hazard, row.area), (f.element_id.0, f.face, f.hazard, f.area));
    }

    let vtk = parse_vtk_polydata(&std::fs::read_to_string(dir.path().join("density.vtk")).unwrap()).unwrap();
    assert_eq!(vtk.polygons.len(), faces.len());
    assert!(vtk.polygons.iter().all(|p| p.len() == 3));
    let density = vtk.scalar("density").unwrap();
    for (d, f) in density.iter().zip(direct.faces()) {
        assert_eq!(*d, f.density());
    }
    assert!(vtk.scalar("expected_cracks").is_some());

    let summary = keyvalue::parse(&std::fs::read_to_string(dir.path().join("summary.txt")).unwrap()).unwrap();
    let eta = keyvalue::parse_f64(keyvalue::get(&summary, "eta").unwrap()).unwrap();
    assert_eq!(eta, direct.eta);
}
