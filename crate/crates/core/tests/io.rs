use std::f64::consts::PI;

use landau_tr::io::{read_dump, read_spectral_dump, write_dump, write_spectral_dump, write_vtk};
use landau_tr::phases::{seed, SeedName};
use landau_tr::{Grid, ModelParams, PhysicalField};

#[test]
fn dump_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::cubic(8, 3, 2.0 * 6f64.sqrt() * PI).unwrap().shared();
    let u = seed(SeedName::Random, &g, 0.3, 4).unwrap();
    let p = ModelParams::new(-0.28, 0.32).unwrap();
    let stem = dir.path().join("field");
    write_spectral_dump(&stem, &u, &p, Some(-1.5)).unwrap();
    let psi = u.to_physical().unwrap();
    for path in [stem.clone(), stem.with_extension("bin"), stem.with_extension("json")] {
        let (back, header) = read_dump(&path).unwrap();
        assert_eq!(back.values(), psi.values());
        assert_eq!(header.m, 8);
        assert_eq!(header.d, 3);
        assert_eq!(header.tau, -0.28);
        assert_eq!(header.gamma, 0.32);
        assert_eq!(header.energy, Some(-1.5));
        assert!(back.grid().same_as(&g));
    }
    let (v, _) = read_spectral_dump(&stem, Some(&g)).unwrap();
    let diff = v.as_real().iter().zip(u.as_real()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-15);
    let bytes = std::fs::metadata(stem.with_extension("bin")).unwrap().len();
    assert_eq!(bytes, 8 * 512);
}

#[test]
fn binary_layout_is_little_endian_axis_zero_fastest() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::cubic(4, 2, 2.0 * PI).unwrap().shared();
    let psi = PhysicalField::new(g.clone(), (0..16).map(|i| i as f64).collect()).unwrap();
    let stem = dir.path().join("ramp");
    write_dump(&stem, &psi, &ModelParams::new(0.1, 0.0).unwrap(), None).unwrap();
    let raw = std::fs::read(stem.with_extension("bin")).unwrap();
    for (i, chunk) in raw.chunks(8).enumerate() {
        assert_eq!(f64::from_le_bytes(chunk.try_into().unwrap()), i as f64);
    }
    assert_eq!(g.point(1), vec![PI / 2.0, 0.0]);
}

#[test]
fn missing_or_truncated_dumps_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(read_dump(&dir.path().join("nothing")).is_err());
    let g = Grid::cubic(4, 2, 2.0 * PI).unwrap().shared();
    let stem = dir.path().join("short");
    write_dump(&stem, &PhysicalField::zeros(g), &ModelParams::new(0.1, 0.0).unwrap(), None).unwrap();
    std::fs::write(stem.with_extension("bin"), [0u8; 24]).unwrap();
    assert!(read_dump(&stem).is_err());
}

#[test]
fn dumps_move_between_boxes_but_not_resolutions() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::cubic(4, 2, 2.0 * PI).unwrap().shared();
    let stretched = Grid::cubic(4, 2, 3.0 * PI).unwrap().shared();
    let finer = Grid::cubic(8, 2, 2.0 * PI).unwrap().shared();
    let stem = dir.path().join("f");
    let psi = seed(SeedName::Random, &g, 0.2, 1).unwrap().to_physical().unwrap();
    write_dump(&stem, &psi, &ModelParams::new(0.1, 0.0).unwrap(), None).unwrap();
    let (moved, _) = read_spectral_dump(&stem, Some(&stretched)).unwrap();
    assert!(moved.grid().same_as(&stretched));
    let back = moved.to_physical().unwrap();
    let diff = back.values().iter().zip(psi.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-15);
    assert!(read_spectral_dump(&stem, Some(&finer)).is_err());
}

#[test]
fn vtk_has_a_point_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::cubic(4, 3, 2.0 * PI).unwrap().shared();
    let psi = seed(SeedName::Random, &g, 0.1, 0).unwrap().to_physical().unwrap();
    let path = dir.path().join("f.vtk");
    write_vtk(&path, &psi).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# vtk DataFile"));
    assert!(text.contains("DIMENSIONS 4 4 4"));
    assert!(text.contains("POINT_DATA 64"));
}
