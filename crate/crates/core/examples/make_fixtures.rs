//! Regenerates the input files under `crates/core/data`.
//!
//! ```text
//! cargo run --example make_fixtures [-- OUTPUT_DIR]
//! ```

use std::path::PathBuf;

use lcfpost::material::{cmb_strain, MaterialParams};
use lcfpost::mesh::builders::{annular_sector_graded, hex_block};
use lcfpost::mesh::io::write_mesh;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Disk segment: one of 44 sectors of a ring with a loaded bore.
const R_INNER: f64 = 50.0;
const R_OUTER: f64 = 120.0;
const THICKNESS: f64 = 20.0;
const SEGMENTS: f64 = 44.0;
/// Hoop stress at the bore, MPa.
const BORE_HOOP: f64 = 700.0;

/// Plane-stress Lame solution `u_r = a r + b / r` with a traction-free
/// outer rim, scaled to the requested bore hoop stress.
fn lame_displacement(x: &Vector3<f64>, e: f64, nu: f64) -> Vector3<f64> {
    let b = BORE_HOOP * (1.0 + nu) / (e * (R_OUTER.powi(-2) + R_INNER.powi(-2)));
    let a = (1.0 - nu) / (1.0 + nu) * b / (R_OUTER * R_OUTER);
    let r = x.x.hypot(x.y);
    let ur = a * r + b / r;
    let uz = -2.0 * nu / (1.0 - nu) * a * x.z;
    Vector3::new(ur * x.x / r, ur * x.y / r, uz)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"));
    std::fs::create_dir_all(&dir)?;
    let params = MaterialParams::example();
    let (e, nu) = (params.youngs_modulus(), params.elastic.poisson_ratio());
    std::fs::write(dir.join("material.txt"), params.to_file_string())?;

    // uniaxial stress of 450 MPa in a unit cube
    let mut cube = hex_block([1.0; 3], [1, 1, 1]);
    let ex = 450.0 / e;
    cube.set_displacements(|x| Vector3::new(ex * x.x, -nu * ex * x.y, -nu * ex * x.z));
    write_mesh(&cube, &dir.join("unit_cube.mesh"))?;

    let mut disk = annular_sector_graded(R_INNER, R_OUTER, std::f64::consts::TAU / SEGMENTS, THICKNESS, [6, 4, 2], 2.5);
    disk.set_displacements(|x| lame_displacement(x, e, nu));
    write_mesh(&disk, &dir.join("disk_sector.mesh"))?;
    std::fs::write(
        dir.join("disk_run.toml"),
        "# analysis of one disk segment; the disk has 44 of them\n\
         mesh = \"disk_sector.mesh\"\nmaterial = \"material.txt\"\nlq = 4\nsegments = 44\n",
    )?;

    // strain-controlled specimens at three target lives, Weibull scatter
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut csv = String::from("n_cycles,strain_amplitude,gauge_area\n");
    let area = 40.0;
    for n_det in [3e2, 3e3, 3e4] {
        let eps = cmb_strain(n_det, &params.cmb);
        let eta = n_det * f64::powf(area, -1.0 / params.weibull_shape);
        for _ in 0..20 {
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            let n = eta * (-u.ln()).powf(1.0 / params.weibull_shape);
            csv.push_str(&format!("{n:?},{eps:?},{area:?}\n"));
        }
    }
    std::fs::write(dir.join("specimens.csv"), csv)?;
    std::fs::write(
        dir.join("calibration_fixed.txt"),
        format!("# elastic and cyclic stress-strain data, not fitted\nE = {e:?}\nnu = {nu:?}\nK = 1000.0\nn_ro = 0.1\n"),
    )?;
    println!("fixtures written to {}", dir.display());
    Ok(())
}
