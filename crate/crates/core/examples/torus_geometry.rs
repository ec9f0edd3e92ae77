//! Closest point, normal and curvature of the model torus.
//!
//! `cargo run --example torus_geometry`

use surfvec::{Point3, Surface, TorusSurface};

fn main() -> surfvec::Result<()> {
    let s = TorusSurface::model();
    println!("torus R = {}, r = {}, area = {:.6}", s.major(), s.minor(), s.area());

    let on = s.point(0.7, 1.9);
    let off = on + s.normal(&on)? * 0.05;
    println!("point {:?}", off);
    println!("  signed distance {:+.6}", s.signed_distance(&off)?);
    println!("  closest point   {:?}", s.closest_point(&off)?);
    println!("  normal          {:?}", s.normal(&off)?);

    let h = s.curvature_tensor(&on)?;
    let eig = nalgebra::SymmetricEigen::new(h).eigenvalues;
    let mut k: Vec<f64> = eig.iter().copied().collect();
    k.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("curvature tensor eigenvalues at the foot point (0 belongs to the normal) {:?}", k);

    let axis = Point3::new(0.0, 0.0, 0.3);
    match s.closest_point(&axis) {
        Ok(p) => println!("axis point projected to {p:?}"),
        Err(e) => println!("axis point rejected: {e}"),
    }
    Ok(())
}
