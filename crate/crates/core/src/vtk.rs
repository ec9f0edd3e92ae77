//! Legacy ASCII VTK export of a discrete field on a curved mesh.
//!
//! Every curved cell is subsampled on its own geometry lattice and split
//! into flat sub-triangles, so a cell of geometry order `k` contributes
//! `(k+1)(k+2)/2` points and `k^2` triangles. Points are not shared between
//! cells.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::assembly::Discretization;
use crate::geometry::{Point3, Surface};
use crate::manufactured::ExactField;
use crate::ref_elements::{lattice_indices_for, ReferenceElement};
use crate::{Error, Result};

const VTK_TRIANGLE: u8 = 5;

/// Sub-triangles of the order-`k` lattice as local lattice indices.
fn lattice_triangles(k: usize) -> Result<Vec<[usize; 3]>> {
    let idx = lattice_indices_for(k)?;
    let pos: HashMap<[usize; 2], usize> = idx.iter().enumerate().map(|(l, &ij)| (ij, l)).collect();
    let mut tris = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k - j {
            tris.push([pos[&[i, j]], pos[&[i + 1, j]], pos[&[i, j + 1]]]);
            if i + j + 1 < k {
                tris.push([pos[&[i + 1, j]], pos[&[i + 1, j + 1]], pos[&[i, j + 1]]]);
            }
        }
    }
    Ok(tris)
}

/// Renders the field `coeffs` and its pointwise error against `exact` as a
/// VTK 3.0 unstructured grid.
pub fn vtk_string<S: Surface>(
    disc: &Discretization<'_, S>,
    coeffs: &[f64],
    exact: &dyn ExactField,
) -> Result<String> {
    if coeffs.len() != disc.dofs.n_dofs() {
        return Err(Error::InvalidMesh(format!(
            "field has {} values, expected {}",
            coeffs.len(),
            disc.dofs.n_dofs()
        )));
    }
    let mesh = disc.mesh;
    let k_g = mesh.order();
    let lattice = ReferenceElement::new(k_g)?;
    let solution = ReferenceElement::new(disc.k_u())?;
    let tris = lattice_triangles(k_g)?;
    let per_cell = lattice.n_nodes();
    let n_points = mesh.n_cells() * per_cell;

    let mut points = Vec::with_capacity(n_points);
    let mut values = Vec::with_capacity(n_points);
    let mut psi = vec![0.0; solution.n_nodes()];
    let mut dpsi = vec![[0.0; 2]; solution.n_nodes()];
    for c in 0..mesh.n_cells() {
        let geo_ids = mesh.cell(c);
        let dof_ids = disc.dofs.cell_nodes(c);
        for (l, &q) in lattice.nodes().iter().enumerate() {
            // lattice points of the geometry are the cell's own nodes
            let x = mesh.nodes()[geo_ids[l]];
            solution.eval_into(q, &mut psi, &mut dpsi);
            let mut u = Point3::zeros();
            for (a, &g) in dof_ids.iter().enumerate() {
                u += Point3::new(coeffs[3 * g], coeffs[3 * g + 1], coeffs[3 * g + 2]) * psi[a];
            }
            points.push(x);
            values.push(u);
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "surfvec field, k_u = {}, k_g = {}", disc.k_u(), k_g);
    let _ = writeln!(out, "ASCII");
    let _ = writeln!(out, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {n_points} double");
    for x in &points {
        let _ = writeln!(out, "{:e} {:e} {:e}", x.x, x.y, x.z);
    }
    let n_tris = mesh.n_cells() * tris.len();
    let _ = writeln!(out, "CELLS {} {}", n_tris, 4 * n_tris);
    for c in 0..mesh.n_cells() {
        let base = c * per_cell;
        for t in &tris {
            let _ = writeln!(out, "3 {} {} {}", base + t[0], base + t[1], base + t[2]);
        }
    }
    let _ = writeln!(out, "CELL_TYPES {n_tris}");
    for _ in 0..n_tris {
        let _ = writeln!(out, "{VTK_TRIANGLE}");
    }
    let _ = writeln!(out, "POINT_DATA {n_points}");
    let _ = writeln!(out, "VECTORS u double");
    for u in &values {
        let _ = writeln!(out, "{:e} {:e} {:e}", u.x, u.y, u.z);
    }
    let _ = writeln!(out, "SCALARS error_magnitude double 1");
    let _ = writeln!(out, "LOOKUP_TABLE default");
    for (x, u) in points.iter().zip(&values) {
        let _ = writeln!(out, "{:e}", (exact.value(x) - u).norm());
    }
    Ok(out)
}

/// Writes [`vtk_string`] to `path`.
pub fn export_vtk<S: Surface>(
    disc: &Discretization<'_, S>,
    coeffs: &[f64],
    exact: &dyn ExactField,
    path: &Path,
) -> Result<()> {
    let text = vtk_string(disc, coeffs, exact)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_triangles_cover_reference_triangle() {
        for k in 1..=4 {
            let tris = lattice_triangles(k).unwrap();
            assert_eq!(tris.len(), k * k);
            let nodes = crate::ref_elements::lagrange_lattice(k).unwrap();
            let area: f64 = tris
                .iter()
                .map(|t| {
                    let [a, b, c] = t.map(|i| nodes[i]);
                    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
                    assert!(cross > 0.0, "k={k}: orientation");
                    0.5 * cross
                })
                .sum();
            assert!((area - 0.5).abs() < 1e-14);
        }
    }
}
