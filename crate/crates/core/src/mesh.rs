//! Parametric triangulations of the torus.
//!
//! A [`ParametricMesh`] stores, per cell, the global indices of its geometry
//! nodes in [`lagrange_lattice`](crate::ref_elements::lagrange_lattice)
//! order. The first three entries of each cell are the corner vertices.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix3x2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{tangent_frame, Point3, Surface, Tensor3, TorusSurface};
use crate::ref_elements::{lattice_indices_for, BasisTable, QuadratureRule, ReferenceElement};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ParametricMesh {
    order: usize,
    nodes: Vec<Point3>,
    cells: Vec<usize>,
    h: f64,
}

impl ParametricMesh {
    /// Builds a mesh from raw node coordinates and flattened cell tuples.
    pub fn new(order: usize, nodes: Vec<Point3>, cells: Vec<usize>) -> Result<Self> {
        let stride = lattice_size(order)?;
        if cells.is_empty() || cells.len() % stride != 0 {
            return Err(Error::InvalidMesh(format!(
                "cell array length {} is not a positive multiple of {stride}",
                cells.len()
            )));
        }
        if let Some(&bad) = cells.iter().find(|&&c| c >= nodes.len()) {
            return Err(Error::InvalidMesh(format!("node index {bad} out of range")));
        }
        let mut mesh = ParametricMesh {
            order,
            nodes,
            cells,
            h: 0.0,
        };
        mesh.h = mesh_parameter(&mesh);
        Ok(mesh)
    }

    /// Geometry order `k_g`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Point3] {
        &self.nodes
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / self.stride()
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let s = self.stride();
        &self.cells[c * s..(c + 1) * s]
    }

    pub fn corners(&self, c: usize) -> [usize; 3] {
        let cell = self.cell(c);
        [cell[0], cell[1], cell[2]]
    }

    /// Global mesh parameter (largest corner-triangle diameter).
    pub fn h(&self) -> f64 {
        self.h
    }

    fn stride(&self) -> usize {
        (self.order + 1) * (self.order + 2) / 2
    }

    /// Number of distinct corner vertices.
    pub fn n_vertices(&self) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        for c in 0..self.n_cells() {
            for v in self.corners(c) {
                seen[v] = true;
            }
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// Corner edges with their incidence counts, keyed by sorted vertex pair.
    pub fn edge_incidence(&self) -> BTreeMap<(usize, usize), usize> {
        let mut edges = BTreeMap::new();
        for c in 0..self.n_cells() {
            let v = self.corners(c);
            for e in 0..3 {
                let (a, b) = (v[e], v[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// True when every edge is shared by exactly two cells.
    pub fn is_watertight(&self) -> bool {
        self.edge_incidence().values().all(|&n| n == 2)
    }

    /// `V - E + F` of the corner triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.edge_incidence().len() as i64 + self.n_cells() as i64
    }

    /// Area of the flat corner triangle of cell `c`.
    pub fn corner_area(&self, c: usize) -> f64 {
        let [a, b, d] = self.corners(c).map(|i| self.nodes[i]);
        0.5 * (b - a).cross(&(d - a)).norm()
    }

    /// Per-point geometry of cell `c` at the points of `rule`.
    pub fn element_geometry<S: Surface>(
        &self,
        cell: usize,
        rule: &QuadratureRule,
        surface: &S,
    ) -> Result<ElementGeometry> {
        GeometryMap::new(self.order, rule)?.eval(self, cell, surface)
    }

    /// Writes the mesh dump format: a header line, one node per line with
    /// 17 significant digits, then one zero-based cell tuple per line.
    pub fn to_dump_string(&self) -> String {
        let mut s = format!(
            "k_g {} nodes {} cells {}\n",
            self.order,
            self.nodes.len(),
            self.n_cells()
        );
        for p in &self.nodes {
            writeln!(s, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z).unwrap();
        }
        for c in 0..self.n_cells() {
            let line: Vec<String> = self.cell(c).iter().map(|i| i.to_string()).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        s
    }

    pub fn write_dump(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_dump_string()).map_err(|e| Error::io(path, e))
    }

    pub fn from_dump_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty mesh dump".into()))?
            .split_whitespace()
            .collect();
        let field = |i: usize, name: &str| -> Result<usize> {
            if header.get(i) != Some(&name) {
                return Err(Error::Parse(format!("expected '{name}' in mesh header")));
            }
            header
                .get(i + 1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad value for '{name}'")))
        };
        let order = field(0, "k_g")?;
        let n_nodes = field(2, "nodes")?;
        let n_cells = field(4, "cells")?;
        let stride = lattice_size(order)?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let line = lines.next().ok_or_else(|| Error::Parse("missing node line".into()))?;
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(Error::Parse(format!("node line has {} values", v.len())));
            }
            nodes.push(Point3::new(v[0], v[1], v[2]));
        }
        let mut cells = Vec::with_capacity(n_cells * stride);
        for _ in 0..n_cells {
            let line = lines.next().ok_or_else(|| Error::Parse("missing cell line".into()))?;
            let before = cells.len();
            for t in line.split_whitespace() {
                cells.push(t.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?);
            }
            if cells.len() - before != stride {
                return Err(Error::Parse(format!("cell line needs {stride} indices")));
            }
        }
        ParametricMesh::new(order, nodes, cells)
    }
}

fn lattice_size(order: usize) -> Result<usize> {
    if !(1..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    Ok((order + 1) * (order + 2) / 2)
}

/// Global numbering of an order-`k` lattice over a corner triangulation.
///
/// Corner vertices come first (in increasing vertex id), then edge and
/// interior nodes in order of first appearance while visiting cells. Edge
/// nodes are shared through their sorted corner pair.
#[derive(Clone, Debug)]
pub(crate) struct LatticeNumbering {
    pub cell_nodes: Vec<usize>,
    pub n_nodes: usize,
    /// Global id of each corner vertex id (usize::MAX if unused).
    pub vertex_ids: Vec<usize>,
}

pub(crate) fn number_lattice(mesh: &ParametricMesh, k: usize) -> Result<LatticeNumbering> {
    let lattice = lattice_indices_for(k)?;
    let stride = lattice.len();
    let mut vertex_ids = vec![usize::MAX; mesh.nodes.len()];
    for c in 0..mesh.n_cells() {
        for v in mesh.corners(c) {
            vertex_ids[v] = 0;
        }
    }
    let mut next = 0;
    for id in vertex_ids.iter_mut().filter(|id| **id == 0) {
        *id = next;
        next += 1;
    }
    let mut edge_base: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut cell_nodes = Vec::with_capacity(mesh.n_cells() * stride);
    let per_edge = k - 1;
    for c in 0..mesh.n_cells() {
        let v = mesh.corners(c);
        cell_nodes.extend(v.iter().map(|&i| vertex_ids[i]));
        for e in 0..3 {
            let (a, b) = (v[e], v[(e + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let base = *edge_base.entry(key).or_insert_with(|| {
                let b0 = next;
                next += per_edge;
                b0
            });
            for m in 1..k {
                let offset = if a < b { m - 1 } else { k - 1 - m };
                cell_nodes.push(base + offset);
            }
        }
        let interior = stride - 3 - 3 * per_edge;
        cell_nodes.extend(next..next + interior);
        next += interior;
    }
    Ok(LatticeNumbering {
        cell_nodes,
        n_nodes: next,
        vertex_ids,
    })
}

/// Largest diameter of any corner triangle.
pub fn mesh_parameter(mesh: &ParametricMesh) -> f64 {
    (0..mesh.n_cells())
        .map(|c| {
            let [a, b, d] = mesh.corners(c).map(|i| mesh.nodes[i]);
            (a - b).norm().max((b - d).norm()).max((d - a).norm())
        })
        .fold(0.0, f64::max)
}

/// Structured linear mesh on the `(theta, phi)` grid: `n_major` steps in the
/// azimuth, `n_minor` steps around the tube, each quad split along its
/// diagonal, oriented with outward normals.
pub fn build_torus_mesh(s: &TorusSurface, n_major: usize, n_minor: usize) -> Result<ParametricMesh> {
    if n_major < 8 || n_minor < 8 {
        return Err(Error::InvalidMesh(format!(
            "grid {n_major}x{n_minor} too coarse (need at least 8x8)"
        )));
    }
    let idx = |i: usize, j: usize| (i % n_major) * n_minor + (j % n_minor);
    let mut nodes = Vec::with_capacity(n_major * n_minor);
    for i in 0..n_major {
        let phi = TAU * i as f64 / n_major as f64;
        for j in 0..n_minor {
            let theta = TAU * j as f64 / n_minor as f64;
            nodes.push(s.point(theta, phi));
        }
    }
    let mut cells = Vec::with_capacity(6 * n_major * n_minor);
    for i in 0..n_major {
        for j in 0..n_minor {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            cells.extend([a, b, c, a, c, d]);
        }
    }
    ParametricMesh::new(1, nodes, cells)
}

/// Moves every vertex by a random tangential offset and projects it back
/// onto the surface.
///
/// The offset length is at most `amplitude` times the local mesh size, the
/// shortest edge incident to the vertex. On the structured torus grid the
/// shortest edges (inner equator) are about a quarter of the global `h`, so
/// scaling by the global `h` would fold cells.
pub fn perturb_mesh<S: Surface>(
    mesh: &ParametricMesh,
    amplitude: f64,
    seed: u64,
    surface: &S,
) -> Result<ParametricMesh> {
    if mesh.order != 1 {
        return Err(Error::InvalidMesh("perturbation needs a linear mesh".into()));
    }
    if !(0.0..=0.3).contains(&amplitude) {
        return Err(Error::InvalidMesh(format!(
            "perturbation amplitude {amplitude} outside [0, 0.3]"
        )));
    }
    if amplitude == 0.0 {
        return Ok(mesh.clone());
    }
    let mut local_h = vec![f64::INFINITY; mesh.nodes.len()];
    for &(a, b) in mesh.edge_incidence().keys() {
        let len = (mesh.nodes[a] - mesh.nodes[b]).norm();
        local_h[a] = local_h[a].min(len);
        local_h[b] = local_h[b].min(len);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = mesh.nodes.clone();
    for (x, &lh) in nodes.iter_mut().zip(&local_h) {
        let (t1, t2) = tangent_frame(&surface.normal(x)?);
        let r = amplitude * lh * rng.gen::<f64>().sqrt();
        let a = TAU * rng.gen::<f64>();
        *x = surface.closest_point(&(*x + t1 * (r * a.cos()) + t2 * (r * a.sin())))?;
    }
    let out = ParametricMesh::new(1, nodes, mesh.cells.clone())?;
    for c in 0..out.n_cells() {
        let [a, b, d] = out.corners(c).map(|i| out.nodes[i]);
        let cross = (b - a).cross(&(d - a));
        let centroid = (a + b + d) / 3.0;
        let outward = cross.dot(&surface.normal(&centroid)?) > 0.0;
        if !outward || out.corner_area(c) < 1e-3 * mesh.corner_area(c) {
            return Err(Error::DegeneratePerturbation(c));
        }
    }
    Ok(out)
}

/// Lifts a linear mesh to geometry order `k_g` by mapping the affine lattice
/// points of every cell onto the surface with the closest-point map.
pub fn elevate_geometry<S: Surface>(
    mesh: &ParametricMesh,
    k_g: usize,
    surface: &S,
) -> Result<ParametricMesh> {
    if mesh.order != 1 {
        return Err(Error::InvalidMesh("geometry elevation needs a linear mesh".into()));
    }
    if k_g == 1 {
        lattice_size(1)?;
        return Ok(mesh.clone());
    }
    let numbering = number_lattice(mesh, k_g)?;
    let lattice = crate::ref_elements::lagrange_lattice(k_g)?;
    let stride = lattice.len();
    let mut nodes = vec![Point3::zeros(); numbering.n_nodes];
    let mut filled = vec![false; numbering.n_nodes];
    for (v, &id) in numbering.vertex_ids.iter().enumerate() {
        if id != usize::MAX {
            nodes[id] = mesh.nodes[v];
            filled[id] = true;
        }
    }
    for c in 0..mesh.n_cells() {
        let [a, b, d] = mesh.corners(c).map(|i| mesh.nodes[i]);
        let ids = &numbering.cell_nodes[c * stride..(c + 1) * stride];
        for (l, &[xi, eta]) in lattice.iter().enumerate().skip(3) {
            let id = ids[l];
            if !filled[id] {
                let affine = a * (1.0 - xi - eta) + b * xi + d * eta;
                nodes[id] = surface.closest_point(&affine)?;
                filled[id] = true;
            }
        }
    }
    ParametricMesh::new(k_g, nodes, numbering.cell_nodes)
}

/// Geometry of one point of an element map.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub x: Point3,
    /// Columns are `dx/dxi` and `dx/deta`.
    pub jacobian: Matrix3x2<f64>,
    pub normal: Point3,
    pub area_factor: f64,
    pub projection: Tensor3,
    /// Columns of `J (J^T J)^{-1}`: the surface gradient of a function with
    /// reference gradient `g` is `dual[0] g[0] + dual[1] g[1]`.
    pub dual: [Point3; 2],
}

impl PointGeometry {
    pub fn surface_gradient(&self, g: [f64; 2]) -> Point3 {
        self.dual[0] * g[0] + self.dual[1] * g[1]
    }
}

#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub points: Vec<PointGeometry>,
}

/// Order-`k_g` element map tabulated on a quadrature rule.
#[derive(Clone, Debug)]
pub struct GeometryMap {
    table: BasisTable,
    n_points: usize,
}

impl GeometryMap {
    pub fn new(k_g: usize, rule: &QuadratureRule) -> Result<Self> {
        let elem = ReferenceElement::new(k_g)?;
        Ok(GeometryMap {
            table: elem.tabulate(rule),
            n_points: rule.len(),
        })
    }

    pub fn eval<S: Surface>(
        &self,
        mesh: &ParametricMesh,
        cell: usize,
        surface: &S,
    ) -> Result<ElementGeometry> {
        let ids = mesh.cell(cell);
        assert_eq!(ids.len(), self.table.n_basis, "geometry order mismatch");
        let mut points = Vec::with_capacity(self.n_points);
        for q in 0..self.n_points {
            let vals = self.table.values_at(q);
            let grads = self.table.grads_at(q);
            let mut x = Point3::zeros();
            let mut jac = Matrix3x2::zeros();
            for (i, &id) in ids.iter().enumerate() {
                let node = mesh.nodes[id];
                x += node * vals[i];
                jac.column_mut(0).axpy(grads[i][0], &node, 1.0);
                jac.column_mut(1).axpy(grads[i][1], &node, 1.0);
            }
            let (c0, c1): (Point3, Point3) = (jac.column(0).into(), jac.column(1).into());
            let cross = c0.cross(&c1);
            let area_factor = cross.norm();
            if !(area_factor >= 1e-14) {
                return Err(Error::DegenerateElement { cell, area_factor });
            }
            let mut normal = cross / area_factor;
            if normal.dot(&surface.normal(&x)?) < 0.0 {
                normal = -normal;
            }
            let g = [
                [c0.dot(&c0), c0.dot(&c1)],
                [c0.dot(&c1), c1.dot(&c1)],
            ];
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            let inv = [
                [g[1][1] / det, -g[0][1] / det],
                [-g[1][0] / det, g[0][0] / det],
            ];
            let dual = [
                c0 * inv[0][0] + c1 * inv[1][0],
                c0 * inv[0][1] + c1 * inv[1][1],
            ];
            points.push(PointGeometry {
                x,
                jacobian: jac,
                normal,
                area_factor,
                projection: Tensor3::identity() - normal * normal.transpose(),
                dual,
            });
        }
        Ok(ElementGeometry { points })
    }
}

/// Maximum of `|rho|` and of `|n o p - n_h|` over the points of `rule` on
/// every cell.
pub fn geometry_errors<S: Surface>(
    mesh: &ParametricMesh,
    surface: &S,
    rule: &QuadratureRule,
) -> Result<(f64, f64)> {
    let map = GeometryMap::new(mesh.order, rule)?;
    let mut max_rho: f64 = 0.0;
    let mut max_normal: f64 = 0.0;
    for c in 0..mesh.n_cells() {
        for g in map.eval(mesh, c, surface)?.points {
            max_rho = max_rho.max(surface.signed_distance(&g.x)?.abs());
            let n = surface.normal(&surface.closest_point(&g.x)?)?;
            max_normal = max_normal.max((n - g.normal).norm());
        }
    }
    Ok((max_rho, max_normal))
}

/// Sum of quadrature weight times area factor: the area of the discrete
/// surface.
pub fn discrete_area<S: Surface>(
    mesh: &ParametricMesh,
    surface: &S,
    rule: &QuadratureRule,
) -> Result<f64> {
    let map = GeometryMap::new(mesh.order, rule)?;
    let mut area = 0.0;
    for c in 0..mesh.n_cells() {
        let g = map.eval(mesh, c, surface)?;
        area += g
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p.area_factor)
            .sum::<f64>();
    }
    Ok(area)
}
