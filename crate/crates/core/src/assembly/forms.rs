use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::geometry::{Point3, Surface};
use crate::mesh::{number_lattice, ElementGeometry, GeometryMap, LatticeNumbering, ParametricMesh};
use crate::ref_elements::{assembly_degree, quadrature_for, BasisTable, QuadratureRule, ReferenceElement};
use crate::{Error, Result};

use super::sparse::CsrMatrix;

/// Which bilinear form drives the stiffness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulationKind {
    /// Full covariant derivative `(D v, D w)`.
    Standard,
    /// Tangential strain `(eps v, eps w)`.
    Symmetric,
}

/// Normal used inside the penalty form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormalSource {
    /// Elementwise normal of the discrete surface.
    Discrete,
    /// Lagrange interpolant of the exact normal at the geometry nodes,
    /// normalised at each point.
    ExactInterpolated,
}

/// How the kernel of the system is handled by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullspacePolicy {
    None,
    /// Interpolated rotation field about the torus axis.
    Killing,
    /// Smallest eigenvectors of the assembled matrix.
    Numerical { dim: usize },
}

impl NullspacePolicy {
    pub fn default_for(kind: FormulationKind) -> Self {
        match kind {
            FormulationKind::Standard => NullspacePolicy::None,
            FormulationKind::Symmetric => NullspacePolicy::Killing,
        }
    }
}

/// Load field evaluated at points of the exact surface.
pub type LoadFn<'a> = dyn Fn(&Point3) -> Result<Point3> + Sync + 'a;

/// Three Euclidean components per order-`k_u` solution node.
#[derive(Clone, Debug)]
pub struct DofMap {
    order: usize,
    numbering: LatticeNumbering,
    positions: Vec<Point3>,
}

impl DofMap {
    pub fn new(mesh: &ParametricMesh, k_u: usize) -> Result<Self> {
        let numbering = number_lattice(mesh, k_u)?;
        let elem = ReferenceElement::new(k_u)?;
        let geo = ReferenceElement::new(mesh.order())?;
        let mut positions = vec![Point3::zeros(); numbering.n_nodes];
        let n_loc = elem.n_nodes();
        let mut vals = vec![0.0; geo.n_nodes()];
        let mut grads = vec![[0.0; 2]; geo.n_nodes()];
        for c in 0..mesh.n_cells() {
            let ids = &numbering.cell_nodes[c * n_loc..(c + 1) * n_loc];
            for (l, q) in elem.nodes().iter().enumerate() {
                geo.eval_into(*q, &mut vals, &mut grads);
                positions[ids[l]] = mesh
                    .cell(c)
                    .iter()
                    .zip(&vals)
                    .map(|(&i, w)| mesh.nodes()[i] * *w)
                    .sum();
            }
        }
        Ok(DofMap {
            order: k_u,
            numbering,
            positions,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.numbering.n_nodes
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.numbering.n_nodes
    }

    pub fn nodes_per_cell(&self) -> usize {
        (self.order + 1) * (self.order + 2) / 2
    }

    /// Global solution-node ids of cell `c` in lattice order.
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        let n = self.nodes_per_cell();
        &self.numbering.cell_nodes[c * n..(c + 1) * n]
    }

    /// Location of every solution node on the discrete surface.
    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    /// Nodal interpolant of `f`, evaluated at the solution-node positions.
    pub fn interpolate(&self, f: impl Fn(&Point3) -> Point3) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_dofs());
        for x in &self.positions {
            let v = f(x);
            out.extend([v.x, v.y, v.z]);
        }
        out
    }

    /// Node-level sparsity: sorted neighbour node lists.
    fn node_graph(&self, n_cells: usize) -> Vec<Vec<u32>> {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); self.n_nodes()];
        for c in 0..n_cells {
            let ids = self.cell_nodes(c);
            for &a in ids {
                adj[a].extend(ids.iter().map(|&b| b as u32));
            }
        }
        for row in adj.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }
}

/// The rotation field `(-y, x, 0)` about the torus axis.
pub fn killing_field(x: &Point3) -> Point3 {
    Point3::new(-x.y, x.x, 0.0)
}

/// Symmetric sparse system with an optional kernel basis.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub nullspace: Vec<Vec<f64>>,
}

/// Which forms enter an assembled matrix.
#[derive(Clone, Copy, Debug)]
pub struct Parts {
    pub stiffness: Option<FormulationKind>,
    pub penalty: Option<(f64, NormalSource)>,
}

/// A mesh, a surface and a solution order, with everything needed to
/// evaluate local forms.
pub struct Discretization<'a, S: Surface> {
    pub mesh: &'a ParametricMesh,
    pub surface: &'a S,
    pub dofs: DofMap,
    element: ReferenceElement,
    node_normals: Vec<Point3>,
}

/// Tabulated basis data for one quadrature rule.
pub struct CellQuadrature {
    pub rule: QuadratureRule,
    pub geometry: GeometryMap,
    pub basis: BasisTable,
    pub geometry_basis: BasisTable,
}

impl<'a, S: Surface> Discretization<'a, S> {
    pub fn new(mesh: &'a ParametricMesh, surface: &'a S, k_u: usize) -> Result<Self> {
        let dofs = DofMap::new(mesh, k_u)?;
        let node_normals = mesh
            .nodes()
            .iter()
            .map(|x| surface.normal(x))
            .collect::<Result<_>>()?;
        Ok(Discretization {
            mesh,
            surface,
            dofs,
            element: ReferenceElement::new(k_u)?,
            node_normals,
        })
    }

    pub fn k_u(&self) -> usize {
        self.element.order()
    }

    pub fn n_local(&self) -> usize {
        3 * self.element.n_nodes()
    }

    pub fn quadrature(&self, degree: usize) -> Result<CellQuadrature> {
        let rule = quadrature_for(degree)?;
        let geo_elem = ReferenceElement::new(self.mesh.order())?;
        Ok(CellQuadrature {
            geometry: GeometryMap::new(self.mesh.order(), &rule)?,
            basis: self.element.tabulate(&rule),
            geometry_basis: geo_elem.tabulate(&rule),
            rule,
        })
    }

    /// Quadrature used for the system forms.
    pub fn assembly_quadrature(&self) -> Result<CellQuadrature> {
        self.quadrature(assembly_degree(self.k_u(), self.mesh.order()))
    }

    pub fn geometry(&self, cell: usize, quad: &CellQuadrature) -> Result<ElementGeometry> {
        quad.geometry.eval(self.mesh, cell, self.surface)
    }

    /// Penalty normal at every point of `quad` on `cell`.
    pub fn penalty_normals(
        &self,
        cell: usize,
        quad: &CellQuadrature,
        geo: &ElementGeometry,
        source: NormalSource,
    ) -> Vec<Point3> {
        match source {
            NormalSource::Discrete => geo.points.iter().map(|p| p.normal).collect(),
            NormalSource::ExactInterpolated => {
                let ids = self.mesh.cell(cell);
                (0..quad.rule.len())
                    .map(|q| {
                        let v = quad.geometry_basis.values_at(q);
                        let n: Point3 =
                            ids.iter().zip(v).map(|(&i, w)| self.node_normals[i] * *w).sum();
                        n.normalize()
                    })
                    .collect()
            }
        }
    }

    /// Local matrix of the covariant-derivative (or strain) form.
    pub fn local_stiffness(
        &self,
        cell: usize,
        quad: &CellQuadrature,
        kind: FormulationKind,
    ) -> Result<DMatrix<f64>> {
        let geo = self.geometry(cell, quad)?;
        Ok(self.stiffness_from(&geo, quad, kind))
    }

    fn stiffness_from(
        &self,
        geo: &ElementGeometry,
        quad: &CellQuadrature,
        kind: FormulationKind,
    ) -> DMatrix<f64> {
        let nb = self.element.n_nodes();
        let n = 3 * nb;
        let mut k = DMatrix::zeros(n, n);
        let mut g = vec![Point3::zeros(); nb];
        for (q, pg) in geo.points.iter().enumerate() {
            let w = quad.rule.weights[q] * pg.area_factor;
            for (a, ga) in g.iter_mut().enumerate() {
                *ga = pg.surface_gradient(quad.basis.grads_at(q)[a]);
            }
            let p = &pg.projection;
            for a in 0..nb {
                for b in a..nb {
                    let gab = g[a].dot(&g[b]);
                    for c in 0..3 {
                        let d0 = if a == b { c } else { 0 };
                        for d in d0..3 {
                            let v = match kind {
                                FormulationKind::Standard => p[(c, d)] * gab,
                                FormulationKind::Symmetric => {
                                    0.5 * (p[(c, d)] * gab + g[b][c] * g[a][d])
                                }
                            };
                            k[(3 * a + c, 3 * b + d)] += w * v;
                        }
                    }
                }
            }
        }
        mirror_upper(&mut k);
        k
    }

    /// Local matrix of the normal-component penalty `beta h^-2 (n.v, n.w)`.
    pub fn local_penalty(
        &self,
        cell: usize,
        quad: &CellQuadrature,
        beta: f64,
        source: NormalSource,
    ) -> Result<DMatrix<f64>> {
        let geo = self.geometry(cell, quad)?;
        Ok(self.penalty_from(cell, &geo, quad, beta, source))
    }

    fn penalty_from(
        &self,
        cell: usize,
        geo: &ElementGeometry,
        quad: &CellQuadrature,
        beta: f64,
        source: NormalSource,
    ) -> DMatrix<f64> {
        let nb = self.element.n_nodes();
        let n = 3 * nb;
        let scale = beta / (self.mesh.h() * self.mesh.h());
        let normals = self.penalty_normals(cell, quad, geo, source);
        let mut s = DMatrix::zeros(n, n);
        for (q, pg) in geo.points.iter().enumerate() {
            let w = quad.rule.weights[q] * pg.area_factor;
            let nq = normals[q];
            let vals = quad.basis.values_at(q);
            for a in 0..nb {
                for b in a..nb {
                    let pab = w * vals[a] * vals[b];
                    for c in 0..3 {
                        let d0 = if a == b { c } else { 0 };
                        for d in d0..3 {
                            s[(3 * a + c, 3 * b + d)] += pab * (nq[c] * nq[d]);
                        }
                    }
                }
            }
        }
        mirror_upper(&mut s);
        s * scale
    }

    /// Local load vector `(f o p, v)` on the discrete cell.
    pub fn local_load(&self, cell: usize, quad: &CellQuadrature, f: &LoadFn) -> Result<Vec<f64>> {
        let geo = self.geometry(cell, quad)?;
        self.load_from(&geo, quad, f)
    }

    fn load_from(&self, geo: &ElementGeometry, quad: &CellQuadrature, f: &LoadFn) -> Result<Vec<f64>> {
        let nb = self.element.n_nodes();
        let mut out = vec![0.0; 3 * nb];
        for (q, pg) in geo.points.iter().enumerate() {
            let w = quad.rule.weights[q] * pg.area_factor;
            let fv = f(&self.surface.closest_point(&pg.x)?)?;
            let vals = quad.basis.values_at(q);
            for a in 0..nb {
                for c in 0..3 {
                    out[3 * a + c] += w * fv[c] * vals[a];
                }
            }
        }
        Ok(out)
    }

    /// Empty matrix with the sparsity of the element connectivity.
    fn pattern(&self) -> (CsrMatrix, Vec<Vec<u32>>) {
        let graph = self.dofs.node_graph(self.mesh.n_cells());
        let n = self.dofs.n_dofs();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        for nbrs in &graph {
            for _ in 0..3 {
                for &b in nbrs {
                    cols.extend([3 * b, 3 * b + 1, 3 * b + 2]);
                }
                row_ptr.push(cols.len());
            }
        }
        (CsrMatrix::from_pattern(n, row_ptr, cols), graph)
    }

    /// Assembles the requested forms (and optionally the load) in fixed
    /// cell order. Local work runs in parallel chunks; the scatter is
    /// sequential so results are bitwise reproducible.
    pub fn assemble_with(&self, parts: Parts, load: Option<&LoadFn>) -> Result<(CsrMatrix, Vec<f64>)> {
        let quad = self.assembly_quadrature()?;
        let (mut mat, graph) = self.pattern();
        let mut rhs = vec![0.0; self.dofs.n_dofs()];
        let nb = self.element.n_nodes();
        const CHUNK: usize = 2048;
        let n_cells = self.mesh.n_cells();
        for start in (0..n_cells).step_by(CHUNK) {
            let end = (start + CHUNK).min(n_cells);
            let locals: Vec<(DMatrix<f64>, Vec<f64>)> = (start..end)
                .into_par_iter()
                .map(|c| -> Result<_> {
                    let geo = self.geometry(c, &quad)?;
                    let mut m = DMatrix::zeros(3 * nb, 3 * nb);
                    if let Some(kind) = parts.stiffness {
                        m += self.stiffness_from(&geo, &quad, kind);
                    }
                    if let Some((beta, source)) = parts.penalty {
                        m += self.penalty_from(c, &geo, &quad, beta, source);
                    }
                    let b = match load {
                        Some(f) => self.load_from(&geo, &quad, f)?,
                        None => Vec::new(),
                    };
                    Ok((m, b))
                })
                .collect::<Result<_>>()?;
            for (c, (m, b)) in (start..end).zip(locals) {
                let ids = self.dofs.cell_nodes(c);
                for (a, &ga) in ids.iter().enumerate() {
                    let nbrs = &graph[ga];
                    for (bl, &gb) in ids.iter().enumerate() {
                        let pos = nbrs
                            .binary_search(&(gb as u32))
                            .expect("dof map and sparsity pattern disagree");
                        for ci in 0..3 {
                            let base = mat.row_start(3 * ga + ci) + 3 * pos;
                            let vals = mat.values_mut();
                            for d in 0..3 {
                                vals[base + d] += m[(3 * a + ci, 3 * bl + d)];
                            }
                        }
                    }
                    if !b.is_empty() {
                        for ci in 0..3 {
                            rhs[3 * ga + ci] += b[3 * a + ci];
                        }
                    }
                }
            }
        }
        Ok((mat, rhs))
    }
}

fn mirror_upper(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
}

/// Assembles `A = a_h + s_h` and `l_h` with the given load.
///
/// The symmetric formulation gets the kernel basis requested by
/// `nullspace`; for [`NullspacePolicy::Killing`] this is the normalised
/// nodal interpolant of the rotation field.
pub fn assemble<S: Surface>(
    disc: &Discretization<'_, S>,
    kind: FormulationKind,
    beta: f64,
    normal_source: NormalSource,
    nullspace: NullspacePolicy,
    f: &LoadFn,
) -> Result<SparseSystem> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    let parts = Parts {
        stiffness: Some(kind),
        penalty: Some((beta, normal_source)),
    };
    let (matrix, rhs) = disc.assemble_with(parts, Some(f))?;
    let nullspace = match nullspace {
        NullspacePolicy::None => Vec::new(),
        NullspacePolicy::Killing => {
            let mut k = disc.dofs.interpolate(killing_field);
            let nk = super::sparse::norm(&k);
            k.iter_mut().for_each(|v| *v /= nk);
            vec![k]
        }
        NullspacePolicy::Numerical { dim } => {
            let est = super::kernel::numerical_kernel(&matrix, dim, super::DEFAULT_KERNEL_THRESHOLD)?;
            est.kernel_vectors().to_vec()
        }
    };
    Ok(SparseSystem {
        matrix,
        rhs,
        nullspace,
    })
}

/// Assembles only the listed forms, without load.
pub fn assemble_parts<S: Surface>(disc: &Discretization<'_, S>, parts: Parts) -> Result<CsrMatrix> {
    Ok(disc.assemble_with(parts, None)?.0)
}
