use crate::{Error, Result};

use super::QuadratureRule;

const INSIDE_TOL: f64 = 1e-12;

/// Equispaced lattice of order `k` on the reference triangle.
///
/// Node ordering (also used by the mesh dump format):
///
/// 1. the vertices `(0,0)`, `(1,0)`, `(0,1)`;
/// 2. the `k-1` interior nodes of edge 0 (vertex 0 to vertex 1), then
///    edge 1 (vertex 1 to vertex 2), then edge 2 (vertex 2 to vertex 0),
///    each listed in the direction of traversal;
/// 3. interior nodes row by row, increasing `eta`, then increasing `xi`.
pub fn lagrange_lattice(k: usize) -> Result<Vec<[f64; 2]>> {
    Ok(lattice_indices(k)?
        .into_iter()
        .map(|[i, j]| [i as f64 / k as f64, j as f64 / k as f64])
        .collect())
}

/// Integer lattice coordinates `(i, j)` with `xi = i/k`, `eta = j/k`.
pub(crate) fn lattice_indices(k: usize) -> Result<Vec<[usize; 2]>> {
    if !(1..=4).contains(&k) {
        return Err(Error::UnsupportedOrder(k));
    }
    let mut out = vec![[0, 0], [k, 0], [0, k]];
    out.extend((1..k).map(|m| [m, 0]));
    out.extend((1..k).map(|m| [k - m, m]));
    out.extend((1..k).map(|m| [0, k - m]));
    for j in 1..k {
        for i in 1..k - j {
            out.push([i, j]);
        }
    }
    Ok(out)
}

/// Lagrange element of order 1 to 4 on the equispaced lattice.
#[derive(Clone, Debug)]
pub struct ReferenceElement {
    order: usize,
    nodes: Vec<[f64; 2]>,
    // barycentric lattice exponents (a0, a1, a2), a0 + a1 + a2 = order
    bary: Vec<[usize; 3]>,
}

/// Values and reference gradients of every basis function at every point
/// of a quadrature rule, stored point-major.
#[derive(Clone, Debug)]
pub struct BasisTable {
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl BasisTable {
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

impl ReferenceElement {
    pub fn new(order: usize) -> Result<Self> {
        let idx = lattice_indices(order)?;
        let nodes = idx
            .iter()
            .map(|&[i, j]| [i as f64 / order as f64, j as f64 / order as f64])
            .collect();
        let bary = idx.iter().map(|&[i, j]| [order - i - j, i, j]).collect();
        Ok(ReferenceElement { order, nodes, bary })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Basis values and reference gradients at `q`.
    pub fn basis_eval(&self, q: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
        let [xi, eta] = q;
        if xi < -INSIDE_TOL || eta < -INSIDE_TOL || xi + eta > 1.0 + INSIDE_TOL {
            return Err(Error::OutsideReferenceTriangle(xi, eta));
        }
        let mut values = vec![0.0; self.n_nodes()];
        let mut grads = vec![[0.0; 2]; self.n_nodes()];
        self.eval_into(q, &mut values, &mut grads);
        Ok((values, grads))
    }

    /// Unchecked evaluation into caller buffers.
    pub fn eval_into(&self, q: [f64; 2], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let k = self.order as f64;
        let lam = [1.0 - q[0] - q[1], q[0], q[1]];
        // d lambda / d (xi, eta)
        const DLAM: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
        for (n, a) in self.bary.iter().enumerate() {
            let mut s = [0.0; 3];
            let mut ds = [0.0; 3];
            for c in 0..3 {
                (s[c], ds[c]) = silvester(a[c], k, lam[c]);
            }
            values[n] = s[0] * s[1] * s[2];
            let dl = [ds[0] * s[1] * s[2], s[0] * ds[1] * s[2], s[0] * s[1] * ds[2]];
            grads[n] = [
                dl[0] * DLAM[0][0] + dl[1] * DLAM[1][0] + dl[2] * DLAM[2][0],
                dl[0] * DLAM[0][1] + dl[1] * DLAM[1][1] + dl[2] * DLAM[2][1],
            ];
        }
    }

    /// Tabulates the basis at every point of `rule`.
    pub fn tabulate(&self, rule: &QuadratureRule) -> BasisTable {
        let n = self.n_nodes();
        let nq = rule.len();
        let mut values = vec![0.0; n * nq];
        let mut grads = vec![[0.0; 2]; n * nq];
        for (q, p) in rule.points.iter().enumerate() {
            self.eval_into(*p, &mut values[q * n..(q + 1) * n], &mut grads[q * n..(q + 1) * n]);
        }
        BasisTable {
            n_basis: n,
            values,
            grads,
        }
    }
}

/// Silvester polynomial `prod_{m<a} (k*l - m) / (m + 1)` and its derivative.
fn silvester(a: usize, k: f64, l: f64) -> (f64, f64) {
    let mut v = 1.0;
    let mut dv = 0.0;
    for m in 0..a {
        let f = (k * l - m as f64) / (m as f64 + 1.0);
        let df = k / (m as f64 + 1.0);
        dv = dv * f + v * df;
        v *= f;
    }
    (v, dv)
}
