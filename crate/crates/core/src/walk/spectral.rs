//! Dominant adjacency eigenpair and entropy-maximising edge reweighting.
//!
//! A walker that moves with probability proportional to `psi(u) * psi(v)`
//! along each edge, where `psi` is the dominant eigenvector, maximises the
//! entropy rate of its trajectories; reweighting edges this way lets any
//! first-order weighted walker realise that process.

use thiserror::Error;

use crate::graph::Graph;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("graph is disconnected; the dominant eigenvector is not strictly positive")]
    Disconnected,
    #[error("power iteration stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("eigenvector has {0} entries but the graph has {1} nodes")]
    SizeMismatch(usize, usize),
}

/// Dominant eigenpair of the (weighted) adjacency matrix.
#[derive(Debug, Clone)]
pub struct EigenPair<F: Real> {
    pub lambda: F,
    /// Unit-norm, strictly positive dominant eigenvector.
    pub psi: Vec<F>,
    pub iterations: usize,
    /// `||A psi - lambda psi||_2` at the accepted iterate.
    pub residual: F,
    /// Bipartite input was iterated on `A + I` to break the `+/-lambda`
    /// oscillation; `lambda` and `residual` still refer to `A` itself.
    pub shifted: bool,
}

pub const EIGEN_TOL: f64 = 1e-10;
pub const EIGEN_MAX_ITER: usize = 100_000;

fn matvec<F: Real>(graph: &Graph<F>, x: &[F], shift: bool, out: &mut [F]) {
    for u in 0..graph.num_nodes() {
        let mut acc = if shift { x[u] } else { F::zero() };
        match graph.neighbor_weights(u) {
            Some(w) => {
                for (i, &v) in graph.neighbors(u).iter().enumerate() {
                    acc += w[i] * x[v];
                }
            }
            None => {
                for &v in graph.neighbors(u) {
                    acc += x[v];
                }
            }
        }
        out[u] = acc;
    }
}

fn norm2<F: Real>(x: &[F]) -> F {
    x.iter().map(|&v| v * v).sum::<F>().sqrt()
}

/// Power iteration with a deterministic all-ones start vector.
pub fn leading_eigenpair<F: Real>(
    graph: &Graph<F>,
    tol: F,
    max_iter: usize,
) -> Result<EigenPair<F>, SpectralError> {
    if !graph.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let n = graph.num_nodes();
    let shifted = graph.is_bipartite();

    let inv_sqrt_n = F::one() / F::count(n).sqrt();
    let mut x = vec![inv_sqrt_n; n];
    let mut y = vec![F::zero(); n];
    let mut last_residual = F::infinity();
    for it in 0..max_iter {
        matvec(graph, &x, shifted, &mut y);
        let mut rayleigh = F::zero();
        for u in 0..n {
            rayleigh += x[u] * y[u];
        }
        // residual against A itself: A x = y - x when iterating on A + I
        let lambda = if shifted { rayleigh - F::one() } else { rayleigh };
        let mut res_sq = F::zero();
        for u in 0..n {
            let ax = if shifted { y[u] - x[u] } else { y[u] };
            let r = ax - lambda * x[u];
            res_sq += r * r;
        }
        last_residual = res_sq.sqrt();
        if last_residual <= tol {
            assert!(
                x.iter().all(|&v| v > F::zero()),
                "dominant eigenvector of a connected graph must be strictly positive"
            );
            return Ok(EigenPair {
                lambda,
                psi: x,
                iterations: it,
                residual: last_residual,
                shifted,
            });
        }
        let scale = F::one() / norm2(&y);
        for u in 0..n {
            x[u] = y[u] * scale;
        }
    }
    Err(SpectralError::NotConverged {
        iterations: max_iter,
        residual: last_residual.to_f64().unwrap_or(f64::NAN),
    })
}

/// Copy of the graph with edge weights `psi(u) * psi(v)`.
pub fn merw_reweight<F: Real>(
    graph: &Graph<F>,
    eig: &EigenPair<F>,
) -> Result<Graph<F>, SpectralError> {
    let n = graph.num_nodes();
    if eig.psi.len() != n {
        return Err(SpectralError::SizeMismatch(eig.psi.len(), n));
    }
    let mut weights = Vec::with_capacity(2 * graph.num_edges());
    for u in 0..n {
        for &v in graph.neighbors(u) {
            weights.push(eig.psi[u] * eig.psi[v]);
        }
    }
    Ok(graph
        .clone()
        .with_edge_weights(weights)
        .expect("psi products are positive and symmetric"))
}
