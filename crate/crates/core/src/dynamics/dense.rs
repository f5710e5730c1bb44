use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::{check_time_grid, EigenSystem, Method, PropagationStats};
use crate::error::{Error, Result};
use crate::hilbert::{Operator, PureState};

/// Sample times evaluated per matrix-matrix product.
const BATCH: usize = 64;

struct Block {
    indices: Vec<usize>,
    op: Operator,
}

/// Exact propagation by full eigendecomposition: every sample is
/// `V exp(−iEt) V† ψ₀` with the phases applied directly.
///
/// `H` is split into the connected components of its coupling graph (for
/// the battery Hamiltonian, the excitation-parity sectors) and each block
/// the initial state touches is diagonalized on its own.
pub struct DensePropagator {
    dim: usize,
    blocks: Vec<Block>,
}

impl DensePropagator {
    pub fn new(h: &Operator) -> Result<Self> {
        h.require_hermitian()?;
        let blocks = h
            .blocks()
            .into_iter()
            .map(|indices| {
                let op = h.restrict(&indices)?;
                Ok(Block { indices, op })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: h.dim(), blocks })
    }

    /// Sizes of the independent blocks.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    pub fn propagate<F>(&self, psi0: &PureState, times: &[f64], mut sink: F) -> Result<PropagationStats>
    where
        F: FnMut(usize, f64, PureState) -> Result<()>,
    {
        if psi0.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: psi0.dim(),
            });
        }
        check_time_grid(times)?;
        let amps = psi0.amplitudes();

        // (block, eigensystem, initial coordinates) for every occupied block
        let mut active = Vec::new();
        for block in &self.blocks {
            let local: Vec<C64> = block.indices.iter().map(|&i| amps[i]).collect();
            if local.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            let eig = EigenSystem::compute(&block.op)?;
            let c0 = eig.to_eigenbasis(&local);
            active.push((block, eig, c0));
        }

        let mut stats = PropagationStats {
            method: Some(Method::DenseEig),
            ..Default::default()
        };
        let mut start = 0;
        while start < times.len() {
            let chunk = &times[start..(start + BATCH).min(times.len())];
            let mut states = Array2::<C64>::zeros((self.dim, chunk.len()));
            for (block, eig, c0) in &active {
                let mut coeffs = Array2::<C64>::zeros((c0.len(), chunk.len()));
                for (j, &t) in chunk.iter().enumerate() {
                    for (k, (&e, &c)) in eig.values().iter().zip(c0).enumerate() {
                        coeffs[(k, j)] = c * C64::from_polar(1.0, -e * t);
                    }
                }
                let local = eig.from_eigenbasis(coeffs.view());
                for (row, &i) in block.indices.iter().enumerate() {
                    states.row_mut(i).assign(&local.row(row));
                }
            }
            for (j, &t) in chunk.iter().enumerate() {
                let psi = if t == 0.0 {
                    psi0.clone()
                } else {
                    PureState::from_propagated(states.column(j).to_vec())
                };
                stats.max_norm_error = stats.max_norm_error.max(psi.norm_error());
                stats.samples += 1;
                sink(start + j, t, psi)?;
            }
            start += chunk.len();
        }
        Ok(stats)
    }
}
