use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64 as C64;

use super::{GroundState, DEGENERACY_TOL};
use crate::error::Result;
use crate::hilbert::{Operator, PureState};
use crate::linalg::{eigh_complex, eigh_real};

#[derive(Clone, Debug)]
enum Vectors {
    /// Real symmetric input: eigenvectors stay real, which halves storage
    /// and lets propagation use real matrix products.
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

/// Full eigendecomposition `H = V diag(e) V†` of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    values: Array1<f64>,
    vectors: Vectors,
}

impl EigenSystem {
    pub fn compute(h: &Operator) -> Result<Self> {
        h.require_hermitian()?;
        let (values, vectors) = if h.is_real() {
            let (w, v) = eigh_real(&h.to_dense_real(), true)?;
            (w, Vectors::Real(v.expect("vectors requested")))
        } else {
            let (w, v) = eigh_complex(&h.to_dense(), true)?;
            (w, Vectors::Complex(v.expect("vectors requested")))
        };
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &[f64] {
        self.values.as_slice().expect("contiguous")
    }

    /// Eigenvector `k` as a complex vector.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        match &self.vectors {
            Vectors::Real(v) => v.column(k).iter().map(|&x| C64::new(x, 0.0)).collect(),
            Vectors::Complex(v) => v.column(k).to_vec(),
        }
    }

    pub fn ground_state(&self) -> GroundState {
        let mut amps = self.vector(0);
        // rotate the largest component (first on ties) onto the positive real axis
        let mut best = 0;
        for (k, a) in amps.iter().enumerate() {
            if a.norm() > amps[best].norm() + 1e-12 {
                best = k;
            }
        }
        let phase = amps[best] / amps[best].norm();
        for a in &mut amps {
            *a /= phase;
        }
        let gap = if self.dim() > 1 {
            self.values[1] - self.values[0]
        } else {
            f64::INFINITY
        };
        GroundState {
            energy: self.values[0],
            state: PureState::from_propagated(amps),
            degenerate: gap < DEGENERACY_TOL,
            gap,
        }
    }

    /// Coordinates `V† ψ` of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &[C64]) -> Vec<C64> {
        match &self.vectors {
            Vectors::Real(v) => {
                let re: Array1<f64> = psi.iter().map(|a| a.re).collect();
                let im: Array1<f64> = psi.iter().map(|a| a.im).collect();
                let cre = v.t().dot(&re);
                let cim = v.t().dot(&im);
                cre.iter().zip(cim.iter()).map(|(&r, &i)| C64::new(r, i)).collect()
            }
            Vectors::Complex(v) => {
                let x = Array1::from(psi.to_vec());
                v.t().mapv(|z| z.conj()).dot(&x).to_vec()
            }
        }
    }

    /// `V · coeffs` for a block of coefficient columns; each column of the
    /// result is one state.
    pub fn from_eigenbasis(&self, coeffs: ArrayView2<C64>) -> Array2<C64> {
        match &self.vectors {
            Vectors::Real(v) => {
                let k = coeffs.ncols();
                let mut split = Array2::<f64>::zeros((coeffs.nrows(), 2 * k));
                split.slice_mut(s![.., ..k]).assign(&coeffs.mapv(|z| z.re));
                split.slice_mut(s![.., k..]).assign(&coeffs.mapv(|z| z.im));
                let prod = v.dot(&split);
                let (re, im) = prod.view().split_at(Axis(1), k);
                let mut out = Array2::zeros((coeffs.nrows(), k));
                ndarray::Zip::from(&mut out)
                    .and(&re)
                    .and(&im)
                    .for_each(|o, &r, &i| *o = C64::new(r, i));
                out
            }
            Vectors::Complex(v) => v.dot(&coeffs),
        }
    }
}
