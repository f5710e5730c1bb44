//! Lanczos approximation of `exp(−iHτ) v` with adaptive substepping.
//!
//! For a Krylov basis `Q_m` of `v` with tridiagonal projection `T_m` and
//! trailing residual `β_m`, the step is `‖v‖ Q_m exp(−iτT_m) e_1` and the
//! local error is estimated as `‖v‖ β_m |e_mᵀ exp(−iτT_m) e_1|`. A substep
//! is accepted when that estimate is at most `tol · τ`; otherwise `τ` is
//! shrunk and the same basis is reused.

use num_complex::Complex64 as C64;

use super::{check_time_grid, Method, PropagationStats};
use crate::error::{Error, Result};
use crate::hilbert::{Operator, PureState};
use crate::linalg::eigh_tridiagonal;

pub const DEFAULT_KRYLOV_DIM: usize = 30;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

struct Basis {
    vectors: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Residual norm after the last vector; zero on an invariant subspace.
    residual: f64,
}

pub struct KrylovPropagator<'a> {
    h: &'a Operator,
    tol: f64,
    krylov_dim: usize,
    /// Scale for detecting invariant subspaces (‖H‖ bound).
    h_scale: f64,
}

impl<'a> KrylovPropagator<'a> {
    pub fn new(h: &'a Operator, tol: f64, krylov_dim: usize) -> Result<Self> {
        h.require_hermitian()?;
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Krylov tolerance must be positive, got {tol}"
            )));
        }
        if krylov_dim < 2 {
            return Err(Error::InvalidParams(format!(
                "Krylov dimension must be at least 2, got {krylov_dim}"
            )));
        }
        // Gershgorin bound on the spectral radius
        let mut row_sums = vec![0.0f64; h.dim()];
        for (r, _, v) in h.entries() {
            row_sums[r] += v.norm();
        }
        let h_scale = row_sums.into_iter().fold(0.0, f64::max).max(1.0);
        Ok(Self {
            h,
            tol,
            krylov_dim: krylov_dim.min(h.dim()).max(1),
            h_scale,
        })
    }

    fn lanczos(&self, v: &[C64], norm: f64) -> Basis {
        let m = self.krylov_dim;
        let dim = v.len();
        let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(m);
        vectors.push(v.iter().map(|a| a / norm).collect());
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut w = vec![ZERO; dim];
        let breakdown = 1e-13 * self.h_scale;
        let mut residual = 0.0;
        for j in 0..m {
            self.h.apply_into(&vectors[j], &mut w);
            let a: f64 = vectors[j].iter().zip(&w).map(|(q, x)| (q.conj() * x).re).sum();
            alpha.push(a);
            // full reorthogonalization against the whole basis
            for _pass in 0..2 {
                for q in &vectors {
                    let proj: C64 = q.iter().zip(&w).map(|(qi, wi)| qi.conj() * wi).sum();
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= proj * qi;
                    }
                }
            }
            let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if b <= breakdown {
                residual = 0.0;
                break;
            }
            if j + 1 == m {
                residual = b;
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }
        Basis {
            vectors,
            alpha,
            beta,
            residual,
        }
    }

    /// Advance `v` by `dt`, returning (substeps, rejected).
    fn advance(&self, v: &mut Vec<C64>, t0: f64, dt: f64, tau_guess: &mut f64) -> Result<(usize, usize)> {
        let mut done = 0.0;
        let mut accepted = 0;
        let mut rejected = 0;
        while dt - done > 1e-14 * dt.max(1.0) {
            let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let basis = self.lanczos(v, norm);
            let (theta, s) = eigh_tridiagonal(&basis.alpha, &basis.beta)?;
            let m = basis.alpha.len();
            let exponent = (m.max(2) - 1) as f64;

            let mut tau = tau_guess.min(dt - done);
            loop {
                // y = S exp(−iθτ) Sᵀ e_1
                let phases: Vec<C64> = theta
                    .iter()
                    .enumerate()
                    .map(|(l, &th)| C64::from_polar(1.0, -th * tau) * s[(0, l)])
                    .collect();
                let y: Vec<C64> = (0..m).map(|k| (0..m).map(|l| phases[l] * s[(k, l)]).sum()).collect();
                let err = norm * basis.residual * y[m - 1].norm();
                if err <= self.tol * tau {
                    let mut next = vec![ZERO; v.len()];
                    for (q, &yk) in basis.vectors.iter().zip(&y) {
                        let coeff = yk * norm;
                        for (n, qi) in next.iter_mut().zip(q) {
                            *n += coeff * qi;
                        }
                    }
                    *v = next;
                    done += tau;
                    accepted += 1;
                    let grow = if err > 0.0 {
                        (0.9 * (self.tol * tau / err).powf(1.0 / exponent)).min(2.0)
                    } else {
                        2.0
                    };
                    // a step clipped to the sample boundary says nothing about
                    // the step size the error would allow
                    *tau_guess = (tau * grow).max(*tau_guess).min(1e3);
                    break;
                }
                rejected += 1;
                let shrink = (0.9 * (self.tol * tau / err).powf(1.0 / exponent)).clamp(0.1, 0.5);
                tau *= shrink;
                *tau_guess = tau;
                if tau < 64.0 * f64::EPSILON * (t0 + done).abs().max(1.0) {
                    return Err(Error::SubstepUnderflow {
                        t: t0 + done,
                        substep: tau,
                    });
                }
            }
        }
        Ok((accepted, rejected))
    }

    pub fn propagate<F>(&self, psi0: &PureState, times: &[f64], mut sink: F) -> Result<PropagationStats>
    where
        F: FnMut(usize, f64, PureState) -> Result<()>,
    {
        if psi0.dim() != self.h.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.h.dim(),
                got: psi0.dim(),
            });
        }
        check_time_grid(times)?;
        let mut stats = PropagationStats {
            method: Some(Method::Krylov),
            ..Default::default()
        };
        let mut v = psi0.amplitudes().to_vec();
        let mut t = 0.0;
        let mut tau_guess = 1.0 / self.h_scale;
        for (k, &target) in times.iter().enumerate() {
            if target > t {
                let (acc, rej) = self.advance(&mut v, t, target - t, &mut tau_guess)?;
                stats.substeps += acc;
                stats.rejected += rej;
                t = target;
            }
            let psi = PureState::from_propagated(v.clone());
            stats.max_norm_error = stats.max_norm_error.max(psi.norm_error());
            stats.samples += 1;
            sink(k, target, psi)?;
        }
        Ok(stats)
    }
}
