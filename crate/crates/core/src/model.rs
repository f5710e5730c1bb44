//! Dicke-Ising Hamiltonian: a truncated oscillator coupled uniformly to a
//! chain of two-level ions with power-law `σˣσˣ` hopping.
//!
//! ```text
//! H   = H_c + H_a + H_ac
//! H_a = ω_a Σ_n σ⁺_n σ⁻_n + Σ_{n<m} C_nm σˣ_n σˣ_m,   C_nm = J / |z_m − z_n|^p
//! H_c = ω_c ĉ†ĉ
//! H_ac = λ Σ_n (ĉ + ĉ†) σˣ_n
//! ```
//!
//! Either interaction can be reduced to its excitation-conserving part by
//! dropping the counter-rotating pieces `λ Σ (ĉ†σ⁺ + ĉσ⁻)` and
//! `Σ C_nm (σ⁺σ⁺ + σ⁻σ⁻)`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    boson_annihilator, boson_number, collective_spin, site_operator, tensor_embed, HilbertSpec, Operator, SpinKind,
};

/// Equilibrium positions of a five-ion chain in scaled trap units.
pub const FIVE_ION_POSITIONS: [f64; 5] = [-1.7429, -0.8221, 0.0, 0.8221, 1.7429];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// `λ Σ (ĉ + ĉ†) σˣ`
    #[default]
    Full,
    /// `λ Σ (ĉ†σ⁻ + ĉσ⁺)`
    RotatingOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoppingMode {
    /// `σˣ_n σˣ_m`
    #[default]
    Full,
    /// `σ⁺_n σ⁻_m + σ⁻_n σ⁺_m`
    ExcitationConserving,
}

/// Physical parameters in units where `ħ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_a: f64,
    pub omega_c: f64,
    pub lambda: f64,
    pub j_hop: f64,
    pub p_exp: f64,
    pub positions: Vec<f64>,
    pub coupling_mode: CouplingMode,
    pub hopping_mode: HoppingMode,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            omega_c: 1.0,
            lambda: 0.25,
            j_hop: 0.2,
            p_exp: 3.0,
            positions: FIVE_ION_POSITIONS.to_vec(),
            coupling_mode: CouplingMode::Full,
            hopping_mode: HoppingMode::Full,
        }
    }
}

impl ModelParams {
    pub fn n_ions(&self) -> usize {
        self.positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("lambda", self.lambda),
            ("j_hop", self.j_hop),
            ("p_exp", self.p_exp),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if self.p_exp < 0.0 {
            return Err(Error::InvalidParams(format!(
                "p_exp must be non-negative, got {}",
                self.p_exp
            )));
        }
        if self.positions.is_empty() {
            return Err(Error::InvalidParams("positions must not be empty".into()));
        }
        if self.positions.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParams("positions must be finite".into()));
        }
        if self.positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("positions must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Check that the chain length matches `spec`.
    pub fn check_spec(&self, spec: &HilbertSpec) -> Result<()> {
        if self.n_ions() != spec.n_ions() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_ions(),
                got: self.n_ions(),
            });
        }
        Ok(())
    }

    pub fn coupling_matrix(&self) -> Result<Array2<f64>> {
        pair_coupling_matrix(&self.positions, self.j_hop, self.p_exp)
    }
}

/// Symmetric matrix of hopping coefficients `J / |z_m − z_n|^p` with zero
/// diagonal. For `p = 0` every pair couples with strength `J`.
pub fn pair_coupling_matrix(positions: &[f64], j_hop: f64, p_exp: f64) -> Result<Array2<f64>> {
    let n = positions.len();
    let mut c = Array2::zeros((n, n));
    for a in 0..n {
        for b in (a + 1)..n {
            let dist = (positions[b] - positions[a]).abs();
            let coeff = if p_exp == 0.0 {
                j_hop
            } else {
                if dist == 0.0 {
                    return Err(Error::SingularDistance(a + 1, b + 1));
                }
                j_hop / dist.powf(p_exp)
            };
            c[(a, b)] = coeff;
            c[(b, a)] = coeff;
        }
    }
    Ok(c)
}

/// The Hamiltonian split into its physical parts. All operators act on the
/// full composite space except `h_a_spin`, which is `H_a` on the `2^N` spin
/// space alone (`h_a = I_boson ⊗ h_a_spin`).
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub h_a_spin: Operator,
    pub h_a: Operator,
    pub h_c: Operator,
    pub h_ac: Operator,
    pub h_total: Operator,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Pair term for ions `a < b` (1-based) according to `mode`.
fn hopping_pair(n_ions: usize, a: usize, b: usize, mode: HoppingMode) -> Result<Operator> {
    match mode {
        HoppingMode::Full => site_operator(n_ions, a, SpinKind::X)?.matmul(&site_operator(n_ions, b, SpinKind::X)?),
        HoppingMode::ExcitationConserving => {
            let up_down =
                site_operator(n_ions, a, SpinKind::Raise)?.matmul(&site_operator(n_ions, b, SpinKind::Lower)?)?;
            let down_up =
                site_operator(n_ions, a, SpinKind::Lower)?.matmul(&site_operator(n_ions, b, SpinKind::Raise)?)?;
            up_down.add(&down_up)
        }
    }
}

/// `H_a` on the spin space only.
pub fn build_ion_hamiltonian(params: &ModelParams) -> Result<Operator> {
    params.validate()?;
    let n = params.n_ions();
    let coeffs = params.coupling_matrix()?;
    let mut h = collective_spin(n, SpinKind::Population)?.scale_real(params.omega_a);
    for a in 1..=n {
        for b in (a + 1)..=n {
            let c = coeffs[(a - 1, b - 1)];
            if c != 0.0 {
                h = h.add_scaled(&hopping_pair(n, a, b, params.hopping_mode)?, real(c))?;
            }
        }
    }
    h.into_hermitian()
        .map_err(|e| Error::NumericalConsistency(format!("ion Hamiltonian: {e}")))
}

/// Counter-rotating part of the ion-oscillator coupling,
/// `λ Σ_n (ĉ†σ⁺_n + ĉσ⁻_n)`, on the full space.
pub fn counter_rotating_coupling(params: &ModelParams, spec: &HilbertSpec) -> Result<Operator> {
    params.check_spec(spec)?;
    let c = boson_annihilator(spec.fock_dim())?;
    let raise = collective_spin(spec.n_ions(), SpinKind::Raise)?;
    let lower = collective_spin(spec.n_ions(), SpinKind::Lower)?;
    tensor_embed(&c.adjoint(), &raise)
        .add(&tensor_embed(&c, &lower))
        .map(|op| op.scale_real(params.lambda))
}

/// Counter-rotating part of the hopping, `Σ_{n<m} C_nm (σ⁺σ⁺ + σ⁻σ⁻)`, on
/// the spin space.
pub fn counter_rotating_hopping(params: &ModelParams) -> Result<Operator> {
    params.validate()?;
    let n = params.n_ions();
    let coeffs = params.coupling_matrix()?;
    let mut h = Operator::zeros(1 << n);
    for a in 1..=n {
        for b in (a + 1)..=n {
            let up = site_operator(n, a, SpinKind::Raise)?.matmul(&site_operator(n, b, SpinKind::Raise)?)?;
            let down = site_operator(n, a, SpinKind::Lower)?.matmul(&site_operator(n, b, SpinKind::Lower)?)?;
            h = h.add_scaled(&up.add(&down)?, real(coeffs[(a - 1, b - 1)]))?;
        }
    }
    Ok(h)
}

/// Assemble every part of the Hamiltonian on `spec`.
pub fn build_hamiltonian(params: &ModelParams, spec: &HilbertSpec) -> Result<Hamiltonian> {
    params.validate()?;
    params.check_spec(spec)?;
    let fock = spec.fock_dim();
    let n = spec.n_ions();

    let h_a_spin = build_ion_hamiltonian(params)?;
    let h_a = tensor_embed(&Operator::identity(fock), &h_a_spin);
    let h_c = tensor_embed(&boson_number(fock)?, &Operator::identity(spec.spin_dim())).scale_real(params.omega_c);

    let c = boson_annihilator(fock)?;
    let h_ac = match params.coupling_mode {
        CouplingMode::Full => {
            let quad = c.add(&c.adjoint())?;
            tensor_embed(&quad, &collective_spin(n, SpinKind::X)?)
        }
        CouplingMode::RotatingOnly => {
            let absorb = tensor_embed(&c, &collective_spin(n, SpinKind::Raise)?);
            let emit = tensor_embed(&c.adjoint(), &collective_spin(n, SpinKind::Lower)?);
            absorb.add(&emit)?
        }
    }
    .scale_real(params.lambda);

    let h_total = h_c.add(&h_a)?.add(&h_ac)?;

    let check = |op: Operator, name: &str| {
        op.into_hermitian()
            .map_err(|e| Error::NumericalConsistency(format!("{name}: {e}")))
    };
    Ok(Hamiltonian {
        h_a: check(h_a, "h_a")?,
        h_c: check(h_c, "h_c")?,
        h_ac: check(h_ac, "h_ac")?,
        h_total: check(h_total, "h_total")?,
        h_a_spin,
    })
}
