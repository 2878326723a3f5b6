//! Initial and time-evolved states of the two cavity-reservoir pairs.
//!
//! The evolution acts pairwise as the isometry
//! `|00> -> |00>`, `|10> -> xi|10> + chi|01>` on each (cavity, reservoir)
//! pair, with `xi = exp(-kappa t / 2)` and `chi = sqrt(1 - exp(-kappa t))`.
//! The exact finite-mode model backing this amplitude map lives in
//! [`crate::reservoir`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, DensityMatrix};

/// Number of qubits in the composite system.
pub const N_QUBITS: usize = 4;

/// Hilbert-space dimension of the composite system.
pub const DIM: usize = 1 << N_QUBITS;

/// The four subsystems in their fixed order (c1, r1, c2, r2).
///
/// Qubit 0 is the most significant bit of a basis index, so the basis
/// state `|c1 r1 c2 r2>` has index `8*c1 + 4*r1 + 2*c2 + r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    C1,
    R1,
    C2,
    R2,
}

impl Qubit {
    pub const ALL: [Qubit; 4] = [Qubit::C1, Qubit::R1, Qubit::C2, Qubit::R2];

    pub fn index(self) -> usize {
        match self {
            Qubit::C1 => 0,
            Qubit::R1 => 1,
            Qubit::C2 => 2,
            Qubit::R2 => 3,
        }
    }
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {value}")));
    }
    Ok(())
}

/// Parameters of the modulated symmetric initial state plus the
/// dissipation rate: amplitudes `alpha`, `beta`, rotation angle `gamma`
/// and rate `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    kappa: f64,
}

impl EffectiveParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, kappa: f64) -> Result<Self> {
        check_finite("alpha", alpha)?;
        check_finite("beta", beta)?;
        check_finite("gamma", gamma)?;
        check_finite("kappa", kappa)?;
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!(
                "amplitudes must lie in [0, 1]: alpha = {alpha}, beta = {beta}"
            )));
        }
        let norm = alpha * alpha + beta * beta;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "alpha^2 + beta^2 = {norm} differs from 1"
            )));
        }
        // gamma outside [0, pi] is rejected rather than wrapped so that a
        // convention mistake upstream cannot pass silently.
        if !(0.0..=std::f64::consts::PI).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} outside [0, pi]"
            )));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be > 0"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            kappa,
        })
    }

    /// Reference running example used across figures and tests:
    /// alpha = 1/sqrt(10), beta = 3/sqrt(10),
    /// gamma = 0, kappa = 1.
    pub fn reference_example() -> Self {
        Self::new(1.0 / 10f64.sqrt(), 3.0 / 10f64.sqrt(), 0.0, 1.0).unwrap()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Same amplitudes and rate, different rotation angle.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, gamma, self.kappa)
    }
}

/// Single-qubit unitary decomposition angles:
/// `U(zeta, eta, gamma, delta) = e^{i zeta} Rz(eta) Ry(gamma) Rz(delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LUParams {
    pub zeta: f64,
    pub eta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl LUParams {
    pub fn new(zeta: f64, eta: f64, gamma: f64, delta: f64) -> Result<Self> {
        for (name, v) in [
            ("zeta", zeta),
            ("eta", eta),
            ("gamma", gamma),
            ("delta", delta),
        ] {
            check_finite(name, v)?;
        }
        Ok(Self {
            zeta,
            eta,
            gamma,
            delta,
        })
    }

    /// 2x2 matrix of the unitary, global phase included.
    pub fn matrix(&self) -> ComplexMatrix {
        let phase = Complex64::from_polar(1.0, self.zeta);
        let mut u = rz(self.eta)
            .mul(&ry(self.gamma))
            .unwrap()
            .mul(&rz(self.delta))
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                u[(i, j)] *= phase;
            }
        }
        u
    }
}

/// `Ry(theta) = exp(-i theta sigma_y / 2)`.
pub fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_reals(2, 2, &[c, -s, s, c]).unwrap()
}

/// `Rz(theta) = exp(-i theta sigma_z / 2)`.
pub fn rz(theta: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::from_polar(1.0, -theta / 2.0);
    m[(1, 1)] = Complex64::from_polar(1.0, theta / 2.0);
    m
}

/// Cavity and reservoir amplitudes of the pair evolution at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationAmplitudes {
    xi: f64,
    chi: f64,
}

impl DissipationAmplitudes {
    pub fn new(xi: f64, chi: f64) -> Result<Self> {
        check_finite("xi", xi)?;
        check_finite("chi", chi)?;
        if !(0.0..=1.0).contains(&xi) || !(0.0..=1.0).contains(&chi) {
            return Err(Error::InvalidParameter(format!(
                "amplitudes must lie in [0, 1]: xi = {xi}, chi = {chi}"
            )));
        }
        let norm = xi * xi + chi * chi;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "xi^2 + chi^2 = {norm} differs from 1"
            )));
        }
        Ok(Self { xi, chi })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// The pair with xi and chi exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            xi: self.chi,
            chi: self.xi,
        }
    }
}

/// `xi(t) = exp(-kappa t / 2)`, `chi(t) = sqrt(1 - exp(-kappa t))`.
pub fn dissipation_amplitudes(kappa: f64, t: f64) -> Result<DissipationAmplitudes> {
    check_finite("kappa", kappa)?;
    check_finite("t", t)?;
    if kappa <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} must be > 0"
        )));
    }
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
    }
    let xi = (-kappa * t / 2.0).exp();
    let chi = (1.0 - (-kappa * t).exp()).max(0.0).sqrt();
    DissipationAmplitudes::new(xi, chi)
}

/// Pure state of the four qubits (c1, r1, c2, r2).
#[derive(Debug, Clone, PartialEq)]
pub struct FourQubitState {
    amplitudes: [Complex64; DIM],
}

impl FourQubitState {
    pub fn new(amplitudes: [Complex64; DIM]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amplitudes
    }

    /// Amplitude of `|c1 r1 c2 r2>`.
    pub fn amplitude(&self, c1: usize, r1: usize, c2: usize, r2: usize) -> Complex64 {
        self.amplitudes[(c1 << 3) | (r1 << 2) | (c2 << 1) | r2]
    }

    /// Density matrix of the full four-qubit state.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes).expect("normalized by construction")
    }
}

/// Initial amplitudes of the two cavities over `|00>, |01>, |10>, |11>`
/// (reservoirs in vacuum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralInitialState {
    amplitudes: [Complex64; 4],
}

impl GeneralInitialState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// The symmetric state `alpha|00> + beta|11>`.
    pub fn symmetric(alpha: f64, beta: f64) -> Result<Self> {
        Self::new([
            Complex64::new(alpha, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(beta, 0.0),
        ])
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }
}

/// Apply a single-qubit gate to one qubit of a four-qubit state vector.
pub(crate) fn apply_single_qubit(
    amplitudes: &mut [Complex64; DIM],
    qubit: Qubit,
    u: &ComplexMatrix,
) {
    let bit = N_QUBITS - 1 - qubit.index();
    let mask = 1usize << bit;
    for idx in 0..DIM {
        if idx & mask != 0 {
            continue;
        }
        let i0 = idx;
        let i1 = idx | mask;
        let a0 = amplitudes[i0];
        let a1 = amplitudes[i1];
        amplitudes[i0] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
        amplitudes[i1] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
    }
}

/// Apply the pair isometry `|00> -> |00>`, `|10> -> xi|10> + chi|01>` to a
/// (cavity, reservoir) pair. The reservoir qubit must start in vacuum.
fn apply_pair_decay(
    amplitudes: &[Complex64; DIM],
    cavity: Qubit,
    reservoir: Qubit,
    amps: DissipationAmplitudes,
) -> Result<[Complex64; DIM]> {
    let c_mask = 1usize << (N_QUBITS - 1 - cavity.index());
    let r_mask = 1usize << (N_QUBITS - 1 - reservoir.index());
    let mut out = [Complex64::ZERO; DIM];
    for idx in 0..DIM {
        let a = amplitudes[idx];
        if a == Complex64::ZERO {
            continue;
        }
        if idx & r_mask != 0 {
            if a.norm() > 1e-12 {
                return Err(Error::InvalidParameter(
                    "reservoir qubit not in vacuum before decay".into(),
                ));
            }
            continue;
        }
        if idx & c_mask == 0 {
            out[idx] += a;
        } else {
            out[idx] += amps.xi() * a;
            out[(idx & !c_mask) | r_mask] += amps.chi() * a;
        }
    }
    Ok(out)
}

/// Effective output state at explicit pair amplitudes:
/// `alpha (cos(g/2)|00> + sin(g/2)|phi>)_{c1r1} |00>_{c2r2}
///  - beta (sin(g/2)|00> - cos(g/2)|phi>)_{c1r1} |phi>_{c2r2}`
/// with `|phi> = xi|10> + chi|01>`.
pub fn effective_state_at(
    alpha: f64,
    beta: f64,
    gamma: f64,
    amps: DissipationAmplitudes,
) -> Result<FourQubitState> {
    let (s, c) = (gamma / 2.0).sin_cos();
    let (xi, chi) = (amps.xi(), amps.chi());
    let mut v = [Complex64::ZERO; DIM];
    let set = |v: &mut [Complex64; DIM], c1: usize, r1: usize, c2: usize, r2: usize, x: f64| {
        v[(c1 << 3) | (r1 << 2) | (c2 << 1) | r2] += Complex64::new(x, 0.0);
    };
    // alpha branch: pair 2 in |00>.
    set(&mut v, 0, 0, 0, 0, alpha * c);
    set(&mut v, 1, 0, 0, 0, alpha * s * xi);
    set(&mut v, 0, 1, 0, 0, alpha * s * chi);
    // beta branch: pair 2 in |phi>.
    for (c2, r2, w2) in [(1usize, 0usize, xi), (0, 1, chi)] {
        set(&mut v, 0, 0, c2, r2, -beta * s * w2);
        set(&mut v, 1, 0, c2, r2, beta * c * xi * w2);
        set(&mut v, 0, 1, c2, r2, beta * c * chi * w2);
    }
    FourQubitState::new(v)
}

/// Effective output state of the rotated symmetric state at time `t`.
pub fn effective_output_state(p: &EffectiveParams, t: f64) -> Result<FourQubitState> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    effective_state_at(p.alpha(), p.beta(), p.gamma(), amps)
}

/// Output state of an arbitrary two-cavity initial state at explicit pair
/// amplitudes: the isometry acts independently on each pair.
pub fn general_state_at(
    init: &GeneralInitialState,
    amps: DissipationAmplitudes,
) -> Result<FourQubitState> {
    let a = init.amplitudes();
    let mut v = [Complex64::ZERO; DIM];
    // |c1 c2>_{cavities} |00>_{reservoirs} -> index (c1, 0, c2, 0).
    v[0] = a[0];
    v[0b0010] = a[1];
    v[0b1000] = a[2];
    v[0b1010] = a[3];
    let v = apply_pair_decay(&v, Qubit::C1, Qubit::R1, amps)?;
    let v = apply_pair_decay(&v, Qubit::C2, Qubit::R2, amps)?;
    FourQubitState::new(v)
}

/// Output state of an arbitrary two-cavity initial state at time `t`.
pub fn general_output_state(
    init: &GeneralInitialState,
    kappa: f64,
    t: f64,
) -> Result<FourQubitState> {
    general_state_at(init, dissipation_amplitudes(kappa, t)?)
}

/// Exact output of the full LU operation `U(zeta, eta, gamma, delta)`
/// applied to cavity 1 of the symmetric state, followed by the pair
/// evolution. No reduction to the `Ry(gamma)`-only form is performed;
/// every entanglement quantity of the result nevertheless matches the
/// effective state of the same `gamma`.
pub fn lu_modulated_output(
    lu: &LUParams,
    alpha: f64,
    beta: f64,
    kappa: f64,
    t: f64,
) -> Result<FourQubitState> {
    let norm = alpha * alpha + beta * beta;
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "alpha^2 + beta^2 = {norm} differs from 1"
        )));
    }
    let mut v = [Complex64::ZERO; DIM];
    v[0b0000] = Complex64::new(alpha, 0.0);
    v[0b1010] = Complex64::new(beta, 0.0);
    apply_single_qubit(&mut v, Qubit::C1, &lu.matrix());
    let amps = dissipation_amplitudes(kappa, t)?;
    let v = apply_pair_decay(&v, Qubit::C1, Qubit::R1, amps)?;
    let v = apply_pair_decay(&v, Qubit::C2, Qubit::R2, amps)?;
    FourQubitState::new(v)
}

/// Reduced density matrix of the state on `subsystems`, in the given order.
pub fn reduced_density(state: &FourQubitState, subsystems: &[Qubit]) -> Result<DensityMatrix> {
    let keep: Vec<usize> = subsystems.iter().map(|q| q.index()).collect();
    state.density().partial_trace(&keep)
}

/// Max entrywise deviation of `rho_{c1c2}(xi, chi)` from
/// `rho_{r1r2}(chi, xi)` over the supplied amplitude samples. The identity
/// holds exactly for every state family produced by the pair evolution.
pub fn xi_chi_swap_check<F>(build: F, samples: &[DissipationAmplitudes]) -> Result<f64>
where
    F: Fn(DissipationAmplitudes) -> Result<FourQubitState>,
{
    let mut max_dev: f64 = 0.0;
    for &amps in samples {
        let cavities = reduced_density(&build(amps)?, &[Qubit::C1, Qubit::C2])?;
        let reservoirs = reduced_density(&build(amps.swapped())?, &[Qubit::R1, Qubit::R2])?;
        max_dev = max_dev.max(cavities.matrix().max_abs_diff(reservoirs.matrix()));
    }
    Ok(max_dev)
}
