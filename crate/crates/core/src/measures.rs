//! Entanglement quantifiers for the composite four-qubit system.
//!
//! Everything here works on the numerical state vector or density matrix
//! alone, with no closed-form shortcuts, so these functions double as the
//! oracle against the analytic curves in [`crate::dynamics`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{hermitian_eigen, partial_trace, singular_values, ComplexMatrix, DensityMatrix};
use crate::states::{reduced_density, FourQubitState, Qubit};

/// Results in `(-MEASURE_CLAMP_TOL, 0)` are floating-point noise and are
/// clamped to exactly zero.
pub const MEASURE_CLAMP_TOL: f64 = 1e-10;

/// Density-matrix weights below this fraction of the largest one are the
/// rounding residue of structurally zero eigenvalues and are dropped.
/// The Jacobi solver's scaled rotation threshold leaves such residue
/// near 5e-17, while genuine weights large enough to move the
/// concurrence at the 1e-10 level sit above 1e-16; keeping the residue
/// would inject sqrt(p) ~ 1e-8 columns into the tau matrix.
const RHO_RANK_FLOOR: f64 = 1e-16;

/// Subtractive measures below this signal a logic error, not noise.
pub const MEASURE_ERROR_TOL: f64 = -1e-8;

/// Weight threshold for counting an eigenvector into a block's support.
const SUPPORT_TOL: f64 = 1e-12;

fn clamp_measure(value: f64, error_floor: f64, context: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > error_floor {
        Ok(0.0)
    } else {
        Err(Error::InvariantViolation(format!(
            "{context} = {value:.3e} below {error_floor:.1e}"
        )))
    }
}

/// The Wootters square roots `sqrt(l_i)` are the singular values of the
/// complex-symmetric matrix `tau_ij = w_i^T (sy x sy) w_j` built over
/// *any* subnormalized decomposition `rho = sum_i |w_i><w_i|`: two
/// decompositions differ by a unitary mixing, which leaves singular
/// values untouched. Computing the roots this way, with no squaring step
/// anywhere, keeps them at absolute accuracy near machine epsilon;
/// forming the eigenvalues of `rho rho~` first would lose half the
/// digits of every near-zero root to the final square root.
fn concurrence_from_branches(branches: &[[Complex64; 4]]) -> Result<f64> {
    let r = branches.len();
    debug_assert!(r >= 1);
    // (sy x sy) is the anti-diagonal (-1, 1, 1, -1).
    let flip = |w: &[Complex64; 4], k: usize| match k {
        0 => -w[3],
        1 => w[2],
        2 => w[1],
        _ => -w[0],
    };
    let mut tau = ComplexMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            let mut acc = Complex64::ZERO;
            for k in 0..4 {
                acc += branches[i][k] * flip(&branches[j], k);
            }
            tau[(i, j)] = acc;
        }
    }
    let sigma = singular_values(&tau)?;
    let c = sigma[0] - sigma[1..].iter().sum::<f64>();
    Ok(c.max(0.0))
}

/// Wootters concurrence of a two-qubit density matrix,
/// `C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))` with `l_i` the
/// eigenvalues of `rho (sy x sy) rho* (sy x sy)` (conjugation in the
/// computational basis).
///
/// General mixed-state entry point: the decomposition entering the tau
/// construction comes from the eigendecomposition of `rho`. Where the
/// state of interest is a subsystem of a pure state this crate built,
/// prefer [`concurrence_squared_of_pair`], which uses the partial-trace
/// branches directly and sidesteps eigensolver noise entirely.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::InvalidDensityMatrix(format!(
            "concurrence needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let (weights, vectors) = hermitian_eigen(rho.matrix())?;
    let w_max = weights[0].max(0.0);
    let mut branches = Vec::with_capacity(4);
    for (j, &p) in weights.iter().enumerate() {
        if p < -crate::qmath::PSD_CLAMP_TOL {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: p });
        }
        if p <= RHO_RANK_FLOOR * w_max {
            continue; // structural zero: drop the column
        }
        let root = p.sqrt();
        let mut w = [Complex64::ZERO; 4];
        for (i, entry) in w.iter_mut().enumerate() {
            *entry = root * vectors[(i, j)];
        }
        branches.push(w);
    }
    if branches.is_empty() {
        return Err(Error::InvalidDensityMatrix("state has no support".into()));
    }
    concurrence_from_branches(&branches)
}

/// Squared Wootters concurrence between two qubits of a pure four-qubit
/// state. The partial trace over the other two qubits is represented by
/// its four branch vectors (one per basis state of the traced pair),
/// which feed the tau construction exactly.
pub fn concurrence_squared_of_pair(state: &FourQubitState, a: Qubit, b: Qubit) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidParameter(
            "pair must be two distinct qubits".into(),
        ));
    }
    let (a, b) = (a.index(), b.index());
    let traced: Vec<usize> = (0..4).filter(|q| *q != a && *q != b).collect();
    let mut branches = [[Complex64::ZERO; 4]; 4];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let ia = (idx >> (3 - a)) & 1;
        let ib = (idx >> (3 - b)) & 1;
        let e = (((idx >> (3 - traced[0])) & 1) << 1) | ((idx >> (3 - traced[1])) & 1);
        branches[e][(ia << 1) | ib] = *amp;
    }
    let c = concurrence_from_branches(&branches)?;
    Ok(c * c)
}

/// Linear-entropy tangle `tau = 2 (1 - tr rho^2)` of a single qubit.
pub fn linear_entropy_tangle(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::InvalidDensityMatrix(format!(
            "linear entropy tangle needs a single qubit, got dimension {}",
            rho.dim()
        )));
    }
    clamp_measure(2.0 * (1.0 - rho.purity()), -MEASURE_CLAMP_TOL, "tau")
}

/// Squared concurrence of a pure state across a 2|2 bipartition,
/// `2 (1 - tr rho_A^2)` for the reduced state of `side_a`.
pub fn block_concurrence_squared(state: &FourQubitState, side_a: (Qubit, Qubit)) -> Result<f64> {
    let rho_a = reduced_density(state, &[side_a.0, side_a.1])?;
    clamp_measure(
        2.0 * (1.0 - rho_a.purity()),
        -MEASURE_CLAMP_TOL,
        "C^2_block",
    )
}

/// Squared concurrence between one qubit and a two-qubit block.
///
/// The block's reduced state must occupy at most a two-dimensional
/// subspace (true for every state this crate produces: the pair
/// amplitudes only ever populate `|00>` and `xi|10> + chi|01>`). That
/// support is embedded into a logical qubit by orthonormal basis change
/// and the Wootters concurrence of the resulting two-qubit state is
/// returned squared.
pub fn qubit_to_block_concurrence_squared(
    state: &FourQubitState,
    qubit: Qubit,
    block: (Qubit, Qubit),
) -> Result<f64> {
    let rho3 = reduced_density(state, &[qubit, block.0, block.1])?;
    let rho_block = partial_trace(rho3.matrix(), 3, &[1, 2])?;
    let (weights, vectors) = hermitian_eigen(&rho_block)?;
    if weights.len() > 2 && weights[2] > SUPPORT_TOL {
        let dim = weights.iter().filter(|w| **w > SUPPORT_TOL).count();
        return Err(Error::BlockSupportTooLarge {
            dim,
            weight: weights[2],
        });
    }
    // Isometry W: block space -> logical qubit, rows are the two leading
    // eigenvectors (orthonormal even when the second weight vanishes).
    let mut w = ComplexMatrix::zeros(2, 4);
    for l in 0..2 {
        for j in 0..4 {
            w[(l, j)] = vectors[(j, l)].conj();
        }
    }
    // Branches of the (qubit, block) state over the traced qubit, each
    // embedded into (qubit, logical qubit).
    let in_triple = [qubit.index(), block.0.index(), block.1.index()];
    let traced = (0..4)
        .find(|q| !in_triple.contains(q))
        .expect("one qubit traced");
    let mut raw = [[Complex64::ZERO; 8]; 2];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        let e = (idx >> (3 - traced)) & 1;
        let mut sub = 0usize;
        for (pos, q) in in_triple.iter().enumerate() {
            sub |= ((idx >> (3 - q)) & 1) << (2 - pos);
        }
        raw[e][sub] = *amp;
    }
    let mut branches = Vec::with_capacity(2);
    for vec8 in raw {
        let mut v = [Complex64::ZERO; 4];
        for iq in 0..2 {
            for l in 0..2 {
                let mut acc = Complex64::ZERO;
                for jb in 0..4 {
                    acc += w[(l, jb)] * vec8[(iq << 2) | jb];
                }
                v[(iq << 1) | l] = acc;
            }
        }
        branches.push(v);
    }
    let c = concurrence_from_branches(&branches)?;
    Ok(c * c)
}

/// Qubit-block entanglement
/// `E(q|jk) = C^2_{q|jk} - C^2_{qj} - C^2_{qk}`.
pub fn qubit_block_entanglement(
    state: &FourQubitState,
    qubit: Qubit,
    block: (Qubit, Qubit),
) -> Result<f64> {
    let c2_block = qubit_to_block_concurrence_squared(state, qubit, block)?;
    let c2_j = concurrence_squared_of_pair(state, qubit, block.0)?;
    let c2_k = concurrence_squared_of_pair(state, qubit, block.1)?;
    clamp_measure(c2_block - c2_j - c2_k, MEASURE_ERROR_TOL, "E_qB")
}

/// Residual entanglement across the (c1 r1)|(c2 r2) cut:
/// the block concurrence squared minus the four cross-pair squared
/// concurrences.
pub fn residual_entanglement(state: &FourQubitState) -> Result<f64> {
    let block = block_concurrence_squared(state, (Qubit::C1, Qubit::R1))?;
    let cross = concurrence_squared_of_pair(state, Qubit::C1, Qubit::C2)?
        + concurrence_squared_of_pair(state, Qubit::C1, Qubit::R2)?
        + concurrence_squared_of_pair(state, Qubit::R1, Qubit::C2)?
        + concurrence_squared_of_pair(state, Qubit::R1, Qubit::R2)?;
    clamp_measure(block - cross, MEASURE_ERROR_TOL, "M")
}

/// Average multipartite entanglement
/// `E_ms = (sum_i tau_i - 2 sum_{i>j} C^2_{ij}) / 4`
/// over all four single-qubit tangles and all six pairs.
pub fn average_multipartite(state: &FourQubitState) -> Result<f64> {
    let mut tau_sum = 0.0;
    for q in Qubit::ALL {
        tau_sum += linear_entropy_tangle(&reduced_density(state, &[q])?)?;
    }
    let mut c2_sum = 0.0;
    for (i, &a) in Qubit::ALL.iter().enumerate() {
        for &b in &Qubit::ALL[i + 1..] {
            c2_sum += concurrence_squared_of_pair(state, a, b)?;
        }
    }
    clamp_measure((tau_sum - 2.0 * c2_sum) / 4.0, MEASURE_ERROR_TOL, "E_ms")
}

/// Block-block entanglement between the pairs (c1 r1) and (c2 r2).
///
/// Returns the residual entanglement and cross-checks the identity
/// `M = 2 E_ms`, which holds for every state produced by the dissipative
/// evolution in this crate. A violation beyond 1e-8 means a bug, so it is
/// reported as an error rather than a value. Use
/// [`residual_entanglement`] for states outside that family.
pub fn block_block_entanglement(state: &FourQubitState) -> Result<f64> {
    let m = residual_entanglement(state)?;
    let e_ms = average_multipartite(state)?;
    if (m - 2.0 * e_ms).abs() > 1e-8 {
        return Err(Error::InvariantViolation(format!(
            "M = {m:.12e} but 2 E_ms = {:.12e}",
            2.0 * e_ms
        )));
    }
    Ok(m)
}

/// Pure three-qubit tangle `tau_i - C^2_{ij} - C^2_{ik}` with the given
/// pivot qubit; the value is pivot-independent.
pub fn pure_three_tangle_with_pivot(psi: &[Complex64; 8], pivot: usize) -> Result<f64> {
    if pivot > 2 {
        return Err(Error::InvalidParameter(format!(
            "pivot {pivot} out of range"
        )));
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    let rho = DensityMatrix::from_pure(psi)?;
    let tau = linear_entropy_tangle(&rho.partial_trace(&[pivot])?)?;
    let others: Vec<usize> = (0..3).filter(|q| *q != pivot).collect();
    let mut c2 = 0.0;
    for &other in &others {
        // Two branch vectors over the remaining qubit's basis.
        let traced = (0..3).find(|q| *q != pivot && *q != other).unwrap();
        let mut branches = [[Complex64::ZERO; 4]; 2];
        for (idx, amp) in psi.iter().enumerate() {
            let e = (idx >> (2 - traced)) & 1;
            let ia = (idx >> (2 - pivot)) & 1;
            let ib = (idx >> (2 - other)) & 1;
            branches[e][(ia << 1) | ib] = *amp;
        }
        let c = concurrence_from_branches(&branches)?;
        c2 += c * c;
    }
    clamp_measure(tau - c2, MEASURE_ERROR_TOL, "tau_3")
}

/// Pure three-qubit tangle with the first qubit as pivot.
pub fn pure_three_tangle(psi: &[Complex64; 8]) -> Result<f64> {
    pure_three_tangle_with_pivot(psi, 0)
}

/// A pure-state decomposition of a reduced three-qubit density matrix
/// together with the three-tangle of each component.
#[derive(Debug, Clone)]
pub struct ThreeTangleDecomposition {
    /// (weight, normalized component) pairs; weights sum to one.
    pub components: Vec<(f64, [Complex64; 8])>,
    /// Pure three-tangle of each component.
    pub tangles: Vec<f64>,
}

impl ThreeTangleDecomposition {
    pub fn max_tangle(&self) -> f64 {
        self.tangles.iter().copied().fold(0.0, f64::max)
    }
}

/// Two-branch decomposition of the reduced state on `triple`, obtained by
/// splitting the four-qubit state along the traced-out qubit's basis.
///
/// For the dissipative output states every component has vanishing
/// three-tangle, witnessing a zero mixed-state three-tangle. The mixture
/// is verified to reconstruct the reduced density matrix, and every
/// component tangle is required to stay at zero within 1e-10.
pub fn three_tangle_decomposition(
    state: &FourQubitState,
    triple: [Qubit; 3],
) -> Result<ThreeTangleDecomposition> {
    let mut in_triple = [false; 4];
    for q in triple {
        if in_triple[q.index()] {
            return Err(Error::InvalidParameter(
                "triple contains duplicate qubits".into(),
            ));
        }
        in_triple[q.index()] = true;
    }
    let traced = Qubit::ALL
        .into_iter()
        .find(|q| !in_triple[q.index()])
        .expect("exactly one qubit traced out");
    let traced_bit = 3 - traced.index();

    let mut components = Vec::new();
    let mut tangles = Vec::new();
    for branch in 0..2usize {
        let mut w = [Complex64::ZERO; 8];
        for idx in 0..16usize {
            if (idx >> traced_bit) & 1 != branch {
                continue;
            }
            let mut sub = 0usize;
            for (pos, q) in triple.iter().enumerate() {
                let bit = (idx >> (3 - q.index())) & 1;
                sub |= bit << (2 - pos);
            }
            w[sub] = state.amplitudes()[idx];
        }
        let weight: f64 = w.iter().map(|a| a.norm_sqr()).sum();
        if weight <= 1e-14 {
            continue;
        }
        let inv = weight.sqrt().recip();
        let mut phi = w;
        for a in phi.iter_mut() {
            *a *= inv;
        }
        tangles.push(pure_three_tangle(&phi)?);
        components.push((weight, phi));
    }

    // The mixture must reconstruct the reduced density matrix exactly.
    let mut mixture = ComplexMatrix::zeros(8, 8);
    for (weight, phi) in &components {
        let proj = ComplexMatrix::outer(phi);
        for i in 0..8 {
            for j in 0..8 {
                mixture[(i, j)] += *weight * proj[(i, j)];
            }
        }
    }
    let target = reduced_density(state, &triple)?;
    let reconstruction_dev = mixture.max_abs_diff(target.matrix());
    if reconstruction_dev > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "branch split does not reconstruct the reduced state: deviation {reconstruction_dev:.3e}"
        )));
    }
    let decomposition = ThreeTangleDecomposition {
        components,
        tangles,
    };
    if decomposition.max_tangle() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "component three-tangle {:.3e} is not zero",
            decomposition.max_tangle()
        )));
    }
    Ok(decomposition)
}

/// Every entanglement quantity of one four-qubit state.
///
/// All fields are computed from the state vector alone. `e_bb` is the
/// residual across the (c1 r1)|(c2 r2) cut, so
/// `e_bb = c2_block - (c2_c1c2 + c2_c1r2 + c2_c2r1 + c2_r1r2)` holds by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub c2_c1c2: f64,
    pub c2_r1r2: f64,
    pub c2_c1r1: f64,
    pub c2_c2r2: f64,
    pub c2_c1r2: f64,
    pub c2_c2r1: f64,
    pub c2_block: f64,
    pub e_bb: f64,
    pub e_qb_c1: f64,
    pub e_qb_r1: f64,
    pub e_ms: f64,
}

impl EntanglementReport {
    pub const FIELD_NAMES: [&'static str; 11] = [
        "c2_c1c2", "c2_r1r2", "c2_c1r1", "c2_c2r2", "c2_c1r2", "c2_c2r1", "c2_block", "e_bb",
        "e_qb_c1", "e_qb_r1", "e_ms",
    ];

    pub fn fields(&self) -> [f64; 11] {
        [
            self.c2_c1c2,
            self.c2_r1r2,
            self.c2_c1r1,
            self.c2_c2r2,
            self.c2_c1r2,
            self.c2_c2r1,
            self.c2_block,
            self.e_bb,
            self.e_qb_c1,
            self.e_qb_r1,
            self.e_ms,
        ]
    }

    /// Largest fieldwise deviation from another report.
    pub fn max_abs_diff(&self, other: &EntanglementReport) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Field names paired with values, in CSV column order.
    pub fn named_fields(&self) -> impl Iterator<Item = (&'static str, f64)> {
        Self::FIELD_NAMES.into_iter().zip(self.fields())
    }
}

/// Compute every report field from the state vector.
pub fn full_report(state: &FourQubitState) -> Result<EntanglementReport> {
    let c2_c1c2 = concurrence_squared_of_pair(state, Qubit::C1, Qubit::C2)?;
    let c2_r1r2 = concurrence_squared_of_pair(state, Qubit::R1, Qubit::R2)?;
    let c2_c1r1 = concurrence_squared_of_pair(state, Qubit::C1, Qubit::R1)?;
    let c2_c2r2 = concurrence_squared_of_pair(state, Qubit::C2, Qubit::R2)?;
    let c2_c1r2 = concurrence_squared_of_pair(state, Qubit::C1, Qubit::R2)?;
    let c2_c2r1 = concurrence_squared_of_pair(state, Qubit::C2, Qubit::R1)?;
    let c2_block = block_concurrence_squared(state, (Qubit::C1, Qubit::R1))?;
    let e_bb = clamp_measure(
        c2_block - (c2_c1c2 + c2_c1r2 + c2_c2r1 + c2_r1r2),
        MEASURE_ERROR_TOL,
        "e_bb",
    )?;
    let e_qb_c1 = qubit_block_entanglement(state, Qubit::C1, (Qubit::C2, Qubit::R2))?;
    let e_qb_r1 = qubit_block_entanglement(state, Qubit::R1, (Qubit::C2, Qubit::R2))?;
    let e_ms = average_multipartite(state)?;

    let report = EntanglementReport {
        c2_c1c2,
        c2_r1r2,
        c2_c1r1,
        c2_c2r2,
        c2_c1r2,
        c2_c2r1,
        c2_block,
        e_bb,
        e_qb_c1,
        e_qb_r1,
        e_ms,
    };
    for (name, value) in report.named_fields() {
        if !(0.0..=1.0 + MEASURE_CLAMP_TOL).contains(&value) {
            return Err(Error::InvariantViolation(format!(
                "report field {name} = {value} outside [0, 1]"
            )));
        }
    }
    Ok(report)
}
