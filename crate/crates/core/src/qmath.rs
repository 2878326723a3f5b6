//! Minimal dense complex linear algebra for small fixed dimensions.
//!
//! States live in dimensions 2–16; the discretized reservoir Hamiltonian
//! reaches a few hundred. Everything here is plain row-major storage with
//! hand-rolled kernels, which is both fast enough and easy to audit at
//! these sizes.
//!
//! Qubit convention used throughout the crate: qubit 0 is the most
//! significant bit of a computational-basis index, and the fixed ordering
//! is (c1, r1, c2, r2).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for declaring a matrix Hermitian when it is required to be.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues of a nominally PSD matrix in `(-PSD_CLAMP_TOL, 0)` are
/// clamped to zero; anything more negative is rejected as invalid input.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major slice of entries.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Build from real row-major entries.
    pub fn from_reals(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Outer product |v><v| of a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Plain transpose.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise deviation from another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Fail unless the matrix is Hermitian within `tol`.
    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix cannot be Hermitian",
                self.rows, self.cols
            )));
        }
        let deviation = self.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian {
                deviation,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "determinant of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::ONE;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap();
            if a[(pivot, k)].norm() == 0.0 {
                return Ok(Complex64::ZERO);
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            det *= a[(k, k)];
            for i in k + 1..n {
                let factor = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(i, j)] -= factor * akj;
                }
            }
        }
        Ok(det)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Kronecker product. Entry `(i*p + k, j*q + l) = a(i,j) * b(k,l)` for
/// `b` of shape `p x q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Hermitian, unit-trace matrix describing a (possibly mixed) qubit
/// subsystem state. Positive semidefiniteness is enforced where it is
/// consumed ([`psd_sqrt`]) rather than on every construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidDensityMatrix(format!(
                "{}x{} is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        let dim = mat.rows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensityMatrix(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        mat.require_hermitian(HERMITICITY_TOL)?;
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} differs from 1"
            )));
        }
        Ok(Self {
            mat,
            n_qubits: dim.trailing_zeros() as usize,
        })
    }

    /// Pure-state density matrix |psi><psi|.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(amplitudes))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// tr(rho^2); equals the squared Frobenius norm for Hermitian input.
    pub fn purity(&self) -> f64 {
        let f = self.mat.frobenius_norm();
        f * f
    }

    /// Reduced density matrix on `keep`, in the given qubit order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let reduced = partial_trace(&self.mat, self.n_qubits, keep)?;
        DensityMatrix::new(reduced)
    }
}

/// Partial trace of a `2^n`-dimensional matrix onto the ordered qubit
/// subset `keep`. Output qubit `j` is the input qubit `keep[j]`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    n_qubits: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let dim = 1usize << n_qubits;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {n_qubits} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    if keep.is_empty() {
        return Err(Error::InvalidParameter("empty keep set".into()));
    }
    let mut seen = vec![false; n_qubits];
    for &q in keep {
        if q >= n_qubits {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if seen[q] {
            return Err(Error::InvalidParameter(format!("duplicate qubit {q}")));
        }
        seen[q] = true;
    }
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !seen[*q]).collect();

    let m = keep.len();
    let e = traced.len();
    let out_dim = 1usize << m;
    // Qubit q occupies bit (n_qubits - 1 - q) of a basis index.
    let assemble = |sub: usize, env: usize| -> usize {
        let mut idx = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            let bit = (sub >> (m - 1 - j)) & 1;
            idx |= bit << (n_qubits - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            let bit = (env >> (e - 1 - j)) & 1;
            idx |= bit << (n_qubits - 1 - q);
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex64::ZERO;
            for env in 0..(1usize << e) {
                acc += rho[(assemble(i, env), assemble(j, env))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvector
/// columns. A pivot is rotated while
/// `|a_pq| > 4e-15 sqrt(|a_pp| |a_qq|)`, and the iteration stops at the
/// first sweep that performs no rotation (at most a hundred sweeps).
/// The scaled threshold keeps tiny eigenvalues of positive semidefinite
/// input at high *relative* accuracy, which the concurrence depends on:
/// with a plain absolute threshold a genuine eigenvalue near machine
/// epsilon would drown in leftover off-diagonal mass. The residual
/// `|H v - lambda v|` still lands near machine precision times the
/// matrix norm.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    h.require_hermitian(1e-10)?;
    let n = h.rows();
    let mut a = h.clone();
    // Symmetrize so rounding in the input cannot bias the iteration.
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);

    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let m = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if m <= 4e-15 * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let w = apq / m; // apq = m * w, |w| = 1
                let tau = (aqq - app) / (2.0 * m);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Rotation in the (p, q) plane:
                //   U = [[c, s], [-s*conj(w), c*conj(w)]],  A <- U' A U.
                let sw = s * w;
                let cw = c * w;
                for j in 0..n {
                    let arp = a[(p, j)];
                    let arq = a[(q, j)];
                    a[(p, j)] = c * arp - sw * arq;
                    a[(q, j)] = s * arp + cw * arq;
                }
                let swc = sw.conj();
                let cwc = cw.conj();
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - swc * aiq;
                    a[(i, q)] = s * aip + cwc * aiq;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - swc * viq;
                    v[(i, q)] = s * vip + cwc * viq;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        // Flutter guard: rotations by microscopic angles can keep a pair
        // hovering at the threshold. Accept if every remaining coupling
        // is relatively negligible, otherwise report the worst one.
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let denom = (a[(p, p)].re.abs() * a[(q, q)].re.abs()).sqrt();
                if denom > 0.0 {
                    worst = worst.max(a[(p, q)].norm() / denom);
                }
            }
        }
        if worst > 1e-12 {
            return Err(Error::EigenNoConvergence {
                off_norm: worst,
                sweeps: max_sweeps,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[j].total_cmp(&eigs[i]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eigs[src]);
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok((values, vectors))
}

/// Hermitian PSD square root of a density matrix.
///
/// Eigenvalues in `(-PSD_CLAMP_TOL, 0)` are treated as rounding noise and
/// clamped to zero; anything more negative rejects the input.
pub fn psd_sqrt(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(rho.matrix())?;
    let n = rho.dim();
    let mut sqrt_vals = Vec::with_capacity(n);
    for &lambda in &values {
        if lambda < -PSD_CLAMP_TOL {
            return Err(Error::NotPositiveSemidefinite { eigenvalue: lambda });
        }
        sqrt_vals.push(lambda.max(0.0).sqrt());
    }
    // S = V sqrt(L) V'
    let mut s = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += vectors[(i, k)] * sqrt_vals[k] * vectors[(j, k)].conj();
            }
            s[(i, j)] = acc;
        }
    }
    Ok(s)
}

/// Singular values of a small dense matrix, descending, by one-sided
/// Jacobi: column pairs are rotated until mutually orthogonal, and the
/// singular values emerge as column norms.
///
/// Small singular values come out with absolute accuracy near machine
/// epsilon times the matrix norm, with no squaring step anywhere. That
/// matters for the concurrence, where near-zero values enter through a
/// square root and any squaring would amplify rounding into the result.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let max_sweeps = 60;
    let mut converged = false;
    // The skip threshold must sit above the rounding floor of the inner
    // products (~n epsilon relative), or rotations by microscopic angles
    // can cycle indefinitely.
    let skip_tol = 4e-15;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::ZERO;
                for i in 0..rows {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    app += mip.norm_sqr();
                    aqq += miq.norm_sqr();
                    apq += mip.conj() * miq;
                }
                let off = apq.norm();
                if off <= skip_tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let w = apq / off;
                let tau = (aqq - app) / (2.0 * off);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let swc = s * w.conj();
                let cwc = c * w.conj();
                for i in 0..rows {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - swc * miq;
                    m[(i, q)] = s * mip + cwc * miq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        // Residual couplings relative to the column norms; if they are
        // already negligible the column norms are the singular values.
        let worst = worst_relative_coupling(&m);
        if worst > 1e-12 {
            return Err(Error::EigenNoConvergence {
                off_norm: worst,
                sweeps: max_sweeps,
            });
        }
    }
    let mut sigma: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

fn worst_relative_coupling(m: &ComplexMatrix) -> f64 {
    let (rows, cols) = (m.rows(), m.cols());
    let mut worst: f64 = 0.0;
    for p in 0..cols {
        for q in p + 1..cols {
            let mut app = 0.0;
            let mut aqq = 0.0;
            let mut apq = Complex64::ZERO;
            for i in 0..rows {
                app += m[(i, p)].norm_sqr();
                aqq += m[(i, q)].norm_sqr();
                apq += m[(i, p)].conj() * m[(i, q)];
            }
            let denom = (app * aqq).sqrt();
            if denom > 0.0 {
                worst = worst.max(apq.norm() / denom);
            }
        }
    }
    worst
}

/// sigma_y Pauli matrix.
pub fn sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(0.0, -1.0);
    m[(1, 0)] = Complex64::new(0.0, 1.0);
    m
}

/// sigma_x Pauli matrix.
pub fn sigma_x() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::ONE;
    m[(1, 0)] = Complex64::ONE;
    m
}
