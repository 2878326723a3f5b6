//! Seeded, deterministic invariant suites covering every module.
//!
//! The CLI `check` command runs these and reports one pass/fail line per
//! suite. Sample parameters are drawn up front from a seeded generator so
//! the outcome is independent of thread count; the per-sample work then
//! fans out across workers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{
    c2_c1c2, c2_c1r1, c2_c1r2, c2_c2r2, c2_r1r2, e_bb_analytic, event_times, scan_grid,
};
use crate::error::Result;
use crate::measures::{
    block_concurrence_squared, concurrence, full_report, pure_three_tangle_with_pivot,
    three_tangle_decomposition, MEASURE_CLAMP_TOL,
};
use crate::qmath::{hermitian_eigen, kron, ComplexMatrix, DensityMatrix};
use crate::reservoir::{phase_rotation_equivalence, ReservoirModel, ReservoirSpec};
use crate::states::{
    dissipation_amplitudes, effective_output_state, effective_state_at, general_output_state,
    general_state_at, lu_modulated_output, xi_chi_swap_check, DissipationAmplitudes,
    EffectiveParams, GeneralInitialState, LUParams, Qubit,
};

/// Thresholds used by the suites. The defaults are the contract; tests
/// inject corrupted values to exercise the failure path.
#[derive(Debug, Clone, Copy)]
pub struct CheckTolerances {
    /// Identities that hold to rounding (normalization, swap symmetry).
    pub exact: f64,
    /// Analytic-vs-oracle and LU-invariance agreement.
    pub oracle: f64,
    /// Eigenvalue-product versus determinant (dims up to 4).
    pub determinant: f64,
    /// Finite-N reservoir deviation from the flat-spectrum law.
    pub reservoir: f64,
    /// Amplitude-modulus deviation under Hamiltonian phase conjugation.
    pub phase: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            oracle: 1e-10,
            determinant: 1e-8,
            reservoir: 5e-3,
            phase: 1e-10,
        }
    }
}

/// Outcome of one module's suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// True when every suite passed.
pub fn all_passed(outcomes: &[SuiteOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

type SuiteFn = fn(u64, usize, &CheckTolerances) -> Result<String>;

/// Run the invariant suites of all modules with `samples` random draws
/// per sampled property.
pub fn run_all(seed: u64, samples: usize, tol: &CheckTolerances) -> Vec<SuiteOutcome> {
    let samples = samples.max(1);
    let suites: [(&'static str, SuiteFn); 5] = [
        ("qmath", suite_qmath),
        ("states", suite_states),
        ("measures", suite_measures),
        ("dynamics", suite_dynamics),
        ("reservoir", suite_reservoir),
    ];
    suites
        .iter()
        .enumerate()
        .map(
            |(i, (name, run))| match run(seed.wrapping_add(i as u64), samples, tol) {
                Ok(detail) => SuiteOutcome {
                    name,
                    passed: true,
                    detail,
                },
                Err(err) => SuiteOutcome {
                    name,
                    passed: false,
                    detail: err.to_string(),
                },
            },
        )
        .collect()
}

fn fail(name: &str, value: f64, bound: f64) -> crate::error::Error {
    crate::error::Error::InvariantViolation(format!("{name}: {value:.3e} exceeds {bound:.1e}"))
}

/// Map each item to a deviation and return the maximum, in parallel when
/// the `parallel` feature is on.
fn max_deviation<T, F>(items: &[T], f: F) -> Result<f64>
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let devs: Vec<f64> = items.par_iter().map(&f).collect::<Result<_>>()?;
        Ok(devs.into_iter().fold(0.0, f64::max))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc: f64 = 0.0;
        for item in items {
            acc = acc.max(f(item)?);
        }
        Ok(acc)
    }
}

fn random_effective(rng: &mut impl Rng) -> (EffectiveParams, f64) {
    let alpha: f64 = rng.random_range(0.0..1.0);
    let beta = (1.0 - alpha * alpha).sqrt();
    let gamma = rng.random_range(0.0..std::f64::consts::PI);
    let t = rng.random_range(0.0..6.0);
    (EffectiveParams::new(alpha, beta, gamma, 1.0).unwrap(), t)
}

fn random_general(rng: &mut impl Rng) -> GeneralInitialState {
    let mut a = [Complex64::ZERO; 4];
    let mut norm = 0.0;
    for entry in a.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *entry = Complex64::new(re, im);
        norm += entry.norm_sqr();
    }
    let inv = norm.sqrt().recip();
    for entry in a.iter_mut() {
        *entry *= inv;
    }
    GeneralInitialState::new(a).unwrap()
}

fn random_state_vector(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::ZERO; dim];
    let mut norm = 0.0;
    for entry in v.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *entry = Complex64::new(re, im);
        norm += entry.norm_sqr();
    }
    let inv = norm.sqrt().recip();
    for entry in v.iter_mut() {
        *entry *= inv;
    }
    v
}

fn random_mixed_two_qubit(rng: &mut impl Rng) -> DensityMatrix {
    let mut a = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            a[(i, j)] = Complex64::new(re, im);
        }
    }
    let aa = a.mul(&a.adjoint()).unwrap();
    let tr = aa.trace().re;
    let mut m = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            m[(i, j)] = aa[(i, j)] / tr;
        }
    }
    DensityMatrix::new(m).unwrap()
}

fn random_lu(rng: &mut impl Rng) -> LUParams {
    LUParams::new(
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.random_range(0.0..std::f64::consts::PI),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
    .unwrap()
}

fn suite_qmath(seed: u64, samples: usize, tol: &CheckTolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples.min(200);

    let states: Vec<Vec<Complex64>> = (0..n).map(|_| random_state_vector(&mut rng, 16)).collect();
    let trace_dev = max_deviation(&states, |v| {
        let rho = DensityMatrix::from_pure(v)?;
        let mut dev: f64 = 0.0;
        for keep in [&[0usize][..], &[1, 2], &[3, 0], &[0, 1, 2]] {
            let red = rho.partial_trace(keep)?;
            let tr = red.matrix().trace();
            dev = dev.max((tr.re - 1.0).abs()).max(tr.im.abs());
            dev = dev.max(red.matrix().hermiticity_deviation());
        }
        Ok(dev)
    })?;
    if trace_dev > tol.exact {
        return Err(fail("partial trace preservation", trace_dev, tol.exact));
    }

    let mut eig_dev: f64 = 0.0;
    let mut det_dev: f64 = 0.0;
    for _ in 0..n {
        let dim = rng.random_range(2..=4);
        let mut h = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                h[(i, j)] = Complex64::new(re, im);
            }
        }
        let sym = {
            let mut s = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    s[(i, j)] = 0.5 * (h[(i, j)] + h[(j, i)].conj());
                }
            }
            s
        };
        let (vals, _) = hermitian_eigen(&sym)?;
        eig_dev = eig_dev.max((vals.iter().sum::<f64>() - sym.trace().re).abs());
        let det = sym.determinant()?;
        det_dev = det_dev
            .max((vals.iter().product::<f64>() - det.re).abs())
            .max(det.im.abs());
    }
    if eig_dev > 1e-10 {
        return Err(fail("eigenvalue sum vs trace", eig_dev, 1e-10));
    }
    if det_dev > tol.determinant {
        return Err(fail(
            "eigenvalue product vs determinant",
            det_dev,
            tol.determinant,
        ));
    }

    // Associativity is exact on sign/half-integer entries.
    let a = crate::qmath::sigma_x();
    let b = crate::qmath::sigma_y();
    let mut c = ComplexMatrix::identity(2);
    c[(1, 1)] = Complex64::new(-0.5, 0.5);
    let assoc = kron(&kron(&a, &b), &c).max_abs_diff(&kron(&a, &kron(&b, &c)));
    if assoc != 0.0 {
        return Err(fail("kron associativity", assoc, 0.0));
    }

    Ok(format!(
        "trace dev {trace_dev:.2e}, eig sum dev {eig_dev:.2e}, det dev {det_dev:.2e}"
    ))
}

fn suite_states(seed: u64, samples: usize, tol: &CheckTolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let draws: Vec<(EffectiveParams, f64)> =
        (0..samples).map(|_| random_effective(&mut rng)).collect();
    let norm_dev = max_deviation(&draws, |(p, t)| {
        let st = effective_output_state(p, *t)?;
        let norm: f64 = st.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        Ok((norm - 1.0).abs())
    })?;
    if norm_dev > tol.exact {
        return Err(fail("effective state normalization", norm_dev, tol.exact));
    }

    // gamma = 0 must reproduce the symmetric-state evolution computed
    // through the independent per-pair isometry path.
    let sym_dev = max_deviation(&draws, |(p, t)| {
        let a = effective_output_state(&p.with_gamma(0.0)?, *t)?;
        let init = GeneralInitialState::symmetric(p.alpha(), p.beta())?;
        let b = general_output_state(&init, 1.0, *t)?;
        Ok(a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    })?;
    if sym_dev > tol.exact {
        return Err(fail("gamma = 0 specialization", sym_dev, tol.exact));
    }

    // Full LU modulation must match the gamma-only effective state on
    // every entanglement quantity.
    let lus: Vec<(LUParams, (EffectiveParams, f64))> = (0..samples.min(200))
        .map(|_| (random_lu(&mut rng), random_effective(&mut rng)))
        .collect();
    let lu_dev = max_deviation(&lus, |(lu, (p, t))| {
        let modulated = lu_modulated_output(lu, p.alpha(), p.beta(), 1.0, *t)?;
        let effective = effective_output_state(&p.with_gamma(lu.gamma)?, *t)?;
        Ok(full_report(&modulated)?.max_abs_diff(&full_report(&effective)?))
    })?;
    if lu_dev > tol.oracle {
        return Err(fail("LU reduction invariance", lu_dev, tol.oracle));
    }

    let block_dev = max_deviation(&draws, |(p, t)| {
        let st = effective_output_state(p, *t)?;
        let expected = 4.0 * p.alpha().powi(2) * p.beta().powi(2);
        Ok((block_concurrence_squared(&st, (Qubit::C1, Qubit::R1))? - expected).abs())
    })?;
    if block_dev > tol.oracle {
        return Err(fail(
            "block concurrence conservation",
            block_dev,
            tol.oracle,
        ));
    }

    let amps: Vec<DissipationAmplitudes> = (1..=30)
        .map(|k| dissipation_amplitudes(1.0, 0.1 * k as f64))
        .collect::<Result<_>>()?;
    let mut swap_dev: f64 = 0.0;
    for _ in 0..samples.min(50) {
        let (p, _) = random_effective(&mut rng);
        swap_dev = swap_dev.max(xi_chi_swap_check(
            |a| effective_state_at(p.alpha(), p.beta(), p.gamma(), a),
            &amps,
        )?);
        let init = random_general(&mut rng);
        swap_dev = swap_dev.max(xi_chi_swap_check(|a| general_state_at(&init, a), &amps)?);
    }
    if swap_dev > tol.exact {
        return Err(fail("xi-chi swap identity", swap_dev, tol.exact));
    }

    Ok(format!(
        "norm dev {norm_dev:.2e}, LU dev {lu_dev:.2e}, swap dev {swap_dev:.2e}"
    ))
}

fn suite_measures(seed: u64, samples: usize, tol: &CheckTolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let draws: Vec<(EffectiveParams, f64)> =
        (0..samples).map(|_| random_effective(&mut rng)).collect();
    let identity_dev = max_deviation(&draws, |(p, t)| {
        let report = full_report(&effective_output_state(p, *t)?)?;
        let d1 = (report.e_bb - 2.0 * report.e_ms).abs();
        let d2 = (report.e_bb - report.e_qb_c1 - report.e_qb_r1).abs();
        let d3 = (report.c2_c1r2 - report.c2_c2r1).abs();
        Ok(d1.max(d2).max(d3))
    })?;
    if identity_dev > tol.oracle {
        return Err(fail("block-block identities", identity_dev, tol.oracle));
    }

    let generals: Vec<(GeneralInitialState, f64)> = (0..samples)
        .map(|_| (random_general(&mut rng), rng.random_range(0.0..6.0)))
        .collect();
    let mut worst_slack: f64 = f64::INFINITY;
    for (init, t) in &generals {
        let st = general_output_state(init, 1.0, *t)?;
        let report = full_report(&st)?;
        let slack =
            report.c2_block - report.c2_c1c2 - report.c2_r1r2 - report.c2_c1r2 - report.c2_c2r1;
        worst_slack = worst_slack.min(slack);
    }
    if worst_slack < -MEASURE_CLAMP_TOL {
        return Err(fail("monogamy slack", worst_slack, -MEASURE_CLAMP_TOL));
    }

    let rhos: Vec<(DensityMatrix, LUParams, LUParams)> = (0..samples.min(200))
        .map(|_| {
            (
                random_mixed_two_qubit(&mut rng),
                random_lu(&mut rng),
                random_lu(&mut rng),
            )
        })
        .collect();
    let lu_dev = max_deviation(&rhos, |(rho, u1, u2)| {
        let c0 = concurrence(rho)?;
        let u = kron(&u1.matrix(), &u2.matrix());
        let rotated = DensityMatrix::new(u.mul(rho.matrix())?.mul(&u.adjoint())?)?;
        Ok((c0 - concurrence(&rotated)?).abs())
    })?;
    if lu_dev > tol.oracle {
        return Err(fail("concurrence LU invariance", lu_dev, tol.oracle));
    }

    let triples: Vec<Vec<Complex64>> = (0..samples.min(200))
        .map(|_| random_state_vector(&mut rng, 8))
        .collect();
    let pivot_dev = max_deviation(&triples, |v| {
        let psi: [Complex64; 8] = v.as_slice().try_into().unwrap();
        let t0 = pure_three_tangle_with_pivot(&psi, 0)?;
        let t1 = pure_three_tangle_with_pivot(&psi, 1)?;
        let t2 = pure_three_tangle_with_pivot(&psi, 2)?;
        Ok((t0 - t1).abs().max((t0 - t2).abs()))
    })?;
    if pivot_dev > tol.oracle {
        return Err(fail(
            "three-tangle pivot independence",
            pivot_dev,
            tol.oracle,
        ));
    }

    let tangle_dev = max_deviation(&draws, |(p, t)| {
        let st = effective_output_state(p, *t)?;
        let mut dev: f64 = 0.0;
        for triple in [
            [Qubit::C1, Qubit::R1, Qubit::C2],
            [Qubit::C1, Qubit::R1, Qubit::R2],
            [Qubit::C1, Qubit::C2, Qubit::R2],
            [Qubit::R1, Qubit::C2, Qubit::R2],
        ] {
            dev = dev.max(three_tangle_decomposition(&st, triple)?.max_tangle());
        }
        Ok(dev)
    })?;
    if tangle_dev > tol.oracle {
        return Err(fail("three-tangle decomposition", tangle_dev, tol.oracle));
    }

    Ok(format!(
        "identity dev {identity_dev:.2e}, monogamy slack {worst_slack:.2e}, tangle dev {tangle_dev:.2e}"
    ))
}

fn suite_dynamics(seed: u64, samples: usize, tol: &CheckTolerances) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let draws: Vec<(EffectiveParams, f64)> =
        (0..samples).map(|_| random_effective(&mut rng)).collect();
    let oracle_dev = max_deviation(&draws, |(p, t)| {
        let report = full_report(&effective_output_state(p, *t)?)?;
        let total = 4.0 * p.alpha().powi(2) * p.beta().powi(2);
        let conservation =
            (report.e_bb + report.c2_c1c2 + report.c2_c1r2 + report.c2_c2r1 + report.c2_r1r2
                - total)
                .abs();
        Ok([
            (c2_c1c2(p, *t)? - report.c2_c1c2).abs(),
            (c2_r1r2(p, *t)? - report.c2_r1r2).abs(),
            (c2_c1r1(p, *t)? - report.c2_c1r1).abs(),
            (c2_c2r2(p, *t)? - report.c2_c2r2).abs(),
            (c2_c1r2(p, *t)? - report.c2_c1r2).abs(),
            (e_bb_analytic(p, *t)? - report.e_bb).abs(),
            conservation,
        ]
        .into_iter()
        .fold(0.0, f64::max))
    })?;
    if oracle_dev > tol.oracle {
        return Err(fail("analytic vs oracle", oracle_dev, tol.oracle));
    }

    // Monotone trends on dense grids.
    let p = EffectiveParams::reference_example();
    for gamma in [0.0, 0.8, 1.6, 2.4] {
        let pg = p.with_gamma(gamma)?;
        let mut prev_cc = f64::INFINITY;
        let mut prev_rr = -1.0;
        for k in 0..=600 {
            let t = 0.01 * k as f64;
            let cc = c2_c1c2(&pg, t)?;
            let rr = c2_r1r2(&pg, t)?;
            if cc > prev_cc + 1e-14 {
                return Err(fail("c2_c1c2 monotone in t", cc - prev_cc, 1e-14));
            }
            if rr < prev_rr - 1e-14 {
                return Err(fail("c2_r1r2 monotone in t", prev_rr - rr, 1e-14));
            }
            prev_cc = cc;
            prev_rr = rr;
        }
    }
    for k in 0..=60 {
        let t = 0.1 * k as f64;
        let mut prev = -1.0;
        for j in 0..=30 {
            let gamma = std::f64::consts::PI * j as f64 / 30.0;
            let cc = c2_c1c2(&p.with_gamma(gamma)?, t)?;
            if cc < prev - 1e-14 {
                return Err(fail("c2_c1c2 monotone in gamma", prev - cc, 1e-14));
            }
            prev = cc;
        }
    }

    // ESD of the photons occurs exactly when the reservoirs start dead.
    for _ in 0..samples.min(300) {
        let alpha: f64 = rng.random_range(0.05..0.95);
        let beta = (1.0 - alpha * alpha).sqrt();
        let gamma = rng.random_range(0.0..std::f64::consts::PI);
        let pg = EffectiveParams::new(alpha, beta, gamma, 1.0)?;
        let cc_dies = c2_c1c2(&pg, 30.0)? == 0.0;
        let rr_starts_dead = c2_r1r2(&pg, 1e-4)? == 0.0;
        if cc_dies != rr_starts_dead {
            return Err(crate::error::Error::InvariantViolation(format!(
                "ESD/ESB correlation broken at alpha = {alpha}, gamma = {gamma}"
            )));
        }
        let times = event_times(&pg)?;
        if times.esd_c1c2.is_some() != cc_dies {
            return Err(crate::error::Error::InvariantViolation(format!(
                "event prediction disagrees with curve at alpha = {alpha}, gamma = {gamma}"
            )));
        }
    }

    // The c1 r1 pair peaks at kappa t = ln 2 for every gamma.
    for j in 0..=10 {
        let gamma = std::f64::consts::PI * j as f64 / 10.0;
        let pg = p.with_gamma(gamma)?;
        let peak = c2_c1r1(&pg, 2f64.ln())?;
        for k in 0..=120 {
            let t = 0.05 * k as f64;
            if c2_c1r1(&pg, t)? > peak + 1e-12 {
                return Err(fail("c2_c1r1 peak at ln 2", c2_c1r1(&pg, t)? - peak, 1e-12));
            }
        }
    }

    // A small scan exercises the row-level enforcement too.
    let ts: Vec<f64> = (0..=60).map(|k| 0.1 * k as f64).collect();
    scan_grid(&p, &ts, &[0.0, 1.0, 2.0])?;

    Ok(format!(
        "oracle dev {oracle_dev:.2e} over {} triples",
        draws.len()
    ))
}

fn suite_reservoir(seed: u64, _samples: usize, tol: &CheckTolerances) -> Result<String> {
    let _ = seed; // the reservoir suite is deterministic
    let samples: Vec<f64> = (1..=60).map(|k| 0.1 * k as f64).collect();

    let mut last = f64::INFINITY;
    let mut final_dev = f64::INFINITY;
    for n in [50usize, 100, 200, 400] {
        let model = ReservoirModel::new(ReservoirSpec::with_default_spacing(n, 1.0)?)?;
        // Norm conservation comes along for free in evolve(); probe a few
        // times explicitly.
        for &t in &[0.5, 3.0, 5.5] {
            let state = model.evolve(t)?;
            let dev = (state.norm_sqr() - 1.0).abs();
            if dev > 1e-10 {
                return Err(fail("norm conservation", dev, 1e-10));
            }
        }
        let dev = crate::reservoir::validate_flat_spectrum(&model, &samples)?.max();
        if dev >= last {
            return Err(fail("deviation monotone in N", dev, last));
        }
        last = dev;
        final_dev = dev;
    }
    if final_dev > tol.reservoir {
        return Err(fail(
            "flat-spectrum deviation at N = 400",
            final_dev,
            tol.reservoir,
        ));
    }

    // Short-time quadratic loss: loss/t decreases linearly toward zero
    // and tracks the quadratic-regime prediction (sum g^2) t.
    let spec = ReservoirSpec::default_for(1.0)?;
    let model = ReservoirModel::new(spec)?;
    let bandwidth = spec.mode_spacing() * spec.n_modes() as f64;
    let mut prev_ratio = f64::INFINITY;
    for t in [1e-3, 5e-4, 2.5e-4] {
        let state = model.evolve(t)?;
        let ratio = (1.0 - state.cavity_amplitude.norm_sqr()) / t;
        let prediction = bandwidth * t / (2.0 * std::f64::consts::PI);
        if ratio > 1.2 * prediction || ratio >= prev_ratio {
            return Err(fail("short-time quadratic loss", ratio, 1.2 * prediction));
        }
        prev_ratio = ratio;
    }

    let spec = ReservoirSpec::with_default_spacing(200, 1.0)?;
    let mut phase_dev: f64 = 0.0;
    for eta in [0.4, 1.3, std::f64::consts::PI] {
        phase_dev = phase_dev.max(phase_rotation_equivalence(&spec, eta, 1.0)?);
    }
    if phase_dev > tol.phase {
        return Err(fail("phase conjugation moduli", phase_dev, tol.phase));
    }

    Ok(format!(
        "flat-spectrum dev {final_dev:.2e} at N = 400, phase dev {phase_dev:.2e}"
    ))
}
