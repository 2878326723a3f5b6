//! Closed-form entanglement curves, sudden-death/birth event times,
//! critical angles, plateau geometry and parameter-grid scans.
//!
//! Every closed form here is cross-checked against the state-vector
//! oracle in [`crate::measures`]; [`scan_grid`] enforces that agreement
//! on every row it emits.

use crate::error::{Error, Result};
use crate::measures::{concurrence_squared_of_pair, full_report, EntanglementReport};
use crate::states::{
    dissipation_amplitudes, effective_output_state, general_output_state, EffectiveParams,
    GeneralInitialState, Qubit,
};

/// Agreement required between analytic curves and the state-vector oracle.
pub const ORACLE_TOL: f64 = 1e-10;

/// Absolute tolerance, in dimensionless `kappa t`, for located event times.
pub const EVENT_TIME_TOL: f64 = 1e-9;

/// Horizon, in `kappa t`, beyond which numerical events are declared absent.
pub const EVENT_HORIZON: f64 = 30.0;

/// A numerically detected zero boundary must rise to at least this
/// concurrence a distance `ONSET_PROBE` away. In the deep-decay tail the
/// Wootters pipeline carries an absolute noise floor near sqrt(eps)
/// (matrix products cancel to machine epsilon before the square roots),
/// so shallower crossings cannot be told apart from noise and are
/// reported absent.
const ONSET_FLOOR: f64 = 1e-6;
const ONSET_PROBE: f64 = 1e-3;

fn cos_half_sq(gamma: f64) -> f64 {
    let c = (gamma / 2.0).cos();
    c * c
}

/// `C^2_{c1c2}(t) = 4 [max(a b xi^2 - b^2 xi^2 chi^2 cos^2(g/2), 0)]^2`.
pub fn c2_c1c2(p: &EffectiveParams, t: f64) -> Result<f64> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    let (xi2, chi2) = (amps.xi() * amps.xi(), amps.chi() * amps.chi());
    let inner =
        p.alpha() * p.beta() * xi2 - p.beta() * p.beta() * xi2 * chi2 * cos_half_sq(p.gamma());
    Ok(4.0 * inner.max(0.0).powi(2))
}

/// `C^2_{r1r2}(t) = 4 [max(a b chi^2 - b^2 xi^2 chi^2 cos^2(g/2), 0)]^2`.
pub fn c2_r1r2(p: &EffectiveParams, t: f64) -> Result<f64> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    let (xi2, chi2) = (amps.xi() * amps.xi(), amps.chi() * amps.chi());
    let inner =
        p.alpha() * p.beta() * chi2 - p.beta() * p.beta() * xi2 * chi2 * cos_half_sq(p.gamma());
    Ok(4.0 * inner.max(0.0).powi(2))
}

/// `C^2_{c1r1}(t) = xi^2 chi^2 [1 + (b^2 - a^2) cos g]^2`.
pub fn c2_c1r1(p: &EffectiveParams, t: f64) -> Result<f64> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    let (xi2, chi2) = (amps.xi() * amps.xi(), amps.chi() * amps.chi());
    let factor = 1.0 + (p.beta() * p.beta() - p.alpha() * p.alpha()) * p.gamma().cos();
    Ok(xi2 * chi2 * factor * factor)
}

/// `C^2_{c2r2}(t) = 4 b^4 xi^2 chi^2`; the rotation acts on cavity 1
/// only, so this pair never sees it.
pub fn c2_c2r2(p: &EffectiveParams, t: f64) -> Result<f64> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    let (xi2, chi2) = (amps.xi() * amps.xi(), amps.chi() * amps.chi());
    let b2 = p.beta() * p.beta();
    Ok(4.0 * b2 * b2 * xi2 * chi2)
}

/// `C^2_{c1r2}(t) = 4 [max(a b xi chi - b^2 xi^2 chi^2 cos^2(g/2), 0)]^2`;
/// the c2 r1 pair carries the same value.
pub fn c2_c1r2(p: &EffectiveParams, t: f64) -> Result<f64> {
    let amps = dissipation_amplitudes(p.kappa(), t)?;
    let xichi = amps.xi() * amps.chi();
    let inner =
        p.alpha() * p.beta() * xichi - p.beta() * p.beta() * xichi * xichi * cos_half_sq(p.gamma());
    Ok(4.0 * inner.max(0.0).powi(2))
}

/// Closed-form block-block entanglement via the conservation relation:
/// `E_BB = 4 a^2 b^2 - C^2_{c1c2} - C^2_{r1r2} - 2 C^2_{c1r2}`.
pub fn e_bb_analytic(p: &EffectiveParams, t: f64) -> Result<f64> {
    let total = 4.0 * p.alpha() * p.alpha() * p.beta() * p.beta();
    Ok(total - c2_c1c2(p, t)? - c2_r1r2(p, t)? - 2.0 * c2_c1r2(p, t)?)
}

/// Sudden-death and sudden-birth times in units of `1/kappa`
/// (dimensionless `kappa t`). Absent events are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventTimes {
    /// Photon-photon entanglement death.
    pub esd_c1c2: Option<f64>,
    /// Reservoir-reservoir entanglement birth.
    pub esb_r1r2: Option<f64>,
    /// Start of the c1 r2 (and c2 r1) zero window.
    pub esd_c1r2: Option<f64>,
    /// End of the c1 r2 (and c2 r1) zero window.
    pub esb_c1r2: Option<f64>,
}

/// Bisect `f` for a sign change on `[lo, hi]`, to `EVENT_TIME_TOL`.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:.3e}, {fhi:.3e})"
        )));
    }
    while hi - lo > EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form event times, each verified against a sign-change search on
/// the matching analytic curve.
///
/// The c1c2 / r1r2 events exist when `beta cos^2(gamma/2) > alpha`; the
/// c1 r2 window exists when `beta cos^2(gamma/2) >= 2 alpha` (collapsing
/// to a point at equality).
pub fn event_times(p: &EffectiveParams) -> Result<EventTimes> {
    let (alpha, beta) = (p.alpha(), p.beta());
    let m = beta * cos_half_sq(p.gamma());

    let mut times = EventTimes {
        esd_c1c2: None,
        esb_r1r2: None,
        esd_c1r2: None,
        esb_c1r2: None,
    };
    if alpha <= 0.0 {
        // Born dead: the curves are identically zero, no sudden event.
        return Ok(times);
    }
    if m > alpha {
        times.esd_c1c2 = Some(-(1.0 - alpha / m).ln());
        times.esb_r1r2 = Some((m / alpha).ln());
        // Inner factor of C_{c1c2}: alpha - beta chi^2 cos^2, decreasing.
        let verify_esd = bisect(
            |kt| alpha - m * (1.0 - (-kt).exp()),
            0.0,
            2.0 * EVENT_HORIZON,
        )?;
        // Inner factor of C_{r1r2}: alpha - beta xi^2 cos^2, increasing.
        let verify_esb = bisect(|kt| m * (-kt).exp() - alpha, 0.0, 2.0 * EVENT_HORIZON)?;
        for (name, formula, verified) in [
            ("esd_c1c2", times.esd_c1c2.unwrap(), verify_esd),
            ("esb_r1r2", times.esb_r1r2.unwrap(), verify_esb),
        ] {
            if (formula - verified).abs() > EVENT_TIME_TOL {
                return Err(Error::InvariantViolation(format!(
                    "{name}: formula {formula} vs curve sign change {verified}"
                )));
            }
        }
    }
    // Boundary points count as inside the zero window, so the tangent
    // case m = 2 alpha (up to rounding) yields a width-zero window.
    if m >= 2.0 * alpha - 1e-12 {
        // xi chi = alpha / m, i.e. x (1 - x) = r^2 for x = exp(-kappa t).
        let r = (alpha / m).min(0.5);
        let disc_sq = (1.0 - 4.0 * r * r).max(0.0);
        let disc = disc_sq.sqrt();
        let x_early = 0.5 * (1.0 + disc);
        let x_late = 0.5 * (1.0 - disc);
        let esd = -x_early.ln();
        let esb = -x_late.ln();
        // Inner factor of C_{c1r2}: alpha - m xi chi, with xi chi peaking
        // at kappa t = ln 2.
        let inner = |kt: f64| {
            let x = (-kt).exp();
            alpha - m * (x * (1.0 - x)).max(0.0).sqrt()
        };
        if disc_sq > 1e-9 {
            let verify_esd = bisect(inner, 0.0, 2f64.ln())?;
            let verify_esb = bisect(inner, 2f64.ln(), 2.0 * EVENT_HORIZON)?;
            for (name, formula, verified) in
                [("esd_c1r2", esd, verify_esd), ("esb_c1r2", esb, verify_esb)]
            {
                if (formula - verified).abs() > EVENT_TIME_TOL {
                    return Err(Error::InvariantViolation(format!(
                        "{name}: formula {formula} vs curve sign change {verified}"
                    )));
                }
            }
        } else {
            // Near the tangent the curve touches zero without a sign
            // change; verify the defining residual instead.
            for (name, kt) in [("esd_c1r2", esd), ("esb_c1r2", esb)] {
                let residual = inner(kt).abs();
                if residual > EVENT_TIME_TOL {
                    return Err(Error::InvariantViolation(format!(
                        "{name}: zero-equation residual {residual:.3e} at kt = {kt}"
                    )));
                }
            }
        }
        times.esd_c1r2 = Some(esd);
        times.esb_c1r2 = Some(esb);
    }
    Ok(times)
}

/// Rotation angles at which the evolution changes character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalAngles {
    /// Angle where the c1 r2 death/birth window collapses to a point:
    /// `2 arccos sqrt(2 alpha / beta)`.
    pub gamma_window: Option<f64>,
    /// Angle where the photon entanglement switches to asymptotic decay:
    /// `2 arccos sqrt(alpha / beta)`.
    pub gamma_route: Option<f64>,
}

/// Critical angles for the given amplitudes; absent when the arccos
/// argument exceeds one.
pub fn critical_angles(p: &EffectiveParams) -> Result<CriticalAngles> {
    let (alpha, beta) = (p.alpha(), p.beta());
    if beta <= 0.0 {
        return Err(Error::InvalidParameter(
            "critical angles require beta > 0".into(),
        ));
    }
    let angle = |ratio: f64| -> Option<f64> { (ratio <= 1.0).then(|| 2.0 * ratio.sqrt().acos()) };
    Ok(CriticalAngles {
        gamma_window: angle(2.0 * alpha / beta),
        gamma_route: angle(alpha / beta),
    })
}

/// Interval on which every cross-pair concurrence vanishes simultaneously.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: f64,
    pub end: f64,
    pub width: f64,
}

/// The maximal interval (in `kappa t`) where all four cross-pair squared
/// concurrences are zero at once, computed as the intersection of the
/// c1c2/r1r2 dead stretch with the c1r2/c2r1 window. On it
/// `E_BB = 4 a^2 b^2`. Returns `None` when the intersection is empty.
pub fn plateau(p: &EffectiveParams) -> Result<Option<Plateau>> {
    let times = event_times(p)?;
    let (Some(esd_cc), Some(esb_rr)) = (times.esd_c1c2, times.esb_r1r2) else {
        return Ok(None);
    };
    let (Some(esd_cr), Some(esb_cr)) = (times.esd_c1r2, times.esb_c1r2) else {
        return Ok(None);
    };
    let start = esd_cc.max(esd_cr);
    let end = esb_rr.min(esb_cr);
    if end < start - 1e-12 {
        return Ok(None);
    }
    Ok(Some(Plateau {
        start,
        end,
        width: (end - start).max(0.0),
    }))
}

/// Predicate used by the numerical event search. The Wootters formula
/// clamps at zero, so dead stretches compute to exactly zero; any
/// positive threshold here would bias the located boundary by
/// sqrt(threshold) / slope.
fn is_zero(c2: f64) -> bool {
    c2 <= 0.0
}

/// Numerically locate the sudden death of `C_{c1c2}` and the sudden birth
/// of `C_{r1r2}` for an arbitrary initial state, by coarse scan plus
/// bisection on `[0, EVENT_HORIZON]` in `kappa t`.
///
/// Local dissipation cannot increase the photon entanglement, so the
/// c1c2 curve is non-increasing and its zero set is a single tail; the
/// r1r2 curve mirrors it. A detected boundary is accepted only if the
/// curve clears `ONSET_FLOOR` a distance `ONSET_PROBE` away from it;
/// shallower crossings sit below the noise floor of the decayed tail.
pub fn general_event_times(init: &GeneralInitialState, kappa: f64) -> Result<EventTimes> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} must be > 0"
        )));
    }
    // Work in dimensionless kappa t throughout, like event_times.
    let curve = |pair: (Qubit, Qubit)| {
        move |kt: f64| -> Result<f64> {
            let state = general_output_state(init, 1.0, kt)?;
            concurrence_squared_of_pair(&state, pair.0, pair.1)
        }
    };
    let cc = curve((Qubit::C1, Qubit::C2));
    let rr = curve((Qubit::R1, Qubit::R2));

    Ok(EventTimes {
        esd_c1c2: locate_boundary(&cc, Transition::PositiveToZero)?,
        esb_r1r2: locate_boundary(&rr, Transition::ZeroToPositive)?,
        esd_c1r2: None,
        esb_c1r2: None,
    })
}

enum Transition {
    PositiveToZero,
    ZeroToPositive,
}

fn locate_boundary<F: Fn(f64) -> Result<f64>>(
    curve: &F,
    transition: Transition,
) -> Result<Option<f64>> {
    const SCAN_STEP: f64 = 0.05;
    let n_steps = (EVENT_HORIZON / SCAN_STEP).round() as usize;

    let mut bracket = None;
    let mut prev_kt = 0.0;
    let mut prev_zero = is_zero(curve(0.0)?);
    for k in 1..=n_steps {
        let kt = k as f64 * SCAN_STEP;
        let zero = is_zero(curve(kt)?);
        let hit = match transition {
            Transition::PositiveToZero => !prev_zero && zero,
            Transition::ZeroToPositive => prev_zero && !zero,
        };
        if hit {
            bracket = Some((prev_kt, kt));
            break;
        }
        prev_kt = kt;
        prev_zero = zero;
    }
    let Some((lo, hi)) = bracket else {
        return Ok(None);
    };

    // Bisect on the zero predicate.
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..60 {
        if hi - lo <= EVENT_TIME_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let mid_zero = is_zero(curve(mid)?);
        let keep_low = match transition {
            Transition::PositiveToZero => !mid_zero,
            Transition::ZeroToPositive => mid_zero,
        };
        if keep_low {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let boundary = 0.5 * (lo + hi);

    // Reject boundaries that never rise above the noise floor.
    let probe_at = match transition {
        Transition::PositiveToZero => (boundary - ONSET_PROBE).max(0.0),
        Transition::ZeroToPositive => boundary + ONSET_PROBE,
    };
    let c2 = curve(probe_at)?;
    if c2.max(0.0).sqrt() < ONSET_FLOOR {
        return Ok(None);
    }
    Ok(Some(boundary))
}

/// Analytic curve values carried on every scan row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCurves {
    pub c2_c1c2: f64,
    pub c2_r1r2: f64,
    pub c2_c1r1: f64,
    pub c2_c2r2: f64,
    pub c2_c1r2: f64,
    pub e_bb: f64,
}

/// One grid point: oracle report and analytic curves, verified to agree.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub gamma: f64,
    pub kappa_t: f64,
    pub report: EntanglementReport,
    pub analytic: AnalyticCurves,
}

fn scan_point(p: &EffectiveParams, gamma: f64, t: f64) -> Result<ScanRow> {
    let pg = p.with_gamma(gamma)?;
    let state = effective_output_state(&pg, t)?;
    let report = full_report(&state)?;
    let analytic = AnalyticCurves {
        c2_c1c2: c2_c1c2(&pg, t)?,
        c2_r1r2: c2_r1r2(&pg, t)?,
        c2_c1r1: c2_c1r1(&pg, t)?,
        c2_c2r2: c2_c2r2(&pg, t)?,
        c2_c1r2: c2_c1r2(&pg, t)?,
        e_bb: e_bb_analytic(&pg, t)?,
    };
    let deviations = [
        ("c2_c1c2", analytic.c2_c1c2, report.c2_c1c2),
        ("c2_r1r2", analytic.c2_r1r2, report.c2_r1r2),
        ("c2_c1r1", analytic.c2_c1r1, report.c2_c1r1),
        ("c2_c2r2", analytic.c2_c2r2, report.c2_c2r2),
        ("c2_c1r2", analytic.c2_c1r2, report.c2_c1r2),
        ("c2_c2r1", analytic.c2_c1r2, report.c2_c2r1),
        ("e_bb", analytic.e_bb, report.e_bb),
    ];
    for (name, a, o) in deviations {
        if (a - o).abs() > ORACLE_TOL {
            return Err(Error::InvariantViolation(format!(
                "analytic {name} = {a:.15e} deviates from oracle {o:.15e} at gamma = {gamma}, t = {t}"
            )));
        }
    }
    Ok(ScanRow {
        gamma,
        kappa_t: pg.kappa() * t,
        report,
        analytic,
    })
}

/// Sequential scan over the (gamma, t) grid, gamma-major row order.
/// This is the fallback path when the `parallel` feature is disabled and
/// the baseline the benchmark suite compares against.
pub fn scan_grid_seq(
    p: &EffectiveParams,
    t_values: &[f64],
    gamma_values: &[f64],
) -> Result<Vec<ScanRow>> {
    points(t_values, gamma_values)?
        .into_iter()
        .map(|(gamma, t)| scan_point(p, gamma, t))
        .collect()
}

/// Scan over the (gamma, t) grid, gamma-major row order. Rows are
/// independent and computed in parallel; the output ordering is
/// deterministic regardless of thread count.
#[cfg(feature = "parallel")]
pub fn scan_grid(
    p: &EffectiveParams,
    t_values: &[f64],
    gamma_values: &[f64],
) -> Result<Vec<ScanRow>> {
    use rayon::prelude::*;
    points(t_values, gamma_values)?
        .into_par_iter()
        .map(|(gamma, t)| scan_point(p, gamma, t))
        .collect()
}

/// Scan over the (gamma, t) grid, gamma-major row order.
#[cfg(not(feature = "parallel"))]
pub fn scan_grid(
    p: &EffectiveParams,
    t_values: &[f64],
    gamma_values: &[f64],
) -> Result<Vec<ScanRow>> {
    scan_grid_seq(p, t_values, gamma_values)
}

fn points(t_values: &[f64], gamma_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if t_values.is_empty() || gamma_values.is_empty() {
        return Err(Error::InvalidParameter("empty scan grid".into()));
    }
    let mut pts = Vec::with_capacity(t_values.len() * gamma_values.len());
    for &gamma in gamma_values {
        for &t in t_values {
            pts.push((gamma, t));
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference() -> EffectiveParams {
        EffectiveParams::reference_example()
    }

    #[test]
    fn c2_c1c2_initial_value_and_esd_onset() {
        let p = reference();
        assert_abs_diff_eq!(c2_c1c2(&p, 0.0).unwrap(), 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(c2_c1c2(&p, 1.5f64.ln()).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(c2_c1c2(&p, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn c2_c1c2_gamma_pi_is_asymptotic() {
        let p = reference().with_gamma(std::f64::consts::PI).unwrap();
        for t in [0.5f64, 2.0, 5.0] {
            let xi4 = (-t).exp().powi(2);
            assert_abs_diff_eq!(c2_c1c2(&p, t).unwrap(), 0.36 * xi4, epsilon = 1e-12);
            assert!(c2_c1c2(&p, t).unwrap() > 0.0);
        }
    }

    #[test]
    fn c2_r1r2_boundary_and_limits() {
        let p = reference();
        assert_eq!(c2_r1r2(&p, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(c2_r1r2(&p, 3f64.ln()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c2_r1r2(&p, 50.0).unwrap(), 0.36, epsilon = 1e-10);
    }

    #[test]
    fn c2_c1r1_peak_at_half_decay() {
        let p = reference();
        assert_abs_diff_eq!(c2_c1r1(&p, 2f64.ln()).unwrap(), 0.81, epsilon = 1e-12);
        assert_eq!(c2_c1r1(&p, 0.0).unwrap(), 0.0);
        // cos(gamma) = 0 leaves the bare xi^2 chi^2 factor.
        let p2 = reference().with_gamma(std::f64::consts::FRAC_PI_2).unwrap();
        let t = 0.7f64;
        let x = (-t).exp();
        assert_abs_diff_eq!(c2_c1r1(&p2, t).unwrap(), x * (1.0 - x), epsilon = 1e-12);
        // Maximum over t sits at kappa t = ln 2 for every gamma.
        for gamma in [0.0, 1.0, 2.0, 3.0] {
            let pg = reference().with_gamma(gamma).unwrap();
            let at_peak = c2_c1r1(&pg, 2f64.ln()).unwrap();
            for k in 1..=60 {
                assert!(c2_c1r1(&pg, 0.1 * k as f64).unwrap() <= at_peak + 1e-12);
            }
        }
    }

    #[test]
    fn c2_c2r2_is_gamma_independent() {
        let t = 2f64.ln();
        assert_abs_diff_eq!(c2_c2r2(&reference(), t).unwrap(), 0.81, epsilon = 1e-12);
        let expected = c2_c2r2(&reference(), 0.9).unwrap();
        for gamma in [0.0, 1.0, 2.0, std::f64::consts::PI] {
            let pg = reference().with_gamma(gamma).unwrap();
            assert_abs_diff_eq!(c2_c2r2(&pg, 0.9).unwrap(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn c2_c1r2_zero_window_endpoints() {
        let p = reference();
        let lo = (3.0 * (3.0 - 5f64.sqrt()) / 2.0).ln();
        let hi = (3.0 * (3.0 + 5f64.sqrt()) / 2.0).ln();
        assert_abs_diff_eq!(c2_c1r2(&p, lo).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c2_c1r2(&p, hi).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(c2_c1r2(&p, 0.5 * (lo + hi)).unwrap(), 0.0);
        assert!(c2_c1r2(&p, 0.5 * lo).unwrap() > 0.0);
        assert!(c2_c1r2(&p, hi + 0.5).unwrap() > 0.0);
        assert_eq!(c2_c1r2(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn c2_c1r2_positive_beyond_window_angle() {
        let gamma = 2.0 * (2.0f64 / 3.0).sqrt().acos() + 0.05;
        let p = reference().with_gamma(gamma).unwrap();
        for k in 1..=120 {
            assert!(c2_c1r2(&p, 0.05 * k as f64).unwrap() > 0.0);
        }
    }

    #[test]
    fn event_times_paper_values() {
        let times = event_times(&reference()).unwrap();
        assert_abs_diff_eq!(times.esd_c1c2.unwrap(), 1.5f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(times.esb_r1r2.unwrap(), 3f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(
            times.esd_c1r2.unwrap(),
            (3.0 * (3.0 - 5f64.sqrt()) / 2.0).ln(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            times.esb_c1r2.unwrap(),
            (3.0 * (3.0 + 5f64.sqrt()) / 2.0).ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn event_times_absent_past_route_angle() {
        let gamma = 2.0 * (1.0f64 / 3.0).sqrt().acos();
        let p = reference().with_gamma(gamma).unwrap();
        let times = event_times(&p).unwrap();
        assert!(times.esd_c1c2.is_none());
        assert!(times.esb_r1r2.is_none());
    }

    #[test]
    fn event_times_identity_between_esd_and_esb() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut found = 0;
        while found < 100 {
            let alpha: f64 = rng.random_range(0.05..0.7);
            let beta = (1.0 - alpha * alpha).sqrt();
            let gamma = rng.random_range(0.0..std::f64::consts::PI);
            let p = EffectiveParams::new(alpha, beta, gamma, 1.0).unwrap();
            let times = event_times(&p).unwrap();
            if let (Some(esd), Some(esb)) = (times.esd_c1c2, times.esb_r1r2) {
                let expected = -(1.0 - (-esd).exp()).ln();
                assert_abs_diff_eq!(esb, expected, epsilon = 1e-9);
                found += 1;
            }
        }
    }

    #[test]
    fn critical_angles_paper_values() {
        let angles = critical_angles(&reference()).unwrap();
        assert_abs_diff_eq!(angles.gamma_window.unwrap(), 1.23096, epsilon = 1e-4);
        assert_abs_diff_eq!(angles.gamma_route.unwrap(), 1.91063, epsilon = 1e-4);
        assert_abs_diff_eq!(
            angles.gamma_window.unwrap(),
            2.0 * (2.0f64 / 3.0).sqrt().acos(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            angles.gamma_route.unwrap(),
            2.0 * (1.0f64 / 3.0).sqrt().acos(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn critical_angles_equal_amplitudes() {
        let inv = 1.0 / 2f64.sqrt();
        let p = EffectiveParams::new(inv, inv, 0.0, 1.0).unwrap();
        let angles = critical_angles(&p).unwrap();
        assert_abs_diff_eq!(angles.gamma_route.unwrap(), 0.0, epsilon = 1e-12);
        // And indeed no ESD for any gamma > 0.
        let times = event_times(&p.with_gamma(0.3).unwrap()).unwrap();
        assert!(times.esd_c1c2.is_none());
    }

    #[test]
    fn plateau_paper_case() {
        let plat = plateau(&reference()).unwrap().unwrap();
        assert_abs_diff_eq!(plat.start, 1.5f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(plat.end, 3f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(plat.width, 2f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn plateau_collapses_at_window_angle() {
        let gamma = 2.0 * (2.0f64 / 3.0).sqrt().acos();
        let plat = plateau(&reference().with_gamma(gamma).unwrap())
            .unwrap()
            .unwrap();
        assert_abs_diff_eq!(plat.width, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(plat.start, 2f64.ln(), epsilon = 1e-7);
    }

    #[test]
    fn plateau_absent_beyond_window_angle() {
        let gamma = 2.0 * (2.0f64 / 3.0).sqrt().acos() + 0.1;
        assert!(plateau(&reference().with_gamma(gamma).unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn plateau_width_matches_printed_formula() {
        // t_w = ln(3 cos^2(gamma/2) - 1) for the reference amplitudes.
        let window = 2.0 * (2.0f64 / 3.0).sqrt().acos();
        for k in 0..20 {
            let gamma = window * k as f64 / 20.0;
            let plat = plateau(&reference().with_gamma(gamma).unwrap())
                .unwrap()
                .unwrap();
            let expected = (3.0 * cos_half_sq(gamma) - 1.0).ln();
            assert_abs_diff_eq!(plat.width, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn general_events_match_symmetric_specialization() {
        let init = GeneralInitialState::symmetric(reference().alpha(), reference().beta()).unwrap();
        let numeric = general_event_times(&init, 1.0).unwrap();
        let analytic = event_times(&reference()).unwrap();
        assert_abs_diff_eq!(
            numeric.esd_c1c2.unwrap(),
            analytic.esd_c1c2.unwrap(),
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            numeric.esb_r1r2.unwrap(),
            analytic.esb_r1r2.unwrap(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn general_events_flipped_state_relation() {
        use num_complex::Complex64;
        // sigma_x-flipped state beta|01> + alpha|10>.
        let init = GeneralInitialState::new([
            Complex64::ZERO,
            Complex64::new(reference().beta(), 0.0),
            Complex64::new(reference().alpha(), 0.0),
            Complex64::ZERO,
        ])
        .unwrap();
        let times = general_event_times(&init, 1.0).unwrap();
        if let (Some(esd), Some(esb)) = (times.esd_c1c2, times.esb_r1r2) {
            let expected = -(1.0 - (-esd).exp()).ln();
            assert_abs_diff_eq!(esb, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn general_events_absent_for_maximally_entangled() {
        use num_complex::Complex64;
        let inv = 1.0 / 2f64.sqrt();
        let init = GeneralInitialState::new([
            Complex64::new(inv, 0.0),
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(inv, 0.0),
        ])
        .unwrap();
        let times = general_event_times(&init, 1.0).unwrap();
        assert!(times.esd_c1c2.is_none());
    }

    #[test]
    fn scan_grid_ordering_and_oracle_agreement() {
        let p = reference();
        let ts: Vec<f64> = (0..=30).map(|k| 0.2 * k as f64).collect();
        let gammas = [0.0, 1.0, 2.0];
        let rows = scan_grid(&p, &ts, &gammas).unwrap();
        assert_eq!(rows.len(), ts.len() * gammas.len());
        // gamma-major, then t.
        assert_eq!(rows[0].gamma, 0.0);
        assert_eq!(rows[ts.len()].gamma, 1.0);
        assert!(rows[1].kappa_t > rows[0].kappa_t);
        // Monotone trends at gamma = 0.
        for w in rows[..ts.len()].windows(2) {
            assert!(w[1].report.c2_c1c2 <= w[0].report.c2_c1c2 + 1e-12);
            assert!(w[1].report.c2_r1r2 >= w[0].report.c2_r1r2 - 1e-12);
        }
        let seq = scan_grid_seq(&p, &ts, &gammas).unwrap();
        for (a, b) in rows.iter().zip(&seq) {
            assert_eq!(a.report, b.report);
        }
    }

    #[test]
    fn scan_grid_single_point() {
        let rows = scan_grid(&reference(), &[0.0], &[0.0]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].report.e_bb <= 1e-12);
    }

    #[test]
    fn scan_grid_rejects_empty() {
        assert!(scan_grid(&reference(), &[], &[0.0]).is_err());
    }
}
