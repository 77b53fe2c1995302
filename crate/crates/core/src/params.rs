//! Model parameters and exponent arithmetic for the focusing inhomogeneous
//! biharmonic NLS equation  i u_t + Δ²u − |x|^{−b} |u|^{2σ} u = 0  on ℝ^N.
//!
//! Every derived exponent is computed in exact rational arithmetic (finite
//! doubles are exact rationals), so regime classification and hypothesis
//! windows are reproducible and boundary hits are detected exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub type Rat = BigRational;

fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

fn rat_f(x: f64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite value {x}")));
    }
    Rat::from_f64(x).ok_or_else(|| Error::Domain(format!("cannot represent {x} as a rational")))
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational within f64 range")
}

/// An extended-real exponent: finite rational or +∞.
///
/// Upper endpoints such as 4* = (4−b)/(N−4) and 2* = 2N/(N−4) are +∞ for
/// N ≤ 4; comparisons against them must be total, never sentinel floats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rat),
    Infinity,
}

impl Exponent {
    pub fn finite(r: Rat) -> Self {
        Exponent::Finite(r)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => rat_to_f64(r),
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Exponent::Infinity, Exponent::Infinity) => Ordering::Equal,
            (Exponent::Infinity, _) => Ordering::Greater,
            (_, Exponent::Infinity) => Ordering::Less,
            (Exponent::Finite(a), Exponent::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{}", rat_to_f64(r)),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Model parameters (N, σ, b) with an optional Lᵖ interpolation exponent p.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    n: u32,
    sigma: f64,
    b: f64,
    p: Option<f64>,
}

impl ModelParams {
    /// Validates N ≥ 1, σ > 0 and 0 < b < min(N, 4).
    pub fn new(n: u32, sigma: f64, b: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("dimension N must be >= 1".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sigma must be a positive finite number, got {sigma}"
            )));
        }
        let bmax = (n as f64).min(4.0);
        if !(b.is_finite() && b > 0.0 && b < bmax) {
            return Err(Error::InvalidParams(format!(
                "b must satisfy 0 < b < min(N, 4) = {bmax}, got {b}"
            )));
        }
        Ok(ModelParams { n, sigma, b, p: None })
    }

    /// Same validation plus p ∈ [2, ∞).
    pub fn with_p(n: u32, sigma: f64, b: f64, p: f64) -> Result<Self> {
        let mut params = Self::new(n, sigma, b)?;
        if !(p.is_finite() && p >= 2.0) {
            return Err(Error::InvalidParams(format!("p must satisfy p >= 2, got {p}")));
        }
        params.p = Some(p);
        Ok(params)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn p(&self) -> Option<f64> {
        self.p
    }

    /// Copy of these parameters with p replaced.
    pub fn replacing_p(&self, p: f64) -> Result<Self> {
        Self::with_p(self.n, self.sigma, self.b, p)
    }
}

/// Exact derived exponents of the model.
#[derive(Debug, Clone)]
pub struct CriticalExponents {
    s_c: Rat,
    sigma_c: Rat,
    s_p: Option<Rat>,
    four_star: Exponent,
    two_star: Exponent,
}

impl CriticalExponents {
    pub fn s_c(&self) -> f64 {
        rat_to_f64(&self.s_c)
    }

    pub fn sigma_c(&self) -> f64 {
        rat_to_f64(&self.sigma_c)
    }

    pub fn s_p(&self) -> Option<f64> {
        self.s_p.as_ref().map(rat_to_f64)
    }

    pub fn four_star(&self) -> &Exponent {
        &self.four_star
    }

    pub fn two_star(&self) -> &Exponent {
        &self.two_star
    }

    pub fn s_c_exact(&self) -> &Rat {
        &self.s_c
    }

    pub fn sigma_c_exact(&self) -> &Rat {
        &self.sigma_c
    }

    pub fn s_p_exact(&self) -> Option<&Rat> {
        self.s_p.as_ref()
    }
}

/// Critical Sobolev index s_c = N/2 − (4−b)/(2σ), the critical Lebesgue
/// exponent σ_c = 2Nσ/(4−b), s_p = N/2 − N/p when p is present, and the
/// endpoints 4*, 2* (both +∞ for N ≤ 4).
pub fn derive_exponents(params: &ModelParams) -> Result<CriticalExponents> {
    let n = rat_i(params.n as i64);
    let sigma = rat_f(params.sigma)?;
    let b = rat_f(params.b)?;
    let four = rat_i(4);
    let two = rat_i(2);

    let four_minus_b = &four - &b;
    if !four_minus_b.is_positive() {
        return Err(Error::Domain("b >= 4 leaves sigma_c undefined".into()));
    }

    let s_c = &n / &two - &four_minus_b / (&two * &sigma);
    let sigma_c = &two * &n * &sigma / &four_minus_b;

    let s_p = match params.p {
        Some(p) => {
            let p = rat_f(p)?;
            if !p.is_positive() {
                return Err(Error::Domain("p must be positive".into()));
            }
            Some(&n / &two - &n / &p)
        }
        None => None,
    };

    let (four_star, two_star) = if params.n >= 5 {
        let n_minus_4 = &n - &four;
        (
            Exponent::finite(&four_minus_b / &n_minus_4),
            Exponent::finite(&two * &n / &n_minus_4),
        )
    } else {
        (Exponent::Infinity, Exponent::Infinity)
    };

    Ok(CriticalExponents { s_c, sigma_c, s_p, four_star, two_star })
}

/// Scaling-criticality regime, ordered by s_c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    MassSubcritical,
    MassCritical,
    Intercritical,
    EnergyCritical,
    EnergySupercritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::MassSubcritical => "mass-subcritical",
            Regime::MassCritical => "mass-critical",
            Regime::Intercritical => "intercritical",
            Regime::EnergyCritical => "energy-critical",
            Regime::EnergySupercritical => "energy-supercritical",
        };
        f.write_str(name)
    }
}

impl Regime {
    /// Classification from a floating s_c, with a 1e−12 criticality band.
    pub fn from_sc_f64(s_c: f64) -> Regime {
        const TOL: f64 = 1e-12;
        if s_c.abs() <= TOL {
            Regime::MassCritical
        } else if (s_c - 2.0).abs() <= TOL {
            Regime::EnergyCritical
        } else if s_c < 0.0 {
            Regime::MassSubcritical
        } else if s_c < 2.0 {
            Regime::Intercritical
        } else {
            Regime::EnergySupercritical
        }
    }
}

/// Exact classification by the sign of s_c and of s_c − 2.
pub fn classify_regime(exponents: &CriticalExponents) -> Regime {
    let two = rat_i(2);
    if exponents.s_c.is_negative() {
        Regime::MassSubcritical
    } else if exponents.s_c.is_zero() {
        Regime::MassCritical
    } else if exponents.s_c < two {
        Regime::Intercritical
    } else if exponents.s_c == two {
        Regime::EnergyCritical
    } else {
        Regime::EnergySupercritical
    }
}

/// The hypothesis windows of the statements implemented by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisWindow {
    /// Local theory in H²: N ≥ 5, 0 < b < min(N/2, 4), max((4−b)/N, 1/2) < σ < 4*.
    LocalWellPosedness,
    /// H² global-existence window: N ≥ 3, 0 < b < min(N/2, 4), max(0, (1−b)/N) < σ < 4*.
    H2GlobalExistence,
    /// Sharp Gagliardo–Nirenberg family: N ≥ 1, 0 < b < min(N, 4), 0 < σ < 4*,
    /// 2 ≤ p < (2σ+2)N/(N−b).
    GagliardoNirenberg,
    /// Global-existence threshold: N ≥ 3, 0 < b < min(N/2, 4), (4−b)/N < σ < 4*.
    GlobalThreshold,
    /// Uniform critical-norm bound: N ≥ 5, 0 < b < min(N/2, 4),
    /// max((4−b)/N, 1/2) < σ < (4−b)/(N−4).
    CriticalNormBound,
    /// Critical-norm sharp inequality: N ≥ 1, 0 < b < 4, (4−b)/N < σ < 4*.
    GagliardoNirenbergCritical,
}

impl fmt::Display for HypothesisWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            HypothesisWindow::LocalWellPosedness => "local-well-posedness",
            HypothesisWindow::H2GlobalExistence => "h2-global-existence",
            HypothesisWindow::GagliardoNirenberg => "gagliardo-nirenberg",
            HypothesisWindow::GlobalThreshold => "global-threshold",
            HypothesisWindow::CriticalNormBound => "critical-norm-bound",
            HypothesisWindow::GagliardoNirenbergCritical => "gagliardo-nirenberg-critical",
        };
        f.write_str(name)
    }
}

/// Status of a single hypothesis check. Windows use strict inequalities, so
/// an exact endpoint hit is reported as `Boundary` and does not satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Satisfied,
    Boundary,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub condition: String,
    pub status: CheckStatus,
    pub satisfied: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub window: HypothesisWindow,
    pub checks: Vec<HypothesisCheck>,
    pub all_satisfied: bool,
}

impl HypothesisReport {
    fn push(&mut self, condition: String, status: CheckStatus) {
        self.checks.push(HypothesisCheck {
            condition,
            status,
            satisfied: status == CheckStatus::Satisfied,
        });
    }
}

fn strict_less(lhs: &Rat, rhs: &Exponent) -> CheckStatus {
    match rhs {
        Exponent::Infinity => CheckStatus::Satisfied,
        Exponent::Finite(r) => match lhs.cmp(r) {
            Ordering::Less => CheckStatus::Satisfied,
            Ordering::Equal => CheckStatus::Boundary,
            Ordering::Greater => CheckStatus::Violated,
        },
    }
}

fn strict_greater(lhs: &Rat, rhs: &Rat) -> CheckStatus {
    match lhs.cmp(rhs) {
        Ordering::Greater => CheckStatus::Satisfied,
        Ordering::Equal => CheckStatus::Boundary,
        Ordering::Less => CheckStatus::Violated,
    }
}

fn inclusive_geq(lhs: &Rat, rhs: &Rat) -> CheckStatus {
    if lhs >= rhs {
        CheckStatus::Satisfied
    } else {
        CheckStatus::Violated
    }
}

/// Checks the strict hypothesis window of one statement against the
/// parameters. Every atomic comparison is evaluated in exact rational
/// arithmetic; endpoint hits are reported as `boundary`.
pub fn validate_hypotheses(params: &ModelParams, window: HypothesisWindow) -> Result<HypothesisReport> {
    let n_u = params.n;
    let n = rat_i(n_u as i64);
    let sigma = rat_f(params.sigma)?;
    let b = rat_f(params.b)?;
    let four = rat_i(4);
    let two = rat_i(2);
    let zero = rat_i(0);
    let half = Rat::new(BigInt::from(1), BigInt::from(2));

    let four_minus_b = &four - &b;
    let four_star: Exponent = if n_u >= 5 {
        Exponent::finite(&four_minus_b / (&n - &four))
    } else {
        Exponent::Infinity
    };

    let mut report = HypothesisReport { window, checks: Vec::new(), all_satisfied: true };

    let n_min = |k: i64| -> CheckStatus {
        inclusive_geq(&n, &rat_i(k))
    };

    // 0 < b < cap, cap given as an exact rational
    let b_window = |report: &mut HypothesisReport, cap: Rat, cap_text: &str| {
        report.push(format!("b > 0 (b = {})", params.b), strict_greater(&b, &zero));
        report.push(
            format!("b < {} = {} (b = {})", cap_text, rat_to_f64(&cap), params.b),
            strict_less(&b, &Exponent::finite(cap)),
        );
    };

    match window {
        HypothesisWindow::LocalWellPosedness | HypothesisWindow::CriticalNormBound => {
            report.push(format!("N >= 5 (N = {n_u})"), n_min(5));
            let cap = (&n / &two).min(four.clone());
            b_window(&mut report, cap, "min(N/2, 4)");
            let lower = (&four_minus_b / &n).max(half.clone());
            report.push(
                format!("sigma > max((4-b)/N, 1/2) = {} (sigma = {})", rat_to_f64(&lower), params.sigma),
                strict_greater(&sigma, &lower),
            );
            let upper = if window == HypothesisWindow::CriticalNormBound && n_u >= 5 {
                Exponent::finite(&four_minus_b / (&n - &four))
            } else {
                four_star.clone()
            };
            let upper_text = if window == HypothesisWindow::CriticalNormBound {
                "(4-b)/(N-4)"
            } else {
                "4*"
            };
            report.push(
                format!("sigma < {} = {} (sigma = {})", upper_text, upper, params.sigma),
                strict_less(&sigma, &upper),
            );
        }
        HypothesisWindow::H2GlobalExistence => {
            report.push(format!("N >= 3 (N = {n_u})"), n_min(3));
            let cap = (&n / &two).min(four.clone());
            b_window(&mut report, cap, "min(N/2, 4)");
            let lower = ((rat_i(1) - &b) / &n).max(zero.clone());
            report.push(
                format!("sigma > max(0, (1-b)/N) = {} (sigma = {})", rat_to_f64(&lower), params.sigma),
                strict_greater(&sigma, &lower),
            );
            report.push(
                format!("sigma < 4* = {} (sigma = {})", four_star, params.sigma),
                strict_less(&sigma, &four_star),
            );
        }
        HypothesisWindow::GagliardoNirenberg => {
            report.push(format!("N >= 1 (N = {n_u})"), n_min(1));
            let cap = n.clone().min(four.clone());
            b_window(&mut report, cap, "min(N, 4)");
            report.push(
                format!("sigma > 0 (sigma = {})", params.sigma),
                strict_greater(&sigma, &zero),
            );
            report.push(
                format!("sigma < 4* = {} (sigma = {})", four_star, params.sigma),
                strict_less(&sigma, &four_star),
            );
            match params.p {
                Some(pv) => {
                    let p = rat_f(pv)?;
                    report.push(format!("p >= 2 (p = {pv})"), inclusive_geq(&p, &two));
                    let p_cap = (&two * &sigma + &two) * &n / (&n - &b);
                    report.push(
                        format!("p < (2sigma+2)N/(N-b) = {} (p = {pv})", rat_to_f64(&p_cap)),
                        strict_less(&p, &Exponent::finite(p_cap)),
                    );
                }
                None => {
                    report.push("p present".into(), CheckStatus::Violated);
                }
            }
        }
        HypothesisWindow::GlobalThreshold => {
            report.push(format!("N >= 3 (N = {n_u})"), n_min(3));
            let cap = (&n / &two).min(four.clone());
            b_window(&mut report, cap, "min(N/2, 4)");
            let lower = &four_minus_b / &n;
            report.push(
                format!("sigma > (4-b)/N = {} (sigma = {})", rat_to_f64(&lower), params.sigma),
                strict_greater(&sigma, &lower),
            );
            report.push(
                format!("sigma < 4* = {} (sigma = {})", four_star, params.sigma),
                strict_less(&sigma, &four_star),
            );
        }
        HypothesisWindow::GagliardoNirenbergCritical => {
            report.push(format!("N >= 1 (N = {n_u})"), n_min(1));
            b_window(&mut report, four.clone(), "4");
            let lower = &four_minus_b / &n;
            report.push(
                format!("sigma > (4-b)/N = {} (sigma = {})", rat_to_f64(&lower), params.sigma),
                strict_greater(&sigma, &lower),
            );
            report.push(
                format!("sigma < 4* = {} (sigma = {})", four_star, params.sigma),
                strict_less(&sigma, &four_star),
            );
        }
    }

    report.all_satisfied = report.checks.iter().all(|c| c.satisfied);
    Ok(report)
}

/// Verdict of the admissible-pair scaling check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdmissibleVerdict {
    /// 4/q = N/2 − N/r with r ∈ [2, 2N/(N−4)) for N ≥ 5, r ∈ [2, ∞) otherwise.
    BAdmissible,
    /// 4/q = N/2 − N/r − s with r ∈ [2N/(N−2s), 2N/(N−4)) for N ≥ 5,
    /// r ∈ [2, ∞) for N ≤ 4.
    HsAdmissible,
    Neither,
}

impl fmt::Display for AdmissibleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AdmissibleVerdict::BAdmissible => "B-admissible",
            AdmissibleVerdict::HsAdmissible => "Hs-admissible",
            AdmissibleVerdict::Neither => "neither",
        };
        f.write_str(name)
    }
}

/// Classifies a space-time pair (q, r) at regularity s in dimension N.
/// q = ∞ is accepted (4/q = 0). The scaling identity is tested to 1e−12;
/// the B-admissible verdict takes precedence when both relations hold.
pub fn check_admissible_pair(q: f64, r: f64, s: f64, n: u32) -> AdmissibleVerdict {
    const TOL: f64 = 1e-12;
    if q.is_nan() || r.is_nan() || s.is_nan() || r < 1.0 || q < 1.0 {
        return AdmissibleVerdict::Neither;
    }
    let nf = n as f64;
    let four_over_q = if q.is_infinite() { 0.0 } else { 4.0 / q };
    let r_upper = if n >= 5 { 2.0 * nf / (nf - 4.0) } else { f64::INFINITY };

    let b_scaling = (four_over_q - (nf / 2.0 - nf / r)).abs() <= TOL;
    let b_range = r >= 2.0 && r < r_upper;
    if b_scaling && b_range {
        return AdmissibleVerdict::BAdmissible;
    }

    let hs_scaling = (four_over_q - (nf / 2.0 - nf / r - s)).abs() <= TOL;
    let hs_range = if n >= 5 {
        if nf - 2.0 * s <= 0.0 {
            false
        } else {
            r >= 2.0 * nf / (nf - 2.0 * s) && r < r_upper
        }
    } else {
        r >= 2.0 && r < r_upper
    };
    if hs_scaling && hs_range {
        return AdmissibleVerdict::HsAdmissible;
    }

    AdmissibleVerdict::Neither
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exps(n: u32, sigma: f64, b: f64) -> CriticalExponents {
        derive_exponents(&ModelParams::new(n, sigma, b).unwrap()).unwrap()
    }

    #[test]
    fn exponents_at_reference_points() {
        let e = exps(5, 1.0, 1.0);
        assert_eq!(e.s_c(), 1.0);
        assert!((e.sigma_c() - 10.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.four_star().as_f64(), 3.0);
        assert_eq!(e.two_star().as_f64(), 10.0);

        let e = exps(3, 2.0, 1.0);
        assert_eq!(e.s_c(), 0.75);
        assert_eq!(e.sigma_c(), 4.0);
        assert!(e.four_star().is_infinite());
        assert!(e.two_star().is_infinite());

        let e = derive_exponents(&ModelParams::with_p(3, 2.0, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(e.s_p(), Some(0.0));
        let e = derive_exponents(&ModelParams::with_p(3, 2.0, 1.0, 4.0).unwrap()).unwrap();
        assert_eq!(e.s_p(), Some(0.75));
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(ModelParams::new(3, 1.0, 3.0).is_err()); // b >= min(N,4)
        assert!(ModelParams::new(3, 0.0, 1.0).is_err());
        assert!(ModelParams::new(3, -1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1.0, 0.0).is_err());
        assert!(ModelParams::with_p(3, 1.0, 1.0, 1.5).is_err());
        assert!(ModelParams::new(6, 1.0, 4.0).is_err()); // b >= 4
    }

    #[test]
    fn regimes_split_by_sc() {
        assert_eq!(classify_regime(&exps(3, 1.0, 0.5)), Regime::MassSubcritical); // s_c = -1/4
        assert_eq!(classify_regime(&exps(3, 1.0, 1.0)), Regime::MassCritical); // s_c = 0
        assert_eq!(classify_regime(&exps(5, 1.0, 1.0)), Regime::Intercritical); // s_c = 1
        assert_eq!(classify_regime(&exps(6, 1.0, 2.0)), Regime::EnergyCritical); // s_c = 2
        assert_eq!(classify_regime(&exps(8, 2.0, 1.0)), Regime::EnergySupercritical);
        assert_eq!(Regime::from_sc_f64(5e-13), Regime::MassCritical);
        assert_eq!(Regime::from_sc_f64(2.0 - 5e-13), Regime::EnergyCritical);
    }

    #[test]
    fn hypothesis_windows_at_reference_points() {
        let p = ModelParams::new(5, 1.0, 1.0).unwrap();
        let r = validate_hypotheses(&p, HypothesisWindow::LocalWellPosedness).unwrap();
        assert!(r.all_satisfied, "{r:?}");

        // sigma below max((4-b)/N, 1/2) = 0.6
        let p = ModelParams::new(5, 0.55, 1.0).unwrap();
        let r = validate_hypotheses(&p, HypothesisWindow::LocalWellPosedness).unwrap();
        assert!(!r.all_satisfied);

        let p = ModelParams::with_p(3, 1.0, 1.0, 2.0).unwrap();
        let r = validate_hypotheses(&p, HypothesisWindow::GagliardoNirenberg).unwrap();
        assert!(r.all_satisfied, "{r:?}");

        // endpoint sigma = (4-b)/N exactly: boundary, not satisfied
        let p = ModelParams::new(3, 1.0, 1.0).unwrap();
        let r = validate_hypotheses(&p, HypothesisWindow::GlobalThreshold).unwrap();
        assert!(!r.all_satisfied);
        assert!(r.checks.iter().any(|c| c.status == CheckStatus::Boundary));

        let p = ModelParams::new(3, 2.0, 1.0).unwrap();
        assert!(validate_hypotheses(&p, HypothesisWindow::GlobalThreshold).unwrap().all_satisfied);
        assert!(validate_hypotheses(&p, HypothesisWindow::GagliardoNirenbergCritical)
            .unwrap()
            .all_satisfied);
    }

    #[test]
    fn admissible_pair_reference_cases() {
        // (q, r) = (2(N+4-2b)/(N-4), 2N(N+4-2b)/(N^2-2bN+16)) at N = 5, b = 1
        let v = check_admissible_pair(14.0, 70.0 / 31.0, 0.0, 5);
        assert_eq!(v, AdmissibleVerdict::BAdmissible);
        // endpoint r = 2, q = inf
        assert_eq!(check_admissible_pair(f64::INFINITY, 2.0, 0.0, 5), AdmissibleVerdict::BAdmissible);
        // Hs pair in N = 5 at s = 1: r = 2N/(N-2s) = 10/3, q from 4/q = 5/2 - 3/2 - 1 = 0
        assert_eq!(check_admissible_pair(f64::INFINITY, 10.0 / 3.0, 1.0, 5), AdmissibleVerdict::HsAdmissible);
        // broken scaling
        assert_eq!(check_admissible_pair(14.0, 2.3, 0.0, 5), AdmissibleVerdict::Neither);
        // r outside [2, 2N/(N-4))
        assert_eq!(check_admissible_pair(2.0, 10.0, 0.0, 5), AdmissibleVerdict::Neither);
    }
}
