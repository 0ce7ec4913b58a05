//! Anomaly-cancellation solver: given the torsion differential and the
//! curvature traces, decide whether `dT = (alpha'/4)(tr O^O - tr O^A^O^A)`
//! has a constant solution and classify its sign.

use crate::connection::{bismut, curvature, levi_civita, trace_four_form, BracketTable, CurvatureData};
use crate::error::Error;
use crate::family::{FamilyId, FamilyPoint};
use crate::form::{Basis, Form};
use crate::frame::AdaptedFrame;
use crate::hermitian::{adapted_frame, torsion_and_dt, HermitianMetric};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// Instanton models available for the right-hand side of the anomaly
/// equation. The abelian torus-bundle model is represented purely by its
/// declared trace 4-form `-1/2 dz1^dz2^d~z1^d~z2` (with `dz1, dz2` the flat
/// coframe of the torus-bundle base) and an externally asserted
/// Hermitian-Yang-Mills flag.
#[derive(Clone, Debug)]
pub enum InstantonModel {
    Flat,
    AbelianCcdlmz,
    ExplicitTrace(Form),
}

impl InstantonModel {
    pub fn name(&self) -> &'static str {
        match self {
            InstantonModel::Flat => "flat",
            InstantonModel::AbelianCcdlmz => "ccdlmz",
            InstantonModel::ExplicitTrace(_) => "explicit",
        }
    }

    /// Whether the model satisfies the Hermitian-Yang-Mills condition: the
    /// flat model trivially does, the abelian model by external assertion
    /// (its defining function is non-invariant and only its trace is used),
    /// and explicit traces make no claim.
    pub fn hym_asserted(&self) -> Option<bool> {
        match self {
            InstantonModel::Flat => Some(true),
            InstantonModel::AbelianCcdlmz => Some(true),
            InstantonModel::ExplicitTrace(_) => None,
        }
    }
}

/// The reference (2,2)-monomial `w1^~w1^w2^~w2`.
pub fn canonical_four_form() -> Form {
    Form::monomial(Scalar::one(), &[0, 3, 1, 4], Basis::Complex)
}

/// Coefficient `c` with `f = c * w1^~w1^w2^~w2`; `None` when `f` is not a
/// multiple of that monomial.
pub fn four_form_coefficient(f: &Form) -> Option<Scalar> {
    let reference = canonical_four_form();
    let mask = reference.terms().next().expect("monomial").0;
    let unit = reference.coefficient(mask);
    let c = &f.coefficient(mask) / &unit;
    let diff = f.sub(&reference.scale(&c)).ok()?;
    diff.is_zero_tol(DEFAULT_TOL).then_some(c)
}

/// Instanton curvature trace on a family point, as a 4-form over the
/// family's canonical coframe.
pub fn instanton_trace(model: &InstantonModel, point: &FamilyPoint) -> Result<Form, Error> {
    match model {
        InstantonModel::Flat => Ok(Form::zero(4, Basis::Complex)),
        InstantonModel::ExplicitTrace(f) => Ok(f.clone()),
        InstantonModel::AbelianCcdlmz => {
            // tr = -1/2 dz1^dz2^d~z1^d~z2 with the declared bundle coframe:
            // dz1 = w1, dz2 = s w2 on X^s; dz1 = n1, dz2 = |t| n2 on the
            // torus-bundle disk (t != 0). Both give (scale/2) w1~w1 w2~w2.
            let scale = match point.id {
                FamilyId::Xs => {
                    let s = point.s.clone().expect("Xs has s");
                    &s * &s
                }
                FamilyId::H4Disk => {
                    let t = point.t.clone().expect("H4Disk has t");
                    if t.is_zero() {
                        return Err(Error::UnsupportedModel(
                            "torus-bundle coframe degenerates at t = 0".into(),
                        ));
                    }
                    &t * &t.conj()
                }
                other => {
                    return Err(Error::UnsupportedModel(format!(
                        "no declared torus-bundle coframe on family `{}`",
                        other.name()
                    )))
                }
            };
            Ok(canonical_four_form().scale(&(&scale * &Scalar::ratio(1, 2))))
        }
    }
}

/// Verdict of the anomaly solve.
#[derive(Clone, Debug)]
pub enum AlphaResult {
    /// `dT = (alpha/4) P` exactly.
    Proportional(Scalar),
    /// `P = 0` and `dT = 0`: every constant solves the equation.
    Indeterminate,
    /// `P = 0` but `dT != 0`: no constant solves the equation.
    NoSolution,
    /// `dT` is not a multiple of `P`; carries the least-squares slope and
    /// the residual `dT - (alpha/4) P`.
    NotProportional { alpha_hat: Scalar, residual: Form },
}

impl AlphaResult {
    pub fn alpha(&self) -> Option<&Scalar> {
        match self {
            AlphaResult::Proportional(a) => Some(a),
            _ => None,
        }
    }
}

/// Solves `dT = (alpha/4) (tr_bismut - tr_instanton)` for a constant alpha
/// by componentwise proportionality.
pub fn solve_alpha(dt: &Form, tr_bismut: &Form, tr_instanton: &Form) -> Result<AlphaResult, Error> {
    let p = tr_bismut.sub(tr_instanton)?;
    if p.is_zero_tol(DEFAULT_TOL) {
        return Ok(if dt.is_zero_tol(DEFAULT_TOL) {
            AlphaResult::Indeterminate
        } else {
            AlphaResult::NoSolution
        });
    }
    // lambda from the largest coefficient of P, then verified globally
    let (pivot_mask, pivot) = p
        .terms()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
        .map(|(m, c)| (m, c.clone()))
        .expect("P nonzero");
    let lambda = &dt.coefficient(pivot_mask) / &pivot;
    let exact_inputs = dt.terms().all(|(_, c)| c.is_exact()) && p.terms().all(|(_, c)| c.is_exact());
    let tol = if exact_inputs { 0.0 } else { 1e-9 * (1.0 + dt_scale(dt)) };
    let residual = dt.sub(&p.scale(&lambda))?;
    let ok = if exact_inputs { residual.is_zero() } else { residual.is_zero_tol(tol) };
    if ok && lambda.is_real(DEFAULT_TOL) {
        // drop the negligible imaginary residue of approximate solves
        return Ok(AlphaResult::Proportional(&lambda.re_part() * &Scalar::from_int(4)));
    }
    // least-squares slope over the real parts of the coefficient pairing
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    let masks: std::collections::BTreeSet<u8> =
        dt.terms().map(|(m, _)| m).chain(p.terms().map(|(m, _)| m)).collect();
    for m in masks {
        let (dr, di) = dt.coefficient(m).to_f64();
        let (pr, pi) = p.coefficient(m).to_f64();
        num += dr * pr + di * pi;
        den += pr * pr + pi * pi;
    }
    let lam_hat = Scalar::approx(num / den, 0.0);
    let residual = dt.sub(&p.scale(&lam_hat))?;
    Ok(AlphaResult::NotProportional {
        alpha_hat: &lam_hat * &Scalar::from_int(4),
        residual,
    })
}

fn dt_scale(f: &Form) -> f64 {
    f.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
}

/// Everything the anomaly equation needs from the gravitational side of a
/// family point: torsion, its differential, the curvature of the metric
/// connection with skew torsion, and the trace 4-form (in both coframes).
#[derive(Clone, Debug)]
pub struct GravitationalData {
    pub frame: AdaptedFrame,
    pub torsion: Form,
    pub d_torsion: Form,
    pub d_torsion_real: Form,
    pub curvature: CurvatureData,
    pub trace: Form,
    pub trace_real: Form,
}

/// Runs the full pipeline: adapted frame, torsion `T = J dF`, brackets,
/// Levi-Civita, skew-torsion connection, Cartan curvature, trace.
pub fn gravitational_data(
    spec: &crate::structure::StructureSpec,
    metric: &HermitianMetric,
) -> Result<GravitationalData, Error> {
    let frame = adapted_frame(spec, metric)?;
    let f = metric.fundamental_form();
    let (t, dt) = torsion_and_dt(spec, &f)?;
    let t_real = frame.to_real(&t);
    let brackets = BracketTable::from_frame(&frame);
    let lc = levi_civita(&brackets);
    let conn = bismut(&lc, &t_real)?;
    let curv = curvature(&conn, &frame);
    let trace_real = trace_four_form(&curv);
    let trace = frame.to_complex(&trace_real);
    let d_torsion_real = frame.to_real(&dt);
    Ok(GravitationalData {
        frame,
        torsion: t,
        d_torsion: dt,
        d_torsion_real,
        curvature: curv,
        trace,
        trace_real,
    })
}

/// Critical value of `r^4` at which the anomaly right-hand side changes
/// sign for the family's `r`-scaled metrics, with straddling verification.
#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub critical_r4: Scalar,
    pub sign_below: i32,
    pub sign_above: i32,
    /// `(r, alpha)` at verified rational points on each side.
    pub samples: Vec<(Scalar, Scalar)>,
}

/// For the metric families `diag(1, s^2, r^2)` (on `X^s`) and
/// `diag(1, |t|^2, r^2)` (on the torus-bundle disk) with the abelian
/// instanton: both `dT` and the gravitational trace scale as `r^2` and `r^4`
/// while the instanton trace is `r`-independent, so the slope denominator
/// vanishes at exactly one `r^4 > 0`.
pub fn alpha_sign_threshold(
    point: &FamilyPoint,
    model: &InstantonModel,
) -> Result<ThresholdReport, Error> {
    if !matches!(model, InstantonModel::AbelianCcdlmz) {
        return Err(Error::UnsupportedModel(
            "sign thresholds only arise for the abelian instanton".into(),
        ));
    }
    if !matches!(point.id, FamilyId::Xs | FamilyId::H4Disk) {
        return Err(Error::UnsupportedModel(format!(
            "no r-scaled metric family on `{}`",
            point.id.name()
        )));
    }
    // gravitational trace at r = 1 (trace scales exactly as r^4)
    let unit_point = FamilyPoint { r: Scalar::one(), ..point.clone() };
    let metric = unit_point.standard_metric()?;
    let data = gravitational_data(&unit_point.spec, &metric)?;
    let grav_unit = four_form_coefficient(&data.trace)
        .ok_or_else(|| Error::DomainError("trace is not a multiple of w1~w1w2~w2".into()))?;
    let inst = four_form_coefficient(&instanton_trace(model, point)?)
        .ok_or_else(|| Error::DomainError("instanton trace shape".into()))?;
    let critical_r4 = &inst / &grav_unit;
    if critical_r4.real_sign(DEFAULT_TOL)? <= 0 {
        return Err(Error::DomainError("no positive critical r^4".into()));
    }

    // rational r straddling the threshold
    let target = critical_r4.to_f64().0.powf(0.25);
    let rational_near = |x: f64| -> Scalar {
        let denom = 4096i64;
        Scalar::ratio((x * denom as f64).round() as i64, denom)
    };
    let mut r_lo = rational_near(target * 0.9);
    while !r_lo.is_zero()
        && (&r_lo.powi(4).unwrap() - &critical_r4).real_sign(DEFAULT_TOL)? >= 0
    {
        r_lo = &r_lo * &Scalar::ratio(9, 10);
    }
    if r_lo.is_zero() {
        r_lo = Scalar::ratio(1, 4096);
    }
    let mut r_hi = rational_near(target * 1.1);
    while (&r_hi.powi(4).unwrap() - &critical_r4).real_sign(DEFAULT_TOL)? <= 0 {
        r_hi = &r_hi * &Scalar::ratio(11, 10);
    }

    let mut samples = Vec::new();
    let mut signs = Vec::new();
    for r in [r_lo, r_hi] {
        let sampled = FamilyPoint { r: r.clone(), ..point.clone() };
        let metric = sampled.standard_metric()?;
        let data = gravitational_data(&sampled.spec, &metric)?;
        let inst_form = instanton_trace(model, &sampled)?;
        match solve_alpha(&data.d_torsion, &data.trace, &inst_form)? {
            AlphaResult::Proportional(alpha) => {
                signs.push(alpha.real_sign(DEFAULT_TOL)?);
                samples.push((r, alpha));
            }
            other => {
                return Err(Error::DomainError(format!(
                    "expected a proportional solve at r = {r}, got {other:?}"
                )))
            }
        }
    }
    Ok(ThresholdReport {
        critical_r4,
        sign_below: signs[0],
        sign_above: signs[1],
        samples,
    })
}
