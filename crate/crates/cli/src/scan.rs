//! Parameter-grid sweeps: one row per grid point with the integrability
//! residual, balanced verdict, disk coefficient D(t), and the slope
//! parameter for the requested instanton model. Rows are emitted in a fixed
//! deterministic order; domain errors flag the row instead of aborting.

use anyhow::{anyhow, Result};
use serde::Serialize;
use strominger_core::anomaly::{
    gravitational_data, instanton_trace, solve_alpha, AlphaResult,
    InstantonModel,
};
use strominger_core::family::{
    build_family_point, coefficients_h5, xs_spec, FamilyId, FamilyParams,
};
use strominger_core::feasibility::normal_form_balanced_h5;
use strominger_core::hermitian::{is_balanced, HermitianMetric};
use strominger_core::structure::{deform, DeformationParams};
use strominger_core::{Scalar, StructureSpec, DEFAULT_TOL};

use crate::report::{fmt_scalar, sign_string};
use crate::scenarios::EvalMode;

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScanRow {
    pub family: String,
    pub s: String,
    pub t: String,
    pub abs_t: String,
    pub r: String,
    pub instanton: String,
    pub integrable: String,
    pub residual: String,
    pub balanced: String,
    #[serde(rename = "D")]
    pub d_coeff: String,
    pub alpha: String,
    pub alpha_sign: String,
    pub note: String,
}

pub const CSV_HEADER: &str =
    "family,s,t,abs_t,r,instanton,integrable,residual,balanced,D,alpha,alpha_sign,note";

fn alpha_of(
    spec: &StructureSpec,
    metric: &HermitianMetric,
    model: &InstantonModel,
    point: &strominger_core::family::FamilyPoint,
    mode: EvalMode,
    row: &mut ScanRow,
) -> Result<()> {
    let (spec_eval, metric_eval) = if mode.is_approx() {
        (spec.to_approx(), metric.to_approx())
    } else {
        (spec.clone(), metric.clone())
    };
    let data = gravitational_data(&spec_eval, &metric_eval)?;
    let inst = match instanton_trace(model, point) {
        Ok(f) => f,
        Err(e) => {
            row.note = e.to_string();
            return Ok(());
        }
    };
    match solve_alpha(&data.d_torsion, &data.trace, &inst)? {
        AlphaResult::Proportional(a) => {
            row.alpha = fmt_scalar(&a);
            row.alpha_sign = sign_string(a.real_sign(DEFAULT_TOL).unwrap_or(0));
        }
        AlphaResult::Indeterminate => row.alpha = "indeterminate".into(),
        AlphaResult::NoSolution => row.alpha = "no-solution".into(),
        AlphaResult::NotProportional { .. } => row.alpha = "not-proportional".into(),
    }
    Ok(())
}

/// Builds the rows for a family sweep. `grid` controls the number of sampled
/// points (an NxN grid on the disk family, N radial samples on the
/// torus-bundle family, a single row elsewhere). `grid = 0` gives an empty
/// table.
pub fn scan(
    family: &str,
    s: Option<Scalar>,
    r: Option<Scalar>,
    model: &InstantonModel,
    grid: usize,
    mode: EvalMode,
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    if grid == 0 {
        return Ok(rows);
    }
    let r = r.unwrap_or_else(Scalar::one);
    match family {
        "h5-disk" => {
            let s = s.ok_or_else(|| anyhow!("--s is required for the disk family"))?;
            let s2 = &s * &s;
            let half = (grid as i64 - 1) / 2;
            let denom = grid as i64;
            for p in -half..=half {
                for q in -half..=half {
                    let t = &(&s2 * &Scalar::ratio(p, denom))
                        + &(&Scalar::i() * &(&s2 * &Scalar::ratio(q, denom)));
                    let mut row = ScanRow {
                        family: family.into(),
                        s: fmt_scalar(&s),
                        t: fmt_scalar(&t),
                        r: fmt_scalar(&r),
                        instanton: model.name().into(),
                        ..Default::default()
                    };
                    match h5_row(&s, &t, &r, model, mode, &mut row) {
                        Ok(()) => {}
                        Err(e) => row.note = e.to_string(),
                    }
                    rows.push(row);
                }
            }
        }
        "h4-disk" => {
            for k in 1..=grid as i64 {
                let t = Scalar::ratio(k, grid as i64 + 1);
                let mut row = ScanRow {
                    family: family.into(),
                    t: fmt_scalar(&t),
                    abs_t: fmt_scalar(&t),
                    r: fmt_scalar(&r),
                    instanton: model.name().into(),
                    ..Default::default()
                };
                match h4_row(&t, &r, model, mode, &mut row) {
                    Ok(()) => {}
                    Err(e) => row.note = e.to_string(),
                }
                rows.push(row);
            }
        }
        "xs" => {
            let s = s.ok_or_else(|| anyhow!("--s is required for the base family"))?;
            let mut row = ScanRow {
                family: family.into(),
                s: fmt_scalar(&s),
                r: fmt_scalar(&r),
                instanton: model.name().into(),
                ..Default::default()
            };
            match xs_row(&s, &r, model, mode, &mut row) {
                Ok(()) => {}
                Err(e) => row.note = e.to_string(),
            }
            rows.push(row);
        }
        "torus" | "iwasawa" => {
            let id = if family == "torus" { FamilyId::Torus } else { FamilyId::Iwasawa };
            let point = build_family_point(id, FamilyParams { r: Some(r.clone()), ..Default::default() })?;
            let mut row = ScanRow {
                family: family.into(),
                r: fmt_scalar(&r),
                instanton: model.name().into(),
                residual: "0".into(),
                ..Default::default()
            };
            let diag = point.spec.check_structure();
            row.integrable = (diag.jacobi_ok && diag.integrable).to_string();
            let metric = point.standard_metric()?;
            row.balanced = is_balanced(&point.spec, &metric.fundamental_form())?.to_string();
            alpha_of(&point.spec, &metric, model, &point, mode, &mut row)?;
            rows.push(row);
        }
        other => return Err(anyhow!("unknown family `{other}`")),
    }
    Ok(rows)
}

fn h5_row(
    s: &Scalar,
    t: &Scalar,
    r: &Scalar,
    model: &InstantonModel,
    mode: EvalMode,
    row: &mut ScanRow,
) -> Result<()> {
    // from-scratch integrability residual through the deformation pipeline
    let s2 = s * s;
    let phi21 = if t.is_zero() { Scalar::zero() } else { t / &(t - &s2) };
    let params = DeformationParams::from_entries(&[(0, 1, t.clone()), (1, 0, phi21)]);
    let (deformed, residual) = deform(&xs_spec(s), &params)?;
    row.residual = fmt_scalar(&residual);
    let diag = deformed.check_structure();
    row.integrable = (diag.jacobi_ok && diag.integrable).to_string();

    let (_, _, _, d) = coefficients_h5(s, t)?;
    row.d_coeff = fmt_scalar(&d);
    let report = normal_form_balanced_h5(s, t)?;
    row.balanced = report.feasible.to_string();
    if let Some(p_sq) = report.p_sq {
        // canonical balanced witness: 2F = i(n1~1 + p^2 n2~2 + r^2 n3~3)
        let spec = strominger_core::family::h5_disk_spec(&d);
        let metric = HermitianMetric::diagonal(Scalar::one(), p_sq, r * r)?;
        let point = build_family_point(
            FamilyId::H5Disk,
            FamilyParams {
                s: Some(s.clone()),
                t: Some(t.clone()),
                r: Some(r.clone()),
                ..Default::default()
            },
        )?;
        alpha_of(&spec, &metric, model, &point, mode, row)?;
    }
    Ok(())
}

fn h4_row(
    t: &Scalar,
    r: &Scalar,
    model: &InstantonModel,
    mode: EvalMode,
    row: &mut ScanRow,
) -> Result<()> {
    let point = build_family_point(
        FamilyId::H4Disk,
        FamilyParams {
            t: Some(t.clone()),
            abs_t: Some(t.clone()),
            r: Some(r.clone()),
            ..Default::default()
        },
    )?;
    // residual through the deformation pipeline from the central structure
    let params = DeformationParams::from_entries(&[
        (0, 0, t.clone()),
        (0, 1, -&Scalar::i() * t),
    ]);
    let (_, residual) = deform(&strominger_core::family::h4_base_spec(), &params)?;
    row.residual = fmt_scalar(&residual);
    let diag = point.spec.check_structure();
    row.integrable = (diag.jacobi_ok && diag.integrable).to_string();
    let metric = point.standard_metric()?;
    row.balanced = is_balanced(&point.spec, &metric.fundamental_form())?.to_string();
    alpha_of(&point.spec, &metric, model, &point, mode, row)?;
    Ok(())
}

fn xs_row(
    s: &Scalar,
    r: &Scalar,
    model: &InstantonModel,
    mode: EvalMode,
    row: &mut ScanRow,
) -> Result<()> {
    let point = build_family_point(
        FamilyId::Xs,
        FamilyParams { s: Some(s.clone()), r: Some(r.clone()), ..Default::default() },
    )?;
    row.residual = "0".into();
    let diag = point.spec.check_structure();
    row.integrable = (diag.jacobi_ok && diag.integrable).to_string();
    let metric = point.standard_metric()?;
    row.balanced = is_balanced(&point.spec, &metric.fundamental_form())?.to_string();
    alpha_of(&point.spec, &metric, model, &point, mode, row)?;
    Ok(())
}

fn csv_escape(v: &str) -> String {
    if v.contains(',') || v.contains('"') {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            &r.family, &r.s, &r.t, &r.abs_t, &r.r, &r.instanton, &r.integrable, &r.residual,
            &r.balanced, &r.d_coeff, &r.alpha, &r.alpha_sign, &r.note,
        ];
        let line: Vec<String> = fields.iter().map(|f| csv_escape(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[ScanRow]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}
