//! The named holomorphic families the engine certifies: the balanced base
//! family `X^s`, the disk deformation of `X^s` (normalized eta-coframe with
//! coefficient `D(t)`), the disk family over the second nilpotent algebra
//! (torus-bundle structure), the complex torus, and the complex
//! parallelizable structure. Closed-form coefficient oracles live here and
//! are cross-checked against the from-scratch deformation pipeline in tests.

use crate::error::Error;
use crate::form::{Basis, Form};
use crate::hermitian::HermitianMetric;
use crate::scalar::{ExactComplex, Scalar};
use crate::structure::StructureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyId {
    Xs,
    H5Disk,
    H4Disk,
    Torus,
    Iwasawa,
}

impl FamilyId {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyId::Xs => "xs",
            FamilyId::H5Disk => "h5-disk",
            FamilyId::H4Disk => "h4-disk",
            FamilyId::Torus => "torus",
            FamilyId::Iwasawa => "iwasawa",
        }
    }
}

/// Parameters for [`build_family_point`]; unused entries stay `None`.
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    pub s: Option<Scalar>,
    pub t: Option<Scalar>,
    /// Exact |t| when an adapted frame is needed in exact mode (the caller
    /// must supply a Pythagorean t, e.g. t = 3/10 + 2/5 i with |t| = 1/2).
    pub abs_t: Option<Scalar>,
    pub r: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub id: FamilyId,
    pub s: Option<Scalar>,
    pub t: Option<Scalar>,
    pub abs_t: Option<Scalar>,
    pub r: Scalar,
    pub spec: StructureSpec,
}

fn require_real_in_open_interval(v: &Scalar, lo: (i64, i64), hi: (i64, i64), what: &str) -> Result<(), Error> {
    let lo = Scalar::ratio(lo.0, lo.1);
    let hi = Scalar::ratio(hi.0, hi.1);
    let above = (v - &lo).real_sign(crate::scalar::DEFAULT_TOL).map_err(|_| {
        Error::DomainError(format!("{what} must be real"))
    })?;
    let below = (&hi - v).real_sign(crate::scalar::DEFAULT_TOL).map_err(|_| {
        Error::DomainError(format!("{what} must be real"))
    })?;
    if above <= 0 || below <= 0 {
        return Err(Error::DomainError(format!("{what} outside ({lo}, {hi})")));
    }
    Ok(())
}

fn norm_sq(z: &Scalar) -> Scalar {
    z * &z.conj()
}

/// Structure equations of `X^s`: `d w3 = w1^w2 + w1^~w1 - s^2 w2^~w2`.
pub fn xs_spec(s: &Scalar) -> StructureSpec {
    let s2 = s * s;
    let d3 = Form::monomial(Scalar::one(), &[0, 1], Basis::Complex)
        .add(&Form::monomial(Scalar::one(), &[0, 3], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(-&s2, &[1, 4], Basis::Complex))
        .expect("basis");
    StructureSpec::new([Form::zero(2, Basis::Complex), Form::zero(2, Basis::Complex), d3])
}

/// Base structure of the torus-bundle family:
/// `d w3 = (i/2) w1^~w1 + (1/2) w1^~w2 + (1/2) w2^~w1`.
pub fn h4_base_spec() -> StructureSpec {
    let half = Scalar::ratio(1, 2);
    let half_i = &Scalar::i() * &half;
    let d3 = Form::monomial(half_i, &[0, 3], Basis::Complex)
        .add(&Form::monomial(half.clone(), &[0, 4], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(half, &[1, 3], Basis::Complex))
        .expect("basis");
    StructureSpec::new([Form::zero(2, Basis::Complex), Form::zero(2, Basis::Complex), d3])
}

/// Complex parallelizable structure: `d w3 = w1^w2`.
pub fn iwasawa_spec() -> StructureSpec {
    let d3 = Form::monomial(Scalar::one(), &[0, 1], Basis::Complex);
    StructureSpec::new([Form::zero(2, Basis::Complex), Form::zero(2, Basis::Complex), d3])
}

/// Normalized disk-family structure `d n3 = n^12 + n^{1~1} + D(t) n^{2~2}`.
pub fn h5_disk_spec(d_coeff: &Scalar) -> StructureSpec {
    let d3 = Form::monomial(Scalar::one(), &[0, 1], Basis::Complex)
        .add(&Form::monomial(Scalar::one(), &[0, 3], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(d_coeff.clone(), &[1, 4], Basis::Complex))
        .expect("basis");
    StructureSpec::new([Form::zero(2, Basis::Complex), Form::zero(2, Basis::Complex), d3])
}

/// Disk-family structure over the torus-bundle algebra:
/// `2(1-|t|^2) d n3 = 2~t n^12 + i n^{1~1} + n^{1~2} + n^{2~1} - i|t|^2 n^{2~2}`.
pub fn h4_disk_spec(t: &Scalar) -> StructureSpec {
    let t_sq = norm_sq(t);
    let scale = (&Scalar::from_int(2) * &(&Scalar::one() - &t_sq)).inv().expect("|t| < 1");
    let two_tbar = &Scalar::from_int(2) * &t.conj();
    let d3 = Form::monomial(&two_tbar * &scale, &[0, 1], Basis::Complex)
        .add(&Form::monomial(&Scalar::i() * &scale, &[0, 3], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(scale.clone(), &[0, 4], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(scale.clone(), &[1, 3], Basis::Complex))
        .expect("basis")
        .add(&Form::monomial(-&(&(&Scalar::i() * &t_sq) * &scale), &[1, 4], Basis::Complex))
        .expect("basis");
    StructureSpec::new([Form::zero(2, Basis::Complex), Form::zero(2, Basis::Complex), d3])
}

pub fn build_family_point(id: FamilyId, params: FamilyParams) -> Result<FamilyPoint, Error> {
    let r = params.r.clone().unwrap_or_else(Scalar::one);
    if r.is_zero() {
        return Err(Error::DomainError("r must be nonzero".into()));
    }
    if let (Some(t), Some(abs_t)) = (&params.t, &params.abs_t) {
        let diff = &norm_sq(t) - &(abs_t * abs_t);
        if !diff.is_zero_tol(crate::scalar::DEFAULT_TOL) {
            return Err(Error::DomainError(format!(
                "supplied |t| = {abs_t} does not square to |t|^2 of t = {t}"
            )));
        }
    }
    let spec = match id {
        FamilyId::Xs => {
            let s = params.s.clone().ok_or_else(|| Error::DomainError("missing s".into()))?;
            require_real_in_open_interval(&s, (0, 1), (1, 2), "s")?;
            xs_spec(&s)
        }
        FamilyId::H5Disk => {
            let s = params.s.clone().ok_or_else(|| Error::DomainError("missing s".into()))?;
            require_real_in_open_interval(&s, (0, 1), (1, 2), "s")?;
            let t = params.t.clone().unwrap_or_else(Scalar::zero);
            let (_, _, _, d) = coefficients_h5(&s, &t)?;
            h5_disk_spec(&d)
        }
        FamilyId::H4Disk => {
            let t = params.t.clone().ok_or_else(|| Error::DomainError("missing t".into()))?;
            let inside = (&Scalar::one() - &norm_sq(&t))
                .real_sign(crate::scalar::DEFAULT_TOL)
                .unwrap_or(-1);
            if inside <= 0 {
                return Err(Error::DomainError("t outside the unit disk".into()));
            }
            h4_disk_spec(&t)
        }
        FamilyId::Torus => StructureSpec::abelian(),
        FamilyId::Iwasawa => iwasawa_spec(),
    };
    Ok(FamilyPoint {
        id,
        s: params.s,
        t: params.t,
        abs_t: params.abs_t,
        r,
        spec,
    })
}

impl FamilyPoint {
    /// The distinguished Hermitian metric of the family point:
    /// `diag(1, s^2, r^2)` on `X^s`, `diag(1, |t|^2, r^2)` on the
    /// torus-bundle disk, the balanced normal form `diag(1, -D(t), r^2)` on
    /// the normalized disk when `D(t)` is real (no balanced metric exists
    /// otherwise and the identity is returned), identity elsewhere.
    pub fn standard_metric(&self) -> Result<HermitianMetric, Error> {
        match self.id {
            FamilyId::Xs => {
                let s = self.s.as_ref().expect("Xs has s");
                HermitianMetric::diagonal(Scalar::one(), s * s, &self.r * &self.r)
            }
            FamilyId::H4Disk => {
                let t = self.t.as_ref().expect("H4Disk has t");
                if t.is_zero() {
                    return Err(Error::DomainError(
                        "the central point carries no adapted metric (|t| = 0)".into(),
                    ));
                }
                HermitianMetric::diagonal(Scalar::one(), norm_sq(t), &self.r * &self.r)
            }
            FamilyId::H5Disk => {
                let s = self.s.as_ref().expect("H5Disk has s");
                let t = self.t.clone().unwrap_or_else(Scalar::zero);
                let (_, _, _, d) = coefficients_h5(s, &t)?;
                let p_sq = if d.is_real(crate::scalar::DEFAULT_TOL) { -&d } else { Scalar::one() };
                HermitianMetric::diagonal(Scalar::one(), p_sq, &self.r * &self.r)
            }
            _ => Ok(HermitianMetric::identity()),
        }
    }

    /// Closed (3,0)-form normalized to unit norm in the adapted frame.
    pub fn canonical_psi(&self) -> Result<Form, Error> {
        let coeff = match self.id {
            FamilyId::Xs => &self.s.clone().expect("Xs has s") * &self.r,
            FamilyId::H4Disk => {
                let abs_t = self.abs_t.clone().ok_or_else(|| {
                    Error::DomainError("exact |t| required for the canonical (3,0)-form".into())
                })?;
                &abs_t * &self.r
            }
            _ => Scalar::one(),
        };
        Ok(Form::monomial(coeff, &[0, 1, 2], Basis::Complex))
    }

    pub fn to_approx(&self) -> FamilyPoint {
        FamilyPoint {
            id: self.id,
            s: self.s.as_ref().map(|v| v.to_approx()),
            t: self.t.as_ref().map(|v| v.to_approx()),
            abs_t: self.abs_t.as_ref().map(|v| v.to_approx()),
            r: self.r.to_approx(),
            spec: self.spec.to_approx(),
        }
    }
}

/// Closed-form deformation coefficients of the normalized disk family:
/// returns `(a, b, c, D)` with
/// `a = (t-s^2)(~t(1-~t)-s^2)/N`, `b = -s^2(~t(1-t)-s^2)/N`,
/// `c = |t-s^2|^2 (t(1-~t)-s^2)/N`, `N = |t-|t|^2-s^2|^2`, and
/// `D = ~b c / |a|^2 = -s^2 (t-|t|^2-s^2)^2 / |t-t^2-s^2|^2`.
pub fn coefficients_h5(s: &Scalar, t: &Scalar) -> Result<(Scalar, Scalar, Scalar, Scalar), Error> {
    let s2 = s * s;
    // domain: t in the open disk of radius s^2
    let inside = (&(&s2 * &s2) - &norm_sq(t))
        .real_sign(crate::scalar::DEFAULT_TOL)
        .unwrap_or(-1);
    if inside <= 0 {
        return Err(Error::DomainError("t outside the disk of radius s^2".into()));
    }
    let tbar = t.conj();
    let n = norm_sq(&(&(t - &norm_sq(t)) - &s2));
    let n_inv = n.inv().expect("nonvanishing on the disk");
    let a = &(&(t - &s2) * &(&(&tbar * &(&Scalar::one() - &tbar)) - &s2)) * &n_inv;
    let b = &(-&s2 * &(&(&tbar * &(&Scalar::one() - t)) - &s2)) * &n_inv;
    let c = &(&norm_sq(&(t - &s2)) * &(&(t * &(&Scalar::one() - &tbar)) - &s2)) * &n_inv;
    let d = &(&b.conj() * &c) / &norm_sq(&a);
    Ok((a, b, c, d))
}

/// The factor `t2 (t1^2 + t2^2 - t1 + s^2)`; on the disk it vanishes exactly
/// when `Im D(t) = 0`, i.e. when `t` is real.
pub fn condis_factor(s: &Scalar, t: &Scalar) -> Result<Scalar, Error> {
    let s2 = s * s;
    let inside = (&(&s2 * &s2) - &norm_sq(t))
        .real_sign(crate::scalar::DEFAULT_TOL)
        .unwrap_or(-1);
    if inside <= 0 {
        return Err(Error::DomainError("t outside the disk of radius s^2".into()));
    }
    let (t1, t2) = split_re_im(t);
    let quad = &(&(&(&t1 * &t1) + &(&t2 * &t2)) - &t1) + &s2;
    Ok(&t2 * &quad)
}

fn split_re_im(t: &Scalar) -> (Scalar, Scalar) {
    match t {
        Scalar::Exact(z) => (
            Scalar::Exact(ExactComplex::new(z.re.clone(), num_traits::Zero::zero())),
            Scalar::Exact(ExactComplex::new(z.im.clone(), num_traits::Zero::zero())),
        ),
        Scalar::Approx { re, im } => (Scalar::approx(*re, 0.0), Scalar::approx(*im, 0.0)),
    }
}

/// Integrability polynomial of deformations of `X^s`:
/// `Phi^1_1 Phi^2_2 - Phi^1_2 Phi^2_1 + Phi^1_2 + s^2 Phi^2_1`.
pub fn h5_integrability_formula(s: &Scalar, phi: &[[Scalar; 3]; 3]) -> Scalar {
    let s2 = s * s;
    &(&(&(&phi[0][0] * &phi[1][1]) - &(&phi[0][1] * &phi[1][0])) + &phi[0][1])
        + &(&s2 * &phi[1][0])
}

/// Integrability polynomial of deformations of the torus-bundle base:
/// `i(1+Phi^3_3)Phi^1_2 - (1-Phi^3_3)(Phi^1_1 - Phi^2_2)`.
pub fn h4_integrability_formula(phi: &[[Scalar; 3]; 3]) -> Scalar {
    let lhs = &(&Scalar::i() * &(&Scalar::one() + &phi[2][2])) * &phi[0][1];
    let rhs = &(&Scalar::one() - &phi[2][2]) * &(&phi[0][0] - &phi[1][1]);
    &lhs - &rhs
}
