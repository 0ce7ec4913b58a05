//! Balanced-metric feasibility: existence of an invariant metric `F` with
//! `d(F^2) = 0`. In complex dimension 3 this is a positivity question on the
//! space of closed real (2,2)-forms, since squaring is a bijection from
//! positive (1,1)-forms onto strictly positive (2,2)-forms.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Error;
use crate::family::{coefficients_h5, condis_factor, h5_disk_spec};
use crate::form::{mask_of, Basis, Form};
use crate::frame::AdaptedFrame;
use crate::hermitian::{is_balanced, HermitianMetric};
use crate::linalg::{mat3_adjugate, mat3_check_positive_definite, Mat, Mat3};
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::structure::StructureSpec;

/// Basis of real closed (2,2)-forms (real = equal to its own conjugate),
/// with real rational coordinates.
#[derive(Clone, Debug)]
pub struct Closed22Space {
    pub basis: Vec<Form>,
}

impl Closed22Space {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn combine(&self, coords: &[Scalar]) -> Form {
        assert_eq!(coords.len(), self.basis.len());
        let mut out = Form::zero(4, Basis::Complex);
        for (b, c) in self.basis.iter().zip(coords) {
            out = out.add(&b.scale(c)).expect("complex basis");
        }
        out
    }
}

/// The nine-element real basis of conjugation-invariant (2,2)-forms.
fn real_22_basis() -> Vec<Form> {
    let pairs = [mask_of(&[0, 1]), mask_of(&[0, 2]), mask_of(&[1, 2])];
    let conj_pairs = [mask_of(&[3, 4]), mask_of(&[3, 5]), mask_of(&[4, 5])];
    let beta = |a: usize, b: usize| -> Form {
        let left = Form::from_terms(2, Basis::Complex, vec![(pairs[a], Scalar::one())]);
        let right = Form::from_terms(2, Basis::Complex, vec![(conj_pairs[b], Scalar::one())]);
        left.wedge(&right).expect("complex basis")
    };
    let mut basis = Vec::with_capacity(9);
    for a in 0..3 {
        basis.push(beta(a, a));
    }
    for a in 0..3 {
        for b in (a + 1)..3 {
            basis.push(beta(a, b).add(&beta(b, a)).expect("basis"));
            basis.push(beta(a, b).sub(&beta(b, a)).expect("basis").scale(&Scalar::i()));
        }
    }
    basis
}

/// Kernel of d on the 9-dimensional real coefficient space of real
/// (2,2)-forms.
pub fn closed_22_space(spec: &StructureSpec) -> Result<Closed22Space, Error> {
    let diag = spec.check_structure();
    if !diag.jacobi_ok || !diag.integrable {
        return Err(Error::DomainError("feasibility requires an integrable structure".into()));
    }
    let gens = real_22_basis();
    let images: Vec<Form> = gens.iter().map(|b| spec.dee(b)).collect();
    let five_masks: Vec<u8> = (0..64u8).filter(|m| m.count_ones() == 5).collect();
    // real-linear conditions: real and imaginary parts of every coefficient
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for m in &five_masks {
        rows.push(images.iter().map(|f| f.coefficient(*m).re_part()).collect());
        rows.push(images.iter().map(|f| f.coefficient(*m).im_part()).collect());
    }
    let kernel = Mat::new(rows).nullspace();
    let basis = kernel
        .into_iter()
        .map(|coords| {
            let mut out = Form::zero(4, Basis::Complex);
            for (g, c) in gens.iter().zip(coords.iter()) {
                out = out.add(&g.scale(c)).expect("complex basis");
            }
            out
        })
        .collect();
    Ok(Closed22Space { basis })
}

/// Hermitian 3x3 matrix `M` with `Phi ^ i theta^k ^ ~theta^l = M_kl vol`,
/// where `theta` is the frame's unitary coframe and `vol` its volume form.
/// `Phi` is strictly positive exactly when `M` is positive definite.
pub fn positivity_matrix(phi: &Form, frame: &AdaptedFrame) -> Mat3 {
    let top = mask_of(&[0, 1, 2, 3, 4, 5]);
    let vol = frame.to_complex(&Form::monomial(Scalar::one(), &[0, 1, 2, 3, 4, 5], Basis::Real));
    let vol_coeff = vol.coefficient(top);
    // index placement chosen so that v* M v = Phi ^ i alpha ^ ~alpha for
    // alpha = sum v_k theta^k, which makes M(F(H)^2) = 4 adj(H) exactly
    let mut m: Mat3 = Default::default();
    for k in 0..3 {
        let theta_k_bar = frame.theta(k).conj();
        for l in 0..3 {
            let pair = frame
                .theta(l)
                .wedge(&theta_k_bar)
                .expect("complex basis")
                .scale(&Scalar::i());
            let wedge = phi.wedge(&pair).expect("complex basis");
            m[k][l] = &wedge.coefficient(top) / &vol_coeff;
        }
    }
    m
}

/// Converts a Hermitian coefficient matrix over the frame's unitary coframe
/// into coefficients over the underlying (1,0)-coframe: `H_w = L^T H_th ~L`.
fn theta_to_omega(h_theta: &Mat3, frame: &AdaptedFrame) -> Mat3 {
    let l = frame.chol();
    let mut out: Mat3 = Default::default();
    for j in 0..3 {
        for m in 0..3 {
            let mut acc = Scalar::zero();
            for k in 0..3 {
                for n in 0..3 {
                    acc = &acc + &(&(&l[k][j] * &h_theta[k][n]) * &l[n][m].conj());
                }
            }
            out[j][m] = acc;
        }
    }
    out
}

/// Inverts the squaring map on strictly positive (2,2)-forms via the
/// adjugate identity: `M(F(H)^2) = 4 adj(H)`, so `adj(M(Phi))` is
/// proportional to the positive root. The result is normalized so that
/// `F(H)^2 = Phi` when the required square root is rational (always in the
/// round-trip direction); otherwise the scale is fixed approximately.
pub fn square_root_22(phi: &Form, frame: &AdaptedFrame) -> Result<HermitianMetric, Error> {
    let m = positivity_matrix(phi, frame);
    mat3_check_positive_definite(&m, DEFAULT_TOL).map_err(|_| Error::NotPositive)?;
    let h_theta = mat3_adjugate(&m);
    let h_omega = theta_to_omega(&h_theta, frame);
    let metric = HermitianMetric::new(h_omega)?;
    // fix the global scale: F(H)^2 = lambda * Phi with lambda > 0
    let f2 = metric.fundamental_form().wedge(&metric.fundamental_form())?;
    let (mask, phi_coeff) = phi
        .terms()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).expect("finite"))
        .map(|(m, c)| (m, c.clone()))
        .ok_or(Error::NotPositive)?;
    let lambda = &f2.coefficient(mask) / &phi_coeff;
    let scale = match lambda.sqrt_real() {
        Ok(root) => root.inv()?,
        Err(_) => {
            let (lr, _) = lambda.to_f64();
            Scalar::approx(1.0 / lr.sqrt(), 0.0)
        }
    };
    let mut h_scaled: Mat3 = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            h_scaled[i][j] = &metric.coefficients()[i][j] * &scale;
        }
    }
    HermitianMetric::new(h_scaled)
}

/// Feasibility verdict for invariant balanced metrics.
#[derive(Clone, Debug)]
pub enum FeasibilityVerdict {
    FeasibleWitness(HermitianMetric),
    InfeasibleNumeric {
        /// Best value of the min-eigenvalue maximization (an upper bound of 0
        /// applies when an exact certificate was found).
        margin: Scalar,
        /// Index of a unitary-frame direction whose diagonal positivity
        /// functional vanishes identically on the closed space, when one
        /// exists (exact dual evidence that no closed form is definite).
        certificate_direction: Option<usize>,
    },
    Unknown {
        margin: Scalar,
    },
}

const FEASIBLE_MARGIN: f64 = 1e-8;
const INFEASIBLE_MARGIN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default)]
struct Herm3 {
    re: [[f64; 3]; 3],
    im: [[f64; 3]; 3],
}

impl Herm3 {
    fn from_mat3(m: &Mat3) -> Self {
        let mut out = Herm3::default();
        for i in 0..3 {
            for j in 0..3 {
                let (re, im) = m[i][j].to_f64();
                out.re[i][j] = re;
                out.im[i][j] = im;
            }
        }
        out
    }

    fn combine(mats: &[Herm3], x: &[f64]) -> Herm3 {
        let mut out = Herm3::default();
        for (m, w) in mats.iter().zip(x) {
            for i in 0..3 {
                for j in 0..3 {
                    out.re[i][j] += w * m.re[i][j];
                    out.im[i][j] += w * m.im[i][j];
                }
            }
        }
        out
    }

    /// Minimum eigenvalue and eigenvector via the real symmetric embedding
    /// [[X, -Y], [Y, X]] and cyclic Jacobi sweeps.
    fn min_eig(&self) -> (f64, [(f64, f64); 3]) {
        let mut a = [[0.0f64; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = self.re[i][j];
                a[i + 3][j + 3] = self.re[i][j];
                a[i][j + 3] = -self.im[i][j];
                a[i + 3][j] = self.im[i][j];
            }
        }
        let mut v = [[0.0f64; 6]; 6];
        for (k, row) in v.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        for _sweep in 0..40 {
            let mut off = 0.0;
            for p in 0..6 {
                for q in (p + 1)..6 {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-26 {
                break;
            }
            for p in 0..6 {
                for q in (p + 1)..6 {
                    if a[p][q].abs() < 1e-15 {
                        continue;
                    }
                    let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..6 {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..6 {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for k in 0..6 {
                        let (vkp, vkq) = (v[k][p], v[k][q]);
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut min_idx = 0;
        for k in 1..6 {
            if a[k][k] < a[min_idx][min_idx] {
                min_idx = k;
            }
        }
        let mut vec = [(0.0, 0.0); 3];
        for i in 0..3 {
            vec[i] = (v[i][min_idx], v[i + 3][min_idx]);
        }
        (a[min_idx][min_idx], vec)
    }
}

fn quad_form(m: &Herm3, v: &[(f64, f64); 3]) -> f64 {
    // Re(v* M v); the imaginary part vanishes for Hermitian M
    let mut acc = 0.0;
    for k in 0..3 {
        for l in 0..3 {
            let (vkr, vki) = v[k];
            let (vlr, vli) = v[l];
            // conj(v_k) * M_kl * v_l, real part
            let (mr, mi) = (m.re[k][l], m.im[k][l]);
            let (pr, pi) = (vkr * vlr + vki * vli, vkr * vli - vki * vlr);
            acc += mr * pr - mi * pi;
        }
    }
    acc
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn rationalize(x: f64, max_den: u64) -> BigRational {
    // continued-fraction convergents with bounded denominator
    let negative = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = x.floor();
        if a > i64::MAX as f64 {
            break;
        }
        let a_int = a as i128;
        let (p2, q2) = (a_int * p1 + p0, a_int * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    let mut r = BigRational::new(BigInt::from(p1), BigInt::from(q1.max(1)));
    if negative {
        r = -r;
    }
    r
}

/// Deterministic maximization of the minimum eigenvalue of the positivity
/// matrix over the unit sphere of the closed space: candidate sweep over
/// small support vectors followed by projected subgradient ascent.
fn maximize_min_eigenvalue(mats: &[Herm3], dim: usize) -> (f64, Vec<f64>) {
    let eval = |x: &[f64]| -> (f64, [(f64, f64); 3]) {
        let m = Herm3::combine(mats, x);
        m.min_eig()
    };
    let mut best_x = vec![0.0; dim];
    let mut best_f = f64::NEG_INFINITY;
    let consider = |x: Vec<f64>, best_x: &mut Vec<f64>, best_f: &mut f64| {
        let n = norm(&x);
        if n == 0.0 {
            return;
        }
        let xn: Vec<f64> = x.iter().map(|v| v / n).collect();
        let (f, _) = eval(&xn);
        if f > *best_f {
            *best_f = f;
            *best_x = xn;
        }
    };
    // sweep: supports of size 1..3 with +-1 entries
    let signs = [1.0, -1.0];
    for i in 0..dim {
        for si in signs {
            let mut x = vec![0.0; dim];
            x[i] = si;
            consider(x, &mut best_x, &mut best_f);
        }
        for j in (i + 1)..dim {
            for si in signs {
                for sj in signs {
                    let mut x = vec![0.0; dim];
                    x[i] = si;
                    x[j] = sj;
                    consider(x, &mut best_x, &mut best_f);
                }
            }
            for k in (j + 1)..dim {
                for si in signs {
                    for sj in signs {
                        for sk in signs {
                            let mut x = vec![0.0; dim];
                            x[i] = si;
                            x[j] = sj;
                            x[k] = sk;
                            consider(x, &mut best_x, &mut best_f);
                        }
                    }
                }
            }
        }
    }
    // subgradient ascent from the sweep winner
    let mut x = best_x.clone();
    for iter in 0..2500 {
        let (f, v) = eval(&x);
        if f > best_f {
            best_f = f;
            best_x = x.clone();
        }
        let g: Vec<f64> = mats.iter().map(|m| quad_form(m, &v)).collect();
        let gn = norm(&g);
        if gn < 1e-14 {
            break;
        }
        let step = 0.3 / ((iter + 1) as f64).sqrt();
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi += step * gi / gn;
        }
        let n = norm(&x);
        for xi in x.iter_mut() {
            *xi /= n;
        }
    }
    (best_f, best_x)
}

/// Decides existence of an invariant balanced metric by maximizing strict
/// positivity over the closed real (2,2) cone. Feasible witnesses are exact:
/// the maximizer is rationalized, re-checked in exact arithmetic, and the
/// returned metric squares to an exactly closed (2,2)-form.
pub fn balanced_feasible(spec: &StructureSpec) -> Result<FeasibilityVerdict, Error> {
    let space = closed_22_space(spec)?;
    if space.dimension() == 0 {
        return Ok(FeasibilityVerdict::InfeasibleNumeric {
            margin: Scalar::zero(),
            certificate_direction: None,
        });
    }
    let frame = AdaptedFrame::new(spec, HermitianMetric::identity().coefficients())?;
    let exact_mats: Vec<Mat3> =
        space.basis.iter().map(|b| positivity_matrix(b, &frame)).collect();

    // exact dual evidence: a coframe direction whose diagonal entry vanishes
    // identically on the closed space forces every closed (2,2)-form to be
    // indefinite or degenerate
    let certificate_direction =
        (0..3).find(|&k| exact_mats.iter().all(|m| m[k][k].is_zero()));

    let mats: Vec<Herm3> = exact_mats.iter().map(Herm3::from_mat3).collect();
    let (best_f, best_x) = maximize_min_eigenvalue(&mats, space.dimension());

    if certificate_direction.is_some() {
        return Ok(FeasibilityVerdict::InfeasibleNumeric {
            margin: Scalar::approx(best_f.min(0.0), 0.0),
            certificate_direction,
        });
    }
    if best_f >= FEASIBLE_MARGIN {
        // exact witness: rationalize the maximizer and verify positivity in
        // exact arithmetic, enlarging the denominator if needed
        for max_den in [1_000u64, 1_000_000, 1_000_000_000] {
            let coords: Vec<Scalar> = best_x
                .iter()
                .map(|v| Scalar::from_rational(rationalize(*v, max_den)))
                .collect();
            let phi = space.combine(&coords);
            let m = positivity_matrix(&phi, &frame);
            if mat3_check_positive_definite(&m, 0.0).is_ok() {
                let h_theta = mat3_adjugate(&m);
                let h_omega = theta_to_omega(&h_theta, &frame);
                let metric = HermitianMetric::new(h_omega)?;
                debug_assert!(is_balanced(spec, &metric.fundamental_form())?);
                return Ok(FeasibilityVerdict::FeasibleWitness(metric));
            }
        }
        return Ok(FeasibilityVerdict::Unknown { margin: Scalar::approx(best_f, 0.0) });
    }
    if best_f <= -INFEASIBLE_MARGIN {
        return Ok(FeasibilityVerdict::InfeasibleNumeric {
            margin: Scalar::approx(best_f, 0.0),
            certificate_direction: None,
        });
    }
    Ok(FeasibilityVerdict::Unknown { margin: Scalar::approx(best_f, 0.0) })
}

/// Balanced-criterion report for the normalized disk family.
#[derive(Clone, Debug)]
pub struct H5BalancedReport {
    pub feasible: bool,
    /// Witness value `p^2 = -D(t)` when feasible.
    pub p_sq: Option<Scalar>,
    pub d_coeff: Scalar,
    pub condis: Scalar,
}

/// Existence of an invariant balanced metric on the normalized disk family:
/// the normal-form metrics `2F = i(n1~1 + p^2 n2~2 + q^2 n3~3) + u n1~2 - ~u n2~1`
/// are balanced exactly when `p^2 + D(t) = 0`, which is solvable for real
/// `p` exactly when `D(t)` is real and negative, i.e. when `t` is real.
pub fn normal_form_balanced_h5(s: &Scalar, t: &Scalar) -> Result<H5BalancedReport, Error> {
    let (_, _, _, d) = coefficients_h5(s, t)?;
    let condis = condis_factor(s, t)?;
    let feasible = d.is_real(DEFAULT_TOL)
        && (-&d).real_sign(DEFAULT_TOL).map(|sg| sg > 0).unwrap_or(false);
    let p_sq = if feasible {
        let p_sq = -&d;
        // verify through the full machinery: the witness must be exactly balanced
        let spec = h5_disk_spec(&d);
        let metric =
            HermitianMetric::normal_form(p_sq.clone(), Scalar::one(), Scalar::zero())?;
        if !is_balanced(&spec, &metric.fundamental_form())? {
            return Err(Error::DomainError(
                "normal-form witness failed the balanced re-check".into(),
            ));
        }
        Some(p_sq)
    } else {
        None
    };
    Ok(H5BalancedReport { feasible, p_sq, d_coeff: d, condis })
}
