//! Complex nilpotent structures: the exterior derivative of a (1,0)-coframe
//! and its extension to all invariant forms by the graded Leibniz rule.

use crate::error::Error;
use crate::form::{Basis, Form};
use crate::scalar::Scalar;

/// Structure equations of an (almost) complex nilpotent Lie algebra: the
/// differentials of the three (1,0)-generators, each a complex 2-form which
/// may carry (2,0), (1,1) and (0,2) parts. Conjugate generators differentiate
/// by conjugating the defining equations.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureSpec {
    d_gen: Vec<Form>, // differentials of all six generators, index 0..6
}

impl StructureSpec {
    pub fn new(d_omega: [Form; 3]) -> Self {
        let mut d_gen = Vec::with_capacity(6);
        for d in &d_omega {
            assert_eq!(d.basis(), Basis::Complex);
            assert!(d.is_zero() || d.degree() == 2, "generator differential must be a 2-form");
        }
        for d in &d_omega {
            let mut f = d.clone();
            if f.is_zero() {
                f = Form::zero(2, Basis::Complex);
            }
            d_gen.push(f);
        }
        for i in 0..3 {
            d_gen.push(d_gen[i].conj());
        }
        StructureSpec { d_gen }
    }

    /// All six generator differentials are zero.
    pub fn abelian() -> Self {
        StructureSpec::new([
            Form::zero(2, Basis::Complex),
            Form::zero(2, Basis::Complex),
            Form::zero(2, Basis::Complex),
        ])
    }

    pub fn d_generator(&self, idx: usize) -> &Form {
        &self.d_gen[idx]
    }

    /// Exterior derivative extended by the graded Leibniz rule.
    pub fn dee(&self, a: &Form) -> Form {
        assert_eq!(a.basis(), Basis::Complex, "dee acts on complex-coframe forms");
        crate::form::derive_with_table(&self.d_gen, a)
    }

    pub fn to_approx(&self) -> Self {
        StructureSpec::new([
            self.d_gen[0].to_approx(),
            self.d_gen[1].to_approx(),
            self.d_gen[2].to_approx(),
        ])
    }

    /// Structure-level diagnostics: d^2 = 0, integrability, and closedness of
    /// the canonical (3,0)-form w1^w2^w3.
    pub fn check_structure(&self) -> Diagnostics {
        let jacobi_ok = (0..3).all(|i| self.dee(&self.d_gen[i]).is_zero());
        let integrable = (0..3).all(|i| {
            self.d_gen[i]
                .bidegree_part(0, 2)
                .map(|p| p.is_zero())
                .unwrap_or(false)
        });
        let psi = Form::monomial(Scalar::one(), &[0, 1, 2], Basis::Complex);
        let d_canonical = self.dee(&psi);
        Diagnostics {
            jacobi_ok,
            integrable,
            canonical_form_closed: d_canonical.is_zero(),
            d_canonical,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub jacobi_ok: bool,
    pub integrable: bool,
    pub canonical_form_closed: bool,
    pub d_canonical: Form,
}

/// Deformation parameters: the 3x3 coefficient array of a coframe change
/// `w_new^i = w^i + sum_j Phi^i_j ~w^j`.
#[derive(Clone, Debug)]
pub struct DeformationParams {
    pub phi: [[Scalar; 3]; 3],
}

impl DeformationParams {
    pub fn zero() -> Self {
        DeformationParams { phi: Default::default() }
    }

    pub fn from_entries(entries: &[(usize, usize, Scalar)]) -> Self {
        let mut p = DeformationParams::zero();
        for (i, j, v) in entries {
            p.phi[*i][*j] = v.clone();
        }
        p
    }
}

/// Applies a deformation, returning the structure equations in the deformed
/// coframe together with an integrability residual (the squared coefficient
/// norm of the (0,2) parts; zero exactly when the deformed structure is
/// integrable).
pub fn deform(
    spec: &StructureSpec,
    params: &DeformationParams,
) -> Result<(StructureSpec, Scalar), Error> {
    use crate::linalg::Mat;

    // new = P * old over the 6 generators (old coframe and its conjugates)
    let mut p = Mat::zeros(6, 6);
    for i in 0..3 {
        p.rows[i][i] = Scalar::one();
        p.rows[i + 3][i + 3] = Scalar::one();
        for j in 0..3 {
            p.rows[i][j + 3] = params.phi[i][j].clone();
            p.rows[i + 3][j] = params.phi[i][j].conj();
        }
    }
    let p_inv = p.inverse().map_err(|_| Error::DegenerateDeformation)?;

    // old generator l expressed in the deformed coframe
    let mut images = Vec::with_capacity(6);
    for l in 0..6 {
        let mut img = Form::zero(1, Basis::Complex);
        for k in 0..6 {
            img = img
                .add(&Form::generator(k, Basis::Complex).scale(&p_inv.rows[l][k]))
                .expect("same basis");
        }
        images.push(img);
    }
    let old_in_new = crate::form::FormMap::new(images);

    let mut d_new: Vec<Form> = Vec::with_capacity(3);
    for i in 0..3 {
        // d(new^i) computed in the old coframe, then re-expressed
        let mut d_old = spec.d_generator(i).clone();
        for j in 0..3 {
            d_old = d_old
                .add(&spec.d_generator(j + 3).scale(&params.phi[i][j]))
                .expect("same basis");
        }
        d_new.push(old_in_new.apply(&d_old));
    }

    let mut residual = Scalar::zero();
    for d in &d_new {
        let anti = d.bidegree_part(0, 2).expect("complex basis");
        for (_, c) in anti.terms() {
            residual = &residual + &(c * &c.conj());
        }
    }

    let spec_new = StructureSpec::new([d_new[0].clone(), d_new[1].clone(), d_new[2].clone()]);
    Ok((spec_new, residual))
}
