//! Adapted frames: the unitary coframe of a Hermitian metric and the real
//! orthonormal coframe derived from it, together with the change-of-basis
//! maps between the complex and real views and the real structure equations.

use crate::error::Error;
use crate::form::{derive_with_table, Basis, Form, FormMap};
use crate::linalg::{mat3_cholesky_upper, Mat, Mat3};
use crate::scalar::Scalar;
use crate::structure::StructureSpec;

/// Frame adapted to an SU(3)-structure: a unitary coframe
/// `theta^k = sum_j L[k][j] w^j` (upper-triangular `L` from a Cholesky
/// factorization of the metric) and the real coframe defined by
/// `e^{2k-1} + i e^{2k} = theta^k`. In the real coframe the fundamental form
/// is `e12 + e34 + e56` on the nose.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    chol: Mat3,
    to_real_map: FormMap,
    to_complex_map: FormMap,
    d_real: Vec<Form>,
}

impl AdaptedFrame {
    /// Builds the frame from the structure equations and a Hermitian
    /// coefficient matrix `H` (the metric `2F = i sum H_kl w^k ^ ~w^l`).
    pub fn new(spec: &StructureSpec, h: &Mat3) -> Result<Self, Error> {
        let u = mat3_cholesky_upper(h)?;
        // theta = L w with L = conj(U), so that sum_k theta^k ^ ~theta^k
        // reproduces the metric coefficients.
        let mut chol: Mat3 = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                chol[i][j] = u[i][j].conj();
            }
        }

        let l_mat = Mat::new(chol.iter().map(|r| r.to_vec()).collect());
        let l_inv = l_mat.inverse().map_err(|_| Error::SingularSystem)?;

        // real generator images in the complex coframe:
        //   e^{2k-1} = (theta^k + ~theta^k)/2,  e^{2k} = (theta^k - ~theta^k)/(2i)
        let half = Scalar::ratio(1, 2);
        let half_over_i = &half / &Scalar::i();
        let mut to_complex_images = Vec::with_capacity(6);
        for k in 0..3 {
            let mut theta = Form::zero(1, Basis::Complex);
            for j in 0..3 {
                theta = theta
                    .add(&Form::generator(j, Basis::Complex).scale(&chol[k][j]))
                    .expect("complex basis");
            }
            let theta_bar = theta.conj();
            let re = theta.add(&theta_bar).expect("basis").scale(&half);
            let im = theta.sub(&theta_bar).expect("basis").scale(&half_over_i);
            to_complex_images.push(re);
            to_complex_images.push(im);
        }
        // interleaving above produced images for e1,e2,e3,e4,e5,e6 in order
        let to_complex_map = FormMap::new(to_complex_images);

        // complex generator images in the real coframe:
        //   w^j = sum_k Linv[j][k] (e^{2k-1} + i e^{2k}),  ~w^j = conj
        let mut to_real_images = Vec::with_capacity(6);
        for j in 0..3 {
            let mut img = Form::zero(1, Basis::Real);
            for k in 0..3 {
                let theta_k = Form::generator(2 * k, Basis::Real)
                    .add(&Form::generator(2 * k + 1, Basis::Real).scale(&Scalar::i()))
                    .expect("real basis");
                img = img.add(&theta_k.scale(&l_inv.rows[j][k])).expect("real basis");
            }
            to_real_images.push(img);
        }
        for j in 0..3 {
            to_real_images.push(to_real_images[j].conj());
        }
        let to_real_map = FormMap::new(to_real_images);

        // real structure equations d e^k, computed through the complex side
        let mut d_real = Vec::with_capacity(6);
        for idx in 0..6 {
            let e_complex = to_complex_map.apply(&Form::generator(idx, Basis::Real));
            let de = spec.dee(&e_complex);
            d_real.push(to_real_map.apply(&de));
        }

        Ok(AdaptedFrame { chol, to_real_map, to_complex_map, d_real })
    }

    /// Unitary coframe matrix: `theta = L w`.
    pub fn chol(&self) -> &Mat3 {
        &self.chol
    }

    pub fn theta(&self, k: usize) -> Form {
        let mut theta = Form::zero(1, Basis::Complex);
        for j in 0..3 {
            theta = theta
                .add(&Form::generator(j, Basis::Complex).scale(&self.chol[k][j]))
                .expect("complex basis");
        }
        theta
    }

    /// Converts a complex-coframe form to the real coframe.
    pub fn to_real(&self, form: &Form) -> Form {
        assert_eq!(form.basis(), Basis::Complex);
        self.to_real_map.apply(form)
    }

    /// Converts a real-coframe form back to the complex coframe.
    pub fn to_complex(&self, form: &Form) -> Form {
        assert_eq!(form.basis(), Basis::Real);
        self.to_complex_map.apply(form)
    }

    /// Differential of the real generator `e^{idx+1}`.
    pub fn d_real_generator(&self, idx: usize) -> &Form {
        &self.d_real[idx]
    }

    /// Exterior derivative of a real-coframe form.
    pub fn dee_real(&self, form: &Form) -> Form {
        assert_eq!(form.basis(), Basis::Real);
        derive_with_table(&self.d_real, form)
    }

    /// `e12 + e34 + e56` — the fundamental form in this frame.
    pub fn standard_fundamental_form() -> Form {
        let mut f = Form::zero(2, Basis::Real);
        for k in 0..3 {
            f = f
                .add(&Form::monomial(Scalar::one(), &[2 * k, 2 * k + 1], Basis::Real))
                .expect("real basis");
        }
        f
    }

    /// `theta^1 ^ theta^2 ^ theta^3` in the complex coframe.
    pub fn theta_volume(&self) -> Form {
        self.theta(0)
            .wedge(&self.theta(1))
            .expect("basis")
            .wedge(&self.theta(2))
            .expect("basis")
    }
}
