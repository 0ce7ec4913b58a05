//! Graded alternating forms over a fixed 6-dimensional dual space.
//!
//! Monomials are stored as bitmask multi-indices over six generators. Two
//! coframe views exist: the complex view `w1,w2,w3,~w1,~w2,~w3` (conjugates
//! at offset 3) and the real view `e1..e6`. Coefficient maps are kept
//! canonical: exact-zero coefficients are pruned after every operation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::scalar::Scalar;

pub const GENERATORS: usize = 6;

/// Which coframe the multi-indices refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `w1, w2, w3, ~w1, ~w2, ~w3` — generator `k+3` is the conjugate of `k`.
    Complex,
    /// `e1 .. e6`, real-valued generators.
    Real,
}

/// Multi-index as a bitmask over the 6 generators (bit k = generator k).
pub type Mask = u8;

pub fn mask_of(indices: &[usize]) -> Mask {
    let mut m = 0u8;
    for &i in indices {
        assert!(i < GENERATORS);
        assert!(m & (1 << i) == 0, "repeated generator in multi-index");
        m |= 1 << i;
    }
    m
}

pub fn mask_degree(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn mask_bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..GENERATORS).filter(move |i| m & (1 << i) != 0)
}

/// Sign of `e_A ^ e_B` relative to the sorted monomial `e_{A∪B}`;
/// `None` when the masks overlap.
pub fn wedge_sign(a: Mask, b: Mask) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut crossings = 0u32;
    for i in mask_bits(a) {
        // generators of b strictly below i must move past generator i
        let below = b & ((1u8 << i) - 1);
        crossings += below.count_ones();
    }
    Some(if crossings % 2 == 0 { 1 } else { -1 })
}

/// Sorts an arbitrary generator sequence into a mask with permutation parity.
/// Returns `None` when an index repeats.
pub fn sort_indices(indices: &[usize]) -> Option<(Mask, i32)> {
    let mut mask = 0u8;
    let mut sign = 1i32;
    for &i in indices {
        debug_assert!(i < GENERATORS);
        let bit = 1u8 << i;
        if mask & bit != 0 {
            return None;
        }
        // parity contribution: number of already-placed generators above i
        let above = mask >> (i + 1);
        if above.count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    Some((mask, sign))
}

/// Invariant alternating form of homogeneous degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    degree: usize,
    basis: Basis,
    coeffs: BTreeMap<Mask, Scalar>,
}

impl Form {
    pub fn zero(degree: usize, basis: Basis) -> Self {
        assert!(degree <= GENERATORS);
        Form { degree, basis, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: Scalar, basis: Basis) -> Self {
        let mut f = Form::zero(0, basis);
        f.add_term(0, c);
        f
    }

    pub fn generator(idx: usize, basis: Basis) -> Self {
        let mut f = Form::zero(1, basis);
        f.add_term(1 << idx, Scalar::one());
        f
    }

    pub fn monomial(coeff: Scalar, indices: &[usize], basis: Basis) -> Self {
        let mut f = Form::zero(indices.len(), basis);
        if let Some((mask, sign)) = sort_indices(indices) {
            let c = if sign < 0 { -coeff } else { coeff };
            f.add_term(mask, c);
        }
        f
    }

    pub fn from_terms(degree: usize, basis: Basis, terms: Vec<(Mask, Scalar)>) -> Self {
        let mut f = Form::zero(degree, basis);
        for (m, c) in terms {
            debug_assert_eq!(mask_degree(m), degree);
            f.add_term(m, c);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.is_zero_tol(tol))
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &Scalar)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: Mask) -> Scalar {
        self.coeffs.get(&mask).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn add_term(&mut self, mask: Mask, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(mask).or_insert_with(Scalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn add(&self, other: &Form) -> Result<Form, Error> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        assert_eq!(self.degree, other.degree, "adding forms of unequal degree");
        let mut out = self.clone();
        for (m, c) in other.coeffs.iter() {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form, Error> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.degree, self.basis);
        for (m, v) in self.coeffs.iter() {
            out.add_term(*m, c * v);
        }
        out
    }

    /// Exterior product. Errors on mismatched coframes.
    pub fn wedge(&self, other: &Form) -> Result<Form, Error> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        let degree = self.degree + other.degree;
        assert!(degree <= GENERATORS, "wedge exceeds top degree");
        let mut out = Form::zero(degree, self.basis);
        for (ma, ca) in self.coeffs.iter() {
            for (mb, cb) in other.coeffs.iter() {
                if let Some(sign) = wedge_sign(*ma, *mb) {
                    let mut c = ca * cb;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(ma | mb, c);
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugation. In the complex coframe this swaps each generator
    /// with its conjugate partner (and conjugates coefficients); in the real
    /// coframe only coefficients are conjugated.
    pub fn conj(&self) -> Form {
        let mut out = Form::zero(self.degree, self.basis);
        for (m, c) in self.coeffs.iter() {
            match self.basis {
                Basis::Real => out.add_term(*m, c.conj()),
                Basis::Complex => {
                    let mapped: Vec<usize> = mask_bits(*m).map(|i| (i + 3) % 6).collect();
                    let (mask, sign) = sort_indices(&mapped).expect("conjugation is a bijection");
                    let mut v = c.conj();
                    if sign < 0 {
                        v = -v;
                    }
                    out.add_term(mask, v);
                }
            }
        }
        out
    }

    /// Bidegree of a complex-coframe monomial: (holomorphic, antiholomorphic).
    pub fn mask_bidegree(mask: Mask) -> (usize, usize) {
        let p = (mask & 0b000111).count_ones() as usize;
        let q = (mask & 0b111000).count_ones() as usize;
        (p, q)
    }

    /// Splits into homogeneous (p,q)-components. Requires the complex coframe.
    pub fn bidegree_split(&self) -> Result<Vec<(usize, usize, Form)>, Error> {
        if self.basis != Basis::Complex {
            return Err(Error::NoComplexStructure);
        }
        let mut parts: BTreeMap<(usize, usize), Form> = BTreeMap::new();
        for (m, c) in self.coeffs.iter() {
            let pq = Form::mask_bidegree(*m);
            parts
                .entry(pq)
                .or_insert_with(|| Form::zero(self.degree, self.basis))
                .add_term(*m, c.clone());
        }
        Ok(parts.into_iter().map(|((p, q), f)| (p, q, f)).collect())
    }

    /// Component of bidegree (p,q); zero when absent.
    pub fn bidegree_part(&self, p: usize, q: usize) -> Result<Form, Error> {
        if self.basis != Basis::Complex {
            return Err(Error::NoComplexStructure);
        }
        let mut out = Form::zero(self.degree, self.basis);
        for (m, c) in self.coeffs.iter() {
            if Form::mask_bidegree(*m) == (p, q) {
                out.add_term(*m, c.clone());
            }
        }
        Ok(out)
    }

    /// Action of the complex structure on forms: multiplication by
    /// `i^(p-q)` on each (p,q)-component.
    pub fn j_act(&self) -> Result<Form, Error> {
        if self.basis != Basis::Complex {
            return Err(Error::NoComplexStructure);
        }
        let mut out = Form::zero(self.degree, self.basis);
        for (m, c) in self.coeffs.iter() {
            let (p, q) = Form::mask_bidegree(*m);
            out.add_term(*m, &Scalar::i_pow(p as i64 - q as i64) * c);
        }
        Ok(out)
    }

    pub fn to_approx(&self) -> Form {
        let mut out = Form::zero(self.degree, self.basis);
        for (m, c) in self.coeffs.iter() {
            out.add_term(*m, c.to_approx());
        }
        out
    }

    /// Coefficientwise comparison within absolute tolerance.
    pub fn approx_eq(&self, other: &Form, tol: f64) -> bool {
        if self.basis != other.basis || self.degree != other.degree {
            return false;
        }
        let masks: std::collections::BTreeSet<Mask> =
            self.coeffs.keys().chain(other.coeffs.keys()).cloned().collect();
        masks
            .iter()
            .all(|m| self.coefficient(*m).approx_eq(&other.coefficient(*m), tol))
    }

    /// True when the form equals its own conjugate.
    pub fn is_real_form(&self) -> bool {
        self.sub(&self.conj()).map(|d| d.is_zero()).unwrap_or(false)
    }
}

fn generator_name(basis: Basis, idx: usize) -> String {
    match basis {
        Basis::Complex => {
            if idx < 3 {
                format!("w{}", idx + 1)
            } else {
                format!("~w{}", idx - 2)
            }
        }
        Basis::Real => format!("e{}", idx + 1),
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.coeffs.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let names: Vec<String> =
                mask_bits(*m).map(|i| generator_name(self.basis, i)).collect();
            if names.is_empty() {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({})*{}", c, names.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Algebra homomorphism determined by 1-form images of the six generators.
/// Used for coframe changes: complex <-> real conversions, deformations,
/// frame rotations.
#[derive(Clone, Debug)]
pub struct FormMap {
    images: Vec<Form>,
    target_basis: Basis,
}

impl FormMap {
    pub fn new(images: Vec<Form>) -> Self {
        assert_eq!(images.len(), GENERATORS);
        let target_basis = images[0].basis();
        for img in &images {
            assert_eq!(img.degree(), 1, "generator images must be 1-forms");
            assert_eq!(img.basis(), target_basis);
        }
        FormMap { images, target_basis }
    }

    pub fn image(&self, idx: usize) -> &Form {
        &self.images[idx]
    }

    pub fn target_basis(&self) -> Basis {
        self.target_basis
    }

    pub fn apply(&self, form: &Form) -> Form {
        let mut out = Form::zero(form.degree(), self.target_basis);
        for (m, c) in form.terms() {
            let mut term = Form::constant(Scalar::one(), self.target_basis);
            for i in mask_bits(m) {
                term = wedge_any(&term, &self.images[i]);
            }
            out = out.add(&term.scale(c)).expect("consistent target basis");
        }
        out
    }
}

/// Extends a derivation from generator differentials to all forms by the
/// graded Leibniz rule: `d(a^b) = da^b + (-1)^deg(a) a^db`. The table holds
/// the differential of each of the six generators (2-forms in the same
/// coframe as `a`).
pub fn derive_with_table(d_gen: &[Form], a: &Form) -> Form {
    assert_eq!(d_gen.len(), GENERATORS);
    if a.degree() >= GENERATORS {
        return Form::zero(GENERATORS, a.basis());
    }
    let mut out = Form::zero(a.degree() + 1, a.basis());
    for (mask, coeff) in a.terms() {
        let bits: Vec<usize> = mask_bits(mask).collect();
        for (pos, &g) in bits.iter().enumerate() {
            let dg = &d_gen[g];
            if dg.is_zero() {
                continue;
            }
            let prefix: Mask = bits[..pos].iter().fold(0u8, |m, &b| m | (1 << b));
            let suffix: Mask = bits[pos + 1..].iter().fold(0u8, |m, &b| m | (1 << b));
            let pre = Form::from_terms(pos, a.basis(), vec![(prefix, Scalar::one())]);
            let suf =
                Form::from_terms(bits.len() - pos - 1, a.basis(), vec![(suffix, Scalar::one())]);
            let mut term = pre.wedge(dg).expect("same basis").wedge(&suf).expect("same basis");
            let mut c = coeff.clone();
            if pos % 2 == 1 {
                c = -c;
            }
            term = term.scale(&c);
            out = out.add(&term).expect("same basis");
        }
    }
    out
}

/// Wedge that tolerates a degree-0 left factor (used when folding products).
fn wedge_any(a: &Form, b: &Form) -> Form {
    if a.degree() == 0 {
        let c = a.coefficient(0);
        b.scale(&c)
    } else {
        a.wedge(b).expect("basis consistency")
    }
}
