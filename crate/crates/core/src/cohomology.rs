//! Invariant Dolbeault and Bott-Chern cohomology dimensions, computed at the
//! Lie-algebra level by exact rank computations over the rational field.

use crate::error::Error;
use crate::form::{Basis, Form, Mask};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::structure::StructureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Dolbeault,
    BottChern,
}

/// Table of dimensions h^{p,q} for 0 <= p,q <= 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub flavor: Flavor,
    pub dims: [[usize; 4]; 4],
}

impl CohomologyTable {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims[p][q]
    }
}

/// Basis monomials of bidegree (p,q), in mask order.
pub fn bidegree_basis(p: usize, q: usize) -> Vec<Mask> {
    (0..64u8)
        .filter(|m| {
            let hol = (m & 0b000111).count_ones() as usize;
            let anti = (m & 0b111000).count_ones() as usize;
            hol == p && anti == q
        })
        .collect()
}

fn component_matrix(images: &[Form], target: &[Mask]) -> Mat {
    let rows = target
        .iter()
        .map(|m| images.iter().map(|f| f.coefficient(*m)).collect())
        .collect();
    Mat::new(rows)
}

/// Matrix of the (1,0)-part of d restricted to (p,q)-forms.
fn del_matrix(spec: &StructureSpec, p: usize, q: usize) -> Mat {
    let source = bidegree_basis(p, q);
    let target = bidegree_basis(p + 1, q);
    let images: Vec<Form> = source
        .iter()
        .map(|m| {
            let mono = Form::from_terms(p + q, Basis::Complex, vec![(*m, Scalar::one())]);
            spec.dee(&mono).bidegree_part(p + 1, q).expect("complex basis")
        })
        .collect();
    component_matrix(&images, &target)
}

/// Matrix of the (0,1)-part of d restricted to (p,q)-forms.
fn del_bar_matrix(spec: &StructureSpec, p: usize, q: usize) -> Mat {
    let source = bidegree_basis(p, q);
    let target = bidegree_basis(p, q + 1);
    let images: Vec<Form> = source
        .iter()
        .map(|m| {
            let mono = Form::from_terms(p + q, Basis::Complex, vec![(*m, Scalar::one())]);
            spec.dee(&mono).bidegree_part(p, q + 1).expect("complex basis")
        })
        .collect();
    component_matrix(&images, &target)
}

fn check_integrable(spec: &StructureSpec) -> Result<(), Error> {
    let diag = spec.check_structure();
    if !diag.jacobi_ok || !diag.integrable {
        return Err(Error::DomainError(
            "cohomology requires an integrable structure with d^2 = 0".into(),
        ));
    }
    Ok(())
}

/// Dolbeault dimensions `h^{p,q} = dim ker(del-bar on (p,q)) - rank(del-bar
/// from (p,q-1))`.
pub fn dolbeault_dims(spec: &StructureSpec) -> Result<CohomologyTable, Error> {
    check_integrable(spec)?;
    let mut dims = [[0usize; 4]; 4];
    for p in 0..4 {
        for q in 0..4 {
            let n = bidegree_basis(p, q).len();
            let rank_out = if q < 3 { del_bar_matrix(spec, p, q).rank() } else { 0 };
            let rank_in = if q > 0 { del_bar_matrix(spec, p, q - 1).rank() } else { 0 };
            dims[p][q] = n - rank_out - rank_in;
        }
    }
    Ok(CohomologyTable { flavor: Flavor::Dolbeault, dims })
}

/// Bott-Chern dimensions
/// `h^{p,q} = dim(ker del ∩ ker del-bar on (p,q)) - rank(del del-bar from (p-1,q-1))`.
pub fn bott_chern_dims(spec: &StructureSpec) -> Result<CohomologyTable, Error> {
    check_integrable(spec)?;
    let mut dims = [[0usize; 4]; 4];
    for p in 0..4 {
        for q in 0..4 {
            let n = bidegree_basis(p, q).len();
            // stack del and del-bar to compute dim(ker ∩ ker)
            let mut stacked_rows: Vec<Vec<Scalar>> = Vec::new();
            if p < 3 {
                stacked_rows.extend(del_matrix(spec, p, q).rows);
            }
            if q < 3 {
                stacked_rows.extend(del_bar_matrix(spec, p, q).rows);
            }
            let ker = if stacked_rows.is_empty() { n } else { n - Mat::new(stacked_rows).rank() };
            // rank of del∘del-bar from (p-1, q-1)
            let im = if p > 0 && q > 0 {
                let source = bidegree_basis(p - 1, q - 1);
                let target = bidegree_basis(p, q);
                let images: Vec<Form> = source
                    .iter()
                    .map(|m| {
                        let mono = Form::from_terms(
                            p + q - 2,
                            Basis::Complex,
                            vec![(*m, Scalar::one())],
                        );
                        let db = spec.dee(&mono).bidegree_part(p - 1, q).expect("complex basis");
                        spec.dee(&db).bidegree_part(p, q).expect("complex basis")
                    })
                    .collect();
                component_matrix(&images, &target).rank()
            } else {
                0
            };
            dims[p][q] = ker - im;
        }
    }
    Ok(CohomologyTable { flavor: Flavor::BottChern, dims })
}
