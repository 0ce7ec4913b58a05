//! Metric connections on the invariant orthonormal frame: Levi-Civita via
//! the Koszul formula, the connection with totally skew torsion, curvature
//! 2-forms via the Cartan structure equations, the curvature trace 4-form,
//! and the Hermitian-Yang-Mills test.

use crate::error::Error;
use crate::form::{mask_bits, Basis, Form};
use crate::frame::AdaptedFrame;
use crate::scalar::{Scalar, DEFAULT_TOL};

/// Structure constants `c^k_ij` of the frame vectors dual to `e^1..e^6`,
/// derived from `de^k(X,Y) = -e^k([X,Y])`.
#[derive(Clone, Debug)]
pub struct BracketTable {
    c: Vec<[[Scalar; 6]; 6]>, // c[k][i][j] = c^k_ij
}

impl BracketTable {
    pub fn from_frame(frame: &AdaptedFrame) -> Self {
        let table: Vec<Form> = (0..6).map(|k| frame.d_real_generator(k).clone()).collect();
        BracketTable::from_differentials(&table)
    }

    /// Builds the table from the differentials `de^1..de^6` of any real
    /// orthonormal coframe.
    pub fn from_differentials(d_real: &[Form]) -> Self {
        assert_eq!(d_real.len(), 6);
        let mut c = vec![[[(); 6]; 6].map(|row| row.map(|_| Scalar::zero())); 6];
        for k in 0..6 {
            let de = &d_real[k];
            for (mask, coeff) in de.terms() {
                let bits: Vec<usize> = mask_bits(mask).collect();
                let (i, j) = (bits[0], bits[1]);
                // de^k = sum_{i<j} A^k_ij e^ij with c^k_ij = -A^k_ij
                c[k][i][j] = -coeff;
                c[k][j][i] = coeff.clone();
            }
        }
        BracketTable { c }
    }

    pub fn constant(&self, k: usize, i: usize, j: usize) -> &Scalar {
        &self.c[k][i][j]
    }

    /// Jacobi identity (equivalent to d^2 = 0 on the coframe).
    pub fn jacobi_ok(&self, tol: f64) -> bool {
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    for m in 0..6 {
                        // sum over cyclic permutations of (i,j,k) of c^m_{[i j} c^l_{k] l}-free form:
                        // [[ei,ej],ek] + cyc = 0 componentwise
                        let mut acc = Scalar::zero();
                        for l in 0..6 {
                            acc = &acc + &(&self.c[l][i][j] * &self.c[m][l][k]);
                            acc = &acc + &(&self.c[l][j][k] * &self.c[m][l][i]);
                            acc = &acc + &(&self.c[l][k][i] * &self.c[m][l][j]);
                        }
                        if !acc.is_zero_tol(tol) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    LeviCivita,
    Bismut,
}

/// Metric connection in an orthonormal frame, stored as the coefficient
/// table `gamma[x][y][z] = g(nabla_{e_x} e_y, e_z)`.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    gamma: Vec<[[Scalar; 6]; 6]>,
    kind: ConnectionKind,
}

impl ConnectionData {
    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    pub fn coefficient(&self, x: usize, y: usize, z: usize) -> &Scalar {
        &self.gamma[x][y][z]
    }

    /// Connection 1-form `sigma^i_j = sum_k g(nabla_{e_k} e_j, e_i) e^k`.
    pub fn sigma(&self, i: usize, j: usize) -> Form {
        let mut out = Form::zero(1, Basis::Real);
        for k in 0..6 {
            let c = &self.gamma[k][j][i];
            if !c.is_zero() {
                out = out.add(&Form::generator(k, Basis::Real).scale(c)).expect("real basis");
            }
        }
        out
    }

    /// Metric-compatibility: `sigma^i_j = -sigma^j_i`.
    pub fn is_metric(&self, tol: f64) -> bool {
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    let sum = &self.gamma[x][y][z] + &self.gamma[x][z][y];
                    if !sum.is_zero_tol(tol) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Torsion tensor `Tor^k_ij = gamma[i][j][k] - gamma[j][i][k] - c^k_ij`.
    pub fn torsion_component(&self, brackets: &BracketTable, i: usize, j: usize, k: usize) -> Scalar {
        &(&self.gamma[i][j][k] - &self.gamma[j][i][k]) - brackets.constant(k, i, j)
    }

    /// Torsion as a 3-form; errors unless totally antisymmetric.
    pub fn torsion_three_form(&self, brackets: &BracketTable) -> Result<Form, Error> {
        let mut out = Form::zero(3, Basis::Real);
        for i in 0..6 {
            for j in (i + 1)..6 {
                for k in (j + 1)..6 {
                    let t_ijk = self.torsion_component(brackets, i, j, k);
                    // total antisymmetry: the (i,k) and (j,k) exchanges must agree
                    let t_kji = self.torsion_component(brackets, k, j, i);
                    let t_ikj = self.torsion_component(brackets, i, k, j);
                    if !(&t_ijk + &t_kji).is_zero_tol(DEFAULT_TOL)
                        || !(&t_ijk + &t_ikj).is_zero_tol(DEFAULT_TOL)
                    {
                        return Err(Error::ConventionError);
                    }
                    out = out
                        .add(&Form::monomial(t_ijk, &[i, j, k], Basis::Real))
                        .expect("real basis");
                }
            }
        }
        Ok(out)
    }
}

/// Levi-Civita connection by the Koszul formula on left-invariant fields:
/// `2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita(brackets: &BracketTable) -> ConnectionData {
    let half = Scalar::ratio(1, 2);
    let mut gamma = vec![[[(); 6]; 6].map(|row| row.map(|_| Scalar::zero())); 6];
    for x in 0..6 {
        for y in 0..6 {
            for z in 0..6 {
                let v = &(brackets.constant(z, x, y) - brackets.constant(x, y, z))
                    + brackets.constant(y, z, x);
                gamma[x][y][z] = &half * &v;
            }
        }
    }
    ConnectionData { gamma, kind: ConnectionKind::LeviCivita }
}

/// Extracts the totally antisymmetric component table of a real 3-form.
fn three_form_components(t: &Form) -> Result<Vec<[[Scalar; 6]; 6]>, Error> {
    if t.basis() != Basis::Real || !t.sub(&t.conj())?.is_zero_tol(DEFAULT_TOL) {
        return Err(Error::ConventionError);
    }
    let mut comp = vec![[[(); 6]; 6].map(|row| row.map(|_| Scalar::zero())); 6];
    for (mask, coeff) in t.terms() {
        let b: Vec<usize> = mask_bits(mask).collect();
        let perms: [([usize; 3], i64); 6] = [
            ([b[0], b[1], b[2]], 1),
            ([b[1], b[2], b[0]], 1),
            ([b[2], b[0], b[1]], 1),
            ([b[0], b[2], b[1]], -1),
            ([b[2], b[1], b[0]], -1),
            ([b[1], b[0], b[2]], -1),
        ];
        for (p, sign) in perms {
            comp[p[0]][p[1]][p[2]] = if sign > 0 { coeff.clone() } else { -coeff };
        }
    }
    Ok(comp)
}

/// The metric connection with totally skew torsion `T`:
/// `g(nabla^+_X Y, Z) = g(nabla^g_X Y, Z) + (1/2) T(X,Y,Z)`.
pub fn bismut(lc: &ConnectionData, t: &Form) -> Result<ConnectionData, Error> {
    assert_eq!(lc.kind, ConnectionKind::LeviCivita);
    let comp = three_form_components(t)?;
    let half = Scalar::ratio(1, 2);
    let mut gamma = lc.gamma.clone();
    for x in 0..6 {
        for y in 0..6 {
            for z in 0..6 {
                gamma[x][y][z] = &gamma[x][y][z] + &(&half * &comp[x][y][z]);
            }
        }
    }
    Ok(ConnectionData { gamma, kind: ConnectionKind::Bismut })
}

/// Curvature 2-forms via the Cartan structure equation
/// `Omega^i_j = d sigma^i_j + sum_k sigma^i_k ^ sigma^k_j`.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    omega: Vec<Vec<Form>>, // omega[i][j], antisymmetric in (i,j)
}

impl CurvatureData {
    pub fn entry(&self, i: usize, j: usize) -> &Form {
        &self.omega[i][j]
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..6).all(|i| {
            (0..6).all(|j| {
                self.omega[i][j]
                    .add(&self.omega[j][i])
                    .map(|s| s.is_zero_tol(tol))
                    .unwrap_or(false)
            })
        })
    }

    pub fn from_entries(entries: Vec<Vec<Form>>) -> Self {
        CurvatureData { omega: entries }
    }
}

pub fn curvature(conn: &ConnectionData, frame: &AdaptedFrame) -> CurvatureData {
    let table: Vec<Form> = (0..6).map(|k| frame.d_real_generator(k).clone()).collect();
    curvature_with_table(conn, &table)
}

/// Cartan structure equation over an explicit differential table (any real
/// orthonormal coframe).
pub fn curvature_with_table(conn: &ConnectionData, d_real: &[Form]) -> CurvatureData {
    let zero = Form::zero(2, Basis::Real);
    let mut omega = vec![vec![zero; 6]; 6];
    let sigmas: Vec<Vec<Form>> =
        (0..6).map(|i| (0..6).map(|j| conn.sigma(i, j)).collect()).collect();
    for i in 0..6 {
        for j in 0..6 {
            let mut om = crate::form::derive_with_table(d_real, &sigmas[i][j]);
            for k in 0..6 {
                let term = sigmas[i][k].wedge(&sigmas[k][j]).expect("real basis");
                om = om.add(&term).expect("real basis");
            }
            omega[i][j] = om;
        }
    }
    CurvatureData { omega }
}

/// `sum_{i<j} Omega^i_j ^ Omega^i_j` — a real 4-form.
pub fn trace_four_form(curv: &CurvatureData) -> Form {
    let mut out = Form::zero(4, Basis::Real);
    for i in 0..6 {
        for j in (i + 1)..6 {
            let sq = curv.entry(i, j).wedge(curv.entry(i, j)).expect("real basis");
            out = out.add(&sq).expect("real basis");
        }
    }
    out
}

/// Hermitian-Yang-Mills test for a set of curvature 2-forms (real coframe):
/// every entry must satisfy `Omega ^ F^2 = 0` and have vanishing
/// (2,0) + (0,2) parts relative to the frame's complex structure.
pub fn hym_check(entries: &[Form], f_complex: &Form, frame: &AdaptedFrame) -> Result<bool, Error> {
    let f2 = f_complex.wedge(f_complex)?;
    for om in entries {
        let om_c = frame.to_complex(om);
        let wedge = om_c.wedge(&f2)?;
        if !wedge.is_zero_tol(DEFAULT_TOL) {
            return Ok(false);
        }
        let p20 = om_c.bidegree_part(2, 0)?;
        let p02 = om_c.bidegree_part(0, 2)?;
        if !p20.is_zero_tol(DEFAULT_TOL) || !p02.is_zero_tol(DEFAULT_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: all 15 upper-triangular curvature entries as a flat list.
pub fn curvature_entries(curv: &CurvatureData) -> Vec<Form> {
    let mut v = Vec::with_capacity(15);
    for i in 0..6 {
        for j in (i + 1)..6 {
            v.push(curv.entry(i, j).clone());
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_real_form, parse_structure};
    use crate::hermitian::{adapted_frame, torsion_and_dt, HermitianMetric};
    use crate::structure::StructureSpec;

    fn xs_setup(s: &Scalar) -> (StructureSpec, HermitianMetric, AdaptedFrame) {
        let spec = parse_structure("d w3 = w1^w2 + w1^~w1 - s^2*w2^~w2;")
            .unwrap()
            .bind(&[("s", s.clone())])
            .unwrap();
        let metric = HermitianMetric::diagonal(Scalar::one(), s * s, Scalar::one()).unwrap();
        let frame = adapted_frame(&spec, &metric).unwrap();
        (spec, metric, frame)
    }

    #[test]
    fn torus_connection_is_flat() {
        let spec = StructureSpec::abelian();
        let metric = HermitianMetric::identity();
        let frame = adapted_frame(&spec, &metric).unwrap();
        let brackets = BracketTable::from_frame(&frame);
        let lc = levi_civita(&brackets);
        for i in 0..6 {
            for j in 0..6 {
                assert!(lc.sigma(i, j).is_zero());
            }
        }
        let curv = curvature(&lc, &frame);
        assert!(trace_four_form(&curv).is_zero());
    }

    #[test]
    fn levi_civita_is_torsion_free_and_metric() {
        let s = Scalar::ratio(1, 4);
        let (_spec, _metric, frame) = xs_setup(&s);
        let brackets = BracketTable::from_frame(&frame);
        assert!(brackets.jacobi_ok(1e-12));
        let lc = levi_civita(&brackets);
        assert!(lc.is_metric(1e-12));
        let tor = lc.torsion_three_form(&brackets).unwrap();
        assert!(tor.is_zero());
    }

    #[test]
    fn skew_connection_recovers_its_torsion() {
        let s = Scalar::ratio(1, 4);
        let (spec, metric, frame) = xs_setup(&s);
        let brackets = BracketTable::from_frame(&frame);
        let lc = levi_civita(&brackets);
        let (t, _) = torsion_and_dt(&spec, &metric.fundamental_form()).unwrap();
        let t_real = frame.to_real(&t);
        let conn = bismut(&lc, &t_real).unwrap();
        assert!(conn.is_metric(1e-12));
        let recovered = conn.torsion_three_form(&brackets).unwrap();
        assert_eq!(recovered, t_real);
        // T = 0 leaves the connection unchanged
        let conn0 = bismut(&lc, &Form::zero(3, Basis::Real)).unwrap();
        assert_eq!(format!("{:?}", conn0.gamma), format!("{:?}", lc.gamma));
    }

    #[test]
    fn curvature_matches_reference_list_at_s_one_quarter() {
        let s = Scalar::ratio(1, 4);
        let (spec, metric, frame) = xs_setup(&s);
        let brackets = BracketTable::from_frame(&frame);
        let lc = levi_civita(&brackets);
        let (t, _) = torsion_and_dt(&spec, &metric.fundamental_form()).unwrap();
        let conn = bismut(&lc, &frame.to_real(&t)).unwrap();
        let curv = curvature(&conn, &frame);
        assert!(curv.is_antisymmetric(1e-12));

        let expect = |text: &str| parse_real_form(text, &[]).unwrap();
        // 1/s = 4, 1/s^2 = 16, 2/s = 8, 2/s^2 = 32
        let cases = vec![
            ((0usize, 1usize), "-4*e1^e2 + 8*e1^e4 + 8*e2^e3 + 36*e3^e4"),
            ((0, 2), "-16*e1^e3 - 16*e2^e4"),
            ((1, 3), "-16*e1^e3 - 16*e2^e4"),
            ((0, 3), "-16*e1^e4 + 16*e2^e3"),
            ((1, 2), "16*e1^e4 - 16*e2^e3"),
            ((0, 4), "-8*e4^e6"),
            ((1, 5), "-8*e4^e6"),
            ((0, 5), "8*e3^e6"),
            ((1, 4), "-8*e3^e6"),
            ((2, 3), "36*e1^e2 - 8*e1^e4 - 8*e2^e3 - 4*e3^e4"),
            ((2, 4), "-8*e2^e6"),
            ((3, 5), "-8*e2^e6"),
            ((2, 5), "8*e1^e6"),
            ((3, 4), "-8*e1^e6"),
            ((4, 5), "-32*e1^e2 - 32*e3^e4"),
        ];
        for ((i, j), text) in cases {
            assert_eq!(curv.entry(i, j), &expect(text), "Omega^{}_{}", i + 1, j + 1);
        }
        // trace: -16(4s^2+1)/s^2 e1234 at s=1/4 -> -320 e1234
        let tr = trace_four_form(&curv);
        assert_eq!(tr, expect("-320*e1^e2^e3^e4"));
    }

    #[test]
    fn trace_closed_form_across_s_values() {
        // tr = -16(4s^2+1)/s^2 e1234 for the balanced metric on X^s
        for s in [Scalar::ratio(1, 8), Scalar::ratio(1, 4), Scalar::ratio(2, 5)] {
            let (spec, metric, frame) = xs_setup(&s);
            let brackets = BracketTable::from_frame(&frame);
            let lc = levi_civita(&brackets);
            let (t, _) = torsion_and_dt(&spec, &metric.fundamental_form()).unwrap();
            let conn = bismut(&lc, &frame.to_real(&t)).unwrap();
            let tr = trace_four_form(&curvature(&conn, &frame));
            let s2 = &s * &s;
            let coeff = &(&Scalar::from_int(-16)
                * &(&(&Scalar::from_int(4) * &s2) + &Scalar::one()))
                / &s2;
            let expected = Form::monomial(coeff, &[0, 1, 2, 3], Basis::Real);
            assert_eq!(tr, expected, "s = {s}");
        }
    }

    #[test]
    fn h4_torsion_matches_ten_term_display() {
        // T_(t,r) at t = 3/10 + 2/5 i (|t| = 1/2), r = 1:
        // (|t|(1-|t|^2)/r) T = |t| e125 - t1 e135 + t2 e136 - t2 e145
        //   - (1+t1) e146 - t2 e235 + (1-t1) e236 + t1 e245 - t2 e246 - |t| e345
        let t = Scalar::complex_ratio(3, 10, 2, 5);
        let spec = crate::family::h4_disk_spec(&t);
        let metric =
            HermitianMetric::diagonal(Scalar::one(), Scalar::ratio(1, 4), Scalar::one()).unwrap();
        let frame = adapted_frame(&spec, &metric).unwrap();
        let (t_form, _) = torsion_and_dt(&spec, &metric.fundamental_form()).unwrap();
        let t_real = frame.to_real(&t_form);
        let params: Vec<(&str, Scalar)> = vec![
            ("t1", Scalar::ratio(3, 10)),
            ("t2", Scalar::ratio(2, 5)),
            ("m", Scalar::ratio(1, 2)),
        ];
        let scale = Scalar::ratio(8, 3); // r / (|t|(1-|t|^2))
        let expected = crate::dsl::parse_real_form(
            "m*e1^e2^e5 - t1*e1^e3^e5 + t2*e1^e3^e6 - t2*e1^e4^e5 \
             - e1^e4^e6 - t1*e1^e4^e6 - t2*e2^e3^e5 + e2^e3^e6 - t1*e2^e3^e6 \
             + t1*e2^e4^e5 - t2*e2^e4^e6 - m*e3^e4^e5",
            &params,
        )
        .unwrap()
        .scale(&scale);
        assert_eq!(t_real, expected);
    }

    #[test]
    fn hym_examples() {
        let s = Scalar::ratio(1, 4);
        let (_spec, metric, frame) = xs_setup(&s);
        let f = metric.fundamental_form();
        // zero curvature passes
        assert!(hym_check(&[Form::zero(2, Basis::Real)], &f, &frame).unwrap());
        // Omega = F fails: F ^ F^2 = F^3 != 0
        let f_real = frame.to_real(&f);
        assert!(!hym_check(&[f_real], &f, &frame).unwrap());
        // (2,0)+(0,2) violation fails
        let bad = crate::dsl::parse_form("w1^w2 + ~w1^~w2", &[]).unwrap();
        let bad_real = frame.to_real(&bad);
        assert!(!hym_check(&[bad_real], &f, &frame).unwrap());
    }
}
