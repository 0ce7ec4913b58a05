//! Dense linear algebra over [`Scalar`] for the small systems the engine
//! needs: coframe inversions (6x6), Lee-form solves, cohomology ranks and
//! nullspaces, and 3x3 Hermitian utilities (minors, adjugate, Cholesky).

use crate::error::Error;
use crate::scalar::Scalar;

const PIVOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Mat {
    pub rows: Vec<Vec<Scalar>>,
}

impl Mat {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Self {
        if let Some(first) = rows.first() {
            let n = first.len();
            assert!(rows.iter().all(|r| r.len() == n), "ragged matrix");
        }
        Mat { rows }
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Mat { rows: vec![vec![Scalar::zero(); n]; m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Scalar::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map(|r| r.len()).unwrap_or(0)
    }

    fn is_nonzero(s: &Scalar) -> bool {
        match s {
            Scalar::Exact(_) => !s.is_zero(),
            Scalar::Approx { .. } => s.abs() > PIVOT_TOL,
        }
    }

    /// Row-echelon elimination in place; returns pivot column indices.
    fn eliminate(&mut self) -> Vec<usize> {
        let m = self.nrows();
        let n = self.ncols();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            // choose the largest-magnitude usable pivot
            let mut best: Option<(usize, f64)> = None;
            for r in row..m {
                let entry = &self.rows[r][col];
                if Mat::is_nonzero(entry) {
                    let mag = entry.abs();
                    if best.map(|(_, b)| mag > b).unwrap_or(true) {
                        best = Some((r, mag));
                    }
                }
            }
            let Some((prow, _)) = best else { continue };
            self.rows.swap(row, prow);
            let pivot = self.rows[row][col].clone();
            let pinv = pivot.inv().expect("nonzero pivot");
            for c in col..n {
                self.rows[row][c] = &self.rows[row][c] * &pinv;
            }
            for r in 0..m {
                if r != row && Mat::is_nonzero(&self.rows[r][col]) {
                    let factor = self.rows[r][col].clone();
                    for c in col..n {
                        let delta = &factor * &self.rows[row][c];
                        self.rows[r][c] = &self.rows[r][c] - &delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.eliminate().len()
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let n = self.ncols();
        let mut work = self.clone();
        let pivots = work.eliminate();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![Scalar::zero(); n];
            v[f] = Scalar::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -&work.rows[prow][f];
            }
            basis.push(v);
        }
        basis
    }

    /// Solves the (possibly overdetermined but consistent) system `A x = b`
    /// with a unique solution. Errors when singular or inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>, Error> {
        assert_eq!(b.len(), self.nrows());
        let n = self.ncols();
        let mut aug = self.clone();
        for (r, val) in b.iter().enumerate() {
            aug.rows[r].push(val.clone());
        }
        let pivots = aug.eliminate();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return Err(Error::SingularSystem);
        }
        // any remaining row with zero coefficients must have zero rhs
        for r in pivots.len()..self.nrows() {
            if Mat::is_nonzero(&aug.rows[r][n]) {
                return Err(Error::SingularSystem);
            }
        }
        let mut x = vec![Scalar::zero(); n];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = aug.rows[prow][n].clone();
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat, Error> {
        let n = self.nrows();
        assert_eq!(n, self.ncols());
        let mut aug = self.clone();
        for (r, row) in Mat::identity(n).rows.into_iter().enumerate() {
            aug.rows[r].extend(row);
        }
        let pivots = aug.eliminate();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::SingularSystem);
        }
        let rows = aug.rows.into_iter().map(|r| r[n..].to_vec()).collect();
        Ok(Mat::new(rows))
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let m = self.nrows();
        let k = self.ncols();
        assert_eq!(k, other.nrows());
        let n = other.ncols();
        let mut out = Mat::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let mut acc = Scalar::zero();
                for l in 0..k {
                    acc = &acc + &(&self.rows[i][l] * &other.rows[l][j]);
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }
}

/// 3x3 Hermitian matrix over [`Scalar`].
pub type Mat3 = [[Scalar; 3]; 3];

pub fn mat3_is_hermitian(h: &Mat3) -> bool {
    (0..3).all(|i| (0..3).all(|j| h[i][j] == h[j][i].conj()))
}

/// Leading principal minors (1x1, 2x2, 3x3 determinants).
pub fn mat3_leading_minors(h: &Mat3) -> [Scalar; 3] {
    let d1 = h[0][0].clone();
    let d2 = &(&h[0][0] * &h[1][1]) - &(&h[0][1] * &h[1][0]);
    let d3 = mat3_det(h);
    [d1, d2, d3]
}

pub fn mat3_det(h: &Mat3) -> Scalar {
    let mut det = Scalar::zero();
    det = &det + &(&h[0][0] * &(&(&h[1][1] * &h[2][2]) - &(&h[1][2] * &h[2][1])));
    det = &det - &(&h[0][1] * &(&(&h[1][0] * &h[2][2]) - &(&h[1][2] * &h[2][0])));
    det = &det + &(&h[0][2] * &(&(&h[1][0] * &h[2][1]) - &(&h[1][1] * &h[2][0])));
    det
}

/// Adjugate: `adj(H) * H = det(H) * I`.
pub fn mat3_adjugate(h: &Mat3) -> Mat3 {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| -> Scalar {
        &(&h[r0][c0] * &h[r1][c1]) - &(&h[r0][c1] * &h[r1][c0])
    };
    // cofactor transpose
    [
        [minor(1, 2, 1, 2), -minor(0, 2, 1, 2), minor(0, 1, 1, 2)],
        [-minor(1, 2, 0, 2), minor(0, 2, 0, 2), -minor(0, 1, 0, 2)],
        [minor(1, 2, 0, 1), -minor(0, 2, 0, 1), minor(0, 1, 0, 1)],
    ]
}

/// Positive-definiteness via leading principal minors. On failure reports the
/// first non-positive minor.
pub fn mat3_check_positive_definite(h: &Mat3, tol: f64) -> Result<(), Error> {
    for (k, minor) in mat3_leading_minors(h).iter().enumerate() {
        if minor.real_sign(tol).unwrap_or(-1) <= 0 {
            return Err(Error::NotPositiveDefinite { index: k + 1, value: minor.to_string() });
        }
    }
    Ok(())
}

/// Cholesky factorization `H = U* U` with upper-triangular `U` and positive
/// diagonal. Exact mode requires the pivots to be rational squares.
pub fn mat3_cholesky_upper(h: &Mat3) -> Result<Mat3, Error> {
    mat3_check_positive_definite(h, PIVOT_TOL)?;
    let mut u: Mat3 = Default::default();
    for i in 0..3 {
        let mut diag = h[i][i].clone();
        for k in 0..i {
            diag = &diag - &(&u[k][i].conj() * &u[k][i]);
        }
        u[i][i] = diag.sqrt_real()?;
        let dinv = u[i][i].inv()?;
        for j in (i + 1)..3 {
            let mut val = h[i][j].clone();
            for k in 0..i {
                val = &val - &(&u[k][i].conj() * &u[k][j]);
            }
            u[i][j] = &val * &dinv;
        }
    }
    Ok(u)
}
