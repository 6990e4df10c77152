//! Exact dense linear algebra over [`Scalar`] and over the 2*pi*i extension.
//!
//! Everything is Gaussian elimination with deterministic first-nonzero
//! pivoting, so bases and solutions are reproducible across runs.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::ScalarError;
use crate::scalar::{conductor_cap, euler_phi, PiScalar, Rat, Scalar};

/// Dense matrix over [`Scalar`].
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    a: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.a[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.a[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(&other.a) {
            *x = x.add_ref(y);
        }
        m
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(&other.a) {
            *x = x.sub_ref(y);
        }
        m
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        let mut m = self.clone();
        for x in m.a.iter_mut() {
            *x = x.mul_ref(s);
        }
        m
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.get(r, k);
                if lhs.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let rhs = other.get(k, c);
                    if !rhs.is_zero() {
                        let v = out.get(r, c).add_ref(&lhs.mul_ref(rhs));
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    let x = self.get(r, c);
                    if !x.is_zero() && !v[c].is_zero() {
                        acc = acc.add_ref(&x.mul_ref(&v[c]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, mut e: u32) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Mat::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut t = Scalar::zero();
        for i in 0..self.rows {
            t = t.add_ref(self.get(i, i));
        }
        t
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0usize;
        for col in 0..m.cols {
            let Some(p) = (lead..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for c in 0..m.cols {
                m.a.swap(lead * m.cols + c, p * m.cols + c);
            }
            let inv = m.get(lead, col).inv().expect("pivot nonzero");
            for c in 0..m.cols {
                let v = m.get(lead, c).mul_ref(&inv);
                m.set(lead, c, v);
            }
            for r in 0..m.rows {
                if r != lead && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.get(r, c).sub_ref(&f.mul_ref(m.get(lead, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, deterministic (free columns low to high,
    /// free variable set to 1).
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (prow, pcol) in pivots.iter().enumerate() {
                v[*pcol] = r.get(prow, free).neg_ref();
            }
            basis.push(v);
        }
        basis
    }

    /// Particular solution of `self * x = b` with free variables zero.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (rr, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (prow, pcol) in pivots.iter().enumerate() {
            x[*pcol] = rr.get(prow, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Scalar::one());
        }
        let (rr, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Mat::from_fn(n, n, |r, c| rr.get(r, n + c).clone()))
    }

    /// Characteristic polynomial of a square matrix, monic, low-to-high
    /// coefficients (coeff of x^0 first), via Faddeev-LeVerrier.
    pub fn char_poly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Scalar::zero(); n + 1];
        coeffs[n] = Scalar::one();
        let mut m = Mat::zeros(n, n); // M_0 = 0
        let mut c = Scalar::one(); // c_n = 1
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut am = self.matmul(&m);
            for i in 0..n {
                let v = am.get(i, i).add_ref(&c);
                am.set(i, i, v);
            }
            m = am;
            let t = self.matmul(&m).trace();
            c = t.scale(&Rat::new(BigInt::from(-1), BigInt::from(k as i64)));
            coeffs[n - k] = c.clone();
        }
        coeffs
    }

    pub fn det(&self) -> Scalar {
        let cp = self.char_poly();
        let c0 = cp[0].clone();
        if self.rows % 2 == 0 {
            c0
        } else {
            c0.neg_ref()
        }
    }
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Evaluate a low-to-high coefficient polynomial at a scalar point.
pub fn poly_eval(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(x).add_ref(c);
    }
    acc
}

/// Divide a polynomial by (x - root), assuming the division is exact.
pub fn poly_deflate(coeffs: &[Scalar], root: &Scalar) -> Vec<Scalar> {
    let n = coeffs.len();
    assert!(n >= 2);
    let mut q = vec![Scalar::zero(); n - 1];
    let mut carry = Scalar::zero();
    for k in (0..n - 1).rev() {
        let c = coeffs[k + 1].add_ref(&carry);
        q[k] = c.clone();
        carry = c.mul_ref(root);
    }
    debug_assert!(coeffs[0].add_ref(&carry).is_zero(), "deflation not exact");
    q
}

/// All roots of `coeffs` that are roots of unity, with multiplicity, as
/// exponents alpha in [0,1) with e^{2 pi i alpha} the eigenvalue. The search
/// space is every order m with phi(m) <= degree_bound, capped by the global
/// conductor cap. Returns the deflated remainder degree as well.
pub fn roots_of_unity_roots(
    coeffs: &[Scalar],
    degree_bound: u64,
) -> Result<(Vec<(Rat, usize)>, usize), ScalarError> {
    let mut poly: Vec<Scalar> = coeffs.to_vec();
    while poly.last().map_or(false, |c| c.is_zero()) {
        poly.pop();
    }
    let mut found: Vec<(Rat, usize)> = Vec::new();
    // orders m with phi(m) <= B satisfy m <= 2 B^2 (phi(m) >= sqrt(m/2))
    let mut m_max = 2u64.saturating_mul(degree_bound.saturating_mul(degree_bound)).max(2);
    m_max = m_max.min(conductor_cap());
    for m in 1..=m_max {
        if euler_phi(m) > degree_bound {
            continue;
        }
        for k in 0..m {
            if k.gcd(&m) != 1 && !(k == 0 && m == 1) {
                continue;
            }
            if poly.len() < 2 {
                break;
            }
            let lam = Scalar::root_of_unity(k as i64, m)?;
            let mut mult = 0usize;
            while poly.len() >= 2 && poly_eval(&poly, &lam).is_zero() {
                poly = poly_deflate(&poly, &lam);
                mult += 1;
            }
            if mult > 0 {
                found.push((Rat::new(BigInt::from(k), BigInt::from(m)), mult));
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((found, poly.len().saturating_sub(1)))
}

/// All rational roots of a polynomial with rational coefficients, with
/// multiplicity, plus the remaining (rootless) degree.
pub fn rational_roots(coeffs: &[Rat]) -> (Vec<(Rat, usize)>, usize) {
    let mut poly: Vec<Rat> = coeffs.to_vec();
    while poly.last().map_or(false, |c| c.is_zero()) {
        poly.pop();
    }
    let mut found: Vec<(Rat, usize)> = Vec::new();
    // strip x^k
    let mut zero_mult = 0usize;
    while poly.len() >= 2 && poly[0].is_zero() {
        poly.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        found.push((Rat::zero(), zero_mult));
    }
    if poly.len() >= 2 {
        // clear denominators
        let mut denlcm = BigInt::one();
        for c in &poly {
            denlcm = denlcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = poly
            .iter()
            .map(|c| (c * Rat::from(denlcm.clone())).to_integer())
            .collect();
        let a0 = ints[0].abs();
        let alead = ints.last().unwrap().abs();
        let mut candidates: Vec<Rat> = Vec::new();
        for p in bigint_divisors(&a0) {
            for q in bigint_divisors(&alead) {
                let r = Rat::new(p.clone(), q.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        for cand in candidates {
            let mut mult = 0usize;
            while poly.len() >= 2 && eval_rat_poly(&poly, &cand).is_zero() {
                poly = deflate_rat(&poly, &cand);
                mult += 1;
            }
            if mult > 0 {
                found.push((cand, mult));
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    (found, poly.len().saturating_sub(1))
}

fn eval_rat_poly(coeffs: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deflate_rat(coeffs: &[Rat], root: &Rat) -> Vec<Rat> {
    let n = coeffs.len();
    let mut q = vec![Rat::zero(); n - 1];
    let mut carry = Rat::zero();
    for k in (0..n - 1).rev() {
        let c = &coeffs[k + 1] + &carry;
        q[k] = c.clone();
        carry = c * root;
    }
    q
}

fn bigint_divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let nu: u128 = n.abs().try_into().unwrap_or_else(|_| {
        panic!("coefficient too large for divisor enumeration at desk scale")
    });
    let mut out = Vec::new();
    let mut d = 1u128;
    while d * d <= nu {
        if nu % d == 0 {
            out.push(BigInt::from(d));
            out.push(BigInt::from(nu / d));
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

/// Coefficients of a char poly as rationals, or None if any is irrational.
pub fn char_poly_rational(m: &Mat) -> Option<Vec<Rat>> {
    m.char_poly().iter().map(|c| c.as_rat()).collect()
}

/// Incrementally maintained reduced row space; supports rank queries and
/// exact membership tests. Rows are kept fully reduced against each other,
/// so reduction of a probe vector against all pivots decides membership.
#[derive(Clone)]
pub struct Echelon {
    cols: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for c in 0..self.cols {
                    if !row[c].is_zero() {
                        v[c] = v[c].sub_ref(&f.mul_ref(&row[c]));
                    }
                }
            }
        }
    }

    /// Insert a vector; returns true if it increased the rank.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.cols);
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for c in 0..self.cols {
            if !v[c].is_zero() {
                v[c] = v[c].mul_ref(&inv);
            }
        }
        // keep existing rows reduced against the new pivot
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for c in 0..self.cols {
                    if !v[c].is_zero() {
                        row[c] = row[c].sub_ref(&f.mul_ref(&v[c]));
                    }
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    /// Exact membership in the row space.
    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }
}

/// Fractional parts in [0,1) of the exponents of all root-of-unity
/// eigenvalues with multiplicities; errors if the total multiplicity is
/// short of the dimension.
pub fn unit_eigen_exponents(m: &Mat) -> Result<Vec<(Rat, usize)>, ScalarError> {
    let n = m.nrows() as u64;
    let mut cond = 1u64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            cond = cond.lcm(&m.get(r, c).conductor());
        }
    }
    let bound = n * euler_phi(cond);
    let cp = m.char_poly();
    let (roots, rest) = roots_of_unity_roots(&cp, bound)?;
    let total: usize = roots.iter().map(|r| r.1).sum();
    if rest != 0 || total != m.nrows() {
        // caller maps this to the unsupported-alpha error
        return Err(ScalarError::Parse(
            "eigenvalues".into(),
            "not all eigenvalues are roots of unity".into(),
        ));
    }
    Ok(roots)
}

// ---------------------------------------------------------------------------
// matrices over the 2*pi*i extension
// ---------------------------------------------------------------------------

/// Dense matrix over [`PiScalar`]; used only for automorphism-side checks.
#[derive(Clone, PartialEq)]
pub struct PiMat {
    rows: usize,
    cols: usize,
    a: Vec<PiScalar>,
}

impl PiMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PiMat {
            rows,
            cols,
            a: vec![PiScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PiMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, PiScalar::one());
        }
        m
    }

    pub fn from_scalar_mat(m: &Mat) -> Self {
        PiMat::from_fn(m.nrows(), m.ncols(), |r, c| {
            PiScalar::from_scalar(m.get(r, c).clone())
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> PiScalar) -> Self {
        let mut m = PiMat::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &PiScalar {
        &self.a[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: PiScalar) {
        self.a[r * self.cols + c] = v;
    }

    pub fn col(&self, c: usize) -> Vec<PiScalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn matmul(&self, other: &PiMat) -> PiMat {
        assert_eq!(self.cols, other.rows);
        let mut out = PiMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.get(r, k);
                if lhs.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let rhs = other.get(k, c);
                    if !rhs.is_zero() {
                        let v = out.get(r, c).add_ref(&lhs.mul_ref(rhs));
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &PiMat) -> PiMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (x, y) in m.a.iter_mut().zip(&other.a) {
            *x = x.sub_ref(y);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    /// Coefficient matrix of t^k over all entries.
    pub fn grade(&self, k: usize) -> Mat {
        Mat::from_fn(self.rows, self.cols, |r, c| self.get(r, c).coeff(k))
    }

    /// Largest t-degree present.
    pub fn max_degree(&self) -> usize {
        self.a.iter().filter_map(|x| x.degree()).max().unwrap_or(0)
    }

    /// exp(t * N) for nilpotent N (panics if N is not nilpotent).
    pub fn exp_nilpotent(n: &Mat) -> PiMat {
        let d = n.nrows();
        let mut out = PiMat::identity(d);
        let mut power = Mat::identity(d);
        let mut fact = Rat::one();
        for k in 1..=d {
            power = power.matmul(n);
            if power.is_zero() {
                break;
            }
            assert!(k < d, "matrix is not nilpotent");
            fact *= Rat::from(BigInt::from(k as i64));
            let coeff = Scalar::from_rat(Rat::one() / &fact);
            for r in 0..d {
                for c in 0..d {
                    if !power.get(r, c).is_zero() {
                        let add = PiScalar::monomial(power.get(r, c).mul_ref(&coeff), k);
                        let v = out.get(r, c).add_ref(&add);
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for PiMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PiMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rref_rank_kernel() {
        let m = Mat::from_rows(vec![
            vec![s(1), s(2), s(3)],
            vec![s(2), s(4), s(6)],
            vec![s(1), s(0), s(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.matvec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_rows(vec![
            vec![s(0), s(0), s(1)],
            vec![s(0), s(2), s(0)],
            vec![s(1), s(0), s(0)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(3));
    }

    #[test]
    fn char_poly_of_diag() {
        let m = Mat::from_rows(vec![vec![s(2), s(0)], vec![s(0), s(3)]]);
        // (x-2)(x-3) = x^2 - 5x + 6
        let cp = m.char_poly();
        assert_eq!(cp[0], s(6));
        assert_eq!(cp[1], s(-5));
        assert_eq!(cp[2], s(1));
        assert_eq!(m.det(), s(6));
    }

    #[test]
    fn unit_eigenvalues_of_rotation() {
        // 90-degree rotation has eigenvalues +-i
        let m = Mat::from_rows(vec![vec![s(0), s(-1)], vec![s(1), s(0)]]);
        let roots = unit_eigen_exponents(&m).unwrap();
        assert_eq!(
            roots,
            vec![(rat(1, 4), 1), (rat(3, 4), 1)]
        );
    }

    #[test]
    fn rational_roots_with_multiplicity() {
        // x^2 (x - 1/2)^2
        let p = vec![
            Rat::zero(),
            Rat::zero(),
            rat(1, 4),
            rat(-1, 1),
            Rat::one(),
        ];
        let (roots, rest) = rational_roots(&p);
        assert_eq!(rest, 0);
        assert_eq!(roots, vec![(rat(0, 1), 2), (rat(1, 2), 2)]);
    }

    #[test]
    fn exp_nilpotent_grading() {
        let n = Mat::from_rows(vec![vec![s(0), s(1)], vec![s(0), s(0)]]);
        let e = PiMat::exp_nilpotent(&n);
        assert_eq!(e.grade(0), Mat::identity(2));
        assert_eq!(e.grade(1), n);
        assert!(e.max_degree() <= 1);
    }
}
