//! Finite-dimensional Lie algebras with a nondegenerate invariant symmetric
//! bilinear form.
//!
//! Structure constants are stored sparsely per basis pair. Construction
//! validates antisymmetry, the Jacobi identity, and symmetry, invariance and
//! nondegeneracy of the form, all exactly. The built-in constructor covers
//! sl(n) with the trace form in the defining representation, which satisfies
//! the normalization (theta, theta) = 2 for a long root theta.

use num::{BigInt, One, Zero};

use crate::error::LieError;
use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};

/// Sparse vector of (basis index, coefficient).
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    /// table[i][j] = [a_i, a_j] as a sparse vector
    table: Vec<Vec<SparseVec>>,
    form: Mat,
    dual: Mat, // row i = coordinates of the dual vector of a_i
}

fn normalize_sparse(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(k, _)| *k);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (k, c) in v {
        if let Some(last) = out.last_mut() {
            if last.0 == k {
                last.1 = last.1.add_ref(&c);
                continue;
            }
        }
        out.push((k, c));
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl LieAlgebra {
    /// Build and validate an algebra from an explicit bracket table and form.
    pub fn from_structure(
        labels: Vec<String>,
        table: Vec<Vec<SparseVec>>,
        form: Mat,
    ) -> Result<Self, LieError> {
        let dim = labels.len();
        if table.len() != dim
            || table.iter().any(|row| row.len() != dim)
            || form.nrows() != dim
            || form.ncols() != dim
        {
            return Err(LieError::Shape(format!(
                "expected {dim}x{dim} bracket table and form"
            )));
        }
        let table: Vec<Vec<SparseVec>> = table
            .into_iter()
            .map(|row| row.into_iter().map(normalize_sparse).collect())
            .collect();
        if table
            .iter()
            .any(|row| row.iter().any(|v| v.iter().any(|(k, _)| *k >= dim)))
        {
            return Err(LieError::Shape("bracket index out of range".into()));
        }
        let dual = form
            .inverse()
            .ok_or(LieError::FormDegenerate(form.rank(), dim))?;
        let alg = LieAlgebra {
            dim,
            labels,
            table,
            form,
            dual,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// sl(n) with the trace form of the defining representation.
    ///
    /// Basis order: e_{ij} (i<j) row-major, then the simple coroots
    /// h_i = E_ii - E_{i+1,i+1}, then f_{ij} = E_ji (i<j). For n = 2 the
    /// labels are the classical `e`, `h`, `f`.
    pub fn sl(n: usize) -> Self {
        assert!(n >= 2, "sl(n) needs n >= 2");
        // basis as n x n rational matrices
        let mut basis: Vec<Vec<Rat>> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let idx = |r: usize, c: usize| r * n + c;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut m = vec![Rat::zero(); n * n];
                m[idx(i, j)] = Rat::one();
                basis.push(m);
                labels.push(if n == 2 {
                    "e".to_string()
                } else {
                    format!("e{}{}", i + 1, j + 1)
                });
            }
        }
        for i in 0..(n - 1) {
            let mut m = vec![Rat::zero(); n * n];
            m[idx(i, i)] = Rat::one();
            m[idx(i + 1, i + 1)] = -Rat::one();
            basis.push(m);
            labels.push(if n == 2 {
                "h".to_string()
            } else {
                format!("h{}", i + 1)
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut m = vec![Rat::zero(); n * n];
                m[idx(j, i)] = Rat::one();
                basis.push(m);
                labels.push(if n == 2 {
                    "f".to_string()
                } else {
                    format!("f{}{}", i + 1, j + 1)
                });
            }
        }
        let dim = basis.len();
        debug_assert_eq!(dim, n * n - 1);

        let matmul = |a: &[Rat], b: &[Rat]| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); n * n];
            for r in 0..n {
                for k in 0..n {
                    if a[idx(r, k)].is_zero() {
                        continue;
                    }
                    for c in 0..n {
                        if !b[idx(k, c)].is_zero() {
                            let t = &a[idx(r, k)] * &b[idx(k, c)];
                            out[idx(r, c)] += t;
                        }
                    }
                }
            }
            out
        };
        // coordinates of a traceless matrix in the chosen basis
        let coords = |m: &[Rat]| -> Vec<Rat> {
            let mut v = vec![Rat::zero(); dim];
            let mut p = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    v[p] = m[idx(i, j)].clone();
                    p += 1;
                }
            }
            // diagonal: coefficient of h_k is the partial sum of the first k
            // diagonal entries
            let mut partial = Rat::zero();
            for k in 0..(n - 1) {
                partial += &m[idx(k, k)];
                v[p] = partial.clone();
                p += 1;
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    v[p] = m[idx(j, i)].clone();
                    p += 1;
                }
            }
            v
        };

        let mut table = vec![vec![SparseVec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let ab = matmul(&basis[i], &basis[j]);
                let ba = matmul(&basis[j], &basis[i]);
                let mut comm = ab;
                for (x, y) in comm.iter_mut().zip(ba) {
                    *x -= y;
                }
                let v = coords(&comm);
                table[i][j] = v
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k, Scalar::from_rat(c)))
                    .collect();
            }
        }
        let form = Mat::from_fn(dim, dim, |i, j| {
            let prod = matmul(&basis[i], &basis[j]);
            let mut tr = Rat::zero();
            for k in 0..n {
                tr += &prod[idx(k, k)];
            }
            Scalar::from_rat(tr)
        });
        LieAlgebra::from_structure(labels, table, form).expect("sl(n) tables are consistent")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Result<usize, LieError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LieError::UnknownLabel(label.to_string()))
    }

    pub fn form(&self) -> &Mat {
        &self.form
    }

    /// Matrix with row i = coordinates of the dual basis vector of a_i, so
    /// that dual * form = identity.
    pub fn dual_basis(&self) -> &Mat {
        &self.dual
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi.mul_ref(yj);
                for (k, s) in &self.table[i][j] {
                    out[*k] = out[*k].add_ref(&c.mul_ref(s));
                }
            }
        }
        out
    }

    /// Pairing of two coordinate vectors under the invariant form.
    pub fn pair(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let fy = self.form.matvec(y);
        let mut acc = Scalar::zero();
        for (xi, fi) in x.iter().zip(fy) {
            if !xi.is_zero() && !fi.is_zero() {
                acc = acc.add_ref(&xi.mul_ref(&fi));
            }
        }
        acc
    }

    /// ad(x) as a matrix acting on coordinates.
    pub fn ad(&self, x: &[Scalar]) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut col = vec![Scalar::zero(); self.dim];
            col[j] = Scalar::one();
            let img = self.bracket(x, &col);
            for (r, v) in img.into_iter().enumerate() {
                m.set(r, j, v);
            }
        }
        m
    }

    /// Killing form kappa(x, y) = tr(ad x ad y) on the basis.
    pub fn killing_form(&self) -> Mat {
        let ads: Vec<Mat> = (0..self.dim)
            .map(|i| {
                let mut x = vec![Scalar::zero(); self.dim];
                x[i] = Scalar::one();
                self.ad(&x)
            })
            .collect();
        Mat::from_fn(self.dim, self.dim, |i, j| ads[i].matmul(&ads[j]).trace())
    }

    /// Exact validation of every structural invariant.
    pub fn validate(&self) -> Result<(), LieError> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                // antisymmetry: [a_i,a_j] + [a_j,a_i] = 0
                let mut sum = self.table[i][j].clone();
                sum.extend(self.table[j][i].iter().cloned());
                if !normalize_sparse(sum).is_empty() {
                    return Err(LieError::Antisymmetry(i, j));
                }
                if self.form.get(i, j) != self.form.get(j, i) {
                    return Err(LieError::FormAsymmetric(i, j));
                }
            }
        }
        let basis = |i: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); d];
            v[i] = Scalar::one();
            v
        };
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    let (x, y, z) = (basis(i), basis(j), basis(k));
                    let mut acc = self.bracket(&self.bracket(&x, &y), &z);
                    for (t, v) in self.bracket(&self.bracket(&y, &z), &x).into_iter().enumerate() {
                        acc[t] = acc[t].add_ref(&v);
                    }
                    for (t, v) in self.bracket(&self.bracket(&z, &x), &y).into_iter().enumerate() {
                        acc[t] = acc[t].add_ref(&v);
                    }
                    if acc.iter().any(|c| !c.is_zero()) {
                        return Err(LieError::Jacobi(i, j, k));
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    // ([a_i, a_j], a_k) + (a_j, [a_i, a_k]) = 0
                    let (x, y, z) = (basis(i), basis(j), basis(k));
                    let lhs = self.pair(&self.bracket(&x, &y), &z);
                    let rhs = self.pair(&y, &self.bracket(&x, &z));
                    if !lhs.add_ref(&rhs).is_zero() {
                        return Err(LieError::FormNotInvariant(i, j, k));
                    }
                }
            }
        }
        let rank = self.form.rank();
        if rank != d {
            return Err(LieError::FormDegenerate(rank, d));
        }
        Ok(())
    }

    /// Dual Coxeter number from the Casimir eigenvalue on the adjoint
    /// representation: sum_i ad(a_i') ad(a_i) = 2 h_vee * id.
    pub fn dual_coxeter(&self) -> Result<Rat, LieError> {
        let d = self.dim;
        let mut cas = Mat::zeros(d, d);
        for i in 0..d {
            let mut e = vec![Scalar::zero(); d];
            e[i] = Scalar::one();
            let dual_i = self.dual.row(i);
            cas = cas.add(&self.ad(&dual_i).matmul(&self.ad(&e)));
        }
        let lam = cas.get(0, 0).clone();
        let scaled = Mat::identity(d).scale(&lam);
        if cas != scaled {
            return Err(LieError::CasimirNotScalar);
        }
        let lam = lam.as_rat().ok_or(LieError::CasimirNotScalar)?;
        if lam <= Rat::zero() {
            return Err(LieError::CasimirNotScalar);
        }
        let two = Rat::from(BigInt::from(2));
        Ok(lam / two)
    }

    /// Render an element as a combination of basis labels.
    pub fn render_element(&self, x: &[Scalar]) -> String {
        let terms: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if c.is_one() {
                    self.labels[i].clone()
                } else {
                    format!("({})*{}", c, self.labels[i])
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl std::fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieAlgebra(dim={}, labels={:?})", self.dim, self.labels)
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
    fn sl2_defining_relations() {
        let g = LieAlgebra::sl(2);
        assert_eq!(g.dim(), 3);
        assert_eq!(g.labels(), &["e", "h", "f"]);
        let (e, h, f) = (0usize, 1usize, 2usize);
        // [h,e] = 2e, [h,f] = -2f, [e,f] = h
        assert_eq!(g.bracket_basis(h, e), &vec![(e, s(2))]);
        assert_eq!(g.bracket_basis(h, f), &vec![(f, s(-2))]);
        assert_eq!(g.bracket_basis(e, f), &vec![(h, s(1))]);
        // (e,f) = 1, (h,h) = 2
        assert_eq!(g.form().get(e, f), &s(1));
        assert_eq!(g.form().get(h, h), &s(2));
    }

    #[test]
    fn sl2_invariance_example() {
        // ([e,f],h) = (h,h) = 2
        let g = LieAlgebra::sl(2);
        let e = [s(1), s(0), s(0)];
        let f = [s(0), s(0), s(1)];
        let h = [s(0), s(1), s(0)];
        let ef = g.bracket(&e, &f);
        assert_eq!(g.pair(&ef, &h), s(2));
    }

    #[test]
    fn sl3_dimension_and_validation() {
        let g = LieAlgebra::sl(3);
        assert_eq!(g.dim(), 8);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn sl4_validates() {
        assert!(LieAlgebra::sl(4).validate().is_ok());
    }

    #[test]
    fn sl2_dual_basis() {
        let g = LieAlgebra::sl(2);
        // dual of e is f, dual of h is h/2
        assert_eq!(g.dual_basis().row(0), vec![s(0), s(0), s(1)]);
        assert_eq!(
            g.dual_basis().row(1),
            vec![s(0), Scalar::from_rat(rat(1, 2)), s(0)]
        );
        // dual * form = identity
        assert_eq!(g.dual_basis().matmul(g.form()), Mat::identity(3));
    }

    #[test]
    fn dual_coxeter_numbers() {
        assert_eq!(LieAlgebra::sl(2).dual_coxeter().unwrap(), rat(2, 1));
        assert_eq!(LieAlgebra::sl(3).dual_coxeter().unwrap(), rat(3, 1));
    }

    #[test]
    fn abelian_algebra_is_valid_but_not_simple() {
        let table = vec![vec![SparseVec::new(); 2]; 2];
        let g = LieAlgebra::from_structure(
            vec!["x".into(), "y".into()],
            table,
            Mat::identity(2),
        )
        .unwrap();
        assert!(matches!(g.dual_coxeter(), Err(LieError::CasimirNotScalar)));
    }

    #[test]
    fn broken_tables_are_rejected() {
        // sl2 with [e,f] = 2h breaks invariance: (e,[e,f]) = 2(e,h) = 0 but
        // ([e,e],f) = 0, while ([h, e], f)-type triples detect the defect via
        // Jacobi/invariance. Construct and expect an error.
        let s1 = |k: usize, v: i64| vec![(k, s(v))];
        let mut table = vec![vec![SparseVec::new(); 3]; 3];
        table[1][0] = s1(0, 2);
        table[0][1] = s1(0, -2);
        table[1][2] = s1(2, -2);
        table[2][1] = s1(2, 2);
        table[0][2] = s1(1, 2); // should be h, not 2h
        table[2][0] = s1(1, -2);
        let mut form = Mat::zeros(3, 3);
        form.set(0, 2, s(1));
        form.set(2, 0, s(1));
        form.set(1, 1, s(2));
        let err = LieAlgebra::from_structure(
            vec!["e".into(), "h".into(), "f".into()],
            table,
            form,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            LieError::Jacobi(..) | LieError::FormNotInvariant(..)
        ));
    }

    #[test]
    fn killing_form_of_sl2_is_multiple_of_trace_form() {
        let g = LieAlgebra::sl(2);
        // kappa = 2n * trace form for sl(n)
        assert_eq!(g.killing_form(), g.form().scale(&s(4)));
    }
}
