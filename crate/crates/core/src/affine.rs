//! The twisted affine Lie algebra attached to (g, form, automorphism).
//!
//! Generators are `a^i (x) t^n` for a Jordan basis vector `a^i` of spectral
//! exponent `alpha^i` and degree `n` in `alpha^i + Z`, plus a central
//! element `K`. The bracket carries the usual level term `m (a,b) delta`
//! together with the nilpotent correction `(N a, b) delta`:
//!
//! `[a t^m, b t^n] = [a,b] t^{m+n} + (m (a,b) + (N a, b)) delta_{m+n,0} K`.
//!
//! All arithmetic is exact; the central element stays symbolic until a
//! module fixes the level.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::Zero;

use crate::automorphism::Automorphism;
use crate::error::ModuleError;
use crate::lie::LieAlgebra;
use crate::scalar::{frac, Rat, Scalar};

/// A single generator: either `a^i (x) t^n` or the central element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AffineGen {
    /// Jordan index and degree, with frac(degree) = alpha^i.
    Element { index: usize, degree: Rat },
    Central,
}

/// Triangular position of a generator.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Triangular {
    Plus,
    Minus,
    Iota,
    /// The degree-zero subalgebra tag (iota plus the center); never produced
    /// by classification of a single generator with rational exponents.
    ZeroMode,
    Central,
}

/// Finite linear combination of generators plus a central part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineElement {
    /// (degree, index) -> coefficient; no explicit zeros.
    pub terms: BTreeMap<(Rat, usize), Scalar>,
    pub central: Scalar,
}

impl AffineElement {
    pub fn zero() -> Self {
        AffineElement {
            terms: BTreeMap::new(),
            central: Scalar::zero(),
        }
    }

    pub fn central(c: Scalar) -> Self {
        AffineElement {
            terms: BTreeMap::new(),
            central: c,
        }
    }

    pub fn generator(index: usize, degree: Rat) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((degree, index), Scalar::one());
        AffineElement {
            terms,
            central: Scalar::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.central.is_zero()
    }

    pub fn add_term(&mut self, index: usize, degree: Rat, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let k = (degree, index);
        let v = match self.terms.remove(&k) {
            Some(old) => old.add_ref(coeff),
            None => coeff.clone(),
        };
        if !v.is_zero() {
            self.terms.insert(k, v);
        }
    }

    pub fn add_assign(&mut self, other: &AffineElement) {
        for ((deg, idx), c) in &other.terms {
            self.add_term(*idx, deg.clone(), c);
        }
        self.central = self.central.add_ref(&other.central);
    }

    pub fn scaled(&self, s: &Scalar) -> AffineElement {
        if s.is_zero() {
            return AffineElement::zero();
        }
        AffineElement {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.mul_ref(s)))
                .collect(),
            central: self.central.mul_ref(s),
        }
    }

    pub fn negated(&self) -> AffineElement {
        self.scaled(&Scalar::from_int(-1))
    }
}

/// Context pairing the algebra with the automorphism's Jordan data.
pub struct TwistedAffine {
    algebra: Arc<LieAlgebra>,
    aut: Arc<Automorphism>,
}

impl TwistedAffine {
    pub fn new(algebra: Arc<LieAlgebra>, aut: Arc<Automorphism>) -> Self {
        TwistedAffine { algebra, aut }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn automorphism(&self) -> &Arc<Automorphism> {
        &self.aut
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Degree validity: n must lie in alpha^i + Z.
    pub fn check_degree(&self, index: usize, degree: &Rat) -> Result<(), ModuleError> {
        if &frac(degree) != self.aut.alpha(index) {
            return Err(ModuleError::CosetMismatch {
                index,
                degree: degree.to_string(),
                coset: self.aut.alpha(index).to_string(),
            });
        }
        Ok(())
    }

    /// The full bracket, with the central term symbolic.
    pub fn bracket(&self, x: &AffineElement, y: &AffineElement) -> AffineElement {
        let mut out = AffineElement::zero();
        for ((m, i), cx) in &x.terms {
            for ((n, j), cy) in &y.terms {
                let c = cx.mul_ref(cy);
                let deg = m + n;
                for (k, s) in self.aut.jbracket(*i, *j) {
                    out.add_term(*k, deg.clone(), &c.mul_ref(s));
                }
                if deg.is_zero() {
                    // m (a,b) + (N a, b)
                    let mut central = self.aut.jform().get(*i, *j).scale(m);
                    if let Some(ni) = self.aut.njump(*i) {
                        central = central.add_ref(self.aut.jform().get(ni, *j));
                    }
                    out.central = out.central.add_ref(&c.mul_ref(&central));
                }
            }
        }
        // the center brackets to zero with everything
        out
    }

    /// Central coefficient of `[a^i t^m, a^j t^n]` at level `ell`, laziness
    /// for the module engine: `(m (a^i, a^j) + (N a^i, a^j)) ell` when
    /// `m + n = 0`, else zero.
    pub fn central_value(&self, i: usize, m: &Rat, j: usize, n: &Rat, ell: &Rat) -> Scalar {
        if !(m + n).is_zero() {
            return Scalar::zero();
        }
        let mut c = self.aut.jform().get(i, j).scale(m);
        if let Some(ni) = self.aut.njump(i) {
            c = c.add_ref(self.aut.jform().get(ni, j));
        }
        c.scale(ell)
    }

    /// Triangular classification of a generator.
    pub fn classify(&self, gen: &AffineGen) -> Triangular {
        match gen {
            AffineGen::Central => Triangular::Central,
            AffineGen::Element { degree, .. } => {
                if degree > &Rat::zero() {
                    Triangular::Plus
                } else if degree < &Rat::zero() {
                    Triangular::Minus
                } else {
                    Triangular::Iota
                }
            }
        }
    }

    /// Jacobi residual `[[x,y],z] + [[y,z],x] + [[z,x],y]`; zero for a Lie
    /// algebra. The central part needs care: brackets of elements with
    /// nonzero central parts ignore the center, which is exactly right.
    pub fn jacobi_residual(
        &self,
        x: &AffineElement,
        y: &AffineElement,
        z: &AffineElement,
    ) -> AffineElement {
        let mut acc = self.bracket(&self.bracket(x, y), z);
        acc.add_assign(&self.bracket(&self.bracket(y, z), x));
        acc.add_assign(&self.bracket(&self.bracket(z, x), y));
        acc
    }

    /// All element generators with degree real part bounded by the window.
    pub fn generators_in_window(&self, window: i64) -> Vec<AffineGen> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            let alpha = self.aut.alpha(i);
            // degrees alpha + k with |alpha + k| <= window
            let mut k = -(window as i64) - 1;
            loop {
                let deg = alpha + Rat::from_integer(k.into());
                if deg > Rat::from_integer(window.into()) {
                    break;
                }
                if deg >= Rat::from_integer((-window).into()) {
                    out.push(AffineGen::Element {
                        index: i,
                        degree: deg,
                    });
                }
                k += 1;
            }
        }
        out
    }

    pub fn gen_element(&self, gen: &AffineGen) -> AffineElement {
        match gen {
            AffineGen::Central => AffineElement::central(Scalar::one()),
            AffineGen::Element { index, degree } => {
                AffineElement::generator(*index, degree.clone())
            }
        }
    }

    /// Render using generator-literal syntax (`e@1/2`, `K`).
    pub fn render_gen(&self, gen: &AffineGen) -> String {
        match gen {
            AffineGen::Central => "K".to_string(),
            AffineGen::Element { index, degree } => {
                format!("{}@{}", self.aut.jlabel(*index), degree)
            }
        }
    }

    pub fn render_element(&self, x: &AffineElement) -> String {
        let mut parts: Vec<String> = x
            .terms
            .iter()
            .map(|((deg, idx), c)| {
                let g = self.render_gen(&AffineGen::Element {
                    index: *idx,
                    degree: deg.clone(),
                });
                if c.is_one() {
                    g
                } else {
                    format!("({c})*{g}")
                }
            })
            .collect();
        if !x.central.is_zero() {
            parts.push(if x.central.is_one() {
                "K".to_string()
            } else {
                format!("({})*K", x.central)
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Parse a generator literal (`e@1/2`, `a2@-1`, `K`).
    pub fn parse_gen(&self, text: &str) -> Result<AffineGen, ModuleError> {
        let text = text.trim();
        if text == "K" {
            return Ok(AffineGen::Central);
        }
        let (label, deg) = text.split_once('@').ok_or_parse(text)?;
        let index = self
            .aut
            .jindex_of_label(label.trim())
            .ok_or_else(|| parse_err(text, "unknown generator label"))?;
        let degree = Rat::from_str(deg.trim()).map_err(|e| parse_err(text, &e.to_string()))?;
        self.check_degree(index, &degree)?;
        Ok(AffineGen::Element { index, degree })
    }
}

fn parse_err(text: &str, why: &str) -> ModuleError {
    ModuleError::Scalar(crate::error::ScalarError::Parse(
        text.to_string(),
        why.to_string(),
    ))
}

trait OkOrParse<T> {
    fn ok_or_parse(self, text: &str) -> Result<T, ModuleError>;
}

impl<T> OkOrParse<T> for Option<T> {
    fn ok_or_parse(self, text: &str) -> Result<T, ModuleError> {
        self.ok_or_else(|| parse_err(text, "expected `label@degree` or `K`"))
    }
}

impl fmt::Display for Triangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Triangular::Plus => "plus",
            Triangular::Minus => "minus",
            Triangular::Iota => "iota",
            Triangular::ZeroMode => "zero_mode",
            Triangular::Central => "central",
        };
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PiMat;
    use crate::scalar::rat;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn context(kind: &str) -> TwistedAffine {
        let alg = Arc::new(LieAlgebra::sl(2));
        let aut = match kind {
            "id" => Automorphism::identity(alg.clone()),
            "order2" => {
                let x = vec![s(0), Scalar::from_rat(rat(1, 4)), s(0)];
                let g = Automorphism::inner_exponential(&alg, &x).unwrap();
                Automorphism::from_matrix(alg.clone(), g).unwrap()
            }
            "unipotent" => {
                let x = vec![s(1), s(0), s(0)];
                let g = Automorphism::inner_exponential(&alg, &x).unwrap();
                Automorphism::from_matrix(alg.clone(), g).unwrap()
            }
            _ => unreachable!(),
        };
        TwistedAffine::new(alg, Arc::new(aut))
    }

    fn gen(ta: &TwistedAffine, lit: &str) -> AffineElement {
        ta.gen_element(&ta.parse_gen(lit).unwrap())
    }

    #[test]
    fn order_two_bracket_with_level_term() {
        let ta = context("order2");
        // [e t^{1/2}, f t^{-1/2}] = h t^0 + (1/2) K
        let x = gen(&ta, "e@1/2");
        let y = gen(&ta, "f@-1/2");
        let b = ta.bracket(&x, &y);
        assert_eq!(b.central, Scalar::from_rat(rat(1, 2)));
        let h_idx = ta.automorphism().jindex_of_label("h").unwrap();
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.terms.get(&(rat(0, 1), h_idx)), Some(&s(1)));
    }

    #[test]
    fn central_element_brackets_to_zero() {
        let ta = context("order2");
        let k = AffineElement::central(Scalar::one());
        let x = gen(&ta, "e@1/2");
        assert!(ta.bracket(&k, &x).is_zero());
        assert!(ta.bracket(&x, &k).is_zero());
    }

    #[test]
    fn unipotent_central_correction() {
        let ta = context("unipotent");
        // [h t^1, f t^{-1}] = -2 f t^0 - 2 K
        let x = gen(&ta, "h@1");
        let y = gen(&ta, "f@-1");
        let b = ta.bracket(&x, &y);
        assert_eq!(b.central, s(-2));
        let f_idx = ta.automorphism().jindex_of_label("f").unwrap();
        assert_eq!(b.terms.get(&(rat(0, 1), f_idx)), Some(&s(-2)));
        assert_eq!(b.terms.len(), 1);
    }

    #[test]
    fn classification() {
        let ta = context("order2");
        let plus = ta.parse_gen("e@1/2").unwrap();
        let iota = ta.parse_gen("h@0").unwrap();
        let minus = ta.parse_gen("f@-1/2").unwrap();
        assert_eq!(ta.classify(&plus), Triangular::Plus);
        assert_eq!(ta.classify(&iota), Triangular::Iota);
        assert_eq!(ta.classify(&minus), Triangular::Minus);
        assert_eq!(ta.classify(&AffineGen::Central), Triangular::Central);
    }

    #[test]
    fn coset_mismatch_is_rejected() {
        let ta = context("order2");
        assert!(ta.parse_gen("e@1").is_err());
        assert!(ta.parse_gen("h@1/2").is_err());
    }

    #[test]
    fn jacobi_exhaustive_small_window() {
        for kind in ["id", "order2", "unipotent"] {
            let ta = context(kind);
            let gens = ta.generators_in_window(2);
            let elems: Vec<AffineElement> =
                gens.iter().map(|g| ta.gen_element(g)).collect();
            for (i, x) in elems.iter().enumerate() {
                for y in elems.iter().skip(i) {
                    // antisymmetry
                    let mut anti = ta.bracket(x, y);
                    anti.add_assign(&ta.bracket(y, x));
                    assert!(anti.is_zero(), "antisymmetry in {kind}");
                }
            }
            // sorted triples suffice: the Jacobi residual is alternating
            for (i, x) in elems.iter().enumerate() {
                for (j, y) in elems.iter().enumerate().skip(i) {
                    for z in elems.iter().skip(j) {
                        assert!(
                            ta.jacobi_residual(x, y, z).is_zero(),
                            "jacobi in {kind}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn triangular_parts_close_under_bracket() {
        let ta = context("order2");
        let gens = ta.generators_in_window(2);
        for x in &gens {
            for y in &gens {
                let (cx, cy) = (ta.classify(x), ta.classify(y));
                if cx != cy || cx == Triangular::Central {
                    continue;
                }
                let b = ta.bracket(&ta.gen_element(x), &ta.gen_element(y));
                for ((deg, idx), c) in &b.terms {
                    if c.is_zero() {
                        continue;
                    }
                    let g = AffineGen::Element {
                        index: *idx,
                        degree: deg.clone(),
                    };
                    assert_eq!(ta.classify(&g), cx, "closure of {cx:?}");
                }
                // iota may produce central terms: [x(0), y(0)] has the
                // (N x, y) K correction; plus/minus cannot hit delta = 0
                if cx != Triangular::Iota {
                    assert!(b.central.is_zero());
                }
            }
        }
    }

    #[test]
    fn generator_literal_round_trip() {
        let ta = context("order2");
        for lit in ["e@1/2", "h@-1", "f@-3/2", "K"] {
            let g = ta.parse_gen(lit).unwrap();
            assert_eq!(ta.render_gen(&g), lit);
        }
    }

    #[test]
    fn self_bracket_vanishes_even_with_central_corrections() {
        // [X, X] = 0 needs (N a, a) = 0, which holds by the skew identity
        let ta = context("unipotent");
        for g in ta.generators_in_window(2) {
            let x = ta.gen_element(&g);
            assert!(ta.bracket(&x, &x).is_zero());
        }
    }
}
