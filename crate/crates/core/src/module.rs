//! Induced twisted modules with PBW normal forms.
//!
//! Four realizations of the universal twisted modules are supported, named
//! by their shape:
//!
//! * `Hat`: induced from the plus part and the center, with a free formal
//!   translation generator `L(-1)` and free zero-mode tails. PBW basis:
//!   lowering modes, then `L(-1)^k`, then a sorted zero-mode tail, then a
//!   generator.
//! * `Breve`: as `Hat`, but the degree-zero subalgebra acts on the generator
//!   space through supplied matrices; zero modes reduce and the module is
//!   grading restricted.
//! * `Overarc`: the realization induced over the subalgebra generated by the
//!   degree-zero Casimir, the plus part and the center. The engine works on
//!   its canonical spanning set (lowering modes and free zero-mode tails);
//!   the Casimir relation is tracked through the generator weights rather
//!   than rewritten, so weight spaces of this realization are spanning-set
//!   counts, not quotient dimensions.
//! * `Tilde`: induced from the full degree-zero action; PBW basis is
//!   lowering modes applied to generators, grading restricted.
//!
//! Normal forms are computed by straightening: out-of-order factors are
//! swapped through the twisted bracket, plus modes annihilate generators,
//! zero modes either reduce through the supplied action or accumulate in the
//! tail, and the formal `L(-1)` commutes by
//! `[a(m), L(-1)] = m a(m-1) + (N a)(m-1)`. Rewriting is deterministic and
//! exact; the cutoff only bounds what is enumerated and reported, never the
//! intermediate arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num::{BigInt, One, Zero};

use crate::affine::TwistedAffine;
use crate::error::ModuleError;
use crate::linalg::{char_poly_rational, rational_roots, Mat};
use crate::report::Check;
use crate::scalar::{frac, Rat, Scalar};

/// Which universal realization to build.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Hat,
    Breve,
    Overarc,
    Tilde,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hat => "hat",
            Mode::Breve => "breve",
            Mode::Overarc => "overarc",
            Mode::Tilde => "tilde",
        }
    }
    /// Does the realization carry the formal translation generator?
    pub fn has_formal_translation(self) -> bool {
        matches!(self, Mode::Hat | Mode::Breve)
    }
    /// Do zero modes reduce through the generator-space action?
    pub fn reduces_iota(self) -> bool {
        matches!(self, Mode::Breve | Mode::Tilde)
    }
    /// Are Sugawara operators defined?
    pub fn has_sugawara(self) -> bool {
        matches!(self, Mode::Overarc | Mode::Tilde)
    }
}

/// How generator weights are determined.
#[derive(Clone, Debug)]
pub enum WeightSpec {
    /// Explicit grading operator on the generator space.
    Explicit(Mat),
    /// Weights from the degree-zero Casimir divided by 2(level + h_vee).
    FromOmega,
}

/// The generator space: a finite-dimensional space with a compatible
/// automorphism action and, optionally, an action of the degree-zero
/// subalgebra.
#[derive(Clone)]
pub struct GeneratorSpace {
    pub labels: Vec<String>,
    /// Semisimple exponent in [0,1) of each generator under the
    /// automorphism.
    pub betas: Vec<Rat>,
    /// Nilpotent part of the automorphism action on the space (action
    /// matrix: column b is the image of generator b).
    pub g_nilpotent: Mat,
    pub weights: WeightSpec,
    /// Action matrices of the degree-zero Jordan generators, aligned with
    /// the automorphism's iota indices. Column convention.
    pub iota_action: Option<Vec<Mat>>,
}

impl GeneratorSpace {
    /// One-dimensional space with every action zero.
    pub fn trivial(ta: &TwistedAffine, weights: WeightSpec) -> Self {
        let n_iota = ta.automorphism().iota_indices().len();
        GeneratorSpace {
            labels: vec!["w".to_string()],
            betas: vec![Rat::zero()],
            g_nilpotent: Mat::zeros(1, 1),
            weights,
            iota_action: Some(vec![Mat::zeros(1, 1); n_iota]),
        }
    }

    /// The adjoint space: generators indexed by the Jordan basis, zero modes
    /// acting by the bracket.
    pub fn adjoint(ta: &TwistedAffine) -> Self {
        let aut = ta.automorphism();
        let d = ta.dim();
        let mut iota = Vec::new();
        for &i in aut.iota_indices() {
            let m = Mat::from_fn(d, d, |r, c| {
                aut.jbracket(i, c)
                    .iter()
                    .find(|(k, _)| *k == r)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(Scalar::zero)
            });
            iota.push(m);
        }
        let mut g_nil = Mat::zeros(d, d);
        for j in 0..d {
            if let Some(k) = aut.njump(j) {
                g_nil.set(k, j, Scalar::one());
            }
        }
        GeneratorSpace {
            labels: (0..d).map(|i| aut.jlabel(i)).collect(),
            betas: aut.alphas().to_vec(),
            g_nilpotent: g_nil,
            weights: WeightSpec::FromOmega,
            iota_action: Some(iota),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// A word operator fed to the normal-form engine.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordOp {
    /// Jordan generator mode `a^i(n)`, `n` in `alpha^i + Z`.
    Mode(usize, Rat),
    /// The formal translation generator (hat/breve realizations only).
    LMinus1,
}

/// A PBW monomial applied to a generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    /// Lowering modes (degree, Jordan index), sorted ascending, degrees < 0.
    pub neg: Vec<(Rat, usize)>,
    /// Power of the formal translation generator.
    pub lpow: u32,
    /// Zero-mode tail, nondecreasing Jordan iota indices.
    pub iota: Vec<usize>,
    /// Generator index.
    pub gen: usize,
}

impl Monomial {
    pub fn generator(gen: usize) -> Self {
        Monomial {
            neg: Vec::new(),
            lpow: 0,
            iota: Vec::new(),
            gen,
        }
    }
}

/// Exact linear combination of PBW monomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ModuleElement {
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl ModuleElement {
    pub fn zero() -> Self {
        ModuleElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Scalar::one());
        ModuleElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&m) {
            Some(old) => old.add_ref(c),
            None => c.clone(),
        };
        if !v.is_zero() {
            self.terms.insert(m, v);
        }
    }

    pub fn add_assign(&mut self, other: &ModuleElement) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn add_scaled(&mut self, other: &ModuleElement, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &c.mul_ref(s));
        }
    }

    pub fn scaled(&self, s: &Scalar) -> ModuleElement {
        let mut out = ModuleElement::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn sub_assign(&mut self, other: &ModuleElement) {
        self.add_scaled(other, &Scalar::from_int(-1));
    }
}

/// A built module: context, graded bases up to the cutoff, generator
/// weights.
pub struct Module {
    ta: Arc<TwistedAffine>,
    mode: Mode,
    level: Rat,
    cutoff: Rat,
    iota_bound: usize,
    space: GeneratorSpace,
    /// Conformal weight of each generator.
    gen_weights: Vec<Rat>,
    min_weight: Rat,
    /// Dual Coxeter number if the algebra is simple with normalized form.
    dual_coxeter: Option<Rat>,
    /// Cached degree-zero Casimir action on the generator space, for
    /// from-Omega realizations.
    omega_matrix: Option<Mat>,
    /// True when the grading operator has a nilpotent part on some block.
    nilpotent_grading: bool,
    /// weight -> monomials of that weight, sorted.
    basis: BTreeMap<Rat, Vec<Monomial>>,
    /// weight -> monomial -> position in the basis list.
    index: BTreeMap<Rat, BTreeMap<Monomial, usize>>,
    /// Coordinates of sum_i [(N - alpha^i) a^i', a^i] (a fixed-point
    /// element), for the Sugawara bracket correction.
    sug_bracket: Vec<Scalar>,
    /// sum_i ((N - alpha^i)(N - alpha^i - 1) a^i', a^i).
    sug_const: Scalar,
}

impl Module {
    /// Build a module realization up to the conformal-weight cutoff.
    pub fn build(
        ta: Arc<TwistedAffine>,
        mode: Mode,
        space: GeneratorSpace,
        level: Rat,
        cutoff: Rat,
        iota_bound: usize,
    ) -> Result<Self, ModuleError> {
        let aut = ta.automorphism().clone();
        let m = space.dim();
        if space.betas.len() != m
            || space.g_nilpotent.nrows() != m
            || space.g_nilpotent.ncols() != m
        {
            return Err(ModuleError::BadGeneratorSpace(
                "generator-space shapes are inconsistent".into(),
            ));
        }
        if let Some(iota) = &space.iota_action {
            if iota.len() != aut.iota_indices().len()
                || iota.iter().any(|a| a.nrows() != m || a.ncols() != m)
            {
                return Err(ModuleError::BadGeneratorSpace(
                    "iota action shapes are inconsistent".into(),
                ));
            }
        }

        let dual_coxeter = ta.algebra().dual_coxeter().ok();
        if mode.has_sugawara() {
            let h = dual_coxeter.clone().ok_or_else(|| {
                ModuleError::BadGeneratorSpace(
                    "Sugawara realizations need a simple algebra with normalized form".into(),
                )
            })?;
            if &level + &h == Rat::zero() {
                return Err(ModuleError::CriticalLevel((-h).to_string()));
            }
        }
        match (&space.weights, mode) {
            (WeightSpec::FromOmega, Mode::Hat | Mode::Breve) => {
                return Err(ModuleError::WrongMode(format!(
                    "{} weights must be explicit",
                    mode.name()
                )));
            }
            (WeightSpec::Explicit(_), Mode::Tilde) => {
                return Err(ModuleError::WrongMode(
                    "tilde weights are always derived from the degree-zero Casimir".into(),
                ));
            }
            _ => {}
        }
        let needs_iota = mode.reduces_iota()
            || (mode == Mode::Overarc && matches!(space.weights, WeightSpec::FromOmega));
        if needs_iota && space.iota_action.is_none() {
            return Err(ModuleError::MissingIotaAction(mode.name().into()));
        }

        let mut module = Module {
            ta,
            mode,
            level,
            cutoff,
            iota_bound,
            space,
            gen_weights: Vec::new(),
            min_weight: Rat::zero(),
            dual_coxeter,
            omega_matrix: None,
            nilpotent_grading: false,
            basis: BTreeMap::new(),
            index: BTreeMap::new(),
            sug_bracket: Vec::new(),
            sug_const: Scalar::zero(),
        };
        module.precompute_sugawara_data();
        if module.space.iota_action.is_some() {
            module.validate_iota_action()?;
            module.validate_g_compatibility()?;
        }
        module.compute_weights()?;
        module.enumerate_basis();
        Ok(module)
    }

    // -- construction helpers -------------------------------------------------

    fn precompute_sugawara_data(&mut self) {
        let aut = self.ta.automorphism();
        let d = aut.dim();
        // N in Jordan coordinates as an action matrix
        let mut njordan = Mat::zeros(d, d);
        for j in 0..d {
            if let Some(k) = aut.njump(j) {
                njordan.set(k, j, Scalar::one());
            }
        }
        let mut bracket = vec![Scalar::zero(); d];
        let mut constant = Scalar::zero();
        for i in 0..d {
            let alpha = Scalar::from_rat(aut.alpha(i).clone());
            let dual_i = aut.jdual().row(i);
            // (N - alpha) a^i'
            let ndual = njordan.matvec(&dual_i);
            let shifted: Vec<Scalar> = ndual
                .iter()
                .zip(&dual_i)
                .map(|(nv, dv)| nv.sub_ref(&dv.mul_ref(&alpha)))
                .collect();
            let mut e_i = vec![Scalar::zero(); d];
            e_i[i] = Scalar::one();
            let br = aut.jbracket_vec(&shifted, &e_i);
            for (t, v) in br.into_iter().enumerate() {
                bracket[t] = bracket[t].add_ref(&v);
            }
            // ((N - alpha)(N - alpha - 1) a^i', a^i)
            let twice = njordan.matvec(&shifted);
            let shifted2: Vec<Scalar> = twice
                .iter()
                .zip(&shifted)
                .map(|(nv, sv)| {
                    nv.sub_ref(&sv.mul_ref(&alpha.add_ref(&Scalar::one())))
                })
                .collect();
            constant = constant.add_ref(&self.pair_jordan(&shifted2, &e_i));
        }
        self.sug_bracket = bracket;
        self.sug_const = constant;
    }

    fn pair_jordan(&self, x: &[Scalar], y: &[Scalar]) -> Scalar {
        let gram = self.ta.automorphism().jform();
        let mut acc = Scalar::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let g = gram.get(i, j);
                if !g.is_zero() {
                    acc = acc.add_ref(&xi.mul_ref(yj).mul_ref(g));
                }
            }
        }
        acc
    }

    /// Action matrix on the generator space of a fixed-point element given
    /// in Jordan coordinates.
    fn act_fixed_point(&self, coords: &[Scalar]) -> Result<Mat, ModuleError> {
        let m = self.space.dim();
        let aut = self.ta.automorphism();
        let iota = self
            .space
            .iota_action
            .as_ref()
            .ok_or_else(|| ModuleError::MissingIotaAction(self.mode.name().into()))?;
        let mut out = Mat::zeros(m, m);
        for (t, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match aut.iota_indices().iter().position(|&k| k == t) {
                Some(pos) => out = out.add(&iota[pos].scale(c)),
                None => {
                    return Err(ModuleError::BadGeneratorSpace(format!(
                        "element has a component outside the fixed-point subalgebra at {t}"
                    )))
                }
            }
        }
        Ok(out)
    }

    /// The degree-zero Casimir acting on the generator space: the exact
    /// evaluation of 2(level + h_vee) L(0) on the generator layer.
    pub fn omega_on_generators(&self) -> Result<Mat, ModuleError> {
        let aut = self.ta.automorphism();
        let d = aut.dim();
        let m = self.space.dim();
        let ell = Scalar::from_rat(self.level.clone());
        let mut njordan = Mat::zeros(d, d);
        for j in 0..d {
            if let Some(k) = aut.njump(j) {
                njordan.set(k, j, Scalar::one());
            }
        }
        let mut omega = Mat::zeros(m, m);
        for i in 0..d {
            let dual_i = aut.jdual().row(i);
            let mut e_i = vec![Scalar::zero(); d];
            e_i[i] = Scalar::one();
            if aut.alpha(i).is_zero() {
                // zero-mode quadratic term a^i(0) a^i'(0)
                let a_i = self.act_fixed_point(&e_i)?;
                let a_dual = self.act_fixed_point(&dual_i)?;
                omega = omega.add(&a_i.matmul(&a_dual));
            } else {
                // boundary term [a^i(alpha), a^i'(-alpha)] acting on the
                // generator layer: bracket zero mode plus the level scalar
                let br = aut.jbracket_vec(&e_i, &dual_i);
                omega = omega.add(&self.act_fixed_point(&br)?);
                let mut scal = self
                    .pair_jordan(&e_i, &dual_i)
                    .scale(aut.alpha(i));
                scal = scal.add_ref(&self.pair_jordan(&njordan.matvec(&e_i), &dual_i));
                omega = omega.add(&Mat::identity(m).scale(&scal.mul_ref(&ell)));
            }
        }
        // bracket correction: - sum_i [(N - alpha^i) a^i', a^i](0)
        let corr = self.act_fixed_point(&self.sug_bracket.clone())?;
        omega = omega.sub(&corr);
        // constant correction
        let half = Scalar::from_rat(Rat::new(BigInt::from(-1), BigInt::from(2)));
        omega = omega.add(&Mat::identity(m).scale(&self.sug_const.mul_ref(&ell).mul_ref(&half)));
        Ok(omega)
    }

    fn compute_weights(&mut self) -> Result<(), ModuleError> {
        let op = match &self.space.weights {
            WeightSpec::Explicit(mat) => mat.clone(),
            WeightSpec::FromOmega => {
                let omega = self.omega_on_generators()?;
                self.omega_matrix = Some(omega.clone());
                let h = self.dual_coxeter.clone().ok_or_else(|| {
                    ModuleError::BadGeneratorSpace(
                        "from-Omega weights need a simple algebra".into(),
                    )
                })?;
                let denom = (&self.level + &h) * Rat::from_integer(2.into());
                if denom.is_zero() {
                    return Err(ModuleError::CriticalLevel((-h).to_string()));
                }
                omega.scale(&Scalar::from_rat(Rat::one() / denom))
            }
        };
        let (weights, nilpotent) = per_generator_eigenvalues(&op)?;
        self.nilpotent_grading = nilpotent;
        self.min_weight = weights
            .iter()
            .cloned()
            .min()
            .unwrap_or_else(Rat::zero);
        self.gen_weights = weights;
        Ok(())
    }

    fn validate_iota_action(&self) -> Result<(), ModuleError> {
        let aut = self.ta.automorphism();
        let iota_idx = aut.iota_indices().to_vec();
        let ell = self.level.clone();
        let m = self.space.dim();
        for (pi, &i) in iota_idx.iter().enumerate() {
            for (pj, &j) in iota_idx.iter().enumerate() {
                let a_i = &self.space.iota_action.as_ref().unwrap()[pi];
                let a_j = &self.space.iota_action.as_ref().unwrap()[pj];
                let lhs = a_i.matmul(a_j).sub(&a_j.matmul(a_i));
                let mut e_i = vec![Scalar::zero(); aut.dim()];
                e_i[i] = Scalar::one();
                let mut e_j = vec![Scalar::zero(); aut.dim()];
                e_j[j] = Scalar::one();
                let br = aut.jbracket_vec(&e_i, &e_j);
                let mut rhs = self.act_fixed_point(&br)?;
                let central = self
                    .ta
                    .central_value(i, &Rat::zero(), j, &Rat::zero(), &ell);
                rhs = rhs.add(&Mat::identity(m).scale(&central));
                if lhs != rhs {
                    return Err(ModuleError::BadIotaAction(i, j));
                }
            }
        }
        Ok(())
    }

    fn validate_g_compatibility(&self) -> Result<(), ModuleError> {
        let aut = self.ta.automorphism();
        let m = self.space.dim();
        // nilpotent part is nilpotent and preserves the exponent grading
        if !self.space.g_nilpotent.pow(m as u32).is_zero() {
            return Err(ModuleError::BadGeneratorSpace(
                "generator-space nilpotent part is not nilpotent".into(),
            ));
        }
        for r in 0..m {
            for c in 0..m {
                if !self.space.g_nilpotent.get(r, c).is_zero()
                    && self.space.betas[r] != self.space.betas[c]
                {
                    return Err(ModuleError::BadGeneratorSpace(
                        "nilpotent part mixes exponent blocks".into(),
                    ));
                }
            }
        }
        // zero modes preserve exponents and satisfy the derivation rule with
        // the algebra-side nilpotent jump
        if let Some(iota) = &self.space.iota_action {
            for (pos, &i) in aut.iota_indices().iter().enumerate() {
                let a_i = &iota[pos];
                for r in 0..m {
                    for c in 0..m {
                        if !a_i.get(r, c).is_zero() && self.space.betas[r] != self.space.betas[c]
                        {
                            return Err(ModuleError::BadGeneratorSpace(format!(
                                "zero mode {i} mixes exponent blocks"
                            )));
                        }
                    }
                }
                let lhs = self
                    .space
                    .g_nilpotent
                    .matmul(a_i)
                    .sub(&a_i.matmul(&self.space.g_nilpotent));
                let rhs = match aut.njump(i) {
                    Some(k) => {
                        let pos_k = aut
                            .iota_indices()
                            .iter()
                            .position(|&t| t == k)
                            .expect("nilpotent jump stays in the fixed-point subalgebra");
                        iota[pos_k].clone()
                    }
                    None => Mat::zeros(m, m),
                };
                if lhs != rhs {
                    return Err(ModuleError::BadGeneratorSpace(format!(
                        "zero mode {i} is not compatible with the automorphism action"
                    )));
                }
            }
        }
        Ok(())
    }

    fn enumerate_basis(&mut self) {
        let aut = self.ta.automorphism();
        let budget_total = &self.cutoff - &self.min_weight;
        if budget_total < Rat::zero() {
            return;
        }
        // lowering steps (degree, index) sorted ascending; weight of a step
        // is -degree
        let mut steps: Vec<(Rat, usize)> = Vec::new();
        for i in 0..aut.dim() {
            let alpha = aut.alpha(i);
            let mut k = 1i64;
            loop {
                let deg = alpha - Rat::from_integer(k.into());
                if -&deg > budget_total {
                    break;
                }
                steps.push((deg, i));
                k += 1;
            }
        }
        steps.sort();

        // iota tails: nondecreasing index sequences up to the bound
        let tails: Vec<Vec<usize>> = if self.mode.reduces_iota() {
            vec![Vec::new()]
        } else {
            let mut tails = vec![Vec::new()];
            let iota = aut.iota_indices().to_vec();
            let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..self.iota_bound {
                let mut next = Vec::new();
                for t in &frontier {
                    let start = t.last().copied();
                    for &i in &iota {
                        if start.map_or(true, |s| i >= s) {
                            let mut nt = t.clone();
                            nt.push(i);
                            next.push(nt);
                        }
                    }
                }
                tails.extend(next.iter().cloned());
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            tails
        };

        let mut basis: BTreeMap<Rat, Vec<Monomial>> = BTreeMap::new();
        let mut stack: Vec<(usize, Rat, Vec<(Rat, usize)>)> =
            vec![(0, Rat::zero(), Vec::new())];
        // depth-first enumeration of nondecreasing factor lists
        while let Some((start, used, factors)) = stack.pop() {
            // emit monomials for this factor list
            for b in 0..self.space.dim() {
                let base = &used + &self.gen_weights[b];
                if &base > &self.cutoff {
                    continue;
                }
                let lmax: i64 = if self.mode.has_formal_translation() {
                    (&self.cutoff - &base).floor().to_integer().try_into().unwrap_or(0)
                } else {
                    0
                };
                for lpow in 0..=lmax.max(0) {
                    let w = &base + Rat::from_integer(lpow.into());
                    if w > self.cutoff {
                        break;
                    }
                    for tail in &tails {
                        basis.entry(w.clone()).or_default().push(Monomial {
                            neg: factors.clone(),
                            lpow: lpow as u32,
                            iota: tail.clone(),
                            gen: b,
                        });
                    }
                }
            }
            for idx in start..steps.len() {
                let (deg, i) = &steps[idx];
                let w = -deg;
                let nused = &used + &w;
                if nused > budget_total {
                    continue;
                }
                let mut nf = factors.clone();
                nf.push((deg.clone(), *i));
                stack.push((idx, nused, nf));
            }
        }
        for list in basis.values_mut() {
            list.sort();
        }
        self.index = basis
            .iter()
            .map(|(w, list)| {
                (
                    w.clone(),
                    list.iter()
                        .enumerate()
                        .map(|(p, m)| (m.clone(), p))
                        .collect(),
                )
            })
            .collect();
        self.basis = basis;
    }

    // -- accessors -------------------------------------------------------------

    pub fn context(&self) -> &Arc<TwistedAffine> {
        &self.ta
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn level(&self) -> &Rat {
        &self.level
    }
    pub fn cutoff(&self) -> &Rat {
        &self.cutoff
    }
    pub fn space(&self) -> &GeneratorSpace {
        &self.space
    }
    pub fn generator_weight(&self, b: usize) -> &Rat {
        &self.gen_weights[b]
    }
    pub fn min_weight(&self) -> &Rat {
        &self.min_weight
    }
    pub fn dual_coxeter(&self) -> Option<&Rat> {
        self.dual_coxeter.as_ref()
    }
    pub fn has_nilpotent_grading(&self) -> bool {
        self.nilpotent_grading
    }
    pub fn graded_basis(&self) -> &BTreeMap<Rat, Vec<Monomial>> {
        &self.basis
    }
    pub fn basis_at(&self, w: &Rat) -> &[Monomial] {
        self.basis.get(w).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Conformal weight of a monomial.
    pub fn weight_of(&self, m: &Monomial) -> Rat {
        let mut w = self.gen_weights[m.gen].clone();
        for (deg, _) in &m.neg {
            w -= deg;
        }
        w + Rat::from_integer((m.lpow as i64).into())
    }

    /// Coordinates of a homogeneous element over the enumerated basis of its
    /// weight, or None when a term falls outside the enumeration.
    pub fn coords(&self, elem: &ModuleElement) -> Option<(Rat, Vec<Scalar>)> {
        let mut weight: Option<Rat> = None;
        for m in elem.terms.keys() {
            let w = self.weight_of(m);
            match &weight {
                None => weight = Some(w),
                Some(prev) if *prev == w => {}
                _ => return None,
            }
        }
        let w = weight?;
        let idx = self.index.get(&w)?;
        let mut v = vec![Scalar::zero(); self.basis_at(&w).len()];
        for (m, c) in &elem.terms {
            let p = idx.get(m)?;
            v[*p] = c.clone();
        }
        Some((w, v))
    }

    // -- normal form -------------------------------------------------------------

    /// Normal form of a word applied to a generator. The word acts right to
    /// left (last operator hits the generator first). Errors on coset
    /// mismatch, on the formal translation outside hat/breve, and when the
    /// final weight exceeds the cutoff.
    pub fn normal_form(&self, word: &[WordOp], gen: usize) -> Result<ModuleElement, ModuleError> {
        let aut = self.ta.automorphism();
        for op in word {
            match op {
                WordOp::Mode(i, n) => {
                    if &frac(n) != aut.alpha(*i) {
                        return Err(ModuleError::CosetMismatch {
                            index: *i,
                            degree: n.to_string(),
                            coset: aut.alpha(*i).to_string(),
                        });
                    }
                }
                WordOp::LMinus1 => {
                    if !self.mode.has_formal_translation() {
                        return Err(ModuleError::WrongMode(self.mode.name().into()));
                    }
                }
            }
        }
        let mut elem = ModuleElement::from_monomial(Monomial::generator(gen));
        for op in word.iter().rev() {
            elem = match op {
                WordOp::Mode(i, n) => self.apply_mode(*i, n, &elem),
                WordOp::LMinus1 => self.apply_translation(&elem),
            };
        }
        for m in elem.terms.keys() {
            let w = self.weight_of(m);
            if w > self.cutoff {
                return Err(ModuleError::CutoffExceeded(
                    w.to_string(),
                    self.cutoff.to_string(),
                ));
            }
        }
        Ok(elem)
    }

    /// Exact mode action on an element (no cutoff checks).
    pub fn apply_mode(&self, i: usize, n: &Rat, elem: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (m, c) in &elem.terms {
            self.apply_mode_mono(i, n, m, c, &mut out);
        }
        out
    }

    /// Exact formal-translation action (hat/breve).
    pub fn apply_translation(&self, elem: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (m, c) in &elem.terms {
            self.apply_translation_mono(m, c, &mut out);
        }
        out
    }

    fn apply_mode_mono(
        &self,
        i: usize,
        n: &Rat,
        mono: &Monomial,
        coeff: &Scalar,
        out: &mut ModuleElement,
    ) {
        debug_assert_eq!(&frac(n), self.ta.automorphism().alpha(i), "coset");
        if n < &Rat::zero() {
            // lowering: insert in sorted position
            if mono
                .neg
                .first()
                .map_or(true, |(d0, i0)| (n, &i) <= (d0, i0))
            {
                let mut m = mono.clone();
                m.neg.insert(0, (n.clone(), i));
                out.add_term(m, coeff);
                return;
            }
            let (d0, i0) = mono.neg[0].clone();
            let rest = Monomial {
                neg: mono.neg[1..].to_vec(),
                ..mono.clone()
            };
            self.swap_through(i, n, i0, &d0, &rest, coeff, out);
        } else if n > &Rat::zero() {
            if let Some((d0, i0)) = mono.neg.first().cloned() {
                let rest = Monomial {
                    neg: mono.neg[1..].to_vec(),
                    ..mono.clone()
                };
                self.swap_through(i, n, i0, &d0, &rest, coeff, out);
            } else if mono.lpow > 0 {
                self.commute_past_translation(i, n, mono, coeff, out);
            } else if let Some(&j0) = mono.iota.first() {
                let rest = Monomial {
                    iota: mono.iota[1..].to_vec(),
                    ..mono.clone()
                };
                self.swap_through(i, n, j0, &Rat::zero(), &rest, coeff, out);
            }
            // else: plus mode annihilates the generator
        } else {
            // zero mode
            if let Some((d0, i0)) = mono.neg.first().cloned() {
                let rest = Monomial {
                    neg: mono.neg[1..].to_vec(),
                    ..mono.clone()
                };
                self.swap_through(i, n, i0, &d0, &rest, coeff, out);
            } else if mono.lpow > 0 {
                self.commute_past_translation(i, n, mono, coeff, out);
            } else if self.mode.reduces_iota() {
                // reduce through the generator-space action
                let aut = self.ta.automorphism();
                let pos = aut
                    .iota_indices()
                    .iter()
                    .position(|&t| t == i)
                    .expect("zero mode outside the fixed-point subalgebra");
                let a_i = &self.space.iota_action.as_ref().unwrap()[pos];
                for c in 0..self.space.dim() {
                    let v = a_i.get(c, mono.gen);
                    if !v.is_zero() {
                        let mut m = mono.clone();
                        m.gen = c;
                        out.add_term(m, &coeff.mul_ref(v));
                    }
                }
            } else {
                // free tail: keep sorted
                if mono.iota.first().map_or(true, |&j0| i <= j0) {
                    let mut m = mono.clone();
                    m.iota.insert(0, i);
                    out.add_term(m, coeff);
                } else {
                    let j0 = mono.iota[0];
                    let rest = Monomial {
                        iota: mono.iota[1..].to_vec(),
                        ..mono.clone()
                    };
                    self.swap_through(i, n, j0, &Rat::zero(), &rest, coeff, out);
                }
            }
        }
    }

    /// `a^i(n) a^{j0}(d0) rest = a^{j0}(d0) a^i(n) rest + [a^i(n), a^{j0}(d0)] rest`.
    fn swap_through(
        &self,
        i: usize,
        n: &Rat,
        j0: usize,
        d0: &Rat,
        rest: &Monomial,
        coeff: &Scalar,
        out: &mut ModuleElement,
    ) {
        let inner = self.apply_mode(
            i,
            n,
            &ModuleElement::from_monomial(rest.clone()),
        );
        let mut left = ModuleElement::zero();
        for (m, c) in &inner.terms {
            self.apply_mode_mono(j0, d0, m, c, &mut left);
        }
        out.add_scaled(&left, coeff);
        // bracket terms
        let aut = self.ta.automorphism();
        let deg = n + d0;
        for (k, s) in aut.jbracket(i, j0) {
            let mut br = ModuleElement::zero();
            self.apply_mode_mono(*k, &deg, rest, &coeff.mul_ref(s), &mut br);
            out.add_assign(&br);
        }
        let central = self.ta.central_value(i, n, j0, d0, &self.level);
        if !central.is_zero() {
            out.add_term(rest.clone(), &coeff.mul_ref(&central));
        }
    }

    /// `a^i(n) L^k X = L (a^i(n) L^{k-1} X) + n a^i(n-1) L^{k-1} X + (N a^i)(n-1) L^{k-1} X`.
    fn commute_past_translation(
        &self,
        i: usize,
        n: &Rat,
        mono: &Monomial,
        coeff: &Scalar,
        out: &mut ModuleElement,
    ) {
        let mut rest = mono.clone();
        rest.lpow -= 1;
        let rest_elem = ModuleElement::from_monomial(rest.clone());
        let with_mode = self.apply_mode(i, n, &rest_elem);
        out.add_scaled(&self.apply_translation(&with_mode), coeff);
        let lowered = n - Rat::one();
        if !n.is_zero() {
            let t = self.apply_mode(i, &lowered, &rest_elem);
            out.add_scaled(&t, &coeff.mul_ref(&Scalar::from_rat(n.clone())));
        }
        if let Some(k) = self.ta.automorphism().njump(i) {
            let t = self.apply_mode(k, &lowered, &rest_elem);
            out.add_scaled(&t, coeff);
        }
    }

    fn apply_translation_mono(&self, mono: &Monomial, coeff: &Scalar, out: &mut ModuleElement) {
        if let Some((d0, i0)) = mono.neg.first().cloned() {
            // L a(d0) X = a(d0) L X - d0 a(d0 - 1) X - (N a)(d0 - 1) X
            let rest = Monomial {
                neg: mono.neg[1..].to_vec(),
                ..mono.clone()
            };
            let rest_elem = ModuleElement::from_monomial(rest.clone());
            let trans = self.apply_translation(&rest_elem);
            let mut first = ModuleElement::zero();
            for (m, c) in &trans.terms {
                self.apply_mode_mono(i0, &d0, m, c, &mut first);
            }
            out.add_scaled(&first, coeff);
            let lowered = &d0 - Rat::one();
            let t = self.apply_mode(i0, &lowered, &rest_elem);
            out.add_scaled(&t, &coeff.mul_ref(&Scalar::from_rat(-d0.clone())));
            if let Some(k) = self.ta.automorphism().njump(i0) {
                let t = self.apply_mode(k, &lowered, &rest_elem);
                out.add_scaled(&t, &coeff.neg_ref());
            }
        } else {
            let mut m = mono.clone();
            m.lpow += 1;
            out.add_term(m, coeff);
        }
    }

    /// The operator `((-1)^k / k!) (N^k a)(n)` applied to an element, for an
    /// algebra element `x` in a single eigenspace, given in Jordan
    /// coordinates. This is the log-degree-k component of the twisted field
    /// of `x`.
    pub fn field_component(
        &self,
        x: &[Scalar],
        n: &Rat,
        k: usize,
        elem: &ModuleElement,
    ) -> Result<ModuleElement, ModuleError> {
        let aut = self.ta.automorphism();
        let mut coeff = Rat::one();
        for t in 1..=k {
            coeff /= Rat::from_integer((t as i64).into());
        }
        if k % 2 == 1 {
            coeff = -coeff;
        }
        let mut out = ModuleElement::zero();
        for (t, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let Some(target) = aut.njump_pow(t, k) else {
                continue;
            };
            if &frac(n) != aut.alpha(target) {
                return Err(ModuleError::CosetMismatch {
                    index: target,
                    degree: n.to_string(),
                    coset: aut.alpha(target).to_string(),
                });
            }
            let part = self.apply_mode(target, n, elem);
            out.add_scaled(&part, &c.mul_ref(&Scalar::from_rat(coeff.clone())));
        }
        Ok(out)
    }

    // -- Sugawara operators ------------------------------------------------------

    /// Twisted Sugawara operator L(n) applied to an element. Requires a
    /// Sugawara-capable realization. The two normal-ordered sums truncate
    /// per term through the lower bound of the module.
    pub fn sugawara(&self, n: i64, elem: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        if !self.mode.has_sugawara() {
            return Err(ModuleError::WrongMode(self.mode.name().into()));
        }
        let h = self.dual_coxeter.clone().expect("checked at build");
        let denom = (&self.level + &h) * Rat::from_integer(2.into());
        let norm = Scalar::from_rat(Rat::one() / denom);
        let nrat = Rat::from_integer(n.into());
        let aut = self.ta.automorphism();
        let d = aut.dim();
        let mut out = ModuleElement::zero();
        for (mono, coeff) in &elem.terms {
            let wt = self.weight_of(mono);
            let unit = {
                let mut e = ModuleElement::zero();
                e.add_term(mono.clone(), coeff);
                e
            };
            for i in 0..d {
                let alpha = aut.alpha(i).clone();
                let dual_i = aut.jdual().row(i);
                // first sum: a^i'(-p) a^i(p+n), p in alpha + Z_+
                let mut k = 1i64;
                loop {
                    let p = &alpha + Rat::from_integer(k.into());
                    if &p + &nrat > &wt - &self.min_weight {
                        break;
                    }
                    let inner = self.apply_mode(i, &(&p + &nrat), &unit);
                    if !inner.is_zero() {
                        let outer = self.apply_dual_mode(&dual_i, &(-&p), &inner);
                        out.add_scaled(&outer, &norm);
                    }
                    k += 1;
                }
                // second sum: a^i(p+n) a^i'(-p), p in alpha - N
                let mut k = 0i64;
                loop {
                    let p = &alpha - Rat::from_integer(k.into());
                    if &wt + &p < self.min_weight {
                        break;
                    }
                    let inner = self.apply_dual_mode(&dual_i, &(-&p), &unit);
                    if !inner.is_zero() {
                        let outer = self.apply_mode(i, &(&p + &nrat), &inner);
                        out.add_scaled(&outer, &norm);
                    }
                    k += 1;
                }
            }
            // bracket correction: - [(N - alpha) a^i', a^i](n) summed over i
            let mut corr = ModuleElement::zero();
            for (t, c) in self.sug_bracket.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let part = self.apply_mode(t, &nrat, &unit);
                corr.add_scaled(&part, c);
            }
            out.add_scaled(&corr, &norm.neg_ref());
            // constant correction at n = 0
            if n == 0 {
                let quarter = Scalar::from_rat(
                    -self.level.clone()
                        / ((&self.level + &h) * Rat::from_integer(4.into())),
                );
                out.add_scaled(&unit, &self.sug_const.mul_ref(&quarter));
            }
        }
        Ok(out)
    }

    fn apply_dual_mode(&self, dual: &[Scalar], deg: &Rat, elem: &ModuleElement) -> ModuleElement {
        let mut out = ModuleElement::zero();
        for (s, c) in dual.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let part = self.apply_mode(s, deg, elem);
            out.add_scaled(&part, c);
        }
        out
    }

    /// The degree-zero Casimir action: `2(level + h_vee) L(0)`.
    pub fn omega_action(&self, elem: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        let h = self.dual_coxeter.clone().ok_or_else(|| {
            ModuleError::BadGeneratorSpace("needs a simple algebra".into())
        })?;
        let factor = Scalar::from_rat((&self.level + &h) * Rat::from_integer(2.into()));
        Ok(self.sugawara(0, elem)?.scaled(&factor))
    }

    /// Conformal weight of a generator, for from-Omega realizations the
    /// eigenvalue of the degree-zero Casimir divided by 2(level + h_vee).
    pub fn twist_weight(&self, b: usize) -> &Rat {
        &self.gen_weights[b]
    }

    /// Virasoro central charge `level dim / (level + h_vee)`.
    pub fn central_charge(&self) -> Option<Rat> {
        let h = self.dual_coxeter.clone()?;
        let dim = Rat::from_integer((self.ta.dim() as i64).into());
        Some(&self.level * dim / (&self.level + &h))
    }

    // -- character ---------------------------------------------------------------

    /// Graded dimension table up to the requested weight.
    pub fn character(&self, max_weight: &Rat) -> Result<Vec<(Rat, usize)>, ModuleError> {
        if max_weight > &self.cutoff {
            return Err(ModuleError::CutoffExceeded(
                max_weight.to_string(),
                self.cutoff.to_string(),
            ));
        }
        Ok(self
            .basis
            .iter()
            .filter(|(w, _)| *w <= max_weight)
            .map(|(w, list)| (w.clone(), list.len()))
            .collect())
    }

    // -- verification --------------------------------------------------------------

    /// Structural verification: commutator fidelity against the abstract
    /// bracket, Virasoro relations, grading, compatibility of the
    /// automorphism action, and the formal-translation rule.
    pub fn verify(&self, window: i64) -> Vec<Check> {
        let suite = "module";
        let aut = self.ta.automorphism();
        let mut out = Vec::new();
        let gens = self.ta.generators_in_window(window);
        let basis_list: Vec<Monomial> = self
            .basis
            .values()
            .flat_map(|v| v.iter().cloned())
            .collect();

        // (i) commutator fidelity
        let t0 = Instant::now();
        let mut bad: Option<String> = None;
        let mut central_witness: Option<String> = None;
        'comm: for gx in &gens {
            for gy in &gens {
                let (i, m) = match gx {
                    crate::affine::AffineGen::Element { index, degree } => (*index, degree.clone()),
                    _ => continue,
                };
                let (j, n) = match gy {
                    crate::affine::AffineGen::Element { index, degree } => (*index, degree.clone()),
                    _ => continue,
                };
                let br = self.ta.bracket(
                    &self.ta.gen_element(gx),
                    &self.ta.gen_element(gy),
                );
                if central_witness.is_none() && (&m + &n).is_zero() {
                    // does the nilpotent correction contribute?
                    if let Some(ni) = aut.njump(i) {
                        if !aut.jform().get(ni, j).is_zero() {
                            central_witness = Some(format!(
                                "[{}, {}] = {}",
                                self.ta.render_gen(gx),
                                self.ta.render_gen(gy),
                                self.ta.render_element(&br)
                            ));
                        }
                    }
                }
                for mono in &basis_list {
                    let v = ModuleElement::from_monomial(mono.clone());
                    let xy = self.apply_mode(i, &m, &self.apply_mode(j, &n, &v));
                    let yx = self.apply_mode(j, &n, &self.apply_mode(i, &m, &v));
                    let mut lhs = xy;
                    lhs.sub_assign(&yx);
                    // action of the abstract bracket at this level
                    let mut rhs = ModuleElement::zero();
                    for ((deg, t), c) in &br.terms {
                        let part = self.apply_mode(*t, deg, &v);
                        rhs.add_scaled(&part, c);
                    }
                    rhs.add_scaled(&v, &br.central.scale(&self.level));
                    lhs.sub_assign(&rhs);
                    if !lhs.is_zero() {
                        bad = Some(format!(
                            "[{}, {}] action mismatch on a basis vector of weight {}",
                            self.ta.render_gen(gx),
                            self.ta.render_gen(gy),
                            self.weight_of(mono)
                        ));
                        break 'comm;
                    }
                }
            }
        }
        out.push(timed(
            Check::verdict(suite, "commutator-fidelity", bad.is_none(), || {
                bad.clone().unwrap()
            }),
            t0,
        ));
        out.push(match central_witness {
            Some(w) => Check::pass(suite, "central-correction-exercised").with_witness(w),
            None => Check::skipped(
                suite,
                "central-correction-exercised",
                "no nonzero nilpotent correction in the window".into(),
            ),
        });

        // grading: a(n) maps weight d to weight d - n
        let t0 = Instant::now();
        let mut bad: Option<String> = None;
        'grade: for g in &gens {
            let (i, n) = match g {
                crate::affine::AffineGen::Element { index, degree } => (*index, degree.clone()),
                _ => continue,
            };
            for mono in &basis_list {
                let v = ModuleElement::from_monomial(mono.clone());
                let img = self.apply_mode(i, &n, &v);
                let expect = self.weight_of(mono) - &n;
                for m in img.terms.keys() {
                    if self.weight_of(m) != expect {
                        bad = Some(format!(
                            "{} applied to weight {} produced weight {}",
                            self.ta.render_gen(g),
                            self.weight_of(mono),
                            self.weight_of(m)
                        ));
                        break 'grade;
                    }
                }
            }
        }
        out.push(timed(
            Check::verdict(suite, "mode-grading", bad.is_none(), || bad.clone().unwrap()),
            t0,
        ));

        // automorphism compatibility: the semisimple exponent is additive and
        // the nilpotent action satisfies the derivation rule on basis vectors
        let t0 = Instant::now();
        let mut bad: Option<String> = None;
        'compat: for g in &gens {
            let (i, n) = match g {
                crate::affine::AffineGen::Element { index, degree } => (*index, degree.clone()),
                _ => continue,
            };
            for mono in &basis_list {
                let v = ModuleElement::from_monomial(mono.clone());
                // [N_W, a^i(n)] v = (N a^i)(n) v
                let mut lhs = self.nilpotent_action(&self.apply_mode(i, &n, &v));
                lhs.sub_assign(&self.apply_mode(i, &n, &self.nilpotent_action(&v)));
                let rhs = match aut.njump(i) {
                    Some(k) => self.apply_mode(k, &n, &v),
                    None => ModuleElement::zero(),
                };
                let mut diff = lhs;
                diff.sub_assign(&rhs);
                if !diff.is_zero() {
                    bad = Some(format!(
                        "nilpotent derivation defect for {} on weight {}",
                        self.ta.render_gen(g),
                        self.weight_of(mono)
                    ));
                    break 'compat;
                }
                let img = self.apply_mode(i, &n, &v);
                let expect = crate::scalar::coset_sum(
                    aut.alpha(i),
                    &self.exponent_of(mono),
                );
                for m in img.terms.keys() {
                    if self.exponent_of(m) != expect {
                        bad = Some(format!(
                            "exponent defect for {} on a weight-{} vector",
                            self.ta.render_gen(g),
                            self.weight_of(mono)
                        ));
                        break 'compat;
                    }
                }
            }
        }
        out.push(timed(
            Check::verdict(suite, "automorphism-compatibility", bad.is_none(), || {
                bad.clone().unwrap()
            }),
            t0,
        ));

        // formal translation rule (hat/breve)
        let t0 = Instant::now();
        if self.mode.has_formal_translation() {
            let mut bad: Option<String> = None;
            'trans: for g in &gens {
                let (i, n) = match g {
                    crate::affine::AffineGen::Element { index, degree } => {
                        (*index, degree.clone())
                    }
                    _ => continue,
                };
                for mono in &basis_list {
                    let v = ModuleElement::from_monomial(mono.clone());
                    let mut lhs = self.apply_mode(i, &n, &self.apply_translation(&v));
                    lhs.sub_assign(&self.apply_translation(&self.apply_mode(i, &n, &v)));
                    let lowered = &n - Rat::one();
                    let mut rhs = self
                        .apply_mode(i, &lowered, &v)
                        .scaled(&Scalar::from_rat(n.clone()));
                    if let Some(k) = aut.njump(i) {
                        rhs.add_assign(&self.apply_mode(k, &lowered, &v));
                    }
                    let mut diff = lhs;
                    diff.sub_assign(&rhs);
                    if !diff.is_zero() {
                        bad = Some(format!(
                            "translation commutator defect for {}",
                            self.ta.render_gen(g)
                        ));
                        break 'trans;
                    }
                }
            }
            out.push(timed(
                Check::verdict(suite, "translation-commutator", bad.is_none(), || {
                    bad.clone().unwrap()
                }),
                t0,
            ));
        } else {
            out.push(Check::skipped(
                suite,
                "translation-commutator",
                "no formal translation generator in this realization".into(),
            ));
        }

        // Sugawara checks
        if self.mode.has_sugawara() {
            // L(0) grading: the weight is the generalized eigenvalue of
            // L(0), exactly an eigenvalue when the twist and the generator
            // grading are semisimple
            let t0 = Instant::now();
            if self.mode.reduces_iota() {
                let semisimple =
                    !self.ta.automorphism().has_nilpotent_part() && !self.nilpotent_grading;
                let mut bad: Option<String> = None;
                for mono in &basis_list {
                    let v = ModuleElement::from_monomial(mono.clone());
                    let w = self.weight_of(mono);
                    if semisimple {
                        let mut lhs = self.sugawara(0, &v).expect("sugawara mode");
                        lhs.sub_assign(&v.scaled(&Scalar::from_rat(w.clone())));
                        if !lhs.is_zero() {
                            bad = Some(format!("L(0) != {w} on a weight-{w} vector"));
                            break;
                        }
                    } else if !self.l0_generalized_eigenvector(&v, &w) {
                        bad = Some(format!(
                            "weight {w} is not the generalized L(0) eigenvalue"
                        ));
                        break;
                    }
                }
                out.push(timed(
                    Check::verdict(suite, "l0-grading", bad.is_none(), || bad.clone().unwrap()),
                    t0,
                ));
            } else {
                out.push(Check::skipped(
                    suite,
                    "l0-grading",
                    "spanning-set realization does not decide the Casimir relation".into(),
                ));
            }

            // from-Omega consistency: generator weights against L(0)
            let t0 = Instant::now();
            if matches!(self.space.weights, WeightSpec::FromOmega) && self.mode.reduces_iota() {
                let mut bad: Option<String> = None;
                for b in 0..self.space.dim() {
                    let v = ModuleElement::from_monomial(Monomial::generator(b));
                    if !self.l0_generalized_eigenvector(&v, &self.gen_weights[b].clone()) {
                        bad = Some(format!("generator {b} weight mismatch"));
                        break;
                    }
                }
                out.push(timed(
                    Check::verdict(suite, "twist-weight-consistency", bad.is_none(), || {
                        bad.clone().unwrap()
                    }),
                    t0,
                ));
            } else {
                out.push(Check::skipped(
                    suite,
                    "twist-weight-consistency",
                    "weights are explicit or zero modes are free".into(),
                ));
            }

            // Virasoro commutators on vectors with enough headroom
            let t0 = Instant::now();
            let c = self.central_charge().expect("simple algebra");
            let mut bad: Option<String> = None;
            let two = Rat::from_integer(2.into());
            let headroom = &self.cutoff - &two;
            'vira: for mono in &basis_list {
                if self.weight_of(mono) > headroom {
                    continue;
                }
                let v = ModuleElement::from_monomial(mono.clone());
                for m in -2i64..=2 {
                    for n in -2i64..=2 {
                        if (m + n).abs() > 2 {
                            continue;
                        }
                        if let Some(w) = self.virasoro_residual(m, n, &c, &v) {
                            if !w.is_zero() {
                                bad = Some(format!(
                                    "[L({m}), L({n})] defect on a weight-{} vector",
                                    self.weight_of(mono)
                                ));
                                break 'vira;
                            }
                        }
                    }
                }
            }
            out.push(timed(
                Check::verdict(suite, "virasoro-commutators", bad.is_none(), || {
                    bad.clone().unwrap()
                }),
                t0,
            ));
        } else {
            out.push(Check::skipped(
                suite,
                "virasoro-commutators",
                "no Sugawara operators in this realization".into(),
            ));
        }
        out
    }

    /// Does `(L(0) - wt)^k v` vanish for some small k? Weights are
    /// generalized L(0) eigenvalues when the twist is non-semisimple.
    pub fn l0_generalized_eigenvector(&self, v: &ModuleElement, wt: &Rat) -> bool {
        // nilpotency height of the Leibniz action: each factor slot
        // contributes at most the algebra dimension
        let slots = v
            .terms
            .keys()
            .map(|m| m.neg.len() + m.iota.len() + 1)
            .max()
            .unwrap_or(1);
        let bound = slots * self.ta.dim() + self.space.dim() + 1;
        let shift = Scalar::from_rat(-wt.clone());
        let mut cur = v.clone();
        for _ in 0..bound {
            if cur.is_zero() {
                return true;
            }
            let Ok(mut next) = self.sugawara(0, &cur) else {
                return false;
            };
            next.add_scaled(&cur, &shift);
            cur = next;
        }
        cur.is_zero()
    }

    /// `[L(m), L(n)] v - (m - n) L(m+n) v - delta (m^3 - m)/12 c v`, or None
    /// when the computation would not stay within the enumerated window.
    pub fn virasoro_residual(
        &self,
        m: i64,
        n: i64,
        central_charge: &Rat,
        v: &ModuleElement,
    ) -> Option<ModuleElement> {
        let lm_ln = self.sugawara(m, &self.sugawara(n, v).ok()?).ok()?;
        let ln_lm = self.sugawara(n, &self.sugawara(m, v).ok()?).ok()?;
        let lsum = self.sugawara(m + n, v).ok()?;
        let mut out = lm_ln;
        out.sub_assign(&ln_lm);
        out.add_scaled(
            &lsum,
            &Scalar::from_rat(Rat::from_integer((n - m).into())),
        );
        if m + n == 0 {
            let coef = Rat::from_integer((m * m * m - m).into())
                / Rat::from_integer(12.into())
                * central_charge;
            out.add_scaled(v, &Scalar::from_rat(-coef));
        }
        Some(out)
    }

    /// Leibniz action of the nilpotent part of the automorphism on a module
    /// element: each factor is replaced in place by its nilpotent image and
    /// the result is re-normalized.
    pub fn nilpotent_action(&self, elem: &ModuleElement) -> ModuleElement {
        let aut = self.ta.automorphism();
        let mut out = ModuleElement::zero();
        for (mono, coeff) in &elem.terms {
            // derivation over the lowering factors
            for pos in 0..mono.neg.len() {
                let (deg, i) = mono.neg[pos].clone();
                let Some(k) = aut.njump(i) else { continue };
                let suffix = Monomial {
                    neg: mono.neg[pos + 1..].to_vec(),
                    ..mono.clone()
                };
                let mut cur =
                    self.apply_mode(k, &deg, &ModuleElement::from_monomial(suffix));
                for (d2, i2) in mono.neg[..pos].iter().rev() {
                    cur = self.apply_mode(*i2, d2, &cur);
                }
                out.add_scaled(&cur, coeff);
            }
            // derivation over the zero-mode tail
            for pos in 0..mono.iota.len() {
                let i = mono.iota[pos];
                let Some(k) = aut.njump(i) else { continue };
                let suffix = Monomial {
                    neg: Vec::new(),
                    lpow: 0,
                    iota: mono.iota[pos + 1..].to_vec(),
                    gen: mono.gen,
                };
                let mut cur =
                    self.apply_mode(k, &Rat::zero(), &ModuleElement::from_monomial(suffix));
                for j in mono.iota[..pos].iter().rev() {
                    cur = self.apply_mode(*j, &Rat::zero(), &cur);
                }
                for _ in 0..mono.lpow {
                    cur = self.apply_translation(&cur);
                }
                for (d2, i2) in mono.neg.iter().rev() {
                    cur = self.apply_mode(*i2, d2, &cur);
                }
                out.add_scaled(&cur, coeff);
            }
            // generator part
            for c in 0..self.space.dim() {
                let v = self.space.g_nilpotent.get(c, mono.gen);
                if !v.is_zero() {
                    let mut m = mono.clone();
                    m.gen = c;
                    out.add_term(m, &coeff.mul_ref(v));
                }
            }
        }
        out
    }

    /// Semisimple exponent (in [0,1)) of a monomial under the automorphism.
    pub fn exponent_of(&self, mono: &Monomial) -> Rat {
        let aut = self.ta.automorphism();
        let mut acc = self.space.betas[mono.gen].clone();
        for (_, i) in &mono.neg {
            acc = crate::scalar::coset_sum(&acc, aut.alpha(*i));
        }
        // iota contributions are exponent zero
        acc
    }

    /// Render a monomial with generator literals.
    pub fn render_monomial(&self, m: &Monomial) -> String {
        let aut = self.ta.automorphism();
        let mut parts: Vec<String> = m
            .neg
            .iter()
            .map(|(deg, i)| format!("{}@{}", aut.jlabel(*i), deg))
            .collect();
        if m.lpow > 0 {
            parts.push(if m.lpow == 1 {
                "L(-1)".to_string()
            } else {
                format!("L(-1)^{}", m.lpow)
            });
        }
        parts.extend(m.iota.iter().map(|i| format!("{}@0", aut.jlabel(*i))));
        parts.push(format!("w{}", m.gen));
        parts.join(" ")
    }

    pub fn render_element(&self, elem: &ModuleElement) -> String {
        if elem.is_zero() {
            return "0".to_string();
        }
        elem.terms
            .iter()
            .map(|(m, c)| {
                if c.is_one() {
                    self.render_monomial(m)
                } else {
                    format!("({}) {}", c, self.render_monomial(m))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Module(mode={}, level={}, cutoff={}, generators={})",
            self.mode.name(),
            self.level,
            self.cutoff,
            self.space.dim()
        )
    }
}

fn timed(mut c: Check, t0: Instant) -> Check {
    c.ms = t0.elapsed().as_millis();
    c
}

/// Per-basis-vector generalized eigenvalues of a grading operator; the
/// second component flags a nilpotent part. Errors when eigenvalues are
/// irrational or a basis vector mixes generalized eigenspaces.
fn per_generator_eigenvalues(op: &Mat) -> Result<(Vec<Rat>, bool), ModuleError> {
    let m = op.nrows();
    if m == 0 {
        return Ok((Vec::new(), false));
    }
    let cp = char_poly_rational(op)
        .ok_or_else(|| ModuleError::NonRationalWeight("irrational characteristic".into()))?;
    let (roots, rest) = rational_roots(&cp);
    let total: usize = roots.iter().map(|r| r.1).sum();
    if rest != 0 || total != m {
        return Err(ModuleError::NonRationalWeight(
            "grading operator has irrational eigenvalues".into(),
        ));
    }
    // assemble generalized eigenspace bases
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    let mut col_root: Vec<usize> = Vec::new();
    let mut nilpotent = false;
    for (ri, (lam, _)) in roots.iter().enumerate() {
        let shift = op.sub(&Mat::identity(m).scale(&Scalar::from_rat(lam.clone())));
        let space = shift.pow(m as u32).kernel_basis();
        for v in space {
            let img = shift.matvec(&v);
            if img.iter().any(|x| !x.is_zero()) {
                nilpotent = true;
            }
            cols.push(v);
            col_root.push(ri);
        }
    }
    let p = Mat::from_fn(m, m, |r, c| cols[c][r].clone());
    let p_inv = p
        .inverse()
        .ok_or_else(|| ModuleError::NonRationalWeight("defective grading operator".into()))?;
    let mut weights = Vec::with_capacity(m);
    for b in 0..m {
        let coords = p_inv.col(b);
        let mut found: Option<usize> = None;
        for (t, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                match found {
                    None => found = Some(col_root[t]),
                    Some(r) if r == col_root[t] => {}
                    _ => return Err(ModuleError::AmbiguousWeight(b)),
                }
            }
        }
        let ri = found.ok_or(ModuleError::AmbiguousWeight(b))?;
        weights.push(roots[ri].0.clone());
    }
    Ok((weights, nilpotent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::Automorphism;
    use crate::lie::LieAlgebra;
    use crate::scalar::{rat, rint};

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn context(kind: &str) -> Arc<TwistedAffine> {
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
        Arc::new(TwistedAffine::new(alg, Arc::new(aut)))
    }

    /// Iota action of the unipotent example consistent with the central
    /// correction: x(0) w = -level (e, x) w.
    fn unipotent_space(ta: &TwistedAffine, level: i64) -> GeneratorSpace {
        let aut = ta.automorphism();
        let alg = ta.algebra();
        let e_std = vec![s(1), s(0), s(0)];
        let mut iota = Vec::new();
        for &i in aut.iota_indices() {
            let xi = aut.jordan_basis().col(i);
            let val = alg.pair(&e_std, &xi).scale(&rint(-level));
            iota.push(Mat::from_fn(1, 1, |_, _| val.clone()));
        }
        GeneratorSpace {
            labels: vec!["w".into()],
            betas: vec![Rat::zero()],
            g_nilpotent: Mat::zeros(1, 1),
            weights: WeightSpec::FromOmega,
            iota_action: Some(iota),
        }
    }

    fn tilde(kind: &str, level: i64, cutoff: i64) -> Module {
        let ta = context(kind);
        let space = if kind == "unipotent" {
            unipotent_space(&ta, level)
        } else {
            GeneratorSpace::trivial(&ta, WeightSpec::FromOmega)
        };
        Module::build(
            ta,
            Mode::Tilde,
            space,
            rint(level),
            rint(cutoff),
            0,
        )
        .unwrap()
    }

    #[test]
    fn tilde_untwisted_dimensions() {
        let m = tilde("id", 1, 3);
        let table = m.character(&rint(3)).unwrap();
        let dims: Vec<usize> = table.iter().map(|(_, d)| *d).collect();
        assert_eq!(dims, vec![1, 3, 9, 22]);
    }

    #[test]
    fn hat_mode_has_translation_layer() {
        let ta = context("id");
        let space = GeneratorSpace {
            weights: WeightSpec::Explicit(Mat::zeros(1, 1)),
            ..GeneratorSpace::trivial(&ta, WeightSpec::Explicit(Mat::zeros(1, 1)))
        };
        let m = Module::build(ta, Mode::Hat, space, rint(1), rint(1), 1).unwrap();
        // weight 1: three modes a(-1) w, plus L(-1) w, plus zero-mode tails
        // never contribute weight; tails of length 1 contribute at weight 0
        let w0 = m.basis_at(&rint(0)).len();
        let w1 = m.basis_at(&rint(1)).len();
        assert_eq!(w0, 1 + 3); // w and three a(0) w tails
        // at weight 1: (a(-1) w for 3 gens) x (tail length <= 1: 4) + L(-1) w x 4 tails
        assert_eq!(w1, 3 * 4 + 4);
        let has_translation = m
            .basis_at(&rint(1))
            .iter()
            .any(|mono| mono.lpow == 1 && mono.neg.is_empty() && mono.iota.is_empty());
        assert!(has_translation);
    }

    #[test]
    fn order_two_annihilation_and_level_term() {
        let m = tilde("order2", 1, 2);
        let aut = m.context().automorphism().clone();
        let e = aut.jindex_of_label("e").unwrap();
        let f = aut.jindex_of_label("f").unwrap();
        // e(1/2) w = 0
        let nf = m
            .normal_form(&[WordOp::Mode(e, rat(1, 2))], 0)
            .unwrap();
        assert!(nf.is_zero());
        // e(1/2) f(-1/2) w = (level/2) w
        let nf = m
            .normal_form(
                &[WordOp::Mode(e, rat(1, 2)), WordOp::Mode(f, rat(-1, 2))],
                0,
            )
            .unwrap();
        let expected =
            ModuleElement::from_monomial(Monomial::generator(0)).scaled(&Scalar::from_rat(rat(1, 2)));
        assert_eq!(nf, expected);
    }

    #[test]
    fn zero_mode_of_nilpotent_square_vanishes() {
        // e(0) e(-1) vacuum = [e,e](-1) vacuum = 0 for the identity twist
        let m = tilde("id", 1, 2);
        let aut = m.context().automorphism().clone();
        let e = aut.jindex_of_label("e").unwrap();
        let nf = m
            .normal_form(&[WordOp::Mode(e, rint(0)), WordOp::Mode(e, rint(-1))], 0)
            .unwrap();
        assert!(nf.is_zero());
    }

    #[test]
    fn field_components() {
        let m = tilde("unipotent", 1, 2);
        let aut = m.context().automorphism().clone();
        let f = aut.jindex_of_label("f").unwrap();
        let h = aut.jindex_of_label("h").unwrap();
        let v = ModuleElement::from_monomial(Monomial::generator(0));
        // k = 0: plain action
        let mut x = vec![s(0); 3];
        x[f] = s(1);
        let c0 = m.field_component(&x, &rint(-1), 0, &v).unwrap();
        assert_eq!(c0, m.apply_mode(f, &rint(-1), &v));
        // k = 1 on f: -(N f)(n) = -h(n)
        let c1 = m.field_component(&x, &rint(-1), 1, &v).unwrap();
        let expected = m.apply_mode(h, &rint(-1), &v).scaled(&s(-1));
        assert_eq!(c1, expected);
        // identity twist: k >= 1 kills everything
        let mid = tilde("id", 1, 2);
        let e = mid.context().automorphism().jindex_of_label("e").unwrap();
        let mut xe = vec![s(0); 3];
        xe[e] = s(1);
        let vz = ModuleElement::from_monomial(Monomial::generator(0));
        assert!(mid.field_component(&xe, &rint(-1), 1, &vz).unwrap().is_zero());
    }

    #[test]
    fn twist_weights_and_casimir() {
        // identity twist, trivial space: weight 0
        let m = tilde("id", 1, 4);
        assert_eq!(m.twist_weight(0), &rint(0));
        // adjoint space at the identity twist: 2/(level + 2)
        for level in [1i64, 2, 3] {
            let ta = context("id");
            let space = GeneratorSpace::adjoint(&ta);
            let m = Module::build(ta, Mode::Tilde, space, rint(level), rint(2), 0).unwrap();
            let expect = rat(2, level + 2);
            for b in 0..3 {
                assert_eq!(m.twist_weight(b), &expect);
            }
            // the Casimir acts as 4 = 2 h_vee
            let omega = m.omega_on_generators().unwrap();
            assert_eq!(omega, Mat::identity(3).scale(&s(4)));
        }
    }

    #[test]
    fn order_two_twist_weight_matches_flow_oracle() {
        // spectral-flow image of the vacuum: h = level / (8 (level + 2))
        for level in [1i64, 2] {
            let m = tilde("order2", level, 2);
            assert_eq!(m.twist_weight(0), &rat(level, 8 * (level + 2)));
        }
    }

    #[test]
    fn sugawara_l0_is_grading() {
        // semisimple twists: L(0) is exactly the weight
        for kind in ["id", "order2"] {
            let m = tilde(kind, 1, 2);
            for (w, monos) in m.graded_basis() {
                for mono in monos {
                    let v = ModuleElement::from_monomial(mono.clone());
                    let mut lhs = m.sugawara(0, &v).unwrap();
                    lhs.sub_assign(&v.scaled(&Scalar::from_rat(w.clone())));
                    assert!(lhs.is_zero(), "{kind}: L(0) grading at weight {w}");
                }
            }
        }
    }

    #[test]
    fn sugawara_l0_nilpotent_part_for_unipotent_twist() {
        // non-semisimple twist: L(0) = weight - (Leibniz nilpotent action),
        // since the generator block is one-dimensional with zero Casimir
        let m = tilde("unipotent", 1, 2);
        for (w, monos) in m.graded_basis() {
            for mono in monos {
                let v = ModuleElement::from_monomial(mono.clone());
                let mut lhs = m.sugawara(0, &v).unwrap();
                lhs.sub_assign(&v.scaled(&Scalar::from_rat(w.clone())));
                lhs.add_assign(&m.nilpotent_action(&v));
                assert!(lhs.is_zero(), "L(0) + N_W defect at weight {w}");
                assert!(m.l0_generalized_eigenvector(&v, w));
            }
        }
    }

    #[test]
    fn sugawara_l1_kills_generators() {
        for kind in ["id", "order2", "unipotent"] {
            let m = tilde(kind, 1, 2);
            let v = ModuleElement::from_monomial(Monomial::generator(0));
            assert!(m.sugawara(1, &v).unwrap().is_zero(), "{kind}");
        }
    }

    #[test]
    fn virasoro_small_window() {
        let m = tilde("id", 1, 3);
        let c = m.central_charge().unwrap();
        assert_eq!(c, rint(1));
        let v = ModuleElement::from_monomial(Monomial::generator(0));
        for mm in -2i64..=2 {
            for nn in -2i64..=2 {
                if (mm + nn).abs() > 2 || mm.abs() + nn.abs() > 3 {
                    continue;
                }
                let r = m.virasoro_residual(mm, nn, &c, &v);
                if let Some(res) = r {
                    assert!(res.is_zero(), "[L({mm}), L({nn})]");
                }
            }
        }
    }

    #[test]
    fn central_charges() {
        let m = tilde("id", 1, 1);
        assert_eq!(m.central_charge().unwrap(), rint(1));
        let m = tilde("order2", 2, 1);
        assert_eq!(m.central_charge().unwrap(), rat(3, 2));
    }

    #[test]
    fn translation_vs_sugawara_lminus1() {
        // In the tilde realization L(-1) from Sugawara raises weight by one;
        // check [L(-1), e(-1)] action matches -(-1) e(-2) = e(-2).
        let m = tilde("id", 1, 3);
        let e = m.context().automorphism().jindex_of_label("e").unwrap();
        let v = ModuleElement::from_monomial(Monomial::generator(0));
        let ev = m.apply_mode(e, &rint(-1), &v);
        let mut lhs = m.sugawara(-1, &ev).unwrap();
        lhs.sub_assign(&m.apply_mode(e, &rint(-1), &m.sugawara(-1, &v).unwrap()));
        let rhs = m.apply_mode(e, &rint(-2), &v);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn breve_is_grading_restricted() {
        let ta = context("order2");
        let space = GeneratorSpace {
            weights: WeightSpec::Explicit(Mat::zeros(1, 1)),
            ..GeneratorSpace::trivial(&ta, WeightSpec::Explicit(Mat::zeros(1, 1)))
        };
        let m = Module::build(ta, Mode::Breve, space, rint(1), rint(2), 0).unwrap();
        // weight 0: w; 1/2: e(-1/2) w, f(-1/2) w; 1: h(-1) w + L(-1) w + pairs
        assert_eq!(m.basis_at(&rint(0)).len(), 1);
        assert_eq!(m.basis_at(&rat(1, 2)).len(), 2);
        // e(-1/2) f(-1/2) w, e(-1/2)^2? no: weight 1 lists pairs of -1/2 modes
        // (ee, ef, ff), h(-1) w, L(-1) w
        assert_eq!(m.basis_at(&rint(1)).len(), 5);
    }

    #[test]
    fn overarc_spanning_set_and_sugawara() {
        // overarc keeps free zero-mode tails; with from-Omega weights it
        // needs the iota data for the generator layer only
        let ta = context("order2");
        let space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
        let m = Module::build(ta, Mode::Overarc, space, rint(1), rint(1), 2).unwrap();
        // ground layer: w, h(0) w, h(0)^2 w
        assert_eq!(m.basis_at(&rat(1, 24)).len(), 3);
        // Virasoro algebra still holds on the spanning-set realization
        let c = m.central_charge().unwrap();
        let v = ModuleElement::from_monomial(Monomial::generator(0));
        for mm in -1i64..=1 {
            for nn in -1i64..=1 {
                if let Some(r) = m.virasoro_residual(mm, nn, &c, &v) {
                    assert!(r.is_zero(), "[L({mm}), L({nn})] on overarc");
                }
            }
        }
        // explicit weights are also accepted for overarc
        let ta = context("order2");
        let space = GeneratorSpace {
            weights: WeightSpec::Explicit(Mat::zeros(1, 1)),
            iota_action: None,
            ..GeneratorSpace::trivial(&ta, WeightSpec::FromOmega)
        };
        assert!(Module::build(ta, Mode::Overarc, space, rint(1), rint(1), 1).is_ok());
    }

    #[test]
    fn omega_action_examples() {
        // trivial space at the identity twist: Omega kills the generator
        let m = tilde("id", 1, 2);
        let v = ModuleElement::from_monomial(Monomial::generator(0));
        assert!(m.omega_action(&v).unwrap().is_zero());
        // adjoint space: Omega acts as the Casimir eigenvalue 4 = 2 h_vee
        let ta = context("id");
        let space = GeneratorSpace::adjoint(&ta);
        let m = Module::build(ta, Mode::Tilde, space, rint(1), rint(2), 0).unwrap();
        for b in 0..3 {
            let w = ModuleElement::from_monomial(Monomial::generator(b));
            let img = m.omega_action(&w).unwrap();
            assert_eq!(img, w.scaled(&s(4)));
        }
    }

    #[test]
    fn critical_level_is_rejected() {
        let ta = context("id");
        let space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
        let err = Module::build(ta, Mode::Tilde, space, rint(-2), rint(2), 0).unwrap_err();
        assert!(matches!(err, ModuleError::CriticalLevel(_)));
    }

    #[test]
    fn missing_iota_action_is_rejected() {
        let ta = context("id");
        let mut space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
        space.iota_action = None;
        let err = Module::build(ta, Mode::Tilde, space, rint(1), rint(2), 0).unwrap_err();
        assert!(matches!(err, ModuleError::MissingIotaAction(_)));
    }

    #[test]
    fn bad_iota_action_is_rejected() {
        // trivial action is inconsistent for the unipotent twist: the zero
        // modes satisfy [h(0), f(0)] = -2 f(0) - 2 level, which cannot act
        // as zero
        let ta = context("unipotent");
        let space = GeneratorSpace::trivial(&ta, WeightSpec::FromOmega);
        let err = Module::build(ta, Mode::Tilde, space, rint(1), rint(2), 0).unwrap_err();
        assert!(matches!(err, ModuleError::BadIotaAction(..)));
    }

    #[test]
    fn unipotent_tilde_builds_and_verifies() {
        let m = tilde("unipotent", 1, 3);
        let dims: Vec<usize> = m
            .character(&rint(3))
            .unwrap()
            .iter()
            .map(|(_, d)| *d)
            .collect();
        // same counting as the untwisted module: all exponents are zero
        assert_eq!(dims, vec![1, 3, 9, 22]);
        for c in m.verify(1) {
            assert_ne!(c.status, crate::report::Status::Fail, "{}: {:?}", c.check, c.witness);
        }
    }

    #[test]
    fn empty_generator_space_has_empty_tables() {
        let ta = context("id");
        let space = GeneratorSpace {
            labels: Vec::new(),
            betas: Vec::new(),
            g_nilpotent: Mat::zeros(0, 0),
            weights: WeightSpec::FromOmega,
            iota_action: Some(vec![Mat::zeros(0, 0); 3]),
        };
        let m = Module::build(ta, Mode::Tilde, space, rint(1), rint(3), 0).unwrap();
        assert!(m.character(&rint(3)).unwrap().is_empty());
    }

    #[test]
    fn hat_dominates_tilde_dimensions() {
        let tilde_m = tilde("order2", 1, 2);
        let ta = context("order2");
        let space = GeneratorSpace {
            weights: WeightSpec::Explicit(Mat::zeros(1, 1)),
            ..GeneratorSpace::trivial(&ta, WeightSpec::FromOmega)
        };
        let hat_m = Module::build(ta, Mode::Hat, space, rint(1), rint(2), 2).unwrap();
        // compare by weight offset above the respective minimum
        for (w, monos) in tilde_m.graded_basis() {
            let offset = w - tilde_m.min_weight();
            let hat_dim = hat_m.basis_at(&offset).len();
            assert!(
                hat_dim >= monos.len(),
                "hat {} < tilde {} at offset {offset}",
                hat_dim,
                monos.len()
            );
        }
    }

    #[test]
    fn breve_verifies_including_the_translation_rule() {
        let ta = context("order2");
        let space = GeneratorSpace {
            weights: WeightSpec::Explicit(Mat::zeros(1, 1)),
            ..GeneratorSpace::trivial(&ta, WeightSpec::FromOmega)
        };
        let m = Module::build(ta, Mode::Breve, space, rint(1), rint(2), 0).unwrap();
        let checks = m.verify(1);
        let translation = checks
            .iter()
            .find(|c| c.check == "translation-commutator")
            .unwrap();
        assert_eq!(translation.status, crate::report::Status::Pass);
        for c in &checks {
            assert_ne!(c.status, crate::report::Status::Fail, "{}: {:?}", c.check, c.witness);
        }
    }

    #[test]
    fn cutoff_error_on_normal_form() {
        let m = tilde("id", 1, 1);
        let e = m.context().automorphism().jindex_of_label("e").unwrap();
        let err = m
            .normal_form(&[WordOp::Mode(e, rint(-2))], 0)
            .unwrap_err();
        assert!(matches!(err, ModuleError::CutoffExceeded(..)));
    }

    #[test]
    fn confluence_under_split_evaluation() {
        // evaluating a word directly or through a normalized suffix agrees
        let m = tilde("order2", 1, 3);
        let aut = m.context().automorphism().clone();
        let e = aut.jindex_of_label("e").unwrap();
        let f = aut.jindex_of_label("f").unwrap();
        let h = aut.jindex_of_label("h").unwrap();
        let word = vec![
            WordOp::Mode(h, rint(-1)),
            WordOp::Mode(e, rat(1, 2)),
            WordOp::Mode(f, rat(-3, 2)),
            WordOp::Mode(e, rat(-1, 2)),
        ];
        let direct = m.normal_form(&word, 0).unwrap();
        for split in 1..word.len() {
            let suffix = m.normal_form(&word[split..], 0).unwrap();
            let mut acc = suffix;
            for op in word[..split].iter().rev() {
                acc = match op {
                    WordOp::Mode(i, n) => m.apply_mode(*i, n, &acc),
                    WordOp::LMinus1 => m.apply_translation(&acc),
                };
            }
            assert_eq!(acc, direct, "split at {split}");
        }
    }
}
