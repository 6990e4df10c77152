//! Level quotients: cutting an induced module down by the submodule
//! generated by the coefficients of a commuting nilpotent field raised to a
//! power.
//!
//! The field element must be a semisimple-part eigenvector `a` with
//! `[a, a] = 0`, `(a, a) = 0` and `(N a, a) = 0`; then every component of
//! its field commutes with every other and powers of the field are
//! well-defined operators. Imposing `a(x)^{level+1} = 0` on the
//! grading-restricted realization produces the irreducible-level-quotient
//! modules; the engine computes the relation subspace per weight by exact
//! closure under the twisted affine action and reports quotient dimensions.
//!
//! Relation ranks at weight w are certified only for
//! `w <= cutoff - margin`: closure inside the window sees every consequence
//! of seeds cut from parent vectors within the cutoff, and the margin
//! absorbs seeds that would have come from parent vectors above it.

use std::collections::BTreeMap;
use std::time::Instant;

use num::{BigInt, One, Zero};

use crate::error::ModuleError;
use crate::linalg::Echelon;
use crate::module::{Module, ModuleElement, Monomial};
use crate::report::Check;
use crate::scalar::{frac, Rat, Scalar};

/// A validated commuting nilpotent field specification.
#[derive(Clone, Debug)]
pub struct NullField {
    /// Jordan coordinates of the element.
    pub coords: Vec<Scalar>,
    /// Its spectral exponent.
    pub gamma: Rat,
    /// The power to impose (level + 1 for the irreducible quotient).
    pub power: usize,
}

/// Relation subspaces per weight with exact ranks.
pub struct RelationSpace {
    /// weight -> reduced row space over the parent basis of that weight.
    spaces: BTreeMap<Rat, Echelon>,
}

impl RelationSpace {
    pub fn rank_at(&self, w: &Rat) -> usize {
        self.spaces.get(w).map_or(0, |e| e.rank())
    }

    pub fn contains(&self, module: &Module, elem: &ModuleElement) -> bool {
        if elem.is_zero() {
            return true;
        }
        let Some((w, coords)) = module.coords(elem) else {
            return false;
        };
        match self.spaces.get(&w) {
            Some(e) => e.contains(&coords),
            None => false,
        }
    }

    pub fn ranks(&self) -> Vec<(Rat, usize)> {
        self.spaces
            .iter()
            .map(|(w, e)| (w.clone(), e.rank()))
            .collect()
    }
}

/// Validate the four null-field invariants; returns the spec plus the
/// check list (failures carry witnesses).
pub fn check_null_field(
    module: &Module,
    std_coords: &[Scalar],
    power: usize,
) -> (Option<NullField>, Vec<Check>) {
    let suite = "quotient";
    let ta = module.context();
    let aut = ta.automorphism();
    let alg = ta.algebra();
    let mut checks = Vec::new();

    let t0 = Instant::now();
    let coords = aut.to_jordan(std_coords);
    let mut gamma: Option<Rat> = None;
    let mut homogeneous = true;
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        match &gamma {
            None => gamma = Some(aut.alpha(i).clone()),
            Some(g) if g == aut.alpha(i) => {}
            _ => homogeneous = false,
        }
    }
    let gamma = gamma.unwrap_or_else(Rat::zero);
    checks.push(timed(
        Check::verdict(suite, "null-field-eigenvector", homogeneous, || {
            format!(
                "element {} is not a semisimple-part eigenvector",
                alg.render_element(std_coords)
            )
        }),
        t0,
    ));

    let t0 = Instant::now();
    let self_bracket = alg.bracket(std_coords, std_coords);
    let bracket_ok = self_bracket.iter().all(|c| c.is_zero());
    checks.push(timed(
        Check::verdict(suite, "null-field-self-bracket", bracket_ok, || {
            format!("[a, a] = {}", alg.render_element(&self_bracket))
        }),
        t0,
    ));

    let t0 = Instant::now();
    let pairing = alg.pair(std_coords, std_coords);
    checks.push(timed(
        Check::verdict(suite, "null-field-isotropic", pairing.is_zero(), || {
            format!("(a, a) = {pairing}")
        }),
        t0,
    ));

    let t0 = Instant::now();
    let na = aut.nilpotent_log().matvec(std_coords);
    let npairing = alg.pair(&na, std_coords);
    checks.push(timed(
        Check::verdict(suite, "null-field-nilpotent-isotropic", npairing.is_zero(), || {
            format!("(N a, a) = {npairing}")
        }),
        t0,
    ));

    // the consequence: components commute; exercised on a small window
    let t0 = Instant::now();
    let mut commute = true;
    if homogeneous && bracket_ok && pairing.is_zero() && npairing.is_zero() {
        'win: for km in -2i64..=2 {
            for kn in -2i64..=2 {
                let m = &gamma + Rat::from_integer(km.into());
                let n = &gamma + Rat::from_integer(kn.into());
                let br = ta.bracket(&field_element(&coords, &m), &field_element(&coords, &n));
                if !br.is_zero() {
                    commute = false;
                    break 'win;
                }
            }
        }
    } else {
        commute = false;
    }
    checks.push(timed(
        Check::verdict(suite, "null-field-components-commute", commute, || {
            "field components fail to commute".to_string()
        }),
        t0,
    ));

    let ok = checks.iter().all(|c| c.status == crate::report::Status::Pass);
    let spec = ok.then(|| NullField {
        coords,
        gamma,
        power,
    });
    (spec, checks)
}

/// Re-run the null-field checks for an already-assembled spec (Jordan
/// coordinates), e.g. inside a report run.
pub fn check_null_field_jordan(module: &Module, spec: &NullField) -> (bool, Vec<Check>) {
    let std_coords = module
        .context()
        .automorphism()
        .jordan_basis()
        .matvec(&spec.coords);
    let (ok, checks) = match check_null_field(module, &std_coords, spec.power) {
        (Some(_), checks) => (true, checks),
        (None, checks) => (false, checks),
    };
    (ok, checks)
}

fn field_element(coords: &[Scalar], degree: &Rat) -> crate::affine::AffineElement {
    let mut e = crate::affine::AffineElement::zero();
    for (i, c) in coords.iter().enumerate() {
        e.add_term(i, degree.clone(), c);
    }
    e
}

/// The coefficient of `a(x)^power v` landing at `target` weight, for a
/// single parent basis monomial `v`: the sum over degree multisets with
/// multinomial coefficients (all factors commute). Returns an empty list
/// when the coefficient vanishes.
pub fn power_field_coefficients(
    module: &Module,
    spec: &NullField,
    v: &Monomial,
    target: &Rat,
) -> Result<Vec<ModuleElement>, ModuleError> {
    if target > module.cutoff() {
        return Err(ModuleError::CutoffExceeded(
            target.to_string(),
            module.cutoff().to_string(),
        ));
    }
    let base = module.weight_of(v);
    let delta = target - &base;
    let mut total = ModuleElement::zero();
    // weight contributions t_j = -n_j, t_j = -gamma mod 1, nondecreasing,
    // applied smallest-first (most lowering first); every prefix must stay
    // at or above the minimal weight
    let min_t0 = module.min_weight() - &base;
    let mut chosen: Vec<Rat> = Vec::new();
    enumerate_multisets(
        &(-&spec.gamma),
        spec.power,
        &delta,
        &min_t0,
        &mut chosen,
        &mut |ts| {
            let mut elem = ModuleElement::from_monomial(v.clone());
            let mut coeff = Rat::one();
            // multinomial m! / prod(mult!)
            for k in 1..=spec.power {
                coeff *= Rat::from_integer((k as i64).into());
            }
            let mut run = 1usize;
            for i in 1..ts.len() {
                if ts[i] == ts[i - 1] {
                    run += 1;
                    coeff /= Rat::from_integer((run as i64).into());
                } else {
                    run = 1;
                }
            }
            for t in ts {
                let degree = -t;
                let mut next = ModuleElement::zero();
                for (s, c) in spec.coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    debug_assert_eq!(
                        frac(&degree),
                        *module.context().automorphism().alpha(s)
                    );
                    let part = module.apply_mode(s, &degree, &elem);
                    next.add_scaled(&part, c);
                }
                elem = next;
                if elem.is_zero() {
                    break;
                }
            }
            total.add_scaled(&elem, &Scalar::from_rat(coeff));
        },
    );
    Ok(if total.is_zero() { Vec::new() } else { vec![total] })
}

/// Enumerate nondecreasing length-`count` sequences in `offset + Z` summing
/// to `total`, with every prefix sum at least `min_prefix`.
fn enumerate_multisets(
    offset: &Rat,
    count: usize,
    total: &Rat,
    min_prefix: &Rat,
    chosen: &mut Vec<Rat>,
    emit: &mut impl FnMut(&[Rat]),
) {
    if count == 0 {
        if total.is_zero() {
            emit(chosen);
        }
        return;
    }
    // smallest element first: t >= max(min bound from prefix, last chosen),
    // and t <= total / count since the rest are at least t
    let lower_raw = match chosen.last() {
        Some(prev) => prev.clone().max(min_prefix.clone()),
        None => min_prefix.clone(),
    };
    // align to the coset offset + Z: smallest value >= lower_raw
    let diff = &lower_raw - offset;
    let mut t = offset + diff.ceil();
    if &t < &lower_raw {
        t += Rat::one();
    }
    let bound = total / Rat::from_integer(BigInt::from(count as i64));
    while &t <= &bound {
        chosen.push(t.clone());
        let new_total = total - &t;
        // the next prefix starts from the weight after applying t
        let new_min = min_prefix - &t;
        enumerate_multisets(offset, count - 1, &new_total, &new_min, chosen, emit);
        chosen.pop();
        t += Rat::one();
    }
}

/// Seeds: all power-field coefficients from every parent basis vector within
/// the cutoff, at every weight within the cutoff.
pub fn relation_seeds(
    module: &Module,
    spec: &NullField,
) -> Result<Vec<ModuleElement>, ModuleError> {
    let mut seeds = Vec::new();
    for monos in module.graded_basis().values() {
        for v in monos {
            let base = module.weight_of(v);
            // target weights: base + power * (coset-aligned shifts); iterate
            // over every enumerated weight in the window
            let weights: Vec<Rat> = module.graded_basis().keys().cloned().collect();
            for target in &weights {
                // coset filter: delta is a sum of `power` elements of
                // -gamma + Z
                let delta = target - &base;
                let gamma_sum = &spec.gamma * Rat::from_integer((spec.power as i64).into());
                if !frac(&(&delta + &gamma_sum)).is_zero() {
                    continue;
                }
                seeds.extend(power_field_coefficients(module, spec, v, target)?);
            }
        }
    }
    Ok(seeds)
}

/// Close a seed set under the twisted affine action within the window;
/// exact fixpoint.
pub fn submodule_closure(
    module: &Module,
    seeds: Vec<ModuleElement>,
) -> Result<RelationSpace, ModuleError> {
    let mut spaces: BTreeMap<Rat, Echelon> = BTreeMap::new();
    let mut worklist: Vec<(Rat, ModuleElement)> = Vec::new();
    let insert = |spaces: &mut BTreeMap<Rat, Echelon>,
                      worklist: &mut Vec<(Rat, ModuleElement)>,
                      module: &Module,
                      elem: ModuleElement|
     -> Result<(), ModuleError> {
        if elem.is_zero() {
            return Ok(());
        }
        let (w, coords) = module.coords(&elem).ok_or_else(|| {
            ModuleError::BadGeneratorSpace(
                "relation vector leaves the enumerated basis".into(),
            )
        })?;
        let dim = module.basis_at(&w).len();
        let ech = spaces.entry(w.clone()).or_insert_with(|| Echelon::new(dim));
        if ech.insert(coords) {
            worklist.push((w, elem));
        }
        Ok(())
    };
    for s in seeds {
        insert(&mut spaces, &mut worklist, module, s)?;
    }
    let aut = module.context().automorphism().clone();
    let d = aut.dim();
    while let Some((w, elem)) = worklist.pop() {
        for i in 0..d {
            let alpha = aut.alpha(i);
            // degrees n with min_weight <= w - n <= cutoff
            let lo = &w - module.cutoff(); // n >= lo
            let hi = &w - module.min_weight(); // n <= hi
            let mut n = alpha + (&lo - alpha).ceil();
            while &n < &lo {
                n += Rat::one();
            }
            while &n <= &hi {
                if !n.is_zero() || alpha.is_zero() {
                    let img = module.apply_mode(i, &n, &elem);
                    insert(&mut spaces, &mut worklist, module, img)?;
                }
                n += Rat::one();
            }
        }
    }
    Ok(RelationSpace { spaces })
}

/// Full pipeline: seeds then closure.
pub fn relation_space(module: &Module, spec: &NullField) -> Result<RelationSpace, ModuleError> {
    if !module.mode().reduces_iota() {
        return Err(ModuleError::WrongMode(format!(
            "{} is a spanning-set realization; quotients need a grading-restricted basis",
            module.mode().name()
        )));
    }
    submodule_closure(module, relation_seeds(module, spec)?)
}

/// The null field for the irreducible level quotient: power = level + 1,
/// requiring a positive integer level.
pub fn level_quotient_power(module: &Module) -> Result<usize, ModuleError> {
    let ell = module.level();
    if !ell.is_integer() || ell <= &Rat::zero() {
        return Err(ModuleError::NonIntegralLevel(ell.to_string()));
    }
    let p: i64 = ell
        .to_integer()
        .try_into()
        .map_err(|_| ModuleError::NonIntegralLevel(ell.to_string()))?;
    Ok(p as usize + 1)
}

/// Quotient graded dimensions up to `max_weight`, certified within the
/// margin.
pub fn quotient_character(
    module: &Module,
    rel: &RelationSpace,
    max_weight: &Rat,
    margin: &Rat,
) -> Result<Vec<(Rat, usize)>, ModuleError> {
    let certified = module.cutoff() - margin;
    if max_weight > &certified {
        return Err(ModuleError::MarginViolation(
            max_weight.to_string(),
            certified.to_string(),
        ));
    }
    Ok(module
        .graded_basis()
        .iter()
        .filter(|(w, _)| *w <= max_weight)
        .map(|(w, monos)| (w.clone(), monos.len() - rel.rank_at(w)))
        .collect())
}

/// Are all power-field coefficients within the margin window contained in
/// the relation space (or zero, when no relation space is given)?
pub fn is_annihilated(
    module: &Module,
    spec: &NullField,
    rel: Option<&RelationSpace>,
    margin: &Rat,
) -> Result<bool, ModuleError> {
    let certified = module.cutoff() - margin;
    for (w, monos) in module.graded_basis() {
        if w > &certified {
            continue;
        }
        for v in monos {
            // on the quotient, skip representatives that are already
            // relations
            if let Some(r) = rel {
                let ve = ModuleElement::from_monomial(v.clone());
                if r.contains(module, &ve) {
                    continue;
                }
            }
            let targets: Vec<Rat> = module
                .graded_basis()
                .keys()
                .filter(|t| *t <= &certified)
                .cloned()
                .collect();
            for target in targets {
                for c in power_field_coefficients(module, spec, v, &target)? {
                    let ok = match rel {
                        Some(r) => r.contains(module, &c),
                        None => c.is_zero(),
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn timed(mut c: Check, t0: Instant) -> Check {
    c.ms = t0.elapsed().as_millis();
    c
}
