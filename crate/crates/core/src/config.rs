//! Structured-text configuration.
//!
//! Configs are TOML with every numeric literal written as an exact string
//! ("1/2", "zeta_3", never a float). The grammar:
//!
//! ```toml
//! [algebra]
//! type = "sl"            # or "structure"
//! n = "2"
//! # type = "structure" instead takes:
//! # labels  = ["x", "y"]
//! # bracket = [["0", "1", "0", "1/2"]]   # [a_i, a_j] += c * a_k rows [i,j,k,c]
//! # form    = [["0", "1", "1"]]          # (a_i, a_j) = c rows [i,j,c]
//!
//! [automorphism]
//! inner_exp = "h/4"      # exp(2 pi i ad x) for an element expression x
//! # or: matrix = [["1","0","0"], ...]    # scalar entries
//! # or: compose = [{ inner_exp = "e" }, { inner_exp = "h/4" }]
//!
//! [module]
//! mode = "tilde"         # hat | breve | overarc | tilde
//! level = "1"
//! cutoff = "4"
//! space = "trivial"      # trivial | adjoint | custom
//! weights = "from-omega" # or explicit: weights_matrix = [["0"]]
//! # custom spaces:
//! # generators = ["w"]
//! # betas = ["0"]
//! # g_nilpotent = [["0"]]
//! # iota_action = [{ element = "h", matrix = [["0"]] }]
//! # iota_bound = "2"
//!
//! [quotient]
//! null_field = "e"
//! power = "auto"         # or an explicit positive integer string
//! margin = "2"
//! ```

use std::str::FromStr;
use std::sync::Arc;

use num::Zero;
use toml::Value;

use crate::automorphism::Automorphism;
use crate::error::{ConfigError, Error};
use crate::affine::TwistedAffine;
use crate::lie::LieAlgebra;
use crate::linalg::{Mat, PiMat};
use crate::module::{GeneratorSpace, Mode, Module, WeightSpec};
use crate::quotient::{level_quotient_power, NullField};
use crate::scalar::{Rat, Scalar};

#[derive(Clone, Debug)]
pub struct QuotientConfig {
    pub null_field: Vec<Scalar>,
    /// None means "auto": level + 1.
    pub power: Option<usize>,
    pub margin: Rat,
}

pub struct RunConfig {
    // built eagerly from the parsed text; immutable afterwards
    pub algebra: Arc<LieAlgebra>,
    pub automorphism: Arc<Automorphism>,
    pub twisted: Arc<TwistedAffine>,
    pub mode: Mode,
    pub level: Rat,
    pub cutoff: Rat,
    pub iota_bound: usize,
    pub space: GeneratorSpace,
    pub quotient: Option<QuotientConfig>,
    pub window: i64,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, Error> {
        let value: Value = toml::from_str(text)
            .map_err(|e| Error::Config(ConfigError::Toml(e.to_string())))?;
        let root = value
            .as_table()
            .ok_or_else(|| missing("top-level table"))?;

        if let Some(cap) = root.get("conductor_cap") {
            let cap: u64 = parse_int_str(cap, "conductor_cap")?;
            crate::scalar::set_conductor_cap(cap);
        }

        let algebra = Arc::new(parse_algebra(
            root.get("algebra").ok_or_else(|| missing("algebra"))?,
        )?);
        let aut_value = root
            .get("automorphism")
            .ok_or_else(|| missing("automorphism"))?;
        let g = parse_automorphism_matrix(&algebra, aut_value)?;
        let automorphism = Arc::new(Automorphism::from_matrix(algebra.clone(), g)?);
        let twisted = Arc::new(TwistedAffine::new(algebra.clone(), automorphism.clone()));

        let module = root.get("module").ok_or_else(|| missing("module"))?;
        let mtab = module
            .as_table()
            .ok_or_else(|| bad("module", "expected a table"))?;
        let mode = match get_str(mtab, "mode")?.as_str() {
            "hat" => Mode::Hat,
            "breve" => Mode::Breve,
            "overarc" => Mode::Overarc,
            "tilde" => Mode::Tilde,
            other => return Err(bad("module.mode", &format!("unknown mode `{other}`")).into()),
        };
        let level = parse_rat_str(
            mtab.get("level").ok_or_else(|| missing("module.level"))?,
            "module.level",
        )?;
        let cutoff = parse_rat_str(
            mtab.get("cutoff").ok_or_else(|| missing("module.cutoff"))?,
            "module.cutoff",
        )?;
        let iota_bound = match mtab.get("iota_bound") {
            Some(v) => parse_int_str::<usize>(v, "module.iota_bound")?,
            None => cutoff
                .floor()
                .to_integer()
                .try_into()
                .unwrap_or(0usize)
                .max(1),
        };
        let space = parse_space(&twisted, mtab, &level)?;
        let quotient = match root.get("quotient") {
            Some(q) => Some(parse_quotient(&algebra, q)?),
            None => None,
        };
        let window = match root.get("window") {
            Some(v) => parse_int_str(v, "window")?,
            None => 3,
        };
        let seed = match root.get("seed") {
            Some(v) => parse_int_str(v, "seed")?,
            None => 0x7157_aff0,
        };
        Ok(RunConfig {
            algebra,
            automorphism,
            twisted,
            mode,
            level,
            cutoff,
            iota_bound,
            space,
            quotient,
            window,
            seed,
        })
    }

    pub fn build_module(&self) -> Result<Module, Error> {
        Ok(Module::build(
            self.twisted.clone(),
            self.mode,
            self.space.clone(),
            self.level.clone(),
            self.cutoff.clone(),
            self.iota_bound,
        )?)
    }

    pub fn null_field(&self, module: &Module) -> Result<Option<(NullField, Rat)>, Error> {
        let Some(q) = &self.quotient else {
            return Ok(None);
        };
        let power = match q.power {
            Some(p) => p,
            None => level_quotient_power(module)?,
        };
        let (spec, checks) = crate::quotient::check_null_field(module, &q.null_field, power);
        match spec {
            Some(s) => Ok(Some((s, q.margin.clone()))),
            None => {
                let bad = checks
                    .iter()
                    .find(|c| c.status == crate::report::Status::Fail)
                    .and_then(|c| c.witness.clone())
                    .unwrap_or_else(|| "null field invalid".into());
                Err(Error::Config(ConfigError::BadValue {
                    key: "quotient.null_field".into(),
                    reason: bad,
                }))
            }
        }
    }
}

fn missing(key: &str) -> Error {
    Error::Config(ConfigError::Missing(key.to_string()))
}

fn bad(key: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

fn get_str(tab: &toml::map::Map<String, Value>, key: &str) -> Result<String, Error> {
    tab.get(key)
        .and_then(|v| v.as_str())
        .map(|s| s.to_string())
        .ok_or_else(|| missing(&format!("module.{key}")))
}

fn parse_rat_str(v: &Value, key: &str) -> Result<Rat, Error> {
    let s = v
        .as_str()
        .ok_or_else(|| bad(key, "exact values must be quoted strings"))?;
    Rat::from_str(s.trim()).map_err(|e| bad(key, &e.to_string()).into())
}

fn parse_int_str<T: FromStr>(v: &Value, key: &str) -> Result<T, Error>
where
    T::Err: std::fmt::Display,
{
    let s = v
        .as_str()
        .ok_or_else(|| bad(key, "exact values must be quoted strings"))?;
    s.trim()
        .parse::<T>()
        .map_err(|e| bad(key, &e.to_string()).into())
}

fn parse_scalar_str(v: &Value, key: &str) -> Result<Scalar, Error> {
    let s = v
        .as_str()
        .ok_or_else(|| bad(key, "exact values must be quoted strings"))?;
    Scalar::parse(s, None).map_err(|e| bad(key, &e.to_string()).into())
}

fn parse_scalar_matrix(v: &Value, key: &str) -> Result<Mat, Error> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad(key, "expected an array of rows"))?;
    let mut data: Vec<Vec<Scalar>> = Vec::new();
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| bad(key, "expected rows of strings"))?;
        let mut r = Vec::new();
        for c in cells {
            r.push(parse_scalar_str(c, key)?);
        }
        data.push(r);
    }
    if data.is_empty() || data.iter().any(|r| r.len() != data[0].len()) {
        return Err(bad(key, "matrix rows must be nonempty and of equal length").into());
    }
    Ok(Mat::from_rows(data))
}

fn parse_algebra(v: &Value) -> Result<LieAlgebra, Error> {
    let tab = v
        .as_table()
        .ok_or_else(|| bad("algebra", "expected a table"))?;
    match tab.get("type").and_then(|t| t.as_str()) {
        Some("sl") => {
            let n: usize = parse_int_str(
                tab.get("n").ok_or_else(|| missing("algebra.n"))?,
                "algebra.n",
            )?;
            if n < 2 {
                return Err(bad("algebra.n", "need n >= 2").into());
            }
            Ok(LieAlgebra::sl(n))
        }
        Some(text) if text.starts_with("sl(") && text.ends_with(')') => {
            let n: usize = text[3..text.len() - 1]
                .parse()
                .map_err(|_| bad("algebra.type", "expected sl(n) with integer n"))?;
            if n < 2 {
                return Err(bad("algebra.type", "need n >= 2").into());
            }
            Ok(LieAlgebra::sl(n))
        }
        Some("structure") => {
            let labels: Vec<String> = tab
                .get("labels")
                .and_then(|l| l.as_array())
                .ok_or_else(|| missing("algebra.labels"))?
                .iter()
                .map(|x| x.as_str().map(|s| s.to_string()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("algebra.labels", "expected strings"))?;
            let d = labels.len();
            let mut table = vec![vec![Vec::new(); d]; d];
            if let Some(rows) = tab.get("bracket").and_then(|b| b.as_array()) {
                for row in rows {
                    let cells = row
                        .as_array()
                        .filter(|c| c.len() == 4)
                        .ok_or_else(|| bad("algebra.bracket", "rows are [i, j, k, coeff]"))?;
                    let i: usize = parse_int_str(&cells[0], "algebra.bracket")?;
                    let j: usize = parse_int_str(&cells[1], "algebra.bracket")?;
                    let k: usize = parse_int_str(&cells[2], "algebra.bracket")?;
                    let c = parse_scalar_str(&cells[3], "algebra.bracket")?;
                    if i >= d || j >= d || k >= d {
                        return Err(bad("algebra.bracket", "index out of range").into());
                    }
                    table[i][j].push((k, c));
                }
            }
            let mut form = Mat::zeros(d, d);
            if let Some(rows) = tab.get("form").and_then(|b| b.as_array()) {
                for row in rows {
                    let cells = row
                        .as_array()
                        .filter(|c| c.len() == 3)
                        .ok_or_else(|| bad("algebra.form", "rows are [i, j, value]"))?;
                    let i: usize = parse_int_str(&cells[0], "algebra.form")?;
                    let j: usize = parse_int_str(&cells[1], "algebra.form")?;
                    let c = parse_scalar_str(&cells[2], "algebra.form")?;
                    if i >= d || j >= d {
                        return Err(bad("algebra.form", "index out of range").into());
                    }
                    form.set(i, j, c.clone());
                    form.set(j, i, c);
                }
            }
            Ok(LieAlgebra::from_structure(labels, table, form)?)
        }
        _ => Err(bad("algebra.type", "expected \"sl\" or \"structure\"").into()),
    }
}

fn parse_automorphism_matrix(algebra: &Arc<LieAlgebra>, v: &Value) -> Result<PiMat, Error> {
    let tab = v
        .as_table()
        .ok_or_else(|| bad("automorphism", "expected a table"))?;
    if let Some(expr) = tab.get("inner_exp") {
        let s = expr
            .as_str()
            .ok_or_else(|| bad("automorphism.inner_exp", "expected a string"))?;
        let x = parse_element(algebra, s)?;
        return Ok(Automorphism::inner_exponential(algebra, &x)?);
    }
    if let Some(m) = tab.get("matrix") {
        let mat = parse_scalar_matrix(m, "automorphism.matrix")?;
        if mat.nrows() != algebra.dim() || mat.ncols() != algebra.dim() {
            return Err(bad("automorphism.matrix", "shape must match the algebra").into());
        }
        return Ok(PiMat::from_scalar_mat(&mat));
    }
    if let Some(list) = tab.get("compose").and_then(|c| c.as_array()) {
        let mut acc = PiMat::identity(algebra.dim());
        for part in list {
            let m = parse_automorphism_matrix(algebra, part)?;
            acc = acc.matmul(&m);
        }
        return Ok(acc);
    }
    Err(bad(
        "automorphism",
        "expected `inner_exp`, `matrix`, or `compose`",
    )
    .into())
}

/// Element expressions over basis labels: `h/4`, `e + f`, `2*e - h/3`,
/// `zeta_4*e`.
pub fn parse_element(algebra: &LieAlgebra, text: &str) -> Result<Vec<Scalar>, Error> {
    let err = |reason: &str| {
        Error::Config(ConfigError::Element(text.to_string(), reason.to_string()))
    };
    let mut coords = vec![Scalar::zero(); algebra.dim()];
    // split into signed terms at top level
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut sign = 1i64;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '+' | '-' => {
                if cur.trim().is_empty() && terms.is_empty() && ch == '-' && sign == 1 {
                    sign = -1;
                } else if cur.trim().is_empty() {
                    return Err(err("dangling sign"));
                } else {
                    terms.push((sign, cur.trim().to_string()));
                    cur = String::new();
                    sign = if ch == '-' { -1 } else { 1 };
                }
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }
    if terms.is_empty() {
        // the zero element
        return Ok(coords);
    }
    for (sgn, term) in terms {
        // [scalar *] label [/ integer]
        let (coef_text, rest) = match term.rfind('*') {
            Some(p) => (Some(term[..p].trim().to_string()), term[p + 1..].trim().to_string()),
            None => (None, term.clone()),
        };
        let (label, denom) = match rest.find('/') {
            Some(p) => (
                rest[..p].trim().to_string(),
                Some(rest[p + 1..].trim().to_string()),
            ),
            None => (rest.trim().to_string(), None),
        };
        if label.is_empty() {
            return Err(err("empty label"));
        }
        if label == "0" {
            continue;
        }
        let idx = algebra
            .label_index(&label)
            .map_err(|_| err(&format!("unknown label `{label}`")))?;
        let mut c = match coef_text {
            Some(t) => Scalar::parse(&t, None).map_err(|e| err(&e.to_string()))?,
            None => Scalar::one(),
        };
        if let Some(dtext) = denom {
            let d = Rat::from_str(&dtext).map_err(|e| err(&e.to_string()))?;
            if d.is_zero() {
                return Err(err("division by zero"));
            }
            c = c.scale(&(Rat::from_integer(1.into()) / d));
        }
        if sgn < 0 {
            c = c.neg_ref();
        }
        coords[idx] = coords[idx].add_ref(&c);
    }
    Ok(coords)
}

fn parse_space(
    ta: &Arc<TwistedAffine>,
    mtab: &toml::map::Map<String, Value>,
    level: &Rat,
) -> Result<GeneratorSpace, Error> {
    let weights = match mtab.get("weights_matrix") {
        Some(m) => WeightSpec::Explicit(parse_scalar_matrix(m, "module.weights_matrix")?),
        None => match mtab.get("weights").and_then(|w| w.as_str()) {
            Some("from-omega") | None => WeightSpec::FromOmega,
            Some(other) => {
                return Err(bad(
                    "module.weights",
                    &format!("expected \"from-omega\" or a weights_matrix, got `{other}`"),
                )
                .into())
            }
        },
    };
    match mtab.get("space").and_then(|s| s.as_str()).unwrap_or("trivial") {
        "trivial" => Ok(GeneratorSpace {
            weights,
            ..GeneratorSpace::trivial(ta, WeightSpec::FromOmega)
        }),
        "adjoint" => {
            let mut s = GeneratorSpace::adjoint(ta);
            s.weights = weights;
            Ok(s)
        }
        "custom" => {
            let labels: Vec<String> = mtab
                .get("generators")
                .and_then(|l| l.as_array())
                .ok_or_else(|| missing("module.generators"))?
                .iter()
                .map(|x| x.as_str().map(|s| s.to_string()))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("module.generators", "expected strings"))?;
            let m = labels.len();
            let betas: Vec<Rat> = match mtab.get("betas") {
                Some(Value::Array(arr)) => arr
                    .iter()
                    .map(|v| parse_rat_str(v, "module.betas"))
                    .collect::<Result<_, _>>()?,
                None => vec![Rat::zero(); m],
                _ => return Err(bad("module.betas", "expected an array of strings").into()),
            };
            let g_nilpotent = match mtab.get("g_nilpotent") {
                Some(v) => {
                    // user supplies rows as images: convert to the action
                    // (column) convention
                    parse_scalar_matrix(v, "module.g_nilpotent")?.transpose()
                }
                None => Mat::zeros(m, m),
            };
            let iota_action = match mtab.get("iota_action") {
                Some(v) => Some(parse_iota_action(ta, v, m, level)?),
                None => None,
            };
            Ok(GeneratorSpace {
                labels,
                betas,
                g_nilpotent,
                weights,
                iota_action,
            })
        }
        other => Err(bad("module.space", &format!("unknown space `{other}`")).into()),
    }
}

/// Convert user-supplied zero-mode actions `x(0) w^b = sum_c M[b][c] w^c`
/// on elements `x` into action matrices for the Jordan iota generators, by
/// an exact linear solve.
fn parse_iota_action(
    ta: &Arc<TwistedAffine>,
    v: &Value,
    m: usize,
    _level: &Rat,
) -> Result<Vec<Mat>, Error> {
    let list = v
        .as_array()
        .ok_or_else(|| bad("module.iota_action", "expected an array of tables"))?;
    let algebra = ta.algebra();
    let aut = ta.automorphism();
    let mut elements: Vec<Vec<Scalar>> = Vec::new();
    let mut actions: Vec<Mat> = Vec::new();
    for entry in list {
        let tab = entry
            .as_table()
            .ok_or_else(|| bad("module.iota_action", "entries are tables"))?;
        let expr = tab
            .get("element")
            .and_then(|e| e.as_str())
            .ok_or_else(|| missing("module.iota_action.element"))?;
        let x = parse_element(algebra, expr)?;
        let mat = parse_scalar_matrix(
            tab.get("matrix")
                .ok_or_else(|| missing("module.iota_action.matrix"))?,
            "module.iota_action.matrix",
        )?;
        if mat.nrows() != m || mat.ncols() != m {
            return Err(bad("module.iota_action.matrix", "shape mismatch").into());
        }
        elements.push(x);
        actions.push(mat.transpose()); // column convention
    }
    // solve for each Jordan iota vector: a^i = sum_t c_t x_t
    let d = algebra.dim();
    let sys = Mat::from_fn(d, elements.len(), |r, c| elements[c][r].clone());
    let mut out = Vec::new();
    for &i in aut.iota_indices() {
        let target = aut.jordan_basis().col(i);
        let coeffs = sys.solve(&target).ok_or_else(|| {
            bad(
                "module.iota_action",
                &format!(
                    "the action on Jordan generator `{}` is not determined by the supplied elements",
                    aut.jlabel(i)
                ),
            )
        })?;
        // consistency: the combination reproduces the Jordan vector exactly
        let recon = sys.matvec(&coeffs);
        if recon != target {
            return Err(bad(
                "module.iota_action",
                &format!("Jordan generator `{}` is outside the supplied span", aut.jlabel(i)),
            )
            .into());
        }
        let mut acc = Mat::zeros(m, m);
        for (t, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&actions[t].scale(c));
            }
        }
        out.push(acc);
    }
    Ok(out)
}

fn parse_quotient(algebra: &Arc<LieAlgebra>, v: &Value) -> Result<QuotientConfig, Error> {
    let tab = v
        .as_table()
        .ok_or_else(|| bad("quotient", "expected a table"))?;
    let expr = tab
        .get("null_field")
        .and_then(|e| e.as_str())
        .ok_or_else(|| missing("quotient.null_field"))?;
    let null_field = parse_element(algebra, expr)?;
    let power = match tab.get("power").and_then(|p| p.as_str()) {
        Some("auto") | None => None,
        Some(text) => Some(
            text.parse::<usize>()
                .map_err(|e| bad("quotient.power", &e.to_string()))?,
        ),
    };
    let margin = match tab.get("margin") {
        Some(v) => parse_rat_str(v, "quotient.margin")?,
        None => Rat::from_integer(2.into()),
    };
    Ok(QuotientConfig {
        null_field,
        power,
        margin,
    })
}

impl std::fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RunConfig(mode={}, level={}, cutoff={})",
            self.mode.name(),
            self.level,
            self.cutoff
        )
    }
}
