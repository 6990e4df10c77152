//! Exact scalars: rationals and roots of unity, closed under field operations.
//!
//! A [`Scalar`] is an element of the cyclotomic field Q(zeta_N) stored in the
//! power basis `1, zeta, ..., zeta^(phi(N)-1)` reduced modulo the N-th
//! cyclotomic polynomial, with N the *minimal* conductor of the element.
//! Minimality makes the representation canonical: two scalars are equal iff
//! their conductors and coefficient vectors agree. There is no floating
//! point anywhere.
//!
//! Conductors are produced lazily (lcm of the roots of unity introduced) and
//! are capped: [`set_conductor_cap`] configures the bound, and every root
//! creation site checks it. Arithmetic between already-validated scalars
//! cannot leave the field generated by the inputs.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::RwLock;
use std::sync::OnceLock;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::ScalarError;

/// Exact rational numbers used throughout the library.
pub type Rat = BigRational;

/// Convenience: rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience: rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

static CONDUCTOR_CAP: AtomicU64 = AtomicU64::new(1 << 20);

/// Set the global conductor cap. Roots of unity of larger order are rejected.
pub fn set_conductor_cap(cap: u64) {
    CONDUCTOR_CAP.store(cap.max(1), AtomicOrdering::SeqCst);
}

/// Current conductor cap.
pub fn conductor_cap() -> u64 {
    CONDUCTOR_CAP.load(AtomicOrdering::SeqCst)
}

fn check_cap(n: u64) -> Result<(), ScalarError> {
    let cap = conductor_cap();
    if n > cap {
        Err(ScalarError::ConductorCap(n, cap))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// number-theory helpers
// ---------------------------------------------------------------------------

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler phi.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(1)
}

fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let prev = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// dense polynomials over Q (internal)
// ---------------------------------------------------------------------------

fn poly_trim(v: &mut Vec<Rat>) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                out[i + j] += ca * cb;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[Rat], m: &[Rat]) -> Vec<Rat> {
    let mut r: Vec<Rat> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        for (k, c) in m.iter().enumerate() {
            if !c.is_zero() {
                let t = &lead * c;
                r[shift + k] -= t;
            }
        }
        poly_trim(&mut r);
    }
    r
}

/// Exact quotient `a / b`, panicking if the division is not exact.
fn poly_div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r: Vec<Rat> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_b = b.last().unwrap().clone();
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.last().unwrap() / &lead_b;
        let shift = r.len() - 1 - db;
        q[shift] = lead.clone();
        for (k, c) in b.iter().enumerate() {
            if !c.is_zero() {
                let t = &lead * c;
                r[shift + k] -= t;
            }
        }
        poly_trim(&mut r);
    }
    assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Extended gcd over Q[x]: returns (g, u) with u*a = g (mod m), g monic.
fn poly_half_egcd(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0: Vec<Rat> = m.to_vec();
    let mut r1: Vec<Rat> = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut u0: Vec<Rat> = Vec::new();
    let mut u1: Vec<Rat> = vec![Rat::one()];
    while !r1.is_empty() {
        // r0 = q*r1 + r
        let mut r = r0.clone();
        let mut q: Vec<Rat> = vec![Rat::zero(); r.len().saturating_sub(r1.len() - 1)];
        let d1 = r1.len() - 1;
        let lead1 = r1.last().unwrap().clone();
        while r.len() > d1 || (r.len() == d1 + 1 && d1 + 1 > 0) {
            if r.len() < d1 + 1 {
                break;
            }
            let lead = r.last().unwrap() / &lead1;
            let shift = r.len() - 1 - d1;
            if q.len() <= shift {
                q.resize(shift + 1, Rat::zero());
            }
            q[shift] = lead.clone();
            for (k, c) in r1.iter().enumerate() {
                if !c.is_zero() {
                    let t = &lead * c;
                    r[shift + k] -= t;
                }
            }
            poly_trim(&mut r);
        }
        poly_trim(&mut q);
        // u = u0 - q*u1
        let qu = poly_mul(&q, &u1);
        let mut u = u0.clone();
        if u.len() < qu.len() {
            u.resize(qu.len(), Rat::zero());
        }
        for (k, c) in qu.iter().enumerate() {
            u[k] -= c;
        }
        poly_trim(&mut u);
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u;
    }
    // normalize monic
    let lead = r0.last().unwrap().clone();
    let g: Vec<Rat> = r0.iter().map(|c| c / &lead).collect();
    let u: Vec<Rat> = u0.iter().map(|c| c / &lead).collect();
    (g, u)
}

// ---------------------------------------------------------------------------
// cyclotomic polynomial cache
// ---------------------------------------------------------------------------

fn cyclo_cache() -> &'static RwLock<HashMap<u64, Vec<Rat>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Vec<Rat>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// N-th cyclotomic polynomial as a dense coefficient vector (monic).
fn cyclotomic_poly(n: u64) -> Vec<Rat> {
    if let Some(p) = cyclo_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_n(x) = prod_{d|n} (x^d - 1)^{mu(n/d)}
    let mut num: Vec<Rat> = vec![Rat::one()];
    let mut den: Vec<Rat> = vec![Rat::one()];
    for d in divisors(n) {
        let mut xd = vec![Rat::zero(); d as usize + 1];
        xd[0] = -Rat::one();
        xd[d as usize] = Rat::one();
        match moebius(n / d) {
            1 => num = poly_mul(&num, &xd),
            -1 => den = poly_mul(&den, &xd),
            _ => {}
        }
    }
    let phi = poly_div_exact(&num, &den);
    cyclo_cache().write().unwrap().insert(n, phi.clone());
    phi
}

// ---------------------------------------------------------------------------
// rational linear solve (internal, used for conductor descent)
// ---------------------------------------------------------------------------

/// Solve A y = b over Q where A is given column-major; returns None if
/// inconsistent.
fn rat_solve(cols: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = b.len();
    let ncols = cols.len();
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for c in col..=ncols {
            let v = &m[rank][c] / &inv;
            m[rank][c] = v;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=ncols {
                    let t = &f * &m[rank][c];
                    m[r][c] -= t;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }
    if (rank..rows).any(|r| !m[r][ncols].is_zero()) {
        return None;
    }
    let mut y = vec![Rat::zero(); ncols];
    for (col, prow) in pivot_of_col.iter().enumerate() {
        if let Some(r) = prow {
            y[col] = m[*r][ncols].clone();
        }
    }
    Some(y)
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// An exact element of a cyclotomic field, in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    /// Minimal conductor; never congruent to 2 mod 4; 1 for rationals.
    conductor: u64,
    /// Coefficients over the power basis of zeta_conductor, length phi(N),
    /// trailing zeros trimmed (empty means 0).
    coeffs: Vec<Rat>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            conductor: 1,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        if r.is_zero() {
            Scalar::zero()
        } else {
            Scalar {
                conductor: 1,
                coeffs: vec![r],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rat(rint(n))
    }

    /// `e^{2 pi i k / n}` in canonical form. Errors if the reduced order
    /// exceeds the conductor cap.
    pub fn root_of_unity(k: i64, n: u64) -> Result<Self, ScalarError> {
        assert!(n >= 1, "order must be positive");
        let kk = ((k % n as i64) + n as i64) as u64 % n;
        let g = kk.gcd(&n);
        let (kk, n) = (kk / g, n / g);
        check_cap(n)?;
        if n == 1 {
            return Ok(Scalar::one());
        }
        if n == 2 {
            return Ok(Scalar::from_int(-1));
        }
        let phi = euler_phi(n) as usize;
        let mut poly = vec![Rat::zero(); kk as usize + 1];
        poly[kk as usize] = Rat::one();
        let red = poly_rem(&poly, &cyclotomic_poly(n));
        let mut s = Scalar {
            conductor: n,
            coeffs: red,
        };
        debug_assert!(s.coeffs.len() <= phi);
        s.canonicalize();
        Ok(s)
    }

    /// `e^{2 pi i a}` for rational `a`.
    pub fn root_of_unity_rat(a: &Rat) -> Result<Self, ScalarError> {
        let den: BigInt = a.denom().clone();
        let num: BigInt = a.numer().clone();
        let n: u64 = (&den)
            .try_into()
            .map_err(|_| ScalarError::ConductorCap(u64::MAX, conductor_cap()))?;
        check_cap(n)?;
        let k: i64 = (&num.mod_floor(&den))
            .try_into()
            .expect("reduced numerator fits i64 after mod");
        Scalar::root_of_unity(k, n)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    /// The rational value, if this scalar is rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.conductor != 1 {
            return None;
        }
        Some(self.coeffs.first().cloned().unwrap_or_else(Rat::zero))
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients over the power basis of the minimal conductor.
    pub fn coefficients(&self) -> &[Rat] {
        &self.coeffs
    }

    // -- canonical form ----------------------------------------------------

    /// Reduce to the minimal conductor. Idempotent.
    fn canonicalize(&mut self) {
        poly_trim(&mut self.coeffs);
        if self.coeffs.is_empty() {
            self.conductor = 1;
            return;
        }
        if self.conductor == 1 {
            return;
        }
        if self.coeffs.len() == 1 {
            // lies in Q only if the constant is the whole story, which it is:
            // the representation is already reduced mod Phi_N, and a constant
            // polynomial is a rational number.
            self.conductor = 1;
            return;
        }
        // never keep N = 2 mod 4: Q(zeta_{2m}) = Q(zeta_m) for odd m
        if self.conductor % 4 == 2 {
            let m = self.conductor / 2;
            // zeta_{2m} = -zeta_m^{(m+1)/2}
            let e = ((m + 1) / 2) % m;
            let mut out = vec![Rat::zero(); (self.coeffs.len() - 1) * e as usize + 1];
            for (k, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let idx = k * e as usize;
                let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
                if out.len() <= idx {
                    out.resize(idx + 1, Rat::zero());
                }
                out[idx] += c * sign;
            }
            self.coeffs = poly_rem(&out, &cyclotomic_poly(m));
            self.conductor = m;
            self.canonicalize();
            return;
        }
        // try to descend one prime at a time
        'outer: loop {
            if self.conductor == 1 || self.coeffs.len() <= 1 {
                poly_trim(&mut self.coeffs);
                if self.coeffs.len() <= 1 {
                    self.conductor = 1;
                }
                return;
            }
            let n = self.conductor;
            for (p, _) in factorize(n) {
                let d = n / p;
                if self.descend_to(d) {
                    if self.conductor % 4 == 2 || self.conductor == 2 {
                        // re-normalize the 2 mod 4 case and keep going
                        self.canonicalize();
                        return;
                    }
                    continue 'outer;
                }
            }
            return;
        }
    }

    /// Attempt to rewrite over Q(zeta_d) for d | N; true on success.
    fn descend_to(&mut self, d: u64) -> bool {
        let n = self.conductor;
        // Galois invariance pre-check: fixed by all j = 1 mod d, gcd(j,n)=1
        for j in (1..n).skip(0) {
            if j % d != 1 % d || j.gcd(&n) != 1 || j == 1 {
                continue;
            }
            if self.apply_galois_raw(j) != self.coeffs {
                return false;
            }
        }
        // rewrite: solve for coordinates over the lifted zeta_d powers
        let phi_n = euler_phi(n) as usize;
        let phi_d = euler_phi(d) as usize;
        let step = (n / d) as usize;
        let phi_poly = cyclotomic_poly(n);
        let mut cols = Vec::with_capacity(phi_d);
        for j in 0..phi_d {
            let mut poly = vec![Rat::zero(); j * step + 1];
            poly[j * step] = Rat::one();
            let mut col = poly_rem(&poly, &phi_poly);
            col.resize(phi_n, Rat::zero());
            cols.push(col);
        }
        let mut b = self.coeffs.clone();
        b.resize(phi_n, Rat::zero());
        match rat_solve(&cols, &b) {
            Some(y) => {
                let mut y = y;
                poly_trim(&mut y);
                self.coeffs = y;
                self.conductor = d;
                true
            }
            None => false,
        }
    }

    /// zeta^k -> zeta^{jk}, coefficients fixed; result reduced mod Phi_N.
    fn apply_galois_raw(&self, j: u64) -> Vec<Rat> {
        let n = self.conductor;
        let mut out: Vec<Rat> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = ((k as u64 * j) % n) as usize;
            if out.len() <= idx {
                out.resize(idx + 1, Rat::zero());
            }
            out[idx] += c;
        }
        poly_rem(&out, &cyclotomic_poly(n))
    }

    /// Galois conjugate zeta_N -> zeta_N^j (j coprime to N), canonical.
    pub fn galois(&self, j: u64) -> Scalar {
        if self.conductor == 1 {
            return self.clone();
        }
        let mut s = Scalar {
            conductor: self.conductor,
            coeffs: self.apply_galois_raw(j),
        };
        s.canonicalize();
        s
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Scalar {
        if self.conductor == 1 {
            self.clone()
        } else {
            self.galois(self.conductor - 1)
        }
    }

    // -- arithmetic ---------------------------------------------------------

    fn lift_to(&self, n: u64) -> Vec<Rat> {
        let step = (n / self.conductor) as usize;
        if step == 1 {
            let mut v = self.coeffs.clone();
            v.resize(euler_phi(n) as usize, Rat::zero());
            return v;
        }
        let mut poly: Vec<Rat> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = k * step;
            if poly.len() <= idx {
                poly.resize(idx + 1, Rat::zero());
            }
            poly[idx] += c;
        }
        let mut red = poly_rem(&poly, &cyclotomic_poly(n));
        red.resize(euler_phi(n) as usize, Rat::zero());
        red
    }

    fn common_conductor(&self, other: &Scalar) -> u64 {
        self.conductor.lcm(&other.conductor)
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        if self.conductor == 1 && other.conductor == 1 {
            let a = self.coeffs.first().cloned().unwrap_or_else(Rat::zero);
            let b = other.coeffs.first().cloned().unwrap_or_else(Rat::zero);
            return Scalar::from_rat(a + b);
        }
        let n = self.common_conductor(other);
        let mut a = self.lift_to(n);
        let b = other.lift_to(n);
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        let mut s = Scalar {
            conductor: n,
            coeffs: a,
        };
        s.canonicalize();
        s
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.conductor == 1 && other.conductor == 1 {
            return Scalar::from_rat(&self.coeffs[0] * &other.coeffs[0]);
        }
        if self.conductor == 1 {
            let c = &self.coeffs[0];
            let mut s = Scalar {
                conductor: other.conductor,
                coeffs: other.coeffs.iter().map(|x| x * c).collect(),
            };
            poly_trim(&mut s.coeffs);
            if s.coeffs.is_empty() {
                return Scalar::zero();
            }
            return s;
        }
        if other.conductor == 1 {
            return other.mul_ref(self);
        }
        let n = self.common_conductor(other);
        let a = self.lift_to(n);
        let b = other.lift_to(n);
        let prod = poly_mul(&a, &b);
        let red = poly_rem(&prod, &cyclotomic_poly(n));
        let mut s = Scalar {
            conductor: n,
            coeffs: red,
        };
        s.canonicalize();
        s
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.add_ref(&other.neg_ref())
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.conductor == 1 {
            return Ok(Scalar::from_rat(Rat::one() / &self.coeffs[0]));
        }
        let phi = cyclotomic_poly(self.conductor);
        let (g, u) = poly_half_egcd(&self.coeffs, &phi);
        assert!(g.len() == 1, "cyclotomic polynomial must be coprime to a nonzero element");
        let ginv = Rat::one() / &g[0];
        let coeffs = poly_rem(&u.iter().map(|c| c * &ginv).collect::<Vec<_>>(), &phi);
        let mut s = Scalar {
            conductor: self.conductor,
            coeffs,
        };
        s.canonicalize();
        Ok(s)
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rat) -> Scalar {
        self.mul_ref(&Scalar::from_rat(r.clone()))
    }

    // -- rendering and parsing ----------------------------------------------

    /// Render over a document conductor `doc_n` (a multiple of the minimal
    /// conductor), using `z` for zeta_{doc_n}. Rationals render as `p/q`.
    pub fn render_in(&self, doc_n: u64) -> String {
        if self.conductor == 1 {
            return self.as_rat().unwrap().to_string();
        }
        assert!(doc_n % self.conductor == 0, "document conductor must be a multiple");
        let coeffs = self.lift_to(doc_n);
        render_terms(&coeffs, "z")
    }

    /// Parse the same grammar that rendering produces. `doc_n` supplies the
    /// meaning of the symbol `z`; `zeta_N` tokens are self-contained.
    pub fn parse(input: &str, doc_n: Option<u64>) -> Result<Scalar, ScalarError> {
        parse_scalar(input, doc_n)
    }
}

fn render_terms(coeffs: &[Rat], sym: &str) -> String {
    let mut out = String::new();
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let neg = c.is_negative();
        if first {
            if neg {
                out.push('-');
            }
            first = false;
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let body = if k == 0 {
            mag.to_string()
        } else {
            let zpow = if k == 1 {
                sym.to_string()
            } else {
                format!("{sym}^{k}")
            };
            if mag.is_one() {
                zpow
            } else {
                format!("{mag}*{zpow}")
            }
        };
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Scalar {
    /// Self-contained rendering with explicit `zeta_N` tokens.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conductor == 1 {
            return write!(f, "{}", self.as_rat().unwrap());
        }
        write!(
            f,
            "{}",
            render_terms(&self.coeffs, &format!("zeta_{}", self.conductor))
        )
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// parser -------------------------------------------------------------------

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            s: s.as_bytes(),
            pos: 0,
        }
    }
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn bump(&mut self) -> Option<u8> {
        self.skip_ws();
        let c = self.s.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }
    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse::<BigInt>().ok())
    }
}

fn parse_scalar(input: &str, doc_n: Option<u64>) -> Result<Scalar, ScalarError> {
    let err = |m: &str| ScalarError::Parse(input.to_string(), m.to_string());
    let mut lx = Lexer::new(input);
    let mut acc = Scalar::zero();
    let mut sign = 1i64;
    let mut expect_term = true;
    loop {
        match lx.peek() {
            None => break,
            Some(b'+') => {
                lx.bump();
                if expect_term {
                    return Err(err("unexpected '+'"));
                }
                sign = 1;
                expect_term = true;
            }
            Some(b'-') => {
                lx.bump();
                sign = if expect_term { -sign } else { -1 };
                expect_term = true;
            }
            Some(_) => {
                if !expect_term {
                    return Err(err("expected '+' or '-' between terms"));
                }
                let term = parse_term(&mut lx, doc_n, input)?;
                let term = if sign < 0 { term.neg_ref() } else { term };
                acc = acc.add_ref(&term);
                sign = 1;
                expect_term = false;
            }
        }
    }
    if expect_term && !acc.is_zero() {
        return Err(err("dangling sign"));
    }
    if expect_term && input.trim().is_empty() {
        return Err(err("empty input"));
    }
    Ok(acc)
}

fn parse_term(lx: &mut Lexer, doc_n: Option<u64>, input: &str) -> Result<Scalar, ScalarError> {
    let err = |m: &str| ScalarError::Parse(input.to_string(), m.to_string());
    let mut coeff: Option<Rat> = None;
    if lx.peek().map_or(false, |c| c.is_ascii_digit()) {
        let n = lx.integer().ok_or_else(|| err("bad integer"))?;
        let mut r = Rat::from(n);
        if lx.peek() == Some(b'/') {
            lx.bump();
            let d = lx.integer().ok_or_else(|| err("bad denominator"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            r /= Rat::from(d);
        }
        coeff = Some(r);
        if lx.peek() == Some(b'*') {
            lx.bump();
        } else {
            return Ok(Scalar::from_rat(coeff.unwrap()));
        }
    }
    // zeta factor: `z` or `zeta_N`, optional `^k`
    let c = lx.peek().ok_or_else(|| err("expected zeta factor"))?;
    if c != b'z' {
        return Err(err("expected 'z' or 'zeta_N'"));
    }
    lx.bump();
    let mut order: Option<u64> = doc_n;
    // 'eta_N' suffix?
    if lx.s[lx.pos..].starts_with(b"eta_") {
        lx.pos += 4;
        let n = lx.integer().ok_or_else(|| err("bad conductor in zeta_N"))?;
        let n: u64 = (&n).try_into().map_err(|_| err("conductor too large"))?;
        order = Some(n);
    }
    let order = order.ok_or_else(|| err("symbol 'z' used without a declared conductor"))?;
    let mut power = 1i64;
    if lx.peek() == Some(b'^') {
        lx.bump();
        let neg = if lx.peek() == Some(b'-') {
            lx.bump();
            true
        } else {
            false
        };
        let p = lx.integer().ok_or_else(|| err("bad exponent"))?;
        let p: i64 = (&p).try_into().map_err(|_| err("exponent too large"))?;
        power = if neg { -p } else { p };
    }
    let z = Scalar::root_of_unity(power, order)?;
    Ok(match coeff {
        Some(r) => z.scale(&r),
        None => z,
    })
}

// operator sugar -------------------------------------------------------------

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_ref(rhs)
    }
}
impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.sub_ref(rhs)
    }
}
impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_ref(rhs)
    }
}
impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}
impl std::ops::AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = self.add_ref(rhs);
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::from_rat(r)
    }
}
impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

// ---------------------------------------------------------------------------
// RationalExponent
// ---------------------------------------------------------------------------

/// A rational number with its unique coset decomposition `value = alpha + m`,
/// `alpha` in `[0, 1)`, `m` an integer. Degrees of twisted affine generators
/// and spectral exponents both live here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalExponent {
    value: Rat,
}

impl RationalExponent {
    pub fn new(value: Rat) -> Self {
        RationalExponent { value }
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    /// The coset representative alpha in [0, 1).
    pub fn coset_rep(&self) -> Rat {
        &self.value - self.value.floor()
    }

    /// The integer offset m with value = alpha + m.
    pub fn integer_offset(&self) -> BigInt {
        self.value.floor().to_integer()
    }
}

impl fmt::Display for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for RationalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Fractional part in [0, 1).
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

/// Coset sum on [0,1) representatives: alpha + beta, minus 1 if the sum
/// reaches 1.
pub fn coset_sum(alpha: &Rat, beta: &Rat) -> Rat {
    let s = alpha + beta;
    if s >= Rat::one() {
        s - Rat::one()
    } else {
        s
    }
}

/// Total order on rationals, for deterministic sweeps.
pub fn rat_cmp(a: &Rat, b: &Rat) -> Ordering {
    a.cmp(b)
}

// ---------------------------------------------------------------------------
// PiScalar: the graded extension by the formal constant 2*pi*i
// ---------------------------------------------------------------------------

/// Polynomials in the formal transcendental `t = 2*pi*i` with [`Scalar`]
/// coefficients. Entries of `exp(2 pi i N)` for nilpotent `N` live here, so
/// non-semisimple automorphisms can be checked exactly. Downstream module
/// formulas never see this type: they consume the rational nilpotent part
/// directly.
#[derive(Clone, PartialEq, Eq)]
pub struct PiScalar {
    /// Coefficient of t^k at index k; trailing zeros trimmed.
    terms: Vec<Scalar>,
}

impl PiScalar {
    pub fn zero() -> Self {
        PiScalar { terms: Vec::new() }
    }

    pub fn from_scalar(s: Scalar) -> Self {
        if s.is_zero() {
            Self::zero()
        } else {
            PiScalar { terms: vec![s] }
        }
    }

    pub fn one() -> Self {
        Self::from_scalar(Scalar::one())
    }

    /// `s * t^k`.
    pub fn monomial(s: Scalar, k: usize) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut terms = vec![Scalar::zero(); k + 1];
        terms[k] = s;
        PiScalar { terms }
    }

    fn trim(&mut self) {
        while self.terms.last().map_or(false, |c| c.is_zero()) {
            self.terms.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of t^k.
    pub fn coeff(&self, k: usize) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.terms.len() - 1)
        }
    }

    pub fn add_ref(&self, other: &PiScalar) -> PiScalar {
        let mut terms = self.terms.clone();
        if terms.len() < other.terms.len() {
            terms.resize(other.terms.len(), Scalar::zero());
        }
        for (k, c) in other.terms.iter().enumerate() {
            terms[k] = terms[k].add_ref(c);
        }
        let mut p = PiScalar { terms };
        p.trim();
        p
    }

    pub fn neg_ref(&self) -> PiScalar {
        PiScalar {
            terms: self.terms.iter().map(|c| c.neg_ref()).collect(),
        }
    }

    pub fn sub_ref(&self, other: &PiScalar) -> PiScalar {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &PiScalar) -> PiScalar {
        if self.is_zero() || other.is_zero() {
            return PiScalar::zero();
        }
        let mut terms = vec![Scalar::zero(); self.terms.len() + other.terms.len() - 1];
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.terms.iter().enumerate() {
                if !b.is_zero() {
                    terms[i + j] = terms[i + j].add_ref(&a.mul_ref(b));
                }
            }
        }
        let mut p = PiScalar { terms };
        p.trim();
        p
    }

    pub fn scale(&self, s: &Scalar) -> PiScalar {
        let mut p = PiScalar {
            terms: self.terms.iter().map(|c| c.mul_ref(s)).collect(),
        };
        p.trim();
        p
    }
}

impl fmt::Display for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c})*(2*pi*i)"),
                _ => format!("({c})*(2*pi*i)^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PiScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: i64, n: u64) -> Scalar {
        Scalar::root_of_unity(k, n).unwrap()
    }

    #[test]
    fn roots_identity_cases() {
        assert_eq!(z(0, 1), Scalar::one());
        assert_eq!(z(1, 2), Scalar::from_int(-1));
        assert!(z(1, 2).is_rational());
    }

    #[test]
    fn fourth_root_squares_to_minus_one() {
        let i = z(1, 4);
        let sq = i.mul_ref(&i);
        assert_eq!(sq, z(1, 2));
        assert!(sq.is_rational());
        assert_eq!(sq.as_rat().unwrap(), rint(-1));
    }

    #[test]
    fn root_power_is_one() {
        for n in 1..=12u64 {
            let r = z(1, n);
            assert!(r.pow(n).is_one(), "zeta_{n}^{n} != 1");
        }
    }

    #[test]
    fn rational_arith() {
        let a = Scalar::from_rat(rat(1, 2));
        let b = Scalar::from_rat(rat(1, 3));
        assert_eq!(a.add_ref(&b).as_rat().unwrap(), rat(5, 6));
    }

    #[test]
    fn cube_roots_multiply_to_one() {
        let w = z(1, 3);
        let w2 = z(2, 3);
        assert!(w.mul_ref(&w2).is_one());
    }

    #[test]
    fn inverse_of_one_plus_i() {
        // (1 + zeta_4)^(-1) = (1 - zeta_4)/2, checked by conjugate oracle:
        // (1+i)(1-i) = 2.
        let i = z(1, 4);
        let x = Scalar::one().add_ref(&i);
        let inv = x.inv().unwrap();
        let expected = Scalar::one().sub_ref(&i).scale(&rat(1, 2));
        assert_eq!(inv, expected);
        assert!(x.mul_ref(&inv).is_one());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Scalar::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn conductor_is_minimal() {
        // zeta_12^3 = i has conductor 4
        let x = z(3, 12);
        assert_eq!(x.conductor(), 4);
        // zeta_6 = -zeta_3^2 has conductor 3
        let y = z(1, 6);
        assert_eq!(y.conductor(), 3);
        // zeta_8^2 = i
        assert_eq!(z(2, 8), z(1, 4));
    }

    #[test]
    fn sum_of_all_nth_roots_vanishes() {
        for n in 2..=10u64 {
            let mut acc = Scalar::zero();
            for k in 0..n {
                acc = acc.add_ref(&z(k as i64, n));
            }
            assert!(acc.is_zero(), "sum of {n}-th roots");
        }
    }

    #[test]
    fn conductor_cap_enforced() {
        let cap = conductor_cap();
        set_conductor_cap(10);
        let r = Scalar::root_of_unity(1, 11);
        assert!(matches!(r, Err(ScalarError::ConductorCap(11, 10))));
        set_conductor_cap(cap);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let samples = vec![
            Scalar::zero(),
            Scalar::from_rat(rat(-7, 3)),
            z(1, 3),
            z(1, 4).scale(&rat(3, 2)).add_ref(&Scalar::one()),
            z(1, 5).add_ref(&z(2, 5)),
            z(5, 12).sub_ref(&Scalar::from_rat(rat(1, 6))),
        ];
        for s in samples {
            let text = s.to_string();
            let back = Scalar::parse(&text, None).unwrap();
            assert_eq!(back, s, "round trip through `{text}`");
        }
    }

    #[test]
    fn document_rendering_round_trip() {
        let s = z(1, 4).add_ref(&Scalar::from_rat(rat(1, 2)));
        let doc = s.render_in(12);
        let back = Scalar::parse(&doc, Some(12)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn galois_conjugation_fixes_rationals() {
        let x = z(1, 5).add_ref(&z(4, 5));
        // x = 2 cos(2 pi / 5) is real; conjugation fixes it
        assert_eq!(x.conj(), x);
    }

    #[test]
    fn coset_sum_cases() {
        assert_eq!(coset_sum(&rint(0), &rint(0)), rint(0));
        assert_eq!(coset_sum(&rat(1, 2), &rat(1, 2)), rint(0));
        assert_eq!(coset_sum(&rat(1, 3), &rat(1, 3)), rat(2, 3));
    }

    #[test]
    fn exponent_coset_decomposition() {
        let e = RationalExponent::new(rat(-3, 2));
        assert_eq!(e.coset_rep(), rat(1, 2));
        assert_eq!(e.integer_offset(), BigInt::from(-2));
    }

    #[test]
    fn pi_scalar_grading() {
        let a = PiScalar::monomial(Scalar::from_int(2), 1);
        let b = PiScalar::monomial(Scalar::from_int(3), 2);
        let p = a.mul_ref(&b);
        assert_eq!(p.coeff(3), Scalar::from_int(6));
        assert!(p.coeff(0).is_zero());
        assert_eq!(a.add_ref(&a).coeff(1), Scalar::from_int(4));
    }
}
