//! Exact arithmetic in the real cyclotomic field Q(θ), θ = 2cos(π/2n).
//!
//! Elements are stored in the power basis 1, θ, ..., θ^(d-1) with rational
//! coefficients. The minimal polynomial of θ is obtained from the cyclotomic
//! polynomial Φ_{4n} through the substitution y = x + 1/x.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("half order n must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements live in different fields: n = {0} and n = {1}")]
    ContextMismatch(usize, usize),
    #[error("malformed number: {0}")]
    Parse(String),
}

/// Integer polynomial, coefficients from low to high degree.
pub type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Exact division by a monic polynomial. Panics if the remainder is nonzero.
fn poly_div_exact(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut rem = a.clone();
    let db = b.len() - 1;
    assert!(b[db].is_one(), "divisor must be monic");
    if rem.len() < b.len() {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); rem.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    trim(&mut q);
    q
}

/// The cyclotomic polynomial Φ_m.
pub fn cyclotomic(m: usize) -> IntPoly {
    let mut num = vec![BigInt::zero(); m + 1];
    num[0] = -BigInt::one();
    num[m] = BigInt::one();
    let mut den: IntPoly = vec![BigInt::one()];
    for d in 1..m {
        if m % d == 0 {
            den = poly_mul(&den, &cyclotomic(d));
        }
    }
    poly_div_exact(&num, &den)
}

/// Minimal polynomial of 2cos(π/2n) over Q.
pub fn theta_minpoly(n: usize) -> Result<IntPoly, AlgError> {
    if n < 2 {
        return Err(AlgError::InvalidOrder(n));
    }
    let phi = cyclotomic(4 * n);
    let d = (phi.len() - 1) / 2;
    // p_k(y) = x^k + x^-k written in y = x + 1/x
    let mut p: Vec<IntPoly> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
    for k in 1..d {
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, c) in p[k].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in p[k - 1].iter().enumerate() {
            next[i] -= c;
        }
        trim(&mut next);
        p.push(next);
    }
    let mut psi = vec![phi[d].clone()];
    psi.resize(d + 1, BigInt::zero());
    for k in 1..=d {
        let a = &phi[d + k];
        for (i, c) in p[k].iter().enumerate() {
            psi[i] += a * c;
        }
    }
    trim(&mut psi);
    Ok(psi)
}

/// Shared data for one field Q(θ).
#[derive(Debug)]
pub struct CycContext {
    n: usize,
    minpoly: IntPoly,
    /// reduce[k] = θ^(d+k) in the power basis, k = 0..d-2
    reduce: Vec<Vec<BigRational>>,
    theta_f64: f64,
}

impl CycContext {
    fn build(n: usize) -> Result<Self, AlgError> {
        let minpoly = theta_minpoly(n)?;
        let d = minpoly.len() - 1;
        let mut reduce = Vec::new();
        // θ^d = -(m_0 + ... + m_{d-1} θ^{d-1})
        let mut cur: Vec<BigRational> = minpoly[..d]
            .iter()
            .map(|c| BigRational::from_integer(-c.clone()))
            .collect();
        for _ in 0..d.saturating_sub(1) {
            reduce.push(cur.clone());
            let top = cur[d - 1].clone();
            let mut next = vec![BigRational::zero(); d];
            for i in 1..d {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..d {
                    next[i] -= &top * BigRational::from_integer(minpoly[i].clone());
                }
            }
            cur = next;
        }
        let theta_f64 = 2.0 * (std::f64::consts::PI / (2.0 * n as f64)).cos();
        Ok(CycContext { n, minpoly, reduce, theta_f64 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta_f64
    }
}

static CONTEXTS: OnceLock<Mutex<HashMap<usize, Arc<CycContext>>>> = OnceLock::new();

/// Cached context for Q(2cos(π/2n)).
pub fn cyc_context(n: usize) -> Result<Arc<CycContext>, AlgError> {
    let cache = CONTEXTS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(ctx) = cache.lock().unwrap().get(&n) {
        return Ok(ctx.clone());
    }
    let ctx = Arc::new(CycContext::build(n)?);
    cache.lock().unwrap().entry(n).or_insert_with(|| ctx.clone());
    Ok(ctx)
}

/// Starting precision (bits) of the interval sign test; `FOLDQ_PRECISION` overrides.
pub fn default_precision() -> u32 {
    std::env::var("FOLDQ_PRECISION")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&b: &u32| b >= 8)
        .unwrap_or(64)
}

/// An element of Q(θ). Without a context the element is a plain rational.
#[derive(Clone)]
pub struct RealCycNumber {
    ctx: Option<Arc<CycContext>>,
    coeffs: Vec<BigRational>,
}

fn trim_q(c: &mut Vec<BigRational>) {
    while c.len() > 1 && c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    if c.is_empty() {
        c.push(BigRational::zero());
    }
}

fn join_ctx(
    a: &Option<Arc<CycContext>>,
    b: &Option<Arc<CycContext>>,
) -> Result<Option<Arc<CycContext>>, AlgError> {
    match (a, b) {
        (Some(x), Some(y)) if x.n != y.n => Err(AlgError::ContextMismatch(x.n, y.n)),
        (Some(x), _) => Ok(Some(x.clone())),
        (None, y) => Ok(y.clone()),
    }
}

impl RealCycNumber {
    pub fn from_rational(ctx: Option<Arc<CycContext>>, q: BigRational) -> Self {
        RealCycNumber { ctx, coeffs: vec![q] }
    }

    pub fn from_int(ctx: &Arc<CycContext>, k: i64) -> Self {
        Self::from_rational(Some(ctx.clone()), BigRational::from_integer(k.into()))
    }

    pub fn theta(ctx: &Arc<CycContext>) -> Self {
        Self::from_coeffs(ctx, vec![BigRational::zero(), BigRational::one()])
    }

    /// Builds θ-polynomial sum c_i θ^i, reducing modulo the minimal polynomial.
    pub fn from_coeffs(ctx: &Arc<CycContext>, coeffs: Vec<BigRational>) -> Self {
        let mut out = RealCycNumber { ctx: Some(ctx.clone()), coeffs: Vec::new() };
        out.coeffs = out.reduce(coeffs);
        out
    }

    pub fn from_int_coeffs(ctx: &Arc<CycContext>, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            ctx,
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )
    }

    pub fn context(&self) -> Option<&Arc<CycContext>> {
        self.ctx.as_ref()
    }

    /// Coefficients in the power basis, padded to the field degree.
    pub fn coeffs(&self) -> Vec<BigRational> {
        let d = self.ctx.as_ref().map_or(1, |c| c.degree());
        let mut out = self.coeffs.clone();
        out.resize(d.max(out.len()), BigRational::zero());
        out
    }

    pub fn is_zero_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.len() == 1 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        if let Some(ctx) = &self.ctx {
            let d = ctx.degree();
            if c.len() > d {
                let high: Vec<BigRational> = c.drain(d..).collect();
                c.resize(d, BigRational::zero());
                for (k, h) in high.iter().enumerate() {
                    if h.is_zero() {
                        continue;
                    }
                    for (i, r) in ctx.reduce[k].iter().enumerate() {
                        if !r.is_zero() {
                            c[i] += h * r;
                        }
                    }
                }
            }
        } else {
            assert!(c.len() <= 1 || c[1..].iter().all(|x| x.is_zero()), "θ without a field");
            c.truncate(1);
        }
        trim_q(&mut c);
        c
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgError> {
        let ctx = join_ctx(&self.ctx, &other.ctx)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![BigRational::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[i] += x;
        }
        for (i, x) in other.coeffs.iter().enumerate() {
            c[i] += x;
        }
        trim_q(&mut c);
        Ok(RealCycNumber { ctx, coeffs: c })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgError> {
        self.try_add(&other.clone().neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgError> {
        let ctx = join_ctx(&self.ctx, &other.ctx)?;
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        let tmp = RealCycNumber { ctx, coeffs: Vec::new() };
        let coeffs = tmp.reduce(c);
        Ok(RealCycNumber { ctx: tmp.ctx, coeffs })
    }

    /// Multiplicative inverse by solving x·y = 1 in the power basis.
    pub fn inv(&self) -> Result<Self, AlgError> {
        if self.is_zero_exact() {
            return Err(AlgError::DivisionByZero);
        }
        let ctx = match &self.ctx {
            None => {
                return Ok(Self::from_rational(None, self.coeffs[0].recip()));
            }
            Some(c) => c.clone(),
        };
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(Some(ctx), q.recip()));
        }
        let d = ctx.degree();
        // column j holds x·θ^j
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        let mut cur = self.clone();
        let theta = Self::theta(&ctx);
        for _ in 0..d {
            cols.push(cur.coeffs());
            cur = cur.try_mul(&theta)?;
        }
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !a[r][col].is_zero()).ok_or(AlgError::DivisionByZero)?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..d {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for k in col..=d {
                        let t = &f * &a[col][k];
                        a[r][k] -= t;
                    }
                }
            }
        }
        Ok(Self::from_coeffs(&ctx, a.into_iter().map(|r| r[d].clone()).collect()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, AlgError> {
        join_ctx(&self.ctx, &other.ctx)?;
        self.try_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::from_rational(self.ctx.clone(), BigRational::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Floating-point approximation.
    pub fn to_f64(&self) -> f64 {
        let t = self.ctx.as_ref().map_or(0.0, |c| c.theta_f64);
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact sign: -1, 0 or 1.
    pub fn sign(&self) -> i8 {
        self.sign_with_precision(default_precision())
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        (self - other).sign().cmp(&0)
    }

    pub fn sign_with_precision(&self, start_bits: u32) -> i8 {
        if self.is_zero_exact() {
            return 0;
        }
        if let Some(q) = self.as_rational() {
            return if q.is_positive() { 1 } else { -1 };
        }
        let ctx = self.ctx.as_ref().expect("non-rational element has a context");
        let t = ctx.theta_f64;
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        let mut finite = true;
        for c in self.coeffs.iter().rev() {
            let cf = c.to_f64().unwrap_or(f64::NAN);
            finite &= cf.is_finite();
            v = v * t + cf;
            mag = mag * t + cf.abs();
        }
        let bound = mag * (2.0 * self.coeffs.len() as f64 + 4.0) * f64::EPSILON * 4.0;
        if finite && v.abs() > bound {
            return if v > 0.0 { 1 } else { -1 };
        }
        self.interval_sign(ctx, start_bits)
    }

    fn interval_sign(&self, ctx: &CycContext, start_bits: u32) -> i8 {
        let (mut lo, mut hi) = theta_bracket(ctx);
        let mut bits = start_bits;
        loop {
            let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
            while &hi - &lo > eps {
                let mid = (&lo + &hi) / BigRational::from_integer(2.into());
                let s = eval_int_poly(&ctx.minpoly, &mid);
                if s.is_zero() {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if s.signum() == eval_int_poly(&ctx.minpoly, &lo).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (mut lower, mut upper) = (BigRational::zero(), BigRational::zero());
            let (mut plo, mut phi) = (BigRational::one(), BigRational::one());
            for c in &self.coeffs {
                if c.is_positive() {
                    lower += c * &plo;
                    upper += c * &phi;
                } else {
                    lower += c * &phi;
                    upper += c * &plo;
                }
                plo *= &lo;
                phi *= &hi;
            }
            if lower.is_positive() {
                return 1;
            }
            if upper.is_negative() {
                return -1;
            }
            bits = bits.saturating_mul(2);
        }
    }
}

fn eval_int_poly(p: &IntPoly, x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// A rational interval containing θ and no other root of its minimal polynomial.
fn theta_bracket(ctx: &CycContext) -> (BigRational, BigRational) {
    let scale = BigInt::one() << 40u32;
    let mut width = BigRational::new(BigInt::one(), BigInt::one() << 20u32);
    let centre = BigRational::new(
        BigInt::from((ctx.theta_f64 * 2f64.powi(40)).round() as i64),
        scale,
    );
    // the next root 2cos(3π/2n) lies well below θ - 2^-20 for every n in use
    loop {
        let lo = &centre - &width;
        let hi = &centre + &width;
        let a = eval_int_poly(&ctx.minpoly, &lo);
        let b = eval_int_poly(&ctx.minpoly, &hi);
        if a.is_zero() {
            return (lo.clone(), lo);
        }
        if b.is_zero() {
            return (hi.clone(), hi);
        }
        if a.signum() != b.signum() {
            return (lo, hi);
        }
        width = width * BigRational::from_integer(2.into());
    }
}

impl fmt::Debug for RealCycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Renders as a polynomial in t = θ, e.g. `-1 + 3/2 t^2`.
impl fmt::Display for RealCycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{}", i),
            };
            let abs = c.abs();
            let body = if i == 0 {
                abs.to_string()
            } else if abs.is_one() {
                mono
            } else {
                format!("{} {}", abs, mono)
            };
            if parts.is_empty() {
                parts.push(if c.is_negative() { format!("-{}", body) } else { body });
            } else {
                parts.push(format!("{} {}", if c.is_negative() { "-" } else { "+" }, body));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl PartialEq for RealCycNumber {
    fn eq(&self, other: &Self) -> bool {
        if let (Some(a), Some(b)) = (&self.ctx, &other.ctx) {
            if a.n != b.n && (self.coeffs.len() > 1 || other.coeffs.len() > 1) {
                return false;
            }
        }
        self.coeffs == other.coeffs
    }
}

impl Zero for RealCycNumber {
    fn zero() -> Self {
        RealCycNumber { ctx: None, coeffs: vec![BigRational::zero()] }
    }
    fn is_zero(&self) -> bool {
        self.is_zero_exact()
    }
}

impl One for RealCycNumber {
    fn one() -> Self {
        RealCycNumber { ctx: None, coeffs: vec![BigRational::one()] }
    }
}

impl Neg for RealCycNumber {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &RealCycNumber {
    type Output = RealCycNumber;
    fn neg(self) -> RealCycNumber {
        self.clone().neg()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for RealCycNumber {
            type Output = RealCycNumber;
            fn $m(self, rhs: Self) -> RealCycNumber {
                self.$f(&rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl<'a> $tr<&'a RealCycNumber> for &'a RealCycNumber {
            type Output = RealCycNumber;
            fn $m(self, rhs: &'a RealCycNumber) -> RealCycNumber {
                self.$f(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl<'a> $tr<&'a RealCycNumber> for RealCycNumber {
            type Output = RealCycNumber;
            fn $m(self, rhs: &'a RealCycNumber) -> RealCycNumber {
                self.$f(rhs).unwrap_or_else(|e| panic!("{}", e))
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Serialize for RealCycNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: Option<usize>,
            coeffs: &'a [String],
        }
        let coeffs: Vec<String> = self
            .coeffs()
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        Repr { n: self.ctx.as_ref().map(|c| c.n), coeffs: &coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealCycNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: Option<usize>,
            coeffs: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| BigRational::from_str(s).map_err(|_| D::Error::custom(format!("bad rational {s}"))))
            .collect::<Result<Vec<_>, _>>()?;
        match r.n {
            Some(n) => {
                let ctx = cyc_context(n).map_err(D::Error::custom)?;
                if coeffs.len() > ctx.degree() {
                    return Err(D::Error::custom("too many coefficients"));
                }
                Ok(RealCycNumber::from_coeffs(&ctx, coeffs))
            }
            None => {
                let mut c = coeffs;
                if c.len() > 1 {
                    return Err(D::Error::custom("rational with θ-terms"));
                }
                trim_q(&mut c);
                Ok(RealCycNumber { ctx: None, coeffs: c })
            }
        }
    }
}

/// 2cos(kπ/2n) as an element of Q(θ).
pub fn two_cos(ctx: &Arc<CycContext>, k: i64) -> RealCycNumber {
    let k = k.unsigned_abs();
    let theta = RealCycNumber::theta(ctx);
    let mut prev = RealCycNumber::from_int(ctx, 2);
    if k == 0 {
        return prev;
    }
    let mut cur = theta.clone();
    for _ in 1..k {
        let next = &(&theta * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Chebyshev values U_i(t) with U_0 = 1, U_1 = t, U_{i+1} = t U_i - U_{i-1}.
/// Negative indices follow U_{-1} = 0, U_{-i} = -U_{i-2}.
pub fn chebyshev_u_at(t: &RealCycNumber, i: i64) -> RealCycNumber {
    let one = RealCycNumber::from_rational(t.context().cloned(), BigRational::one());
    if i < 0 {
        if i == -1 {
            return RealCycNumber::from_rational(t.context().cloned(), BigRational::zero());
        }
        return -chebyshev_u_at(t, -i - 2);
    }
    let mut prev = RealCycNumber::from_rational(t.context().cloned(), BigRational::zero());
    let mut cur = one;
    for _ in 0..i {
        let next = &(t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// U_i(θ) in Q(θ).
pub fn chebyshev_u(ctx: &Arc<CycContext>, i: i64) -> RealCycNumber {
    chebyshev_u_at(&RealCycNumber::theta(ctx), i)
}

/// Rational number from a `p/q` or integer string.
pub fn parse_rational(s: &str) -> Result<BigRational, AlgError> {
    BigRational::from_str(s.trim()).map_err(|_| AlgError::Parse(s.to_string()))
}
