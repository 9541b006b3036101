//! Chebyshev rings attached to the unfoldings of I2(2n).
//!
//! Each folding type carries a based commutative ring (the "hat" ring) whose
//! basis is in bijection with the vertices of the unfolding quiver, a small
//! subring R together with a positive basis, and a ring homomorphism ρ into
//! Q(θ). Type A and D products come from closed formulas; D4 and the E types
//! are derived mechanically from their presentations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algnum::{chebyshev_u, chebyshev_u_at, cyc_context, two_cos, CycContext, RealCycNumber};
use crate::intlin::{express_in, solve_integer};
use crate::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("unknown folding type {0}")]
    UnknownType(String),
    #[error("unknown basis label {0}")]
    UnknownLabel(String),
    #[error("elements of different rings: {0} and {1}")]
    TypeMismatch(FoldingType, FoldingType),
    #[error("presentation does not yield the claimed basis: {0}")]
    Presentation(String),
    #[error("malformed element: {0}")]
    Parse(String),
}

/// Unfolding types of I2(2n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FoldingType {
    /// A_{2n-1}
    A(usize),
    /// D_{n+1}
    D(usize),
    E6,
    E7,
    E8,
}

impl FoldingType {
    /// The n of I2(2n).
    pub fn half_order(&self) -> usize {
        match *self {
            FoldingType::A(n) | FoldingType::D(n) => n,
            FoldingType::E6 => 6,
            FoldingType::E7 => 9,
            FoldingType::E8 => 15,
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            FoldingType::A(n) => 2 * n - 1,
            FoldingType::D(n) => n + 1,
            FoldingType::E6 => 6,
            FoldingType::E7 => 7,
            FoldingType::E8 => 8,
        }
    }

    pub fn validate(&self) -> Result<(), RingError> {
        match *self {
            FoldingType::A(n) if n < 2 => Err(RingError::UnknownType(format!("A{}", 2 * n as i64 - 1))),
            FoldingType::D(n) if n < 3 => Err(RingError::UnknownType(format!("D{}", n + 1))),
            _ => Ok(()),
        }
    }

    pub fn is_d_family(&self) -> bool {
        matches!(self, FoldingType::D(_))
    }

    /// The foldings used throughout the test-suite.
    pub fn catalogue() -> Vec<FoldingType> {
        let mut v: Vec<FoldingType> = (2..=6).map(FoldingType::A).collect();
        v.extend((3..=8).map(FoldingType::D));
        v.extend([FoldingType::E6, FoldingType::E7, FoldingType::E8]);
        v
    }
}

impl fmt::Display for FoldingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FoldingType::A(n) => write!(f, "A{}", 2 * n - 1),
            FoldingType::D(n) => write!(f, "D{}", n + 1),
            FoldingType::E6 => write!(f, "E6"),
            FoldingType::E7 => write!(f, "E7"),
            FoldingType::E8 => write!(f, "E8"),
        }
    }
}

impl FromStr for FoldingType {
    type Err = RingError;
    fn from_str(s: &str) -> Result<Self, RingError> {
        let bad = || RingError::UnknownType(s.to_string());
        let t = s.trim();
        let (head, tail) = t.split_at(t.chars().next().map_or(0, |c| c.len_utf8()));
        let k: usize = tail.parse().map_err(|_| bad())?;
        let ty = match head {
            "A" | "a" if k % 2 == 1 && k >= 3 => FoldingType::A((k + 1) / 2),
            "D" | "d" if k >= 4 => FoldingType::D(k - 1),
            "E" | "e" => match k {
                6 => FoldingType::E6,
                7 => FoldingType::E7,
                8 => FoldingType::E8,
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        };
        Ok(ty)
    }
}

impl Serialize for FoldingType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FoldingType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Multiplication table and auxiliary data of a hat ring.
#[derive(Debug)]
pub struct RingData {
    pub ty: FoldingType,
    pub ctx: Arc<CycContext>,
    /// labels of the hat basis; index 0 is the unit
    pub labels: Vec<String>,
    /// mult[a][b] = coordinates of e_a e_b
    pub mult: Vec<Vec<Vec<i64>>>,
    /// ρ on the hat basis
    pub rho: Vec<RealCycNumber>,
    /// basis of the vertex module, one hat vector per quiver vertex
    pub vertex_basis: Vec<Vec<i64>>,
    pub vertex_names: Vec<String>,
    /// positive basis of the small ring R, in hat coordinates
    pub small_basis: Vec<Vec<i64>>,
    pub small_labels: Vec<String>,
    /// the element whose vertex representation is the adjacency matrix
    pub s: Vec<i64>,
    /// elements acting as graph automorphisms of the quiver
    pub symmetries: Vec<Vec<i64>>,
    /// vertex weights are `weight_scale` times ρ of the vertex label
    pub weight_scale: i64,
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

impl RingData {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn one(&self) -> Vec<i64> {
        unit(self.dim(), 0)
    }

    pub fn mul_coords(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let n = self.dim();
        let mut out = vec![0i64; n];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                for (k, &c) in self.mult[i][j].iter().enumerate() {
                    out[k] += x * y * c;
                }
            }
        }
        out
    }

    pub fn rho_coords(&self, a: &[i64]) -> RealCycNumber {
        let mut out = RealCycNumber::from_int(&self.ctx, 0);
        for (i, &x) in a.iter().enumerate() {
            if x != 0 {
                out = &out + &(&self.rho[i] * &RealCycNumber::from_int(&self.ctx, x));
            }
        }
        out
    }

    /// Coordinates of a hat vector in the vertex basis.
    pub fn vertex_coords(&self, a: &[i64]) -> Option<Vec<i64>> {
        express_in(&self.vertex_basis, a)
    }

    /// Coordinates in the small positive basis, if the element lies in R.
    pub fn small_coords(&self, a: &[i64]) -> Option<Vec<i64>> {
        express_in(&self.small_basis, a)
    }

    /// Matrix of multiplication by `a` on the vertex module (columns are images).
    pub fn vertex_rep(&self, a: &[i64]) -> IntMatrix {
        let n = self.vertex_basis.len();
        let mut m = IntMatrix::zeros(n, n);
        for (j, v) in self.vertex_basis.iter().enumerate() {
            let img = self.mul_coords(a, v);
            let c = self
                .vertex_coords(&img)
                .expect("the vertex module is closed under multiplication");
            for (i, x) in c.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Matrix of multiplication by `a` on the hat basis.
    pub fn full_regular_rep(&self, a: &[i64]) -> IntMatrix {
        let n = self.dim();
        let mut m = IntMatrix::zeros(n, n);
        for j in 0..n {
            for (i, x) in self.mul_coords(a, &unit(n, j)).into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        let l = label.trim();
        if l == "1" || l == "w0" {
            return Some(0);
        }
        self.labels.iter().position(|x| x == l)
    }

    /// Vertex weights w(v).
    pub fn weights(&self) -> Vec<RealCycNumber> {
        let k = RealCycNumber::from_int(&self.ctx, self.weight_scale);
        self.vertex_basis.iter().map(|v| &self.rho_coords(v) * &k).collect()
    }

    /// Adjacency matrix of the quiver, read off from multiplication by s.
    pub fn adjacency(&self) -> IntMatrix {
        self.vertex_rep(&self.s)
    }
}

/// Element of a hat ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElt {
    pub ty: FoldingType,
    pub coords: Vec<i64>,
}

impl RingElt {
    pub fn new(ty: FoldingType, coords: Vec<i64>) -> Self {
        RingElt { ty, coords }
    }

    pub fn one(ty: FoldingType) -> Result<Self, RingError> {
        let d = ring_data(ty)?;
        Ok(RingElt { ty, coords: d.one() })
    }

    pub fn zero(ty: FoldingType) -> Result<Self, RingError> {
        let d = ring_data(ty)?;
        Ok(RingElt { ty, coords: vec![0; d.dim()] })
    }

    pub fn basis(ty: FoldingType, label: &str) -> Result<Self, RingError> {
        let d = ring_data(ty)?;
        let i = d.label_index(label).ok_or_else(|| RingError::UnknownLabel(label.to_string()))?;
        Ok(RingElt { ty, coords: unit(d.dim(), i) })
    }

    /// Parses sums such as `w2 + 2*w4` or `1 - w0-`.
    pub fn parse(ty: FoldingType, s: &str) -> Result<Self, RingError> {
        let d = ring_data(ty)?;
        let mut out = vec![0i64; d.dim()];
        let mut sign = 1i64;
        for tok in s.split_whitespace() {
            match tok {
                "+" => sign = 1,
                "-" => sign = -1,
                t => {
                    let (c, l) = match t.split_once('*') {
                        Some((c, l)) => (c.parse::<i64>().map_err(|_| RingError::Parse(s.to_string()))?, l),
                        None => (1, t),
                    };
                    if let Ok(k) = l.parse::<i64>() {
                        out[0] += sign * c * k;
                    } else {
                        let i = d.label_index(l).ok_or_else(|| RingError::UnknownLabel(l.to_string()))?;
                        out[i] += sign * c;
                    }
                    sign = 1;
                }
            }
        }
        Ok(RingElt { ty, coords: out })
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.ty != other.ty {
            Err(RingError::TypeMismatch(self.ty, other.ty))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(RingElt { ty: self.ty, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        Ok(RingElt { ty: self.ty, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect() })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let d = ring_data(self.ty)?;
        Ok(RingElt { ty: self.ty, coords: d.mul_coords(&self.coords, &other.coords) })
    }

    pub fn scale(&self, k: i64) -> Self {
        RingElt { ty: self.ty, coords: self.coords.iter().map(|x| k * x).collect() }
    }

    pub fn rho(&self) -> RealCycNumber {
        ring_data(self.ty).expect("validated type").rho_coords(&self.coords)
    }

    /// Multiplication on the vertex module (the regular representation for all
    /// but the D family, where the module is the ideal spanned by vertex labels).
    pub fn regular_rep(&self) -> IntMatrix {
        ring_data(self.ty).expect("validated type").vertex_rep(&self.coords)
    }

    pub fn is_semiring_member(&self) -> bool {
        let d = ring_data(self.ty).expect("validated type");
        d.small_coords(&self.coords).map_or(false, |c| c.iter().all(|&x| x >= 0))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    /// Partial order of the semiring: a <= b iff b - a has non-negative
    /// coordinates in the positive basis.
    pub fn partial_cmp_semiring(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        let d = ring_data(self.ty).ok()?;
        let a = d.small_coords(&self.coords)?;
        let b = d.small_coords(&other.coords)?;
        let le = a.iter().zip(&b).all(|(x, y)| x <= y);
        let ge = a.iter().zip(&b).all(|(x, y)| x >= y);
        match (le, ge) {
            (true, true) => Some(Equal),
            (true, false) => Some(Less),
            (false, true) => Some(Greater),
            _ => None,
        }
    }
}

impl fmt::Display for RingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = ring_data(self.ty).map_err(|_| fmt::Error)?;
        let mut first = true;
        for (i, &c) in self.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let l = if i == 0 { "1" } else { d.labels[i].as_str() };
            let sep = if first { if c < 0 { "-" } else { "" } } else if c < 0 { " - " } else { " + " };
            if c.abs() == 1 {
                write!(f, "{sep}{l}")?;
            } else if i == 0 {
                write!(f, "{sep}{}", c.abs())?;
            } else {
                write!(f, "{sep}{}*{l}", c.abs())?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for RingElt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            #[serde(rename = "type")]
            ty: FoldingType,
            coords: std::collections::BTreeMap<String, i64>,
        }
        let d = ring_data(self.ty).map_err(serde::ser::Error::custom)?;
        let coords = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (d.labels[i].clone(), c))
            .collect();
        Repr { ty: self.ty, coords }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RingElt {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(rename = "type")]
            ty: FoldingType,
            coords: std::collections::BTreeMap<String, i64>,
        }
        let r = Repr::deserialize(de)?;
        let d = ring_data(r.ty).map_err(D::Error::custom)?;
        let mut coords = vec![0; d.dim()];
        for (l, c) in r.coords {
            let i = d.label_index(&l).ok_or_else(|| D::Error::custom(format!("unknown label {l}")))?;
            coords[i] += c;
        }
        Ok(RingElt { ty: r.ty, coords })
    }
}

static RINGS: OnceLock<Mutex<HashMap<FoldingType, Arc<RingData>>>> = OnceLock::new();

/// Cached ring data for a folding type.
pub fn ring_data(ty: FoldingType) -> Result<Arc<RingData>, RingError> {
    ty.validate()?;
    let cache = RINGS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&ty) {
        return Ok(r.clone());
    }
    let data = Arc::new(build(ty)?);
    cache.lock().unwrap().entry(ty).or_insert_with(|| data.clone());
    Ok(data)
}

fn build(ty: FoldingType) -> Result<RingData, RingError> {
    match ty {
        FoldingType::A(n) => Ok(build_a(n)),
        FoldingType::D(3) => build_d4(),
        FoldingType::D(n) => Ok(build_d(n)),
        FoldingType::E6 => build_e6(),
        FoldingType::E7 => build_e7(),
        FoldingType::E8 => build_e8(),
    }
}

fn build_a(n: usize) -> RingData {
    let dim = 2 * n - 1;
    let ctx = cyc_context(n).unwrap();
    let reduce = |k: usize| -> Option<(usize, i64)> {
        if k <= 2 * n - 2 {
            Some((k, 1))
        } else if k == 2 * n - 1 {
            None
        } else {
            Some((4 * n - 2 - k, -1))
        }
    };
    let mut mult = vec![vec![vec![0i64; dim]; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let (i, j) = if a >= b { (a, b) } else { (b, a) };
            for l in 0..=j {
                if let Some((k, s)) = reduce(i - j + 2 * l) {
                    mult[a][b][k] += s;
                }
            }
        }
    }
    let labels = (0..dim).map(|i| format!("w{i}")).collect();
    let rho = (0..dim).map(|i| chebyshev_u(&ctx, i as i64)).collect();
    let small: Vec<usize> = (0..dim).step_by(2).collect();
    RingData {
        ty: FoldingType::A(n),
        ctx,
        labels,
        mult,
        rho,
        vertex_basis: (0..dim).map(|i| unit(dim, i)).collect(),
        vertex_names: (0..dim).map(|i| i.to_string()).collect(),
        small_basis: small.iter().map(|&i| unit(dim, i)).collect(),
        small_labels: small.iter().map(|i| format!("w{i}")).collect(),
        s: unit(dim, 1),
        symmetries: vec![unit(dim, 0), unit(dim, 2 * n - 2)],
        weight_scale: 1,
    }
}

fn build_d(n: usize) -> RingData {
    // hat basis w_i^+ at 2i, w_i^- at 2i+1
    let dim = 2 * n;
    let ctx = cyc_context(n).unwrap();
    let idx = |i: usize, minus: bool| 2 * i + minus as usize;
    // same-sign product w_i^+ w_j^+
    let plus_product = |a: usize, b: usize| -> Vec<i64> {
        let (i, j) = if a >= b { (a, b) } else { (b, a) };
        let mut v = vec![0i64; dim];
        for l in 0..=j {
            let k = i - j + 2 * l;
            if k < n - 1 {
                v[idx(k, false)] += 1;
            } else if k == n - 1 {
                let minus = (i + j + 1 - n) % 4 == 2;
                v[idx(k, minus)] += 1;
            } else {
                v[idx(2 * n - 2 - k, true)] += 1;
            }
        }
        v
    };
    let flip = |v: Vec<i64>| -> Vec<i64> {
        let mut out = vec![0i64; dim];
        for i in 0..n {
            out[idx(i, true)] = v[idx(i, false)];
            out[idx(i, false)] = v[idx(i, true)];
        }
        out
    };
    let mut mult = vec![vec![vec![0i64; dim]; dim]; dim];
    for a in 0..dim {
        for b in 0..dim {
            let p = plus_product(a / 2, b / 2);
            mult[a][b] = if (a % 2) ^ (b % 2) == 1 { flip(p) } else { p };
        }
    }
    let mut labels = Vec::new();
    let mut rho = Vec::new();
    for i in 0..n {
        for sgn in ["+", "-"] {
            labels.push(format!("w{i}{sgn}"));
            rho.push(chebyshev_u(&ctx, i as i64));
        }
    }
    let mut vertex_basis = Vec::new();
    let mut vertex_names = Vec::new();
    for i in 0..n - 1 {
        let mut v = vec![0; dim];
        v[idx(i, false)] = 1;
        v[idx(i, true)] = 1;
        vertex_basis.push(v);
        vertex_names.push(i.to_string());
    }
    vertex_basis.push(unit(dim, idx(n - 1, false)));
    vertex_basis.push(unit(dim, idx(n - 1, true)));
    vertex_names.push(format!("{}+", n - 1));
    vertex_names.push(format!("{}-", n - 1));
    let mut small_basis = Vec::new();
    let mut small_labels = Vec::new();
    for i in (0..n).step_by(2) {
        for (m, sgn) in [(false, "+"), (true, "-")] {
            small_basis.push(unit(dim, idx(i, m)));
            small_labels.push(format!("w{i}{sgn}"));
        }
    }
    RingData {
        ty: FoldingType::D(n),
        ctx,
        labels,
        mult,
        rho,
        vertex_basis,
        vertex_names,
        small_basis,
        small_labels,
        s: unit(dim, idx(1, false)),
        symmetries: vec![unit(dim, 0), unit(dim, 1)],
        weight_scale: 1,
    }
}

// ---------------------------------------------------------------------------
// Rings given by generators and relations.

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(x: i64) -> u64 {
    x.rem_euclid(P as i64) as u64
}

fn lift(x: u64) -> i64 {
    if x > P / 2 {
        -((P - x) as i64)
    } else {
        x as i64
    }
}

type Mono = Vec<u8>;
type Poly = Vec<(Mono, i64)>;

/// Parses `w2^2 - 1 - 2*w2*u2` over the generator names `gens`.
fn parse_poly(gens: &[&str], s: &str) -> Poly {
    let mut out: Poly = Vec::new();
    let normalized = s.replace('-', " - ").replace('+', " + ");
    let mut sign = 1i64;
    for tok in normalized.split_whitespace() {
        match tok {
            "+" => sign = 1,
            "-" => sign = -1,
            t => {
                let mut coef = sign;
                let mut mono = vec![0u8; gens.len()];
                for f in t.split('*') {
                    let (name, e) = match f.split_once('^') {
                        Some((a, b)) => (a, b.parse::<u8>().expect("exponent")),
                        None => (f, 1),
                    };
                    if let Ok(k) = name.parse::<i64>() {
                        coef *= k;
                    } else {
                        let g = gens.iter().position(|x| *x == name).unwrap_or_else(|| panic!("generator {name}"));
                        mono[g] += e;
                    }
                }
                out.push((mono, coef));
                sign = 1;
            }
        }
    }
    out
}

fn deg(m: &Mono) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

fn monomials(nvars: usize, max_deg: usize) -> Vec<Mono> {
    fn rec(v: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>) {
        if v == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[v] = e as u8;
            rec(v + 1, left - e, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    rec(0, max_deg, &mut vec![0u8; nvars], &mut out);
    out
}

struct Reducer {
    index: HashMap<Mono, usize>,
    /// echelon rows keyed by pivot column, pivot entry normalized to 1
    rows: Vec<Option<Vec<u64>>>,
}

impl Reducer {
    fn new(nvars: usize, max_deg: usize, relations: &[Poly]) -> Self {
        let mut monos = monomials(nvars, max_deg);
        // high degree first so normal forms live in low degree
        monos.sort_by(|a, b| deg(b).cmp(&deg(a)).then(b.cmp(a)));
        let index: HashMap<Mono, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let ncols = monos.len();
        let mut red = Reducer { index, rows: vec![None; ncols] };
        for r in relations {
            let rd = r.iter().map(|(m, _)| deg(m)).max().unwrap_or(0);
            for m in monos.iter().filter(|m| deg(m) + rd <= max_deg) {
                let mut v = vec![0u64; ncols];
                for (rm, c) in r {
                    let prod: Mono = rm.iter().zip(m).map(|(a, b)| a + b).collect();
                    let j = red.index[&prod];
                    v[j] = (v[j] + to_mod(*c)) % P;
                }
                red.insert(v);
            }
        }
        red
    }

    fn reduce(&self, v: &mut [u64]) {
        for j in 0..v.len() {
            if v[j] == 0 {
                continue;
            }
            if let Some(row) = &self.rows[j] {
                let f = v[j];
                for (k, &r) in row.iter().enumerate().skip(j) {
                    if r != 0 {
                        v[k] = (v[k] + P - mulmod(f, r)) % P;
                    }
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec<u64>) {
        self.reduce(&mut v);
        if let Some(p) = v.iter().position(|&x| x != 0) {
            let inv = powmod(v[p], P - 2);
            for x in v.iter_mut() {
                *x = mulmod(*x, inv);
            }
            self.rows[p] = Some(v);
        }
    }

    fn normal_form(&self, poly: &Poly) -> Option<Vec<u64>> {
        let mut v = vec![0u64; self.rows.len()];
        for (m, c) in poly {
            let j = *self.index.get(m)?;
            v[j] = (v[j] + to_mod(*c)) % P;
        }
        self.reduce(&mut v);
        Some(v)
    }
}

/// Solves target = sum c_e basis_e modulo P.
fn solve_mod(basis: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    let k = basis.len();
    let n = target.len();
    // columns: basis vectors, augmented with target
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut r: Vec<u64> = basis.iter().map(|b| b[i]).collect();
            r.push(target[i]);
            r
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut pivot_rows = Vec::new();
    let mut r0 = 0;
    for c in 0..k {
        let p = (r0..rows.len()).find(|&r| rows[r][c] != 0)?;
        rows.swap(r0, p);
        let inv = powmod(rows[r0][c], P - 2);
        for x in rows[r0].iter_mut() {
            *x = mulmod(*x, inv);
        }
        for r in 0..rows.len() {
            if r != r0 && rows[r][c] != 0 {
                let f = rows[r][c];
                let pr = rows[r0].clone();
                for (x, y) in rows[r].iter_mut().zip(pr) {
                    *x = (*x + P - mulmod(f, y)) % P;
                }
            }
        }
        pivot_rows.push(r0);
        r0 += 1;
    }
    if rows[r0..].iter().any(|r| r[k] != 0) {
        return None;
    }
    Some(pivot_rows.iter().map(|&r| rows[r][k]).collect())
}

/// A commutative ring presented by generators, relations and a monomial basis.
pub struct Presentation<'a> {
    pub gens: &'a [&'a str],
    pub relations: &'a [&'a str],
    pub basis: &'a [&'a str],
}

/// Multiplication table of a presented ring in the given monomial basis.
///
/// Structure constants are found modulo a large prime on a degree-truncated
/// ideal, lifted to integers and then checked exactly: the table must be
/// unital, commutative and associative, and every relation must vanish.
pub fn derive_table(p: &Presentation) -> Result<Vec<Vec<Vec<i64>>>, RingError> {
    let rels: Vec<Poly> = p.relations.iter().map(|r| parse_poly(p.gens, r)).collect();
    let basis: Vec<Poly> = p.basis.iter().map(|b| parse_poly(p.gens, b)).collect();
    let basis_deg = basis.iter().flat_map(|b| b.iter().map(|(m, _)| deg(m))).max().unwrap_or(0);
    let dim = basis.len();
    let mut last_err = String::new();
    for max_deg in (2 * basis_deg).max(2)..=2 * basis_deg + 3 {
        let red = Reducer::new(p.gens.len(), max_deg, &rels);
        let bnf: Vec<Vec<u64>> = basis.iter().map(|b| red.normal_form(b).unwrap()).collect();
        let mut table = vec![vec![vec![0i64; dim]; dim]; dim];
        let mut ok = true;
        'outer: for a in 0..dim {
            for b in 0..dim {
                let prod: Poly = basis[a]
                    .iter()
                    .flat_map(|(m1, c1)| {
                        basis[b].iter().map(move |(m2, c2)| (m1.iter().zip(m2).map(|(x, y)| x + y).collect(), c1 * c2))
                    })
                    .collect();
                let nf = red.normal_form(&prod).unwrap();
                match solve_mod(&bnf, &nf) {
                    Some(c) => table[a][b] = c.into_iter().map(lift).collect(),
                    None => {
                        last_err = format!("{} * {} not in the span at degree {max_deg}", p.basis[a], p.basis[b]);
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            verify_table(p, &rels, &table)?;
            return Ok(table);
        }
    }
    Err(RingError::Presentation(last_err))
}

fn table_mul(t: &[Vec<Vec<i64>>], a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            if b[j] == 0 {
                continue;
            }
            for k in 0..n {
                out[k] += a[i] * b[j] * t[i][j][k];
            }
        }
    }
    out
}

fn verify_table(p: &Presentation, rels: &[Poly], t: &[Vec<Vec<i64>>]) -> Result<(), RingError> {
    let n = t.len();
    let err = |s: &str| Err(RingError::Presentation(s.to_string()));
    for a in 0..n {
        if t[0][a] != unit(n, a) {
            return err("basis element 0 is not a unit");
        }
        for b in 0..n {
            if t[a][b] != t[b][a] {
                return err("table is not commutative");
            }
            for c in 0..n {
                let l = table_mul(t, &t[a][b], &unit(n, c));
                let r = table_mul(t, &unit(n, a), &t[b][c]);
                if l != r {
                    return err("table is not associative");
                }
            }
        }
    }
    // generators must be basis elements so that relations can be evaluated
    let gen_coords: Vec<Vec<i64>> = p
        .gens
        .iter()
        .map(|g| p.basis.iter().position(|b| b == g).map(|i| unit(n, i)))
        .collect::<Option<_>>()
        .ok_or_else(|| RingError::Presentation("generator outside the basis".into()))?;
    let eval = |poly: &Poly| -> Vec<i64> {
        let mut acc = vec![0i64; n];
        for (m, c) in poly {
            let mut v = unit(n, 0);
            for (g, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    v = table_mul(t, &v, &gen_coords[g]);
                }
            }
            for k in 0..n {
                acc[k] += c * v[k];
            }
        }
        acc
    };
    for r in rels {
        if eval(r).iter().any(|&x| x != 0) {
            return err("a relation does not vanish");
        }
    }
    for (i, b) in p.basis.iter().enumerate() {
        if eval(&parse_poly(p.gens, b)) != unit(n, i) {
            return err("basis monomial does not evaluate to its basis vector");
        }
    }
    Ok(())
}

/// Generators, relations and monomial basis of the presented hat rings.
pub fn presentation(ty: FoldingType) -> Option<Presentation<'static>> {
    match ty {
        FoldingType::D(3) => Some(Presentation {
            gens: &["w1", "g"],
            relations: &["g^3 - 1", "g*w1 - w1", "w1^2 - 1 - g - g^2"],
            basis: &["1", "w1", "g", "g^2"],
        }),
        FoldingType::E6 => Some(Presentation {
            gens: &["a", "w1p", "w1m", "w2", "wv"],
            relations: &[
                "a^2 - 1",
                "w2^2 - 1 - 2*w2 - a",
                "a*w2 - w2",
                "a*w1p - w1m",
                "w1p^2 - 1 - w2",
                "w1p*w2 - w1p - w1m - wv",
                "w1p*wv - w2",
            ],
            basis: &["1", "a", "w1p", "w1m", "w2", "wv"],
        }),
        FoldingType::E7 => Some(Presentation {
            gens: &E7_GENS,
            relations: &E7_RELATIONS,
            basis: &["1", "w1", "u1", "w2", "u2", "w3", "wv"],
        }),
        FoldingType::E8 => Some(Presentation {
            gens: &["f", "w1", "w2", "wv"],
            relations: &[
                "f^2 - f - 1",
                "w2^2 - f*w2 - w2 - 1",
                "w1^2 - 1 - w2",
                "w1*w2 - w1 - f*wv",
                "w1*wv - f*w2",
            ],
            basis: &["1", "f", "w1", "f*w1", "w2", "f*w2", "wv", "f*wv"],
        }),
        _ => None,
    }
}

/// Exact structural checks of a ring table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingIntegrity {
    pub unital: bool,
    pub commutative: bool,
    pub associative: bool,
    /// defining relations vanish; in type A the Chebyshev recursion
    /// ω1·ωi = ωi-1 + ωi+1, in type D positivity of the action of s
    pub relations: bool,
    pub rho_multiplicative: bool,
    /// products of small basis elements are non-negative combinations
    pub positive_closure: bool,
}

impl RingIntegrity {
    /// Whether everything expected for this type holds; positivity is not
    /// expected in type E7.
    pub fn passed(&self, ty: FoldingType) -> bool {
        self.unital
            && self.commutative
            && self.associative
            && self.relations
            && self.rho_multiplicative
            && (self.positive_closure || ty == FoldingType::E7)
    }
}

impl RingData {
    pub fn integrity(&self) -> RingIntegrity {
        let n = self.dim();
        let mut out = RingIntegrity {
            unital: true,
            commutative: true,
            associative: true,
            relations: true,
            rho_multiplicative: true,
            positive_closure: true,
        };
        for a in 0..n {
            out.unital &= self.mult[0][a] == unit(n, a);
            for b in 0..n {
                out.commutative &= self.mult[a][b] == self.mult[b][a];
                out.rho_multiplicative &= self.rho_coords(&self.mult[a][b]) == &self.rho[a] * &self.rho[b];
                for c in 0..n {
                    let l = self.mul_coords(&self.mult[a][b], &unit(n, c));
                    let r = self.mul_coords(&unit(n, a), &self.mult[b][c]);
                    out.associative &= l == r;
                }
            }
        }
        out.relations = match (presentation(self.ty), self.ty) {
            (Some(p), _) => {
                let rels: Vec<Poly> = p.relations.iter().map(|r| parse_poly(p.gens, r)).collect();
                verify_table(&p, &rels, &self.mult).is_ok()
            }
            (None, FoldingType::A(_)) => (0..n).all(|i| {
                let mut want = vec![0i64; n];
                if i > 0 {
                    want[i - 1] += 1;
                }
                if i + 1 < n {
                    want[i + 1] += 1;
                }
                self.mul_coords(&unit(n, 1), &unit(n, i)) == want
            }),
            (None, _) => self.vertex_rep(&self.s).to_rows().concat().iter().all(|&x| x >= 0),
        };
        for a in &self.small_basis {
            for b in &self.small_basis {
                out.positive_closure &=
                    self.small_coords(&self.mul_coords(a, b)).is_some_and(|c| c.iter().all(|&x| x >= 0));
            }
        }
        out
    }
}

fn presented(
    ty: FoldingType,
    pres: Presentation,
    labels: &[&str],
    vertex_names: &[&str],
    rho: Vec<RealCycNumber>,
    small: &[(&str, Vec<usize>)],
    s: usize,
    symmetries: &[usize],
    weight_scale: i64,
) -> Result<RingData, RingError> {
    let mult = derive_table(&pres)?;
    let dim = labels.len();
    let mut data = RingData {
        ty,
        ctx: cyc_context(ty.half_order()).unwrap(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
        mult,
        rho,
        vertex_basis: (0..dim).map(|i| unit(dim, i)).collect(),
        vertex_names: vertex_names.iter().map(|s| s.to_string()).collect(),
        small_basis: Vec::new(),
        small_labels: small.iter().map(|(l, _)| l.to_string()).collect(),
        s: unit(dim, s),
        symmetries: symmetries.iter().map(|&i| unit(dim, i)).collect(),
        weight_scale,
    };
    // small basis elements are products of hat basis elements
    data.small_basis = small
        .iter()
        .map(|(_, f)| f.iter().fold(unit(dim, 0), |acc, &i| data.mul_coords(&acc, &unit(dim, i))))
        .collect();
    Ok(data)
}

fn build_d4() -> Result<RingData, RingError> {
    let ctx = cyc_context(3).unwrap();
    let one = RealCycNumber::from_int(&ctx, 1);
    presented(
        FoldingType::D(3),
        presentation(FoldingType::D(3)).expect("presented"),
        &["1", "w1", "g", "g2"],
        &["0", "1", "2+", "2-"],
        vec![one.clone(), RealCycNumber::theta(&ctx), one.clone(), one],
        &[("1", vec![]), ("g", vec![2]), ("g2", vec![3])],
        1,
        &[0, 2, 3],
        2,
    )
}

fn build_e6() -> Result<RingData, RingError> {
    let ctx = cyc_context(6).unwrap();
    let u = |i| chebyshev_u(&ctx, i);
    presented(
        FoldingType::E6,
        presentation(FoldingType::E6).expect("presented"),
        &["w0+", "w0-", "w1+", "w1-", "w2", "wv6"],
        &["0+", "0-", "1+", "1-", "2", "v6"],
        vec![u(0), u(0), u(1), u(1), u(2), two_cos(&ctx, 3)],
        &[("1", vec![]), ("w0-", vec![1]), ("w2", vec![4])],
        2,
        &[0, 1],
        1,
    )
}

/// Relations of the E7 hat ring. The last one, ω1·ω̃1 = ω3, cuts the ring
/// down from rank 8 to the rank 7 of the vertex basis.
pub const E7_RELATIONS: [&str; 7] = [
    "w2^2 - 1 - w2*u2",
    "u2^2 - 1 - u2 - w2",
    "w1^2 - 1 - w2",
    "u1 - w2*u2 + w2 + u2",
    "w1*w2 - w3 - w1",
    "w1*u2 - w3 - wv",
    "w1*u1 - w3",
];

pub const E7_GENS: [&str; 6] = ["w1", "u1", "w2", "u2", "w3", "wv"];

fn build_e7() -> Result<RingData, RingError> {
    let ctx = cyc_context(9).unwrap();
    let u = |i| chebyshev_u(&ctx, i);
    let t = two_cos(&ctx, 2);
    let ut = |i| chebyshev_u_at(&t, i);
    presented(
        FoldingType::E7,
        presentation(FoldingType::E7).expect("presented"),
        &["w0", "w1", "w~1", "w2", "w~2", "w3", "wv7"],
        &["0", "1", "1~", "2", "2~", "3", "v7"],
        vec![u(0), u(1), ut(1), u(2), ut(2), u(3), two_cos(&ctx, 5)],
        &[("1", vec![]), ("w2", vec![3]), ("w~2", vec![4]), ("w2.w~2", vec![3, 4])],
        1,
        &[0],
        1,
    )
}

fn build_e8() -> Result<RingData, RingError> {
    let ctx = cyc_context(15).unwrap();
    let u = |i| chebyshev_u(&ctx, i);
    let phi = two_cos(&ctx, 6);
    let phi_inv = two_cos(&ctx, 12);
    let wv = &phi_inv * &u(3);
    presented(
        FoldingType::E8,
        presentation(FoldingType::E8).expect("presented"),
        &["1", "phi", "w1", "phi.w1", "w2", "phi.w2", "wv8", "phi.wv8"],
        &["0", "phi0", "1", "phi1", "2", "4", "v8", "3"],
        vec![u(0), phi.clone(), u(1), &phi * &u(1), u(2), &phi * &u(2), wv.clone(), &phi * &wv],
        &[("1", vec![]), ("phi", vec![1]), ("w2", vec![4]), ("phi.w2", vec![5])],
        2,
        &[0],
        1,
    )
}

/// Vertex basis element attached to a quiver vertex, as a ring element.
pub fn vertex_label(ty: FoldingType, v: usize) -> Result<RingElt, RingError> {
    let d = ring_data(ty)?;
    Ok(RingElt { ty, coords: d.vertex_basis[v].clone() })
}

/// Solves target = sum x_l basis_l over Z (kernel included).
pub fn solve_in_basis(basis: &[Vec<i64>], target: &[i64]) -> Option<crate::intlin::IntSolution> {
    solve_integer(basis, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_types() -> Vec<FoldingType> {
        FoldingType::catalogue()
    }

    #[test]
    fn parse_and_display_types() {
        for t in all_types() {
            assert_eq!(t.to_string().parse::<FoldingType>().unwrap(), t);
        }
        assert_eq!("A7".parse::<FoldingType>().unwrap(), FoldingType::A(4));
        assert_eq!("D5".parse::<FoldingType>().unwrap(), FoldingType::D(4));
        assert!("A6".parse::<FoldingType>().is_err());
        assert!("D3".parse::<FoldingType>().is_err());
        assert!("E9".parse::<FoldingType>().is_err());
    }

    #[test]
    fn integrity_reports_pass() {
        for t in all_types() {
            let r = ring_data(t).unwrap().integrity();
            assert!(r.passed(t), "{t}: {r:?}");
        }
    }

    #[test]
    fn tables_are_commutative_associative_unital() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            let n = d.dim();
            for a in 0..n {
                assert_eq!(d.mult[0][a], unit(n, a), "{t}");
                for b in 0..n {
                    assert_eq!(d.mult[a][b], d.mult[b][a], "{t}");
                    for c in 0..n {
                        let l = d.mul_coords(&d.mult[a][b], &unit(n, c));
                        let r = d.mul_coords(&unit(n, a), &d.mult[b][c]);
                        assert_eq!(l, r, "{t}: ({a} {b}) {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn rho_is_a_ring_homomorphism() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            for a in 0..d.dim() {
                for b in 0..d.dim() {
                    assert_eq!(
                        d.rho_coords(&d.mult[a][b]),
                        &d.rho[a] * &d.rho[b],
                        "{t}: {} {}",
                        d.labels[a],
                        d.labels[b]
                    );
                }
            }
        }
    }

    #[test]
    fn rho_is_positive_on_basis() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            assert!(d.rho.iter().all(|r| r.sign() > 0), "{t}");
        }
    }

    #[test]
    fn small_basis_is_closed_and_positive() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            for a in &d.small_basis {
                for b in &d.small_basis {
                    let c = d.small_coords(&d.mul_coords(a, b)).expect("R is closed");
                    assert!(c.iter().all(|&x| x >= 0), "{t}");
                }
            }
        }
    }

    #[test]
    fn s_acts_as_adjacency() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            let adj = d.adjacency();
            let n = adj.rows();
            let mut edges = 0;
            for i in 0..n {
                assert_eq!(*adj.get(i, i), 0);
                for j in 0..n {
                    assert!(matches!(*adj.get(i, j), 0 | 1), "{t}");
                    assert_eq!(adj.get(i, j), adj.get(j, i));
                    edges += adj.get(i, j);
                }
            }
            // a tree on rank(t) vertices
            assert_eq!(edges as usize, 2 * (n - 1), "{t}");
            assert_eq!(n, t.rank());
        }
    }

    #[test]
    fn vertex_rep_is_a_representation() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            for a in 0..d.dim() {
                for b in 0..d.dim() {
                    let lhs = d.vertex_rep(&d.mult[a][b]);
                    let rhs = d.vertex_rep(&unit(d.dim(), a)).mul(&d.vertex_rep(&unit(d.dim(), b)));
                    assert_eq!(lhs, rhs, "{t}");
                }
            }
        }
    }

    #[test]
    fn symmetries_permute_vertices() {
        for t in all_types() {
            let d = ring_data(t).unwrap();
            let adj = d.adjacency();
            for g in &d.symmetries {
                let m = d.vertex_rep(g);
                assert!((0..m.cols()).all(|j| m.col(j).iter().filter(|&&x| x == 1).count() == 1));
                assert_eq!(m.mul(&adj), adj.mul(&m), "{t}");
            }
        }
    }

    #[test]
    fn a7_examples() {
        let t = FoldingType::A(4);
        let w = |l: &str| RingElt::basis(t, l).unwrap();
        assert_eq!(w("w2").mul(&w("w2")).unwrap(), RingElt::parse(t, "1 + w2 + w4").unwrap());
        assert_eq!(w("w5").mul(&w("w6")).unwrap(), w("w1"));
        assert_eq!(w("w6").mul(&w("w6")).unwrap(), w("w0"));
        assert!(w("w2").is_semiring_member());
        assert!(!w("w1").is_semiring_member());
        assert!(!RingElt::parse(t, "1 - w2").unwrap().is_semiring_member());
    }

    #[test]
    fn d5_fork_products() {
        let t = FoldingType::D(4);
        let e = |l: &str| RingElt::basis(t, l).unwrap();
        assert_eq!(e("w1+").mul(&e("w2+")).unwrap(), RingElt::parse(t, "w1+ + w3+").unwrap());
        assert_eq!(e("w1+").mul(&e("w3+")).unwrap(), RingElt::parse(t, "w2+ + w2-").unwrap());
        assert_eq!(e("w0-").mul(&e("w0-")).unwrap(), e("1"));
    }

    #[test]
    fn e7_printed_representations() {
        let d = ring_data(FoldingType::E7).unwrap();
        // order 1, w~1, w~2, w2, w1, w3, wv7
        let order = [0usize, 2, 4, 3, 1, 5, 6];
        let rep = |l: &str| {
            let m = d.full_regular_rep(&unit(7, d.label_index(l).unwrap()));
            m.submatrix(&order, &order)
        };
        let expected_u1 = IntMatrix::from_rows(vec![
            vec![0, 1, 0, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 1, 0, 0, 0],
            vec![0, 0, 1, 1, 0, 0, 0],
            vec![0, 0, 0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 1, 1, 1],
            vec![0, 0, 0, 0, 0, 1, -1],
        ]);
        assert_eq!(rep("w~1"), expected_u1);
    }

    #[test]
    fn e7_needs_the_extra_relation() {
        let relations: Vec<&str> = E7_RELATIONS[..6].to_vec();
        let p = Presentation {
            gens: &E7_GENS,
            relations: &relations,
            basis: &["1", "w1", "u1", "w2", "u2", "w3", "wv"],
        };
        assert!(derive_table(&p).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = RingElt::parse(FoldingType::E8, "2*phi.w2 - wv8").unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"type\":\"E8\""));
        assert_eq!(serde_json::from_str::<RingElt>(&s).unwrap(), x);
    }

    proptest! {
        #[test]
        fn semiring_partial_order(a in prop::collection::vec(0i64..3, 4), b in prop::collection::vec(0i64..3, 4)) {
            let t = FoldingType::A(4);
            let mk = |v: &Vec<i64>| RingElt::new(t, vec![v[0], 0, v[1], 0, v[2], 0, v[3]]);
            let (x, y) = (mk(&a), mk(&b));
            let s = x.add(&y).unwrap();
            prop_assert!(x.partial_cmp_semiring(&s).map_or(false, |o| o.is_le()));
            prop_assert!(x.mul(&y).unwrap().is_semiring_member());
            prop_assert!(x.mul(&y).unwrap().rho() == &x.rho() * &y.rho());
        }
    }
}
