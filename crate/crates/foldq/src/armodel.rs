//! Auslander-Reiten quivers of the unfolding quivers and their dimension
//! projections onto the plane of I2(2n).
//!
//! Representations are covariant and an indecomposable is addressed by
//! `(vertex i, m, shift k)`, standing for Σ^k τ^m I(i) with 0 <= m <= n-1.
//! Each τ-orbit ("row") of modules has exactly n members and ends in the
//! projective τ^{n-1} I(i) = P(σ(i)).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algnum::{chebyshev_u, RealCycNumber};
use crate::chebrings::{FoldingType, RingError};
use crate::quiver::{build_folding, Folding, QuiverError};
use crate::scalar::Matrix;
use crate::{Cyc, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArError {
    #[error("{0} is projective; τ is undefined in the module category")]
    ProjectiveTau(String),
    #[error("{0} is injective; τ^-1 is undefined in the module category")]
    InjectiveTauInv(String),
    #[error("object {0} does not belong to this category")]
    NotInCategory(String),
    #[error("malformed object {0}")]
    Parse(String),
    #[error("operation not available on the {0:?} layer")]
    Unsupported(Layer),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Module,
    Derived,
    Cluster,
}

/// Indecomposable object Σ^shift τ^m I(vertex).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Indec {
    pub layer: Layer,
    pub vertex: usize,
    pub m: usize,
    pub shift: i64,
}

impl Indec {
    pub fn module(vertex: usize, m: usize) -> Self {
        Indec { layer: Layer::Module, vertex, m, shift: 0 }
    }

    pub fn with_layer(self, layer: Layer) -> Self {
        Indec { layer, ..self }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub objects: usize,
    pub off_root: Vec<String>,
    pub bijection_failures: Vec<String>,
    pub length_failures: Vec<String>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.off_root.is_empty() && self.bijection_failures.is_empty() && self.length_failures.is_empty()
    }
}

/// A point of the plane in simple-root coordinates.
pub type ProjVector = (Cyc, Cyc);

#[derive(Clone, Debug)]
pub struct ArModel {
    pub folding: Folding,
    /// columns are dimension vectors of the projectives
    pub pmat: IntMatrix,
    pub coxeter: IntMatrix,
    /// τ^{n-1} I(i) = P(sigma[i])
    pub sigma: Vec<usize>,
    /// dims[i][m] = dimension vector of τ^m I(i)
    pub dims: Vec<Vec<Vec<i64>>>,
    /// arrows i -> j of the quiver
    pub arrows: Vec<(usize, usize)>,
}

fn add(a: &Cyc, b: &Cyc) -> Cyc {
    a + b
}

impl ArModel {
    pub fn new(ty: FoldingType) -> Result<Self, ArError> {
        Self::from_folding(build_folding(ty)?)
    }

    pub fn from_folding(folding: Folding) -> Result<Self, ArError> {
        let nv = folding.len();
        let n = folding.n();
        let b = &folding.b;
        let arrows: Vec<(usize, usize)> = (0..nv)
            .flat_map(|i| (0..nv).map(move |j| (i, j)))
            .filter(|&(i, j)| *b.get(i, j) > 0)
            .collect();
        let pmat = paths_matrix(nv, &arrows);
        let pinv = pmat.unimodular_inverse().expect("path matrix is unitriangular");
        let coxeter = pmat.transpose().mul(&pinv).neg();
        let mut dims = Vec::with_capacity(nv);
        let mut sigma = vec![usize::MAX; nv];
        for i in 0..nv {
            let mut d = pmat.row(i);
            let mut row = Vec::with_capacity(n);
            for m in 0..n {
                assert!(d.iter().all(|&x| x >= 0) && d.iter().any(|&x| x > 0), "row {i} breaks at m = {m}");
                row.push(d.clone());
                if m + 1 < n {
                    d = coxeter.mul_vec(&d);
                }
            }
            sigma[i] = (0..nv).find(|&j| pmat.col(j) == row[n - 1]).expect("row ends at a projective");
            dims.push(row);
        }
        Ok(ArModel { folding, pmat, coxeter, sigma, dims, arrows })
    }

    pub fn ty(&self) -> FoldingType {
        self.folding.ty
    }

    pub fn n(&self) -> usize {
        self.folding.n()
    }

    pub fn nv(&self) -> usize {
        self.folding.len()
    }

    pub fn image(&self, v: usize) -> usize {
        self.folding.image[v]
    }

    /// Row (injective vertex) containing P(j).
    pub fn row_of_projective(&self, j: usize) -> usize {
        self.sigma.iter().position(|&s| s == j).expect("σ is a bijection")
    }

    pub fn injective(&self, i: usize) -> Indec {
        Indec::module(i, 0)
    }

    pub fn projective(&self, j: usize) -> Indec {
        Indec::module(self.row_of_projective(j), self.n() - 1)
    }

    pub fn shifted_projective(&self, j: usize) -> Indec {
        Indec { layer: Layer::Cluster, vertex: self.row_of_projective(j), m: self.n() - 1, shift: 1 }
    }

    pub fn simple(&self, v: usize) -> Indec {
        if self.image(v) == 0 {
            self.injective(v)
        } else {
            self.projective(v)
        }
    }

    pub fn contains(&self, x: &Indec) -> bool {
        if x.vertex >= self.nv() || x.m >= self.n() {
            return false;
        }
        match x.layer {
            Layer::Module => x.shift == 0,
            Layer::Derived => true,
            Layer::Cluster => x.shift == 0 || (x.shift == 1 && x.m == self.n() - 1),
        }
    }

    fn check(&self, x: &Indec) -> Result<(), ArError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(ArError::NotInCategory(format!("{x:?}")))
        }
    }

    pub fn is_projective(&self, x: &Indec) -> bool {
        x.shift == 0 && x.m == self.n() - 1
    }

    pub fn is_injective(&self, x: &Indec) -> bool {
        x.shift == 0 && x.m == 0
    }

    /// Module objects, row by row.
    pub fn modules(&self) -> Vec<Indec> {
        (0..self.nv()).flat_map(|i| (0..self.n()).map(move |m| Indec::module(i, m))).collect()
    }

    /// Objects of a layer; the derived layer is listed for shifts in `0..=1`.
    pub fn enumerate(&self, layer: Layer) -> Vec<Indec> {
        let base: Vec<Indec> = self.modules().into_iter().map(|x| x.with_layer(layer)).collect();
        match layer {
            Layer::Module => base,
            Layer::Cluster => {
                let mut v = base;
                v.extend((0..self.nv()).map(|i| Indec { layer, vertex: i, m: self.n() - 1, shift: 1 }));
                v
            }
            Layer::Derived => {
                let mut v = base.clone();
                v.extend(base.iter().map(|x| Indec { shift: 1, ..*x }));
                v
            }
        }
    }

    pub fn dim_vector(&self, x: &Indec) -> Result<Vec<i64>, ArError> {
        self.check(x)?;
        Ok(self.dims[x.vertex][x.m].clone())
    }

    /// Column index: 2m + F(i) for modules, shifted by -2n per suspension in
    /// the derived layer and read modulo 2n+2 in the cluster layer.
    pub fn column(&self, x: &Indec) -> i64 {
        let n = self.n() as i64;
        let c = 2 * x.m as i64 + self.image(x.vertex) as i64;
        match x.layer {
            Layer::Module => c,
            Layer::Derived => c - 2 * n * x.shift,
            Layer::Cluster => {
                if x.shift == 1 {
                    2 * n + self.image(x.vertex) as i64
                } else {
                    c
                }
            }
        }
    }

    /// Number of columns of the layer (the derived layer has none).
    pub fn column_count(&self, layer: Layer) -> usize {
        match layer {
            Layer::Module => 2 * self.n(),
            Layer::Cluster => 2 * self.n() + 2,
            Layer::Derived => 0,
        }
    }

    pub fn column_members(&self, layer: Layer, c: i64) -> Vec<Indec> {
        self.enumerate(layer).into_iter().filter(|x| self.column(x) == c).collect()
    }

    pub fn tau(&self, x: &Indec) -> Result<Indec, ArError> {
        self.check(x)?;
        let n = self.n();
        let last = x.m == n - 1;
        match x.layer {
            Layer::Module if last => Err(ArError::ProjectiveTau(self.name(x))),
            Layer::Derived if last => {
                Ok(Indec { vertex: self.sigma[x.vertex], m: 0, shift: x.shift - 1, ..*x })
            }
            Layer::Cluster if last && x.shift == 0 => Ok(Indec { shift: 1, ..*x }),
            Layer::Cluster if last => Ok(Indec { vertex: self.sigma[x.vertex], m: 0, shift: 0, ..*x }),
            _ => Ok(Indec { m: x.m + 1, ..*x }),
        }
    }

    pub fn tau_inv(&self, x: &Indec) -> Result<Indec, ArError> {
        self.check(x)?;
        let n = self.n();
        if x.m > 0 && !(x.layer == Layer::Cluster && x.shift == 1) {
            return Ok(Indec { m: x.m - 1, ..*x });
        }
        match x.layer {
            Layer::Module => Err(ArError::InjectiveTauInv(self.name(x))),
            Layer::Derived => {
                let i = self.sigma.iter().position(|&s| s == x.vertex).unwrap();
                Ok(Indec { vertex: i, m: n - 1, shift: x.shift + 1, ..*x })
            }
            Layer::Cluster if x.shift == 1 => Ok(Indec { shift: 0, ..*x }),
            Layer::Cluster => {
                let i = self.sigma.iter().position(|&s| s == x.vertex).unwrap();
                Ok(Indec { vertex: i, m: n - 1, shift: 1, ..*x })
            }
        }
    }

    /// ε_i = w(i) / μ_{F(i)}: the scale of the row through I(i).
    pub fn row_weight(&self, i: usize) -> Cyc {
        &self.folding.weights[i] / &self.folding.valuation[self.image(i)]
    }

    /// Positive root attached to column c (any integer c).
    pub fn root(&self, c: i64) -> ProjVector {
        let ctx = &self.folding.ctx;
        let t = RealCycNumber::theta(ctx);
        let m = c.div_euclid(2);
        if c.rem_euclid(2) == 0 {
            (chebyshev_u(ctx, 2 * m), &chebyshev_u(ctx, 2 * m - 1) / &t)
        } else {
            (&t * &chebyshev_u(ctx, 2 * m + 1), chebyshev_u(ctx, 2 * m))
        }
    }

    /// The 2n positive roots of I2(2n), in column order.
    pub fn positive_roots(&self) -> Vec<ProjVector> {
        (0..2 * self.n() as i64).map(|c| self.root(c)).collect()
    }

    /// Weighted projection of a dimension vector onto simple-root coordinates.
    pub fn project_dims(&self, d: &[i64]) -> ProjVector {
        let ctx = &self.folding.ctx;
        let mut s = [RealCycNumber::from_int(ctx, 0), RealCycNumber::from_int(ctx, 0)];
        for (v, &x) in d.iter().enumerate() {
            if x != 0 {
                let f = self.image(v);
                s[f] = add(&s[f], &(&self.folding.weights[v] * &RealCycNumber::from_int(ctx, x)));
            }
        }
        let [a, b] = s;
        (&a / &self.folding.valuation[0], &b / &self.folding.valuation[1])
    }

    /// Dimension projection; suspensions contribute a sign (-1)^k.
    pub fn dimproj(&self, x: &Indec) -> Result<ProjVector, ArError> {
        let (a, b) = self.project_dims(&self.dim_vector(x)?);
        if x.shift.rem_euclid(2) == 1 {
            Ok((-a, -b))
        } else {
            Ok((a, b))
        }
    }

    /// Squared Euclidean length in the plane where the simple roots have
    /// lengths μ0, μ1 and meet at angle (2n-1)π/2n.
    pub fn euclid_len_sq(&self, v: &ProjVector) -> Cyc {
        let [m0, m1] = &self.folding.valuation;
        let t = RealCycNumber::theta(&self.folding.ctx);
        let (x, y) = v;
        &(&(&(x * x) * &(m0 * m0)) + &(&(y * y) * &(m1 * m1))) - &(&(&(x * y) * &(m0 * m1)) * &t)
    }

    /// Checks that projections land on ε_i times the root of their column,
    /// that pairs of weight-1 rows of opposite classes biject onto the roots
    /// (positive roots for modules, all roots for the derived layer), and
    /// that |dimproj(τ^m P(j))| = w(j).
    pub fn projection_report(&self, layer: Layer) -> Result<ProjectionReport, ArError> {
        if layer == Layer::Cluster {
            return Err(ArError::Unsupported(layer));
        }
        let mut rep = ProjectionReport::default();
        let objs = self.enumerate(layer);
        for x in &objs {
            rep.objects += 1;
            let (a, b) = self.root(self.column(x));
            let e = self.row_weight(x.vertex);
            if self.dimproj(x)? != (&e * &a, &e * &b) {
                rep.off_root.push(self.name(x));
            }
        }
        let one = RealCycNumber::from_int(&self.folding.ctx, 1);
        let light: Vec<usize> = (0..self.nv()).filter(|&i| self.row_weight(i) == one).collect();
        let mut roots: Vec<String> = self.positive_roots().iter().map(|r| format!("{r:?}")).collect();
        if layer == Layer::Derived {
            roots.extend(self.positive_roots().iter().map(|(a, b)| format!("{:?}", (-a, -b))));
        }
        roots.sort();
        for &i in light.iter().filter(|&&i| self.image(i) == 0) {
            for &j in light.iter().filter(|&&j| self.image(j) == 1) {
                let mut got: Vec<String> = objs
                    .iter()
                    .filter(|x| x.vertex == i || x.vertex == j)
                    .map(|x| self.dimproj(x).map(|p| format!("{p:?}")))
                    .collect::<Result<_, _>>()?;
                got.sort();
                if got != roots {
                    rep.bijection_failures.push(format!("rows {} {}", self.folding.vertices[i], self.folding.vertices[j]));
                }
            }
        }
        if layer == Layer::Module {
            for x in &objs {
                let j = self.sigma[x.vertex];
                let w = &self.folding.weights[j];
                if self.euclid_len_sq(&self.dimproj(x)?) != w * w || self.folding.weights[x.vertex] != *w {
                    rep.length_failures.push(self.name(x));
                }
            }
        }
        Ok(rep)
    }

    /// Euclidean embedding (floating point), used for drawing.
    pub fn embed(&self, v: &ProjVector) -> (f64, f64) {
        let n = self.n() as f64;
        let a = (2.0 * n - 1.0) * std::f64::consts::PI / (2.0 * n);
        let m0 = self.folding.valuation[0].to_f64();
        let m1 = self.folding.valuation[1].to_f64();
        let (x, y) = (v.0.to_f64(), v.1.to_f64());
        (x * m0 + y * m1 * a.cos(), y * m1 * a.sin())
    }

    /// Euler form <a, b> = sum a_i b_i - sum_{i -> j} a_i b_j.
    pub fn euler_form(&self, a: &[i64], b: &[i64]) -> i64 {
        let diag: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        diag - self.arrows.iter().map(|&(i, j)| a[i] * b[j]).sum::<i64>()
    }

    fn module_hom_ext(&self, x: &Indec, y: &Indec) -> (i64, i64) {
        let (a, b) = (&self.dims[x.vertex][x.m], &self.dims[y.vertex][y.m]);
        if x.vertex == y.vertex && x.m == y.m {
            return (1, 0);
        }
        let e = self.euler_form(a, b);
        (e.max(0), (-e).max(0))
    }

    /// dim Hom(X, Y).
    pub fn hom_dim(&self, x: &Indec, y: &Indec) -> Result<i64, ArError> {
        self.check(x)?;
        self.check(y)?;
        match x.layer {
            Layer::Module => Ok(self.module_hom_ext(x, y).0),
            Layer::Derived => Ok(match y.shift - x.shift {
                0 => self.module_hom_ext(x, y).0,
                1 => self.module_hom_ext(x, y).1,
                _ => 0,
            }),
            Layer::Cluster => Err(ArError::Unsupported(Layer::Cluster)),
        }
    }

    /// dim Ext^1(X, Y); symmetric in the cluster layer.
    pub fn ext1_dim(&self, x: &Indec, y: &Indec) -> Result<i64, ArError> {
        self.check(x)?;
        self.check(y)?;
        match x.layer {
            Layer::Module => Ok(self.module_hom_ext(x, y).1),
            Layer::Derived => Ok(match y.shift - x.shift {
                -1 => self.module_hom_ext(x, y).0,
                0 => self.module_hom_ext(x, y).1,
                _ => 0,
            }),
            Layer::Cluster => Ok(match (x.shift, y.shift) {
                (0, 0) => self.module_hom_ext(x, y).1 + self.module_hom_ext(y, x).1,
                (1, 0) => self.dims[y.vertex][y.m][self.sigma[x.vertex]],
                (0, 1) => self.dims[x.vertex][x.m][self.sigma[y.vertex]],
                _ => 0,
            }),
        }
    }

    /// Irreducible morphisms between modules.
    pub fn ar_arrows(&self) -> Vec<(Indec, Indec)> {
        let mut out = Vec::new();
        let n = self.n();
        for &(i, j) in &self.arrows {
            for m in 0..n {
                out.push((Indec::module(j, m), Indec::module(i, m)));
                if m + 1 < n {
                    out.push((Indec::module(i, m + 1), Indec::module(j, m)));
                }
            }
        }
        out.sort();
        out
    }

    /// Finds the module with the given dimension vector.
    pub fn find_by_dims(&self, d: &[i64]) -> Option<Indec> {
        self.modules().into_iter().find(|x| self.dims[x.vertex][x.m] == d)
    }

    /// Readable name: I(i), P(j), τ^m I(i), ΣP(j), Σ^k ...
    pub fn name(&self, x: &Indec) -> String {
        let v = &self.folding.vertices;
        let n = self.n();
        if x.layer == Layer::Cluster && x.shift == 1 {
            return format!("ΣP({})", v[self.sigma[x.vertex]]);
        }
        let core = if x.m == 0 {
            format!("I({})", v[x.vertex])
        } else if x.m == n - 1 {
            format!("P({})", v[self.sigma[x.vertex]])
        } else if x.m == 1 {
            format!("τI({})", v[x.vertex])
        } else {
            format!("τ^{}I({})", x.m, v[x.vertex])
        };
        match x.shift {
            0 => core,
            1 => format!("Σ{core}"),
            k => format!("Σ^{k}{core}"),
        }
    }

    /// Display name of a vertex; type A uses the signed names k+, k-
    /// (vertex k and its mirror 2n-2-k) with n-1 left bare.
    pub fn vertex_label(&self, v: usize) -> String {
        match self.ty() {
            FoldingType::A(n) if v + 1 < n => format!("{v}+"),
            FoldingType::A(n) if v + 1 > n => format!("{}-", 2 * n - 2 - v),
            _ => self.folding.vertices[v].clone(),
        }
    }

    /// Composition-factor notation such as [0 2/1 3+ 3-] (tops over socles).
    pub fn dims_name(&self, x: &Indec) -> String {
        let d = &self.dims[x.vertex][x.m];
        let v: Vec<String> = (0..self.nv()).map(|i| self.vertex_label(i)).collect();
        let part = |f: usize| -> String {
            let mut s = Vec::new();
            for (i, &k) in d.iter().enumerate() {
                if self.image(i) == f {
                    for _ in 0..k {
                        s.push(v[i].clone());
                    }
                }
            }
            s.join(" ")
        };
        let (top, soc) = (part(0), part(1));
        let body = match (top.is_empty(), soc.is_empty()) {
            (false, false) => format!("[{top}/{soc}]"),
            (false, true) => format!("[{top}]"),
            _ => format!("[{soc}]"),
        };
        match (x.layer, x.shift) {
            (_, 0) => body,
            (_, 1) => format!("Σ{body}"),
            (_, k) => format!("Σ^{k}{body}"),
        }
    }

    /// Parses `I(1)`, `I(1),tau=2`, `P(6)`, `SigmaP(6)` (or `ΣP(6)`),
    /// optionally with `,shift=k`.
    pub fn parse_object(&self, s: &str, layer: Layer) -> Result<Indec, ArError> {
        let bad = || ArError::Parse(s.to_string());
        let mut parts = s.split(',').map(str::trim);
        let head = parts.next().ok_or_else(bad)?;
        let (kind, rest) = head.split_once('(').ok_or_else(bad)?;
        let name = rest.strip_suffix(')').ok_or_else(bad)?;
        let v = self.vertex_by_name(name).ok_or_else(bad)?;
        let mut x = match kind {
            "I" => Indec::module(v, 0),
            "P" => self.projective(v),
            "S" => self.simple(v),
            "SigmaP" | "ΣP" => self.shifted_projective(v),
            _ => return Err(bad()),
        };
        for p in parts {
            let (k, val) = p.split_once('=').ok_or_else(bad)?;
            let val: i64 = val.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "tau" | "τ" => {
                    if x.m as i64 + val < 0 || x.m as i64 + val >= self.n() as i64 {
                        return Err(bad());
                    }
                    x.m = (x.m as i64 + val) as usize;
                }
                "shift" => x.shift += val,
                _ => return Err(bad()),
            }
        }
        if x.shift != 0 && layer == Layer::Module {
            return Err(bad());
        }
        let x = Indec { layer: if x.layer == Layer::Cluster { Layer::Cluster } else { layer }, ..x };
        self.check(&x)?;
        Ok(x)
    }

    /// Vertex lookup, also accepting signed names (0+, 1-, ...) in type A.
    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.folding.vertices.iter().position(|v| v == name) {
            return Some(i);
        }
        if let FoldingType::A(n) = self.ty() {
            let (num, sgn) = name.split_at(name.len().checked_sub(1)?);
            let k: usize = num.parse().ok()?;
            if k >= n - 1 {
                return None;
            }
            return match sgn {
                "+" => Some(k),
                "-" => Some(2 * n - 2 - k),
                _ => None,
            };
        }
        None
    }

    pub fn context(&self) -> Arc<crate::algnum::CycContext> {
        self.folding.ctx.clone()
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Layer::Module => "module",
            Layer::Derived => "derived",
            Layer::Cluster => "cluster",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Layer {
    type Err = ArError;
    fn from_str(s: &str) -> Result<Self, ArError> {
        match s {
            "module" | "mod" => Ok(Layer::Module),
            "derived" => Ok(Layer::Derived),
            "cluster" => Ok(Layer::Cluster),
            _ => Err(ArError::Parse(s.to_string())),
        }
    }
}

/// P_{ji} = number of paths i -> j (so column i is dim P(i)).
fn paths_matrix(nv: usize, arrows: &[(usize, usize)]) -> IntMatrix {
    let mut adj = IntMatrix::zeros(nv, nv);
    for &(i, j) in arrows {
        adj.set(j, i, 1);
    }
    let mut total = Matrix::identity(nv);
    let mut power = Matrix::identity(nv);
    for _ in 0..nv {
        power = power.mul(&adj);
        if power.is_zero_matrix() {
            break;
        }
        total = total.add(&power);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::cyc_context;

    fn a7() -> ArModel {
        ArModel::new(FoldingType::A(4)).unwrap()
    }

    #[test]
    fn counts_match_positive_roots() {
        for ty in FoldingType::catalogue() {
            let ar = ArModel::new(ty).unwrap();
            let nv = ty.rank();
            let expected = match ty {
                FoldingType::A(n) => n * (2 * n - 1),
                FoldingType::D(n) => n * (n + 1),
                FoldingType::E6 => 36,
                FoldingType::E7 => 63,
                FoldingType::E8 => 120,
            };
            assert_eq!(ar.modules().len(), expected, "{ty}");
            assert_eq!(ar.enumerate(Layer::Cluster).len(), expected + nv);
            let mut ds: Vec<Vec<i64>> = ar.modules().iter().map(|x| ar.dim_vector(x).unwrap()).collect();
            ds.sort();
            ds.dedup();
            assert_eq!(ds.len(), expected);
        }
    }

    #[test]
    fn a7_dimension_projection_example() {
        let ar = a7();
        let x = ar.find_by_dims(&[1, 1, 1, 0, 0, 0, 0]).unwrap();
        let (a, b) = ar.dimproj(&x).unwrap();
        let c = cyc_context(4).unwrap();
        assert_eq!(a, &RealCycNumber::from_int(&c, 2) + &crate::algnum::two_cos(&c, 2));
        assert_eq!(b, RealCycNumber::from_int(&c, 1));
        assert_eq!(ar.name(&x), "I(1)");
    }

    #[test]
    fn a7_sigma_is_the_flip() {
        let ar = a7();
        assert_eq!(ar.sigma, vec![6, 5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn tau_round_trips() {
        for ty in [FoldingType::A(3), FoldingType::D(4), FoldingType::E6] {
            let ar = ArModel::new(ty).unwrap();
            for layer in [Layer::Derived, Layer::Cluster] {
                for x in ar.enumerate(layer) {
                    let y = ar.tau(&x).unwrap();
                    assert_eq!(ar.tau_inv(&y).unwrap(), x, "{ty} {layer}");
                }
            }
            for x in ar.modules() {
                match ar.tau(&x) {
                    Ok(y) => assert_eq!(ar.coxeter.mul_vec(&ar.dim_vector(&x).unwrap()), ar.dim_vector(&y).unwrap()),
                    Err(ArError::ProjectiveTau(_)) => assert!(ar.is_projective(&x)),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn cluster_tau_cycles_through_shifted_projectives() {
        let ar = a7();
        let p = ar.projective(6);
        let sp = ar.tau(&p.with_layer(Layer::Cluster)).unwrap();
        assert_eq!(sp, ar.shifted_projective(6));
        assert_eq!(ar.tau(&sp).unwrap(), ar.injective(6).with_layer(Layer::Cluster));
        assert_eq!(ar.column(&sp), 8);
    }

    #[test]
    fn meshes_are_additive() {
        for ty in FoldingType::catalogue() {
            let ar = ArModel::new(ty).unwrap();
            let arrows = ar.ar_arrows();
            for x in ar.modules() {
                if let Ok(tx) = ar.tau(&x) {
                    let mids: Vec<Indec> = arrows.iter().filter(|(a, _)| *a == tx).map(|(_, b)| *b).collect();
                    let sum = mids.iter().fold(vec![0; ar.nv()], |acc, y| {
                        acc.iter().zip(ar.dim_vector(y).unwrap()).map(|(a, b)| a + b).collect()
                    });
                    let rhs: Vec<i64> =
                        ar.dim_vector(&x).unwrap().iter().zip(ar.dim_vector(&tx).unwrap()).map(|(a, b)| a + b).collect();
                    assert_eq!(sum, rhs, "{ty}");
                    for y in mids {
                        assert!(arrows.contains(&(y, x)));
                    }
                }
            }
        }
    }

    #[test]
    fn projections_are_weighted_roots() {
        for ty in FoldingType::catalogue() {
            let ar = ArModel::new(ty).unwrap();
            for layer in [Layer::Module, Layer::Derived] {
                let r = ar.projection_report(layer).unwrap();
                assert!(r.passed(), "{ty} {layer}: {r:?}");
            }
        }
    }

    #[test]
    fn parse_objects() {
        let ar = a7();
        let x = ar.parse_object("I(1),tau=2", Layer::Module).unwrap();
        assert_eq!(x, Indec::module(1, 2));
        assert_eq!(ar.parse_object("P(0-)", Layer::Module).unwrap(), ar.projective(6));
        assert_eq!(ar.parse_object("SigmaP(6)", Layer::Cluster).unwrap(), ar.shifted_projective(6));
        assert!(ar.parse_object("I(9)", Layer::Module).is_err());
        assert!(ar.parse_object("I(1),tau=4", Layer::Module).is_err());
    }

    #[test]
    fn cluster_ext_is_symmetric() {
        let ar = ArModel::new(FoldingType::D(4)).unwrap();
        let objs = ar.enumerate(Layer::Cluster);
        for x in &objs {
            for y in &objs {
                assert_eq!(ar.ext1_dim(x, y).unwrap(), ar.ext1_dim(y, x).unwrap());
            }
            assert_eq!(ar.ext1_dim(x, x).unwrap(), 0);
        }
    }

    #[test]
    fn indec_json_round_trip() {
        let x = Indec { layer: Layer::Cluster, vertex: 3, m: 2, shift: 1 };
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<Indec>(&s).unwrap(), x);
    }
}
