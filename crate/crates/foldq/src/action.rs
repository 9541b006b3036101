//! The action of the positive Chebyshev semiring on iso-classes of
//! indecomposables, R₊-generation and the generator sets Γ.
//!
//! The label of τ^m I(i) (and of its suspensions) is the vertex basis element
//! of i. An element r acts column-wise: r·τ^m I(i) is the multiset read off
//! from the i-th column of the vertex representation of r.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::armodel::{ArError, ArModel, Indec, Layer, ProjVector};
use crate::chebrings::{ring_data, FoldingType, RingData, RingElt, RingError};
use crate::intlin::{enumerate_box, solve_integer, IntSolution};
use crate::{Cyc, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("{0} is not in the positive semiring")]
    NotSemiring(String),
    #[error("element of {0} acting on an object of {1}")]
    TypeMismatch(FoldingType, FoldingType),
    #[error("label decomposition failed: {0}")]
    Decomposition(String),
    #[error("no integral class: {0}")]
    NoClass(String),
    #[error(transparent)]
    Ar(#[from] ArError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Entry {
    object: Indec,
    mult: u64,
}

/// Multiset of iso-classes of indecomposables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Entry>", into = "Vec<Entry>")]
pub struct IsoMultiset(pub BTreeMap<Indec, u64>);

impl From<Vec<Entry>> for IsoMultiset {
    fn from(v: Vec<Entry>) -> Self {
        let mut m = IsoMultiset::default();
        for e in v {
            m.insert(e.object, e.mult);
        }
        m
    }
}

impl From<IsoMultiset> for Vec<Entry> {
    fn from(m: IsoMultiset) -> Self {
        m.0.into_iter().map(|(object, mult)| Entry { object, mult }).collect()
    }
}

impl IsoMultiset {
    pub fn single(x: Indec) -> Self {
        let mut m = IsoMultiset::default();
        m.insert(x, 1);
        m
    }

    pub fn insert(&mut self, x: Indec, k: u64) {
        if k > 0 {
            *self.0.entry(x).or_insert(0) += k;
        }
    }

    /// Direct sum.
    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, &k) in &other.0 {
            out.insert(*x, k);
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Indec, &u64)> {
        self.0.iter()
    }
}

/// A generator set together with the rows it is built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaSet {
    pub name: String,
    /// projective vertices whose rows make up the set
    pub rows: Vec<usize>,
    pub members: Vec<Indec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaReport {
    pub name: String,
    pub generates_all: bool,
    pub basic: bool,
    pub tau_closed: bool,
    /// one member per column, each a positive multiple of that column's root
    pub collinear_bijection: bool,
    /// members project exactly onto the positive roots
    pub projects_onto_roots: bool,
    /// the row weight of each row of the set, in `rows` order
    pub row_weights_one: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenOrder {
    Lt,
    Eq,
    Gt,
    Incomparable,
}

/// AR model together with its ring.
#[derive(Clone, Debug)]
pub struct ActionModel {
    pub ar: ArModel,
    pub ring: Arc<RingData>,
    /// vertex representations of the hat basis elements
    basis_reps: Vec<IntMatrix>,
}

impl ActionModel {
    pub fn new(ty: FoldingType) -> Result<Self, ActionError> {
        Ok(Self::from_ar(ArModel::new(ty)?)?)
    }

    pub fn from_ar(ar: ArModel) -> Result<Self, RingError> {
        let ring = ring_data(ar.ty())?;
        let basis_reps = (0..ring.dim())
            .map(|a| {
                let mut e = vec![0; ring.dim()];
                e[a] = 1;
                ring.vertex_rep(&e)
            })
            .collect();
        Ok(ActionModel { ar, ring, basis_reps })
    }

    /// Vertex representation of the a-th hat basis element.
    pub fn basis_rep(&self, a: usize) -> &IntMatrix {
        &self.basis_reps[a]
    }

    /// Vertex representation of a ring element.
    pub fn rep(&self, coords: &[i64]) -> IntMatrix {
        let k = self.ring.vertex_basis.len();
        let mut m = IntMatrix::zeros(k, k);
        for (c, b) in coords.iter().zip(&self.basis_reps) {
            if *c != 0 {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    pub fn ty(&self) -> FoldingType {
        self.ar.ty()
    }

    /// Hat-ring label of an indecomposable.
    pub fn label(&self, x: &Indec) -> RingElt {
        RingElt::new(self.ty(), self.ring.vertex_basis[x.vertex].clone())
    }

    fn check_elt(&self, r: &RingElt) -> Result<(), ActionError> {
        if r.ty != self.ty() {
            return Err(ActionError::TypeMismatch(r.ty, self.ty()));
        }
        if !r.is_semiring_member() {
            return Err(ActionError::NotSemiring(r.to_string()));
        }
        Ok(())
    }

    /// r·x as a multiset of indecomposables in the column of x.
    pub fn act(&self, r: &RingElt, x: &Indec) -> Result<IsoMultiset, ActionError> {
        self.check_elt(r)?;
        if !self.ar.contains(x) {
            return Err(ArError::NotInCategory(format!("{x:?}")).into());
        }
        let rep = self.rep(&r.coords);
        let f = self.ar.image(x.vertex);
        let mut out = IsoMultiset::default();
        for (j, c) in rep.col(x.vertex).into_iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 || self.ar.image(j) != f {
                return Err(ActionError::Decomposition(format!(
                    "coefficient {c} at vertex {} for {} on {}",
                    self.ring.vertex_names[j],
                    r,
                    self.ar.name(x)
                )));
            }
            out.insert(Indec { vertex: j, ..*x }, c as u64);
        }
        Ok(out)
    }

    pub fn act_multiset(&self, r: &RingElt, xs: &IsoMultiset) -> Result<IsoMultiset, ActionError> {
        let mut out = IsoMultiset::default();
        for (x, &k) in xs.iter() {
            for (y, &l) in self.act(r, x)?.iter() {
                out.insert(*y, k * l);
            }
        }
        Ok(out)
    }

    /// The element with coordinates `x` in the small basis.
    pub fn small_elt(&self, x: &[i64]) -> RingElt {
        let mut c = vec![0i64; self.ring.dim()];
        for (b, &k) in self.ring.small_basis.iter().zip(x) {
            for (ci, bi) in c.iter_mut().zip(b) {
                *ci += k * bi;
            }
        }
        RingElt::new(self.ty(), c)
    }

    /// A pair (r, r') with rM = r'M ⊕ N, minimal under ρ(r + r') and then
    /// colexicographically in the small-basis coordinates of r, then r'.
    pub fn generation_pair(&self, m: &Indec, n: &Indec) -> Option<(RingElt, RingElt)> {
        if m.layer != n.layer || m.shift != n.shift || self.ar.column(m) != self.ar.column(n) {
            return None;
        }
        if !self.ar.contains(m) || !self.ar.contains(n) {
            return None;
        }
        let cols: Vec<Vec<i64>> =
            self.ring.small_basis.iter().map(|b| self.rep(b).col(m.vertex)).collect();
        let mut target = vec![0i64; self.ring.vertex_basis.len()];
        target[n.vertex] = 1;
        let sol = solve_integer(&cols, &target)?;
        // ρ is linear, so rank candidates in floating point and settle near-ties exactly
        let rho_b: Vec<f64> = self.ring.small_basis.iter().map(|b| self.ring.rho_coords(b).to_f64()).collect();
        let cands: Vec<(f64, Vec<i64>)> = enumerate_box(&sol, 3)
            .into_iter()
            .map(|x| (x.iter().zip(&rho_b).map(|(v, r)| v.abs() as f64 * r).sum(), x))
            .collect();
        let lo = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let mut best: Option<(Cyc, Vec<i64>, Vec<i64>)> = None;
        for (_, x) in cands.into_iter().filter(|c| c.0 <= lo + 1e-6) {
            let pos: Vec<i64> = x.iter().map(|&v| v.max(0)).collect();
            let neg: Vec<i64> = x.iter().map(|&v| (-v).max(0)).collect();
            let sum: Vec<i64> = x.iter().map(|v| v.abs()).collect();
            let rho = self.small_elt(&sum).rho();
            // colexicographic key: prefer low-index basis elements in r, then in r'
            let key: Vec<i64> = pos.iter().rev().chain(neg.iter().rev()).copied().collect();
            let better = match &best {
                None => true,
                Some((r, bk, _)) => match rho.cmp_exact(r) {
                    Ordering::Less => true,
                    Ordering::Equal => key < *bk,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((rho, key, x));
            }
        }
        let (_, _, x) = best?;
        let r = self.small_elt(&x.iter().map(|&v| v.max(0)).collect::<Vec<_>>());
        let rp = self.small_elt(&x.iter().map(|&v| (-v).max(0)).collect::<Vec<_>>());
        let lhs = self.act(&r, m).ok()?;
        let rhs = self.act(&rp, m).ok()?.union(&IsoMultiset::single(*n));
        (lhs == rhs).then_some((r, rp))
    }

    pub fn generates(&self, m: &Indec, n: &Indec) -> bool {
        self.generation_pair(m, n).is_some()
    }

    /// Rows of the generator sets, given by projective vertex names.
    fn gamma_rows(&self) -> Vec<(String, [String; 2])> {
        let pair = |a: &str, b: &str| [a.to_string(), b.to_string()];
        let mut out = Vec::new();
        match self.ty() {
            FoldingType::A(n) => {
                let mut seen = BTreeSet::new();
                for i in [0, 2 * n - 2] {
                    for j in [1, 2 * n - 3] {
                        if seen.insert((i, j)) {
                            out.push((format!("Γ_{{{i},{j}}}"), [i.to_string(), j.to_string()]));
                        }
                    }
                }
            }
            FoldingType::D(3) => {
                for i in ["0", "2+", "2-"] {
                    out.push((format!("Γ_{{{i},1}}"), pair(i, "1")));
                }
            }
            FoldingType::D(n) => {
                let i = if n % 2 == 0 { 0 } else { 1 };
                for s in ["+", "-"] {
                    out.push((format!("Γ{s}"), [i.to_string(), format!("{}{s}", n - 1)]));
                }
            }
            FoldingType::E6 => {
                for i in ["0+", "0-"] {
                    for j in ["1+", "1-"] {
                        out.push((format!("Γ_{{{i},{j}}}"), pair(i, j)));
                    }
                }
            }
            FoldingType::E7 => out.push(("Γ".to_string(), pair("0", "v7"))),
            FoldingType::E8 => out.push(("Γ".to_string(), pair("0", "1"))),
        }
        out
    }

    /// The generator sets of the category (module or cluster layer).
    pub fn gamma_sets(&self, layer: Layer) -> Vec<GammaSet> {
        let n = self.ar.n();
        self.gamma_rows()
            .into_iter()
            .map(|(name, rows)| {
                let rows: Vec<usize> = rows
                    .iter()
                    .map(|r| self.ar.vertex_by_name(r).expect("Γ row names a vertex"))
                    .collect();
                let mut members = Vec::new();
                for &j in &rows {
                    let i = self.ar.row_of_projective(j);
                    for m in 0..n {
                        members.push(Indec { layer, vertex: i, m, shift: 0 });
                    }
                    if layer == Layer::Cluster {
                        members.push(Indec { layer, vertex: i, m: n - 1, shift: 1 });
                    }
                }
                members.sort();
                GammaSet { name, rows, members }
            })
            .collect()
    }

    /// Exhaustive check over small-basis pairs (r, s) and all objects of the
    /// cluster layer: multiplicativity, additivity, τ-equivariance and
    /// scaling of projections by ρ. Returns the failing cases.
    pub fn integrity(&self) -> Result<Vec<String>, ActionError> {
        let ty = self.ty();
        let ctx = self.ar.context();
        let basis: Vec<RingElt> = self.ring.small_basis.iter().map(|b| RingElt::new(ty, b.clone())).collect();
        let objs = self.ar.enumerate(Layer::Cluster);
        let mut bad = Vec::new();
        for x in &objs {
            let tx = self.ar.tau(x)?;
            let p = self.ar.dimproj(x)?;
            for r in &basis {
                let rx = self.act(r, x)?;
                let mut shifted = IsoMultiset::default();
                let mut q = (Cyc::from_int(&ctx, 0), Cyc::from_int(&ctx, 0));
                for (y, &m) in rx.iter() {
                    shifted.insert(self.ar.tau(y)?, m);
                    let py = self.ar.dimproj(y)?;
                    let mm = Cyc::from_int(&ctx, m as i64);
                    q = (&q.0 + &(&py.0 * &mm), &q.1 + &(&py.1 * &mm));
                }
                if self.act(r, &tx)? != shifted {
                    bad.push(format!("τ-equivariance: {r} on {}", self.ar.name(x)));
                }
                let rho = r.rho();
                if q != (&p.0 * &rho, &p.1 * &rho) {
                    bad.push(format!("projection scaling: {r} on {}", self.ar.name(x)));
                }
                for s in &basis {
                    let rs = self.act(&r.mul(s)?, x)?;
                    if rs != self.act_multiset(r, &self.act(s, x)?)? {
                        bad.push(format!("act(rs) ≠ act(r, act(s)): {r}, {s} on {}", self.ar.name(x)));
                    }
                    if self.act(&r.add(s)?, x)? != rx.union(&self.act(s, x)?) {
                        bad.push(format!("additivity: {r}, {s} on {}", self.ar.name(x)));
                    }
                }
            }
        }
        Ok(bad)
    }

    /// Checks the defining properties of a generator set.
    pub fn verify_gamma(&self, g: &GammaSet) -> Result<GammaReport, ActionError> {
        let layer = g.members.first().map_or(Layer::Module, |x| x.layer);
        let set: BTreeSet<Indec> = g.members.iter().copied().collect();
        let generates_all = self
            .ar
            .enumerate(layer)
            .iter()
            .all(|y| g.members.iter().any(|x| self.generates(x, y)));
        let basic = set.len() == g.members.len();
        // τ-closure of the module part; suspended projectives must come from members
        let tau_closed = g.members.iter().all(|x| {
            if x.shift != 0 {
                return set.contains(&Indec { shift: 0, ..*x });
            }
            let y = x.with_layer(Layer::Module);
            [self.ar.tau(&y), self.ar.tau_inv(&y)]
                .into_iter()
                .all(|t| t.map_or(true, |t| set.contains(&t.with_layer(x.layer))))
        });
        let ncols = self.ar.column_count(layer) as i64;
        let mut by_col: BTreeMap<i64, Vec<Indec>> = BTreeMap::new();
        for x in &g.members {
            by_col.entry(self.ar.column(x)).or_default().push(*x);
        }
        let mut collinear_bijection = by_col.len() as i64 == ncols && by_col.values().all(|v| v.len() == 1);
        let mut projects_onto_roots = true;
        for x in &g.members {
            let p = self.ar.dimproj(x)?;
            let root = self.signed_root(x);
            let eps = self.ar.row_weight(x.vertex);
            let scaled = (&root.0 * &eps, &root.1 * &eps);
            collinear_bijection &= p == scaled && eps.sign() > 0;
            projects_onto_roots &= p == root;
        }
        let row_weights_one = g
            .rows
            .iter()
            .map(|&j| self.ar.row_weight(self.ar.row_of_projective(j)) == Cyc::from_int(&self.ar.context(), 1))
            .collect();
        Ok(GammaReport {
            name: g.name.clone(),
            generates_all,
            basic,
            tau_closed,
            collinear_bijection,
            projects_onto_roots,
            row_weights_one,
        })
    }

    /// Root of the column of x, negated for shifted objects.
    fn signed_root(&self, x: &Indec) -> ProjVector {
        let c = if x.shift == 0 { self.ar.column(x) } else { 2 * x.m as i64 + self.ar.image(x.vertex) as i64 };
        let r = self.ar.root(c);
        if x.shift.rem_euclid(2) == 1 {
            (-r.0, -r.1)
        } else {
            r
        }
    }

    /// Γ ~_G Γ': some choice of g_M in the symmetry group gives
    /// Γ' = {g_M M : M ∈ Γ}.
    pub fn equivalent(&self, a: &GammaSet, b: &GammaSet) -> Result<bool, ActionError> {
        if a.members.len() != b.members.len() {
            return Ok(false);
        }
        let target: BTreeMap<Indec, usize> = b.members.iter().enumerate().map(|(k, x)| (*x, k)).collect();
        let mut options: Vec<BTreeSet<usize>> = Vec::with_capacity(a.members.len());
        for x in &a.members {
            let mut o = BTreeSet::new();
            for g in &self.ring.symmetries {
                let y = self.act(&RingElt::new(self.ty(), g.clone()), x)?;
                if y.total() == 1 {
                    if let Some(&k) = target.get(y.0.keys().next().unwrap()) {
                        o.insert(k);
                    }
                }
            }
            options.push(o);
        }
        Ok(perfect_matching(&options))
    }

    /// Partial order on objects generated from a common member of Γ:
    /// comparable iff collinear in the same degree, ordered by length.
    pub fn gen_partial_order(&self, a: &Indec, b: &Indec, gamma: &GammaSet) -> GenOrder {
        if a == b {
            return GenOrder::Eq;
        }
        let common = gamma.members.iter().any(|m| self.generates(m, a) && self.generates(m, b));
        if !common || a.shift != b.shift || self.ar.column(a) != self.ar.column(b) {
            return GenOrder::Incomparable;
        }
        let (Ok(pa), Ok(pb)) = (self.ar.dimproj(a), self.ar.dimproj(b)) else {
            return GenOrder::Incomparable;
        };
        match self.ar.euclid_len_sq(&pa).cmp_exact(&self.ar.euclid_len_sq(&pb)) {
            Ordering::Less => GenOrder::Lt,
            Ordering::Greater => GenOrder::Gt,
            Ordering::Equal => GenOrder::Incomparable,
        }
    }

    /// The two simples of the first generator set, ordered by bipartition
    /// class; they span the Grothendieck module.
    pub fn k0_simples(&self) -> [Indec; 2] {
        let g = &self.gamma_sets(Layer::Module)[0];
        let simple = |f: usize| {
            *g.members
                .iter()
                .find(|x| {
                    let d = &self.ar.dims[x.vertex][x.m];
                    d.iter().sum::<i64>() == 1 && self.ar.image(d.iter().position(|&v| v == 1).unwrap()) == f
                })
                .expect("every generator set holds a simple in each class")
        };
        [simple(0), simple(1)]
    }

    /// Class of a dimension vector as r0[S0] + r1[S1] with r0, r1 in R.
    /// The representation is not unique; a shortest one in the L1 norm on
    /// small-basis coordinates is returned.
    pub fn k0_class_dims(&self, d: &[i64]) -> Result<(RingElt, RingElt), ActionError> {
        let simples = self.k0_simples();
        let mut cols = Vec::new();
        for s in &simples {
            for b in &self.ring.small_basis {
                let y = self.act(&RingElt::new(self.ty(), b.clone()), s)?;
                let mut v = vec![0i64; self.ar.nv()];
                for (x, &k) in y.iter() {
                    for (vi, di) in v.iter_mut().zip(self.ar.dim_vector(x)?) {
                        *vi += k as i64 * di;
                    }
                }
                cols.push(v);
            }
        }
        let sol = solve_integer(&cols, d).ok_or_else(|| ActionError::NoClass(format!("{d:?}")))?;
        let x = shortest_representative(&sol);
        let k = self.ring.small_basis.len();
        Ok((self.small_elt(&x[..k]), self.small_elt(&x[k..])))
    }

    pub fn k0_class(&self, x: &Indec) -> Result<(RingElt, RingElt), ActionError> {
        self.k0_class_multiset(&IsoMultiset::single(*x))
    }

    pub fn k0_class_multiset(&self, xs: &IsoMultiset) -> Result<(RingElt, RingElt), ActionError> {
        let mut d = vec![0i64; self.ar.nv()];
        for (x, &k) in xs.iter() {
            if x.layer == Layer::Cluster && x.shift != 0 {
                return Err(ArError::Unsupported(Layer::Cluster).into());
            }
            let sign = if x.shift.rem_euclid(2) == 1 { -1 } else { 1 };
            for (di, v) in d.iter_mut().zip(self.ar.dim_vector(x)?) {
                *di += sign * k as i64 * v;
            }
        }
        self.k0_class_dims(&d)
    }
}

fn l1_key(v: &[i64]) -> (i64, Vec<i64>) {
    (v.iter().map(|x| x.abs()).sum(), v.to_vec())
}

/// Solution of least L1 norm (then lexicographically least): exhaustive over
/// a box for small kernels, local descent by one or two kernel moves otherwise.
pub(crate) fn shortest_representative(sol: &IntSolution) -> Vec<i64> {
    if sol.kernel.len() <= 3 {
        return enumerate_box(sol, 3).into_iter().min_by_key(|v| l1_key(v)).expect("box is nonempty");
    }
    let mut moves: Vec<Vec<i64>> = Vec::new();
    for (i, a) in sol.kernel.iter().enumerate() {
        for s in [1, -1] {
            moves.push(a.iter().map(|x| s * x).collect());
            for b in &sol.kernel[i + 1..] {
                for t in [1, -1] {
                    moves.push(a.iter().zip(b).map(|(x, y)| s * x + t * y).collect());
                }
            }
        }
    }
    let mut x = sol.particular.clone();
    loop {
        let best = moves
            .iter()
            .map(|m| x.iter().zip(m).map(|(a, b)| a + b).collect::<Vec<i64>>())
            .min_by_key(|v| l1_key(v))
            .expect("kernel is nonempty");
        if l1_key(&best) < l1_key(&x) {
            x = best;
        } else {
            return x;
        }
    }
}

/// Kuhn's augmenting-path matching: does every left vertex get a distinct partner?
fn perfect_matching(options: &[BTreeSet<usize>]) -> bool {
    fn augment(u: usize, options: &[BTreeSet<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &options[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].map_or(true, |w| augment(w, options, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let n = options.len();
    let mut owner = vec![None; n];
    (0..n).all(|u| augment(u, options, &mut vec![false; n], &mut owner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(s: &str) -> ActionModel {
        ActionModel::new(s.parse().unwrap()).unwrap()
    }

    fn elt(a: &ActionModel, s: &str) -> RingElt {
        RingElt::parse(a.ty(), s).unwrap()
    }

    fn by_dims(a: &ActionModel, names: &[&str]) -> Indec {
        let mut d = vec![0; a.ar.nv()];
        for v in names {
            d[a.ar.vertex_by_name(v).unwrap()] += 1;
        }
        a.ar.find_by_dims(&d).unwrap_or_else(|| panic!("no module {names:?}"))
    }

    #[test]
    fn a7_relation_w2_w1() {
        let a = model("A7");
        let m = by_dims(&a, &["0+", "2+", "1+"]);
        assert_eq!(a.label(&m), elt(&a, "w1"));
        let got = a.act(&elt(&a, "w2"), &m).unwrap();
        let want = IsoMultiset::single(m).union(&IsoMultiset::single(by_dims(&a, &["2+", "2-", "3"])));
        assert_eq!(got, want);
    }

    #[test]
    fn a7_generation_pair() {
        let a = model("A7");
        let m = by_dims(&a, &["0+", "2+", "1+"]);
        let n = by_dims(&a, &["2+", "2-", "3"]);
        let (r, rp) = a.generation_pair(&m, &n).unwrap();
        assert_eq!(r, elt(&a, "w2"));
        assert_eq!(rp, elt(&a, "1"));
    }

    #[test]
    fn self_generation_and_column_mismatch() {
        for ty in FoldingType::catalogue().into_iter().take(8) {
            let a = ActionModel::new(ty).unwrap();
            for x in a.ar.modules() {
                let (r, rp) = a.generation_pair(&x, &x).unwrap();
                assert_eq!(r, RingElt::one(ty).unwrap(), "{ty}");
                assert!(rp.is_zero());
            }
            let xs = a.ar.modules();
            for (x, y) in xs.iter().zip(xs.iter().skip(1)) {
                if a.ar.column(x) != a.ar.column(y) {
                    assert!(a.generation_pair(x, y).is_none());
                }
            }
        }
    }

    #[test]
    fn d5_fork_obstruction() {
        let a = model("D5");
        let one = a.ar.vertex_by_name("1").unwrap();
        let fork = a.ar.vertex_by_name("3+").unwrap();
        let mut found = 0;
        for m in 0..a.ar.n() {
            let x = Indec::module(one, m);
            for y in a.ar.column_members(Layer::Module, a.ar.column(&x)) {
                if y.vertex == fork {
                    assert!(a.generation_pair(&x, &y).is_none());
                    found += 1;
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn d5_fork_product() {
        let a = model("D5");
        let fork = Indec::module(a.ar.vertex_by_name("3+").unwrap(), 0);
        let got = a.act(&elt(&a, "w2+"), &fork).unwrap();
        let want: BTreeSet<usize> = ["1", "3-"].iter().map(|v| a.ar.vertex_by_name(v).unwrap()).collect();
        assert_eq!(got.0.keys().map(|x| x.vertex).collect::<BTreeSet<_>>(), want);
        assert_eq!(got.total(), 2);
        assert_eq!(a.label(&Indec::module(a.ar.vertex_by_name("1").unwrap(), 0)), elt(&a, "w1+ + w1-"));
    }

    #[test]
    fn d4_g_cycles_the_arms() {
        let a = model("D4");
        let g = elt(&a, "g");
        let v = |s: &str| a.ar.vertex_by_name(s).unwrap();
        for m in 0..a.ar.n() {
            let step = |i: usize| {
                let y = a.act(&g, &Indec::module(i, m)).unwrap();
                assert_eq!(y.total(), 1);
                y.0.keys().next().unwrap().vertex
            };
            assert_eq!(step(v("0")), v("2+"));
            assert_eq!(step(v("2+")), v("2-"));
            assert_eq!(step(v("2-")), v("0"));
            assert_eq!(step(v("1")), v("1"));
        }
    }

    #[test]
    fn act_by_one_is_identity() {
        for ty in FoldingType::catalogue() {
            let a = ActionModel::new(ty).unwrap();
            let one = RingElt::one(ty).unwrap();
            for x in a.ar.enumerate(Layer::Cluster) {
                assert_eq!(a.act(&one, &x).unwrap(), IsoMultiset::single(x));
            }
        }
    }

    #[test]
    fn negative_elements_are_rejected() {
        let a = model("A7");
        let r = elt(&a, "1 - w2");
        assert!(matches!(a.act(&r, &Indec::module(0, 0)), Err(ActionError::NotSemiring(_))));
    }

    #[test]
    fn gamma_counts_and_sizes() {
        let want = [("A7", 4), ("A3", 2), ("D4", 3), ("D5", 2), ("D6", 2), ("E6", 4), ("E7", 1), ("E8", 1)];
        for (s, k) in want {
            let a = model(s);
            let gs = a.gamma_sets(Layer::Module);
            assert_eq!(gs.len(), k, "{s}");
            for g in &gs {
                assert_eq!(g.members.len(), 2 * a.ar.n(), "{s}");
            }
            for g in a.gamma_sets(Layer::Cluster) {
                assert_eq!(g.members.len(), 2 * a.ar.n() + 2, "{s}");
            }
        }
        assert_eq!(model("E8").gamma_sets(Layer::Module)[0].members.len(), 30);
    }

    #[test]
    fn gamma_sets_verify() {
        for ty in FoldingType::catalogue() {
            let a = ActionModel::new(ty).unwrap();
            for layer in [Layer::Module, Layer::Cluster] {
                let gs = a.gamma_sets(layer);
                for g in &gs {
                    let r = a.verify_gamma(g).unwrap();
                    assert!(r.generates_all && r.basic && r.tau_closed && r.collinear_bijection, "{ty} {r:?}");
                }
                for g in &gs {
                    for h in &gs {
                        assert!(a.equivalent(g, h).unwrap(), "{ty} {} {}", g.name, h.name);
                    }
                }
            }
        }
    }

    #[test]
    fn exhaustive_integrity() {
        for ty in FoldingType::catalogue() {
            let bad = ActionModel::new(ty).unwrap().integrity().unwrap();
            assert!(bad.is_empty(), "{ty}: {bad:?}");
        }
    }

    #[test]
    fn weight_one_rows() {
        // every listed row has weight 1 except the forks of D (U_{n-1} = 2θ only
        // when n = 6) and the v7 row of E7
        for ty in FoldingType::catalogue() {
            let a = ActionModel::new(ty).unwrap();
            for g in a.gamma_sets(Layer::Module) {
                let r = a.verify_gamma(&g).unwrap();
                let expect: Vec<bool> = match ty {
                    FoldingType::D(n) if n > 3 => vec![true, n == 6],
                    FoldingType::E7 => vec![true, false],
                    _ => vec![true, true],
                };
                assert_eq!(r.row_weights_one, expect, "{ty} {}", g.name);
                assert_eq!(r.projects_onto_roots, expect.iter().all(|&b| b), "{ty}");
            }
        }
    }

    #[test]
    fn a7_partial_order() {
        let a = model("A7");
        let g = &a.gamma_sets(Layer::Module)[0];
        let x = |i: usize| Indec::module(i, 0);
        assert_eq!(a.gen_partial_order(&x(0), &x(2), g), GenOrder::Lt);
        assert_eq!(a.gen_partial_order(&x(2), &x(0), g), GenOrder::Gt);
        assert_eq!(a.gen_partial_order(&x(2), &x(4), g), GenOrder::Incomparable);
        assert_eq!(a.gen_partial_order(&x(2), &x(2), g), GenOrder::Eq);
        assert_eq!(a.gen_partial_order(&x(0), &x(1), g), GenOrder::Incomparable);
    }

    #[test]
    fn k0_examples() {
        let a = model("A7");
        let [s0, s1] = a.k0_simples();
        assert_eq!(a.k0_class(&s0).unwrap(), (elt(&a, "1"), RingElt::zero(a.ty()).unwrap()));
        assert_eq!(a.k0_class(&s1).unwrap(), (RingElt::zero(a.ty()).unwrap(), elt(&a, "1")));
        let pair = IsoMultiset::single(Indec::module(0, 0)).union(&IsoMultiset::single(Indec::module(6, 0)));
        assert_eq!(a.k0_class_multiset(&pair).unwrap(), (elt(&a, "1 + w6"), RingElt::zero(a.ty()).unwrap()));
    }

    #[test]
    fn k0_classes_reproduce_dims() {
        for ty in FoldingType::catalogue() {
            let a = ActionModel::new(ty).unwrap();
            let simples = a.k0_simples();
            for x in a.ar.modules() {
                let (r0, r1) = a.k0_class(&x).unwrap();
                let mut d = vec![0i64; a.ar.nv()];
                for (r, s) in [(&r0, &simples[0]), (&r1, &simples[1])] {
                    let rep = a.rep(&r.coords);
                    for (j, c) in rep.col(s.vertex).into_iter().enumerate() {
                        for (di, v) in d.iter_mut().zip(a.ar.dim_vector(&Indec { vertex: j, ..*s }).unwrap()) {
                            *di += c * v;
                        }
                    }
                }
                assert_eq!(d, a.ar.dim_vector(&x).unwrap(), "{ty}");
            }
        }
    }

    #[test]
    fn multiset_json_round_trip() {
        let a = model("D5");
        let m = a.act(&elt(&a, "w2+"), &Indec::module(3, 1)).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<IsoMultiset>(&s).unwrap(), m);
    }

    fn small_types() -> impl Strategy<Value = FoldingType> {
        prop::sample::select(FoldingType::catalogue())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn action_axioms(ty in small_types(), i in 0usize..64, j in 0usize..64, k in 0usize..512) {
            let a = ActionModel::new(ty).unwrap();
            let basis = &a.ring.small_basis;
            let r = RingElt::new(ty, basis[i % basis.len()].clone());
            let s = RingElt::new(ty, basis[j % basis.len()].clone());
            let objs = a.ar.enumerate(Layer::Cluster);
            let x = objs[k % objs.len()];
            let rs = a.act(&r.mul(&s).unwrap(), &x).unwrap();
            prop_assert_eq!(&rs, &a.act_multiset(&r, &a.act(&s, &x).unwrap()).unwrap());
            let sum = a.act(&r.add(&s).unwrap(), &x).unwrap();
            prop_assert_eq!(sum, a.act(&r, &x).unwrap().union(&a.act(&s, &x).unwrap()));
            // τ-equivariance
            let tx = a.ar.tau(&x).unwrap();
            let lhs = a.act(&r, &tx).unwrap();
            let mut rhs = IsoMultiset::default();
            for (y, &m) in a.act(&r, &x).unwrap().iter() {
                rhs.insert(a.ar.tau(y).unwrap(), m);
            }
            prop_assert_eq!(lhs, rhs);
            // projection scales by ρ(r)
            let p = a.ar.dimproj(&x).unwrap();
            let mut q = (Cyc::from_int(&a.ar.context(), 0), Cyc::from_int(&a.ar.context(), 0));
            for (y, &m) in a.act(&r, &x).unwrap().iter() {
                let py = a.ar.dimproj(y).unwrap();
                let mm = Cyc::from_int(&a.ar.context(), m as i64);
                q = (&q.0 + &(&py.0 * &mm), &q.1 + &(&py.1 * &mm));
            }
            let rho = r.rho();
            prop_assert_eq!(q, (&p.0 * &rho, &p.1 * &rho));
        }
    }
}
