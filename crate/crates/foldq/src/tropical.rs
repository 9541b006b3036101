//! Tropical seed patterns: C- and G-matrices of I2(2n) (standard and
//! rescaled), of the unfolding Δ and of the doubled unfolding, with the
//! projection maps between them and folded g-vectors.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{shortest_representative, ActionError, ActionModel};
use crate::algnum::RealCycNumber;
use crate::armodel::{ArError, Indec, Layer};
use crate::chebrings::{FoldingType, RingElt};
use crate::intlin::solve_integer;
use crate::quiver::{
    build_doubled, composite_mutate, double_matrix, mutate, rescaled_b, restrict_to_q, standard_b, Folding,
    QuiverError,
};
use crate::scalar::{Matrix, Scalar};
use crate::{Cyc, CycMatrix, IntMatrix};

#[derive(Debug, Clone, Error)]
pub enum TropicalError {
    #[error("column {column} of C is not sign-coherent: {entries}")]
    SignIncoherent { column: usize, entries: String },
    #[error("mutation index {0} out of range")]
    BadIndex(usize),
    #[error("matrix of size {got} does not match a folding with {want} vertices")]
    DimensionMismatch { got: usize, want: usize },
    #[error("C-matrix is singular")]
    Singular,
    #[error("{0} lies in a row of weight {1}")]
    WeightNotOne(String, String),
    #[error("label equation has no solution for {0}")]
    NoPresentation(String),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Ar(#[from] ArError),
}

/// A tropical y-seed: exchange matrix and C-matrix reached by `word`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalSeed<S> {
    pub word: Vec<usize>,
    pub b: Matrix<S>,
    pub c: Matrix<S>,
}

impl<S: Scalar> TropicalSeed<S> {
    pub fn initial(b: Matrix<S>) -> Self {
        let n = b.rows();
        TropicalSeed { word: Vec::new(), b, c: Matrix::identity(n) }
    }

    /// Mutation at the (pairwise non-adjacent) vertices of `block`, recorded as `label`.
    pub fn mutate_block(&self, block: &[usize], label: usize) -> Result<Self, TropicalError> {
        let mut s = self.clone();
        for &k in block {
            s = c_mutate(&s, k)?;
        }
        s.word = self.word.clone();
        s.word.push(label);
        Ok(s)
    }

    pub fn mutate(&self, k: usize) -> Result<Self, TropicalError> {
        self.mutate_block(&[k], k)
    }
}

/// μ_k on a tropical seed.
pub fn c_mutate<S: Scalar>(seed: &TropicalSeed<S>, k: usize) -> Result<TropicalSeed<S>, TropicalError> {
    let n = seed.c.rows();
    if k >= seed.b.rows() {
        return Err(TropicalError::BadIndex(k));
    }
    let col = seed.c.col(k);
    let eps = match Matrix::from_rows(vec![col.clone()]).coherent_sign() {
        Some(e) => e,
        None => {
            return Err(TropicalError::SignIncoherent {
                column: k,
                entries: format!("{col:?}"),
            })
        }
    };
    let sgn = |x: &S| match x.signum_exact() {
        1 => S::one(),
        -1 => -S::one(),
        _ => S::zero(),
    };
    debug_assert!(eps != 0, "C-matrices have no zero columns");
    let mut c = seed.c.clone();
    for i in 0..n {
        for j in 0..seed.c.cols() {
            let cik = seed.c.get(i, k);
            let v = if j == k {
                -cik.clone()
            } else {
                seed.c.get(i, j).clone() + sgn(cik) * (cik.clone() * seed.b.get(k, j).clone()).pos_part()
            };
            c.set(i, j, v);
        }
    }
    let b = mutate(&seed.b, k)?;
    let mut word = seed.word.clone();
    word.push(k);
    Ok(TropicalSeed { word, b, c })
}

/// G = (Cᵀ)⁻¹ over the scalar's own ring.
pub trait GInverse: Scalar {
    fn transpose_inverse(c: &Matrix<Self>) -> Option<Matrix<Self>>;
}

impl GInverse for i64 {
    fn transpose_inverse(c: &Matrix<i64>) -> Option<Matrix<i64>> {
        c.transpose().unimodular_inverse()
    }
}

impl GInverse for RealCycNumber {
    fn transpose_inverse(c: &CycMatrix) -> Option<CycMatrix> {
        c.transpose().inverse()
    }
}

pub fn g_matrix<S: GInverse>(c: &Matrix<S>) -> Result<Matrix<S>, TropicalError> {
    S::transpose_inverse(c).ok_or(TropicalError::Singular)
}

/// G after μ_k by the explicit formula G' = G Eᵀ, where C' = C E.
pub fn g_mutate_explicit<S: Scalar>(g: &Matrix<S>, c: &Matrix<S>, b: &Matrix<S>, k: usize) -> Matrix<S> {
    let n = c.rows();
    let eps = Matrix::from_rows(vec![c.col(k)]).coherent_sign().unwrap_or(1);
    let e_sign = if eps < 0 { -S::one() } else { S::one() };
    let mut e = Matrix::<S>::identity(n);
    e.set(k, k, -S::one());
    for j in 0..n {
        if j != k {
            e.set(k, j, (e_sign.clone() * b.get(k, j).clone()).pos_part());
        }
    }
    g.mul(&e.transpose())
}

/// Which matrix projection to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMode {
    Double,
    DoubleTranspose,
    Single,
    SingleTranspose,
}

/// Matrix F-projection: (d_F M)_{ij} = Σ_{v ∈ F⁻¹(i)} (w_v/μ_i) M[v][a_j]
/// with anchors a_0, a_1; the transpose variant reads rows at the anchors.
pub fn project_matrix(f: &Folding, m: &IntMatrix, transpose: bool) -> Result<CycMatrix, TropicalError> {
    if m.rows() != f.len() || m.cols() != f.len() {
        return Err(TropicalError::DimensionMismatch { got: m.rows(), want: f.len() });
    }
    let ctx = &f.ctx;
    Ok(Matrix::from_fn(2, 2, |i, j| {
        let (blk, mu) = if transpose { (j, &f.valuation[j]) } else { (i, &f.valuation[i]) };
        let mut s = RealCycNumber::from_int(ctx, 0);
        for &v in &f.blocks[blk] {
            let x = if transpose { *m.get(f.anchors[i], v) } else { *m.get(v, f.anchors[j]) };
            if x != 0 {
                s = &s + &(&f.weights[v] * &RealCycNumber::from_int(ctx, x));
            }
        }
        &s / mu
    }))
}

/// All eight matrices of one seed t (standard/rescaled × folded/unfolded × C/G).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesseractNode {
    pub word: Vec<usize>,
    pub b: CycMatrix,
    pub c: CycMatrix,
    pub g: CycMatrix,
    pub b_rescaled: CycMatrix,
    pub c_rescaled: CycMatrix,
    pub g_rescaled: CycMatrix,
    pub b_unfolded: IntMatrix,
    pub c_unfolded: IntMatrix,
    pub g_unfolded: IntMatrix,
    pub b_doubled: IntMatrix,
    pub c_doubled: IntMatrix,
    pub g_doubled: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesseractFailure {
    pub word: Vec<usize>,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TesseractReport {
    pub ty: String,
    pub word: Vec<usize>,
    pub nodes_checked: usize,
    pub failures: Vec<TesseractFailure>,
}

impl TesseractReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Block data of a doubled C-matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub word: Vec<usize>,
    /// hat coordinates of r_[i][j], row-major over (i, j)
    pub elements: Vec<Option<Vec<i64>>>,
    pub sign_coherent: bool,
    pub commuting: bool,
    pub mutation_formula: bool,
}

impl BlockReport {
    pub fn passed(&self) -> bool {
        self.elements.iter().all(Option::is_some) && self.sign_coherent && self.commuting && self.mutation_formula
    }
}

/// Summary over the finite exchange pattern of I2(2n).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub distinct_seeds: usize,
    pub c_vectors_are_roots: bool,
    pub rescaled_unit_length: bool,
    pub sign_coherent: bool,
}

/// Triangle r₀'P₀ ⊕ r₁'P₁ → r₀P₀ ⊕ r₁P₁ → X of a folded g-vector (hat coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GTriangle {
    pub r0: Vec<i64>,
    pub r0_prime: Vec<i64>,
    pub r1: Vec<i64>,
    pub r1_prime: Vec<i64>,
    pub g: (Cyc, Cyc),
}

pub struct TropicalModel {
    pub act: ActionModel,
    pub doubled: Folding,
    block_cache: Mutex<HashMap<Vec<i64>, Option<Vec<i64>>>>,
    node_cache: Mutex<HashMap<Vec<usize>, TesseractNode>>,
    check_cache: Mutex<HashMap<(Vec<usize>, Option<usize>), Vec<(String, String)>>>,
}

fn int_sign(m: &IntMatrix) -> i64 {
    m.coherent_sign().map_or(0, i64::from)
}

impl TropicalModel {
    pub fn new(ty: FoldingType) -> Result<Self, TropicalError> {
        let act = ActionModel::new(ty)?;
        let doubled = build_doubled(ty)?;
        Ok(TropicalModel {
            act,
            doubled,
            block_cache: Mutex::default(),
            node_cache: Mutex::default(),
            check_cache: Mutex::default(),
        })
    }

    pub fn ty(&self) -> FoldingType {
        self.act.ty()
    }

    pub fn folding(&self) -> &Folding {
        &self.act.ar.folding
    }

    fn nv(&self) -> usize {
        self.folding().len()
    }

    /// P = diag(μ0, μ1) and its inverse.
    fn p_pair(&self) -> (CycMatrix, CycMatrix) {
        let mu = &self.folding().valuation;
        let p = Matrix::diag(mu);
        let one = RealCycNumber::from_int(&self.folding().ctx, 1);
        let pinv = Matrix::diag(&[&one / &mu[0], &one / &mu[1]]);
        (p, pinv)
    }

    pub fn project_cmatrix(&self, m: &IntMatrix, mode: ProjectionMode) -> Result<CycMatrix, TropicalError> {
        match mode {
            ProjectionMode::Double => project_matrix(&self.doubled, m, false),
            ProjectionMode::DoubleTranspose => project_matrix(&self.doubled, m, true),
            ProjectionMode::Single => project_matrix(self.folding(), m, false),
            ProjectionMode::SingleTranspose => project_matrix(self.folding(), m, true),
        }
    }

    /// Block (i, j) of a doubled-indexed matrix, indexed by the vertices of Δ.
    pub fn block(&self, m: &IntMatrix, i: usize, j: usize) -> IntMatrix {
        let n = self.nv();
        let rows: Vec<usize> = (i * n..(i + 1) * n).collect();
        let cols: Vec<usize> = (j * n..(j + 1) * n).collect();
        m.submatrix(&rows, &cols)
    }

    /// r with vertex representation equal to `block`, if there is one.
    pub fn recognize_rep(&self, block: &IntMatrix) -> Option<RingElt> {
        let n = self.nv();
        if block.rows() != n || block.cols() != n {
            return None;
        }
        let key: Vec<i64> = block.to_rows().concat();
        if let Some(hit) = self.block_cache.lock().expect("cache lock").get(&key) {
            return hit.clone().map(|c| RingElt::new(self.ty(), c));
        }
        let d = self.act.ring.dim();
        let cols: Vec<Vec<i64>> = (0..d).map(|l| self.act.basis_rep(l).to_rows().concat()).collect();
        let found = solve_integer(&cols, &key).map(|sol| {
            if sol.kernel.is_empty() {
                sol.particular.clone()
            } else {
                shortest_representative(&sol)
            }
        });
        let found = found.filter(|c| self.act.rep(c) == *block);
        self.block_cache.lock().expect("cache lock").insert(key, found.clone());
        found.map(|c| RingElt::new(self.ty(), c))
    }

    /// Block structure of a doubled C-matrix (`prev`, `b_prev`, `k` describe the
    /// mutation that produced it, if any).
    pub fn block_report(
        &self,
        word: &[usize],
        c: &IntMatrix,
        prev: Option<(&IntMatrix, &IntMatrix, usize)>,
    ) -> BlockReport {
        let blocks: Vec<IntMatrix> =
            (0..4).map(|ij| self.block(c, ij / 2, ij % 2)).collect();
        let elements: Vec<Option<Vec<i64>>> = blocks
            .iter()
            .map(|blk| {
                self.recognize_rep(blk).and_then(|r| {
                    let coherent = r.coords.iter().all(|&x| x >= 0) || r.coords.iter().all(|&x| x <= 0);
                    coherent.then_some(r.coords)
                })
            })
            .collect();
        let sign_coherent = blocks.iter().all(|b| b.is_sign_coherent());
        let commuting = blocks
            .iter()
            .all(|x| blocks.iter().all(|y| x.mul(y) == y.mul(x)));
        let mutation_formula = match prev {
            None => true,
            Some((c0, b0, k)) => self.block_mutation(c0, b0, k) == *c,
        };
        BlockReport { word: word.to_vec(), elements, sign_coherent, commuting, mutation_formula }
    }

    /// C'_[i][j] = -C_[i][k] if j = k, else C_[i][j] + sgn(C_[i][k]) [C_[i][k] B_[k][j]]₊.
    pub fn block_mutation(&self, c: &IntMatrix, b: &IntMatrix, k: usize) -> IntMatrix {
        let n = self.nv();
        let mut out = IntMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 {
            let cik = self.block(c, i, k);
            let s = int_sign(&cik);
            for j in 0..2 {
                let blk = if j == k {
                    cik.neg()
                } else {
                    let prod = cik.mul(&self.block(b, k, j)).map(|x| (*x).max(0));
                    self.block(c, i, j).add(&prod.scale(&s))
                };
                out.set_block(i * n, j * n, &blk);
            }
        }
        out
    }

    pub fn initial_node(&self) -> Result<TesseractNode, TropicalError> {
        let ctx = &self.folding().ctx;
        let two = Matrix::<Cyc>::identity(2);
        let n = self.nv();
        Ok(TesseractNode {
            word: Vec::new(),
            b: standard_b(ctx),
            c: two.clone(),
            g: two.clone(),
            b_rescaled: rescaled_b(ctx),
            c_rescaled: two.clone(),
            g_rescaled: two,
            b_unfolded: self.folding().b.clone(),
            c_unfolded: IntMatrix::identity(n),
            g_unfolded: IntMatrix::identity(n),
            b_doubled: self.doubled.b.clone(),
            c_doubled: IntMatrix::identity(2 * n),
            g_doubled: IntMatrix::identity(2 * n),
        })
    }

    /// μ_k in every layer; composite mutation upstairs.
    pub fn step(&self, t: &TesseractNode, k: usize) -> Result<TesseractNode, TropicalError> {
        if k > 1 {
            return Err(TropicalError::BadIndex(k));
        }
        let std = TropicalSeed { word: t.word.clone(), b: t.b.clone(), c: t.c.clone() }.mutate(k)?;
        let res = TropicalSeed { word: t.word.clone(), b: t.b_rescaled.clone(), c: t.c_rescaled.clone() }.mutate(k)?;
        let del = TropicalSeed { word: t.word.clone(), b: t.b_unfolded.clone(), c: t.c_unfolded.clone() }
            .mutate_block(&self.folding().blocks[k], k)?;
        let dbl = TropicalSeed { word: t.word.clone(), b: t.b_doubled.clone(), c: t.c_doubled.clone() }
            .mutate_block(&self.doubled.blocks[k], k)?;
        debug_assert_eq!(del.b, composite_mutate(&t.b_unfolded, &self.folding().blocks[k])?);
        Ok(TesseractNode {
            word: std.word.clone(),
            g: g_matrix(&std.c)?,
            b: std.b,
            c: std.c,
            g_rescaled: g_matrix(&res.c)?,
            b_rescaled: res.b,
            c_rescaled: res.c,
            g_unfolded: g_matrix(&del.c)?,
            b_unfolded: del.b,
            c_unfolded: del.c,
            g_doubled: g_matrix(&dbl.c)?,
            b_doubled: dbl.b,
            c_doubled: dbl.c,
        })
    }

    /// Nodes after each prefix of `word` (the empty prefix first).
    pub fn walk(&self, word: &[usize]) -> Result<Vec<TesseractNode>, TropicalError> {
        let mut nodes = vec![self.initial_node()?];
        for &k in word {
            let next = self.step(nodes.last().expect("nonempty"), k)?;
            nodes.push(next);
        }
        Ok(nodes)
    }

    /// Every face of the tesseract at one node.
    fn node_failures(&self, t: &TesseractNode) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut check = |name: &str, ok: bool, detail: &dyn Fn() -> String| {
            if !ok {
                out.push((name.to_string(), detail()));
            }
        };
        let (p, pinv) = self.p_pair();
        let f = self.folding();
        let id2 = Matrix::<Cyc>::identity(2);

        let c_res = p.mul(&t.c).mul(&pinv);
        check("rescale C", c_res == t.c_rescaled, &|| format!("{:?} vs {:?}", c_res, t.c_rescaled));
        let g_res = pinv.mul(&t.g).mul(&p);
        check("rescale G", g_res == t.g_rescaled, &|| format!("{:?} vs {:?}", g_res, t.g_rescaled));
        let b_res = p.mul(&t.b).mul(&pinv);
        check("rescale B", b_res == t.b_rescaled, &|| format!("{:?}", b_res));

        let proj = |m: &IntMatrix, mode| self.project_cmatrix(m, mode).expect("dimensions match");
        let d_c = proj(&t.c_unfolded, ProjectionMode::Single);
        check("d_F(C^Δ) = C", d_c == t.c, &|| format!("{:?} vs {:?}", d_c, t.c));
        let dd_c = proj(&t.c_doubled, ProjectionMode::Double);
        check("d_F̄̄(C̄̄) = C⃗", dd_c == t.c_rescaled, &|| format!("{:?} vs {:?}", dd_c, t.c_rescaled));
        let d_g = proj(&t.g_unfolded, ProjectionMode::SingleTranspose);
        check("d_Fᵀ(G^Δ) = G", d_g == t.g, &|| format!("{:?} vs {:?}", d_g, t.g));
        let dd_g = proj(&t.g_doubled, ProjectionMode::DoubleTranspose);
        check("d_F̄̄ᵀ(Ḡ̄) = G⃗", dd_g == t.g_rescaled, &|| format!("{:?} vs {:?}", dd_g, t.g_rescaled));

        let rc = restrict_to_q(f, &t.c_doubled);
        check("ΛC̄̄Θ = C^Δ", rc == t.c_unfolded, &|| format!("{:?}", rc));
        let rg = restrict_to_q(f, &t.g_doubled);
        check("ΛḠ̄Θ = G^Δ", rg == t.g_unfolded, &|| format!("{:?}", rg));
        let star = pinv.mul(&dd_c).mul(&p);
        let lhs = proj(&rc, ProjectionMode::Single);
        check("d_F(ΛC̄̄Θ) = P⁻¹d_F̄̄(C̄̄)P", lhs == star, &|| format!("{:?} vs {:?}", lhs, star));
        let bd = double_matrix(f, &t.b_unfolded);
        check("B̄̄ = V(B^Δ ⊕ B^Δᵀ)V⁻¹", bd == t.b_doubled, &|| format!("{:?}", bd));

        check("G Cᵀ = I", t.g.mul(&t.c.transpose()) == id2, &|| format!("{:?}", t.g));
        check("G⃗ C⃗ᵀ = I", t.g_rescaled.mul(&t.c_rescaled.transpose()) == id2, &|| format!("{:?}", t.g_rescaled));
        let n = self.nv();
        check(
            "G^Δ C^Δᵀ = I",
            t.g_unfolded.mul(&t.c_unfolded.transpose()) == IntMatrix::identity(n),
            &|| format!("{:?}", t.g_unfolded),
        );
        check(
            "Ḡ̄ C̄̄ᵀ = I",
            t.g_doubled.mul(&t.c_doubled.transpose()) == IntMatrix::identity(2 * n),
            &|| format!("{:?}", t.g_doubled),
        );
        let det = t.c.determinant();
        let one = RealCycNumber::from_int(&f.ctx, 1);
        check("det C = ±1", det == one || det == -one.clone(), &|| det.to_string());
        let det_d = t.c_unfolded.to_cyc().determinant();
        check("det C^Δ = ±1", det_d == one || det_d == -one.clone(), &|| det_d.to_string());

        check("origami Δ", f.is_origami_at(&t.b_unfolded, &t.b), &|| format!("{:?}", t.b_unfolded));
        check("origami doubled", self.doubled.is_origami_at(&t.b_doubled, &t.b_rescaled), &|| {
            format!("{:?}", t.b_doubled)
        });
        let cols_coherent = |m: &CycMatrix| (0..m.cols()).all(|j| Matrix::from_rows(vec![m.col(j)]).is_sign_coherent());
        let icols_coherent = |m: &IntMatrix| (0..m.cols()).all(|j| Matrix::from_rows(vec![m.col(j)]).is_sign_coherent());
        check("sign-coherence C", cols_coherent(&t.c) && cols_coherent(&t.c_rescaled), &|| format!("{:?}", t.c));
        check(
            "sign-coherence C^Δ, C̄̄",
            icols_coherent(&t.c_unfolded) && icols_coherent(&t.c_doubled),
            &|| format!("{:?}", t.c_unfolded),
        );
        out
    }

    /// Seed at a reduced word, memoized.
    fn cached_node(&self, reduced: &[usize]) -> Result<TesseractNode, TropicalError> {
        if let Some(t) = self.node_cache.lock().expect("cache lock").get(reduced) {
            return Ok(t.clone());
        }
        let t = match reduced.split_last() {
            None => self.initial_node()?,
            Some((&k, rest)) => self.step(&self.cached_node(rest)?, k)?,
        };
        self.node_cache.lock().expect("cache lock").insert(reduced.to_vec(), t.clone());
        Ok(t)
    }

    /// Node checks at `reduced` plus the edge checks of μ_k out of it.
    fn cached_checks(&self, reduced: &[usize], k: Option<usize>) -> Result<Vec<(String, String)>, TropicalError> {
        let key = (reduced.to_vec(), k);
        if let Some(f) = self.check_cache.lock().expect("cache lock").get(&key) {
            return Ok(f.clone());
        }
        let s = self.cached_node(reduced)?;
        let fails = match k {
            None => self.node_failures(&s),
            Some(k) => {
                let mut fails = Vec::new();
                let t = self.step(&s, k)?;
                let fz = g_mutate_explicit(&s.g, &s.c, &s.b, k);
                if fz != t.g {
                    fails.push(("μ_k on G (explicit formula)".into(), format!("{:?} vs {:?}", fz, t.g)));
                }
                let back = self.step(&t, k)?;
                if back.c != s.c || back.c_doubled != s.c_doubled || back.c_unfolded != s.c_unfolded {
                    fails.push(("μ_k involution".into(), format!("{:?}", back.word)));
                }
                let blocks = self.block_report(&t.word, &t.c_doubled, Some((&s.c_doubled, &s.b_doubled, k)));
                if !blocks.passed() {
                    fails.push(("doubled blocks".into(), format!("{blocks:?}")));
                }
                fails
            }
        };
        self.check_cache.lock().expect("cache lock").insert(key, fails.clone());
        Ok(fails)
    }

    /// Runs every tesseract check after each prefix of `word`. Seeds depend
    /// only on the word with adjacent repeats cancelled, which is sound
    /// because the involution μ_k μ_k = id is itself checked on every edge.
    pub fn tesseract_check(&self, word: &[usize]) -> Result<TesseractReport, TropicalError> {
        let mut report = TesseractReport { ty: self.ty().to_string(), word: word.to_vec(), ..Default::default() };
        let mut reduced: Vec<usize> = Vec::new();
        for i in 0..=word.len() {
            report.nodes_checked += 1;
            let mut fails = self.cached_checks(&reduced, None)?;
            if let Some(&k) = word.get(i) {
                fails.extend(self.cached_checks(&reduced, Some(k))?);
                if reduced.last() == Some(&k) {
                    reduced.pop();
                } else {
                    reduced.push(k);
                }
            }
            report.failures.extend(fails.into_iter().map(|(check, detail)| TesseractFailure {
                word: word[..i].to_vec(),
                check,
                detail,
            }));
        }
        Ok(report)
    }

    /// Block reports after each prefix of `word`.
    pub fn block_check(&self, word: &[usize]) -> Result<Vec<BlockReport>, TropicalError> {
        let nodes = self.walk(word)?;
        Ok(nodes
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let prev = (i > 0).then(|| (&nodes[i - 1].c_doubled, &nodes[i - 1].b_doubled, word[i - 1]));
                self.block_report(&t.word, &t.c_doubled, prev)
            })
            .collect())
    }

    /// The alternating walk 0,1,0,1,... of the given length.
    pub fn alternating(len: usize, start: usize) -> Vec<usize> {
        (0..len).map(|i| (start + i) % 2).collect()
    }

    /// c-vectors along both alternating walks of length 4n+4.
    pub fn pattern_report(&self) -> Result<PatternReport, TropicalError> {
        let n = self.folding().n();
        let roots = self.act.ar.positive_roots();
        let ctx = &self.folding().ctx;
        let theta = RealCycNumber::theta(ctx);
        let one = RealCycNumber::from_int(ctx, 1);
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut roots_ok = true;
        let mut unit_ok = true;
        let mut coherent = true;
        for start in 0..2 {
            for t in self.walk(&Self::alternating(4 * n + 4, start))? {
                seen.insert(format!("{:?}", t.c));
                for j in 0..2 {
                    let (x, y) = (t.c.get(0, j).clone(), t.c.get(1, j).clone());
                    let pos = roots.iter().any(|r| r.0 == x && r.1 == y);
                    let neg = roots.iter().any(|r| r.0 == -x.clone() && r.1 == -y.clone());
                    roots_ok &= pos || neg;
                    coherent &= Matrix::from_rows(vec![t.c.col(j)]).is_sign_coherent();
                    let (a, b) = (t.c_rescaled.get(0, j), t.c_rescaled.get(1, j));
                    let len = &(&(a * a) + &(b * b)) - &(&(a * b) * &theta);
                    unit_ok &= len == one;
                }
            }
        }
        Ok(PatternReport {
            distinct_seeds: seen.len(),
            c_vectors_are_roots: roots_ok,
            rescaled_unit_length: unit_ok,
            sign_coherent: coherent,
        })
    }

    /// Module with the given composition factors, as a cluster-layer object.
    pub fn object_by_factors(&self, names: &[&str]) -> Result<Indec, TropicalError> {
        let ar = &self.act.ar;
        let mut d = vec![0; ar.nv()];
        for v in names {
            d[ar.vertex_by_name(v).ok_or_else(|| ArError::Parse(v.to_string()))?] += 1;
        }
        let x = ar.find_by_dims(&d).ok_or_else(|| ArError::NotInCategory(format!("{names:?}")))?;
        Ok(x.with_layer(Layer::Cluster))
    }

    /// The ten objects of the worked A7 and D5 examples, in walk order.
    pub fn appendix_objects(&self) -> Result<Vec<Indec>, TropicalError> {
        let lists: [&[&str]; 8] = match self.ty() {
            FoldingType::A(4) => [
                &["1-"],
                &["0-", "1-"],
                &["2-", "0-", "3", "1-"],
                &["2-", "3"],
                &["2+", "2-", "1+", "3"],
                &["2+", "1+"],
                &["0+", "2+", "1+"],
                &["0+"],
            ],
            FoldingType::D(4) => [
                &["1"],
                &["0", "1"],
                &["0", "2", "1", "3+", "3-"],
                &["2", "3+", "3-"],
                &["2", "2", "1", "3+", "3-"],
                &["2", "1"],
                &["0", "2", "1"],
                &["0"],
            ],
            ty => return Err(ArError::NotInCategory(format!("no worked example for {ty}")).into()),
        };
        let mut out: Vec<Indec> = lists.iter().map(|l| self.object_by_factors(l)).collect::<Result<_, _>>()?;
        for k in 0..2 {
            out.push(Indec { shift: 1, ..out[k] });
        }
        Ok(out)
    }

    /// Integer presentation P¹ → P⁰ → X as multiplicity vectors indexed by the
    /// vertex j of P(j); ΣP(j) has the presentation P(j) → 0.
    pub fn presentation(&self, x: &Indec) -> Result<(Vec<i64>, Vec<i64>), TropicalError> {
        let ar = &self.act.ar;
        let nv = ar.nv();
        if x.layer == Layer::Cluster && x.shift == 1 {
            let mut p1 = vec![0; nv];
            p1[ar.sigma[x.vertex]] = 1;
            return Ok((vec![0; nv], p1));
        }
        if x.shift != 0 {
            return Err(ArError::Unsupported(x.layer).into());
        }
        let m = Indec { layer: Layer::Module, shift: 0, ..*x };
        let top: Vec<i64> = (0..nv)
            .map(|i| ar.hom_dim(&m, &ar.simple(i)))
            .collect::<Result<_, _>>()?;
        let p0 = ar.pmat.mul_vec(&top);
        let d = ar.dim_vector(&m)?;
        let diff: Vec<i64> = p0.iter().zip(&d).map(|(a, b)| a - b).collect();
        let pinv = ar.pmat.unimodular_inverse().expect("unitriangular");
        let k = pinv.mul_vec(&diff);
        debug_assert!(k.iter().all(|&v| v >= 0));
        Ok((top, k))
    }

    /// Integer g-vector of X.
    pub fn integer_g_vector(&self, x: &Indec) -> Result<Vec<i64>, TropicalError> {
        let (p0, p1) = self.presentation(x)?;
        Ok(p0.iter().zip(&p1).map(|(a, b)| a - b).collect())
    }

    /// Folded g-vector by projecting the integer g-vector.
    pub fn folded_g_via_projection(&self, x: &Indec) -> Result<(Cyc, Cyc), TropicalError> {
        let g = self.integer_g_vector(x)?;
        let f = self.folding();
        let part = |cls: usize| {
            let mut s = RealCycNumber::from_int(&f.ctx, 0);
            for &v in &f.blocks[cls] {
                if g[v] != 0 {
                    s = &s + &(&f.weights[v] * &RealCycNumber::from_int(&f.ctx, g[v]));
                }
            }
            &s / &f.valuation[cls]
        };
        Ok((part(1), part(0)))
    }

    /// Solves r·P_f = Σ p_j P(j) over the projectives P(j) in the column of P_f.
    fn label_equation(&self, cls: usize, p: &[i64]) -> Result<Vec<i64>, TropicalError> {
        let ar = &self.act.ar;
        let nv = ar.nv();
        let anchor = self.folding().anchors[cls];
        let mut target = vec![0i64; nv];
        for (j, &k) in p.iter().enumerate() {
            let row = ar.row_of_projective(j);
            if ar.image(row) == cls {
                target[row] += k;
            }
        }
        let d = self.act.ring.dim();
        let cols: Vec<Vec<i64>> = (0..d).map(|l| self.act.basis_rep(l).col(anchor)).collect();
        let sol = solve_integer(&cols, &target)
            .ok_or_else(|| TropicalError::NoPresentation(format!("{target:?}")))?;
        Ok(if sol.kernel.is_empty() { sol.particular.clone() } else { shortest_representative(&sol) })
    }

    /// Folded g-vector (ρ(r₁ − r₁'), ρ(r₀ − r₀')) through the label equation,
    /// relative to the projectives in the rows of I(a₀) and I(a₁).
    pub fn folded_g_triangle(&self, x: &Indec) -> Result<GTriangle, TropicalError> {
        let ar = &self.act.ar;
        let one = RealCycNumber::from_int(&self.folding().ctx, 1);
        let w = ar.row_weight(x.vertex);
        if w != one {
            return Err(TropicalError::WeightNotOne(ar.name(x), w.to_string()));
        }
        let (p0, p1) = self.presentation(x)?;
        let r0 = self.label_equation(0, &p0)?;
        let r0p = self.label_equation(0, &p1)?;
        let r1 = self.label_equation(1, &p0)?;
        let r1p = self.label_equation(1, &p1)?;
        let ring = &self.act.ring;
        let g = (
            &ring.rho_coords(&r1) - &ring.rho_coords(&r1p),
            &ring.rho_coords(&r0) - &ring.rho_coords(&r0p),
        );
        Ok(GTriangle { r0, r0_prime: r0p, r1, r1_prime: r1p, g })
    }

    pub fn folded_g_vector(&self, x: &Indec) -> Result<(Cyc, Cyc), TropicalError> {
        Ok(self.folded_g_triangle(x)?.g)
    }
}

/// `count` random composite words of length at most `max_len`.
pub fn random_words(seed: u64, count: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len).map(|_| rng.gen_range(0..2)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::cyc_context;

    fn model(s: &str) -> TropicalModel {
        TropicalModel::new(s.parse().unwrap()).unwrap()
    }

    /// a + b√2 in Q(2cos π/8), with √2 = θ² − 2.
    fn q2(a: i64, b: i64) -> Cyc {
        let ctx = cyc_context(4).unwrap();
        let t = RealCycNumber::theta(&ctx);
        let s2 = &(&t * &t) - &RealCycNumber::from_int(&ctx, 2);
        &RealCycNumber::from_int(&ctx, a) + &(&s2 * &RealCycNumber::from_int(&ctx, b))
    }

    #[test]
    fn i2_8_first_mutation() {
        let t = model("A7");
        let nodes = t.walk(&[0]).unwrap();
        let c = &nodes[1].c;
        assert_eq!(c, &Matrix::from_rows(vec![vec![q2(-1, 0), q2(2, 1)], vec![q2(0, 0), q2(1, 0)]]));
        assert_eq!(nodes[1].g, Matrix::from_rows(vec![vec![q2(-1, 0), q2(0, 0)], vec![q2(2, 1), q2(1, 0)]]));
        let d = t.project_cmatrix(&nodes[1].c_unfolded, ProjectionMode::Single).unwrap();
        assert_eq!(&d, c);
    }

    #[test]
    fn mutation_is_an_involution() {
        let t = model("D5");
        let nodes = t.walk(&[1, 0, 0, 1]).unwrap();
        assert_eq!(nodes[4].c_doubled, nodes[0].c_doubled);
        assert_eq!(nodes[4].c, nodes[0].c);
        assert_eq!(nodes[3].c_unfolded, nodes[1].c_unfolded);
    }

    #[test]
    fn incoherent_column_is_rejected() {
        let seed = TropicalSeed {
            word: vec![],
            b: IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]),
            c: IntMatrix::from_rows(vec![vec![1, 0], vec![-1, 1]]),
        };
        assert!(matches!(c_mutate(&seed, 0), Err(TropicalError::SignIncoherent { column: 0, .. })));
        assert!(c_mutate(&seed, 1).is_ok());
    }

    #[test]
    fn projection_of_identity() {
        for ty in FoldingType::catalogue() {
            let t = TropicalModel::new(ty).unwrap();
            let n = t.nv();
            let id2 = Matrix::<Cyc>::identity(2);
            assert_eq!(t.project_cmatrix(&IntMatrix::identity(2 * n), ProjectionMode::Double).unwrap(), id2);
            assert_eq!(t.project_cmatrix(&IntMatrix::identity(n), ProjectionMode::Single).unwrap(), id2);
            assert!(t.project_cmatrix(&IntMatrix::identity(n + 1), ProjectionMode::Single).is_err());
        }
    }

    #[test]
    fn recognize_trivial_blocks() {
        let t = model("E6");
        let n = t.nv();
        assert_eq!(t.recognize_rep(&IntMatrix::identity(n)).unwrap().coords, t.act.ring.one());
        assert!(t.recognize_rep(&IntMatrix::zeros(n, n)).unwrap().is_zero());
        let mut odd = IntMatrix::zeros(n, n);
        odd.set(0, 1, 1);
        assert!(t.recognize_rep(&odd).is_none());
    }

    #[test]
    fn a7_blocks_after_010() {
        let t = model("A7");
        let reps = t.block_check(&[0, 1, 0]).unwrap();
        assert!(reps.iter().all(BlockReport::passed), "{reps:?}");
    }

    #[test]
    fn tesseract_commutes_along_random_words() {
        let words = random_words(7, 500, 10);
        for ty in FoldingType::catalogue() {
            let t = TropicalModel::new(ty).unwrap();
            for w in &words {
                let r = t.tesseract_check(w).unwrap();
                assert!(r.passed(), "{ty} {w:?}: {:?}", r.failures);
            }
        }
    }

    #[test]
    fn finite_exchange_pattern() {
        for ty in FoldingType::catalogue() {
            let t = TropicalModel::new(ty).unwrap();
            let r = t.pattern_report().unwrap();
            assert_eq!(r.distinct_seeds, 2 * t.folding().n() + 2, "{ty}");
            assert!(r.c_vectors_are_roots && r.rescaled_unit_length && r.sign_coherent, "{ty} {r:?}");
        }
    }

    fn golden_values() -> Vec<(Cyc, Cyc)> {
        vec![
            (q2(1, 0), q2(0, 0)),
            (q2(0, 0), q2(1, 0)),
            (q2(-1, 0), q2(2, 1)),
            (q2(-1, 0), q2(1, 1)),
            (q2(-1, -1), q2(2, 2)),
            (q2(0, -1), q2(1, 1)),
            (q2(-1, -1), q2(2, 1)),
            (q2(-1, 0), q2(1, 0)),
            (q2(-1, 0), q2(0, 0)),
            (q2(0, 0), q2(-1, 0)),
        ]
    }

    #[test]
    fn a7_folded_g_vectors() {
        let t = model("A7");
        for (x, want) in t.appendix_objects().unwrap().iter().zip(golden_values()) {
            assert_eq!(t.folded_g_vector(x).unwrap(), want, "{}", t.act.ar.dims_name(x));
            assert_eq!(t.folded_g_via_projection(x).unwrap(), want, "{}", t.act.ar.dims_name(x));
        }
    }

    #[test]
    fn d5_folded_g_vectors() {
        let t = model("D5");
        for (x, want) in t.appendix_objects().unwrap().iter().zip(golden_values()) {
            assert_eq!(t.folded_g_vector(x).unwrap(), want, "{}", t.act.ar.dims_name(x));
            assert_eq!(t.folded_g_via_projection(x).unwrap(), want, "{}", t.act.ar.dims_name(x));
        }
    }

    #[test]
    fn heavy_rows_are_rejected() {
        let t = model("D5");
        let heavy = (0..t.nv()).find(|&i| t.act.ar.row_weight(i) != RealCycNumber::from_int(&t.folding().ctx, 1));
        let x = Indec::module(heavy.unwrap(), 0).with_layer(Layer::Cluster);
        assert!(matches!(t.folded_g_vector(&x), Err(TropicalError::WeightNotOne(..))));
        assert!(t.folded_g_via_projection(&x).is_ok());
    }

    fn pair_key(a: &(Cyc, Cyc), b: &(Cyc, Cyc)) -> Vec<String> {
        let mut v = vec![format!("{a:?}"), format!("{b:?}")];
        v.sort();
        v
    }

    fn walk_pairs(t: &TropicalModel) -> BTreeSet<Vec<String>> {
        let n = t.folding().n();
        t.walk(&TropicalModel::alternating(2 * n + 2, 0))
            .unwrap()
            .iter()
            .map(|nd| {
                let col = |j: usize| (nd.g.get(0, j).clone(), nd.g.get(1, j).clone());
                pair_key(&col(0), &col(1))
            })
            .collect()
    }

    #[test]
    fn golden_neighbours_are_the_g_matrices() {
        for name in ["A7", "D5"] {
            let t = model(name);
            let xs = t.appendix_objects().unwrap();
            let mut pairs = BTreeSet::new();
            for i in 0..xs.len() {
                let (x, y) = (&xs[i], &xs[(i + 1) % xs.len()]);
                assert_eq!(t.act.ar.ext1_dim(x, y).unwrap(), 0, "{name} {i}");
                pairs.insert(pair_key(&t.folded_g_vector(x).unwrap(), &t.folded_g_vector(y).unwrap()));
            }
            assert_eq!(pairs, walk_pairs(&t), "{name}");
        }
    }

    #[test]
    fn g_matrices_of_tilting_pairs() {
        use crate::tilting::TiltingModel;
        let t = model("A7");
        let gamma = t.act.gamma_sets(Layer::Cluster).remove(0);
        let tm = TiltingModel::new(&t.act, gamma).unwrap();
        let from_tilting: BTreeSet<Vec<String>> = tm
            .enumerate_tilting()
            .unwrap()
            .iter()
            .map(|obj| {
                let g: Vec<(Cyc, Cyc)> = obj.summands.iter().map(|x| t.folded_g_vector(x).unwrap()).collect();
                pair_key(&g[0], &g[1])
            })
            .collect();
        assert_eq!(from_tilting, walk_pairs(&t));
    }

    #[test]
    fn report_json_round_trip() {
        let t = model("A3");
        let r = t.tesseract_check(&[0, 1]).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<TesseractReport>(&s).unwrap(), r);
        let nodes = t.walk(&[1]).unwrap();
        let s = serde_json::to_string(&nodes).unwrap();
        assert_eq!(serde_json::from_str::<Vec<TesseractNode>>(&s).unwrap(), nodes);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn types() -> impl Strategy<Value = FoldingType> {
            prop::sample::select(FoldingType::catalogue())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn mutating_twice_is_the_identity(ty in types(), word in prop::collection::vec(0usize..2, 0..8), k in 0usize..2) {
                let t = TropicalModel::new(ty).unwrap();
                let mut w = word.clone();
                w.extend([k, k]);
                let nodes = t.walk(&w).unwrap();
                let (a, b) = (&nodes[word.len()], &nodes[word.len() + 2]);
                prop_assert_eq!(&a.c, &b.c);
                prop_assert_eq!(&a.c_unfolded, &b.c_unfolded);
                prop_assert_eq!(&a.g_doubled, &b.g_doubled);
            }

            #[test]
            fn g_is_dual_to_c(ty in types(), word in prop::collection::vec(0usize..2, 0..8)) {
                let t = TropicalModel::new(ty).unwrap();
                let last = t.walk(&word).unwrap().pop().unwrap();
                let n = last.c_unfolded.rows();
                prop_assert_eq!(last.c_unfolded.transpose().mul(&last.g_unfolded), IntMatrix::identity(n));
                prop_assert_eq!(last.c.transpose().mul(&last.g), Matrix::<Cyc>::identity(2));
            }
        }
    }
}
