//! Exchange matrices, mutation, and the unfoldings of I2(2n).

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algnum::{CycContext, RealCycNumber};
use crate::chebrings::{ring_data, FoldingType, RingData, RingError};
use crate::scalar::{Matrix, Scalar};
use crate::{Cyc, CycMatrix, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("vertex {0} out of range")]
    UnknownVertex(usize),
    #[error("unknown vertex name {0}")]
    UnknownVertexName(String),
    #[error("block {0} is not a set of pairwise commuting vertices")]
    NonCommutingBlock(usize),
    #[error("matrix is not sign-skew-symmetric")]
    NotSkewSymmetrizable,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Matrix mutation at k:
/// b'_ij = -b_ij if k ∈ {i, j}, else b_ij + sgn(b_ik) [b_ik b_kj]_+.
pub fn mutate<S: Scalar>(b: &Matrix<S>, k: usize) -> Result<Matrix<S>, QuiverError> {
    if k >= b.rows() {
        return Err(QuiverError::UnknownVertex(k));
    }
    Ok(Matrix::from_fn(b.rows(), b.cols(), |i, j| {
        let x = b.get(i, j).clone();
        if i == k || j == k {
            return -x;
        }
        let bik = b.get(i, k);
        let p = (bik.clone() * b.get(k, j).clone()).pos_part();
        match bik.signum_exact() {
            1 => x + p,
            -1 => x - p,
            _ => x,
        }
    }))
}

/// Sequential mutation at each vertex of a block of pairwise commuting vertices.
pub fn composite_mutate<S: Scalar>(b: &Matrix<S>, block: &[usize]) -> Result<Matrix<S>, QuiverError> {
    check_block(b, block)?;
    block.iter().try_fold(b.clone(), |m, &k| mutate(&m, k))
}

pub(crate) fn check_block<S: Scalar>(b: &Matrix<S>, block: &[usize]) -> Result<(), QuiverError> {
    for (x, &i) in block.iter().enumerate() {
        if i >= b.rows() {
            return Err(QuiverError::UnknownVertex(i));
        }
        for &j in &block[x + 1..] {
            if !b.get(i, j).is_zero() {
                return Err(QuiverError::NonCommutingBlock(i));
            }
        }
    }
    Ok(())
}

/// Skew-symmetrizer d with d_i b_ij = -d_j b_ji, normalized to d_0 = 1, for a
/// connected sign-skew-symmetric matrix.
pub fn symmetrizer(b: &CycMatrix, ctx: &Arc<CycContext>) -> Result<Vec<Cyc>, QuiverError> {
    if !b.is_sign_skew_symmetric() {
        return Err(QuiverError::NotSkewSymmetrizable);
    }
    let n = b.rows();
    let mut d: Vec<Option<Cyc>> = vec![None; n];
    d[0] = Some(RealCycNumber::from_int(ctx, 1));
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if b.get(i, j).is_zero_exact() {
                continue;
            }
            let dj = &(d[i].as_ref().unwrap() * b.get(i, j)) / &(-b.get(j, i));
            match &d[j] {
                Some(x) if *x != dj => return Err(QuiverError::NotSkewSymmetrizable),
                Some(_) => {}
                None => {
                    d[j] = Some(dj);
                    stack.push(j);
                }
            }
        }
    }
    d.into_iter().map(|x| x.ok_or(QuiverError::NotSkewSymmetrizable)).collect()
}

/// Origami test: W B W^-1 summed over blocks reproduces P B' P^-1 entrywise,
/// and blocks facing a positive folded entry are non-negative.
pub fn is_origami(
    b: &IntMatrix,
    b_folded: &CycMatrix,
    w: &[Cyc],
    p: &[Cyc],
    blocks: &[Vec<usize>],
) -> bool {
    let k = blocks.len();
    for i in 0..k {
        for j in 0..k {
            let target = &(&p[i] * b_folded.get(i, j)) / &p[j];
            let positive = b_folded.get(i, j).sign() > 0;
            for &v in &blocks[j] {
                let mut sum = RealCycNumber::from_int(w[0].context().unwrap(), 0);
                for &u in &blocks[i] {
                    let x = *b.get(u, v);
                    if x == 0 {
                        continue;
                    }
                    if positive && x < 0 {
                        return false;
                    }
                    sum = &sum + &(&(&w[u] * &RealCycNumber::from_int(w[0].context().unwrap(), x)) / &w[v]);
                }
                if sum != target {
                    return false;
                }
            }
        }
    }
    true
}

/// An unfolding of I2(2n) (or its rescaled double).
#[derive(Clone, Debug)]
pub struct Folding {
    pub ty: FoldingType,
    pub doubled: bool,
    pub ctx: Arc<CycContext>,
    pub vertices: Vec<String>,
    pub b: IntMatrix,
    pub weights: Vec<Cyc>,
    /// image[v] ∈ {0, 1}
    pub image: Vec<usize>,
    /// the target 2×2 exchange matrix
    pub target: CycMatrix,
    pub valuation: [Cyc; 2],
    pub blocks: [Vec<usize>; 2],
    pub anchors: [usize; 2],
    /// for doubled foldings: (original vertex, is the Q^op copy)
    pub copies: Vec<(usize, bool)>,
}

/// Standard exchange matrix [[0, θ²], [-1, 0]] of I2(2n).
pub fn standard_b(ctx: &Arc<CycContext>) -> CycMatrix {
    let t = RealCycNumber::theta(ctx);
    let z = RealCycNumber::from_int(ctx, 0);
    Matrix::from_rows(vec![vec![z.clone(), &t * &t], vec![RealCycNumber::from_int(ctx, -1), z]])
}

/// Rescaled exchange matrix [[0, θ], [-θ, 0]].
pub fn rescaled_b(ctx: &Arc<CycContext>) -> CycMatrix {
    let t = RealCycNumber::theta(ctx);
    let z = RealCycNumber::from_int(ctx, 0);
    Matrix::from_rows(vec![vec![z.clone(), t.clone()], vec![-t, z]])
}

/// Bipartition with vertex 0 in class 0.
fn bipartition(adj: &IntMatrix) -> Vec<usize> {
    let n = adj.rows();
    let mut col = vec![usize::MAX; n];
    col[0] = 0;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if *adj.get(i, j) != 0 && col[j] == usize::MAX {
                col[j] = 1 - col[i];
                stack.push(j);
            }
        }
    }
    col
}

impl Folding {
    pub fn ring(&self) -> Arc<RingData> {
        ring_data(self.ty).expect("validated type")
    }

    pub fn n(&self) -> usize {
        self.ty.half_order()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, QuiverError> {
        self.vertices
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| QuiverError::UnknownVertexName(name.to_string()))
    }

    /// Diagonal entries of P.
    pub fn p_diag(&self) -> Vec<Cyc> {
        self.valuation.to_vec()
    }

    /// P B' P^-1.
    pub fn scaled_target(&self) -> CycMatrix {
        let p = &self.valuation;
        Matrix::from_fn(2, 2, |i, j| &(&p[i] * self.target.get(i, j)) / &p[j])
    }

    /// W B W^-1 with B the (possibly mutated) matrix `b`.
    pub fn weighted(&self, b: &IntMatrix) -> CycMatrix {
        Matrix::from_fn(b.rows(), b.cols(), |i, j| {
            let x = *b.get(i, j);
            if x == 0 {
                RealCycNumber::from_int(&self.ctx, 0)
            } else {
                &(&self.weights[i] * &RealCycNumber::from_int(&self.ctx, x)) / &self.weights[j]
            }
        })
    }

    pub fn is_origami_at(&self, b: &IntMatrix, b_folded: &CycMatrix) -> bool {
        is_origami(b, b_folded, &self.weights, &self.valuation, &self.blocks)
    }

    /// Applies a composite word to both the unfolding and the target.
    pub fn mutate_word(&self, word: &[usize]) -> Result<(IntMatrix, CycMatrix), QuiverError> {
        let mut b = self.b.clone();
        let mut t = self.target.clone();
        for &k in word {
            if k > 1 {
                return Err(QuiverError::UnknownVertex(k));
            }
            b = composite_mutate(&b, &self.blocks[k])?;
            t = mutate(&t, k)?;
        }
        Ok((b, t))
    }
}

/// The unfolding of I2(2n) by the bipartite quiver of `ty`.
pub fn build_folding(ty: FoldingType) -> Result<Folding, QuiverError> {
    let ring = ring_data(ty)?;
    let ctx = ring.ctx.clone();
    let adj = ring.adjacency();
    let image = bipartition(&adj);
    let n = adj.rows();
    let b = Matrix::from_fn(n, n, |i, j| {
        let a = *adj.get(i, j);
        if image[i] == 0 {
            a
        } else {
            -a
        }
    });
    let scale = if ty.is_d_family() { 2 } else { 1 };
    let mu0 = RealCycNumber::from_int(&ctx, scale);
    let mu1 = &mu0 * &RealCycNumber::theta(&ctx);
    let anchors = match ty {
        FoldingType::E6 => ["0+", "1+"],
        _ => ["0", "1"],
    };
    let vertices = ring.vertex_names.clone();
    let anchors = [
        vertices.iter().position(|v| v == anchors[0]).unwrap(),
        vertices.iter().position(|v| v == anchors[1]).unwrap(),
    ];
    Ok(Folding {
        ty,
        doubled: false,
        weights: ring.weights(),
        blocks: [
            (0..n).filter(|&v| image[v] == 0).collect(),
            (0..n).filter(|&v| image[v] == 1).collect(),
        ],
        image,
        target: standard_b(&ctx),
        valuation: [mu0, mu1],
        anchors,
        copies: (0..n).map(|v| (v, false)).collect(),
        vertices,
        b,
        ctx,
    })
}

/// Index of the Q-copy and the Q^op-copy of vertex v in the doubled quiver.
pub fn doubled_indices(f: &Folding, v: usize) -> (usize, usize) {
    let n = f.len();
    if f.image[v] == 0 {
        (v, n + v)
    } else {
        (n + v, v)
    }
}

/// The doubled unfolding Q ⊔ Q^op of the rescaled matrix [[0, θ], [-θ, 0]].
pub fn build_doubled(ty: FoldingType) -> Result<Folding, QuiverError> {
    let f = build_folding(ty)?;
    let n = f.len();
    let mut b = IntMatrix::zeros(2 * n, 2 * n);
    for u in 0..n {
        for v in 0..n {
            let (qu, ou) = doubled_indices(&f, u);
            let (qv, ov) = doubled_indices(&f, v);
            b.set(qu, qv, *f.b.get(u, v));
            b.set(ou, ov, *f.b.get(v, u));
        }
    }
    let mut vertices = vec![String::new(); 2 * n];
    let mut copies = vec![(0, false); 2 * n];
    let mut weights = vec![RealCycNumber::from_int(&f.ctx, 0); 2 * n];
    for v in 0..n {
        let (q, o) = doubled_indices(&f, v);
        vertices[q] = f.vertices[v].clone();
        vertices[o] = format!("{}'", f.vertices[v]);
        copies[q] = (v, false);
        copies[o] = (v, true);
        weights[q] = f.weights[v].clone();
        weights[o] = f.weights[v].clone();
    }
    let lambda = f.valuation[0].clone();
    Ok(Folding {
        ty,
        doubled: true,
        ctx: f.ctx.clone(),
        vertices,
        b,
        weights,
        image: (0..2 * n).map(|i| (i >= n) as usize).collect(),
        target: rescaled_b(&f.ctx),
        valuation: [lambda.clone(), lambda],
        blocks: [(0..n).collect(), (n..2 * n).collect()],
        anchors: [doubled_indices(&f, f.anchors[0]).0, doubled_indices(&f, f.anchors[0]).1],
        copies,
    })
}

/// Restriction Λ M Θ of a doubled-indexed matrix to the Q-copy.
pub fn restrict_to_q(f: &Folding, m: &IntMatrix) -> IntMatrix {
    let n = f.len();
    let idx: Vec<usize> = (0..n).map(|v| doubled_indices(f, v).0).collect();
    m.submatrix(&idx, &idx)
}

/// V (M ⊕ M^T) V^-1 in doubled indexing.
pub fn double_matrix(f: &Folding, m: &IntMatrix) -> IntMatrix {
    let n = f.len();
    let mut out = IntMatrix::zeros(2 * n, 2 * n);
    for u in 0..n {
        for v in 0..n {
            let (qu, ou) = doubled_indices(f, u);
            let (qv, ov) = doubled_indices(f, v);
            out.set(qu, qv, *m.get(u, v));
            out.set(ou, ov, *m.get(v, u));
        }
    }
    out
}

/// Result of checking the origami property along composite words.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct UnfoldingReport {
    pub checked: usize,
    pub failures: Vec<Vec<usize>>,
}

/// Checks all reduced composite words (no immediate repeats) up to `depth`.
pub fn verify_unfolding(f: &Folding, depth: usize) -> UnfoldingReport {
    let mut report = UnfoldingReport::default();
    for start in 0..2usize {
        let mut b = f.b.clone();
        let mut t = f.target.clone();
        let mut word = Vec::new();
        if start == 0 {
            report.checked += 1;
            if !f.is_origami_at(&b, &t) {
                report.failures.push(vec![]);
            }
        }
        for step in 0..depth {
            let k = (start + step) % 2;
            word.push(k);
            match (composite_mutate(&b, &f.blocks[k]), mutate(&t, k)) {
                (Ok(nb), Ok(nt)) => {
                    b = nb;
                    t = nt;
                }
                _ => {
                    report.failures.push(word.clone());
                    break;
                }
            }
            report.checked += 1;
            if !f.is_origami_at(&b, &t) {
                report.failures.push(word.clone());
            }
        }
    }
    report
}

/// JSON form of a folding.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuiverJson {
    #[serde(rename = "type")]
    pub ty: FoldingType,
    pub doubled: bool,
    pub vertices: Vec<VertexJson>,
    pub matrix: Vec<Vec<i64>>,
    pub valuation: [Cyc; 2],
    pub target: Vec<Vec<Cyc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexJson {
    pub id: String,
    pub weight: Cyc,
    pub image: usize,
}

impl Folding {
    pub fn to_json(&self) -> QuiverJson {
        QuiverJson {
            ty: self.ty,
            doubled: self.doubled,
            vertices: (0..self.len())
                .map(|v| VertexJson {
                    id: self.vertices[v].clone(),
                    weight: self.weights[v].clone(),
                    image: self.image[v],
                })
                .collect(),
            matrix: self.b.to_rows(),
            valuation: self.valuation.clone(),
            target: self.target.to_rows(),
        }
    }
}
