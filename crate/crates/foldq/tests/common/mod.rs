//! Knitting oracle for the module category of the unfolded quivers.
//!
//! Builds the Auslander-Reiten quiver from path counts and the mesh relations
//! alone, computes Hom with hammock functions, and compares every ordered pair
//! of indecomposables with the library (matched by dimension vector).

use std::collections::HashMap;

use foldq::armodel::{ArModel, Layer};
use foldq::chebrings::FoldingType;

pub struct Knitted {
    pub dims: Vec<Vec<i64>>,
    /// index of τX, if X is not projective
    pub tau: Vec<Option<usize>>,
    pub preds: Vec<Vec<usize>>,
}

fn paths(nv: usize, arrows: &[(usize, usize)]) -> Vec<Vec<i64>> {
    // p[a][b] = number of paths a -> b
    let mut p = vec![vec![0i64; nv]; nv];
    for a in 0..nv {
        p[a][a] = 1;
        // the quiver is acyclic, so nv rounds of relaxation suffice
        for _ in 0..nv {
            let mut next = vec![0i64; nv];
            next[a] = 1;
            for &(s, t) in arrows {
                next[t] += p[a][s];
            }
            p[a] = next;
        }
    }
    p
}

pub fn knit(nv: usize, arrows: &[(usize, usize)]) -> Knitted {
    let p = paths(nv, arrows);
    // order vertices so that the target of every arrow comes first
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&v| p[v].iter().sum::<i64>());
    let proj = |i: usize| p[i].clone();

    let mut k = Knitted { dims: vec![], tau: vec![], preds: vec![] };
    let mut at: HashMap<(usize, usize), usize> = HashMap::new();
    for m in 0.. {
        let mut any = false;
        for &i in &order {
            let d = if m == 0 {
                proj(i)
            } else {
                let Some(&prev) = at.get(&(i, m - 1)) else { continue };
                // successors of τ^{-(m-1)} P(i)
                let mut s = vec![0i64; nv];
                for &(a, b) in arrows {
                    if b == i {
                        if let Some(&y) = at.get(&(a, m - 1)) {
                            s.iter_mut().zip(&k.dims[y]).for_each(|(x, d)| *x += d);
                        }
                    }
                    if a == i {
                        if let Some(&y) = at.get(&(b, m)) {
                            s.iter_mut().zip(&k.dims[y]).for_each(|(x, d)| *x += d);
                        }
                    }
                }
                s.iter().zip(&k.dims[prev]).map(|(a, b)| a - b).collect()
            };
            if d.iter().any(|&x| x < 0) || d.iter().all(|&x| x == 0) {
                continue;
            }
            let idx = k.dims.len();
            let mut preds = Vec::new();
            for &(a, b) in arrows {
                // P(b) -> P(a) for each arrow a -> b
                if a == i {
                    if let Some(&y) = at.get(&(b, m)) {
                        preds.push(y);
                    }
                }
                if b == i && m > 0 {
                    if let Some(&y) = at.get(&(a, m - 1)) {
                        preds.push(y);
                    }
                }
            }
            k.tau.push(if m == 0 { None } else { at.get(&(i, m - 1)).copied() });
            k.preds.push(preds);
            k.dims.push(d);
            at.insert((i, m), idx);
            any = true;
        }
        if !any {
            break;
        }
    }
    k
}

impl Knitted {
    /// dim Hom(X, -) on every indecomposable; indices are already in topological order
    pub fn hammock(&self, x: usize) -> Vec<i64> {
        let mut h = vec![0i64; self.dims.len()];
        for y in 0..self.dims.len() {
            if y == x {
                h[y] = 1;
                continue;
            }
            let s: i64 = self.preds[y].iter().map(|&e| h[e]).sum();
            h[y] = s - self.tau[y].map_or(0, |t| h[t]);
        }
        h
    }
}

/// Panics on the first disagreement.
pub fn compare(ty: FoldingType) {
    let ar = ArModel::new(ty).unwrap();
    let k = knit(ar.nv(), &ar.arrows);
    let lib: Vec<_> = ar.enumerate(Layer::Module);
    assert_eq!(k.dims.len(), lib.len(), "{ty}: number of indecomposables");

    let by_dims: Vec<_> = k
        .dims
        .iter()
        .map(|d| ar.find_by_dims(d).unwrap_or_else(|| panic!("{ty}: {d:?} missing from the library")))
        .collect();
    let hom: Vec<Vec<i64>> = (0..k.dims.len()).map(|x| k.hammock(x)).collect();
    for x in 0..k.dims.len() {
        for y in 0..k.dims.len() {
            let (lx, ly) = (&by_dims[x], &by_dims[y]);
            assert_eq!(ar.hom_dim(lx, ly).unwrap(), hom[x][y], "{ty}: hom({:?}, {:?})", k.dims[x], k.dims[y]);
            // Ext^1(X, Y) = D Hom(Y, τX)
            let ext = k.tau[x].map_or(0, |t| hom[y][t]);
            assert_eq!(ar.ext1_dim(lx, ly).unwrap(), ext, "{ty}: ext({:?}, {:?})", k.dims[x], k.dims[y]);
        }
    }
}
