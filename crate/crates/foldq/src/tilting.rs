//! R₊-tilting objects of the cluster category relative to a generator set.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{ActionError, ActionModel, GammaSet};
use crate::armodel::{Indec, Layer};
use crate::chebrings::RingElt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TiltingError {
    #[error("{0} is not a member of the generator set")]
    NotInGamma(String),
    #[error("generator set is not in the cluster layer")]
    WrongLayer,
    #[error("{0} is not almost complete")]
    NotAlmostComplete(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

/// Orientation of the quiver of End(T̂): the unfolded quiver or its opposite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Original,
    Opposite,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TiltingObject {
    /// summands, sorted on construction; exchanges keep slot positions
    pub summands: Vec<Indec>,
    pub gamma: String,
}

impl TiltingObject {
    pub fn new(mut summands: Vec<Indec>, gamma: &str) -> Self {
        summands.sort();
        summands.dedup();
        TiltingObject { summands, gamma: gamma.to_string() }
    }
}

/// Summary of the tilting checks over one generator set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TiltingReport {
    pub gamma: String,
    pub pairs_checked: usize,
    /// pairs where rigidity, adjacency and the hat expansion disagree
    pub disagreements: Vec<String>,
    pub tilting_objects: usize,
    /// members without exactly two complements
    pub bad_complements: Vec<String>,
    /// tilting objects whose hat expansion is not a cluster-tilting object of Δ
    pub bad_hat: Vec<String>,
}

impl TiltingReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.bad_complements.is_empty() && self.bad_hat.is_empty()
    }
}

/// Tilting theory over one generator set of the cluster category.
pub struct TiltingModel<'a> {
    pub act: &'a ActionModel,
    pub gamma: GammaSet,
    /// supp(R₊ X) for each member X, in member order
    support: Vec<BTreeSet<Indec>>,
}

impl<'a> TiltingModel<'a> {
    pub fn new(act: &'a ActionModel, gamma: GammaSet) -> Result<Self, TiltingError> {
        if gamma.members.iter().any(|x| x.layer != Layer::Cluster) {
            return Err(TiltingError::WrongLayer);
        }
        let mut support = Vec::with_capacity(gamma.members.len());
        for x in &gamma.members {
            let mut s = BTreeSet::new();
            for b in &act.ring.small_basis {
                s.extend(act.act(&RingElt::new(act.ty(), b.clone()), x)?.0.into_keys());
            }
            support.push(s);
        }
        Ok(TiltingModel { act, gamma, support })
    }

    fn index(&self, x: &Indec) -> Result<usize, TiltingError> {
        self.gamma
            .members
            .iter()
            .position(|y| y == x)
            .ok_or_else(|| TiltingError::NotInGamma(self.act.ar.name(x)))
    }

    /// Everything R₊-generated by the summands.
    pub fn generated(&self, t: &[Indec]) -> Result<BTreeSet<Indec>, TiltingError> {
        let mut s = BTreeSet::new();
        for x in t {
            s.extend(self.support[self.index(x)?].iter().copied());
        }
        Ok(s)
    }

    fn pairwise_rigid(&self, s: &BTreeSet<Indec>) -> Result<bool, TiltingError> {
        let v: Vec<&Indec> = s.iter().collect();
        for (i, x) in v.iter().enumerate() {
            for y in &v[i..] {
                if self.act.ar.ext1_dim(x, y).map_err(ActionError::from)? != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// (T2): Ext¹ vanishes on everything R₊-generated by T.
    /// Compares the three characterizations on every pair of members and
    /// checks complements and hat expansions.
    pub fn report(&self) -> Result<TiltingReport, TiltingError> {
        let ar = &self.act.ar;
        let m = &self.gamma.members;
        let mut rep = TiltingReport { gamma: self.gamma.name.clone(), ..Default::default() };
        for (i, x) in m.iter().enumerate() {
            for y in &m[i + 1..] {
                let t = [*x, *y];
                rep.pairs_checked += 1;
                let by_ext = self.is_rplus_tilting(&t)?;
                if by_ext != self.adjacent(x, y) || by_ext != self.hat_is_cluster_tilting(&t)? {
                    rep.disagreements.push(format!("{} ⊕ {}", ar.name(x), ar.name(y)));
                }
            }
            if self.complements(x)?.len() != 2 {
                rep.bad_complements.push(ar.name(x));
            }
        }
        for t in self.enumerate_tilting()? {
            rep.tilting_objects += 1;
            if self.hat_expansion(&t.summands)?.len() != ar.nv() || !self.hat_is_cluster_tilting(&t.summands)? {
                rep.bad_hat.push(t.summands.iter().map(|x| ar.name(x)).collect::<Vec<_>>().join(" ⊕ "));
            }
        }
        Ok(rep)
    }

    pub fn is_rigid(&self, t: &[Indec]) -> Result<bool, TiltingError> {
        self.pairwise_rigid(&self.generated(t)?)
    }

    /// (T1)-(T3): members of Γ, rigid, and no further member keeps rigidity.
    pub fn is_rplus_tilting(&self, t: &[Indec]) -> Result<bool, TiltingError> {
        if t.is_empty() || !self.is_rigid(t)? {
            return Ok(false);
        }
        for y in &self.gamma.members {
            if t.contains(y) {
                continue;
            }
            let mut u = t.to_vec();
            u.push(*y);
            if self.is_rigid(&u)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All basic R₊-tilting objects with at most three summands.
    pub fn enumerate_tilting(&self) -> Result<Vec<TiltingObject>, TiltingError> {
        let m = &self.gamma.members;
        let k = m.len();
        let mut subsets: Vec<Vec<Indec>> = (0..k).map(|i| vec![m[i]]).collect();
        for i in 0..k {
            for j in i + 1..k {
                subsets.push(vec![m[i], m[j]]);
                for l in j + 1..k {
                    subsets.push(vec![m[i], m[j], m[l]]);
                }
            }
        }
        let mut out = Vec::new();
        for t in subsets {
            if self.is_rplus_tilting(&t)? {
                out.push(TiltingObject::new(t, &self.gamma.name));
            }
        }
        Ok(out)
    }

    /// Adjacency test on cluster columns.
    pub fn adjacent(&self, x: &Indec, y: &Indec) -> bool {
        let c = self.act.ar.column_count(Layer::Cluster) as i64;
        let d = (self.act.ar.column(x) - self.act.ar.column(y)).rem_euclid(c);
        d == 1 || d == c - 1
    }

    /// The other summands Y of Γ that complete X to a tilting object.
    pub fn complements(&self, x: &Indec) -> Result<Vec<Indec>, TiltingError> {
        self.index(x)?;
        let mut out = Vec::new();
        for y in &self.gamma.members {
            if y != x && self.is_rplus_tilting(&[*x, *y])? {
                out.push(*y);
            }
        }
        Ok(out)
    }

    /// Replaces the summand at `slot` by its other complement.
    pub fn exchange(&self, t: &TiltingObject, slot: usize) -> Result<TiltingObject, TiltingError> {
        if t.summands.len() != 2 {
            return Err(TiltingError::NotAlmostComplete(format!("{:?}", t.summands)));
        }
        let keep = t.summands[1 - slot];
        let old = t.summands[slot];
        let comps = self.complements(&keep)?;
        let new = comps
            .into_iter()
            .find(|y| *y != old)
            .ok_or_else(|| TiltingError::NotAlmostComplete(self.act.ar.name(&keep)))?;
        let mut s = t.summands.clone();
        s[slot] = new;
        Ok(TiltingObject { summands: s, gamma: t.gamma.clone() })
    }

    /// Alternating exchange at slot 0 and slot 1; returns the visited objects.
    pub fn exchange_walk(&self, start: &TiltingObject, steps: usize) -> Result<Vec<TiltingObject>, TiltingError> {
        // keep slots positional rather than sorted so the alternation is well defined
        let mut cur = start.clone();
        let mut out = vec![cur.clone()];
        for s in 0..steps {
            cur = self.exchange(&cur, s % 2)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Classical cluster-tilting object obtained by generating T.
    pub fn hat_expansion(&self, t: &[Indec]) -> Result<Vec<Indec>, TiltingError> {
        Ok(self.generated(t)?.into_iter().collect())
    }

    /// Whether T̂ is a classical cluster-tilting object: |Q₀| summands, rigid.
    pub fn hat_is_cluster_tilting(&self, t: &[Indec]) -> Result<bool, TiltingError> {
        let h = self.generated(t)?;
        Ok(h.len() == self.act.ar.nv() && self.pairwise_rigid(&h)?)
    }

    /// The sum of the small basis, which generates whole columns.
    pub fn covering_element(&self) -> RingElt {
        let ring = &self.act.ring;
        let mut c = vec![0i64; ring.dim()];
        for b in &ring.small_basis {
            for (ci, bi) in c.iter_mut().zip(b) {
                *ci += bi;
            }
        }
        RingElt::new(self.act.ty(), c)
    }

    /// Whether act(r, T) with r the covering element fills the columns of T.
    pub fn covering_check(&self, t: &[Indec]) -> Result<bool, TiltingError> {
        let r = self.covering_element();
        let mut got = BTreeSet::new();
        let mut want = BTreeSet::new();
        for x in t {
            got.extend(self.act.act(&r, x)?.0.into_keys());
            want.extend(self.act.ar.column_members(Layer::Cluster, self.act.ar.column(x)));
        }
        Ok(got == want)
    }

    /// Orientation of the quiver of End(T̂), read from the column pair.
    pub fn orientation(&self, t: &[Indec]) -> Option<Orientation> {
        let c = self.act.ar.column_count(Layer::Cluster) as i64;
        let [x, y] = t else { return None };
        let (a, b) = (self.act.ar.column(x), self.act.ar.column(y));
        let lo = if (b - a).rem_euclid(c) == 1 {
            a
        } else if (a - b).rem_euclid(c) == 1 {
            b
        } else {
            return None;
        };
        Some(if lo % 2 == 0 { Orientation::Original } else { Orientation::Opposite })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebrings::FoldingType;

    fn setup(s: &str) -> ActionModel {
        ActionModel::new(s.parse().unwrap()).unwrap()
    }

    fn gamma_with(a: &ActionModel, rows: &[&str]) -> GammaSet {
        let want: Vec<usize> = rows.iter().map(|r| a.ar.vertex_by_name(r).unwrap()).collect();
        a.gamma_sets(Layer::Cluster)
            .into_iter()
            .find(|g| want.iter().all(|v| g.rows.contains(v)))
            .unwrap()
    }

    fn by_dims(a: &ActionModel, names: &[&str]) -> Indec {
        let mut d = vec![0; a.ar.nv()];
        for v in names {
            d[a.ar.vertex_by_name(v).unwrap()] += 1;
        }
        a.ar.find_by_dims(&d).unwrap().with_layer(Layer::Cluster)
    }

    #[test]
    fn a7_example() {
        let a = setup("A7");
        let tm = TiltingModel::new(&a, gamma_with(&a, &["6", "5"])).unwrap();
        let p6 = by_dims(&a, &["0-", "1-"]);
        let p5 = by_dims(&a, &["1-"]);
        assert!(tm.is_rplus_tilting(&[p6, p5]).unwrap());
        let mut comps = tm.complements(&p6).unwrap();
        comps.sort();
        let mut want = vec![by_dims(&a, &["2-", "0-", "3", "1-"]), p5];
        want.sort();
        assert_eq!(comps, want);
        let hat: BTreeSet<Indec> = tm.hat_expansion(&[p6, p5]).unwrap().into_iter().collect();
        let want: BTreeSet<Indec> = [
            vec!["0-", "1-"],
            vec!["2-", "1-", "3"],
            vec!["2+", "1+", "3"],
            vec!["0+", "1+"],
            vec!["1-"],
            vec!["3"],
            vec!["1+"],
        ]
        .iter()
        .map(|d| by_dims(&a, d))
        .collect();
        assert_eq!(hat, want);
        assert!(tm.covering_check(&[p6, p5]).unwrap());
    }

    #[test]
    fn a7_two_columns_apart_is_not_tilting() {
        let a = setup("A7");
        let tm = TiltingModel::new(&a, gamma_with(&a, &["6", "5"])).unwrap();
        let m = &tm.gamma.members;
        for x in m {
            for y in m {
                let d = (a.ar.column(x) - a.ar.column(y)).rem_euclid(10);
                if d == 2 {
                    assert!(!tm.is_rplus_tilting(&[*x, *y]).unwrap());
                    assert!(!tm.is_rigid(&[*x, *y]).unwrap());
                }
            }
        }
    }

    #[test]
    fn d5_example() {
        let a = setup("D5");
        let g = a.gamma_sets(Layer::Cluster).into_iter().next().unwrap();
        let tm = TiltingModel::new(&a, g).unwrap();
        let t = [by_dims(&a, &["2", "1"]), by_dims(&a, &["0", "2", "1", "3+"])];
        assert!(tm.is_rplus_tilting(&t).unwrap());
    }

    #[test]
    fn non_members_are_rejected() {
        let a = setup("A7");
        let tm = TiltingModel::new(&a, gamma_with(&a, &["6", "5"])).unwrap();
        let outside = Indec { layer: Layer::Cluster, vertex: 3, m: 0, shift: 0 };
        assert!(matches!(tm.complements(&outside), Err(TiltingError::NotInGamma(_))));
        assert!(TiltingModel::new(&a, a.gamma_sets(Layer::Module).remove(0)).is_err());
    }

    #[test]
    fn characterizations_agree() {
        for s in ["A3", "A7", "D4", "D5", "E6"] {
            let a = setup(s);
            for g in a.gamma_sets(Layer::Cluster) {
                let tm = TiltingModel::new(&a, g).unwrap();
                let m = tm.gamma.members.clone();
                for (i, x) in m.iter().enumerate() {
                    for y in &m[i + 1..] {
                        let t = [*x, *y];
                        let by_ext = tm.is_rplus_tilting(&t).unwrap();
                        assert_eq!(by_ext, tm.adjacent(x, y), "{s}");
                        assert_eq!(by_ext, tm.hat_is_cluster_tilting(&t).unwrap(), "{s}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_complements() {
        for ty in FoldingType::catalogue() {
            let a = ActionModel::new(ty).unwrap();
            let n = a.ar.n();
            let g = a.gamma_sets(Layer::Cluster).remove(0);
            let tm = TiltingModel::new(&a, g).unwrap();
            let all = tm.enumerate_tilting().unwrap();
            assert_eq!(all.len(), 2 * n + 2, "{ty}");
            for t in &all {
                assert_eq!(t.summands.len(), 2);
                assert_eq!(tm.hat_expansion(&t.summands).unwrap().len(), a.ar.nv());
                assert!(tm.hat_is_cluster_tilting(&t.summands).unwrap());
                assert!(tm.covering_check(&t.summands).unwrap());
                assert!(tm.orientation(&t.summands).is_some());
            }
            for x in &tm.gamma.members {
                assert_eq!(tm.complements(x).unwrap().len(), 2, "{ty}");
            }
        }
    }

    #[test]
    fn exchange_walk_period() {
        for s in ["A3", "A7", "D5", "E6", "E8"] {
            let a = setup(s);
            let n = a.ar.n();
            let tm = TiltingModel::new(&a, a.gamma_sets(Layer::Cluster).remove(0)).unwrap();
            let start = tm.enumerate_tilting().unwrap().remove(0);
            let walk = tm.exchange_walk(&start, 2 * n + 2).unwrap();
            let distinct: BTreeSet<Vec<Indec>> = walk
                .iter()
                .map(|t| {
                    let mut v = t.summands.clone();
                    v.sort();
                    v
                })
                .collect();
            assert_eq!(distinct.len(), 2 * n + 2, "{s}");
            assert_eq!(walk.last().unwrap().summands, start.summands, "{s}");
            // exchanging the same slot twice is the identity
            let back = tm.exchange(&tm.exchange(&start, 0).unwrap(), 0).unwrap();
            assert_eq!(back, start);
        }
    }
}
