//! Finite hypothesis classes, Littlestone dimension, and the SOA base learner.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::Figure1Layout;
use crate::error::{Error, Result};
use crate::graph::VertexId;

/// A binary label. Serialized as `-1` / `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    #[inline]
    pub fn is_positive(self) -> bool {
        self == Label::Pos
    }

    pub fn sign(self) -> f64 {
        match self {
            Label::Neg => -1.0,
            Label::Pos => 1.0,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Neg => Label::Pos,
            Label::Pos => Label::Neg,
        }
    }
}

impl From<bool> for Label {
    fn from(b: bool) -> Self {
        if b {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

impl From<Label> for i8 {
    fn from(l: Label) -> i8 {
        match l {
            Label::Neg => -1,
            Label::Pos => 1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Label::Neg),
            1 => Ok(Label::Pos),
            other => Err(format!("label must be -1 or +1, got {other}")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Neg => "-1",
            Label::Pos => "+1",
        })
    }
}

/// A total labeling of the vertex set. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    labels: Arc<[Label]>,
}

impl Hypothesis {
    pub fn from_labels(labels: Vec<Label>) -> Self {
        Hypothesis {
            labels: labels.into(),
        }
    }

    pub fn all_positive(vertex_count: usize) -> Self {
        Self::from_labels(vec![Label::Pos; vertex_count])
    }

    pub fn all_negative(vertex_count: usize) -> Self {
        Self::from_labels(vec![Label::Neg; vertex_count])
    }

    /// Negative everywhere except `positives`.
    pub fn positive_on(vertex_count: usize, positives: &[VertexId]) -> Self {
        let mut labels = vec![Label::Neg; vertex_count];
        for &v in positives {
            labels[v] = Label::Pos;
        }
        Self::from_labels(labels)
    }

    #[inline]
    pub fn label(&self, x: VertexId) -> Label {
        self.labels[x]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_all_positive(&self) -> bool {
        self.labels.iter().all(|l| l.is_positive())
    }

    pub fn concat(&self, other: &Hypothesis) -> Hypothesis {
        let mut labels = self.labels.to_vec();
        labels.extend_from_slice(&other.labels);
        Self::from_labels(labels)
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .labels
            .iter()
            .map(|l| if l.is_positive() { '+' } else { '-' })
            .collect();
        write!(f, "Hypothesis({s})")
    }
}

/// An indexed, duplicate-free family `h^0, …, h^{n-1}` over a common vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    vertex_count: usize,
    members: Vec<Hypothesis>,
}

impl HypothesisClass {
    pub fn new(members: Vec<Hypothesis>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidClass("class must have at least one member".into()))?;
        let vertex_count = first.len();
        if vertex_count == 0 {
            return Err(Error::InvalidClass(
                "hypotheses must label at least one vertex".into(),
            ));
        }
        if let Some(h) = members.iter().find(|h| h.len() != vertex_count) {
            return Err(Error::LengthMismatch {
                expected: vertex_count,
                got: h.len(),
            });
        }
        let mut seen = HashMap::with_capacity(members.len());
        for (i, h) in members.iter().enumerate() {
            if let Some(j) = seen.insert(h.labels(), i) {
                return Err(Error::InvalidClass(format!(
                    "members {j} and {i} are identical"
                )));
            }
        }
        Ok(HypothesisClass {
            vertex_count,
            members,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn index_of(&self, h: &Hypothesis) -> Option<usize> {
        self.members.iter().position(|m| m == h)
    }

    /// `h_i` labels only `points[i]` positive.
    pub fn singletons_over(vertex_count: usize, points: &[VertexId]) -> Result<Self> {
        check_points(vertex_count, points)?;
        Self::new(
            points
                .iter()
                .map(|&p| Hypothesis::positive_on(vertex_count, &[p]))
                .collect(),
        )
    }

    /// All `2^k` labelings of `points` (negative elsewhere), in lexicographic
    /// order with `-1 < +1` and `points[0]` most significant.
    pub fn all_labelings(vertex_count: usize, points: &[VertexId]) -> Result<Self> {
        Self::first_labelings(vertex_count, points, 1usize << points.len())
    }

    /// The first `count` members of [`Self::all_labelings`].
    pub fn first_labelings(vertex_count: usize, points: &[VertexId], count: usize) -> Result<Self> {
        check_points(vertex_count, points)?;
        let k = points.len();
        if k >= 24 {
            return Err(Error::InvalidParameter(format!(
                "too many points for all labelings: {k}"
            )));
        }
        if count == 0 || count > 1usize << k {
            return Err(Error::InvalidParameter(format!(
                "cannot take {count} of {} labelings",
                1usize << k
            )));
        }
        let members = (0..count)
            .map(|code| {
                let positives: Vec<_> = points
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| code >> (k - 1 - j) & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                Hypothesis::positive_on(vertex_count, &positives)
            })
            .collect();
        Self::new(members)
    }

    /// Singletons over the `p` layer of the lower-bound graph on `n` pairs.
    pub fn figure1(n: usize) -> Result<Self> {
        let layout = Figure1Layout::new(n)?;
        Self::new((1..=n).map(|k| layout.singleton(k)).collect())
    }

    /// Product class over `d` disjoint copies of the domain; member order is
    /// lexicographic in the per-copy indices, first copy most significant.
    pub fn product_copies(&self, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        let size = (self.len() as u128)
            .checked_pow(d as u32)
            .filter(|&s| s <= 1 << 22);
        let size = size.ok_or_else(|| {
            Error::InvalidParameter(format!("product class {}^{d} too large", self.len()))
        })? as usize;
        let n = self.len();
        let members = (0..size)
            .map(|mut code| {
                let mut parts = vec![0usize; d];
                for slot in parts.iter_mut().rev() {
                    *slot = code % n;
                    code /= n;
                }
                let labels: Vec<Label> = parts
                    .iter()
                    .flat_map(|&i| self.members[i].labels().iter().copied())
                    .collect();
                Hypothesis::from_labels(labels)
            })
            .collect();
        Self::new(members)
    }

    /// Index-matched extension onto the disjoint union of the two domains:
    /// member `i` is `first[i] ⊕ second[i]`.
    pub fn union_extend(first: &Self, second: &Self) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::InvalidClass(format!(
                "union_extend needs equal sizes, got {} and {}",
                first.len(),
                second.len()
            )));
        }
        Self::new(
            first
                .members
                .iter()
                .zip(&second.members)
                .map(|(a, b)| a.concat(b))
                .collect(),
        )
    }

    /// Littlestone dimension of the whole class over `domain`.
    pub fn ldim(&self, domain: &[VertexId]) -> Result<u32> {
        check_points(self.vertex_count, domain)?;
        let mut memo = LdimMemo::with_domain(self, domain.to_vec());
        let all: Vec<u32> = (0..self.len() as u32).collect();
        memo.ldim(self, &all).ok_or(Error::EmptyVersionSpace)
    }

    /// Littlestone dimension over the full vertex set.
    pub fn ldim_full(&self) -> u32 {
        let domain: Vec<_> = (0..self.vertex_count).collect();
        self.ldim(&domain)
            .expect("nonempty class over its own domain")
    }
}

fn check_points(vertex_count: usize, points: &[VertexId]) -> Result<()> {
    if let Some(&p) = points.iter().find(|&&p| p >= vertex_count) {
        return Err(Error::InvalidVertex {
            vertex: p,
            vertex_count,
        });
    }
    Ok(())
}

impl Serialize for HypothesisClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.members.len()))?;
        for h in &self.members {
            seq.serialize_element(h.labels())?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for HypothesisClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Label>>::deserialize(d)?;
        HypothesisClass::new(rows.into_iter().map(Hypothesis::from_labels).collect())
            .map_err(serde::de::Error::custom)
    }
}

/// Memoized Littlestone-dimension evaluator for sub-classes of one class,
/// keyed by sorted member-index sets.
#[derive(Debug, Clone)]
pub struct LdimMemo {
    domain: Vec<VertexId>,
    cache: HashMap<Vec<u32>, u32>,
}

impl LdimMemo {
    /// Domain restricted to vertices where the class is not constant; the
    /// others can never split a sub-class.
    pub fn new(class: &HypothesisClass) -> Self {
        let domain = (0..class.vertex_count()).collect();
        Self::with_domain(class, domain)
    }

    pub fn with_domain(class: &HypothesisClass, domain: Vec<VertexId>) -> Self {
        let domain = domain
            .into_iter()
            .filter(|&x| {
                let first = class.members[0].label(x);
                class.members.iter().any(|h| h.label(x) != first)
            })
            .collect();
        LdimMemo {
            domain,
            cache: HashMap::new(),
        }
    }

    /// `None` for the empty sub-class.
    pub fn ldim(&mut self, class: &HypothesisClass, version: &[u32]) -> Option<u32> {
        if version.is_empty() {
            None
        } else {
            Some(self.rec(class, version))
        }
    }

    fn rec(&mut self, class: &HypothesisClass, version: &[u32]) -> u32 {
        if version.len() <= 1 {
            return 0;
        }
        if let Some(&v) = self.cache.get(version) {
            return v;
        }
        let ceiling = floor_log2(version.len());
        let mut best = 0;
        let mut pos = Vec::with_capacity(version.len());
        let mut neg = Vec::with_capacity(version.len());
        for k in 0..self.domain.len() {
            let x = self.domain[k];
            pos.clear();
            neg.clear();
            for &i in version {
                if class.members[i as usize].label(x).is_positive() {
                    pos.push(i);
                } else {
                    neg.push(i);
                }
            }
            if pos.is_empty() || neg.is_empty() {
                continue;
            }
            if floor_log2(pos.len().min(neg.len())) < best {
                continue;
            }
            let a = self.rec(class, &pos);
            if a < best {
                continue;
            }
            let b = self.rec(class, &neg);
            best = best.max(1 + a.min(b));
            if best == ceiling {
                break;
            }
        }
        self.cache.insert(version.to_vec(), best);
        best
    }
}

fn floor_log2(k: usize) -> u32 {
    debug_assert!(k > 0);
    usize::BITS - 1 - k.leading_zeros()
}

/// State of the Standard Optimal Algorithm after a sequence of labeled points.
/// Updated functionally: [`SoaState::feed`] returns a new value.
#[derive(Debug, Clone)]
pub struct SoaState {
    class: Arc<HypothesisClass>,
    history: Vec<(VertexId, Label)>,
    version: Vec<u32>,
}

impl SoaState {
    pub fn new(class: Arc<HypothesisClass>) -> Self {
        let version = (0..class.len() as u32).collect();
        SoaState {
            class,
            history: Vec::new(),
            version,
        }
    }

    pub fn class(&self) -> &Arc<HypothesisClass> {
        &self.class
    }

    pub fn history(&self) -> &[(VertexId, Label)] {
        &self.history
    }

    /// Indices of members consistent with the history.
    pub fn version(&self) -> &[u32] {
        &self.version
    }

    pub fn predict(&self, x: VertexId) -> Result<Label> {
        self.predict_with(x, &mut LdimMemo::new(&self.class))
    }

    /// The label whose consistent sub-class has the larger Ldim; ties go to `-1`.
    pub fn predict_with(&self, x: VertexId, memo: &mut LdimMemo) -> Result<Label> {
        if x >= self.class.vertex_count() {
            return Err(Error::InvalidVertex {
                vertex: x,
                vertex_count: self.class.vertex_count(),
            });
        }
        if self.version.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        let (pos, neg): (Vec<u32>, Vec<u32>) = self
            .version
            .iter()
            .partition(|&&i| self.class.member(i as usize).label(x).is_positive());
        let label = match (memo.ldim(&self.class, &pos), memo.ldim(&self.class, &neg)) {
            (Some(p), Some(n)) if p > n => Label::Pos,
            (Some(_), None) => Label::Pos,
            _ => Label::Neg,
        };
        Ok(label)
    }

    pub fn hypothesis(&self) -> Result<Hypothesis> {
        self.hypothesis_with(&mut LdimMemo::new(&self.class))
    }

    /// Materializes `x ↦ predict(x)` over every vertex.
    pub fn hypothesis_with(&self, memo: &mut LdimMemo) -> Result<Hypothesis> {
        if self.version.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        if self.version.len() == 1 {
            return Ok(self.class.member(self.version[0] as usize).clone());
        }
        let labels = (0..self.class.vertex_count())
            .map(|x| self.predict_with(x, memo))
            .collect::<Result<Vec<_>>>()?;
        Ok(Hypothesis::from_labels(labels))
    }

    pub fn feed(&self, x: VertexId, y: Label) -> Result<SoaState> {
        if x >= self.class.vertex_count() {
            return Err(Error::InvalidVertex {
                vertex: x,
                vertex_count: self.class.vertex_count(),
            });
        }
        let version: Vec<u32> = self
            .version
            .iter()
            .copied()
            .filter(|&i| self.class.member(i as usize).label(x) == y)
            .collect();
        if version.is_empty() {
            return Err(Error::EmptyVersionSpace);
        }
        let mut history = self.history.clone();
        history.push((x, y));
        Ok(SoaState {
            class: Arc::clone(&self.class),
            history,
            version,
        })
    }
}
