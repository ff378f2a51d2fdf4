//! Stable leaf-labeled trees encoded by their split sets, plus formal sums of
//! boundary strata. A tree on the leaf set {a, b, c, 1, ..., n} is stored as
//! the set of its splits, each split recorded as the side that does not
//! contain a. Two splits are compatible exactly when their stored sides are
//! nested or disjoint, which is exactly the condition for the whole set to
//! come from one tree.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A leaf label, ordered a < b < c < 1 < 2 < ... < n.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Leaf {
    A,
    B,
    C,
    Num(u32),
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::A => write!(f, "a"),
            Leaf::B => write!(f, "b"),
            Leaf::C => write!(f, "c"),
            Leaf::Num(i) => write!(f, "{i}"),
        }
    }
}

impl FromStr for Leaf {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, TreeError> {
        match s {
            "a" => Ok(Leaf::A),
            "b" => Ok(Leaf::B),
            "c" => Ok(Leaf::C),
            _ => s
                .parse::<u32>()
                .ok()
                .filter(|&i| i >= 1)
                .map(Leaf::Num)
                .ok_or(TreeError::BadLeaf),
        }
    }
}

/// One side of a split: the set of leaves not containing a.
pub type Split = BTreeSet<Leaf>;

/// Errors raised by tree construction and surgery.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    /// Two stored sides are neither nested nor disjoint.
    #[error("splits are not pairwise compatible")]
    IncompatibleSplits,
    /// The reconstructed tree has an internal vertex of degree less than 3.
    #[error("reconstructed tree has a vertex of degree < 3")]
    UnstableTree,
    /// A leaf label outside {b, c, 1..n} appeared in a side, or a label is absent.
    #[error("bad leaf label")]
    BadLeaf,
    /// The requested split is not present in the tree.
    #[error("no such split in tree")]
    NoSuchSplit,
    /// The label does not satisfy the operation's labeling precondition.
    #[error("bad label for this operation")]
    BadLabel,
    /// A composition violated its sum constraint.
    #[error("bad composition")]
    BadComposition,
    /// The requested n exceeds the configured enumeration bound.
    #[error("n = {0} exceeds the configured bound")]
    BoundExceeded(u32),
    /// A hyperplane restricts to zero (or a multi-variable leading form) on a stratum.
    #[error("degenerate hyperplane restriction")]
    DegenerateRestriction,
    /// A stratum point's parameters do not parametrize the requested component.
    #[error("bad component parametrization")]
    BadParametrization,
    /// A kappa index is outside the valid codimension range.
    #[error("kappa index out of range")]
    BadDegree,
    /// The tree is not trivalent where a trivalent tree is required.
    #[error("tree is not trivalent")]
    NotTrivalent,
    /// No hyperplane schedule is known for this composition shape.
    #[error("no schedule known for this composition shape")]
    UnsupportedShape,
    /// A schedule's instructions are inconsistent with the ambient n.
    #[error("malformed schedule")]
    MalformedSchedule,
}

/// Enumeration bound on n, read from STRATA_MAX_N (default 7).
pub fn configured_max_n() -> u32 {
    std::env::var("STRATA_MAX_N")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(7)
}

/// The full leaf set {a, b, c, 1, ..., n}.
pub fn leaf_set(n: u32) -> BTreeSet<Leaf> {
    let mut s: BTreeSet<Leaf> = [Leaf::A, Leaf::B, Leaf::C].into_iter().collect();
    s.extend((1..=n).map(Leaf::Num));
    s
}

/// A stable tree on {a, b, c, 1..n} in canonical split-set form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StableTree {
    n: u32,
    splits: BTreeSet<Split>,
}

/// The reconstructed vertex structure of a tree. Vertex 0 is the root (the
/// vertex carrying leaf a); vertex i+1 sits directly below split order[i].
pub struct Structure {
    /// Splits in a fixed order; split order[i] corresponds to vertex i+1.
    pub order: Vec<Split>,
    /// parent[v] for v >= 1; parent[0] = 0 by convention.
    pub parent: Vec<usize>,
    /// Child vertices of each vertex.
    pub children: Vec<Vec<usize>>,
    /// Leaves attached directly to each vertex.
    pub leaves_at: Vec<Vec<Leaf>>,
    /// Distance from the root.
    pub depth: Vec<usize>,
}

impl Structure {
    /// Degree of an internal vertex.
    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + self.leaves_at[v].len() + usize::from(v != 0)
    }

    /// The vertex carrying a given leaf.
    pub fn vertex_of(&self, leaf: Leaf) -> Option<usize> {
        (0..self.leaves_at.len()).find(|&v| self.leaves_at[v].contains(&leaf))
    }

    /// Number of internal vertices.
    pub fn num_vertices(&self) -> usize {
        self.leaves_at.len()
    }
}

/// The branch decomposition of a tree at a leaf: the leaf sets of the
/// connected components left after deleting that leaf's vertex, with the
/// block containing a listed first and the rest ordered by minimal label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetPartitionAtLeaf {
    /// The leaf the tree was cut at.
    pub leaf: Leaf,
    /// The blocks; blocks[0] contains a.
    pub blocks: Vec<BTreeSet<Leaf>>,
}

impl SetPartitionAtLeaf {
    /// Blocks other than the a-block.
    pub fn non_a_blocks(&self) -> &[BTreeSet<Leaf>] {
        &self.blocks[1..]
    }
}

fn compatible(x: &Split, y: &Split) -> bool {
    x.is_subset(y) || y.is_subset(x) || x.is_disjoint(y)
}

impl StableTree {
    /// The tree with a single internal vertex carrying all n + 3 leaves.
    pub fn interior(n: u32) -> Self {
        StableTree { n, splits: BTreeSet::new() }
    }

    /// Build a canonical tree from stored sides, validating compatibility and stability.
    pub fn from_splits(n: u32, sides: impl IntoIterator<Item = Split>) -> Result<Self, TreeError> {
        let splits: BTreeSet<Split> = sides.into_iter().collect();
        let universe = leaf_set(n);
        for s in &splits {
            if s.contains(&Leaf::A) || s.is_empty() || !s.is_subset(&universe) {
                return Err(TreeError::BadLeaf);
            }
        }
        let v: Vec<&Split> = splits.iter().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if !compatible(v[i], v[j]) {
                    return Err(TreeError::IncompatibleSplits);
                }
            }
        }
        let t = StableTree { n, splits };
        let st = t.structure();
        for v in 0..st.num_vertices() {
            if st.degree(v) < 3 {
                return Err(TreeError::UnstableTree);
            }
        }
        Ok(t)
    }

    /// Ambient n (numeric leaves are 1..n).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// The canonical split set.
    pub fn splits(&self) -> &BTreeSet<Split> {
        &self.splits
    }

    /// Codimension of the stratum, the number of splits.
    pub fn codim(&self) -> usize {
        self.splits.len()
    }

    /// Sum over internal vertices of (degree - 3); the stratum's dimension.
    pub fn extra_valency(&self) -> u32 {
        self.n - self.splits.len() as u32
    }

    /// Whether every internal vertex has degree exactly 3.
    pub fn is_trivalent(&self) -> bool {
        self.splits.len() as u32 == self.n
    }

    /// Whether leaves a and b share a vertex (no split separates them).
    pub fn ab_paired(&self) -> bool {
        !self.splits.iter().any(|s| s.contains(&Leaf::B))
    }

    /// Whether a new side is compatible with every split of the tree.
    pub fn accepts_split(&self, side: &Split) -> bool {
        !self.splits.contains(side) && self.splits.iter().all(|s| compatible(s, side))
    }

    /// The tree with one extra split added; side must be compatible and new.
    pub fn with_split(&self, side: Split) -> Result<Self, TreeError> {
        let mut s = self.splits.clone();
        s.insert(side);
        StableTree::from_splits(self.n, s)
    }

    /// Fast path for callers that construct sides known to be compatible.
    pub(crate) fn with_split_unchecked(&self, side: Split) -> Self {
        debug_assert!(self.accepts_split(&side));
        let mut s = self.splits.clone();
        s.insert(side);
        StableTree { n: self.n, splits: s }
    }

    /// Reconstruct the vertex structure from the split set.
    pub fn structure(&self) -> Structure {
        let order: Vec<Split> = self.splits.iter().cloned().collect();
        let m = order.len();
        let mut parent = vec![0usize; m + 1];
        for (i, x) in order.iter().enumerate() {
            // Parent of vertex i + 1 is the vertex below the minimal proper superset.
            let mut best: Option<usize> = None;
            for (j, y) in order.iter().enumerate() {
                if j != i && x.is_subset(y) && x != y {
                    best = match best {
                        Some(b) if order[b].len() <= y.len() => Some(b),
                        _ => Some(j),
                    };
                }
            }
            parent[i + 1] = best.map_or(0, |j| j + 1);
        }
        let mut children = vec![Vec::new(); m + 1];
        for v in 1..=m {
            children[parent[v]].push(v);
        }
        let mut leaves_at = vec![Vec::new(); m + 1];
        for leaf in leaf_set(self.n) {
            // A leaf lives at the vertex below the minimal split containing it.
            let mut best: Option<usize> = None;
            for (j, y) in order.iter().enumerate() {
                if y.contains(&leaf) {
                    best = match best {
                        Some(b) if order[b].len() <= y.len() => Some(b),
                        _ => Some(j),
                    };
                }
            }
            leaves_at[best.map_or(0, |j| j + 1)].push(leaf);
        }
        let mut depth = vec![0usize; m + 1];
        // Vertices are not ordered by depth, so iterate to a fixed point.
        let mut changed = true;
        while changed {
            changed = false;
            for v in 1..=m {
                let d = depth[parent[v]] + 1;
                if depth[v] != d {
                    depth[v] = d;
                    changed = true;
                }
            }
        }
        Structure { order, parent, children, leaves_at, depth }
    }

    /// Remove one split, merging the two vertices of its edge.
    pub fn contract_split(&self, side: &Split) -> Result<Self, TreeError> {
        if !self.splits.contains(side) {
            return Err(TreeError::NoSuchSplit);
        }
        let mut s = self.splits.clone();
        s.remove(side);
        Ok(StableTree { n: self.n, splits: s })
    }

    /// Attach leaf n + 1 at each internal vertex in turn; one tree per vertex.
    pub fn insert_leaf(&self, new_label: Leaf) -> Result<Vec<Self>, TreeError> {
        if new_label != Leaf::Num(self.n + 1) {
            return Err(TreeError::BadLabel);
        }
        let st = self.structure();
        let mut out = Vec::new();
        for v in 0..st.num_vertices() {
            // The new leaf joins every split whose subtree contains vertex v.
            let anchor: Option<&Split> = if v == 0 { None } else { Some(&st.order[v - 1]) };
            let splits: BTreeSet<Split> = self
                .splits
                .iter()
                .map(|y| {
                    let inside = anchor.is_some_and(|x| x.is_subset(y));
                    if inside {
                        let mut y2 = y.clone();
                        y2.insert(new_label);
                        y2
                    } else {
                        y.clone()
                    }
                })
                .collect();
            out.push(StableTree { n: self.n + 1, splits });
        }
        Ok(out)
    }

    /// Delete the maximal numeric leaf and restabilize.
    pub fn forget_leaf(&self, label: Leaf) -> Result<Self, TreeError> {
        if label != Leaf::Num(self.n) || self.n == 0 {
            return Err(TreeError::BadLabel);
        }
        let mut splits: BTreeSet<Split> = self
            .splits
            .iter()
            .map(|y| {
                let mut y2 = y.clone();
                y2.remove(&label);
                y2
            })
            .filter(|y| !y.is_empty())
            .collect();
        loop {
            // A singleton side means a degree-2 vertex below it; contract.
            let singletons: Vec<Split> = splits.iter().filter(|s| s.len() == 1).cloned().collect();
            if !singletons.is_empty() {
                for s in singletons {
                    splits.remove(&s);
                }
                continue;
            }
            // A degree-2 root has only leaf a and one child; contract that child edge.
            let t = StableTree { n: self.n - 1, splits: splits.clone() };
            let st = t.structure();
            if st.num_vertices() > 1 && st.degree(0) == 2 {
                let top = st.children[0][0];
                splits.remove(&st.order[top - 1]);
                continue;
            }
            return Ok(t);
        }
    }

    /// Branch decomposition at a leaf: blocks of the leaf set minus that leaf.
    pub fn branches_at(&self, leaf: Leaf) -> Result<SetPartitionAtLeaf, TreeError> {
        if !leaf_set(self.n).contains(&leaf) {
            return Err(TreeError::BadLeaf);
        }
        let st = self.structure();
        let v = st.vertex_of(leaf).ok_or(TreeError::BadLeaf)?;
        let mut blocks: Vec<BTreeSet<Leaf>> = Vec::new();
        for &c in &st.children[v] {
            blocks.push(st.order[c - 1].clone());
        }
        for &l in &st.leaves_at[v] {
            if l != leaf {
                blocks.push([l].into_iter().collect());
            }
        }
        if v != 0 {
            let mut up = leaf_set(self.n);
            up.remove(&leaf);
            for b in &blocks {
                for l in b {
                    up.remove(l);
                }
            }
            blocks.push(up);
        }
        let a_pos = blocks.iter().position(|b| b.contains(&Leaf::A)).unwrap();
        let a_block = blocks.remove(a_pos);
        blocks.sort_by_key(|b| *b.iter().next().unwrap());
        blocks.insert(0, a_block);
        Ok(SetPartitionAtLeaf { leaf, blocks })
    }

    /// All edges of the tree: one per leaf and one per split.
    pub fn edges(&self) -> Vec<TreeEdge> {
        let mut e: Vec<TreeEdge> = leaf_set(self.n).into_iter().map(TreeEdge::Leaf).collect();
        e.extend(self.splits.iter().cloned().map(TreeEdge::Internal));
        e
    }

    /// Subdivide an edge and attach a new leaf at the midpoint (trivalent enumeration step).
    pub fn insert_on_edge(&self, edge: &TreeEdge, new_label: Leaf) -> Self {
        let x = match new_label {
            Leaf::Num(i) if i == self.n + 1 => new_label,
            _ => panic!("insert_on_edge requires the next numeric label"),
        };
        let mut splits: BTreeSet<Split> = BTreeSet::new();
        match edge {
            TreeEdge::Leaf(Leaf::A) => {
                // The new leaf joins a on the near side of the new edge.
                splits.extend(self.splits.iter().cloned());
                let mut top = leaf_set(self.n);
                top.remove(&Leaf::A);
                splits.insert(top);
            }
            TreeEdge::Leaf(l) => {
                for y in &self.splits {
                    let mut y2 = y.clone();
                    if y.contains(l) {
                        y2.insert(x);
                    }
                    splits.insert(y2);
                }
                splits.insert([*l, x].into_iter().collect());
            }
            TreeEdge::Internal(y0) => {
                for y in &self.splits {
                    let mut y2 = y.clone();
                    if y0.is_subset(y) && y0 != y {
                        y2.insert(x);
                    }
                    splits.insert(y2);
                }
                let mut above = y0.clone();
                above.insert(x);
                splits.insert(above);
            }
        }
        StableTree { n: self.n + 1, splits }
    }

    /// Human-readable rendering: D(A|B) in codim 1, (A)-(B)-(C) in codim 2,
    /// a split list otherwise.
    pub fn render_text(&self) -> String {
        fn blob(s: &BTreeSet<Leaf>) -> String {
            s.iter().map(|l| l.to_string()).collect()
        }
        let full = leaf_set(self.n);
        match self.codim() {
            0 => format!("({})", blob(&full)),
            1 => {
                let side = self.splits.iter().next().unwrap();
                let comp: BTreeSet<Leaf> = full.difference(side).cloned().collect();
                format!("D({}|{})", blob(&comp), blob(side))
            }
            2 => {
                let mut it = self.splits.iter();
                let x1 = it.next().unwrap();
                let x2 = it.next().unwrap();
                if x2.is_subset(x1) {
                    let outer: BTreeSet<Leaf> = full.difference(x1).cloned().collect();
                    let mid: BTreeSet<Leaf> = x1.difference(x2).cloned().collect();
                    format!("({})-({})-({})", blob(&outer), blob(&mid), blob(x2))
                } else if x1.is_subset(x2) {
                    let outer: BTreeSet<Leaf> = full.difference(x2).cloned().collect();
                    let mid: BTreeSet<Leaf> = x2.difference(x1).cloned().collect();
                    format!("({})-({})-({})", blob(&outer), blob(&mid), blob(x1))
                } else {
                    let mid: BTreeSet<Leaf> =
                        full.difference(x1).filter(|l| !x2.contains(l)).cloned().collect();
                    format!("({})-({})-({})", blob(x1), blob(&mid), blob(x2))
                }
            }
            _ => {
                let parts: Vec<String> = self.splits.iter().map(|s| blob(s)).collect();
                format!("[{}]", parts.join("; "))
            }
        }
    }

    /// Deterministic DOT rendering: internal vertices as unlabeled circles,
    /// leaves as labeled boxes.
    pub fn to_dot(&self) -> String {
        let st = self.structure();
        let mut out = String::from("graph stratum {\n  node [shape=circle, label=\"\"];\n");
        for v in 0..st.num_vertices() {
            out.push_str(&format!("  v{v};\n"));
        }
        for leaf in leaf_set(self.n) {
            out.push_str(&format!(
                "  l_{leaf} [shape=none, label=\"{leaf}\"];\n"
            ));
        }
        for v in 1..st.num_vertices() {
            out.push_str(&format!("  v{} -- v{};\n", st.parent[v], v));
        }
        for v in 0..st.num_vertices() {
            for leaf in &st.leaves_at[v] {
                out.push_str(&format!("  v{v} -- l_{leaf};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for StableTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

/// An edge of a tree, either a leaf pendant edge or an internal edge (a split).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum TreeEdge {
    Leaf(Leaf),
    Internal(Split),
}

#[derive(Serialize, Deserialize)]
struct TreeDto {
    n: u32,
    splits: Vec<Vec<String>>,
}

impl Serialize for StableTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dto = TreeDto {
            n: self.n,
            splits: self
                .splits
                .iter()
                .map(|side| side.iter().map(|l| l.to_string()).collect())
                .collect(),
        };
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StableTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = TreeDto::deserialize(d)?;
        let mut sides = Vec::new();
        for raw in dto.splits {
            let mut side = Split::new();
            for l in raw {
                side.insert(l.parse().map_err(|_| D::Error::custom("bad leaf label"))?);
            }
            sides.push(side);
        }
        StableTree::from_splits(dto.n, sides).map_err(D::Error::custom)
    }
}

/// A weak composition (k_1, ..., k_n) with sum at most n.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    /// Validate that the parts sum to at most their count.
    pub fn new(parts: Vec<u32>) -> Result<Self, TreeError> {
        if parts.iter().map(|&x| x as u64).sum::<u64>() > parts.len() as u64 {
            return Err(TreeError::BadComposition);
        }
        Ok(Composition { parts })
    }

    /// Number of parts, the ambient n.
    pub fn n(&self) -> u32 {
        self.parts.len() as u32
    }

    /// The parts.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// All compositions of n with exactly n parts (sum = n).
    pub fn all_full(n: u32) -> Vec<Composition> {
        fn rec(remaining: u32, slots: u32, acc: &mut Vec<u32>, out: &mut Vec<Composition>) {
            if slots == 0 {
                if remaining == 0 {
                    out.push(Composition { parts: acc.clone() });
                }
                return;
            }
            for v in 0..=remaining {
                acc.push(v);
                rec(remaining - v, slots - 1, acc, out);
                acc.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// A formal sum of boundary strata with positive integer multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrataSum {
    n: u32,
    terms: BTreeMap<StableTree, u64>,
}

impl StrataSum {
    /// The empty sum on ambient n.
    pub fn empty(n: u32) -> Self {
        StrataSum { n, terms: BTreeMap::new() }
    }

    /// Ambient n.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Add a multiple of one stratum.
    pub fn add(&mut self, tree: StableTree, mult: u64) {
        assert_eq!(tree.n(), self.n, "ambient n mismatch");
        if mult > 0 {
            *self.terms.entry(tree).or_insert(0) += mult;
        }
    }

    /// Number of distinct strata.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Whether the sum has no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all multiplicities.
    pub fn total_multiplicity(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Iterate terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&StableTree, u64)> {
        self.terms.iter().map(|(t, &m)| (t, m))
    }

    /// The multiplicity of one stratum (0 if absent).
    pub fn mult(&self, tree: &StableTree) -> u64 {
        self.terms.get(tree).copied().unwrap_or(0)
    }

    /// The set of trees, forgetting multiplicities.
    pub fn support(&self) -> BTreeSet<StableTree> {
        self.terms.keys().cloned().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    tree: StableTree,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct SumDto {
    n: u32,
    terms: Vec<TermDto>,
}

impl Serialize for StrataSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dto = SumDto {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(t, &m)| TermDto { tree: t.clone(), mult: m })
                .collect(),
        };
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StrataSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = SumDto::deserialize(d)?;
        let mut sum = StrataSum::empty(dto.n);
        for term in dto.terms {
            if term.tree.n() != dto.n {
                return Err(D::Error::custom("ambient n mismatch"));
            }
            sum.add(term.tree, term.mult);
        }
        Ok(sum)
    }
}

fn check_bound(n: u32) -> Result<(), TreeError> {
    if n > configured_max_n() {
        Err(TreeError::BoundExceeded(n))
    } else {
        Ok(())
    }
}

/// Visit every trivalent tree on {a, b, c, 1..n} exactly once.
pub fn for_each_trivalent(n: u32, mut visit: impl FnMut(&StableTree)) -> Result<(), TreeError> {
    check_bound(n)?;
    fn rec(t: &StableTree, n: u32, visit: &mut impl FnMut(&StableTree)) {
        if t.n() == n {
            visit(t);
            return;
        }
        let next = Leaf::Num(t.n() + 1);
        for e in t.edges() {
            rec(&t.insert_on_edge(&e, next), n, visit);
        }
    }
    rec(&StableTree::interior(0), n, &mut visit);
    Ok(())
}

/// All trivalent trees on {a, b, c, 1..n}; there are (2(n+3)-5)!! of them.
pub fn enumerate_trivalent(n: u32) -> Result<Vec<StableTree>, TreeError> {
    let mut out = Vec::new();
    for_each_trivalent(n, |t| out.push(t.clone()))?;
    Ok(out)
}

/// Visit every trivalent tree with a, b sharing a vertex; there are (2n-1)!!.
pub fn for_each_ab_paired_trivalent(
    n: u32,
    mut visit: impl FnMut(&StableTree),
) -> Result<(), TreeError> {
    check_bound(n)?;
    fn rec(t: &StableTree, n: u32, visit: &mut impl FnMut(&StableTree)) {
        if t.n() == n {
            visit(t);
            return;
        }
        let next = Leaf::Num(t.n() + 1);
        for e in t.edges() {
            // Inserting on the a or b pendant edge would separate a from b.
            if matches!(e, TreeEdge::Leaf(Leaf::A) | TreeEdge::Leaf(Leaf::B)) {
                continue;
            }
            rec(&t.insert_on_edge(&e, next), n, visit);
        }
    }
    rec(&StableTree::interior(0), n, &mut visit);
    Ok(())
}

/// All stable trees on {a, b, c, 1..n} (every codimension), each exactly once.
pub fn enumerate_stable(n: u32) -> Result<Vec<StableTree>, TreeError> {
    check_bound(n)?;
    let mut seen: BTreeSet<StableTree> = BTreeSet::new();
    for_each_trivalent(n, |t| {
        // Every stable tree is a contraction of a trivalent one, so subsets
        // of trivalent split sets cover everything.
        let splits: Vec<Split> = t.splits().iter().cloned().collect();
        for mask in 0u32..(1 << splits.len()) {
            let subset: BTreeSet<Split> = splits
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone())
                .collect();
            seen.insert(StableTree { n, splits: subset });
        }
    })?;
    Ok(seen.into_iter().collect())
}

/// Build a split from labels given as strings, for tests and fixtures.
pub fn side(labels: &[&str]) -> Split {
    labels.iter().map(|l| l.parse().unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(n: u32, sides: &[&[&str]]) -> StableTree {
        StableTree::from_splits(n, sides.iter().map(|s| side(s))).unwrap()
    }

    #[test]
    fn interior_tree_has_no_splits() {
        let t = StableTree::from_splits(2, []).unwrap();
        assert_eq!(t, StableTree::interior(2));
        assert_eq!(t.codim(), 0);
        assert_eq!(t.extra_valency(), 2);
    }

    #[test]
    fn divisor_from_one_split() {
        let t = tree(2, &[&["c", "1", "2"]]);
        assert_eq!(t.codim(), 1);
        assert_eq!(t.render_text(), "D(ab|c12)");
    }

    #[test]
    fn degree_two_vertex_is_rejected() {
        // Sides {1} and {1,2} are nested, hence compatible, but the middle
        // vertex ends up with degree 2.
        let err = StableTree::from_splits(2, [side(&["1"]), side(&["1", "2"])]).unwrap_err();
        assert_eq!(err, TreeError::UnstableTree);
    }

    #[test]
    fn crossing_sides_are_rejected() {
        let err = StableTree::from_splits(3, [side(&["1", "2"]), side(&["2", "3"])]).unwrap_err();
        assert_eq!(err, TreeError::IncompatibleSplits);
    }

    #[test]
    fn side_containing_a_is_rejected() {
        let err = StableTree::from_splits(2, [side(&["a", "1"])]).unwrap_err();
        assert_eq!(err, TreeError::BadLeaf);
    }

    #[test]
    fn contract_unique_split_gives_interior() {
        let t = tree(2, &[&["c", "1", "2"]]);
        let c = t.contract_split(&side(&["c", "1", "2"])).unwrap();
        assert_eq!(c, StableTree::interior(2));
        assert_eq!(
            t.contract_split(&side(&["1", "2"])).unwrap_err(),
            TreeError::NoSuchSplit
        );
    }

    #[test]
    fn insert_leaf_one_tree_per_internal_vertex() {
        let t0 = StableTree::interior(0);
        let ins = t0.insert_leaf(Leaf::Num(1)).unwrap();
        assert_eq!(ins.len(), 1);
        assert_eq!(ins[0], StableTree::interior(1));

        let t = tree(2, &[&["c", "1", "2"]]);
        let ins = t.insert_leaf(Leaf::Num(3)).unwrap();
        assert_eq!(ins.len(), 2);
        let expected: BTreeSet<StableTree> = [
            tree(3, &[&["c", "1", "2"]]),
            tree(3, &[&["c", "1", "2", "3"]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(ins.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn forget_leaf_restabilizes() {
        assert_eq!(
            StableTree::interior(1).forget_leaf(Leaf::Num(1)).unwrap(),
            StableTree::interior(0)
        );
        // (ab)-(c)-(12): forgetting 2 leaves a singleton side {1} to contract.
        let t = tree(2, &[&["c", "1", "2"], &["1", "2"]]);
        assert_eq!(
            t.forget_leaf(Leaf::Num(2)).unwrap(),
            tree(1, &[&["c", "1"]])
        );
    }

    #[test]
    fn forget_leaf_contracts_degree_two_root() {
        // Tree with root (a, b) and child (c, 1, 2, 3): forgetting 3 keeps the
        // child; but with root (a, 3) and child holding the rest, forgetting 3
        // leaves the root with only leaf a.
        let t = tree(3, &[&["b", "c", "1", "2"]]);
        assert_eq!(t.forget_leaf(Leaf::Num(3)).unwrap(), StableTree::interior(2));
    }

    #[test]
    fn branches_at_matches_fixture() {
        // Tree with splits {1,2,3,4} and {1,3}: at leaf 4 the branches are
        // {a,b,c}, {2}, {1,3}.
        let t = tree(4, &[&["1", "2", "3", "4"], &["1", "3"]]);
        let p = t.branches_at(Leaf::Num(4)).unwrap();
        assert_eq!(p.blocks[0], side(&["a", "b", "c"]));
        assert_eq!(
            p.non_a_blocks(),
            &[side(&["1", "3"]), side(&["2"])]
        );
    }

    #[test]
    fn branches_at_interior_is_all_singletons() {
        let t = StableTree::interior(3);
        let p = t.branches_at(Leaf::Num(2)).unwrap();
        assert_eq!(p.blocks.len(), 5);
        assert!(p.blocks.iter().all(|b| b.len() == 1));
    }

    #[test]
    fn trivalent_counts_match_double_factorial() {
        // (2(n+3)-5)!! trees: 1, 3, 15, 105, 945.
        for (n, expect) in [(0, 1), (1, 3), (2, 15), (3, 105), (4, 945)] {
            assert_eq!(enumerate_trivalent(n).unwrap().len(), expect);
        }
    }

    #[test]
    fn trivalent_trees_are_distinct_and_trivalent() {
        for n in 0..=4 {
            let all = enumerate_trivalent(n).unwrap();
            let set: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            assert!(all.iter().all(|t| t.is_trivalent()));
        }
    }

    #[test]
    fn ab_paired_counts_match_double_factorial() {
        // (2n-1)!! trees: 1, 1, 3, 15, 105.
        for (n, expect) in [(0, 1), (1, 1), (2, 3), (3, 15), (4, 105)] {
            let mut count = 0usize;
            for_each_ab_paired_trivalent(n, |t| {
                assert!(t.ab_paired());
                count += 1;
            })
            .unwrap();
            assert_eq!(count, expect);
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            for_each_trivalent(30, |_| {}),
            Err(TreeError::BoundExceeded(30))
        ));
    }

    #[test]
    fn canonical_round_trip_via_splits() {
        for t in enumerate_stable(3).unwrap() {
            let back = StableTree::from_splits(3, t.splits().iter().cloned()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn json_round_trip_and_canonical_bytes() {
        let t = tree(4, &[&["c", "2"], &["1", "3"]]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"n":4,"splits":[["c","2"],["1","3"]]}"#);
        let back: StableTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn strata_sum_json_round_trip() {
        let mut sum = StrataSum::empty(2);
        sum.add(tree(2, &[&["c", "1", "2"]]), 2);
        sum.add(StableTree::interior(2), 1);
        let s = serde_json::to_string(&sum).unwrap();
        let back: StrataSum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sum);
    }

    #[test]
    fn codim_two_rendering() {
        let nested = tree(3, &[&["c", "1", "2", "3"], &["2", "3"]]);
        assert_eq!(nested.render_text(), "(ab)-(c1)-(23)");
        let disjoint = tree(4, &[&["1", "2"], &["3", "4"]]);
        assert_eq!(disjoint.render_text(), "(12)-(abc)-(34)");
    }

    #[test]
    fn dot_output_is_deterministic() {
        let t = tree(2, &[&["c", "1", "2"]]);
        assert_eq!(t.to_dot(), t.to_dot());
        assert!(t.to_dot().contains("v0 -- v1;"));
        assert!(t.to_dot().contains("l_a"));
    }

    #[test]
    fn compatibility_matches_brute_force_reconstruction() {
        // Every pairwise nested-or-disjoint family of sides on n = 3 must be
        // accepted (up to stability), every crossing family rejected.
        let universe: Vec<Leaf> = leaf_set(3).into_iter().filter(|&l| l != Leaf::A).collect();
        let mut sides: Vec<Split> = Vec::new();
        for mask in 1u32..(1 << universe.len()) {
            let s: Split = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &l)| l)
                .collect();
            if s.len() >= 2 && s.len() <= universe.len() - 1 {
                sides.push(s);
            }
        }
        for i in 0..sides.len() {
            for j in i + 1..sides.len() {
                let pairwise = compatible(&sides[i], &sides[j]);
                let res = StableTree::from_splits(3, [sides[i].clone(), sides[j].clone()]);
                match res {
                    Ok(_) => assert!(pairwise),
                    Err(TreeError::IncompatibleSplits) => assert!(!pairwise),
                    Err(e) => panic!("unexpected error {e:?}"),
                }
            }
        }
    }

    #[test]
    fn composition_validation() {
        assert!(Composition::new(vec![1, 0, 2]).is_ok());
        assert_eq!(
            Composition::new(vec![2, 2]).unwrap_err(),
            TreeError::BadComposition
        );
        assert_eq!(Composition::all_full(3).len(), 10);
    }

    #[test]
    fn extra_valency_bookkeeping() {
        for t in enumerate_stable(3).unwrap() {
            let st = t.structure();
            let by_degrees: usize = (0..st.num_vertices()).map(|v| st.degree(v) - 3).sum();
            assert_eq!(t.extra_valency() as usize, by_degrees);
        }
    }
}
