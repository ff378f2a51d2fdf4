//! The i-slide move on stable trees, priority-ordered generalized slides, the
//! generated strata sets for psi and omega class products, and the labeling
//! verifier that certifies membership in those sets edge by edge.

use crate::tree_core::{
    Composition, Leaf, SetPartitionAtLeaf, Split, StableTree, StrataSum, TreeError,
};
use std::collections::{BTreeMap, BTreeSet};

/// Which product flavor a slide set or labeling refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SlideFlavor {
    Psi,
    Omega,
}

/// An ordered list of distinct candidate labels used to pick the branch that
/// slides; the default order b < c < 1 < ... reproduces the plain i-slide.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PriorityOrder {
    labels: Vec<Leaf>,
}

impl PriorityOrder {
    /// Validate: nonempty, distinct, and never containing a.
    pub fn new(labels: Vec<Leaf>) -> Result<Self, TreeError> {
        let distinct: BTreeSet<&Leaf> = labels.iter().collect();
        if labels.is_empty() || distinct.len() != labels.len() || labels.contains(&Leaf::A) {
            return Err(TreeError::BadLabel);
        }
        Ok(PriorityOrder { labels })
    }

    /// The label order b, c, 1, ..., n with i omitted.
    pub fn default_for(i: u32, n: u32) -> Self {
        let mut labels = vec![Leaf::B, Leaf::C];
        labels.extend((1..=n).filter(|&j| j != i).map(Leaf::Num));
        PriorityOrder { labels }
    }

    /// The candidate labels in priority order.
    pub fn labels(&self) -> &[Leaf] {
        &self.labels
    }
}

fn min_label(block: &BTreeSet<Leaf>) -> Leaf {
    *block.iter().next().unwrap()
}

/// Fan out one slide: the branch holding m moves across the subdivided edge,
/// and every nonempty subset of the other non-a branches may stay behind.
fn fan_out(t: &StableTree, i: u32, partition: &SetPartitionAtLeaf, m: Leaf) -> BTreeSet<StableTree> {
    let movable: Vec<&BTreeSet<Leaf>> = partition
        .non_a_blocks()
        .iter()
        .filter(|b| !b.contains(&m))
        .collect();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << movable.len()) {
        let mut new_side: Split = [Leaf::Num(i)].into_iter().collect();
        for (j, block) in movable.iter().enumerate() {
            if mask & (1 << j) != 0 {
                new_side.extend(block.iter().cloned());
            }
        }
        let inserted = out.insert(t.with_split_unchecked(new_side));
        debug_assert!(inserted);
    }
    out
}

/// The i-slide of a tree: empty when deg(v_i) = 3, otherwise 2^(deg-3) - 1 trees.
pub fn slide_i(t: &StableTree, i: u32) -> Result<BTreeSet<StableTree>, TreeError> {
    let partition = t.branches_at(Leaf::Num(i))?;
    let m = partition
        .non_a_blocks()
        .iter()
        .map(min_label)
        .min()
        .expect("stable trees have a non-a branch at every leaf vertex");
    Ok(fan_out(t, i, &partition, m))
}

/// Slide with the moving branch picked by the first priority label present
/// outside the a-branch; empty when no priority label qualifies.
pub fn generalized_slide(
    t: &StableTree,
    i: u32,
    priority: &PriorityOrder,
) -> Result<BTreeSet<StableTree>, TreeError> {
    let partition = t.branches_at(Leaf::Num(i))?;
    let m = priority.labels().iter().copied().find(|&l| {
        l != Leaf::Num(i) && partition.non_a_blocks().iter().any(|b| b.contains(&l))
    });
    match m {
        Some(m) => Ok(fan_out(t, i, &partition, m)),
        None => Ok(BTreeSet::new()),
    }
}

/// Outcome of one hyperplane-schedule slide: the stratum may lie inside the
/// hyperplane (no priority label outside the a-branch, so the equation
/// restricts to zero and the stratum survives unchanged), may be cut to
/// nothing (no room to subdivide), or fans out.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ScheduleStep {
    Survives,
    Dies,
    FansOut(BTreeSet<StableTree>),
}

/// Generalized slide with schedule semantics, distinguishing the exhausted
/// priority case from the degree-3 case.
pub fn schedule_slide(
    t: &StableTree,
    i: u32,
    priority: &PriorityOrder,
) -> Result<ScheduleStep, TreeError> {
    let partition = t.branches_at(Leaf::Num(i))?;
    let m = priority.labels().iter().copied().find(|&l| {
        l != Leaf::Num(i) && partition.non_a_blocks().iter().any(|b| b.contains(&l))
    });
    match m {
        None => Ok(ScheduleStep::Survives),
        Some(m) => {
            let fan = fan_out(t, i, &partition, m);
            if fan.is_empty() {
                Ok(ScheduleStep::Dies)
            } else {
                Ok(ScheduleStep::FansOut(fan))
            }
        }
    }
}

/// Discard trees that cannot absorb the remaining slides: at each vertex the
/// remaining slide budget of its numeric leaves may not exceed deg(v) - 3.
fn survives_pruning(t: &StableTree, remaining: &[u32]) -> bool {
    let st = t.structure();
    for v in 0..st.num_vertices() {
        let budget: u32 = st.leaves_at[v]
            .iter()
            .filter_map(|l| match l {
                Leaf::Num(j) => remaining.get(*j as usize - 1).copied(),
                _ => None,
            })
            .sum();
        if budget > (st.degree(v) - 3) as u32 {
            return false;
        }
    }
    true
}

fn slide_stage(
    current: BTreeSet<StableTree>,
    i: u32,
    count: u32,
    remaining: &mut [u32],
    prune: bool,
) -> Result<BTreeSet<StableTree>, TreeError> {
    let mut current = current;
    for _ in 0..count {
        remaining[i as usize - 1] -= 1;
        let mut next = BTreeSet::new();
        for t in &current {
            for t2 in slide_i(t, i)? {
                if prune && !survives_pruning(&t2, remaining) {
                    continue;
                }
                let inserted = next.insert(t2);
                assert!(inserted, "slide fan-out produced a duplicate stratum");
            }
        }
        current = next;
    }
    Ok(current)
}

fn to_sum(n: u32, set: BTreeSet<StableTree>) -> StrataSum {
    let mut sum = StrataSum::empty(n);
    for t in set {
        sum.add(t, 1);
    }
    sum
}

/// The psi slide set: from the interior tree, k_i successive i-slides for
/// i = 1..n in all possible ways, with optional pruning.
pub fn slide_set_psi_opts(k: &Composition, prune: bool) -> Result<StrataSum, TreeError> {
    let n = k.n();
    let mut remaining: Vec<u32> = k.parts().to_vec();
    let mut current: BTreeSet<StableTree> = [StableTree::interior(n)].into_iter().collect();
    if prune {
        current.retain(|t| survives_pruning(t, &remaining));
    }
    for i in 1..=n {
        current = slide_stage(current, i, k.parts()[i as usize - 1], &mut remaining, prune)?;
    }
    Ok(to_sum(n, current))
}

/// The psi slide set with pruning on.
pub fn slide_set_psi(k: &Composition) -> Result<StrataSum, TreeError> {
    slide_set_psi_opts(k, true)
}

/// The omega slide set: from the 3-leaf tree, insert leaf i at every internal
/// vertex and then perform k_i i-slides, for i = 1..n.
pub fn slide_set_omega_opts(k: &Composition, prune: bool) -> Result<StrataSum, TreeError> {
    let n = k.n();
    let mut remaining: Vec<u32> = k.parts().to_vec();
    let mut current: BTreeSet<StableTree> = [StableTree::interior(0)].into_iter().collect();
    for i in 1..=n {
        let mut inserted_stage = BTreeSet::new();
        for t in &current {
            for t2 in t.insert_leaf(Leaf::Num(i))? {
                if prune && !survives_pruning(&t2, &remaining) {
                    continue;
                }
                let fresh = inserted_stage.insert(t2);
                assert!(fresh, "leaf insertion produced a duplicate stratum");
            }
        }
        current = slide_stage(inserted_stage, i, k.parts()[i as usize - 1], &mut remaining, prune)?;
    }
    Ok(to_sum(n, current))
}

/// The omega slide set with pruning on.
pub fn slide_set_omega(k: &Composition) -> Result<StrataSum, TreeError> {
    slide_set_omega_opts(k, true)
}

/// Either slide set, selected by flavor.
pub fn slide_set(k: &Composition, flavor: SlideFlavor) -> Result<StrataSum, TreeError> {
    match flavor {
        SlideFlavor::Psi => slide_set_psi(k),
        SlideFlavor::Omega => slide_set_omega(k),
    }
}

/// Apply slides from the interior tree in an arbitrary label order.
pub fn slide_word(n: u32, word: &[u32]) -> Result<BTreeSet<StableTree>, TreeError> {
    if word.iter().any(|&i| i < 1 || i > n) {
        return Err(TreeError::BadLabel);
    }
    let mut current: BTreeSet<StableTree> = [StableTree::interior(n)].into_iter().collect();
    for &i in word {
        let mut next = BTreeSet::new();
        for t in &current {
            next.extend(slide_i(t, i)?);
        }
        current = next;
    }
    Ok(current)
}

/// A partial assignment of values 1..n to internal edges of a tree,
/// certifying slide-set membership.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SlideLabeling {
    /// The labeled tree.
    pub tree: StableTree,
    /// Value assigned to each labeled split.
    pub edge_labels: BTreeMap<Split, u32>,
}

/// Why the labeling process rejected a tree, with the failing step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rejection {
    /// The leaf being processed sits at the same vertex as a.
    LeafAdjacentToA { label: u32 },
    /// The minimal values failed to decrease across the chosen edge.
    NotDecreasing { label: u32, m_here: Leaf, m_across: Leaf },
    /// The omega condition label > m failed at the leaf's vertex.
    OmegaBound { label: u32, m_here: Leaf },
}

/// Run the deterministic labeling process for composition k; returns the full
/// labeling or the first rejection.
pub fn verify_labeling(
    t: &StableTree,
    k: &Composition,
    flavor: SlideFlavor,
) -> Result<SlideLabeling, Rejection> {
    assert_eq!(t.n(), k.n(), "ambient n mismatch");
    let mut labeled: BTreeMap<Split, u32> = BTreeMap::new();
    for label in (1..=k.n()).rev() {
        for _ in 0..k.parts()[label as usize - 1] {
            // Work in the tree with already-labeled edges contracted.
            let mut contracted = t.clone();
            for s in labeled.keys() {
                contracted = contracted.contract_split(s).expect("labeled split present");
            }
            let st = contracted.structure();
            let v = st.vertex_of(Leaf::Num(label)).expect("leaf present");
            if v == 0 {
                return Err(Rejection::LeafAdjacentToA { label });
            }
            let chosen = st.order[v - 1].clone();
            // Minimal label among the branches at the leaf's vertex, away
            // from a and excluding the leaf itself.
            let m_here = st.children[v]
                .iter()
                .map(|&c| min_label(&st.order[c - 1]))
                .chain(st.leaves_at[v].iter().copied().filter(|&l| l != Leaf::Num(label)))
                .min()
                .expect("stable vertex has a third branch");
            // Minimal label among the branches at the other endpoint,
            // excluding the branch back toward the leaf and the a-branch.
            let p = st.parent[v];
            let m_across = st.children[p]
                .iter()
                .filter(|&&c| c != v)
                .map(|&c| min_label(&st.order[c - 1]))
                .chain(st.leaves_at[p].iter().copied().filter(|&l| l != Leaf::A))
                .min()
                .expect("stable vertex has a third branch");
            if flavor == SlideFlavor::Omega && Leaf::Num(label) <= m_here {
                return Err(Rejection::OmegaBound { label, m_here });
            }
            if m_here <= m_across {
                return Err(Rejection::NotDecreasing { label, m_here, m_across });
            }
            labeled.insert(chosen, label);
        }
    }
    Ok(SlideLabeling { tree: t.clone(), edge_labels: labeled })
}
