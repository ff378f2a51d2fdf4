//! The 23-1 pattern-avoidance correspondence: reading words of caterpillar
//! trees in the all-ones omega slide set, the inverse leaf labeling
//! algorithm, Bell numbers, and a word encoding of psi slide sets.

use crate::slide_engine::{slide_i, verify_labeling, SlideFlavor};
use crate::tree_core::{Composition, Leaf, Split, StableTree, TreeError};
use num::BigUint;
use std::collections::BTreeMap;
use thiserror::Error;

/// A permutation of 1..n in one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Permutation {
    word: Vec<u32>,
}

impl Permutation {
    /// Validate a one-line word as a bijection on 1..n.
    pub fn new(word: Vec<u32>) -> Result<Self, TreeError> {
        let n = word.len() as u32;
        let mut seen = vec![false; n as usize];
        for &x in &word {
            if x < 1 || x > n || seen[x as usize - 1] {
                return Err(TreeError::BadLabel);
            }
            seen[x as usize - 1] = true;
        }
        Ok(Permutation { word })
    }

    /// The one-line word.
    pub fn word(&self) -> &[u32] {
        &self.word
    }

    /// Length of the permutation.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    /// Whether the permutation is empty.
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Errors of the pattern correspondence.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PatternError {
    /// The tree is not a caterpillar with the a, b cherry on the left.
    #[error("tree is not an ab-anchored caterpillar")]
    NotCaterpillar,
    /// The tree admits no all-ones omega slide labeling.
    #[error("tree has no valid slide labeling")]
    NoValidLabeling,
    /// The permutation contains a 23-1 pattern.
    #[error("permutation contains a 23-1 pattern")]
    PatternViolation,
}

/// True iff there are no indices i, j with i + 1 < j and w_j < w_i < w_{i+1}.
pub fn avoids_231_dash(w: &Permutation) -> bool {
    let v = w.word();
    for i in 0..v.len().saturating_sub(1) {
        for j in i + 2..v.len() {
            if v[j] < v[i] && v[i] < v[i + 1] {
                return false;
            }
        }
    }
    true
}

/// All 23-1-avoiding permutations of length n.
pub fn all_avoiders(n: u32) -> Vec<Permutation> {
    fn rec(remaining: &mut Vec<u32>, acc: &mut Vec<u32>, out: &mut Vec<Permutation>) {
        if remaining.is_empty() {
            let p = Permutation { word: acc.clone() };
            if avoids_231_dash(&p) {
                out.push(p);
            }
            return;
        }
        for idx in 0..remaining.len() {
            let x = remaining.remove(idx);
            acc.push(x);
            rec(remaining, acc, out);
            acc.pop();
            remaining.insert(idx, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Whether the internal vertices of a trivalent tree form a path.
pub fn is_caterpillar(t: &StableTree) -> bool {
    if !t.is_trivalent() {
        return false;
    }
    let st = t.structure();
    (0..st.num_vertices()).all(|v| st.children[v].len() + usize::from(v != 0) <= 2)
}

/// The left-to-right labels of the all-ones omega slide labeling of an
/// ab-anchored caterpillar.
pub fn reading_word(t: &StableTree) -> Result<Permutation, PatternError> {
    if !is_caterpillar(t) || !t.ab_paired() {
        return Err(PatternError::NotCaterpillar);
    }
    let n = t.n();
    let k = Composition::new(vec![1; n as usize]).expect("all-ones is a composition");
    let labeling =
        verify_labeling(t, &k, SlideFlavor::Omega).map_err(|_| PatternError::NoValidLabeling)?;
    // The chain splits shrink left to right along the path.
    let mut chain: Vec<&Split> = t.splits().iter().collect();
    chain.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let word: Vec<u32> = chain
        .iter()
        .map(|s| labeling.edge_labels[*s])
        .collect();
    Ok(Permutation { word })
}

/// Build the caterpillar tree whose reading word is the given 23-1-avoiding
/// permutation, by the descending leaf labeling rule.
pub fn leaf_labeling(w: &Permutation) -> Result<StableTree, PatternError> {
    if !avoids_231_dash(w) {
        return Err(PatternError::PatternViolation);
    }
    let n = w.len() as u32;
    if n == 0 {
        return Ok(StableTree::interior(0));
    }
    // Path vertices u_1 .. u_n; one leaf slot each, two at u_n.
    let mut slots: Vec<Vec<Option<Leaf>>> = (1..=n)
        .map(|p| if p == n { vec![None, None] } else { vec![None] })
        .collect();
    let pos_of = |val: u32| w.word().iter().position(|&x| x == val).unwrap();
    for val in (1..=n).rev() {
        let p = pos_of(val);
        let next = w.word().get(p + 1).copied();
        match next {
            Some(j) if j < val => {
                // Case 1: the leaf just to the right of the edge.
                let slot = slots[p].iter_mut().find(|s| s.is_none());
                *slot.expect("leaf just right of the edge is unlabeled") = Some(Leaf::Num(val));
            }
            _ => {
                // Case 2: the rightmost unlabeled leaf to the right.
                let free: usize = slots[p..]
                    .iter()
                    .map(|v| v.iter().filter(|s| s.is_none()).count())
                    .sum();
                assert_eq!(free, 2, "case 2 must find exactly two open leaves");
                let q = (p..slots.len())
                    .rev()
                    .find(|&q| slots[q].iter().any(|s| s.is_none()))
                    .unwrap();
                let slot = slots[q].iter_mut().rev().find(|s| s.is_none());
                *slot.unwrap() = Some(Leaf::Num(val));
            }
        }
    }
    let open: usize = slots
        .iter()
        .map(|v| v.iter().filter(|s| s.is_none()).count())
        .sum();
    assert_eq!(open, 1, "exactly one leaf remains for c");
    for v in &mut slots {
        for s in v.iter_mut() {
            if s.is_none() {
                *s = Some(Leaf::C);
            }
        }
    }
    let sides = (0..slots.len()).map(|p| {
        slots[p..]
            .iter()
            .flatten()
            .map(|s| s.unwrap())
            .collect::<Split>()
    });
    Ok(StableTree::from_splits(n, sides).expect("leaf labeling builds a caterpillar"))
}

/// Position of the vertex at leaf i among the non-root internal vertices,
/// ordered by decreasing minimal leaf of their subtree, with ties broken so
/// that vertices farther from a come first.
fn vertex_order_position(t: &StableTree, i: u32) -> usize {
    let st = t.structure();
    let mut order: Vec<usize> = (1..st.num_vertices()).collect();
    order.sort_by_key(|&v| {
        let j_v = *st.order[v - 1].iter().min().expect("splits are nonempty");
        (std::cmp::Reverse(j_v), std::cmp::Reverse(st.depth[v]))
    });
    let target = st.vertex_of(Leaf::Num(i)).expect("leaf present");
    order.iter().position(|&v| v == target).unwrap()
}

/// Run the psi slide generation and record, for each resulting tree, the
/// word built by inserting each slid letter at its vertex-order position.
/// The assignment is a heuristic: the words always have the right letter
/// content, but distinct trees can share a word for some compositions.
pub fn word_encode_psi(k: &Composition) -> Result<BTreeMap<StableTree, Vec<u32>>, TreeError> {
    let n = k.n();
    let mut current: BTreeMap<StableTree, Vec<u32>> =
        [(StableTree::interior(n), Vec::new())].into_iter().collect();
    for i in 1..=n {
        for _ in 0..k.parts()[i as usize - 1] {
            let mut next = BTreeMap::new();
            for (t, word) in &current {
                for t2 in slide_i(t, i)? {
                    let j = vertex_order_position(&t2, i);
                    let mut w2 = word.clone();
                    assert!(
                        j <= w2.len(),
                        "insertion position exceeds the word: i={i} j={j} word={w2:?} tree={t2}"
                    );
                    w2.insert(j, i);
                    let previous = next.insert(t2, w2);
                    assert!(previous.is_none(), "duplicate stratum in word encoding");
                }
            }
            current = next;
        }
    }
    Ok(current)
}

/// The nth Bell number via the Bell triangle.
pub fn bell(n: u32) -> BigUint {
    let mut row = vec![BigUint::from(1u32)];
    for _ in 0..n {
        let mut next = vec![row.last().unwrap().clone()];
        for x in &row {
            let last = next.last().unwrap().clone();
            next.push(last + x);
        }
        row = next;
    }
    row[0].clone()
}
