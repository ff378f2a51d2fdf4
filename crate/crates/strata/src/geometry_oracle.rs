//! Symbolic verification layer: moving hyperplanes with exact rational
//! coefficients, their restriction to boundary strata, and the leading-term
//! limit rule. This re-derives every slide independently of the branch
//! moving route in slide_engine, and computes projective coordinates of
//! stratum points for spot checks.

use crate::tree_core::{
    Composition, Leaf, SetPartitionAtLeaf, Split, StableTree, StrataSum, TreeError,
};
use num::BigRational;
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// A formal linear combination of coordinates, indexed by K.
pub type LinearForm<K> = BTreeMap<K, BigRational>;

/// A polynomial in one parameter t whose coefficients are linear forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearFormPoly<K: Ord> {
    terms: BTreeMap<u32, LinearForm<K>>,
}

impl<K: Ord + Clone> LinearFormPoly<K> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LinearFormPoly { terms: BTreeMap::new() }
    }

    /// Add coeff * variable * t^exp.
    pub fn add_term(&mut self, exp: u32, var: K, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let form = self.terms.entry(exp).or_default();
        let entry = form.entry(var.clone()).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            form.remove(&var);
            if form.is_empty() {
                self.terms.remove(&exp);
            }
        }
    }

    /// The terms by exponent.
    pub fn terms(&self) -> &BTreeMap<u32, LinearForm<K>> {
        &self.terms
    }

    /// The minimal exponent with a nonzero form, if any.
    pub fn leading(&self) -> Option<(u32, &LinearForm<K>)> {
        self.terms.iter().next().map(|(&e, f)| (e, f))
    }
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

/// The moving hyperplane for a psi slide of leaf i:
/// z_b + t z_c + t^2 z_1 + ... + t^i z_{i-1} + t^{i+1} z_{i+1} + ... + t^n z_n.
pub fn hyperplane_psi(i: u32, n: u32) -> LinearFormPoly<Leaf> {
    let mut h = LinearFormPoly::zero();
    h.add_term(0, Leaf::B, one());
    h.add_term(1, Leaf::C, one());
    for j in 1..=n {
        if j < i {
            h.add_term(j + 1, Leaf::Num(j), one());
        } else if j > i {
            h.add_term(j, Leaf::Num(j), one());
        }
    }
    h
}

/// The moving hyperplane for an omega slide of leaf i:
/// w_b + t w_c + t^2 w_1 + ... + t^i w_{i-1}.
pub fn hyperplane_omega(i: u32) -> LinearFormPoly<Leaf> {
    let mut h = LinearFormPoly::zero();
    h.add_term(0, Leaf::B, one());
    if i >= 1 {
        h.add_term(1, Leaf::C, one());
    }
    for j in 1..i {
        h.add_term(j + 1, Leaf::Num(j), one());
    }
    h
}

/// Substitute z_r by the block coordinate of r in the branch partition at
/// leaf i: the a-block coordinate is 0, the other blocks are y_1, y_2, ...
/// in block order.
pub fn restrict_to_stratum(
    h: &LinearFormPoly<Leaf>,
    t: &StableTree,
    i: u32,
) -> Result<LinearFormPoly<usize>, TreeError> {
    let sigma = t.branches_at(Leaf::Num(i))?;
    Ok(restrict_to_partition(h, &sigma))
}

/// The same substitution for an explicit branch partition.
pub fn restrict_to_partition(
    h: &LinearFormPoly<Leaf>,
    sigma: &SetPartitionAtLeaf,
) -> LinearFormPoly<usize> {
    let mut out = LinearFormPoly::zero();
    for (&exp, form) in h.terms() {
        for (leaf, coeff) in form {
            let block = sigma.blocks.iter().position(|b| b.contains(leaf));
            match block {
                Some(0) | None => {}
                Some(j) => out.add_term(exp, j, coeff.clone()),
            }
        }
    }
    out
}

/// The limiting equation as t -> 0: the block index whose coordinate must
/// vanish, provided the minimal-exponent form is a single variable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LimitCondition {
    Vanishes(usize),
    Degenerate,
}

/// Read the leading term of a restricted hyperplane.
pub fn limit_condition(h: &LinearFormPoly<usize>) -> LimitCondition {
    match h.leading() {
        Some((_, form)) if form.len() == 1 => {
            LimitCondition::Vanishes(*form.keys().next().unwrap())
        }
        _ => LimitCondition::Degenerate,
    }
}

fn oracle_slide_with(
    t: &StableTree,
    i: u32,
    h: &LinearFormPoly<Leaf>,
) -> Result<BTreeSet<StableTree>, TreeError> {
    let sigma = t.branches_at(Leaf::Num(i))?;
    let restricted = restrict_to_partition(h, &sigma);
    let block = match limit_condition(&restricted) {
        LimitCondition::Vanishes(j) => j,
        LimitCondition::Degenerate => return Err(TreeError::DegenerateRestriction),
    };
    let m = *sigma.blocks[block].iter().next().unwrap();
    // The leading exponent must be the exponent of z_m in h itself: every
    // smaller-exponent coordinate lies in the a-block.
    let (lead_exp, _) = restricted.leading().unwrap();
    let m_exp = h
        .terms()
        .iter()
        .find(|(_, form)| form.contains_key(&m))
        .map(|(&e, _)| e)
        .unwrap();
    assert_eq!(lead_exp, m_exp, "leading exponent mismatch at m = {m}");
    // Independent route: every new stable split separating i and m whose
    // contraction returns t.
    let candidates: Vec<Leaf> = crate::tree_core::leaf_set(t.n())
        .into_iter()
        .filter(|&l| l != Leaf::A && l != m && l != Leaf::Num(i))
        .collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << candidates.len()) {
        let mut side: Split = [Leaf::Num(i)].into_iter().collect();
        for (j, &l) in candidates.iter().enumerate() {
            if mask & (1 << j) != 0 {
                side.insert(l);
            }
        }
        if !t.accepts_split(&side) {
            continue;
        }
        if let Ok(t2) = t.with_split(side) {
            out.insert(t2);
        }
    }
    Ok(out)
}

/// Re-derive the i-slide from the leading-term degeneration of the psi
/// hyperplane, by split enumeration rather than branch surgery.
pub fn oracle_slide(t: &StableTree, i: u32) -> Result<BTreeSet<StableTree>, TreeError> {
    oracle_slide_with(t, i, &hyperplane_psi(i, t.n()))
}

/// Simulate the full iterated limit for a composition, using oracle slides
/// only; must reproduce the slide sets.
pub fn iterated_limit(
    k: &Composition,
    flavor: crate::slide_engine::SlideFlavor,
) -> Result<StrataSum, TreeError> {
    use crate::slide_engine::SlideFlavor;
    let n = k.n();
    let mut current: BTreeSet<StableTree> = match flavor {
        SlideFlavor::Psi => [StableTree::interior(n)].into_iter().collect(),
        SlideFlavor::Omega => [StableTree::interior(0)].into_iter().collect(),
    };
    for i in 1..=n {
        if flavor == SlideFlavor::Omega {
            let mut inserted = BTreeSet::new();
            for t in &current {
                inserted.extend(t.insert_leaf(Leaf::Num(i))?);
            }
            current = inserted;
        }
        let h = match flavor {
            SlideFlavor::Psi => hyperplane_psi(i, n),
            SlideFlavor::Omega => hyperplane_omega(i),
        };
        for _ in 0..k.parts()[i as usize - 1] {
            let mut next = BTreeSet::new();
            for t in &current {
                next.extend(oracle_slide_with(t, i, &h)?);
            }
            current = next;
        }
    }
    let mut sum = StrataSum::empty(n);
    for t in current {
        sum.add(t, 1);
    }
    Ok(sum)
}

/// A point of a boundary stratum: a tree plus exact positions for the
/// branches at one anchor leaf's component, with the a-branch at 0 and the
/// anchor at infinity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StratumPoint {
    /// The ambient stratum.
    pub tree: StableTree,
    /// The leaf whose component is parametrized.
    pub anchor: Leaf,
    /// Position of each non-a block at the anchor, indexed as in the branch
    /// partition (1-based); all distinct and nonzero.
    pub positions: BTreeMap<usize, BigRational>,
}

impl StratumPoint {
    /// Validate the positions against the branch partition.
    pub fn new(
        tree: StableTree,
        anchor: Leaf,
        positions: BTreeMap<usize, BigRational>,
    ) -> Result<Self, TreeError> {
        let sigma = tree.branches_at(anchor)?;
        let expected: BTreeSet<usize> = (1..sigma.blocks.len()).collect();
        if positions.keys().copied().collect::<BTreeSet<_>>() != expected {
            return Err(TreeError::BadParametrization);
        }
        let vals: BTreeSet<&BigRational> = positions.values().collect();
        if vals.len() != positions.len() || positions.values().any(|v| v.is_zero()) {
            return Err(TreeError::BadParametrization);
        }
        Ok(StratumPoint { tree, anchor, positions })
    }
}

/// The projective coordinates of the point under the i-th Kapranov map:
/// one coordinate per leaf in {b, c, 1..n} minus i, constant along blocks.
pub fn kapranov_coords(
    pt: &StratumPoint,
    i: u32,
) -> Result<BTreeMap<Leaf, BigRational>, TreeError> {
    let sigma = pt.tree.branches_at(pt.anchor)?;
    let leaf_i = Leaf::Num(i);
    let block_of = |l: Leaf| sigma.blocks.iter().position(|b| b.contains(&l));
    // The leaf i must be a special point of the anchor's component: either
    // the anchor itself or a leaf attached directly to the same vertex.
    let singleton_block = match block_of(leaf_i) {
        _ if leaf_i == pt.anchor => None,
        Some(j) if j > 0 && sigma.blocks[j].len() == 1 => Some(j),
        _ => return Err(TreeError::BadParametrization),
    };
    let mut out = BTreeMap::new();
    for l in crate::tree_core::leaf_set(pt.tree.n()) {
        if l == Leaf::A || l == leaf_i {
            continue;
        }
        let coord = if l == pt.anchor {
            match singleton_block {
                // The anchor is at infinity; after moving i to infinity the
                // anchor lands at 1.
                Some(_) => one(),
                None => unreachable!("anchor equals i, already skipped"),
            }
        } else {
            let j = block_of(l).expect("every leaf lies in some block");
            match singleton_block {
                None => {
                    if j == 0 {
                        BigRational::zero()
                    } else {
                        pt.positions[&j].clone()
                    }
                }
                Some(bi) => {
                    if j == 0 {
                        BigRational::zero()
                    } else {
                        // Moebius map sending a to 0 and i to infinity:
                        // x -> (0 - x) / (p_i - x).
                        let p = &pt.positions[&j];
                        let q = &pt.positions[&bi];
                        (-p.clone()) / (q - p)
                    }
                }
            }
        };
        out.insert(l, coord);
    }
    Ok(out)
}
