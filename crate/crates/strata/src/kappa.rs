//! Boundary-strata expansions of kappa classes and their generalized
//! multi-index versions, with integer multiplicities, computed by sliding an
//! auxiliary leaf and pushing forward along the forgetful map.

use crate::slide_engine::slide_set_psi;
use crate::tree_core::{Composition, Leaf, StableTree, StrataSum, TreeError};

fn degree_at(t: &StableTree, leaf: Leaf) -> Result<usize, TreeError> {
    Ok(t.branches_at(leaf)?.blocks.len() + 1)
}

fn last_leaf_composition(n: u32, tail: &[u32]) -> Result<Composition, TreeError> {
    let mut parts = vec![0u32; n as usize];
    parts.extend_from_slice(tail);
    Composition::new(parts)
}

/// The kappa_i class on n marked points: slide an auxiliary leaf i + 1 times,
/// keep trees where it sits at a trivalent vertex, and forget it.
pub fn kappa_expansion(n: u32, i: u32) -> Result<StrataSum, TreeError> {
    if i > n {
        return Err(TreeError::BadDegree);
    }
    let k = last_leaf_composition(n, &[i + 1])?;
    let aux = Leaf::Num(n + 1);
    let mut sum = StrataSum::empty(n);
    for (t, m) in slide_set_psi(&k)?.iter() {
        if degree_at(t, aux)? == 3 {
            sum.add(t.forget_leaf(aux)?, m);
        }
    }
    Ok(sum)
}

/// The same class via the degree-weight route: slide the auxiliary leaf only
/// i times and weight each tree by deg(v) - 3 at the auxiliary leaf.
pub fn kappa_expansion_via_degrees(n: u32, i: u32) -> Result<StrataSum, TreeError> {
    if i > n {
        return Err(TreeError::BadDegree);
    }
    let k = last_leaf_composition(n, &[i])?;
    let aux = Leaf::Num(n + 1);
    let mut sum = StrataSum::empty(n);
    for (t, m) in slide_set_psi(&k)?.iter() {
        let weight = (degree_at(t, aux)? - 3) as u64;
        if weight > 0 {
            sum.add(t.forget_leaf(aux)?, m * weight);
        }
    }
    Ok(sum)
}

/// The generalized class for a multi-index r = (r_1, ..., r_m): slide m
/// auxiliary leaves, require each to sit at a trivalent vertex once the
/// higher ones are forgotten, and push forward stepwise.
pub fn generalized_kappa(n: u32, r: &[u32]) -> Result<StrataSum, TreeError> {
    let m = r.len() as u32;
    let total: u64 = r.iter().map(|&x| x as u64).sum();
    if m == 0 || total < m as u64 || (total - m as u64) > n as u64 {
        return Err(TreeError::BadComposition);
    }
    let k = last_leaf_composition(n, r)?;
    let mut sum = StrataSum::empty(n);
    'terms: for (t, mult) in slide_set_psi(&k)?.iter() {
        let mut current = t.clone();
        for j in (n + 1..=n + m).rev() {
            let aux = Leaf::Num(j);
            if degree_at(&current, aux)? != 3 {
                continue 'terms;
            }
            current = current.forget_leaf(aux)?;
        }
        sum.add(current, mult);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_core::side;

    fn tree(n: u32, sides: &[&[&str]]) -> StableTree {
        StableTree::from_splits(n, sides.iter().map(|s| side(s))).unwrap()
    }

    #[test]
    fn kappa_one_on_five_points() {
        let sum = kappa_expansion(2, 1).unwrap();
        assert_eq!(sum.mult(&tree(2, &[&["c", "1", "2"]])), 2);
        assert_eq!(sum.mult(&tree(2, &[&["1", "2"]])), 1);
        assert_eq!(sum.mult(&tree(2, &[&["c", "2"]])), 1);
        assert_eq!(sum.mult(&tree(2, &[&["c", "1"]])), 1);
        assert_eq!(sum.len(), 4);
        assert_eq!(sum.total_multiplicity(), 5);
    }

    #[test]
    fn kappa_zero_is_a_multiple_of_the_fundamental_class() {
        for n in 0..=4u32 {
            let sum = kappa_expansion(n, 0).unwrap();
            assert_eq!(sum.len(), 1);
            assert_eq!(sum.mult(&StableTree::interior(n)), (n + 1) as u64);
        }
    }

    #[test]
    fn kappa_one_total_multiplicity() {
        // (n - 1) 2^n + 1 boundary divisors with multiplicity.
        for n in 2..=5u32 {
            let sum = kappa_expansion(n, 1).unwrap();
            assert_eq!(
                sum.total_multiplicity(),
                (n as u64 - 1) * (1 << n) + 1,
                "n={n}"
            );
        }
    }

    #[test]
    fn route_equivalence() {
        for n in 1..=4u32 {
            for i in 0..=n.min(3) {
                assert_eq!(
                    kappa_expansion(n, i).unwrap(),
                    kappa_expansion_via_degrees(n, i).unwrap(),
                    "n={n} i={i}"
                );
            }
        }
    }

    #[test]
    fn every_term_has_the_right_codim() {
        for n in 1..=4u32 {
            for i in 0..=n {
                for (t, _) in kappa_expansion(n, i).unwrap().iter() {
                    assert_eq!(t.codim(), i as usize);
                }
            }
        }
    }

    #[test]
    fn generalized_kappa_specializes() {
        for n in 1..=4u32 {
            for i in 0..=n.min(2) {
                assert_eq!(
                    generalized_kappa(n, &[i + 1]).unwrap(),
                    kappa_expansion(n, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn generalized_kappa_r1_total() {
        for n in 1..=4u32 {
            let sum = generalized_kappa(n, &[1]).unwrap();
            assert_eq!(sum.total_multiplicity(), (n + 1) as u64);
        }
    }

    #[test]
    fn generalized_kappa_two_two() {
        let sum = generalized_kappa(2, &[2, 2]).unwrap();
        // Codim (2 + 2) - 2 = 2 terms on two marked points: all are points.
        for (t, _) in sum.iter() {
            assert_eq!(t.codim(), 2);
        }
        assert!(sum.total_multiplicity() > 0);
    }

    #[test]
    fn degree_bound_is_enforced() {
        assert_eq!(kappa_expansion(2, 3).unwrap_err(), TreeError::BadDegree);
        assert_eq!(
            generalized_kappa(2, &[2, 2, 2]).unwrap_err(),
            TreeError::BadComposition
        );
    }
}
