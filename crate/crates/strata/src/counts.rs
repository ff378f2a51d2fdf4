//! Closed-form and enumeration-backed count references: multinomials, odd
//! double factorials, the asymmetric multinomials counted by omega slide
//! sets, and the Catalan / almost-Catalan suffix-sum predicates.

use crate::tree_core::{Composition, TreeError};
use num::BigUint;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// n! / (k_1! ... k_n!) for a composition with sum n.
pub fn multinomial(k: &Composition) -> Result<BigUint, TreeError> {
    if k.total() != k.n() {
        return Err(TreeError::BadComposition);
    }
    let mut num = BigUint::from(1u32);
    for i in 1..=k.n() as u64 {
        num *= i;
    }
    for &p in k.parts() {
        for i in 1..=p as u64 {
            num /= i;
        }
    }
    Ok(num)
}

/// (2n - 1)!! = (2n - 1)(2n - 3) ... 3 * 1.
pub fn double_factorial_odd(n: u32) -> BigUint {
    let mut out = BigUint::from(1u32);
    let mut i = 1u64;
    while i <= 2 * n as u64 - 1 {
        out *= i;
        i += 2;
    }
    out
}

/// Suffix-sum condition k_n + ... + k_{n-i+1} >= i for all i.
pub fn is_catalan(k: &Composition) -> bool {
    let mut suffix = 0u64;
    for (i, &p) in k.parts().iter().rev().enumerate() {
        suffix += p as u64;
        if suffix < (i + 1) as u64 {
            return false;
        }
    }
    true
}

/// Relaxed suffix-sum condition k_n + ... + k_{n-i+1} >= i - 1 for all i.
pub fn is_almost_catalan(k: &Composition) -> bool {
    let mut suffix = 0u64;
    for (i, &p) in k.parts().iter().rev().enumerate() {
        suffix += p as u64;
        if suffix + 1 < (i + 1) as u64 {
            return false;
        }
    }
    true
}

fn asym_cache() -> &'static Mutex<HashMap<Vec<u32>, BigUint>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u32>, BigUint>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The asymmetric multinomial: the size of the omega slide set, cached.
pub fn asym_multinomial(k: &Composition) -> Result<BigUint, TreeError> {
    if k.total() != k.n() {
        return Err(TreeError::BadComposition);
    }
    if let Some(v) = asym_cache().lock().unwrap().get(k.parts()) {
        return Ok(v.clone());
    }
    let count = BigUint::from(crate::slide_engine::slide_set_omega(k)?.len());
    asym_cache()
        .lock()
        .unwrap()
        .insert(k.parts().to_vec(), count.clone());
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&comp(&[1, 1, 1])).unwrap(), BigUint::from(6u32));
        assert_eq!(multinomial(&comp(&[1, 0, 2])).unwrap(), BigUint::from(3u32));
        assert_eq!(multinomial(&comp(&[0, 0, 3])).unwrap(), BigUint::from(1u32));
        assert!(multinomial(&comp(&[1, 0, 0])).is_err());
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial_odd(1), BigUint::from(1u32));
        assert_eq!(double_factorial_odd(3), BigUint::from(15u32));
        assert_eq!(double_factorial_odd(7), BigUint::from(135135u32));
    }

    #[test]
    fn catalan_predicates() {
        assert!(is_catalan(&comp(&[1, 1, 1])));
        assert!(!is_catalan(&comp(&[2, 1, 0])));
        assert!(is_almost_catalan(&comp(&[2, 1, 0])));
        assert!(!is_almost_catalan(&comp(&[3, 0, 0])));
    }

    #[test]
    fn asym_multinomial_values() {
        assert_eq!(asym_multinomial(&comp(&[1, 0, 2])).unwrap(), BigUint::from(2u32));
        assert_eq!(
            asym_multinomial(&comp(&[0, 0, 2, 2])).unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(asym_multinomial(&comp(&[2, 1, 0])).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn asym_bounded_by_multinomial_and_sums_to_double_factorial() {
        for n in 1..=4u32 {
            let mut total = BigUint::from(0u32);
            for k in Composition::all_full(n) {
                let asym = asym_multinomial(&k).unwrap();
                assert!(asym <= multinomial(&k).unwrap());
                total += asym;
            }
            assert_eq!(total, double_factorial_odd(n));
        }
    }
}
