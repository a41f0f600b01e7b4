//! Primality, prime enumeration, modular arithmetic, CRT reconstruction and
//! the prime-product lower-bound check used by the residue recovery driver.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NtError {
    #[error("n must be at least 4, got {0}")]
    DomainError(u64),
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),
    #[error("empty residue system")]
    EmptySystem,
    #[error("duplicate modulus {0}")]
    DuplicateModulus(u64),
    #[error("residue {0} not reduced modulo {1}")]
    ResidueNotReduced(u64, u64),
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if k == p {
            return true;
        }
        if k % p == 0 {
            return false;
        }
    }
    let mut d = k - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these witnesses decide primality for every k < 2^64
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, k);
        if x == 1 || x == k - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, k);
            if x == k - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `q` with `a < q < b`, ascending.
pub fn primes_strictly_between(a: u64, b: u64) -> Vec<u64> {
    (a.saturating_add(1)..b).filter(|&q| is_prime(q)).collect()
}

/// Odd primes in ascending order: 3, 5, 7, 11, ...
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&k| is_prime(k))
}

/// Result of checking that the product of primes strictly between `n` and
/// `n^2` reaches `n! * 2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeProductReport {
    pub n: u64,
    pub product: BigUint,
    pub bound: BigUint,
    pub holds: bool,
}

/// Compute the product of primes strictly between `n` and `n^2`, the bound
/// `n! * 2^n`, and whether the product is at least the bound.
pub fn lemma1_holds(n: u64) -> Result<PrimeProductReport, NtError> {
    if n < 4 {
        return Err(NtError::DomainError(n));
    }
    let mut product = BigUint::one();
    for p in primes_strictly_between(n, n * n) {
        product *= BigUint::from(p);
    }
    let mut bound = BigUint::one();
    for k in 2..=n {
        bound *= BigUint::from(k);
    }
    bound <<= n as usize;
    let holds = product >= bound;
    Ok(PrimeProductReport {
        n,
        product,
        bound,
        holds,
    })
}

/// The unique `b` in `[1, p)` with `a * b = 1 (mod p)`, for odd prime `p`.
pub fn mod_inverse(a: u64, p: u64) -> Result<u64, NtError> {
    if a % p == 0 {
        return Err(NtError::NotInvertible(a, p));
    }
    // Fermat: a^(p-2) mod p
    Ok(pow_mod(a, p - 2, p))
}

/// Residues modulo pairwise distinct odd primes, feeding CRT reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSystem {
    pairs: Vec<(u64, u64)>,
}

impl ResidueSystem {
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<Self, NtError> {
        let mut seen = std::collections::HashSet::new();
        for &(p, r) in &pairs {
            if !seen.insert(p) {
                return Err(NtError::DuplicateModulus(p));
            }
            if r >= p {
                return Err(NtError::ResidueNotReduced(r, p));
            }
        }
        Ok(ResidueSystem { pairs })
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn modulus_product(&self) -> BigUint {
        self.pairs
            .iter()
            .fold(BigUint::one(), |acc, &(p, _)| acc * BigUint::from(p))
    }
}

/// The unique `x` in `[0, prod(moduli))` matching every residue.
pub fn crt_reconstruct(rs: &ResidueSystem) -> Result<BigUint, NtError> {
    if rs.pairs.is_empty() {
        return Err(NtError::EmptySystem);
    }
    let big = rs.modulus_product();
    let mut acc = BigUint::ZERO;
    for &(p, r) in &rs.pairs {
        let rest = &big / BigUint::from(p);
        let rest_mod_p = (&rest % BigUint::from(p))
            .to_u64_digits()
            .first()
            .copied()
            .unwrap_or(0);
        let inv = mod_inverse(rest_mod_p, p)?;
        acc += rest * BigUint::from(mul_mod(r, inv, p));
    }
    Ok(acc % big)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    /// Trial-division oracle, independent of the Miller-Rabin path.
    fn is_prime_trial(k: u64) -> bool {
        if k < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= k {
            if k % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn primality_basics() {
        assert!(is_prime(2));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert_eq!(is_prime(22501), is_prime_trial(22501));
    }

    #[test]
    fn primality_matches_trial_division() {
        for k in 0..5000 {
            assert_eq!(is_prime(k), is_prime_trial(k), "k = {k}");
        }
    }

    #[test]
    fn primes_between_examples() {
        assert_eq!(primes_strictly_between(4, 16), vec![5, 7, 11, 13]);
        assert_eq!(primes_strictly_between(3, 4), Vec::<u64>::new());
        assert_eq!(primes_strictly_between(6, 12), vec![7, 11]);
    }

    #[test]
    fn prime_product_bound_at_4() {
        let r = lemma1_holds(4).unwrap();
        assert_eq!(r.product, BigUint::from(5005u64));
        assert_eq!(r.bound, BigUint::from(384u64));
        assert!(r.holds);
    }

    #[test]
    fn prime_product_bound_rejects_small_n() {
        assert_eq!(lemma1_holds(3), Err(NtError::DomainError(3)));
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(1, 5), Ok(1));
        assert_eq!(mod_inverse(8, 5), Ok(2));
        assert_eq!(mod_inverse(10, 5), Err(NtError::NotInvertible(10, 5)));
    }

    #[test]
    fn crt_examples() {
        let rs = ResidueSystem::new(vec![(3, 2), (5, 2)]).unwrap();
        assert_eq!(crt_reconstruct(&rs).unwrap().to_u64(), Some(2));
        let rs = ResidueSystem::new(vec![(3, 1), (5, 2)]).unwrap();
        assert_eq!(crt_reconstruct(&rs).unwrap().to_u64(), Some(7));
        let rs = ResidueSystem::new(vec![(3, 0), (5, 0), (7, 0)]).unwrap();
        assert_eq!(crt_reconstruct(&rs).unwrap().to_u64(), Some(0));
        assert_eq!(
            crt_reconstruct(&ResidueSystem::new(vec![]).unwrap()),
            Err(NtError::EmptySystem)
        );
    }

    #[test]
    fn residue_system_validation() {
        assert_eq!(
            ResidueSystem::new(vec![(3, 1), (3, 2)]),
            Err(NtError::DuplicateModulus(3))
        );
        assert_eq!(
            ResidueSystem::new(vec![(3, 4)]),
            Err(NtError::ResidueNotReduced(4, 3))
        );
    }
}
