//! Seeded random rationals standing in for generic complex parameters.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::scalar::Scalar;

const PRIMES: &[i64] = &[
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
];

/// Deterministic source of sample parameters.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A non-integer rational whose reduced denominator is a prime above 100.
    pub fn generic(&mut self) -> Scalar {
        let den = PRIMES[self.rng.gen_range(0..PRIMES.len())];
        loop {
            let num = self.rng.gen_range(-50 * den..=50 * den);
            if num % den != 0 {
                return Scalar::new(num, den);
            }
        }
    }

    pub fn generic_vec(&mut self, n: usize) -> Vec<Scalar> {
        (0..n).map(|_| self.generic()).collect()
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn samples_are_reproducible_and_generic() {
        let a = Sampler::new(7).generic_vec(20);
        let b = Sampler::new(7).generic_vec(20);
        assert_eq!(a, b);
        for x in &a {
            assert!(!x.is_integer());
            assert!(x.denom() > &BigInt::from(100));
        }
        assert_ne!(a, Sampler::new(8).generic_vec(20));
    }
}
