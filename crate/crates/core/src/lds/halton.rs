use rand::seq::SliceRandom;

use super::{Generator, PointSet, ONE_MINUS_EPS};
use crate::error::{Error, Result};
use crate::seed;

/// The first 64 primes; coordinate `k` of a Halton point uses base `PRIMES[k]`.
pub const PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293,
    307, 311,
];

pub const MAX_HALTON_DIM: usize = PRIMES.len();

/// Number of leading digits that go through the scrambling permutation.
const SCRAMBLED_DIGITS: usize = 32;

/// Base-`base` digit reversal of `index`, placed after the radix point.
pub fn radical_inverse(index: u64, base: u32) -> Result<f64> {
    if base < 2 {
        return Err(Error::InvalidArgument(format!("radical inverse base {base} < 2")));
    }
    Ok(digit_reversal(index, base, None))
}

fn digit_reversal(mut index: u64, base: u32, perm: Option<&[u32]>) -> f64 {
    let b = u64::from(base);
    let inv_base = 1.0 / f64::from(base);
    let mut reversed: u128 = 0;
    let mut inv_base_n = 1.0;
    let mut digit_pos = 0;
    while index > 0 {
        let next = index / b;
        let mut digit = (index - next * b) as u32;
        if let Some(perm) = perm {
            if digit_pos < SCRAMBLED_DIGITS {
                digit = perm[digit as usize];
            }
        }
        reversed = reversed * u128::from(b) + u128::from(digit);
        inv_base_n *= inv_base;
        index = next;
        digit_pos += 1;
    }
    (reversed as f64 * inv_base_n).min(ONE_MINUS_EPS)
}

/// Random digit permutation for `base` with 0 kept fixed.
fn digit_permutation(base: u32, seed: u64) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..base).collect();
    let mut rng = seed::rng(seed::mix(seed, &[u64::from(base)]));
    perm[1..].shuffle(&mut rng);
    perm
}

/// Halton sequence generator starting at index 1.
#[derive(Debug, Clone)]
pub struct HaltonStream {
    dim: usize,
    index: u64,
    perms: Option<Vec<Vec<u32>>>,
}

impl HaltonStream {
    pub fn new(dim: usize, seed: u64, scrambled: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if dim > MAX_HALTON_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                max: MAX_HALTON_DIM,
            });
        }
        let perms = scrambled.then(|| {
            PRIMES[..dim]
                .iter()
                .map(|&b| digit_permutation(b, seed))
                .collect()
        });
        Ok(Self {
            dim,
            index: 0,
            perms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the most recently emitted point (0 before the first draw).
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_into(&mut self, out: &mut [f64]) {
        self.index += 1;
        for (k, slot) in out.iter_mut().enumerate().take(self.dim) {
            let perm = self.perms.as_ref().map(|p| p[k].as_slice());
            *slot = digit_reversal(self.index, PRIMES[k], perm);
        }
    }
}

/// Points `1..=n` of the (optionally scrambled) Halton sequence.
pub fn halton_set(n: usize, dim: usize, seed: u64, scrambled: bool) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut stream = HaltonStream::new(dim, seed, scrambled)?;
    let mut coords = vec![0.0; n * dim];
    for row in coords.chunks_exact_mut(dim) {
        stream.next_into(row);
    }
    PointSet::new(dim, coords, Generator::Halton, if scrambled { seed } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(radical_inverse(0, 2).unwrap(), 0.0);
        assert_eq!(radical_inverse(3, 2).unwrap(), 0.75);
        assert!((radical_inverse(2, 3).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(radical_inverse(5, 1).is_err());
        assert!(radical_inverse(5, 0).is_err());
    }

    #[test]
    fn radical_inverse_stays_below_one() {
        assert!(radical_inverse(u64::MAX, 2).unwrap() < 1.0);
        assert!(radical_inverse(u64::MAX, 311).unwrap() < 1.0);
    }

    #[test]
    fn unscrambled_first_points() {
        // Indices start at 1, so the origin never appears.
        let s = halton_set(2, 2, 0, false).unwrap();
        assert_eq!(s.point(0), &[0.5, 1.0 / 3.0]);
        assert_eq!(s.point(1)[0], 0.25);
        assert!((s.point(1)[1] - 2.0 / 3.0).abs() < 1e-15);
        let s = halton_set(3, 1, 0, false).unwrap();
        assert_eq!(s.point(2)[0], 0.75);
    }

    #[test]
    fn rejects_too_many_dims() {
        assert!(matches!(
            halton_set(4, 65, 0, false),
            Err(Error::DimensionTooLarge { dim: 65, .. })
        ));
        assert!(halton_set(4, 64, 1, true).is_ok());
    }

    #[test]
    fn permutations_fix_zero_and_are_bijective() {
        for &b in &PRIMES {
            let p = digit_permutation(b, 99);
            assert_eq!(p[0], 0);
            let mut sorted = p.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..b).collect::<Vec<_>>());
        }
    }

    #[test]
    fn scrambling_is_a_bijection_on_fixed_digit_count() {
        // All indices with exactly two base-5 digits map onto a permuted copy
        // of the same value grid.
        let base = 5u32;
        let perm = digit_permutation(base, 3);
        let mut plain: Vec<u64> = (0..25)
            .map(|i| (digit_reversal(i, base, None) * 25.0).round() as u64)
            .collect();
        let mut scrambled: Vec<u64> = (0..25)
            .map(|i| (digit_reversal(i, base, Some(&perm)) * 25.0).round() as u64)
            .collect();
        plain.sort_unstable();
        scrambled.sort_unstable();
        assert_eq!(plain, scrambled);
        assert_eq!(digit_reversal(0, base, Some(&perm)), 0.0);
    }

    fn correlation(s: &PointSet, a: usize, b: usize) -> f64 {
        let n = s.len() as f64;
        let (ma, mb) = s
            .points()
            .fold((0.0, 0.0), |(x, y), p| (x + p[a] / n, y + p[b] / n));
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for p in s.points() {
            sab += (p[a] - ma) * (p[b] - mb);
            saa += (p[a] - ma).powi(2);
            sbb += (p[b] - mb).powi(2);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn scrambling_breaks_high_base_correlation() {
        let plain = halton_set(256, 8, 0, false).unwrap();
        let scrambled = halton_set(256, 8, 1, true).unwrap();
        assert!(scrambled.coords().iter().all(|v| (0.0..1.0).contains(v)));
        let c_plain = correlation(&plain, 6, 7).abs();
        let c_scr = correlation(&scrambled, 6, 7).abs();
        assert!(c_scr < c_plain, "scrambled {c_scr} vs plain {c_plain}");
    }

    #[test]
    fn stream_matches_set() {
        let set = halton_set(50, 4, 11, true).unwrap();
        let mut stream = HaltonStream::new(4, 11, true).unwrap();
        let mut buf = [0.0; 4];
        for p in set.points() {
            stream.next_into(&mut buf);
            assert_eq!(p, &buf);
        }
        assert_eq!(stream.index(), 50);
    }
}
