use rand::seq::SliceRandom;
use rand::RngCore;
use rand_chacha::ChaCha8Rng;

use super::{HaltonStream, PointSet, SobolStream};
use crate::error::Result;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMode {
    Endless,
    Cached,
}

/// Generator behind an endless source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndlessKind {
    Uniform,
    Halton { scrambled: bool },
    Sobol,
}

#[derive(Debug, Clone)]
enum Inner {
    Cached {
        set: PointSet,
        order: Vec<usize>,
        cursor: usize,
    },
    Uniform(Box<ChaCha8Rng>),
    Halton(HaltonStream),
    Sobol(SobolStream),
}

/// A stream of unit-cube points consumed by the optimizer.
///
/// Single consumer: the source may be moved between threads but draws
/// mutate it.
#[derive(Debug, Clone)]
pub struct SamplerSource {
    dim: usize,
    emitted: u64,
    inner: Inner,
}

impl SamplerSource {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> SourceMode {
        match self.inner {
            Inner::Cached { .. } => SourceMode::Cached,
            _ => SourceMode::Endless,
        }
    }

    /// Number of points drawn so far.
    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    /// Size of the cached set, `None` for endless sources.
    pub fn cache_size(&self) -> Option<usize> {
        match &self.inner {
            Inner::Cached { order, .. } => Some(order.len()),
            _ => None,
        }
    }

    /// Cached-source permutation of the set's indices.
    pub fn permutation(&self) -> Option<&[usize]> {
        match &self.inner {
            Inner::Cached { order, .. } => Some(order),
            _ => None,
        }
    }

    /// Writes the next point into `out[..dim]`.
    pub fn next_into(&mut self, out: &mut [f64]) {
        let out = &mut out[..self.dim];
        match &mut self.inner {
            Inner::Cached { set, order, cursor } => {
                out.copy_from_slice(set.point(order[*cursor]));
                *cursor = (*cursor + 1) % order.len();
            }
            Inner::Uniform(rng) => {
                for v in out.iter_mut() {
                    *v = seed::unit_f64(rng.next_u64());
                }
            }
            Inner::Halton(stream) => stream.next_into(out),
            Inner::Sobol(stream) => stream.next_into(out),
        }
        self.emitted += 1;
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        self.next_into(&mut p);
        p
    }

    /// `n` consecutive points, row-major.
    pub fn draw(&mut self, n: usize) -> Vec<f64> {
        let mut buf = vec![0.0; n * self.dim];
        for row in buf.chunks_exact_mut(self.dim) {
            self.next_into(row);
        }
        buf
    }
}

/// Wraps `ps` as a cycling source whose order is permuted once from `seed`.
pub fn make_cached_source(ps: PointSet, seed: u64) -> SamplerSource {
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.shuffle(&mut seed::rng(seed));
    SamplerSource {
        dim: ps.dim(),
        emitted: 0,
        inner: Inner::Cached {
            set: ps,
            order,
            cursor: 0,
        },
    }
}

/// Endless source; Halton and Sobol streams start at index 1 and never reset.
pub fn make_endless_source(kind: EndlessKind, dim: usize, seed: u64) -> Result<SamplerSource> {
    let inner = match kind {
        EndlessKind::Uniform => {
            if dim == 0 {
                return Err(crate::Error::InvalidArgument("dimension must be positive".into()));
            }
            Inner::Uniform(Box::new(seed::rng(seed)))
        }
        EndlessKind::Halton { scrambled } => Inner::Halton(HaltonStream::new(dim, seed, scrambled)?),
        EndlessKind::Sobol => Inner::Sobol(SobolStream::new(dim)?),
    };
    Ok(SamplerSource {
        dim,
        emitted: 0,
        inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::{sobol_set, uniform_set};

    fn sorted_rows(coords: &[f64], dim: usize) -> Vec<Vec<u64>> {
        let mut rows: Vec<Vec<u64>> = coords
            .chunks_exact(dim)
            .map(|r| r.iter().map(|v| v.to_bits()).collect())
            .collect();
        rows.sort();
        rows
    }

    #[test]
    fn cached_source_cycles_without_repermuting() {
        let ps = uniform_set(4, 3, 5).unwrap();
        let mut src = make_cached_source(ps.clone(), 1);
        let draws = src.draw(8);
        assert_eq!(draws[..12], draws[12..]);
        assert_eq!(sorted_rows(&draws[..12], 3), sorted_rows(ps.coords(), 3));
        assert_eq!(src.emitted(), 8);
        assert_eq!(src.mode(), SourceMode::Cached);
        assert_eq!(src.cache_size(), Some(4));
    }

    #[test]
    fn seeds_change_order_not_content() {
        let ps = sobol_set(16, 2).unwrap();
        let a = make_cached_source(ps.clone(), 1).draw(16);
        let b = make_cached_source(ps.clone(), 2).draw(16);
        assert_ne!(a, b);
        assert_eq!(sorted_rows(&a, 2), sorted_rows(&b, 2));
    }

    #[test]
    fn endless_halton_skips_origin() {
        let mut src = make_endless_source(EndlessKind::Halton { scrambled: false }, 2, 0).unwrap();
        assert_eq!(src.next_point(), vec![0.5, 1.0 / 3.0]);
        assert_eq!(src.mode(), SourceMode::Endless);
        assert_eq!(src.cache_size(), None);
    }

    #[test]
    fn endless_uniform_draws_are_distinct() {
        let mut src = make_endless_source(EndlessKind::Uniform, 1, 9).unwrap();
        let draws = src.draw(1000);
        let mut bits: Vec<u64> = draws.iter().map(|v| v.to_bits()).collect();
        bits.sort_unstable();
        bits.dedup();
        assert_eq!(bits.len(), 1000);
    }

    #[test]
    fn endless_sobol_matches_fixed_set() {
        let mut src = make_endless_source(EndlessKind::Sobol, 2, 0).unwrap();
        let draws = src.draw(64);
        assert_eq!(draws, sobol_set(64, 2).unwrap().coords());
    }

    #[test]
    fn endless_rejects_unsupported_dims() {
        assert!(make_endless_source(EndlessKind::Sobol, 65, 0).is_err());
        assert!(make_endless_source(EndlessKind::Halton { scrambled: true }, 65, 0).is_err());
    }
}
