//! Unit-cube point sets and the sampler sources that feed them to the
//! optimizer.
//!
//! A [`PointSet`] is an ordered, finite collection of points in `[0, 1)^d`.
//! Sequence generators (Halton, Sobol) start at index 1, so their points lie
//! strictly inside the cube and survive the inverse normal transform.

mod halton;
mod io;
mod sobol;
mod source;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

pub use halton::{halton_set, radical_inverse, HaltonStream, MAX_HALTON_DIM, PRIMES};
pub use io::{load_point_set, parse_point_set, save_point_set, write_point_set};
pub use sobol::{sobol_set, SobolStream, MAX_SOBOL_DIM};
pub use source::{make_cached_source, make_endless_source, EndlessKind, SamplerSource, SourceMode};

use crate::error::{Error, Result};
use crate::seed;

/// Largest double below one.
pub(crate) const ONE_MINUS_EPS: f64 = 1.0 - f64::EPSILON / 2.0;

/// How a point set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Uniform,
    Halton,
    Sobol,
    Optimized,
    Imported,
}

impl Generator {
    pub fn as_str(self) -> &'static str {
        match self {
            Generator::Uniform => "UNIFORM",
            Generator::Halton => "HALTON",
            Generator::Sobol => "SOBOL",
            Generator::Optimized => "OPTIMIZED",
            Generator::Imported => "IMPORTED",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "UNIFORM" => Ok(Generator::Uniform),
            "HALTON" => Ok(Generator::Halton),
            "SOBOL" => Ok(Generator::Sobol),
            "OPTIMIZED" | "OPT" => Ok(Generator::Optimized),
            "IMPORTED" => Ok(Generator::Imported),
            other => Err(Error::InvalidArgument(format!("unknown generator {other:?}"))),
        }
    }
}

/// Ordered points in `[0, 1)^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    generator: Generator,
    seed: u64,
}

impl PointSet {
    /// Builds a set from row-major coordinates, checking every invariant.
    pub fn new(dim: usize, coords: Vec<f64>, generator: Generator, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptySet);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                line: coords.len() / dim + 1,
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some((i, &value)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..1.0).contains(*v))
        {
            return Err(Error::OutOfRange {
                line: i / dim + 1,
                value,
            });
        }
        Ok(Self {
            dim,
            coords,
            generator,
            seed,
        })
    }

    pub fn from_points(points: &[Vec<f64>], generator: Generator, seed: u64) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptySet)?.len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    line: i + 1,
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords, generator, seed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// New set made of the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize], generator: Generator, seed: u64) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::new(self.dim, coords, generator, seed)
    }
}

/// `n` i.i.d. uniform points from a seeded ChaCha8 stream.
pub fn uniform_set(n: usize, dim: usize, seed: u64) -> Result<PointSet> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidArgument("n and dim must be positive".into()));
    }
    let mut rng = seed::rng(seed);
    let coords = (0..n * dim)
        .map(|_| seed::unit_f64(rng.next_u64()))
        .collect();
    PointSet::new(dim, coords, Generator::Uniform, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_deterministic() {
        let a = uniform_set(1, 2, 7).unwrap();
        let b = uniform_set(1, 2, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, uniform_set(1, 2, 8).unwrap());
    }

    #[test]
    fn uniform_shape() {
        let s = uniform_set(2, 3, 0).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.points().all(|p| p.len() == 3));
        assert!(s.coords().iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn uniform_mean_is_centered() {
        let s = uniform_set(10_000, 1, 3).unwrap();
        let mean = s.coords().iter().sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn rejects_bad_coordinates() {
        assert!(matches!(
            PointSet::new(2, vec![0.5, 1.2], Generator::Imported, 0),
            Err(Error::OutOfRange { line: 1, .. })
        ));
        assert!(matches!(
            PointSet::new(2, vec![0.5, -0.0, 0.1], Generator::Imported, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            PointSet::new(2, vec![], Generator::Imported, 0),
            Err(Error::EmptySet)
        ));
        assert!(PointSet::new(1, vec![f64::NAN], Generator::Imported, 0).is_err());
    }

    #[test]
    fn generator_tags_parse() {
        for g in [
            Generator::Uniform,
            Generator::Halton,
            Generator::Sobol,
            Generator::Optimized,
            Generator::Imported,
        ] {
            assert_eq!(g.as_str().parse::<Generator>().unwrap(), g);
        }
        assert!("lattice".parse::<Generator>().is_err());
    }
}
