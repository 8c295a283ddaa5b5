//! Unscrambled Sobol sequence in Gray-code order.
//!
//! Direction numbers come from the bundled `data/sobol_directions.txt`
//! (Joe–Kuo primitive polynomials and initial direction integers). They are
//! expanded to 64 bits so the stream never runs out of indices.

use std::sync::OnceLock;

use super::{Generator, PointSet};
use crate::error::{Error, Result};
use crate::seed::unit_f64;

const BITS: usize = 64;

pub const MAX_SOBOL_DIM: usize = 64;

const DIRECTION_TABLE: &str = include_str!("../../data/sobol_directions.txt");

type Directions = [u64; BITS];

fn directions() -> &'static [Directions] {
    static TABLE: OnceLock<Vec<Directions>> = OnceLock::new();
    TABLE.get_or_init(|| parse_table(DIRECTION_TABLE))
}

fn parse_table(text: &str) -> Vec<Directions> {
    let mut table = Vec::with_capacity(MAX_SOBOL_DIM);
    let mut first = [0u64; BITS];
    for (k, v) in first.iter_mut().enumerate() {
        *v = 1u64 << (BITS - 1 - k);
    }
    table.push(first);

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('d') {
            continue;
        }
        let fields: Vec<u64> = line
            .split_whitespace()
            .map(|f| f.parse().expect("malformed bundled direction table"))
            .collect();
        let (s, a) = (fields[1] as usize, fields[2]);
        table.push(expand(s, a, &fields[3..3 + s]));
    }
    assert_eq!(table.len(), MAX_SOBOL_DIM, "bundled direction table is incomplete");
    table
}

/// Bratley–Fox recurrence on 64-bit direction numbers.
fn expand(s: usize, a: u64, m: &[u64]) -> Directions {
    let mut v = [0u64; BITS];
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut x = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                x ^= v[k - j];
            }
        }
        v[k] = x;
    }
    v
}

/// Sobol points `1, 2, 3, …` (Gray-code order, index 0 skipped).
#[derive(Debug, Clone)]
pub struct SobolStream {
    dim: usize,
    index: u64,
    state: Vec<u64>,
}

impl SobolStream {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if dim > MAX_SOBOL_DIM {
            return Err(Error::DimensionTooLarge {
                dim,
                max: MAX_SOBOL_DIM,
            });
        }
        Ok(Self {
            dim,
            index: 0,
            state: vec![0; dim],
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
        let bit = self.index.trailing_zeros() as usize;
        let table = directions();
        for (k, (state, slot)) in self.state.iter_mut().zip(out.iter_mut()).enumerate() {
            *state ^= table[k][bit];
            *slot = unit_f64(*state);
        }
    }
}

/// The first `2^⌈log₂ n⌉` Sobol points after index 0.
pub fn sobol_set(n: usize, dim: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let size = n.next_power_of_two();
    let mut stream = SobolStream::new(dim)?;
    let mut coords = vec![0.0; size * dim];
    for row in coords.chunks_exact_mut(dim) {
        stream.next_into(row);
    }
    PointSet::new(dim, coords, Generator::Sobol, 0)
}
