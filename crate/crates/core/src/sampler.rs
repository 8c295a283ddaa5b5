//! Sampler identifiers such as `SOBOL-128` or `UNIFORM-inf`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lds::Generator;

/// Point sizes the experiment grid uses for cached sets.
pub const CACHE_SIZES: [usize; 5] = [16, 32, 64, 128, 256];

/// Generator kind plus cache size (`None` means an endless stream).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SamplerSpec {
    pub kind: Generator,
    pub cache: Option<usize>,
}

impl SamplerSpec {
    pub fn endless(kind: Generator) -> Self {
        Self { kind, cache: None }
    }

    pub fn cached(kind: Generator, k: usize) -> Self {
        Self {
            kind,
            cache: Some(k),
        }
    }

    /// Cache size as written in CSV files.
    pub fn cache_label(&self) -> String {
        self.cache.map_or_else(|| "inf".to_string(), |k| k.to_string())
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.cache) {
            (Generator::Optimized | Generator::Imported, None) => Err(Error::InvalidArgument(format!(
                "{} needs a finite cache size",
                self.kind
            ))),
            (_, Some(0)) => Err(Error::InvalidArgument("cache size must be positive".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SamplerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.kind, self.cache_label())
    }
}

impl FromStr for SamplerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, cache) = s
            .rsplit_once(['-', ':'])
            .ok_or_else(|| Error::InvalidArgument(format!("sampler {s:?} is not KIND-SIZE")))?;
        let kind: Generator = kind.parse()?;
        let cache = match cache.to_ascii_lowercase().as_str() {
            "inf" | "∞" => None,
            k => Some(k.parse::<usize>().map_err(|_| {
                Error::InvalidArgument(format!("bad cache size {k:?} in sampler {s:?}"))
            })?),
        };
        let spec = SamplerSpec { kind, cache };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: SamplerSpec = "sobol-128".parse().unwrap();
        assert_eq!(s, SamplerSpec::cached(Generator::Sobol, 128));
        assert_eq!(s.to_string(), "SOBOL-128");
        let u: SamplerSpec = "UNIFORM-inf".parse().unwrap();
        assert_eq!(u.cache, None);
        assert_eq!(u.to_string().parse::<SamplerSpec>().unwrap(), u);
        assert_eq!("halton:∞".parse::<SamplerSpec>().unwrap().cache, None);
        assert!("optimized-inf".parse::<SamplerSpec>().is_err());
        assert!("sobol".parse::<SamplerSpec>().is_err());
        assert!("sobol-0".parse::<SamplerSpec>().is_err());
        assert!("grid-16".parse::<SamplerSpec>().is_err());
    }
}
