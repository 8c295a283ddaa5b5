//! Plain-text point-set files.
//!
//! One point per line, coordinates separated by whitespace. Lines starting
//! with `#` are comments; the writer emits a metadata comment of the form
//! `# dim=<d> n=<k> generator=<tag> seed=<s>`. Coordinates are written in
//! shortest round-trip decimal form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Generator, PointSet};
use crate::error::{Error, Result};

/// Renders `ps` in the point-set file format.
pub fn write_point_set(ps: &PointSet) -> String {
    let mut out = format!(
        "# dim={} n={} generator={} seed={}\n",
        ps.dim(),
        ps.len(),
        ps.generator(),
        ps.seed()
    );
    for p in ps.points() {
        for (k, v) in p.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_point_set(ps: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_point_set(ps)).map_err(|e| Error::io(path, e))
}

/// Parses point-set text; the result is tagged `IMPORTED` with seed 0.
pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut found = 0;
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                token: token.to_string(),
            })?;
            if !(0.0..1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    line: line_no,
                    value,
                });
            }
            coords.push(value);
            found += 1;
        }
        match dim {
            None => dim = Some(found),
            Some(expected) if expected != found => {
                return Err(Error::DimensionMismatch {
                    line: line_no,
                    expected,
                    found,
                })
            }
            _ => {}
        }
    }
    let dim = dim.ok_or(Error::EmptySet)?;
    PointSet::new(dim, coords, Generator::Imported, 0)
}

pub fn load_point_set(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_point_set(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::{halton_set, uniform_set};
    use proptest::prelude::*;

    #[test]
    fn round_trip_through_file() {
        let dir = std::env::temp_dir().join(format!("qmc-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("set.txt");
        let ps = halton_set(33, 5, 4, true).unwrap();
        save_point_set(&ps, &path).unwrap();
        let back = load_point_set(&path).unwrap();
        assert_eq!(back.coords(), ps.coords());
        assert_eq!(back.generator(), Generator::Imported);
        assert_eq!(back.seed(), 0);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn metadata_header() {
        let ps = uniform_set(2, 3, 17).unwrap();
        let text = write_point_set(&ps);
        assert!(text.starts_with("# dim=3 n=2 generator=UNIFORM seed=17\n"));
    }

    #[test]
    fn out_of_range_row() {
        assert!(matches!(
            parse_point_set("0.5 1.2\n"),
            Err(Error::OutOfRange { line: 1, value }) if value == 1.2
        ));
    }

    #[test]
    fn ragged_rows() {
        assert!(matches!(
            parse_point_set("# comment\n0.1 0.2\n0.3 0.4 0.5\n"),
            Err(Error::DimensionMismatch {
                line: 3,
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn malformed_token() {
        assert!(matches!(
            parse_point_set("0.1 abc\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_point_set("# only comments\n"), Err(Error::EmptySet)));
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(
            dim in 1usize..6,
            rows in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 1..40),
        ) {
            let points: Vec<Vec<f64>> = rows.iter().map(|r| r[..dim].to_vec()).collect();
            let ps = PointSet::from_points(&points, Generator::Uniform, 1).unwrap();
            let back = parse_point_set(&write_point_set(&ps)).unwrap();
            prop_assert_eq!(back.coords(), ps.coords());
            prop_assert_eq!(back.dim(), dim);
        }
    }
}
