//! On-disk formats: edge lists, dense matrices, CSV tables, JSON.
//!
//! Floats destined for CSV go through [`format_float`], which prints 17
//! significant digits so every `f64` survives a write/parse round trip
//! byte-identically.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Largest node index accepted from an edge list. Dense adjacency
/// matrices above this size would not fit desk-scale memory anyway.
pub const MAX_EDGELIST_NODES: usize = 100_000;

/// Whether edge-list node indices start at 0 or at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Indexing {
    ZeroBased,
    OneBased,
}

/// Parsing options for [`parse_edgelist`].
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct EdgeListOptions {
    pub indexing: Indexing,
    /// Mirror every edge; with this off the file must list both
    /// directions itself to produce a symmetric matrix.
    pub symmetrize: bool,
    /// Keep only a seeded uniform subsample of this many nodes.
    pub subsample: Option<usize>,
    pub seed: u64,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            indexing: Indexing::ZeroBased,
            symmetrize: true,
            subsample: None,
            seed: 0,
        }
    }
}

/// Parses a whitespace-delimited edge list with `#` comments.
///
/// Each data line is `i j` or `i j w`; the weight defaults to 1.
/// Self-loops are dropped and duplicate edges collapse (the last
/// occurrence wins). Node count is one past the largest index seen.
pub fn parse_edgelist(text: &str, options: &EdgeListOptions) -> Result<Array2<f64>> {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_index = 0usize;
    for (number, raw_line) in text.lines().enumerate() {
        let line_no = number + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 'i j' or 'i j w', got {} tokens", tokens.len()),
            });
        }
        let parse_index = |token: &str| -> Result<usize> {
            let raw: usize = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node index {token:?}"),
            })?;
            let index = match options.indexing {
                Indexing::ZeroBased => raw,
                Indexing::OneBased => raw.checked_sub(1).ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "index 0 in 1-indexed input".into(),
                })?,
            };
            if index >= MAX_EDGELIST_NODES {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "node index {index} exceeds the supported maximum {MAX_EDGELIST_NODES}"
                    ),
                });
            }
            Ok(index)
        };
        let i = parse_index(tokens[0])?;
        let j = parse_index(tokens[1])?;
        let w: f64 = if tokens.len() == 3 {
            let w = tokens[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid edge weight {:?}", tokens[2]),
            })?;
            if !f64::is_finite(w) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("edge weight {w} is not finite"),
                });
            }
            w
        } else {
            1.0
        };
        max_index = max_index.max(i).max(j);
        if i != j {
            edges.push((i, j, w));
        }
    }
    if edges.is_empty() {
        return Err(Error::Degenerate(
            "edge list contains no off-diagonal edges".into(),
        ));
    }
    let n = max_index + 1;
    let mut adjacency = Array2::<f64>::zeros((n, n));
    for (i, j, w) in edges {
        adjacency[[i, j]] = w;
        if options.symmetrize {
            adjacency[[j, i]] = w;
        }
    }
    match options.subsample {
        Some(m) => subsample_nodes(&adjacency, m, options.seed),
        None => Ok(adjacency),
    }
}

/// Reads and parses an edge-list file.
pub fn read_edgelist(path: &Path, options: &EdgeListOptions) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)?;
    parse_edgelist(&text, options)
}

/// Restricts the matrix to a seeded uniform node subsample of size `m`,
/// relabeling nodes in draw order.
pub fn subsample_nodes(adjacency: &Array2<f64>, m: usize, seed: u64) -> Result<Array2<f64>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let n = adjacency.nrows();
    if m == 0 || m > n {
        return Err(Error::Parameter(format!(
            "subsample size must lie in 1..={n}, got {m}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut rng);
    nodes.truncate(m);
    Ok(Array2::from_shape_fn((m, m), |(a, b)| {
        adjacency[[nodes[a], nodes[b]]]
    }))
}

/// Parses a dense matrix: one row per line, whitespace-separated
/// floats, `#` comments allowed. Rows must have equal length.
pub fn parse_dense_matrix(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (number, raw_line) in text.lines().enumerate() {
        let line_no = number + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid matrix entry {token:?}"),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "row has {} entries, previous rows have {}",
                        row.len(),
                        first.len()
                    ),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Degenerate("matrix file has no data lines".into()));
    }
    let shape = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec(shape, flat)
        .map_err(|e| Error::Numerical(format!("matrix shape error: {e}")))
}

/// Reads and parses a dense matrix file.
pub fn read_dense_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)?;
    parse_dense_matrix(&text)
}

/// Writes a dense matrix with full-precision floats.
pub fn write_dense_matrix(path: &Path, matrix: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in matrix.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Formats a float with 17 significant digits, enough for an exact
/// `f64` round trip.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes an RFC-4180 CSV table with a mandatory header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::Parameter(format!("csv open failed: {e}")))?;
    writer
        .write_record(header)
        .map_err(|e| Error::Parameter(format!("csv write failed: {e}")))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| Error::Parameter(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Parameter(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Writes a value as pretty-printed JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn parses_a_path_graph() {
        let text = "0 1\n1 2\n";
        let a = parse_edgelist(text, &EdgeListOptions::default()).unwrap();
        let expected = arr2(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
        assert_eq!(a, expected);
    }

    #[test]
    fn comments_blanks_and_weights_are_handled() {
        let text = "# a triangle with weights\n\n0 1 0.5\n1 2 0.25 # inline note\n0 2\n";
        let a = parse_edgelist(text, &EdgeListOptions::default()).unwrap();
        assert_eq!(a[[0, 1]], 0.5);
        assert_eq!(a[[2, 1]], 0.25);
        assert_eq!(a[[0, 2]], 1.0);
    }

    #[test]
    fn reversed_duplicates_match_symmetrize() {
        let duplicated = "0 1\n1 0\n1 2\n2 1\n";
        let no_mirror = parse_edgelist(
            duplicated,
            &EdgeListOptions {
                symmetrize: false,
                ..EdgeListOptions::default()
            },
        )
        .unwrap();
        let mirrored = parse_edgelist("0 1\n1 2\n", &EdgeListOptions::default()).unwrap();
        assert_eq!(no_mirror, mirrored);
    }

    #[test]
    fn one_based_indexing_shifts_and_rejects_zero() {
        let options = EdgeListOptions {
            indexing: Indexing::OneBased,
            ..EdgeListOptions::default()
        };
        let a = parse_edgelist("1 2\n2 3\n", &options).unwrap();
        assert_eq!(a.nrows(), 3);
        assert_eq!(a[[0, 1]], 1.0);

        let err = parse_edgelist("0 1\n", &options).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("1-indexed"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let err = parse_edgelist("0 1\n0 x\n", &EdgeListOptions::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_edgelist("0 1 2 3\n", &EdgeListOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn self_loops_are_dropped_and_duplicates_collapse() {
        let a = parse_edgelist("0 0\n0 1\n0 1 0.5\n", &EdgeListOptions::default()).unwrap();
        assert_eq!(a[[0, 0]], 0.0);
        assert_eq!(a[[0, 1]], 0.5);
    }

    #[test]
    fn full_subsample_relabels_without_changing_the_graph() {
        let text = "0 1\n1 2\n2 3\n";
        let base = parse_edgelist(text, &EdgeListOptions::default()).unwrap();
        let options = EdgeListOptions {
            subsample: Some(4),
            seed: 9,
            ..EdgeListOptions::default()
        };
        let relabeled = parse_edgelist(text, &options).unwrap();
        assert_eq!(relabeled.nrows(), 4);
        // Degree multisets are permutation invariants.
        let mut degrees_base: Vec<f64> = base.sum_axis(ndarray::Axis(1)).to_vec();
        let mut degrees_new: Vec<f64> = relabeled.sum_axis(ndarray::Axis(1)).to_vec();
        degrees_base.sort_by(f64::total_cmp);
        degrees_new.sort_by(f64::total_cmp);
        assert_eq!(degrees_base, degrees_new);
        assert_eq!(base.sum(), relabeled.sum());
    }

    #[test]
    fn subsampling_is_seeded_and_size_checked() {
        let text = "0 1\n1 2\n2 3\n3 4\n";
        let options = |seed| EdgeListOptions {
            subsample: Some(3),
            seed,
            ..EdgeListOptions::default()
        };
        let first = parse_edgelist(text, &options(1)).unwrap();
        let again = parse_edgelist(text, &options(1)).unwrap();
        assert_eq!(first, again);

        let too_large = EdgeListOptions {
            subsample: Some(99),
            ..EdgeListOptions::default()
        };
        assert!(parse_edgelist(text, &too_large).is_err());
    }

    #[test]
    fn dense_matrix_round_trips_exactly() {
        let matrix = arr2(&[
            [0.1, 1.0 / 3.0],
            [std::f64::consts::PI, 6.02e23],
        ]);
        let dir = std::env::temp_dir().join("graphonlab-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("matrix.txt");
        write_dense_matrix(&path, &matrix).unwrap();
        let back = read_dense_matrix(&path).unwrap();
        assert_eq!(matrix, back);
    }

    #[test]
    fn dense_matrix_rejects_ragged_rows() {
        let err = parse_dense_matrix("1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[
            0.0,
            1.0,
            -1.5,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            8.183233121174393,
            0.235575,
        ] {
            let parsed: f64 = format_float(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "value {x}");
        }
    }

    #[test]
    fn csv_writer_emits_header_and_rows() {
        let dir = std::env::temp_dir().join("graphonlab-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csv");
        write_csv(
            &path,
            &["n", "value"],
            &[
                vec!["10".into(), format_float(0.5)],
                vec!["20".into(), format_float(0.25)],
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,value"));
        assert_eq!(lines.next(), Some("10,5.0000000000000000e-1"));
    }
}
