use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use super::{BenchError, ExperimentResult};

pub const CSV_HEADER: [&str; 7] =
    ["sweep", "kernel_s", "to_dpu_s", "from_dpu_s", "prepare_s", "total_s", "baseline_s"];

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct CsvRow {
    pub sweep: u32,
    pub kernel_s: f64,
    pub to_dpu_s: f64,
    pub from_dpu_s: f64,
    pub prepare_s: f64,
    pub total_s: f64,
    pub baseline_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedCsv {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<CsvRow>,
}

fn csv_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Csv(e.to_string())
}

/// Writes the optional `# key=value ...` line, the header and one line per row.
pub fn write_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<(), BenchError> {
    let mut out = out;
    if !result.metadata.is_empty() {
        let meta: Vec<String> = result.metadata.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "# {}", meta.join(" "))?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in &result.rows {
        let baseline = r.baseline_s.map(|b| b.to_string()).unwrap_or_default();
        w.write_record([
            r.sweep.to_string(),
            r.kernel_s.to_string(),
            r.to_dpu_s.to_string(),
            r.from_dpu_s.to_string(),
            r.prepare_s.to_string(),
            r.total_s.to_string(),
            baseline,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<(), BenchError> {
    let mut f = BufWriter::new(File::create(path)?);
    write_csv(result, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<ParsedCsv, BenchError> {
    let mut metadata = Vec::new();
    let mut body = text;
    if let Some(rest) = text.strip_prefix('#') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        for pair in line.split_whitespace() {
            let (k, v) = pair.split_once('=').ok_or_else(|| csv_err(format!("bad metadata `{pair}`")))?;
            metadata.push((k.to_string(), v.to_string()));
        }
        body = tail;
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(csv_err(format!("unexpected header {header:?}")));
    }
    let rows = r.deserialize().collect::<Result<Vec<CsvRow>, _>>().map_err(csv_err)?;
    Ok(ParsedCsv { metadata, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{Algorithm, ExperimentKind, ResultRow};
    use crate::orchestrator::Strategy;

    fn result(rows: usize) -> ExperimentResult {
        ExperimentResult {
            name: "t".into(),
            experiment: ExperimentKind::WeakScaling,
            algorithm: Algorithm::Aes128,
            strategy: Strategy::Sync,
            metadata: Vec::new(),
            rows: (0..rows)
                .map(|i| ResultRow {
                    sweep: i as u32 + 1,
                    kernel_s: 0.1 + i as f64 / 3.0,
                    to_dpu_s: 1e-9 * (i as f64 + 0.7),
                    from_dpu_s: 12345.678,
                    prepare_s: 0.0,
                    total_s: std::f64::consts::PI * 1e6,
                    baseline_s: (i % 2 == 0).then_some(2.0 / 7.0),
                    speedup: None,
                    bytes_to_dpu: 0,
                    bytes_from_dpu: 0,
                })
                .collect(),
        }
    }

    fn render(r: &ExperimentResult) -> String {
        let mut buf = Vec::new();
        write_csv(r, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_result_is_header_only() {
        assert_eq!(render(&result(0)), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn three_rows_four_lines() {
        let text = render(&result(3));
        assert_eq!(text.lines().count(), 4);
        assert!(text.ends_with('\n'));
        assert!(text.lines().skip(1).all(|l| !l.contains('e')), "no exponent notation: {text}");
    }

    #[test]
    fn round_trip_is_exact() {
        let mut r = result(5);
        r.metadata = vec![("seed".into(), "42".into()), ("algorithm".into(), "aes128".into())];
        let parsed = parse_csv(&render(&r)).unwrap();
        assert_eq!(parsed.metadata, r.metadata);
        for (a, b) in parsed.rows.iter().zip(&r.rows) {
            assert_eq!(
                (a.sweep, a.kernel_s, a.to_dpu_s, a.from_dpu_s, a.prepare_s, a.total_s, a.baseline_s),
                (b.sweep, b.kernel_s, b.to_dpu_s, b.from_dpu_s, b.prepare_s, b.total_s, b.baseline_s)
            );
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        emit_csv(&result(2), &path).unwrap();
        let parsed = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parsed.rows.len(), 2);
        assert!(emit_csv(&result(1), &dir.path().join("missing/x.csv")).is_err());
    }
}
