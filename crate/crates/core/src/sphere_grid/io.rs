//! Sample files.
//!
//! Text: a header line `N=<int>` followed by `N+1` rows of `2N`
//! comma-separated entries, each `re` or `re+imj` / `re-imj`.
//!
//! Binary: magic `SPH1`, little-endian `u32` N, then `(N+1) * 2N` pairs of
//! little-endian `f64` `(re, im)`, row-major (j outer, k inner).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use super::SphericalSamples;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"SPH1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Text,
    Binary,
}

impl SampleFormat {
    /// `.sph` and `.bin` are binary, anything else is text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("sph") | Some("bin") => SampleFormat::Binary,
            _ => SampleFormat::Text,
        }
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}j", z.re, -z.im)
    } else {
        format!("{}+{}j", z.re, z.im)
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is neither leading nor an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().ok()?;
            let im_str = &body[i..];
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str.parse::<f64>().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        // pure imaginary, e.g. "2.5j"
        None => body.parse::<f64>().ok().map(|im| Complex64::new(0.0, im)),
    }
}

pub fn write_samples_to<W: Write>(
    samples: &SphericalSamples,
    mut w: W,
    format: SampleFormat,
) -> Result<()> {
    let n = samples.order();
    match format {
        SampleFormat::Text => {
            writeln!(w, "N={n}")?;
            for j in 0..=n {
                let line: Vec<String> = samples.row(j).iter().map(|&z| format_complex(z)).collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        SampleFormat::Binary => {
            w.write_all(MAGIC)?;
            let header = u32::try_from(n)
                .map_err(|_| Error::InvalidArgument(format!("N={n} does not fit in u32")))?;
            w.write_all(&header.to_le_bytes())?;
            for z in samples.values() {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_samples(samples: &SphericalSamples, path: &Path, format: SampleFormat) -> Result<()> {
    let file = fs::File::create(path)?;
    write_samples_to(samples, BufWriter::new(file), format)
}

/// Reads a sample file, detecting the format from its first bytes.
///
/// Inconsistent pole rows are an error when `strict`, otherwise a warning.
pub fn read_samples(path: &Path, strict: bool) -> Result<SphericalSamples> {
    let bytes = fs::read(path)?;
    read_samples_from(&bytes, strict)
}

pub fn read_samples_from(bytes: &[u8], strict: bool) -> Result<SphericalSamples> {
    let samples = if bytes.starts_with(MAGIC) {
        parse_binary(bytes)?
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::Format {
            line: 0,
            message: format!("not UTF-8 text and no SPH1 magic: {e}"),
        })?;
        parse_text(text)?
    };
    let tol = samples.default_pole_tolerance();
    if let Err(e) = samples.check_poles(tol) {
        if strict {
            return Err(e);
        }
        log::warn!("{e}");
    }
    Ok(samples)
}

fn parse_binary(bytes: &[u8]) -> Result<SphericalSamples> {
    let fmt_err = |message: String| Error::Format { line: 0, message };
    if bytes.len() < 8 {
        return Err(fmt_err("truncated binary header".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if n < 2 {
        return Err(fmt_err(format!("N must be >= 2, got {n}")));
    }
    let count = (n + 1) * 2 * n;
    let body = &bytes[8..];
    if body.len() != count * 16 {
        return Err(fmt_err(format!(
            "expected {} payload bytes for N={n}, found {}",
            count * 16,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    SphericalSamples::from_values(n, values)
}

fn parse_text(text: &str) -> Result<SphericalSamples> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Format {
        line: 1,
        message: "empty file".into(),
    })?;
    let n: usize = header
        .strip_prefix("N=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Format {
            line: hline,
            message: format!("expected header `N=<int>`, found `{header}`"),
        })?;
    if n < 2 {
        return Err(Error::Format {
            line: hline,
            message: format!("N must be >= 2, got {n}"),
        });
    }
    let rows: Vec<(usize, &str)> = lines.collect();
    if rows.len() != n + 1 {
        return Err(Error::Format {
            line: rows.last().map_or(hline, |r| r.0),
            message: format!("expected {} rows, found {}", n + 1, rows.len()),
        });
    }
    let mut values = Vec::with_capacity((n + 1) * 2 * n);
    for (line, row) in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 * n {
            return Err(Error::Format {
                line,
                message: format!("expected {} entries, found {}", 2 * n, fields.len()),
            });
        }
        for (col, field) in fields.into_iter().enumerate() {
            let z = parse_complex(field).ok_or_else(|| Error::Format {
                line,
                message: format!("column {}: cannot parse `{}`", col + 1, field.trim()),
            })?;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Format {
                    line,
                    message: format!("column {}: non-finite entry", col + 1),
                });
            }
            values.push(z);
        }
    }
    SphericalSamples::from_values(n, values)
}
