//! Row format shared by sweeps and trade-off curves. Floats are written
//! with 17 significant digits so a read gives back the same bits. Lines
//! starting with `#` are comments; failed rows carry NaN and their message
//! in a comment right after the row.

use std::io::{BufRead, Write};

use super::{SweepError, SweepRow};

pub const CSV_HEADER: &str = "index,g,R,F,phi_wrapped,phi_unwrapped,err";

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Writes `preamble` lines as `#` comments, the header and the rows.
pub fn write_rows<W: Write>(mut w: W, preamble: &[String], rows: &[SweepRow]) -> Result<(), SweepError> {
    for line in preamble {
        for part in line.lines() {
            writeln!(w, "# {part}")?;
        }
    }
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.index,
            fmt(r.g),
            fmt(r.separation),
            fmt(r.fidelity),
            fmt(r.phase_wrapped),
            fmt(r.phase_unwrapped),
            fmt(r.err_estimate)
        )?;
        if let Some(e) = &r.error {
            writeln!(w, "# row {} failed: {}", r.index, e.replace('\n', " "))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_rows`]. Error messages of failed rows are
/// recovered from their comment lines.
pub fn read_rows<R: BufRead>(r: R) -> Result<Vec<SweepRow>, SweepError> {
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut seen_header = false;
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        let line_no = n + 1;
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim_start();
            if let (Some(last), Some(rest)) = (rows.last_mut(), comment.strip_prefix("row ")) {
                if let Some((idx, msg)) = rest.split_once(" failed: ") {
                    if idx.parse() == Ok(last.index) {
                        last.error = Some(msg.to_string());
                    }
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim() != CSV_HEADER {
                return Err(SweepError::Parse {
                    line: line_no,
                    message: format!("expected header `{CSV_HEADER}`"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(SweepError::Parse {
                line: line_no,
                message: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str| SweepError::Parse {
            line: line_no,
            message: format!("bad {what}"),
        };
        let num = |i: usize, what: &str| fields[i].trim().parse::<f64>().map_err(|_| bad(what));
        rows.push(SweepRow {
            index: fields[0].trim().parse().map_err(|_| bad("index"))?,
            g: num(1, "g")?,
            separation: num(2, "R")?,
            fidelity: num(3, "F")?,
            phase_wrapped: num(4, "phi_wrapped")?,
            phase_unwrapped: num(5, "phi_unwrapped")?,
            err_estimate: num(6, "err")?,
            error: None,
        });
    }
    if !seen_header {
        return Err(SweepError::Parse {
            line: 0,
            message: "missing header".into(),
        });
    }
    Ok(rows)
}
