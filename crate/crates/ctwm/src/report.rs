//! Metric rows as CSV (`image,codec,cr,psnr,score,ncc`) or aligned text.

use crate::error::{CliError, CliResult};

pub const COLUMNS: [&str; 6] = ["image", "codec", "cr", "psnr", "score", "ncc"];

/// One measurement; absent metrics are left empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub image: String,
    pub codec: String,
    pub cr: Option<f64>,
    pub psnr: Option<f64>,
    pub score: Option<f64>,
    pub ncc: Option<f64>,
}

impl Row {
    pub fn new(image: impl Into<String>, codec: impl Into<String>) -> Self {
        Self {
            image: image.into(),
            codec: codec.into(),
            cr: None,
            psnr: None,
            score: None,
            ncc: None,
        }
    }

    fn cells(&self) -> [String; 6] {
        [
            self.image.clone(),
            self.codec.clone(),
            number(self.cr),
            number(self.psnr),
            number(self.score),
            number(self.ncc),
        ]
    }
}

/// Four decimals; `inf` for infinite PSNR.
pub fn number(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf" } else { "-inf" }.to_string(),
        Some(v) => format!("{v:.4}"),
    }
}

pub fn to_csv(rows: &[Row]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Format(format!("CSV: {e}"));
    w.write_record(COLUMNS).map_err(fail)?;
    for row in rows {
        w.write_record(row.cells()).map_err(fail)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Format(format!("CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Parses CSV produced by [`to_csv`].
pub fn from_csv(text: &str) -> CliResult<Vec<Row>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let fail = |e: csv::Error| CliError::Format(format!("CSV: {e}"));
    let header = r.headers().map_err(fail)?.clone();
    if header.iter().ne(COLUMNS) {
        return Err(CliError::Format(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let parse = |s: &str| -> CliResult<Option<f64>> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Format(format!("bad number {s:?}")))
    };
    r.records()
        .map(|rec| {
            let rec = rec.map_err(fail)?;
            Ok(Row {
                image: rec[0].to_string(),
                codec: rec[1].to_string(),
                cr: parse(&rec[2])?,
                psnr: parse(&rec[3])?,
                score: parse(&rec[4])?,
                ncc: parse(&rec[5])?,
            })
        })
        .collect()
}

/// Space-aligned table with a header rule.
pub fn pretty(rows: &[Row]) -> String {
    let cells: Vec<[String; 6]> = rows.iter().map(Row::cells).collect();
    let mut widths = COLUMNS.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: [&str; 6]| {
        let parts: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i < 2 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(COLUMNS);
    out += &(widths
        .iter()
        .map(|&w| "-".repeat(w))
        .collect::<Vec<_>>()
        .join("  ")
        + "\n");
    for row in &cells {
        out += &line(row.each_ref().map(String::as_str));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Row> {
        let mut a = Row::new("astronaut", "contourlet");
        a.cr = Some(7.0);
        a.psnr = Some(f64::INFINITY);
        a.score = Some(9.87654);
        let mut b = Row::new("moon, cropped", "jpeg-q75");
        b.ncc = Some(1.0);
        vec![a, b]
    }

    #[test]
    fn csv_format() {
        let text = to_csv(&sample()).unwrap();
        assert_eq!(
            text,
            "image,codec,cr,psnr,score,ncc\n\
             astronaut,contourlet,7.0000,inf,9.8765,\n\
             \"moon, cropped\",jpeg-q75,,,,1.0000\n"
        );
        let back = from_csv(&text).unwrap();
        assert_eq!(back[1], sample()[1]);
        assert_eq!(back[0].score, Some(9.8765));
    }

    #[test]
    fn pretty_aligns_columns() {
        let text = pretty(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-------------"));
        assert!(lines[2].contains("9.8765"));
    }
}
