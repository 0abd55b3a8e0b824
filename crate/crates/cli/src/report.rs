//! Table documents rendered as CSV or aligned Markdown.

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Md,
}

/// A rendered-format-agnostic table: comment lines (manifest, warnings),
/// a header, and string cells.
#[derive(Debug, Clone, Default)]
pub struct TableDocument {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableDocument {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Md => self.render_md(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn render_md(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("<!-- ");
            out.push_str(c);
            out.push_str(" -->\n");
        }
        let fmt_row = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        out.push_str(&fmt_row(&self.header));
        let dashes: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&format!("| {} |\n", dashes.join(" | ")));
        for row in &self.rows {
            out.push_str(&fmt_row(row));
        }
        out
    }
}

/// One decimal place, the table precision for percentages and eval means.
pub fn fmt1(x: f64) -> String {
    format!("{x:.1}")
}

/// Six decimal places, used for slice coordinates and values.
pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> TableDocument {
        TableDocument {
            comments: vec!["manifest: seed=42".into()],
            header: vec!["algorithm".into(), "pop".into()],
            rows: vec![
                vec!["de".into(), "10".into()],
                vec!["de/bfgs".into(), "2".into()],
            ],
        }
    }

    #[test]
    fn csv_layout() {
        let text = doc().render(OutputFormat::Csv);
        assert_eq!(
            text,
            "# manifest: seed=42\nalgorithm,pop\nde,10\nde/bfgs,2\n"
        );
    }

    #[test]
    fn md_columns_are_aligned() {
        let text = doc().render(OutputFormat::Md);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "<!-- manifest: seed=42 -->");
        assert!(lines[1].starts_with("| algorithm | pop"));
        let widths: Vec<usize> = lines[1..].iter().map(|l| l.len()).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]), "ragged table: {text}");
    }

    #[test]
    fn empty_rows_still_emit_a_header() {
        let mut d = doc();
        d.rows.clear();
        let text = d.render(OutputFormat::Csv);
        assert!(text.ends_with("algorithm,pop\n"));
    }

    #[test]
    fn one_decimal_formatting() {
        assert_eq!(fmt1(71.25), "71.2");
        assert_eq!(fmt1(0.0), "0.0");
        assert_eq!(fmt1(43.666), "43.7");
    }
}
