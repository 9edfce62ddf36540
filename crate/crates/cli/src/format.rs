//! Number and table formatting shared by the text and markdown renderers.

/// Whole percent, e.g. `0.67 -> "67%"`.
pub fn pct0(v: f64) -> String {
    format!("{}%", clean_zero((v * 100.0).round()))
}

/// Percent with one decimal, e.g. `0.272 -> "27.2%"`.
pub fn pct1(v: f64) -> String {
    format!("{:.1}%", clean_zero((v * 1000.0).round() / 10.0))
}

/// Level of certainty as `Pxx`, e.g. `0.05 -> "P05"`.
pub fn p_level(certainty: f64) -> String {
    format!("P{:02}", clean_zero((certainty * 100.0).round()))
}

/// Money with two decimals.
pub fn money(v: f64) -> String {
    format!("{:.2}", clean_zero(v))
}

pub fn p_value(p: f64) -> String {
    format!("{p:.3}")
}

fn clean_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn markdown_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", headers.join(" | "));
    out.push_str(&format!("|{}\n", "---|".repeat(headers.len())));
    for row in rows {
        out.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    out
}

/// Right-aligned plain-text table.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(headers.to_vec());
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
