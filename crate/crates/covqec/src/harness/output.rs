use std::fmt::Write as _;

use crate::protocol::{SweepRow, SweepTable};

pub const RESULT_COLUMNS: [&str; 11] = [
    "n",
    "n_P",
    "n_R",
    "model",
    "pe_or_ne",
    "eps_cov",
    "upper_bound",
    "lower_bound",
    "one_minus_Fwc",
    "runtime_ms",
    "seed",
];

/// Twelve significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_row(r: &SweepRow, seed: u64) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.n,
        r.n_p,
        r.n_r,
        r.model,
        format_float(r.parameter),
        format_float(r.eps_cov),
        format_float(r.upper_bound),
        format_float(r.lower_bound),
        format_float(r.one_minus_fwc),
        r.runtime_ms,
        seed
    )
}

/// Header, one line per row in grid order, and the `# slope=` footer.
pub fn sweep_csv(table: &SweepTable, seed: u64) -> String {
    let mut s = RESULT_COLUMNS.join(",");
    s.push('\n');
    for r in &table.rows {
        s.push_str(&csv_row(r, seed));
        s.push('\n');
    }
    let slope = table.slope.map_or_else(|| "nan".to_string(), format_float);
    let _ = writeln!(s, "# slope={slope}");
    s.push_str("# fit: least squares of ln(one_minus_Fwc) against ln(n)\n");
    s
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

/// Log-log line plot of the error columns against `n`.
pub fn render_svg(table: &SweepTable) -> String {
    let series: [(&str, &str, fn(&SweepRow) -> f64); 4] = [
        ("eps_cov", "#1f77b4", |r| r.eps_cov),
        ("upper bound", "#d62728", |r| r.upper_bound),
        ("lower bound", "#2ca02c", |r| r.lower_bound),
        ("1 - F_wc proxy", "#9467bd", |r| r.one_minus_fwc),
    ];
    let usable = |v: f64| v.is_finite() && v > 0.0;
    let xs: Vec<f64> = table.rows.iter().map(|r| (r.n as f64).log10()).collect();
    let ys: Vec<f64> = table
        .rows
        .iter()
        .flat_map(|r| series.iter().map(move |(_, _, f)| f(r)))
        .filter(|&v| usable(v))
        .map(f64::log10)
        .collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if xs.is_empty() || ys.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let (y0, y1) = (y0.floor(), y1.ceil());
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    let mut e = y0 as i32;
    while e as f64 <= y1 {
        let y = py(e as f64);
        let _ = writeln!(s, r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, W - PAD);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#, PAD - 6.0, y + 4.0);
        e += 1;
    }
    for r in &table.rows {
        let x = px((r.n as f64).log10());
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, H - PAD + 18.0, r.n);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n (log scale)</text>"#, W / 2.0, H - 16.0);
    for (k, (name, color, f)) in series.iter().enumerate() {
        let pts: Vec<String> = table
            .rows
            .iter()
            .filter(|r| usable(f(r)))
            .map(|r| format!("{:.2},{:.2}", px((r.n as f64).log10()), py(f(r).log10())))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        }
        let ly = PAD + 16.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, W - PAD - 150.0, W - PAD - 130.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{name}</text>"#, W - PAD - 124.0, ly + 4.0);
    }
    if let Some(slope) = table.slope {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">slope {slope:.3}</text>"#, PAD + 8.0, PAD - 12.0);
    }
    s.push_str("</svg>\n");
    s
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
