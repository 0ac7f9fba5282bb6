//! Log-log chart of per-`n` sup error, one polyline per study kind.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::CSV_HEADER;
use crate::error::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
    "#7f7f7f", "#bcbd22",
];

/// Reads study rows from `rows` and writes the chart to `out`.
pub fn emit_plot(rows: impl AsRef<Path>, out: impl AsRef<Path>) -> Result<()> {
    let text = std::fs::read_to_string(rows)?;
    std::fs::write(out, render_plot(&text)?)?;
    Ok(())
}

/// SVG text for study rows in CSV form. Output depends only on the input.
pub fn render_plot(csv_text: &str) -> Result<String> {
    let series = sup_errors(csv_text)?;
    let ns: Vec<i64> = {
        let mut v: Vec<i64> = series.values().flat_map(|s| s.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    if ns.len() < 2 {
        return Err(Error::Parse("need rows at two or more distinct n".into()));
    }
    if ns[0] <= 0 {
        return Err(Error::Parse(format!(
            "n must be positive for a log axis, got {}",
            ns[0]
        )));
    }
    // Zero errors are drawn at a floor one decade under the smallest
    // positive error.
    let min_pos = series
        .values()
        .flat_map(|s| s.values())
        .copied()
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if min_pos.is_finite() {
        min_pos / 10.0
    } else {
        1e-17
    };
    let max_e = series
        .values()
        .flat_map(|s| s.values())
        .copied()
        .fold(floor, f64::max);

    let (x0, x1) = ((ns[0] as f64).log10(), (ns[ns.len() - 1] as f64).log10());
    let y0 = floor.log10().floor();
    let y1 = max_e.log10().ceil().max(y0 + 1.0);
    let px = |n: f64| LEFT + (n.log10() - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |e: f64| TOP + (y1 - e.max(floor).log10()) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (bx, by, bw, bh) = (LEFT, TOP, W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{bx}" y="{by}" width="{bw}" height="{bh}" fill="none" stroke="black"/>"#
    );
    for &n in &ns {
        let x = px(n as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            by + bh,
            by + bh + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{n}</text>"#,
            by + bh + 16.0
        );
    }
    let mut d = y0 as i64;
    while d as f64 <= y1 {
        let y = py(10f64.powi(d as i32));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{bx}" y2="{y:.2}" stroke="black"/>"#,
            bx - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            bx - 6.0,
            y + 4.0
        );
        d += 1;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">n</text>"#,
        bx + bw / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">sup error</text>"#,
        by + bh / 2.0,
        by + bh / 2.0
    );
    for (i, (kind, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|(&n, &e)| format!("{:.2},{:.2}", px(n as f64), py(e)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = W - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.2}" y2="{ly}" stroke="{color}" stroke-width="1.5"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{kind}</text>"#,
            lx + 24.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// `kind → n → max abs_error`.
fn sup_errors(csv_text: &str) -> Result<BTreeMap<String, BTreeMap<i64, f64>>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out: BTreeMap<String, BTreeMap<i64, f64>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
        let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", i + 1));
        let n: i64 = rec[1].trim().parse().map_err(|_| bad("n"))?;
        let e: f64 = rec[7].trim().parse().map_err(|_| bad("abs_error"))?;
        if !(e >= 0.0) {
            return Err(bad("abs_error"));
        }
        let slot = out
            .entry(rec[0].to_string())
            .or_default()
            .entry(n)
            .or_insert(0.0);
        *slot = slot.max(e);
    }
    if out.is_empty() {
        return Err(Error::Parse("no study rows".into()));
    }
    Ok(out)
}
