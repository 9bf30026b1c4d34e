//! Log-log SVG of `S(k)` with its fitted power law, built from the results
//! table alone.

use crate::csv::parse_results_csv;
use crate::CliError;
use critical_besov::fit::power_law;
use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;

pub fn sweep_plot(results_csv: &str, quantity: &str) -> Result<String, CliError> {
    let rows = parse_results_csv(results_csv)?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.quantity == quantity && r.j.is_none() && r.aggregate > 0.0)
        .map(|r| (r.k as f64, r.aggregate))
        .collect();
    if pts.len() < 2 {
        return Err(CliError::Numerical(format!(
            "plot: need two positive {quantity} aggregates, got {}",
            pts.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let fit = power_law(&xs, &ys)
        .ok_or_else(|| CliError::Numerical("plot: power-law fit failed".into()))?;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let span = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = ((hi - lo) * 0.1).max(1e-3);
        (lo - pad, hi + pad)
    };
    let (x0, x1) = span(&lx);
    let (y0, y1) = span(&ly);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{:.2} {:.2} L{:.2} {:.2} L{:.2} {:.2}" fill="none" stroke="black"/>"#,
        PAD,
        PAD,
        PAD,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let line = |x: f64| fit.intercept + fit.slope * x;
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-dasharray="4 3"/>"##,
        sx(x0),
        sy(line(x0)),
        sx(x1),
        sy(line(x1))
    );
    for ((x, y), k) in lx.iter().zip(&ly).zip(&xs) {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#236"/>"##,
            sx(*x),
            sy(*y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{k}</text>"#,
            sx(*x),
            H - PAD + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">k (log scale)</text>"#,
        W / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">{quantity}(k) (log scale)</text>"#,
        H / 2.0,
        H / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12">fitted exponent {:.4}</text>"#,
        PAD + 8.0,
        PAD - 12.0,
        fit.slope
    );
    s.push_str("</svg>\n");
    Ok(s)
}
