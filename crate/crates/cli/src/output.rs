//! Indicator map serialization: full-precision CSV and min-max normalized
//! PGM (P2) heatmaps. Both use the image convention: rows top to bottom
//! are decreasing y, columns left to right increasing x.

use scatter2d::indicators::IndicatorMap;
use scatter2d::Result;
use std::path::Path;

/// Trim a display power for filenames/headers: `2` not `2.0`.
pub fn fmt_rho(rho: f64) -> String {
    if rho.fract() == 0.0 {
        format!("{}", rho as i64)
    } else {
        format!("{rho}")
    }
}

/// Trim a float for headers: integral values print without the fraction.
fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn image_value(map: &IndicatorMap, row: usize, col: usize) -> f64 {
    let m = map.grid.points;
    // column = x index, row top-down = y index descending
    map.value_at(col, m - 1 - row)
}

/// `# indicator <method> rho=<ρ> k=<k> N=<n> delta=<δ>` then M rows of M
/// values at full precision.
pub fn write_csv(map: &IndicatorMap, path: &Path) -> Result<()> {
    let m = map.grid.points;
    let mut buf = String::with_capacity(16 + 26 * m * m);
    buf.push_str(&format!(
        "# indicator {} rho={} k={} N={} delta={}\n",
        map.method.name(),
        fmt_rho(map.rho),
        fmt_num(map.k),
        map.n,
        fmt_num(map.delta),
    ));
    for row in 0..m {
        for col in 0..m {
            if col > 0 {
                buf.push(',');
            }
            buf.push_str(&format!("{:.17e}", image_value(map, row, col)));
        }
        buf.push('\n');
    }
    std::fs::write(path, buf)?;
    Ok(())
}

/// Min-max normalized 8-bit portable graymap (ASCII P2). The raw values
/// live in the CSV; normalization here loses nothing.
pub fn write_pgm(map: &IndicatorMap, path: &Path) -> Result<()> {
    let m = map.grid.points;
    let lo = map.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = map.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut buf = String::with_capacity(32 + 4 * m * m);
    buf.push_str("P2\n");
    buf.push_str(&format!(
        "# indicator {} rho={}\n{m} {m}\n255\n",
        map.method.name(),
        fmt_rho(map.rho)
    ));
    for row in 0..m {
        for col in 0..m {
            let v = image_value(map, row, col);
            let g = if span > 0.0 {
                ((v - lo) / span * 255.0).round() as u32
            } else {
                0
            };
            if col > 0 {
                buf.push(' ');
            }
            buf.push_str(&g.to_string());
        }
        buf.push('\n');
    }
    std::fs::write(path, buf)?;
    Ok(())
}
