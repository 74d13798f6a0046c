//! Deterministic artifact emission: CSV with `#`-prefixed header lines,
//! JSON summaries, optional hand-rolled SVG plots. File names embed a
//! hash of the config text instead of timestamps so reruns overwrite
//! their own outputs, and identical configs produce byte-identical
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Short hex digest of the raw config text.
pub fn config_hash(raw: &str) -> String {
    let digest = Sha256::digest(raw.as_bytes());
    let mut hex = String::with_capacity(12);
    for byte in digest.iter().take(6) {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Fixed-precision scientific notation keeps the CSV byte-stable.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        format!("{v}")
    }
}

/// Buffered output set: nothing touches the filesystem until
/// `write_all`, so failed runs leave no partial result files behind.
pub struct OutputSet {
    stem: String,
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn new(experiment: &str, raw_config: &str) -> Self {
        OutputSet {
            stem: format!("{experiment}-{}", config_hash(raw_config)),
            files: Vec::new(),
        }
    }

    fn push(&mut self, label: Option<&str>, ext: &str, body: String) {
        let name = match label {
            Some(l) => format!("{}-{l}.{ext}", self.stem),
            None => format!("{}.{ext}", self.stem),
        };
        self.files.push((name, body));
    }

    /// `header` is written as a `#`-prefixed column-documentation line.
    pub fn csv(&mut self, label: Option<&str>, header: &str, rows: &[Vec<f64>]) {
        let mut body = String::new();
        let _ = writeln!(body, "# {header}");
        for row in rows {
            let line: Vec<String> = row.iter().map(|&v| num(v)).collect();
            let _ = writeln!(body, "{}", line.join(","));
        }
        self.push(label, "csv", body);
    }

    pub fn json(&mut self, label: Option<&str>, value: &serde_json::Value) {
        let body = serde_json::to_string_pretty(value).expect("json serialization") + "\n";
        self.push(label, "json", body);
    }

    pub fn svg(&mut self, label: Option<&str>, body: String) {
        self.push(label, "svg", body);
    }

    /// Write every buffered file (atomically via a rename) and return
    /// the manifest of paths.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut manifest = Vec::with_capacity(self.files.len());
        for (name, body) in &self.files {
            let path = dir.join(name);
            let tmp = dir.join(format!("{name}.tmp"));
            fs::write(&tmp, body)?;
            fs::rename(&tmp, &path).map_err(Error::Io)?;
            manifest.push(path);
        }
        Ok(manifest)
    }
}

fn map_axis(v: f64, lo: f64, hi: f64, out0: f64, out1: f64) -> f64 {
    if hi <= lo {
        return 0.5 * (out0 + out1);
    }
    out0 + (v - lo) / (hi - lo) * (out1 - out0)
}

/// Minimal polyline plot; log-scaled axes when requested (all data must
/// then be positive). Deterministic output, no external dependencies.
pub fn line_plot_svg(
    title: &str,
    series: &[(&str, Vec<(f64, f64)>)],
    loglog: bool,
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 440.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let tf = |v: f64| if loglog { v.max(1e-300).log10() } else { v };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (_, pts) in series {
        for &(x, y) in pts {
            xs.push(tf(x));
            ys.push(tf(y));
        }
    }
    let (xlo, xhi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (ylo, yhi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{title}</text>",
        W / 2.0
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>",
        W - ML - MR,
        H - MT - MB
    );
    // Corner labels document the data range.
    let fmt_axis = |v: f64| if loglog { format!("1e{v:.2}") } else { format!("{v:.3}") };
    let _ = writeln!(
        svg,
        "<text x=\"{ML}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{} .. {}</text>",
        H - 14.0,
        fmt_axis(xlo),
        fmt_axis(xhi)
    );
    let _ = writeln!(
        svg,
        "<text x=\"6\" y=\"{MT}\" font-family=\"monospace\" font-size=\"11\">{} .. {}</text>",
        fmt_axis(yhi),
        fmt_axis(ylo)
    );

    const COLORS: [&str; 6] = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#2c3e50"];
    for (s, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[s % COLORS.len()];
        let mut path = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let px = map_axis(tf(x), xlo, xhi, ML, W - MR);
            let py = map_axis(tf(y), ylo, yhi, H - MB, MT);
            let _ = write!(path, "{}{px:.2},{py:.2}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(
            svg,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\" fill=\"{color}\">{name}</text>",
            W - MR - 150.0,
            MT + 16.0 * (s as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Grayscale heatmap of a nodal field on an (nx x ny) grid, row-major
/// with the x index outermost; downsampled to at most 200 columns.
pub fn heatmap_svg(title: &str, field: &[f64], nx: usize, ny: usize) -> String {
    let step_x = nx.div_ceil(200).max(1);
    let step_y = ny.div_ceil(200).max(1);
    let cols = nx.div_ceil(step_x);
    let rows = ny.div_ceil(step_y);
    let (lo, hi) = field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = (hi - lo).max(1e-300);

    const CELL: f64 = 3.0;
    let w = cols as f64 * CELL + 40.0;
    let h = rows as f64 * CELL + 60.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"20\" y=\"24\" font-family=\"monospace\" font-size=\"13\">{title} (range {:.3e} .. {:.3e})</text>",
        lo, hi
    );
    for ci in 0..cols {
        for rj in 0..rows {
            let i = (ci * step_x).min(nx - 1);
            let j = (rj * step_y).min(ny - 1);
            let t = (field[i * ny + j] - lo) / span;
            let shade = (255.0 * (1.0 - t)).round() as u8;
            let x = 20.0 + ci as f64 * CELL;
            // y axis drawn upward.
            let y = 40.0 + (rows - 1 - rj) as f64 * CELL;
            let _ = writeln!(
                svg,
                "<rect x=\"{x:.0}\" y=\"{y:.0}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"rgb({shade},{shade},255)\"/>"
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
