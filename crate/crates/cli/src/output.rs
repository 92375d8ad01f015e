use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

pub const CSV_HEADER: &str = "eta_db,r_s,series,value,std_err";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub eta_db: f64,
    pub r_s: f64,
    pub series: &'static str,
    pub value: f64,
    pub std_err: Option<f64>,
}

impl CurvePoint {
    pub fn new(eta_db: f64, r_s: f64, series: &'static str, value: f64) -> Self {
        Self {
            eta_db,
            r_s,
            series,
            value,
            std_err: None,
        }
    }

    pub fn with_err(mut self, std_err: f64) -> Self {
        self.std_err = Some(std_err);
        self
    }
}

/// A CSV body: `#` comment lines, the header, then one row per point.
pub struct Table {
    comments: Vec<String>,
    points: Vec<CurvePoint>,
}

impl Table {
    pub fn new(comments: Vec<String>) -> Self {
        Self {
            comments,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, p: CurvePoint) {
        self.points.push(p);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Lines preceding the first data row.
    pub fn preamble_lines(&self) -> usize {
        self.comments.len() + 1
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = writeln!(s, "{CSV_HEADER}");
        for p in &self.points {
            let err = p.std_err.map(|e| format!("{e:e}")).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{:e},{}", p.eta_db, p.r_s, p.series, p.value, err);
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).with_context(|| format!("writing {}", path.display()))
    }
}

/// What a plot script draws against what.
pub struct PlotLayout<'a> {
    pub csv: &'a str,
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Column (1-based) holding the x values.
    pub x_col: usize,
    /// Column holding the value that separates curves of one series.
    pub key_col: usize,
    pub key_name: &'a str,
    pub keys: &'a [f64],
    pub series: &'a [&'a str],
    pub log_y: bool,
}

/// Emits a gnuplot script that renders `layout.csv` to a PNG beside it.
pub fn plot_script(layout: &PlotLayout<'_>, skip: usize) -> String {
    let png = layout.csv.trim_end_matches(".csv");
    let mut s = String::new();
    let _ = writeln!(s, "set terminal pngcairo size 900,600");
    let _ = writeln!(s, "set output '{png}.png'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set title '{}'", layout.title);
    let _ = writeln!(s, "set xlabel '{}'", layout.x_label);
    let _ = writeln!(s, "set ylabel '{}'", layout.y_label);
    if layout.log_y {
        let _ = writeln!(s, "set logscale y");
        let _ = writeln!(s, "set format y '10^{{%L}}'");
    }
    let _ = writeln!(s, "set key outside right");
    let mut curves = Vec::new();
    for &key in layout.keys {
        for &series in layout.series {
            curves.push(format!(
                "'{csv}' skip {skip} using {x}:((strcol(3) eq '{series}' && abs(${k}-{key}) < 1e-9) ? $4 : 1/0) \
                 with linespoints title '{series} {name}={key}'",
                csv = layout.csv,
                x = layout.x_col,
                k = layout.key_col,
                name = layout.key_name,
            ));
        }
    }
    let _ = writeln!(s, "plot \\\n    {}", curves.join(", \\\n    "));
    s
}
