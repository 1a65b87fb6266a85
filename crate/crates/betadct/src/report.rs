//! Evaluation reports: CSV, JSON, and markdown renderings of the grid,
//! plus a standalone SVG heatmap.
//!
//! Absent cells (regions that produced no descriptors) stay visibly
//! absent in every format: empty CSV fields, `null` in JSON, "n/a" in
//! markdown, hatched gray rectangles in the SVG. AUC percentages carry
//! two decimals throughout.

use std::borrow::Cow;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use betadct_core::{EvalCell, EvalGrid, RegionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [
        ReportFormat::Csv,
        ReportFormat::Json,
        ReportFormat::Markdown,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
        }
    }

    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "csv" => Some(ReportFormat::Csv),
            "json" => Some(ReportFormat::Json),
            "markdown" | "md" => Some(ReportFormat::Markdown),
            _ => None,
        }
    }
}

fn auc_percent(cell: &EvalCell) -> Option<String> {
    cell.auc.map(|a| format!("{:.2}", a * 100.0))
}

pub fn render_report(grid: &EvalGrid, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => report_csv(grid),
        ReportFormat::Json => report_json(grid),
        ReportFormat::Markdown => report_markdown(grid),
    }
}

pub fn emit_report(grid: &EvalGrid, format: ReportFormat, out: &Path) -> io::Result<()> {
    fs::write(out, render_report(grid, format))
}

fn report_csv(grid: &EvalGrid) -> String {
    let mut out = String::from("classifier,region,auc_percent,n_test\n");
    for cell in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            cell.classifier,
            cell.region.as_str(),
            auc_percent(cell).unwrap_or_default(),
            cell.n_test
        );
    }
    out
}

fn report_json(grid: &EvalGrid) -> String {
    let mut text = serde_json::to_string_pretty(grid).expect("grid serializes");
    text.push('\n');
    text
}

fn report_markdown(grid: &EvalGrid) -> String {
    let mut out = String::from("# AUC (%) by classifier and region\n\n");
    let _ = writeln!(
        out,
        "Seed {}; split {}/{}/{} train/val/test.\n",
        grid.seed, grid.split_sizes.train, grid.split_sizes.val, grid.split_sizes.test
    );
    out.push_str("| classifier |");
    for region in RegionKind::ALL {
        let _ = write!(out, " {} |", region.as_str());
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(RegionKind::ALL.len()));
    out.push('\n');
    for name in grid.classifier_names() {
        let _ = write!(out, "| {name} |");
        for region in RegionKind::ALL {
            let value = grid
                .cell(name, region)
                .and_then(auc_percent)
                .unwrap_or_else(|| String::from("n/a"));
            let _ = write!(out, " {value} |");
        }
        out.push('\n');
    }
    out
}

fn xml_escape(s: &str) -> Cow<'_, str> {
    if s.contains(['&', '<', '>', '"']) {
        Cow::Owned(
            s.replace('&', "&amp;")
                .replace('<', "&lt;")
                .replace('>', "&gt;")
                .replace('"', "&quot;"),
        )
    } else {
        Cow::Borrowed(s)
    }
}

/// Linear color ramp for AUC 50% (light) to 100% (dark blue).
fn cell_fill(auc: f64) -> (String, &'static str) {
    let t = ((auc * 100.0 - 50.0) / 50.0).clamp(0.0, 1.0);
    let lerp = |lo: f64, hi: f64| (lo + (hi - lo) * t).round() as u8;
    let (r, g, b) = (lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0));
    let text = if t > 0.55 { "#ffffff" } else { "#1a1a1a" };
    (format!("#{r:02x}{g:02x}{b:02x}"), text)
}

pub fn render_heatmap(grid: &EvalGrid) -> String {
    const CELL_W: i32 = 92;
    const CELL_H: i32 = 26;
    const LEFT: i32 = 150;
    const TOP: i32 = 58;

    let classifiers = grid.classifier_names();
    let columns = RegionKind::ALL;
    let width = LEFT + CELL_W * columns.len() as i32 + 12;
    let height = TOP + CELL_H * classifiers.len() as i32 + 16;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    svg.push_str(concat!(
        "  <defs>\n",
        "    <pattern id=\"absent\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">\n",
        "      <rect width=\"6\" height=\"6\" fill=\"#e0e0e0\"/>\n",
        "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#9e9e9e\" stroke-width=\"2\"/>\n",
        "    </pattern>\n",
        "  </defs>\n",
    ));
    let _ = writeln!(
        svg,
        r##"  <rect width="{width}" height="{height}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{LEFT}" y="20" font-size="13" font-weight="bold">AUC (%) by classifier and region, seed {}</text>"#,
        grid.seed
    );

    for (col, region) in columns.iter().enumerate() {
        let x = LEFT + CELL_W * col as i32 + CELL_W / 2;
        let _ = writeln!(
            svg,
            r#"  <text x="{x}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
            TOP - 8,
            xml_escape(region.as_str())
        );
    }

    for (row, name) in classifiers.iter().enumerate() {
        let y = TOP + CELL_H * row as i32;
        let _ = writeln!(
            svg,
            r#"  <text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 8,
            y + CELL_H / 2 + 4,
            xml_escape(name)
        );
        for (col, region) in columns.iter().enumerate() {
            let x = LEFT + CELL_W * col as i32;
            let cell = grid.cell(name, *region);
            match cell.and_then(|c| c.auc) {
                Some(auc) => {
                    let (fill, text_fill) = cell_fill(auc);
                    let _ = writeln!(
                        svg,
                        r##"  <rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{fill}" stroke="#ffffff"/>"##
                    );
                    let _ = writeln!(
                        svg,
                        r#"  <text x="{}" y="{}" font-size="11" text-anchor="middle" fill="{text_fill}">{:.2}</text>"#,
                        x + CELL_W / 2,
                        y + CELL_H / 2 + 4,
                        auc * 100.0
                    );
                }
                None => {
                    let _ = writeln!(
                        svg,
                        r##"  <rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="url(#absent)" stroke="#ffffff"/>"##
                    );
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_heatmap(grid: &EvalGrid, out: &Path) -> io::Result<()> {
    fs::write(out, render_heatmap(grid))
}

/// One-line summary of the strongest evaluated cell.
pub fn best_cell_line(grid: &EvalGrid) -> Option<String> {
    grid.best_cell().map(|cell| {
        format!(
            "best cell: {} on {}, AUC {:.2}% (n_test {})",
            cell.classifier,
            cell.region.as_str(),
            cell.auc.unwrap_or_default() * 100.0,
            cell.n_test
        )
    })
}
