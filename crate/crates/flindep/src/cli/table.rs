//! Aligned plain-text tables.
//!
//! Scenario tables follow the layout of the simulation study they feed:
//! one block per scenario, one row per significance level, one column group
//! per method with a subcolumn per component count, entries in percent.

use crate::cli::document::{ResultDocument, TestRecord};
use crate::simgen::{ScenarioReport, ScenarioSpec, ThetaSpec};

fn trim_number(value: f64) -> String {
    let text = format!("{value:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    text.to_string()
}

fn alpha_label(alpha: f64) -> String {
    format!("{}%", trim_number(alpha * 100.0))
}

fn rate_label(rate: f64) -> String {
    format!("{:.1}", rate * 100.0)
}

fn generator_summary(spec: &ScenarioSpec) -> String {
    let slope = match &spec.theta {
        ThetaSpec::Zero => "zero".to_string(),
        ThetaSpec::SinCubed => "sin-cubed".to_string(),
        ThetaSpec::Custom(values) => format!("custom({} values)", values.len()),
    };
    let mut parts = vec![
        format!("n={}", spec.n),
        format!("p={}", spec.p),
        format!("datasets={}", spec.datasets),
        format!("replicates={}", spec.replicates),
        format!("slope={slope}"),
    ];
    if let Some(local) = &spec.local {
        parts.push(format!(
            "local scale={} exponent={}",
            trim_number(local.scale),
            trim_number(local.exponent)
        ));
    }
    if let Some(r) = spec.r {
        parts.push(format!("r={}", trim_number(r)));
    }
    if let Some(sigma0) = spec.sigma0 {
        parts.push(format!("sigma0={}", trim_number(sigma0)));
    }
    parts.push(format!("seed={}", spec.seed));
    parts.join(", ")
}

struct Group {
    label: String,
    kns: Vec<Option<usize>>,
    widths: Vec<usize>,
}

impl Group {
    fn width(&self) -> usize {
        let cells: usize = self.widths.iter().sum();
        cells + 2 * (self.widths.len() - 1)
    }
}

/// Render one scenario block: title line, method/kn headers, one row per α.
pub fn scenario_table(report: &ScenarioReport) -> String {
    let mut groups: Vec<Group> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    for cell in &report.cells {
        match groups.last_mut() {
            Some(g) if g.label == cell.label => {
                if !g.kns.contains(&cell.kn) {
                    g.kns.push(cell.kn);
                }
            }
            _ => groups.push(Group {
                label: cell.label.clone(),
                kns: vec![cell.kn],
                widths: Vec::new(),
            }),
        }
        if !alphas.iter().any(|a| a == &cell.alpha) {
            alphas.push(cell.alpha);
        }
    }
    alphas.sort_by(|a, b| b.partial_cmp(a).expect("alphas are finite"));

    let rate_of = |label: &str, kn: Option<usize>, alpha: f64| -> f64 {
        report
            .cells
            .iter()
            .find(|c| c.label == label && c.kn == kn && c.alpha == alpha)
            .map(|c| c.rate)
            .expect("every (method, kn, alpha) cell exists")
    };

    // Column width: wide enough for "100.0" and the kn subheader; widen the
    // last column when the method label overflows its group.
    for g in &mut groups {
        g.widths = g
            .kns
            .iter()
            .map(|kn| kn.map_or(5, |kn| format!("kn={kn}").len().max(5)))
            .collect();
        let deficit = g.label.len().saturating_sub(g.width());
        if let Some(last) = g.widths.last_mut() {
            *last += deficit;
        }
    }

    let alpha_width = alphas
        .iter()
        .map(|a| alpha_label(*a).len())
        .chain(["alpha".len()])
        .max()
        .expect("non-empty");
    let group_sep = "  |  ";

    let mut lines = Vec::new();
    lines.push(format!("scenario {}: {}", report.name, generator_summary(&report.spec)));
    lines.push(String::new());

    let mut header = format!("{:>alpha_width$}", "alpha");
    for g in &groups {
        header.push_str(group_sep);
        header.push_str(&format!("{:<width$}", g.label, width = g.width()));
    }
    lines.push(header.trim_end().to_string());

    let mut subheader = format!("{:>alpha_width$}", "");
    for g in &groups {
        subheader.push_str(group_sep);
        let cells: Vec<String> = g
            .kns
            .iter()
            .zip(&g.widths)
            .map(|(kn, w)| {
                let text = kn.map_or(String::new(), |kn| format!("kn={kn}"));
                format!("{text:>w$}")
            })
            .collect();
        subheader.push_str(&cells.join("  "));
    }
    lines.push(subheader.trim_end().to_string());

    for &alpha in &alphas {
        let mut row = format!("{:>alpha_width$}", alpha_label(alpha));
        for g in &groups {
            row.push_str(group_sep);
            let cells: Vec<String> = g
                .kns
                .iter()
                .zip(&g.widths)
                .map(|(kn, w)| format!("{:>w$}", rate_label(rate_of(&g.label, *kn, alpha))))
                .collect();
            row.push_str(&cells.join("  "));
        }
        lines.push(row);
    }
    lines.join("\n") + "\n"
}

/// Render a battery of single tests: one row per test.
pub fn test_table(records: &[TestRecord]) -> String {
    let with_verdict = records.iter().any(|r| r.reject.is_some());
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec![
        "statistic".to_string(),
        "kn".to_string(),
        "method".to_string(),
        "value".to_string(),
        "p-value".to_string(),
    ];
    if with_verdict {
        header.push("decision".to_string());
    }
    rows.push(header);
    for r in records {
        let mut row = vec![
            r.statistic.to_string(),
            r.kn.map_or(String::from("-"), |kn| kn.to_string()),
            r.method.clone(),
            format!("{:.6}", r.value),
            format!("{:.4}", r.p_value),
        ];
        if with_verdict {
            row.push(match r.reject {
                Some(true) => "reject".to_string(),
                Some(false) => "keep".to_string(),
                None => "-".to_string(),
            });
        }
        rows.push(row);
    }

    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().map(|r| r[c].len()).max().expect("non-empty"))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Human-readable rendering of a whole document.
pub fn document_tables(doc: &ResultDocument) -> String {
    let mut parts = Vec::new();
    if !doc.tests.is_empty() {
        parts.push(test_table(&doc.tests));
    }
    for scenario in &doc.scenarios {
        parts.push(scenario_table(scenario));
    }
    parts.join("\n")
}
