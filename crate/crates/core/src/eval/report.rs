use std::collections::BTreeSet;
use std::fmt::Write;
use std::str::FromStr;

use super::{fmt2, OracleReport, Score, ScoreReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Tsv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Tsv => "tsv",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown format `{}`", s)),
        }
    }
}

fn score_row(out: &mut String, name: &str, s: &Score) {
    let _ = writeln!(
        out,
        "{:<14}{:>9}{:>11}{:>9}{:>9}{:>9}{:>9}",
        name,
        s.counts.matched,
        s.counts.predicted,
        s.counts.gold,
        fmt2(s.precision),
        fmt2(s.recall),
        fmt2(s.f1)
    );
}

fn header(out: &mut String, first: &str) {
    let _ = writeln!(
        out,
        "{:<14}{:>9}{:>11}{:>9}{:>9}{:>9}{:>9}",
        first, "matched", "predicted", "gold", "P", "R", "F"
    );
}

/// Human-readable table.
pub fn render_text(report: &ScoreReport) -> String {
    let mut out = String::new();
    header(&mut out, "scope");
    score_row(&mut out, "ALL", &report.overall);
    score_row(&mut out, "Arg.", &report.arguments);
    score_row(&mut out, "Adj.", &report.adjuncts);
    out.push('\n');
    header(&mut out, "role");
    for (role, s) in &report.per_role {
        score_row(&mut out, role, s);
    }
    if let Some(groups) = &report.groups {
        out.push('\n');
        header(&mut out, "group");
        for (name, g) in groups {
            score_row(&mut out, name, &g.overall);
        }
    }
    if let Some(delta) = &report.delta_f {
        out.push('\n');
        let _ = writeln!(out, "{:<14}{:>9}", "dF (L2-L1)", "");
        for (name, d) in delta {
            let _ = writeln!(out, "{:<14}{:>9}", name, fmt2(*d));
        }
    }
    out
}

fn tsv_scores(out: &mut String, group: &str, r: &ScoreReport) {
    let mut row = |metric: &str, value: String| {
        let _ = writeln!(out, "{}\t{}\t{}", metric, group, value);
    };
    row("matched", r.overall.counts.matched.to_string());
    row("predicted", r.overall.counts.predicted.to_string());
    row("gold", r.overall.counts.gold.to_string());
    row("P", fmt2(r.precision()));
    row("R", fmt2(r.recall()));
    row("F", fmt2(r.f1()));
    row("Arg.-F", fmt2(r.arguments.f1));
    row("Adj.-F", fmt2(r.adjuncts.f1));
    for (role, s) in &r.per_role {
        row(&format!("P[{}]", role), fmt2(s.precision));
        row(&format!("R[{}]", role), fmt2(s.recall));
        row(&format!("F[{}]", role), fmt2(s.f1));
    }
}

/// `metric<TAB>group<TAB>value` lines; the overall group is `ALL`.
pub fn render_tsv(report: &ScoreReport) -> String {
    let mut out = String::from("metric\tgroup\tvalue\n");
    tsv_scores(&mut out, "ALL", report);
    if let Some(groups) = &report.groups {
        for (name, g) in groups {
            tsv_scores(&mut out, name, g);
        }
    }
    if let Some(delta) = &report.delta_f {
        for (name, d) in delta {
            let _ = writeln!(out, "dF\t{}\t{}", name, fmt2(*d));
        }
    }
    out
}

pub fn render_json(report: &ScoreReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// Per-role F by group: one row per role plus `ALL`, one column per group
/// (missing cells are `-`).
pub fn iaa_table_tsv(report: &ScoreReport) -> String {
    let empty = Default::default();
    let groups = report.groups.as_ref().unwrap_or(&empty);
    let roles: BTreeSet<&String> = groups.values().flat_map(|g| g.per_role.keys()).collect();
    let mut out = String::from("role");
    for name in groups.keys() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for role in roles {
        out.push_str(role);
        for g in groups.values() {
            out.push('\t');
            match g.per_role.get(role) {
                Some(s) => out.push_str(&fmt2(s.f1)),
                None => out.push('-'),
            }
        }
        out.push('\n');
    }
    out.push_str("ALL");
    for g in groups.values() {
        out.push('\t');
        out.push_str(&fmt2(g.f1()));
    }
    out.push('\n');
    out
}

impl OracleReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "initial F = {}", fmt2(self.initial.f1()));
        let _ = writeln!(out, "{:<10}{:>9}{:>9}{:>17}", "stage", "F", "gain", "error_reduction");
        for s in &self.stages {
            let _ = writeln!(
                out,
                "{:<10}{:>9}{:>9}{:>17}",
                s.kind.as_str(),
                fmt2(s.report.f1()),
                fmt2(s.gain),
                fmt2(s.error_reduction)
            );
        }
        out
    }

    pub fn render_tsv(&self) -> String {
        let mut out = String::from("stage\tF\tgain\terror_reduction\n");
        for s in &self.stages {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                s.kind,
                fmt2(s.report.f1()),
                fmt2(s.gain),
                fmt2(s.error_reduction)
            );
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
