//! Regenerates the percentage and comparison tables from the embedded counts.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::reference::{
    comparison_groups, comparison_table_degree, lookup, printed_comparisons, printed_percentages, Block,
    PrintedComparison,
};
use super::render::{format_milli, milli, proportions};
use super::{two_proportion_test, ChoiceCounts, ComparisonResult, Method, Slice, StatsError};
use crate::game::{Action, Treatment};

pub const PERCENT_TABLES: [&str; 6] = ["1", "3", "5", "7", "A1", "A2"];
pub const COMPARISON_TABLES: [&str; 4] = ["2", "4", "6", "8"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentageRow {
    pub table: String,
    pub counts: ChoiceCounts,
    /// Our rendering of NoBuy, X and Y.
    pub cells: [String; 3],
    pub printed: [String; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub table: String,
    pub block: Block,
    pub key: String,
    pub condition: String,
    pub variable: Action,
    pub counts1: ChoiceCounts,
    pub counts2: ChoiceCounts,
    pub group1_milli: i64,
    pub group2_milli: i64,
    /// Difference of the rounded shares, in thousandths.
    pub diff_milli: i64,
    pub result: ComparisonResult,
    /// Only first-round observations are independent, so only those p-values
    /// can be recomputed from aggregate counts.
    pub verifiable: bool,
    pub printed: PrintedComparison,
}

impl ComparisonRow {
    pub fn printed_diff_milli(&self) -> i64 {
        (self.printed.diff * 1000.0).round() as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesReport {
    pub method: Method,
    pub percentages: Vec<PercentageRow>,
    pub comparisons: Vec<ComparisonRow>,
}

/// One cell whose regenerated value differs from the printed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub table: String,
    pub row: String,
    pub column: String,
    pub ours: String,
    pub printed: String,
}

fn counts_for(t: Treatment, s: Slice, degree: Option<u32>) -> Result<ChoiceCounts, StatsError> {
    lookup(t, s, degree)
        .copied()
        .ok_or_else(|| StatsError::Missing(format!("{t} {s} degree {degree:?}")))
}

pub fn reproduce_tables() -> Result<TablesReport, StatsError> {
    reproduce_tables_with(Method::PooledT)
}

pub fn reproduce_tables_with(method: Method) -> Result<TablesReport, StatsError> {
    let mut percentages = Vec::new();
    for p in printed_percentages() {
        let counts = counts_for(p.treatment, p.slice, p.degree)?;
        let cells = proportions(&counts)?.cells();
        percentages.push(PercentageRow {
            table: p.table.clone(),
            counts,
            cells,
            printed: p.cells().map(String::from),
        });
    }

    let mut comparisons = Vec::new();
    for c in printed_comparisons() {
        let degree = comparison_table_degree(&c.table);
        let ((t1, s1), (t2, s2)) = comparison_groups(c)?;
        let counts1 = counts_for(t1, s1, degree)?;
        let counts2 = counts_for(t2, s2, degree)?;
        let (k1, k2) = (counts1.count(c.variable), counts2.count(c.variable));
        let m1 = milli(k1, counts1.total)?;
        let m2 = milli(k2, counts2.total)?;
        let result = two_proportion_test(k1, counts1.total, k2, counts2.total, method)?
            .labelled(group_label(t1, s1), group_label(t2, s2));
        comparisons.push(ComparisonRow {
            table: c.table.clone(),
            block: c.block,
            key: c.key.clone(),
            condition: c.condition.clone(),
            variable: c.variable,
            counts1,
            counts2,
            group1_milli: m1,
            group2_milli: m2,
            diff_milli: m1 - m2,
            result,
            verifiable: s1 == Slice::Round1 && s2 == Slice::Round1,
            printed: c.clone(),
        });
    }
    Ok(TablesReport {
        method,
        percentages,
        comparisons,
    })
}

fn group_label(t: Treatment, s: Slice) -> String {
    format!("{t}/{s}")
}

fn row_label(c: &ChoiceCounts) -> String {
    match c.degree {
        Some(d) => format!("{} {} degree {}", c.treatment, c.slice, d),
        None => format!("{} {}", c.treatment, c.slice),
    }
}

impl TablesReport {
    pub fn percentage_mismatches(&self) -> Vec<CellMismatch> {
        let mut out = Vec::new();
        for r in &self.percentages {
            for (i, a) in Action::ALL.iter().enumerate() {
                if r.cells[i] != r.printed[i] {
                    out.push(CellMismatch {
                        table: r.table.clone(),
                        row: row_label(&r.counts),
                        column: a.name().into(),
                        ours: r.cells[i].clone(),
                        printed: r.printed[i].clone(),
                    });
                }
            }
        }
        out
    }

    /// Diff cells further than `tol_milli` thousandths from the printed value.
    pub fn diff_mismatches(&self, tol_milli: i64) -> Vec<CellMismatch> {
        self.comparisons
            .iter()
            .filter(|r| (r.diff_milli - r.printed_diff_milli()).abs() > tol_milli)
            .map(|r| CellMismatch {
                table: r.table.clone(),
                row: comparison_label(r),
                column: "diff".into(),
                ours: format_milli(r.diff_milli),
                printed: format_milli(r.printed_diff_milli()),
            })
            .collect()
    }

    /// Verifiable rows whose two-sided p-value misses the printed one by more than `tol`.
    pub fn round1_pvalue_mismatches(&self, tol: f64) -> Vec<CellMismatch> {
        self.comparisons
            .iter()
            .filter(|r| r.verifiable && (r.result.p_two - r.printed.p_two).abs() > tol)
            .map(|r| CellMismatch {
                table: r.table.clone(),
                row: comparison_label(r),
                column: "p_two".into(),
                ours: format!("{:.3}", r.result.p_two),
                printed: format!("{:.3}", r.printed.p_two),
            })
            .collect()
    }

    pub fn table_names() -> impl Iterator<Item = &'static str> {
        ["1", "2", "3", "4", "5", "6", "7", "8", "A1", "A2"].into_iter()
    }

    pub fn table_csv(&self, table: &str) -> Result<String, StatsError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if PERCENT_TABLES.contains(&table) {
            w.write_record([
                "treatment",
                "slice",
                "degree",
                "no_buy",
                "token_x",
                "token_y",
                "total",
                "no_buy_pct",
                "token_x_pct",
                "token_y_pct",
            ])?;
            for r in self.percentages.iter().filter(|r| r.table == table) {
                let c = &r.counts;
                w.write_record([
                    c.treatment.to_string(),
                    c.slice.to_string(),
                    c.degree.map(|d| d.to_string()).unwrap_or_default(),
                    c.no_buy.to_string(),
                    c.token_x.to_string(),
                    c.token_y.to_string(),
                    c.total.to_string(),
                    r.cells[0].clone(),
                    r.cells[1].clone(),
                    r.cells[2].clone(),
                ])?;
            }
        } else if COMPARISON_TABLES.contains(&table) {
            w.write_record([
                "block",
                "key",
                "condition",
                "variable",
                "group1",
                "group2",
                "diff",
                "p_two",
                "p_left",
                "p_right",
                "method",
                "verifiable",
            ])?;
            for r in self.comparisons.iter().filter(|r| r.table == table) {
                w.write_record([
                    serde_json::to_value(r.block)?.as_str().unwrap_or_default().to_string(),
                    r.key.clone(),
                    r.condition.clone(),
                    r.variable.name().to_string(),
                    format_milli(r.group1_milli),
                    format_milli(r.group2_milli),
                    format_milli(r.diff_milli),
                    format!("{:.3}", r.result.p_two),
                    format!("{:.3}", r.result.p_left),
                    format!("{:.3}", r.result.p_right),
                    serde_json::to_value(r.result.method)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    r.verifiable.to_string(),
                ])?;
            }
        } else {
            return Err(StatsError::Missing(format!("table {table}")));
        }
        let bytes = w.into_inner().map_err(|e| StatsError::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for table in Self::table_names() {
            if PERCENT_TABLES.contains(&table) {
                self.percent_text(table, &mut s);
            } else {
                self.comparison_text(table, &mut s);
            }
            s.push('\n');
        }
        let pm = self.percentage_mismatches();
        let dm = self.diff_mismatches(1);
        let vm = self.round1_pvalue_mismatches(0.01);
        let _ = writeln!(s, "Checks against printed values");
        let _ = writeln!(s, "  percentage cells differing: {}", pm.len());
        for m in &pm {
            let _ = writeln!(
                s,
                "    table {} {} {}: ours {} printed {}",
                m.table, m.row, m.column, m.ours, m.printed
            );
        }
        let _ = writeln!(s, "  diff cells beyond 0.001: {}", dm.len());
        let _ = writeln!(s, "  first-round p-values beyond 0.01: {}", vm.len());
        s
    }

    fn percent_text(&self, table: &str, s: &mut String) {
        let title = match table {
            "1" => "Token decisions, row percentages".to_string(),
            "A1" => "Token decisions by part, counts and row percentages".to_string(),
            "A2" => "Token decisions by part and number of links".to_string(),
            _ => format!(
                "Token decisions for degree {}, row percentages",
                match table {
                    "3" => 1,
                    "5" => 2,
                    _ => 3,
                }
            ),
        };
        let _ = writeln!(s, "Table {table}. {title}");
        let _ = writeln!(
            s,
            "{:<14}{:<9}{:>4}{:>16}{:>16}{:>16}",
            "window", "treat.", "deg", "no buy", "token X", "token Y"
        );
        for r in self.percentages.iter().filter(|r| r.table == table) {
            let c = &r.counts;
            let cell = |i: usize, n: u64| {
                if table.starts_with('A') && r.cells[i] != "--" {
                    format!("{n} ({}%)", r.cells[i])
                } else {
                    r.cells[i].clone()
                }
            };
            let _ = writeln!(
                s,
                "{:<14}{:<9}{:>4}{:>16}{:>16}{:>16}",
                c.slice.title(),
                c.treatment.label(),
                c.degree.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                cell(0, c.no_buy),
                cell(1, c.token_x),
                cell(2, c.token_y),
            );
        }
    }

    fn comparison_text(&self, table: &str, s: &mut String) {
        let scope = match comparison_table_degree(table) {
            Some(d) => format!("degree {d}"),
            None => "all positions".into(),
        };
        let _ = writeln!(s, "Table {table}. Treatment comparisons, {scope} ({:?})", self.method);
        let _ = writeln!(
            s,
            "{:<10}{:<10}{:<12}{:<9}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}",
            "block", "key", "condition", "var", "g1", "g2", "diff", "p_two", "p_left", "p_right"
        );
        for r in self.comparisons.iter().filter(|r| r.table == table) {
            let _ = writeln!(
                s,
                "{:<10}{:<10}{:<12}{:<9}{:>8}{:>8}{:>8}{:>8.3}{:>8.3}{:>8.3}{}",
                format!("{:?}", r.block).to_lowercase(),
                r.key,
                r.condition,
                if r.variable == Action::NoBuy {
                    "no buy"
                } else {
                    "token X"
                },
                format_milli(r.group1_milli),
                format_milli(r.group2_milli),
                format_milli(r.diff_milli),
                r.result.p_two,
                r.result.p_left,
                r.result.p_right,
                if r.verifiable { "" } else { "  *" },
            );
        }
        let _ = writeln!(
            s,
            "  * multi-round rows: p-values treat rounds as independent and are not comparable to subject-level tests"
        );
    }
}

fn comparison_label(r: &ComparisonRow) -> String {
    format!("{:?}/{}/{}/{}", r.block, r.key, r.condition, r.variable).to_lowercase()
}
