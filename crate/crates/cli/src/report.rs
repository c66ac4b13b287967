use serde::{Deserialize, Serialize};
use serde_json::Value;
use tailward_core::montecarlo::TailEstimate;
use tailward_core::{AsymptoticTail, RatioTable};

/// A ratio table with a name rules can refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTable {
    pub name: String,
    pub table: RatioTable,
}

/// Monte Carlo estimates next to the exact values they estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedEstimates {
    pub name: String,
    pub rows: Vec<TailEstimate>,
    pub truth: Vec<f64>,
}

/// An acceptance rule. Every field needed to decide it lives either here
/// or in the report's tables and estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    AllRowsOk { table: String },
    RatioBand { table: String, u: f64, lo: f64, hi: f64 },
    DeviationNonincreasing { table: String, from_u: f64 },
    DeviationBelow { table: String, u: f64, max: f64 },
    RatioNear { table: String, u: f64, target: f64, tol: f64 },
    /// Pairwise relative agreement of the exact values at `u`.
    TablesAgree { tables: Vec<String>, u: f64, rel: f64 },
    /// CI reaches the truth, allowing a one-sided shortfall of `rel`.
    CiReaches { estimates: String, u: f64, rel_low: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    #[serde(flatten)]
    pub rule: Rule,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub fixture: String,
    pub theorem: String,
    /// Arguments that reproduce this report.
    pub argv: Vec<String>,
    pub inputs: Value,
    pub seed: u64,
    #[serde(default)]
    pub predicted: Option<AsymptoticTail>,
    #[serde(default)]
    pub tables: Vec<NamedTable>,
    #[serde(default)]
    pub estimates: Vec<NamedEstimates>,
    pub rules: Vec<RuleOutcome>,
    pub pass: bool,
    pub runtime_s: f64,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn row_at(t: &RatioTable, u: f64) -> Option<&tailward_core::RatioRow> {
    t.rows.iter().find(|r| r.u == u)
}

impl VerifyReport {
    fn table(&self, name: &str) -> Option<&RatioTable> {
        self.tables.iter().find(|t| t.name == name).map(|t| &t.table)
    }

    fn ratio(&self, table: &str, u: f64) -> Option<f64> {
        row_at(self.table(table)?, u).filter(|r| r.is_ok())?.ratio
    }

    pub fn evaluate(&self, rule: &Rule) -> bool {
        match rule {
            Rule::AllRowsOk { table } => self.table(table).is_some_and(RatioTable::all_ok),
            Rule::RatioBand { table, u, lo, hi } => self.ratio(table, *u).is_some_and(|r| *lo <= r && r <= *hi),
            Rule::DeviationNonincreasing { table, from_u } => self.table(table).is_some_and(|t| {
                let devs: Option<Vec<f64>> =
                    t.rows.iter().filter(|r| r.u >= *from_u).map(|r| r.ratio.map(|x| (x - 1.0).abs())).collect();
                devs.is_some_and(|d| !d.is_empty() && d.windows(2).all(|w| w[1] <= w[0]))
            }),
            Rule::DeviationBelow { table, u, max } => self.ratio(table, *u).is_some_and(|r| (r - 1.0).abs() < *max),
            Rule::RatioNear { table, u, target, tol } => {
                self.ratio(table, *u).is_some_and(|r| (r - target).abs() <= *tol)
            }
            Rule::TablesAgree { tables, u, rel } => {
                let vals: Option<Vec<f64>> =
                    tables.iter().map(|n| self.table(n).and_then(|t| row_at(t, *u)?.log_sf_exact)).collect();
                vals.is_some_and(|v| v.iter().all(|a| v.iter().all(|b| ((a - b).exp() - 1.0).abs() <= *rel)))
            }
            Rule::CiReaches { estimates, u, rel_low } => {
                let Some(e) = self.estimates.iter().find(|e| e.name == *estimates) else { return false };
                let Some(i) = e.rows.iter().position(|r| r.u == *u) else { return false };
                let (row, truth) = (&e.rows[i], e.truth[i]);
                let slack = 1e-12 * truth.abs();
                row.ci_lo <= truth + slack && row.ci_hi >= truth * (1.0 - rel_low) - slack
            }
        }
    }

    /// Decides each rule and the overall verdict from the embedded data.
    pub fn decide(&mut self) {
        let decided: Vec<bool> = self.rules.iter().map(|o| self.evaluate(&o.rule)).collect();
        for (o, p) in self.rules.iter_mut().zip(&decided) {
            o.pass = *p;
        }
        self.pass = !decided.is_empty() && decided.iter().all(|p| *p);
    }

    /// True when the stored verdicts match a fresh evaluation.
    pub fn recheck(&self) -> bool {
        let mut again = self.clone();
        again.decide();
        again.rules == self.rules && again.pass == self.pass
    }

    /// The report without its wall-clock field, for bitwise comparison.
    pub fn without_runtime(&self) -> VerifyReport {
        VerifyReport { runtime_s: 0.0, ..self.clone() }
    }
}

pub fn rules(list: Vec<Rule>) -> Vec<RuleOutcome> {
    list.into_iter().map(|rule| RuleOutcome { rule, pass: false }).collect()
}
