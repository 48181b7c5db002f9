//! Differential-test reports.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

/// Where a row's expected outcome came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedSource {
    /// Computed by the reference semantics.
    Oracle,
    /// Stored with the program.
    Embedded,
    /// The unoptimized program's own result.
    PreOptimization,
    /// A stored optimized graph.
    Golden,
}

fn values_as_strings<S: Serializer>(v: &[Value], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub method: String,
    /// Phase list applied, for commutation rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<String>,
    #[serde(serialize_with = "values_as_strings")]
    pub args: Vec<Value>,
    pub source: ExpectedSource,
    pub expected: String,
    pub actual: String,
    pub verdict: Verdict,
}

type SortKey = (String, Vec<(Option<i64>, Option<u8>)>, ExpectedSource, Option<String>);

impl Row {
    /// Method, then arguments by signed value.
    fn sort_key(&self) -> SortKey {
        let args = self.args.iter().map(|v| (v.signed(), v.bits())).collect();
        (self.method.clone(), args, self.source, self.phases.clone())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl DiffReport {
    /// Builds a report with rows in (method, args) order.
    pub fn from_rows(mut rows: Vec<Row>) -> Self {
        rows.sort_by_cached_key(Row::sort_key);
        let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
        DiffReport {
            summary: Summary {
                total: rows.len(),
                pass: count(Verdict::Pass),
                fail: count(Verdict::Fail),
                skip: count(Verdict::Skip),
            },
            rows,
        }
    }

    pub fn merge(reports: impl IntoIterator<Item = DiffReport>) -> Self {
        DiffReport::from_rows(reports.into_iter().flat_map(|r| r.rows).collect())
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        write!(f, "{verdict} {}({})", self.method, args.join(", "))?;
        if let Some(p) = &self.phases {
            write!(f, " [{p}]")?;
        }
        write!(f, " expected {} got {}", self.expected, self.actual)
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.failures() {
            writeln!(f, "{r}")?;
        }
        let s = &self.summary;
        write!(
            f,
            "{} tests: {} passed, {} failed, {} skipped",
            s.total, s.pass, s.fail, s.skip
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::int;

    fn row(method: &str, a: i128, verdict: Verdict) -> Row {
        Row {
            method: method.into(),
            phases: None,
            args: vec![int(32, a)],
            source: ExpectedSource::Embedded,
            expected: "32:0".into(),
            actual: "32:0".into(),
            verdict,
        }
    }

    #[test]
    fn counts_add_up_and_order_is_stable() {
        let rows = vec![
            row("b", 1, Verdict::Pass),
            row("a", 2, Verdict::Fail),
            row("a", -1, Verdict::Skip),
        ];
        let r1 = DiffReport::from_rows(rows.clone());
        let r2 = DiffReport::from_rows(rows.into_iter().rev().collect());
        assert_eq!(r1, r2);
        assert_eq!(r1.to_json(), r2.to_json());
        let s = &r1.summary;
        assert_eq!(s.pass + s.fail + s.skip, s.total);
        assert_eq!(r1.rows[0].args, vec![int(32, -1)]);
        assert!(!r1.passed());
    }

    #[test]
    fn empty_report_passes() {
        let r = DiffReport::from_rows(vec![]);
        assert_eq!(r.summary.total, 0);
        assert!(r.passed());
    }
}
