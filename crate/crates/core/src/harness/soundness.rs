//! Exhaustive check of the stamp algebra at a small width: every pair of
//! ranges is compared against brute-force enumeration of its members.

use crate::ir::{IRNode, NodeId};
use crate::stamp::{fold_compare, refine_by_condition, signed_max, signed_min, IntegerStamp, Refinement, TriState};
use crate::value::CompareOp;

use super::runner::{par_map, Execution};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SoundnessReport {
    pub stamp_pairs: usize,
    pub checks: u64,
    /// Human-readable descriptions of every contradiction found.
    pub contradictions: Vec<String>,
}

impl SoundnessReport {
    pub fn sound(&self) -> bool {
        self.contradictions.is_empty()
    }
}

/// Every stamp of width `bits`.
pub fn all_stamps(bits: u32) -> Vec<IntegerStamp> {
    let (min, max) = (signed_min(bits), signed_max(bits));
    let mut out = Vec::new();
    for lo in min..=max {
        for hi in lo..=max {
            out.push(IntegerStamp::new(bits, lo, hi).expect("in range"));
        }
    }
    out
}

fn holds(op: CompareOp, a: i64, b: i64) -> bool {
    match op {
        CompareOp::IntegerEquals => a == b,
        CompareOp::IntegerLessThan => a < b,
    }
}

fn members(s: IntegerStamp) -> std::ops::RangeInclusive<i64> {
    s.lo()..=s.hi()
}

fn check_pair(sx: IntegerStamp, sy: IntegerStamp, same_node: bool) -> (u64, Vec<String>) {
    let mut checks = 0;
    let mut bad = Vec::new();
    for op in [CompareOp::IntegerEquals, CompareOp::IntegerLessThan] {
        let pairs: Vec<(i64, i64)> = if same_node {
            members(sx).filter(|v| sy.contains(*v)).map(|v| (v, v)).collect()
        } else {
            members(sx).flat_map(|a| members(sy).map(move |b| (a, b))).collect()
        };
        if !same_node {
            let folded = fold_compare(op, sx, sy);
            for &(a, b) in &pairs {
                checks += 1;
                let r = holds(op, a, b);
                if (folded == TriState::AlwaysTrue && !r) || (folded == TriState::AlwaysFalse && r) {
                    bad.push(format!("{op:?} {sx:?} {sy:?}: folded {folded:?} but {a},{b} gives {r}"));
                }
            }
        }
        let (x, y) = (NodeId(0), if same_node { NodeId(0) } else { NodeId(1) });
        let cond = IRNode::Compare { op, x, y };
        let lookup = |n: NodeId| Some(if n == x { sx } else { sy });
        for polarity in [true, false] {
            let refinement = refine_by_condition(&cond, polarity, lookup);
            for &(a, b) in pairs.iter().filter(|(a, b)| holds(op, *a, *b) == polarity) {
                checks += 1;
                match &refinement {
                    Refinement::Infeasible => bad.push(format!(
                        "{op:?}={polarity} {sx:?} {sy:?}: infeasible but {a},{b} satisfies it"
                    )),
                    Refinement::Stamps(updates) => {
                        for (n, s) in updates {
                            let v = if *n == x { a } else { b };
                            let base = if *n == x { sx } else { sy };
                            if !s.contains(v) || s.lo() < base.lo() || s.hi() > base.hi() {
                                bad.push(format!(
                                    "{op:?}={polarity} {sx:?} {sy:?}: refined node {n} to {s:?}, loses {v}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    (checks, bad)
}

/// Checks `fold_compare` and `refine_by_condition` on every pair of stamps
/// of width `bits` (also with both operands the same node) against all
/// member values.
pub fn stamp_soundness(bits: u32, exec: Execution) -> SoundnessReport {
    let stamps = all_stamps(bits);
    let pairs: Vec<(IntegerStamp, IntegerStamp)> = stamps
        .iter()
        .flat_map(|a| stamps.iter().map(move |b| (*a, *b)))
        .collect();
    let results = par_map(exec, &pairs, |&(a, b)| {
        let (c1, mut bad) = check_pair(a, b, false);
        let (c2, bad2) = if a == b {
            check_pair(a, b, true)
        } else {
            (0, Vec::new())
        };
        bad.extend(bad2);
        (c1 + c2, bad)
    });
    let mut report = SoundnessReport {
        stamp_pairs: pairs.len(),
        ..Default::default()
    };
    for (c, bad) in results {
        report.checks += c;
        report.contradictions.extend(bad);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stamp_count() {
        // 16 values give 16 * 17 / 2 ranges
        assert_eq!(all_stamps(4).len(), 136);
    }

    #[test]
    fn three_bit_algebra_is_sound() {
        let r = stamp_soundness(3, Execution::Sequential);
        assert_eq!(r.stamp_pairs, 36 * 36);
        assert!(r.sound(), "{:?}", &r.contradictions[..r.contradictions.len().min(5)]);
    }

    #[test]
    fn touching_ranges_stay_undecided() {
        let sx = IntegerStamp::new(4, 0, 2).unwrap();
        let sy = IntegerStamp::new(4, 2, 3).unwrap();
        assert_eq!(fold_compare(CompareOp::IntegerLessThan, sx, sy), TriState::Unknown);
        let (checks, bad) = check_pair(sx, sy, false);
        assert!(checks > 0);
        assert!(bad.is_empty());
    }
}
