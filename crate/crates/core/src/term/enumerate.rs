//! Exhaustive term enumeration in a fixed, reproducible order.
//!
//! Terms are listed by depth, then arity, then operator (`~`, `J0`, `J1`,
//! `J2`, `&`, `|`), with variables before constants at depth 0. The number
//! of terms grows doubly exponentially; with two variables there are about
//! 5.6 thousand terms of depth 2 and 63 million of depth 3, so the bounded
//! scans elsewhere in the crate work on value classes instead of calling
//! these functions at depth 3.

use super::{BinaryOp, Term, UnaryOp};

/// `x`, `y`, `z`, `w`, then `v5`, `v6`, ...
pub fn standard_variables(k: usize) -> Vec<String> {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    (0..k)
        .map(|i| NAMES.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("v{}", i + 1)))
        .collect()
}

/// All terms of depth exactly `depth` over `vars` and the two constants.
pub fn terms_of_depth(depth: usize, vars: &[String]) -> Vec<Term> {
    levels(depth, vars).pop().unwrap_or_default()
}

/// All terms of depth at most `depth`, shallowest first.
pub fn terms_up_to(depth: usize, vars: &[String]) -> Vec<Term> {
    levels(depth, vars).into_iter().flatten().collect()
}

fn levels(depth: usize, vars: &[String]) -> Vec<Vec<Term>> {
    let mut base: Vec<Term> = vars.iter().map(|v| Term::var(v.clone())).collect();
    base.push(Term::zero());
    base.push(Term::one());
    let mut levels = vec![base];
    for d in 1..=depth {
        let prev = &levels[d - 1];
        let below: Vec<&Term> = levels.iter().flatten().collect();
        let below_prev = below.len() - prev.len();
        let mut next = Vec::new();
        for op in UnaryOp::ALL {
            next.extend(prev.iter().map(|t| Term::unary(op, t.clone())));
        }
        for op in BinaryOp::ALL {
            for (i, l) in below.iter().enumerate() {
                for (j, r) in below.iter().enumerate() {
                    // at least one side must reach depth d - 1
                    if i < below_prev && j < below_prev {
                        continue;
                    }
                    next.push(Term::binary(op, (*l).clone(), (*r).clone()));
                }
            }
        }
        levels.push(next);
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_names() {
        assert_eq!(standard_variables(5), vec!["x", "y", "z", "w", "v5"]);
    }

    #[test]
    fn counts_match_recurrence() {
        let vars = standard_variables(2);
        assert_eq!(terms_of_depth(0, &vars).len(), 4);
        assert_eq!(terms_of_depth(1, &vars).len(), 4 * 4 + 2 * 16);
        assert_eq!(terms_up_to(2, &vars).len(), 4 + 48 + (4 * 48 + 2 * (52 * 52 - 16)));
    }

    #[test]
    fn order_and_depth() {
        let vars = standard_variables(1);
        let d1 = terms_of_depth(1, &vars);
        assert_eq!(d1[0], Term::neg(Term::var("x")));
        assert_eq!(d1[2], Term::neg(Term::one()));
        assert_eq!(d1[3], Term::j(0, Term::var("x")));
        assert!(matches!(d1.last(), Some(Term::Binary(BinaryOp::Or, ..))));
        for t in terms_up_to(2, &vars) {
            assert!(t.depth() <= 2);
        }
        for t in terms_of_depth(2, &vars) {
            assert_eq!(t.depth(), 2);
        }
        let all = terms_up_to(2, &vars);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }
}
