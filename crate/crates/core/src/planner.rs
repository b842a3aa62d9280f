//! Derivation plans: which construction rules produce a design of a given
//! order, and their execution.
//!
//! Rules: BASE leaves (SQS of order 1, 2, 4, 8; S(3,{4,6}) of order 2, 4, 6),
//! SEARCH leaves (SQS up to the search cap), FILE leaves (designs supplied
//! by the caller), DOUBLE (`n → 2n`) and THEOREM3 (`n → 8n+2`, SQS only,
//! needing 6 MOLS of order `n`). Among valid plans the one with the fewest
//! SEARCH executions wins, then the smallest sum of orders over executed
//! nodes. A THEOREM3 node executes its child four times and a DOUBLE node
//! twice, and multiplicities count.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::bbd::bbd_from_factorizations;
use crate::error::{Error, Result};
use crate::io::load_design;
use crate::latin::{mols_capacity, round_robin_one_factorization};
use crate::model::{is_admissible, Design, Kind};
use crate::search::{search_small_sqs, DEFAULT_SEARCH_BUDGET, DEFAULT_SEARCH_CAP};
use crate::sqs::{boolean_sqs8, double, s46_base, theorem3_assemble, theorem3_ingredients, Theorem3Output};
use crate::verify::{verify_design_with, CoverageOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanNode {
    Base { kind: Kind, v: u32 },
    Search { v: u32 },
    File { kind: Kind, v: u32, path: PathBuf },
    /// Two copies of `child` joined by a bipartite design with groups of `child` order.
    Double { kind: Kind, v: u32, child: Box<PlanNode> },
    /// `8n+2` from MDS(7,8,n), 24 bipartite designs and four copies of `child` (order `2n+2`).
    Theorem3 { n: u32, child: Box<PlanNode> },
}

impl PlanNode {
    pub fn v(&self) -> u32 {
        match self {
            PlanNode::Base { v, .. }
            | PlanNode::Search { v }
            | PlanNode::File { v, .. }
            | PlanNode::Double { v, .. } => *v,
            PlanNode::Theorem3 { n, .. } => 8 * n + 2,
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            PlanNode::Base { kind, .. } | PlanNode::File { kind, .. } | PlanNode::Double { kind, .. } => {
                *kind
            }
            PlanNode::Search { .. } | PlanNode::Theorem3 { .. } => Kind::Sqs,
        }
    }

    /// (SEARCH executions, sum of executed orders); THEOREM3 includes its SQS(10) search.
    pub fn cost(&self) -> (u64, u64) {
        match self {
            PlanNode::Base { v, .. } | PlanNode::File { v, .. } => (0, *v as u64),
            PlanNode::Search { v } => (1, *v as u64),
            PlanNode::Double { v, child, .. } => {
                let (s, o) = child.cost();
                (2 * s, 2 * o + *v as u64)
            }
            PlanNode::Theorem3 { child, .. } => {
                let (s, o) = child.cost();
                (4 * s + 1, 4 * o + 10 + self.v() as u64)
            }
        }
    }

    /// Orders appearing as SEARCH leaves, ascending and deduplicated.
    pub fn search_orders(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let PlanNode::Search { v } = n {
                out.push(*v);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    fn walk(&self, f: &mut impl FnMut(&PlanNode)) {
        f(self);
        match self {
            PlanNode::Double { child, .. } | PlanNode::Theorem3 { child, .. } => child.walk(f),
            _ => {}
        }
    }
}

/// A plan for one target order and kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationPlan {
    pub root: PlanNode,
}

impl DerivationPlan {
    pub fn v(&self) -> u32 {
        self.root.v()
    }

    pub fn kind(&self) -> Kind {
        self.root.kind()
    }

    /// True when the target itself comes from SEARCH rather than a construction rule.
    pub fn is_search_rooted(&self) -> bool {
        matches!(self.root, PlanNode::Search { .. })
    }
}

impl fmt::Display for DerivationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn node(n: &PlanNode, depth: usize, mult: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match n {
                PlanNode::Base { kind, v } => writeln!(f, "{pad}{mult}BASE {kind}({v})"),
                PlanNode::File { kind, v, path } => {
                    writeln!(f, "{pad}{mult}FILE {kind}({v}) {}", path.display())
                }
                PlanNode::Search { v } => {
                    let missing = missing_rules(*v, Kind::Sqs);
                    let note = if missing.is_empty() {
                        String::new()
                    } else {
                        format!("; outside rules: {}", missing.join(", "))
                    };
                    writeln!(f, "{pad}{mult}SEARCH sqs({v}) [search-only{note}]")
                }
                PlanNode::Double { kind, v, child } => {
                    writeln!(f, "{pad}{mult}DOUBLE {kind}({}) -> {kind}({v}) [Bbd m={} round-robin]", v / 2, v / 2)?;
                    node(child, depth + 1, "2x ", f)
                }
                PlanNode::Theorem3 { n, child } => {
                    writeln!(
                        f,
                        "{pad}{mult}THEOREM3 n={n} -> sqs({}) [6 MOLS of order {n}; 24 Bbd m={n}; SQS(8) base; SQS(10) by search]",
                        8 * n + 2
                    )?;
                    node(child, depth + 1, "4x ", f)
                }
            }
        }
        node(&self.root, 0, "", f)
    }
}

/// Planner knobs.
#[derive(Debug, Clone, Default)]
pub struct PlannerOptions {
    /// Largest SEARCH order; `None` means [`DEFAULT_SEARCH_CAP`].
    pub search_cap: Option<u32>,
    /// Designs available as FILE leaves, by kind and order.
    pub files: BTreeMap<(Kind, u32), PathBuf>,
}

impl PlannerOptions {
    fn cap(&self) -> u32 {
        self.search_cap.unwrap_or(DEFAULT_SEARCH_CAP)
    }
}

/// The out-of-scope injections that would produce `v`: "2n−2" from
/// S(3,{4,6},n) to S(3,{4,6},2n−2); "3n−2" from S(3,{4,6},n) to SQS(3n−2);
/// "6n−10" from SQS(n); "3n−4" from SQS(n) with `n ≡ 10 (mod 12)`.
pub fn missing_rules(v: u32, kind: Kind) -> Vec<String> {
    let mut out = Vec::new();
    let pre = |a: u32, b: u32| ((v + b) % a == 0).then_some((v + b) / a);
    match kind {
        Kind::S46 => {
            if pre(2, 2).is_some_and(|n| n >= 4 && is_admissible(n, Kind::S46)) {
                out.push("2n−2".to_string());
            }
        }
        _ => {
            if pre(3, 2).is_some_and(|n| n >= 4 && is_admissible(n, Kind::S46)) {
                out.push("3n−2".to_string());
            }
            if pre(6, 10).is_some_and(|n| n >= 4 && is_admissible(n, Kind::Sqs)) {
                out.push("6n−10".to_string());
            }
            if pre(3, 4).is_some_and(|n| n % 12 == 10) {
                out.push("3n−4".to_string());
            }
        }
    }
    out
}

fn is_base(kind: Kind, v: u32) -> bool {
    match kind {
        Kind::Sqs => matches!(v, 1 | 2 | 4 | 8),
        Kind::S46 => matches!(v, 2 | 4 | 6),
        Kind::Partial => false,
    }
}

struct Planner<'a> {
    opts: &'a PlannerOptions,
    allow_search: bool,
    memo: BTreeMap<(Kind, u32), Option<PlanNode>>,
}

impl Planner<'_> {
    fn best(&mut self, kind: Kind, v: u32) -> Option<PlanNode> {
        if let Some(hit) = self.memo.get(&(kind, v)) {
            return hit.clone();
        }
        let mut cands = Vec::new();
        if is_base(kind, v) {
            cands.push(PlanNode::Base { kind, v });
        }
        if let Some(path) = self.opts.files.get(&(kind, v)) {
            cands.push(PlanNode::File {
                kind,
                v,
                path: path.clone(),
            });
        }
        if self.allow_search && kind == Kind::Sqs && v <= self.opts.cap() && is_admissible(v, kind) {
            cands.push(PlanNode::Search { v });
        }
        let half = v / 2;
        if v % 2 == 0 && half % 2 == 0 && half >= 2 {
            if let Some(child) = self.best(kind, half) {
                cands.push(PlanNode::Double {
                    kind,
                    v,
                    child: Box::new(child),
                });
            }
        }
        if kind == Kind::Sqs && v >= 18 && v % 8 == 2 {
            let n = (v - 2) / 8;
            if n % 2 == 0 && is_admissible(2 * n + 2, Kind::Sqs) && mols_capacity(n) >= 6 {
                if let Some(child) = self.best(Kind::Sqs, 2 * n + 2) {
                    cands.push(PlanNode::Theorem3 {
                        n,
                        child: Box::new(child),
                    });
                }
            }
        }
        let pick = cands.into_iter().min_by_key(|c| c.cost());
        self.memo.insert((kind, v), pick.clone());
        pick
    }
}

/// Cheapest plan for `(v, kind)`.
pub fn plan(v: u32, kind: Kind, opts: &PlannerOptions) -> Result<DerivationPlan> {
    if kind == Kind::Partial || !is_admissible(v, kind) {
        return Err(Error::Inadmissible {
            v,
            kind: kind.to_string(),
        });
    }
    let mut p = Planner {
        opts,
        allow_search: true,
        memo: BTreeMap::new(),
    };
    match p.best(kind, v) {
        Some(root) => Ok(DerivationPlan { root }),
        None => Err(Error::Unreachable {
            v,
            missing: missing_rules(v, kind),
        }),
    }
}

/// Whether a plan exists; with `allow_search == false` only BASE, FILE and
/// the two construction rules count.
pub fn is_reachable(v: u32, kind: Kind, opts: &PlannerOptions, allow_search: bool) -> bool {
    if kind == Kind::Partial || !is_admissible(v, kind) {
        return false;
    }
    Planner {
        opts,
        allow_search,
        memo: BTreeMap::new(),
    }
    .best(kind, v)
    .is_some()
}

/// Execution knobs.
#[derive(Debug, Clone)]
pub struct ExecOptions {
    pub search_budget: u64,
    pub coverage: CoverageOptions,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            search_budget: DEFAULT_SEARCH_BUDGET,
            coverage: CoverageOptions::default(),
        }
    }
}

fn mix(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn checked(d: Design, what: impl FnOnce() -> String, opts: &ExecOptions) -> Result<Design> {
    let r = verify_design_with(&d, &opts.coverage)?;
    if r.is_exact() {
        Ok(d)
    } else {
        Err(Error::VerificationFailure(format!(
            "{}: {} uncovered, {} multiply covered",
            what(),
            r.uncovered,
            r.multi
        )))
    }
}

fn run(node: &PlanNode, seed: u64, opts: &ExecOptions) -> Result<Design> {
    match node {
        PlanNode::Base { kind, v } => {
            let d = match (kind, v) {
                (Kind::Sqs, 8) => boolean_sqs8(),
                (Kind::Sqs, 4) => Design::new(Kind::Sqs, 4, vec![vec![0, 1, 2, 3]])?,
                (Kind::Sqs, _) => Design::new(Kind::Sqs, *v, Vec::new())?,
                _ => s46_base(*v)?,
            };
            checked(d, || format!("BASE {kind}({v})"), opts)
        }
        PlanNode::Search { v } => search_small_sqs(*v, seed, opts.search_budget),
        PlanNode::File { kind, v, path } => {
            let d = load_design(path)?;
            if d.kind() != *kind || d.v() != *v {
                return Err(Error::VerificationFailure(format!(
                    "FILE {}: holds {}({}), expected {kind}({v})",
                    path.display(),
                    d.kind(),
                    d.v()
                )));
            }
            checked(d, || format!("FILE {}", path.display()), opts)
        }
        PlanNode::Double { child, .. } => {
            let a = run(child, mix(seed, 0), opts)?;
            let b = run(child, mix(seed, 1), opts)?;
            let m = a.v();
            let f = round_robin_one_factorization(m)?;
            let r = m as usize - 1;
            let shift = (mix(seed, 2) % r as u64) as usize;
            let pairing: Vec<usize> = (0..r).map(|i| (i + shift) % r).collect();
            let bbd = bbd_from_factorizations(&f, &f, &pairing)?;
            double(&a, &b, &bbd)
                .map_err(|e| Error::VerificationFailure(format!("DOUBLE to {}: {e}", 2 * m)))
        }
        PlanNode::Theorem3 { n, child } => {
            let ing = theorem3_ingredients(*n, mix(seed, 0))?;
            let ds = (0..4)
                .map(|i| run(child, mix(seed, 1 + i), opts))
                .collect::<Result<Vec<_>>>()?;
            let out = theorem3_assemble(
                *n,
                &ing.s8,
                &ing.s10.design,
                &ing.m,
                &ing.bbds,
                Some(&ds),
                &opts.coverage,
            )
            .map_err(|e| match e {
                Error::VerificationFailure(s) => {
                    Error::VerificationFailure(format!("THEOREM3 n={n}: {s}"))
                }
                e => e,
            })?;
            Ok(out.design)
        }
    }
}

/// Runs the plan bottom-up, verifying every intermediate design.
pub fn execute(plan: &DerivationPlan, seed: u64, opts: &ExecOptions) -> Result<Design> {
    run(&plan.root, seed, opts)
}

/// The `8n+2` assembly without its four SQS(2n+2) inputs: a partial design
/// whose four holes are left explicit. Uses the same ingredients, for the
/// same seed, as a THEOREM3 root in [`execute`].
pub fn execute_holes(v: u32, seed: u64, opts: &ExecOptions) -> Result<Theorem3Output> {
    if v < 18 || v % 8 != 2 || ((v - 2) / 8) % 2 != 0 {
        return Err(Error::PreconditionFailure(format!("{v} is not 8n+2 with n even and n ≥ 2")));
    }
    let n = (v - 2) / 8;
    let ing = theorem3_ingredients(n, mix(seed, 0))?;
    theorem3_assemble(n, &ing.s8, &ing.s10.design, &ing.m, &ing.bbds, None, &opts.coverage)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> PlannerOptions {
        PlannerOptions::default()
    }

    #[test]
    fn doubling_plans() {
        let p = plan(16, Kind::Sqs, &opts()).unwrap();
        assert!(matches!(&p.root, PlanNode::Double { child, .. } if **child == PlanNode::Base { kind: Kind::Sqs, v: 8 }));
        let p = plan(12, Kind::S46, &opts()).unwrap();
        assert_eq!(p.root.cost().0, 0);
    }

    #[test]
    fn search_rooted_and_theorem3() {
        let p = plan(14, Kind::Sqs, &opts()).unwrap();
        assert_eq!(p.root, PlanNode::Search { v: 14 });
        assert!(p.is_search_rooted());
        let p = plan(130, Kind::Sqs, &opts()).unwrap();
        assert!(matches!(&p.root, PlanNode::Theorem3 { n: 16, child } if **child == PlanNode::Search { v: 34 }));
        assert_eq!(p.root.search_orders(), vec![34]);
        assert!(!is_reachable(34, Kind::Sqs, &opts(), false));
    }

    #[test]
    fn missing_rule_lists() {
        assert_eq!(missing_rules(26, Kind::Sqs), vec!["3n−4"]);
        assert_eq!(missing_rules(34, Kind::Sqs), vec!["3n−2"]);
        assert_eq!(missing_rules(10, Kind::S46), vec!["2n−2"]);
        let e = plan(50, Kind::Sqs, &opts()).unwrap_err();
        assert!(matches!(e, Error::Unreachable { v: 50, .. }));
        assert!(matches!(plan(9, Kind::Sqs, &opts()), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn file_leaf_beats_search() {
        let mut o = opts();
        o.files.insert((Kind::Sqs, 14), PathBuf::from("s14.txt"));
        let p = plan(28, Kind::Sqs, &o).unwrap();
        assert_eq!(p.root.search_orders(), Vec::<u32>::new());
    }

    #[test]
    fn monotone_under_doubling() {
        let o = opts();
        for v in 1..=200 {
            for kind in [Kind::Sqs, Kind::S46] {
                for search in [false, true] {
                    if is_reachable(v, kind, &o, search) {
                        assert!(is_reachable(2 * v, kind, &o, search) || v % 2 == 1, "{kind} {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn executes() {
        let eo = ExecOptions::default();
        let d = execute(&plan(32, Kind::Sqs, &opts()).unwrap(), 0, &eo).unwrap();
        assert_eq!(d.len(), 1240);
        let d = execute(&plan(12, Kind::S46, &opts()).unwrap(), 0, &eo).unwrap();
        assert_eq!(d.kind(), Kind::S46);
        let d = execute(&plan(20, Kind::Sqs, &opts()).unwrap(), 3, &eo).unwrap();
        assert_eq!(d.len(), 285);
    }
}
