//! The label algebra for assuring successors.
//!
//! A label is a finite formula set attached to an ordered pair of worlds.
//! The defining check, relative to a formula pool, reads promises off the
//! lower world: `x` assures `y` under label `S` when every pool formula
//! `A` with `x ||- ~A |> \/~S_i` is realized as `A`, `[]A` at `y`. The
//! empty disjunction is `false`, so the empty label is the plain
//! successor check. Enlarging the disjunct is truth-preserving, so
//! checking the full label subsumes all finite sublabels.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{print, AdequateSet, Formula};
use crate::model::{bits, Counterexample, OrdinaryModel, Principle};

pub type Label = BTreeSet<Formula>;

pub fn label_of(formulas: &[Formula]) -> Label {
    formulas.iter().cloned().collect()
}

/// `\/ ~s` over the label in its set order; the empty disjunction is `false`.
pub fn disjoin_negations(label: &Label) -> Formula {
    let mut negs: Vec<Formula> = label.iter().map(|s| s.negate()).collect();
    match negs.pop() {
        None => Formula::Bot,
        Some(last) => negs
            .into_iter()
            .rev()
            .fold(last, |acc, n| Formula::or(n, acc)),
    }
}

/// The probe formula `~A |> \/~s` for a pool formula `A`.
pub fn assuring_probe(a: &Formula, label: &Label) -> Formula {
    Formula::rhd(a.negate(), disjoin_negations(label))
}

/// Pool formula witnessing that `x` does not assure `y` under `label`,
/// or `None` when the assuring check holds.
pub fn assuring_failure(
    m: &OrdinaryModel,
    x: usize,
    y: usize,
    label: &Label,
    pool: &[Formula],
) -> Option<Formula> {
    if !m.r_contains(x, y) {
        return Some(Formula::Bot);
    }
    for a in pool {
        if m.force(x, &assuring_probe(a, label))
            && !(m.force(y, a) && m.force(y, &Formula::boxed(a.clone())))
        {
            return Some(a.clone());
        }
    }
    None
}

/// True iff `y` is an S-assuring successor of `x` relative to the pool.
pub fn semantic_assuring(
    m: &OrdinaryModel,
    x: usize,
    y: usize,
    label: &Label,
    pool: &[Formula],
) -> bool {
    assuring_failure(m, x, y, label, pool).is_none()
}

/// Promises the world `x` makes relative to `label`: all pool formulas
/// `A` (with their boxes) such that `x ||- ~A |> \/~label`.
pub fn boxdotset(m: &OrdinaryModel, x: usize, label: &Label, pool: &[Formula]) -> Label {
    let mut out = Label::new();
    for a in pool {
        if m.force(x, &assuring_probe(a, label)) {
            out.insert(a.clone());
            out.insert(Formula::boxed(a.clone()));
        }
    }
    out
}

/// Box parts only: `{ []A : x ||- ~A |> \/~label, A in pool }`.
pub fn boxset(m: &OrdinaryModel, x: usize, label: &Label, pool: &[Formula]) -> Label {
    let mut out = Label::new();
    for a in pool {
        if m.force(x, &assuring_probe(a, label)) {
            out.insert(Formula::boxed(a.clone()));
        }
    }
    out
}

/// `{ []s : s in label }`.
pub fn box_lift(label: &Label) -> Label {
    label.iter().map(|s| Formula::boxed(s.clone())).collect()
}

pub fn union(a: &Label, b: &Label) -> Label {
    a.union(b).cloned().collect()
}

// ---------------------------------------------------------------------------
// Provability oracles and full-label closure
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle budget exhausted: {0}")]
    Budget(String),
}

/// Decides whether the goal follows from the assumption set in the ambient
/// logic. Backed by bounded semantics in this crate; answers may be
/// qualified by a search bound.
pub trait ProvabilityOracle {
    fn proves(&mut self, assumptions: &[Formula], goal: &Formula) -> Result<bool, OracleError>;
}

/// Least fixpoint, inside the adequate set, of the label-extension rules
/// for a label `S` at a maximal set `gamma`:
/// promises (`gamma` proves `~A |> \/~S_i` puts `A` and `[]A` in),
/// consequences (anything in the adequate set the label proves), and
/// necessitation. Monotone, extensive and idempotent.
pub fn full_closure_phi(
    label: &Label,
    gamma: &[Formula],
    phi: &AdequateSet,
    oracle: &mut dyn ProvabilityOracle,
) -> Result<Label, OracleError> {
    let mut current: Label = label.iter().filter(|f| phi.contains(f)).cloned().collect();
    loop {
        let mut grew = false;
        // promises read off gamma
        for f in phi.formulas() {
            let boxed = Formula::boxed(f.clone());
            let have_f = current.contains(f);
            let have_box = !phi.contains(&boxed) || current.contains(&boxed);
            if have_f && have_box {
                continue;
            }
            if oracle.proves(gamma, &assuring_probe(f, &current))? {
                if current.insert(f.clone()) {
                    grew = true;
                }
                if phi.contains(&boxed) && current.insert(boxed) {
                    grew = true;
                }
            }
        }
        // consequences within the adequate set
        let assumptions: Vec<Formula> = current.iter().cloned().collect();
        for f in phi.formulas() {
            if !current.contains(f) && oracle.proves(&assumptions, f)? {
                current.insert(f.clone());
                grew = true;
            }
        }
        // necessitation within the adequate set
        let snapshot: Vec<Formula> = current.iter().cloned().collect();
        for f in &snapshot {
            let boxed = Formula::boxed(f.clone());
            if phi.contains(&boxed) && current.insert(boxed) {
                grew = true;
            }
        }
        if !grew {
            return Ok(current);
        }
    }
}

// ---------------------------------------------------------------------------
// Q-label sequences
// ---------------------------------------------------------------------------

/// Iterated labels along a descending chain `w_n, ..., w_0` with base
/// labels `S_n, ..., S_1` and pivot `B`:
/// `Q_1 = S_1 + {[]~B}`, `Q_{j+1} = S_{j+1} + {[]~B} + boxdot of w_j
/// relative to Q_j`.
#[derive(Debug, Clone)]
pub struct QLabelSequence {
    /// Chain worlds, descending: `w_n, ..., w_0`.
    pub chain: Vec<usize>,
    /// Base labels, descending: `S_n, ..., S_1`.
    pub base_labels: Vec<Label>,
    pub pivot: Formula,
    /// Computed labels, ascending: `Q_1, ..., Q_n`.
    pub q: Vec<Label>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QLabelError {
    #[error("chain of {chain} worlds needs exactly {chain} - 1 base labels, got {labels}")]
    LengthMismatch { chain: usize, labels: usize },
}

pub fn q_labels(
    m: &OrdinaryModel,
    chain: &[usize],
    base_labels: &[Label],
    pivot: &Formula,
    pool: &[Formula],
) -> Result<QLabelSequence, QLabelError> {
    let n = base_labels.len();
    if chain.len() != n + 1 || n == 0 {
        return Err(QLabelError::LengthMismatch {
            chain: chain.len(),
            labels: n,
        });
    }
    let box_not_pivot = Formula::boxed(pivot.negate());
    // base_labels[i] = S_{n-i}, chain[i] = w_{n-i}
    let s = |j: usize| &base_labels[n - j];
    let w = |j: usize| chain[n - j];
    let mut q: Vec<Label> = Vec::with_capacity(n);
    let mut q1 = s(1).clone();
    q1.insert(box_not_pivot.clone());
    q.push(q1);
    for j in 1..n {
        let mut next = s(j + 1).clone();
        next.insert(box_not_pivot.clone());
        next.extend(boxdotset(m, w(j), &q[j - 1], pool));
        q.push(next);
    }
    Ok(QLabelSequence {
        chain: chain.to_vec(),
        base_labels: base_labels.to_vec(),
        pivot: pivot.clone(),
        q,
    })
}

/// The same label computed from the fully unfolded nested expression,
/// used to cross-check the iterative route.
pub fn q_label_unfolded(
    m: &OrdinaryModel,
    chain: &[usize],
    base_labels: &[Label],
    pivot: &Formula,
    pool: &[Formula],
    j: usize,
) -> Label {
    let n = base_labels.len();
    assert!(j >= 1 && j <= n && chain.len() == n + 1);
    let box_not_pivot = Formula::boxed(pivot.negate());
    let s = |k: usize| &base_labels[n - k];
    let w = |k: usize| chain[n - k];
    let mut out = s(j).clone();
    out.insert(box_not_pivot.clone());
    if j > 1 {
        let inner = q_label_unfolded(m, chain, base_labels, pivot, pool, j - 1);
        out.extend(boxdotset(m, w(j - 1), &inner, pool));
    }
    out
}

// ---------------------------------------------------------------------------
// Labelling-lemma harness
// ---------------------------------------------------------------------------

/// Label propagation laws checked by the harness. The plain variants make
/// the accrued promise explicit; the `full` variants use the simpler
/// composed label available under the respective principle; `RTrans`
/// checks the box-set inclusion that collapses chain labelling to triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPrinciple {
    P,
    PFull,
    M,
    M0,
    R,
    RFull,
    RTrans,
}

impl LabelPrinciple {
    pub const ALL: [LabelPrinciple; 7] = [
        LabelPrinciple::P,
        LabelPrinciple::PFull,
        LabelPrinciple::M,
        LabelPrinciple::M0,
        LabelPrinciple::R,
        LabelPrinciple::RFull,
        LabelPrinciple::RTrans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LabelPrinciple::P => "P",
            LabelPrinciple::PFull => "Pfull",
            LabelPrinciple::M => "M",
            LabelPrinciple::M0 => "M0",
            LabelPrinciple::R => "R",
            LabelPrinciple::RFull => "Rfull",
            LabelPrinciple::RTrans => "RTrans",
        }
    }

    /// Frame condition the model must satisfy before the harness runs.
    pub fn frame_condition(self) -> Principle {
        match self {
            LabelPrinciple::P | LabelPrinciple::PFull => Principle::P,
            LabelPrinciple::M => Principle::M,
            LabelPrinciple::M0 => Principle::M0,
            LabelPrinciple::R | LabelPrinciple::RFull | LabelPrinciple::RTrans => Principle::R,
        }
    }
}

impl std::str::FromStr for LabelPrinciple {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" => Ok(LabelPrinciple::P),
            "Pfull" => Ok(LabelPrinciple::PFull),
            "M" => Ok(LabelPrinciple::M),
            "M0" => Ok(LabelPrinciple::M0),
            "R" => Ok(LabelPrinciple::R),
            "Rfull" => Ok(LabelPrinciple::RFull),
            "RTrans" => Ok(LabelPrinciple::RTrans),
            other => Err(format!("unknown labelling principle `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessViolation {
    pub chain: Vec<String>,
    pub labels: Vec<Vec<String>>,
    pub failing: String,
}

impl fmt::Display for HarnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "chain ({}) labels {:?} fails at {}",
            self.chain.join(", "),
            self.labels,
            self.failing
        )
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("frame does not satisfy condition {0}")]
    Precondition(Counterexample),
}

/// Run `trials` sampled instances of the labelling law on a model whose
/// frame satisfies the matching condition, returning every violation. On
/// condition-satisfying frames the expected result is empty.
pub fn harness_labelling(
    principle: LabelPrinciple,
    m: &OrdinaryModel,
    pool: &[Formula],
    trials: usize,
    rng: &mut impl rand::Rng,
) -> Result<Vec<HarnessViolation>, HarnessError> {
    m.check_condition(principle.frame_condition())
        .map_err(HarnessError::Precondition)?;
    Ok(harness_labelling_unchecked(principle, m, pool, trials, rng))
}

/// The harness body without the frame-condition precondition; negative
/// controls feed deliberately violating frames through this entry.
pub fn harness_labelling_unchecked(
    principle: LabelPrinciple,
    m: &OrdinaryModel,
    pool: &[Formula],
    trials: usize,
    rng: &mut impl rand::Rng,
) -> Vec<HarnessViolation> {
    let mut violations = Vec::new();
    let n = m.n_worlds();
    for _ in 0..trials {
        let x = rng.random_range(0..n);
        let succ: Vec<usize> = bits(m.r_mask(x)).collect();
        if succ.is_empty() {
            continue;
        }
        let y = succ[rng.random_range(0..succ.len())];
        let s = sample_label(m, y, pool, rng);
        if !semantic_assuring(m, x, y, &s, pool) {
            continue;
        }
        match principle {
            LabelPrinciple::M => {
                let extended = union(&s, &boxset(m, y, &Label::new(), pool));
                if let Some(a) = assuring_failure(m, x, y, &extended, pool) {
                    violations.push(violation(m, &[x, y], &[&s], &a));
                }
            }
            LabelPrinciple::M0 => {
                let next: Vec<usize> = bits(m.r_mask(y)).collect();
                if next.is_empty() {
                    continue;
                }
                let z = next[rng.random_range(0..next.len())];
                let extended = union(&s, &boxset(m, y, &Label::new(), pool));
                if let Some(a) = assuring_failure(m, x, z, &extended, pool) {
                    violations.push(violation(m, &[x, y, z], &[&s], &a));
                }
            }
            LabelPrinciple::P | LabelPrinciple::PFull | LabelPrinciple::R
            | LabelPrinciple::RFull => {
                let next: Vec<usize> = bits(m.r_mask(y)).collect();
                if next.is_empty() {
                    continue;
                }
                let z = next[rng.random_range(0..next.len())];
                let t = sample_label(m, z, pool, rng);
                if !semantic_assuring(m, y, z, &t, pool) {
                    continue;
                }
                let extended = match principle {
                    LabelPrinciple::P => union(&s, &boxdotset(m, y, &t, pool)),
                    LabelPrinciple::PFull => t.clone(),
                    LabelPrinciple::R => union(&s, &boxset(m, y, &t, pool)),
                    _ => union(&s, &box_lift(&t)),
                };
                if let Some(a) = assuring_failure(m, x, z, &extended, pool) {
                    violations.push(violation(m, &[x, y, z], &[&s, &t], &a));
                }
            }
            LabelPrinciple::RTrans => {
                let t = sample_label(m, y, pool, rng);
                let inner = boxset(m, y, &t, pool);
                let outer = boxset(m, x, &union(&s, &inner), pool);
                if let Some(extra) = outer.difference(&inner).next() {
                    violations.push(violation(m, &[x, y], &[&s, &t], extra));
                }
            }
        }
    }
    violations
}

fn violation(m: &OrdinaryModel, chain: &[usize], labels: &[&Label], failing: &Formula) -> HarnessViolation {
    HarnessViolation {
        chain: chain.iter().map(|&w| m.world_name(w).to_string()).collect(),
        labels: labels
            .iter()
            .map(|l| l.iter().map(print).collect())
            .collect(),
        failing: print(failing),
    }
}

/// Sample a small label that has a chance of being assured at `y`:
/// subsets of the pool formulas realized as `A`, `[]A` there.
fn sample_label(
    m: &OrdinaryModel,
    y: usize,
    pool: &[Formula],
    rng: &mut impl rand::Rng,
) -> Label {
    let candidates: Vec<&Formula> = pool
        .iter()
        .filter(|a| m.force(y, a) && m.force(y, &Formula::boxed((*a).clone())))
        .collect();
    let mut out = Label::new();
    if candidates.is_empty() {
        return out;
    }
    for _ in 0..rng.random_range(0..=2usize) {
        out.insert(candidates[rng.random_range(0..candidates.len())].clone());
    }
    out
}

// ---------------------------------------------------------------------------
// Existence-lemma witnesses
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("hypothesis does not hold: {0}")]
    HypothesisAbsent(String),
}

/// Witness search backing the refutation case: given `x` forcing
/// `~(A |> B)`, find `y` above `x` forcing `A` that `x` assures under
/// `{[]~A, ~B}`. On frames with the composed-relation condition for W a
/// witness always exists.
pub fn witness_w_probs(
    m: &OrdinaryModel,
    x: usize,
    a: &Formula,
    b: &Formula,
    pool: &[Formula],
) -> Result<Option<usize>, WitnessError> {
    let hyp = Formula::rhd(a.clone(), b.clone());
    if m.force(x, &hyp) {
        return Err(WitnessError::HypothesisAbsent(format!(
            "~({}) not forced at {}",
            print(&hyp),
            m.world_name(x)
        )));
    }
    let label = label_of(&[Formula::boxed(a.negate()), b.negate()]);
    for y in bits(m.r_mask(x)) {
        if m.force(y, a) && semantic_assuring(m, x, y, &label, pool) {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// Witness search backing the realization case: given `B |> C` at `x`,
/// an assured successor `y` forcing `B`, find `z` forcing `C` and `[]~C`
/// assured under the label extended with `[]~B`.
pub fn witness_w_defies(
    m: &OrdinaryModel,
    x: usize,
    y: usize,
    b: &Formula,
    c: &Formula,
    label: &Label,
    pool: &[Formula],
) -> Result<Option<usize>, WitnessError> {
    let hyp = Formula::rhd(b.clone(), c.clone());
    if !m.force(x, &hyp) {
        return Err(WitnessError::HypothesisAbsent(format!(
            "{} not forced at {}",
            print(&hyp),
            m.world_name(x)
        )));
    }
    if !m.force(y, b) {
        return Err(WitnessError::HypothesisAbsent(format!(
            "{} not forced at {}",
            print(b),
            m.world_name(y)
        )));
    }
    if !semantic_assuring(m, x, y, label, pool) {
        return Err(WitnessError::HypothesisAbsent(format!(
            "{} does not assure {} under the label",
            m.world_name(x),
            m.world_name(y)
        )));
    }
    let mut extended = label.clone();
    extended.insert(Formula::boxed(b.negate()));
    for z in bits(m.r_mask(x)) {
        if m.force(z, c)
            && m.force(z, &Formula::boxed(c.negate()))
            && semantic_assuring(m, x, z, &extended, pool)
        {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{adequate_set, parse};
    use crate::gen::{random_model, seeded_rng};
    use crate::model::fixtures::{box_vs_assuringness_model, incomparable_labels_model};
    use rand::Rng;
    use std::collections::BTreeMap;

    fn pool_pq() -> Vec<Formula> {
        ["p", "q", "~p", "~q", "false", "true"]
            .iter()
            .map(|t| parse(t).unwrap())
            .collect()
    }

    #[test]
    fn empty_disjunction_is_bot() {
        assert_eq!(disjoin_negations(&Label::new()), Formula::Bot);
    }

    #[test]
    fn empty_label_reduces_to_successor_check() {
        // x assures y under the empty label iff all boxed pool promises
        // of x are realized at y.
        let m = box_vs_assuringness_model();
        let (x, y, z) = (0, 1, 2);
        let pool = pool_pq();
        assert!(semantic_assuring(&m, x, y, &Label::new(), &pool));
        assert!(semantic_assuring(&m, x, z, &Label::new(), &pool));
    }

    #[test]
    fn box_vs_assuringness_label_p_fails() {
        // x assures y under {}, but not under {p}, although y forces p
        // and []p: the probe ~~q |> ~p is forced at x via z.
        let m = box_vs_assuringness_model();
        let pool = pool_pq();
        assert!(semantic_assuring(&m, 0, 1, &Label::new(), &pool));
        assert!(m.force(1, &parse("p & []p").unwrap()));
        let with_p = label_of(&[parse("p").unwrap()]);
        assert!(!semantic_assuring(&m, 0, 1, &with_p, &pool));
        let failing = assuring_failure(&m, 0, 1, &with_p, &pool).unwrap();
        assert!(failing == parse("~p").unwrap() || failing == parse("~q").unwrap());
    }

    #[test]
    fn nonmaximal_full_label_model() {
        // x with children y (p, q) and y': only y realizes the label {p, q};
        // both realize {p}.
        let m = OrdinaryModel::new(
            vec!["x".into(), "y".into(), "yp".into()],
            &[(0, 1), (0, 2)],
            &[(0, 1, 1), (0, 2, 2)],
            [("p".to_string(), vec![1, 2]), ("q".to_string(), vec![1])]
                .into_iter()
                .collect(),
        )
        .unwrap();
        m.validate().unwrap();
        let pool = pool_pq();
        let pq = label_of(&[parse("p").unwrap(), parse("q").unwrap()]);
        let p = label_of(&[parse("p").unwrap()]);
        assert!(semantic_assuring(&m, 0, 1, &pq, &pool));
        assert!(!semantic_assuring(&m, 0, 2, &pq, &pool));
        assert!(semantic_assuring(&m, 0, 2, &p, &pool));
    }

    #[test]
    fn boxdotset_examples() {
        // terminal successor u forcing p: the empty-label boxdot of w is
        // everything w boxes, i.e. p (and true-like members).
        let m = OrdinaryModel::new(
            vec!["w".into(), "u".into()],
            &[(0, 1)],
            &[(0, 1, 1)],
            [("p".to_string(), vec![1])].into_iter().collect(),
        )
        .unwrap();
        let pool = vec![parse("p").unwrap()];
        let set = boxdotset(&m, 0, &Label::new(), &pool);
        assert_eq!(
            set,
            label_of(&[parse("p").unwrap(), parse("[]p").unwrap()])
        );
        assert!(boxdotset(&m, 0, &Label::new(), &[]).is_empty());
        // empty-label boxset equals the boxed formulas forced at the world
        let bs = boxset(&m, 0, &Label::new(), &pool);
        assert_eq!(bs, label_of(&[parse("[]p").unwrap()]));
        assert!(m.force(0, &parse("[]p").unwrap()));
    }

    #[test]
    fn weakening_and_r_persistence() {
        // S ⊆ T assured implies S assured; assured then R-step stays assured.
        let mut rng = seeded_rng(21);
        let pool = pool_pq();
        for _ in 0..60 {
            let m = random_model(&mut rng, 5, &["p", "q"], None);
            for x in 0..m.n_worlds() {
                for y in bits(m.r_mask(x)) {
                    let t = boxdotset(&m, x, &Label::new(), &pool);
                    if semantic_assuring(&m, x, y, &t, &pool) {
                        for s in [Label::new(), label_of(&[parse("p").unwrap()])] {
                            if s.is_subset(&t) {
                                assert!(semantic_assuring(&m, x, y, &s, &pool));
                            }
                        }
                        for z in bits(m.r_mask(y)) {
                            assert!(
                                semantic_assuring(&m, x, z, &t, &pool),
                                "assuring lost along R"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn assuring_assures_and_free_extension() {
        let mut rng = seeded_rng(22);
        let pool = pool_pq();
        for _ in 0..60 {
            let m = random_model(&mut rng, 5, &["p", "q"], None);
            for x in 0..m.n_worlds() {
                for y in bits(m.r_mask(x)) {
                    for s in [
                        Label::new(),
                        label_of(&[parse("p").unwrap()]),
                        label_of(&[parse("q").unwrap(), parse("p").unwrap()]),
                    ] {
                        if !semantic_assuring(&m, x, y, &s, &pool) {
                            continue;
                        }
                        // realized labels: S and []S at y, <>s at x
                        for f in &s {
                            assert!(m.force(y, f));
                            assert!(m.force(y, &Formula::boxed(f.clone())));
                            assert!(m.force(x, &Formula::dia(f.clone())));
                        }
                        // free extension by x's own promises
                        let extended = union(&s, &boxdotset(&m, x, &s, &pool));
                        assert!(
                            semantic_assuring(&m, x, y, &extended, &pool),
                            "free extension failed"
                        );
                    }
                }
            }
        }
    }

    // A membership-backed oracle for closure unit tests: proves a goal iff
    // it is assumed outright or follows propositionally from assumptions.
    struct PropOracle;

    impl ProvabilityOracle for PropOracle {
        fn proves(&mut self, assumptions: &[Formula], goal: &Formula) -> Result<bool, OracleError> {
            let mut f = goal.clone();
            for a in assumptions.iter().rev() {
                f = Formula::imp(a.clone(), f);
            }
            crate::proofcheck::is_tautology(&f)
                .map_err(|n| OracleError::Budget(format!("{n} atoms")))
        }
    }

    #[test]
    fn closure_is_extensive_idempotent_and_necessitated() {
        let phi = adequate_set(&parse("p |> q").unwrap());
        let gamma: Vec<Formula> = vec![parse("p |> q").unwrap(), parse("[]~p").unwrap()];
        let s = label_of(&[parse("~q").unwrap()]);
        let mut oracle = PropOracle;
        let closed = full_closure_phi(&s, &gamma, &phi, &mut oracle).unwrap();
        assert!(s.is_subset(&closed), "extensive");
        let twice = full_closure_phi(&closed, &gamma, &phi, &mut oracle).unwrap();
        assert_eq!(closed, twice, "idempotent");
        for f in &closed {
            let boxed = Formula::boxed(f.clone());
            if phi.contains(&boxed) {
                assert!(closed.contains(&boxed), "necessitation inside the universe");
            }
        }
    }

    #[test]
    fn q_labels_base_case_and_step() {
        let m = incomparable_labels_model();
        let pool = pool_pq();
        let b = parse("q").unwrap();
        let s1 = label_of(&[parse("p").unwrap()]);
        // n = 1
        let seq = q_labels(&m, &[0, 1], &[s1.clone()], &b, &pool).unwrap();
        let mut expect = s1.clone();
        expect.insert(parse("[]~q").unwrap());
        assert_eq!(seq.q, vec![expect]);
        // n = 2: Q_2 = S_2 + {[]~B} + boxdot of w_1 at Q_1
        let s2 = Label::new();
        let seq = q_labels(&m, &[0, 1, 2], &[s2.clone(), s1.clone()], &b, &pool).unwrap();
        let mut q2 = s2.clone();
        q2.insert(parse("[]~q").unwrap());
        q2.extend(boxdotset(&m, 1, &seq.q[0], &pool));
        assert_eq!(seq.q[1], q2);
        // pivot box present in every level
        for q in &seq.q {
            assert!(q.contains(&parse("[]~q").unwrap()));
        }
    }

    #[test]
    fn q_labels_length_mismatch() {
        let m = incomparable_labels_model();
        let err = q_labels(&m, &[0, 1], &[], &parse("q").unwrap(), &pool_pq()).unwrap_err();
        assert_eq!(
            err,
            QLabelError::LengthMismatch {
                chain: 2,
                labels: 0
            }
        );
    }

    #[test]
    fn q_labels_match_unfolded_on_random_chains() {
        let mut rng = seeded_rng(23);
        let pool = pool_pq();
        for _ in 0..40 {
            let len = rng.random_range(2..=6);
            let (m, chain) = crate::gen::random_chain_model(&mut rng, len, 1, &["p", "q"], None);
            let n = chain.len() - 1;
            let labels: Vec<Label> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        label_of(&[parse("p").unwrap()])
                    } else {
                        Label::new()
                    }
                })
                .collect();
            let b = parse("q").unwrap();
            let seq = q_labels(&m, &chain, &labels, &b, &pool).unwrap();
            for j in 1..=n {
                assert_eq!(
                    seq.q[j - 1],
                    q_label_unfolded(&m, &chain, &labels, &b, &pool, j),
                    "level {j} differs"
                );
            }
        }
    }

    #[test]
    fn harness_trivial_labels_never_violate() {
        // With S = T = {} the laws reduce to transitivity-style facts.
        let mut rng = seeded_rng(24);
        for principle in LabelPrinciple::ALL {
            let m = random_model(
                &mut rng,
                5,
                &["p", "q"],
                Some(principle.frame_condition()),
            );
            let violations =
                harness_labelling(principle, &m, &[], 50, &mut rng).unwrap();
            assert!(violations.is_empty(), "{:?}: {:?}", principle, violations);
        }
    }

    #[test]
    fn harness_precondition_enforced() {
        // A frame that breaks P must be rejected up front.
        let m = OrdinaryModel::new(
            vec!["w".into(), "wp".into(), "u".into(), "v".into()],
            &[(0, 1), (1, 2), (0, 2), (0, 3)],
            &[
                (0, 1, 1),
                (0, 2, 2),
                (0, 3, 3),
                (0, 1, 2),
                (0, 2, 3),
                (0, 1, 3),
                (1, 2, 2),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let mut rng = seeded_rng(25);
        assert!(matches!(
            harness_labelling(LabelPrinciple::P, &m, &pool_pq(), 10, &mut rng),
            Err(HarnessError::Precondition(_))
        ));
    }

    #[test]
    fn witness_probs_on_fixture() {
        let m = incomparable_labels_model();
        let pool = pool_pq();
        let r = parse("r").unwrap();
        let not_p = parse("~p").unwrap();
        // w does not force r |> ~p, witness must exist
        let y = witness_w_probs(&m, 0, &r, &not_p, &pool).unwrap();
        assert!(y.is_some());
        let y = y.unwrap();
        assert!(m.force(y, &r));
        // hypothesis absent: w forces r |> (~p | ~q)
        let or = parse("~p | ~q").unwrap();
        assert!(matches!(
            witness_w_probs(&m, 0, &r, &or, &pool),
            Err(WitnessError::HypothesisAbsent(_))
        ));
    }

    #[test]
    fn witness_defies_on_fixture() {
        let m = incomparable_labels_model();
        let pool = pool_pq();
        // w forces r |> (~p | ~q); u1 forces r and is assured under {}
        let b = parse("r").unwrap();
        let c = parse("~p | ~q").unwrap();
        let z = witness_w_defies(&m, 0, 1, &b, &c, &Label::new(), &pool).unwrap();
        assert!(z.is_some());
        let z = z.unwrap();
        assert!(m.force(z, &c));
        assert!(m.force(z, &Formula::boxed(c.negate())));
    }
}
