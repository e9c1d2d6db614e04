//! Axiom-schema matcher and Hilbert-style proof checker for IL and its
//! extensions by the principles W, M, P, M0 and R.
//!
//! Schemas are matched purely syntactically on the desugared core language;
//! metavariables bind whole formulas. `Taut` is decided by a truth table
//! after treating maximal `[]`/`|>` subformulas as atoms.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{parse, Formula, ParseError};

pub const MAX_TAUT_ATOMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaName {
    Taut,
    K,
    L,
    J1,
    J2,
    J3,
    J4,
    J5,
    W,
    M,
    P,
    M0,
    R,
}

impl SchemaName {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemaName::Taut => "Taut",
            SchemaName::K => "K",
            SchemaName::L => "L",
            SchemaName::J1 => "J1",
            SchemaName::J2 => "J2",
            SchemaName::J3 => "J3",
            SchemaName::J4 => "J4",
            SchemaName::J5 => "J5",
            SchemaName::W => "W",
            SchemaName::M => "M",
            SchemaName::P => "P",
            SchemaName::M0 => "M0",
            SchemaName::R => "R",
        }
    }
}

impl std::str::FromStr for SchemaName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Taut" => Ok(SchemaName::Taut),
            "K" => Ok(SchemaName::K),
            "L" => Ok(SchemaName::L),
            "J1" => Ok(SchemaName::J1),
            "J2" => Ok(SchemaName::J2),
            "J3" => Ok(SchemaName::J3),
            "J4" => Ok(SchemaName::J4),
            "J5" => Ok(SchemaName::J5),
            "W" => Ok(SchemaName::W),
            "M" => Ok(SchemaName::M),
            "P" => Ok(SchemaName::P),
            "M0" => Ok(SchemaName::M0),
            "R" => Ok(SchemaName::R),
            other => Err(format!("unknown schema `{other}`")),
        }
    }
}

/// Formula template with metavariables. Metavariables bind whole formulas;
/// equal metavariables must bind equal formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Meta(char),
    Bot,
    Implies(Box<Pattern>, Box<Pattern>),
    Box_(Box<Pattern>),
    Rhd(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    fn meta(c: char) -> Pattern {
        Pattern::Meta(c)
    }

    fn imp(a: Pattern, b: Pattern) -> Pattern {
        Pattern::Implies(Box::new(a), Box::new(b))
    }

    fn boxed(a: Pattern) -> Pattern {
        Pattern::Box_(Box::new(a))
    }

    fn rhd(a: Pattern, b: Pattern) -> Pattern {
        Pattern::Rhd(Box::new(a), Box::new(b))
    }

    fn not(a: Pattern) -> Pattern {
        Pattern::imp(a, Pattern::Bot)
    }

    fn and(a: Pattern, b: Pattern) -> Pattern {
        Pattern::not(Pattern::imp(a, Pattern::not(b)))
    }

    fn or(a: Pattern, b: Pattern) -> Pattern {
        Pattern::imp(Pattern::not(a), b)
    }

    fn dia(a: Pattern) -> Pattern {
        Pattern::not(Pattern::boxed(Pattern::not(a)))
    }
}

/// Template of a schema. `Taut` has no template, it is decided semantically.
pub fn template(name: SchemaName) -> Option<Pattern> {
    use Pattern as P;
    let a = || P::meta('A');
    let b = || P::meta('B');
    let c = || P::meta('C');
    let t = match name {
        SchemaName::Taut => return None,
        SchemaName::K => P::imp(
            P::boxed(P::imp(a(), b())),
            P::imp(P::boxed(a()), P::boxed(b())),
        ),
        SchemaName::L => P::imp(P::boxed(P::imp(P::boxed(a()), a())), P::boxed(a())),
        SchemaName::J1 => P::imp(P::boxed(P::imp(a(), b())), P::rhd(a(), b())),
        SchemaName::J2 => P::imp(
            P::and(P::rhd(a(), b()), P::rhd(b(), c())),
            P::rhd(a(), c()),
        ),
        SchemaName::J3 => P::imp(
            P::and(P::rhd(a(), c()), P::rhd(b(), c())),
            P::rhd(P::or(a(), b()), c()),
        ),
        SchemaName::J4 => P::imp(P::rhd(a(), b()), P::imp(P::dia(a()), P::dia(b()))),
        SchemaName::J5 => P::rhd(P::dia(a()), a()),
        SchemaName::W => P::imp(
            P::rhd(a(), b()),
            P::rhd(a(), P::and(b(), P::boxed(P::not(a())))),
        ),
        SchemaName::M => P::imp(
            P::rhd(a(), b()),
            P::rhd(P::and(a(), P::boxed(c())), P::and(b(), P::boxed(c()))),
        ),
        SchemaName::P => P::imp(P::rhd(a(), b()), P::boxed(P::rhd(a(), b()))),
        SchemaName::M0 => P::imp(
            P::rhd(a(), b()),
            P::rhd(
                P::and(P::dia(a()), P::boxed(c())),
                P::and(b(), P::boxed(c())),
            ),
        ),
        SchemaName::R => P::imp(
            P::rhd(a(), b()),
            P::rhd(
                P::not(P::rhd(a(), P::not(c()))),
                P::and(b(), P::boxed(c())),
            ),
        ),
    };
    Some(t)
}

pub type Substitution = BTreeMap<char, Formula>;

/// Match `f` against the schema. Returns a substitution on success. For
/// `Taut` the substitution is empty and matching is a tautology check over
/// at most `MAX_TAUT_ATOMS` atoms.
pub fn match_schema(f: &Formula, name: SchemaName) -> Result<Option<Substitution>, ProofError> {
    match template(name) {
        Some(pat) => {
            let mut subst = Substitution::new();
            if match_pattern(&pat, f, &mut subst) {
                Ok(Some(subst))
            } else {
                Ok(None)
            }
        }
        None => {
            if is_tautology(f).map_err(|_| ProofError {
                step: 0,
                reason: Reason::TooManyAtoms,
            })? {
                Ok(Some(Substitution::new()))
            } else {
                Ok(None)
            }
        }
    }
}

fn match_pattern(pat: &Pattern, f: &Formula, subst: &mut Substitution) -> bool {
    match (pat, f) {
        (Pattern::Meta(c), _) => match subst.get(c) {
            Some(bound) => bound == f,
            None => {
                subst.insert(*c, f.clone());
                true
            }
        },
        (Pattern::Bot, Formula::Bot) => true,
        (Pattern::Implies(p1, p2), Formula::Implies(f1, f2)) => {
            match_pattern(p1, f1, subst) && match_pattern(p2, f2, subst)
        }
        (Pattern::Box_(p), Formula::Box_(g)) => match_pattern(p, g, subst),
        (Pattern::Rhd(p1, p2), Formula::Rhd(f1, f2)) => {
            match_pattern(p1, f1, subst) && match_pattern(p2, f2, subst)
        }
        _ => false,
    }
}

/// Propositional tautology check: maximal `[]`/`|>` subformulas and
/// variables become atoms, then a truth-table sweep.
pub fn is_tautology(f: &Formula) -> Result<bool, usize> {
    let mut atoms: Vec<Formula> = Vec::new();
    collect_atoms(f, &mut atoms);
    if atoms.len() > MAX_TAUT_ATOMS {
        return Err(atoms.len());
    }
    for assignment in 0u64..(1u64 << atoms.len()) {
        if !eval_prop(f, &atoms, assignment) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn collect_atoms(f: &Formula, atoms: &mut Vec<Formula>) {
    match f {
        Formula::Bot => {}
        Formula::Var(_) | Formula::Box_(_) | Formula::Rhd(_, _) => {
            if !atoms.contains(f) {
                atoms.push(f.clone());
            }
        }
        Formula::Implies(a, b) => {
            collect_atoms(a, atoms);
            collect_atoms(b, atoms);
        }
    }
}

fn eval_prop(f: &Formula, atoms: &[Formula], assignment: u64) -> bool {
    match f {
        Formula::Bot => false,
        Formula::Implies(a, b) => {
            !eval_prop(a, atoms, assignment) || eval_prop(b, atoms, assignment)
        }
        atom => {
            let i = atoms.iter().position(|g| g == atom).expect("atom collected");
            assignment >> i & 1 == 1
        }
    }
}

// ---------------------------------------------------------------------------
// Logics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    Il,
    Ilw,
    Ilm,
    Ilp,
    Ilm0,
    Ilr,
}

impl Logic {
    pub const ALL: [Logic; 6] = [
        Logic::Il,
        Logic::Ilw,
        Logic::Ilm,
        Logic::Ilp,
        Logic::Ilm0,
        Logic::Ilr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Logic::Il => "IL",
            Logic::Ilw => "ILW",
            Logic::Ilm => "ILM",
            Logic::Ilp => "ILP",
            Logic::Ilm0 => "ILM0",
            Logic::Ilr => "ILR",
        }
    }

    /// Axiom schemata the logic admits in proofs.
    pub fn schemas(self) -> Vec<SchemaName> {
        let mut out = vec![
            SchemaName::Taut,
            SchemaName::K,
            SchemaName::L,
            SchemaName::J1,
            SchemaName::J2,
            SchemaName::J3,
            SchemaName::J4,
            SchemaName::J5,
        ];
        if let Some(p) = self.principle_schema() {
            out.push(p);
        }
        out
    }

    pub fn principle_schema(self) -> Option<SchemaName> {
        match self {
            Logic::Il => None,
            Logic::Ilw => Some(SchemaName::W),
            Logic::Ilm => Some(SchemaName::M),
            Logic::Ilp => Some(SchemaName::P),
            Logic::Ilm0 => Some(SchemaName::M0),
            Logic::Ilr => Some(SchemaName::R),
        }
    }

    /// Frame condition matching the logic's principle, when there is one.
    pub fn frame_condition(self) -> Option<crate::model::Principle> {
        match self {
            Logic::Il => None,
            Logic::Ilw => Some(crate::model::Principle::W),
            Logic::Ilm => Some(crate::model::Principle::M),
            Logic::Ilp => Some(crate::model::Principle::P),
            Logic::Ilm0 => Some(crate::model::Principle::M0),
            Logic::Ilr => Some(crate::model::Principle::R),
        }
    }
}

impl std::str::FromStr for Logic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "IL" => Ok(Logic::Il),
            "ILW" => Ok(Logic::Ilw),
            "ILM" => Ok(Logic::Ilm),
            "ILP" => Ok(Logic::Ilp),
            "ILM0" => Ok(Logic::Ilm0),
            "ILR" => Ok(Logic::Ilr),
            other => Err(format!("unknown logic `{other}`")),
        }
    }
}

// ---------------------------------------------------------------------------
// Proof scripts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(SchemaName),
    Hypothesis(usize),
    Mp(usize, usize),
    Nec(usize),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(s) => write!(f, "axiom:{}", s.as_str()),
            Justification::Hypothesis(k) => write!(f, "hyp:{k}"),
            Justification::Mp(i, j) => write!(f, "mp:{i},{j}"),
            Justification::Nec(i) => write!(f, "nec:{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone)]
pub struct ProofScript {
    pub logic: Logic,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    BadReference(usize),
    SchemaNotInLogic(SchemaName),
    NotAnInstance(SchemaName),
    MpShape { antecedent: usize, implication: usize },
    NecShape(usize),
    HypOutOfRange(usize),
    TooManyAtoms,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::BadReference(i) => write!(f, "reference to step {i} is not earlier"),
            Reason::SchemaNotInLogic(s) => write!(f, "schema {} not in logic", s.as_str()),
            Reason::NotAnInstance(s) => write!(f, "not an instance of {}", s.as_str()),
            Reason::MpShape {
                antecedent,
                implication,
            } => write!(
                f,
                "step {implication} is not (step {antecedent} -> this step)"
            ),
            Reason::NecShape(i) => write!(f, "this step is not []-applied to step {i}"),
            Reason::HypOutOfRange(k) => write!(f, "hypothesis index {k} out of range"),
            Reason::TooManyAtoms => write!(f, "tautology check exceeds {MAX_TAUT_ATOMS} atoms"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct ProofError {
    pub step: usize,
    pub reason: Reason,
}

/// Check every step of the script. Step indices are 0-based. `hyps` is the
/// ambient hypothesis set referenced by `hyp:k` justifications.
pub fn check_proof(script: &ProofScript, hyps: &[Formula]) -> Result<(), ProofError> {
    for (n, step) in script.steps.iter().enumerate() {
        let err = |reason: Reason| ProofError { step: n, reason };
        match &step.justification {
            Justification::Axiom(name) => {
                if !script.logic.schemas().contains(name) {
                    return Err(err(Reason::SchemaNotInLogic(*name)));
                }
                match match_schema(&step.formula, *name) {
                    Ok(Some(_)) => {}
                    Ok(None) => return Err(err(Reason::NotAnInstance(*name))),
                    Err(e) => return Err(err(e.reason)),
                }
            }
            Justification::Hypothesis(k) => {
                if *k >= hyps.len() || hyps[*k] != step.formula {
                    return Err(err(Reason::HypOutOfRange(*k)));
                }
            }
            Justification::Mp(i, j) => {
                if *i >= n || *j >= n {
                    return Err(err(Reason::BadReference((*i).max(*j))));
                }
                let expected = Formula::imp(script.steps[*i].formula.clone(), step.formula.clone());
                if script.steps[*j].formula != expected {
                    return Err(err(Reason::MpShape {
                        antecedent: *i,
                        implication: *j,
                    }));
                }
            }
            Justification::Nec(i) => {
                if *i >= n {
                    return Err(err(Reason::BadReference(*i)));
                }
                if step.formula != Formula::boxed(script.steps[*i].formula.clone()) {
                    return Err(err(Reason::NecShape(*i)));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: {err}")]
    Formula { line: usize, err: ParseError },
}

/// Parse the one-step-per-line format: a `logic: NAME` header, then lines
/// `FORMULA ; axiom:NAME | mp:i,j | nec:i | hyp:k`. `#` starts a comment.
pub fn parse_script(text: &str) -> Result<ProofScript, ScriptError> {
    let mut logic: Option<Logic> = None;
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if logic.is_none() {
            let rest = line.strip_prefix("logic:").ok_or_else(|| ScriptError::Format {
                line: line_no,
                msg: "expected `logic: NAME` header".to_string(),
            })?;
            logic = Some(rest.trim().parse().map_err(|msg| ScriptError::Format {
                line: line_no,
                msg,
            })?);
            continue;
        }
        let (formula_text, just_text) =
            line.rsplit_once(';').ok_or_else(|| ScriptError::Format {
                line: line_no,
                msg: "expected `FORMULA ; JUSTIFICATION`".to_string(),
            })?;
        let formula = parse(formula_text.trim()).map_err(|err| ScriptError::Formula {
            line: line_no,
            err,
        })?;
        let justification = parse_justification(just_text.trim()).map_err(|msg| {
            ScriptError::Format {
                line: line_no,
                msg,
            }
        })?;
        steps.push(Step {
            formula,
            justification,
        });
    }
    Ok(ProofScript {
        logic: logic.ok_or(ScriptError::Format {
            line: 0,
            msg: "missing `logic:` header".to_string(),
        })?,
        steps,
    })
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| format!("bad justification `{text}`"))?;
    let arg = arg.trim();
    match kind.trim() {
        "axiom" => Ok(Justification::Axiom(arg.parse()?)),
        "hyp" => Ok(Justification::Hypothesis(
            arg.parse::<usize>().map_err(|e| e.to_string())?,
        )),
        "nec" => Ok(Justification::Nec(
            arg.parse::<usize>().map_err(|e| e.to_string())?,
        )),
        "mp" => {
            let (i, j) = arg
                .split_once(',')
                .ok_or_else(|| format!("mp needs two indices, got `{arg}`"))?;
            Ok(Justification::Mp(
                i.trim().parse::<usize>().map_err(|e| e.to_string())?,
                j.trim().parse::<usize>().map_err(|e| e.to_string())?,
            ))
        }
        other => Err(format!("unknown justification kind `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn j5_matches() {
        let f = parse("<>p |> p").unwrap();
        let subst = match_schema(&f, SchemaName::J5).unwrap().unwrap();
        assert_eq!(subst[&'A'], parse("p").unwrap());
    }

    #[test]
    fn j2_matches() {
        let f = parse("(p |> q) & (q |> r) -> (p |> r)").unwrap();
        let subst = match_schema(&f, SchemaName::J2).unwrap().unwrap();
        assert_eq!(subst[&'A'], parse("p").unwrap());
        assert_eq!(subst[&'B'], parse("q").unwrap());
        assert_eq!(subst[&'C'], parse("r").unwrap());
    }

    #[test]
    fn j1_shape_mismatch() {
        let f = parse("p -> q").unwrap();
        assert!(match_schema(&f, SchemaName::J1).unwrap().is_none());
    }

    #[test]
    fn j2_inconsistent_binding_rejected() {
        let f = parse("(p |> q) & (r |> s) -> (p |> s)").unwrap();
        assert!(match_schema(&f, SchemaName::J2).unwrap().is_none());
    }

    #[test]
    fn taut_accepts_and_rejects() {
        assert!(match_schema(&parse("true").unwrap(), SchemaName::Taut)
            .unwrap()
            .is_some());
        assert!(
            match_schema(&parse("[]p | ~[]p").unwrap(), SchemaName::Taut)
                .unwrap()
                .is_some()
        );
        assert!(match_schema(&parse("p -> q").unwrap(), SchemaName::Taut)
            .unwrap()
            .is_none());
        // []p -> p is not a propositional tautology: [] is opaque
        assert!(match_schema(&parse("[]p -> p").unwrap(), SchemaName::Taut)
            .unwrap()
            .is_none());
    }

    #[test]
    fn taut_atom_cap() {
        let mut f = Formula::Bot;
        for i in 0..25 {
            f = Formula::or(f, Formula::var(&format!("v{i}")));
        }
        assert!(is_tautology(&f).is_err());
    }

    #[test]
    fn trivial_script_ok() {
        let script = parse_script("logic: IL\ntrue ; axiom:Taut\n").unwrap();
        check_proof(&script, &[]).unwrap();
    }

    #[test]
    fn p_axiom_rejected_in_il() {
        let script = parse_script("logic: IL\np |> q -> [](p |> q) ; axiom:P\n").unwrap();
        let err = check_proof(&script, &[]).unwrap_err();
        assert_eq!(err.step, 0);
        assert_eq!(err.reason, Reason::SchemaNotInLogic(SchemaName::P));
    }

    #[test]
    fn p_axiom_accepted_in_ilp() {
        let script = parse_script("logic: ILP\np |> q -> [](p |> q) ; axiom:P\n").unwrap();
        check_proof(&script, &[]).unwrap();
    }

    #[test]
    fn mp_and_nec() {
        let text = "\
logic: IL
p -> p ; axiom:Taut
(p -> p) -> (p -> (p -> p)) ; axiom:Taut
p -> (p -> p) ; mp:0,1
[](p -> (p -> p)) ; nec:2
";
        let script = parse_script(text).unwrap();
        check_proof(&script, &[]).unwrap();
    }

    #[test]
    fn mp_shape_violation() {
        let text = "\
logic: IL
p -> p ; axiom:Taut
q | ~q ; axiom:Taut
q ; mp:0,1
";
        let script = parse_script(text).unwrap();
        let err = check_proof(&script, &[]).unwrap_err();
        assert_eq!(err.step, 2);
        assert!(matches!(err.reason, Reason::MpShape { .. }));
    }

    #[test]
    fn forward_reference_rejected() {
        let text = "\
logic: IL
[]true ; nec:1
true ; axiom:Taut
";
        let script = parse_script(text).unwrap();
        let err = check_proof(&script, &[]).unwrap_err();
        assert_eq!(err.step, 0);
        assert_eq!(err.reason, Reason::BadReference(1));
    }

    #[test]
    fn hypothesis_steps() {
        let script = parse_script("logic: IL\np |> q ; hyp:0\n").unwrap();
        check_proof(&script, &[parse("p |> q").unwrap()]).unwrap();
        let err = check_proof(&script, &[]).unwrap_err();
        assert_eq!(err.reason, Reason::HypOutOfRange(0));
    }

    #[test]
    fn prefix_of_valid_script_is_valid() {
        let text = "\
logic: ILW
p -> p ; axiom:Taut
(p -> p) -> (p | ~p) ; axiom:Taut
p | ~p ; mp:0,1
[](p | ~p) ; nec:2
p |> q -> p |> (q & []~p) ; axiom:W
";
        let script = parse_script(text).unwrap();
        check_proof(&script, &[]).unwrap();
        for k in 0..=script.steps.len() {
            let prefix = ProofScript {
                logic: script.logic,
                steps: script.steps[..k].to_vec(),
            };
            check_proof(&prefix, &[]).unwrap();
        }
    }

    #[test]
    fn all_templates_self_match() {
        // Instantiating each template with distinct variables must match.
        for name in [
            SchemaName::K,
            SchemaName::L,
            SchemaName::J1,
            SchemaName::J2,
            SchemaName::J3,
            SchemaName::J4,
            SchemaName::J5,
            SchemaName::W,
            SchemaName::M,
            SchemaName::P,
            SchemaName::M0,
            SchemaName::R,
        ] {
            let pat = template(name).unwrap();
            let f = instantiate(&pat);
            assert!(
                match_schema(&f, name).unwrap().is_some(),
                "{} failed to match its own instance",
                name.as_str()
            );
        }
    }

    fn instantiate(pat: &Pattern) -> Formula {
        match pat {
            Pattern::Meta(c) => Formula::var(&c.to_string().to_lowercase()),
            Pattern::Bot => Formula::Bot,
            Pattern::Implies(a, b) => Formula::imp(instantiate(a), instantiate(b)),
            Pattern::Box_(a) => Formula::boxed(instantiate(a)),
            Pattern::Rhd(a, b) => Formula::rhd(instantiate(a), instantiate(b)),
        }
    }
}
