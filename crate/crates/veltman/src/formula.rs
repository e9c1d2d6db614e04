//! Formula AST, parser, printer and adequate-set machinery.
//!
//! The internal language is the core grammar: `false`, variables, `->`,
//! `[]` and the binary `|>`. Everything else (`~`, `&`, `|`, `<>`, `true`)
//! is sugar and is eliminated at construction time, so structural equality
//! is the only notion of formula equality used anywhere in this crate.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    Var(String),
    Implies(Box<Formula>, Box<Formula>),
    Box_(Box<Formula>),
    Rhd(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box_(Box::new(a))
    }

    pub fn rhd(a: Formula, b: Formula) -> Formula {
        Formula::Rhd(Box::new(a), Box::new(b))
    }

    /// ~a, desugared as a -> false.
    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    /// true, desugared as ~false.
    pub fn top() -> Formula {
        Formula::not(Formula::Bot)
    }

    /// a & b, desugared as ~(a -> ~b).
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::imp(a, Formula::not(b)))
    }

    /// a | b, desugared as ~a -> b.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::imp(Formula::not(a), b)
    }

    /// <>a, desugared as ~[]~a.
    pub fn dia(a: Formula) -> Formula {
        Formula::not(Formula::boxed(Formula::not(a)))
    }

    /// Single negation: ~~a is identified with a.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bot => (**a).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::Var(_) => 1,
            Formula::Box_(a) => 1 + a.size(),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Reflexive-transitive subterm set.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Bot | Formula::Var(_) => {}
            Formula::Box_(a) => a.collect_subformulas(out),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    /// Variables occurring in the formula, sorted.
    pub fn variables(&self) -> Vec<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bot => {}
            Formula::Var(v) => {
                out.insert(v.clone());
            }
            Formula::Box_(a) => a.collect_vars(out),
            Formula::Implies(a, b) | Formula::Rhd(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Structural order: size first, then the derived lexicographic order.
    /// Used wherever a reproducible formula ordering is needed.
    pub fn cmp_structural(&self, other: &Formula) -> std::cmp::Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.cmp(other))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print(self))
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Precedence levels, loosest to tightest. `|>` is non-associative, `->` is
// right-associative, `&`/`|` are left-associative, prefix operators bind
// tightest.
const PREC_IMPLIES: u8 = 1;
const PREC_RHD: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_PREFIX: u8 = 5;

/// Render a formula in the concrete syntax. Re-sugars `~`, `true`, `&`, `|`
/// and `<>` where the tree matches their desugaring, so output stays
/// readable; `parse(print(f)) == f` holds regardless.
pub fn print(f: &Formula) -> String {
    let mut s = String::new();
    print_prec(f, PREC_IMPLIES, &mut s);
    s
}

fn print_prec(f: &Formula, min_prec: u8, out: &mut String) {
    match f {
        Formula::Bot => out.push_str("false"),
        Formula::Var(v) => out.push_str(v),
        Formula::Box_(a) => {
            out.push_str("[]");
            print_prec(a, PREC_PREFIX, out);
        }
        Formula::Implies(a, b) => print_implies(a, b, min_prec, out),
        Formula::Rhd(a, b) => {
            let paren = min_prec > PREC_RHD;
            if paren {
                out.push('(');
            }
            print_prec(a, PREC_RHD + 1, out);
            out.push_str(" |> ");
            print_prec(b, PREC_RHD + 1, out);
            if paren {
                out.push(')');
            }
        }
    }
}

fn print_implies(a: &Formula, b: &Formula, min_prec: u8, out: &mut String) {
    // true = ~false
    if *a == Formula::Bot && *b == Formula::Bot {
        out.push_str("true");
        return;
    }
    if *b == Formula::Bot {
        // a & b = ~(a -> ~b)
        if let Formula::Implies(x, y) = a {
            if let Formula::Implies(y1, y2) = &**y {
                if **y2 == Formula::Bot && **y != Formula::Bot {
                    let paren = min_prec > PREC_AND;
                    if paren {
                        out.push('(');
                    }
                    print_prec(x, PREC_AND, out);
                    out.push_str(" & ");
                    print_prec(y1, PREC_AND + 1, out);
                    if paren {
                        out.push(')');
                    }
                    return;
                }
            }
        }
        // <>a = ~[]~a
        if let Formula::Box_(inner) = a {
            if let Formula::Implies(x, bot) = &**inner {
                if **bot == Formula::Bot {
                    out.push_str("<>");
                    print_prec(x, PREC_PREFIX, out);
                    return;
                }
            }
        }
        // ~a
        out.push('~');
        print_prec(a, PREC_PREFIX, out);
        return;
    }
    // a | b = ~a -> b
    if let Formula::Implies(x, bot) = a {
        if **bot == Formula::Bot {
            let paren = min_prec > PREC_OR;
            if paren {
                out.push('(');
            }
            print_prec(x, PREC_OR, out);
            out.push_str(" | ");
            print_prec(b, PREC_OR + 1, out);
            if paren {
                out.push(')');
            }
            return;
        }
    }
    let paren = min_prec > PREC_IMPLIES;
    if paren {
        out.push('(');
    }
    print_prec(a, PREC_IMPLIES + 1, out);
    out.push_str(" -> ");
    print_prec(b, PREC_IMPLIES, out);
    if paren {
        out.push(')');
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("associativity error at column {pos}: `|>` is non-associative, parenthesize the chain")]
    Associativity { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    False,
    True,
    Not,
    BoxOp,
    DiaOp,
    And,
    Or,
    Rhd,
    Arrow,
    LPar,
    RPar,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::End, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'~' => {
                self.pos += 1;
                Tok::Not
            }
            b'&' => {
                self.pos += 1;
                Tok::And
            }
            b'(' => {
                self.pos += 1;
                Tok::LPar
            }
            b')' => {
                self.pos += 1;
                Tok::RPar
            }
            b'[' => {
                self.pos += 1;
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    Tok::BoxOp
                } else {
                    return Err(self.err(start, "expected `]` after `[`"));
                }
            }
            b'<' => {
                self.pos += 1;
                if self.peek() == Some(b'>') {
                    self.pos += 1;
                    Tok::DiaOp
                } else {
                    return Err(self.err(start, "expected `>` after `<`"));
                }
            }
            b'|' => {
                self.pos += 1;
                if self.peek() == Some(b'>') {
                    self.pos += 1;
                    Tok::Rhd
                } else {
                    Tok::Or
                }
            }
            b'-' => {
                self.pos += 1;
                if self.peek() == Some(b'>') {
                    self.pos += 1;
                    Tok::Arrow
                } else {
                    return Err(self.err(start, "expected `>` after `-`"));
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric()
                        || self.src[end] == b'_'
                        || self.src[end] == b'\'')
                {
                    end += 1;
                }
                let word = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                match word {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(self.err(start, &format!("unexpected character `{}`", other as char)))
            }
        };
        Ok((tok, start))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, pos: usize, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos,
            msg: msg.to_string(),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

/// Parse a formula in the concrete grammar. Sugar is eliminated; `|>` chains
/// without parentheses are rejected.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    loop {
        let (tok, pos) = lexer.next_tok()?;
        let end = tok == Tok::End;
        toks.push((tok, pos));
        if end {
            break;
        }
    }
    let mut p = Parser { toks, at: 0 };
    let f = p.implies()?;
    let (tok, pos) = p.peek();
    if tok != Tok::End {
        return Err(ParseError::Syntax {
            pos,
            msg: "trailing input after formula".to_string(),
        });
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> (Tok, usize) {
        self.toks[self.at].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    // -> right-associative, loosest
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let left = self.rhd()?;
        if self.peek().0 == Tok::Arrow {
            self.bump();
            let right = self.implies()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    // |> non-associative
    fn rhd(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if self.peek().0 == Tok::Rhd {
            self.bump();
            let right = self.or()?;
            if let (Tok::Rhd, pos) = self.peek() {
                return Err(ParseError::Associativity { pos });
            }
            return Ok(Formula::rhd(left, right));
        }
        Ok(left)
    }

    // | left-associative
    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.peek().0 == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    // & left-associative
    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.peek().0 == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (tok, pos) = self.peek();
        match tok {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::DiaOp => {
                self.bump();
                Ok(Formula::dia(self.unary()?))
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::LPar => {
                self.bump();
                let inner = self.implies()?;
                let (tok, pos) = self.bump();
                if tok != Tok::RPar {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "expected `)`".to_string(),
                    });
                }
                Ok(inner)
            }
            _ => Err(ParseError::Syntax {
                pos,
                msg: "expected a formula".to_string(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Adequate sets
// ---------------------------------------------------------------------------

/// A finite formula universe: contains `false |> false`, is closed under
/// subformulas and single negation, closed under `|>`-pairing of antecedents
/// and consequents, and augmented with `[]~A` / `~[]~A` for every such
/// antecedent or consequent `A`. Formulas are stored in the structural
/// order, so positions are reproducible.
#[derive(Debug, Clone)]
pub struct AdequateSet {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    /// Position of the single negation of each member.
    negation: Vec<usize>,
    /// Positions whose formula has outermost `[]`.
    boxed: Vec<usize>,
    /// Positions whose formula has outermost `|>`.
    rhd: Vec<usize>,
}

impl AdequateSet {
    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn position(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn formula(&self, idx: usize) -> &Formula {
        &self.formulas[idx]
    }

    /// Position of the single negation of the member at `idx`.
    pub fn negation_of(&self, idx: usize) -> usize {
        self.negation[idx]
    }

    pub fn boxed_positions(&self) -> &[usize] {
        &self.boxed
    }

    pub fn rhd_positions(&self) -> &[usize] {
        &self.rhd
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains_key(f)
    }
}

/// Least closure of `f` under the adequate-set rules plus the box
/// augmentation over the `|>` antecedent/consequent pool.
pub fn adequate_set(f: &Formula) -> AdequateSet {
    let mut set: BTreeSet<Formula> = BTreeSet::new();
    set.insert(f.clone());
    set.insert(Formula::rhd(Formula::Bot, Formula::Bot));

    close_subformulas_and_negation(&mut set);
    // |>-pairing: the pool is fixed once subformula closure has run, since
    // paired formulas only mention pool members.
    loop {
        let pool = rhd_pool(&set);
        let mut added = false;
        for a in &pool {
            for b in &pool {
                if set.insert(Formula::rhd(a.clone(), b.clone())) {
                    added = true;
                }
            }
        }
        close_subformulas_and_negation(&mut set);
        if !added {
            break;
        }
    }
    // Box augmentation: []~A and ~[]~A for each pool member A.
    let pool = rhd_pool(&set);
    for a in &pool {
        set.insert(Formula::boxed(a.negate()));
        set.insert(Formula::boxed(a.negate()).negate());
    }
    close_subformulas_and_negation(&mut set);

    let mut formulas: Vec<Formula> = set.into_iter().collect();
    formulas.sort_by(|a, b| a.cmp_structural(b));
    let index: HashMap<Formula, usize> = formulas
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let negation = formulas.iter().map(|f| index[&f.negate()]).collect();
    let boxed = formulas
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(f, Formula::Box_(_)))
        .map(|(i, _)| i)
        .collect();
    let rhd = formulas
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(f, Formula::Rhd(_, _)))
        .map(|(i, _)| i)
        .collect();
    AdequateSet {
        formulas,
        index,
        negation,
        boxed,
        rhd,
    }
}

fn close_subformulas_and_negation(set: &mut BTreeSet<Formula>) {
    loop {
        let mut add: Vec<Formula> = Vec::new();
        for f in set.iter() {
            for sub in f.subformulas() {
                if !set.contains(&sub) {
                    add.push(sub);
                }
            }
            let neg = f.negate();
            if !set.contains(&neg) {
                add.push(neg);
            }
        }
        if add.is_empty() {
            return;
        }
        for f in add {
            set.insert(f);
        }
    }
}

fn rhd_pool(set: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    let mut pool = BTreeSet::new();
    for f in set {
        if let Formula::Rhd(a, b) = f {
            pool.insert((**a).clone());
            pool.insert((**b).clone());
        }
    }
    pool
}

/// Check the adequate-set invariants on an arbitrary formula collection.
/// Independent of `adequate_set`, so tests can use it as a validator.
pub fn is_adequate(formulas: &[Formula]) -> Result<(), String> {
    let set: BTreeSet<Formula> = formulas.iter().cloned().collect();
    if set.len() != formulas.len() {
        return Err("duplicate members".to_string());
    }
    if !set.contains(&Formula::rhd(Formula::Bot, Formula::Bot)) {
        return Err("missing false |> false".to_string());
    }
    for f in &set {
        for sub in f.subformulas() {
            if !set.contains(&sub) {
                return Err(format!("not closed under subformulas: {} lacks {}", f, sub));
            }
        }
        if !set.contains(&f.negate()) {
            return Err(format!("not closed under single negation: lacks ~({})", f));
        }
    }
    let pool = rhd_pool(&set);
    for a in &pool {
        for b in &pool {
            if !set.contains(&Formula::rhd(a.clone(), b.clone())) {
                return Err(format!("not closed under |>-pairing: lacks {} |> {}", a, b));
            }
        }
        let aug = Formula::boxed(a.negate());
        if !set.contains(&aug) {
            return Err(format!("missing box augmentation: lacks {}", aug));
        }
        if !set.contains(&aug.negate()) {
            return Err(format!("missing box augmentation: lacks ~({})", aug));
        }
    }
    Ok(())
}
