//! Generalised Veltman models in the set-successor semantics: per world,
//! `S_w` relates a world to nonempty world sets. Models store a generating
//! set of `(u, V)` entries; the effective relation is its monotone closure
//! inside `R[w]`, tested by subset checks so closures are never
//! materialized.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::Formula;
use crate::model::{bits, ModelError, MAX_WORLDS};

#[derive(Debug, Clone)]
pub struct GeneralisedModel {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    r: Vec<u64>,
    /// Listed generators: `s[w]` holds pairs `(u, V)` with `V` a world mask.
    s: Vec<Vec<(usize, u64)>>,
    valuation: BTreeMap<String, u64>,
}

/// First violated clause of the generalised frame definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenViolation {
    RCycle(Vec<String>),
    RNotTransitive(String, String, String),
    EmptyTarget { w: String, u: String },
    OutsideR { w: String, u: String },
    NotQuasiReflexive { w: String, u: String },
    MissingRStep { w: String, u: String, v: String },
    NotQuasiTransitive { w: String, u: String, union: Vec<String> },
}

impl fmt::Display for GenViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenViolation::RCycle(c) => write!(f, "R has a cycle: {}", c.join(" -> ")),
            GenViolation::RNotTransitive(w, u, v) => {
                write!(f, "R not transitive: {w} R {u} R {v} but not {w} R {v}")
            }
            GenViolation::EmptyTarget { w, u } => {
                write!(f, "S_{w} lists ({u}, {{}}): target sets must be nonempty")
            }
            GenViolation::OutsideR { w, u } => {
                write!(f, "S_{w} entry at {u} leaves R[{w}]")
            }
            GenViolation::NotQuasiReflexive { w, u } => {
                write!(f, "S_{w} not quasi-reflexive: {w} R {u} but no entry below {{{u}}}")
            }
            GenViolation::MissingRStep { w, u, v } => {
                write!(f, "{w} R {u} R {v} but S_{w} has no entry at {u} below {{{v}}}")
            }
            GenViolation::NotQuasiTransitive { w, u, union } => {
                write!(
                    f,
                    "S_{w} not quasi-transitive at {u}: union {{{}}} unreachable",
                    union.join(", ")
                )
            }
        }
    }
}

/// Counterexample to one of the generalised frame conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenCounterexample {
    pub condition: &'static str,
    pub worlds: Vec<String>,
    pub set: Vec<String>,
}

impl fmt::Display for GenCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {} fails at ({}) with V = {{{}}}",
            self.condition,
            self.worlds.join(", "),
            self.set.join(", ")
        )
    }
}

impl GeneralisedModel {
    pub fn new(
        names: Vec<String>,
        r_pairs: &[(usize, usize)],
        s_entries: &[(usize, usize, &[usize])],
        valuation: BTreeMap<String, Vec<usize>>,
    ) -> Result<GeneralisedModel, ModelError> {
        let n = names.len();
        if n > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(n));
        }
        let mut name_index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name_index.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        let mut r = vec![0u64; n];
        for &(w, u) in r_pairs {
            r[w] |= 1 << u;
        }
        let mut s = vec![Vec::new(); n];
        for &(w, u, vs) in s_entries {
            let mask = vs.iter().fold(0u64, |m, &v| m | (1 << v));
            s[w].push((u, mask));
        }
        let valuation = valuation
            .into_iter()
            .map(|(var, worlds)| (var, worlds.iter().fold(0u64, |m, &w| m | (1 << w))))
            .collect();
        Ok(GeneralisedModel {
            names,
            name_index,
            r,
            s,
            valuation,
        })
    }

    pub fn from_masks(
        r: Vec<u64>,
        s: Vec<Vec<(usize, u64)>>,
        valuation: BTreeMap<String, u64>,
    ) -> Self {
        let n = r.len();
        let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let name_index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        GeneralisedModel {
            names,
            name_index,
            r,
            s,
            valuation,
        }
    }

    pub fn n_worlds(&self) -> usize {
        self.names.len()
    }

    pub fn world_names(&self) -> &[String] {
        &self.names
    }

    pub fn world_index(&self, name: &str) -> Result<usize, ModelError> {
        self.name_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(name.to_string()))
    }

    pub fn r_mask(&self, w: usize) -> u64 {
        self.r[w]
    }

    pub fn listed(&self, w: usize) -> &[(usize, u64)] {
        &self.s[w]
    }

    pub fn valuation(&self) -> &BTreeMap<String, u64> {
        &self.valuation
    }

    pub fn remove_listed(&mut self, w: usize, idx: usize) {
        self.s[w].remove(idx);
    }

    fn all_mask(&self) -> u64 {
        if self.n_worlds() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_worlds()) - 1
        }
    }

    /// Effective relation: `u S_w V` iff a listed `(u, V0)` has
    /// `V0 ⊆ V ⊆ R[w]`. Monotonicity holds by construction.
    pub fn s_hat(&self, w: usize, u: usize, v_mask: u64) -> bool {
        if v_mask == 0 || v_mask & !self.r[w] != 0 {
            return false;
        }
        self.s[w]
            .iter()
            .any(|&(u0, v0)| u0 == u && v0 & !v_mask == 0)
    }

    /// Worlds `z` with `z Ŝ_w V` for the given target set.
    pub fn s_hat_preimage(&self, w: usize, v_mask: u64) -> u64 {
        let mut out = 0u64;
        for &(u0, v0) in &self.s[w] {
            if v0 & !v_mask == 0 && v_mask & !self.r[w] == 0 && v_mask != 0 {
                out |= 1 << u0;
            }
        }
        out
    }

    // -- validation -----------------------------------------------------------

    pub fn validate(&self) -> Result<(), GenViolation> {
        let n = self.n_worlds();
        if let Some(cycle) = crate::model::find_cycle(n, |w| self.r[w]) {
            return Err(GenViolation::RCycle(
                cycle.into_iter().map(|i| self.names[i].clone()).collect(),
            ));
        }
        for w in 0..n {
            for u in bits(self.r[w]) {
                let missing = self.r[u] & !self.r[w];
                if missing != 0 {
                    let v = missing.trailing_zeros() as usize;
                    return Err(GenViolation::RNotTransitive(
                        self.names[w].clone(),
                        self.names[u].clone(),
                        self.names[v].clone(),
                    ));
                }
            }
        }
        for w in 0..n {
            for &(u, v0) in &self.s[w] {
                if v0 == 0 {
                    return Err(GenViolation::EmptyTarget {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                    });
                }
                if self.r[w] >> u & 1 == 0 || v0 & !self.r[w] != 0 {
                    return Err(GenViolation::OutsideR {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                    });
                }
            }
            // quasi-reflexivity: wRu implies u S_w {u}
            for u in bits(self.r[w]) {
                if !self.s_hat(w, u, 1 << u) {
                    return Err(GenViolation::NotQuasiReflexive {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                    });
                }
            }
            // clause d: wRuRv implies u S_w {v}
            for u in bits(self.r[w]) {
                for v in bits(self.r[u]) {
                    if !self.s_hat(w, u, 1 << v) {
                        return Err(GenViolation::MissingRStep {
                            w: self.names[w].clone(),
                            u: self.names[u].clone(),
                            v: self.names[v].clone(),
                        });
                    }
                }
            }
            // quasi-transitivity over choice functions on listed entries.
            // Monotonicity reduces the general statement to generators.
            if let Some((u, union)) = self.quasi_transitivity_gap(w) {
                return Err(GenViolation::NotQuasiTransitive {
                    w: self.names[w].clone(),
                    u: self.names[u].clone(),
                    union: bits(union).map(|i| self.names[i].clone()).collect(),
                });
            }
        }
        Ok(())
    }

    /// Search for a quasi-transitivity failure at `w`: a listed `(u, V0)`
    /// and a choice of listed `(v, Z_v)` for each `v` in `V0` whose union
    /// is not reachable from `u`. Exponential in `|V0|`; fine at the model
    /// sizes this crate works with.
    fn quasi_transitivity_gap(&self, w: usize) -> Option<(usize, u64)> {
        for &(u, v0) in &self.s[w] {
            let members: Vec<usize> = bits(v0).collect();
            let choices: Vec<Vec<u64>> = members
                .iter()
                .map(|&v| {
                    self.s[w]
                        .iter()
                        .filter(|&&(x, _)| x == v)
                        .map(|&(_, z)| z)
                        .collect()
                })
                .collect();
            // If some member has no listed entry the premise of
            // quasi-transitivity cannot fire for this V0.
            if choices.iter().any(|c| c.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; members.len()];
            'combos: loop {
                let union = idx
                    .iter()
                    .zip(&choices)
                    .fold(0u64, |acc, (&i, c)| acc | c[i]);
                if !self.s_hat(w, u, union) {
                    return Some((u, union));
                }
                // odometer
                let mut k = 0;
                loop {
                    if k == members.len() {
                        break 'combos;
                    }
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        continue 'combos;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
        None
    }

    // -- forcing --------------------------------------------------------------

    /// Bitmask of worlds forcing `f`. For `A |> B` it suffices to scan the
    /// listed generators: any effective witness set contains one.
    pub fn eval(&self, f: &Formula) -> u64 {
        let all = self.all_mask();
        match f {
            Formula::Bot => 0,
            Formula::Var(v) => self.valuation.get(v).copied().unwrap_or(0) & all,
            Formula::Implies(a, b) => (!self.eval(a) | self.eval(b)) & all,
            Formula::Box_(a) => {
                let am = self.eval(a);
                let mut out = 0u64;
                for w in 0..self.n_worlds() {
                    if self.r[w] & !am == 0 {
                        out |= 1 << w;
                    }
                }
                out
            }
            Formula::Rhd(a, b) => {
                let am = self.eval(a);
                let bm = self.eval(b);
                let mut out = 0u64;
                for w in 0..self.n_worlds() {
                    let mut ok = true;
                    for u in bits(self.r[w] & am) {
                        if !self.s[w]
                            .iter()
                            .any(|&(u0, v0)| u0 == u && v0 & !bm == 0)
                        {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        out |= 1 << w;
                    }
                }
                out
            }
        }
    }

    pub fn force(&self, w: usize, f: &Formula) -> bool {
        self.eval(f) >> w & 1 == 1
    }

    pub fn force_named(&self, world: &str, f: &Formula) -> Result<bool, ModelError> {
        Ok(self.force(self.world_index(world)?, f))
    }

    // -- generalised frame conditions ------------------------------------------

    /// Characteristic condition for P on generalised frames:
    /// `wRw'RuS_wV` implies `u S_{w'} V'` for some `V' ⊆ V`. Checking
    /// listed generators suffices since the condition is monotone in `V`.
    pub fn check_gen_p(&self) -> Result<(), GenCounterexample> {
        let n = self.n_worlds();
        for w in 0..n {
            for wp in bits(self.r[w]) {
                for &(u, v0) in &self.s[w] {
                    if self.r[wp] >> u & 1 == 0 {
                        continue;
                    }
                    let found = self.s[wp].iter().any(|&(u1, v1)| u1 == u && v1 & !v0 == 0);
                    if !found {
                        return Err(GenCounterexample {
                            condition: "(P)_gen",
                            worlds: vec![
                                self.names[w].clone(),
                                self.names[wp].clone(),
                                self.names[u].clone(),
                            ],
                            set: bits(v0).map(|i| self.names[i].clone()).collect(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Condition ensuring W on generalised frames: whenever `u S_w V` there
    /// is `V' ⊆ V` with `u S_w V'` and `R[V']` disjoint from the worlds
    /// that reach `V` via `S_w`. When `strict` is false only listed
    /// generators (plus the full `R[w]` extreme) are used for `V`; strict
    /// mode quantifies `V` over all supersets of generators within `R[w]`.
    pub fn check_gen_w(&self, strict: bool) -> Result<(), GenCounterexample> {
        let n = self.n_worlds();
        for w in 0..n {
            let mut targets: Vec<(usize, u64)> = self.s[w].clone();
            let rw = self.r[w];
            if rw != 0 {
                for u in bits(rw) {
                    if self.s[w].iter().any(|&(u0, _)| u0 == u) {
                        targets.push((u, rw));
                    }
                }
            }
            if strict {
                for &(u, v0) in &self.s[w] {
                    let free: Vec<usize> = bits(rw & !v0).collect();
                    for sub in 0u64..(1u64 << free.len()) {
                        let mut v = v0;
                        for (j, &world) in free.iter().enumerate() {
                            if sub >> j & 1 == 1 {
                                v |= 1 << world;
                            }
                        }
                        targets.push((u, v));
                    }
                }
            }
            targets.sort_unstable();
            targets.dedup();
            for &(u, v) in &targets {
                if !self.s_hat(w, u, v) {
                    continue;
                }
                let preimage = self.s_hat_preimage(w, v);
                let ok = self.s[w].iter().any(|&(u0, vp)| {
                    u0 == u && vp & !v == 0 && {
                        let r_of_vp = bits(vp).fold(0u64, |acc, x| acc | self.r[x]);
                        r_of_vp & preimage == 0
                    }
                });
                if !ok {
                    return Err(GenCounterexample {
                        condition: "(W)_gen",
                        worlds: vec![self.names[w].clone(), self.names[u].clone()],
                        set: bits(v).map(|i| self.names[i].clone()).collect(),
                    });
                }
            }
        }
        Ok(())
    }

    // -- serialization ----------------------------------------------------------

    pub fn to_json(&self) -> String {
        let file = GeneralisedModelFile {
            kind: "generalised".to_string(),
            worlds: self.names.clone(),
            r: {
                let mut pairs = Vec::new();
                for w in 0..self.n_worlds() {
                    for u in bits(self.r[w]) {
                        pairs.push((self.names[w].clone(), self.names[u].clone()));
                    }
                }
                pairs
            },
            s: {
                let mut map = BTreeMap::new();
                for w in 0..self.n_worlds() {
                    if self.s[w].is_empty() {
                        continue;
                    }
                    let entries: Vec<GenEntry> = self.s[w]
                        .iter()
                        .map(|&(u, v)| GenEntry {
                            u: self.names[u].clone(),
                            v: bits(v).map(|i| self.names[i].clone()).collect(),
                        })
                        .collect();
                    map.insert(self.names[w].clone(), entries);
                }
                map
            },
            valuation: self
                .valuation
                .iter()
                .map(|(var, mask)| {
                    (
                        var.clone(),
                        bits(*mask).map(|w| self.names[w].clone()).collect(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<GeneralisedModel, ModelError> {
        let file: GeneralisedModelFile = serde_json::from_str(text)?;
        if file.kind != "generalised" {
            return Err(ModelError::WrongKind(file.kind));
        }
        let names = file.worlds;
        if names.len() > MAX_WORLDS {
            return Err(ModelError::TooManyWorlds(names.len()));
        }
        let mut name_index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name_index.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        let look = |name: &String| -> Result<usize, ModelError> {
            name_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownWorld(name.clone()))
        };
        let mut r = vec![0u64; names.len()];
        for (w, u) in &file.r {
            r[look(w)?] |= 1 << look(u)?;
        }
        let mut s = vec![Vec::new(); names.len()];
        for (w, entries) in &file.s {
            let w = look(w)?;
            for entry in entries {
                let u = look(&entry.u)?;
                let mut mask = 0u64;
                for v in &entry.v {
                    mask |= 1 << look(v)?;
                }
                s[w].push((u, mask));
            }
        }
        let mut valuation = BTreeMap::new();
        for (var, worlds) in &file.valuation {
            let mut mask = 0u64;
            for name in worlds {
                mask |= 1 << look(name)?;
            }
            valuation.insert(var.clone(), mask);
        }
        Ok(GeneralisedModel {
            names,
            name_index,
            r,
            s,
            valuation,
        })
    }

    /// DOT rendering: each listed (u, V) becomes a hyperedge through an
    /// auxiliary point node.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph model {\n  rankdir=BT;\n");
        for (i, name) in self.names.iter().enumerate() {
            let vars: Vec<&str> = self
                .valuation
                .iter()
                .filter(|(_, mask)| *mask >> i & 1 == 1)
                .map(|(var, _)| var.as_str())
                .collect();
            let label = if vars.is_empty() {
                name.clone()
            } else {
                format!("{}\\n{}", name, vars.join(" "))
            };
            out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", name, label));
        }
        for w in 0..self.n_worlds() {
            for u in bits(self.r[w]) {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\";\n",
                    self.names[w], self.names[u]
                ));
            }
        }
        let mut aux = 0usize;
        for w in 0..self.n_worlds() {
            for &(u, v) in &self.s[w] {
                let hub = format!("h{aux}");
                aux += 1;
                out.push_str(&format!(
                    "  \"{hub}\" [shape=point, label=\"\"];\n  \"{}\" -> \"{hub}\" [style=dashed, label=\"{}\", arrowhead=none];\n",
                    self.names[u], self.names[w]
                ));
                for x in bits(v) {
                    out.push_str(&format!(
                        "  \"{hub}\" -> \"{}\" [style=dashed];\n",
                        self.names[x]
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct GenEntry {
    u: String,
    #[serde(rename = "V")]
    v: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GeneralisedModelFile {
    #[serde(rename = "type")]
    kind: String,
    worlds: Vec<String>,
    #[serde(rename = "R")]
    r: Vec<(String, String)>,
    #[serde(rename = "S", default)]
    s: BTreeMap<String, Vec<GenEntry>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn val(entries: &[(&str, &[usize])]) -> BTreeMap<String, Vec<usize>> {
        entries
            .iter()
            .map(|(v, ws)| (v.to_string(), ws.to_vec()))
            .collect()
    }

    #[test]
    fn quasi_reflexive_seed_validates() {
        let m = GeneralisedModel::new(
            vec!["w".into(), "u".into()],
            &[(0, 1)],
            &[(0, 1, &[1])],
            BTreeMap::new(),
        )
        .unwrap();
        m.validate().unwrap();
    }

    #[test]
    fn clause_d_violation() {
        // wRuRv but no (u, {v}) derivable in S_w.
        let m = GeneralisedModel::new(
            vec!["w".into(), "u".into(), "v".into()],
            &[(0, 1), (1, 2), (0, 2)],
            &[(0, 1, &[1]), (0, 2, &[2]), (1, 2, &[2])],
            BTreeMap::new(),
        )
        .unwrap();
        match m.validate() {
            Err(GenViolation::MissingRStep { .. }) => {}
            other => panic!("expected clause-d violation, got {:?}", other),
        }
    }

    #[test]
    fn quasi_transitivity_violation() {
        // listed (u,{v}), (v,{z}), but no (u, V0 ⊆ {z}); u, v, z are
        // R-incomparable so clause d stays quiet.
        let m = GeneralisedModel::new(
            vec!["w".into(), "u".into(), "v".into(), "z".into()],
            &[(0, 1), (0, 2), (0, 3)],
            &[
                (0, 1, &[1]),
                (0, 2, &[2]),
                (0, 3, &[3]),
                (0, 1, &[2]),
                (0, 2, &[3]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        match m.validate() {
            Err(GenViolation::NotQuasiTransitive { u, union, .. }) => {
                assert_eq!(u, "u");
                assert_eq!(union, vec!["z".to_string()]);
            }
            other => panic!("expected quasi-transitivity violation, got {:?}", other),
        }
    }

    fn two_step() -> GeneralisedModel {
        GeneralisedModel::new(
            vec!["w".into(), "u".into(), "v".into()],
            &[(0, 1), (0, 2)],
            &[(0, 1, &[1]), (0, 2, &[2]), (0, 1, &[2])],
            val(&[("p", &[1]), ("q", &[2])]),
        )
        .unwrap()
    }

    #[test]
    fn force_gen_examples() {
        let m = two_step();
        m.validate().unwrap();
        // terminal world forces box-bot
        assert!(m.force_named("u", &parse("[]false").unwrap()).unwrap());
        // wRu, u forces p, listed (u,{v}), v forces q
        assert!(m.force_named("w", &parse("p |> q").unwrap()).unwrap());
        // no p-successor makes p |> false vacuous at terminal worlds
        assert!(m.force_named("u", &parse("p |> false").unwrap()).unwrap());
        assert!(!m.force_named("w", &parse("p |> false").unwrap()).unwrap());
    }

    #[test]
    fn eval_invariant_under_monotone_extension() {
        // Adding a superset generator must not change forcing.
        let m = two_step();
        let extended = GeneralisedModel::new(
            vec!["w".into(), "u".into(), "v".into()],
            &[(0, 1), (0, 2)],
            &[(0, 1, &[1]), (0, 2, &[2]), (0, 1, &[2]), (0, 1, &[1, 2])],
            val(&[("p", &[1]), ("q", &[2])]),
        )
        .unwrap();
        for text in ["p |> q", "q |> p", "p |> p & q", "<>p", "[]q"] {
            let f = parse(text).unwrap();
            assert_eq!(m.eval(&f), extended.eval(&f), "differs on {}", text);
        }
    }

    #[test]
    fn eval_invariant_under_full_monotone_closure() {
        // Materialize every superset of every generator within R[w]:
        // forcing must not change.
        let m = two_step();
        let mut closed_entries: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for w in 0..m.n_worlds() {
            let rw: Vec<usize> = bits(m.r_mask(w)).collect();
            for &(u, v0) in m.listed(w) {
                let free: Vec<usize> = rw.iter().copied().filter(|x| v0 >> x & 1 == 0).collect();
                for sub in 0u64..(1u64 << free.len()) {
                    let mut vs: Vec<usize> = bits(v0).collect();
                    for (j, &x) in free.iter().enumerate() {
                        if sub >> j & 1 == 1 {
                            vs.push(x);
                        }
                    }
                    closed_entries.push((w, u, vs));
                }
            }
        }
        let entry_refs: Vec<(usize, usize, &[usize])> = closed_entries
            .iter()
            .map(|(w, u, vs)| (*w, *u, vs.as_slice()))
            .collect();
        let closed = GeneralisedModel::new(
            m.world_names().to_vec(),
            &[(0, 1), (0, 2)],
            &entry_refs,
            val(&[("p", &[1]), ("q", &[2])]),
        )
        .unwrap();
        for text in ["p |> q", "q |> p", "p |> false", "<>p -> <>q", "[](p | q)"] {
            let f = parse(text).unwrap();
            assert_eq!(m.eval(&f), closed.eval(&f), "differs on {}", text);
        }
    }

    #[test]
    fn gen_p_positive_and_negative() {
        // Positive: S_{w'} contains the clause-d pairs and V stays inside R[w'].
        let pos = GeneralisedModel::new(
            vec!["w".into(), "wp".into(), "u".into(), "v".into()],
            &[(0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3)],
            &[
                (0, 1, &[1]),
                (0, 2, &[2]),
                (0, 3, &[3]),
                (0, 1, &[2]),
                (0, 2, &[3]),
                (0, 1, &[3]),
                (1, 2, &[2]),
                (1, 3, &[3]),
                (1, 2, &[3]),
                (2, 3, &[3]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        pos.validate().unwrap();
        pos.check_gen_p().unwrap();

        // Negative: wRw'RuS_w{v} with v outside R[w'].
        let neg = GeneralisedModel::new(
            vec!["w".into(), "wp".into(), "u".into(), "v".into()],
            &[(0, 1), (1, 2), (0, 2), (0, 3)],
            &[
                (0, 1, &[1]),
                (0, 2, &[2]),
                (0, 3, &[3]),
                (0, 1, &[2]),
                (0, 2, &[3]),
                (0, 1, &[3]),
                (1, 2, &[2]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        neg.validate().unwrap();
        let ce = neg.check_gen_p().unwrap_err();
        assert_eq!(ce.worlds, vec!["w", "wp", "u"]);
        assert_eq!(ce.set, vec!["v"]);
    }

    #[test]
    fn gen_p_vacuous_on_empty_r() {
        let m = GeneralisedModel::new(vec!["w".into()], &[], &[], BTreeMap::new()).unwrap();
        m.validate().unwrap();
        m.check_gen_p().unwrap();
    }

    #[test]
    fn gen_w_terminal_targets_ok() {
        // All S_w targets are terminal worlds, so R[V'] is empty.
        let m = two_step();
        m.check_gen_w(false).unwrap();
        m.check_gen_w(true).unwrap();
    }

    #[test]
    fn gen_w_counterexample() {
        // u S_w {v}, v R v', and v' S_w {v}: every V' ⊆ {v} has v in it,
        // and R[{v}] = {v'} meets the S_w-preimage of {v}.
        let m = GeneralisedModel::new(
            vec!["w".into(), "u".into(), "v".into(), "vp".into()],
            &[(0, 1), (0, 2), (0, 3), (2, 3)],
            &[
                (0, 1, &[1]),
                (0, 2, &[2]),
                (0, 3, &[3]),
                (0, 2, &[3]),
                (0, 1, &[2]),
                (0, 1, &[3]),
                (0, 3, &[2]),
                (2, 3, &[3]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        m.validate().unwrap();
        let ce = m.check_gen_w(false).unwrap_err();
        assert_eq!(ce.condition, "(W)_gen");
        // the failing entry is u = v with target {vp}? No: (vp, {v}) creates
        // the preimage; the failing generator is (u,{v}) or (vp,{v}).
        assert!(ce.set.contains(&"v".to_string()) || ce.set.contains(&"vp".to_string()));
    }

    #[test]
    fn gen_w_empty_s_ok() {
        let m = GeneralisedModel::new(vec!["w".into()], &[], &[], BTreeMap::new()).unwrap();
        m.check_gen_w(false).unwrap();
        m.check_gen_w(true).unwrap();
    }

    #[test]
    fn json_round_trip() {
        let m = two_step();
        let back = GeneralisedModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back.world_names(), m.world_names());
        for w in 0..m.n_worlds() {
            assert_eq!(back.r_mask(w), m.r_mask(w));
            let mut a = back.listed(w).to_vec();
            let mut b = m.listed(w).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dot_uses_hyperedges() {
        let dot = two_step().to_dot();
        assert!(dot.contains("shape=point"));
        assert!(dot.contains("style=dashed"));
    }
}
