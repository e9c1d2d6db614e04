//! Ordinary Veltman models: validation, forcing, frame validity and
//! frame-condition checkers for the principles P, M, M0, R and W.
//!
//! Worlds are stored as indices with bitmask relations; a model holds at
//! most 64 worlds, which is far beyond anything the bounded search or the
//! harnesses materialize. Converse well-foundedness of `R` is implemented
//! as acyclicity, which is equivalent on finite carriers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;

pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone)]
pub struct OrdinaryModel {
    names: Vec<String>,
    name_index: HashMap<String, usize>,
    /// `r[w]` is the bitmask of R-successors of `w`.
    r: Vec<u64>,
    /// `s[w][u]` is the bitmask of worlds `v` with `u S_w v`.
    s: Vec<Vec<u64>>,
    valuation: BTreeMap<String, u64>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model file has type `{0}`, expected `ordinary`")]
    WrongKind(String),
    #[error("duplicate world id `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world id `{0}`")]
    UnknownWorld(String),
    #[error("model has {0} worlds, at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// First violated frame clause, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RCycle(Vec<String>),
    RNotTransitive(String, String, String),
    SOutsideR { w: String, u: String, v: String },
    SNotReflexive { w: String, u: String },
    SNotTransitive { w: String, a: String, b: String, c: String },
    SMissingRPair { w: String, u: String, v: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RCycle(cycle) => write!(f, "R has a cycle: {}", cycle.join(" -> ")),
            Violation::RNotTransitive(w, u, v) => {
                write!(f, "R not transitive: {w} R {u} R {v} but not {w} R {v}")
            }
            Violation::SOutsideR { w, u, v } => {
                write!(f, "S_{w} contains ({u},{v}) outside R[{w}]^2")
            }
            Violation::SNotReflexive { w, u } => {
                write!(f, "S_{w} not reflexive on R[{w}]: missing ({u},{u})")
            }
            Violation::SNotTransitive { w, a, b, c } => {
                write!(f, "S_{w} not transitive: {a} S {b} S {c} but not {a} S {c}")
            }
            Violation::SMissingRPair { w, u, v } => {
                write!(f, "S_{w} misses the R-pair ({u},{v}) with {w} R {u} R {v}")
            }
        }
    }
}

/// Frame-condition principles with a first-order (or, for W, acyclicity)
/// characterisation on finite frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Principle {
    P,
    M,
    M0,
    R,
    W,
}

impl Principle {
    pub const ALL: [Principle; 5] = [
        Principle::P,
        Principle::M,
        Principle::M0,
        Principle::R,
        Principle::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Principle::P => "P",
            Principle::M => "M",
            Principle::M0 => "M0",
            Principle::R => "R",
            Principle::W => "W",
        }
    }
}

impl std::str::FromStr for Principle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" => Ok(Principle::P),
            "M" => Ok(Principle::M),
            "M0" => Ok(Principle::M0),
            "R" => Ok(Principle::R),
            "W" => Ok(Principle::W),
            other => Err(format!("unknown principle `{other}`")),
        }
    }
}

/// Witness tuple for a failed frame condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub principle: Principle,
    pub worlds: Vec<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {} fails at ({})",
            self.principle.name(),
            self.worlds.join(", ")
        )
    }
}

#[derive(Debug, Error)]
pub enum FrameValidityError {
    #[error("exhaustive sweep needs {bits} valuation bits, cap is {cap}")]
    CapExceeded { bits: usize, cap: usize },
}

impl OrdinaryModel {
    pub fn new(
        names: Vec<String>,
        r_pairs: &[(usize, usize)],
        s_pairs: &[(usize, usize, usize)],
        valuation: BTreeMap<String, Vec<usize>>,
    ) -> Result<OrdinaryModel, ModelError> {
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
        let mut s = vec![vec![0u64; n]; n];
        for &(w, u, v) in s_pairs {
            s[w][u] |= 1 << v;
        }
        let valuation = valuation
            .into_iter()
            .map(|(var, worlds)| {
                let mask = worlds.iter().fold(0u64, |m, &w| m | (1 << w));
                (var, mask)
            })
            .collect();
        Ok(OrdinaryModel {
            names,
            name_index,
            r,
            s,
            valuation,
        })
    }

    /// Model built straight from bitmasks; used by the enumeration in
    /// `decide` and by the random generators.
    pub fn from_masks(r: Vec<u64>, s: Vec<Vec<u64>>, valuation: BTreeMap<String, u64>) -> Self {
        let n = r.len();
        let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        let name_index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        OrdinaryModel {
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

    pub fn world_name(&self, idx: usize) -> &str {
        &self.names[idx]
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

    pub fn r_contains(&self, w: usize, u: usize) -> bool {
        self.r[w] >> u & 1 == 1
    }

    pub fn s_mask(&self, w: usize, u: usize) -> u64 {
        self.s[w][u]
    }

    pub fn s_contains(&self, w: usize, u: usize, v: usize) -> bool {
        self.s[w][u] >> v & 1 == 1
    }

    pub fn valuation(&self) -> &BTreeMap<String, u64> {
        &self.valuation
    }

    pub fn set_valuation_mask(&mut self, var: &str, mask: u64) {
        self.valuation.insert(var.to_string(), mask);
    }

    pub fn remove_s_pair(&mut self, w: usize, u: usize, v: usize) {
        self.s[w][u] &= !(1u64 << v);
    }

    pub fn add_s_pair(&mut self, w: usize, u: usize, v: usize) {
        self.s[w][u] |= 1 << v;
    }

    fn all_mask(&self) -> u64 {
        if self.n_worlds() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_worlds()) - 1
        }
    }

    // -- validation ---------------------------------------------------------

    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.n_worlds();
        if let Some(cycle) = self.find_r_cycle() {
            return Err(Violation::RCycle(
                cycle.into_iter().map(|i| self.names[i].clone()).collect(),
            ));
        }
        for w in 0..n {
            for u in bits(self.r[w]) {
                let missing = self.r[u] & !self.r[w];
                if missing != 0 {
                    let v = missing.trailing_zeros() as usize;
                    return Err(Violation::RNotTransitive(
                        self.names[w].clone(),
                        self.names[u].clone(),
                        self.names[v].clone(),
                    ));
                }
            }
        }
        for w in 0..n {
            let rw = self.r[w];
            for u in 0..n {
                let outside = self.s[w][u] & !rw;
                if outside != 0 || (self.s[w][u] != 0 && rw >> u & 1 == 0) {
                    let v = if outside != 0 {
                        outside.trailing_zeros() as usize
                    } else {
                        self.s[w][u].trailing_zeros() as usize
                    };
                    return Err(Violation::SOutsideR {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                        v: self.names[v].clone(),
                    });
                }
            }
            for u in bits(rw) {
                if !self.s_contains(w, u, u) {
                    return Err(Violation::SNotReflexive {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                    });
                }
            }
            for a in bits(rw) {
                for b in bits(self.s[w][a]) {
                    let missing = self.s[w][b] & !self.s[w][a];
                    if missing != 0 {
                        let c = missing.trailing_zeros() as usize;
                        return Err(Violation::SNotTransitive {
                            w: self.names[w].clone(),
                            a: self.names[a].clone(),
                            b: self.names[b].clone(),
                            c: self.names[c].clone(),
                        });
                    }
                }
            }
            for u in bits(rw) {
                let missing = (self.r[u] & rw) & !self.s[w][u];
                if missing != 0 {
                    let v = missing.trailing_zeros() as usize;
                    return Err(Violation::SMissingRPair {
                        w: self.names[w].clone(),
                        u: self.names[u].clone(),
                        v: self.names[v].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn find_r_cycle(&self) -> Option<Vec<usize>> {
        find_cycle(self.n_worlds(), |w| self.r[w])
    }

    // -- forcing ------------------------------------------------------------

    /// Bitmask of worlds forcing `f` under the model's own valuation.
    pub fn eval(&self, f: &Formula) -> u64 {
        self.eval_with(f, &self.valuation)
    }

    /// Bitmask of worlds forcing `f` under an explicit valuation. Variables
    /// missing from the valuation are false everywhere.
    pub fn eval_with(&self, f: &Formula, val: &BTreeMap<String, u64>) -> u64 {
        let all = self.all_mask();
        match f {
            Formula::Bot => 0,
            Formula::Var(v) => val.get(v).copied().unwrap_or(0) & all,
            Formula::Implies(a, b) => {
                (!self.eval_with(a, val) | self.eval_with(b, val)) & all
            }
            Formula::Box_(a) => {
                let am = self.eval_with(a, val);
                let mut out = 0u64;
                for w in 0..self.n_worlds() {
                    if self.r[w] & !am == 0 {
                        out |= 1 << w;
                    }
                }
                out
            }
            Formula::Rhd(a, b) => {
                let am = self.eval_with(a, val);
                let bm = self.eval_with(b, val);
                let mut out = 0u64;
                for w in 0..self.n_worlds() {
                    let mut ok = true;
                    for u in bits(self.r[w] & am) {
                        if self.s[w][u] & bm == 0 {
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

    // -- frame validity -----------------------------------------------------

    /// True iff `f` is forced at every world under every valuation of
    /// `vars` on this frame (the model's own valuation is ignored).
    /// Exhaustive sweep; errors out when `|W| * |vars|` exceeds `cap`.
    pub fn frame_valid(
        &self,
        f: &Formula,
        vars: &[String],
        cap: usize,
    ) -> Result<bool, FrameValidityError> {
        let bits_needed = self.n_worlds() * vars.len();
        if bits_needed > cap {
            return Err(FrameValidityError::CapExceeded {
                bits: bits_needed,
                cap,
            });
        }
        let all = self.all_mask();
        let n = self.n_worlds();
        let mut val: BTreeMap<String, u64> = BTreeMap::new();
        for assignment in 0u64..(1u64 << bits_needed) {
            for (j, var) in vars.iter().enumerate() {
                let mask = (assignment >> (j * n)) & all;
                val.insert(var.clone(), mask);
            }
            if self.eval_with(f, &val) != all {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Randomized variant of `frame_valid` for frames beyond the exhaustive
    /// cap: samples `samples` valuations. Can only refute validity.
    pub fn frame_valid_sampled(
        &self,
        f: &Formula,
        vars: &[String],
        samples: usize,
        rng: &mut impl rand::Rng,
    ) -> bool {
        let all = self.all_mask();
        let mut val: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..samples {
            for var in vars {
                val.insert(var.clone(), rng.random::<u64>() & all);
            }
            if self.eval_with(f, &val) != all {
                return false;
            }
        }
        true
    }

    // -- frame conditions ----------------------------------------------------

    pub fn check_condition(&self, principle: Principle) -> Result<(), Counterexample> {
        self.check_condition_indices(principle)
            .map_err(|worlds| Counterexample {
                principle,
                worlds: worlds.into_iter().map(|i| self.names[i].clone()).collect(),
            })
    }

    /// Index-level variant of `check_condition`.
    pub fn check_condition_indices(&self, principle: Principle) -> Result<(), Vec<usize>> {
        let n = self.n_worlds();
        let ce = |worlds: Vec<usize>| worlds;
        match principle {
            // wRw'RuS_wv => uS_{w'}v
            Principle::P => {
                for w in 0..n {
                    for wp in bits(self.r[w]) {
                        for u in bits(self.r[wp]) {
                            for v in bits(self.s[w][u]) {
                                if !self.s_contains(wp, u, v) {
                                    return Err(ce(vec![w, wp, u, v]));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
            // wRuS_wvRz => uRz
            Principle::M => {
                for w in 0..n {
                    for u in bits(self.r[w]) {
                        for v in bits(self.s[w][u]) {
                            let missing = self.r[v] & !self.r[u];
                            if missing != 0 {
                                let z = missing.trailing_zeros() as usize;
                                return Err(ce(vec![w, u, v, z]));
                            }
                        }
                    }
                }
                Ok(())
            }
            // wRuRxS_wvRz => uRz
            Principle::M0 => {
                for w in 0..n {
                    for u in bits(self.r[w]) {
                        for x in bits(self.r[u]) {
                            for v in bits(self.s[w][x]) {
                                let missing = self.r[v] & !self.r[u];
                                if missing != 0 {
                                    let z = missing.trailing_zeros() as usize;
                                    return Err(ce(vec![w, u, x, v, z]));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
            // wRxRyS_wy'Rz => yS_xz
            Principle::R => {
                for w in 0..n {
                    for x in bits(self.r[w]) {
                        for y in bits(self.r[x]) {
                            for yp in bits(self.s[w][y]) {
                                let missing = self.r[yp] & !self.s[x][y];
                                if missing != 0 {
                                    let z = missing.trailing_zeros() as usize;
                                    return Err(ce(vec![w, x, y, yp, z]));
                                }
                            }
                        }
                    }
                }
                Ok(())
            }
            // per w, acyclicity of { (x,x') : exists y. x S_w y R x' }
            Principle::W => {
                for w in 0..n {
                    let composed: Vec<u64> = (0..n)
                        .map(|x| bits(self.s[w][x]).fold(0u64, |acc, y| acc | self.r[y]))
                        .collect();
                    if let Some(mut cycle) = find_cycle(n, |x| composed[x]) {
                        let mut worlds = vec![w];
                        worlds.append(&mut cycle);
                        return Err(ce(worlds));
                    }
                }
                Ok(())
            }
        }
    }

    // -- serialization -------------------------------------------------------

    pub fn to_json(&self) -> String {
        let file = OrdinaryModelFile {
            kind: "ordinary".to_string(),
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
                    let mut pairs = Vec::new();
                    for u in 0..self.n_worlds() {
                        for v in bits(self.s[w][u]) {
                            pairs.push((self.names[u].clone(), self.names[v].clone()));
                        }
                    }
                    if !pairs.is_empty() {
                        map.insert(self.names[w].clone(), pairs);
                    }
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

    pub fn from_json(text: &str) -> Result<OrdinaryModel, ModelError> {
        let file: OrdinaryModelFile = serde_json::from_str(text)?;
        if file.kind != "ordinary" {
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
        let mut s = vec![vec![0u64; names.len()]; names.len()];
        for (w, pairs) in &file.s {
            let w = look(w)?;
            for (u, v) in pairs {
                s[w][look(u)?] |= 1 << look(v)?;
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
        Ok(OrdinaryModel {
            names,
            name_index,
            r,
            s,
            valuation,
        })
    }

    /// DOT rendering: R solid, S_w dashed and labelled with w, worlds
    /// annotated with their true variables. Stable output order.
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
        for w in 0..self.n_worlds() {
            for u in 0..self.n_worlds() {
                for v in bits(self.s[w][u]) {
                    if u == v {
                        continue; // omit reflexive S edges, they are mandatory
                    }
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\" [style=dashed, label=\"{}\"];\n",
                        self.names[u], self.names[v], self.names[w]
                    ));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
struct OrdinaryModelFile {
    #[serde(rename = "type")]
    kind: String,
    worlds: Vec<String>,
    #[serde(rename = "R")]
    r: Vec<(String, String)>,
    #[serde(rename = "S", default)]
    s: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
}

/// Iterate set bit positions of a mask, ascending.
pub fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Find a cycle in the successor relation given by `succ`, if any.
/// Returns the cycle as a world list starting and ending at the same node.
pub(crate) fn find_cycle(n: usize, succ: impl Fn(usize) -> u64) -> Option<Vec<usize>> {
    // colors: 0 unvisited, 1 on stack, 2 done
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, succ(start))];
        color[start] = 1;
        while let Some((node, rest)) = stack.pop() {
            let mut m = rest;
            if m == 0 {
                color[node] = 2;
                continue;
            }
            let next = m.trailing_zeros() as usize;
            m &= m - 1;
            stack.push((node, m));
            match color[next] {
                0 => {
                    color[next] = 1;
                    parent[next] = node;
                    stack.push((next, succ(next)));
                }
                1 => {
                    // unwind the path node -> ... -> next
                    let mut cycle = vec![next];
                    let mut at = node;
                    while at != next && at != usize::MAX {
                        cycle.push(at);
                        at = parent[at];
                    }
                    cycle.push(next);
                    cycle.reverse();
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}
