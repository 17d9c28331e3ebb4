//! Finite interaction structures: a carrier with a total composition table,
//! optional identity and inverses, declared dynamics and an optional defect
//! table, together with the defect calculus and closure operations built on
//! top of them.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Position of an element in the carrier's element list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ElementId(pub usize);

impl ElementId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Deterministically ordered subset of a carrier.
pub type ElementSet = BTreeSet<ElementId>;

/// A named total self-map of the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dynamic {
    pub name: String,
    pub map: Vec<ElementId>,
}

impl Dynamic {
    pub fn new(name: impl Into<String>, map: Vec<ElementId>) -> Self {
        Self { name: name.into(), map }
    }

    #[inline]
    pub fn apply(&self, a: ElementId) -> ElementId {
        self.map[a.0]
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        self.map
            .iter()
            .all(|b| b.0 < seen.len() && !std::mem::replace(&mut seen[b.0], true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("no defect calculus: structure '{0}' declares neither inverses nor a defect table")]
    NoDefectCalculus(String),
    #[error("defect table present but no identity declared to serve as the neutral defect value")]
    NoNeutralDefect,
    #[error("iterated defect needs a chain of at least two elements")]
    ChainTooShort,
}

/// How defects are evaluated on a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectMode {
    /// `a⋆b⋆(b⋆a)⁻¹`, associated left to right.
    Commutator,
    /// Lookup in the declared defect table.
    Table,
}

/// A finite carrier with a composition table.
///
/// Tables are stored row-major: `op[a * n + b] = a⋆b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionStructure {
    pub name: String,
    pub elements: Vec<String>,
    pub op: Vec<ElementId>,
    pub identity: Option<ElementId>,
    pub inverses: Option<Vec<ElementId>>,
    pub dynamics: Vec<Dynamic>,
    pub defect_table: Option<Vec<ElementId>>,
}

impl InteractionStructure {
    /// Builds a structure from a composition table given as rows. No
    /// validation happens here; see [`InteractionStructure::validate`].
    pub fn from_rows(name: impl Into<String>, elements: Vec<String>, rows: Vec<Vec<ElementId>>) -> Self {
        Self {
            name: name.into(),
            elements,
            op: rows.into_iter().flatten().collect(),
            identity: None,
            inverses: None,
            dynamics: Vec::new(),
            defect_table: None,
        }
    }

    /// Builds a structure from a composition closure over element indices.
    pub fn from_fn(name: impl Into<String>, elements: Vec<String>, compose: impl Fn(usize, usize) -> usize) -> Self {
        let n = elements.len();
        let mut op = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                op.push(ElementId(compose(a, b)));
            }
        }
        Self {
            name: name.into(),
            elements,
            op,
            identity: None,
            inverses: None,
            dynamics: Vec::new(),
            defect_table: None,
        }
    }

    /// Declares the identity and derives inverses from the table.
    ///
    /// Elements without a two-sided inverse map to themselves, which
    /// validation will then flag.
    pub fn with_group_data(mut self, identity: ElementId) -> Self {
        let n = self.size();
        let inv = (0..n)
            .map(|a| {
                (0..n)
                    .map(ElementId)
                    .find(|&b| self.compose(ElementId(a), b) == identity && self.compose(b, ElementId(a)) == identity)
                    .unwrap_or(ElementId(a))
            })
            .collect();
        self.identity = Some(identity);
        self.inverses = Some(inv);
        self
    }

    pub fn with_dynamic(mut self, dynamic: Dynamic) -> Self {
        self.dynamics.push(dynamic);
        self
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElementId> + Clone {
        (0..self.size()).map(ElementId)
    }

    pub fn all(&self) -> ElementSet {
        self.ids().collect()
    }

    pub fn name_of(&self, a: ElementId) -> &str {
        &self.elements[a.0]
    }

    pub fn find(&self, token: &str) -> Option<ElementId> {
        self.elements.iter().position(|e| e == token).map(ElementId)
    }

    pub fn dynamic(&self, name: &str) -> Option<&Dynamic> {
        self.dynamics.iter().find(|d| d.name == name)
    }

    /// `a⋆b`.
    #[inline]
    pub fn compose(&self, a: ElementId, b: ElementId) -> ElementId {
        self.op[a.0 * self.size() + b.0]
    }

    pub fn inverse(&self, a: ElementId) -> Option<ElementId> {
        self.inverses.as_ref().map(|inv| inv[a.0])
    }

    /// Which defect operator applies. A declared defect table takes
    /// precedence over the commutator.
    pub fn defect_mode(&self) -> Result<DefectMode, StructureError> {
        if self.defect_table.is_some() {
            Ok(DefectMode::Table)
        } else if self.inverses.is_some() && self.identity.is_some() {
            Ok(DefectMode::Commutator)
        } else {
            Err(StructureError::NoDefectCalculus(self.name.clone()))
        }
    }

    /// The value a defect takes when two elements interact rigidly.
    pub fn neutral_defect(&self) -> Result<ElementId, StructureError> {
        self.defect_mode()?;
        self.identity.ok_or(StructureError::NoNeutralDefect)
    }

    /// The defect of `a` against `b`; assumes [`Self::defect_mode`] succeeds.
    #[inline]
    fn defect_unchecked(&self, mode: DefectMode, a: ElementId, b: ElementId) -> ElementId {
        match mode {
            DefectMode::Table => self.defect_table.as_ref().unwrap()[a.0 * self.size() + b.0],
            DefectMode::Commutator => {
                let inv = self.inverses.as_ref().unwrap();
                let ab = self.compose(a, b);
                let ba = self.compose(b, a);
                self.compose(ab, inv[ba.0])
            }
        }
    }

    pub fn defect(&self, a: ElementId, b: ElementId) -> Result<ElementId, StructureError> {
        let mode = self.defect_mode()?;
        Ok(self.defect_unchecked(mode, a, b))
    }

    /// Right-nested defect `[a₁,[a₂,…,[a_{N−1},a_N]…]]`.
    pub fn iterated_defect(&self, chain: &[ElementId]) -> Result<ElementId, StructureError> {
        if chain.len() < 2 {
            return Err(StructureError::ChainTooShort);
        }
        let mode = self.defect_mode()?;
        let (last, rest) = chain.split_last().unwrap();
        Ok(rest
            .iter()
            .rev()
            .fold(*last, |acc, &a| self.defect_unchecked(mode, a, acc)))
    }

    /// Least superset of `seed` (plus the identity, when declared) closed
    /// under composition and defect.
    pub fn closure(&self, seed: &ElementSet) -> Result<ElementSet, StructureError> {
        let mode = self.defect_mode()?;
        Ok(self.closure_with(mode, seed))
    }

    pub(crate) fn closure_with(&self, mode: DefectMode, seed: &ElementSet) -> ElementSet {
        let n = self.size();
        let mut member = vec![false; n];
        let mut members: Vec<ElementId> = Vec::new();
        let push = |x: ElementId, member: &mut Vec<bool>, members: &mut Vec<ElementId>| {
            if !member[x.0] {
                member[x.0] = true;
                members.push(x);
            }
        };
        for &s in seed {
            push(s, &mut member, &mut members);
        }
        if let Some(e) = self.identity {
            push(e, &mut member, &mut members);
        }
        // Worklist saturation: every new element is combined with every
        // element already present, in both orders.
        let mut next = 0;
        while next < members.len() {
            let x = members[next];
            let mut i = 0;
            while i <= next {
                let y = members[i];
                for (a, b) in [(x, y), (y, x)] {
                    push(self.compose(a, b), &mut member, &mut members);
                    push(self.defect_unchecked(mode, a, b), &mut member, &mut members);
                }
                i += 1;
            }
            next += 1;
        }
        members.into_iter().collect()
    }

    /// Closure under composition alone (plus the identity, if declared).
    pub fn compose_closure(&self, seed: &ElementSet) -> ElementSet {
        let n = self.size();
        let mut member = vec![false; n];
        let mut members: Vec<ElementId> = seed.iter().copied().collect();
        members.extend(self.identity);
        members.retain(|x| !std::mem::replace(&mut member[x.0], true));
        let mut next = 0;
        while next < members.len() {
            let x = members[next];
            for i in 0..=next {
                let y = members[i];
                for z in [self.compose(x, y), self.compose(y, x)] {
                    if !member[z.0] {
                        member[z.0] = true;
                        members.push(z);
                    }
                }
            }
            next += 1;
        }
        members.into_iter().collect()
    }

    /// Elements whose defect against every element is neutral.
    pub fn center(&self) -> Result<ElementSet, StructureError> {
        let mode = self.defect_mode()?;
        let e = self.neutral_defect()?;
        Ok(self
            .ids()
            .filter(|&p| self.ids().all(|q| self.defect_unchecked(mode, p, q) == e))
            .collect())
    }

    /// `{ p : defect(p, q) ∈ level for all q }`, evaluated on a resolved mode.
    pub(crate) fn defect_preimage(&self, mode: DefectMode, level: &[bool]) -> Vec<bool> {
        self.ids()
            .map(|p| self.ids().all(|q| level[self.defect_unchecked(mode, p, q).0]))
            .collect()
    }

    pub(crate) fn defect_fast(&self, mode: DefectMode, a: ElementId, b: ElementId) -> ElementId {
        self.defect_unchecked(mode, a, b)
    }

    /// First triple violating associativity, in canonical order.
    pub fn associativity_witness(&self) -> Option<(ElementId, ElementId, ElementId)> {
        for a in self.ids() {
            for b in self.ids() {
                let ab = self.compose(a, b);
                for c in self.ids() {
                    if self.compose(ab, c) != self.compose(a, self.compose(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_associative(&self) -> bool {
        self.associativity_witness().is_none()
    }

    pub fn is_commutative(&self) -> bool {
        self.commutativity_witness().is_none()
    }

    pub fn commutativity_witness(&self) -> Option<(ElementId, ElementId)> {
        self.ids()
            .flat_map(|a| self.ids().map(move |b| (a, b)))
            .find(|&(a, b)| a < b && self.compose(a, b) != self.compose(b, a))
    }

    /// Associative with a valid declared identity and valid declared inverses.
    pub fn is_group_like(&self) -> bool {
        let Some(e) = self.identity else {
            return false;
        };
        let Some(inv) = self.inverses.as_ref() else {
            return false;
        };
        self.ids().all(|a| {
            self.compose(e, a) == a
                && self.compose(a, e) == a
                && self.compose(a, inv[a.0]) == e
                && self.compose(inv[a.0], a) == e
        }) && self.is_associative()
    }

    /// `a` composed with itself `k` times; `k = 0` gives the identity.
    pub fn power(&self, a: ElementId, k: usize) -> ElementId {
        let mut acc = self.identity.unwrap_or(a);
        let start = if self.identity.is_some() { 0 } else { 1 };
        for _ in start..k {
            acc = self.compose(acc, a);
        }
        acc
    }

    /// Order of `a` in a group-like structure.
    pub fn order_of(&self, a: ElementId) -> usize {
        let e = self.identity.expect("order requires an identity");
        let mut x = a;
        let mut k = 1;
        while x != e {
            x = self.compose(x, a);
            k += 1;
            assert!(k <= self.size(), "element without finite order");
        }
        k
    }

    /// Restriction to a subset closed under composition and defect. The
    /// result carries the defect as an explicit table, so it is usable even
    /// when the subset is not closed under inversion.
    pub fn restrict(&self, subset: &ElementSet) -> Result<(InteractionStructure, Vec<ElementId>), StructureError> {
        let mode = self.defect_mode()?;
        let members: Vec<ElementId> = subset.iter().copied().collect();
        let mut local = vec![usize::MAX; self.size()];
        for (i, m) in members.iter().enumerate() {
            local[m.0] = i;
        }
        let to_local = |x: ElementId| ElementId(local[x.0]);
        let mut op = Vec::with_capacity(members.len() * members.len());
        let mut table = Vec::with_capacity(members.len() * members.len());
        for &a in &members {
            for &b in &members {
                op.push(to_local(self.compose(a, b)));
                table.push(to_local(self.defect_unchecked(mode, a, b)));
            }
        }
        let sub = InteractionStructure {
            name: format!("{}|sub", self.name),
            elements: members.iter().map(|&m| self.name_of(m).to_string()).collect(),
            op,
            identity: self.identity.filter(|e| subset.contains(e)).map(to_local),
            inverses: None,
            dynamics: Vec::new(),
            defect_table: Some(table),
        };
        Ok((sub, members))
    }

    /// Checks every structural invariant and reports violations by name.
    pub fn validate(&self) -> ValidationReport {
        let n = self.size();
        let mut violations = Vec::new();

        let mut seen = std::collections::HashSet::new();
        for e in &self.elements {
            if !seen.insert(e.as_str()) {
                violations.push(format!("duplicate element token {e}"));
            }
        }
        if n == 0 {
            violations.push("carrier is empty".to_string());
        }
        let label = |i: usize| -> String { self.elements.get(i).cloned().unwrap_or_else(|| i.to_string()) };

        let mut table_ok = true;
        if self.op.len() != n * n {
            violations.push(format!("op table has {} entries, expected {}", self.op.len(), n * n));
            table_ok = false;
        } else {
            for (i, x) in self.op.iter().enumerate() {
                if x.0 >= n {
                    violations.push(format!("op[{}][{}] names unknown element", label(i / n), label(i % n)));
                    table_ok = false;
                }
            }
        }
        let in_range = |x: ElementId| x.0 < n;

        if let Some(e) = self.identity {
            if !in_range(e) {
                violations.push("identity names unknown element".to_string());
            } else if table_ok {
                for a in self.ids() {
                    if self.compose(e, a) != a || self.compose(a, e) != a {
                        violations.push(format!("identity law fails at {}", label(a.0)));
                    }
                }
            }
        }

        if let Some(inv) = &self.inverses {
            if inv.len() != n {
                violations.push(format!("inverse map has {} entries, expected {n}", inv.len()));
            } else if self.identity.is_none() {
                violations.push("inverses declared without an identity".to_string());
            } else {
                let e = self.identity.unwrap();
                for a in self.ids() {
                    let b = inv[a.0];
                    if !in_range(b) {
                        violations.push(format!("inverse of {} names unknown element", label(a.0)));
                    } else if table_ok && in_range(e) && (self.compose(a, b) != e || self.compose(b, a) != e) {
                        violations.push(format!("inverse law fails at {}", label(a.0)));
                    }
                }
            }
        }

        if let Some(table) = &self.defect_table {
            if table.len() != n * n {
                violations.push(format!("defect table has {} entries, expected {}", table.len(), n * n));
            } else {
                for (i, x) in table.iter().enumerate() {
                    if x.0 >= n {
                        violations.push(format!(
                            "defect[{}][{}] names unknown element",
                            label(i / n),
                            label(i % n)
                        ));
                    }
                }
            }
        }

        let mut dyn_names = std::collections::HashSet::new();
        for d in &self.dynamics {
            if !dyn_names.insert(d.name.as_str()) {
                violations.push(format!("duplicate dynamic {}", d.name));
            }
            if d.map.len() != n {
                violations.push(format!("dynamic {} has {} entries, expected {n}", d.name, d.map.len()));
            } else {
                for (i, x) in d.map.iter().enumerate() {
                    if !in_range(*x) {
                        violations.push(format!("dynamic {}[{}] names unknown element", d.name, label(i)));
                    }
                }
            }
        }

        let (associative, associativity_witness) = if violations.is_empty() {
            let w = self.associativity_witness();
            (w.is_none(), w.map(|(a, b, c)| [label(a.0), label(b.0), label(c.0)]))
        } else {
            (false, None)
        };

        ValidationReport {
            violations,
            associative,
            associativity_witness,
        }
    }
}

/// Outcome of [`InteractionStructure::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Informational only; non-associative structures are accepted.
    pub associative: bool,
    pub associativity_witness: Option<[String; 3]>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "valid")?;
        } else {
            for v in &self.violations {
                writeln!(f, "violation: {v}")?;
            }
        }
        match &self.associativity_witness {
            None if self.is_valid() => writeln!(f, "associative: yes"),
            None => Ok(()),
            Some([a, b, c]) => writeln!(f, "associative: no (({a}⋆{b})⋆{c} ≠ {a}⋆({b}⋆{c}))"),
        }
    }
}
