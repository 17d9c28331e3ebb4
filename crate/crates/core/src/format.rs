//! Structure and module files.
//!
//! A structure file is a sequence of bracketed sections; `#` starts a
//! comment and blank lines are ignored.
//!
//! ```text
//! [structure]
//! name = Z4
//! elements = 0 1 2 3
//! identity = 0
//! inverses = 0 3 2 1
//!
//! [op]
//! 0 1 2 3
//! 1 2 3 0
//! 2 3 0 1
//! 3 0 1 2
//!
//! [dynamic inv]
//! 0 3 2 1
//!
//! [dual]
//! a b
//!
//! [pairing]
//! 0 0
//! 0 1/2
//! 0 0
//! 0 1/2
//! ```
//!
//! `[defect]` holds an optional defect table in the same shape as `[op]`.
//! Each `[dynamic NAME]` lists the image of every element in element order.
//! `[pairing]` has one row per element and one reduced angle `p/q` (or `0`)
//! per label.
//!
//! A module file declares `[module]` with `dimension` and `conductor`, one
//! `[matrix TOKEN]` block per element and optional `[action NAME]` blocks,
//! with entries in scalar syntax such as `1/2-z^3`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::criterion::InputBundle;
use crate::decomposition::ModuleRep;
use crate::duality::{DualObject, Pairing};
use crate::phase::{Angle, CycloMatrix, CyclotomicField, CyclotomicScalar, MAX_CONDUCTOR};
use crate::structure::{Dynamic, ElementId, InteractionStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 for errors about the document as a whole.
    pub line: usize,
    pub message: String,
}

/// Characters that may not appear in element, label or dynamic tokens.
const RESERVED: &[char] = &['{', '}', ',', '=', '[', ']', '#'];

pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty() && !token.chars().any(|c| c.is_whitespace() || RESERVED.contains(&c))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Header {
    Structure,
    Op,
    Defect,
    Dynamic(String),
    Dual,
    Pairing,
    Module,
    Matrix(String),
    Action(String),
}

impl fmt::Display for Header {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Header::Structure => write!(f, "[structure]"),
            Header::Op => write!(f, "[op]"),
            Header::Defect => write!(f, "[defect]"),
            Header::Dynamic(n) => write!(f, "[dynamic {n}]"),
            Header::Dual => write!(f, "[dual]"),
            Header::Pairing => write!(f, "[pairing]"),
            Header::Module => write!(f, "[module]"),
            Header::Matrix(t) => write!(f, "[matrix {t}]"),
            Header::Action(n) => write!(f, "[action {n}]"),
        }
    }
}

struct Section<'t> {
    header: Header,
    line: usize,
    body: Vec<(usize, &'t str)>,
}

#[derive(Default)]
struct Errors(Vec<ParseError>);

impl Errors {
    fn push(&mut self, line: usize, message: impl Into<String>) {
        self.0.push(ParseError {
            line,
            message: message.into(),
        });
    }

    fn finish<T>(mut self, value: impl FnOnce() -> T) -> Result<T, Vec<ParseError>> {
        if self.0.is_empty() {
            Ok(value())
        } else {
            self.0.sort_by_key(|e| e.line);
            Err(self.0)
        }
    }
}

fn parse_header(inner: &str, allowed: &[&str]) -> Result<Header, String> {
    let words: Vec<&str> = inner.split_whitespace().collect();
    let header = match words.as_slice() {
        ["structure"] => Header::Structure,
        ["op"] => Header::Op,
        ["defect"] => Header::Defect,
        ["dual"] => Header::Dual,
        ["pairing"] => Header::Pairing,
        ["module"] => Header::Module,
        ["dynamic", n] => Header::Dynamic(n.to_string()),
        ["matrix", t] => Header::Matrix(t.to_string()),
        ["action", n] => Header::Action(n.to_string()),
        _ => return Err(format!("unknown section [{inner}]")),
    };
    let kind = words[0];
    if !allowed.contains(&kind) {
        return Err(format!("section [{kind}] does not belong in this file"));
    }
    if let [_, name] = words.as_slice() {
        if !is_valid_token(name) {
            return Err(format!("invalid token '{name}'"));
        }
    }
    Ok(header)
}

/// Splits a document into sections, reporting stray content, unknown and
/// duplicate sections.
fn split_sections<'t>(text: &'t str, allowed: &[&str], errors: &mut Errors) -> Vec<Section<'t>> {
    let mut sections: Vec<Section<'t>> = Vec::new();
    let mut first_line: HashMap<Header, usize> = HashMap::new();
    // Lines after a rejected header are swallowed rather than reported again.
    let mut in_rejected = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            in_rejected = true;
            let Some(inner) = rest.strip_suffix(']') else {
                errors.push(line, "unterminated section header");
                continue;
            };
            match parse_header(inner, allowed) {
                Ok(header) => {
                    if let Some(&first) = first_line.get(&header) {
                        errors.push(line, format!("duplicate section {header} (first at line {first})"));
                        continue;
                    }
                    first_line.insert(header.clone(), line);
                    in_rejected = false;
                    sections.push(Section {
                        header,
                        line,
                        body: Vec::new(),
                    });
                }
                Err(message) => errors.push(line, message),
            }
            continue;
        }
        match sections.last_mut() {
            Some(s) if !in_rejected => s.body.push((line, content)),
            Some(_) => {}
            None => {
                errors.push(line, "content outside any section");
                in_rejected = true;
            }
        }
    }
    sections
}

/// `key = value` lines of a header section.
fn key_values<'t>(section: &Section<'t>, known: &[&str], errors: &mut Errors) -> BTreeMap<&'t str, (usize, &'t str)> {
    let mut out = BTreeMap::new();
    for &(line, content) in &section.body {
        let Some((key, value)) = content.split_once('=') else {
            errors.push(line, format!("expected 'key = value' in {}", section.header));
            continue;
        };
        let key = key.trim();
        if !known.contains(&key) {
            errors.push(line, format!("unknown key '{key}' in {}", section.header));
            continue;
        }
        if out.insert(key, (line, value.trim())).is_some() {
            errors.push(line, format!("duplicate key '{key}'"));
        }
    }
    out
}

/// Parses a rectangular grid, reporting every ragged row and bad cell.
fn grid<T>(
    section: &Section<'_>,
    rows: usize,
    cols: usize,
    errors: &mut Errors,
    mut cell: impl FnMut(&str, usize, &mut Errors) -> Option<T>,
) -> Option<Vec<Vec<T>>> {
    let mut ok = true;
    if section.body.len() != rows {
        errors.push(
            section.line,
            format!("{} has {} rows, expected {rows}", section.header, section.body.len()),
        );
        ok = false;
    }
    let mut out = Vec::with_capacity(rows.min(section.body.len()));
    for &(line, content) in &section.body {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != cols {
            errors.push(
                line,
                format!(
                    "ragged row at line {line} (expected {cols} entries, found {})",
                    tokens.len()
                ),
            );
            ok = false;
            continue;
        }
        let mut row = Vec::with_capacity(cols);
        for t in tokens {
            match cell(t, line, errors) {
                Some(v) => row.push(v),
                None => ok = false,
            }
        }
        out.push(row);
    }
    ok.then_some(out)
}

struct Elements {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Elements {
    fn resolve(&self, token: &str, line: usize, errors: &mut Errors) -> Option<ElementId> {
        match self.index.get(token) {
            Some(&i) => Some(ElementId(i)),
            None => {
                errors.push(line, format!("unknown element '{token}'"));
                None
            }
        }
    }

    fn row(&self, value: &str, line: usize, what: &str, errors: &mut Errors) -> Option<Vec<ElementId>> {
        let tokens: Vec<&str> = value.split_whitespace().collect();
        if tokens.len() != self.names.len() {
            errors.push(
                line,
                format!(
                    "ragged row at line {line} ({what}: expected {} entries, found {})",
                    self.names.len(),
                    tokens.len()
                ),
            );
            return None;
        }
        let resolved: Vec<Option<ElementId>> = tokens.iter().map(|t| self.resolve(t, line, errors)).collect();
        resolved.into_iter().collect()
    }
}

fn element_list(value: &str, line: usize, errors: &mut Errors) -> Option<Elements> {
    let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        errors.push(line, "elements list is empty");
        return None;
    }
    let mut index = HashMap::new();
    let mut ok = true;
    for (i, n) in names.iter().enumerate() {
        if !is_valid_token(n) {
            errors.push(line, format!("invalid token '{n}'"));
            ok = false;
        } else if index.insert(n.clone(), i).is_some() {
            errors.push(line, format!("duplicate element '{n}'"));
            ok = false;
        }
    }
    ok.then_some(Elements { names, index })
}

/// Parses a structure file. Parsing never stops at the first problem: every
/// error found is reported, each with its line number.
pub fn parse_structure(text: &str) -> Result<InputBundle, Vec<ParseError>> {
    let mut errors = Errors::default();
    let sections = split_sections(
        text,
        &["structure", "op", "defect", "dynamic", "dual", "pairing"],
        &mut errors,
    );
    let find = |h: &Header| sections.iter().find(|s| &s.header == h);

    let Some(head) = find(&Header::Structure) else {
        errors.push(0, "missing [structure] section");
        return errors.finish(|| unreachable!());
    };
    let keys = key_values(head, &["name", "elements", "identity", "inverses"], &mut errors);
    let name = match keys.get("name") {
        Some(&(line, "")) => {
            errors.push(line, "empty name");
            None
        }
        Some(&(_, v)) => Some(v.to_string()),
        None => {
            errors.push(head.line, "missing key 'name'");
            None
        }
    };
    let Some(elements) = (match keys.get("elements") {
        Some(&(line, v)) => element_list(v, line, &mut errors),
        None => {
            errors.push(head.line, "missing key 'elements'");
            None
        }
    }) else {
        return errors.finish(|| unreachable!());
    };
    let n = elements.names.len();
    let identity = keys
        .get("identity")
        .map(|&(line, v)| (line, elements.resolve(v, line, &mut errors)));
    let inverses = keys
        .get("inverses")
        .map(|&(line, v)| (line, elements.row(v, line, "inverses", &mut errors)));
    if let (Some((line, _)), None) = (&inverses, &identity) {
        errors.push(*line, "inverses declared without an identity");
    }

    let table = |h: Header, errors: &mut Errors| -> Option<Option<Vec<ElementId>>> {
        match find(&h) {
            None => Some(None),
            Some(s) => grid(s, n, n, errors, |t, line, e| elements.resolve(t, line, e))
                .map(|rows| Some(rows.into_iter().flatten().collect())),
        }
    };
    let op = match find(&Header::Op) {
        Some(_) => table(Header::Op, &mut errors).flatten(),
        None => {
            errors.push(0, "missing [op] section");
            None
        }
    };
    let defect = table(Header::Defect, &mut errors);

    let mut dynamics = Vec::new();
    for s in sections.iter() {
        if let Header::Dynamic(dyn_name) = &s.header {
            if let Some(rows) = grid(s, 1, n, &mut errors, |t, line, e| elements.resolve(t, line, e)) {
                dynamics.push(Dynamic::new(dyn_name.clone(), rows.into_iter().flatten().collect()));
            }
        }
    }

    let dual = find(&Header::Dual);
    let pairing = find(&Header::Pairing);
    let declared = match (dual, pairing) {
        (None, None) => None,
        (Some(d), None) => {
            errors.push(d.line, "[dual] without [pairing]");
            None
        }
        (None, Some(p)) => {
            errors.push(p.line, "[pairing] without [dual]");
            None
        }
        (Some(d), Some(p)) => {
            let labels: Option<Vec<String>> = match d.body.as_slice() {
                [(line, content)] => {
                    let labels: Vec<String> = content.split_whitespace().map(str::to_string).collect();
                    let mut seen = std::collections::HashSet::new();
                    let mut ok = true;
                    for l in &labels {
                        if !is_valid_token(l) {
                            errors.push(*line, format!("invalid token '{l}'"));
                            ok = false;
                        } else if !seen.insert(l.clone()) {
                            errors.push(*line, format!("duplicate label '{l}'"));
                            ok = false;
                        }
                    }
                    ok.then_some(labels)
                }
                [] => {
                    errors.push(d.line, "[dual] declares no labels");
                    None
                }
                [_, (line, _), ..] => {
                    errors.push(*line, "[dual] must be a single line of labels");
                    None
                }
            };
            labels.and_then(|labels| {
                let rows = grid(p, n, labels.len(), &mut errors, |t, line, e| match t.parse::<Angle>() {
                    Ok(a) => Some(a),
                    Err(err) => {
                        e.push(line, err.to_string());
                        None
                    }
                })?;
                Some((DualObject::new(labels), Pairing::new(rows)))
            })
        }
    };

    errors.finish(|| {
        let structure = InteractionStructure {
            name: name.expect("checked"),
            elements: elements.names,
            op: op.expect("checked"),
            identity: identity.and_then(|(_, e)| e),
            inverses: inverses.and_then(|(_, i)| i),
            dynamics,
            defect_table: defect.flatten(),
        };
        let bundle = InputBundle::new(structure);
        match declared {
            Some((dual, pairing)) => bundle.with_dual(dual, pairing),
            None => bundle,
        }
    })
}

/// As [`parse_structure`], for raw bytes that may not be UTF-8.
pub fn parse_structure_bytes(bytes: &[u8]) -> Result<InputBundle, Vec<ParseError>> {
    parse_structure(utf8(bytes)?)
}

fn utf8(bytes: &[u8]) -> Result<&str, Vec<ParseError>> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = &bytes[..e.valid_up_to()];
        let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
        vec![ParseError {
            line,
            message: "invalid UTF-8".into(),
        }]
    })
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical text of a bundle: fixed section order, single spaces, one blank
/// line between sections and a trailing newline.
pub fn serialize_structure(bundle: &InputBundle) -> String {
    let s = &bundle.structure;
    let n = s.size();
    let name = |e: &ElementId| s.name_of(*e);
    let mut blocks = Vec::new();

    let mut head = format!("[structure]\nname = {}\nelements = {}\n", s.name, s.elements.join(" "));
    if let Some(e) = s.identity {
        head.push_str(&format!("identity = {}\n", name(&e)));
    }
    if let Some(inv) = &s.inverses {
        head.push_str(&format!("inverses = {}\n", join(inv.iter().map(name))));
    }
    blocks.push(head);

    let table = |title: &str, t: &[ElementId]| {
        let mut out = format!("[{title}]\n");
        for row in t.chunks(n.max(1)) {
            out.push_str(&join(row.iter().map(name)));
            out.push('\n');
        }
        out
    };
    blocks.push(table("op", &s.op));
    if let Some(d) = &s.defect_table {
        blocks.push(table("defect", d));
    }
    for g in &s.dynamics {
        blocks.push(format!("[dynamic {}]\n{}\n", g.name, join(g.map.iter().map(name))));
    }
    if let Some(d) = &bundle.declared {
        blocks.push(format!("[dual]\n{}\n", d.dual.labels.join(" ")));
        let mut out = "[pairing]\n".to_string();
        for row in d.pairing.rows() {
            out.push_str(&join(row));
            out.push('\n');
        }
        blocks.push(out);
    }
    blocks.join("\n")
}

/// Parses a module file whose matrices are keyed by the structure's element
/// tokens.
pub fn parse_module(text: &str, structure: &InteractionStructure) -> Result<ModuleRep, Vec<ParseError>> {
    let mut errors = Errors::default();
    let sections = split_sections(text, &["module", "matrix", "action"], &mut errors);
    let Some(head) = sections.iter().find(|s| s.header == Header::Module) else {
        errors.push(0, "missing [module] section");
        return errors.finish(|| unreachable!());
    };
    let keys = key_values(head, &["dimension", "conductor"], &mut errors);
    let number = |key: &str, errors: &mut Errors| -> Option<u64> {
        match keys.get(key) {
            None => {
                errors.push(head.line, format!("missing key '{key}'"));
                None
            }
            Some(&(line, v)) => match v.parse::<u64>() {
                Ok(x) if x >= 1 => Some(x),
                _ => {
                    errors.push(line, format!("{key} must be a positive integer, found '{v}'"));
                    None
                }
            },
        }
    };
    let dimension = number("dimension", &mut errors);
    let conductor = number("conductor", &mut errors).filter(|&m| {
        let ok = m <= MAX_CONDUCTOR;
        if !ok {
            errors.push(
                keys["conductor"].0,
                format!("conductor {m} exceeds the supported maximum {MAX_CONDUCTOR}"),
            );
        }
        ok
    });
    let (Some(dimension), Some(conductor)) = (dimension, conductor) else {
        return errors.finish(|| unreachable!());
    };
    let dimension = dimension as usize;
    let field = CyclotomicField::new(conductor);

    let block = |s: &Section<'_>, errors: &mut Errors| -> Option<CycloMatrix> {
        let rows = grid(
            s,
            dimension,
            dimension,
            errors,
            |t, line, e| match CyclotomicScalar::parse(&field, t) {
                Ok(x) => Some(x),
                Err(err) => {
                    e.push(line, err.to_string());
                    None
                }
            },
        )?;
        CycloMatrix::from_rows(&field, rows).ok()
    };

    let mut matrices: Vec<Option<CycloMatrix>> = vec![None; structure.size()];
    let mut actions = Vec::new();
    for s in &sections {
        match &s.header {
            Header::Matrix(token) => match structure.find(token) {
                Some(p) => matrices[p.0] = block(s, &mut errors),
                None => errors.push(s.line, format!("unknown element '{token}'")),
            },
            Header::Action(name) => {
                if structure.dynamic(name).is_none() {
                    errors.push(s.line, format!("unknown dynamic '{name}'"));
                } else if let Some(m) = block(s, &mut errors) {
                    actions.push((name.clone(), m));
                }
            }
            _ => {}
        }
    }
    for p in structure.ids() {
        let declared = sections
            .iter()
            .any(|s| s.header == Header::Matrix(structure.name_of(p).to_string()));
        if !declared {
            errors.push(head.line, format!("missing [matrix {}]", structure.name_of(p)));
        }
    }
    errors.finish(|| ModuleRep {
        dimension,
        field: Arc::clone(&field),
        matrices: matrices.into_iter().map(|m| m.expect("checked")).collect(),
        actions,
    })
}

/// As [`parse_module`], for raw bytes that may not be UTF-8.
pub fn parse_module_bytes(bytes: &[u8], structure: &InteractionStructure) -> Result<ModuleRep, Vec<ParseError>> {
    parse_module(utf8(bytes)?, structure)
}

pub fn serialize_module(rep: &ModuleRep, structure: &InteractionStructure) -> String {
    let matrix = |m: &CycloMatrix| {
        let mut out = String::new();
        for i in 0..m.rows() {
            out.push_str(&join(m.row(i)));
            out.push('\n');
        }
        out
    };
    let mut blocks = vec![format!(
        "[module]\ndimension = {}\nconductor = {}\n",
        rep.dimension,
        rep.conductor()
    )];
    for p in structure.ids() {
        blocks.push(format!("[matrix {}]\n{}", structure.name_of(p), matrix(rep.matrix(p))));
    }
    for (name, m) in &rep.actions {
        blocks.push(format!("[action {name}]\n{}", matrix(m)));
    }
    blocks.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::character_group;
    use crate::library;

    const Z4: &str = "\
# cyclic group of order four
[structure]
name = Z4
elements = 0 1 2 3
identity = 0
inverses = 0 3 2 1

[op]
0 1 2 3
1 2 3 0
2 3 0 1
3 0 1 2   # last row
";

    fn messages(r: Result<InputBundle, Vec<ParseError>>) -> Vec<String> {
        r.unwrap_err().into_iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn z4_document() {
        let b = parse_structure(Z4).unwrap();
        assert_eq!(b.structure, library::cyclic(4));
        assert!(b.declared.is_none());
    }

    #[test]
    fn ragged_row() {
        let text = Z4.replace("2 3 0 1", "2 3 0");
        assert_eq!(
            messages(parse_structure(&text)),
            vec!["line 11: ragged row at line 11 (expected 4 entries, found 3)"]
        );
    }

    #[test]
    fn unreduced_fraction() {
        let text = format!("{Z4}\n[dual]\nx\n\n[pairing]\n0\n2/4\n0\n1/2\n");
        let m = messages(parse_structure(&text));
        assert_eq!(m.len(), 1);
        assert!(m[0].contains("fraction not reduced"), "{m:?}");
        assert_eq!(m[0], "line 19: fraction not reduced: '2/4'");
    }

    #[test]
    fn reports_every_error() {
        let text = "\
stray
[structure]
name = bad
elements = a b a
colour = red
[op]
a b
[op]
[mystery]
";
        let m = messages(parse_structure(text));
        assert!(m.iter().any(|e| e == "line 1: content outside any section"), "{m:?}");
        assert!(m.iter().any(|e| e.contains("duplicate element 'a'")), "{m:?}");
        assert!(m.iter().any(|e| e.contains("unknown key 'colour'")), "{m:?}");
        assert!(
            m.iter().any(|e| e.contains("duplicate section [op] (first at line 6)")),
            "{m:?}"
        );
        assert!(m.iter().any(|e| e.contains("unknown section [mystery]")), "{m:?}");
    }

    #[test]
    fn unknown_tokens_and_missing_sections() {
        let m = messages(parse_structure(&Z4.replace("1 2 3 0", "1 2 3 9")));
        assert_eq!(m, vec!["line 10: unknown element '9'"]);
        let m = messages(parse_structure("[op]\n0\n"));
        assert_eq!(m, vec!["line 0: missing [structure] section"]);
        let m = messages(parse_structure("[structure]\nname = x\nelements = e\n"));
        assert_eq!(m, vec!["line 0: missing [op] section"]);
        let m = messages(parse_structure(&format!("{Z4}[dual]\nx y\n")));
        assert!(m[0].contains("[dual] without [pairing]"));
    }

    #[test]
    fn invalid_utf8() {
        let mut bytes = b"[structure]\nname = x\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xfe]);
        let e = parse_structure_bytes(&bytes).unwrap_err();
        assert_eq!(e[0].to_string(), "line 3: invalid UTF-8");
    }

    #[test]
    fn defect_and_dynamics_round_trip() {
        let mut s = library::cyclic_with_inversion(4);
        s.defect_table = Some(vec![ElementId(0); 16]);
        let (dual, pairing) = character_group(&s).unwrap();
        let bundle = InputBundle::new(s).with_dual(dual, pairing);
        let text = serialize_structure(&bundle);
        assert!(text.contains("\n[defect]\n"));
        assert!(text.contains("\n[dynamic inv]\n0 3 2 1\n"));
        assert!(text.ends_with("0 3/4 1/2 1/4\n"));
        let back = parse_structure(&text).unwrap();
        assert_eq!(back, bundle);
        assert_eq!(serialize_structure(&back), text);
    }

    #[test]
    fn corpus_round_trips() {
        for (stem, s) in library::corpus() {
            let bundle = InputBundle::new(s);
            let text = serialize_structure(&bundle);
            let back = parse_structure(&text).unwrap_or_else(|e| panic!("{stem}: {e:?}"));
            assert_eq!(back, bundle, "{stem}");
            assert_eq!(serialize_structure(&back), text, "{stem}");
        }
    }

    #[test]
    fn module_round_trip() {
        let z4 = library::cyclic(4);
        let field = CyclotomicField::new(4);
        let rep = crate::decomposition::regular_representation(&z4, &field);
        let text = serialize_module(&rep, &z4);
        let back = parse_module(&text, &z4).unwrap();
        assert_eq!(back, rep);
        assert_eq!(serialize_module(&back, &z4), text);
    }

    #[test]
    fn module_errors() {
        let z2 = library::cyclic(2);
        let text = "[module]\ndimension = 1\nconductor = 4\n\n[matrix 0]\n1\n\n[matrix 7]\n1\n[action nope]\n1\n";
        let e: Vec<String> = parse_module(text, &z2)
            .unwrap_err()
            .iter()
            .map(|e| e.to_string())
            .collect();
        assert!(e.iter().any(|m| m == "line 1: missing [matrix 1]"), "{e:?}");
        assert!(e.iter().any(|m| m == "line 8: unknown element '7'"), "{e:?}");
        assert!(e.iter().any(|m| m == "line 10: unknown dynamic 'nope'"), "{e:?}");

        let e = parse_module("[module]\ndimension = 1\nconductor = 100000\n", &z2).unwrap_err();
        assert!(e[0].message.contains("exceeds the supported maximum"));
        let e = parse_module(
            "[module]\ndimension = 1\nconductor = 4\n[matrix 0]\nq\n[matrix 1]\n1\n",
            &z2,
        )
        .unwrap_err();
        assert_eq!(e[0].to_string(), "line 5: malformed scalar 'q'");
    }
}
