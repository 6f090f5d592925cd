//! Translationally invariant code definitions: the text format, coarse-graining and
//! composition.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    /// (X-bit, Z-bit). Y is X and Z on the same qubit, phase dropped.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Letter> {
        match (x, z) {
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
            (false, false) => None,
        }
    }

    fn symbol(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// One single-qubit factor of a recipe, placed relative to the anchor site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliTerm {
    pub dx: i32,
    pub dy: i32,
    pub qubit: usize,
    pub letter: Letter,
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{},{})", self.letter.symbol(), self.dx, self.dy, self.qubit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorRecipe {
    pub label: String,
    pub terms: Vec<PauliTerm>,
}

impl GeneratorRecipe {
    /// Side of the smallest square of sites containing the support.
    pub fn range(&self) -> usize {
        let (x0, x1, y0, y1) = self.bounds();
        ((x1 - x0).max(y1 - y0) + 1) as usize
    }

    /// (min dx, max dx, min dy, max dy).
    pub fn bounds(&self) -> (i32, i32, i32, i32) {
        let x0 = self.terms.iter().map(|t| t.dx).min().unwrap_or(0);
        let x1 = self.terms.iter().map(|t| t.dx).max().unwrap_or(0);
        let y0 = self.terms.iter().map(|t| t.dy).min().unwrap_or(0);
        let y1 = self.terms.iter().map(|t| t.dy).max().unwrap_or(0);
        (x0, x1, y0, y1)
    }

    /// Largest absolute offset.
    pub fn reach(&self) -> usize {
        self.terms.iter().map(|t| t.dx.unsigned_abs().max(t.dy.unsigned_abs()) as usize).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeDefinition {
    pub name: String,
    pub qubits_per_site: usize,
    pub stabilizer_recipes: Vec<GeneratorRecipe>,
    /// `None` for a subspace code.
    pub gauge_recipes: Option<Vec<GeneratorRecipe>>,
}

impl CodeDefinition {
    pub fn is_subsystem(&self) -> bool {
        self.gauge_recipes.is_some()
    }

    /// The generators charges are read from: the gauge recipes, or the stabilizer
    /// recipes of a subspace code.
    pub fn charge_recipes(&self) -> &[GeneratorRecipe] {
        self.gauge_recipes.as_deref().unwrap_or(&self.stabilizer_recipes)
    }

    fn all_recipes(&self) -> impl Iterator<Item = &GeneratorRecipe> {
        self.stabilizer_recipes.iter().chain(self.gauge_recipes.iter().flatten())
    }

    /// Maximum recipe range; 1 for a code without generators.
    pub fn range(&self) -> usize {
        self.all_recipes().map(|r| r.range()).max().unwrap_or(1)
    }

    pub fn reach(&self) -> usize {
        self.all_recipes().map(|r| r.reach()).max().unwrap_or(0)
    }

    /// Blocks `l × l` sites into one site. Each recipe yields `l²` recipes, one per
    /// position of its anchor inside the block, labelled `label@px,py`.
    pub fn coarse_grain(&self, l: usize) -> CodeDefinition {
        assert!(l >= 1, "coarse-graining level must be positive");
        if l == 1 {
            return self.clone();
        }
        let q = self.qubits_per_site;
        let li = l as i32;
        let grain = |recipes: &[GeneratorRecipe]| -> Vec<GeneratorRecipe> {
            let mut out = Vec::with_capacity(recipes.len() * l * l);
            for r in recipes {
                for px in 0..li {
                    for py in 0..li {
                        let terms = r
                            .terms
                            .iter()
                            .map(|t| {
                                let ax = px + t.dx;
                                let ay = py + t.dy;
                                let (bx, sx) = (ax.div_euclid(li), ax.rem_euclid(li));
                                let (by, sy) = (ay.div_euclid(li), ay.rem_euclid(li));
                                PauliTerm {
                                    dx: bx,
                                    dy: by,
                                    qubit: ((sx * li + sy) as usize) * q + t.qubit,
                                    letter: t.letter,
                                }
                            })
                            .collect();
                        out.push(GeneratorRecipe { label: format!("{}@{},{}", r.label, px, py), terms });
                    }
                }
            }
            out
        };
        CodeDefinition {
            name: self.name.clone(),
            qubits_per_site: l * l * q,
            stabilizer_recipes: grain(&self.stabilizer_recipes),
            gauge_recipes: self.gauge_recipes.as_deref().map(grain),
        }
    }

    /// Smallest blocking level after which every recipe has range at most 2.
    pub fn normalization_level(&self) -> usize {
        (1..=self.range().max(1)).find(|&l| self.coarse_grain(l).range() <= 2).unwrap_or(self.range())
    }

    /// Disjoint union of unit cells. The composite is a subsystem code as soon as one
    /// factor is; the other factor then contributes its stabilizers as gauge generators.
    pub fn compose(a: &CodeDefinition, b: &CodeDefinition) -> CodeDefinition {
        let shift = |recipes: &[GeneratorRecipe]| -> Vec<GeneratorRecipe> {
            recipes
                .iter()
                .map(|r| GeneratorRecipe {
                    label: r.label.clone(),
                    terms: r.terms.iter().map(|t| PauliTerm { qubit: t.qubit + a.qubits_per_site, ..*t }).collect(),
                })
                .collect()
        };
        let mut stabs = a.stabilizer_recipes.clone();
        stabs.extend(shift(&b.stabilizer_recipes));
        let gauge = if a.is_subsystem() || b.is_subsystem() {
            let mut g = a.charge_recipes().to_vec();
            g.extend(shift(b.charge_recipes()));
            Some(g)
        } else {
            None
        };
        CodeDefinition {
            name: format!("{}+{}", a.name, b.name),
            qubits_per_site: a.qubits_per_site + b.qubits_per_site,
            stabilizer_recipes: stabs,
            gauge_recipes: gauge,
        }
    }

    /// Same generators irrespective of name and labels.
    pub fn same_generators(&self, other: &CodeDefinition) -> bool {
        let terms = |rs: &[GeneratorRecipe]| rs.iter().map(|r| r.terms.clone()).collect::<Vec<_>>();
        self.qubits_per_site == other.qubits_per_site
            && terms(&self.stabilizer_recipes) == terms(&other.stabilizer_recipes)
            && self.gauge_recipes.as_deref().map(terms) == other.gauge_recipes.as_deref().map(terms)
    }
}

impl fmt::Display for CodeDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "code {}", self.name)?;
        writeln!(f, "qubits {}", self.qubits_per_site)?;
        let line = |f: &mut fmt::Formatter<'_>, kw: &str, r: &GeneratorRecipe| {
            write!(f, "{} {}:", kw, r.label)?;
            for t in &r.terms {
                write!(f, " {t}")?;
            }
            writeln!(f)
        };
        for r in &self.stabilizer_recipes {
            line(f, "stab", r)?;
        }
        for r in self.gauge_recipes.iter().flatten() {
            line(f, "gauge", r)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for CodeDefinition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        parse_code_file(s)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses the line-oriented code format.
pub fn parse_code_file(text: &str) -> Result<CodeDefinition, Error> {
    let mut name: Option<String> = None;
    let mut qubits: Option<usize> = None;
    let mut stabs = Vec::new();
    let mut gauges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        if name.is_none() && keyword != "code" {
            return Err(parse_err(lineno, "first line must be `code <name>`"));
        }
        match keyword {
            "code" => {
                if name.is_some() {
                    return Err(parse_err(lineno, "`code` given twice"));
                }
                if rest.is_empty() {
                    return Err(parse_err(lineno, "missing code name"));
                }
                name = Some(rest.to_string());
            }
            "qubits" => {
                if qubits.is_some() {
                    return Err(parse_err(lineno, "`qubits` given twice"));
                }
                let q = rest.parse::<usize>().map_err(|_| parse_err(lineno, format!("bad qubit count `{rest}`")))?;
                qubits = Some(q);
            }
            "stab" | "gauge" => {
                let q = qubits.ok_or_else(|| parse_err(lineno, "`qubits` must be declared before generators"))?;
                let recipe = parse_recipe(rest, q, lineno)?;
                if keyword == "stab" {
                    stabs.push(recipe);
                } else {
                    gauges.push(recipe);
                }
            }
            other => return Err(parse_err(lineno, format!("unknown keyword `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| parse_err(0, "empty code file"))?;
    let qubits = qubits.ok_or_else(|| parse_err(0, "missing `qubits` line"))?;
    Ok(CodeDefinition {
        name,
        qubits_per_site: qubits,
        stabilizer_recipes: stabs,
        gauge_recipes: if gauges.is_empty() { None } else { Some(gauges) },
    })
}

fn parse_recipe(rest: &str, q: usize, lineno: usize) -> Result<GeneratorRecipe, Error> {
    let (label, body) = rest.split_once(':').ok_or_else(|| parse_err(lineno, "expected `<label>: <terms>`"))?;
    let label = label.trim();
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err(parse_err(lineno, format!("bad label `{label}`")));
    }
    let terms = parse_terms(body, lineno)?;
    if terms.is_empty() {
        return Err(parse_err(lineno, format!("generator `{label}` has no terms")));
    }
    let mut seen = BTreeSet::new();
    for t in &terms {
        if t.qubit >= q {
            return Err(parse_err(lineno, format!("qubit index {} out of range for {} qubits per site", t.qubit, q)));
        }
        if !seen.insert((t.dx, t.dy, t.qubit)) {
            return Err(parse_err(lineno, format!("duplicate term on ({},{},{})", t.dx, t.dy, t.qubit)));
        }
    }
    Ok(GeneratorRecipe { label: label.to_string(), terms })
}

fn parse_terms(body: &str, lineno: usize) -> Result<Vec<PauliTerm>, Error> {
    let chars: Vec<char> = body.chars().collect();
    let mut pos = 0;
    let mut out = Vec::new();
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let expect = |pos: &mut usize, c: char| -> Result<(), Error> {
        skip_ws(pos);
        if *pos < chars.len() && chars[*pos] == c {
            *pos += 1;
            Ok(())
        } else {
            Err(parse_err(lineno, format!("expected `{c}` at column {}", *pos + 1)))
        }
    };
    let int = |pos: &mut usize| -> Result<i64, Error> {
        skip_ws(pos);
        let start = *pos;
        if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
            *pos += 1;
        }
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let tok: String = chars[start..*pos].iter().collect();
        tok.parse::<i64>().map_err(|_| parse_err(lineno, format!("bad integer `{tok}` at column {}", start + 1)))
    };
    loop {
        skip_ws(&mut pos);
        if pos == chars.len() {
            break;
        }
        let letter = match chars[pos] {
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            c => return Err(parse_err(lineno, format!("expected X, Y or Z at column {}, found `{c}`", pos + 1))),
        };
        pos += 1;
        expect(&mut pos, '(')?;
        let dx = int(&mut pos)?;
        expect(&mut pos, ',')?;
        let dy = int(&mut pos)?;
        expect(&mut pos, ',')?;
        let qubit = int(&mut pos)?;
        expect(&mut pos, ')')?;
        let small = |v: i64| i32::try_from(v).map_err(|_| parse_err(lineno, "offset too large"));
        if qubit < 0 {
            return Err(parse_err(lineno, "negative qubit index"));
        }
        out.push(PauliTerm { dx: small(dx)?, dy: small(dy)?, qubit: qubit as usize, letter });
    }
    Ok(out)
}
