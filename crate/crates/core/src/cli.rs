//! Input documents and the `incinv` command implementations.
//!
//! Document grammar, one item per line (`#` starts a comment):
//!
//! ```text
//! elements: a b c
//! cover: a b
//! cover: b c
//! map lam kind=involution: a->c b->b c->a
//! unit u: (a,a)=1 (a,b)=2 (b,b)=1 (c,c)=1
//! sigma s: (a,b)=2
//! ```
//!
//! Map kinds are `involution`, `automorphism` and `anti-automorphism`. Unit
//! entries default to 0 off the diagonal; every diagonal entry is required.
//! Sigma entries default to 1 on the diagonal and on covers; the remaining
//! pairs are filled in multiplicatively.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{IncidenceFunction, Unit};
use crate::battery::{verify_battery, BatteryReport, CheckStatus};
use crate::classify::{
    classify, count_classes_formula, general_equivalent, inner_equivalent_oracle, Bounds, CountMethod,
};
use crate::error::Error;
use crate::exec::Strategy;
use crate::involutions::{make_involution, InvolutionDescriptor};
use crate::morphisms::{
    is_fractional, mult_is_inner, mult_is_inner_exhaustive, mult_subset_inn, Fractionality, Gate, GateMethod,
    MultiplicativeElement,
};
use crate::posets::{
    component_involution, enumerate_involutions, enumerate_maps, poset_involutions_conjugate, posets_up_to,
    random_poset, MapKind, Poset, PosetMap,
};
use crate::scalars::Field;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Syntax { line: usize, message: String },
    Semantic { line: Option<usize>, message: String },
    Library(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(Error::BoundExceeded { .. }) => 3,
            CliError::Library(Error::HypothesisGateFailed { .. } | Error::InternalInconsistency(_)) => 1,
            _ => 2,
        }
    }

    fn semantic(line: usize, message: impl fmt::Display) -> Self {
        CliError::Semantic { line: Some(line), message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Syntax { line, message } => write!(f, "line {line}: syntax error: {message}"),
            CliError::Semantic { line: Some(line), message } => write!(f, "line {line}: {message}"),
            CliError::Semantic { line: None, message } => write!(f, "{message}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Scalar assignments to pairs, kept as text until a field is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entries {
    pub line: usize,
    pub values: Vec<((String, String), String)>,
}

#[derive(Clone, Debug)]
pub struct InputDocument {
    pub poset: Arc<Poset>,
    pub maps: BTreeMap<String, (usize, PosetMap)>,
    pub units: BTreeMap<String, Entries>,
    pub sigmas: BTreeMap<String, Entries>,
}

fn syntax(line: usize, message: impl Into<String>) -> CliError {
    CliError::Syntax { line, message: message.into() }
}

fn parse_entries(line: usize, text: &str) -> CliResult<Vec<((String, String), String)>> {
    let mut out = vec![];
    for item in text.split_whitespace() {
        let bad = || syntax(line, format!("expected `(x,y)=s`, got `{item}`"));
        let (pair, value) = item.split_once('=').ok_or_else(bad)?;
        let inner = pair.strip_prefix('(').and_then(|p| p.strip_suffix(')')).ok_or_else(bad)?;
        let (x, y) = inner.split_once(',').ok_or_else(bad)?;
        if x.is_empty() || y.is_empty() || value.is_empty() {
            return Err(bad());
        }
        out.push(((x.to_string(), y.to_string()), value.to_string()));
    }
    Ok(out)
}

/// Split `keyword NAME rest: body` style headers.
fn named_block<'a>(line: usize, rest: &'a str, what: &str) -> CliResult<(&'a str, &'a str, &'a str)> {
    let (head, body) = rest
        .split_once(':')
        .ok_or_else(|| syntax(line, format!("{what} block needs `:`")))?;
    let mut words = head.split_whitespace();
    let name = words.next().ok_or_else(|| syntax(line, format!("{what} block needs a name")))?;
    let attrs = head.trim_start().strip_prefix(name).unwrap_or("").trim();
    Ok((name, attrs, body.trim()))
}

pub fn parse(text: &str) -> CliResult<InputDocument> {
    let mut elements: Option<(usize, Vec<String>)> = None;
    let mut covers: Vec<(usize, String, String)> = vec![];
    let mut raw_maps: Vec<(usize, String, String, String)> = vec![];
    let mut units: BTreeMap<String, Entries> = BTreeMap::new();
    let mut sigmas: BTreeMap<String, Entries> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("elements:") {
            if elements.is_some() {
                return Err(syntax(line, "second `elements:` line"));
            }
            elements = Some((line, rest.split_whitespace().map(str::to_string).collect()));
        } else if let Some(rest) = content.strip_prefix("cover:") {
            let words: Vec<&str> = rest.split_whitespace().collect();
            if words.len() != 2 {
                return Err(syntax(line, "`cover:` takes exactly two labels"));
            }
            covers.push((line, words[0].to_string(), words[1].to_string()));
        } else if let Some(rest) = content.strip_prefix("map ") {
            let (name, attrs, body) = named_block(line, rest, "map")?;
            let kind = attrs
                .strip_prefix("kind=")
                .ok_or_else(|| syntax(line, "map block needs `kind=...`"))?;
            if raw_maps.iter().any(|m| m.1 == name) {
                return Err(CliError::semantic(line, format!("duplicate map name `{name}`")));
            }
            raw_maps.push((line, name.to_string(), kind.to_string(), body.to_string()));
        } else if let Some(rest) = content.strip_prefix("unit ").or_else(|| content.strip_prefix("sigma ")) {
            let is_unit = content.starts_with("unit ");
            let (name, attrs, body) = named_block(line, rest, if is_unit { "unit" } else { "sigma" })?;
            if !attrs.is_empty() {
                return Err(syntax(line, format!("unexpected `{attrs}`")));
            }
            let values = parse_entries(line, body)?;
            let target = if is_unit { &mut units } else { &mut sigmas };
            target
                .entry(name.to_string())
                .or_insert(Entries { line, values: vec![] })
                .values
                .extend(values);
        } else {
            return Err(syntax(line, format!("unrecognised line `{content}`")));
        }
    }

    let (eline, labels) = elements.ok_or_else(|| syntax(1, "missing `elements:` line"))?;
    if labels.is_empty() {
        return Err(syntax(eline, "no elements"));
    }
    for (line, x, y) in &covers {
        for l in [x, y] {
            if !labels.contains(l) {
                return Err(CliError::semantic(*line, Error::UnknownLabel(l.clone())));
            }
        }
    }
    let relations: Vec<(String, String)> = covers.iter().map(|(_, x, y)| (x.clone(), y.clone())).collect();
    let poset = Arc::new(Poset::new(&labels, &relations).map_err(|e| {
        let line = match &e {
            Error::CycleDetected(a, b) => covers
                .iter()
                .find(|(_, x, y)| (x == a && y == b) || (x == b && y == a))
                .map_or(eline, |c| c.0),
            _ => eline,
        };
        CliError::semantic(line, e)
    })?);
    for (line, x, y) in &covers {
        let (a, b) = (poset.index_of(x)?, poset.index_of(y)?);
        if !poset.covers().contains(&(a, b)) {
            return Err(CliError::semantic(*line, format!("`{x} {y}` is not a covering pair")));
        }
    }

    let mut maps = BTreeMap::new();
    for (line, name, kind, body) in raw_maps {
        let (kind, order_two) = match kind.as_str() {
            "involution" => (MapKind::AntiAutomorphism, true),
            "anti-automorphism" => (MapKind::AntiAutomorphism, false),
            "automorphism" => (MapKind::Automorphism, false),
            other => return Err(syntax(line, format!("unknown map kind `{other}`"))),
        };
        let mut pairs = vec![];
        for item in body.split_whitespace() {
            let (x, y) = item
                .split_once("->")
                .ok_or_else(|| syntax(line, format!("expected `x->y`, got `{item}`")))?;
            pairs.push((x, y));
        }
        let map = PosetMap::from_labels(poset.clone(), &pairs, kind).map_err(|e| CliError::semantic(line, e))?;
        if order_two && !map.is_involution() {
            return Err(CliError::semantic(line, format!("map `{name}` does not have order two")));
        }
        maps.insert(name, (line, map));
    }
    Ok(InputDocument { poset, maps, units, sigmas })
}

impl InputDocument {
    fn pair(&self, line: usize, x: &str, y: &str) -> CliResult<usize> {
        let a = self.poset.index_of(x).map_err(|e| CliError::semantic(line, e))?;
        let b = self.poset.index_of(y).map_err(|e| CliError::semantic(line, e))?;
        self.poset
            .pair_index(a, b)
            .ok_or_else(|| CliError::semantic(line, format!("`{x}` is not below `{y}`")))
    }

    fn assigned(&self, e: &Entries, field: Field) -> CliResult<Vec<Option<crate::scalars::Scalar>>> {
        let mut values = vec![None; self.poset.num_pairs()];
        for ((x, y), s) in &e.values {
            let k = self.pair(e.line, x, y)?;
            let v = field.parse_scalar(s).map_err(|err| CliError::semantic(e.line, err))?;
            if values[k].is_some() {
                return Err(CliError::semantic(e.line, format!("entry ({x},{y}) given twice")));
            }
            values[k] = Some(v);
        }
        Ok(values)
    }

    pub fn unit(&self, name: &str, field: Field) -> CliResult<Unit> {
        let e = self
            .units
            .get(name)
            .ok_or_else(|| CliError::Semantic { line: None, message: format!("no unit named `{name}`") })?;
        let values = self.assigned(e, field)?;
        let mut entries = vec![];
        for (k, v) in values.into_iter().enumerate() {
            let (x, y) = self.poset.pairs()[k];
            entries.push(match v {
                Some(v) => v,
                None if x == y => {
                    return Err(CliError::semantic(
                        e.line,
                        format!("unit `{name}` is missing the diagonal entry ({0},{0})", self.poset.label(x)),
                    ))
                }
                None => field.zero(),
            });
        }
        let f = IncidenceFunction::from_entries(self.poset.clone(), field, entries)?;
        Unit::new(f).map_err(|err| CliError::semantic(e.line, format!("unit `{name}` is not invertible: {err}")))
    }

    pub fn sigma(&self, name: &str, field: Field) -> CliResult<MultiplicativeElement> {
        let e = self
            .sigmas
            .get(name)
            .ok_or_else(|| CliError::Semantic { line: None, message: format!("no sigma named `{name}`") })?;
        let values = self.assigned(e, field)?;
        let p = &self.poset;
        for &(x, _) in p.pairs().iter().filter(|(x, y)| x == y) {
            if values[p.pair_index(x, x).unwrap()].as_ref().is_some_and(|v| !v.is_one()) {
                return Err(CliError::semantic(e.line, format!("σ({0},{0}) must be 1", p.label(x))));
            }
        }
        let on_covers: Vec<_> = p
            .covers()
            .iter()
            .map(|&(x, y)| values[p.pair_index(x, y).unwrap()].clone().unwrap_or_else(|| field.one()))
            .collect();
        let sigma = MultiplicativeElement::from_covers(p.clone(), field, &on_covers)
            .map_err(|err| CliError::semantic(e.line, err))?;
        for (k, v) in values.iter().enumerate() {
            if let Some(v) = v {
                if sigma.as_function().entry(k) != v {
                    let (x, y) = p.pairs()[k];
                    return Err(CliError::semantic(
                        e.line,
                        format!("σ({},{}) = {v} contradicts the product along covers", p.label(x), p.label(y)),
                    ));
                }
            }
        }
        Ok(sigma)
    }

    pub fn map(&self, name: &str) -> CliResult<&PosetMap> {
        self.maps
            .get(name)
            .map(|(_, m)| m)
            .ok_or_else(|| CliError::Semantic { line: None, message: format!("no map named `{name}`") })
    }

    /// `NAME` or `NAME:UNIT` as an involution descriptor.
    pub fn involution(&self, spec: &str, field: Field) -> CliResult<InvolutionDescriptor> {
        let (map, unit) = match spec.split_once(':') {
            Some((m, u)) => (m, Some(u)),
            None => (spec, None),
        };
        let lambda = self.map(map)?.clone();
        if !lambda.is_involution() {
            return Err(CliError::Semantic { line: None, message: format!("map `{map}` is not an involution") });
        }
        let u = match unit {
            Some(u) => self.unit(u, field)?,
            None => Unit::delta(self.poset.clone(), field),
        };
        Ok(make_involution(lambda, u)?)
    }
}

/// Options shared by all commands.
#[derive(Clone, Debug)]
pub struct Options {
    pub field: Field,
    pub bounds: Bounds,
    pub seed: u64,
    pub strategy: Strategy,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            field: Field::prime(3).expect("3 is prime"),
            bounds: Bounds::default(),
            seed: 0,
            strategy: Strategy::default(),
        }
    }
}

/// Ordered `key = value` lines with an exit code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<(String, String)>,
    pub exit_code: i32,
}

impl Report {
    fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.lines.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Involutions to analyse: the named one, else the document's involution
/// maps, else every involution of the poset.
fn selected_lambdas(doc: &InputDocument, name: Option<&str>, bounds: Bounds) -> CliResult<Vec<(String, PosetMap)>> {
    if let Some(n) = name {
        let m = doc.map(n)?;
        if !m.is_involution() {
            return Err(CliError::Semantic { line: None, message: format!("map `{n}` is not an involution") });
        }
        return Ok(vec![(n.to_string(), m.clone())]);
    }
    let named: Vec<_> = doc
        .maps
        .iter()
        .filter(|(_, (_, m))| m.is_involution())
        .map(|(n, (_, m))| (n.clone(), m.clone()))
        .collect();
    if !named.is_empty() {
        return Ok(named);
    }
    Ok(enumerate_involutions(&doc.poset, bounds.max_poset)?
        .into_iter()
        .enumerate()
        .map(|(i, m)| (i.to_string(), m))
        .collect())
}

/// Key prefix: empty for a single involution, `lambda.NAME.` otherwise.
fn prefix(count: usize, name: &str) -> String {
    if count == 1 {
        String::new()
    } else {
        format!("lambda.{name}.")
    }
}

fn or_dash(s: String) -> String {
    if s.is_empty() {
        "-".into()
    } else {
        s
    }
}

fn labels(p: &Poset, xs: &[usize]) -> String {
    or_dash(xs.iter().map(|&x| p.label(x)).collect::<Vec<_>>().join(" "))
}

fn indices(xs: &[usize]) -> String {
    or_dash(xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
}

/// One-line form `a<b a<c` of a poset (`a b` when there are no covers).
pub fn compact(p: &Poset) -> String {
    let covers: Vec<String> = p.covers().iter().map(|&(x, y)| format!("{}<{}", p.label(x), p.label(y))).collect();
    let isolated: Vec<&str> = (0..p.len())
        .filter(|&x| !p.covers().iter().any(|&(a, b)| a == x || b == x))
        .map(|x| p.label(x))
        .collect();
    covers.into_iter().chain(isolated.into_iter().map(str::to_string)).collect::<Vec<_>>().join(" ")
}

pub fn components(doc: &InputDocument) -> Report {
    let p = &doc.poset;
    let mut r = Report::default();
    r.push("poset.elements", p.len());
    r.push("poset.covers", p.covers().len());
    r.push("components.count", p.num_components());
    for (j, c) in p.components().iter().enumerate() {
        r.push(format!("component.{j}"), labels(p, c));
        r.push(format!("component.{j}.all_comparable"), labels(p, &Poset::subposet(p, c).all_comparable_elements().iter().map(|&i| c[i]).collect::<Vec<_>>()));
        r.push(format!("component.{j}.hasse_tree"), p.component_hasse_is_tree(j));
    }
    r
}

pub fn autos(doc: &InputDocument, opts: &Options) -> CliResult<Report> {
    let p = &doc.poset;
    let mut r = Report::default();
    let autos = enumerate_maps(p, MapKind::Automorphism, false, opts.bounds.max_poset)?;
    r.push("automorphisms.count", autos.len());
    for (i, a) in autos.iter().enumerate() {
        r.push(format!("automorphism.{i}"), a);
    }
    let anti = enumerate_maps(p, MapKind::AntiAutomorphism, false, opts.bounds.max_poset)?;
    r.push("anti_automorphisms.count", anti.len());
    let invs = enumerate_involutions(p, opts.bounds.max_poset)?;
    r.push("involutions.count", invs.len());
    for (i, l) in invs.iter().enumerate() {
        r.push(format!("involution.{i}"), l);
    }
    Ok(r)
}

pub fn involutions(doc: &InputDocument, opts: &Options, map: Option<&str>, list: bool) -> CliResult<Report> {
    let lambdas = selected_lambdas(doc, map, opts.bounds)?;
    let mut r = Report::default();
    r.push("field", opts.field);
    for (name, lambda) in &lambdas {
        let pre = prefix(lambdas.len(), name);
        let all = crate::involutions::enumerate_involutions_over(lambda, opts.field, opts.bounds.units, opts.strategy)?;
        r.push(format!("{pre}lambda"), lambda);
        r.push(format!("{pre}involutions.count"), all.len());
        if list {
            for (i, d) in all.iter().enumerate() {
                r.push(format!("{pre}involution.{i}.u"), d.u());
            }
        }
    }
    Ok(r)
}

pub fn decompose(doc: &InputDocument, opts: &Options, map: Option<&str>) -> CliResult<Report> {
    let lambdas = selected_lambdas(doc, map, opts.bounds)?;
    let p = &doc.poset;
    let mut r = Report::default();
    for (name, lambda) in &lambdas {
        let pre = prefix(lambdas.len(), name);
        let ci = component_involution(p, lambda)?;
        let d = &ci.decomposition;
        r.push(format!("{pre}lambda"), lambda);
        r.push(format!("{pre}x1"), labels(p, &d.x1));
        r.push(format!("{pre}x2"), labels(p, &d.x2));
        r.push(format!("{pre}x3"), labels(p, &d.x3));
        r.push(format!("{pre}valid"), d.check(p, lambda).is_ok());
        r.push(format!("{pre}lambda_bar"), indices(&ci.lambda_bar));
        let (j1, j2, j3) = ci.j_decomposition();
        r.push(format!("{pre}j1"), indices(&j1));
        r.push(format!("{pre}j2"), indices(&j2));
        r.push(format!("{pre}j3"), indices(&j3));
        r.push(format!("{pre}j3_prime"), indices(&ci.j3_prime));
        for (j, sets) in &ci.p_sets {
            r.push(format!("{pre}p1.{j}"), labels(p, &sets.p1));
            r.push(format!("{pre}p2.{j}"), labels(p, &sets.p2));
            r.push(format!("{pre}p3.{j}"), labels(p, &sets.p3));
        }
    }
    Ok(r)
}

fn push_gate(r: &mut Report, gate: &Gate) {
    r.push("mult_subset_inn", gate.passes());
    for c in &gate.components {
        let method = match &c.method {
            GateMethod::Exhaustive { checked } => format!("exhaustive ({checked} multiplicative elements)"),
            GateMethod::AllComparable => "all-comparable element".to_string(),
            GateMethod::HasseTree => "hasse diagram is a tree".to_string(),
        };
        r.push(format!("gate.component.{}", c.component), if c.passes { "pass" } else { "fail" });
        r.push(format!("gate.component.{}.method", c.component), method);
        if let Some(s) = &c.counterexample {
            r.push(format!("gate.component.{}.counterexample", c.component), s.as_function());
        }
    }
}

pub fn classify_cmd(doc: &InputDocument, opts: &Options, map: Option<&str>) -> CliResult<Report> {
    let lambdas = selected_lambdas(doc, map, opts.bounds)?;
    let mut r = Report::default();
    r.push("field", opts.field);
    let gate = mult_subset_inn(&doc.poset, opts.field, opts.bounds.units)?;
    push_gate(&mut r, &gate);
    for (name, lambda) in &lambdas {
        let pre = prefix(lambdas.len(), name);
        let (report, _) = classify(lambda, opts.field, opts.bounds, opts.strategy)?;
        r.push(format!("{pre}lambda"), lambda);
        r.push(format!("{pre}involutions.count"), report.involutions);
        r.push(format!("{pre}classes"), report.count);
        r.push(
            format!("{pre}classes.formula"),
            report.formula.map_or("unavailable".to_string(), |f| f.to_string()),
        );
        r.push(
            format!("{pre}method"),
            match report.method {
                CountMethod::BothAgree => "both-agree",
                CountMethod::BruteForce => "brute-force",
                CountMethod::Formula => "formula",
            },
        );
        for (j, c) in &report.component_counts {
            r.push(format!("{pre}component.{j}.classes"), c);
        }
        for (i, rep) in report.representatives.iter().enumerate() {
            r.push(format!("{pre}representative.{i}.u"), rep.u());
        }
        if report.formula.is_some_and(|f| f != report.count) {
            r.exit_code = 1;
        }
    }
    Ok(r)
}

pub fn count(doc: &InputDocument, opts: &Options, map: Option<&str>) -> CliResult<Report> {
    let lambdas = selected_lambdas(doc, map, opts.bounds)?;
    let mut r = Report::default();
    let gate = mult_subset_inn(&doc.poset, opts.field, opts.bounds.units);
    let gate_passes = match &gate {
        Ok(g) => g.passes(),
        Err(_) => false,
    };
    r.push("mult_subset_inn", gate.as_ref().map_or("unknown".to_string(), |g| g.passes().to_string()));
    for (name, lambda) in &lambdas {
        let pre = prefix(lambdas.len(), name);
        r.push(format!("{pre}lambda"), lambda);
        let formula = count_classes_formula(lambda, opts.field);
        match &formula {
            Ok(f) => r.push(format!("{pre}classes.formula"), f),
            Err(Error::InfiniteSquareClassGroup(_)) => r.push(format!("{pre}classes.formula"), "infinite"),
            Err(e) => return Err(e.clone().into()),
        }
        let brute = crate::classify::count_classes_bruteforce(lambda, opts.field, opts.bounds, opts.strategy)?;
        r.push(format!("{pre}classes.bruteforce"), brute.count);
        let agreement = matches!(formula, Ok(f) if f == brute.count);
        if gate_passes {
            r.push(format!("{pre}agreement"), agreement);
            if !agreement {
                r.exit_code = 1;
            }
        } else {
            r.push(format!("{pre}agreement"), "not-applicable");
        }
    }
    Ok(r)
}

pub fn general_equiv(doc: &InputDocument, opts: &Options, rho: &str, eta: &str) -> CliResult<Report> {
    let a = doc.involution(rho, opts.field)?;
    let b = doc.involution(eta, opts.field)?;
    let mut r = Report::default();
    r.push("rho", &a);
    r.push("eta", &b);
    let conj = poset_involutions_conjugate(a.lambda(), b.lambda(), opts.bounds.max_poset)?;
    r.push("lambda.conjugate", conj.is_some());
    if a.lambda() == b.lambda() {
        let (inner, _) = inner_equivalent_oracle(&a, &b, opts.bounds.units, opts.strategy)?;
        r.push("inner.equivalent", inner);
    }
    let (ok, w) = general_equivalent(&a, &b, opts.bounds, opts.strategy)?;
    r.push("equivalent", ok);
    if let Some(w) = w {
        r.push("witness.alpha", w.alpha.as_ref().expect("general witness"));
        r.push("witness.t", &w.t);
        r.push("witness.c", &w.c);
        r.push("witness.replays", w.replay(&a, &b)?);
    }
    Ok(r)
}

pub fn fractional_check(doc: &InputDocument, opts: &Options, sigma: Option<&str>) -> CliResult<Report> {
    let mut r = Report::default();
    let names: Vec<String> = match sigma {
        Some(s) => vec![s.to_string()],
        None => doc.sigmas.keys().cloned().collect(),
    };
    let p = &doc.poset;
    for name in &names {
        let pre = prefix(names.len(), name).replace("lambda.", "sigma.");
        let s = doc.sigma(name, opts.field)?;
        r.push(format!("{pre}sigma"), s.as_function());
        match is_fractional(&s) {
            Fractionality::Fractional { h } => {
                r.push(format!("{pre}fractional"), true);
                let h: Vec<String> = (0..p.len()).map(|x| format!("{}={}", p.label(x), h[x])).collect();
                r.push(format!("{pre}h"), h.join(" "));
            }
            Fractionality::Violated { cycle, value } => {
                r.push(format!("{pre}fractional"), false);
                r.push(format!("{pre}cycle"), labels(p, &cycle));
                r.push(format!("{pre}cycle.value"), value);
            }
        }
        let check = mult_is_inner(&s);
        r.push(format!("{pre}mult_is_inner"), check.inner);
        if let Some(u) = &check.conjugator {
            r.push(format!("{pre}conjugator"), u);
        }
        if let Ok((n, slow)) = mult_is_inner_exhaustive(&s, opts.bounds.units, opts.strategy) {
            r.push(format!("{pre}exhaustive.candidates"), n);
            r.push(format!("{pre}exhaustive.inner"), slow.inner);
            if slow.inner != check.inner {
                r.exit_code = 1;
            }
        }
    }
    let gate = mult_subset_inn(p, opts.field, opts.bounds.units)?;
    push_gate(&mut r, &gate);
    Ok(r)
}

/// Where `verify` takes its posets from.
pub enum Corpus<'a> {
    Document(&'a InputDocument),
    UpTo(usize),
    Random { count: usize, max_size: usize },
}

pub fn verify(corpus: Corpus<'_>, opts: &Options) -> CliResult<Report> {
    let posets: Vec<Arc<Poset>> = match corpus {
        Corpus::Document(d) => vec![d.poset.clone()],
        Corpus::UpTo(n) => posets_up_to(n).into_iter().map(Arc::new).collect(),
        Corpus::Random { count, max_size } => {
            let mut rng = StdRng::seed_from_u64(opts.seed);
            (0..count)
                .map(|_| {
                    let n = rng.gen_range(1..=max_size);
                    let density = rng.gen_range(0.1..0.7);
                    Arc::new(random_poset(&mut rng, n, density))
                })
                .collect()
        }
    };
    let reports: Vec<BatteryReport> = posets
        .iter()
        .map(|p| verify_battery(p, opts.field, opts.bounds, opts.strategy))
        .collect::<crate::Result<_>>()?;
    let mut r = Report::default();
    let passed = reports.iter().all(BatteryReport::passed);
    r.push("battery", if passed { "pass" } else { "fail" });
    r.push("field", opts.field);
    r.push("posets", reports.len());
    r.push("gate.failed_posets", reports.iter().filter(|b| !b.gate.passes()).count());
    let names: Vec<&str> = reports.first().map(|b| b.checks.iter().map(|c| c.name).collect()).unwrap_or_default();
    for name in names {
        let results: Vec<_> = reports.iter().flat_map(|b| b.checks.iter().filter(move |c| c.name == name)).collect();
        let fail = results.iter().any(|c| matches!(c.status, CheckStatus::Fail(_)));
        let all_skipped = results.iter().all(|c| matches!(c.status, CheckStatus::Skipped(_)));
        let skipped = results.iter().filter(|c| matches!(c.status, CheckStatus::Skipped(_))).count();
        let status = if fail {
            "fail"
        } else if all_skipped {
            "skipped"
        } else {
            "pass"
        };
        r.push(format!("check.{name}"), status);
        r.push(format!("check.{name}.cases"), results.iter().map(|c| c.cases).sum::<u64>());
        r.push(format!("check.{name}.skipped_posets"), skipped);
    }
    let mut k = 0;
    for b in &reports {
        for c in b.failures() {
            r.push(format!("failure.{k}"), format!("[{}] {}: {}", compact(&b.poset), c.name, c.status));
            k += 1;
        }
    }
    if !passed {
        r.exit_code = 1;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = "elements: a b\ncover: a b\nmap lam kind=involution: a->b b->a\n";

    #[test]
    fn parse_minimal_chain() {
        let d = parse(CHAIN).unwrap();
        assert_eq!(d.poset.len(), 2);
        assert!(d.maps["lam"].1.is_involution());
    }

    #[test]
    fn parse_errors_are_line_anchored() {
        let e = parse("elements: a b\ncover: a b\nmap m kind=automorphism: a->a b->a\n").unwrap_err();
        assert!(matches!(e, CliError::Semantic { line: Some(3), .. }), "{e}");
        let e = parse("elements: a b\ncover a b\n").unwrap_err();
        assert!(matches!(e, CliError::Syntax { line: 2, .. }));
        let e = parse("elements: a b c\ncover: a b\ncover: b c\ncover: a c\n").unwrap_err();
        assert!(matches!(e, CliError::Semantic { line: Some(4), .. }), "{e}");
        let e = parse("elements: a b\ncover: a z\n").unwrap_err();
        assert!(matches!(e, CliError::Semantic { line: Some(2), .. }));
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unit_errors() {
        let f = Field::prime(3).unwrap();
        let d = parse(&format!("{CHAIN}unit z: (a,a)=0 (b,b)=1\nunit m: (a,b)=1 (b,b)=1\nunit ok: (a,a)=1 (b,b)=2\n")).unwrap();
        let e = d.unit("z", f).unwrap_err();
        assert!(e.to_string().contains("line 4") && e.to_string().contains("`a`"), "{e}");
        let e = d.unit("m", f).unwrap_err();
        assert!(e.to_string().contains("(a,a)"), "{e}");
        assert!(d.unit("ok", f).is_ok());
    }

    #[test]
    fn count_on_flipped_chain() {
        let d = parse(CHAIN).unwrap();
        let r = count(&d, &Options::default(), None).unwrap();
        assert_eq!(r.get("classes.formula"), Some("2"));
        assert_eq!(r.get("classes.bruteforce"), Some("2"));
        assert_eq!(r.get("agreement"), Some("true"));
        assert_eq!(r.exit_code, 0);
    }

    #[test]
    fn crown_fractional_check() {
        let doc = "elements: a b c d\ncover: a c\ncover: a d\ncover: b c\ncover: b d\n\
                   sigma s: (a,c)=1 (a,d)=1 (b,c)=2 (b,d)=1\n";
        let d = parse(doc).unwrap();
        let r = fractional_check(&d, &Options::default(), None).unwrap();
        assert_eq!(r.get("fractional"), Some("false"));
        assert_eq!(r.get("mult_subset_inn"), Some("false"));
        assert_eq!(r.get("exhaustive.candidates"), Some("648"));
    }

    #[test]
    fn reports_are_deterministic() {
        let d = parse(CHAIN).unwrap();
        let a = classify_cmd(&d, &Options::default(), None).unwrap().to_string();
        let b = classify_cmd(&d, &Options { strategy: Strategy::Sequential, ..Options::default() }, None)
            .unwrap()
            .to_string();
        assert_eq!(a, b);
        for line in a.lines() {
            let (k, _) = line.split_once(" = ").unwrap();
            assert!(k.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_'), "{k}");
        }
    }
}
