//! The subcommands. Each returns its standard output and exit code; errors
//! are reported by the caller.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use contcalc_core::elaborator::{elaborate_with, Decl, Elaboration, Fixity};
use contcalc_core::iso::{check_iso, IsoBudget};
use contcalc_core::m::{self, DEFAULT_STATE_CAP};
use contcalc_core::{
    bisim_bounded, bisim_exact, ext_enumerate, Algebra, BoundedBisim, Budget, Coalgebra, Domain, ExactBisim, FElement,
    FamilyAssignment, MSeed, MachineRegistry, Value, Witness,
};

use crate::error::CliError;
use crate::formats::{decls_from_text, machines_from_text, RuleAlgebra, StateEquations};
use crate::text::parse_value;

pub const DEFAULT_HEIGHT: usize = 6;
pub const DEFAULT_PATHS: usize = 16;
pub const DEFAULT_DEPTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

/// Declarations and machines loaded for one command.
pub struct Session {
    pub decls: Vec<Decl>,
    pub registry: Arc<MachineRegistry>,
}

impl Session {
    pub fn load(decls: Option<&Path>, machines: Option<&Path>) -> Result<Self, CliError> {
        let decls = match decls {
            Some(p) => decls_from_text(&file_name(p), &read(p)?)?,
            None => Vec::new(),
        };
        let mut registry = MachineRegistry::new();
        if let Some(p) = machines {
            for m in machines_from_text(&file_name(p), &read(p)?)? {
                registry.register(m)?;
            }
        }
        Ok(Session { decls, registry: Arc::new(registry) })
    }

    pub fn elaborate(&self, name: &str) -> Result<Elaboration, CliError> {
        let d = self
            .decls
            .iter()
            .find(|d| &*d.name == name)
            .ok_or_else(|| CliError::Usage(format!("no declaration named `{name}`")))?;
        Ok(elaborate_with(d, self.registry.clone())?)
    }

    /// Parses `name` or `name.state`; a bare name means the first state.
    pub fn seed(&self, spec: &str) -> Result<MSeed, CliError> {
        let (name, state) = match spec.split_once('.') {
            Some((n, s)) => (n, Some(s)),
            None => (spec, None),
        };
        let machine = self.registry.get(name).ok_or_else(|| CliError::UnknownMachine(name.to_string()))?.clone();
        Ok(match state {
            Some(s) => MSeed::named(machine, s)?,
            None => MSeed::new(machine, 0)?,
        })
    }
}

/// Parses `A=a,b,c` (named atoms) or `A=3` (atoms `a0, a1, a2`).
pub fn parse_x_spec(spec: &str) -> Result<(String, Domain), CliError> {
    let (name, rhs) =
        spec.split_once('=').ok_or_else(|| CliError::Usage(format!("`{spec}`: expected NAME=atoms or NAME=count")))?;
    let name = name.trim().to_string();
    let rhs = rhs.trim();
    let atoms: Vec<String> = match rhs.parse::<usize>() {
        Ok(n) => (0..n).map(|k| format!("{}{k}", name.to_lowercase())).collect(),
        Err(_) if rhs.is_empty() => Vec::new(),
        Err(_) => rhs.split(',').map(|s| s.trim().to_string()).collect(),
    };
    if atoms.iter().any(|a| a.is_empty() || !a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')) {
        return Err(CliError::Usage(format!("`{spec}`: atom names are letters, digits, `_` and `'`")));
    }
    Ok((name, Domain::atoms(&atoms)))
}

/// The parameter assignment from `--x` flags, in declaration order.
/// Missing parameters take `fallback(name)` or are an error.
fn assignment(
    decl: &Decl,
    specs: &[String],
    fallback: Option<&dyn Fn(&str) -> Domain>,
) -> Result<FamilyAssignment, CliError> {
    let parsed: Vec<(String, Domain)> = specs.iter().map(|s| parse_x_spec(s)).collect::<Result<_, _>>()?;
    for (n, _) in &parsed {
        if !decl.params.iter().any(|p| **p == **n) {
            return Err(CliError::Usage(format!("`{}` has no parameter `{n}`", decl.name)));
        }
    }
    let mut assign = Vec::new();
    for p in &decl.params {
        match (parsed.iter().rev().find(|(n, _)| **n == **p), fallback) {
            (Some((_, d)), _) => assign.push(d.clone()),
            (None, Some(f)) => assign.push(f(p)),
            (None, None) => return Err(CliError::Usage(format!("no domain for parameter `{p}`; pass --x {p}=...")))?,
        }
    }
    Ok(FamilyAssignment::new(assign))
}

fn verbose_header(out: &mut String, height: usize, paths: usize, depth: usize, limit: usize) {
    let _ = writeln!(
        out,
        "# budgets: height {height}, paths {paths}, depth {depth}, state cap {DEFAULT_STATE_CAP}, limit {limit}"
    );
}

pub fn elaborate(file: &Path) -> Result<Output, CliError> {
    let s = Session::load(Some(file), None)?;
    let mut out = String::new();
    for d in &s.decls {
        let e = s.elaborate(&d.name)?;
        let _ = writeln!(out, "{d}");
        let params: Vec<&str> = d.params.iter().map(|p| &**p).collect();
        let _ = writeln!(out, "  parameters: {}", if params.is_empty() { "none".into() } else { params.join(", ") });
        let _ = writeln!(out, "  signature shapes: {:?}", e.signature.shapes());
        match d.fixity {
            Fixity::Mu => {
                let _ = writeln!(out, "  shapes: W-domain (finite trees over the signature); positions: Pos paths");
            }
            Fixity::Nu => {
                let _ = writeln!(
                    out,
                    "  shapes: M-domain (regular trees presented by coalgebra machines); positions: Pos paths"
                );
            }
        }
    }
    Ok(Output::ok(out))
}

pub struct EnumerateArgs<'a> {
    pub file: &'a Path,
    pub decl: &'a str,
    pub x: &'a [String],
    pub machines: Option<&'a Path>,
    pub height: usize,
    pub limit: usize,
    pub count_only: bool,
    pub verbose: bool,
}

pub fn enumerate(a: EnumerateArgs<'_>) -> Result<Output, CliError> {
    let s = Session::load(Some(a.file), a.machines)?;
    let e = s.elaborate(a.decl)?;
    let mut out = String::new();
    if a.verbose {
        verbose_header(&mut out, a.height, DEFAULT_PATHS, DEFAULT_DEPTH, a.limit);
    }
    let budget = Budget::new(a.height, a.limit);
    let (count, lines, truncated) = match e.decl.fixity {
        Fixity::Mu => {
            let x = assignment(&e.decl, a.x, None)?;
            let els = ext_enumerate(&e.fixed, &x, budget)?;
            let mut lines = Vec::new();
            if !a.count_only {
                for el in &els.items {
                    lines.push(e.mu_to_term(&x, el)?.to_string());
                }
            }
            (els.items.len(), lines, els.truncated)
        }
        Fixity::Nu => {
            // Elements are listed by their shapes: the registered seeds up to
            // bisimilarity.
            let shapes = e.fixed.shapes().enumerate(budget);
            (shapes.items.len(), shapes.items.iter().map(|v| v.to_string()).collect(), shapes.truncated)
        }
    };
    if a.count_only {
        let _ = writeln!(out, "{count}");
    } else {
        for l in &lines {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "count: {count}");
    }
    if truncated {
        let _ = writeln!(out, "partial: the limit of {} elements was reached", a.limit);
        return Ok(Output { text: out, code: 3 });
    }
    Ok(Output::ok(out))
}

/// Parameter values of a nested `mu` term, per parameter.
fn param_values(e: &Elaboration, term: &Value, acc: &mut Vec<Vec<Value>>) -> Result<(), CliError> {
    let fe = e.encode(term)?;
    for (i, slot) in acc.iter_mut().enumerate() {
        if let Some(ps) = e.signature.params(i, &fe.shape).finite_elements() {
            slot.extend(ps.iter().filter_map(|p| fe.params.get(i, p)));
        }
    }
    for (_, t) in &fe.rec {
        param_values(e, t, acc)?;
    }
    Ok(())
}

fn infer_domain(name: &str, vals: &[Value]) -> Result<Domain, CliError> {
    if vals.iter().all(|v| matches!(v, Value::Atom(_))) {
        let mut names: Vec<String> =
            vals.iter().filter_map(|v| v.to_string().strip_prefix("atom:").map(String::from)).collect();
        names.sort();
        names.dedup();
        return Ok(Domain::atoms(&names));
    }
    if vals.iter().all(|v| matches!(v, Value::Nat(_))) {
        return Ok(Domain::Nat);
    }
    Err(CliError::Usage(format!("cannot infer a domain for `{name}`; pass --x {name}=...")))
}

pub fn fold(file: &Path, decl: &str, algebra: &Path, input: &str, x: &[String]) -> Result<Output, CliError> {
    let s = Session::load(Some(file), None)?;
    let e = s.elaborate(decl)?;
    if e.decl.fixity != Fixity::Mu {
        return Err(CliError::Usage(format!("`{decl}` is not a mu declaration")));
    }
    let alg = RuleAlgebra::from_text(&file_name(algebra), &read(algebra)?)?;
    let term = parse_value(input)?;
    let x = if x.is_empty() {
        let mut acc = vec![Vec::new(); e.decl.params.len()];
        param_values(&e, &term, &mut acc)?;
        let assign = e.decl.params.iter().zip(&acc).map(|(p, v)| infer_domain(p, v)).collect::<Result<_, _>>()?;
        FamilyAssignment::new(assign)
    } else {
        assignment(&e.decl, x, None)?
    };
    let el = e.mu_from_term(&x, &term)?;
    let this = e.clone();
    let act: Algebra<Result<Value, String>> = Algebra::new(move |fe: FElement<Result<Value, String>>| {
        let mut rec = Vec::with_capacity(fe.rec.len());
        for (q, r) in fe.rec {
            rec.push((q, r?));
        }
        let t = this.decode(&FElement { shape: fe.shape, params: fe.params, rec }).map_err(|e| e.to_string())?;
        alg.apply(&t)
    });
    let v = contcalc_core::w::fold(&e.signature, &x, &act, &el)?.map_err(CliError::Usage)?;
    Ok(Output::ok(format!("{v}\n")))
}

pub fn unfold(
    file: &Path,
    decl: &str,
    coalgebra: &Path,
    state: &str,
    paths: usize,
    verbose: bool,
) -> Result<Output, CliError> {
    let s = Session::load(Some(file), None)?;
    let e = s.elaborate(decl)?;
    if e.decl.fixity != Fixity::Nu {
        return Err(CliError::Usage(format!("`{decl}` is not a nu declaration")));
    }
    let eqs = StateEquations::from_text(&file_name(coalgebra), &read(coalgebra)?)?;
    if eqs.get(state).is_none() {
        return Err(CliError::Usage(format!("no state `{state}` in {}", coalgebra.display())));
    }
    let mut steps = Vec::new();
    for (name, t) in &eqs.equations {
        let v = t
            .close(&|x| Some(Value::atom(x)))
            .ok_or_else(|| CliError::Usage(format!("state `{name}`: wildcards and calls are not allowed")))?;
        let fe = e.encode(&v).map_err(|err| CliError::Usage(format!("state `{name}`: {err}")))?;
        for (_, target) in &fe.rec {
            let ok = matches!(target, Value::Atom(a) if eqs.get(a).is_some());
            if !ok {
                return Err(CliError::Usage(format!("state `{name}`: `{target}` is not a state")));
            }
        }
        steps.push((Value::atom(name), fe));
    }
    let names: Vec<&str> = eqs.equations.iter().map(|(n, _)| n.as_str()).collect();
    let steps = Arc::new(steps);
    let lookup = {
        let steps = steps.clone();
        move |y: &Value| steps.iter().position(|(k, _)| k == y)
    };
    let (l1, l2, l3) = (lookup.clone(), lookup.clone(), lookup);
    let (s1, s2, s3) = (steps.clone(), steps.clone(), steps);
    let co = Coalgebra::new(
        Domain::atoms(&names),
        move |y| l1(y).map_or(Value::Unit, |k| s1[k].1.shape.clone()),
        move |y, i, p| l2(y).and_then(|k| s2[k].1.params.get(i, p)).unwrap_or(Value::Unit),
        move |y, q| l3(y).and_then(|k| s3[k].1.child(q).cloned()).unwrap_or(Value::Unit),
    );
    let el = m::unfold(&e.signature, &co, &Value::atom(state))?;
    let seed = el.shape.as_seed().ok_or_else(|| CliError::Usage("unfold did not produce a seed".into()))?;
    let (machine, root) = seed.machine().canonical_from(seed.state());
    let machine = Arc::new(machine);
    let shown = MSeed::new(machine.clone(), root)?;
    let mut out = String::new();
    if verbose {
        verbose_header(&mut out, DEFAULT_HEIGHT, paths, DEFAULT_DEPTH, Budget::DEFAULT_COUNT);
    }
    let _ = write!(out, "{machine}");
    let _ = writeln!(out, "seed: {shown}");
    let mut all = Vec::new();
    if paths > 0 {
        for i in 0..e.decl.params.len() {
            all.extend(m::pos_enumerate_m(&e.signature, &shown, i, paths - 1).items);
        }
    }
    all.sort();
    let mut values = Vec::with_capacity(all.len());
    for p in &all {
        let v = el.payload.get(p.index, &Value::path(p.clone()));
        let v = v.map_or_else(|| "undefined".to_string(), |v| v.to_string());
        let _ = writeln!(out, "{p} -> {v}");
        values.push(v);
    }
    let _ = writeln!(out, "payloads: {}", values.join(" "));
    Ok(Output::ok(out))
}

fn render_witness(out: &mut String, w: &Witness) {
    let _ = writeln!(out, "distinct");
    let _ = writeln!(out, "witness (length {}): {w}", w.len());
}

pub fn bisim(machines: &Path, m0: &str, m1: &str, depth: Option<usize>, exact: bool) -> Result<Output, CliError> {
    let s = Session::load(None, Some(machines))?;
    let (a, b) = (s.seed(m0)?, s.seed(m1)?);
    let mut out = String::new();
    if exact {
        return Ok(match bisim_exact(&a, &b) {
            ExactBisim::Equal => Output::ok("equal\n".into()),
            ExactBisim::Distinct(w) => {
                render_witness(&mut out, &w);
                Output { text: out, code: 1 }
            }
        });
    }
    let k = depth.unwrap_or(DEFAULT_DEPTH);
    Ok(match bisim_bounded(&a, &b, k) {
        BoundedBisim::BisimilarTo(k) => Output::ok(format!("bisimilar to depth {k}\n")),
        BoundedBisim::Distinct(w) => {
            render_witness(&mut out, &w);
            Output { text: out, code: 1 }
        }
        BoundedBisim::Exhausted => Output { text: "exhausted: the pair budget was reached\n".into(), code: 3 },
    })
}

pub struct CheckArgs<'a> {
    pub file: &'a Path,
    pub decl: &'a str,
    pub x: &'a [String],
    pub machines: Option<&'a Path>,
    pub height: usize,
    pub paths: usize,
    pub depth: usize,
    pub verbose: bool,
}

pub fn check_iso_cmd(a: CheckArgs<'_>) -> Result<Output, CliError> {
    let s = Session::load(Some(a.file), a.machines)?;
    let e = s.elaborate(a.decl)?;
    let two_atoms = |p: &str| {
        let base = p.to_lowercase();
        Domain::atoms(&[format!("{base}0"), format!("{base}1")])
    };
    let x = assignment(&e.decl, a.x, Some(&two_atoms))?;
    let mut out = String::new();
    if a.verbose {
        verbose_header(&mut out, a.height, a.paths, a.depth, Budget::DEFAULT_COUNT);
    }
    let budget = IsoBudget { height: a.height, paths: a.paths, depth: a.depth, count: Budget::DEFAULT_COUNT };
    let report = check_iso(&e, &x, &s.registry, budget);
    let _ = write!(out, "{report}");
    Ok(Output { text: out, code: if report.passed() { 0 } else { 1 } })
}
