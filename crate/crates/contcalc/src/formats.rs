//! File formats: declaration files, machine files, algebra files and
//! coalgebra files. Every format is line based; `#` starts a comment.

use std::collections::BTreeMap;

use contcalc_core::elaborator::{parse_decls, Decl};
use contcalc_core::{CoalgebraMachine, Value};

use crate::error::{CliError, Located};
use crate::text::{Cursor, Term, Tok};

/// Code lines of `text` with their byte offsets, comments stripped.
fn code_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut base = 0;
    text.split('\n').filter_map(move |line| {
        let start = base;
        base += line.len() + 1;
        let code = line.split('#').next().unwrap_or("");
        (!code.trim().is_empty()).then_some((start, code))
    })
}

pub fn decls_from_text(file: &str, text: &str) -> Result<Vec<Decl>, CliError> {
    parse_decls(text).map_err(|e| CliError::Parse {
        file: file.to_string(),
        line: e.line,
        col: e.col,
        message: e.message,
    })
}

/// Parses a machine file:
///
/// ```text
/// machine <name>
/// <state> : shape <value> ; <position> -> <state> ; ...
/// ```
pub fn machines_from_text(file: &str, text: &str) -> Result<Vec<CoalgebraMachine>, CliError> {
    type Row = (String, Value, Vec<(Value, String)>);
    let mut blocks: Vec<(String, usize, Vec<Row>)> = Vec::new();
    for (start, line) in code_lines(text) {
        let located = |e: Located| e.shifted(start).in_text(file, text);
        let mut c = Cursor::new(line).map_err(located)?;
        if matches!(c.peek(), Tok::Ident(w) if w == "machine") {
            c.bump();
            let name = c.name("a machine name").map_err(located)?;
            if !c.at_end() {
                return Err(located(c.fail::<()>("end of line").unwrap_err()));
            }
            if blocks.iter().any(|(n, _, _)| *n == name) {
                return Err(located(Located { offset: 0, message: format!("machine `{name}` is defined twice") }));
            }
            blocks.push((name, start, Vec::new()));
            continue;
        }
        let Some((_, _, rows)) = blocks.last_mut() else {
            return Err(located(Located { offset: 0, message: "expected `machine <name>` before states".into() }));
        };
        let row = (|| {
            let id = c.name("a state name")?;
            c.expect(":")?;
            if !matches!(c.peek(), Tok::Ident(w) if w == "shape") {
                return c.fail("`shape`");
            }
            c.bump();
            let shape = closed(&mut c)?;
            let mut next = Vec::new();
            while c.eat(";") {
                let q = closed(&mut c)?;
                c.expect("->")?;
                next.push((q, c.name("a state name")?));
            }
            if !c.at_end() {
                return c.fail("`;` or end of line");
            }
            Ok((id, shape, next))
        })()
        .map_err(located)?;
        rows.push(row);
    }
    blocks
        .into_iter()
        .map(|(name, start, rows)| {
            CoalgebraMachine::new(&name, rows)
                .map_err(|e| Located { offset: start, message: e.to_string() }.in_text(file, text))
        })
        .collect()
}

fn closed(c: &mut Cursor) -> Result<Value, Located> {
    let at = c.offset();
    let t = c.term()?;
    t.to_value().ok_or(Located { offset: at, message: "expected a closed value".into() })
}

/// An algebra given by rules `pattern => expression`, tried in order.
#[derive(Clone, Debug)]
pub struct RuleAlgebra {
    rules: Vec<(Term, Term)>,
}

fn check_pattern(t: &Term) -> bool {
    match t {
        Term::Call(..) => false,
        Term::Inl(a) | Term::Inr(a) => check_pattern(a),
        Term::Pair(a, b) => check_pattern(a) && check_pattern(b),
        Term::Table(items) => items.iter().all(check_pattern),
        _ => true,
    }
}

impl RuleAlgebra {
    pub fn from_text(file: &str, text: &str) -> Result<Self, CliError> {
        let mut rules = Vec::new();
        for (start, line) in code_lines(text) {
            let located = |e: Located| e.shifted(start).in_text(file, text);
            let mut c = Cursor::new(line).map_err(located)?;
            let at = c.offset();
            let pat = c.term().map_err(located)?;
            if !check_pattern(&pat) {
                return Err(located(Located {
                    offset: at,
                    message: "function calls are not allowed in patterns".into(),
                }));
            }
            c.expect("=>").map_err(located)?;
            let body = c.term().map_err(located)?;
            if !c.at_end() {
                return Err(located(c.fail::<()>("end of line").unwrap_err()));
            }
            rules.push((pat, body));
        }
        if rules.is_empty() {
            return Err(CliError::Parse { file: file.into(), line: 1, col: 1, message: "no rules".into() });
        }
        Ok(RuleAlgebra { rules })
    }

    /// Applies the first matching rule.
    pub fn apply(&self, v: &Value) -> Result<Value, String> {
        for (pat, body) in &self.rules {
            let mut env = BTreeMap::new();
            if matches(pat, v, &mut env) {
                return eval(body, &env);
            }
        }
        Err(format!("no rule matches {v}"))
    }
}

fn matches(p: &Term, v: &Value, env: &mut BTreeMap<String, Value>) -> bool {
    match (p, v) {
        (Term::Wild, _) => true,
        (Term::Var(x), _) => match env.get(x) {
            Some(w) => w == v,
            None => {
                env.insert(x.clone(), v.clone());
                true
            }
        },
        (Term::Unit, Value::Unit) => true,
        (Term::Lit(a), b) => a == b,
        (Term::Inl(a), Value::Inl(b)) | (Term::Inr(a), Value::Inr(b)) => matches(a, b, env),
        (Term::Pair(a, b), Value::Pair(x, y)) => matches(a, x, env) && matches(b, y, env),
        (Term::Table(ps), Value::Table(vs)) => {
            ps.len() == vs.len() && ps.iter().zip(vs.iter()).all(|(p, v)| matches(p, v, env))
        }
        _ => false,
    }
}

fn nat(v: &Value) -> Result<u64, String> {
    match v {
        Value::Nat(n) => Ok(*n),
        other => Err(format!("expected a natural number, found {other}")),
    }
}

fn eval(t: &Term, env: &BTreeMap<String, Value>) -> Result<Value, String> {
    Ok(match t {
        Term::Var(x) => env.get(x).cloned().ok_or_else(|| format!("unbound variable `{x}`"))?,
        Term::Wild => return Err("`_` cannot be used in an expression".into()),
        Term::Unit => Value::Unit,
        Term::Lit(v) => v.clone(),
        Term::Inl(a) => Value::inl(eval(a, env)?),
        Term::Inr(a) => Value::inr(eval(a, env)?),
        Term::Pair(a, b) => Value::pair(eval(a, env)?, eval(b, env)?),
        Term::Table(items) => Value::table(items.iter().map(|t| eval(t, env)).collect::<Result<_, _>>()?),
        Term::Call(f, args) => {
            let args: Vec<Value> = args.iter().map(|a| eval(a, env)).collect::<Result<_, _>>()?;
            let arith = |op: fn(u64, u64) -> Option<u64>| -> Result<Value, String> {
                match args.as_slice() {
                    [a, b] => op(nat(a)?, nat(b)?).map(Value::Nat).ok_or_else(|| format!("`{f}` overflows")),
                    _ => Err(format!("`{f}` takes two arguments")),
                }
            };
            match f.as_str() {
                "succ" => match args.as_slice() {
                    [a] => Value::Nat(nat(a)?.checked_add(1).ok_or("`succ` overflows")?),
                    _ => return Err("`succ` takes one argument".into()),
                },
                "add" => arith(u64::checked_add)?,
                "mul" => arith(u64::checked_mul)?,
                "max" => arith(|a, b| Some(a.max(b)))?,
                "min" => arith(|a, b| Some(a.min(b)))?,
                other => return Err(format!("unknown function `{other}`")),
            }
        }
    })
}

/// A coalgebra given by equations `state = term`, where recursive
/// positions of the term name states.
#[derive(Clone, Debug)]
pub struct StateEquations {
    pub equations: Vec<(String, Term)>,
}

impl StateEquations {
    pub fn from_text(file: &str, text: &str) -> Result<Self, CliError> {
        let mut equations: Vec<(String, Term)> = Vec::new();
        for (start, line) in code_lines(text) {
            let located = |e: Located| e.shifted(start).in_text(file, text);
            let mut c = Cursor::new(line).map_err(located)?;
            let at = c.offset();
            let name = c.name("a state name").map_err(located)?;
            if equations.iter().any(|(n, _)| *n == name) {
                return Err(located(Located { offset: at, message: format!("state `{name}` is defined twice") }));
            }
            c.expect("=").map_err(located)?;
            let t = c.term().map_err(located)?;
            if !c.at_end() {
                return Err(located(c.fail::<()>("end of line").unwrap_err()));
            }
            equations.push((name, t));
        }
        Ok(StateEquations { equations })
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.equations.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONAT: &str = "# conaturals\nmachine two\nn0 : shape inr unit ; unit -> n1\nn1 : shape inl unit\n";

    #[test]
    fn machine_files_round_trip() {
        let ms = machines_from_text("m", CONAT).unwrap();
        assert_eq!(ms.len(), 1);
        let rendered = ms[0].to_string();
        assert_eq!(rendered, "machine two\nn0 : shape inr unit ; unit -> n1\nn1 : shape inl unit\n");
        assert_eq!(machines_from_text("m", &rendered).unwrap(), ms);
    }

    #[test]
    fn machine_errors_are_located() {
        let e = machines_from_text("m.txt", "machine a\ns : shape inr unit ; unit -> t\n").unwrap_err();
        assert!(e.to_string().starts_with("m.txt:1:1:"), "{e}");
        let e = machines_from_text("m.txt", "machine a\ns : shap unit\n").unwrap_err();
        assert!(e.to_string().starts_with("m.txt:2:5:"), "{e}");
    }

    #[test]
    fn length_algebra() {
        let alg = RuleAlgebra::from_text("a", "inl unit => 0\ninr (_ , n) => succ(n)\n").unwrap();
        assert_eq!(alg.apply(&Value::inl(Value::Unit)).unwrap(), Value::Nat(0));
        assert_eq!(alg.apply(&Value::inr(Value::pair(Value::atom("r"), Value::Nat(2)))).unwrap(), Value::Nat(3));
        assert!(alg.apply(&Value::Unit).is_err());
    }

    #[test]
    fn equations() {
        let eqs = StateEquations::from_text("c", "r = inr (atom:r , e)\ne = inl unit\n").unwrap();
        assert_eq!(eqs.equations.len(), 2);
        assert!(StateEquations::from_text("c", "r = unit\nr = unit\n").is_err());
    }
}
