//! Line-oriented model files.
//!
//! ```text
//! # comment
//! var NAME : chance|decision|value [literals TRUE_LABEL FALSE_LABEL]
//! influence SRC -> DST : SIGN [| VAR=LITERAL {, VAR=LITERAL}]
//! inform SRC -> DST
//! depend A -- B
//! ```
//!
//! `influence` lines may repeat for the same pair; each adds one entry.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::network::{Condition, Influence, Network, VarKind, Variable};
use crate::sign::Sign;

type ParseResult<T> = std::result::Result<T, ParseError>;

pub fn parse(text: &str) -> ParseResult<Network> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut net = Network::new();
    // variables first so links may reference later declarations
    for &(no, line) in &lines {
        let (keyword, rest) = split_keyword(line);
        if keyword == "var" {
            let var = parse_var(no, rest)?;
            net.add_variable(var)
                .map_err(|e| ParseError::new(no, e.to_string()))?;
        }
    }
    for &(no, line) in &lines {
        let (keyword, rest) = split_keyword(line);
        match keyword {
            "var" => {}
            "influence" => {
                let inf = parse_influence(no, rest, &net)?;
                net.add_influence(inf);
            }
            "inform" => {
                let (s, d) = parse_arrow(no, rest, "->")?;
                known(no, &net, &s)?;
                known(no, &net, &d)?;
                net.add_informational(s, d);
            }
            "depend" => {
                let (a, b) = parse_arrow(no, rest, "--")?;
                known(no, &net, &a)?;
                known(no, &net, &b)?;
                net.add_dependence(a, b);
            }
            other => {
                return Err(ParseError::new(no, format!("unknown statement `{other}`")));
            }
        }
    }
    Ok(net)
}

fn split_keyword(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (line, ""),
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '\'')
        && !s.starts_with('-')
}

fn known(no: usize, net: &Network, name: &str) -> ParseResult<()> {
    if net.contains(name) {
        Ok(())
    } else {
        Err(ParseError::new(no, format!("unknown variable `{name}`")))
    }
}

fn parse_var(no: usize, rest: &str) -> ParseResult<Variable> {
    let (name, decl) = rest
        .split_once(':')
        .ok_or_else(|| ParseError::new(no, "expected `var NAME : KIND`"))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(ParseError::new(no, format!("invalid variable name `{name}`")));
    }
    let mut toks = decl.split_whitespace();
    let kind = match toks.next() {
        Some("chance") => VarKind::Chance,
        Some("decision") => VarKind::Decision,
        Some("value") => VarKind::Value,
        Some(other) => return Err(ParseError::new(no, format!("unknown kind `{other}`"))),
        None => return Err(ParseError::new(no, "missing variable kind")),
    };
    let mut var = Variable::new(name, kind);
    match toks.next() {
        None => {}
        Some("literals") => {
            let labels: Vec<&str> = toks.collect();
            match labels.as_slice() {
                [t, f] => {
                    if t == f {
                        return Err(ParseError::new(no, "literal labels must differ"));
                    }
                    var = var.with_labels(*t, *f);
                }
                [] | [_] => return Err(ParseError::new(no, "`literals` needs two labels")),
                _ => {
                    return Err(ParseError::new(
                        no,
                        format!(
                            "variable `{name}` declares {} literals; only binary variables are supported",
                            labels.len()
                        ),
                    ))
                }
            }
        }
        Some(other) => {
            return Err(ParseError::new(no, format!("unexpected `{other}` after kind")));
        }
    }
    Ok(var)
}

fn parse_arrow(no: usize, rest: &str, arrow: &str) -> ParseResult<(String, String)> {
    let (a, b) = rest
        .split_once(arrow)
        .ok_or_else(|| ParseError::new(no, format!("expected `A {arrow} B`")))?;
    let (a, b) = (a.trim(), b.trim());
    if !is_ident(a) || !is_ident(b) {
        return Err(ParseError::new(no, format!("malformed link `{rest}`")));
    }
    Ok((a.to_string(), b.to_string()))
}

fn parse_influence(no: usize, rest: &str, net: &Network) -> ParseResult<Influence> {
    let (link, body) = rest
        .split_once(':')
        .ok_or_else(|| ParseError::new(no, "expected `influence SRC -> DST : SIGN`"))?;
    let (src, dst) = parse_arrow(no, link, "->")?;
    known(no, net, &src)?;
    known(no, net, &dst)?;
    let (sign, cond) = match body.split_once('|') {
        Some((s, c)) => (s.trim(), Some(c.trim())),
        None => (body.trim(), None),
    };
    let sign: Sign = sign
        .parse()
        .map_err(|e: ParseError| ParseError::new(no, e.message))?;
    let mut literals = Vec::new();
    if let Some(cond) = cond {
        for lit in cond.split(',') {
            let (var, label) = lit
                .trim()
                .split_once('=')
                .ok_or_else(|| ParseError::new(no, format!("expected VAR=LITERAL, got `{}`", lit.trim())))?;
            let (var, label) = (var.trim(), label.trim());
            let v = net
                .variable(var)
                .ok_or_else(|| ParseError::new(no, format!("unknown variable `{var}`")))?;
            let value = v.value_of(label).ok_or_else(|| {
                ParseError::new(no, format!("`{label}` is not a literal of `{var}`"))
            })?;
            if literals.iter().any(|(n, _): &(String, bool)| n == var) {
                return Err(ParseError::new(no, format!("`{var}` appears twice in condition")));
            }
            literals.push((var.to_string(), value));
        }
    }
    Ok(Influence::new(
        src,
        dst,
        [(Condition::from_literals(literals), sign)],
    ))
}

/// Canonical text: variables in declaration order, then influences, informational
/// links and dependences sorted by endpoint names.
pub fn serialize(net: &Network) -> String {
    let mut out = String::new();
    for v in net.variables() {
        let _ = write!(out, "var {} : {}", v.name, v.kind);
        if !v.has_default_labels() {
            let _ = write!(out, " literals {} {}", v.true_label, v.false_label);
        }
        out.push('\n');
    }
    for inf in net.influences() {
        let entries: Vec<(Condition, Sign)> = if inf.is_empty() {
            vec![(Condition::truth(), Sign::Unknown)]
        } else {
            inf.entries().to_vec()
        };
        for (c, s) in entries {
            let _ = write!(out, "influence {} -> {} : {s}", inf.source, inf.target);
            if !c.is_true() {
                let _ = write!(out, " | {}", net.fmt_condition(&c));
            }
            out.push('\n');
        }
    }
    for (s, d) in net.informational_links() {
        let _ = writeln!(out, "inform {s} -> {d}");
    }
    for (a, b) in net.dependences() {
        let _ = writeln!(out, "depend {a} -- {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{test_treat, TEST_TREAT_MODEL};

    #[test]
    fn builtin_model_round_trips() {
        let net = parse(TEST_TREAT_MODEL).unwrap();
        let text = serialize(&net);
        assert_eq!(parse(&text).unwrap(), net);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
        assert_eq!(net, test_treat());
    }

    #[test]
    fn conditional_entries_accumulate() {
        let net = parse(
            "var a : chance\nvar b : chance\nvar y : chance\nvar u : value\n\
             influence a -> b : + | y=Y\ninfluence a -> b : ? | y=~Y\ninfluence b -> u : -\n",
        )
        .unwrap();
        assert_eq!(net.influence("a", "b").unwrap().entries().len(), 2);
        assert!(net.is_valid());
    }

    #[test]
    fn multi_valued_variables_are_rejected() {
        let err = parse("var a : chance literals L M H\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("only binary"));
    }

    #[test]
    fn diagnostics_name_the_line() {
        let err = parse("var a : chance\n\ninfluence a -> zz : +\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("zz"));
        let err = parse("var a : chance\nvar b : chance\ninfluence a -> b : + | a=Q\n").unwrap_err();
        assert!(err.message.contains("not a literal"));
        assert!(parse("var a : gizmo\n").is_err());
        assert!(parse("influence\n").is_err());
    }

    #[test]
    fn empty_file_parses_to_empty_network() {
        let net = parse("# nothing\n\n").unwrap();
        assert_eq!(net.validate()[0].message, "no value node");
    }
}
