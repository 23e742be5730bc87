//! Canonical text rendering. Output always reparses to the same AST.

use std::fmt::Write;

use super::ast::{Decl, Expr, ModuleAst, Stmt, NOT_PRECEDENCE};

const INDENT: &str = "  ";
const ATOM: u8 = 7;

/// Multi-line canonical rendering of a whole module.
pub fn pretty(m: &ModuleAst) -> String {
    let mut out = String::new();
    if let Some(entry) = &m.entry {
        let _ = writeln!(out, "main {entry}");
        if !m.decls.is_empty() {
            out.push('\n');
        }
    }
    for (i, d) in m.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&pretty_decl(d));
    }
    out
}

pub fn pretty_decl(d: &Decl) -> String {
    let mut out = String::new();
    let _ = write!(out, "{} {}", d.kind, d.name);
    if !d.params.is_empty() {
        let _ = write!(out, "({})", d.params.join(", "));
    }
    out.push('\n');
    block(&mut out, &d.body, 1);
    out.push_str("end\n");
    out
}

/// One-line rendering, e.g. `procedure S if H(code(S)) then Loop() end end`.
pub fn pretty_inline(d: &Decl) -> String {
    let mut out = format!("{} {}", d.kind, d.name);
    if !d.params.is_empty() {
        let _ = write!(out, "({})", d.params.join(", "));
    }
    for s in &d.body {
        out.push(' ');
        stmt_inline(&mut out, s);
    }
    out.push_str(" end");
    out
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt(out, s, depth);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = INDENT.repeat(depth);
    match s {
        Stmt::If {
            branches,
            otherwise,
        } => {
            for (i, (g, body)) in branches.iter().enumerate() {
                let kw = if i == 0 { "if" } else { "elseif" };
                let _ = writeln!(out, "{pad}{kw} {} then", expr(g));
                block(out, body, depth + 1);
            }
            if let Some(body) = otherwise {
                let _ = writeln!(out, "{pad}else");
                block(out, body, depth + 1);
            }
            let _ = writeln!(out, "{pad}end");
        }
        Stmt::While(g, body) => {
            let _ = writeln!(out, "{pad}while {} do", expr(g));
            block(out, body, depth + 1);
            let _ = writeln!(out, "{pad}end");
        }
        simple => {
            out.push_str(&pad);
            stmt_inline(out, simple);
            out.push('\n');
        }
    }
}

fn stmt_inline(out: &mut String, s: &Stmt) {
    match s {
        Stmt::Skip => out.push_str("skip"),
        Stmt::Assign(v, e) => {
            let _ = write!(out, "{v} := {}", expr(e));
        }
        Stmt::Call(name, args) => {
            let _ = write!(out, "{name}({})", arg_list(args));
        }
        Stmt::Return(e) => {
            let _ = write!(out, "return {}", expr(e));
        }
        Stmt::Error(msg) => {
            let _ = write!(out, "{}({})", super::ERROR_INTRINSIC, quote(msg));
        }
        Stmt::If {
            branches,
            otherwise,
        } => {
            for (i, (g, body)) in branches.iter().enumerate() {
                let kw = if i == 0 { "if" } else { " elseif" };
                let _ = write!(out, "{kw} {} then", expr(g));
                for s in body {
                    out.push(' ');
                    stmt_inline(out, s);
                }
            }
            if let Some(body) = otherwise {
                out.push_str(" else");
                for s in body {
                    out.push(' ');
                    stmt_inline(out, s);
                }
            }
            out.push_str(" end");
        }
        Stmt::While(g, body) => {
            let _ = write!(out, "while {} do", expr(g));
            for s in body {
                out.push(' ');
                stmt_inline(out, s);
            }
            out.push_str(" end");
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn arg_list(args: &[Expr]) -> String {
    args.iter().map(expr).collect::<Vec<_>>().join(", ")
}

pub fn expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Not(_) => NOT_PRECEDENCE,
        _ => ATOM,
    }
}

/// Writes `e`, parenthesised when its precedence is below `min`.
fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let prec = precedence(e);
    let paren = prec < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Code(name) => {
            let _ = write!(out, "code({name})");
        }
        Expr::Call(name, args) => {
            let _ = write!(out, "{name}({})", arg_list(args));
        }
        Expr::Not(inner) => {
            out.push_str("not ");
            write_expr(out, inner, NOT_PRECEDENCE);
        }
        Expr::Binary(op, l, r) => {
            // comparisons are non-associative, the rest associate left
            let left_min = if op.is_comparison() { prec + 1 } else { prec };
            write_expr(out, l, left_min);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, r, prec + 1);
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_unchecked;
    use super::*;

    #[test]
    fn skip_round_trip() {
        let m = parse_unchecked("procedure Skip skip end").unwrap();
        let text = pretty(&m);
        assert_eq!(text, "procedure Skip\n  skip\nend\n");
        assert_eq!(parse_unchecked(&text).unwrap(), m);
    }

    #[test]
    fn ifchain_layout_is_deterministic() {
        let a = parse_unchecked("procedure P if x=1 then skip elseif   x=2 then y:=1 else skip end end")
            .unwrap();
        let b = parse_unchecked(
            "procedure P\n if x = 1\n then skip\n elseif x = 2 then y := 1\n else\n skip end end",
        )
        .unwrap();
        assert_eq!(pretty(&a), pretty(&b));
        assert_eq!(
            pretty(&a),
            "procedure P\n  if x = 1 then\n    skip\n  elseif x = 2 then\n    y := 1\n  else\n    skip\n  end\nend\n"
        );
    }

    #[test]
    fn minimal_parentheses() {
        let m = parse_unchecked("procedure P x := (a - (b - c)) * (d + e); y := not (p and q) end")
            .unwrap();
        let text = pretty(&m);
        assert!(text.contains("x := (a - (b - c)) * (d + e)"), "{text}");
        assert!(text.contains("y := not (p and q)"), "{text}");
        assert_eq!(parse_unchecked(&text).unwrap(), m);
    }

    #[test]
    fn inline_rendering_reparses() {
        let src = "procedure S if H(code(S)) then Loop() end end";
        let m = parse_unchecked(src).unwrap();
        assert_eq!(pretty_inline(&m.decls[0]), src);
    }

    #[test]
    fn error_message_escapes() {
        let m = parse_unchecked(r#"procedure P Error("say \"hi\"") end"#).unwrap();
        let text = pretty(&m);
        assert_eq!(parse_unchecked(&text).unwrap(), m);
    }
}
