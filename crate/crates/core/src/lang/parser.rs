use std::collections::HashMap;

use super::ast::{BinOp, Decl, Expr, ExprKind, Program, Span, Stmt, StmtKind};
use crate::error::{Error, Result};

/// Widths a variable may be declared with.
pub const MAX_WIDTH: u32 = 63;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

const KEYWORDS: [&str; 14] = [
    "var", "skip", "if", "then", "else", "fi", "while", "do", "od", "true", "false", "and", "or", "not",
];

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(n) => format!("integer {n}"),
        Tok::Kw(k) | Tok::Sym(k) => format!("`{k}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let syntax = |line, column, message: String| Error::Syntax { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse()
                .map_err(|_| syntax(line, col, format!("integer literal {text} out of range")))?;
            col += i - start;
            out.push((Tok::Int(n), span));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match KEYWORDS.iter().find(|k| **k == text) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(text),
            };
            out.push((tok, span));
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = match two.as_str() {
                ":=" => Some(":="),
                "<=" => Some("<="),
                _ => None,
            };
            let sym = match sym {
                Some(s) => s,
                None => match c {
                    ':' => ":",
                    ';' => ";",
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '<' => "<",
                    '=' => "=",
                    '(' => "(",
                    ')' => ")",
                    _ => return Err(syntax(line, col, format!("unexpected character `{c}`"))),
                },
            };
            i += sym.len();
            col += sym.len();
            out.push((Tok::Sym(sym), span));
        }
    }
    out.push((Tok::Eof, Span::new(line, col)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Int,
    Bool,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Bool => "bool",
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vars: HashMap<String, u32>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T> {
        let s = self.span();
        Err(Error::Syntax {
            line: s.line,
            column: s.column,
            message,
        })
    }

    fn expect_kw(&mut self, kw: &'static str) -> Result<Span> {
        if *self.peek() == Tok::Kw(kw) {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected `{kw}`, found {}", describe(self.peek())))
        }
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<Span> {
        if *self.peek() == Tok::Sym(sym) {
            Ok(self.bump().1)
        } else {
            self.error(format!("expected `{sym}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok((name, span))
            }
            t => self.error(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut decls = Vec::new();
        while *self.peek() == Tok::Kw("var") {
            let span = self.bump().1;
            let (name, name_span) = self.ident()?;
            self.expect_sym(":")?;
            let width_span = self.span();
            let width = match self.bump().0 {
                Tok::Int(w) if (1..=MAX_WIDTH as i64).contains(&w) => w as u32,
                t => {
                    return Err(Error::Syntax {
                        line: width_span.line,
                        column: width_span.column,
                        message: format!("expected a width between 1 and {MAX_WIDTH}, found {}", describe(&t)),
                    })
                }
            };
            self.expect_sym(";")?;
            if self.vars.insert(name.clone(), width).is_some() {
                return Err(Error::Type {
                    line: name_span.line,
                    column: name_span.column,
                    message: format!("variable `{name}` declared twice"),
                });
            }
            decls.push(Decl { name, width, span });
        }
        let body = if *self.peek() == Tok::Eof { Vec::new() } else { self.block()? };
        if *self.peek() != Tok::Eof {
            return self.error(format!("expected `;` or end of input, found {}", describe(self.peek())));
        }
        Ok(Program { decls, body })
    }

    fn starts_stmt(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Kw("skip") | Tok::Kw("if") | Tok::Kw("while"))
    }

    /// `stmt (";" stmt)* ";"?`
    fn block(&mut self) -> Result<Vec<Stmt>> {
        let mut out = vec![self.stmt()?];
        while *self.peek() == Tok::Sym(";") {
            self.bump();
            if !self.starts_stmt() {
                break;
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let span = self.span();
        let kind = match self.peek().clone() {
            Tok::Kw("skip") => {
                self.bump();
                StmtKind::Skip
            }
            Tok::Kw("if") => {
                self.bump();
                let c = self.typed(Ty::Bool)?;
                self.expect_kw("then")?;
                let t = self.block()?;
                self.expect_kw("else")?;
                let e = self.block()?;
                self.expect_kw("fi")?;
                StmtKind::If(c, t, e)
            }
            Tok::Kw("while") => {
                self.bump();
                let c = self.typed(Ty::Bool)?;
                self.expect_kw("do")?;
                let b = self.block()?;
                self.expect_kw("od")?;
                StmtKind::While(c, b)
            }
            Tok::Ident(name) => {
                self.bump();
                if !self.vars.contains_key(&name) {
                    return Err(Error::UndeclaredVariable {
                        name,
                        line: span.line,
                        column: span.column,
                    });
                }
                self.expect_sym(":=")?;
                let e = self.typed(Ty::Int)?;
                StmtKind::Assign(name, e)
            }
            t => return self.error(format!("expected a statement, found {}", describe(&t))),
        };
        Ok(Stmt { kind, span })
    }

    fn typed(&mut self, want: Ty) -> Result<Expr> {
        let (e, ty) = self.expr()?;
        if ty != want {
            return Err(Error::Type {
                line: e.span.line,
                column: e.span.column,
                message: format!("expected {}, found {} expression `{e}`", want.name(), ty.name()),
            });
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<(Expr, Ty)> {
        self.binary_level(1)
    }

    fn op_at(&self, level: u8) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::Kw("or") => BinOp::Or,
            Tok::Kw("and") => BinOp::And,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            _ => return None,
        };
        (op.precedence() == level).then_some(op)
    }

    fn binary_level(&mut self, level: u8) -> Result<(Expr, Ty)> {
        match level {
            3 => return self.not_expr(),
            7 => return self.atom(),
            _ => {}
        }
        let (mut lhs, mut lty) = self.binary_level(level + 1)?;
        while let Some(op) = self.op_at(level) {
            let op_span = self.bump().1;
            let (rhs, rty) = self.binary_level(level + 1)?;
            let (operand, result) = match op {
                BinOp::And | BinOp::Or => (Ty::Bool, Ty::Bool),
                BinOp::Lt | BinOp::Le | BinOp::Eq => (Ty::Int, Ty::Bool),
                _ => (Ty::Int, Ty::Int),
            };
            for (e, ty) in [(&lhs, lty), (&rhs, rty)] {
                if ty != operand {
                    return Err(Error::Type {
                        line: op_span.line,
                        column: op_span.column,
                        message: format!("`{}` expects {} operands, found {} `{e}`", op.symbol(), operand.name(), ty.name()),
                    });
                }
            }
            let span = lhs.span;
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
            lty = result;
            if op.is_comparison() && self.op_at(level).is_some() {
                return self.error("comparisons do not chain; add parentheses".to_string());
            }
        }
        Ok((lhs, lty))
    }

    fn not_expr(&mut self) -> Result<(Expr, Ty)> {
        if *self.peek() == Tok::Kw("not") {
            let span = self.bump().1;
            let (e, ty) = self.not_expr()?;
            if ty != Ty::Bool {
                return Err(Error::Type {
                    line: span.line,
                    column: span.column,
                    message: format!("`not` expects a bool operand, found int `{e}`"),
                });
            }
            return Ok((
                Expr {
                    kind: ExprKind::Not(Box::new(e)),
                    span,
                },
                Ty::Bool,
            ));
        }
        self.binary_level(4)
    }

    fn atom(&mut self) -> Result<(Expr, Ty)> {
        let span = self.span();
        let (kind, ty) = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                (ExprKind::Int(n), Ty::Int)
            }
            Tok::Kw("true") => {
                self.bump();
                (ExprKind::Bool(true), Ty::Bool)
            }
            Tok::Kw("false") => {
                self.bump();
                (ExprKind::Bool(false), Ty::Bool)
            }
            Tok::Ident(name) => {
                self.bump();
                if !self.vars.contains_key(&name) {
                    return Err(Error::UndeclaredVariable {
                        name,
                        line: span.line,
                        column: span.column,
                    });
                }
                (ExprKind::Var(name), Ty::Int)
            }
            Tok::Sym("(") => {
                self.bump();
                let (mut e, ty) = self.expr()?;
                self.expect_sym(")")?;
                e.span = span;
                return Ok((e, ty));
            }
            t => return self.error(format!("expected an expression, found {}", describe(&t))),
        };
        Ok((Expr { kind, span }, ty))
    }
}

/// Parse and type-check a program.
pub fn parse(src: &str) -> Result<Program> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: HashMap::new(),
    };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_assign() {
        let p = parse("var x:4; x := 3;").unwrap();
        assert_eq!(p.decls.len(), 1);
        assert_eq!(p.body.len(), 1);
        assert!(matches!(p.body[0].kind, StmtKind::Assign(ref v, _) if v == "x"));
        assert_eq!(p.body[0].span, Span::new(1, 10));
    }

    #[test]
    fn missing_od_reported_at_the_gap() {
        let err = parse("while true do skip").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, column: 19, .. }), "{err:?}");
    }

    #[test]
    fn undeclared_variable() {
        let err = parse("var x:4; x := y;").unwrap_err();
        assert!(matches!(err, Error::UndeclaredVariable { ref name, line: 1, column: 15 } if name == "y"), "{err:?}");
        assert!(matches!(parse("z := 1").unwrap_err(), Error::UndeclaredVariable { .. }));
    }

    #[test]
    fn type_errors() {
        assert!(matches!(parse("var x:4; x := true").unwrap_err(), Error::Type { .. }));
        assert!(matches!(parse("var x:4; while x do skip od").unwrap_err(), Error::Type { .. }));
        assert!(matches!(parse("var x:4; x := 1 + (x < 2)").unwrap_err(), Error::Type { .. }));
        assert!(matches!(parse("var x:4; var x:2;").unwrap_err(), Error::Type { .. }));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("var x:0;").unwrap_err(), Error::Syntax { .. }));
        assert!(matches!(parse("var x:64;").unwrap_err(), Error::Syntax { .. }));
        assert!(matches!(parse("var x:4; x := 1 < 2 < 3").unwrap_err(), Error::Syntax { .. }));
        assert!(matches!(parse("skip skip").unwrap_err(), Error::Syntax { .. }));
        assert!(matches!(parse("var x:4; x := $").unwrap_err(), Error::Syntax { line: 1, column: 15, .. }));
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(parse("").unwrap().body.is_empty());
        assert!(parse("// nothing\nvar x:3;\n").unwrap().body.is_empty());
    }

    #[test]
    fn precedence() {
        let p = parse("var x:8; if not x < 2 and true or false then x := 1 + 2 * x - 3 else skip fi").unwrap();
        let StmtKind::If(c, t, _) = &p.body[0].kind else { panic!() };
        assert_eq!(c.to_string(), "not x < 2 and true or false");
        let StmtKind::Assign(_, e) = &t[0].kind else { panic!() };
        assert_eq!(e.to_string(), "1 + 2 * x - 3");
        let ExprKind::Bin(BinOp::Sub, ..) = e.kind else { panic!("{e:?}") };
    }

    #[test]
    fn pretty_print_round_trip() {
        let src = "var x:8; var y:3;\nx:=0; while x<3 and (y = 0 or not y <= 2) do x:=x+1; if x = 2 then y := (y+1)*2 else skip fi od;";
        let p = parse(src).unwrap();
        let printed = p.to_string();
        let reparsed = parse(&printed).unwrap();
        assert!(p.same_shape(&reparsed));
        assert_eq!(reparsed.to_string(), printed);
        let q = parse("var a:4; a := a - (a - 1)").unwrap();
        assert_eq!(parse(&q.to_string()).unwrap().to_string(), q.to_string());
        assert!(q.to_string().contains("a - (a - 1)"));
    }
}
