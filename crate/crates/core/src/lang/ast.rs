use std::fmt::{self, Display};

use serde::Serialize;

/// A source position, 1-based. Synthesized nodes carry `0:0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn new(line: usize, column: usize) -> Self {
        Span { line, column }
    }
}

impl Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub width: u32,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "=",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; higher binds tighter. `not` sits at 3.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Lt | BinOp::Le | BinOp::Eq => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Eq)
    }
}

const NOT_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Bool(bool),
    Var(String),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }

    pub fn int(n: i64) -> Self {
        Expr::new(ExprKind::Int(n))
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(name.to_string()))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::new(ExprKind::Bin(op, Box::new(l), Box::new(r)))
    }

    pub fn not(e: Expr) -> Self {
        Expr::new(ExprKind::Not(Box::new(e)))
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Bin(op, ..) => op.precedence(),
            ExprKind::Not(_) => NOT_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    /// Structural equality ignoring source positions.
    pub fn same_shape(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Not(a), ExprKind::Not(b)) => a.same_shape(b),
            (ExprKind::Bin(o1, a1, b1), ExprKind::Bin(o2, a2, b2)) => o1 == o2 && a1.same_shape(a2) && b1.same_shape(b2),
            (a, b) => a == b,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Bool(b) => write!(f, "{b}"),
            ExprKind::Var(v) => write!(f, "{v}"),
            ExprKind::Not(e) => {
                write!(f, "not ")?;
                write_operand(f, e, NOT_PRECEDENCE)
            }
            ExprKind::Bin(op, l, r) => {
                let p = op.precedence();
                // Comparisons do not chain, so both sides need to bind tighter.
                let left_min = if op.is_comparison() { p + 1 } else { p };
                write_operand(f, l, left_min)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r, p + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Skip,
    Assign(String, Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, span: Span::default() }
    }

    pub fn same_shape(&self, other: &Stmt) -> bool {
        let blocks = |a: &[Stmt], b: &[Stmt]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_shape(y));
        match (&self.kind, &other.kind) {
            (StmtKind::Skip, StmtKind::Skip) => true,
            (StmtKind::Assign(v, e), StmtKind::Assign(w, g)) => v == w && e.same_shape(g),
            (StmtKind::If(c, t, e), StmtKind::If(d, u, g)) => c.same_shape(d) && blocks(t, u) && blocks(e, g),
            (StmtKind::While(c, b), StmtKind::While(d, g)) => c.same_shape(d) && blocks(b, g),
            _ => false,
        }
    }
}

/// Declarations followed by a (possibly empty) statement sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

impl Program {
    pub fn same_shape(&self, other: &Program) -> bool {
        self.decls.len() == other.decls.len()
            && self.decls.iter().zip(&other.decls).all(|(a, b)| a.name == b.name && a.width == b.width)
            && self.body.len() == other.body.len()
            && self.body.iter().zip(&other.body).all(|(a, b)| a.same_shape(b))
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, stmts: &[Stmt], indent: usize) -> fmt::Result {
    for (i, s) in stmts.iter().enumerate() {
        write_stmt(f, s, indent)?;
        if i + 1 < stmts.len() {
            write!(f, ";")?;
        }
        writeln!(f)?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, indent: usize) -> fmt::Result {
    let pad = "  ".repeat(indent);
    match &s.kind {
        StmtKind::Skip => write!(f, "{pad}skip"),
        StmtKind::Assign(v, e) => write!(f, "{pad}{v} := {e}"),
        StmtKind::If(c, t, e) => {
            writeln!(f, "{pad}if {c} then")?;
            write_block(f, t, indent + 1)?;
            writeln!(f, "{pad}else")?;
            write_block(f, e, indent + 1)?;
            write!(f, "{pad}fi")
        }
        StmtKind::While(c, b) => {
            writeln!(f, "{pad}while {c} do")?;
            write_block(f, b, indent + 1)?;
            write!(f, "{pad}od")
        }
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "var {}:{};", d.name, d.width)?;
        }
        write_block(f, &self.body, 0)
    }
}
