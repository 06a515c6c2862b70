use std::fmt::{self, Display};
use std::sync::Arc;

use either::Either::{self, Left, Right};
use serde::Serialize;

use super::ast::{BinOp, Decl, Expr, ExprKind, Program, Span, Stmt, StmtKind};
use crate::delay::{Delay, Machine};
use crate::error::{Error, Result};
use crate::partial::{self, Certificate, Partial, QuotientRep};

/// Values of the declared variables, each reduced modulo `2^width`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Store {
    decls: Arc<Vec<(String, u32)>>,
    values: Vec<u64>,
}

impl Store {
    /// All variables zero.
    pub fn zeros(p: &Program) -> Store {
        let decls: Vec<_> = p.decls.iter().map(|d| (d.name.clone(), d.width)).collect();
        Store {
            values: vec![0; decls.len()],
            decls: Arc::new(decls),
        }
    }

    /// A store for `p` with the given values; unmentioned variables are zero.
    pub fn with_values(p: &Program, values: &[(&str, u64)]) -> Result<Store> {
        let mut s = Store::zeros(p);
        for (name, v) in values {
            let i = s.index(name).ok_or_else(|| Error::StoreMismatch(format!("`{name}` is not declared")))?;
            if *v >= 1u64 << s.decls[i].1 {
                return Err(Error::StoreMismatch(format!("{v} does not fit in {} bits", s.decls[i].1)));
            }
            s.values[i] = *v;
        }
        Ok(s)
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.decls.iter().position(|(n, _)| n == name)
    }

    pub fn get(&self, name: &str) -> Option<u64> {
        self.index(name).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.decls.iter().map(|(n, _)| n.as_str()).zip(self.values.iter().copied())
    }

    /// Whether this store has exactly the declarations of `p`, in range.
    pub fn matches(&self, p: &Program) -> bool {
        self.decls.len() == p.decls.len()
            && self.decls.iter().zip(&p.decls).all(|((n, w), d)| *n == d.name && *w == d.width)
            && self.values.iter().zip(self.decls.iter()).all(|(v, (_, w))| *v < 1u64 << w)
    }

    fn set(&mut self, var: usize, raw: i64) {
        let w = self.decls[var].1;
        self.values[var] = (raw as u64) & ((1u64 << w) - 1);
    }

    /// Number of distinct stores for these declarations, saturating.
    pub fn space_size(&self) -> u64 {
        self.decls.iter().fold(1u64, |acc, (_, w)| acc.saturating_mul(1u64 << w))
    }
}

impl Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.iter().map(|(n, v)| format!("{n} = {v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for Store {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = ser.serialize_map(Some(self.values.len()))?;
        for (n, v) in self.iter() {
            m.serialize_entry(n, &v)?;
        }
        m.end()
    }
}

/// Expressions with variables resolved to store indices.
#[derive(Debug, Clone)]
enum CExpr {
    Int(i64),
    Bool(bool),
    Var(usize),
    Not(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Int(i64),
    Bool(bool),
}

impl CExpr {
    fn compile(e: &Expr, decls: &[Decl]) -> CExpr {
        match &e.kind {
            ExprKind::Int(n) => CExpr::Int(*n),
            ExprKind::Bool(b) => CExpr::Bool(*b),
            ExprKind::Var(v) => CExpr::Var(decls.iter().position(|d| d.name == *v).expect("checked by the parser")),
            ExprKind::Not(e) => CExpr::Not(Box::new(CExpr::compile(e, decls))),
            ExprKind::Bin(op, l, r) => CExpr::Bin(*op, Box::new(CExpr::compile(l, decls)), Box::new(CExpr::compile(r, decls))),
        }
    }

    /// Intermediate arithmetic wraps at 64 bits; only assignment reduces to
    /// the variable's width.
    fn eval(&self, s: &Store) -> Val {
        match self {
            CExpr::Int(n) => Val::Int(*n),
            CExpr::Bool(b) => Val::Bool(*b),
            CExpr::Var(i) => Val::Int(s.values[*i] as i64),
            CExpr::Not(e) => Val::Bool(!e.eval_bool(s)),
            CExpr::Bin(op, l, r) => match op {
                BinOp::And => Val::Bool(l.eval_bool(s) && r.eval_bool(s)),
                BinOp::Or => Val::Bool(l.eval_bool(s) || r.eval_bool(s)),
                _ => {
                    let (a, b) = (l.eval_int(s), r.eval_int(s));
                    match op {
                        BinOp::Add => Val::Int(a.wrapping_add(b)),
                        BinOp::Sub => Val::Int(a.wrapping_sub(b)),
                        BinOp::Mul => Val::Int(a.wrapping_mul(b)),
                        BinOp::Lt => Val::Bool(a < b),
                        BinOp::Le => Val::Bool(a <= b),
                        BinOp::Eq => Val::Bool(a == b),
                        BinOp::And | BinOp::Or => unreachable!(),
                    }
                }
            },
        }
    }

    fn eval_int(&self, s: &Store) -> i64 {
        match self.eval(s) {
            Val::Int(n) => n,
            Val::Bool(_) => unreachable!("type-checked"),
        }
    }

    fn eval_bool(&self, s: &Store) -> bool {
        match self.eval(s) {
            Val::Bool(b) => b,
            Val::Int(_) => unreachable!("type-checked"),
        }
    }
}

/// What a control point executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Assign,
    Skip,
    IfGuard,
    WhileGuard,
}

/// A control point's source location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    pub span: Span,
    pub kind: PointKind,
}

impl Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            PointKind::Assign => "assign",
            PointKind::Skip => "skip",
            PointKind::IfGuard => "if-guard",
            PointKind::WhileGuard => "while-guard",
        };
        write!(f, "{} {k}", self.span)
    }
}

#[derive(Debug, Clone)]
enum Instr {
    Assign(usize, CExpr, usize),
    Skip(usize),
    Branch(CExpr, usize, usize),
}

/// A program as a control-flow graph: one instruction per control point,
/// plus the exit point `len`.
#[derive(Debug, Clone)]
pub struct Compiled {
    instrs: Vec<Instr>,
    locations: Vec<Location>,
    entry: usize,
}

impl Compiled {
    pub fn new(p: &Program) -> Compiled {
        let mut c = Compiled {
            instrs: Vec::new(),
            locations: Vec::new(),
            entry: 0,
        };
        // The exit point is only known at the end; compile against a
        // placeholder and patch it.
        const EXIT: usize = usize::MAX;
        c.entry = c.block(&p.body, EXIT, &p.decls);
        let exit = c.instrs.len();
        let fix = |t: &mut usize| {
            if *t == EXIT {
                *t = exit;
            }
        };
        for i in &mut c.instrs {
            match i {
                Instr::Assign(_, _, n) | Instr::Skip(n) => fix(n),
                Instr::Branch(_, t, e) => {
                    fix(t);
                    fix(e);
                }
            }
        }
        fix(&mut c.entry);
        c
    }

    fn push(&mut self, i: Instr, loc: Location) -> usize {
        self.instrs.push(i);
        self.locations.push(loc);
        self.instrs.len() - 1
    }

    fn block(&mut self, stmts: &[Stmt], next: usize, decls: &[Decl]) -> usize {
        stmts.iter().rev().fold(next, |next, s| self.stmt(s, next, decls))
    }

    fn stmt(&mut self, s: &Stmt, next: usize, decls: &[Decl]) -> usize {
        let loc = |kind| Location { span: s.span, kind };
        match &s.kind {
            StmtKind::Skip => self.push(Instr::Skip(next), loc(PointKind::Skip)),
            StmtKind::Assign(v, e) => {
                let var = decls.iter().position(|d| d.name == *v).expect("checked by the parser");
                self.push(Instr::Assign(var, CExpr::compile(e, decls), next), loc(PointKind::Assign))
            }
            StmtKind::If(c, t, e) => {
                let t = self.block(t, next, decls);
                let e = self.block(e, next, decls);
                self.push(Instr::Branch(CExpr::compile(c, decls), t, e), loc(PointKind::IfGuard))
            }
            StmtKind::While(c, b) => {
                let guard = self.push(Instr::Skip(next), loc(PointKind::WhileGuard));
                let body = self.block(b, guard, decls);
                self.instrs[guard] = Instr::Branch(CExpr::compile(c, decls), body, next);
                guard
            }
        }
    }

    /// Control points including the exit.
    pub fn control_points(&self) -> usize {
        self.instrs.len() + 1
    }

    pub fn entry(&self) -> usize {
        self.entry
    }

    pub fn location(&self, pc: usize) -> Option<Location> {
        self.locations.get(pc).copied()
    }

    /// One machine step from `(pc, store)`.
    pub fn step(&self, pc: usize, s: &Store) -> Either<Store, (usize, Store)> {
        match self.instrs.get(pc) {
            None => Left(s.clone()),
            Some(Instr::Skip(n)) => Right((*n, s.clone())),
            Some(Instr::Assign(v, e, n)) => {
                let mut s = s.clone();
                let val = e.eval_int(&s);
                s.set(*v, val);
                Right((*n, s))
            }
            Some(Instr::Branch(c, t, e)) => Right((if c.eval_bool(s) { *t } else { *e }, s.clone())),
        }
    }
}

fn check_store(p: &Program, s0: &Store) -> Result<()> {
    if s0.matches(p) {
        Ok(())
    } else {
        Err(Error::StoreMismatch(format!("store {s0} does not match the declarations")))
    }
}

/// The small-step machine on `(control point, store)` with a certificate
/// bounding its states by control points × stores.
pub fn machine(p: &Program, s0: &Store) -> Result<QuotientRep<(usize, Store), Store>> {
    check_store(p, s0)?;
    let c = Arc::new(Compiled::new(p));
    let points = c.control_points();
    let size = (points as u64).saturating_mul(s0.space_size());
    let step = {
        let c = Arc::clone(&c);
        move |st: &(usize, Store)| c.step(st.0, &st.1)
    };
    let prog = p.clone();
    let cert = Certificate::bounded(size, move |st: &(usize, Store)| st.0 < points && st.1.matches(&prog));
    Ok(QuotientRep::new(Machine::new((c.entry(), s0.clone()), step), cert))
}

/// Intensional semantics: one `later` per assignment, skip, or guard test.
pub fn eval_intensional(p: &Program, s0: &Store) -> Result<Delay<Store>> {
    Ok(machine(p, s0)?.underlying())
}

/// Extensional semantics in the maybe backend. Each `while` is the least
/// fixpoint of its body `s ↦ s if ¬e, else b(s)` on the finite store space.
pub fn eval_extensional(p: &Program, s0: &Store) -> Result<Partial<Store>> {
    Ok(eval_extensional_counted(p, s0)?.0)
}

/// As [`eval_extensional`], also returning the number of loop states visited.
pub fn eval_extensional_counted(p: &Program, s0: &Store) -> Result<(Partial<Store>, u64)> {
    check_store(p, s0)?;
    let decls = &p.decls;
    let mut visits = 0u64;
    let r = exec_block(&p.body, s0.clone(), decls, &mut visits);
    Ok((r, visits))
}

fn exec_block(stmts: &[Stmt], s: Store, decls: &[Decl], visits: &mut u64) -> Partial<Store> {
    stmts.iter().fold(Partial::Value(s), |acc, st| acc.bind(|s| exec(st, s, decls, visits)))
}

fn exec(st: &Stmt, mut s: Store, decls: &[Decl], visits: &mut u64) -> Partial<Store> {
    match &st.kind {
        StmtKind::Skip => Partial::Value(s),
        StmtKind::Assign(v, e) => {
            let var = decls.iter().position(|d| d.name == *v).expect("checked by the parser");
            let val = CExpr::compile(e, decls).eval_int(&s);
            s.set(var, val);
            Partial::Value(s)
        }
        StmtKind::If(c, t, e) => {
            let branch = if CExpr::compile(c, decls).eval_bool(&s) { t } else { e };
            exec_block(branch, s, decls, visits)
        }
        StmtKind::While(c, b) => {
            let guard = CExpr::compile(c, decls);
            let (r, n) = partial::iterate_lazy_counted(s, |s| {
                if !guard.eval_bool(s) {
                    return Left(Partial::Value(s.clone()));
                }
                match exec_block(b, s.clone(), decls, visits) {
                    Partial::Value(next) => Right(next),
                    Partial::Bottom => Left(Partial::Bottom),
                }
            });
            *visits += n as u64;
            r
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: u64,
    pub location: Location,
    /// The store after the step.
    pub store: Store,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "store", rename_all = "kebab-case")]
pub enum TraceStatus {
    Converged(Store),
    /// Reserved for exact divergence; bounded tracing never reports it.
    Diverged,
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    #[serde(flatten)]
    pub status: TraceStatus,
}

/// The first `fuel` steps of the intensional machine.
pub fn trace(p: &Program, s0: &Store, fuel: u64) -> Result<Trace> {
    check_store(p, s0)?;
    let c = Compiled::new(p);
    let (mut pc, mut s) = (c.entry(), s0.clone());
    let mut entries = Vec::new();
    loop {
        match c.step(pc, &s) {
            Left(done) => {
                return Ok(Trace {
                    entries,
                    status: TraceStatus::Converged(done),
                })
            }
            Right(_) if entries.len() as u64 == fuel => {
                return Ok(Trace {
                    entries,
                    status: TraceStatus::FuelExhausted,
                })
            }
            Right((next, store)) => {
                let location = c.location(pc).expect("non-exit point");
                entries.push(TraceEntry {
                    step: entries.len() as u64,
                    location,
                    store: store.clone(),
                });
                pc = next;
                s = store;
            }
        }
    }
}
