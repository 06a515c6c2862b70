use rand::Rng;

use super::ast::{BinOp, Decl, Expr, ExprKind, Program, Span, Stmt, StmtKind};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub max_depth: u32,
    pub max_vars: usize,
    pub max_width: u32,
    pub max_block: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            max_vars: 3,
            max_width: 4,
            max_block: 3,
        }
    }
}

const NAMES: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// A random well-typed program. Guards are comparisons, possibly combined.
pub fn generate_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Program {
    let n = rng.gen_range(1..=cfg.max_vars.min(NAMES.len()));
    let decls = NAMES[..n]
        .iter()
        .map(|name| Decl {
            name: name.to_string(),
            width: rng.gen_range(1..=cfg.max_width),
            span: Span::default(),
        })
        .collect();
    let g = Gen { names: &NAMES[..n], cfg };
    let body = g.block(rng, cfg.max_depth);
    Program { decls, body }
}

struct Gen<'a> {
    names: &'a [&'static str],
    cfg: &'a GenConfig,
}

impl Gen<'_> {
    fn block<R: Rng>(&self, rng: &mut R, depth: u32) -> Vec<Stmt> {
        let len = rng.gen_range(1..=self.cfg.max_block);
        (0..len).map(|_| self.stmt(rng, depth)).collect()
    }

    fn stmt<R: Rng>(&self, rng: &mut R, depth: u32) -> Stmt {
        let choice = if depth <= 1 { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
        let kind = match choice {
            0 => StmtKind::Skip,
            1 | 2 => StmtKind::Assign(self.var(rng), self.int_expr(rng, 2)),
            3 => StmtKind::If(self.guard(rng), self.block(rng, depth - 1), self.block(rng, depth - 1)),
            _ => StmtKind::While(self.guard(rng), self.block(rng, depth - 1)),
        };
        Stmt::new(kind)
    }

    fn var<R: Rng>(&self, rng: &mut R) -> String {
        self.names[rng.gen_range(0..self.names.len())].to_string()
    }

    fn int_expr<R: Rng>(&self, rng: &mut R, depth: u32) -> Expr {
        if depth == 0 || rng.gen_bool(0.4) {
            return if rng.gen_bool(0.5) {
                Expr::new(ExprKind::Var(self.var(rng)))
            } else {
                Expr::int(rng.gen_range(0..4))
            };
        }
        let op = [BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul][rng.gen_range(0..4)];
        Expr::bin(op, self.int_expr(rng, depth - 1), self.int_expr(rng, depth - 1))
    }

    fn comparison<R: Rng>(&self, rng: &mut R) -> Expr {
        let op = [BinOp::Lt, BinOp::Le, BinOp::Eq][rng.gen_range(0..3)];
        Expr::bin(op, self.int_expr(rng, 1), self.int_expr(rng, 1))
    }

    fn guard<R: Rng>(&self, rng: &mut R) -> Expr {
        match rng.gen_range(0..6) {
            0 => Expr::not(self.comparison(rng)),
            1 => Expr::bin(BinOp::And, self.comparison(rng), self.comparison(rng)),
            2 => Expr::bin(BinOp::Or, self.comparison(rng), self.comparison(rng)),
            _ => self.comparison(rng),
        }
    }
}
