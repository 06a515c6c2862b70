//! A small while-language over fixed-width integer variables, with an
//! intensional semantics (a delay machine counting steps) and an
//! extensional one (least fixpoints in the maybe backend).

mod ast;
mod eval;
mod gen;
mod parser;

pub use ast::{BinOp, Decl, Expr, ExprKind, Program, Span, Stmt, StmtKind};
pub use eval::{
    eval_extensional, eval_extensional_counted, eval_intensional, machine, trace, Compiled, Location, PointKind,
    Store, Trace, TraceEntry, TraceStatus,
};
pub use gen::{generate_program, GenConfig};
pub use parser::{parse, MAX_WIDTH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::delay;
use crate::partial::{collapse_finite_counted, Partial};
use crate::report::{Failure, LawReport, SuiteConfig};
use crate::par;

/// Counts from 0 to 3.
pub const COUNTDOWN: &str = "var x:8; x:=0; while x<3 do x:=x+1 od";

/// Machine steps taken by [`COUNTDOWN`]: the initial assignment, four guard
/// tests and three increments.
pub const COUNTDOWN_STEPS: u64 = 8;

/// Loops forever on a two-bit counter.
pub const LOOPING: &str = "var x:2; while true do x:=x+1 od";

/// Replace the top-level `while e do b od` at `index` by
/// `if e then b; while e do b od else skip fi`.
pub fn unroll_while(p: &Program, index: usize) -> Option<Program> {
    let StmtKind::While(c, b) = &p.body.get(index)?.kind else {
        return None;
    };
    let mut then = b.clone();
    then.push(p.body[index].clone());
    let mut out = p.clone();
    out.body[index] = Stmt {
        kind: StmtKind::If(c.clone(), then, vec![Stmt::new(StmtKind::Skip)]),
        span: p.body[index].span,
    };
    Some(out)
}

/// The generated corpus: programs printed and re-parsed, so every node has
/// a real source position.
pub fn corpus(seed: u64, count: usize) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenConfig::default();
    (0..count)
        .map(|_| {
            let p = generate_program(&mut rng, &cfg);
            parse(&p.to_string()).expect("generated programs print to valid source")
        })
        .collect()
}

/// End-to-end checks: the countdown golden values, pigeonhole divergence
/// detection, and on a generated corpus the agreement of both backends, the
/// divergence bound, printer round trips and loop unrolling.
pub fn check_lang_suite(cfg: &SuiteConfig, corpus_size: usize) -> LawReport {
    let mut report = LawReport::new("lang");

    let p = parse(COUNTDOWN).expect("countdown parses");
    let s0 = Store::zeros(&p);
    let ext = eval_extensional(&p, &s0).expect("store matches");
    let x = ext.clone().value().and_then(|s| s.get("x"));
    report.check(x == Some(3), || Failure::new("countdown-extensional", COUNTDOWN, x, Some(3)));
    let obs = delay::run_for(&eval_intensional(&p, &s0).expect("store matches"), 1000);
    let got = obs.converged().map(|(s, n)| (s.get("x"), n));
    let want = Some((Some(3), COUNTDOWN_STEPS));
    report.check(got == want, || Failure::new("countdown-intensional", COUNTDOWN, got, want));

    let p = parse(LOOPING).expect("looping program parses");
    let s0 = Store::zeros(&p);
    let (r, visits) = eval_extensional_counted(&p, &s0).expect("store matches");
    let bound = 4 * Compiled::new(&p).control_points() as u64;
    report.check(r == Partial::Bottom && visits <= bound, || {
        Failure::new("looping-bottom", LOOPING, (&r, visits), (Partial::<Store>::Bottom, bound))
    });

    let programs = corpus(cfg.seed, corpus_size);
    let results = par::map_range(cfg.exec, 0..programs.len() as u64, |i| {
        let p = &programs[i as usize];
        let mut r = LawReport::new("lang");
        check_program(p, i, &mut r);
        r
    });
    for r in results {
        report.merge(r);
    }
    report.finish()
}

fn check_program(p: &Program, i: u64, r: &mut LawReport) {
    let inst = format!("program #{i}");
    let printed = p.to_string();
    let round = parse(&printed).map(|q| q.to_string());
    r.check(round.as_ref() == Ok(&printed), || Failure::new("print-round-trip", &inst, &round, &printed));

    let s0 = Store::zeros(p);
    let ext = eval_extensional(p, &s0).expect("store matches");
    let q = machine(p, &s0).expect("store matches");
    let (int, steps) = collapse_finite_counted(&q).expect("the certificate covers the machine");
    r.check(int == ext, || Failure::new("collapse-agreement", &inst, &int, &ext));

    let bound = Compiled::new(p).control_points() as u64 * s0.space_size();
    let running = delay::run_for(&q.underlying(), bound).is_running();
    r.check(!running || ext == Partial::Bottom, || Failure::new("divergence-bound", &inst, &ext, "Bottom"));

    for (k, st) in p.body.iter().enumerate() {
        let StmtKind::While(guard, _) = &st.kind else { continue };
        let u = unroll_while(p, k).expect("a while statement");
        let ue = eval_extensional(&u, &s0).expect("store matches");
        r.check(ue == ext, || Failure::new("unroll-extensional", format!("{inst} at {k}"), &ue, &ext));

        let (ui, usteps) = collapse_finite_counted(&machine(&u, &s0).expect("store matches")).expect("certified");
        r.check(ui == int, || Failure::new("unroll-intensional-value", format!("{inst} at {k}"), &ui, &int));
        if int.is_value() {
            // Entering the loop costs the same either way; skipping it costs
            // the unrolled `skip` as an extra step.
            let prefix = Program { decls: p.decls.clone(), body: p.body[..k].to_vec() };
            let entry = eval_extensional(&prefix, &s0).expect("store matches");
            let skipped = entry.value().map(|s| {
                let test = Program {
                    decls: p.decls.clone(),
                    body: vec![Stmt::new(StmtKind::If(guard.clone(), vec![Stmt::new(StmtKind::Skip)], vec![]))],
                };
                guard_holds(&test, &s)
            });
            let offset = if skipped == Some(false) { 1 } else { 0 };
            r.check(usteps == steps + offset, || {
                Failure::new("unroll-step-offset", format!("{inst} at {k}"), usteps, steps + offset)
            });
        }
    }
}

/// Whether the guard of the single `if` in `test` holds in `s`: the first
/// machine step lands on its then-branch exactly when it does.
fn guard_holds(test: &Program, s: &Store) -> bool {
    let c = Compiled::new(test);
    match c.step(c.entry(), s) {
        either::Either::Right((pc, _)) => pc != c.control_points() - 1,
        either::Either::Left(_) => false,
    }
}
