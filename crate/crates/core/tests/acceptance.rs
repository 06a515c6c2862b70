//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use elgot_iter::algebra::{check_elgot_laws, LawSizes, PartialAlgebra};
use elgot_iter::delay::{check_delay_laws, DelayLawConfig};
use elgot_iter::elgot::{check_elgot_monad_axioms, check_sigma_laws};
use elgot_iter::finset::FunSpace;
use elgot_iter::lang::{self, Store};
use elgot_iter::partial::{
    check_collapse_coherence, check_equational_lifting, check_kleene_suite, check_restriction_axioms, collapse_finite,
    Partial,
};
use elgot_iter::{LawReport, SuiteConfig};

/// Wall-clock limit for the two suites with a runtime requirement.
const TIME_LIMIT: Duration = Duration::from_secs(60);
const CORPUS: usize = 100;

struct Outcome {
    ok: bool,
    detail: String,
}

fn from_report(r: &LawReport) -> Outcome {
    let mut detail = format!("{} instances, {} failures", r.instances, r.failures.len() as u64 + r.truncated);
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; first: {} at {}: {} vs {}", f.law, f.instance, f.lhs, f.rhs));
    }
    if !r.skipped.is_empty() {
        detail.push_str(&format!("; skipped {:?}", r.skipped));
    }
    Outcome {
        ok: r.passed() && r.skipped.is_empty() && r.instances > 0,
        detail,
    }
}

fn timed(r: LawReport, t: Duration) -> Outcome {
    let mut o = from_report(&r);
    o.ok &= t < TIME_LIMIT;
    o.detail.push_str(&format!(", {:.2}s (limit {}s)", t.as_secs_f64(), TIME_LIMIT.as_secs()));
    o
}

fn elgot_algebra() -> Outcome {
    let start = Instant::now();
    let r = check_elgot_laws(&PartialAlgebra::range(1), LawSizes { max_states: 3, max_carrier: 2 }, Default::default());
    let t = start.elapsed();
    let mut o = timed(r, t);
    let bodies = FunSpace::new(3, 2 + 3).unwrap().count();
    o.ok &= bodies >= 125;
    o.detail.push_str(&format!(", {bodies} bodies at |S|=3 |A|=2"));
    o
}

fn restriction() -> Outcome {
    let start = Instant::now();
    let r = check_restriction_axioms(&SuiteConfig::default());
    timed(r, start.elapsed())
}

fn corpus_agreement() -> (u64, u64) {
    let mut agree = 0;
    let programs = lang::corpus(0, CORPUS);
    for p in &programs {
        let s0 = Store::zeros(p);
        let ext = lang::eval_extensional(p, &s0).unwrap();
        let int = collapse_finite(&lang::machine(p, &s0).unwrap()).unwrap();
        if ext == int {
            agree += 1;
        }
    }
    (agree, programs.len() as u64)
}

fn collapse() -> Outcome {
    let mut o = from_report(&check_collapse_coherence(&SuiteConfig::default()));
    let (agree, total) = corpus_agreement();
    o.ok &= agree == total && total == CORPUS as u64;
    o.detail.push_str(&format!("; corpus {agree}/{total} programs agree"));
    o
}

fn language() -> Outcome {
    let p = lang::parse(lang::COUNTDOWN).unwrap();
    let s0 = Store::zeros(&p);
    let ext = lang::eval_extensional(&p, &s0).unwrap().value().and_then(|s| s.get("x"));
    let obs = elgot_iter::delay::run_for(&lang::eval_intensional(&p, &s0).unwrap(), 1000);
    let int = obs.converged().map(|(s, n)| (s.get("x"), n));
    let looping = lang::parse(lang::LOOPING).unwrap();
    let bottom = lang::eval_extensional(&looping, &Store::zeros(&looping)).unwrap() == Partial::Bottom;
    let mut o = from_report(&lang::check_lang_suite(&SuiteConfig::default(), CORPUS));
    o.ok &= ext == Some(3) && int == Some((Some(3), lang::COUNTDOWN_STEPS)) && bottom;
    o.detail = format!(
        "countdown x = {ext:?} / {int:?} steps, looping Bottom: {bottom}; {}",
        o.detail
    );
    o
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("elgot-algebra laws, |S|<=3 |A|<=2", Box::new(elgot_algebra)),
        ("restriction axioms RST1-RST4, dom of a copair, dom-unit", Box::new(restriction)),
        ("equational lifting, commutativity, copy/discard", Box::new(move || from_report(&check_equational_lifting(&cfg)))),
        ("elgot-monad axioms", Box::new(move || from_report(&check_elgot_monad_axioms(&cfg)))),
        ("kleene approximation and leastness", Box::new(move || from_report(&check_kleene_suite(&cfg)))),
        ("delay laws, 200 machines at depth 50", Box::new(|| from_report(&check_delay_laws(&DelayLawConfig::default())))),
        ("collapse coherence", Box::new(collapse)),
        ("sigma lattice, race, frame", Box::new(move || from_report(&check_sigma_laws(&cfg)))),
        ("language end-to-end", Box::new(language)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {}: {status}: {name} ({})", i + 1, o.detail);
        if !o.ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
