//! The extensional partiality monad: the exact maybe backend, its
//! restriction structure, bounded (Kleene) iteration, and the collapse of
//! delay machines onto it.

use std::collections::HashSet;
use std::fmt::{self, Debug};
use std::hash::Hash;
use std::sync::Arc;

use either::Either::{self, Left, Right};
use serde::Serialize;

use crate::algebra::LoopBody;
use crate::delay::{self, Delay, Machine, Observation, Payload};
use crate::error::{Error, Result};
use crate::finset::{oracle_iterate, FinSet, FunSpace};
use crate::par;
use crate::report::{Failure, LawReport, SuiteConfig};

/// A value or divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Partial<X> {
    Value(X),
    Bottom,
}

use Partial::{Bottom, Value};

impl<X> Partial<X> {
    pub fn eta(x: X) -> Self {
        Value(x)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Value(_))
    }

    pub fn as_ref(&self) -> Partial<&X> {
        match self {
            Value(x) => Value(x),
            Bottom => Bottom,
        }
    }

    pub fn value(self) -> Option<X> {
        match self {
            Value(x) => Some(x),
            Bottom => None,
        }
    }

    pub fn bind<Y>(self, f: impl FnOnce(X) -> Partial<Y>) -> Partial<Y> {
        match self {
            Value(x) => f(x),
            Bottom => Bottom,
        }
    }

    pub fn map<Y>(self, f: impl FnOnce(X) -> Y) -> Partial<Y> {
        self.bind(|x| Value(f(x)))
    }

    /// `τ : W × K X → K(W × X)`.
    pub fn strength<W>(w: W, p: Partial<X>) -> Partial<(W, X)> {
        p.map(|x| (w, x))
    }

    /// `τ̂ : K X × W → K(X × W)`.
    pub fn costrength<W>(p: Partial<X>, w: W) -> Partial<(X, W)> {
        p.map(|x| (x, w))
    }
}

impl<X> Partial<Partial<X>> {
    pub fn mu(self) -> Partial<X> {
        self.bind(|p| p)
    }
}

impl<X: PartialEq> Partial<X> {
    /// The restriction order on results: `Bottom` below everything.
    pub fn le(&self, other: &Partial<X>) -> bool {
        match self {
            Bottom => true,
            Value(_) => self == other,
        }
    }
}

impl<X> From<Option<X>> for Partial<X> {
    fn from(o: Option<X>) -> Self {
        o.map_or(Bottom, Value)
    }
}

/// A Kleisli map `X → K Y` on a finite domain, as a total table.
#[derive(Clone, PartialEq, Eq)]
pub struct FinKleisli<X: Eq + Hash, Y> {
    domain: FinSet<X>,
    table: Vec<Partial<Y>>,
}

impl<X: Eq + Hash + Debug, Y: Debug> Debug for FinKleisli<X, Y> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.domain.elements().iter().zip(&self.table))
            .finish()
    }
}

impl<X, Y> FinKleisli<X, Y>
where
    X: Eq + Hash + Clone + Debug,
    Y: Clone + PartialEq + Debug,
{
    pub fn new(domain: FinSet<X>, f: impl Fn(&X) -> Partial<Y>) -> Self {
        let table = domain.elements().iter().map(f).collect();
        FinKleisli { domain, table }
    }

    pub fn from_table(domain: FinSet<X>, table: Vec<Partial<Y>>) -> Result<Self> {
        if table.len() != domain.len() {
            return Err(Error::DomainMismatch(format!(
                "table has {} entries for a domain of {}",
                table.len(),
                domain.len()
            )));
        }
        Ok(FinKleisli { domain, table })
    }

    /// The everywhere-undefined map.
    pub fn bottom(domain: FinSet<X>) -> Self {
        Self::new(domain, |_| Bottom)
    }

    pub fn domain(&self) -> &FinSet<X> {
        &self.domain
    }

    pub fn table(&self) -> &[Partial<Y>] {
        &self.table
    }

    pub fn apply(&self, x: &X) -> Result<&Partial<Y>> {
        Ok(&self.table[self.domain.require(x)?])
    }

    /// Postcompose a total function: `K h ∘ f`.
    pub fn fmap<Z: Clone + PartialEq + Debug>(&self, h: impl Fn(&Y) -> Z) -> FinKleisli<X, Z> {
        FinKleisli {
            domain: self.domain.clone(),
            table: self.table.iter().map(|p| p.as_ref().map(&h)).collect(),
        }
    }

    /// Kleisli composition `g* ∘ f`.
    pub fn then<Z>(&self, g: &FinKleisli<Y, Z>) -> Result<FinKleisli<X, Z>>
    where
        Y: Eq + Hash,
        Z: Clone + PartialEq + Debug,
    {
        let table = self
            .table
            .iter()
            .map(|p| match p {
                Value(y) => g
                    .apply(y)
                    .cloned()
                    .map_err(|_| Error::DomainMismatch(format!("{y:?} outside the domain of the continuation"))),
                Bottom => Ok(Bottom),
            })
            .collect::<Result<_>>()?;
        Ok(FinKleisli {
            domain: self.domain.clone(),
            table,
        })
    }

    fn same_domain<Z>(&self, other: &FinKleisli<X, Z>) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "{:?} vs {:?}",
                self.domain, other.domain
            )))
        }
    }
}

impl<X: Eq + Hash + Clone + Debug> FinKleisli<X, X> {
    /// The unit `η : X → K X`.
    pub fn eta(domain: FinSet<X>) -> Self {
        Self::new(domain, |x| Value(x.clone()))
    }
}

/// Domain of definiteness, `dom f = (K fst) ∘ τ ∘ ⟨id, f⟩`.
pub fn dom<X, Y>(f: &FinKleisli<X, Y>) -> FinKleisli<X, X>
where
    X: Eq + Hash + Clone + Debug,
    Y: Clone + PartialEq + Debug,
{
    FinKleisli::new(f.domain.clone(), |x| {
        let fx = f.apply(x).expect("x ranges over the domain").clone();
        Partial::strength(x.clone(), fx).map(|(x, _)| x)
    })
}

/// `f ↾ g = fst* ∘ τ ∘ ⟨f, g⟩`: `f` restricted to where `g` is defined.
pub fn restrict<X, Y, Z>(f: &FinKleisli<X, Y>, g: &FinKleisli<X, Z>) -> Result<FinKleisli<X, Y>>
where
    X: Eq + Hash + Clone + Debug,
    Y: Clone + PartialEq + Debug,
    Z: Clone + PartialEq + Debug,
{
    f.same_domain(g)?;
    let table = f
        .table
        .iter()
        .zip(&g.table)
        .map(|(fx, gx)| Partial::strength(fx.clone(), gx.clone()).bind(|(fx, _)| fx))
        .collect();
    Ok(FinKleisli {
        domain: f.domain.clone(),
        table,
    })
}

/// The restriction order: `f ⊑ g` iff `f = g ↾ f`.
pub fn leq<X, Y>(f: &FinKleisli<X, Y>, g: &FinKleisli<X, Y>) -> Result<bool>
where
    X: Eq + Hash + Clone + Debug,
    Y: Clone + PartialEq + Debug,
{
    Ok(&restrict(g, f)? == f)
}

/// Least-fixpoint iteration over an implicitly finite state space: follow
/// the body from `s0`, return the first exit, and return `Bottom` on a
/// repeated state or on an exit that is itself `Bottom`.
pub fn iterate_lazy<S, X>(s0: S, mut body: impl FnMut(&S) -> Either<Partial<X>, S>) -> Partial<X>
where
    S: Eq + Hash + Clone,
{
    iterate_lazy_counted(s0, &mut body).0
}

/// As [`iterate_lazy`], also returning the number of distinct states visited.
pub fn iterate_lazy_counted<S, X>(s0: S, mut body: impl FnMut(&S) -> Either<Partial<X>, S>) -> (Partial<X>, usize)
where
    S: Eq + Hash + Clone,
{
    let mut visited = HashSet::new();
    let mut current = s0;
    loop {
        if !visited.insert(current.clone()) {
            return (Bottom, visited.len());
        }
        match body(&current) {
            Left(result) => return (result, visited.len()),
            Right(next) => current = next,
        }
    }
}

/// The least pre-fixpoint of `g ↦ [id, g] ∘ f` on a finite loop body.
pub fn iterate_partial<X, S>(lp: &LoopBody<Partial<X>, S>, s0: &S) -> Result<Partial<X>>
where
    X: Clone,
    S: Eq + Hash + Clone + Debug,
{
    let start = lp.states().require(s0)?;
    Ok(iterate_partial_indexed(lp.table(), start))
}

pub(crate) fn iterate_partial_indexed<X: Clone>(table: &[Either<Partial<X>, usize>], start: usize) -> Partial<X> {
    iterate_lazy(start, |s| table[*s].clone())
}

/// Bounded iteration by primitive recursion on the counter:
/// `n = 0` gives `Bottom`; otherwise one body step with counter `n - 1`.
pub fn bounded_iterate<X, S>(lp: &LoopBody<Partial<X>, S>, s0: &S, n: u64) -> Result<Partial<X>>
where
    X: Clone,
    S: Eq + Hash + Clone + Debug,
{
    let start = lp.states().require(s0)?;
    Ok(bounded_iterate_indexed(lp.table(), start, n))
}

pub(crate) fn bounded_iterate_indexed<X: Clone>(table: &[Either<Partial<X>, usize>], start: usize, n: u64) -> Partial<X> {
    let (mut state, mut counter) = (start, n);
    loop {
        if counter == 0 {
            return Bottom;
        }
        counter -= 1;
        match &table[state] {
            Left(a) => return a.clone(),
            Right(next) => state = *next,
        }
    }
}

/// Kleene fixpoint check for one body and start state: every approximant is
/// below the full iterate, the chain is increasing, and it reaches the full
/// iterate at `n = |S| + 1`.
pub fn kleene_check<X, S>(lp: &LoopBody<Partial<X>, S>, s0: &S) -> Result<LawReport>
where
    X: Clone + PartialEq + Debug,
    S: Eq + Hash + Clone + Debug,
{
    let start = lp.states().require(s0)?;
    let mut report = LawReport::new("kleene");
    kleene_instance(&mut report, lp.table(), start, &format!("{lp:?} from {s0:?}"));
    Ok(report)
}

fn kleene_instance<X: Clone + PartialEq + Debug>(
    report: &mut LawReport,
    table: &[Either<Partial<X>, usize>],
    start: usize,
    instance: &str,
) {
    let full = iterate_partial_indexed(table, start);
    let top = table.len() as u64 + 1;
    let chain: Vec<_> = (0..=top).map(|n| bounded_iterate_indexed(table, start, n)).collect();
    for (n, approx) in chain.iter().enumerate() {
        report.check(approx.le(&full), || {
            Failure::new("bounded-below-full", format!("{instance}, n={n}"), approx, &full)
        });
    }
    for (n, w) in chain.windows(2).enumerate() {
        report.check(w[0].le(&w[1]), || {
            Failure::new("chain-monotone", format!("{instance}, n={n}"), &w[0], &w[1])
        });
    }
    report.check(chain[top as usize] == full, || {
        Failure::new("stabilization", format!("{instance}, n={top}"), &chain[top as usize], &full)
    });
}

/// Result of fuel-bounded collapse.
#[derive(Debug, Clone)]
pub enum ThreeValuedResult<X> {
    Determined(Partial<X>),
    Unknown(Delay<X>),
}

impl<X> ThreeValuedResult<X> {
    pub fn determined(&self) -> Option<&Partial<X>> {
        match self {
            ThreeValuedResult::Determined(p) => Some(p),
            ThreeValuedResult::Unknown(_) => None,
        }
    }
}

/// Extensional collapse with fuel. Divergence is never concluded.
pub fn collapse_fuel<X: Payload>(d: &Delay<X>, fuel: u64) -> ThreeValuedResult<X> {
    match delay::run_for(d, fuel) {
        Observation::Converged { value, .. } => ThreeValuedResult::Determined(Value(value)),
        Observation::StillRunning(rest) => ThreeValuedResult::Unknown(rest),
    }
}

/// A declaration that a machine's reachable states lie in a finite set.
#[derive(Clone)]
pub enum Certificate<S: Eq + Hash> {
    States(FinSet<S>),
    /// A membership test with a bound on the number of members.
    Bounded {
        size: u64,
        contains: Arc<dyn Fn(&S) -> bool + Send + Sync>,
    },
}

impl<S: Eq + Hash + Clone + Debug> Certificate<S> {
    pub fn bounded(size: u64, contains: impl Fn(&S) -> bool + Send + Sync + 'static) -> Self {
        Certificate::Bounded {
            size,
            contains: Arc::new(contains),
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Certificate::States(s) => s.len() as u64,
            Certificate::Bounded { size, .. } => *size,
        }
    }

    pub fn contains(&self, s: &S) -> bool {
        match self {
            Certificate::States(set) => set.contains(s),
            Certificate::Bounded { contains, .. } => contains(s),
        }
    }
}

impl<S: Eq + Hash + Debug> Debug for Certificate<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::States(s) => f.debug_tuple("States").field(s).finish(),
            Certificate::Bounded { size, .. } => f.debug_struct("Bounded").field("size", size).finish_non_exhaustive(),
        }
    }
}

/// A delay machine together with an optional finiteness certificate; the
/// operational stand-in for an element of the quotient of `D X`.
#[derive(Clone, Debug)]
pub struct QuotientRep<S: Eq + Hash, X> {
    pub machine: Machine<S, X>,
    pub certificate: Option<Certificate<S>>,
}

impl<S: Payload + Eq + Hash + Debug, X: Payload> QuotientRep<S, X> {
    pub fn new(machine: Machine<S, X>, certificate: Certificate<S>) -> Self {
        QuotientRep {
            machine,
            certificate: Some(certificate),
        }
    }

    pub fn uncertified(machine: Machine<S, X>) -> Self {
        QuotientRep {
            machine,
            certificate: None,
        }
    }

    pub fn underlying(&self) -> Delay<X> {
        self.machine.to_delay()
    }
}

/// Exact collapse: `Value x` iff the machine converges, `Bottom` iff it
/// revisits a state first. Every visited state is checked against the
/// certificate.
pub fn collapse_finite<S, X>(q: &QuotientRep<S, X>) -> Result<Partial<X>>
where
    S: Payload + Eq + Hash + Debug,
    X: Payload,
{
    collapse_finite_counted(q).map(|(p, _)| p)
}

/// As [`collapse_finite`], also returning the number of machine steps taken.
pub fn collapse_finite_counted<S, X>(q: &QuotientRep<S, X>) -> Result<(Partial<X>, u64)>
where
    S: Payload + Eq + Hash + Debug,
    X: Payload,
{
    let cert = q.certificate.as_ref().ok_or(Error::MissingCertificate)?;
    let mut seen = HashSet::new();
    let mut state = q.machine.seed().clone();
    let mut steps = 0u64;
    loop {
        if !cert.contains(&state) {
            return Err(Error::InvalidCertificate(format!("reachable state {state:?} escapes the certificate")));
        }
        if !seen.insert(state.clone()) {
            return Ok((Bottom, steps));
        }
        if seen.len() as u64 > cert.size() {
            return Err(Error::InvalidCertificate(format!(
                "more than {} distinct reachable states",
                cert.size()
            )));
        }
        match q.machine.step(&state) {
            Left(x) => return Ok((Value(x), steps)),
            Right(next) => {
                state = next;
                steps += 1;
            }
        }
    }
}

/// Decode digit `d` of a Kleisli table into `K {0..n}`: 0 is `Bottom`.
pub(crate) fn decode_partial(d: usize) -> Partial<usize> {
    if d == 0 {
        Bottom
    } else {
        Value(d - 1)
    }
}

pub(crate) fn kleisli_space(nx: usize, ny: usize) -> Result<FunSpace> {
    FunSpace::new(nx, ny + 1)
}

pub(crate) fn kleisli_nth(space: &FunSpace, i: u64) -> FinKleisli<usize, usize> {
    let table = space.nth(i).into_iter().map(decode_partial).collect();
    FinKleisli {
        domain: FinSet::range(space.domain_size()),
        table,
    }
}

/// All Kleisli maps `{0..nx} → K{0..ny}`.
pub fn all_kleisli(nx: usize, ny: usize) -> Result<Vec<FinKleisli<usize, usize>>> {
    let space = kleisli_space(nx, ny)?;
    Ok((0..space.count()).map(|i| kleisli_nth(&space, i)).collect())
}

/// All loop bodies `{0..ns} → K{0..nx} + {0..ns}`, as index tables.
pub(crate) fn all_partial_bodies(ns: usize, nx: usize) -> Result<Vec<Vec<Either<Partial<usize>, usize>>>> {
    let space = FunSpace::new(ns, nx + 1 + ns)?;
    Ok(space
        .iter()
        .map(|digits| {
            digits
                .into_iter()
                .map(|d| if d <= nx { Left(decode_partial(d)) } else { Right(d - nx - 1) })
                .collect()
        })
        .collect())
}

fn sizes_up_to(n: usize) -> impl Iterator<Item = usize> + Clone {
    0..=n
}

fn guard<T>(report: &mut LawReport, region: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.skip(format!("{region}: {e}"));
            None
        }
    }
}

/// Restriction-category axioms RST1–RST4 and the sum/unit lemmas for
/// domains, exhaustively over Kleisli tables with all sets of size at most
/// `cfg.max_size`; RST1 and RST3 additionally one size further.
pub fn check_restriction_axioms(cfg: &SuiteConfig) -> LawReport {
    check_restriction_axioms_with(&|f| dom(f), cfg)
}

/// A candidate domain operator on index-encoded Kleisli maps.
pub type DomFn = dyn Fn(&FinKleisli<usize, usize>) -> FinKleisli<usize, usize> + Sync;

/// As [`check_restriction_axioms`] with `dom` replaced by `dom_fn`. Also
/// checks `dom_fn` against the pointwise description of definedness.
pub fn check_restriction_axioms_with(dom_fn: &DomFn, cfg: &SuiteConfig) -> LawReport {
    let dom = dom_fn;
    let mut report = LawReport::new("restriction");
    let n = cfg.max_size;
    for nx in sizes_up_to(n + 1) {
        for ny in sizes_up_to(n + 1) {
            let Some(fs) = guard(&mut report, "f", all_kleisli(nx, ny)) else { continue };
            let extended = nx > n || ny > n;
            for f in &fs {
                let d = dom(f);
                let pointwise = FinKleisli::new(f.domain.clone(), |x| if f.table[*x].is_value() { Value(*x) } else { Bottom });
                report.check(d == pointwise, || Failure::new("dom-pointwise", format!("f={f:?}"), &d, &pointwise));
                let lhs = d;
                let rst1 = f.then_refl(&lhs);
                report.check(rst1 == *f, || Failure::new("RST1", format!("f={f:?}"), &rst1, f));
                let lhs = f.fmap(|y| Value(*y));
                let rhs = dom(f).fmap(|x| f.apply(x).unwrap().clone());
                report.check(lhs == rhs, || Failure::new("dom-unit", format!("f={f:?}"), &lhs, &rhs));
            }
            for nz in sizes_up_to(n + 1) {
                if extended || nz > n {
                    // only RST3 is required one size further
                    if nx > n + 1 || ny > n + 1 || nz > n + 1 {
                        continue;
                    }
                }
                let Some(gs) = guard(&mut report, "g", all_kleisli(nx, nz)) else { continue };
                let big = extended || nz > n;
                let failures = par::flat_map_range(cfg.exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    let df = dom(f);
                    let mut out = Vec::new();
                    for g in &gs {
                        let dg = dom(g);
                        let lhs = dom(&g.then_refl(&df));
                        let rhs = dg.then(&df).unwrap();
                        if lhs != rhs {
                            out.push(Failure::new("RST3", format!("f={f:?} g={g:?}"), &lhs, &rhs));
                        }
                        if !big {
                            let lhs = df.then(&dg).unwrap();
                            let rhs = dg.then(&df).unwrap();
                            if lhs != rhs {
                                out.push(Failure::new("RST2", format!("f={f:?} g={g:?}"), &lhs, &rhs));
                            }
                        }
                    }
                    out
                });
                report.record(fs.len() as u64 * gs.len() as u64 * if big { 1 } else { 2 }, failures);

                if big {
                    continue;
                }
                // RST4: f : X → KY, h : Y → KZ.
                let Some(hs) = guard(&mut report, "h", all_kleisli(ny, nz)) else { continue };
                let failures = par::flat_map_range(cfg.exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    let mut out = Vec::new();
                    for h in &hs {
                        let lhs = f.then(&dom(h)).unwrap();
                        let rhs = dom(&f.then(h).unwrap()).then(f).unwrap();
                        if lhs != rhs {
                            out.push(Failure::new("RST4", format!("f={f:?} h={h:?}"), &lhs, &rhs));
                        }
                    }
                    out
                });
                report.record(fs.len() as u64 * hs.len() as u64, failures);

                // dom of a copair: f : X → KZ, g : Y → KZ.
                let (Some(f2), Some(g2)) = (
                    guard(&mut report, "dom-copair f", all_kleisli(nx, nz)),
                    guard(&mut report, "dom-copair g", all_kleisli(ny, nz)),
                ) else {
                    continue;
                };
                // X + Y encoded as x ↦ x, y ↦ nx + y.
                let sum = FinSet::range(nx + ny);
                for f in &f2 {
                    for g in &g2 {
                        let copair = FinKleisli::new(sum.clone(), |e| if *e < nx { f.table[*e] } else { g.table[*e - nx] });
                        let lhs = dom(&copair);
                        let (df, dg) = (dom(f), dom(g));
                        let rhs = FinKleisli::new(sum.clone(), |e| if *e < nx { df.table[*e] } else { dg.table[*e - nx].map(|y| nx + y) });
                        report.check(lhs == rhs, || Failure::new("dom-copair", format!("f={f:?} g={g:?}"), &lhs, &rhs));
                    }
                }
            }
        }
    }
    report.finish()
}

impl<X> FinKleisli<X, X>
where
    X: Eq + Hash + Clone + Debug,
{
    /// `g* ∘ self` for an endo-map `self`, with `g` sharing the domain.
    fn then_refl_inner<Z: Clone + PartialEq + Debug>(&self, g: &FinKleisli<X, Z>) -> FinKleisli<X, Z> {
        self.then(g).expect("same domain")
    }
}

impl<X, Y> FinKleisli<X, Y>
where
    X: Eq + Hash + Clone + Debug,
    Y: Clone + PartialEq + Debug,
{
    /// `self* ∘ e` for an endo-map `e` on the domain: the composite used by
    /// the restriction axioms.
    pub fn then_refl(&self, e: &FinKleisli<X, X>) -> FinKleisli<X, Y> {
        e.then_refl_inner(self)
    }
}

/// Equational lifting (`τ ∘ Δ = K⟨η, id⟩`), commutativity, and the
/// copyable / weakly discardable laws, exhaustively on the maybe backend.
pub fn check_equational_lifting(cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("lifting");
    let n = cfg.max_size.max(1) + 1;
    let carrier = |k: usize| -> Vec<Partial<usize>> { std::iter::once(Bottom).chain((0..k).map(Value)).collect() };
    for nx in sizes_up_to(n) {
        for d in carrier(nx) {
            let lhs = Partial::strength(d, d);
            let rhs = d.map(|x| (Value(x), x));
            report.check(lhs == rhs, || Failure::new("equational-lifting", format!("d={d:?}"), lhs, rhs));

            let lhs = Partial::strength(d, d).bind(|(p, y)| Partial::costrength(p, y));
            let rhs = d.map(|x| (x, x));
            report.check(lhs == rhs, || Failure::new("copyable", format!("d={d:?}"), lhs, rhs));

            let lhs = Partial::strength(7usize, Bottom::<usize>);
            report.check(lhs == Bottom, || Failure::new("strength-bottom", format!("d={d:?}"), lhs, Bottom::<(usize, usize)>));

            for ny in sizes_up_to(n) {
                for e in carrier(ny) {
                    let lhs = Partial::strength(d, e).bind(|(p, y)| Partial::costrength(p, y));
                    let rhs = Partial::costrength(d, e).bind(|(x, q)| Partial::strength(x, q));
                    report.check(lhs == rhs, || Failure::new("commutativity", format!("d={d:?} e={e:?}"), lhs, rhs));
                    if d.le(&e) && nx == ny {
                        let (l, r) = (Partial::strength(5usize, d), Partial::strength(5usize, e));
                        report.check(l.le(&r), || Failure::new("strength-monotone", format!("d={d:?} e={e:?}"), l, r));
                    }
                }
            }
        }
    }
    // Weak discardability: (K fst) τ̂* τ ⟨f, g⟩ ⊑ f.
    for nx in sizes_up_to(n) {
        for ny in sizes_up_to(cfg.max_size) {
            for nz in sizes_up_to(cfg.max_size) {
                let (Some(fs), Some(gs)) = (
                    guard(&mut report, "discard f", all_kleisli(nx, ny)),
                    guard(&mut report, "discard g", all_kleisli(nx, nz)),
                ) else {
                    continue;
                };
                let failures = par::flat_map_range(cfg.exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    gs.iter()
                        .filter_map(|g| {
                            let lhs = FinKleisli::new(f.domain.clone(), |x| {
                                let (fx, gx) = (f.table[*x], g.table[*x]);
                                Partial::strength(fx, gx)
                                    .bind(|(p, z)| Partial::costrength(p, z))
                                    .map(|(y, _)| y)
                            });
                            (!leq(&lhs, f).unwrap()).then(|| Failure::new("weakly-discardable", format!("f={f:?} g={g:?}"), &lhs, f))
                        })
                        .collect()
                });
                report.record(fs.len() as u64 * gs.len() as u64, failures);
            }
        }
    }
    // dom(η ∘ h) = η and dom f ⊑ η.
    for nx in sizes_up_to(n) {
        let x = FinSet::range(nx);
        let eta = FinKleisli::eta(x.clone());
        let d = dom(&FinKleisli::new(x.clone(), |i| Value(i * 2)));
        report.check(d == eta, || Failure::new("dom-eta", format!("|X|={nx}"), &d, &eta));
        if let Some(fs) = guard(&mut report, "dom f ⊑ η", all_kleisli(nx, 2)) {
            for f in &fs {
                let d = dom(f);
                report.check(leq(&d, &eta).unwrap(), || Failure::new("dom-below-eta", format!("f={f:?}"), &d, &eta));
            }
        }
    }
    report.finish()
}

/// Kleene approximation, least pre-fixpoints, the pre-Elgot law and
/// enrichment on the maybe backend; also cross-checks the oracle, the
/// library iteration and the Elgot iteration after rearrangement.
pub fn check_kleene_suite(cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("kleene");
    let kleene_states = cfg.max_size + 2;
    for ns in 1..=kleene_states {
        for nx in sizes_up_to(2) {
            let Some(bodies) = guard(&mut report, "kleene bodies", all_partial_bodies(ns, nx)) else { continue };
            let states = FinSet::range(ns);
            let reports = par::map_range(cfg.exec, 0..bodies.len() as u64, |i| {
                let table = &bodies[i as usize];
                let mut r = LawReport::new("kleene");
                let lp = LoopBody::from_table(states.clone(), table.clone()).expect("well-formed body");
                let elgot_body = crate::elgot::ElgotBody::from_loop(&lp);
                for s0 in 0..ns {
                    let inst = format!("{table:?} from {s0}");
                    kleene_instance(&mut r, table, s0, &inst);
                    let lib = iterate_partial_indexed(table, s0);
                    let oracle = oracle_iterate(&lp, &s0).unwrap();
                    let via_elgot = crate::elgot::elgot_iterate(&elgot_body, &s0).unwrap();
                    r.check(lib == oracle, || Failure::new("oracle-agreement", inst.clone(), lib, oracle));
                    r.check(lib == via_elgot, || Failure::new("elgot-rearrangement", inst.clone(), lib, via_elgot));
                }
                r
            });
            for r in reports {
                report.merge(r);
            }
        }
    }

    let n = cfg.max_size;
    for ns in 1..=n {
        for nx in sizes_up_to(n) {
            let Some(bodies) = guard(&mut report, "prefix bodies", all_partial_bodies(ns, nx)) else { continue };
            let Some(gs) = guard(&mut report, "prefix candidates", all_kleisli(ns, nx)) else { continue };
            for table in &bodies {
                let full: Vec<_> = (0..ns).map(|s| iterate_partial_indexed(table, s)).collect();
                for g in &gs {
                    // [id, g] ∘ f ⊑ g
                    let pre = (0..ns).all(|s| {
                        let step = match &table[s] {
                            Left(a) => *a,
                            Right(t) => g.table[*t],
                        };
                        step.le(&g.table[s])
                    });
                    if pre {
                        let ok = (0..ns).all(|s| full[s].le(&g.table[s]));
                        report.check(ok, || Failure::new("least-prefixpoint", format!("f={table:?} g={g:?}"), &full, g));
                    }
                }
                // The iterate is itself a fixpoint.
                let fixed = (0..ns).all(|s| {
                    let step = match &table[s] {
                        Left(a) => *a,
                        Right(t) => full[*t],
                    };
                    step == full[s]
                });
                report.check(fixed, || Failure::new("fixpoint", format!("f={table:?}"), &full, "[id, f†] ∘ f"));

                // Pre-Elgot: h* ∘ f† = ((h* + id) ∘ f)†.
                for ny in sizes_up_to(n) {
                    let Some(hs) = guard(&mut report, "pre-elgot h", all_kleisli(nx, ny)) else { continue };
                    for h in &hs {
                        let ext = |p: Partial<usize>| p.bind(|x| h.table[x]);
                        let lifted: Vec<_> = table.iter().map(|e| e.clone().map_left(ext)).collect();
                        for s in 0..ns {
                            let lhs = ext(full[s]);
                            let rhs = iterate_partial_indexed(&lifted, s);
                            report.check(lhs == rhs, || Failure::new("pre-elgot", format!("f={table:?} h={h:?} s={s}"), lhs, rhs));
                        }
                    }
                }
            }
        }
    }

    // Enrichment: composition is monotone in both arguments and strict.
    for nx in sizes_up_to(n) {
        for ny in sizes_up_to(n) {
            let (Some(fs), Some(gs)) = (
                guard(&mut report, "enrichment f", all_kleisli(nx, ny)),
                guard(&mut report, "enrichment g", all_kleisli(ny, ny)),
            ) else {
                continue;
            };
            let bot_x = FinKleisli::<usize, usize>::bottom(FinSet::range(nx));
            let bot_y = FinKleisli::<usize, usize>::bottom(FinSet::range(ny));
            for f in &fs {
                let l = bot_y.then_refl_inner(f).clone();
                let _ = l;
                let strict_r = f.then(&bot_y).unwrap();
                report.check(strict_r == bot_x, || Failure::new("strict-right", format!("f={f:?}"), &strict_r, &bot_x));
                for f2 in &fs {
                    if !leq(f, f2).unwrap() {
                        continue;
                    }
                    for g in &gs {
                        let (a, b) = (f.then(g).unwrap(), f2.then(g).unwrap());
                        report.check(leq(&a, &b).unwrap(), || Failure::new("monotone-right", format!("f={f:?} f'={f2:?} g={g:?}"), &a, &b));
                    }
                }
                for g in &gs {
                    for g2 in &gs {
                        if !leq(g, g2).unwrap() {
                            continue;
                        }
                        let (a, b) = (f.then(g).unwrap(), f.then(g2).unwrap());
                        report.check(leq(&a, &b).unwrap(), || Failure::new("monotone-left", format!("f={f:?} g={g:?} g'={g2:?}"), &a, &b));
                    }
                }
            }
            for g in &gs {
                let strict_l = bot_y.then(g).unwrap();
                report.check(strict_l == bot_y, || Failure::new("strict-left", format!("g={g:?}"), &strict_l, &bot_y));
            }
        }
        // K∅ ≅ 1: the only map into the empty codomain is ⊥.
        if let Some(into_empty) = guard(&mut report, "empty codomain", all_kleisli(nx, 0)) {
            let bot = FinKleisli::<usize, usize>::bottom(FinSet::range(nx));
            let ok = into_empty.len() == 1 && into_empty[0] == bot;
            report.check(ok, || Failure::new("empty-codomain", format!("|X|={nx}"), &into_empty, vec![bot]));
        }
    }
    report.finish()
}

/// A finite table machine with its full state set as certificate.
pub fn table_rep<X: Payload>(table: Vec<Either<X, usize>>, seed: usize) -> QuotientRep<usize, X> {
    let n = table.len();
    QuotientRep::new(Machine::from_table(table, seed), Certificate::States(FinSet::range(n)))
}

/// All table machines with `1..=max_states` states over values `{0..nx}`.
pub fn all_table_machines(max_states: usize, nx: usize) -> Result<Vec<(Vec<Either<usize, usize>>, usize)>> {
    let mut out = Vec::new();
    for ns in 1..=max_states {
        let space = FunSpace::new(ns, nx + ns)?;
        for digits in space.iter() {
            let table: Vec<_> = digits
                .into_iter()
                .map(|d| if d < nx { Left(d) } else { Right(d - nx) })
                .collect();
            for seed in 0..ns {
                out.push((table.clone(), seed));
            }
        }
    }
    Ok(out)
}

/// Coherence of exact collapse: it ignores `later`, sends `now x` to
/// `Value x`, is a monad morphism, and agrees with fuel-bounded collapse
/// whenever the latter is determined.
pub fn check_collapse_coherence(cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("collapse");
    let max_states = cfg.max_size + 2;
    let Some(machines) = guard(&mut report, "machines", all_table_machines(max_states, 2)) else {
        return report.finish();
    };
    let Some(conts) = guard(&mut report, "continuations", all_table_machines(2, 2)) else {
        return report.finish();
    };
    let conts = Arc::new(conts);
    let nc = conts.len() as u64;
    let f_count = nc * nc;

    for x in 0..3usize {
        let q = QuotientRep::new(Machine::new((), move |_: &()| Left(x)), Certificate::States(FinSet::new([()]).unwrap()));
        let c = collapse_finite(&q).unwrap();
        report.check(c == Value(x), || Failure::new("collapse-now", format!("x={x}"), c, Value(x)));
    }

    let reports = par::map_range(cfg.exec, 0..machines.len() as u64, |i| {
        let (table, seed) = &machines[i as usize];
        let mut r = LawReport::new("collapse");
        let inst = format!("{table:?} from {seed}");
        let q = table_rep(table.clone(), *seed);
        let base = collapse_finite(&q).unwrap();

        let lq = QuotientRep::new(q.machine.later(), Certificate::bounded(table.len() as u64 + 1, |_| true));
        let lc = collapse_finite(&lq).unwrap();
        r.check(lc == base, || Failure::new("collapse-later", inst.clone(), lc, base));

        let fuel = collapse_fuel(&q.underlying(), table.len() as u64);
        if let Some(p) = fuel.determined() {
            r.check(*p == base, || Failure::new("fuel-agreement", inst.clone(), p, base));
        } else {
            r.check(base == Bottom, || Failure::new("fuel-agreement", inst.clone(), "Unknown at fuel |S|", base));
        }

        // Monad morphism: collapse(d >>= f) = collapse(d) >>= collapse ∘ f,
        // over every f sending each of the two values to a machine with at
        // most two states.
        for fi in 0..f_count {
            let pick = [(fi % nc) as usize, (fi / nc) as usize];
            let conts = Arc::clone(&conts);
            let cont = move |x: &usize| {
                let (t, s) = &conts[pick[*x]];
                Machine::from_table(t.clone(), *s)
            };
            let bound = table.len() as u64 + 2 * 2;
            let composite = QuotientRep::new(q.machine.bind(cont.clone()), Certificate::bounded(bound, |_| true));
            let lhs = collapse_finite(&composite).unwrap();
            let rhs = base.bind(|x| {
                let m = cont(&x);
                let n = 2;
                collapse_finite(&QuotientRep::new(m, Certificate::States(FinSet::range(n)))).unwrap()
            });
            r.check(lhs == rhs, || Failure::new("monad-morphism", format!("{inst}, f=#{fi}"), lhs, rhs));
        }
        r
    });
    for r in reports {
        report.merge(r);
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(table: Vec<Either<Partial<char>, usize>>) -> LoopBody<Partial<char>, usize> {
        let n = table.len();
        LoopBody::from_table(FinSet::range(n), table).unwrap()
    }

    #[test]
    fn monad_examples() {
        assert_eq!(Value(2).bind(|x| Value(x + 1)), Value(3));
        assert_eq!(Bottom::<i32>.bind(|x| Value(x + 1)), Bottom);
        assert_eq!(Partial::strength(7, Bottom::<u8>), Bottom);
        assert_eq!(Partial::strength(7, Value('y')), Value((7, 'y')));
        assert_eq!(Value(Value(1)).mu(), Value(1));
    }

    #[test]
    fn iterate_examples() {
        let body = lp(vec![Right(1), Left(Value('a'))]);
        assert_eq!(iterate_partial(&body, &0).unwrap(), Value('a'));
        let cyc = lp(vec![Right(1), Right(2), Right(0)]);
        for s in 0..3 {
            assert_eq!(iterate_partial(&cyc, &s).unwrap(), Bottom);
        }
        assert!(matches!(iterate_partial(&cyc, &3), Err(Error::UnknownState(_))));
        let body_div = lp(vec![Right(1), Left(Bottom)]);
        assert_eq!(iterate_partial(&body_div, &0).unwrap(), Bottom);
    }

    #[test]
    fn dom_examples() {
        let x = FinSet::range(2);
        let total = FinKleisli::new(x.clone(), |i| Value(i + 10));
        assert_eq!(dom(&total), FinKleisli::eta(x.clone()));
        let nowhere = FinKleisli::<usize, usize>::bottom(x.clone());
        assert_eq!(dom(&nowhere), FinKleisli::bottom(x.clone()));
        let mixed = FinKleisli::from_table(x.clone(), vec![Value('a'), Bottom]).unwrap();
        assert_eq!(dom(&mixed).table(), &[Value(0), Bottom]);
        let d = dom(&mixed);
        assert_eq!(dom(&d), d);
    }

    #[test]
    fn restrict_examples() {
        let x = FinSet::range(2);
        let f = FinKleisli::from_table(x.clone(), vec![Value('a'), Value('b')]).unwrap();
        assert_eq!(restrict(&f, &FinKleisli::eta(x.clone())).unwrap(), f);
        let bot = FinKleisli::<usize, char>::bottom(x.clone());
        assert_eq!(restrict(&f, &bot).unwrap(), bot);
        let g = FinKleisli::from_table(x.clone(), vec![Value(1u8), Bottom]).unwrap();
        assert_eq!(restrict(&f, &g).unwrap().table(), &[Value('a'), Bottom]);
        // f ↾ g = f* ∘ dom g
        assert_eq!(restrict(&f, &g).unwrap(), dom(&g).then(&FinKleisli::from_table(x.clone(), f.table().to_vec()).unwrap()).unwrap());
        let other = FinKleisli::<usize, u8>::bottom(FinSet::range(3));
        assert!(matches!(restrict(&f, &other), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn leq_examples() {
        let x = FinSet::range(1);
        let f = FinKleisli::from_table(x.clone(), vec![Value('a')]).unwrap();
        let g = FinKleisli::from_table(x.clone(), vec![Value('b')]).unwrap();
        assert!(leq(&FinKleisli::bottom(x.clone()), &g).unwrap());
        assert!(leq(&f, &f).unwrap());
        assert!(!leq(&f, &g).unwrap());
        assert!(matches!(leq(&f, &FinKleisli::bottom(FinSet::range(2))), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn leq_is_pointwise_order() {
        for f in all_kleisli(2, 2).unwrap() {
            for g in all_kleisli(2, 2).unwrap() {
                let pointwise = f.table().iter().zip(g.table()).all(|(a, b)| a.le(b));
                assert_eq!(leq(&f, &g).unwrap(), pointwise);
            }
        }
    }

    #[test]
    fn bounded_iterate_examples() {
        let body = lp(vec![Right(1), Left(Value('a'))]);
        assert_eq!(bounded_iterate(&body, &0, 0).unwrap(), Bottom);
        assert_eq!(bounded_iterate(&body, &0, 3).unwrap(), Value('a'));
        assert_eq!(bounded_iterate(&body, &0, 2).unwrap(), Value('a'));
        assert_eq!(bounded_iterate(&body, &0, 1).unwrap(), Bottom);
    }

    #[test]
    fn kleene_check_examples() {
        let cyc = lp(vec![Right(0)]);
        assert!(kleene_check(&cyc, &0).unwrap().passed());
        for n in 0..5 {
            assert_eq!(bounded_iterate(&cyc, &0, n).unwrap(), Bottom);
        }
        let exit = lp(vec![Left(Value('v'))]);
        let chain: Vec<_> = (0..4).map(|n| bounded_iterate(&exit, &0, n).unwrap()).collect();
        assert_eq!(chain, vec![Bottom, Value('v'), Value('v'), Value('v')]);
    }

    #[test]
    fn collapse_fuel_examples() {
        assert!(matches!(collapse_fuel(&delay::iota('x', 3), 5), ThreeValuedResult::Determined(Value('x'))));
        assert!(matches!(collapse_fuel(&delay::iota('x', 3), 2), ThreeValuedResult::Unknown(_)));
        let d = delay::iota('x', 4);
        let (a, b) = (collapse_fuel(&d, 10), collapse_fuel(&delay::later(d), 10));
        assert_eq!(a.determined(), b.determined());
    }

    #[test]
    fn collapse_finite_examples() {
        let k = 3;
        let iota = Machine::new(k, |n: &u32| if *n == 0 { Left('x') } else { Right(*n - 1) });
        let cert = Certificate::States(FinSet::new(0..=k).unwrap());
        assert_eq!(collapse_finite(&QuotientRep::new(iota.clone(), cert)).unwrap(), Value('x'));

        let looping = Machine::new(0u8, |s: &u8| Right::<char, u8>(*s));
        let cert = Certificate::States(FinSet::new([0u8]).unwrap());
        assert_eq!(collapse_finite(&QuotientRep::new(looping, cert)).unwrap(), Bottom);

        let too_small = Certificate::States(FinSet::new([3u32, 2]).unwrap());
        assert!(matches!(
            collapse_finite(&QuotientRep::new(iota.clone(), too_small)),
            Err(Error::InvalidCertificate(_))
        ));
        assert!(matches!(collapse_finite(&QuotientRep::uncertified(iota)), Err(Error::MissingCertificate)));
    }

    #[test]
    fn restriction_suite_small() {
        let cfg = SuiteConfig { max_size: 1, ..Default::default() };
        let r = check_restriction_axioms(&cfg);
        assert!(r.passed(), "{:#?}", r.failures);
    }

    #[test]
    fn wrong_dom_is_reported() {
        // dom f = η satisfies RST1-RST4 (it is the trivial restriction
        // structure); the defect shows in dom-unit, (Tη)f = Tf ∘ dom f, and in the pointwise
        // description as soon as f has an undefined point.
        let wrong = |f: &FinKleisli<usize, usize>| FinKleisli::eta(f.domain().clone());
        let cfg = SuiteConfig { max_size: 1, ..Default::default() };
        let r = check_restriction_axioms_with(&wrong, &cfg);
        assert!(r.failures_of("RST1").next().is_none());
        assert!(r.failures_of("dom-unit").next().is_some());
        assert!(r.failures_of("dom-pointwise").next().is_some());
    }

    #[test]
    fn lifting_examples() {
        let d = Value(3);
        assert_eq!(Partial::strength(d, d), Value((Value(3), 3)));
        assert_eq!(Partial::strength(Bottom::<u8>, Bottom::<u8>), Bottom);
    }

    #[test]
    fn collapse_machine_bind_example() {
        let m = Machine::from_table(vec![Right(1), Left(1usize)], 0);
        let cont = |x: &usize| Machine::from_table(vec![Left(*x * 10)], 0);
        let q = QuotientRep::new(m.bind(cont), Certificate::bounded(4, |_| true));
        assert_eq!(collapse_finite(&q).unwrap(), Value(10));
    }
}
