//! Finite carriers, exhaustive function spaces, and the brute-force
//! iteration oracle that every iteration operator is cross-checked against.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use either::Either::{self, Left, Right};

use crate::algebra::LoopBody;
use crate::error::{Error, Result};
use crate::partial::{bounded_iterate, Partial};
use crate::report::{Failure, LawReport, SuiteConfig};
use crate::par;

/// Default cap on the size of any enumerated instance space.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ELGOT_ITER_BUDGET";

/// The global instance cap: `ELGOT_ITER_BUDGET` if set and numeric, else the default.
pub fn budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// A finite set with a stable enumeration order.
#[derive(Clone, PartialEq, Eq)]
pub struct FinSet<T: Eq + Hash> {
    elems: Vec<T>,
    index: HashMap<T, usize>,
}

impl<T: Eq + Hash + Debug> Debug for FinSet<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(&self.elems).finish()
    }
}

impl<T: Eq + Hash> FinSet<T> {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elems
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        self.elems.get(i)
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }
}

impl<T: Eq + Hash + Clone + Debug> FinSet<T> {
    pub fn new(elems: impl IntoIterator<Item = T>) -> Result<Self> {
        let elems: Vec<T> = elems.into_iter().collect();
        let mut index = HashMap::with_capacity(elems.len());
        for (i, e) in elems.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::DuplicateElement(format!("{e:?}")));
            }
        }
        Ok(FinSet { elems, index })
    }

    pub fn require(&self, x: &T) -> Result<usize> {
        self.index_of(x)
            .ok_or_else(|| Error::UnknownState(format!("{x:?}")))
    }

    /// Disjoint union, left summand first.
    pub fn coproduct<U: Eq + Hash + Clone + Debug>(&self, other: &FinSet<U>) -> FinSet<Either<T, U>> {
        let elems = self
            .elems
            .iter()
            .cloned()
            .map(Left)
            .chain(other.elems.iter().cloned().map(Right));
        FinSet::new(elems).expect("disjoint union of sets has no duplicates")
    }

    /// Cartesian product in row-major order (first component varies slowest).
    pub fn product<U: Eq + Hash + Clone + Debug>(&self, other: &FinSet<U>) -> FinSet<(T, U)> {
        let elems = self
            .elems
            .iter()
            .flat_map(|a| other.elems.iter().map(move |b| (a.clone(), b.clone())));
        FinSet::new(elems).expect("product of sets has no duplicates")
    }
}

impl FinSet<usize> {
    /// `{0, 1, .., n-1}`.
    pub fn range(n: usize) -> Self {
        FinSet::new(0..n).expect("a range has no duplicates")
    }
}

/// All total tables `dom -> cod` between finite sets of the given sizes,
/// encoded as vectors of codomain indices.
///
/// Table `i` is the little-endian base-`cod` expansion of `i`, so the
/// enumeration is complete, duplicate-free and deterministic, and any table
/// can be decoded independently of the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FunSpace {
    dom: usize,
    cod: usize,
    count: u64,
}

impl FunSpace {
    pub fn new(dom: usize, cod: usize) -> Result<Self> {
        Self::with_cap(dom, cod, budget())
    }

    pub fn with_cap(dom: usize, cod: usize, cap: u64) -> Result<Self> {
        let count = (cod as u128).checked_pow(dom as u32).unwrap_or(u128::MAX);
        if count > cap as u128 {
            return Err(Error::SizeLimit { count, cap });
        }
        Ok(FunSpace {
            dom,
            cod,
            count: count as u64,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.dom
    }

    pub fn codomain_size(&self) -> usize {
        self.cod
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Decode table number `i` (`i < count`).
    pub fn nth(&self, mut i: u64) -> Vec<usize> {
        debug_assert!(i < self.count);
        let cod = self.cod as u64;
        (0..self.dom)
            .map(|_| {
                let d = i % cod;
                i /= cod;
                d as usize
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count).map(move |i| self.nth(i))
    }
}

/// Every total function from `domain` to `codomain`, as tables aligned with
/// the domain's enumeration order.
pub fn enumerate_functions<'a, A, B>(
    domain: &FinSet<A>,
    codomain: &'a FinSet<B>,
) -> Result<impl Iterator<Item = Vec<B>> + 'a>
where
    A: Eq + Hash + Clone + Debug,
    B: Eq + Hash + Clone + Debug,
{
    let space = FunSpace::new(domain.len(), codomain.len())?;
    Ok((0..space.count()).map(move |i| {
        space
            .nth(i)
            .into_iter()
            .map(|d| codomain.elems[d].clone())
            .collect()
    }))
}

/// Reference semantics for iteration on the partiality carrier.
///
/// Walks the Right-edges from `s0`, keeping the visited states in a plain
/// list, and stops at the first exit (returning its payload) or at the first
/// repeated state (returning `Bottom`).
pub fn oracle_iterate<X, S>(lp: &LoopBody<Partial<X>, S>, s0: &S) -> Result<Partial<X>>
where
    X: Clone,
    S: Eq + Hash + Clone + Debug,
{
    let mut current = lp.states().require(s0)?;
    let mut visited: Vec<usize> = Vec::new();
    loop {
        if visited.contains(&current) {
            return Ok(Partial::Bottom);
        }
        visited.push(current);
        match &lp.table()[current] {
            Left(result) => return Ok(result.clone()),
            Right(next) => current = *next,
        }
    }
}

/// `X × (Y + Z) → X×Y + X×Z`.
pub fn dstr<X, Y, Z>((x, yz): (X, Either<Y, Z>)) -> Either<(X, Y), (X, Z)> {
    match yz {
        Left(y) => Left((x, y)),
        Right(z) => Right((x, z)),
    }
}

pub fn dstr_inv<X, Y, Z>(e: Either<(X, Y), (X, Z)>) -> (X, Either<Y, Z>) {
    match e {
        Left((x, y)) => (x, Left(y)),
        Right((x, z)) => (x, Right(z)),
    }
}

/// `(X + Y) × Z → X×Z + Y×Z`.
pub fn dstl<X, Y, Z>((xy, z): (Either<X, Y>, Z)) -> Either<(X, Z), (Y, Z)> {
    match xy {
        Left(x) => Left((x, z)),
        Right(y) => Right((y, z)),
    }
}

pub fn dstl_inv<X, Y, Z>(e: Either<(X, Z), (Y, Z)>) -> (Either<X, Y>, Z) {
    match e {
        Left((x, z)) => (Left(x), z),
        Right((y, z)) => (Right(y), z),
    }
}

/// Copairing `[f, g] : X + Y → Z`.
pub fn copair<X, Y, Z>(f: impl FnOnce(X) -> Z, g: impl FnOnce(Y) -> Z) -> impl FnOnce(Either<X, Y>) -> Z {
    move |e| match e {
        Left(x) => f(x),
        Right(y) => g(y),
    }
}

/// `f + g : X + Y → X' + Y'`.
pub fn sum_map<X, Y, X2, Y2>(
    e: Either<X, Y>,
    f: impl FnOnce(X) -> X2,
    g: impl FnOnce(Y) -> Y2,
) -> Either<X2, Y2> {
    match e {
        Left(x) => Left(f(x)),
        Right(y) => Right(g(y)),
    }
}

/// Pairing `⟨f, g⟩ : X → Y × Z`.
pub fn pair<X: Clone, Y, Z>(f: impl FnOnce(X) -> Y, g: impl FnOnce(X) -> Z) -> impl FnOnce(X) -> (Y, Z) {
    move |x| (f(x.clone()), g(x))
}

/// Enumeration and distributivity checks, plus the oracle against bounded
/// iteration at `|S| + 1` on every partial loop body with `|S|, |X| <= max_size + 1`.
pub fn check_finset_suite(cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("finset");
    let n = cfg.max_size + 1;
    for d in 0..=n {
        for c in 0..=n {
            let sp = match FunSpace::new(d, c) {
                Ok(sp) => sp,
                Err(e) => {
                    report.skip(format!("{d}->{c}: {e}"));
                    continue;
                }
            };
            let want = (c as u64).pow(d as u32);
            report.check(sp.count() == want, || Failure::new("count", format!("{d}->{c}"), sp.count(), want));
            let distinct: std::collections::HashSet<_> = sp.iter().collect();
            report.check(distinct.len() as u64 == sp.count(), || {
                Failure::new("duplicate-free", format!("{d}->{c}"), distinct.len(), sp.count())
            });
        }
    }
    for nx in 0..=n {
        for ny in 0..=n {
            let (x, y, z) = (FinSet::range(nx), FinSet::range(ny), FinSet::range(n));
            for a in x.product(&y.coproduct(&z)).elements() {
                report.check(dstr_inv(dstr(*a)) == *a, || Failure::new("dstr-inverse", format!("{a:?}"), dstr_inv(dstr(*a)), a));
            }
            for a in x.coproduct(&y).product(&z).elements() {
                report.check(dstl_inv(dstl(*a)) == *a, || Failure::new("dstl-inverse", format!("{a:?}"), dstl_inv(dstl(*a)), a));
            }
        }
    }
    for ns in 1..=n {
        for nx in 0..=n {
            let bodies = match crate::partial::all_partial_bodies(ns, nx) {
                Ok(b) => b,
                Err(e) => {
                    report.skip(format!("|S|={ns} |X|={nx}: {e}"));
                    continue;
                }
            };
            let results = par::flat_map_range(cfg.exec, 0..bodies.len() as u64, |i| {
                let lp = LoopBody::from_table(FinSet::range(ns), bodies[i as usize].clone()).expect("index table");
                (0..ns)
                    .map(|s| {
                        let o = oracle_iterate(&lp, &s).expect("known state");
                        let b = bounded_iterate(&lp, &s, ns as u64 + 1).expect("known state");
                        (o == b).then_some(()).ok_or_else(|| Failure::new("oracle-vs-bounded", format!("{lp:?} at {s}"), o, b))
                    })
                    .collect::<Vec<_>>()
            });
            report.record(results.len() as u64, results.into_iter().filter_map(|r| r.err()).collect());
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_follow_the_power_law() {
        assert_eq!(FunSpace::new(2, 3).unwrap().count(), 9);
        assert_eq!(FunSpace::new(0, 7).unwrap().count(), 1);
        assert_eq!(FunSpace::new(3, 5).unwrap().count(), 125);
        assert_eq!(FunSpace::new(0, 0).unwrap().count(), 1);
        assert_eq!(FunSpace::new(2, 0).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_is_duplicate_free() {
        let sp = FunSpace::new(3, 4).unwrap();
        let all: std::collections::HashSet<_> = sp.iter().collect();
        assert_eq!(all.len() as u64, sp.count());
        assert!(all.iter().all(|t| t.len() == 3 && t.iter().all(|&d| d < 4)));
    }

    #[test]
    fn empty_domain_has_exactly_the_empty_table() {
        let dom: FinSet<u8> = FinSet::new([]).unwrap();
        let cod = FinSet::new(['a', 'b']).unwrap();
        let tables: Vec<_> = enumerate_functions(&dom, &cod).unwrap().collect();
        assert_eq!(tables, vec![Vec::<char>::new()]);
    }

    #[test]
    fn size_limit_is_reported() {
        let err = FunSpace::with_cap(10, 10, 1000).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { cap: 1000, .. }));
    }

    #[test]
    fn duplicates_are_rejected() {
        assert!(matches!(FinSet::new([1, 2, 1]), Err(Error::DuplicateElement(_))));
    }

    #[test]
    fn distributivity_examples() {
        assert_eq!(dstr::<_, _, u8>((1, Left('y'))), Left((1, 'y')));
        assert_eq!(dstl::<u8, _, _>((Right('y'), 2)), Right(('y', 2)));
    }

    #[test]
    fn distributivity_round_trips_exhaustively() {
        for nx in 0..=3usize {
            for ny in 0..=3usize {
                for nz in 0..=3usize {
                    let (x, y, z) = (FinSet::range(nx), FinSet::range(ny), FinSet::range(nz));
                    for a in x.product(&y.coproduct(&z)).elements() {
                        assert_eq!(dstr_inv(dstr(*a)), *a);
                    }
                    for e in x.product(&y).coproduct(&x.product(&z)).elements() {
                        assert_eq!(dstr(dstr_inv(*e)), *e);
                    }
                    for a in x.coproduct(&y).product(&z).elements() {
                        assert_eq!(dstl_inv(dstl(*a)), *a);
                    }
                    for e in x.product(&z).coproduct(&y.product(&z)).elements() {
                        assert_eq!(dstl(dstl_inv(*e)), *e);
                    }
                }
            }
        }
    }

    #[test]
    fn suite_passes() {
        let r = check_finset_suite(&SuiteConfig::default());
        assert!(r.passed() && r.skipped.is_empty(), "{:#?}", r.failures);
        assert!(r.instances > 0);
    }

    #[test]
    fn oracle_examples() {
        let lp = LoopBody::from_fn(FinSet::range(2), |s| {
            if *s == 0 {
                Right(1)
            } else {
                Left(Partial::Value('a'))
            }
        })
        .unwrap();
        assert_eq!(oracle_iterate(&lp, &0).unwrap(), Partial::Value('a'));

        let lp = LoopBody::<Partial<char>, _>::from_fn(FinSet::range(1), |_| Right(0)).unwrap();
        assert_eq!(oracle_iterate(&lp, &0).unwrap(), Partial::Bottom);
        assert!(matches!(oracle_iterate(&lp, &5), Err(Error::UnknownState(_))));
    }
}
