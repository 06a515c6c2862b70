//! Uniform-iteration algebras on finite state spaces: the iteration
//! interface, derived algebras (products, exponentials, search algebras),
//! and exhaustive checkers for the Elgot-algebra laws.

use std::fmt::{self, Debug};
use std::hash::Hash;

use either::Either::{self, Left, Right};

use crate::delay::{self, Delay, Machine, Payload};
use crate::error::{Error, Result};
use crate::finset::{FinSet, FunSpace};
use crate::par::{self, Exec};
use crate::partial::{self, Partial};
use crate::report::{Exactness, Failure, LawReport};

/// A loop body `f : S → A + S` on a finite state set. `Right` entries are
/// indices into `states`.
#[derive(Clone, PartialEq)]
pub struct LoopBody<A, S: Eq + Hash = usize> {
    states: FinSet<S>,
    body: Vec<Either<A, usize>>,
}

impl<A: Debug, S: Eq + Hash + Debug> Debug for LoopBody<A, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, e) in self.states.elements().iter().zip(&self.body) {
            match e {
                Left(a) => m.entry(s, &Left::<&A, &S>(a)),
                Right(t) => m.entry(s, &Right::<&A, &S>(&self.states.elements()[*t])),
            };
        }
        m.finish()
    }
}

impl<A: Clone, S: Eq + Hash + Clone + Debug> LoopBody<A, S> {
    pub fn from_fn(states: FinSet<S>, f: impl Fn(&S) -> Either<A, S>) -> Result<Self> {
        let body = states
            .elements()
            .iter()
            .map(|s| match f(s) {
                Left(a) => Ok(Left(a)),
                Right(t) => states.require(&t).map(Right),
            })
            .collect::<Result<_>>()?;
        Ok(LoopBody { states, body })
    }

    pub fn from_table(states: FinSet<S>, body: Vec<Either<A, usize>>) -> Result<Self> {
        if body.len() != states.len() {
            return Err(Error::DomainMismatch(format!(
                "{} entries for {} states",
                body.len(),
                states.len()
            )));
        }
        if let Some(t) = body.iter().filter_map(|e| e.as_ref().right()).find(|t| **t >= states.len()) {
            return Err(Error::UnknownState(format!("target index {t}")));
        }
        Ok(LoopBody { states, body })
    }

    pub fn states(&self) -> &FinSet<S> {
        &self.states
    }

    pub fn table(&self) -> &[Either<A, usize>] {
        &self.body
    }

    /// `f(s)`.
    pub fn apply(&self, s: &S) -> Result<Either<A, S>> {
        let i = self.states.require(s)?;
        Ok(self.body[i].clone().map_right(|t| self.states.elements()[t].clone()))
    }
}

/// A uniform-iteration algebra: a carrier with an iteration operator on
/// finite loop bodies.
pub trait IterAlgebra: Send + Sync {
    type Carrier: Clone + Debug + Send + Sync;

    /// `f^†(start)` for a body given as an index table.
    fn iterate_table(&self, table: &[Either<Self::Carrier, usize>], start: usize) -> Self::Carrier;

    /// Carrier elements used to build exhaustive law instances, in a fixed
    /// order. Suites take prefixes of this list.
    fn sample(&self) -> Vec<Self::Carrier>;

    /// Equality used by the law checkers.
    fn agree(&self, a: &Self::Carrier, b: &Self::Carrier) -> bool;

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    /// The divergence constant `⊥ = inr^†`.
    fn bottom(&self) -> Self::Carrier {
        self.iterate_table(&[Right(0)], 0)
    }
}

/// `f^†(s0)` for a loop body over the algebra's carrier.
pub fn iterate<Alg, S>(alg: &Alg, lp: &LoopBody<Alg::Carrier, S>, s0: &S) -> Result<Alg::Carrier>
where
    Alg: IterAlgebra,
    S: Eq + Hash + Clone + Debug,
{
    let start = lp.states().require(s0)?;
    Ok(alg.iterate_table(lp.table(), start))
}

/// The maybe backend: carrier `Partial<X>`, iteration by cycle detection.
#[derive(Debug, Clone)]
pub struct PartialAlgebra<X> {
    values: Vec<X>,
}

impl<X> PartialAlgebra<X> {
    /// The algebra `K X`; `values` lists `X` for sampling.
    pub fn new(values: Vec<X>) -> Self {
        PartialAlgebra { values }
    }
}

impl PartialAlgebra<usize> {
    pub fn range(n: usize) -> Self {
        PartialAlgebra::new((0..n).collect())
    }
}

impl<X: Clone + Debug + PartialEq + Send + Sync> IterAlgebra for PartialAlgebra<X> {
    type Carrier = Partial<X>;

    fn iterate_table(&self, table: &[Either<Partial<X>, usize>], start: usize) -> Partial<X> {
        partial::iterate_partial_indexed(table, start)
    }

    fn sample(&self) -> Vec<Partial<X>> {
        std::iter::once(Partial::Bottom)
            .chain(self.values.iter().cloned().map(Partial::Value))
            .collect()
    }

    fn agree(&self, a: &Partial<X>, b: &Partial<X>) -> bool {
        a == b
    }
}

/// `A × B` with `h^† = ⟨((fst+id) h)^†, ((snd+id) h)^†⟩`.
#[derive(Debug, Clone)]
pub struct ProductAlgebra<A, B> {
    pub left: A,
    pub right: B,
}

pub fn product_algebra<A: IterAlgebra, B: IterAlgebra>(left: A, right: B) -> ProductAlgebra<A, B> {
    ProductAlgebra { left, right }
}

impl<A: IterAlgebra, B: IterAlgebra> IterAlgebra for ProductAlgebra<A, B> {
    type Carrier = (A::Carrier, B::Carrier);

    fn iterate_table(&self, table: &[Either<Self::Carrier, usize>], start: usize) -> Self::Carrier {
        let fst: Vec<_> = table.iter().map(|e| e.as_ref().map_left(|(a, _)| a.clone()).map_right(|t| *t)).collect();
        let snd: Vec<_> = table.iter().map(|e| e.as_ref().map_left(|(_, b)| b.clone()).map_right(|t| *t)).collect();
        (self.left.iterate_table(&fst, start), self.right.iterate_table(&snd, start))
    }

    fn sample(&self) -> Vec<Self::Carrier> {
        let bs = self.right.sample();
        self.left
            .sample()
            .into_iter()
            .flat_map(|a| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    fn agree(&self, a: &Self::Carrier, b: &Self::Carrier) -> bool {
        self.left.agree(&a.0, &b.0) && self.right.agree(&a.1, &b.1)
    }

    fn exactness(&self) -> Exactness {
        worst(self.left.exactness(), self.right.exactness())
    }
}

fn worst(a: Exactness, b: Exactness) -> Exactness {
    if a == Exactness::Bounded || b == Exactness::Bounded {
        Exactness::Bounded
    } else {
        Exactness::Exact
    }
}

/// `A^X` for a finite exponent, carrier tables `X → A`, with
/// `h^† = curry(((ev + id) ∘ dstl ∘ (h × id))^†)`.
#[derive(Debug, Clone)]
pub struct ExponentialAlgebra<A> {
    pub base: A,
    pub exponent: usize,
}

pub fn exponential_algebra<A: IterAlgebra>(base: A, exponent: usize) -> ExponentialAlgebra<A> {
    ExponentialAlgebra { base, exponent }
}

impl<A: IterAlgebra> IterAlgebra for ExponentialAlgebra<A> {
    type Carrier = Vec<A::Carrier>;

    fn iterate_table(&self, table: &[Either<Vec<A::Carrier>, usize>], start: usize) -> Vec<A::Carrier> {
        let nx = self.exponent;
        // State space S × X, row-major: (s, x) ↦ s * nx + x.
        let uncurried: Vec<_> = (0..table.len() * nx)
            .map(|i| {
                let (s, x) = (i / nx, i % nx);
                match crate::finset::dstl((table[s].clone(), x)) {
                    Left((tab, x)) => Left(tab[x].clone()),
                    Right((t, x)) => Right(t * nx + x),
                }
            })
            .collect();
        (0..nx).map(|x| self.base.iterate_table(&uncurried, start * nx + x)).collect()
    }

    fn sample(&self) -> Vec<Vec<A::Carrier>> {
        let base = self.base.sample();
        match FunSpace::new(self.exponent, base.len()) {
            Ok(space) => space.iter().map(|d| d.into_iter().map(|i| base[i].clone()).collect()).collect(),
            Err(_) => Vec::new(),
        }
    }

    fn agree(&self, a: &Vec<A::Carrier>, b: &Vec<A::Carrier>) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.base.agree(x, y))
    }

    fn exactness(&self) -> Exactness {
        self.base.exactness()
    }
}

/// The free delay algebra `(D X, μ)`: `f^† = μ ∘ coit f`. Its laws hold only
/// up to weak bisimilarity, checked with fuel.
#[derive(Debug, Clone)]
pub struct DelayAlgebra {
    pub values: usize,
    pub fuel: u64,
}

impl IterAlgebra for DelayAlgebra {
    type Carrier = Delay<usize>;

    fn iterate_table(&self, table: &[Either<Delay<usize>, usize>], start: usize) -> Delay<usize> {
        delay::flatten(&Machine::from_table(table.to_vec(), start).to_delay())
    }

    fn sample(&self) -> Vec<Delay<usize>> {
        let mut out = vec![delay::never()];
        for v in 0..self.values {
            out.push(delay::now(v));
            out.push(delay::iota(v, 2));
        }
        out
    }

    fn agree(&self, a: &Delay<usize>, b: &Delay<usize>) -> bool {
        delay::bisim_weak_fuel(a, b, self.fuel).not_refuted()
    }

    fn exactness(&self) -> Exactness {
        Exactness::Bounded
    }
}

/// A `D`-algebra `a : D A → A`, presented on finite table machines.
pub trait SearchAlgebra: Send + Sync {
    type Carrier: Clone + Debug + PartialEq + Send + Sync;

    /// `a(m)` for the machine `table` started at `seed`.
    fn apply(&self, table: &[Either<Self::Carrier, usize>], seed: usize) -> Self::Carrier;
}

/// Exact collapse followed by multiplication: the search algebra
/// `D(K X) → K X` of the maybe backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct CollapseAlgebra<X>(std::marker::PhantomData<fn() -> X>);

impl<X> CollapseAlgebra<X> {
    pub fn new() -> Self {
        CollapseAlgebra(std::marker::PhantomData)
    }
}

impl<X: Payload + Debug + PartialEq> SearchAlgebra for CollapseAlgebra<X> {
    type Carrier = Partial<X>;

    fn apply(&self, table: &[Either<Partial<X>, usize>], seed: usize) -> Partial<X> {
        let rep = partial::table_rep(table.to_vec(), seed);
        partial::collapse_finite(&rep).expect("table machines certify themselves").mu()
    }
}

/// Machines used to probe the search-algebra equations: every table with at
/// most two states over the given carrier elements, from every seed.
fn probe_machines<C: Clone>(values: &[C]) -> Vec<(Vec<Either<C, usize>>, usize)> {
    let mut out = Vec::new();
    for ns in 1..=2 {
        let Ok(space) = FunSpace::new(ns, values.len() + ns) else { continue };
        for digits in space.iter() {
            let table: Vec<_> = digits
                .into_iter()
                .map(|d| if d < values.len() { Left(values[d].clone()) } else { Right(d - values.len()) })
                .collect();
            for seed in 0..ns {
                out.push((table.clone(), seed));
            }
        }
    }
    out
}

/// `later` on a table machine: a fresh state 0 stepping to the old seed.
pub fn later_table<C: Clone>(table: &[Either<C, usize>], seed: usize) -> (Vec<Either<C, usize>>, usize) {
    let mut out = vec![Right(seed + 1)];
    out.extend(table.iter().map(|e| e.clone().map_right(|t| t + 1)));
    (out, 0)
}

/// The uniform-iteration algebra of a search algebra: `f^† = a ∘ coit f`.
#[derive(Debug, Clone)]
pub struct SearchIter<Alg: SearchAlgebra> {
    alg: Alg,
    sample: Vec<Alg::Carrier>,
}

/// Check `a ∘ now = id` and `a ∘ later = a` on every probe machine built from
/// `sample`, then return the induced iteration.
pub fn search_algebra_to_iter<Alg: SearchAlgebra>(alg: Alg, sample: Vec<Alg::Carrier>) -> Result<SearchIter<Alg>> {
    for x in &sample {
        let got = alg.apply(&[Left(x.clone())], 0);
        if &got != x {
            return Err(Error::NotSearchAlgebra(format!("a(now {x:?}) = {got:?}")));
        }
    }
    for (table, seed) in probe_machines(&sample) {
        let (lt, ls) = later_table(&table, seed);
        let (a, b) = (alg.apply(&table, seed), alg.apply(&lt, ls));
        if a != b {
            return Err(Error::NotSearchAlgebra(format!(
                "a(later m) = {b:?} but a(m) = {a:?} for m = {table:?} from {seed}"
            )));
        }
    }
    Ok(SearchIter { alg, sample })
}

impl<Alg: SearchAlgebra> IterAlgebra for SearchIter<Alg> {
    type Carrier = Alg::Carrier;

    fn iterate_table(&self, table: &[Either<Alg::Carrier, usize>], start: usize) -> Alg::Carrier {
        self.alg.apply(table, start)
    }

    fn sample(&self) -> Vec<Alg::Carrier> {
        self.sample.clone()
    }

    fn agree(&self, a: &Alg::Carrier, b: &Alg::Carrier) -> bool {
        a == b
    }
}

/// The search algebra `out^†` of a uniform-iteration algebra.
#[derive(Debug, Clone)]
pub struct IterSearch<A>(pub A);

pub fn iter_to_search_algebra<A: IterAlgebra>(alg: A) -> IterSearch<A> {
    IterSearch(alg)
}

impl<A> SearchAlgebra for IterSearch<A>
where
    A: IterAlgebra,
    A::Carrier: PartialEq,
{
    type Carrier = A::Carrier;

    fn apply(&self, table: &[Either<A::Carrier, usize>], seed: usize) -> A::Carrier {
        // A table machine is its own `out` on the state space.
        self.0.iterate_table(table, seed)
    }
}

/// Bounds for the exhaustive Elgot-algebra suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawSizes {
    pub max_states: usize,
    pub max_carrier: usize,
}

impl Default for LawSizes {
    fn default() -> Self {
        LawSizes {
            max_states: 3,
            max_carrier: 2,
        }
    }
}

/// A body over sample indices: `Left(i)` exits with `sample[i]`.
type Digits = Vec<Either<usize, usize>>;

fn all_bodies(ns: usize, k: usize) -> Result<Vec<Digits>> {
    let space = FunSpace::new(ns, k + ns)?;
    Ok(space
        .iter()
        .map(|d| d.into_iter().map(|x| if x < k { Left(x) } else { Right(x - k) }).collect())
        .collect())
}

fn all_maps(n: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    Ok(FunSpace::new(n, m)?.iter().collect())
}

fn realize<C: Clone>(sample: &[C], body: &[Either<usize, usize>]) -> Vec<Either<C, usize>> {
    body.iter().map(|e| e.map_left(|i| sample[i].clone())).collect()
}

/// Exhaustive Fixpoint, Uniformity, Folding and Compositionality over all
/// bodies with at most `sizes.max_states` states and exits drawn from the
/// first `sizes.max_carrier` sample elements.
pub fn check_elgot_laws<Alg: IterAlgebra>(alg: &Alg, sizes: LawSizes, exec: Exec) -> LawReport {
    let mut report = LawReport::new("elgot-algebra");
    if alg.exactness() == Exactness::Bounded {
        report.mark_bounded();
    }
    let full = alg.sample();
    for k in 1..=sizes.max_carrier.min(full.len()) {
        let sample = &full[..k];
        let mut bodies = Vec::new();
        for ns in 1..=sizes.max_states {
            match all_bodies(ns, k) {
                Ok(b) => bodies.push(b),
                Err(e) => {
                    report.skip(format!("bodies |S|={ns} |A|={k}: {e}"));
                    bodies.push(Vec::new());
                }
            }
        }
        for (i, fs) in bodies.iter().enumerate() {
            let ns = i + 1;
            check_fixpoint(alg, sample, fs, &mut report, exec);
            for (j, gs) in bodies.iter().enumerate() {
                let ng = j + 1;
                match all_maps(ns, ng) {
                    Ok(hs) => check_uniformity(alg, sample, fs, gs, &hs, &mut report, exec),
                    Err(e) => report.skip(format!("uniformity h: {ns}→{ng}: {e}")),
                }
                // Folding and Compositionality: f over X (ns states), h : Y → X + Y (ng states).
                match all_maps(ng, ns + ng) {
                    Ok(hs) => check_folding(alg, sample, fs, ns, &hs, &mut report, exec),
                    Err(e) => report.skip(format!("folding h: {ng}→{ns}+{ng}: {e}")),
                }
            }
        }
    }
    report.finish()
}

fn check_fixpoint<Alg: IterAlgebra>(alg: &Alg, sample: &[Alg::Carrier], fs: &[Digits], report: &mut LawReport, exec: Exec) {
    let checked = fs.iter().map(|f| f.len() as u64).sum();
    let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
        let f = &fs[i as usize];
        let table = realize(sample, f);
        let dag: Vec<_> = (0..f.len()).map(|s| alg.iterate_table(&table, s)).collect();
        (0..f.len())
            .filter_map(|s| {
                let rhs = match f[s] {
                    Left(a) => sample[a].clone(),
                    Right(t) => dag[t].clone(),
                };
                (!alg.agree(&dag[s], &rhs)).then(|| Failure::new("fixpoint", format!("f={f:?} s={s}"), &dag[s], &rhs))
            })
            .collect()
    });
    report.record(checked, failures);
}

#[allow(clippy::too_many_arguments)]
fn check_uniformity<Alg: IterAlgebra>(
    alg: &Alg,
    sample: &[Alg::Carrier],
    fs: &[Digits],
    gs: &[Digits],
    hs: &[Vec<usize>],
    report: &mut LawReport,
    exec: Exec,
) {
    // Group g by table so each g^† is computed once per g.
    let g_dags: Vec<Vec<Alg::Carrier>> = gs
        .iter()
        .map(|g| {
            let t = realize(sample, g);
            (0..g.len()).map(|s| alg.iterate_table(&t, s)).collect()
        })
        .collect();
    let results = par::map_range(exec, 0..fs.len() as u64, |i| {
        let f = &fs[i as usize];
        let table = realize(sample, f);
        let f_dag: Vec<_> = (0..f.len()).map(|s| alg.iterate_table(&table, s)).collect();
        let mut checked = 0u64;
        let mut failures = Vec::new();
        for h in hs {
            for (g, g_dag) in gs.iter().zip(&g_dags) {
                // Premise: (id + h) ∘ f = g ∘ h.
                let premise = (0..f.len()).all(|s| match (f[s], g[h[s]]) {
                    (Left(a), Left(b)) => a == b,
                    (Right(t), Right(u)) => h[t] == u,
                    _ => false,
                });
                if !premise {
                    continue;
                }
                checked += 1;
                for s in 0..f.len() {
                    if !alg.agree(&f_dag[s], &g_dag[h[s]]) {
                        failures.push(Failure::new(
                            "uniformity",
                            format!("f={f:?} g={g:?} h={h:?} s={s}"),
                            &f_dag[s],
                            &g_dag[h[s]],
                        ));
                    }
                }
            }
        }
        (checked, failures)
    });
    for (checked, failures) in results {
        report.record(checked, failures);
    }
}

fn check_folding<Alg: IterAlgebra>(
    alg: &Alg,
    sample: &[Alg::Carrier],
    fs: &[Digits],
    nx: usize,
    hs: &[Vec<usize>],
    report: &mut LawReport,
    exec: Exec,
) {
    // States of X + Y: x ↦ x, y ↦ nx + y. A digit d of h is inl d if d < nx.
    let results = par::map_range(exec, 0..fs.len() as u64, |i| {
        let f = &fs[i as usize];
        let ftab = realize(sample, f);
        let f_dag: Vec<_> = (0..nx).map(|s| alg.iterate_table(&ftab, s)).collect();
        let f_shift: Vec<Either<Alg::Carrier, usize>> = ftab.clone();
        let mut failures = Vec::new();
        for h in hs {
            let ny = h.len();
            let h_sum = |y: usize| h[y];
            // (f^† + h)^† and [(id+inl) f, inr h]^† on X + Y.
            let lhs_table: Vec<_> = (0..nx)
                .map(|x| Left(f_dag[x].clone()))
                .chain((0..ny).map(|y| Right(h_sum(y))))
                .collect();
            let rhs_table: Vec<_> = f_shift.iter().cloned().chain((0..ny).map(|y| Right(h_sum(y)))).collect();
            for s in 0..nx + ny {
                let (l, r) = (alg.iterate_table(&lhs_table, s), alg.iterate_table(&rhs_table, s));
                if !alg.agree(&l, &r) {
                    failures.push(Failure::new("folding", format!("f={f:?} h={h:?} s={s}"), &l, &r));
                }
            }
            // ((f^† + id) h)^† on Y against ([(id+inl) f, inr inr] [inl, h])^† inr.
            let lhs_table: Vec<_> = (0..ny)
                .map(|y| if h[y] < nx { Left(f_dag[h[y]].clone()) } else { Right(h[y] - nx) })
                .collect();
            let rhs_table: Vec<_> = (0..nx)
                .map(|x| ftab[x].clone())
                .chain((0..ny).map(|y| if h[y] < nx { ftab[h[y]].clone() } else { Right(h[y]) }))
                .collect();
            for y in 0..ny {
                let (l, r) = (alg.iterate_table(&lhs_table, y), alg.iterate_table(&rhs_table, nx + y));
                if !alg.agree(&l, &r) {
                    failures.push(Failure::new("compositionality", format!("f={f:?} h={h:?} y={y}"), &l, &r));
                }
            }
        }
        ((nx + hs.first().map_or(0, Vec::len)) as u64 * hs.len() as u64 * 2, failures)
    });
    for (checked, failures) in results {
        report.record(checked, failures);
    }
}

/// Derived-algebra coherence on the maybe backend: product projections and
/// exponential evaluation agree with component iteration, `⊥` is preserved
/// by projections and Kleisli lifts, the loop-splitting equation for
/// products holds, and the search-algebra correspondence round-trips.
pub fn check_derived_algebras(sizes: LawSizes, exec: Exec) -> LawReport {
    let mut report = LawReport::new("elgot-algebra");
    let a = PartialAlgebra::range(sizes.max_carrier.saturating_sub(1).max(1));
    let b = PartialAlgebra::range(1);
    let prod = product_algebra(a.clone(), b.clone());
    let ps = prod.sample();

    let bot = prod.bottom();
    report.check(bot.0 == a.bottom() && bot.1 == b.bottom(), || {
        Failure::new("bottom-projection", "product", &bot, (a.bottom(), b.bottom()))
    });

    for ns in 1..=sizes.max_states {
        let Ok(bodies) = all_bodies(ns, ps.len()) else {
            report.skip(format!("product bodies |S|={ns}"));
            continue;
        };
        let failures = par::flat_map_range(exec, 0..bodies.len() as u64, |i| {
            let f = &bodies[i as usize];
            let t = realize(&ps, f);
            let fst: Vec<_> = t.iter().map(|e| e.clone().map_left(|p| p.0)).collect();
            let snd: Vec<_> = t.iter().map(|e| e.clone().map_left(|p| p.1)).collect();
            (0..ns)
                .filter_map(|s| {
                    let got = prod.iterate_table(&t, s);
                    let want = (a.iterate_table(&fst, s), b.iterate_table(&snd, s));
                    (got != want).then(|| Failure::new("product-projection", format!("f={f:?} s={s}"), &got, &want))
                })
                .collect()
        });
        report.record(bodies.len() as u64 * ns as u64, failures);
    }

    // Exponential: pointwise iteration of the instantiated body.
    let expo = exponential_algebra(a.clone(), 2);
    let es = expo.sample();
    for ns in 1..=sizes.max_states.min(2) {
        let Ok(bodies) = all_bodies(ns, es.len()) else {
            report.skip(format!("exponential bodies |S|={ns}"));
            continue;
        };
        for f in &bodies {
            let t = realize(&es, f);
            for s in 0..ns {
                let got = expo.iterate_table(&t, s);
                let want: Vec<_> = (0..2)
                    .map(|x| {
                        let inst: Vec<_> = t.iter().map(|e| e.clone().map_left(|tab| tab[x])).collect();
                        a.iterate_table(&inst, s)
                    })
                    .collect();
                report.check(got == want, || Failure::new("exponential-pointwise", format!("f={f:?} s={s}"), &got, &want));
            }
        }
    }
    let ebot = expo.bottom();
    report.check(ebot.iter().all(|c| *c == a.bottom()), || Failure::new("bottom-exponential", "A^2", &ebot, "⊥ everywhere"));

    // Kleisli lifts h* : K X → K Y preserve ⊥.
    if let Ok(hs) = partial::all_kleisli(2, 2) {
        for h in &hs {
            let lifted = Partial::<usize>::Bottom.bind(|x| h.table()[x]);
            report.check(lifted == Partial::Bottom, || Failure::new("bottom-kleisli", format!("h={h:?}"), lifted, Partial::<usize>::Bottom));
        }
    }

    report.merge(check_loop_splitting(sizes.max_states.min(2), exec));
    report.merge(check_search_correspondence(sizes, exec));
    report.finish()
}

/// `((h+id) f)^† = ((h+id) dstr (id × (snd+id) f))^† ⟨((fst+id) f)^†, id⟩`
/// for `f : Z → A×B + Z` and every `h : A×B → C` on maybe carriers.
pub fn check_loop_splitting(max_states: usize, exec: Exec) -> LawReport {
    let mut report = LawReport::new("elgot-algebra");
    let (a, b, c) = (PartialAlgebra::range(1), PartialAlgebra::range(1), PartialAlgebra::range(1));
    let (sa, sc) = (a.sample(), c.sample());
    let sab = product_algebra(a.clone(), b.clone()).sample();
    let a_set = FinSet::new(sa.clone()).expect("sample is duplicate-free");
    let Ok(hs) = all_maps(sab.len(), sc.len()) else {
        report.skip("loop-splitting h");
        return report;
    };
    for nz in 1..=max_states {
        let Ok(fs) = all_bodies(nz, sab.len()) else {
            report.skip(format!("loop-splitting |Z|={nz}"));
            continue;
        };
        let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
            let f = &fs[i as usize];
            let ft = realize(&sab, f);
            let fst: Vec<_> = ft.iter().map(|e| e.clone().map_left(|p| p.0)).collect();
            let first: Vec<_> = (0..nz).map(|z| a.iterate_table(&fst, z)).collect();
            let mut out = Vec::new();
            for h in &hs {
                let hc = |i: usize| sc[h[i]];
                let lhs_t: Vec<_> = f.iter().map(|e| e.map_left(hc)).collect();
                // State (a, z) ↦ ai * nz + z over A × Z.
                let rhs_t: Vec<_> = (0..sa.len() * nz)
                    .map(|st| {
                        let (ai, z) = (st / nz, st % nz);
                        match f[z] {
                            Left(p) => {
                                let b_val = sab[p].1;
                                let pair_idx = sab.iter().position(|q| *q == (sa[ai], b_val)).expect("product sample is complete");
                                Left(hc(pair_idx))
                            }
                            Right(t) => Right(ai * nz + t),
                        }
                    })
                    .collect();
                for z in 0..nz {
                    let l = c.iterate_table(&lhs_t, z);
                    let ai = a_set.index_of(&first[z]).expect("iterate lands in the sample");
                    let r = c.iterate_table(&rhs_t, ai * nz + z);
                    if l != r {
                        out.push(Failure::new("loop-splitting", format!("f={f:?} h={h:?} z={z}"), l, r));
                    }
                }
            }
            out
        });
        report.record(fs.len() as u64 * hs.len() as u64 * nz as u64, failures);
    }
    report
}

/// The search-algebra correspondence on the maybe backend: iteration from
/// exact collapse equals cycle detection on all bodies, and both round trips
/// are identities.
pub fn check_search_correspondence(sizes: LawSizes, exec: Exec) -> LawReport {
    let mut report = LawReport::new("elgot-algebra");
    let alg = PartialAlgebra::range(1);
    let sample = alg.sample();
    let from_search = match search_algebra_to_iter(CollapseAlgebra::<usize>::new(), sample.clone()) {
        Ok(it) => it,
        Err(e) => {
            report.check(false, || Failure::new("search-algebra", "exact collapse", e.to_string(), "a search algebra"));
            return report;
        }
    };
    let back = iter_to_search_algebra(alg.clone());
    let collapse = CollapseAlgebra::<usize>::new();
    for ns in 1..=sizes.max_states.max(1) + 1 {
        let Ok(bodies) = all_bodies(ns, sample.len()) else {
            report.skip(format!("search bodies |S|={ns}"));
            continue;
        };
        let failures = par::flat_map_range(exec, 0..bodies.len() as u64, |i| {
            let f = &bodies[i as usize];
            let t = realize(&sample, f);
            let mut out = Vec::new();
            for s in 0..ns {
                let direct = alg.iterate_table(&t, s);
                if ns <= sizes.max_states {
                    let via = from_search.iterate_table(&t, s);
                    if via != direct {
                        out.push(Failure::new("search-to-iter", format!("f={f:?} s={s}"), via, direct));
                    }
                    let again = search_algebra_to_iter_unchecked(&back, &sample).iterate_table(&t, s);
                    if again != direct {
                        out.push(Failure::new("iter-round-trip", format!("f={f:?} s={s}"), again, direct));
                    }
                }
                // a ↦ iter ↦ a' on machines with up to max_states + 1 states.
                let a1 = collapse.apply(&t, s);
                let a2 = iter_to_search_algebra(from_search.clone()).apply(&t, s);
                if a1 != a2 {
                    out.push(Failure::new("search-round-trip", format!("m={f:?} s={s}"), a1, a2));
                }
            }
            out
        });
        report.record(bodies.len() as u64 * ns as u64, failures);
    }
    report
}

fn search_algebra_to_iter_unchecked<Alg: SearchAlgebra + Clone>(alg: &Alg, sample: &[Alg::Carrier]) -> SearchIter<Alg> {
    SearchIter {
        alg: alg.clone(),
        sample: sample.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Partial::{Bottom, Value};

    struct AlwaysBottom;

    impl IterAlgebra for AlwaysBottom {
        type Carrier = Partial<usize>;
        fn iterate_table(&self, _: &[Either<Partial<usize>, usize>], _: usize) -> Partial<usize> {
            Bottom
        }
        fn sample(&self) -> Vec<Partial<usize>> {
            vec![Bottom, Value(0)]
        }
        fn agree(&self, a: &Partial<usize>, b: &Partial<usize>) -> bool {
            a == b
        }
    }

    fn lp<A: Clone>(table: Vec<Either<A, usize>>) -> LoopBody<A> {
        let n = table.len();
        LoopBody::from_table(FinSet::range(n), table).unwrap()
    }

    #[test]
    fn iterate_examples() {
        let alg = PartialAlgebra::new(vec!["a"]);
        let exits = lp(vec![Left(Value("a")), Left(Value("a"))]);
        assert_eq!(iterate(&alg, &exits, &1).unwrap(), Value("a"));
        let cyc = lp::<Partial<&str>>(vec![Right(1), Right(2), Right(0)]);
        assert!((0..3).all(|s| iterate(&alg, &cyc, &s).unwrap() == Bottom));
        let two = lp(vec![Right(1), Left(Value("a"))]);
        assert_eq!(iterate(&alg, &two, &0).unwrap(), Value("a"));
        assert!(matches!(iterate(&alg, &two, &5), Err(Error::UnknownState(_))));
    }

    #[test]
    fn loop_body_validation() {
        let r = LoopBody::<u8, char>::from_fn(FinSet::new(['a']).unwrap(), |_| Right('z'));
        assert!(matches!(r, Err(Error::UnknownState(_))));
        let r = LoopBody::<u8>::from_table(FinSet::range(1), vec![Right(1)]);
        assert!(matches!(r, Err(Error::UnknownState(_))));
        let ok = LoopBody::<u8, char>::from_fn(FinSet::new(['a', 'b']).unwrap(), |c| if *c == 'a' { Right('b') } else { Left(1) }).unwrap();
        assert_eq!(ok.apply(&'a').unwrap(), Right('b'));
    }

    #[test]
    fn product_examples() {
        let prod = product_algebra(PartialAlgebra::range(2), PartialAlgebra::range(2));
        assert_eq!(prod.iterate_table(&[Left((Value(0), Value(1)))], 0), (Value(0), Value(1)));
        // Left component cycles, right exits: only a body whose components
        // differ in control flow can do that, which a single table cannot;
        // the componentwise formula still gives ⊥ on the left when the exit
        // value itself is ⊥ there.
        let t = vec![Right(1), Left((Bottom, Value(1)))];
        assert_eq!(prod.iterate_table(&t, 0), (Bottom, Value(1)));
        assert_eq!(prod.bottom(), (Bottom, Bottom));
    }

    #[test]
    fn exponential_examples() {
        let base = PartialAlgebra::range(2);
        let one = exponential_algebra(base.clone(), 1);
        let t = vec![Right(1), Left(vec![Value(1)])];
        assert_eq!(one.iterate_table(&t, 0), vec![base.iterate_table(&[Right(1), Left(Value(1))], 0)]);
        let two = exponential_algebra(base, 2);
        let constant = vec![Left(vec![Value(0), Value(0)])];
        assert_eq!(two.iterate_table(&constant, 0), vec![Value(0), Value(0)]);
        let t = vec![Right(1), Left(vec![Value(1), Bottom])];
        assert_eq!(two.iterate_table(&t, 0), vec![Value(1), Bottom]);
    }

    #[test]
    fn maybe_backend_small_suite_passes() {
        let sizes = LawSizes { max_states: 2, max_carrier: 2 };
        let r = check_elgot_laws(&PartialAlgebra::range(1), sizes, Exec::Sequential);
        assert!(r.passed(), "{:#?}", r.failures);
        assert!(r.instances > 0);
    }

    #[test]
    fn always_bottom_fails_fixpoint() {
        let sizes = LawSizes { max_states: 1, max_carrier: 2 };
        let r = check_elgot_laws(&AlwaysBottom, sizes, Exec::Sequential);
        assert!(r.failures_of("fixpoint").next().is_some());
    }

    #[test]
    fn derived_algebras_pass() {
        let r = check_derived_algebras(LawSizes { max_states: 2, max_carrier: 2 }, Exec::Sequential);
        assert!(r.passed(), "{:#?}", r.failures);
    }

    #[test]
    fn delay_algebra_small_suite() {
        let alg = DelayAlgebra { values: 1, fuel: 30 };
        let r = check_elgot_laws(&alg, LawSizes { max_states: 2, max_carrier: 2 }, Exec::Sequential);
        assert!(r.passed(), "{:#?}", r.failures);
        assert_eq!(r.exactness, Exactness::Bounded);
    }

    #[derive(Clone)]
    struct Constant;

    impl SearchAlgebra for Constant {
        type Carrier = Partial<usize>;
        fn apply(&self, _: &[Either<Partial<usize>, usize>], _: usize) -> Partial<usize> {
            Value(0)
        }
    }

    #[derive(Clone)]
    struct StepCounting;

    impl SearchAlgebra for StepCounting {
        type Carrier = Partial<usize>;
        fn apply(&self, table: &[Either<Partial<usize>, usize>], seed: usize) -> Partial<usize> {
            match &table[seed] {
                Left(x) => *x,
                Right(_) => Value(table.len()),
            }
        }
    }

    #[test]
    fn non_search_algebras_rejected() {
        let sample = vec![Bottom, Value(0), Value(1)];
        assert!(matches!(search_algebra_to_iter(Constant, sample.clone()), Err(Error::NotSearchAlgebra(_))));
        assert!(matches!(search_algebra_to_iter(StepCounting, sample), Err(Error::NotSearchAlgebra(_))));
    }

    #[test]
    fn later_table_shifts() {
        let (t, s) = later_table(&[Left(5u8)], 0);
        assert_eq!(t, vec![Right(1), Left(5)]);
        assert_eq!(s, 0);
    }
}
