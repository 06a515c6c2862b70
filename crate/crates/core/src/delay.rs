//! The delay monad as explicit step machines.
//!
//! A [`Delay`] is an immutable machine state together with a pure step
//! function producing either a final value or the next state. Nothing is
//! evaluated until [`Delay::out`] is called, and every observation is
//! bounded by fuel, so no operation here can hang.

use std::fmt;
use std::sync::Arc;

use either::Either::{self, Left, Right};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::finset::dstr;
use crate::par::{self, Exec};
use crate::report::{Failure, LawReport};

/// Fuel used when a caller does not supply one.
pub const DEFAULT_FUEL: u64 = 1000;

/// Bound satisfied by every payload of a machine.
pub trait Payload: Clone + Send + Sync + 'static {}
impl<T: Clone + Send + Sync + 'static> Payload for T {}

trait Node<X>: Send + Sync {
    fn out(&self) -> Either<X, Delay<X>>;
}

/// A possibly non-terminating computation producing an `X`.
pub struct Delay<X> {
    node: Arc<dyn Node<X>>,
}

impl<X> Clone for Delay<X> {
    fn clone(&self) -> Self {
        Delay {
            node: Arc::clone(&self.node),
        }
    }
}

impl<X> fmt::Debug for Delay<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Delay(..)")
    }
}

/// Fuel-bounded view of a machine.
#[derive(Debug, Clone)]
pub enum Observation<X> {
    Converged { value: X, steps: u64 },
    StillRunning(Delay<X>),
}

impl<X> Observation<X> {
    pub fn converged(&self) -> Option<(&X, u64)> {
        match self {
            Observation::Converged { value, steps } => Some((value, *steps)),
            Observation::StillRunning(_) => None,
        }
    }

    pub fn is_running(&self) -> bool {
        matches!(self, Observation::StillRunning(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ThreeValued {
    True,
    False,
    Unknown,
}

impl ThreeValued {
    /// True unless a mismatch was witnessed.
    pub fn not_refuted(self) -> bool {
        self != ThreeValued::False
    }
}

struct Now<X>(X);

impl<X: Payload> Node<X> for Now<X> {
    fn out(&self) -> Either<X, Delay<X>> {
        Left(self.0.clone())
    }
}

struct Later<X>(Delay<X>);

impl<X: Payload> Node<X> for Later<X> {
    fn out(&self) -> Either<X, Delay<X>> {
        Right(self.0.clone())
    }
}

type StepFn<S, X> = Arc<dyn Fn(&S) -> Either<X, S> + Send + Sync>;

struct Coit<S, X> {
    state: S,
    step: StepFn<S, X>,
}

impl<S: Payload, X: Payload> Node<X> for Coit<S, X> {
    fn out(&self) -> Either<X, Delay<X>> {
        match (self.step)(&self.state) {
            Left(x) => Left(x),
            Right(next) => Right(Delay::from_node(Coit {
                state: next,
                step: Arc::clone(&self.step),
            })),
        }
    }
}

type KleisliFn<X, Y> = Arc<dyn Fn(X) -> Delay<Y> + Send + Sync>;

struct Bind<X, Y> {
    inner: Delay<X>,
    f: KleisliFn<X, Y>,
}

impl<X: Payload, Y: Payload> Node<Y> for Bind<X, Y> {
    // out ∘ f* = [out ∘ f, inr ∘ f*] ∘ out
    fn out(&self) -> Either<Y, Delay<Y>> {
        match self.inner.out() {
            Left(x) => (self.f)(x).out(),
            Right(rest) => Right(Delay::from_node(Bind {
                inner: rest,
                f: Arc::clone(&self.f),
            })),
        }
    }
}

struct Strength<W, X> {
    context: W,
    inner: Delay<X>,
}

impl<W: Payload, X: Payload> Node<(W, X)> for Strength<W, X> {
    // out ∘ τ = (id + τ) ∘ dstr ∘ (id × out)
    fn out(&self) -> Either<(W, X), Delay<(W, X)>> {
        match dstr((self.context.clone(), self.inner.out())) {
            Left(pair) => Left(pair),
            Right((w, rest)) => Right(Delay::from_node(Strength {
                context: w,
                inner: rest,
            })),
        }
    }
}

/// Outcome of [`race`]: the winner's value with the loser's residual.
pub type RaceResult<X, Y> = Either<(X, Delay<Y>), (Delay<X>, Y)>;

struct Race<X, Y> {
    left: Delay<X>,
    right: Delay<Y>,
}

impl<X: Payload, Y: Payload> Node<RaceResult<X, Y>> for Race<X, Y> {
    fn out(&self) -> Either<RaceResult<X, Y>, Delay<RaceResult<X, Y>>> {
        match self.left.out() {
            Left(x) => Left(Left((x, self.right.clone()))),
            Right(left_rest) => match self.right.out() {
                Left(y) => Left(Right((self.left.clone(), y))),
                Right(right_rest) => Right(Delay::from_node(Race {
                    left: left_rest,
                    right: right_rest,
                })),
            },
        }
    }
}

type LoopFn<X, Y> = Arc<dyn Fn(X) -> Delay<Either<Y, X>> + Send + Sync>;

struct GuardedIterate<X, Y> {
    current: Delay<Either<Y, X>>,
    body: LoopFn<X, Y>,
}

impl<X: Payload, Y: Payload> Node<Y> for GuardedIterate<X, Y> {
    fn out(&self) -> Either<Y, Delay<Y>> {
        let next = |current| {
            Right(Delay::from_node(GuardedIterate {
                current,
                body: Arc::clone(&self.body),
            }))
        };
        match self.current.out() {
            Left(Left(y)) => Left(y),
            // Re-entering the loop is free when the body is guarded. An
            // unguarded re-entry is charged one step so that `out` stays total.
            Left(Right(x)) => {
                let again = (self.body)(x);
                match again.out() {
                    Left(Left(y)) => Left(y),
                    Left(Right(x2)) => next((self.body)(x2)),
                    Right(rest) => next(rest),
                }
            }
            Right(rest) => next(rest),
        }
    }
}

impl<X: Payload> Delay<X> {
    fn from_node(node: impl Node<X> + 'static) -> Self {
        Delay {
            node: Arc::new(node),
        }
    }

    /// One step of the final coalgebra structure.
    pub fn out(&self) -> Either<X, Delay<X>> {
        self.node.out()
    }

    /// Advance by one step, or return the value.
    pub fn step(&self) -> Either<X, Delay<X>> {
        self.out()
    }

    pub fn bind<Y: Payload>(&self, f: impl Fn(X) -> Delay<Y> + Send + Sync + 'static) -> Delay<Y> {
        bind(self, f)
    }

    pub fn map<Y: Payload>(&self, g: impl Fn(X) -> Y + Send + Sync + 'static) -> Delay<Y> {
        map(self, g)
    }

    pub fn later(self) -> Delay<X> {
        later(self)
    }

    pub fn run_for(&self, fuel: u64) -> Observation<X> {
        run_for(self, fuel)
    }
}

pub fn now<X: Payload>(x: X) -> Delay<X> {
    Delay::from_node(Now(x))
}

pub fn later<X: Payload>(d: Delay<X>) -> Delay<X> {
    Delay::from_node(Later(d))
}

pub fn out<X: Payload>(d: &Delay<X>) -> Either<X, Delay<X>> {
    d.out()
}

/// The unique coalgebra morphism from `(Y, f)` into the delay coalgebra,
/// evaluated at `y0`.
pub fn coit<X: Payload, Y: Payload>(
    f: impl Fn(&Y) -> Either<X, Y> + Send + Sync + 'static,
    y0: Y,
) -> Delay<X> {
    Delay::from_node(Coit {
        state: y0,
        step: Arc::new(f),
    })
}

/// The machine that never converges.
pub fn never<X: Payload>() -> Delay<X> {
    coit(|_: &()| Right(()), ())
}

/// `later^n(now(x))`, by primitive recursion on `n`.
pub fn iota<X: Payload>(x: X, n: u64) -> Delay<X> {
    coit(
        move |k: &u64| if *k == 0 { Left(x.clone()) } else { Right(*k - 1) },
        n,
    )
}

pub fn bind<X: Payload, Y: Payload>(
    d: &Delay<X>,
    f: impl Fn(X) -> Delay<Y> + Send + Sync + 'static,
) -> Delay<Y> {
    Delay::from_node(Bind {
        inner: d.clone(),
        f: Arc::new(f),
    })
}

pub fn map<X: Payload, Y: Payload>(d: &Delay<X>, g: impl Fn(X) -> Y + Send + Sync + 'static) -> Delay<Y> {
    bind(d, move |x| now(g(x)))
}

/// Multiplication: run the outer machine, then the machine it produced.
pub fn flatten<X: Payload>(dd: &Delay<Delay<X>>) -> Delay<X> {
    bind(dd, |d| d)
}

/// `τ : W × D X → D(W × X)`. Step counts are preserved exactly.
pub fn strength<W: Payload, X: Payload>(w: W, d: &Delay<X>) -> Delay<(W, X)> {
    Delay::from_node(Strength {
        context: w,
        inner: d.clone(),
    })
}

/// `τ̂ : D X × W → D(X × W)`.
pub fn costrength<X: Payload, W: Payload>(d: &Delay<X>, w: W) -> Delay<(X, W)> {
    map(&strength(w, d), |(w, x)| (x, w))
}

/// Run both machines in lockstep until one converges. Simultaneous
/// convergence resolves to the left injection.
pub fn race<X: Payload, Y: Payload>(d1: &Delay<X>, d2: &Delay<Y>) -> Delay<RaceResult<X, Y>> {
    Delay::from_node(Race {
        left: d1.clone(),
        right: d2.clone(),
    })
}

/// Sequenced pairing `τ̂* ∘ τ`: runs `d2`, then `d1`, so step counts add.
pub fn pair_sequential<X: Payload, Y: Payload>(d1: &Delay<X>, d2: &Delay<Y>) -> Delay<(X, Y)> {
    bind(&strength(d1.clone(), d2), |(d1, y)| costrength(&d1, y))
}

/// The other order `τ* ∘ τ̂`: runs `d1`, then `d2`.
pub fn pair_sequential_rev<X: Payload, Y: Payload>(d1: &Delay<X>, d2: &Delay<Y>) -> Delay<(X, Y)> {
    bind(&costrength(d1, d2.clone()), |(x, d2)| strength(x, &d2))
}

/// Iteration of a guarded body `f : X → D(Y + X)`: the unique `g` with
/// `g = [now, g]* ∘ f`. Re-entering the loop costs no step.
pub fn guarded_iterate<X: Payload, Y: Payload>(
    f: impl Fn(X) -> Delay<Either<Y, X>> + Send + Sync + 'static,
    x: X,
) -> Delay<Y> {
    let body: LoopFn<X, Y> = Arc::new(f);
    Delay::from_node(GuardedIterate {
        current: body(x),
        body,
    })
}

/// Retraction of `⟨D fst, D snd⟩ : D(X × Y) → DX × DY`: sequenced pairing
/// (which doubles the step count on a split pair) followed by the guarded
/// loop that halves it again.
pub fn pair_retraction<X: Payload, Y: Payload>(d1: &Delay<X>, d2: &Delay<Y>) -> Delay<(X, Y)> {
    type Z<X, Y> = (X, Y);
    fn halve<X: Payload, Y: Payload>(m: Delay<Z<X, Y>>) -> Delay<Either<Z<X, Y>, Delay<Z<X, Y>>>> {
        // w = [now ∘ inl, later ∘ now ∘ out] ∘ out
        match m.out() {
            Left(z) => now(Left(z)),
            Right(rest) => later(now(match rest.out() {
                Left(z) => Left(z),
                Right(rest2) => Right(rest2),
            })),
        }
    }
    guarded_iterate(halve, pair_sequential(d1, d2))
}

/// Observe at most `fuel` steps.
pub fn run_for<X: Payload>(d: &Delay<X>, fuel: u64) -> Observation<X> {
    let mut current = d.clone();
    let mut k = 0;
    loop {
        match current.out() {
            Left(value) => return Observation::Converged { value, steps: k },
            Right(rest) => {
                if k == fuel {
                    return Observation::StillRunning(current);
                }
                current = rest;
                k += 1;
            }
        }
    }
}

/// Weak (step-insensitive) bisimilarity up to fuel: `True` only when both
/// converge to equal values, `False` when both converge to different ones.
pub fn bisim_weak_fuel<X: Payload + PartialEq>(d1: &Delay<X>, d2: &Delay<X>, fuel: u64) -> ThreeValued {
    match (run_for(d1, fuel).converged(), run_for(d2, fuel).converged()) {
        (Some((a, _)), Some((b, _))) if a == b => ThreeValued::True,
        (Some(_), Some(_)) => ThreeValued::False,
        _ => ThreeValued::Unknown,
    }
}

/// Strong bisimilarity up to depth `fuel`: `False` on any mismatch of value
/// or step count at depth ≤ fuel, `True` when both converge identically,
/// `Unknown` when both are still running at the end.
pub fn bisim_strong_fuel<X: Payload + PartialEq>(d1: &Delay<X>, d2: &Delay<X>, fuel: u64) -> ThreeValued {
    let (mut a, mut b) = (d1.clone(), d2.clone());
    for _ in 0..=fuel {
        match (a.out(), b.out()) {
            (Left(x), Left(y)) => {
                return if x == y {
                    ThreeValued::True
                } else {
                    ThreeValued::False
                }
            }
            (Right(a2), Right(b2)) => {
                a = a2;
                b = b2;
            }
            _ => return ThreeValued::False,
        }
    }
    ThreeValued::Unknown
}

/// A machine with an explicit, inspectable state space: a seed and a pure
/// step function. Unlike [`Delay`], its states can be compared and hashed,
/// which is what exact collapse needs.
pub struct Machine<S, X> {
    seed: S,
    step: StepFn<S, X>,
}

impl<S: Clone, X> Clone for Machine<S, X> {
    fn clone(&self) -> Self {
        Machine {
            seed: self.seed.clone(),
            step: Arc::clone(&self.step),
        }
    }
}

impl<S: fmt::Debug, X> fmt::Debug for Machine<S, X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Machine").field("seed", &self.seed).finish_non_exhaustive()
    }
}

impl<S: Payload, X: Payload> Machine<S, X> {
    pub fn new(seed: S, step: impl Fn(&S) -> Either<X, S> + Send + Sync + 'static) -> Self {
        Machine {
            seed,
            step: Arc::new(step),
        }
    }

    pub fn seed(&self) -> &S {
        &self.seed
    }

    pub fn step(&self, s: &S) -> Either<X, S> {
        (self.step)(s)
    }

    pub fn with_seed(&self, seed: S) -> Self {
        Machine {
            seed,
            step: Arc::clone(&self.step),
        }
    }

    pub fn to_delay(&self) -> Delay<X> {
        Delay::from_node(Coit {
            state: self.seed.clone(),
            step: Arc::clone(&self.step),
        })
    }

    /// One extra step in front: a fresh initial state `None`.
    pub fn later(&self) -> Machine<Option<S>, X> {
        let inner = self.clone();
        Machine::new(None, move |s: &Option<S>| match s {
            None => Right(Some(inner.seed.clone())),
            Some(s) => inner.step(s).map_right(Some),
        })
    }

    /// Kleisli extension on machines. The composite state is either a state
    /// of `self` or a value of `self` paired with a state of its continuation.
    pub fn bind<T: Payload, Y: Payload>(
        &self,
        f: impl Fn(&X) -> Machine<T, Y> + Send + Sync + 'static,
    ) -> Machine<Either<S, (X, T)>, Y> {
        let inner = self.clone();
        Machine::new(Left(self.seed.clone()), move |s: &Either<S, (X, T)>| match s {
            Left(s) => match inner.step(s) {
                Left(x) => {
                    let m = f(&x);
                    m.step(&m.seed).map_right(|t| Right((x, t)))
                }
                Right(s2) => Right(Left(s2)),
            },
            Right((x, t)) => f(x).step(t).map_right(|t2| Right((x.clone(), t2))),
        })
    }
}

impl<X: Payload> Machine<usize, X> {
    /// A machine whose step is a finite table; `Right` entries index the table.
    pub fn from_table(table: Vec<Either<X, usize>>, seed: usize) -> Self {
        assert!(seed < table.len(), "seed outside the table");
        assert!(
            table.iter().all(|e| e.as_ref().right().is_none_or(|&t| t < table.len())),
            "table entry points outside the table"
        );
        let table = Arc::new(table);
        Machine::new(seed, move |s: &usize| table[*s].clone())
    }
}

/// Random finite-table machine with at most `max_states` states and values
/// below `values`. Roughly one state in three exits.
pub fn random_table<R: Rng>(rng: &mut R, max_states: usize, values: u8) -> (Vec<Either<u8, usize>>, usize) {
    let n = rng.gen_range(1..=max_states);
    let table = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                Left(rng.gen_range(0..values))
            } else {
                Right(rng.gen_range(0..n))
            }
        })
        .collect();
    (table, rng.gen_range(0..n))
}

/// Random convergent-or-divergent machine: a `later` chain of random length
/// below `max_steps` in front of a random table machine.
pub fn random_delay<R: Rng>(rng: &mut R, max_steps: u64, values: u8) -> Delay<u8> {
    let (table, seed) = random_table(rng, 4, values);
    let mut d = Machine::from_table(table, seed).to_delay();
    for _ in 0..rng.gen_range(0..max_steps) {
        d = later(d);
    }
    d
}

/// Random Kleisli map `u8 → D u8`, as a table of machines.
pub fn random_kleisli<R: Rng>(rng: &mut R, values: u8) -> Arc<Vec<Delay<u8>>> {
    Arc::new((0..values).map(|_| random_delay(rng, 6, values)).collect())
}

#[derive(Debug, Clone, Copy)]
pub struct DelayLawConfig {
    pub seed: u64,
    pub machines: u64,
    pub depth: u64,
    pub exec: Exec,
}

impl Default for DelayLawConfig {
    fn default() -> Self {
        DelayLawConfig {
            seed: 0,
            machines: 200,
            depth: 50,
            exec: Exec::Parallel,
        }
    }
}

const VALUES: u8 = 4;

/// Monad laws, the coalgebraic characterizations of Kleisli lifting and
/// strength, `later`-commutation, commutativity, the pairing section and race
/// step-exactness, each on `machines` seeded random machines, checked as
/// depth-`depth` strong bisimilarity.
pub fn check_delay_laws(cfg: &DelayLawConfig) -> LawReport {
    let depth = cfg.depth;
    let results = par::map_range(cfg.exec, 0..cfg.machines, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9).wrapping_add(i));
        delay_instance(&mut rng, i, depth)
    });
    let mut report = LawReport::new("delay");
    for r in results {
        report.merge(r);
    }
    report.finish()
}

fn strong<X: Payload + PartialEq + fmt::Debug>(
    report: &mut LawReport,
    law: &str,
    instance: u64,
    lhs: &Delay<X>,
    rhs: &Delay<X>,
    depth: u64,
) {
    let verdict = bisim_strong_fuel(lhs, rhs, depth);
    report.check(verdict.not_refuted(), || {
        Failure::new(
            law,
            format!("machine #{instance}"),
            run_for(lhs, depth).converged().map(|(v, k)| (v.clone(), k)),
            run_for(rhs, depth).converged().map(|(v, k)| (v.clone(), k)),
        )
    });
}

fn delay_instance(rng: &mut ChaCha8Rng, i: u64, depth: u64) -> LawReport {
    let mut r = LawReport::new("delay");
    let d = random_delay(rng, 20, VALUES);
    let d2 = random_delay(rng, 20, VALUES);
    let x: u8 = rng.gen_range(0..VALUES);
    let ft = random_kleisli(rng, VALUES);
    let gt = random_kleisli(rng, VALUES);
    let f = {
        let ft = ft.clone();
        move |x: u8| ft[x as usize].clone()
    };
    let g = {
        let gt = gt.clone();
        move |x: u8| gt[x as usize].clone()
    };

    strong(&mut r, "left-unit", i, &bind(&now(x), f.clone()), &f(x), depth);
    strong(&mut r, "right-unit", i, &bind(&d, now), &d, depth);
    let (f2, g2) = (f.clone(), g.clone());
    strong(
        &mut r,
        "associativity",
        i,
        &bind(&bind(&d, f.clone()), g.clone()),
        &bind(&d, move |x| bind(&f2(x), g2.clone())),
        depth,
    );

    // Kleisli lifting is the unique map with out ∘ f* = [out ∘ f, inr ∘ f*] ∘ out.
    let unfolded = match d.out() {
        Left(x) => f(x),
        Right(rest) => later(bind(&rest, f.clone())),
    };
    strong(&mut r, "kleisli-characterization", i, &bind(&d, f.clone()), &unfolded, depth);

    // Strength is the unique map with out ∘ τ = (id + τ) ∘ dstr ∘ (id × out).
    let unfolded = match d.out() {
        Left(y) => now((x, y)),
        Right(rest) => later(strength(x, &rest)),
    };
    strong(&mut r, "strength-characterization", i, &strength(x, &d), &unfolded, depth);
    strong(&mut r, "strength-via-map", i, &strength(x, &d), &map(&d, move |y| (x, y)), depth);
    strong(&mut r, "strength-unit", i, &strength(x, &now(x)), &now((x, x)), depth);
    strong(&mut r, "strength-snd", i, &map(&strength(x, &d), |(_, y)| y), &d, depth);
    let dd = map(&d, move |y| iota(y, (y % 3) as u64));
    strong(
        &mut r,
        "strength-mu",
        i,
        &strength(x, &flatten(&dd)),
        &flatten(&map(&strength(x, &dd), |(w, inner)| strength(w, &inner))),
        depth,
    );

    let ld = later(d.clone());
    strong(&mut r, "later-bind", i, &bind(&ld, f.clone()), &later(bind(&d, f.clone())), depth);
    let f3 = f.clone();
    strong(&mut r, "later-kleisli", i, &bind(&ld, f.clone()), &bind(&d, move |y| later(f3(y))), depth);
    strong(&mut r, "later-strength", i, &strength(x, &ld), &later(strength(x, &d)), depth);

    strong(&mut r, "commutativity", i, &pair_sequential(&d, &d2), &pair_sequential_rev(&d, &d2), depth);

    let dp = pair_sequential(&d, &map(&d2, |y| y.wrapping_add(1)));
    let split = pair_retraction(&map(&dp, |(a, _)| a), &map(&dp, |(_, b)| b));
    strong(&mut r, "pairing-section", i, &split, &dp, depth);

    let (o1, o2, o) = (run_for(&d, depth), run_for(&d2, depth), run_for(&race(&d, &d2), depth));
    let expected = match (o1.converged(), o2.converged()) {
        (Some((a, k1)), Some((_, k2))) if k1 <= k2 => Some((Left(*a), k1)),
        (Some(_), Some((b, k2))) => Some((Right(*b), k2)),
        (Some((a, k1)), None) => Some((Left(*a), k1)),
        (None, Some((b, k2))) => Some((Right(*b), k2)),
        (None, None) => None,
    };
    let observed = o.converged().map(|(v, k)| {
        let winner: Either<u8, u8> = match v {
            Left((a, _)) => Left(*a),
            Right((_, b)) => Right(*b),
        };
        (winner, k)
    });
    r.check(observed == expected, || {
        Failure::new("race-step-exact", format!("machine #{i}"), observed, expected)
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv<X: Payload>(d: &Delay<X>, fuel: u64) -> Option<(X, u64)> {
        run_for(d, fuel).converged().map(|(v, k)| (v.clone(), k))
    }

    #[test]
    fn now_examples() {
        assert_eq!(conv(&now(5), 0), Some((5, 0)));
        assert_eq!(conv(&now(5), 100), Some((5, 0)));
        assert!(matches!(now("a").out(), Left("a")));
    }

    #[test]
    fn later_examples() {
        assert_eq!(conv(&later(now(7)), 1), Some((7, 1)));
        assert!(run_for(&later(later(now(7))), 1).is_running());
        match later(now(3)).out() {
            Right(rest) => assert_eq!(bisim_strong_fuel(&rest, &now(3), 10), ThreeValued::True),
            Left(_) => panic!("later must step"),
        }
    }

    #[test]
    fn coit_examples() {
        let f = |k: &u32| if *k == 0 { Left("done") } else { Right(*k - 1) };
        assert_eq!(conv(&coit(f, 3), 10), Some(("done", 3)));
        assert_eq!(conv(&coit(|y: &u8| Left(*y), 9), 10), Some((9, 0)));
        assert!(run_for(&coit(|y: &u8| Right::<u8, u8>(*y), 0), 1000).is_running());
    }

    #[test]
    fn coit_agrees_with_one_unfolding() {
        let f = |k: &u32| if *k == 0 { Left(k * 2) } else { Right(*k - 1) };
        for y0 in 0..5u32 {
            let lhs = coit(f, y0);
            let rhs = match f(&y0) {
                Left(x) => now(x),
                Right(y) => later(coit(f, y)),
            };
            assert_eq!(bisim_strong_fuel(&lhs, &rhs, 20), ThreeValued::True);
        }
    }

    #[test]
    fn bind_adds_steps() {
        let d = later(later(now(2)));
        let r = bind(&d, |x| later(now(x + 1)));
        assert_eq!(conv(&r, 10), Some((3, 3)));
    }

    #[test]
    fn strength_examples() {
        assert_eq!(conv(&strength(1, &later(now(2))), 5), Some(((1, 2), 1)));
        assert_eq!(bisim_strong_fuel(&strength(1, &now(2)), &now((1, 2)), 5), ThreeValued::True);
        assert_eq!(conv(&costrength(&iota('a', 2), 9), 5), Some((('a', 9), 2)));
    }

    #[test]
    fn iota_examples() {
        assert_eq!(bisim_strong_fuel(&iota('x', 0), &now('x'), 3), ThreeValued::True);
        assert_eq!(conv(&iota('x', 2), 2), Some(('x', 2)));
        assert_eq!(conv(&iota('x', 3), 3), Some(('x', 3)));
        match run_for(&iota('x', 3), 2) {
            Observation::StillRunning(rest) => {
                assert_eq!(bisim_strong_fuel(&rest, &iota('x', 1), 5), ThreeValued::True)
            }
            _ => panic!("iota(x, 3) must not converge with fuel 2"),
        }
    }

    #[test]
    fn iota_bind_matches_first_projection_leg() {
        // iota* and D fst agree at bounded depth after collapsing the counter.
        let pairs = [(('a', 0u64), 0u64), (('b', 2), 1), (('c', 1), 3)];
        for ((x, n), k) in pairs {
            let d = iota((x, n), k);
            let lhs = bind(&d, |(x, n)| iota(x, n));
            let rhs = map(&d, |(x, _)| x);
            assert_eq!(conv(&lhs, 5).unwrap().0, conv(&rhs, 5).unwrap().0);
            assert_eq!(conv(&lhs, 5).unwrap().1, k + n);
        }
    }

    #[test]
    fn race_examples() {
        match conv(&race(&now('a'), &later(now('b'))), 0) {
            Some((Left(('a', rest)), 0)) => assert_eq!(conv(&rest, 5), Some(('b', 1))),
            other => panic!("unexpected {other:?}"),
        }
        match conv(&race(&later(now('a')), &now('b')), 0) {
            Some((Right((rest, 'b')), 0)) => assert_eq!(conv(&rest, 5), Some(('a', 1))),
            other => panic!("unexpected {other:?}"),
        }
        match conv(&race(&now('a'), &now('b')), 0) {
            Some((Left(('a', rest)), 0)) => assert_eq!(conv(&rest, 0), Some(('b', 0))),
            other => panic!("unexpected {other:?}"),
        }
        assert!(run_for(&race(&never::<u8>(), &never::<u8>()), 100).is_running());
    }

    #[test]
    fn run_for_diverging_machine() {
        assert!(run_for(&coit(|y: &u8| Right::<(), u8>(*y), 0), 1_000_000).is_running());
    }

    #[test]
    fn weak_bisimilarity_examples() {
        assert_eq!(bisim_weak_fuel(&now(1), &later(now(1)), 1), ThreeValued::True);
        assert_eq!(bisim_weak_fuel(&now(1), &now(2), 0), ThreeValued::False);
        for k in [0, 1, 10, 500] {
            assert_eq!(bisim_weak_fuel(&now(1), &never(), k), ThreeValued::Unknown);
        }
        assert_eq!(bisim_strong_fuel(&now(1), &later(now(1)), 5), ThreeValued::False);
    }

    #[test]
    fn guarded_iterate_counts_body_steps_only() {
        // Count down with one `later` per round.
        let d = guarded_iterate(
            |k: u32| if k == 0 { now(Left("done")) } else { later(now(Right(k - 1))) },
            4,
        );
        assert_eq!(conv(&d, 10), Some(("done", 4)));
    }

    #[test]
    fn pairing_section_on_split_pairs() {
        for k in 0..6 {
            let d = iota((k as u8, 9u8), k);
            let split = pair_retraction(&map(&d, |(a, _)| a), &map(&d, |(_, b)| b));
            assert_eq!(bisim_strong_fuel(&split, &d, 20), ThreeValued::True);
        }
    }

    #[test]
    fn machine_bind_and_later_match_delay() {
        let m = Machine::from_table(vec![Right(1), Right(2), Left(7u8)], 0);
        let cont = |x: &u8| Machine::from_table(vec![Right(1), Left(*x + 1)], 0);
        let lhs = m.bind(cont).to_delay();
        let rhs = bind(&m.to_delay(), move |x| cont(&x).to_delay());
        assert_eq!(bisim_strong_fuel(&lhs, &rhs, 10), ThreeValued::True);
        assert_eq!(conv(&m.later().to_delay(), 10), Some((7, 3)));
    }

    #[test]
    fn delay_suite_small_run_passes() {
        let cfg = DelayLawConfig {
            machines: 20,
            ..Default::default()
        };
        let r = check_delay_laws(&cfg);
        assert!(r.passed(), "{:#?}", r.failures);
    }
}
