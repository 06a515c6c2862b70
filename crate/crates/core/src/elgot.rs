//! The Elgot iteration `‡` on the maybe backend, its axioms, bounded
//! approximants, and the termination lattice `Σ = K 1` in both backends.

use std::fmt::{self, Debug};
use std::hash::Hash;
use std::sync::Arc;

use either::Either::{self, Left, Right};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::LoopBody;
use crate::delay::{self, Delay, Observation};
use crate::error::Result;
use crate::finset::{FinSet, FunSpace};
use crate::par;
use crate::partial::{self, Partial};
use crate::report::{Exactness, Failure, LawReport, SuiteConfig};

use Partial::{Bottom, Value};

/// A body `f : X → K(Y + X)`; `Right` payloads index `states`.
#[derive(Clone, PartialEq)]
pub struct ElgotBody<Y, X: Eq + Hash = usize> {
    states: FinSet<X>,
    body: Vec<Partial<Either<Y, usize>>>,
}

impl<Y: Debug, X: Eq + Hash + Debug> Debug for ElgotBody<Y, X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let states = self.states.elements();
        f.debug_map()
            .entries(states.iter().zip(self.body.iter().map(|p| p.as_ref().map(|e| e.as_ref().map_right(|t| &states[*t])))))
            .finish()
    }
}

impl<Y: Clone, X: Eq + Hash + Clone + Debug> ElgotBody<Y, X> {
    pub fn from_fn(states: FinSet<X>, f: impl Fn(&X) -> Partial<Either<Y, X>>) -> Result<Self> {
        let body = states
            .elements()
            .iter()
            .map(|x| match f(x) {
                Bottom => Ok(Bottom),
                Value(Left(y)) => Ok(Value(Left(y))),
                Value(Right(t)) => states.require(&t).map(|i| Value(Right(i))),
            })
            .collect::<Result<_>>()?;
        Ok(ElgotBody { states, body })
    }

    /// The rearrangement `[K inl, η inr] ∘ f` of a pre-Elgot body
    /// `f : S → K Y + S`.
    pub fn from_loop(lp: &LoopBody<Partial<Y>, X>) -> Self {
        let body = lp
            .table()
            .iter()
            .map(|e| match e {
                Left(p) => p.clone().map(Left),
                Right(t) => Value(Right(*t)),
            })
            .collect();
        ElgotBody {
            states: lp.states().clone(),
            body,
        }
    }

    pub fn states(&self) -> &FinSet<X> {
        &self.states
    }

    pub fn table(&self) -> &[Partial<Either<Y, usize>>] {
        &self.body
    }
}

/// `f‡(x0)`: the least fixpoint of `g ↦ [η, g]* ∘ f`, by path following.
pub fn elgot_iterate<Y: Clone, X: Eq + Hash + Clone + Debug>(f: &ElgotBody<Y, X>, x0: &X) -> Result<Partial<Y>> {
    let start = f.states.require(x0)?;
    Ok(elgot_indexed(&f.body, start))
}

pub(crate) fn elgot_indexed<Y: Clone>(table: &[Partial<Either<Y, usize>>], start: usize) -> Partial<Y> {
    partial::iterate_lazy(start, |x| match &table[*x] {
        Bottom => Left(Bottom),
        Value(Left(y)) => Left(Value(y.clone())),
        Value(Right(t)) => Right(*t),
    })
}

/// The bounded approximant `f^⟨‡(x0, n)`.
pub fn bounded_elgot<Y: Clone, X: Eq + Hash + Clone + Debug>(f: &ElgotBody<Y, X>, x0: &X, n: u64) -> Result<Partial<Y>> {
    let start = f.states.require(x0)?;
    Ok(bounded_elgot_indexed(&f.body, start, n))
}

fn bounded_elgot_indexed<Y: Clone>(table: &[Partial<Either<Y, usize>>], start: usize, n: u64) -> Partial<Y> {
    let (mut x, mut n) = (start, n);
    loop {
        if n == 0 {
            return Bottom;
        }
        n -= 1;
        match &table[x] {
            Bottom => return Bottom,
            Value(Left(y)) => return Value(y.clone()),
            Value(Right(t)) => x = *t,
        }
    }
}

/// An iteration operator on index tables, `X → K(Y + X)` to `X → K Y`, with
/// `Y` and `X` both encoded as `usize`.
pub type ElgotOperator = dyn Fn(&[Partial<Either<usize, usize>>], usize) -> Partial<usize> + Sync;

type Table = Vec<Partial<Either<usize, usize>>>;

fn all_elgot_bodies(nx: usize, ny: usize) -> Result<Vec<Table>> {
    let space = FunSpace::new(nx, 1 + ny + nx)?;
    Ok(space
        .iter()
        .map(|d| {
            d.into_iter()
                .map(|c| match c {
                    0 => Bottom,
                    c if c <= ny => Value(Left(c - 1)),
                    c => Value(Right(c - 1 - ny)),
                })
                .collect()
        })
        .collect())
}

fn dagger(op: &ElgotOperator, f: &[Partial<Either<usize, usize>>]) -> Vec<Partial<usize>> {
    (0..f.len()).map(|x| op(f, x)).collect()
}

/// The Elgot-monad axioms for `‡` on the maybe backend: Fixpoint,
/// Naturality, Codiagonal, Uniformity and Strength, plus leastness, the
/// domain lemma `f‡ = (f* ∘ dom f‡)‡`, agreement with the pre-Elgot
/// iteration after rearrangement, and the bounded approximants.
pub fn check_elgot_monad_axioms(cfg: &SuiteConfig) -> LawReport {
    check_elgot_monad_axioms_with(&|f, x| elgot_indexed(f, x), cfg)
}

/// As [`check_elgot_monad_axioms`] for an arbitrary operator.
pub fn check_elgot_monad_axioms_with(op: &ElgotOperator, cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("elgot-monad");
    let n = cfg.max_size;
    let big = n + 1;
    let exec = cfg.exec;

    for nx in 1..=big {
        for ny in 0..=big {
            let Ok(fs) = all_elgot_bodies(nx, ny) else {
                report.skip(format!("bodies |X|={nx} |Y|={ny}"));
                continue;
            };
            let small = nx <= n && ny <= n;

            // Fixpoint: f‡ = [η, f‡]* ∘ f.
            let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
                let f = &fs[i as usize];
                let d = dagger(op, f);
                (0..nx)
                    .filter_map(|x| {
                        let rhs = f[x].bind(|e| match e {
                            Left(y) => Value(y),
                            Right(t) => d[t],
                        });
                        (d[x] != rhs).then(|| Failure::new("fixpoint", format!("f={f:?} x={x}"), d[x], rhs))
                    })
                    .collect()
            });
            report.record(fs.len() as u64 * nx as u64, failures);

            // Uniformity: f h = K(id + h) g  ⇒  f‡ h = g‡, for g : Z → K(Y + Z), h : Z → X.
            for nz in 1..=big {
                let Ok(gs) = all_elgot_bodies(nz, ny) else {
                    report.skip(format!("uniformity g |Z|={nz}"));
                    continue;
                };
                let Ok(hs) = FunSpace::new(nz, nx).map(|s| s.iter().collect::<Vec<_>>()) else {
                    report.skip(format!("uniformity h {nz}→{nx}"));
                    continue;
                };
                let g_daggers: Vec<_> = gs.iter().map(|g| dagger(op, g)).collect();
                let results = par::map_range(exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    let fd = dagger(op, f);
                    let mut checked = 0u64;
                    let mut out = Vec::new();
                    for h in &hs {
                        for (g, gd) in gs.iter().zip(&g_daggers) {
                            let premise = (0..nz).all(|z| f[h[z]] == g[z].map(|e| e.map_right(|t| h[t])));
                            if !premise {
                                continue;
                            }
                            checked += 1;
                            for z in 0..nz {
                                if fd[h[z]] != gd[z] {
                                    out.push(Failure::new("uniformity", format!("f={f:?} g={g:?} h={h:?} z={z}"), fd[h[z]], gd[z]));
                                }
                            }
                        }
                    }
                    (checked, out)
                });
                for (c, fl) in results {
                    report.record(c, fl);
                }
            }

            // Rearrangement agreement and the bounded approximants.
            let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
                let f = &fs[i as usize];
                let d = dagger(op, f);
                let mut out = Vec::new();
                let top = nx as u64 + 1;
                for x in 0..nx {
                    let chain: Vec<_> = (0..=top).map(|k| bounded_elgot_indexed(f, x, k)).collect();
                    for (k, c) in chain.iter().enumerate() {
                        if !c.le(&d[x]) {
                            out.push(Failure::new("bounded-below-full", format!("f={f:?} x={x} n={k}"), c, d[x]));
                        }
                    }
                    for w in chain.windows(2) {
                        if !w[0].le(&w[1]) {
                            out.push(Failure::new("bounded-monotone", format!("f={f:?} x={x}"), w[0], w[1]));
                        }
                    }
                    if chain[top as usize] != d[x] {
                        out.push(Failure::new("bounded-stabilization", format!("f={f:?} x={x}"), chain[top as usize], d[x]));
                    }
                }
                out
            });
            report.record(fs.len() as u64 * nx as u64 * 3, failures);

            if !small {
                continue;
            }

            // Naturality: g* ∘ f‡ = ([(K inl) g, η inr]* ∘ f)‡, g : Y → K Z.
            for nz in 0..=n {
                let Ok(gs) = partial::all_kleisli(ny, nz) else { continue };
                let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    let fd = dagger(op, f);
                    let mut out = Vec::new();
                    for g in &gs {
                        let g = g.table();
                        let body: Table = f
                            .iter()
                            .map(|p| {
                                p.bind(|e| match e {
                                    Left(y) => g[y].map(Left),
                                    Right(t) => Value(Right(t)),
                                })
                            })
                            .collect();
                        for x in 0..nx {
                            let lhs = fd[x].bind(|y| g[y]);
                            let rhs = op(&body, x);
                            if lhs != rhs {
                                out.push(Failure::new("naturality", format!("f={f:?} g={g:?} x={x}"), lhs, rhs));
                            }
                        }
                    }
                    out
                });
                report.record(fs.len() as u64 * gs.len() as u64 * nx as u64, failures);
            }

            // Strength: τ ∘ (id × f‡) = ((K dstr) ∘ τ ∘ (id × f))‡ on W × X.
            for nw in 1..=n {
                let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
                    let f = &fs[i as usize];
                    let fd = dagger(op, f);
                    // (w, x) ↦ w * nx + x; W × Y encoded as w * ny + y.
                    let body: Table = (0..nw * nx)
                        .map(|s| {
                            let (w, x) = (s / nx, s % nx);
                            Partial::strength(w, f[x]).map(|p| match crate::finset::dstr(p) {
                                Left((w, y)) => Left(w * ny + y),
                                Right((w, t)) => Right(w * nx + t),
                            })
                        })
                        .collect();
                    let mut out = Vec::new();
                    for w in 0..nw {
                        for x in 0..nx {
                            let lhs = Partial::strength(w, fd[x]).map(|(w, y)| w * ny + y);
                            let rhs = op(&body, w * nx + x);
                            if lhs != rhs {
                                out.push(Failure::new("strength", format!("f={f:?} w={w} x={x}"), lhs, rhs));
                            }
                        }
                    }
                    out
                });
                report.record(fs.len() as u64 * (nw * nx) as u64, failures);
            }

            // Leastness, and f‡ = (f* ∘ dom f‡)‡.
            let Ok(cands) = partial::all_kleisli(nx, ny) else { continue };
            let failures = par::flat_map_range(exec, 0..fs.len() as u64, |i| {
                let f = &fs[i as usize];
                let fd = dagger(op, f);
                let mut out = Vec::new();
                for g in &cands {
                    let g = g.table();
                    let pre = (0..nx).all(|x| {
                        f[x].bind(|e| match e {
                            Left(y) => Value(y),
                            Right(t) => g[t],
                        })
                        .le(&g[x])
                    });
                    if pre && !(0..nx).all(|x| fd[x].le(&g[x])) {
                        out.push(Failure::new("leastness", format!("f={f:?} g={g:?}"), &fd, g));
                    }
                }
                let restricted: Table = (0..nx).map(|x| if fd[x].is_value() { f[x] } else { Bottom }).collect();
                for x in 0..nx {
                    let rhs = op(&restricted, x);
                    if fd[x] != rhs {
                        out.push(Failure::new("dom-lemma", format!("f={f:?} x={x}"), fd[x], rhs));
                    }
                }
                out
            });
            report.record(fs.len() as u64 * (cands.len() + nx) as u64, failures);

            // Codiagonal: (K[id, inr] ∘ f)‡ = f‡‡ for f : X → K((Y + X) + X).
            let Ok(fs2) = all_elgot_bodies(nx, ny + nx) else { continue };
            let failures = par::flat_map_range(exec, 0..fs2.len() as u64, |i| {
                // Inner payload c < ny is inl y, otherwise inr (c - ny).
                let f = &fs2[i as usize];
                let merged: Table = f
                    .iter()
                    .map(|p| {
                        p.map(|e| match e {
                            Left(c) if c < ny => Left(c),
                            Left(c) => Right(c - ny),
                            Right(t) => Right(t),
                        })
                    })
                    .collect();
                let inner = dagger(op, f);
                let outer: Table = inner.iter().map(|p| p.map(|c| if c < ny { Left(c) } else { Right(c - ny) })).collect();
                (0..nx)
                    .filter_map(|x| {
                        let lhs = op(&merged, x);
                        let rhs = op(&outer, x);
                        (lhs != rhs).then(|| Failure::new("codiagonal", format!("f={f:?} x={x}"), lhs, rhs))
                    })
                    .collect()
            });
            report.record(fs2.len() as u64 * nx as u64, failures);
        }
    }

    // Rearrangement: f^† = ([K inl, η inr] ∘ f)‡ on all pre-Elgot bodies.
    for ns in 1..=big {
        for nx in 0..=n {
            let Ok(bodies) = partial::all_partial_bodies(ns, nx) else { continue };
            let failures = par::flat_map_range(exec, 0..bodies.len() as u64, |i| {
                let t = &bodies[i as usize];
                let rearranged: Table = t
                    .iter()
                    .map(|e| match e {
                        Left(p) => p.map(Left),
                        Right(s) => Value(Right(*s)),
                    })
                    .collect();
                (0..ns)
                    .filter_map(|s| {
                        let lhs = partial::iterate_partial_indexed(t, s);
                        let rhs = op(&rearranged, s);
                        (lhs != rhs).then(|| Failure::new("rearrangement", format!("f={t:?} s={s}"), lhs, rhs))
                    })
                    .collect()
            });
            report.record(bodies.len() as u64 * ns as u64, failures);
        }
    }
    report.finish()
}

/// `Σ` in the maybe backend: `Value(())` is ⊤, `Bottom` is ⊥.
pub type SigmaK = Partial<()>;

pub const TOP: SigmaK = Value(());
pub const BOT: SigmaK = Bottom;

/// `∧ = K! ∘ τ̂* ∘ τ`.
pub fn sigma_meet_k(a: SigmaK, b: SigmaK) -> SigmaK {
    Partial::strength(a, b).bind(|(a, y)| Partial::costrength(a, y)).map(|_| ())
}

/// `∨`: defined as soon as either side is.
pub fn sigma_join_k(a: SigmaK, b: SigmaK) -> SigmaK {
    if a.is_value() || b.is_value() {
        TOP
    } else {
        BOT
    }
}

/// `∧` in the delay backend: sequenced pairing, so step counts add.
pub fn sigma_meet(a: &Delay<()>, b: &Delay<()>) -> Delay<()> {
    delay::map(&delay::pair_sequential(a, b), |_| ())
}

/// `∨` in the delay backend: a race, converging at the earlier arm's step.
pub fn sigma_join(a: &Delay<()>, b: &Delay<()>) -> Delay<()> {
    delay::map(&delay::race(a, b), |_| ())
}

/// Truncated minimum: `min(steps(p), n)`, by recursion on `n`.
pub fn truncated_min(p: &Delay<()>, n: u64) -> u64 {
    let (mut p, mut k) = (p.clone(), 0);
    while k < n {
        match p.out() {
            Left(()) => return k,
            Right(q) => {
                p = q;
                k += 1;
            }
        }
    }
    k
}

/// A sequence of termination values.
pub type SigmaSeq = Arc<dyn Fn(u64) -> Delay<()> + Send + Sync>;

#[derive(Clone)]
struct Dovetail {
    diagonal: u64,
    index: u64,
    /// `residuals[i]` is `seq(i)` after `diagonal - i - 1` observed steps.
    residuals: Vec<Delay<()>>,
}

/// Countable join by dovetailing. Pairs `(i, d)` are examined in order of
/// `i + d`, with `i` ascending inside a diagonal; examining `(i, d)` makes
/// the `d+1`-th observation of `seq(i)`. Each examined pair that does not
/// find convergence costs one step.
pub fn sigma_omega_join(seq: SigmaSeq) -> Delay<()> {
    let start = Dovetail {
        diagonal: 0,
        index: 0,
        residuals: Vec::new(),
    };
    let m = delay::Machine::new(start, move |st: &Dovetail| {
        let mut st = st.clone();
        let i = st.index as usize;
        let current = if i == st.residuals.len() {
            st.residuals.push(seq(st.index));
            st.residuals[i].clone()
        } else {
            st.residuals[i].clone()
        };
        match current.out() {
            Left(()) => Left(()),
            Right(rest) => {
                st.residuals[i] = rest;
                if st.index == st.diagonal {
                    st.diagonal += 1;
                    st.index = 0;
                } else {
                    st.index += 1;
                }
                Right(st)
            }
        }
    });
    m.to_delay()
}

/// An eventually-constant sequence: `prefix` followed by `tail` forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyConstant {
    pub prefix: Vec<SigmaK>,
    pub tail: SigmaK,
}

impl EventuallyConstant {
    pub fn get(&self, i: u64) -> SigmaK {
        self.prefix.get(i as usize).copied().unwrap_or(self.tail)
    }

    /// Embedding into the delay backend: ⊤ as `now`, ⊥ as `never`.
    pub fn to_delay_seq(&self) -> SigmaSeq {
        let s = self.clone();
        Arc::new(move |i| embed(s.get(i)))
    }

    pub fn map(&self, f: impl Fn(SigmaK) -> SigmaK) -> Self {
        EventuallyConstant {
            prefix: self.prefix.iter().map(|a| f(*a)).collect(),
            tail: f(self.tail),
        }
    }
}

pub fn embed(a: SigmaK) -> Delay<()> {
    match a {
        Value(()) => delay::now(()),
        Bottom => delay::never(),
    }
}

/// `⋁` on an eventually-constant sequence, exact: only the prefix and the
/// tail need inspecting.
pub fn sigma_omega_join_k(seq: &EventuallyConstant) -> SigmaK {
    seq.prefix.iter().chain(std::iter::once(&seq.tail)).fold(BOT, |acc, a| sigma_join_k(acc, *a))
}

/// Convergence status after `fuel` steps: equal when both converged or both
/// still run.
pub fn sigma_agree(a: &Delay<()>, b: &Delay<()>, fuel: u64) -> bool {
    delay::run_for(a, fuel).is_running() == delay::run_for(b, fuel).is_running()
}

fn steps_within(d: &Delay<()>, fuel: u64) -> Option<u64> {
    match delay::run_for(d, fuel) {
        Observation::Converged { steps, .. } => Some(steps),
        Observation::StillRunning(_) => None,
    }
}

/// Fuel used by the delay-backend lattice laws.
pub const SIGMA_FUEL: u64 = 50;

/// Machines for the delay-backend lattice laws: `never`, `iota` at a range
/// of step counts up to 20, and seeded random table machines.
pub fn sigma_machines(seed: u64, random: usize) -> Vec<Delay<()>> {
    let mut out = vec![delay::never()];
    out.extend([0, 1, 2, 5, 13, 20].into_iter().map(|k| delay::iota((), k)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 7 + random {
        let d = delay::map(&delay::random_delay(&mut rng, 8, 1), |_| ());
        // Keep only machines that converge by step 20 or never.
        if steps_within(&d, 20).is_some() || steps_within(&d, 200).is_none() {
            out.push(d);
        }
    }
    out
}

/// Lattice, frame and race laws for `Σ` in both backends.
pub fn check_sigma_laws(cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport::new("sigma");
    let vals = [BOT, TOP];
    let as_bool = |a: SigmaK| a.is_value();
    for a in vals {
        for b in vals {
            let m = sigma_meet_k(a, b);
            report.check(as_bool(m) == (as_bool(a) && as_bool(b)), || Failure::new("meet-table", format!("{a:?},{b:?}"), m, as_bool(a) && as_bool(b)));
            let j = sigma_join_k(a, b);
            report.check(as_bool(j) == (as_bool(a) || as_bool(b)), || Failure::new("join-table", format!("{a:?},{b:?}"), j, as_bool(a) || as_bool(b)));
            for c in vals {
                for (law, l, r) in lattice_laws_k(a, b, c) {
                    report.check(l == r, || Failure::new(law, format!("a={a:?} b={b:?} c={c:?}"), l, r));
                }
            }
        }
    }

    // Frame law on eventually-constant sequences with prefix length ≤ 3,
    // and agreement of the exact join with the dovetailed one.
    let mut seqs = Vec::new();
    for len in 0..=3usize {
        for bits in 0..1u32 << (len + 1) {
            let prefix = (0..len).map(|i| vals[(bits >> i) as usize & 1]).collect();
            seqs.push(EventuallyConstant {
                prefix,
                tail: vals[(bits >> len) as usize & 1],
            });
        }
    }
    for s in &seqs {
        for a in vals {
            let lhs = sigma_meet_k(a, sigma_omega_join_k(s));
            let rhs = sigma_omega_join_k(&s.map(|b| sigma_meet_k(a, b)));
            report.check(lhs == rhs, || Failure::new("frame", format!("a={a:?} seq={s:?}"), lhs, rhs));
        }
        let exact = sigma_omega_join_k(s);
        let dovetailed = sigma_omega_join(s.to_delay_seq());
        let converged = !delay::run_for(&dovetailed, 100).is_running();
        report.check(converged == exact.is_value(), || Failure::new("omega-join-embedding", format!("{s:?}"), converged, exact));
    }

    // Delay backend.
    let ms = sigma_machines(cfg.seed, 5);
    let nm = ms.len() as u64;
    let fuel = SIGMA_FUEL;
    for a in &ms {
        for b in &ms {
            let (sa, sb) = (steps_within(a, fuel), steps_within(b, fuel));
            let sj = steps_within(&sigma_join(a, b), fuel);
            let want = match (sa, sb) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
            report.check(sj == want, || Failure::new("race-step-exact", format!("{sa:?},{sb:?}"), sj, want));
            let sm = steps_within(&sigma_meet(a, b), fuel);
            let want = sa.zip(sb).map(|(x, y)| x + y).filter(|s| *s <= fuel);
            report.check(sm == want, || Failure::new("meet-steps-add", format!("{sa:?},{sb:?}"), sm, want));
            for n in [0, 3, 25] {
                let t = truncated_min(a, n);
                let want = sa.map_or(n, |s| s.min(n));
                report.check(t == want, || Failure::new("truncated-min", format!("{sa:?} n={n}"), t, want));
            }
        }
    }
    let results = par::flat_map_range(cfg.exec, 0..nm * nm * nm, |i| {
        let (a, b, c) = (&ms[(i / (nm * nm)) as usize], &ms[(i / nm % nm) as usize], &ms[(i % nm) as usize]);
        lattice_laws_d(a, b, c)
            .into_iter()
            .filter(|(_, l, r)| !(sigma_agree(l, r, fuel) && delay::bisim_weak_fuel(l, r, fuel).not_refuted()))
            .map(|(law, l, r)| Failure::new(law, format!("#{i}"), steps_within(&l, fuel), steps_within(&r, fuel)))
            .collect()
    });
    report.record(nm * nm * nm * 11, results);
    report.exactness = Exactness::Bounded;
    report.finish()
}

type LawInstance<T> = (&'static str, T, T);

fn lattice_laws_k(a: SigmaK, b: SigmaK, c: SigmaK) -> Vec<LawInstance<SigmaK>> {
    let (m, j) = (sigma_meet_k, sigma_join_k);
    vec![
        ("meet-commutative", m(a, b), m(b, a)),
        ("join-commutative", j(a, b), j(b, a)),
        ("meet-associative", m(a, m(b, c)), m(m(a, b), c)),
        ("join-associative", j(a, j(b, c)), j(j(a, b), c)),
        ("meet-idempotent", m(a, a), a),
        ("join-idempotent", j(a, a), a),
        ("absorption-meet", m(a, j(a, b)), a),
        ("absorption-join", j(a, m(a, b)), a),
        ("distributive-meet", m(a, j(b, c)), j(m(a, b), m(a, c))),
        ("distributive-join", j(a, m(b, c)), m(j(a, b), j(a, c))),
        ("units", m(a, TOP), j(a, BOT)),
    ]
}

fn lattice_laws_d(a: &Delay<()>, b: &Delay<()>, c: &Delay<()>) -> Vec<LawInstance<Delay<()>>> {
    let (m, j) = (sigma_meet, sigma_join);
    let (top, bot) = (delay::now(()), delay::never());
    vec![
        ("meet-commutative", m(a, b), m(b, a)),
        ("join-commutative", j(a, b), j(b, a)),
        ("meet-associative", m(a, &m(b, c)), m(&m(a, b), c)),
        ("join-associative", j(a, &j(b, c)), j(&j(a, b), c)),
        ("meet-idempotent", m(a, a), a.clone()),
        ("join-idempotent", j(a, a), a.clone()),
        ("absorption-meet", m(a, &j(a, b)), a.clone()),
        ("absorption-join", j(a, &m(a, b)), a.clone()),
        ("distributive-meet", m(a, &j(b, c)), j(&m(a, b), &m(a, c))),
        ("distributive-join", j(a, &m(b, c)), m(&j(a, b), &j(a, c))),
        ("units", m(a, &top), j(a, &bot)),
    ]
}
