use either::Either::{self, Left, Right};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use elgot_iter::algebra::LoopBody;
use elgot_iter::delay::{self, Machine};
use elgot_iter::elgot::{bounded_elgot, elgot_iterate, ElgotBody};
use elgot_iter::finset::{dstl, dstl_inv, dstr, dstr_inv, oracle_iterate, FinSet, FunSpace};
use elgot_iter::lang::{self, GenConfig, Store};
use elgot_iter::partial::{bounded_iterate, collapse_finite, iterate_partial, leq, FinKleisli, Partial};

fn body_strategy() -> impl Strategy<Value = (usize, Vec<Either<Partial<u8>, usize>>)> {
    (1usize..8).prop_flat_map(|ns| {
        let cell = prop_oneof![
            Just(Left(Partial::Bottom)),
            (0u8..3).prop_map(|v| Left(Partial::Value(v))),
            (0..ns).prop_map(Right),
        ];
        (Just(ns), prop::collection::vec(cell, ns))
    })
}

/// Walk the table by hand: the exit payload and the number of Right-edges
/// taken, or `None` if a state repeats first.
fn walk(table: &[Either<Partial<u8>, usize>], s0: usize) -> Option<(Partial<u8>, u64)> {
    let mut seen = vec![false; table.len()];
    let (mut s, mut steps) = (s0, 0);
    loop {
        if seen[s] {
            return None;
        }
        seen[s] = true;
        match &table[s] {
            Left(r) => return Some((*r, steps)),
            Right(t) => {
                s = *t;
                steps += 1;
            }
        }
    }
}

proptest! {
    #[test]
    fn iteration_matches_a_hand_walk((ns, table) in body_strategy(), s0 in 0usize..8) {
        let s0 = s0 % ns;
        let lp = LoopBody::from_table(FinSet::range(ns), table.clone()).unwrap();
        let want = walk(&table, s0).map_or(Partial::Bottom, |(r, _)| r);
        prop_assert_eq!(iterate_partial(&lp, &s0).unwrap(), want);
        prop_assert_eq!(oracle_iterate(&lp, &s0).unwrap(), want);
        prop_assert_eq!(elgot_iterate(&ElgotBody::from_loop(&lp), &s0).unwrap(), want);
    }

    #[test]
    fn bounded_chain_is_monotone_and_stabilizes((ns, table) in body_strategy(), s0 in 0usize..8) {
        let s0 = s0 % ns;
        let lp = LoopBody::from_table(FinSet::range(ns), table.clone()).unwrap();
        let full = iterate_partial(&lp, &s0).unwrap();
        let chain: Vec<_> = (0..=ns as u64 + 3).map(|n| bounded_iterate(&lp, &s0, n).unwrap()).collect();
        prop_assert_eq!(chain[0], Partial::Bottom);
        for w in chain.windows(2) {
            prop_assert!(w[0].le(&w[1]));
        }
        for c in &chain[ns + 1..] {
            prop_assert_eq!(*c, full);
        }
        // The approximant with n counts reaches an exit after at most n - 1 edges.
        if let Some((r, steps)) = walk(&table, s0) {
            prop_assert_eq!(chain[steps as usize + 1], r);
            prop_assert_eq!(chain[steps as usize], Partial::Bottom);
        }
        let f = ElgotBody::from_loop(&lp);
        for (n, c) in chain.iter().enumerate() {
            prop_assert_eq!(bounded_elgot(&f, &s0, n as u64).unwrap(), *c);
        }
    }

    #[test]
    fn machine_steps_match_a_hand_walk(
        table in prop::collection::vec(prop_oneof![(0u8..3).prop_map(Left), (0usize..6).prop_map(Right)], 6),
        s0 in 0usize..6,
    ) {
        let lifted: Vec<_> = table.iter().map(|e| e.map_left(Partial::Value)).collect();
        let d = Machine::from_table(table, s0).to_delay();
        let obs = delay::run_for(&d, 10);
        match walk(&lifted, s0) {
            Some((Partial::Value(v), steps)) => prop_assert_eq!(obs.converged().map(|(x, n)| (*x, n)), Some((v, steps))),
            _ => prop_assert!(obs.is_running()),
        }
    }

    #[test]
    fn race_takes_the_minimum(a in 0u64..20, b in 0u64..20) {
        let r = delay::race(&delay::iota(1u8, a), &delay::iota(2u8, b));
        let (winner, n) = match delay::run_for(&r, 100).converged() {
            Some((Left((x, _)), n)) => (*x, n),
            Some((Right((_, y)), n)) => (*y, n),
            None => unreachable!(),
        };
        prop_assert_eq!(n, a.min(b));
        prop_assert_eq!(winner, if a <= b { 1 } else { 2 });
    }

    #[test]
    fn distributivity_round_trips(x in any::<u8>(), y in any::<bool>(), z in any::<i16>(), left in any::<bool>()) {
        let yz: Either<bool, i16> = if left { Left(y) } else { Right(z) };
        prop_assert_eq!(dstr_inv(dstr((x, yz))), (x, yz));
        let xy: Either<u8, bool> = if left { Left(x) } else { Right(y) };
        prop_assert_eq!(dstl_inv(dstl((xy, z))), (xy, z));
    }

    #[test]
    fn funspace_decodes_base_cod(dom in 0usize..6, cod in 1usize..6, i in any::<u64>()) {
        let sp = FunSpace::new(dom, cod).unwrap();
        let i = i % sp.count();
        let t = sp.nth(i);
        let back = t.iter().rev().fold(0u64, |acc, d| acc * cod as u64 + *d as u64);
        prop_assert_eq!(back, i);
    }

    #[test]
    fn leq_is_pointwise(f in prop::collection::vec(0usize..4, 4), g in prop::collection::vec(0usize..4, 4)) {
        let dec = |d: usize| if d == 0 { Partial::Bottom } else { Partial::Value(d - 1) };
        let kf = FinKleisli::from_table(FinSet::range(4), f.iter().map(|d| dec(*d)).collect()).unwrap();
        let kg = FinKleisli::from_table(FinSet::range(4), g.iter().map(|d| dec(*d)).collect()).unwrap();
        let want = f.iter().zip(&g).all(|(a, b)| *a == 0 || a == b);
        prop_assert_eq!(leq(&kf, &kg).unwrap(), want);
    }

    #[test]
    fn printed_programs_reparse(seed in any::<u64>()) {
        let p = lang::generate_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        let printed = p.to_string();
        let q = lang::parse(&printed).unwrap();
        prop_assert!(q.same_shape(&p));
        prop_assert_eq!(q.to_string(), printed);
    }

    #[test]
    fn backends_agree(seed in any::<u64>()) {
        let p = lang::generate_program(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        let s0 = Store::zeros(&p);
        let ext = lang::eval_extensional(&p, &s0).unwrap();
        prop_assert_eq!(collapse_finite(&lang::machine(&p, &s0).unwrap()).unwrap(), ext.clone());
        let bound = lang::Compiled::new(&p).control_points() as u64 * s0.space_size();
        let obs = delay::run_for(&lang::eval_intensional(&p, &s0).unwrap(), bound);
        prop_assert_eq!(obs.converged().map(|(s, _)| s.clone()), ext.value());
    }
}
