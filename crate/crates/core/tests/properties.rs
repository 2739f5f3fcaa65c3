use std::collections::BTreeSet;

use nivat_core::balanced::{find_balanced_set, is_balanced, BalancedSearch};
use nivat_core::complexity::{complexity, rect_complexity};
use nivat_core::config::generators::{fibonacci_lift, thue_morse_2d};
use nivat_core::expansivity::{census, line_nonexpansive_at_scale};
use nivat_core::extension::{discrepancy_step, extension_fan, find_generating_set, is_generated, SearchMode};
use nivat_core::periodicity::{horizontal_period, is_periodic_on_region, period_lattice, strip_period_bound_check, Region};
use nivat_core::verifier::balanced_directions;
use nivat_core::{
    Alphabet, Configuration, ConvexLatticeSet, DirectedLine, Direction, Grid, LatticePoint, LiftRule, Source, Symbol, Unimodular,
};
use proptest::prelude::*;

fn p(x: i64, y: i64) -> LatticePoint {
    LatticePoint::new(x, y)
}

fn periodic() -> impl Strategy<Value = Configuration> {
    (1usize..=4, 1usize..=4, 2usize..=3).prop_flat_map(|(w, h, k)| {
        prop::collection::vec(0..k as Symbol, w * h).prop_map(move |cells| {
            let grid = Grid::new(w, h, cells).unwrap();
            Configuration::periodic(Alphabet::digits(k), grid).unwrap()
        })
    })
}

/// A convex set spanned by random points of a `6 × 3` box, shifted.
fn shape() -> impl Strategy<Value = ConvexLatticeSet> {
    (prop::collection::vec((0i64..6, 0i64..3), 1..7), -3i64..=3, -3i64..=3).prop_map(|(pts, dx, dy)| {
        ConvexLatticeSet::convex_hull(pts.into_iter().map(|(x, y)| p(x + dx, y + dy)))
            .unwrap()
    })
}

fn vector() -> impl Strategy<Value = LatticePoint> {
    (-6i64..=6, -6i64..=6).prop_map(|(x, y)| p(x, y))
}

fn unimodular() -> impl Strategy<Value = Unimodular> {
    prop::sample::select(vec![
        [[1, 0], [0, 1]],
        [[0, -1], [1, 0]],
        [[1, 1], [0, 1]],
        [[1, 0], [-1, 1]],
        [[2, 1], [1, 1]],
        [[-1, 0], [0, 1]],
        [[1, -2], [0, 1]],
    ])
    .prop_map(|m| Unimodular::new(m).unwrap())
}

fn line() -> impl Strategy<Value = DirectedLine> {
    prop::sample::select(balanced_directions()).prop_map(DirectedLine::new)
}

fn p_of(eta: &Configuration, s: &ConvexLatticeSet) -> usize {
    complexity(eta, s).unwrap().p
}

fn generates(eta: &Configuration, s: &ConvexLatticeSet) -> bool {
    s.vertices().iter().all(|&x| is_generated(eta, s, x).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_is_idempotent(s in shape()) {
        let again = ConvexLatticeSet::convex_hull(s.points().iter().copied()).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn vertex_removal_stays_convex(s in shape(), i in any::<prop::sample::Index>()) {
        prop_assume!(s.len() > 1);
        let x = *i.get(s.vertices());
        let rest = s.remove_vertex(x).unwrap();
        prop_assert!(ConvexLatticeSet::from_points_strict(rest.points().iter().copied()).is_ok());
        prop_assert_eq!(rest.len() + 1, s.len());
    }

    #[test]
    fn edges_turn_left_and_close(s in shape()) {
        prop_assume!(!s.has_zero_area());
        let edges = s.boundary_edges();
        let sum = edges.iter().fold(LatticePoint::ORIGIN, |acc, e| acc + (e.end - e.start));
        prop_assert_eq!(sum, LatticePoint::ORIGIN);
        for (a, b) in edges.iter().zip(edges.iter().cycle().skip(1)) {
            prop_assert!((a.end - a.start).cross(b.end - b.start) > 0);
        }
    }

    #[test]
    fn line_counts_sum_to_size(s in shape(), l in line()) {
        let total: usize = s.line_lattice_count(&l).iter().map(|&(_, c)| c).sum();
        prop_assert_eq!(total, s.len());
        prop_assert_eq!(l.antiparallel().antiparallel(), l);
    }

    #[test]
    fn translation_action_law(eta in periodic(), u in vector(), v in vector()) {
        let a = eta.translate(u + v);
        let b = eta.translate(u).translate(v);
        for c in ConvexLatticeSet::rectangle(5, 5).points() {
            prop_assert_eq!(a.evaluate(*c).unwrap(), b.evaluate(*c).unwrap());
        }
    }

    #[test]
    fn orbit_size_divides_domain(eta in periodic()) {
        let Source::Periodic(g) = eta.source() else { unreachable!() };
        prop_assert_eq!((g.width() * g.height()) % eta.orbit().unwrap().len(), 0);
    }

    #[test]
    fn restrict_translate_coherence(eta in periodic(), s in shape(), u in vector()) {
        prop_assert_eq!(
            eta.restrict_set(&s, u).unwrap(),
            eta.translate(u).restrict_set(&s, LatticePoint::ORIGIN).unwrap()
        );
    }

    #[test]
    fn unimodular_invariance(eta in periodic(), s in shape(), m in unimodular()) {
        let image = ConvexLatticeSet::convex_hull(s.points().iter().map(|&c| m.apply(c))).unwrap();
        prop_assert_eq!(image.len(), s.len());
        prop_assert_eq!(p_of(&eta.apply_unimodular(&m), &image), p_of(&eta, &s));
    }

    #[test]
    fn complexity_invariances(eta in periodic(), s in shape(), v in vector()) {
        let r = complexity(&eta, &s).unwrap();
        prop_assert_eq!(r.d, r.p as i64 - s.len() as i64);
        prop_assert_eq!(p_of(&eta, &s.translate(v)), r.p);
        for alpha in eta.orbit().unwrap() {
            prop_assert_eq!(p_of(&alpha, &s), r.p);
        }
        for x in s.vertices() {
            if s.len() > 1 {
                prop_assert!(p_of(&eta, &s.remove_vertex(*x).unwrap()) <= r.p);
            }
        }
    }

    #[test]
    fn fan_fibers_sum_to_host(eta in periodic(), s in shape(), i in any::<prop::sample::Index>()) {
        prop_assume!(s.len() > 1);
        let inner = s.remove_vertex(*i.get(s.vertices())).unwrap();
        let fan = extension_fan(&eta, &inner, &s).unwrap();
        prop_assert!(fan.fibers.iter().all(|f| !f.extensions.is_empty()));
        prop_assert_eq!(fan.fiber_sizes().iter().sum::<usize>(), p_of(&eta, &s));
    }

    #[test]
    fn vertex_removal_discrepancy(eta in periodic(), s in shape(), i in any::<prop::sample::Index>()) {
        prop_assume!(s.len() > 1);
        let x = *i.get(s.vertices());
        // errors only on a violated invariant
        let step = discrepancy_step(&eta, &s, x).unwrap();
        prop_assert_eq!(step.generated, is_generated(&eta, &s, x).unwrap());
    }

    #[test]
    fn generating_sets_transfer(eta in periodic(), v in vector()) {
        let n = (2..=4).find(|&n| rect_complexity(&eta, n, 3).unwrap().p <= 3 * n);
        prop_assume!(n.is_some());
        let search = find_generating_set(&eta, n.unwrap(), 3, SearchMode::Exhaustive, 24).unwrap();
        let g = search.found().unwrap();
        prop_assert!(g.discrepancy <= 0);
        prop_assert!(generates(&eta, &g.set));
        prop_assert!(generates(&eta, &g.set.translate(v)));
        for alpha in eta.orbit().unwrap() {
            prop_assert!(generates(&alpha, &g.set));
        }
        for sub in g.set.convex_subsets() {
            if sub.len() < g.set.len() {
                prop_assert!(complexity(&eta, &sub).unwrap().d > g.discrepancy);
            }
        }
    }

    #[test]
    fn period_lattice_vectors_are_periods(eta in periodic()) {
        let lattice = period_lattice(&eta).unwrap();
        let region = Region::rect(p(-3, -2), 9, 9);
        for &g in &lattice.generators {
            prop_assert!(is_periodic_on_region(&eta, &region, g).unwrap().holds);
        }
    }

    #[test]
    fn horizontal_period_factorial_bound(eta in periodic()) {
        let hp = horizontal_period(&eta).unwrap();
        for n in 1..=6usize {
            if rect_complexity(&eta, n, 1).unwrap().p <= n {
                prop_assert!(hp <= (1..=n).product::<usize>(), "period {} for n = {}", hp, n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balanced_sets_validate(eta in periodic(), l in line()) {
        let n = (2..=6).find(|&n| rect_complexity(&eta, n, 3).unwrap().p <= 3 * n);
        prop_assume!(n.is_some());
        if let BalancedSearch::Found { set, .. } = find_balanced_set(&eta, &l, n.unwrap()).unwrap() {
            let cert = is_balanced(&eta, &set, &l).unwrap();
            prop_assert!(cert.balanced());
            prop_assert!(strip_period_bound_check(&eta, &cert).unwrap().passed());
        }
    }

    #[test]
    fn witnesses_replay_and_shrink(eta in periodic(), m in unimodular()) {
        let f = fibonacci_lift(120, LiftRule::X).apply_unimodular(&m);
        for target in [eta, f] {
            let c = census(&target, 4, 4, 5).unwrap();
            for l in c.lines.iter().filter(|l| l.witnessed) {
                for v in [&l.line, &l.forward, &l.backward] {
                    if let Some(w) = &v.witness {
                        prop_assert!(w.replay(&target).unwrap());
                    }
                }
                if l.line.witnessed() && l.line.radius > 1 {
                    let dl = DirectedLine::new(l.direction);
                    let smaller = line_nonexpansive_at_scale(&target, &dl, l.line.radius - 1, l.line.extent).unwrap();
                    prop_assert!(smaller.witnessed());
                }
            }
        }
    }

    #[test]
    fn census_is_recoordinatization_invariant(eta in periodic(), m in unimodular()) {
        let a = census(&eta, 4, 8, 8).unwrap();
        let b = census(&eta.apply_unimodular(&m), 4, 8, 8).unwrap();
        prop_assert_eq!(a.witnessed_lines, 0);
        prop_assert_eq!(b.witnessed_lines, 0);
    }
}

#[test]
fn window_counts_grow_with_the_window() {
    let (small, large) = (thue_morse_2d(4), thue_morse_2d(5));
    let shapes: BTreeSet<(usize, usize)> = (1..=5).flat_map(|n| (1..=3).map(move |k| (n, k))).collect();
    for (n, k) in shapes {
        let a = rect_complexity(&small, n, k).unwrap().p;
        let b = rect_complexity(&large, n, k).unwrap().p;
        assert!(a <= b, "R_({n},{k}): {a} > {b}");
    }
    assert_eq!(small.enlarged().unwrap(), large);
}

#[test]
fn census_directions_follow_the_shear() {
    let eta = fibonacci_lift(233, LiftRule::X);
    let m = Unimodular::new([[1, 1], [0, 1]]).unwrap();
    let sheared = eta.apply_unimodular(&m);
    let before = census(&eta, 6, 6, 6).unwrap();
    let after = census(&sheared, 6, 6, 6).unwrap();
    assert_eq!(before.witnessed_lines, 1);
    assert_eq!(after.witnessed_lines, 1);
    let d = after.lines.iter().find(|l| l.witnessed).unwrap().direction;
    assert_eq!(d.undirected(), m.apply_direction(Direction::NORTH).undirected());
}
