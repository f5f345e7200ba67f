//! Structural properties of the max-product operator.

use proptest::prelude::*;
use qbmax_core::operators::uniform_grid;
use qbmax_core::{
    corollary1_bound, linear_q_bernstein, Constant, FnFunction, MaxProductOperator, ModulusGrid,
    PiecewiseLinear, QParam, Registered, TestFunction,
};

fn piecewise() -> impl Strategy<Value = PiecewiseLinear> {
    prop::collection::vec(0.001f64..0.999, 0..6).prop_flat_map(|mut inner| {
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        let mut knots = vec![0.0];
        knots.extend(inner);
        knots.push(1.0);
        let len = knots.len();
        prop::collection::vec(0.0f64..5.0, len)
            .prop_map(move |values| PiecewiseLinear::new(knots.clone(), values).unwrap())
    })
}

fn q_strategy() -> impl Strategy<Value = QParam> {
    prop_oneof![
        Just(0.5),
        Just(0.9),
        Just(0.95),
        Just(0.99),
        Just(1.0),
        0.3f64..1.0
    ]
    .prop_map(|q| QParam::new(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone(f in piecewise(), h in piecewise(), n in 1usize..40, q in q_strategy()) {
        let g = f.sum(&h);
        let op = MaxProductOperator::new(n, q).unwrap();
        let (sf, sg) = (op.sample(&f).unwrap(), op.sample(&g).unwrap());
        for x in uniform_grid(101).unwrap() {
            let bf = op.apply(&sf, x).unwrap().value;
            let bg = op.apply(&sg, x).unwrap().value;
            prop_assert!(bf <= bg + 1e-12 * bg.max(1.0), "x={x}: {bf} > {bg}");
        }
    }

    #[test]
    fn subadditive(f in piecewise(), g in piecewise(), n in 1usize..40, q in q_strategy()) {
        let op = MaxProductOperator::new(n, q).unwrap();
        let h = f.sum(&g);
        let (sf, sg, sh) = (op.sample(&f).unwrap(), op.sample(&g).unwrap(), op.sample(&h).unwrap());
        for x in uniform_grid(101).unwrap() {
            let sum = op.apply(&sf, x).unwrap().value + op.apply(&sg, x).unwrap().value;
            let joint = op.apply(&sh, x).unwrap().value;
            prop_assert!(joint <= sum + 1e-12 * sum.max(1.0), "x={x}: {joint} > {sum}");
        }
    }

    #[test]
    fn positively_homogeneous(
        f in piecewise(),
        lambda in 0.01f64..100.0,
        n in 1usize..40,
        q in q_strategy(),
    ) {
        let scaled = FnFunction::new("scaled", |t| lambda * f.eval(t));
        let op = MaxProductOperator::new(n, q).unwrap();
        let (sf, ss) = (op.sample(&f).unwrap(), op.sample(&scaled).unwrap());
        for x in uniform_grid(51).unwrap() {
            let a = op.apply(&sf, x).unwrap();
            let b = op.apply(&ss, x).unwrap();
            let want = lambda * a.value;
            prop_assert!((b.value - want).abs() <= 1e-13 * want.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn reproduces_constants_and_left_endpoint(
        f in piecewise(),
        c in prop_oneof![Just(0.0), Just(1.0), Just(7.5), 0.0f64..50.0],
        n in 1usize..60,
        q in q_strategy(),
    ) {
        let op = MaxProductOperator::new(n, q).unwrap();
        let sc = op.sample(&Constant(c)).unwrap();
        for x in uniform_grid(51).unwrap() {
            prop_assert!((op.apply(&sc, x).unwrap().value - c).abs() <= 1e-13 * c.max(1.0));
        }
        prop_assert!((op.evaluate(&f, 0.0).unwrap().value - f.eval(0.0)).abs() <= 1e-13);
    }

    #[test]
    fn partition_of_unity(n in 1usize..120, q in q_strategy(), x in 0.0f64..=1.0) {
        let s = linear_q_bernstein(&Registered::Const1, n, q, x).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-12, "{s}");
    }

    #[test]
    fn delta_below_farthest_node(n in 1usize..80, q in q_strategy(), x in 0.0f64..=1.0) {
        let op = MaxProductOperator::new(n, q).unwrap();
        let farthest = op.basis().nodes().iter().map(|t| (t - x).abs()).fold(0.0, f64::max);
        let d = op.delta_n(x).unwrap();
        prop_assert!(d >= 0.0 && d <= farthest + 1e-15, "{d} > {farthest}");
    }
}

#[test]
fn argmax_numerator_unchanged_by_scaling() {
    let f = PiecewiseLinear::new(vec![0.0, 0.3, 0.7, 1.0], vec![0.2, 1.4, 0.5, 2.0]).unwrap();
    let scaled = FnFunction::new("scaled", |t| 3.5 * f.eval(t));
    for q in [0.9, 0.99, 1.0] {
        let op = MaxProductOperator::new(25, QParam::new(q).unwrap()).unwrap();
        let (sf, ss) = (op.sample(&f).unwrap(), op.sample(&scaled).unwrap());
        for x in uniform_grid(201).unwrap() {
            assert_eq!(
                op.apply(&sf, x).unwrap().argmax_numerator,
                op.apply(&ss, x).unwrap().argmax_numerator
            );
        }
    }
}

#[test]
fn corollary1_pointwise_over_registry() {
    let grid_size = 401;
    for f in Registered::ALL {
        let omega = ModulusGrid::new(&f, grid_size).unwrap();
        let slack = 2.0 * omega.resolution_slack();
        for q in [0.9, 0.95, 0.99] {
            let q = QParam::new(q).unwrap();
            for n in [1, 2, 5, 10, 20, 35, 50] {
                let op = MaxProductOperator::new(n, q).unwrap();
                let samples = op.sample(&f).unwrap();
                for x in uniform_grid(grid_size).unwrap() {
                    let err = (op.apply(&samples, x).unwrap().value - f.eval(x)).abs();
                    let delta = op.delta_n(x).unwrap();
                    let bound = 2.0 * (omega.omega(delta).unwrap() + slack);
                    assert!(
                        err <= bound + 1e-12,
                        "{} n={n} x={x}: {err} > {bound}",
                        f.name()
                    );
                }
            }
        }
    }
    let q = QParam::new(0.9).unwrap();
    let direct = corollary1_bound(&Registered::Tent, 10, q, 0.3, grid_size).unwrap();
    assert!(direct > 0.0);
}
