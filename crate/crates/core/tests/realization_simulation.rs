//! Generating series of a polynomial realization against direct ODE
//! integration of the same system.

use fliess_core::fliess::{fliess_eval, realization_to_series, InputSignal, PolynomialRealization};
use fliess_core::Series;

fn check(text: &str, trunc: usize, horizon: f64, tol: f64) {
    let r = PolynomialRealization::parse(text).unwrap();
    let u = InputSignal::from_fn(0.0, horizon, 1025, r.m(), |t| {
        (1..=r.m()).map(|i| (20.0 * i as f64 * t).sin()).collect()
    })
    .unwrap();
    let series: Series<f64> = realization_to_series(&r, trunc)
        .unwrap()
        .map(|p| num_traits::ToPrimitive::to_f64(&p.as_constant().unwrap()).unwrap());
    let y_series = fliess_eval(&series, &u, horizon).unwrap().y;
    let y_ode = r.simulate(&[], &u, 8).unwrap();
    for (j, ys) in y_series.iter().enumerate() {
        let y = *y_ode[j].last().unwrap();
        assert!((ys - y).abs() <= tol, "output {j}: series {ys} vs ode {y}");
    }
}

#[test]
fn cubic_siso() {
    check(
        "state z\ng0: -z + z^3\ng1: 1 - z^2\nh: z + z^2\nz0: 1/2",
        6,
        0.05,
        1e-7,
    );
}

#[test]
fn two_states_two_inputs() {
    check(
        "state z w\ng0: -w; z*w\ng1: 1; z^2\ng2: w; -1\nh: z; z*w\nz0: 1/5; -1/3",
        5,
        0.05,
        1e-6,
    );
}
