mod common;

use common::*;

fn check(s: Suite) {
    match s {
        Ok(summary) => println!("{summary}"),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn smoothing_envelopes_hold() {
    check(smoothing_envelopes(10_000));
}

#[test]
fn penalty_gradient_matches_central_differences() {
    check(penalty_gradient_fd(10, 100, 1e-5));
}

#[test]
fn prox_matches_grid_oracle() {
    check(prox_vs_oracle(1_000, 1e-7));
}

#[test]
fn grid_oracle_sanity() {
    // 100 - t = 0.5 / sqrt(t)
    let t = prox_grid_oracle(100.0, 1.0, 0.5);
    assert!((100.0 - t - 0.5 / t.sqrt()).abs() < 1e-9, "{t}");
    assert_eq!(prox_grid_oracle(0.1, 1.0, 0.5), 0.0);
    assert_eq!(
        prox_grid_oracle(-3.0, 1.0, 0.5),
        -prox_grid_oracle(3.0, 1.0, 0.5)
    );
}

#[test]
fn residual_sandwich_holds() {
    check(residual_sandwich(1_000));
}

#[test]
fn norm_sandwich_holds() {
    check(norm_sandwich(10_000));
}

#[test]
fn npg_descent_holds() {
    check(npg_descent(10));
}
