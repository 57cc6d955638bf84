//! Fixtures shared by the benchmarks.

use alarmtaxis::{Domain, Field, ModelParams, SimState, Triple};

/// 1D grids of `n` cells and 2D grids of `n × n` cells on a side-10 box.
pub fn domain(dim: usize, n: usize) -> Domain {
    match dim {
        1 => Domain::interval(10.0, n).expect("valid interval"),
        _ => Domain::rectangle(10.0, 10.0, n, n).expect("valid rectangle"),
    }
}

/// Smooth positive profile around `base` with amplitude `0.3·base`.
pub fn wavy(domain: Domain, base: f64, phase: f64) -> Field {
    Field::from_fn(domain, |x, y| base * (1.0 + 0.3 * (0.7 * x + 0.4 * y + phase).sin()))
        .expect("finite profile")
}

/// Perturbed coexistence state of the food-chain model with `b1 = b2 = 1`.
pub fn state(domain: Domain) -> SimState {
    let star = Triple::new(2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0);
    SimState::new(
        0.0,
        wavy(domain, star.u, 0.0),
        wavy(domain, star.v, 1.0),
        wavy(domain, star.w, 2.0),
    )
    .expect("matching domains")
}

pub fn params() -> ModelParams {
    ModelParams::food_chain(1.0, 1.0).with_taxis(0.5, 0.1)
}
