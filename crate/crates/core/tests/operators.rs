use alarmtaxis::grid::{gradient_centered, laplacian_neumann, Domain, Field};
use alarmtaxis::model::{reaction_terms, taxis_velocity_w, ModelParams};
use alarmtaxis::steady_states::catalog;
use proptest::prelude::*;

fn product_gradient_error(nx: usize) -> f64 {
    let l = 2.0;
    let d = Domain::interval(l, nx).unwrap();
    let u = Field::from_fn(d, |x, _| 1.0 + 0.5 * (std::f64::consts::PI * x / l).cos()).unwrap();
    let v = Field::from_fn(d, |x, _| 2.0 + (2.0 * std::f64::consts::PI * x / l).cos()).unwrap();
    let p = ModelParams::default().with_taxis(0.0, 1.5);
    let vel = taxis_velocity_w(u.values(), v.values(), &gradient_centered(&u), &gradient_centered(&v), &p).unwrap();
    let uv = Field::new(d, u.values().iter().zip(v.values()).map(|(a, b)| a * b).collect()).unwrap();
    let direct = gradient_centered(&uv);
    vel.x
        .iter()
        .zip(&direct.x)
        .map(|(a, b)| (a - 1.5 * b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn alarm_velocity_is_gradient_of_product_to_second_order() {
    let errors: Vec<f64> = [32, 64, 128, 256].iter().map(|&n| product_gradient_error(n)).collect();
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.9, "{errors:?}");
    }
}

#[test]
fn laplacian_order_in_two_dimensions() {
    let (lx, ly) = (2.0, 3.0);
    let kx = std::f64::consts::PI / lx;
    let ky = std::f64::consts::PI / ly;
    let mut errors = Vec::new();
    for n in [16, 32, 64] {
        let d = Domain::rectangle(lx, ly, n, n).unwrap();
        let f = Field::from_fn(d, |x, y| (kx * x).cos() * (ky * y).cos()).unwrap();
        let lap = laplacian_neumann(&f, 0.7);
        let err = d
            .centers()
            .zip(lap.values())
            .map(|((x, y), l)| (l + 0.7 * (kx * kx + ky * ky) * (kx * x).cos() * (ky * y).cos()).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() > 1.9, "{errors:?}");
    }
}

#[test]
fn gradient_of_linear_profile() {
    let d = Domain::interval(1.0, 10).unwrap();
    let f = Field::from_fn(d, |x, _| x).unwrap();
    let g = gradient_centered(&f);
    for i in 1..9 {
        assert!((g.x[i] - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn kinetics_vanish_on_catalog(b1 in 0.01f64..3.0, b2 in 0.01f64..3.0, b3 in 0.0f64..0.05, guild in any::<bool>()) {
        let p = if guild { ModelParams::intraguild(b1, b2, b3.max(1e-4)) } else { ModelParams::food_chain(b1, b2) };
        for s in catalog(&p).unwrap() {
            if !(s.real && s.u >= 0.0 && s.v >= 0.0 && s.w >= 0.0) {
                continue;
            }
            let k = reaction_terms(s.u, s.v, s.w, &p).unwrap();
            let scale = 1.0 + s.u.abs().max(s.v.abs()).max(s.w.abs()).powi(2) * (1.0 + b1 + b2);
            prop_assert!(k.f.abs().max(k.g.abs()).max(k.h.abs()) <= 1e-12 * scale, "{} {:?}", s.label, k);
        }
    }
}
