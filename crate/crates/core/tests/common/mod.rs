//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's Beta, Gamma or quadrature code.
#![allow(dead_code)]

use dhilbert::measure::{Density, Measure};
use dhilbert::spaces::CoefficientFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 7/15-point Gauss–Kronrod panel: (Kronrod value, |Kronrod − Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to relative
/// tolerance `rel` by global bisection of the worst panel.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    let mut panels = vec![(a, b, gk15(f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= rel * total.abs() {
            return total;
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gk15(f, lo, mid)));
        panels.push((mid, hi, gk15(f, mid, hi)));
    }
    panels.iter().map(|p| p.2 .0).sum()
}

/// `∫_0^1 t^n scale t^a (1-t)^b dt`. The map `t = 1 - w^(1/(b+1))` removes
/// the endpoint factor `(1-t)^b`.
pub fn density_moment(d: &Density, n: usize) -> f64 {
    let e = 1.0 / (d.b + 1.0);
    let f = |w: f64| {
        let t = 1.0 - w.powf(e);
        t.powf(n as f64 + d.a)
    };
    d.scale * e * adaptive(&f, 0.0, 1.0, 1e-13)
}

pub fn measure_moment(m: &Measure, n: usize) -> f64 {
    let atoms: f64 = m.atoms().iter().map(|a| a.c * a.t.powi(n as i32)).sum();
    atoms + m.densities().iter().map(|d| density_moment(d, n)).sum::<f64>()
}

/// Density families used throughout the tests.
pub fn density_corpus() -> Vec<Density> {
    [
        (0.0, 0.0, 1.0),
        (0.0, 1.0, 1.0),
        (0.0, 0.5, 1.0),
        (0.0, 1.5, 1.0),
        (0.0, -0.5, 2.0),
        (0.3, -0.5, 1.0),
        (2.0, 3.0, 0.5),
        (1.5, 0.25, 3.0),
        (0.0, -0.9, 1.0),
        (4.0, 0.0, 1.0),
    ]
    .into_iter()
    .map(|(a, b, scale)| Density { a, b, scale })
    .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coefficients drawn uniformly from `[-1, 1)`.
pub fn random_function(rng: &mut ChaCha8Rng, len: usize) -> CoefficientFunction {
    CoefficientFunction::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[test]
fn kronrod_oracle_sanity() {
    // ∫_0^π sin = 2, ∫_0^1 x^{-1/2} = 2
    assert!(rel_err(adaptive(&f64::sin, 0.0, std::f64::consts::PI, 1e-14), 2.0) < 1e-13);
    assert!(rel_err(adaptive(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10), 2.0) < 1e-8);
}
