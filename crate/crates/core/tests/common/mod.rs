//! Independent oracles. Nothing here calls the spectral machinery under test.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let pair = f(c - x) + f(c + x);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod by recursive bisection.
pub fn adaptive_gk(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth > 40 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, tol / 2.0, depth + 1) + recurse(f, m, b, tol / 2.0, depth + 1)
    }
    recurse(f, a, b, tol, 0)
}

/// `∫_{-∞}^{∞} cos(τu)/(1+u²) du` by panel-wise adaptive quadrature on
/// `[0, L]` plus an integration-by-parts tail with `L` a whole number of
/// periods.
pub fn lorentzian_cosine_transform(tau: f64) -> f64 {
    let tau = tau.abs();
    let g = |u: f64| 1.0 / (1.0 + u * u);
    if tau == 0.0 {
        let l: f64 = 1e3;
        let body: f64 = (0..1000)
            .map(|i| adaptive_gk(&g, i as f64, (i + 1) as f64, 1e-15))
            .sum();
        return 2.0 * (body + (1.0 / l).atan());
    }
    let period = 2.0 * PI / tau;
    let panels = ((1e3f64).max(1e3 / tau) / period).ceil() as usize;
    let l = panels as f64 * period;
    let f = |u: f64| (tau * u).cos() * g(u);
    let body: f64 = (0..panels)
        .map(|i| adaptive_gk(&f, i as f64 * period, (i + 1) as f64 * period, 1e-15))
        .sum();
    // sin(τL) = 0 and cos(τL) = 1 at a whole number of periods
    let d1 = -2.0 * l / (1.0 + l * l).powi(2);
    let d3 = 24.0 * l * (1.0 - l * l) / (1.0 + l * l).powi(4);
    let tail = -d1 / (tau * tau) + d3 / tau.powi(4);
    2.0 * (body + tail)
}

/// Adaptive Dormand–Prince 5(4) integration of `ẏ = f(t, y)` from `t0` to
/// `t1`.
pub fn dormand_prince(
    f: &impl Fn(f64, &DVector<f64>) -> DVector<f64>,
    t0: f64,
    t1: f64,
    y0: DVector<f64>,
    tol: f64,
) -> DVector<f64> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut t = t0;
    let mut y = y0;
    let mut h = 1e-3_f64.min(t1 - t0);
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        for s in 0..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                ys += kj * (h * A[s][j]);
            }
            k.push(f(t + C[s] * h, &ys));
        }
        let mut high = y.clone();
        let mut low = y.clone();
        for s in 0..7 {
            high += &k[s] * (h * B5[s]);
            low += &k[s] * (h * B4[s]);
        }
        let scale = 1.0 + y.amax().max(high.amax());
        let err = (&high - &low).amax() / scale;
        if err <= tol {
            t += h;
            y = high;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * (tol / err).powf(0.2) };
        h *= factor.clamp(0.2, 5.0);
    }
    y
}

/// Hamilton's equations with a dense coupling matrix, state `(p, q)`.
pub fn hamilton_rhs(a: &DMatrix<f64>) -> impl Fn(f64, &DVector<f64>) -> DVector<f64> + '_ {
    move |_t, y| {
        let n = a.nrows();
        let p = y.rows(0, n);
        let q = y.rows(n, n);
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(-(a * q)));
        out.rows_mut(n, n).copy_from(&p);
        out
    }
}

/// `v̂(k) = Σ_i e^{-2πi·ik/(2N+1)} v_i` by direct double loop.
pub fn naive_forward(v: &[Complex64]) -> Vec<Complex64> {
    let len = v.len();
    let n = (len / 2) as i64;
    (0..len as i64)
        .map(|kk| {
            let k = kk - n;
            v.iter()
                .enumerate()
                .map(|(ii, x)| {
                    let i = ii as i64 - n;
                    let r = (i * k).rem_euclid(len as i64) as f64;
                    x * Complex64::from_polar(1.0, -2.0 * PI * r / len as f64)
                })
                .sum()
        })
        .collect()
}
