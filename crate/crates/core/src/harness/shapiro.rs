//! Shapiro-Wilk W test with Royston's (1992, 1995) approximations for the
//! coefficients and the p-value, valid for `3 <= n <= 5000`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 3;
pub const MAX_SAMPLES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p: f64,
}

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.5440, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];
const SMALL: f64 = 1e-19;

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

pub fn shapiro_wilk(sample: &[f64]) -> Result<ShapiroWilk> {
    let n = sample.len();
    if !(MIN_SAMPLES..=MAX_SAMPLES).contains(&n) {
        return Err(Error::Domain(format!(
            "Shapiro-Wilk needs {MIN_SAMPLES}..={MAX_SAMPLES} observations, got {n}"
        )));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("Shapiro-Wilk sample has a non-finite value"));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let median = x[n / 2];
    x.iter_mut().for_each(|v| *v -= median);
    let range = x[n - 1] - x[0];
    if range < SMALL {
        return Err(Error::data(
            "Shapiro-Wilk is undefined for a constant sample",
        ));
    }

    let half = coefficients(n);
    // Antisymmetric weight vector in ascending order of x.
    let weight = |i: usize| -> f64 {
        let j = n - 1 - i;
        if i < j {
            -half[i]
        } else if i > j {
            half[j]
        } else {
            0.0
        }
    };

    let an = n as f64;
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let mean_x = xs.iter().sum::<f64>() / an;
    let mean_a = (0..n).map(weight).sum::<f64>() / an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in xs.iter().enumerate() {
        let a = weight(i) - mean_a;
        let dx = xi - mean_x;
        ssa += a * a;
        ssx += dx * dx;
        sax += a * dx;
    }
    // 1 - W, computed so that W close to 1 keeps its precision.
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    if n == 3 {
        let p = (6.0 / PI) * (w.sqrt().asin() - PI / 3.0);
        return Ok(ShapiroWilk {
            w,
            p: p.clamp(0.0, 1.0),
        });
    }

    let y = w1.ln();
    let p = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            SMALL
        } else {
            let y = -(gamma - y).ln();
            let m = poly(&C3, an);
            let s = poly(&C4, an).exp();
            normal_upper_tail((y - m) / s)
        }
    } else {
        let ln_n = an.ln();
        let m = poly(&C5, ln_n);
        let s = poly(&C6, ln_n).exp();
        normal_upper_tail((y - m) / s)
    };
    Ok(ShapiroWilk { w, p })
}

/// The first `n / 2` Shapiro-Wilk coefficients (positive, largest first).
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![FRAC_1_SQRT_2];
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    let (first_scaled, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for i in first_scaled..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Standard normal quantile (Beasley-Springer, AS 111).
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 4] = [
        2.50662823884,
        -18.61500062529,
        41.39119773534,
        -25.44106049637,
    ];
    const B: [f64; 4] = [
        -8.47351093090,
        23.08336743743,
        -21.06224101826,
        3.13082909833,
    ];
    const C: [f64; 4] = [-2.78718931138, -2.29796479134, 4.85014127135, 2.32121276858];
    const D: [f64; 2] = [3.54388924762, 1.63706781897];
    let q = p - 0.5;
    if q.abs() <= 0.42 {
        let r = q * q;
        return q * (((A[3] * r + A[2]) * r + A[1]) * r + A[0])
            / ((((B[3] * r + B[2]) * r + B[1]) * r + B[0]) * r + 1.0);
    }
    let r = if q > 0.0 { 1.0 - p } else { p };
    if r <= 0.0 {
        return 0.0;
    }
    let r = (-r.ln()).sqrt();
    let v = (((C[3] * r + C[2]) * r + C[1]) * r + C[0]) / ((D[1] * r + D[0]) * r + 1.0);
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// `P(Z > z)` for standard normal `Z` (Hill, AS 66).
fn normal_upper_tail(z: f64) -> f64 {
    const LTONE: f64 = 7.0;
    const UTZERO: f64 = 38.0;
    const CON: f64 = 1.28;
    let (x, upper) = if z < 0.0 { (-z, false) } else { (z, true) };
    if x > LTONE && (!upper || x > UTZERO) {
        return if upper { 0.0 } else { 1.0 };
    }
    let y = 0.5 * x * x;
    let tail = if x <= CON {
        0.5 - x
            * (0.398942280444
                - 0.399903438504 * y
                    / (y + 5.75885480458
                        - 29.8213557808
                            / (y + 2.62433121679 + 48.6959930692 / (y + 5.92885724438))))
    } else {
        0.398942280385 * (-y).exp()
            / (x - 3.8052e-8
                + 1.00000615302
                    / (x + 3.98064794e-4
                        + 1.98615381364
                            / (x - 0.151679116635
                                + 5.29330324926
                                    / (x + 4.8385912808
                                        - 15.1508972451
                                            / (x + 0.742380924027
                                                + 30.789933034 / (x + 3.99019417011))))))
    };
    if upper {
        tail
    } else {
        1.0 - tail
    }
}
