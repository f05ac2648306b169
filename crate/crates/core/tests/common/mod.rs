//! Reference computations shared by the integration tests. Nothing here calls
//! into the solver or spectrum code under test.
#![allow(dead_code)]

use std::f64::consts::PI;

use qgtile::potential::Potential;
use qgtile::tiling::TilingName;

/// Sort and merge overlapping or touching intervals.
pub fn merge(mut v: Vec<(f64, f64)>, touch: f64) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo <= last.1 + touch => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// The q = 0 band lists written out as unions over k of intervals in rho a,
/// squared and scaled by 1/a^2, for k = 0..=k_max. Merged.
pub fn arccos_bands(name: TilingName, a: f64, k_max: usize) -> Vec<(f64, f64)> {
    let sq = |r: f64| (r / a).powi(2);
    let mut v = Vec::new();
    let two_sided = |xi: f64, v: &mut Vec<(f64, f64)>| {
        for k in 0..=k_max {
            let k = k as f64;
            v.push((sq(2.0 * k * PI), sq(xi + 2.0 * k * PI)));
            v.push((sq(2.0 * (k + 1.0) * PI - xi), sq(2.0 * (k + 1.0) * PI)));
        }
    };
    match name {
        TilingName::TrH => {
            let (x1, x2) = ((1.0f64 / 3.0).acos(), (-2.0f64 / 3.0).acos());
            for k in 0..=k_max {
                let k = k as f64;
                v.push((sq(2.0 * (k + 1.0) * PI - x1), sq(2.0 * (k + 1.0) * PI + x1)));
                v.push((sq((4.0 * k + 1.0) * PI / 2.0), sq(2.0 * k * PI + x2)));
                v.push((
                    sq(2.0 * (k + 1.0) * PI - x2),
                    sq((4.0 * k + 3.0) * PI / 2.0),
                ));
            }
            v.push((0.0, sq(x1)));
        }
        TilingName::Ss => two_sided((-0.6f64).acos(), &mut v),
        TilingName::Rth => two_sided((-0.75f64).acos(), &mut v),
        TilingName::Sth => two_sided((-(1.0 + 3f64.sqrt()) / 5.0).acos(), &mut v),
        TilingName::TrTh => {
            let (x1, x2) = ((3f64.sqrt() / 3.0).acos(), (1.0f64 / 3.0).acos());
            for k in 0..=k_max {
                let k = k as f64;
                v.push((sq((k + 1.0) * PI - x1), sq((k + 1.0) * PI + x1)));
                v.push((sq(k * PI + x2), sq((k + 1.0) * PI - x2)));
            }
            v.push((0.0, sq(x1)));
        }
        _ => panic!("no q = 0 band list for {name}"),
    }
    merge(v, 1e-12)
}

/// Clip to [0, hi] and drop what falls outside.
pub fn clip(v: &[(f64, f64)], hi: f64) -> Vec<(f64, f64)> {
    v.iter()
        .filter(|b| b.0 < hi)
        .map(|&(l, h)| (l, h.min(hi)))
        .collect()
}

/// Plain RK4 for y'' = (q - lambda) y from both unit initial conditions,
/// returning (C, S, C', S') at x = a.
pub fn rk4_endpoint(q: &Potential, lambda: f64, n: usize) -> [f64; 4] {
    let a = q.a;
    let h = a / n as f64;
    let f = |x: f64, y: [f64; 4]| {
        let w = q.value(x) - lambda;
        [y[1], w * y[0], y[3], w * y[2]]
    };
    let mut y = [1.0, 0.0, 0.0, 1.0];
    for i in 0..n {
        let x = i as f64 * h;
        let k1 = f(x, y);
        let k2 = f(x + h / 2.0, std::array::from_fn(|j| y[j] + h / 2.0 * k1[j]));
        let k3 = f(x + h / 2.0, std::array::from_fn(|j| y[j] + h / 2.0 * k2[j]));
        let k4 = f(x + h, std::array::from_fn(|j| y[j] + h * k3[j]));
        y = std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
    }
    [y[0], y[2], y[1], y[3]]
}

/// Richardson-extrapolated RK4 endpoint values from n and 2n steps.
pub fn reference_endpoint(q: &Potential, lambda: f64, n: usize) -> [f64; 4] {
    let c = rk4_endpoint(q, lambda, n);
    let f = rk4_endpoint(q, lambda, 2 * n);
    std::array::from_fn(|j| f[j] + (f[j] - c[j]) / 15.0)
}

/// Bisect lambda in [lo, hi] for S'(lambda) = level with the reference integrator.
pub fn reference_level(q: &Potential, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = |l: f64| reference_endpoint(q, l, 2000)[3] - level;
    let mut glo = g(lo);
    assert!(
        glo * g(hi) <= 0.0,
        "level {level} not bracketed by [{lo}, {hi}]"
    );
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        let gm = g(m);
        if (gm < 0.0) == (glo < 0.0) {
            lo = m;
            glo = gm;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}
