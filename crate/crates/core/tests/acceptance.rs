use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ensreach::approx::{
    bernstein_apply, bernstein_nodes, cauchy_lipschitz, circle_grid, fejer_poly, fourier_coeffs, grid_segments,
    polynomialize, pole_shift_per_term, rational_approx, RungeOptions, ShiftedSum, ShiftedTerm,
};
use ensreach::ensemble::{eigendecompose_continuous, simulate_continuous_pwc, simulate_discrete, sup_error};
use ensreach::synthesis::{
    hermite_indices, input_from_poly, method_s1, method_s2, method_s2_continuous, SynthesisOptions,
};
use ensreach::{ComplexPolynomial, EnsembleSystem, ParameterGrid, StateFamily, TargetFamily, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn time_limited(pass: bool, elapsed: Duration, limit: f64, detail: String) -> Outcome {
    let secs = elapsed.as_secs_f64();
    Outcome { pass: pass && secs < limit, detail: format!("{detail}; {secs:.2}s (limit {limit}s)") }
}

fn bernstein_bound() -> Outcome {
    let start = Instant::now();
    let n = 1000;
    let values: Vec<C64> = bernstein_nodes(0.0, 1.0, n).iter().map(|x| c((x - 0.5).abs())).collect();
    let measured = (0..=1000)
        .map(|i| {
            let x = i as f64 / 1000.0;
            (bernstein_apply(&values, 0.0, 1.0, x).unwrap() - (x - 0.5).abs()).norm()
        })
        .fold(0.0, f64::max);
    let bound = 2f64.sqrt() * (4.0 * 0.5 + 0.5) * ((n as f64).ln() / n as f64).sqrt();
    time_limited(measured <= bound, start.elapsed(), 5.0, format!("sup error {measured:.4e} <= bound {bound:.4e}"))
}

/// `max |f(a) - f(b)| / |a - b|` over all pairs of a fine circle grid.
fn circle_lipschitz(f: &dyn Fn(C64) -> C64) -> f64 {
    let pts = circle_grid(720);
    let vals: Vec<C64> = pts.iter().map(|z| f(*z)).collect();
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max((vals[i] - vals[j]).norm() / (pts[i] - pts[j]).norm());
        }
    }
    best
}

fn fejer_bound() -> Outcome {
    let start = Instant::now();
    let tent = |z: C64| c(z.arg().abs());
    let pwl = |z: C64| {
        let s = z.arg().rem_euclid(2.0 * PI);
        let knots = [0.0, 0.5 * PI, PI, 1.5 * PI, 2.0 * PI];
        let vals = [0.0, 1.0, -0.5, 0.3, 0.0];
        let j = ((s / (0.5 * PI)) as usize).min(3);
        let t = (s - knots[j]) / (0.5 * PI);
        c(vals[j] * (1.0 - t) + vals[j + 1] * t)
    };
    let funcs: [(&str, &dyn Fn(C64) -> C64); 3] = [("Re z", &|z: C64| c(z.re)), ("|arg z|", &tent), ("piecewise linear", &pwl)];
    let mut pass = true;
    let mut worst_ratio: f64 = 0.0;
    for (_, f) in funcs {
        let l = circle_lipschitz(f);
        for n in [50usize, 100, 200] {
            let q = 16 * n;
            let samples: Vec<C64> = circle_grid(q).iter().map(|z| f(*z)).collect();
            let coeffs = fourier_coeffs(&samples, n).unwrap();
            let fp = fejer_poly(&coeffs, n).unwrap();
            let measured = (0..3001)
                .map(|j| {
                    let z = C64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.37) / 3001.0);
                    (fp.eval(z) - f(z)).norm()
                })
                .fold(0.0, f64::max);
            let bound = 2.0 * 2f64.sqrt() * PI * l * (n as f64).ln() / n as f64;
            worst_ratio = worst_ratio.max(measured / bound);
            pass &= measured <= bound;
        }
    }
    time_limited(pass, start.elapsed(), 5.0, format!("9 cases, worst measured/bound = {worst_ratio:.3}"))
}

fn runge_certified_stages() -> Outcome {
    let start = Instant::now();
    let f = |z: C64| (z - 3.0).inv();
    let k: Vec<C64> = (0..201).map(|i| c(-1.0 + 2.0 * i as f64 / 200.0)).collect();
    let validation: Vec<C64> = (0..401).map(|i| c(-1.0 + 2.0 * i as f64 / 400.0)).collect();
    let opts = RungeOptions::default();
    let eps = 0.3;
    let step = eps / 3.0;
    let margin = 2.0;
    let delta = opts.delta_fraction * margin / 2f64.sqrt();
    let segs = grid_segments(&k, margin, delta).unwrap();
    let l_hat = cauchy_lipschitz(&f, &segs, &k);
    let rs = rational_approx(&f, &segs, step, l_hat, opts.caps.pole_cap).unwrap();
    let eta = k.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let shifted = pole_shift_per_term(&rs, &k, opts.shift_radius_factor * eta, step, opts.caps.runge_degree_cap).unwrap();
    let poly = polynomialize(&shifted, &k, step, opts.caps.runge_degree_cap).unwrap();

    let sup = |g: &dyn Fn(C64) -> C64, h: &dyn Fn(C64) -> C64| validation.iter().map(|z| (g(*z) - h(*z)).norm()).fold(0.0, f64::max);
    let e1 = sup(&f, &|z| rs.eval(z));
    let e2 = sup(&|z| rs.eval(z), &|z| shifted.eval(z));
    let e3 = sup(&|z| shifted.eval(z), &|z| poly.eval(z));
    let total = sup(&f, &|z| poly.eval(z));
    let on_segments = rs.terms().iter().all(|(w, _)| {
        segs.segments().iter().any(|(a, b)| {
            let t = ((w - a) * (b - a).conj()).re / (b - a).norm_sqr();
            (-1e-12..=1.0 + 1e-12).contains(&t) && (a + (b - a) * t - w).norm() < 1e-12
        })
    });
    let pass = e1 <= step && e2 <= step && e3 <= step && total <= eps && on_segments;
    time_limited(
        pass,
        start.elapsed(),
        60.0,
        format!(
            "stages {e1:.3e}/{e2:.3e}/{e3:.3e} <= 0.1, total {total:.3e} <= 0.3, {} poles on segments: {on_segments}, degree {}",
            rs.len(),
            poly.degree().unwrap_or(0)
        ),
    )
}

fn companion_system(count: usize) -> (EnsembleSystem, TargetFamily) {
    let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
    let sys = EnsembleSystem::from_fn(grid, |t| {
        (DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), t, c(0.0)]), DMatrix::from_column_slice(2, 1, &[c(0.0), c(1.0)]))
    })
    .unwrap();
    let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_vec(vec![t, c(1.0)])).unwrap();
    (sys, f)
}

fn diagonal_system(shifts: [f64; 2], count: usize) -> (EnsembleSystem, TargetFamily) {
    let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
    let sys = EnsembleSystem::from_fn(grid, |t| {
        (
            DMatrix::from_diagonal(&DVector::from_vec(vec![t + shifts[0], t + shifts[1]])),
            DMatrix::from_element(2, 1, c(1.0)),
        )
    })
    .unwrap();
    let f = TargetFamily::from_fn(sys.grid(), |t| DVector::from_vec(vec![c(1.0), t])).unwrap();
    (sys, f)
}

fn method_s1_end_to_end() -> Outcome {
    let start = Instant::now();
    let (sys, f) = companion_system(201);
    let out = method_s1(&sys, &f, 0.1, &SynthesisOptions::default()).unwrap();
    let (fine, f_fine) = companion_system(402);
    let err = sup_error(&simulate_discrete(&fine, &out.input).unwrap(), &f_fine).unwrap();
    time_limited(err < 0.1, start.elapsed(), 10.0, format!("402-point error {err:.3e} < 0.1, horizon {}", out.input.horizon()))
}

fn method_s2_end_to_end() -> Outcome {
    let start = Instant::now();
    let (sys, f) = diagonal_system([0.0, 3.0], 201);
    let out = method_s2(&sys, &f, 0.2, &SynthesisOptions::default()).unwrap();
    let (fine, f_fine) = diagonal_system([0.0, 3.0], 402);
    let err = sup_error(&simulate_discrete(&fine, &out.input).unwrap(), &f_fine).unwrap();
    let budgets_ok = out.report.budget.iter().all(|b| b.measured <= b.allotted);
    time_limited(
        err < 0.2 && budgets_ok,
        start.elapsed(),
        30.0,
        format!("402-point error {err:.3e} < 0.2, budgets within allotment: {budgets_ok}, horizon {}", out.input.horizon()),
    )
}

fn continuous_end_to_end() -> Outcome {
    let start = Instant::now();
    let eps = 0.3;
    let (sys, f) = diagonal_system([-2.0, -5.0], 201);
    let out = method_s2_continuous(&sys, &f, eps, &SynthesisOptions::default()).unwrap();
    let (fine, f_fine) = diagonal_system([-2.0, -5.0], 402);
    let eig = eigendecompose_continuous(&fine).unwrap();
    let err = sup_error(&simulate_continuous_pwc(&eig, &out.input).unwrap(), &f_fine).unwrap();
    let tau = out.input.tau();
    let p = ComplexPolynomial::new(out.input.values().iter().rev().copied().collect());
    let margin = eig
        .arcs()
        .iter()
        .flatten()
        .map(|l| {
            let x = l * tau;
            let factor = (x.exp() - 1.0) / x;
            (p.eval(x.exp()) * tau * (factor - 1.0)).norm()
        })
        .fold(0.0, f64::max);
    time_limited(
        err < eps && margin <= eps / 2.0,
        start.elapsed(),
        60.0,
        format!("402-point error {err:.3e} < 0.3, exp margin {margin:.3e} <= 0.15 at tau {tau}, N {}", out.input.values().len()),
    )
}

fn random_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn ordering_invariant() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let deg = rng.gen_range(0..=8);
        let count = rng.gen_range(2..=6);
        let grid = ParameterGrid::interval(0.0, 1.0, count).unwrap();
        let sys = EnsembleSystem::from_fn(grid, |_| {
            (DMatrix::from_fn(n, n, |_, _| random_c(&mut rng)), DMatrix::from_fn(n, 1, |_, _| random_c(&mut rng)))
        })
        .unwrap();
        let p = ComplexPolynomial::new((0..=deg).map(|_| random_c(&mut rng)).collect());
        let x = simulate_discrete(&sys, &input_from_poly(&p)).unwrap();
        for i in 0..sys.len() {
            // Σ_j c_j A^j b by explicit powers
            let mut power = sys.b(i).column(0).into_owned();
            let mut expected = DVector::<C64>::zeros(n);
            for j in 0..=deg {
                expected += &power * p.coeff(j);
                power = sys.a(i) * power;
            }
            worst = worst.max((&x.values()[i] - &expected).norm() / expected.norm().max(1.0));
        }
    }
    time_limited(worst <= 1e-9, start.elapsed(), 10.0, format!("100 instances, worst relative deviation {worst:.2e} <= 1e-9"))
}

fn rank(cols: &[DVector<C64>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = DMatrix::from_columns(cols);
    let sv = m.svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|s| **s > 1e-9 * top).count()
}

fn hermite() -> Outcome {
    let start = Instant::now();
    let a = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let e1 = DMatrix::from_column_slice(2, 1, &[c(1.0), c(0.0)]);
    let e2 = DMatrix::from_column_slice(2, 1, &[c(0.0), c(1.0)]);
    let examples = hermite_indices(&a, &DMatrix::identity(2, 2)).unwrap().indices == vec![1, 1]
        && hermite_indices(&a, &e1).unwrap().indices == vec![1]
        && hermite_indices(&a, &e2).unwrap().indices == vec![2];

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut random_ok = true;
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=3);
        let a = DMatrix::from_fn(n, n, |_, _| random_c(&mut rng));
        let b = DMatrix::from_fn(n, m, |_, _| random_c(&mut rng));
        let h = hermite_indices(&a, &b).unwrap();
        let cols: Vec<DVector<C64>> = h
            .selected
            .iter()
            .map(|&(i, j)| {
                let mut v = b.column(i).into_owned();
                for _ in 0..j {
                    v = &a * v;
                }
                v
            })
            .collect();
        random_ok &= h.indices.iter().sum::<usize>() == n && rank(&cols) == cols.len();
    }
    time_limited(examples && random_ok, start.elapsed(), 10.0, format!("worked examples: {examples}, 50 random pairs: {random_ok}"))
}

fn oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    // sup_error against an exhaustive scan
    let mut sup_ok = true;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=30);
        let x: Vec<DVector<C64>> = (0..m).map(|_| DVector::from_fn(n, |_, _| random_c(&mut rng))).collect();
        let f: Vec<DVector<C64>> = (0..m).map(|_| DVector::from_fn(n, |_, _| random_c(&mut rng))).collect();
        let mut scan: f64 = 0.0;
        for (xi, fi) in x.iter().zip(&f) {
            let s: f64 = xi.iter().zip(fi.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
            scan = scan.max(s.sqrt());
        }
        let got = sup_error(&StateFamily::new(x).unwrap(), &TargetFamily::new(f).unwrap()).unwrap();
        sup_ok &= (got - scan).abs() <= 1e-14 * scan.max(1.0);
    }

    // fourier_coeffs recovers a random trigonometric polynomial exactly
    let band = 6;
    let truth: Vec<C64> = (0..2 * band - 1).map(|_| random_c(&mut rng)).collect();
    let g = |z: C64| (0..2 * band - 1).map(|j| truth[j] * z.powi(j as i32 - (band as i32 - 1))).sum::<C64>();
    let samples: Vec<C64> = circle_grid(8 * band).iter().map(|z| g(*z)).collect();
    let coeffs = fourier_coeffs(&samples, band).unwrap();
    let fourier_err = coeffs.iter().zip(&truth).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    // polynomialize against contour quadrature of the shifted sum
    let shifted = ShiftedSum {
        terms: vec![
            ShiftedTerm { center: C64::new(3.5, 1.0), coeffs: vec![c(0.4), C64::new(0.1, -0.2), c(0.05)] },
            ShiftedTerm { center: C64::new(-4.0, 0.0), coeffs: vec![C64::new(0.0, 0.3)] },
        ],
    };
    let k: Vec<C64> = (0..11).map(|i| c(-1.0 + 0.2 * i as f64)).collect();
    let poly = polynomialize(&shifted, &k, 1e-10, 10_000).unwrap();
    let r = 1.5;
    let nodes = 2048;
    let mut quad_err: f64 = 0.0;
    for s in 0..12 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..nodes {
            let xi = C64::from_polar(r, 2.0 * PI * j as f64 / nodes as f64);
            acc += shifted.eval(xi) / xi.powi(s as i32);
        }
        acc /= nodes as f64;
        quad_err = quad_err.max((acc - poly.coeff(s)).norm());
    }

    let pass = sup_ok && fourier_err <= 1e-12 && quad_err <= 1e-8;
    time_limited(
        pass,
        start.elapsed(),
        10.0,
        format!("sup_error scan: {sup_ok}, fourier {fourier_err:.1e} <= 1e-12, polynomialize {quad_err:.1e} <= 1e-8"),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("bernstein bound", bernstein_bound),
        ("fejer bound", fejer_bound),
        ("certified runge", runge_certified_stages),
        ("method s1", method_s1_end_to_end),
        ("method s2", method_s2_end_to_end),
        ("continuous s2", continuous_end_to_end),
        ("ordering invariant", ordering_invariant),
        ("hermite", hermite),
        ("oracle suite", oracle_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = std::panic::catch_unwind(run).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default()
            ),
        });
        println!("criterion {} {:<20} {} | {}", i + 1, name, if out.pass { "PASS" } else { "FAIL" }, out.detail);
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
