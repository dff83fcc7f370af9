//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use malab::grid::{check_theorem1, ma_density, GridFunction};
use malab::hermitian::{garding_gap, minkowski_gap, mixed_determinant, HermitianMatrix};
use malab::measure::{
    canonical_approximation, domination_check, geometric_mean_measure, holder_cell_check, weak_star_bound,
    weak_star_gap, Atom, BoxDomain, Cube, Density, DiscreteMeasure, DominationVariant, TestFunction,
};
use malab::rational::{int, ratio};
use malab::toric::oracle::{arbitrate, quadrature_mass, OracleConfig};
use malab::toric::{
    active_slopes, counterexample_family, counterexample_report, gradient_image, reduced_mass, sum, ToricFunction,
    Verdict,
};
use malab::Rational;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 counterexample masses and verdicts (exact)", counterexample),
        ("2 gradient-image vertex sets (exact)", gradient_images),
        ("3 normalization arbitration by quadrature", normalization),
        ("4 matrix inequality suite", matrix_suite),
        ("5 grid inequality suite and FD convergence", grid_suite),
        ("6 canonical approximation", canonical),
        ("7 Hölder cell check", holder),
        ("8 domination checker discrimination", domination),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {status} ({:.2?}) {}", start.elapsed(), o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [int(2), int(3), int(5)] {
        let r = counterexample_report(&k).expect("k > 0");
        let k2 = &k * &k;
        let expect = [&k / int(2), &k / int(2), &k + k2.recip(), (int(2) * &k2).recip()];
        let got = [r.m_u.clone(), r.m_v.clone(), r.m_sum.clone(), r.m_mixed.clone()];
        let good = got == expect && r.mixed.verdict == Verdict::Violated && r.sum.verdict == Verdict::Violated;
        ok &= good;
        notes.push(format!("k={k}: ({}, {}, {}, {})", got[0], got[1], got[2], got[3]));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    outcome(ok, notes.join("; "))
}

fn points(pairs: &[(Rational, Rational)]) -> Vec<Vec<Rational>> {
    pairs.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect()
}

fn gradient_images() -> Outcome {
    let (u, v) = counterexample_family(&int(2)).unwrap();
    let s = sum(&u, &v).unwrap();
    let tri = points(&[(int(0), int(0)), (int(0), int(4)), (ratio(1, 2), int(0))]);
    let quad = points(&[
        (int(0), int(0)),
        (int(0), ratio(9, 2)),
        (ratio(1, 2), ratio(1, 2)),
        (ratio(9, 2), int(0)),
    ]);
    let gu = gradient_image(&u);
    let gs = gradient_image(&s);
    let corner = vec![int(4), int(4)];
    let inactive = s.slopes().contains(&corner) && !active_slopes(&s).contains(&corner);
    let ok = gu.vertices() == tri.as_slice() && gs.vertices() == quad.as_slice() && inactive;
    outcome(
        ok,
        format!(
            "Vol G(u) = {}, Vol G(u+v) = {}, (4,4) inactive: {inactive}",
            gu.volume(),
            gs.volume()
        ),
    )
}

fn normalization() -> Outcome {
    let green = ToricFunction::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
    let coarse = quadrature_mass(
        &green,
        &OracleConfig {
            points_per_layer: 3.0,
            ..OracleConfig::default()
        },
    );
    let fine = quadrature_mass(&green, &OracleConfig::default());
    let (Ok(coarse), Ok(fine)) = (coarse, fine) else {
        return outcome(false, "oracle failed to run");
    };
    let plateau = (coarse.mass - fine.mass).abs() / fine.mass;
    let tau2 = (2.0 * PI).powi(2);
    let Some(mode) = arbitrate(fine.mass, &reduced_mass(&green), 2, 0.02) else {
        return outcome(false, format!("oracle mass {} matches neither candidate", fine.mass));
    };
    let (u, _) = counterexample_family(&int(2)).unwrap();
    let Ok(est) = quadrature_mass(&u, &OracleConfig::default()) else {
        return outcome(false, "oracle failed on u_2");
    };
    let predicted = mode.factor(2) * malab::rational::to_f64(&reduced_mass(&u));
    let rel = (est.mass - predicted).abs() / predicted;
    let ok = plateau < 5e-3 && rel < 0.02;
    outcome(
        ok,
        format!(
            "mode {}: green {:.6}·(2π)² (plateau {:.1e}), u_2 {:.6}·(2π)² vs {:.6}·(2π)²",
            mode.name(),
            fine.mass / tau2,
            plateau,
            est.mass / tau2,
            predicted / tau2
        ),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, psd: bool) -> HermitianMatrix<f64> {
    let e: Vec<Complex<f64>> = (0..n * n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    if psd {
        HermitianMatrix::gram(n, &e).unwrap()
    } else {
        HermitianMatrix::new(n, e).unwrap()
    }
}

fn matrix_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst_gap = f64::INFINITY;
    let mut worst_rel: f64 = 0.0;
    for n in 2..=4usize {
        for _ in 0..10_000 {
            let a = random_matrix(&mut rng, n, true);
            let b = random_matrix(&mut rng, n, true);
            for k in 1..n {
                worst_gap = worst_gap.min(garding_gap(&a, &b, k).unwrap());
            }
            worst_gap = worst_gap.min(minkowski_gap(&a, &b).unwrap());
        }
        for _ in 0..1_000 {
            let ms: Vec<HermitianMatrix<f64>> = (0..n + 1).map(|_| random_matrix(&mut rng, n, false)).collect();
            let refs: Vec<&HermitianMatrix<f64>> = ms[..n].iter().collect();
            let scale: f64 = refs.iter().map(|m| m.max_abs()).product::<f64>().max(1e-300);
            let base = mixed_determinant(&refs).unwrap();
            let mut perm = refs.clone();
            perm.rotate_left(1);
            perm.swap(0, n - 1);
            worst_rel = worst_rel.max((mixed_determinant(&perm).unwrap() - base).abs() / scale);
            let (alpha, beta) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let combo = ms[0].scale(alpha).try_add(&ms[n].scale(beta)).unwrap();
            let mut lhs_args = refs.clone();
            lhs_args[0] = &combo;
            let mut alt = refs.clone();
            alt[0] = &ms[n];
            let lhs = mixed_determinant(&lhs_args).unwrap();
            let rhs = alpha * base + beta * mixed_determinant(&alt).unwrap();
            let s2 = scale.max(alt.iter().map(|m| m.max_abs()).product::<f64>()) * (alpha + beta).max(1.0);
            worst_rel = worst_rel.max((lhs - rhs).abs() / s2);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst_gap >= -1e-9 && worst_rel <= 1e-10 && elapsed < Duration::from_secs(30);
    outcome(
        ok,
        format!("min gap {worst_gap:.3e}, max relative deviation {worst_rel:.3e}"),
    )
}

type Sampler = fn(&[f64]) -> f64;

fn sq(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

fn grid_corpus() -> Vec<(&'static str, Sampler, Sampler)> {
    vec![
        (
            "quadratics",
            |p| sq(p),
            |p| 2.0 * (p[0] * p[0] + p[1] * p[1]) + p[2] * p[2] + p[3] * p[3],
        ),
        ("log(1+|z|²) and |z|²", |p| (1.0 + sq(p)).ln(), |p| sq(p)),
        (
            "smoothed max and quadratic",
            |p| {
                let eps = 0.3;
                let a = (p[0] * p[0] + p[1] * p[1]) / eps;
                let b = (p[2] * p[2] + p[3] * p[3]) / eps;
                let m = a.max(b);
                eps * (m + ((a - m).exp() + (b - m).exp()).ln()) + 0.5 * sq(p)
            },
            |p| 3.0 * (p[0] * p[0] + p[1] * p[1]) + 0.5 * (p[2] * p[2] + p[3] * p[3]),
        ),
        (
            "exponentials",
            |p| p[0].exp() + p[3].exp() + sq(p),
            |p| (p[1] + p[2]).exp() + 2.0 * sq(p),
        ),
        (
            "quartic and log",
            |p| (p[0] * p[0] + p[1] * p[1]).powi(2) + sq(p),
            |p| (1.0 + sq(p)).ln() + 0.25 * sq(p),
        ),
    ]
}

fn grid_suite() -> Outcome {
    let h = 0.05;
    let tol = 10.0 * h * h;
    let mut violations = 0;
    let mut hypotheses = true;
    for (_, fu, fv) in grid_corpus() {
        let u = GridFunction::from_sampler(2, vec![-0.2; 4], h, 9, fu).unwrap();
        let v = GridFunction::from_sampler(2, vec![-0.2; 4], h, 9, fv).unwrap();
        let f = ma_density(&u).unwrap();
        let g = ma_density(&v).unwrap();
        let r = check_theorem1(&u, &v, &f, &g, 1, tol).unwrap();
        violations += r.mixed_violations + r.minkowski_violations;
        hypotheses &= r.hypotheses_hold();
    }
    // exp(x₁) + exp(y₂): H = diag(e^{x₁}, e^{y₂})/4.
    let f: Sampler = |p| p[0].exp() + p[3].exp();
    let error_at = |spacing: f64, stride: usize| {
        let res = (1.0 / spacing).round() as usize + 1;
        let u = GridFunction::from_sampler(2, vec![-0.5; 4], spacing, res, f).unwrap();
        let mut worst: f64 = 0.0;
        for node in u.interior_nodes() {
            if node.iter().any(|&i| i % stride != 0) {
                continue;
            }
            let x = u.coordinates(&node);
            let exact = [x[0].exp() / 4.0, x[3].exp() / 4.0];
            let hm = u.complex_hessian(&node).unwrap();
            for j in 0..2 {
                for k in 0..2 {
                    let e = if j == k { exact[j] } else { 0.0 };
                    worst = worst.max((hm.get(j, k) - Complex::new(e, 0.0)).norm());
                }
            }
        }
        worst
    };
    let coarse = error_at(0.1, 1);
    let fine = error_at(0.05, 2);
    let factor = coarse / fine;
    let ok = violations == 0 && hypotheses && (3.5..=4.5).contains(&factor);
    outcome(
        ok,
        format!("{violations} violations over 5 pairs, convergence factor {factor:.3}"),
    )
}

fn random_atomic(rng: &mut ChaCha8Rng, d: usize) -> DiscreteMeasure<Rational> {
    let count = rng.gen_range(1..=6);
    let atoms = (0..count)
        .map(|_| Atom {
            location: (0..d).map(|_| ratio(rng.gen_range(0..=81), 81)).collect(),
            weight: ratio(rng.gen_range(1..20), rng.gen_range(1..5)),
        })
        .collect();
    let domain = BoxDomain::unit(d);
    DiscreteMeasure::atomic(domain.clone(), Cube::enclosing(&domain), atoms).unwrap()
}

fn random_cellwise(rng: &mut ChaCha8Rng, d: usize) -> DiscreteMeasure<Rational> {
    let level = rng.gen_range(1..=2);
    let count = 3u64.pow((d * level) as u32);
    let mut dens = BTreeMap::new();
    for _ in 0..rng.gen_range(0..6) {
        dens.insert(rng.gen_range(0..count), ratio(rng.gen_range(0..9), rng.gen_range(1..4)));
    }
    dens.insert(rng.gen_range(0..count), ratio(rng.gen_range(1..9), rng.gen_range(1..4)));
    let domain = BoxDomain::unit(d);
    DiscreteMeasure::cellwise(domain.clone(), Cube::enclosing(&domain), level, dens).unwrap()
}

fn canonical() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut conserved = true;
    let mut tower = true;
    let mut under = true;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let d = 1 + i % 3;
        let mu = random_atomic(&mut rng, d);
        let (lo, hi) = (vec![0.0; d], vec![1.0; d]);
        for k in 1..=3 {
            let nu = canonical_approximation(&mu, k).unwrap();
            conserved &= nu.total_mass() == mu.total_mass();
            let back = canonical_approximation(&nu, k - 1).unwrap();
            tower &= back == canonical_approximation(&mu, k - 1).unwrap();
            for phi in [
                TestFunction::named("affine", d).unwrap(),
                TestFunction::SquaredNorm,
                TestFunction::Cubic,
            ] {
                let gap = weak_star_gap(&mu, &nu, |x| phi.eval(x));
                let bound = weak_star_bound(&mu, k, phi.lipschitz_on(&lo, &hi));
                under &= gap <= bound;
                worst_ratio = worst_ratio.max(gap / bound);
            }
        }
        let cw = random_cellwise(&mut rng, d.min(2));
        for k in 0..=3 {
            let nu = canonical_approximation(&cw, k).unwrap();
            conserved &= nu.total_mass() == cw.total_mass();
        }
        tower &= canonical_approximation(&canonical_approximation(&cw, 3).unwrap(), 1).unwrap()
            == canonical_approximation(&cw, 1).unwrap();
    }
    outcome(
        conserved && tower && under,
        format!("mass exact: {conserved}, tower exact: {tower}, worst gap/bound {worst_ratio:.3}"),
    )
}

fn holder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut negatives = 0;
    let mut min_gap = f64::INFINITY;
    for (n, k_exp) in [(2usize, 1usize), (3, 1), (3, 2)] {
        for t in 0..1_000 {
            let d = rng.gen_range(1..=2);
            let mu = if t % 2 == 0 {
                random_atomic(&mut rng, d)
            } else {
                random_cellwise(&mut rng, d)
            };
            let value = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.1) {
                    int(0)
                } else {
                    ratio(rng.gen_range(0..40), rng.gen_range(1..5))
                }
            };
            let draw = |rng: &mut ChaCha8Rng| Density {
                atoms: (0..mu.atoms().len()).map(|_| value(rng)).collect(),
                cells: mu
                    .cells()
                    .map(|c| c.densities.keys().map(|&k| (k, value(rng))).collect())
                    .unwrap_or_default(),
            };
            let f = draw(&mut rng);
            let g = draw(&mut rng);
            let level = rng.gen_range(0..=3);
            let r = holder_cell_check(&f, &g, &mu, k_exp, n, level).unwrap();
            if !r.holds {
                negatives += 1;
            }
            min_gap = min_gap.min(r.min_gap);
        }
    }
    outcome(
        negatives == 0,
        format!("{negatives} failing triples of 3000, min gap {min_gap:.3e}"),
    )
}

fn domination() -> Outcome {
    // Point masses in ℂ² ≅ ℝ⁴ at k = 2, scaled by (2π)².
    let k = 2.0;
    let tau2 = (2.0 * PI).powi(2);
    let domain = BoxDomain::new(vec![-1.0; 4], vec![1.0; 4]).unwrap();
    let origin = vec![0.0; 4];
    let mu = DiscreteMeasure::dirac(domain.clone(), origin.clone()).unwrap();
    let point = |w: f64| {
        DiscreteMeasure::atomic(
            domain.clone(),
            Cube::enclosing(&domain),
            vec![Atom {
                location: origin.clone(),
                weight: w,
            }],
        )
        .unwrap()
    };
    let f = Density::atomic(vec![tau2 * k / 2.0]);
    let levels = [0, 1, 2, 3];
    let mixed = point(tau2 / (2.0 * k * k));
    let sum_mass = point(tau2 * (k + 1.0 / (k * k)));
    let r4 = domination_check(
        &mixed,
        &f,
        &f,
        &mu,
        1,
        2,
        &levels,
        1e-9,
        DominationVariant::GeometricMean,
    )
    .unwrap();
    let r5 = domination_check(
        &sum_mass,
        &f,
        &f,
        &mu,
        1,
        2,
        &levels,
        1e-9,
        DominationVariant::Minkowski,
    )
    .unwrap();
    let flagged = |r: &malab::measure::DominationReport| {
        r.levels.iter().all(|l| {
            let cell = mu.grid(l.level).unwrap().locate(&origin, mu.domain());
            l.violations.iter().any(|v| v.cell == cell)
        })
    };
    let violated = flagged(&r4) && flagged(&r5);
    let deficit = r4.levels[0].violations.first().map_or(0.0, |v| v.deficit);
    let exact_deficit = tau2 * (1.0 / 8.0 - 1.0);

    // Absolutely continuous equality configuration.
    let d2 = BoxDomain::<Rational>::unit(2);
    let dens: BTreeMap<u64, Rational> = (0..9).map(|i| (i, ratio(i as i64 + 1, 3))).collect();
    let ac = DiscreteMeasure::cellwise(d2.clone(), Cube::enclosing(&d2), 1, dens).unwrap();
    let fa = Density::cellwise((0..9).map(|i| (i, int(1 + (i as i64 * 7) % 5))).collect());
    let ga = Density::cellwise((0..9).map(|i| (i, ratio(2, 1 + i as i64))).collect());
    let nu = geometric_mean_measure(&fa, &ga, &ac, 1, 2).unwrap();
    let eq = domination_check(
        &nu,
        &fa,
        &ga,
        &ac,
        1,
        2,
        &[0, 1, 2, 3, 4],
        1e-9,
        DominationVariant::GeometricMean,
    )
    .unwrap();
    let ok = violated && eq.holds && (deficit - exact_deficit).abs() < 1e-9;
    outcome(
        ok,
        format!("point mass flagged at levels 0..=3: {violated} (deficit {deficit:.6}); equality configuration holds at levels 0..=4: {}", eq.holds),
    )
}
