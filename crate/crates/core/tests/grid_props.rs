use malab::grid::{ma_density, mixed_ma_density, GridFunction};
use malab::hermitian::HermitianMatrix;
use num_complex::Complex;
use proptest::prelude::*;

fn z(p: &[f64], a: usize) -> Complex<f64> {
    Complex::new(p[2 * a], p[2 * a + 1])
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n)
}

fn to_complex(e: &[(f64, f64)]) -> Vec<Complex<f64>> {
    e.iter().map(|&(r, i)| Complex::new(r, i)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// `Re Σ C_ab z_a z̄_b + Re Σ S_ab z_a z_b` has complex Hessian `C`.
    #[test]
    fn hermitian_forms_are_differentiated_exactly(c in complex_entries(2), s in complex_entries(2), res in 5usize..8) {
        let cm = HermitianMatrix::new(2, to_complex(&c)).unwrap();
        let sm = to_complex(&s);
        let f = |p: &[f64]| {
            let mut acc = Complex::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += cm.get(a, b) * z(p, a) * z(p, b).conj() + sm[a * 2 + b] * z(p, a) * z(p, b);
                }
            }
            acc.re
        };
        let u = GridFunction::on_cube(2, -1.0, 1.0, res, f).unwrap();
        for node in u.interior_nodes() {
            let h = u.complex_hessian(&node).unwrap();
            for j in 0..2 {
                for k in 0..2 {
                    prop_assert!((h.get(j, k) - cm.get(j, k)).norm() < 1e-12);
                }
            }
        }
    }

    /// Pluriharmonic quadratics have zero Monge-Ampère density.
    #[test]
    fn pluriharmonic_quadratics_are_annihilated(s in complex_entries(2), l in complex_entries(1)) {
        let sm = to_complex(&s);
        let lin = Complex::new(l[0].0, l[0].1);
        let f = |p: &[f64]| {
            let mut acc = lin * z(p, 0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += sm[a * 2 + b] * z(p, a) * z(p, b);
                }
            }
            acc.re
        };
        let u = GridFunction::on_cube(2, -1.0, 1.0, 5, f).unwrap();
        let d = ma_density(&u).unwrap();
        prop_assert!(d.values().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn mixed_density_of_a_function_with_itself(a in 0.5..2.0f64, b in 0.5..2.0f64, k in 0usize..=2) {
        let f = move |p: &[f64]| a * (p[0] * p[0] + p[1] * p[1]) + b * (1.0 + p[2] * p[2] + p[3] * p[3]).ln() + (p[0] * p[2]).exp();
        let u = GridFunction::on_cube(2, -0.5, 0.5, 6, f).unwrap();
        let m = mixed_ma_density(&u, &u, k).unwrap();
        let d = ma_density(&u).unwrap();
        for (x, y) in m.values().iter().zip(d.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }
}

#[test]
fn quartic_pluriharmonic_density_is_negligible() {
    // Re z₁⁴ + Re z₁²z₂²: the stencil error is O(h²) at worst; in practice it
    // cancels to rounding level.
    let f = |p: &[f64]| (z(p, 0).powi(4) + z(p, 0).powi(2) * z(p, 1).powi(2)).re;
    for res in [6, 11] {
        let u = GridFunction::on_cube(2, -0.5, 0.5, res, f).unwrap();
        let h = u.spacing();
        let worst = ma_density(&u)
            .unwrap()
            .values()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst <= h * h, "h = {h}: {worst}");
    }
}
