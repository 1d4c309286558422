use heisenkep::exactalg::{
    matrix_inverse, nullspace, poly_roots_numeric, ratfunc_normalize, ExactMatrix, ExactPoly, ExactRatFunc,
    ExactScalar, Var,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = ExactScalar> {
    (-20i64..20, 1i64..9, -20i64..20, 1i64..9).prop_map(|(a, b, c, d)| ExactScalar::gaussian(a, b, c, d))
}

fn nonzero_scalar() -> impl Strategy<Value = ExactScalar> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

fn poly(max_deg: usize) -> impl Strategy<Value = ExactPoly> {
    prop::collection::vec(scalar(), 0..=max_deg + 1).prop_map(|c| ExactPoly::new(c, Var::Tau))
}

fn ratfunc() -> impl Strategy<Value = ExactRatFunc> {
    (poly(3), poly(3).prop_filter("nonzero den", |p| !p.is_zero()))
        .prop_map(|(n, d)| ExactRatFunc::new(n, d).unwrap())
}

fn small_ratfunc() -> impl Strategy<Value = ExactRatFunc> {
    let small = || (-3i64..=3, -2i64..=2).prop_map(|(a, b)| ExactScalar::gaussian(a, 1, b, 1));
    (prop::collection::vec(small(), 0..=2), prop::collection::vec(small(), 1..=2))
        .prop_filter_map("nonzero den", |(n, d)| {
            ExactRatFunc::new(ExactPoly::new(n, Var::Tau), ExactPoly::new(d, Var::Tau)).ok()
        })
}

/// Cofactor expansion along the first of the remaining rows.
fn laplace(m: &ExactMatrix, cols: &[usize]) -> ExactRatFunc {
    let row = m.rows() - cols.len();
    if cols.is_empty() {
        return ExactRatFunc::one(Var::Tau);
    }
    cols.iter().enumerate().fold(ExactRatFunc::zero(Var::Tau), |acc, (k, &c)| {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = m.get(row, c) * &laplace(m, &rest);
        if k % 2 == 0 { &acc + &term } else { &acc - &term }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in nonzero_scalar()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&c * &c.inv().unwrap(), ExactScalar::one());
        prop_assert_eq!(&(&a / &c) * &c, a);
    }

    #[test]
    fn scalar_string_round_trip(a in scalar()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<ExactScalar>().unwrap(), a);
    }

    #[test]
    fn ratfunc_product_quotient(f in ratfunc(), g in ratfunc()) {
        prop_assume!(!g.is_zero());
        let fg = ratfunc_normalize(&(&f * &g)).unwrap();
        let back = &fg * &ratfunc_normalize(&g).unwrap().inv().unwrap();
        prop_assert_eq!(back, ratfunc_normalize(&f).unwrap());
    }

    #[test]
    fn ratfunc_json_round_trip(f in ratfunc()) {
        let s = serde_json::to_string(&f).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExactRatFunc>(&s).unwrap(), f);
    }

    #[test]
    fn nullspace_is_kernel(r in 1usize..5, c in 1usize..6, seed in prop::collection::vec(poly(1), 30)) {
        // Duplicate a row combination so kernels are frequently nontrivial.
        let mut m = ExactMatrix::from_fn(r, c, |i, j| ExactRatFunc::from_poly(seed[i * c + j].clone()));
        if r > 1 {
            for j in 0..c {
                let v = m.get(0, j) + m.get(1, j);
                m.set(r - 1, j, v);
            }
        }
        let basis = nullspace(&m);
        for v in &basis {
            prop_assert!(m.mul_vec(v).iter().all(ExactRatFunc::is_zero));
        }
        prop_assert_eq!(basis.len() + m.rank(), c);
    }

    #[test]
    fn inverse_round_trip(n in 1usize..=6, entries in prop::collection::vec(scalar(), 36)) {
        let m = ExactMatrix::from_fn(n, n, |i, j| ExactRatFunc::constant(entries[i * n + j].clone(), Var::Tau));
        match matrix_inverse(&m) {
            Ok(inv) => {
                let id = ExactMatrix::identity(n, Var::Tau);
                prop_assert_eq!(&m * &inv, id.clone());
                prop_assert_eq!(&inv * &m, id);
            }
            Err(_) => prop_assert!(m.determinant().unwrap().is_zero()),
        }
    }

    #[test]
    fn inverse_round_trip_polynomial(n in 1usize..=3, entries in prop::collection::vec(poly(1), 9)) {
        let m = ExactMatrix::from_fn(n, n, |i, j| ExactRatFunc::from_poly(entries[i * n + j].clone()));
        if let Ok(inv) = matrix_inverse(&m) {
            prop_assert_eq!(&m * &inv, ExactMatrix::identity(n, Var::Tau));
        }
    }

    #[test]
    fn gcd_matches_extended_euclid(a in poly(3), b in poly(3), c in poly(2)) {
        let (a, b) = (&a * &c, &b * &c);
        let g = ExactPoly::gcd(&a, &b);
        prop_assert_eq!(&g, &ExactPoly::ext_gcd(&a, &b).0);
        if !g.is_zero() {
            prop_assert!(g.divides(&a) && g.divides(&b));
        }
    }

    #[test]
    fn determinant_matches_laplace(n in 1usize..=4, entries in prop::collection::vec(small_ratfunc(), 16)) {
        let m = ExactMatrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
        prop_assert_eq!(m.determinant().unwrap(), laplace(&m, &(0..n).collect::<Vec<_>>()));
        if let Ok(inv) = matrix_inverse(&m) {
            prop_assert_eq!(&m * &inv, ExactMatrix::identity(n, Var::Tau));
        } else {
            prop_assert!(laplace(&m, &(0..n).collect::<Vec<_>>()).is_zero());
        }
    }

    #[test]
    fn root_sum_matches_vieta(coeffs in prop::collection::vec(-50i64..50, 2..=16), lead in 1i64..10) {
        let mut c = coeffs;
        *c.last_mut().unwrap() = lead;
        let p = ExactPoly::from_i64(&c, Var::Tau);
        let n = c.len() - 1;
        let roots = poly_roots_numeric(&p, 1e-9).unwrap();
        prop_assert_eq!(roots.len(), n);
        let sum: Complex64 = roots.iter().sum();
        let expect = -(c[n - 1] as f64) / lead as f64;
        let scale = roots.iter().map(|r| r.norm()).sum::<f64>().max(1.0);
        prop_assert!((sum - expect).norm() <= 1e-9 * scale, "sum {} vs {}", sum, expect);
    }
}
