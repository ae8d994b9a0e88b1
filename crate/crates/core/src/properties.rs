use proptest::prelude::*;

use crate::arrangement::{c_relation, del_contr_residual, Arrangement};
use crate::convexbody::Zonotope;
use crate::exactnum::{is_log_concave, q, Poly, Rational};
use crate::limits::Limits;
use crate::linalg::{integer_rows, IntRref};
use crate::matroid::Matroid;

fn int_matrix(
    rows: std::ops::RangeInclusive<usize>,
    cols: usize,
) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, cols), rows)
}

fn rational(m: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| r.iter().map(|&x| q(x)).collect())
        .collect()
}

fn columns(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j]).collect())
        .collect()
}

fn nonzero_rows(m: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    m.into_iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integer_rref_is_order_free(m in int_matrix(1..=5, 4)) {
        let rows = integer_rows(&rational(&m));
        let mut fwd = IntRref::default();
        rows.iter().for_each(|r| { fwd.push(r); });
        let mut rev = IntRref::default();
        rows.iter().rev().for_each(|r| { rev.push(r); });
        prop_assert_eq!(fwd, rev);
    }

    #[test]
    fn matroid_char_poly_invariants(m in int_matrix(3..=3, 6).prop_map(|m| {
        let cols: Vec<Vec<i64>> = columns(&m).into_iter().map(|c| if c.iter().all(|&x| x == 0) { vec![1, 0, 0] } else { c }).collect();
        columns(&cols)
    })) {
        let lim = Limits::default();
        let mat = Matroid::from_matrix(&rational(&m)).unwrap();
        let cp = mat.char_poly(&lim).unwrap();
        prop_assert!(is_log_concave(&cp.gamma).unwrap().holds());
        prop_assert_eq!(cp.gamma.iter().sum::<Rational>(), cp.psi.eval(&q(1)));
        let loopless = |m: &Matroid| (0..m.len()).all(|e| !m.is_loop(e));
        prop_assume!(loopless(&mat));
        for e in 0..mat.len() {
            if mat.is_coloop(e) {
                continue;
            }
            let (del, con) = mat.delete_contract(e).unwrap();
            // a loop in the contraction (an element parallel to e) kills its term
            let con_chi = if loopless(&con) { con.char_poly(&lim).unwrap().chi } else { Poly::zero() };
            let rhs = &del.char_poly(&lim).unwrap().chi - &con_chi;
            prop_assert_eq!(&cp.chi, &rhs);
        }
    }

    #[test]
    fn hyperplane_arrangement_identities(m in int_matrix(1..=5, 3)) {
        let normals = nonzero_rows(m);
        prop_assume!(!normals.is_empty());
        let lim = Limits::default();
        let a = Arrangement::central_hyperplanes(&normals).unwrap();
        prop_assert!(c_relation(&a, 1, &lim).unwrap().holds());
        for h in 0..a.len() {
            prop_assert!(del_contr_residual(&a, h, &lim).unwrap().is_zero());
        }
    }

    #[test]
    fn zonotope_volumes_agree(m in int_matrix(3..=3, 4)) {
        let gens = nonzero_rows(columns(&m));
        prop_assume!(!gens.is_empty());
        let z = Zonotope::new(3, gens.iter().map(|g| g.iter().map(|&x| x as f64).collect()).collect()).unwrap();
        let subset = z.intrinsic_volumes();
        let belt = z.intrinsic_volumes_belt(&Limits::default()).unwrap();
        for (a, b) in subset.nu.iter().zip(&belt.nu) {
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
        }
        let (nu, steiner) = subset.log_concavity(1e-9).unwrap();
        prop_assert!(nu.holds() && steiner.holds());
        let doubled = z.scaled(&q(2)).intrinsic_volumes();
        for (i, (a, b)) in subset.nu.iter().zip(&doubled.nu).enumerate() {
            prop_assert!((b - a * 2f64.powi(i as i32)).abs() <= 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn poly_ring_laws(a in prop::collection::vec(-5i64..=5, 0..5), b in prop::collection::vec(-5i64..=5, 0..5)) {
        let (p, r) = (Poly::from_ints(&a), Poly::from_ints(&b));
        prop_assert_eq!(&p * &r, &r * &p);
        prop_assert_eq!(&(&p + &r) - &r, p.clone());
        let x = q(3);
        prop_assert_eq!((&p * &r).eval(&x), p.eval(&x) * r.eval(&x));
    }
}
