use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use thermolimit::numerics::{matexp_hermitian_prop, partial_trace, ComplexMatrix, StateVector};
use thermolimit::C64;

fn hermitian(dim: usize, raw: &[(f64, f64)]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let (re, im) = raw[i * dim + j];
            if i == j {
                h[(i, i)] = C64::new(re, 0.0);
            } else {
                h[(i, j)] = C64::new(re, im);
                h[(j, i)] = C64::new(re, -im);
            }
        }
    }
    h
}

fn arb_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=16).prop_flat_map(|dim| {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), dim * dim)
            .prop_map(move |raw| hermitian(dim, &raw))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_a_group(h in arb_hermitian(), t1 in -3.0..3.0f64, t2 in -3.0..3.0f64) {
        let u12 = matexp_hermitian_prop(&h, t1 + t2).unwrap();
        let u1 = matexp_hermitian_prop(&h, t1).unwrap();
        let u2 = matexp_hermitian_prop(&h, t2).unwrap();
        prop_assert!(u12.max_abs_diff(&u1.matmul(&u2).unwrap()).unwrap() <= 1e-8);
    }

    #[test]
    fn propagator_is_unitary(h in arb_hermitian(), t in -10.0..10.0f64) {
        let u = matexp_hermitian_prop(&h, t).unwrap();
        let id = ComplexMatrix::identity(u.rows());
        prop_assert!(u.dagger().matmul(&u).unwrap().max_abs_diff(&id).unwrap() <= 1e-9);
    }

    #[test]
    fn evolution_preserves_norm(h in arb_hermitian(), t in -10.0..10.0f64, seed in 0usize..1000) {
        let dim = h.rows();
        let psi = StateVector::basis(dim, seed % dim);
        let out = matexp_hermitian_prop(&h, t).unwrap().apply(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn complementary_partial_traces_agree_in_trace(
        raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 24),
    ) {
        let amps: Vec<C64> = raw.iter().map(|&(re, im)| C64::new(re, im)).collect();
        prop_assume!(amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3);
        let psi = StateVector::unnormalized(amps).unwrap().normalize().unwrap();
        let dims = [2, 3, 4];
        let a = partial_trace(&psi, &dims, &[0, 2]).unwrap();
        let b = partial_trace(&psi, &dims, &[1]).unwrap();
        assert_abs_diff_eq!(a.trace().re, b.trace().re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.trace().re, 1.0, epsilon = 1e-10);
    }
}
