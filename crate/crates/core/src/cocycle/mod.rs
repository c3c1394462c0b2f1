//! Locally constant matrix cocycles over symbolic orbits: evaluation,
//! exponent traces, hypothesis checks and estimates of `Λ`.

mod condition;
mod fekete;
mod lambda;
mod measure;
mod spec;
mod trace;

pub use condition::{
    check_positivity_condition, check_positivity_exhaustive, window_product, PositivityWitness,
};
pub use fekete::{fekete_extrapolate, CBound, FeketeReport, FeketeViolation};
pub use lambda::{lambda_estimate, LambdaEstimate};
pub use measure::{MeasureKind, MeasureModel};
pub use spec::{CocycleSpec, MAX_TABLE_WORDS};
pub use trace::{
    default_defect_pairs, geometric_checkpoints, linear_checkpoints, lyapunov_trace,
    lyapunov_trace_prefix, partial_product, quasi_additivity_defect, DefectReport, DefectRow,
    LyapunovTrace,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matproc::NonNegMatrix;
    use crate::symbolic::InfiniteWordSource;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> NonNegMatrix {
        NonNegMatrix::from_rows(rows).unwrap()
    }

    fn fib() -> CocycleSpec {
        CocycleSpec::first_coordinate(&[m(&[&[1.0, 1.0], &[1.0, 0.0]])]).unwrap()
    }

    fn nolimit_spec() -> CocycleSpec {
        let d = m(&[&[10.0, 0.0], &[0.0, 0.1]]);
        CocycleSpec::first_coordinate(&[
            d.clone(),
            d,
            m(&[&[0.0, 1.0], &[1.0, 0.0]]),
            NonNegMatrix::ones(2),
        ])
        .unwrap()
    }

    #[test]
    fn golden_ratio_trace() {
        let zeros = InfiniteWordSource::periodic(1, "0").unwrap();
        let t = lyapunov_trace(&fib(), &zeros, &[10, 10_000]).unwrap();
        // ‖F^n‖ = F_{n+3} = (φ^{n+3} − (−1/φ)^{n+3})/√5
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let exact = phi.ln() + (phi.powi(3) / 5f64.sqrt()).ln() / 10_000.0;
        assert!((t.final_exponent().unwrap() - exact).abs() < 1e-12);
        let f13 = 233f64;
        assert!((t.values()[0] - f13.ln()).abs() < 1e-12);
        assert_eq!(t.zero_index(), None);
    }

    #[test]
    fn nilpotent_trace() {
        let spec = CocycleSpec::first_coordinate(&[m(&[&[0.0, 1.0], &[0.0, 0.0]])]).unwrap();
        let zeros = InfiniteWordSource::periodic(1, "0").unwrap();
        let t = lyapunov_trace(&spec, &zeros, &[1, 2, 3, 50]).unwrap();
        assert_eq!(t.zero_index(), Some(2));
        assert!(t.values()[0].is_finite());
        assert!(t.values()[1..].iter().all(|v| *v == f64::NEG_INFINITY));
    }

    #[test]
    fn nolimit_block_identities() {
        let spec = nolimit_spec();
        // x_1..x_k twice
        let x = [0u8, 1, 1, 0, 1];
        let twice: Vec<u8> = x.iter().chain(x.iter()).copied().collect();
        let p = partial_product(&spec, &twice, 0, twice.len()).unwrap();
        let expected = (1e10f64 + 1e-10).ln();
        assert!((p.log_norm() - expected).abs() < 1e-12);
        let u = p.unit_matrix().unwrap();
        assert_eq!(u.get(0, 1), 0.0);
        // with the swap symbol appended to each half: identity
        let mut half = x.to_vec();
        half.push(2);
        let block: Vec<u8> = half.iter().chain(half.iter()).copied().collect();
        let q = partial_product(&spec, &block, 0, block.len()).unwrap();
        let id = q.to_matrix().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id.get(i, j) - want).abs() < 1e-12);
            }
        }
        assert_eq!(partial_product(&spec, &block, 3, 3).unwrap().log_norm(), 0.0);
        assert!(matches!(
            partial_product(&spec, &block, 0, 20),
            Err(crate::Error::InsufficientContext { required: 20, available: 12 })
        ));
    }

    #[test]
    fn depth_two_context() {
        let spec = CocycleSpec::new(
            2,
            2,
            vec![("01".parse().unwrap(), m(&[&[2.0]]))],
            Some(m(&[&[1.0]])),
        )
        .unwrap();
        let w = [0u8, 1, 0, 1, 1];
        // windows 01, 10, 01, 11 → 2·1·2·1
        let p = partial_product(&spec, &w, 0, 4).unwrap();
        assert!((p.log_norm() - 4f64.ln()).abs() < 1e-15);
        assert!(partial_product(&spec, &w, 0, 5).is_err());
        let t = lyapunov_trace_prefix(&spec, &w, &[2, 4]).unwrap();
        assert!((t.values()[1] - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn positivity_examples() {
        let upper = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let lower = m(&[&[1.0, 0.0], &[1.0, 1.0]]);
        let spec = CocycleSpec::first_coordinate(&[upper, lower]).unwrap();
        let w = check_positivity_condition(&spec, &[0, 0, 0, 1, 1], 4)
            .unwrap()
            .unwrap();
        assert_eq!(w.ell0, 2);
        assert_eq!(w.u.to_string(), "01");
        assert_eq!(w.position, Some(2));
        assert_eq!(w.b(), 1.0);

        let positive = CocycleSpec::first_coordinate(&[NonNegMatrix::ones(2)]).unwrap();
        let w = check_positivity_condition(&positive, &[0, 0], 3).unwrap().unwrap();
        assert_eq!((w.ell0, w.u.len()), (1, 1));

        let diag = nolimit_spec();
        let sample = InfiniteWordSource::bernoulli(vec![0.5, 0.5], 1)
            .unwrap()
            .emit_prefix(10_000)
            .unwrap();
        assert_eq!(check_positivity_condition(&diag, &sample, 12).unwrap(), None);
        // exhaustive search over all four letters finds the all-ones matrix
        let e = check_positivity_exhaustive(&diag, 2).unwrap().unwrap();
        assert_eq!(e.u.to_string(), "3");
    }

    #[test]
    fn scalar_defects_vanish() {
        let spec = CocycleSpec::first_coordinate(&[m(&[&[2.0]]), m(&[&[0.5]])]).unwrap();
        let w = InfiniteWordSource::thue_morse().emit_prefix(3000).unwrap();
        let r = quasi_additivity_defect(&spec, &w, &default_defect_pairs(3000)).unwrap();
        assert!(r.max.unwrap() < 1e-12);
    }

    #[test]
    fn lambda_examples() {
        let nu = MeasureModel::periodic(1, "0").unwrap();
        let est = lambda_estimate(&fib(), &nu, 2000, 0, 0).unwrap();
        let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(est.exact);
        assert!((est.mean - golden).abs() < 1e-3);

        let scalar = CocycleSpec::first_coordinate(&[m(&[&[2.0]]), m(&[&[0.5]])]).unwrap();
        let nu = MeasureModel::periodic(2, "01").unwrap();
        for n in [1, 2, 7, 100] {
            let est = lambda_estimate(&scalar, &nu, n, 0, 0).unwrap();
            assert!(est.mean.abs() < 1e-15, "n = {n}");
        }
        let b = MeasureModel::bernoulli(vec![0.5, 0.5]).unwrap();
        let est = lambda_estimate(&scalar, &b, 500, 400, 3).unwrap();
        assert!(est.mean.abs() < 4.0 * est.std_error);
        assert_eq!(est, lambda_estimate(&scalar, &b, 500, 400, 3).unwrap());
    }

    #[test]
    fn mixed_support_is_flagged() {
        // A_1 nilpotent; any sample containing "11" dies
        let spec = CocycleSpec::first_coordinate(&[
            NonNegMatrix::identity(2),
            m(&[&[0.0, 1.0], &[0.0, 0.0]]),
        ])
        .unwrap();
        let b = MeasureModel::bernoulli(vec![0.9, 0.1]).unwrap();
        let est = lambda_estimate(&spec, &b, 6, 300, 9).unwrap();
        assert!(est.mixed_support);
        assert!(est.zero_samples > 0 && est.zero_samples < 300);
        assert!(est.mean.is_finite());
    }

    #[test]
    fn trace_csv_round_trip() {
        let spec = CocycleSpec::first_coordinate(&[m(&[&[0.0, 1.0], &[0.0, 0.0]])]).unwrap();
        let t = lyapunov_trace(&spec, &InfiniteWordSource::periodic(1, "0").unwrap(), &[1, 2, 5])
            .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,log_norm,exponent,zero_flag\n1,0,0,0\n2,-inf,-inf,1\n"));
        assert_eq!(LyapunovTrace::read_csv(&buf[..]).unwrap(), t);
    }

    #[test]
    fn checkpoint_grids() {
        assert_eq!(geometric_checkpoints(1, 8), vec![1, 2, 3, 4, 6, 8]);
        assert_eq!(linear_checkpoints(3, 10), vec![3, 6, 9, 10]);
    }

    fn positive_spec(entries: Vec<f64>) -> CocycleSpec {
        let a = NonNegMatrix::new(2, entries[..4].to_vec()).unwrap();
        let b = NonNegMatrix::new(2, entries[4..].to_vec()).unwrap();
        CocycleSpec::first_coordinate(&[a, b]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cocycle_identity(
            entries in proptest::collection::vec(0.05f64..5.0, 8),
            seed in any::<u64>(),
            cuts in (0usize..200, 0usize..200, 0usize..200),
        ) {
            let spec = positive_spec(entries);
            let w = InfiniteWordSource::bernoulli(vec![0.5, 0.5], seed).unwrap().emit_prefix(300).unwrap();
            let mut c = [cuts.0, cuts.1, cuts.2];
            c.sort();
            let [n, k, mm] = c;
            let whole = partial_product(&spec, &w, n, mm).unwrap();
            let left = partial_product(&spec, &w, n, k).unwrap();
            let right = partial_product(&spec, &w, k, mm).unwrap();
            let joined = left.concat(&right).unwrap();
            prop_assert!((whole.log_norm() - joined.log_norm()).abs() < 1e-9 * (1.0 + whole.log_norm().abs()));
            for (a, b) in whole.unit_log_entries().iter().zip(joined.unit_log_entries()) {
                prop_assert!((a.exp() - b.exp()).abs() < 1e-9);
            }
        }

        #[test]
        fn trace_stays_in_envelope(
            entries in proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..20.0], 8),
            seed in any::<u64>(),
        ) {
            let a = NonNegMatrix::new(2, entries[..4].to_vec()).unwrap();
            let b = NonNegMatrix::new(2, entries[4..].to_vec()).unwrap();
            prop_assume!(!a.is_zero() && !b.is_zero());
            let spec = CocycleSpec::first_coordinate(&[a, b]).unwrap();
            let src = InfiniteWordSource::bernoulli(vec![0.5, 0.5], seed).unwrap();
            let grid = geometric_checkpoints(1, 2000);
            let t = lyapunov_trace(&spec, &src, &grid).unwrap();
            for (&n, &v) in t.checkpoints().iter().zip(t.values()) {
                if v.is_finite() {
                    let (lo, hi) = spec.log_norm_envelope(n);
                    prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
                }
            }
        }

        #[test]
        fn positive_defects_bounded(
            entries in proptest::collection::vec(0.05f64..5.0, 8),
            seed in any::<u64>(),
        ) {
            let spec = positive_spec(entries);
            let w = InfiniteWordSource::bernoulli(vec![0.5, 0.5], seed).unwrap().emit_prefix(600).unwrap();
            let r = quasi_additivity_defect(&spec, &w, &default_defect_pairs(600)).unwrap();
            let bound = spec.min_elem_constant().unwrap().ln().abs();
            prop_assert!(r.max.unwrap() <= bound + 1e-9);
        }

        #[test]
        fn shift_comparison_bounded(
            entries in proptest::collection::vec(0.05f64..5.0, 8),
            seed in any::<u64>(),
        ) {
            // |φ_n(ω) − φ_n(σω)| stays bounded for positive tables
            let spec = positive_spec(entries);
            let w = InfiniteWordSource::bernoulli(vec![0.5, 0.5], seed).unwrap().emit_prefix(2002).unwrap();
            let grid = geometric_checkpoints(1, 2000);
            let t0 = lyapunov_trace_prefix(&spec, &w, &grid).unwrap();
            let t1 = lyapunov_trace_prefix(&spec, &w[1..], &grid).unwrap();
            let c = spec.min_elem_constant().unwrap().ln().abs();
            let (_, a_hi) = spec.log_norm_envelope(1);
            for (x, y) in t0.values().iter().zip(t1.values()) {
                prop_assert!((x - y).abs() <= 2.0 * (c + a_hi) + 1e-9);
            }
        }
    }
}
