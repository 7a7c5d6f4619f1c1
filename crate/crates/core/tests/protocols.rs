mod common;

use common::*;
use rankcert::oracle::*;
use rankcert::prelude::*;
use rankcert::proto::*;

fn src(seed: u64) -> ChallengeSource {
    ChallengeSource::interactive(seed)
}

#[test]
fn small_determinants() {
    let f7 = field(7);
    let run = run_det(&DenseMatrix::identity(f7, 3), &mut src(1)).unwrap();
    assert_eq!(run.output, Some(1));
    let a = DenseMatrix::from_rows(f7, &[vec![1, 2], vec![3, 4]]).unwrap();
    assert_eq!(run_det(&a, &mut src(1)).unwrap().output, Some(5));
    let singular = DenseMatrix::from_rows(f7, &[vec![1, 2], vec![2, 4]]).unwrap();
    assert_eq!(run_det(&singular, &mut src(1)).unwrap().output, Some(0));
}

#[test]
fn grp_needs_a_generic_profile() {
    let f5 = field(5);
    let fib = DenseMatrix::from_rows(f5, &[vec![1, 1], vec![1, 0]]).unwrap();
    assert!(run_grp(&fib, &mut src(2)).unwrap().verdict.is_accept());
    let swap = DenseMatrix::from_rows(f5, &[vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!(run_grp(&swap, &mut src(2)).unwrap().verdict, Verdict::Abort(AbortCause::NoGrpWitness));

    let (first, second) = run_grp_nonsingular(&fib, &mut src(3)).unwrap();
    assert!(first.verdict.is_accept() && second.unwrap().verdict.is_accept());
}

#[test]
fn column_profiles_of_every_ternary_3x3() {
    let f3 = field(3);
    for bits in 0u32..19_683 {
        let mut x = bits;
        let a = DenseMatrix::from_fn(f3, 3, 3, |_, _| {
            let d = x % 3;
            x /= 3;
            d as u64
        });
        let run = run_crp(&a, &mut src(bits as u64));
        assert_eq!(run.output, Some(oracle_crp(&a)), "{a:?}");
    }
}

#[test]
fn rank_profile_matrices_of_every_binary_3x3() {
    for (k, a) in binary_3x3().enumerate() {
        let run = run_rpm(&a, &mut src(k as u64));
        assert_eq!(run.output, Some(oracle_rpm(&a)), "{a:?}");
        assert_eq!(run_rrp(&a, &mut src(k as u64)).output, Some(oracle_rrp(&a)));
    }
    let zero = DenseMatrix::zeros(field(2), 3, 3);
    assert_eq!(run_rpm(&zero, &mut src(0)).output.unwrap().rank(), 0);
}

#[test]
fn identity_has_no_smaller_rank() {
    let f = field(101);
    let a = DenseMatrix::identity(f, 3);
    let mut accepted = 0;
    for seed in 0..200 {
        let mut v = RankUpperVerifier::new(&a, Some(2));
        let mut p = ReplayProver::new([Body::Rank(2), Body::Field(vec![1, 1, 0])]);
        accepted += execute(&mut v, &mut p, &mut src(seed)).verdict.is_accept() as usize;
    }
    assert_eq!(accepted, 0);
    // The honest prover has no preimage of small weight to offer.
    assert!(run_rank_upper(&a, Some(2), &mut src(0)).verdict.is_abort());
}

#[test]
fn rank_bounds_on_rectangular_inputs() {
    let f = field(131_071);
    for (k, a) in random_rect(f, 40, 1..=7, 9).into_iter().enumerate() {
        let r = oracle_rank(&a);
        let upper = run_rank_upper(&a, None, &mut src(k as u64));
        assert_eq!(upper.output, Some(r));
        assert_eq!(upper.meter.matvecs, 2);
        let lower = run_rank_lower(&a, None, &mut src(k as u64));
        assert_eq!(lower.output.map(|c| c.rank()), Some(r));
        assert!(lower.meter.matvecs <= 1);
    }
}

#[test]
fn dependent_columns_are_not_certified() {
    let f = field(7);
    let a = DenseMatrix::from_rows(f, &[vec![1, 2, 0], vec![2, 4, 1], vec![3, 6, 1]]).unwrap();
    let run = run_rank_lower(&a, Some(vec![0, 1]), &mut src(4));
    assert!(!run.verdict.is_accept());
    assert!(run_rank_lower(&a, Some(vec![0, 2]), &mut src(4)).verdict.is_accept());
}

#[test]
fn triangular_equivalence_both_sides() {
    let f = field(101);
    let mut rng = seeded(6);
    let a = random_grp(f, 4, &mut rng);
    for id in [ProtocolId::TriEquivLower, ProtocolId::TriEquivUpper] {
        let inputs = honest_inputs(id, &a, 6).unwrap();
        assert!(run(id, &inputs, &mut src(6)).verdict.is_accept(), "{id}");
    }
    let unrelated = DenseMatrix::random(f, 4, 4, &mut rng);
    let run = run_triangular_equiv(&a, &unrelated, Side::Upper, &mut src(6)).unwrap();
    assert!(!run.verdict.is_accept());
}

#[test]
fn runs_are_reproducible() {
    let f = field(131_071);
    let a = random_grp(f, 6, &mut seeded(7));
    for id in ProtocolId::ALL {
        let inputs = honest_inputs(id, &a, 7).unwrap();
        let one = run(id, &inputs, &mut src(11));
        let two = run(id, &inputs, &mut src(11));
        assert_eq!(one.transcript, two.transcript, "{id}");
        assert_eq!(one.meter, two.meter, "{id}");
        assert_eq!(one.verdict, two.verdict, "{id}");
    }
}

#[test]
fn honest_runs_match_the_oracles() {
    let f = field(101);
    for (k, a) in random_square(f, 60, 1..=6, 31).into_iter().enumerate() {
        let s = k as u64;
        let det = oracle_det(&a).unwrap();
        assert_eq!(run_det(&a, &mut src(s)).unwrap().output, Some(det));
        assert_eq!(run_rpm(&a, &mut src(s)).output, Some(oracle_rpm(&a)));
        if det != 0 {
            let ldup = run_ldup(&a, &mut src(s)).unwrap();
            assert!(ldup.verdict.is_accept());
            assert_eq!(run_rpm_invertible(&a, &mut src(s)).unwrap().output, Some(oracle_rpm(&a)));
        }
    }
}
