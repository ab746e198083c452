use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use shrinktarget_core::best_approx::{best_simultaneous, pell_convergent};
use shrinktarget_core::construct::{
    build_theta, params_from_rules, parse_transcript, serialize_transcript, verify_construction, ARule,
    ConstructionState, HRule,
};
use shrinktarget_core::criteria::{evidence_from_heights, series_prop32, window_bound, window_bound_from_values};
use shrinktarget_core::exact::{certified_dist_nearest_lattice, certified_linear_form, rat};
use shrinktarget_core::{ApproxKind, CertifiedScalar};

fn construction(a: ARule, n: usize) -> ConstructionState {
    build_theta(&params_from_rules(&a, &BigInt::one(), &HRule::Geom24a, n + 1).unwrap(), n).unwrap()
}

fn sim_evidence(s: &ConstructionState) -> Vec<CertifiedScalar> {
    let qs = s.qs();
    let values: Vec<CertifiedScalar> = qs[..s.n_steps]
        .iter()
        .map(|q| certified_dist_nearest_lattice(q, &s.theta).unwrap())
        .collect();
    let ev = evidence_from_heights(ApproxKind::Simultaneous, 2, &rat(0, 1), &qs[..=s.n_steps], &values, 48).unwrap();
    ev.samples.into_iter().map(|x| x.theta_scaled).collect()
}

#[test]
fn bounded_construction_has_theta_evidence() {
    // q_{n+1}^{1/2} ‖q_n θ‖ >= h_{n+1} / (2 q_{n+1}^{1/2}) >= 1 / (4 sqrt(66))
    let s = construction(ARule::Const(33.into()), 8);
    for v in sim_evidence(&s) {
        assert!(v.lo() >= rat(3, 100), "{v:?}");
    }
}

#[test]
fn polynomial_construction_loses_theta_evidence() {
    let s = construction(ARule::Poly(4), 12);
    let v = sim_evidence(&s);
    let (first, last) = (&v[0], &v[v.len() - 1]);
    assert!(last.hi() * BigRational::from_integer(10.into()) < first.lo());
}

#[test]
fn prop32_terms_on_pell_records() {
    let theta = pell_convergent(30);
    let qs: Vec<BigInt> = best_simultaneous(&theta, 10_000)
        .unwrap()
        .iter()
        .map(|r| BigInt::from(r.height()))
        .collect();
    let report = series_prop32(&theta, &qs, qs.len() - 1).unwrap();
    // d = 1: (q_n ‖q_{n-1} θ‖)^{1/2} with q_n ‖q_{n-1} θ‖ in (1/2, 1]
    for t in &report.terms {
        assert!(t.value.lo() > rat(7, 10) && t.value.hi() <= rat(1, 1), "{t:?}");
    }
}

#[test]
fn transcript_round_trip_preserves_verification() {
    let s = construction(ARule::Const(40.into()), 4);
    let back = parse_transcript(&serialize_transcript(&s)).unwrap();
    assert_eq!(back, s);
    let a = verify_construction(&s, 0).unwrap();
    let b = verify_construction(&back, 0).unwrap();
    assert!(a.all_passed());
    assert_eq!(a, b);
}

#[test]
fn window_bound_agrees_with_explicit_values() {
    let s = construction(ARule::Poly(4), 5);
    let xs = s.deltas_2d();
    let delta = rat(2, 1);
    for n in 1..=3 {
        let wb = window_bound(&s.theta, &xs, &delta, n, 64).unwrap();
        let sup = |v: &[BigInt]| v.iter().map(|c| c.magnitude().clone().into()).max().unwrap();
        let eps = [
            certified_linear_form(&xs[n - 1], &s.theta).unwrap(),
            certified_linear_form(&xs[n], &s.theta).unwrap(),
        ];
        let same = window_bound_from_values(2, &[sup(&xs[n]), sup(&xs[n + 1])], &eps, &delta, n, 64).unwrap();
        assert_eq!(wb, same);
        assert!(wb.l_n.hi() < wb.l_next.lo());
    }
}
