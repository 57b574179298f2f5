use semiperiodic_core::thresholds::{rates, ModulationCase};
use semiperiodic_core::{threshold_table, Exponent, Rational};

fn e(p: i64) -> Exponent {
    Exponent::integer(p).unwrap()
}

#[test]
fn sobolev_threshold_at_p4() {
    let t = threshold_table(1, 1);
    // (m+2n)(1/2-1/p) - 2/p
    assert_eq!(t.sobolev_smoothing(e(4)), Some(Rational::new(1, 4)));
}

#[test]
fn modulation_threshold_low_case() {
    let t = threshold_table(1, 1);
    assert_eq!(t.modulation_case(e(3), e(2)), Some(ModulationCase::Low));
    assert_eq!(t.modulation_smoothing(e(3), e(2)), Some(Rational::from_integer(0)));
}

#[test]
fn necessary_modulation_clamps_at_zero() {
    let t = threshold_table(1, 1);
    assert_eq!(t.necessary_modulation(e(4), e(1)), Rational::from_integer(0));
}

#[test]
fn evaluate_lists_the_same_values() {
    let rows = threshold_table(1, 1).evaluate(e(4), e(2), e(4));
    assert!(!rows.is_empty());
    assert!(rows.iter().any(|r| r.value == Some(Rational::new(1, 4))));
}

#[test]
fn rescaling_rate_matches_closed_form() {
    for (m, n) in [(1, 1), (2, 1), (1, 2)] {
        for p in [2, 4, 6] {
            let want = Rational::from_integer(n as i64) - Rational::new(2 * m as i64 + n as i64 + 2, p);
            assert_eq!(rates::rescaling(m, n, e(p)), want);
        }
    }
}
