mod common;

use common::{arb_complex, arb_family, close, eval_plain};
use proptest::prelude::*;
use schwarzian_lab::expr::{parse, parse_complex};

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, max_global_rejects: 50_000, ..ProptestConfig::default() })]

    #[test]
    fn pretty_print_round_trips(f in arb_family(true)) {
        let text = f.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn jet_value_matches_plain_evaluation(f in arb_family(true), n in 1u32..=16, z in arb_complex(2.0)) {
        let nf = n as f64;
        match (f.eval_jet(nf, z), eval_plain(f.root(), nf, z)) {
            (Ok(j), Some(v)) => prop_assert!(close(j.v, v, 1e-12), "{f}: {} vs {v}", j.v),
            // the jet path rejects more (overflow guard, near-zero divisors) but never less
            (Ok(j), None) => prop_assert!(false, "plain evaluation failed where jet gave {j:?} for {f}"),
            (Err(_), _) => {}
        }
    }

    #[test]
    fn stray_character_is_reported_where_it_sits(f in arb_family(true), at in any::<prop::sample::Index>()) {
        let text = f.to_string();
        let k = at.index(text.len() + 1);
        let mut bad = text.clone();
        bad.insert(k, '@');
        let err = parse(&bad).unwrap_err();
        prop_assert_eq!(err.position, k);
    }

    #[test]
    fn truncation_errors_inside_the_prefix(f in arb_family(true), at in any::<prop::sample::Index>()) {
        let text = f.to_string();
        let k = at.index(text.len());
        if let Err(e) = parse(&text[..k]) {
            prop_assert!(e.position <= k, "{} > {k} for {:?}", e.position, &text[..k]);
        }
    }

    #[test]
    fn complex_literals_round_trip(re in -50i32..50, im in -50i32..50) {
        let (a, b) = (re as f64 / 4.0, im as f64 / 4.0);
        let text = if b < 0.0 { format!("{a}-{}i", -b) } else { format!("{a}+{b}i") };
        let z = parse_complex(&text).unwrap();
        prop_assert_eq!((z.re, z.im), (a, b));
    }
}

#[test]
fn whitespace_is_insignificant() {
    let a = parse("exp( z / ( n * z + 1 ) )").unwrap();
    let b = parse("exp(z/(n*z+1))").unwrap();
    assert_eq!(a, b);
}
