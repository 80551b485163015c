mod common;

use common::{arb_complex, arb_family, c, close, fd_derivatives, plain};
use num_complex::Complex64;
use proptest::prelude::*;
use schwarzian_lab::Jet3;

fn arb_jet() -> impl Strategy<Value = Jet3> {
    (arb_complex(3.0), arb_complex(3.0), arb_complex(3.0), arb_complex(3.0))
        .prop_map(|(v, d1, d2, d3)| Jet3::new(v, d1, d2, d3))
}

fn jets_close(a: &Jet3, b: &Jet3, rel: f64) -> bool {
    a.components().iter().zip(b.components()).all(|(x, y)| close(*x, y, rel))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, max_global_rejects: 50_000, ..ProptestConfig::default() })]

    #[test]
    fn jet_matches_finite_differences(f in arb_family(true), n in 1u32..=8, z in arb_complex(1.5)) {
        let nf = n as f64;
        let Ok(jet) = f.eval_jet(nf, z) else { return Ok(()) };
        let g = plain(&f, nf);
        let Some((fd, spread)) = fd_derivatives(&g, z) else { return Ok(()) };
        let scale = jet.components().iter().map(|x| x.norm()).fold(1.0, f64::max);
        // only compare where the oracle itself has converged and values are moderate
        prop_assume!(scale < 1e3 && spread.iter().all(|s| *s < 1e-2 * scale));
        prop_assert!(close(jet.v, fd[0], 1e-12), "value {} vs {}", jet.v, fd[0]);
        prop_assert!(close(jet.d1, fd[1], 1e-6), "d1 {} vs {} for {f}", jet.d1, fd[1]);
        prop_assert!(close(jet.d2, fd[2], 1e-4), "d2 {} vs {} for {f}", jet.d2, fd[2]);
        prop_assert!(close(jet.d3, fd[3], 1e-4), "d3 {} vs {} for {f}", jet.d3, fd[3]);
    }

    #[test]
    fn multiplication_commutes(a in arb_jet(), b in arb_jet()) {
        prop_assert!(jets_close(&(a * b), &(b * a), 1e-12));
    }

    #[test]
    fn multiplication_associates(a in arb_jet(), b in arb_jet(), d in arb_jet()) {
        prop_assert!(jets_close(&((a * b) * d), &(a * (b * d)), 1e-12));
    }

    #[test]
    fn division_inverts_multiplication(a in arb_jet(), b in arb_jet()) {
        prop_assume!(b.v.norm() > 0.1);
        let q = a.checked_div(b).unwrap();
        prop_assert!(jets_close(&(q * b), &a, 1e-8));
    }

    #[test]
    fn exp_inverts_log(u in arb_jet()) {
        prop_assume!(u.v.norm() > 0.1);
        let back = u.ln().unwrap().exp().unwrap();
        prop_assert!(jets_close(&back, &u, 1e-10));
    }

    #[test]
    fn powi_matches_repeated_product(u in arb_jet(), k in 0i32..6) {
        let mut acc = Jet3::constant(c(1.0, 0.0));
        for _ in 0..k {
            acc = acc * u;
        }
        prop_assert!(jets_close(&u.powi(k).unwrap(), &acc, 1e-12));
    }

    #[test]
    fn chain_rule_by_seeding(f in arb_family(false), g in arb_family(false), z in arb_complex(1.0)) {
        // evaluating g on the jet of f must equal composing g's jet at f(z)
        let Ok(jf) = f.eval_jet(2.0, z) else { return Ok(()) };
        prop_assume!(jf.components().iter().all(|x| x.norm() < 1e3));
        let Ok(jg) = g.eval_jet(2.0, jf.v) else { return Ok(()) };
        prop_assume!(jg.components().iter().all(|x| x.norm() < 1e3));
        let seeded = g.eval_with(2.0, jf, &Default::default()).unwrap();
        let composed = jf.compose(jg.components());
        prop_assert!(jets_close(&seeded, &composed, 1e-9), "{seeded:?} vs {composed:?}");
    }
}

#[test]
fn derivative_accessor_matches_components() {
    let j = Jet3::var(Complex64::new(2.0, 0.0)).powi(3).unwrap();
    assert_eq!(j.components(), [c(8.0, 0.0), c(12.0, 0.0), c(12.0, 0.0), c(6.0, 0.0)]);
    for k in 0..4 {
        assert_eq!(j.derivative(k), j.components()[k]);
    }
}
