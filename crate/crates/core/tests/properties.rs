//! Property tests for the series arithmetic: valuation additivity under
//! multiplication, the ultrametric bound, and serialization round trips.

use lseries_core::field::FieldDesc;
use lseries_core::json::{tate_from_json, tate_to_json};
use lseries_core::tate::TateElem;
use lseries_core::tpoly::TPoly;
use proptest::prelude::*;
use std::sync::Arc;

fn arb_series(q: u64, s: usize) -> impl Strategy<Value = TateElem> {
    let fd: Arc<FieldDesc> = FieldDesc::base(q, 1).unwrap();
    proptest::collection::vec((-2i64..6, 0i64..q as i64, 0u16..3), 0..6).prop_map(move |terms| {
        let mut x = TateElem::zero_to(&fd, s, 0, 8);
        for (e, c, te) in terms {
            if c == 0 {
                continue;
            }
            let mut exps = vec![0u16; s];
            if s > 0 {
                exps[0] = te;
            }
            let mono = TPoly::monomial(fd.from_int(c), &exps, &fd);
            if !mono.is_zero() {
                x.coeffs.insert(e, mono);
            }
        }
        x
    })
}

proptest! {
    #[test]
    fn valuation_adds_under_multiplication(
        x in arb_series(3, 1),
        y in arb_series(3, 1),
    ) {
        // v(fg) = v(f) + v(g) whenever both stored parts are nonzero and the
        // product's leading term is still inside the known window
        if let (Some(vx), Some(vy)) = (x.vmin(), y.vmin()) {
            let p = x.mul(&y);
            if vx + vy < p.prec {
                prop_assert_eq!(p.vmin(), Some(vx + vy));
            }
        }
    }

    #[test]
    fn ultrametric_bound(x in arb_series(3, 1), y in arb_series(3, 1)) {
        let s = x.add(&y).unwrap();
        if let (Some(nx), Some(ny), Some(ns)) =
            (x.log_norm_num(), y.log_norm_num(), s.log_norm_num())
        {
            prop_assert!(ns <= nx.max(ny));
        }
    }

    #[test]
    fn serialization_roundtrip(x in arb_series(2, 2)) {
        let v = tate_to_json(&x);
        let back = tate_from_json(&v).unwrap();
        prop_assert_eq!(x, back);
    }
}

proptest! {
    #[test]
    fn gauss_norm_is_max_coefficient_norm(x in arb_series(3, 1)) {
        // grade 0: the norm from vmin is the max over e of
        // ||coeff_e|| q^{-e}, and nonzero t-polynomial coefficients over a
        // field have Gauss norm exactly 1
        if let Some(v) = x.vmin() {
            let from_vmin = -2 * v; // (q-1) log_q ||x||
            let from_coeffs = x
                .coeffs
                .keys()
                .map(|e| -2 * e)
                .max()
                .unwrap();
            prop_assert_eq!(from_vmin, from_coeffs);
            prop_assert_eq!(x.log_norm_num(), Some(from_vmin));
        }
    }
}
