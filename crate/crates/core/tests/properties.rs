use std::sync::OnceLock;

use codecraft_core::bb::bundled_spec;
use codecraft_core::craft::ancilla_progression;
use codecraft_core::distance::{min_weight, oracle_min_weight, SearchConfig};
use codecraft_core::gf2::{BitMatrix, BitVector};
use codecraft_core::{Error, Pauli, Session, Shape, Target};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), cols), rows)
        .prop_map(move |r| BitMatrix::from_rows(cols, r.into_iter().map(BitVector::from_bits).collect()))
}

fn session54() -> &'static Session {
    static S: OnceLock<Session> = OnceLock::new();
    S.get_or_init(|| {
        let spec = bundled_spec("54").unwrap();
        let mut s = Session::new(spec, &SearchConfig::default()).unwrap();
        s.basis = s.code.canonical_logicals().unwrap();
        s
    })
}

proptest! {
    #[test]
    fn rank_and_kernel_agree(m in matrix(6, 11)) {
        let k = m.kernel_basis();
        prop_assert_eq!(m.rank() + k.rows(), m.cols());
        prop_assert_eq!(k.rank(), k.rows());
        for v in k.iter_rows() {
            prop_assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn rowspace_membership_matches_solve(m in matrix(5, 9), x in proptest::collection::vec(any::<bool>(), 5)) {
        let v = m.combine_rows(&BitVector::from_bits(x));
        prop_assert!(m.in_rowspace(&v).unwrap());
        let y = m.solve_left(&v).unwrap().unwrap();
        prop_assert_eq!(m.combine_rows(&y), v);
    }

    #[test]
    fn exhaustive_search_matches_brute_force(h in matrix(4, 12), l in matrix(2, 12)) {
        let cfg = SearchConfig { exact_limit: 12, ..SearchConfig::default() };
        let found = min_weight(&h, &l, &cfg).unwrap().map(|c| {
            assert!(c.exact && h.mul_vec(&c.vector).is_zero() && !l.mul_vec(&c.vector).is_zero());
            c.weight
        });
        prop_assert_eq!(found, oracle_min_weight(&h, &l).unwrap());
    }

    #[test]
    fn targets_round_trip(x in any::<bool>(), a in proptest::collection::btree_set(0usize..20, 1..4),
                          b in proptest::option::of(proptest::collection::btree_set(0usize..20, 1..3))) {
        let pauli = if x { Pauli::X } else { Pauli::Z };
        let mut blocks = vec![a.into_iter().collect::<Vec<_>>()];
        blocks.extend(b.map(|b| b.into_iter().collect()));
        let t = Target { pauli, blocks };
        prop_assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deformed_codes_are_css_and_keep_the_rest(x in any::<bool>(), mask in 1u8..64, step in 0usize..3, left in any::<bool>()) {
        let s = session54();
        let pauli = if x { Pauli::X } else { Pauli::Z };
        let side = match (pauli, left) {
            (Pauli::X, true) => codecraft_core::bb::Side::Left,
            (Pauli::X, false) => codecraft_core::bb::Side::Right,
            (Pauli::Z, true) => codecraft_core::bb::Side::Bottom,
            (Pauli::Z, false) => codecraft_core::bb::Side::Top,
        };
        let (columns, _) = ancilla_progression(&s.code, pauli, side, step + 1).unwrap()[step];
        let t = Target { pauli, blocks: vec![(0..6).filter(|i| mask >> i & 1 == 1).collect()] };
        match s.measure(&t, Shape::Single { side, columns }) {
            Ok(m) => {
                prop_assert!(m.deformed.validate_css());
                prop_assert_eq!(m.unmeasured.rows(), s.code.logical_count() - 1);
                let f = m.deformed.frame();
                prop_assert!(f.h_x.in_rowspace(&f.lift(&m.channel.target).unwrap()).unwrap());
                let un = f.lift_rows(&m.unmeasured).unwrap();
                prop_assert_eq!(f.h_x.vstack(&un).rank(), f.h_x.rank() + un.rows());
            }
            // a short stretch may not reach every logical in the product
            Err(Error::NoChannel | Error::MeasuresNonTarget | Error::BlockForm(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
