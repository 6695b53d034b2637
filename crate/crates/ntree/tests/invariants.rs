use proptest::prelude::*;

use ntree::analysis::{discriminant_of, qo_oracle, QoOracle};
use ntree::pgood::{is_pgood, to_pgood};
use ntree::sections::{curve_sections, reconstruct};
use ntree::tree::{build_tree, build_tree_with_stats, check_growth, BuildOptions, EndKind, NewtonTree};
use ntree::{Error, SparsePoly};

fn monomial(e: &[u32]) -> String {
    let parts: Vec<String> =
        e.iter().enumerate().filter(|(_, &a)| a > 0).map(|(k, &a)| format!("x{}^{a}", k + 1)).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// `(z^p - s^p x^a)^m + nu x^b z^c`, a one-branch tower for generic data.
fn tower(dim: usize) -> impl Strategy<Value = String> {
    (
        2..=3u32,
        1..=3u32,
        prop::sample::select(vec![1i64, -1, 2, -2, 3]),
        prop::collection::vec(0..=4u32, dim),
        prop::sample::select(vec![1i64, -1, 4, -9]),
        prop::collection::vec(1..=9u32, dim),
        0..=2u32,
    )
        .prop_map(|(p, m, s, a, nu, b, c)| {
            let mu = s.pow(p);
            let a = if a.iter().all(|&k| k == 0) { vec![1; a.len()] } else { a };
            let zc = c.min(p - 1);
            format!("(z^{p} - ({mu})*{})^{m} + ({nu})*{}*z^{zc}", monomial(&a), monomial(&b))
        })
}

fn input() -> impl Strategy<Value = (String, usize)> {
    (1..=2usize).prop_flat_map(|d| tower(d).prop_map(move |t| (t, d)))
}

/// Trees of inputs whose face roots are rational; other inputs are discarded.
fn tree_of(text: &str, dim: usize) -> Option<NewtonTree> {
    let f = SparsePoly::parse(text, dim).unwrap();
    match build_tree(&f, BuildOptions::default()) {
        Ok(t) => Some(t),
        Err(e) if matches!(e.root_cause(), Error::NonRationalRoots { .. }) => None,
        Err(e) => panic!("{text}: {e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn parse_display_round_trip((text, d) in input()) {
        let f = SparsePoly::parse(&text, d).unwrap();
        prop_assert_eq!(SparsePoly::parse(&f.to_string(), d).unwrap(), f);
    }

    #[test]
    fn shift_and_back((text, d) in input(), k in 1..=3u32, c in -3i64..=3) {
        let f = SparsePoly::parse(&text, d).unwrap();
        let h = SparsePoly::parse(&format!("({c})*{}", monomial(&vec![k; d])), d).unwrap();
        prop_assert_eq!(f.shift_z(&h).unwrap().shift_z(&h.neg()).unwrap(), f);
    }

    #[test]
    fn json_round_trip((text, d) in input()) {
        let Some(t) = tree_of(&text, d) else { return Ok(()) };
        let back = NewtonTree::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back.canonical_json(), t.canonical_json());
    }

    #[test]
    fn pgood_is_idempotent((text, d) in input()) {
        let Some(t) = tree_of(&text, d) else { return Ok(()) };
        prop_assume!(!t.has_black_box());
        let g = to_pgood(&t).unwrap();
        prop_assert!(is_pgood(&g).unwrap());
        prop_assert_eq!(to_pgood(&g).unwrap().canonical_json(), g.canonical_json());
    }

    #[test]
    fn chain_rule_on_every_map((text, d) in input()) {
        let f = SparsePoly::parse(&text, d).unwrap();
        let opts = BuildOptions { check_chain_rule: true, ..BuildOptions::default() };
        match build_tree_with_stats(&f, opts) {
            Ok((_, stats)) => prop_assert_eq!(stats.chain_rule_failures, 0),
            Err(e) => prop_assert!(matches!(e.root_cause(), Error::NonRationalRoots { .. }), "{}", e),
        }
    }

    /// Strict growth needs every local `q_k` positive, which always holds
    /// in one variable.
    #[test]
    fn growth_in_one_variable(text in tower(1)) {
        let Some(t) = tree_of(&text, 1) else { return Ok(()) };
        prop_assert!(check_growth(&t));
    }

    #[test]
    fn discriminant_matches_determinant((text, d) in input()) {
        let f = SparsePoly::parse(&text, d).unwrap();
        let Ok(QoOracle::QuasiOrdinary(want)) = qo_oracle(&f) else { return Ok(()) };
        match discriminant_of(&f) {
            Ok(got) => prop_assert_eq!(got, want),
            Err(e) => prop_assert!(matches!(e.root_cause(), Error::NonRationalRoots { .. }), "{}", e),
        }
    }

    #[test]
    fn one_arrow_trees_come_back_from_sections((text, d) in input()) {
        let Some(t) = tree_of(&text, d) else { return Ok(()) };
        prop_assume!(!t.has_black_box());
        let g = to_pgood(&t).unwrap();
        let live = g.ends().iter().filter(|(e, _)| e.kind == EndKind::Arrow && !e.is_dead()).count();
        prop_assume!(live == 1);
        let r = reconstruct(&curve_sections(&g).unwrap()).unwrap();
        prop_assert_eq!(r.canonical_json(), g.canonical_json());
    }
}
