use proptest::prelude::*;
use toricgm::exact_arith::Rat;
use toricgm_cli::formats::{
    parse_value, to_json, BasisFile, BinomialEntry, GraphFile, MatrixFile, MatrixRow, ValuesFile, VariableEntry,
};

fn reparse<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(v: &T) -> T {
    serde_json::from_str(&to_json(v)).unwrap()
}

#[test]
fn decimals_and_fractions_parse_exactly() {
    assert_eq!(parse_value("0.125").unwrap(), Rat::new(1.into(), 8.into()));
    assert_eq!(parse_value("1/8").unwrap(), Rat::new(1.into(), 8.into()));
    assert_eq!(parse_value(" 3 ").unwrap(), Rat::from_integer(3.into()));
    assert_eq!(parse_value("-.5").unwrap(), Rat::new((-1).into(), 2.into()));
    assert_eq!(parse_value("2.").unwrap(), Rat::from_integer(2.into()));
    for bad in ["", ".", "1/0", "abc", "1.2.3", "1e-3", "0x10"] {
        assert!(parse_value(bad).is_err(), "{bad}");
    }
}

#[test]
fn value_order_is_checked() {
    let f = ValuesFile { order: "lex-first-fastest".into(), values: vec!["1".into(), "1".into()] };
    assert!(f.to_distribution(2).unwrap_err().message.contains("lex-last-fastest"));
}

#[test]
fn unknown_fields_are_rejected() {
    let s = r#"{"order":"lex-last-fastest","values":["1"],"extra":1}"#;
    assert!(serde_json::from_str::<ValuesFile>(s).is_err());
}

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9_]{0,6}"
}

proptest! {
    #[test]
    fn rationals_round_trip_through_strings(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
        let r = Rat::new(n.into(), d.into());
        prop_assert_eq!(parse_value(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn decimals_match_their_fraction(whole in 0u32..10_000, frac in 0u32..10_000) {
        let s = format!("{whole}.{frac:04}");
        let want = Rat::new((i64::from(whole) * 10_000 + i64::from(frac)).into(), 10_000.into());
        prop_assert_eq!(parse_value(&s).unwrap(), want);
    }

    #[test]
    fn values_files_round_trip(vals in prop::collection::vec((0i64..1000, 1i64..1000), 0..20)) {
        let rats: Vec<Rat> = vals.iter().map(|&(n, d)| Rat::new(n.into(), d.into())).collect();
        let f = ValuesFile::from_rats(&rats);
        prop_assert_eq!(&reparse(&f), &f);
        prop_assert_eq!(f.to_distribution(rats.len()).map(|p| p.values().to_vec()).unwrap_or_default(), rats);
    }

    #[test]
    fn graph_and_matrix_files_round_trip(
        names in prop::collection::vec(name(), 1..6),
        levels in prop::collection::vec(2usize..5, 6),
        edges in prop::collection::vec((0usize..6, 0usize..6), 0..8),
        rows in prop::collection::vec(prop::collection::vec(0i64..5, 3), 1..5),
    ) {
        let variables: Vec<VariableEntry> =
            names.iter().zip(&levels).map(|(n, &l)| VariableEntry { name: n.clone(), levels: l }).collect();
        let k = names.len();
        let edges = edges.iter().map(|&(a, b)| (names[a % k].clone(), names[b % k].clone())).collect();
        let g = GraphFile { variables, edges };
        prop_assert_eq!(&reparse(&g), &g);
        let m = MatrixFile {
            rows: rows.iter().enumerate().map(|(i, r)| MatrixRow { label: format!("r{i}"), entries: r.clone() }).collect(),
            columns: vec!["a".into(), "b".into(), "c".into()],
        };
        prop_assert_eq!(&reparse(&m), &m);
    }

    #[test]
    fn basis_files_round_trip(pairs in prop::collection::vec((prop::collection::vec(0u32..3, 4), prop::collection::vec(0u32..3, 4)), 0..6)) {
        let b = BasisFile {
            order: "grevlex".into(),
            binomials: pairs.into_iter().map(|(u, v)| BinomialEntry { u, v, text: "p - q".into() }).collect(),
        };
        prop_assert_eq!(&reparse(&b), &b);
    }

    #[test]
    fn valid_graphs_survive_the_domain_round_trip(n in 2usize..6, mask in 0u32..1024) {
        let variables: Vec<VariableEntry> = (1..=n).map(|i| VariableEntry { name: format!("X{i}"), levels: 2 }).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(a, b))| (format!("X{}", a + 1), format!("X{}", b + 1)))
            .collect();
        let f = GraphFile { variables, edges };
        let back = GraphFile::from_graph(&f.to_graph().unwrap());
        prop_assert_eq!(back.to_graph().unwrap(), f.to_graph().unwrap());
    }
}
