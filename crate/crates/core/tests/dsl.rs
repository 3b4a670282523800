use std::fs;
use std::path::Path;

use proptest::prelude::*;
use qrsim_core::dsl::{parse_circuit, serialize_circuit};
use qrsim_core::protocols::{full_purification_circuit, swap_circuit, ErrorSpec, PurificationMode, SwapLayout};
use qrsim_core::{Circuit, GateOp};

fn bundled() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/circuits");
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn bundled_circuits_round_trip() {
    let all = bundled();
    assert!(all.len() >= 5);
    for (name, text) in all {
        let c = parse_circuit(&text).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        let canon = serialize_circuit(&c);
        let again = parse_circuit(&canon).unwrap();
        assert_eq!(serialize_circuit(&again), canon, "{name}");
        assert_eq!(again.num_qubits(), c.num_qubits());
        assert_eq!(again.measurements(), c.measurements());
        for (a, b) in c.ops().iter().zip(again.ops()) {
            match (a, b) {
                (GateOp::U1(qa, ta), GateOp::U1(qb, tb)) => {
                    assert_eq!(qa, qb);
                    assert!((ta - tb).abs() < 1e-11, "{name}");
                }
                _ => assert_eq!(a, b, "{name}"),
            }
        }
    }
}

#[test]
fn bundled_protocol_circuits_match_builders() {
    let get = |n: &str| {
        let (_, t) = bundled().into_iter().find(|(f, _)| f == n).unwrap();
        parse_circuit(&t).unwrap()
    };
    assert_eq!(get("swap.qc"), swap_circuit(&SwapLayout::default()).unwrap());
    let spec = ErrorSpec::all(0.125);
    assert_eq!(get("purify_ancilla.qc"), full_purification_circuit(&spec, PurificationMode::Ancilla).unwrap());
    assert_eq!(get("purify_direct.qc"), full_purification_circuit(&spec, PurificationMode::Direct).unwrap());
}

#[test]
fn swap_circuit_round_trip_is_structural() {
    let c = swap_circuit(&SwapLayout::default()).unwrap();
    assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c);
}

#[test]
fn negative_corpus_is_located() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus/invalid");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let expect: usize = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("// expect-line:"))
            .map(|s| s.trim().parse().unwrap())
            .unwrap_or_else(|| panic!("{} lacks an expect-line header", path.display()));
        let diags = parse_circuit(&text).expect_err(&path.display().to_string());
        assert!(
            diags.iter().any(|d| d.span.line == expect && d.span.column >= 1 && !d.message.is_empty()),
            "{}: {diags:?}",
            path.display()
        );
        n += 1;
    }
    assert!(n >= 20);
}

fn arb_op(n: usize) -> impl Strategy<Value = GateOp> {
    let q = 0..n;
    prop_oneof![
        q.clone().prop_map(GateOp::H),
        q.clone().prop_map(GateOp::X),
        q.clone().prop_map(GateOp::Y),
        q.clone().prop_map(GateOp::Z),
        q.clone().prop_map(GateOp::S),
        q.clone().prop_map(GateOp::Sdg),
        (q.clone(), -10.0f64..10.0).prop_map(|(q, t)| GateOp::U1(q, t)),
        (q.clone(), 1..n.max(2)).prop_map(move |(c, d)| GateOp::Cx(c, (c + d) % n.max(2))),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=6)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(arb_op(n), 0..40), prop::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n)))
        .prop_map(|(n, ops, measured)| {
            let mut c = Circuit::new(n).unwrap();
            c.extend(&ops).unwrap();
            for (k, q) in measured.iter().rev().enumerate() {
                c.measure(*q, k).unwrap();
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_serialize_idempotent(c in arb_circuit()) {
        let text = serialize_circuit(&c);
        let once = parse_circuit(&text).unwrap();
        let twice = parse_circuit(&serialize_circuit(&once)).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.ops().len(), c.ops().len());
        for (a, b) in c.ops().iter().zip(once.ops()) {
            match (a, b) {
                (GateOp::U1(qa, ta), GateOp::U1(qb, tb)) => {
                    prop_assert_eq!(qa, qb);
                    prop_assert!((ta - tb).abs() <= 1e-11 * ta.abs().max(1.0));
                }
                _ => prop_assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn parser_never_panics(src in "[a-z0-9\\[\\](),\\->/ \\n.]{0,80}") {
        let _ = parse_circuit(&src);
    }
}
