mod common;

use common::*;
use proptest::prelude::*;

use ifsim::{validate_bia, ActionKind, RawModel, RawTransition, WeightedAutomaton};

const INS: [&str; 2] = ["a", "b"];
const OUTS: [&str; 2] = ["c", "d"];

fn raw_model() -> impl Strategy<Value = RawModel> {
    let name = prop::sample::select(vec!["p", "q", "r", "p", "a", "c", "bad name", ""]);
    let action = prop::sample::select(vec!["a", "b", "c", "d", "zz", "", "x y"]);
    (
        prop::collection::vec(name.clone(), 0..5),
        prop::collection::vec(action.clone(), 0..3),
        prop::collection::vec(action.clone(), 0..3),
        name.clone(),
        prop::collection::vec((name.clone(), action, name, 0u64..2), 0..8),
    )
        .prop_map(|(states, inputs, outputs, initial, ts)| RawModel {
            name: "R".into(),
            inputs: inputs.into_iter().map(String::from).collect(),
            outputs: outputs.into_iter().map(String::from).collect(),
            states: states.into_iter().map(String::from).collect(),
            initial: initial.into(),
            transitions: ts
                .into_iter()
                .map(|(from, action, to, weight)| RawTransition {
                    from: from.into(),
                    action: action.into(),
                    to: to.into(),
                    weight,
                })
                .collect(),
        })
}

proptest! {
    #[test]
    fn validation_is_total(raw in raw_model()) {
        match validate_bia(&raw) {
            Ok(bia) => {
                prop_assert_eq!(bia.num_states(), raw.states.len());
                for q in 0..bia.num_states() {
                    for a in bia.inputs() {
                        prop_assert!(bia.successors(q, a).count() <= 1);
                    }
                }
            }
            Err(errors) => prop_assert!(!errors.is_empty()),
        }
    }

    #[test]
    fn inputs_are_deterministic_and_enabled_matches_post(table in table_strategy(5, 2, 2)) {
        let f = from_table("F", &table, &INS, &OUTS);
        for q in f.states() {
            for a in INS {
                prop_assert!(f.post(q, a).unwrap().len() <= 1);
            }
            for kind in [ActionKind::Input, ActionKind::Output] {
                let scanned: Vec<&str> = f
                    .alphabet(kind)
                    .iter()
                    .map(String::as_str)
                    .filter(|a| !f.post(q, a).unwrap().is_empty())
                    .collect();
                let enabled: Vec<&str> = f.enabled(q, kind).unwrap().into_iter().collect();
                prop_assert_eq!(enabled, scanned);
            }
        }
    }

    #[test]
    fn json_round_trip(table in table_strategy(5, 2, 2)) {
        let f = from_table("F", &table, &INS, &OUTS);
        let text = f.to_raw().to_json();
        let back = WeightedAutomaton::from_raw(&RawModel::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn reachable_is_closed_and_contains_initial(table in table_strategy(6, 2, 2)) {
        let f = from_table("F", &table, &INS, &OUTS);
        let reach = f.reachable();
        prop_assert!(reach.contains(&f.initial()));
        for &q in &reach {
            for t in f.outgoing(q) {
                prop_assert!(reach.contains(&t.to));
            }
        }
    }
}
