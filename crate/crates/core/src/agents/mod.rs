//! Edge and retailer agent state machines.
//!
//! Agents hold only local state plus one staleness buffer per peer. They
//! never touch each other directly; the simulator moves values between them.

mod buffer;
mod edge;
mod retailer;
mod schedule;

pub use buffer::StalenessBuffer;
pub use edge::{EdgeAgentState, EdgeSnapshot, PriceFeed};
pub use retailer::{FlowFeed, RetailerAgentState, RetailerSnapshot};
pub use schedule::StepSchedule;

#[cfg(test)]
pub(crate) mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::problem::{CostFunction, Edge, Instance, Node, PrimalDualForm, SupplyChainProblem, Tier};

    pub(crate) fn fan_in_form(inbound: usize, d: f64) -> PrimalDualForm {
        let mut nodes = vec![Node {
            id: "R".into(),
            tier: Tier::Retailer,
        }];
        let mut edges = Vec::new();
        for i in 0..inbound {
            nodes.push(Node {
                id: format!("W{i}"),
                tier: Tier::Warehouse,
            });
            edges.push(Edge {
                id: format!("E{i}"),
                from: format!("W{i}"),
                to: "R".into(),
                cost: CostFunction::Linear(1.0),
                capacity: 10.0,
            });
        }
        let p = SupplyChainProblem::new(nodes, edges, BTreeMap::from([("R".to_string(), d)])).unwrap();
        Instance::Dag(p).to_form()
    }

    pub(crate) fn single_edge_form(c: f64, u: f64, d: f64) -> PrimalDualForm {
        let p = SupplyChainProblem::new(
            vec![
                Node {
                    id: "W".into(),
                    tier: Tier::Warehouse,
                },
                Node {
                    id: "R".into(),
                    tier: Tier::Retailer,
                },
            ],
            vec![Edge {
                id: "WR".into(),
                from: "W".into(),
                to: "R".into(),
                cost: CostFunction::Linear(c),
                capacity: u,
            }],
            BTreeMap::from([("R".to_string(), d)]),
        )
        .unwrap();
        Instance::Dag(p).to_form()
    }

    proptest! {
        #[test]
        fn edge_update_stays_in_box(c in 0.1f64..5.0, u in 0.1f64..10.0, x0 in 0.0f64..1.0,
                                    price in -10.0f64..10.0, step in 0.0f64..5.0) {
            let form = single_edge_form(c, u, 1.0);
            let mut a = EdgeAgentState::new(&form, 0, x0 * u, &[0.0], 1);
            let x = a.update(&[price], step, None);
            prop_assert!((0.0..=u).contains(&x));
        }

        #[test]
        fn linear_edge_update_is_non_expansive(c in 0.1f64..5.0, u in 0.1f64..10.0, x0 in 0.0f64..1.0,
                                               price in 0.0f64..10.0, step in 0.0f64..5.0) {
            let form = single_edge_form(c, u, 1.0);
            let mut a = EdgeAgentState::new(&form, 0, x0 * u, &[0.0], 1);
            let before = a.x();
            let g = c - price;
            // The constant-gradient step drifts toward this endpoint.
            let fixed = if g > 0.0 { 0.0 } else if g < 0.0 { u } else { before };
            let after = a.update(&[price], step, None);
            prop_assert!((after - fixed).abs() <= (before - fixed).abs() + 1e-12);
        }

        #[test]
        fn retailer_price_nonnegative(d in 0.1f64..5.0, flows in prop::collection::vec(0.0f64..10.0, 1..4),
                                      l0 in 0.0f64..5.0, step in 0.0f64..2.0) {
            let form = fan_in_form(flows.len(), d);
            let mut a = RetailerAgentState::new(&form, 0, l0, &vec![0.0; flows.len()], 1);
            prop_assert!(a.update(&flows, step, None) >= 0.0);
        }

        #[test]
        fn replaying_inputs_reproduces_trajectory(prices in prop::collection::vec(0.0f64..4.0, 1..50)) {
            let form = single_edge_form(1.3, 2.0, 1.0);
            let run = || {
                let mut a = EdgeAgentState::new(&form, 0, 0.5, &[0.0], 3);
                prices.iter().enumerate().map(|(k, &p)| a.update(&[p], StepSchedule::default().value(k as u64), None)).collect::<Vec<_>>()
            };
            let first = run();
            let second = run();
            prop_assert_eq!(first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            second.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }
}
