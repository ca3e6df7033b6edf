//! Random interleavings of steps and scandal triggers.

#![allow(dead_code)]

use proptest::prelude::*;
use votesim_core::{step, trigger_scandal, WorldState};

#[derive(Debug, Clone)]
pub enum Action {
    Step,
    Trigger(usize, f64),
}

pub fn actions(max: usize) -> impl Strategy<Value = Vec<Action>> {
    prop::collection::vec(
        prop_oneof![
            3 => Just(Action::Step),
            1 => (0..5usize, 0.0..=1.0f64).prop_map(|(c, p)| Action::Trigger(c, p)),
        ],
        0..=max,
    )
}

pub fn apply(world: &WorldState, action: &Action) -> WorldState {
    match *action {
        Action::Step => step(world),
        Action::Trigger(c, p) => {
            let ids = world.candidate_ids();
            trigger_scandal(world, ids[c % ids.len()], p).expect("valid trigger")
        }
    }
}

pub fn assert_clamped(w: &WorldState) -> Result<(), TestCaseError> {
    for s in &w.scandals {
        prop_assert!((0.0..=1.0).contains(&s.potential), "potential {}", s.potential);
    }
    for c in &w.candidates {
        prop_assert!((0.0..=1.0).contains(&c.repulsion), "repulsion {}", c.repulsion);
    }
    for v in &w.voters {
        prop_assert!(v.position.in_unit_square(), "position {:?}", v.position);
    }
    Ok(())
}
