#![allow(dead_code)]

use dgmdiv::{DiagramPoint, PersistenceDiagram};
use proptest::prelude::*;

/// Diagrams with up to `max_finite` finite and `max_infinite` essential points.
pub fn diagram(max_finite: usize, max_infinite: usize) -> impl Strategy<Value = PersistenceDiagram> {
    (
        prop::collection::vec((0.0..10.0f64, 0.01..10.0f64), 0..=max_finite),
        prop::collection::vec(0.0..10.0f64, 0..=max_infinite),
    )
        .prop_map(|(finite, infinite)| {
            finite
                .into_iter()
                .map(|(b, l)| DiagramPoint::new(b, b + l).unwrap())
                .chain(infinite.into_iter().map(|b| DiagramPoint::infinite(b).unwrap()))
                .collect()
        })
}

/// Pairs of diagrams sharing the same number of essential points.
pub fn equal_count_pair(max_finite: usize, max_infinite: usize) -> impl Strategy<Value = (PersistenceDiagram, PersistenceDiagram)> {
    (0..=max_infinite).prop_flat_map(move |k| (diagram_with_infinite(max_finite, k), diagram_with_infinite(max_finite, k)))
}

pub fn diagram_with_infinite(max_finite: usize, infinite: usize) -> impl Strategy<Value = PersistenceDiagram> {
    (
        prop::collection::vec((0.0..10.0f64, 0.01..10.0f64), 0..=max_finite),
        prop::collection::vec(0.0..10.0f64, infinite),
    )
        .prop_map(|(finite, inf)| {
            finite
                .into_iter()
                .map(|(b, l)| DiagramPoint::new(b, b + l).unwrap())
                .chain(inf.into_iter().map(|b| DiagramPoint::infinite(b).unwrap()))
                .collect()
        })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a == b) || (a - b).abs() <= tol
}
