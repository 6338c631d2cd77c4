mod common;

use common::diagram;
use dgmdiv::diagram::{diagonal_gap, linf_distance, parse_diagram, plane_linf, serialize_diagram};
use dgmdiv::{DiagramPoint, ExtendedValue, PersistenceDiagram};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = DiagramPoint> {
    prop_oneof![
        3 => (-5.0..5.0f64, 0.01..5.0f64).prop_map(|(b, l)| DiagramPoint::new(b, b + l).unwrap()),
        1 => (-5.0..5.0f64).prop_map(|b| DiagramPoint::infinite(b).unwrap()),
    ]
}

#[test]
fn example_points() {
    let p = |b, d| DiagramPoint::new(b, d).unwrap();
    assert_eq!(linf_distance(&p(2.0, 10.0), &p(3.0, 11.0)).get(), 1.0);
    assert_eq!(linf_distance(&p(5.0, f64::INFINITY), &p(5.0, f64::INFINITY)), ExtendedValue::ZERO);
    assert!(linf_distance(&p(5.0, f64::INFINITY), &p(3.0, 11.0)).is_infinite());
    assert_eq!(diagonal_gap(&p(2.0, 10.0)).get(), 4.0);
    assert_eq!(p(2.0, 10.0).diagonal_projection(), (6.0, 6.0));
    assert_eq!(p(5.0, f64::INFINITY).diagonal_projection(), (f64::INFINITY, f64::INFINITY));
}

#[test]
fn rejects_bad_files_with_line_numbers() {
    let err = parse_diagram("1 2\n# c\n4 3\n").unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
    assert!(parse_diagram("inf 3").is_err());
    assert!(parse_diagram("1 2 0").is_err());
    assert!(parse_diagram("1").is_err());
}

#[test]
fn comments_case_and_multiplicity() {
    let parsed = parse_diagram("# header\n\n0 INF 3\n1 2\n2 2\n").unwrap();
    assert_eq!(parsed.dropped, 1);
    assert_eq!(parsed.diagram.infinite_count(), 3);
    assert_eq!(parsed.diagram.expanded().len(), 4);
    assert_eq!(serialize_diagram(&parsed.diagram), "0 inf 3\n1 2\n");
}

proptest! {
    #[test]
    fn linf_is_a_metric(a in point(), b in point(), c in point()) {
        prop_assert_eq!(linf_distance(&a, &b), linf_distance(&b, &a));
        prop_assert_eq!(linf_distance(&a, &b) == ExtendedValue::ZERO, a == b);
        let via = linf_distance(&a, &b) + linf_distance(&b, &c);
        let direct = linf_distance(&a, &c);
        prop_assert!(via.is_infinite() || direct.get() <= via.get() + 1e-12);
    }

    #[test]
    fn gap_is_distance_to_projection(a in point()) {
        prop_assert_eq!(diagonal_gap(&a), plane_linf((a.birth(), a.death()), a.diagonal_projection()));
        if !a.is_infinite() {
            prop_assert!((diagonal_gap(&a).get() - (a.death() - a.birth()) / 2.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn serialize_round_trips(d in diagram(8, 3)) {
        let text = serialize_diagram(&d);
        let back = parse_diagram(&text).unwrap();
        prop_assert_eq!(back.dropped, 0);
        prop_assert_eq!(&back.diagram, &d);
        prop_assert_eq!(serialize_diagram(&back.diagram), text);
    }

    #[test]
    fn order_of_input_is_irrelevant(d in diagram(8, 3), shift in 0usize..11) {
        let mut pts = d.expanded();
        let k = shift % pts.len().max(1);
        pts.rotate_left(k);
        prop_assert_eq!(PersistenceDiagram::new(pts), d);
    }
}
