//! Seeded random diagrams.

use rand::Rng;

use crate::diagram::{DiagramPoint, PersistenceDiagram};

/// A diagram with `finite` finite points and `infinite` essential points.
///
/// Births are uniform in `[0, scale)`, finite bar lengths uniform in
/// `(0, scale]`.
pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, finite: usize, infinite: usize, scale: f64) -> PersistenceDiagram {
    let mut points = Vec::with_capacity(finite + infinite);
    for _ in 0..finite {
        let birth = rng.gen_range(0.0..scale);
        let length = scale - rng.gen_range(0.0..scale);
        points.push(DiagramPoint::new(birth, birth + length).expect("positive length"));
    }
    for _ in 0..infinite {
        points.push(DiagramPoint::infinite(rng.gen_range(0.0..scale)).expect("finite birth"));
    }
    PersistenceDiagram::new(points)
}

/// Random diagram whose total size is at most `max_points`, with up to
/// `max_infinite` essential points.
pub fn random_small_diagram<R: Rng + ?Sized>(rng: &mut R, max_points: usize, max_infinite: usize, scale: f64) -> PersistenceDiagram {
    let total = rng.gen_range(0..=max_points);
    let infinite = rng.gen_range(0..=max_infinite.min(total));
    random_diagram(rng, total - infinite, infinite, scale)
}

/// Moves every point of `a` by independent offsets in `[-radius, radius]`
/// on each coordinate, keeping deaths above births. Infinite deaths stay
/// infinite.
pub fn perturb<R: Rng + ?Sized>(rng: &mut R, a: &PersistenceDiagram, radius: f64) -> PersistenceDiagram {
    a.expanded()
        .iter()
        .map(|p| {
            let birth = p.birth() + rng.gen_range(-radius..=radius);
            let death = if p.is_infinite() {
                f64::INFINITY
            } else {
                (p.death() + rng.gen_range(-radius..=radius)).max(birth + radius.max(f64::MIN_POSITIVE))
            };
            DiagramPoint::new(birth, death).expect("death kept above birth")
        })
        .collect()
}
