#![allow(dead_code)]

use pingpong::certificate::WanderingCertificate;
use pingpong::model::BoundaryModel;

/// Direct check that `Σ` is `γ`-wandering at sample scale: for interior
/// sample points `s` of `Σ` and `0 < |k| ≤ kmax` off the order lattice,
/// `γᵏ·s ∉ Σ`. Returns the number of violations.
pub fn sampled_wandering_violations<M: BoundaryModel>(
    m: &M,
    cert: &WanderingCertificate<M>,
    samples: usize,
    kmax: i64,
) -> usize {
    let sigma = cert.sigma(m);
    let order = cert.order().map(|n| n as i64);
    let points = m.sample_interior_points(&sigma, samples);
    assert!(!points.is_empty(), "Σ has no sample points");
    let g = &cert.gamma;
    let ginv = m.inverse(g);
    let mut bad = 0;
    for s in &points {
        assert!(m.interior_contains_point(&sigma, s));
        let (mut fwd, mut back) = (s.clone(), s.clone());
        for k in 1..=kmax {
            fwd = m.apply_point(g, &fwd);
            back = m.apply_point(&ginv, &back);
            if order.is_some_and(|n| k % n == 0) {
                continue;
            }
            bad += m.contains_point(&sigma, &fwd) as usize + m.contains_point(&sigma, &back) as usize;
        }
    }
    bad
}
