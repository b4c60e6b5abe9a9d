//! The constructions and the visibility machinery tie together: a viewpoint
//! the blind construction has been trained against sees a projection of
//! depressed dimension, while fresh viewpoints do not. (The contrast lives
//! at generations where the slivers are still spatially extended; deeper
//! generations shrink the support towards a finite dot set whose box
//! dimension vanishes from everywhere, which is what the content bounds,
//! not box counts, are for.)

use radial_core::blinds::blind_construct;
use radial_core::geom::Vec2;
use radial_core::scale::box_dimension_angles;
use radial_lab::experiments::{projection_angles, ScheduleConfig};

fn projection_dim(measure: &radial_core::GridMeasure, x: Vec2) -> f64 {
    let mut angles = projection_angles(measure, x);
    angles.sort_by(|a, b| a.total_cmp(b));
    angles.dedup();
    let schedule = ScheduleConfig::dimension_default().build().unwrap();
    box_dimension_angles(&angles, &schedule).unwrap().slope
}

#[test]
fn trained_viewpoint_sees_a_depressed_projection() {
    let trained = Vec2::new(0.5, 4.0);
    let (_, measure, _) = blind_construct(&[trained], 1, 4, 0.15, 10).unwrap();

    let trained_dim = projection_dim(&measure, trained);
    let fresh = [
        Vec2::new(0.5, 0.75),
        Vec2::new(0.2, 1.5),
        Vec2::new(2.0, 2.0),
    ];
    let fresh_dims: Vec<f64> = fresh.iter().map(|v| projection_dim(&measure, *v)).collect();
    println!("trained: {trained_dim:.3}, fresh: {fresh_dims:?}");

    assert!(
        trained_dim <= 0.2,
        "trained viewpoint not depressed: {trained_dim}"
    );
    for (v, d) in fresh.iter().zip(&fresh_dims) {
        assert!(
            *d >= 0.6,
            "fresh viewpoint {v:?} unexpectedly depressed: {d}"
        );
    }
}
