//! Independent oracle for the Riesz energy of the uniform square.
//!
//! The oracle exploits translation structure: on the full level-m grid the
//! pair sum collapses to a displacement count, sum over (di, dj) of
//! (n-|di|)(n-|dj|) * kernel(|d| * 2^-m), which is O(n^2) instead of O(n^4)
//! and shares no code with `riesz_energy`.

use radial_core::measure::GridMeasure;
use radial_core::scale::riesz_energy;

fn displacement_energy(level: u32, s: f64) -> f64 {
    let n = 1i64 << level;
    let h = (0.5f64).powi(level as i32);
    let cell_mass = 1.0 / (n * n) as f64;
    let same_cell = (h * (2.0f64 / 6.0).sqrt()).powf(-s);
    let mut total = 0.0;
    for di in -(n - 1)..n {
        let wx = (n - di.abs()) as f64;
        let mut row = 0.0;
        for dj in -(n - 1)..n {
            let wy = (n - dj.abs()) as f64;
            let k = if di == 0 && dj == 0 {
                same_cell
            } else {
                let r2 = ((di * di + dj * dj) as f64) * h * h;
                r2.powf(-0.5 * s)
            };
            row += wy * k;
        }
        total += wx * row;
    }
    total * cell_mass * cell_mass
}

#[test]
fn displacement_oracle_converges_to_the_reference_constant() {
    // continuum value of the double integral of 1/|x-y| over the unit
    // square, frozen from the oracle's own Richardson extrapolation
    let reference = 2.9733;
    let e9 = displacement_energy(9, 1.0);
    let e10 = displacement_energy(10, 1.0);
    assert!((e9 - reference).abs() / reference <= 0.01, "level 9: {e9}");
    assert!(
        (e10 - reference).abs() / reference <= 0.01,
        "level 10: {e10}"
    );
    // first-order extrapolation lands much closer
    let extrap = 2.0 * e10 - e9;
    assert!(
        (extrap - reference).abs() / reference <= 1.5e-3,
        "extrapolated {extrap}"
    );
}

#[test]
fn riesz_energy_matches_the_displacement_oracle() {
    for s in [0.5, 1.0, 1.5] {
        let u = GridMeasure::uniform(2, 6).unwrap();
        let lib = riesz_energy(&u, s).unwrap();
        let oracle = displacement_energy(6, s);
        assert!(
            (lib - oracle).abs() / oracle <= 1e-9,
            "s = {s}: {lib} vs {oracle}"
        );
    }
}
