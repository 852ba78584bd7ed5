//! End-to-end runs through the public API.

use hypdom::caratheodory::{car_interval, default_dictionary};
use hypdom::conformal::{canonical_annulus_radius, grid_modulus};
use hypdom::domains::DomainSpec;
use hypdom::grid::{grid_annulus, grid_load, grid_save, GridFile};
use hypdom::kobayashi::{kob_ball_raster, kob_distance};
use hypdom::topology::{complement_components, connectivity_number, separating_cycle};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn grid_file_round_trip_preserves_everything() {
    let g = grid_annulus(0.3, 0.04).unwrap();
    let bytes = grid_save(&g);
    let back = grid_load(&bytes).unwrap();
    assert_eq!(back.mask(), g.mask());
    assert_eq!(grid_save(&back), bytes);
    assert_eq!(grid_modulus(&back).unwrap(), grid_modulus(&g).unwrap());
}

#[test]
fn exported_ball_is_a_domain() {
    let d = DomainSpec::Annulus(0.1);
    let ball = kob_ball_raster(&d, c(0.1f64.sqrt(), 0.0), 2.5, 0.02).unwrap();
    let bytes = ball.export();
    let file = GridFile::parse(&bytes).unwrap();
    let meta = file.metadata.as_ref().unwrap();
    assert_eq!(meta.metric, "kobayashi");
    assert_eq!(meta.radius, 2.5);

    let ring = grid_load(&bytes).unwrap();
    assert_eq!(connectivity_number(ring.mask()).unwrap(), 1);
    let comps = complement_components(ring.mask());
    let poly = separating_cycle(&ring, comps.bounded[0], comps.unbounded[0]).unwrap();
    assert!(poly.is_simple());
    let rhat = canonical_annulus_radius(grid_modulus(&ring).unwrap()).unwrap();
    assert!(rhat > 0.0 && rhat < 1.0);
}

#[test]
fn grid_intervals_bracket_catalog_values() {
    let g = DomainSpec::Grid(grid_annulus(0.2, 0.02).unwrap());
    let exact = DomainSpec::Annulus(0.2);
    let (p, q) = (c(0.45, 0.1), c(-0.3, 0.4));
    let k = kob_distance(&exact, p, q, 1e-12).unwrap().upper;
    let iv = kob_distance(&g, p, q, 1e-9).unwrap();
    assert!(iv.contains(k, 0.0), "{k} not in {iv:?}");
    let car = car_interval(&exact, p, q, &default_dictionary(&exact).unwrap(), 1e-12).unwrap();
    assert!(car.lower <= k + 1e-12 && car.upper == k);
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let d = DomainSpec::Annulus(0.1);
        let ball = kob_ball_raster(&d, c(0.5, 0.2), 1.7, 0.02).unwrap();
        (
            ball.export(),
            car_interval(
                &d,
                c(0.5, 0.2),
                c(-0.4, -0.3),
                &default_dictionary(&d).unwrap(),
                1e-12,
            )
            .unwrap(),
        )
    };
    assert_eq!(run(), run());
}
