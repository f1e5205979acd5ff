//! End-to-end mission exercises (development smoke; the acceptance suite
//! pins the study-level numbers).

use laserweed::navigation::{run_mission, FireMode, MissionConfig};
use laserweed::world::{generate_scenario, ScenarioSpec};

#[test]
fn two_row_mission_completes_and_weeds() {
    let spec = ScenarioSpec::default();
    let scenario = generate_scenario(&spec, 7).unwrap();
    let mut cfg = MissionConfig::new(42.5, 7);
    cfg.measure_accuracy = false;
    let log = run_mission(&scenario, &cfg).expect("mission");
    println!(
        "rows={} detected={}/{} ({:.1}%) eliminated={} hit_rate={:.1}% time={:.1}s ({:.1} s/m over {:.1} m)",
        log.rows_completed,
        log.detected_weeds.len(),
        log.total_weeds,
        100.0 * log.detection_rate(),
        log.eliminated_weeds.len(),
        100.0 * log.hit_rate(),
        log.total_time_s(),
        log.weeding_time_s_per_m(),
        log.distance_covered_m,
    );
    assert_eq!(log.rows_completed, 2);
    assert!(log.aborted.is_none());
    assert!(log.detection_rate() > 0.5, "detection collapsed");
}

#[test]
fn marker_mode_eliminates_nothing() {
    let spec = ScenarioSpec {
        weed_density_per_m: 2.0,
        ..ScenarioSpec::default()
    };
    let scenario = generate_scenario(&spec, 3).unwrap();
    let mut cfg = MissionConfig::new(50.0, 3);
    cfg.fire_mode = FireMode::Marker;
    let log = run_mission(&scenario, &cfg).expect("mission");
    println!(
        "marker: detected={} would_hit={}",
        log.detected_weeds.len(),
        log.eliminated_weeds.len()
    );
    assert!(log.detected_weeds.len() > 0);
    // Marker mode must not change the world.
    assert!(scenario.weeds.iter().all(|w| !w.eliminated));
}
