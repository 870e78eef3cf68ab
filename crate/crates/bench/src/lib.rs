//! Fixtures shared by the criterion benches.

use leo_secrecy::{
    Alignment, GeometryParams, LinkBudget, LinkBudgetParams, NetworkGeometry, SecrecyScenario,
    ShadowedRician, EARTH_RADIUS_M,
};

/// 500 km shell, ten visible satellites on average, `mean_eavesdroppers` in the beam footprint.
pub fn reference_scenario(mean_eavesdroppers: f64, alignment: Alignment) -> SecrecyScenario {
    let geometry = GeometryParams::at_altitude(EARTH_RADIUS_M, 500e3)
        .with_mean_visible(10.0)
        .with_mean_eavesdroppers(mean_eavesdroppers);
    SecrecyScenario::new(
        NetworkGeometry::new(geometry).expect("valid geometry"),
        ShadowedRician::new(1, 0.063, 8.97e-4).expect("valid fading"),
        LinkBudget::new(LinkBudgetParams::reference(alignment)).expect("valid link"),
        2.0,
    )
    .expect("valid scenario")
}
