//! The convergence tables as ready-made configurations.

use gausscq_bem2d::{BoundaryOperator, Geometry, QuadratureOptions};
use gausscq_core::kernels::{Datum, ScalarKernel};
use gausscq_core::tableau::Family;

use crate::config::{BemConvergence, ExperimentConfig, ScalarConvergence, StageRange};

pub const TABLE_NAMES: [&str; 5] = ["table1", "table2", "table3", "table4", "table5"];

/// Step counts of the scalar tables.
pub const SCALAR_STEPS: [usize; 5] = [16, 32, 64, 128, 256];
/// Step counts of the scattering tables.
pub const SCATTERING_STEPS: [usize; 5] = [15, 21, 35, 42, 70];
/// Step counts of the single-layer table.
pub const SINGLE_LAYER_STEPS: [usize; 6] = [6, 7, 10, 14, 15, 21];

fn mu_tag(mu: f64) -> String {
    format!("mu{mu}").replace('-', "m").replace('.', "p")
}

fn scalar(m: usize, mus: &[f64]) -> Vec<ExperimentConfig> {
    mus.iter()
        .map(|&mu| {
            ExperimentConfig::ScalarConvergence(ScalarConvergence {
                name: format!("gauss{m}-{}", mu_tag(mu)),
                family: Family::Gauss,
                m,
                kernel: ScalarKernel::PowerOverOneMinusExp { mu },
                datum: Datum::SinPowExp,
                final_time: 3.0,
                steps: SCALAR_STEPS.to_vec(),
                n_ref: 2048,
            })
        })
        .collect()
}

fn bem(
    name: String,
    family: Family,
    m: usize,
    geometry: Geometry,
    operator: BoundaryOperator,
    datum: Datum,
    final_time: f64,
    steps: &[usize],
) -> ExperimentConfig {
    ExperimentConfig::BemConvergence(BemConvergence {
        name,
        family,
        m,
        geometry,
        operator,
        datum,
        final_time,
        steps: steps.to_vec(),
        n_ref: 210,
        n_panels: 64,
        quadrature: QuadratureOptions::default(),
    })
}

fn scattering(geometry: Geometry) -> Vec<ExperimentConfig> {
    [(Family::Gauss, "gauss3"), (Family::RadauIIA, "radau3")]
        .into_iter()
        .map(|(family, tag)| {
            let name = format!("{}-{tag}", geometry.name());
            bem(
                name,
                family,
                3,
                geometry,
                BoundaryOperator::ExteriorDtN,
                Datum::standard_gaussian(),
                3.0,
                &SCATTERING_STEPS,
            )
        })
        .collect()
}

/// Configurations of a named table, or `None` for an unknown name.
pub fn preset(name: &str) -> Option<Vec<ExperimentConfig>> {
    Some(match name {
        "table1" => scalar(2, &[-1.0, 0.0, 1.0]),
        "table2" => scalar(3, &[0.0, 0.5, 1.0]),
        "table3" => [2, 3, 5]
            .into_iter()
            .map(|m| {
                let name = format!("circle-vinv-gauss{m}");
                let op = BoundaryOperator::InverseSingleLayer;
                bem(
                    name,
                    Family::Gauss,
                    m,
                    Geometry::UnitCircle,
                    op,
                    Datum::MonomialBump,
                    1.0,
                    &SINGLE_LAYER_STEPS,
                )
            })
            .collect(),
        "table4" => scattering(Geometry::UnitCircle),
        "table5" => scattering(Geometry::LShape),
        _ => return None,
    })
}

pub fn stability_range(m_min: usize, m_max: usize) -> ExperimentConfig {
    ExperimentConfig::StabilityReport(StageRange {
        name: "stability".into(),
        m_min,
        m_max,
    })
}
