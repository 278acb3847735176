//! Seeded test scenarios: standard normal, four-mode Gaussian mixture, normal
//! samples with one outlier, and normal samples with vertical stripes removed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixture::{
    sample_gaussian_mixture, sample_standard_normal, DiracMixture, GaussianComponent,
    GaussianMixtureSpec,
};

pub const OUTLIER_LOCATION: [f64; 2] = [3.5, 3.5];

/// Bands along the first axis removed by the zebra scenario.
pub const ZEBRA_STRIPES: [(f64, f64); 3] = [(-1.5, -1.0), (-0.25, 0.25), (1.0, 1.5)];

const GM_VARIANCE: f64 = 0.09;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Normal,
    Gm,
    Outlier,
    Zebra,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Normal => "normal",
            Scenario::Gm => "gm",
            Scenario::Outlier => "outlier",
            Scenario::Zebra => "zebra",
        }
    }

    /// Mode centers used for allocation counts, if the scenario has modes.
    pub fn mode_centers(self) -> Option<Vec<Vec<f64>>> {
        match self {
            Scenario::Gm => Some(four_mode_spec().means()),
            _ => None,
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Scenario::Normal),
            "gm" => Ok(Scenario::Gm),
            "outlier" => Ok(Scenario::Outlier),
            "zebra" => Ok(Scenario::Zebra),
            other => Err(Error::Config(format!("unknown scenario `{other}`"))),
        }
    }
}

/// Four modes at `(±1, ±1)` with variance 0.09 per axis and masses
/// 1/8, 3/8, 3/8, 1/8 in the order (−1,−1), (−1,1), (1,−1), (1,1).
pub fn four_mode_spec() -> GaussianMixtureSpec {
    let component = |mean: [f64; 2], mass: f64| GaussianComponent {
        mean: mean.to_vec(),
        variance: vec![GM_VARIANCE; 2],
        mass,
    };
    GaussianMixtureSpec {
        components: vec![
            component([-1.0, -1.0], 0.125),
            component([-1.0, 1.0], 0.375),
            component([1.0, -1.0], 0.375),
            component([1.0, 1.0], 0.125),
        ],
    }
}

/// Draws `n` samples of a scenario in `dim` dimensions. Only the normal
/// scenario supports `dim != 2`. The zebra scenario returns fewer than `n`
/// points since stripes are removed after sampling.
pub fn generate(scenario: Scenario, n: usize, dim: usize, seed: u64) -> Result<DiracMixture> {
    if scenario != Scenario::Normal && dim != 2 {
        return Err(Error::invalid(format!(
            "scenario `{}` is two-dimensional",
            scenario.name()
        )));
    }
    match scenario {
        Scenario::Normal => sample_standard_normal(n, dim, seed),
        Scenario::Gm => sample_gaussian_mixture(&four_mode_spec(), n, seed),
        Scenario::Outlier => {
            sample_standard_normal(n, 2, seed)?.corrupt_with_outlier(0, &OUTLIER_LOCATION)
        }
        Scenario::Zebra => sample_standard_normal(n, 2, seed)?.remove_stripes(0, &ZEBRA_STRIPES),
    }
}
