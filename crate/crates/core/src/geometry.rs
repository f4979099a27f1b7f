//! Node deployment: positions, the three altitude slabs, and seeded
//! scenario sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::rng;

/// A point in the deployment volume, metres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3D {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::Config(format!("position ({x}, {y}, {z}) has non-finite coordinate")));
        }
        if z < 0.0 {
            return Err(Error::Config(format!("position altitude z = {z} is negative")));
        }
        Ok(Self { x, y, z })
    }

    pub fn distance_to(&self, other: &Position3D) -> f64 {
        distance(self, other)
    }
}

/// Euclidean distance in metres.
pub fn distance(p: &Position3D, q: &Position3D) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let dz = p.z - q.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// The rectangular deployment volume. UTs occupy the lower slab, URs the
/// higher one, and UEs roam the union of both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRegion {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub ut_z: (f64, f64),
    pub ur_z: (f64, f64),
    pub ue_z: (f64, f64),
}

impl DeploymentRegion {
    pub fn validate(&self) -> Result<()> {
        let axes = [
            ("x", self.x),
            ("y", self.y),
            ("ut_z", self.ut_z),
            ("ur_z", self.ur_z),
            ("ue_z", self.ue_z),
        ];
        for (name, (lo, hi)) in axes {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::Config(format!("region bound {name} is not finite")));
            }
            if lo >= hi {
                return Err(Error::Config(format!(
                    "region bound {name}: lower {lo} must be below upper {hi}"
                )));
            }
        }
        for (name, (lo, _)) in [("ut_z", self.ut_z), ("ur_z", self.ur_z), ("ue_z", self.ue_z)] {
            if lo < 0.0 {
                return Err(Error::Config(format!("region bound {name} dips below ground: {lo}")));
            }
        }
        Ok(())
    }
}

impl Default for DeploymentRegion {
    /// 2 km x 2 km footprint; UTs in [0, 500] m, URs in [500, 1000] m,
    /// UEs anywhere in [0, 1000] m.
    fn default() -> Self {
        Self {
            x: (0.0, 2000.0),
            y: (0.0, 2000.0),
            ut_z: (0.0, 500.0),
            ur_z: (500.0, 1000.0),
            ue_z: (0.0, 1000.0),
        }
    }
}

/// Everything [`sample_scenario`] needs to lay out one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_ut: usize,
    pub n_ur: usize,
    pub n_ue: usize,
    /// Uniform per-UR quota.
    pub quota: usize,
    pub region: DeploymentRegion,
    pub params: PhysicalParams,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.region.validate()?;
        self.params.validate()?;
        for (name, count) in [("n_ut", self.n_ut), ("n_ur", self.n_ur), ("n_ue", self.n_ue)] {
            if count == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        let seats = self.n_ur * self.quota;
        if seats < self.n_ut {
            return Err(Error::Infeasible { seats, uts: self.n_ut });
        }
        Ok(())
    }
}

/// Immutable node layout plus physical parameters for one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub ut_positions: Vec<Position3D>,
    pub ur_positions: Vec<Position3D>,
    pub ue_positions: Vec<Position3D>,
    pub params: PhysicalParams,
    /// Per-UR quotas Q_i.
    pub quotas: Vec<usize>,
}

impl Scenario {
    pub fn new(
        ut_positions: Vec<Position3D>,
        ur_positions: Vec<Position3D>,
        ue_positions: Vec<Position3D>,
        params: PhysicalParams,
        quotas: Vec<usize>,
    ) -> Result<Self> {
        if ut_positions.is_empty() || ur_positions.is_empty() || ue_positions.is_empty() {
            return Err(Error::Config("every node class needs at least one member".into()));
        }
        if quotas.len() != ur_positions.len() {
            return Err(Error::Config(format!(
                "{} quotas for {} URs",
                quotas.len(),
                ur_positions.len()
            )));
        }
        params.validate()?;
        let seats: usize = quotas.iter().sum();
        if seats < ut_positions.len() {
            return Err(Error::Infeasible { seats, uts: ut_positions.len() });
        }
        Ok(Self { ut_positions, ur_positions, ue_positions, params, quotas })
    }

    pub fn n_ut(&self) -> usize {
        self.ut_positions.len()
    }

    pub fn n_ur(&self) -> usize {
        self.ur_positions.len()
    }

    pub fn n_ue(&self) -> usize {
        self.ue_positions.len()
    }
}

/// Draw a uniform deployment. Pure in `(config, seed)`.
///
/// Draw order is part of the determinism contract: all UTs (x, y, z each),
/// then all URs, then all UEs. Growing one node count while the others stay
/// fixed therefore keeps the shared prefix of positions identical, which
/// pairs sweeps over a single count axis.
pub fn sample_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = rng::stream_rng(seed, rng::stream::SCENARIO);
    let region = &config.region;

    let mut draw_slab = |count: usize, z: (f64, f64)| -> Vec<Position3D> {
        (0..count)
            .map(|_| Position3D {
                x: rng.random_range(region.x.0..region.x.1),
                y: rng.random_range(region.y.0..region.y.1),
                z: rng.random_range(z.0..z.1),
            })
            .collect()
    };

    let ut_positions = draw_slab(config.n_ut, region.ut_z);
    let ur_positions = draw_slab(config.n_ur, region.ur_z);
    let ue_positions = draw_slab(config.n_ue, region.ue_z);

    Scenario::new(
        ut_positions,
        ur_positions,
        ue_positions,
        config.params,
        vec![config.quota; config.n_ur],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_config() -> ScenarioConfig {
        ScenarioConfig {
            n_ut: 12,
            n_ur: 3,
            n_ue: 2,
            quota: 4,
            region: DeploymentRegion::default(),
            params: PhysicalParams::default(),
        }
    }

    #[test]
    fn distance_basics() {
        let o = Position3D::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(distance(&o, &o), 0.0);
        let p = Position3D::new(3.0, 4.0, 0.0).unwrap();
        assert_eq!(distance(&o, &p), 5.0);
        let q = Position3D::new(1000.0, 0.0, 0.0).unwrap();
        assert_eq!(distance(&o, &q), 1000.0);
        assert_eq!(distance(&p, &q), distance(&q, &p));
    }

    #[test]
    fn sampling_is_deterministic() {
        let config = default_config();
        let a = sample_scenario(&config, 42).unwrap();
        let b = sample_scenario(&config, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_scenario(&config, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn slabs_contain_all_positions() {
        let config = default_config();
        for seed in 0..50 {
            let s = sample_scenario(&config, seed).unwrap();
            assert!(s.ut_positions.iter().all(|p| (0.0..=500.0).contains(&p.z)));
            assert!(s.ur_positions.iter().all(|p| (500.0..=1000.0).contains(&p.z)));
            assert!(s.ue_positions.iter().all(|p| (0.0..=1000.0).contains(&p.z)));
            for p in s.ut_positions.iter().chain(&s.ur_positions).chain(&s.ue_positions) {
                assert!((0.0..=2000.0).contains(&p.x));
                assert!((0.0..=2000.0).contains(&p.y));
            }
        }
    }

    #[test]
    fn default_counts_are_feasible() {
        let s = sample_scenario(&default_config(), 7).unwrap();
        assert_eq!(s.n_ut(), 12);
        assert_eq!(s.n_ur(), 3);
        assert_eq!(s.n_ue(), 2);
        assert_eq!(s.quotas.iter().sum::<usize>(), 12);
    }

    #[test]
    fn rejects_inverted_bounds() {
        let mut config = default_config();
        config.region.ut_z = (500.0, 500.0);
        assert!(matches!(sample_scenario(&config, 1), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_infeasible_quota() {
        let mut config = default_config();
        config.quota = 3;
        assert!(matches!(sample_scenario(&config, 1), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn count_prefix_is_stable_under_growth() {
        let config = default_config();
        let mut wider = config.clone();
        wider.n_ue = 5;
        let base = sample_scenario(&config, 9).unwrap();
        let grown = sample_scenario(&wider, 9).unwrap();
        assert_eq!(base.ut_positions, grown.ut_positions);
        assert_eq!(base.ur_positions, grown.ur_positions);
        assert_eq!(base.ue_positions[..], grown.ue_positions[..2]);
    }
}
