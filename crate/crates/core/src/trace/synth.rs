//! Seeded synthetic traces with known topological behaviour.
//!
//! Coordinates are generated in `f64` and rounded once to `f32` when the
//! trace is assembled, so a given [`SynthSpec`] always yields the same bytes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{LayerTrace, Manifest, TraceError};

/// Distance between the two cluster centres at the separated end.
const CLUSTER_SEPARATION: f64 = 8.0;
/// Spread of the cluster centres in the plateau scenario's base cloud.
const PLATEAU_CENTRE_SPREAD: f64 = 3.0;
const PLATEAU_CLUSTERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// Two Gaussian clusters whose centres meet at the last layer.
    ClusterMerge,
    /// Two Gaussian clusters that start coincident and separate.
    ClusterSplit,
    /// Points on a unit ring in the first two coordinates, rigidly rotated per layer.
    RotationDrift,
    /// A drifting cloud that is frozen for layers `first..=last` (1-based).
    RedundantPlateau { first: usize, last: usize },
}

impl Scenario {
    pub const NAMES: [&'static str; 4] = [
        "cluster_merge",
        "cluster_split",
        "rotation_drift",
        "redundant_plateau",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::ClusterMerge => "cluster_merge",
            Scenario::ClusterSplit => "cluster_split",
            Scenario::RotationDrift => "rotation_drift",
            Scenario::RedundantPlateau { .. } => "redundant_plateau",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::RedundantPlateau { first, last } => {
                write!(f, "redundant_plateau[{first}-{last}]")
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Parses a scenario name. `redundant_plateau` defaults to layers 3-5.
impl FromStr for Scenario {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cluster_merge" => Ok(Scenario::ClusterMerge),
            "cluster_split" => Ok(Scenario::ClusterSplit),
            "rotation_drift" => Ok(Scenario::RotationDrift),
            "redundant_plateau" => Ok(Scenario::RedundantPlateau { first: 3, last: 5 }),
            other => Err(TraceError::InvalidSpec(format!(
                "unknown scenario `{other}` (expected one of {})",
                Scenario::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub token_count: usize,
    pub dim: usize,
    pub layer_count: usize,
    pub scenario: Scenario,
    pub noise_scale: f64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |msg: String| Err(TraceError::InvalidSpec(msg));
        if self.layer_count < 2 {
            return bad(format!(
                "layer_count must be >= 2, got {}",
                self.layer_count
            ));
        }
        if self.token_count < 1 {
            return bad("token_count must be >= 1".into());
        }
        if self.dim < 1 {
            return bad("dim must be >= 1".into());
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return bad(format!(
                "noise_scale must be finite and >= 0, got {}",
                self.noise_scale
            ));
        }
        match self.scenario {
            Scenario::RotationDrift if self.dim < 2 => bad("rotation_drift needs dim >= 2".into()),
            Scenario::RedundantPlateau { first, last }
                if !(1 <= first && first < last && last <= self.layer_count) =>
            {
                bad(format!(
                    "plateau {first}-{last} must satisfy 1 <= first < last <= L = {}",
                    self.layer_count
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Generates the trace described by `spec`; a pure function of `spec`.
pub fn synth_trace(spec: &SynthSpec) -> Result<LayerTrace, TraceError> {
    let coords = synth_coordinates(spec)?;
    let data = coords.into_iter().map(|x| x as f32).collect();
    let mut manifest = Manifest::new();
    manifest.insert("generator".into(), "synth".into());
    manifest.insert("scenario".into(), spec.scenario.to_string());
    manifest.insert("seed".into(), spec.seed.to_string());
    manifest.insert("noise_scale".into(), spec.noise_scale.to_string());
    manifest.insert("sample_id".into(), format!("synth-{}", spec.seed));
    Ok(
        LayerTrace::new(spec.layer_count, spec.token_count, spec.dim, data)?
            .with_manifest(manifest),
    )
}

/// The `f64` coordinates behind [`synth_trace`], layer-major.
pub fn synth_coordinates(spec: &SynthSpec) -> Result<Vec<f64>, TraceError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (l, n, d) = (spec.layer_count, spec.token_count, spec.dim);
    let mut gauss = move || -> f64 { StandardNormal.sample(&mut rng) };
    let mut out = Vec::with_capacity(l * n * d);

    match spec.scenario {
        Scenario::ClusterMerge | Scenario::ClusterSplit => {
            let offsets: Vec<f64> = (0..n * d).map(|_| gauss()).collect();
            for layer in 0..l {
                let t = layer as f64 / (l - 1) as f64;
                let apart = match spec.scenario {
                    Scenario::ClusterMerge => 1.0 - t,
                    _ => t,
                };
                let half = 0.5 * CLUSTER_SEPARATION * apart;
                for token in 0..n {
                    let side = if token % 2 == 0 { 1.0 } else { -1.0 };
                    for c in 0..d {
                        let centre = if c == 0 { side * half } else { 0.0 };
                        out.push(centre + offsets[token * d + c] + spec.noise_scale * gauss());
                    }
                }
            }
        }
        Scenario::RotationDrift => {
            let step = PI / (2.0 * l as f64);
            for layer in 0..l {
                for token in 0..n {
                    let angle = 2.0 * PI * token as f64 / n as f64 + step * layer as f64;
                    for c in 0..d {
                        let base = match c {
                            0 => angle.cos(),
                            1 => angle.sin(),
                            _ => 0.0,
                        };
                        let noise = if spec.noise_scale > 0.0 {
                            spec.noise_scale * gauss()
                        } else {
                            0.0
                        };
                        out.push(base + noise);
                    }
                }
            }
        }
        Scenario::RedundantPlateau { first, last } => {
            let centres: Vec<f64> = (0..PLATEAU_CLUSTERS * d)
                .map(|_| PLATEAU_CENTRE_SPREAD * gauss())
                .collect();
            let mut current: Vec<f64> = (0..n * d)
                .map(|i| {
                    let cluster = (i / d) % PLATEAU_CLUSTERS;
                    centres[cluster * d + i % d] + gauss()
                })
                .collect();
            for layer in 1..=l {
                let frozen = layer > first && layer <= last;
                if layer > 1 && !frozen {
                    for x in current.iter_mut() {
                        *x += spec.noise_scale * gauss();
                    }
                }
                out.extend_from_slice(&current);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scenario: Scenario) -> SynthSpec {
        SynthSpec {
            seed: 7,
            token_count: 8,
            dim: 3,
            layer_count: 6,
            scenario,
            noise_scale: 0.3,
        }
    }

    #[test]
    fn plateau_layers_identical() {
        let t = synth_trace(&spec(Scenario::RedundantPlateau { first: 3, last: 5 })).unwrap();
        assert_eq!(t.layer(2), t.layer(3));
        assert_eq!(t.layer(3), t.layer(4));
        assert_ne!(t.layer(1), t.layer(2));
        assert_ne!(t.layer(4), t.layer(5));
    }

    #[test]
    fn deterministic() {
        for name in Scenario::NAMES {
            let s = spec(name.parse().unwrap());
            assert_eq!(synth_trace(&s).unwrap(), synth_trace(&s).unwrap());
        }
        let mut other = spec(Scenario::ClusterMerge);
        other.seed = 8;
        assert_ne!(
            synth_trace(&spec(Scenario::ClusterMerge)).unwrap(),
            synth_trace(&other).unwrap()
        );
    }

    #[test]
    fn rotation_without_noise_stays_on_unit_circle() {
        let mut s = spec(Scenario::RotationDrift);
        s.noise_scale = 0.0;
        s.dim = 2;
        let coords = synth_coordinates(&s).unwrap();
        for p in coords.chunks(2) {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-9);
        }
        // f32 storage bounds the stored radius error by a few float32 ulps.
        let t = synth_trace(&s).unwrap();
        for p in t.data().chunks(2) {
            let r = f64::from(p[0]).hypot(f64::from(p[1]));
            assert!((r - 1.0).abs() < 1e-6, "radius {r}");
        }
    }

    #[test]
    fn merge_clusters_coincide_at_last_layer() {
        let mut s = spec(Scenario::ClusterMerge);
        s.noise_scale = 0.0;
        let t = synth_trace(&s).unwrap();
        let split = synth_trace(&SynthSpec {
            scenario: Scenario::ClusterSplit,
            ..s
        })
        .unwrap();
        assert_eq!(t.layer(5), split.layer(0));
        assert_eq!(t.layer(0), split.layer(5));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!("nope".parse::<Scenario>().is_err());
        let mut s = spec(Scenario::RedundantPlateau { first: 5, last: 7 });
        assert!(synth_trace(&s).is_err());
        s.scenario = Scenario::RotationDrift;
        s.dim = 1;
        assert!(synth_trace(&s).is_err());
        s.dim = 2;
        s.noise_scale = -1.0;
        assert!(synth_trace(&s).is_err());
    }
}
