//! Instance schema, validation, digests, and seeded generation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{Density, Order, RealFunction, Space};
use crate::transport::MetricSpace;

/// Raw JSON form of an instance. All arrays are atom-indexed; absent
/// optional fields omit the checks that depend on them.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct InstanceSpec {
    pub mu: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated instance ready for check evaluation.
#[derive(Debug, Clone)]
pub struct Instance {
    pub space: Space,
    pub metric: Option<MetricSpace>,
    pub f: Option<Density>,
    pub g: Option<RealFunction>,
    pub u: Option<RealFunction>,
    pub w: Option<RealFunction>,
    pub order: Order,
    pub p: Option<f64>,
    pub seed: u64,
    pub spec: InstanceSpec,
}

impl Instance {
    pub fn from_spec(spec: InstanceSpec) -> Result<Self> {
        let space = Space::new(spec.mu.clone())?;
        let order = Order::new(spec.alpha)?;
        let f = spec
            .f
            .as_ref()
            .map(|v| Density::new(&space, v.clone()))
            .transpose()?;
        let g = spec
            .g
            .as_ref()
            .map(|v| RealFunction::new(v.clone()))
            .transpose()?;
        let u = spec
            .u
            .as_ref()
            .map(|v| RealFunction::new(v.clone()))
            .transpose()?;
        let w = spec
            .w
            .as_ref()
            .map(|v| RealFunction::new(v.clone()))
            .transpose()?;
        let metric = match &spec.dist {
            Some(d) => Some(MetricSpace::new(
                space.clone(),
                d.clone(),
                spec.base.unwrap_or(0),
            )?),
            None => None,
        };
        Ok(Instance {
            space,
            metric,
            f,
            g,
            u,
            w,
            order,
            p: spec.p,
            seed: spec.seed.unwrap_or(0),
            spec,
        })
    }

    /// Stable hex digest of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(&self.spec).expect("instance serializes");
        let hash = Sha256::digest(json.as_bytes());
        hash.iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }
}

const ALPHA_GRID: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 6.0];
const P_GRID: [f64; 3] = [1.0, 1.5, 2.0];

fn exp_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let x: f64 = rng.gen_range(1e-12..1.0);
            -x.ln()
        })
        .collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; keeps the generator's dependency surface small.
    let a: f64 = rng.gen_range(f64::EPSILON..1.0);
    let b: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * a.ln()).sqrt() * (2.0 * std::f64::consts::PI * b).cos()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Deterministic instance from a named profile. The same seed yields a
/// bit-identical instance.
///
/// Profiles:
/// - "dirichlet": mu and nu from normalized exponentials;
/// - "sparse": nu concentrated on few atoms (large T_alpha);
/// - "near-mu": f = 1 + eps h with ||f - 1||_inf <= 0.1 (small T regime);
/// - "euclidean": dirichlet plus a metric from points in the unit square;
/// - "metric-closure": dirichlet plus the shortest-path closure of a
///   random symmetric nonnegative matrix.
pub fn generate(seed: u64, n: usize, profile: &str) -> Result<Instance> {
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = normalized(exp_samples(&mut rng, n));

    let f_values: Vec<f64> = match profile {
        "dirichlet" | "euclidean" | "metric-closure" => {
            let nu = normalized(exp_samples(&mut rng, n));
            nu.iter().zip(&mu).map(|(&q, &m)| q / m).collect()
        }
        "sparse" => {
            let k = 1 + rng.gen_range(0..n.min(3));
            let mut nu = vec![0.0; n];
            let mass = normalized(exp_samples(&mut rng, k));
            for (slot, m) in mass.into_iter().enumerate() {
                let idx = rng.gen_range(0..n);
                nu[(idx + slot) % n] += m;
            }
            nu.iter().zip(&mu).map(|(&q, &m)| q / m).collect()
        }
        "near-mu" => {
            let h: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
            let mean: f64 = h.iter().zip(&mu).map(|(&x, &m)| x * m).sum();
            let h: Vec<f64> = h.iter().map(|&x| x - mean).collect();
            let hmax = h.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-9);
            let eps = rng.gen_range(0.01..=1.0) * 0.1 / hmax;
            h.iter().map(|&x| 1.0 + eps * x).collect()
        }
        other => return Err(Error::UnknownProfile(other.to_string())),
    };

    let g: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let u: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let w: Vec<f64> = (0..n).map(|_| normal(&mut rng).abs()).collect();
    let alpha = ALPHA_GRID[rng.gen_range(0..ALPHA_GRID.len())];
    let p = P_GRID[rng.gen_range(0..P_GRID.len())];

    let (dist, base) = match profile {
        "euclidean" => {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
                .collect();
            let d: Vec<Vec<f64>> = pts
                .iter()
                .map(|&(ax, ay)| {
                    pts.iter()
                        .map(|&(bx, by)| ((ax - bx).powi(2) + (ay - by).powi(2)).sqrt())
                        .collect()
                })
                .collect();
            (Some(d), Some(rng.gen_range(0..n)))
        }
        "metric-closure" => {
            let mut d = vec![vec![0.0f64; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.gen_range(0.1..2.0);
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
            // Floyd-Warshall closure restores the triangle inequality.
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if d[i][k] + d[k][j] < d[i][j] {
                            d[i][j] = d[i][k] + d[k][j];
                        }
                    }
                }
            }
            (Some(d), Some(rng.gen_range(0..n)))
        }
        _ => (None, None),
    };

    // Renormalize f exactly so the spec round-trips through validation.
    let mean: f64 = f_values.iter().zip(&mu).map(|(&v, &m)| v * m).sum();
    let f_values: Vec<f64> = f_values.iter().map(|&v| v / mean).collect();

    let spec = InstanceSpec {
        mu,
        f: Some(f_values),
        g: Some(g),
        u: Some(u),
        w: Some(w),
        dist,
        base,
        alpha,
        p: Some(p),
        seed: Some(seed),
    };
    Instance::from_spec(spec)
}

pub const PROFILES: [&str; 5] = [
    "dirichlet",
    "sparse",
    "near-mu",
    "euclidean",
    "metric-closure",
];
