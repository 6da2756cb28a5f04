//! The circle class that separates the eluder dimension from the
//! dissimilarity dimension: functions linear outside a semicircle, zero
//! inside it except on N special points where they take values +/-eps.
//!
//! The generated instance carries, alongside M sampled members, the
//! deterministic witness family f_1..f_{N+1} over a fixed special-point
//! set, so an eluder sequence of length N is certifiable without search.

use rand::RngExt;
use serde_json::json;

use crate::dims::DimensionCertificate;
use crate::error::{Error, Result};
use crate::protocol::{rng_for, Instance, Metadata, NoiseMode};

use super::net::{circle_net, dot, in_u0, in_u1, snap_ip};

/// One member of the class: semicircle index, special points (action
/// indices), their signs, and the linear direction (an action index).
#[derive(Debug, Clone)]
pub struct SeparationMember {
    pub semicircle: usize,
    pub special: Vec<usize>,
    pub signs: Vec<f64>,
    pub direction: usize,
}

#[derive(Debug, Clone)]
pub struct SeparationInstance {
    pub instance: Instance,
    /// Certifies an eluder sequence of length n_special over the witness
    /// family embedded at the tail of the function list.
    pub eluder_certificate: DimensionCertificate,
    /// Function table in function-major order (same order as the product).
    pub f_values: Vec<Vec<f64>>,
    pub members: Vec<SeparationMember>,
    pub eps: f64,
}

fn member_values(net: &[Vec<f64>], m: &SeparationMember) -> Vec<f64> {
    let in_uj: &dyn Fn(&[f64]) -> bool = if m.semicircle == 0 { &in_u0 } else { &in_u1 };
    let dir = &net[m.direction];
    net.iter()
        .enumerate()
        .map(|(a, p)| {
            if let Some(k) = m.special.iter().position(|&s| s == a) {
                m.signs[k]
            } else if in_uj(p) {
                0.0
            } else {
                snap_ip(dot(dir, p))
            }
        })
        .collect()
}

/// Builds the separation instance. `resolution` must be divisible by 4 so
/// the semicircle boundary points sit exactly on the net.
pub fn make_separation(
    n_special: usize,
    eps: f64,
    sample_count: usize,
    resolution: usize,
    seed: u64,
) -> Result<SeparationInstance> {
    if n_special == 0 {
        return Err(Error::invalid("n_special must be at least 1"));
    }
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::invalid("eps must lie in (0, 1/2)"));
    }
    if resolution % 4 != 0 || resolution < 8 {
        return Err(Error::invalid("resolution must be >= 8 and divisible by 4"));
    }
    let net = circle_net(resolution);
    let u0_points: Vec<usize> = (0..net.len()).filter(|&a| in_u0(&net[a])).collect();
    let u1_points: Vec<usize> = (0..net.len()).filter(|&a| in_u1(&net[a])).collect();
    if u0_points.len() < n_special || u1_points.len() < n_special {
        return Err(Error::SizeCap {
            what: "special points per semicircle".into(),
            requested: n_special,
            cap: u0_points.len().min(u1_points.len()),
        });
    }
    let mut rng = rng_for(seed, 11);

    let mut members = Vec::new();
    for _ in 0..sample_count {
        let j = rng.random_range(0..2usize);
        let pool = if j == 0 { &u0_points } else { &u1_points };
        let mut special = sample_distinct(&mut rng, pool, n_special);
        special.sort_unstable();
        let signs: Vec<f64> = (0..n_special)
            .map(|_| if rng.random::<bool>() { eps } else { -eps })
            .collect();
        let outside: Vec<usize> = (0..net.len())
            .filter(|&a| {
                if j == 0 {
                    !in_u0(&net[a])
                } else {
                    !in_u1(&net[a])
                }
            })
            .collect();
        let direction = outside[rng.random_range(0..outside.len())];
        members.push(SeparationMember {
            semicircle: j,
            special,
            signs,
            direction,
        });
    }

    // Deterministic witness family in U_0: special points are the first
    // n_special net points of the semicircle, the linear direction is the
    // antipode of its center.
    let witness_special: Vec<usize> = u0_points.iter().copied().take(n_special).collect();
    let witness_dir = net
        .iter()
        .position(|p| p[0] == -1.0 && p[1] == 0.0)
        .expect("resolution divisible by 4 puts (-1,0) on the net");
    let witness_base = members.len();
    for i in 0..n_special {
        let signs: Vec<f64> = (0..n_special)
            .map(|k| if k == i { -eps } else { eps })
            .collect();
        members.push(SeparationMember {
            semicircle: 0,
            special: witness_special.clone(),
            signs,
            direction: witness_dir,
        });
    }
    members.push(SeparationMember {
        semicircle: 0,
        special: witness_special.clone(),
        signs: vec![eps; n_special],
        direction: witness_dir,
    });

    let f_values: Vec<Vec<f64>> = members.iter().map(|m| member_values(&net, m)).collect();

    // Target: the lowest-index function achieving the maximal value 1 (a
    // linear piece at its own direction).
    let mut target = 0usize;
    let mut best = f64::NEG_INFINITY;
    for (f, row) in f_values.iter().enumerate() {
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if m > best {
            best = m;
            target = f;
        }
    }
    if best != 1.0 {
        return Err(Error::construction(
            "no member achieves self-evaluation 1 (direction not on the net?)",
        ));
    }

    let witnesses: Vec<(usize, usize)> = (0..n_special)
        .map(|i| (witness_base + i, witness_base + n_special))
        .collect();
    let certificate = DimensionCertificate::Eluder {
        sequence: witness_special.clone(),
        witnesses,
        epsilon: eps,
        value: n_special,
    };

    let meta = Metadata::new(
        "separation",
        json!({
            "n_special": n_special, "eps": eps, "sample_count": sample_count,
            "resolution": resolution, "seed": seed,
            "witness_family": [witness_base, members.len()],
        }),
    );
    let instance = Instance::from_product(f_values.clone(), target, NoiseMode::TwoPoint, meta)?;
    Ok(SeparationInstance {
        instance,
        eluder_certificate: certificate,
        f_values,
        members,
        eps,
    })
}

fn sample_distinct(rng: &mut rand_chacha::ChaCha8Rng, pool: &[usize], k: usize) -> Vec<usize> {
    let mut pool = pool.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let i = rng.random_range(0..pool.len());
        out.push(pool.swap_remove(i));
    }
    out
}
