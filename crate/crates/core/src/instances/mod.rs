//! Generators for every instance family: K-armed, linear, GLM, and ReLU
//! bandit products, sphere and hypothesis-class instances, the
//! eluder/dissimilarity separation class, and the hard indicator class
//! with its lower-bound experiment.

mod hard;
mod net;
mod separation;

pub use hard::{
    make_hard_indicator, run_hard_lower_bound, run_tilde_easy, HardContext, HardLearnerKind,
    HardLowerBoundReport, HardPair, TildeEasyReport,
};
pub use net::{circle_net, sphere_net};
pub use separation::{make_separation, SeparationInstance};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::protocol::{AltPayload, AlternativeId, Instance, Metadata, NoiseMode, SqData};

use net::{dot, snap_ip};

/// Default cap on generated function-grid sizes.
pub const DEFAULT_GRID_CAP: usize = 512;

/// Declarative description of a generator call, used by config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Karmed {
        means: Vec<f64>,
        f_grid_resolution: usize,
        #[serde(default)]
        grid_cap: Option<usize>,
    },
    Linear {
        n: usize,
        /// Circle/sphere net resolution for both factor nets.
        resolution: usize,
        target_index: usize,
    },
    Glm {
        n: usize,
        resolution: usize,
        target_index: usize,
        link: LinkSpec,
    },
    Relu {
        n: usize,
        b: f64,
        resolution: usize,
        target_index: usize,
    },
    Sphere {
        n: usize,
        resolution: usize,
        target_index: usize,
    },
    Sq {
        hypotheses: Vec<Vec<i8>>,
        dist: Vec<f64>,
        target_index: usize,
    },
    Separation {
        n_special: usize,
        eps: f64,
        sample_count: usize,
        resolution: usize,
        seed: u64,
    },
    HardIndicator {
        n_special: usize,
        eps: f64,
        resolution: usize,
        seed: u64,
    },
}

/// Named strictly-increasing links for GLM products.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkSpec {
    Identity,
    /// g(x) = scale * tanh(x); derivative in [scale*(1-tanh^2(1)), scale].
    ScaledTanh {
        scale: f64,
    },
}

impl LinkSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LinkSpec::Identity => x,
            LinkSpec::ScaledTanh { scale } => scale * x.tanh(),
        }
    }

    /// (h_lower, h_upper) bounds of g' on [-1, 1].
    pub fn derivative_bounds(&self) -> (f64, f64) {
        match self {
            LinkSpec::Identity => (1.0, 1.0),
            LinkSpec::ScaledTanh { scale } => {
                let t = 1.0f64.tanh();
                (scale * (1.0 - t * t), *scale)
            }
        }
    }
}

impl GeneratorSpec {
    /// Builds the instance this spec describes. Separation and
    /// hard-indicator specs yield the primary instance (the separation
    /// instance and the tilde instance respectively); use the dedicated
    /// constructors to get the auxiliary outputs.
    pub fn build(&self, noise: NoiseMode) -> Result<Instance> {
        match self {
            GeneratorSpec::Karmed {
                means,
                f_grid_resolution,
                grid_cap,
            } => make_karmed(
                means,
                *f_grid_resolution,
                grid_cap.unwrap_or(DEFAULT_GRID_CAP),
                noise,
            ),
            GeneratorSpec::Linear {
                n,
                resolution,
                target_index,
            } => {
                let net = sphere_net(*n, *resolution);
                make_linear(*n, &net, &net, *target_index, noise)
            }
            GeneratorSpec::Glm {
                n,
                resolution,
                target_index,
                link,
            } => {
                let net = sphere_net(*n, *resolution);
                let (h_lo, h_hi) = link.derivative_bounds();
                make_glm(*n, *link, h_lo, h_hi, &net, &net, *target_index, noise)
            }
            GeneratorSpec::Relu {
                n,
                b,
                resolution,
                target_index,
            } => make_relu(*n, *b, *resolution, *target_index, noise),
            GeneratorSpec::Sphere {
                n,
                resolution,
                target_index,
            } => make_sphere(*n, *resolution, *target_index, noise),
            GeneratorSpec::Sq {
                hypotheses,
                dist,
                target_index,
            } => make_sq(hypotheses.clone(), dist.clone(), *target_index),
            GeneratorSpec::Separation {
                n_special,
                eps,
                sample_count,
                resolution,
                seed,
            } => Ok(make_separation(*n_special, *eps, *sample_count, *resolution, *seed)?.instance),
            GeneratorSpec::HardIndicator {
                n_special,
                eps,
                resolution,
                seed,
            } => Ok(hard::make_hard_indicator(*n_special, *eps, *resolution, *seed)?.tilde),
        }
    }
}

/// K-armed product: A = {0..K-1}, F = {truth} plus single-arm
/// perturbations of the truth on a uniform grid of `[0,1]` with
/// `f_grid_resolution` values (resolution 1 keeps F = {truth}).
pub fn make_karmed(
    means: &[f64],
    f_grid_resolution: usize,
    grid_cap: usize,
    noise: NoiseMode,
) -> Result<Instance> {
    let k = means.len();
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if f_grid_resolution == 0 {
        return Err(Error::invalid("f_grid_resolution must be at least 1"));
    }
    if means.iter().any(|m| !(0.0..=1.0).contains(m)) {
        return Err(Error::invalid("arm means must lie in [0, 1]"));
    }
    let mut funcs: Vec<Vec<f64>> = vec![means.to_vec()];
    if f_grid_resolution >= 2 {
        for arm in 0..k {
            for step in 0..f_grid_resolution {
                let v = step as f64 / (f_grid_resolution - 1) as f64;
                let mut f = means.to_vec();
                f[arm] = v;
                if !funcs.contains(&f) {
                    funcs.push(f);
                }
            }
        }
    }
    if funcs.len() * k > grid_cap {
        return Err(Error::SizeCap {
            what: "karmed function grid".into(),
            requested: funcs.len() * k,
            cap: grid_cap,
        });
    }
    let meta = Metadata::new(
        "karmed",
        json!({"means": means, "f_grid_resolution": f_grid_resolution}),
    );
    Instance::from_product(funcs, 0, noise, meta)
}

/// Linear product: Z = Theta x A with f_theta(a) = <theta, a>.
pub fn make_linear(
    n: usize,
    theta_net: &[Vec<f64>],
    action_net: &[Vec<f64>],
    target_theta: usize,
    noise: NoiseMode,
) -> Result<Instance> {
    validate_net(n, theta_net, "theta net")?;
    validate_net(n, action_net, "action net")?;
    if target_theta >= theta_net.len() {
        return Err(Error::invalid("target_theta outside the theta net"));
    }
    let values: Vec<Vec<f64>> = theta_net
        .iter()
        .map(|theta| action_net.iter().map(|a| snap_ip(dot(theta, a))).collect())
        .collect();
    let meta = Metadata::new(
        "linear",
        json!({"n": n, "theta_net": theta_net.len(), "action_net": action_net.len(), "target_theta": target_theta}),
    );
    Instance::from_product(values, target_theta, noise, meta)
}

/// GLM product: f_theta(a) = g(<theta, a>) for a strictly increasing link.
/// Values outside [-1,1] are a construction error, not silently clamped.
#[allow(clippy::too_many_arguments)]
pub fn make_glm(
    n: usize,
    link: LinkSpec,
    h_lo: f64,
    h_hi: f64,
    theta_net: &[Vec<f64>],
    action_net: &[Vec<f64>],
    target_theta: usize,
    noise: NoiseMode,
) -> Result<Instance> {
    validate_net(n, theta_net, "theta net")?;
    validate_net(n, action_net, "action net")?;
    if target_theta >= theta_net.len() {
        return Err(Error::invalid("target_theta outside the theta net"));
    }
    if !(h_lo > 0.0 && h_hi >= h_lo) {
        return Err(Error::invalid(
            "derivative bounds must satisfy 0 < h_lo <= h_hi",
        ));
    }
    let mut values = Vec::with_capacity(theta_net.len());
    for theta in theta_net {
        let mut row = Vec::with_capacity(action_net.len());
        for a in action_net {
            let v = link.eval(snap_ip(dot(theta, a)));
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::construction(format!(
                    "link value {v} outside [-1, 1] on the net"
                )));
            }
            row.push(v);
        }
        values.push(row);
    }
    let mut meta = Metadata::new(
        "glm",
        json!({"n": n, "link": link, "r": h_hi / h_lo, "h_lo": h_lo, "h_hi": h_hi,
               "theta_net": theta_net.len(), "action_net": action_net.len()}),
    );
    meta.notes.push(format!(
        "dimension bound is asymptotic in n*r^2*log(h_hi/eps) with r = {}",
        h_hi / h_lo
    ));
    Instance::from_product(values, target_theta, noise, meta)
}

/// ReLU product over a sphere net: f_theta(a) = relu(<theta, a> - b),
/// alpha_star = 1 - b at a = theta.
pub fn make_relu(
    n: usize,
    b: f64,
    resolution: usize,
    target_theta: usize,
    noise: NoiseMode,
) -> Result<Instance> {
    if !(0.0..1.0).contains(&b) {
        return Err(Error::invalid("offset b must lie in [0, 1)"));
    }
    let net = sphere_net(n, resolution);
    if target_theta >= net.len() {
        return Err(Error::invalid("target_theta outside the net"));
    }
    let values: Vec<Vec<f64>> = net
        .iter()
        .map(|theta| {
            net.iter()
                .map(|a| (snap_ip(dot(theta, a)) - b).max(0.0))
                .collect()
        })
        .collect();
    let mut meta = Metadata::new(
        "relu",
        json!({"n": n, "b": b, "resolution": resolution, "target_theta": target_theta}),
    );
    meta.notes
        .push("experiments must use eps <= 1 - b".to_string());
    Instance::from_product(values, target_theta, noise, meta)
}

/// Dense sphere instance: Z is a net on S_{n-1}, rho(z|z') = <z, z'>.
pub fn make_sphere(
    n: usize,
    resolution: usize,
    target_index: usize,
    noise: NoiseMode,
) -> Result<Instance> {
    let net = sphere_net(n, resolution);
    if target_index >= net.len() {
        return Err(Error::invalid("target index outside the net"));
    }
    let m = net.len();
    let mut table = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            table[i * m + j] = snap_ip(dot(&net[i], &net[j]));
        }
    }
    let payloads = net.into_iter().map(AltPayload::Point).collect();
    let meta = Metadata::new(
        "sphere",
        json!({"n": n, "resolution": resolution, "target_index": target_index}),
    );
    Instance::from_dense(payloads, table, AlternativeId(target_index), noise, meta)
}

/// Hypothesis-class instance: Z = H, rho(h|h') = E_D[h(x)h'(x)], rewards
/// drawn by the sample oracle (x ~ D fresh, value h(x)h*(x)).
pub fn make_sq(hypotheses: Vec<Vec<i8>>, dist: Vec<f64>, target_index: usize) -> Result<Instance> {
    validate_dist(&dist)?;
    if hypotheses.is_empty() {
        return Err(Error::invalid("hypothesis class must be nonempty"));
    }
    if hypotheses.iter().any(|h| h.len() != dist.len()) {
        return Err(Error::invalid("hypothesis rows must match the domain size"));
    }
    if hypotheses
        .iter()
        .any(|h| h.iter().any(|&v| v != 1 && v != -1))
    {
        return Err(Error::invalid("hypotheses must be +/-1 valued"));
    }
    if target_index >= hypotheses.len() {
        return Err(Error::invalid("target index outside the class"));
    }
    let m = hypotheses.len();
    let mut table = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let v: f64 = dist
                .iter()
                .enumerate()
                .map(|(x, &p)| p * f64::from(hypotheses[i][x] * hypotheses[j][x]))
                .sum();
            table[i * m + j] = v.clamp(-1.0, 1.0);
        }
    }
    let payloads = (0..m).map(AltPayload::Hypothesis).collect();
    let meta = Metadata::new(
        "sq",
        json!({"classes": m, "domain": dist.len(), "target_index": target_index}),
    );
    let inst = Instance::from_dense(
        payloads,
        table,
        AlternativeId(target_index),
        NoiseMode::SqSample,
        meta,
    )?;
    Ok(inst.with_sq_data(SqData { hypotheses, dist }))
}

pub(crate) fn validate_dist(dist: &[f64]) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::invalid("distribution must be nonempty"));
    }
    if dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::invalid("distribution entries must lie in [0, 1]"));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "distribution sums to {total}, expected 1 within 1e-12"
        )));
    }
    Ok(())
}

fn validate_net(n: usize, net: &[Vec<f64>], what: &str) -> Result<()> {
    if net.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    for p in net {
        if p.len() != n {
            return Err(Error::invalid(format!("{what} point has wrong dimension")));
        }
        if dot(p, p) > 1.0 + 1e-9 {
            return Err(Error::invalid(format!(
                "{what} point outside the unit ball"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{evaluate, rng_for, sample_reward};

    #[test]
    fn karmed_degenerate_grid_is_truth_only() {
        let inst = make_karmed(&[1.0, 0.0], 1, 64, NoiseMode::Deterministic).unwrap();
        assert_eq!(inst.len(), 2); // one function, two arms
        assert_eq!(inst.alpha_star(), 1.0);
    }

    #[test]
    fn karmed_eval_is_target_function_at_the_action() {
        let means = [0.7, 0.2, 0.5];
        let inst = make_karmed(&means, 3, 256, NoiseMode::Deterministic).unwrap();
        // any pair carrying action 2 evaluates to means[2] against the target
        for id in 0..inst.len() {
            let id = AlternativeId(id);
            let (_, act) = inst.pair_of(id).unwrap();
            let v = evaluate(&inst, id, inst.target()).unwrap();
            assert_eq!(v, means[act]);
        }
    }

    #[test]
    fn karmed_grid_cap_errors() {
        let err = make_karmed(&[0.5; 8], 9, 32, NoiseMode::Deterministic).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }

    #[test]
    fn linear_unit_vector_self_evaluation() {
        let net = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let inst = make_linear(2, &net, &net, 0, NoiseMode::Deterministic).unwrap();
        let id = inst.id_of_pair(0, 0).unwrap();
        assert_eq!(inst.self_eval(id), 1.0);
        assert_eq!(inst.alpha_star(), 1.0);
    }

    #[test]
    fn glm_identity_reduces_to_linear() {
        let net = circle_net(8);
        let lin = make_linear(2, &net, &net, 1, NoiseMode::Deterministic).unwrap();
        let glm = make_glm(
            2,
            LinkSpec::Identity,
            1.0,
            1.0,
            &net,
            &net,
            1,
            NoiseMode::Deterministic,
        )
        .unwrap();
        assert_eq!(lin.product_values(), glm.product_values());
    }

    #[test]
    fn glm_tanh_values_stay_inside_range() {
        let net = circle_net(12);
        let link = LinkSpec::ScaledTanh { scale: 0.9 };
        let (lo, hi) = link.derivative_bounds();
        let inst = make_glm(2, link, lo, hi, &net, &net, 0, NoiseMode::TwoPoint).unwrap();
        for row in inst.product_values().unwrap() {
            for &v in row {
                assert!(v.abs() < 1.0);
            }
        }
        assert!(inst.metadata.params["r"].as_f64().unwrap() >= 1.0);
    }

    #[test]
    fn relu_values_and_alpha_star() {
        let inst = make_relu(2, 0.25, 8, 1, NoiseMode::Deterministic).unwrap();
        assert!((inst.alpha_star() - 0.75).abs() < 1e-12);
        // at <theta, a> <= b the value is 0
        let values = inst.product_values().unwrap();
        for (f, row) in values.iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                if f == a {
                    assert!((v - 0.75).abs() < 1e-12);
                } else {
                    assert!(v >= 0.0);
                }
            }
        }
    }

    #[test]
    fn relu_dimension_grows_with_net_refinement() {
        // packing witness: at alpha = eps = 0.25, b = 0.75, only theta = a
        // pairs qualify and any set of directions pairwise below the relu
        // cutoff is a feasible sequence; refining the net from 4 to 8
        // points doubles it, comfortably above the eps^{-n/2} = 4 scale.
        let eps = 0.25;
        let b = 1.0 - eps;
        let coarse = make_relu(2, b, 4, 0, NoiseMode::Deterministic).unwrap();
        let fine = make_relu(2, b, 8, 0, NoiseMode::Deterministic).unwrap();
        let (d_coarse, _) = crate::dims::dissimilarity_dim(&coarse, eps, eps).unwrap();
        let (d_fine, _) = crate::dims::dissimilarity_dim(&fine, eps, eps).unwrap();
        assert!(d_fine >= d_coarse);
        assert!(d_coarse >= 4);
        assert_eq!(d_fine, 8);
    }

    #[test]
    fn sphere_has_antipodal_minus_one() {
        let inst = make_sphere(2, 8, 0, NoiseMode::Deterministic).unwrap();
        assert_eq!(
            evaluate(&inst, AlternativeId(0), AlternativeId(4)).unwrap(),
            -1.0
        );
        assert_eq!(
            evaluate(&inst, AlternativeId(0), AlternativeId(0)).unwrap(),
            1.0
        );
    }

    #[test]
    fn sphere_nearest_neighbor_has_largest_cross_evaluation() {
        let inst = make_sphere(2, 8, 3, NoiseMode::Deterministic).unwrap();
        let mut best = None;
        let mut best_v = f64::NEG_INFINITY;
        for z in 0..inst.len() {
            if z == 3 {
                continue;
            }
            let v = evaluate(&inst, AlternativeId(z), AlternativeId(3)).unwrap();
            if v > best_v {
                best_v = v;
                best = Some(z);
            }
        }
        // neighbors 2 and 4 tie at cos(45deg); the scan picks 2 first
        assert_eq!(best, Some(2));
        assert!((best_v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn sq_self_and_negation_evaluations() {
        let h = vec![1i8, 1, -1, -1];
        let neg: Vec<i8> = h.iter().map(|v| -v).collect();
        let inst = make_sq(vec![h, neg], vec![0.25; 4], 0).unwrap();
        assert_eq!(
            evaluate(&inst, AlternativeId(0), AlternativeId(0)).unwrap(),
            1.0
        );
        assert_eq!(
            evaluate(&inst, AlternativeId(1), AlternativeId(0)).unwrap(),
            -1.0
        );
    }

    #[test]
    fn sq_sample_oracle_mean_matches_rho() {
        // empirical mean of 1e5 single-sample responses within 0.015
        let h1 = vec![1i8, 1, 1, -1, -1, 1, -1, -1];
        let h2 = vec![1i8, -1, 1, 1, -1, -1, 1, -1];
        let inst = make_sq(vec![h1, h2], vec![0.125; 8], 0).unwrap();
        let rho = evaluate(&inst, AlternativeId(1), AlternativeId(0)).unwrap();
        let mut rng = rng_for(123, 0);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let s = sample_reward(&inst, AlternativeId(1), &mut rng).unwrap();
            assert!(s.value == 1.0 || s.value == -1.0);
            acc += s.value;
        }
        let emp = acc / n as f64;
        assert!((emp - rho).abs() < 0.015, "empirical {emp} vs rho {rho}");
    }

    #[test]
    fn invalid_distribution_rejected() {
        assert!(make_sq(vec![vec![1, -1]], vec![0.6, 0.6], 0).is_err());
    }
}
