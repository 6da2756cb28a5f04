//! Heavier randomized cross-checks, ignored by default:
//! `cargo test -p dissim --test stress -- --ignored --nocapture`

mod common;

use std::sync::Arc;

use rand::RngExt;

use dissim::dims;
use dissim::learners::{
    LsLearner, OptimisticLearner, StructuredLsLearner, StructuredOptimisticLearner,
};
use dissim::protocol::{rng_for, run_protocol, Instance, InstanceRef, Metadata, NoiseMode};

#[test]
#[ignore]
fn dissimilarity_matches_naive_oracle_on_many_fixtures() {
    for i in 0..300u64 {
        let mut rng = rng_for(i, 71);
        let n = 3 + (i as usize % 7);
        let inst = common::random_dense_instance(&mut rng, n);
        let alpha = [-0.75, -0.25, 0.25, 0.75, 1.0][i as usize % 5];
        let eps = [0.2, 0.4, 0.6, 1.1][i as usize % 4];
        let (fast, cert) = dims::dissimilarity_dim(&inst, alpha, eps).unwrap();
        let slow = common::naive_dissimilarity_dim(&inst, alpha, eps);
        assert_eq!(fast, slow, "fixture {i}: alpha {alpha}, eps {eps}");
        if let Some(c) = cert {
            dims::verify_dissimilarity_certificate(&c, &inst).unwrap();
        }
    }
}

#[test]
fn symmetric_tables_match_naive_oracle() {
    // the combination-only branch of the search needs symmetric tables,
    // which the random asymmetric fixtures above never produce
    for i in 0..120u64 {
        let mut rng = rng_for(i, 81);
        let n = 3 + (i as usize % 6);
        let mut table = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = common::grid_value(&mut rng);
                table[a * n + b] = v;
                table[b * n + a] = v;
            }
        }
        let target = rng.random_range(0..n);
        let col_max = (0..n)
            .map(|z| table[z * n + target])
            .fold(f64::NEG_INFINITY, f64::max);
        table[target * n + target] = col_max;
        let inst = Instance::from_dense(
            vec![dissim::protocol::AltPayload::None; n],
            table,
            dissim::protocol::AlternativeId(target),
            NoiseMode::Deterministic,
            Metadata::default(),
        )
        .unwrap();
        let alpha = [-0.5, 0.0, 0.5][i as usize % 3];
        let eps = [0.25, 0.5][i as usize % 2];
        let (fast, cert) = dims::dissimilarity_dim(&inst, alpha, eps).unwrap();
        let slow = common::naive_dissimilarity_dim(&inst, alpha, eps);
        assert_eq!(fast, slow, "fixture {i}: alpha {alpha} eps {eps}");
        if let Some(c) = cert {
            dims::verify_dissimilarity_certificate(&c, &inst).unwrap();
        }
    }
}

#[test]
#[ignore]
fn eluder_matches_naive_oracle_on_many_fixtures() {
    for i in 0..300u64 {
        let mut rng = rng_for(i, 72);
        let funcs = 2 + (i as usize % 4);
        let acts = 2 + (i as usize % 4);
        let values = common::random_product_values(&mut rng, funcs, acts);
        for eps in [0.2, 0.4, 0.8] {
            let (fast, cert) = dims::eluder_dim(&values, eps).unwrap();
            let slow = common::naive_eluder_dim(&values, eps);
            assert_eq!(fast, slow, "fixture {i} at eps {eps}");
            if let Some(c) = cert {
                dims::verify_eluder_certificate(&c, &values).unwrap();
            }
        }
    }
}

#[test]
#[ignore]
fn strong_sq_matches_naive_oracle_on_many_fixtures() {
    for i in 0..300u64 {
        let mut rng = rng_for(i, 73);
        let classes = 2 + (i as usize % 7);
        let domain = [2usize, 4, 8, 16][i as usize % 4];
        let hyps = common::random_hypotheses(&mut rng, classes, domain);
        let dist = vec![1.0 / domain as f64; domain];
        for eps in [0.25, 0.5, 1.0] {
            let (fast, cert) = dims::strong_sq_dim(&hyps, &dist, eps).unwrap();
            let slow = common::naive_strong_sq_dim(&hyps, &dist, eps);
            assert_eq!(fast, slow, "fixture {i} at eps {eps}");
            if let Some(c) = cert {
                dims::verify_strong_sq_certificate(&c, &hyps, &dist).unwrap();
            }
        }
    }
}

#[test]
#[ignore]
fn adapters_match_generic_rules_on_tie_dense_fixtures() {
    // values restricted to {0, 0.5, 1} so argmin/argmax ties are everywhere
    for i in 0..200u64 {
        let mut rng = rng_for(i, 74);
        let funcs = 2 + (i as usize % 6);
        let acts = 2 + (i as usize % 4);
        let values: Vec<Vec<f64>> = (0..funcs)
            .map(|_| {
                (0..acts)
                    .map(|_| [0.0, 0.5, 1.0][rng.random_range(0..3usize)])
                    .collect()
            })
            .collect();
        let max_value = values
            .iter()
            .flat_map(|r| r.iter().cloned())
            .fold(f64::NEG_INFINITY, f64::max);
        let inst: InstanceRef = Arc::new(
            Instance::from_product(
                values,
                0,
                NoiseMode::TwoPoint,
                Metadata::new("stress", serde_json::Value::Null),
            )
            .unwrap(),
        );
        let alpha = max_value.min(0.5);
        let t_steps = 25;

        let mut generic = LsLearner::new(Arc::clone(&inst), alpha).unwrap();
        let a = run_protocol(&inst, &mut generic, t_steps, alpha, i).unwrap();
        let mut adapter = StructuredLsLearner::new(Arc::clone(&inst), alpha).unwrap();
        let b = run_protocol(&inst, &mut adapter, t_steps, alpha, i).unwrap();
        assert_eq!(
            a.steps.iter().map(|s| s.query).collect::<Vec<_>>(),
            b.steps.iter().map(|s| s.query).collect::<Vec<_>>(),
            "ls adapter diverged on fixture {i}"
        );

        for radius in [0.0, 0.5, 4.0] {
            let mut generic = OptimisticLearner::new(Arc::clone(&inst), radius);
            let a = run_protocol(&inst, &mut generic, t_steps, alpha, i ^ 0xAB).unwrap();
            let mut adapter = StructuredOptimisticLearner::new(Arc::clone(&inst), radius).unwrap();
            let b = run_protocol(&inst, &mut adapter, t_steps, alpha, i ^ 0xAB).unwrap();
            assert_eq!(
                a.steps.iter().map(|s| s.query).collect::<Vec<_>>(),
                b.steps.iter().map(|s| s.query).collect::<Vec<_>>(),
                "optimistic adapter diverged on fixture {i} at radius {radius}"
            );
        }
    }
}
