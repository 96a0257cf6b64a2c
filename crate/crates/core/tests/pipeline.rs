//! Cross-module integration: the whole analysis pipeline driven through the
//! public API, from synthetic data to dendrograms and scenario deltas.

use mvgb::{
    compare_models, covariance_explained, evaluate, fit, generate_synthetic, global_importance,
    hierarchical_cluster, manhattan_distances, relative_influence, scenario_compare, HyperParams,
    Intervention, Linkage, SyntheticSpec,
};

#[test]
fn synthetic_to_dendrogram_pipeline_holds_together() {
    let d = generate_synthetic(&SyntheticSpec {
        n: 400,
        seed: 7,
        noise_corr: 0.8,
    })
    .unwrap();
    let hp = HyperParams {
        n_trees: 200,
        ..HyperParams::default()
    };
    let (model, trace) = fit(&d, &hp).unwrap();
    assert!(model.best_iteration >= 1);
    assert_eq!(trace.residual_cov.len(), 201);

    // Predictions live on the original response scale.
    let pred = model.predict(d.features()).unwrap();
    assert_eq!((pred.rows(), pred.cols()), (400, 2));

    // Influence, importance and covariance attribution agree on dimensions
    // and naming.
    let influence = relative_influence(&model);
    assert_eq!(influence.feature_names, d.origin_names());
    let ranking = global_importance(&influence);
    assert_eq!(ranking.len(), 5);
    let total: f64 = ranking.iter().map(|(_, s)| s).sum();
    assert!((total - 100.0).abs() < 1e-6);

    let tensor = covariance_explained(&model, &trace).unwrap();
    assert_eq!(tensor.values.rows(), 5);
    assert_eq!(tensor.values.cols(), 3);
    assert_eq!(tensor.pair_labels(), vec!["y1~y1", "y1~y2", "y2~y2"]);

    // Predictors cluster over their pair profiles; pairs over predictors.
    let predictor_distances =
        manhattan_distances(&tensor.values, &tensor.feature_names).unwrap();
    let predictor_dendrogram =
        hierarchical_cluster(&predictor_distances, Linkage::Complete).unwrap();
    assert_eq!(predictor_dendrogram.merges.len(), 4);

    let pair_distances =
        manhattan_distances(&tensor.values.transpose(), &tensor.pair_labels()).unwrap();
    let pair_dendrogram = hierarchical_cluster(&pair_distances, Linkage::Complete).unwrap();
    assert_eq!(pair_dendrogram.merges.len(), 2);

    // Evaluation and comparison run on the same data.
    let report = evaluate(&d, &hp, 5).unwrap();
    assert_eq!(report.n_train + report.n_test, 400);
    let comparison = compare_models(&d, &hp, 5).unwrap();
    assert_eq!(comparison.per_response.len(), 2);
    for (resp, cmp) in report.per_response.iter().zip(&comparison.per_response) {
        assert_eq!(resp.name, cmp.name);
        assert_eq!(resp.r2.to_bits(), cmp.r2_multi.to_bits());
    }

    // Scenario deltas come back per intervention, per response.
    let deltas = scenario_compare(
        &model,
        d.features(),
        &[Intervention::set("x1", 0.9), Intervention::set("x1", 0.1)],
    )
    .unwrap();
    assert_eq!(deltas.len(), 2);
    assert_eq!(deltas[0].len(), 2);
    // Pushing the shared driver up moves both responses up; down moves down.
    assert!(deltas[0][0].scenario_mean > deltas[0][0].baseline_mean);
    assert!(deltas[1][0].scenario_mean < deltas[1][0].baseline_mean);
}

#[test]
fn fitted_artifacts_are_shareable_across_threads() {
    let d = generate_synthetic(&SyntheticSpec {
        n: 120,
        seed: 3,
        noise_corr: 0.4,
    })
    .unwrap();
    let (model, _) = fit(
        &d,
        &HyperParams {
            n_trees: 30,
            ..HyperParams::default()
        },
    )
    .unwrap();
    let expect = model.predict(d.features()).unwrap();
    std::thread::scope(|scope| {
        for _ in 0..4 {
            scope.spawn(|| {
                let got = model.predict(d.features()).unwrap();
                assert_eq!(got, expect);
            });
        }
    });
}
