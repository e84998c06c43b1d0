macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(generate_dataset, "generate_dataset.rs", generate_dataset_runs);
example!(morphology_ops, "morphology_ops.rs", morphology_ops_runs);
example!(morph_clustering, "morph_clustering.rs", morph_clustering_runs);
example!(ahc_baseline, "ahc_baseline.rs", ahc_baseline_runs);
example!(kmeans_basics, "kmeans_basics.rs", kmeans_basics_runs);
example!(knn_recognition, "knn_recognition.rs", knn_recognition_runs);
example!(kmcknn_recognition, "kmcknn_recognition.rs", kmcknn_recognition_runs);
example!(cross_validation, "cross_validation.rs", cross_validation_runs);
example!(scenario_decision_point, "scenario_decision_point.rs", scenario_decision_point_runs);
example!(csv_formats, "csv_formats.rs", csv_formats_runs);
