//! Library-level end-to-end run: fixture corpus through feature tables,
//! split, grid evaluation, and report rendering, checking that every
//! artifact hand-off preserves the data exactly.

use betadct::features::{
    extract_descriptors, read_feature_tables, write_feature_tables, FeatureOptions,
};
use betadct::fixture::{generate_fixture, FixtureOptions};
use betadct::report::{best_cell_line, emit_heatmap, emit_report, render_report, ReportFormat};
use betadct_core::{evaluate_grid, stratified_split, ClassifierGridEntry, RegionKind};

fn small_fixture() -> FixtureOptions {
    FixtureOptions {
        videos_per_class: 12,
        frames_per_video: 2,
        ..FixtureOptions::default()
    }
}

#[test]
fn fixture_flows_through_features_split_grid_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_fixture(dir.path(), &small_fixture()).unwrap();
    assert_eq!(manifest.entries.len(), 24);

    let tables =
        extract_descriptors(&manifest, dir.path(), &FeatureOptions::default()).unwrap();
    write_feature_tables(dir.path(), &tables).unwrap();
    let datasets = read_feature_tables(&dir.path().join("features")).unwrap();
    assert_eq!(datasets.len(), tables.len());

    // The CSV hop must hand back bit-identical features in table order.
    for (dataset, (region, descriptors)) in datasets.iter().zip(tables.iter()) {
        assert_eq!(dataset.region(), *region);
        assert_eq!(dataset.rows().len(), descriptors.len());
        for (row, descriptor) in dataset.rows().iter().zip(descriptors.iter()) {
            assert_eq!(row.video_id, descriptor.video_id);
            assert_eq!(row.label, descriptor.label);
            let row_bits: Vec<u64> = row.features.iter().map(|f| f.to_bits()).collect();
            let desc_bits: Vec<u64> =
                descriptor.mean_betas.iter().map(|b| b.to_bits()).collect();
            assert_eq!(row_bits, desc_bits);
        }
    }

    // Twelve videos per class split largest-remainder: 6/2/4 each.
    let split = stratified_split(&datasets[0], 7).unwrap();
    assert_eq!(split.sizes(), (12, 4, 8));

    let grid =
        evaluate_grid(&datasets, &ClassifierGridEntry::family_bench(), &split).unwrap();
    assert_eq!(grid.cells.len(), 4 * RegionKind::ALL.len());
    assert_eq!(
        grid.classifier_names(),
        ["knn", "lda", "decision_tree", "random_forest"]
    );

    // The blur signal is strong enough that the face column separates.
    let face = grid.cell("random_forest", RegionKind::Face).unwrap();
    assert!(face.auc.unwrap() > 0.9, "face auc {:?}", face.auc);

    let out = dir.path().join("reports");
    std::fs::create_dir(&out).unwrap();
    for format in ReportFormat::ALL {
        let path = out.join(format!("report.{}", format.extension()));
        emit_report(&grid, format, &path).unwrap();
        assert!(path.metadata().unwrap().len() > 0);
    }
    emit_heatmap(&grid, &out.join("heatmap.svg")).unwrap();
    assert!(out.join("heatmap.svg").metadata().unwrap().len() > 0);

    let csv = render_report(&grid, ReportFormat::Csv);
    assert_eq!(csv.lines().count() - 1, grid.cells.len());
    assert!(best_cell_line(&grid).is_some());
}

#[test]
fn pooled_extraction_yields_one_patch_per_video() {
    let dir = tempfile::tempdir().unwrap();
    let options = FixtureOptions {
        videos_per_class: 2,
        frames_per_video: 2,
        ..FixtureOptions::default()
    };
    let manifest = generate_fixture(dir.path(), &options).unwrap();
    let pooled = FeatureOptions {
        pooled: true,
        regions: vec![RegionKind::EntireFrame, RegionKind::Face],
        ..FeatureOptions::default()
    };
    let tables = extract_descriptors(&manifest, dir.path(), &pooled).unwrap();
    for (_, descriptors) in &tables {
        assert_eq!(descriptors.len(), 4);
        assert!(descriptors.iter().all(|d| d.patch_count == 1));
    }

    // Per-patch averaging differs from pooling all blocks into one
    // estimate, so the two modes are distinct features.
    let averaged = FeatureOptions {
        regions: vec![RegionKind::EntireFrame, RegionKind::Face],
        ..FeatureOptions::default()
    };
    let separate = extract_descriptors(&manifest, dir.path(), &averaged).unwrap();
    assert!(separate[0].1.iter().all(|d| d.patch_count == 2));
    assert_ne!(separate[0].1[0].mean_betas, tables[0].1[0].mean_betas);
}
