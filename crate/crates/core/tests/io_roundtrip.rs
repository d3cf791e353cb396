mod common;

use std::fs;

use simplicial::experiments::{presets, InitSource, Source};
use simplicial::io;
use simplicial::sbtm::generate;
use simplicial::Graph;

#[test]
fn dataset_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::rng(4);
    let n = 40;
    let edges = common::random_edges(n, 0.1, &mut r);
    let g = Graph::from_edge_list(n, &edges).unwrap();
    let labels: Vec<usize> = (0..n).map(|v| v % 3).collect();
    io::write_edge_list(&dir.path().join("e.txt"), &g).unwrap();
    io::write_labels(&dir.path().join("l.txt"), &labels).unwrap();
    let back = io::load_dataset(&dir.path().join("e.txt"), &dir.path().join("l.txt")).unwrap();
    assert_eq!(back.graph, g);
    assert_eq!(back.labels, labels);
    assert_eq!(back.label_count, 3);
}

#[test]
fn string_ids_are_remapped() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.txt"), "# cites\npaperB paperA\npaperC paperA\n").unwrap();
    fs::write(
        dir.path().join("l.txt"),
        "paperA ML\npaperB Theory\npaperC ML\npaperD Theory\n",
    )
    .unwrap();
    let d = io::load_dataset(&dir.path().join("e.txt"), &dir.path().join("l.txt")).unwrap();
    assert_eq!(d.ids, vec!["paperA", "paperB", "paperC", "paperD"]);
    assert_eq!(d.labels, vec![0, 1, 0, 1]);
    assert_eq!(d.graph.edge_count(), 2);
    assert_eq!(d.graph.degree(3), 0);
}

#[test]
fn missing_labels_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..15).map(|i| format!("a x{i}\n")).collect();
    fs::write(dir.path().join("e.txt"), edges).unwrap();
    fs::write(dir.path().join("l.txt"), "a 0\nx0 1\n").unwrap();
    let err = io::load_dataset(&dir.path().join("e.txt"), &dir.path().join("l.txt"))
        .unwrap_err()
        .to_string();
    assert!(err.starts_with("input error: 14 node(s)"), "{err}");
    assert!(
        err.contains("x1, x2") && err.contains("x10") && !err.contains("x11,"),
        "{err}"
    );
}

#[test]
fn bad_lines_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("e.txt"), "0 1\n1 2 3\n").unwrap();
    fs::write(dir.path().join("l.txt"), "0 0\n1 1\n2 1\n").unwrap();
    let err = io::load_dataset(&dir.path().join("e.txt"), &dir.path().join("l.txt")).unwrap_err();
    assert!(err.to_string().contains("line 2"));
}

#[test]
fn generated_graph_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let spec = presets::balanced_spec();
    let g = generate(&spec, 7).unwrap();
    io::write_edge_list(&dir.path().join("edges.txt"), &g.graph).unwrap();
    io::write_labels(&dir.path().join("labels.txt"), &g.truth).unwrap();
    let back = io::load_dataset(&dir.path().join("edges.txt"), &dir.path().join("labels.txt")).unwrap();
    assert_eq!(back.graph, g.graph);
    assert_eq!(back.labels, g.truth);
}

#[test]
fn shipped_configs_match_presets() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let b = io::read_experiment(&root.join("balanced.toml")).unwrap();
    assert_eq!(b.config, presets::balanced());
    let mut im = presets::imbalanced();
    im.alpha_values = vec![1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(io::read_experiment(&root.join("imbalanced.toml")).unwrap().config, im);
    let homo = io::read_experiment(&root.join("balanced_homo.toml")).unwrap();
    assert_eq!(homo.sweep, Some(presets::balanced_homo_sweep()));
    let hetero = io::read_experiment(&root.join("balanced_hetero.toml")).unwrap();
    assert_eq!(hetero.sweep, Some(presets::balanced_hetero_sweep()));
    let prior = io::read_experiment(&root.join("balanced_prior.toml")).unwrap();
    assert_eq!(prior.sweep, Some(presets::prior_sweep()));
    let noisy = io::read_experiment(&root.join("noisy_init.toml")).unwrap();
    assert_eq!(noisy.config.init, InitSource::NoisyTruth { sigma: 0.5 });
    assert!(matches!(&noisy.config.source, Source::Sbtm { spec, .. } if *spec == presets::balanced_spec()));
}

#[test]
fn experiment_config_errors() {
    let base = std::path::Path::new(".");
    let ok_source = "[source]\nN = [50, 50]\nB2 = { diag = 0.3, off = 0.05 }\n";
    assert!(io::parse_experiment(ok_source, base).is_ok());
    for bad in [
        format!("{ok_source}[sweep]\nprior_ratio = 1.5\n"),
        format!("{ok_source}[sweep]\nm_values = [2, 7]\n"),
        format!("{ok_source}[sweep]\nwhat = 1\n"),
        format!("{ok_source}[train]\nepochs = \"ten\"\n"),
        format!("{ok_source}[sweep]\nparameter = \"homo\"\n"),
        "[source]\nkind = \"graphml\"\n".to_string(),
    ] {
        let err = io::parse_experiment(&bad, base).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{bad}");
    }
}

#[test]
fn report_files_are_deterministic() {
    let mut cfg = presets::balanced();
    cfg.seeds = vec![0, 1];
    cfg.m_values = vec![2, 3];
    let a = simplicial::experiments::run_experiment(&cfg).unwrap();
    let b = simplicial::experiments::run_experiment(&cfg).unwrap();
    assert_eq!(io::format_report_rows(&a), io::format_report_rows(&b));
    assert_eq!(io::format_trajectories(&a), io::format_trajectories(&b));
    assert!(io::format_gains(&a).starts_with("alpha,mean_pi,mean_gain_SI-2,mean_gain_SI-3\n"));
}
