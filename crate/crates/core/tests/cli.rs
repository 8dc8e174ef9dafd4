use std::fs;
use std::path::Path;
use std::process::Command;

use modgsp::app::main_with_args;
use modgsp::fixtures;
use modgsp::io::{read_edge_list, read_partition};
use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut full = vec!["modgsp", "--out-dir", out.to_str().unwrap()];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_files_match_golden_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["fixture", "all"]), 0);
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in ["toy10.csv", "toy10_partition.csv"] {
        assert_eq!(
            fs::read_to_string(dir.path().join(name)).unwrap(),
            fs::read_to_string(golden.join(name)).unwrap(),
            "{name}"
        );
    }
    for name in fixtures::NAMES {
        let (g, p) = fixtures::by_name(name).unwrap();
        let back = read_edge_list(&dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(back.content_hash(), g.content_hash(), "{name}");
        if let Some(p) = p {
            let q = read_partition(&dir.path().join(format!("{name}_partition.csv")), &back).unwrap();
            assert_eq!(q.labels(), p.labels());
        }
    }
    let k3 = fs::read_to_string(dir.path().join("k3.csv")).unwrap();
    assert_eq!(k3.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn spectrum_on_toy_fixture() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["spectrum", "--fixture", "toy10", "--operator", "q+"]), 0);
    let r = json(&dir.path().join("spectrum.json"));
    assert_eq!(r["command"], "spectrum");
    assert_eq!(r["config"]["inputs"]["fixture"], "toy10");
    let res = &r["results"];
    assert_eq!(res["interlacing_holds"], true);
    assert_eq!(res["laplacian_zero_eigenvalues"], 1);
    assert!(res["modularity_sign_counts"]["positive"].as_u64().unwrap() >= 1);
    assert!(res["modularity_sign_counts"]["negative"].as_u64().unwrap() >= 1);
    assert_eq!(res["modularity_sign_counts"]["zero"], 1);
    assert!(res["null_model_row_sum_max_deviation"].as_f64().unwrap() < 1e-12);
    let cross = fs::read_to_string(dir.path().join("cross_forms.csv")).unwrap();
    assert_eq!(cross.lines().count(), 11);
    let eig = fs::read_to_string(dir.path().join("eigenvalues_modularity-plus.csv")).unwrap();
    let first: f64 = eig.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(first.abs() < 1e-12);
}

#[test]
fn eigen_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    assert_eq!(run(dir.path(), &["--cache-dir", c, "spectrum", "--fixture", "barbell6"]), 0);
    let hash = fixtures::barbell6().content_hash();
    for kind in ["laplacian", "modularity", "adjacency"] {
        assert!(cache.join(format!("{}-{kind}.bin", &hash[..16])).is_file(), "{kind}");
    }
    let first = fs::read(dir.path().join("eigenvalues_modularity.csv")).unwrap();
    assert_eq!(run(dir.path(), &["--cache-dir", c, "spectrum", "--fixture", "barbell6"]), 0);
    assert_eq!(first, fs::read(dir.path().join("eigenvalues_modularity.csv")).unwrap());
}

#[test]
fn filter_reports_delta_c_and_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["filter", "--fixture", "toy10", "--node", "1", "--node", "6", "--filter", "modular", "--filter", "band:2:4:flat"];
    assert_eq!(run(dir.path(), &args), 0);
    let r = json(&dir.path().join("filter.json"));
    let filters = r["results"]["filters"].as_array().unwrap();
    assert_eq!(filters.len(), 2);
    assert!(filters[0]["outcome"]["delta_c"].as_f64().is_some());
    assert!(filters[1]["nodes"]["6"].as_f64().is_some());
    assert!(dir.path().join("filtered_modular.csv").is_file());
    assert!(dir.path().join("filtered_band2-4.csv").is_file());
    let roles = fs::read_to_string(dir.path().join("roles.csv")).unwrap();
    assert!(roles.starts_with("node_id,community_id,value,k_in,k_out,z_in,z_out"));
}

#[test]
fn sample_compare_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "7", "sample", "--fixture", "planted-hub", "--bandwidth", "4", "--m", "6", "--compare"];
    assert_eq!(run(a.path(), &args), 0);
    assert_eq!(run(b.path(), &args), 0);
    for f in ["sample.json", "sampling_set_modularity.csv", "sampling_set_laplacian.csv"] {
        let name_a = fs::read_to_string(a.path().join(f)).unwrap();
        let name_b = fs::read_to_string(b.path().join(f)).unwrap();
        if f == "sample.json" {
            let strip = |s: &str| {
                let mut v: Value = serde_json::from_str(s).unwrap();
                v["config"]["out_dir"] = Value::Null;
                v
            };
            assert_eq!(strip(&name_a), strip(&name_b));
        } else {
            assert_eq!(name_a, name_b);
        }
    }
    let r = json(&a.path().join("sample.json"));
    assert_eq!(r["config"]["seed"], 7);
    assert!(r["results"]["modularity"]["run"]["mean_degree"].as_f64().is_some());
    assert!(r["results"]["p_value"].as_f64().is_some());
    let set = fs::read_to_string(a.path().join("sampling_set_modularity.csv")).unwrap();
    assert_eq!(set.lines().count(), 7);
}

#[test]
fn surrogate_outputs_are_seed_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "3", "surrogate", "--fixture", "planted-hub", "--count", "300", "--mode", "modular-only", "--mode", "all-laplacian"];
    assert_eq!(run(a.path(), &args), 0);
    assert_eq!(run(b.path(), &args), 0);
    let f = "surrogate_modular-only.csv";
    let text = fs::read_to_string(a.path().join(f)).unwrap();
    assert_eq!(text, fs::read_to_string(b.path().join(f)).unwrap());
    assert!(text.starts_with("node_id,value,p_value,significant\n"));
    let r = json(&a.path().join("surrogate.json"));
    assert_eq!(r["results"]["modes"].as_array().unwrap().len(), 2);
    assert_eq!(r["config"]["surrogate"]["count"], 300);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed": 11, "inputs": {"fixture": "toy10"}, "denoise": {"sigma2": [0.1], "mu_grid": {"min": 0.01, "max": 10, "count": 5}}}"#,
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(run(dir.path(), &["--config", c, "denoise", "--regularizers", "laplacian,q+"]), 0);
    let r = json(&dir.path().join("denoise.json"));
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["denoise"]["mu_grid"]["count"], 5);
    assert_eq!(r["config"]["denoise"]["regularizers"], serde_json::json!(["laplacian", "modularity-plus"]));
    let level = &r["results"]["levels"][0];
    assert_eq!(level["sigma2"], 0.1);
    assert_eq!(level["sweeps"].as_array().unwrap().len(), 2);
    let sweep = fs::read_to_string(dir.path().join("denoise_laplacian_0.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 6);

    assert_eq!(run(dir.path(), &["--config", c, "--seed", "12", "denoise"]), 0);
    assert_eq!(json(&dir.path().join("denoise.json"))["config"]["seed"], 12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["no-such-command"]), 2);
    assert_eq!(run(d, &["spectrum"]), 2);
    assert_eq!(run(d, &["filter", "--fixture", "toy10", "--filter", "band:3:1:flat"]), 2);
    assert_eq!(run(d, &["denoise", "--fixture", "toy10", "--regularizers", "modularity"]), 2);
    assert_eq!(run(d, &["sample", "--fixture", "toy10", "--bandwidth", "20"]), 2);
    assert_eq!(run(d, &["spectrum", "--graph", d.join("missing.csv").to_str().unwrap()]), 3);
    let bad = d.join("bad.csv");
    fs::write(&bad, "a,b\nb,c,heavy\n").unwrap();
    assert_eq!(run(d, &["spectrum", "--graph", bad.to_str().unwrap()]), 3);
    let cfg = d.join("cfg.json");
    fs::write(&cfg, r#"{"sede": 1}"#).unwrap();
    assert_eq!(run(d, &["--config", cfg.to_str().unwrap(), "fixture", "k3"]), 2);
    assert_eq!(run(d, &["ingest-openflights", "--dir", d.to_str().unwrap()]), 3);
}

#[test]
fn binary_runs_from_edge_list_and_signal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let graph = d.join("g.csv");
    let signal = d.join("s.csv");
    fs::write(&graph, "a,b\nb,c\nc,a\nc,d\nd,e\ne,f\nf,d\n").unwrap();
    fs::write(&signal, "node_id,value\na,1\nb,1.5\nc,0.5\nd,-1\ne,-0.5\nf,-1.5\n").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_modgsp"))
        .args(["--out-dir", d.to_str().unwrap(), "filter"])
        .args(["--graph", graph.to_str().unwrap(), "--signal", signal.to_str().unwrap()])
        .args(["--filter", "modular", "--filter", "band:1:3:flat"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let out = fs::read_to_string(d.join("filtered_band1-3.csv")).unwrap();
    assert_eq!(out.lines().count(), 7);
    // one positive modularity eigenvalue: the smooth band is {λ = 0} and its weights are 0/0
    let status = Command::new(env!("CARGO_BIN_EXE_modgsp"))
        .args(["--out-dir", d.to_str().unwrap(), "filter"])
        .args(["--graph", graph.to_str().unwrap(), "--filter", "smooth"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(env!("CARGO_BIN_EXE_modgsp"))
        .args(["spectrum", "--fixture", "nope"])
        .current_dir(d)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
