use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use gdtransfer::sweep::{evaluate_point, AncillaKind, Model, Param, ParamSet};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn fields(&self) -> HashMap<String, String> {
        self.stdout
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }

    fn num(&self, key: &str) -> f64 {
        self.fields()
            .get(key)
            .unwrap_or_else(|| panic!("no '{key}' in:\n{}", self.stdout))
            .parse()
            .unwrap()
    }
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_gdtransfer"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

#[test]
fn discord_of_vacuum_correlations_is_zero() {
    let r = run(&["discord", "--symmetric-v", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.num("discord"), 0.0);
}

#[test]
fn discord_of_pure_epr_state() {
    let r = run(&["discord", "--epr-r", "0.33"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.num("nu_minus"), 1.0);
    assert!((r.num("discord") - 0.527066226127).abs() < 1e-11);
}

#[test]
fn discord_report_has_all_fields() {
    let r = run(&["discord", "--symmetric-v", "50"]);
    assert!((r.num("discord") - 0.537196366312).abs() < 1e-11);
    for key in [
        "mutual_information", "classical_correlation", "nu_minus", "nu_plus", "e_min", "branch", "i1", "i2", "i3",
        "i4", "ppt_witness",
    ] {
        assert!(r.fields().contains_key(key), "missing {key}");
    }
    assert_eq!(r.fields()["branch"], "a");
}

#[test]
fn discord_from_covariance_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.txt");
    fs::write(&good, "# symmetric V=50\n51 0 50 0\n0 51 0 -50\n50 0 51 0\n0 -50 0 51\n").unwrap();
    let r = run(&["discord", "--cov", good.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((r.num("discord") - 0.537196366312).abs() < 1e-11);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 0 0.5 0\n0 1 0 -0.5\n0.5 0 1 0\n0 -0.5 0 1\n").unwrap();
    let r = run(&["discord", "--cov", bad.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("nu_minus"), "{}", r.stderr);

    let r = run(&["discord", "--cov", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(r.code, 4);
}

#[test]
fn transfer_examples() {
    let r = run(&["transfer", "--va", "50", "--ancilla", "discordant", "--vb", "0", "--g", "0.26"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.num("output_discord") > r.num("input_discord"));
    assert_eq!(r.fields()["cross_check"], "ok");

    let r = run(&["transfer", "--va", "50", "--ancilla", "epr", "--r", "0.33", "--g", "0.32"]);
    assert!((r.num("output_discord") - 0.92).abs() < 0.005);

    let r = run(&["transfer", "--va", "50", "--ancilla", "epr", "--r", "0.33", "--g", "0"]);
    assert_eq!(r.num("output_discord"), 0.0);
}

#[test]
fn transfer_engine_flag_and_covariance_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.cov");
    let closed = run(&["transfer", "--va", "30", "--vb", "5", "--g", "0.5"]);
    let engine = run(&[
        "transfer", "--va", "30", "--vb", "5", "--g", "0.5", "--engine", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(engine.fields()["method"], "engine");
    assert!((closed.num("output_discord") - engine.num("output_discord")).abs() < 1e-10);
    let round_trip = run(&["discord", "--cov", path.to_str().unwrap()]);
    assert!((round_trip.num("discord") - engine.num("output_discord")).abs() < 1e-10);

    let lossy = run(&["transfer", "--va", "30", "--eta", "0.9"]);
    assert_eq!(lossy.fields()["method"], "engine");
    assert!(!lossy.fields().contains_key("cross_check"));
}

#[test]
fn transfer_rejects_bad_flags() {
    assert_eq!(run(&["transfer", "--va", "-1"]).code, 2);
    assert_eq!(run(&["transfer", "--eta", "1.5"]).code, 2);
    assert_eq!(run(&["transfer", "--ancilla", "thermal"]).code, 2);
}

#[test]
fn two_point_sweep_has_three_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let r = run(&["sweep", "--model", "symmetric", "--axis", "va=0:1:2", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains('\r'));
    assert!(text.starts_with("v_a,discord,"));
}

#[test]
fn gain_sweep_peaks_near_quarter_gain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let r = run(&[
        "sweep", "--model", "discordant", "--axis", "g=0:1.5:301", "--set", "va=50", "--set", "vb=0", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = read_csv(&path);
    let d = column(&h, &rows, "discord");
    let g = column(&h, &rows, "g");
    assert!((g[argmax(&d)] - 0.26).abs() <= 0.01);
}

#[test]
fn attenuation_sweep_beats_symmetric_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    run(&[
        "sweep", "--model", "asymmetric", "--axis", "t=0:1:101", "--set", "va=50", "--outputs", "discord", "--out",
        path.to_str().unwrap(),
    ]);
    let (h, rows) = read_csv(&path);
    assert_eq!(h, ["t", "v_a", "discord"]);
    let d = column(&h, &rows, "discord");
    assert!(d.iter().cloned().fold(f64::MIN, f64::max) > *d.last().unwrap());
}

#[test]
fn sweep_to_stdout_and_errors() {
    let r = run(&["sweep", "--model", "epr", "--axis", "r=0:1:3", "--outputs", "discord,nu_minus"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.lines().next(), Some("r,v_a,g,eta,discord,nu_minus"));
    assert_eq!(r.stdout.lines().count(), 4);
    assert_eq!(run(&["sweep", "--model", "symmetric", "--axis", "g=0:1:3"]).code, 2);
    assert_eq!(run(&["sweep", "--model", "symmetric", "--axis", "va=0:1:1"]).code, 2);
    let r = run(&["sweep", "--model", "symmetric", "--axis", "va=0:1:2", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(r.code, 4);
}

#[test]
fn two_axis_sweep_is_lexicographic() {
    let r = run(&["sweep", "--model", "attenuated", "--axis", "t1=0:1:3", "--axis", "t2=0:1:2", "--outputs", "discord"]);
    let keys: Vec<(String, String)> = r
        .stdout
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap().to_string(), it.next().unwrap().to_string())
        })
        .collect();
    assert_eq!(keys.len(), 6);
    assert_eq!(keys[0], ("0".to_string(), "0".to_string()));
    assert_eq!(keys[1], ("0".to_string(), "1".to_string()));
    assert_eq!(keys[2], ("0.5".to_string(), "0".to_string()));
}

#[test]
fn unknown_figure_lists_valid_names() {
    let r = run(&["figure", "fig9"]);
    assert_eq!(r.code, 2);
    for name in ["fig2a", "fig3b", "fig6"] {
        assert!(r.stderr.contains(name), "{}", r.stderr);
    }
}

#[test]
fn figure_4b_peak_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["figure", "fig4b", "--out", dir.path().to_str().unwrap(), "--plot"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = read_csv(&dir.path().join("fig4b_red_r0.33.csv"));
    assert_eq!(rows.len(), 401);
    let peak = column(&h, &rows, "discord").into_iter().fold(f64::MIN, f64::max);
    assert!((peak - 0.92).abs() < 0.005, "peak {peak}");
    let svg = fs::read_to_string(dir.path().join("fig4b.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

fn crossover(dir: &Path, initial: &str, output: &str) -> f64 {
    let (h0, r0) = read_csv(&dir.join(initial));
    let (h1, r1) = read_csv(&dir.join(output));
    let va = column(&h0, &r0, "v_a");
    let d0 = column(&h0, &r0, "discord");
    let d1 = column(&h1, &r1, "discord");
    let k = (0..va.len()).find(|&i| d1[i] > d0[i]).unwrap();
    va[k]
}

#[test]
fn figure_2_crossovers_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        assert_eq!(run(&["figure", "fig2a", "--out", d.to_str().unwrap()]).code, 0);
    }
    assert_eq!(run(&["figure", "fig2b", "--out", a.to_str().unwrap()]).code, 0);
    let x = crossover(&a, "fig2a_initial.csv", "fig2a_green_vb0_g0.26.csv");
    assert!((16.0..=20.0).contains(&x), "fig2a crossover {x}");
    let x = crossover(&a, "fig2b_initial.csv", "fig2b_green_r0.33_g0.32.csv");
    assert!((6.6..=8.6).contains(&x), "fig2b crossover {x}");
    for entry in fs::read_dir(&b).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn csv_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for fig in ["fig2b", "fig5b", "fig6"] {
        assert_eq!(run(&["figure", fig, "--out", dir.path().to_str().unwrap()]).code, 0);
    }
    let cases: [(&str, Model); 3] = [
        ("fig2b_blue_r1.15_g1.csv", Model::Transfer(AncillaKind::Epr)),
        ("fig5b_red_v50.csv", Model::Asymmetric),
        ("fig6_surface_v50.csv", Model::Attenuated),
    ];
    for (file, model) in cases {
        let (h, rows) = read_csv(&dir.path().join(file));
        for row in rows.iter().step_by(97) {
            let mut p = ParamSet::default();
            for (name, &v) in h.iter().zip(row) {
                if let Ok(param) = name.parse::<Param>() {
                    p.set(param, v);
                }
            }
            let d = evaluate_point(model, &p).unwrap().discord;
            let k = h.iter().position(|c| c == "discord").unwrap();
            assert!((d - row[k]).abs() <= 1e-9, "{file}: {d} vs {}", row[k]);
        }
    }
}

#[test]
fn optimize_examples() {
    let r = run(&["optimize", "--va", "50", "--ancilla", "discordant", "--over", "g,vb"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.num("v_b"), 0.0);
    let r = run(&["optimize", "--asymmetric-v", "1", "--over", "t"]);
    assert!((r.num("t") - 1.0).abs() < 1e-6);
    let r = run(&["optimize", "--asymmetric-v", "50", "--over", "t"]);
    assert!(r.num("t") < 0.99);
    assert_eq!(run(&["optimize", "--over", "g,r,vb"]).code, 2);
    assert_eq!(run(&["optimize", "--over", "g,g"]).code, 2);
    assert_eq!(run(&["optimize", "--ancilla", "epr", "--over", "vb"]).code, 2);
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let base = ["validate", "--va", "50", "--vb", "0", "--samples", "200000", "--seed", "42"];
    let r = run(&[&base[..], &["--g", "0.26"]].concat());
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(r.fields()["result"], "PASS");

    let r = run(&[&base[..], &["--g", "0"]].concat());
    assert_eq!(r.code, 0);

    let r = run(&[&base[..], &["--g", "0.26", "--corrupt-gain", "0.05"]].concat());
    assert_eq!(r.code, 5);
    assert_eq!(r.fields()["result"], "FAIL");

    assert_eq!(run(&["validate", "--samples", "10"]).code, 2);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# defaults for this run\nva = 20\nancilla = epr\nr = 0.33\ng = 0.32\nthreads = 1\n").unwrap();
    let from_cfg = run(&["transfer", "--config", cfg.to_str().unwrap()]);
    let explicit = run(&["transfer", "--va", "20", "--ancilla", "epr", "--r", "0.33", "--g", "0.32"]);
    assert_eq!(from_cfg.code, 0, "{}", from_cfg.stderr);
    assert_eq!(from_cfg.num("output_discord"), explicit.num("output_discord"));
    let overridden = run(&["transfer", "--config", cfg.to_str().unwrap(), "--va", "50"]);
    assert!((overridden.num("output_discord") - 0.92).abs() < 0.005);

    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["transfer", "--config", cfg.to_str().unwrap()]).code, 2);
    assert_eq!(run(&["transfer", "--config", dir.path().join("nope").to_str().unwrap()]).code, 4);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run(&["--threads", "1", "sweep", "--model", "discordant", "--axis", "va=0:100:21", "--optimize-gain"]);
    let two = run(&["--threads", "2", "sweep", "--model", "discordant", "--axis", "va=0:100:21", "--optimize-gain"]);
    assert_eq!(one.code, 0, "{}", one.stderr);
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(run(&["--threads", "0", "discord", "--symmetric-v", "1"]).code, 2);
}
