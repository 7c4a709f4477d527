use std::fs;

use ringlab_cli::{run, RunConfig};

fn go(args: &[&str]) -> ringlab_cli::Outcome {
    run(std::iter::once("ringlab").chain(args.iter().copied()))
}

fn field<'a>(summary: &'a str, key: &str) -> &'a str {
    summary
        .split(' ')
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no `{key}` in `{summary}`"))
}

#[test]
fn pi_digits() {
    let out = go(&["cf", "--x", "3.14159265358979", "--terms", "6"]);
    assert_eq!(out.code, 0);
    assert_eq!(field(&out.summary, "digits"), "7,15,1,292,1,1");
    assert_eq!(field(&out.summary, "a0"), "3");
}

#[test]
fn golden_siegel_radius() {
    let out = go(&["siegel-radius", "--alpha", "0;[1]", "--terms", "200"]);
    assert_eq!(out.code, 0, "{}", out.summary);
    let r: f64 = field(&out.summary, "r").parse().unwrap();
    let u: f64 = field(&out.summary, "uncertainty").parse().unwrap();
    assert!((r - 0.3268).abs() < 0.01 && u > 0.0, "{r} +- {u}");
}

#[test]
fn herman_rotation_is_golden() {
    let out = go(&["herman-rot", "--iters", "20000"]);
    assert_eq!(out.code, 0, "{}", out.summary);
    let rho: f64 = field(&out.summary, "rho").parse().unwrap();
    assert!((rho - 0.618_033_988_75).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(go(&["cf", "--bogus"]).code, 2);
    assert_eq!(go(&["no-such-command"]).code, 2);
    // precondition
    let short = go(&["siegel-radius", "--terms", "10"]);
    assert_eq!(short.code, 2);
    assert_eq!(short.summary, "status=error command=siegel-radius kind=precondition");
    assert_eq!(go(&["solve-t", "--alpha", "0;2"]).code, 2);
    assert_eq!(go(&["rotnum", "--estimator", "nope"]).code, 2);
    // numerical failure: no ring for this u
    let none = go(&["herman-rot", "--u", "1+0i", "--seed-budget", "1000"]);
    assert_eq!(none.code, 3);
    assert_eq!(field(&none.summary, "kind"), "numeric");
    assert_eq!(go(&["--help"]).code, 0);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    let mut cfg = RunConfig::default();
    cfg.alpha = "0;2,[1]".into();
    cfg.terms = 8;
    fs::write(&path, cfg.canonical()).unwrap();
    let from_file = go(&["cf", "--config", path.to_str().unwrap()]);
    let from_flags = go(&["cf", "--alpha", "0;2,[1]", "--terms", "8"]);
    assert_eq!(from_file, from_flags);
    // flags override the file
    let overridden = go(&["cf", "--config", path.to_str().unwrap(), "--terms", "3"]);
    assert_eq!(field(&overridden.summary, "digits"), "2,1,1");
    fs::write(&path, "terms = 8\nunknown_key = 1\n").unwrap();
    assert_eq!(go(&["cf", "--config", path.to_str().unwrap()]).code, 2);
}

#[test]
fn config_round_trip() {
    let mut cfg = RunConfig::default();
    cfg.command = "area".into();
    cfg.u = "-1.5+2i".into();
    cfg.tol = 3.5e-11;
    cfg.nx = 17;
    let back = RunConfig::parse(&cfg.canonical()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.canonical(), cfg.canonical());
}

#[test]
fn raster_output_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("julia.ppm");
    let out = go(&[
        "render-julia", "--family", "quadratic", "--alpha", "0;[1]", "--nx", "40", "--ny", "30", "--max-iter", "50",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.summary);
    let bytes = fs::read(&path).unwrap();
    let header = b"P6\n40 30\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 3 * 40 * 30);
    // only the artifact, no stray temporary files
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
