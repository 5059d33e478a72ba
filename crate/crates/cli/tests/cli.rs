use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use skelss_cli::run_with;
use tempfile::TempDir;

const BAR: &str = "P1\n7 3\n0000000\n0111110\n0000000\n";
const BLOCK: &str = "P1\n5 5\n00000\n01110\n01110\n01110\n00000\n";
const PLUS: &str = "P1\n9 9\n000000000\n000010000\n000010000\n000010000\n011111110\n000010000\n000010000\n000010000\n000000000\n";
const THICK: &str = "P1\n12 9\n000000000000\n011111111100\n011111111100\n011111111100\n000111100000\n000111111000\n000111111000\n000000000000\n000000000000\n";

struct Output {
    code: u8,
    stdout: String,
    stderr: String,
}

fn skelss(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["skelss"];
    full.extend_from_slice(args);
    let code = run_with(full, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn shape(dir: &Path, name: &str, pbm: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, pbm).unwrap();
    path.to_str().unwrap().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            for (k, v) in tree(&path) {
                out.insert(Path::new(path.file_name().unwrap()).join(k), v);
            }
        } else {
            out.insert(PathBuf::from(path.file_name().unwrap()), fs::read(&path).unwrap());
        }
    }
    out
}

fn read_pgm(path: &Path) -> (usize, usize, Vec<u8>) {
    let bytes = fs::read(path).unwrap();
    let text = String::from_utf8_lossy(&bytes[..20]).to_string();
    let mut parts = text.split_whitespace();
    assert_eq!(parts.next(), Some("P5"));
    let w: usize = parts.next().unwrap().parse().unwrap();
    let h: usize = parts.next().unwrap().parse().unwrap();
    (w, h, bytes[bytes.len() - w * h..].to_vec())
}

#[test]
fn skeletonize_single_pixel_and_block() {
    let tmp = TempDir::new().unwrap();
    let dot = shape(tmp.path(), "dot.pbm", "P1\n3 3\n000\n010\n000\n");
    let o = skelss(&["skeletonize", "--input", &dot, "--backend", "exact"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "SKEL2 3 3 1\n1 1 1\ncount=1 backend=exact deficit=0\n");

    let block = shape(tmp.path(), "block.pbm", BLOCK);
    let out = tmp.path().join("sk");
    let o = skelss(&["skeletonize", "--input", &block, "--backend", "exact", "--out", p(&out)]);
    assert_eq!(o.stdout, "count=1 backend=exact deficit=0\n");
    assert_eq!(fs::read_to_string(out.join("skeleton.skel")).unwrap(), "SKEL2 5 5 1\n2 2 4\n");
}

#[test]
fn skeletonize_reports_thinned_deficit() {
    let tmp = TempDir::new().unwrap();
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    let exact = skelss(&["skeletonize", "--input", &thick, "--backend", "exact"]);
    let thinned = skelss(&["skeletonize", "--input", &thick]);
    assert!(exact.stdout.ends_with("deficit=0\n"));
    let last = thinned.stdout.lines().last().unwrap();
    assert!(last.contains("backend=thinned deficit="), "{last}");
}

#[test]
fn full_frame_is_a_contract_violation() {
    let tmp = TempDir::new().unwrap();
    let full = shape(tmp.path(), "full.pbm", "P1\n2 2\n11\n11\n");
    let o = skelss(&["skeletonize", "--input", &full]);
    assert_eq!(o.code, 4);
    assert!(o.stderr.contains("full.pbm"));
}

#[test]
fn usage_and_io_exit_codes() {
    assert_eq!(skelss(&["frobnicate"]).code, 1);
    assert_eq!(skelss(&["evolve", "--input", "x.pbm"]).code, 1);
    assert_eq!(skelss(&["evolve", "--input", "missing.pbm", "--out", "never"]).code, 2);
    let tmp = TempDir::new().unwrap();
    let bad = shape(tmp.path(), "bad.pbm", "P7\n");
    assert_eq!(skelss(&["skeletonize", "--input", &bad]).code, 2);
    let help = skelss(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("evolve"));
}

#[test]
fn bar_compression_writes_six_frames() {
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let run = tmp.path().join("run");
    let o = skelss(&["evolve", "--input", &bar, "--backend", "exact", "--path", "compression", "--out", p(&run)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let csv = fs::read_to_string(run.join("metrics.csv")).unwrap();
    let areas: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(areas, ["5", "4", "3", "2", "1", "0"]);
    for s in 0..6 {
        assert!(run.join(format!("frame_0000{s}.skel")).exists());
    }
    assert_eq!(fs::read_to_string(run.join("path.txt")).unwrap(), "1: 1 1\n2: 2 1\n3: 3 1\n4: 4 1\n5: 5 1\n");
}

#[test]
fn bar_pruning_takes_one_step() {
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let run = tmp.path().join("run");
    assert_eq!(skelss(&["evolve", "--input", &bar, "--path", "prune", "--out", p(&run)]).code, 0);
    assert_eq!(fs::read_to_string(run.join("metrics.csv")).unwrap().lines().count(), 3);
}

#[test]
fn identical_configs_give_identical_trees() {
    let tmp = TempDir::new().unwrap();
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, format!("input={thick}\npath=random\nseed=9\nr=2\nstride=2\ncheckpoints=4,1\n")).unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(skelss(&["evolve", "--config", p(&cfg), "--out", p(&a)]).code, 0);
    assert_eq!(skelss(&["evolve", "--config", p(&cfg), "--out", p(&b)]).code, 0);
    assert_eq!(tree(&a), tree(&b));
    // The echoed config alone reproduces the run.
    let c = tmp.path().join("c");
    assert_eq!(skelss(&["evolve", "--config", p(&a.join("config.txt")), "--out", p(&c)]).code, 0);
    assert_eq!(tree(&a), tree(&c));
    // Writing into a non-empty directory is refused.
    assert_eq!(skelss(&["evolve", "--config", p(&cfg), "--out", p(&a)]).code, 1);
}

#[test]
fn verify_passes_fresh_runs_with_any_stride() {
    let tmp = TempDir::new().unwrap();
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    for (path, stride, backend) in [("compression", "1", "exact"), ("random", "3", "thinned"), ("prune", "2", "thinned")] {
        let run = tmp.path().join(format!("{path}-{backend}"));
        let args = ["evolve", "--input", &thick, "--path", path, "--backend", backend, "--stride", stride, "--out", p(&run)];
        assert_eq!(skelss(&args).code, 0);
        let o = skelss(&["verify", p(&run)]);
        assert_eq!(o.code, 0, "{path}:\n{}{}", o.stdout, o.stderr);
        assert!(o.stdout.ends_with("all applicable properties pass\n"));
    }
}

#[test]
fn pruning_run_passes_homotopy_and_complexity() {
    let tmp = TempDir::new().unwrap();
    let plus = shape(tmp.path(), "plus.pbm", PLUS);
    let run = tmp.path().join("prune");
    assert_eq!(skelss(&["evolve", "--input", &plus, "--path", "prune", "--out", p(&run)]).code, 0);
    let o = skelss(&["verify", p(&run), "--key-value"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("homotopy=pass\n"));
    assert!(o.stdout.contains("complexity_lyapunov=pass\n"));
    assert!(o.stdout.contains("minimality_lyapunov=n/a\n"));
    assert!(o.stdout.ends_with("all_passed=true\n"));
}

#[test]
fn tampered_frame_fails_verification() {
    let tmp = TempDir::new().unwrap();
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    let run = tmp.path().join("run");
    assert_eq!(skelss(&["evolve", "--input", &thick, "--backend", "exact", "--out", p(&run)]).code, 0);
    let frame = run.join("frame_00002.pbm");
    let text = fs::read_to_string(&frame).unwrap();
    // Set the last pixel of the first row, which is background in every frame.
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2].replace_range(11..12, "1");
    fs::write(&frame, lines.join("\n") + "\n").unwrap();
    let o = skelss(&["verify", p(&run)]);
    assert_eq!(o.code, 3);
    assert!(o.stdout.contains("causality") && o.stdout.contains("FAIL"));
    assert!(o.stderr.contains("causality"));
}

#[test]
fn missing_artifacts_are_io_errors() {
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let run = tmp.path().join("run");
    assert_eq!(skelss(&["evolve", "--input", &bar, "--out", p(&run)]).code, 0);
    fs::remove_file(run.join("metrics.csv")).unwrap();
    assert_eq!(skelss(&["verify", p(&run)]).code, 2);
}

#[test]
fn compare_three_paths_and_self() {
    let tmp = TempDir::new().unwrap();
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    let mut runs = Vec::new();
    for path in ["random", "compression", "prune"] {
        let run = tmp.path().join(path);
        assert_eq!(skelss(&["evolve", "--input", &thick, "--path", path, "--out", p(&run)]).code, 0);
        runs.push(run);
    }
    let table = tmp.path().join("table.csv");
    let o = skelss(&[
        "compare", p(&runs[0]), p(&runs[1]), p(&runs[2]), "--checkpoints", "6,3,1", "--out", p(&table),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout.lines().count(), 1 + 9);
    assert_eq!(fs::read_to_string(&table).unwrap(), o.stdout);
    assert!(o.stdout.starts_with("label,checkpoint,scale,skel,err\nrandom,6,"));

    let o = skelss(&["compare", p(&runs[1]), p(&runs[1]), "--checkpoints", "5,2"]);
    let rows: Vec<Vec<&str>> = o.stdout.lines().skip(1).map(|l| l.split(',').skip(1).collect()).collect();
    assert_eq!(rows[..2], rows[2..]);
}

#[test]
fn compare_rejects_different_inputs() {
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let thick = shape(tmp.path(), "thick.pbm", THICK);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(skelss(&["evolve", "--input", &bar, "--out", p(&a)]).code, 0);
    assert_eq!(skelss(&["evolve", "--input", &thick, "--out", p(&b)]).code, 0);
    assert_eq!(skelss(&["compare", p(&a), p(&b), "--checkpoints", "1"]).code, 4);
    assert_eq!(skelss(&["compare", p(&a)]).code, 1);
}

#[test]
fn render_uses_the_fixed_palette() {
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let run = tmp.path().join("run");
    assert_eq!(skelss(&["evolve", "--input", &bar, "--backend", "exact", "--out", p(&run)]).code, 0);
    let out = tmp.path().join("pics");
    assert_eq!(skelss(&["render", p(&run), "--out", p(&out)]).code, 0);
    let (w, h, first) = read_pgm(&out.join("render_00000.pgm"));
    assert_eq!((w, h), (7, 3));
    let mut golden = vec![255u8; 21];
    golden[8..13].copy_from_slice(&[32, 64, 64, 64, 32]);
    assert_eq!(first, golden);
    let (_, _, last) = read_pgm(&out.join("render_00005.pgm"));
    assert!(last.iter().all(|&v| v == 255));
    let (_, _, mid) = read_pgm(&out.join("render_00002.pgm"));
    assert!(mid.iter().all(|v| [0, 32, 64, 192, 255].contains(v)));
    assert_eq!(skelss(&["render", p(&run)]).code, 0);
    assert!(run.join("render/render_00003.pgm").exists());
}

#[test]
fn binary_exit_status_matches() {
    let bin = env!("CARGO_BIN_EXE_skelss");
    let tmp = TempDir::new().unwrap();
    let bar = shape(tmp.path(), "bar.pbm", BAR);
    let ok = Command::new(bin).args(["skeletonize", "--input", &bar]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("SKEL2 7 3 5\n"));
    let usage = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(usage.status.code(), Some(1));
    let io = Command::new(bin).args(["verify", p(&tmp.path().join("nothing"))]).output().unwrap();
    assert_eq!(io.status.code(), Some(2));
}
