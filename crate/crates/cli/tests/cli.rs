use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gcmb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcmb")).args(args).output().expect("run gcmb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_tight_example() {
    let o = gcmb(&["solve", "--builtin", "tight-4", "--target", "0"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("status=feasible") && out.contains("base={3,4,5}"), "{out}");
    assert!(out.contains("certified=true"));

    let o = gcmb(&["solve", "--builtin", "tight-4", "--target", "0", "--mode", "proximity", "--k", "3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("base={3,4,5}") && out.contains("pair-bound=400"), "{out}");
    let calls: u64 = out
        .split_whitespace()
        .find_map(|w| w.strip_prefix("intersections="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(calls <= 400);
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "u24.mat", "matroid uniform\nn 4\nr 2\n");
    // every label is 1 in Z4, so base sums are always 2
    let l = write(dir.path(), "ones.lab", "0 1\n1 1\n2 1\n3 1\n");
    let o = gcmb(&["solve", "--matroid", &m, "--group", "Z4", "--labels", &l, "--target", "2"]);
    assert_eq!(code(&o), 0);
    let o = gcmb(&["solve", "--matroid", &m, "--group", "Z4", "--labels", &l, "--target", "1"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("status=infeasible"));

    assert_eq!(code(&gcmb(&["solve", "--matroid", "/nonexistent", "--group", "Z2", "--labels", &l, "--target", "0"])), 1);
    let bad = write(dir.path(), "bad.lab", "0 1\n1 x\n");
    let o = gcmb(&["solve", "--matroid", &m, "--group", "Z4", "--labels", &bad, "--target", "1"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
    assert_eq!(code(&gcmb(&["solve", "--bogus"])), 1);
    assert_eq!(code(&gcmb(&["--help"])), 0);
}

#[test]
fn uncertified_proximity_is_refused() {
    let o = gcmb(&["solve", "--builtin", "u2-4", "--group", "Z2xZ2xZ2", "--target", "0,0,0", "--mode", "proximity"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn weighted_solve() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w", "0 5\n1 5\n2 5\n3 1\n4 2\n5 1/2\n");
    let o = gcmb(&["solve", "--builtin", "tight-4", "--target", "1", "--weights", &w]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    // one element of the 1-block and two of the 0-block: 5 + 1 + 1/2
    assert!(out.contains("weight=13/2"), "{out}");
}

#[test]
fn verify_tight_example() {
    let o = gcmb(&["verify", "--builtin", "tight-4", "--k", "2"]);
    assert_eq!(code(&o), 2);
    let out = stdout(&o);
    assert!(out.contains("distance=3") && out.contains("reduced"), "{out}");
    let blocks: Vec<&str> = out.lines().filter(|l| l.starts_with("witness")).collect();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0], blocks[1]);

    let o = gcmb(&["verify", "--builtin", "tight-4", "--k", "3"]);
    assert_eq!(code(&o), 0);

    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero", "0 0\n1 0\n2 0\n3 0\n4 0\n5 0\n");
    let strong = gcmb(&["verify", "--builtin", "tight-4", "--k", "2", "--weights", &zero]);
    assert_eq!(code(&strong), 2);
    let plain = stdout(&gcmb(&["verify", "--builtin", "tight-4", "--k", "2"]));
    let witness = |s: &str| s.lines().skip_while(|l| !l.starts_with("witness")).take(4).collect::<Vec<_>>().join("\n");
    assert_eq!(witness(&plain), witness(&stdout(&strong)));
}

#[test]
fn scan_k4() {
    let o = gcmb(&["scan", "--builtin", "k4", "--group", "Z3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("verdict=none") && out.contains("checked=729"), "{out}");
}

#[test]
fn sharded_scan_merges_to_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let full = stdout(&gcmb(&["scan", "--builtin", "k4", "--group", "Z2xZ2", "--predicate", "block"]));
    for (range, name) in [("0..1000", "a"), ("1000..4096", "b"), ("500..1500", "c")] {
        let o = gcmb(&["--out", &format!("{d}/{name}"), "scan", "--builtin", "k4", "--group", "Z2xZ2", "--predicate", "block", "--range", range]);
        assert_eq!(code(&o), 0);
    }
    let merged = gcmb(&["merge", &format!("{d}/b"), &format!("{d}/a")]);
    assert_eq!(code(&merged), 0);
    assert_eq!(stdout(&merged), full);

    let overlap = gcmb(&["merge", &format!("{d}/a"), &format!("{d}/c")]);
    assert_eq!(code(&overlap), 1);

    assert_eq!(code(&gcmb(&["scan", "--builtin", "k4", "--group", "Z2xZ2", "--range", "0..5000"])), 1);
}

#[test]
fn output_is_independent_of_jobs() {
    let runs = [
        vec!["scan", "--builtin", "k4", "--group", "Z4"],
        vec!["check-ss", "--builtin", "fano", "--group", "Z6", "--random", "50", "--seed", "3"],
        vec!["solve", "--builtin", "tight-5", "--target", "0", "--mode", "proximity"],
        vec!["verify", "--builtin", "padded-tight", "--k", "1"],
    ];
    for args in runs {
        let one: Vec<&str> = ["--jobs", "1"].into_iter().chain(args.iter().copied()).collect();
        let eight: Vec<&str> = ["--jobs", "8"].into_iter().chain(args.iter().copied()).collect();
        let (a, b) = (gcmb(&one), gcmb(&eight));
        assert_eq!(code(&a), code(&b), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn check_ss() {
    let o = gcmb(&["check-ss", "--builtin", "k4", "--group", "Z3", "--random", "20"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("violations=0"));
    let o = gcmb(&["check-ss", "--builtin", "u3-6", "--group", "Z6", "--random", "20"]);
    assert_eq!(code(&o), 0);

    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "c", "0 2\n1 2\n2 2\n3 2\n4 2\n5 2\n");
    let o = gcmb(&["check-ss", "--builtin", "k4", "--group", "Z3", "--labels", &l]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("image=1") && stdout(&o).contains("bound=1"));
}

#[test]
fn bases_listing() {
    let o = gcmb(&["bases", "--builtin", "k4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('{')).count(), 16);
}

#[test]
fn catalog_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // U(1,2), and a rank-1 matroid whose second element is a loop
    let revlex = write(dir.path(), "r1n2.revlex", "2 1\n**\n*0\n");
    let o = gcmb(&["--out", &format!("{d}/cat"), "catalog", "import", &revlex, "--prefix", "t"]);
    assert_eq!(code(&o), 0);
    let cat = fs::read_to_string(format!("{d}/cat")).unwrap();
    assert_eq!(cat.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["t000 2 1 0;1", "t001 2 1 0"]);

    let o = gcmb(&["catalog", "filter-blocks", &format!("{d}/cat")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["t000 2 1 0;1"]);

    // U(1,2) over Z2: labels 0/1 and 1/0 give the two bases distinct sums
    let o = gcmb(&["scan", "--catalog", &format!("{d}/cat"), "--group", "Z2"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("matroids=1 isolating-matroids=1 isolating-labelings=2"), "{}", stdout(&o));

    let broken = write(dir.path(), "broken", "ok 2 1 0;1\nbad 4 2 0,1;2,3\n");
    assert_eq!(code(&gcmb(&["catalog", "filter-blocks", &broken])), 1);
    assert_eq!(code(&gcmb(&["catalog", "filter-blocks", &broken, "--lenient"])), 0);
}
