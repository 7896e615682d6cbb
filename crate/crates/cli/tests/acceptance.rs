//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Stdio};
use std::time::Instant;

use affrank::classify::{equiv_decide, reduce_to_canonical, EquivOptions};
use affrank::oracle::{
    affine_count, verify_bound, verify_classification, verify_facts, verify_maximality, verify_nonisotropy,
    DEFAULT_ORACLE_BUDGET,
};
use affrank::space::{construct_canonical, embed_inp};
use affrank::{AffineSubspace, CanonicalFamilySpec, FieldSpec, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = DEFAULT_ORACLE_BUDGET;
const SEARCH: u64 = 10_000_000;

fn gf(p: u32) -> FieldSpec {
    FieldSpec::new(p).unwrap()
}

fn core(parts: &[usize], f: FieldSpec) -> AffineSubspace {
    construct_canonical(&CanonicalFamilySpec::from_parts(parts, None, f, SEARCH).unwrap(), SEARCH).unwrap()
}

fn shuffled(v: &AffineSubspace, rng: &mut ChaCha8Rng) -> AffineSubspace {
    let p = Matrix::random_invertible(v.field(), v.rows(), rng);
    let q = Matrix::random_invertible(v.field(), v.cols(), rng);
    v.transform(&p, &q).unwrap()
}

fn bound() -> String {
    let mut notes = Vec::new();
    for (n, p) in [(2, 2), (3, 2), (2, 3)] {
        let rep = verify_bound(n, p, 2, gf(3), BUDGET).expect("bound census");
        assert_eq!(rep.total, rep.expected_total);
        assert_eq!(rep.extremal, 0, "{n}x{p}: subspace of codim 2 with lrk >= 2");
        notes.push(format!("{n}x{p}: {} of dim {} scanned", rep.total, rep.dim));
    }
    notes.join("; ")
}

fn classification() -> String {
    let rep = verify_classification(3, 2, 2, gf(3), BUDGET).expect("classification census");
    assert_eq!(rep.total, 914_760);
    assert_eq!(Some(rep.total as u128), affine_count(6, 3, 3));
    assert_eq!(rep.orbit_count, 2);
    let labels: Vec<&str> = rep.orbits.iter().map(|o| o.label.as_str()).collect();
    assert_eq!(labels, ["(1,1)", "(2)"]);
    assert_eq!(rep.extremal, rep.orbits.iter().map(|o| o.hits).sum::<u64>());
    for o in &rep.orbits {
        assert_eq!(rep.group_order % o.size as u128, 0);
    }
    format!(
        "{} scanned, {} with lrk 2, orbits {}",
        rep.total,
        rep.extremal,
        rep.orbits.iter().map(|o| format!("{}={}", o.label, o.size)).collect::<Vec<_>>().join(" ")
    )
}

fn maximality() -> String {
    let f = gf(3);
    let rep = verify_maximality(2, f, BUDGET).expect("maximality census");
    assert_eq!(rep.classification.total, 1080);
    assert_eq!(rep.classification.orbit_count, 2);
    let reps: Vec<&AffineSubspace> = rep.classification.orbits.iter().map(|o| &o.representative).collect();
    assert_eq!(reps, [&core(&[1, 1], f), &core(&[2], f)]);
    assert_eq!(rep.bound.total, 1170);
    assert_eq!(rep.bound.extremal, 0, "an all-invertible affine plane exists");
    format!("{} invertible lines in 2 orbits; 0 of 1170 planes invertible", rep.classification.extremal)
}

fn uniqueness() -> String {
    let f = gf(3);
    let (a, b) = (core(&[1, 1], f), core(&[2], f));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checks = 0;
    for (n, p) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let (s, t) = (embed_inp(&a, n, p).unwrap(), embed_inp(&b, n, p).unwrap());
        let opts = EquivOptions::exhaustive(SEARCH);
        assert!(equiv_decide(&s, &t, opts).unwrap().is_none(), "{n}x{p}: distinct cores equivalent");
        for v in [&s, &t] {
            for _ in 0..20 {
                let moved = shuffled(v, &mut rng);
                let (pm, qm) = equiv_decide(v, &moved, opts).unwrap().expect("transform not recognised");
                assert_eq!(v.transform(&pm, &qm).unwrap(), moved);
                checks += 1;
            }
        }
    }
    format!("4 shapes non-equivalent; {checks} transforms matched")
}

fn facts() -> String {
    let rep = verify_facts(3, gf(3), 100, 5, BUDGET).expect("facts");
    for c in rep.even_rank.iter().chain(&rep.conjugation).chain(&rep.orthogonal) {
        assert!(c.holds);
    }
    assert_eq!(rep.even_rank.iter().map(|c| c.checked).sum::<u64>(), 1 + 3 + 27);
    assert_eq!(rep.orthogonal.iter().map(|c| c.checked).sum::<u64>(), 2 + 8 + 26);
    "even rank, conjugation (100 samples per n), X-perp all hold for n <= 3".into()
}

fn nonisotropy() -> String {
    let rep = verify_nonisotropy(3, gf(3), BUDGET).expect("nonisotropy");
    let classes: Vec<usize> = rep.levels.iter().map(|l| l.classes).collect();
    assert_eq!(classes, [1, 1, 0]);
    assert_eq!(rep.levels[2].group_order, 11232);
    assert_eq!(rep.levels[2].nonisotropic, 0);
    format!("classes per dimension {classes:?}; {} evaluations at n=3", rep.levels[2].evaluations)
}

fn round_trip() -> String {
    let mut count = 0;
    for p in [3, 5] {
        let f = gf(p);
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        for parts in [vec![1, 1], vec![2]] {
            let w = core(&parts, f);
            for (n, c) in [(3, 2), (2, 2)] {
                let base = embed_inp(&w, n, c).unwrap();
                for _ in 0..100 {
                    let v = shuffled(&base, &mut rng);
                    let wit = reduce_to_canonical(&v, 2, SEARCH).expect("reduction");
                    assert!(wit.verify(&v).unwrap());
                    assert_eq!(wit.signature.parts(), &parts[..], "GF({p}) {n}x{c}");
                    count += 1;
                }
            }
        }
    }
    format!("{count} shuffles reduced with exact set equality")
}

fn cli(args: &[&str], stdin: Option<&str>) -> Vec<u8> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_affrank"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn affrank");
    {
        use std::io::Write;
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success(), "affrank {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> String {
    let space = String::from_utf8(cli(&["construct", "canonical", "--parts", "2"], None)).unwrap();
    let embedded = String::from_utf8(cli(&["construct", "embed", "--n", "3", "--p", "2"], Some(&space))).unwrap();
    let shuffled = String::from_utf8(cli(&["shuffle", "--seed", "17"], Some(&embedded))).unwrap();
    let pair = format!("[{},{}]", embedded.trim(), shuffled.trim());
    let runs: Vec<(Vec<&str>, Option<&str>)> = vec![
        (vec!["shuffle", "--seed", "17"], Some(&embedded)),
        (vec!["verify", "classification", "--n", "3", "--p", "2", "--r", "2"], None),
        (vec!["verify", "facts", "--n", "3", "--seed", "17"], None),
        (vec!["verify", "maximality", "--r", "2"], None),
        (vec!["classify", "--r", "2"], Some(&shuffled)),
        (vec!["equiv"], Some(&pair)),
    ];
    for (args, input) in &runs {
        let mut outputs = Vec::new();
        for jobs in ["1", "2", "8", "1"] {
            let mut full = vec!["--jobs", jobs];
            full.extend(args.iter().copied());
            outputs.push(cli(&full, *input));
        }
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "output of {args:?} depends on --jobs");
        assert!(!outputs[0].is_empty());
    }
    format!("{} commands byte-identical across --jobs 1, 2, 8 and a repeat", runs.len())
}

fn main() {
    type Check = fn() -> String;
    let criteria: [(&str, Check); 8] = [
        ("bound", bound),
        ("classification completeness", classification),
        ("maximal-space classification", maximality),
        ("uniqueness", uniqueness),
        ("structural facts", facts),
        ("non-isotropy landscape", nonisotropy),
        ("classifier round trip", round_trip),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
