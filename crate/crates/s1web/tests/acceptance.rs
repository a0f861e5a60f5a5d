//! Acceptance suite. One line per criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use s1web::config::{Param, SampleCounts, SuiteConfig, Tolerances};
use s1web::suite::*;
use s1web::{CheckRecord, VerificationReport};
use s1web_core::curve::Curve;
use s1web_core::moebius::{gamma_orbit, SpherePoint};
use s1web_core::web::{certify_point, sample_web_points, Exclusion, Region};
use s1web_core::c64;

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Self { ok: true, detail: String::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.ok = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn record(&mut self, c: &CheckRecord) {
        let what = match c.max_residual {
            Some(r) => format!("{} failed (max residual {r:.3e}, tol {:.1e}): {:?}", c.label(), c.tolerance, c.witnesses.first()),
            None => format!("{} failed: {:?}", c.label(), c.witnesses.first()),
        };
        self.require(c.passed(), what);
    }

    fn within(&mut self, elapsed: Duration, limit: f64) {
        self.require(elapsed.as_secs_f64() < limit, format!("took {:.1} s, limit {limit} s", elapsed.as_secs_f64()));
    }
}

fn params() -> Vec<Param> {
    SuiteConfig::default().parameters()
}

fn rng(k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + k)
}

fn identities() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    o.record(&check_identities());
    o.within(start.elapsed(), 10.0);
    o
}

fn group_law() -> Outcome {
    let mut o = Outcome::new();
    let tol = Tolerances::default();
    for (k, t) in params().into_iter().enumerate() {
        let c = check_group_numeric(t, 100, tol.group, &mut rng(k as u64));
        o.require(c.samples >= 100, format!("{}: {} triples", c.label(), c.samples));
        o.require(tol.group <= 1e-9, "group tolerance looser than 1e-9");
        o.record(&c);
    }
    let chain = check_worked_chain();
    for c in &chain.checks {
        o.record(c);
    }
    o.require(chain.notes.iter().any(|n| n.starts_with("doubling")), "doubling discrepancy note missing");
    o.record(&check_group_exact());
    let report = small_report(0);
    o.require(report.notes.iter().any(|n| n.starts_with("doubling")), "report lacks the doubling note");
    o
}

fn delta_leaf() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    for (k, t) in params().into_iter().enumerate() {
        let c = check_delta_leaf(t, 100, 1e-8, &mut rng(10 + k as u64));
        o.require(c.samples >= 100, format!("{}: {} samples", c.label(), c.samples));
        o.record(&c);
    }
    o.within(start.elapsed(), 5.0);
    o
}

fn harmonic() -> Outcome {
    let mut o = Outcome::new();
    for (k, t) in params().into_iter().enumerate() {
        for c in check_harmonic(t, 500, &Region::default(), 1e-10, 1e-9, &mut rng(20 + k as u64)) {
            o.require(c.samples >= 500, format!("{}: {} samples", c.label(), c.samples));
            o.record(&c);
        }
    }
    o
}

fn solver() -> Outcome {
    let mut o = Outcome::new();
    for (k, t) in params().into_iter().enumerate() {
        let c = check_solver(t, 500, &Region::default(), 1e-9, &mut rng(30 + k as u64));
        o.require(c.samples >= 500, format!("{}: {} samples", c.label(), c.samples));
        o.record(&c);
    }
    let exact = check_solver_exact();
    o.require(exact.samples >= 10, "too few exact solver samples");
    o.record(&exact);
    o
}

fn monodromy() -> Outcome {
    let mut o = Outcome::new();
    for t in params() {
        let start = Instant::now();
        let records = check_monodromy(t, 1e-6, 1e-8);
        o.require(records.len() == 3, "expected classification, commutation and drift records");
        for c in &records {
            o.record(c);
        }
        o.within(start.elapsed(), 60.0);
    }
    o
}

fn parallelizability() -> Outcome {
    let mut o = Outcome::new();
    let t: Param = "2".parse().unwrap();
    let start = Instant::now();
    let c = check_parallelizability(t, 50, &Region::default(), false, &mut rng(40));
    o.within(start.elapsed(), 120.0);
    o.require(c.samples >= 50, format!("{} points", c.samples));
    o.record(&c);

    let control = check_parallelizability(t, 50, &Region::default(), true, &mut rng(41));
    o.require(!control.passed(), "control web passed");

    let e = Curve::new(t.0).unwrap();
    let (pts, _) = sample_web_points(&e, &Region::default(), &Exclusion::default(), 50, &mut rng(42));
    let mut both = 0;
    for p in &pts {
        if let Ok(cert) = certify_point(&e, *p, true) {
            let curved = cert.curvatures.iter().any(|k| !k.is_zero());
            let open = cert.hexagons.iter().any(|(_, h)| !h.is_hexagonal());
            if curved && open {
                both += 1;
            }
        }
    }
    o.require(10 * both >= 9 * pts.len(), format!("control web failed both tests at only {both} of {} points", pts.len()));
    o
}

fn pullback() -> Outcome {
    let mut o = Outcome::new();
    for (k, t) in params().into_iter().enumerate() {
        let records = check_pullback(t, 100, 1e-8, 1e-6, &mut rng(50 + k as u64));
        for c in records.iter().filter(|c| c.mandatory) {
            o.record(c);
        }
        let fi = records.iter().find(|c| c.name == "pullback_first_integral");
        o.require(fi.is_some_and(|c| c.samples >= 100), "first-integral pullback missing or undersampled");
        o.require(fi.is_some_and(|c| c.notes.iter().any(|n| n.contains("z3 := z2"))), "fiber-map reading not documented");
        o.require(records.iter().any(|c| c.name == "pullback_double_star"), "double-star record missing");
    }
    o
}

fn orbits() -> Outcome {
    let mut o = Outcome::new();
    o.record(&check_orbits(100, &mut rng(60)));
    let finite = |re: f64, im: f64| SpherePoint::Finite(c64(re, im));
    for (p, size) in [
        (finite(1.0, 0.0), 2),
        (finite(-1.0, 0.0), 2),
        (finite(0.0, 1.0), 2),
        (finite(0.0, -1.0), 2),
        (finite(0.0, 0.0), 2),
        (SpherePoint::Infinity, 2),
        (finite(0.3, 0.7), 4),
        (finite(2.0, 0.0), 4),
    ] {
        o.require(gamma_orbit(p).len() == size, format!("orbit of {p:?} has {} points", gamma_orbit(p).len()));
    }
    o
}

fn small_config(seed: u64) -> SuiteConfig {
    let mut c = SuiteConfig::default();
    c.seed = seed;
    c.samples = SampleCounts::default().uniform(20);
    c.samples.curvature_points = 3;
    c.samples.sweep_curvature_points = 2;
    c
}

fn small_report(seed: u64) -> VerificationReport {
    run_suite(&small_config(seed))
}

fn determinism() -> Outcome {
    let mut o = Outcome::new();
    let mut config = SuiteConfig::default();
    config.seed = 7;
    config.samples = SampleCounts::default().uniform(200);
    let a = run_suite(&config);
    let b = run_suite(&config);
    let (ja, jb) = (a.canonical_json().expect("serializes"), b.canonical_json().expect("serializes"));
    o.require(ja == jb, "reports differ");
    o.require(a.passed(), format!("seed-7 run failed: {:?}", a.summary.mandatory_failures));
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact identities", identities),
        ("group law", group_law),
        ("discriminant leaf", delta_leaf),
        ("harmonic and cross-ratio", harmonic),
        ("section solver", solver),
        ("monodromy", monodromy),
        ("parallelizability", parallelizability),
        ("pullback", pullback),
        ("orbit structure", orbits),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        if o.ok {
            println!("PASS [{}] {name} ({secs:.1} s)", i + 1);
        } else {
            failed += 1;
            println!("FAIL [{}] {name} ({secs:.1} s): {}", i + 1, o.detail);
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
