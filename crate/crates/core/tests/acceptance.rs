//! Acceptance criteria: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use larmour_core::selftest::{self, suite_rng, CheckResult, Sizes, DEFAULT_SEED};

struct Criterion {
    id: u8,
    title: &'static str,
    limit: Duration,
    run: fn() -> CheckResult,
}

const FULL: Sizes = Sizes::FULL;

fn rng(i: u64) -> rand_chacha::ChaCha8Rng {
    suite_rng(DEFAULT_SEED, i)
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        title: "case table reproduction",
        limit: Duration::from_secs(1),
        run: selftest::table_reproduction,
    },
    Criterion {
        id: 2,
        title: "symmetric uniformizers, odd s",
        limit: Duration::from_secs(1),
        run: || selftest::symmetric_uniformizers(&mut rng(2), FULL.uniformizer_runs),
    },
    Criterion {
        id: 3,
        title: "isometry witness soundness",
        limit: Duration::from_secs(10),
        run: || selftest::witness_soundness(&mut rng(3), FULL.witness_forms),
    },
    Criterion {
        id: 4,
        title: "hensel lifting round trips",
        limit: Duration::from_secs(5),
        run: || selftest::hensel_round_trips(&mut rng(4), FULL.hensel_trials),
    },
    Criterion {
        id: 5,
        title: "boundary is a homomorphism",
        limit: Duration::from_secs(20),
        run: || {
            selftest::boundary_homomorphism(
                &mut rng(5),
                FULL.homomorphism_pairs,
                FULL.negation_trials,
            )
        },
    },
    Criterion {
        id: 6,
        title: "boundary well-defined under conjugation",
        limit: Duration::from_secs(10),
        run: || selftest::well_definedness(&mut rng(6), FULL.conjugation_trials),
    },
    Criterion {
        id: 7,
        title: "s_eps = 2 forces empty ramified part",
        limit: Duration::from_secs(2),
        run: || selftest::unramified_only(&mut rng(7), FULL.s2_forms),
    },
    Criterion {
        id: 8,
        title: "springer residues",
        limit: Duration::from_secs(2),
        run: || selftest::springer_engine(&mut rng(8), FULL.springer_pairs),
    },
    Criterion {
        id: 9,
        title: "witt arithmetic oracles",
        limit: Duration::from_secs(5),
        run: selftest::witt_oracles,
    },
    Criterion {
        id: 10,
        title: "residue form shapes",
        limit: Duration::from_secs(1),
        run: || selftest::residue_shapes(&mut rng(10), FULL.shape_trials),
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let ok = result.passed() && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {} {} ({} trials, {:.3}s of {}s)",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            result.trials,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
        for note in &result.notes {
            println!("    note: {note}");
        }
        if !in_time {
            println!("    over time limit");
        }
        for f in result.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    println!(
        "{} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
