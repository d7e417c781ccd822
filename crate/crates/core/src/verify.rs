//! Exhaustive protocol checks against the tableau engine.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::hofmann_bound;
use crate::error::Result;
use crate::protocols::{
    append_rough_row, append_smooth_column, expected_membership, logical_value, one_shot_decode,
    one_shot_encode, remove_rough_row, remove_smooth_column, teleport_encode, CodeState,
    CorrectionMode, ExecutionRecord,
};
use crate::tableau::BasisState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Largest lattice side checked.
    pub max_size: usize,
    pub seeds: u64,
    /// Invert every measurement outcome (negative control).
    pub sign_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_size: 4,
            seeds: 100,
            sign_fault: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: std::result::Result<(), String>) {
        self.cases += 1;
        if let Err(e) = ok {
            self.failures += 1;
            self.first_failure.get_or_insert(e);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

fn fresh(capacity: (usize, usize), size: (usize, usize), mode: CorrectionMode, opts: &VerifyOptions) -> CodeState {
    let s = CodeState::new(capacity, size, mode).expect("size fits capacity");
    if opts.sign_fault {
        s.with_sign_fault()
    } else {
        s
    }
}

fn expect_logical(s: &CodeState, input: BasisState, what: &str) -> std::result::Result<(), String> {
    if !s.in_code() {
        return Err(format!("{what}: left the code space"));
    }
    let got = logical_value(s, input);
    if got != expected_membership(input) {
        return Err(format!("{what}: logical {got:?} for input {input:?}"));
    }
    Ok(())
}

fn lift(r: Result<ExecutionRecord>, what: &str) -> std::result::Result<(), String> {
    r.map(|_| ()).map_err(|e| format!("{what}: {e}"))
}

/// Encode then decode on every N×M ≤ max_size, every input, every seed.
pub fn check_encode_decode(opts: &VerifyOptions) -> CheckResult {
    let mut out = CheckResult::new("encode-decode");
    for n in 1..=opts.max_size {
        for m in 1..=opts.max_size {
            for input in BasisState::ALL {
                for seed in 0..opts.seeds {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut s = fresh((n, m), (n, m), CorrectionMode::Frame, opts);
                    let tag = format!("{n}x{m} {input:?} seed {seed}");
                    out.record((|| {
                        lift(one_shot_encode(&mut s, input, &mut rng), &tag)?;
                        expect_logical(&s, input, &tag)?;
                        let d = one_shot_decode(&mut s, &mut rng).map_err(|e| format!("{tag}: {e}"))?;
                        if !d.is(input) {
                            return Err(format!("{tag}: decoded {d:?}"));
                        }
                        Ok(())
                    })());
                }
            }
        }
    }
    out
}

type Step = fn(&mut CodeState, &mut dyn rand::RngCore) -> Result<ExecutionRecord>;

/// `grows` is the (rows, cols) step of the grow operation.
fn round_trip(
    name: &str,
    first: Step,
    second: Step,
    grows: (usize, usize),
    shrink_first: bool,
    opts: &VerifyOptions,
) -> CheckResult {
    let mut out = CheckResult::new(name);
    for n in 1..=opts.max_size {
        for m in 1..=opts.max_size {
            if shrink_first && (n <= grows.0 || m <= grows.1) {
                continue;
            }
            let cap = (n + grows.0, m + grows.1);
            for input in BasisState::ALL {
                for seed in 0..opts.seeds {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut s = fresh(cap, (n, m), CorrectionMode::Frame, opts);
                    let tag = format!("{n}x{m} {input:?} seed {seed}");
                    out.record((|| {
                        lift(one_shot_encode(&mut s, input, &mut rng), &tag)?;
                        lift(first(&mut s, &mut rng), &tag)?;
                        expect_logical(&s, input, &format!("{tag} (midway)"))?;
                        lift(second(&mut s, &mut rng), &tag)?;
                        if s.geometry().rows() != n || s.geometry().cols() != m {
                            return Err(format!("{tag}: size changed"));
                        }
                        expect_logical(&s, input, &tag)
                    })());
                }
            }
        }
    }
    out
}

pub fn check_round_trips(opts: &VerifyOptions) -> Vec<CheckResult> {
    vec![
        round_trip("append-remove-smooth-column", append_smooth_column, remove_smooth_column, (0, 1), false, opts),
        round_trip("remove-append-smooth-column", remove_smooth_column, append_smooth_column, (0, 1), true, opts),
        round_trip("append-remove-rough-row", append_rough_row, remove_rough_row, (1, 0), false, opts),
        round_trip("remove-append-rough-row", remove_rough_row, append_rough_row, (1, 0), true, opts),
    ]
}

/// The teleportation encoder leaves exactly the state the one-shot encoder
/// does, on every N×M with 2 ≤ N, M ≤ max_size.
pub fn check_teleport_equivalence(opts: &VerifyOptions) -> CheckResult {
    let mut out = CheckResult::new("teleport-equivalence");
    for n in 2..=opts.max_size {
        for m in 2..=opts.max_size {
            for input in BasisState::ALL {
                for seed in 0..opts.seeds {
                    let tag = format!("{n}x{m} {input:?} seed {seed}");
                    let mut a = fresh((n, m), (n, m), CorrectionMode::Physical, opts);
                    let mut b = fresh((n, m), (n, m), CorrectionMode::Physical, opts);
                    let mut rng_a = ChaCha8Rng::seed_from_u64(seed);
                    let mut rng_b = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                    out.record((|| {
                        lift(one_shot_encode(&mut a, input, &mut rng_a), &tag)?;
                        lift(teleport_encode(&mut b, input, &mut rng_b), &tag)?;
                        expect_logical(&b, input, &format!("{tag} (teleport)"))?;
                        if !a.tableau().same_state(b.tableau()) {
                            return Err(format!("{tag}: stabilizer groups differ"));
                        }
                        Ok(())
                    })());
                }
            }
        }
    }
    out
}

/// Transfer fidelity of each input basis pair measured through
/// encode/decode; all four exact gives an average-fidelity bound of 1.
pub fn check_average_fidelity(opts: &VerifyOptions) -> CheckResult {
    let mut out = CheckResult::new("average-fidelity-bound");
    for n in 1..=opts.max_size {
        for m in 1..=opts.max_size {
            let mut exact = [0usize; 4];
            let trials = opts.seeds.max(1) as usize;
            for (slot, input) in BasisState::ALL.into_iter().enumerate() {
                for seed in 0..trials as u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut s = fresh((n, m), (n, m), CorrectionMode::Frame, opts);
                    let ok = one_shot_encode(&mut s, input, &mut rng).is_ok()
                        && one_shot_decode(&mut s, &mut rng).is_ok_and(|d| d.is(input));
                    exact[slot] += ok as usize;
                }
            }
            let f = |i: usize| exact[i] as f64 / trials as f64;
            let fz = (f(0) + f(1)) / 2.0;
            let fx = (f(2) + f(3)) / 2.0;
            let bound = hofmann_bound(fx, fz).expect("fidelities in [0,1]");
            out.record(if bound == 1.0 {
                Ok(())
            } else {
                Err(format!("{n}x{m}: F_x={fx} F_z={fz} bound {bound}"))
            });
        }
    }
    out
}

pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    let mut checks = vec![check_encode_decode(opts)];
    checks.extend(check_round_trips(opts));
    checks.push(check_teleport_equivalence(opts));
    checks.push(check_average_fidelity(opts));
    VerifyReport { checks }
}
