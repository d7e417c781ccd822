//! Pauli-frame Monte Carlo of encoding, noisy storage and readout.
//!
//! One flip sector is simulated at a time. The default, [`Sector::Z`],
//! tracks bit flips: the lower triangle starts with uniformly random bits
//! (it is prepared in |+⟩), plaquettes detect the flips, and the logical
//! value is read on the west column. [`Sector::X`] is the mirror image
//! (phase flips, stars, south row) and equals the bit sector of the
//! transposed lattice.
//!
//! Encoding mode decodes in two stages. The encoding round's defects on
//! checks that touch the randomized triangle are first removed by matching
//! inside that triangle only, which is what the encoder itself does and
//! keeps the black qubit untouched. Everything left over is then matched
//! over the whole space-time history.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{extract_defects, DecodingGraph, SyndromeHistory, TimeBoundary};
use crate::error::{Error, Result};
use crate::lattice::{line_support, CheckKind, LatticeGeometry, ReadoutPaths, Region, Sector, TriangleSplit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Encode the black qubit, store, read out with noise.
    Encode,
    /// Start from a perfect code state, store, decode perfectly.
    NoEncode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutDecoder {
    Line,
    Multiline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    pub p: f64,
    pub steps: usize,
    pub trials: u64,
    pub decoder: ReadoutDecoder,
    pub mode: Mode,
    pub syndrome_noise: bool,
    pub seed: u64,
    #[serde(default = "default_sector")]
    pub sector: Sector,
}

fn default_sector() -> Sector {
    Sector::Z
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rows: 7,
            cols: 8,
            p: 0.01,
            steps: 100,
            trials: 10_000,
            decoder: ReadoutDecoder::Line,
            mode: Mode::Encode,
            syndrome_noise: true,
            seed: 0,
            sector: Sector::Z,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyLattice {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p must lie in [0,1], got {}", self.p)));
        }
        if self.trials == 0 {
            return Err(Error::Domain("at least one trial is required".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunResult {
    pub successes: u64,
    pub trials: u64,
}

impl RunResult {
    pub fn p_hat(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    pub fn stderr(&self) -> f64 {
        let p = self.p_hat();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Flip bit per qubit in the simulated sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    pub flips: Vec<bool>,
}

impl PauliFrame {
    pub fn new(qubits: usize) -> Self {
        Self {
            flips: vec![false; qubits],
        }
    }

    pub fn apply(&mut self, correction: &[bool]) {
        for (f, &c) in self.flips.iter_mut().zip(correction) {
            *f ^= c;
        }
    }
}

/// Reusable per-worker state for one configuration.
pub struct TrialEngine {
    config: ExperimentConfig,
    geom: LatticeGeometry,
    kind: CheckKind,
    /// Qubits with uniformly random values after preparation.
    randomized: Vec<usize>,
    /// Qubits prepared in a definite value, subject to preparation noise.
    prepared: Vec<usize>,
    /// Checks decoded in the first stage.
    encoding_checks: Vec<bool>,
    /// Qubits whose final values are measured.
    readout: Vec<usize>,
    paths: ReadoutPaths,
    line: Vec<usize>,
    encoding_graph: Option<DecodingGraph>,
    storage_graph: DecodingGraph,
}

impl TrialEngine {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let geom = LatticeGeometry::new(config.rows, config.cols)?;
        let split = TriangleSplit::diagonal(&geom);
        let kind = config.sector.check_kind();
        let (random_region, readout_region) = match config.sector {
            Sector::Z => (Region::Lower, Region::Upper),
            Sector::X => (Region::Upper, Region::Lower),
        };
        let randomized = split.members(random_region);
        let prepared = split.members(readout_region);
        let readout = prepared.clone();
        let encoding_checks: Vec<bool> = geom
            .checks(kind)
            .iter()
            .map(|s| s.iter().any(|&q| split.region(q) == random_region))
            .collect();
        let mut mask = vec![false; geom.qubit_count()];
        for &q in &randomized {
            mask[q] = true;
        }
        let (layers, boundary, encoding_graph) = match config.mode {
            Mode::Encode => (
                config.steps + 1,
                TimeBoundary::Open,
                Some(DecodingGraph::new(&geom, kind, 1, TimeBoundary::Closed, Some(&mask))),
            ),
            Mode::NoEncode => (config.steps + 1, TimeBoundary::Closed, None),
        };
        let storage_graph = DecodingGraph::new(&geom, kind, layers, boundary, None);
        Ok(Self {
            config: config.clone(),
            paths: ReadoutPaths::new(&geom, &split, config.sector),
            line: line_support(&geom, config.sector),
            geom,
            kind,
            randomized,
            prepared,
            encoding_checks,
            readout,
            encoding_graph,
            storage_graph,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    fn noisy_syndrome<R: Rng + ?Sized>(&self, frame: &PauliFrame, rng: &mut R, noisy: bool) -> Vec<bool> {
        let mut s = self.geom.syndrome(&frame.flips, self.kind);
        if noisy && self.config.syndrome_noise {
            for b in &mut s {
                *b ^= rng.random_bool(self.config.p);
            }
        }
        s
    }

    fn storage_noise<R: Rng + ?Sized>(&self, frame: &mut PauliFrame, rng: &mut R) {
        for f in &mut frame.flips {
            *f ^= rng.random_bool(self.config.p);
        }
    }

    /// One trial; true when the stored bit is recovered.
    pub fn run_trial<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<bool> {
        let p = self.config.p;
        let k = self.config.steps;
        let checks = self.geom.check_count(self.kind);
        let mut frame = PauliFrame::new(self.geom.qubit_count());
        let mut history = SyndromeHistory::new(checks);
        let read_noise;
        match self.config.mode {
            Mode::Encode => {
                for &q in &self.randomized {
                    frame.flips[q] = rng.random_bool(0.5);
                }
                for &q in &self.prepared {
                    frame.flips[q] = rng.random_bool(p);
                }
                let s0 = self.noisy_syndrome(&frame, rng, true);
                let first: Vec<_> = (0..checks)
                    .filter(|&c| s0[c] && self.encoding_checks[c])
                    .map(|check| crate::decoder::Defect { round: 0, check })
                    .collect();
                let c1 = self
                    .encoding_graph
                    .as_mut()
                    .expect("encode mode has a first-stage graph")
                    .decode(&first)?;
                frame.apply(&c1);
                // The corrected frame already shows the stage-one flips in
                // later rounds; only the encoding round is re-read.
                let shift = self.geom.syndrome(&c1, self.kind);
                history.push(s0.iter().zip(&shift).map(|(a, b)| a ^ b).collect());
                for _ in 0..k {
                    self.storage_noise(&mut frame, rng);
                    history.push(self.noisy_syndrome(&frame, rng, true));
                }
                read_noise = p;
            }
            Mode::NoEncode => {
                for _ in 0..k {
                    self.storage_noise(&mut frame, rng);
                    let s = self.noisy_syndrome(&frame, rng, true);
                    history.push(s);
                }
                history.push(self.geom.syndrome(&frame.flips, self.kind));
                read_noise = 0.0;
            }
        }
        let defects = extract_defects(&history);
        let c2 = self.storage_graph.decode(&defects)?;
        frame.apply(&c2);
        let mut bits = frame.flips.clone();
        if read_noise > 0.0 {
            for &q in &self.readout {
                bits[q] ^= rng.random_bool(read_noise);
            }
        }
        let flip = match self.config.decoder {
            ReadoutDecoder::Line => self.line.iter().fold(false, |acc, &q| acc ^ bits[q]),
            ReadoutDecoder::Multiline => {
                let (even, odd) = self.paths.parity_counts(&bits);
                odd > even
            }
        };
        let black = self.geom.black();
        Ok(!(frame.flips[black] ^ flip))
    }
}

/// RNG for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Single trial with a freshly built engine.
pub fn run_trial<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<bool> {
    TrialEngine::new(config)?.run_trial(rng)
}

/// Run `config.trials` trials on the current rayon pool. The count is
/// independent of the number of workers.
pub fn estimate_success(config: &ExperimentConfig) -> Result<RunResult> {
    TrialEngine::new(config)?;
    let successes = (0..config.trials)
        .into_par_iter()
        .map_init(
            || TrialEngine::new(config).expect("validated"),
            |engine, i| engine.run_trial(&mut trial_rng(config.seed, i)).map(u64::from),
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RunResult {
        successes,
        trials: config.trials,
    })
}

/// Like [`estimate_success`] on a dedicated pool of `threads` workers.
pub fn estimate_success_with_threads(config: &ExperimentConfig, threads: usize) -> Result<RunResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(e.to_string()))?;
    pool.install(|| estimate_success(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rows: usize, cols: usize, p: f64, steps: usize, mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            rows,
            cols,
            p,
            steps,
            trials: 200,
            mode,
            ..Default::default()
        }
    }

    #[test]
    fn noiseless_runs_always_succeed() {
        for mode in [Mode::Encode, Mode::NoEncode] {
            for decoder in [ReadoutDecoder::Line, ReadoutDecoder::Multiline] {
                for sector in [Sector::Z, Sector::X] {
                    let c = ExperimentConfig {
                        decoder,
                        sector,
                        ..cfg(4, 5, 0.0, 3, mode)
                    };
                    assert_eq!(estimate_success(&c).unwrap().p_hat(), 1.0, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn all_flip_single_row_fails() {
        for sector in [Sector::Z, Sector::X] {
            let c = ExperimentConfig {
                syndrome_noise: false,
                sector,
                ..cfg(1, 3, 1.0, 1, Mode::Encode)
            };
            let mut e = TrialEngine::new(&c).unwrap();
            for i in 0..20 {
                assert!(!e.run_trial(&mut trial_rng(1, i)).unwrap());
            }
        }
    }

    #[test]
    fn bad_probability_rejected() {
        assert!(cfg(3, 3, 1.5, 1, Mode::Encode).validate().is_err());
    }
}
