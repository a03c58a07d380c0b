use std::collections::BTreeSet;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::plcore::{Piece, PlMap, RawMap, RawTail};
use crate::rational::{int, rat, ExactRational};

/// Which tail class the sampler draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TailKind {
    /// Affine tail, intercept left to chance.
    Affine,
    /// Tail `x -> s*x` (zero intercept).
    Linear,
    /// Self-similar tail.
    Geometric,
    /// One of the three above, uniformly.
    Mixed,
}

impl std::str::FromStr for TailKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "affine" => Ok(TailKind::Affine),
            "linear" => Ok(TailKind::Linear),
            "geometric" => Ok(TailKind::Geometric),
            "mixed" => Ok(TailKind::Mixed),
            other => Err(format!(
                "unknown tail kind `{other}` (affine, linear, geometric, mixed)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    /// Upper bound on finite pieces and on pattern pieces minus one.
    pub max_breakpoints: usize,
    /// Every slope is drawn from `(1/K, K)`.
    pub slope_bound: ExactRational,
    pub denominator_bound: u32,
    pub tail_kind: TailKind,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            max_breakpoints: 4,
            slope_bound: int(4),
            denominator_bound: 4,
            tail_kind: TailKind::Mixed,
        }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn with_tail(mut self, tail_kind: TailKind) -> Self {
        self.tail_kind = tail_kind;
        self
    }
}

/// Geometric scales the sampler picks from.
pub const SAMPLE_BASES: [(i64, i64); 5] = [(3, 2), (2, 1), (5, 2), (3, 1), (4, 1)];

const ATTEMPTS: usize = 1000;

/// Deterministic stream of valid maps.
pub struct Sampler {
    cfg: SampleConfig,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(cfg: SampleConfig) -> Result<Self> {
        if cfg.slope_bound <= ExactRational::one() {
            return Err(Error::InvalidConfig("slope bound must exceed 1"));
        }
        if cfg.denominator_bound == 0 {
            return Err(Error::InvalidConfig("denominator bound must be positive"));
        }
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(Sampler { cfg, rng })
    }

    /// Next map with the configured tail kind.
    pub fn next_map(&mut self) -> Result<PlMap> {
        let kind = match self.cfg.tail_kind {
            TailKind::Mixed => [TailKind::Affine, TailKind::Linear, TailKind::Geometric]
                [self.rng.random_range(0..3)],
            other => other,
        };
        match kind {
            TailKind::Geometric => {
                let (n, d) = SAMPLE_BASES[self.rng.random_range(0..SAMPLE_BASES.len())];
                self.geometric(&rat(n, d))
            }
            kind => self.affine(kind == TailKind::Linear),
        }
    }

    /// Next map whose tail slope is 1, i.e. a member of `H`. With
    /// `linear`, the map is the identity beyond its tail start.
    pub fn next_in_h(&mut self, linear: bool) -> Result<PlMap> {
        for _ in 0..ATTEMPTS {
            let mut pieces = self.finite_pieces(0);
            if linear && !pieces.is_empty() {
                // Solve the last slope so that f(T) = T.
                let last = pieces.pop().unwrap();
                let (start, value) = endpoint(&pieces);
                let slope = (&last.end - &value) / (&last.end - &start);
                if !self.slope_ok(&slope) {
                    continue;
                }
                pieces.push(Piece::new(last.end, slope));
            }
            return PlMap::validate(&RawMap {
                pieces,
                tail: Some(RawTail::Affine { slope: int(1) }),
            });
        }
        Err(Error::RejectionLimitExceeded(ATTEMPTS))
    }

    /// Next map with a geometric tail of the given scale.
    pub fn geometric(&mut self, base: &ExactRational) -> Result<PlMap> {
        let lo = self.cfg.slope_bound.recip();
        for _ in 0..ATTEMPTS {
            let pieces = self.finite_pieces(1);
            let (t, ft) = endpoint(&pieces);
            let span = base * &t;
            let count = self
                .rng
                .random_range(2..=self.cfg.max_breakpoints.max(1) + 1);
            let grid = (self.cfg.denominator_bound as i64).max(count as i64 + 1);
            let mut cuts = BTreeSet::new();
            while cuts.len() < count - 1 {
                let d = self.rng.random_range(2..=grid);
                cuts.insert(rat(self.rng.random_range(1..d), d));
            }
            let mut ends: Vec<ExactRational> =
                cuts.into_iter().map(|u| &t + (&span - &t) * u).collect();
            ends.push(span.clone());
            let mut pattern = Vec::with_capacity(count);
            let (mut x, mut y) = (t.clone(), ft.clone());
            for end in &ends[..count - 1] {
                let slope = self.slope();
                y += &slope * (end - &x);
                x = end.clone();
                pattern.push(Piece::new(end.clone(), slope));
            }
            let last = (base * &ft - &y) / (&span - &x);
            if last <= lo || last >= self.cfg.slope_bound {
                continue;
            }
            pattern.push(Piece::new(span, last));
            let map = PlMap::validate(&RawMap {
                pieces,
                tail: Some(RawTail::Geometric {
                    base: base.clone(),
                    pattern,
                }),
            })?;
            if map.tail().is_geometric() {
                return Ok(map);
            }
        }
        Err(Error::RejectionLimitExceeded(ATTEMPTS))
    }

    fn affine(&mut self, linear: bool) -> Result<PlMap> {
        let pieces = self.finite_pieces(0);
        let (t, ft) = endpoint(&pieces);
        let slope = if linear && !t.is_zero() {
            ft / t
        } else {
            self.slope()
        };
        PlMap::validate(&RawMap {
            pieces,
            tail: Some(RawTail::Affine { slope }),
        })
    }

    fn finite_pieces(&mut self, min: usize) -> Vec<Piece> {
        let count = self
            .rng
            .random_range(min..=self.cfg.max_breakpoints.max(min));
        let mut end = ExactRational::zero();
        (0..count)
            .map(|_| {
                end += self.length();
                Piece::new(end.clone(), self.slope())
            })
            .collect()
    }

    fn length(&mut self) -> ExactRational {
        let d = self.cfg.denominator_bound as i64;
        let den = self.rng.random_range(1..=d);
        rat(self.rng.random_range(1..=2 * d), den)
    }

    fn slope_ok(&self, s: &ExactRational) -> bool {
        *s > self.cfg.slope_bound.recip() && *s < self.cfg.slope_bound
    }

    fn slope(&mut self) -> ExactRational {
        let d = self.cfg.denominator_bound as i64;
        loop {
            let den = self.rng.random_range(1..=d);
            let top = (&self.cfg.slope_bound * int(den))
                .ceil()
                .to_integer()
                .to_i64()
                .unwrap_or(i64::MAX);
            let s = rat(self.rng.random_range(1..=top.max(1)), den);
            if self.slope_ok(&s) {
                return s;
            }
        }
    }

    /// Uniform draw from `0..n`, for callers mixing their own choices into the stream.
    pub fn pick(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform rational in `[lo, hi]` on the grid of the denominator bound.
    pub fn point(&mut self, lo: &ExactRational, hi: &ExactRational) -> ExactRational {
        let steps = (self.cfg.denominator_bound as i64) * 64;
        let k = self.rng.random_range(0..=steps);
        lo + (hi - lo) * rat(k, steps)
    }
}

fn endpoint(pieces: &[Piece]) -> (ExactRational, ExactRational) {
    let (mut x, mut y) = (ExactRational::zero(), ExactRational::zero());
    for p in pieces {
        y += &p.slope * (&p.end - &x);
        x = p.end.clone();
    }
    (x, y)
}

/// One map drawn from a fresh sampler seeded by `cfg.seed`.
pub fn sample_map(cfg: &SampleConfig) -> Result<PlMap> {
    Sampler::new(cfg.clone())?.next_map()
}

/// One member of `H` drawn from a fresh sampler seeded by `cfg.seed`.
pub fn sample_in_h(cfg: &SampleConfig, linear: bool) -> Result<PlMap> {
    Sampler::new(cfg.clone())?.next_in_h(linear)
}
