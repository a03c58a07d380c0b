//! Proof objects for the quotient `G/H`: anchor sequences and non-commuting
//! partners (trivial center), torsion certificates, conjugation checks, and
//! the seeded sampler used by every property suite.

mod sample;

pub use sample::{sample_in_h, sample_map, SampleConfig, Sampler, TailKind};

use num_traits::{One, Signed};

use crate::asymptotics::{
    coset_equivalent, in_h, normalize_mod_h, ratio_extremes, s_invariant, CosetDecision, SInvariant,
};
use crate::error::{Error, Result};
use crate::plcore::{compose, invert, power, Piece, PlMap, RawMap, RawTail, Tail};
use crate::rational::{int, rat, show, ExactRational};

/// Default number of anchors reported by [`center_witness`].
pub const DEFAULT_ANCHORS: usize = 4;

/// Scaling factors tried, in order, against a geometric-tail class.
const SCALING_FACTORS: [(i64, i64); 6] = [(2, 1), (3, 1), (5, 1), (7, 1), (3, 2), (5, 3)];

/// How a non-commuting partner was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Anchors `a_{k+1} = 3 f(a_k)` for a target with linear tail slope
    /// `slope > 1`; the partner fixes every anchor and has one break inside
    /// each `[a_k, a_{k+1}]`, at `f(a_k)`.
    Anchored { slope: ExactRational },
    /// The partner is `x -> factor * x`; used for geometric-tail targets.
    Scaling { factor: ExactRational },
}

/// Certificate that the class of a map is not central in `G/H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBundle {
    /// The map the partner was built for: the normalized input, or its
    /// inverse when the input's tail slope is below 1.
    pub target: PlMap,
    pub inverted: bool,
    pub construction: Construction,
    pub anchors: Vec<ExactRational>,
    pub conjugator: PlMap,
    /// `|target(g(a_k)) - g(target(a_k))| / a_k` per anchor.
    pub gaps: Vec<ExactRational>,
    /// Coset comparison of `target∘g` against `g∘target`.
    pub verdict: CosetDecision,
}

/// `a_1, ..., a_n` with `a_{k+1} = 3 f(a_k)`.
///
/// `f` must have a linear tail `x -> s*x` with `s > 1`, and `a_1` must be
/// positive and at least the tail start; the sequence is then geometric with
/// ratio `3s` and `f(a_k) - a_k = (s-1) a_k` grows without bound.
pub fn anchor_sequence(f: &PlMap, a1: &ExactRational, n: usize) -> Result<Vec<ExactRational>> {
    let slope = linear_tail_slope(f)?;
    if slope <= ExactRational::one() {
        return Err(Error::SlopeNotAboveOne(show(&slope)));
    }
    if !a1.is_positive() || a1 < f.tail_start() {
        return Err(Error::AnchorBelowTailStart {
            anchor: show(a1),
            tail_start: show(f.tail_start()),
        });
    }
    let mut anchors = Vec::with_capacity(n);
    let mut a = a1.clone();
    for _ in 0..n {
        let next = int(3) * f.value(&a);
        anchors.push(std::mem::replace(&mut a, next));
    }
    Ok(anchors)
}

fn linear_tail_slope(f: &PlMap) -> Result<ExactRational> {
    match f.tail() {
        Tail::Affine { slope } if f.has_linear_tail() => Ok(slope.clone()),
        _ => Err(Error::NotLinearTail),
    }
}

/// The partner `g` for slope `s > 1` anchored at `a1`: identity on
/// `[0, a1]`, then self-similar under `3s` with pattern slope `1/2` on
/// `[a1, s*a1]` and `(5s-1)/(4s)` on `[s*a1, 3s*a1]`, so that
/// `g(s*a_k) = (1+s) a_k / 2` and every anchor is fixed.
pub fn anchored_conjugator(slope: &ExactRational, a1: &ExactRational) -> Result<PlMap> {
    let upper = (int(5) * slope - int(1)) / (int(4) * slope);
    PlMap::validate(&RawMap {
        pieces: vec![Piece::new(a1.clone(), int(1))],
        tail: Some(RawTail::Geometric {
            base: int(3) * slope,
            pattern: vec![
                Piece::new(slope * a1, rat(1, 2)),
                Piece::new(int(3) * slope * a1, upper),
            ],
        }),
    })
}

/// `|f(g(a)) - g(f(a))| / a` for each anchor `a`.
pub fn noncommute_gap(f: &PlMap, g: &PlMap, anchors: &[ExactRational]) -> Vec<ExactRational> {
    anchors
        .iter()
        .map(|a| (f.value(&g.value(a)) - g.value(&f.value(a))).abs() / a)
        .collect()
}

/// Non-commuting partner for the class of `f`, with [`DEFAULT_ANCHORS`] anchors.
pub fn center_witness(f: &PlMap) -> Result<WitnessBundle> {
    center_witness_with(f, DEFAULT_ANCHORS)
}

/// Builds a class `[g]` that does not commute with `[f]` in `G/H`.
///
/// For a linear-tail representative with slope `s != 1` the anchored
/// construction is used (on `f⁻¹` when `s < 1`; a class is central exactly
/// when its inverse is). For a geometric tail the partner is a scaling
/// `x -> c x` with `c` taken from a short fixed list. Classes in `H` have no
/// partner.
pub fn center_witness_with(f: &PlMap, anchor_count: usize) -> Result<WitnessBundle> {
    let normal = normalize_mod_h(f);
    match normal.tail() {
        Tail::Affine { slope } => {
            let one = ExactRational::one();
            if *slope == one {
                return Err(Error::SlopeNotAboveOne(show(slope)));
            }
            let inverted = *slope < one;
            let target = if inverted {
                invert(&normal)
            } else {
                normal.clone()
            };
            let s = linear_tail_slope(&target)?;
            let a1 = first_anchor(target.tail_start(), &(int(3) * &s));
            let anchors = anchor_sequence(&target, &a1, anchor_count)?;
            let conjugator = anchored_conjugator(&s, &a1)?;
            finish(
                target,
                inverted,
                Construction::Anchored { slope: s },
                anchors,
                conjugator,
            )
        }
        Tail::Geometric { .. } => {
            let mut last = None;
            for (n, d) in SCALING_FACTORS {
                let factor = rat(n, d);
                let conjugator = PlMap::linear(factor.clone());
                let verdict = commutator_verdict(&normal, &conjugator)?;
                if let CosetDecision::Distinct { start, ratio, .. } = &verdict {
                    let mut anchors = Vec::with_capacity(anchor_count);
                    let mut a = start.clone();
                    for _ in 0..anchor_count {
                        let next = &a * ratio;
                        anchors.push(std::mem::replace(&mut a, next));
                    }
                    let gaps = noncommute_gap(&normal, &conjugator, &anchors);
                    return Ok(WitnessBundle {
                        target: normal,
                        inverted: false,
                        construction: Construction::Scaling { factor },
                        anchors,
                        conjugator,
                        gaps,
                        verdict,
                    });
                }
                last = Some(verdict);
            }
            // Unreachable for canonical maps: two multiplicatively independent
            // factors cannot both be periods of a non-constant ratio profile.
            unreachable!("no scaling factor separated the classes: {last:?}")
        }
    }
}

/// `1` when the tail starts at or below 1, otherwise the first power of
/// `scale` at or above the tail start.
fn first_anchor(tail_start: &ExactRational, scale: &ExactRational) -> ExactRational {
    let mut a = ExactRational::one();
    while a < *tail_start {
        a *= scale;
    }
    a
}

fn commutator_verdict(f: &PlMap, g: &PlMap) -> Result<CosetDecision> {
    coset_equivalent(&compose(f, g)?, &compose(g, f)?)
}

fn finish(
    target: PlMap,
    inverted: bool,
    construction: Construction,
    anchors: Vec<ExactRational>,
    conjugator: PlMap,
) -> Result<WitnessBundle> {
    let gaps = noncommute_gap(&target, &conjugator, &anchors);
    let verdict = commutator_verdict(&target, &conjugator)?;
    Ok(WitnessBundle {
        target,
        inverted,
        construction,
        anchors,
        conjugator,
        gaps,
        verdict,
    })
}

/// Whether `g⁻¹ ∘ f ∘ g` lies in `H`. Normality of `H` predicts `true`
/// whenever `f` does.
pub fn conjugation_check(f: &PlMap, g: &PlMap) -> Result<bool> {
    let conjugate = compose(&invert(g), &compose(f, g)?)?;
    Ok(in_h(&conjugate))
}

/// Certificate that `f^r` is outside `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionWitness {
    pub power: u32,
    pub invariant: SInvariant,
    /// `invariant != {1}`.
    pub outside_h: bool,
    /// `f^r(x_k)/x_k -> limit != 1` along `x_k = start * ratio^k`.
    pub start: ExactRational,
    pub ratio: ExactRational,
    pub limit: ExactRational,
}

/// `S` of `normalize(f)^r` and a sequence along which its ratio stays away from 1.
pub fn torsion_witness(f: &PlMap, r: u32) -> Result<TorsionWitness> {
    if in_h(f) {
        return Err(Error::InHNoWitness);
    }
    let p = power(&normalize_mod_h(f), r)?;
    let invariant = s_invariant(&p);
    let ext = ratio_extremes(&p);
    let one = ExactRational::one();
    let (limit, start) = if (&ext.lo - &one).abs() >= (&ext.hi - &one).abs() {
        (ext.lo, ext.lo_at)
    } else {
        (ext.hi, ext.hi_at)
    };
    let ratio = p.tail().base().cloned().unwrap_or_else(|| int(2));
    Ok(TorsionWitness {
        power: r,
        outside_h: !invariant.is_one(),
        invariant,
        start,
        ratio,
        limit,
    })
}
