//! Asymptotic ratio invariant, membership in `H`, and the quotient `G/H`.
//!
//! `S_f` is the set of limits of `f(x_n)/x_n` along sequences `x_n -> inf`.
//! On an affine piece `f(x) = s*x + c` the ratio `s + c/x` is monotone, so
//! over one period of a geometric tail its range is attained at pattern
//! vertices. This makes `S_f`, and everything built on it, a finite exact
//! computation.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::plcore::{self, PlMap, Segments, Tail, DEFAULT_COMMENSURABILITY_CAP};
use crate::rational::{int, show, ExactRational};

/// The set of asymptotic ratios: a single value or a closed interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SInvariant {
    Singleton(ExactRational),
    /// Invariant: `lo < hi`, both positive.
    Interval {
        lo: ExactRational,
        hi: ExactRational,
    },
}

impl SInvariant {
    pub fn lo(&self) -> &ExactRational {
        match self {
            SInvariant::Singleton(v) => v,
            SInvariant::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &ExactRational {
        match self {
            SInvariant::Singleton(v) => v,
            SInvariant::Interval { hi, .. } => hi,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, SInvariant::Singleton(v) if v.is_one())
    }

    fn from_bounds(lo: ExactRational, hi: ExactRational) -> Self {
        if lo == hi {
            SInvariant::Singleton(lo)
        } else {
            SInvariant::Interval { lo, hi }
        }
    }
}

impl fmt::Display for SInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SInvariant::Singleton(v) => write!(f, "singleton {}", show(v)),
            SInvariant::Interval { lo, hi } => write!(f, "interval {} {}", show(lo), show(hi)),
        }
    }
}

/// Where the extreme ratios of a tail are attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioExtremes {
    pub lo: ExactRational,
    pub lo_at: ExactRational,
    pub hi: ExactRational,
    pub hi_at: ExactRational,
}

/// Extreme values of `f(x)/x` over one tail period, with the vertices that
/// attain them. For an affine tail both are the slope, attained along any
/// sequence; the reported point is then `max(T, 1)`.
pub fn ratio_extremes(f: &PlMap) -> RatioExtremes {
    match f.tail() {
        Tail::Affine { slope } => {
            let at = if *f.tail_start() > ExactRational::one() {
                f.tail_start().clone()
            } else {
                ExactRational::one()
            };
            RatioExtremes {
                lo: slope.clone(),
                lo_at: at.clone(),
                hi: slope.clone(),
                hi_at: at,
            }
        }
        Tail::Geometric { pattern, .. } => {
            let mut points = pattern
                .xs()
                .iter()
                .zip(pattern.ys())
                .map(|(x, y)| (y / x, x));
            let (first, at) = points.next().unwrap();
            let init = RatioExtremes {
                lo: first.clone(),
                lo_at: at.clone(),
                hi: first,
                hi_at: at.clone(),
            };
            points.fold(init, |mut acc, (ratio, x)| {
                if ratio < acc.lo {
                    acc.lo = ratio.clone();
                    acc.lo_at = x.clone();
                }
                if ratio > acc.hi {
                    acc.hi = ratio;
                    acc.hi_at = x.clone();
                }
                acc
            })
        }
    }
}

/// The invariant `S_f`.
pub fn s_invariant(f: &PlMap) -> SInvariant {
    let ext = ratio_extremes(f);
    SInvariant::from_bounds(ext.lo, ext.hi)
}

/// Membership in `H = { f : f(x)/x -> 1 }`.
pub fn in_h(f: &PlMap) -> bool {
    s_invariant(f).is_one()
}

/// Outcome of comparing two maps modulo `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetDecision {
    /// `f(x) - g(x) = residual` for every `x >= beyond`, hence
    /// `(f(x) - g(x))/x -> 0`.
    Equivalent {
        beyond: ExactRational,
        residual: ExactRational,
    },
    /// `|f(x_k) - g(x_k)|/x_k >= gap > 0` for `x_k = start * ratio^k`, `k >= 0`.
    Distinct {
        gap: ExactRational,
        start: ExactRational,
        ratio: ExactRational,
    },
}

impl CosetDecision {
    pub fn equivalent(&self) -> bool {
        matches!(self, CosetDecision::Equivalent { .. })
    }

    pub fn gap(&self) -> Option<&ExactRational> {
        match self {
            CosetDecision::Equivalent { .. } => None,
            CosetDecision::Distinct { gap, .. } => Some(gap),
        }
    }
}

impl fmt::Display for CosetDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosetDecision::Equivalent { beyond, residual } => write!(
                f,
                "equivalent: f(x) - g(x) = {} for x >= {}, so (f - g)(x)/x -> 0",
                show(residual),
                show(beyond)
            ),
            CosetDecision::Distinct { gap, start, ratio } => write!(
                f,
                "distinct: gap {} along x_k = {} * {}^k",
                show(gap),
                show(start),
                show(ratio)
            ),
        }
    }
}

/// Intercept carried by the tail (`0` for geometric tails).
fn tail_offset(f: &PlMap) -> ExactRational {
    f.intercept().unwrap_or_else(ExactRational::zero)
}

/// Coset comparison with the default commensurability cap.
pub fn coset_equivalent(f: &PlMap, g: &PlMap) -> Result<CosetDecision> {
    coset_equivalent_capped(f, g, DEFAULT_COMMENSURABILITY_CAP)
}

/// Decides whether `(f(x) - g(x))/x -> 0`.
///
/// Beyond both tail starts each map is `x*p(x) + c` with `p` periodic under
/// the common tail scale (constant for affine tails) and `c` the affine
/// intercept. The maps are equivalent exactly when the periodic parts agree,
/// which is checked at every vertex of one common period.
pub fn coset_equivalent_capped(f: &PlMap, g: &PlMap, cap: u32) -> Result<CosetDecision> {
    let scale = match (f.tail().base(), g.tail().base()) {
        (None, None) => None,
        (Some(a), None) | (None, Some(a)) => Some(a.clone()),
        (Some(a), Some(b)) => Some(plcore::common_scale(a, b, cap)?),
    };
    let mut beyond = if f.tail_start() > g.tail_start() {
        f.tail_start().clone()
    } else {
        g.tail_start().clone()
    };
    if beyond.is_zero() {
        beyond = ExactRational::one();
    }
    let (period_end, ratio) = match scale {
        Some(s) => (&beyond * &s, s),
        None => (beyond.clone(), int(2)),
    };
    let mut points: BTreeSet<ExactRational> = f
        .vertices_through(&period_end)
        .into_iter()
        .chain(g.vertices_through(&period_end))
        .map(|(x, _)| x)
        .filter(|x| *x >= beyond)
        .collect();
    points.insert(beyond.clone());
    points.insert(period_end);

    let (cf, cg) = (tail_offset(f), tail_offset(g));
    let periodic = |m: &PlMap, c: &ExactRational, x: &ExactRational| (m.value(x) - c) / x;
    let offset = &cf - &cg;
    for x in &points {
        let diff = periodic(f, &cf, x) - periodic(g, &cg, x);
        if diff.is_zero() {
            continue;
        }
        let aligned = offset.is_zero() || offset.signum() == diff.signum();
        let (gap, start) = if aligned {
            (diff.abs(), x.clone())
        } else {
            let gap = diff.abs() / int(2);
            let mut start = x.clone();
            while offset.abs() / &start > gap {
                start *= &ratio;
            }
            (gap, start)
        };
        return Ok(CosetDecision::Distinct { gap, start, ratio });
    }
    Ok(CosetDecision::Equivalent {
        beyond,
        residual: offset,
    })
}

/// Canonical coset representative with an intercept-free tail.
///
/// Affine tails become the linear map with the same slope; a geometric tail
/// keeps its pattern and the head is straightened to the single piece from
/// `(0, 0)` to `(T, f(T))`. Idempotent.
pub fn normalize_mod_h(f: &PlMap) -> PlMap {
    match f.tail() {
        Tail::Affine { slope } => PlMap::linear(slope.clone()),
        Tail::Geometric { base, pattern } => {
            let head = Segments::from_vertices([
                (ExactRational::zero(), ExactRational::zero()),
                (f.tail_start().clone(), f.tail_start_value().clone()),
            ]);
            plcore::canonicalize(
                head,
                Tail::Geometric {
                    base: base.clone(),
                    pattern: pattern.clone(),
                },
            )
        }
    }
}

/// Product in `G/H` with the default cap.
pub fn quotient_compose(f: &PlMap, g: &PlMap) -> Result<PlMap> {
    quotient_compose_capped(f, g, DEFAULT_COMMENSURABILITY_CAP)
}

/// Product of the classes of `f` and `g`, returned as a normalized
/// representative. Normalized tails are intercept-free, so only
/// incommensurable geometric scales can fail.
pub fn quotient_compose_capped(f: &PlMap, g: &PlMap, cap: u32) -> Result<PlMap> {
    let product = plcore::compose_capped(&normalize_mod_h(f), &normalize_mod_h(g), cap)?;
    Ok(normalize_mod_h(&product))
}

/// One row of a torsion check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionStep {
    pub power: u32,
    pub invariant: SInvariant,
    pub in_h: bool,
}

/// `S` and `H`-membership of `f'^r` for `r = 1..=r_max`, where `f'` is the
/// normalized representative of `f`. When `f` is outside `H`, no row is in
/// `H`.
pub fn torsion_order_check(f: &PlMap, r_max: u32) -> Result<Vec<TorsionStep>> {
    let base = normalize_mod_h(f);
    let mut acc = PlMap::identity();
    let mut steps = Vec::with_capacity(r_max as usize);
    for power in 1..=r_max {
        acc = plcore::compose(&base, &acc)?;
        let invariant = s_invariant(&acc);
        steps.push(TorsionStep {
            power,
            in_h: invariant.is_one(),
            invariant,
        });
    }
    Ok(steps)
}
