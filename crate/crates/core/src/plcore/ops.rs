use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::canon::canonicalize;
use super::map::{PlMap, Tail};
use super::segments::Segments;
use crate::error::{Error, Result};
use crate::rational::{common_power, pow, ExactRational};

/// Default bound on the exponents tried when looking for a common power of
/// two geometric scales.
pub const DEFAULT_COMMENSURABILITY_CAP: u32 = 16;

/// Extreme slopes of a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeBounds {
    pub min_slope: ExactRational,
    pub max_slope: ExactRational,
}

/// Exact extremes of the slope set.
pub fn slope_bounds(f: &PlMap) -> SlopeBounds {
    let mut slopes = f.slopes();
    let first = slopes.next().expect("every map has a tail slope").clone();
    let (min_slope, max_slope) = slopes.fold((first.clone(), first), |(lo, hi), s| {
        (
            if *s < lo { s.clone() } else { lo },
            if *s > hi { s.clone() } else { hi },
        )
    });
    SlopeBounds {
        min_slope,
        max_slope,
    }
}

/// Two-sided Lipschitz constant `K = max(max_slope, 1/min_slope)`, so that
/// `|x-y|/K <= |f(x)-f(y)| <= K|x-y|`.
pub fn bilip_constant(f: &PlMap) -> ExactRational {
    let bounds = slope_bounds(f);
    let inv = bounds.min_slope.recip();
    if bounds.max_slope > inv {
        bounds.max_slope
    } else {
        inv
    }
}

/// How the tail of a composite behaves.
enum TailClass {
    Affine(ExactRational),
    Geometric(ExactRational),
}

fn describe(f: &PlMap) -> String {
    match f.tail() {
        Tail::Affine { .. } if f.has_linear_tail() => "linear".into(),
        Tail::Affine { .. } => "affine with nonzero intercept".into(),
        Tail::Geometric { base, .. } => format!("geometric base {}", crate::rational::show(base)),
    }
}

/// Smallest common power of two geometric scales within `cap`.
pub(crate) fn common_scale(
    a: &ExactRational,
    b: &ExactRational,
    cap: u32,
) -> Result<ExactRational> {
    match common_power(a, b, cap) {
        Some((k, _)) => Ok(pow(a, k)),
        None => Err(Error::incommensurable(a, b, cap)),
    }
}

fn closure(f: &PlMap, g: &PlMap, cap: u32) -> Result<TailClass> {
    let not_closed = || Error::TailNotClosed {
        outer: describe(f),
        inner: describe(g),
    };
    match (f.tail(), g.tail()) {
        (Tail::Affine { slope: sf }, Tail::Affine { slope: sg }) => Ok(TailClass::Affine(sf * sg)),
        (Tail::Affine { .. }, Tail::Geometric { base, .. }) => {
            if f.has_linear_tail() {
                Ok(TailClass::Geometric(base.clone()))
            } else {
                Err(not_closed())
            }
        }
        (Tail::Geometric { base, .. }, Tail::Affine { .. }) => {
            if g.has_linear_tail() {
                Ok(TailClass::Geometric(base.clone()))
            } else {
                Err(not_closed())
            }
        }
        (Tail::Geometric { base: a, .. }, Tail::Geometric { base: b, .. }) => {
            common_scale(a, b, cap).map(TailClass::Geometric)
        }
    }
}

/// `f ∘ g` with the default commensurability cap.
pub fn compose(f: &PlMap, g: &PlMap) -> Result<PlMap> {
    compose_capped(f, g, DEFAULT_COMMENSURABILITY_CAP)
}

/// `f ∘ g`, i.e. `x -> f(g(x))`.
///
/// Composite breakpoints are `B(g) ∪ g⁻¹(B(f))`; the composite is rebuilt
/// from its exact values there. The tail class follows the closure table:
/// affine∘affine is affine, a linear map composes with anything, and two
/// geometric tails compose when their scales share a power within `cap`.
pub fn compose_capped(f: &PlMap, g: &PlMap, cap: u32) -> Result<PlMap> {
    let class = closure(f, g, cap)?;
    let start = {
        let pulled = g.preimage_unchecked(f.tail_start());
        if pulled > *g.tail_start() {
            pulled
        } else {
            g.tail_start().clone()
        }
    };
    let end = match &class {
        TailClass::Affine(_) => start.clone(),
        TailClass::Geometric(scale) => &start * scale,
    };
    let mut xs: BTreeSet<ExactRational> = g
        .vertices_through(&end)
        .into_iter()
        .map(|(x, _)| x)
        .collect();
    let g_end = g.value(&end);
    xs.extend(
        f.vertices_through(&g_end)
            .into_iter()
            .map(|(y, _)| g.preimage_unchecked(&y)),
    );
    xs.insert(start.clone());
    xs.insert(end.clone());
    let vertex = |x: &ExactRational| (x.clone(), f.value(&g.value(x)));
    let finite = Segments::from_vertices(xs.iter().filter(|x| **x <= start).map(vertex));
    let tail = match class {
        TailClass::Affine(slope) => Tail::Affine { slope },
        TailClass::Geometric(base) => Tail::Geometric {
            base,
            pattern: Segments::from_vertices(xs.iter().filter(|x| **x >= start).map(vertex)),
        },
    };
    Ok(canonicalize(finite, tail))
}

/// The inverse homeomorphism.
pub fn invert(f: &PlMap) -> PlMap {
    let finite = f.finite().inverted();
    let tail = match f.tail() {
        Tail::Affine { slope } => Tail::Affine {
            slope: slope.recip(),
        },
        Tail::Geometric { base, pattern } => Tail::Geometric {
            base: base.clone(),
            pattern: pattern.inverted(),
        },
    };
    canonicalize(finite, tail)
}

/// `f` composed with itself `r` times (`r = 0` gives the identity).
pub fn power(f: &PlMap, r: u32) -> Result<PlMap> {
    let mut acc = PlMap::identity();
    for _ in 0..r {
        acc = compose(f, &acc)?;
    }
    Ok(acc)
}

/// Pointwise equality with the default cap.
pub fn maps_equal(f: &PlMap, g: &PlMap) -> Result<bool> {
    maps_equal_capped(f, g, DEFAULT_COMMENSURABILITY_CAP)
}

/// Decides `f(x) = g(x)` for all `x >= 0`.
///
/// Canonical forms are unique, so identical forms settle equality at once.
/// Otherwise a point where the maps differ is searched for over a range
/// covering both finite parts and two common tail periods; if the scales are
/// incommensurable within `cap` and no such point turns up, the question is
/// reported as undecided rather than answered.
pub fn maps_equal_capped(f: &PlMap, g: &PlMap, cap: u32) -> Result<bool> {
    if f == g {
        return Ok(true);
    }
    Ok(difference_witness(f, g, cap)?.is_none())
}

/// A point where `f` and `g` differ, or `None` if they agree everywhere.
pub fn difference_witness(f: &PlMap, g: &PlMap, cap: u32) -> Result<Option<ExactRational>> {
    let reach = if f.tail_start() > g.tail_start() {
        f.tail_start().clone()
    } else {
        g.tail_start().clone()
    };
    let (horizon, decisive) = match (f.tail().base(), g.tail().base()) {
        (None, None) => (reach + ExactRational::one(), true),
        (Some(a), None) | (None, Some(a)) => (&reach * a * a, true),
        (Some(a), Some(b)) => match common_power(a, b, cap) {
            Some((k, _)) => {
                let period = pow(a, k);
                (&reach * &period * &period, true)
            }
            None => (&reach * a * a * b * b, false),
        },
    };
    let mut points: BTreeSet<ExactRational> = f
        .vertices_through(&horizon)
        .into_iter()
        .chain(g.vertices_through(&horizon))
        .map(|(x, _)| x)
        .collect();
    points.insert(horizon);
    points.remove(&ExactRational::zero());
    if let Some(x) = points.into_iter().find(|x| f.value(x) != g.value(x)) {
        return Ok(Some(x));
    }
    if decisive {
        Ok(None)
    } else {
        Err(Error::incommensurable(
            f.tail().base().unwrap(),
            g.tail().base().unwrap(),
            cap,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plcore::map::{Piece, RawMap, RawTail};
    use crate::rational::{int, rat};

    fn geometric_example() -> PlMap {
        PlMap::validate(&RawMap {
            pieces: vec![Piece::new(int(1), int(1))],
            tail: Some(RawTail::Geometric {
                base: int(2),
                pattern: vec![
                    Piece::new(rat(3, 2), rat(1, 2)),
                    Piece::new(int(2), rat(3, 2)),
                ],
            }),
        })
        .unwrap()
    }

    fn affine(pieces: Vec<(ExactRational, ExactRational)>, slope: ExactRational) -> PlMap {
        PlMap::validate(&RawMap {
            pieces: pieces.into_iter().map(|(e, s)| Piece::new(e, s)).collect(),
            tail: Some(RawTail::Affine { slope }),
        })
        .unwrap()
    }

    #[test]
    fn linear_maps_compose_and_invert() {
        let six = compose(&PlMap::linear(int(2)), &PlMap::linear(int(3))).unwrap();
        assert_eq!(six, PlMap::linear(int(6)));
        assert_eq!(invert(&PlMap::linear(int(2))), PlMap::linear(rat(1, 2)));
        assert_eq!(
            power(&PlMap::linear(int(2)), 3).unwrap(),
            PlMap::linear(int(8))
        );
        assert_eq!(power(&PlMap::identity(), 5).unwrap(), PlMap::identity());
    }

    #[test]
    fn compose_affine_with_linear() {
        // f(x) = 3x on [0,1], 2x+1 beyond; g(x) = 2x.
        let f = affine(vec![(int(1), int(3))], int(2));
        let fg = compose(&f, &PlMap::linear(int(2))).unwrap();
        assert_eq!(fg, affine(vec![(rat(1, 2), int(6))], int(4)));
        assert_eq!(fg.eval(&int(1)).unwrap(), int(5));
        assert_eq!(fg.intercept(), Some(int(1)));
    }

    #[test]
    fn intercept_against_geometric_is_not_closed() {
        let f = affine(vec![(int(1), int(3))], int(2));
        let g = geometric_example();
        assert!(matches!(compose(&f, &g), Err(Error::TailNotClosed { .. })));
        assert!(matches!(compose(&g, &f), Err(Error::TailNotClosed { .. })));
    }

    #[test]
    fn incommensurable_geometric_scales() {
        let g = geometric_example();
        let h = PlMap::validate(&RawMap {
            pieces: vec![Piece::new(int(1), int(1))],
            tail: Some(RawTail::Geometric {
                base: int(3),
                pattern: vec![Piece::new(int(2), rat(1, 2)), Piece::new(int(3), rat(3, 2))],
            }),
        })
        .unwrap();
        assert!(matches!(
            compose(&g, &h),
            Err(Error::IncommensurableScales { .. })
        ));
        assert_eq!(maps_equal(&g, &h), Ok(false));
    }

    #[test]
    fn inverse_examples() {
        let f = affine(vec![(int(1), rat(1, 2))], int(2));
        let inv = invert(&f);
        assert_eq!(inv, affine(vec![(rat(1, 2), int(2))], rat(1, 2)));
        assert!(compose(&inv, &f).unwrap().is_identity());

        let g = geometric_example();
        let ginv = invert(&g);
        match ginv.tail() {
            Tail::Geometric { base, pattern } => {
                assert_eq!(*base, int(2));
                assert_eq!(pattern.xs(), &[int(1), rat(5, 4), int(2)]);
                assert_eq!(pattern.slopes(), &[int(2), rat(2, 3)]);
            }
            other => panic!("expected geometric tail, got {other:?}"),
        }
        assert!(compose(&g, &ginv).unwrap().is_identity());
        assert!(compose(&ginv, &g).unwrap().is_identity());
    }

    #[test]
    fn geometric_square() {
        let g = geometric_example();
        let g2 = power(&g, 2).unwrap();
        assert_eq!(g2.tail().base(), Some(&int(2)));
        assert_eq!(g2.eval(&rat(3, 2)).unwrap(), rat(9, 8));
        for k in 0..40 {
            let x = rat(k * 7 + 1, 4);
            assert_eq!(g2.eval(&x).unwrap(), g.eval(&g.eval(&x).unwrap()).unwrap());
        }
    }

    #[test]
    fn slope_bound_examples() {
        assert_eq!(
            slope_bounds(&PlMap::identity()),
            SlopeBounds {
                min_slope: int(1),
                max_slope: int(1)
            }
        );
        assert_eq!(
            slope_bounds(&geometric_example()),
            SlopeBounds {
                min_slope: rat(1, 2),
                max_slope: rat(3, 2)
            }
        );
        let f = affine(vec![(int(1), int(3))], int(2));
        assert_eq!(
            slope_bounds(&f),
            SlopeBounds {
                min_slope: int(2),
                max_slope: int(3)
            }
        );
        assert_eq!(bilip_constant(&PlMap::identity()), int(1));
        assert_eq!(bilip_constant(&geometric_example()), int(2));
        assert_eq!(bilip_constant(&f), int(3));
    }

    #[test]
    fn equality_examples() {
        assert_eq!(maps_equal(&PlMap::identity(), &PlMap::identity()), Ok(true));
        let two = PlMap::linear(int(2));
        let two_with_break = affine(vec![(int(1), int(2))], int(2));
        assert_eq!(maps_equal(&two, &two_with_break), Ok(true));
        assert_eq!(maps_equal(&two, &PlMap::linear(int(3))), Ok(false));
        let g = geometric_example();
        assert_eq!(maps_equal(&g, &PlMap::identity()), Ok(false));
        assert_eq!(
            difference_witness(&g, &PlMap::identity(), 16).unwrap(),
            Some(rat(3, 2))
        );
    }

    #[test]
    fn mixed_geometric_bases_compose() {
        let g = geometric_example();
        let g4 = PlMap::validate(&RawMap {
            pieces: vec![Piece::new(int(1), int(1))],
            tail: Some(RawTail::Geometric {
                base: int(4),
                pattern: vec![Piece::new(int(2), rat(1, 3)), Piece::new(int(4), rat(4, 3))],
            }),
        })
        .unwrap();
        let h = compose(&g, &g4).unwrap();
        for k in 1..60 {
            let x = rat(k * 5, 3);
            assert_eq!(h.eval(&x).unwrap(), g.eval(&g4.eval(&x).unwrap()).unwrap());
        }
    }
}
