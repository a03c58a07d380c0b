use num_traits::{One, Signed, Zero};

use super::canon;
use super::segments::Segments;
use crate::error::{Error, Result};
use crate::rational::{show, ExactRational};

/// Behaviour of a map beyond its last finite breakpoint `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// `f(x) = f(T) + slope * (x - T)` for `x >= T`.
    Affine { slope: ExactRational },
    /// `f(base^k * x) = base^k * f(x)` for `x` in `[T, base*T]`, `k >= 0`,
    /// with `pattern` describing `f` on `[T, base*T]`.
    Geometric {
        base: ExactRational,
        pattern: Segments,
    },
}

impl Tail {
    pub fn is_geometric(&self) -> bool {
        matches!(self, Tail::Geometric { .. })
    }

    pub fn base(&self) -> Option<&ExactRational> {
        match self {
            Tail::Affine { .. } => None,
            Tail::Geometric { base, .. } => Some(base),
        }
    }
}

/// One piece of a raw description: the map has slope `slope` up to `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub end: ExactRational,
    pub slope: ExactRational,
}

impl Piece {
    pub fn new(end: ExactRational, slope: ExactRational) -> Self {
        Piece { end, slope }
    }
}

/// Unvalidated tail description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTail {
    Affine {
        slope: ExactRational,
    },
    /// Pattern pieces use absolute right endpoints covering `(T, base*T]`.
    Geometric {
        base: ExactRational,
        pattern: Vec<Piece>,
    },
}

/// Unvalidated map description: contiguous pieces starting at 0, then a tail.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawMap {
    pub pieces: Vec<Piece>,
    pub tail: Option<RawTail>,
}

/// A piecewise-linear, orientation-preserving homeomorphism of `[0, inf)`
/// with finitely many slopes, held in canonical form.
///
/// Canonical form: finite pieces never repeat a slope across a breakpoint;
/// an affine tail starts at the last genuine breakpoint; a geometric tail
/// uses the smallest self-similarity scale of the map and the earliest point
/// from which that self-similarity holds. Two maps are equal as functions
/// exactly when their canonical forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlMap {
    pub(crate) finite: Segments,
    pub(crate) tail: Tail,
}

impl PlMap {
    pub fn identity() -> Self {
        PlMap::linear(ExactRational::one())
    }

    /// `x -> slope * x`. Panics unless `slope > 0`.
    pub fn linear(slope: ExactRational) -> Self {
        assert!(slope.is_positive(), "slope must be positive");
        PlMap {
            finite: Segments::point(ExactRational::zero(), ExactRational::zero()),
            tail: Tail::Affine { slope },
        }
    }

    /// Checks a raw description and returns its canonical map.
    pub fn validate(raw: &RawMap) -> Result<Self> {
        let tail = raw.tail.as_ref().ok_or(Error::EmptyMap("no tail"))?;
        let mut vertices = vec![(ExactRational::zero(), ExactRational::zero())];
        push_pieces(&mut vertices, &raw.pieces, 0)?;
        let (t, ft) = vertices.last().cloned().unwrap();
        let finite = Segments::from_vertices(vertices);
        let tail = match tail {
            RawTail::Affine { slope } => {
                if !slope.is_positive() {
                    return Err(Error::NonPositiveSlope {
                        index: raw.pieces.len(),
                        slope: show(slope),
                    });
                }
                Tail::Affine {
                    slope: slope.clone(),
                }
            }
            RawTail::Geometric { base, pattern } => {
                if *base <= ExactRational::one() {
                    return Err(Error::InvalidBase(show(base)));
                }
                if t.is_zero() {
                    return Err(Error::GeometricTailAtOrigin);
                }
                if pattern.is_empty() {
                    return Err(Error::EmptyMap("geometric tail without pattern pieces"));
                }
                let mut period = vec![(t.clone(), ft.clone())];
                push_pieces(&mut period, pattern, raw.pieces.len())?;
                let (end, f_end) = period.last().cloned().unwrap();
                let span = base * &t;
                if end != span {
                    return Err(Error::PatternSpan {
                        expected: show(&span),
                        actual: show(&end),
                    });
                }
                let expected = base * &ft;
                if f_end != expected {
                    return Err(Error::GeometricConsistencyViolation {
                        expected: show(&expected),
                        actual: show(&f_end),
                    });
                }
                Tail::Geometric {
                    base: base.clone(),
                    pattern: Segments::from_vertices(period),
                }
            }
        };
        Ok(canon::canonicalize(finite, tail))
    }

    /// Finite part on `[0, T]`.
    pub fn finite(&self) -> &Segments {
        &self.finite
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// The tail start `T` (last finite breakpoint, `0` when there are no finite pieces).
    pub fn tail_start(&self) -> &ExactRational {
        self.finite.end()
    }

    /// `f(T)`.
    pub fn tail_start_value(&self) -> &ExactRational {
        self.finite.end_value()
    }

    /// Intercept `c` of an affine tail `f(x) = s*x + c`; `None` for geometric tails.
    pub fn intercept(&self) -> Option<ExactRational> {
        match &self.tail {
            Tail::Affine { slope } => Some(self.tail_start_value() - slope * self.tail_start()),
            Tail::Geometric { .. } => None,
        }
    }

    /// True when the tail is `x -> s*x` exactly (affine with zero intercept).
    pub fn has_linear_tail(&self) -> bool {
        self.intercept().is_some_and(|c| c.is_zero())
    }

    /// True when the whole map is `x -> s*x`.
    pub fn is_linear(&self) -> bool {
        self.finite.piece_count() == 0 && matches!(self.tail, Tail::Affine { .. })
    }

    pub fn is_identity(&self) -> bool {
        *self == PlMap::identity()
    }

    /// Exact value `f(x)`.
    pub fn eval(&self, x: &ExactRational) -> Result<ExactRational> {
        if x.is_negative() {
            return Err(Error::NegativeInput(show(x)));
        }
        Ok(self.value(x))
    }

    /// `f(x)` for `x >= 0`, unchecked.
    pub(crate) fn value(&self, x: &ExactRational) -> ExactRational {
        let t = self.tail_start();
        if x <= t {
            return self.finite.value_at(x);
        }
        match &self.tail {
            Tail::Affine { slope } => self.tail_start_value() + slope * (x - t),
            Tail::Geometric { base, pattern } => {
                let (scale, reduced) = reduce(x, t, base);
                pattern.value_at(&reduced) * scale
            }
        }
    }

    /// Exact `f^{-1}(y)` for `y >= 0`.
    pub fn preimage(&self, y: &ExactRational) -> Result<ExactRational> {
        if y.is_negative() {
            return Err(Error::NegativeInput(show(y)));
        }
        Ok(self.preimage_unchecked(y))
    }

    pub(crate) fn preimage_unchecked(&self, y: &ExactRational) -> ExactRational {
        let ft = self.tail_start_value();
        if y <= ft {
            return self.finite.preimage(y);
        }
        match &self.tail {
            Tail::Affine { slope } => self.tail_start() + (y - ft) / slope,
            Tail::Geometric { base, pattern } => {
                let (scale, reduced) = reduce(y, ft, base);
                pattern.preimage(&reduced) * scale
            }
        }
    }

    /// All vertices `(x, f(x))` with `x <= upto`, in increasing order.
    ///
    /// This lists the finite vertices, the tail start and, for a geometric
    /// tail, every scaled copy of the pattern vertices. Consecutive listed
    /// points always bound an affine stretch of the map.
    pub fn vertices_through(&self, upto: &ExactRational) -> Vec<(ExactRational, ExactRational)> {
        let mut out: Vec<(ExactRational, ExactRational)> = self
            .finite
            .xs()
            .iter()
            .zip(self.finite.ys())
            .take_while(|(x, _)| *x <= upto)
            .map(|(x, y)| (x.clone(), y.clone()))
            .collect();
        if let Tail::Geometric { base, pattern } = &self.tail {
            let mut scale = ExactRational::one();
            'outer: loop {
                for (x, y) in pattern.scaled(&scale).skip(1) {
                    if x > *upto {
                        break 'outer;
                    }
                    out.push((x, y));
                }
                scale *= base;
            }
        }
        out
    }

    /// Every slope the map takes (finite pieces and tail), with repetitions.
    pub fn slopes(&self) -> impl Iterator<Item = &ExactRational> {
        let tail: Box<dyn Iterator<Item = &ExactRational>> = match &self.tail {
            Tail::Affine { slope } => Box::new(std::iter::once(slope)),
            Tail::Geometric { pattern, .. } => Box::new(pattern.slopes().iter()),
        };
        self.finite.slopes().iter().chain(tail)
    }

    pub(crate) fn from_parts(finite: Segments, tail: Tail) -> Self {
        PlMap { finite, tail }
    }
}

/// Splits `x > lo` as `scale * reduced` with `scale = base^k` and
/// `reduced` in `(lo, base*lo]`.
fn reduce(
    x: &ExactRational,
    lo: &ExactRational,
    base: &ExactRational,
) -> (ExactRational, ExactRational) {
    let hi = lo * base;
    let mut scale = ExactRational::one();
    let mut upper = hi.clone();
    while *x > upper {
        scale *= base;
        upper = &hi * &scale;
    }
    let reduced = x / &scale;
    (scale, reduced)
}

fn push_pieces(
    vertices: &mut Vec<(ExactRational, ExactRational)>,
    pieces: &[Piece],
    first_index: usize,
) -> Result<()> {
    for (offset, piece) in pieces.iter().enumerate() {
        let index = first_index + offset;
        let (x, y) = vertices.last().cloned().unwrap();
        if piece.end <= x {
            return Err(Error::NonMonotoneBreakpoints {
                index,
                previous: show(&x),
                end: show(&piece.end),
            });
        }
        if !piece.slope.is_positive() {
            return Err(Error::NonPositiveSlope {
                index,
                slope: show(&piece.slope),
            });
        }
        let y_end = y + &piece.slope * (&piece.end - &x);
        vertices.push((piece.end.clone(), y_end));
    }
    Ok(())
}
