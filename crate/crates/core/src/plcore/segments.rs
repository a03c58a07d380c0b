use crate::rational::ExactRational;

/// A continuous, strictly increasing piecewise-linear path over a closed
/// interval, stored as its vertices.
///
/// Consecutive pieces never share a slope: collinear vertices are dropped on
/// construction, so every interior vertex is a genuine breakpoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segments {
    xs: Vec<ExactRational>,
    ys: Vec<ExactRational>,
    slopes: Vec<ExactRational>,
}

impl Segments {
    /// Single-vertex path (zero pieces).
    pub(crate) fn point(x: ExactRational, y: ExactRational) -> Self {
        Segments {
            xs: vec![x],
            ys: vec![y],
            slopes: Vec::new(),
        }
    }

    /// Builds a path through `points`, which must be sorted by strictly
    /// increasing `x` with strictly increasing `y`. Collinear interior
    /// vertices are removed. Duplicated abscissae are collapsed.
    pub(crate) fn from_vertices<I>(points: I) -> Self
    where
        I: IntoIterator<Item = (ExactRational, ExactRational)>,
    {
        let mut xs: Vec<ExactRational> = Vec::new();
        let mut ys: Vec<ExactRational> = Vec::new();
        let mut slopes: Vec<ExactRational> = Vec::new();
        for (x, y) in points {
            if let Some(last) = xs.last() {
                if *last == x {
                    continue;
                }
                let slope = (&y - ys.last().unwrap()) / (&x - last);
                if slopes.last() == Some(&slope) {
                    *xs.last_mut().unwrap() = x;
                    *ys.last_mut().unwrap() = y;
                    continue;
                }
                slopes.push(slope);
            }
            xs.push(x);
            ys.push(y);
        }
        assert!(!xs.is_empty(), "a path needs at least one vertex");
        Segments { xs, ys, slopes }
    }

    pub fn start(&self) -> &ExactRational {
        &self.xs[0]
    }

    pub fn end(&self) -> &ExactRational {
        self.xs.last().unwrap()
    }

    pub fn start_value(&self) -> &ExactRational {
        &self.ys[0]
    }

    pub fn end_value(&self) -> &ExactRational {
        self.ys.last().unwrap()
    }

    /// Vertex abscissae, including both endpoints.
    pub fn xs(&self) -> &[ExactRational] {
        &self.xs
    }

    /// Values at the vertices.
    pub fn ys(&self) -> &[ExactRational] {
        &self.ys
    }

    /// One slope per piece.
    pub fn slopes(&self) -> &[ExactRational] {
        &self.slopes
    }

    pub fn piece_count(&self) -> usize {
        self.slopes.len()
    }

    /// Value at `x`. Points outside `[start, end]` are extrapolated along
    /// the nearest piece.
    pub fn value_at(&self, x: &ExactRational) -> ExactRational {
        Self::interpolate(&self.xs, &self.ys, &self.slopes, x, false)
    }

    /// The unique `x` with `value_at(x) == y`.
    pub fn preimage(&self, y: &ExactRational) -> ExactRational {
        Self::interpolate(&self.ys, &self.xs, &self.slopes, y, true)
    }

    fn interpolate(
        keys: &[ExactRational],
        values: &[ExactRational],
        slopes: &[ExactRational],
        at: &ExactRational,
        inverse: bool,
    ) -> ExactRational {
        let i = keys.partition_point(|k| k < at);
        if i < keys.len() && keys[i] == *at {
            return values[i].clone();
        }
        if slopes.is_empty() {
            return values[0].clone();
        }
        let piece = i.saturating_sub(1).min(slopes.len() - 1);
        let delta = at - &keys[piece];
        let step = if inverse {
            delta / &slopes[piece]
        } else {
            delta * &slopes[piece]
        };
        &values[piece] + step
    }

    /// The inverse path: vertices swap coordinates and slopes invert.
    pub(crate) fn inverted(&self) -> Self {
        Segments {
            xs: self.ys.clone(),
            ys: self.xs.clone(),
            slopes: self.slopes.iter().map(|s| s.recip()).collect(),
        }
    }

    /// Vertices scaled by `factor` in both coordinates; slopes are unchanged.
    pub(crate) fn scaled(
        &self,
        factor: &ExactRational,
    ) -> impl Iterator<Item = (ExactRational, ExactRational)> + '_ {
        let factor = factor.clone();
        self.xs
            .iter()
            .zip(&self.ys)
            .map(move |(x, y)| (x * &factor, y * &factor))
    }
}
