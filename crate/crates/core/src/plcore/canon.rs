//! Canonical forms.

use std::collections::BTreeSet;

use super::map::{PlMap, Tail};
use super::segments::Segments;
use crate::rational::{exact_root, ExactRational};

/// Brings a (finite part, tail) pair into canonical form.
///
/// `finite` must start at `(0, 0)`; a geometric tail must start where the
/// finite part ends and satisfy the self-similarity constraint.
pub(crate) fn canonicalize(finite: Segments, tail: Tail) -> PlMap {
    match tail {
        Tail::Affine { slope } => canonical_affine(finite, slope),
        Tail::Geometric { base, pattern } => {
            if pattern.piece_count() <= 1 {
                // f(base*T) = base*f(T) with one slope forces f(T) = slope*T.
                let slope = pattern.slopes()[0].clone();
                return canonical_affine(finite, slope);
            }
            let draft = PlMap::from_parts(finite, Tail::Geometric { base, pattern });
            let base = minimal_base(&draft);
            match earliest_start(&draft, &base) {
                Some(start) => rebuild(&draft, base, start),
                None => {
                    let slope = draft.finite.slopes()[0].clone();
                    PlMap::linear(slope)
                }
            }
        }
    }
}

fn canonical_affine(finite: Segments, slope: ExactRational) -> PlMap {
    let mut vertices: Vec<_> = finite
        .xs()
        .iter()
        .cloned()
        .zip(finite.ys().iter().cloned())
        .collect();
    while vertices.len() >= 2 {
        let (x1, y1) = &vertices[vertices.len() - 1];
        let (x0, y0) = &vertices[vertices.len() - 2];
        if (y1 - y0) / (x1 - x0) != slope {
            break;
        }
        vertices.pop();
    }
    PlMap::from_parts(Segments::from_vertices(vertices), Tail::Affine { slope })
}

/// Smallest `mu` with `mu^k = base` such that the map is `mu`-self-similar
/// on its tail.
fn minimal_base(draft: &PlMap) -> ExactRational {
    let base = draft.tail.base().expect("geometric tail").clone();
    let max_k = draft.tail_start().numer().bits().max(base.numer().bits()) as u32;
    let max_k = max_k.max(base.denom().bits() as u32);
    for k in (2..=max_k).rev() {
        if let Some(mu) = exact_root(&base, k) {
            if self_similar_under(draft, &mu) {
                return mu;
            }
        }
    }
    base
}

/// Checks `f(mu*x) = mu*f(x)` on one period `[T, base*T]` of the tail,
/// which extends to all `x >= T` by self-similarity under `base`.
fn self_similar_under(draft: &PlMap, mu: &ExactRational) -> bool {
    let t = draft.tail_start();
    let base = draft.tail.base().unwrap();
    let end = t * base;
    let mut points: BTreeSet<ExactRational> = draft
        .vertices_through(&end)
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| x >= t)
        .collect();
    let scaled_start = mu * t;
    points.extend(
        draft
            .vertices_through(&(mu * &end))
            .into_iter()
            .filter(|(x, _)| *x >= scaled_start)
            .map(|(x, _)| x / mu),
    );
    points
        .iter()
        .all(|x| draft.value(&(mu * x)) == mu * draft.value(x))
}

/// Infimum of the points `t` with `f(base*x) = base*f(x)` for all `x >= t`,
/// or `None` when that holds down to 0 (the map is then linear).
fn earliest_start(draft: &PlMap, base: &ExactRational) -> Option<ExactRational> {
    let t = draft.tail_start().clone();
    let mut candidates: BTreeSet<ExactRational> = draft
        .vertices_through(&t)
        .into_iter()
        .map(|(x, _)| x)
        .collect();
    candidates.extend(
        draft
            .vertices_through(&(&t * base))
            .into_iter()
            .map(|(x, _)| x / base),
    );
    let mut current = t;
    for c in candidates.into_iter().rev() {
        if c >= current {
            continue;
        }
        if c == ExactRational::from_integer(0.into()) {
            return None;
        }
        if draft.value(&(base * &c)) != base * draft.value(&c) {
            return Some(current);
        }
        current = c;
    }
    None
}

fn rebuild(draft: &PlMap, base: ExactRational, start: ExactRational) -> PlMap {
    let end = &start * &base;
    let all = draft.vertices_through(&end);
    let f_start = draft.value(&start);
    let f_end = draft.value(&end);
    let finite = Segments::from_vertices(
        all.iter()
            .filter(|(x, _)| *x < start)
            .cloned()
            .chain(std::iter::once((start.clone(), f_start.clone()))),
    );
    let pattern = Segments::from_vertices(
        std::iter::once((start.clone(), f_start))
            .chain(all.iter().filter(|(x, _)| *x > start && *x < end).cloned())
            .chain(std::iter::once((end.clone(), f_end))),
    );
    if pattern.piece_count() <= 1 {
        let slope = pattern.slopes()[0].clone();
        return canonical_affine(finite, slope);
    }
    PlMap::from_parts(finite, Tail::Geometric { base, pattern })
}
