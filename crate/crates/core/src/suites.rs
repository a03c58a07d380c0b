//! Seeded property suites, one per structural result about `G` and `G/H`.
//!
//! | suite       | checks                                                        |
//! |-------------|---------------------------------------------------------------|
//! | `bilip`     | bounded slopes give a two-sided Lipschitz bound               |
//! | `subgroup`  | `H` is closed under composition and inverse, and proper       |
//! | `normal`    | `g⁻¹ f g` stays in `H` for `f` in `H`                         |
//! | `torsion`   | no power of a class outside `H` lands in `H`                  |
//! | `center`    | every non-identity class has a non-commuting partner          |
//! | `algebra`   | associativity and inverse laws, in `G` and in `G/H`           |
//! | `roundtrip` | the text format round-trips and is byte-stable                |
//!
//! Every sample draws from its own sampler seeded from the suite seed and
//! the sample index, so reports do not depend on evaluation order.

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};

use crate::asymptotics::{
    coset_equivalent, in_h, quotient_compose, s_invariant, torsion_order_check,
};
use crate::error::Result;
use crate::plcore::{bilip_constant, compose, invert, maps_equal, slope_bounds, PlMap, Tail};
use crate::rational::{int, rat, show, ExactRational};
use crate::textio::{parse, serialize};
use crate::witnesses::{center_witness, Construction, SampleConfig, Sampler, TailKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Bilip,
    Subgroup,
    Normal,
    Torsion,
    Center,
    Algebra,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Bilip,
        Suite::Subgroup,
        Suite::Normal,
        Suite::Torsion,
        Suite::Center,
        Suite::Algebra,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bilip => "bilip",
            Suite::Subgroup => "subgroup",
            Suite::Normal => "normal",
            Suite::Torsion => "torsion",
            Suite::Center => "center",
            Suite::Algebra => "algebra",
            Suite::Roundtrip => "roundtrip",
        }
    }

    fn tag(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64 + 1
    }
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub sample: usize,
    pub seed: u64,
    pub invariant: String,
    /// Serialized maps involved, separated by blank lines.
    pub counterexample: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub samples: usize,
    pub failures: Vec<Failure>,
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} samples {:>5}  failures {}",
            self.name,
            self.samples,
            self.failures.len()
        )
    }
}

/// Seed for sample `index` of `suite` (splitmix64 finalizer).
pub fn sample_seed(seed: u64, suite: Suite, index: usize) -> u64 {
    let mut z = seed
        .wrapping_add(suite.tag().wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Point-pairs drawn per map by the `bilip` suite.
pub const PAIRS_PER_MAP: usize = 100;

/// Largest power checked by the `torsion` suite.
pub const TORSION_DEPTH: u32 = 8;

struct Check {
    failures: Vec<(String, Vec<PlMap>)>,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, invariant: impl Into<String>, maps: &[&PlMap]) {
        if !ok {
            self.failures.push((
                invariant.into(),
                maps.iter().map(|m| (*m).clone()).collect(),
            ));
        }
    }

    fn expect_ok<T>(&mut self, r: Result<T>, invariant: &str, maps: &[&PlMap]) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.expect(false, format!("{invariant}: {e}"), maps);
                None
            }
        }
    }
}

/// Runs `samples` samples of one suite.
pub fn run_suite(suite: Suite, seed: u64, samples: usize) -> SuiteReport {
    let started = Instant::now();
    let mut failures = Vec::new();
    for index in 0..samples {
        let s = sample_seed(seed, suite, index);
        let mut check = Check::new();
        match Sampler::new(SampleConfig::with_seed(s)) {
            Ok(mut sampler) => {
                if let Err(e) = run_sample(suite, &mut sampler, &mut check) {
                    check.expect(false, format!("sampling failed: {e}"), &[]);
                }
            }
            Err(e) => check.expect(
                false,
                format!("sampler rejected its configuration: {e}"),
                &[],
            ),
        }
        failures.extend(check.failures.into_iter().map(|(invariant, maps)| Failure {
            sample: index,
            seed: s,
            invariant,
            counterexample: maps.iter().map(serialize).collect::<Vec<_>>().join("\n"),
        }));
    }
    SuiteReport {
        name: suite.name(),
        samples,
        failures,
        wall_time: started.elapsed(),
    }
}

fn run_sample(suite: Suite, sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    match suite {
        Suite::Bilip => bilip(sampler, check),
        Suite::Subgroup => subgroup(sampler, check),
        Suite::Normal => normal(sampler, check),
        Suite::Torsion => torsion(sampler, check),
        Suite::Center => center(sampler, check),
        Suite::Algebra => algebra(sampler, check),
        Suite::Roundtrip => roundtrip(sampler, check),
    }
}

/// Upper end of a sampling window covering the finite part and two tail periods.
pub fn sampling_horizon(f: &PlMap) -> ExactRational {
    let reach = if *f.tail_start() > ExactRational::one() {
        f.tail_start().clone()
    } else {
        ExactRational::one()
    };
    match f.tail().base() {
        Some(b) => reach * b * b * int(2),
        None => reach * int(4),
    }
}

fn bilip(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f = sampler.next_map()?;
    let k = bilip_constant(&f);
    let bounds = slope_bounds(&f);
    check.expect(
        k >= ExactRational::one()
            && k >= bounds.max_slope
            && k * &bounds.min_slope >= ExactRational::one(),
        "K dominates the slope set",
        &[&f],
    );
    let k = bilip_constant(&f);
    let hi = sampling_horizon(&f);
    for _ in 0..PAIRS_PER_MAP {
        let x = sampler.point(&ExactRational::zero(), &hi);
        let y = sampler.point(&ExactRational::zero(), &hi);
        if x == y {
            continue;
        }
        let dx = (&x - &y).abs();
        let dy = (f.value(&x) - f.value(&y)).abs();
        if !(dx <= &dy * &k && dy <= &dx * &k) {
            check.expect(
                false,
                format!(
                    "bi-Lipschitz bound with K = {} at x = {}, y = {}",
                    show(&k),
                    show(&x),
                    show(&y)
                ),
                &[&f],
            );
            break;
        }
        if (x < y) != (f.value(&x) < f.value(&y)) {
            check.expect(
                false,
                format!("monotonicity at {} and {}", show(&x), show(&y)),
                &[&f],
            );
            break;
        }
    }
    Ok(())
}

fn subgroup(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f1 = sampler.next_in_h(false)?;
    let f2 = sampler.next_in_h(false)?;
    if let Some(p) = check.expect_ok(compose(&f1, &f2), "composition of H-members", &[&f1, &f2]) {
        check.expect(in_h(&p), "H is closed under composition", &[&f1, &f2]);
    }
    check.expect(in_h(&invert(&f1)), "H is closed under inversion", &[&f1]);
    let k = ExactRational::one() + sampler.point(&rat(1, 64), &int(4));
    let scaling = PlMap::linear(k.clone());
    check.expect(
        !in_h(&scaling),
        format!("x -> {}x lies outside H", show(&k)),
        &[&scaling],
    );
    Ok(())
}

fn normal(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f = sampler.next_in_h(true)?;
    let g = sampler.next_map()?;
    if let Some(ok) = check.expect_ok(
        crate::witnesses::conjugation_check(&f, &g),
        "conjugation",
        &[&f, &g],
    ) {
        check.expect(ok, "g^-1 f g lies in H", &[&f, &g]);
    }
    Ok(())
}

/// A sampled map outside `H`.
pub fn next_outside_h(sampler: &mut Sampler) -> Result<PlMap> {
    loop {
        let f = sampler.next_map()?;
        if !in_h(&f) {
            return Ok(f);
        }
    }
}

fn torsion(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f = next_outside_h(sampler)?;
    if let Some(rows) = check.expect_ok(torsion_order_check(&f, TORSION_DEPTH), "powers", &[&f]) {
        for row in rows.iter().filter(|r| r.in_h) {
            check.expect(
                false,
                format!("power {} of a class outside H lies in H", row.power),
                &[&f],
            );
        }
    }
    Ok(())
}

fn center(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f = next_outside_h(sampler)?;
    let Some(bundle) = check.expect_ok(center_witness(&f), "witness construction", &[&f]) else {
        return Ok(());
    };
    let g = &bundle.conjugator;
    let target = &bundle.target;
    check.expect(
        !bundle.verdict.equivalent(),
        "f∘g and g∘f lie in different cosets",
        &[&f, g],
    );
    let gap = bundle
        .verdict
        .gap()
        .cloned()
        .unwrap_or_else(ExactRational::zero);
    check.expect(
        gap.is_positive() && bundle.gaps.iter().all(|x| *x == gap),
        "anchor gaps are equal to the certified gap",
        &[&f, g],
    );
    if let Construction::Anchored { slope } = &bundle.construction {
        let half = rat(1, 2);
        let upper = (int(5) * slope - int(1)) / (int(4) * slope);
        let slopes: Vec<_> = g.slopes().cloned().collect();
        check.expect(
            slopes
                .iter()
                .all(|s| *s == half || *s == upper || s.is_one())
                && upper < rat(5, 4),
            "partner slopes lie in {1/2, (5s-1)/(4s)} inside [1/2, 5/4]",
            &[&f, g],
        );
        check.expect(
            gap == (slope - int(1)) / int(2),
            "gap equals (s-1)/2",
            &[&f, g],
        );
        let a1 = &bundle.anchors[0];
        check.expect(
            g.finite().slopes().iter().all(|s| s.is_one()) && g.tail_start() == a1,
            "partner is the identity on [0, a_1]",
            &[&f, g],
        );
        for pair in bundle.anchors.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            check.expect(
                g.value(a) == *a && g.value(b) == *b,
                "partner fixes the anchors",
                &[&f, g],
            );
            check.expect(*b >= int(3) * target.value(a), "a_{k+1} >= 3 f(a_k)", &[&f]);
            let fa = target.value(a);
            check.expect(
                g.value(&fa) == (a + &fa) / int(2),
                "partner sends f(a_k) to (a_k + f(a_k))/2",
                &[&f, g],
            );
        }
    }
    Ok(())
}

/// Three maps whose pairwise compositions stay representable: either all
/// with affine tails, or all with linear or geometric tails over scales
/// from one commensurable family.
pub fn closed_triple(sampler: &mut Sampler) -> Result<[PlMap; 3]> {
    let family = [[rat(2, 1), rat(4, 1)], [rat(3, 2), rat(9, 4)]][sampler.pick(2)].clone();
    let affine = sampler.pick(2) == 0;
    let draw = |sampler: &mut Sampler| -> Result<PlMap> {
        if affine {
            let mut s = Sampler::new(
                SampleConfig::with_seed(sampler.pick(1 << 30) as u64).with_tail(TailKind::Affine),
            )?;
            s.next_map()
        } else if sampler.pick(3) == 0 {
            let mut s = Sampler::new(
                SampleConfig::with_seed(sampler.pick(1 << 30) as u64).with_tail(TailKind::Linear),
            )?;
            s.next_map()
        } else {
            let base = family[sampler.pick(2)].clone();
            sampler.geometric(&base)
        }
    };
    Ok([draw(sampler)?, draw(sampler)?, draw(sampler)?])
}

/// Three maps with commensurable geometric scales (any affine intercepts).
pub fn quotient_triple(sampler: &mut Sampler) -> Result<[PlMap; 3]> {
    let family = [[rat(2, 1), rat(4, 1)], [rat(3, 2), rat(9, 4)]][sampler.pick(2)].clone();
    let draw = |sampler: &mut Sampler| -> Result<PlMap> {
        if sampler.pick(2) == 0 {
            let kind = [TailKind::Affine, TailKind::Linear][sampler.pick(2)];
            Sampler::new(SampleConfig::with_seed(sampler.pick(1 << 30) as u64).with_tail(kind))?
                .next_map()
        } else {
            let base = family[sampler.pick(2)].clone();
            sampler.geometric(&base)
        }
    };
    Ok([draw(sampler)?, draw(sampler)?, draw(sampler)?])
}

fn algebra(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let [f, g, h] = closed_triple(sampler)?;
    let maps = [&f, &g, &h];
    let left = compose(&h, &g).and_then(|hg| compose(&hg, &f));
    let right = compose(&g, &f).and_then(|gf| compose(&h, &gf));
    if let (Some(l), Some(r)) = (
        check.expect_ok(left, "(h∘g)∘f", &maps),
        check.expect_ok(right, "h∘(g∘f)", &maps),
    ) {
        let eq = check.expect_ok(maps_equal(&l, &r), "comparing both bracketings", &maps);
        check.expect(eq == Some(true), "composition is associative", &maps);
    }
    for m in maps {
        let inv = invert(m);
        for (label, composite) in [("f∘f⁻¹", compose(m, &inv)), ("f⁻¹∘f", compose(&inv, m))]
        {
            if let Some(c) = check.expect_ok(composite, label, &[m]) {
                check.expect(c.is_identity(), format!("{label} is the identity"), &[m]);
            }
        }
    }
    let [p, q, r] = quotient_triple(sampler)?;
    let maps = [&p, &q, &r];
    let left = quotient_compose(&p, &q).and_then(|pq| quotient_compose(&pq, &r));
    let right = quotient_compose(&q, &r).and_then(|qr| quotient_compose(&p, &qr));
    if let (Some(l), Some(rr)) = (
        check.expect_ok(left, "quotient (pq)r", &maps),
        check.expect_ok(right, "quotient p(qr)", &maps),
    ) {
        let eq = check.expect_ok(
            coset_equivalent(&l, &rr),
            "comparing quotient bracketings",
            &maps,
        );
        check.expect(
            eq.is_some_and(|d| d.equivalent()),
            "quotient composition is associative modulo H",
            &maps,
        );
        check.expect(
            s_invariant(&l) == s_invariant(&rr),
            "equivalent representatives share S",
            &maps,
        );
    }
    Ok(())
}

fn roundtrip(sampler: &mut Sampler, check: &mut Check) -> Result<()> {
    let f = sampler.next_map()?;
    let text = serialize(&f);
    match parse(&text) {
        Ok(back) => {
            let eq = check.expect_ok(maps_equal(&back, &f), "comparing parsed map", &[&f]);
            check.expect(eq == Some(true), "parse(serialize(f)) equals f", &[&f]);
            check.expect(
                serialize(&back) == text,
                "serialization is byte-stable",
                &[&f],
            );
        }
        Err(e) => check.expect(false, format!("serialized map failed to parse: {e}"), &[&f]),
    }
    if let Tail::Geometric { base, .. } = f.tail() {
        let t = f.tail_start();
        check.expect(
            f.value(&(base * t)) == base * f.value(t),
            "geometric consistency",
            &[&f],
        );
    }
    Ok(())
}
