//! Acceptance criteria, one line of output each. Exits nonzero if any fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, ToPrimitive, Zero};

use plq_core::plcore::{Piece, RawMap, RawTail};
use plq_core::rational::{int, rat};
use plq_core::suites::{closed_triple, next_outside_h, quotient_triple, sampling_horizon};
use plq_core::textio::{parse, serialize, ParseErrorKind};
use plq_core::witnesses::{center_witness, conjugation_check, Construction, SampleConfig, Sampler};
use plq_core::*;

const SEED: u64 = 20_240_611;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sampler(stream: u64) -> Sampler {
    Sampler::new(SampleConfig::with_seed(
        SEED ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    ))
    .unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit), || {
        format!("took {elapsed:.2?}, limit {limit} s")
    })
}

fn f64_of(r: &ExactRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

// 1. Bi-Lipschitz bound on 200 maps x 100 pairs.
fn bilipschitz() -> Outcome {
    let started = Instant::now();
    let mut s = sampler(1);
    let mut pairs = 0;
    for i in 0..200 {
        let f = s.next_map().map_err(|e| e.to_string())?;
        let k = bilip_constant(&f);
        // Independent K: the extreme slopes over every piece of the text form.
        let text = serialize(&f);
        let slopes: Vec<ExactRational> = text
            .lines()
            .filter_map(|l| {
                let t: Vec<&str> = l.split_whitespace().collect();
                match t.as_slice() {
                    ["piece", _, s] | ["tail", "slope", s] => {
                        Some(plq_core::rational::parse_rational(s).unwrap())
                    }
                    _ => None,
                }
            })
            .collect();
        let hi = slopes.iter().max().unwrap();
        let lo = slopes.iter().min().unwrap();
        let expected = [hi.clone(), lo.recip(), ExactRational::one()]
            .into_iter()
            .max()
            .unwrap();
        ensure(k == expected, || {
            format!("map {i}: K = {k}, slopes give {expected}")
        })?;
        let horizon = sampling_horizon(&f);
        let mut drawn = 0;
        while drawn < 100 {
            let x = s.point(&ExactRational::zero(), &horizon);
            let y = s.point(&ExactRational::zero(), &horizon);
            if x == y {
                continue;
            }
            drawn += 1;
            let dx = (&x - &y).abs();
            let dy = (evaluate(&f, &x).unwrap() - evaluate(&f, &y).unwrap()).abs();
            ensure(&dx / &k <= dy && dy <= &k * &dx, || {
                format!("map {i}: bound fails at x = {x}, y = {y}\n{text}")
            })?;
        }
        pairs += drawn;
    }
    within(started.elapsed(), 10)?;
    Ok(format!(
        "200 maps, {pairs} pairs, 0 failures, {:.2?}",
        started.elapsed()
    ))
}

/// Float evaluation from the vertex data, unrolling geometric tails by
/// repeated division; shares no code with the library's evaluator.
struct FloatMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    affine: Option<f64>,
    base: f64,
    pattern_xs: Vec<f64>,
    pattern_ys: Vec<f64>,
}

impl FloatMap {
    fn new(f: &PlMap) -> Self {
        let conv = |v: &[ExactRational]| v.iter().map(f64_of).collect::<Vec<_>>();
        let finite = f.finite();
        match f.tail() {
            Tail::Affine { slope } => FloatMap {
                xs: conv(finite.xs()),
                ys: conv(finite.ys()),
                affine: Some(f64_of(slope)),
                base: 1.0,
                pattern_xs: vec![],
                pattern_ys: vec![],
            },
            Tail::Geometric { base, pattern } => FloatMap {
                xs: conv(finite.xs()),
                ys: conv(finite.ys()),
                affine: None,
                base: f64_of(base),
                pattern_xs: conv(pattern.xs()),
                pattern_ys: conv(pattern.ys()),
            },
        }
    }

    fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
        let i = xs
            .windows(2)
            .position(|w| x <= w[1])
            .unwrap_or(xs.len() - 2);
        ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i])
    }

    /// `f(x)/x` for `x = base^k * u` with `u` in the first period.
    fn ratio_in_period(&self, k: i32, u: f64) -> f64 {
        let scale = self.base.powi(k);
        let fu = Self::interpolate(&self.pattern_xs, &self.pattern_ys, u);
        (scale * fu) / (scale * u)
    }

    fn ratio_affine(&self, x: f64) -> f64 {
        let t = *self.xs.last().unwrap();
        let ft = *self.ys.last().unwrap();
        (ft + self.affine.unwrap() * (x - t)) / x
    }
}

// 2. Shape of S_f and a float cross-check over periods 10..20.
fn s_shape() -> Outcome {
    let started = Instant::now();
    let mut s = sampler(2);
    let (mut intervals, mut worst) = (0, 0.0f64);
    for i in 0..200 {
        let f = s.next_map().map_err(|e| e.to_string())?;
        let k = bilip_constant(&f);
        let inv = s_invariant(&f);
        if let SInvariant::Interval { lo, hi } = &inv {
            ensure(lo < hi, || format!("map {i}: empty interval {inv}"))?;
            intervals += 1;
        }
        ensure(*inv.lo() >= k.recip() && *inv.hi() <= k, || {
            format!("map {i}: {inv} escapes [1/K, K] with K = {k}")
        })?;
        let fm = FloatMap::new(&f);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut record = |r: f64| {
            lo = lo.min(r);
            hi = hi.max(r);
        };
        match fm.affine {
            None => {
                let (t, end) = (fm.pattern_xs[0], *fm.pattern_xs.last().unwrap());
                for kk in 10..=20 {
                    for j in 0..64 {
                        record(fm.ratio_in_period(kk, t + (end - t) * j as f64 / 64.0));
                    }
                    for &u in &fm.pattern_xs {
                        record(fm.ratio_in_period(kk, u));
                    }
                }
            }
            Some(_) => {
                // No intrinsic period: use [16^k, 16^(k+1)].
                for kk in 10..=20 {
                    let a = 16f64.powi(kk);
                    for j in 0..=64 {
                        record(fm.ratio_affine(a + 15.0 * a * j as f64 / 64.0));
                    }
                }
            }
        }
        let err = (lo - f64_of(inv.lo()))
            .abs()
            .max((hi - f64_of(inv.hi())).abs());
        worst = worst.max(err);
        ensure(err <= 1e-9, || {
            format!(
                "map {i}: float extremes [{lo}, {hi}] vs exact {inv} (error {err:e})\n{}",
                serialize(&f)
            )
        })?;
    }
    within(started.elapsed(), 10)?;
    Ok(format!(
        "200 maps ({intervals} intervals), worst float deviation {worst:.1e}, {:.2?}",
        started.elapsed()
    ))
}

// 3. H is a proper normal subgroup.
fn normal_subgroup() -> Outcome {
    let mut s = sampler(3);
    for i in 0..100 {
        let f1 = s.next_in_h(false).map_err(|e| e.to_string())?;
        let f2 = s.next_in_h(false).map_err(|e| e.to_string())?;
        let p = compose(&f1, &f2).map_err(|e| format!("pair {i}: {e}"))?;
        ensure(in_h(&p) && in_h(&invert(&f1)), || {
            format!(
                "pair {i}: closure fails\n{}\n{}",
                serialize(&f1),
                serialize(&f2)
            )
        })?;
    }
    for i in 0..100 {
        let f = s.next_in_h(true).map_err(|e| e.to_string())?;
        let g = s.next_map().map_err(|e| e.to_string())?;
        let ok = conjugation_check(&f, &g).map_err(|e| format!("pair {i}: {e}"))?;
        // Cross-check the conjugate pointwise far out: (g⁻¹fg)(x)/x -> 1.
        let conj = compose(&invert(&g), &compose(&f, &g).unwrap()).unwrap();
        let x = sampling_horizon(&conj) * int(1 << 20);
        let r = f64_of(&(evaluate(&conj, &x).unwrap() / &x));
        ensure(ok && (r - 1.0).abs() < 1e-4, || {
            format!(
                "pair {i}: conjugate leaves H (ratio {r})\n{}\n{}",
                serialize(&f),
                serialize(&g)
            )
        })?;
    }
    for k in [rat(3, 2), int(2), int(5)] {
        ensure(!in_h(&PlMap::linear(k.clone())), || {
            format!("x -> {k}x reported in H")
        })?;
    }
    Ok("100 closure pairs, 100 conjugations, k in {3/2, 2, 5} outside H".into())
}

// 4. No power up to 8 of a class outside H lands in H.
fn torsion_free() -> Outcome {
    let started = Instant::now();
    let mut s = sampler(4);
    let (mut geometric, mut affine) = (0, 0);
    for i in 0..100 {
        let f = next_outside_h(&mut s).map_err(|e| e.to_string())?;
        if f.tail().is_geometric() {
            geometric += 1
        } else {
            affine += 1
        }
        let rows = torsion_order_check(&f, 8).map_err(|e| format!("map {i}: {e}"))?;
        ensure(
            rows.len() == 8 && rows.iter().all(|r| !r.in_h && !r.invariant.is_one()),
            || format!("map {i}: some power lies in H\n{}", serialize(&f)),
        )?;
    }
    within(started.elapsed(), 30)?;
    Ok(format!(
        "100 maps ({affine} affine, {geometric} geometric), r = 1..8 all outside H, {:.2?}",
        started.elapsed()
    ))
}

// 5. Center witness for linear maps.
fn center() -> Outcome {
    let check = |s: ExactRational| -> Result<(), String> {
        let f = PlMap::linear(s.clone());
        let b = center_witness(&f).map_err(|e| e.to_string())?;
        let g = &b.conjugator;
        let upper = (int(5) * &s - int(1)) / (int(4) * &s);
        let Tail::Geometric { base, pattern } = g.tail() else {
            return Err(format!("s = {s}: partner has no geometric tail"));
        };
        let mut slopes: Vec<_> = pattern.slopes().to_vec();
        slopes.sort();
        slopes.dedup();
        ensure(slopes == vec![rat(1, 2), upper.clone()], || {
            format!("s = {s}: pattern slopes {slopes:?}")
        })?;
        ensure(upper < rat(5, 4) && upper >= rat(1, 2), || {
            format!("s = {s}: slope {upper} out of range")
        })?;
        ensure(*base == int(3) * &s, || format!("s = {s}: base {base}"))?;
        ensure(g.finite().slopes().iter().all(|x| x.is_one()), || {
            format!("s = {s}: head is not the identity")
        })?;
        let gap = (&s - int(1)) / int(2);
        ensure(b.gaps.iter().all(|x| *x == gap), || {
            format!("s = {s}: gaps {:?}", b.gaps)
        })?;
        ensure(
            matches!(b.construction, Construction::Anchored { .. }),
            || "wrong construction".into(),
        )?;
        let fg = compose(&f, g).unwrap();
        let gf = compose(g, &f).unwrap();
        let d = coset_equivalent(&fg, &gf).map_err(|e| e.to_string())?;
        ensure(!d.equivalent() && d.gap() == Some(&gap), || {
            format!("s = {s}: verdict {d}")
        })?;
        for a in &b.anchors {
            // Conditions (b) and (c), and the non-commutation gap at each anchor.
            let fa = &s * a;
            ensure(evaluate(g, a).unwrap() == *a, || {
                format!("g moves anchor {a}")
            })?;
            ensure(evaluate(g, &fa).unwrap() == (a + &fa) / int(2), || {
                format!("g(f({a}))")
            })?;
            let diff = (evaluate(&fg, a).unwrap() - evaluate(&gf, a).unwrap()).abs() / a;
            ensure(diff == gap, || format!("gap at {a} is {diff}"))?;
        }
        if s == int(2) {
            let want: Vec<_> = [1, 6, 36, 216].into_iter().map(int).collect();
            ensure(b.anchors == want, || format!("anchors {:?}", b.anchors))?;
        }
        Ok(())
    };
    for s in [int(2), rat(3, 2), int(3), int(5)] {
        check(s)?;
    }
    Ok(
        "s = 2: slopes {1/2, 9/8}, anchors [1, 6, 36, 216], gap 1/2; s = 3/2, 3, 5: gap (s-1)/2"
            .into(),
    )
}

// 6. Group laws in G and in G/H.
fn algebra() -> Outcome {
    let mut s = sampler(6);
    for i in 0..100 {
        let [f, g, h] = closed_triple(&mut s).map_err(|e| e.to_string())?;
        let left =
            compose(&compose(&h, &g).unwrap(), &f).map_err(|e| format!("triple {i}: {e}"))?;
        let right =
            compose(&h, &compose(&g, &f).unwrap()).map_err(|e| format!("triple {i}: {e}"))?;
        ensure(maps_equal(&left, &right) == Ok(true), || {
            format!("triple {i}: not associative")
        })?;
        for m in [&f, &g, &h] {
            let inv = invert(m);
            let id = PlMap::identity();
            ensure(
                maps_equal(&compose(m, &inv).unwrap(), &id) == Ok(true)
                    && maps_equal(&compose(&inv, m).unwrap(), &id) == Ok(true),
                || format!("triple {i}: inverse law fails\n{}", serialize(m)),
            )?;
        }
        // Pointwise spot check of associativity, independent of maps_equal.
        let x = s.point(&ExactRational::zero(), &sampling_horizon(&left));
        let direct = evaluate(&h, &evaluate(&g, &evaluate(&f, &x).unwrap()).unwrap()).unwrap();
        ensure(evaluate(&left, &x).unwrap() == direct, || {
            format!("triple {i}: h(g(f({x})))")
        })?;
    }
    for i in 0..100 {
        let [p, q, r] = quotient_triple(&mut s).map_err(|e| e.to_string())?;
        let left = quotient_compose(&quotient_compose(&p, &q).unwrap(), &r)
            .map_err(|e| format!("triple {i}: {e}"))?;
        let right = quotient_compose(&p, &quotient_compose(&q, &r).unwrap())
            .map_err(|e| format!("triple {i}: {e}"))?;
        let d = coset_equivalent(&left, &right).map_err(|e| e.to_string())?;
        ensure(d.equivalent(), || format!("quotient triple {i}: {d}"))?;
    }
    Ok("100 closed triples, 100 quotient triples".into())
}

// 7. Corpus round trip.
fn corpus() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut entries: Vec<_> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    let (mut ok, mut err) = (0, 0);
    for path in &entries {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let parts: Vec<&str> = name.split("__").collect();
        match parts.as_slice() {
            ["ok", _] => {
                let f = parse(&text).map_err(|e| format!("{name}: {e}"))?;
                let canonical = serialize(&f);
                let back = parse(&canonical).map_err(|e| format!("{name}: reparse: {e}"))?;
                ensure(maps_equal(&back, &f) == Ok(true), || {
                    format!("{name}: round trip changed the map")
                })?;
                ensure(serialize(&back) == canonical, || {
                    format!("{name}: serializer not byte-stable")
                })?;
                ok += 1;
            }
            ["err", kind, line, _] => {
                let e = match parse(&text) {
                    Ok(_) => return Err(format!("{name}: parsed but should fail")),
                    Err(e) => e,
                };
                let got = match &e.kind {
                    ParseErrorKind::Syntax(_) => "syntax",
                    ParseErrorKind::Invalid(v) => match v {
                        Error::NonMonotoneBreakpoints { .. } => "non_monotone",
                        Error::NonPositiveSlope { .. } => "non_positive_slope",
                        Error::GeometricConsistencyViolation { .. } => "geometric_consistency",
                        Error::PatternSpan { .. } => "pattern_span",
                        Error::EmptyMap(_) => "empty_map",
                        Error::InvalidBase(_) => "invalid_base",
                        Error::GeometricTailAtOrigin => "geometric_at_origin",
                        _ => "other",
                    },
                };
                ensure(
                    got == *kind && e.line.to_string() == *line && e.line >= 1,
                    || format!("{name}: got {got} at line {} ({e})", e.line),
                )?;
                err += 1;
            }
            _ => return Err(format!("{name}: unrecognized corpus file name")),
        }
    }
    ensure(entries.len() == 50, || {
        format!("corpus has {} files", entries.len())
    })?;
    Ok(format!(
        "{ok} valid files round-trip byte-stably, {err} rejections located"
    ))
}

// 8. Desk values for the geometric example.
fn desk_values() -> Outcome {
    let f = PlMap::validate(&RawMap {
        pieces: vec![Piece::new(int(1), int(1))],
        tail: Some(RawTail::Geometric {
            base: int(2),
            pattern: vec![
                Piece::new(rat(3, 2), rat(1, 2)),
                Piece::new(int(2), rat(3, 2)),
            ],
        }),
    })
    .map_err(|e| e.to_string())?;
    // Unrolling by hand: 6 = 4 * 3/2, f(3/2) = 1 + (1/2)(1/2) = 5/4, so f(6) = 4 * 5/4.
    let six = evaluate(&f, &int(6)).map_err(|e| e.to_string())?;
    ensure(six == int(5), || format!("f(6) = {six}"))?;
    let inv = s_invariant(&f);
    ensure(
        inv == SInvariant::Interval {
            lo: rat(5, 6),
            hi: int(1),
        },
        || format!("S = {inv}"),
    )?;
    // f(x)/x over a period: 1 at x = 1, 5/6 at x = 3/2, 1 at x = 2.
    let fm = FloatMap::new(&f);
    let mut lo = f64::INFINITY;
    for j in 0..=6400 {
        lo = lo.min(fm.ratio_in_period(10, 1.0 + j as f64 / 6400.0));
    }
    ensure((lo - 5.0 / 6.0).abs() < 1e-12, || {
        format!("float minimum {lo}")
    })?;
    Ok("f(6) = 5, S = interval 5/6 1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bi-Lipschitz bound", bilipschitz),
        ("shape of S_f and float cross-check", s_shape),
        ("H is a proper normal subgroup", normal_subgroup),
        ("torsion-freeness of G/H", torsion_free),
        ("center witness", center),
        ("group algebra", algebra),
        ("text format round trip", corpus),
        ("geometric example desk values", desk_values),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: panicked", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
