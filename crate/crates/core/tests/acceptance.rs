//! Acceptance suite: one PASS/FAIL line per criterion. Every expected value
//! is recomputed here by direct loops over the composition tables rather
//! than taken from the library.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use phase_criterion::criterion::{
    check_applicability, construct_phase_object, obstruction_report, revalidate, Condition, DualMode, InputBundle,
    Options,
};
use phase_criterion::decomposition::{decompose_module, regular_representation};
use phase_criterion::duality::character_group;
use phase_criterion::filtration::{ascending_filtration, FiltrationMode};
use phase_criterion::forced::BulletStatus;
use phase_criterion::format::{
    parse_module_bytes, parse_structure, parse_structure_bytes, serialize_module, serialize_structure,
};
use phase_criterion::phase::conductor_for;
use phase_criterion::report::{build_report, forced_text};
use phase_criterion::rigidity::equivalence_oracle;
use phase_criterion::witness::{replay, ReplayOutcome};
use phase_criterion::{library, CyclotomicField, CyclotomicScalar, ElementId, InteractionStructure};

const CONSISTENCY_LIMIT: Duration = Duration::from_secs(10);
const FOURIER_LIMIT: Duration = Duration::from_secs(5);
const CENSUS_LIMIT: Duration = Duration::from_secs(30);
const CENSUS_MAX_SIZE: usize = 8;
const CENSUS_BOUND: usize = 24;
const FUZZ_CASES: usize = 10_000;
const FUZZ_SEED: u64 = 0x5eed_f00d;

const CORPUS: [&str; 10] = ["z2", "z3", "z4", "z8", "v4", "z2xz4", "q8", "d4", "s3", "heis3"];

type Set = BTreeSet<usize>;

// ---------------------------------------------------------------------------
// Table oracles

struct Table {
    n: usize,
    op: Vec<usize>,
}

impl Table {
    fn of(s: &InteractionStructure) -> Self {
        Self {
            n: s.elements.len(),
            op: s.op.iter().map(|e| e.0).collect(),
        }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.op[a * self.n + b]
    }

    fn identity(&self) -> usize {
        (0..self.n)
            .find(|&e| (0..self.n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
            .expect("group fixture")
    }

    fn inv(&self, a: usize) -> usize {
        let e = self.identity();
        (0..self.n).find(|&b| self.mul(a, b) == e).expect("group fixture")
    }

    /// `a·b·(b·a)⁻¹`
    fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.inv(self.mul(b, a)))
    }

    fn center(&self) -> Set {
        (0..self.n)
            .filter(|&a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
            .collect()
    }

    /// Upper central series from the centre until it stops growing.
    fn upper_central_series(&self) -> Vec<Set> {
        let mut series = vec![self.center()];
        loop {
            let last = series.last().unwrap();
            let next: Set = (0..self.n)
                .filter(|&p| (0..self.n).all(|x| last.contains(&self.commutator(p, x))))
                .collect();
            if &next == last {
                return series;
            }
            series.push(next);
        }
    }

    fn is_homomorphism(&self, map: &[usize]) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| map[self.mul(a, b)] == self.mul(map[a], map[b])))
    }
}

fn to_set(set: &BTreeSet<ElementId>) -> Set {
    set.iter().map(|p| p.0).collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// ---------------------------------------------------------------------------
// Harness

fn run(index: usize, title: &str, body: impl FnOnce() -> Result<String, String>) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let message = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {message}"))
    });
    let elapsed = start.elapsed();
    let (mark, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{mark} [{index}] {title} ({:.2} s): {detail}", elapsed.as_secs_f64());
    outcome.is_ok()
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

// ---------------------------------------------------------------------------
// 1. check ⇔ construct

struct Expectation {
    duality: bool,
    symmetry: bool,
    termination: bool,
    depth: Option<usize>,
}

/// Expected verdicts from the tables alone: canonical duality always holds
/// for a group, symmetry holds when every dynamic is a homomorphism that
/// keeps any declared dual stable, and termination holds when the upper central series covers the group.
fn expectation(bundle: &InputBundle, mode: DualMode) -> Expectation {
    let s = &bundle.structure;
    let t = Table::of(s);
    let series = t.upper_central_series();
    let covers = series.last().unwrap().len() == t.n;
    let declared_rows = match (mode, &bundle.declared) {
        (DualMode::Declared, Some(declared)) => Some(declared.pairing.rows()),
        _ => None,
    };
    // a declared dual must also be carried onto itself: each label pulled
    // back along the dynamic is again a declared label
    let symmetry = s.dynamics.iter().all(|d| {
        let map: Vec<usize> = d.map.iter().map(|p| p.0).collect();
        let stable = declared_rows.is_none_or(|rows| {
            let labels = rows.first().map_or(0, Vec::len);
            (0..labels).all(|l| (0..labels).any(|m| (0..t.n).all(|p| rows[map[p]][l] == rows[p][m])))
        });
        t.is_homomorphism(&map) && stable
    });
    let duality = match (mode, &bundle.declared) {
        (DualMode::Declared, Some(declared)) => {
            // some non-identity element with an all-zero response row
            let e = t.identity();
            let rows = declared.pairing.rows();
            let invisible = (0..t.n).any(|p| p != e && rows[p].iter().all(|a| a.to_string() == "0"));
            !invisible
        }
        _ => true,
    };
    Expectation {
        duality,
        symmetry,
        termination: covers,
        depth: covers.then(|| series.len() - 1),
    }
}

fn consistency() -> Result<String, String> {
    let start = Instant::now();
    let mut cases: Vec<(String, InputBundle, Option<DualMode>)> = CORPUS
        .iter()
        .map(|stem| {
            (
                stem.to_string(),
                common::load_structure(&format!("{stem}.structure")),
                None,
            )
        })
        .collect();
    for extra in ["q8-pulled-back", "z4-bad-dynamic", "z4-half-dual"] {
        let bundle = common::load_structure(&format!("{extra}.structure"));
        cases.push((format!("{extra}/default"), bundle.clone(), None));
        cases.push((format!("{extra}/canonical"), bundle, Some(DualMode::Canonical)));
    }
    let mut passed = 0;
    for (name, bundle, dual) in &cases {
        let options = Options {
            dual: *dual,
            ..Options::default()
        };
        let report = check_applicability(bundle, &options).map_err(|e| format!("{name}: {e}"))?;
        let exp = expectation(bundle, options.resolve_dual(bundle));
        ensure(report.duality.passed == exp.duality, || {
            format!("{name}: duality verdict")
        })?;
        if exp.duality {
            ensure(report.symmetry_passed() == exp.symmetry, || {
                format!("{name}: symmetry verdict")
            })?;
        }
        ensure(report.termination.passed() == exp.termination, || {
            format!("{name}: termination verdict")
        })?;
        if let Some(d) = exp.depth {
            ensure(report.filtration.depth() == d, || {
                format!("{name}: depth {} != {d}", report.filtration.depth())
            })?;
        }
        let expected_overall = exp.duality && exp.symmetry && exp.termination;
        ensure(report.overall == expected_overall, || {
            format!("{name}: overall verdict")
        })?;
        match construct_phase_object(bundle, &options) {
            Ok(object) => {
                ensure(report.overall, || format!("{name}: constructed despite FAIL"))?;
                revalidate(&object).map_err(|e| format!("{name}: revalidation: {e}"))?;
                passed += 1;
            }
            Err(e) => ensure(!report.overall, || format!("{name}: PASS but construction failed: {e}"))?,
        }
    }
    // the verdicts the criterion text pins by name
    let verdict = |stem: &str, dual: Option<DualMode>| {
        let bundle = common::load_structure(&format!("{stem}.structure"));
        check_applicability(
            &bundle,
            &Options {
                dual,
                ..Options::default()
            },
        )
        .unwrap()
    };
    for stem in ["z2", "z3", "z4", "z8", "v4", "z2xz4"] {
        ensure(verdict(stem, None).overall, || format!("{stem} should PASS"))?;
    }
    for stem in ["q8", "d4", "heis3"] {
        let r = verdict(stem, None);
        ensure(r.termination.passed() && r.filtration.depth() == 1, || {
            format!("{stem}: termination at depth 1")
        })?;
    }
    let s3 = verdict("s3", None);
    ensure(s3.failed_conditions() == vec![Condition::Termination], || {
        "s3 should fail termination only".into()
    })?;
    let declared = verdict("q8-pulled-back", None);
    let canonical = verdict("q8-pulled-back", Some(DualMode::Canonical));
    ensure(!declared.duality.passed && canonical.duality.passed, || {
        "q8 duality should depend on the dual mode".into()
    })?;
    within(start, CONSISTENCY_LIMIT)?;
    Ok(format!(
        "{} cases agree, {passed} constructed and re-validated",
        cases.len()
    ))
}

// ---------------------------------------------------------------------------
// 2. ascending levels = upper central series

fn filtration_truth() -> Result<String, String> {
    for stem in CORPUS {
        let s = common::load_structure(&format!("{stem}.structure")).structure;
        let f = ascending_filtration(&s, FiltrationMode::Ascending).map_err(|e| e.to_string())?;
        let levels: Vec<Set> = f.levels.iter().map(to_set).collect();
        let series = Table::of(&s).upper_central_series();
        ensure(levels == series, || format!("{stem}: {levels:?} != {series:?}"))?;
    }
    let sized = |stem: &str| -> Vec<usize> {
        let s = common::load_structure(&format!("{stem}.structure")).structure;
        Table::of(&s).upper_central_series().iter().map(Set::len).collect()
    };
    let q8 = common::load_structure("q8.structure").structure;
    let q8_center: Set = ["1", "-1"].iter().map(|t| q8.find(t).unwrap().0).collect();
    ensure(Table::of(&q8).center() == q8_center, || {
        "q8 centre should be {±1}".into()
    })?;
    let d4 = common::load_structure("d4.structure").structure;
    let d4_center: Set = ["e", "r2"].iter().map(|t| d4.find(t).unwrap().0).collect();
    ensure(Table::of(&d4).center() == d4_center, || {
        "d4 centre should be {e,r2}".into()
    })?;
    ensure(sized("q8") == [2, 8] && sized("d4") == [2, 8], || {
        "q8/d4 series shape".into()
    })?;
    ensure(sized("s3") == [1], || "s3 should stall at {e}".into())?;
    ensure(sized("heis3") == [3, 27], || "heis3 series shape".into())?;
    Ok(format!("{} fixtures match exactly", CORPUS.len()))
}

// ---------------------------------------------------------------------------
// 3. Fourier decomposition of Z_n

/// Product in the group algebra of `Z_n`, by cyclic convolution.
fn convolve(
    field: &std::sync::Arc<CyclotomicField>,
    a: &[CyclotomicScalar],
    b: &[CyclotomicScalar],
) -> Vec<CyclotomicScalar> {
    let n = a.len();
    let mut out = vec![CyclotomicScalar::zero(field); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n {
            out[(i + j) % n] = &out[(i + j) % n] + &(&a[i] * &b[j]);
        }
    }
    out
}

fn fourier() -> Result<String, String> {
    let start = Instant::now();
    for n in 2..=12 {
        let z = library::cyclic(n);
        let (_, pairing) = character_group(&z).map_err(|e| e.to_string())?;
        let field = CyclotomicField::new(conductor_for(pairing.rows().iter().flatten().copied()));
        let reg = regular_representation(&z, &field);
        let d = decompose_module(&z, &pairing, &reg).map_err(|e| format!("Z{n}: {e}"))?;
        ensure(d.verified(), || format!("Z{n}: library verification failed"))?;
        ensure(d.bases.len() == n && d.bases.iter().all(|b| b.len() == 1), || {
            format!("Z{n}: component dimensions")
        })?;

        let e = &d.idempotents.coefficients;
        let zero = vec![CyclotomicScalar::zero(&field); n];
        let mut unit = zero.clone();
        unit[0] = CyclotomicScalar::one(&field);
        let mut total = zero.clone();
        for x in 0..n {
            for y in 0..n {
                let product = convolve(&field, &e[x], &e[y]);
                let expected = if x == y { &e[x] } else { &zero };
                ensure(&product == expected, || format!("Z{n}: E{x}·E{y}"))?;
            }
            total = total.iter().zip(&e[x]).map(|(a, b)| a + b).collect();
        }
        ensure(total == unit, || format!("Z{n}: ΣE ≠ 1"))?;
    }
    within(start, FOURIER_LIMIT)?;
    Ok("Z2..Z12: n components of dimension 1, identities exact".into())
}

// ---------------------------------------------------------------------------
// 4. obstruction witnesses

fn field_of<'a>(replay: &'a str, key: &str) -> Option<&'a str> {
    replay
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

fn witnesses() -> Result<String, String> {
    let cases = [
        ("s3", Condition::Termination),
        ("q8-pulled-back", Condition::Duality),
        ("z4-bad-dynamic", Condition::Symmetry),
    ];
    let mut lines = Vec::new();
    for (stem, condition) in cases {
        let bundle = common::load_structure(&format!("{stem}.structure"));
        let report = check_applicability(&bundle, &Options::default()).map_err(|e| e.to_string())?;
        let found = obstruction_report(&bundle, &report).map_err(|e| e.to_string())?;
        let w = found
            .iter()
            .find(|w| w.condition == condition)
            .ok_or_else(|| format!("{stem}: no {condition} witness"))?;
        let outcome = replay(&bundle, &w.replay);
        ensure(outcome == ReplayOutcome::Confirmed, || {
            format!("{stem}: replay {outcome}")
        })?;

        let s = &bundle.structure;
        let t = Table::of(s);
        let id = |key: &str| field_of(&w.replay, key).and_then(|tok| s.find(tok)).map(|p| p.0);
        match condition {
            Condition::Termination => {
                let series = t.upper_central_series();
                let excluded = id("excluded").ok_or("s3: no excluded element")?;
                ensure(!series.last().unwrap().contains(&excluded), || {
                    "s3: excluded element is reached".into()
                })?;
            }
            Condition::Duality => {
                let p = id("p").ok_or("q8: no invisible element")?;
                ensure(s.name_of(ElementId(p)) == "-1", || "q8: witness should be -1".into())?;
                let rows = bundle.declared.as_ref().unwrap().pairing.rows();
                ensure(rows[p].iter().all(|a| a.to_string() == "0"), || {
                    "q8: -1 is visible".into()
                })?;
            }
            Condition::Symmetry => {
                let g = s
                    .dynamic(field_of(&w.replay, "dynamic").unwrap_or(""))
                    .ok_or("z4: no dynamic")?;
                let (a, b) = (id("a").ok_or("z4: no a")?, id("b").ok_or("z4: no b")?);
                ensure((a, b) == (1, 1), || "z4: witness should be (g,1,1)".into())?;
                let map = |x: usize| g.map[x].0;
                ensure(map(t.mul(a, b)) != t.mul(map(a), map(b)), || {
                    "z4: g is multiplicative at (1,1)".into()
                })?;
            }
        }
        lines.push(format!("{stem}: `{}`", w.replay));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------------------
// 5. census of interaction-and-defect-preserving bijections

/// All bijections `s → t` preserving composition and commutator, by direct
/// backtracking over image assignments.
fn preserving_bijections(s: &Table, t: &Table) -> Vec<Vec<usize>> {
    fn extend(s: &Table, t: &Table, map: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let k = map.len();
        if k == s.n {
            let defect_ok = (0..s.n).all(|a| (0..s.n).all(|b| map[s.commutator(a, b)] == t.commutator(map[a], map[b])));
            if defect_ok {
                out.push(map.clone());
            }
            return;
        }
        for image in 0..t.n {
            if used[image] {
                continue;
            }
            map.push(image);
            let consistent = (0..=k).all(|a| {
                [(a, k), (k, a)].iter().all(|&(x, y)| {
                    let xy = s.mul(x, y);
                    xy > k || map[xy] == t.mul(map[x], map[y])
                })
            });
            if consistent {
                used[image] = true;
                extend(s, t, map, used, out);
                used[image] = false;
            }
            map.pop();
        }
    }
    let mut out = Vec::new();
    if s.n == t.n {
        extend(s, t, &mut Vec::with_capacity(s.n), &mut vec![false; t.n], &mut out);
    }
    out
}

fn census() -> Result<String, String> {
    let start = Instant::now();
    let fixtures: Vec<(&str, InteractionStructure)> = CORPUS
        .iter()
        .map(|&stem| (stem, common::load_structure(&format!("{stem}.structure")).structure))
        .filter(|(_, s)| s.size() <= CENSUS_MAX_SIZE)
        .collect();
    let (mut pairs, mut maps, mut q8_self) = (0, 0, None);
    for (a, s) in &fixtures {
        for (b, t) in &fixtures {
            let fs = ascending_filtration(s, FiltrationMode::Ascending).map_err(|e| e.to_string())?;
            let ft = ascending_filtration(t, FiltrationMode::Ascending).map_err(|e| e.to_string())?;
            let c = equivalence_oracle(s, t, &fs, &ft, CENSUS_BOUND).map_err(|e| format!("{a}/{b}: {e}"))?;
            let (ts, tt) = (Table::of(s), Table::of(t));
            let expected = preserving_bijections(&ts, &tt);
            let got: Vec<Vec<usize>> = c.maps.iter().map(|m| m.iter().map(|p| p.0).collect()).collect();
            let as_set = |v: &[Vec<usize>]| v.iter().cloned().collect::<BTreeSet<_>>();
            ensure(as_set(&got) == as_set(&expected), || {
                format!("{a}/{b}: {} maps, oracle {}", got.len(), expected.len())
            })?;

            let (us, ut) = (ts.upper_central_series(), tt.upper_central_series());
            let depth = us.len().max(ut.len());
            for m in &expected {
                let preserves = (0..depth).all(|k| {
                    let image: Set = us[k.min(us.len() - 1)].iter().map(|&x| m[x]).collect();
                    image == ut[k.min(ut.len() - 1)]
                });
                ensure(preserves, || format!("{a}/{b}: counterexample {m:?}"))?;
            }
            ensure(c.counterexamples().next().is_none(), || {
                format!("{a}/{b}: library reports a counterexample")
            })?;
            ensure(c.filtration_preserving_count() == c.total(), || {
                format!("{a}/{b}: not 100%")
            })?;
            if (*a, *b) == ("q8", "q8") {
                q8_self = Some((c.total(), c.filtration_preserving_count()));
            }
            pairs += 1;
            maps += c.total();
        }
    }
    ensure(q8_self == Some((24, 24)), || {
        format!("q8 self-census {q8_self:?}, expected 24/24")
    })?;
    within(start, CENSUS_LIMIT)?;
    Ok(format!(
        "{pairs} ordered pairs, {maps} maps, 0 counterexamples, q8 self 24/24"
    ))
}

// ---------------------------------------------------------------------------
// 6. forced-structure report on Z4

fn forced_z4() -> Result<String, String> {
    let bundle = common::load_structure("z4.structure");
    let report = build_report(&bundle, &Options::default(), None, None).map_err(|e| e.to_string())?;
    let phase = report.phase.as_ref().ok_or("z4 did not construct")?;
    let forced = report.forced.as_ref().ok_or("no forced report")?;
    ensure(forced.bullets.len() == 6, || {
        format!("{} bullets", forced.bullets.len())
    })?;
    for b in &forced.bullets {
        ensure(b.status == BulletStatus::Pass, || format!("{} is {}", b.key, b.status))?;
    }

    // maximal proper subsets closed under composition
    let carrier = phase.structure();
    let t = Table::of(carrier);
    let closed: Vec<Set> = (1u32..(1 << t.n) - 1)
        .map(|mask| (0..t.n).filter(|&i| mask & (1 << i) != 0).collect::<Set>())
        .filter(|set| set.iter().all(|&a| set.iter().all(|&b| set.contains(&t.mul(a, b)))))
        .collect();
    let maximal: Vec<Set> = closed
        .iter()
        .filter(|a| !closed.iter().any(|b| b.len() > a.len() && a.is_subset(b)))
        .cloned()
        .collect();
    let islands: Vec<Set> = forced
        .islands
        .as_ref()
        .ok_or("no islands")?
        .iter()
        .map(|i| to_set(&i.elements))
        .collect();
    let named = |set: &Set| {
        set.iter()
            .map(|&x| carrier.name_of(ElementId(x)).to_string())
            .collect::<Vec<_>>()
    };
    ensure(islands == maximal, || {
        format!("islands {islands:?}, oracle {maximal:?}")
    })?;
    ensure(islands.len() == 1 && named(&islands[0]) == ["0", "2"], || {
        "islands should be [{0,2}]".into()
    })?;

    // inversion sends each label to the label with the negated response
    let rows = phase.pairing().rows();
    let labels = rows[0].len();
    let negated = |k: usize| (0..labels).find(|&l| (0..t.n).all(|p| rows[p][l] == -rows[p][k]));
    let record = forced
        .transports
        .iter()
        .find(|r| r.dynamic == "inv")
        .ok_or("no transport for inv")?;
    let expected: Vec<Option<usize>> = (0..labels).map(negated).collect();
    ensure(record.transport == expected, || {
        format!("transport {:?}, oracle {expected:?}", record.transport)
    })?;
    let minus: Vec<Option<usize>> = (0..labels).map(|k| Some((labels - k) % labels)).collect();
    ensure(record.transport == minus, || "transport should be χk ↦ χ−k".into())?;

    let units = (1..4).filter(|&k| gcd(k, 4) == 1).count();
    let census = forced.census.as_ref().ok_or("no census")?;
    ensure(census.total == units && census.filtration_preserving == units, || {
        format!(
            "census {}/{}, expected {units}",
            census.filtration_preserving, census.total
        )
    })?;

    let golden = common::read_fixture("z4-forced.txt");
    ensure(forced_text(forced) == golden, || {
        "report differs from the golden file".into()
    })?;
    Ok(format!(
        "6/6 PASS, islands [{{0,2}}], transport χk ↦ χ−k, census {units}/{units}, golden matches"
    ))
}

// ---------------------------------------------------------------------------
// 7. literal mode

fn literal_mode() -> Result<String, String> {
    for stem in CORPUS {
        let s = common::load_structure(&format!("{stem}.structure")).structure;
        let f = ascending_filtration(&s, FiltrationMode::Literal).map_err(|e| e.to_string())?;
        let center = Table::of(&s).center();
        ensure(to_set(f.stable_level()) == center, || {
            format!("{stem}: literal mode does not stop at the centre")
        })?;
    }
    Ok(format!("{} fixtures stabilise at the centre", CORPUS.len()))
}

// ---------------------------------------------------------------------------
// 8. parser robustness

const INTERESTING: &[u8] = b"[]{}=#,/- \n0123456789abcz";

fn mutate(rng: &mut ChaCha8Rng, input: &[u8]) -> Vec<u8> {
    let mut bytes = input.to_vec();
    for _ in 0..rng.gen_range(1..=4) {
        let pos = rng.gen_range(0..=bytes.len());
        let byte = if rng.gen_bool(0.5) {
            INTERESTING[rng.gen_range(0..INTERESTING.len())]
        } else {
            rng.gen()
        };
        match rng.gen_range(0..4) {
            0 if pos < bytes.len() => bytes[pos] = byte,
            1 if pos < bytes.len() => {
                bytes.remove(pos);
            }
            2 if pos < bytes.len() => bytes[pos] ^= 1 << rng.gen_range(0..8),
            _ => bytes.insert(pos, byte),
        }
    }
    bytes
}

fn robustness() -> Result<String, String> {
    let mut fixtures = Vec::new();
    for entry in std::fs::read_dir(common::fixtures_dir()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".structure") || name.ends_with(".module") {
            fixtures.push((name, std::fs::read(&path).map_err(|e| e.to_string())?));
        }
    }
    fixtures.sort();
    // a module file `<stem>-<variant>.module` belongs to `<stem>.structure`
    let owner = |name: &str| -> InteractionStructure {
        let stem = name.split('-').next().unwrap_or_default();
        common::load_structure(&format!("{stem}.structure")).structure
    };

    for (name, bytes) in &fixtures {
        let text = String::from_utf8(bytes.clone()).map_err(|_| format!("{name}: not UTF-8"))?;
        let again = if name.ends_with(".module") {
            let s = owner(name);
            let m = parse_module_bytes(bytes, &s).map_err(|e| format!("{name}: {e:?}"))?;
            serialize_module(&m, &s)
        } else {
            serialize_structure(&parse_structure(&text).map_err(|e| format!("{name}: {e:?}"))?)
        };
        ensure(again == text, || format!("{name}: round trip changes bytes"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(FUZZ_SEED);
    let (mut accepted, mut rejected) = (0, 0);
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut failure = None;
    for case in 0..FUZZ_CASES {
        let (name, original) = &fixtures[rng.gen_range(0..fixtures.len())];
        let input = mutate(&mut rng, original);
        let s = name.ends_with(".module").then(|| owner(name));
        let result = panic::catch_unwind(AssertUnwindSafe(|| -> Result<bool, String> {
            if let Some(s) = &s {
                let Ok(m) = parse_module_bytes(&input, s) else {
                    return Ok(false);
                };
                let text = serialize_module(&m, s);
                let reparsed = parse_module_bytes(text.as_bytes(), s).map_err(|e| format!("reparse: {e:?}"))?;
                ensure(serialize_module(&reparsed, s) == text, || {
                    "serialization is not a fixed point".into()
                })?;
            } else {
                let Ok(b) = parse_structure_bytes(&input) else {
                    return Ok(false);
                };
                let text = serialize_structure(&b);
                let reparsed = parse_structure_bytes(text.as_bytes()).map_err(|e| format!("reparse: {e:?}"))?;
                ensure(serialize_structure(&reparsed) == text, || {
                    "serialization is not a fixed point".into()
                })?;
                let _ = check_applicability(&b, &Options::default());
            }
            Ok(true)
        }));
        match result {
            Ok(Ok(true)) => accepted += 1,
            Ok(Ok(false)) => rejected += 1,
            Ok(Err(e)) => {
                failure = Some(format!("case {case} ({name}): {e}"));
                break;
            }
            Err(_) => {
                failure = Some(format!(
                    "case {case} ({name}): panic on {:?}",
                    String::from_utf8_lossy(&input)
                ));
                break;
            }
        }
    }
    panic::set_hook(hook);
    if let Some(f) = failure {
        return Err(f);
    }
    Ok(format!(
        "{} fixtures byte-stable; {FUZZ_CASES} mutants, {accepted} accepted, {rejected} rejected, no panics",
        fixtures.len()
    ))
}

fn main() {
    let results = [
        run(1, "criterion verdict agrees with construction", consistency),
        run(
            2,
            "ascending filtration equals the upper central series",
            filtration_truth,
        ),
        run(3, "exact Fourier decomposition of Z2..Z12", fourier),
        run(4, "obstruction witnesses replay", witnesses),
        run(5, "equivalence census preserves the filtration", census),
        run(6, "forced-structure report on Z4", forced_z4),
        run(7, "literal mode stabilises at the centre", literal_mode),
        run(8, "parser robustness and round trip", robustness),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
