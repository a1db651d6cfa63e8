//! Acceptance suite: one line per criterion, `[PASS]` or `[FAIL]`, and a
//! non-zero exit status if any criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use routed::circuit::examples::{self, random_circuit};
use routed::circuit::{Algorithm, BoxMap};
use routed::iodag::{figures, Corelation, IndexFamily, Iodag, LintMode};
use routed::label::Label;
use routed::linalg::{self, Mat, C64};
use routed::par::Exec;
use routed::relations::{channel_gate, isometry_gate, unitary_gate, BoolArray4, GateViolation};
use routed::routedcpm::{choi, follows_cp};
use routed::sample;
use routed::{
    CheckMode, CpRelation, Error, GateMode, Mode, PartitionedSpace, Relation, RoutedCircuit,
    RoutedCpm, RoutedMap,
};
use routed_cli::{load, Payload};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bundled() -> Vec<(String, Payload)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let doc =
                load(&p, linalg::DEFAULT_TOL).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                doc.payload,
            )
        })
        .collect()
}

fn ints(v: &[&[i64]]) -> Vec<Label> {
    v.iter().map(|t| Label::ints(t)).collect()
}

// 1 ---------------------------------------------------------------------------

fn two_trajectory_unitary() -> Outcome {
    let start = Instant::now();
    let c = examples::trajectories(&mut rng(1), 2, 2);
    let BoxMap::Pure(f) = c.evaluate().map_err(|e| e.to_string())? else {
        return Err("pure circuit evaluated to a CP map".into());
    };
    ensure(f.is_practical_unitary(1e-9), || {
        format!("unitarity defect {:.2e}", f.isometry_defect())
    })?;
    let report = c.check(CheckMode::Unitary).map_err(|e| e.to_string())?;
    ensure(
        report.passed && report.interfaces.iter().all(|i| i.passed),
        || "an interface fails the unitary gate".into(),
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "defect {:.1e}, {} interfaces proper, {elapsed:.1?}",
        f.isometry_defect(),
        report.interfaces.len()
    ))
}

// 2 ---------------------------------------------------------------------------

fn both_algorithms(c: &RoutedCircuit, slice: &[&str]) -> Result<Vec<Label>, String> {
    let a = c
        .accessible_space(slice, Algorithm::Definition, Exec::default())
        .map_err(|e| e.to_string())?;
    let b = c
        .accessible_space(slice, Algorithm::Recipe, Exec::default())
        .map_err(|e| e.to_string())?;
    ensure(a.tuples == b.tuples, || {
        format!(
            "algorithms disagree on {slice:?}: {:?} vs {:?}",
            a.labels(),
            b.labels()
        )
    })?;
    Ok(a.labels())
}

fn accessible_exactness() -> Outcome {
    let sorted = |mut v: Vec<Label>| {
        v.sort();
        v
    };
    let two = examples::trajectories(&mut rng(2), 2, 2);
    let got = both_algorithms(&two, &["A", "B"])?;
    ensure(
        sorted(got.clone()) == sorted(ints(&[&[1, 0], &[0, 1]])),
        || format!("two lines: {got:?}"),
    )?;
    let three = examples::trajectories(&mut rng(3), 3, 2);
    let got = both_algorithms(&three, &["A", "B", "C"])?;
    ensure(
        sorted(got.clone()) == sorted(ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])),
        || format!("three lines: {got:?}"),
    )?;
    let layer = examples::line_layer(&mut rng(4), 2, 2);
    let got = both_algorithms(&layer, &["A", "B"])?;
    ensure(got.len() == 4, || format!("middle layer alone: {got:?}"))?;

    // every slice of up to three wires of every bundled circuit
    let mut slices = 0;
    for (name, payload) in bundled() {
        let Payload::Circuit(c) = payload else {
            continue;
        };
        let wires: Vec<&str> = c.wires().iter().map(|(w, _)| w.as_str()).collect();
        let n = wires.len();
        for mask in 1u32..(1 << n) {
            if mask.count_ones() > 3 {
                continue;
            }
            let slice: Vec<&str> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| wires[i])
                .collect();
            if c.slice_indices(&slice).is_err() {
                continue;
            }
            both_algorithms(&c, &slice).map_err(|e| format!("{name}: {e}"))?;
            slices += 1;
        }
    }
    Ok(format!(
        "exact sets on the three circuits; algorithms agree on {slices} bundled slices"
    ))
}

// 3 ---------------------------------------------------------------------------

fn decoherence() -> Outcome {
    let (a, b, c) = examples::copy_spaces(2, &[1, 1]);
    let copy = examples::random_copy_channel(&mut rng(5), &a, &b, &c)
        .ok_or("copy channel does not fit")?;
    let circuit = examples::copy_then_discard(copy, &b, &c);
    let BoxMap::Cpm(out) = circuit.evaluate().map_err(|e| e.to_string())? else {
        return Err("expected a CP map".into());
    };
    let arr = out.route().array();
    let [ka, ka2, lb, lb2] = arr.shape();
    for k in 0..ka {
        for k2 in 0..ka2 {
            for l in 0..lb {
                for l2 in 0..lb2 {
                    ensure(!arr.get(k, k2, l, l2) || l == l2, || {
                        format!("route keeps ({k},{k2},{l},{l2})")
                    })?;
                }
            }
        }
    }
    ensure(out.route().has_full_decoherence(), || {
        "route is not fully decoherent".into()
    })?;

    let worst = Exec::default()
        .trials(50, 6, |_, rng| -> Result<f64, String> {
            let sectors = rng.random_range(2..=3);
            let dims: Vec<usize> = (0..sectors).map(|_| rng.random_range(1..=2)).collect();
            let source = rng.random_range(1..=2);
            let (a, b, c) = examples::copy_spaces(source, &dims);
            let ch = examples::random_copy_channel(rng, &a, &b, &c)
                .ok_or("copy channel does not fit")?;
            let BoxMap::Cpm(out) = examples::copy_then_discard(ch, &b, &c)
                .evaluate()
                .map_err(|e| e.to_string())?
            else {
                return Err("expected a CP map".into());
            };
            let j = out.choi();
            let cod = out.codomain();
            let dout = cod.total_dim();
            let mut worst: f64 = 0.0;
            for r in 0..j.nrows() {
                for s in 0..j.ncols() {
                    if cod.sector_of_coord(r % dout) != cod.sector_of_coord(s % dout) {
                        worst = worst.max(j[(r, s)].norm());
                    }
                }
            }
            Ok(worst)
        })
        .into_iter()
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-9, || {
        format!("off-diagonal sector block of norm {worst:.2e}")
    })?;
    Ok(format!(
        "route is diagonal in l; 50 channels, largest off-diagonal block entry {worst:.1e}"
    ))
}

// 4 ---------------------------------------------------------------------------

/// A space with at most three sectors and total dimension at most four.
fn small_space<R: Rng>(rng: &mut R) -> PartitionedSpace {
    loop {
        let sectors = rng.random_range(1..=3);
        let s = sample::random_space(rng, sectors, 2);
        if s.total_dim() <= 4 {
            return s;
        }
    }
}

fn sampled_map<R: Rng>(
    rng: &mut R,
    a: &PartitionedSpace,
    b: &PartitionedSpace,
    unitary: bool,
) -> Option<RoutedMap> {
    let density = rng.random_range(0.3..0.9);
    let route = sample::random_relation(rng, a.labels(), b.labels(), density);
    if unitary {
        sample::random_practical_unitary(rng, &route, a, b)
    } else {
        sample::random_practical_isometry(rng, &route, a, b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    Isometry,
    Unitary,
    Channel,
}

/// Draws pairs until one passes the gate; returns whether the composite stays in class.
fn gated_trial(rng: &mut ChaCha8Rng, class: Class) -> Result<(), String> {
    for _ in 0..200_000 {
        let (a, b, c) = (small_space(rng), small_space(rng), small_space(rng));
        match class {
            Class::Isometry | Class::Unitary => {
                let unitary = class == Class::Unitary;
                let (Some(f), Some(g)) = (
                    sampled_map(rng, &a, &b, unitary),
                    sampled_map(rng, &b, &c, unitary),
                ) else {
                    continue;
                };
                let mode = if unitary {
                    GateMode::Unitary
                } else {
                    GateMode::Isometry
                };
                let Ok(h) = g.checked_compose(&f, mode) else {
                    continue;
                };
                let ok = if unitary {
                    h.is_practical_unitary(1e-9)
                } else {
                    h.is_practical_isometry(1e-9)
                };
                return ensure(ok, || {
                    format!("{class:?} composite has defect {:.2e}", h.isometry_defect())
                });
            }
            Class::Channel => {
                let (Some(f), Some(g)) = (
                    sample::random_channel(rng, &a, &b, 2, 2, 0.5),
                    sample::random_channel(rng, &b, &c, 2, 2, 0.5),
                ) else {
                    continue;
                };
                let Ok(h) = g.checked_compose_channel(&f) else {
                    continue;
                };
                return ensure(h.is_practically_trace_preserving(1e-9), || {
                    format!(
                        "channel composite has trace defect {:.2e}",
                        h.trace_defect()
                    )
                });
            }
        }
    }
    Err(format!("no proper {class:?} pair found"))
}

fn expect_witness(
    v: Option<GateViolation>,
    target: &str,
    escaping: &[Label],
) -> Result<(), String> {
    let v = v.ok_or("improper pair passed the gate")?;
    ensure(
        v.target == target && v.escaping.labels() == escaping,
        || format!("unexpected witness {v}"),
    )
}

fn improper_pairs() -> Result<(), String> {
    let one = PartitionedSpace::unpartitioned(1).unwrap();
    let two = PartitionedSpace::unpartitioned(2).unwrap();
    let m = PartitionedSpace::with_dims(&[1, 1]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let col = |v: &[f64]| {
        linalg::from_rows(&v.iter().map(|&x| vec![C64::from(x)]).collect::<Vec<_>>()).unwrap()
    };
    let e = |e: Error| e.to_string();

    // spread over both sectors, then keep sector 0 only
    let spread = RoutedMap::new(
        Relation::full(one.labels(), m.labels()),
        col(&[s, s]),
        one.clone(),
        m.clone(),
        1e-9,
    )
    .map_err(e)?;
    let keep_m = linalg::from_rows(&[vec![1.0.into(), 0.0.into()]]).unwrap();
    let keep = RoutedMap::new(
        Relation::from_fn(m.labels(), one.labels(), |k, _| k == 0),
        keep_m,
        m.clone(),
        one.clone(),
        1e-9,
    )
    .map_err(e)?;
    expect_witness(
        isometry_gate(spread.route(), keep.route()).map_err(e)?,
        "S_second",
        &ints(&[&[1]]),
    )?;
    ensure(
        matches!(
            keep.checked_compose(&spread, GateMode::Isometry),
            Err(Error::ImproperComposition { .. })
        ),
        || "isometry composition not rejected".into(),
    )?;
    ensure(
        !keep
            .compose(&spread)
            .map_err(e)?
            .is_practical_isometry(1e-6),
        || "improper composite stayed isometric".into(),
    )?;

    // into sector 0, then a unitary that also reads sector 1
    let into0 = RoutedMap::new(
        Relation::from_fn(one.labels(), m.labels(), |_, l| l == 0),
        col(&[1.0, 0.0]),
        one.clone(),
        m.clone(),
        1e-9,
    )
    .map_err(e)?;
    let merge = RoutedMap::new(
        Relation::full(m.labels(), two.labels()),
        linalg::identity(2),
        m.clone(),
        two.clone(),
        1e-9,
    )
    .map_err(e)?;
    ensure(
        into0.is_practical_unitary(1e-12) && merge.is_practical_unitary(1e-12),
        || "hand-built maps are not unitary".into(),
    )?;
    ensure(
        isometry_gate(into0.route(), merge.route())
            .map_err(e)?
            .is_none(),
        || "unitary pair should pass the isometry gate".into(),
    )?;
    expect_witness(
        unitary_gate(into0.route(), merge.route()).map_err(e)?,
        "T_first",
        &ints(&[&[1]]),
    )?;
    ensure(
        !merge.compose(&into0).map_err(e)?.is_practical_unitary(1e-6),
        || "improper composite stayed unitary".into(),
    )?;

    // the first pair as channels
    let (cs, ck) = (RoutedCpm::lift_pure(&spread), RoutedCpm::lift_pure(&keep));
    expect_witness(
        channel_gate(cs.route(), ck.route()).map_err(e)?,
        "S_second",
        &ints(&[&[1]]),
    )?;
    ensure(ck.checked_compose_channel(&cs).is_err(), || {
        "channel composition not rejected".into()
    })?;
    ensure(
        !ck.compose(&cs)
            .map_err(e)?
            .is_practically_trace_preserving(1e-6),
        || "improper composite stayed trace preserving".into(),
    )
}

fn gated_compositions() -> Outcome {
    let start = Instant::now();
    for (i, class) in [Class::Isometry, Class::Unitary, Class::Channel]
        .into_iter()
        .enumerate()
    {
        let results = Exec::default().trials(500, 40 + i as u64, |_, rng| gated_trial(rng, class));
        results.into_iter().collect::<Result<Vec<()>, String>>()?;
    }
    improper_pairs()?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("3 x 500 proper composites stay in class; improper pairs rejected with witnesses; {elapsed:.1?}"))
}

// 5 ---------------------------------------------------------------------------

/// Kraus operators from the eigendecomposition of a Choi matrix indexed `i*dout+p`.
fn kraus_from_choi(j: &Mat, din: usize, dout: usize) -> Vec<Mat> {
    let (vals, vecs) = linalg::hermitian_eigen(j);
    let scale = linalg::max_abs(j).max(1.0);
    let kraus: Vec<Mat> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1e-13 * scale)
        .map(|(e, &v)| Mat::from_fn(dout, din, |p, i| vecs[(i * dout + p, e)] * v.sqrt()))
        .collect();
    if kraus.is_empty() {
        vec![linalg::zeros(dout, din)]
    } else {
        kraus
    }
}

/// A random CP map whose route is generated by a random doubling through a
/// two-sector environment; not necessarily trace preserving.
fn random_cpm(rng: &mut ChaCha8Rng) -> Result<RoutedCpm, String> {
    let (a, b) = (small_space(rng), small_space(rng));
    let env =
        PartitionedSpace::with_dims(&[rng.random_range(1..=2), rng.random_range(1..=2)]).unwrap();
    let big = b.tensor(&env);
    let doubling = sample::random_relation(rng, a.labels(), big.labels(), 0.4);
    let v = sample::random_following_matrix(rng, &doubling, &a, &big);
    let de = env.total_dim();
    let kraus: Vec<Mat> = (0..de)
        .map(|e| Mat::from_fn(b.total_dim(), a.total_dim(), |p, i| v[(p * de + e, i)]))
        .collect();
    let route = sample::doubled_route(&doubling, b.labels(), env.num_sectors());
    RoutedCpm::new(route, kraus, a, b, 1e-9).map_err(|e| e.to_string())
}

fn kraus_routes() -> Outcome {
    let forward = Exec::default().trials(100, 50, |_, rng| -> Result<(), String> {
        let c = random_cpm(rng)?;
        ensure(c.kraus_follow_diagonal(1e-9), || {
            "given Kraus operators leave the diagonal".into()
        })?;
        let other = kraus_from_choi(&c.choi(), c.domain().total_dim(), c.codomain().total_dim());
        let d = RoutedCpm::new(
            c.route().clone(),
            other,
            c.domain().clone(),
            c.codomain().clone(),
            1e-9,
        )
        .map_err(|e| e.to_string())?;
        ensure(linalg::max_diff(&d.choi(), &c.choi()) < 1e-9, || {
            "eigen-Kraus do not reproduce the Choi matrix".into()
        })?;
        ensure(d.kraus_follow_diagonal(1e-9), || {
            "eigen-Kraus leave the diagonal".into()
        })
    });
    forward.into_iter().collect::<Result<Vec<()>, String>>()?;

    let reverse = Exec::default().trials(100, 51, |_, rng| -> Result<(), String> {
        let (a, b) = (small_space(rng), small_space(rng));
        let lambda = sample::random_relation(rng, a.labels(), b.labels(), 0.5);
        let n = rng.random_range(1..=3);
        let kraus: Vec<Mat> = (0..n)
            .map(|_| sample::random_following_matrix(rng, &lambda, &a, &b))
            .collect();
        let ok = follows_cp(&kraus, &CpRelation::full_coherence(&lambda), &a, &b, 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(ok, || {
            "Kraus operators following the route break full coherence".into()
        })
    });
    reverse.into_iter().collect::<Result<Vec<()>, String>>()?;

    let adapted = Exec::default().trials(50, 52, |_, rng| -> Result<f64, String> {
        let c = loop {
            let (a, b) = (small_space(rng), small_space(rng));
            if let Some(c) = sample::random_channel(rng, &a, &b, 2, 2, 0.5) {
                break sample::decohere(&c);
            }
        };
        let blocks = c.adapted_kraus_decomposition().map_err(|e| e.to_string())?;
        let mut all = Vec::new();
        for blk in &blocks {
            for k in &blk.kraus {
                let (dom, cod) = (c.domain(), c.codomain());
                let outside = (0..cod.total_dim())
                    .flat_map(|p| (0..dom.total_dim()).map(move |i| (p, i)))
                    .filter(|&(p, i)| {
                        cod.sector_of_coord(p) != blk.output || dom.sector_of_coord(i) != blk.input
                    })
                    .map(|(p, i)| k[(p, i)].norm())
                    .fold(0.0, f64::max);
                ensure(outside <= 1e-9, || {
                    format!("adapted operator leaks {outside:.2e} out of its block")
                })?;
                all.push(k.clone());
            }
        }
        let reference = if c.kraus().is_empty() {
            linalg::zeros(0, 0)
        } else {
            c.choi()
        };
        Ok(if all.is_empty() {
            linalg::max_abs(&reference)
        } else {
            linalg::max_diff(&choi(&all), &reference)
        })
    });
    let worst = adapted
        .into_iter()
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-9, || {
        format!("adapted decomposition misses the Choi matrix by {worst:.2e}")
    })?;
    Ok(format!(
        "100 forward, 100 reverse, 50 adapted decompositions (Choi error {worst:.1e})"
    ))
}

// 6 ---------------------------------------------------------------------------

/// Arrays for `|Z_A| = |Z_B| = 2` reachable as unions of `S × S` over subsets
/// `S` of the (k, l) pairs, closed under union: exactly the routes of CP maps
/// built from Kraus operators with arbitrary block supports.
fn doubling_closure() -> Vec<bool> {
    let bit = |k: usize, k2: usize, l: usize, l2: usize| ((k * 2 + k2) * 2 + l) * 2 + l2;
    let squares: Vec<u16> = (1u16..16)
        .map(|s| {
            let pairs: Vec<(usize, usize)> = (0..4)
                .filter(|i| s >> i & 1 == 1)
                .map(|i| (i / 2, i % 2))
                .collect();
            let mut m = 0u16;
            for &(k, l) in &pairs {
                for &(k2, l2) in &pairs {
                    m |= 1 << bit(k, k2, l, l2);
                }
            }
            m
        })
        .collect();
    let mut reach = vec![false; 1 << 16];
    reach[0] = true;
    let mut frontier = vec![0u16];
    while let Some(x) = frontier.pop() {
        for &sq in &squares {
            let y = x | sq;
            if !reach[y as usize] {
                reach[y as usize] = true;
                frontier.push(y);
            }
        }
    }
    reach
}

fn cp_characterization() -> Outcome {
    let oracle = doubling_closure();
    let mut positive = 0;
    for bits in 0u32..(1 << 16) {
        let data: Vec<bool> = (0..16).map(|i| bits >> i & 1 == 1).collect();
        let arr = BoolArray4::from_flat([2, 2, 2, 2], data).map_err(|e| e.to_string())?;
        let cp = routed::relations::is_completely_positive(&arr).map_err(|e| e.to_string())?;
        ensure(cp == oracle[bits as usize], || {
            format!("disagreement on array {bits:#06x}: cp = {cp}")
        })?;
        positive += usize::from(cp);
    }
    Ok(format!(
        "65536 arrays, {positive} completely positive, all agree with the doubling oracle"
    ))
}

// 7 ---------------------------------------------------------------------------

fn lint_verdicts() -> Outcome {
    let verdicts = [
        ("diamond", figures::diamond(), true, Some(true)),
        ("pass_through", figures::pass_through(), true, Some(true)),
        ("ends_early", figures::ends_early(), true, Some(false)),
        ("two_starts", figures::two_starts(), false, None),
    ];
    for (name, g, iso, uni) in &verdicts {
        ensure(g.lint(LintMode::Iso).passed == *iso, || {
            format!("{name}: iso verdict")
        })?;
        if let Some(uni) = uni {
            ensure(g.lint(LintMode::Uni).passed == *uni, || {
                format!("{name}: uni verdict")
            })?;
        }
    }
    let msg = &figures::two_starts().lint(LintMode::Iso).violations[0].message;
    ensure(
        msg.starts_with("two starting points for the index k"),
        || format!("message: {msg}"),
    )?;
    let msg = &figures::ends_early().lint(LintMode::Uni).violations[0].message;
    ensure(
        msg.starts_with("the index k is present in the global outputs"),
        || format!("message: {msg}"),
    )?;
    let split = figures::split();
    split
        .then(&figures::join())
        .map_err(|e| format!("split then join: {e}"))?;
    for (name, g) in [
        ("join_other_wire", figures::join_other_wire()),
        ("join_two_indices", figures::join_two_indices()),
    ] {
        ensure(
            matches!(split.then(&g), Err(Error::InterfaceMismatch(_))),
            || format!("split then {name} was not rejected"),
        )?;
    }
    Ok("4 iso and 3 uni verdicts, 1 composition accepted, 2 rejected".into())
}

// 8 ---------------------------------------------------------------------------

fn diamond_dims(da: usize, db: usize) -> BTreeMap<String, Vec<usize>> {
    [
        ("E_I", vec![2]),
        ("A_I", vec![da]),
        ("B_I", vec![db]),
        ("L", vec![1, 1]),
        ("R", vec![1, 1]),
        ("L'", vec![1, 1]),
        ("R'", vec![1, 1]),
        ("A_O", vec![da]),
        ("B_O", vec![db]),
        ("E_O", vec![2]),
    ]
    .into_iter()
    .map(|(w, d)| (w.to_string(), d))
    .collect()
}

/// Largest violation of "the marginal on output `keep` does not depend on
/// input `src`". `u` maps inputs `dims_in` to outputs `dims_out` (Kronecker
/// order); each basis operator `|x⟩⟨y|` is pushed through and all outputs but
/// `keep` are traced out. Off-diagonal in `src` must vanish and diagonal
/// entries must not depend on the `src` value.
fn influence(u: &Mat, dims_in: &[usize], dims_out: &[usize], src: usize, keep: usize) -> f64 {
    let unrank = |mut t: usize, dims: &[usize]| {
        let mut v = vec![0; dims.len()];
        for i in (0..dims.len()).rev() {
            v[i] = t % dims[i];
            t /= dims[i];
        }
        v
    };
    let din: usize = dims_in.iter().product();
    let dout: usize = dims_out.iter().product();
    let dk = dims_out[keep];
    let marginal = |x: usize, y: usize| {
        let mut m = linalg::zeros(dk, dk);
        for r in 0..dout {
            let rv = unrank(r, dims_out);
            for s in 0..dout {
                let sv = unrank(s, dims_out);
                if (0..dims_out.len()).any(|i| i != keep && rv[i] != sv[i]) {
                    continue;
                }
                m[(rv[keep], sv[keep])] += u[(r, x)] * u[(s, y)].conj();
            }
        }
        m
    };
    let with_src = |v: &[usize], a: usize| {
        let mut w = v.to_vec();
        w[src] = a;
        w.iter().zip(dims_in).fold(0, |acc, (&x, &d)| acc * d + x)
    };
    let mut worst: f64 = 0.0;
    for x in 0..din {
        for y in 0..din {
            let (xv, yv) = (unrank(x, dims_in), unrank(y, dims_in));
            let m = marginal(x, y);
            if xv[src] != yv[src] {
                worst = worst.max(linalg::max_abs(&m));
            } else if xv[src] != 0 {
                let base = marginal(with_src(&xv, 0), with_src(&yv, 0));
                worst = worst.max(linalg::max_diff(&m, &base));
            }
        }
    }
    worst
}

fn diamond_no_influence() -> Outcome {
    let start = Instant::now();
    let g = figures::diamond();
    let lengths = g.uniform_lengths(2);
    let results = Exec::default().trials(20, 80, |_, rng| -> Result<(f64, f64), String> {
        let (da, db) = (rng.random_range(1..=2), rng.random_range(1..=2));
        let interp = g
            .random_interpretation_with_dims(rng, &lengths, &diamond_dims(da, db), LintMode::Uni)
            .map_err(|e| e.to_string())?;
        let f = g
            .interpret(&interp, LintMode::Uni, 1e-9)
            .map_err(|e| e.to_string())?;
        ensure(f.is_practical_unitary(1e-9), || {
            format!("defect {:.2e}", f.isometry_defect())
        })?;
        // inputs E_I, A_I, B_I; outputs A_O, B_O, E_O
        let (ins, outs) = ([2, da, db], [da, db, 2]);
        let a_to_b = influence(f.matrix(), &ins, &outs, 1, 1);
        let b_to_a = influence(f.matrix(), &ins, &outs, 2, 0);
        Ok((f.isometry_defect(), a_to_b.max(b_to_a)))
    });
    let results = results.into_iter().collect::<Result<Vec<_>, String>>()?;
    let defect = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let leak = results.iter().map(|r| r.1).fold(0.0, f64::max);
    ensure(leak <= 1e-9, || format!("influence of {leak:.2e}"))?;

    // sanity: a coupling unitary does show influence
    let swap = Mat::from_fn(4, 4, |r, c| {
        if r == (c % 2) * 2 + c / 2 {
            linalg::ONE
        } else {
            linalg::ZERO
        }
    });
    ensure(influence(&swap, &[2, 2], &[2, 2], 0, 1) > 0.1, || {
        "the oracle misses a swap".into()
    })?;

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "20 interpretations: unitary defect {defect:.1e}, influence {leak:.1e}, {elapsed:.1?}"
    ))
}

// 9 ---------------------------------------------------------------------------

fn families(prefix: &str) -> Vec<IndexFamily> {
    let mut out = Vec::new();
    for n in 0..=3u32 {
        for t in 0..3usize.pow(n) {
            let mut t = t;
            let entries = (0..n)
                .map(|i| {
                    let l = 1 + t % 3;
                    t /= 3;
                    (format!("{prefix}{i}"), l)
                })
                .collect();
            out.push(IndexFamily::new(entries).unwrap());
        }
    }
    out
}

/// Checks every composable pair over the families; returns the pair count.
fn functoriality_for(
    fa: &IndexFamily,
    fb: &IndexFamily,
    fcs: &[IndexFamily],
) -> Result<usize, String> {
    let firsts: Vec<(Corelation, Relation)> = Corelation::all(fa, fb)
        .into_iter()
        .map(|k| {
            let b = k.bar();
            (k, b)
        })
        .collect();
    let mut pairs = 0;
    for fc in fcs {
        let seconds: Vec<(Corelation, Relation)> = Corelation::all(fb, fc)
            .into_iter()
            .map(|k| {
                let b = k.bar();
                (k, b)
            })
            .collect();
        let mut composite_bars: HashMap<Corelation, Relation> = HashMap::new();
        for (f, fbar) in &firsts {
            for (g, gbar) in &seconds {
                let h = g.compose(f).map_err(|e| e.to_string())?;
                let lhs = composite_bars.entry(h).or_insert_with_key(Corelation::bar);
                let rhs = gbar.compose(fbar).map_err(|e| e.to_string())?;
                ensure(*lhs == rhs, || format!("bar fails on {f} then {g}"))?;
                pairs += 1;
            }
        }
    }
    Ok(pairs)
}

fn graph_composite_matches_boundary(
    name: &str,
    g: &Iodag,
    lengths: &routed::iodag::Lengths,
) -> Result<(), String> {
    let (kappa, gates) = g
        .compose_along_graph(lengths, LintMode::Iso)
        .map_err(|e| format!("{name}: {e}"))?;
    let total = g
        .total_corelation(lengths)
        .map_err(|e| format!("{name}: {e}"))?;
    ensure(kappa == total, || {
        format!("{name}: composite {kappa} differs from the boundary corelation {total}")
    })?;
    ensure(gates.iter().all(|l| l.passed), || {
        format!("{name}: a layer fails the isometry gate")
    })
}

fn bar_functoriality() -> Outcome {
    let fams = (families("a"), families("b"), families("c"));
    let jobs: Vec<(usize, usize)> = (0..fams.0.len())
        .flat_map(|i| (0..fams.1.len()).map(move |j| (i, j)))
        .collect();
    let counts = Exec::default().map(&jobs, |&(i, j)| {
        functoriality_for(&fams.0[i], &fams.1[j], &fams.2)
    });
    let pairs: usize = counts
        .into_iter()
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .sum();

    let mut diagrams = 0;
    for (name, payload) in bundled() {
        let Payload::Iodag {
            graph,
            interpretation,
        } = payload
        else {
            continue;
        };
        if !graph.lint(LintMode::Iso).passed {
            continue;
        }
        let mut all_lengths: Vec<_> = (1..=3).map(|l| graph.uniform_lengths(l)).collect();
        all_lengths.extend(interpretation.map(|i| i.lengths));
        for lengths in &all_lengths {
            graph_composite_matches_boundary(&name, &graph, lengths)?;
        }
        diagrams += 1;
    }
    ensure(diagrams >= 5, || {
        format!("only {diagrams} bundled iso diagrams")
    })?;
    Ok(format!("{pairs} composable pairs; composite equals the boundary corelation on {diagrams} bundled diagrams"))
}

// 10 --------------------------------------------------------------------------

fn two_orders(c: &RoutedCircuit) -> (Vec<usize>, Vec<usize>) {
    let n = c.boxes().len();
    let producer: HashMap<&str, usize> = c
        .boxes()
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.outputs.iter().map(move |w| (w.as_str(), i)))
        .collect();
    let deps: Vec<Vec<usize>> = c
        .boxes()
        .iter()
        .map(|b| {
            b.inputs
                .iter()
                .filter_map(|w| producer.get(w.as_str()).copied())
                .collect()
        })
        .collect();
    let kahn = |highest: bool| {
        let mut done = vec![false; n];
        let mut order = Vec::new();
        while order.len() < n {
            let ready = (0..n).filter(|&i| !done[i] && deps[i].iter().all(|&d| done[d]));
            let i = if highest { ready.max() } else { ready.min() }.expect("acyclic");
            done[i] = true;
            order.push(i);
        }
        order
    };
    (kahn(false), kahn(true))
}

fn foliation_independence() -> Outcome {
    let mut r = rng(100);
    let mut worst: f64 = 0.0;
    for mode in [Mode::Pure, Mode::Cpm] {
        let mut done = 0;
        while done < 20 {
            let c = random_circuit(&mut r, 5, mode);
            let (a, b) = two_orders(&c);
            if a == b {
                continue;
            }
            let x = c.evaluate_with_order(&a).map_err(|e| e.to_string())?;
            let y = c.evaluate_with_order(&b).map_err(|e| e.to_string())?;
            let d = match (x, y) {
                (BoxMap::Pure(x), BoxMap::Pure(y)) => linalg::max_diff(x.matrix(), y.matrix()),
                (BoxMap::Cpm(x), BoxMap::Cpm(y)) => linalg::max_diff(&x.choi(), &y.choi()),
                _ => return Err("evaluation changed mode".into()),
            };
            ensure(d <= 1e-12, || {
                format!("orders {a:?} and {b:?} differ by {d:.2e}")
            })?;
            worst = worst.max(d);
            done += 1;
        }
    }
    Ok(format!(
        "20 pure and 20 CP circuits of 5 boxes, largest difference {worst:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "two-trajectory circuit is a practical unitary",
            two_trajectory_unitary,
        ),
        (
            "accessible spaces are exact and both algorithms agree",
            accessible_exactness,
        ),
        ("copy then discard decoheres", decoherence),
        ("gated compositions stay in class", gated_compositions),
        ("Kraus operators follow the diagonal", kraus_routes),
        (
            "CP relations match the doubling oracle",
            cp_characterization,
        ),
        ("IODAG lint and composition verdicts", lint_verdicts),
        (
            "diamond interpretations are unitary without influence",
            diamond_no_influence,
        ),
        (
            "bar is functorial and graph composition gives the boundary corelation",
            bar_functoriality,
        ),
        (
            "evaluation is independent of the foliation",
            foliation_independence,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({elapsed:.1?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {why} ({elapsed:.1?})", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
