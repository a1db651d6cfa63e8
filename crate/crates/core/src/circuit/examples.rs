//! Ready-made circuits: coherent superpositions of trajectories and the
//! copy-then-discard channel. The random boxes are drawn from `rng`.

use rand::Rng;

use super::{Mode, RoutedCircuit};
use crate::label::{IndexSet, Label};
use crate::linalg::{self, Mat};
use crate::relations::{CpRelation, Relation};
use crate::routedcpm::RoutedCpm;
use crate::routedmap::RoutedMap;
use crate::sample;
use crate::spaces::PartitionedSpace;

/// How each communication line acts in a CP circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineKind {
    /// A sector-preserving unitary.
    Unitary,
    /// A sector-preserving channel, coherent across sectors.
    Coherent,
    /// A sector-preserving channel that decoheres vacuum from particle.
    Incoherent,
}

/// Space of one line: a vacuum sector `0` of dimension 1 and a particle
/// sector `1` of dimension `d`.
pub fn line_space(name: &str, d: usize) -> PartitionedSpace {
    PartitionedSpace::named(name, &IndexSet::range(2), vec![1, d]).expect("positive dims")
}

/// Line names used by the trajectory circuits: `A`, `B`, `C`, ...
pub fn line_name(i: usize) -> String {
    char::from(b'A' + i as u8).to_string()
}

pub fn message_space(d: usize) -> PartitionedSpace {
    PartitionedSpace::unpartitioned(d)
        .expect("d > 0")
        .with_name("M")
}

/// Control selecting one of `n` lines.
pub fn control_space(n: usize) -> PartitionedSpace {
    PartitionedSpace::unpartitioned(n)
        .expect("n > 0")
        .with_name("ctrl")
}

/// The initializer `(ω, U)` sending `|m⟩_M |c⟩_C` to the particle state `m` on
/// line `c` with every other line in vacuum. `ω` relates the single input
/// label to the one-particle tuples.
pub fn initializer(n: usize, d: usize) -> RoutedMap {
    let dom = message_space(d).tensor(&control_space(n));
    let lines: Vec<PartitionedSpace> = (0..n).map(|i| line_space(&line_name(i), d)).collect();
    let cod = PartitionedSpace::tensor_all(&lines);
    let one_particle: Vec<usize> = (0..n)
        .map(|c| {
            let tuple: Vec<i64> = (0..n).map(|j| i64::from(j == c)).collect();
            cod.labels()
                .index_of(&Label::ints(&tuple))
                .expect("one-particle tuple")
        })
        .collect();
    let omega = Relation::from_fn(dom.labels(), cod.labels(), |_, l| one_particle.contains(&l));
    let mut u: Mat = linalg::zeros(cod.total_dim(), dom.total_dim());
    for m in 0..d {
        for c in 0..n {
            let row = (0..n).fold(0, |acc, j| acc * (d + 1) + if j == c { 1 + m } else { 0 });
            u[(row, m * n + c)] = linalg::ONE;
        }
    }
    RoutedMap::new(omega, u, dom, cod, linalg::DEFAULT_TOL).expect("the initializer follows ω")
}

/// A sector-preserving channel on `space` with a two-dimensional environment.
pub fn random_line_channel<R: Rng + ?Sized>(
    rng: &mut R,
    space: &PartitionedSpace,
    kind: LineKind,
) -> RoutedCpm {
    if kind == LineKind::Unitary {
        return RoutedCpm::lift_pure(&sample::random_delta_unitary(rng, space));
    }
    let env = PartitionedSpace::new(&IndexSet::range(1), vec![2]).expect("positive dims");
    let big = space.tensor(&env);
    let doubling = Relation::from_fn(space.labels(), big.labels(), |k, l| l == k);
    let c = sample::channel_from_doubling(rng, &doubling, space, space, &env)
        .expect("a sector-preserving channel always fits");
    match kind {
        LineKind::Incoherent => sample::decohere(&c),
        _ => c,
    }
}

fn wire_ids(n: usize, suffix: &str) -> Vec<String> {
    (0..n)
        .map(|i| format!("{}{suffix}", line_name(i)))
        .collect()
}

/// Pure circuit: `U`, one random δ-routed unitary per line, then `U†`.
/// Wires `A, B, ...` sit between `U` and the lines, `A', B', ...` after them.
pub fn trajectories<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> RoutedCircuit {
    let u = initializer(n, d);
    let mut b = RoutedCircuit::builder(Mode::Pure);
    let (mid, late) = (wire_ids(n, ""), wire_ids(n, "'"));
    b = b
        .wire("M", &message_space(d))
        .wire("ctrl", &control_space(n))
        .wire("M'", &message_space(d))
        .wire("ctrl'", &control_space(n));
    for i in 0..n {
        let s = line_space(&line_name(i), d);
        b = b.wire(&mid[i], &s).wire(&late[i], &s);
    }
    let mid_refs: Vec<&str> = mid.iter().map(String::as_str).collect();
    let late_refs: Vec<&str> = late.iter().map(String::as_str).collect();
    b = b.pure_box("U", &["M", "ctrl"], &mid_refs, u.clone());
    for i in 0..n {
        let f = sample::random_delta_unitary(rng, &line_space(&line_name(i), d));
        b = b.pure_box(
            &format!("line{}", line_name(i)),
            &[mid_refs[i]],
            &[late_refs[i]],
            f,
        );
    }
    b.pure_box("Udag", &late_refs, &["M'", "ctrl'"], u.dagger())
        .inputs(&["M", "ctrl"])
        .outputs(&["M'", "ctrl'"])
        .build()
        .expect("well-formed trajectory circuit")
}

/// CP version of [`trajectories`] with the given kind of line.
pub fn channel_trajectories<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d: usize,
    kind: LineKind,
) -> RoutedCircuit {
    let u = initializer(n, d);
    let mut b = RoutedCircuit::builder(Mode::Cpm);
    let (mid, late) = (wire_ids(n, ""), wire_ids(n, "'"));
    b = b
        .wire("M", &message_space(d))
        .wire("ctrl", &control_space(n))
        .wire("M'", &message_space(d))
        .wire("ctrl'", &control_space(n));
    for i in 0..n {
        let s = line_space(&line_name(i), d);
        b = b.wire(&mid[i], &s).wire(&late[i], &s);
    }
    let mid_refs: Vec<&str> = mid.iter().map(String::as_str).collect();
    let late_refs: Vec<&str> = late.iter().map(String::as_str).collect();
    b = b.cpm_box("U", &["M", "ctrl"], &mid_refs, RoutedCpm::lift_pure(&u));
    for i in 0..n {
        let c = random_line_channel(rng, &line_space(&line_name(i), d), kind);
        b = b.cpm_box(
            &format!("line{}", line_name(i)),
            &[mid_refs[i]],
            &[late_refs[i]],
            c,
        );
    }
    b.cpm_box(
        "Udag",
        &late_refs,
        &["M'", "ctrl'"],
        RoutedCpm::lift_pure(&u.dagger()),
    )
    .inputs(&["M", "ctrl"])
    .outputs(&["M'", "ctrl'"])
    .build()
    .expect("well-formed trajectory circuit")
}

/// Only the line layer of [`trajectories`]: open partitioned inputs `A, B, ...`.
pub fn line_layer<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> RoutedCircuit {
    let mut b = RoutedCircuit::builder(Mode::Pure);
    let (mid, late) = (wire_ids(n, ""), wire_ids(n, "'"));
    for i in 0..n {
        let s = line_space(&line_name(i), d);
        b = b.wire(&mid[i], &s).wire(&late[i], &s);
        b = b.pure_box(
            &format!("line{}", line_name(i)),
            &[&mid[i]],
            &[&late[i]],
            sample::random_delta_unitary(rng, &s),
        );
    }
    let mid_refs: Vec<&str> = mid.iter().map(String::as_str).collect();
    let late_refs: Vec<&str> = late.iter().map(String::as_str).collect();
    b.inputs(&mid_refs)
        .outputs(&late_refs)
        .build()
        .expect("well-formed layer")
}

/// Spaces of the copy circuit: an unpartitioned source and two copies with
/// sectors of dimensions `dims`.
pub fn copy_spaces(
    source_dim: usize,
    dims: &[usize],
) -> (PartitionedSpace, PartitionedSpace, PartitionedSpace) {
    let a = PartitionedSpace::unpartitioned(source_dim)
        .expect("positive dim")
        .with_name("A");
    let labels = IndexSet::range(dims.len());
    let b = PartitionedSpace::named("B", &labels, dims.to_vec()).expect("positive dims");
    let c = PartitionedSpace::named("C", &labels, dims.to_vec()).expect("positive dims");
    (a, b, c)
}

/// A random channel `A → B ⊗ C` routed by `δ^{kl} δ^{k'l'}`: the sector
/// labels of the two copies always agree. `None` if `A` is too large.
pub fn random_copy_channel<R: Rng + ?Sized>(
    rng: &mut R,
    a: &PartitionedSpace,
    b: &PartitionedSpace,
    c: &PartitionedSpace,
) -> Option<RoutedCpm> {
    let bc = b.tensor(c);
    let n = b.num_sectors();
    let copy = Relation::from_fn(a.labels(), bc.labels(), |_, l| l / n == l % n);
    let env = PartitionedSpace::new(&IndexSet::range(1), vec![2]).expect("positive dims");
    let big = bc.tensor(&env);
    let doubling = Relation::from_fn(a.labels(), big.labels(), |k, l| copy.get(k, l));
    let ch = sample::channel_from_doubling(rng, &doubling, a, &bc, &env)?;
    debug_assert_eq!(ch.route(), &CpRelation::full_coherence(&copy));
    Some(ch)
}

/// `A → copy → (B, C)`, then `B` is discarded; the circuit's output is `C`.
pub fn copy_then_discard(
    copy: RoutedCpm,
    b: &PartitionedSpace,
    c: &PartitionedSpace,
) -> RoutedCircuit {
    let a = copy.domain().clone();
    RoutedCircuit::builder(Mode::Cpm)
        .wire("A", &a)
        .wire("B", b)
        .wire("C", c)
        .cpm_box("copy", &["A"], &["B", "C"], copy)
        .cpm_box("discard", &["B"], &[], RoutedCpm::discard(b))
        .inputs(&["A"])
        .outputs(&["C"])
        .build()
        .expect("well-formed copy circuit")
}

/// A random circuit of `boxes` boxes over small partitioned wires. The first
/// box consumes both global inputs; each later box takes one or two open
/// wires and emits one or two fresh ones. Wires left open become outputs.
/// Boxes follow random routes and are scaled to unit Frobenius norm; in CPM
/// mode each has two Kraus operators on the same route.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, boxes: usize, mode: Mode) -> RoutedCircuit {
    let mut wires: Vec<(String, PartitionedSpace)> = Vec::new();
    let mut fresh = |rng: &mut R| {
        let sectors = rng.random_range(1..=2);
        let id = format!("w{}", wires.len());
        wires.push((id, sample::random_space(rng, sectors, 2)));
        wires.len() - 1
    };
    let inputs = vec![fresh(rng), fresh(rng)];
    let mut open = inputs.clone();
    let mut layout: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 0..boxes {
        let ins: Vec<usize> = if i == 0 {
            std::mem::take(&mut open)
        } else {
            let n = rng.random_range(1..=open.len().min(2));
            (0..n)
                .map(|_| open.remove(rng.random_range(0..open.len())))
                .collect()
        };
        let outs: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| fresh(rng)).collect();
        open.extend(&outs);
        layout.push((ins, outs));
    }

    let mut b = RoutedCircuit::builder(mode);
    for (id, s) in &wires {
        b = b.wire(id, s);
    }
    let ids = |v: &[usize]| v.iter().map(|&w| wires[w].0.as_str()).collect::<Vec<_>>();
    for (i, (ins, outs)) in layout.iter().enumerate() {
        let dom = PartitionedSpace::tensor_all(ins.iter().map(|&w| &wires[w].1));
        let cod = PartitionedSpace::tensor_all(outs.iter().map(|&w| &wires[w].1));
        let route = sample::random_relation(rng, dom.labels(), cod.labels(), 0.6);
        let draw = |rng: &mut R| {
            let m = sample::random_following_matrix(rng, &route, &dom, &cod);
            let n = m.norm();
            if n > 0.0 {
                m.unscale(n)
            } else {
                m
            }
        };
        let id = format!("b{i}");
        b = match mode {
            Mode::Pure => {
                let m = draw(rng);
                let f = RoutedMap::new(route, m, dom, cod, linalg::DEFAULT_TOL)
                    .expect("follows its route");
                b.pure_box(&id, &ids(ins), &ids(outs), f)
            }
            Mode::Cpm => {
                let kraus = vec![draw(rng), draw(rng)];
                let cp = CpRelation::full_coherence(&route);
                let c = RoutedCpm::new(cp, kraus, dom, cod, linalg::DEFAULT_TOL)
                    .expect("follows its route");
                b.cpm_box(&id, &ids(ins), &ids(outs), c)
            }
        };
    }
    b.inputs(&ids(&inputs))
        .outputs(&ids(&open))
        .build()
        .expect("well-formed random circuit")
}
