use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::figures;
use super::*;
use crate::linalg::{self, C64};
use crate::relations::{isometry_gate, unitary_gate};

/// Set partitions of `0..n` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let top = prefix.iter().max().map_or(0, |m| m + 1);
        for v in 0..=top {
            prefix.push(v);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

fn family(prefix: &str, n: usize, len: usize) -> IndexFamily {
    IndexFamily::new((0..n).map(|i| (format!("{prefix}{i}"), len)).collect()).unwrap()
}

/// All corelations between families of the given sizes with one length.
fn corelations(a: usize, b: usize, len: usize, pa: &str, pb: &str) -> Vec<Corelation> {
    Corelation::all(&family(pa, a, len), &family(pb, b, len))
}

fn lengths(pairs: &[(&str, usize)]) -> Lengths {
    pairs.iter().map(|(c, l)| (c.to_string(), *l)).collect()
}

#[test]
fn all_lists_the_length_consistent_partitions() {
    let bell = [1, 1, 2, 5, 15, 52, 203];
    for (n, &count) in bell.iter().enumerate() {
        assert_eq!(set_partitions(n).len(), count);
    }
    let fa = IndexFamily::of(&[("a", 2), ("b", 3)]).unwrap();
    let fb = IndexFamily::of(&[("c", 2), ("d", 2), ("e", 3)]).unwrap();
    let expected: Vec<Corelation> = set_partitions(5)
        .iter()
        .filter_map(|keys| Corelation::from_keys(fa.clone(), fb.clone(), keys).ok())
        .collect();
    assert_eq!(Corelation::all(&fa, &fb), expected);
    assert_eq!(corelations(2, 2, 1, "a", "b").len(), 15);
}

#[test]
fn bars_of_identity_and_discrete() {
    let f = family("a", 2, 3);
    assert_eq!(
        Corelation::identity(&f).bar(),
        crate::Relation::identity(&f.values())
    );
    let g = family("b", 1, 2);
    assert_eq!(
        Corelation::discrete(&f, &g).bar(),
        crate::Relation::full(&f.values(), &g.values())
    );
}

#[test]
fn bar_is_functorial() {
    for len in [1, 2] {
        for a in 0..=2 {
            for b in 0..=2 {
                for c in 0..=1 {
                    for f in corelations(a, b, len, "a", "b") {
                        for g in corelations(b, c, len, "b", "c") {
                            let lhs = g.compose(&f).unwrap().bar();
                            let rhs = g.bar().compose(&f.bar()).unwrap();
                            assert_eq!(lhs, rhs, "{f} then {g}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn composition_is_associative() {
    for f in corelations(1, 2, 2, "a", "b") {
        for g in corelations(2, 1, 2, "b", "c") {
            for h in corelations(1, 1, 2, "c", "d") {
                let left = h.compose(&g.compose(&f).unwrap()).unwrap();
                let right = h.compose(&g).unwrap().compose(&f).unwrap();
                assert_eq!(left, right);
            }
        }
    }
}

#[test]
fn improper_witness_agrees_with_route_gates() {
    // lengths of 1 are invisible to the gates, so only lengths 2 and 3 are compared
    for len in [2, 3] {
        for a in 0..=2 {
            for b in 1..=2 {
                for c in 0..=2 {
                    if a + b > 3 || b + c > 3 {
                        continue;
                    }
                    for k in corelations(a, b, len, "a", "b") {
                        for i in corelations(b, c, len, "b", "c") {
                            let iso = explain_improper(&k, &i, false).unwrap();
                            let gate = isometry_gate(&k.bar(), &i.bar()).unwrap();
                            assert_eq!(iso.is_none(), gate.is_none(), "isometry: {k} then {i}");
                            let uni = explain_improper(&k, &i, true).unwrap();
                            let gate = unitary_gate(&k.bar(), &i.bar()).unwrap();
                            assert_eq!(uni.is_none(), gate.is_none(), "unitary: {k} then {i}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn nonforgetting_composition_needs_agreement_on_the_shared_family() {
    let a = family("a", 1, 2);
    let b = family("b", 2, 2);
    let f = Corelation::from_keys(a.clone(), b.clone(), &[0, 0, 0]).unwrap();
    let g = Corelation::from_keys(b.clone(), a.clone(), &[0, 1, 1]).unwrap();
    let err = nonforgetting_compose(&f, &g).unwrap_err();
    assert!(matches!(err, Error::IncompatibleRestrictions(_)), "{err}");
    let g = Corelation::from_keys(b, a, &[0, 0, 1]).unwrap();
    let joint = nonforgetting_compose(&f, &g).unwrap();
    assert_eq!(joint.num_classes(), 2);
}

#[test]
fn lengths_must_agree_within_a_class() {
    let a = IndexFamily::of(&[("x", 2)]).unwrap();
    let b = IndexFamily::of(&[("y", 3)]).unwrap();
    let err = Corelation::from_keys(a, b, &[0, 0]).unwrap_err();
    assert!(matches!(err, Error::LengthMismatch(_)));
}

#[test]
fn figure_lints() {
    for mode in [LintMode::Iso, LintMode::Uni] {
        assert!(figures::diamond().lint(mode).passed);
        assert!(figures::pass_through().lint(mode).passed);
    }
    let g = figures::ends_early();
    assert!(g.lint(LintMode::Iso).passed);
    let uni = g.lint(LintMode::Uni);
    assert!(!uni.passed);
    assert_eq!(
        uni.violations[0].message,
        "the index k is present in the global outputs and has an endpoint at n2"
    );
    let iso = figures::two_starts().lint(LintMode::Iso);
    assert!(!iso.passed);
    assert_eq!(
        iso.violations[0].message,
        "two starting points for the index k: n1, n2"
    );
}

#[test]
fn starting_point_on_an_indexed_input() {
    let g = IodagRepr {
        inputs: vec!["X^k".into()],
        outputs: vec!["Y^k".into(), "Z^k".into()],
        edges: vec![],
        nodes: vec![
            NodeRepr {
                id: "a".into(),
                inputs: vec!["X".into()],
                outputs: vec!["Y".into()],
            },
            NodeRepr {
                id: "b".into(),
                inputs: vec![],
                outputs: vec!["Z".into()],
            },
        ],
        indices: vec![],
        empty_nodes: vec![],
        interpretation: None,
    };
    let report = g.to_iodag().unwrap().lint(LintMode::Iso);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(
        report.violations[0].message,
        "the index k is present in the global inputs and has a starting point at b"
    );
}

#[test]
fn sequential_composition_checks_the_interface() {
    let e = figures::split();
    let err = e.then(&figures::join_other_wire()).unwrap_err();
    assert!(matches!(err, Error::InterfaceMismatch(_)), "{err}");
    let err = e.then(&figures::join_two_indices()).unwrap_err();
    assert!(matches!(err, Error::InterfaceMismatch(_)), "{err}");
    assert!(err.to_string().contains("index classes differ"), "{err}");
    let g = e.then(&figures::join()).unwrap();
    assert_eq!(g.inputs(), ["X"]);
    assert_eq!(g.outputs(), ["Y"]);
    assert_eq!(g.edges(), ["A", "B"]);
    assert!(g.lint(LintMode::Uni).passed);
}

#[test]
fn identities_are_neutral_after_normalization() {
    for (name, g) in figures::all() {
        let right = g.then(&g.output_identity()).unwrap().normalize();
        assert!(right.empty_nodes().is_empty(), "{name}");
        assert!(right.is_isomorphic(&g), "{name} ; id");
        let left = g.input_identity().then(&g).unwrap().normalize();
        assert!(left.is_isomorphic(&g), "id ; {name}");
        assert!(g.is_isomorphic(&g));
    }
}

#[test]
fn bare_identity_keeps_its_empty_nodes() {
    let id = figures::split().output_identity();
    assert_eq!(id.normalize().empty_nodes().len(), 2);
}

#[test]
fn sequential_composition_is_associative() {
    let a = figures::split();
    let b = a.output_identity();
    let c = figures::join();
    let c = {
        // rename inputs to meet the identity's primed outputs
        let mut r = IodagRepr::from_iodag(&c);
        r.inputs = vec!["A'^k".into(), "B'^k".into()];
        r.nodes[0].inputs = vec!["A'".into(), "B'".into()];
        r.to_iodag().unwrap()
    };
    let left = a.then(&b).unwrap().then(&c).unwrap();
    let right = a.then(&b.then(&c).unwrap()).unwrap();
    assert!(left.is_isomorphic(&right));
}

#[test]
fn parallel_composition_renames_clashes() {
    let d = figures::diamond();
    let dd = d.par(&d);
    assert_eq!(dd.class_names().len(), 2);
    assert!(dd.class_names().contains("k#1"));
    assert_eq!(dd.inputs().len(), 6);
    assert!(dd.lint(LintMode::Uni).passed);
    let swapped = d.par(&figures::pass_through());
    let other = figures::pass_through().par(&d);
    assert!(!swapped.is_isomorphic(&other));
}

#[test]
fn isomorphism_respects_structure() {
    let d = figures::diamond();
    let mut r = IodagRepr::from_iodag(&d);
    r.edges = vec!["p^m".into(), "q^m".into(), "s^m".into(), "t^m".into()];
    for n in &mut r.nodes {
        n.id = format!("{}x", n.id);
        for w in n.inputs.iter_mut().chain(n.outputs.iter_mut()) {
            *w = match w.as_str() {
                "L" => "p".into(),
                "R" => "q".into(),
                "L'" => "s".into(),
                "R'" => "t".into(),
                _ => w.clone(),
            };
        }
    }
    let renamed = r.to_iodag().unwrap();
    let iso = d.isomorphism(&renamed).unwrap();
    assert_eq!(iso.classes["k"], "m");
    assert_eq!(iso.nodes["U1"], "U1x");
    assert!(!d.is_isomorphic(&figures::two_starts()));
    // dropping the index on one branch changes the diagram
    r.edges[1] = "q".into();
    r.edges[3] = "t".into();
    assert!(!d.is_isomorphic(&r.to_iodag().unwrap()));
}

#[test]
fn layer_gates_pass_on_well_indexed_diagrams() {
    for (name, g) in figures::all() {
        for len in [1, 2, 3] {
            let l = g.uniform_lengths(len);
            for mode in [LintMode::Iso, LintMode::Uni] {
                let (total, gates) = g.compose_along_graph(&l, mode).unwrap();
                if g.lint(mode).passed {
                    assert!(
                        gates.iter().all(|x| x.passed),
                        "{name} {mode} {len}: {gates:?}"
                    );
                    assert_eq!(total, g.total_corelation(&l).unwrap(), "{name}");
                }
            }
        }
    }
}

#[test]
fn ill_indexed_diagrams_trip_a_gate() {
    let l = lengths(&[("k", 2)]);
    let (_, gates) = figures::two_starts()
        .compose_along_graph(&l, LintMode::Iso)
        .unwrap();
    assert!(gates.iter().any(|g| !g.passed));
    let (_, gates) = figures::ends_early()
        .compose_along_graph(&l, LintMode::Uni)
        .unwrap();
    let bad = gates.iter().find(|g| !g.passed).unwrap();
    assert_eq!(bad.witness.as_ref().unwrap().kind, "deleted");
}

#[test]
fn node_corelations_and_families() {
    let d = figures::diamond();
    let l = lengths(&[("k", 3)]);
    let u2 = d.node_corelation("U2", &l).unwrap();
    assert_eq!(u2.domain().names(), ["k@L"]);
    assert_eq!(u2.codomain().names(), ["k@L'"]);
    assert_eq!(u2.bar(), crate::Relation::identity(&u2.domain().values()));
    assert!(matches!(
        d.node_corelation("nope", &l),
        Err(Error::UnknownNode(_))
    ));
    assert!(matches!(
        d.family("L", &Lengths::new()),
        Err(Error::LengthMismatch(_))
    ));
    assert_eq!(d.family("E_I", &l).unwrap().values().len(), 1);
}

fn diamond_interpretation(seed: u64, len: usize) -> (Iodag, Interpretation) {
    let g = figures::diamond();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interp = g
        .random_interpretation(&mut rng, &g.uniform_lengths(len), 2)
        .unwrap();
    (g, interp)
}

#[test]
fn well_indexed_interpretations_are_practical_isometries() {
    for seed in 0..4 {
        for (name, g) in figures::all() {
            if !g.lint(LintMode::Iso).passed {
                continue;
            }
            let l = g.uniform_lengths(2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let interp = g.random_interpretation(&mut rng, &l, 2).unwrap();
            let f = g.interpret(&interp, LintMode::Iso, 1e-9).unwrap();
            assert!(f.is_practical_isometry(1e-8), "{name}");
            assert_eq!(f.route(), &g.total_corelation(&l).unwrap().bar(), "{name}");
        }
    }
}

#[test]
fn interpretation_rejects_ill_indexed_and_mistyped_input() {
    let g = figures::two_starts();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let interp = g
        .random_interpretation(&mut rng, &g.uniform_lengths(2), 1)
        .unwrap();
    let err = g.interpret(&interp, LintMode::Iso, 1e-9).unwrap_err();
    assert!(matches!(err, Error::LintFailure(_)));

    let (g, mut interp) = diamond_interpretation(3, 2);
    let f = interp.maps["U2"].clone();
    interp.maps.insert("U2".into(), f.scale(C64::new(2.0, 0.0)));
    assert!(matches!(
        g.interpret(&interp, LintMode::Iso, 1e-9),
        Err(Error::NotPracticalIsometry(_))
    ));

    let (g, mut interp) = diamond_interpretation(3, 2);
    let space = interp.spaces["A_I"].clone();
    interp
        .spaces
        .insert("A_I".into(), space.tensor(&space).with_name("A_I"));
    assert!(matches!(
        g.interpret(&interp, LintMode::Iso, 1e-9),
        Err(Error::TypeMismatch(_))
    ));
}

/// Tracing Alice's output and the environment leaves Bob's output
/// independent of Alice's input.
#[test]
fn diamond_alice_cannot_signal_to_bob() {
    for seed in 0..3 {
        let (g, interp) = diamond_interpretation(seed, 2);
        let f = g.interpret(&interp, LintMode::Iso, 1e-9).unwrap();
        let m = f.matrix();
        let dim = |w: &str| interp.spaces[w].total_dim();
        let (de, da, db) = (dim("E_I"), dim("A_I"), dim("B_I"));
        let (dao, dbo, deo) = (dim("A_O"), dim("B_O"), dim("E_O"));
        let col = |e: usize, a: usize, b: usize| (e * da + a) * db + b;
        let row = |a: usize, b: usize, e: usize| (a * dbo + b) * deo + e;
        let bob = |x: usize, y: usize| {
            let mut out = linalg::zeros(dbo, dbo);
            for b1 in 0..dbo {
                for b2 in 0..dbo {
                    let mut s = linalg::ZERO;
                    for a in 0..dao {
                        for e in 0..deo {
                            s += m[(row(a, b1, e), x)] * m[(row(a, b2, e), y)].conj();
                        }
                    }
                    out[(b1, b2)] = s;
                }
            }
            out
        };
        for e in 0..de {
            for e2 in 0..de {
                for b in 0..db {
                    for b2 in 0..db {
                        let reference = bob(col(e, 0, b), col(e2, 0, b2));
                        for a in 0..da {
                            for a2 in 0..da {
                                let got = bob(col(e, a, b), col(e2, a2, b2));
                                let want = if a == a2 {
                                    reference.clone()
                                } else {
                                    linalg::zeros(dbo, dbo)
                                };
                                assert!(linalg::max_diff(&got, &want) < 1e-10);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn json_round_trip() {
    for (name, g) in figures::all() {
        let repr = IodagRepr::from_iodag(&g);
        let text = serde_json::to_string(&repr).unwrap();
        let back: IodagRepr = serde_json::from_str(&text).unwrap();
        let h = back.to_iodag().unwrap();
        assert_eq!(h.indices(), g.indices(), "{name}");
        assert!(h.is_isomorphic(&g), "{name}");
    }
    let (g, interp) = diamond_interpretation(0, 2);
    let repr = InterpretationRepr::from_interpretation(&interp);
    let back = repr.to_interpretation(&g, 1e-9).unwrap();
    assert_eq!(back.maps["U3"], interp.maps["U3"]);
}

#[test]
fn explicit_indices_survive_serialization() {
    let mut r = IodagRepr::from_iodag(&figures::pass_through());
    r.inputs = vec!["X".into()];
    r.indices = vec![IndexRepr {
        name: "i".into(),
        wire: "X".into(),
        class: "k".into(),
    }];
    let g = r.to_iodag().unwrap();
    let again = IodagRepr::from_iodag(&g);
    assert_eq!(again.indices.len(), 1);
    assert_eq!(again.to_iodag().unwrap().indices(), g.indices());
}

#[test]
fn structural_errors() {
    assert_eq!(
        parse_wire("X^k, l").unwrap(),
        ("X".to_string(), vec!["k".to_string(), "l".to_string()])
    );
    assert!(parse_wire("X^").is_err());
    let mut r = IodagRepr::from_iodag(&figures::split());
    r.empty_nodes = vec!["n".into()];
    assert!(matches!(r.to_iodag(), Err(Error::InvalidIodag(_))));
    r.empty_nodes = vec!["zz".into()];
    assert!(matches!(r.to_iodag(), Err(Error::UnknownNode(_))));
    r.empty_nodes.clear();
    r.nodes[0].outputs.pop();
    assert!(matches!(r.to_iodag(), Err(Error::InvalidIodag(_))));
}

#[test]
fn dot_marks_superscripts() {
    let dot = figures::diamond().to_dot();
    assert!(dot.contains("label=\"L'^k\""));
    assert!(dot.contains("\"in:E_I\" -> \"n:U1\""));
}

fn dims(pairs: &[(&str, &[usize])]) -> BTreeMap<String, Vec<usize>> {
    pairs
        .iter()
        .map(|(w, d)| (w.to_string(), d.to_vec()))
        .collect()
}

/// Sector dims for which every diamond node admits a practical unitary:
/// `U1` and `U4` need `dim E = Σ_k dim L^k · dim R^k`, and `U2`, `U3` act
/// blockwise on `k`.
fn diamond_unitary_dims() -> BTreeMap<String, Vec<usize>> {
    dims(&[
        ("E_I", &[2]),
        ("A_I", &[2]),
        ("B_I", &[2]),
        ("L", &[1, 1]),
        ("R", &[1, 1]),
        ("L'", &[1, 1]),
        ("R'", &[1, 1]),
        ("A_O", &[2]),
        ("B_O", &[2]),
        ("E_O", &[2]),
    ])
}

#[test]
fn diamond_with_unitaries_is_unitary() {
    let g = figures::diamond();
    let l = g.uniform_lengths(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = diamond_unitary_dims();
    let interp = g
        .random_interpretation_with_dims(&mut rng, &l, &d, LintMode::Uni)
        .unwrap();
    let f = g.interpret(&interp, LintMode::Uni, 1e-9).unwrap();
    assert!(f.is_practical_unitary(1e-9));
    assert_eq!(f.domain().total_dim(), 8);
    assert_eq!(f.codomain().total_dim(), 8);
    let mut bad = d;
    bad.insert("E_O".into(), vec![3]);
    let err = g.random_interpretation_with_dims(&mut rng, &l, &bad, LintMode::Uni);
    assert!(matches!(err, Err(Error::NotPracticalIsometry(_))));
}

#[test]
fn preprocessing_projects_onto_matched_values() {
    let g = figures::join();
    let l = g.uniform_lengths(2);
    let pre = g.preprocessing(&l).unwrap();
    assert_eq!(pre.bar().count(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let interp = g.random_interpretation(&mut rng, &l, 1).unwrap();
    let space = interp.spaces["A"].tensor(&interp.spaces["B"]);
    let p = g.preprocessing_map(&space, &l).unwrap();
    let m = p.matrix();
    assert!(linalg::max_diff(&(m * m), m) < 1e-12);
    let rank: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
    assert_eq!(rank, 2.0);
    let q = figures::pass_through().preprocessing(&l).unwrap();
    assert_eq!(q, Corelation::identity(q.domain()));
}

#[test]
fn empty_node_means_identity() {
    let r = IodagRepr {
        inputs: vec!["X^k".into()],
        outputs: vec!["Y^k".into()],
        edges: vec![],
        nodes: vec![NodeRepr {
            id: "e".into(),
            inputs: vec!["X".into()],
            outputs: vec!["Y".into()],
        }],
        indices: vec![],
        empty_nodes: vec!["e".into()],
        interpretation: None,
    };
    let g = r.to_iodag().unwrap();
    let l = g.uniform_lengths(3);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let interp = g.random_interpretation(&mut rng, &l, 2).unwrap();
    let f = g.interpret(&interp, LintMode::Uni, 1e-9).unwrap();
    assert!(linalg::max_diff(f.matrix(), &linalg::identity(6)) < 1e-12);
}

#[test]
fn empty_diagram_is_neutral_for_parallel_composition() {
    for (name, g) in figures::all() {
        assert!(g.par(&Iodag::empty()).is_isomorphic(&g), "{name}");
        assert!(Iodag::empty().par(&g).is_isomorphic(&g), "{name}");
    }
}

#[test]
fn compositions_preserve_well_indexedness() {
    let figs = figures::all();
    for mode in [LintMode::Iso, LintMode::Uni] {
        for (_, g) in &figs {
            for (_, h) in &figs {
                if g.lint(mode).passed && h.lint(mode).passed {
                    assert!(g.par(h).lint(mode).passed);
                    if let Ok(c) = g.then(h) {
                        assert!(c.lint(mode).passed);
                    }
                }
            }
        }
    }
}

/// Restricts an interpretation of a composite to one of its parts.
fn restrict(interp: &Interpretation, g: &Iodag, rename: &dyn Fn(&str) -> String) -> Interpretation {
    Interpretation {
        lengths: g
            .class_names()
            .into_iter()
            .map(|c| (c.clone(), interp.lengths[&rename(&c)]))
            .collect(),
        spaces: g
            .wires()
            .map(|w| (w.clone(), interp.spaces[&rename(w)].clone()))
            .collect(),
        maps: g
            .nodes()
            .iter()
            .filter(|n| !g.is_empty_node(&n.id))
            .map(|n| (n.id.clone(), interp.maps[&rename(&n.id)].clone()))
            .collect(),
    }
}

#[test]
fn meaning_commutes_with_sequential_composition() {
    let (e, f3) = (figures::split(), figures::join());
    let g = e.then(&f3).unwrap();
    for seed in 0..3 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let interp = g
            .random_interpretation(&mut rng, &g.uniform_lengths(3), 2)
            .unwrap();
        let whole = g.interpret(&interp, LintMode::Iso, 1e-9).unwrap();
        let same = |s: &str| s.to_string();
        let first = e
            .interpret(&restrict(&interp, &e, &same), LintMode::Iso, 1e-9)
            .unwrap();
        let second = f3
            .interpret(&restrict(&interp, &f3, &same), LintMode::Iso, 1e-9)
            .unwrap();
        let parts = second.compose(&first).unwrap();
        assert!(linalg::max_diff(whole.matrix(), parts.matrix()) < 1e-9);
        assert_eq!(whole.route(), parts.route());
    }
}

#[test]
fn meaning_commutes_with_parallel_composition() {
    let (d, p) = (figures::diamond(), figures::pass_through());
    let g = d.par(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let interp = g
        .random_interpretation(&mut rng, &g.uniform_lengths(2), 1)
        .unwrap();
    let whole = g.interpret(&interp, LintMode::Iso, 1e-9).unwrap();
    let same = |s: &str| s.to_string();
    let renamed = |s: &str| {
        if s == "k" {
            "k#1".to_string()
        } else {
            s.to_string()
        }
    };
    let left = d
        .interpret(&restrict(&interp, &d, &same), LintMode::Iso, 1e-9)
        .unwrap();
    let right = p
        .interpret(&restrict(&interp, &p, &renamed), LintMode::Iso, 1e-9)
        .unwrap();
    let parts = left.tensor(&right);
    assert!(linalg::max_diff(whole.matrix(), parts.matrix()) < 1e-9);
}
