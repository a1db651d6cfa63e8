//! Small diagrams used throughout the tests and examples.
//!
//! `diamond`: one index created by `U1`, carried along two branches through
//! `U2` (Alice) and `U3` (Bob), and consumed by `U4`. The remaining ones are
//! the minimal shapes the lint and sequential composition have to tell apart.

use super::{Iodag, IodagRepr, NodeRepr};

fn build(
    inputs: &[&str],
    outputs: &[&str],
    edges: &[&str],
    nodes: &[(&str, &[&str], &[&str])],
) -> Iodag {
    let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    IodagRepr {
        inputs: owned(inputs),
        outputs: owned(outputs),
        edges: owned(edges),
        nodes: nodes
            .iter()
            .map(|(id, i, o)| NodeRepr {
                id: id.to_string(),
                inputs: owned(i),
                outputs: owned(o),
            })
            .collect(),
        indices: Vec::new(),
        empty_nodes: Vec::new(),
        interpretation: None,
    }
    .to_iodag()
    .expect("figure diagrams are valid")
}

/// `U1: E_I → L^k R^k`, `U2: L^k A_I → A_O L'^k`, `U3: R^k B_I → R'^k B_O`,
/// `U4: L'^k R'^k → E_O`.
pub fn diamond() -> Iodag {
    build(
        &["E_I", "A_I", "B_I"],
        &["A_O", "B_O", "E_O"],
        &["L^k", "R^k", "L'^k", "R'^k"],
        &[
            ("U1", &["E_I"], &["L", "R"]),
            ("U2", &["L", "A_I"], &["A_O", "L'"]),
            ("U3", &["R", "B_I"], &["R'", "B_O"]),
            ("U4", &["L'", "R'"], &["E_O"]),
        ],
    )
}

/// One node carrying an index from input to output.
pub fn pass_through() -> Iodag {
    build(&["X^k"], &["Y^k"], &[], &[("n", &["X"], &["Y"])])
}

/// The index is created at `n1` and ends at `n2` while also reaching the
/// outputs: fine for isometries, not for unitaries.
pub fn ends_early() -> Iodag {
    build(
        &["X"],
        &["Y", "R^k"],
        &["L^k"],
        &[("n1", &["X"], &["L", "R"]), ("n2", &["L"], &["Y"])],
    )
}

/// The index is created independently at `n1` and `n2`.
pub fn two_starts() -> Iodag {
    build(
        &["X1", "X2"],
        &["Y"],
        &["A^k", "B^k"],
        &[
            ("n1", &["X1"], &["A"]),
            ("n2", &["X2"], &["B"]),
            ("n3", &["A", "B"], &["Y"]),
        ],
    )
}

/// `n: X → A^k B^k`.
pub fn split() -> Iodag {
    build(&["X"], &["A^k", "B^k"], &[], &[("n", &["X"], &["A", "B"])])
}

/// Takes `A^k C^k`: the wires do not match [`split`]'s outputs.
pub fn join_other_wire() -> Iodag {
    build(&["A^k", "C^k"], &["Y"], &[], &[("m", &["A", "C"], &["Y"])])
}

/// Takes `A^k B^l`: the wires match [`split`] but the indices do not.
pub fn join_two_indices() -> Iodag {
    build(&["A^k", "B^l"], &["Y"], &[], &[("m", &["A", "B"], &["Y"])])
}

/// Takes `A^k B^k`: composes with [`split`].
pub fn join() -> Iodag {
    build(&["A^k", "B^k"], &["Y"], &[], &[("m", &["A", "B"], &["Y"])])
}

/// Every figure by name.
pub fn all() -> Vec<(&'static str, Iodag)> {
    vec![
        ("diamond", diamond()),
        ("pass_through", pass_through()),
        ("ends_early", ends_early()),
        ("two_starts", two_starts()),
        ("split", split()),
        ("join_other_wire", join_other_wire()),
        ("join_two_indices", join_two_indices()),
        ("join", join()),
    ]
}
