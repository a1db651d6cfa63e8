//! Index-matchings checked against a transitive-closure oracle and their
//! value-level semantics.

use routed::iodag::{nonforgetting_compose, Corelation, IndexFamily};
use routed::Relation;

/// Every family of up to `max` names with lengths in `1..=max_len`.
fn families(prefix: &str, max: usize, max_len: usize) -> Vec<IndexFamily> {
    let mut out = Vec::new();
    for n in 0..=max {
        let total = max_len.pow(n as u32);
        for t in 0..total {
            let mut t = t;
            let entries: Vec<(String, usize)> = (0..n)
                .map(|i| {
                    let l = 1 + t % max_len;
                    t /= max_len;
                    (format!("{prefix}{i}"), l)
                })
                .collect();
            out.push(IndexFamily::new(entries).unwrap());
        }
    }
    out
}

/// Reachability over `A ⊔ B ⊔ C` by Floyd-Warshall on the union of both
/// relations, returned as a matrix.
fn closure(first: &Corelation, second: &Corelation) -> Vec<Vec<bool>> {
    let (na, nb, nc) = (
        first.domain().len(),
        first.codomain().len(),
        second.codomain().len(),
    );
    let n = na + nb + nc;
    let mut r = vec![vec![false; n]; n];
    for (x, row) in r.iter_mut().enumerate().take(na + nb) {
        for (y, cell) in row.iter_mut().enumerate().take(na + nb) {
            *cell |= first.partition().related(x, y);
        }
    }
    for x in 0..nb + nc {
        for y in 0..nb + nc {
            r[na + x][na + y] |= second.partition().related(x, y);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn triples(
    max: usize,
    max_len: usize,
) -> impl Iterator<Item = (IndexFamily, IndexFamily, IndexFamily)> {
    let (a, b, c) = (
        families("a", max, max_len),
        families("b", max, max_len),
        families("c", max, max_len),
    );
    let mut out = Vec::new();
    for fa in &a {
        for fb in &b {
            for fc in &c {
                out.push((fa.clone(), fb.clone(), fc.clone()));
            }
        }
    }
    out.into_iter()
}

#[test]
fn composition_is_the_transitive_closure_restricted_to_the_ends() {
    for (fa, fb, fc) in triples(2, 2) {
        for f in Corelation::all(&fa, &fb) {
            for g in Corelation::all(&fb, &fc) {
                let h = g.compose(&f).unwrap();
                let r = closure(&f, &g);
                let (na, nb) = (fa.len(), fb.len());
                let ends: Vec<usize> = (0..na).chain(na + nb..na + nb + fc.len()).collect();
                for (i, &x) in ends.iter().enumerate() {
                    for (j, &y) in ends.iter().enumerate() {
                        assert_eq!(h.partition().related(i, j), r[x][y], "{f} then {g}");
                    }
                }
            }
        }
    }
}

#[test]
fn bar_is_functorial_on_mixed_lengths() {
    for (fa, fb, fc) in triples(2, 3) {
        let firsts = Corelation::all(&fa, &fb);
        let seconds = Corelation::all(&fb, &fc);
        let bars: Vec<Relation> = seconds.iter().map(Corelation::bar).collect();
        for f in &firsts {
            let fbar = f.bar();
            for (g, gbar) in seconds.iter().zip(&bars) {
                assert_eq!(
                    g.compose(f).unwrap().bar(),
                    gbar.compose(&fbar).unwrap(),
                    "{f} then {g}"
                );
            }
        }
    }
}

#[test]
fn bar_preserves_products_and_transposes() {
    for fa in families("a", 2, 2) {
        for fb in families("b", 1, 2) {
            for f in Corelation::all(&fa, &fb) {
                assert_eq!(f.transpose().bar(), f.bar().transpose());
                for g in Corelation::all(&fb, &fa) {
                    assert_eq!(f.product(&g).bar(), f.bar().product(&g.bar()));
                }
            }
        }
    }
}

#[test]
fn nonforgetting_composition_restricts_to_its_parts() {
    let mut checked = 0;
    for (fa, fb, fc) in triples(2, 2) {
        for f in Corelation::all(&fa, &fb) {
            for g in Corelation::all(&fb, &fc) {
                let (na, nb, nc) = (fa.len(), fb.len(), fc.len());
                let Ok(p) = nonforgetting_compose(&f, &g) else {
                    // only allowed when the two disagree on the shared family
                    let b1 = f.partition().restrict(&(na..na + nb).collect::<Vec<_>>());
                    let b2 = g.partition().restrict(&(0..nb).collect::<Vec<_>>());
                    assert_ne!(b1, b2);
                    continue;
                };
                checked += 1;
                let ab: Vec<usize> = (0..na + nb).collect();
                let bc: Vec<usize> = (na..na + nb + nc).collect();
                let ac: Vec<usize> = (0..na).chain(na + nb..na + nb + nc).collect();
                assert_eq!(&p.restrict(&ab), f.partition());
                assert_eq!(&p.restrict(&bc), g.partition());
                assert_eq!(&p.restrict(&ac), g.compose(&f).unwrap().partition());
            }
        }
    }
    assert!(checked > 1000);
}
