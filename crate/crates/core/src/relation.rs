//! Index relations between two finite sets: completeness, orders,
//! reduction to essential pairs, and the star decomposition of reduced
//! complete relations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fset::{hausdorff, same_spec, FSet};

/// Slack added to `d_H` when collecting proximal pairs.
pub const PROXIMAL_SLACK: f64 = 1e-12;

/// A set of index pairs `(i, j)` into sets of sizes `nx` and `ny`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    nx: usize,
    ny: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(nx: usize, ny: usize, pairs: I) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= nx || j >= ny) {
            return Err(Error::Argument(format!("pair ({i}, {j}) out of range for sizes ({nx}, {ny})")));
        }
        Ok(Self { nx, ny, pairs })
    }

    /// The identity relation on a set of size `n`.
    pub fn identity(n: usize) -> Self {
        Self { nx: n, ny: n, pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.contains(&pair)
    }

    /// Every index of both sides occurs in some pair.
    pub fn is_complete(&self) -> bool {
        let mut sx = vec![false; self.nx];
        let mut sy = vec![false; self.ny];
        for &(i, j) in &self.pairs {
            sx[i] = true;
            sy[j] = true;
        }
        sx.into_iter().chain(sy).all(|b| b)
    }

    fn left_count(&self, j: usize) -> usize {
        self.pairs.iter().filter(|p| p.1 == j).count()
    }

    fn right_count(&self, i: usize) -> usize {
        self.pairs.range((i, 0)..=(i, usize::MAX)).count()
    }

    /// `(O_l, O_r)`: the number of partners of `b` and of `a` for `pair = (a, b)`.
    pub fn orders(&self, pair: (usize, usize)) -> Result<(usize, usize)> {
        if !self.contains(pair) {
            return Err(Error::Argument(format!("pair {pair:?} is not in the relation")));
        }
        Ok((self.left_count(pair.1), self.right_count(pair.0)))
    }

    /// A pair is essential when removing it would leave one of its indices uncovered.
    pub fn is_essential(&self, pair: (usize, usize)) -> bool {
        self.contains(pair) && (self.left_count(pair.1) == 1 || self.right_count(pair.0) == 1)
    }

    pub fn is_reduced(&self) -> bool {
        self.pairs.iter().all(|&p| self.is_essential(p))
    }

    /// Removes the lexicographically first inessential pair until none is left.
    pub fn reduce(&self) -> Result<Relation> {
        if !self.is_complete() {
            return Err(Error::Argument("cannot reduce an incomplete relation".into()));
        }
        let mut out = self.clone();
        while let Some(p) = out.pairs.iter().copied().find(|&p| !out.is_essential(p)) {
            out.pairs.remove(&p);
        }
        Ok(out)
    }

    /// Splits a reduced complete relation into the graph of a surjection
    /// `f: x' -> y'` and the transposed graph of a surjection `g: y'' -> x''`.
    pub fn decompose(&self) -> Result<Decomposition> {
        if !self.is_complete() {
            return Err(Error::Argument("cannot decompose an incomplete relation".into()));
        }
        if !self.is_reduced() {
            return Err(Error::Argument("cannot decompose a relation that is not reduced".into()));
        }
        let mut f = BTreeMap::new();
        let mut g = BTreeMap::new();
        for &(a, b) in &self.pairs {
            if self.right_count(a) == 1 {
                f.insert(a, b);
            } else {
                g.insert(b, a);
            }
        }
        let x_prime: Vec<usize> = f.keys().copied().collect();
        let y_prime: BTreeSet<usize> = f.values().copied().collect();
        let y_double_prime: Vec<usize> = g.keys().copied().collect();
        let x_double_prime: BTreeSet<usize> = g.values().copied().collect();
        Ok(Decomposition {
            nx: self.nx,
            ny: self.ny,
            x_prime,
            x_double_prime: x_double_prime.into_iter().collect(),
            y_prime: y_prime.into_iter().collect(),
            y_double_prime,
            f,
            g,
        })
    }
}

/// Index partition `x = x' ⊔ x''`, `y = y' ⊔ y''` with surjections
/// `f: x' -> y'` and `g: y'' -> x''`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub nx: usize,
    pub ny: usize,
    pub x_prime: Vec<usize>,
    pub x_double_prime: Vec<usize>,
    pub y_prime: Vec<usize>,
    pub y_double_prime: Vec<usize>,
    pub f: BTreeMap<usize, usize>,
    pub g: BTreeMap<usize, usize>,
}

impl Decomposition {
    /// Rebuilds `{(a, f(a))} ∪ {(g(b), b)}`.
    pub fn reassemble(&self) -> Relation {
        let pairs = self.f.iter().map(|(&a, &b)| (a, b)).chain(self.g.iter().map(|(&b, &a)| (a, b)));
        Relation { nx: self.nx, ny: self.ny, pairs: pairs.collect() }
    }
}

/// All pairs `(i, j)` with `d(x_i, y_j) <= d_H(x, y)`; always complete.
pub fn proximal_relation(x: &FSet, y: &FSet) -> Result<Relation> {
    same_spec(x, y)?;
    let rho = hausdorff(x, y)? + PROXIMAL_SLACK;
    let spec = x.spec();
    let mut pairs = BTreeSet::new();
    for (i, a) in x.points().iter().enumerate() {
        for (j, b) in y.points().iter().enumerate() {
            if spec.dist(a, b) <= rho {
                pairs.insert((i, j));
            }
        }
    }
    Ok(Relation { nx: x.len(), ny: y.len(), pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(nx: usize, ny: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::new(nx, ny, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn proximal_relation_examples() {
        let x = FSet::on_line(&[0.0, 1.0], 2).unwrap();
        assert_eq!(proximal_relation(&x, &x).unwrap(), Relation::identity(2));

        let x = FSet::on_line(&[0.0, 3.0, 5.0], 3).unwrap();
        let y = FSet::on_line(&[-1.0, 1.0, 4.0], 3).unwrap();
        assert_eq!(proximal_relation(&x, &y).unwrap(), rel(3, 3, &[(0, 0), (0, 1), (1, 2), (2, 2)]));

        let x = FSet::on_line(&[0.0], 2).unwrap();
        let y = FSet::on_line(&[-1.0, 1.0], 2).unwrap();
        assert_eq!(proximal_relation(&x, &y).unwrap(), rel(1, 2, &[(0, 0), (0, 1)]));
    }

    #[test]
    fn orders_examples() {
        assert_eq!(rel(1, 1, &[(0, 0)]).orders((0, 0)).unwrap(), (1, 1));
        let r = rel(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(r.orders((0, 0)).unwrap(), (2, 2));
        assert_eq!(r.orders((1, 0)).unwrap(), (2, 1));
        assert!(matches!(r.orders((1, 1)), Err(Error::Argument(_))));
    }

    #[test]
    fn reduce_examples() {
        let r = rel(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        assert_eq!(r.reduce().unwrap(), rel(2, 2, &[(0, 1), (1, 0)]));
        let r = rel(2, 1, &[(0, 0), (1, 0)]);
        assert_eq!(r.reduce().unwrap(), r);
        assert!(matches!(rel(2, 2, &[(0, 0)]).reduce(), Err(Error::Argument(_))));
    }

    #[test]
    fn decompose_examples() {
        let d = rel(3, 2, &[(0, 0), (1, 0), (2, 1)]).decompose().unwrap();
        assert_eq!(d.x_prime, vec![0, 1, 2]);
        assert_eq!(d.y_prime, vec![0, 1]);
        assert!(d.y_double_prime.is_empty() && d.x_double_prime.is_empty());

        let d = rel(1, 2, &[(0, 0), (0, 1)]).decompose().unwrap();
        assert!(d.x_prime.is_empty());
        assert_eq!(d.y_double_prime, vec![0, 1]);
        assert_eq!(d.g, BTreeMap::from([(0, 0), (1, 0)]));

        let d = rel(1, 1, &[(0, 0)]).decompose().unwrap();
        assert_eq!(d.x_prime, vec![0]);
        assert_eq!(d.f, BTreeMap::from([(0, 0)]));

        assert!(rel(2, 2, &[(0, 0), (0, 1), (1, 0)]).decompose().is_err());
    }

    #[test]
    fn spaced_pair_relation_is_already_reduced() {
        let x = FSet::on_line(&[0.0, 3.0, 5.0], 3).unwrap();
        let y = FSet::on_line(&[-1.0, 1.0, 4.0], 3).unwrap();
        let r = proximal_relation(&x, &y).unwrap();
        assert_eq!(r.reduce().unwrap(), r);
        let d = r.decompose().unwrap();
        assert_eq!(d.x_double_prime, vec![0]);
        assert_eq!(d.y_prime, vec![2]);
    }

    fn arb_complete() -> impl Strategy<Value = Relation> {
        (1usize..=5, 1usize..=5)
            .prop_flat_map(|(nx, ny)| (Just(nx), Just(ny), prop::collection::vec(any::<bool>(), nx * ny)))
            .prop_map(|(nx, ny, mask)| {
                let mut pairs: BTreeSet<_> =
                    (0..nx * ny).filter(|&k| mask[k]).map(|k| (k / ny, k % ny)).collect();
                for i in 0..nx {
                    pairs.insert((i, i % ny));
                }
                for j in 0..ny {
                    pairs.insert((j % nx, j));
                }
                Relation::new(nx, ny, pairs).unwrap()
            })
    }

    proptest! {
        #[test]
        fn reduce_is_a_reduced_complete_subrelation(r in arb_complete()) {
            let red = r.reduce().unwrap();
            prop_assert!(red.pairs.is_subset(&r.pairs));
            prop_assert!(red.is_complete());
            for &p in &red.pairs {
                let (l, rr) = red.orders(p).unwrap();
                prop_assert!(l == 1 || rr == 1);
            }
            prop_assert_eq!(red.reduce().unwrap(), red.clone());
            let bound = r.nx.max(r.ny).max(r.nx + r.ny - 2);
            prop_assert!(red.len() <= bound);
        }

        #[test]
        fn decompose_round_trips(r in arb_complete()) {
            let red = r.reduce().unwrap();
            let d = red.decompose().unwrap();
            prop_assert_eq!(d.reassemble(), red);
            let xs: BTreeSet<usize> = d.x_prime.iter().chain(&d.x_double_prime).copied().collect();
            let ys: BTreeSet<usize> = d.y_prime.iter().chain(&d.y_double_prime).copied().collect();
            prop_assert_eq!(xs.len(), r.nx);
            prop_assert_eq!(d.x_prime.len() + d.x_double_prime.len(), r.nx);
            prop_assert_eq!(ys.len(), r.ny);
            prop_assert_eq!(d.y_prime.len() + d.y_double_prime.len(), r.ny);
        }
    }
}
