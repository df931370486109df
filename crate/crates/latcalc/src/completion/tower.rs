//! The closure tower of a generated lattice under a set of homogeneous
//! functions.

use crate::completion::expr::{eval_expr, Expr};
use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousFn;
use crate::lattice::Element;

/// A finite, reproducible sample of the stages `E_1 c E_2 c ...` of the
/// closure of a generated lattice under a nonempty set of homogeneous
/// functions. Stage 1 holds the generators; each [`Tower::closure_step`]
/// adjoins every application of a set function to the previous stage (in set
/// order, with lexicographic child tuples, capped by a budget) together with
/// a deterministic set of lattice combinations of the new applications.
///
/// The stages are cumulative: stage `n+1` begins with all of stage `n`, and
/// every application node adjoined at stage `n+1` has children drawn from
/// stage `n`.
#[derive(Debug, Clone)]
pub struct Tower {
    generators: Vec<Element>,
    dee: Vec<HomogeneousFn>,
    levels: Vec<Vec<Expr>>,
}

impl Tower {
    /// Seeds a tower. The function set must be nonempty and the generators
    /// nonempty and on one grid.
    pub fn new(generators: Vec<Element>, dee: Vec<HomogeneousFn>) -> Result<Self> {
        if dee.is_empty() {
            return Err(Error::InvalidParameter(
                "the function set of a completion must be nonempty".into(),
            ));
        }
        if generators.is_empty() {
            return Err(Error::InvalidParameter(
                "a tower needs at least one generator".into(),
            ));
        }
        for g in &generators[1..] {
            if !g.same_lattice(&generators[0]) {
                return Err(Error::LatticeMismatch(
                    "generators must live on one grid".into(),
                ));
            }
        }
        let level1 = (0..generators.len()).map(Expr::Generator).collect();
        Ok(Tower {
            generators,
            dee,
            levels: vec![level1],
        })
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn dee(&self) -> &[HomogeneousFn] {
        &self.dee
    }

    pub fn levels(&self) -> &[Vec<Expr>] {
        &self.levels
    }

    pub fn top(&self) -> &[Expr] {
        self.levels.last().expect("a tower has at least one level")
    }

    /// Evaluates every expression of level `n` (1-based) on the generators.
    pub fn eval_level(&self, n: usize) -> Result<Vec<Element>> {
        let level = self.levels.get(n - 1).ok_or_else(|| {
            Error::InvalidParameter(format!("tower has {} levels, asked for {n}", self.levels.len()))
        })?;
        level
            .iter()
            .map(|e| eval_expr(e, &self.generators))
            .collect()
    }

    /// Builds the next stage. `budget` bounds the number of new application
    /// atoms; enumeration is by function in set order, then lexicographic
    /// child tuples over the previous stage, so the result is reproducible.
    pub fn closure_step(&self, budget: usize) -> Result<Tower> {
        if budget < 1 {
            return Err(Error::InvalidParameter("budget must be >= 1".into()));
        }
        let prev = self.top();
        let mut next = prev.to_vec();
        let mut new_applys: Vec<Expr> = Vec::new();

        'outer: for h in &self.dee {
            let arity = h.arity();
            let mut idx = vec![0usize; arity];
            loop {
                let children: Vec<Expr> = idx.iter().map(|i| prev[*i].clone()).collect();
                let candidate = Expr::Apply(h.name().to_string(), children);
                if !next.contains(&candidate) {
                    next.push(candidate.clone());
                    new_applys.push(candidate);
                    if new_applys.len() >= budget {
                        break 'outer;
                    }
                }
                // advance the child-tuple odometer, last position fastest
                let mut pos = arity;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < prev.len() {
                        break;
                    }
                    idx[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
        }

        // deterministic lattice combinations of the fresh atoms
        for pair in new_applys.chunks(2) {
            if let [a, b] = pair {
                for combo in [
                    Expr::sup(a.clone(), b.clone()),
                    Expr::inf(a.clone(), b.clone()),
                ] {
                    if !next.contains(&combo) {
                        next.push(combo);
                    }
                }
            }
        }
        if let Some(first) = new_applys.first() {
            let combo = Expr::add(first.clone(), Expr::scale(-1.0, prev[0].clone()));
            if !next.contains(&combo) {
                next.push(combo);
            }
        }

        let mut levels = self.levels.clone();
        levels.push(next);
        Ok(Tower {
            generators: self.generators.clone(),
            dee: self.dee.clone(),
            levels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::{euclidean_norm, stolarsky};
    use crate::lattice::GridLattice;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridLattice> {
        GridLattice::with_size(n).unwrap()
    }

    fn elem(g: &Arc<GridLattice>, vals: &[f64]) -> Element {
        Element::new(g.clone(), vals.to_vec()).unwrap()
    }

    #[test]
    fn empty_function_set_is_rejected() {
        let g = grid(2);
        assert!(Tower::new(vec![elem(&g, &[1.0, -2.0])], vec![]).is_err());
    }

    #[test]
    fn square_mean_diagonal_reaches_the_modulus() {
        let g = grid(3);
        let f = elem(&g, &[1.0, -2.0, 0.5]);
        let t = Tower::new(vec![f.clone()], vec![stolarsky(2.0, 4.0).unwrap()]).unwrap();
        let t2 = t.closure_step(100).unwrap();
        let diag = Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(0)]);
        assert!(t2.top().contains(&diag));
        let vals = eval_expr(&diag, t2.generators()).unwrap();
        assert_eq!(vals.values(), f.abs().values());
    }

    #[test]
    fn norm_closure_reaches_the_hypotenuse() {
        let g = grid(2);
        let f = elem(&g, &[3.0, 1.0]);
        let h = elem(&g, &[4.0, 1.0]);
        let t = Tower::new(vec![f, h], vec![euclidean_norm(2).unwrap()]).unwrap();
        let t2 = t.closure_step(100).unwrap();
        let target = Expr::apply("norm:2", vec![Expr::gen(0), Expr::gen(1)]);
        assert!(t2.top().contains(&target));
        let vals = eval_expr(&target, t2.generators()).unwrap();
        assert_eq!(vals.values()[0], 5.0);
    }

    #[test]
    fn levels_are_cumulative_and_eval_images_nest() {
        let g = grid(4);
        let t = Tower::new(
            vec![elem(&g, &[1.0, 2.0, -1.0, 0.5]), elem(&g, &[0.5, -2.0, 3.0, 1.0])],
            vec![stolarsky(2.0, 4.0).unwrap()],
        )
        .unwrap();
        let t3 = t.closure_step(2000).unwrap().closure_step(2000).unwrap();
        for n in 0..t3.levels().len() - 1 {
            let (a, b) = (&t3.levels()[n], &t3.levels()[n + 1]);
            assert!(a.len() <= b.len());
            assert_eq!(&b[..a.len()], &a[..], "levels must be cumulative");
        }
        let e2 = t3.eval_level(2).unwrap();
        let e3 = t3.eval_level(3).unwrap();
        for (x, y) in e2.iter().zip(&e3) {
            assert!(x.sup_distance(y).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn budget_caps_the_new_applications() {
        let g = grid(2);
        let t = Tower::new(
            vec![elem(&g, &[1.0, 2.0]), elem(&g, &[2.0, 1.0])],
            vec![stolarsky(2.0, 4.0).unwrap()],
        )
        .unwrap();
        let t2 = t.closure_step(3).unwrap();
        let applys = t2
            .top()
            .iter()
            .filter(|e| matches!(e, Expr::Apply(_, _)))
            .count();
        assert_eq!(applys, 3);
        assert!(t.closure_step(0).is_err());
    }
}
