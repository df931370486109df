//! Expression trees over generators.

use std::fmt;

use crate::calculus::pointwise_apply;
use crate::error::{Error, Result};
use crate::homogeneous::resolve_spec;
use crate::lattice::Element;

/// An expression over generators: scalar multiples, sums, joins, meets, and
/// applications of registry functions (by name). Application nodes must have
/// exactly as many children as the named function's arity; this is checked
/// on evaluation and by the expression parser.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Generator(usize),
    Scale(f64, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sup(Box<Expr>, Box<Expr>),
    Inf(Box<Expr>, Box<Expr>),
    Apply(String, Vec<Expr>),
}

impl Expr {
    pub fn gen(i: usize) -> Expr {
        Expr::Generator(i)
    }

    pub fn scale(k: f64, e: Expr) -> Expr {
        Expr::Scale(k, Box::new(e))
    }

    // associated constructor, not std::ops::Add
    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sup(a: Expr, b: Expr) -> Expr {
        Expr::Sup(Box::new(a), Box::new(b))
    }

    pub fn inf(a: Expr, b: Expr) -> Expr {
        Expr::Inf(Box::new(a), Box::new(b))
    }

    pub fn apply(name: &str, children: Vec<Expr>) -> Expr {
        Expr::Apply(name.to_string(), children)
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Generator(_) => 1,
            Expr::Scale(_, e) => 1 + e.depth(),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Apply(_, ch) => 1 + ch.iter().map(Expr::depth).max().unwrap_or(0),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Generator(_) => 1,
            Expr::Scale(_, e) => 1 + e.node_count(),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Apply(_, ch) => 1 + ch.iter().map(Expr::node_count).sum::<usize>(),
        }
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        match self {
            Expr::Generator(i) => Some(*i),
            Expr::Scale(_, e) => e.max_generator(),
            Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => {
                match (a.max_generator(), b.max_generator()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Apply(_, ch) => ch.iter().filter_map(Expr::max_generator).max(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Generator(i) => write!(f, "gen({i})"),
            Expr::Scale(k, e) => match **e {
                Expr::Add(_, _) => write!(f, "{k} * ({e})"),
                _ => write!(f, "{k} * {e}"),
            },
            Expr::Add(a, b) => write!(f, "{a} + {b}"),
            Expr::Sup(a, b) => write!(f, "sup({a}, {b})"),
            Expr::Inf(a, b) => write!(f, "inf({a}, {b})"),
            Expr::Apply(name, ch) => {
                write!(f, "apply({name}; ")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Evaluates an expression on an assignment of grid elements to generators.
/// Application nodes go through the pointwise oracle.
pub fn eval_expr(e: &Expr, assignment: &[Element]) -> Result<Element> {
    if assignment.is_empty() {
        return Err(Error::InvalidParameter(
            "an assignment needs at least one element".into(),
        ));
    }
    for a in &assignment[1..] {
        if !a.same_lattice(&assignment[0]) {
            return Err(Error::LatticeMismatch(
                "assignment elements must live on one grid".into(),
            ));
        }
    }
    eval_rec(e, assignment)
}

fn eval_rec(e: &Expr, assignment: &[Element]) -> Result<Element> {
    match e {
        Expr::Generator(i) => assignment.get(*i).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!(
                "generator {i} is not covered by the assignment of length {}",
                assignment.len()
            ))
        }),
        Expr::Scale(k, inner) => eval_rec(inner, assignment)?.scale(*k),
        Expr::Add(a, b) => eval_rec(a, assignment)?.add(&eval_rec(b, assignment)?),
        Expr::Sup(a, b) => eval_rec(a, assignment)?.sup(&eval_rec(b, assignment)?),
        Expr::Inf(a, b) => eval_rec(a, assignment)?.inf(&eval_rec(b, assignment)?),
        Expr::Apply(name, children) => {
            let h = resolve_spec(name)?;
            if children.len() != h.arity() {
                return Err(Error::ArityMismatch {
                    name: name.clone(),
                    expected: h.arity(),
                    got: children.len(),
                });
            }
            let args: Vec<Element> = children
                .iter()
                .map(|c| eval_rec(c, assignment))
                .collect::<Result<_>>()?;
            pointwise_apply(&h, &args)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GridLattice;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridLattice> {
        GridLattice::with_size(n).unwrap()
    }

    fn elem(g: &Arc<GridLattice>, vals: &[f64]) -> Element {
        Element::new(g.clone(), vals.to_vec()).unwrap()
    }

    #[test]
    fn generator_lookup() {
        let g = grid(2);
        let f = elem(&g, &[1.0, 2.0]);
        let out = eval_expr(&Expr::gen(0), std::slice::from_ref(&f)).unwrap();
        assert_eq!(out.values(), f.values());
        assert!(eval_expr(&Expr::gen(1), &[f]).is_err());
    }

    #[test]
    fn apply_square_mean() {
        let g = grid(1);
        let e = Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(1)]);
        let out = eval_expr(&e, &[elem(&g, &[3.0]), elem(&g, &[4.0])]).unwrap();
        assert!((out.values()[0] - 12.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sup_of_scaled_generators() {
        let g = grid(2);
        let e = Expr::sup(Expr::scale(2.0, Expr::gen(0)), Expr::gen(1));
        let out = eval_expr(&e, &[elem(&g, &[1.0, 5.0]), elem(&g, &[3.0, 4.0])]).unwrap();
        assert_eq!(out.values(), &[3.0, 10.0]);
    }

    #[test]
    fn apply_arity_and_name_errors() {
        let g = grid(1);
        let f = elem(&g, &[1.0]);
        let bad_arity = Expr::apply("norm:2", vec![Expr::gen(0)]);
        assert!(matches!(
            eval_expr(&bad_arity, std::slice::from_ref(&f)),
            Err(Error::ArityMismatch { .. })
        ));
        let bad_name = Expr::apply("wat:2", vec![Expr::gen(0), Expr::gen(0)]);
        assert!(matches!(
            eval_expr(&bad_name, &[f]),
            Err(Error::UnknownFunction(_))
        ));
    }

    #[test]
    fn display_round_trips_the_grammar_shape() {
        let e = Expr::add(
            Expr::scale(-1.5, Expr::sup(Expr::gen(0), Expr::gen(1))),
            Expr::apply("mu:2,4", vec![Expr::gen(0), Expr::gen(1)]),
        );
        assert_eq!(
            e.to_string(),
            "-1.5 * sup(gen(0), gen(1)) + apply(mu:2,4; gen(0), gen(1))"
        );
        assert_eq!(e.depth(), 4);
        assert_eq!(e.max_generator(), Some(1));
    }
}
