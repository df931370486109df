//! Inf-sup normal form for lattice expressions.
//!
//! Every element of a generated vector sublattice can be written as a finite
//! meet of finite joins of linear combinations of the generators; here the
//! atoms are generators and application nodes (applications are not linear,
//! so they stay opaque). The rewrite distributes scalar multiples and sums
//! over joins and meets, flipping joins and meets under negative scalars.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::completion::expr::{eval_expr, Expr};
use crate::error::{Error, Result};
use crate::lattice::{Element, GridLattice};

/// Hard cap on the number of linear combinations a rewrite may produce.
const MAX_COMBINATIONS: usize = 1_000_000;

/// A meet of joins of linear combinations over a shared atom list.
///
/// `terms[i][j]` is the coefficient vector (one entry per atom) of the
/// `j`-th join operand inside the `i`-th meet operand.
#[derive(Debug, Clone)]
pub struct InfSupForm {
    pub atoms: Vec<Expr>,
    pub terms: Vec<Vec<Vec<f64>>>,
}

impl InfSupForm {
    pub fn num_combinations(&self) -> usize {
        self.terms.iter().map(Vec::len).sum()
    }

    /// Evaluates the form: pointwise, the min over meet operands of the max
    /// over join operands of the linear combination of atom values.
    pub fn eval(&self, assignment: &[Element]) -> Result<Element> {
        let atom_values: Vec<Element> = self
            .atoms
            .iter()
            .map(|a| eval_expr(a, assignment))
            .collect::<Result<_>>()?;
        let lattice = atom_values
            .first()
            .map(|e| e.lattice().clone())
            .unwrap_or_else(|| assignment[0].lattice().clone());
        let npts = lattice.size();
        let mut out = Vec::with_capacity(npts);
        for p in 0..npts {
            let mut inf = f64::INFINITY;
            for branch in &self.terms {
                let mut sup = f64::NEG_INFINITY;
                for comb in branch {
                    let v: f64 = comb
                        .iter()
                        .zip(&atom_values)
                        .map(|(c, a)| c * a.values()[p])
                        .sum();
                    sup = sup.max(v);
                }
                inf = inf.min(sup);
            }
            out.push(inf);
        }
        Element::new(lattice, out)
    }

    /// Rebuilds an expression (meet chain of join chains of scaled-atom
    /// sums) that evaluates like the form. The chain nests as deep as the
    /// combination count, so recursive consumers should only expr-ify
    /// small forms.
    pub fn to_expr(&self) -> Expr {
        let comb_expr = |coeffs: &[f64]| -> Expr {
            let mut acc: Option<Expr> = None;
            for (c, atom) in coeffs.iter().zip(&self.atoms) {
                if *c == 0.0 {
                    continue;
                }
                let term = Expr::scale(*c, atom.clone());
                acc = Some(match acc {
                    None => term,
                    Some(a) => Expr::add(a, term),
                });
            }
            acc.unwrap_or_else(|| Expr::scale(0.0, self.atoms[0].clone()))
        };
        let mut inf_acc: Option<Expr> = None;
        for branch in &self.terms {
            let mut sup_acc: Option<Expr> = None;
            for comb in branch {
                let e = comb_expr(comb);
                sup_acc = Some(match sup_acc {
                    None => e,
                    Some(a) => Expr::sup(a, e),
                });
            }
            let branch_expr = sup_acc.expect("a branch has at least one combination");
            inf_acc = Some(match inf_acc {
                None => branch_expr,
                Some(a) => Expr::inf(a, branch_expr),
            });
        }
        inf_acc.expect("a form has at least one branch")
    }
}

/// Raw rewrite state: meet of joins of coefficient vectors.
type Form = Vec<Vec<Vec<f64>>>;

fn count(f: &Form) -> usize {
    f.iter().map(Vec::len).sum()
}

fn guard(f: &Form) -> Result<()> {
    let c = count(f);
    if c > MAX_COMBINATIONS {
        return Err(Error::ExpressionTooLarge(c));
    }
    Ok(())
}

/// Collects atoms (generators and application nodes) in traversal order.
fn collect_atoms(e: &Expr, atoms: &mut Vec<Expr>) {
    match e {
        Expr::Generator(_) | Expr::Apply(_, _) => {
            if !atoms.contains(e) {
                atoms.push(e.clone());
            }
        }
        Expr::Scale(_, inner) => collect_atoms(inner, atoms),
        Expr::Add(a, b) | Expr::Sup(a, b) | Expr::Inf(a, b) => {
            collect_atoms(a, atoms);
            collect_atoms(b, atoms);
        }
    }
}

fn rewrite(e: &Expr, atoms: &[Expr]) -> Result<Form> {
    match e {
        Expr::Generator(_) | Expr::Apply(_, _) => {
            let idx = atoms
                .iter()
                .position(|a| a == e)
                .expect("atom was collected");
            let mut comb = vec![0.0; atoms.len()];
            comb[idx] = 1.0;
            Ok(vec![vec![comb]])
        }
        Expr::Scale(k, inner) => {
            let f = rewrite(inner, atoms)?;
            if *k >= 0.0 {
                Ok(f.into_iter()
                    .map(|branch| {
                        branch
                            .into_iter()
                            .map(|comb| comb.into_iter().map(|c| k * c).collect())
                            .collect()
                    })
                    .collect())
            } else {
                // k < 0 swaps meets and joins:
                //   k * (inf_i sup_j L_ij) = sup_i inf_j (k L_ij)
                // and a sup of infs redistributes to a meet over all choice
                // functions sigma of sup_i (k L_{i, sigma(i)})
                let sizes: Vec<usize> = f.iter().map(Vec::len).collect();
                let total: usize = sizes.iter().try_fold(1usize, |acc, s| {
                    acc.checked_mul(*s)
                        .filter(|t| *t <= MAX_COMBINATIONS)
                        .ok_or(Error::ExpressionTooLarge(MAX_COMBINATIONS + 1))
                })?;
                if total.saturating_mul(f.len()) > MAX_COMBINATIONS {
                    return Err(Error::ExpressionTooLarge(total.saturating_mul(f.len())));
                }
                let mut out = Vec::with_capacity(total);
                let mut sigma = vec![0usize; f.len()];
                loop {
                    let sup_layer: Vec<Vec<f64>> = f
                        .iter()
                        .zip(&sigma)
                        .map(|(branch, j)| branch[*j].iter().map(|c| k * c).collect())
                        .collect();
                    out.push(sup_layer);
                    // advance sigma
                    let mut pos = f.len();
                    loop {
                        if pos == 0 {
                            break;
                        }
                        pos -= 1;
                        sigma[pos] += 1;
                        if sigma[pos] < sizes[pos] {
                            break;
                        }
                        sigma[pos] = 0;
                        if pos == 0 {
                            pos = usize::MAX;
                            break;
                        }
                    }
                    if pos == usize::MAX {
                        break;
                    }
                }
                guard(&out)?;
                Ok(out)
            }
        }
        Expr::Add(a, b) => {
            let (fa, fb) = (rewrite(a, atoms)?, rewrite(b, atoms)?);
            if count(&fa).saturating_mul(count(&fb)) > MAX_COMBINATIONS {
                return Err(Error::ExpressionTooLarge(
                    count(&fa).saturating_mul(count(&fb)),
                ));
            }
            let mut out = Vec::with_capacity(fa.len() * fb.len());
            for ba in &fa {
                for bb in &fb {
                    let mut sup_layer = Vec::with_capacity(ba.len() * bb.len());
                    for ca in ba {
                        for cb in bb {
                            sup_layer
                                .push(ca.iter().zip(cb).map(|(x, y)| x + y).collect::<Vec<f64>>());
                        }
                    }
                    out.push(sup_layer);
                }
            }
            guard(&out)?;
            Ok(out)
        }
        Expr::Sup(a, b) => {
            let (fa, fb) = (rewrite(a, atoms)?, rewrite(b, atoms)?);
            let projected = fb
                .len()
                .saturating_mul(count(&fa))
                .saturating_add(fa.len().saturating_mul(count(&fb)));
            if projected > MAX_COMBINATIONS {
                return Err(Error::ExpressionTooLarge(projected));
            }
            let mut out = Vec::with_capacity(fa.len() * fb.len());
            for ba in &fa {
                for bb in &fb {
                    let mut sup_layer = ba.clone();
                    sup_layer.extend(bb.iter().cloned());
                    out.push(sup_layer);
                }
            }
            guard(&out)?;
            Ok(out)
        }
        Expr::Inf(a, b) => {
            let mut out = rewrite(a, atoms)?;
            out.extend(rewrite(b, atoms)?);
            guard(&out)?;
            Ok(out)
        }
    }
}

/// Rewrites an expression into inf-sup normal form and cross-checks the
/// result against direct evaluation on a reference 32-point grid with a
/// seeded random assignment.
pub fn normalize(e: &Expr) -> Result<InfSupForm> {
    let mut atoms = Vec::new();
    collect_atoms(e, &mut atoms);
    if atoms.is_empty() {
        return Err(Error::InvalidParameter(
            "expression has no generators or applications".into(),
        ));
    }
    let terms = rewrite(e, &atoms)?;
    let form = InfSupForm { atoms, terms };

    // reference-grid soundness check
    let gens = e.max_generator().map(|i| i + 1).unwrap_or(1);
    let lattice = GridLattice::with_size(32)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x1afca1c);
    let assignment: Vec<Element> = (0..gens)
        .map(|_| {
            let vals: Vec<f64> = (0..32).map(|_| rng.random_range(-4.0..4.0)).collect();
            Element::new(lattice.clone(), vals)
        })
        .collect::<Result<_>>()?;
    let direct = eval_expr(e, &assignment)?;
    let via_form = form.eval(&assignment)?;
    let dist = direct.sup_distance(&via_form)?;
    if dist > 1e-10 {
        return Err(Error::CrossCheck(format!(
            "normal form deviates from the expression by {dist} on the reference grid"
        )));
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn grid(n: usize) -> Arc<GridLattice> {
        GridLattice::with_size(n).unwrap()
    }

    fn elem(g: &Arc<GridLattice>, vals: &[f64]) -> Element {
        Element::new(g.clone(), vals.to_vec()).unwrap()
    }

    #[test]
    fn negated_sup_becomes_an_inf_of_singletons() {
        let e = Expr::scale(-1.0, Expr::sup(Expr::gen(0), Expr::gen(1)));
        let nf = normalize(&e).unwrap();
        assert_eq!(nf.terms.len(), 2);
        assert!(nf.terms.iter().all(|branch| branch.len() == 1));
        let coeffs: Vec<&Vec<f64>> = nf.terms.iter().map(|b| &b[0]).collect();
        assert_eq!(coeffs[0], &vec![-1.0, 0.0]);
        assert_eq!(coeffs[1], &vec![0.0, -1.0]);
    }

    #[test]
    fn addition_distributes_over_sup() {
        let e = Expr::add(Expr::sup(Expr::gen(0), Expr::gen(1)), Expr::gen(2));
        let nf = normalize(&e).unwrap();
        assert_eq!(nf.terms.len(), 1);
        assert_eq!(nf.terms[0].len(), 2);
        assert_eq!(nf.terms[0][0], vec![1.0, 0.0, 1.0]);
        assert_eq!(nf.terms[0][1], vec![0.0, 1.0, 1.0]);

        let g = grid(4);
        let assignment = [
            elem(&g, &[1.0, -2.0, 0.5, 3.0]),
            elem(&g, &[0.0, 4.0, 0.25, -3.0]),
            elem(&g, &[2.0, 2.0, 2.0, 2.0]),
        ];
        let direct = eval_expr(&e, &assignment).unwrap();
        let via = nf.eval(&assignment).unwrap();
        assert!(direct.sup_distance(&via).unwrap() <= 1e-12);
    }

    #[test]
    fn single_generator_is_a_single_atom_form() {
        let nf = normalize(&Expr::gen(0)).unwrap();
        assert_eq!(nf.atoms, vec![Expr::gen(0)]);
        assert_eq!(nf.terms, vec![vec![vec![1.0]]]);
    }

    fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
        if depth == 0 || rng.random_range(0..10) < 2 {
            return match rng.random_range(0..4) {
                0 => Expr::gen(rng.random_range(0..3)),
                1 => Expr::gen(rng.random_range(0..3)),
                2 => Expr::apply("mu:2,4", vec![Expr::gen(rng.random_range(0..3)), Expr::gen(rng.random_range(0..3))]),
                _ => Expr::apply("norm:2", vec![Expr::gen(rng.random_range(0..3)), Expr::gen(rng.random_range(0..3))]),
            };
        }
        match rng.random_range(0..5) {
            0 => Expr::scale(
                rng.random_range(-1.25..1.25),
                random_expr(rng, depth - 1),
            ),
            1 => Expr::add(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
            2 => Expr::sup(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
            3 => Expr::inf(random_expr(rng, depth - 1), random_expr(rng, depth - 1)),
            _ => Expr::apply(
                "mu:2,4",
                vec![random_expr(rng, depth - 1), random_expr(rng, depth - 1)],
            ),
        }
    }

    #[test]
    fn normal_form_is_sound_on_random_expressions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = grid(16);
        let assignment: Vec<Element> = (0..3)
            .map(|_| {
                let vals: Vec<f64> = (0..16).map(|_| rng.random_range(-4.0..4.0)).collect();
                Element::new(g.clone(), vals).unwrap()
            })
            .collect();
        let mut done = 0;
        while done < 200 {
            let e = random_expr(&mut rng, 8.min(1 + done % 8));
            let nf = match normalize(&e) {
                Ok(nf) => nf,
                Err(Error::ExpressionTooLarge(_)) => continue,
                Err(other) => panic!("unexpected error: {other}"),
            };
            let direct = eval_expr(&e, &assignment).unwrap();
            let via = nf.eval(&assignment).unwrap();
            assert!(
                direct.sup_distance(&via).unwrap() <= 1e-10,
                "form deviates for {e}"
            );
            // the rebuilt expression evaluates the same way; skip huge forms
            // whose expression chain would nest too deeply for recursion
            if nf.num_combinations() <= 500 {
                let rebuilt = eval_expr(&nf.to_expr(), &assignment).unwrap();
                assert!(direct.sup_distance(&rebuilt).unwrap() <= 1e-10);
            }
            done += 1;
        }
    }
}
