use std::cmp::Ordering;

use serde::Serialize;

use crate::formula::{Formula, Term};
use crate::rational::Rational;

/// Ambient region for the variables of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    All,
    Negative,
    Positive,
}

/// One level of the chain: variables that are equal to each other and to at
/// most one parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub vars: Vec<usize>,
    pub param: Option<usize>,
}

/// A complete order cell: a weak order of the variables interleaved with the
/// sorted parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderCell {
    vars: Vec<String>,
    params: Vec<Rational>,
    domain: Domain,
    blocks: Vec<Block>,
}

fn sorted_params(params: &[Rational]) -> Vec<Rational> {
    let mut p = params.to_vec();
    p.sort();
    p.dedup();
    p
}

/// All complete order cells of `vars` over `params` in `ℚʳ`.
pub fn enumerate_cells(vars: &[String], params: &[Rational]) -> Vec<OrderCell> {
    enumerate_cells_in(vars, params, Domain::All)
}

/// Cells whose variables all lie in `domain`.
pub fn enumerate_cells_in(vars: &[String], params: &[Rational], domain: Domain) -> Vec<OrderCell> {
    let params = sorted_params(params);
    if domain == Domain::All {
        return chains(vars.len(), params.len())
            .into_iter()
            .map(|blocks| OrderCell {
                vars: vars.to_vec(),
                params: params.clone(),
                domain,
                blocks,
            })
            .collect();
    }
    // Enumerate with 0 as an extra parameter and keep the chains with every
    // variable on the requested side of it.
    let mut with_zero = params.clone();
    let zero_missing = !with_zero.contains(&Rational::zero());
    if zero_missing {
        with_zero.push(Rational::zero());
        with_zero.sort();
    }
    let zpos = with_zero.iter().position(|p| p.is_zero()).unwrap();
    let mut out = Vec::new();
    for blocks in chains(vars.len(), with_zero.len()) {
        let zb = blocks.iter().position(|b| b.param == Some(zpos)).unwrap();
        let ok = blocks.iter().enumerate().all(|(i, b)| {
            b.vars.is_empty()
                || match domain {
                    Domain::Negative => i < zb,
                    _ => i > zb,
                }
        });
        if !ok {
            continue;
        }
        let blocks = if zero_missing {
            blocks
                .into_iter()
                .filter(|b| b.param != Some(zpos))
                .map(|b| Block {
                    param: b.param.map(|p| if p > zpos { p - 1 } else { p }),
                    vars: b.vars,
                })
                .collect()
        } else {
            blocks
        };
        out.push(OrderCell {
            vars: vars.to_vec(),
            params: params.clone(),
            domain,
            blocks,
        });
    }
    out
}

/// Every chain of `r` variables over `c` sorted parameters, built by inserting
/// variables one at a time into an existing block or into a new block.
fn chains(r: usize, c: usize) -> Vec<Vec<Block>> {
    let mut acc = vec![(0..c)
        .map(|p| Block {
            vars: vec![],
            param: Some(p),
        })
        .collect::<Vec<_>>()];
    for v in 0..r {
        let mut next = Vec::new();
        for chain in &acc {
            for i in 0..chain.len() {
                let mut c2 = chain.clone();
                c2[i].vars.push(v);
                next.push(c2);
            }
            for gap in 0..=chain.len() {
                let mut c2 = chain.clone();
                c2.insert(
                    gap,
                    Block {
                        vars: vec![v],
                        param: None,
                    },
                );
                next.push(c2);
            }
        }
        acc = next;
    }
    acc
}

/// The unique cell of `vars` over `params` containing `point`.
pub fn cell_of_point(vars: &[String], point: &[Rational], params: &[Rational]) -> OrderCell {
    assert_eq!(vars.len(), point.len(), "point arity must match the variables");
    let params = sorted_params(params);
    let mut values: Vec<Rational> = params.clone();
    values.extend(point.iter().cloned());
    values.sort();
    values.dedup();
    let blocks = values
        .iter()
        .map(|v| Block {
            vars: (0..point.len()).filter(|&i| &point[i] == v).collect(),
            param: params.iter().position(|p| p == v),
        })
        .collect();
    let domain = if !point.is_empty() && point.iter().all(Rational::is_negative) {
        Domain::Negative
    } else if !point.is_empty() && point.iter().all(Rational::is_positive) {
        Domain::Positive
    } else {
        Domain::All
    };
    OrderCell {
        vars: vars.to_vec(),
        params,
        domain,
        blocks,
    }
    .with_domain(domain)
}

fn place(lo: Option<&Rational>, hi: Option<&Rational>, k: usize) -> Vec<Rational> {
    (1..=k)
        .map(|j| {
            let j = Rational::from(j as i64);
            match (lo, hi) {
                (Some(l), Some(h)) => l + &(&(h - l) * &j / Rational::from(k as i64 + 1)),
                (Some(l), None) => l + &j,
                (None, Some(h)) => h - &(Rational::from(k as i64 + 1) - j),
                (None, None) => j,
            }
        })
        .collect()
}

impl OrderCell {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn params(&self) -> &[Rational] {
        &self.params
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Reinterprets the cell inside `domain`; the chain is unchanged.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn block_of_var(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.vars.contains(&i))
            .expect("every variable lies in a block")
    }

    /// Order between variables `i` and `j` forced by the cell.
    pub fn var_order(&self, i: usize, j: usize) -> Ordering {
        self.block_of_var(i).cmp(&self.block_of_var(j))
    }

    /// The parameter forced equal to variable `i`, if any.
    pub fn var_param(&self, i: usize) -> Option<&Rational> {
        self.blocks[self.block_of_var(i)].param.map(|p| &self.params[p])
    }

    /// Order between variable `i` and parameter `p` (an index into `params`).
    pub fn var_param_order(&self, i: usize, p: usize) -> Ordering {
        let pb = self
            .blocks
            .iter()
            .position(|b| b.param == Some(p))
            .expect("parameter block");
        self.block_of_var(i).cmp(&pb)
    }

    /// Classes of variables forced equal, in chain order.
    pub fn var_classes(&self) -> Vec<(Vec<usize>, Option<Rational>)> {
        self.blocks
            .iter()
            .filter(|b| !b.vars.is_empty())
            .map(|b| (b.vars.clone(), b.param.map(|p| self.params[p].clone())))
            .collect()
    }

    /// A deterministic point of the cell: parameters for blocks that hold
    /// one, evenly spaced values between consecutive anchors otherwise, and
    /// anchor ± k at the ends. A signed domain uses 0 as an extra anchor.
    pub fn representative(&self) -> Vec<Rational> {
        let mut values: Vec<Option<Rational>> = vec![None; self.vars.len()];
        let zero = Rational::zero();
        let mut i = 0;
        let mut lo: Option<Rational> = None;
        while i < self.blocks.len() {
            if let Some(p) = self.blocks[i].param {
                let v = self.params[p].clone();
                for &x in &self.blocks[i].vars {
                    values[x] = Some(v.clone());
                }
                lo = Some(v);
                i += 1;
                continue;
            }
            let start = i;
            while i < self.blocks.len() && self.blocks[i].param.is_none() {
                i += 1;
            }
            let mut hi = self.blocks.get(i).and_then(|b| b.param).map(|p| self.params[p].clone());
            let mut gap_lo = lo.clone();
            match self.domain {
                Domain::Negative => hi = Some(hi.map_or(zero.clone(), |h| h.min(zero.clone()))),
                Domain::Positive => gap_lo = Some(gap_lo.map_or(zero.clone(), |l| l.max(zero.clone()))),
                Domain::All => {}
            }
            let pts = place(gap_lo.as_ref(), hi.as_ref(), i - start);
            for (b, v) in self.blocks[start..i].iter().zip(pts) {
                for &x in &b.vars {
                    values[x] = Some(v.clone());
                }
            }
        }
        values.into_iter().map(|v| v.expect("assigned")).collect()
    }

    /// Whether `point` lies in the cell.
    pub fn contains(&self, point: &[Rational]) -> bool {
        let other = cell_of_point(&self.vars, point, &self.params);
        other.blocks == self.blocks
            && match self.domain {
                Domain::All => true,
                Domain::Negative => point.iter().all(Rational::is_negative),
                Domain::Positive => point.iter().all(Rational::is_positive),
            }
    }

    /// The cell's defining conjunction, one atom per adjacent pair in the
    /// chain and per equality inside a block.
    pub fn formula(&self) -> Formula {
        let term_of = |b: &Block| -> Option<Term> {
            if let Some(&v) = b.vars.first() {
                Some(Term::var(&self.vars[v]))
            } else {
                b.param.map(|p| Term::Const(self.params[p].clone()))
            }
        };
        let mut atoms = Vec::new();
        for b in &self.blocks {
            let head = term_of(b).unwrap();
            for &v in b.vars.iter().skip(1) {
                atoms.push(Formula::eq(head.clone(), Term::var(&self.vars[v])));
            }
            if let (Some(_), Some(p)) = (b.vars.first(), b.param) {
                atoms.push(Formula::eq(head.clone(), Term::Const(self.params[p].clone())));
            }
        }
        for w in self.blocks.windows(2) {
            if w[0].vars.is_empty() && w[1].vars.is_empty() {
                continue;
            }
            atoms.push(Formula::lt(term_of(&w[0]).unwrap(), term_of(&w[1]).unwrap()));
        }
        match self.domain {
            Domain::Negative => {
                if let Some(last) = self.blocks.iter().rev().find(|b| !b.vars.is_empty()) {
                    atoms.push(Formula::lt(Term::var(&self.vars[last.vars[0]]), Term::zero()));
                }
            }
            Domain::Positive => {
                if let Some(first) = self.blocks.iter().find(|b| !b.vars.is_empty()) {
                    atoms.push(Formula::lt(Term::zero(), Term::var(&self.vars[first.vars[0]])));
                }
            }
            Domain::All => {}
        }
        Formula::and_all(atoms)
    }

    /// The cell induced on the variables at positions `keep`, in that order.
    pub fn project(&self, keep: &[usize]) -> OrderCell {
        let blocks = self
            .blocks
            .iter()
            .filter_map(|b| {
                let vars: Vec<usize> = b.vars.iter().filter_map(|v| keep.iter().position(|k| k == v)).collect();
                (b.param.is_some() || !vars.is_empty()).then_some(Block { vars, param: b.param })
            })
            .map(|mut b| {
                b.vars.sort();
                b
            })
            .collect();
        OrderCell {
            vars: keep.iter().map(|&k| self.vars[k].clone()).collect(),
            params: self.params.clone(),
            domain: self.domain,
            blocks,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    /// Weak orders on `r` variables plus `c` distinct parameters whose
    /// relative order is fixed: count assignments of ranks, brute force.
    fn brute_force_count(r: usize, c: usize) -> usize {
        let n = r + c;
        let mut seen = BTreeSet::new();
        let total = n.pow(n as u32);
        for code in 0..total {
            let mut rank = Vec::new();
            let mut k = code;
            for _ in 0..n {
                rank.push(k % n);
                k /= n;
            }
            // normalize to dense ranks
            let mut levels: Vec<usize> = rank.clone();
            levels.sort();
            levels.dedup();
            let dense: Vec<usize> = rank
                .iter()
                .map(|x| levels.iter().position(|l| l == x).unwrap())
                .collect();
            let params = &dense[r..];
            if params.windows(2).all(|w| w[0] < w[1]) {
                seen.insert(dense);
            }
        }
        seen.len()
    }

    #[test]
    fn cell_counts() {
        assert_eq!(enumerate_cells(&names(1), &[q("5")]).len(), 3);
        assert_eq!(enumerate_cells(&names(2), &[]).len(), 3);
        assert_eq!(enumerate_cells(&names(2), &[q("5")]).len(), 13);
        for (r, c) in [(1, 0), (1, 2), (2, 1), (2, 2), (3, 0), (3, 1)] {
            let params: Vec<Rational> = (0..c).map(|i| Rational::from(i as i64)).collect();
            assert_eq!(
                enumerate_cells(&names(r), &params).len(),
                brute_force_count(r, c),
                "r={r} c={c}"
            );
        }
    }

    #[test]
    fn duplicates_are_merged() {
        assert_eq!(enumerate_cells(&names(1), &[q("1"), q("1")]).len(), 3);
    }

    #[test]
    fn cell_of_point_examples() {
        let v = names(2);
        let c = cell_of_point(&v, &[q("-2"), q("-1")], &[]);
        assert_eq!(c.var_order(0, 1), Ordering::Less);
        let c = cell_of_point(&v, &[q("-1"), q("-1")], &[]);
        assert_eq!(c.var_order(0, 1), Ordering::Equal);
        let c = cell_of_point(&v, &[q("-3"), q("-1")], &[q("-2")]);
        assert_eq!(c.var_param_order(0, 0), Ordering::Less);
        assert_eq!(c.var_param_order(1, 0), Ordering::Greater);
        assert_eq!(c.formula().to_string(), "(and (< x1 -2) (< -2 x2) (< x2 0))");
    }

    #[test]
    fn representatives_lie_in_their_cells() {
        for domain in [Domain::All, Domain::Negative, Domain::Positive] {
            for c in enumerate_cells_in(&names(3), &[q("-1"), q("1/2"), q("2")], domain) {
                let rep = c.representative();
                assert!(c.contains(&rep), "{c:?} {rep:?}");
            }
        }
    }

    #[test]
    fn signed_domains() {
        let neg = enumerate_cells_in(&names(1), &[q("-1"), q("1")], Domain::Negative);
        assert_eq!(neg.len(), 3);
        let pos = enumerate_cells_in(&names(2), &[], Domain::Positive);
        assert_eq!(pos.len(), 3);
        assert!(pos.iter().all(|c| c.representative().iter().all(Rational::is_positive)));
    }

    #[test]
    fn projection_drops_variables() {
        let v = names(2);
        let c = cell_of_point(&v, &[q("-3"), q("-1")], &[q("-2")]);
        let p = c.project(&[1]);
        assert_eq!(p, cell_of_point(&v[1..], &[q("-1")], &[q("-2")]));
    }

    proptest! {
        #[test]
        fn partition_property(
            r in 1usize..=3,
            pts in proptest::collection::vec((-6i64..6, 1i64..3), 3),
            cs in proptest::collection::btree_set(-4i64..4, 0..=3),
        ) {
            let vars = names(r);
            let point: Vec<Rational> = pts[..r].iter().map(|&(n, d)| Rational::new(n, d).unwrap()).collect();
            let params: Vec<Rational> = cs.into_iter().map(Rational::from).collect();
            let hits = enumerate_cells(&vars, &params).into_iter().filter(|c| c.contains(&point)).count();
            prop_assert_eq!(hits, 1);
        }
    }
}
