//! Dense square matrices over a star-omega semiring.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::semiring::{Boolean, StarOmega};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqMatrix<S> {
    dim: usize,
    cells: Vec<S>,
}

impl<S: StarOmega> SqMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        SqMatrix { dim, cells: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Dimension { expected: 1, found: 0 });
        }
        let mut cells = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension { expected: dim, found: row.len() });
            }
            cells.extend(row);
        }
        Ok(SqMatrix { dim, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.cells[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.cells.chunks(self.dim)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let cells = self.cells.iter().zip(&other.cells).map(|(&a, &b)| a + b).collect();
        Ok(SqMatrix { dim: self.dim, cells })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)] + a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|j| (0..self.dim).fold(S::zero(), |acc, i| acc + v[i] * self.get(i, j))).collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        self.rows().map(|row| row.iter().zip(v).fold(S::zero(), |acc, (&a, &b)| acc + a * b)).collect()
    }

    /// `A* = Σ_{j≥0} Aʲ` by recursive 2×2 block decomposition.
    pub fn star(&self) -> Self {
        let n = self.dim;
        if n == 1 {
            return SqMatrix { dim: 1, cells: vec![self.cells[0].star()] };
        }
        let h = n / 2;
        let a = self.sub(0, 0, h, h);
        let b = self.sub(0, h, h, n - h);
        let c = self.sub(h, 0, n - h, h);
        let d = self.sub(h, h, n - h, n - h);

        let a_star = a.star();
        // d' = (d + c a* b)*
        let d_prime = d.plus(&c.times(&a_star).times(&b)).star();
        let a_star_b = a_star.times(&b);
        let c_a_star = c.times(&a_star);
        let top_left = a_star.plus(&a_star_b.times(&d_prime).times(&c_a_star));
        let top_right = a_star_b.times(&d_prime);
        let bottom_left = d_prime.times(&c_a_star);

        let mut out = Self::zeros(n);
        out.paste(0, 0, &top_left);
        out.paste(0, h, &top_right);
        out.paste(h, 0, &bottom_left);
        out.paste(h, h, &d_prime);
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    fn sub(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Block<S> {
        let mut cells = Vec::with_capacity(rows * cols);
        for i in r0..r0 + rows {
            for j in c0..c0 + cols {
                cells.push(self.get(i, j));
            }
        }
        Block { rows, cols, cells }
    }

    fn paste(&mut self, r0: usize, c0: usize, block: &Block<S>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block.get(i, j);
            }
        }
    }
}

impl<S: StarOmega> std::ops::Index<(usize, usize)> for SqMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.cells[i * self.dim + j]
    }
}

impl<S: StarOmega> std::ops::IndexMut<(usize, usize)> for SqMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.cells[i * self.dim + j]
    }
}

impl<S: StarOmega> fmt::Debug for SqMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Rectangular scratch block used by the block-star recursion.
struct Block<S> {
    rows: usize,
    cols: usize,
    cells: Vec<S>,
}

impl<S: StarOmega> Block<S> {
    fn get(&self, i: usize, j: usize) -> S {
        self.cells[i * self.cols + j]
    }

    fn times(&self, other: &Block<S>) -> Block<S> {
        debug_assert_eq!(self.cols, other.rows);
        let mut cells = vec![S::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let c = &mut cells[i * other.cols + j];
                    *c = *c + a * other.get(k, j);
                }
            }
        }
        Block { rows: self.rows, cols: other.cols, cells }
    }

    fn plus(&self, other: &Block<S>) -> Block<S> {
        let cells = self.cells.iter().zip(&other.cells).map(|(&a, &b)| a + b).collect();
        Block { rows: self.rows, cols: self.cols, cells }
    }

    fn star(&self) -> Block<S> {
        debug_assert_eq!(self.rows, self.cols);
        let m = SqMatrix { dim: self.rows, cells: self.cells.clone() }.star();
        Block { rows: self.rows, cols: self.cols, cells: m.cells }
    }
}

/// Büchi acceptance of `u·v^ω` by a finite automaton given as one Boolean
/// transition matrix per letter.
///
/// Searches the product of the automaton with the positions of `v` for a
/// reachable cycle through a repeated state.
pub fn nfa_buchi_lasso_accept(
    by_letter: &BTreeMap<char, SqMatrix<Boolean>>,
    initial: &[bool],
    repeated: &[bool],
    u: &[char],
    v: &[char],
) -> Result<bool> {
    if v.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let n = initial.len();
    let step = |from: &[bool], letter: char| -> Vec<bool> {
        let mut next = vec![false; n];
        if let Some(m) = by_letter.get(&letter) {
            for i in (0..n).filter(|&i| from[i]) {
                for (j, slot) in next.iter_mut().enumerate() {
                    *slot |= m.get(i, j).0;
                }
            }
        }
        next
    };
    let mut current = initial.to_vec();
    for &a in u {
        current = step(&current, a);
    }

    // Product nodes (state, k) for k in 0..|v|, index = k * n + state.
    let period = v.len();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n * period).map(|_| graph.add_node(())).collect();
    for (k, &a) in v.iter().enumerate() {
        let next_k = (k + 1) % period;
        if let Some(m) = by_letter.get(&a) {
            for i in 0..n {
                for j in 0..n {
                    if m.get(i, j).0 {
                        graph.add_edge(nodes[k * n + i], nodes[next_k * n + j], ());
                    }
                }
            }
        }
    }

    let mut reachable = vec![false; n * period];
    let mut stack: Vec<usize> = (0..n).filter(|&i| current[i]).collect();
    for &s in &stack {
        reachable[s] = true;
    }
    while let Some(x) = stack.pop() {
        for y in graph.neighbors(nodes[x]) {
            let y = y.index();
            if !reachable[y] {
                reachable[y] = true;
                stack.push(y);
            }
        }
    }

    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if !cyclic {
            continue;
        }
        let hit = scc.iter().any(|x| reachable[x.index()] && repeated[x.index() % n]);
        if hit {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::NatInf;
    use proptest::prelude::*;

    fn b(rows: &[&[u8]]) -> SqMatrix<Boolean> {
        SqMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Boolean(x != 0)).collect()).collect()).unwrap()
    }

    fn nat(rows: &[&[u64]]) -> SqMatrix<NatInf> {
        SqMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| NatInf::Fin(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn products() {
        let a = b(&[&[0, 1], &[0, 0]]);
        assert_eq!(SqMatrix::identity(2).mul(&a).unwrap(), a);
        assert_eq!(a.mul(&a).unwrap(), SqMatrix::zeros(2));
        assert_eq!(nat(&[&[2]]).mul(&nat(&[&[3]])).unwrap(), nat(&[&[6]]));
        assert!(matches!(a.mul(&SqMatrix::zeros(3)), Err(Error::Dimension { expected: 2, found: 3 })));
    }

    #[test]
    fn stars() {
        assert_eq!(b(&[&[0, 1], &[0, 0]]).star(), b(&[&[1, 1], &[0, 1]]));
        assert_eq!(SqMatrix::<Boolean>::zeros(3).star(), SqMatrix::identity(3));
        assert_eq!(nat(&[&[1]]).star(), SqMatrix::from_rows(vec![vec![NatInf::Inf]]).unwrap());
        // Path counts in a DAG stay finite.
        let dag = nat(&[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(dag.star(), nat(&[&[1, 1, 2], &[0, 1, 1], &[0, 0, 1]]));
    }

    fn squaring_closure(a: &SqMatrix<Boolean>) -> SqMatrix<Boolean> {
        let mut c = SqMatrix::identity(a.dim()).add(a).unwrap();
        loop {
            let next = c.mul(&c).unwrap();
            if next == c {
                return c;
            }
            c = next;
        }
    }

    fn bool_matrix(max: usize) -> impl Strategy<Value = SqMatrix<Boolean>> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.3), n * n)
                .prop_map(move |bits| SqMatrix { dim: n, cells: bits.into_iter().map(Boolean).collect() })
        })
    }

    fn nat_matrix(max: usize) -> impl Strategy<Value = SqMatrix<NatInf>> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(prop_oneof![6 => Just(0u64), 2 => Just(1u64), 1 => 2u64..4], n * n)
                .prop_map(move |xs| SqMatrix { dim: n, cells: xs.into_iter().map(NatInf::Fin).collect() })
        })
    }

    proptest! {
        #[test]
        fn boolean_star_is_reflexive_transitive_closure(a in bool_matrix(5)) {
            prop_assert_eq!(a.star(), squaring_closure(&a));
        }

        #[test]
        fn star_fixpoint_equations_boolean(a in bool_matrix(5)) {
            let s = a.star();
            let id = SqMatrix::identity(a.dim());
            prop_assert_eq!(&s, &id.add(&a.mul(&s).unwrap()).unwrap());
            prop_assert_eq!(&s, &id.add(&s.mul(&a).unwrap()).unwrap());
        }

        #[test]
        fn star_fixpoint_equations_nat_inf(a in nat_matrix(5)) {
            let s = a.star();
            let id = SqMatrix::identity(a.dim());
            prop_assert_eq!(&s, &id.add(&a.mul(&s).unwrap()).unwrap());
            prop_assert_eq!(&s, &id.add(&s.mul(&a).unwrap()).unwrap());
        }
    }

    fn letters(entries: &[(char, SqMatrix<Boolean>)]) -> BTreeMap<char, SqMatrix<Boolean>> {
        entries.iter().cloned().collect()
    }

    #[test]
    fn buchi_single_state_loop() {
        let m = letters(&[('a', b(&[&[1]]))]);
        assert!(nfa_buchi_lasso_accept(&m, &[true], &[true], &[], &['a']).unwrap());
        assert!(!nfa_buchi_lasso_accept(&m, &[true], &[false], &[], &['a']).unwrap());
    }

    #[test]
    fn buchi_two_states() {
        // 1 -a-> 2, 2 -b-> 2, repeated = {2}
        let m = letters(&[('a', b(&[&[0, 1], &[0, 0]])), ('b', b(&[&[0, 0], &[0, 1]]))]);
        assert!(nfa_buchi_lasso_accept(&m, &[true, false], &[false, true], &['a'], &['b']).unwrap());
        assert!(!nfa_buchi_lasso_accept(&m, &[true, false], &[false, true], &[], &['b']).unwrap());
        assert!(!nfa_buchi_lasso_accept(&m, &[true, false], &[false, true], &['a'], &['a']).unwrap());
        assert!(matches!(
            nfa_buchi_lasso_accept(&m, &[true, false], &[false, true], &['a'], &[]),
            Err(Error::EmptyPeriod)
        ));
    }

    #[test]
    fn buchi_unreachable_cycle_does_not_count() {
        // 2 loops on 'a' and is repeated, but only state 1 is initial and 1 has no edges.
        let m = letters(&[('a', b(&[&[0, 0], &[0, 1]]))]);
        assert!(!nfa_buchi_lasso_accept(&m, &[true, false], &[false, true], &[], &['a']).unwrap());
    }
}
