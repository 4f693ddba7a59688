//! Minimum chain covers of finite posets through bipartite matching.
//!
//! The strict order `a < b` becomes a bipartite graph with an edge from the
//! left copy of `a` to the right copy of `b`. A maximum matching links each
//! element to its successor in a chain, so the number of chains is
//! `|P| - |matching|`. König's construction turns the matching into a
//! minimum vertex cover, and elements with neither copy in the cover form an
//! antichain of the same size.

/// Chains (each listed bottom to top) and a witnessing antichain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub chains: Vec<Vec<usize>>,
    pub antichain: Vec<usize>,
}

impl ChainDecomposition {
    pub fn width(&self) -> usize {
        self.chains.len()
    }
}

/// Minimum chain cover of `elements` under the strict order `less`, which
/// must be transitive. Matching and chain assembly scan elements in the given
/// order, so the output is deterministic.
pub fn min_chain_cover(elements: &[usize], less: impl Fn(usize, usize) -> bool) -> ChainDecomposition {
    let n = elements.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| less(elements[i], elements[j])).collect())
        .collect();

    // match_right[j] = i  means  i -> j is a matching edge (j follows i)
    let mut match_left: Vec<Option<usize>> = vec![None; n];
    let mut match_right: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        augment(i, &adj, &mut seen, &mut match_left, &mut match_right);
    }

    let mut chains = Vec::new();
    for start in 0..n {
        if match_right[start].is_some() {
            continue;
        }
        let mut chain = vec![elements[start]];
        let mut cur = start;
        while let Some(next) = match_left[cur] {
            chain.push(elements[next]);
            cur = next;
        }
        chains.push(chain);
    }

    // König: Z = vertices reachable from unmatched left vertices along
    // alternating paths; the antichain is {i : left_i ∈ Z, right_i ∉ Z}.
    let mut left_z = vec![false; n];
    let mut right_z = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| match_left[i].is_none()).collect();
    for &i in &stack {
        left_z[i] = true;
    }
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if match_left[i] == Some(j) || right_z[j] {
                continue;
            }
            right_z[j] = true;
            if let Some(k) = match_right[j] {
                if !left_z[k] {
                    left_z[k] = true;
                    stack.push(k);
                }
            }
        }
    }
    let antichain = (0..n).filter(|&i| left_z[i] && !right_z[i]).map(|i| elements[i]).collect();

    ChainDecomposition { chains, antichain }
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_left: &mut [Option<usize>],
    match_right: &mut [Option<usize>],
) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let free = match match_right[j] {
            None => true,
            Some(k) => augment(k, adj, seen, match_left, match_right),
        };
        if free {
            match_left[i] = Some(j);
            match_right[j] = Some(i);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive maximum antichain by subset enumeration.
    fn brute_width(n: usize, less: &dyn Fn(usize, usize) -> bool) -> usize {
        (0u32..1 << n)
            .filter(|mask| {
                (0..n).all(|a| {
                    (0..n).all(|b| mask >> a & 1 == 0 || mask >> b & 1 == 0 || (!less(a, b) && !less(b, a)))
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn empty_poset() {
        let d = min_chain_cover(&[], |_, _| false);
        assert!(d.chains.is_empty() && d.antichain.is_empty());
    }

    #[test]
    fn total_order_is_one_chain() {
        let d = min_chain_cover(&[3, 1, 2], |a, b| a < b);
        assert_eq!(d.chains, vec![vec![1, 2, 3]]);
        assert_eq!(d.antichain.len(), 1);
    }

    #[test]
    fn divisibility_poset() {
        let els: Vec<usize> = (1..=12).collect();
        let d = min_chain_cover(&els, |a, b| a != b && b % a == 0);
        // largest antichain in divisors up to 12 is {7,8,9,10,11,12} minus comparables: width 6
        assert_eq!(d.width(), brute_width(12, &|a, b| a != b && (b + 1) % (a + 1) == 0));
        assert_eq!(d.antichain.len(), d.width());
    }

    proptest! {
        #[test]
        fn matches_exhaustive_width(bits in proptest::collection::vec(any::<bool>(), 45)) {
            // random strict order on 10 elements: transitive closure of a random DAG on index order
            let n = 10;
            let mut rel = vec![vec![false; n]; n];
            let mut k = 0;
            for (i, row) in rel.iter_mut().enumerate() {
                for cell in &mut row[i + 1..] {
                    *cell = bits[k % bits.len()];
                    k += 1;
                }
            }
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if rel[i][m] && rel[m][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
            let less = |a: usize, b: usize| rel[a][b];
            let els: Vec<usize> = (0..n).collect();
            let d = min_chain_cover(&els, less);
            let w = brute_width(n, &less);
            prop_assert_eq!(d.width(), w);
            prop_assert_eq!(d.antichain.len(), w);
            let mut seen: Vec<usize> = d.chains.iter().flatten().copied().collect();
            seen.sort();
            prop_assert_eq!(seen, els);
            for c in &d.chains {
                for pair in c.windows(2) {
                    prop_assert!(less(pair[0], pair[1]));
                }
            }
            for &a in &d.antichain {
                for &b in &d.antichain {
                    prop_assert!(!less(a, b));
                }
            }
        }
    }
}
