//! Quasi-congruences checked on every partition of a small state set.

use std::collections::BTreeSet;

use dsc_core::{Event, Generator, StateId};

/// Saturated moves of each state: one target set per observed event,
/// then the marker move (silent steps into a marker state and on).
pub fn saturated_moves(g: &Generator, nulled: &BTreeSet<Event>) -> Vec<Vec<BTreeSet<StateId>>> {
    let n = g.num_states();
    let silent_reach = |q: StateId| {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(x) = stack.pop() {
            for &(e, t) in g.transitions_from(x) {
                if nulled.contains(&e) && seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    };
    let observed: Vec<Event> = g
        .alphabet()
        .events()
        .iter()
        .copied()
        .filter(|e| !nulled.contains(e))
        .collect();
    (0..n)
        .map(|y| {
            let before = silent_reach(y);
            let mut moves: Vec<BTreeSet<StateId>> = observed
                .iter()
                .map(|&e| {
                    before
                        .iter()
                        .flat_map(|&x| g.transitions_from(x).iter().filter(|t| t.0 == e))
                        .flat_map(|t| silent_reach(t.1))
                        .collect()
                })
                .collect();
            moves.push(
                before
                    .iter()
                    .filter(|&&x| g.is_marked(x))
                    .flat_map(|&x| silent_reach(x))
                    .collect(),
            );
            moves
        })
        .collect()
}

/// Equivalent states send each saturated move into the same blocks.
pub fn is_quasi_congruence(moves: &[Vec<BTreeSet<StateId>>], block: &[usize]) -> bool {
    let image = |y: StateId, k: usize| -> BTreeSet<usize> { moves[y][k].iter().map(|&t| block[t]).collect() };
    let n = block.len();
    (0..n).all(|x| {
        (x + 1..n)
            .filter(|&y| block[x] == block[y])
            .all(|y| (0..moves[x].len()).all(|k| image(x, k) == image(y, k)))
    })
}

/// All set partitions of `0..n` as block labels in first-seen order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            go(i + 1, n, cur, max.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut out);
    out
}

/// `fine` puts together only states that `coarse` puts together.
pub fn refines(fine: &[usize], coarse: &[usize]) -> bool {
    let n = fine.len();
    (0..n).all(|x| (0..n).all(|y| fine[x] != fine[y] || coarse[x] == coarse[y]))
}

/// Why `block` is not the coarsest quasi-congruence of `g`, if it is not.
pub fn supremality_failure(g: &Generator, nulled: &BTreeSet<Event>, block: &[usize]) -> Option<String> {
    let moves = saturated_moves(g, nulled);
    if !is_quasi_congruence(&moves, block) {
        return Some(format!("{block:?} is not a quasi-congruence"));
    }
    partitions(g.num_states())
        .into_iter()
        .find(|p| is_quasi_congruence(&moves, p) && !refines(p, block))
        .map(|p| format!("{p:?} is a quasi-congruence not below {block:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..7).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn identity_is_always_a_quasi_congruence() {
        let g = Generator::from_transitions(3, 0, &[2], &[(0, 1, 1), (1, 2, 2), (0, 2, 2)]).unwrap();
        let moves = saturated_moves(&g, &BTreeSet::from([Event(1)]));
        assert!(is_quasi_congruence(&moves, &[0, 1, 2]));
        assert!(!is_quasi_congruence(&moves, &[0, 0, 0]));
    }
}
