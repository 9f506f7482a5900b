use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{action_set, ActionSetVariant};
use crate::lp::{is_optimal, BasisSignature, SimplexState, StandardFormLP};
use crate::{Error, Result};

/// Why a child may never be selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forbidden {
    /// The child basis already lies on the path from the root.
    Revisit,
    /// The ratio test found no leaving row.
    Unbounded,
}

/// A node of the search tree. Statistics describe the edge from the
/// parent into this node.
#[derive(Debug, Clone)]
pub struct TreeNode {
    /// Entering column that produced this node; `None` at a decision root.
    pub action: Option<usize>,
    pub signature: BasisSignature,
    pub depth: usize,
    pub state: SimplexState,
    pub terminal: bool,
    pub visits: u64,
    pub reward_sum: f64,
    pub forbidden: Option<Forbidden>,
    pub children: Vec<TreeNode>,
    expanded: bool,
}

impl TreeNode {
    pub fn root(state: SimplexState, depth: usize) -> Self {
        Self {
            action: None,
            signature: state.signature(),
            depth,
            terminal: is_optimal(&state),
            state,
            visits: 0,
            reward_sum: 0.0,
            forbidden: None,
            children: Vec::new(),
            expanded: false,
        }
    }

    fn child(parent: &TreeNode, action: usize, state: SimplexState) -> Self {
        let mut node = Self::root(state, parent.depth + 1);
        node.action = Some(action);
        node
    }

    pub fn is_expanded(&self) -> bool {
        self.expanded
    }

    /// Mean reward `S / N`, defined once the node has been visited.
    pub fn mean(&self) -> Option<f64> {
        (self.visits > 0).then(|| self.reward_sum / self.visits as f64)
    }

    pub fn update_stats(&mut self, reward: f64) {
        self.visits += 1;
        self.reward_sum += reward;
    }

    /// Indices of children that may be selected.
    pub fn allowed_children(&self) -> impl Iterator<Item = usize> + '_ {
        self.children
            .iter()
            .enumerate()
            .filter(|(_, c)| c.forbidden.is_none())
            .map(|(i, _)| i)
    }
}

/// Creates one child per admissible action, in random order. Children
/// whose basis is in `ancestors` (or equals the node's own basis) are
/// marked [`Forbidden::Revisit`]; unbounded pivots are marked
/// [`Forbidden::Unbounded`].
pub fn expand<R: Rng + ?Sized>(
    node: &mut TreeNode,
    lp: &StandardFormLP,
    variant: ActionSetVariant,
    ancestors: &BTreeSet<BasisSignature>,
    rng: &mut R,
) -> Result<()> {
    if node.terminal {
        return Err(Error::AlreadyTerminal);
    }
    if node.expanded {
        return Err(Error::AlreadyExpanded);
    }
    let mut actions = action_set(&node.state, variant)?;
    actions.shuffle(rng);
    let mut children = Vec::with_capacity(actions.len());
    for a in actions {
        let mut next = node.state.clone();
        let child = match next.pivot_in_place(lp, a) {
            Ok(_) => {
                let mut child = TreeNode::child(node, a, next);
                if child.signature == node.signature || ancestors.contains(&child.signature) {
                    child.forbidden = Some(Forbidden::Revisit);
                }
                child
            }
            Err(Error::Unbounded { .. }) => {
                let mut child = TreeNode::child(node, a, node.state.clone());
                child.forbidden = Some(Forbidden::Unbounded);
                child
            }
            Err(e) => return Err(e),
        };
        children.push(child);
    }
    node.children = children;
    node.expanded = true;
    Ok(())
}

/// Upper confidence score of `child` under `parent`:
/// `S/N + c * sqrt(2 ln N(parent) / N)`, or `+inf` for an unvisited child.
pub fn ucb_score(child: &TreeNode, parent: &TreeNode, c_ucb: f64) -> f64 {
    if child.visits == 0 {
        return f64::INFINITY;
    }
    let n = child.visits as f64;
    let parent_visits = parent.visits.max(1) as f64;
    child.reward_sum / n + c_ucb * libm::sqrt(2.0 * libm::log(parent_visits) / n)
}

/// Relaxed maximum `min + alpha * (max - min)` of a non-empty score set.
pub fn e_soft(scores: &[f64], alpha: f64) -> f64 {
    let (lo, hi) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
    lo + alpha * (hi - lo)
}

/// Picks the child for the next exploration episode: an unvisited child
/// if any remain, otherwise a uniform choice among children whose UCB
/// score reaches the relaxed threshold.
pub fn select_exploration_child<R: Rng + ?Sized>(
    node: &TreeNode,
    alpha: f64,
    c_ucb: f64,
    rng: &mut R,
) -> Result<usize> {
    select_with_pending(node, alpha, c_ucb, &[], rng)
}

/// As [`select_exploration_child`], treating children flagged in `pending`
/// as already visited for the unvisited-first rule.
pub(crate) fn select_with_pending<R: Rng + ?Sized>(
    node: &TreeNode,
    alpha: f64,
    c_ucb: f64,
    pending: &[bool],
    rng: &mut R,
) -> Result<usize> {
    let allowed: Vec<usize> = node.allowed_children().collect();
    if allowed.is_empty() {
        return Err(Error::AllChildrenForbidden);
    }
    let is_pending = |i: usize| pending.get(i).copied().unwrap_or(false);
    let unvisited: Vec<usize> = allowed
        .iter()
        .copied()
        .filter(|&i| node.children[i].visits == 0 && !is_pending(i))
        .collect();
    if !unvisited.is_empty() {
        return Ok(unvisited[rng.random_range(0..unvisited.len())]);
    }
    let visited: Vec<usize> = allowed
        .iter()
        .copied()
        .filter(|&i| node.children[i].visits > 0)
        .collect();
    if visited.is_empty() {
        return Ok(allowed[rng.random_range(0..allowed.len())]);
    }
    let scores: Vec<f64> = visited
        .iter()
        .map(|&i| ucb_score(&node.children[i], node, c_ucb))
        .collect();
    let threshold = e_soft(&scores, alpha);
    let mut eligible: Vec<usize> = visited
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s >= threshold)
        .map(|(&i, _)| i)
        .collect();
    if eligible.is_empty() {
        // Rounding in `min + (max - min)` can overshoot the maximum.
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        eligible = visited
            .iter()
            .zip(&scores)
            .filter(|(_, &s)| s == best)
            .map(|(&i, _)| i)
            .collect();
    }
    Ok(eligible[rng.random_range(0..eligible.len())])
}

/// Credits reward `g` once to every distinct child touched in an episode
/// and counts the episode on the parent.
pub fn backpropagate(node: &mut TreeNode, touched: &[usize], g: f64) {
    let mut seen = BTreeSet::new();
    for &i in touched {
        if seen.insert(i) {
            node.children[i].update_stats(g);
        }
    }
    node.visits += 1;
}

/// Child with the highest mean reward; exact ties are broken uniformly.
pub fn exploit_step<R: Rng + ?Sized>(node: &TreeNode, rng: &mut R) -> Result<usize> {
    let scored: Vec<(usize, f64)> = node
        .allowed_children()
        .filter_map(|i| node.children[i].mean().map(|q| (i, q)))
        .collect();
    let best = scored
        .iter()
        .map(|&(_, q)| q)
        .fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = scored
        .iter()
        .filter(|&&(_, q)| q == best)
        .map(|&(i, _)| i)
        .collect();
    if ties.is_empty() {
        return Err(Error::AllChildrenForbidden);
    }
    Ok(ties[rng.random_range(0..ties.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use crate::rng::stream;
    use alloc::vec;

    fn lp_and_root(costs: &[f64]) -> (StandardFormLP, TreeNode) {
        let k = costs.len();
        let mut a = DenseMatrix::zeros(k, 2 * k);
        for j in 0..k {
            a[(j, j)] = 1.0;
            a[(j, k + j)] = 1.0;
        }
        let mut c = costs.to_vec();
        c.resize(2 * k, 0.0);
        let lp = StandardFormLP::new(c, a, vec![1.0; k]).unwrap();
        let s = SimplexState::from_basis(&lp, &(k..2 * k).collect::<Vec<_>>()).unwrap();
        (lp, TreeNode::root(s, 0))
    }

    fn stub_children(stats: &[(u64, f64)]) -> TreeNode {
        let (_, mut root) = lp_and_root(&[-1.0]);
        for &(n, s) in stats {
            let mut c = root.clone();
            c.visits = n;
            c.reward_sum = s;
            root.children.push(c);
        }
        root.visits = stats.iter().map(|s| s.0).sum();
        root.expanded = true;
        root
    }

    #[test]
    fn expand_creates_one_child_per_action() {
        let (lp, mut root) = lp_and_root(&[-1.0, -2.0, -3.0, 4.0]);
        expand(
            &mut root,
            &lp,
            ActionSetVariant::A1,
            &BTreeSet::new(),
            &mut stream(1, &[]),
        )
        .unwrap();
        assert_eq!(root.children.len(), 3);
        assert!(root
            .children
            .iter()
            .all(|c| c.visits == 0 && c.reward_sum == 0.0));
        let mut actions: Vec<usize> = root.children.iter().map(|c| c.action.unwrap()).collect();
        actions.sort();
        assert_eq!(actions, vec![0, 1, 2]);
        assert_eq!(
            expand(
                &mut root,
                &lp,
                ActionSetVariant::A1,
                &BTreeSet::new(),
                &mut stream(1, &[])
            ),
            Err(Error::AlreadyExpanded)
        );
    }

    #[test]
    fn expand_terminal_is_an_error() {
        let (lp, mut root) = lp_and_root(&[1.0, 2.0]);
        assert!(root.terminal);
        assert_eq!(
            expand(
                &mut root,
                &lp,
                ActionSetVariant::A1,
                &BTreeSet::new(),
                &mut stream(1, &[])
            ),
            Err(Error::AlreadyTerminal)
        );
    }

    #[test]
    fn child_matching_an_ancestor_is_forbidden() {
        let (lp, mut root) = lp_and_root(&[-1.0, -2.0]);
        // Pretend the basis reached by entering column 0 was visited before.
        let via0 = crate::pivot(&root.state, &lp, 0).unwrap();
        let ancestors: BTreeSet<_> = [root.signature.clone(), via0.signature()].into();
        expand(
            &mut root,
            &lp,
            ActionSetVariant::A1,
            &ancestors,
            &mut stream(1, &[]),
        )
        .unwrap();
        for c in &root.children {
            let expect = if c.action == Some(0) {
                Some(Forbidden::Revisit)
            } else {
                None
            };
            assert_eq!(c.forbidden, expect);
        }
    }

    #[test]
    fn ucb_reference_value() {
        let mut root = stub_children(&[(1, 1.0), (1, 0.0)]);
        root.visits = 2;
        let s = ucb_score(&root.children[0], &root, core::f64::consts::FRAC_1_SQRT_2);
        assert!((s - 1.8326).abs() < 1e-4, "{s}");
        let fresh = stub_children(&[(0, 0.0)]);
        assert_eq!(ucb_score(&fresh.children[0], &fresh, 1.0), f64::INFINITY);
        let twin = stub_children(&[(3, -6.0), (3, -6.0)]);
        assert_eq!(
            ucb_score(&twin.children[0], &twin, 0.7),
            ucb_score(&twin.children[1], &twin, 0.7)
        );
    }

    #[test]
    fn e_soft_examples() {
        assert_eq!(e_soft(&[0.0, 10.0], 0.3), 3.0);
        assert_eq!(e_soft(&[2.0, 7.0, 5.0], 0.0), 2.0);
        assert_eq!(e_soft(&[2.0, 7.0, 5.0], 1.0), 7.0);
    }

    #[test]
    fn unvisited_children_come_first() {
        let node = stub_children(&[(5, -5.0), (0, 0.0), (5, -50.0)]);
        let mut rng = stream(3, &[]);
        for _ in 0..20 {
            assert_eq!(
                select_exploration_child(&node, 1.0, 0.7, &mut rng).unwrap(),
                1
            );
        }
    }

    #[test]
    fn alpha_one_confines_to_argmax() {
        let node = stub_children(&[(10, -50.0), (10, -80.0), (10, -60.0)]);
        let mut rng = stream(4, &[]);
        for _ in 0..50 {
            assert_eq!(
                select_exploration_child(&node, 1.0, 0.7, &mut rng).unwrap(),
                0
            );
        }
    }

    #[test]
    fn alpha_zero_makes_everything_eligible() {
        let node = stub_children(&[(10, -50.0), (10, -80.0), (10, -60.0)]);
        let mut rng = stream(5, &[]);
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            counts[select_exploration_child(&node, 0.0, 0.7, &mut rng).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| c > 850), "{counts:?}");
    }

    #[test]
    fn forbidden_children_are_never_selected() {
        let mut node = stub_children(&[(1, -1.0), (1, -2.0)]);
        node.children[0].forbidden = Some(Forbidden::Revisit);
        let mut rng = stream(6, &[]);
        assert_eq!(
            select_exploration_child(&node, 1.0, 0.7, &mut rng).unwrap(),
            1
        );
        assert_eq!(exploit_step(&node, &mut rng).unwrap(), 1);
        node.children[1].forbidden = Some(Forbidden::Unbounded);
        assert_eq!(
            select_exploration_child(&node, 1.0, 0.7, &mut rng),
            Err(Error::AllChildrenForbidden)
        );
        assert_eq!(
            exploit_step(&node, &mut rng),
            Err(Error::AllChildrenForbidden)
        );
    }

    #[test]
    fn stats_and_first_visit_rule() {
        let mut node = stub_children(&[(0, 0.0), (0, 0.0)]);
        node.visits = 0;
        backpropagate(&mut node, &[0], -6.0);
        assert_eq!(node.children[0].mean(), Some(-6.0));
        backpropagate(&mut node, &[0], -8.0);
        assert_eq!(node.children[0].mean(), Some(-7.0));
        backpropagate(&mut node, &[1, 1], -4.0);
        assert_eq!(node.children[1].visits, 1);
        assert_eq!(node.visits, 3);
    }

    #[test]
    fn exploit_picks_best_mean_and_splits_ties() {
        let node = stub_children(&[(1, -6.0), (1, -7.0)]);
        assert_eq!(exploit_step(&node, &mut stream(7, &[])).unwrap(), 0);
        let single = stub_children(&[(2, -9.0)]);
        assert_eq!(exploit_step(&single, &mut stream(7, &[])).unwrap(), 0);
        let tied = stub_children(&[(2, -8.0), (4, -16.0)]);
        let mut rng = stream(8, &[]);
        let mut hits = [0usize; 2];
        for _ in 0..2000 {
            hits[exploit_step(&tied, &mut rng).unwrap()] += 1;
        }
        assert!(hits[0] > 850 && hits[1] > 850, "{hits:?}");
    }
}
