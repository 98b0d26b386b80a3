//! Left/right proposal probabilities along the first grid row, and the
//! resulting probability that a second-row node is matched vertically.
//!
//! With uniform weights over `K` levels, `y_k^r` (`y_k^l`) is the chance a
//! node receives a proposal from its right (left) neighbour given the edge
//! between them has weight `v_k`:
//!
//! ```text
//! y_k^r = (k/K) (1 - sum_{t>k}  y_t^r / K)
//! y_k^l = (k/K) (1 - sum_{t>=k} y_t^l / K)
//! ```
//!
//! An alternative reading puts `y^r` inside the left sum; both
//! readings are available so a simulation can arbitrate.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeftRecursion {
    /// `y^l` on both sides of the left recursion.
    SelfConsistent,
    /// `y^r` inside the left recursion's sum.
    RightInSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalProbabilities {
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// Probability a first-row node matches its vertical neighbour.
    pub p_m: f64,
}

pub fn grid_proposal_probabilities(k: usize, reading: LeftRecursion) -> ProposalProbabilities {
    let kf = k as f64;
    let mut right = vec![0.0; k];
    for j in (1..=k).rev() {
        let above: f64 = right[j..].iter().sum();
        right[j - 1] = j as f64 / kf * (1.0 - above / kf);
    }
    let mut left = vec![0.0; k];
    for j in (1..=k).rev() {
        let c = j as f64 / kf;
        left[j - 1] = match reading {
            LeftRecursion::RightInSum => c * (1.0 - right[j - 1..].iter().sum::<f64>() / kf),
            // y = c (1 - (y + S)/K)  =>  y = c (1 - S/K) / (1 + c/K)
            LeftRecursion::SelfConsistent => c * (1.0 - left[j..].iter().sum::<f64>() / kf) / (1.0 + c / kf),
        };
    }
    // vertical edge at level k wins only if neither side proposes at >= k
    let p_m = (1..=k)
        .map(|j| {
            let l: f64 = left[j - 1..].iter().sum();
            let r: f64 = right[j - 1..].iter().sum();
            (1.0 / kf) * (1.0 - l / kf) * (1.0 - r / kf)
        })
        .sum();
    ProposalProbabilities { right, left, p_m }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_values() {
        let s = grid_proposal_probabilities(2, LeftRecursion::SelfConsistent);
        assert!((s.right[0] - 0.25).abs() < 1e-15 && (s.right[1] - 1.0).abs() < 1e-15);
        assert!((s.left[0] - 4.0 / 15.0).abs() < 1e-15);
        assert!((s.left[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.p_m - 4.0 / 15.0).abs() < 1e-15);

        let p = grid_proposal_probabilities(2, LeftRecursion::RightInSum);
        assert_eq!(p.right, s.right);
        assert!((p.left[1] - 0.5).abs() < 1e-15);
        assert!((p.left[0] - 3.0 / 16.0).abs() < 1e-15);
        assert!((p.p_m - 159.0 / 512.0).abs() < 1e-15);
    }

    #[test]
    fn self_consistent_solution_satisfies_its_equation() {
        for k in 1..=6 {
            let s = grid_proposal_probabilities(k, LeftRecursion::SelfConsistent);
            let kf = k as f64;
            for j in 1..=k {
                let rhs = j as f64 / kf * (1.0 - s.left[j - 1..].iter().sum::<f64>() / kf);
                assert!((s.left[j - 1] - rhs).abs() < 1e-14);
            }
            assert!(s.p_m >= 0.0 && s.p_m < 1.0);
            assert_eq!(s.p_m > 0.0, k > 1);
        }
    }
}
