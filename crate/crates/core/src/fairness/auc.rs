use crate::error::{Error, Result};
use crate::fairness::table::{Group, ScoreTable};

fn scope(group: Option<Group>) -> String {
    group.map_or_else(|| "all".to_string(), |g| g.to_string())
}

/// `P(s⁺ > s⁻) + ½ P(s⁺ = s⁻)` over all positive/negative pairs.
fn rank_statistic(pos: &[f64], neg: &[f64]) -> f64 {
    let mut neg = neg.to_vec();
    neg.sort_by(f64::total_cmp);
    // twice the win count keeps half-ties integral
    let twice: u64 = pos
        .iter()
        .map(|&s| {
            let below = neg.partition_point(|&x| x < s) as u64;
            let tied = neg.partition_point(|&x| x <= s) as u64 - below;
            2 * below + tied
        })
        .sum();
    twice as f64 / (2 * pos.len() as u64 * neg.len() as u64) as f64
}

/// Mann-Whitney AUC, over one group or the whole table.
pub fn auc(t: &ScoreTable, group: Option<Group>) -> Result<f64> {
    let pos = t.scores(group, Some(true));
    let neg = t.scores(group, Some(false));
    if pos.is_empty() {
        return Err(Error::NoPositives(scope(group)));
    }
    if neg.is_empty() {
        return Err(Error::NoNegatives(scope(group)));
    }
    Ok(rank_statistic(&pos, &neg))
}

/// Probability that a positive of `pos_group` outranks a negative of
/// `neg_group`, ties counted ½.
pub fn xauc(t: &ScoreTable, pos_group: Group, neg_group: Group) -> Result<f64> {
    let pos = t.scores(Some(pos_group), Some(true));
    let neg = t.scores(Some(neg_group), Some(false));
    if pos.is_empty() {
        return Err(Error::NoPositives(pos_group.to_string()));
    }
    if neg.is_empty() {
        return Err(Error::NoNegatives(neg_group.to_string()));
    }
    Ok(rank_statistic(&pos, &neg))
}

/// `xAUC(a⁺, b⁻) − xAUC(b⁺, a⁻)`.
pub fn delta_xauc(t: &ScoreTable) -> Result<f64> {
    Ok(xauc(t, Group::A, Group::B)? - xauc(t, Group::B, Group::A)?)
}
