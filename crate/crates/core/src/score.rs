use num_bigint::BigInt;

use crate::error::{DraftError, Result};
use crate::instance::{Agent, Instance, Player, Position};
use crate::matching::assignment_value;

fn side_value(position: &Position, p: Player) -> BigInt {
    let inst = position.instance();
    let agents: Vec<Agent> = position
        .picked(p)
        .iter()
        .map(|&k| inst.agent(k).clone())
        .collect();
    assignment_value(&agents, inst.tasks()).expect("instance agents share the task count")
}

/// Assignment values each player would get from the agents held right now.
pub fn provisional_values(position: &Position) -> (BigInt, BigInt) {
    (
        side_value(position, Player::Alice),
        side_value(position, Player::Bob),
    )
}

/// Score of a finished draft: Alice's assignment value minus Bob's.
pub fn final_score(position: &Position) -> Result<BigInt> {
    if !position.is_terminal() {
        return Err(DraftError::Precondition(format!(
            "{} agents are still free",
            position.free_count()
        )));
    }
    let (a, b) = provisional_values(position);
    Ok(a - b)
}

/// Largest single efficiency; the optimal score of a starting position lies
/// in `[0, score_upper_bound]`.
pub fn score_upper_bound(instance: &Instance) -> BigInt {
    BigInt::from(instance.max_eff())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_final_scores() {
        let inst = Instance::from_rows(2, &[&[4, 7], &[5, 5], &[0, 4]]).unwrap();
        let p = Position::from_ids(inst, &["X1", "X3"], &["X2"]).unwrap();
        assert_eq!(final_score(&p).unwrap(), BigInt::from(3));

        let inst = Instance::from_rows(2, &[&[5, 0], &[0, 4]]).unwrap();
        let p = Position::from_ids(inst, &["X1"], &["X2"]).unwrap();
        assert_eq!(final_score(&p).unwrap(), BigInt::from(1));

        let inst = Instance::from_rows(2, &[&[3, 1], &[3, 1], &[0, 2], &[0, 2]]).unwrap();
        let p = Position::from_ids(inst, &["X1", "X3"], &["X2", "X4"]).unwrap();
        assert_eq!(final_score(&p).unwrap(), BigInt::from(0));
    }

    #[test]
    fn unfinished_is_error() {
        let inst = Instance::from_rows(1, &[&[1], &[2]]).unwrap();
        let p = Position::start(inst);
        assert!(matches!(final_score(&p), Err(DraftError::Precondition(_))));
    }

    #[test]
    fn upper_bounds() {
        let inst = Instance::from_rows(2, &[&[4, 7], &[5, 5], &[0, 4]]).unwrap();
        assert_eq!(score_upper_bound(&inst), BigInt::from(7));
        assert_eq!(score_upper_bound(&Instance::new(3, vec![]).unwrap()), BigInt::from(0));
        let zeros = Instance::from_rows(2, &[&[0, 0], &[0, 0]]).unwrap();
        assert_eq!(score_upper_bound(&zeros), BigInt::from(0));
    }
}
