use super::{check_range, sorted_unique};
use crate::Result;

/// Finite sets `R_0 .. R_{k-1}`, all inside `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    members: Vec<Vec<usize>>,
    masks: Vec<Vec<bool>>,
}

impl SetFamily {
    pub fn new(n: usize, members: Vec<Vec<usize>>) -> Result<Self> {
        let members: Vec<Vec<usize>> = members.iter().map(|m| sorted_unique(m)).collect();
        for m in &members {
            check_range(m, n)?;
        }
        let masks = members
            .iter()
            .map(|m| {
                let mut mask = vec![false; n];
                for &x in m {
                    mask[x] = true;
                }
                mask
            })
            .collect();
        Ok(SetFamily { n, members, masks })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> &[usize] {
        &self.members[i]
    }

    pub fn contains(&self, i: usize, x: usize) -> bool {
        x < self.n && self.masks[i][x]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Inside,
    Outside,
}

/// Which side of `R_i` the set leans to, and how many elements disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohesiveVerdict {
    pub side: Side,
    pub exceptions: usize,
}

/// Per member: the side minimizing exceptions, `Inside` on ties.
pub fn cohesive_report(c: &[usize], family: &SetFamily) -> Vec<CohesiveVerdict> {
    let c = sorted_unique(c);
    (0..family.len())
        .map(|i| {
            let inside = c.iter().filter(|&&x| family.contains(i, x)).count();
            let outside = c.len() - inside;
            if outside <= inside {
                CohesiveVerdict {
                    side: Side::Inside,
                    exceptions: outside,
                }
            } else {
                CohesiveVerdict {
                    side: Side::Outside,
                    exceptions: inside,
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evens_minus_zero_is_inside() {
        let evens: Vec<usize> = (0..100).step_by(2).collect();
        let fam = SetFamily::new(100, vec![evens.clone()]).unwrap();
        let v = cohesive_report(&evens[1..], &fam);
        assert_eq!(
            v,
            vec![CohesiveVerdict {
                side: Side::Inside,
                exceptions: 0
            }]
        );
    }

    #[test]
    fn balanced_set_ties_inside() {
        let evens: Vec<usize> = (0..100).step_by(2).collect();
        let fam = SetFamily::new(100, vec![evens]).unwrap();
        let all: Vec<usize> = (0..100).collect();
        let v = cohesive_report(&all, &fam)[0];
        assert_eq!(v.exceptions, 50);
        assert_eq!(v.side, Side::Inside);
    }

    #[test]
    fn out_of_range_member_rejected() {
        assert!(SetFamily::new(5, vec![vec![5]]).is_err());
    }
}
