//! Rule sets and their least fixpoints by finite iteration.

use std::collections::BTreeSet;

use super::value::SetValue;

/// A rule `premises ⊢ conclusion`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rule {
    pub premises: BTreeSet<SetValue>,
    pub conclusion: SetValue,
}

/// Anything that can compute `Φ_R(X)`, the conclusions of rules whose
/// premises lie in `X`. Rule sets too large to list are represented by the
/// operator alone.
pub trait Rules {
    fn conclusions(&self, x: &BTreeSet<SetValue>) -> BTreeSet<SetValue>;
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: BTreeSet<Rule>,
}

impl RuleSet {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Self {
        RuleSet {
            rules: rules.into_iter().collect(),
        }
    }

    pub fn axiom(c: SetValue) -> Rule {
        Rule {
            premises: BTreeSet::new(),
            conclusion: c,
        }
    }
}

impl Rules for RuleSet {
    fn conclusions(&self, x: &BTreeSet<SetValue>) -> BTreeSet<SetValue> {
        self.rules
            .iter()
            .filter(|r| r.premises.is_subset(x))
            .map(|r| r.conclusion.clone())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stages {
    /// `stages[a]` is `Φᵃ`; `stages[0]` is empty.
    pub stages: Vec<BTreeSet<SetValue>>,
    /// Whether the last stage is a fixpoint.
    pub closed: bool,
}

impl Stages {
    pub fn last(&self) -> &BTreeSet<SetValue> {
        self.stages.last().expect("stage 0 is always present")
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.stages.iter().map(BTreeSet::len).collect()
    }
}

/// Stages `0..=max_stage` of `Φᵃ⁺¹ = Φᵃ ∪ Φ_R(Φᵃ)`, cut short at the first
/// fixpoint.
pub fn lfp_stages(r: &dyn Rules, max_stage: usize) -> Stages {
    let mut stages = vec![BTreeSet::new()];
    for _ in 0..max_stage {
        let cur = stages.last().expect("nonempty");
        let mut next = cur.clone();
        next.extend(r.conclusions(cur));
        if &next == cur {
            return Stages { stages, closed: true };
        }
        stages.push(next);
    }
    Stages {
        stages,
        closed: false,
    }
}
