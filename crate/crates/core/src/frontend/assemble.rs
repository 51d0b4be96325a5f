use super::ast::*;

/// The global formula split into its antecedent and consequent.
///
/// The antecedent constrains the environment (assumptions) and the callers
/// (requirements); the consequent is what the contract must guarantee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalFormula {
    pub assumptions: PastTslFormula,
    pub requirements: PastTslFormula,
    pub obligations: PastTslFormula,
}

impl GlobalFormula {
    pub fn antecedent(&self) -> PastTslFormula {
        and_simplified(self.assumptions.clone(), self.requirements.clone())
    }

    pub fn formula(&self) -> PastTslFormula {
        PastTslFormula::implies(self.antecedent(), self.obligations.clone())
    }
}

/// `WY false`, true exactly at the first position.
pub fn first_position() -> PastTslFormula {
    PastTslFormula::WeakYesterday(Box::new(PastTslFormula::False))
}

fn and_simplified(a: PastTslFormula, b: PastTslFormula) -> PastTslFormula {
    match (a, b) {
        (PastTslFormula::True, x) | (x, PastTslFormula::True) => x,
        (a, b) => PastTslFormula::and(a, b),
    }
}

fn at_start(f: PastTslFormula) -> PastTslFormula {
    if f == PastTslFormula::True {
        f
    } else {
        PastTslFormula::implies(first_position(), f)
    }
}

fn always_before(f: PastTslFormula) -> PastTslFormula {
    if f == PastTslFormula::True {
        f
    } else {
        PastTslFormula::Historically(Box::new(f))
    }
}

fn history_part(init: &[PastTslFormula], inv: &[PastTslFormula]) -> PastTslFormula {
    and_simplified(
        at_start(PastTslFormula::conjunction(init.iter().cloned())),
        always_before(PastTslFormula::conjunction(inv.iter().cloned())),
    )
}

pub fn assemble_parts(spec: &PastTslSpec) -> GlobalFormula {
    GlobalFormula {
        assumptions: history_part(&spec.assumptions_init, &spec.assumptions_inv),
        requirements: history_part(&spec.requirements_init, &spec.requirements_inv),
        obligations: and_simplified(
            at_start(PastTslFormula::conjunction(spec.obligations_init.iter().cloned())),
            PastTslFormula::conjunction(spec.obligations_inv.iter().cloned()),
        ),
    }
}

/// `(WY false -> A_init && R_init) && H(A_inv && R_inv) -> (WY false -> O_init) && O_inv`,
/// required to hold at every position. Empty parts become `true`.
pub fn assemble_global_formula(spec: &PastTslSpec) -> PastTslFormula {
    assemble_parts(spec).formula()
}
