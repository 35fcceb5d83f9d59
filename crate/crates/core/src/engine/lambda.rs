use serde::Serialize;

use super::EngineError;
use crate::group::{FGAbelianGroup, GroupDescription, GroupNode};

/// `Λ(G)`, the largest locally finite normal subgroup, and `G / Λ(G)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxLocallyFiniteNormal {
    pub lambda: FGAbelianGroup,
    pub quotient: FGAbelianGroup,
}

/// Supported for abelian atoms only, where `Λ(G)` is the torsion subgroup
/// and the quotient is the free part.
pub fn lambda_max_locally_finite(d: &GroupDescription) -> Result<MaxLocallyFiniteNormal, EngineError> {
    match &d.node {
        GroupNode::Abelian(g) => {
            let (lambda, quotient) = g.torsion_subgroup_and_free_quotient();
            Ok(MaxLocallyFiniteNormal { lambda, quotient })
        }
        _ => Err(EngineError::Unsupported(format!(
            "largest locally finite normal subgroup is computed for abelian groups only, got {}",
            d.kind()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_examples() {
        let d = GroupDescription::abelian(FGAbelianGroup::new(2, vec![6]).unwrap());
        let l = lambda_max_locally_finite(&d).unwrap();
        assert_eq!(l.lambda, FGAbelianGroup::cyclic(6).unwrap());
        assert_eq!(l.quotient, FGAbelianGroup::free_abelian(2));
        let z3 = GroupDescription::abelian(FGAbelianGroup::free_abelian(3));
        assert!(lambda_max_locally_finite(&z3).unwrap().lambda.is_trivial());
        let s = GroupDescription::finite(crate::group::FiniteGroupTable::cyclic(2).unwrap());
        assert!(matches!(lambda_max_locally_finite(&s), Err(EngineError::Unsupported(_))));
    }
}
