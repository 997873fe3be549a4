//! Executable transfer checks: project p onto a model M and test whether the
//! projection lands in a designated submodel M'. When it does for every p in
//! a class, maximizing divergence from M over that class reduces to
//! maximizing divergence from M'.

use crate::dist::Dist;
use crate::error::Result;
use crate::models::ProjResult;

#[derive(Debug, Clone)]
pub struct SubmodelReport {
    pub projection: ProjResult,
    pub in_submodel: bool,
}

/// Project `p` with `project` and evaluate `membership` on the projection.
pub fn check_projection_in_submodel(
    p: &Dist,
    project: impl FnOnce(&Dist) -> Result<ProjResult>,
    membership: impl FnOnce(&Dist) -> Result<bool>,
) -> Result<SubmodelReport> {
    let projection = project(p)?;
    let in_submodel = membership(&projection.q_star)?;
    Ok(SubmodelReport {
        projection,
        in_submodel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::project_independence;
    use crate::space::StateSpace;

    /// Equal marginals on a homogeneous space, i.e. an i.i.d. product.
    fn iid_membership(tol: f64) -> impl Fn(&Dist) -> Result<bool> {
        move |q: &Dist| {
            let margs = q.axis_marginals();
            let first = &margs[0];
            Ok(margs
                .iter()
                .all(|m| m.iter().zip(first).all(|(a, b)| (a - b).abs() <= tol)))
        }
    }

    #[test]
    fn exchangeable_targets_project_to_iid() {
        // symmetric under swapping the two bits
        let p = Dist::new(
            StateSpace::binary(2).unwrap(),
            vec![0.5, 0.15, 0.15, 0.2],
        )
        .unwrap();
        let report =
            check_projection_in_submodel(&p, project_independence, iid_membership(1e-12)).unwrap();
        assert!(report.in_submodel);
    }

    #[test]
    fn asymmetric_point_mass_does_not() {
        let p = Dist::point_mass(StateSpace::binary(2).unwrap(), 1).unwrap();
        let report =
            check_projection_in_submodel(&p, project_independence, iid_membership(1e-12)).unwrap();
        assert!(!report.in_submodel);
    }

    #[test]
    fn diagonal_projects_to_the_uniform_distribution() {
        let space = StateSpace::binary(2).unwrap();
        let p = Dist::uniform_on(space.clone(), &[0, 3]).unwrap();
        let uniform = Dist::uniform(space);
        let report = check_projection_in_submodel(&p, project_independence, |q| {
            Ok(q.linf(&uniform)? <= 1e-12)
        })
        .unwrap();
        assert!(report.in_submodel);
    }
}
