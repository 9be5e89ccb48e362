//! Certified good reductions for three holes.

use thiserror::Error;

mod cyclic;
mod necklace;
mod one;
mod three;

pub use cyclic::{build_necklace, hole_type, maximal_arcs, Necklace, NecklaceError};
pub use necklace::{
    antipodal_pairs, procedure_two, remote_paths, select_cuts, symmetrize, HoleFrame, NecklaceCase, NecklaceOutcome,
    NecklacePlan, PairAnalysis, Symmetrized,
};
pub use one::{check_c4, find_excessive_pair, reduction_one, ExcessivePair};
pub use three::{has_inner_structure, reduction_three, ChordCandidate};

use crate::exec::Parallelism;
use crate::geodesics::all_distances;
use crate::planar::{Instance, PlanarError, VertexId};
use crate::twohole::{OracleError, ReductionCertificate, ReferenceOracle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("certification failed: {0}")]
    CertificationFailure(String),
    #[error("iteration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

pub struct ReduceContext<'a> {
    pub mode: Parallelism,
    pub oracle: &'a ReferenceOracle,
}

/// One edit of the pipeline state.
#[derive(Debug, Clone)]
pub enum StepAction {
    /// Replace the instance by an equivalent one; `merges` lists vertex
    /// identifications `(removed, kept)`.
    Replace { instance: Instance, merges: Vec<(VertexId, VertexId)> },
    /// Apply a good reduction to the current instance.
    Reduce(ReductionCertificate),
}

#[derive(Debug, Clone)]
pub struct ReduceStep {
    pub phase: &'static str,
    pub actions: Vec<StepAction>,
    pub oracle_calls: usize,
}

/// The next reduction of the structured phases, if any applies.
pub fn next_step(inst: &Instance, ctx: &ReduceContext) -> Result<Option<ReduceStep>, ReduceError> {
    let dist = all_distances(inst, ctx.mode);
    if let Some(cert) = reduction_one(inst, &dist, ctx)? {
        return Ok(Some(ReduceStep { phase: "reduction I", actions: vec![StepAction::Reduce(cert)], oracle_calls: 1 }));
    }
    if let NecklaceOutcome::Step(step) = procedure_two(inst, ctx)? {
        return Ok(Some(step));
    }
    let (cert, calls) = reduction_three(inst, &dist, ctx)?;
    Ok(cert.map(|c| ReduceStep { phase: "reduction III", actions: vec![StepAction::Reduce(c)], oracle_calls: calls }))
}

#[cfg(test)]
mod tests;
