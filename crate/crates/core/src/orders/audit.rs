//! Cross-checks the relations against each other on a corpus of pairs.

use serde_json::{json, Value};

use crate::algebra::Scalar;
use crate::error::Error;
use crate::model::Experiment;
use crate::orders::{
    blackwell_dominates, bounded_dominates, elicitation_dominates, nonneg_dominates, uniform_garbling_decomposition,
    verify_witness, DominanceResult, Relation, Witness,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAudit {
    pub elicitation: bool,
    pub blackwell: bool,
    pub nonneg: bool,
    pub bounded: bool,
    pub dominating_complete: bool,
    /// Every returned witness satisfied its equations on re-check.
    pub witnesses_verified: bool,
    /// When elicitation holds: the uniform garbling decomposition exists and
    /// the dominating experiment is Blackwell-above the garbled one.
    pub garbling_round_trip: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AuditReport {
    pub pairs: Vec<PairAudit>,
    /// `(pair index, description)` for every broken implication or witness.
    pub violations: Vec<(usize, String)>,
    /// Pairs where elicitation dominance holds but nonnegative dominance fails.
    pub elicitation_not_nonneg: Vec<usize>,
    /// Pairs where nonnegative dominance holds but Blackwell dominance fails.
    pub nonneg_not_blackwell: Vec<usize>,
    /// Observed only; neither direction between these two orders is asserted.
    pub bounded_not_nonneg: Vec<usize>,
    pub nonneg_not_bounded: Vec<usize>,
    /// Pairs with a complete dominating experiment, where nonneg and
    /// Blackwell dominance must coincide.
    pub complete_pairs: usize,
}

impl AuditReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pairs": self.pairs.len(),
            "violations": self.violations.iter().map(|(i, d)| json!({"pair": i, "violation": d})).collect::<Vec<_>>(),
            "elicitation_not_nonneg": self.elicitation_not_nonneg,
            "nonneg_not_blackwell": self.nonneg_not_blackwell,
            "bounded_not_nonneg": self.bounded_not_nonneg,
            "nonneg_not_bounded": self.nonneg_not_bounded,
            "complete_pairs": self.complete_pairs,
        })
    }
}

fn checked<T: Scalar>(r: &DominanceResult<T>, e_y: &Experiment<T>, e_z: &Experiment<T>) -> bool {
    match (&r.witness, r.holds) {
        (Some(w), true) => verify_witness(r.relation, e_y, e_z, w),
        (None, false) => true,
        _ => false,
    }
}

fn round_trip<T: Scalar>(e_y: &Experiment<T>, e_z: &Experiment<T>) -> Result<bool, Error> {
    let Ok(d) = uniform_garbling_decomposition(e_y, e_z) else {
        return Ok(false);
    };
    let garbled = e_z.uniform_garble(&d.epsilon)?;
    let witness = Witness::Garbling { epsilon: d.epsilon.clone(), channel: d.channel.clone() };
    Ok(verify_witness(Relation::Garbling, e_y, e_z, &witness) && blackwell_dominates(e_y, &garbled)?.holds)
}

/// Runs all four relations on every pair and checks
/// Blackwell ⟹ nonneg ⟹ elicitation, Blackwell ⟹ bounded ⟹ elicitation,
/// nonneg ⟺ Blackwell when the dominating experiment is complete, and the
/// uniform garbling round trip.
pub fn order_consistency_audit<T: Scalar>(pairs: &[(Experiment<T>, Experiment<T>)]) -> Result<AuditReport, Error> {
    let mut report = AuditReport::default();
    for (i, (e_y, e_z)) in pairs.iter().enumerate() {
        let el = elicitation_dominates(e_y, e_z)?;
        let bw = blackwell_dominates(e_y, e_z)?;
        let nn = nonneg_dominates(e_y, e_z)?;
        let bd = bounded_dominates(e_y, e_z)?;
        let complete = e_y.is_complete();
        let witnesses_verified = [&el, &bw, &nn, &bd].iter().all(|r| checked(r, e_y, e_z));
        let garbling_round_trip = if el.holds { Some(round_trip(e_y, e_z)?) } else { None };
        let audit = PairAudit {
            elicitation: el.holds,
            blackwell: bw.holds,
            nonneg: nn.holds,
            bounded: bd.holds,
            dominating_complete: complete,
            witnesses_verified,
            garbling_round_trip,
        };
        let mut flag = |cond: bool, msg: &str| {
            if cond {
                report.violations.push((i, msg.to_string()));
            }
        };
        flag(audit.blackwell && !audit.nonneg, "blackwell without nonneg");
        flag(audit.nonneg && !audit.elicitation, "nonneg without elicitation");
        flag(audit.blackwell && !audit.bounded, "blackwell without bounded");
        flag(audit.bounded && !audit.elicitation, "bounded without elicitation");
        flag(complete && audit.nonneg != audit.blackwell, "complete dominating experiment but nonneg differs from blackwell");
        flag(!witnesses_verified, "witness failed re-verification");
        flag(garbling_round_trip == Some(false), "uniform garbling round trip failed");
        if complete {
            report.complete_pairs += 1;
        }
        if audit.elicitation && !audit.nonneg {
            report.elicitation_not_nonneg.push(i);
        }
        if audit.nonneg && !audit.blackwell {
            report.nonneg_not_blackwell.push(i);
        }
        if audit.bounded && !audit.nonneg {
            report.bounded_not_nonneg.push(i);
        }
        if audit.nonneg && !audit.bounded {
            report.nonneg_not_bounded.push(i);
        }
        report.pairs.push(audit);
    }
    Ok(report)
}
