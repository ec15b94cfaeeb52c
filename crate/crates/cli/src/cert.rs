use locext_algcert::{combine_bounds, verify_certificate, SNCertificate, SchmidtNumberVerdict};
use locext_core::exactmat::{inner, psd_check, rational_string, BigRational, ExactVector, LdlFactorization, PsdVerdict};
use locext_core::qstates::{BipartiteState, Side};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PptEvidence {
    /// `ρ = L D L†` and `ρ^{T_B} = L' D' L'†` with nonnegative `D`, `D'`.
    Ppt { state_factor: LdlFactorization, pt_factor: LdlFactorization },
    /// `⟨w|ρ^{T_B}|w⟩ = value < 0`.
    NotPpt {
        witness: ExactVector,
        #[serde(with = "rational_string")]
        value: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PptCertificate {
    pub state: BipartiteState,
    pub birank: (usize, usize),
    pub evidence: PptEvidence,
}

impl PptCertificate {
    pub fn new(state: &BipartiteState) -> Result<Self, CliError> {
        let pt = state.partial_transpose(Side::B);
        let state_factor = match psd_check(&state.matrix)? {
            PsdVerdict::Psd(f) => f,
            PsdVerdict::NotPsd { .. } => unreachable!("states are PSD by construction"),
        };
        let evidence = match psd_check(&pt.matrix)? {
            PsdVerdict::Psd(pt_factor) => PptEvidence::Ppt { state_factor, pt_factor },
            PsdVerdict::NotPsd { witness, value } => PptEvidence::NotPpt { witness, value },
        };
        Ok(Self { state: state.clone(), birank: state.birank(), evidence })
    }

    pub fn is_ppt(&self) -> bool {
        matches!(self.evidence, PptEvidence::Ppt { .. })
    }

    /// Replays the factorizations (or the witness) against the stored state.
    pub fn replay(&self) -> Result<Vec<String>, String> {
        let pt = self.state.partial_transpose(Side::B);
        let mut checks = Vec::new();
        match &self.evidence {
            PptEvidence::Ppt { state_factor, pt_factor } => {
                if !state_factor.certifies_psd(&self.state.matrix) {
                    return Err("state factorization does not reproduce the state".into());
                }
                checks.push("L D L† = state with D ≥ 0".into());
                if !pt_factor.certifies_psd(&pt.matrix) {
                    return Err("partial-transpose factorization does not reproduce the partial transpose".into());
                }
                checks.push("L' D' L'† = partial transpose with D' ≥ 0".into());
            }
            PptEvidence::NotPpt { witness, value } => {
                let w = pt.matrix.mul_vec(witness).map_err(|e| e.to_string())?;
                let got = inner(witness, &w);
                if !got.im.is_zero() || got.re != *value || !value.is_negative() {
                    return Err(format!("witness expectation {got} does not match the recorded negative value"));
                }
                checks.push("witness has negative expectation in the partial transpose".into());
            }
        }
        if self.state.birank() != self.birank {
            return Err("recorded birank does not match".into());
        }
        checks.push(format!("birank {:?}", self.birank));
        Ok(checks)
    }
}

/// Every file `verify` accepts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "certificate", rename_all = "snake_case")]
pub enum Certificate {
    Ppt(PptCertificate),
    SchmidtNumber {
        lower: Option<Box<SNCertificate>>,
        upper: Box<SNCertificate>,
        verdict: Option<SchmidtNumberVerdict>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Replay {
    pub passed: bool,
    pub checks: Vec<String>,
    pub failure: Option<String>,
}

impl Certificate {
    pub fn replay(&self) -> Replay {
        let mut checks = Vec::new();
        let result = match self {
            Certificate::Ppt(c) => c.replay().map(|c| checks.extend(c)),
            Certificate::SchmidtNumber { lower, upper, verdict } => (|| {
                let up = verify_certificate(upper).map_err(|e| format!("upper bound: {e}"))?;
                checks.extend(up.checks.into_iter().map(|c| format!("upper: {c}")));
                if let Some(lo) = lower {
                    let rep = verify_certificate(lo).map_err(|e| format!("lower bound: {e}"))?;
                    checks.extend(rep.checks.into_iter().map(|c| format!("lower: {c}")));
                    let v = combine_bounds(lo, upper).map_err(|e| e.to_string())?;
                    if verdict.as_ref() != Some(&v) {
                        return Err("recorded verdict does not match the bounds".to_string());
                    }
                    checks.push(format!("SN in [{}, {}]", v.lower, v.upper));
                } else if verdict.is_some() {
                    return Err("verdict recorded without a lower bound".into());
                }
                Ok(())
            })(),
        };
        match result {
            Ok(()) => Replay { passed: true, checks, failure: None },
            Err(f) => Replay { passed: false, checks, failure: Some(f) },
        }
    }
}

/// Accepts a tagged [`Certificate`] or a bare Schmidt-number certificate.
pub fn parse_certificate(text: &str) -> Result<Certificate, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::input("certificate", e))?;
    if value.get("certificate").is_some() {
        return serde_json::from_value(value).map_err(|e| CliError::input("certificate", e));
    }
    let single: SNCertificate = serde_json::from_value(value).map_err(|e| CliError::input("certificate", e))?;
    Ok(match single.kind {
        locext_algcert::BoundKind::Upper => Certificate::SchmidtNumber { lower: None, upper: Box::new(single), verdict: None },
        locext_algcert::BoundKind::Lower => {
            return Err(CliError::input("certificate", "a lower bound needs its upper bound; wrap both in a schmidt_number certificate"))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use locext_core::qstates::{ket, rho_3x3};

    #[test]
    fn ppt_round_trip() {
        let c = PptCertificate::new(&rho_3x3()).unwrap();
        assert!(c.is_ppt());
        let text = serde_json::to_string(&Certificate::Ppt(c)).unwrap();
        let back = parse_certificate(&text).unwrap();
        assert!(back.replay().passed);
    }

    #[test]
    fn entangled_pure_state_is_not_ppt() {
        let v = ket(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let s = BipartiteState::from_weighted_vectors(2, 2, &[(locext_core::exactmat::ratio(1, 1), v)], "bell").unwrap();
        let c = PptCertificate::new(&s).unwrap();
        assert!(!c.is_ppt());
        assert!(c.replay().is_ok());
    }

    #[test]
    fn tampered_factor_fails() {
        let mut c = PptCertificate::new(&rho_3x3()).unwrap();
        if let PptEvidence::Ppt { state_factor, .. } = &mut c.evidence {
            state_factor.d[0] = state_factor.d[0].clone() + BigRational::from_integer(1.into());
        }
        assert!(c.replay().is_err());
    }
}
