//! Ring sum protocol among `k` participants, simulated in process.
//!
//! Participant 1 blinds its secret with a constant `c` and passes the
//! running total around the ring `1 → 2 → … → k → 1`. Each participant adds
//! its own secret; participant 1 finally subtracts `c` and broadcasts the
//! total, which becomes the shared Hilbert order.

use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use crate::envelope::RsaPublicKey;
use crate::hilbert::{binomial, is_prime, HilbertOrder};
use crate::session::{encrypt_session, CipherBundle, SessionError, SessionParams};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumError {
    #[error("the ring needs at least 2 participants, got {0}")]
    TooFewParticipants(usize),
    #[error("participant {0} has a zero secret; secrets must be positive")]
    ZeroSecret(usize),
    #[error("blinding constant must be positive")]
    ZeroBlind,
    #[error("running total overflowed at participant {0}")]
    Overflow(usize),
    #[error("sum {0} is not prime; participants must choose new secrets")]
    NonPrimeSum(u64),
    #[error("observer {observer} is not a participant (k = {k})")]
    UnknownObserver { observer: usize, k: usize },
    #[error("transcript is malformed: {0}")]
    BadTranscript(String),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// A ring member. Indices are 1-based; only participant 1 holds the blind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Participant {
    pub index: usize,
    pub secret: u64,
    pub blind: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub from: usize,
    pub to: usize,
    pub value: u64,
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}: {}", self.from, self.to, self.value)
    }
}

/// Every message sent in one run, in order, plus the final broadcast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumTranscript {
    pub messages: Vec<Hop>,
    pub broadcast: u64,
}

impl SumTranscript {
    pub fn participants(&self) -> usize {
        self.messages.len()
    }

    /// The value participant `i` received (from `i-1`, or from `k` for `i = 1`).
    pub fn incoming(&self, i: usize) -> Option<u64> {
        self.messages.iter().find(|h| h.to == i).map(|h| h.value)
    }

    pub fn outgoing(&self, i: usize) -> Option<u64> {
        self.messages.iter().find(|h| h.from == i).map(|h| h.value)
    }

    /// Checks the ring shape `1→2→…→k→1` and that values only grow along it.
    pub fn validate(&self) -> Result<(), SumError> {
        let k = self.messages.len();
        if k < 2 {
            return Err(SumError::TooFewParticipants(k));
        }
        for (i, h) in self.messages.iter().enumerate() {
            let expected = (i + 1, if i + 1 == k { 1 } else { i + 2 });
            if (h.from, h.to) != expected {
                return Err(SumError::BadTranscript(format!(
                    "hop {} is {}->{}, expected {}->{}",
                    i + 1,
                    h.from,
                    h.to,
                    expected.0,
                    expected.1
                )));
            }
            if i > 0 && h.value <= self.messages[i - 1].value {
                return Err(SumError::BadTranscript(format!(
                    "hop {} does not add a positive secret",
                    i + 1
                )));
            }
        }
        let last = self.messages[k - 1].value;
        if self.broadcast >= last
            || self.broadcast < k as u64
            || self.messages[0].value <= last - self.broadcast
        {
            return Err(SumError::BadTranscript(
                "broadcast inconsistent with ring".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for SumTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.messages {
            writeln!(f, "{h}")?;
        }
        writeln!(f, "broadcast: {}", self.broadcast)
    }
}

/// Builds the participant list for the given secrets and blind.
pub fn participants(secrets: &[u64], blind: u64) -> Vec<Participant> {
    secrets
        .iter()
        .enumerate()
        .map(|(i, &secret)| Participant {
            index: i + 1,
            secret,
            blind: (i == 0).then_some(blind),
        })
        .collect()
}

pub fn run_sum_protocol(secrets: &[u64], blind: u64) -> Result<SumTranscript, SumError> {
    let k = secrets.len();
    if k < 2 {
        return Err(SumError::TooFewParticipants(k));
    }
    if let Some(i) = secrets.iter().position(|&s| s == 0) {
        return Err(SumError::ZeroSecret(i + 1));
    }
    if blind == 0 {
        return Err(SumError::ZeroBlind);
    }
    let mut running = blind;
    let mut messages = Vec::with_capacity(k);
    for (i, &secret) in secrets.iter().enumerate() {
        let index = i + 1;
        running = running
            .checked_add(secret)
            .ok_or(SumError::Overflow(index))?;
        let to = if index == k { 1 } else { index + 1 };
        messages.push(Hop {
            from: index,
            to,
            value: running,
        });
    }
    Ok(SumTranscript {
        messages,
        broadcast: running - blind,
    })
}

/// A group session keyed by the broadcast sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedSession {
    pub participants: Vec<Participant>,
    pub order: HilbertOrder,
    pub transcript: SumTranscript,
}

/// Runs the ring protocol and, if the total is a usable prime order,
/// encrypts `message` under it with a random block size.
///
/// Completing the ring is treated as every participant's agreement to send.
pub fn shared_key_session(
    secrets: &[u64],
    blind: u64,
    message: &[u8],
    receiver: &RsaPublicKey,
    rng: &mut impl RngCore,
) -> Result<(SharedSession, Vec<CipherBundle>), SumError> {
    let transcript = run_sum_protocol(secrets, blind)?;
    let n = transcript.broadcast;
    if !is_prime(n) {
        return Err(SumError::NonPrimeSum(n));
    }
    let n = usize::try_from(n).map_err(|_| SumError::NonPrimeSum(n))?;
    let params = SessionParams::with_random_block_size(n, rng)?;
    let bundles = encrypt_session(message, receiver, Some(&params), rng)?;
    Ok((
        SharedSession {
            participants: participants(secrets, blind),
            order: params.order(),
            transcript,
        },
        bundles,
    ))
}

/// What a participant's view of the transcript reveals about the others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyReport {
    pub observer: usize,
    /// Values the observer saw: its incoming message, then the broadcast.
    pub observed: Vec<u64>,
    /// Sum of every other participant's secret (always learnable from the
    /// broadcast).
    pub others_total: u64,
    /// Number of assignments of positive integers to the unknowns behind the
    /// incoming message that are consistent with it. For observers other
    /// than 1 the unknowns are `c, n_1, …, n_{i-1}`; participant 1 knows `c`,
    /// so its unknowns are `n_2, …, n_k` constrained by the others' total.
    pub consistent_assignments: BigUint,
    /// Set when the view pins down one other participant's secret exactly.
    pub leaked_secret: Option<(usize, u64)>,
}

impl PrivacyReport {
    /// True when no individual secret of another participant is determined.
    pub fn is_private(&self) -> bool {
        self.leaked_secret.is_none()
    }
}

// Positive-integer solutions of x_1 + … + x_parts = total.
fn compositions(total: u64, parts: u64) -> BigUint {
    binomial(total.saturating_sub(1), parts as i64 - 1)
        .to_biguint()
        .unwrap_or_default()
}

pub fn privacy_audit(
    transcript: &SumTranscript,
    observer: usize,
) -> Result<PrivacyReport, SumError> {
    transcript.validate()?;
    let k = transcript.participants();
    if observer == 0 || observer > k {
        return Err(SumError::UnknownObserver { observer, k });
    }
    let incoming = transcript.incoming(observer).expect("ring validated");
    let outgoing = transcript.outgoing(observer).expect("ring validated");
    let broadcast = transcript.broadcast;

    let (own_secret, consistent_assignments) = if observer == 1 {
        // Participant 1 knows c = incoming - broadcast and n_1 = outgoing - c.
        let c = incoming - broadcast;
        let n1 = outgoing - c;
        (n1, compositions(broadcast - n1, k as u64 - 1))
    } else {
        (outgoing - incoming, compositions(incoming, observer as u64))
    };
    let others_total = broadcast - own_secret;
    let leaked_secret = (k == 2).then_some((if observer == 1 { 2 } else { 1 }, others_total));
    Ok(PrivacyReport {
        observer,
        observed: vec![incoming, broadcast],
        others_total,
        consistent_assignments,
        leaked_secret,
    })
}
