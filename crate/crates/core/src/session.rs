//! Session-key encryption, decryption and garbage-string authentication.
//!
//! A session picks a prime matrix order `n` and a block size `m < n`. Each
//! `m`-byte plaintext block gets `n - m` fresh random bytes appended, and the
//! resulting column `T` is sent as `Y = H·T` with `H` the order-`n` Hilbert
//! matrix. `n` and `m` travel RSA-enveloped under the receiver's key. In
//! authenticated mode each block also carries the envelope of its garbage
//! string, which the receiver recomputes and compares.
//!
//! The length of `Y` is `n`, so anyone holding a bundle learns the order
//! without opening any envelope; see [`infer_order`].

use num_bigint::BigUint;
use rand::{Rng, RngCore};
use thiserror::Error;

use crate::codec::{
    decode_blocks, encode_blocks, make_garbage, pad_column, strip_column, CodecError,
    GarbageString, PaddedColumn, PlainBlock,
};
use crate::envelope::{
    envelope_string, rsa_decrypt, rsa_encrypt, Envelope, EnvelopeError, RsaPrivateKey, RsaPublicKey,
};
use crate::hilbert::{hilbert_inverse, hilbert_matrix, primes_in, HilbertOrder};
use crate::linalg::{mat_vec, LinalgError, RatMatrix, RatVector};

/// Default range for auto-generated session orders.
pub const DEFAULT_PRIME_RANGE: PrimeRange = PrimeRange { lo: 11, hi: 97 };

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegrityFault {
    #[error("ciphertext has {got} entries, header says {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("recovered entry {index} is not an integer")]
    NonInteger { index: usize },
    #[error("recovered entry {index} is outside 0..=255")]
    OutOfRange { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("invalid session parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("session header does not open to valid parameters: {0}")]
    BadHeader(String),
    #[error("integrity check failed in block {block}: {fault}")]
    Integrity { block: usize, fault: IntegrityFault },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("bundle {0} has no garbage envelope; not an authenticated bundle")]
    MissingAuthTag(usize),
    #[error("no bundles")]
    NoBlocks,
    #[error("bundle {0} has a different session header from bundle 0")]
    MixedHeaders(usize),
}

/// Inclusive range of candidate primes for auto-generated orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeRange {
    pub lo: usize,
    pub hi: usize,
}

/// The session secrets `n` (prime order) and `m` (block size, `1 <= m < n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SessionParams {
    order: HilbertOrder,
    block_size: usize,
}

impl SessionParams {
    pub fn new(n: usize, m: usize) -> Result<Self, SessionError> {
        let order = HilbertOrder::prime(n).map_err(|e| SessionError::Parameter(e.to_string()))?;
        if m == 0 || m >= n {
            return Err(SessionError::Parameter(format!(
                "block size {m} must satisfy 1 <= m < n = {n}"
            )));
        }
        Ok(Self {
            order,
            block_size: m,
        })
    }

    /// Draws `n` uniformly from the primes in `range` and `m` uniformly
    /// from `1..n`.
    pub fn generate(range: PrimeRange, rng: &mut impl RngCore) -> Result<Self, SessionError> {
        let primes = primes_in(range.lo.max(2), range.hi);
        if primes.is_empty() {
            return Err(SessionError::Parameter(format!(
                "no primes in {}..={}",
                range.lo, range.hi
            )));
        }
        let n = primes[rng.gen_range(0..primes.len())];
        Self::with_random_block_size(n, rng)
    }

    /// Fixed prime `n` with `m` drawn uniformly from `1..n`.
    pub fn with_random_block_size(n: usize, rng: &mut impl RngCore) -> Result<Self, SessionError> {
        if n < 2 {
            return Err(SessionError::Parameter(format!(
                "order {n} leaves no room for m"
            )));
        }
        let m = rng.gen_range(1..n);
        Self::new(n, m)
    }

    pub fn order(&self) -> HilbertOrder {
        self.order
    }

    pub fn n(&self) -> usize {
        self.order.get()
    }

    pub fn m(&self) -> usize {
        self.block_size
    }

    pub fn garbage_len(&self) -> usize {
        self.n() - self.m()
    }
}

/// One transmitted block: `Y` plus the enveloped header and, in
/// authenticated mode, the enveloped garbage string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CipherBundle {
    pub y: RatVector,
    pub n_env: Envelope,
    pub m_env: Envelope,
    pub k_env: Option<Envelope>,
}

impl CipherBundle {
    pub fn is_authenticated(&self) -> bool {
        self.k_env.is_some()
    }
}

/// Why an authenticated bundle was turned away.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("{0}")]
    Header(String),
    #[error("block {block}: {fault}")]
    Integrity { block: usize, fault: IntegrityFault },
    #[error("block {block}: garbage envelope does not match")]
    TagMismatch { block: usize },
    #[error("padding: {0}")]
    Padding(CodecError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuthResult {
    Authenticated { plaintext: Vec<u8> },
    Rejected(Rejection),
}

impl AuthResult {
    pub fn is_authenticated(&self) -> bool {
        matches!(self, Self::Authenticated { .. })
    }

    pub fn plaintext(&self) -> Option<&[u8]> {
        match self {
            Self::Authenticated { plaintext } => Some(plaintext),
            Self::Rejected(_) => None,
        }
    }
}

/// `Y = H·T` for one padded column.
pub fn seal_column(h: &RatMatrix, column: &PaddedColumn) -> Result<RatVector, SessionError> {
    Ok(mat_vec(h, &RatVector::from_bytes(column.as_bytes())?)?)
}

/// `T = H⁻¹·Y`, checked to be a byte column.
pub fn unseal_column(h_inv: &RatMatrix, y: &RatVector) -> Result<PaddedColumn, IntegrityFault> {
    if y.len() != h_inv.cols() {
        return Err(IntegrityFault::WrongLength {
            expected: h_inv.cols(),
            got: y.len(),
        });
    }
    let t = mat_vec(h_inv, y).expect("dimensions checked");
    let bytes = t
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let v = r.to_integer().ok_or(IntegrityFault::NonInteger { index })?;
            u8::try_from(v).map_err(|_| IntegrityFault::OutOfRange { index })
        })
        .collect::<Result<Vec<u8>, _>>()?;
    Ok(PaddedColumn::from_bytes(bytes))
}

fn check_receiver(key: &RsaPublicKey, params: &SessionParams) -> Result<(), SessionError> {
    let floor = BigUint::from(params.n().max(255));
    if key.modulus <= floor {
        return Err(SessionError::Parameter(format!(
            "receiver modulus {} must exceed max(n, 255) = {floor}",
            key.modulus
        )));
    }
    Ok(())
}

/// Envelopes `n` and `m` under the receiver's key.
pub fn envelope_params(
    key: &RsaPublicKey,
    params: &SessionParams,
) -> Result<(Envelope, Envelope), SessionError> {
    check_receiver(key, params)?;
    let n_env = Envelope::single(rsa_encrypt(key, &BigUint::from(params.n()))?);
    let m_env = Envelope::single(rsa_encrypt(key, &BigUint::from(params.m()))?);
    Ok((n_env, m_env))
}

fn open_single(key: &RsaPrivateKey, env: &Envelope, what: &str) -> Result<usize, SessionError> {
    let [c] = env.values() else {
        return Err(SessionError::BadHeader(format!(
            "{what} envelope has {} elements, expected 1",
            env.len()
        )));
    };
    let v = rsa_decrypt(key, c).map_err(|e| SessionError::BadHeader(e.to_string()))?;
    usize::try_from(&v).map_err(|_| SessionError::BadHeader(format!("{what} = {v} is too large")))
}

/// Opens the enveloped header back into session parameters.
pub fn open_params(
    key: &RsaPrivateKey,
    n_env: &Envelope,
    m_env: &Envelope,
) -> Result<SessionParams, SessionError> {
    let n = open_single(key, n_env, "n")?;
    let m = open_single(key, m_env, "m")?;
    SessionParams::new(n, m).map_err(|e| match e {
        SessionError::Parameter(msg) => SessionError::BadHeader(msg),
        other => other,
    })
}

fn seal_message(
    message: &[u8],
    receiver: &RsaPublicKey,
    params: Option<&SessionParams>,
    rng: &mut impl RngCore,
    authenticated: bool,
) -> Result<Vec<CipherBundle>, SessionError> {
    let params = match params {
        Some(p) => *p,
        None => SessionParams::generate(DEFAULT_PRIME_RANGE, rng)?,
    };
    let (n_env, m_env) = envelope_params(receiver, &params)?;
    let blocks = encode_blocks(message, params.m())?;
    let h = hilbert_matrix(params.order());
    blocks
        .iter()
        .map(|block| {
            let garbage = make_garbage(params.garbage_len(), rng)?;
            let column = pad_column(block, &garbage, params.n())?;
            let k_env = if authenticated {
                Some(envelope_string(receiver, &garbage)?)
            } else {
                None
            };
            Ok(CipherBundle {
                y: seal_column(&h, &column)?,
                n_env: n_env.clone(),
                m_env: m_env.clone(),
                k_env,
            })
        })
        .collect()
}

/// Encrypts `message` for the receiver, one bundle per block. With
/// `params = None` the order and block size are drawn from `rng` using
/// [`DEFAULT_PRIME_RANGE`].
pub fn encrypt_session(
    message: &[u8],
    receiver: &RsaPublicKey,
    params: Option<&SessionParams>,
    rng: &mut impl RngCore,
) -> Result<Vec<CipherBundle>, SessionError> {
    seal_message(message, receiver, params, rng, false)
}

/// Like [`encrypt_session`], additionally enveloping each block's garbage
/// string as its authentication tag.
pub fn auth_send(
    message: &[u8],
    receiver: &RsaPublicKey,
    params: Option<&SessionParams>,
    rng: &mut impl RngCore,
) -> Result<Vec<CipherBundle>, SessionError> {
    seal_message(message, receiver, params, rng, true)
}

fn shared_header(bundles: &[CipherBundle]) -> Result<(&Envelope, &Envelope), SessionError> {
    let first = bundles.first().ok_or(SessionError::NoBlocks)?;
    if let Some(i) = bundles
        .iter()
        .position(|b| b.n_env != first.n_env || b.m_env != first.m_env)
    {
        return Err(SessionError::MixedHeaders(i));
    }
    Ok((&first.n_env, &first.m_env))
}

/// Opens a single bundle into its plaintext block and garbage string, without
/// removing message padding.
pub fn open_block(
    bundle: &CipherBundle,
    receiver: &RsaPrivateKey,
) -> Result<(SessionParams, PlainBlock, GarbageString), SessionError> {
    let params = open_params(receiver, &bundle.n_env, &bundle.m_env)?;
    let h_inv = hilbert_inverse(params.order());
    let column = unseal_column(&h_inv, &bundle.y)
        .map_err(|fault| SessionError::Integrity { block: 0, fault })?;
    let (p, g) = strip_column(&column, params.m())?;
    Ok((params, p, g))
}

fn open_columns(
    bundles: &[CipherBundle],
    receiver: &RsaPrivateKey,
) -> Result<(SessionParams, Vec<PaddedColumn>), SessionError> {
    let (n_env, m_env) = shared_header(bundles)?;
    let params = open_params(receiver, n_env, m_env)?;
    let h_inv = hilbert_inverse(params.order());
    let columns = bundles
        .iter()
        .enumerate()
        .map(|(block, b)| {
            unseal_column(&h_inv, &b.y).map_err(|fault| SessionError::Integrity { block, fault })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((params, columns))
}

/// Decrypts a sequence of bundles sharing one header back to the message.
pub fn decrypt_session(
    bundles: &[CipherBundle],
    receiver: &RsaPrivateKey,
) -> Result<Vec<u8>, SessionError> {
    let (params, columns) = open_columns(bundles, receiver)?;
    let blocks = columns
        .iter()
        .map(|c| strip_column(c, params.m()).map(|(p, _)| p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(decode_blocks(&blocks)?)
}

/// Verifies an authenticated bundle sequence.
///
/// Bundles without a garbage envelope are a usage error. Everything that
/// can result from tampering (bad header, non-byte column, tag mismatch,
/// broken padding) is reported as a rejection.
pub fn auth_verify(
    bundles: &[CipherBundle],
    receiver: &RsaPrivateKey,
    receiver_pub: &RsaPublicKey,
) -> Result<AuthResult, SessionError> {
    if let Some(i) = bundles.iter().position(|b| b.k_env.is_none()) {
        return Err(SessionError::MissingAuthTag(i));
    }
    let (params, columns) = match open_columns(bundles, receiver) {
        Ok(v) => v,
        Err(SessionError::Integrity { block, fault }) => {
            return Ok(AuthResult::Rejected(Rejection::Integrity { block, fault }))
        }
        Err(e @ (SessionError::BadHeader(_) | SessionError::MixedHeaders(_))) => {
            return Ok(AuthResult::Rejected(Rejection::Header(e.to_string())))
        }
        Err(e) => return Err(e),
    };
    let mut blocks = Vec::with_capacity(columns.len());
    for (block, (column, bundle)) in columns.iter().zip(bundles).enumerate() {
        let (p, k) = strip_column(column, params.m())?;
        let expected = envelope_string(receiver_pub, &k)?;
        if Some(&expected) != bundle.k_env.as_ref() {
            return Ok(AuthResult::Rejected(Rejection::TagMismatch { block }));
        }
        blocks.push(p);
    }
    match decode_blocks(&blocks) {
        Ok(plaintext) => Ok(AuthResult::Authenticated { plaintext }),
        Err(e) => Ok(AuthResult::Rejected(Rejection::Padding(e))),
    }
}

/// The matrix order, read straight off the ciphertext length.
pub fn infer_order(bundle: &CipherBundle) -> usize {
    bundle.y.len()
}

/// Pre-shared mode: both sides already know `n` and `m`, nothing is
/// enveloped and only the `Y` columns are produced.
pub fn encrypt_preshared(
    message: &[u8],
    params: &SessionParams,
    rng: &mut impl RngCore,
) -> Result<Vec<RatVector>, SessionError> {
    let h = hilbert_matrix(params.order());
    encode_blocks(message, params.m())?
        .iter()
        .map(|block| {
            let garbage = make_garbage(params.garbage_len(), rng)?;
            seal_column(&h, &pad_column(block, &garbage, params.n())?)
        })
        .collect()
}

pub fn decrypt_preshared(
    ys: &[RatVector],
    params: &SessionParams,
) -> Result<Vec<u8>, SessionError> {
    if ys.is_empty() {
        return Err(SessionError::NoBlocks);
    }
    let h_inv = hilbert_inverse(params.order());
    let blocks = ys
        .iter()
        .enumerate()
        .map(|(block, y)| {
            let col = unseal_column(&h_inv, y)
                .map_err(|fault| SessionError::Integrity { block, fault })?;
            Ok(strip_column(&col, params.m())?.0)
        })
        .collect::<Result<Vec<_>, SessionError>>()?;
    Ok(decode_blocks(&blocks)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{key_pair_from_primes, rsa_keygen};
    use crate::linalg::{rat, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy_keys() -> (RsaPublicKey, RsaPrivateKey) {
        key_pair_from_primes(
            &BigUint::from(61u32),
            &BigUint::from(53u32),
            &BigUint::from(17u32),
        )
        .unwrap()
    }

    fn keys(seed: u64) -> (RsaPublicKey, RsaPrivateKey) {
        rsa_keygen(64, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
    }

    fn ratv(xs: &[(i64, i64)]) -> RatVector {
        RatVector::new(xs.iter().map(|&(a, b)| rat(a, b).unwrap()).collect()).unwrap()
    }

    fn bundle_for(params: &SessionParams, key: &RsaPublicKey, t: &[u8]) -> CipherBundle {
        let (n_env, m_env) = envelope_params(key, params).unwrap();
        let h = hilbert_matrix(params.order());
        CipherBundle {
            y: seal_column(&h, &PaddedColumn::from_bytes(t.to_vec())).unwrap(),
            n_env,
            m_env,
            k_env: None,
        }
    }

    #[test]
    fn params_validation() {
        assert!(SessionParams::new(3, 2).is_ok());
        assert!(matches!(
            SessionParams::new(4, 2),
            Err(SessionError::Parameter(_))
        ));
        assert!(matches!(
            SessionParams::new(5, 5),
            Err(SessionError::Parameter(_))
        ));
        assert!(matches!(
            SessionParams::new(5, 0),
            Err(SessionError::Parameter(_))
        ));
        assert!(SessionParams::generate(
            PrimeRange { lo: 24, hi: 28 },
            &mut ChaCha20Rng::seed_from_u64(0)
        )
        .is_err());
    }

    #[test]
    fn generated_params_cover_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let p = SessionParams::generate(DEFAULT_PRIME_RANGE, &mut rng).unwrap();
            assert!((11..=97).contains(&p.n()));
            assert!(p.m() >= 1 && p.m() < p.n());
            seen.insert(p.n());
        }
        assert_eq!(seen.len(), primes_in(11, 97).len());
    }

    #[test]
    fn seal_example() {
        let params = SessionParams::new(3, 2).unwrap();
        let col = pad_column(
            &PlainBlock::new(vec![1, 2]).unwrap(),
            &GarbageString::new(vec![5]).unwrap(),
            3,
        )
        .unwrap();
        let y = seal_column(&hilbert_matrix(params.order()), &col).unwrap();
        assert_eq!(y, ratv(&[(11, 3), (29, 12), (11, 6)]));

        let zeros = seal_column(
            &hilbert_matrix(HilbertOrder::new(2).unwrap()),
            &PaddedColumn::from_bytes(vec![0, 0]),
        )
        .unwrap();
        assert_eq!(zeros, ratv(&[(0, 1), (0, 1)]));
    }

    #[test]
    fn open_block_example() {
        let (pk, sk) = toy_keys();
        let params = SessionParams::new(3, 2).unwrap();
        let (n_env, m_env) = envelope_params(&pk, &params).unwrap();
        let bundle = CipherBundle {
            y: ratv(&[(11, 3), (29, 12), (11, 6)]),
            n_env,
            m_env,
            k_env: None,
        };
        let (p, block, garbage) = open_block(&bundle, &sk).unwrap();
        assert_eq!(p, params);
        assert_eq!(block.as_bytes(), &[1, 2]);
        assert_eq!(garbage.as_bytes(), &[5]);

        let zero = bundle_for(&SessionParams::new(5, 3).unwrap(), &pk, &[0; 5]);
        assert_eq!(open_block(&zero, &sk).unwrap().1.as_bytes(), &[0, 0, 0]);
    }

    #[test]
    fn round_trip_small_key() {
        let (pk, sk) = toy_keys();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let msg = b"attack at dawn";
        for (n, m) in [(2, 1), (3, 2), (13, 5), (23, 22)] {
            let params = SessionParams::new(n, m).unwrap();
            let bundles = encrypt_session(msg, &pk, Some(&params), &mut rng).unwrap();
            assert_eq!(bundles.len(), (msg.len() + 1).div_ceil(m));
            assert!(bundles
                .iter()
                .all(|b| infer_order(b) == n && !b.is_authenticated()));
            assert_eq!(decrypt_session(&bundles, &sk).unwrap(), msg);
        }
    }

    #[test]
    fn auto_params_round_trip() {
        let (pk, sk) = keys(1);
        for seed in 0..20 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let bundles = encrypt_session(b"hello", &pk, None, &mut rng).unwrap();
            let n = open_params(&sk, &bundles[0].n_env, &bundles[0].m_env)
                .unwrap()
                .n();
            assert!((11..=97).contains(&n));
            assert_eq!(infer_order(&bundles[0]), n);
            assert_eq!(decrypt_session(&bundles, &sk).unwrap(), b"hello");
        }
    }

    #[test]
    fn seeded_encryption_is_deterministic() {
        let (pk, _) = keys(2);
        let a = encrypt_session(b"xyz", &pk, None, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let b = encrypt_session(b"xyz", &pk, None, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn receiver_modulus_must_cover_order() {
        // N = 7 * 41 = 287 > 255 but a key that small is fine for n <= 97.
        let (pk, _) = key_pair_from_primes(
            &BigUint::from(7u32),
            &BigUint::from(41u32),
            &BigUint::from(7u32),
        )
        .unwrap();
        assert!(encrypt_session(
            b"a",
            &pk,
            Some(&SessionParams::new(97, 3).unwrap()),
            &mut ChaCha20Rng::seed_from_u64(0)
        )
        .is_ok());
        // N = 11 * 13 = 143 cannot envelope byte-sized values.
        let (small, _) = key_pair_from_primes(
            &BigUint::from(11u32),
            &BigUint::from(13u32),
            &BigUint::from(7u32),
        )
        .unwrap();
        let err = encrypt_session(
            b"a",
            &small,
            Some(&SessionParams::new(3, 1).unwrap()),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, SessionError::Parameter(_)));
    }

    #[test]
    fn perturbed_y_is_an_integrity_error() {
        let (pk, sk) = keys(3);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut detected = 0;
        for _ in 0..100 {
            let mut bundles = encrypt_session(b"perturb me", &pk, None, &mut rng).unwrap();
            let b = rng.gen_range(0..bundles.len());
            let i = rng.gen_range(0..bundles[b].y.len());
            let mut e = bundles[b].y.clone().into_entries();
            e[i] = &e[i] + &Rational::one();
            bundles[b].y = RatVector::new(e).unwrap();
            if matches!(
                decrypt_session(&bundles, &sk),
                Err(SessionError::Integrity { .. })
            ) {
                detected += 1;
            }
        }
        assert_eq!(detected, 100);
    }

    #[test]
    fn wrong_length_y_is_rejected() {
        let (pk, sk) = toy_keys();
        let params = SessionParams::new(5, 2).unwrap();
        let mut bundles = encrypt_session(
            b"ab",
            &pk,
            Some(&params),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        bundles[0].y = ratv(&[(1, 1), (1, 2)]);
        assert!(matches!(
            decrypt_session(&bundles, &sk),
            Err(SessionError::Integrity {
                block: 0,
                fault: IntegrityFault::WrongLength {
                    expected: 5,
                    got: 2
                }
            })
        ));
    }

    #[test]
    fn bad_header_is_an_envelope_error() {
        let (pk, sk) = toy_keys();
        let params = SessionParams::new(5, 2).unwrap();
        let mut bundles = encrypt_session(
            b"ab",
            &pk,
            Some(&params),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        // Envelope a composite order instead.
        let four = Envelope::single(rsa_encrypt(&pk, &BigUint::from(4u32)).unwrap());
        for b in &mut bundles {
            b.n_env = four.clone();
        }
        assert!(matches!(
            decrypt_session(&bundles, &sk),
            Err(SessionError::BadHeader(_))
        ));

        let mut bundles = encrypt_session(
            b"ab",
            &pk,
            Some(&params),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        let seven = Envelope::single(rsa_encrypt(&pk, &BigUint::from(7u32)).unwrap());
        for b in &mut bundles {
            b.m_env = seven.clone();
        }
        assert!(matches!(
            decrypt_session(&bundles, &sk),
            Err(SessionError::BadHeader(_))
        ));
    }

    #[test]
    fn mixed_headers_rejected() {
        let (pk, sk) = toy_keys();
        let mut a = encrypt_session(
            b"abcdef",
            &pk,
            Some(&SessionParams::new(5, 2).unwrap()),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        let b = encrypt_session(
            b"abcdef",
            &pk,
            Some(&SessionParams::new(7, 2).unwrap()),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        a[1] = b[1].clone();
        assert_eq!(decrypt_session(&a, &sk), Err(SessionError::MixedHeaders(1)));
        assert_eq!(decrypt_session(&[], &sk), Err(SessionError::NoBlocks));
    }

    #[test]
    fn auth_tag_is_envelope_of_garbage() {
        let (pk, sk) = toy_keys();
        let params = SessionParams::new(3, 2).unwrap();
        let bundles =
            auth_send(&[1], &pk, Some(&params), &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        assert_eq!(bundles.len(), 1);
        let (_, block, garbage) = open_block(&bundles[0], &sk).unwrap();
        assert_eq!(block.as_bytes(), &[1, 1]);
        assert_eq!(
            bundles[0].k_env.as_ref().unwrap().values(),
            &[rsa_encrypt(&pk, &BigUint::from(garbage.as_bytes()[0])).unwrap()]
        );
        let r = auth_verify(&bundles, &sk, &pk).unwrap();
        assert_eq!(r.plaintext(), Some(&[1u8][..]));
    }

    #[test]
    fn auth_tag_of_known_garbage() {
        let (pk, _) = toy_keys();
        assert_eq!(
            envelope_string(&pk, &GarbageString::new(vec![5]).unwrap())
                .unwrap()
                .values(),
            &[rsa_encrypt(&pk, &BigUint::from(5u32)).unwrap()]
        );
    }

    #[test]
    fn auth_round_trip_and_tamper() {
        let (pk, sk) = keys(6);
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let bundles = auth_send(b"authentic", &pk, None, &mut rng).unwrap();
        let r = auth_verify(&bundles, &sk, &pk).unwrap();
        assert!(r.is_authenticated());
        assert_eq!(r.plaintext(), Some(&b"authentic"[..]));

        let mut t = bundles.clone();
        let k = t[0].k_env.as_ref().unwrap().values().to_vec();
        let mut k2 = k.clone();
        k2[0] = (&k2[0] + 1u32) % &pk.modulus;
        t[0].k_env = Some(Envelope::new(k2).unwrap());
        assert_eq!(
            auth_verify(&t, &sk, &pk).unwrap(),
            AuthResult::Rejected(Rejection::TagMismatch { block: 0 })
        );
    }

    #[test]
    fn spliced_ciphertext_with_stale_tag_is_rejected() {
        let (pk, sk) = keys(7);
        let params = SessionParams::new(13, 5).unwrap();
        let original = auth_send(
            b"hello",
            &pk,
            Some(&params),
            &mut ChaCha20Rng::seed_from_u64(1),
        )
        .unwrap();
        let other = auth_send(
            b"hello",
            &pk,
            Some(&params),
            &mut ChaCha20Rng::seed_from_u64(2),
        )
        .unwrap();
        assert_ne!(original[0].k_env, other[0].k_env);
        let mut spliced = original.clone();
        spliced[0].y = other[0].y.clone();
        let r = auth_verify(&spliced, &sk, &pk).unwrap();
        assert_eq!(r, AuthResult::Rejected(Rejection::TagMismatch { block: 0 }));
        assert!(r.plaintext().is_none());
    }

    #[test]
    fn auth_verify_requires_tags() {
        let (pk, sk) = toy_keys();
        let bundles = encrypt_session(
            b"x",
            &pk,
            Some(&SessionParams::new(3, 1).unwrap()),
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(
            auth_verify(&bundles, &sk, &pk),
            Err(SessionError::MissingAuthTag(0))
        );
    }

    #[test]
    fn auth_with_corrupt_y_is_rejection_not_error() {
        let (pk, sk) = keys(8);
        let mut bundles = auth_send(b"zz", &pk, None, &mut ChaCha20Rng::seed_from_u64(8)).unwrap();
        let mut e = bundles[0].y.clone().into_entries();
        e[0] = &e[0] + &rat(1, 7).unwrap();
        bundles[0].y = RatVector::new(e).unwrap();
        assert!(matches!(
            auth_verify(&bundles, &sk, &pk).unwrap(),
            AuthResult::Rejected(Rejection::Integrity { block: 0, .. })
        ));
    }

    #[test]
    fn preshared_mode() {
        let params = SessionParams::new(7, 3).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let ys = encrypt_preshared(b"pre-shared", &params, &mut rng).unwrap();
        assert!(ys.iter().all(|y| y.len() == 7));
        assert_eq!(decrypt_preshared(&ys, &params).unwrap(), b"pre-shared");
        // Wrong order fails the length check.
        assert!(decrypt_preshared(&ys, &SessionParams::new(5, 3).unwrap()).is_err());
    }
}
