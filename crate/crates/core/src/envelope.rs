//! Textbook RSA, used to envelope session values for the receiver.
//!
//! INSECURE: encryption is unpadded and deterministic (`c = x^e mod N`).
//! Authentication relies on that determinism, since the receiver re-encrypts
//! the recovered garbage string and compares it with what was sent.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::codec::GarbageString;

/// Miller-Rabin rounds for key generation.
pub const MILLER_RABIN_ROUNDS: usize = 40;
pub const DEFAULT_PUBLIC_EXPONENT: u32 = 65537;
pub const MIN_KEY_BITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("key size {0} bits is below the {MIN_KEY_BITS}-bit floor")]
    KeyTooSmall(u32),
    #[error("value {value} is not below the modulus {modulus}")]
    OutOfRange { value: BigUint, modulus: BigUint },
    #[error("envelope element {index} opened to {value}, which is not a byte")]
    Corrupt { index: usize, value: BigUint },
    #[error("envelope is empty")]
    Empty,
    #[error("key file: {0}")]
    KeyFormat(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RsaPublicKey {
    pub modulus: BigUint,
    pub exponent: BigUint,
}

/// Private half. The public exponent is kept alongside so the key file is
/// self-describing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RsaPrivateKey {
    pub modulus: BigUint,
    pub public_exponent: BigUint,
    pub exponent: BigUint,
}

impl RsaPrivateKey {
    pub fn public_key(&self) -> RsaPublicKey {
        RsaPublicKey {
            modulus: self.modulus.clone(),
            exponent: self.public_exponent.clone(),
        }
    }
}

/// RSA ciphertexts, one per enveloped value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Envelope(Vec<BigUint>);

impl Envelope {
    pub fn new(values: Vec<BigUint>) -> Result<Self, EnvelopeError> {
        if values.is_empty() {
            return Err(EnvelopeError::Empty);
        }
        Ok(Self(values))
    }

    pub fn single(value: BigUint) -> Self {
        Self(vec![value])
    }

    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn random_below(bound: &BigUint, rng: &mut impl RngCore) -> BigUint {
    let bytes = (bound.bits() as usize).div_ceil(8) + 8;
    let mut buf = vec![0u8; bytes];
    rng.fill_bytes(&mut buf);
    BigUint::from_bytes_le(&buf) % bound
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Miller-Rabin with `rounds` random witnesses drawn from `rng`.
pub fn is_probable_prime(n: &BigUint, rounds: usize, rng: &mut impl RngCore) -> bool {
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    if *n < BigUint::from(2u32) {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let span = n - 3u32;
    'witness: for _ in 0..rounds {
        let a = random_below(&span, rng) + 2u32;
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits and its top two bits set, so the
/// product of two such primes has the full combined width.
fn random_prime(bits: u32, rng: &mut impl RngCore) -> BigUint {
    debug_assert!(bits >= 8);
    loop {
        let mut buf = vec![0u8; (bits as usize).div_ceil(8)];
        rng.fill_bytes(&mut buf);
        let mut c = BigUint::from_bytes_le(&buf);
        c &= (BigUint::one() << bits) - 1u32;
        c |= BigUint::from(3u32) << (bits - 2);
        c |= BigUint::one();
        if is_probable_prime(&c, MILLER_RABIN_ROUNDS, rng) {
            return c;
        }
    }
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let (a, m) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m).to_biguint()
}

/// Picks the public exponent: 65537 when valid, otherwise the smallest odd
/// `e >= 3` coprime to `phi`.
fn choose_exponent(phi: &BigUint) -> Option<BigUint> {
    let preferred = BigUint::from(DEFAULT_PUBLIC_EXPONENT);
    if preferred < *phi && preferred.gcd(phi).is_one() {
        return Some(preferred);
    }
    (3u32..)
        .step_by(2)
        .map(BigUint::from)
        .take_while(|e| e < phi)
        .find(|e| e.gcd(phi).is_one())
}

/// Builds a key pair from two distinct primes and a public exponent.
pub fn key_pair_from_primes(
    p: &BigUint,
    q: &BigUint,
    e: &BigUint,
) -> Option<(RsaPublicKey, RsaPrivateKey)> {
    if p == q {
        return None;
    }
    let one = BigUint::one();
    let phi = (p - &one) * (q - &one);
    if *e <= one || *e >= phi {
        return None;
    }
    let d = mod_inverse(e, &phi)?;
    let modulus = p * q;
    Some((
        RsaPublicKey {
            modulus: modulus.clone(),
            exponent: e.clone(),
        },
        RsaPrivateKey {
            modulus,
            public_exponent: e.clone(),
            exponent: d,
        },
    ))
}

/// Generates a textbook RSA pair with a `bits`-bit modulus. Deterministic for
/// a seeded `rng`.
pub fn rsa_keygen(
    bits: u32,
    rng: &mut impl RngCore,
) -> Result<(RsaPublicKey, RsaPrivateKey), EnvelopeError> {
    if bits < MIN_KEY_BITS {
        return Err(EnvelopeError::KeyTooSmall(bits));
    }
    let p_bits = bits.div_ceil(2);
    let q_bits = bits / 2;
    loop {
        let p = random_prime(p_bits, rng);
        let q = random_prime(q_bits, rng);
        let one = BigUint::one();
        let phi = (&p - &one) * (&q - &one);
        let Some(e) = choose_exponent(&phi) else {
            continue;
        };
        if let Some(pair) = key_pair_from_primes(&p, &q, &e) {
            debug_assert_eq!((&pair.0.exponent * &pair.1.exponent) % &phi, one);
            return Ok(pair);
        }
    }
}

fn check_range(value: &BigUint, modulus: &BigUint) -> Result<(), EnvelopeError> {
    if value >= modulus {
        return Err(EnvelopeError::OutOfRange {
            value: value.clone(),
            modulus: modulus.clone(),
        });
    }
    Ok(())
}

pub fn rsa_encrypt(key: &RsaPublicKey, value: &BigUint) -> Result<BigUint, EnvelopeError> {
    check_range(value, &key.modulus)?;
    Ok(value.modpow(&key.exponent, &key.modulus))
}

pub fn rsa_decrypt(key: &RsaPrivateKey, value: &BigUint) -> Result<BigUint, EnvelopeError> {
    check_range(value, &key.modulus)?;
    Ok(value.modpow(&key.exponent, &key.modulus))
}

/// Envelopes a garbage string byte by byte.
pub fn envelope_string(key: &RsaPublicKey, s: &GarbageString) -> Result<Envelope, EnvelopeError> {
    s.as_bytes()
        .iter()
        .map(|&b| rsa_encrypt(key, &BigUint::from(b)))
        .collect::<Result<Vec<_>, _>>()
        .and_then(Envelope::new)
}

pub fn open_envelope(key: &RsaPrivateKey, env: &Envelope) -> Result<GarbageString, EnvelopeError> {
    let bytes = env
        .values()
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let v = rsa_decrypt(key, c)?;
            u8::try_from(&v).map_err(|_| EnvelopeError::Corrupt { index, value: v })
        })
        .collect::<Result<Vec<u8>, _>>()?;
    GarbageString::new(bytes).map_err(|_| EnvelopeError::Empty)
}

// Key files are line-oriented `name=<decimal>` records.

fn parse_key_fields(text: &str, names: &[&str]) -> Result<Vec<BigUint>, EnvelopeError> {
    let mut found: Vec<Option<BigUint>> = vec![None; names.len()];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            EnvelopeError::KeyFormat(format!("line {}: expected name=value", lineno + 1))
        })?;
        let slot = names.iter().position(|n| *n == k).ok_or_else(|| {
            EnvelopeError::KeyFormat(format!("line {}: unknown field {k:?}", lineno + 1))
        })?;
        if found[slot].is_some() {
            return Err(EnvelopeError::KeyFormat(format!(
                "line {}: duplicate field {k:?}",
                lineno + 1
            )));
        }
        if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
            return Err(EnvelopeError::KeyFormat(format!(
                "line {}: {k} is not a decimal integer",
                lineno + 1
            )));
        }
        found[slot] = Some(v.parse().expect("digits checked"));
    }
    found
        .into_iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| EnvelopeError::KeyFormat(format!("missing field {n}"))))
        .collect()
}

impl fmt::Display for RsaPublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.modulus)?;
        writeln!(f, "e={}", self.exponent)
    }
}

impl fmt::Display for RsaPrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N={}", self.modulus)?;
        writeln!(f, "e={}", self.public_exponent)?;
        writeln!(f, "d={}", self.exponent)
    }
}

impl FromStr for RsaPublicKey {
    type Err = EnvelopeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let [modulus, exponent]: [BigUint; 2] = parse_key_fields(s, &["N", "e"])?
            .try_into()
            .expect("two fields");
        if modulus <= BigUint::from(255u32) {
            return Err(EnvelopeError::KeyFormat("modulus must exceed 255".into()));
        }
        Ok(Self { modulus, exponent })
    }
}

impl FromStr for RsaPrivateKey {
    type Err = EnvelopeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let [modulus, public_exponent, exponent]: [BigUint; 3] =
            parse_key_fields(s, &["N", "e", "d"])?
                .try_into()
                .expect("three fields");
        if modulus <= BigUint::from(255u32) {
            return Err(EnvelopeError::KeyFormat("modulus must exceed 255".into()));
        }
        Ok(Self {
            modulus,
            public_exponent,
            exponent,
        })
    }
}
