//! Hilbert-matrix block cipher with RSA session-key enveloping.
//!
//! Plaintext blocks are padded with random garbage to length `n` and
//! multiplied by the order-`n` Hilbert matrix in exact rational arithmetic.
//! The receiver inverts with the closed-form integer inverse. The order and
//! block size are session secrets sent under textbook RSA, and the garbage
//! string doubles as an authentication tag. A ring sum protocol lets `k`
//! parties agree on the order jointly.
//!
//! This is a teaching artifact, not a secure cipher. Textbook RSA is
//! deterministic and unpadded, the ciphertext length reveals `n`
//! ([`session::infer_order`]), and the scheme is linear.

pub mod analysis;
pub mod codec;
pub mod envelope;
pub mod hilbert;
pub mod linalg;
pub mod session;
pub mod sum_protocol;
pub mod wire;

pub use envelope::{RsaPrivateKey, RsaPublicKey};
pub use linalg::{RatMatrix, RatVector, Rational};
pub use session::{
    auth_send, auth_verify, decrypt_session, encrypt_session, infer_order, AuthResult,
    CipherBundle, SessionError, SessionParams,
};
pub use wire::{read_bundle, write_bundle};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// The random source used by the CLI and FFI: ChaCha20, seeded explicitly
/// for reproducible output or from the OS otherwise.
pub fn session_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}
