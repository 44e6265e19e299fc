//! C ABI over the `hseal` crate.
//!
//! Keys and bundles are opaque heap handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns an
//! [`HsealStatus`]; on failure a description is available from
//! [`hseal_last_error`] on the same thread. Byte outputs come back as an
//! [`HsealBuffer`], released with [`hseal_buffer_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hseal::envelope::{rsa_keygen, EnvelopeError};
use hseal::session::SessionParams;
use hseal::sum_protocol::{run_sum_protocol, SumError};
use hseal::wire::WireError;
use hseal::{AuthResult, CipherBundle, RsaPrivateKey, RsaPublicKey, SessionError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsealStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameters out of range, wrong kind of bundle, bad UTF-8 and so on.
    InvalidArgument = 2,
    /// A key or bundle file could not be parsed.
    Parse = 3,
    /// Decryption found tampered or inconsistent ciphertext.
    Integrity = 4,
    /// Authentication ran to completion and rejected the bundle.
    Rejected = 5,
    /// A Rust panic was caught at the boundary. This is a bug.
    Panic = 6,
}

/// Opaque public key handle.
pub struct HsealPublicKey(RsaPublicKey);

/// Opaque private key handle.
pub struct HsealPrivateKey(RsaPrivateKey);

/// Opaque handle to the blocks of one session.
pub struct HsealBundle(Vec<CipherBundle>);

/// Byte buffer allocated by this library.
#[repr(C)]
pub struct HsealBuffer {
    pub data: *mut u8,
    pub len: usize,
}

impl HsealBuffer {
    const EMPTY: Self = Self {
        data: ptr::null_mut(),
        len: 0,
    };

    fn from_vec(v: Vec<u8>) -> Self {
        let boxed = v.into_boxed_slice();
        let len = boxed.len();
        Self {
            data: Box::into_raw(boxed) as *mut u8,
            len,
        }
    }
}

struct Failure {
    status: HsealStatus,
    message: String,
}

impl Failure {
    fn new(status: HsealStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

fn envelope_status(e: &EnvelopeError) -> HsealStatus {
    match e {
        EnvelopeError::OutOfRange { .. } | EnvelopeError::Corrupt { .. } => HsealStatus::Integrity,
        EnvelopeError::KeyFormat(_) => HsealStatus::Parse,
        EnvelopeError::KeyTooSmall(_) | EnvelopeError::Empty => HsealStatus::InvalidArgument,
    }
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Self {
        let status = match &e {
            SessionError::Envelope(inner) => envelope_status(inner),
            SessionError::Parameter(_)
            | SessionError::NoBlocks
            | SessionError::MissingAuthTag(_) => HsealStatus::InvalidArgument,
            _ => HsealStatus::Integrity,
        };
        Self::new(status, e.to_string())
    }
}

impl From<EnvelopeError> for Failure {
    fn from(e: EnvelopeError) -> Self {
        Self::new(envelope_status(&e), e.to_string())
    }
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Self {
        let status = match e {
            WireError::Parse { .. } => HsealStatus::Parse,
            _ => HsealStatus::InvalidArgument,
        };
        Self::new(status, e.to_string())
    }
}

impl From<SumError> for Failure {
    fn from(e: SumError) -> Self {
        Self::new(HsealStatus::InvalidArgument, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    // Interior NULs would truncate the C string anyway.
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn guard(f: impl FnOnce() -> Result<HsealStatus, Failure>) -> HsealStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(failure)) => {
            set_last_error(failure.message);
            failure.status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {what}"));
            HsealStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(HsealStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn bytes<'a>(data: *const u8, len: usize, what: &str) -> Result<&'a [u8], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::new(HsealStatus::InvalidArgument, format!("{what}: {e}")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Description of the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hseal_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Generates an RSA key pair with a modulus of exactly `bits` bits. With
/// `seeded` false the seed is ignored and the OS supplies entropy.
///
/// # Safety
/// `out_pub` and `out_priv` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_keygen(
    bits: u32,
    seed: u64,
    seeded: bool,
    out_pub: *mut *mut HsealPublicKey,
    out_priv: *mut *mut HsealPrivateKey,
) -> HsealStatus {
    guard(|| {
        let out_pub = out(out_pub, "out_pub")?;
        let out_priv = out(out_priv, "out_priv")?;
        let (pk, sk) = rsa_keygen(bits, &mut hseal::session_rng(seeded.then_some(seed)))?;
        *out_pub = handle(HsealPublicKey(pk));
        *out_priv = handle(HsealPrivateKey(sk));
        Ok(HsealStatus::Ok)
    })
}

/// Parses a public key file (`N=...`, `e=...`).
///
/// # Safety
/// `key_text` must be a NUL-terminated string; `out_key` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_public_key_parse(
    key_text: *const c_char,
    out_key: *mut *mut HsealPublicKey,
) -> HsealStatus {
    guard(|| {
        let out_key = out(out_key, "out_key")?;
        let key: RsaPublicKey = text(key_text, "key_text")?.parse()?;
        *out_key = handle(HsealPublicKey(key));
        Ok(HsealStatus::Ok)
    })
}

/// Parses a private key file (`N=...`, `e=...`, `d=...`).
///
/// # Safety
/// `key_text` must be a NUL-terminated string; `out_key` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_private_key_parse(
    key_text: *const c_char,
    out_key: *mut *mut HsealPrivateKey,
) -> HsealStatus {
    guard(|| {
        let out_key = out(out_key, "out_key")?;
        let key: RsaPrivateKey = text(key_text, "key_text")?.parse()?;
        *out_key = handle(HsealPrivateKey(key));
        Ok(HsealStatus::Ok)
    })
}

/// Key file text for a public key. Free with [`hseal_string_free`].
///
/// # Safety
/// `key` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hseal_public_key_to_string(key: *const HsealPublicKey) -> *mut c_char {
    key.as_ref()
        .map_or(ptr::null_mut(), |k| c_string(k.0.to_string()))
}

/// Key file text for a private key. Free with [`hseal_string_free`].
///
/// # Safety
/// `key` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hseal_private_key_to_string(key: *const HsealPrivateKey) -> *mut c_char {
    key.as_ref()
        .map_or(ptr::null_mut(), |k| c_string(k.0.to_string()))
}

/// Extracts the public half of a private key as a new handle.
///
/// # Safety
/// `key` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hseal_private_key_public(
    key: *const HsealPrivateKey,
) -> *mut HsealPublicKey {
    key.as_ref().map_or(ptr::null_mut(), |k| {
        handle(HsealPublicKey(k.0.public_key()))
    })
}

/// Encrypts `msg` for `key`. Pass `n = m = 0` to draw the session
/// parameters at random; otherwise `n` must be prime and `1 <= m < n`. With
/// `authenticated` set every block also carries an enveloped garbage tag.
///
/// # Safety
/// `msg` must point to `msg_len` readable bytes (or be null with length 0),
/// `key` must be a live handle and `out_bundle` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_encrypt(
    msg: *const u8,
    msg_len: usize,
    key: *const HsealPublicKey,
    n: usize,
    m: usize,
    seed: u64,
    seeded: bool,
    authenticated: bool,
    out_bundle: *mut *mut HsealBundle,
) -> HsealStatus {
    guard(|| {
        let out_bundle = out(out_bundle, "out_bundle")?;
        let msg = bytes(msg, msg_len, "msg")?;
        let key = &deref(key, "key")?.0;
        let params = match (n, m) {
            (0, 0) => None,
            (n, m) => Some(SessionParams::new(n, m)?),
        };
        let mut rng = hseal::session_rng(seeded.then_some(seed));
        let sealed = if authenticated {
            hseal::auth_send(msg, key, params.as_ref(), &mut rng)
        } else {
            hseal::encrypt_session(msg, key, params.as_ref(), &mut rng)
        };
        // On this side a codec error means the input message was unusable.
        let bundles = sealed.map_err(|e| match e {
            SessionError::Codec(c) => Failure::new(HsealStatus::InvalidArgument, c.to_string()),
            e => e.into(),
        })?;
        *out_bundle = handle(HsealBundle(bundles));
        Ok(HsealStatus::Ok)
    })
}

/// Decrypts a bundle into `out_plain`.
///
/// # Safety
/// Handles must be live; `out_plain` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_decrypt(
    bundle: *const HsealBundle,
    key: *const HsealPrivateKey,
    out_plain: *mut HsealBuffer,
) -> HsealStatus {
    guard(|| {
        let out_plain = out(out_plain, "out_plain")?;
        *out_plain = HsealBuffer::EMPTY;
        let msg = hseal::decrypt_session(&deref(bundle, "bundle")?.0, &deref(key, "key")?.0)?;
        *out_plain = HsealBuffer::from_vec(msg);
        Ok(HsealStatus::Ok)
    })
}

/// Verifies and decrypts an authenticated bundle. Returns
/// `HSEAL_STATUS_REJECTED` with an empty buffer when the tag check fails.
///
/// # Safety
/// Handles must be live; `out_plain` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_auth_verify(
    bundle: *const HsealBundle,
    key: *const HsealPrivateKey,
    sender_view: *const HsealPublicKey,
    out_plain: *mut HsealBuffer,
) -> HsealStatus {
    guard(|| {
        let out_plain = out(out_plain, "out_plain")?;
        *out_plain = HsealBuffer::EMPTY;
        let result = hseal::auth_verify(
            &deref(bundle, "bundle")?.0,
            &deref(key, "key")?.0,
            &deref(sender_view, "sender_view")?.0,
        )?;
        match result {
            AuthResult::Authenticated { plaintext } => {
                *out_plain = HsealBuffer::from_vec(plaintext);
                Ok(HsealStatus::Ok)
            }
            AuthResult::Rejected(reason) => {
                Err(Failure::new(HsealStatus::Rejected, reason.to_string()))
            }
        }
    })
}

/// Serializes a bundle in the text wire format.
///
/// # Safety
/// `bundle` must be a live handle; `out_bytes` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_bundle_write(
    bundle: *const HsealBundle,
    out_bytes: *mut HsealBuffer,
) -> HsealStatus {
    guard(|| {
        let out_bytes = out(out_bytes, "out_bytes")?;
        *out_bytes = HsealBuffer::EMPTY;
        *out_bytes = HsealBuffer::from_vec(hseal::write_bundle(&deref(bundle, "bundle")?.0)?);
        Ok(HsealStatus::Ok)
    })
}

/// Parses a bundle from the text wire format.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out_bundle` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_bundle_read(
    data: *const u8,
    len: usize,
    out_bundle: *mut *mut HsealBundle,
) -> HsealStatus {
    guard(|| {
        let out_bundle = out(out_bundle, "out_bundle")?;
        let bundles = hseal::read_bundle(bytes(data, len, "data")?)?;
        *out_bundle = handle(HsealBundle(bundles));
        Ok(HsealStatus::Ok)
    })
}

/// Matrix order visible from the ciphertext alone, or 0 for a null handle.
///
/// # Safety
/// `bundle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hseal_bundle_order(bundle: *const HsealBundle) -> usize {
    bundle
        .as_ref()
        .and_then(|b| b.0.first())
        .map_or(0, hseal::infer_order)
}

/// Number of blocks, or 0 for a null handle.
///
/// # Safety
/// `bundle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hseal_bundle_block_count(bundle: *const HsealBundle) -> usize {
    bundle.as_ref().map_or(0, |b| b.0.len())
}

/// Runs the ring sum protocol and writes the broadcast total.
///
/// # Safety
/// `secrets` must point to `count` readable values; `out_sum` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn hseal_sum_protocol(
    secrets: *const u64,
    count: usize,
    blind: u64,
    out_sum: *mut u64,
) -> HsealStatus {
    guard(|| {
        let out_sum = out(out_sum, "out_sum")?;
        let secrets = if count == 0 {
            &[][..]
        } else if secrets.is_null() {
            return Err(null("secrets"));
        } else {
            std::slice::from_raw_parts(secrets, count)
        };
        *out_sum = run_sum_protocol(secrets, blind)?.broadcast;
        Ok(HsealStatus::Ok)
    })
}

/// # Safety
/// `key` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hseal_public_key_free(key: *mut HsealPublicKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// # Safety
/// `key` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hseal_private_key_free(key: *mut HsealPrivateKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// # Safety
/// `bundle` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hseal_bundle_free(bundle: *mut HsealBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// # Safety
/// `buf` must have come from this library and not been freed.
#[no_mangle]
pub unsafe extern "C" fn hseal_buffer_free(buf: HsealBuffer) {
    if !buf.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buf.data, buf.len,
        )));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hseal_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
