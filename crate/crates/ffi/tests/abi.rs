use std::ffi::{CStr, CString};
use std::ptr;

use hseal_ffi::*;

fn last_error() -> String {
    let p = hseal_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Keys {
    public: *mut HsealPublicKey,
    private: *mut HsealPrivateKey,
}

impl Keys {
    fn new(seed: u64) -> Self {
        let mut public = ptr::null_mut();
        let mut private = ptr::null_mut();
        let st = unsafe { hseal_keygen(64, seed, true, &mut public, &mut private) };
        assert_eq!(st, HsealStatus::Ok);
        Self { public, private }
    }
}

impl Drop for Keys {
    fn drop(&mut self) {
        unsafe {
            hseal_public_key_free(self.public);
            hseal_private_key_free(self.private);
        }
    }
}

fn encrypt(keys: &Keys, msg: &[u8], n: usize, m: usize, auth: bool) -> *mut HsealBundle {
    let mut bundle = ptr::null_mut();
    let st = unsafe {
        hseal_encrypt(
            msg.as_ptr(),
            msg.len(),
            keys.public,
            n,
            m,
            7,
            true,
            auth,
            &mut bundle,
        )
    };
    assert_eq!(st, HsealStatus::Ok, "{}", last_error());
    bundle
}

fn take(buf: HsealBuffer) -> Vec<u8> {
    let v = if buf.data.is_null() {
        Vec::new()
    } else {
        unsafe { std::slice::from_raw_parts(buf.data, buf.len) }.to_vec()
    };
    unsafe { hseal_buffer_free(buf) };
    v
}

#[test]
fn round_trip_through_handles() {
    let keys = Keys::new(1);
    let msg = b"attack at dawn";
    let bundle = encrypt(&keys, msg, 13, 5, false);
    assert_eq!(unsafe { hseal_bundle_order(bundle) }, 13);
    assert_eq!(unsafe { hseal_bundle_block_count(bundle) }, 3);

    let mut out = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_decrypt(bundle, keys.private, &mut out) },
        HsealStatus::Ok
    );
    assert_eq!(take(out), msg);
    unsafe { hseal_bundle_free(bundle) };
}

#[test]
fn auto_params() {
    let keys = Keys::new(2);
    let bundle = encrypt(&keys, b"auto", 0, 0, false);
    let order = unsafe { hseal_bundle_order(bundle) };
    assert!((11..=97).contains(&order));
    let mut out = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_decrypt(bundle, keys.private, &mut out) },
        HsealStatus::Ok
    );
    assert_eq!(take(out), b"auto");
    unsafe { hseal_bundle_free(bundle) };
}

#[test]
fn empty_message_is_rejected() {
    let keys = Keys::new(2);
    let mut bundle = ptr::null_mut();
    let st = unsafe {
        hseal_encrypt(
            ptr::null(),
            0,
            keys.public,
            0,
            0,
            0,
            true,
            false,
            &mut bundle,
        )
    };
    assert_eq!(st, HsealStatus::InvalidArgument);
    assert!(bundle.is_null());
}

#[test]
fn wire_round_trip() {
    let keys = Keys::new(3);
    let bundle = encrypt(&keys, b"wire", 7, 3, true);
    let mut bytes = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_bundle_write(bundle, &mut bytes) },
        HsealStatus::Ok
    );
    let bytes = take(bytes);
    assert!(bytes.starts_with(b"HSEAL v1\n"));

    let mut again = ptr::null_mut();
    assert_eq!(
        unsafe { hseal_bundle_read(bytes.as_ptr(), bytes.len(), &mut again) },
        HsealStatus::Ok
    );
    let mut rewritten = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_bundle_write(again, &mut rewritten) },
        HsealStatus::Ok
    );
    assert_eq!(take(rewritten), bytes);
    unsafe {
        hseal_bundle_free(bundle);
        hseal_bundle_free(again);
    }
}

#[test]
fn auth_accepts_then_rejects_a_tampered_bundle() {
    let keys = Keys::new(4);
    let bundle = encrypt(&keys, b"signed", 11, 4, true);
    let mut out = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_auth_verify(bundle, keys.private, keys.public, &mut out) },
        HsealStatus::Ok
    );
    assert_eq!(take(out), b"signed");

    let mut bytes = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_bundle_write(bundle, &mut bytes) },
        HsealStatus::Ok
    );
    let text = String::from_utf8(take(bytes)).unwrap();
    // Swap the first garbage envelope element for a different valid residue.
    let line = text.lines().find(|l| l.starts_with("K':")).unwrap();
    let mut fields: Vec<&str> = line["K': ".len()..].split(',').collect();
    assert_eq!(fields.len(), 7);
    fields[0] = if fields[0] == "2" { "3" } else { "2" };
    let tampered = text.replacen(line, &format!("K': {}", fields.join(",")), 1);

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { hseal_bundle_read(tampered.as_ptr(), tampered.len(), &mut bad) },
        HsealStatus::Ok
    );
    let mut out = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    let st = unsafe { hseal_auth_verify(bad, keys.private, keys.public, &mut out) };
    assert_eq!(st, HsealStatus::Rejected);
    assert!(out.data.is_null());
    assert!(!last_error().is_empty());
    unsafe {
        hseal_bundle_free(bundle);
        hseal_bundle_free(bad);
    }
}

#[test]
fn key_text_round_trip() {
    let keys = Keys::new(5);
    let s = unsafe { hseal_private_key_to_string(keys.private) };
    let text = unsafe { CStr::from_ptr(s) }.to_owned();
    unsafe { hseal_string_free(s) };
    assert!(text.to_str().unwrap().starts_with("N="));

    let mut parsed = ptr::null_mut();
    assert_eq!(
        unsafe { hseal_private_key_parse(text.as_ptr(), &mut parsed) },
        HsealStatus::Ok
    );
    let pub_from_priv = unsafe { hseal_private_key_public(parsed) };
    let a = unsafe { hseal_public_key_to_string(pub_from_priv) };
    let b = unsafe { hseal_public_key_to_string(keys.public) };
    assert_eq!(unsafe { CStr::from_ptr(a) }, unsafe { CStr::from_ptr(b) });
    unsafe {
        hseal_string_free(a);
        hseal_string_free(b);
        hseal_public_key_free(pub_from_priv);
        hseal_private_key_free(parsed);
    }
}

#[test]
fn error_codes() {
    let keys = Keys::new(6);
    let mut bundle = ptr::null_mut();

    let st = unsafe {
        hseal_encrypt(
            ptr::null(),
            0,
            keys.public,
            12,
            5,
            0,
            true,
            false,
            &mut bundle,
        )
    };
    assert_eq!(st, HsealStatus::InvalidArgument);
    assert!(last_error().contains("prime"), "{}", last_error());

    let st = unsafe {
        hseal_encrypt(
            ptr::null(),
            3,
            keys.public,
            0,
            0,
            0,
            true,
            false,
            &mut bundle,
        )
    };
    assert_eq!(st, HsealStatus::NullPointer);

    let st = unsafe { hseal_bundle_read(b"junk".as_ptr(), 4, &mut bundle) };
    assert_eq!(st, HsealStatus::Parse);

    let mut public = ptr::null_mut();
    let bad = CString::new("N=10\ne=3\n").unwrap();
    assert_eq!(
        unsafe { hseal_public_key_parse(bad.as_ptr(), &mut public) },
        HsealStatus::Parse
    );

    let mut private = ptr::null_mut();
    assert_eq!(
        unsafe { hseal_keygen(8, 0, true, &mut public, &mut private) },
        HsealStatus::InvalidArgument
    );

    // Plain bundles carry no tag to verify.
    let plain = encrypt(&keys, b"x", 5, 2, false);
    let mut out = HsealBuffer {
        data: ptr::null_mut(),
        len: 0,
    };
    assert_eq!(
        unsafe { hseal_auth_verify(plain, keys.private, keys.public, &mut out) },
        HsealStatus::InvalidArgument
    );
    unsafe { hseal_bundle_free(plain) };

    assert_eq!(unsafe { hseal_bundle_order(ptr::null()) }, 0);
    unsafe {
        hseal_bundle_free(ptr::null_mut());
        hseal_string_free(ptr::null_mut());
        hseal_buffer_free(HsealBuffer {
            data: ptr::null_mut(),
            len: 0,
        });
    }
}

#[test]
fn sum_protocol() {
    let mut total = 0;
    let secrets = [4u64, 7, 11];
    assert_eq!(
        unsafe { hseal_sum_protocol(secrets.as_ptr(), 3, 5, &mut total) },
        HsealStatus::Ok
    );
    assert_eq!(total, 22);
    let st = unsafe { hseal_sum_protocol(secrets.as_ptr(), 1, 5, &mut total) };
    assert_eq!(st, HsealStatus::InvalidArgument);
}
