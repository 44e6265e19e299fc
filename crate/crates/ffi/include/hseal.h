#ifndef HSEAL_H
#define HSEAL_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  HSEAL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  HSEAL_STATUS_NULL_POINTER = 1,
  /**
   * Parameters out of range, wrong kind of bundle, bad UTF-8 and so on.
   */
  HSEAL_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A key or bundle file could not be parsed.
   */
  HSEAL_STATUS_PARSE = 3,
  /**
   * Decryption found tampered or inconsistent ciphertext.
   */
  HSEAL_STATUS_INTEGRITY = 4,
  /**
   * Authentication ran to completion and rejected the bundle.
   */
  HSEAL_STATUS_REJECTED = 5,
  /**
   * A Rust panic was caught at the boundary. This is a bug.
   */
  HSEAL_STATUS_PANIC = 6,
} HsealStatus;

/**
 * Opaque handle to the blocks of one session.
 */
typedef struct HsealBundle HsealBundle;

/**
 * Opaque private key handle.
 */
typedef struct HsealPrivateKey HsealPrivateKey;

/**
 * Opaque public key handle.
 */
typedef struct HsealPublicKey HsealPublicKey;

/**
 * Byte buffer allocated by this library.
 */
typedef struct {
  uint8_t *data;
  size_t len;
} HsealBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *hseal_last_error(void);

/**
 * Generates an RSA key pair with a modulus of exactly `bits` bits. With
 * `seeded` false the seed is ignored and the OS supplies entropy.
 *
 * # Safety
 * `out_pub` and `out_priv` must be valid for writes.
 */
HsealStatus hseal_keygen(uint32_t bits,
                         uint64_t seed,
                         bool seeded,
                         HsealPublicKey **out_pub,
                         HsealPrivateKey **out_priv);

/**
 * Parses a public key file (`N=...`, `e=...`).
 *
 * # Safety
 * `key_text` must be a NUL-terminated string; `out_key` must be valid for writes.
 */
HsealStatus hseal_public_key_parse(const char *key_text, HsealPublicKey **out_key);

/**
 * Parses a private key file (`N=...`, `e=...`, `d=...`).
 *
 * # Safety
 * `key_text` must be a NUL-terminated string; `out_key` must be valid for writes.
 */
HsealStatus hseal_private_key_parse(const char *key_text, HsealPrivateKey **out_key);

/**
 * Key file text for a public key. Free with [`hseal_string_free`].
 *
 * # Safety
 * `key` must be a live handle or null.
 */
char *hseal_public_key_to_string(const HsealPublicKey *key);

/**
 * Key file text for a private key. Free with [`hseal_string_free`].
 *
 * # Safety
 * `key` must be a live handle or null.
 */
char *hseal_private_key_to_string(const HsealPrivateKey *key);

/**
 * Extracts the public half of a private key as a new handle.
 *
 * # Safety
 * `key` must be a live handle or null.
 */
HsealPublicKey *hseal_private_key_public(const HsealPrivateKey *key);

/**
 * Encrypts `msg` for `key`. Pass `n = m = 0` to draw the session
 * parameters at random; otherwise `n` must be prime and `1 <= m < n`. With
 * `authenticated` set every block also carries an enveloped garbage tag.
 *
 * # Safety
 * `msg` must point to `msg_len` readable bytes (or be null with length 0),
 * `key` must be a live handle and `out_bundle` valid for writes.
 */
HsealStatus hseal_encrypt(const uint8_t *msg,
                          size_t msg_len,
                          const HsealPublicKey *key,
                          size_t n,
                          size_t m,
                          uint64_t seed,
                          bool seeded,
                          bool authenticated,
                          HsealBundle **out_bundle);

/**
 * Decrypts a bundle into `out_plain`.
 *
 * # Safety
 * Handles must be live; `out_plain` must be valid for writes.
 */
HsealStatus hseal_decrypt(const HsealBundle *bundle,
                          const HsealPrivateKey *key,
                          HsealBuffer *out_plain);

/**
 * Verifies and decrypts an authenticated bundle. Returns
 * `HSEAL_STATUS_REJECTED` with an empty buffer when the tag check fails.
 *
 * # Safety
 * Handles must be live; `out_plain` must be valid for writes.
 */
HsealStatus hseal_auth_verify(const HsealBundle *bundle,
                              const HsealPrivateKey *key,
                              const HsealPublicKey *sender_view,
                              HsealBuffer *out_plain);

/**
 * Serializes a bundle in the text wire format.
 *
 * # Safety
 * `bundle` must be a live handle; `out_bytes` must be valid for writes.
 */
HsealStatus hseal_bundle_write(const HsealBundle *bundle, HsealBuffer *out_bytes);

/**
 * Parses a bundle from the text wire format.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out_bundle` must be valid for
 * writes.
 */
HsealStatus hseal_bundle_read(const uint8_t *data, size_t len, HsealBundle **out_bundle);

/**
 * Matrix order visible from the ciphertext alone, or 0 for a null handle.
 *
 * # Safety
 * `bundle` must be a live handle or null.
 */
size_t hseal_bundle_order(const HsealBundle *bundle);

/**
 * Number of blocks, or 0 for a null handle.
 *
 * # Safety
 * `bundle` must be a live handle or null.
 */
size_t hseal_bundle_block_count(const HsealBundle *bundle);

/**
 * Runs the ring sum protocol and writes the broadcast total.
 *
 * # Safety
 * `secrets` must point to `count` readable values; `out_sum` must be valid
 * for writes.
 */
HsealStatus hseal_sum_protocol(const uint64_t *secrets,
                               size_t count,
                               uint64_t blind,
                               uint64_t *out_sum);

/**
 * # Safety
 * `key` must be null or a handle not yet freed.
 */
void hseal_public_key_free(HsealPublicKey *key);

/**
 * # Safety
 * `key` must be null or a handle not yet freed.
 */
void hseal_private_key_free(HsealPrivateKey *key);

/**
 * # Safety
 * `bundle` must be null or a handle not yet freed.
 */
void hseal_bundle_free(HsealBundle *bundle);

/**
 * # Safety
 * `buf` must have come from this library and not been freed.
 */
void hseal_buffer_free(HsealBuffer buf);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void hseal_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSEAL_H */
