//! `HSEAL v1` bundle files.
//!
//! ```text
//! HSEAL v1
//! mode: plain|auth
//! n': <decimal>
//! m': <decimal>
//! Y: r1,r2,...,rn          one line per block
//! K': e1,e2,...            auth mode only, right after its Y line
//! ```
//!
//! Rationals use the canonical `num/den` form, integers are base-10 without
//! leading zeros, and every line ends in `\n`. Output is a pure function of
//! the bundles.

use std::fmt::{self, Write as _};

use num_bigint::BigUint;
use thiserror::Error;

use crate::envelope::Envelope;
use crate::linalg::{RatVector, Rational};
use crate::session::CipherBundle;

pub const MAGIC: &str = "HSEAL";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("nothing to write")]
    Empty,
    #[error("bundle {0} has a different header from bundle 0")]
    MixedHeaders(usize),
    #[error("bundle {0} does not match the mode of bundle 0")]
    MixedModes(usize),
    #[error("bundle header envelopes must have exactly one element")]
    HeaderArity,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> WireError {
    WireError::Parse {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Plain,
    Authenticated,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Authenticated => "auth",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Logical contents of a bundle file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleFile {
    pub version: u32,
    pub mode: Mode,
    pub n_env: BigUint,
    pub m_env: BigUint,
    pub blocks: Vec<RatVector>,
    /// One tag per block, present iff `mode` is authenticated.
    pub k_env: Option<Vec<Envelope>>,
}

impl BundleFile {
    pub fn from_bundles(bundles: &[CipherBundle]) -> Result<Self, WireError> {
        let first = bundles.first().ok_or(WireError::Empty)?;
        let ([n_env], [m_env]) = (first.n_env.values(), first.m_env.values()) else {
            return Err(WireError::HeaderArity);
        };
        let mode = if first.is_authenticated() {
            Mode::Authenticated
        } else {
            Mode::Plain
        };
        for (i, b) in bundles.iter().enumerate() {
            if b.n_env != first.n_env || b.m_env != first.m_env {
                return Err(WireError::MixedHeaders(i));
            }
            if b.is_authenticated() != first.is_authenticated() {
                return Err(WireError::MixedModes(i));
            }
        }
        let k_env = (mode == Mode::Authenticated).then(|| {
            bundles
                .iter()
                .map(|b| b.k_env.clone().expect("mode checked"))
                .collect()
        });
        Ok(Self {
            version: VERSION,
            mode,
            n_env: n_env.clone(),
            m_env: m_env.clone(),
            blocks: bundles.iter().map(|b| b.y.clone()).collect(),
            k_env,
        })
    }

    pub fn into_bundles(self) -> Vec<CipherBundle> {
        let n_env = Envelope::single(self.n_env);
        let m_env = Envelope::single(self.m_env);
        let mut tags = self.k_env.map(Vec::into_iter);
        self.blocks
            .into_iter()
            .map(|y| CipherBundle {
                y,
                n_env: n_env.clone(),
                m_env: m_env.clone(),
                k_env: tags.as_mut().and_then(Iterator::next),
            })
            .collect()
    }

    pub fn encode(&self) -> String {
        let mut out = String::new();
        // Writing to a String cannot fail.
        let _ = writeln!(out, "{MAGIC} v{}", self.version);
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "n': {}", self.n_env);
        let _ = writeln!(out, "m': {}", self.m_env);
        for (i, y) in self.blocks.iter().enumerate() {
            out.push_str("Y: ");
            push_joined(&mut out, y.iter());
            out.push('\n');
            if let Some(tags) = &self.k_env {
                out.push_str("K': ");
                push_joined(&mut out, tags[i].values().iter());
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, WireError> {
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")))
        };

        let (ln, magic) = next("header")?;
        let version = magic
            .strip_prefix(MAGIC)
            .and_then(|r| r.strip_prefix(" v"))
            .ok_or_else(|| parse_err(ln, format!("expected `{MAGIC} v{VERSION}`")))?;
        if version != VERSION.to_string() {
            return Err(parse_err(ln, format!("unsupported version {version:?}")));
        }

        let (ln, mode_line) = next("mode")?;
        let mode = match field(ln, mode_line, "mode")? {
            "plain" => Mode::Plain,
            "auth" => Mode::Authenticated,
            other => return Err(parse_err(ln, format!("unknown mode {other:?}"))),
        };
        let (ln, l) = next("n'")?;
        let n_env = decimal(ln, field(ln, l, "n'")?)?;
        let (ln, l) = next("m'")?;
        let m_env = decimal(ln, field(ln, l, "m'")?)?;

        let mut blocks = Vec::new();
        let mut tags = Vec::new();
        let mut pending_tag: Option<usize> = None;
        for (ln, l) in lines {
            if let Some(rest) = l.strip_prefix("Y: ") {
                if let Some(y_line) = pending_tag {
                    return Err(parse_err(
                        ln,
                        format!("block on line {y_line} has no K' line"),
                    ));
                }
                let entries = rest
                    .split(',')
                    .map(|s| {
                        s.parse::<Rational>()
                            .map_err(|e| parse_err(ln, format!("bad rational {s:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                blocks.push(RatVector::new(entries).map_err(|e| parse_err(ln, e.to_string()))?);
                if mode == Mode::Authenticated {
                    pending_tag = Some(ln);
                }
            } else if let Some(rest) = l.strip_prefix("K': ") {
                if pending_tag.take().is_none() {
                    return Err(parse_err(
                        ln,
                        "K' line without a preceding Y line in auth mode",
                    ));
                }
                let values = rest
                    .split(',')
                    .map(|s| decimal(ln, s))
                    .collect::<Result<Vec<_>, _>>()?;
                tags.push(Envelope::new(values).map_err(|e| parse_err(ln, e.to_string()))?);
            } else {
                return Err(parse_err(ln, format!("unexpected line {l:?}")));
            }
        }
        if let Some(y_line) = pending_tag {
            return Err(parse_err(y_line, "block has no K' line"));
        }
        if blocks.is_empty() {
            return Err(parse_err(4, "no Y lines"));
        }
        Ok(Self {
            version: VERSION,
            mode,
            n_env,
            m_env,
            blocks,
            k_env: (mode == Mode::Authenticated).then_some(tags),
        })
    }
}

fn push_joined<T: fmt::Display>(out: &mut String, items: impl Iterator<Item = T>) {
    for (i, x) in items.enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x}");
    }
}

fn field<'a>(ln: usize, line: &'a str, name: &str) -> Result<&'a str, WireError> {
    line.strip_prefix(name)
        .and_then(|r| r.strip_prefix(": "))
        .ok_or_else(|| parse_err(ln, format!("expected `{name}: ...`")))
}

fn decimal(ln: usize, s: &str) -> Result<BigUint, WireError> {
    let ok =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !ok {
        return Err(parse_err(ln, format!("bad decimal integer {s:?}")));
    }
    Ok(s.parse().expect("digits checked"))
}

/// Serializes bundles sharing one header.
pub fn write_bundle(bundles: &[CipherBundle]) -> Result<Vec<u8>, WireError> {
    Ok(BundleFile::from_bundles(bundles)?.encode().into_bytes())
}

pub fn read_bundle(data: &[u8]) -> Result<Vec<CipherBundle>, WireError> {
    let text = std::str::from_utf8(data).map_err(|e| parse_err(0, format!("not UTF-8: {e}")))?;
    Ok(BundleFile::parse(text)?.into_bundles())
}
