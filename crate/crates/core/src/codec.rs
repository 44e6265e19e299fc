//! Byte messages to plaintext columns and back.
//!
//! One byte becomes one column entry. Messages are split into blocks of `m`
//! bytes after appending `0x01` and then `0x00`s up to the next multiple of
//! `m`, so a message whose length is already a multiple of `m` gains a
//! whole pad block.

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("message is empty")]
    EmptyMessage,
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("no blocks to decode")]
    NoBlocks,
    #[error("block {index} has length {got}, expected {expected}")]
    BlockLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("last block has no 0x01 pad marker")]
    BadPadding,
    #[error("garbage string must have at least one byte")]
    EmptyGarbage,
    #[error("column has length {got}, expected {expected}")]
    ColumnLength { expected: usize, got: usize },
}

/// One `m`-byte plaintext block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlainBlock(Vec<u8>);

impl PlainBlock {
    pub fn new(values: Vec<u8>) -> Result<Self, CodecError> {
        if values.is_empty() {
            return Err(CodecError::ZeroBlockSize);
        }
        Ok(Self(values))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The random `n - m` byte suffix appended to each block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GarbageString(Vec<u8>);

impl GarbageString {
    pub fn new(values: Vec<u8>) -> Result<Self, CodecError> {
        if values.is_empty() {
            return Err(CodecError::EmptyGarbage);
        }
        Ok(Self(values))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A plaintext block followed by its garbage, length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PaddedColumn(Vec<u8>);

impl PaddedColumn {
    pub fn from_bytes(values: Vec<u8>) -> Self {
        Self(values)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn encode_blocks(message: &[u8], m: usize) -> Result<Vec<PlainBlock>, CodecError> {
    if m == 0 {
        return Err(CodecError::ZeroBlockSize);
    }
    if message.is_empty() {
        return Err(CodecError::EmptyMessage);
    }
    let mut padded = Vec::with_capacity((message.len() / m + 1) * m);
    padded.extend_from_slice(message);
    padded.push(0x01);
    padded.resize(padded.len().div_ceil(m) * m, 0x00);
    Ok(padded
        .chunks_exact(m)
        .map(|c| PlainBlock(c.to_vec()))
        .collect())
}

/// Inverse of [`encode_blocks`]. All blocks must share one length and the
/// pad marker must sit in the last block.
pub fn decode_blocks(blocks: &[PlainBlock]) -> Result<Vec<u8>, CodecError> {
    let last = blocks.last().ok_or(CodecError::NoBlocks)?;
    let m = blocks[0].len();
    for (index, b) in blocks.iter().enumerate() {
        if b.len() != m {
            return Err(CodecError::BlockLength {
                index,
                expected: m,
                got: b.len(),
            });
        }
    }
    let marker = last
        .0
        .iter()
        .rposition(|&b| b != 0)
        .filter(|&i| last.0[i] == 0x01)
        .ok_or(CodecError::BadPadding)?;
    let mut out: Vec<u8> = blocks[..blocks.len() - 1]
        .iter()
        .flat_map(|b| b.0.iter().copied())
        .collect();
    out.extend_from_slice(&last.0[..marker]);
    if out.is_empty() {
        return Err(CodecError::EmptyMessage);
    }
    Ok(out)
}

pub fn make_garbage(length: usize, rng: &mut impl RngCore) -> Result<GarbageString, CodecError> {
    if length == 0 {
        return Err(CodecError::EmptyGarbage);
    }
    let mut values = vec![0u8; length];
    rng.fill_bytes(&mut values);
    Ok(GarbageString(values))
}

/// `block ∥ garbage`. `n` is the expected column length.
pub fn pad_column(
    block: &PlainBlock,
    garbage: &GarbageString,
    n: usize,
) -> Result<PaddedColumn, CodecError> {
    let got = block.len() + garbage.len();
    if got != n {
        return Err(CodecError::ColumnLength { expected: n, got });
    }
    let mut v = block.0.clone();
    v.extend_from_slice(&garbage.0);
    Ok(PaddedColumn(v))
}

/// Splits a column back into its first `m` bytes and the garbage suffix.
pub fn strip_column(
    column: &PaddedColumn,
    m: usize,
) -> Result<(PlainBlock, GarbageString), CodecError> {
    if m == 0 {
        return Err(CodecError::ZeroBlockSize);
    }
    if column.len() <= m {
        return Err(CodecError::ColumnLength {
            expected: m + 1,
            got: column.len(),
        });
    }
    let (p, g) = column.0.split_at(m);
    Ok((PlainBlock(p.to_vec()), GarbageString(g.to_vec())))
}
