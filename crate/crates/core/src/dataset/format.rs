//! The SGF1 record file.
//!
//! ```text
//! header   "SGF1"  u32 version  u32 case_count  u32 m  u32 channels
//! record   u64 case_id  channels × m×m f32 (row-major)  u32 crc32
//! ```
//!
//! Everything is little-endian. The checksum covers the case id and the
//! channel data of its record. Dataset files carry four channels (geometry
//! code as float, load x, load y, von Mises); prediction files carry one.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Seek, SeekFrom, Write};
use std::path::Path;

use crate::encoding::{ChannelStack, EncodingError, CODE_FIXED_BOTH};

use super::error::{DatasetError, Result};

pub const MAGIC: [u8; 4] = *b"SGF1";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 20;
pub const DATASET_CHANNELS: u32 = 4;
pub const PREDICTION_CHANNELS: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub version: u32,
    pub case_count: u32,
    pub m: u32,
    pub channels: u32,
}

impl Header {
    pub fn record_len(&self) -> u64 {
        8 + 4 * self.channels as u64 * (self.m as u64).pow(2) + 4
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub case_id: u64,
    /// `channels × m × m` values, channel-major.
    pub data: Vec<f32>,
}

impl Record {
    /// Four-channel record of a solved case.
    pub fn from_stack(case_id: u64, stack: &ChannelStack) -> Result<Self> {
        stack.validate()?;
        let target = stack.von_mises.as_ref().ok_or_else(|| {
            EncodingError::Invalid("a dataset record needs the von Mises target".into())
        })?;
        let mut data = Vec::with_capacity(4 * stack.m * stack.m);
        data.extend(stack.geom_bc.iter().map(|&c| c as f32));
        data.extend_from_slice(&stack.load_x);
        data.extend_from_slice(&stack.load_y);
        data.extend_from_slice(target);
        Ok(Self { case_id, data })
    }

    pub fn channel(&self, m: usize, k: usize) -> &[f32] {
        &self.data[k * m * m..(k + 1) * m * m]
    }

    /// Rebuilds the channel stack of a four-channel record.
    pub fn to_stack(&self, m: usize) -> Result<ChannelStack> {
        let n = m * m;
        if self.data.len() != 4 * n {
            return Err(EncodingError::Shape {
                expected: 4 * n,
                found: self.data.len(),
            }
            .into());
        }
        let mut geom_bc = Vec::with_capacity(n);
        for (i, &v) in self.channel(m, 0).iter().enumerate() {
            if v.fract() != 0.0 || !(0.0..=CODE_FIXED_BOTH as f32).contains(&v) {
                return Err(EncodingError::Invalid(format!(
                    "record {}: geometry code {v} at pixel {i}",
                    self.case_id
                ))
                .into());
            }
            geom_bc.push(v as u8);
        }
        let stack = ChannelStack {
            m,
            geom_bc,
            load_x: self.channel(m, 1).to_vec(),
            load_y: self.channel(m, 2).to_vec(),
            von_mises: Some(self.channel(m, 3).to_vec()),
        };
        stack.validate()?;
        Ok(stack)
    }
}

fn checksum(id_bytes: &[u8], data_bytes: &[u8]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(id_bytes);
    h.update(data_bytes);
    h.finalize()
}

/// Streams records to a file and patches the case count on
/// [`finish`](Self::finish).
pub struct DatasetWriter<W: Write + Seek> {
    inner: BufWriter<W>,
    header: Header,
    scratch: Vec<u8>,
}

impl DatasetWriter<File> {
    /// Creates a new file; an existing file is never overwritten.
    pub fn create(path: &Path, m: usize, channels: u32) -> Result<Self> {
        let file = File::options().write(true).create_new(true).open(path)?;
        Self::new(file, m, channels)
    }
}

impl<W: Write + Seek> DatasetWriter<W> {
    pub fn new(inner: W, m: usize, channels: u32) -> Result<Self> {
        if m == 0 || channels == 0 {
            return Err(DatasetError::Config("record shape must be non-empty".into()));
        }
        let header = Header {
            version: FORMAT_VERSION,
            case_count: 0,
            m: u32::try_from(m).map_err(|_| DatasetError::Config(format!("m = {m} too large")))?,
            channels,
        };
        let mut inner = BufWriter::new(inner);
        inner.write_all(&MAGIC)?;
        for v in [header.version, 0, header.m, header.channels] {
            inner.write_all(&v.to_le_bytes())?;
        }
        Ok(Self {
            inner,
            header,
            scratch: Vec::new(),
        })
    }

    pub fn written(&self) -> u32 {
        self.header.case_count
    }

    pub fn write(&mut self, record: &Record) -> Result<()> {
        let expected = self.header.channels as usize * (self.header.m as usize).pow(2);
        if record.data.len() != expected {
            return Err(DatasetError::Format {
                offset: HEADER_LEN + self.header.case_count as u64 * self.header.record_len(),
                record: Some(self.header.case_count as u64),
                reason: format!("record has {} values, expected {expected}", record.data.len()),
            });
        }
        self.scratch.clear();
        self.scratch.extend(record.data.iter().flat_map(|v| v.to_le_bytes()));
        let id = record.case_id.to_le_bytes();
        self.inner.write_all(&id)?;
        self.inner.write_all(&self.scratch)?;
        self.inner.write_all(&checksum(&id, &self.scratch).to_le_bytes())?;
        self.header.case_count = self
            .header
            .case_count
            .checked_add(1)
            .ok_or_else(|| DatasetError::Config("more than u32::MAX records".into()))?;
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        let mut inner = self.inner.into_inner().map_err(|e| e.into_error())?;
        inner.seek(SeekFrom::Start(8))?;
        inner.write_all(&self.header.case_count.to_le_bytes())?;
        inner.seek(SeekFrom::End(0))?;
        inner.flush()?;
        Ok(inner)
    }
}

/// Iterates over the records of an SGF1 stream, validating each checksum and
/// rejecting truncation and trailing bytes.
pub struct DatasetReader<R: Read> {
    inner: R,
    header: Header,
    next: u64,
    done: bool,
    buf: Vec<u8>,
}

impl DatasetReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        Self::new(BufReader::new(File::open(path)?))
    }
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

impl<R: Read> DatasetReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut raw = [0u8; HEADER_LEN as usize];
        let got = read_full(&mut inner, &mut raw)?;
        let fail = |offset: u64, reason: &str| DatasetError::Format {
            offset,
            record: None,
            reason: reason.to_string(),
        };
        if got < 4 || raw[..4] != MAGIC {
            return Err(fail(0, "bad magic, not an SGF1 file"));
        }
        if got < HEADER_LEN as usize {
            return Err(fail(got as u64, "truncated header"));
        }
        let word = |i: usize| u32::from_le_bytes(raw[4 + 4 * i..8 + 4 * i].try_into().unwrap());
        let header = Header {
            version: word(0),
            case_count: word(1),
            m: word(2),
            channels: word(3),
        };
        if header.version != FORMAT_VERSION {
            return Err(DatasetError::UnsupportedVersion {
                found: header.version,
                supported: FORMAT_VERSION,
            });
        }
        if header.m == 0 || header.channels == 0 {
            return Err(fail(12, "zero record shape"));
        }
        Ok(Self {
            inner,
            header,
            next: 0,
            done: false,
            buf: vec![0; header.record_len() as usize],
        })
    }

    pub fn header(&self) -> Header {
        self.header
    }

    fn read_record(&mut self) -> Result<Option<Record>> {
        let index = self.next;
        let offset = HEADER_LEN + index * self.header.record_len();
        if index == self.header.case_count as u64 {
            let mut probe = [0u8; 1];
            if read_full(&mut self.inner, &mut probe)? != 0 {
                return Err(DatasetError::Format {
                    offset,
                    record: None,
                    reason: "trailing bytes after the last record".into(),
                });
            }
            return Ok(None);
        }
        let got = read_full(&mut self.inner, &mut self.buf)?;
        if got < self.buf.len() {
            return Err(DatasetError::Format {
                offset: offset + got as u64,
                record: Some(index),
                reason: format!(
                    "truncated record {index}: {got} of {} bytes",
                    self.buf.len()
                ),
            });
        }
        let len = self.buf.len();
        let (id_bytes, rest) = self.buf.split_at(8);
        let (data_bytes, crc_bytes) = rest.split_at(len - 12);
        let stored = u32::from_le_bytes(crc_bytes.try_into().unwrap());
        if checksum(id_bytes, data_bytes) != stored {
            return Err(DatasetError::Format {
                offset,
                record: Some(index),
                reason: format!("checksum mismatch in record {index}"),
            });
        }
        let case_id = u64::from_le_bytes(id_bytes.try_into().unwrap());
        let data = data_bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        self.next += 1;
        Ok(Some(Record { case_id, data }))
    }
}

impl<R: Read> Iterator for DatasetReader<R> {
    type Item = Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_record() {
            Ok(Some(r)) => Some(Ok(r)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Reads a whole record file into memory.
pub fn read_records(path: &Path) -> Result<(Header, Vec<Record>)> {
    let reader = DatasetReader::open(path)?;
    let header = reader.header();
    let records = reader.collect::<Result<Vec<_>>>()?;
    Ok((header, records))
}
