//! Index file layout, all integers little-endian:
//!
//! ```text
//! header (56 bytes)
//!   magic     [u8; 8]  "OREACHIX"
//!   version   u32
//!   t         u32
//!   n         u64
//!   k         u32
//!   p         u32
//!   h         u32
//!   reserved  u32      zero
//!   seed      u64
//!   checksum  u64      DiGraph::checksum of the indexed graph
//! then n records in vertex order
//!   wcc, fwd level, bwd level                 3 x u32
//!   per ordering: pos, high/low, max/min      3 x u32
//!   forward support mask                      ceil(k/8) bytes
//!   backward support mask                     ceil(k/8) bytes
//! ```

use std::io::Write;
use std::sync::Arc;

use super::{Params, ReachIndex, BWD, FWD, ORDERS};
use crate::error::{Error, Result};
use crate::graph::{DiGraph, Vertex};
use crate::supportive::SupportSet;

pub const MAGIC: [u8; 8] = *b"OREACHIX";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 56;

/// `12 + 12t + 2 * ceil(k / 8)`.
pub fn payload_bytes_per_vertex(t: usize, k: usize) -> usize {
    12 + 12 * t + 2 * k.div_ceil(8)
}

impl ReachIndex {
    pub fn serialized_len(&self) -> usize {
        HEADER_BYTES + self.n() * self.payload_bytes_per_vertex()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let p = &self.params;
        let u32_of = |x: usize, what: &str| {
            u32::try_from(x)
                .map_err(|_| Error::Format(format!("{what} = {x} does not fit in 32 bits")))
        };
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&u32_of(self.ordering_count(), "t")?.to_le_bytes())?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&u32_of(p.k, "k")?.to_le_bytes())?;
        w.write_all(&u32_of(p.p, "p")?.to_le_bytes())?;
        w.write_all(&u32_of(p.h, "h")?.to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        w.write_all(&p.seed.to_le_bytes())?;
        w.write_all(&self.graph.checksum().to_le_bytes())?;

        let mask_bytes = self.supports.mask_bytes();
        let mut rec = Vec::with_capacity(self.payload_bytes_per_vertex());
        for v in 0..self.n() as Vertex {
            rec.clear();
            for &x in self.record(v) {
                rec.extend_from_slice(&x.to_le_bytes());
            }
            for mask in [self.supports.fwd(v), self.supports.bwd(v)] {
                let bytes = mask.iter().flat_map(|w| w.to_le_bytes());
                rec.extend(bytes.take(mask_bytes));
            }
            w.write_all(&rec)?;
        }
        Ok(())
    }

    /// Reads an index written by [`ReachIndex::write_to`] for the graph `dag`.
    pub fn from_bytes(bytes: &[u8], dag: impl Into<Arc<DiGraph>>) -> Result<ReachIndex> {
        let graph: Arc<DiGraph> = dag.into();
        let mut r = Reader { bytes, at: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("not an index file (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported index version {version}"
            )));
        }
        let t = r.u32()? as usize;
        let n = r.u64()?;
        let k = r.u32()? as usize;
        let p = r.u32()? as usize;
        let h = r.u32()? as usize;
        let _reserved = r.u32()?;
        let seed = r.u64()?;
        let checksum = r.u64()?;
        if n != graph.n() as u64 || checksum != graph.checksum() {
            return Err(Error::Format(
                "index was built for a different graph (checksum mismatch)".into(),
            ));
        }
        let n = n as usize;
        let params = Params { t, k, p, h, seed };
        let per_vertex = payload_bytes_per_vertex(t, k);
        let body = n
            .checked_mul(per_vertex)
            .filter(|&b| b == bytes.len() - r.at)
            .ok_or_else(|| {
                Error::Format(format!(
                    "expected {n} records of {per_vertex} bytes, found {} bytes",
                    bytes.len() - r.at
                ))
            })?;
        debug_assert_eq!(body + HEADER_BYTES, bytes.len());

        let stride = ORDERS + 3 * t;
        let mask_bytes = k.div_ceil(8);
        let mut records = Vec::with_capacity(n * stride);
        let mut supports = SupportSet::empty(n, k);
        // slot -> the vertex carrying it in both masks, i.e. the support itself
        let mut owner: Vec<Option<Vertex>> = vec![None; k];
        for v in 0..n as Vertex {
            for _ in 0..stride {
                let x = r.u32()?;
                if x as usize >= n {
                    return Err(Error::Format(format!("record of vertex {v} out of range")));
                }
                records.push(x);
            }
            let fwd = r.take(mask_bytes)?;
            let bwd = r.take(mask_bytes)?;
            for slot in 0..k {
                let (f, b) = (bit(fwd, slot), bit(bwd, slot));
                if f {
                    supports.set_fwd_bit(v, slot);
                }
                if b {
                    supports.set_bwd_bit(v, slot);
                }
                if f && b && owner[slot].replace(v).is_some() {
                    return Err(Error::Format(format!("support slot {slot} has two owners")));
                }
            }
        }
        let used = owner.iter().take_while(|o| o.is_some()).count();
        if owner[used..].iter().any(Option::is_some) {
            return Err(Error::Format("support slots are not contiguous".into()));
        }
        supports.supports = owner[..used].iter().map(|o| o.unwrap()).collect();

        let (mut fwd_max, mut bwd_max) = (0, 0);
        for rec in records.chunks_exact(stride.max(1)) {
            fwd_max = fwd_max.max(rec[FWD]);
            bwd_max = bwd_max.max(rec[BWD]);
        }
        Ok(ReachIndex {
            graph,
            stride,
            records,
            flavors: (0..t).map(|i| params.flavor(i)).collect(),
            supports,
            fwd_max,
            bwd_max,
            params,
        })
    }
}

fn bit(bytes: &[u8], i: usize) -> bool {
    bytes[i / 8] >> (i % 8) & 1 == 1
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let out = self
            .bytes
            .get(self.at..self.at + len)
            .ok_or_else(|| Error::Format("index file is truncated".into()))?;
        self.at += len;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
