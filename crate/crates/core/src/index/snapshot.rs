//! On-disk index snapshot.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  "SEEDIDX\n"
//! version    u32
//! header     u64 length + JSON {params, tokenizer, areas, docs, terms}
//! docs       per doc:  u32 id length, id bytes, u32 area, u32 length
//! terms      per term: u32 text length, text bytes, u32 posting count,
//!                      then (u32 doc, u32 tf) per posting
//! ```
//!
//! Terms are written in lexicographic order and documents in build order,
//! so rebuilding from the same input yields the same bytes. Derived
//! statistics are recomputed on load with the same arithmetic as a fresh
//! build.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Bm25Params, Posting, SeedIndex};
use crate::corpus::AreaSet;
use crate::error::{Error, Result};
use crate::text::TokenizerConfig;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"SEEDIDX\n";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    params: Bm25Params,
    tokenizer: TokenizerConfig,
    areas: Vec<AreaEntry>,
    docs: u64,
    terms: u64,
}

#[derive(Serialize, Deserialize)]
struct AreaEntry {
    id: String,
    name: String,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

fn put_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    put_u32(w, u32::try_from(s.len()).map_err(|_| bad("string too long"))?)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| bad(format!("truncated: {e}")))?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| bad(format!("truncated: {e}")))?;
    Ok(u64::from_le_bytes(b))
}

fn get_str<R: Read>(r: &mut R) -> Result<String> {
    let len = get_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(|e| bad(format!("truncated: {e}")))?;
    String::from_utf8(buf).map_err(|_| bad("string is not UTF-8"))
}

impl SeedIndex {
    pub fn write_snapshot<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BufWriter::new(out);
        w.write_all(SNAPSHOT_MAGIC)?;
        put_u32(&mut w, SNAPSHOT_VERSION)?;
        let header = Header {
            params: self.params,
            tokenizer: self.tokenizer,
            areas: self.areas.iter().map(|a| AreaEntry { id: a.id.clone(), name: a.name.clone() }).collect(),
            docs: self.doc_ids.len() as u64,
            terms: self.term_text.len() as u64,
        };
        let header = serde_json::to_vec(&header)?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;

        for doc in 0..self.doc_ids.len() {
            put_str(&mut w, &self.doc_ids[doc])?;
            put_u32(&mut w, self.area_of[doc])?;
            put_u32(&mut w, self.doc_len[doc])?;
        }
        for (term, list) in self.term_text.iter().zip(&self.postings) {
            put_str(&mut w, term)?;
            put_u32(&mut w, list.len() as u32)?;
            for p in list {
                put_u32(&mut w, p.doc)?;
                put_u32(&mut w, p.tf)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(input: R) -> Result<Self> {
        let mut r = BufReader::new(input);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| bad("missing header"))?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(bad("not an index snapshot"));
        }
        let version = get_u32(&mut r)?;
        if version != SNAPSHOT_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let header_len = get_u64(&mut r)? as usize;
        let mut header = vec![0u8; header_len];
        r.read_exact(&mut header).map_err(|e| bad(format!("truncated header: {e}")))?;
        let header: Header = serde_json::from_slice(&header)?;
        header.params.validate()?;
        let areas = AreaSet::new(header.areas.into_iter().map(|a| (a.id, a.name)))?;

        let n_docs = usize::try_from(header.docs).map_err(|_| bad("document count overflow"))?;
        if n_docs == 0 {
            return Err(Error::EmptySeedSet);
        }
        let mut doc_ids = Vec::with_capacity(n_docs);
        let mut doc_pos = HashMap::with_capacity(n_docs);
        let mut doc_len = Vec::with_capacity(n_docs);
        let mut area_of = Vec::with_capacity(n_docs);
        for doc in 0..n_docs {
            let id = get_str(&mut r)?;
            let area = get_u32(&mut r)?;
            if area as usize >= areas.len() {
                return Err(bad(format!("document `{id}` has area {area} out of range")));
            }
            if doc_pos.insert(id.clone(), doc as u32).is_some() {
                return Err(bad(format!("duplicate document `{id}`")));
            }
            doc_ids.push(id);
            area_of.push(area);
            doc_len.push(get_u32(&mut r)?);
        }

        let n_terms = usize::try_from(header.terms).map_err(|_| bad("term count overflow"))?;
        let mut term_text: Vec<String> = Vec::with_capacity(n_terms);
        let mut postings = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            let term = get_str(&mut r)?;
            if term_text.last().is_some_and(|prev| prev >= &term) {
                return Err(bad("terms are not strictly sorted"));
            }
            let count = get_u32(&mut r)? as usize;
            if count == 0 || count > n_docs {
                return Err(bad(format!("term `{term}` has {count} postings")));
            }
            let mut list = Vec::with_capacity(count);
            for _ in 0..count {
                let doc = get_u32(&mut r)?;
                let tf = get_u32(&mut r)?;
                if doc as usize >= n_docs || tf == 0 || list.last().is_some_and(|p: &Posting| p.doc >= doc) {
                    return Err(bad(format!("bad posting for `{term}`")));
                }
                list.push(Posting { doc, tf });
            }
            term_text.push(term);
            postings.push(list);
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(bad("trailing bytes after last term"));
        }

        Ok(Self::assemble(
            header.params,
            header.tokenizer,
            areas,
            doc_ids,
            doc_pos,
            doc_len,
            area_of,
            term_text,
            postings,
        ))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        self.write_snapshot(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
        Self::read_snapshot(file)
    }
}
