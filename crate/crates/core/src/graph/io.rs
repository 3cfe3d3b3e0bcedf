use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use log::info;

use super::{Csr, Graph, VertexId};
use crate::error::{Error, Result};

pub const CSR_MAGIC: &[u8; 8] = b"AGISCSR1";

const MAX_VERTEX_ID: u64 = 1 << 48;

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped; columns after
/// the first two are ignored. Self-loops and duplicate edges are dropped. Ids
/// that already form `0..n` are kept, anything else is remapped to dense ids
/// in first-seen order and the mapping is retained on the graph.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let a = parse_id(tokens.next(), line_no)?;
        let b = parse_id(tokens.next(), line_no)?;
        if a == b {
            self_loops += 1;
            continue;
        }
        raw.push((a, b));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut first_seen: HashMap<u64, VertexId> = HashMap::new();
    let mut order: Vec<u64> = Vec::new();
    let mut max_id = 0u64;
    for &(a, b) in &raw {
        for id in [a, b] {
            max_id = max_id.max(id);
            first_seen.entry(id).or_insert_with(|| {
                order.push(id);
                (order.len() - 1) as VertexId
            });
        }
    }
    let n = order.len();
    if n > VertexId::MAX as usize {
        return Err(Error::Format {
            kind: "edge list",
            message: format!("{n} distinct vertices exceed the dense id range"),
        });
    }
    let already_dense = max_id + 1 == n as u64;
    let edges: Vec<(VertexId, VertexId)> = if already_dense {
        raw.iter().map(|&(a, b)| (a as VertexId, b as VertexId)).collect()
    } else {
        raw.iter().map(|&(a, b)| (first_seen[&a], first_seen[&b])).collect()
    };
    let mut g = Graph::from_edges(n, &edges);
    let duplicates = edges.len() - g.num_edges() as usize;
    if self_loops > 0 || duplicates > 0 {
        info!("dropped {self_loops} self-loops and {duplicates} duplicate edges");
    }
    if !already_dense {
        g.id_map = Some(order);
    }
    Ok(g)
}

fn parse_id(token: Option<&str>, line: usize) -> Result<u64> {
    let token = token.ok_or_else(|| Error::Parse {
        line,
        message: "expected two vertex ids".into(),
    })?;
    let id: u64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("malformed vertex id {token:?}"),
    })?;
    if id > MAX_VERTEX_ID {
        return Err(Error::VertexIdTooLarge(id));
    }
    Ok(id)
}

/// Writes each edge once as `a b` with `a < b`, using dense ids.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    for (a, b) in g.edges() {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

/// Binary CSR cache: magic, then little-endian u64 `n`, `m`,
/// `offsets[n + 1]`, `neighbors[2m]`.
pub fn write_csr_cache<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    let csr = g.csr();
    w.write_all(CSR_MAGIC)?;
    w.write_all(&(g.num_vertices() as u64).to_le_bytes())?;
    w.write_all(&g.num_edges().to_le_bytes())?;
    for &o in &csr.offsets {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &t in &csr.targets {
        w.write_all(&(t as u64).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_csr_cache<R: Read>(mut r: R) -> Result<Graph> {
    let bad = |message: String| Error::Format {
        kind: "CSR cache",
        message,
    };
    let mut magic = [0u8; 8];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != CSR_MAGIC {
        return Err(bad("bad magic".into()));
    }
    let n = read_u64(&mut r, "vertex count")? as usize;
    let m = read_u64(&mut r, "edge count")?;
    if n > VertexId::MAX as usize {
        return Err(bad(format!("vertex count {n} out of range")));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(read_u64(&mut r, "offsets")? as usize);
    }
    if offsets[0] != 0 || offsets[n] as u64 != 2 * m || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(bad("offsets are inconsistent with the edge count".into()));
    }
    let mut targets = Vec::with_capacity(2 * m as usize);
    for _ in 0..2 * m {
        let t = read_u64(&mut r, "neighbors")?;
        if t >= n as u64 {
            return Err(bad(format!("neighbor id {t} out of range")));
        }
        targets.push(t as VertexId);
    }
    let csr = Csr { offsets, targets };
    for v in 0..n {
        let s = csr.slice(v as VertexId);
        if s.windows(2).any(|w| w[0] >= w[1]) || s.contains(&(v as VertexId)) {
            return Err(bad(format!("neighbor list of {v} is not strictly ascending")));
        }
    }
    Ok(Graph::from_csr(csr, None))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format {
            kind: "CSR cache",
            message: format!("truncated while reading {what}"),
        },
        _ => Error::Io(e),
    })
}

fn read_u64<R: Read>(r: &mut R, what: &str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, what)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Adjacency;

    fn load(s: &str) -> Result<Graph> {
        load_edge_list(s.as_bytes())
    }

    #[test]
    fn triangle_with_duplicate() {
        let g = load("0 1\n1 2\n2 0\n1 2").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.degrees().collect::<Vec<_>>(), vec![2, 2, 2]);
        assert!(g.id_map().is_none());
    }

    #[test]
    fn self_loop_dropped() {
        let g = load("5 5\n0 1").unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn star_degrees() {
        let g = load("# star\n0 1\n0 2\n% comment\n\n0 3\n").unwrap();
        assert_eq!(g.degrees().collect::<Vec<_>>(), vec![3, 1, 1, 1]);
    }

    #[test]
    fn sparse_ids_are_remapped_in_first_seen_order() {
        let g = load("10 30\n30 20\n").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.id_map().unwrap(), &[10, 30, 20]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.original_id(2), 20);
    }

    #[test]
    fn errors() {
        match load("0 1\n1 x\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match load("0\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load("# nothing\n3 3\n"), Err(Error::EmptyGraph)));
        assert!(matches!(load("0 281474976710657\n"), Err(Error::VertexIdTooLarge(_))));
    }

    #[test]
    fn canonical_reload_is_identical() {
        let g = load("3 1\n1 0\n0 2\n2 3\n3 0\n2 3\n").unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let again = load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g.csr(), again.csr());
    }

    #[test]
    fn csr_cache_round_trip_and_truncation() {
        let g = load("0 1\n1 2\n2 0\n2 3\n").unwrap();
        let mut buf = Vec::new();
        write_csr_cache(&g, &mut buf).unwrap();
        assert_eq!(&buf[..8], CSR_MAGIC);
        assert_eq!(buf.len(), 8 + 16 + 8 * 5 + 8 * 8);
        let back = read_csr_cache(buf.as_slice()).unwrap();
        assert_eq!(back, g);
        let err = read_csr_cache(&buf[..buf.len() - 3]).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err}");
        let mut corrupt = buf.clone();
        corrupt[0] = b'X';
        assert!(read_csr_cache(corrupt.as_slice()).is_err());
    }
}
