use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::train::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Writes word2vec text format: a `<count> <dim>` header, then one
/// `name v1 ... vd` row per vector. Values use the shortest representation
/// that parses back to the same `f32`.
pub fn save_embeddings(x: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "{} {}", x.len(), x.dim()).map_err(io)?;
    for (i, name) in x.names().iter().enumerate() {
        write!(w, "{name}").map_err(io)?;
        for v in x.row(i) {
            write!(w, " {v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let header = match lines.next() {
        Some(l) => l.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::parse(path, 1, "missing `<count> <dim>` header")),
    };
    let parts: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match parts.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(path, 1, format!("bad header `{header}`"))),
        },
        _ => return Err(Error::parse(path, 1, format!("bad header `{header}`"))),
    };

    let mut names = Vec::with_capacity(count);
    let mut data = Vec::with_capacity(count * dim);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        if names.len() == count {
            return Err(Error::parse(path, line_no, format!("header declares {count} rows but more follow")));
        }
        let mut fields = line.split_whitespace();
        let name = fields.next().expect("nonblank line");
        let before = data.len();
        for f in fields {
            let v: f32 = f
                .parse()
                .map_err(|_| Error::parse(path, line_no, format!("bad value `{f}`")))?;
            data.push(v);
        }
        if data.len() - before != dim {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {dim} values, found {}", data.len() - before),
            ));
        }
        names.push(name.to_string());
    }
    if names.len() != count {
        return Err(Error::parse(
            path,
            0,
            format!("header declares {count} rows but only {} present ({} missing)", names.len(), count - names.len()),
        ));
    }
    EmbeddingMatrix::from_rows(names, dim, data)
}
