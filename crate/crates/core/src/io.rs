//! Plain-text file formats.
//!
//! Every format is a header line `#<tag> key=value ...` followed by one
//! record per line, UTF-8 with LF endings. Writers are deterministic: equal
//! objects serialize to identical bytes. Readers accept a trailing newline
//! and reject anything else that does not fit the format.

use std::fmt::Write as _;
use std::path::Path;

use crate::bbd::Bbd;
use crate::error::{Error, Result};
use crate::latin::{LatinSquare, OneFactorization};
use crate::mds::MdsCode;
use crate::model::{Design, Hole, Kind};

/// Object type named by a file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Design,
    Latin,
    OneFact,
    Mds,
    Bbd,
    Holes,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Tag of the header line.
pub fn detect(text: &str) -> Result<FileKind> {
    let first = text.lines().next().ok_or_else(|| perr(1, "empty file"))?;
    let tag = first.split_whitespace().next().unwrap_or("");
    Ok(match tag {
        "#design" => FileKind::Design,
        "#latin" => FileKind::Latin,
        "#onefact" => FileKind::OneFact,
        "#mds" => FileKind::Mds,
        "#bbd" => FileKind::Bbd,
        "#holes" => FileKind::Holes,
        other => return Err(perr(1, format!("unknown header `{other}`"))),
    })
}

struct Header<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Header<'a> {
    fn get(&self, key: &str) -> Result<&'a str> {
        self.pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| perr(1, format!("header lacks `{key}=`")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key)?;
        v.parse().map_err(|_| perr(1, format!("`{key}={v}` is not a number")))
    }
}

/// Splits off and checks the header, returning it and the numbered body lines.
fn split<'a>(text: &'a str, tag: &str) -> Result<(Header<'a>, Vec<(usize, &'a str)>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let mut toks = first.split_whitespace();
    if toks.next() != Some(tag) {
        return Err(perr(1, format!("expected header `{tag}`")));
    }
    let pairs = toks
        .map(|t| t.split_once('=').ok_or_else(|| perr(1, format!("bad header field `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((Header { pairs }, lines.collect()))
}

fn parse_nums(line: usize, s: &str) -> Result<Vec<u32>> {
    s.split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(line, format!("`{t}` is not a point"))))
        .collect()
}

fn join(xs: &[u32]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}

/// `#design kind=<kind> v=<v>`, then one ascending block per line in
/// lexicographic (numeric) block order.
pub fn write_design(d: &Design) -> String {
    let mut s = format!("#design kind={} v={}\n", d.kind(), d.v());
    for b in d.blocks() {
        s.push_str(&join(b));
        s.push('\n');
    }
    s
}

/// Parses and structurally validates a design; coverage is not checked.
pub fn read_design(text: &str) -> Result<Design> {
    let (h, body) = split(text, "#design")?;
    let kind: Kind = h.get("kind")?.parse().map_err(|e: Error| perr(1, e.to_string()))?;
    let v = h.num("v")?;
    let blocks = body
        .iter()
        .map(|&(n, l)| parse_nums(n, l))
        .collect::<Result<Vec<_>>>()?;
    for (&(n, _), b) in body.iter().zip(&blocks) {
        crate::model::check_block(kind, v, b).map_err(|e| perr(n, e.to_string()))?;
    }
    Design::new(kind, v, blocks)
}

/// `#latin q=<q>`, then the rows.
pub fn write_latin(l: &LatinSquare) -> String {
    let mut s = format!("#latin q={}\n", l.order());
    for row in l.rows() {
        s.push_str(&join(row));
        s.push('\n');
    }
    s
}

pub fn read_latin(text: &str) -> Result<LatinSquare> {
    let (h, body) = split(text, "#latin")?;
    let q: u32 = h.num("q")?;
    if body.len() != q as usize {
        return Err(perr(body.len() + 1, format!("expected {q} rows, found {}", body.len())));
    }
    let mut table = Vec::with_capacity((q * q) as usize);
    for &(n, l) in &body {
        let row = parse_nums(n, l)?;
        if row.len() != q as usize {
            return Err(perr(n, format!("row has {} entries, expected {q}", row.len())));
        }
        table.extend(row);
    }
    LatinSquare::new(q, table)
}

/// `#onefact m=<m>`, then one factor per line as pairs `a-b`.
pub fn write_onefact(f: &OneFactorization) -> String {
    let mut s = format!("#onefact m={}\n", f.order());
    for factor in f.factors() {
        let pairs: Vec<String> = factor.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        s.push_str(&pairs.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_onefact(text: &str) -> Result<OneFactorization> {
    let (h, body) = split(text, "#onefact")?;
    let m = h.num("m")?;
    let factors = body
        .iter()
        .map(|&(n, l)| {
            l.split_whitespace()
                .map(|t| {
                    let (a, b) = t.split_once('-').ok_or_else(|| perr(n, format!("bad pair `{t}`")))?;
                    let p = |x: &str| x.parse::<u32>().map_err(|_| perr(n, format!("bad pair `{t}`")));
                    Ok((p(a)?, p(b)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OneFactorization::new(m, factors)
}

/// `#mds d=<d> q=<q> dist=<dist>`, then one word per line.
pub fn write_mds(c: &MdsCode) -> String {
    let mut s = format!("#mds d={} q={} dist={}\n", c.d(), c.q(), c.dist());
    for w in c.words() {
        s.push_str(&join(w));
        s.push('\n');
    }
    s
}

/// Parses a code without checking the MDS property.
pub fn read_mds(text: &str) -> Result<MdsCode> {
    let (h, body) = split(text, "#mds")?;
    let (d, q, dist) = (h.num("d")?, h.num("q")?, h.num("dist")?);
    let words = body
        .iter()
        .map(|&(n, l)| parse_nums(n, l))
        .collect::<Result<Vec<_>>>()?;
    MdsCode::new(d, q, dist, words)
}

/// `#bbd m=<m>`, then blocks on `0..2m` (second group offset by `m`).
pub fn write_bbd(b: &Bbd) -> String {
    let mut s = format!("#bbd m={}\n", b.m());
    for blk in b.blocks() {
        s.push_str(&join(blk));
        s.push('\n');
    }
    s
}

/// Parses a bipartite design without verifying it.
pub fn read_bbd(text: &str) -> Result<Bbd> {
    let (h, body) = split(text, "#bbd")?;
    let m: u32 = h.num("m")?;
    let blocks = body
        .iter()
        .map(|&(n, l)| {
            let b = parse_nums(n, l)?;
            let b: [u32; 4] =
                b.try_into().map_err(|b: Vec<u32>| perr(n, format!("{} points, expected 4", b.len())))?;
            if b.iter().any(|&p| p >= 2 * m) {
                return Err(perr(n, format!("point outside 0..{}", 2 * m)));
            }
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Bbd::new_unchecked(m, blocks))
}

/// `#holes count=<h>`, then one hole per line: kind followed by its points.
pub fn write_holes(holes: &[Hole]) -> String {
    let mut s = format!("#holes count={}\n", holes.len());
    for h in holes {
        let _ = writeln!(s, "{} {}", h.required_kind, join(&h.points));
    }
    s
}

pub fn read_holes(text: &str) -> Result<Vec<Hole>> {
    let (h, body) = split(text, "#holes")?;
    let count: usize = h.num("count")?;
    if body.len() != count {
        return Err(perr(body.len() + 1, format!("expected {count} holes, found {}", body.len())));
    }
    body.iter()
        .map(|&(n, l)| {
            let (kind, rest) = l.split_once(' ').ok_or_else(|| perr(n, "missing points"))?;
            let kind: Kind = kind.parse().map_err(|e: Error| perr(n, e.to_string()))?;
            Hole::new(parse_nums(n, rest)?, kind)
        })
        .collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_design(path: &Path) -> Result<Design> {
    read_design(&read_to_string(path)?)
}

pub fn save_design(path: &Path, d: &Design) -> Result<()> {
    write_string(path, &write_design(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::{round_robin_one_factorization, symmetric_nilpotent_ls};
    use crate::mds::rs_mds_code;

    #[test]
    fn design_text_is_exact() {
        let d = Design::new(Kind::Sqs, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(write_design(&d), "#design kind=sqs v=4\n0 1 2 3\n");
        assert_eq!(read_design(&write_design(&d)).unwrap(), d);
    }

    #[test]
    fn numeric_block_order() {
        let d = Design::new(Kind::Partial, 12, vec![vec![2, 3, 4, 5], vec![8, 9, 10, 11]]).unwrap();
        assert_eq!(write_design(&d), "#design kind=partial v=12\n2 3 4 5\n8 9 10 11\n");
    }

    #[test]
    fn round_trips() {
        let l = symmetric_nilpotent_ls(6).unwrap();
        assert_eq!(read_latin(&write_latin(&l)).unwrap(), l);
        let f = round_robin_one_factorization(6).unwrap();
        assert_eq!(read_onefact(&write_onefact(&f)).unwrap(), f);
        let c = rs_mds_code(5, 4, 3).unwrap();
        assert_eq!(read_mds(&write_mds(&c)).unwrap(), c);
        let holes = vec![Hole::new(vec![0, 1, 2, 3, 9], Kind::Sqs).unwrap()];
        assert_eq!(read_holes(&write_holes(&holes)).unwrap(), holes);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(read_design(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_design("#design kind=sqs\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            read_design("#design kind=sqs v=8\n0 1 2 3\n0 1 x 3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            read_design("#design kind=sqs v=8\n0 1 2 9\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(read_latin("#latin q=2\n0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(detect("#bbd m=2\n").unwrap(), FileKind::Bbd);
        assert!(detect("hello").is_err());
    }
}
