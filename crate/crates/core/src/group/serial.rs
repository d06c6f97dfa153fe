//! Run-length encoded text format for [`ElementSet`]s.
//!
//! ```text
//! ELEMENTSET 1
//! group Z(101)
//! size 3
//! runs 1 2 40 1
//! ```
//!
//! `runs` lists alternating run lengths over the canonical indices, starting
//! with a run of non-members (possibly of length 0). Runs may wrap across
//! lines; a trailing run of non-members may be omitted.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::{ElementSet, GroupLiteral};

const MAGIC: &str = "ELEMENTSET 1";
const RUNS_PER_LINE: usize = 32;

pub fn write_element_set<W: Write>(
    mut w: W,
    literal: &GroupLiteral,
    set: &ElementSet,
) -> std::io::Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "group {literal}")?;
    writeln!(w, "size {}", set.len())?;
    let runs = encode_runs(set);
    if runs.is_empty() {
        writeln!(w, "runs")?;
    }
    for chunk in runs.chunks(RUNS_PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|r| r.to_string()).collect();
        writeln!(w, "runs {}", line.join(" "))?;
    }
    Ok(())
}

fn encode_runs(set: &ElementSet) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0usize;
    for i in 0..set.group().order() {
        let b = set.contains(i);
        if b == current {
            len += 1;
        } else {
            runs.push(len);
            current = b;
            len = 1;
        }
    }
    if current {
        runs.push(len);
    }
    runs
}

pub fn read_element_set<R: BufRead>(r: R) -> Result<(GroupLiteral, ElementSet)> {
    let mut lines = r.lines();
    let mut next = || -> Result<Option<String>> {
        lines
            .next()
            .transpose()
            .map_err(|e| Error::Parse(format!("read failure: {e}")))
    };
    let magic = next()?.ok_or_else(|| Error::Parse("empty element-set file".into()))?;
    if magic.trim() != MAGIC {
        return Err(Error::Parse(format!("bad header {magic:?}")));
    }
    let group_line = next()?.ok_or_else(|| Error::Parse("missing group line".into()))?;
    let lit = group_line
        .trim()
        .strip_prefix("group ")
        .ok_or_else(|| Error::Parse(format!("bad group line {group_line:?}")))?;
    let literal = GroupLiteral::parse(lit)?;
    let size_line = next()?.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let size: usize = size_line
        .trim()
        .strip_prefix("size ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad size line {size_line:?}")))?;

    let mut set = ElementSet::empty(&literal.spec)?;
    let order = literal.spec.order();
    let mut pos = 0usize;
    let mut member = false;
    while let Some(line) = next()? {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_prefix("runs")
            .ok_or_else(|| Error::Parse(format!("unexpected line {line:?}")))?;
        for tok in body.split_whitespace() {
            let len: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad run length {tok:?}")))?;
            if pos + len > order {
                return Err(Error::Parse("runs exceed group order".into()));
            }
            if member {
                for i in pos..pos + len {
                    set.insert(i)?;
                }
            }
            pos += len;
            member = !member;
        }
    }
    if set.len() != size {
        return Err(Error::Parse(format!(
            "header says {size} members, runs encode {}",
            set.len()
        )));
    }
    Ok((literal, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use proptest::prelude::*;

    #[test]
    fn format_is_stable() {
        let g = GroupSpec::cyclic(10).unwrap();
        let s = ElementSet::from_residues(&g, &[1, 2, 9]).unwrap();
        let mut out = Vec::new();
        write_element_set(&mut out, &g.clone().into(), &s).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "ELEMENTSET 1\ngroup Z(10)\nsize 3\nruns 1 2 6 1\n"
        );
    }

    #[test]
    fn rejects_inconsistent_size() {
        let text = "ELEMENTSET 1\ngroup Z(5)\nsize 2\nruns 0 1\n";
        assert!(read_element_set(text.as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(bits in prop::collection::vec(any::<bool>(), 2..300)) {
            let g = GroupSpec::cyclic(bits.len() as u64).unwrap();
            let s = ElementSet::from_predicate(&g, |i| bits[i]).unwrap();
            let mut out = Vec::new();
            write_element_set(&mut out, &g.clone().into(), &s).unwrap();
            let (lit, back) = read_element_set(out.as_slice()).unwrap();
            prop_assert_eq!(lit.spec, g);
            prop_assert_eq!(back, s);
        }
    }
}
