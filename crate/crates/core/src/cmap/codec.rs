//! Text map format:
//!
//! ```text
//! belyi-map v1
//! n=<int>
//! <6n whitespace-separated partner indices>
//! ```

use std::fs;
use std::path::Path;

use super::Pairing;
use crate::error::{Error, Result};

pub const MAP_HEADER: &str = "belyi-map v1";

pub fn encode_map(p: &Pairing) -> Vec<u8> {
    let mut out = String::with_capacity(16 + 7 * p.half_edge_count());
    out.push_str(MAP_HEADER);
    out.push('\n');
    out.push_str(&format!("n={}\n", p.n()));
    let body: Vec<String> = p.as_slice().iter().map(u32::to_string).collect();
    out.push_str(&body.join(" "));
    out.push('\n');
    out.into_bytes()
}

/// Strict parse. Positions in errors are 1-based line numbers for header
/// problems and 0-based half-edge indices for body problems.
pub fn decode_map(bytes: &[u8]) -> Result<Pairing> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::format(e.valid_up_to(), "not UTF-8"))?;
    let mut lines = text.lines();

    let header = lines.next().ok_or_else(|| Error::format(1, "empty input"))?;
    if header.trim_end() != MAP_HEADER {
        return Err(Error::format(1, format!("expected header `{MAP_HEADER}`")));
    }
    let nline = lines
        .next()
        .ok_or_else(|| Error::format(2, "missing `n=` line"))?
        .trim_end();
    let n: usize = nline
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(2, format!("malformed size line `{nline}`")))?;
    if n == 0 {
        return Err(Error::format(2, "n must be at least 1"));
    }
    let body = lines.next().unwrap_or("");
    if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
        return Err(Error::format(4, format!("unexpected trailing content `{extra}`")));
    }

    let mut partner = Vec::with_capacity(6 * n);
    for (i, tok) in body.split_whitespace().enumerate() {
        let v: u32 = tok
            .parse()
            .map_err(|_| Error::format(i, format!("`{tok}` is not a half-edge index")))?;
        partner.push(v);
    }
    if partner.len() % 6 != 0 {
        return Err(Error::format(
            partner.len(),
            format!("{} entries is not a multiple of 6", partner.len()),
        ));
    }
    if partner.len() != 6 * n {
        return Err(Error::format(
            partner.len(),
            format!("expected {} entries for n={n}, found {}", 6 * n, partner.len()),
        ));
    }
    let m = partner.len();
    for (h, &p) in partner.iter().enumerate() {
        if p as usize >= m {
            return Err(Error::format(h, format!("partner {p} out of range")));
        }
        if p as usize == h {
            return Err(Error::format(h, "fixed point"));
        }
        if partner[p as usize] as usize != h {
            return Err(Error::format(h, format!("not an involution: {h} -> {p} -> {}", partner[p as usize])));
        }
    }
    Ok(Pairing::from_raw_unchecked(n, partner))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_map_file(path: &Path, p: &Pairing) -> Result<()> {
    crate::io::write_atomic(path, &encode_map(p))
}

pub fn read_map_file(path: &Path) -> Result<Pairing> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_map(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::sample_pairing;
    use proptest::prelude::*;

    #[test]
    fn torus_bytes() {
        let p = Pairing::from_pairs(1, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(encode_map(&p), b"belyi-map v1\nn=1\n3 4 5 0 1 2\n");
    }

    #[test]
    fn trailing_whitespace_tolerated() {
        let p = decode_map(b"belyi-map v1  \nn=1 \n3 4 5 0 1 2   \n\n").unwrap();
        assert_eq!(p.as_slice(), &[3, 4, 5, 0, 1, 2]);
    }

    #[test]
    fn fixed_point_reported_with_position() {
        let err = decode_map(b"belyi-map v1\nn=1\n0 4 5 3 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Format { position: 0, .. }), "{err}");
    }

    #[test]
    fn seven_entries_is_a_length_error() {
        let err = decode_map(b"belyi-map v1\nn=1\n3 4 5 0 1 2 6\n").unwrap_err();
        match err {
            Error::Format { position, message } => {
                assert_eq!(position, 7);
                assert!(message.contains("multiple of 6"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn bad_header() {
        assert!(decode_map(b"belyi-map v2\nn=1\n3 4 5 0 1 2\n").is_err());
        assert!(decode_map(b"belyi-map v1\nm=1\n3 4 5 0 1 2\n").is_err());
        assert!(decode_map(b"").is_err());
    }

    #[test]
    fn non_involution() {
        let err = decode_map(b"belyi-map v1\nn=1\n1 2 0 4 5 3\n").unwrap_err();
        assert!(matches!(err, Error::Format { position: 0, .. }));
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..40, seed in any::<u64>()) {
            let p = sample_pairing(n, seed).unwrap();
            let bytes = encode_map(&p);
            prop_assert_eq!(decode_map(&bytes).unwrap(), p.clone());
            prop_assert_eq!(encode_map(&decode_map(&bytes).unwrap()), bytes);
        }
    }
}
