use super::Pairing;
use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_pairings`].
pub const ENUMERATION_LIMIT: usize = 2;

/// Number of perfect matchings on `6n` points, `(6n - 1)!!`.
pub fn pairing_count(n: usize) -> u128 {
    (1..6 * n as u128).step_by(2).product()
}

/// Every fixed-point-free involution on `6n` half-edges, each exactly once,
/// in lexicographic order of the partner table.
pub fn enumerate_pairings(n: usize) -> Result<impl Iterator<Item = Pairing>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard(format!(
            "enumeration of {} pairings refused (n = {n} > {ENUMERATION_LIMIT})",
            pairing_count(n)
        )));
    }
    let mut out = Vec::with_capacity(pairing_count(n) as usize);
    let mut partner = vec![u32::MAX; 6 * n];
    extend(&mut partner, &mut out, n);
    Ok(out.into_iter())
}

fn extend(partner: &mut [u32], out: &mut Vec<Pairing>, n: usize) {
    let Some(first) = partner.iter().position(|&p| p == u32::MAX) else {
        out.push(Pairing::from_raw_unchecked(n, partner.to_vec()));
        return;
    };
    for other in first + 1..partner.len() {
        if partner[other] != u32::MAX {
            continue;
        }
        partner[first] = other as u32;
        partner[other] = first as u32;
        extend(partner, out, n);
        partner[first] = u32::MAX;
        partner[other] = u32::MAX;
    }
}
