//! Systematic-free `[n, k]` MDS code from a Cauchy matrix.
//!
//! The generator is `G[i][j] = 1 / (x_i + y_j)` with `x_i = i` (`i < k`) and
//! `y_j = k + j` (`j < n`), all distinct, so every square submatrix is a
//! Cauchy matrix and hence invertible. Receivers that already know `n - u`
//! of the encoded signals (`u <= k`) strip those from the first `u` symbols
//! and invert the remaining `u x u` Cauchy block in closed form.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::UserClass;
use crate::gf::{field_for, FieldSpec};
use crate::mn::payload_hash;

/// `k x n` Cauchy generator over `field`.
pub fn cauchy_generator(n: usize, k: usize, field: &FieldSpec) -> Result<Vec<Vec<u16>>> {
    if k > n {
        return Err(Error::invalid(format!("code dimension {k} exceeds length {n}")));
    }
    if n + k > field.order() {
        return Err(Error::FieldExhausted {
            needed: n + k,
            available: field.order(),
        });
    }
    let code = CauchyCode { k, field };
    Ok((0..k).map(|i| (0..n).map(|j| code.entry(i, j)).collect()).collect())
}

#[derive(Clone, Copy, Debug)]
struct CauchyCode<'f> {
    k: usize,
    field: &'f FieldSpec,
}

impl CauchyCode<'_> {
    #[inline]
    fn x(&self, i: usize) -> u16 {
        i as u16
    }

    #[inline]
    fn y(&self, j: usize) -> u16 {
        (self.k + j) as u16
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> u16 {
        self.field.inv(self.x(i) ^ self.y(j)).expect("x and y sets are disjoint")
    }

    /// `log G[i][j]`, in `[1, 2^m - 1]`.
    #[inline]
    fn log_entry(&self, i: usize, j: usize) -> u32 {
        self.field.cyclic() - self.field.log(self.x(i) ^ self.y(j))
    }

    /// Rows `wanted` (positions into `cols`) of the inverse of the Cauchy
    /// block with rows `0..cols.len()` and columns `cols`.
    ///
    /// In characteristic 2, with `A(z) = prod (z + x_r)` and
    /// `B(z) = prod (z + y_c)` over the block:
    /// `inv[c][r] = A(y_c) B(x_r) / ((x_r + y_c) A'(x_r) B'(y_c))`
    /// where the primes drop the vanishing factor. Products are taken as sums
    /// of discrete logs.
    fn inverse_rows(&self, cols: &[usize], wanted: &[usize], a_prime: Option<&[u64]>) -> Vec<Vec<u16>> {
        let f = self.field;
        let cyc = f.cyclic() as u64;
        let m = cols.len();
        let a_prime = match a_prime {
            Some(a) if a.len() == m => a.to_vec(),
            _ => self.log_a_prime(m),
        };
        let xs: Vec<u16> = (0..m).map(|r| self.x(r)).collect();
        let ys: Vec<u16> = cols.iter().map(|&c| self.y(c)).collect();
        let log_prod = |z: u16, set: &[u16], skip: Option<usize>| -> u64 {
            set.iter()
                .enumerate()
                .filter(|&(i, _)| Some(i) != skip)
                .map(|(_, &v)| f.log(z ^ v) as u64)
                .sum::<u64>()
                % cyc
        };
        // log of B(x_r) / A'(x_r), one per row of the block
        let row_factor: Vec<u64> = xs
            .iter()
            .enumerate()
            .map(|(r, &x)| (log_prod(x, &ys, None) + cyc - a_prime[r]) % cyc)
            .collect();
        wanted
            .iter()
            .map(|&c| {
                let y = ys[c];
                let col_factor = (log_prod(y, &xs, None) + cyc - log_prod(y, &ys, Some(c))) % cyc;
                xs.iter()
                    .zip(&row_factor)
                    .map(|(&x, &rf)| {
                        let l = (col_factor + rf + cyc - f.log(x ^ y) as u64) % cyc;
                        f.exp(l as u32)
                    })
                    .collect()
            })
            .collect()
    }
}

impl CauchyCode<'_> {
    /// `log A'(x_r) = sum_{s != r} log(x_r + x_s)` over `x_0..x_{m-1}`.
    fn log_a_prime(&self, m: usize) -> Vec<u64> {
        let f = self.field;
        (0..m)
            .map(|r| {
                (0..m)
                    .filter(|&s| s != r)
                    .map(|s| f.log(self.x(r) ^ self.x(s)) as u64)
                    .sum::<u64>()
                    % f.cyclic() as u64
            })
            .collect()
    }
}

/// `acc[r] += G[r][j] * s` for rows `r < acc.len()`, in the log domain.
fn add_column(code: &CauchyCode<'_>, acc: &mut [u16], j: usize, s: u16) {
    if s == 0 {
        return;
    }
    let f = code.field;
    let ls = f.log(s);
    for (r, a) in acc.iter_mut().enumerate() {
        *a ^= f.exp(ls + code.log_entry(r, j));
    }
}

/// One sub-type's compressed delivery: `k = n - h` coded symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MdsBlock {
    pub subtype: UserClass,
    pub n: usize,
    pub k: usize,
    pub field_degree: u32,
    /// Length in bytes of every encoded signal.
    pub payload_len: usize,
    /// Encoded symbols as field-element vectors.
    pub symbols: Vec<Vec<u16>>,
    /// Row factors of the full `k x k` solve, shared by all receivers.
    a_prime: OnceLock<Vec<u64>>,
}

fn block_field(n: usize) -> Result<&'static FieldSpec> {
    field_for(2 * n.max(1))
}

impl MdsBlock {
    pub fn field(&self) -> &'static FieldSpec {
        block_field(self.n).expect("field was available at encode time")
    }

    fn code(&self) -> CauchyCode<'static> {
        CauchyCode {
            k: self.k,
            field: self.field(),
        }
    }

    pub fn h(&self) -> usize {
        self.n - self.k
    }

    pub fn generator(&self) -> Vec<Vec<u16>> {
        cauchy_generator(self.n, self.k, self.field()).expect("validated at encode time")
    }

    /// Symbol `i` rendered back to bytes (for hashing and transport).
    pub fn symbol_bytes(&self, i: usize) -> Vec<u8> {
        let f = self.field();
        f.from_symbols(&self.symbols[i], self.symbols[i].len() * f.symbol_bytes())
    }

    /// Recovers the signals at positions `wanted` given `known[j]` for the
    /// signals already held. At most `k` positions may be unknown.
    pub fn recover(&self, known: &[Option<&[u8]>], wanted: &[usize]) -> Result<Vec<Vec<u8>>> {
        if known.len() != self.n {
            return Err(Error::invalid(format!("expected {} slots, got {}", self.n, known.len())));
        }
        let held = known.iter().filter(|k| k.is_some()).count();
        if held < self.h() {
            return Err(Error::InsufficientSideInformation {
                known: held,
                n: self.n,
                required: self.h(),
            });
        }
        let f = self.field();
        let code = self.code();
        let unknown: Vec<usize> = (0..self.n).filter(|&j| known[j].is_none()).collect();
        let u = unknown.len();
        let mut solved: Vec<Option<Vec<u8>>> = vec![None; wanted.len()];
        let mut targets = Vec::new();
        for (w, &j) in wanted.iter().enumerate() {
            match known.get(j) {
                None => return Err(Error::invalid(format!("signal index {j} out of range"))),
                Some(Some(bytes)) => solved[w] = Some(bytes.to_vec()),
                Some(None) => targets.push((w, unknown.binary_search(&j).expect("unknown index"))),
            }
        }
        if !targets.is_empty() {
            let width = self.symbols.first().map_or(0, Vec::len);
            // rhs[w][r] = symbol_r[w] - sum over known j of G[r][j] s_j[w]
            let mut rhs: Vec<Vec<u16>> = (0..width).map(|w| self.symbols[..u].iter().map(|s| s[w]).collect()).collect();
            for (j, bytes) in known.iter().enumerate() {
                if let Some(bytes) = bytes {
                    let s = f.to_symbols(bytes);
                    if s.len() != width {
                        return Err(Error::invalid("known signal has the wrong length"));
                    }
                    for (w, &sw) in s.iter().enumerate() {
                        add_column(&code, &mut rhs[w], j, sw);
                    }
                }
            }
            let rows: Vec<usize> = targets.iter().map(|&(_, pos)| pos).collect();
            let a_prime = (u == self.k).then(|| self.a_prime.get_or_init(|| code.log_a_prime(u)).as_slice());
            let inverse = code.inverse_rows(&unknown, &rows, a_prime);
            for ((w, _), inv_row) in targets.iter().zip(inverse) {
                let acc: Vec<u16> = rhs
                    .iter()
                    .map(|col| col.iter().zip(&inv_row).fold(0u16, |a, (&v, &c)| a ^ f.mul(v, c)))
                    .collect();
                solved[*w] = Some(f.from_symbols(&acc, self.payload_len));
            }
        }
        Ok(solved.into_iter().map(|s| s.expect("every wanted slot filled")).collect())
    }

    pub fn record(&self) -> MdsBlockRecord {
        let code = self.code();
        MdsBlockRecord {
            subtype: self.subtype,
            n: self.n,
            k: self.k,
            field_degree: self.field_degree,
            x_elements: (0..self.k).map(|i| code.x(i)).collect(),
            y_elements: (0..self.n).map(|j| code.y(j)).collect(),
            symbol_hashes: (0..self.k).map(|i| payload_hash(&self.symbol_bytes(i))).collect(),
        }
    }
}

/// Serialized description of a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdsBlockRecord {
    pub subtype: UserClass,
    pub n: usize,
    pub k: usize,
    pub field_degree: u32,
    pub x_elements: Vec<u16>,
    pub y_elements: Vec<u16>,
    pub symbol_hashes: Vec<String>,
}

/// Encodes `n` equal-length signals into `n - h` symbols.
pub fn mds_encode(subtype: UserClass, signals: &[Vec<u8>], h: usize) -> Result<MdsBlock> {
    let n = signals.len();
    if h > n {
        return Err(Error::Degenerate { h, n });
    }
    let payload_len = signals.first().map_or(0, Vec::len);
    if signals.iter().any(|s| s.len() != payload_len) {
        return Err(Error::invalid("signals must all have the same length"));
    }
    let k = n - h;
    let field = block_field(n)?;
    let code = CauchyCode { k, field };
    let inputs: Vec<Vec<u16>> = signals.iter().map(|s| field.to_symbols(s)).collect();
    let width = inputs.first().map_or(0, Vec::len);
    // columns[w][i]: symbol i, position w
    let mut columns = vec![vec![0u16; k]; width];
    for (j, s) in inputs.iter().enumerate() {
        for (w, &sw) in s.iter().enumerate() {
            add_column(&code, &mut columns[w], j, sw);
        }
    }
    let symbols = (0..k).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    Ok(MdsBlock {
        subtype,
        n,
        k,
        field_degree: field.degree(),
        payload_len,
        symbols,
        a_prime: OnceLock::new(),
    })
}

/// Recovers all `n` signals from the known ones plus the block.
pub fn mds_decode_user(known: &[(usize, Vec<u8>)], block: &MdsBlock) -> Result<Vec<Vec<u8>>> {
    let mut slots: Vec<Option<&[u8]>> = vec![None; block.n];
    for (j, bytes) in known {
        let slot = slots
            .get_mut(*j)
            .ok_or_else(|| Error::invalid(format!("signal index {j} out of range")))?;
        *slot = Some(bytes.as_slice());
    }
    let all: Vec<usize> = (0..block.n).collect();
    block.recover(&slots, &all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{gf16, gf8, is_invertible, mat_solve};
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signals(n: usize, len: usize, seed: u64) -> Vec<Vec<u8>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..len).map(|_| rng.gen()).collect()).collect()
    }

    #[test]
    fn one_by_one_generator() {
        let g = cauchy_generator(1, 1, gf8()).unwrap();
        assert_eq!(g.len(), 1);
        assert_ne!(g[0][0], 0);
    }

    #[test]
    fn all_submatrices_of_5_by_3_are_invertible() {
        let g = cauchy_generator(5, 3, gf8()).unwrap();
        for cols in crate::combinatorics::k_subsets(5, 3) {
            let sub: Vec<Vec<u16>> = g.iter().map(|row| cols.iter().map(|c| row[c]).collect()).collect();
            assert!(is_invertible(gf8(), &sub));
        }
    }

    #[test]
    fn field_too_small_is_reported() {
        assert!(matches!(cauchy_generator(200, 100, gf8()), Err(Error::FieldExhausted { .. })));
    }

    #[test]
    fn closed_form_inverse_matches_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for field in [gf8(), gf16()] {
            let code = CauchyCode { k: 12, field };
            for _ in 0..10 {
                let m = rng.gen_range(1..=12);
                let mut cols: Vec<usize> = sample(&mut rng, 40, m).into_vec();
                cols.sort_unstable();
                let block: Vec<Vec<u16>> = (0..m).map(|r| cols.iter().map(|&c| code.entry(r, c)).collect()).collect();
                let rhs: Vec<u16> = (0..m).map(|_| rng.gen_range(0..field.order()) as u16).collect();
                let expected = mat_solve(field, &block, &rhs).unwrap();
                let all: Vec<usize> = (0..m).collect();
                let inv = code.inverse_rows(&cols, &all, None);
                for (c, row) in inv.iter().enumerate() {
                    let got = row.iter().zip(&rhs).fold(0u16, |acc, (&a, &b)| acc ^ field.mul(a, b));
                    assert_eq!(got, expected[c]);
                }
            }
        }
    }

    #[test]
    fn no_compression_is_invertible() {
        let sigs = random_signals(6, 5, 1);
        let block = mds_encode(UserClass::I, &sigs, 0).unwrap();
        assert_eq!(block.symbols.len(), 6);
        assert_eq!(mds_decode_user(&[], &block).unwrap(), sigs);
    }

    #[test]
    fn known_everything_is_returned_unchanged() {
        let sigs = random_signals(84, 3, 2);
        let block = mds_encode(UserClass::II1, &sigs, 13).unwrap();
        assert_eq!(block.k, 71);
        let known: Vec<(usize, Vec<u8>)> = sigs.iter().cloned().enumerate().collect();
        assert_eq!(mds_decode_user(&known, &block).unwrap(), sigs);
    }

    #[test]
    fn any_h_known_signals_suffice() {
        let sigs = random_signals(84, 7, 3);
        let block = mds_encode(UserClass::IV, &sigs, 54).unwrap();
        assert_eq!(block.k, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let known: Vec<(usize, Vec<u8>)> =
                sample(&mut rng, 84, 54).into_iter().map(|j| (j, sigs[j].clone())).collect();
            assert_eq!(mds_decode_user(&known, &block).unwrap(), sigs);
        }
        let too_few: Vec<(usize, Vec<u8>)> = (0..53).map(|j| (j, sigs[j].clone())).collect();
        assert!(matches!(
            mds_decode_user(&too_few, &block),
            Err(Error::InsufficientSideInformation { known: 53, .. })
        ));
    }

    #[test]
    fn gf16_blocks_decode() {
        let sigs = random_signals(300, 5, 4);
        let block = mds_encode(UserClass::III2, &sigs, 120).unwrap();
        assert_eq!(block.field_degree, 16);
        let known: Vec<(usize, Vec<u8>)> = (180..300).map(|j| (j, sigs[j].clone())).collect();
        assert_eq!(mds_decode_user(&known, &block).unwrap(), sigs);
    }

    #[test]
    fn full_redundancy_sends_nothing() {
        let sigs = random_signals(4, 2, 5);
        let block = mds_encode(UserClass::II2, &sigs, 4).unwrap();
        assert!(block.symbols.is_empty());
        assert!(matches!(mds_encode(UserClass::II2, &sigs, 5), Err(Error::Degenerate { h: 5, n: 4 })));
    }
}
