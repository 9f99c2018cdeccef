//! Arithmetic in GF(2^8) and GF(2^16) through log/exp tables.
//!
//! Elements are held as `u16` in both fields. Payload bytes map to field
//! symbols one byte each in GF(2^8) and as big-endian byte pairs in
//! GF(2^16), where an odd trailing byte is zero-padded.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// x^8 + x^4 + x^3 + x + 1
pub const GF8_POLY: u32 = 0x11B;
/// x^16 + x^12 + x^3 + x + 1
pub const GF16_POLY: u32 = 0x1100B;

#[derive(Debug)]
pub struct FieldSpec {
    degree: u32,
    poly: u32,
    /// `exp[i] = g^i`, doubled so a sum of two logs indexes directly.
    exp: Vec<u16>,
    log: Vec<u32>,
}

fn clmul_mod(a: u32, b: u32, degree: u32, poly: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 != 0 {
            a ^= poly;
        }
    }
    acc
}

impl FieldSpec {
    fn build(degree: u32, poly: u32) -> FieldSpec {
        let order = 1usize << degree;
        let cyclic = order - 1;
        // smallest generator of the multiplicative group
        let generator = (2u32..)
            .find(|&g| {
                let mut x = 1u32;
                for i in 1..=cyclic {
                    x = clmul_mod(x, g, degree, poly);
                    if x == 1 {
                        return i == cyclic;
                    }
                }
                false
            })
            .expect("irreducible polynomial has a generator");
        let mut exp = vec![0u16; 2 * cyclic];
        let mut log = vec![0u32; order];
        let mut x = 1u32;
        for i in 0..cyclic {
            exp[i] = x as u16;
            exp[i + cyclic] = x as u16;
            log[x as usize] = i as u32;
            x = clmul_mod(x, generator, degree, poly);
        }
        FieldSpec { degree, poly, exp, log }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of field elements, `2^m`.
    pub fn order(&self) -> usize {
        1 << self.degree
    }

    /// Payload bytes per field symbol.
    pub fn symbol_bytes(&self) -> usize {
        self.degree as usize / 8
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::DivisionByZero { degree: self.degree });
        }
        let cyclic = self.order() - 1;
        Ok(self.exp[(cyclic - self.log[a as usize] as usize) % cyclic])
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete logarithm of a nonzero element.
    #[inline]
    pub fn log(&self, a: u16) -> u32 {
        debug_assert_ne!(a, 0);
        self.log[a as usize]
    }

    /// `g^i` for `i < 2 (2^m - 1)`.
    #[inline]
    pub fn exp(&self, i: u32) -> u16 {
        self.exp[i as usize]
    }

    /// Order of the multiplicative group, `2^m - 1`.
    #[inline]
    pub fn cyclic(&self) -> u32 {
        (self.order() - 1) as u32
    }

    /// `dst += c * src`, elementwise.
    pub fn mul_acc(&self, dst: &mut [u16], src: &[u16], c: u16) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(self.log[s as usize] + lc) as usize];
            }
        }
    }

    /// Payload bytes as field symbols.
    pub fn to_symbols(&self, bytes: &[u8]) -> Vec<u16> {
        match self.degree {
            8 => bytes.iter().map(|&b| b as u16).collect(),
            _ => bytes
                .chunks(2)
                .map(|c| u16::from_be_bytes([c[0], c.get(1).copied().unwrap_or(0)]))
                .collect(),
        }
    }

    /// Inverse of [`to_symbols`](Self::to_symbols), truncated to `len` bytes.
    pub fn from_symbols(&self, symbols: &[u16], len: usize) -> Vec<u8> {
        let mut out: Vec<u8> = match self.degree {
            8 => symbols.iter().map(|&s| s as u8).collect(),
            _ => symbols.iter().flat_map(|s| s.to_be_bytes()).collect(),
        };
        out.truncate(len);
        out
    }
}

pub fn gf8() -> &'static FieldSpec {
    static F: OnceLock<FieldSpec> = OnceLock::new();
    F.get_or_init(|| FieldSpec::build(8, GF8_POLY))
}

pub fn gf16() -> &'static FieldSpec {
    static F: OnceLock<FieldSpec> = OnceLock::new();
    F.get_or_init(|| FieldSpec::build(16, GF16_POLY))
}

/// The smaller field with at least `needed` elements.
pub fn field_for(needed: usize) -> Result<&'static FieldSpec> {
    if needed <= 1 << 8 {
        Ok(gf8())
    } else if needed <= 1 << 16 {
        Ok(gf16())
    } else {
        Err(Error::FieldExhausted {
            needed,
            available: 1 << 16,
        })
    }
}

pub fn gf_mul(field: &FieldSpec, a: u16, b: u16) -> u16 {
    field.mul(a, b)
}

pub fn gf_inv(field: &FieldSpec, a: u16) -> Result<u16> {
    field.inv(a)
}

/// Solves `A x = b` for square `A` by Gauss-Jordan elimination.
pub fn mat_solve(field: &FieldSpec, a: &[Vec<u16>], b: &[u16]) -> Result<Vec<u16>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("mat_solve needs a square system"));
    }
    let mut m: Vec<Vec<u16>> = a.iter().zip(b).map(|(row, &rhs)| {
        let mut r = row.clone();
        r.push(rhs);
        r
    }).collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != 0).ok_or(Error::SingularSystem(n))?;
        m.swap(col, pivot);
        let inv = field.inv(m[col][col])?;
        for x in m[col].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && row[col] != 0 {
                let c = row[col];
                field.mul_acc(row, &pivot_row, c);
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n]).collect())
}

/// Whether a square matrix is invertible.
pub fn is_invertible(field: &FieldSpec, a: &[Vec<u16>]) -> bool {
    let n = a.len();
    let mut m: Vec<Vec<u16>> = a.to_vec();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != 0) else {
            return false;
        };
        m.swap(col, pivot);
        let inv = field.inv(m[col][col]).expect("pivot is nonzero");
        let pivot_row: Vec<u16> = m[col].iter().map(|&x| field.mul(x, inv)).collect();
        for row in m.iter_mut().skip(col + 1) {
            if row[col] != 0 {
                let c = row[col];
                field.mul_acc(row, &pivot_row, c);
            }
        }
    }
    true
}
