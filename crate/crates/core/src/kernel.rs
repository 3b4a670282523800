//! In-place kernels over a flat amplitude buffer of `bits` virtual qubits.
//!
//! Virtual qubit `v` is bit `bits - 1 - v` of the buffer index. A density
//! matrix of `n` qubits is handled as a `2n`-bit buffer: row qubit `q` is
//! virtual qubit `q`, column qubit `q` is virtual qubit `n + q`.

use crate::gate::Mat2;
use crate::C64;

/// Buffers at least this long are updated with rayon when the `parallel`
/// feature is on.
#[cfg(feature = "parallel")]
pub(crate) const PAR_MIN_LEN: usize = 1 << 14;

#[inline]
fn stride(bits: usize, v: usize) -> usize {
    1usize << (bits - 1 - v)
}

#[inline]
fn rotate(m: &Mat2, a: &mut C64, b: &mut C64) {
    let (x, y) = (*a, *b);
    *a = m[0] * x + m[1] * y;
    *b = m[2] * x + m[3] * y;
}

/// Apply `m` to every amplitude pair differing in virtual qubit `v` whose
/// absolute (lower) index satisfies `keep`.
fn apply_pairs<F>(buf: &mut [C64], bits: usize, v: usize, m: &Mat2, keep: F)
where
    F: Fn(usize) -> bool + Sync,
{
    let s = stride(bits, v);
    let block = 2 * s;

    #[cfg(feature = "parallel")]
    if buf.len() >= PAR_MIN_LEN {
        use rayon::prelude::*;
        if buf.len() / block >= 16 {
            buf.par_chunks_mut(block).enumerate().for_each(|(k, chunk)| {
                let (lo, hi) = chunk.split_at_mut(s);
                let base = k * block;
                for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    if keep(base + i) {
                        rotate(m, a, b);
                    }
                }
            });
        } else {
            for (k, chunk) in buf.chunks_mut(block).enumerate() {
                let (lo, hi) = chunk.split_at_mut(s);
                let base = k * block;
                lo.par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .enumerate()
                    .for_each(|(i, (a, b))| {
                        if keep(base + i) {
                            rotate(m, a, b);
                        }
                    });
            }
        }
        return;
    }

    for (k, chunk) in buf.chunks_mut(block).enumerate() {
        let (lo, hi) = chunk.split_at_mut(s);
        let base = k * block;
        for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if keep(base + i) {
                rotate(m, a, b);
            }
        }
    }
}

pub(crate) fn apply_1q(buf: &mut [C64], bits: usize, v: usize, m: &Mat2) {
    apply_pairs(buf, bits, v, m, |_| true);
}

/// Apply `m` on `target` where virtual qubit `control` is 1.
pub(crate) fn apply_controlled(buf: &mut [C64], bits: usize, control: usize, target: usize, m: &Mat2) {
    let cmask = stride(bits, control);
    apply_pairs(buf, bits, target, m, move |idx| idx & cmask != 0);
}

/// General `2^k x 2^k` row-major matrix on virtual qubits `vs`
/// (first entry most significant).
pub(crate) fn apply_matrix(buf: &mut [C64], bits: usize, vs: &[usize], m: &[C64]) {
    let k = vs.len();
    let dim = 1usize << k;
    debug_assert_eq!(m.len(), dim * dim);
    let masks: Vec<usize> = vs.iter().map(|&v| stride(bits, v)).collect();
    let all: usize = masks.iter().sum();
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
                .map(|(_, &mask)| mask)
                .sum()
        })
        .collect();
    let mut gathered = vec![C64::new(0.0, 0.0); dim];
    for base in 0..buf.len() {
        if base & all != 0 {
            continue;
        }
        for (g, &off) in gathered.iter_mut().zip(&offsets) {
            *g = buf[base + off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let row = &m[r * dim..(r + 1) * dim];
            buf[base + off] = row.iter().zip(&gathered).map(|(a, b)| a * b).sum();
        }
    }
}

pub(crate) fn conj2(m: &Mat2) -> Mat2 {
    [m[0].conj(), m[1].conj(), m[2].conj(), m[3].conj()]
}
