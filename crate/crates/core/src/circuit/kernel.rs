//! Stride-indexed amplitude updates shared by the statevector and density-matrix engines.

use num_complex::Complex64;

use super::gate::GateMatrix;

type C = Complex64;

pub(crate) fn apply_1q(amps: &mut [C], q: usize, m: &[[C; 2]; 2]) {
    let stride = 1usize << q;
    let len = amps.len();
    let mut base = 0;
    while base < len {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

/// `a` is the low bit of the 4x4 local index, `b` the high bit.
pub(crate) fn apply_2q(amps: &mut [C], a: usize, b: usize, m: &[[C; 4]; 4]) {
    let ba = 1usize << a;
    let bb = 1usize << b;
    for i in 0..amps.len() {
        if i & (ba | bb) != 0 {
            continue;
        }
        let idx = [i, i | ba, i | bb, i | ba | bb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &out) in idx.iter().enumerate() {
            amps[out] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
        }
    }
}

pub(crate) fn apply_matrix(amps: &mut [C], targets: &[usize], m: &GateMatrix) {
    match m {
        GateMatrix::One(m) => apply_1q(amps, targets[0], m),
        GateMatrix::Two(m) => apply_2q(amps, targets[0], targets[1], m),
    }
}
