use super::model::{NoiseModel, ReadoutError};
use crate::error::{Result, VqeError};

const SINGULAR_TOLERANCE: f64 = 1e-12;

/// Apply a 2×2 real matrix to bit `q` of a distribution indexed by basis state.
fn apply_bit_matrix(dist: &mut [f64], q: usize, m: &[[f64; 2]; 2]) {
    let stride = 1usize << q;
    for i in 0..dist.len() {
        if i & stride != 0 {
            continue;
        }
        let (a0, a1) = (dist[i], dist[i | stride]);
        dist[i] = m[0][0] * a0 + m[0][1] * a1;
        dist[i | stride] = m[1][0] * a0 + m[1][1] * a1;
    }
}

fn n_qubits_of(dist: &[f64]) -> Result<usize> {
    if !dist.len().is_power_of_two() {
        return Err(VqeError::Size(format!(
            "distribution of length {} is not over a qubit register",
            dist.len()
        )));
    }
    Ok(dist.len().trailing_zeros() as usize)
}

/// Tensor-product confusion applied to a distribution over basis indices.
pub fn apply_readout_error(dist: &[f64], errors: &[ReadoutError]) -> Result<Vec<f64>> {
    let n = n_qubits_of(dist)?;
    if errors.len() != n {
        return Err(VqeError::Size(format!(
            "{} readout errors for {n} qubits",
            errors.len()
        )));
    }
    let mut out = dist.to_vec();
    for (q, e) in errors.iter().enumerate() {
        apply_bit_matrix(&mut out, q, &e.confusion());
    }
    Ok(out)
}

/// Same as [`apply_readout_error`] with the model's per-qubit flips.
pub fn apply_model_readout(dist: &[f64], noise: &NoiseModel) -> Result<Vec<f64>> {
    let n = n_qubits_of(dist)?;
    apply_readout_error(dist, &noise.readout_errors(n))
}

fn inverse(e: &ReadoutError) -> Result<[[f64; 2]; 2]> {
    let m = e.confusion();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < SINGULAR_TOLERANCE {
        return Err(VqeError::numerical(format!(
            "singular readout confusion (p01 = {}, p10 = {})",
            e.p01, e.p10
        )));
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Inverse of the tensor-product confusion, without clipping. Recovers the input of
/// [`apply_readout_error`] exactly.
pub fn unfold_readout(dist: &[f64], errors: &[ReadoutError]) -> Result<Vec<f64>> {
    let n = n_qubits_of(dist)?;
    if errors.len() != n {
        return Err(VqeError::Size(format!(
            "{} readout errors for {n} qubits",
            errors.len()
        )));
    }
    let mut out = dist.to_vec();
    for (q, e) in errors.iter().enumerate() {
        apply_bit_matrix(&mut out, q, &inverse(e)?);
    }
    Ok(out)
}

/// Inverse confusion applied to an empirical distribution (or raw counts), then negative
/// entries clipped and the result renormalised to a probability vector.
pub fn mitigate_readout(dist: &[f64], errors: &[ReadoutError]) -> Result<Vec<f64>> {
    let mut out = unfold_readout(dist, errors)?;
    out.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return Err(VqeError::numerical("mitigated distribution has no mass"));
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

/// Per-qubit flip rates estimated from calibration runs: each entry is a prepared basis
/// index and the histogram measured after preparing it.
pub fn calibrate_readout(n_qubits: usize, runs: &[(usize, Vec<u64>)]) -> Result<Vec<ReadoutError>> {
    let mut flips = vec![[0u64; 2]; n_qubits];
    let mut totals = vec![[0u64; 2]; n_qubits];
    for (prepared, hist) in runs {
        if hist.len() != 1 << n_qubits {
            return Err(VqeError::Size(format!(
                "calibration histogram of length {} for {n_qubits} qubits",
                hist.len()
            )));
        }
        for (read, &k) in hist.iter().enumerate() {
            for q in 0..n_qubits {
                let p = prepared >> q & 1;
                totals[q][p] += k;
                if read >> q & 1 != p {
                    flips[q][p] += k;
                }
            }
        }
    }
    (0..n_qubits)
        .map(|q| {
            let rate = |p: usize| {
                if totals[q][p] == 0 {
                    Err(VqeError::Contract(format!(
                        "no calibration data with qubit {q} prepared in |{p}>"
                    )))
                } else {
                    Ok(flips[q][p] as f64 / totals[q][p] as f64)
                }
            };
            Ok(ReadoutError {
                p01: rate(0)?,
                p10: rate(1)?,
            })
        })
        .collect()
}
