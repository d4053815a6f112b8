#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Independent dense-matrix teleportation with complete ideal Bell
/// measurements. Photons: senders' inputs `0..n`, channel `n..2n+m`;
/// receivers last. Returns the corrected receivers' density matrix.
pub fn dense_ideal_teleport(
    input: &DMatrix<Complex64>,
    channel: &DMatrix<Complex64>,
    n: usize,
    m: usize,
) -> DMatrix<Complex64> {
    let rho = input.kronecker(channel);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // (phi+, phi-, psi+, psi-) on bits (x, y)
    let bell = |label: usize, x: usize, y: usize| -> f64 {
        match (label, x, y) {
            (0, 0, 0) | (0, 1, 1) | (1, 0, 0) => s,
            (1, 1, 1) => -s,
            (2, 0, 1) | (2, 1, 0) | (3, 0, 1) => s,
            (3, 1, 0) => -s,
            _ => 0.0,
        }
    };
    let dr = 1usize << m;
    let ds = 1usize << (2 * n);
    let mut out = DMatrix::<Complex64>::zeros(dr, dr);
    for tuple in 0..(1usize << (2 * n)) {
        let labels: Vec<usize> = (0..n).map(|i| (tuple >> (2 * i)) & 3).collect();
        // sender basis index a: bit for photon k is (a >> (2n-1-k)) & 1
        let bra: Vec<f64> = (0..ds)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        let x = (a >> (2 * n - 1 - i)) & 1;
                        let y = (a >> (2 * n - 1 - (n + i))) & 1;
                        bell(labels[i], x, y)
                    })
                    .product()
            })
            .collect();
        let mut sigma = DMatrix::<Complex64>::zeros(dr, dr);
        for r in 0..dr {
            for c in 0..dr {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..ds {
                    if bra[a] == 0.0 {
                        continue;
                    }
                    for b in 0..ds {
                        if bra[b] == 0.0 {
                            continue;
                        }
                        acc += rho[(a * dr + r, b * dr + c)] * bra[a] * bra[b];
                    }
                }
                sigma[(r, c)] = acc;
            }
        }
        let psi = labels[0] >= 2;
        let minus = labels.iter().filter(|&&l| l == 1 || l == 3).count() % 2 == 1;
        let u = correction(m, psi, minus);
        out += &u * sigma * u.adjoint();
    }
    out
}

fn correction(m: usize, psi: bool, minus: bool) -> DMatrix<Complex64> {
    let d = 1usize << m;
    let mut u = DMatrix::<Complex64>::zeros(d, d);
    for col in 0..d {
        let mut row = col;
        if psi {
            row ^= d - 1;
        }
        let r1_is_v = (row >> (m - 1)) & 1 == 1;
        let sign = if minus && r1_is_v { -1.0 } else { 1.0 };
        u[(row, col)] = Complex64::new(sign, 0.0);
    }
    u
}

pub fn ket_density(amps: &[Complex64]) -> DMatrix<Complex64> {
    let v = DMatrix::from_column_slice(amps.len(), 1, amps);
    &v * v.adjoint()
}

pub fn ghz_amplitudes(photons: usize, alpha: Complex64, beta: Complex64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << photons];
    v[0] = alpha;
    v[(1 << photons) - 1] = beta;
    v
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
