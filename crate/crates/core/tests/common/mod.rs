//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

use nsbesov::{Grid, SpectralField, VectorField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real divergence-free field built from `(mode, polarization, amplitude)`
/// triples, each contributing `amp·pol·e^{ik·x}` plus its conjugate.
pub fn modes(g: &Grid, parts: &[([i32; 3], [f64; 3], Complex64)]) -> VectorField {
    let mut comps = vec![vec![ZERO; g.len()]; 3];
    for &(m, pol, amp) in parts {
        let i = g.index_of(&m).unwrap();
        let j = g.index_of(&[-m[0], -m[1], -m[2]]).unwrap();
        for c in 0..3 {
            comps[c][i] += amp * pol[c];
            comps[c][j] += (amp * pol[c]).conj();
        }
    }
    VectorField::new(comps.into_iter().map(|c| SpectralField::from_coeffs(g, c, true).unwrap()).collect()).unwrap()
}

/// `P ∇·(a⊗b + b⊗a)` by explicit convolution over the sparse supports.
pub fn sym_convolution(a: &VectorField, b: &VectorField) -> VectorField {
    let g = a.grid();
    let support = |v: &VectorField| -> Vec<usize> {
        (0..g.len()).filter(|&i| (0..3).any(|c| v.component(c).coeffs()[i].norm() > 0.0)).collect()
    };
    let (sa, sb) = (support(a), support(b));
    let mut out = vec![vec![ZERO; g.len()]; 3];
    for &ip in &sa {
        for &iq in &sb {
            let m: Vec<i32> = (0..3).map(|c| g.mode(ip)[c] + g.mode(iq)[c]).collect();
            let Some(ik) = g.index_of(&m) else { continue };
            let k = g.wavevector(ik);
            let k2: f64 = k.iter().map(|x| x * x).sum();
            if k2 == 0.0 {
                continue;
            }
            let av = |i: usize| a.component(i).coeffs()[ip];
            let bv = |i: usize| b.component(i).coeffs()[iq];
            let kb: Complex64 = (0..3).map(|j| k[j] * bv(j)).sum();
            let ka: Complex64 = (0..3).map(|j| k[j] * av(j)).sum();
            // (∇·(a⊗b + b⊗a))_i = i Σ_j k_j (a_j b_i + b_j a_i)
            let div: Vec<Complex64> = (0..3).map(|i| Complex64::new(0.0, 1.0) * (ka * bv(i) + kb * av(i))).collect();
            let kd: Complex64 = (0..3).map(|c| k[c] * div[c]).sum::<Complex64>() / k2;
            for c in 0..3 {
                out[c][ik] += div[c] - kd * k[c];
            }
        }
    }
    VectorField::new(out.into_iter().map(|c| SpectralField::from_coeffs(g, c, true).unwrap()).collect()).unwrap()
}
