//! Dense complex square matrices and the numeric primitives shared by the
//! whole pipeline: unitarity checks, Frobenius metrics, Haar-random
//! sampling, and the canonical unitary JSON format.
//!
//! Conventions used everywhere: states are column vectors, entry `(r, c)`
//! is the amplitude from input mode `c` to output mode `r`, circuits act
//! left-to-right in netlist order (so the total matrix is the product of
//! element matrices with the first-applied element rightmost), and all
//! indices are 0-based except physical OAM numbers.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::jsonio;

/// Default unitarity tolerance for dimension `dim`: absolute Frobenius
/// bound scaled by dimension.
pub fn default_unitarity_tol(dim: usize) -> f64 {
    1e-9 * dim as f64
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid of a tiny negative can round up to exactly 2π
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Dense complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    data: Array2<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { data: Array2::zeros((dim, dim)) }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix { data: Array2::from_shape_fn((dim, dim), |(r, c)| f(r, c)) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix product dimension mismatch");
        CMatrix { data: self.data.dot(&rhs.data) }
    }

    pub fn adjoint(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { data: self.data.mapv(|x| x * s) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product tr(A†B).
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ‖M†M − I‖_F.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.dim();
        let p = self.adjoint().mul(self);
        let mut sum = 0.0;
        for r in 0..d {
            for c in 0..d {
                let target = if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                sum += (p[(r, c)] - target).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// True iff ‖M†M − I‖_F ≤ tol.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.data.iter()
    }

    // ---- canonical unitary JSON format ----

    /// `{"dim": N, "re": [[...]], "im": [[...]]}` with row-major doubles.
    pub fn to_value(&self) -> Value {
        let d = self.dim();
        let rows = |pick: fn(&C64) -> f64| -> Value {
            Value::Array(
                (0..d)
                    .map(|r| {
                        Value::Array((0..d).map(|c| json!(pick(&self[(r, c)]))).collect())
                    })
                    .collect(),
            )
        };
        json!({ "dim": d, "re": rows(|z| z.re), "im": rows(|z| z.im) })
    }

    /// Parse the canonical unitary JSON format, rejecting ragged arrays and
    /// non-finite values. Unitarity itself is checked by consumers.
    pub fn from_value(value: &Value) -> Result<CMatrix> {
        let obj = jsonio::as_object(value, "unitary")?;
        let dim = jsonio::get_usize(obj, "dim", "unitary")?;
        if dim == 0 {
            return Err(Error::parse("unitary.dim", "dimension must be at least 1"));
        }
        let mut m = CMatrix::zeros(dim);
        let parts: [(&str, fn(&mut C64, f64)); 2] =
            [("re", |z, x| z.re = x), ("im", |z, x| z.im = x)];
        for (key, write) in parts {
            let rows = jsonio::get_array(obj, key, "unitary")?;
            if rows.len() != dim {
                return Err(Error::parse(
                    format!("unitary.{key}"),
                    format!("expected {dim} rows, found {}", rows.len()),
                ));
            }
            for (r, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| Error::parse(format!("unitary.{key}[{r}]"), "expected an array"))?;
                if row.len() != dim {
                    return Err(Error::parse(
                        format!("unitary.{key}[{r}]"),
                        format!("expected {dim} entries, found {}", row.len()),
                    ));
                }
                for (c, v) in row.iter().enumerate() {
                    let x = jsonio::elem_f64(v, &format!("unitary.{key}[{r}][{c}]"))?;
                    write(&mut m[(r, c)], x);
                }
            }
        }
        Ok(m)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[[r, c]]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[[r, c]]
    }
}

/// ‖A − B‖_F; zero iff the matrices are equal.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "frobenius_distance requires equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let sum: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    Ok(sum.sqrt())
}

/// Vector of phases, each canonicalised into `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
}

impl PhaseVector {
    pub fn new(raw: Vec<f64>) -> Self {
        PhaseVector { phases: raw.into_iter().map(wrap_angle).collect() }
    }

    pub fn zeros(dim: usize) -> Self {
        PhaseVector { phases: vec![0.0; dim] }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.phases[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.phases
    }

    /// diag(e^{iφ_0}, …, e^{iφ_{N−1}}).
    pub fn diagonal_matrix(&self) -> CMatrix {
        let d = self.len();
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            m[(i, i)] = C64::from_polar(1.0, self.phases[i]);
        }
        m
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on 53-bit uniforms; u1 ∈ (0, 1] so the log is finite.
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Haar-distributed random unitary, deterministic in `seed`.
///
/// Draws an i.i.d. complex-Gaussian matrix and orthonormalises its columns
/// by modified Gram-Schmidt with one reorthogonalisation pass. The
/// triangular factor's diagonal is real positive under Gram-Schmidt, which
/// is exactly the phase fixing that makes the factorisation Haar.
pub fn haar_random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::Domain("haar_random_unitary requires dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            z[(r, c)] = C64::new(standard_normal(&mut rng), standard_normal(&mut rng));
        }
    }
    for j in 0..dim {
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..dim).map(|i| z[(i, k)].conj() * z[(i, j)]).sum();
                for i in 0..dim {
                    let zk = z[(i, k)];
                    z[(i, j)] -= proj * zk;
                }
            }
        }
        let norm: f64 = (0..dim).map(|i| z[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-150 {
            return Err(Error::Domain(
                "degenerate Gaussian sample during orthonormalisation".into(),
            ));
        }
        for i in 0..dim {
            z[(i, j)] /= norm;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_unitary() {
        assert!(CMatrix::identity(4).is_unitary(1e-9));
    }

    #[test]
    fn scaled_diagonal_is_not_unitary() {
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(2.0, 0.0);
        assert!(!m.is_unitary(1e-9));
    }

    #[test]
    fn splitting_matrix_is_unitary() {
        // R(θ, φ) evaluated entrywise; R†R must be the identity numerically.
        let (theta, phi) = (std::f64::consts::PI / 5.0, 1.3);
        let (c, s) = (theta.cos(), theta.sin());
        let e = C64::from_polar(1.0, phi);
        let mut r = CMatrix::zeros(2);
        r[(0, 0)] = e * c;
        r[(0, 1)] = C64::new(-s, 0.0);
        r[(1, 0)] = e * s;
        r[(1, 1)] = C64::new(c, 0.0);
        assert!(r.is_unitary(1e-12));
    }

    #[test]
    fn haar_dim_one_is_a_phase() {
        let u = haar_random_unitary(1, 3).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_is_deterministic_in_seed() {
        let a = haar_random_unitary(4, 42).unwrap();
        let b = haar_random_unitary(4, 42).unwrap();
        assert_eq!(a, b);
        let c = haar_random_unitary(4, 43).unwrap();
        assert!(frobenius_distance(&a, &c).unwrap() > 1e-3);
    }

    #[test]
    fn haar_is_unitary() {
        let u = haar_random_unitary(8, 7).unwrap();
        assert!(u.is_unitary(1e-10 * 8.0));
    }

    #[test]
    fn haar_dim_zero_is_a_domain_error() {
        assert!(matches!(haar_random_unitary(0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn frobenius_identity_cases() {
        let i2 = CMatrix::identity(2);
        assert_eq!(frobenius_distance(&i2, &i2).unwrap(), 0.0);
        // ‖I − (−I)‖_F: each diagonal entry differs by 2, so the square sum is 8
        let m2 = i2.scale(C64::new(-1.0, 0.0));
        let expected = 8.0_f64.sqrt();
        assert!((frobenius_distance(&i2, &m2).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn frobenius_of_global_phase() {
        let u = haar_random_unitary(3, 11).unwrap();
        let w = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let v = u.scale(w);
        // entrywise scaling by a unit phase: ‖U − wU‖_F = √(N·|1−w|²)
        let expected = (3.0 * (C64::new(1.0, 0.0) - w).norm_sqr()).sqrt();
        assert!((frobenius_distance(&u, &v).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn frobenius_dimension_mismatch() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(frobenius_distance(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn unitary_json_round_trips_bit_exactly() {
        let u = haar_random_unitary(5, 99).unwrap();
        let text = jsonio::to_json_string(&u.to_value());
        let back = CMatrix::from_value(&jsonio::parse_str(&text).unwrap()).unwrap();
        for (a, b) in u.iter().zip(back.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // writing again reproduces the same bytes
        assert_eq!(text, jsonio::to_json_string(&back.to_value()));
    }

    #[test]
    fn unitary_json_rejects_ragged_rows() {
        let text = r#"{"dim": 2, "re": [[1.0, 0.0], [0.0]], "im": [[0,0],[0,0]]}"#;
        let err = CMatrix::from_value(&jsonio::parse_str(text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("re[1]"), "{err}");
    }

    #[test]
    fn unitary_json_rejects_dim_zero() {
        let text = r#"{"dim": 0, "re": [], "im": []}"#;
        assert!(CMatrix::from_value(&jsonio::parse_str(text).unwrap()).is_err());
    }

    #[test]
    fn wrap_angle_stays_in_range() {
        for &x in &[-1e-18, -0.5, 0.0, TAU, TAU + 0.25, -10.0 * TAU - 1.0] {
            let y = wrap_angle(x);
            assert!((0.0..TAU).contains(&y), "{x} -> {y}");
        }
    }

    proptest! {
        #[test]
        fn frobenius_is_symmetric_and_triangular(
            seed_a in 0u64..1000, seed_b in 0u64..1000, seed_c in 0u64..1000
        ) {
            let a = haar_random_unitary(3, seed_a).unwrap();
            let b = haar_random_unitary(3, seed_b).unwrap();
            let c = haar_random_unitary(3, seed_c).unwrap();
            let dab = frobenius_distance(&a, &b).unwrap();
            let dba = frobenius_distance(&b, &a).unwrap();
            prop_assert!((dab - dba).abs() < 1e-13);
            let dac = frobenius_distance(&a, &c).unwrap();
            let dcb = frobenius_distance(&c, &b).unwrap();
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }
}
