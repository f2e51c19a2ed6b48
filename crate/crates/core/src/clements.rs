//! Rectangular-mesh decomposition of a unitary into two-mode splitting
//! operations.
//!
//! An N-dimensional unitary factors as `U = D · T_K ⋯ T_2 T_1` where each
//! `T` couples a pair of adjacent modes `(m, m+1)` through the block
//!
//! ```text
//! R(θ, φ) = [ e^{iφ} cos θ   −sin θ ]
//!           [ e^{iφ} sin θ    cos θ ]
//! ```
//!
//! and `D` is a diagonal phase layer applied after the mesh. Operations are
//! grouped into layers that alternate between couplings on even mode pairs
//! (Ω1) and odd mode pairs (Ω2), starting with Ω1, which gives the shallow
//! rectangular layout with exactly N(N−1)/2 couplings.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jsonio;
use crate::matcore::{default_unitarity_tol, wrap_angle, CMatrix, PhaseVector};

/// Entries with magnitude below this are treated as already nulled, and the
/// corresponding coupling is emitted as the identity (θ = 0, φ = 0) so that
/// degenerate inputs decompose deterministically.
pub const NULL_THRESHOLD: f64 = 1e-14;

/// Reconstruction tolerance for dimension `dim`.
pub fn reconstruction_tol(dim: usize) -> f64 {
    1e-8 * dim as f64
}

/// One two-mode splitting operation on modes `(m, m+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TOp {
    pub m: usize,
    /// Mixing angle in `[0, π/2]`.
    pub theta: f64,
    /// Phase in `[0, 2π)`, applied to input mode `m`.
    pub phi: f64,
}

/// Layer classification: Ω1 couples even `m`, Ω2 couples odd `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerParity {
    Omega1,
    Omega2,
}

/// Rectangular mesh: alternating Ω1/Ω2 layers plus an output phase layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ClementsMesh {
    pub dim: usize,
    pub layers: Vec<Vec<TOp>>,
    pub output_phases: PhaseVector,
}

/// Full-space matrix of a single splitting operation.
pub fn t_matrix(dim: usize, op: &TOp) -> Result<CMatrix> {
    if dim < 2 || op.m > dim - 2 {
        return Err(Error::Dimension(format!(
            "coupling on modes ({}, {}) does not fit dimension {dim}",
            op.m,
            op.m + 1
        )));
    }
    let mut t = CMatrix::identity(dim);
    let (c, s) = (op.theta.cos(), op.theta.sin());
    let e = C64::from_polar(1.0, op.phi);
    t[(op.m, op.m)] = e * c;
    t[(op.m, op.m + 1)] = C64::new(-s, 0.0);
    t[(op.m + 1, op.m)] = e * s;
    t[(op.m + 1, op.m + 1)] = C64::new(c, 0.0);
    Ok(t)
}

/// In-place left multiplication `W ← T_{m,m+1}(θ, φ) · W`.
fn apply_t_left(w: &mut CMatrix, m: usize, theta: f64, phi: f64) {
    let dim = w.dim();
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(1.0, phi);
    for col in 0..dim {
        let top = w[(m, col)];
        let bot = w[(m + 1, col)];
        w[(m, col)] = e * c * top - s * bot;
        w[(m + 1, col)] = e * s * top + c * bot;
    }
}

/// In-place right multiplication `W ← W · T_{m,m+1}(θ, φ)†`.
fn apply_t_adjoint_right(w: &mut CMatrix, m: usize, theta: f64, phi: f64) {
    let dim = w.dim();
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(1.0, -phi);
    for row in 0..dim {
        let left = w[(row, m)];
        let right = w[(row, m + 1)];
        w[(row, m)] = e * c * left - s * right;
        w[(row, m + 1)] = e * s * left + c * right;
    }
}

impl ClementsMesh {
    /// Dense all-identity mesh: the canonical layer layout with every
    /// coupling at θ = 0, φ = 0 and zero output phases.
    pub fn zero(dim: usize) -> ClementsMesh {
        let ops: Vec<TOp> = canonical_op_sequence(dim)
            .into_iter()
            .map(|m| TOp { m, theta: 0.0, phi: 0.0 })
            .collect();
        let layers = schedule_layers(dim, ops).expect("canonical layout is schedulable");
        ClementsMesh { dim, layers, output_phases: PhaseVector::zeros(dim) }
    }

    pub fn op_count(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Check every structural invariant: coupling count N(N−1)/2, layers
    /// alternating Ω1/Ω2 from Ω1, strictly increasing disjoint pairs within
    /// a layer, angle ranges, and phase-vector length.
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Mesh("dimension must be at least 1".into()));
        }
        if self.output_phases.len() != self.dim {
            return Err(Error::Mesh(format!(
                "phase vector has length {}, expected {}",
                self.output_phases.len(),
                self.dim
            )));
        }
        if self.layers.len() > self.dim {
            return Err(Error::Mesh(format!(
                "{} layers exceed the maximum {} for dimension {}",
                self.layers.len(),
                self.dim,
                self.dim
            )));
        }
        let expected = self.dim * (self.dim - 1) / 2;
        if self.op_count() != expected {
            return Err(Error::Mesh(format!(
                "{} couplings, expected {expected} for dimension {}",
                self.op_count(),
                self.dim
            )));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::Mesh(format!("layer {k} is empty")));
            }
            let mut prev: Option<usize> = None;
            for op in layer {
                if op.m % 2 != k % 2 {
                    return Err(Error::Mesh(format!(
                        "layer {k} expects mode parity {}, found coupling at m = {}",
                        k % 2,
                        op.m
                    )));
                }
                if op.m > self.dim - 2 {
                    return Err(Error::Mesh(format!(
                        "coupling at m = {} does not fit dimension {}",
                        op.m, self.dim
                    )));
                }
                if let Some(p) = prev {
                    if op.m <= p + 1 {
                        return Err(Error::Mesh(format!(
                            "layer {k} couplings at m = {p} and m = {} overlap or are unordered",
                            op.m
                        )));
                    }
                }
                if !(0.0..=PI / 2.0).contains(&op.theta) {
                    return Err(Error::Mesh(format!(
                        "theta {} at m = {} outside [0, pi/2]",
                        op.theta, op.m
                    )));
                }
                if !op.phi.is_finite() || !(0.0..2.0 * PI).contains(&op.phi) {
                    return Err(Error::Mesh(format!(
                        "phi {} at m = {} outside [0, 2*pi)",
                        op.phi, op.m
                    )));
                }
                prev = Some(op.m);
            }
        }
        Ok(())
    }

    /// Mesh JSON: `{"dim": N, "layers": [[{"m", "theta", "phi"}, ...], ...], "phases": [...]}`.
    pub fn to_value(&self) -> Value {
        let layers: Vec<Value> = self
            .layers
            .iter()
            .map(|layer| {
                Value::Array(
                    layer
                        .iter()
                        .map(|op| json!({"m": op.m, "theta": op.theta, "phi": op.phi}))
                        .collect(),
                )
            })
            .collect();
        json!({
            "dim": self.dim,
            "layers": layers,
            "phases": self.output_phases.as_slice(),
        })
    }

    pub fn from_value(value: &Value) -> Result<ClementsMesh> {
        let obj = jsonio::as_object(value, "mesh")?;
        let dim = jsonio::get_usize(obj, "dim", "mesh")?;
        let layers_v = jsonio::get_array(obj, "layers", "mesh")?;
        let mut layers = Vec::with_capacity(layers_v.len());
        for (k, layer_v) in layers_v.iter().enumerate() {
            let ctx = format!("mesh.layers[{k}]");
            let ops_v = layer_v
                .as_array()
                .ok_or_else(|| Error::parse(ctx.clone(), "expected an array"))?;
            let mut layer = Vec::with_capacity(ops_v.len());
            for (i, op_v) in ops_v.iter().enumerate() {
                let op_ctx = format!("{ctx}[{i}]");
                let op_obj = jsonio::as_object(op_v, &op_ctx)?;
                layer.push(TOp {
                    m: jsonio::get_usize(op_obj, "m", &op_ctx)?,
                    theta: jsonio::get_f64(op_obj, "theta", &op_ctx)?,
                    phi: jsonio::get_f64(op_obj, "phi", &op_ctx)?,
                });
            }
            layers.push(layer);
        }
        let phases_v = jsonio::get_array(obj, "phases", "mesh")?;
        let mut phases = Vec::with_capacity(phases_v.len());
        for (i, v) in phases_v.iter().enumerate() {
            phases.push(jsonio::elem_f64(v, &format!("mesh.phases[{i}]"))?);
        }
        let mesh = ClementsMesh { dim, layers, output_phases: PhaseVector::new(phases) };
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Parity of layer `k`: Ω1 iff every coupling sits on an even mode pair.
pub fn layer_parity(mesh: &ClementsMesh, k: usize) -> Result<LayerParity> {
    let layer = mesh
        .layers
        .get(k)
        .ok_or_else(|| Error::Dimension(format!("layer {k} out of range")))?;
    if layer.is_empty() {
        return Err(Error::Mesh(format!("layer {k} is empty")));
    }
    let even = layer.iter().filter(|op| op.m % 2 == 0).count();
    if even == layer.len() {
        Ok(LayerParity::Omega1)
    } else if even == 0 {
        Ok(LayerParity::Omega2)
    } else {
        Err(Error::Mesh(format!("layer {k} mixes even and odd mode pairs")))
    }
}

/// Multiply the mesh back out: `diag(e^{i·phases}) · T_K ⋯ T_1` with the
/// first layer applied first.
pub fn reconstruct(mesh: &ClementsMesh) -> Result<CMatrix> {
    mesh.validate()?;
    let mut u = CMatrix::identity(mesh.dim);
    for layer in &mesh.layers {
        for op in layer {
            apply_t_left(&mut u, op.m, op.theta, op.phi);
        }
    }
    Ok(mesh.output_phases.diagonal_matrix().mul(&u))
}

/// Angles that null `x` against row partner `y` under right multiplication
/// by `T†` (the nulled entry is in the left column of the pair).
fn nulling_angles_right(x: C64, y: C64) -> (f64, f64) {
    if x.norm() < NULL_THRESHOLD {
        return (0.0, 0.0);
    }
    (x.norm().atan2(y.norm()), wrap_angle(x.arg() - y.arg()))
}

/// Angles that null `x` against the entry `y` one row above it under left
/// multiplication by `T`.
fn nulling_angles_left(x: C64, y: C64) -> (f64, f64) {
    if x.norm() < NULL_THRESHOLD {
        return (0.0, 0.0);
    }
    (x.norm().atan2(y.norm()), wrap_angle(PI + x.arg() - y.arg()))
}

/// Decompose a unitary into the rectangular mesh.
///
/// Sweeps the anti-diagonals of `U`: odd diagonals are nulled from the
/// bottom-left by right-multiplying inverse couplings on adjacent columns,
/// even diagonals by left-multiplying couplings on adjacent rows. The
/// residual diagonal then has the left-applied factors commuted through it
/// so the phase layer ends up after the mesh.
pub fn decompose(u: &CMatrix) -> Result<ClementsMesh> {
    let n = u.dim();
    let tol = default_unitarity_tol(n);
    let residual = u.unitarity_residual();
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }

    let mut w = u.clone();
    let mut right_ops: Vec<TOp> = Vec::new();
    let mut left_ops: Vec<TOp> = Vec::new();
    for d in 1..n {
        if d % 2 == 1 {
            for j in 0..d {
                let r = n - 1 - j;
                let c = d - 1 - j;
                let (theta, phi) = nulling_angles_right(w[(r, c)], w[(r, c + 1)]);
                apply_t_adjoint_right(&mut w, c, theta, phi);
                right_ops.push(TOp { m: c, theta, phi });
            }
        } else {
            for j in 1..=d {
                let r = n + j - d - 1;
                let c = j - 1;
                let m = r - 1;
                let (theta, phi) = nulling_angles_left(w[(r, c)], w[(m, c)]);
                apply_t_left(&mut w, m, theta, phi);
                left_ops.push(TOp { m, theta, phi });
            }
        }
    }

    let mut psi: Vec<f64> = (0..n).map(|i| w[(i, i)].arg()).collect();

    // The sweep leaves T_L,p ⋯ T_L,1 · U · T_R,1† ⋯ T_R,q† = D, so
    // U = T_L,1† ⋯ T_L,p† · D · T_R,q ⋯ T_R,1. Each adjoint left factor is
    // commuted through the diagonal via
    //   T(θ, φ)† · diag(ψ_m, ψ_{m+1}) = diag(ψ_{m+1} − φ − π, ψ_{m+1}) · T(θ, ψ_m − ψ_{m+1} + π),
    // processed innermost first. A θ = 0 factor is itself diagonal and is
    // folded into D directly, which keeps degenerate inputs at zero phases.
    let mut converted: Vec<TOp> = Vec::with_capacity(left_ops.len());
    for op in left_ops.into_iter().rev() {
        if op.theta == 0.0 {
            psi[op.m] -= op.phi;
            converted.push(TOp { m: op.m, theta: 0.0, phi: 0.0 });
        } else {
            let phi_new = wrap_angle(psi[op.m] - psi[op.m + 1] + PI);
            psi[op.m] = psi[op.m + 1] - op.phi - PI;
            converted.push(TOp { m: op.m, theta: op.theta, phi: phi_new });
        }
    }

    // Application order: all right factors (in generation order), then the
    // converted left factors (innermost first).
    let mut ops = right_ops;
    ops.extend(converted);
    let layers = schedule_layers(n, ops)?;
    let mesh = ClementsMesh { dim: n, layers, output_phases: PhaseVector::new(psi) };
    mesh.validate()?;
    Ok(mesh)
}

/// Greedy earliest-layer scheduling of an application-ordered coupling
/// sequence, respecting mode dependencies and layer parity (even layers
/// take even `m`). Relative order of non-commuting couplings is preserved,
/// so the layered product equals the sequential product.
fn schedule_layers(dim: usize, ops: Vec<TOp>) -> Result<Vec<Vec<TOp>>> {
    let mut last_layer = vec![-1i64; dim];
    let mut layers: Vec<Vec<TOp>> = Vec::new();
    for op in ops {
        if op.m + 1 >= dim {
            return Err(Error::Mesh(format!(
                "coupling at m = {} does not fit dimension {dim}",
                op.m
            )));
        }
        let earliest = last_layer[op.m].max(last_layer[op.m + 1]) + 1;
        let mut k = earliest.max(0) as usize;
        if k % 2 != op.m % 2 {
            k += 1;
        }
        while layers.len() <= k {
            layers.push(Vec::new());
        }
        last_layer[op.m] = k as i64;
        last_layer[op.m + 1] = k as i64;
        layers[k].push(op);
    }
    for layer in &mut layers {
        layer.sort_by_key(|op| op.m);
    }
    while layers.last().is_some_and(|l| l.is_empty()) {
        layers.pop();
    }
    if layers.iter().any(|l| l.is_empty()) {
        return Err(Error::Mesh("scheduling produced an interior empty layer".into()));
    }
    Ok(layers)
}

/// The application-ordered mode sequence the nulling sweep produces,
/// used to build dense reference layouts.
fn canonical_op_sequence(dim: usize) -> Vec<usize> {
    let mut seq = Vec::with_capacity(dim * (dim.saturating_sub(1)) / 2);
    let mut left_ms = Vec::new();
    for d in 1..dim {
        if d % 2 == 1 {
            for j in 0..d {
                seq.push(d - 1 - j);
            }
        } else {
            for j in 1..=d {
                left_ms.push(dim + j - d - 2);
            }
        }
    }
    seq.extend(left_ms.into_iter().rev());
    seq
}
