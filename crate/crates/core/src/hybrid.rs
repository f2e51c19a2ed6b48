//! Compilation of a 4n-dimensional rectangular mesh onto the path-OAM
//! hybrid space: 2n paths that each carry the two OAM states ±L.
//!
//! Logical mode q lives on a (path, OAM) label per subspace k = 1..n:
//!
//! ```text
//! |4k−4⟩ ≡ |2k−2, +L⟩    |4k−3⟩ ≡ |2k−1, +L⟩
//! |4k−2⟩ ≡ |2k−2, −L⟩    |4k−1⟩ ≡ |2k−1, −L⟩
//! ```
//!
//! Under this encoding the two couplings of an Ω1 layer that act inside a
//! subspace address the same path pair at opposite OAM signs, so one
//! OAM-dependent beam splitter (OBS) realises both at once. An Ω2 layer is
//! realised in two steps inside a single swap bracket: OAM swaps on every
//! even path, step-1 splitters active at +L on even/odd path pairs, step-2
//! splitters active at −L on odd/even pairs, and inverse swaps. Interior
//! swap pairs between the steps cancel, which is why one bracket suffices.
//!
//! An OBS is an interferometer whose two phases are set by a phase shifter
//! plus a dove prism, making them linear in the OAM number:
//! φ_ℓ = α₁ + 2β₁ℓ and 2θ_ℓ = α₂ + 2β₂ℓ. Solving at ℓ = ±L gives the
//! calibration in [`synthesize_obs`]; [`obs_forward`] evaluates the model
//! at any ℓ (a third OAM state sees the linearly dependent operation).
//!
//! A swap-conjugated splitter reproduces the mesh coupling with its phase
//! attached to the other logical mode of the pair, so the compiler carries
//! a diagonal gauge through the layers and absorbs it into the final
//! per-path phase shifters; the compiled netlist reconstructs the mesh
//! product exactly, global phase included.

use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::clements::{ClementsMesh, TOp};
use crate::error::{Error, Result};
use crate::jsonio;
use crate::matcore::{wrap_angle, CMatrix};

/// Bijection between logical indices 0..4n−1 and (path, ±L) labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogicalEncoding {
    n: usize,
    l_mag: i64,
}

/// Subspace count, path count 2n, dimension 4n, OAM magnitude L.
pub fn encode(n: usize, l_mag: i64) -> Result<LogicalEncoding> {
    if n == 0 {
        return Err(Error::Domain("encoding requires at least one subspace".into()));
    }
    if l_mag < 1 {
        return Err(Error::Domain("OAM magnitude must be a positive integer".into()));
    }
    Ok(LogicalEncoding { n, l_mag })
}

impl LogicalEncoding {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn paths(&self) -> usize {
        2 * self.n
    }

    pub fn l_mag(&self) -> i64 {
        self.l_mag
    }

    /// (path, ℓ) label of logical index `q`.
    pub fn label_of(&self, q: usize) -> (usize, i64) {
        assert!(q < self.dim(), "logical index {q} out of range");
        let k = q / 4;
        let r = q % 4;
        let path = 2 * k + (r & 1);
        let ell = if r < 2 { self.l_mag } else { -self.l_mag };
        (path, ell)
    }

    /// Logical index of a (path, ℓ) label.
    pub fn index_of(&self, path: usize, ell: i64) -> Result<usize> {
        if path >= self.paths() {
            return Err(Error::Domain(format!(
                "path {path} out of range for {} paths",
                self.paths()
            )));
        }
        if ell.abs() != self.l_mag {
            return Err(Error::Domain(format!(
                "OAM {ell} is not ±{} for this encoding",
                self.l_mag
            )));
        }
        let k = path / 2;
        let r = (path & 1) + if ell > 0 { 0 } else { 2 };
        Ok(4 * k + r)
    }
}

/// Requested splitting operation for one OAM branch of an OBS.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchTarget {
    pub theta: f64,
    pub phi: f64,
}

impl BranchTarget {
    pub const IDENTITY: BranchTarget = BranchTarget { theta: 0.0, phi: 0.0 };
}

/// Calibrated OAM-dependent beam splitter on adjacent paths (a, a+1).
///
/// `alpha1`/`alpha2` are phase-shifter settings, `beta1`/`beta2` dove-prism
/// orientations; the realised branch angles are φ_ℓ = α₁ + 2β₁ℓ and
/// 2θ_ℓ = α₂ + 2β₂ℓ, with the φ phase attached to path `path_a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObsParams {
    pub path_a: usize,
    pub path_b: usize,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub l_mag: i64,
}

/// Per-path OAM swap ℓ → −ℓ; `inverse` distinguishes S from S† in the
/// netlist even though both have the same matrix action.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapGate {
    pub path: usize,
    pub l_mag: i64,
    pub inverse: bool,
}

/// Per-path phase shifter + dove prism: phase α + 2βℓ on OAM ℓ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OamPhaseShifter {
    pub path: usize,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    Obs(ObsParams),
    Swap(SwapGate),
    Phase(OamPhaseShifter),
}

/// Element census of a hybrid netlist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElementStats {
    pub obs_count: usize,
    pub swap_count: usize,
    pub phase_count: usize,
    /// Maximum number of OBS structures traversed along any path.
    pub optical_depth: usize,
    /// N(N−1)/2 interferometers a pure path-encoded mesh would need.
    pub clements_mzi_count: usize,
    pub mzi_reduction: i64,
}

/// Ordered physical elements realising a 4n-dimensional unitary on 2n
/// paths carrying OAM ±L. Elements apply in list order.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridNetlist {
    pub n: usize,
    pub dim: usize,
    pub l_mag: i64,
    /// Dimension of the unitary before any ⊕-identity padding.
    pub padded_from: usize,
    pub elements: Vec<Element>,
    pub stats: ElementStats,
}

/// Solve the phase-shifter/dove-prism settings that realise `plus` at
/// ℓ = +L and `minus` at ℓ = −L:
/// α₁ = (φ₊+φ₋)/2, β₁ = (φ₊−φ₋)/(4L), α₂ = (2θ₊+2θ₋)/2, β₂ = (2θ₊−2θ₋)/(4L).
pub fn synthesize_obs(
    plus: BranchTarget,
    minus: BranchTarget,
    path_a: usize,
    l_mag: i64,
) -> ObsParams {
    let l = l_mag as f64;
    ObsParams {
        path_a,
        path_b: path_a + 1,
        alpha1: 0.5 * (plus.phi + minus.phi),
        beta1: (plus.phi - minus.phi) / (4.0 * l),
        alpha2: plus.theta + minus.theta,
        beta2: (plus.theta - minus.theta) / (2.0 * l),
        l_mag,
    }
}

/// Branch angles an OBS realises at OAM ℓ, both raw (linear model output)
/// and wrapped into the canonical ranges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObsResponse {
    pub theta: f64,
    pub phi: f64,
    pub canonical_theta: f64,
    pub canonical_phi: f64,
}

/// Evaluate the linear dove-prism model: φ_ℓ = α₁ + 2β₁ℓ, θ_ℓ = (α₂ + 2β₂ℓ)/2.
pub fn obs_forward(params: &ObsParams, ell: i64) -> ObsResponse {
    let ellf = ell as f64;
    let phi = params.alpha1 + 2.0 * params.beta1 * ellf;
    let theta = 0.5 * (params.alpha2 + 2.0 * params.beta2 * ellf);
    ObsResponse {
        theta,
        phi,
        canonical_theta: wrap_angle(theta),
        canonical_phi: wrap_angle(phi),
    }
}

/// Embed a unitary in a larger space as `U ⊕ I`.
pub fn pad_unitary(u: &CMatrix, target_dim: usize) -> Result<CMatrix> {
    let d = u.dim();
    if target_dim < d {
        return Err(Error::Domain(format!(
            "cannot pad dimension {d} down to {target_dim}"
        )));
    }
    if target_dim == d {
        return Ok(u.clone());
    }
    let mut p = CMatrix::identity(target_dim);
    for r in 0..d {
        for c in 0..d {
            p[(r, c)] = u[(r, c)];
        }
    }
    Ok(p)
}

/// Next multiple of 4 at or above `dim` (the hybrid compiler's dimension).
pub fn hybrid_target_dim(dim: usize) -> usize {
    dim.div_ceil(4) * 4
}

// Diagonal gauge carried through the layers. Each mesh coupling
// R(θ, φ) on logical pair (q, q+1) is rewritten against the incoming
// per-mode phases (δ1, δ2) so that the physically realisable block comes
// first and a new diagonal trails on the left, to be absorbed either by
// later layers or by the final phase shifters.
//
// Blocks whose phase lands on the first logical mode (Ω1 branches, Ω2
// step 2) keep the R form:
//   R(θ, φ)·diag(δ1, δ2) = diag(δ2, δ2)·R(θ, φ + δ1 − δ2)
// Step-1 couplings are realised through the swap bracket, which attaches
// the phase to the second logical mode (the block [[c, e^{iχ}s], [−s, e^{iχ}c]]):
//   R(θ, φ)·diag(δ1, δ2) = diag(φ+δ1, φ+δ1+π)·[[c, e^{iχ}s], [−s, e^{iχ}c]],
//   χ = π − φ + δ2 − δ1.
fn gauge_phase_on_first(delta: &mut [f64], q: usize, op: &TOp) -> BranchTarget {
    let phi = wrap_angle(op.phi + delta[q] - delta[q + 1]);
    delta[q] = delta[q + 1];
    BranchTarget { theta: op.theta, phi }
}

fn gauge_phase_on_second(delta: &mut [f64], q: usize, op: &TOp) -> BranchTarget {
    let chi = wrap_angle(PI - op.phi + delta[q + 1] - delta[q]);
    let lead = wrap_angle(op.phi + delta[q]);
    delta[q] = lead;
    delta[q + 1] = wrap_angle(lead + PI);
    BranchTarget { theta: op.theta, phi: chi }
}

/// Compile a 4n-dimensional mesh into the hybrid netlist.
///
/// Per mesh layer, in application order:
/// - Ω1: one OBS per subspace, fusing the couplings at m = 4k−4 (+L branch)
///   and m = 4k−2 (−L branch) onto paths (2k−2, 2k−1).
/// - Ω2: swaps on every even path, step-1 OBSes on paths (2k−2, 2k−1)
///   active at +L realising logical pairs (4k−3, 4k−2), step-2 OBSes on
///   paths (2k−1, 2k) active at −L realising pairs (4k−1, 4k), inverse
///   swaps on every even path.
///
/// The mesh output phases plus the accumulated gauge become one OAM
/// phase shifter per path at the end of the list.
pub fn compile(mesh: &ClementsMesh, l_mag: i64) -> Result<HybridNetlist> {
    mesh.validate()?;
    if mesh.dim % 4 != 0 || mesh.dim == 0 {
        return Err(Error::Domain(format!(
            "hybrid compilation needs a dimension that is a multiple of 4, got {}; \
             pad the unitary with pad_unitary first",
            mesh.dim
        )));
    }
    let n = mesh.dim / 4;
    let enc = encode(n, l_mag)?;
    let mut delta = vec![0.0f64; mesh.dim];
    let mut elements: Vec<Element> = Vec::new();

    for (k, layer) in mesh.layers.iter().enumerate() {
        let mut slot: Vec<Option<&TOp>> = vec![None; mesh.dim];
        for op in layer {
            slot[op.m] = Some(op);
        }
        if k % 2 == 0 {
            for k0 in 0..n {
                let op_plus = slot[4 * k0];
                let op_minus = slot[4 * k0 + 2];
                if op_plus.is_none() && op_minus.is_none() {
                    continue;
                }
                let plus = op_plus
                    .map(|op| gauge_phase_on_first(&mut delta, 4 * k0, op))
                    .unwrap_or(BranchTarget::IDENTITY);
                let minus = op_minus
                    .map(|op| gauge_phase_on_first(&mut delta, 4 * k0 + 2, op))
                    .unwrap_or(BranchTarget::IDENTITY);
                elements.push(Element::Obs(synthesize_obs(plus, minus, 2 * k0, l_mag)));
            }
        } else {
            for p in (0..2 * n).step_by(2) {
                elements.push(Element::Swap(SwapGate { path: p, l_mag, inverse: false }));
            }
            for k0 in 0..n {
                if let Some(op) = slot[4 * k0 + 1] {
                    let plus = gauge_phase_on_second(&mut delta, 4 * k0 + 1, op);
                    elements.push(Element::Obs(synthesize_obs(
                        plus,
                        BranchTarget::IDENTITY,
                        2 * k0,
                        l_mag,
                    )));
                }
            }
            for k0 in 0..n.saturating_sub(1) {
                if let Some(op) = slot[4 * k0 + 3] {
                    let minus = gauge_phase_on_first(&mut delta, 4 * k0 + 3, op);
                    elements.push(Element::Obs(synthesize_obs(
                        BranchTarget::IDENTITY,
                        minus,
                        2 * k0 + 1,
                        l_mag,
                    )));
                }
            }
            for p in (0..2 * n).step_by(2) {
                elements.push(Element::Swap(SwapGate { path: p, l_mag, inverse: true }));
            }
        }
    }

    for p in 0..2 * n {
        let q_plus = enc.index_of(p, l_mag)?;
        let q_minus = enc.index_of(p, -l_mag)?;
        let psi_plus = wrap_angle(mesh.output_phases.get(q_plus) + delta[q_plus]);
        let psi_minus = wrap_angle(mesh.output_phases.get(q_minus) + delta[q_minus]);
        elements.push(Element::Phase(OamPhaseShifter {
            path: p,
            alpha: 0.5 * (psi_plus + psi_minus),
            beta: (psi_plus - psi_minus) / (4.0 * l_mag as f64),
        }));
    }

    let stats = compute_stats(&elements, mesh.dim, 2 * n);
    Ok(HybridNetlist {
        n,
        dim: mesh.dim,
        l_mag,
        padded_from: mesh.dim,
        elements,
        stats,
    })
}

fn compute_stats(elements: &[Element], dim: usize, paths: usize) -> ElementStats {
    let mut obs_count = 0;
    let mut swap_count = 0;
    let mut phase_count = 0;
    let mut traversals = vec![0usize; paths];
    for e in elements {
        match e {
            Element::Obs(obs) => {
                obs_count += 1;
                if obs.path_a < paths {
                    traversals[obs.path_a] += 1;
                }
                if obs.path_b < paths {
                    traversals[obs.path_b] += 1;
                }
            }
            Element::Swap(_) => swap_count += 1,
            Element::Phase(_) => phase_count += 1,
        }
    }
    let clements_mzi_count = dim * dim.saturating_sub(1) / 2;
    ElementStats {
        obs_count,
        swap_count,
        phase_count,
        optical_depth: traversals.into_iter().max().unwrap_or(0),
        clements_mzi_count,
        mzi_reduction: clements_mzi_count as i64 - obs_count as i64,
    }
}

/// Recount a netlist's element census from its element list.
pub fn stats_of(netlist: &HybridNetlist) -> ElementStats {
    compute_stats(&netlist.elements, netlist.dim, 2 * netlist.n)
}

impl HybridNetlist {
    pub fn encoding(&self) -> Result<LogicalEncoding> {
        encode(self.n, self.l_mag)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.dim != 4 * self.n {
            return Err(Error::Netlist(format!(
                "dimension {} does not equal 4n for n = {}",
                self.dim, self.n
            )));
        }
        if self.l_mag < 1 {
            return Err(Error::Netlist("OAM magnitude must be positive".into()));
        }
        if self.padded_from > self.dim {
            return Err(Error::Netlist(format!(
                "padded_from {} exceeds dimension {}",
                self.padded_from, self.dim
            )));
        }
        let paths = 2 * self.n;
        let mut swapped = vec![false; paths];
        for (i, e) in self.elements.iter().enumerate() {
            match e {
                Element::Obs(obs) => {
                    if obs.path_b != obs.path_a + 1 || obs.path_b >= paths {
                        return Err(Error::Netlist(format!(
                            "element {i}: OBS paths ({}, {}) are not adjacent within 0..{paths}",
                            obs.path_a, obs.path_b
                        )));
                    }
                    for x in [obs.alpha1, obs.beta1, obs.alpha2, obs.beta2] {
                        if !x.is_finite() {
                            return Err(Error::Netlist(format!(
                                "element {i}: non-finite OBS parameter"
                            )));
                        }
                    }
                }
                Element::Swap(s) => {
                    if s.path >= paths {
                        return Err(Error::Netlist(format!(
                            "element {i}: swap path {} out of range",
                            s.path
                        )));
                    }
                    swapped[s.path] = !swapped[s.path];
                }
                Element::Phase(p) => {
                    if p.path >= paths {
                        return Err(Error::Netlist(format!(
                            "element {i}: phase-shifter path {} out of range",
                            p.path
                        )));
                    }
                    if !p.alpha.is_finite() || !p.beta.is_finite() {
                        return Err(Error::Netlist(format!(
                            "element {i}: non-finite phase parameter"
                        )));
                    }
                }
            }
        }
        if let Some(p) = swapped.iter().position(|&s| s) {
            return Err(Error::Netlist(format!(
                "swaps on path {p} are unbalanced at the end of the list"
            )));
        }
        Ok(())
    }

    /// Netlist JSON: `{"kind": "hybrid", "n", "dim", "L", "padded_from",
    /// "elements": [...], "stats": {...}}`, elements in application order.
    pub fn to_value(&self) -> Value {
        let elements: Vec<Value> = self.elements.iter().map(element_to_value).collect();
        json!({
            "kind": "hybrid",
            "n": self.n,
            "dim": self.dim,
            "L": self.l_mag,
            "padded_from": self.padded_from,
            "elements": elements,
            "stats": stats_to_value(&self.stats),
        })
    }

    pub fn from_value(value: &Value) -> Result<HybridNetlist> {
        let obj = jsonio::as_object(value, "netlist")?;
        let kind = jsonio::get_str(obj, "kind", "netlist")?;
        if kind != "hybrid" {
            return Err(Error::parse("netlist.kind", format!("expected \"hybrid\", got \"{kind}\"")));
        }
        let n = jsonio::get_usize(obj, "n", "netlist")?;
        let dim = jsonio::get_usize(obj, "dim", "netlist")?;
        let l_mag = jsonio::get_i64(obj, "L", "netlist")?;
        let padded_from = jsonio::get_usize(obj, "padded_from", "netlist")?;
        let elements_v = jsonio::get_array(obj, "elements", "netlist")?;
        let mut elements = Vec::with_capacity(elements_v.len());
        for (i, ev) in elements_v.iter().enumerate() {
            elements.push(element_from_value(ev, &format!("netlist.elements[{i}]"))?);
        }
        let netlist = HybridNetlist {
            n,
            dim,
            l_mag,
            padded_from,
            elements,
            stats: ElementStats {
                obs_count: 0,
                swap_count: 0,
                phase_count: 0,
                optical_depth: 0,
                clements_mzi_count: 0,
                mzi_reduction: 0,
            },
        };
        netlist.validate()?;
        let stats = stats_of(&netlist);
        let declared = stats_from_value(jsonio::get(obj, "stats", "netlist")?, "netlist.stats")?;
        if declared != stats {
            return Err(Error::parse(
                "netlist.stats",
                "declared statistics do not match the element list",
            ));
        }
        Ok(HybridNetlist { stats, ..netlist })
    }
}

pub(crate) fn element_to_value(e: &Element) -> Value {
    match e {
        Element::Obs(o) => json!({
            "type": "obs",
            "path_a": o.path_a,
            "path_b": o.path_b,
            "alpha1": o.alpha1,
            "beta1": o.beta1,
            "alpha2": o.alpha2,
            "beta2": o.beta2,
            "L": o.l_mag,
        }),
        Element::Swap(s) => json!({
            "type": "swap",
            "path": s.path,
            "L": s.l_mag,
            "inverse": s.inverse,
        }),
        Element::Phase(p) => json!({
            "type": "phase",
            "path": p.path,
            "alpha": p.alpha,
            "beta": p.beta,
        }),
    }
}

pub(crate) fn element_from_value(value: &Value, ctx: &str) -> Result<Element> {
    let obj = jsonio::as_object(value, ctx)?;
    match jsonio::get_str(obj, "type", ctx)? {
        "obs" => Ok(Element::Obs(ObsParams {
            path_a: jsonio::get_usize(obj, "path_a", ctx)?,
            path_b: jsonio::get_usize(obj, "path_b", ctx)?,
            alpha1: jsonio::get_f64(obj, "alpha1", ctx)?,
            beta1: jsonio::get_f64(obj, "beta1", ctx)?,
            alpha2: jsonio::get_f64(obj, "alpha2", ctx)?,
            beta2: jsonio::get_f64(obj, "beta2", ctx)?,
            l_mag: jsonio::get_i64(obj, "L", ctx)?,
        })),
        "swap" => Ok(Element::Swap(SwapGate {
            path: jsonio::get_usize(obj, "path", ctx)?,
            l_mag: jsonio::get_i64(obj, "L", ctx)?,
            inverse: jsonio::get_bool(obj, "inverse", ctx)?,
        })),
        "phase" => Ok(Element::Phase(OamPhaseShifter {
            path: jsonio::get_usize(obj, "path", ctx)?,
            alpha: jsonio::get_f64(obj, "alpha", ctx)?,
            beta: jsonio::get_f64(obj, "beta", ctx)?,
        })),
        other => Err(Error::parse(
            jsonio::join(ctx, "type"),
            format!("unknown element type \"{other}\""),
        )),
    }
}

pub(crate) fn stats_to_value(s: &ElementStats) -> Value {
    json!({
        "obs_count": s.obs_count,
        "swap_count": s.swap_count,
        "phase_count": s.phase_count,
        "optical_depth": s.optical_depth,
        "clements_mzi_count": s.clements_mzi_count,
        "mzi_reduction": s.mzi_reduction,
    })
}

pub(crate) fn stats_from_value(value: &Value, ctx: &str) -> Result<ElementStats> {
    let obj = jsonio::as_object(value, ctx)?;
    Ok(ElementStats {
        obs_count: jsonio::get_usize(obj, "obs_count", ctx)?,
        swap_count: jsonio::get_usize(obj, "swap_count", ctx)?,
        phase_count: jsonio::get_usize(obj, "phase_count", ctx)?,
        optical_depth: jsonio::get_usize(obj, "optical_depth", ctx)?,
        clements_mzi_count: jsonio::get_usize(obj, "clements_mzi_count", ctx)?,
        mzi_reduction: jsonio::get_i64(obj, "mzi_reduction", ctx)?,
    })
}
