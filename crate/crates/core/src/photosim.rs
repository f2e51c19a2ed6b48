//! Netlist simulation and verification.
//!
//! Two independent strategies reconstruct a hybrid netlist's unitary: the
//! primary route multiplies full-space element matrices in application
//! order, and [`propagate_states`] pushes each basis vector through the
//! elements directly (amplitude updates, no matrices). The second is the
//! oracle for the first. Pure-OAM networks are simulated by tracking
//! (wire, ℓ) labels through the sorter cascade, the plates, and the
//! embedded unit.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hybrid::{self, obs_forward, Element, HybridNetlist, LogicalEncoding};
use crate::jsonio;
use crate::matcore::{frobenius_distance, CMatrix};
use crate::oamnet::{OamNetlist, SorterNode, SppElement};

/// Ordered (path, ℓ) labels defining matrix row/column meaning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimBasis {
    labels: Vec<(usize, i64)>,
    index: HashMap<(usize, i64), usize>,
}

impl SimBasis {
    pub fn new(labels: Vec<(usize, i64)>) -> Result<SimBasis> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &label) in labels.iter().enumerate() {
            if index.insert(label, i).is_some() {
                return Err(Error::Basis(format!(
                    "duplicate label (path {}, OAM {})",
                    label.0, label.1
                )));
            }
        }
        Ok(SimBasis { labels, index })
    }

    /// Labels in logical-encoding order for a hybrid netlist.
    pub fn hybrid(enc: &LogicalEncoding) -> SimBasis {
        let labels: Vec<(usize, i64)> = (0..enc.dim()).map(|q| enc.label_of(q)).collect();
        SimBasis::new(labels).expect("logical encoding is a bijection")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[(usize, i64)] {
        &self.labels
    }

    pub fn position(&self, path: usize, ell: i64) -> Result<usize> {
        self.index.get(&(path, ell)).copied().ok_or_else(|| {
            Error::Basis(format!("label (path {path}, OAM {ell}) is not in the basis"))
        })
    }
}

/// Full-space unitary of one netlist element over the given basis.
///
/// An OBS contributes the R(θ_ℓ, φ_ℓ) block on (path_a, ℓ), (path_b, ℓ)
/// for every ℓ the basis carries on path_a, with the e^{iφ} column on
/// path_a; a swap transposes (path, +L) and (path, −L); a phase shifter is
/// diagonal e^{i(α + 2βℓ)} on its path.
pub fn element_matrix(element: &Element, basis: &SimBasis) -> Result<CMatrix> {
    let mut m = CMatrix::identity(basis.dim());
    match element {
        Element::Obs(obs) => {
            for (i, &(path, ell)) in basis.labels().iter().enumerate() {
                if path != obs.path_a {
                    continue;
                }
                let j = basis.position(obs.path_b, ell)?;
                let r = obs_forward(obs, ell);
                let (c, s) = (r.theta.cos(), r.theta.sin());
                let e = C64::from_polar(1.0, r.phi);
                m[(i, i)] = e * c;
                m[(i, j)] = C64::new(-s, 0.0);
                m[(j, i)] = e * s;
                m[(j, j)] = C64::new(c, 0.0);
            }
        }
        Element::Swap(sw) => {
            let i = basis.position(sw.path, sw.l_mag)?;
            let j = basis.position(sw.path, -sw.l_mag)?;
            m[(i, i)] = C64::new(0.0, 0.0);
            m[(j, j)] = C64::new(0.0, 0.0);
            m[(i, j)] = C64::new(1.0, 0.0);
            m[(j, i)] = C64::new(1.0, 0.0);
        }
        Element::Phase(ph) => {
            for (i, &(path, ell)) in basis.labels().iter().enumerate() {
                if path == ph.path {
                    m[(i, i)] = C64::from_polar(1.0, ph.alpha + 2.0 * ph.beta * ell as f64);
                }
            }
        }
    }
    Ok(m)
}

/// Ordered product E_K ⋯ E_1 of element matrices over the hybrid basis.
pub fn simulate_hybrid(netlist: &HybridNetlist) -> Result<CMatrix> {
    netlist.validate()?;
    let basis = SimBasis::hybrid(&netlist.encoding()?);
    let mut acc = CMatrix::identity(basis.dim());
    for element in &netlist.elements {
        acc = element_matrix(element, &basis)?.mul(&acc);
    }
    Ok(acc)
}

fn apply_element_to_state(
    element: &Element,
    basis: &SimBasis,
    state: &mut [C64],
) -> Result<()> {
    match element {
        Element::Obs(obs) => {
            for (i, &(path, ell)) in basis.labels().iter().enumerate() {
                if path != obs.path_a {
                    continue;
                }
                let j = basis.position(obs.path_b, ell)?;
                let r = obs_forward(obs, ell);
                let (c, s) = (r.theta.cos(), r.theta.sin());
                let e = C64::from_polar(1.0, r.phi);
                let (x, y) = (state[i], state[j]);
                state[i] = e * c * x - s * y;
                state[j] = e * s * x + c * y;
            }
        }
        Element::Swap(sw) => {
            let i = basis.position(sw.path, sw.l_mag)?;
            let j = basis.position(sw.path, -sw.l_mag)?;
            state.swap(i, j);
        }
        Element::Phase(ph) => {
            for (i, &(path, ell)) in basis.labels().iter().enumerate() {
                if path == ph.path {
                    state[i] *= C64::from_polar(1.0, ph.alpha + 2.0 * ph.beta * ell as f64);
                }
            }
        }
    }
    Ok(())
}

/// Oracle route: apply each element's action to every basis state vector,
/// column by column, without building element matrices.
pub fn propagate_states(netlist: &HybridNetlist) -> Result<CMatrix> {
    netlist.validate()?;
    let basis = SimBasis::hybrid(&netlist.encoding()?);
    let dim = basis.dim();
    let mut out = CMatrix::zeros(dim);
    for q in 0..dim {
        let mut state = vec![C64::new(0.0, 0.0); dim];
        state[q] = C64::new(1.0, 0.0);
        for element in &netlist.elements {
            apply_element_to_state(element, &basis, &mut state)?;
        }
        for (r, amp) in state.into_iter().enumerate() {
            out[(r, q)] = amp;
        }
    }
    Ok(out)
}

fn permute_rows(a: &CMatrix, perm: &[usize]) -> CMatrix {
    CMatrix::from_fn(a.dim(), |r, c| a[(perm[r], c)])
}

fn assert_distinct(labels: &[(usize, i64)], stage: &str) -> Result<()> {
    let mut seen = HashMap::new();
    for &l in labels {
        if seen.insert(l, ()).is_some() {
            return Err(Error::Basis(format!(
                "label collision on (path {}, OAM {}) after {stage}",
                l.0, l.1
            )));
        }
    }
    Ok(())
}

fn forward_sorter_stage(
    labels: &mut [(usize, i64)],
    nodes: &[SorterNode],
    stage: usize,
) -> Result<()> {
    for label in labels.iter_mut() {
        let (wire, ell) = *label;
        match nodes.iter().find(|nd| nd.stage == stage && nd.input_path == wire) {
            Some(node) => *label = (node.route(ell)?, ell),
            None => {
                return Err(Error::Netlist(format!(
                    "no sorter with input wire {wire} at stage {stage}"
                )))
            }
        }
    }
    Ok(())
}

fn backward_sorter_stage(
    labels: &mut [(usize, i64)],
    nodes: &[SorterNode],
    stage: usize,
) -> Result<()> {
    let span = 1usize << (stage - 1);
    for label in labels.iter_mut() {
        let (wire, ell) = *label;
        let input = wire % span;
        let node = nodes
            .iter()
            .find(|nd| nd.stage == stage && nd.input_path == input)
            .ok_or_else(|| {
                Error::Netlist(format!("no sorter with input wire {input} at stage {stage}"))
            })?;
        if node.route(ell)? != wire {
            return Err(Error::Basis(format!(
                "OAM {ell} cannot arrive on wire {wire} at output stage {stage}"
            )));
        }
        *label = (input, ell);
    }
    Ok(())
}

fn apply_spps(labels: &mut [(usize, i64)], spps: &[SppElement]) -> Result<()> {
    for spp in spps {
        for label in labels.iter_mut() {
            if label.0 == spp.path {
                label.1 += spp.shift;
            }
        }
    }
    Ok(())
}

/// Simulate the full pure-OAM element chain: cascade in, plates, unit,
/// plates, cascade out. Rows and columns are the OAM basis ℓ = 1..2^n.
pub fn simulate_oam(netlist: &OamNetlist) -> Result<CMatrix> {
    netlist.validate()?;
    let dim = netlist.dim;
    let mut labels: Vec<(usize, i64)> = (1..=dim as i64).map(|ell| (0usize, ell)).collect();
    let mut a = CMatrix::identity(dim);

    for stage in 1..netlist.n {
        forward_sorter_stage(&mut labels, &netlist.interface_in, stage)?;
        assert_distinct(&labels, &format!("input stage {stage}"))?;
    }
    apply_spps(&mut labels, &netlist.spp_in)?;
    assert_distinct(&labels, "input plates")?;

    // align rows with the unit's logical order
    let enc = netlist.unit.encoding()?;
    let mut perm = Vec::with_capacity(dim);
    for q in 0..dim {
        let target = enc.label_of(q);
        let row = labels.iter().position(|&l| l == target).ok_or_else(|| {
            Error::Basis(format!(
                "unit expects label (path {}, OAM {}) which never arrives",
                target.0, target.1
            ))
        })?;
        perm.push(row);
    }
    a = permute_rows(&a, &perm);
    labels = (0..dim).map(|q| enc.label_of(q)).collect();

    let v = simulate_hybrid(&netlist.unit)?;
    a = v.mul(&a);

    apply_spps(&mut labels, &netlist.spp_out)?;
    assert_distinct(&labels, "output plates")?;
    for stage in (1..netlist.n).rev() {
        backward_sorter_stage(&mut labels, &netlist.interface_out, stage)?;
        assert_distinct(&labels, &format!("output stage {stage}"))?;
    }

    let mut perm = Vec::with_capacity(dim);
    for ell in 1..=dim as i64 {
        let row = labels.iter().position(|&l| l == (0, ell)).ok_or_else(|| {
            Error::Basis(format!("OAM {ell} did not return to the output port"))
        })?;
        perm.push(row);
    }
    Ok(permute_rows(&a, &perm))
}

/// Either netlist kind, as parsed from artifact JSON by its `kind` tag.
#[derive(Clone, Debug, PartialEq)]
pub enum Netlist {
    Hybrid(HybridNetlist),
    Oam(OamNetlist),
}

impl Netlist {
    pub fn dim(&self) -> usize {
        match self {
            Netlist::Hybrid(h) => h.dim,
            Netlist::Oam(o) => o.dim,
        }
    }

    pub fn padded_from(&self) -> usize {
        match self {
            Netlist::Hybrid(h) => h.padded_from,
            Netlist::Oam(o) => o.padded_from,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Netlist::Hybrid(_) => "hybrid",
            Netlist::Oam(_) => "oam",
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Netlist::Hybrid(h) => h.to_value(),
            Netlist::Oam(o) => o.to_value(),
        }
    }

    pub fn from_value(value: &Value) -> Result<Netlist> {
        let obj = jsonio::as_object(value, "netlist")?;
        match jsonio::get_str(obj, "kind", "netlist")? {
            "hybrid" => Ok(Netlist::Hybrid(HybridNetlist::from_value(value)?)),
            "oam" => Ok(Netlist::Oam(OamNetlist::from_value(value)?)),
            other => Err(Error::parse(
                "netlist.kind",
                format!("unknown netlist kind \"{other}\""),
            )),
        }
    }
}

/// Reconstructed unitary of either netlist kind.
pub fn simulate(netlist: &Netlist) -> Result<CMatrix> {
    match netlist {
        Netlist::Hybrid(h) => simulate_hybrid(h),
        Netlist::Oam(o) => simulate_oam(o),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformanceRow {
    pub law: String,
    pub expected: i64,
    pub actual: i64,
    pub pass: bool,
}

fn law(name: &str, expected: i64, actual: i64) -> ConformanceRow {
    ConformanceRow { law: name.to_string(), expected, actual, pass: expected == actual }
}

/// Element census carried by a verification report.
#[derive(Clone, Debug, PartialEq)]
pub enum CountsReport {
    Hybrid(hybrid::ElementStats),
    Oam(crate::oamnet::OamStats),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub frobenius_error: f64,
    pub fidelity: f64,
    pub counts: CountsReport,
    pub conformance: Vec<ConformanceRow>,
    pub dim: usize,
}

impl VerificationReport {
    pub fn conformance_passed(&self) -> bool {
        self.conformance.iter().all(|row| row.pass)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.frobenius_error <= tol && self.conformance_passed()
    }

    pub fn to_value(&self) -> Value {
        let counts = match &self.counts {
            CountsReport::Hybrid(s) => hybrid::stats_to_value(s),
            CountsReport::Oam(s) => json!({
                "spp_count": s.spp_count,
                "sorter_count": s.sorter_count,
                "swap_count": s.swap_count,
                "obs_count": s.obs_count,
            }),
        };
        json!({
            "frobenius_error": self.frobenius_error,
            "fidelity": self.fidelity,
            "counts": counts,
            "conformance": self.conformance.iter().map(|row| json!({
                "law": row.law,
                "expected": row.expected,
                "actual": row.actual,
                "pass": row.pass,
            })).collect::<Vec<Value>>(),
            "dim": self.dim,
        })
    }
}

fn hybrid_conformance(net: &HybridNetlist) -> Vec<ConformanceRow> {
    let n = net.n as i64;
    let s = hybrid::stats_of(net);
    let expected_depth = if n >= 2 { 6 * n } else { 4 };
    vec![
        law("obs_count = 6n^2 - 2n", 6 * n * n - 2 * n, s.obs_count as i64),
        law("swap_count = 4n^2", 4 * n * n, s.swap_count as i64),
        law("phase_count = 2n", 2 * n, s.phase_count as i64),
        law("clements_mzi_count = 2n(4n - 1)", 2 * n * (4 * n - 1), s.clements_mzi_count as i64),
        law("mzi_reduction = 2n^2", 2 * n * n, s.mzi_reduction),
        law("optical_depth = 6n (4 at n = 1)", expected_depth, s.optical_depth as i64),
    ]
}

fn oam_conformance(net: &OamNetlist) -> Vec<ConformanceRow> {
    let n = net.n as u32;
    let s = &net.stats;
    vec![
        law("spp_count = 2^n", 1i64 << n, s.spp_count as i64),
        law("sorter_count = 2^n - 2", (1i64 << n) - 2, s.sorter_count as i64),
        law("swap_count = 2^(2n-2)", 1i64 << (2 * n - 2), s.swap_count as i64),
        law(
            "obs_count = 3*2^(2n-3) - 2^(n-1)",
            3 * (1i64 << (2 * n - 3)) - (1i64 << (n - 1)),
            s.obs_count as i64,
        ),
    ]
}

/// Simulate a netlist and compare it against a reference unitary.
///
/// If the netlist was compiled from a padded input (`padded_from` below its
/// dimension), a reference of the original size is padded with the identity
/// before comparison. Fidelity is |tr(U†V)|/N; the error is the exact
/// Frobenius distance including global phase.
pub fn verify(netlist: &Netlist, reference: &CMatrix) -> Result<VerificationReport> {
    let sim = simulate(netlist)?;
    let dim = sim.dim();
    let reference = if reference.dim() == dim {
        reference.clone()
    } else if reference.dim() == netlist.padded_from() && netlist.padded_from() < dim {
        hybrid::pad_unitary(reference, dim)?
    } else {
        return Err(Error::Dimension(format!(
            "reference dimension {} matches neither the netlist dimension {dim} nor its \
             pre-padding dimension {}",
            reference.dim(),
            netlist.padded_from()
        )));
    };
    let frobenius_error = frobenius_distance(&sim, &reference)?;
    let fidelity = (reference.hs_inner(&sim).norm() / dim as f64).min(1.0);
    let (counts, conformance) = match netlist {
        Netlist::Hybrid(h) => (CountsReport::Hybrid(hybrid::stats_of(h)), hybrid_conformance(h)),
        Netlist::Oam(o) => (CountsReport::Oam(o.stats), oam_conformance(o)),
    };
    Ok(VerificationReport { frobenius_error, fidelity, counts, conformance, dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clements::decompose;
    use crate::hybrid::{compile, synthesize_obs, BranchTarget, ObsParams, OamPhaseShifter, SwapGate};
    use crate::matcore::haar_random_unitary;
    use std::f64::consts::PI;

    fn hybrid_basis_n1() -> SimBasis {
        SimBasis::hybrid(&hybrid::encode(1, 1).unwrap())
    }

    #[test]
    fn swap_exchanges_logical_zero_and_two() {
        let basis = hybrid_basis_n1();
        let m = element_matrix(
            &Element::Swap(SwapGate { path: 0, l_mag: 1, inverse: false }),
            &basis,
        )
        .unwrap();
        let mut expected = CMatrix::zeros(4);
        expected[(0, 2)] = C64::new(1.0, 0.0);
        expected[(2, 0)] = C64::new(1.0, 0.0);
        expected[(1, 1)] = C64::new(1.0, 0.0);
        expected[(3, 3)] = C64::new(1.0, 0.0);
        assert_eq!(frobenius_distance(&m, &expected).unwrap(), 0.0);
    }

    #[test]
    fn swap_squares_to_identity() {
        let basis = hybrid_basis_n1();
        let m = element_matrix(
            &Element::Swap(SwapGate { path: 1, l_mag: 1, inverse: false }),
            &basis,
        )
        .unwrap();
        let sq = m.mul(&m);
        assert!(frobenius_distance(&sq, &CMatrix::identity(4)).unwrap() < 1e-15);
    }

    #[test]
    fn identity_calibrated_obs_is_identity() {
        let basis = hybrid_basis_n1();
        let obs = synthesize_obs(BranchTarget::IDENTITY, BranchTarget::IDENTITY, 0, 1);
        let m = element_matrix(&Element::Obs(obs), &basis).unwrap();
        assert!(frobenius_distance(&m, &CMatrix::identity(4)).unwrap() < 1e-15);
    }

    #[test]
    fn obs_active_only_at_plus_one() {
        let basis = hybrid_basis_n1();
        let obs = synthesize_obs(
            BranchTarget { theta: PI / 4.0, phi: 0.0 },
            BranchTarget::IDENTITY,
            0,
            1,
        );
        let m = element_matrix(&Element::Obs(obs), &basis).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // real rotation on logical (0, 1), identity on (2, 3)
        assert!((m[(0, 0)] - C64::new(r, 0.0)).norm() < 1e-12);
        assert!((m[(0, 1)] - C64::new(-r, 0.0)).norm() < 1e-12);
        assert!((m[(1, 0)] - C64::new(r, 0.0)).norm() < 1e-12);
        assert!((m[(1, 1)] - C64::new(r, 0.0)).norm() < 1e-12);
        assert!((m[(2, 2)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((m[(3, 3)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(m[(2, 3)].norm() < 1e-15 && m[(3, 2)].norm() < 1e-15);
    }

    #[test]
    fn phase_shifter_is_oam_dependent_diagonal() {
        let basis = hybrid_basis_n1();
        let ph = OamPhaseShifter { path: 1, alpha: 0.3, beta: 0.2 };
        let m = element_matrix(&Element::Phase(ph), &basis).unwrap();
        assert!((m[(1, 1)] - C64::from_polar(1.0, 0.3 + 0.4)).norm() < 1e-15);
        assert!((m[(3, 3)] - C64::from_polar(1.0, 0.3 - 0.4)).norm() < 1e-15);
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn element_matrices_are_unitary() {
        let u = haar_random_unitary(8, 31).unwrap();
        let net = compile(&decompose(&u).unwrap(), 1).unwrap();
        let basis = SimBasis::hybrid(&net.encoding().unwrap());
        for e in &net.elements {
            let m = element_matrix(e, &basis).unwrap();
            assert!(m.unitarity_residual() < 1e-12 * 8.0);
        }
    }

    #[test]
    fn empty_netlist_simulates_to_identity() {
        let net = HybridNetlist {
            n: 1,
            dim: 4,
            l_mag: 1,
            padded_from: 4,
            elements: vec![],
            stats: hybrid::ElementStats {
                obs_count: 0,
                swap_count: 0,
                phase_count: 0,
                optical_depth: 0,
                clements_mzi_count: 6,
                mzi_reduction: 6,
            },
        };
        let m = simulate_hybrid(&net).unwrap();
        assert_eq!(frobenius_distance(&m, &CMatrix::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn swap_then_inverse_is_identity() {
        let net = HybridNetlist {
            n: 1,
            dim: 4,
            l_mag: 1,
            padded_from: 4,
            elements: vec![
                Element::Swap(SwapGate { path: 0, l_mag: 1, inverse: false }),
                Element::Swap(SwapGate { path: 0, l_mag: 1, inverse: true }),
            ],
            stats: hybrid::ElementStats {
                obs_count: 0,
                swap_count: 2,
                phase_count: 0,
                optical_depth: 0,
                clements_mzi_count: 6,
                mzi_reduction: 6,
            },
        };
        let m = simulate_hybrid(&net).unwrap();
        assert!(frobenius_distance(&m, &CMatrix::identity(4)).unwrap() < 1e-15);
    }

    #[test]
    fn compiled_netlist_reproduces_the_unitary() {
        let u = haar_random_unitary(8, 32).unwrap();
        let net = compile(&decompose(&u).unwrap(), 1).unwrap();
        let sim = simulate_hybrid(&net).unwrap();
        let err = frobenius_distance(&sim, &u).unwrap();
        assert!(err < 1e-7 * 8.0, "reconstruction error {err}");
    }

    #[test]
    fn matrix_product_route_matches_state_propagation() {
        for (dim, seed) in [(4usize, 41u64), (8, 42)] {
            let u = haar_random_unitary(dim, seed).unwrap();
            let net = compile(&decompose(&u).unwrap(), 1).unwrap();
            let a = simulate_hybrid(&net).unwrap();
            let b = propagate_states(&net).unwrap();
            assert!(frobenius_distance(&a, &b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn partial_products_compose_to_the_full_product() {
        let u = haar_random_unitary(4, 43).unwrap();
        let net = compile(&decompose(&u).unwrap(), 1).unwrap();
        let basis = SimBasis::hybrid(&net.encoding().unwrap());
        let full = simulate_hybrid(&net).unwrap();
        for cut in 0..=net.elements.len() {
            let mut head = CMatrix::identity(4);
            for e in &net.elements[..cut] {
                head = element_matrix(e, &basis).unwrap().mul(&head);
            }
            let mut tail = CMatrix::identity(4);
            for e in &net.elements[cut..] {
                tail = element_matrix(e, &basis).unwrap().mul(&tail);
            }
            let prod = tail.mul(&head);
            assert!(frobenius_distance(&prod, &full).unwrap() < 1e-12 * 4.0);
        }
    }

    #[test]
    fn verify_against_own_simulation() {
        let u = haar_random_unitary(8, 44).unwrap();
        let net = Netlist::Hybrid(compile(&decompose(&u).unwrap(), 1).unwrap());
        let report = verify(&net, &u).unwrap();
        assert!((report.fidelity - 1.0).abs() < 1e-9);
        assert!(report.frobenius_error < 1e-7 * 8.0);
        assert!(report.conformance_passed());
        assert!(report.passed(1e-6));
    }

    #[test]
    fn verify_reports_dim_twelve_conformance() {
        let u = haar_random_unitary(12, 45).unwrap();
        let net = Netlist::Hybrid(compile(&decompose(&u).unwrap(), 1).unwrap());
        let report = verify(&net, &u).unwrap();
        let by_law: std::collections::HashMap<&str, (i64, i64, bool)> = report
            .conformance
            .iter()
            .map(|r| (r.law.as_str(), (r.expected, r.actual, r.pass)))
            .collect();
        assert_eq!(by_law["obs_count = 6n^2 - 2n"], (48, 48, true));
        assert_eq!(by_law["swap_count = 4n^2"], (36, 36, true));
        assert_eq!(by_law["optical_depth = 6n (4 at n = 1)"], (18, 18, true));
        assert_eq!(by_law["mzi_reduction = 2n^2"], (18, 18, true));
    }

    #[test]
    fn corrupted_obs_is_reported_not_thrown() {
        let u = haar_random_unitary(4, 46).unwrap();
        let mut net = compile(&decompose(&u).unwrap(), 1).unwrap();
        for e in net.elements.iter_mut() {
            if let Element::Obs(obs) = e {
                obs.alpha2 += 0.3;
                break;
            }
        }
        let report = verify(&Netlist::Hybrid(net), &u).unwrap();
        assert!(report.fidelity < 1.0);
        assert!(report.frobenius_error > 1e-3);
        assert!(!report.passed(1e-6));
        // counts are untouched, so the laws still hold
        assert!(report.conformance_passed());
    }

    #[test]
    fn report_json_has_the_expected_shape() {
        let u = haar_random_unitary(4, 47).unwrap();
        let net = Netlist::Hybrid(compile(&decompose(&u).unwrap(), 1).unwrap());
        let report = verify(&net, &u).unwrap();
        let v = report.to_value();
        assert!(v["frobenius_error"].is_f64());
        assert!(v["fidelity"].is_f64());
        assert!(v["counts"]["obs_count"].is_u64());
        assert!(v["conformance"].as_array().unwrap().len() == 6);
        assert_eq!(v["dim"], json!(4));
    }

    #[test]
    fn oam_chain_simulation_reproduces_the_unitary() {
        let u = haar_random_unitary(8, 48).unwrap();
        let net = crate::oamnet::compile_oam(&u).unwrap();
        let sim = simulate_oam(&net).unwrap();
        let err = frobenius_distance(&sim, &u).unwrap();
        assert!(err < 1e-7 * 8.0, "reconstruction error {err}");
        let report = verify(&Netlist::Oam(net), &u).unwrap();
        assert!(report.conformance_passed());
    }

    #[test]
    fn sandwich_with_empty_unit_is_the_identity() {
        let u = haar_random_unitary(8, 49).unwrap();
        let mut net = crate::oamnet::compile_oam(&u).unwrap();
        net.unit.elements.clear();
        net.unit.stats = hybrid::stats_of(&net.unit);
        net.stats.swap_count = 0;
        net.stats.obs_count = 0;
        let sim = simulate_oam(&net).unwrap();
        assert!(frobenius_distance(&sim, &CMatrix::identity(8)).unwrap() < 1e-12);
    }
}
