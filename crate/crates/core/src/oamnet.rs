//! Networks that realise a 2^n-dimensional unitary on pure OAM states
//! ℓ = 1..2^n.
//!
//! The input interface is a cascade of OAM sorters: stage s routes by the
//! residue of ℓ mod 2^s, so after n−1 stages the OAM states sit on
//! 2^{n−1} paths with ℓ and ℓ + 2^{n−1} sharing path (ℓ−1) mod 2^{n−1}.
//! A spiral phase plate on path i then shifts both OAM numbers by
//! −(2^{n−2}+i+1), leaving every path with the pair ±2^{n−2}. The hybrid
//! unit acts on that space with L = 2^{n−2}, and a mirror-image output
//! stage (inverse shifts, reversed cascade) restores the OAM labels.

use serde_json::{json, Value};

use crate::clements;
use crate::error::{Error, Result};
use crate::hybrid::{self, HybridNetlist};
use crate::jsonio;
use crate::matcore::{default_unitarity_tol, CMatrix};
use crate::photosim::SimBasis;

/// One OAM sorter: routes its input wire onto one of two output wires by
/// the residue class of ℓ mod 2^stage. Stage-1 sorters route by parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SorterNode {
    pub stage: usize,
    pub input_path: usize,
    pub output_paths: (usize, usize),
    pub modulus: u64,
}

impl SorterNode {
    /// Output wire for OAM ℓ: bit (stage − 1) of ℓ − 1 selects the branch.
    pub fn route(&self, ell: i64) -> Result<usize> {
        if ell < 1 {
            return Err(Error::Basis(format!(
                "sorter at stage {} received OAM {ell}, expected a positive number",
                self.stage
            )));
        }
        let bit = ((ell - 1) >> (self.stage - 1)) & 1;
        Ok(if bit == 0 { self.output_paths.0 } else { self.output_paths.1 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SppSide {
    Input,
    Output,
}

/// Spiral phase plate on one path, adding `shift` to the OAM number.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SppElement {
    pub path: usize,
    pub shift: i64,
    pub position: SppSide,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OamStats {
    pub spp_count: usize,
    pub sorter_count: usize,
    pub swap_count: usize,
    pub obs_count: usize,
}

/// Full pure-OAM network: interface in, input plates, hybrid unit,
/// output plates, mirror interface out.
#[derive(Clone, Debug, PartialEq)]
pub struct OamNetlist {
    pub n: usize,
    pub dim: usize,
    /// Dimension of the unitary before any ⊕-identity padding.
    pub padded_from: usize,
    pub interface_in: Vec<SorterNode>,
    pub spp_in: Vec<SppElement>,
    pub unit: HybridNetlist,
    pub spp_out: Vec<SppElement>,
    pub interface_out: Vec<SorterNode>,
    pub stats: OamStats,
}

/// Path that OAM ℓ reaches after the full cascade: (ℓ−1) mod 2^{n−1}.
pub fn interface_route(n: usize, ell: i64) -> Result<usize> {
    if n < 1 {
        return Err(Error::Domain("interface_route requires n >= 1".into()));
    }
    let dim = 1i64 << n;
    if !(1..=dim).contains(&ell) {
        return Err(Error::Domain(format!(
            "OAM {ell} outside the encoded range 1..={dim}"
        )));
    }
    Ok(((ell - 1) as usize) % (1usize << (n - 1)))
}

/// The cascade: stage s holds 2^{s−1} sorters, 2^{n−1} − 1 nodes in total.
pub fn build_interface(n: usize) -> Result<Vec<SorterNode>> {
    if n < 2 {
        return Err(Error::Domain(
            "a 2-dimensional OAM space needs no interface; build_interface requires n >= 2".into(),
        ));
    }
    let mut nodes = Vec::with_capacity((1usize << (n - 1)) - 1);
    for stage in 1..n {
        let span = 1usize << (stage - 1);
        for j in 0..span {
            nodes.push(SorterNode {
                stage,
                input_path: j,
                output_paths: (j, j + span),
                modulus: 1u64 << stage,
            });
        }
    }
    Ok(nodes)
}

/// Walk one OAM value through the cascade node by node. This is the
/// brute-force routing used to cross-check `interface_route`.
pub fn route_through(nodes: &[SorterNode], n: usize, ell: i64) -> Result<usize> {
    if n < 2 {
        return Err(Error::Domain("route_through requires n >= 2".into()));
    }
    let dim = 1i64 << n;
    if !(1..=dim).contains(&ell) {
        return Err(Error::Domain(format!(
            "OAM {ell} outside the encoded range 1..={dim}"
        )));
    }
    let mut wire = 0usize;
    for stage in 1..n {
        let node = nodes
            .iter()
            .find(|nd| nd.stage == stage && nd.input_path == wire)
            .ok_or_else(|| {
                Error::Netlist(format!("no sorter with input wire {wire} at stage {stage}"))
            })?;
        wire = node.route(ell)?;
    }
    Ok(wire)
}

/// Magnitude of the plate shift on path i: 2^{n−2} + i + 1, which sends the
/// pair {i+1, i+1+2^{n−1}} exactly onto {−2^{n−2}, +2^{n−2}}.
pub fn spp_shift_magnitude(n: usize, path: usize) -> i64 {
    (1i64 << (n - 2)) + path as i64 + 1
}

/// Map OAM basis index o (OAM number ℓ = o + 1) to the hybrid unit's
/// logical index under the interface + plate relabeling.
pub fn oam_to_logical(n: usize) -> Result<Vec<usize>> {
    if n < 2 {
        return Err(Error::Domain("oam_to_logical requires n >= 2".into()));
    }
    let dim = 1usize << n;
    let half = dim / 2;
    let l_mag = 1i64 << (n - 2);
    let enc = hybrid::encode(1usize << (n - 2), l_mag)?;
    (0..dim)
        .map(|o| {
            let (path, ell) = if o < half { (o, -l_mag) } else { (o - half, l_mag) };
            enc.index_of(path, ell)
        })
        .collect()
}

/// Full-space permutation matrix of one plate over an explicit basis:
/// ℓ ↦ ℓ + shift on the plate's path, identity elsewhere.
///
/// A translation restricted to a finite tracked set leaves each shift
/// chain's last value without a target; those chain ends wrap back to the
/// start of their chain, which keeps the matrix a permutation and makes
/// oppositely signed plates exact inverses. A network simulation never
/// puts amplitude on the wrapped entries.
pub fn spp_matrix(spp: &SppElement, basis: &SimBasis) -> Result<CMatrix> {
    let one = num_complex::Complex64::new(1.0, 0.0);
    let d = basis.dim();
    let mut m = CMatrix::zeros(d);
    let on_path: std::collections::HashSet<i64> = basis
        .labels()
        .iter()
        .filter(|&&(p, _)| p == spp.path)
        .map(|&(_, ell)| ell)
        .collect();
    for (i, &(path, ell)) in basis.labels().iter().enumerate() {
        if path != spp.path || spp.shift == 0 {
            m[(i, i)] = one;
            continue;
        }
        let target = if on_path.contains(&(ell + spp.shift)) {
            ell + spp.shift
        } else {
            // chain end: wrap to the chain's first tracked value
            let mut start = ell;
            while on_path.contains(&(start - spp.shift)) {
                start -= spp.shift;
            }
            start
        };
        let j = basis.position(path, target)?;
        m[(j, i)] = one;
    }
    if m.unitarity_residual() > 1e-12 {
        return Err(Error::Basis(format!(
            "plate shift {} is not a bijection of the tracked OAM set on path {}",
            spp.shift, spp.path
        )));
    }
    Ok(m)
}

/// Compile a 2^n-dimensional unitary (n ≥ 2) into the pure-OAM network.
///
/// The unitary is conjugated by the permutation that the interface and
/// plates induce between OAM order and the unit's logical order, then
/// compiled by the hybrid stage with L = 2^{n−2}.
pub fn compile_oam(u: &CMatrix) -> Result<OamNetlist> {
    let dim = u.dim();
    if dim < 4 || !dim.is_power_of_two() {
        return Err(Error::Domain(format!(
            "pure-OAM compilation needs a power-of-two dimension of at least 4, got {dim}; \
             pad the unitary with pad_unitary first"
        )));
    }
    let tol = default_unitarity_tol(dim);
    let residual = u.unitarity_residual();
    if residual > tol {
        return Err(Error::NotUnitary { residual, tol });
    }
    let n = dim.trailing_zeros() as usize;
    let half = dim / 2;
    let l_mag = 1i64 << (n - 2);

    let to_logical = oam_to_logical(n)?;
    let mut v = CMatrix::zeros(dim);
    for o1 in 0..dim {
        for o2 in 0..dim {
            v[(to_logical[o1], to_logical[o2])] = u[(o1, o2)];
        }
    }
    let unit = hybrid::compile(&clements::decompose(&v)?, l_mag)?;

    let interface_in = build_interface(n)?;
    let interface_out = build_interface(n)?;
    let spp_in: Vec<SppElement> = (0..half)
        .map(|i| SppElement { path: i, shift: -spp_shift_magnitude(n, i), position: SppSide::Input })
        .collect();
    let spp_out: Vec<SppElement> = (0..half)
        .map(|i| SppElement { path: i, shift: spp_shift_magnitude(n, i), position: SppSide::Output })
        .collect();
    let stats = OamStats {
        spp_count: spp_in.len() + spp_out.len(),
        sorter_count: interface_in.len() + interface_out.len(),
        swap_count: unit.stats.swap_count,
        obs_count: unit.stats.obs_count,
    };
    Ok(OamNetlist {
        n,
        dim,
        padded_from: dim,
        interface_in,
        spp_in,
        unit,
        spp_out,
        interface_out,
        stats,
    })
}

impl OamNetlist {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.dim != 1usize << self.n {
            return Err(Error::Netlist(format!(
                "dimension {} does not equal 2^n for n = {}",
                self.dim, self.n
            )));
        }
        if self.padded_from > self.dim {
            return Err(Error::Netlist(format!(
                "padded_from {} exceeds dimension {}",
                self.padded_from, self.dim
            )));
        }
        let half = self.dim / 2;
        let l_mag = 1i64 << (self.n - 2);
        self.unit.validate()?;
        if self.unit.dim != self.dim || self.unit.l_mag != l_mag {
            return Err(Error::Netlist(format!(
                "unit (dim {}, L {}) does not match the network (dim {}, L {l_mag})",
                self.unit.dim, self.unit.l_mag, self.dim
            )));
        }
        let reference = build_interface(self.n)?;
        for (name, iface) in [("interface_in", &self.interface_in), ("interface_out", &self.interface_out)] {
            if iface != &reference {
                return Err(Error::Netlist(format!(
                    "{name} is not the canonical {}-stage cascade",
                    self.n - 1
                )));
            }
        }
        for (name, spps, sign, side) in [
            ("spp_in", &self.spp_in, -1i64, SppSide::Input),
            ("spp_out", &self.spp_out, 1i64, SppSide::Output),
        ] {
            if spps.len() != half {
                return Err(Error::Netlist(format!(
                    "{name} has {} plates, expected {half}",
                    spps.len()
                )));
            }
            for (i, spp) in spps.iter().enumerate() {
                let expected = sign * spp_shift_magnitude(self.n, i);
                if spp.path != i || spp.shift != expected || spp.position != side {
                    return Err(Error::Netlist(format!(
                        "{name}[{i}] must shift path {i} by {expected}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "kind": "oam",
            "n": self.n,
            "dim": self.dim,
            "padded_from": self.padded_from,
            "interface_in": sorters_to_value(&self.interface_in),
            "spp_in": spps_to_value(&self.spp_in),
            "unit": self.unit.to_value(),
            "spp_out": spps_to_value(&self.spp_out),
            "interface_out": sorters_to_value(&self.interface_out),
            "stats": json!({
                "spp_count": self.stats.spp_count,
                "sorter_count": self.stats.sorter_count,
                "swap_count": self.stats.swap_count,
                "obs_count": self.stats.obs_count,
            }),
        })
    }

    pub fn from_value(value: &Value) -> Result<OamNetlist> {
        let obj = jsonio::as_object(value, "netlist")?;
        let kind = jsonio::get_str(obj, "kind", "netlist")?;
        if kind != "oam" {
            return Err(Error::parse("netlist.kind", format!("expected \"oam\", got \"{kind}\"")));
        }
        let n = jsonio::get_usize(obj, "n", "netlist")?;
        let dim = jsonio::get_usize(obj, "dim", "netlist")?;
        let padded_from = jsonio::get_usize(obj, "padded_from", "netlist")?;
        let interface_in = sorters_from_value(jsonio::get(obj, "interface_in", "netlist")?, "netlist.interface_in")?;
        let interface_out = sorters_from_value(jsonio::get(obj, "interface_out", "netlist")?, "netlist.interface_out")?;
        let spp_in = spps_from_value(jsonio::get(obj, "spp_in", "netlist")?, "netlist.spp_in")?;
        let spp_out = spps_from_value(jsonio::get(obj, "spp_out", "netlist")?, "netlist.spp_out")?;
        let unit = HybridNetlist::from_value(jsonio::get(obj, "unit", "netlist")?)?;
        let stats_obj = jsonio::as_object(jsonio::get(obj, "stats", "netlist")?, "netlist.stats")?;
        let stats = OamStats {
            spp_count: jsonio::get_usize(stats_obj, "spp_count", "netlist.stats")?,
            sorter_count: jsonio::get_usize(stats_obj, "sorter_count", "netlist.stats")?,
            swap_count: jsonio::get_usize(stats_obj, "swap_count", "netlist.stats")?,
            obs_count: jsonio::get_usize(stats_obj, "obs_count", "netlist.stats")?,
        };
        let net = OamNetlist {
            n,
            dim,
            padded_from,
            interface_in,
            spp_in,
            unit,
            spp_out,
            interface_out,
            stats,
        };
        net.validate()?;
        let recount = OamStats {
            spp_count: net.spp_in.len() + net.spp_out.len(),
            sorter_count: net.interface_in.len() + net.interface_out.len(),
            swap_count: net.unit.stats.swap_count,
            obs_count: net.unit.stats.obs_count,
        };
        if recount != net.stats {
            return Err(Error::parse(
                "netlist.stats",
                "declared statistics do not match the element lists",
            ));
        }
        Ok(net)
    }
}

fn sorters_to_value(nodes: &[SorterNode]) -> Value {
    Value::Array(
        nodes
            .iter()
            .map(|nd| {
                json!({
                    "stage": nd.stage,
                    "input_path": nd.input_path,
                    "output_paths": [nd.output_paths.0, nd.output_paths.1],
                    "modulus": nd.modulus,
                })
            })
            .collect(),
    )
}

fn sorters_from_value(value: &Value, ctx: &str) -> Result<Vec<SorterNode>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::parse(ctx, "expected an array"))?;
    let mut nodes = Vec::with_capacity(arr.len());
    for (i, v) in arr.iter().enumerate() {
        let nctx = format!("{ctx}[{i}]");
        let obj = jsonio::as_object(v, &nctx)?;
        let outs = jsonio::get_array(obj, "output_paths", &nctx)?;
        if outs.len() != 2 {
            return Err(Error::parse(
                jsonio::join(&nctx, "output_paths"),
                "expected exactly two output paths",
            ));
        }
        let out0 = outs[0]
            .as_u64()
            .ok_or_else(|| Error::parse(format!("{nctx}.output_paths[0]"), "expected an integer"))?;
        let out1 = outs[1]
            .as_u64()
            .ok_or_else(|| Error::parse(format!("{nctx}.output_paths[1]"), "expected an integer"))?;
        let stage = jsonio::get_usize(obj, "stage", &nctx)?;
        if stage == 0 {
            return Err(Error::parse(jsonio::join(&nctx, "stage"), "stages are numbered from 1"));
        }
        nodes.push(SorterNode {
            stage,
            input_path: jsonio::get_usize(obj, "input_path", &nctx)?,
            output_paths: (out0 as usize, out1 as usize),
            modulus: jsonio::get_i64(obj, "modulus", &nctx)? as u64,
        });
    }
    Ok(nodes)
}

fn spps_to_value(spps: &[SppElement]) -> Value {
    Value::Array(
        spps.iter()
            .map(|s| {
                json!({
                    "path": s.path,
                    "shift": s.shift,
                    "position": match s.position {
                        SppSide::Input => "input",
                        SppSide::Output => "output",
                    },
                })
            })
            .collect(),
    )
}

fn spps_from_value(value: &Value, ctx: &str) -> Result<Vec<SppElement>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::parse(ctx, "expected an array"))?;
    let mut spps = Vec::with_capacity(arr.len());
    for (i, v) in arr.iter().enumerate() {
        let sctx = format!("{ctx}[{i}]");
        let obj = jsonio::as_object(v, &sctx)?;
        let position = match jsonio::get_str(obj, "position", &sctx)? {
            "input" => SppSide::Input,
            "output" => SppSide::Output,
            other => {
                return Err(Error::parse(
                    jsonio::join(&sctx, "position"),
                    format!("unknown side \"{other}\""),
                ))
            }
        };
        spps.push(SppElement {
            path: jsonio::get_usize(obj, "path", &sctx)?,
            shift: jsonio::get_i64(obj, "shift", &sctx)?,
            position,
        });
    }
    Ok(spps)
}
