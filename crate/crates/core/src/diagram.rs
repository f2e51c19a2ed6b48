//! Plain-text layout diagrams: one row per path (or mode), one column per
//! element, with glyphs for splitters, swaps, phase shifters, plates, and
//! sorters. Output is deterministic for a given input.

use crate::clements::ClementsMesh;
use crate::hybrid::{Element, HybridNetlist};
use crate::oamnet::{OamNetlist, SorterNode, SppElement};
use crate::photosim::Netlist;

const CELL: &str = "---";

fn mark(rows: &mut [String], row: usize, glyph: char) {
    let cell: String = format!("-{glyph}-");
    rows[row].push_str(&cell);
}

fn skip(rows: &mut [String], except: &[usize]) {
    for (i, row) in rows.iter_mut().enumerate() {
        if !except.contains(&i) {
            row.push_str(CELL);
        }
    }
}

fn path_grid(paths: usize, prefix: &str) -> Vec<String> {
    (0..paths).map(|p| format!("{prefix} {p:>2} ")).collect()
}

/// Mesh layout: `*` marks the two modes of each splitting operation,
/// one column per layer slot.
pub fn render_mesh(mesh: &ClementsMesh) -> String {
    let mut rows = path_grid(mesh.dim, "mode");
    for layer in &mesh.layers {
        for op in layer {
            mark(&mut rows, op.m, '*');
            mark(&mut rows, op.m + 1, '*');
            skip(&mut rows, &[op.m, op.m + 1]);
        }
    }
    let mut out = format!("mesh: dim {} ({} couplings, {} layers)\n", mesh.dim, mesh.op_count(), mesh.layers.len());
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str("legend: * = two-mode splitting operation (phase layer omitted)\n");
    out
}

/// Hybrid netlist layout: `X` = OBS on a path pair, `S`/`s` = swap and
/// inverse swap, `P` = OAM phase shifter.
pub fn render_hybrid(net: &HybridNetlist) -> String {
    let paths = 2 * net.n;
    let mut rows = path_grid(paths, "path");
    for element in &net.elements {
        match element {
            Element::Obs(obs) => {
                mark(&mut rows, obs.path_a, 'X');
                mark(&mut rows, obs.path_b, 'X');
                skip(&mut rows, &[obs.path_a, obs.path_b]);
            }
            Element::Swap(sw) => {
                mark(&mut rows, sw.path, if sw.inverse { 's' } else { 'S' });
                skip(&mut rows, &[sw.path]);
            }
            Element::Phase(ph) => {
                mark(&mut rows, ph.path, 'P');
                skip(&mut rows, &[ph.path]);
            }
        }
    }
    let s = &net.stats;
    let mut out = format!(
        "hybrid netlist: dim {} (n = {}), OAM pair ±{}\n",
        net.dim, net.n, net.l_mag
    );
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str("legend: X = OAM-dependent beam splitter, S/s = OAM swap and inverse, P = OAM phase shifter\n");
    out.push_str(&format!(
        "counts: obs {} | swaps {} | phases {} | depth {} | mesh interferometers {} | saved {}\n",
        s.obs_count, s.swap_count, s.phase_count, s.optical_depth, s.clements_mzi_count, s.mzi_reduction
    ));
    out
}

fn render_sorters(out: &mut String, nodes: &[SorterNode]) {
    for node in nodes {
        out.push_str(&format!(
            "  stage {}: > wire {} -> ({}, {})  [mod {}]\n",
            node.stage, node.input_path, node.output_paths.0, node.output_paths.1, node.modulus
        ));
    }
}

fn render_spps(out: &mut String, spps: &[SppElement]) {
    for spp in spps {
        out.push_str(&format!(
            "  path {}: @ shift {}{}\n",
            spp.path,
            if spp.shift >= 0 { "+" } else { "" },
            spp.shift
        ));
    }
}

/// Pure-OAM network layout: sorter cascade, plates, the embedded unit, and
/// the mirror output stage.
pub fn render_oam(net: &OamNetlist) -> String {
    let mut out = format!(
        "oam netlist: dim {} (n = {}), unit on {} paths with OAM pair ±{}\n",
        net.dim,
        net.n,
        2 * net.unit.n,
        net.unit.l_mag
    );
    out.push_str("interface in (> = OAM sorter):\n");
    render_sorters(&mut out, &net.interface_in);
    out.push_str("plates in (@ = spiral phase plate):\n");
    render_spps(&mut out, &net.spp_in);
    out.push_str("unit:\n");
    for line in render_hybrid(&net.unit).lines() {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("plates out:\n");
    render_spps(&mut out, &net.spp_out);
    out.push_str("interface out (mirror cascade, traversed in reverse):\n");
    render_sorters(&mut out, &net.interface_out);
    out.push_str(&format!(
        "counts: plates {} | sorters {} | swaps {} | obs {}\n",
        net.stats.spp_count, net.stats.sorter_count, net.stats.swap_count, net.stats.obs_count
    ));
    out
}

pub fn render_netlist(net: &Netlist) -> String {
    match net {
        Netlist::Hybrid(h) => render_hybrid(h),
        Netlist::Oam(o) => render_oam(o),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clements::decompose;
    use crate::hybrid::compile;
    use crate::matcore::haar_random_unitary;

    #[test]
    fn hybrid_diagram_is_deterministic_and_marked() {
        let u = haar_random_unitary(8, 60).unwrap();
        let net = compile(&decompose(&u).unwrap(), 1).unwrap();
        let a = render_hybrid(&net);
        let b = render_hybrid(&net);
        assert_eq!(a, b);
        assert!(a.contains('X') && a.contains('S') && a.contains('s') && a.contains('P'));
        assert_eq!(a.lines().filter(|l| l.starts_with("path")).count(), 4);
    }

    #[test]
    fn mesh_diagram_rows_match_dim() {
        let u = haar_random_unitary(5, 61).unwrap();
        let mesh = decompose(&u).unwrap();
        let d = render_mesh(&mesh);
        assert_eq!(d.lines().filter(|l| l.starts_with("mode")).count(), 5);
        assert!(d.contains('*'));
    }

    #[test]
    fn oam_diagram_names_every_section() {
        let u = haar_random_unitary(8, 62).unwrap();
        let net = crate::oamnet::compile_oam(&u).unwrap();
        let d = render_oam(&net);
        for needle in ["interface in", "plates in", "unit:", "plates out", "interface out", "counts:"] {
            assert!(d.contains(needle), "missing {needle}");
        }
    }
}
