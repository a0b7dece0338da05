//! Fronthaul transfer requirements and the three delivery strategies.

mod graph;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use graph::{
    build_conflict_graph, greedy_color, is_decodable, optimal_color_bruteforce, Coloring,
    ConflictGraph, Graph, Vertex, BRUTE_FORCE_VERTEX_CAP,
};

use crate::cache::CacheState;
use crate::error::{Error, Result};
use crate::model::Demand;

/// Subfile `(file, subfile)`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Packet {
    pub file: usize,
    pub subfile: usize,
}

/// Fronthaul delivery strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Unicast,
    Multicast,
    Coded,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Unicast, Strategy::Multicast, Strategy::Coded];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Unicast => "unicast",
            Strategy::Multicast => "multicast",
            Strategy::Coded => "coded",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unicast" => Ok(Strategy::Unicast),
            "multicast" => Ok(Strategy::Multicast),
            "coded" => Ok(Strategy::Coded),
            other => Err(Error::param(
                "strategy",
                format!("unknown strategy {other:?}"),
            )),
        }
    }
}

/// The transfer variables d^i_{f,l}: which EN must receive which subfile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryRequirement {
    transfers: BTreeSet<(usize, usize, usize)>,
    demand: Demand,
    serving: Vec<Vec<usize>>,
}

impl DeliveryRequirement {
    /// Triples `(EN, file, subfile)` with d = 1, in lexicographic order.
    pub fn transfers(&self) -> &BTreeSet<(usize, usize, usize)> {
        &self.transfers
    }

    pub fn demand(&self) -> &Demand {
        &self.demand
    }

    pub fn serving(&self) -> &[Vec<usize>] {
        &self.serving
    }

    pub fn is_empty(&self) -> bool {
        self.transfers.is_empty()
    }

    /// Distinct packets appearing in the requirement.
    pub fn distinct_packets(&self) -> BTreeSet<Packet> {
        self.transfers
            .iter()
            .map(|&(_, file, subfile)| Packet { file, subfile })
            .collect()
    }
}

/// EN `i` needs subfile `(f_k, l)` whenever it serves UE `k` and does not
/// cache that subfile. `serving[k-1]` lists the ENs serving UE `k`.
pub fn compute_requirements(
    cache: &CacheState,
    demand: &Demand,
    serving: &[Vec<usize>],
) -> DeliveryRequirement {
    let mut transfers = BTreeSet::new();
    for (k, ens) in serving.iter().enumerate() {
        let f = demand.file_of(k + 1);
        for &i in ens {
            for l in 1..=cache.subfiles() {
                if !cache.has(i, f, l) {
                    transfers.insert((i, f, l));
                }
            }
        }
    }
    DeliveryRequirement {
        transfers,
        demand: demand.clone(),
        serving: serving.to_vec(),
    }
}

/// Bits carried on the fronthaul by one strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FronthaulLoad {
    pub strategy: Strategy,
    /// S_B in bits.
    pub bits: f64,
    /// Number of subfile-sized transmissions; for coded multicast this is
    /// the number of coded subfiles n_sub.
    pub transmissions: usize,
}

fn load(strategy: Strategy, transmissions: usize, subfile_bits: f64) -> FronthaulLoad {
    FronthaulLoad {
        strategy,
        bits: transmissions as f64 * subfile_bits,
        transmissions,
    }
}

/// Uncoded unicast: every (EN, subfile) transfer is sent separately.
pub fn unicast_bits(req: &DeliveryRequirement, subfile_bits: f64) -> FronthaulLoad {
    load(Strategy::Unicast, req.transfers.len(), subfile_bits)
}

/// Uncoded multicast: each needed subfile is sent once.
pub fn multicast_bits(req: &DeliveryRequirement, subfile_bits: f64) -> FronthaulLoad {
    load(
        Strategy::Multicast,
        req.distinct_packets().len(),
        subfile_bits,
    )
}

/// Conflict graph with identical packets merged, and its greedy coloring.
pub fn coded_coloring(req: &DeliveryRequirement, cache: &CacheState) -> (ConflictGraph, Coloring) {
    let merged = build_conflict_graph(req, cache).merge_identical_packets();
    let coloring = greedy_color(merged.graph());
    (merged, coloring)
}

/// Coded multicast: one coded subfile per color of the merged conflict graph.
pub fn coded_bits(
    req: &DeliveryRequirement,
    cache: &CacheState,
    subfile_bits: f64,
) -> FronthaulLoad {
    let (_, coloring) = coded_coloring(req, cache);
    load(Strategy::Coded, coloring.count, subfile_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: usize = 1;
    const B: usize = 2;

    /// N=2, M=2, L=2; UE1 wants A, UE2 wants B; EN1 caches (A,1),(B,2);
    /// EN2 caches (A,2),(B,1).
    fn instance_w() -> (CacheState, DeliveryRequirement) {
        let mut cache = CacheState::empty(2, 2, 2, 1.0);
        cache.set(1, A, 1, true).unwrap();
        cache.set(1, B, 2, true).unwrap();
        cache.set(2, A, 2, true).unwrap();
        cache.set(2, B, 1, true).unwrap();
        let demand = Demand::new(vec![A, B]);
        let serving = vec![vec![1, 2], vec![1, 2]];
        let req = compute_requirements(&cache, &demand, &serving);
        (cache, req)
    }

    #[test]
    fn requirements_two_en_example() {
        let mut cache = CacheState::empty(2, 1, 2, 1.0);
        cache.set(1, 1, 1, true).unwrap();
        cache.set(2, 1, 2, true).unwrap();
        let demand = Demand::new(vec![1, 1]);
        let req = compute_requirements(&cache, &demand, &[vec![1, 2], vec![1, 2]]);
        let got: Vec<_> = req.transfers().iter().copied().collect();
        assert_eq!(got, vec![(1, 1, 2), (2, 1, 1)]);
        assert_eq!(unicast_bits(&req, 3.0).bits, 6.0);
    }

    #[test]
    fn requirements_are_deduplicated() {
        let cache = CacheState::empty(2, 1, 1, 1.0);
        let demand = Demand::new(vec![1, 1]);
        let req = compute_requirements(&cache, &demand, &[vec![1], vec![1]]);
        let got: Vec<_> = req.transfers().iter().copied().collect();
        assert_eq!(got, vec![(1, 1, 1)]);
    }

    #[test]
    fn shared_packet_multicast_vs_unicast() {
        let cache = CacheState::empty(2, 1, 1, 1.0);
        let demand = Demand::new(vec![1, 1]);
        let req = compute_requirements(&cache, &demand, &[vec![1], vec![2]]);
        assert_eq!(unicast_bits(&req, 5.0).bits, 10.0);
        assert_eq!(multicast_bits(&req, 5.0).bits, 5.0);
        assert_eq!(coded_bits(&req, &cache, 5.0).bits, 5.0);
    }

    #[test]
    fn empty_requirement_costs_nothing() {
        let mut cache = CacheState::empty(2, 1, 3, 1.0);
        for i in 1..=2 {
            for l in 1..=3 {
                cache.set(i, 1, l, true).unwrap();
            }
        }
        let req = compute_requirements(&cache, &Demand::new(vec![1, 1]), &[vec![1, 2], vec![2]]);
        assert!(req.is_empty());
        assert_eq!(unicast_bits(&req, 1.0).bits, 0.0);
        assert_eq!(multicast_bits(&req, 1.0).bits, 0.0);
        assert_eq!(coded_bits(&req, &cache, 1.0).bits, 0.0);
        assert!(build_conflict_graph(&req, &cache).vertices().is_empty());
    }

    #[test]
    fn instance_w_graph_and_coloring() {
        let (cache, req) = instance_w();
        assert_eq!(unicast_bits(&req, 1.0).bits, 4.0);
        assert_eq!(multicast_bits(&req, 1.0).bits, 4.0);

        let g = build_conflict_graph(&req, &cache);
        let packets: Vec<_> = g
            .vertices()
            .iter()
            .map(|v| (v.ens[0], v.packet.file, v.packet.subfile))
            .collect();
        // v1..v4 in lexicographic order.
        assert_eq!(packets, vec![(1, A, 2), (1, B, 1), (2, A, 1), (2, B, 2)]);
        // Pairwise check of the edge rule: only the two same-EN pairs lack
        // side information.
        let e = g.graph();
        assert_eq!(e.to_edge_list(), "4\n0 1\n2 3\n");

        let coloring = greedy_color(e);
        assert_eq!(coloring.count, 2);
        assert_eq!(coloring.colors[0], coloring.colors[2]);
        assert_eq!(coloring.colors[1], coloring.colors[3]);
        assert_ne!(coloring.colors[0], coloring.colors[1]);
        assert_eq!(optimal_color_bruteforce(e).unwrap(), 2);

        let (merged, c) = coded_coloring(&req, &cache);
        assert!(is_decodable(&merged, &c, &cache));
        assert_eq!(coded_bits(&req, &cache, 1.0).bits, 2.0);
    }

    #[test]
    fn no_side_information_means_complete_graph() {
        let cache = CacheState::empty(3, 3, 2, 1.0);
        let demand = Demand::new(vec![1, 2, 3]);
        let req = compute_requirements(&cache, &demand, &[vec![1, 2], vec![2, 3], vec![2, 3]]);
        let merged = build_conflict_graph(&req, &cache).merge_identical_packets();
        let m = merged.vertices().len();
        assert_eq!(m, 6);
        assert_eq!(merged.graph().edge_count(), m * (m - 1) / 2);
        assert_eq!(
            coded_bits(&req, &cache, 1.0).bits,
            multicast_bits(&req, 1.0).bits
        );
    }

    #[test]
    fn identical_packets_never_adjacent() {
        let cache = CacheState::empty(2, 1, 1, 1.0);
        let req = compute_requirements(&cache, &Demand::new(vec![1, 1]), &[vec![1], vec![2]]);
        let g = build_conflict_graph(&req, &cache);
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.graph().edge_count(), 0);
        let merged = g.merge_identical_packets();
        assert_eq!(merged.vertices().len(), 1);
        assert_eq!(merged.vertices()[0].ens, vec![1, 2]);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("broadcast".parse::<Strategy>().is_err());
    }
}
