//! Small reference networks used by tests, benches and the docs.

use crate::netgraph::{Link, Network, Node};
use crate::od::OdMatrix;

/// The four-node Braess network: zones 1 (origin) and 4 (destination).
///
/// Link costs are linear (`beta = 1`):
/// `1->2: 1 + 10x`, `2->4: 50 + x`, `1->3: 50 + x`, `3->4: 1 + 10x`, and when
/// `with_center` is set, `2->3: 10 + x` (appended last). A `4->1` return link keeps
/// the zones mutually reachable. With 6 units of demand the equilibrium
/// OD time is 84 without the center link and 1200/13 (about 92.3) with it.
pub fn braess(with_center: bool) -> Network {
    let nodes = vec![
        Node { id: 1, is_centroid: true },
        Node { id: 2, is_centroid: false },
        Node { id: 3, is_centroid: false },
        Node { id: 4, is_centroid: true },
    ];
    // t = fft * (1 + alpha * x / cap) with beta 1
    let linear = |from, to, fixed: f64, slope: f64| Link::new(from, to, 1.0, fixed, 1.0).with_vdf(slope / fixed, 1.0);
    let mut links = vec![
        linear(1, 2, 1.0, 10.0),
        linear(2, 4, 50.0, 1.0),
        linear(1, 3, 50.0, 1.0),
        linear(3, 4, 1.0, 10.0),
        // return link so zone 4 reaches zone 1; carries no demand
        linear(4, 1, 100.0, 1.0),
    ];
    if with_center {
        links.push(linear(2, 3, 10.0, 1.0));
    }
    Network::new(nodes, links, vec![1, 4])
}

pub const BRAESS_DEMAND: f64 = 6.0;

pub fn braess_demand() -> OdMatrix {
    OdMatrix::from_rows(2, vec![0.0, BRAESS_DEMAND, 0.0, 0.0])
}

/// Two zones joined by two parallel routes (free-flow 10 and 20 min, capacity 100 each),
/// plus return links so every zone reaches every other.
pub fn two_parallel_links() -> Network {
    Network::with_numbered_nodes(
        3,
        2,
        vec![
            Link::new(1, 2, 10.0, 10.0, 100.0),
            Link::new(1, 3, 10.0, 10.0, 100.0),
            Link::new(3, 2, 10.0, 10.0, 100.0),
            Link::new(2, 1, 10.0, 10.0, 100.0),
        ],
    )
}

/// Deterministic integer hash used to spread link attributes without an RNG.
fn mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^ (x >> 33)
}

fn unit(seed: u64, k: u64) -> f64 {
    (mix(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k)) >> 11) as f64 / (1u64 << 53) as f64
}

/// A `rows x cols` grid, every node a zone, with both directions of each grid edge.
/// A 4 x 6 grid gives 24 nodes and 76 links.
pub fn synthetic_grid(rows: u32, cols: u32, seed: u64) -> Network {
    let id = |r: u32, c: u32| r * cols + c + 1;
    let mut links = Vec::new();
    let mut k = 0u64;
    let mut push = |a: u32, b: u32, links: &mut Vec<Link>| {
        let length = 1.0 + 2.0 * unit(seed, k);
        let speed = 40.0 + 40.0 * unit(seed, k + 1); // km/h
        let capacity = 800.0 + 1200.0 * unit(seed, k + 2);
        k += 3;
        let fft = length / speed * 60.0;
        links.push(Link::new(a, b, length, fft, capacity));
        links.push(Link::new(b, a, length, fft, capacity));
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                push(id(r, c), id(r, c + 1), &mut links);
            }
            if r + 1 < rows {
                push(id(r, c), id(r + 1, c), &mut links);
            }
        }
    }
    let n = rows * cols;
    Network::with_numbered_nodes(n, n, links)
}

/// Demand for [`synthetic_grid`]: every off-diagonal pair except `(i, i+1 mod n)`
/// carries a positive flow, so a 24-zone grid has 528 loaded pairs.
pub fn synthetic_demand(zones: usize, seed: u64, scale: f64) -> OdMatrix {
    OdMatrix::from_fn(zones, |i, j| {
        if i == j || j == (i + 1) % zones {
            0.0
        } else {
            scale * (0.5 + unit(seed ^ 0xdead_beef, (i * zones + j) as u64))
        }
    })
}
