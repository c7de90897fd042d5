//! Seeded synthetic heterogeneous networks with planted community structure,
//! used by the acceptance suite, benchmarks, and the browser demo.

use rand::Rng;

use crate::eval::LabeledNodeSet;
use crate::graph::{GraphBuilder, HeteroGraph};
use crate::sampling::rng_from_seed;

/// Two authors writing the same paper.
pub const COAUTHOR_MOTIF: &str = "name: coauthor\nnodes: 1:A 2:P 3:A\nedges: 1->2 3->2\n";

/// A user buying an item of some category.
pub const PURCHASE_MOTIF: &str = "name: purchase\nnodes: 1:U 2:I 3:C\nedges: 1->2 2->3\n";

/// Authors (`A`), papers (`P`), and venues (`V`) split into communities.
/// Authorship mostly stays inside a community; venues and citations are noisier.
#[derive(Debug, Clone, PartialEq)]
pub struct BibliographicConfig {
    pub communities: usize,
    pub authors: usize,
    pub papers: usize,
    pub venues: usize,
    pub min_authors_per_paper: usize,
    pub max_authors_per_paper: usize,
    pub citations_per_paper: usize,
    /// Probability that an author is drawn from any community.
    pub cross_author: f64,
    /// Probability that a venue or cited paper is drawn from any community.
    pub cross_other: f64,
    /// Pad with extra citations up to this many edges.
    pub target_edges: Option<usize>,
    pub seed: u64,
}

impl Default for BibliographicConfig {
    fn default() -> Self {
        BibliographicConfig {
            communities: 2,
            authors: 120,
            papers: 150,
            venues: 30,
            min_authors_per_paper: 2,
            max_authors_per_paper: 3,
            citations_per_paper: 2,
            cross_author: 0.05,
            cross_other: 0.5,
            target_edges: None,
            seed: 0,
        }
    }
}

fn pick_in<R: Rng>(rng: &mut R, n: usize, communities: usize, community: usize, cross: f64) -> usize {
    if rng.gen::<f64>() < cross {
        return rng.gen_range(0..n);
    }
    // Members of `community` are the indices congruent to it.
    let members = (n - community).div_ceil(communities);
    community + communities * rng.gen_range(0..members)
}

/// Builds the graph and labels every author and paper with its community.
pub fn bibliographic(cfg: &BibliographicConfig) -> (HeteroGraph, LabeledNodeSet) {
    let c = cfg.communities;
    let mut rng = rng_from_seed(cfg.seed);
    let mut b = GraphBuilder::new();
    let mut labels = Vec::new();
    for i in 0..cfg.authors {
        b.add_node(&format!("a{i}"), "A").unwrap();
        labels.push((format!("a{i}"), format!("c{}", i % c)));
    }
    for j in 0..cfg.papers {
        b.add_node(&format!("p{j}"), "P").unwrap();
        labels.push((format!("p{j}"), format!("c{}", j % c)));
    }
    for k in 0..cfg.venues {
        b.add_node(&format!("v{k}"), "V").unwrap();
    }
    let mut edges = 0usize;
    let add = |b: &mut GraphBuilder, edges: &mut usize, s: String, d: String, t: &str| {
        if b.add_edge(&s, &d, t).unwrap() {
            *edges += 1;
        }
    };

    // Every author writes at least one paper of their own community.
    for i in 0..cfg.authors {
        let j = pick_in(&mut rng, cfg.papers, c, i % c, 0.0);
        add(&mut b, &mut edges, format!("a{i}"), format!("p{j}"), "writes");
    }
    for j in 0..cfg.papers {
        let n_auth = rng.gen_range(cfg.min_authors_per_paper..=cfg.max_authors_per_paper);
        for _ in 0..n_auth {
            let i = pick_in(&mut rng, cfg.authors, c, j % c, cfg.cross_author);
            add(&mut b, &mut edges, format!("a{i}"), format!("p{j}"), "writes");
        }
        let v = pick_in(&mut rng, cfg.venues, c, j % c, cfg.cross_other);
        add(&mut b, &mut edges, format!("p{j}"), format!("v{v}"), "published_at");
        for _ in 0..cfg.citations_per_paper {
            let t = pick_in(&mut rng, cfg.papers, c, j % c, cfg.cross_other);
            if t != j {
                add(&mut b, &mut edges, format!("p{j}"), format!("p{t}"), "cites");
            }
        }
    }
    if let Some(target) = cfg.target_edges {
        while edges < target {
            let j = rng.gen_range(0..cfg.papers);
            let t = pick_in(&mut rng, cfg.papers, c, j % c, cfg.cross_other);
            if t != j {
                add(&mut b, &mut edges, format!("p{j}"), format!("p{t}"), "cites");
            }
        }
    }
    let (g, _) = b.build().expect("nonempty graph");
    (g, LabeledNodeSet::new(labels).expect("unique labels"))
}

/// Users (`U`) buying items (`I`) that belong to categories (`C`); users and
/// categories share interest groups.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketplaceConfig {
    pub groups: usize,
    pub users: usize,
    pub items: usize,
    pub categories: usize,
    pub purchases_per_user: usize,
    /// Probability that a purchase stays inside the user's group.
    pub in_group: f64,
    pub seed: u64,
}

impl Default for MarketplaceConfig {
    fn default() -> Self {
        MarketplaceConfig {
            groups: 10,
            users: 200,
            items: 250,
            categories: 50,
            purchases_per_user: 8,
            in_group: 0.9,
            seed: 0,
        }
    }
}

pub fn marketplace(cfg: &MarketplaceConfig) -> HeteroGraph {
    let mut rng = rng_from_seed(cfg.seed);
    let mut b = GraphBuilder::new();
    for i in 0..cfg.users {
        b.add_node(&format!("u{i}"), "U").unwrap();
    }
    for j in 0..cfg.items {
        b.add_node(&format!("i{j}"), "I").unwrap();
    }
    for k in 0..cfg.categories {
        b.add_node(&format!("c{k}"), "C").unwrap();
    }
    // Item j sits in category j % categories, whose group is category % groups.
    let group_of_item = |j: usize| (j % cfg.categories) % cfg.groups;
    let mut items_by_group = vec![Vec::new(); cfg.groups];
    for j in 0..cfg.items {
        b.add_edge(&format!("i{j}"), &format!("c{}", j % cfg.categories), "in_category")
            .unwrap();
        items_by_group[group_of_item(j)].push(j);
    }
    for i in 0..cfg.users {
        let pool = &items_by_group[i % cfg.groups];
        for _ in 0..cfg.purchases_per_user {
            let j = if rng.gen::<f64>() < cfg.in_group && !pool.is_empty() {
                pool[rng.gen_range(0..pool.len())]
            } else {
                rng.gen_range(0..cfg.items)
            };
            b.add_edge(&format!("u{i}"), &format!("i{j}"), "buys").unwrap();
        }
    }
    b.build().expect("nonempty graph").0
}
