//! Coordination graph, clusters, and activity analyses over coordinated
//! accounts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Corpus, TweetKind};
use crate::detectors::CoordinationEdge;
use crate::text::{normalize_text, NormalizeOptions};

/// Disjoint-set forest with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: alloc::vec![0; n],
        }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] = self.rank[ra].saturating_add(1);
        }
        true
    }
}

/// Undirected graph over accounts. Nodes always include every edge endpoint.
#[derive(Debug, Clone, Default)]
pub struct CoordinationGraph {
    nodes: BTreeSet<String>,
    edges: Vec<CoordinationEdge>,
}

impl CoordinationGraph {
    pub fn from_edges(edges: Vec<CoordinationEdge>) -> Self {
        let mut g = Self::default();
        for e in edges {
            g.add_edge(e);
        }
        g
    }

    /// Self-loops are dropped.
    pub fn add_edge(&mut self, edge: CoordinationEdge) {
        if edge.a == edge.b {
            return;
        }
        self.nodes.insert(edge.a.clone());
        self.nodes.insert(edge.b.clone());
        self.edges.push(edge);
    }

    pub fn add_node(&mut self, account: &str) {
        if !self.nodes.contains(account) {
            self.nodes.insert(account.into());
        }
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &[CoordinationEdge] {
        &self.edges
    }

    pub fn connected_components(&self) -> Vec<Cluster> {
        connected_components(self)
    }
}

/// A connected component of the coordination graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub id: usize,
    /// Sorted account ids.
    pub members: Vec<String>,
    pub label: String,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, account: &str) -> bool {
        self.members.binary_search_by(|m| m.as_str().cmp(account)).is_ok()
    }
}

/// Components sorted by size descending, then by smallest member id; ids
/// follow that order starting at 0. Labels are left empty.
pub fn connected_components(graph: &CoordinationGraph) -> Vec<Cluster> {
    let names: Vec<&str> = graph.nodes.iter().map(String::as_str).collect();
    let index = |name: &str| names.binary_search(&name).expect("edge endpoint is a node");
    let mut uf = UnionFind::new(names.len());
    for e in &graph.edges {
        uf.union(index(&e.a), index(&e.b));
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(String::from(*name));
    }
    // members are pushed in sorted node order, so members[0] is the minimum
    let mut clusters: Vec<Vec<String>> = groups.into_values().collect();
    clusters.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    clusters
        .into_iter()
        .enumerate()
        .map(|(id, members)| Cluster {
            id,
            members,
            label: String::new(),
        })
        .collect()
}

/// Most frequent hashtag over the members' original tweets; ties go to the
/// lexicographically smallest tag; empty when there are no hashtags.
pub fn label_cluster(members: &[String], corpus: &Corpus) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for m in members {
        for r in corpus.account_records(m) {
            if r.kind != TweetKind::Original {
                continue;
            }
            for tag in &r.hashtags {
                *counts.entry(tag.as_str()).or_default() += 1;
            }
        }
    }
    // BTreeMap iterates in lexicographic order; keep the first maximum
    let mut best: Option<(&str, usize)> = None;
    for (tag, n) in counts {
        if best.is_none_or(|(_, bn)| n > bn) {
            best = Some((tag, n));
        }
    }
    best.map(|(t, _)| String::from(t)).unwrap_or_default()
}

/// Components with labels filled in.
pub fn labeled_clusters(graph: &CoordinationGraph, corpus: &Corpus) -> Vec<Cluster> {
    let mut clusters = connected_components(graph);
    for c in &mut clusters {
        c.label = label_cluster(&c.members, corpus);
    }
    clusters
}

/// Retweet and reply traffic around coordinated accounts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RetweetInteractions {
    /// Retweets where both author and retweeted account are coordinated.
    pub intra_retweets: usize,
    /// Retweets of coordinated content by non-coordinated authors.
    pub retweets_from_outside: usize,
    /// Replies to coordinated accounts by non-coordinated authors.
    pub replies_from_outside: usize,
    /// Retweets authored by coordinated accounts, of anyone's content.
    pub coordinated_retweet_actions: usize,
    /// `intra_retweets / (intra_retweets + retweets_from_outside)`.
    pub intra_share: Option<f64>,
    /// `intra_retweets / coordinated_retweet_actions`.
    pub intra_share_of_actions: Option<f64>,
}

impl RetweetInteractions {
    pub fn retweets_of_coordinated_content(&self) -> usize {
        self.intra_retweets + self.retweets_from_outside
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn retweet_interactions(corpus: &Corpus, coordinated: &BTreeSet<String>) -> RetweetInteractions {
    let mut out = RetweetInteractions::default();
    for r in corpus.records() {
        let author_in = coordinated.contains(&r.account_id);
        match r.kind {
            TweetKind::Retweet => {
                if author_in {
                    out.coordinated_retweet_actions += 1;
                }
                let target_in = r
                    .retweeted_account_id
                    .as_ref()
                    .is_some_and(|t| coordinated.contains(t));
                if target_in {
                    if author_in {
                        out.intra_retweets += 1;
                    } else {
                        out.retweets_from_outside += 1;
                    }
                }
            }
            TweetKind::Reply => {
                if !author_in && r.reply_target().is_some_and(|t| coordinated.contains(t)) {
                    out.replies_from_outside += 1;
                }
            }
            TweetKind::Original => {}
        }
    }
    out.intra_share = ratio(out.intra_retweets, out.retweets_of_coordinated_content());
    out.intra_share_of_actions = ratio(out.intra_retweets, out.coordinated_retweet_actions);
    out
}

/// Share of each kind authored by coordinated accounts on one day; `None`
/// when the day has no tweets of that kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyShare {
    pub day: i64,
    pub original: Option<f64>,
    pub reply: Option<f64>,
    pub retweet: Option<f64>,
}

pub fn activity_shares(corpus: &Corpus, coordinated: &BTreeSet<String>) -> Vec<DailyShare> {
    corpus
        .day_index()
        .iter()
        .map(|(&day, idx)| {
            let mut total = [0usize; 3];
            let mut coord = [0usize; 3];
            for &i in idx {
                let r = &corpus.records()[i];
                let k = r.kind as usize;
                total[k] += 1;
                if coordinated.contains(&r.account_id) {
                    coord[k] += 1;
                }
            }
            DailyShare {
                day,
                original: ratio(coord[0], total[0]),
                reply: ratio(coord[1], total[1]),
                retweet: ratio(coord[2], total[2]),
            }
        })
        .collect()
}

/// Where a text must repeat for a tweet to count as a duplicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicateScope {
    /// Repeated among the same account's originals.
    #[default]
    Account,
    /// Repeated anywhere among the corpus's originals.
    Corpus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuplicateShare {
    pub account_id: String,
    pub share: Option<f64>,
    pub n_originals: usize,
}

/// Per account, the fraction of its original tweets whose normalized text
/// occurs at least twice within `scope`.
pub fn duplicate_shares(
    corpus: &Corpus,
    accounts: &BTreeSet<String>,
    normalization: NormalizeOptions,
    scope: DuplicateScope,
) -> Vec<DuplicateShare> {
    let corpus_counts: BTreeMap<String, usize> = match scope {
        DuplicateScope::Account => BTreeMap::new(),
        DuplicateScope::Corpus => {
            let mut m = BTreeMap::new();
            for r in corpus.records().iter().filter(|r| r.kind == TweetKind::Original) {
                *m.entry(normalize_text(&r.text, normalization)).or_default() += 1;
            }
            m
        }
    };
    accounts
        .iter()
        .map(|account| {
            let texts: Vec<String> = corpus
                .account_records(account)
                .filter(|r| r.kind == TweetKind::Original)
                .map(|r| normalize_text(&r.text, normalization))
                .collect();
            let n = texts.len();
            let dup = match scope {
                DuplicateScope::Account => {
                    let mut local: BTreeMap<&str, usize> = BTreeMap::new();
                    for t in &texts {
                        *local.entry(t.as_str()).or_default() += 1;
                    }
                    texts.iter().filter(|t| local[t.as_str()] >= 2).count()
                }
                DuplicateScope::Corpus => texts.iter().filter(|t| corpus_counts[t.as_str()] >= 2).count(),
            };
            DuplicateShare {
                account_id: account.clone(),
                share: ratio(dup, n),
                n_originals: n,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::*;
    use crate::corpus::{TweetRecord, TweetKind};
    use crate::detectors::Detector;
    use alloc::string::ToString;
    use alloc::vec;

    fn edge(a: &str, b: &str) -> CoordinationEdge {
        CoordinationEdge::new(a, b, Detector::Hashtag, 1.0, "k").unwrap()
    }

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_graph() {
        assert!(CoordinationGraph::default().connected_components().is_empty());
    }

    #[test]
    fn textbook_components() {
        let g = CoordinationGraph::from_edges(vec![edge("a", "b"), edge("b", "c"), edge("d", "e")]);
        let c = g.connected_components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, vec!["a", "b", "c"]);
        assert_eq!(c[1].members, vec!["d", "e"]);
        assert_eq!((c[0].id, c[1].id), (0, 1));
    }

    #[test]
    fn size_ties_by_smallest_member() {
        let g = CoordinationGraph::from_edges(vec![edge("x", "y"), edge("b", "c")]);
        let c = g.connected_components();
        assert_eq!(c[0].members, vec!["b", "c"]);
    }

    #[test]
    fn isolated_nodes_are_singletons() {
        let mut g = CoordinationGraph::from_edges(vec![edge("a", "b")]);
        g.add_node("z");
        let c = g.connected_components();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].size(), 1);
    }

    #[test]
    fn labels() {
        let recs = vec![
            original("1", "a", 0, &["lepen", "lepen"]),
            original("2", "b", 0, &["lepen", "macron"]),
            retweet("3", "b", 0, "1", "a"),
        ];
        let c = Corpus::new(recs).unwrap();
        assert_eq!(label_cluster(&["a".into(), "b".into()], &c), "lepen");
        let c = Corpus::new(vec![original("1", "a", 0, &[])]).unwrap();
        assert_eq!(label_cluster(&["a".into()], &c), "");
        let c = Corpus::new(vec![original("1", "a", 0, &["b", "a", "b", "a"])]).unwrap();
        assert_eq!(label_cluster(&["a".into()], &c), "a");
    }

    fn interaction_fixture() -> Vec<TweetRecord> {
        // c1, c2 coordinated. Six retweets of coordinated content: two by
        // coordinated authors, four by outsiders.
        let mut reply = tweet("r1", "o1", 0, TweetKind::Reply);
        reply.mentions = vec!["c1".into()];
        let mut reply_in = tweet("r2", "c2", 0, TweetKind::Reply);
        reply_in.mentions = vec!["c1".into()];
        vec![
            original("t1", "c1", 0, &[]),
            original("t2", "c2", 0, &[]),
            original("t3", "o1", 0, &[]),
            retweet("rt1", "c2", 1, "t1", "c1"),
            retweet("rt2", "c1", 1, "t2", "c2"),
            retweet("rt3", "o1", 1, "t1", "c1"),
            retweet("rt4", "o2", 1, "t1", "c1"),
            retweet("rt5", "o3", 1, "t2", "c2"),
            retweet("rt6", "o2", 1, "t2", "c2"),
            retweet("rt7", "c1", 1, "t3", "o1"),
            retweet("rt8", "o2", 1, "t3", "o1"),
            reply,
            reply_in,
        ]
    }

    #[test]
    fn interactions_hand_count() {
        let c = Corpus::new(interaction_fixture()).unwrap();
        let x = retweet_interactions(&c, &set(&["c1", "c2"]));
        assert_eq!(x.intra_retweets, 2);
        assert_eq!(x.retweets_from_outside, 4);
        assert_eq!(x.replies_from_outside, 1);
        assert_eq!(x.coordinated_retweet_actions, 3);
        assert_eq!(x.intra_share, Some(1.0 / 3.0));
        assert_eq!(x.intra_share_of_actions, Some(2.0 / 3.0));
    }

    #[test]
    fn interactions_degenerate() {
        let c = Corpus::new(vec![original("1", "a", 0, &[])]).unwrap();
        let x = retweet_interactions(&c, &set(&["a"]));
        assert_eq!(x, RetweetInteractions::default());
        let c = Corpus::new(interaction_fixture()).unwrap();
        let x = retweet_interactions(&c, &BTreeSet::new());
        assert_eq!((x.intra_retweets, x.retweets_from_outside, x.replies_from_outside), (0, 0, 0));
        assert_eq!(x.intra_share, None);
    }

    #[test]
    fn shares_extremes() {
        let c = Corpus::new(ten_records()).unwrap();
        for d in activity_shares(&c, &set(&["u1", "u2"])) {
            for s in [d.original, d.reply, d.retweet] {
                assert_eq!(s, Some(1.0));
            }
        }
        for d in activity_shares(&c, &BTreeSet::new()) {
            for s in [d.original, d.reply, d.retweet] {
                assert_eq!(s, Some(0.0));
            }
        }
    }

    #[test]
    fn shares_null_for_empty_kind() {
        let c = Corpus::new(vec![original("1", "a", 0, &[])]).unwrap();
        let d = activity_shares(&c, &set(&["a"]));
        assert_eq!(d[0].reply, None);
        assert_eq!(d[0].original, Some(1.0));
    }

    fn texted(id: &str, account: &str, text: &str) -> TweetRecord {
        let mut t = original(id, account, 0, &[]);
        t.text = text.into();
        t
    }

    #[test]
    fn duplicates() {
        let c = Corpus::new(vec![
            texted("1", "a", "same"),
            texted("2", "a", "same"),
            texted("3", "b", "one"),
            texted("4", "b", "two"),
            texted("5", "c", "vote http://x.co/1"),
            texted("6", "c", "vote http://x.co/2"),
            texted("7", "c", "other"),
            retweet("8", "d", 0, "1", "a"),
        ])
        .unwrap();
        let accounts = set(&["a", "b", "c", "d"]);
        let plain = duplicate_shares(&c, &accounts, NormalizeOptions::NONE, DuplicateScope::Account);
        assert_eq!(plain[0].share, Some(1.0));
        assert_eq!(plain[1].share, Some(0.0));
        assert_eq!(plain[2].share, Some(0.0));
        assert_eq!(plain[3].share, None);
        let urls = NormalizeOptions { strip_urls: true, ..NormalizeOptions::NONE };
        let stripped = duplicate_shares(&c, &accounts, urls, DuplicateScope::Account);
        assert_eq!(stripped[2].share, Some(2.0 / 3.0));
        assert_eq!(stripped[2].n_originals, 3);
    }

    #[test]
    fn duplicates_corpus_scope() {
        let c = Corpus::new(vec![texted("1", "a", "hello"), texted("2", "b", "hello"), texted("3", "b", "x")]).unwrap();
        let accounts = set(&["a", "b"]);
        let local = duplicate_shares(&c, &accounts, NormalizeOptions::NONE, DuplicateScope::Account);
        assert_eq!(local[0].share, Some(0.0));
        let global = duplicate_shares(&c, &accounts, NormalizeOptions::NONE, DuplicateScope::Corpus);
        assert_eq!(global[0].share, Some(1.0));
        assert_eq!(global[1].share, Some(0.5));
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        assert!(uf.union(2, 3));
        assert_ne!(uf.find(0), uf.find(2));
        uf.union(1, 3);
        assert_eq!(uf.find(0), uf.find(2));
    }
}
