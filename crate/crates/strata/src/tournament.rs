//! Lazy tournaments on trivalent trees, the point sets Tour(k), and the
//! hyperplane families realized as generalized-slide schedules.

use crate::slide_engine::{PriorityOrder, ScheduleStep};
use crate::tree_core::{
    for_each_ab_paired_trivalent, Composition, Leaf, StableTree, StrataSum, TreeEdge, TreeError,
};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// One played match: the facing pair (i < j) and the label the open edge got.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Match {
    pub i: Leaf,
    pub j: Leaf,
    pub advanced: Leaf,
}

/// The full outcome of a lazy tournament on a trivalent tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TournamentResult {
    /// The tree the tournament was played on.
    pub tree: StableTree,
    /// Label of every edge, leaf edges included.
    pub edge_labels: BTreeMap<TreeEdge, Leaf>,
    /// How many matches each label won.
    pub win_counts: BTreeMap<Leaf, u32>,
    /// The matches in play order.
    pub match_log: Vec<Match>,
    /// How many rounds had more than one eligible pair with the maximal i.
    pub ties: u32,
}

impl TournamentResult {
    /// Wins of a numeric label.
    pub fn wins(&self, i: u32) -> u32 {
        self.win_counts.get(&Leaf::Num(i)).copied().unwrap_or(0)
    }
}

impl Serialize for TournamentResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        fn edge_name(e: &TreeEdge) -> String {
            match e {
                TreeEdge::Leaf(l) => l.to_string(),
                TreeEdge::Internal(side) => side.iter().map(|l| l.to_string()).collect(),
            }
        }
        let mut st = s.serialize_struct("TournamentResult", 5)?;
        st.serialize_field("tree", &self.tree)?;
        let labels: BTreeMap<String, String> = self
            .edge_labels
            .iter()
            .map(|(e, l)| (edge_name(e), l.to_string()))
            .collect();
        st.serialize_field("edge_labels", &labels)?;
        let wins: BTreeMap<String, u32> = self
            .win_counts
            .iter()
            .map(|(l, &w)| (l.to_string(), w))
            .collect();
        st.serialize_field("win_counts", &wins)?;
        let log: Vec<[String; 3]> = self
            .match_log
            .iter()
            .map(|m| [m.i.to_string(), m.j.to_string(), m.advanced.to_string()])
            .collect();
        st.serialize_field("match_log", &log)?;
        st.serialize_field("ties", &self.ties)?;
        st.end()
    }
}

struct Edge {
    key: TreeEdge,
    /// Incident internal vertices (1 for leaf edges, 2 for internal edges).
    vertices: Vec<usize>,
}

/// Play the lazy tournament: facing labeled pairs meet at vertices with one
/// open edge, the largest pair plays, the larger label wins the match, and
/// the open edge inherits the winner unless an adjacent larger label lets it
/// pass the smaller one through instead.
pub fn lazy_tournament(t: &StableTree) -> Result<TournamentResult, TreeError> {
    if !t.is_trivalent() {
        return Err(TreeError::NotTrivalent);
    }
    let st = t.structure();
    let mut edges: Vec<Edge> = Vec::new();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); st.num_vertices()];
    for v in 0..st.num_vertices() {
        for &l in &st.leaves_at[v] {
            incident[v].push(edges.len());
            edges.push(Edge { key: TreeEdge::Leaf(l), vertices: vec![v] });
        }
    }
    for v in 1..st.num_vertices() {
        let idx = edges.len();
        incident[v].push(idx);
        incident[st.parent[v]].push(idx);
        edges.push(Edge {
            key: TreeEdge::Internal(st.order[v - 1].clone()),
            vertices: vec![st.parent[v], v],
        });
    }
    let mut labels: Vec<Option<Leaf>> = edges
        .iter()
        .map(|e| match &e.key {
            TreeEdge::Leaf(l) => Some(*l),
            TreeEdge::Internal(_) => None,
        })
        .collect();
    let mut win_counts: BTreeMap<Leaf, u32> = BTreeMap::new();
    let mut match_log = Vec::new();
    let mut ties = 0u32;
    let rounds = t.codim();
    for _ in 0..rounds {
        // Eligible vertices: two labeled edges facing one open edge.
        let mut eligible: Vec<(Leaf, Leaf, usize)> = Vec::new();
        for v in 0..st.num_vertices() {
            let open: Vec<usize> = incident[v]
                .iter()
                .copied()
                .filter(|&e| labels[e].is_none())
                .collect();
            if open.len() != 1 {
                continue;
            }
            let mut pair: Vec<Leaf> = incident[v].iter().filter_map(|&e| labels[e]).collect();
            pair.sort();
            eligible.push((pair[0], pair[1], open[0]));
        }
        let max_i = eligible
            .iter()
            .map(|&(i, _, _)| i)
            .max()
            .expect("lazy tournament always has an eligible vertex");
        let mut top: Vec<(Leaf, Leaf, usize)> =
            eligible.into_iter().filter(|&(i, _, _)| i == max_i).collect();
        if top.len() > 1 {
            ties += 1;
        }
        // Tie-break on the smaller opposing label.
        top.sort_by_key(|&(_, j, _)| j);
        let (i, j, open_edge) = top[0];
        *win_counts.entry(j).or_insert(0) += 1;
        // Laziness: a strictly larger adjacent label (other than the winner)
        // lets the smaller label advance instead of the winner.
        let mut lazy = false;
        for &v in &edges[open_edge].vertices {
            for &e in &incident[v] {
                if e == open_edge {
                    continue;
                }
                if let Some(u) = labels[e] {
                    if u > i && u != j {
                        lazy = true;
                    }
                }
            }
        }
        let advanced = if lazy { i } else { j };
        labels[open_edge] = Some(advanced);
        match_log.push(Match { i, j, advanced });
    }
    let edge_labels: BTreeMap<TreeEdge, Leaf> = edges
        .iter()
        .enumerate()
        .map(|(e, edge)| (edge.key.clone(), labels[e].unwrap()))
        .collect();
    Ok(TournamentResult {
        tree: t.clone(),
        edge_labels,
        win_counts,
        match_log,
        ties,
    })
}

/// All trivalent trees with a, b paired in which label i wins exactly k_i
/// matches for every i >= 1.
pub fn tour_set(k: &Composition) -> Result<StrataSum, TreeError> {
    if k.total() != k.n() {
        return Err(TreeError::BadComposition);
    }
    let n = k.n();
    let mut sum = StrataSum::empty(n);
    let mut error = None;
    for_each_ab_paired_trivalent(n, |t| {
        if error.is_some() {
            return;
        }
        match lazy_tournament(t) {
            Ok(res) => {
                if (1..=n).all(|i| res.wins(i) == k.parts()[i as usize - 1]) {
                    sum.add(t.clone(), 1);
                }
            }
            Err(e) => error = Some(e),
        }
    })?;
    match error {
        Some(e) => Err(e),
        None => Ok(sum),
    }
}

/// One instruction of a hyperplane schedule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Instr {
    /// Attach the next numeric leaf at every internal vertex.
    Insert(u32),
    /// A generalized slide of the given leaf with the given priority.
    GenSlide(u32, PriorityOrder),
}

/// An ordered list of insertions and generalized slides executed from the
/// 3-leaf tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SlideSchedule {
    instrs: Vec<Instr>,
}

impl SlideSchedule {
    /// The instructions in execution order.
    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }
}

fn priority(labels: &[Leaf]) -> PriorityOrder {
    PriorityOrder::new(labels.to_vec()).unwrap()
}

fn numeric_range(hi: u32) -> impl Iterator<Item = Leaf> {
    (1..=hi).map(Leaf::Num)
}

/// The hyperplane schedule realizing Tour(k) for the supported composition
/// shapes, including the inductive extension through a zero entry.
pub fn family_schedule(k: &Composition) -> Result<SlideSchedule, TreeError> {
    let n = k.n();
    let p = k.parts();
    if k.total() != n || n == 0 {
        return Err(TreeError::UnsupportedShape);
    }
    let nu = n as usize;
    let zeros_before = |upto: usize| p[..upto].iter().all(|&x| x == 0);
    // (0, ..., 0, n): the omega schedule with default priorities.
    if zeros_before(nu - 1) && p[nu - 1] == n {
        let mut instrs: Vec<Instr> = (1..=n).map(Instr::Insert).collect();
        let mut pr = vec![Leaf::B, Leaf::C];
        pr.extend(numeric_range(n - 1));
        instrs.extend((0..n).map(|_| Instr::GenSlide(n, priority(&pr))));
        return Ok(SlideSchedule { instrs });
    }
    // (0, ..., 0, 1, n - 1).
    if n >= 2 && zeros_before(nu - 2) && p[nu - 2] == 1 && p[nu - 1] == n - 1 {
        let mut instrs: Vec<Instr> = (1..n).map(Instr::Insert).collect();
        instrs.push(Instr::GenSlide(n - 1, priority(&[Leaf::B])));
        instrs.push(Instr::Insert(n));
        instrs.push(Instr::GenSlide(n, priority(&[Leaf::B, Leaf::Num(n - 1)])));
        if n >= 3 {
            instrs.push(Instr::GenSlide(n, priority(&[Leaf::C, Leaf::Num(1)])));
            for j in 1..=n.saturating_sub(3) {
                instrs.push(Instr::GenSlide(
                    n,
                    priority(&[Leaf::Num(j), Leaf::Num(j + 1)]),
                ));
            }
        }
        return Ok(SlideSchedule { instrs });
    }
    // (0, ..., 0, n - 1, 1).
    if n >= 2 && zeros_before(nu - 2) && p[nu - 2] == n - 1 && p[nu - 1] == 1 {
        let mut instrs: Vec<Instr> = (1..n).map(Instr::Insert).collect();
        let mut pr = vec![Leaf::B, Leaf::C];
        pr.extend(numeric_range(n - 2));
        instrs.extend((0..n - 1).map(|_| Instr::GenSlide(n - 1, priority(&pr))));
        instrs.push(Instr::Insert(n));
        instrs.push(Instr::GenSlide(n, priority(&[Leaf::B, Leaf::Num(n - 1)])));
        return Ok(SlideSchedule { instrs });
    }
    // (0, 0, 2, 2).
    if p == [0, 0, 2, 2] {
        let mut instrs: Vec<Instr> = (1..=3).map(Instr::Insert).collect();
        instrs.push(Instr::GenSlide(3, priority(&[Leaf::B])));
        instrs.push(Instr::GenSlide(
            3,
            priority(&[Leaf::C, Leaf::Num(1), Leaf::Num(2)]),
        ));
        instrs.push(Instr::Insert(4));
        instrs.push(Instr::GenSlide(4, priority(&[Leaf::B, Leaf::Num(3)])));
        instrs.push(Instr::GenSlide(
            4,
            priority(&[Leaf::C, Leaf::Num(1), Leaf::Num(2)]),
        ));
        return Ok(SlideSchedule { instrs });
    }
    // Inductive rule through a zero entry: (k_1, ..., k_{n-2}, 0, t) comes
    // from (k_1, ..., k_{n-2}, t - 1) by inserting the new top leaf before
    // the old top leaf's slides and appending one more slide that skips the
    // zero-entry leaf.
    if n >= 2 && p[nu - 2] == 0 && p[nu - 1] >= 1 {
        let mut shorter = p[..nu - 2].to_vec();
        shorter.push(p[nu - 1] - 1);
        let inner = family_schedule(&Composition::new(shorter).map_err(|_| TreeError::UnsupportedShape)?)?;
        let old_top = n - 1;
        let tail_start = inner
            .instrs
            .iter()
            .position(|ins| matches!(ins, Instr::GenSlide(i, _) if *i == old_top))
            .unwrap_or(inner.instrs.len());
        let mut instrs: Vec<Instr> = inner.instrs[..tail_start].to_vec();
        instrs.push(Instr::Insert(n));
        for ins in &inner.instrs[tail_start..] {
            match ins {
                Instr::GenSlide(i, pr) if *i == old_top => {
                    instrs.push(Instr::GenSlide(n, pr.clone()));
                }
                _ => return Err(TreeError::UnsupportedShape),
            }
        }
        let mut pr = vec![Leaf::B, Leaf::C];
        pr.extend(numeric_range(n - 2));
        instrs.push(Instr::GenSlide(n, priority(&pr)));
        return Ok(SlideSchedule { instrs });
    }
    Err(TreeError::UnsupportedShape)
}

/// Execute a schedule from the 3-leaf tree, fanning out over all choices and
/// pruning branches that can no longer reach a trivalent tree.
pub fn run_schedule(s: &SlideSchedule, n: u32) -> Result<StrataSum, TreeError> {
    // Inserts must introduce 1..n in increasing order, and slides must
    // reference already-inserted leaves.
    let mut seen = 0u32;
    for ins in &s.instrs {
        match ins {
            Instr::Insert(i) => {
                if *i != seen + 1 || *i > n {
                    return Err(TreeError::MalformedSchedule);
                }
                seen = *i;
            }
            Instr::GenSlide(i, _) => {
                if *i < 1 || *i > seen {
                    return Err(TreeError::MalformedSchedule);
                }
            }
        }
    }
    if seen != n {
        return Err(TreeError::MalformedSchedule);
    }
    let mut current: BTreeSet<StableTree> = [StableTree::interior(0)].into_iter().collect();
    for (pos, ins) in s.instrs.iter().enumerate() {
        let remaining_inserts = s.instrs[pos + 1..]
            .iter()
            .filter(|x| matches!(x, Instr::Insert(_)))
            .count() as u32;
        let remaining_slides = s.instrs[pos + 1..]
            .iter()
            .filter(|x| matches!(x, Instr::GenSlide(_, _)))
            .count() as u32;
        let mut next: BTreeSet<StableTree> = BTreeSet::new();
        match ins {
            Instr::Insert(i) => {
                for t in &current {
                    next.extend(t.insert_leaf(Leaf::Num(*i))?);
                }
            }
            Instr::GenSlide(i, pr) => {
                for t in &current {
                    match crate::slide_engine::schedule_slide(t, *i, pr)? {
                        ScheduleStep::Survives => {
                            next.insert(t.clone());
                        }
                        ScheduleStep::Dies => {}
                        ScheduleStep::FansOut(fan) => next.extend(fan),
                    }
                }
            }
        }
        next.retain(|t| t.extra_valency() + remaining_inserts <= remaining_slides);
        current = next;
    }
    let mut sum = StrataSum::empty(n);
    for t in current {
        if t.is_trivalent() {
            sum.add(t, 1);
        }
    }
    Ok(sum)
}
