use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::{BigInt, BigRational, One, Zero};

use crate::combinat::{enumerate_partitions, enumerate_transport_plans, factorial, MonomialIndex, PartitionConstraint};
use crate::combinat::{Partition, TransportPlan};
use crate::error::{ForgeError, Result};

use super::enumerate::enumerate_good_forests;
use super::forest::GoodForest;

/// A good forest whose leaves are split into a left side `0..n_left` and a
/// right side `n_left..n_leaves`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RibbonDiagram {
    forest: GoodForest,
    n_left: usize,
}

impl RibbonDiagram {
    pub fn new(forest: GoodForest, n_left: usize) -> Result<Self> {
        if n_left > forest.n_leaves() {
            return Err(ForgeError::InvalidArgument(format!(
                "{n_left} left leaves on a forest with {} leaves",
                forest.n_leaves()
            )));
        }
        Ok(Self { forest, n_left })
    }

    /// The bowtie forest whose components have the given leaf sets.
    pub fn bowtie_from_blocks(n_leaves: usize, n_left: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut edges = Vec::new();
        let mut hub = n_leaves;
        for b in blocks {
            if b.len() == 2 {
                edges.push((b[0], b[1]));
            } else {
                edges.extend(b.iter().map(|&l| (l, hub)));
                hub += 1;
            }
        }
        Self::new(GoodForest::from_edges(n_leaves, hub - n_leaves, &edges)?, n_left)
    }

    pub fn forest(&self) -> &GoodForest {
        &self.forest
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.forest.n_leaves() - self.n_left
    }

    pub fn is_left(&self, leaf: usize) -> bool {
        leaf < self.n_left
    }

    /// Position of a leaf within its side.
    pub fn side_label(&self, leaf: usize) -> usize {
        if self.is_left(leaf) {
            leaf
        } else {
            leaf - self.n_left
        }
    }

    fn sides(&self, leaves: &[usize]) -> (usize, usize) {
        let l = leaves.iter().filter(|&&v| self.is_left(v)).count();
        (l, leaves.len() - l)
    }

    /// Every terminal internal vertex sees both sides, no pair lies on one
    /// side, and no star has a single leaf on one side and several on the other.
    pub fn is_stretched(&self) -> bool {
        let f = &self.forest;
        let adj = f.adjacency();
        for v in f.internal_vertices() {
            let leaves: Vec<usize> = adj[v].iter().copied().filter(|&w| f.is_leaf(w)).collect();
            if leaves.is_empty() {
                continue;
            }
            let (l, r) = self.sides(&leaves);
            if l == 0 || r == 0 {
                return false;
            }
        }
        for comp in f.components() {
            let leaves: Vec<usize> = comp.iter().copied().filter(|&v| f.is_leaf(v)).collect();
            let internal = comp.len() - leaves.len();
            let (l, r) = self.sides(&leaves);
            if internal == 0 && (l == 0 || r == 0) {
                return false;
            }
            if internal == 1 && ((l == 1 && r > 1) || (r == 1 && l > 1)) {
                return false;
            }
        }
        true
    }

    /// Every component is a pair or a star with a leaf on each side.
    pub fn is_bowtie(&self) -> bool {
        let f = &self.forest;
        f.components().iter().all(|comp| {
            let leaves: Vec<usize> = comp.iter().copied().filter(|&v| f.is_leaf(v)).collect();
            let internal = comp.len() - leaves.len();
            let (l, r) = self.sides(&leaves);
            internal <= 1 && l >= 1 && r >= 1
        })
    }

    /// Every component has as many left leaves as right leaves.
    pub fn is_balanced(&self) -> bool {
        self.forest.component_leaves().iter().all(|c| {
            let (l, r) = self.sides(c);
            l == r
        })
    }

    /// Collapses each component that is not a pair to a single hub.
    pub fn tie(&self) -> Self {
        let blocks = self.forest.component_leaves();
        Self::bowtie_from_blocks(self.forest.n_leaves(), self.n_left, &blocks)
            .expect("tying a good forest yields a good forest")
    }

    /// Closed form `1{balanced} ∏_C (−1)^{k−1}(k−1)! k!` over components on
    /// `2k` leaves.
    pub fn xi(&self) -> Result<i128> {
        if !self.is_bowtie() {
            return Err(ForgeError::InvalidForest("xi is defined on bowtie forests".into()));
        }
        if !self.is_balanced() {
            return Ok(0);
        }
        Ok(self
            .forest
            .component_leaves()
            .iter()
            .map(|c| {
                let k = c.len() / 2;
                let sign = if k % 2 == 1 { 1 } else { -1 };
                sign * factorial(k - 1) * factorial(k)
            })
            .product())
    }

    pub fn to_dot(&self) -> String {
        let f = &self.forest;
        let mut s = String::from("graph ribbon {\n  rankdir=LR;\n");
        for v in 0..f.n_leaves() {
            let side = if self.is_left(v) { "L" } else { "R" };
            let _ = writeln!(s, "  v{v} [shape=point, xlabel=\"{side}{}\"];", self.side_label(v));
        }
        for v in f.internal_vertices() {
            let _ = writeln!(s, "  v{v} [shape=box, label=\"\"];");
        }
        for &(a, b) in f.edges() {
            let _ = writeln!(s, "  v{a} -- v{b};");
        }
        s.push_str("}\n");
        s
    }
}

/// Stretched ribbon diagrams in `F(ℓ, m)`.
pub fn stretched_forests(l: usize, m: usize) -> Result<Vec<RibbonDiagram>> {
    let all = enumerate_good_forests(l + m)?;
    Ok(all
        .iter()
        .map(|f| RibbonDiagram { forest: f.clone(), n_left: l })
        .filter(RibbonDiagram::is_stretched)
        .collect())
}

/// `Σ μ(F)` over stretched `F ∈ F(ℓ, m)`.
pub fn stretched_mu_sum(l: usize, m: usize) -> Result<i128> {
    Ok(stretched_forests(l, m)?.iter().map(|d| d.forest.mu()).sum())
}

/// Signed block weight `(−1)^{c−1}(c−1)! c!` of the transport expansion.
fn transport_block_weight(c: usize) -> BigInt {
    let w = BigInt::from(factorial(c - 1)) * BigInt::from(factorial(c));
    if c % 2 == 1 {
        w
    } else {
        -w
    }
}

/// Weight of one plan: `∏_{A ∈ σ+τ} (−1)^{|A|−1}(|A|−1)!|A|! / D!`.
pub(crate) fn transport_weight(sigma: &Partition, tau: &Partition, plan: &TransportPlan) -> BigRational {
    let mut w = BigInt::one();
    for c in sigma.block_sizes().into_iter().chain(tau.block_sizes()) {
        w *= transport_block_weight(c);
    }
    BigRational::from_integer(w) * plan.inverse_factorial()
}

/// Leaf sets of the connected components of the transport diagram
/// `G(σ, τ, D)`, with left leaf `i` as `i` and right leaf `j` as `d + j`.
pub(crate) fn transport_components(d: usize, sigma: &Partition, tau: &Partition, plan: &TransportPlan) -> Vec<Vec<usize>> {
    // Union-find over left leaves, right leaves; blocks are represented by
    // their first member, which suffices for connectivity.
    let mut parent: Vec<usize> = (0..2 * d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
        }
    };
    for b in sigma.blocks() {
        for &i in b {
            union(&mut parent, b[0], i);
        }
    }
    for b in tau.blocks() {
        for &j in b {
            union(&mut parent, d + b[0], d + j);
        }
    }
    for (a, row) in plan.matrix.iter().enumerate() {
        for (b, &count) in row.iter().enumerate() {
            if count > 0 {
                union(&mut parent, sigma.blocks()[a][0], d + tau.blocks()[b][0]);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..2 * d {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// `Σ_{σ ∈ Part([ℓ]), τ ∈ Part([m])} ∏_{A ∈ σ+τ} (−1)^{|A|−1}(|A|−1)!|A|! Σ_D 1/D!`.
pub fn transport_coefficient_sum(l: usize, m: usize) -> BigRational {
    let left = enumerate_partitions(&MonomialIndex::new((0..l).collect()), PartitionConstraint::All);
    let right = enumerate_partitions(&MonomialIndex::new((0..m).collect()), PartitionConstraint::All);
    let mut total = BigRational::zero();
    for sigma in &left {
        for tau in &right {
            for plan in enumerate_transport_plans(sigma, tau) {
                total += transport_weight(sigma, tau, &plan);
            }
        }
    }
    total
}

/// Outcome of the bowtie coefficient checks on `F(ℓ, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiVerification {
    pub l: usize,
    pub m: usize,
    pub stretched: usize,
    pub bowties: usize,
    pub transport_plans: usize,
    /// Every stretched forest ties to a bowtie forest of `F(ℓ, m)`.
    pub ties_are_bowties: bool,
    /// Bowtie forests where the stretched `μ`-sum differs from the closed
    /// form: `(forest, stretched sum, closed form)`.
    pub stretched_mismatches: Vec<(RibbonDiagram, i128, i128)>,
    /// Same comparison for the transport weights (only when `ℓ = m`).
    pub transport_mismatches: Vec<(RibbonDiagram, BigRational, i128)>,
    pub stretched_sum: i128,
    pub transport_sum: BigRational,
}

impl XiVerification {
    pub fn stretched_matches_closed_form(&self) -> bool {
        self.ties_are_bowties && self.stretched_mismatches.is_empty()
    }

    pub fn transport_matches_closed_form(&self) -> bool {
        self.transport_mismatches.is_empty()
    }

    pub fn totals_agree(&self) -> bool {
        self.transport_sum == BigRational::from_integer(self.stretched_sum.into())
    }

    pub fn passed(&self) -> bool {
        self.stretched_matches_closed_form() && self.transport_matches_closed_form() && self.totals_agree()
    }
}

/// For every bowtie forest `F ∈ F(ℓ, m)`, compares the `μ`-sum over
/// stretched forests tying to `F` with the closed form and, when `ℓ = m`, the
/// transport weights tying to `F` with the same value; also records both
/// grand totals.
pub fn verify_xi(l: usize, m: usize) -> Result<XiVerification> {
    let stretched = stretched_forests(l, m)?;
    let bowties: Vec<RibbonDiagram> = enumerate_good_forests(l + m)?
        .iter()
        .map(|f| RibbonDiagram { forest: f.clone(), n_left: l })
        .filter(RibbonDiagram::is_bowtie)
        .collect();
    let mut by_tie: BTreeMap<RibbonDiagram, i128> = BTreeMap::new();
    for d in &stretched {
        *by_tie.entry(d.tie()).or_insert(0) += d.forest.mu();
    }
    let ties_are_bowties = by_tie.keys().all(|k| bowties.contains(k));
    let mut by_transport: BTreeMap<RibbonDiagram, BigRational> = BTreeMap::new();
    let mut transport_plans = 0;
    if l == m {
        let ground = MonomialIndex::new((0..l).collect());
        let parts = enumerate_partitions(&ground, PartitionConstraint::All);
        for sigma in &parts {
            for tau in &parts {
                for plan in enumerate_transport_plans(sigma, tau) {
                    transport_plans += 1;
                    let blocks = transport_components(l, sigma, tau, &plan);
                    let t = RibbonDiagram::bowtie_from_blocks(2 * l, l, &blocks)?;
                    *by_transport.entry(t).or_insert_with(BigRational::zero) += transport_weight(sigma, tau, &plan);
                }
            }
        }
    }
    let mut stretched_mismatches = Vec::new();
    let mut transport_mismatches = Vec::new();
    for b in &bowties {
        let closed = b.xi()?;
        let brute = by_tie.get(b).copied().unwrap_or(0);
        if brute != closed {
            stretched_mismatches.push((b.clone(), brute, closed));
        }
        if l == m {
            let via_plans = by_transport.get(b).cloned().unwrap_or_else(BigRational::zero);
            if via_plans != BigRational::from_integer(closed.into()) {
                transport_mismatches.push((b.clone(), via_plans, closed));
            }
        }
    }
    Ok(XiVerification {
        l,
        m,
        stretched: stretched.len(),
        bowties: bowties.len(),
        transport_plans,
        ties_are_bowties,
        stretched_mismatches,
        transport_mismatches,
        stretched_sum: stretched.iter().map(|d| d.forest.mu()).sum(),
        transport_sum: transport_coefficient_sum(l, m),
    })
}
