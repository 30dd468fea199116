//! Rooted plane trees, labelings, weight and z machinery, ferns, and two
//! independent constructions of the truncated formal inverse.
//!
//! "Degree" of a vertex is its child count (the root included). A tree is
//! d-regular when every vertex has exactly d or 0 children; such a tree with
//! k internal vertices has k(d-1)+1 leaves.

use crate::polyring::{Polynomial, VarSet};
use crate::{Error, Result};

/// Ordered rooted tree: a vertex with an ordered (possibly empty) child list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlaneTree {
    pub children: Vec<PlaneTree>,
}

impl PlaneTree {
    pub fn leaf() -> Self {
        PlaneTree { children: Vec::new() }
    }

    pub fn node(children: Vec<PlaneTree>) -> Self {
        PlaneTree { children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.children.iter().map(PlaneTree::vertex_count).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(PlaneTree::leaf_count).sum()
        }
    }

    pub fn internal_count(&self) -> usize {
        self.vertex_count() - self.leaf_count()
    }

    /// Maximal edge count on a root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children.iter().map(|c| 1 + c.height()).max().unwrap_or(0)
    }

    /// Every vertex has exactly d or 0 children.
    pub fn is_d_regular(&self, d: usize) -> bool {
        (self.children.is_empty() || self.children.len() == d)
            && self.children.iter().all(|c| c.is_d_regular(d))
    }

    /// Flatten to parent/child index arrays; ids are preorder, root = 0.
    /// Preorder restricted to leaves is the planar left-to-right leaf order.
    pub fn flatten(&self) -> FlatTree {
        let mut flat = FlatTree { parent: Vec::new(), children: Vec::new() };
        fn walk(t: &PlaneTree, parent: Option<usize>, flat: &mut FlatTree) -> usize {
            let id = flat.parent.len();
            flat.parent.push(parent);
            flat.children.push(Vec::new());
            for c in &t.children {
                let cid = walk(c, Some(id), flat);
                flat.children[id].push(cid);
            }
            id
        }
        walk(self, None, &mut flat);
        flat
    }
}

/// Index-based view of a plane tree; vertex ids are preorder.
#[derive(Debug, Clone)]
pub struct FlatTree {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl FlatTree {
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Leaf ids in preorder (= planar left-to-right).
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |p| self.children[p].iter().map(move |&c| (p, c)))
    }
}

/// All plane trees in which every vertex has exactly d or 0 children and
/// exactly k vertices are internal. Order: lexicographic on child-subtree
/// sequences, recursively (leaf sorts before any internal vertex).
pub fn enumerate_d_regular_trees(d: usize, k: usize) -> Vec<PlaneTree> {
    assert!(d >= 1, "degree must be positive");
    fn gen(d: usize, k: usize, memo: &mut Vec<Option<Vec<PlaneTree>>>) -> Vec<PlaneTree> {
        if let Some(cached) = &memo[k] {
            return cached.clone();
        }
        let mut out = Vec::new();
        if k == 0 {
            out.push(PlaneTree::leaf());
        } else {
            // internal budgets over the d child slots
            let mut parts = vec![0usize; d];
            compositions(k - 1, d, &mut parts, 0, &mut |parts| {
                let slot_trees: Vec<Vec<PlaneTree>> =
                    parts.iter().map(|&ki| gen(d, ki, memo)).collect();
                cartesian(&slot_trees, &mut |children| {
                    out.push(PlaneTree::node(children.to_vec()));
                });
            });
            // canonical order: recursively lexicographic on child sequences
            out.sort();
        }
        memo[k] = Some(out.clone());
        out
    }
    let mut memo = vec![None; k + 1];
    let trees = gen(d, k, &mut memo);
    debug_assert!(trees.windows(2).all(|w| w[0] < w[1]), "enumeration must be sorted");
    debug_assert_eq!(trees.len() as u128, fuss_catalan(d, k), "count must match");
    trees
}

/// Enumerate all ways to write total as an ordered sum of `slots` parts,
/// lexicographically ascending.
fn compositions(
    total: usize,
    slots: usize,
    parts: &mut Vec<usize>,
    idx: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == slots - 1 {
        parts[idx] = total;
        f(parts);
        return;
    }
    for v in 0..=total {
        parts[idx] = v;
        compositions(total - v, slots, parts, idx + 1, f);
    }
}

fn cartesian(slots: &[Vec<PlaneTree>], f: &mut impl FnMut(&[PlaneTree])) {
    fn rec(slots: &[Vec<PlaneTree>], acc: &mut Vec<PlaneTree>, f: &mut impl FnMut(&[PlaneTree])) {
        if acc.len() == slots.len() {
            f(acc);
            return;
        }
        for t in &slots[acc.len()] {
            acc.push(t.clone());
            rec(slots, acc, f);
            acc.pop();
        }
    }
    rec(slots, &mut Vec::new(), f);
}

/// Number of d-regular plane trees with k internal vertices:
/// binom(dk, k) / (k(d-1)+1).
pub fn fuss_catalan(d: usize, k: usize) -> u128 {
    num_integer::binomial((d * k) as u128, k as u128) / (k * (d - 1) + 1) as u128
}

/// Total vertex labeling, values in [1,n], indexed by preorder vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    pub tree: PlaneTree,
    pub labels: Vec<usize>,
}

impl Labeling {
    pub fn new(tree: PlaneTree, labels: Vec<usize>, n: usize) -> Self {
        assert_eq!(labels.len(), tree.vertex_count(), "one label per vertex");
        assert!(labels.iter().all(|&l| (1..=n).contains(&l)), "labels must lie in [1,n]");
        Labeling { tree, labels }
    }

    /// Nested-parentheses serialization with labels, e.g. `1(2,3(1,1))`.
    pub fn serialize(&self) -> String {
        fn walk(t: &PlaneTree, labels: &[usize], next: &mut usize, out: &mut String) {
            out.push_str(&labels[*next].to_string());
            *next += 1;
            if !t.is_leaf() {
                out.push('(');
                for (i, c) in t.children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    walk(c, labels, next, out);
                }
                out.push(')');
            }
        }
        let mut out = String::new();
        walk(&self.tree, &self.labels, &mut 0, &mut out);
        out
    }
}

/// Product over edges of a[label(parent), label(child)]; 1 for a single
/// vertex (empty product).
pub fn tree_weight(labeling: &Labeling, vars: &VarSet) -> Polynomial {
    let flat = labeling.tree.flatten();
    let mut w = Polynomial::one(vars.nvars());
    for (p, c) in flat.edges() {
        w = w.mul(&Polynomial::var(
            vars.a(labeling.labels[p], labeling.labels[c]),
            vars.nvars(),
        ));
    }
    w
}

/// Labels on exactly the root and the leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootLeafLabeling {
    pub tree: PlaneTree,
    pub root: usize,
    /// leaf labels, planar left-to-right
    pub leaf_labels: Vec<usize>,
}

impl RootLeafLabeling {
    pub fn new(tree: PlaneTree, root: usize, leaf_labels: Vec<usize>, n: usize) -> Self {
        assert_eq!(leaf_labels.len(), tree.leaf_count(), "one label per leaf");
        assert!((1..=n).contains(&root), "root label must lie in [1,n]");
        assert!(leaf_labels.iter().all(|&l| (1..=n).contains(&l)), "labels must lie in [1,n]");
        RootLeafLabeling { tree, root, leaf_labels }
    }
}

/// Sum of tree weights over every total labeling extending the root-leaf
/// labeling on the internal non-root vertices. Computed by a bottom-up sum
/// over each subtree root's label; equals the brute-force enumeration of
/// n^(#unlabeled) extensions.
pub fn z_value(rl: &RootLeafLabeling, n: usize, vars: &VarSet) -> Polynomial {
    let nv = vars.nvars();
    // contrib(v, c) = sum over labelings of v's subtree interior, given v
    // is labeled c, of the product of edge weights inside the subtree
    fn contrib(
        t: &PlaneTree,
        c: usize,
        n: usize,
        vars: &VarSet,
        leaf_labels: &[usize],
        next_leaf: &mut usize,
    ) -> Polynomial {
        let nv = vars.nvars();
        if t.is_leaf() {
            // the label is forced; the caller consumes the edge weight
            let l = leaf_labels[*next_leaf];
            *next_leaf += 1;
            return if l == c { Polynomial::one(nv) } else { Polynomial::zero(nv) };
        }
        let mut acc = Polynomial::one(nv);
        for child in &t.children {
            if child.is_leaf() {
                let l = leaf_labels[*next_leaf];
                *next_leaf += 1;
                acc = acc.mul(&Polynomial::var(vars.a(c, l), nv));
            } else {
                let mut sum = Polynomial::zero(nv);
                let mark = *next_leaf;
                for cl in 1..=n {
                    *next_leaf = mark;
                    let sub = contrib(child, cl, n, vars, leaf_labels, next_leaf);
                    sum = sum.add(&Polynomial::var(vars.a(c, cl), nv).mul(&sub));
                }
                acc = acc.mul(&sum);
            }
        }
        acc
    }
    let _ = nv;
    let mut next_leaf = 0usize;
    let z = contrib(&rl.tree, rl.root, n, vars, &rl.leaf_labels, &mut next_leaf);
    assert_eq!(next_leaf, rl.leaf_labels.len());
    z
}

/// Brute-force z: enumerate all n^(#internal non-root) interior labelings.
/// Test oracle for [`z_value`].
pub fn z_value_brute(rl: &RootLeafLabeling, n: usize, vars: &VarSet) -> Polynomial {
    let flat = rl.tree.flatten();
    let leaves = flat.leaves();
    let mut fixed: Vec<Option<usize>> = vec![None; flat.len()];
    fixed[0] = Some(rl.root);
    for (slot, &leaf) in leaves.iter().enumerate() {
        // a single-vertex tree: the root is also the leaf; labels must agree
        if leaf == 0 && rl.leaf_labels[slot] != rl.root {
            return Polynomial::zero(vars.nvars());
        }
        fixed[leaf] = Some(rl.leaf_labels[slot]);
    }
    let free: Vec<usize> = (0..flat.len()).filter(|&v| fixed[v].is_none()).collect();
    let mut total = Polynomial::zero(vars.nvars());
    let mut assignment = vec![1usize; free.len()];
    loop {
        let mut labels: Vec<usize> = fixed.iter().map(|o| o.unwrap_or(0)).collect();
        for (slot, &v) in free.iter().enumerate() {
            labels[v] = assignment[slot];
        }
        total = total.add(&tree_weight(
            &Labeling::new(rl.tree.clone(), labels, n),
            vars,
        ));
        // odometer increment
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return total;
            }
            assignment[i] += 1;
            if assignment[i] <= n {
                break;
            }
            assignment[i] = 1;
            i += 1;
        }
    }
}

/// The d-regular tree with an n-vertex spine along leftmost children:
/// spine vertices v_0..v_{n-1} are internal, every other child is a leaf,
/// and v_n (the leftmost child of v_{n-1}) is a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fern {
    pub d: usize,
    pub n: usize,
    pub tree: PlaneTree,
}

pub fn build_fern(d: usize, n: usize) -> Fern {
    assert!(d >= 1 && n >= 1, "fern requires d, n >= 1");
    let mut t = PlaneTree::node(vec![PlaneTree::leaf(); d]);
    for _ in 1..n {
        let mut children = vec![t];
        children.extend(std::iter::repeat_with(PlaneTree::leaf).take(d - 1));
        t = PlaneTree::node(children);
    }
    let fern = Fern { d, n, tree: t };
    debug_assert_eq!(fern.tree.internal_count(), n);
    debug_assert_eq!(fern.tree.leaf_count(), n * (d - 1) + 1);
    fern
}

/// Root-leaf labeling of a fern in spine form: root label, then one
/// (d-1)-tuple per spine vertex v_0..v_{n-2} for its side leaves, then a
/// d-tuple for all children of v_{n-1} with v_n first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FernLabeling {
    pub root: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl FernLabeling {
    pub fn new(root: usize, tuples: Vec<Vec<usize>>, d: usize, n: usize) -> Result<Self> {
        if tuples.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} label tuples, found {}",
                tuples.len()
            )));
        }
        for (k, t) in tuples.iter().enumerate() {
            let want = if k == n - 1 { d } else { d - 1 };
            if t.len() != want {
                return Err(Error::InvalidInput(format!(
                    "tuple {k} must have {want} labels, found {}",
                    t.len()
                )));
            }
        }
        Ok(FernLabeling { root, tuples })
    }

    pub fn validate_range(&self, n: usize) -> Result<()> {
        let ok = (1..=n).contains(&self.root)
            && self.tuples.iter().flatten().all(|&l| (1..=n).contains(&l));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("labels must lie in [1,{n}]")))
        }
    }

    /// Spine-form string `r;(t_0);...;(t_{n-1})`, e.g. `1;(2);(3);(1,1)`.
    pub fn display(&self) -> String {
        let mut s = self.root.to_string();
        for t in &self.tuples {
            s.push_str(";(");
            s.push_str(&t.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
            s.push(')');
        }
        s
    }

    /// Parse the spine-form string; arities are validated against (d,n).
    pub fn parse(s: &str, n: usize, d: usize) -> Result<Self> {
        let mut parts = s.split(';');
        let root: usize = parts
            .next()
            .and_then(|p| p.trim().parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("bad fern labeling {s:?}: missing root")))?;
        let mut tuples = Vec::new();
        for part in parts {
            let part = part.trim();
            let inner = part
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::InvalidInput(format!("bad fern labeling {s:?}: tuple {part:?}"))
                })?;
            let mut tuple = Vec::new();
            if !inner.trim().is_empty() {
                for item in inner.split(',') {
                    let l: usize = item.trim().parse().map_err(|_| {
                        Error::InvalidInput(format!("bad label {item:?} in {s:?}"))
                    })?;
                    tuple.push(l);
                }
            }
            tuples.push(tuple);
        }
        let fl = FernLabeling::new(root, tuples, d, n)?;
        fl.validate_range(n)?;
        Ok(fl)
    }

    /// Convert to a root-leaf labeling of the fern tree. The preorder leaf
    /// sequence of a fern is v_n, then v_{n-1}'s side leaves, ..., then
    /// v_0's side leaves, so the tuples are consumed deepest-first.
    pub fn to_root_leaf(&self, fern: &Fern) -> RootLeafLabeling {
        let n = fern.n;
        let mut leaf_labels: Vec<usize> = Vec::new();
        leaf_labels.extend(&self.tuples[n - 1]);
        for k in (0..n - 1).rev() {
            leaf_labels.extend(&self.tuples[k]);
        }
        RootLeafLabeling {
            tree: fern.tree.clone(),
            root: self.root,
            leaf_labels,
        }
    }
}

/// The labeling mu(i,j,l): root labeled i, v_n labeled j, every other
/// leaf labeled l.
pub fn fern_mu(fern: &Fern, i: usize, j: usize, l: usize) -> FernLabeling {
    let (d, n) = (fern.d, fern.n);
    let mut tuples = vec![vec![l; d - 1]; n];
    tuples[n - 1] = {
        let mut last = vec![l; d];
        last[0] = j;
        last
    };
    FernLabeling { root: i, tuples }
}

/// z of a fern under a spine-form labeling.
pub fn z_fern(fern: &Fern, labeling: &FernLabeling, n: usize, vars: &VarSet) -> Polynomial {
    z_value(&labeling.to_root_leaf(fern), n, vars)
}

/// Component i of the truncated formal inverse as a sum over labeled
/// d-regular trees with root labeled i and at most max_degree leaves:
/// each labeled tree contributes its weight times the product of x over
/// its leaf labels. Degree-1 maps are rejected: every internal-vertex
/// count yields the same leaf count, so the x-degree-1 coefficient would
/// be an infinite series.
pub fn formal_inverse_tree_sum(
    n: usize,
    d: usize,
    component: usize,
    max_degree: u32,
    vars: &VarSet,
) -> Result<Polynomial> {
    if d < 2 {
        return Err(Error::InvalidInput(
            "the formal inverse of a degree-1 map is not polynomial degree by degree; d >= 2 required"
                .into(),
        ));
    }
    if !(1..=n).contains(&component) {
        return Err(Error::InvalidInput(format!("component must lie in [1,{n}]")));
    }
    assert!(max_degree >= 1, "degree bound must be positive");
    let nv = vars.nvars();
    let mut total = Polynomial::zero(nv);
    let mut k = 0usize;
    while k * (d - 1) < max_degree as usize {
        for tree in enumerate_d_regular_trees(d, k) {
            total = total.add(&tree_inverse_contribution(&tree, component, n, vars));
        }
        k += 1;
    }
    Ok(total)
}

/// Sum over all labelings of the tree with the root label fixed, of
/// weight times the leaf-label x monomial. Internal labels telescope into
/// a bottom-up sum; leaves carry x factors.
fn tree_inverse_contribution(
    tree: &PlaneTree,
    root_label: usize,
    n: usize,
    vars: &VarSet,
) -> Polynomial {
    let nv = vars.nvars();
    fn down(t: &PlaneTree, c: usize, n: usize, vars: &VarSet) -> Polynomial {
        let nv = vars.nvars();
        if t.is_leaf() {
            return Polynomial::var(vars.x(c), nv);
        }
        let mut acc = Polynomial::one(nv);
        for child in &t.children {
            let mut sum = Polynomial::zero(nv);
            for cl in 1..=n {
                sum = sum.add(&Polynomial::var(vars.a(c, cl), nv).mul(&down(child, cl, n, vars)));
            }
            acc = acc.mul(&sum);
        }
        acc
    }
    if tree.is_leaf() {
        return Polynomial::var(vars.x(root_label), nv);
    }
    down(tree, root_label, n, vars)
}

/// All n components of the truncated formal inverse by fixed-point
/// iteration of g_i <- x_i + (sum_j a[i,j] g_j)^d, truncated at x-degree
/// max_degree. The iteration gains at least one correct degree per round.
pub fn formal_inverse_fixed_point(
    n: usize,
    d: usize,
    max_degree: u32,
    vars: &VarSet,
) -> Result<Vec<Polynomial>> {
    if d < 2 {
        return Err(Error::InvalidInput(
            "the formal inverse of a degree-1 map is not polynomial degree by degree; d >= 2 required"
                .into(),
        ));
    }
    assert!(max_degree >= 1, "degree bound must be positive");
    let nv = vars.nvars();
    let xs = vars.x_vars();
    let mut g: Vec<Polynomial> = (1..=n).map(|i| Polynomial::var(vars.x(i), nv)).collect();
    let mut rounds = 0usize;
    loop {
        let next: Vec<Polynomial> = (1..=n)
            .map(|i| {
                let mut lin = Polynomial::zero(nv);
                for (j, gj) in g.iter().enumerate() {
                    lin = lin.add(&Polynomial::var(vars.a(i, j + 1), nv).mul(gj));
                }
                // Raise to the d-th power, discarding terms beyond the degree
                // bound as each factor is folded in.
                let mut power = Polynomial::one(nv);
                for _ in 0..d {
                    power = power.mul_truncated(&lin, &xs, max_degree);
                }
                Polynomial::var(vars.x(i), nv).add(&power)
            })
            .collect();
        if next == g {
            return Ok(g);
        }
        g = next;
        rounds += 1;
        assert!(
            rounds <= max_degree as usize + 1,
            "fixed point must stabilize within the degree bound"
        );
    }
}

/// The leftmost root path of exactly n edges: depth-first descent taking
/// children left to right, backtracking out of subtrees too shallow to
/// reach depth n. Returns preorder vertex ids v_0..v_n. Errors when the
/// tree's height is below n.
pub fn leftmost_n_path(tree: &PlaneTree, n: usize) -> Result<Vec<usize>> {
    let flat = tree.flatten();
    fn descend(flat: &FlatTree, v: usize, remaining: usize, path: &mut Vec<usize>) -> bool {
        path.push(v);
        if remaining == 0 {
            return true;
        }
        for &c in &flat.children[v] {
            if descend(flat, c, remaining - 1, path) {
                return true;
            }
        }
        path.pop();
        false
    }
    let mut path = Vec::new();
    if descend(&flat, 0, n, &mut path) {
        Ok(path)
    } else {
        Err(Error::InvalidInput(format!(
            "tree height {} is below the requested path length {n}",
            tree.height()
        )))
    }
}

/// Class sum and its factorization: vary the labels on the interior of the
/// leftmost n-path only, sum the tree weights, and factor the sum as
/// z(fern) times the weight of the unaffected edges.
pub struct ClassFactorization {
    pub sum: Polynomial,
    pub fern_part: Polynomial,
    pub cofactor: Polynomial,
}

pub fn class_sum_and_factor(
    labeling: &Labeling,
    n: usize,
    vars: &VarSet,
) -> Result<ClassFactorization> {
    let tree = &labeling.tree;
    let d = tree.children.len();
    if !tree.is_d_regular(d) || d == 0 {
        return Err(Error::InvalidInput("tree must be d-regular with an internal root".into()));
    }
    let path = leftmost_n_path(tree, n)?;
    let flat = tree.flatten();
    let labels = &labeling.labels;
    let nv = vars.nvars();

    // brute-force class sum: vary interior path vertices v_1..v_{n-1}
    let interior: Vec<usize> = path[1..n].to_vec();
    let mut sum = Polynomial::zero(nv);
    let mut assignment = vec![1usize; interior.len()];
    loop {
        let mut lab = labels.clone();
        for (slot, &v) in interior.iter().enumerate() {
            lab[v] = assignment[slot];
        }
        sum = sum.add(&tree_weight(&Labeling::new(tree.clone(), lab, n), vars));
        let mut i = 0;
        loop {
            if i == assignment.len() {
                // odometer exhausted: assemble the factorization
                let fern = build_fern(d, n);
                let mut tuples: Vec<Vec<usize>> = Vec::new();
                for k in 0..n {
                    let vk = path[k];
                    let mut side: Vec<usize> = Vec::new();
                    if k == n - 1 {
                        side.push(labels[path[n]]);
                    }
                    for &c in &flat.children[vk] {
                        if k < n - 1 && c == path[k + 1] {
                            continue;
                        }
                        if k == n - 1 && c == path[n] {
                            continue;
                        }
                        side.push(labels[c]);
                    }
                    tuples.push(side);
                }
                let fl = FernLabeling { root: labels[path[0]], tuples };
                let fern_part = z_fern(&fern, &fl, n, vars);
                // cofactor: edges whose parent is not a spine vertex
                // v_0..v_{n-1}; their endpoint labels never vary
                let spine: Vec<usize> = path[..n].to_vec();
                let mut cofactor = Polynomial::one(nv);
                for (p, c) in flat.edges() {
                    if !spine.contains(&p) {
                        cofactor = cofactor
                            .mul(&Polynomial::var(vars.a(labels[p], labels[c]), nv));
                    }
                }
                return Ok(ClassFactorization { sum, fern_part, cofactor });
            }
            assignment[i] += 1;
            if assignment[i] <= n {
                break;
            }
            assignment[i] = 1;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::build_map;
    use crate::polymatrix::PolyMatrix;
    use crate::polyring::parse_polynomial;

    #[test]
    fn enumeration_counts_match_fuss_catalan() {
        for d in 1..=3usize {
            for k in 0..=6usize {
                let trees = enumerate_d_regular_trees(d, k);
                assert_eq!(trees.len() as u128, fuss_catalan(d, k), "d={d} k={k}");
                for t in &trees {
                    assert!(t.is_d_regular(d));
                    assert_eq!(t.internal_count(), k);
                    assert_eq!(t.leaf_count(), k * (d - 1) + 1);
                }
            }
        }
        assert_eq!(enumerate_d_regular_trees(2, 0).len(), 1);
        assert_eq!(enumerate_d_regular_trees(2, 3).len(), 5);
        assert_eq!(enumerate_d_regular_trees(3, 2).len(), 3);
    }

    #[test]
    fn weight_examples() {
        let vs = VarSet::new(3);
        let single = Labeling::new(PlaneTree::leaf(), vec![2], 3);
        assert_eq!(tree_weight(&single, &vs), Polynomial::one(vs.nvars()));
        let edge = Labeling::new(PlaneTree::node(vec![PlaneTree::leaf()]), vec![1, 2], 3);
        assert_eq!(tree_weight(&edge, &vs), parse_polynomial("a[1,2]", &vs).unwrap());
        let cherry = Labeling::new(
            PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]),
            vec![1, 2, 3],
            3,
        );
        assert_eq!(tree_weight(&cherry, &vs), parse_polynomial("a[1,2]*a[1,3]", &vs).unwrap());
    }

    #[test]
    fn labeling_serialization() {
        let t = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::node(vec![
            PlaneTree::leaf(),
            PlaneTree::leaf(),
        ])]);
        let lab = Labeling::new(t, vec![1, 2, 3, 1, 1], 3);
        assert_eq!(lab.serialize(), "1(2,3(1,1))");
    }

    #[test]
    fn z_height_one_is_weight_product() {
        let vs = VarSet::new(3);
        let t = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf(), PlaneTree::leaf()]);
        let rl = RootLeafLabeling::new(t, 2, vec![1, 3, 2], 3);
        assert_eq!(
            z_value(&rl, 3, &vs),
            parse_polynomial("a[2,1]*a[2,3]*a[2,2]", &vs).unwrap()
        );
    }

    #[test]
    fn z_of_path_fern_is_matrix_power() {
        // d=1 fern is a path; z sums over interior labels = (A^n)_{i,j}
        let n = 3;
        let vs = VarSet::new(n);
        let a = PolyMatrix::generic_a(&vs);
        for steps in 1..=3usize {
            let fern = build_fern(1, steps);
            let an = a.mat_pow(steps as u32);
            for i in 1..=n {
                for j in 1..=n {
                    let mut tuples = vec![vec![]; steps];
                    tuples[steps - 1] = vec![j];
                    let fl = FernLabeling { root: i, tuples };
                    assert_eq!(
                        z_fern(&fern, &fl, n, &vs),
                        *an.get(i - 1, j - 1),
                        "steps={steps} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn z_fern22_hand_value() {
        let vs = VarSet::new(2);
        let fern = build_fern(2, 2);
        let fl = fern_mu(&fern, 1, 1, 1);
        let z = z_fern(&fern, &fl, 2, &vs);
        let expect = parse_polynomial("a[1,1]^4 + a[1,1]*a[1,2]*a[2,1]^2", &vs).unwrap();
        assert_eq!(z, expect);
    }

    #[test]
    fn z_dp_matches_brute_force() {
        let vs = VarSet::new(2);
        for (d, spine) in [(2, 2), (2, 3), (3, 2)] {
            let fern = build_fern(d, spine);
            let flabel = fern_mu(&fern, 1, 2, 1);
            let rl = flabel.to_root_leaf(&fern);
            assert_eq!(z_value(&rl, 2, &vs), z_value_brute(&rl, 2, &vs), "d={d} spine={spine}");
        }
        // non-fern shape: complete binary of height 2
        let t = PlaneTree::node(vec![
            PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]),
            PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]),
        ]);
        let rl = RootLeafLabeling::new(t, 1, vec![1, 2, 2, 1], 2);
        assert_eq!(z_value(&rl, 2, &vs), z_value_brute(&rl, 2, &vs));
    }

    #[test]
    fn fern_structure() {
        let fern = build_fern(2, 3);
        assert_eq!(fern.tree.internal_count(), 3);
        assert_eq!(fern.tree.leaf_count(), 4);
        assert_eq!(fern.tree.height(), 3);
        let path = build_fern(1, 4);
        assert_eq!(path.tree.vertex_count(), 5);
        assert_eq!(path.tree.height(), 4);
    }

    #[test]
    fn fern_mu_layout() {
        let fern = build_fern(2, 2);
        let fl = fern_mu(&fern, 1, 2, 3);
        assert_eq!(fl.display(), "1;(3);(2,3)");
        let rl = fl.to_root_leaf(&fern);
        // preorder leaves: v_2 (=2), v_1's side leaf (=3), v_0's side leaf (=3)
        assert_eq!(rl.leaf_labels, vec![2, 3, 3]);
    }

    #[test]
    fn fern_labeling_parse_round_trip() {
        let fl = FernLabeling::parse("1;(2);(3);(1,1)", 3, 2).unwrap();
        assert_eq!(fl.root, 1);
        assert_eq!(fl.tuples, vec![vec![2], vec![3], vec![1, 1]]);
        assert_eq!(fl.display(), "1;(2);(3);(1,1)");
        let d3 = FernLabeling::parse("1;(2,2);(3,3);(1,1,1)", 3, 3).unwrap();
        assert_eq!(d3.display(), "1;(2,2);(3,3);(1,1,1)");
        // d=1: empty side tuples
        let d1 = FernLabeling::parse("2;();();(1)", 3, 1).unwrap();
        assert_eq!(d1.display(), "2;();();(1)");
        assert!(FernLabeling::parse("1;(2);(1,1)", 3, 2).is_err());
        assert!(FernLabeling::parse("1;(2);(3);(1,1,1)", 3, 2).is_err());
        assert!(FernLabeling::parse("1;(2);(3);(1,4)", 3, 2).is_err());
    }

    #[test]
    fn inverse_one_dimensional_catalan() {
        let vs = VarSet::new(1);
        let g = formal_inverse_tree_sum(1, 2, 1, 4, &vs).unwrap();
        let expect = parse_polynomial(
            "x[1] + a[1,1]^2*x[1]^2 + 2*a[1,1]^4*x[1]^3 + 5*a[1,1]^6*x[1]^4",
            &vs,
        )
        .unwrap();
        assert_eq!(g, expect);
        let fp = formal_inverse_fixed_point(1, 2, 4, &vs).unwrap();
        assert_eq!(fp[0], expect);
    }

    #[test]
    fn inverse_constructions_agree() {
        for (n, d, nmax) in [(2usize, 2usize, 5u32), (2, 3, 5), (3, 2, 4)] {
            let vs = VarSet::new(n);
            let fp = formal_inverse_fixed_point(n, d, nmax, &vs).unwrap();
            for i in 1..=n {
                let ts = formal_inverse_tree_sum(n, d, i, nmax, &vs).unwrap();
                assert_eq!(ts, fp[i - 1], "n={n} d={d} i={i}");
            }
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        for (n, d) in [(1usize, 2usize), (2, 2), (2, 3)] {
            let nmax = (2 * d + 1) as u32;
            let vs = VarSet::new(n);
            let map = build_map(n, d, &vs);
            let g = formal_inverse_fixed_point(n, d, nmax, &vs).unwrap();
            let mut subs: Vec<Option<&Polynomial>> = vec![None; vs.nvars()];
            for i in 1..=n {
                subs[vs.x(i)] = Some(&g[i - 1]);
            }
            for i in 1..=n {
                let composed = map.components[i - 1]
                    .substitute(&subs)
                    .truncate_degree_in(&vs.x_vars(), nmax);
                assert_eq!(
                    composed,
                    Polynomial::var(vs.x(i), vs.nvars()),
                    "f_{i} o g != x_{i} for n={n} d={d}"
                );
            }
        }
    }

    #[test]
    fn inverse_rejects_degree_one() {
        let vs = VarSet::new(2);
        assert!(formal_inverse_tree_sum(2, 1, 1, 3, &vs).is_err());
        assert!(formal_inverse_fixed_point(2, 1, 3, &vs).is_err());
    }

    #[test]
    fn leftmost_path_basics() {
        let fern = build_fern(2, 3);
        assert_eq!(leftmost_n_path(&fern.tree, 3).unwrap(), vec![0, 1, 2, 3]);
        let path_tree = build_fern(1, 4);
        assert_eq!(leftmost_n_path(&path_tree.tree, 4).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(leftmost_n_path(&path_tree.tree, 5).is_err());
        // shallow-left shape: the leftmost child is a leaf, the descent
        // must backtrack into the right subtree
        let t = PlaneTree::node(vec![
            PlaneTree::leaf(),
            PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]),
        ]);
        assert_eq!(leftmost_n_path(&t, 2).unwrap(), vec![0, 2, 3]);
    }

    #[test]
    fn class_factorization_on_fern_is_trivial() {
        let vs = VarSet::new(2);
        let fern = build_fern(2, 2);
        let labels = vec![1, 2, 1, 2, 1]; // preorder: v0, v1, v2, side(v1), side(v0)
        let lab = Labeling::new(fern.tree.clone(), labels, 2);
        let f = class_sum_and_factor(&lab, 2, &vs).unwrap();
        assert_eq!(f.cofactor, Polynomial::one(vs.nvars()));
        assert_eq!(f.sum, f.fern_part);
    }

    #[test]
    fn class_factorization_deeper_tree() {
        let vs = VarSet::new(2);
        // fern_{2,3} tree, class sum taken at n=2: the third spine vertex
        // contributes constant edges to the cofactor
        let fern = build_fern(2, 3);
        let labels = vec![1, 2, 1, 2, 1, 2, 1]; // preorder labels, any fixed choice
        let lab = Labeling::new(fern.tree.clone(), labels, 2);
        let f = class_sum_and_factor(&lab, 2, &vs).unwrap();
        assert_eq!(f.sum, f.fern_part.mul(&f.cofactor));
        assert!(!f.cofactor.is_zero());
        // d=1 path of length n+1: cofactor is the weight of the last edge
        let p = build_fern(1, 3);
        let lab = Labeling::new(p.tree.clone(), vec![1, 2, 1, 2], 2);
        let f = class_sum_and_factor(&lab, 2, &vs).unwrap();
        assert_eq!(f.cofactor, parse_polynomial("a[1,2]", &vs).unwrap());
        assert_eq!(f.sum, f.fern_part.mul(&f.cofactor));
    }
}
