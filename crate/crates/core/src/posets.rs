//! Finite posets, order-preserving and order-reversing bijections, and the
//! structure an involution induces on the components.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{bound_check, Error, Result};

pub const DEFAULT_MAX_POSET_SIZE: usize = 10;

/// A finite poset with precomputed relation tables.
///
/// Elements are indexed `0..len()` in the order the labels were given.
/// Relation pairs `(x, y)` with `x <= y` are indexed in linear-extension
/// order, which is also the basis order `e_xy` used by the algebra.
#[derive(Clone, Debug)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    linear_extension: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    pair_index: Vec<Vec<Option<usize>>>,
    factorizations: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.leq == other.leq
    }
}

impl Eq for Poset {}

/// Label used for the `i`-th element of generated posets.
pub fn default_label(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

impl Poset {
    /// Build a poset from labels and generating pairs `x < y`; the order is
    /// the reflexive-transitive closure of the pairs.
    pub fn new<S: AsRef<str>>(labels: &[S], relations: &[(S, S)]) -> Result<Poset> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (x, y) in relations {
            let xi = *index.get(x.as_ref()).ok_or_else(|| Error::UnknownLabel(x.as_ref().into()))?;
            let yi = *index.get(y.as_ref()).ok_or_else(|| Error::UnknownLabel(y.as_ref().into()))?;
            leq[xi][yi] = true;
        }
        Self::from_leq(labels, leq)
    }

    /// Build from a (not necessarily closed) relation matrix.
    pub fn from_leq(labels: Vec<String>, mut leq: Vec<Vec<bool>>) -> Result<Poset> {
        let n = labels.len();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::CycleDetected(labels[i].clone(), labels[j].clone()));
                }
            }
        }

        let mut covers = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] && !(0..n).any(|z| z != x && z != y && leq[x][z] && leq[z][y]) {
                    covers.push((x, y));
                }
            }
        }

        let mut component_of = vec![usize::MAX; n];
        let mut components = Vec::new();
        for start in 0..n {
            if component_of[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![];
            let mut queue = VecDeque::from([start]);
            component_of[start] = id;
            while let Some(x) = queue.pop_front() {
                members.push(x);
                for y in 0..n {
                    if component_of[y] == usize::MAX && (leq[x][y] || leq[y][x]) {
                        component_of[y] = id;
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }

        // Kahn's algorithm, always taking the smallest available index.
        let mut indegree: Vec<usize> = (0..n).map(|y| (0..n).filter(|&x| x != y && leq[x][y]).count()).collect();
        let mut linear_extension = Vec::with_capacity(n);
        let mut done = vec![false; n];
        for _ in 0..n {
            let next = (0..n).find(|&x| !done[x] && indegree[x] == 0).expect("acyclic");
            done[next] = true;
            linear_extension.push(next);
            for y in 0..n {
                if y != next && leq[next][y] {
                    indegree[y] -= 1;
                }
            }
        }
        let mut position = vec![0; n];
        for (p, &x) in linear_extension.iter().enumerate() {
            position[x] = p;
        }

        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| leq[x][y]).collect();
        pairs.sort_by_key(|&(x, y)| (position[x], position[y]));
        let mut pair_index = vec![vec![None; n]; n];
        for (k, &(x, y)) in pairs.iter().enumerate() {
            pair_index[x][y] = Some(k);
        }
        let factorizations = pairs
            .iter()
            .map(|&(x, y)| {
                let mut mids: Vec<usize> = (0..n).filter(|&z| leq[x][z] && leq[z][y]).collect();
                mids.sort_by_key(|&z| position[z]);
                mids.into_iter()
                    .map(|z| (pair_index[x][z].unwrap(), pair_index[z][y].unwrap()))
                    .collect()
            })
            .collect();

        Ok(Poset {
            labels,
            index,
            leq,
            covers,
            components,
            component_of,
            linear_extension,
            pairs,
            pair_index,
            factorizations,
        })
    }

    pub fn chain(n: usize) -> Poset {
        let labels: Vec<String> = (0..n).map(default_label).collect();
        let rel: Vec<(String, String)> = (1..n).map(|i| (labels[i - 1].clone(), labels[i].clone())).collect();
        Poset::new(&labels, &rel).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Poset {
        let labels: Vec<String> = (0..n).map(default_label).collect();
        Poset::new(&labels, &[]).expect("antichain is a poset")
    }

    /// `a < b < d`, `a < c < d`.
    pub fn diamond() -> Poset {
        Poset::new(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]).unwrap()
    }

    /// `a, b < c, d`.
    pub fn crown() -> Poset {
        Poset::new(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")]).unwrap()
    }

    /// Disjoint union; labels must not collide.
    pub fn disjoint_union(&self, other: &Poset) -> Result<Poset> {
        let n = self.len();
        let m = other.len();
        let labels: Vec<String> = self.labels.iter().chain(other.labels.iter()).cloned().collect();
        let mut leq = vec![vec![false; n + m]; n + m];
        for x in 0..n {
            for y in 0..n {
                leq[x][y] = self.leq[x][y];
            }
        }
        for x in 0..m {
            for y in 0..m {
                leq[n + x][n + y] = other.leq[x][y];
            }
        }
        Poset::from_leq(labels, leq)
    }

    /// Same poset with every label passed through `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Poset> {
        Poset::from_leq(self.labels.iter().map(|l| f(l)).collect(), self.leq.clone())
    }

    /// The opposite order on the same labels.
    pub fn dual(&self) -> Poset {
        let n = self.len();
        let leq = (0..n).map(|x| (0..n).map(|y| self.leq[y][x]).collect()).collect();
        Poset::from_leq(self.labels.clone(), leq).expect("dual of a poset is a poset")
    }

    /// The induced subposet on `elements` (kept in the given order).
    pub fn subposet(&self, elements: &[usize]) -> Poset {
        let labels = elements.iter().map(|&x| self.labels[x].clone()).collect();
        let leq = elements.iter().map(|&x| elements.iter().map(|&y| self.leq[x][y]).collect()).collect();
        Poset::from_leq(labels, leq).expect("subposet of a poset is a poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq[x][y]
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq[x][y] || self.leq[y][x]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// The full relation as `(x, y)` pairs, `x <= y`, in basis order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair_index(&self, x: usize, y: usize) -> Option<usize> {
        self.pair_index[x][y]
    }

    /// For the pair `(x, y)` at `k`, the index pairs of `(x, z)` and `(z, y)`
    /// for every `z` in `[x, y]`.
    pub(crate) fn factorizations(&self, k: usize) -> &[(usize, usize)] {
        &self.factorizations[k]
    }

    pub fn linear_extension(&self) -> &[usize] {
        &self.linear_extension
    }

    /// Connected components, each sorted, ordered by least element index.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component_of(&self, x: usize) -> usize {
        self.component_of[x]
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    /// Union of the given components, sorted by element index.
    pub fn component_union(&self, comps: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = comps.iter().flat_map(|&j| self.components[j].iter().copied()).collect();
        out.sort_unstable();
        out
    }

    pub fn down_count(&self, x: usize) -> usize {
        (0..self.len()).filter(|&y| self.leq[y][x]).count()
    }

    pub fn up_count(&self, x: usize) -> usize {
        (0..self.len()).filter(|&y| self.leq[x][y]).count()
    }

    /// `[x, y]`, empty unless `x <= y`.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq[x][z] && self.leq[z][y]).collect()
    }

    pub fn interval_of(&self, x: &str, y: &str) -> Result<Vec<String>> {
        let (x, y) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.interval(x, y).into_iter().map(|z| self.labels[z].clone()).collect())
    }

    pub fn all_comparable_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| (0..self.len()).all(|y| self.comparable(x, y))).collect()
    }

    /// Whether the undirected Hasse diagram of component `j` has no cycle.
    pub fn component_hasse_is_tree(&self, j: usize) -> bool {
        let size = self.components[j].len();
        let edges = self.covers.iter().filter(|&&(x, _)| self.component_of[x] == j).count();
        edges + 1 == size
    }

    /// Bit encoding of the relation, row-major.
    fn code(&self, perm: &[usize]) -> u64 {
        let n = self.len();
        let mut c = 0u64;
        for x in 0..n {
            for y in 0..n {
                if self.leq[x][y] {
                    c |= 1 << (perm[x] * n + perm[y]);
                }
            }
        }
        c
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "elements: {}", self.labels.join(" "))?;
        for &(x, y) in &self.covers {
            write!(f, "\ncover: {} {}", self.labels[x], self.labels[y])?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKind {
    Automorphism,
    AntiAutomorphism,
}

impl MapKind {
    pub fn compose(self, other: MapKind) -> MapKind {
        if self == other {
            MapKind::Automorphism
        } else {
            MapKind::AntiAutomorphism
        }
    }
}

/// An order-preserving or order-reversing bijection of a poset onto itself.
#[derive(Clone, Debug)]
pub struct PosetMap {
    poset: Arc<Poset>,
    image: Vec<usize>,
    kind: MapKind,
}

impl PartialEq for PosetMap {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.image == other.image && *self.poset == *other.poset
    }
}

impl Eq for PosetMap {}

fn respects(p: &Poset, kind: MapKind, x: usize, y: usize, fx: usize, fy: usize) -> bool {
    match kind {
        MapKind::Automorphism => p.leq(x, y) == p.leq(fx, fy),
        MapKind::AntiAutomorphism => p.leq(x, y) == p.leq(fy, fx),
    }
}

impl PosetMap {
    pub fn new(poset: Arc<Poset>, image: Vec<usize>, kind: MapKind) -> Result<PosetMap> {
        let n = poset.len();
        if image.len() != n {
            return Err(Error::NotAPosetMap(format!("expected {n} images, got {}", image.len())));
        }
        let mut seen = vec![false; n];
        for &y in &image {
            if y >= n || std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotAPosetMap("assignment is not a bijection".into()));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !respects(&poset, kind, x, y, image[x], image[y]) {
                    return Err(Error::NotAPosetMap(format!(
                        "{} and {} violate the {:?} condition",
                        poset.label(x),
                        poset.label(y),
                        kind
                    )));
                }
            }
        }
        Ok(PosetMap { poset, image, kind })
    }

    /// An order-reversing map of order two.
    pub fn involution(poset: Arc<Poset>, image: Vec<usize>) -> Result<PosetMap> {
        let m = PosetMap::new(poset, image, MapKind::AntiAutomorphism)
            .map_err(|e| Error::NotAnInvolution(e.to_string()))?;
        if !m.is_involution() {
            return Err(Error::NotAnInvolution("map does not have order two".into()));
        }
        Ok(m)
    }

    /// Build from `(source, target)` label assignments.
    pub fn from_labels(poset: Arc<Poset>, assignment: &[(&str, &str)], kind: MapKind) -> Result<PosetMap> {
        let n = poset.len();
        let mut image = vec![usize::MAX; n];
        for (x, y) in assignment {
            let xi = poset.index_of(x)?;
            if image[xi] != usize::MAX {
                return Err(Error::NotAPosetMap(format!("`{x}` assigned twice")));
            }
            image[xi] = poset.index_of(y)?;
        }
        if let Some(x) = image.iter().position(|&y| y == usize::MAX) {
            return Err(Error::NotAPosetMap(format!("`{}` has no image", poset.label(x))));
        }
        PosetMap::new(poset, image, kind)
    }

    pub fn identity(poset: Arc<Poset>) -> PosetMap {
        let image = (0..poset.len()).collect();
        PosetMap { poset, image, kind: MapKind::Automorphism }
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn is_involution(&self) -> bool {
        self.kind == MapKind::AntiAutomorphism && self.image.iter().enumerate().all(|(x, &y)| self.image[y] == x)
    }

    pub fn inverse(&self) -> PosetMap {
        let mut inv = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        PosetMap { poset: self.poset.clone(), image: inv, kind: self.kind }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PosetMap) -> PosetMap {
        let image = other.image.iter().map(|&y| self.image[y]).collect();
        PosetMap { poset: self.poset.clone(), image, kind: self.kind.compose(other.kind) }
    }

    /// `conj ∘ self ∘ conj⁻¹`.
    pub fn conjugate_by(&self, conj: &PosetMap) -> PosetMap {
        conj.compose(self).compose(&conj.inverse())
    }

    /// Restriction to a map-stable element set; `elements` becomes the index
    /// order of the returned subposet.
    pub fn restrict(&self, elements: &[usize], sub: Arc<Poset>) -> Result<PosetMap> {
        let mut local = HashMap::new();
        for (i, &x) in elements.iter().enumerate() {
            local.insert(x, i);
        }
        let image = elements
            .iter()
            .map(|&x| local.get(&self.image[x]).copied().ok_or(Error::NotStable))
            .collect::<Result<Vec<_>>>()?;
        Ok(PosetMap { poset: sub, image, kind: self.kind })
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.image.len()).filter(|&x| self.image[x] == x).collect()
    }
}

impl fmt::Display for PosetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .image
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", self.poset.label(x), self.poset.label(y)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// All automorphisms or anti-automorphisms (optionally only those of order
/// at most two), in lexicographic order of the image vector.
pub fn enumerate_maps(
    poset: &Arc<Poset>,
    kind: MapKind,
    order_two_only: bool,
    max_size: usize,
) -> Result<Vec<PosetMap>> {
    let n = poset.len();
    bound_check("poset size", n as u128, max_size as u128)?;
    let down: Vec<usize> = (0..n).map(|x| poset.down_count(x)).collect();
    let up: Vec<usize> = (0..n).map(|x| poset.up_count(x)).collect();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&y| match kind {
                    MapKind::Automorphism => down[x] == down[y] && up[x] == up[y],
                    MapKind::AntiAutomorphism => down[x] == up[y] && up[x] == down[y],
                })
                .collect()
        })
        .collect();

    struct Search<'a> {
        poset: &'a Poset,
        kind: MapKind,
        order_two_only: bool,
        candidates: Vec<Vec<usize>>,
        image: Vec<usize>,
        preimage: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    impl Search<'_> {
        fn run(&mut self, x: usize) {
            let n = self.image.len();
            if x == n {
                self.out.push(self.image.clone());
                return;
            }
            for ci in 0..self.candidates[x].len() {
                let y = self.candidates[x][ci];
                if self.preimage[y] != usize::MAX {
                    continue;
                }
                if self.order_two_only {
                    // x is already the image of some earlier x'; x must map back.
                    if let Some(prev) = (0..x).find(|&w| self.image[w] == x) {
                        if prev != y {
                            continue;
                        }
                    }
                    if y < x && self.image[y] != x {
                        continue;
                    }
                }
                let consistent = (0..x).all(|w| {
                    let fw = self.image[w];
                    respects(self.poset, self.kind, w, x, fw, y) && respects(self.poset, self.kind, x, w, y, fw)
                });
                if !consistent {
                    continue;
                }
                self.image[x] = y;
                self.preimage[y] = x;
                self.run(x + 1);
                self.image[x] = usize::MAX;
                self.preimage[y] = usize::MAX;
            }
        }
    }

    let mut search = Search {
        poset,
        kind,
        order_two_only,
        candidates,
        image: vec![usize::MAX; n],
        preimage: vec![usize::MAX; n],
        out: vec![],
    };
    search.run(0);
    Ok(search
        .out
        .into_iter()
        .map(|image| PosetMap { poset: poset.clone(), image, kind })
        .collect())
}

/// All involutions of the poset.
pub fn enumerate_involutions(poset: &Arc<Poset>, max_size: usize) -> Result<Vec<PosetMap>> {
    let maps = enumerate_maps(poset, MapKind::AntiAutomorphism, true, max_size)?;
    Ok(maps.into_iter().filter(|m| m.is_involution()).collect())
}

/// A partition `(X1, X2, X3)` of the elements: `X3` the fixed points, the
/// involution exchanging `X1` and `X2`, `X1` down-closed and `X2` up-closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaDecomposition {
    pub x1: Vec<usize>,
    pub x2: Vec<usize>,
    pub x3: Vec<usize>,
}

impl LambdaDecomposition {
    /// Check the three defining conditions literally; returns the first
    /// violation found.
    pub fn check(&self, poset: &Poset, lambda: &PosetMap) -> std::result::Result<(), String> {
        let n = poset.len();
        let mut side = vec![0u8; n];
        for (s, set) in [(1u8, &self.x1), (2, &self.x2), (3, &self.x3)] {
            for &x in set {
                if side[x] != 0 {
                    return Err(format!("{} appears twice", poset.label(x)));
                }
                side[x] = s;
            }
        }
        if let Some(x) = side.iter().position(|&s| s == 0) {
            return Err(format!("{} is not covered", poset.label(x)));
        }
        for x in 0..n {
            let fixed = lambda.apply(x) == x;
            if fixed != (side[x] == 3) {
                return Err(format!("(i) fails at {}", poset.label(x)));
            }
            match side[x] {
                1 if side[lambda.apply(x)] != 2 => return Err(format!("(ii) fails at {}", poset.label(x))),
                2 if side[lambda.apply(x)] != 1 => return Err(format!("(ii) fails at {}", poset.label(x))),
                _ => {}
            }
            for y in 0..n {
                if side[x] == 1 && poset.leq(y, x) && side[y] != 1 {
                    return Err(format!("(iii) fails: {} <= {}", poset.label(y), poset.label(x)));
                }
                if side[x] == 2 && poset.leq(x, y) && side[y] != 2 {
                    return Err(format!("(iii) fails: {} <= {}", poset.label(x), poset.label(y)));
                }
            }
        }
        Ok(())
    }

    fn side_of(&self, x: usize) -> u8 {
        if self.x1.contains(&x) {
            1
        } else if self.x2.contains(&x) {
            2
        } else {
            3
        }
    }
}

fn propagate(poset: &Poset, lambda: &PosetMap, side: &mut [u8], start: usize, s: u8) -> bool {
    let n = poset.len();
    let mut queue = VecDeque::new();
    let assign = |x: usize, s: u8, side: &mut [u8], queue: &mut VecDeque<usize>| -> bool {
        if side[x] == 0 {
            side[x] = s;
            queue.push_back(x);
            true
        } else {
            side[x] == s
        }
    };
    if !assign(start, s, side, &mut queue) {
        return false;
    }
    while let Some(x) = queue.pop_front() {
        let s = side[x];
        if !assign(lambda.apply(x), 3 - s, side, &mut queue) {
            return false;
        }
        for y in 0..n {
            let related = if s == 1 { poset.lt(y, x) } else { poset.lt(x, y) };
            if related && !assign(y, s, side, &mut queue) {
                return false;
            }
        }
    }
    true
}

/// A canonical λ-decomposition by constraint propagation. Elements below a
/// fixed point go to `X1`, above one to `X2`; unconstrained orbits put
/// their label-least element in `X1`.
pub fn lambda_decomposition(poset: &Poset, lambda: &PosetMap) -> Result<LambdaDecomposition> {
    if !lambda.is_involution() {
        return Err(Error::NotAnInvolution(lambda.to_string()));
    }
    let n = poset.len();
    // 0 = unassigned, 3 = fixed.
    let mut side = vec![0u8; n];
    for x in lambda.fixed_points() {
        side[x] = 3;
    }
    let inconsistent =
        |x: usize| Error::InternalInconsistency(format!("λ-decomposition propagation conflict at {}", poset.label(x)));
    for x in 0..n {
        if side[x] == 3 {
            continue;
        }
        let below_fixed = (0..n).any(|f| side[f] == 3 && poset.lt(x, f));
        let above_fixed = (0..n).any(|f| side[f] == 3 && poset.lt(f, x));
        match (below_fixed, above_fixed) {
            (true, true) => return Err(inconsistent(x)),
            (true, false) if !propagate(poset, lambda, &mut side, x, 1) => return Err(inconsistent(x)),
            (false, true) if !propagate(poset, lambda, &mut side, x, 2) => return Err(inconsistent(x)),
            _ => {}
        }
    }
    let mut by_label: Vec<usize> = (0..n).collect();
    by_label.sort_by(|&a, &b| poset.label(a).cmp(poset.label(b)));
    for x in by_label {
        if side[x] != 0 {
            continue;
        }
        let mut trial = side.clone();
        if propagate(poset, lambda, &mut trial, x, 1) {
            side = trial;
            continue;
        }
        let mut trial = side.clone();
        if propagate(poset, lambda, &mut trial, x, 2) {
            side = trial;
            continue;
        }
        return Err(inconsistent(x));
    }
    let pick = |s: u8| (0..n).filter(|&x| side[x] == s).collect();
    Ok(LambdaDecomposition { x1: pick(1), x2: pick(2), x3: pick(3) })
}

/// The `(P1, P2, P3)` parts of a λ-decomposition inside one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PSets {
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub p3: Vec<usize>,
}

/// What an involution does to the component index set `J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInvolution {
    /// `lambda_bar[j]` is the component `λ(X_j)`.
    pub lambda_bar: Vec<usize>,
    /// Components mapped onto themselves.
    pub j3: Vec<usize>,
    /// Those components of `j3` without a fixed point.
    pub j3_prime: Vec<usize>,
    pub p_sets: BTreeMap<usize, PSets>,
    pub decomposition: LambdaDecomposition,
}

impl ComponentInvolution {
    /// The λ̄-decomposition `(J1, J2, J3)` of `J`: each swapped pair puts its
    /// smaller index in `J1`.
    pub fn j_decomposition(&self) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let mut j1 = vec![];
        let mut j2 = vec![];
        for (j, &k) in self.lambda_bar.iter().enumerate() {
            if j < k {
                j1.push(j);
            } else if j > k {
                j2.push(j);
            }
        }
        (j1, j2, self.j3.clone())
    }
}

pub fn component_involution(poset: &Poset, lambda: &PosetMap) -> Result<ComponentInvolution> {
    if !lambda.is_involution() {
        return Err(Error::NotAnInvolution(lambda.to_string()));
    }
    let lambda_bar: Vec<usize> = poset
        .components()
        .iter()
        .map(|c| poset.component_of(lambda.apply(c[0])))
        .collect();
    for (j, comp) in poset.components().iter().enumerate() {
        let target = lambda_bar[j];
        if comp.iter().any(|&x| poset.component_of(lambda.apply(x)) != target)
            || poset.components()[target].len() != comp.len()
        {
            return Err(Error::InternalInconsistency(format!("λ does not map component {j} onto a component")));
        }
    }
    let decomposition = lambda_decomposition(poset, lambda)?;
    let j3: Vec<usize> = (0..lambda_bar.len()).filter(|&j| lambda_bar[j] == j).collect();
    let mut p_sets = BTreeMap::new();
    for &j in &j3 {
        let mut sets = PSets { p1: vec![], p2: vec![], p3: vec![] };
        for &x in &poset.components()[j] {
            match decomposition.side_of(x) {
                1 => sets.p1.push(x),
                2 => sets.p2.push(x),
                _ => sets.p3.push(x),
            }
        }
        p_sets.insert(j, sets);
    }
    let j3_prime = j3.iter().copied().filter(|j| p_sets[j].p3.is_empty()).collect();
    Ok(ComponentInvolution { lambda_bar, j3, j3_prime, p_sets, decomposition })
}

/// An automorphism `α` with `α∘λ = μ∘α`, if any; the first in enumeration
/// order is returned.
pub fn poset_involutions_conjugate(lambda: &PosetMap, mu: &PosetMap, max_size: usize) -> Result<Option<PosetMap>> {
    if *lambda.poset() != *mu.poset() {
        return Err(Error::Mismatch);
    }
    let autos = enumerate_maps(lambda.poset(), MapKind::Automorphism, false, max_size)?;
    Ok(autos.into_iter().find(|a| a.compose(lambda) == mu.compose(a)))
}

/// All posets on exactly `n` elements up to isomorphism, labelled `a, b, ...`
/// with a natural labelling (x < y implies index x < index y).
pub fn posets_up_to_iso(n: usize) -> Vec<Poset> {
    assert!(n <= 6, "corpus generation is limited to six elements");
    let strict: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let labels: Vec<String> = (0..n).map(default_label).collect();
    let perms = permutations(n);
    let mut seen = BTreeMap::new();
    for mask in 0u64..(1 << strict.len()) {
        let mut leq = vec![vec![false; n]; n];
        for (b, &(i, j)) in strict.iter().enumerate() {
            if mask >> b & 1 == 1 {
                leq[i][j] = true;
            }
        }
        let closed = (0..n).all(|i| {
            (0..n).all(|k| !leq[i][k] || (0..n).all(|j| !leq[k][j] || leq[i][j]))
        });
        if !closed {
            continue;
        }
        let p = Poset::from_leq(labels.clone(), leq).expect("naturally labelled relation is a poset");
        let canon = perms.iter().map(|perm| p.code(perm)).min().unwrap_or(0);
        seen.entry(canon).or_insert(p);
    }
    let mut out: Vec<Poset> = seen.into_values().collect();
    out.sort_by_key(|p| (p.num_pairs(), p.code(&(0..n).collect::<Vec<_>>())));
    out
}

/// All posets with `1..=max_n` elements up to isomorphism.
pub fn posets_up_to(max_n: usize) -> Vec<Poset> {
    (1..=max_n).flat_map(posets_up_to_iso).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = vec![];
    go(&mut vec![], &mut vec![false; n], &mut out);
    out
}

/// A random naturally labelled poset: each pair `i < j` is related with
/// probability `density` before closure.
pub fn random_poset<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Poset {
    let labels: Vec<String> = (0..n).map(default_label).collect();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            leq[i][j] = rng.gen_bool(density);
        }
    }
    Poset::from_leq(labels, leq).expect("naturally labelled relation is a poset")
}
