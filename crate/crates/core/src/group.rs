//! Finite groups as multiplication tables. The identity is always index 0.

use crate::error::{Error, Result};
use crate::report::{Check, Status};

/// A finite group given by its multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    n: usize,
    /// Flat row-major table: `table[g * n + h] = g·h`.
    table: Vec<usize>,
    inv: Vec<usize>,
    name: String,
    /// Set when the group was built as a product of cyclic factors
    /// Z_{n₁}×…×Z_{n_k}; element index is the mixed-radix encoding of
    /// (a₁,…,a_k) with the last factor fastest.
    cyclic_factors: Option<Vec<usize>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl FiniteGroup {
    /// Builds a group from a table, validating all axioms.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let checks = check_group_axioms(&table);
        if let Some(bad) = checks.iter().find(|c| c.status == Status::Fail) {
            return Err(Error::InvalidGroup(format!(
                "{}: {}",
                bad.name,
                bad.detail.clone().unwrap_or_default()
            )));
        }
        let n = table.len();
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let mut inv = vec![0usize; n];
        for g in 0..n {
            inv[g] = (0..n).find(|&h| flat[g * n + h] == 0).unwrap();
        }
        Ok(FiniteGroup {
            n,
            table: flat,
            inv,
            name: format!("table{n}"),
            cyclic_factors: None,
        })
    }

    /// Z_k with addition mod k.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("cyclic group needs order >= 1".into()));
        }
        let mut g = Self::from_table(
            (0..k).map(|a| (0..k).map(|b| (a + b) % k).collect()).collect(),
        )?;
        g.name = format!("z{k}");
        g.cyclic_factors = Some(vec![k]);
        Ok(g)
    }

    /// Direct product; index of (a, b) is a·|B| + b.
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Self {
        let (na, nb) = (a.n, b.n);
        let n = na * nb;
        let mut table = vec![0usize; n * n];
        for ga in 0..na {
            for gb in 0..nb {
                for ha in 0..na {
                    for hb in 0..nb {
                        let g = ga * nb + gb;
                        let h = ha * nb + hb;
                        table[g * n + h] = a.mul(ga, ha) * nb + b.mul(gb, hb);
                    }
                }
            }
        }
        let mut inv = vec![0usize; n];
        for g in 0..n {
            inv[g] = a.inv(g / nb) * nb + b.inv(g % nb);
        }
        let cyclic_factors = match (&a.cyclic_factors, &b.cyclic_factors) {
            (Some(fa), Some(fb)) => {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                Some(f)
            }
            _ => None,
        };
        FiniteGroup {
            n,
            table,
            inv,
            name: format!("{}x{}", a.name, b.name),
            cyclic_factors,
        }
    }

    /// Dihedral group of order 2k: r^i s^j with index i + k·j,
    /// (r^i s^j)(r^p s^q) = r^{i + (-1)^j p} s^{j+q}.
    pub fn dihedral(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("dihedral needs k >= 1".into()));
        }
        let n = 2 * k;
        let idx = |i: usize, j: usize| i % k + k * (j % 2);
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..k {
            for j in 0..2 {
                for p in 0..k {
                    for q in 0..2 {
                        let ii = if j == 0 { (i + p) % k } else { (i + k - p) % k };
                        table[idx(i, j)][idx(p, q)] = idx(ii, j + q);
                    }
                }
            }
        }
        let mut g = Self::from_table(table)?;
        g.name = format!("d{k}");
        Ok(g)
    }

    /// Symmetric group on 3 letters; permutations in lexicographic order,
    /// composed as (σ∘τ)(x) = σ(τ(x)).
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut table = vec![vec![0usize; 6]; 6];
        for (i, s) in perms.iter().enumerate() {
            for (j, t) in perms.iter().enumerate() {
                let comp = [s[t[0]], s[t[1]], s[t[2]]];
                table[i][j] = find(&comp);
            }
        }
        let mut g = Self::from_table(table).expect("composition table is a group");
        g.name = "s3".into();
        g
    }

    /// Heisenberg group over Z_p: triples (a,b,c) with
    /// (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b'), index a·p² + b·p + c.
    pub fn heisenberg(p: usize) -> Result<Self> {
        if !matches!(p, 2 | 3 | 5) {
            return Err(Error::InvalidGroup(format!(
                "heisenberg parameter must be a prime in {{2,3,5}}, got {p}"
            )));
        }
        let n = p * p * p;
        let idx = |a: usize, b: usize, c: usize| a * p * p + b * p + c;
        let mut table = vec![vec![0usize; n]; n];
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for a2 in 0..p {
                        for b2 in 0..p {
                            for c2 in 0..p {
                                table[idx(a, b, c)][idx(a2, b2, c2)] =
                                    idx((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p);
                            }
                        }
                    }
                }
            }
        }
        let mut g = Self::from_table(table)?;
        g.name = format!("heis{p}");
        Ok(g)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.n + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|g| self.table[g * self.n..(g + 1) * self.n].to_vec())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|g| (0..self.n).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&g| (0..self.n).all(|h| self.mul(g, h) == self.mul(h, g)))
            .collect()
    }

    /// Decodes an element of a product of cyclics into its digit tuple.
    pub fn digits(&self, g: usize) -> Option<Vec<usize>> {
        let factors = self.cyclic_factors.as_ref()?;
        let mut rem = g;
        let mut out = vec![0usize; factors.len()];
        for (i, &f) in factors.iter().enumerate().rev() {
            out[i] = rem % f;
            rem /= f;
        }
        Some(out)
    }
}

/// Validates the group axioms on a raw table, reporting each separately with
/// the first violation found.
pub fn check_group_axioms(table: &[Vec<usize>]) -> Vec<Check> {
    let n = table.len();
    let mut checks = Vec::new();
    let mut push = |name: &str, ok: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual: None,
            detail: if ok { None } else { Some(detail) },
        });
    };

    let mut shape_ok = n > 0;
    let mut shape_detail = if n == 0 { "empty table".to_string() } else { String::new() };
    'shape: for (g, row) in table.iter().enumerate() {
        if row.len() != n {
            shape_ok = false;
            shape_detail = format!("row {g} has length {} (want {n})", row.len());
            break;
        }
        for (h, &v) in row.iter().enumerate() {
            if v >= n {
                shape_ok = false;
                shape_detail = format!("entry ({g},{h}) = {v} out of range");
                break 'shape;
            }
        }
    }
    push("closure", shape_ok, shape_detail);
    if !shape_ok {
        return checks;
    }

    let first_bad_identity = (0..n).find(|&g| table[0][g] != g || table[g][0] != g);
    push(
        "identity",
        first_bad_identity.is_none(),
        first_bad_identity
            .map(|g| format!("0·{g} = {} or {g}·0 = {}", table[0][g], table[g][0]))
            .unwrap_or_default(),
    );

    let mut assoc_bad = None;
    'assoc: for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                if table[table[g][h]][k] != table[g][table[h][k]] {
                    assoc_bad = Some((g, h, k));
                    break 'assoc;
                }
            }
        }
    }
    push(
        "associativity",
        assoc_bad.is_none(),
        assoc_bad
            .map(|(g, h, k)| format!("(g,h,k) = ({g},{h},{k}) violates associativity"))
            .unwrap_or_default(),
    );

    let no_inverse =
        (0..n).find(|&g| !(0..n).any(|h| table[g][h] == 0 && table[h][g] == 0));
    push(
        "inverses",
        no_inverse.is_none(),
        no_inverse.map(|g| format!("element {g} has no two-sided inverse")).unwrap_or_default(),
    );

    checks
}

/// A subgroup, stored with a clone of its parent.
#[derive(Debug, Clone)]
pub struct Subgroup {
    parent: FiniteGroup,
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() != Some(&0) {
            return Err(Error::InvalidGroup("subgroup must contain the identity".into()));
        }
        if let Some(&g) = elements.iter().find(|&&g| g >= parent.order()) {
            return Err(Error::InvalidGroup(format!("element {g} out of range")));
        }
        for &g in &elements {
            if elements.binary_search(&parent.inv(g)).is_err() {
                return Err(Error::InvalidGroup(format!("not closed under inverse at {g}")));
            }
            for &h in &elements {
                if elements.binary_search(&parent.mul(g, h)).is_err() {
                    return Err(Error::InvalidGroup(format!(
                        "not closed under product at ({g},{h})"
                    )));
                }
            }
        }
        Ok(Subgroup {
            parent: parent.clone(),
            elements,
        })
    }

    /// Smallest subgroup containing the generators.
    pub fn generated_by(parent: &FiniteGroup, gens: &[usize]) -> Result<Self> {
        if let Some(&g) = gens.iter().find(|&&g| g >= parent.order()) {
            return Err(Error::InvalidGroup(format!("generator {g} out of range")));
        }
        let mut seen = vec![false; parent.order()];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            for &s in gens {
                for h in [parent.mul(g, s), parent.mul(g, parent.inv(s))] {
                    if !seen[h] {
                        seen[h] = true;
                        frontier.push(h);
                    }
                }
            }
        }
        let elements = (0..parent.order()).filter(|&g| seen[g]).collect();
        Self::new(parent, elements)
    }

    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    /// Position of g in the element list, when present.
    pub fn index_of(&self, g: usize) -> Option<usize> {
        self.elements.binary_search(&g).ok()
    }
}

/// A section of the left cosets gH: one representative per coset, with the
/// identity coset represented by 0 and all others by their smallest element.
#[derive(Debug, Clone)]
pub struct CosetSection {
    subgroup: Subgroup,
    reps: Vec<usize>,
    /// rep_of[g] = representative of the coset gH.
    rep_of: Vec<usize>,
}

impl CosetSection {
    pub fn new(subgroup: Subgroup) -> Self {
        let parent = subgroup.parent().clone();
        let n = parent.order();
        let mut rep_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if rep_of[g] != usize::MAX {
                continue;
            }
            // g is the smallest element of an unvisited coset, hence its rep.
            reps.push(g);
            for &h in subgroup.elements() {
                rep_of[parent.mul(g, h)] = g;
            }
        }
        CosetSection {
            subgroup,
            reps,
            rep_of,
        }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    pub fn representative_of(&self, g: usize) -> usize {
        self.rep_of[g]
    }

    /// Factors g = s·h with s the coset representative and h ∈ H.
    pub fn decompose(&self, g: usize) -> (usize, usize) {
        let parent = self.subgroup.parent();
        let s = self.rep_of[g];
        let h = parent.mul(parent.inv(s), g);
        debug_assert!(self.subgroup.contains(h));
        (s, h)
    }
}

/// Builds the section of left cosets of H in G.
pub fn coset_section(g: &FiniteGroup, h: &Subgroup) -> Result<CosetSection> {
    if h.parent() != g {
        return Err(Error::InvalidGroup("subgroup belongs to a different group".into()));
    }
    Ok(CosetSection::new(h.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_presets() -> Vec<FiniteGroup> {
        vec![
            FiniteGroup::cyclic(1).unwrap(),
            FiniteGroup::cyclic(2).unwrap(),
            FiniteGroup::cyclic(4).unwrap(),
            FiniteGroup::product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(2).unwrap()),
            FiniteGroup::product(&FiniteGroup::cyclic(3).unwrap(), &FiniteGroup::cyclic(3).unwrap()),
            FiniteGroup::dihedral(4).unwrap(),
            FiniteGroup::symmetric3(),
            FiniteGroup::heisenberg(2).unwrap(),
            FiniteGroup::heisenberg(3).unwrap(),
        ]
    }

    #[test]
    fn presets_satisfy_axioms() {
        for g in all_presets() {
            let checks = check_group_axioms(&g.table_rows());
            assert!(
                checks.iter().all(|c| c.status == Status::Pass),
                "axioms fail for {}",
                g.name()
            );
        }
    }

    #[test]
    fn cyclic_one_is_trivial() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn cyclic_four_is_modular_addition() {
        let g = FiniteGroup::cyclic(4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(g.mul(a, b), (a + b) % 4);
            }
        }
    }

    #[test]
    fn broken_table_reports_inverse_failure() {
        let checks = check_group_axioms(&[vec![0, 1], vec![1, 1]]);
        let inv = checks.iter().find(|c| c.name == "inverses").unwrap();
        assert_eq!(inv.status, Status::Fail);
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
    }

    #[test]
    fn heisenberg3_center_has_order_three() {
        // Independent oracle: brute-force centralizer on the built table.
        let g = FiniteGroup::heisenberg(3).unwrap();
        assert_eq!(g.order(), 27);
        assert!(!g.is_abelian());
        let center = g.center();
        assert_eq!(center.len(), 3);
        // Center must be {(0,0,c)} = indices {0,1,2} in the a·9+b·3+c encoding.
        assert_eq!(center, vec![0, 1, 2]);
    }

    #[test]
    fn dihedral_is_nonabelian_of_right_order() {
        let g = FiniteGroup::dihedral(4).unwrap();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        // r·s ≠ s·r for r = index 1, s = index 4.
        assert_ne!(g.mul(1, 4), g.mul(4, 1));
    }

    #[test]
    fn symmetric3_matches_hand_composition() {
        let g = FiniteGroup::symmetric3();
        // [1,0,2] ∘ [0,2,1] = [1,2,0]: indices 2 ∘ 1 = 3.
        assert_eq!(g.mul(2, 1), 3);
        // and the reverse order gives [2,0,1] = index 4.
        assert_eq!(g.mul(1, 2), 4);
    }

    #[test]
    fn product_digits_round_trip() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        let g = FiniteGroup::product(&z2, &FiniteGroup::cyclic(3).unwrap());
        assert_eq!(g.cyclic_factors(), Some(&[2, 3][..]));
        for e in g.elements() {
            let d = g.digits(e).unwrap();
            assert_eq!(d[0] * 3 + d[1], e);
        }
    }

    #[test]
    fn lagrange_holds_for_generated_subgroups() {
        for g in all_presets() {
            for gen in 0..g.order() {
                let h = Subgroup::generated_by(&g, &[gen]).unwrap();
                assert_eq!(g.order() % h.len(), 0, "Lagrange fails in {}", g.name());
                let sec = CosetSection::new(h.clone());
                assert_eq!(sec.representatives().len() * h.len(), g.order());
            }
        }
    }

    #[test]
    fn coset_section_of_z4_mod_two_element_subgroup() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let h = Subgroup::new(&g, vec![0, 2]).unwrap();
        let sec = coset_section(&g, &h).unwrap();
        assert_eq!(sec.representatives(), &[0, 1]);
        assert_eq!(sec.representative_of(3), 1);
        let (s, hh) = sec.decompose(3);
        assert_eq!((s, hh), (1, 2));
    }

    #[test]
    fn coset_section_edge_cases() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let whole = Subgroup::new(&g, (0..4).collect()).unwrap();
        assert_eq!(CosetSection::new(whole).representatives(), &[0]);
        let trivial = Subgroup::new(&g, vec![0]).unwrap();
        let sec = CosetSection::new(trivial);
        assert_eq!(sec.representatives(), &[0, 1, 2, 3]);
    }

    #[test]
    fn subgroup_rejects_unclosed_sets() {
        let g = FiniteGroup::cyclic(4).unwrap();
        assert!(Subgroup::new(&g, vec![0, 1]).is_err());
        assert!(Subgroup::new(&g, vec![1, 3]).is_err());
    }
}
