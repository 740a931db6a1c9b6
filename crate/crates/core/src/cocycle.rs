//! Unit-circle and real-valued 2-cocycles on a finite group, with their
//! derived cochains, coboundary tests, normalization, and homotopy paths.

use crate::error::{Error, Result};
use crate::group::{CosetSection, FiniteGroup};
use crate::scalar::{arg, c_one, modulus, r, sample_phase, to_f64, unit_phase, Cx, Real};
use rand_chacha::ChaCha8Rng;

/// Default acceptance tolerance for multiplicative cocycle residuals.
pub const COCYCLE_TOL: f64 = 1e-10;
/// Tolerance on |value| = 1 for stored tables.
pub const MODULUS_TOL: f64 = 1e-12;

/// A T-valued 2-cocycle: unit-modulus table ω(g,h) with
/// ω(g,h)ω(gh,k) = ω(g,hk)ω(h,k).
#[derive(Debug, Clone)]
pub struct Cocycle2<T: Real> {
    group: FiniteGroup,
    /// Flat row-major table, vals[g·n + h] = ω(g,h).
    vals: Vec<Cx<T>>,
}

/// A 1-cochain: unit-modulus function on the group.
#[derive(Debug, Clone)]
pub struct Cochain1<T: Real> {
    group: FiniteGroup,
    vals: Vec<Cx<T>>,
}

/// An R-valued (additive) 2-cocycle: c(g,h)+c(gh,k) = c(g,hk)+c(h,k).
#[derive(Debug, Clone)]
pub struct RealCocycle2<T: Real> {
    group: FiniteGroup,
    vals: Vec<T>,
}

/// The exponential homotopy ω_t = ω₀·e^{itc}, t ∈ [0,1].
#[derive(Debug, Clone)]
pub struct HomotopyPath<T: Real> {
    base: Cocycle2<T>,
    generator: RealCocycle2<T>,
}

impl<T: Real> Cocycle2<T> {
    /// Validating constructor: checks modulus and the cocycle identity.
    pub fn new(group: FiniteGroup, vals: Vec<Cx<T>>) -> Result<Self> {
        let c = Self::new_unchecked(group, vals)?;
        let bad_mod = c.vals.iter().any(|z| {
            (to_f64(modulus(*z)) - 1.0).abs() > MODULUS_TOL
        });
        if bad_mod {
            return Err(Error::InvalidCocycle("table entry off the unit circle".into()));
        }
        let (res, worst) = c.residual();
        if to_f64(res) >= COCYCLE_TOL {
            let (g, h, k) = worst;
            return Err(Error::InvalidCocycle(format!(
                "cocycle identity fails at (g,h,k) = ({g},{h},{k}), residual {:.3e}",
                to_f64(res)
            )));
        }
        Ok(c)
    }

    /// Shape-checked constructor that skips the algebraic validation.
    /// Exists so suites can probe deliberately corrupted tables.
    pub fn new_unchecked(group: FiniteGroup, vals: Vec<Cx<T>>) -> Result<Self> {
        let n = group.order();
        if vals.len() != n * n {
            return Err(Error::InvalidCocycle(format!(
                "table has {} entries, want {}",
                vals.len(),
                n * n
            )));
        }
        Ok(Cocycle2 { group, vals })
    }

    pub fn trivial(group: FiniteGroup) -> Self {
        let n = group.order();
        Cocycle2 {
            group,
            vals: vec![c_one(); n * n],
        }
    }

    /// Bicharacter cocycle on a product of cyclics:
    /// ω(a,b) = exp(2πi·Σ_{p,q} B[p][q]·a_p·b_q / n_q), digits 0-based.
    pub fn bicharacter(group: &FiniteGroup, b: &[Vec<i64>]) -> Result<Self> {
        let factors = group.cyclic_factors().ok_or_else(|| {
            Error::InvalidInput("bicharacter needs a group presented as a product of cyclics".into())
        })?;
        let k = factors.len();
        if b.len() != k || b.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput(format!(
                "bicharacter matrix must be {k}x{k}"
            )));
        }
        let n = group.order();
        let mut vals = Vec::with_capacity(n * n);
        for g in 0..n {
            let dg = group.digits(g).unwrap();
            for h in 0..n {
                let dh = group.digits(h).unwrap();
                let mut theta = 0.0f64;
                for p in 0..k {
                    for q in 0..k {
                        let num = (b[p][q] * dg[p] as i64 * dh[q] as i64)
                            .rem_euclid(factors[q] as i64);
                        theta += num as f64 / factors[q] as f64;
                    }
                }
                vals.push(unit_phase(r::<T>(theta * std::f64::consts::TAU)));
            }
        }
        // The matrix may be incompatible with unequal factor sizes.
        Self::new(group.clone(), vals)
    }

    #[inline]
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    #[inline]
    pub fn value(&self, g: usize, h: usize) -> Cx<T> {
        self.vals[g * self.group.order() + h]
    }

    /// Max residual of the cocycle identity, with the worst triple.
    pub fn residual(&self) -> (T, (usize, usize, usize)) {
        let n = self.group.order();
        let mut worst = T::zero();
        let mut at = (0, 0, 0);
        for g in 0..n {
            for h in 0..n {
                let gh = self.group.mul(g, h);
                let a = self.value(g, h);
                for k in 0..n {
                    let lhs = a * self.value(gh, k);
                    let rhs = self.value(g, self.group.mul(h, k)) * self.value(h, k);
                    let d = modulus(lhs - rhs);
                    if d > worst {
                        worst = d;
                        at = (g, h, k);
                    }
                }
            }
        }
        (worst, at)
    }

    /// ω̃(g,h) = ω(h⁻¹, g⁻¹). An involution; a cocycle whenever ω is.
    pub fn tilde(&self) -> Self {
        let n = self.group.order();
        let mut vals = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                vals.push(self.value(self.group.inv(h), self.group.inv(g)));
            }
        }
        Cocycle2 {
            group: self.group.clone(),
            vals,
        }
    }

    /// Pointwise conjugate ω̄.
    pub fn bar(&self) -> Self {
        Cocycle2 {
            group: self.group.clone(),
            vals: self.vals.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidInput("cocycles live on different groups".into()));
        }
        Ok(Cocycle2 {
            group: self.group.clone(),
            vals: self
                .vals
                .iter()
                .zip(other.vals.iter())
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// v(g) = ω(g⁻¹,g)·ω(e,e); satisfies ω̃ = ω̄·∂v.
    pub fn v_of(&self) -> Result<Cochain1<T>> {
        let n = self.group.order();
        let wee = self.value(0, 0);
        let vals: Vec<Cx<T>> = (0..n)
            .map(|g| self.value(self.group.inv(g), g) * wee)
            .collect();
        let v = Cochain1 {
            group: self.group.clone(),
            vals,
        };
        // ω̃ = ω̄·∂v is an identity of valid cocycles; a violation means the
        // table was corrupted.
        let lhs = self.tilde();
        let rhs = self.bar().product(&v.coboundary())?;
        let dev = lhs.max_abs_diff(&rhs);
        if to_f64(dev) > 1e-10 {
            return Err(Error::InvalidCocycle(format!(
                "tilde/bar/coboundary identity fails (deviation {:.3e}); corrupted table",
                to_f64(dev)
            )));
        }
        Ok(v)
    }

    /// u(g) = conj(v(g)).
    pub fn u_of(&self) -> Result<Cochain1<T>> {
        Ok(self.v_of()?.conj())
    }

    /// Max entrywise |ω − ν|.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.vals
            .iter()
            .zip(other.vals.iter())
            .map(|(a, b)| modulus(*a - *b))
            .fold(T::zero(), |acc, d| if d > acc { d } else { acc })
    }

    /// Max entrywise distance from the trivial cocycle.
    pub fn max_dist_from_trivial(&self) -> T {
        self.vals
            .iter()
            .map(|z| modulus(*z - c_one()))
            .fold(T::zero(), |acc, d| if d > acc { d } else { acc })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        let n = self.group.order();
        (0..n).all(|g| {
            to_f64(modulus(self.value(g, 0) - c_one())) < tol
                && to_f64(modulus(self.value(0, g) - c_one())) < tol
                && to_f64(modulus(self.value(g, self.group.inv(g)) - c_one())) < tol
        })
    }

    /// Returns (ω', v) with ω' = ω·∂v satisfying
    /// ω'(g,e) = ω'(e,g) = ω'(g,g⁻¹) = 1. Coboundaries normalize all the way
    /// to the trivial cocycle.
    pub fn normalize(&self) -> Result<(Self, Cochain1<T>)> {
        if let Some(w) = self.is_coboundary() {
            // ω = ∂w, so ∂(conj w) cancels it exactly.
            let v = w.conj();
            let normalized = self.product(&v.coboundary())?;
            if to_f64(normalized.max_dist_from_trivial()) > 1e-8 {
                return Err(Error::Numerical("normalization postcondition failed".into()));
            }
            return Ok((normalized, v));
        }
        let n = self.group.order();
        // Constant correction c makes ω(e,e) = 1 (hence ω(g,e) = ω(e,g) = 1);
        // the square-root correction s then cancels ω(g,g⁻¹). s is computed
        // once per unordered pair {g, g⁻¹} so both elements share a root
        // branch (ω(g,g⁻¹) = ω(g⁻¹,g) for every cocycle).
        let c = self.value(0, 0).conj();
        let mut s = vec![c_one::<T>(); n];
        for g in 0..n {
            let gi = self.group.inv(g);
            if gi < g {
                s[g] = s[gi];
                continue;
            }
            let w1 = self.value(g, gi) * c;
            s[g] = unit_phase(-arg(w1) / r::<T>(2.0));
        }
        let v = Cochain1 {
            group: self.group.clone(),
            vals: (0..n).map(|g| c * s[g]).collect(),
        };
        let normalized = self.product(&v.coboundary())?;
        if !normalized.is_normalized(1e-10) {
            return Err(Error::Numerical("normalization postcondition failed".into()));
        }
        Ok((normalized, v))
    }

    /// Decides whether ω is a coboundary, returning a verified witness.
    ///
    /// Exact reduction: Π_h ω(g,h) = P(g) satisfies ∂P = ω^n, so
    /// κ = ω·conj(∂(P^{1/n})) takes values in the n-th roots of unity exactly;
    /// ω is a coboundary iff the integer system ∂x ≡ k (mod n) for the root
    /// exponents k is solvable. The witness is verified multiplicatively at
    /// 1e-9 before being returned.
    pub fn is_coboundary(&self) -> Option<Cochain1<T>> {
        let n = self.group.order();
        if n == 1 {
            return Some(Cochain1 {
                group: self.group.clone(),
                vals: vec![self.value(0, 0)],
            });
        }
        // Abelian obstruction: the antisymmetrization β(g,h) = ω(g,h)/ω(h,g)
        // of a coboundary is ≡ 1.
        if self.group.is_abelian() {
            for g in 0..n {
                for h in 0..n {
                    if to_f64(modulus(self.value(g, h) - self.value(h, g))) > 1e-8 {
                        return None;
                    }
                }
            }
        }
        // Principal n-th root of the row product.
        let root: Vec<Cx<T>> = (0..n)
            .map(|g| {
                let mut p = c_one::<T>();
                for h in 0..n {
                    p *= self.value(g, h);
                }
                unit_phase(arg(p) / r::<T>(n as f64))
            })
            .collect();
        // Exponents of κ = ω·conj(∂root) as n-th roots of unity.
        let m = n as i64;
        let mut k = vec![0i64; n * n];
        for g in 0..n {
            for h in 0..n {
                let gh = self.group.mul(g, h);
                let kappa = self.value(g, h) * (root[g] * root[h] * root[gh].conj()).conj();
                let t = to_f64(arg(kappa)) / std::f64::consts::TAU * n as f64;
                let ki = t.round() as i64;
                if (t - ki as f64).abs() > 0.01 {
                    // Not a root of unity: cannot happen for a true cocycle
                    // table; bail out rather than round garbage.
                    return None;
                }
                k[g * n + h] = ki.rem_euclid(m);
            }
        }
        let x = solve_additive_coboundary(&self.group, &k)?;
        let vals: Vec<Cx<T>> = (0..n)
            .map(|g| {
                root[g] * unit_phase(r::<T>(x[g] as f64 / n as f64 * std::f64::consts::TAU))
            })
            .collect();
        let witness = Cochain1 {
            group: self.group.clone(),
            vals,
        };
        let dev = witness.coboundary().max_abs_diff(self);
        if to_f64(dev) < 1e-9 {
            Some(witness)
        } else {
            None
        }
    }
}

/// Solves x(g) + x(h) − x(gh) ≡ k(g,h) (mod n) by propagation from x(e),
/// branching over the possible values of elements outside the subgroup
/// generated so far. Returns any one solution.
fn solve_additive_coboundary(group: &FiniteGroup, k: &[i64]) -> Option<Vec<i64>> {
    let n = group.order();
    let m = n as i64;
    let mut x: Vec<Option<i64>> = vec![None; n];
    // g = h = e gives x(e) = k(e,e).
    x[0] = Some(k[0].rem_euclid(m));

    fn propagate(
        group: &FiniteGroup,
        k: &[i64],
        m: i64,
        x: &mut [Option<i64>],
    ) -> bool {
        let n = group.order();
        loop {
            let mut changed = false;
            for g in 0..n {
                let Some(xg) = x[g] else { continue };
                for h in 0..n {
                    let Some(xh) = x[h] else { continue };
                    let gh = group.mul(g, h);
                    let want = (xg + xh - k[g * n + h]).rem_euclid(m);
                    match x[gh] {
                        None => {
                            x[gh] = Some(want);
                            changed = true;
                        }
                        Some(v) if v != want => return false,
                        _ => {}
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(
        group: &FiniteGroup,
        k: &[i64],
        m: i64,
        x: Vec<Option<i64>>,
        budget: &mut u32,
    ) -> Option<Vec<i64>> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let mut x = x;
        if !propagate(group, k, m, &mut x) {
            return None;
        }
        let Some(free) = x.iter().position(|v| v.is_none()) else {
            return Some(x.into_iter().map(|v| v.unwrap()).collect());
        };
        for val in 0..m {
            let mut trial = x.clone();
            trial[free] = Some(val);
            if let Some(sol) = search(group, k, m, trial, budget) {
                return Some(sol);
            }
        }
        None
    }

    let mut budget = 200_000u32;
    search(group, k, m, x, &mut budget)
}

impl<T: Real> Cochain1<T> {
    pub fn new(group: FiniteGroup, vals: Vec<Cx<T>>) -> Result<Self> {
        if vals.len() != group.order() {
            return Err(Error::InvalidInput("cochain length mismatch".into()));
        }
        if vals
            .iter()
            .any(|z| (to_f64(modulus(*z)) - 1.0).abs() > MODULUS_TOL)
        {
            return Err(Error::InvalidInput("cochain entry off the unit circle".into()));
        }
        Ok(Cochain1 { group, vals })
    }

    pub fn constant(group: FiniteGroup, z: Cx<T>) -> Result<Self> {
        let n = group.order();
        Self::new(group, vec![z; n])
    }

    pub fn ones(group: FiniteGroup) -> Self {
        let n = group.order();
        Cochain1 {
            group,
            vals: vec![c_one(); n],
        }
    }

    /// Uniform random phases, identity-normalized stream independent of T.
    pub fn random(group: FiniteGroup, rng: &mut ChaCha8Rng) -> Self {
        let n = group.order();
        Cochain1 {
            group,
            vals: (0..n).map(|_| sample_phase(rng)).collect(),
        }
    }

    #[inline]
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    #[inline]
    pub fn value(&self, g: usize) -> Cx<T> {
        self.vals[g]
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.vals
    }

    pub fn conj(&self) -> Self {
        Cochain1 {
            group: self.group.clone(),
            vals: self.vals.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidInput("cochains live on different groups".into()));
        }
        Ok(Cochain1 {
            group: self.group.clone(),
            vals: self
                .vals
                .iter()
                .zip(other.vals.iter())
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// ∂v(g,h) = v(g)·v(h)·v(gh)⁻¹; always a cocycle.
    pub fn coboundary(&self) -> Cocycle2<T> {
        let n = self.group.order();
        let mut vals = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                let gh = self.group.mul(g, h);
                vals.push(self.vals[g] * self.vals[h] * self.vals[gh].conj());
            }
        }
        Cocycle2 {
            group: self.group.clone(),
            vals,
        }
    }
}

impl<T: Real> RealCocycle2<T> {
    pub fn new(group: FiniteGroup, vals: Vec<T>) -> Result<Self> {
        let n = group.order();
        if vals.len() != n * n {
            return Err(Error::InvalidInput("real cocycle table shape mismatch".into()));
        }
        let c = RealCocycle2 { group, vals };
        let res = to_f64(c.residual());
        let scale = c
            .vals
            .iter()
            .map(|v| to_f64(*v).abs())
            .fold(1.0f64, f64::max);
        if res > 1e-9 * scale {
            return Err(Error::InvalidCocycle(format!(
                "additive cocycle identity fails, residual {res:.3e}"
            )));
        }
        Ok(c)
    }

    pub fn zero(group: FiniteGroup) -> Self {
        let n = group.order();
        RealCocycle2 {
            group,
            vals: vec![T::zero(); n * n],
        }
    }

    /// ∂b(g,h) = b(g) + b(h) − b(gh) for a real function b.
    pub fn from_real_coboundary(group: FiniteGroup, b: &[T]) -> Result<Self> {
        let n = group.order();
        if b.len() != n {
            return Err(Error::InvalidInput("coboundary data length mismatch".into()));
        }
        let mut vals = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                vals.push(b[g] + b[h] - b[group.mul(g, h)]);
            }
        }
        Ok(RealCocycle2 { group, vals })
    }

    #[inline]
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    #[inline]
    pub fn value(&self, g: usize, h: usize) -> T {
        self.vals[g * self.group.order() + h]
    }

    pub fn residual(&self) -> T {
        let n = self.group.order();
        let mut worst = T::zero();
        for g in 0..n {
            for h in 0..n {
                let gh = self.group.mul(g, h);
                for k in 0..n {
                    let lhs = self.value(g, h) + self.value(gh, k);
                    let rhs = self.value(g, self.group.mul(h, k)) + self.value(h, k);
                    let d = (lhs - rhs).abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
        }
        worst
    }

    /// Every real cocycle on a finite group is a coboundary: averaging the
    /// identity over the last slot gives the witness b(g) = (Σ_k c(g,k))/n.
    pub fn trivialize(&self) -> Vec<T> {
        let n = self.group.order();
        let inv_n = r::<T>(1.0 / n as f64);
        (0..n)
            .map(|g| {
                let mut s = T::zero();
                for k in 0..n {
                    s += self.value(g, k);
                }
                s * inv_n
            })
            .collect()
    }

    /// e^{itc} as a T-valued cocycle.
    pub fn exp_scaled(&self, t: T) -> Cocycle2<T> {
        Cocycle2 {
            group: self.group.clone(),
            vals: self.vals.iter().map(|&c| unit_phase(t * c)).collect(),
        }
    }
}

impl<T: Real> HomotopyPath<T> {
    pub fn new(base: Cocycle2<T>, generator: RealCocycle2<T>) -> Result<Self> {
        if base.group() != generator.group() {
            return Err(Error::InvalidInput("path base and generator groups differ".into()));
        }
        Ok(HomotopyPath { base, generator })
    }

    pub fn base(&self) -> &Cocycle2<T> {
        &self.base
    }

    pub fn generator(&self) -> &RealCocycle2<T> {
        &self.generator
    }

    /// ω_t = ω₀·e^{itc}; t must lie in [0,1].
    pub fn sample(&self, t: T) -> Result<Cocycle2<T>> {
        let tf = to_f64(t);
        if !(0.0..=1.0).contains(&tf) {
            return Err(Error::InvalidInput(format!("path parameter {tf} outside [0,1]")));
        }
        self.base.product(&self.generator.exp_scaled(t))
    }
}

/// Extends a trivialization of c from a subgroup H to a function on G via
/// b(g) = b_H(s(ġ)⁻¹g) − c(s(ġ), s(ġ)⁻¹g) + b_H(e), where s is the coset
/// section. The result satisfies c(g,h) = b(g) + b(h) − b(gh) for every
/// g ∈ G and h ∈ H.
pub fn extend_trivialization<T: Real>(
    c: &RealCocycle2<T>,
    section: &CosetSection,
    b_h: &[T],
) -> Result<Vec<T>> {
    let sub = section.subgroup();
    let group = c.group().clone();
    if sub.parent() != &group {
        return Err(Error::InvalidInput("section belongs to a different group".into()));
    }
    if b_h.len() != sub.len() {
        return Err(Error::InvalidInput(format!(
            "b_H has {} entries, subgroup has {}",
            b_h.len(),
            sub.len()
        )));
    }
    // Precondition: b_H trivializes c on H×H.
    for (i, &h1) in sub.elements().iter().enumerate() {
        for (j, &h2) in sub.elements().iter().enumerate() {
            let prod = group.mul(h1, h2);
            let pk = sub.index_of(prod).expect("subgroup closed");
            let dev = (c.value(h1, h2) - (b_h[i] + b_h[j] - b_h[pk])).abs();
            if to_f64(dev) > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "b_H does not trivialize c on H at pair ({h1},{h2})"
                )));
            }
        }
    }
    let b_e = b_h[sub.index_of(0).unwrap()];
    let mut out = Vec::with_capacity(group.order());
    for g in group.elements() {
        let (s, m) = section.decompose(g);
        let bm = b_h[sub.index_of(m).unwrap()];
        out.push(bm - c.value(s, m) + b_e);
    }
    Ok(out)
}

/// v(g) = e^{i·b(g)} for a real function b; ∂ of it is e^{i·∂b}.
pub fn phase_cochain<T: Real>(group: FiniteGroup, b: &[T]) -> Result<Cochain1<T>> {
    if b.len() != group.order() {
        return Err(Error::InvalidInput("phase data length mismatch".into()));
    }
    Ok(Cochain1 {
        group,
        vals: b.iter().map(|&t| unit_phase(t)).collect(),
    })
}

/// The standard nontrivial bicharacter matrix [[0,0],[1,0]] used by the
/// square-of-cyclic presets.
pub fn clock_bicharacter_matrix() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![1, 0]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cx, sample_unit, seeded_rng};

    fn z2z2() -> FiniteGroup {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        FiniteGroup::product(&z2, &z2)
    }

    fn z3z3() -> FiniteGroup {
        let z3 = FiniteGroup::cyclic(3).unwrap();
        FiniteGroup::product(&z3, &z3)
    }

    fn sign_bichar() -> Cocycle2<f64> {
        Cocycle2::bicharacter(&z2z2(), &clock_bicharacter_matrix()).unwrap()
    }

    #[test]
    fn trivial_cocycle_has_zero_residual() {
        let c = Cocycle2::<f64>::trivial(FiniteGroup::cyclic(4).unwrap());
        assert_eq!(to_f64(c.residual().0), 0.0);
    }

    #[test]
    fn sign_bicharacter_matches_hand_values() {
        let w = sign_bichar();
        // Index of digit pair (d0, d1) is 2·d0 + d1.
        let idx = |d0: usize, d1: usize| d0 * 2 + d1;
        // ω(a,b) = (−1)^{a₁·b₀} in 0-based digits.
        for a0 in 0..2usize {
            for a1 in 0..2usize {
                for b0 in 0..2usize {
                    for b1 in 0..2usize {
                        let expect = if a1 * b0 % 2 == 1 { -1.0 } else { 1.0 };
                        let got = w.value(idx(a0, a1), idx(b0, b1));
                        assert!((got.re - expect).abs() < 1e-14 && got.im.abs() < 1e-14);
                    }
                }
            }
        }
        assert!(to_f64(w.residual().0) < 1e-14);
    }

    #[test]
    fn corrupted_table_fails_validation_with_triple() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let mut vals = vec![cx::<f64>(1.0, 0.0); 9];
        vals[4] = cx(-1.0, 0.0);
        let err = Cocycle2::new(g, vals).unwrap_err();
        assert!(err.to_string().contains("residual"));
    }

    #[test]
    fn tilde_is_an_involution_and_multiplicative() {
        let mut rng = seeded_rng(11);
        let g = FiniteGroup::symmetric3();
        let w = Cochain1::<f64>::random(g.clone(), &mut rng).coboundary();
        let v = Cochain1::<f64>::random(g, &mut rng).coboundary();
        assert!(to_f64(w.tilde().tilde().max_abs_diff(&w)) < 1e-15);
        assert!(to_f64(w.bar().bar().max_abs_diff(&w)) < 1e-15);
        let lhs = w.product(&v).unwrap().tilde();
        let rhs = w.tilde().product(&v.tilde()).unwrap();
        assert!(to_f64(lhs.max_abs_diff(&rhs)) < 1e-15);
    }

    #[test]
    fn tilde_of_sign_bicharacter_flips_the_off_pair() {
        let w = sign_bichar();
        // ω̃((1,0),(0,1)) = ω((0,1),(1,0)) = −1 in the 1-based digit notation;
        // (1,0) ↦ index 2, (0,1) ↦ index 1.
        let t = w.tilde();
        assert!((t.value(2, 1).re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_row_is_constant() {
        let mut rng = seeded_rng(3);
        for g in [z2z2(), FiniteGroup::dihedral(4).unwrap()] {
            let w = Cochain1::<f64>::random(g.clone(), &mut rng).coboundary();
            let wee = w.value(0, 0);
            for h in g.elements() {
                assert!(to_f64(modulus(w.value(0, h) - wee)) < 1e-14);
            }
        }
    }

    #[test]
    fn coboundary_example_on_z2() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let v = Cochain1::new(g, vec![cx::<f64>(1.0, 0.0), cx(0.0, 1.0)]).unwrap();
        let w = v.coboundary();
        // ∂v(1,1) = i·i/1 = −1.
        assert!((w.value(1, 1).re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_coboundaries_pass_validation() {
        let mut rng = seeded_rng(5);
        let g = FiniteGroup::symmetric3();
        for _ in 0..5 {
            let w = Cochain1::<f64>::random(g.clone(), &mut rng).coboundary();
            assert!(to_f64(w.residual().0) < 1e-12);
            // And re-validate through the checking constructor.
            Cocycle2::new(g.clone(), w.vals.clone()).unwrap();
        }
    }

    #[test]
    fn v_of_matches_hand_computation_on_sign_bicharacter() {
        let w = sign_bichar();
        let v = w.v_of().unwrap();
        let expect = [1.0, 1.0, 1.0, -1.0];
        for (g, e) in expect.iter().enumerate() {
            assert!(to_f64(modulus(v.value(g) - cx(*e, 0.0))) < 1e-14);
        }
        let u = w.u_of().unwrap();
        for g in 0..4 {
            assert!(to_f64(modulus(u.value(g) - v.value(g).conj())) < 1e-15);
        }
    }

    #[test]
    fn coboundary_homomorphism_property() {
        let mut rng = seeded_rng(17);
        let g = FiniteGroup::dihedral(4).unwrap();
        let v = Cochain1::<f64>::random(g.clone(), &mut rng);
        let w = Cochain1::<f64>::random(g, &mut rng);
        let lhs = v.mul(&w).unwrap().coboundary();
        let rhs = v.coboundary().product(&w.coboundary()).unwrap();
        assert!(to_f64(lhs.max_abs_diff(&rhs)) < 1e-14);
    }

    #[test]
    fn is_coboundary_round_trips_on_every_test_group() {
        let groups = vec![
            FiniteGroup::cyclic(2).unwrap(),
            FiniteGroup::cyclic(4).unwrap(),
            z2z2(),
            z3z3(),
            FiniteGroup::symmetric3(),
            FiniteGroup::dihedral(4).unwrap(),
        ];
        let mut rng = seeded_rng(23);
        for g in groups {
            for _ in 0..100 {
                let v = Cochain1::<f64>::random(g.clone(), &mut rng);
                let w = v.coboundary();
                let witness = w
                    .is_coboundary()
                    .unwrap_or_else(|| panic!("coboundary not detected on {}", g.name()));
                let dev = witness.coboundary().max_abs_diff(&w);
                assert!(to_f64(dev) < 1e-9);
            }
        }
    }

    #[test]
    fn sign_bicharacter_is_not_a_coboundary() {
        assert!(sign_bichar().is_coboundary().is_none());
        let z3 = Cocycle2::<f64>::bicharacter(&z3z3(), &clock_bicharacter_matrix()).unwrap();
        assert!(z3.is_coboundary().is_none());
    }

    #[test]
    fn trivial_cocycle_is_a_coboundary() {
        let w = Cocycle2::<f64>::trivial(z2z2());
        let v = w.is_coboundary().unwrap();
        assert!(to_f64(v.coboundary().max_dist_from_trivial()) < 1e-12);
    }

    #[test]
    fn normalize_trivializes_coboundaries() {
        let mut rng = seeded_rng(31);
        let g = FiniteGroup::dihedral(4).unwrap();
        let w = Cochain1::<f64>::random(g, &mut rng).coboundary();
        let (norm, v) = w.normalize().unwrap();
        assert!(to_f64(norm.max_dist_from_trivial()) < 1e-9);
        let rebuilt = w.product(&v.coboundary()).unwrap();
        assert!(to_f64(rebuilt.max_abs_diff(&norm)) < 1e-12);
    }

    #[test]
    fn normalize_fixes_unitality_and_footnote_identity() {
        let z3 = Cocycle2::<f64>::bicharacter(&z3z3(), &clock_bicharacter_matrix()).unwrap();
        let (norm, _) = z3.normalize().unwrap();
        assert!(norm.is_normalized(1e-12));
        let g = norm.group().clone();
        // ω'(h⁻¹,x) = ω'(x,x⁻¹h) for normalized cocycles.
        for x in g.elements() {
            for h in g.elements() {
                let lhs = norm.value(g.inv(h), x);
                let rhs = norm.value(x, g.mul(g.inv(x), h));
                assert!(
                    to_f64(modulus(lhs - rhs)) < 1e-12,
                    "footnote identity fails at ({x},{h})"
                );
            }
        }
    }

    #[test]
    fn real_cocycle_from_coboundary_and_averaging_witness() {
        let g = FiniteGroup::symmetric3();
        let mut rng = seeded_rng(41);
        let b: Vec<f64> = (0..6).map(|_| sample_unit::<f64>(&mut rng) * 3.0).collect();
        let c = RealCocycle2::from_real_coboundary(g.clone(), &b).unwrap();
        assert!(to_f64(c.residual()) < 1e-12);
        let avg = c.trivialize();
        let rebuilt = RealCocycle2::from_real_coboundary(g, &avg).unwrap();
        for i in 0..36 {
            assert!((c.vals[i] - rebuilt.vals[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn path_samples_are_cocycles_and_interpolate() {
        let g = z2z2();
        let base = sign_bichar();
        let mut rng = seeded_rng(47);
        let b: Vec<f64> = (0..4).map(|_| sample_unit::<f64>(&mut rng)).collect();
        let c = RealCocycle2::from_real_coboundary(g.clone(), &b).unwrap();
        let path = HomotopyPath::new(base.clone(), c).unwrap();
        let w0 = path.sample(0.0).unwrap();
        assert!(to_f64(w0.max_abs_diff(&base)) < 1e-15);
        for j in 0..=10 {
            let t = j as f64 / 10.0;
            let wt = path.sample(t).unwrap();
            assert!(to_f64(wt.residual().0) < 1e-12);
        }
        // t = 1 with a coboundary generator is cohomologous to the base:
        // the quotient is ∂(e^{ib}).
        let w1 = path.sample(1.0).unwrap();
        let quotient = w1.product(&base.bar()).unwrap();
        let v = phase_cochain(g, &b).unwrap();
        assert!(to_f64(quotient.max_abs_diff(&v.coboundary())) < 1e-12);
        assert!(path.sample(1.5).is_err());
    }

    #[test]
    fn extend_trivialization_satisfies_mixed_identity() {
        use crate::group::Subgroup;
        let g = FiniteGroup::cyclic(4).unwrap();
        let sub = Subgroup::new(&g, vec![0, 2]).unwrap();
        let section = CosetSection::new(sub.clone());
        let mut rng = seeded_rng(53);
        let b0: Vec<f64> = (0..4).map(|_| sample_unit::<f64>(&mut rng) * 2.0 - 1.0).collect();
        let c = RealCocycle2::from_real_coboundary(g.clone(), &b0).unwrap();
        let b_h: Vec<f64> = sub.elements().iter().map(|&h| b0[h]).collect();
        let b = extend_trivialization(&c, &section, &b_h).unwrap();
        for x in g.elements() {
            for &h in sub.elements() {
                let dev = c.value(x, h) - (b[x] + b[h] - b[g.mul(x, h)]);
                assert!(dev.abs() < 1e-12, "mixed identity fails at ({x},{h})");
            }
        }
        // Inconsistent b_H is rejected with an error.
        let mut bad = b_h.clone();
        bad[1] += 0.5;
        assert!(extend_trivialization(&c, &section, &bad).is_err());
    }

    #[test]
    fn whole_group_extension_reduces_to_b() {
        use crate::group::Subgroup;
        let g = FiniteGroup::cyclic(4).unwrap();
        let whole = Subgroup::new(&g, (0..4).collect()).unwrap();
        let section = CosetSection::new(whole);
        let b0 = [0.3f64, -0.7, 1.1, 0.2];
        let c = RealCocycle2::from_real_coboundary(g, &b0).unwrap();
        let b = extend_trivialization(&c, &section, &b0.to_vec()).unwrap();
        for i in 0..4 {
            assert!((b[i] - b0[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn bicharacter_rejects_groups_without_cyclic_presentation() {
        let g = FiniteGroup::symmetric3();
        assert!(Cocycle2::<f64>::bicharacter(&g, &clock_bicharacter_matrix()).is_err());
    }

    #[test]
    fn single_factor_bicharacter_on_z4() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let w = Cocycle2::<f64>::bicharacter(&g, &[vec![1]]).unwrap();
        // ω(a,b) = i^{ab}; a genuine (coboundary) cocycle.
        assert!(to_f64(modulus(w.value(1, 1) - cx(0.0, 1.0))) < 1e-14);
        assert!(w.is_coboundary().is_some());
    }
}
