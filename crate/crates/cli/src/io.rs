//! JSON schemas for groups, cocycles, algebras and actions, plus the named
//! presets behind the built-in instance matrix. Parse errors carry a JSON
//! pointer to the offending field.

use anyhow::{anyhow, bail, Result};
use serde_json::{json, Value};

use cocycle_forge::coaction::{GradedAlgebra, GroupAction};
use cocycle_forge::cocycle::{clock_bicharacter_matrix, Cocycle2};
use cocycle_forge::deform::Deformed;
use cocycle_forge::group::{check_group_axioms, FiniteGroup};
use cocycle_forge::report::Report;
use cocycle_forge::scalar::{to_f64, unit_phase, CMat, Cx};

pub const GROUP_PRESETS: &[&str] = &["z2", "z4", "z2xz2", "z3xz3", "s3", "d4"];
pub const COCYCLE_PRESETS: &[&str] = &["trivial", "bichar", "coboundary"];
pub const ALGEBRA_PRESETS: &[&str] = &["scalars", "pauli", "group-algebra", "translation"];

fn at(ptr: &str) -> String {
    if ptr.is_empty() {
        "/".into()
    } else {
        ptr.into()
    }
}

fn field<'a>(v: &'a Value, ptr: &str, name: &str) -> Result<&'a Value> {
    if !v.is_object() {
        bail!("at {}: expected an object", at(ptr));
    }
    v.get(name)
        .ok_or_else(|| anyhow!("at {}: missing field \"{name}\"", at(ptr)))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| anyhow!("at {}: expected an array", at(ptr)))
}

fn as_usize(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| anyhow!("at {}: expected a non-negative integer", at(ptr)))
}

fn as_i64(v: &Value, ptr: &str) -> Result<i64> {
    v.as_i64()
        .ok_or_else(|| anyhow!("at {}: expected an integer", at(ptr)))
}

fn as_f64(v: &Value, ptr: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| anyhow!("at {}: expected a number", at(ptr)))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| anyhow!("at {}: expected a string", at(ptr)))
}

pub fn load_value(path: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow!("reading {path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("parsing {path}: {e}"))
}

pub fn group_preset(name: &str) -> Result<FiniteGroup> {
    let g = match name.to_ascii_lowercase().as_str() {
        "z2" | "cyclic2" => FiniteGroup::cyclic(2)?,
        "z4" | "cyclic4" => FiniteGroup::cyclic(4)?,
        "z2xz2" => {
            let z2 = FiniteGroup::cyclic(2)?;
            FiniteGroup::product(&z2, &z2)
        }
        "z3xz3" => {
            let z3 = FiniteGroup::cyclic(3)?;
            FiniteGroup::product(&z3, &z3)
        }
        "s3" | "sym3" => FiniteGroup::symmetric3(),
        "d4" | "dihedral4" => FiniteGroup::dihedral(4)?,
        other => bail!(
            "unknown group preset \"{other}\" (known: {})",
            GROUP_PRESETS.join(", ")
        ),
    };
    Ok(g)
}

/// A group is either a preset name or {"order": n, "table": [[int]]} with
/// identity at index 0.
pub fn parse_group(v: &Value, ptr: &str) -> Result<FiniteGroup> {
    if let Some(name) = v.as_str() {
        return group_preset(name);
    }
    let order = as_usize(field(v, ptr, "order")?, &format!("{ptr}/order"))?;
    if order == 0 {
        bail!("at {ptr}/order: order must be at least 1");
    }
    let table_v = field(v, ptr, "table")?;
    let rows = as_array(table_v, &format!("{ptr}/table"))?;
    if rows.len() != order {
        bail!("at {ptr}/table: expected {order} rows, got {}", rows.len());
    }
    let mut table = Vec::with_capacity(order);
    for (i, row_v) in rows.iter().enumerate() {
        let row = as_array(row_v, &format!("{ptr}/table/{i}"))?;
        if row.len() != order {
            bail!("at {ptr}/table/{i}: expected {order} entries, got {}", row.len());
        }
        let mut out = Vec::with_capacity(order);
        for (j, e) in row.iter().enumerate() {
            let p = format!("{ptr}/table/{i}/{j}");
            let x = as_usize(e, &p)?;
            if x >= order {
                bail!("at {p}: entry {x} outside [0, {order})");
            }
            out.push(x);
        }
        table.push(out);
    }
    FiniteGroup::from_table(table).map_err(|e| anyhow!("at {}/table: {e}", at(ptr)))
}

/// [[[re,im],…],…], rows of complex pairs.
pub fn parse_matrix(v: &Value, ptr: &str) -> Result<CMat<f64>> {
    let rows = as_array(v, ptr)?;
    if rows.is_empty() {
        bail!("at {}: matrix needs at least one row", at(ptr));
    }
    let ncols = as_array(&rows[0], &format!("{ptr}/0"))?.len();
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (i, row_v) in rows.iter().enumerate() {
        let row = as_array(row_v, &format!("{ptr}/{i}"))?;
        if row.len() != ncols {
            bail!("at {ptr}/{i}: expected {ncols} entries, got {}", row.len());
        }
        for (j, e) in row.iter().enumerate() {
            let p = format!("{ptr}/{i}/{j}");
            let pair = as_array(e, &p)?;
            if pair.len() != 2 {
                bail!("at {p}: expected [re, im]");
            }
            let re = as_f64(&pair[0], &format!("{p}/0"))?;
            let im = as_f64(&pair[1], &format!("{p}/1"))?;
            data.push(Cx::new(re, im));
        }
    }
    Ok(CMat::from_row_slice(rows.len(), ncols, &data))
}

fn parse_cocycle_group(v: &Value, ptr: &str, fallback: Option<&FiniteGroup>) -> Result<FiniteGroup> {
    match v.get("group") {
        Some(gv) => parse_group(gv, &format!("{ptr}/group")),
        None => fallback
            .cloned()
            .ok_or_else(|| anyhow!("at {}: missing field \"group\" and no --group given", at(ptr))),
    }
}

/// {"group": …, "format": "complex"|"angle"|"bicharacter", "data": …}.
/// Checked: shape and unimodularity here, the cocycle identity in core.
pub fn parse_cocycle(
    v: &Value,
    ptr: &str,
    fallback: Option<&FiniteGroup>,
) -> Result<Cocycle2<f64>> {
    let group = parse_cocycle_group(v, ptr, fallback)?;
    let n = group.order();
    let format = as_str(field(v, ptr, "format")?, &format!("{ptr}/format"))?;
    let data = field(v, ptr, "data")?;
    let dptr = format!("{ptr}/data");
    let vals: Vec<Cx<f64>> = match format {
        "complex" => {
            let m = parse_matrix(data, &dptr)?;
            if m.nrows() != n || m.ncols() != n {
                bail!("at {dptr}: expected a {n}x{n} table for a group of order {n}");
            }
            (0..n * n).map(|i| m[(i / n, i % n)]).collect()
        }
        "angle" => {
            let rows = as_array(data, &dptr)?;
            if rows.len() != n {
                bail!("at {dptr}: expected {n} rows, got {}", rows.len());
            }
            let mut vals = Vec::with_capacity(n * n);
            for (i, row_v) in rows.iter().enumerate() {
                let row = as_array(row_v, &format!("{dptr}/{i}"))?;
                if row.len() != n {
                    bail!("at {dptr}/{i}: expected {n} entries, got {}", row.len());
                }
                for (j, e) in row.iter().enumerate() {
                    let theta = as_f64(e, &format!("{dptr}/{i}/{j}"))?;
                    vals.push(unit_phase(theta));
                }
            }
            vals
        }
        "bicharacter" => {
            let factors_v = field(data, &dptr, "factors")?;
            let factors = as_array(factors_v, &format!("{dptr}/factors"))?
                .iter()
                .enumerate()
                .map(|(i, e)| as_usize(e, &format!("{dptr}/factors/{i}")))
                .collect::<Result<Vec<_>>>()?;
            match group.cyclic_factors() {
                Some(gf) if gf == factors.as_slice() => {}
                _ => bail!(
                    "at {dptr}/factors: group is not the stated product of cyclics {factors:?}"
                ),
            }
            let mv = field(data, &dptr, "matrix")?;
            let rows = as_array(mv, &format!("{dptr}/matrix"))?;
            let k = factors.len();
            let mut b = Vec::with_capacity(k);
            for (i, row_v) in rows.iter().enumerate() {
                let row = as_array(row_v, &format!("{dptr}/matrix/{i}"))?;
                b.push(
                    row.iter()
                        .enumerate()
                        .map(|(j, e)| as_i64(e, &format!("{dptr}/matrix/{i}/{j}")))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            return Cocycle2::bicharacter(&group, &b)
                .map_err(|e| anyhow!("at {}: {e}", at(&dptr)));
        }
        other => bail!(
            "at {ptr}/format: unknown format \"{other}\" (complex, angle, bicharacter)"
        ),
    };
    Cocycle2::new(group, vals).map_err(|e| anyhow!("at {}: {e}", at(&dptr)))
}

/// {"group": …, "rep_dim": d, "basis": [{"grade": int, "matrix": …}]}.
pub fn parse_algebra(v: &Value, ptr: &str) -> Result<GradedAlgebra<f64>> {
    let group = parse_group(field(v, ptr, "group")?, &format!("{ptr}/group"))?;
    let d = as_usize(field(v, ptr, "rep_dim")?, &format!("{ptr}/rep_dim"))?;
    let entries = as_array(field(v, ptr, "basis")?, &format!("{ptr}/basis"))?;
    let mut basis = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let p = format!("{ptr}/basis/{i}");
        let grade = as_usize(field(e, &p, "grade")?, &format!("{p}/grade"))?;
        if grade >= group.order() {
            bail!("at {p}/grade: grade {grade} outside [0, {})", group.order());
        }
        let m = parse_matrix(field(e, &p, "matrix")?, &format!("{p}/matrix"))?;
        if m.nrows() != d || m.ncols() != d {
            bail!("at {p}/matrix: expected {d}x{d}, got {}x{}", m.nrows(), m.ncols());
        }
        basis.push((m, grade));
    }
    GradedAlgebra::new(group, d, basis).map_err(|e| anyhow!("at {}: {e}", at(ptr)))
}

/// {"algebra": …, "unitaries": [matrix per group element]}.
pub fn parse_action(v: &Value, ptr: &str) -> Result<(GradedAlgebra<f64>, GroupAction<f64>)> {
    let alg = parse_algebra(field(v, ptr, "algebra")?, &format!("{ptr}/algebra"))?;
    let entries = as_array(field(v, ptr, "unitaries")?, &format!("{ptr}/unitaries"))?;
    let n = alg.group().order();
    if entries.len() != n {
        bail!("at {ptr}/unitaries: expected {n} matrices, got {}", entries.len());
    }
    let d = alg.rep_dim();
    let mut unitaries = Vec::with_capacity(n);
    for (i, e) in entries.iter().enumerate() {
        let p = format!("{ptr}/unitaries/{i}");
        let m = parse_matrix(e, &p)?;
        if m.nrows() != d || m.ncols() != d {
            bail!("at {p}: expected {d}x{d}, got {}x{}", m.nrows(), m.ncols());
        }
        unitaries.push(m);
    }
    let action = GroupAction::from_unitaries(alg.group().clone(), unitaries)
        .map_err(|e| anyhow!("at {}/unitaries: {e}", at(ptr)))?;
    Ok((alg, action))
}

pub fn cocycle_preset(name: &str, group: &FiniteGroup, seed: u64) -> Result<Cocycle2<f64>> {
    match name.to_ascii_lowercase().as_str() {
        "trivial" => Ok(Cocycle2::trivial(group.clone())),
        "bichar" | "bicharacter" => {
            let factors = group.cyclic_factors().ok_or_else(|| {
                anyhow!("preset \"bichar\" needs a product-of-cyclics group")
            })?;
            let b = match factors.len() {
                1 => vec![vec![1]],
                2 => clock_bicharacter_matrix(),
                k => {
                    // Lower shift pattern: adjacent digit pairs twist.
                    let mut b = vec![vec![0i64; k]; k];
                    for p in 1..k {
                        b[p][p - 1] = 1;
                    }
                    b
                }
            };
            Cocycle2::bicharacter(group, &b).map_err(|e| anyhow!("{e}"))
        }
        "coboundary" => {
            let mut rng = cocycle_forge::scalar::seeded_rng(seed);
            let v = cocycle_forge::cocycle::Cochain1::<f64>::random(group.clone(), &mut rng);
            Ok(v.coboundary())
        }
        other => bail!(
            "unknown cocycle preset \"{other}\" (known: {})",
            COCYCLE_PRESETS.join(", ")
        ),
    }
}

pub fn algebra_preset(name: &str, group: &FiniteGroup) -> Result<GradedAlgebra<f64>> {
    match name.to_ascii_lowercase().as_str() {
        "scalars" => Ok(GradedAlgebra::scalars(group.clone())),
        "pauli" => {
            if group.cyclic_factors() != Some(&[2, 2][..]) {
                bail!("preset \"pauli\" is graded over z2xz2, got {}", group.name());
            }
            Ok(GradedAlgebra::pauli())
        }
        "group-algebra" | "group_algebra" => Ok(GradedAlgebra::group_algebra(group)),
        "translation" | "functions" => Ok(GradedAlgebra::full_matrix(group)),
        other => bail!(
            "unknown algebra preset \"{other}\" (known: {})",
            ALGEBRA_PRESETS.join(", ")
        ),
    }
}

fn matrix_json(m: &CMat<f64>) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            let row: Vec<Value> = (0..m.ncols())
                .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

/// {"rank": r, "basis": [{"grade": g, "matrix": …}]} for downstream tools.
pub fn deformed_export(dfm: &Deformed<f64>) -> Value {
    let basis: Vec<Value> = (0..dfm.gens().len())
        .map(|i| {
            json!({
                "grade": dfm.grade(i),
                "matrix": matrix_json(dfm.gen_matrix(i)),
            })
        })
        .collect();
    json!({ "rank": dfm.rank(), "basis": basis })
}

/// Parsed summary of any known schema: group order and abelianness, cocycle
/// residual and normalization, grading table, action unitarity.
pub fn describe_value(v: &Value, label: &str) -> Report {
    let mut report = Report::new("describe", label);
    if v.get("unitaries").is_some() {
        match parse_action(v, "") {
            Ok((alg, _)) => {
                report.check_bool(
                    "action",
                    true,
                    format!(
                        "action on a rank-{} algebra over {} validated",
                        alg.dim(),
                        alg.group().name()
                    ),
                );
            }
            Err(e) => report.fail("action", e.to_string()),
        }
        return report;
    }
    if v.get("rep_dim").is_some() {
        match parse_algebra(v, "") {
            Ok(alg) => {
                let mut grades: Vec<usize> = (0..alg.dim()).map(|i| alg.grade(i)).collect();
                grades.sort_unstable();
                report.check_bool(
                    "algebra",
                    true,
                    format!(
                        "rank {} in M_{} over {}, grades {:?}",
                        alg.dim(),
                        alg.rep_dim(),
                        alg.group().name(),
                        grades
                    ),
                );
            }
            Err(e) => report.fail("algebra", e.to_string()),
        }
        return report;
    }
    if v.get("format").is_some() {
        match parse_cocycle_group(v, "", None) {
            Ok(group) => {
                // Loose parse so a broken table reports its residual rather
                // than erroring out.
                let n = group.order();
                let strict = parse_cocycle(v, "", None);
                match strict {
                    Ok(w) => {
                        let (resid, _) = w.residual();
                        report.check_residual("cocycle-identity", to_f64(resid), 1e-9);
                        let normalized = w.is_normalized(1e-12);
                        report.check_bool(
                            "summary",
                            true,
                            format!(
                                "valid cocycle on order {n}, residual {:.1e}, normalized: {}",
                                to_f64(resid),
                                if normalized { "yes" } else { "no" }
                            ),
                        );
                    }
                    Err(e) => report.fail("cocycle-identity", e.to_string()),
                }
            }
            Err(e) => report.fail("group", e.to_string()),
        }
        return report;
    }
    if v.get("table").is_some() || v.as_str().is_some() {
        match parse_group(v, "") {
            Ok(g) => {
                report.check_bool(
                    "group",
                    true,
                    format!(
                        "order {}, {}, identity 0",
                        g.order(),
                        if g.is_abelian() { "abelian" } else { "nonabelian" }
                    ),
                );
                for c in check_group_axioms(&g.table_rows()) {
                    report.checks.push(c);
                }
            }
            Err(e) => report.fail("group", e.to_string()),
        }
        return report;
    }
    report.fail(
        "schema",
        "unrecognized schema: expected a group, cocycle, algebra or action file",
    );
    report
}
