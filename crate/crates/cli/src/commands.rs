//! Handlers for the non-`verify` commands.

use std::path::Path;
use std::sync::Arc;

use galoiswb::autgroup::{
    automorphisms, double_cosets, hom_cosets, is_complete_discrete, orbits, orbits_distinct, orbits_on_cosets,
    transitive_gsets_isomorphic, PermutationGroup, SubgroupHandle, MAX_LATTICE_ORDER,
};
use galoiswb::fraisse::{
    check_ap, check_hp, check_jep, class_from_str, is_ultrahomogeneous_upto, is_universal_upto, Chain, FraisseClass,
};
use galoiswb::report::Report;
use galoiswb::structures::json::{structure_from_json, structure_to_json};
use galoiswb::{Error, FiniteStructure, Result};
use serde_json::{json, Value};

/// A built-in class name or a path to a class file.
pub fn resolve_class(name: &str) -> Result<FraisseClass> {
    match FraisseClass::builtin(name) {
        Ok(c) => Ok(c),
        Err(e) => {
            let path = Path::new(name);
            if path.is_file() {
                let text = std::fs::read_to_string(path).map_err(|e| Error::ClassFile(e.to_string()))?;
                class_from_str(&text)
            } else {
                Err(e)
            }
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Json(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn check_class(class: &FraisseClass, size: usize) -> Result<Report> {
    let hp = check_hp(class, size)?;
    let jep = check_jep(class, size)?;
    let ap = check_ap(class, size)?;
    let mut report = Report::new("fraisse_axioms");
    report.cases = hp.cases + jep.cases + ap.cases;
    if let Some(w) = &hp.witness {
        report.violations.push(json!({
            "axiom": "HP",
            "member": structure_to_json(&w.member),
            "seed": w.seed,
            "substructure": structure_to_json(&w.substructure),
        }));
    }
    if let Some(w) = &jep.witness {
        report.violations.push(json!({
            "axiom": "JEP",
            "first": structure_to_json(&w.first),
            "second": structure_to_json(&w.second),
        }));
    }
    if let Some(w) = &ap.witness {
        report.violations.push(json!({ "axiom": "AP", "span": w.to_json() }));
    }
    if ap.inconclusive + jep.inconclusive > 0 {
        report.inconclusive.push(json!({ "jep": jep.inconclusive, "ap": ap.inconclusive }));
    }
    Ok(report
        .detail("class", class.name())
        .detail("size", size)
        .detail("hp", hp.holds)
        .detail("jep", jep.holds)
        .detail("ap", ap.holds))
}

/// Builds a chain and attaches bounded universality and homogeneity
/// certificates.
pub fn build_limit(
    class: &FraisseClass,
    rounds: usize,
    bound: Option<usize>,
    carrier_limit: Option<usize>,
    k: usize,
) -> Result<(Value, bool)> {
    let chain = Chain::build(class, rounds, bound, carrier_limit)?;
    let universal = is_universal_upto(&chain, k);
    let (homogeneous, witness) = is_ultrahomogeneous_upto(&chain, k.saturating_sub(1));
    let mut v = chain.to_json();
    v["certificates"] = json!({
        "universal_upto": k,
        "universal": universal,
        "homogeneous_upto": k.saturating_sub(1),
        "homogeneous": homogeneous,
        "homogeneity_witness": witness,
    });
    v["sizes"] = json!(chain.stages.iter().map(|s| s.structure.len()).collect::<Vec<_>>());
    Ok((v, universal && homogeneous))
}

fn load_structure(path: &Path) -> Result<FiniteStructure> {
    structure_from_json(&read_json(path)?)
}

pub fn aut(path: &Path) -> Result<Value> {
    let s = load_structure(path)?;
    let g = automorphisms(&s);
    let orbit_reps: Vec<usize> = orbits(&g, 1).iter().map(|o| o.representative[0]).collect();
    Ok(json!({
        "structure_size": s.len(),
        "group": g.to_json(),
        "point_orbits": orbit_reps.len(),
        "orbit_representatives": orbit_reps,
    }))
}

pub fn orbit_report(path: &Path, k: usize, distinct: bool) -> Result<Value> {
    let s = load_structure(path)?;
    let g = automorphisms(&s);
    let list = if distinct { orbits_distinct(&g, k) } else { orbits(&g, k) };
    Ok(json!({
        "k": k,
        "distinct": distinct,
        "aut_order": g.order(),
        "count": list.len(),
        "orbits": list,
    }))
}

/// A group file holds either `{"degree": n, "generators": [...]}` or a
/// structure, whose automorphism group is taken.
pub fn load_group(path: &Path) -> Result<Arc<PermutationGroup>> {
    let v = read_json(path)?;
    if let Some(gens) = v.get("generators") {
        let degree =
            v.get("degree").and_then(Value::as_u64).ok_or_else(|| Error::Json("group files need a `degree`".into()))?
                as usize;
        let gens: Vec<Vec<usize>> = serde_json::from_value(gens.clone())?;
        return Ok(Arc::new(PermutationGroup::generated(degree, &gens)?));
    }
    Ok(Arc::new(automorphisms(&structure_from_json(&v)?)))
}

fn subgroup(g: &Arc<PermutationGroup>, gens: &str) -> Result<SubgroupHandle> {
    let perms: Vec<Vec<usize>> = serde_json::from_str(gens)?;
    let idx = perms
        .iter()
        .map(|p| g.index_of(p).ok_or_else(|| Error::OutOfRange(format!("{p:?} is not in the group"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgroupHandle::generated(g, &idx))
}

pub fn cosets(path: &Path, source: &str, target: Option<&str>) -> Result<Value> {
    let g = load_group(path)?;
    let u = subgroup(&g, source)?;
    let v = match target {
        Some(t) => subgroup(&g, t)?,
        None => u.clone(),
    };
    let arrows: Vec<Value> = hom_cosets(&u, &v)?
        .iter()
        .map(|a| json!({ "representative": g.element(a.representative), "iso": a.is_iso() }))
        .collect();
    let dc = double_cosets(&g, &u);
    let complete = if g.order() <= MAX_LATTICE_ORDER { Some(is_complete_discrete(&g)?) } else { None };
    Ok(json!({
        "group": g.to_json(),
        "source_order": u.order(),
        "target_order": v.order(),
        "arrows": arrows,
        "conjugate": transitive_gsets_isomorphic(&u, &v)?,
        "double_cosets": {
            "count": dc.count,
            "representatives": dc.representatives.iter().map(|&i| g.element(i)).collect::<Vec<_>>(),
            "sizes": dc.sizes,
        },
        "orbits_on_cosets": orbits_on_cosets(&g, &u),
        "complete_discrete": complete,
    }))
}
