//! Verification suites behind `verify`.

use std::collections::BTreeSet;

use galoiswb::autgroup::all_subgroups;
use galoiswb::category::FiniteCategory;
use galoiswb::fraisse::FraisseClass;
use galoiswb::galois::{coherence_check, discrete_reduction, first_non_strict, verify_galois_property};
use galoiswb::imaginaries::{
    atomic_complete_check, candidate_relations, image_of_f_subgroups, jat_closure, realized_subgroup,
    subgroup_category, subgroup_realization, z15_counterexample_verify, CyclicInstance,
};
use galoiswb::report::Report;
use galoiswb::structures::builders::{cyclic_group, direct_product};
use galoiswb::structures::json::structure_to_json;
use galoiswb::{Error, Result};
use serde_json::json;

pub fn galois(class: &FraisseClass, size: usize, stages: usize) -> Result<Report> {
    verify_galois_property(class, size, stages)
}

pub fn coherence(class: &FraisseClass, k_max: usize, stages: usize) -> Result<Report> {
    coherence_check(class, k_max, stages)
}

/// Atomic completeness. Imaginaries are findings, not violations.
pub fn imaginaries(class: &FraisseClass, size: usize) -> Result<Report> {
    let res = atomic_complete_check(class, size)?;
    let mut report = Report::new("atomic_completeness");
    report.cases = res.relations;
    Ok(report
        .detail("class", class.name())
        .detail("size_bound", size)
        .detail("objects", res.category.len())
        .detail("atomically_complete", res.complete)
        .detail("summary", format!("atomically complete: {}", res.complete))
        .detail("witnesses", res.witnesses.iter().map(|w| w.to_json(&res.category)).collect::<Vec<_>>()))
}

pub fn z15() -> Report {
    let rep = z15_counterexample_verify(&CyclicInstance::STANDARD);
    let mut report = Report::new("z15_counterexample");
    report.cases = 1 + (rep.ratio_order * rep.ratio_order) as usize;
    if !rep.confirmed {
        report.violations.push(json!(rep));
    }
    let summary = if rep.confirmed { "counterexample confirmed" } else { "counterexample not confirmed" };
    report.detail("instance", CyclicInstance::STANDARD).detail("checks", &rep).detail("summary", summary)
}

/// A finite category with a distinguished top object.
pub struct Context {
    pub name: String,
    pub category: FiniteCategory,
    pub top: usize,
}

/// Subgroups of the Klein four-group, or a class truncated at `size`
/// reduced to its largest object.
pub fn context(class: Option<&FraisseClass>, size: usize) -> Result<Context> {
    let Some(class) = class else {
        let v4 = direct_product(&cyclic_group(2), &cyclic_group(2));
        let category = subgroup_category(&v4)?;
        let top = category.len() - 1;
        return Ok(Context { name: "v4_subgroups".into(), category, top });
    };
    let class = match class.size_cap() {
        Some(cap) if cap <= size => class.clone(),
        _ => class.truncated(size),
    };
    let category = FiniteCategory::from_class(&class, size, &[])?;
    let top = discrete_reduction(&category)
        .ok_or_else(|| Error::ClassMismatch(format!("`{}` has no largest object", class.name())))?;
    Ok(Context { name: class.name().to_string(), category, top })
}

/// Every subgroup of `Aut(u)` is realized by some `(c, ξ, R)`, and the
/// defining formula gives it back exactly.
pub fn atoms(ctx: &Context) -> Result<Report> {
    let (cat, u) = (&ctx.category, ctx.top);
    let img = image_of_f_subgroups(cat, u)?;
    let subgroups = all_subgroups(&img.group)?;
    let mut report = Report::new("atoms");
    let mut non_diagonal = Vec::new();
    for s in &subgroups {
        report.cases += 1;
        match subgroup_realization(cat, u, s)? {
            None => report.violations.push(json!({ "subgroup": s.to_json(), "realization": null })),
            Some(r) => {
                let got = realized_subgroup(cat, u, r.xi, &r.relation);
                let want: BTreeSet<Vec<usize>> = s.elements().iter().map(|&i| img.group.element(i).to_vec()).collect();
                if got != want {
                    report.violations.push(json!({ "subgroup": s.to_json(), "realization": r.to_json(cat, u) }));
                } else if !r.relation.is_diagonal() {
                    non_diagonal.push(json!({ "order": s.order(), "realization": r.to_json(cat, u) }));
                }
            }
        }
    }
    let mut closures = 0;
    for c in 0..cat.len() {
        for r in candidate_relations(cat, c) {
            closures += 1;
            report.cases += 1;
            let closed = jat_closure(cat, &r);
            if closed != r || !r.is_functorial(cat) {
                report.violations.push(json!({ "closure_not_stable": r.to_json(cat) }));
            }
        }
    }
    Ok(report
        .detail("context", &ctx.name)
        .detail("top", structure_to_json(cat.object(u)))
        .detail("aut_order", img.group.order())
        .detail("subgroups", subgroups.len())
        .detail("closed_relations", closures)
        .detail("non_diagonal", non_diagonal))
}

/// Stabilizers of arrows into the top object against all subgroups, with
/// the bijection between slice classes and stabilizers compared to
/// strictness of every arrow.
pub fn discrete(ctx: &Context) -> Result<Report> {
    let (cat, u) = (&ctx.category, ctx.top);
    let img = image_of_f_subgroups(cat, u)?;
    let non_strict = first_non_strict(cat);
    let mut report = Report::new("discrete_galois");
    report.cases = img.slice_classes;
    if img.bijective() != non_strict.is_none() {
        report.violations.push(json!({ "bijective": img.bijective(), "non_strict": non_strict }));
    }
    let non_strict = non_strict.map(|(c, d, f)| {
        json!({
            "source": structure_to_json(cat.object(c)),
            "target": structure_to_json(cat.object(d)),
            "map": cat.hom(c, d)[f],
        })
    });
    Ok(report
        .detail("context", &ctx.name)
        .detail("top", structure_to_json(cat.object(u)))
        .detail("image", img.to_json())
        .detail("all_strict_monos", non_strict.is_none())
        .detail("non_strict_witness", non_strict))
}
