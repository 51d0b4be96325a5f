use super::signature::SignatureConfig;
use super::translate::Ctx;
use super::{Manifest, ManifestBranch, ManifestMachine, ManifestMethod, SolidityError};
use crate::frontend::PastTslSpec;
use crate::ltl::{Origin, PropTable};
use crate::machine::cubes::cover;
use crate::machine::Letter;
use crate::split::{check_independence, ParamSubset, SplitSystem};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

pub const PRAGMA: &str = "0.8.24";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedContract {
    pub source: String,
    pub manifest: Manifest,
}

impl EmittedContract {
    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n"
    }
}

fn suffix(subset: &ParamSubset) -> String {
    subset.0.iter().map(|p| format!("_{p}")).collect()
}

fn mapping_type(keys: &[&str], value: &str) -> String {
    keys.iter().rev().fold(value.to_string(), |acc, k| format!("mapping({k} => {acc})"))
}

struct Names {
    state_enum: String,
    state_field: String,
    knowledge_map: String,
}

fn names(subset: &ParamSubset) -> Names {
    let s = suffix(subset);
    Names {
        state_enum: format!("State{s}"),
        state_field: format!("currState{s}"),
        knowledge_map: format!("kMap{s}"),
    }
}

struct MethodPlan {
    machine: Option<usize>,
    call: usize,
    branches: Vec<ManifestBranch>,
}

fn call_bit(table: &PropTable, method: &str) -> Result<usize, SolidityError> {
    table
        .props()
        .iter()
        .position(|p| p.method.as_deref() == Some(method))
        .ok_or_else(|| SolidityError::Unsupported(format!("method `{method}` has no proposition")))
}

fn state_expr(sys: &SplitSystem, ctx: &Ctx, j: usize) -> Result<String, SolidityError> {
    let m = &sys.machines[j];
    let mut s = names(&m.subset).state_field;
    for p in &m.subset.0 {
        let key = ctx.term(&crate::frontend::FunctionTerm::parameter(p.clone()))?;
        s.push_str(&format!("[{key}]"));
    }
    Ok(s)
}

fn state_test(sys: &SplitSystem, ctx: &Ctx, j: usize, q: usize) -> Result<String, SolidityError> {
    let m = &sys.machines[j];
    Ok(format!("{} == {}.{}", state_expr(sys, ctx, j)?, names(&m.subset).state_enum, m.state_name(q)))
}

fn combination_condition(
    sys: &SplitSystem,
    ctx: &Ctx,
    anc: &[usize],
    enabled: &[Vec<usize>],
) -> Result<Option<String>, SolidityError> {
    let counts: Vec<usize> = anc.iter().map(|&j| sys.machines[j].num_states).collect();
    let total: usize = counts.iter().product();
    if enabled.len() == total {
        return Ok(None);
    }
    let allowed: Vec<BTreeSet<usize>> =
        (0..anc.len()).map(|k| enabled.iter().map(|c| c[k]).collect()).collect();
    let product: usize = allowed.iter().map(BTreeSet::len).product();
    if product == enabled.len() {
        let mut parts = Vec::new();
        for (k, qs) in allowed.iter().enumerate() {
            if qs.len() == counts[k] {
                continue;
            }
            let tests: Vec<String> = qs
                .iter()
                .map(|&q| state_test(sys, ctx, anc[k], q))
                .collect::<Result<_, _>>()?;
            parts.push(if tests.len() == 1 { tests[0].clone() } else { format!("({})", tests.join(" || ")) });
        }
        return Ok(Some(parts.join(" && ")));
    }
    let mut alts = Vec::new();
    for c in enabled {
        let tests: Vec<String> = anc
            .iter()
            .zip(c)
            .map(|(&j, &q)| state_test(sys, ctx, j, q))
            .collect::<Result<_, _>>()?;
        alts.push(format!("({})", tests.join(" && ")));
    }
    Ok(Some(format!("({})", alts.join(" || "))))
}

fn input_literal(
    table: &PropTable,
    ctx: &Ctx,
    k: usize,
    positive: bool,
) -> Result<String, SolidityError> {
    let p = &table.props()[k];
    let expr = match &p.origin {
        Origin::Predicate(pt) => ctx.predicate(pt)?,
        Origin::Plain(name) => {
            let f = ctx.sig.predicates.get(name).ok_or_else(|| SolidityError::MissingSignature {
                kind: "predicate",
                name: name.clone(),
            })?;
            if f.side_effects {
                return Err(SolidityError::SideEffectGuard(name.clone()));
            }
            f.definition.clone()
        }
        Origin::Update(_) => unreachable!("updates are outputs"),
    };
    Ok(if positive { expr } else { format!("!({expr})") })
}

fn inputs_condition(
    table: &PropTable,
    ctx: &Ctx,
    cubes: &[(Letter, Letter)],
) -> Result<Option<String>, SolidityError> {
    let mut alts = Vec::new();
    for &(care, value) in cubes {
        if care == 0 {
            return Ok(None);
        }
        let mut lits = Vec::new();
        for k in 0..table.len() {
            if care >> k & 1 == 1 {
                lits.push(input_literal(table, ctx, k, value >> k & 1 == 1)?);
            }
        }
        alts.push(lits.join(" && "));
    }
    Ok(match alts.len() {
        0 => None,
        1 => Some(alts.remove(0)),
        _ => Some(format!("({})", alts.iter().map(|a| format!("({a})")).collect::<Vec<_>>().join(" || "))),
    })
}

fn plan_method(
    sys: &SplitSystem,
    table: &PropTable,
    ctx: &Ctx,
    independent: &[Vec<bool>],
) -> Result<MethodPlan, SolidityError> {
    let call = call_bit(table, ctx.method)?;
    let params = table.props()[call].params.clone();
    let Some(i) = sys.machine_for(&ParamSubset(params)) else {
        return Ok(MethodPlan { machine: None, call, branches: Vec::new() });
    };
    let a = &sys.original.alphabet;
    let preds = a.input_mask() & !a.call_mask();
    let omask = a.output_mask();
    let mi = &sys.machines[i];
    let anc = sys.ancestors(i);
    let mut choices: BTreeMap<(usize, Letter), BTreeSet<Letter>> = BTreeMap::new();
    let mut groups: BTreeMap<(usize, usize, Letter, Vec<Vec<usize>>), BTreeSet<Letter>> =
        BTreeMap::new();
    for (ti, t) in mi.transitions.iter().enumerate() {
        if t.letter >> call & 1 == 0 {
            continue;
        }
        if !independent[i][ti] {
            return Err(SolidityError::NotIndependent);
        }
        choices.entry((t.from, t.letter & preds)).or_default().insert(t.letter & omask);
        let enabled: Vec<Vec<usize>> = sys
            .state_combinations(&anc)
            .into_iter()
            .filter(|c| sys.combined_knowledge(i, t.from, &anc, c).is_subset(&t.guard))
            .collect();
        if enabled.is_empty() {
            continue;
        }
        groups.entry((t.from, t.to, t.letter & omask, enabled)).or_default().insert(t.letter & preds);
    }
    for ((q, _), outs) in &choices {
        if outs.len() > 1 {
            return Err(SolidityError::FreeChoice {
                method: ctx.method.to_string(),
                state: mi.state_name(*q),
            });
        }
    }
    let mut branches = Vec::new();
    for ((from, to, outputs, combinations), inputs) in groups {
        let cubes: Vec<(Letter, Letter)> =
            cover(&inputs, preds).into_iter().map(|c| (c.care, c.value)).collect();
        let mut conds = vec![state_test(sys, ctx, i, from)?];
        conds.extend(combination_condition(sys, ctx, &anc, &combinations)?);
        conds.extend(inputs_condition(table, ctx, &cubes)?);
        let mut updates = Vec::new();
        for k in 0..table.len() {
            if outputs >> k & 1 == 0 {
                continue;
            }
            match &table.props()[k].origin {
                Origin::Update(u) if u.is_self_update() => {}
                Origin::Update(u) => updates.push(ctx.update(u)?),
                _ => {
                    return Err(SolidityError::Unsupported(format!(
                        "output `{}` is not a cell update",
                        table.props()[k].display
                    )))
                }
            }
        }
        branches.push(ManifestBranch {
            from,
            to,
            ancestors: anc.clone(),
            combinations,
            inputs: cubes,
            outputs,
            condition: conds.join(" && "),
            updates,
        });
    }
    Ok(MethodPlan { machine: Some(i), call, branches })
}

fn render_body(sys: &SplitSystem, ctx: &Ctx, plan: &MethodPlan) -> Result<Vec<String>, SolidityError> {
    let mut lines = vec!["require(!inMethod);".to_string(), "inMethod = true;".to_string()];
    if plan.branches.is_empty() {
        lines.push("revert();".into());
    }
    for (k, b) in plan.branches.iter().enumerate() {
        let kw = if k == 0 { "if" } else { "} else if" };
        lines.push(format!("{kw} ({}) {{", b.condition));
        let i = plan.machine.expect("branches belong to a machine");
        let m = &sys.machines[i];
        lines.push(format!(
            "    {} = {}.{};",
            state_expr(sys, ctx, i)?,
            names(&m.subset).state_enum,
            m.state_name(b.to)
        ));
        for u in &b.updates {
            lines.push(format!("    {u}"));
        }
    }
    if !plan.branches.is_empty() {
        lines.push("} else {".into());
        lines.push("    revert();".into());
        lines.push("}".into());
    }
    lines.push("inMethod = false;".into());
    Ok(lines)
}

/// Dispatch logic of one method, bracketed by the reentrancy flag.
pub fn emit_method_body(
    sys: &SplitSystem,
    table: &PropTable,
    method: &str,
    sig: &SignatureConfig,
) -> Result<String, SolidityError> {
    let msig = sig.methods.get(method).ok_or_else(|| SolidityError::MissingSignature {
        kind: "method",
        name: method.to_string(),
    })?;
    let ctx = Ctx { sig, method, msig };
    let report = check_independence(sys);
    let plan = plan_method(sys, table, &ctx, &report.verdicts)?;
    Ok(render_body(sys, &ctx, &plan)?.join("\n") + "\n")
}

/// Generates the contract and its manifest. `name` is used when the
/// signatures do not name the contract.
pub fn emit_contract(
    sys: &SplitSystem,
    spec: &PastTslSpec,
    table: &PropTable,
    sig: &SignatureConfig,
    name: &str,
) -> Result<EmittedContract, SolidityError> {
    sig.validate(&spec.declarations, &spec.parameters)?;
    let report = check_independence(sys);
    if !report.independent() {
        return Err(SolidityError::NotIndependent);
    }
    let contract = sig.contract.clone().unwrap_or_else(|| name.to_string());
    let param_type = |p: &String| -> Result<&str, SolidityError> {
        sig.parameters.get(p).map(String::as_str).ok_or_else(|| SolidityError::MissingSignature {
            kind: "parameter",
            name: p.clone(),
        })
    };
    let w = &sys.original;
    let kstates: Vec<String> = (0..w.num_states.max(1)).map(|s| w.state_name(s)).collect();

    let mut src = String::new();
    let _ = writeln!(src, "// SPDX-License-Identifier: UNLICENSED");
    let _ = writeln!(src, "pragma solidity {PRAGMA};");
    let _ = writeln!(src);
    let _ = writeln!(src, "contract {contract} {{");
    let _ = writeln!(src, "    // state machine states");
    let mut machines = Vec::new();
    for m in &sys.machines {
        let n = names(&m.subset);
        let states: Vec<String> = (0..m.num_states).map(|q| m.state_name(q)).collect();
        let _ = writeln!(src, "    enum {} {{ {} }}", n.state_enum, states.join(", "));
        machines.push(ManifestMachine {
            subset: m.subset.0.clone(),
            state_enum: n.state_enum,
            state_field: n.state_field,
            knowledge_map: n.knowledge_map,
            states,
            knowledge: m.knowledge.clone(),
        });
    }
    let _ = writeln!(src, "    enum KState {{ {} }}", kstates.join(", "));
    let _ = writeln!(src, "    // knowledge maps");
    for mm in &machines {
        let ty = mapping_type(&[&mm.state_enum, "KState"], "bool");
        let _ = writeln!(src, "    {ty} private {};", mm.knowledge_map);
    }
    let _ = writeln!(src, "    // current state");
    for (m, mm) in sys.machines.iter().zip(&machines) {
        if m.subset.is_empty() {
            let _ = writeln!(
                src,
                "    {} private {} = {}.{};",
                mm.state_enum, mm.state_field, mm.state_enum, mm.states[0]
            );
        } else {
            let keys: Vec<&str> = m.subset.0.iter().map(param_type).collect::<Result<_, _>>()?;
            let _ = writeln!(src, "    {} private {};", mapping_type(&keys, &mm.state_enum), mm.state_field);
        }
    }
    let mut ctor_args = Vec::new();
    let mut ctor_inits = Vec::new();
    let constants: Vec<String> = spec
        .declarations
        .constants
        .iter()
        .filter(|c| sig.constants.contains_key(*c))
        .cloned()
        .collect();
    if !constants.is_empty() {
        let _ = writeln!(src, "    // constants");
    }
    for c in &constants {
        let cs = &sig.constants[c];
        let _ = writeln!(src, "    {} private immutable {c};", cs.ty);
        match &cs.value {
            Some(v) => ctor_inits.push(format!("{c} = {v};")),
            None => {
                ctor_args.push(format!("{} _{c}", cs.ty));
                ctor_inits.push(format!("{c} = _{c};"));
            }
        }
    }
    let fields: Vec<String> = spec.declarations.cells.keys().cloned().collect();
    if !fields.is_empty() {
        let _ = writeln!(src, "    // fields");
    }
    for f in &fields {
        let cs = &sig.cells[f];
        let keys: Vec<&str> = cs.parameters.iter().map(param_type).collect::<Result<_, _>>()?;
        let _ = writeln!(src, "    {} {} {f};", mapping_type(&keys, &cs.ty), cs.visibility);
    }
    let _ = writeln!(src, "    address private owner;");
    let _ = writeln!(src, "    bool inMethod = false;");
    let _ = writeln!(src, "    // constructor");
    let _ = writeln!(src, "    constructor({}) {{", ctor_args.join(", "));
    for (m, mm) in sys.machines.iter().zip(&machines) {
        for (q, ks) in m.knowledge.iter().enumerate() {
            for &s in ks {
                let _ = writeln!(
                    src,
                    "        {}[{}.{}][KState.{}] = true;",
                    mm.knowledge_map,
                    mm.state_enum,
                    mm.states[q],
                    kstates[s]
                );
            }
        }
    }
    let _ = writeln!(src, "        owner = msg.sender;");
    for init in &ctor_inits {
        let _ = writeln!(src, "        {init}");
    }
    let _ = writeln!(src, "    }}");

    let mut methods = Vec::new();
    for (method, _) in spec.declarations.ordered_methods() {
        let msig = &sig.methods[method];
        let ctx = Ctx { sig, method, msig };
        let plan = plan_method(sys, table, &ctx, &report.verdicts)?;
        let body = render_body(sys, &ctx, &plan)?;
        let mut args: Vec<String> = Vec::new();
        for b in &msig.parameters {
            if b.fixed().is_none() {
                args.push(format!("{} _{}", param_type(&b.name().to_string())?, b.name()));
            }
        }
        for (a, ty) in &msig.arguments {
            args.push(format!("{ty} _{a}"));
        }
        let payable = if msig.payable { " payable" } else { "" };
        let _ = writeln!(src);
        if methods.is_empty() {
            let _ = writeln!(src, "    // methods");
        }
        let _ = writeln!(src, "    function {method}({}) public{payable} {{", args.join(", "));
        for l in &body {
            let _ = writeln!(src, "        {l}");
        }
        let _ = writeln!(src, "    }}");
        let last = body.len() - 1;
        methods.push(ManifestMethod {
            name: method.clone(),
            machine: plan.machine,
            call: plan.call,
            arguments: args,
            payable: msig.payable,
            sets_guard: body[0] == "require(!inMethod);" && body[1] == "inMethod = true;",
            clears_guard: body[last] == "inMethod = false;",
            reverts_by_default: body[last - 1] == "}" && body[last - 2] == "    revert();"
                || body[last - 1] == "revert();",
            branches: plan.branches,
        });
    }
    let _ = writeln!(src, "}}");

    let manifest = Manifest {
        contract,
        pragma: PRAGMA.to_string(),
        alphabet: w.alphabet.entries.iter().map(|e| e.name.clone()).collect(),
        parameters: sys.parameters.clone(),
        knowledge_enum: "KState".into(),
        knowledge_states: kstates,
        machines,
        constants,
        fields,
        methods,
    };
    Ok(EmittedContract { source: src, manifest })
}
