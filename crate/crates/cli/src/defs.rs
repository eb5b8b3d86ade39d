//! JSON definitions of algebras and modules, presets, and the resolution
//! of target strings such as `cur:sl2` or `wN:2`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use lambda_forge::algebra::builders::{current, semidirect, FinAlgebra};
use lambda_forge::algebra::superconf::{k_n, w_n};
use lambda_forge::algebra::{ConfElt, ConformalAlgebra, Gen, GenInfo, Generators, Kind};
use lambda_forge::arith::rat::fmt_rat;
use lambda_forge::arith::{MPoly, Rat, Var};
use lambda_forge::module::chom::contragredient;
use lambda_forge::module::{
    cend_standard, m_delta_alpha, m_u, sl2_standard_matrices, trivial, Action, ConfModule, ModBasis, ModElt,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::expr::{is_reserved, parse_elt, parse_poly, parse_rational};

pub const ALGEBRA_PRESETS: [(&str, &str); 3] = [
    ("virasoro", include_str!("../presets/virasoro.json")),
    ("sl2", include_str!("../presets/sl2.json")),
    ("mat2", include_str!("../presets/mat2.json")),
];

pub const MODULE_PRESETS: [(&str, &str); 1] = [("sl2-standard", include_str!("../presets/sl2-standard.json"))];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Lie,
    Associative,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

/// A weight written as a JSON integer or as a string such as `"3/2"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightDecl {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenDecl {
    pub name: String,
    #[serde(default)]
    pub parity: Parity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    pub left: String,
    pub right: String,
    /// An expression such as `(d + 2*l)*L`.
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub kind: KindName,
    #[serde(rename = "super", default)]
    pub is_super: bool,
    pub generators: Vec<GenDecl>,
    #[serde(default)]
    pub table: Vec<EntryDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDecl {
    pub gen: String,
    pub basis: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleFile {
    pub name: String,
    /// Target string of the algebra acting.
    pub algebra: String,
    pub basis: Vec<GenDecl>,
    #[serde(default)]
    pub action: Vec<ActionDecl>,
}

fn def_err(path: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Definition {
        path: path.into(),
        msg: msg.into(),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(src: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(src).map_err(|e| def_err(origin, e.to_string()))
}

fn weight_of(w: &Option<WeightDecl>, default: i64, path: &str) -> Result<Rat, CliError> {
    match w {
        None => Ok(Rat::from_integer(default.into())),
        Some(WeightDecl::Int(k)) => Ok(Rat::from_integer((*k).into())),
        Some(WeightDecl::Text(s)) => parse_rational(s).map_err(|e| def_err(path, e.to_string())),
    }
}

fn check_names(decls: &[GenDecl], field: &str) -> Result<(), CliError> {
    let mut seen = BTreeMap::new();
    for (i, g) in decls.iter().enumerate() {
        let path = format!("{field}[{i}].name");
        let valid = g.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if !valid {
            return Err(def_err(path, format!("`{}` is not an identifier", g.name)));
        }
        if is_reserved(&g.name) {
            return Err(def_err(path, format!("`{}` is a reserved variable name", g.name)));
        }
        if let Some(j) = seen.insert(g.name.clone(), i) {
            return Err(def_err(path, format!("`{}` is already declared at {field}[{j}]", g.name)));
        }
    }
    Ok(())
}

fn only_vars(p: &MPoly, allowed: &[Var], path: &str) -> Result<(), CliError> {
    match p.vars().into_iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(def_err(path, format!("the variable `{v}` is not allowed here"))),
        None => Ok(()),
    }
}

impl AlgebraFile {
    pub fn parse(src: &str, origin: &str) -> Result<Self, CliError> {
        parse_json(src, origin)
    }

    pub fn build(&self) -> Result<ConformalAlgebra, CliError> {
        check_names(&self.generators, "generators")?;
        let mut infos = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let w = weight_of(&g.weight, 1, &format!("generators[{i}].weight"))?;
            infos.push(GenInfo::new(Gen::Basis(i as u16), g.name.clone(), g.parity == Parity::Odd, w));
        }
        if !self.is_super && infos.iter().any(|g| g.odd) {
            return Err(def_err("super", "odd generators need `\"super\": true`"));
        }
        let lookup = |name: &str| self.generators.iter().position(|g| g.name == name).map(|i| Gen::Basis(i as u16));
        let mut table: BTreeMap<(Gen, Gen), ConfElt> = BTreeMap::new();
        for (i, e) in self.table.iter().enumerate() {
            let at = |f: &str| format!("table[{i}].{f}");
            let a = lookup(&e.left).ok_or_else(|| def_err(at("left"), format!("unknown generator `{}`", e.left)))?;
            let b = lookup(&e.right).ok_or_else(|| def_err(at("right"), format!("unknown generator `{}`", e.right)))?;
            let v = parse_elt(&e.value, lookup).map_err(|err| def_err(at("value"), strip(err)))?;
            for (_, p) in v.terms() {
                only_vars(p, &[Var::D, Var::Lambda], &at("value"))?;
            }
            if table.contains_key(&(a, b)) {
                return Err(def_err(at("left"), format!("duplicate entry for ({}, {})", e.left, e.right)));
            }
            table.insert((a, b), v);
        }
        let kind = match self.kind {
            KindName::Lie => Kind::Lie,
            KindName::Associative => Kind::Associative,
        };
        ConformalAlgebra::finite(&self.name, kind, self.is_super, infos, table).map_err(|e| def_err("table", e.to_string()))
    }

    /// The file describing an algebra with explicitly listed generators.
    pub fn from_algebra(alg: &ConformalAlgebra) -> Result<Self, CliError> {
        let (Generators::Finite(gens), Some(table)) = (alg.generators_def(), alg.finite_table()) else {
            return Err(CliError::Input(format!("{} has no finite table", alg.name())));
        };
        let generators = gens
            .iter()
            .map(|g| GenDecl {
                name: g.name.clone(),
                parity: if g.odd { Parity::Odd } else { Parity::Even },
                weight: Some(weight_decl(&g.weight)),
            })
            .collect();
        let table = table
            .iter()
            .map(|((a, b), v)| EntryDecl {
                left: alg.gen_name(a),
                right: alg.gen_name(b),
                value: alg.render(v),
            })
            .collect();
        Ok(AlgebraFile {
            name: alg.name().to_string(),
            kind: match alg.kind() {
                Kind::Lie => KindName::Lie,
                Kind::Associative => KindName::Associative,
            },
            is_super: alg.is_super(),
            generators,
            table,
        })
    }
}

fn weight_decl(w: &Rat) -> WeightDecl {
    if w.is_integer() {
        if let Ok(k) = i64::try_from(w.to_integer()) {
            return WeightDecl::Int(k);
        }
    }
    WeightDecl::Text(fmt_rat(w))
}

fn strip(e: CliError) -> String {
    match e {
        CliError::Parse(s) | CliError::Input(s) => s,
        other => other.to_string(),
    }
}

impl ModuleFile {
    pub fn parse(src: &str, origin: &str) -> Result<Self, CliError> {
        parse_json(src, origin)
    }

    pub fn build(&self, alg: Arc<ConformalAlgebra>) -> Result<ConfModule, CliError> {
        check_names(&self.basis, "basis")?;
        let mut basis = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            let w = weight_of(&b.weight, 0, &format!("basis[{i}].weight"))?;
            basis.push(ModBasis::new(b.name.clone(), b.parity == Parity::Odd, w));
        }
        let lookup = |name: &str| self.basis.iter().position(|b| b.name == name);
        let mut action: BTreeMap<(Gen, usize), ModElt> = BTreeMap::new();
        for (i, e) in self.action.iter().enumerate() {
            let at = |f: &str| format!("action[{i}].{f}");
            let g = alg
                .by_name(&e.gen)
                .map_err(|_| def_err(at("gen"), format!("unknown generator `{}`", e.gen)))?;
            let k = lookup(&e.basis).ok_or_else(|| def_err(at("basis"), format!("unknown basis vector `{}`", e.basis)))?;
            let v = parse_elt(&e.value, lookup).map_err(|err| def_err(at("value"), strip(err).replace("generator", "basis vector")))?;
            for (_, p) in v.terms() {
                only_vars(p, &[Var::D, Var::Lambda, Var::Delta, Var::Alpha], &at("value"))?;
            }
            if action.contains_key(&(g, k)) {
                return Err(def_err(at("gen"), format!("duplicate entry for ({}, {})", e.gen, e.basis)));
            }
            action.insert((g, k), v);
        }
        ConfModule::finite(&self.name, alg, basis, action).map_err(|e| def_err("action", e.to_string()))
    }

    pub fn from_module(m: &ConfModule, algebra: &str) -> Result<Self, CliError> {
        let Action::Finite(action) = m.action() else {
            return Err(CliError::Input(format!("{} has no finite action table", m.name())));
        };
        Ok(ModuleFile {
            name: m.name().to_string(),
            algebra: algebra.to_string(),
            basis: m
                .basis()
                .iter()
                .map(|b| GenDecl {
                    name: b.name.clone(),
                    parity: if b.odd { Parity::Odd } else { Parity::Even },
                    weight: Some(weight_decl(&b.weight)),
                })
                .collect(),
            action: action
                .iter()
                .map(|((g, i), v)| ActionDecl {
                    gen: m.algebra().gen_name(g),
                    basis: m.basis_name(*i),
                    value: m.render(v),
                })
                .collect(),
        })
    }
}

/// Equality of algebras up to their names.
pub fn same_structure(a: &ConformalAlgebra, b: &ConformalAlgebra) -> bool {
    a.kind() == b.kind()
        && a.is_super() == b.is_super()
        && a.generators_def() == b.generators_def()
        && a.table() == b.table()
        && (a.finite_table().is_some() || a.name() == b.name())
}

fn read_source(spec: &str) -> Result<Option<(String, String)>, CliError> {
    let p = Path::new(spec);
    if spec.ends_with(".json") || p.is_file() {
        let src = std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        return Ok(Some((src, spec.to_string())));
    }
    Ok(None)
}

fn parse_count(s: &str, what: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Input(format!("`{s}` is not a valid {what}")))
}

/// Finite-dimensional algebra underlying a table with constant entries.
pub fn finite_part(alg: &ConformalAlgebra) -> Result<FinAlgebra, CliError> {
    let (Generators::Finite(gens), Some(table)) = (alg.generators_def(), alg.finite_table()) else {
        return Err(CliError::Input(format!("{} is not given by a finite table", alg.name())));
    };
    let mut fin = FinAlgebra::new(gens.iter().map(|g| g.name.clone()).collect(), alg.kind());
    fin.odd = gens.iter().map(|g| g.odd).collect();
    let index = |g: &Gen| gens.iter().position(|x| x.gen == *g).expect("table refers to declared generators");
    for ((a, b), v) in table {
        for (c, p) in v.terms() {
            let k = p.as_constant().ok_or_else(|| {
                CliError::Input(format!(
                    "{} is not a current algebra: ({}, {}) depends on d or l",
                    alg.name(),
                    alg.gen_name(a),
                    alg.gen_name(b)
                ))
            })?;
            fin.set(index(a), index(b), index(c), k);
        }
    }
    Ok(fin)
}

pub fn preset_algebra(name: &str) -> Option<Result<ConformalAlgebra, CliError>> {
    ALGEBRA_PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(n, src)| AlgebraFile::parse(src, &format!("preset {n}"))?.build())
}

/// Resolves a target: a preset, a JSON file, or one of `cur:`, `semidirect:`,
/// `wN:`, `kN:`, `gc:`, `cend:`.
pub fn load_algebra(spec: &str) -> Result<ConformalAlgebra, CliError> {
    if let Some(r) = preset_algebra(spec) {
        return r;
    }
    if let Some((head, rest)) = spec.split_once(':') {
        let fin = || finite_part(&load_algebra(rest)?);
        return match head {
            "cur" => Ok(current(&format!("Cur {rest}"), &fin()?)?),
            "semidirect" => Ok(semidirect(&format!("Vir ⋉ Cur {rest}"), &fin()?)?),
            "wN" => Ok(w_n(parse_count(rest, "rank")?)?),
            "kN" => Ok(k_n(parse_count(rest, "rank")?)?),
            "gc" | "cend" => {
                let n = u8::try_from(parse_count(rest, "size")?).map_err(|_| CliError::Input(format!("{rest} is too large")))?;
                let kind = if head == "gc" { Kind::Lie } else { Kind::Associative };
                Ok(ConformalAlgebra::gc(n, kind)?)
            }
            _ => Err(CliError::Input(format!("unknown target family `{head}`"))),
        };
    }
    match read_source(spec)? {
        Some((src, origin)) => AlgebraFile::parse(&src, &origin)?.build(),
        None => Err(CliError::Input(format!(
            "unknown target `{spec}` (presets: {})",
            ALGEBRA_PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn module_from_file(file: ModuleFile, alg: Arc<ConformalAlgebra>) -> Result<ConfModule, CliError> {
    let own = load_algebra(&file.algebra)?;
    if !same_structure(&own, &alg) {
        return Err(def_err(
            "algebra",
            format!("the module is defined over `{}`, not over {}", file.algebra, alg.name()),
        ));
    }
    file.build(alg)
}

/// Resolves a module over `alg`: `trivial`, `m:<Δ>,<α>`, `standard`,
/// `adjoint`, `cend:<α>`, `dual:<spec>`, a preset or a JSON file.
pub fn load_module(spec: &str, alg: Arc<ConformalAlgebra>) -> Result<ConfModule, CliError> {
    if let Some(rest) = spec.strip_prefix("dual:") {
        return Ok(contragredient(&load_module(rest, alg)?)?);
    }
    if let Some(rest) = spec.strip_prefix("m:") {
        let (d, a) = rest
            .split_once(',')
            .ok_or_else(|| CliError::Input(format!("`{spec}` should read m:<Delta>,<alpha>")))?;
        return Ok(m_delta_alpha(alg, parse_poly(d)?, parse_poly(a)?)?);
    }
    if let Some(rest) = spec.strip_prefix("cend:") {
        return Ok(cend_standard(alg, parse_poly(rest)?)?);
    }
    match spec {
        "trivial" => return Ok(trivial(alg)),
        "standard" => {
            let names = vec!["u1".to_string(), "u2".to_string()];
            return Ok(m_u(alg, names, &sl2_standard_matrices())?);
        }
        "adjoint" => {
            let fin = finite_part(&alg)?;
            let names = fin.names.iter().map(|n| format!("{n}'")).collect();
            return Ok(m_u(alg, names, &fin.adjoint_matrices())?);
        }
        _ => {}
    }
    if let Some((n, src)) = MODULE_PRESETS.iter().find(|(n, _)| *n == spec) {
        return module_from_file(ModuleFile::parse(src, &format!("preset {n}"))?, alg);
    }
    match read_source(spec)? {
        Some((src, origin)) => module_from_file(ModuleFile::parse(&src, &origin)?, alg),
        None => Err(CliError::Input(format!("unknown module `{spec}`"))),
    }
}

/// Parses a generator combination such as `2*L + d*L` against an algebra.
pub fn parse_alg_elt(alg: &ConformalAlgebra, s: &str) -> Result<ConfElt, CliError> {
    parse_elt(s, |name| alg.by_name(name).ok())
}

pub fn parse_mod_elt(m: &ConfModule, s: &str) -> Result<ModElt, CliError> {
    parse_elt(s, |name| m.by_name(name).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lambda_forge::algebra::builders::virasoro;

    #[test]
    fn presets_round_trip() {
        for (name, _) in ALGEBRA_PRESETS {
            let alg = load_algebra(name).unwrap();
            let file = AlgebraFile::from_algebra(&alg).unwrap();
            let json = serde_json::to_string_pretty(&file).unwrap();
            let again = AlgebraFile::parse(&json, "round trip").unwrap().build().unwrap();
            assert_eq!(again, alg, "{name}");
        }
    }

    #[test]
    fn presets_match_builders() {
        assert!(same_structure(&load_algebra("virasoro").unwrap(), &virasoro()));
        let sl2 = current("c", &FinAlgebra::sl2()).unwrap();
        assert!(same_structure(&load_algebra("sl2").unwrap(), &sl2));
        let mat2 = current("c", &FinAlgebra::mat(2)).unwrap();
        assert!(same_structure(&load_algebra("mat2").unwrap(), &mat2));
        let cur = load_algebra("cur:sl2").unwrap();
        assert!(same_structure(&cur, &sl2));
    }

    #[test]
    fn undeclared_generator_is_named() {
        let src = r#"{"name":"x","kind":"lie","generators":[{"name":"L","weight":2}],
            "table":[{"left":"L","right":"L","value":"(d + 2*l)*X"}]}"#;
        let err = AlgebraFile::parse(src, "inline").unwrap().build().unwrap_err().to_string();
        assert!(err.contains("table[0].value") && err.contains("`X`"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = AlgebraFile::parse("{\"name\": \"x\",\n \"kind\": lie}", "inline").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = AlgebraFile::parse(r#"{"name":"x","kind":"lie","generators":[],"extra":1}"#, "inline")
            .unwrap_err()
            .to_string();
        assert!(err.contains("extra"), "{err}");
    }

    #[test]
    fn reserved_names_are_rejected() {
        let src = r#"{"name":"x","kind":"lie","generators":[{"name":"d"}]}"#;
        let err = AlgebraFile::parse(src, "inline").unwrap().build().unwrap_err().to_string();
        assert!(err.contains("generators[0].name"), "{err}");
    }

    #[test]
    fn modules_resolve() {
        let sl2 = Arc::new(load_algebra("sl2").unwrap());
        let std = load_module("standard", sl2.clone()).unwrap();
        let preset = load_module("sl2-standard", sl2.clone()).unwrap();
        assert_eq!(std.action(), preset.action());
        assert!(load_module("sl2-standard", Arc::new(virasoro())).is_err());
        let vir = Arc::new(virasoro());
        assert_eq!(load_module("m:Delta,alpha", vir.clone()).unwrap().dim(), 1);
        assert_eq!(load_module("dual:m:2,0", vir).unwrap().dim(), 1);
    }
}
