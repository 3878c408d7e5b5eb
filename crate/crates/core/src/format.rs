//! FGSYM model files and UAI import.
//!
//! ```text
//! FGSYM 1
//! vars 3
//! card 2 2 2
//! factor 3 0 1 2
//! sym { 0 1 2 }
//! ctable 4 3 2 1
//! ```
//!
//! A `factor` line starts a block listing the scope. An optional `sym` line
//! declares disjoint groups of interchangeable scope variables. The block ends
//! with exactly one of `table` (dense, row-major in scope order, last variable
//! fastest) or `ctable` (requires `sym`: free variables in scope order as the
//! outer index, then one histogram dimension per declared group, histograms in
//! ascending lexicographic order of their count vectors). Values may continue
//! on following lines. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::factor::{DenseFactor, VarId, Variable};
use crate::graph::{Factor, FactorGraph};
use crate::symmetry::{encode, encode_unchecked, CompactFactor, SymmetryPartition};

/// A parsed model with the partitions declared in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub graph: FactorGraph,
    pub declared: Vec<Option<SymmetryPartition>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validation {
    /// Verify declared symmetries against dense tables on load.
    Strict,
    /// Trust declarations.
    Fast,
}

#[derive(Debug, Default)]
struct Block {
    line: usize,
    scope: Vec<VarId>,
    sym: Option<Vec<Vec<VarId>>>,
    table: Option<(bool, usize, Vec<f64>)>,
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn numbers<T: std::str::FromStr>(line: usize, tokens: &[&str]) -> Result<Vec<T>> {
    tokens
        .iter()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(line, format!("invalid number '{t}'")))
        })
        .collect()
}

fn parse_groups(line: usize, tokens: &[&str]) -> Result<Vec<Vec<VarId>>> {
    let mut groups = Vec::new();
    let mut current: Option<Vec<VarId>> = None;
    for &t in tokens {
        match (t, current.as_mut()) {
            ("{", None) => current = Some(Vec::new()),
            ("}", Some(_)) => groups.push(current.take().unwrap()),
            ("{", Some(_)) | ("}", None) => {
                return Err(parse_err(line, "unbalanced braces in sym"))
            }
            (id, Some(g)) => g.push(
                id.parse()
                    .map_err(|_| parse_err(line, format!("invalid variable id '{id}'")))?,
            ),
            (other, None) => {
                return Err(parse_err(line, format!("expected '{{', found '{other}'")))
            }
        }
    }
    if current.is_some() {
        return Err(parse_err(line, "unterminated group in sym"));
    }
    Ok(groups)
}

/// Splits `{0 1}` into `{`, `0`, `1`, `}`.
fn tokenize(line: &str) -> Vec<String> {
    line.replace('{', " { ")
        .replace('}', " } ")
        .split_whitespace()
        .map(str::to_owned)
        .collect()
}

pub fn parse_model(text: &str, validation: Validation) -> Result<ModelFile> {
    let mut header_seen = false;
    let mut nvars: Option<usize> = None;
    let mut cards: Option<Vec<usize>> = None;
    let mut blocks: Vec<Block> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let owned = tokenize(content);
        let tokens: Vec<&str> = owned.iter().map(String::as_str).collect();
        let Some((&keyword, rest)) = tokens.split_first() else {
            continue;
        };
        if !header_seen {
            if keyword != "FGSYM" || rest != ["1"] {
                return Err(parse_err(line, "expected header 'FGSYM 1'"));
            }
            header_seen = true;
            continue;
        }
        match keyword {
            "vars" => {
                if nvars.is_some() {
                    return Err(parse_err(line, "duplicate 'vars'"));
                }
                let v: Vec<usize> = numbers(line, rest)?;
                if v.len() != 1 {
                    return Err(parse_err(line, "'vars' takes one count"));
                }
                nvars = Some(v[0]);
            }
            "card" => {
                let n = nvars.ok_or_else(|| parse_err(line, "'card' before 'vars'"))?;
                if cards.is_some() {
                    return Err(parse_err(line, "duplicate 'card'"));
                }
                let c: Vec<usize> = numbers(line, rest)?;
                if c.len() != n {
                    return Err(parse_err(
                        line,
                        format!("expected {n} cardinalities, found {}", c.len()),
                    ));
                }
                cards = Some(c);
            }
            "factor" => {
                if cards.is_none() && nvars != Some(0) {
                    return Err(parse_err(line, "'factor' before 'card'"));
                }
                let v: Vec<usize> = numbers(line, rest)?;
                let Some((&k, scope)) = v.split_first() else {
                    return Err(parse_err(line, "'factor' needs an arity"));
                };
                if scope.len() != k {
                    return Err(parse_err(
                        line,
                        format!("arity {k} but {} ids", scope.len()),
                    ));
                }
                if let Some(prev) = blocks.last() {
                    if prev.table.is_none() {
                        return Err(parse_err(
                            line,
                            format!("factor {} has no table", blocks.len() - 1),
                        ));
                    }
                }
                blocks.push(Block {
                    line,
                    scope: scope.to_vec(),
                    ..Block::default()
                });
            }
            "sym" => {
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "'sym' outside a factor"))?;
                if block.sym.is_some() || block.table.is_some() {
                    return Err(parse_err(
                        line,
                        "'sym' must precede the table and appear once",
                    ));
                }
                block.sym = Some(parse_groups(line, rest)?);
            }
            "table" | "ctable" => {
                let block = blocks
                    .last_mut()
                    .ok_or_else(|| parse_err(line, format!("'{keyword}' outside a factor")))?;
                if block.table.is_some() {
                    return Err(parse_err(line, "factor already has a table"));
                }
                let compact = keyword == "ctable";
                if compact && block.sym.is_none() {
                    return Err(parse_err(line, "'ctable' requires 'sym'"));
                }
                block.table = Some((compact, line, numbers(line, rest)?));
            }
            _ if keyword.parse::<f64>().is_ok() => {
                let table = blocks
                    .last_mut()
                    .and_then(|b| b.table.as_mut())
                    .ok_or_else(|| parse_err(line, "values outside a table"))?;
                table.2.extend(numbers::<f64>(line, &tokens)?);
            }
            other => return Err(parse_err(line, format!("unknown keyword '{other}'"))),
        }
    }

    if !header_seen {
        return Err(parse_err(1, "expected header 'FGSYM 1'"));
    }
    let n = nvars.ok_or_else(|| parse_err(last_line, "missing 'vars'"))?;
    let cards = match cards {
        Some(c) => c,
        None if n == 0 => Vec::new(),
        None => return Err(parse_err(last_line, "missing 'card'")),
    };
    if let Some(b) = blocks.last() {
        if b.table.is_none() {
            return Err(parse_err(
                b.line,
                format!("factor {} has no table", blocks.len() - 1),
            ));
        }
    }

    let variables: Vec<Variable> = cards
        .iter()
        .enumerate()
        .map(|(id, &c)| {
            Variable::new(id, c).map_err(|_| Error::Validation {
                factor: usize::MAX,
                reason: format!("variable {id} has cardinality 0"),
            })
        })
        .collect::<Result<_>>()?;

    let mut factors = Vec::with_capacity(blocks.len());
    let mut declared = Vec::with_capacity(blocks.len());
    for (index, block) in blocks.into_iter().enumerate() {
        let invalid = |reason: String| Error::Validation {
            factor: index,
            reason,
        };
        let scope: Vec<Variable> = block
            .scope
            .iter()
            .map(|&id| {
                variables
                    .get(id)
                    .copied()
                    .ok_or_else(|| invalid(format!("variable {id} is not declared")))
            })
            .collect::<Result<_>>()?;
        let partition = block
            .sym
            .as_ref()
            .map(|g| SymmetryPartition::new(g.clone()))
            .transpose()
            .map_err(|e| invalid(e.to_string()))?;
        if let Some(p) = &partition {
            p.validate(&scope).map_err(|e| invalid(e.to_string()))?;
        }
        let (compact, _, values) = block.table.expect("checked above");
        let factor = if compact {
            let groups = block.sym.as_ref().expect("ctable requires sym");
            let grouped: Vec<VarId> = groups.iter().flatten().copied().collect();
            let free: Vec<Variable> = scope
                .iter()
                .filter(|v| !grouped.contains(&v.id()))
                .copied()
                .collect();
            let layout: Vec<(Vec<VarId>, usize)> = groups
                .iter()
                .map(|g| {
                    let card = g
                        .first()
                        .and_then(|&id| variables.get(id))
                        .map_or(1, Variable::cardinality);
                    (g.clone(), card)
                })
                .collect();
            Factor::Compact(
                CompactFactor::from_layout(free, layout, values)
                    .map_err(|e| invalid(e.to_string()))?,
            )
        } else {
            let dense = DenseFactor::new(scope, values).map_err(|e| invalid(e.to_string()))?;
            match &partition {
                None => Factor::from(dense),
                Some(p) => {
                    let c = match validation {
                        Validation::Strict => encode(&dense, p),
                        Validation::Fast => encode_unchecked(&dense, p),
                    };
                    Factor::Compact(c.map_err(|e| invalid(e.to_string()))?)
                }
            }
        };
        factors.push(factor);
        declared.push(partition);
    }

    let graph = FactorGraph::new(variables, factors)?;
    Ok(ModelFile { graph, declared })
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical FGSYM text for `graph`. Compact factors are written as `ctable`.
/// Variables must be numbered `0..n`.
pub fn print_model(graph: &FactorGraph) -> Result<String> {
    let vars: Vec<&Variable> = graph.variables().collect();
    if vars.iter().enumerate().any(|(i, v)| v.id() != i) {
        return Err(Error::InvalidConfig(
            "FGSYM requires variables numbered 0..n".into(),
        ));
    }
    let mut out = String::from("FGSYM 1\n");
    let _ = writeln!(out, "vars {}", vars.len());
    let _ = writeln!(
        out,
        "card {}",
        join(vars.iter().map(|v| v.cardinality())).trim_end()
    );
    for (i, f) in graph.factors().iter().enumerate() {
        let scope = f.scope();
        let _ = writeln!(
            out,
            "factor {} {}",
            scope.len(),
            join(scope.iter().map(Variable::id))
        );
        match f {
            _ if f.is_materialized() && f.partition().is_trivial() => {
                let d = f.to_dense().expect("materialized");
                let _ = writeln!(out, "table {}", join(d.table()));
            }
            Factor::Dense(..) | Factor::Compact(_) => {
                let c = f.to_compact().expect("materialized");
                let groups: Vec<String> = c
                    .groups()
                    .iter()
                    .map(|g| format!("{{ {} }}", join(g.vars())))
                    .collect();
                let _ = writeln!(out, "sym {}", groups.join(" "));
                let _ = writeln!(out, "ctable {}", join(c.table()));
            }
            Factor::Shape(_) => return Err(Error::NotMaterialized(i)),
        }
    }
    Ok(out
        .lines()
        .map(str::trim_end)
        .collect::<Vec<_>>()
        .join("\n")
        + "\n")
}

/// Reads a UAI `MARKOV` or `BAYES` model. Every factor becomes a dense
/// factor with no declared symmetries.
pub fn parse_uai(text: &str) -> Result<FactorGraph> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, kind) = tokens
        .next()
        .ok_or_else(|| parse_err(1, "empty UAI file"))?;
    if kind != "MARKOV" && kind != "BAYES" {
        return Err(parse_err(
            line,
            format!("unsupported UAI model type '{kind}'"),
        ));
    }
    let mut tokens = UaiTokens(Box::new(tokens));
    let n = tokens.num("variable count")?;
    let cards: Vec<usize> = (0..n)
        .map(|_| tokens.num("cardinality"))
        .collect::<Result<_>>()?;
    let variables: Vec<Variable> = cards
        .iter()
        .enumerate()
        .map(|(id, &c)| Variable::new(id, c))
        .collect::<Result<_>>()?;
    let k = tokens.num("factor count")?;
    let mut scopes = Vec::with_capacity(k);
    for _ in 0..k {
        let arity = tokens.num("factor arity")?;
        let scope: Vec<usize> = (0..arity)
            .map(|_| tokens.num("variable id"))
            .collect::<Result<_>>()?;
        scopes.push(scope);
    }
    let mut factors = Vec::with_capacity(k);
    for (index, scope) in scopes.into_iter().enumerate() {
        let count = tokens.num("table size")?;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, t) = tokens.next("potential")?;
            values.push(
                t.parse::<f64>()
                    .map_err(|_| parse_err(line, format!("invalid potential '{t}'")))?,
            );
        }
        let vars: Vec<Variable> = scope
            .iter()
            .map(|&id| {
                variables.get(id).copied().ok_or_else(|| Error::Validation {
                    factor: index,
                    reason: format!("variable {id} is not declared"),
                })
            })
            .collect::<Result<_>>()?;
        let dense = DenseFactor::new(vars, values).map_err(|e| Error::Validation {
            factor: index,
            reason: e.to_string(),
        })?;
        factors.push(Factor::from(dense));
    }
    FactorGraph::new(variables, factors)
}

struct UaiTokens<'a>(Box<dyn Iterator<Item = (usize, &'a str)> + 'a>);

impl<'a> UaiTokens<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.0
            .next()
            .ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")))
    }

    fn num(&mut self, what: &str) -> Result<usize> {
        let (line, t) = self.next(what)?;
        t.parse()
            .map_err(|_| parse_err(line, format!("expected {what}, found '{t}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::joint_oracle;
    use crate::symmetry::decode;

    const TRIPLE: &str = "FGSYM 1
vars 3
card 2 2 2
factor 3 0 1 2
table 1 2 2 3 2 3 3 4
";

    #[test]
    fn parses_dense_model() {
        let m = parse_model(TRIPLE, Validation::Strict).unwrap();
        assert_eq!(m.graph.factors().len(), 1);
        assert_eq!(m.declared, vec![None]);
        assert_eq!(joint_oracle(&m.graph).unwrap(), 20.0);
    }

    #[test]
    fn round_trip() {
        let m = parse_model(TRIPLE, Validation::Strict).unwrap();
        let text = print_model(&m.graph).unwrap();
        assert_eq!(
            parse_model(&text, Validation::Strict).unwrap().graph,
            m.graph
        );

        let sym = TRIPLE.replace("table", "sym { 0 1 2 }\ntable");
        let m = parse_model(&sym, Validation::Strict).unwrap();
        let text = print_model(&m.graph).unwrap();
        assert!(text.contains("ctable 4 3 2 1"), "{text}");
        assert_eq!(
            parse_model(&text, Validation::Strict).unwrap().graph,
            m.graph
        );
    }

    #[test]
    fn ctable_size_is_checked() {
        let ok = "FGSYM 1\nvars 3\ncard 2 2 2\nfactor 3 0 1 2\nsym {0 1 2}\nctable 4 3 2 1\n";
        let m = parse_model(ok, Validation::Strict).unwrap();
        let c = match &m.graph.factors()[0] {
            Factor::Compact(c) => c.clone(),
            _ => panic!(),
        };
        assert_eq!(decode(&c).table(), &[1., 2., 2., 3., 2., 3., 3., 4.]);

        let bad = ok.replace("ctable 4 3 2 1", "ctable 4 3 2 1 0 0 0 0");
        assert!(matches!(
            parse_model(&bad, Validation::Strict),
            Err(Error::Validation { factor: 0, .. })
        ));
    }

    #[test]
    fn ctable_with_free_variables_in_scope_order() {
        // free variables 2 then 0 (scope order), X0 fastest
        let text = "FGSYM 1\nvars 3\ncard 2 2 2\nfactor 2 2 0\nsym\nctable 1 2 3 4\n";
        let m = parse_model(text, Validation::Strict).unwrap();
        let d = m.graph.factors()[0].to_dense().unwrap();
        // (x0, x2): (0,0)->1 (0,1)->3 (1,0)->2 (1,1)->4
        assert_eq!(d.table(), &[1., 3., 2., 4.]);
    }

    #[test]
    fn empty_model() {
        let m = parse_model("FGSYM 1\nvars 0\n", Validation::Strict).unwrap();
        assert_eq!(m.graph.num_variables(), 0);
        assert_eq!(joint_oracle(&m.graph).unwrap(), 1.0);
        let text = print_model(&m.graph).unwrap();
        assert_eq!(parse_model(&text, Validation::Strict).unwrap(), m);
    }

    #[test]
    fn symmetry_declarations_are_verified() {
        let text = "FGSYM 1\nvars 2\ncard 2 2\nfactor 2 0 1\nsym { 0 1 }\ntable 1 2 3 4\n";
        assert!(matches!(
            parse_model(text, Validation::Strict),
            Err(Error::Validation { factor: 0, .. })
        ));
        assert!(parse_model(text, Validation::Fast).is_ok());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let cases = [
            ("FGSYM 2\n", 1),
            ("FGSYM 1\nvars 2\ncard 2\n", 3),
            (
                "FGSYM 1\nvars 1\ncard 2\nfactor 1 0\nfactor 1 0\ntable 1 1\n",
                5,
            ),
            ("FGSYM 1\nvars 1\ncard 2\nfactor 1 0\nctable 1 1\n", 5),
            ("FGSYM 1\nvars 1\ncard 2\nbogus\n", 4),
            (
                "FGSYM 1\nvars 1\ncard 2\nfactor 1 0\nsym { 0 \ntable 1 1\n",
                5,
            ),
        ];
        for (text, line) in cases {
            match parse_model(text, Validation::Strict) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn validation_errors_name_the_factor() {
        let text = "FGSYM 1\nvars 2\ncard 2 3\nfactor 1 0\ntable 1 1\nfactor 2 0 1\nsym { 0 1 }\ntable 1 1 1 1 1 1\n";
        assert!(matches!(
            parse_model(text, Validation::Strict),
            Err(Error::Validation { factor: 1, .. })
        ));
        let text = "FGSYM 1\nvars 1\ncard 2\nfactor 1 4\ntable 1 1\n";
        assert!(matches!(
            parse_model(text, Validation::Strict),
            Err(Error::Validation { factor: 0, .. })
        ));
    }

    #[test]
    fn values_may_continue_on_next_lines() {
        let text =
            "FGSYM 1\nvars 3\ncard 2 2 2\nfactor 3 0 1 2 # comment\ntable 1 2 2 3\n  2 3 3 4\n";
        let m = parse_model(text, Validation::Strict).unwrap();
        assert_eq!(joint_oracle(&m.graph).unwrap(), 20.0);
    }

    #[test]
    fn uai_import() {
        let uai = "MARKOV\n3\n2 2 2\n2\n2 0 1\n1 2\n\n4\n1 2 3 4\n2\n0.5 1.5\n";
        let g = parse_uai(uai).unwrap();
        assert_eq!(g.factors().len(), 2);
        assert_eq!(joint_oracle(&g).unwrap(), 10.0 * 2.0);
        assert!(parse_uai("GRID\n").is_err());
        assert!(parse_uai("MARKOV\n2\n2\n").is_err());
    }
}
