//! Instance, demand and resource file formats.
//!
//! Text instance layout (blank lines and `#` comments ignored):
//!
//! ```text
//! n m min|max
//! <n rows of m rationals>
//! QUAL            # optional: n rows of 0/1
//! <n rows>
//! FORBID          # optional: one `i j` pair per line, 0-based
//! 0 1
//! ```
//!
//! The JSON document mirrors the same fields; see [`InstanceDocument`].

use serde::{Deserialize, Serialize};

use crate::constraints::{Resource, SideConstraintSet};
use crate::error::{ModelError, ParseError};
use crate::instance::{AssignmentInstance, Sense};
use crate::rational::{format_rational, parse_rational, Rational, RationalValue};

/// Non-empty lines with comments stripped, tagged with their 1-based number.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((k + 1, tokens))
    })
}

fn parse_usize(token: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    token
        .parse()
        .map_err(|_| ParseError::new(line, format!("{what} must be a nonnegative integer, got {token:?}")))
}

fn parse_row(tokens: &[&str], line: usize, expected: usize) -> Result<Vec<Rational>, ParseError> {
    if tokens.len() != expected {
        return Err(ParseError::new(
            line,
            format!("ragged row: expected {expected} values, found {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| parse_rational(t).map_err(|e| ParseError::new(line, e)))
        .collect()
}

pub fn parse_instance_text(text: &str) -> Result<AssignmentInstance, ModelError> {
    let mut lines = content_lines(text).peekable();
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "missing header `n m sense`"))?;
    if header.len() != 3 {
        return Err(ParseError::new(header_line, "header must be `n m sense`").into());
    }
    let n = parse_usize(header[0], header_line, "n")?;
    let m = parse_usize(header[1], header_line, "m")?;
    let sense: Sense = header[2].parse().map_err(|e: String| ParseError::new(header_line, e))?;
    if n == 0 || m == 0 {
        return Err(ParseError::new(header_line, "dimensions must be positive").into());
    }

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, tokens) = lines
            .next()
            .ok_or_else(|| ParseError::new(header_line, format!("expected {n} weight rows")))?;
        rows.push(parse_row(&tokens, line, m)?);
    }
    let mut instance = AssignmentInstance::new(rows, sense)?;

    let mut seen_qual = false;
    let mut seen_forbid = false;
    while let Some((line, tokens)) = lines.next() {
        match tokens.as_slice() {
            ["QUAL"] if !seen_qual => {
                seen_qual = true;
                let mut mask = Vec::with_capacity(n);
                for _ in 0..n {
                    let (row_line, row) = lines
                        .next()
                        .ok_or_else(|| ParseError::new(line, format!("QUAL needs {n} rows")))?;
                    if row.len() != m {
                        return Err(ParseError::new(
                            row_line,
                            format!("ragged row: expected {m} values, found {}", row.len()),
                        )
                        .into());
                    }
                    let bits = row
                        .iter()
                        .map(|t| match *t {
                            "0" => Ok(false),
                            "1" => Ok(true),
                            other => Err(ParseError::new(
                                row_line,
                                format!("QUAL entry must be 0 or 1, got {other:?}"),
                            )),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    mask.push(bits);
                }
                instance = instance.with_qualification(mask)?;
            }
            ["FORBID"] if !seen_forbid => {
                seen_forbid = true;
                let mut pairs = Vec::new();
                while let Some((_, next)) = lines.peek() {
                    if matches!(next.as_slice(), ["QUAL"] | ["FORBID"]) {
                        break;
                    }
                    let (pair_line, pair) = lines.next().expect("peeked");
                    if pair.len() != 2 {
                        return Err(ParseError::new(pair_line, "FORBID entries are `i j` pairs").into());
                    }
                    let i = parse_usize(pair[0], pair_line, "agent index")?;
                    let j = parse_usize(pair[1], pair_line, "task index")?;
                    if i >= n || j >= m {
                        return Err(ParseError::new(pair_line, format!("pair ({i}, {j}) outside {n}x{m}")).into());
                    }
                    pairs.push((i, j));
                }
                instance = instance.with_forbidden(pairs)?;
            }
            ["QUAL"] | ["FORBID"] => return Err(ParseError::new(line, format!("duplicate {} block", tokens[0])).into()),
            _ => return Err(ParseError::new(line, format!("unexpected content {:?}", tokens.join(" "))).into()),
        }
    }
    Ok(instance)
}

pub fn emit_instance_text(instance: &AssignmentInstance) -> String {
    let mut out = format!("{} {} {}\n", instance.n_agents(), instance.n_tasks(), instance.sense());
    for i in 0..instance.n_agents() {
        let row: Vec<String> = instance.row(i).iter().map(format_rational).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    if let Some(mask) = instance.qualification() {
        out.push_str("QUAL\n");
        for row in mask.chunks(instance.n_tasks()) {
            let row: Vec<&str> = row.iter().map(|&q| if q { "1" } else { "0" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    if instance.has_forbidden() {
        out.push_str("FORBID\n");
        for (i, j) in instance.forbidden_pairs() {
            out.push_str(&format!("{i} {j}\n"));
        }
    }
    out
}

/// Structured form of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub n_agents: usize,
    pub n_tasks: usize,
    pub sense: Sense,
    pub weights: Vec<Vec<RationalValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualification: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forbidden: Vec<[usize; 2]>,
}

impl InstanceDocument {
    pub fn from_instance(instance: &AssignmentInstance) -> Self {
        Self {
            n_agents: instance.n_agents(),
            n_tasks: instance.n_tasks(),
            sense: instance.sense(),
            weights: (0..instance.n_agents())
                .map(|i| instance.row(i).iter().copied().map(RationalValue).collect())
                .collect(),
            qualification: instance.qualification().map(|q| {
                q.chunks(instance.n_tasks())
                    .map(|row| row.iter().map(|&b| u8::from(b)).collect())
                    .collect()
            }),
            forbidden: instance.forbidden_pairs().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn into_instance(self) -> Result<AssignmentInstance, ModelError> {
        if self.weights.len() != self.n_agents {
            return Err(ModelError::DimensionMismatch(format!(
                "n_agents is {} but {} weight rows given",
                self.n_agents,
                self.weights.len()
            )));
        }
        if let Some((row, values)) = self.weights.iter().enumerate().find(|(_, r)| r.len() != self.n_tasks) {
            return Err(ModelError::RaggedRow {
                row,
                found: values.len(),
                expected: self.n_tasks,
            });
        }
        let rows = self
            .weights
            .into_iter()
            .map(|row| row.into_iter().map(Rational::from).collect())
            .collect();
        let mut instance = AssignmentInstance::new(rows, self.sense)?;
        if let Some(mask) = self.qualification {
            let mask = mask
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|b| match b {
                            0 => Ok(false),
                            1 => Ok(true),
                            other => Err(ModelError::InvalidValue(format!("qualification entry {other}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            instance = instance.with_qualification(mask)?;
        }
        instance.with_forbidden(self.forbidden.into_iter().map(|[i, j]| (i, j)))
    }
}

pub fn parse_instance_json(text: &str) -> Result<AssignmentInstance, ModelError> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    doc.into_instance()
}

pub fn emit_instance_json(instance: &AssignmentInstance) -> String {
    serde_json::to_string_pretty(&InstanceDocument::from_instance(instance)).expect("instance document serializes")
}

/// Whitespace-separated positive integers, one per task category.
pub fn parse_demand_text(text: &str) -> Result<Vec<usize>, ModelError> {
    let mut demand = Vec::new();
    for (line, tokens) in content_lines(text) {
        for token in tokens {
            let d = parse_usize(token, line, "demand")?;
            if d == 0 {
                return Err(ParseError::new(line, "demand must be positive").into());
            }
            demand.push(d);
        }
    }
    if demand.is_empty() {
        return Err(ParseError::new(1, "empty demand file").into());
    }
    Ok(demand)
}

/// `RESOURCE <budget>` blocks, each followed by `n` rows of `m` usages.
pub fn parse_resources_text(text: &str, n: usize, m: usize) -> Result<SideConstraintSet, ModelError> {
    let mut lines = content_lines(text);
    let mut resources = Vec::new();
    while let Some((line, tokens)) = lines.next() {
        let budget = match tokens.as_slice() {
            ["RESOURCE", budget] => parse_rational(budget).map_err(|e| ParseError::new(line, e))?,
            _ => return Err(ParseError::new(line, "expected `RESOURCE <budget>`").into()),
        };
        let mut usage = Vec::with_capacity(n);
        for _ in 0..n {
            let (row_line, row) = lines
                .next()
                .ok_or_else(|| ParseError::new(line, format!("resource needs {n} rows")))?;
            usage.push(parse_row(&row, row_line, m)?);
        }
        resources.push(Resource::new(usage, budget).map_err(|e| ParseError::new(line, e.to_string()))?);
    }
    Ok(SideConstraintSet::new(resources))
}

pub fn emit_resources_text(constraints: &SideConstraintSet) -> String {
    let mut out = String::new();
    for r in &constraints.resources {
        out.push_str(&format!("RESOURCE {}\n", format_rational(&r.budget())));
        for i in 0..r.n_agents() {
            let row: Vec<String> = (0..r.n_tasks()).map(|j| format_rational(&r.usage(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_basic_file() {
        let inst = parse_instance_text("2 2 min\n1 2\n4 3\n").unwrap();
        assert_eq!(inst.row(0), &[int(1), int(2)]);
        assert_eq!(inst.row(1), &[int(4), int(3)]);
        assert_eq!(inst.sense(), Sense::MinimizeCost);
    }

    #[test]
    fn parses_blocks_and_comments() {
        let text = "# example\n2 3 max\n1 1/2 0.25\n4 5 6\n\nQUAL\n1 0 1\n0 1 1\nFORBID\n0 1\n1 2\n";
        let inst = parse_instance_text(text).unwrap();
        assert_eq!(inst.weight(0, 1), ratio(1, 2));
        assert_eq!(inst.weight(0, 2), ratio(1, 4));
        assert!(!inst.is_qualified(0, 1));
        assert!(inst.is_forbidden(0, 1));
        assert!(inst.is_forbidden(1, 2));
        assert!(!inst.is_forbidden(0, 0));
    }

    #[test]
    fn ragged_row_names_its_line() {
        let err = parse_instance_text("2 2 min\n1 2\n4\n").unwrap_err();
        assert_eq!(
            err,
            ModelError::Parse(ParseError::new(3, "ragged row: expected 2 values, found 1"))
        );
    }

    #[test]
    fn strictness() {
        assert!(parse_instance_text("2 2 sideways\n1 2\n4 3\n").is_err());
        assert!(parse_instance_text("2 2 min\n1 x\n4 3\n").is_err());
        assert!(parse_instance_text("2 2 min\n1 2\n4 3\nEXTRA\n").is_err());
        assert!(parse_instance_text("2 2 min\n1 2\n4 3\nFORBID\n0 5\n").is_err());
        assert!(parse_instance_text("2 2 min\n1 2\n4 3\nFORBID\nFORBID\n").is_err());
        assert!(parse_instance_text("").is_err());
    }

    #[test]
    fn text_and_json_round_trip() {
        let inst = parse_instance_text("2 3 max\n1 -1/2 0.25\n4 5 6\nQUAL\n1 0 1\n0 1 1\nFORBID\n1 2\n").unwrap();
        assert_eq!(parse_instance_text(&emit_instance_text(&inst)).unwrap(), inst);
        assert_eq!(parse_instance_json(&emit_instance_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let text = r#"{"n_agents":1,"n_tasks":1,"sense":"min","weights":[[1]],"extra":1}"#;
        assert!(parse_instance_json(text).is_err());
    }

    #[test]
    fn demand_and_resources() {
        assert_eq!(parse_demand_text("2 1\n").unwrap(), vec![2, 1]);
        assert!(parse_demand_text("2 0").is_err());
        let set = parse_resources_text("RESOURCE 1\n1 0\n0 1\nRESOURCE 5/2\n1 1\n1 1\n", 2, 2).unwrap();
        assert_eq!(set.resources.len(), 2);
        assert_eq!(set.resources[1].budget(), ratio(5, 2));
        assert_eq!(parse_resources_text(&emit_resources_text(&set), 2, 2).unwrap(), set);
        assert!(parse_resources_text("RESOURCE 1\n1 0\n", 2, 2).is_err());
    }
}
