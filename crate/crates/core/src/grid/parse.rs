use std::str::FromStr;

use super::{BranchSpec, Grid, GridBuilder, GridError, Loc};

/// Parse the line-oriented grid-file format:
///
/// ```text
/// # comment
/// BUS <id> <injection_MW> [voltage_kV]
/// BRANCH <from> <to> <x_pu> <rating_MW> [weight] [voltage_kV]
/// SLACK <id>
/// ```
///
/// Records may appear in any order. Errors carry the 1-based line number.
pub fn parse_grid(text: &str) -> Result<Grid, GridError> {
    let mut builder = GridBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let loc = Loc(Some(i + 1));
        let content = raw.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        let Some(tag) = fields.next() else {
            continue;
        };
        let fields: Vec<&str> = fields.collect();
        match tag {
            "BUS" => {
                arity(loc, tag, &fields, 2, 3)?;
                builder.push_bus(
                    loc,
                    field(loc, "bus id", fields[0])?,
                    field(loc, "injection", fields[1])?,
                    optional(loc, "voltage_kV", fields.get(2), 0.0)?,
                );
            }
            "BRANCH" => {
                arity(loc, tag, &fields, 4, 6)?;
                let spec = BranchSpec {
                    from: field(loc, "from bus", fields[0])?,
                    to: field(loc, "to bus", fields[1])?,
                    reactance: field(loc, "reactance", fields[2])?,
                    rating: field(loc, "rating", fields[3])?,
                    weight: optional(loc, "weight", fields.get(4), 1.0)?,
                    voltage_kv: optional(loc, "voltage_kV", fields.get(5), 0.0)?,
                };
                builder.push_branch(loc, spec);
            }
            "SLACK" => {
                arity(loc, tag, &fields, 1, 1)?;
                builder.push_slack(loc, field(loc, "slack id", fields[0])?);
            }
            other => return Err(GridError::UnknownTag(loc, other.to_string())),
        }
    }
    builder.build()
}

fn arity(loc: Loc, tag: &str, fields: &[&str], min: usize, max: usize) -> Result<(), GridError> {
    if (min..=max).contains(&fields.len()) {
        Ok(())
    } else if min == max {
        Err(GridError::Malformed(
            loc,
            format!("{tag} takes {min} field(s), found {}", fields.len()),
        ))
    } else {
        Err(GridError::Malformed(
            loc,
            format!("{tag} takes {min} to {max} fields, found {}", fields.len()),
        ))
    }
}

fn field<T: FromStr>(loc: Loc, name: &str, text: &str) -> Result<T, GridError> {
    text.parse()
        .map_err(|_| GridError::Malformed(loc, format!("invalid {name} `{text}`")))
}

fn optional(loc: Loc, name: &str, text: Option<&&str>, default: f64) -> Result<f64, GridError> {
    text.map_or(Ok(default), |t| field(loc, name, t))
}
