//! Points files, cell lists and network sources.

use std::fs;
use std::path::Path;

use multistat_core::crn::builtins::builtin;
use multistat_core::crn::parse::{parse_network, NetworkFile};

use crate::CliError;

fn integers(line: &str) -> Result<Vec<i64>, String> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| format!("'{t}' is not an integer")))
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One integer vector per line, comma or space separated; '#' comments.
pub fn parse_points(text: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for (n, line) in content_lines(text) {
        let v = integers(line).map_err(|m| CliError::parse(format!("line {n}: {m}")))?;
        if let Some(first) = out.first() {
            if first.len() != v.len() {
                return Err(CliError::parse(format!("line {n}: expected {} coordinates", first.len())));
            }
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::parse("no points"));
    }
    Ok(out)
}

/// One cell per line as 0-based point indices.
pub fn parse_cells(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    content_lines(text)
        .map(|(n, line)| {
            integers(line)
                .and_then(|v| {
                    v.into_iter().map(|x| usize::try_from(x).map_err(|_| format!("negative index {x}"))).collect()
                })
                .map_err(|m| CliError::parse(format!("line {n}: {m}")))
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

/// A network from a file or a built-in name, with a label for the report.
pub fn load_network(path: Option<&Path>, name: Option<&str>) -> Result<(NetworkFile, String), CliError> {
    match (path, name) {
        (Some(_), Some(_)) => Err(CliError::parse("give either a network file or --builtin, not both")),
        (None, None) => Err(CliError::parse("a network file or --builtin is required")),
        (None, Some(n)) => Ok((builtin(n).map_err(CliError::parse)?, format!("builtin:{n}"))),
        (Some(p), None) => {
            let text = read_text(p)?;
            let file = parse_network(&text).map_err(|e| CliError::parse(format!("{}: {e}", p.display())))?;
            Ok((file, p.display().to_string()))
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::internal(format!("{}: {e}", path.display())))
}
