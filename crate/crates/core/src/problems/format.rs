//! Plain-text instance files.
//!
//! ```text
//! problem n size seed [extra]
//! ```
//!
//! followed by one line of `n` integers per knapsack item, or `n` blocks of
//! `size` lines with `size` integers each for the TSP. Knapsack files may
//! carry the capacity as `extra` (default `size / 2`); catalog files carry
//! the orientation there and list one alternative per line.

use std::fmt::Write as _;

use crate::error::SolverError;
use crate::models::{CostVector, Orientation};

use super::{CatalogInstance, Instance, KnapsackInstance, ProblemKind, TspInstance};

pub(super) fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let kind = inst.kind();
    let _ = write!(out, "{kind} {} {} {}", inst.n(), inst.size(), inst.seed());
    match inst {
        Instance::Knapsack(k) => {
            if k.capacity != k.size() / 2 {
                let _ = write!(out, " {}", k.capacity);
            }
            out.push('\n');
            for item in &k.items {
                push_row(&mut out, item.iter());
            }
        }
        Instance::Tsp(t) => {
            out.push('\n');
            for layer in &t.layers {
                for row in layer {
                    push_row(&mut out, row.iter());
                }
            }
        }
        Instance::Catalog(c) => {
            let o = match c.orientation {
                Orientation::Minimize => "minimize",
                Orientation::Maximize => "maximize",
            };
            let _ = writeln!(out, " {o}");
            for a in &c.alternatives {
                push_row(&mut out, a.values().iter());
            }
        }
    }
    out
}

fn push_row<T: std::fmt::Display>(out: &mut String, row: impl Iterator<Item = T>) {
    let cells: Vec<String> = row.map(|v| v.to_string()).collect();
    out.push_str(&cells.join(" "));
    out.push('\n');
}

fn err(line: usize, message: impl Into<String>) -> SolverError {
    SolverError::Parse {
        line,
        message: message.into(),
    }
}

pub(super) fn parse_instance(text: &str) -> Result<Instance, SolverError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if !(4..=5).contains(&tokens.len()) {
        return Err(err(hline, "header must be `problem n size seed`"));
    }
    let kind: ProblemKind = tokens[0]
        .parse()
        .map_err(|_| err(hline, format!("unknown problem {:?}", tokens[0])))?;
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| err(hline, format!("invalid {what} {s:?}")))
    };
    let n = num(tokens[1], "n")?;
    let size = num(tokens[2], "size")?;
    let seed = tokens[3]
        .parse::<u64>()
        .map_err(|_| err(hline, format!("invalid seed {:?}", tokens[3])))?;
    let extra = tokens.get(4).copied();

    let mut next_row = |width: usize| -> Result<(usize, Vec<&str>), SolverError> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| err(0, "unexpected end of file"))?;
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != width {
            return Err(err(
                no,
                format!("expected {width} values, found {}", cells.len()),
            ));
        }
        Ok((no, cells))
    };
    let ints = |no: usize, cells: &[&str]| -> Result<Vec<i64>, SolverError> {
        cells
            .iter()
            .map(|c| {
                c.parse::<i64>()
                    .map_err(|_| err(no, format!("not an integer: {c:?}")))
            })
            .collect()
    };

    let inst = match kind {
        ProblemKind::Knapsack => {
            let capacity = match extra {
                Some(c) => num(c, "capacity")?,
                None => size / 2,
            };
            let mut items = Vec::with_capacity(size);
            for _ in 0..size {
                let (no, cells) = next_row(n)?;
                items.push(ints(no, &cells)?);
            }
            Instance::Knapsack(KnapsackInstance::new(items, capacity, seed)?)
        }
        ProblemKind::Tsp => {
            if extra.is_some() {
                return Err(err(hline, "unexpected fifth header field"));
            }
            let mut layers = Vec::with_capacity(n);
            for _ in 0..n {
                let mut layer = Vec::with_capacity(size);
                for _ in 0..size {
                    let (no, cells) = next_row(size)?;
                    layer.push(ints(no, &cells)?);
                }
                layers.push(layer);
            }
            Instance::Tsp(TspInstance::new(layers, seed)?)
        }
        ProblemKind::Catalog => {
            let orientation = match extra {
                None => Orientation::Minimize,
                Some(o) => o
                    .parse()
                    .map_err(|_| err(hline, format!("invalid orientation {o:?}")))?,
            };
            let mut alternatives = Vec::with_capacity(size);
            for _ in 0..size {
                let (no, cells) = next_row(n)?;
                let values = cells
                    .iter()
                    .map(|c| {
                        c.parse::<f64>()
                            .map_err(|_| err(no, format!("not a number: {c:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                alternatives.push(CostVector::new(values).map_err(|e| err(no, e.to_string()))?);
            }
            let mut c = CatalogInstance::new(alternatives, orientation)?;
            c.seed = seed;
            Instance::Catalog(c)
        }
    };
    if let Some((no, _)) = lines.next() {
        return Err(err(no, "trailing data after the instance"));
    }
    Ok(inst)
}
