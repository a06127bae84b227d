//! CSV and JSON-lines writers for trajectories and analysis results.
//!
//! Numbers are written with 17 significant digits so that files round-trip
//! exactly. Every CSV starts with `# key=value` comment lines describing the
//! run that produced it.

use std::fmt::Display;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::analysis::{FieldSample, Nullcline};
use crate::navigation::{act, NavParams, NavTrajectory};
use crate::simulate::{FullTrajectory, ReducedTrajectory};

/// Formats a number with 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Ordered `key=value` metadata written as CSV comment lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Header(Vec<(String, String)>);

impl Header {
    pub fn new() -> Self {
        Header::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    /// Adds every leaf of `value`'s JSON form under `prefix`, with nested
    /// keys joined by dots and array indices in brackets.
    pub fn push_serialized<T: Serialize>(&mut self, prefix: &str, value: &T) -> &mut Self {
        let json = serde_json::to_value(value).expect("serializable config");
        flatten(prefix, &json, &mut self.0);
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.0
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.0 {
            writeln!(w, "# {k}={v}")?;
        }
        Ok(())
    }

    /// The header as a flat JSON object.
    pub fn to_json(&self) -> Value {
        Value::Object(
            self.0
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect(),
        )
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        Value::Number(n) => {
            let s = n.as_f64().map_or_else(|| n.to_string(), |f| {
                if n.is_f64() {
                    fmt_num(f)
                } else {
                    n.to_string()
                }
            });
            out.push((prefix.to_string(), s));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn write_row<W: Write>(w: &mut W, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    let cells: Vec<String> = values.into_iter().map(fmt_num).collect();
    writeln!(w, "{}", cells.join(","))
}

/// Columns `t,r,x_s,u_tilde`.
pub fn write_reduced_csv<W: Write>(w: &mut W, header: &Header, traj: &ReducedTrajectory) -> io::Result<()> {
    header.write_to(w)?;
    writeln!(w, "t,r,x_s,u_tilde")?;
    for (k, (s, u)) in traj.states.iter().zip(&traj.inputs).enumerate() {
        write_row(w, [traj.time(k), s.r, s.x_s, *u])?;
    }
    Ok(())
}

/// Columns `t,x_1..x_n,x_s,u_1..u_n`.
pub fn write_full_csv<W: Write>(w: &mut W, header: &Header, traj: &FullTrajectory) -> io::Result<()> {
    header.write_to(w)?;
    let n = traj.states.first().map_or(0, |s| s.dim());
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|i| format!("x_{i}")));
    cols.push("x_s".into());
    cols.extend((1..=n).map(|i| format!("u_{i}")));
    writeln!(w, "{}", cols.join(","))?;
    for (k, (s, u)) in traj.states.iter().zip(&traj.inputs).enumerate() {
        let row = std::iter::once(traj.time(k))
            .chain(s.x.iter().copied())
            .chain(std::iter::once(s.x_s))
            .chain(u.iter().copied());
        write_row(w, row)?;
    }
    Ok(())
}

/// Columns `t,z_x,z_y,zdot_x,zdot_y,u_x,u_y,u_s,act_x,act_y,zstar_x,zstar_y`.
pub fn write_nav_csv<W: Write>(w: &mut W, header: &Header, traj: &NavTrajectory, p: &NavParams) -> io::Result<()> {
    header.write_to(w)?;
    writeln!(w, "t,z_x,z_y,zdot_x,zdot_y,u_x,u_y,u_s,act_x,act_y,zstar_x,zstar_y")?;
    for (k, (s, zs)) in traj.states.iter().zip(&traj.inputs).enumerate() {
        let a = act(s.u, p.s);
        write_row(
            w,
            [
                traj.time(k),
                s.z[0],
                s.z[1],
                s.zdot[0],
                s.zdot[1],
                s.u[0],
                s.u[1],
                s.u_s,
                a[0],
                a[1],
                zs[0],
                zs[1],
            ],
        )?;
    }
    Ok(())
}

/// Columns `r,x_s`.
pub fn write_nullcline_csv<W: Write>(w: &mut W, header: &Header, nc: &Nullcline) -> io::Result<()> {
    header.write_to(w)?;
    writeln!(w, "# includes_axis={}", nc.includes_axis)?;
    writeln!(w, "r,x_s")?;
    for &(r, x_s) in &nc.points {
        write_row(w, [r, x_s])?;
    }
    Ok(())
}

/// Columns `r,x_s,dr,dx_s`.
pub fn write_field_csv<W: Write>(w: &mut W, header: &Header, field: &[FieldSample]) -> io::Result<()> {
    header.write_to(w)?;
    writeln!(w, "r,x_s,dr,dx_s")?;
    for f in field {
        write_row(w, [f.r, f.x_s, f.dr, f.dx_s])?;
    }
    Ok(())
}

/// One compact JSON record per line.
pub fn write_jsonl<W: Write, T: Serialize>(w: &mut W, records: impl IntoIterator<Item = T>) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, &r)?;
        writeln!(w)?;
    }
    Ok(())
}

/// `key = value` lines, one per entry.
pub fn write_report<W: Write>(w: &mut W, entries: &[(String, String)]) -> io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "{k} = {v}")?;
    }
    Ok(())
}
