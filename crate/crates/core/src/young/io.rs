//! Line-oriented text serialization of measure-valued fields.
//!
//! One record per atom and per sphere atom:
//! `cell kind weight lambda1 lp_x lp_y conc_mass`, with `kind` either
//! `atom` or `sphere` (for spheres the three value columns hold
//! `beta1 bp_x bp_y`). Floats use 17 significant digits, so a write/parse
//! round trip is bit-exact.

use crate::algebra::Vec2;
use crate::error::{Error, Result};
use crate::grid::TorusGrid;

use super::{Atom, Exponents, SphereAtom, YoungMeasureCell, YoungMeasureField};

/// Conventional file name for the field at time `t`.
pub fn ym_filename(t: f64) -> String {
    format!("ym_{t:.6}.txt")
}

pub fn write_field(field: &YoungMeasureField) -> String {
    let [nx, ny] = field.grid.shape();
    let mut out = String::new();
    out.push_str(&format!(
        "# young-measure t={:.17e} p={:.17e} q={:.17e} dim={} nx={} ny={}\n",
        field.t,
        field.exponents.p,
        field.exponents.q,
        field.grid.dim(),
        nx,
        ny
    ));
    out.push_str("# cell kind weight lambda1 lp_x lp_y conc_mass\n");
    for (idx, cell) in field.cells.iter().enumerate() {
        for atom in &cell.atoms {
            out.push_str(&format!(
                "{idx} atom {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n",
                atom.weight, atom.lambda1, atom.lambda_prime.x, atom.lambda_prime.y, cell.conc_mass
            ));
        }
        for s in &cell.sphere_atoms {
            out.push_str(&format!(
                "{idx} sphere {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n",
                s.weight, s.beta1, s.beta_prime.x, s.beta_prime.y, cell.conc_mass
            ));
        }
    }
    out
}

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::Format(format!("bad {what}: {token}")))
}

fn parse_usize(token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| Error::Format(format!("bad {what}: {token}")))
}

struct Header {
    t: f64,
    exponents: Exponents,
    grid: TorusGrid,
}

fn parse_header(line: &str) -> Result<Header> {
    let rest = line
        .strip_prefix("# young-measure")
        .ok_or_else(|| Error::Format("missing young-measure header".into()))?;
    let (mut t, mut p, mut q) = (None, None, None);
    let (mut dim, mut nx, mut ny) = (None, None, None);
    for token in rest.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad header token: {token}")))?;
        match key {
            "t" => t = Some(parse_f64(value, "header t")?),
            "p" => p = Some(parse_f64(value, "header p")?),
            "q" => q = Some(parse_f64(value, "header q")?),
            "dim" => dim = Some(parse_usize(value, "header dim")?),
            "nx" => nx = Some(parse_usize(value, "header nx")?),
            "ny" => ny = Some(parse_usize(value, "header ny")?),
            _ => return Err(Error::Format(format!("unknown header key: {key}"))),
        }
    }
    let missing = || Error::Format("incomplete young-measure header".into());
    let t = t.ok_or_else(missing)?;
    let p = p.ok_or_else(missing)?;
    let q = q.ok_or_else(missing)?;
    let dim = dim.ok_or_else(missing)?;
    let nx = nx.ok_or_else(missing)?;
    let ny = ny.ok_or_else(missing)?;
    let grid = match dim {
        1 => {
            if ny != 1 {
                return Err(Error::Format(format!("dim=1 with ny={ny}")));
            }
            TorusGrid::line(nx)?
        }
        2 => TorusGrid::square(nx, ny)?,
        _ => return Err(Error::Format(format!("unsupported dim {dim}"))),
    };
    Ok(Header { t, exponents: Exponents { p, q }, grid })
}

pub fn parse_field(text: &str) -> Result<YoungMeasureField> {
    let mut lines = text.lines();
    let header_line = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Format("empty young-measure file".into()))?;
    let header = parse_header(header_line.trim())?;

    struct Builder {
        atoms: Vec<Atom>,
        conc_mass: f64,
        sphere_atoms: Vec<SphereAtom>,
    }
    let mut builders: Vec<Option<Builder>> = (0..header.grid.len()).map(|_| None).collect();

    for raw in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 7 {
            return Err(Error::Format(format!("expected 7 columns, got {}", cols.len())));
        }
        let idx = parse_usize(cols[0], "cell index")?;
        if idx >= header.grid.len() {
            return Err(Error::Format(format!("cell index {idx} out of range")));
        }
        let weight = parse_f64(cols[2], "weight")?;
        let v1 = parse_f64(cols[3], "first component")?;
        let vx = parse_f64(cols[4], "x component")?;
        let vy = parse_f64(cols[5], "y component")?;
        let conc = parse_f64(cols[6], "concentration mass")?;
        let builder = builders[idx].get_or_insert_with(|| Builder {
            atoms: Vec::new(),
            conc_mass: conc,
            sphere_atoms: Vec::new(),
        });
        builder.conc_mass = conc;
        match cols[1] {
            "atom" => builder.atoms.push(Atom {
                weight,
                lambda1: v1,
                lambda_prime: Vec2::new(vx, vy),
            }),
            "sphere" => builder.sphere_atoms.push(SphereAtom {
                weight,
                beta1: v1,
                beta_prime: Vec2::new(vx, vy),
            }),
            other => return Err(Error::Format(format!("unknown record kind: {other}"))),
        }
    }

    let mut cells = Vec::with_capacity(header.grid.len());
    for (idx, builder) in builders.into_iter().enumerate() {
        let b = builder.ok_or_else(|| Error::Format(format!("cell {idx} has no records")))?;
        cells.push(YoungMeasureCell {
            atoms: b.atoms,
            conc_mass: b.conc_mass,
            sphere_atoms: b.sphere_atoms,
        });
    }
    let field = YoungMeasureField {
        grid: header.grid,
        t: header.t,
        exponents: header.exponents,
        cells,
    };
    field.validate()?;
    Ok(field)
}
