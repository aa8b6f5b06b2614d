//! Time-series assembly and its CSV round trip.

use crate::error::{Error, Result};
use crate::model::{Model, ModelParams};
use crate::state::StrongSolution;
use crate::young::YoungMeasureField;

use super::{
    admissibility_defect, comparison_solution, energy, momentum_series, relative_energy,
    WorkForm,
};

/// Scalar diagnostics per recorded time: energy, speed integral, the
/// closed-form comparison majorant (NaN when not applicable), the
/// admissibility defect, and optionally the relative energy against a
/// reference solution.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub momentum: Vec<f64>,
    pub comparison: Vec<f64>,
    pub defect: Vec<f64>,
    pub e_rel: Option<Vec<f64>>,
}

impl DiagnosticsSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial_energy(&self) -> f64 {
        self.energy[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() {
            return Err(Error::InvalidParameter("empty series".into()));
        }
        let n = self.times.len();
        for (name, len) in [
            ("energy", self.energy.len()),
            ("momentum", self.momentum.len()),
            ("comparison", self.comparison.len()),
            ("defect", self.defect.len()),
        ] {
            if len != n {
                return Err(Error::InvalidParameter(format!(
                    "{name} column has {len} rows, expected {n}"
                )));
            }
        }
        if let Some(e_rel) = &self.e_rel {
            if e_rel.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: e_rel.len() });
            }
            if e_rel.iter().any(|&v| !(v >= 0.0)) {
                return Err(Error::InvalidParameter("negative relative energy".into()));
            }
        }
        for pair in self.times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidParameter(format!(
                    "times not increasing: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &e in &self.energy {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!("energy {e}")));
            }
        }
        for &m in &self.momentum {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidParameter(format!("momentum {m}")));
            }
        }
        for &d in &self.defect {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidParameter(format!("defect {d}")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.e_rel.is_some() {
            "t,E,M,M_tilde,defect,E_rel\n"
        } else {
            "t,E,M,M_tilde,defect\n"
        });
        for k in 0..self.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.times[k], self.energy[k], self.momentum[k], self.comparison[k],
                self.defect[k]
            ));
            if let Some(e_rel) = &self.e_rel {
                out.push_str(&format!(",{:.17e}", e_rel[k]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<DiagnosticsSeries> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty csv".into()))?;
        let with_e_rel = match header.trim() {
            "t,E,M,M_tilde,defect" => false,
            "t,E,M,M_tilde,defect,E_rel" => true,
            other => return Err(Error::Format(format!("unexpected csv header: {other}"))),
        };
        let expected_cols = if with_e_rel { 6 } else { 5 };
        let mut series = DiagnosticsSeries {
            times: Vec::new(),
            energy: Vec::new(),
            momentum: Vec::new(),
            comparison: Vec::new(),
            defect: Vec::new(),
            e_rel: with_e_rel.then(Vec::new),
        };
        for line in lines {
            let cols: Vec<&str> = line.trim().split(',').collect();
            if cols.len() != expected_cols {
                return Err(Error::Format(format!(
                    "expected {expected_cols} columns, got {}",
                    cols.len()
                )));
            }
            let mut parsed = [0.0; 6];
            for (slot, col) in parsed.iter_mut().zip(&cols) {
                *slot = col
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad number: {col}")))?;
            }
            series.times.push(parsed[0]);
            series.energy.push(parsed[1]);
            series.momentum.push(parsed[2]);
            series.comparison.push(parsed[3]);
            series.defect.push(parsed[4]);
            if let Some(e_rel) = &mut series.e_rel {
                e_rel.push(parsed[5]);
            }
        }
        series.validate()?;
        Ok(series)
    }
}

/// Assembles the full diagnostics table for a snapshot sequence. The
/// comparison column is filled when the model is granular and the force
/// stays below the friction threshold, and is NaN otherwise; elapsed time
/// is measured from the first snapshot. `strong` adds the relative-energy
/// column.
pub fn build_series(
    fields: &[YoungMeasureField],
    params: &ModelParams,
    strong: Option<&StrongSolution>,
    form: WorkForm,
) -> Result<DiagnosticsSeries> {
    let defect = admissibility_defect(fields, params, form)?;
    let times: Vec<f64> = fields.iter().map(|f| f.t).collect();
    let mut energies = Vec::with_capacity(fields.len());
    for field in fields {
        energies.push(energy(field, params)?);
    }
    let momentum = momentum_series(fields);
    let e0 = energies[0];
    let f_inf = params.force.sup_norm();
    let depositing = params.model == Model::SavageHutter && f_inf < params.d;
    let mut comparison = Vec::with_capacity(fields.len());
    for &t in &times {
        comparison.push(if depositing {
            comparison_solution(t - times[0], e0, params.a, params.d, f_inf)?
        } else {
            f64::NAN
        });
    }
    let e_rel = match strong {
        Some(sol) => {
            let mut col = Vec::with_capacity(fields.len());
            for field in fields {
                col.push(relative_energy(field, sol, params)?);
            }
            Some(col)
        }
        None => None,
    };
    let series = DiagnosticsSeries {
        times,
        energy: energies,
        momentum,
        comparison,
        defect,
        e_rel,
    };
    series.validate()?;
    Ok(series)
}
