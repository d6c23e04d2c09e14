//! JSON and CSV rendering. CSV is locale-independent (decimal point,
//! newline-delimited, header first); identical inputs produce byte-identical
//! output.

use nalgebra::DMatrix;
use serde_json::{json, Value};

use tcqdm::evolve::TimeSeries;
use tcqdm::fock::FockRealization;
use tcqdm::opalg::QuantumMatrix;
use tcqdm::qdm::{DiagonalizationResult, Mode};

pub fn symbolic_json(label: &str, m: &QuantumMatrix) -> String {
    let rows: Vec<Vec<String>> = (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.entry(i, j).to_string()).collect())
        .collect();
    pretty(&json!({
        "kind": label,
        "dim": m.dim(),
        "entries": rows,
    }))
}

pub fn scalar_matrix_json(label: &str, m: &DMatrix<f64>) -> String {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    pretty(&json!({
        "kind": label,
        "dim": m.nrows(),
        "entries": rows,
    }))
}

pub fn realization_json(label: &str, r: &FockRealization) -> String {
    let size = r.matrix().nrows();
    let rows: Vec<Vec<[f64; 2]>> = (0..size)
        .map(|i| (0..size).map(|j| crate::c64_pair(r.matrix()[(i, j)])).collect())
        .collect();
    pretty(&json!({
        "kind": label,
        "cutoff": r.cutoff(),
        "blockdim": r.blockdim(),
        "size": size,
        "truncation_loss": r.truncation_loss(),
        "matrix": rows,
    }))
}

pub fn realization_csv(r: &FockRealization) -> String {
    let mut out = String::from("row,col,re,im\n");
    let size = r.matrix().nrows();
    for i in 0..size {
        for j in 0..size {
            let c = r.matrix()[(i, j)];
            if c.re != 0.0 || c.im != 0.0 {
                out.push_str(&format!("{i},{j},{:.17e},{:.17e}\n", c.re, c.im));
            }
        }
    }
    out
}

pub fn series_csv(atoms: usize, series: &TimeSeries) -> String {
    let mut header = String::from("t");
    for k in 1..=atoms {
        header.push_str(&format!(",p_excited_{k}"));
    }
    header.push_str(",mean_photon,norm\n");
    let mut out = header;
    for (i, &t) in series.times.iter().enumerate() {
        out.push_str(&format!("{t:.12}"));
        for &p in &series.excited_populations[i] {
            out.push_str(&format!(",{p:.12}"));
        }
        out.push_str(&format!(
            ",{:.12},{:.12}\n",
            series.mean_photon[i], series.norm[i]
        ));
    }
    out
}

pub fn series_json(atoms: usize, series: &TimeSeries) -> String {
    let amplitudes: Vec<Vec<[f64; 2]>> = series
        .amplitudes
        .iter()
        .map(|amps| amps.iter().map(|&c| crate::c64_pair(c)).collect())
        .collect();
    pretty(&json!({
        "atoms": atoms,
        "times": series.times,
        "excited_populations": series.excited_populations,
        "mean_photon": series.mean_photon,
        "norm": series.norm,
        "amplitudes": amplitudes,
    }))
}

pub fn qdm_json(
    result: &DiagonalizationResult,
    u_realized: &FockRealization,
    residual: f64,
    cutoff: usize,
    mode: Mode,
) -> String {
    let dim = result.d.dim();
    let d_table: Vec<Vec<f64>> = (0..=cutoff as u64)
        .map(|n| (0..dim).map(|i| result.d.entry(i, i).diag().eval_real(n)).collect())
        .collect();
    let size = u_realized.matrix().nrows();
    let u: Vec<Vec<[f64; 2]>> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| crate::c64_pair(u_realized.matrix()[(i, j)]))
                .collect()
        })
        .collect();
    pretty(&json!({
        "j": result.j.to_string(),
        "mode": mode.to_string(),
        "cutoff": cutoff,
        "domain": result.domain.to_string(),
        "range": result.range.to_string(),
        "d_table": d_table,
        "u_realized": u,
        "reconstruction_residual": residual,
    }))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON rendering")
}
