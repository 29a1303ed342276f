//! Versioned text formats for Lagrangian instances (`.lag`) and GM data (`.gm`).
//!
//! ```text
//! epw-lag 1
//! field prime:7
//! provenance seed:0
//! lagrangian true
//! ndv unknown
//! basis 10 20
//! <10 lines of 20 elements>
//! ```
//!
//! A `.gm` file is a `.lag` body followed by the hyperplane, the reference
//! vector, the basis of `W` and the six Gram matrices. Reading recomputes the GM
//! data and rejects files whose stored matrices disagree.

use std::fmt::Write as _;

use crate::error::{bail, Error, Result};
use crate::field::{Field, FieldSpec};
use crate::gm::{build_gm, GmInstance};
use crate::lagrangian::{validate_lagrangian, LagrangianInstance, NdvStatus, Provenance};
use crate::linalg::{Matrix, Subspace};

pub const LAG_HEADER: &str = "epw-lag 1";
pub const GM_HEADER: &str = "epw-gm 1";
/// Chart of the quadric family recorded in `.gm` files.
pub const GM_CHART: &str = "v0+u";

fn write_row<F: Field>(out: &mut String, f: &F, row: &[F::Elem]) {
    let cells: Vec<String> = row.iter().map(|x| f.format(x)).collect();
    out.push_str(&cells.join(" "));
    out.push('\n');
}

fn write_matrix<F: Field>(out: &mut String, name: &str, m: &Matrix<F>) {
    let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
    for r in 0..m.rows() {
        write_row(out, m.field(), m.row(r));
    }
}

pub fn write_lag<F: Field>(inst: &LagrangianInstance<F>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{LAG_HEADER}");
    write_lag_body(&mut out, inst);
    out
}

fn write_lag_body<F: Field>(out: &mut String, inst: &LagrangianInstance<F>) {
    let _ = writeln!(out, "field {}", inst.field.spec());
    let _ = writeln!(out, "provenance {}", inst.provenance);
    let _ = writeln!(out, "lagrangian {}", inst.is_lagrangian);
    let _ = writeln!(out, "ndv {}", inst.ndv);
    write_matrix(out, "basis", inst.a.basis());
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str) -> Self {
        Lines {
            it: s.lines().enumerate(),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, l) in self.it.by_ref() {
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok((i + 1, l));
            }
        }
        bail!(Parse, "unexpected end of file");
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let (n, l) = self.next()?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ if l == key => Ok(""),
            _ => bail!(Parse, "line {n}: expected '{key}', found '{l}'"),
        }
    }

    fn row<F: Field>(&mut self, f: &F, len: usize) -> Result<Vec<F::Elem>> {
        let (n, l) = self.next()?;
        let cells: Vec<&str> = l.split_whitespace().collect();
        if cells.len() != len {
            bail!(Parse, "line {n}: {} entries, expected {len}", cells.len());
        }
        cells
            .iter()
            .map(|c| f.parse(c).map_err(|e| Error::Parse(format!("line {n}: {e}"))))
            .collect()
    }

    fn matrix<F: Field>(&mut self, f: &F, key: &str) -> Result<Matrix<F>> {
        let dims = self.keyed(key)?;
        let (r, c) = parse_dims(dims)?;
        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            rows.push(self.row(f, c)?);
        }
        if r == 0 {
            return Ok(Matrix::zeros(f, 0, c));
        }
        Matrix::from_rows(f, c, rows)
    }
}

fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let [r, c] = parts[..] else {
        bail!(Parse, "expected two dimensions, found '{s}'");
    };
    let p = |x: &str| {
        x.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad dimension '{x}'")))
    };
    Ok((p(r)?, p(c)?))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bail!(Parse, "expected true or false, found '{s}'"),
    }
}

/// Field spec recorded in a `.lag` or `.gm` file, without parsing the rest.
pub fn peek_field(s: &str) -> Result<FieldSpec> {
    let mut lines = Lines::new(s);
    let (_, header) = lines.next()?;
    if header != LAG_HEADER && header != GM_HEADER {
        bail!(Parse, "unknown header '{header}'");
    }
    lines.keyed("field")?.parse()
}

fn read_lag_body<F: Field>(lines: &mut Lines<'_>, f: &F) -> Result<LagrangianInstance<F>> {
    let spec: FieldSpec = lines.keyed("field")?.parse()?;
    if spec != f.spec() {
        bail!(Parse, "file is over {spec}, expected {}", f.spec());
    }
    let provenance = Provenance::parse(lines.keyed("provenance")?);
    let flagged = parse_bool(lines.keyed("lagrangian")?)?;
    let ndv: NdvStatus = lines.keyed("ndv")?.parse()?;
    let basis = lines.matrix(f, "basis")?;
    if basis.rows() != 10 || basis.cols() != 20 {
        bail!(Parse, "basis is {}x{}, expected 10x20", basis.rows(), basis.cols());
    }
    let a = Subspace::from_matrix(&basis);
    if a.basis() != &basis {
        bail!(Parse, "basis is not in reduced row echelon form");
    }
    let is_lagrangian = validate_lagrangian(&a)?;
    if flagged != is_lagrangian {
        bail!(
            Integrity,
            "file says lagrangian = {flagged}, check gives {is_lagrangian}"
        );
    }
    Ok(LagrangianInstance {
        field: f.clone(),
        a,
        is_lagrangian,
        ndv,
        provenance,
    })
}

pub fn read_lag<F: Field>(s: &str, f: &F) -> Result<LagrangianInstance<F>> {
    let mut lines = Lines::new(s);
    let (_, header) = lines.next()?;
    if header != LAG_HEADER {
        bail!(Parse, "unsupported instance format '{header}', expected '{LAG_HEADER}'");
    }
    read_lag_body(&mut lines, f)
}

pub fn write_gm<F: Field>(gm: &GmInstance<F>) -> String {
    let f = gm.field();
    let mut out = String::new();
    let _ = writeln!(out, "{GM_HEADER}");
    write_lag_body(&mut out, &gm.lagrangian);
    out.push_str("v5 ");
    write_row(&mut out, f, &gm.phi);
    out.push_str("v0 ");
    write_row(&mut out, f, &gm.v0());
    let _ = writeln!(out, "chart {GM_CHART}");
    let _ = writeln!(out, "ell {}", gm.ell);
    write_matrix(&mut out, "w", gm.w.basis());
    write_matrix(&mut out, "q0", gm.q0.gram());
    for (i, q) in gm.plucker.iter().enumerate() {
        write_matrix(&mut out, &format!("p{i}"), q.gram());
    }
    out
}

fn keyed_row<F: Field>(lines: &mut Lines<'_>, f: &F, key: &str) -> Result<Vec<F::Elem>> {
    let v = lines.keyed(key)?;
    v.split_whitespace()
        .map(|c| f.parse(c).map_err(|e| Error::Parse(format!("{key}: {e}"))))
        .collect()
}

pub fn read_gm<F: Field>(s: &str, f: &F) -> Result<GmInstance<F>> {
    let mut lines = Lines::new(s);
    let (_, header) = lines.next()?;
    if header != GM_HEADER {
        bail!(Parse, "unsupported GM format '{header}', expected '{GM_HEADER}'");
    }
    let inst = read_lag_body(&mut lines, f)?;
    let phi = keyed_row(&mut lines, f, "v5")?;
    let v0 = keyed_row(&mut lines, f, "v0")?;
    let chart = lines.keyed("chart")?;
    if chart != GM_CHART {
        bail!(Parse, "unknown chart '{chart}'");
    }
    let ell: usize = lines
        .keyed("ell")?
        .parse()
        .map_err(|_| Error::Parse("bad ell".into()))?;
    let w = lines.matrix(f, "w")?;
    let q0 = lines.matrix(f, "q0")?;
    let mut pl = Vec::with_capacity(5);
    for i in 0..5 {
        pl.push(lines.matrix(f, &format!("p{i}"))?);
    }
    let gm = build_gm(&inst, &phi)?;
    let same = gm.v0() == v0
        && gm.ell == ell
        && gm.w.basis() == &w
        && gm.q0.gram() == &q0
        && gm.plucker.iter().zip(&pl).all(|(a, b)| a.gram() == b);
    if !same {
        bail!(
            Integrity,
            "stored GM data differ from the data recomputed from A and V5"
        );
    }
    Ok(gm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::lagrangian::random_instance;

    #[test]
    fn lag_round_trip() {
        let f = PrimeField::new(7).unwrap();
        let inst = random_instance(0, &f);
        let s = write_lag(&inst);
        assert!(s.starts_with("epw-lag 1\nfield prime:7\nprovenance seed:0\n"));
        let back = read_lag(&s, &f).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_lag(&back), s);
        assert_eq!(peek_field(&s).unwrap(), FieldSpec::Prime(7));
    }

    #[test]
    fn rejects_bad_files() {
        let f = PrimeField::new(7).unwrap();
        let s = write_lag(&random_instance(1, &f));
        assert!(read_lag(&s.replace("epw-lag 1", "epw-lag 2"), &f).is_err());
        assert!(read_lag(&s, &PrimeField::new(11).unwrap()).is_err());
        assert!(read_lag(&s.replace("lagrangian true", "lagrangian false"), &f).is_err());
        let truncated: String = s.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(read_lag(&truncated, &f).is_err());
    }

    #[test]
    fn gm_round_trip() {
        let f = PrimeField::new(5).unwrap();
        let inst = random_instance(2, &f);
        let gm = build_gm(&inst, &[0, 0, 0, 0, 0, 1]).unwrap();
        let s = write_gm(&gm);
        let back = read_gm(&s, &f).unwrap();
        assert_eq!(write_gm(&back), s);
        let tampered = s.replacen(&format!("ell {}", gm.ell), &format!("ell {}", gm.ell + 1), 1);
        assert!(read_gm(&tampered, &f).is_err());
    }
}
