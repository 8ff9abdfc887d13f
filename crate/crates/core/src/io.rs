//! CSV formats: sample grids (`x,value`) and explicit schedules (`n,i,gamma`).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::schedule::ExplicitTable;
use crate::series::SampleGrid;

/// 17 significant digits, enough to round-trip any binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_grid<W: Write>(grid: &SampleGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "value"])?;
    for (x, v) in grid.points() {
        w.write_record([fmt_f64(x), fmt_f64(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(input: R) -> Result<SampleGrid> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, &["x", "value"])?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        xs.push(field(&rec, 0)?);
        values.push(field(&rec, 1)?);
    }
    let n = values.len();
    if n < 2 || !(n - 1).is_power_of_two() {
        return Err(Error::Malformed(format!("grid has {n} rows, expected 2^M + 1")));
    }
    let level = (n - 1).trailing_zeros();
    let grid = SampleGrid::new(level, values)?;
    if let Some(j) = (0..n).find(|&j| (xs[j] - grid.x(j)).abs() > 1e-15) {
        return Err(Error::Malformed(format!("row {j}: x={} is not the grid point {}", xs[j], grid.x(j))));
    }
    Ok(grid)
}

pub fn write_table<W: Write>(table: &ExplicitTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "i", "gamma"])?;
    for (n, i, g) in table.triples() {
        w.write_record([n.to_string(), i.to_string(), fmt_f64(g)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(input: R) -> Result<ExplicitTable> {
    let mut r = csv::Reader::from_reader(input);
    expect_header(&mut r, &["n", "i", "gamma"])?;
    let mut triples = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let n = rec.get(0).unwrap_or("").trim().parse::<u32>();
        let i = rec.get(1).unwrap_or("").trim().parse::<u64>();
        match (n, i) {
            (Ok(n), Ok(i)) => triples.push((n, i, field(&rec, 2)?)),
            _ => return Err(Error::Malformed(format!("bad index in row {:?}", rec))),
        }
    }
    ExplicitTable::from_triples(&triples)
}

fn expect_header<R: Read>(r: &mut csv::Reader<R>, want: &[&str]) -> Result<()> {
    let h = r.headers()?;
    if h.iter().map(str::trim).ne(want.iter().copied()) {
        return Err(Error::Malformed(format!("expected header {}, got {:?}", want.join(","), h)));
    }
    Ok(())
}

fn field(rec: &csv::StringRecord, k: usize) -> Result<f64> {
    let s = rec.get(k).ok_or_else(|| Error::Malformed(format!("missing column {k}")))?;
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Malformed(format!("bad number '{s}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::named_schedule;
    use crate::series::SchauderSeries;

    #[test]
    fn grid_csv() {
        let s = SchauderSeries::from_schedule(named_schedule("nonhoelder", &[]).unwrap(), 20).unwrap();
        let g = s.eval_grid(5).unwrap();
        let mut buf = Vec::new();
        write_grid(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n0.0000000000000000e0,"));
        assert_eq!(text.lines().count(), 34);
        assert_eq!(read_grid(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn table_csv() {
        let t = ExplicitTable::from_triples(&[(0, 0, 0.1), (1, 1, -1.0 / 3.0)]).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        assert_eq!(read_table(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_grid("x,value\n0,1\n0.5,2\n".as_bytes()).is_err());
        assert!(read_grid("x,y\n0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_grid("x,value\n0,1\n0,2\n".as_bytes()).is_err());
        assert!(read_table("n,i,gamma\n0,1,2\n".as_bytes()).is_err());
    }
}
