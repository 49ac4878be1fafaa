//! JSON and CSV interchange formats.
//!
//! Signals travel as `{"dims", "resolution", "values"}`, coefficient
//! sets as `{"dims", "resolution", "mean", "entries": [...]}` with zero
//! entries omitted and a fixed entry order, so equal data serializes to
//! equal bytes. Rectangle lists, decomposition dumps, report envelopes,
//! and the envelope CSV schema live here too.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::HashSet;
use std::path::Path;

use crate::atoms::AtomicDecomposition;
use crate::dyadic::{DyadicInterval, DyadicRectangle, Grid1D, Grid2D};
use crate::error::{Error, Result};
use crate::haar::{interval_from_offset, HaarCoeffs1D, HaarCoeffs2D};
use crate::signal::{Signal1D, Signal2D};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SignalWire {
    dims: u8,
    resolution: Vec<u32>,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum AnySignal {
    One(Signal1D),
    Two(Signal2D),
}

fn ensure_finite(values: &[f64]) -> Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    Ok(())
}

pub fn signal_1d_json(f: &Signal1D) -> Result<String> {
    ensure_finite(f.values())?;
    let wire = SignalWire {
        dims: 1,
        resolution: vec![f.grid().resolution()],
        values: f.values().to_vec(),
    };
    Ok(serde_json::to_string(&wire)?)
}

pub fn signal_2d_json(f: &Signal2D) -> Result<String> {
    ensure_finite(f.values())?;
    let wire = SignalWire {
        dims: 2,
        resolution: vec![f.grid().n1(), f.grid().n2()],
        values: f.values().to_vec(),
    };
    Ok(serde_json::to_string(&wire)?)
}

pub fn parse_signal(text: &str) -> Result<AnySignal> {
    let wire: SignalWire = serde_json::from_str(text)?;
    ensure_finite(&wire.values)?;
    match (wire.dims, wire.resolution.as_slice()) {
        (1, [n]) => Ok(AnySignal::One(Signal1D::new(
            Grid1D::new(*n)?,
            wire.values,
        )?)),
        (2, [n1, n2]) => Ok(AnySignal::Two(Signal2D::new(
            Grid2D::new(*n1, *n2)?,
            wire.values,
        )?)),
        (d, res) => Err(Error::Malformed(format!(
            "dims {d} does not match a resolution list of length {}",
            res.len()
        ))),
    }
}

pub fn parse_signal_1d(text: &str) -> Result<Signal1D> {
    match parse_signal(text)? {
        AnySignal::One(f) => Ok(f),
        AnySignal::Two(_) => Err(Error::DimensionMismatch(
            "expected a one-dimensional signal".into(),
        )),
    }
}

pub fn parse_signal_2d(text: &str) -> Result<Signal2D> {
    match parse_signal(text)? {
        AnySignal::Two(f) => Ok(f),
        AnySignal::One(_) => Err(Error::DimensionMismatch(
            "expected a two-dimensional signal".into(),
        )),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EntryWire {
    lx: u32,
    kx: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ly: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ky: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    block: Option<String>,
    value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CoeffsWire {
    dims: u8,
    resolution: Vec<u32>,
    #[serde(alias = "mm")]
    mean: f64,
    entries: Vec<EntryWire>,
}

#[derive(Debug, Clone)]
pub enum AnyCoeffs {
    One(HaarCoeffs1D),
    Two(HaarCoeffs2D),
}

pub fn coeffs_1d_json(c: &HaarCoeffs1D) -> Result<String> {
    let mut entries = Vec::new();
    for (offset, v) in c.detail().iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        ensure_finite(&[*v])?;
        let iv = interval_from_offset(offset);
        entries.push(EntryWire {
            lx: iv.level(),
            kx: iv.index(),
            ly: None,
            ky: None,
            block: None,
            value: *v,
        });
    }
    ensure_finite(&[c.mean()])?;
    let wire = CoeffsWire {
        dims: 1,
        resolution: vec![c.grid().resolution()],
        mean: c.mean(),
        entries,
    };
    Ok(serde_json::to_string(&wire)?)
}

pub fn coeffs_2d_json(c: &HaarCoeffs2D) -> Result<String> {
    let mut entries = Vec::new();
    for (offset, v) in c.cm().iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let iv = interval_from_offset(offset);
        entries.push(EntryWire {
            lx: iv.level(),
            kx: iv.index(),
            ly: None,
            ky: None,
            block: Some("cm".into()),
            value: *v,
        });
    }
    for (offset, v) in c.mc().iter().enumerate() {
        if *v == 0.0 {
            continue;
        }
        let iv = interval_from_offset(offset);
        entries.push(EntryWire {
            lx: iv.level(),
            kx: iv.index(),
            ly: None,
            ky: None,
            block: Some("mc".into()),
            value: *v,
        });
    }
    for (rect, v) in c.iter_cc() {
        if v == 0.0 {
            continue;
        }
        entries.push(EntryWire {
            lx: rect.x.level(),
            kx: rect.x.index(),
            ly: Some(rect.y.level()),
            ky: Some(rect.y.index()),
            block: Some("cc".into()),
            value: v,
        });
    }
    for e in &entries {
        ensure_finite(&[e.value])?;
    }
    ensure_finite(&[c.mm()])?;
    let wire = CoeffsWire {
        dims: 2,
        resolution: vec![c.grid().n1(), c.grid().n2()],
        mean: c.mm(),
        entries,
    };
    Ok(serde_json::to_string(&wire)?)
}

fn detail_offset(grid: Grid1D, lx: u32, kx: u64) -> Result<usize> {
    let iv = DyadicInterval::new(lx, kx)?;
    if lx >= grid.resolution() {
        return Err(Error::SubgridRegion(format!(
            "level {lx} has no cancellative coefficient at resolution {}",
            grid.resolution()
        )));
    }
    Ok(crate::haar::heap_offset(iv.level(), iv.index()))
}

pub fn parse_coeffs(text: &str) -> Result<AnyCoeffs> {
    let wire: CoeffsWire = serde_json::from_str(text)?;
    if !wire.mean.is_finite() {
        return Err(Error::NonFinite(0));
    }
    match (wire.dims, wire.resolution.as_slice()) {
        (1, [n]) => {
            let grid = Grid1D::new(*n)?;
            let mut c = HaarCoeffs1D::zeros(grid);
            c.set_mean(wire.mean);
            let mut seen = HashSet::new();
            for e in &wire.entries {
                if e.block.is_some() || e.ly.is_some() || e.ky.is_some() {
                    return Err(Error::Malformed(
                        "one-dimensional entries carry only lx, kx, value".into(),
                    ));
                }
                ensure_finite(&[e.value])?;
                let offset = detail_offset(grid, e.lx, e.kx)?;
                if !seen.insert(offset) {
                    return Err(Error::Malformed(format!(
                        "duplicate entry at level {} index {}",
                        e.lx, e.kx
                    )));
                }
                c.set_detail(&DyadicInterval::new(e.lx, e.kx)?, e.value)?;
            }
            Ok(AnyCoeffs::One(c))
        }
        (2, [n1, n2]) => {
            let grid = Grid2D::new(*n1, *n2)?;
            let mut c = HaarCoeffs2D::zeros(grid);
            c.set_mm(wire.mean);
            let mut seen = HashSet::new();
            for e in &wire.entries {
                ensure_finite(&[e.value])?;
                let block = e.block.as_deref().ok_or_else(|| {
                    Error::Malformed("two-dimensional entries need a block tag".into())
                })?;
                match block {
                    "cm" => {
                        let offset = detail_offset(grid.x_axis(), e.lx, e.kx)?;
                        if !seen.insert(("cm", offset)) {
                            return Err(Error::Malformed(format!(
                                "duplicate cm entry at level {} index {}",
                                e.lx, e.kx
                            )));
                        }
                        c.cm_mut()[offset] = e.value;
                    }
                    "mc" => {
                        let offset = detail_offset(grid.y_axis(), e.lx, e.kx)?;
                        if !seen.insert(("mc", offset)) {
                            return Err(Error::Malformed(format!(
                                "duplicate mc entry at level {} index {}",
                                e.lx, e.kx
                            )));
                        }
                        c.mc_mut()[offset] = e.value;
                    }
                    "cc" => {
                        let (ly, ky) = match (e.ly, e.ky) {
                            (Some(ly), Some(ky)) => (ly, ky),
                            _ => return Err(Error::Malformed("cc entries need ly and ky".into())),
                        };
                        let rect = DyadicRectangle::from_parts(e.lx, e.kx, ly, ky)?;
                        let ox = crate::haar::heap_offset(e.lx, e.kx);
                        let oy = crate::haar::heap_offset(ly, ky);
                        if !seen.insert(("cc", ox * grid.y_cells() + oy)) {
                            return Err(Error::Malformed(format!("duplicate cc entry at {rect}")));
                        }
                        c.set_cc(&rect, e.value)?;
                    }
                    "mm" => {
                        return Err(Error::Malformed(
                            "the mean belongs in the top-level mean field".into(),
                        ))
                    }
                    other => return Err(Error::Malformed(format!("unknown block tag {other:?}"))),
                }
            }
            Ok(AnyCoeffs::Two(c))
        }
        (d, res) => Err(Error::Malformed(format!(
            "dims {d} does not match a resolution list of length {}",
            res.len()
        ))),
    }
}

pub fn parse_coeffs_2d(text: &str) -> Result<HaarCoeffs2D> {
    match parse_coeffs(text)? {
        AnyCoeffs::Two(c) => Ok(c),
        AnyCoeffs::One(_) => Err(Error::DimensionMismatch(
            "expected two-dimensional coefficients".into(),
        )),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RectWire {
    lx: u32,
    kx: u64,
    ly: u32,
    ky: u64,
}

pub fn rects_json(rects: &[DyadicRectangle]) -> Result<String> {
    let wire: Vec<RectWire> = rects
        .iter()
        .map(|r| RectWire {
            lx: r.x.level(),
            kx: r.x.index(),
            ly: r.y.level(),
            ky: r.y.index(),
        })
        .collect();
    Ok(serde_json::to_string(&wire)?)
}

pub fn parse_rects(text: &str) -> Result<Vec<DyadicRectangle>> {
    let wire: Vec<RectWire> = serde_json::from_str(text)?;
    wire.into_iter()
        .map(|r| DyadicRectangle::from_parts(r.lx, r.kx, r.ly, r.ky))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
struct DecompositionWire {
    resolution: [u32; 2],
    p: f64,
    s: f64,
    omegas: Vec<Vec<usize>>,
    scalars: Vec<f64>,
    atoms: Vec<Vec<EntryWire>>,
}

/// Decomposition dump: per atom the support cells, the scalar, and the
/// nonzero cc entries of the atom's coefficients.
pub fn decomposition_json(d: &AtomicDecomposition) -> Result<String> {
    let omegas = d
        .omegas()
        .iter()
        .map(|o| o.iter().collect::<Vec<usize>>())
        .collect();
    let atoms = d
        .atoms()
        .iter()
        .map(|a| {
            a.coeffs()
                .iter_cc()
                .filter(|(_, v)| *v != 0.0)
                .map(|(rect, v)| EntryWire {
                    lx: rect.x.level(),
                    kx: rect.x.index(),
                    ly: Some(rect.y.level()),
                    ky: Some(rect.y.index()),
                    block: Some("cc".into()),
                    value: v,
                })
                .collect()
        })
        .collect();
    let wire = DecompositionWire {
        resolution: [d.grid().n1(), d.grid().n2()],
        p: d.exponent_p(),
        s: d.exponent_s(),
        omegas,
        scalars: d.scalars().to_vec(),
        atoms,
    };
    Ok(serde_json::to_string(&wire)?)
}

/// Wraps a result in the common report envelope. The wall clock is
/// optional so file artifacts can stay byte-identical across runs.
pub fn report_envelope(
    config: Value,
    seed: Option<u64>,
    wall_clock_ms: Option<u128>,
    result: Value,
) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("config".into(), config);
    if let Some(s) = seed {
        map.insert("seed".into(), json!(s));
    }
    if let Some(ms) = wall_clock_ms {
        map.insert("wall_clock_ms".into(), json!(ms as u64));
    }
    map.insert("result".into(), result);
    Value::Object(map)
}

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub seed: u64,
    pub n1: u32,
    pub n2: u32,
    pub quantity: String,
    pub value: f64,
}

/// One row per (instance, quantity); the header is fixed.
pub fn csv_table(rows: &[CsvRow]) -> String {
    let mut out = String::from("seed,n1,n2,quantity,value\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.seed, row.n1, row.n2, row.quantity, row.value
        ));
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(std::fs::write(path, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    #[test]
    fn signal_round_trips_both_dims() {
        let mut r = rng(601);
        let f1 = random_signal_1d(Grid1D::new(3).unwrap(), &mut r);
        let text = signal_1d_json(&f1).unwrap();
        let back = parse_signal_1d(&text).unwrap();
        assert_eq!(f1.values(), back.values());

        let f2 = random_signal_2d(Grid2D::new(2, 3).unwrap(), &mut r);
        let text = signal_2d_json(&f2).unwrap();
        let back = parse_signal_2d(&text).unwrap();
        assert_eq!(f2.values(), back.values());
        assert_eq!(back.grid().n1(), 2);

        // Serialization is deterministic.
        assert_eq!(text, signal_2d_json(&f2).unwrap());
    }

    #[test]
    fn signal_parser_rejects_bad_input() {
        assert!(parse_signal("not json").is_err());
        assert!(parse_signal(r#"{"dims":3,"resolution":[1],"values":[0.5,0.5]}"#).is_err());
        assert!(parse_signal(r#"{"dims":1,"resolution":[1,2],"values":[0.0]}"#).is_err());
        // Wrong value count.
        assert!(parse_signal(r#"{"dims":1,"resolution":[1],"values":[0.0]}"#).is_err());
        // Non-finite values serialize to null and fail to parse back.
        assert!(parse_signal(r#"{"dims":1,"resolution":[1],"values":[null,1.0]}"#).is_err());
        let bad = Signal1D::new(Grid1D::new(1).unwrap(), vec![f64::NAN, 0.0]);
        if let Ok(bad) = bad {
            assert!(signal_1d_json(&bad).is_err());
        }
    }

    #[test]
    fn coeffs_round_trip_omits_zeros() {
        let mut r = rng(602);
        let grid = Grid2D::new(2, 2).unwrap();
        let f = random_signal_2d(grid, &mut r);
        let c = HaarCoeffs2D::forward(&f);
        let text = coeffs_2d_json(&c).unwrap();
        let back = parse_coeffs_2d(&text).unwrap();
        assert!((back.mm() - c.mm()).abs() < 1e-15);
        assert_eq!(back.cm(), c.cm());
        assert_eq!(back.mc(), c.mc());
        assert_eq!(back.cc(), c.cc());

        // A zero coefficient set serializes to an empty entry list.
        let zeros = HaarCoeffs2D::zeros(grid);
        let text = coeffs_2d_json(&zeros).unwrap();
        assert!(text.contains(r#""entries":[]"#), "{text}");
    }

    #[test]
    fn coeffs_1d_round_trip() {
        let grid = Grid1D::new(2).unwrap();
        let mut c = HaarCoeffs1D::zeros(grid);
        c.set_mean(0.25);
        c.set_detail(&DyadicInterval::new(1, 1).unwrap(), -0.5)
            .unwrap();
        let text = coeffs_1d_json(&c).unwrap();
        match parse_coeffs(&text).unwrap() {
            AnyCoeffs::One(back) => {
                assert_eq!(back.mean(), 0.25);
                assert_eq!(back.detail(), c.detail());
            }
            AnyCoeffs::Two(_) => panic!("expected 1d"),
        }
    }

    #[test]
    fn coeffs_parser_rejects_bad_entries() {
        // Duplicate entry.
        let text = r#"{"dims":2,"resolution":[1,1],"mean":0.0,"entries":[
            {"lx":0,"kx":0,"ly":0,"ky":0,"block":"cc","value":1.0},
            {"lx":0,"kx":0,"ly":0,"ky":0,"block":"cc","value":2.0}]}"#;
        assert!(matches!(parse_coeffs(text), Err(Error::Malformed(_))));
        // Missing block in 2d.
        let text = r#"{"dims":2,"resolution":[1,1],"mean":0.0,"entries":[
            {"lx":0,"kx":0,"value":1.0}]}"#;
        assert!(parse_coeffs(text).is_err());
        // cc entry outside the cancellative range.
        let text = r#"{"dims":2,"resolution":[1,1],"mean":0.0,"entries":[
            {"lx":1,"kx":0,"ly":0,"ky":0,"block":"cc","value":1.0}]}"#;
        assert!(parse_coeffs(text).is_err());
        // mm as an entry is rejected.
        let text = r#"{"dims":2,"resolution":[1,1],"mean":0.0,"entries":[
            {"lx":0,"kx":0,"block":"mm","value":1.0}]}"#;
        assert!(parse_coeffs(text).is_err());
        // The mm alias for the mean field parses.
        let text = r#"{"dims":2,"resolution":[1,1],"mm":0.5,"entries":[]}"#;
        match parse_coeffs(text).unwrap() {
            AnyCoeffs::Two(c) => assert_eq!(c.mm(), 0.5),
            AnyCoeffs::One(_) => panic!("expected 2d"),
        }
    }

    #[test]
    fn rect_lists_round_trip() {
        let rects = vec![
            DyadicRectangle::from_parts(0, 0, 1, 1).unwrap(),
            DyadicRectangle::from_parts(2, 3, 0, 0).unwrap(),
        ];
        let text = rects_json(&rects).unwrap();
        assert_eq!(parse_rects(&text).unwrap(), rects);
        assert!(parse_rects(r#"[{"lx":1,"kx":5,"ly":0,"ky":0}]"#).is_err());
    }

    #[test]
    fn decomposition_dump_contains_all_parts() {
        let mut r = rng(603);
        let grid = Grid2D::new(3, 3).unwrap();
        let f = random_signal_2d(grid, &mut r);
        let d = crate::atoms::atomic_decompose(&f, 1.0, 2.0).unwrap();
        let text = decomposition_json(&d).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["omegas"].as_array().unwrap().len(), d.len());
        assert_eq!(v["scalars"].as_array().unwrap().len(), d.len());
        assert_eq!(v["atoms"].as_array().unwrap().len(), d.len());
    }

    #[test]
    fn envelope_and_csv_are_stable() {
        let env = report_envelope(json!({"op": "pi2"}), Some(7), None, json!({"value": 1.5}));
        let text = serde_json::to_string(&env).unwrap();
        assert!(text.contains(r#""seed":7"#));
        assert!(!text.contains("wall_clock_ms"));
        let env2 = report_envelope(
            json!({"op": "pi2"}),
            Some(7),
            Some(123),
            json!({"value": 1.5}),
        );
        assert!(serde_json::to_string(&env2)
            .unwrap()
            .contains("wall_clock_ms"));

        let rows = vec![CsvRow {
            seed: 1,
            n1: 4,
            n2: 4,
            quantity: "ratio".into(),
            value: 0.5,
        }];
        assert_eq!(
            csv_table(&rows),
            "seed,n1,n2,quantity,value\n1,4,4,ratio,0.5\n"
        );
    }
}
