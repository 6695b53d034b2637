//! Discriminant formula against the determinant over the family
//! `prod_{t=1..k} (z^2 - t x1^(2t+1) x2^t)`.

use std::path::Path;
use std::time::Instant;

use ntree::analysis::{discriminant_of, qo_oracle, QoOracle};
use ntree::{Error, SparsePoly};

use crate::{vec_text, Failure};

fn member(k: usize) -> String {
    let factors: Vec<String> = (1..=k)
        .map(|t| {
            let coeff = if t == 1 { String::new() } else { format!("{t}*") };
            let x2 = if t == 1 { "x2".to_string() } else { format!("x2^{t}") };
            format!("(z^2 - {coeff}x1^{}*{x2})", 2 * t + 1)
        })
        .collect();
    factors.join("*")
}

pub(crate) fn run(max_k: usize, out: Option<&Path>) -> Result<(), Failure> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| Failure::Usage(format!("writing csv: {e}"));
    w.write_record(["input", "z-degree", "d", "formula_micros", "oracle_micros", "exponent", "match"]).map_err(io)?;
    let mut mismatches = 0;
    let mut last = None;
    for k in 1..=max_k {
        let text = member(k);
        let f = SparsePoly::parse(&text, 2).map_err(Error::from)?;
        let start = Instant::now();
        let formula = discriminant_of(&f)?;
        let formula_us = start.elapsed().as_micros();
        let start = Instant::now();
        let oracle = qo_oracle(&f)?;
        let oracle_us = start.elapsed().as_micros();
        let ok = oracle == QoOracle::QuasiOrdinary(formula.clone());
        if !ok {
            mismatches += 1;
        }
        w.write_record([
            text,
            (2 * k).to_string(),
            "2".to_string(),
            formula_us.to_string(),
            oracle_us.to_string(),
            vec_text(&formula),
            if ok { "match" } else { "MISMATCH" }.to_string(),
        ])
        .map_err(io)?;
        last = Some((2 * k, formula_us, oracle_us));
    }
    w.flush().map_err(|e| Failure::Usage(format!("writing csv: {e}")))?;
    if let Some((deg, fu, ou)) = last {
        eprintln!("z-degree {deg}: formula {fu} us, determinant {ou} us, ratio {:.1}", ou as f64 / fu.max(1) as f64);
    }
    if mismatches > 0 {
        return Err(Error::Internal(format!("{mismatches} bench rows disagree with the determinant")).into());
    }
    Ok(())
}
