//! Orbit sample CSV: `index,lo,hi,word`, rational bounds exact, words in
//! the space-separated letter format.

use orbitkit::action::OrbitSample;
use orbitkit::homeo::{parse_word, MapWord};
use orbitkit::rational::{format_rational, parse_rational, Rational};

#[derive(Debug)]
pub struct OrbitRow {
    pub lo: Rational,
    pub hi: Rational,
    pub word: MapWord,
}

pub fn write_orbit_csv(sample: &OrbitSample) -> String {
    let mut out = String::from("index,lo,hi,word\n");
    for (i, p) in sample.points().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            format_rational(p.enclosure.lo()),
            format_rational(p.enclosure.hi()),
            p.word
        ));
    }
    out
}

pub fn read_orbit_csv(text: &str) -> Result<Vec<OrbitRow>, String> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some("index,lo,hi,word") => {}
        other => return Err(format!("bad header {other:?}")),
    }
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(4, ',');
        let ctx = |m: &str| format!("row {}: {m}", n + 2);
        let index: usize = parts
            .next()
            .ok_or_else(|| ctx("missing index"))?
            .parse()
            .map_err(|e| ctx(&format!("bad index: {e}")))?;
        let lo = parse_rational(parts.next().ok_or_else(|| ctx("missing lo"))?)
            .map_err(|e| ctx(&e))?;
        let hi = parse_rational(parts.next().ok_or_else(|| ctx("missing hi"))?)
            .map_err(|e| ctx(&e))?;
        let word =
            parse_word(parts.next().ok_or_else(|| ctx("missing word"))?).map_err(|e| ctx(&e))?;
        if index != rows.len() {
            return Err(ctx("index out of sequence"));
        }
        rows.push(OrbitRow { lo, hi, word });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitkit::action::{orbit, GeneratorSystem, OrbitBudget};
    use orbitkit::catalog::{build_example, ExampleParams};
    use orbitkit::rational::rat;

    fn sample_system() -> GeneratorSystem {
        build_example("case2-single", &ExampleParams::default()).unwrap()
    }

    #[test]
    fn csv_round_trips() {
        let sys = sample_system();
        let s = orbit(&sys, &rat(1, 2), OrbitBudget::new(2, 100), None, None).unwrap();
        let text = write_orbit_csv(&s);
        let rows = read_orbit_csv(&text).unwrap();
        assert_eq!(rows.len(), 5);
        for (row, p) in rows.iter().zip(s.points()) {
            assert_eq!(&row.lo, p.enclosure.lo());
            assert_eq!(&row.hi, p.enclosure.hi());
            assert_eq!(row.word, p.word);
        }
    }

    #[test]
    fn bad_rows_reported_with_position() {
        let e = read_orbit_csv("index,lo,hi,word\n0,1/2,x,g\n").unwrap_err();
        assert!(e.contains("row 2"), "{e}");
        assert!(read_orbit_csv("nope\n").is_err());
    }
}
