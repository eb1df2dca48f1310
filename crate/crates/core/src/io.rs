//! Text and JSON formats for series, representations, Hopf polynomials and
//! sampled signals.
//!
//! Series text: `3/2 x0 x1 - x[1,2] + 2`, vector coefficients as
//! `[1, -1/2] x1`. Series JSON:
//! `{"ell": 1, "truncation": "exact" | n, "terms": [{"word": "x0 x1", "coeff": ["3/2"]}]}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::{CTSignal, DTSignal};
use crate::matrix::Matrix;
use crate::rational::LinearRepresentation;
use crate::scalar::Scalar;
use crate::series::{Series, Truncation};
use crate::words::{Letter, Word};

fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut neg = false;
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                buf.push(ch);
            }
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced ']' in {s:?}")));
                }
                buf.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if buf.trim().is_empty() {
                    if ch == '-' {
                        neg = !neg;
                    }
                } else {
                    out.push((neg, std::mem::take(&mut buf)));
                    neg = ch == '-';
                }
            }
            _ => buf.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced '[' in {s:?}")));
    }
    if !buf.trim().is_empty() {
        out.push((neg, buf));
    } else if !out.is_empty() || neg {
        return Err(Error::Parse(format!("dangling sign in {s:?}")));
    }
    Ok(out)
}

fn parse_scalar<C: Scalar>(tok: &str) -> Result<C> {
    C::parse(tok).ok_or_else(|| Error::Parse(format!("bad coefficient {tok:?}")))
}

/// Parses the text form of a series. The result is an exact polynomial.
pub fn parse_series<C: Scalar>(s: &str) -> Result<Series<C>> {
    let s = s.trim();
    if s.is_empty() || s == "0" {
        return Ok(Series::zero(1));
    }
    let mut series: Option<Series<C>> = None;
    for (neg, term) in split_terms(s)? {
        let term = term.trim();
        let (coeff, rest): (Vec<C>, &str) = if let Some(body) = term.strip_prefix('[') {
            let close = body.find(']').ok_or_else(|| Error::Parse(format!("bad vector in {term:?}")))?;
            let v = body[..close].split(',').map(|t| parse_scalar(t.trim())).collect::<Result<Vec<C>>>()?;
            (v, &body[close + 1..])
        } else {
            let first = term.split_whitespace().next().unwrap_or("");
            if first.starts_with('x') || first == "e" {
                (vec![C::one()], term)
            } else {
                (vec![parse_scalar(first)?], &term[first.len()..])
            }
        };
        let coeff: Vec<C> = if neg { coeff.into_iter().map(|c| -c).collect() } else { coeff };
        let word: Word = rest.parse()?;
        let target = series.get_or_insert_with(|| Series::zero(coeff.len()));
        if target.ell() != coeff.len() {
            return Err(Error::DimensionMismatch { expected: target.ell(), found: coeff.len() });
        }
        target.add_term(word, coeff);
    }
    Ok(series.unwrap_or_else(|| Series::zero(1)))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TruncationDoc {
    Label(String),
    Len(usize),
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    word: String,
    coeff: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SeriesDoc {
    ell: usize,
    #[serde(default = "exact_doc")]
    truncation: TruncationDoc,
    terms: Vec<TermDoc>,
}

fn exact_doc() -> TruncationDoc {
    TruncationDoc::Label("exact".into())
}

pub fn series_to_json<C: Scalar>(c: &Series<C>) -> Value {
    let truncation = match c.truncation() {
        Truncation::Exact => json!("exact"),
        Truncation::At(n) => json!(n),
    };
    let terms: Vec<Value> = c
        .terms()
        .map(|(w, v)| json!({"word": w.to_string(), "coeff": v.iter().map(|x| x.to_string()).collect::<Vec<_>>()}))
        .collect();
    json!({"ell": c.ell(), "truncation": truncation, "terms": terms})
}

pub fn series_from_json<C: Scalar>(text: &str) -> Result<Series<C>> {
    let doc: SeriesDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let truncation = match doc.truncation {
        TruncationDoc::Len(n) => Truncation::At(n),
        TruncationDoc::Label(l) if l == "exact" => Truncation::Exact,
        TruncationDoc::Label(l) => Truncation::At(l.parse().map_err(|_| Error::Parse(format!("bad truncation {l:?}")))?),
    };
    let mut s = Series::zero(doc.ell).with_truncation(truncation);
    for t in doc.terms {
        let word: Word = t.word.parse()?;
        if t.coeff.len() != doc.ell {
            return Err(Error::DimensionMismatch { expected: doc.ell, found: t.coeff.len() });
        }
        if !truncation.allows(word.len()) {
            return Err(Error::Truncation { requested: word.len(), available: truncation.limit().unwrap_or(0) });
        }
        let coeff = t.coeff.iter().map(|c| parse_scalar(c)).collect::<Result<Vec<C>>>()?;
        s.add_term(word, coeff);
    }
    Ok(s)
}

/// Accepts either the JSON document or the text form.
pub fn read_series<C: Scalar>(text: &str) -> Result<Series<C>> {
    if text.trim_start().starts_with('{') {
        series_from_json(text)
    } else {
        parse_series(text)
    }
}

#[derive(Serialize, Deserialize)]
struct RepDoc {
    alphabet: Vec<String>,
    dim: usize,
    mu: BTreeMap<String, Vec<Vec<String>>>,
    gamma: Vec<String>,
    lambda: Vec<Vec<String>>,
}

fn matrix_doc<C: Scalar>(m: &Matrix<C>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect()
}

fn matrix_from_doc<C: Scalar>(rows: &[Vec<String>]) -> Result<Matrix<C>> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|c| parse_scalar(c)).collect()).collect::<Result<_>>()?)
}

/// `{"alphabet": [...], "dim": n, "mu": {"x1": [[...]]}, "gamma": [...], "lambda": [[...]]}`,
/// entries as strings so rationals stay exact.
pub fn rep_to_json<C: Scalar>(r: &LinearRepresentation<C>) -> Value {
    let doc = RepDoc {
        alphabet: r.alphabet().iter().map(Letter::to_string).collect(),
        dim: r.dim(),
        mu: r.alphabet().iter().map(|&l| (l.to_string(), matrix_doc(r.mu(l).expect("own letter")))).collect(),
        gamma: r.gamma().entries().iter().map(|c| c.to_string()).collect(),
        lambda: matrix_doc(r.lambda()),
    };
    serde_json::to_value(doc).expect("plain document")
}

pub fn rep_from_json<C: Scalar>(text: &str) -> Result<LinearRepresentation<C>> {
    let doc: RepDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut mu = BTreeMap::new();
    for name in &doc.alphabet {
        let l: Letter = name.parse()?;
        let rows = doc.mu.get(name).ok_or_else(|| Error::Parse(format!("no matrix for letter {name}")))?;
        mu.insert(l, matrix_from_doc(rows)?);
    }
    if let Some(extra) = doc.mu.keys().find(|k| !doc.alphabet.contains(k)) {
        return Err(Error::Parse(format!("matrix for letter {extra} outside the alphabet")));
    }
    let gamma = Matrix::column(doc.gamma.iter().map(|c| parse_scalar(c)).collect::<Result<_>>()?);
    if gamma.rows() != doc.dim {
        return Err(Error::DimensionMismatch { expected: doc.dim, found: gamma.rows() });
    }
    LinearRepresentation::new(mu, gamma, matrix_from_doc(&doc.lambda)?)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn csv_rows(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()).map_err(csv_err))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok((header, rows))
}

fn input_columns(header: &[String], skip: usize) -> Result<usize> {
    let inputs = &header[skip..];
    for (i, h) in inputs.iter().enumerate() {
        if *h != format!("u{i}") {
            return Err(Error::Parse(format!("expected column u{i}, found {h:?}")));
        }
    }
    if inputs.is_empty() {
        return Err(Error::Parse("no input columns".into()));
    }
    Ok(inputs.len())
}

fn csv_text(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

/// Discrete-time CSV: header `k,u0,…,um`, rows `k = 1..=N` in order.
pub fn dt_signal_from_csv<C: Scalar>(text: &str) -> Result<DTSignal<C>> {
    let (header, rows) = csv_rows(text)?;
    if header.first().map(String::as_str) != Some("k") {
        return Err(Error::Parse("first column must be k".into()));
    }
    input_columns(&header, 1)?;
    let mut samples = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row[0].parse::<usize>().ok() != Some(i + 1) {
            return Err(Error::Parse(format!("row {} should have k = {}", i + 1, i + 1)));
        }
        samples.push(row[1..].iter().map(|c| parse_scalar(c)).collect::<Result<Vec<C>>>()?);
    }
    DTSignal::new(samples)
}

pub fn dt_signal_to_csv<C: Scalar>(u: &DTSignal<C>) -> String {
    let header = std::iter::once("k".to_string()).chain((0..=u.m()).map(|i| format!("u{i}"))).collect();
    csv_text(
        header,
        u.samples()
            .iter()
            .enumerate()
            .map(|(k, s)| std::iter::once((k + 1).to_string()).chain(s.iter().map(|c| c.to_string())).collect()),
    )
}

/// Continuous-time CSV: header `k,t0,h,u0,u1,…,um`, rows `k = 0..`,
/// with `t0` and `h` repeated on every row and `u0 = 1`.
pub fn ct_signal_from_csv(text: &str) -> Result<CTSignal> {
    let (header, rows) = csv_rows(text)?;
    if header.len() < 4 || header[..3] != ["k", "t0", "h"] {
        return Err(Error::Parse("header must start with k,t0,h".into()));
    }
    input_columns(&header, 3)?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}")));
    let first = rows.first().ok_or_else(|| Error::Parse("no samples".into()))?;
    let (t0, h) = (num(&first[1])?, num(&first[2])?);
    let mut samples = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row[0].parse::<usize>().ok() != Some(i) {
            return Err(Error::Parse(format!("row {i} should have k = {i}")));
        }
        if num(&row[1])? != t0 || num(&row[2])? != h {
            return Err(Error::Parse(format!("t0 and h must be constant, row {i} differs")));
        }
        if num(&row[3])? != 1.0 {
            return Err(Error::Parse(format!("u0 must be 1, row {i} has {}", row[3])));
        }
        samples.push(row[4..].iter().map(|c| num(c)).collect::<Result<Vec<f64>>>()?);
    }
    CTSignal::new(t0, h, samples)
}

pub fn ct_signal_to_csv(u: &CTSignal) -> String {
    let header = ["k", "t0", "h"].iter().map(|s| s.to_string()).chain((0..=u.m()).map(|i| format!("u{i}"))).collect();
    csv_text(
        header,
        u.samples().iter().enumerate().map(|(k, s)| {
            [k.to_string(), u.t0().to_string(), u.h().to_string(), "1".to_string()]
                .into_iter()
                .chain(s.iter().map(|c| c.to_string()))
                .collect()
        }),
    )
}

/// Output trajectory as CSV with columns `k,y1,…,yℓ`.
pub fn trajectory_to_csv<C: std::fmt::Display>(y: &[Vec<C>]) -> String {
    let ell = y.first().map_or(0, Vec::len);
    let header = std::iter::once("k".to_string()).chain((1..=ell).map(|i| format!("y{i}"))).collect();
    csv_text(
        header,
        y.iter().enumerate().map(|(k, r)| std::iter::once(k.to_string()).chain(r.iter().map(|c| c.to_string())).collect()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::words::x;

    #[test]
    fn text_parsing() {
        let s: Series<Rational> = parse_series("3/2 x0 x1 - x[1,2] + 2 - x2").unwrap();
        assert_eq!(s.num_terms(), 4);
        assert_eq!(s.coeff1(&"x0 x1".parse().unwrap()).unwrap(), rat(3, 2));
        assert_eq!(s.coeff1(&Word::letter(x(1).bracket(x(2)))).unwrap(), rat(-1, 1));
        assert_eq!(s.coeff1(&Word::empty()).unwrap(), rat(2, 1));
        assert_eq!(s.to_string(), "2 - x2 - x[1,2] + 3/2 x0 x1");
    }

    #[test]
    fn text_round_trip() {
        for src in ["x1 x2 + x2 x1", "-1/3 x0 + 5", "0", "-x[1,1] x1 + 2 x1 x[1,1]", "[1, -2] x1 + [0, 1/2]"] {
            let s: Series<Rational> = parse_series(src).unwrap();
            let back: Series<Rational> = parse_series(&s.to_string()).unwrap();
            assert_eq!(s, back, "{src}");
        }
        assert!(parse_series::<Rational>("x1 +").is_err());
        assert!(parse_series::<Rational>("[1,2] x1 + x2").is_err());
    }

    #[test]
    fn json_round_trip() {
        let s: Series<Rational> = parse_series("[1, -2] x1 + [0, 1/2] x0 x[1,2]").unwrap();
        let s = s.with_truncation(Truncation::At(3));
        let text = series_to_json(&s).to_string();
        let back: Series<Rational> = read_series(&text).unwrap();
        assert_eq!(s, back);
        let plain: Series<Rational> = read_series(r#"{"ell":1,"terms":[{"word":"e","coeff":["0.25"]}]}"#).unwrap();
        assert_eq!(plain.coeff1(&Word::empty()).unwrap(), rat(1, 4));
    }

    #[test]
    fn representation_json() {
        let r = LinearRepresentation::<Rational>::letter_star(&[x(0), x(1), x(1).bracket(x(2))], x(1));
        let r = crate::rational::rep_scale(&rat(-2, 3), &r);
        let back: LinearRepresentation<Rational> = rep_from_json(&rep_to_json(&r).to_string()).unwrap();
        assert_eq!(r, back);
        assert!(rep_from_json::<Rational>(r#"{"alphabet":["x1"],"dim":1,"mu":{},"gamma":["1"],"lambda":[["1"]]}"#).is_err());
    }

    #[test]
    fn signal_csv() {
        let u = DTSignal::new(vec![vec![rat(1, 2), rat(-3, 1)], vec![rat(0, 1), rat(1, 10)]]).unwrap();
        let text = dt_signal_to_csv(&u);
        assert!(text.starts_with("k,u0,u1\n1,1/2,-3\n"));
        assert_eq!(dt_signal_from_csv::<Rational>(&text).unwrap(), u);
        assert!(dt_signal_from_csv::<Rational>("k,u1\n1,2\n").is_err());
        let v = CTSignal::from_fn(0.0, 0.25, 3, |t| vec![t, -t]).unwrap();
        let text = ct_signal_to_csv(&v);
        assert!(text.starts_with("k,t0,h,u0,u1,u2\n0,0,0.25,1,0,"));
        assert_eq!(ct_signal_from_csv(&text).unwrap(), v);
        assert!(trajectory_to_csv(&[vec![1.5], vec![2.0]]).starts_with("k,y1\n0,1.5\n"));
    }
}
