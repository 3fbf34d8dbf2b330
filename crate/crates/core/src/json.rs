//! JSON encodings of series, matrices, towers, group elements, `A(z)` and
//! normalization results. Rationals are written as decimal strings.
//! Constant matrices use series with no variables and truncation degree 0.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::actions::{GLElement, GMinusElement, GPlusElement};
use crate::error::{Error, Result};
use crate::kp::AMatrixSeries;
use crate::normalize::NormalizationResult;
use crate::report::Report;
use crate::series::{ConstMatrix, CoordinateMap, Matrix, Rat, Series, SeriesMatrix};
use crate::tower::Tower;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub n: String,
    pub d: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub num_vars: usize,
    pub trunc_degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub m: usize,
    pub entries: Vec<Vec<SeriesJson>>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CellJson {
    pub a: usize,
    pub b: usize,
    pub matrix: MatrixJson,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TowerJson {
    pub m: usize,
    pub num_vars: usize,
    pub trunc_degree: usize,
    #[serde(rename = "window_B")]
    pub window: usize,
    pub entries: Vec<CellJson>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Gplus,
    Gminus,
    Gl,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IndexedMatrixJson {
    pub l: usize,
    pub matrix: MatrixJson,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ElementJson {
    pub kind: ElementKind,
    pub coeffs: Vec<IndexedMatrixJson>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AJson {
    pub m: usize,
    pub z_trunc: usize,
    pub coeffs: Vec<MatrixJson>,
}

/// A parsed group element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Element {
    GPlus(GPlusElement),
    GMinus(GMinusElement),
    GL(GLElement),
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_rat(n: &str, d: &str) -> Result<Rat> {
    let n: BigInt = n.parse().map_err(|_| parse_err(format!("bad numerator {n:?}")))?;
    let d: BigInt = d.parse().map_err(|_| parse_err(format!("bad denominator {d:?}")))?;
    if !d.is_positive() {
        return Err(parse_err(format!("denominator {d} is not positive")));
    }
    Ok(Rat::new(n, d))
}

pub fn series_to_json(s: &Series) -> SeriesJson {
    SeriesJson {
        num_vars: s.num_vars(),
        trunc_degree: s.trunc_degree(),
        terms: s
            .terms()
            .map(|(mono, c)| TermJson {
                exp: mono.exponents().to_vec(),
                n: c.numer().to_string(),
                d: c.denom().to_string(),
            })
            .collect(),
    }
}

/// Rejects repeated monomials and monomials above the truncation degree.
pub fn series_from_json(j: &SeriesJson) -> Result<Series> {
    let mut s = Series::zero(j.num_vars, j.trunc_degree);
    let mut seen = std::collections::BTreeSet::new();
    for t in &j.terms {
        if t.exp.len() != j.num_vars {
            return Err(parse_err(format!("exponent {:?} has the wrong length", t.exp)));
        }
        let deg: u64 = t.exp.iter().map(|&e| u64::from(e)).sum();
        if deg > j.trunc_degree as u64 {
            return Err(parse_err(format!("exponent {:?} exceeds degree {}", t.exp, j.trunc_degree)));
        }
        if !seen.insert(t.exp.clone()) {
            return Err(parse_err(format!("repeated exponent {:?}", t.exp)));
        }
        s.add_term(&t.exp, &parse_rat(&t.n, &t.d)?);
    }
    Ok(s)
}

pub fn matrix_to_json(m: &SeriesMatrix) -> MatrixJson {
    MatrixJson {
        m: m.dim(),
        entries: m.rows().map(|row| row.iter().map(series_to_json).collect()).collect(),
    }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<SeriesMatrix> {
    if j.m == 0 || j.entries.len() != j.m || j.entries.iter().any(|r| r.len() != j.m) {
        return Err(parse_err(format!("matrix is not {0}x{0}", j.m)));
    }
    let rows = j
        .entries
        .iter()
        .map(|r| r.iter().map(series_from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let first = &rows[0][0];
    if rows.iter().flatten().any(|s| !s.same_shape(first)) {
        return Err(parse_err("matrix entries differ in shape"));
    }
    Ok(Matrix::from_rows(rows))
}

pub fn const_matrix_to_json(c: &ConstMatrix) -> MatrixJson {
    matrix_to_json(&c.map(|x| Series::constant(0, 0, x.clone())))
}

/// Accepts any series shape as long as only constant terms are present.
pub fn const_matrix_from_json(j: &MatrixJson) -> Result<ConstMatrix> {
    let m = matrix_from_json(j)?;
    if m.entries().any(|s| s.terms().any(|(mono, _)| mono.degree() > 0)) {
        return Err(parse_err("expected a constant matrix"));
    }
    Ok(m.constant_part())
}

pub fn tower_to_json(t: &Tower) -> TowerJson {
    let mut entries: Vec<CellJson> = t
        .cells()
        .map(|(a, b, m)| CellJson {
            a,
            b,
            matrix: matrix_to_json(m),
        })
        .collect();
    entries.sort_by_key(|c| (c.a + c.b, c.a));
    TowerJson {
        m: t.dim(),
        num_vars: t.num_vars(),
        trunc_degree: t.trunc_degree(),
        window: t.window(),
        entries,
    }
}

/// Requires exactly one cell for every `a + b <= B`.
pub fn tower_from_json(j: &TowerJson) -> Result<Tower> {
    let mut cells = std::collections::BTreeMap::new();
    for c in &j.entries {
        if c.a + c.b > j.window {
            return Err(parse_err(format!("cell ({},{}) outside window {}", c.a, c.b, j.window)));
        }
        let m = matrix_from_json(&c.matrix)?;
        if m.dim() != j.m || m.num_vars() != j.num_vars || m.trunc_degree() != j.trunc_degree {
            return Err(parse_err(format!("cell ({},{}) has the wrong shape", c.a, c.b)));
        }
        if cells.insert((c.a, c.b), m).is_some() {
            return Err(parse_err(format!("cell ({},{}) repeated", c.a, c.b)));
        }
    }
    for s in 0..=j.window {
        for a in 0..=s {
            if !cells.contains_key(&(a, s - a)) {
                return Err(parse_err(format!("cell ({a},{}) missing", s - a)));
            }
        }
    }
    Ok(Tower::from_fn(j.window, |a, b| cells.remove(&(a, b)).expect("checked")))
}

fn indexed(coeffs: impl Iterator<Item = (usize, ConstMatrix)>) -> Vec<IndexedMatrixJson> {
    coeffs
        .filter(|(_, c)| !c.is_zero())
        .map(|(l, c)| IndexedMatrixJson {
            l,
            matrix: const_matrix_to_json(&c),
        })
        .collect()
}

pub fn element_to_json(e: &Element) -> ElementJson {
    match e {
        Element::GPlus(r) => ElementJson {
            kind: ElementKind::Gplus,
            coeffs: indexed(r.coeffs().map(|(l, c)| (l, c.clone()))),
        },
        Element::GMinus(s) => ElementJson {
            kind: ElementKind::Gminus,
            coeffs: indexed(s.coeffs().map(|(l, c)| (l, c.clone()))),
        },
        Element::GL(p) => ElementJson {
            kind: ElementKind::Gl,
            coeffs: vec![IndexedMatrixJson {
                l: 0,
                matrix: const_matrix_to_json(p.matrix()),
            }],
        },
    }
}

/// `dim` is needed when the coefficient list is empty.
pub fn element_from_json(j: &ElementJson, dim: usize) -> Result<Element> {
    let coeffs = j
        .coeffs
        .iter()
        .map(|c| Ok((c.l, const_matrix_from_json(&c.matrix)?)))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.iter().any(|(_, c)| c.dim() != dim) {
        return Err(parse_err(format!("element coefficients are not {dim}x{dim}")));
    }
    let mut ls: Vec<usize> = coeffs.iter().map(|(l, _)| *l).collect();
    ls.sort_unstable();
    if ls.windows(2).any(|w| w[0] == w[1]) {
        return Err(parse_err("repeated index l"));
    }
    let wrap = |e: Error| parse_err(e.to_string());
    match j.kind {
        ElementKind::Gplus => GPlusElement::new(dim, coeffs).map(Element::GPlus).map_err(wrap),
        ElementKind::Gminus => GMinusElement::new(dim, coeffs).map(Element::GMinus).map_err(wrap),
        ElementKind::Gl => match coeffs.as_slice() {
            [(0, p)] => GLElement::new(p.clone()).map(Element::GL).map_err(wrap),
            _ => Err(parse_err("gl element needs exactly one coefficient with l = 0")),
        },
    }
}

pub fn a_to_json(a: &AMatrixSeries) -> AJson {
    AJson {
        m: a.dim(),
        z_trunc: a.z_trunc(),
        coeffs: a.coeffs().iter().map(const_matrix_to_json).collect(),
    }
}

pub fn a_from_json(j: &AJson) -> Result<AMatrixSeries> {
    if j.coeffs.len() != j.z_trunc + 1 {
        return Err(parse_err(format!("z_trunc {} but {} coefficients", j.z_trunc, j.coeffs.len())));
    }
    let coeffs = j.coeffs.iter().map(const_matrix_from_json).collect::<Result<Vec<_>>>()?;
    if coeffs.iter().any(|c| c.dim() != j.m) {
        return Err(parse_err(format!("A(z) coefficients are not {0}x{0}", j.m)));
    }
    AMatrixSeries::new(coeffs)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StepJson {
    pub name: String,
    pub passed: bool,
    pub report: Report,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct NormalizationJson {
    pub recovered_canonical_form: bool,
    pub gl: ElementJson,
    /// `log S` of the constant-killing element.
    pub s_element: ElementJson,
    /// `S(z) = I + S_1 z^{-1} + …` as stored.
    pub s_group: Vec<IndexedMatrixJson>,
    pub r_factors: Vec<IndexedMatrixJson>,
    pub coordinate_map: Option<Vec<SeriesJson>>,
    pub normalized: TowerJson,
    pub log: Vec<StepJson>,
}

pub fn normalization_to_json(r: &NormalizationResult) -> NormalizationJson {
    NormalizationJson {
        recovered_canonical_form: r.recovered_canonical_form(),
        gl: element_to_json(&Element::GL(r.gl.clone())),
        s_element: element_to_json(&Element::GMinus(r.s_element.log())),
        s_group: r
            .s_element
            .series()
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(l, c)| IndexedMatrixJson {
                l,
                matrix: const_matrix_to_json(c),
            })
            .collect(),
        r_factors: r
            .r_factors
            .iter()
            .map(|(l, c)| IndexedMatrixJson {
                l: *l,
                matrix: const_matrix_to_json(c),
            })
            .collect(),
        coordinate_map: r
            .coordinate_map
            .as_ref()
            .map(|g: &CoordinateMap| g.components().iter().map(series_to_json).collect()),
        normalized: tower_to_json(&r.normalized),
        log: r
            .log
            .iter()
            .map(|s| StepJson {
                name: s.name.clone(),
                passed: s.report.passed(),
                report: s.report.clone(),
            })
            .collect(),
    }
}

pub fn to_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn from_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))
}

pub fn parse_tower(s: &str) -> Result<Tower> {
    tower_from_json(&from_str(s)?)
}

pub fn parse_a(s: &str) -> Result<AMatrixSeries> {
    a_from_json(&from_str(s)?)
}

pub fn parse_element(s: &str, dim: usize) -> Result<Element> {
    element_from_json(&from_str(s)?, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::series::rat;
    use crate::tower::coordinate_seed;

    #[test]
    fn series_round_trip() {
        let s = Series::from_terms(2, 3, [(&[0u32, 0][..], rat(-3, 4)), (&[1, 2][..], rat(5, 1))]).unwrap();
        let j = series_to_json(&s);
        assert_eq!(j.terms[0].n, "-3");
        assert_eq!(j.terms[0].d, "4");
        assert_eq!(series_from_json(&j).unwrap(), s);
    }

    #[test]
    fn bad_series() {
        let mut j = series_to_json(&Series::one(1, 2));
        j.terms[0].d = "0".into();
        assert!(series_from_json(&j).is_err());
        j.terms[0].d = "1".into();
        j.terms.push(j.terms[0].clone());
        assert!(series_from_json(&j).is_err());
        j.terms.pop();
        j.terms[0].exp = vec![3];
        assert!(series_from_json(&j).is_err());
    }

    #[test]
    fn tower_round_trip() {
        let t = coordinate_seed(2, 2, 3, 3).unwrap();
        let text = to_string(&tower_to_json(&t));
        assert_eq!(parse_tower(&text).unwrap(), t);
        let j = tower_to_json(&t);
        let order: Vec<_> = j.entries.iter().map(|c| (c.a, c.b)).collect();
        assert_eq!(&order[..4], &[(0, 0), (0, 1), (1, 0), (0, 2)]);
        let mut missing = j.clone();
        missing.entries.pop();
        assert!(tower_from_json(&missing).is_err());
    }

    #[test]
    fn element_round_trip() {
        let mut rng = SeededRng::new(3);
        let r = GPlusElement::new(2, [(1, rng.const_matrix(2, 3, 2)), (3, rng.const_matrix(2, 3, 2))]).unwrap();
        let s = GMinusElement::single(2, rng.const_matrix(2, 3, 2)).unwrap();
        let p = GLElement::new(rng.invertible_matrix(2, 3, 1)).unwrap();
        for e in [Element::GPlus(r), Element::GMinus(s), Element::GL(p)] {
            let text = to_string(&element_to_json(&e));
            assert_eq!(parse_element(&text, 2).unwrap(), e);
        }
        let singular = r#"{"kind":"gl","coeffs":[{"l":0,"matrix":{"m":1,"entries":[[{"num_vars":0,"trunc_degree":0,"terms":[]}]]}}]}"#;
        assert!(parse_element(singular, 1).is_err());
    }

    #[test]
    fn a_round_trip() {
        let a = AMatrixSeries::new(vec![ConstMatrix::identity(2), ConstMatrix::from_ints(&[&[1, 2], &[0, -1]])]).unwrap();
        let text = to_string(&a_to_json(&a));
        assert_eq!(parse_a(&text).unwrap(), a);
    }
}
