use std::fmt;

use crate::error::{Error, Result};
use crate::quasipoly::{render_jet, Quasipolynomial, TimeKind, TimeVars};
use crate::ring::parse::{tokenize, Cursor, Token};
use crate::ring::{Coefficient, ExpRational, Rational};

use super::flow::{flow_at, flow_symbolic};
use super::{FormalMap, FormalVectorField};

/// Time of a flow letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowTime {
    Rational(Rational),
    Symbol(String),
}

/// One letter of a group word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Letter {
    /// `F^n` for a map generator.
    Power { name: String, exponent: i64 },
    /// `exp(t v)` for a field generator.
    Flow { field: String, time: FlowTime },
}

/// A product of generator powers and flows, composed left to right as
/// written: `L1 L2 … Lk` denotes `L1 ∘ L2 ∘ … ∘ Lk`.
///
/// ```text
/// word   := letter ("*"? letter)*
/// letter := name ("^" int)? | "exp(" (rational | symbol) "*"? name ")"
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        GroupWord { letters }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut cur = Cursor::new(&tokens, text.len());
        let mut letters = Vec::new();
        loop {
            let at = cur.offset();
            let name = match cur.bump() {
                Some(Token::Ident(n)) => n.clone(),
                _ => return Err(Error::syntax(at, "expected generator name or exp(...)")),
            };
            if name == "exp" && cur.eat(&Token::LParen) {
                let time = match cur.peek() {
                    Some(Token::Ident(s)) => {
                        let s = s.clone();
                        cur.bump();
                        FlowTime::Symbol(s)
                    }
                    _ => FlowTime::Rational(cur.rational()?),
                };
                cur.eat(&Token::Star);
                let at = cur.offset();
                let field = match cur.bump() {
                    Some(Token::Ident(n)) => n.clone(),
                    _ => return Err(Error::syntax(at, "expected vector field name")),
                };
                cur.expect(&Token::RParen, "')'")?;
                letters.push(Letter::Flow { field, time });
            } else {
                let exponent = if cur.eat(&Token::Caret) { cur.small_int()? } else { 1 };
                letters.push(Letter::Power { name, exponent });
            }
            if cur.at_end() {
                break;
            }
            cur.eat(&Token::Star);
        }
        Ok(GroupWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// True when some flow letter has a symbolic time.
    pub fn is_symbolic(&self) -> bool {
        self.letters
            .iter()
            .any(|l| matches!(l, Letter::Flow { time: FlowTime::Symbol(_), .. }))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| match l {
                Letter::Power { name, exponent: 1 } => name.clone(),
                Letter::Power { name, exponent } => format!("{name}^{exponent}"),
                Letter::Flow {
                    field,
                    time: FlowTime::Rational(q),
                } => format!("exp({q} {field})"),
                Letter::Flow {
                    field,
                    time: FlowTime::Symbol(s),
                } => format!("exp({s} {field})"),
            })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

/// Named map and field generators sharing one dimension.
#[derive(Clone, Debug, Default)]
pub struct Generators {
    maps: Vec<(String, FormalMap)>,
    fields: Vec<(String, FormalVectorField)>,
}

impl Generators {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_new(&self, name: &str, dim: usize) -> Result<()> {
        if self.map(name).is_some() || self.field(name).is_some() {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if let Some(d) = self.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch { left: d, right: dim });
            }
        }
        Ok(())
    }

    pub fn add_map(&mut self, name: &str, map: FormalMap) -> Result<()> {
        self.check_new(name, map.dim())?;
        self.maps.push((name.to_string(), map));
        Ok(())
    }

    pub fn add_field(&mut self, name: &str, field: FormalVectorField) -> Result<()> {
        self.check_new(name, field.dim())?;
        self.fields.push((name.to_string(), field));
        Ok(())
    }

    pub fn dim(&self) -> Option<usize> {
        self.maps
            .first()
            .map(|(_, m)| m.dim())
            .or_else(|| self.fields.first().map(|(_, f)| f.dim()))
    }

    pub fn map(&self, name: &str) -> Option<&FormalMap> {
        self.maps.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn field(&self, name: &str) -> Option<&FormalVectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn maps(&self) -> &[(String, FormalMap)] {
        &self.maps
    }

    pub fn fields(&self) -> &[(String, FormalVectorField)] {
        &self.fields
    }

    /// The map named `name`, or an error naming what went wrong.
    pub fn require_map(&self, name: &str) -> Result<&FormalMap> {
        match (self.map(name), self.field(name)) {
            (Some(m), _) => Ok(m),
            (None, Some(_)) => Err(Error::WrongGeneratorKind {
                name: name.to_string(),
                expected: "map",
            }),
            (None, None) => Err(Error::UnknownGenerator(name.to_string())),
        }
    }

    /// The field named `name`, or an error naming what went wrong.
    pub fn require_field(&self, name: &str) -> Result<&FormalVectorField> {
        match (self.field(name), self.map(name)) {
            (Some(f), _) => Ok(f),
            (None, Some(_)) => Err(Error::WrongGeneratorKind {
                name: name.to_string(),
                expected: "vector field",
            }),
            (None, None) => Err(Error::UnknownGenerator(name.to_string())),
        }
    }
}

/// A group element in the smallest coefficient domain that holds it.
#[derive(Clone, Debug, PartialEq)]
pub enum WordMap {
    Rational(FormalMap),
    /// Needed once a flow with nonzero eigenvalues runs for a nonzero time.
    Extended(FormalMap<ExpRational>),
    /// Coefficients depend on symbolic flow times.
    Symbolic { map: FormalMap<Quasipolynomial>, vars: TimeVars },
}

impl WordMap {
    /// `self ∘ other`, promoting to a common domain.
    pub fn compose(self, other: WordMap) -> Result<WordMap> {
        use WordMap::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Rational(a.compose(&b)?),
            (Extended(a), Extended(b)) => Extended(a.compose(&b)?),
            (Rational(a), Extended(b)) => Extended(a.map_coeffs(ExpRational::from_rational).compose(&b)?),
            (Extended(a), Rational(b)) => Extended(a.compose(&b.map_coeffs(ExpRational::from_rational))?),
            (Symbolic { map: a, vars }, Symbolic { map: b, .. }) => Symbolic {
                map: a.compose(&b)?,
                vars,
            },
            (Rational(a), Symbolic { map: b, vars }) => Symbolic {
                map: a.map_coeffs(Quasipolynomial::from_rational).compose(&b)?,
                vars,
            },
            (Symbolic { map: a, vars }, Rational(b)) => Symbolic {
                map: a.compose(&b.map_coeffs(Quasipolynomial::from_rational))?,
                vars,
            },
            (Extended(_), Symbolic { .. }) | (Symbolic { .. }, Extended(_)) => {
                return Err(Error::Unsupported(
                    "a word cannot mix symbolic flow times with flows of nonzero eigenvalues at fixed times".into(),
                ))
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            WordMap::Rational(m) => m.is_identity(),
            WordMap::Extended(m) => m.is_identity(),
            WordMap::Symbolic { map, .. } => map.is_identity(),
        }
    }

    /// Components rendered with the given space variable names.
    pub fn render(&self, names: &[String]) -> Vec<String> {
        match self {
            WordMap::Rational(m) => m.render(names),
            WordMap::Extended(m) => m.render(names),
            WordMap::Symbolic { map, vars } => map.components().iter().map(|c| render_jet(c, names, vars)).collect(),
        }
    }
}

/// Evaluates a word at truncation order `order`.
///
/// Generators are treated as polynomials and re-truncated to `order`.
/// Symbolic flow times become continuous time variables, numbered in order of
/// first appearance.
pub fn word_to_map(word: &GroupWord, generators: &Generators, order: u32) -> Result<WordMap> {
    let dim = generators
        .dim()
        .ok_or_else(|| Error::UnknownGenerator(word.to_string()))?;
    let mut vars = TimeVars::new();
    let mut pieces = Vec::with_capacity(word.letters.len());
    for letter in &word.letters {
        let piece = match letter {
            Letter::Power { name, exponent } => {
                let map = generators.require_map(name)?.with_order(order);
                WordMap::Rational(map.power_signed(*exponent)?)
            }
            Letter::Flow { field, time } => {
                let v = generators.require_field(field)?.with_order(order);
                match time {
                    FlowTime::Rational(t) => flow_at(&v, t)?,
                    FlowTime::Symbol(s) => {
                        let var = vars.get_or_insert(s, TimeKind::Continuous)?;
                        WordMap::Symbolic {
                            map: flow_symbolic(&v, var)?,
                            vars: TimeVars::new(),
                        }
                    }
                }
            }
        };
        pieces.push(piece);
    }
    let mut acc = WordMap::Rational(FormalMap::identity(dim, order));
    for p in pieces {
        acc = acc.compose(p)?;
    }
    if let WordMap::Symbolic { map, .. } = acc {
        acc = WordMap::Symbolic { map, vars };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_polynomial, rat};

    fn gens() -> Generators {
        let n1 = vec!["x".to_string()];
        let mut g = Generators::new();
        g.add_map("F", FormalMap::new(vec![parse_polynomial("x + x^2", &n1, 2).unwrap()]).unwrap())
            .unwrap();
        g
    }

    #[test]
    fn parse_words() {
        let w = GroupWord::parse("F^2 * exp(1/2 v) G^-1 exp(t w)").unwrap();
        assert_eq!(
            w.letters(),
            &[
                Letter::Power {
                    name: "F".into(),
                    exponent: 2
                },
                Letter::Flow {
                    field: "v".into(),
                    time: FlowTime::Rational(rat(1, 2))
                },
                Letter::Power {
                    name: "G".into(),
                    exponent: -1
                },
                Letter::Flow {
                    field: "w".into(),
                    time: FlowTime::Symbol("t".into())
                },
            ]
        );
        assert!(w.is_symbolic());
        assert_eq!(GroupWord::parse(&w.to_string()).unwrap(), w);
        assert!(GroupWord::parse("F^").is_err());
        assert!(GroupWord::parse("exp(1/2 v").is_err());
        assert!(GroupWord::parse("").is_err());
    }

    #[test]
    fn evaluate_words() {
        let g = gens();
        let w = word_to_map(&GroupWord::parse("F^2").unwrap(), &g, 2).unwrap();
        let n1 = vec!["x".to_string()];
        let expect = FormalMap::new(vec![parse_polynomial("x + 2x^2", &n1, 2).unwrap()]).unwrap();
        assert_eq!(w, WordMap::Rational(expect));
        assert!(word_to_map(&GroupWord::parse("F^-1 F").unwrap(), &g, 4).unwrap().is_identity());
        assert_eq!(
            word_to_map(&GroupWord::parse("H").unwrap(), &g, 2),
            Err(Error::UnknownGenerator("H".into()))
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut g = gens();
        let n1 = vec!["x".to_string()];
        let dup = FormalMap::new(vec![parse_polynomial("2x", &n1, 2).unwrap()]).unwrap();
        assert_eq!(g.add_map("F", dup), Err(Error::DuplicateName("F".into())));
    }
}
