//! Closed forms for scalar first-order linear recurrences and ODEs with
//! quasipolynomial forcing, by undetermined coefficients.

use num_traits::{One, Zero};

use super::qp::{Base, Quasipolynomial, TimeMonomial};
use crate::error::{Error, Result};
use crate::ring::{binomial, Rational};

// Splits a single-variable quasipolynomial into (base, dense coefficients of
// the polynomial part) pairs. A missing base means the trivial one.
fn split_terms(forcing: &Quasipolynomial, var: usize) -> Result<Vec<(Option<Base>, Vec<Rational>)>> {
    let mut out = Vec::new();
    for (key, poly) in forcing.terms() {
        let base = match key.as_slice() {
            [] => None,
            [(v, b)] if *v == var => Some(b.clone()),
            _ => {
                return Err(Error::VariableMismatch(format!(
                    "forcing must depend on time variable {var} only"
                )))
            }
        };
        let mut coeffs: Vec<Rational> = Vec::new();
        for (mono, c) in poly {
            let e = match mono.as_slice() {
                [] => 0,
                [(v, e)] if *v == var => *e as usize,
                _ => {
                    return Err(Error::VariableMismatch(format!(
                        "forcing must depend on time variable {var} only"
                    )))
                }
            };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rational::zero());
            }
            coeffs[e] = c.clone();
        }
        out.push((base, coeffs));
    }
    Ok(out)
}

fn assemble(var: usize, base: Option<Base>, coeffs: &[Rational]) -> Quasipolynomial {
    let key = base.map(|b| vec![(var, b)]).unwrap_or_default();
    let mut q = Quasipolynomial::default();
    for (i, c) in coeffs.iter().enumerate() {
        let mono: TimeMonomial = if i == 0 { Vec::new() } else { vec![(var, i as u32)] };
        q.add_term(key.clone(), mono, c.clone());
    }
    q
}

/// The unique `q` with `q(0) = init` and `q(t+1) = μ q(t) + forcing(t)`,
/// where `forcing` is a quasipolynomial in the discrete variable `var`.
pub fn solve_discrete_recurrence(
    mu: &Rational,
    forcing: &Quasipolynomial,
    init: &Rational,
    var: usize,
) -> Result<Quasipolynomial> {
    if mu.is_zero() {
        return Err(Error::ZeroMultiplier);
    }
    let mut out = Quasipolynomial::default();
    let mut at_zero = Rational::zero();
    for (base, p) in split_terms(forcing, var)? {
        let nu = match &base {
            None => Rational::one(),
            Some(Base::Discrete(nu)) => nu.clone(),
            Some(Base::Continuous(_)) => {
                return Err(Error::VariableMismatch("continuous forcing in a recurrence".into()))
            }
        };
        let k = p.len();
        let r = if &nu != mu {
            // ν r(t+1) − μ r(t) = p(t), same degree as p
            let mut r = vec![Rational::zero(); k];
            let gap = &nu - mu;
            for i in (0..k).rev() {
                let mut acc = p[i].clone();
                for (j, rj) in r.iter().enumerate().skip(i + 1) {
                    acc -= &nu * binomial(j as u32, i as u32) * rj;
                }
                r[i] = acc / &gap;
            }
            r
        } else {
            // r(t+1) − r(t) = p(t)/μ, one degree higher, r(0) = 0
            let mut r = vec![Rational::zero(); k + 1];
            for i in (0..k).rev() {
                let mut acc = &p[i] / mu;
                for (j, rj) in r.iter().enumerate().skip(i + 2) {
                    acc -= binomial(j as u32, i as u32) * rj;
                }
                r[i + 1] = acc / Rational::from_integer((i + 1).into());
            }
            r
        };
        at_zero += &r[0];
        out += &assemble(var, base, &r);
    }
    let homogeneous = init - at_zero;
    out += &Quasipolynomial::discrete_exp(var, mu.clone()).scale(&homogeneous);
    Ok(out)
}

/// The unique `q` with `q(0) = init` and `q' = λ q + forcing`, where
/// `forcing` is a quasipolynomial in the continuous variable `var`.
pub fn solve_linear_ode(
    lambda: &Rational,
    forcing: &Quasipolynomial,
    init: &Rational,
    var: usize,
) -> Result<Quasipolynomial> {
    let mut out = Quasipolynomial::default();
    let mut at_zero = Rational::zero();
    for (base, p) in split_terms(forcing, var)? {
        let nu = match &base {
            None => Rational::zero(),
            Some(Base::Continuous(nu)) => nu.clone(),
            Some(Base::Discrete(_)) => {
                return Err(Error::VariableMismatch("discrete forcing in a differential equation".into()))
            }
        };
        let k = p.len();
        let r = if &nu != lambda {
            // (ν − λ) r + r' = p
            let gap = &nu - lambda;
            let mut r = vec![Rational::zero(); k];
            for i in (0..k).rev() {
                let mut acc = p[i].clone();
                if i + 1 < k {
                    acc -= Rational::from_integer((i + 1).into()) * &r[i + 1];
                }
                r[i] = acc / &gap;
            }
            r
        } else {
            // r' = p, r(0) = 0
            let mut r = vec![Rational::zero(); k + 1];
            for i in 0..k {
                r[i + 1] = &p[i] / Rational::from_integer((i + 1).into());
            }
            r
        };
        at_zero += &r[0];
        out += &assemble(var, base, &r);
    }
    let homogeneous = init - at_zero;
    out += &Quasipolynomial::continuous_exp(var, lambda.clone()).scale(&homogeneous);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasipoly::{TimeKind, TimeVars};
    use crate::ring::{int, rat};

    fn d(mu: Rational) -> Quasipolynomial {
        Quasipolynomial::discrete_exp(0, mu)
    }

    fn ce(l: Rational) -> Quasipolynomial {
        Quasipolynomial::continuous_exp(0, l)
    }

    fn t() -> Quasipolynomial {
        Quasipolynomial::variable(0)
    }

    fn iterate(mu: &Rational, forcing: &Quasipolynomial, init: &Rational, n: i64) -> Rational {
        let vars = TimeVars::single("t", TimeKind::Discrete);
        let mut x = init.clone();
        for s in 0..n {
            x = mu * &x + forcing.eval_rational(&[int(s)], &vars).unwrap();
        }
        x
    }

    #[test]
    fn recurrence_examples() {
        let zero = Quasipolynomial::default();
        assert_eq!(solve_discrete_recurrence(&int(2), &zero, &int(1), 0).unwrap(), d(int(2)));
        assert_eq!(
            solve_discrete_recurrence(&int(3), &d(int(2)), &int(0), 0).unwrap(),
            d(int(3)) - d(int(2))
        );
        let res = solve_discrete_recurrence(&int(2), &d(int(2)), &int(0), 0).unwrap();
        assert_eq!(res, t() * d(int(2)).scale(&rat(1, 2)));
        let vars = TimeVars::single("t", TimeKind::Discrete);
        for (n, v) in [(1, 1), (2, 4), (3, 12)] {
            assert_eq!(res.eval_rational(&[int(n)], &vars).unwrap(), int(v));
        }
        assert_eq!(solve_discrete_recurrence(&int(0), &zero, &int(1), 0), Err(Error::ZeroMultiplier));
    }

    #[test]
    fn recurrence_matches_iteration_with_polynomial_forcing() {
        let vars = TimeVars::single("t", TimeKind::Discrete);
        let cases = [
            (int(1), t() * t() + Quasipolynomial::one()),
            (rat(1, 2), t() * d(rat(1, 2)) + d(int(3))),
            (int(-2), t() * t() * t() + d(int(-2)).scale(&int(5))),
        ];
        for (mu, forcing) in cases {
            let q = solve_discrete_recurrence(&mu, &forcing, &rat(3, 4), 0).unwrap();
            for n in 0..10 {
                assert_eq!(q.eval_rational(&[int(n)], &vars).unwrap(), iterate(&mu, &forcing, &rat(3, 4), n));
            }
        }
    }

    #[test]
    fn ode_examples() {
        let zero = Rational::zero();
        assert_eq!(solve_linear_ode(&zero, &Quasipolynomial::one(), &zero, 0).unwrap(), t());
        assert_eq!(
            solve_linear_ode(&int(2), &ce(int(1)), &zero, 0).unwrap(),
            ce(int(2)) - ce(int(1))
        );
        assert_eq!(solve_linear_ode(&int(1), &ce(int(1)), &zero, 0).unwrap(), t() * ce(int(1)));
    }

    #[test]
    fn ode_residual_vanishes() {
        let forcing = t() * t() * ce(rat(1, 3)) + t() * ce(int(-1)) + Quasipolynomial::constant(int(7));
        for lambda in [int(0), rat(1, 3), int(-1), int(2)] {
            let q = solve_linear_ode(&lambda, &forcing, &rat(2, 5), 0).unwrap();
            let residual = q.derivative(0).unwrap() - q.scale(&lambda) - forcing.clone();
            assert!(residual.is_zero(), "λ = {lambda}: {residual}");
        }
    }
}
