use num_traits::{Signed, Zero};

use super::base::{h_point, hprime_point, p_point, poly_derivative, poly_eval, pprime_point, r_coefficients};
use super::cantor::{locate, Location, MAX_TERNARY_STEPS};
use super::norms::universal_cantor_bounds;
use super::westrick::{locate_westrick, westrick_interval};
use super::{FuncError, FuncExpr};
use crate::rigor::{bits_for, int, pow2, rat, Rational, RInterval};
use crate::tree::{SubtreeRef, TreeSchema};

/// Smallest tolerance honoured; requests below it are served at this width.
pub const MIN_EPS_BITS: u32 = 100;

pub fn min_eps() -> Rational {
    pow2(-(MIN_EPS_BITS as i64))
}

fn check(x: &Rational, eps: &Rational) -> Result<Rational, FuncError> {
    if x.is_negative() || x > &int(1) {
        return Err(FuncError::OutOfDomain(x.to_string()));
    }
    assert!(eps.is_positive(), "tolerance must be positive");
    Ok(eps.clone().max(min_eps()))
}

fn finish(v: RInterval, eps: &Rational) -> RInterval {
    if v.is_point() {
        v
    } else {
        v.round_out(bits_for(eps) + 2)
    }
}

/// Enclosure of `f(x)` of width at most `eps` (or [`min_eps`]).
pub fn eval(f: &FuncExpr, x: &Rational, eps: &Rational) -> Result<RInterval, FuncError> {
    let eps = check(x, eps)?;
    Ok(finish(enclose(f, x, &(&eps / int(2)), false)?, &eps))
}

/// Enclosure of `f'(x)` of width at most `eps` (or [`min_eps`]). At the
/// ends of a scaled copy where the one-sided derivatives may differ, the
/// enclosure covers both.
pub fn eval_deriv(f: &FuncExpr, x: &Rational, eps: &Rational) -> Result<RInterval, FuncError> {
    let eps = check(x, eps)?;
    Ok(finish(enclose(f, x, &(&eps / int(2)), true)?, &eps))
}

fn enclose(f: &FuncExpr, x: &Rational, eps: &Rational, deriv: bool) -> Result<RInterval, FuncError> {
    Ok(match f {
        FuncExpr::Zero => RInterval::zero(),
        FuncExpr::BaseP => {
            if deriv {
                pprime_point(x, eps)
            } else {
                p_point(x, eps)
            }
        }
        FuncExpr::BaseR => RInterval::point(poly_value(&r_coefficients(), x, deriv)),
        FuncExpr::Poly { coeffs } => RInterval::point(poly_value(coeffs, x, deriv)),
        FuncExpr::SinSqExample => {
            if deriv {
                hprime_point(x, eps)
            } else {
                h_point(x, eps)
            }
        }
        FuncExpr::Scaled { a, b, factor, inner } => {
            if x < a || x > b || factor.is_zero() {
                return Ok(RInterval::zero());
            }
            let len = b - a;
            let u = (x - a) / &len;
            if deriv {
                let d = enclose(inner, &u, &(eps / factor.abs()), true)?.scale(factor);
                if x == a || x == b {
                    d.hull(&RInterval::zero())
                } else {
                    d
                }
            } else {
                enclose(inner, &u, &(eps / factor.abs() / &len), false)?.scale(&(factor * &len))
            }
        }
        FuncExpr::Sum { terms } => {
            let share = eps / int(terms.len().max(1) as i64);
            let mut acc = RInterval::zero();
            for t in terms {
                acc = acc + enclose(t, x, &share, deriv)?;
            }
            acc
        }
        FuncExpr::TreeSumCantor { tree } => cantor_sum(tree, x, eps, deriv)?,
        FuncExpr::TreeSumWestrick { tree } => RInterval::point(westrick_sum(tree, x, deriv)),
    })
}

fn poly_value(coeffs: &[Rational], x: &Rational, deriv: bool) -> Rational {
    if deriv {
        poly_eval(&poly_derivative(coeffs), x)
    } else {
        poly_eval(coeffs, x)
    }
}

/// `y_T(x)` or `y_T'(x)`, following the unique chain of gaps containing `x`.
///
/// Level `k` contributes `s_k·p(u_k)` (values, `s_k = Π ¼|I|`) or
/// `4^{-k}·p'(u_k)` (derivatives); the chain stops at an empty subtree, a
/// leaf, a Cantor point, or once the certified tail bound drops below the
/// budget.
fn cantor_sum(tree: &TreeSchema, x: &Rational, eps: &Rational, deriv: bool) -> Result<RInterval, FuncError> {
    let (ysup, yder) = universal_cantor_bounds();
    // terms use at most eps/4 in total; the truncation ball at most eps/2
    let budget = eps / int(4);
    let mut cur = SubtreeRef::new(tree);
    let mut u = x.clone();
    let mut scale = int(1);
    let mut acc = RInterval::zero();
    let mut k: i64 = 0;
    while !cur.is_empty() {
        let term_tol = &budget * pow2(-(k + 1)) / &scale;
        let term = if deriv { pprime_point(&u, &term_tol) } else { p_point(&u, &term_tol) };
        acc = acc + term.scale(&scale);
        if cur.is_leaf() {
            break;
        }
        // Whatever gap holds u, the deeper levels add at most this much.
        let tail = if deriv { &scale * rat(1, 4) * &yder } else { &scale * rat(1, 12) * &ysup };
        if tail <= budget {
            return Ok(acc.inflate(&tail));
        }
        match locate(&u, MAX_TERNARY_STEPS) {
            Location::Cantor => break,
            Location::Unresolved { .. } => {
                if deriv {
                    return Err(FuncError::Unresolved(format!("Cantor membership of {x}")));
                }
                // No gap above level 64: the next gap is shorter than 2^{-64}.
                return Ok(acc.inflate(&(&scale * pow2(-64) * &ysup)));
            }
            loc @ Location::Gap { .. } => {
                let idx = loc.index();
                let Location::Gap { level, u: v, .. } = loc else { unreachable!() };
                cur = cur.child(idx);
                scale = if deriv {
                    scale * rat(1, 4)
                } else {
                    scale * rat(1, 4) / num_traits::pow(int(3), level as usize + 1)
                };
                u = v;
                k += 1;
            }
        }
    }
    Ok(acc)
}

/// `g_T(x)` or `g_T'(x)`, exactly: `r` is polynomial and the interval chain
/// containing a rational point is finite.
fn westrick_sum(tree: &TreeSchema, x: &Rational, deriv: bool) -> Rational {
    let r = r_coefficients();
    let mut cur = SubtreeRef::new(tree);
    let mut u = x.clone();
    let mut scale = int(1);
    let mut acc = Rational::zero();
    while !cur.is_empty() {
        acc += &scale * poly_value(&r, &u, deriv);
        if cur.is_leaf() {
            break;
        }
        let Some((n, v)) = locate_westrick(&u) else { break };
        cur = cur.child(Some(n as u64));
        if !deriv {
            let (a, b) = westrick_interval(n);
            scale *= b - a;
        }
        u = v;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::super::{cantor_interval, scale as scale_expr};
    use super::*;
    use crate::rigor::{half_pi, sin_point, to_f64, xbar_fine};

    fn t(s: &str) -> TreeSchema {
        s.parse().unwrap()
    }

    #[test]
    fn empty_tree_is_zero() {
        let f = FuncExpr::cantor(TreeSchema::Empty);
        for x in [int(0), rat(1, 3), rat(5, 7), int(1)] {
            assert_eq!(eval(&f, &x, &pow2(-10)).unwrap(), RInterval::zero());
            assert_eq!(eval_deriv(&f, &x, &pow2(-10)).unwrap(), RInterval::zero());
        }
    }

    #[test]
    fn root_vanishes_at_ends() {
        let f = FuncExpr::cantor(TreeSchema::root());
        for x in [int(0), int(1)] {
            assert!(eval(&f, &x, &pow2(-20)).unwrap().contains_zero());
            assert!(eval_deriv(&f, &x, &pow2(-20)).unwrap().contains_zero());
        }
        let g = FuncExpr::cantor(t("(~(~()))"));
        assert!(eval_deriv(&g, &int(0), &pow2(-20)).unwrap().contains_zero());
    }

    #[test]
    fn root_at_half_is_plateau_value() {
        let f = FuncExpr::cantor(TreeSchema::root());
        let e = pow2(-20);
        let v = eval(&f, &rat(1, 2), &e).unwrap();
        assert!(v.width() <= e);
        // independent: x̄² sin(1/x̄) in floating point from the x̄ enclosure
        let xb = to_f64(&xbar_fine().mid());
        let expect = xb * xb * (1.0 / xb).sin();
        let (lo, hi) = v.to_f64_pair();
        assert!(lo - 1e-15 <= expect && expect <= hi + 1e-15);
        assert!(eval_deriv(&f, &rat(1, 2), &e).unwrap().contains_zero());
    }

    #[test]
    fn sinsq_derivative_at_inverse_pi() {
        let e = pow2(-20);
        // 1/π is irrational; bracket it with rationals and use continuity.
        let x = half_pi().recip().unwrap().scale(&rat(1, 2)).mid();
        let d = eval_deriv(&FuncExpr::SinSqExample, &x, &e).unwrap();
        assert!(d.width() <= e);
        assert!(d.inflate(&pow2(-100)).contains(&int(1)) || (to_f64(&d.mid()) - 1.0).abs() < 1e-9);
        let v = eval(&FuncExpr::SinSqExample, &rat(1, 2), &e).unwrap();
        let expect = sin_point(&int(2), &pow2(-40)).scale(&rat(1, 4));
        assert!(v.intersects(&expect));
    }

    #[test]
    fn scaled_copies() {
        let e = pow2(-30);
        let f = scale_expr(FuncExpr::BaseP, rat(1, 3), rat(2, 3), rat(1, 4)).unwrap();
        let v = eval(&f, &rat(1, 2), &e).unwrap();
        let direct = eval(&FuncExpr::BaseP, &rat(1, 2), &e).unwrap().scale(&rat(1, 12));
        assert!(v.intersects(&direct));
        assert!(eval(&f, &rat(1, 3), &e).unwrap().contains_zero());
        assert_eq!(eval(&f, &rat(1, 5), &e).unwrap(), RInterval::zero());
        assert_eq!(eval(&f, &rat(4, 5), &e).unwrap(), RInterval::zero());
    }

    #[test]
    fn cantor_sum_matches_explicit_expansion() {
        // y_{(~())} = p + ¼ Σ_n p[I_n]; check at a point in I_1.
        let f = FuncExpr::cantor(t("(~())"));
        let (a, b) = cantor_interval(1);
        let x = (&a * int(3) + &b * int(2)) / int(5);
        let e = pow2(-30);
        let u = (&x - &a) / (&b - &a);
        let expect = &p_point(&x, &pow2(-40))
            + &p_point(&u, &pow2(-40)).scale(&(rat(1, 4) * (&b - &a)));
        assert!(eval(&f, &x, &e).unwrap().intersects(&expect));
        let dexpect = &pprime_point(&x, &pow2(-40)) + &pprime_point(&u, &pow2(-40)).scale(&rat(1, 4));
        assert!(eval_deriv(&f, &x, &e).unwrap().intersects(&dexpect));
    }

    #[test]
    fn ladders_evaluate_with_truncation() {
        let f = FuncExpr::cantor(t("(^())"));
        let e = pow2(-24);
        for x in [rat(1, 2), rat(1, 7), rat(40, 81), rat(1, 4)] {
            let v = eval(&f, &x, &e).unwrap();
            assert!(v.width() <= e, "{x}");
            let d = eval_deriv(&f, &x, &e).unwrap();
            assert!(d.width() <= e, "{x}");
        }
    }

    #[test]
    fn westrick_is_exact_and_vanishes_at_ends() {
        let f = FuncExpr::westrick(t("(~(~()))"));
        for x in [int(0), int(1)] {
            assert_eq!(eval(&f, &x, &pow2(-10)).unwrap(), RInterval::zero());
            assert_eq!(eval_deriv(&f, &x, &pow2(-10)).unwrap(), RInterval::zero());
        }
        assert_eq!(eval(&f, &rat(1, 2), &pow2(-10)).unwrap(), RInterval::point(rat(1, 2)));
        let (a, b) = westrick_interval(2);
        let mid = (&a + &b) / int(2);
        let v = eval(&f, &mid, &pow2(-10)).unwrap();
        assert!(v.is_point());
        let expect = poly_eval(&r_coefficients(), &mid) + (&b - &a) * rat(1, 2);
        assert_eq!(v.lo, expect);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(eval(&FuncExpr::BaseP, &rat(3, 2), &pow2(-5)), Err(FuncError::OutOfDomain(_))));
        assert!(eval_deriv(&FuncExpr::BaseP, &rat(-1, 2), &pow2(-5)).is_err());
    }

    #[test]
    fn difference_quotients_agree_with_derivative() {
        let funcs = [
            FuncExpr::BaseP,
            FuncExpr::SinSqExample,
            FuncExpr::cantor(t("(~())")),
            FuncExpr::cantor(t("(() ~(~()))")),
            FuncExpr::westrick(t("(~())")),
        ];
        let e = pow2(-40);
        for f in &funcs {
            for x in [rat(2, 5), rat(1, 2), rat(3, 5), rat(5, 9)] {
                let h = pow2(-20);
                let q = (&eval(f, &(&x + &h), &e).unwrap() - &eval(f, &x, &e).unwrap()).scale(&h.recip());
                let d = eval_deriv(f, &x, &e).unwrap();
                // second derivatives here are below 2^10, so the slack is 2^{-10}
                assert!(q.inflate(&pow2(-8)).intersects(&d), "{f:?} at {x}: {} vs {}", to_f64(&q.mid()), to_f64(&d.mid()));
            }
        }
    }

    #[test]
    fn finer_tolerance_nests() {
        let f = FuncExpr::cantor(t("(~(~()))"));
        for x in [rat(1, 2), rat(2, 7), rat(13, 27)] {
            let coarse = eval(&f, &x, &pow2(-16)).unwrap();
            let fine = eval(&f, &x, &pow2(-32)).unwrap();
            assert!(fine.subset_of(&coarse.inflate(&pow2(-32))));
            assert!(fine.width() <= pow2(-32));
        }
    }
}
