//! Closed-form automorphism group orders.

use crate::error::{Error, Result};
use crate::ff::Field;
use crate::ospace::Space;

/// A closed-form order together with whether its hypotheses hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaValue {
    pub order: u128,
    /// `false` when the formula is evaluated outside the hypotheses under
    /// which it was derived (`δ = 2` with `-1` a non-square).
    pub covered: bool,
}

fn overflow() -> Error {
    Error::Overflow("automorphism order formula")
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn pow(q: u128, k: usize) -> Result<u128> {
    q.checked_pow(k as u32).ok_or_else(overflow)
}

/// `Π_{i=lo}^{hi} (q^i + sign)`.
fn product(q: u128, lo: usize, hi: usize, plus: bool) -> Result<u128> {
    (lo..=hi).try_fold(1u128, |acc, i| {
        let t = pow(q, i)?;
        mul(acc, if plus { t + 1 } else { t - 1 })
    })
}

/// `|Aut(Oi(2ν+δ, q))|` from the closed forms:
///
/// * `ν = 1, δ = 0`: `2^{(q+1)/2} ((q-1)/2)!`
/// * `ν ≥ 2, δ = 0`: `q^{ν(ν-1)} Π_{i=1}^{ν}(q^i-1) Π_{i=1}^{ν-1}(q^i+1) e`
/// * `ν ≥ 2, δ = 1`: `q^{ν²} Π_{i=1}^{ν}(q^i-1) Π_{i=1}^{ν}(q^i+1) e`
/// * `ν ≥ 2, δ = 2`: `½ q^{ν(ν+1)} Π_{i=1}^{ν}(q^i-1) Π_{i=1}^{ν+1}(q^i+1) e`
///
/// For `δ ≤ 1` the value is halved when `-1` is a square. Here `e` is the
/// degree of `F_q` over its prime field.
pub fn aut_order_formula(nu: usize, delta: usize, field: &Field) -> Result<FormulaValue> {
    let q = field.order() as u128;
    let e = field.degree() as u128;
    let minus_one_square = field.minus_one_is_square();
    let halve = |x: u128| x / 2;
    match (nu, delta) {
        (1, 0) => {
            let h = ((q - 1) / 2) as usize;
            let fact = (1..=h as u128).try_fold(1u128, |acc, i| mul(acc, i))?;
            Ok(FormulaValue { order: mul(pow(2, h + 1)?, fact)?, covered: true })
        }
        (nu, 0) if nu >= 2 => {
            let v = mul(mul(mul(pow(q, nu * (nu - 1))?, product(q, 1, nu, false)?)?, product(q, 1, nu - 1, true)?)?, e)?;
            Ok(FormulaValue { order: if minus_one_square { halve(v) } else { v }, covered: true })
        }
        (nu, 1) if nu >= 2 => {
            let v = mul(mul(mul(pow(q, nu * nu)?, product(q, 1, nu, false)?)?, product(q, 1, nu, true)?)?, e)?;
            Ok(FormulaValue { order: if minus_one_square { halve(v) } else { v }, covered: true })
        }
        (nu, 2) if nu >= 2 => {
            let v = mul(mul(mul(pow(q, nu * (nu + 1))?, product(q, 1, nu, false)?)?, product(q, 1, nu + 1, true)?)?, e)?;
            Ok(FormulaValue { order: halve(v), covered: minus_one_square })
        }
        _ => Err(Error::Uncovered(format!("ν = {nu}, δ = {delta}"))),
    }
}

/// Order of the group of semilinear maps fixing every standard basis vertex:
/// `(q-1)/2 · (q-1)^{ν-1} · 2^δ · e / |K|`, where `|K| = 2` exactly when
/// `-1` is a square (then `-I` lies in the parameter group and acts
/// trivially).
pub fn e_subgroup_order(space: &Space) -> Result<u128> {
    let nu = space.nu();
    if nu < 2 {
        return Err(Error::InvalidSpace(format!("needs ν ≥ 2, got ν = {nu}")));
    }
    let f = space.field();
    let q = f.order() as u128;
    let params = mul(mul(mul((q - 1) / 2, pow(q - 1, nu - 1)?)?, pow(2, space.delta())?)?, f.degree() as u128)?;
    let kernel = if f.minus_one_is_square() { 2 } else { 1 };
    Ok(params / kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ospace::Disc;
    use std::sync::Arc;

    fn field(p: u32, e: u32) -> Field {
        Field::new(p, e, None).unwrap()
    }

    #[test]
    fn plane_formula() {
        assert_eq!(aut_order_formula(1, 0, &field(3, 1)).unwrap().order, 4);
        assert_eq!(aut_order_formula(1, 0, &field(5, 1)).unwrap().order, 16);
        assert_eq!(aut_order_formula(1, 0, &field(3, 2)).unwrap().order, 768);
    }

    #[test]
    fn higher_rank_formulas() {
        assert_eq!(aut_order_formula(2, 0, &field(3, 1)).unwrap().order, 576);
        assert_eq!(aut_order_formula(2, 1, &field(3, 1)).unwrap().order, 51840);
        // -1 is a square in F_5: halved
        assert_eq!(aut_order_formula(2, 0, &field(5, 1)).unwrap().order, 25 * 4 * 24 * 6 / 2);
        let d2 = aut_order_formula(2, 2, &field(3, 1)).unwrap();
        assert!(!d2.covered);
        assert_eq!(d2.order, 729 * 2 * 8 * 4 * 10 * 28 / 2);
        assert!(aut_order_formula(2, 2, &field(5, 1)).unwrap().covered);
    }

    #[test]
    fn uncovered_combinations() {
        for (nu, delta) in [(1, 1), (1, 2), (0, 2)] {
            assert!(matches!(aut_order_formula(nu, delta, &field(3, 1)), Err(Error::Uncovered(_))));
        }
    }

    #[test]
    fn e_orders() {
        let sp = Space::new(2, 0, Disc::None, Arc::new(field(3, 1))).unwrap();
        assert_eq!(e_subgroup_order(&sp).unwrap(), 2);
        let sp = Space::new(2, 0, Disc::None, Arc::new(field(3, 2))).unwrap();
        assert_eq!(e_subgroup_order(&sp).unwrap(), 32);
        let sp = Space::new(1, 1, Disc::One, Arc::new(field(3, 1))).unwrap();
        assert!(e_subgroup_order(&sp).is_err());
    }
}
