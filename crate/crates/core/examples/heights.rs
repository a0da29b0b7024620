//! Heights of field elements and projective points over Q and F_3(T).

use invsieve::field::{product_formula_holds, support, Fraction, FunctionField, GlobalField, Rationals};
use invsieve::heights::{height_projective_fractions, height_scalar, HeightValue};
use num_bigint::BigInt;

fn main() {
    let q = Rationals::new();
    let x = Fraction::new(&q, BigInt::from(-12), BigInt::from(35)).unwrap();
    println!("H(-12/35) = {}", height_scalar(&q, &x));
    println!("places of -12/35: {}", support(&q, &x).unwrap().len());
    println!("product formula: {}", product_formula_holds(&q, &x).unwrap());

    let p = [x.clone(), Fraction::new(&q, BigInt::from(5), BigInt::from(7)).unwrap()];
    println!("H(-12/35 : 5/7) = {}", height_projective_fractions(&q, &p).unwrap());

    let k = FunctionField::new(3).unwrap();
    let num = k.parse_poly_str("T^2 + 2").unwrap();
    let den = k.parse_poly_str("T^3 + 2T + 1").unwrap();
    let y = Fraction::new(&k, num, den).unwrap();
    println!("H((T^2+2)/(T^3+2T+1)) over F_3(T) = {}", height_scalar(&k, &y));

    for n in [10i64, 100] {
        let b = HeightValue::from_int(n);
        println!("|[{n}]| over Q: {}, over F_3[T]: {}", q.box_count(&b), k.box_count(&b));
    }
}
