fn main() {
    let z = 18.64658715187578f64;
    for n in [17u32, 18, 19, 20] {
        println!("{} {:.17e}", n, zaremba::specfun::bessel_i_half_scaled(n, z));
    }
}
