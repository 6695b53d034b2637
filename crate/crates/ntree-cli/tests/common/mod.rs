//! Seeded corpus shared by the integration targets.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ntree::SparsePoly;

#[derive(Debug, Clone)]
pub struct Member {
    pub name: String,
    pub text: String,
    pub dim: usize,
    pub f: SparsePoly,
}

pub fn member(name: &str, text: &str, dim: usize) -> Member {
    let f = SparsePoly::parse(text, dim).unwrap_or_else(|e| panic!("{name}: {e}"));
    Member { name: name.to_string(), text: text.to_string(), dim, f }
}

pub const SECTION_TWIN_F1: &str = "((z^3 - x1^2)^2 + x1^25*x2^11)*((z^3 - x1^4)^2 + x1^25*x2^5)";
pub const SECTION_TWIN_F2: &str = "((z^3 - x1^2)^2 + x1^25*x2^5)*((z^3 - x1^4)^2 + x1^25*x2^11)";
pub const CURVE_TWIN_F1: &str = "((z^2 - x1^3*x2)^2 + x1^5*x2^3*z)*((z^2 - x1^3*x2^4)^2 + x1^6*x2^9*z)";
pub const CURVE_TWIN_F2: &str = "((z^2 - x1^3*x2^4)^2 + x1^5*x2^9*z)*((z^2 - x1^3*x2)^2 + x1^6*x2^3*z)";

/// Named examples: twin pairs with equal sections, towers, the `z^n - x1 x2` family and controls.
pub fn named() -> Vec<Member> {
    let mut out = vec![
        member("section twins f1", SECTION_TWIN_F1, 2),
        member("section twins f2", SECTION_TWIN_F2, 2),
        member("curve twins f1", CURVE_TWIN_F1, 2),
        member("curve twins f2", CURVE_TWIN_F2, 2),
        member("three cusps", "(z^2 - x1^3*x2)*(z^2 - x1^3*x2^4)*(z^2 - x1^5*x2^6)", 2),
        member("septic tower", "((z^7 - x1^2*x2^3)^2 - x1^5*x2^6)^2 + x1^11*x2^13", 2),
        member("sextic tower", "(z^2 - x1^2*x2^3)^6 + (z^2 - x1^2*x2^3)^3*x1^7*x2^9 + x1^15*x2^19", 2),
        member("cusp", "z^2 - x1^3", 1),
        member("node", "z^2 - x1*x2", 2),
        member("two-variable cusp", "z^2 - x1^2*x2^3", 2),
        member("tower 20", "(z^2 - x1^3)^2 - x1^7", 1),
        member("tower 23", "(z^2 - x1^3)^2 - x1^7*z", 1),
        member("tower (14,22)", "(z^2 - x1^2*x2^3)^2 - x1^5*x2^8", 2),
        member("cusp product", "(z^2 - x1^3)*(z^3 - x1^2)", 1),
        member("equal cusps", "(z^2 - x1^3)*(z^2 - 2*x1^3)", 1),
        member("hidden shift", "(z - x1)^2 - x2^5", 2),
        member("control z^2 - x1^3 - x2^3", "z^2 - x1^3 - x2^3", 2),
        member("control z^2 - x1^2 - x2^2", "z^2 - x1^2 - x2^2", 2),
        member("non-reduced square", "(z^2 - x1^3)^2", 1),
        member("non-reduced product", "(z - x1)^2*(z + x2)", 2),
        member("non-reduced tower", "(z^2 - x1*x2^3)^3", 2),
    ];
    for n in 2..=6 {
        out.push(member(&format!("f_{n}"), &format!("z^{n} - x1*x2"), 2));
    }
    out
}

const MUS: [i64; 7] = [1, -1, 4, 9, -8, 16, 64];

fn monomial(rng: &mut ChaCha8Rng, dim: usize, lo: u32, hi: u32) -> String {
    loop {
        let e: Vec<u32> = (0..dim).map(|_| rng.gen_range(lo..=hi)).collect();
        if e.iter().any(|&a| a > 0) {
            let parts: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(k, &a)| if a == 1 { format!("x{}", k + 1) } else { format!("x{}^{a}", k + 1) })
                .collect();
            return parts.join("*");
        }
    }
}

fn signed(c: i64, rest: &str) -> String {
    match c {
        1 => format!(" - {rest}"),
        -1 => format!(" + {rest}"),
        c if c > 0 => format!(" - {c}*{rest}"),
        c => format!(" + {}*{rest}", -c),
    }
}

/// `z^p - s^p x^a`, so that the first face has a rational root.
pub fn binomial(rng: &mut ChaCha8Rng, dim: usize, p: u32) -> String {
    let mu = [1i64, -1, 2, -2, 3].choose(rng).unwrap().pow(p);
    let zp = if p == 1 { "z".to_string() } else { format!("z^{p}") };
    format!("({zp}{})", signed(mu, &monomial(rng, dim, 0, 5)))
}

/// `(z^p - mu x^a)^m + nu x^b z^c` with `c < p`.
pub fn tower(rng: &mut ChaCha8Rng, dim: usize) -> String {
    let p = rng.gen_range(2..=3u32);
    let m = if p == 2 { rng.gen_range(2..=4u32) } else { 2 };
    let base = binomial(rng, dim, p);
    let nu = *MUS.choose(rng).unwrap();
    let c = rng.gen_range(0..p);
    let tail = match c {
        0 => monomial(rng, dim, 3, 12),
        1 => format!("{}*z", monomial(rng, dim, 3, 12)),
        c => format!("{}*z^{c}", monomial(rng, dim, 3, 12)),
    };
    format!("{base}^{m}{}", signed(nu, &tail))
}

/// A product of one to three binomials, of z-degree at most 8.
pub fn product(rng: &mut ChaCha8Rng, dim: usize) -> String {
    let k = rng.gen_range(1..=3);
    let mut left = 8u32;
    let mut factors = Vec::new();
    for _ in 0..k {
        if left < 1 {
            break;
        }
        let p = rng.gen_range(1..=left.min(3));
        left -= p;
        factors.push(binomial(rng, dim, p));
    }
    factors.join("*")
}

/// Random members in one or two variables, some of them composed with a
/// shift `z -> z + x^e` so that elimination is exercised.
pub fn random(seed: u64, count: usize) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let dim = rng.gen_range(1..=2);
        let text = if rng.gen_bool(0.5) { tower(&mut rng, dim) } else { product(&mut rng, dim) };
        let mut f = SparsePoly::parse(&text, dim).unwrap();
        let mut name = format!("random {}", out.len());
        if rng.gen_bool(0.25) {
            let h = monomial(&mut rng, dim, 1, 2);
            f = f.shift_z(&SparsePoly::parse(&h, dim).unwrap()).unwrap();
            name = format!("{name} shifted by {h}");
        }
        if f.z_degree().unwrap_or(0) > 8 {
            continue;
        }
        out.push(Member { name, text, dim, f });
    }
    out
}
