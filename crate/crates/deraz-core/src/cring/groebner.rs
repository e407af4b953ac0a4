//! Buchberger's algorithm (sugar strategy, product + chain criteria),
//! normal forms, reduced bases, and Rabinowitsch radical membership.

use super::poly::{Monomial, MonomialOrder, Poly, PolyRing};
use crate::{Error, Result};

/// Hard cap on the intermediate basis size; hitting it means the input is
/// far beyond desk scale and we fail loudly instead of spinning.
const BASIS_CAP: usize = 8192;

/// Full normal form of `p` against `basis`: every term of the remainder is
/// reducible by no leading term of the basis. First-divisor-in-list
/// selection keeps reductions deterministic.
pub fn normal_form(ring: &PolyRing, p: &Poly, basis: &[Poly]) -> Poly {
    let mut rem_terms: Vec<(Monomial, crate::scalars::FieldElement)> = Vec::new();
    let mut cur = p.clone();
    'outer: while let Some((cm, cc)) = cur.terms.first().cloned() {
        for b in basis {
            if let Some((bm, bc)) = ring.lt(b) {
                if bm.divides(&cm) {
                    let q = bm.quotient_into(&cm);
                    let c = cc.mul(&bc.inv().expect("basis leading coeff nonzero"));
                    cur = ring.sub(&cur, &ring.mul_term(b, &q, &c));
                    continue 'outer;
                }
            }
        }
        // leading term irreducible: move it to the remainder
        rem_terms.push((cm, cc));
        cur.terms.remove(0);
    }
    Poly { terms: rem_terms }
}

fn s_poly(ring: &PolyRing, f: &Poly, g: &Poly) -> Poly {
    let (fm, fc) = ring.lt(f).expect("nonzero");
    let (gm, gc) = ring.lt(g).expect("nonzero");
    let l = fm.lcm(gm);
    let uf = fm.quotient_into(&l);
    let ug = gm.quotient_into(&l);
    let a = ring.mul_term(f, &uf, &fc.inv().unwrap());
    let b = ring.mul_term(g, &ug, &gc.inv().unwrap());
    ring.sub(&a, &b)
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

/// Reduced Gröbner basis of the ideal generated by `gens`; canonical:
/// monic, pairwise tail-reduced, sorted ascending by leading monomial.
/// The unit ideal yields exactly `[1]`.
pub fn buchberger(ring: &PolyRing, gens: &[Poly]) -> Result<Vec<Poly>> {
    let mut basis: Vec<Poly> = Vec::new();
    let mut sugars: Vec<u32> = Vec::new();
    for g in gens {
        let g = normal_form(ring, g, &basis);
        if !g.is_zero() {
            sugars.push(g.total_degree());
            basis.push(g);
        }
    }

    let mut pairs: Vec<Pair> = Vec::new();
    let push_pairs = |pairs: &mut Vec<Pair>, basis: &[Poly], sugars: &[u32], t: usize| {
        let tm = basis[t].terms[0].0.clone();
        for i in 0..t {
            let im = &basis[i].terms[0].0;
            let lcm = im.lcm(&tm);
            let sugar = (sugars[i] + lcm.total_degree() - im.total_degree())
                .max(sugars[t] + lcm.total_degree() - tm.total_degree());
            pairs.push(Pair { i, j: t, lcm, sugar });
        }
    };
    for t in 0..basis.len() {
        push_pairs(&mut pairs, &basis, &sugars, t);
    }

    let mut done: Vec<(usize, usize)> = Vec::new();
    while !pairs.is_empty() {
        // sugar-first selection, with full deterministic tie-breaking
        let best = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.sugar
                    .cmp(&b.sugar)
                    .then(a.lcm.total_degree().cmp(&b.lcm.total_degree()))
                    .then(a.lcm.0.cmp(&b.lcm.0))
                    .then(a.i.cmp(&b.i))
                    .then(a.j.cmp(&b.j))
            })
            .map(|(k, _)| k)
            .unwrap();
        let pair = pairs.swap_remove(best);
        done.push((pair.i, pair.j));

        let fi = &basis[pair.i];
        let fj = &basis[pair.j];
        // product criterion
        if fi.terms[0].0.coprime(&fj.terms[0].0) {
            continue;
        }
        // chain criterion: some k with LT(k) | lcm and both (i,k),(k,j) handled
        let chained = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && basis[k].terms[0].0.divides(&pair.lcm)
                && done.contains(&(pair.i.min(k), pair.i.max(k)))
                && done.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chained {
            continue;
        }

        let s = s_poly(ring, fi, fj);
        let r = normal_form(ring, &s, &basis);
        if !r.is_zero() {
            sugars.push(pair.sugar.max(r.total_degree()));
            basis.push(r);
            if basis.len() > BASIS_CAP {
                return Err(Error::CapExceeded(format!(
                    "Gröbner basis exceeded {BASIS_CAP} elements"
                )));
            }
            push_pairs(&mut pairs, &basis, &sugars, basis.len() - 1);
        }
    }

    Ok(reduce_basis(ring, basis))
}

/// Minimalize + tail-reduce + normalize a Gröbner basis into the reduced
/// (canonical) one.
fn reduce_basis(ring: &PolyRing, basis: Vec<Poly>) -> Vec<Poly> {
    let mut basis: Vec<Poly> = basis.into_iter().filter(|p| !p.is_zero()).collect();
    basis.sort_by(|a, b| ring.cmp_mono(&a.terms[0].0, &b.terms[0].0));
    // minimal: drop anything whose LT is divisible by an earlier (smaller) LT
    let mut minimal: Vec<Poly> = Vec::new();
    for p in basis {
        if !minimal.iter().any(|q| q.terms[0].0.divides(&p.terms[0].0)) {
            minimal.push(p);
        }
    }
    // tail-reduce each against all the others
    let snapshot = minimal.clone();
    let reduced: Vec<Poly> = snapshot
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let others: Vec<Poly> = snapshot
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.clone())
                .collect();
            ring.make_monic(&normal_form(ring, p, &others))
        })
        .filter(|p| !p.is_zero())
        .collect();
    let mut reduced = reduced;
    reduced.sort_by(|a, b| ring.cmp_mono(&a.terms[0].0, &b.terms[0].0));
    reduced
}

/// Is the (reduced) basis that of the unit ideal?
pub fn is_unit_basis(gb: &[Poly]) -> bool {
    gb.len() == 1 && gb[0].terms.len() == 1 && gb[0].terms[0].0.is_one()
}

/// Ring morphism on the nose: map each variable of `src` to the polynomial
/// `images[i]` of `dst` and push polynomials through.
pub fn substitute(src: &PolyRing, dst: &PolyRing, images: &[Poly], p: &Poly) -> Poly {
    assert_eq!(images.len(), src.nvars());
    let mut acc = dst.zero();
    for (m, c) in &p.terms {
        let mut t = dst.constant(c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = dst.mul(&t, &dst.pow(&images[i], e));
            }
        }
        acc = dst.add(&acc, &t);
    }
    acc
}

/// Var-to-var injection: `var_map[i]` is the index in `dst` of `src` var i.
pub fn inject(dst: &PolyRing, var_map: &[usize], p: &Poly) -> Poly {
    let terms = p
        .terms
        .iter()
        .map(|(m, c)| {
            let mut e = vec![0u32; dst.nvars()];
            for (i, &exp) in m.0.iter().enumerate() {
                e[var_map[i]] = exp;
            }
            (Monomial(e.into_boxed_slice()), c.clone())
        })
        .collect();
    dst.from_terms(terms)
}

/// Rabinowitsch: f ∈ √I  ⟺  1 ∈ I + (z·f − 1) in k[x, z].
pub fn radical_membership(ring: &PolyRing, f: &Poly, ideal: &[Poly]) -> Result<bool> {
    let mut vars = ring.vars.clone();
    let mut z = "zrab".to_string();
    while vars.contains(&z) {
        z.push('_');
    }
    vars.push(z);
    let ext = PolyRing::new(ring.field, vars, MonomialOrder::DegRevLex);
    let var_map: Vec<usize> = (0..ring.nvars()).collect();
    let mut gens: Vec<Poly> = ideal.iter().map(|g| inject(&ext, &var_map, g)).collect();
    let zf = ext.mul(&ext.var(ext.nvars() - 1), &inject(&ext, &var_map, f));
    gens.push(ext.sub(&zf, &ext.one()));
    let gb = buchberger(&ext, &gens)?;
    Ok(is_unit_basis(&gb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;

    fn ring(vars: &[&str]) -> PolyRing {
        PolyRing::new(
            Field::Q,
            vars.iter().map(|s| s.to_string()).collect(),
            MonomialOrder::DegRevLex,
        )
    }

    #[test]
    fn already_reduced_single_generator() {
        let r = ring(&["x"]);
        let g = r.sub(&r.var(0), &r.one()); // x − 1
        let gb = buchberger(&r, &[g.clone()]).unwrap();
        assert_eq!(gb, vec![g]);
    }

    #[test]
    fn monomial_ideal_is_its_own_basis() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![r.mul(&x, &x), r.mul(&x, &y), r.mul(&y, &y)];
        let gb = buchberger(&r, &gens).unwrap();
        assert_eq!(gb.len(), 3);
        for g in &gens {
            assert!(normal_form(&r, g, &gb).is_zero());
        }
    }

    #[test]
    fn unit_ideal_from_xy_minus_one_and_x_squared() {
        // hand certificate: x = y·x² − x·(xy−1), then 1 = y·x − (xy−1)
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![r.sub(&r.mul(&x, &y), &r.one()), r.mul(&x, &x)];
        let gb = buchberger(&r, &gens).unwrap();
        assert!(is_unit_basis(&gb));
    }

    #[test]
    fn normal_form_idempotent_and_membership() {
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        // I = (x² − y, y² − 1)
        let gens = vec![r.sub(&r.mul(&x, &x), &y), r.sub(&r.mul(&y, &y), &r.one())];
        let gb = buchberger(&r, &gens).unwrap();
        let p = r.pow(&r.add(&x, &y), 4);
        let n1 = normal_form(&r, &p, &gb);
        let n2 = normal_form(&r, &n1, &gb);
        assert_eq!(n1, n2);
        // x⁴ − 1 = (x²−y)(x²+y) + (y²−1) ∈ I
        let member = r.sub(&r.pow(&x, 4), &r.one());
        assert!(normal_form(&r, &member, &gb).is_zero());
        assert!(!normal_form(&r, &x, &gb).is_zero());
    }

    #[test]
    fn classic_cyclic_like_example() {
        // I = (x² + y, xy − 1): GB should let us decide membership of y³ + x
        let r = ring(&["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![r.add(&r.mul(&x, &x), &y), r.sub(&r.mul(&x, &y), &r.one())];
        let gb = buchberger(&r, &gens).unwrap();
        // y³ + x: from x²=−y: x⁴=y², and xy=1 ⟹ x³y=x² ⟹ ... check by NF
        // x·(x²+y) − (xy−1) = x³ + 1 ⟹ x³ ≡ −1; y ≡ −x² ⟹ y³ ≡ −x⁶ = −(x³)² = −1
        let p = r.add(&r.pow(&y, 3), &r.one());
        assert!(normal_form(&r, &p, &gb).is_zero());
    }

    #[test]
    fn radical_membership_examples() {
        let r = ring(&["x"]);
        let x = r.var(0);
        let x2 = r.mul(&x, &x);
        assert!(radical_membership(&r, &x, &[x2.clone()]).unwrap());
        let xm1 = r.sub(&x, &r.one());
        assert!(!radical_membership(&r, &xm1, &[x2]).unwrap());
        assert!(radical_membership(&r, &xm1, &[r.one()]).unwrap()); // V(1) empty
    }

    #[test]
    fn substitution() {
        let src = ring(&["t"]);
        let dst = ring(&["s", "si"]);
        let p = src.add(&src.var(0), &src.one()); // t + 1
        let img = substitute(&src, &dst, &[dst.var(1)], &p);
        assert_eq!(img, dst.add(&dst.var(1), &dst.one()));
    }

    #[test]
    fn groebner_over_fp() {
        let r = PolyRing::new(
            Field::Fp(5),
            vec!["x".into(), "y".into()],
            MonomialOrder::Lex,
        );
        let x = r.var(0);
        let y = r.var(1);
        let gens = vec![
            r.sub(&r.mul(&x, &x), &y),
            r.sub(&r.mul(&x, &y), &r.one()),
        ];
        let gb = buchberger(&r, &gens).unwrap();
        // lex eliminates x: the basis contains a univariate in y (y³ − 1)
        let uni = gb.iter().find(|g| g.terms.iter().all(|(m, _)| m.0[0] == 0));
        let u = uni.expect("elimination ideal generator");
        assert_eq!(u.total_degree(), 3);
    }
}
