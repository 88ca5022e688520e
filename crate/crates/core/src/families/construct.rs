//! Explicit permutation models of the rank-1 families and their Borel
//! subgroups.
//!
//! L_2(q) acts on the projective line (infinity first, then field
//! elements in the canonical field order); AGL_1(q) on the field points;
//! Sz(q) on the Suzuki ovoid of q^2 + 1 points. Generators are fixed once
//! and for all so serialized groups are bit-identical across runs.

use super::{FamiliesError, Family};
use crate::ffield::Field;
use crate::numtheory::{self, Natural};
use crate::permgroup::{is_maximal, LinkVerdict, MaximalityMethod, Perm, PermGroup};
use num_traits::ToPrimitive;

/// Construction caps.
pub const PSL2_Q_CAP: u64 = 1 << 9;
pub const AGL1_Q_CAP: u64 = 1 << 12;

/// A Borel subgroup B = U.T with its distinguished parts marked.
#[derive(Debug, Clone)]
pub struct MarkedBorel {
    pub family: Family,
    pub p: u64,
    pub k: u32,
    /// Index of the Cartan torus in F_q^x: (2, q-1) for L2, 1 otherwise.
    pub torus_divisor: u64,
    pub ambient: PermGroup,
    pub borel: PermGroup,
    pub unipotent: PermGroup,
    pub torus: PermGroup,
    torus_gen: Perm,
}

impl MarkedBorel {
    pub fn q(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn torus_order(&self) -> u64 {
        self.torus.order_u64().expect("torus is small")
    }

    pub fn torus_generator(&self) -> &Perm {
        &self.torus_gen
    }

    /// |B| = |U||T|, U normal in B, T meets U trivially.
    fn validate(&self) -> Result<(), FamiliesError> {
        let ub = self.unipotent.order() * self.torus.order();
        if &ub != self.borel.order() {
            return Err(FamiliesError::ConstructionInvariant(format!(
                "|B| = {} but |U||T| = {}",
                self.borel.order(),
                ub
            )));
        }
        for u in self.unipotent.generators() {
            for b in self.borel.generators() {
                if !self.unipotent.contains(&u.conjugate_by(b)) {
                    return Err(FamiliesError::ConstructionInvariant(
                        "U is not normal in B".into(),
                    ));
                }
            }
        }
        for t in self.torus.elements() {
            if !t.is_identity() && self.unipotent.contains(&t) {
                return Err(FamiliesError::ConstructionInvariant(
                    "T meets U nontrivially".into(),
                ));
            }
        }
        Ok(())
    }

    /// The subgroup U.e = <U, t^(|T|/e)> for a divisor e of |T|.
    pub fn torus_power_subgroup(&self, e: u64) -> Result<PermGroup, FamiliesError> {
        let t_order = self.torus_order();
        if e == 0 || !t_order.is_multiple_of(e) {
            return Err(FamiliesError::NotADivisor {
                e: Natural::from(e),
                modulus: Natural::from(t_order),
            });
        }
        let mut gens: Vec<Perm> = self.unipotent.generators().to_vec();
        if e > 1 {
            gens.push(self.torus_gen.power(t_order / e));
        }
        let m = PermGroup::from_generators(self.borel.degree(), gens)?;
        debug_assert_eq!(m.order(), &(self.unipotent.order() * Natural::from(e)));
        Ok(m)
    }
}

/// A maximal subgroup M = U.e of index s in its Borel subgroup.
#[derive(Debug, Clone)]
pub struct BorelMaximal {
    pub group: PermGroup,
    pub s: u64,
    pub e: u64,
    /// Sweep certification, when |B| is within the sweep cap.
    pub maximality: Option<LinkVerdict>,
}

/// L_2(q) = PSL_2(q) on the projective line, degree q + 1.
///
/// Point 0 is infinity; point 1 + i is the field element of index i.
/// Generators: the unit translation t -> t + 1, the square scaling
/// t -> lambda^2 t with lambda the canonical primitive element, and the
/// inversion t -> -1/t.
pub fn psl2(q: u64) -> Result<PermGroup, FamiliesError> {
    let (field, _) = l2_field(q)?;
    let gens = psl2_generators(&field);
    let g = PermGroup::from_generators(q as usize + 1, gens)?;
    let d = if q.is_multiple_of(2) { 1 } else { 2 };
    let expected = Natural::from(q) * Natural::from(q * q - 1) / Natural::from(d as u32);
    if g.order() != &expected {
        return Err(FamiliesError::ConstructionInvariant(format!(
            "|L2({q})| = {} but chain found {}",
            expected,
            g.order()
        )));
    }
    Ok(g)
}

fn l2_field(q: u64) -> Result<(Field, (u64, u32)), FamiliesError> {
    if !(4..=PSL2_Q_CAP).contains(&q) {
        return Err(FamiliesError::Unsupported(format!(
            "L2({q}): need a prime power with 4 <= q <= {PSL2_Q_CAP}"
        )));
    }
    let (p, k) = numtheory::is_prime_power(&Natural::from(q))
        .ok_or_else(|| FamiliesError::Unsupported(format!("{q} is not a prime power")))?;
    let p = p.to_u64().expect("small");
    Ok((Field::new(p, k)?, (p, k)))
}

fn psl2_generators(field: &Field) -> Vec<Perm> {
    let translation = l2_translation(field, &field.one());
    let scaling = l2_square_scaling(field);
    let inversion = l2_inversion(field);
    vec![translation, scaling, inversion]
}

/// t -> t + c on the projective line (infinity fixed).
fn l2_translation(field: &Field, c: &crate::ffield::FieldElement) -> Perm {
    let q = field.size();
    let mut images = vec![0u32; q as usize + 1];
    for i in 0..=q {
        images[i as usize] = if i == 0 {
            0
        } else {
            let t = field.from_index(i - 1);
            1 + field.index_of(&field.add(&t, c).unwrap()) as u32
        };
    }
    Perm::from_images(images).unwrap()
}

/// t -> lambda^2 t, the generator of the torus of PSL_2.
fn l2_square_scaling(field: &Field) -> Perm {
    let lambda = field.primitive_element().expect("q >= 4");
    let l2 = field.mul(&lambda, &lambda).unwrap();
    let q = field.size();
    let mut images = vec![0u32; q as usize + 1];
    for i in 0..=q {
        images[i as usize] = if i == 0 {
            0
        } else {
            let t = field.from_index(i - 1);
            1 + field.index_of(&field.mul(&t, &l2).unwrap()) as u32
        };
    }
    Perm::from_images(images).unwrap()
}

/// t -> -1/t, swapping 0 and infinity.
fn l2_inversion(field: &Field) -> Perm {
    let q = field.size();
    let zero_idx = field.index_of(&field.zero());
    let mut images = vec![0u32; q as usize + 1];
    for i in 0..=q {
        images[i as usize] = if i == 0 {
            1 + zero_idx as u32
        } else {
            let t = field.from_index(i - 1);
            if t.is_zero() {
                0
            } else {
                let inv = field.inv(&t).unwrap();
                1 + field.index_of(&field.neg(&inv).unwrap()) as u32
            }
        };
    }
    Perm::from_images(images).unwrap()
}

/// Marked Borel subgroup of L_2(q): the stabilizer of infinity,
/// U = field translations, T = square scalings.
pub fn l2_borel(q: u64) -> Result<MarkedBorel, FamiliesError> {
    let ambient = psl2(q)?;
    let (field, (p, k)) = l2_field(q)?;
    let degree = q as usize + 1;
    let mut u_gens = Vec::new();
    for i in 0..k {
        let basis = if k == 1 {
            field.one()
        } else {
            field.from_index(p.pow(i))
        };
        u_gens.push(l2_translation(&field, &basis));
    }
    let torus_gen = l2_square_scaling(&field);
    let unipotent = PermGroup::from_generators(degree, u_gens.clone())?;
    let torus = PermGroup::from_generators(degree, vec![torus_gen.clone()])?;
    let mut b_gens = u_gens;
    b_gens.push(torus_gen.clone());
    let borel = PermGroup::from_generators(degree, b_gens)?;
    let d = if q.is_multiple_of(2) { 1 } else { 2 };
    let mb = MarkedBorel {
        family: Family::L2,
        p,
        k,
        torus_divisor: d,
        ambient,
        borel,
        unipotent,
        torus,
        torus_gen,
    };
    check_part_orders(&mb, q, (q - 1) / d)?;
    mb.validate()?;
    Ok(mb)
}

/// AGL_1(q) = F_q . F_q^x on the q field points, marked as its own Borel:
/// U = translations, T = scalings by the canonical primitive element.
pub fn agl1(q: u64) -> Result<MarkedBorel, FamiliesError> {
    if !(3..=AGL1_Q_CAP).contains(&q) {
        return Err(FamiliesError::Unsupported(format!(
            "AGL1({q}): need a prime power with 3 <= q <= {AGL1_Q_CAP}"
        )));
    }
    let (p, k) = numtheory::is_prime_power(&Natural::from(q))
        .ok_or_else(|| FamiliesError::Unsupported(format!("{q} is not a prime power")))?;
    let p = p.to_u64().expect("small");
    let field = Field::new(p, k)?;
    let degree = q as usize;

    let affine = |f: &dyn Fn(&crate::ffield::FieldElement) -> crate::ffield::FieldElement| {
        let mut images = vec![0u32; degree];
        for i in 0..q {
            let t = field.from_index(i);
            images[i as usize] = field.index_of(&f(&t)) as u32;
        }
        Perm::from_images(images).unwrap()
    };

    let mut u_gens = Vec::new();
    for i in 0..k {
        let basis = if k == 1 {
            field.one()
        } else {
            field.from_index(p.pow(i))
        };
        u_gens.push(affine(&|t| field.add(t, &basis).unwrap()));
    }
    let gamma = field.primitive_element()?;
    let torus_gen = affine(&|t| field.mul(t, &gamma).unwrap());

    let unipotent = PermGroup::from_generators(degree, u_gens.clone())?;
    let torus = PermGroup::from_generators(degree, vec![torus_gen.clone()])?;
    let mut b_gens = u_gens;
    b_gens.push(torus_gen.clone());
    let borel = PermGroup::from_generators(degree, b_gens)?;
    let mb = MarkedBorel {
        family: Family::Agl1,
        p,
        k,
        torus_divisor: 1,
        ambient: borel.clone(),
        borel,
        unipotent,
        torus,
        torus_gen,
    };
    check_part_orders(&mb, q, q - 1)?;
    mb.validate()?;
    Ok(mb)
}

/// Sz(q) on the Suzuki ovoid, q in {8, 32}.
///
/// Points: infinity, then pairs (a, b) of field elements. With
/// theta: x -> x^(2^(m+1)) for q = 2^(2m+1) and the norm
/// f(a, b) = a^(theta+2) + ab + b^theta (zero only at the origin), the
/// group is generated by
///   u(alpha, beta): (a, b) -> (a + alpha, b + beta + a alpha^theta),
///   h(kappa):       (a, b) -> (kappa a, kappa^(theta+1) b),
///   w:              (a, b) -> (b/f(a,b), a/f(a,b)), swapping infinity
///                   with the origin.
pub fn suzuki(q: u64) -> Result<MarkedBorel, FamiliesError> {
    if q != 8 && q != 32 {
        return Err(FamiliesError::Unsupported(format!(
            "Sz({q}): supported scale is q in {{8, 32}}"
        )));
    }
    let k = if q == 8 { 3u32 } else { 5 };
    let m = (k - 1) / 2;
    let theta: u64 = 1 << (m + 1);
    let field = Field::new(2, k)?;
    let degree = (q * q + 1) as usize;

    let point = |a: &crate::ffield::FieldElement, b: &crate::ffield::FieldElement| -> u32 {
        1 + (field.index_of(a) * q + field.index_of(b)) as u32
    };

    let norm = |a: &crate::ffield::FieldElement,
                b: &crate::ffield::FieldElement|
     -> crate::ffield::FieldElement {
        let theta_n = Natural::from(theta);
        let a_part = field.pow(a, &(Natural::from(theta) + 2u32)).unwrap();
        let ab = field.mul(a, b).unwrap();
        let b_part = field.pow(b, &theta_n).unwrap();
        field
            .add(&field.add(&a_part, &ab).unwrap(), &b_part)
            .unwrap()
    };

    // ovoid condition: the norm vanishes only at the origin
    for ia in 0..q {
        for ib in 0..q {
            let a = field.from_index(ia);
            let b = field.from_index(ib);
            if norm(&a, &b).is_zero() != (ia == 0 && ib == 0) {
                return Err(FamiliesError::ConstructionInvariant(format!(
                    "Sz({q}): norm vanishing wrong at ({ia},{ib})"
                )));
            }
        }
    }

    let u_perm =
        |alpha: &crate::ffield::FieldElement, beta: &crate::ffield::FieldElement| -> Perm {
            let alpha_theta = field.pow(alpha, &Natural::from(theta)).unwrap();
            let mut images = vec![0u32; degree];
            for ia in 0..q {
                for ib in 0..q {
                    let a = field.from_index(ia);
                    let b = field.from_index(ib);
                    let na = field.add(&a, alpha).unwrap();
                    let nb = field
                        .add(
                            &field.add(&b, beta).unwrap(),
                            &field.mul(&a, &alpha_theta).unwrap(),
                        )
                        .unwrap();
                    images[point(&a, &b) as usize] = point(&na, &nb);
                }
            }
            Perm::from_images(images).unwrap()
        };

    let h_perm = |kappa: &crate::ffield::FieldElement| -> Perm {
        let kappa_t1 = field.pow(kappa, &(Natural::from(theta) + 1u32)).unwrap();
        let mut images = vec![0u32; degree];
        for ia in 0..q {
            for ib in 0..q {
                let a = field.from_index(ia);
                let b = field.from_index(ib);
                images[point(&a, &b) as usize] = point(
                    &field.mul(&a, kappa).unwrap(),
                    &field.mul(&b, &kappa_t1).unwrap(),
                );
            }
        }
        Perm::from_images(images).unwrap()
    };

    let w_perm = {
        let mut images = vec![0u32; degree];
        images[0] = point(&field.zero(), &field.zero());
        images[point(&field.zero(), &field.zero()) as usize] = 0;
        for ia in 0..q {
            for ib in 0..q {
                if ia == 0 && ib == 0 {
                    continue;
                }
                let a = field.from_index(ia);
                let b = field.from_index(ib);
                let f = norm(&a, &b);
                let na = field.div(&b, &f).unwrap();
                let nb = field.div(&a, &f).unwrap();
                images[point(&a, &b) as usize] = point(&na, &nb);
            }
        }
        Perm::from_images(images).map_err(|_| {
            FamiliesError::ConstructionInvariant(format!("Sz({q}): w is not a bijection"))
        })?
    };

    let mut u_gens = Vec::new();
    for i in 0..k {
        let basis = field.from_index(1 << i);
        u_gens.push(u_perm(&basis, &field.zero()));
        u_gens.push(u_perm(&field.zero(), &basis));
    }
    let gamma = field.primitive_element()?;
    let torus_gen = h_perm(&gamma);

    let unipotent = PermGroup::from_generators(degree, u_gens.clone())?;
    let torus = PermGroup::from_generators(degree, vec![torus_gen.clone()])?;
    let mut b_gens = u_gens;
    b_gens.push(torus_gen.clone());
    let borel = PermGroup::from_generators(degree, b_gens.clone())?;
    let mut g_gens = b_gens;
    g_gens.push(w_perm);
    let ambient = PermGroup::from_generators(degree, g_gens)?;

    let expected = Natural::from(q * q) * Natural::from(q * q + 1) * Natural::from(q - 1);
    if ambient.order() != &expected {
        return Err(FamiliesError::ConstructionInvariant(format!(
            "|Sz({q})| = {expected} but chain found {}",
            ambient.order()
        )));
    }
    let mb = MarkedBorel {
        family: Family::Sz,
        p: 2,
        k,
        torus_divisor: 1,
        ambient,
        borel,
        unipotent,
        torus,
        torus_gen,
    };
    check_part_orders(&mb, q * q, q - 1)?;
    mb.validate()?;
    Ok(mb)
}

fn check_part_orders(
    mb: &MarkedBorel,
    u_expected: u64,
    t_expected: u64,
) -> Result<(), FamiliesError> {
    if mb.unipotent.order() != &Natural::from(u_expected)
        || mb.torus.order() != &Natural::from(t_expected)
    {
        return Err(FamiliesError::ConstructionInvariant(format!(
            "expected |U| = {u_expected}, |T| = {t_expected}; got |U| = {}, |T| = {}",
            mb.unipotent.order(),
            mb.torus.order()
        )));
    }
    Ok(())
}

/// The maximal subgroup M = U.e of index s in B, where e = |T| / s.
/// Maximality is certified by sweep whenever |B| is within the cap.
pub fn borel_maximal(b: &MarkedBorel, s: u64) -> Result<BorelMaximal, FamiliesError> {
    if !numtheory::is_prime_u64(s) {
        return Err(FamiliesError::NotPrimeIndex(s));
    }
    let t_order = b.torus_order();
    if !t_order.is_multiple_of(s) {
        return Err(FamiliesError::NotADivisor {
            e: Natural::from(s),
            modulus: Natural::from(t_order),
        });
    }
    let e = t_order / s;
    let group = b.torus_power_subgroup(e)?;
    debug_assert_eq!(b.borel.order() / group.order(), Natural::from(s));
    let maximality = if b
        .borel
        .order_u64()
        .is_some_and(|o| o <= crate::permgroup::SWEEP_ORDER_CAP)
    {
        Some(is_maximal(&group, &b.borel, MaximalityMethod::Sweep)?)
    } else {
        None
    };
    Ok(BorelMaximal {
        group,
        s,
        e,
        maximality,
    })
}
