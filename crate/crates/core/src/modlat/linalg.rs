//! Row-echelon linear algebra over F_p, sized for desk-scale modules
//! (p^dim <= 2^16). Vectors are rows; matrices act on the right.

pub type Vector = Vec<u64>;
pub type Matrix = Vec<Vec<u64>>;

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// v * A for a row vector v.
pub fn apply(v: &[u64], a: &Matrix, p: u64) -> Vector {
    let dim = v.len();
    let mut out = vec![0u64; dim];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..dim {
            out[j] = (out[j] + vi * a[i][j]) % p;
        }
    }
    out
}

/// Reduced row echelon form with normalized pivots; the canonical basis
/// of the row space. Zero rows are dropped.
pub fn rref(rows: &[Vector], p: u64) -> Matrix {
    let mut m: Matrix = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % p).collect())
        .collect();
    if m.is_empty() {
        return m;
    }
    let cols = m[0].len();
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(r) = (pivot_row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, r);
        let inv = inv_mod(m[pivot_row][col], p);
        for x in m[pivot_row].iter_mut() {
            *x = *x * inv % p;
        }
        for r2 in 0..m.len() {
            if r2 != pivot_row && m[r2][col] != 0 {
                let c = m[r2][col];
                for j in 0..cols {
                    let sub = c * m[pivot_row][j] % p;
                    m[r2][j] = (m[r2][j] + p - sub) % p;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

/// Reduces v against an rref basis; returns the residue.
pub fn reduce(v: &[u64], basis: &Matrix, p: u64) -> Vector {
    let mut v: Vector = v.iter().map(|&x| x % p).collect();
    for row in basis {
        let col = row
            .iter()
            .position(|&x| x != 0)
            .expect("rref rows are nonzero");
        if v[col] != 0 {
            let c = v[col];
            for j in 0..v.len() {
                let sub = c * row[j] % p;
                v[j] = (v[j] + p - sub) % p;
            }
        }
    }
    v
}

pub fn in_span(v: &[u64], basis: &Matrix, p: u64) -> bool {
    reduce(v, basis, p).iter().all(|&x| x == 0)
}

pub fn is_zero(v: &[u64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Extends an rref basis by a vector; true if the rank grew.
pub fn extend_basis(basis: &mut Matrix, v: &[u64], p: u64) -> bool {
    let residue = reduce(v, basis, p);
    if is_zero(&residue) {
        return false;
    }
    basis.push(residue);
    *basis = rref(basis, p);
    true
}

/// Span of the union of two subspaces, canonical.
pub fn join(a: &Matrix, b: &Matrix, p: u64) -> Matrix {
    let mut rows = a.clone();
    rows.extend(b.iter().cloned());
    rref(&rows, p)
}

/// Subspace containment via reduction.
pub fn contains_space(outer: &Matrix, inner: &Matrix, p: u64) -> bool {
    inner.iter().all(|v| in_span(v, outer, p))
}

/// Vector of the given enumeration index (base-p digits, first
/// coordinate least significant).
pub fn vector_from_index(mut idx: u64, dim: usize, p: u64) -> Vector {
    let mut v = vec![0u64; dim];
    for x in v.iter_mut() {
        *x = idx % p;
        idx /= p;
    }
    v
}

/// Enumerates all vectors of a subspace from its basis.
pub fn span_vectors(basis: &Matrix, dim: usize, p: u64) -> Vec<Vector> {
    let rank = basis.len();
    let count = p.pow(rank as u32);
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let coeffs = vector_from_index(idx, rank, p);
        let mut v = vec![0u64; dim];
        for (c, row) in coeffs.iter().zip(basis) {
            if *c == 0 {
                continue;
            }
            for j in 0..dim {
                v[j] = (v[j] + c * row[j]) % p;
            }
        }
        out.push(v);
    }
    out
}

/// Intersection of two subspaces by enumerating the smaller span.
/// Adequate below the 2^16 vector cap.
pub fn intersect(a: &Matrix, b: &Matrix, dim: usize, p: u64) -> Matrix {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut basis: Matrix = Vec::new();
    for v in span_vectors(small, dim, p) {
        if in_span(&v, big, p) {
            extend_basis(&mut basis, &v, p);
        }
    }
    basis
}
