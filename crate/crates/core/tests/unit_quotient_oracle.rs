//! Unit quotient counts checked by brute force over `M_2(Z/p^K)`, with
//! lattice membership decided by an integer Hermite normal form.

use skbessel::{classify_case, unit_quotient_reps, QuadCase};

/// Row-style HNF of the integer span of `gens`.
fn hnf(mut gens: Vec<[i64; 4]>) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for col in 0..4 {
        loop {
            let nz: Vec<usize> = (0..gens.len()).filter(|&i| gens[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| gens[i][col].abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let k = gens[i][col] / gens[piv][col];
                    for c in 0..4 {
                        gens[i][c] -= k * gens[piv][c];
                    }
                }
            }
        }
        if let Some(i) = (0..gens.len()).find(|&i| gens[i][col] != 0) {
            let mut row = gens.remove(i);
            if row[col] < 0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            out.push(row);
        }
        gens.retain(|g| g.iter().any(|&v| v != 0));
    }
    out
}

fn member(h: &[[i64; 4]], v: [i64; 4]) -> bool {
    let mut v = v;
    for row in h {
        let col = (0..4).find(|&c| row[c] != 0).unwrap();
        if v[col] % row[col] != 0 {
            return false;
        }
        let k = v[col] / row[col];
        for c in 0..4 {
            v[c] -= k * row[c];
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Integer basis of `R_m` as flattened matrices, given `sigma = [[0, e], [1, 0]]`
/// and `rho^m` as `(x, y)` meaning `x + y sigma`.
fn order_basis(e: i64, rho_m: (i64, i64)) -> Vec<[i64; 4]> {
    let (x, y) = rho_m;
    // rho^m h = [[0, x], [0, y]], sigma rho^m h = [[0, e y], [0, x]]
    vec![[1, 0, 0, 1], [0, e, 1, 0], [0, x, 0, y], [0, e * y, 0, x]]
}

fn count_units(p: i64, k: u32, basis: Vec<[i64; 4]>) -> usize {
    let n = p.pow(k);
    let mut gens = basis;
    for i in 0..4 {
        let mut v = [0; 4];
        v[i] = n;
        gens.push(v);
    }
    let h = hnf(gens);
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d - b * c).rem_euclid(p) != 0 && member(&h, [a, b, c, d]) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn rho_pow(e: i64, base: (i64, i64), m: u32) -> (i64, i64) {
    let mut r = (1, 0);
    for _ in 0..m {
        r = (r.0 * base.0 + e * r.1 * base.1, r.0 * base.1 + r.1 * base.0);
    }
    r
}

#[test]
fn unit_quotients_match_brute_force() {
    // (case, e, rho, m, K) with p^K M_2(o) inside R_{m+1}
    let cases = [
        (QuadCase::UI, 2, (3, 0), 0u32, 1u32),
        (QuadCase::UI, 2, (3, 0), 1, 2),
        (QuadCase::RI, 3, (0, 1), 1, 1),
        (QuadCase::RI, 3, (0, 1), 2, 2),
    ];
    for (case, e, rho, m, k) in cases {
        let ctx = classify_case(3, case).unwrap();
        assert_eq!(ctx.e, skbessel::qi(e));
        let big = count_units(3, k, order_basis(e, rho_pow(e, rho, m)));
        let small = count_units(3, k, order_basis(e, rho_pow(e, rho, m + 1)));
        assert_eq!(big % small, 0);
        let reps = unit_quotient_reps(&ctx, m as i64).unwrap();
        assert_eq!(reps.len(), big / small, "{case} m={m}");
    }
}
