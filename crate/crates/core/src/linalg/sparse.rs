//! Presentation reduction: sparse unit-pivot elimination followed by a dense
//! Smith reduction of whatever is left.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::hnf::Echelon;
use super::intmat::SparseRow;
use super::snf::Reducer;

/// Coordinates of a finitely presented abelian group `Z^n / R`.
///
/// `moduli[i]` is the order of coordinate `i` (0 for a free coordinate);
/// `coord[g]` expresses generator `g`; `lifts[i]` is a word in the generators
/// whose coordinate vector is the `i`-th unit vector.
#[derive(Clone, Debug)]
pub(crate) struct Presentation {
    pub moduli: Vec<BigInt>,
    pub coord: Vec<Vec<BigInt>>,
    pub lifts: Vec<SparseRow>,
}

type Row = Vec<(u32, i128)>;

struct Elim {
    col: usize,
    sign: i128,
    rest: Row,
}

/// Reduces `Z^ngens / span(rows)` to invariant-factor coordinates.
pub(crate) fn present(ngens: usize, rows: &[SparseRow]) -> Presentation {
    let mut small: Vec<Option<Row>> = Vec::with_capacity(rows.len());
    let mut fallback = false;
    let mut seen = HashSet::new();
    for r in rows {
        let mut out = Row::with_capacity(r.len());
        for (j, v) in r {
            match v.to_i128() {
                Some(x) if x.unsigned_abs() < (1u128 << 60) => out.push((*j as u32, x)),
                _ => {
                    fallback = true;
                    break;
                }
            }
        }
        if fallback {
            break;
        }
        if out.is_empty() {
            continue;
        }
        if out[0].1 < 0 {
            for e in out.iter_mut() {
                e.1 = -e.1;
            }
        }
        if seen.insert(out.clone()) {
            small.push(Some(out));
        }
    }
    if fallback {
        return dense_present(ngens, rows.to_vec(), Vec::new());
    }

    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ngens];
    let mut col_count = vec![0usize; ngens];
    for (i, r) in small.iter().enumerate() {
        for &(j, _) in r.as_ref().unwrap() {
            col_rows[j as usize].push(i as u32);
            col_count[j as usize] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32, u32)>> = BinaryHeap::new();
    let push_cands = |heap: &mut BinaryHeap<Reverse<(usize, u32, u32)>>, i: usize, r: &Row, cc: &[usize]| {
        let rl = r.len();
        for &(j, v) in r {
            if v == 1 || v == -1 {
                let cost = (rl - 1) * (cc[j as usize].saturating_sub(1));
                heap.push(Reverse((cost, i as u32, j)));
            }
        }
    };
    for (i, r) in small.iter().enumerate() {
        push_cands(&mut heap, i, r.as_ref().unwrap(), &col_count);
    }

    let mut elims: Vec<Elim> = Vec::new();
    let mut eliminated = vec![false; ngens];
    while let Some(Reverse((cost, i, c))) = heap.pop() {
        let i = i as usize;
        let r = match &small[i] {
            Some(r) => r,
            None => continue,
        };
        let pos = match r.binary_search_by_key(&c, |e| e.0) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let s = r[pos].1;
        if s != 1 && s != -1 {
            continue;
        }
        let now = (r.len() - 1) * col_count[c as usize].saturating_sub(1);
        if now > cost {
            heap.push(Reverse((now, i as u32, c)));
            continue;
        }
        // eliminate column c using row i
        let prow = small[i].take().unwrap();
        for &(j, _) in &prow {
            col_count[j as usize] -= 1;
        }
        let mut targets: Vec<u32> = std::mem::take(&mut col_rows[c as usize]);
        targets.sort_unstable();
        targets.dedup();
        let mut updates: Vec<(usize, Row)> = Vec::new();
        let mut overflow = false;
        for &k in &targets {
            let k = k as usize;
            let row = match &small[k] {
                Some(row) => row,
                None => continue,
            };
            let t = match row.binary_search_by_key(&c, |e| e.0) {
                Ok(p) => row[p].1,
                Err(_) => continue,
            };
            match combine(row, &prow, t * s) {
                Some(nr) => updates.push((k, nr)),
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        if overflow {
            // undo removal and stop the sparse phase
            for &(j, _) in &prow {
                col_count[j as usize] += 1;
            }
            col_rows[c as usize] = targets;
            small[i] = Some(prow);
            break;
        }
        for (k, nr) in updates {
            let old = small[k].take().unwrap();
            for &(j, _) in &old {
                col_count[j as usize] -= 1;
            }
            for &(j, _) in &nr {
                col_count[j as usize] += 1;
                if old.binary_search_by_key(&j, |e| e.0).is_err() {
                    col_rows[j as usize].push(k as u32);
                }
            }
            if !nr.is_empty() {
                push_cands(&mut heap, k, &nr, &col_count);
                small[k] = Some(nr);
            }
        }
        eliminated[c as usize] = true;
        let rest: Row = prow.into_iter().filter(|e| e.0 != c).collect();
        elims.push(Elim { col: c as usize, sign: s, rest });
    }

    let remaining: Vec<SparseRow> = small
        .into_iter()
        .flatten()
        .map(|r| r.into_iter().map(|(j, v)| (j as usize, BigInt::from(v))).collect())
        .collect();
    let survivors: Vec<usize> = (0..ngens).filter(|&j| !eliminated[j]).collect();
    let mut pres = dense_present_on(ngens, &survivors, remaining);

    // back-substitute eliminated generators, latest first
    for e in elims.iter().rev() {
        let k = pres.moduli.len();
        let mut acc = vec![BigInt::zero(); k];
        for &(j, a) in &e.rest {
            let a = BigInt::from(-e.sign * a);
            for (x, y) in acc.iter_mut().zip(pres.coord[j as usize].iter()) {
                *x += &a * y;
            }
        }
        reduce_coords(&mut acc, &pres.moduli);
        pres.coord[e.col] = acc;
    }
    pres
}

fn combine(row: &Row, prow: &Row, f: i128) -> Option<Row> {
    // row - f * prow
    let mut out = Row::with_capacity(row.len() + prow.len());
    let (mut a, mut b) = (0, 0);
    while a < row.len() || b < prow.len() {
        let ja = row.get(a).map(|e| e.0).unwrap_or(u32::MAX);
        let jb = prow.get(b).map(|e| e.0).unwrap_or(u32::MAX);
        if ja < jb {
            out.push(row[a]);
            a += 1;
        } else if jb < ja {
            let v = prow[b].1.checked_mul(f)?.checked_neg()?;
            out.push((jb, v));
            b += 1;
        } else {
            let v = row[a].1.checked_sub(prow[b].1.checked_mul(f)?)?;
            if v != 0 {
                out.push((ja, v));
            }
            a += 1;
            b += 1;
        }
    }
    if out.iter().any(|e| e.1.unsigned_abs() >= (1u128 << 90)) {
        return None;
    }
    Some(out)
}

pub(crate) fn reduce_coords(v: &mut [BigInt], moduli: &[BigInt]) {
    for (x, m) in v.iter_mut().zip(moduli.iter()) {
        if !m.is_zero() {
            *x = num_integer::Integer::mod_floor(&*x, m);
        }
    }
}

fn dense_present(ngens: usize, rows: Vec<SparseRow>, _hint: Vec<usize>) -> Presentation {
    let all: Vec<usize> = (0..ngens).collect();
    dense_present_on(ngens, &all, rows)
}

/// Dense Smith reduction over the generators in `cols`; other generators get
/// empty coordinate vectors that the caller fills in.
fn dense_present_on(ngens: usize, cols: &[usize], rows: Vec<SparseRow>) -> Presentation {
    let m = cols.len();
    let mut index = vec![usize::MAX; ngens];
    for (k, &c) in cols.iter().enumerate() {
        index[c] = k;
    }
    let mut ech = Echelon::new(m);
    for r in rows {
        let mut d = vec![BigInt::zero(); m];
        for (j, v) in r {
            debug_assert!(index[j] != usize::MAX);
            d[index[j]] = v;
        }
        ech.insert(d);
    }
    let basis = ech.into_reduced();
    let mut red = Reducer::new(basis, m, false, true);
    let rank = red.run();
    let v = red.v.take().unwrap();
    let vinv = red.vinv.take().unwrap();
    let mut keep = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..m {
        let d = if i < rank { red.a[i][i].clone() } else { BigInt::zero() };
        if d.is_one() {
            continue;
        }
        keep.push(i);
        moduli.push(d);
    }
    let mut coord = vec![Vec::new(); ngens];
    for (k, &c) in cols.iter().enumerate() {
        let mut cv: Vec<BigInt> = keep.iter().map(|&i| v[k][i].clone()).collect();
        reduce_coords(&mut cv, &moduli);
        coord[c] = cv;
    }
    let lifts = keep
        .iter()
        .map(|&i| {
            vinv[i]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (cols[k], x.clone()))
                .collect()
        })
        .collect();
    Presentation { moduli, coord, lifts }
}
