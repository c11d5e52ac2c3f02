//! Independent reference implementations shared by the integration tests
//! and the acceptance harness. None of these call into the code under test.

#![allow(dead_code)]

use ge_dbs::clustering::Merge;

/// Deterministic sample that needs no RNG, mirrored by the Python script
/// that produced the frozen reference values below.
pub fn formula_sample(s: u32, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            (k as f64 * 0.7316 + s as f64 * 1.37).sin() * 3.0 + k as f64 * 0.05 + s as f64 * 0.01
        })
        .collect()
}

pub fn tied_sample(s: u32, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| ((k as f64 * 0.9 + s as f64).sin() * 3.0).round())
        .collect()
}

/// (seed, n, W, p) from `scipy.stats.shapiro(formula_sample(seed, n))`.
pub const SHAPIRO_REFERENCE: [(u32, usize, f64, f64); 5] = [
    (1, 8, 0.9037405896846641, 0.3120800784961709),
    (2, 12, 0.9213104894312475, 0.29695332216136294),
    (3, 20, 0.9086938189241732, 0.06018870843715032),
    (4, 30, 0.9311019156880629, 0.05252964029573056),
    (5, 50, 0.9562344029644883, 0.061844506106431864),
];

/// (seed, na, nb, p_less, p_greater) from exact `scipy.stats.mannwhitneyu`
/// with `a = formula_sample(seed, na)` and
/// `b = formula_sample(seed + 10, nb) + 0.4`.
pub const EXACT_REFERENCE: [(u32, usize, usize, f64, f64); 4] = [
    (1, 5, 6, 0.8354978354978355, 0.21428571428571427),
    (2, 7, 8, 0.16783216783216787, 0.8595182595182594),
    (3, 10, 10, 0.26442443005910504, 0.7593745264023902),
    (4, 3, 9, 0.3, 0.759090909090909),
];

/// As above with the asymptotic method, continuity correction and a shift
/// of 0.6.
pub const NORMAL_REFERENCE: [(u32, usize, usize, f64, f64); 3] = [
    (1, 15, 15, 0.37001087559690926, 0.6455383829731178),
    (2, 30, 30, 0.11699445814052906, 0.8858849665962882),
    (3, 12, 25, 0.014262510577805075, 0.9868729872261153),
];

/// Asymptotic with ties: `a = tied_sample(seed, na)`, `b = tied_sample(seed + 5, nb)`.
pub const TIED_REFERENCE: [(u32, usize, usize, f64, f64); 2] = [
    (1, 10, 12, 0.6926158384622252, 0.33135492098588043),
    (2, 20, 20, 0.5437279080220512, 0.46717524633670254),
];

pub fn brute_euclidean(p: &[f64], q: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..p.len() {
        sum += (p[i] - q[i]).powi(2);
    }
    sum.sqrt()
}

pub fn brute_hamming(p: &[bool], q: &[bool]) -> u32 {
    let mut d = 0;
    for i in 0..p.len() {
        if p[i] != q[i] {
            d += 1;
        }
    }
    d
}

/// The selection walk done literally: list every pair `(j, k)` with
/// `k < j`, sort by distance descending then by position in the lower
/// triangle, and append endpoints (smaller first) until `count` cases.
pub fn walk_reference(dist: &dyn Fn(usize, usize) -> f64, n: usize, count: usize) -> Vec<usize> {
    let mut pairs = Vec::new();
    for j in 1..n {
        for k in 0..j {
            pairs.push((dist(j, k), pairs.len(), k, j));
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut chosen = Vec::new();
    if n == 1 && count >= 1 {
        chosen.push(0);
    }
    for (_, _, lo, hi) in pairs {
        for case in [lo, hi] {
            if chosen.len() < count && !chosen.contains(&case) {
                chosen.push(case);
            }
        }
        if chosen.len() == count {
            break;
        }
    }
    chosen
}

/// Complete linkage from scratch at every step: every cluster pair's
/// distance is the max over its members.
pub fn ahc_reference(points: &[Vec<bool>]) -> Vec<Merge> {
    let mut clusters: Vec<Option<Vec<usize>>> = (0..points.len()).map(|i| Some(vec![i])).collect();
    let mut merges = Vec::new();
    loop {
        let mut best: Option<(u32, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (Some(ca), Some(cb)) = (&clusters[a], &clusters[b]) else {
                    continue;
                };
                let mut d = 0;
                for &p in ca {
                    for &q in cb {
                        d = d.max(brute_hamming(&points[p], &points[q]));
                    }
                }
                if best.is_none_or(|x| (d, a, b) < x) {
                    best = Some((d, a, b));
                }
            }
        }
        let Some((height, a, b)) = best else { break };
        let moved = clusters[b].take().unwrap();
        clusters[a].as_mut().unwrap().extend(moved);
        merges.push(Merge { a, b, height });
    }
    merges
}

/// Truth-table evaluation of a circuit phenotype as produced by the
/// gate-level grammar: `(x GATE y)`, `NOT x`, `iN`, outputs split by `;`.
pub fn truth_eval(phenotype: &str, row: &[bool]) -> Vec<bool> {
    phenotype
        .split(';')
        .map(|part| {
            let tokens: Vec<String> = part
                .replace('(', " ( ")
                .replace(')', " ) ")
                .split_whitespace()
                .map(str::to_string)
                .collect();
            let mut pos = 0;
            let v = eval_node(&tokens, &mut pos, row);
            assert_eq!(pos, tokens.len(), "trailing tokens in {part}");
            v
        })
        .collect()
}

fn eval_node(tokens: &[String], pos: &mut usize, row: &[bool]) -> bool {
    let t = tokens[*pos].as_str();
    *pos += 1;
    match t {
        "NOT" => !eval_node(tokens, pos, row),
        "(" => {
            let left = eval_node(tokens, pos, row);
            let gate = tokens[*pos].clone();
            *pos += 1;
            let right = eval_node(tokens, pos, row);
            assert_eq!(tokens[*pos], ")");
            *pos += 1;
            match gate.as_str() {
                "AND" => left && right,
                "OR" => left || right,
                "XOR" => left != right,
                g => panic!("unknown gate {g}"),
            }
        }
        input => row[input[1..].parse::<usize>().unwrap()],
    }
}

/// Row `r` of an `n`-input truth table, most significant bit first.
pub fn row_bits(r: usize, n: usize) -> Vec<bool> {
    (0..n).map(|b| r >> (n - 1 - b) & 1 == 1).collect()
}
