//! Brute-force reference implementations, deliberately taking different
//! routes from the library: counting-based ranks and quantiles, pairwise-sum
//! correlation, Simpson integration of the normal density for p-values.

/// Rank of element i: #smaller + (#equal + 1) / 2.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let eq = v.iter().filter(|y| *y == x).count() as f64;
            less + (eq + 1.0) / 2.0
        })
        .collect()
}

/// k-th order statistic (0-based) by counting.
fn order_stat(v: &[f64], k: usize) -> f64 {
    *v.iter()
        .find(|x| {
            let less = v.iter().filter(|y| y < x).count();
            let le = v.iter().filter(|y| y <= x).count();
            less <= k && k < le
        })
        .unwrap()
}

pub fn quantile(v: &[f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let a = order_stat(v, lo);
    if frac == 0.0 {
        a
    } else {
        a + frac * (order_stat(v, lo + 1) - a)
    }
}

pub fn median(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        order_stat(v, n / 2)
    } else {
        (order_stat(v, n / 2 - 1) + order_stat(v, n / 2)) / 2.0
    }
}

/// Mean and sd from integer sums (scores are integral).
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as i64;
    let s: i64 = v.iter().map(|x| *x as i64).sum();
    let ss: i64 = v.iter().map(|x| (*x as i64) * (*x as i64)).sum();
    let mean = s as f64 / n as f64;
    let sd = if n > 1 {
        (((n * ss - s * s) as f64) / ((n * (n - 1)) as f64)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

/// Pearson via pairwise differences: sum_{i<j} (a_i-a_j)(b_i-b_j) / sqrt(...)
pub fn pairwise_corr(a: &[f64], b: &[f64]) -> Option<f64> {
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (da, db) = (a[i] - a[j], b[i] - b[j]);
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Two-sided normal tail by Simpson integration of the density over [0, |z|].
pub fn normal_two_sided(z: f64) -> f64 {
    let z = z.abs();
    if z == 0.0 {
        return 1.0;
    }
    let n = 2_000;
    let h = z / n as f64;
    let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(0.0) + pdf(z);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(i as f64 * h);
    }
    1.0 - 2.0 * acc * h / 3.0
}

/// Signed-rank Z from the definition, ties via explicit group counting.
pub fn wilcoxon_z(d: &[f64]) -> Option<f64> {
    let nz: Vec<f64> = d.iter().copied().filter(|x| *x != 0.0).collect();
    if nz.is_empty() {
        return None;
    }
    let abs: Vec<f64> = nz.iter().map(|x| x.abs()).collect();
    let r = ranks(&abs);
    let w: f64 = nz.iter().zip(&r).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let n = nz.len() as f64;
    let mut seen: Vec<f64> = Vec::new();
    let mut tie = 0.0;
    for a in &abs {
        if !seen.contains(a) {
            seen.push(*a);
            let t = abs.iter().filter(|b| *b == a).count() as f64;
            tie += t * t * t - t;
        }
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie / 48.0;
    Some((w - n * (n + 1.0) / 4.0) / var.sqrt())
}

/// Cronbach's alpha from the covariance-matrix form: k/(k-1) (1 - tr C / sum C).
pub fn alpha(cols: &[Vec<f64>]) -> f64 {
    let k = cols.len();
    let n = cols[0].len() as f64;
    let mean = |c: &[f64]| c.iter().sum::<f64>() / n;
    let cov = |a: &[f64], b: &[f64]| {
        let (ma, mb) = (mean(a), mean(b));
        a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0)
    };
    let mut total = 0.0;
    let mut trace = 0.0;
    for i in 0..k {
        for j in 0..k {
            let c = cov(&cols[i], &cols[j]);
            total += c;
            if i == j {
                trace += c;
            }
        }
    }
    k as f64 / (k as f64 - 1.0) * (1.0 - trace / total)
}
