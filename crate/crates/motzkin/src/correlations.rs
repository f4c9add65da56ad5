//! One- and two-point spin correlators in the uniform walk ground state.
//!
//! Heights H_b decompose over the tripartite profile (m, p, q) of the walk
//! around the probed sites, so every exact correlator here reduces to sums of
//! products of three counting rows. The brute-force operator oracle at the
//! bottom is the ground truth for all of it at small n.

use crate::arith::{ArithmeticMode, DEFAULT_PRECISION_BITS};
use crate::combinatorics::{self, exact_row, float_rows, sigma, FloatRows};
use crate::walks;
use num_complex::Complex64;
use rayon::prelude::*;
use rug::ops::{CompleteRound, Pow};
use rug::{Assign, Float, Integer};
use std::collections::{HashMap, HashSet};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum CorrelationsError {
    #[error("invalid correlator geometry")]
    BadGeometry,
    #[error("counting failed: {0}")]
    Counting(#[from] combinatorics::CombinatoricsError),
    #[error("enumeration failed: {0}")]
    Walks(#[from] walks::WalksError),
    #[error("operation requires s = 1, got s = {0}")]
    ColorlessOnly(u32),
    #[error("operation requires s >= 2")]
    ColorfulOnly,
    #[error("distribution would hold {0} entries, above the materialization guard")]
    TooManyEntries(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinOperatorKind {
    Sx,
    Sy,
    Sz,
    SPlus,
    SMinus,
}

/// Dense (2s+1) x (2s+1) spin operator; row/column index i encodes the spin
/// value i - s.
#[derive(Clone, Debug)]
pub struct SpinOperator {
    pub kind: SpinOperatorKind,
    pub s: u32,
    pub matrix: Vec<Vec<Complex64>>,
}

impl SpinOperator {
    pub fn new(kind: SpinOperatorKind, s: u32) -> Self {
        let dim = (2 * s + 1) as usize;
        let sf = s as f64;
        let mut plus = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim - 1 {
            let m = col as f64 - sf;
            plus[col + 1][col] = Complex64::new((sf * (sf + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let matrix = match kind {
            SpinOperatorKind::SPlus => plus,
            SpinOperatorKind::SMinus => transpose(&plus),
            SpinOperatorKind::Sz => {
                let mut mat = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
                for i in 0..dim {
                    mat[i][i] = Complex64::new(i as f64 - sf, 0.0);
                }
                mat
            }
            SpinOperatorKind::Sx => {
                let minus = transpose(&plus);
                combine(&plus, &minus, Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0))
            }
            SpinOperatorKind::Sy => {
                let minus = transpose(&plus);
                combine(
                    &plus,
                    &minus,
                    Complex64::new(0.0, -0.5),
                    Complex64::new(0.0, 0.5),
                )
            }
        };
        SpinOperator { kind, s, matrix }
    }
}

fn transpose(m: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let dim = m.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j][i] = m[i][j];
        }
    }
    out
}

fn combine(
    a: &[Vec<Complex64>],
    b: &[Vec<Complex64>],
    ca: Complex64,
    cb: Complex64,
) -> Vec<Vec<Complex64>> {
    let dim = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i][j] = ca * a[i][j] + cb * b[i][j];
        }
    }
    out
}

/// Correlator value with its numerical pedigree.
#[derive(Clone, Debug)]
pub struct CorrelatorReport {
    pub value: f64,
    /// Matching closed-form asymptotic value, when one exists.
    pub asymptotic: Option<f64>,
    /// Named auxiliary terms: omitted-term ceilings, literal closed-form
    /// variants, cascade fractions.
    pub finite_size_terms: Vec<(String, f64)>,
    pub precision_bits: u32,
    /// Absolute bound on the accumulated numerical error of `value`.
    pub error_bound: f64,
    /// Set when the error bound is not at least 10x below |value|.
    pub unreliable: bool,
}

fn make_report(
    value: f64,
    asymptotic: Option<f64>,
    finite_size_terms: Vec<(String, f64)>,
    precision_bits: u32,
    error_bound: f64,
) -> CorrelatorReport {
    CorrelatorReport {
        value,
        asymptotic,
        finite_size_terms,
        precision_bits,
        error_bound,
        unreliable: error_bound > value.abs() / 10.0,
    }
}

/// Exact <S^z_b> (sites are 1-indexed): E[H_b] - E[H_{b-1}] where
/// E[H_b] = (s+1)/2 * E[m] under Pr(m) proportional to s^m M_{b,m} M_{n-b,m}.
pub fn sz_expectation_exact(
    n: usize,
    b: usize,
    s: u32,
    mode: ArithmeticMode,
) -> Result<CorrelatorReport, CorrelationsError> {
    if b == 0 || b > n || s == 0 {
        return Err(CorrelationsError::BadGeometry);
    }
    let asym = Some(sz_expectation_asymptotic(n, b, s));
    match mode {
        ArithmeticMode::Exact => {
            let (num, den) = (eh_exact(n, b, s)?, eh_exact(n, b - 1, s)?);
            let prec = 192;
            let eb = Float::with_val(prec, &num.0) / &num.1;
            let ebm1 = Float::with_val(prec, &den.0) / &den.1;
            let v = (eb - ebm1).to_f64() * (s as f64 + 1.0) / 2.0;
            Ok(make_report(v, asym, vec![], u32::MAX, 0.0))
        }
        ArithmeticMode::LogFloat { precision_bits } => {
            let fr = float_rows(s, &[b, n - b, b - 1, n - b + 1], precision_bits);
            let (eb, err_b) = eh_float(n, b, s, &fr);
            let (ebm1, err_bm1) = eh_float(n, b - 1, s, &fr);
            let v = (eb - ebm1).to_f64() * (s as f64 + 1.0) / 2.0;
            let err = (err_b + err_bm1) * (s as f64 + 1.0) / 2.0;
            Ok(make_report(v, asym, vec![], precision_bits, err))
        }
    }
}

/// Exact (num, den) of E[m] at the cut b: num = sum m s^m M M, den = sum s^m M M.
fn eh_exact(n: usize, b: usize, s: u32) -> Result<(Integer, Integer), CorrelationsError> {
    if b == 0 || b == n {
        return Ok((Integer::new(), Integer::from(1)));
    }
    let (left, right) = (exact_row(s, b)?, exact_row(s, n - b)?);
    let mut num = Integer::new();
    let mut den = Integer::new();
    let mut spow = Integer::from(1);
    for m in 0..=b.min(n - b) {
        let w = Integer::from(&left[m] * &right[m]) * &spow;
        num += Integer::from(&w * m as u64);
        den += w;
        spow *= s;
    }
    Ok((num, den))
}

fn eh_float(n: usize, b: usize, s: u32, fr: &FloatRows) -> (Float, f64) {
    let prec = fr.precision_bits;
    if b == 0 || b == n {
        return (Float::with_val(prec, 0), 0.0);
    }
    let (left, right) = (&fr.rows[&b], &fr.rows[&(n - b)]);
    let mut num = Float::with_val(prec, 0);
    let mut den = Float::with_val(prec, 0);
    let mut spow = Float::with_val(prec, 1);
    for m in 0..=b.min(n - b).min(fr.mcap) {
        let mut w = left[m].clone();
        w *= &right[m];
        w *= &spow;
        num += (&w * m as u64).complete(prec);
        den += w;
        spow *= s;
    }
    let e = Float::with_val(prec, &num) / &den;
    // positive sums: relative error grows linearly in the op count; the DP
    // rows carry their own bound
    let eps = (2.0f64).powi(1 - prec as i32);
    let rel = 2.0 * fr.rel_error_bound(n.max(b)) + 8.0 * b as f64 * eps;
    let err = e.to_f64().abs() * rel;
    (e, err)
}

/// Closed-form bulk magnetization (s+1) sqrt(sigma/pi) (1 - 2b/n)/sqrt(beta).
pub fn sz_expectation_asymptotic(n: usize, b: usize, s: u32) -> f64 {
    let sig = sigma(s);
    let (bf, nf) = (b as f64, n as f64);
    let beta = bf * (1.0 - bf / nf);
    (s as f64 + 1.0) * (sig / PI).sqrt() * (1.0 - 2.0 * bf / nf) / beta.sqrt()
}

/// Closed-form bulk <S^z_b S^z_{b+L}>: -(1/24) sqrt(sigma/pi) (s^2-1) L^(-3/2),
/// identically zero in the colorless model.
pub fn szsz_asymptotic(l: usize, s: u32) -> f64 {
    if s == 1 {
        return 0.0;
    }
    let sig = sigma(s);
    -(sig / PI).sqrt() * ((s as f64).powi(2) - 1.0) / 24.0 * (l as f64).powf(-1.5)
}

/// Exact <S^z_i S^z_j> (1-indexed, i < j) as the second difference
/// E[H_i H_j] - E[H_{i-1} H_j] - E[H_i H_{j-1}] + E[H_{i-1} H_{j-1}],
/// each term averaged over the tripartite (m, p, q) distribution with
/// E[H_a H_c | m,p,q] = ((s+1)/2)^2 (m^2 - mp + mq) + (m-p)(s^2-1)/12.
///
/// The four terms are O(sigma n) while their alternating sum is O(L^(-3/2)),
/// so everything is kept in extended precision until the final subtraction;
/// `precision_bits = None` picks 128 bits for n <= 10^4 and 256 above.
pub fn szsz_exact(
    n: usize,
    i: usize,
    j: usize,
    s: u32,
    precision_bits: Option<u32>,
) -> Result<CorrelatorReport, CorrelationsError> {
    if s == 0 || i == 0 || i >= j || j > n {
        return Err(CorrelationsError::BadGeometry);
    }
    let prec = precision_bits.unwrap_or(if n > 10_000 { 256 } else { DEFAULT_PRECISION_BITS });
    let lengths = [i - 1, i, j - i - 1, j - i, j - i + 1, n - j, n - j + 1];
    let fr = float_rows(s, &lengths, prec);
    let spow = spow_table(s, fr.mcap + 1, prec);
    Ok(szsz_with_rows(n, i, j, s, &fr, &spow))
}

/// Batch of exact <S^z_i S^z_j> sharing one counting pass; pairs are
/// 1-indexed (i, j) with i < j <= n.
pub fn szsz_sweep(
    n: usize,
    s: u32,
    pairs: &[(usize, usize)],
    precision_bits: Option<u32>,
) -> Result<Vec<CorrelatorReport>, CorrelationsError> {
    if s == 0 || pairs.iter().any(|&(i, j)| i == 0 || i >= j || j > n) {
        return Err(CorrelationsError::BadGeometry);
    }
    let prec = precision_bits.unwrap_or(if n > 10_000 { 256 } else { DEFAULT_PRECISION_BITS });
    let mut lengths = Vec::with_capacity(pairs.len() * 7);
    for &(i, j) in pairs {
        lengths.extend([i - 1, i, j - i - 1, j - i, j - i + 1, n - j, n - j + 1]);
    }
    let fr = float_rows(s, &lengths, prec);
    let spow = spow_table(s, fr.mcap + 1, prec);
    Ok(pairs
        .iter()
        .map(|&(i, j)| szsz_with_rows(n, i, j, s, &fr, &spow))
        .collect())
}

fn szsz_with_rows(
    n: usize,
    i: usize,
    j: usize,
    s: u32,
    fr: &FloatRows,
    spow: &[Float],
) -> CorrelatorReport {
    let prec = fr.precision_bits;
    let mut total = Float::with_val(prec, 0);
    let mut err = 0.0f64;
    for (a, c, sign) in [
        (i, j, 1.0),
        (i - 1, j, -1.0),
        (i, j - 1, -1.0),
        (i - 1, j - 1, 1.0),
    ] {
        let (e, e_err) = e_hh(n, a, c, s, fr, spow);
        if sign > 0.0 {
            total += e;
        } else {
            total -= e;
        }
        err += e_err;
    }
    let value = total.to_f64();
    make_report(value, Some(szsz_asymptotic(j - i, s)), vec![], prec, err)
}

fn spow_table(s: u32, top: usize, prec: u32) -> Vec<Float> {
    let mut out = Vec::with_capacity(top + 1);
    out.push(Float::with_val(prec, 1));
    for m in 1..=top {
        out.push((&out[m - 1] * s).complete(prec));
    }
    out
}

/// E[H_a H_c] (0 when a = 0 or c = n) over the tripartite split
/// (prefix a, middle c-a, tail n-c). Factorized per Delta = q - p with
/// suffix sums over m of s^m M_{a,m} M_{tail,m+Delta} weighted by
/// {1, m, m^2}; returns the expectation and an absolute error bound.
fn e_hh(n: usize, a: usize, c: usize, s: u32, fr: &FloatRows, spow: &[Float]) -> (Float, f64) {
    let prec = fr.precision_bits;
    if a == 0 || c == n {
        return (Float::with_val(prec, 0), 0.0);
    }
    let (lmid, tail) = (c - a, n - c);
    let row_a = &fr.rows[&a];
    let row_mid = &fr.rows[&lmid];
    let row_tail = &fr.rows[&tail];
    let mtop = a.min(fr.mcap);
    let eta_top = lmid.min(fr.mcap);
    let c1 = ((s as f64 + 1.0) / 2.0).powi(2);
    let c2 = ((s as f64).powi(2) - 1.0) / 12.0;
    let eps = (2.0f64).powi(1 - prec as i32);

    // one independent accumulator per Delta, merged in a fixed order
    let parts: Vec<(Float, Float, Float)> = (-(eta_top as i64)..=eta_top as i64)
        .into_par_iter()
        .map(|delta| {
            let pstart = 0.max(-delta) as usize;
            let pmax = ((eta_top as i64 - delta) / 2).min(mtop as i64);
            let mut num = Float::with_val(prec, 0);
            let mut den = Float::with_val(prec, 0);
            let mut abs_num = Float::with_val(prec, 0);
            if pmax < pstart as i64 {
                return (num, den, abs_num);
            }
            let pmax = pmax as usize;
            // suffix sums T_k(p) = sum_{m >= p} s^m M_{a,m} M_{tail,m+Delta} m^k
            let zero = Float::with_val(prec, 0);
            let mut t0 = vec![zero.clone(); pmax + 1];
            let mut t1 = vec![zero.clone(); pmax + 1];
            let mut t2 = vec![zero; pmax + 1];
            let mut acc0 = Float::with_val(prec, 0);
            let mut acc1 = Float::with_val(prec, 0);
            let mut acc2 = Float::with_val(prec, 0);
            for m in (0..=mtop).rev() {
                let mt = m as i64 + delta;
                if mt >= 0 && (mt as usize) < row_tail.len() {
                    let mut w = row_a[m].clone();
                    w *= &row_tail[mt as usize];
                    w *= &spow[m];
                    acc1 += (&w * m as u64).complete(prec);
                    acc2 += (&w * (m as u64 * m as u64)).complete(prec);
                    acc0 += w;
                }
                if m <= pmax {
                    t0[m].assign(&acc0);
                    t1[m].assign(&acc1);
                    t2[m].assign(&acc2);
                }
            }
            for p in pstart..=pmax {
                let q = (p as i64 + delta) as usize;
                let eta = p + q;
                if eta > eta_top {
                    break;
                }
                let mut wf = row_mid[eta].clone();
                wf *= &spow[q];
                if wf.is_zero() {
                    continue;
                }
                // c1 (T2 + (q-p) T1) + c2 (T1 - p T0); each grouped term is a
                // sum of nonnegative per-walk contributions
                let mut bracket = (&t1[p] * (q as i64 - p as i64)).complete(prec);
                bracket += &t2[p];
                bracket *= c1;
                let mut corr = (&t0[p] * p as u64).complete(prec);
                corr = &t1[p] - corr;
                corr *= c2;
                bracket += corr;
                // error scale uses the cancellation-free absolute version
                let mut abs_scale = (&t1[p] * (q + p) as u64).complete(prec);
                abs_scale += &t2[p];
                abs_scale *= c1;
                let mut abs_corr = (&t0[p] * p as u64).complete(prec);
                abs_corr += &t1[p];
                abs_corr *= c2;
                abs_scale += abs_corr;
                abs_num += abs_scale * &wf;
                num += (&bracket * &wf).complete(prec);
                den += (&t0[p] * &wf).complete(prec);
            }
            (num, den, abs_num)
        })
        .collect();
    let mut num = Float::with_val(prec, 0);
    let mut den = Float::with_val(prec, 0);
    let mut abs_num = Float::with_val(prec, 0);
    for (pn, pd, pa) in parts {
        num += pn;
        den += pd;
        abs_num += pa;
    }
    let e = Float::with_val(prec, &num) / &den;
    let ef = e.to_f64();
    // the denominator's own cancellation-free sum is the denominator itself,
    // so its relative error contributes t_rel * |E| directly
    let t_rel = (6 * mtop + 16) as f64 * eps;
    let abs_ratio = (abs_num / &den).to_f64();
    let err = t_rel * abs_ratio + ef.abs() * (t_rel + eps);
    (e, err)
}

/// Exact tripartite profile distribution Pr(m, p, q) for the split
/// (prefix b, middle l, tail n-b-l), weight s^(m+q) M_{b,m} M_{l,p+q}
/// M_{n-b-l,m+q-p} on the support p <= m.
#[derive(Clone, Debug)]
pub struct TripartiteDistribution {
    pub n: usize,
    pub s: u32,
    pub b: usize,
    pub l: usize,
    /// (m, p, q, probability), nonzero entries only.
    pub entries: Vec<(usize, usize, usize, f64)>,
}

pub fn tripartite_distribution(
    n: usize,
    s: u32,
    b: usize,
    l: usize,
    precision_bits: u32,
) -> Result<TripartiteDistribution, CorrelationsError> {
    if s == 0 || b == 0 || b + l > n {
        return Err(CorrelationsError::BadGeometry);
    }
    let cells = b as u64 * (l as u64 + 1) * (l as u64 + 1);
    if cells > 10_000_000 {
        return Err(CorrelationsError::TooManyEntries(cells));
    }
    let prec = precision_bits;
    let fr = float_rows(s, &[b, l, n - b - l], prec);
    let (rb, rl, rt) = (&fr.rows[&b], &fr.rows[&l], &fr.rows[&(n - b - l)]);
    let mut raw: Vec<(usize, usize, usize, Float)> = Vec::new();
    let mut z = Float::with_val(prec, 0);
    for m in 0..=b.min(fr.mcap) {
        for p in 0..=m.min(l) {
            for q in 0..=(l - p) {
                let mt = m + q - p;
                if mt >= rt.len() {
                    continue;
                }
                let mut w = rb[m].clone();
                w *= &rl[p + q];
                w *= &rt[mt];
                w *= Integer::from(s).pow((m + q) as u32);
                if w.is_zero() {
                    continue;
                }
                z += &w;
                raw.push((m, p, q, w));
            }
        }
    }
    let entries = raw
        .into_iter()
        .map(|(m, p, q, w)| (m, p, q, (w / &z).to_f64()))
        .collect();
    Ok(TripartiteDistribution { n, s, b, l, entries })
}

/// Exact colorless joint step distribution Pr(w_b, w_{b+L}) over the nine
/// step pairs, from counting rows for the three segments between the probed
/// sites (lengths b-1, L-1, n-b-L).
#[derive(Clone, Debug)]
pub struct StepPairDistribution {
    pub n: usize,
    pub b: usize,
    pub l: usize,
    /// probs[wi + 1][wj + 1] = Pr(w_b = wi, w_{b+L} = wj).
    pub probs: [[f64; 3]; 3],
}

impl StepPairDistribution {
    pub fn marginal_b(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, row) in self.probs.iter().enumerate() {
            out[i] = row.iter().sum();
        }
        out
    }

    pub fn marginal_bl(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for row in &self.probs {
            for (j, v) in row.iter().enumerate() {
                out[j] += v;
            }
        }
        out
    }
}

pub fn step_pair_distribution(
    n: usize,
    b: usize,
    l: usize,
) -> Result<StepPairDistribution, CorrelationsError> {
    if b == 0 || l < 2 || b + l > n {
        return Err(CorrelationsError::BadGeometry);
    }
    let (al, mid, cl) = (b - 1, l - 1, n - b - l);
    let ra = exact_row(1, al)?;
    let rm = exact_row(1, mid)?;
    let rc = exact_row(1, cl)?;
    let mut table: [[Integer; 3]; 3] = Default::default();
    let mut total = Integer::new();
    for (wi_idx, wi) in (-1i64..=1).enumerate() {
        for (wj_idx, wj) in (-1i64..=1).enumerate() {
            let mut count = Integer::new();
            for m in 0..=al {
                let m1 = m as i64 + wi;
                if m1 < 0 {
                    continue;
                }
                for p in 0..=(m1 as usize).min(mid) {
                    for q in 0..=(mid - p) {
                        let m3 = m1 - p as i64 + q as i64 + wj;
                        if m3 < 0 || m3 as usize > cl {
                            continue;
                        }
                        count += Integer::from(&ra[m] * &rm[p + q]) * &rc[m3 as usize];
                    }
                }
            }
            total += &count;
            table[wi_idx][wj_idx] = count;
        }
    }
    let mut probs = [[0.0; 3]; 3];
    let tf = Float::with_val(128, &total);
    for i in 0..3 {
        for j in 0..3 {
            probs[i][j] = (Float::with_val(128, &table[i][j]) / &tf).to_f64();
        }
    }
    Ok(StepPairDistribution { n, b, l, probs })
}

/// Colorless <S^x_b S^x_{b+L}> from the step-pair table:
/// 2<SxSx> = sum_{w != w'} Pr + 2 Pr(0,0) - Pr(w_b in {0,1}, w_{b+L} in {-1,0}, E),
/// where E is the event that lowering the step at b drives some height in
/// [b, b+L) negative, i.e. the original walk touches height zero there.
///
/// With `include_event_e = false` the E term is dropped and its ceiling
/// 4 L sqrt(sigma/pi) / (sqrt(b) sqrt(n (b+L))) is reported; with the flag
/// set it is counted exactly by walk enumeration (small n only).
pub fn sxsx_colorless(
    n: usize,
    b: usize,
    l: usize,
    include_event_e: bool,
) -> Result<CorrelatorReport, CorrelationsError> {
    let table = step_pair_distribution(n, b, l)?;
    let mut twice = 0.0;
    for wi in 0..3 {
        for wj in 0..3 {
            if wi != wj {
                twice += table.probs[wi][wj];
            }
        }
    }
    twice += 2.0 * table.probs[1][1];
    let sig = sigma(1);
    let e_bound =
        4.0 * l as f64 * (sig / PI).sqrt() / ((b as f64).sqrt() * (n as f64 * (b + l) as f64).sqrt());
    let mut terms = vec![("event_e_bound".to_string(), e_bound)];
    let asym = Some(4.0 / 9.0 + 5.0 / (18.0 * sig * n as f64));
    terms.push((
        "constancy_printed_form".to_string(),
        4.0 / 9.0 + 7.0 / (18.0 * n as f64),
    ));
    let mut value = twice / 2.0;
    let mut err = 1e-15 * value.abs();
    if include_event_e {
        let walks_list = walks::enumerate_walks(n, 1)?;
        let m_n = walks_list.len() as f64;
        let mut bad = 0u64;
        for w in &walks_list {
            let wi = w.steps[b - 1];
            let wj = w.steps[b + l - 1];
            if !(wi == 0 || wi == 1) || !(wj == -1 || wj == 0) {
                continue;
            }
            let mut h = 0i64;
            let mut touches = false;
            for (k, &st) in w.steps.iter().enumerate() {
                h += st as i64;
                if k + 1 >= b && k + 1 < b + l && h == 0 {
                    touches = true;
                    break;
                }
            }
            if touches {
                bad += 1;
            }
        }
        let pr_e = bad as f64 / m_n;
        terms.push(("event_e_exact".to_string(), pr_e));
        value -= pr_e / 2.0;
        err += 1e-15 * pr_e;
    }
    Ok(make_report(value, asym, terms, u32::MAX, err))
}

/// Colorful <S^x_b S^x_{b+L}>: dominant term (s(s+1)(s+2)/3) P_L with
/// P_L = M_{L-2} M_{n-L} / M_n, the probability of the step pattern that a
/// single Sx Sx transition needs. Reported alongside: the bulk asymptote
/// (s+1)(s+2)/6 sqrt(sigma/pi) L^(-3/2), the same expression with the
/// spurious extra sigma^2 factor it is sometimes quoted with, and the
/// cascade-correction ceiling 8 / (sqrt(pi) sigma^(3/2) ln(s)^3) n^(-3/2).
pub fn sxsx_colorful(n: usize, l: usize, s: u32) -> Result<CorrelatorReport, CorrelationsError> {
    if s < 2 {
        return Err(CorrelationsError::ColorfulOnly);
    }
    if l < 2 || l > n {
        return Err(CorrelationsError::BadGeometry);
    }
    let prec = DEFAULT_PRECISION_BITS;
    let fr = float_rows(s, &[l - 2, n - l, n], prec);
    let mut pl = fr.rows[&(l - 2)][0].clone();
    pl *= &fr.rows[&(n - l)][0];
    let p_l = (pl / &fr.rows[&n][0]).to_f64();
    let sf = s as f64;
    let dominant = sf * (sf + 1.0) * (sf + 2.0) / 3.0 * p_l;
    let sig = sigma(s);
    let asym = (sf + 1.0) * (sf + 2.0) / 6.0 * (sig / PI).sqrt() * (l as f64).powf(-1.5);
    let cascade = 8.0 / (PI.sqrt() * sig.powf(1.5) * sf.ln().powi(3)) * (n as f64).powf(-1.5);
    let terms = vec![
        ("asymptote_with_sigma_sq".to_string(), asym * sig * sig),
        ("cascade_fraction".to_string(), cascade),
        ("transition_probability".to_string(), p_l),
    ];
    let err = p_l * fr.rel_error_bound(n) * 3.0 * sf.powi(3);
    Ok(make_report(dominant, Some(asym), terms, prec, err))
}

/// Ground-truth expectation <psi_GS| prod ops |psi_GS> by applying the
/// operator matrices (in the listed order, leftmost first) to every
/// enumerated walk. Sites are 1-indexed.
pub fn bruteforce_correlator(
    n: usize,
    s: u32,
    ops: &[(usize, SpinOperator)],
) -> Result<Complex64, CorrelationsError> {
    for (site, op) in ops {
        if *site == 0 || *site > n || op.s != s {
            return Err(CorrelationsError::BadGeometry);
        }
    }
    let list = walks::enumerate_walks(n, s)?;
    let m_n = list.len() as f64;
    let valid: HashSet<Vec<walks::Step>> = list.iter().map(|w| w.steps.clone()).collect();
    let mut state: HashMap<Vec<walks::Step>, Complex64> = list
        .iter()
        .map(|w| (w.steps.clone(), Complex64::new(1.0, 0.0)))
        .collect();
    let si = s as i32;
    for (site, op) in ops.iter().rev() {
        let idx = site - 1;
        let mut next: HashMap<Vec<walks::Step>, Complex64> = HashMap::with_capacity(state.len());
        for (cfg, amp) in state {
            let old = (cfg[idx] + si) as usize;
            for (new, row) in op.matrix.iter().enumerate() {
                let elem = row[old];
                if elem.norm_sqr() == 0.0 {
                    continue;
                }
                let mut ncfg = cfg.clone();
                ncfg[idx] = new as i32 - si;
                *next.entry(ncfg).or_insert(Complex64::new(0.0, 0.0)) += amp * elem;
            }
        }
        state = next;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (cfg, amp) in &state {
        if valid.contains(cfg) {
            total += amp;
        }
    }
    Ok(total / m_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn op(kind: SpinOperatorKind, s: u32) -> SpinOperator {
        SpinOperator::new(kind, s)
    }

    #[test]
    fn sz_small_example() {
        let r = sz_expectation_exact(2, 1, 1, ArithmeticMode::Exact).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn sz_matches_bruteforce() {
        for s in 1..=2u32 {
            for n in 2..=7usize {
                for b in 1..=n {
                    let exact = sz_expectation_exact(n, b, s, ArithmeticMode::Exact)
                        .unwrap()
                        .value;
                    let oracle = bruteforce_correlator(n, s, &[(b, op(SpinOperatorKind::Sz, s))])
                        .unwrap();
                    assert_abs_diff_eq!(exact, oracle.re, epsilon = 1e-12);
                    assert_abs_diff_eq!(oracle.im, 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn sz_reflection_antisymmetry() {
        for (n, s) in [(8usize, 1u32), (8, 2), (10, 2)] {
            let a = sz_expectation_exact(n, n / 2, s, ArithmeticMode::Exact)
                .unwrap()
                .value;
            let b = sz_expectation_exact(n, n / 2 + 1, s, ArithmeticMode::Exact)
                .unwrap()
                .value;
            assert_abs_diff_eq!(a, -b, epsilon = 1e-12);
        }
    }

    #[test]
    fn sz_tracks_asymptotic_at_scale() {
        let mode = ArithmeticMode::log_float(128).unwrap();
        let r = sz_expectation_exact(10_000, 1000, 2, mode).unwrap();
        let asym = r.asymptotic.unwrap();
        assert!(
            (r.value - asym).abs() / asym.abs() < 0.05,
            "exact {} vs asym {asym}",
            r.value
        );
        assert!(!r.unreliable);
    }

    #[test]
    fn sz_asymptotic_examples() {
        assert_abs_diff_eq!(sz_expectation_asymptotic(1000, 500, 2), 0.0, epsilon = 1e-15);
        let v = sz_expectation_asymptotic(1000, 100, 1);
        let direct = 2.0 / (3.0 * PI).sqrt() * (1.0 - 0.2) / (100.0f64 * 0.9).sqrt();
        assert_abs_diff_eq!(v, direct, epsilon = 1e-12);
        let w = sz_expectation_asymptotic(1000, 900, 1);
        assert_abs_diff_eq!(v, -w, epsilon = 1e-15);
    }

    #[test]
    fn szsz_matches_bruteforce() {
        for s in 1..=2u32 {
            for n in 3..=7usize {
                for i in 1..n {
                    for j in (i + 1)..=n {
                        let r = szsz_exact(n, i, j, s, Some(128)).unwrap();
                        let oracle = bruteforce_correlator(
                            n,
                            s,
                            &[(i, op(SpinOperatorKind::Sz, s)), (j, op(SpinOperatorKind::Sz, s))],
                        )
                        .unwrap();
                        assert_abs_diff_eq!(r.value, oracle.re, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn szsz_asymptotic_values() {
        assert_eq!(szsz_asymptotic(50, 1), 0.0);
        let v = szsz_asymptotic(100, 2);
        let direct = -(0.369_398_85f64 / PI).sqrt() * 3.0 / 24.0 * 1e-3;
        assert!((v - direct).abs() < 1e-9, "{v} vs {direct}");
        assert!(szsz_asymptotic(100, 2).abs() > szsz_asymptotic(200, 2).abs());
    }

    #[test]
    fn szsz_negative_in_bulk() {
        let r = szsz_exact(2000, 980, 1020, 2, None).unwrap();
        assert!(r.value < 0.0);
        assert!(!r.unreliable);
    }

    #[test]
    fn tripartite_normalized_with_support() {
        for (n, s, b, l) in [(10usize, 2u32, 3usize, 4usize), (60, 1, 20, 10), (60, 3, 25, 5)] {
            let d = tripartite_distribution(n, s, b, l, 128).unwrap();
            let total: f64 = d.entries.iter().map(|e| e.3).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(d.entries.iter().all(|&(m, p, _, _)| p <= m));
        }
    }

    #[test]
    fn step_pair_matches_enumeration() {
        for (n, b, l) in [(6usize, 2usize, 2usize), (8, 3, 3), (9, 2, 5)] {
            let table = step_pair_distribution(n, b, l).unwrap();
            let list = walks::enumerate_walks(n, 1).unwrap();
            let m_n = list.len() as f64;
            let mut freq = [[0.0f64; 3]; 3];
            for w in &list {
                let wi = (w.steps[b - 1] + 1) as usize;
                let wj = (w.steps[b + l - 1] + 1) as usize;
                freq[wi][wj] += 1.0 / m_n;
            }
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(table.probs[i][j], freq[i][j], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn step_pair_sums_and_marginals() {
        let n = 400;
        let b = 150;
        let l = 20;
        let table = step_pair_distribution(n, b, l).unwrap();
        let total: f64 = table.probs.iter().flatten().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let mb = table.marginal_b();
        let sz = sz_expectation_exact(n, b, 1, ArithmeticMode::Exact).unwrap().value;
        assert_abs_diff_eq!(mb[2] - mb[0], sz, epsilon = 1e-12);
        let mj = table.marginal_bl();
        let szj = sz_expectation_exact(n, b + l, 1, ArithmeticMode::Exact)
            .unwrap()
            .value;
        assert_abs_diff_eq!(mj[2] - mj[0], szj, epsilon = 1e-12);
    }

    #[test]
    fn step_pair_grouping_at_scale() {
        let n = 2000;
        let l = 10;
        let b = (n - l) / 2;
        let t = step_pair_distribution(n, b, l).unwrap();
        let p = &t.probs;
        // groups by |w_b + w_{b+L}|: deviations grow with the squared sum
        let g0 = [p[0][2], p[1][1], p[2][0]];
        let g1 = [p[0][1], p[1][0], p[1][2], p[2][1]];
        let g2 = [p[0][0], p[2][2]];
        let min0 = g0.iter().cloned().fold(f64::INFINITY, f64::min);
        let max1 = g1.iter().cloned().fold(0.0, f64::max);
        let min1 = g1.iter().cloned().fold(f64::INFINITY, f64::min);
        let max2 = g2.iter().cloned().fold(0.0, f64::max);
        assert!(min0 > max1, "group0 {g0:?} vs group1 {g1:?}");
        assert!(min1 > max2, "group1 {g1:?} vs group2 {g2:?}");
    }

    #[test]
    fn sxsx_colorless_constancy() {
        let n = 2000;
        let r = sxsx_colorless(n, (n - 10) / 2, 10, false).unwrap();
        let target = 4.0 / 9.0 + 7.0 / (18.0 * n as f64);
        assert!((r.value - target).abs() < 1e-3, "{} vs {target}", r.value);
        let bound = r
            .finite_size_terms
            .iter()
            .find(|t| t.0 == "event_e_bound")
            .unwrap()
            .1;
        assert!(bound < 1e-3);
    }

    #[test]
    fn sxsx_colorless_oracle_with_event_e() {
        let n = 12;
        let l = 4;
        let b = (n - l) / 2;
        let r = sxsx_colorless(n, b, l, true).unwrap();
        let oracle = bruteforce_correlator(
            n,
            1,
            &[(b, op(SpinOperatorKind::Sx, 1)), (b + l, op(SpinOperatorKind::Sx, 1))],
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, oracle.re, epsilon = 1e-12);
    }

    #[test]
    fn sxsx_colorful_report() {
        // cascade ceiling at n = 10^4, s = 2
        let r = sxsx_colorful(10_000, 100, 2).unwrap();
        let cascade = r
            .finite_size_terms
            .iter()
            .find(|t| t.0 == "cascade_fraction")
            .unwrap()
            .1;
        assert!(cascade < 1e-4, "cascade {cascade}");
        // dominant term approaches the corrected asymptote in the bulk
        let r = sxsx_colorful(100_000, 400, 2).unwrap();
        let rel = (r.value - r.asymptotic.unwrap()).abs() / r.asymptotic.unwrap();
        assert!(rel < 0.05, "rel {rel}");
    }

    #[test]
    fn sxsx_colorful_small_n_oracle_band() {
        let n = 12;
        let l = 4;
        let s = 2;
        let r = sxsx_colorful(n, l, s).unwrap();
        let oracle = bruteforce_correlator(
            n,
            s,
            &[(1, op(SpinOperatorKind::Sx, s)), (1 + l, op(SpinOperatorKind::Sx, s))],
        )
        .unwrap();
        // finite-n corrections are large here; the dominant term is within 2x
        let ratio = r.value / oracle.re;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "dominant {} vs oracle {} (ratio {ratio})",
            r.value,
            oracle.re
        );
    }

    #[test]
    fn symmetry_zeros() {
        for s in 1..=2u32 {
            for n in 3..=6usize {
                for i in 1..=n {
                    let sx = bruteforce_correlator(n, s, &[(i, op(SpinOperatorKind::Sx, s))])
                        .unwrap();
                    let sy = bruteforce_correlator(n, s, &[(i, op(SpinOperatorKind::Sy, s))])
                        .unwrap();
                    assert!(sx.norm() < 1e-12 && sy.norm() < 1e-12);
                }
                let (i, j) = (1, n);
                for (a, b) in [
                    (SpinOperatorKind::Sx, SpinOperatorKind::Sy),
                    (SpinOperatorKind::Sz, SpinOperatorKind::Sy),
                    (SpinOperatorKind::Sz, SpinOperatorKind::Sx),
                ] {
                    let v = bruteforce_correlator(n, s, &[(i, op(a, s)), (j, op(b, s))]).unwrap();
                    assert!(v.norm() < 1e-12, "{a:?}{b:?} s={s} n={n}: {v}");
                }
                let xx = bruteforce_correlator(
                    n,
                    s,
                    &[(i, op(SpinOperatorKind::Sx, s)), (j, op(SpinOperatorKind::Sx, s))],
                )
                .unwrap();
                let yy = bruteforce_correlator(
                    n,
                    s,
                    &[(i, op(SpinOperatorKind::Sy, s)), (j, op(SpinOperatorKind::Sy, s))],
                )
                .unwrap();
                assert_abs_diff_eq!(xx.re, yy.re, epsilon = 1e-12);
            }
        }
    }
}
