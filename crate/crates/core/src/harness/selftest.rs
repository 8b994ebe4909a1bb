use std::time::Instant;

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::combinat::{factorial, nu_sequence, MonomialIndex};
use crate::error::Result;
use crate::extend::{err_value, extend, main_value, z_main_direct, z_main_stretched};
use crate::forests::{check_counting_bounds, star_mobius_via_nu, verify_mobius, verify_xi};
use crate::poly::{gram_direct, gram_via_transport};

use super::instances::random_correlation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelftestLevel {
    /// Small sizes, a few seconds.
    Quick,
    /// Every brute-force identity at the sizes the acceptance suite uses.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn run(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> SelftestCheck {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    SelftestCheck { name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let start = s.last().copied().unwrap_or(0);
                (start..n).map(move |i| {
                    let mut t = s.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn selftest(level: SelftestLevel) -> Vec<SelftestCheck> {
    let full = level == SelftestLevel::Full;
    let max_leaves = if full { 8 } else { 6 };
    let mut out = Vec::new();

    out.push(run("mobius", || {
        let mut detail = Vec::new();
        let mut ok = true;
        for m in (2..=max_leaves).step_by(2) {
            let v = verify_mobius(m)?;
            ok &= v.passed;
            detail.push(format!("m={m}: {} forests, {}", v.forests, if v.passed { "ok" } else { "FAILED" }));
        }
        Ok((ok, detail.join("; ")))
    }));

    out.push(run("nu_sequence", || {
        let nu: Vec<i64> = nu_sequence(8).iter().map(|r| r.to_integer().to_i64().unwrap_or(i64::MAX)).collect();
        let series_ok = [nu[2], nu[4], nu[6], nu[8]] == [1, -2, 16, -272];
        let star = star_mobius_via_nu(8);
        let star_ok = star
            .iter()
            .all(|(m, v)| {
                let want = if *m == 2 { -1 } else { factorial(m - 2) as i64 };
                *v == BigRational::from_integer(want.into())
            });
        Ok((series_ok && star_ok, format!("nu(2..8) = {:?}, star recursion {}", [nu[2], nu[4], nu[6], nu[8]], star_ok)))
    }));

    out.push(run("counting_bounds", || {
        let mut ok = true;
        for d in (0..=max_leaves).step_by(2) {
            ok &= check_counting_bounds(d)?.holds;
        }
        Ok((ok, format!("d <= {max_leaves}")))
    }));

    out.push(run("xi_identity", || {
        let mut bad = Vec::new();
        for total in (2..=max_leaves).step_by(2) {
            for l in 0..=total {
                let v = verify_xi(l, total - l)?;
                if !v.stretched_mismatches.is_empty() || !v.transport_mismatches.is_empty() {
                    bad.push(format!("({l},{})", total - l));
                }
            }
        }
        Ok((bad.is_empty(), if bad.is_empty() { format!("l+m <= {max_leaves}") } else { format!("mismatch at {}", bad.join(" ")) }))
    }));

    out.push(run("degree4_closed_form", || {
        let mut worst: f64 = 0.0;
        for seed in 0..if full { 50 } else { 5 } {
            let m = random_correlation(6, 3, seed)?;
            let mat = m.matrix();
            let e = extend(&m, 2)?;
            for s in crate::combinat::subsets_of_size(6, 4) {
                let star: f64 = (0..6).map(|a| s.iter().map(|&i| mat[(a, i)]).product::<f64>()).sum();
                let (i, j, k, l) = (s[0], s[1], s[2], s[3]);
                let want = mat[(i, j)] * mat[(k, l)] + mat[(i, k)] * mat[(j, l)] + mat[(i, l)] * mat[(j, k)] - 2.0 * star;
                worst = worst.max((e.evaluate(&MonomialIndex::new(s))? - want).abs());
            }
        }
        Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
    }));

    out.push(run("main_error_decomposition", || {
        let max_size = if full { 6 } else { 4 };
        let m = random_correlation(4, 3, 7)?;
        let e = extend(&m, max_size / 2)?;
        let mut worst: f64 = 0.0;
        for k in (2..=max_size).step_by(2) {
            for s in multisets(4, k) {
                let total = e.evaluate(&MonomialIndex::new(s.clone()))?;
                worst = worst.max((total - main_value(&m, &s)? - err_value(&m, &s)?).abs());
            }
        }
        Ok((worst <= 1e-10, format!("|S| <= {max_size}, max gap {worst:.2e}")))
    }));

    out.push(run("gram_dual_path", || {
        let mut worst: f64 = 0.0;
        for (n, d) in [(4, 2), (5, if full { 3 } else { 2 })] {
            let m = random_correlation(n, 3, 11)?;
            worst = worst.max((gram_direct(&m, d)? - gram_via_transport(&m, d)?).amax());
        }
        Ok((worst <= 1e-8, format!("max deviation {worst:.2e}")))
    }));

    out.push(run("stretched_forest_blocks", || {
        let mut worst: f64 = 0.0;
        for (n, d) in [(4, 2), (4, if full { 3 } else { 2 })] {
            let m = random_correlation(n, 3, 13)?;
            worst = worst.max((z_main_stretched(&m, d)?.matrix - z_main_direct(&m, d)?).amax());
        }
        Ok((worst <= 1e-10, format!("max deviation {worst:.2e}")))
    }));

    out
}
