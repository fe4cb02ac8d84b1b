//! Exhaustive checks of the kernel identities and the sweep of `‖K_n‖_1`.

use num_rational::BigRational;
use rayon::prelude::*;

use super::report::{format_float, Column, ColumnKind, ExperimentReport, Value};
use crate::error::{Error, Result};
use crate::exact::rational_to_f64;
use crate::kernels::{
    dirichlet, dirichlet_dyadic_closed, fejer_dyadic_walsh_closed, fejer_kernel, fejer_l1_sweep,
    skvortsov_terms,
};
use crate::walsh::{kaczmarz_rho, kaczmarz_sign, order, paley_sign, System};

/// Outcome of one family of exact identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub resolution: u32,
    pub cases: u64,
    pub failures: u64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn tally(identity: &'static str, resolution: u32, results: Vec<bool>) -> IdentityCheck {
    IdentityCheck {
        identity,
        resolution,
        cases: results.len() as u64,
        failures: results.iter().filter(|ok| !**ok).count() as u64,
    }
}

/// `L1 + L2 + L3 = K^κ_n` for `1 <= n <= 2^{N-1}` at resolution `N`.
pub fn check_skvortsov(resolution: u32) -> Result<IdentityCheck> {
    if resolution == 0 {
        return Err(Error::invalid("Skvortsov check needs resolution >= 1"));
    }
    let results = (1..=1u64 << (resolution - 1))
        .into_par_iter()
        .map(|n| Ok(skvortsov_terms(n, resolution)?.sum() == fejer_kernel(System::Kaczmarz, n, resolution)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(tally("skvortsov", resolution, results))
}

/// `D_{2^A} = 2^A 1_{I_A}` in both systems for `A <= M <= N`, at every
/// resolution `M`.
pub fn check_dirichlet_dyadic(max_resolution: u32) -> Result<IdentityCheck> {
    let cases: Vec<(System, u32, u32)> = System::ALL
        .iter()
        .flat_map(|&s| (0..=max_resolution).flat_map(move |m| (0..=m).map(move |a| (s, m, a))))
        .collect();
    let results = cases
        .par_iter()
        .map(|&(s, m, a)| Ok(dirichlet(s, 1 << a, m)? == dirichlet_dyadic_closed(a, m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(tally("dirichlet_dyadic", max_resolution, results))
}

/// Gát's closed form of `K^w_{2^A}` for `A < M <= N`.
pub fn check_gat(max_resolution: u32) -> Result<IdentityCheck> {
    let cases: Vec<(u32, u32)> = (1..=max_resolution).flat_map(|m| (0..m).map(move |a| (m, a))).collect();
    let results = cases
        .par_iter()
        .map(|&(m, a)| Ok(fejer_kernel(System::Paley, 1 << a, m)? == fejer_dyadic_walsh_closed(a, m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(tally("gat", max_resolution, results))
}

/// `κ_n = w_{ρ(n)}` pointwise at resolution `|n| + 1`, for `n < 2^N`.
pub fn check_kaczmarz_reordering(max_order: u32) -> Result<IdentityCheck> {
    if max_order > 20 {
        return Err(Error::ResolutionTooLarge(max_order));
    }
    let results = (0..1u64 << max_order)
        .into_par_iter()
        .map(|n| {
            let res = if n == 0 { 1 } else { order(n).expect("n > 0") + 1 };
            let r = kaczmarz_rho(n);
            (0..1u64 << res).all(|bits| kaczmarz_sign(n, bits) == paley_sign(r, bits))
        })
        .collect();
    Ok(tally("kaczmarz_reordering", max_order, results))
}

/// `ρ` maps each block `[2^A, 2^{A+1})` onto itself and `ρ∘ρ = id`, for
/// `n < 2^bits`.
pub fn check_rho_involution(bits: u32) -> Result<IdentityCheck> {
    if bits > 32 {
        return Err(Error::invalid(format!("ρ check over 2^{bits} indices is too large")));
    }
    let results = (0..1u64 << bits)
        .into_par_iter()
        .map(|n| {
            let r = kaczmarz_rho(n);
            let same_block = n == 0 && r == 0 || n > 0 && r > 0 && order(n).ok() == order(r).ok();
            same_block && kaczmarz_rho(r) == n
        })
        .collect();
    Ok(tally("rho_involution", bits, results))
}

/// Width of the `ρ` check in the kernel report.
pub const RHO_CHECK_BITS: u32 = 16;

/// All kernel identities at resolution `N`.
pub fn verify_kernels_report(resolution: u32) -> Result<ExperimentReport> {
    if resolution == 0 || resolution > 14 {
        return Err(Error::invalid(format!("kernel verification resolution {resolution} outside 1..=14")));
    }
    let checks = vec![
        check_skvortsov(resolution)?,
        check_dirichlet_dyadic(resolution)?,
        check_gat(resolution)?,
        check_kaczmarz_reordering(resolution)?,
        check_rho_involution(RHO_CHECK_BITS)?,
    ];
    let mut report = ExperimentReport::new(
        "verify-kernels",
        vec![
            Column::new("identity", ColumnKind::Label),
            Column::new("resolution", ColumnKind::Int),
            Column::new("cases", ColumnKind::Int),
            Column::new("failures", ColumnKind::Int),
            Column::new("passed", ColumnKind::Bool),
        ],
    );
    for c in &checks {
        report.push(vec![
            c.identity.into(),
            Value::Int(c.resolution as i64),
            Value::Int(c.cases as i64),
            Value::Int(c.failures as i64),
            c.passed().into(),
        ])?;
    }
    report.meta("resolution", resolution);
    for c in &checks {
        report.check(c.identity, c.passed(), format!("{} cases, {} failures", c.cases, c.failures));
    }
    Ok(report)
}

/// Relative change between the last two complete block maxima.
pub fn last_block_variation(block_maxima: &[(u32, BigRational)]) -> Option<f64> {
    match block_maxima {
        [.., (_, prev), (_, last)] => {
            let (prev, last) = (rational_to_f64(prev), rational_to_f64(last));
            Some((last - prev).abs() / prev)
        }
        _ => None,
    }
}

/// `‖K_n‖_1` for `n <= n_max`.
pub fn fejer_l1_report(system: System, n_max: u64) -> Result<ExperimentReport> {
    let sweep = fejer_l1_sweep(system, n_max)?;
    let mut report = ExperimentReport::new(
        "fejer-l1",
        vec![
            Column::new("n", ColumnKind::Int),
            Column::new("l1_norm", ColumnKind::Exact),
            Column::new("l1_norm_f64", ColumnKind::Float),
        ],
    );
    for (i, norm) in sweep.norms.iter().enumerate() {
        report.push(vec![Value::Int(i as i64 + 1), norm.clone().into(), rational_to_f64(norm).into()])?;
    }
    report
        .meta("system", system)
        .meta("n_max", n_max)
        .meta("resolution", sweep.resolution)
        .meta("global_max", &sweep.global_max)
        .meta("global_max_f64", format_float(rational_to_f64(&sweep.global_max)))
        .meta("argmax", sweep.argmax);
    for (a, m) in &sweep.block_maxima {
        report.meta(format!("block_max_{a}"), format_float(rational_to_f64(m)));
    }
    let one = BigRational::from_integer(1.into());
    report.check("norm_at_least_one", sweep.norms.iter().all(|n| *n >= one), "‖K_n‖_1 >= ∫K_n = 1");
    if let Some(v) = last_block_variation(&sweep.block_maxima) {
        report.meta("last_block_variation", format_float(v));
        report.check("blocks_stable", v < 0.1, format!("last two block maxima differ by {v:.4}"));
    }
    Ok(report)
}
