use alloc::format;
use alloc::vec::Vec;

use libm::{exp, log, pow};

use super::density::density_from_symbol;
use super::{ExpPowerLaw, OriginRule, PowerLaw, RadialKernelTable};
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::grid::{norm_slots, GridField, GridSpec};

pub const DEFAULT_TIME_NODES: usize = 200;
pub const TIME_FLOOR: f64 = 1e-4;

/// Parameters of the comparison kernel
/// B(x) = ∫₀^∞ e^{−γt} p_{s,m}(x, t) dt with γ = m^{2s} − (V₁ + δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonKernelSpec {
    pub m: f64,
    pub s: f64,
    pub v1: f64,
    pub delta: f64,
}

impl ComparisonKernelSpec {
    pub fn new(m: f64, s: f64, v1: f64, delta: f64) -> Result<Self> {
        let spec = Self { m, s, v1, delta };
        if !(spec.gamma() > 0.0) {
            return Err(Error::Config(format!(
                "comparison kernel needs V1 + delta < m^(2s): {} + {} >= {}",
                v1,
                delta,
                pow(m, 2.0 * s)
            )));
        }
        if !(delta > 0.0) {
            return Err(Error::Config(format!("margin delta = {delta} must be positive")));
        }
        Ok(spec)
    }

    pub fn gamma(&self) -> f64 {
        pow(self.m, 2.0 * self.s) - (self.v1 + self.delta)
    }

    /// T with e^{−γT} = 1e−12.
    pub fn time_horizon(&self) -> f64 {
        12.0 * core::f64::consts::LN_10 / self.gamma()
    }

    /// Decay rate forced by the pole of the resolvent symbol on the
    /// imaginary axis, √(m² − (V₁+δ)^{1/s}).
    pub fn pole_rate(&self) -> f64 {
        let c = self.v1 + self.delta;
        let inner = if c > 0.0 { pow(c, 1.0 / self.s) } else { 0.0 };
        libm::sqrt(self.m * self.m - inner)
    }
}

/// Trapezoid nodes in u = ln t on [ln t_min, ln t_max]; weights include the
/// Jacobian t.
pub fn log_time_nodes(t_min: f64, t_max: f64, count: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (log(t_min), log(t_max));
    let du = (b - a) / (count - 1) as f64;
    let nodes: Vec<f64> = (0..count).map(|i| exp(a + du * i as f64)).collect();
    let weights = nodes
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let end = i == 0 || i + 1 == count;
            du * t * if end { 0.5 } else { 1.0 }
        })
        .collect();
    (nodes, weights)
}

/// B sampled on a periodic grid; the time quadrature is applied to the
/// characteristic function, which is the same as integrating the sampled
/// densities node by node.
#[derive(Debug, Clone)]
pub struct ComparisonKernel {
    pub spec: ComparisonKernelSpec,
    pub field: GridField,
    pub table: RadialKernelTable,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl ComparisonKernel {
    pub fn on_grid(spec: ComparisonKernelSpec, grid: &GridSpec, node_count: usize) -> Result<Self> {
        let (nodes, weights) = log_time_nodes(TIME_FLOOR, spec.time_horizon(), node_count);
        let c = spec.v1 + spec.delta;
        let s_exp = spec.s;
        let m2 = spec.m * spec.m;
        let symbol = |k2: f64| {
            let a = pow(k2 + m2, s_exp) - c;
            nodes.iter().zip(&weights).map(|(t, w)| w * exp(-t * a)).sum::<f64>()
        };
        let field = density_from_symbol(grid, symbol);
        let table = radial_table_of(&field)?;
        Ok(Self {
            spec,
            field,
            table,
            nodes,
            weights,
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.table.value_at(r)
    }

    /// Quadrature approximation of 1/((|k|²+m²)^s − (V₁+δ)).
    pub fn quadrature_symbol(&self, k2: f64) -> f64 {
        let a = pow(k2 + self.spec.m * self.spec.m, self.spec.s) - (self.spec.v1 + self.spec.delta);
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * exp(-t * a)).sum()
    }

    /// Same integral with the time integrand supplied pointwise, for
    /// densities known in closed form.
    pub fn time_quadrature(&self, mut density_at: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
        let g = self.spec.gamma();
        let mut acc = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * exp(-g * t) * density_at(*t)?;
        }
        Ok(acc)
    }
}

/// B at radius r on the given grid.
pub fn comparison_kernel(spec: ComparisonKernelSpec, grid: &GridSpec, r: f64) -> Result<f64> {
    Ok(ComparisonKernel::on_grid(spec, grid, DEFAULT_TIME_NODES)?.value(r))
}

/// Radial table from a field centred at x = 0 (physical order); the first
/// sample met at each distinct radius is used.
fn radial_table_of(field: &GridField) -> Result<RadialKernelTable> {
    let spec = *field.spec();
    let (_, norms) = norm_slots(&spec);
    let h = spec.spacing();
    let half = spec.points() / 2;
    let mut by_norm = alloc::vec![f64::NAN; norms.len()];
    for (i, v) in field.values().iter().enumerate() {
        let idx = spec.multi_index(i);
        let q: u64 = (0..spec.dim())
            .map(|a| {
                let j = idx[a] as i64 - half as i64;
                (j * j) as u64
            })
            .sum();
        if let Ok(k) = norms.binary_search(&q) {
            if by_norm[k].is_nan() {
                by_norm[k] = *v;
            }
        }
    }
    let origin = by_norm[0];
    let radii: Vec<f64> = norms.iter().skip(1).map(|&q| h * libm::sqrt(q as f64)).collect();
    let values: Vec<f64> = by_norm.into_iter().skip(1).collect();
    let mut table = RadialKernelTable::new(
        spec.dim(),
        radii,
        values,
        PowerLaw {
            exponent: 0.0,
            coefficient: origin,
        },
        ExpPowerLaw {
            rate: 0.0,
            exponent: 0.0,
            coefficient: 0.0,
        },
        OriginRule::Value(origin),
    )?;
    let lo = spec.half_width() * 0.25;
    let hi = spec.half_width() * 0.75;
    if let Some(law) = fit_window(&table, lo, hi) {
        table = RadialKernelTable::new(
            spec.dim(),
            table.radii().to_vec(),
            table.values().to_vec(),
            table.small_r_law(),
            law,
            OriginRule::Value(origin),
        )?;
    }
    Ok(table)
}

fn fit_window(table: &RadialKernelTable, lo: f64, hi: f64) -> Option<ExpPowerLaw> {
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for (r, v) in table.radii().iter().zip(table.values()) {
        if *r >= lo && *r <= hi && *v > 0.0 {
            rows.push(alloc::vec![1.0, -*r, log(*r)]);
            ys.push(log(*v));
        }
    }
    if rows.len() < 3 {
        return None;
    }
    let c = least_squares(&rows, &ys)?;
    Some(ExpPowerLaw {
        rate: c[1],
        exponent: c[2],
        coefficient: exp(c[0]),
    })
}

/// Fitted two-term bound B(r) ≤ C₁e^{−C₂r} + C₃e^{−C₄r}r^{−q}, q = (N+2s+1)/2,
/// with a shared rate. `scale` lifts the least-squares model to a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitBound {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub power: f64,
    pub r_squared: f64,
    pub scale: f64,
}

impl SplitBound {
    pub fn eval(&self, r: f64) -> f64 {
        self.scale * (self.c1 * exp(-self.c2 * r) + self.c3 * exp(-self.c4 * r) * pow(r, -self.power))
    }
}

/// Fits the split bound on radii in [r_lo, r_hi]. Both rates are scanned
/// on a grid around the slope of log B, and the linear coefficients are
/// solved by least squares for each pair.
pub fn fit_split_bound(table: &RadialKernelTable, s: f64, r_lo: f64, r_hi: f64) -> Option<SplitBound> {
    let power = (table.dim() as f64 + 2.0 * s + 1.0) / 2.0;
    let pts: Vec<(f64, f64)> = table
        .radii()
        .iter()
        .zip(table.values())
        .filter(|(r, v)| **r >= r_lo && **r <= r_hi && **v > 0.0)
        .map(|(r, v)| (*r, *v))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ly: Vec<f64> = pts.iter().map(|p| log(p.1)).collect();
    let base = crate::fit::fit_line(&xs, &ly)?;
    let slope = -base.slope;
    let rate_at = |i: usize| slope * (0.5 + i as f64 / 40.0);
    let mut best: Option<(f64, f64, f64, f64, f64)> = None;
    for i in 0..=60 {
        for j in 0..=60 {
            let (c2, c4) = (rate_at(i), rate_at(j));
            // relative least squares: rows scaled by 1/B
            let rows: Vec<Vec<f64>> = pts
                .iter()
                .map(|(r, v)| alloc::vec![exp(-c2 * r) / v, exp(-c4 * r) * pow(*r, -power) / v])
                .collect();
            let ones = alloc::vec![1.0; pts.len()];
            let Some(c) = least_squares(&rows, &ones) else { continue };
            let (c1, c3) = (c[0].max(0.0), c[1].max(0.0));
            let mut ss = 0.0;
            let mut ok = true;
            for (k, r) in xs.iter().enumerate() {
                let model = c1 * exp(-c2 * r) + c3 * exp(-c4 * r) * pow(*r, -power);
                if !(model > 0.0) {
                    ok = false;
                    break;
                }
                let e = log(model) - ly[k];
                ss += e * e;
            }
            if ok && best.is_none_or(|b| ss < b.0) {
                best = Some((ss, c1, c2, c3, c4));
            }
        }
    }
    let (ss, c1, c2, c3, c4) = best?;
    let mean = ly.iter().sum::<f64>() / ly.len() as f64;
    let tot: f64 = ly.iter().map(|y| (y - mean) * (y - mean)).sum();
    let mut bound = SplitBound {
        c1,
        c2,
        c3,
        c4,
        power,
        r_squared: if tot > 0.0 { 1.0 - ss / tot } else { 1.0 },
        scale: 1.0,
    };
    bound.scale = pts.iter().map(|(r, v)| v / bound.eval(*r)).fold(1.0, f64::max);
    Some(bound)
}
