//! Multi-hour dispatch LP for a fixed commitment, used where ramp limits
//! couple hours and the per-hour dispatch is not exact.

use super::ed::{EdOutcome, Limit};
use super::model::{Model, UnitKind};
use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

/// Optimal dispatch of hours `[a, b)` under commitment `on[t][u]`.
/// `prev` is the state of hour `a − 1` (ignored when `a == 0`).
/// Returns `None` when the LP is infeasible.
pub(crate) fn dispatch_window(
    m: &Model,
    on: &[Vec<bool>],
    a: usize,
    b: usize,
    prev: Option<(&[bool], &[f64])>,
) -> Option<Vec<EdOutcome>> {
    let nr = m.regions();
    let nu = m.units.len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut pv: Vec<Vec<Option<Variable>>> = Vec::with_capacity(b - a);
    let mut nsv: Vec<Vec<Variable>> = Vec::with_capacity(b - a);
    let mut fv: Vec<Vec<Variable>> = Vec::with_capacity(b - a);

    for t in a..b {
        let mut inertia = vec![0.0; nr];
        for (i, u) in m.units.iter().enumerate() {
            if on[t][i] && u.commitable() {
                inertia[u.region] += u.stored;
            }
        }
        let mut row = vec![None; nu];
        for (i, u) in m.units.iter().enumerate() {
            if !on[t][i] || u.kind != UnitKind::Thermal {
                continue;
            }
            let mut hi = u.cap;
            if m.inertia {
                hi = hi.min(super::max_cc_for_inertia(inertia[u.region], m.f0, m.rocof_crit));
            }
            let mut lo = u.lo;
            if t == a && a > 0 {
                if let Some((pon, pp)) = prev {
                    if pon[i] {
                        lo = lo.max(pp[i] - u.ramp);
                        hi = hi.min(pp[i] + u.ramp);
                    }
                }
            }
            if lo > hi + 1e-9 {
                return None;
            }
            row[i] = Some(lp.add_var(u.srmc, (lo, hi.max(lo))));
        }
        pv.push(row);
        nsv.push((0..nr).map(|r| lp.add_var(0.0, (0.0, m.ns_avail_region(r, t)))).collect());
        fv.push(m.lines.iter().map(|&(_, _, lim)| lp.add_var(0.0, (-lim, lim))).collect());
    }

    for t in a..b {
        let k = t - a;
        for r in 0..nr {
            let mut bal: Vec<(Variable, f64)> = vec![(nsv[k][r], 1.0)];
            let mut res: Vec<(Variable, f64)> = Vec::new();
            let mut cap_on = 0.0;
            for (i, u) in m.units.iter().enumerate() {
                if u.region == r {
                    if let Some(v) = pv[k][i] {
                        bal.push((v, 1.0));
                        res.push((v, 1.0));
                        cap_on += u.cap;
                    }
                }
            }
            for (l, &(x, y, _)) in m.lines.iter().enumerate() {
                if x == r {
                    bal.push((fv[k][l], -1.0));
                }
                if y == r {
                    bal.push((fv[k][l], 1.0));
                }
            }
            lp.add_constraint(bal.as_slice(), ComparisonOp::Eq, m.demand[t][r]);
            let rhs = cap_on - m.reserve_fraction * m.demand[t][r];
            if !res.is_empty() {
                lp.add_constraint(res.as_slice(), ComparisonOp::Le, rhs);
            } else if rhs < -1e-9 {
                return None;
            }
        }
        if t > a {
            for (i, u) in m.units.iter().enumerate() {
                if let (Some(x), Some(y)) = (pv[k - 1][i], pv[k][i]) {
                    lp.add_constraint([(y, 1.0), (x, -1.0)], ComparisonOp::Le, u.ramp);
                    lp.add_constraint([(y, 1.0), (x, -1.0)], ComparisonOp::Ge, -u.ramp);
                }
            }
        }
    }

    let sol = lp.solve().ok()?.into_solution().ok()?;
    let mut out = Vec::with_capacity(b - a);
    for t in a..b {
        let k = t - a;
        let mut p = vec![0.0; nu];
        let mut energy_cost = 0.0;
        let mut upper = vec![(0.0, Limit::Capacity); nu];
        for (i, u) in m.units.iter().enumerate() {
            if let Some(v) = pv[k][i] {
                p[i] = sol.var_value(v).clamp(u.lo, u.cap);
                upper[i] = (u.cap, Limit::Capacity);
                energy_cost += u.srmc * p[i];
            }
        }
        let mut curtailed = vec![0.0; nr];
        for r in 0..nr {
            let avail = m.ns_avail_region(r, t);
            let used = sol.var_value(nsv[k][r]).clamp(0.0, avail);
            curtailed[r] = avail - used;
            if avail > 0.0 {
                for &i in &m.ns_units[r] {
                    p[i] = m.ns_avail(i, t) * used / avail;
                    energy_cost += m.units[i].srmc * p[i];
                }
            }
        }
        let flows = fv[k].iter().map(|&v| sol.var_value(v)).collect();
        out.push(EdOutcome { p, flows, curtailed, energy_cost, upper, reserve_bound: vec![false; nr] });
    }
    Some(out)
}
