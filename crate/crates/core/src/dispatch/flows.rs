//! Lossless tie-line flows from regional balances.

use super::{DispatchError, Network, UcHour};
use crate::scenario::GeneratorSpec;
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowLimitViolation {
    pub line: usize,
    pub flow: f64,
    pub limit: f64,
}

/// Line flows (network line order, positive `from` → `to`) and any lines
/// whose limit they exceed.
#[derive(Debug, Clone, PartialEq)]
pub struct TieFlows {
    pub flows: Vec<f64>,
    pub violations: Vec<FlowLimitViolation>,
}

/// Flows implied by one dispatch hour: each region injects its generation
/// minus its net demand.
pub fn dc_tie_flows(uc: &UcHour, net: &Network, portfolio: &[GeneratorSpec]) -> Result<TieFlows, DispatchError> {
    let mut inj: Vec<f64> = uc.regions.iter().map(|r| -r.net_demand).collect();
    if inj.len() != net.regions.len() {
        return Err(DispatchError::InvalidNetwork("region count differs from the dispatch hour".into()));
    }
    for (g, u) in portfolio.iter().zip(&uc.units) {
        let r = net
            .region_index(&g.region)
            .ok_or_else(|| DispatchError::InvalidNetwork(format!("generator {} in unknown region", g.id)))?;
        inj[r] += u.p;
    }
    dc_flows_from_injections(net, &inj)
}

/// Radial networks are solved by eliminating leaves (the nodal balances
/// then fix every flow); meshed ones by the DC approximation with each
/// line's `sync_coeff` as its susceptance.
pub fn dc_flows_from_injections(net: &Network, inj: &[f64]) -> Result<TieFlows, DispatchError> {
    net.validate()?;
    let n = net.regions.len();
    if inj.len() != n {
        return Err(DispatchError::InvalidNetwork("injection vector length differs from region count".into()));
    }
    let total: f64 = inj.iter().sum();
    let scale: f64 = inj.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    if total.abs() > 1e-6 * scale {
        return Err(DispatchError::UnbalancedSystem { imbalance: total });
    }
    let ends = net.line_ends();
    let flows = if net.is_radial() { radial(n, &ends, inj) } else { meshed(net, &ends, inj)? };
    let violations = flows
        .iter()
        .zip(&net.lines)
        .enumerate()
        .filter(|(_, (f, l))| f.abs() > l.limit * (1.0 + 1e-9))
        .map(|(i, (f, l))| FlowLimitViolation { line: i, flow: *f, limit: l.limit })
        .collect();
    Ok(TieFlows { flows, violations })
}

fn radial(n: usize, ends: &[(usize, usize)], inj: &[f64]) -> Vec<f64> {
    let mut flows = vec![0.0; ends.len()];
    let mut residual = inj.to_vec();
    let mut alive = vec![true; ends.len()];
    let mut degree = vec![0usize; n];
    for &(a, b) in ends {
        degree[a] += 1;
        degree[b] += 1;
    }
    for _ in 0..ends.len() {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a tree always has a leaf");
        let l = (0..ends.len()).find(|&l| alive[l] && (ends[l].0 == leaf || ends[l].1 == leaf)).expect("leaf line");
        let (a, b) = ends[l];
        let other = if a == leaf { b } else { a };
        // The leaf exports its whole residual injection over its only line.
        flows[l] = if a == leaf { residual[leaf] } else { -residual[leaf] };
        residual[other] += residual[leaf];
        residual[leaf] = 0.0;
        alive[l] = false;
        degree[leaf] -= 1;
        degree[other] -= 1;
    }
    flows
}

fn meshed(net: &Network, ends: &[(usize, usize)], inj: &[f64]) -> Result<Vec<f64>, DispatchError> {
    let n = net.regions.len();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for (&(a, b), line) in ends.iter().zip(&net.lines) {
        let k = line.sync_coeff;
        lap[(a, a)] += k;
        lap[(b, b)] += k;
        lap[(a, b)] -= k;
        lap[(b, a)] -= k;
    }
    // Region 0 is the angle reference.
    let reduced = lap.view((1, 1), (n - 1, n - 1)).into_owned();
    let rhs = DVector::from_iterator(n - 1, inj[1..].iter().copied());
    let theta_red = reduced
        .lu()
        .solve(&rhs)
        .ok_or_else(|| DispatchError::InvalidNetwork("singular susceptance matrix".into()))?;
    let theta = |i: usize| if i == 0 { 0.0 } else { theta_red[i - 1] };
    Ok(ends.iter().zip(&net.lines).map(|(&(a, b), l)| l.sync_coeff * (theta(a) - theta(b))).collect())
}
