use super::{Network, UcHour};
use crate::scenario::GeneratorSpec;
use std::io::{self, Write};

pub const UNIT_CSV_HEADER: &str = "hour,gen_id,on,p_mw";
pub const REGION_CSV_HEADER: &str = "hour,region,inertia_mws,reserve_mw,curtailed_mw,tie_flow_mw";

/// One row per hour and unit.
pub fn write_unit_csv<W: Write>(mut out: W, uc: &[UcHour], portfolio: &[GeneratorSpec]) -> io::Result<()> {
    writeln!(out, "{UNIT_CSV_HEADER}")?;
    for h in uc {
        for (g, u) in portfolio.iter().zip(&h.units) {
            writeln!(out, "{},{},{},{}", h.hour, g.id, u.on as u8, u.p)?;
        }
    }
    Ok(())
}

/// One row per hour and region; `tie_flow_mw` is the region's net export.
pub fn write_region_csv<W: Write>(mut out: W, uc: &[UcHour], net: &Network) -> io::Result<()> {
    writeln!(out, "{REGION_CSV_HEADER}")?;
    let ends = net.line_ends();
    for h in uc {
        for (r, region) in net.regions.iter().enumerate() {
            let export: f64 = ends
                .iter()
                .zip(&h.tie_flows)
                .map(|(&(a, b), f)| if a == r { *f } else if b == r { -*f } else { 0.0 })
                .sum();
            let s = &h.regions[r];
            writeln!(out, "{},{},{},{},{},{}", h.hour, region, s.inertia, s.reserve, h.curtailed_ns[r], export)?;
        }
    }
    Ok(())
}
