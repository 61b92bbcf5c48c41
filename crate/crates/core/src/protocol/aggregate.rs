use super::FlUpdate;
use crate::nn::Gradient;
use crate::{Error, Result};

/// Sample-count-weighted mean of the server gradient and the FL updates:
///
/// ```text
/// g = (m0 * g0 + sum_i m_i * g_i) / (m0 + sum_i m_i)
/// ```
///
/// A `central` entry with zero samples contributes nothing. Terms are
/// accumulated server first, then updates in the given order.
pub fn aggregate(central: Option<(&Gradient, usize)>, updates: &[FlUpdate]) -> Result<Gradient> {
    let central = central.filter(|(_, m)| *m > 0);
    let total: usize =
        central.map_or(0, |(_, m)| m) + updates.iter().map(|u| u.sample_count).sum::<usize>();
    if total == 0 {
        return Err(Error::NoParticipants);
    }
    let template = central
        .map(|(g, _)| g)
        .or_else(|| updates.first().map(|u| &u.gradient))
        .ok_or(Error::NoParticipants)?;
    let mut out = template.zeros_like();
    let total = total as f64;
    if let Some((g, m)) = central {
        out.add_scaled(m as f64 / total, g)?;
    }
    for update in updates {
        if update.sample_count > 0 {
            out.add_scaled(update.sample_count as f64 / total, &update.gradient)?;
        }
    }
    Ok(out)
}
