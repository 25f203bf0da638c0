//! Waveform sets: independent designs from distinct chaotic seeds, their
//! pairwise cross-correlation peaks, and the Welch-bound audit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chaos::{ChaoticParams, Encoding};
use crate::correlation::{autocorrelation, ccp};
use crate::error::{Error, Result};
use crate::metrics::{to_db, welch_bound, MetricsReport};
use crate::sequence::ComplexSequence;
use crate::solver::{design, Initialization, SolverConfig};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpStats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    /// Symmetric `M x M` matrix of pairwise CCPs, zero diagonal.
    pub matrix: Vec<Vec<f64>>,
    /// Mean of `CCP / sqrt(r_0^a r_0^b)` over pairs.
    pub mean_normalized: f64,
    pub mean_db: f64,
    pub max_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberRun {
    /// Initial condition of the chaotic map.
    pub seed: f64,
    pub config: SolverConfig,
    pub iterations_used: usize,
    pub converged: bool,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSet {
    pub members: Vec<ComplexSequence>,
    pub runs: Vec<MemberRun>,
    /// Statistics of the designed members.
    pub stats: CcpStats,
    /// Statistics of the chaotic initializations, before any design cycle.
    pub initial_stats: CcpStats,
}

impl WaveformSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Recomputes the member statistics from the stored members.
    pub fn recompute_stats(&self) -> Result<CcpStats> {
        ccp_statistics(&self.members)
    }
}

/// Pairwise CCP statistics over the `M(M-1)/2` unordered pairs.
pub fn ccp_statistics(members: &[ComplexSequence]) -> Result<CcpStats> {
    let m = members.len();
    if m < 2 {
        return Err(Error::invalid("members", format!("need at least 2 sequences, got {m}")));
    }
    let energy: Vec<f64> = members.iter().map(|x| x.energy()).collect();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| ccp(&members[i], &members[j]))
        .collect::<Result<_>>()?;
    let mut matrix = vec![vec![0.0; m]; m];
    let (mut sum, mut sum_norm) = (0.0, 0.0);
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut max_norm: f64 = 0.0;
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        matrix[i][j] = v;
        matrix[j][i] = v;
        sum += v;
        max = max.max(v);
        min = min.min(v);
        let g = (energy[i] * energy[j]).sqrt();
        let normalized = if g > 0.0 { v / g } else { 0.0 };
        sum_norm += normalized;
        max_norm = max_norm.max(normalized);
    }
    let count = pairs.len() as f64;
    let mean_normalized = sum_norm / count;
    Ok(CcpStats {
        mean: sum / count,
        max,
        min,
        matrix,
        mean_normalized,
        mean_db: to_db(mean_normalized),
        max_db: to_db(max_norm),
    })
}

/// Designs one member per seed. The base configuration's initialization
/// supplies the chaotic map, burn-in and encoding (the modified map with raw
/// encoding when it is not chaotic); each seed becomes that map's `x0`.
pub fn generate_set(m: usize, n: usize, q: usize, base: &SolverConfig, seeds: &[f64]) -> Result<WaveformSet> {
    if m < 2 {
        return Err(Error::invalid("m", format!("need at least 2 members, got {m}")));
    }
    if seeds.len() != m {
        return Err(Error::invalid("seeds", format!("expected {m} seeds, got {}", seeds.len())));
    }
    for (i, a) in seeds.iter().enumerate() {
        if seeds[..i].contains(a) {
            return Err(Error::invalid("seeds", format!("seed {a} appears more than once")));
        }
    }
    let (template, encoding) = match &base.init {
        Initialization::Chaotic { params, encoding } => (*params, *encoding),
        _ => (ChaoticParams::modified(0.5), Encoding::Raw),
    };
    let configs: Vec<SolverConfig> = seeds
        .iter()
        .map(|&x0| {
            let mut c = base.clone();
            c.n = n;
            c.q = q;
            c.init = Initialization::Chaotic {
                params: ChaoticParams { x0, ..template },
                encoding,
            };
            c
        })
        .collect();
    let outcomes: Vec<(ComplexSequence, ComplexSequence, MemberRun)> = configs
        .into_par_iter()
        .enumerate()
        .map(|(member, config)| {
            let wrap = |e: Error| Error::Member {
                member,
                source: Box::new(e),
            };
            let init = config.init.build(n).map_err(wrap)?;
            let result = design(&config).map_err(wrap)?;
            let run = MemberRun {
                seed: seeds[member],
                config,
                iterations_used: result.iterations_used,
                converged: result.converged,
                metrics: result.metrics,
            };
            Ok((init, result.sequence, run))
        })
        .collect::<Result<_>>()?;
    let mut initial = Vec::with_capacity(m);
    let mut members = Vec::with_capacity(m);
    let mut runs = Vec::with_capacity(m);
    for (i, x, r) in outcomes {
        initial.push(i);
        members.push(x);
        runs.push(r);
    }
    Ok(WaveformSet {
        stats: ccp_statistics(&members)?,
        initial_stats: ccp_statistics(&initial)?,
        members,
        runs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchAudit {
    /// Largest cross-correlation peak or autocorrelation side-lobe in the set.
    pub c_max: f64,
    pub bound: f64,
    /// `c_max / bound`; infinite when the bound is zero.
    pub ratio: f64,
    pub unimodular: bool,
}

/// Compares the set's largest correlation against the Welch bound.
///
/// Unimodular sets are compared as is against the `N`-scaled bound. Other
/// sets are first scaled to unit energy per member, which is the setting the
/// uni-power bound assumes.
pub fn welch_audit(members: &[ComplexSequence], unimodular: bool) -> Result<WelchAudit> {
    let m = members.len();
    if m < 2 {
        return Err(Error::invalid("members", format!("need at least 2 sequences, got {m}")));
    }
    let n = members[0].len();
    if members.iter().any(|x| x.len() != n) {
        return Err(Error::invalid("members", "all members must have the same length"));
    }
    let scaled: Vec<ComplexSequence> = if unimodular {
        if members.iter().flat_map(|x| x.samples()).any(|z| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::invalid("members", "unimodular audit of a non-unimodular set"));
        }
        members.to_vec()
    } else {
        members
            .iter()
            .map(|x| {
                let e = x.energy().sqrt();
                if e == 0.0 {
                    return Err(Error::Degenerate("member with zero energy".into()));
                }
                ComplexSequence::new(x.samples().iter().map(|z| z / C64::new(e, 0.0)).collect())
            })
            .collect::<Result<_>>()?
    };
    let auto_peak = scaled
        .par_iter()
        .map(|x| {
            let r = autocorrelation(x);
            r.non_negative()[1..].iter().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let cross_peak = ccp_statistics(&scaled)?.max;
    let c_max = auto_peak.max(cross_peak);
    let bound = welch_bound(m, n, unimodular)?;
    Ok(WelchAudit {
        c_max,
        bound,
        ratio: if bound > 0.0 { c_max / bound } else { f64::INFINITY },
        unimodular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Algorithm;

    fn seq(v: &[f64]) -> ComplexSequence {
        ComplexSequence::from_real(v).unwrap()
    }

    #[test]
    fn stats_examples() {
        let s = ccp_statistics(&[seq(&[1.0, 1.0]), seq(&[1.0, -1.0])]).unwrap();
        assert_eq!((s.mean, s.max, s.min), (1.0, 1.0, 1.0));
        assert_eq!(s.matrix, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((s.mean_normalized - 0.5).abs() < 1e-15);

        // disjoint supports with a gap: zero cross-correlation at every lag
        let s = ccp_statistics(&[seq(&[1.0, 0.0, 0.0, 0.0]), seq(&[0.0, 0.0, 0.0, 0.0])]).unwrap();
        assert_eq!((s.mean, s.max), (0.0, 0.0));
        assert!(ccp_statistics(&[seq(&[1.0])]).is_err());
    }

    #[test]
    fn welch_examples() {
        let set = [seq(&[1.0, 1.0]), seq(&[1.0, -1.0])];
        let a = welch_audit(&set, true).unwrap();
        assert!((a.bound - 2.0 * 0.2f64.sqrt()).abs() < 1e-15);
        assert!(a.ratio >= 1.0 - 1e-9);
        let b = welch_audit(&set, false).unwrap();
        assert!((b.bound - 0.2f64.sqrt()).abs() < 1e-15);
        assert!(b.ratio >= 1.0 - 1e-9);
        assert!(welch_audit(&[seq(&[2.0, 1.0]), seq(&[1.0, 1.0])], true).is_err());
    }

    #[test]
    fn generate_set_guards() {
        let base = SolverConfig::new(Algorithm::Poca, 16, 4);
        let e = generate_set(2, 16, 4, &base, &[0.3, 0.3]).unwrap_err();
        assert_eq!(e.field(), Some("seeds"));
        assert!(generate_set(1, 16, 4, &base, &[0.3]).is_err());
        assert!(generate_set(2, 16, 4, &base, &[0.3]).is_err());
        // a member failure names the member
        let e = generate_set(2, 16, 4, &base, &[0.3, 1.5]).unwrap_err();
        assert!(matches!(e, Error::Member { member: 1, .. }));
        assert_eq!(e.field(), Some("x0"));
    }

    #[test]
    fn generated_set_is_consistent() {
        let base = SolverConfig::new(Algorithm::Poca, 32, 8).with_max_iterations(50);
        let set = generate_set(3, 32, 8, &base, &[0.11, 0.22, 0.33]).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.recompute_stats().unwrap(), set.stats);
        for (i, r) in set.runs.iter().enumerate() {
            assert_eq!(r.config.n, 32);
            assert_eq!(r.seed, [0.11, 0.22, 0.33][i]);
        }
        let audit = welch_audit(&set.members, false).unwrap();
        assert!(audit.c_max >= audit.bound);
    }
}
