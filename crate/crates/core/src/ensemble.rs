//! Concrete specimen ensembles drawn from a joint outcome distribution.
//!
//! Every record carries one 0/1 outcome per observable of the measured
//! family. Record `k` draws from its own ChaCha8 stream (`seed`, stream `k`),
//! so an ensemble is identical however the records are split across workers.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assignment::JointDistribution;
use crate::error::{Error, Result};

/// Expected count above which an atom's record subset must be nonempty.
pub const NONEMPTY_THRESHOLD: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecimenRecord {
    pub id: u64,
    /// One entry per family member, in family order.
    pub outcomes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ensemble {
    pub rho_name: String,
    pub seed: u64,
    pub family: Vec<String>,
    pub records: Vec<SpecimenRecord>,
}

/// Record ids of the measured subset of one observable and its outcome-1 and
/// outcome-0 parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub measured: Vec<u64>,
    pub ones: Vec<u64>,
    pub zeros: Vec<u64>,
}

impl Ensemble {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.family
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownObservable(name.into()))
    }

    pub fn extension(&self, name: &str) -> Result<Extension> {
        let pos = self.position(name)?;
        let mut ext = Extension {
            measured: Vec::with_capacity(self.len()),
            ones: Vec::new(),
            zeros: Vec::new(),
        };
        for r in &self.records {
            ext.measured.push(r.id);
            match r.outcomes[pos] {
                1 => ext.ones.push(r.id),
                _ => ext.zeros.push(r.id),
            }
        }
        Ok(ext)
    }

    /// Number of records whose outcomes equal `outcome` on every family member.
    pub fn count(&self, outcome: &[bool]) -> usize {
        self.records
            .iter()
            .filter(|r| r.outcomes.iter().zip(outcome).all(|(&o, &b)| (o == 1) == b))
            .count()
    }

    /// CSV with header `id,<family...>` and 0/1 cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["id".to_string()];
        header.extend(self.family.iter().cloned());
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.id.to_string()];
            row.extend(r.outcomes.iter().map(u8::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

fn cumulative(atoms: &[f64]) -> Vec<f64> {
    atoms
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn draw_record(dist: &JointDistribution, cdf: &[f64], last_nonzero: usize, seed: u64, id: u64) -> SpecimenRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let u: f64 = rng.random();
    // Zero atoms never satisfy `u < cdf[k]` ahead of the preceding nonzero one.
    let idx = cdf
        .iter()
        .zip(dist.atoms())
        .position(|(&c, &p)| p > 0.0 && u < c)
        .unwrap_or(last_nonzero);
    SpecimenRecord {
        id,
        outcomes: dist.outcome_of(idx).into_iter().map(u8::from).collect(),
    }
}

pub fn sample_ensemble(dist: &JointDistribution, rho_name: &str, n: usize, seed: u64) -> Result<Ensemble> {
    sample_ensemble_with_workers(dist, rho_name, n, seed, 1)
}

/// Same result as [`sample_ensemble`] for every `workers ≥ 1`.
pub fn sample_ensemble_with_workers(
    dist: &JointDistribution,
    rho_name: &str,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Ensemble> {
    if workers == 0 {
        return Err(Error::Precondition("worker count must be at least 1".into()));
    }
    let cdf = cumulative(dist.atoms());
    let last_nonzero = dist
        .atoms()
        .iter()
        .rposition(|&p| p > 0.0)
        .ok_or_else(|| Error::Precondition("distribution has no positive atom".into()))?;
    let chunk = n.div_ceil(workers).max(1);
    let mut records = Vec::with_capacity(n);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|start| {
                let end = (start + chunk).min(n);
                let cdf = &cdf;
                s.spawn(move || {
                    (start..end)
                        .map(|id| draw_record(dist, cdf, last_nonzero, seed, id as u64))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            records.extend(h.join().expect("sampling worker panicked"));
        }
    });
    Ok(Ensemble {
        rho_name: rho_name.into(),
        seed,
        family: dist.names().to_vec(),
        records,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomFrequency {
    pub outcome: Vec<u8>,
    pub probability: f64,
    pub count: usize,
    pub expected: f64,
    pub sigma: f64,
    /// `|count - expected| ≤ z σ`; an atom of probability 0 must have count 0.
    pub within: bool,
    /// `None` when `n p` is below [`NONEMPTY_THRESHOLD`].
    pub nonempty: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalCount {
    pub f: String,
    pub g: String,
    pub both_one: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport {
    pub n: usize,
    pub z: f64,
    pub partition_holds: bool,
    pub atoms: Vec<AtomFrequency>,
    pub orthogonal: Vec<OrthogonalCount>,
    pub pass: bool,
}

/// Partition of every extension, nonemptiness of well-populated atoms, no
/// joint 1 for declared orthogonal pairs, and every atom frequency within
/// `z` binomial standard deviations.
pub fn check_support_statements(
    ens: &Ensemble,
    dist: &JointDistribution,
    z: f64,
    orthogonal_pairs: &[(&str, &str)],
) -> Result<SupportReport> {
    if ens.family != dist.names() {
        return Err(Error::Precondition(
            "ensemble family differs from the distribution's".into(),
        ));
    }
    let n = ens.len();
    let partition_holds = ens
        .records
        .iter()
        .all(|r| r.outcomes.len() == ens.family.len() && r.outcomes.iter().all(|&o| o <= 1))
        && ens.family.iter().all(|name| {
            let ext = ens.extension(name).expect("family member");
            ext.ones.len() + ext.zeros.len() == ext.measured.len()
                && ext.ones.iter().all(|id| ext.zeros.binary_search(id).is_err())
        });

    let mut counts = vec![0usize; dist.atoms().len()];
    for r in &ens.records {
        let idx = r.outcomes.iter().fold(0usize, |acc, &o| (acc << 1) | usize::from(o));
        counts[idx] += 1;
    }
    let atoms: Vec<AtomFrequency> = dist
        .atoms()
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(idx, (&p, &count))| {
            let expected = n as f64 * p;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            let within = if p == 0.0 {
                count == 0
            } else {
                (count as f64 - expected).abs() <= z * sigma
            };
            AtomFrequency {
                outcome: dist.outcome_of(idx).into_iter().map(u8::from).collect(),
                probability: p,
                count,
                expected,
                sigma,
                within,
                nonempty: (expected >= NONEMPTY_THRESHOLD).then_some(count > 0),
            }
        })
        .collect();

    let mut orthogonal = Vec::with_capacity(orthogonal_pairs.len());
    for &(f, g) in orthogonal_pairs {
        let (pf, pg) = (ens.position(f)?, ens.position(g)?);
        let both_one = ens
            .records
            .iter()
            .filter(|r| r.outcomes[pf] == 1 && r.outcomes[pg] == 1)
            .count();
        orthogonal.push(OrthogonalCount {
            f: f.into(),
            g: g.into(),
            both_one,
        });
    }

    let pass = partition_holds
        && atoms.iter().all(|a| a.within && a.nonempty != Some(false))
        && orthogonal.iter().all(|o| o.both_one == 0);
    Ok(SupportReport {
        n,
        z,
        partition_holds,
        atoms,
        orthogonal,
        pass,
    })
}

/// `(discordant, concordant)` record counts for the pair `(t, e)`.
pub fn detection_frequency_audit(t_name: &str, e_name: &str, ens: &Ensemble) -> Result<(usize, usize)> {
    let (pt, pe) = (ens.position(t_name)?, ens.position(e_name)?);
    let discordant = ens.records.iter().filter(|r| r.outcomes[pt] != r.outcomes[pe]).count();
    Ok((discordant, ens.len() - discordant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::joint_distribution;
    use crate::numerics::{CMatrix, Tolerance};
    use crate::observables::{complement, DensityOperator, Projection};
    use crate::scenarios::build_ghsz;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn ghsz_dist(names: &[&str]) -> (JointDistribution, String) {
        let s = build_ghsz().unwrap();
        let obs: Vec<&Projection> = names.iter().map(|n| s.observable(n).unwrap()).collect();
        (
            joint_distribution(&obs, s.state(), &tol()).unwrap(),
            s.state().name().to_string(),
        )
    }

    #[test]
    fn certain_outcome_gives_empty_zero_extension() {
        let rho = DensityOperator::new("rho", CMatrix::diag(&[1.0, 0.0]).unwrap(), &tol()).unwrap();
        let e = Projection::new("E", CMatrix::diag(&[1.0, 0.0]).unwrap(), &tol()).unwrap();
        let d = joint_distribution(&[&e], &rho, &tol()).unwrap();
        let ens = sample_ensemble(&d, "rho", 500, 1).unwrap();
        let ext = ens.extension("E").unwrap();
        assert_eq!(ext.ones.len(), 500);
        assert!(ext.zeros.is_empty());
    }

    #[test]
    fn detection_pair_has_no_discordant_record() {
        let (d, rho) = ghsz_dist(&["M", "Ga"]);
        let ens = sample_ensemble(&d, &rho, 20_000, 7).unwrap();
        let (disc, conc) = detection_frequency_audit("M", "Ga", &ens).unwrap();
        assert_eq!(disc, 0);
        assert_eq!(conc, 20_000);
        assert!(check_support_statements(&ens, &d, 4.0, &[]).unwrap().pass);
    }

    #[test]
    fn independent_pair_is_roughly_half_discordant() {
        let (d, rho) = ghsz_dist(&["Ea", "F"]);
        let n = 20_000;
        let ens = sample_ensemble(&d, &rho, n, 3).unwrap();
        let (disc, _) = detection_frequency_audit("Ea", "F", &ens).unwrap();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((disc as f64 - n as f64 / 2.0).abs() <= 4.0 * sigma);
    }

    #[test]
    fn worker_count_does_not_change_the_ensemble() {
        let (d, rho) = ghsz_dist(&["Ea", "F", "Gb"]);
        let one = sample_ensemble(&d, &rho, 1001, 99).unwrap();
        for w in [2, 3, 8, 2000] {
            assert_eq!(sample_ensemble_with_workers(&d, &rho, 1001, 99, w).unwrap(), one);
        }
        assert_ne!(sample_ensemble(&d, &rho, 1001, 100).unwrap(), one);
    }

    #[test]
    fn empty_ensemble_audits_to_zero() {
        let (d, rho) = ghsz_dist(&["M", "Ga"]);
        let ens = sample_ensemble(&d, &rho, 0, 1).unwrap();
        assert_eq!(detection_frequency_audit("M", "Ga", &ens).unwrap(), (0, 0));
        assert!(matches!(
            detection_frequency_audit("M", "X", &ens),
            Err(Error::UnknownObservable(_))
        ));
        assert!(matches!(
            sample_ensemble_with_workers(&d, &rho, 1, 1, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn complement_pair_never_both_one() {
        let s = build_ghsz().unwrap();
        let ea = s.observable("Ea").unwrap();
        let eac = complement(ea);
        let d = joint_distribution(&[ea, &eac], s.state(), &tol()).unwrap();
        let ens = sample_ensemble(&d, "rho0", 5000, 11).unwrap();
        let r = check_support_statements(&ens, &d, 4.0, &[("Ea", "Ea'")]).unwrap();
        assert_eq!(r.orthogonal[0].both_one, 0);
        assert!(r.partition_holds && r.pass);
    }

    #[test]
    fn csv_layout() {
        let (d, rho) = ghsz_dist(&["M", "Ga"]);
        let ens = sample_ensemble(&d, &rho, 3, 5).unwrap();
        let mut buf = Vec::new();
        ens.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,M,Ga");
        assert_eq!(lines.len(), 4);
        for (k, line) in lines[1..].iter().enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells[0], k.to_string());
            assert_eq!(cells[1], cells[2]);
        }
    }
}
