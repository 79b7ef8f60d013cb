use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::closeness::{check_strongly_k_close, Witness};
use super::{check_labeling, label_image, LabError};
use crate::group::{is_prime, GroupSpec, Subgroup};
use crate::matroid::{find_blocks, is_strongly_base_orderable, ElementSet, Matroid, MatroidRef};
use crate::solver::Labeling;
use crate::weights::Weights;

/// The label-image lower bound
/// `|ℓ(M)| >= |H| · min{Σ_Q r(E(Q)) - r(M) + 1, |G|/|H|}` with `H = stab(ℓ(M))`.
#[derive(Clone, Debug)]
pub struct SsReport {
    pub image_size: usize,
    pub stabilizer: Subgroup,
    pub cosets: usize,
    /// `Σ_{Q ∈ G/H} r(E(Q))`.
    pub rank_sum: usize,
    pub rank: usize,
    pub bound: usize,
    pub holds: bool,
    /// `min{p, Σ_g r(E(g)) - r(M) + 1}` for `G = Z_p`.
    pub prime_bound: Option<usize>,
}

impl fmt::Display for SsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.stabilizer.elements().iter().map(|g| g.to_string()).collect();
        write!(
            f,
            "image={} stabilizer={{{}}} cosets={} rank-sum={} rank={} bound={} holds={}",
            self.image_size,
            h.join(" "),
            self.cosets,
            self.rank_sum,
            self.rank,
            self.bound,
            self.holds
        )?;
        if let Some(p) = self.prime_bound {
            write!(f, " prime-bound={p}")?;
        }
        Ok(())
    }
}

pub fn check_schrijver_seymour(m: &dyn Matroid, labeling: &Labeling) -> Result<SsReport, LabError> {
    check_labeling(m, labeling)?;
    let group = labeling.group();
    let image = label_image(m, labeling)?;
    let image_set = image.image();
    let stabilizer = group.stabilizer(&image_set)?;
    let cosets = group.cosets(&stabilizer)?;
    let mut fibers = vec![ElementSet::EMPTY; cosets.len()];
    for (e, &g) in labeling.indices().iter().enumerate() {
        fibers[cosets.coset_of_index(g)].insert(e);
    }
    let rank = m.rank();
    let rank_sum: usize = fibers.iter().map(|&f| m.rank_of(f)).sum();
    let h = stabilizer.order();
    let bound = h * (rank_sum + 1 - rank).min(group.order() / h);
    let holds = image_set.len() >= bound;

    let order = group.order();
    let prime_bound = (group.is_cyclic() && is_prime(order as u32)).then(|| {
        let per_label: usize = (0..order).map(|g| m.rank_of(labeling.fiber_of_index(g))).sum();
        order.min(per_label + 1 - rank)
    });
    if let Some(pb) = prime_bound {
        if (image_set.len() >= pb) != holds {
            return Err(LabError::Internal(format!(
                "prime-case bound {pb} and coset bound {bound} disagree for image size {}",
                image_set.len()
            )));
        }
    }
    Ok(SsReport {
        image_size: image_set.len(),
        stabilizer,
        cosets: cosets.len(),
        rank_sum,
        rank,
        bound,
        holds,
        prime_bound,
    })
}

#[derive(Clone, Debug)]
pub struct SboSuiteReport {
    pub group: GroupSpec,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Violations found; any entry contradicts the closeness theorem for
    /// strongly base orderable matroids.
    pub failures: Vec<(usize, Witness)>,
}

impl SboSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SboSuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sbo-suite group={} k={} trials={} seed={} failures={}",
            self.group,
            self.k,
            self.trials,
            self.seed,
            self.failures.len()
        )?;
        for (trial, w) in &self.failures {
            write!(f, "\ntrial {trial}\n{w}")?;
        }
        Ok(())
    }
}

/// Weights the closeness proofs manipulate: zero, all ones, and `±1` on the
/// two blocks when the matroid has them.
fn structured_weights(m: &dyn Matroid) -> Vec<Weights> {
    let n = m.ground_size();
    let mut out = vec![Weights::zeros(n), Weights::from_integers(&vec![1; n])];
    if n == 2 * m.rank() {
        if let Some((a, _)) = find_blocks(m) {
            let plus: Vec<i64> = (0..n).map(|e| if a.contains(e) { 1 } else { -1 }).collect();
            let minus: Vec<i64> = plus.iter().map(|v| -v).collect();
            out.push(Weights::from_integers(&plus));
            out.push(Weights::from_integers(&minus));
        }
    }
    out
}

/// Checks strong `k`-closeness (default `k = D(G) - 1`) on `trials` random
/// labelings; the first trials use structured weights, the rest random
/// integers in `[-5, 5]`.
pub fn sbo_strong_closeness_suite(
    m: &MatroidRef,
    group: &GroupSpec,
    trials: usize,
    seed: u64,
    k: Option<usize>,
) -> Result<SboSuiteReport, LabError> {
    if let crate::matroid::SboVerdict::NotOrderable { a, b } = is_strongly_base_orderable(&**m)? {
        return Err(LabError::Usage(format!("matroid is not strongly base orderable (bases {a}, {b})")));
    }
    let k = match k {
        Some(k) => k,
        None => group.davenport_constant()? - 1,
    };
    let n = m.ground_size();
    let structured = structured_weights(&**m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let labeling = Labeling::random(group.clone(), n, &mut rng);
        let weights = match structured.get(trial) {
            Some(w) => w.clone(),
            None => Weights::from_integers(&(0..n).map(|_| rng.gen_range(-5..=5)).collect::<Vec<_>>()),
        };
        if let Some(w) = check_strongly_k_close(m, &labeling, &weights, k)? {
            failures.push((trial, w));
        }
    }
    Ok(SboSuiteReport { group: group.clone(), k, trials, seed, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{make_graphic, make_uniform, shared};

    #[test]
    fn constant_labeling_degenerates() {
        let u = make_uniform(6, 3).unwrap();
        let rep = check_schrijver_seymour(&u, &Labeling::cyclic(3, &[0; 6])).unwrap();
        assert_eq!((rep.image_size, rep.stabilizer.order(), rep.rank_sum, rep.bound), (1, 1, 3, 1));
        assert!(rep.holds);
        assert_eq!(rep.prime_bound, Some(1));
    }

    #[test]
    fn k4_over_z3() {
        let k4 = make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let l = Labeling::random(GroupSpec::cyclic(3), 6, &mut rng);
            assert!(check_schrijver_seymour(&k4, &l).unwrap().holds);
        }
    }

    #[test]
    fn sbo_suite_on_uniform() {
        let u = shared(make_uniform(6, 3).unwrap());
        let v: GroupSpec = "Z2xZ2".parse().unwrap();
        let rep = sbo_strong_closeness_suite(&u, &v, 20, 0, None).unwrap();
        assert_eq!(rep.k, 2);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn sbo_suite_refuses_non_sbo() {
        // M(K4) is not strongly base orderable
        let k4 = shared(make_graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap());
        let err = sbo_strong_closeness_suite(&k4, &GroupSpec::cyclic(2), 1, 0, None).unwrap_err();
        assert!(matches!(err, LabError::Usage(_)));
    }
}
