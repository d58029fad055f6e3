//! Genetic algorithm over joint (subcarrier permutation, power vector)
//! chromosomes.
//!
//! Permutation encoding keeps every individual exclusive by construction;
//! a repair pass restores bijectivity after crossover and rescales power
//! overshoots. Fitness is the sum rate minus penalties for budget and QoS
//! violations, evaluated through the shared constraint report so the GA and
//! the feasibility checks can never disagree. Selection is roulette-wheel on
//! min-shifted fitness, crossover is single-point (order-crossover on the
//! permutation part), mutation perturbs power genes, and elitism carries the
//! best individual unchanged, which makes the best-fitness trace monotone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::{
    check_constraints_with_rates, rate, Allocation, ChannelMatrix, ConvergenceTrace, ModelError,
    QosSpec, SystemConfig,
};
use crate::scalar::{cast, to_f64, Scalar};

use super::SolverError;

/// GA hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GaParams<T> {
    pub population_size: usize,
    pub n_generations: usize,
    /// Per-gene probability of mutating a power entry.
    pub mutation_rate: f64,
    /// Penalty per watt of power-budget overshoot.
    pub lambda_power: T,
    /// Penalty per bit/s of QoS shortfall.
    pub lambda_qos: T,
    /// Also swap two assignment genes with `mutation_rate` probability.
    pub swap_mutation: bool,
}

impl<T: Scalar> Default for GaParams<T> {
    fn default() -> Self {
        Self {
            population_size: 40,
            n_generations: 30,
            mutation_rate: 0.1,
            lambda_power: cast(1e9),
            lambda_qos: cast(1e9),
            swap_mutation: false,
        }
    }
}

impl<T: Scalar> GaParams<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.population_size < 2 {
            return Err(SolverError::InvalidParams(
                "population_size must be >= 2".into(),
            ));
        }
        if self.n_generations == 0 {
            return Err(SolverError::InvalidParams(
                "n_generations must be >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(SolverError::InvalidParams(format!(
                "mutation_rate must be in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        if self.lambda_power < T::zero() || self.lambda_qos < T::zero() {
            return Err(SolverError::InvalidParams(
                "penalty weights must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// One candidate solution: user `k` claims subcarrier `assignment[k]` with
/// power `power[k]` watts.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome<T> {
    pub assignment: Vec<usize>,
    pub power: Vec<T>,
}

impl<T: Scalar> Chromosome<T> {
    pub fn to_allocation(&self, n_subcarriers: usize) -> Result<Allocation<T>, ModelError> {
        Allocation::from_mapping(&self.assignment, &self.power, n_subcarriers)
    }

    /// True when the assignment is a bijection onto `0..n`.
    pub fn is_permutation(&self, n_subcarriers: usize) -> bool {
        if self.assignment.len() != n_subcarriers {
            return false;
        }
        let mut seen = vec![false; n_subcarriers];
        for &sc in &self.assignment {
            if sc >= n_subcarriers || seen[sc] {
                return false;
            }
            seen[sc] = true;
        }
        true
    }
}

/// Restore chromosome validity: duplicate (or out-of-range) subcarrier claims
/// are reassigned, later claimant first, to the unclaimed subcarriers in
/// ascending index order; negative or non-finite powers are zeroed; and the
/// power vector is rescaled by `budget / total` when it exceeds the budget.
/// Valid chromosomes pass through unchanged.
pub fn repair<T: Scalar>(chrom: &Chromosome<T>, config: &SystemConfig<T>) -> Chromosome<T> {
    let n = config.n_subcarriers;
    let mut assignment = chrom.assignment.clone();
    let mut claimed = vec![false; n];
    let mut needs_slot = Vec::new();
    for (user, &sc) in assignment.iter().enumerate() {
        if sc < n && !claimed[sc] {
            claimed[sc] = true;
        } else {
            needs_slot.push(user);
        }
    }
    let mut free = (0..n).filter(|&sc| !claimed[sc]);
    for user in needs_slot {
        assignment[user] = free.next().expect("as many free slots as displaced users");
    }

    let mut power = chrom.power.clone();
    for p in &mut power {
        if !p.is_finite() || *p < T::zero() {
            *p = T::zero();
        }
    }
    let total: T = power.iter().copied().sum();
    if total > config.power_budget {
        let scale = config.power_budget / total;
        for p in &mut power {
            *p = *p * scale;
        }
    }

    Chromosome { assignment, power }
}

/// Penalized fitness in bits/s: the sum rate minus `lambda_power` per watt of
/// budget overshoot and `lambda_qos` per bit/s of QoS shortfall. Equals the
/// sum rate exactly for feasible chromosomes.
pub fn fitness<T: Scalar>(
    chrom: &Chromosome<T>,
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    qos: &QosSpec<T>,
    params: &GaParams<T>,
) -> Result<T, SolverError> {
    let alloc = chrom.to_allocation(config.n_subcarriers)?;
    let report = rate(&alloc, h, config)?;
    let constraints = check_constraints_with_rates(&alloc, config, qos, &report)?;
    Ok(report.sum_rate_bps
        - params.lambda_power * constraints.power_budget.overshoot_watts
        - params.lambda_qos * constraints.qos.total_shortfall_bps)
}

/// Final-population summary.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationStats<T> {
    pub mean_fitness: T,
    pub min_fitness: T,
    pub max_fitness: T,
}

/// GA outcome. The trace holds the best fitness of each generation.
#[derive(Debug, Clone)]
pub struct GaResult<T> {
    pub best: Chromosome<T>,
    pub best_fitness: T,
    pub trace: ConvergenceTrace<T>,
    pub final_population: PopulationStats<T>,
}

struct GaRun<'a, T: Scalar> {
    config: &'a SystemConfig<T>,
    params: &'a GaParams<T>,
    rng: ChaCha8Rng,
    mutation_sigma: f64,
}

impl<'a, T: Scalar> GaRun<'a, T> {
    fn random_chromosome(&mut self) -> Chromosome<T> {
        let k = self.config.n_users;
        let mut assignment: Vec<usize> = (0..self.config.n_subcarriers).collect();
        assignment.shuffle(&mut self.rng);
        assignment.truncate(k);

        let raw: Vec<f64> = (0..k).map(|_| self.rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let budget = to_f64(self.config.power_budget);
        let power = if total > 0.0 {
            raw.iter().map(|&u| cast(u / total * budget)).collect()
        } else {
            vec![self.config.power_budget / cast(k as f64); k]
        };
        Chromosome { assignment, power }
    }

    /// Roulette selection on fitness shifted above zero. A degenerate
    /// population (all equal) selects uniformly.
    fn select(&mut self, fitness: &[f64]) -> usize {
        let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        let eps = if span > 0.0 { span * 1e-9 } else { 1.0 };
        let total: f64 = fitness.iter().map(|f| f - min + eps).sum();
        let mut pick = self.rng.random::<f64>() * total;
        for (i, f) in fitness.iter().enumerate() {
            pick -= f - min + eps;
            if pick <= 0.0 {
                return i;
            }
        }
        fitness.len() - 1
    }

    /// Single-point crossover. The child takes parent A's prefix; the
    /// permutation tail is filled with parent B's genes in order, skipping
    /// duplicates (order crossover), which preserves bijectivity. The power
    /// vector is spliced at the same cut.
    fn crossover(&mut self, a: &Chromosome<T>, b: &Chromosome<T>) -> Chromosome<T> {
        let k = a.assignment.len();
        if k < 2 {
            return a.clone();
        }
        let cut = self.rng.random_range(1..k);
        let mut assignment = a.assignment[..cut].to_vec();
        for &gene in b.assignment.iter().chain(a.assignment.iter()) {
            if assignment.len() == k {
                break;
            }
            if !assignment.contains(&gene) {
                assignment.push(gene);
            }
        }
        let mut power = a.power[..cut].to_vec();
        power.extend_from_slice(&b.power[cut..]);
        Chromosome { assignment, power }
    }

    /// Gaussian perturbation of power genes, each with `mutation_rate`
    /// probability, clamped to `[0, budget]`. Optionally swaps two
    /// assignment genes when the swap flag is on.
    fn mutate(&mut self, chrom: &mut Chromosome<T>) {
        let normal = Normal::new(0.0, self.mutation_sigma).expect("sigma is finite");
        let budget = self.config.power_budget;
        for p in &mut chrom.power {
            if self.rng.random::<f64>() < self.params.mutation_rate {
                let bumped = *p + cast(normal.sample(&mut self.rng));
                *p = bumped.max(T::zero()).min(budget);
            }
        }
        if self.params.swap_mutation
            && chrom.assignment.len() >= 2
            && self.rng.random::<f64>() < self.params.mutation_rate
        {
            let i = self.rng.random_range(0..chrom.assignment.len());
            let j = self.rng.random_range(0..chrom.assignment.len());
            chrom.assignment.swap(i, j);
        }
    }
}

/// Evolve a population of permutation-plus-power chromosomes for the
/// configured number of generations. Requires K = N. Deterministic for a
/// fixed seed.
pub fn ga_solve<T: Scalar>(
    h: &ChannelMatrix<T>,
    config: &SystemConfig<T>,
    qos: &QosSpec<T>,
    params: &GaParams<T>,
    seed: u64,
) -> Result<GaResult<T>, SolverError> {
    config.validate()?;
    params.validate()?;
    h.check_dims(config.n_users, config.n_subcarriers)?;
    if config.n_users != config.n_subcarriers {
        return Err(SolverError::UnsupportedShape {
            n_users: config.n_users,
            n_subcarriers: config.n_subcarriers,
        });
    }

    let mutation_sigma =
        0.1 * to_f64(config.power_budget) / config.n_users as f64;
    let mut run = GaRun {
        config,
        params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        mutation_sigma,
    };

    let mut population: Vec<Chromosome<T>> = (0..params.population_size)
        .map(|_| run.random_chromosome())
        .collect();
    let mut scores: Vec<T> = population
        .iter()
        .map(|c| fitness(c, h, config, qos, params))
        .collect::<Result<_, _>>()?;

    let mut trace = Vec::with_capacity(params.n_generations);
    for _generation in 1..params.n_generations + 1 {
        let best_idx = argmax(&scores);
        trace.push(scores[best_idx]);
        if trace.len() == params.n_generations {
            break;
        }

        let scores_f64: Vec<f64> = scores.iter().map(|&s| to_f64(s)).collect();
        let mut next = Vec::with_capacity(params.population_size);
        next.push(population[best_idx].clone());
        while next.len() < params.population_size {
            let a = run.select(&scores_f64);
            let b = run.select(&scores_f64);
            let mut child = run.crossover(&population[a], &population[b]);
            run.mutate(&mut child);
            next.push(repair(&child, config));
        }
        population = next;
        scores = population
            .iter()
            .map(|c| fitness(c, h, config, qos, params))
            .collect::<Result<_, _>>()?;
    }

    let best_idx = argmax(&scores);
    let n = scores.len();
    let sum: T = scores.iter().copied().sum();
    let final_population = PopulationStats {
        mean_fitness: sum / cast(n as f64),
        min_fitness: scores[argmin(&scores)],
        max_fitness: scores[best_idx],
    };
    let converged_at = Some(trace.len());
    Ok(GaResult {
        best: population[best_idx].clone(),
        best_fitness: scores[best_idx],
        trace: ConvergenceTrace {
            sum_rates_bps: trace,
            converged_at,
        },
        final_population,
    })
}

fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn argmin<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_channel, ChannelModel};
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn config3() -> SystemConfig<f64> {
        SystemConfig::new(3, 3, 1e5, 1e-9, 20.0, 100, 1).unwrap()
    }

    #[test]
    fn repair_leaves_valid_chromosomes_unchanged() {
        let config = config3();
        let chrom = Chromosome {
            assignment: vec![2, 0, 1],
            power: vec![5.0, 5.0, 5.0],
        };
        assert_eq!(repair(&chrom, &config), chrom);
    }

    #[test]
    fn repair_reassigns_duplicates_in_ascending_order() {
        let config = config3();
        let chrom = Chromosome {
            assignment: vec![0, 0, 2],
            power: vec![1.0, 1.0, 1.0],
        };
        let fixed = repair(&chrom, &config);
        assert_eq!(fixed.assignment, vec![0, 1, 2]);
        assert!(fixed.is_permutation(3));
    }

    #[test]
    fn repair_rescales_power_overshoot() {
        let config = config3();
        let chrom = Chromosome {
            assignment: vec![0, 1, 2],
            power: vec![20.0, 10.0, 10.0],
        };
        let fixed = repair(&chrom, &config);
        assert_eq!(fixed.power, vec![10.0, 5.0, 5.0]);
    }

    #[test]
    fn repair_handles_out_of_range_and_negative_genes() {
        let config = config3();
        let chrom = Chromosome {
            assignment: vec![7, 7, 1],
            power: vec![-1.0, f64::NAN, 2.0],
        };
        let fixed = repair(&chrom, &config);
        assert!(fixed.is_permutation(3));
        assert_eq!(fixed.power[0], 0.0);
        assert_eq!(fixed.power[1], 0.0);
        assert_eq!(fixed.power[2], 2.0);
    }

    #[test]
    fn feasible_fitness_equals_sum_rate() {
        let config = config3();
        let h = sample_channel(1, &config, &ChannelModel::UnitExp).unwrap();
        let qos = QosSpec::none(3);
        let params = GaParams::default();
        let chrom = Chromosome {
            assignment: vec![1, 2, 0],
            power: vec![8.0, 6.0, 6.0],
        };
        let f = fitness(&chrom, &h, &config, &qos, &params).unwrap();
        let alloc = chrom.to_allocation(3).unwrap();
        let expected = rate(&alloc, &h, &config).unwrap().sum_rate_bps;
        assert_eq!(f, expected);
    }

    #[test]
    fn power_overshoot_is_penalized_per_watt() {
        let config = config3();
        let h = sample_channel(2, &config, &ChannelModel::Constant(1.0)).unwrap();
        let qos = QosSpec::none(3);
        let params = GaParams {
            lambda_power: 1e7,
            ..Default::default()
        };
        let chrom = Chromosome {
            assignment: vec![0, 1, 2],
            power: vec![7.0, 7.0, 7.0], // 21 W against a 20 W budget
        };
        let alloc = chrom.to_allocation(3).unwrap();
        let sum_rate = rate(&alloc, &h, &config).unwrap().sum_rate_bps;
        let f = fitness(&chrom, &h, &config, &qos, &params).unwrap();
        assert_abs_diff_eq!(f, sum_rate - 1e7, epsilon = 1.0);
    }

    #[test]
    fn zero_power_fitness_is_pure_qos_penalty() {
        let config = config3();
        let h = sample_channel(3, &config, &ChannelModel::Constant(1.0)).unwrap();
        let qos = QosSpec::uniform(3, 1e5).unwrap();
        let params = GaParams::default();
        let chrom = Chromosome {
            assignment: vec![0, 1, 2],
            power: vec![0.0, 0.0, 0.0],
        };
        let f = fitness(&chrom, &h, &config, &qos, &params).unwrap();
        assert_eq!(f, -params.lambda_qos * 3.0 * 1e5);
    }

    #[test]
    fn degenerate_single_user_population_is_a_fixed_point() {
        // With K = 1 every chromosome is identical (full budget on the only
        // subcarrier), so the elitist best must stay constant.
        let config = SystemConfig::new(1, 1, 1e5, 1e-9, 20.0, 100, 1).unwrap();
        let h = ChannelMatrix::new(array![[1.0]]).unwrap();
        let qos = QosSpec::none(1);
        let params = GaParams {
            population_size: 10,
            n_generations: 15,
            ..Default::default()
        };
        let result = ga_solve(&h, &config, &qos, &params, 5).unwrap();
        let first = result.trace.sum_rates_bps[0];
        assert!(result.trace.sum_rates_bps.iter().all(|&f| f == first));
    }

    #[test]
    fn elitist_trace_is_monotone_and_deterministic() {
        let config = SystemConfig::<f64>::default();
        let qos = QosSpec::none(12);
        let params = GaParams::default();
        for seed in 0..20u64 {
            let h = sample_channel(seed, &config, &ChannelModel::UnitExp).unwrap();
            let a = ga_solve(&h, &config, &qos, &params, seed).unwrap();
            let b = ga_solve(&h, &config, &qos, &params, seed).unwrap();
            assert_eq!(a.trace.sum_rates_bps, b.trace.sum_rates_bps);
            assert_eq!(a.trace.len(), 30);
            assert!(a.trace.is_monotone(0.0), "elitism must never regress");
            assert!(a.best.is_permutation(12));
            assert!(a.best.power.iter().sum::<f64>() <= 20.0 + 1e-9);
        }
    }

    #[test]
    fn rejects_non_square_instances() {
        let config = SystemConfig::new(3, 2, 1e5, 1e-9, 20.0, 100, 1).unwrap();
        let h = ChannelMatrix::new(array![[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]).unwrap();
        let qos = QosSpec::none(2);
        assert!(matches!(
            ga_solve(&h, &config, &qos, &GaParams::default(), 0),
            Err(SolverError::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn long_run_approaches_exhaustive_oracle_on_3x3() {
        let config = config3();
        let qos = QosSpec::none(3);
        let params = GaParams {
            n_generations: 200,
            ..Default::default()
        };
        let mut hits = 0;
        let trials = 20;
        for seed in 0..trials {
            let h = sample_channel(seed, &config, &ChannelModel::UnitExp).unwrap();
            let result = ga_solve(&h, &config, &qos, &params, seed).unwrap();
            let oracle = permutation_oracle(&h, &config);
            if result.best_fitness >= 0.98 * oracle {
                hits += 1;
            }
        }
        assert!(hits >= 18, "only {hits}/{trials} within 2% of the oracle");
    }

    fn permutation_oracle(h: &ChannelMatrix<f64>, config: &SystemConfig<f64>) -> f64 {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut best = f64::NEG_INFINITY;
        for perm in PERMS {
            let gains: Vec<f64> = (0..3).map(|u| h.gain(u, perm[u])).collect();
            let mut active: Vec<bool> = gains.iter().map(|&g| g > 0.0).collect();
            let powers = loop {
                let count = active.iter().filter(|&&a| a).count();
                if count == 0 {
                    break vec![0.0; 3];
                }
                let inv: f64 = (0..3)
                    .filter(|&i| active[i])
                    .map(|i| config.noise_power / gains[i])
                    .sum();
                let mu = (config.power_budget + inv) / count as f64;
                let mut out = vec![0.0; 3];
                let mut removed = false;
                for i in 0..3 {
                    if active[i] {
                        let p = mu - config.noise_power / gains[i];
                        if p < 0.0 {
                            active[i] = false;
                            removed = true;
                        } else {
                            out[i] = p;
                        }
                    }
                }
                if !removed {
                    break out;
                }
            };
            let sum: f64 = gains
                .iter()
                .zip(&powers)
                .map(|(&g, &p)| config.bandwidth_hz * (1.0 + p * g / config.noise_power).log2())
                .sum();
            best = best.max(sum);
        }
        best
    }
}
