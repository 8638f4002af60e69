//! Markov chain Monte Carlo for interacting dimers and non-planar Ising
//! models, with error analysis and fits.

mod binder;
mod dimer;
mod exact;
mod fit;
mod ising;
mod stats;

pub use binder::{binder_beta_c, binder_cumulant, BinderOptions, BinderResult};
pub use dimer::{dimer_mcmc_run, DimerChain, DimerObservable, DimerRun};
pub use exact::{dimer_gibbs_distribution, ising_exact_mean, ising_gibbs_distribution};
pub use fit::{
    fit_interacting_params, fit_z2, haldane_check, measure_dimer_correlations, measure_energy_correlations,
    measure_height_covariance, project_components, CorrelationSample, HaldaneOptions, HaldaneReport, InteractingFit,
    Z2Fit,
};
pub use ising::{
    ising_mcmc_run, IsingBoundary, IsingChain, IsingInteraction, IsingLattice, IsingModel, IsingObservable, IsingRun,
    IsingState, UpdateKind,
};
pub use stats::{blocked_stderr, estimate_autocorrelation, integrated_time, ChainEstimate, MIN_LENGTH_TAUS};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};

/// Largest `|lambda|` accepted by the samplers.
pub const LAMBDA_GUARD: f64 = 1.0;

/// Sweeps before the first sample, number of samples, and sweeps between
/// consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub burn_in: usize,
    pub samples: usize,
    pub thin: usize,
}

impl Schedule {
    pub fn new(burn_in: usize, samples: usize, thin: usize) -> Result<Schedule> {
        if samples == 0 || thin == 0 {
            return Err(LabError::InvalidArgument("schedule needs samples >= 1 and thin >= 1".into()));
        }
        Ok(Schedule { burn_in, samples, thin })
    }
}

/// ChaCha8 stream `stream` of `seed`: independent chains share a seed and
/// differ in the stream number.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.abs() <= LAMBDA_GUARD) {
        return Err(LabError::Guard(format!("|lambda| = {} exceeds {LAMBDA_GUARD}", lambda.abs())));
    }
    Ok(())
}
