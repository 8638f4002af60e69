//! Single-spin Metropolis and Wolff cluster chains for
//! `H = -J sum_<xy> s_x s_y - lambda sum_X s_X`, the second sum running over
//! all translates of a set of even-sized shapes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::stats::{estimate_autocorrelation, ChainEstimate};
use super::{chain_rng, check_lambda, Schedule};
use crate::error::{LabError, Result};

/// Largest number of spins a custom shape may span in each direction.
const SHAPE_RANGE: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsingBoundary {
    Periodic,
    /// Periodic in direction 1, free in direction 2.
    Cylinder,
    Free,
    /// All spins outside the box fixed to +1.
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsingLattice {
    pub l1: usize,
    pub l2: usize,
    pub bc: IsingBoundary,
}

enum Site {
    Inside(usize),
    Fixed(i8),
}

impl IsingLattice {
    pub fn new(l1: usize, l2: usize, bc: IsingBoundary) -> Result<IsingLattice> {
        let lat = IsingLattice { l1, l2, bc };
        let (p1, p2) = lat.periodic();
        let bad = |l: usize, p: bool| l == 0 || (p && l < 3);
        if bad(l1, p1) || bad(l2, p2) {
            return Err(LabError::Geometry(format!("{l1}x{l2} {bc:?}: sides must be positive, periodic ones >= 3")));
        }
        Ok(lat)
    }

    pub fn len(&self) -> usize {
        self.l1 * self.l2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn periodic(&self) -> (bool, bool) {
        match self.bc {
            IsingBoundary::Periodic => (true, true),
            IsingBoundary::Cylinder => (true, false),
            _ => (false, false),
        }
    }

    pub fn index(&self, x: (i64, i64)) -> usize {
        x.1 as usize * self.l1 + x.0 as usize
    }

    pub fn site(&self, i: usize) -> (i64, i64) {
        ((i % self.l1) as i64, (i / self.l1) as i64)
    }

    fn locate(&self, x: (i64, i64)) -> Site {
        let (p1, p2) = self.periodic();
        let (l1, l2) = (self.l1 as i64, self.l2 as i64);
        let a = if p1 { x.0.rem_euclid(l1) } else { x.0 };
        let b = if p2 { x.1.rem_euclid(l2) } else { x.1 };
        if (0..l1).contains(&a) && (0..l2).contains(&b) {
            return Site::Inside(self.index((a, b)));
        }
        Site::Fixed(match self.bc {
            IsingBoundary::Plus => 1,
            IsingBoundary::Minus => -1,
            _ => 0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsingInteraction {
    /// `s_x s_{x+(1,1)} + s_x s_{x+(1,-1)}`.
    DiagonalPairs,
    /// Product of the four corners of each unit square.
    Plaquette,
    /// Even-sized offset sets, each summed over all translates.
    Custom(Vec<Vec<(i64, i64)>>),
}

impl IsingInteraction {
    pub fn shapes(&self) -> Result<Vec<Vec<(i64, i64)>>> {
        let shapes = match self {
            IsingInteraction::DiagonalPairs => vec![vec![(0, 0), (1, 1)], vec![(0, 0), (1, -1)]],
            IsingInteraction::Plaquette => vec![vec![(0, 0), (1, 0), (0, 1), (1, 1)]],
            IsingInteraction::Custom(s) => s.clone(),
        };
        for s in &shapes {
            let mut sorted = s.clone();
            sorted.sort();
            sorted.dedup();
            if s.is_empty() || s.len() % 2 == 1 || sorted.len() != s.len() {
                return Err(LabError::InvalidArgument(format!("interaction shape {s:?} must be a non-empty even set")));
            }
            for (a, b) in s.iter().flat_map(|p| s.iter().map(move |q| (p, q))) {
                if (a.0 - b.0).abs() > SHAPE_RANGE || (a.1 - b.1).abs() > SHAPE_RANGE {
                    return Err(LabError::InvalidArgument(format!("shape {s:?} exceeds range {SHAPE_RANGE}")));
                }
            }
        }
        Ok(shapes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub j: f64,
    pub lambda: f64,
    pub interaction: IsingInteraction,
    terms: Vec<(f64, Vec<(i64, i64)>)>,
}

impl IsingModel {
    /// `J = 1`.
    pub fn new(lambda: f64, interaction: IsingInteraction) -> Result<IsingModel> {
        Self::with_coupling(1.0, lambda, interaction)
    }

    pub fn nearest_neighbour() -> IsingModel {
        Self::new(0.0, IsingInteraction::DiagonalPairs).unwrap()
    }

    pub fn with_coupling(j: f64, lambda: f64, interaction: IsingInteraction) -> Result<IsingModel> {
        check_lambda(lambda)?;
        if !j.is_finite() {
            return Err(LabError::InvalidArgument(format!("J = {j}")));
        }
        let mut terms = vec![(j, vec![(0, 0), (1, 0)]), (j, vec![(0, 0), (0, 1)])];
        if lambda != 0.0 {
            terms.extend(interaction.shapes()?.into_iter().map(|s| (lambda, s)));
        }
        Ok(IsingModel { j, lambda, interaction, terms })
    }

    /// Largest coordinate extent of any term.
    pub fn span(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|(_, s)| {
                s.iter().flat_map(move |a| s.iter().map(move |b| (a.0 - b.0).abs().max((a.1 - b.1).abs())))
            })
            .max()
            .unwrap_or(0)
    }

    /// Periodic sides must exceed the span so no term wraps onto itself.
    pub fn check_lattice(&self, lat: &IsingLattice) -> Result<()> {
        let (p1, p2) = lat.periodic();
        let span = self.span() as usize;
        if (p1 && lat.l1 <= span) || (p2 && lat.l2 <= span) {
            return Err(LabError::Geometry(format!(
                "periodic sides {}x{} must exceed the interaction span {span}",
                lat.l1, lat.l2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingState {
    pub lattice: IsingLattice,
    pub spins: Vec<i8>,
}

impl IsingState {
    pub fn uniform(lattice: IsingLattice, s: i8) -> IsingState {
        IsingState { lattice, spins: vec![if s >= 0 { 1 } else { -1 }; lattice.len()] }
    }

    pub fn random(lattice: IsingLattice, rng: &mut impl Rng) -> IsingState {
        IsingState { lattice, spins: (0..lattice.len()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect() }
    }

    pub fn new(lattice: IsingLattice, spins: Vec<i8>) -> Result<IsingState> {
        if spins.len() != lattice.len() || spins.iter().any(|s| *s != 1 && *s != -1) {
            return Err(LabError::InvalidArgument("spins must be +-1, one per site".into()));
        }
        Ok(IsingState { lattice, spins })
    }

    pub fn spin(&self, x: (i64, i64)) -> i8 {
        match self.lattice.locate(x) {
            Site::Inside(i) => self.spins[i],
            Site::Fixed(s) => s,
        }
    }

    pub fn magnetization(&self) -> f64 {
        self.spins.iter().map(|s| *s as f64).sum::<f64>() / self.spins.len() as f64
    }

    /// Total energy; translates with no spin inside the box are dropped.
    pub fn energy(&self, model: &IsingModel) -> f64 {
        let lat = self.lattice;
        let (p1, p2) = lat.periodic();
        let range = |l: usize, p: bool| if p { 0..l as i64 } else { -SHAPE_RANGE..l as i64 + SHAPE_RANGE };
        let mut h = 0.0;
        for (c, shape) in &model.terms {
            for b1 in range(lat.l1, p1) {
                for b2 in range(lat.l2, p2) {
                    let mut prod = 1i8;
                    let mut inside = false;
                    for o in shape {
                        let x = (b1 + o.0, b2 + o.1);
                        match lat.locate(x) {
                            Site::Inside(i) => {
                                inside = true;
                                prod *= self.spins[i];
                            }
                            Site::Fixed(s) => prod *= s,
                        }
                    }
                    if inside {
                        h -= c * prod as f64;
                    }
                }
            }
        }
        h
    }

    /// `H(flipped at i) - H`.
    pub fn delta_energy(&self, model: &IsingModel, i: usize) -> f64 {
        let x = self.lattice.site(i);
        let mut local = 0.0;
        for (c, shape) in &model.terms {
            for o in shape {
                let base = (x.0 - o.0, x.1 - o.1);
                let mut prod = 1i8;
                for q in shape {
                    if q != o {
                        prod *= self.spin((base.0 + q.0, base.1 + q.1));
                    }
                }
                local += c * prod as f64;
            }
        }
        2.0 * self.spins[i] as f64 * local
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateKind {
    Metropolis,
    /// Cluster flips; only for `lambda = 0` without fixed boundary spins.
    Wolff,
}

#[derive(Debug, Clone)]
pub struct IsingChain {
    pub state: IsingState,
    model: IsingModel,
    beta: f64,
    update: UpdateKind,
    rng: ChaCha8Rng,
    stack: Vec<usize>,
    seen: Vec<bool>,
    wolff_clusters: usize,
}

impl IsingChain {
    pub fn new(
        state: IsingState,
        model: &IsingModel,
        beta: f64,
        update: UpdateKind,
        seed: u64,
        stream: u64,
    ) -> Result<IsingChain> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(LabError::InvalidArgument(format!("beta = {beta}")));
        }
        model.check_lattice(&state.lattice)?;
        if update == UpdateKind::Wolff {
            if model.lambda != 0.0 {
                return Err(LabError::Guard("Wolff updates need lambda = 0".into()));
            }
            if matches!(state.lattice.bc, IsingBoundary::Plus | IsingBoundary::Minus) {
                return Err(LabError::Guard("Wolff updates need periodic or free boundaries".into()));
            }
            if model.j < 0.0 {
                return Err(LabError::Guard("Wolff updates need J >= 0".into()));
            }
        }
        let n = state.lattice.len();
        Ok(IsingChain {
            state,
            model: model.clone(),
            beta,
            update,
            rng: chain_rng(seed, stream),
            stack: Vec::new(),
            seen: vec![false; n],
            wolff_clusters: 1,
        })
    }

    pub fn metropolis_step(&mut self) {
        let i = self.rng.gen_range(0..self.state.spins.len());
        let de = self.state.delta_energy(&self.model, i);
        if de <= 0.0 || self.rng.gen::<f64>() < (-self.beta * de).exp() {
            self.state.spins[i] = -self.state.spins[i];
        }
    }

    /// Grows and flips one cluster; returns its size.
    pub fn wolff_step(&mut self) -> usize {
        let lat = self.state.lattice;
        let p_add = 1.0 - (-2.0 * self.beta * self.model.j).exp();
        let seed = self.rng.gen_range(0..lat.len());
        let s = self.state.spins[seed];
        self.stack.clear();
        self.stack.push(seed);
        self.seen[seed] = true;
        let mut cluster = vec![seed];
        while let Some(i) = self.stack.pop() {
            let x = lat.site(i);
            for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if let Site::Inside(k) = lat.locate((x.0 + d.0, x.1 + d.1)) {
                    if !self.seen[k] && self.state.spins[k] == s && self.rng.gen::<f64>() < p_add {
                        self.seen[k] = true;
                        self.stack.push(k);
                        cluster.push(k);
                    }
                }
            }
        }
        for &i in &cluster {
            self.state.spins[i] = -s;
            self.seen[i] = false;
        }
        cluster.len()
    }

    /// Grows `steps` clusters and fixes the clusters per sweep so that a
    /// sweep flips about `N` spins on average. The count must not depend on
    /// the sampled clusters afterwards, or the sweep boundary biases the
    /// measure.
    pub fn calibrate_wolff(&mut self, steps: usize) {
        let total: usize = (0..steps.max(1)).map(|_| self.wolff_step()).sum();
        let mean = total as f64 / steps.max(1) as f64;
        self.wolff_clusters = ((self.state.spins.len() as f64 / mean).ceil() as usize).max(1);
    }

    pub fn wolff_clusters(&self) -> usize {
        self.wolff_clusters
    }

    /// `N` Metropolis steps, or a fixed number of Wolff clusters (see
    /// [`IsingChain::calibrate_wolff`]).
    pub fn sweep(&mut self) {
        let n = self.state.spins.len();
        match self.update {
            UpdateKind::Metropolis => {
                for _ in 0..n {
                    self.metropolis_step();
                }
            }
            UpdateKind::Wolff => {
                for _ in 0..self.wolff_clusters {
                    self.wolff_step();
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsingObservable {
    Magnetization,
    AbsMagnetization,
    /// `m^2` with `m` the mean spin.
    M2,
    M4,
    /// Energy per site.
    Energy,
    /// `s_x s_y`.
    Product((i64, i64), (i64, i64)),
}

impl IsingObservable {
    pub fn eval(&self, s: &IsingState, model: &IsingModel) -> f64 {
        let m = s.magnetization();
        match self {
            IsingObservable::Magnetization => m,
            IsingObservable::AbsMagnetization => m.abs(),
            IsingObservable::M2 => m * m,
            IsingObservable::M4 => m * m * m * m,
            IsingObservable::Energy => s.energy(model) / s.spins.len() as f64,
            IsingObservable::Product(a, b) => (s.spin(*a) * s.spin(*b)) as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsingRun {
    pub estimates: Vec<ChainEstimate>,
    pub series: Vec<Vec<f64>>,
    pub state: IsingState,
}

pub fn ising_mcmc_run(
    state: IsingState,
    model: &IsingModel,
    beta: f64,
    update: UpdateKind,
    schedule: &Schedule,
    seed: u64,
    observables: &[IsingObservable],
) -> Result<IsingRun> {
    let mut chain = IsingChain::new(state, model, beta, update, seed, 0)?;
    if update == UpdateKind::Wolff {
        chain.calibrate_wolff(100 + schedule.burn_in);
    }
    for _ in 0..schedule.burn_in {
        chain.sweep();
    }
    let mut series = vec![Vec::with_capacity(schedule.samples); observables.len()];
    for _ in 0..schedule.samples {
        for _ in 0..schedule.thin {
            chain.sweep();
        }
        for (o, s) in observables.iter().zip(series.iter_mut()) {
            s.push(o.eval(&chain.state, model));
        }
    }
    let estimates = series.iter().map(|s| estimate_autocorrelation(s, seed)).collect::<Result<Vec<_>>>()?;
    Ok(IsingRun { estimates, series, state: chain.state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn local_and_global_energy_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for bc in [
            IsingBoundary::Periodic,
            IsingBoundary::Cylinder,
            IsingBoundary::Free,
            IsingBoundary::Plus,
            IsingBoundary::Minus,
        ] {
            let lat = IsingLattice::new(7, 8, bc).unwrap();
            for inter in [
                IsingInteraction::DiagonalPairs,
                IsingInteraction::Plaquette,
                IsingInteraction::Custom(vec![vec![(0, 0), (2, 0), (0, 2), (2, 2)]]),
            ] {
                let model = IsingModel::new(0.37, inter).unwrap();
                let mut s = IsingState::random(lat, &mut rng);
                for _ in 0..20 {
                    let i = rng.gen_range(0..lat.len());
                    let before = s.energy(&model);
                    let de = s.delta_energy(&model, i);
                    s.spins[i] = -s.spins[i];
                    assert!((s.energy(&model) - before - de).abs() < 1e-12, "{bc:?}");
                }
            }
        }
    }

    #[test]
    fn ground_state_energy() {
        let lat = IsingLattice::new(8, 8, IsingBoundary::Periodic).unwrap();
        let s = IsingState::uniform(lat, 1);
        assert_eq!(s.energy(&IsingModel::nearest_neighbour()), -128.0);
        let m = IsingModel::new(0.5, IsingInteraction::DiagonalPairs).unwrap();
        assert_eq!(s.energy(&m), -128.0 - 64.0);
        let free = IsingState::uniform(IsingLattice::new(3, 3, IsingBoundary::Free).unwrap(), 1);
        assert_eq!(free.energy(&IsingModel::nearest_neighbour()), -12.0);
        let plus = IsingState::uniform(IsingLattice::new(3, 3, IsingBoundary::Plus).unwrap(), 1);
        assert_eq!(plus.energy(&IsingModel::nearest_neighbour()), -24.0);
    }

    #[test]
    fn high_temperature_magnetization() {
        let lat = IsingLattice::new(16, 16, IsingBoundary::Periodic).unwrap();
        let sched = Schedule::new(100, 4000, 1).unwrap();
        let run = ising_mcmc_run(
            IsingState::uniform(lat, 1),
            &IsingModel::nearest_neighbour(),
            0.2,
            UpdateKind::Metropolis,
            &sched,
            3,
            &[IsingObservable::Magnetization],
        )
        .unwrap();
        assert!(run.estimates[0].z_score(0.0) < 3.0, "{:?}", run.estimates[0]);
    }

    #[test]
    fn guards() {
        let lat = IsingLattice::new(8, 8, IsingBoundary::Plus).unwrap();
        let s = IsingState::uniform(lat, 1);
        assert!(IsingChain::new(s.clone(), &IsingModel::nearest_neighbour(), 0.4, UpdateKind::Wolff, 0, 0).is_err());
        let m = IsingModel::new(0.1, IsingInteraction::Plaquette).unwrap();
        let per = IsingState::uniform(IsingLattice::new(8, 8, IsingBoundary::Periodic).unwrap(), 1);
        assert!(IsingChain::new(per, &m, 0.4, UpdateKind::Wolff, 0, 0).is_err());
        assert!(IsingModel::new(2.0, IsingInteraction::Plaquette).is_err());
        assert!(IsingInteraction::Custom(vec![vec![(0, 0)]]).shapes().is_err());
        assert!(IsingLattice::new(2, 8, IsingBoundary::Periodic).is_err());
        let wide = IsingModel::new(0.1, IsingInteraction::Custom(vec![vec![(0, 0), (3, 0)]])).unwrap();
        let small = IsingState::uniform(IsingLattice::new(3, 8, IsingBoundary::Periodic).unwrap(), 1);
        assert!(IsingChain::new(small, &wide, 0.4, UpdateKind::Metropolis, 0, 0).is_err());
    }
}
