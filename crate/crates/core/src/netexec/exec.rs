use super::{
    ClassicalMessage, Ctx, Delivery, Distribution, MachineId, MachineSpec, NetError, Network, Out, ResetReason,
    TraceEntry,
};
use crate::qcore::{
    enumerate, BranchCapExceeded, Branching, QuantumPool, QubitRegister, Sampler, DEFAULT_QUBIT_CAP, PROB_EPS,
};

pub const DEFAULT_MAX_STEPS: usize = 100_000;
pub const DEFAULT_BRANCH_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sample { seed: u64 },
    ExactTree { cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    pub k: u32,
    pub z: Vec<u8>,
    /// Activation budget.
    pub max_steps: usize,
    pub mode: Mode,
    pub record_trace: bool,
    pub qubit_cap: usize,
}

impl Default for ExecConfig {
    fn default() -> Self {
        ExecConfig {
            k: 1,
            z: Vec::new(),
            max_steps: DEFAULT_MAX_STEPS,
            mode: Mode::Sample { seed: 0 },
            record_trace: false,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

impl ExecConfig {
    pub fn exact() -> Self {
        ExecConfig {
            mode: Mode::ExactTree {
                cap: DEFAULT_BRANCH_CAP,
            },
            ..Self::default()
        }
    }

    pub fn traced(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.max_steps == 0 {
            return Err(NetError::InvalidConfig("max_steps must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(NetError::InvalidConfig("k must be positive".into()));
        }
        Ok(())
    }
}

/// What the environment returned.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    Value(Vec<u8>),
    Timeout,
}

impl Output {
    pub fn value(&self) -> Option<&[u8]> {
        match self {
            Output::Value(v) => Some(v),
            Output::Timeout => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExecResult {
    pub output: Output,
    /// Empty unless tracing was requested.
    pub trace: Vec<TraceEntry>,
    pub activations: usize,
    /// Largest deviation of a state norm from 1 at the end of the run.
    pub norm_deviation: f64,
}

/// An exact distribution with bookkeeping from the enumeration.
#[derive(Clone, Debug)]
pub struct Exact<K: Ord> {
    pub dist: Distribution<K>,
    pub leaves: usize,
    pub max_norm_deviation: f64,
}

impl<K: Ord> Exact<K> {
    /// `|sum p - 1|`.
    pub fn mass_error(&self) -> f64 {
        (self.dist.total() - 1.0).abs()
    }
}

pub type OutcomeDistribution = Exact<Output>;

#[derive(Clone, Debug)]
pub enum Execution {
    Run(ExecResult),
    Distribution(OutcomeDistribution),
}

fn check(net: &Network, cfg: &ExecConfig) -> Result<(), NetError> {
    cfg.validate()?;
    if !net.contains(&MachineId::environment()) {
        return Err(NetError::MissingEnvironment);
    }
    Ok(())
}

/// One execution, drawing all randomness from `rng`.
pub fn run(net: &Network, cfg: &ExecConfig, rng: &mut dyn Branching) -> Result<ExecResult, NetError> {
    check(net, cfg)?;
    Ok(run_unchecked(net, cfg, rng))
}

/// Mutable part of one execution, cloned at branch points in exact mode.
#[derive(Clone)]
struct RunState {
    machines: Vec<MachineSpec>,
    pool: QuantumPool,
    reg: ClassicalMessage,
    qubits: QubitRegister,
    trace: Vec<TraceEntry>,
    activations: usize,
    note: Option<ResetReason>,
}

impl RunState {
    fn new(net: &Network, cfg: &ExecConfig) -> Self {
        RunState {
            machines: net.machines().to_vec(),
            pool: QuantumPool::new(cfg.qubit_cap),
            reg: ClassicalMessage::reset(),
            qubits: QubitRegister::empty(),
            trace: Vec::new(),
            activations: 0,
            note: None,
        }
    }

    /// The parts of the state the next activation can change.
    fn snapshot(&self, net: &Network) -> Snapshot {
        Snapshot {
            machine: net.position(&self.reg.recipient).map(|p| (p, self.machines[p].clone())),
            pool: self.pool.clone(),
            reg: self.reg.clone(),
            qubits: self.qubits.clone(),
            trace_len: self.trace.len(),
            activations: self.activations,
            note: self.note,
        }
    }

    fn restore(&mut self, snap: Snapshot) {
        if let Some((p, m)) = snap.machine {
            self.machines[p] = m;
        }
        self.pool = snap.pool;
        self.reg = snap.reg;
        self.qubits = snap.qubits;
        self.trace.truncate(snap.trace_len);
        self.activations = snap.activations;
        self.note = snap.note;
    }

    fn finish(self, output: Output) -> ExecResult {
        ExecResult {
            output,
            trace: self.trace,
            activations: self.activations,
            norm_deviation: self.pool.max_norm_deviation(),
        }
    }

    /// Delivers the register to its recipient and processes the output.
    /// Returns the environment's output once the run is over.
    fn step(&mut self, net: &Network, cfg: &ExecConfig, rng: &mut dyn Branching) -> Option<Output> {
        if self.activations >= cfg.max_steps {
            return Some(Output::Timeout);
        }
        let Some(pos) = net.position(&self.reg.recipient) else {
            let reg = std::mem::replace(&mut self.reg, ClassicalMessage::reset());
            if cfg.record_trace {
                self.trace.push(TraceEntry {
                    step: self.activations,
                    message: reg,
                    qubits: self.qubits.len(),
                    note: Some(ResetReason::UnknownRecipient),
                });
            }
            self.qubits = QubitRegister::empty();
            self.note = Some(ResetReason::UnknownRecipient);
            return None;
        };
        if cfg.record_trace {
            self.trace.push(TraceEntry {
                step: self.activations,
                message: self.reg.clone(),
                qubits: self.qubits.len(),
                note: self.note.take(),
            });
        }
        let spec = &mut self.machines[pos];
        let mut ctx = Ctx {
            k: cfg.k,
            z: &cfg.z,
            pool: &mut self.pool,
            rng,
        };
        let emission = spec.behavior.react(
            &spec.id,
            &mut ctx,
            Delivery {
                message: std::mem::replace(&mut self.reg, ClassicalMessage::reset()),
                qubits: std::mem::take(&mut self.qubits),
            },
        );
        self.activations += 1;

        let parsed = match emission.out {
            Out::Nothing => Err(ResetReason::Absorbed),
            Out::Raw(bytes) => ClassicalMessage::parse(&bytes).map_err(|_| ResetReason::Unparseable),
            Out::Message(m) => Ok(m),
        }
        .and_then(|m| if m.sender == spec.id { Ok(m) } else { Err(ResetReason::WrongSender) });
        match parsed {
            Ok(m) => {
                if m.recipient.is_epsilon() && spec.id.is_environment() {
                    if cfg.record_trace {
                        self.trace.push(TraceEntry {
                            step: self.activations,
                            message: m.clone(),
                            qubits: emission.qubits.len(),
                            note: None,
                        });
                    }
                    return Some(Output::Value(m.payload));
                }
                self.reg = m;
                self.qubits = emission.qubits;
            }
            Err(reason) => {
                self.note = Some(reason);
            }
        }
        None
    }
}

fn run_unchecked(net: &Network, cfg: &ExecConfig, rng: &mut dyn Branching) -> ExecResult {
    let mut state = RunState::new(net, cfg);
    loop {
        if let Some(out) = state.step(net, cfg, rng) {
            return state.finish(out);
        }
    }
}

struct Snapshot {
    machine: Option<(usize, MachineSpec)>,
    pool: QuantumPool,
    reg: ClassicalMessage,
    qubits: QubitRegister,
    trace_len: usize,
    activations: usize,
    note: Option<ResetReason>,
}

/// Follows forced choices and flags the first real one.
struct Detect {
    branched: bool,
}

impl Branching for Detect {
    fn branch(&mut self, weights: &[f64]) -> usize {
        let mut live = weights.iter().enumerate().filter(|(_, &w)| w > PROB_EPS);
        match (live.next(), live.next()) {
            (Some((i, _)), None) => i,
            _ => {
                self.branched = true;
                0
            }
        }
    }

    fn uniform(&mut self, n: usize) -> usize {
        if n > 1 {
            self.branched = true;
        }
        0
    }
}

/// Randomness source for machines that declare they use none.
struct Forced;

impl Branching for Forced {
    fn branch(&mut self, weights: &[f64]) -> usize {
        let mut live = weights.iter().enumerate().filter(|(_, &w)| w > PROB_EPS);
        match (live.next(), live.next()) {
            (Some((i, _)), None) => i,
            _ => panic!("a deterministic machine drew randomness"),
        }
    }

    fn uniform(&mut self, n: usize) -> usize {
        assert!(n <= 1, "a deterministic machine drew randomness");
        0
    }
}

struct Explorer<'a, K: Ord, P> {
    net: &'a Network,
    cfg: &'a ExecConfig,
    cap: usize,
    project: P,
    dist: Distribution<K>,
    leaves: usize,
    dev: f64,
    over_cap: bool,
}

impl<K: Ord, P: FnMut(ExecResult) -> K> Explorer<'_, K, P> {
    /// Runs deterministic activations in place; at the first activation that
    /// draws randomness, enumerates that activation's branches and recurses
    /// on each resulting state.
    fn explore(&mut self, mut state: RunState, prob: f64) {
        loop {
            if self.over_cap {
                return;
            }
            let fixed = self
                .net
                .position(&state.reg.recipient)
                .is_none_or(|p| state.machines[p].behavior.deterministic());
            if fixed {
                if let Some(out) = state.step(self.net, self.cfg, &mut Forced) {
                    self.leaf(state.finish(out), prob);
                    return;
                }
                continue;
            }
            let snap = state.snapshot(self.net);
            let mut detect = Detect { branched: false };
            let out = state.step(self.net, self.cfg, &mut detect);
            if !detect.branched {
                if let Some(out) = out {
                    self.leaf(state.finish(out), prob);
                    return;
                }
                continue;
            }
            state.restore(snap);
            let (net, cfg) = (self.net, self.cfg);
            let res = enumerate(
                usize::MAX,
                |b| {
                    let mut s = state.clone();
                    let out = s.step(net, cfg, b);
                    (s, out)
                },
                |(s, out), p| match out {
                    Some(out) => self.leaf(s.finish(out), prob * p),
                    None => self.explore(s, prob * p),
                },
            );
            res.expect("unbounded");
            return;
        }
    }

    fn leaf(&mut self, r: ExecResult, prob: f64) {
        if self.over_cap {
            return;
        }
        self.leaves += 1;
        if self.leaves > self.cap {
            self.over_cap = true;
            return;
        }
        self.dev = self.dev.max(r.norm_deviation);
        self.dist.add((self.project)(r), prob);
    }
}

/// One sampled execution.
pub fn sample(net: &Network, cfg: &ExecConfig, seed: u64) -> Result<ExecResult, NetError> {
    run(net, cfg, &mut Sampler::new(seed))
}

/// Distribution of `project(result)` over every branch of the execution.
pub fn exact_map<K: Ord>(
    net: &Network,
    cfg: &ExecConfig,
    cap: usize,
    mut project: impl FnMut(ExecResult) -> K,
) -> Result<Exact<K>, NetError> {
    check(net, cfg)?;
    let mut ex = Explorer {
        net,
        cfg,
        cap,
        project: &mut project,
        dist: Distribution::new(),
        leaves: 0,
        dev: 0.0,
        over_cap: false,
    };
    ex.explore(RunState::new(net, cfg), 1.0);
    if ex.over_cap {
        return Err(BranchCapExceeded { cap }.into());
    }
    Ok(Exact {
        dist: ex.dist,
        leaves: ex.leaves,
        max_norm_deviation: ex.dev,
    })
}

/// Exact distribution of the environment's output.
pub fn exact(net: &Network, cfg: &ExecConfig, cap: usize) -> Result<OutcomeDistribution, NetError> {
    exact_map(net, cfg, cap, |r| r.output)
}

/// Runs according to `cfg.mode`.
pub fn exec_network(net: &Network, cfg: &ExecConfig) -> Result<Execution, NetError> {
    match cfg.mode {
        Mode::Sample { seed } => sample(net, cfg, seed).map(Execution::Run),
        Mode::ExactTree { cap } => exact(net, cfg, cap).map(Execution::Distribution),
    }
}

/// Seed of trial `i` in a batch seeded with `seed`.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 step so neighbouring batch seeds do not share trials
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
