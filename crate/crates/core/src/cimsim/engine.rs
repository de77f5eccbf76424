use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::layout::{Layout, RefBit, TileAddr};
use super::subarray::{subarray_step, StepInput};
use super::tcam::{count_misses, TcamTables};
use super::tile::{tile_op, TileInstr, QUERY_ROW};
use super::{HwConfig, SimError};
use crate::filter::{shift_sets, FilterError, FilterParams, ShiftSet};
use crate::seq::PairRecord;

#[derive(Debug, Clone, Default)]
pub struct SimOptions {
    pub trace: bool,
    /// Replaces the exact-match tables.
    pub tcam: Option<TcamTables>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubarrayStats {
    pub bank_group: usize,
    pub bank: usize,
    pub subarray: usize,
    pub busy_cycles: u64,
    pub jobs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub total_cycles: u64,
    pub total_ns: f64,
    pub jobs_dispatched: u64,
    /// (segment group x shift-set) units implied by the workload.
    pub jobs_expected: u64,
    /// Cycles the rank spent blocked on a full FIFO.
    pub stall_count: u64,
    /// Cycles the rank spent waiting for a free id slot.
    pub id_stall_cycles: u64,
    pub fifo_full_events: u64,
    pub max_fifo_occupancy: usize,
    pub and_buffer_updates: u64,
    pub peak_active_subarrays: usize,
    pub subarray_busy: Vec<SubarrayStats>,
    pub verdicts: BTreeMap<u64, bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Load,
    Dispatch,
    Stall,
    Start,
    Finish,
    BusGrant,
    Deliver,
    AndBufferUpdate,
    GroupDone,
    PairDone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub cycle: u64,
    pub kind: TraceKind,
    pub subarray: Option<usize>,
    pub pair_id: Option<u64>,
    pub wordset: Option<i64>,
    pub bank_group: Option<usize>,
    pub shift_set: Option<usize>,
    /// FIFO occupancy for Dispatch/Stall, miss bits for Deliver/AndBufferUpdate,
    /// edit count for GroupDone/PairDone, zero otherwise.
    pub value: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub stats: SimStats,
    pub trace: Vec<TraceEvent>,
}

pub fn write_trace_csv<W: Write>(trace: &[TraceEvent], out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for ev in trace {
        w.serialize(ev).map_err(|e| SimError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| SimError::Io(e.to_string()))
}

pub fn simulate(pairs: &[PairRecord], cfg: &HwConfig, params: &FilterParams) -> Result<SimStats, SimError> {
    Ok(simulate_with(pairs, cfg, params, &SimOptions::default())?.stats)
}

pub fn simulate_with(
    pairs: &[PairRecord],
    cfg: &HwConfig,
    params: &FilterParams,
    opts: &SimOptions,
) -> Result<SimRun, SimError> {
    cfg.validate_for(params)?;
    if let Some(bad) = pairs.iter().find(|p| p.pad < params.threshold) {
        return Err(SimError::Filter(FilterError::PadTooSmall {
            id: bad.id,
            pad: bad.pad,
            threshold: params.threshold,
        }));
    }
    let mut ids = std::collections::HashSet::new();
    if let Some(dup) = pairs.iter().find(|p| !ids.insert(p.id)) {
        return Err(SimError::DuplicateId(dup.id));
    }
    let tcam = opts
        .tcam
        .clone()
        .unwrap_or_else(|| TcamTables::exact_match(params.segment_len));
    if !tcam.is_valid() {
        return Err(SimError::InvalidConfig("count_map(0000) must be 0".into()));
    }
    let layout = Layout::build(pairs, cfg)?;
    Engine::new(pairs, cfg, params, layout, tcam, opts.trace).run()
}

#[derive(Debug, Clone, Copy)]
struct Job {
    pair: usize,
    lsb: u32,
    wordset: i64,
    bank_group: usize,
    set: usize,
    target: usize,
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    job: Job,
    miss: u64,
    active: u64,
}

struct Task {
    pair: usize,
    set: usize,
    wordset: i64,
    bank_groups: Vec<usize>,
}

enum RankState {
    Idle,
    Loading { until: u64 },
    Pushing { jobs: VecDeque<Job> },
}

#[derive(Clone, Copy)]
enum SaState {
    Idle,
    Busy { until: u64, out: Outcome },
    WaitBus { out: Outcome },
    Transferring,
}

struct SubArray {
    fifo: VecDeque<Job>,
    state: SaState,
    busy: u64,
    jobs: u64,
}

struct Bus {
    inflight: Option<(u64, usize, Outcome)>,
    next: usize,
}

struct GroupAcc {
    and_miss: u64,
    arrivals: usize,
}

struct PairState {
    groups_left: usize,
    misses: u64,
    started: bool,
}

struct Engine<'a> {
    pairs: &'a [PairRecord],
    cfg: &'a HwConfig,
    t: usize,
    threshold: u64,
    sets: Vec<ShiftSet>,
    layout: Layout,
    tcam: TcamTables,
    tracing: bool,
    trace: Vec<TraceEvent>,

    tasks: Vec<Task>,
    next_task: usize,
    rank: RankState,
    subarrays: Vec<SubArray>,
    buses: Vec<Bus>,
    groups: HashMap<(usize, i64, usize), GroupAcc>,
    pair_state: Vec<PairState>,
    id_slots: Vec<Option<usize>>,
    stats: SimStats,
    busy_now: usize,
}

impl<'a> Engine<'a> {
    fn new(
        pairs: &'a [PairRecord],
        cfg: &'a HwConfig,
        params: &FilterParams,
        layout: Layout,
        tcam: TcamTables,
        tracing: bool,
    ) -> Self {
        let sets = shift_sets(params.threshold, cfg.ws);
        let b = cfg.wordset_bases() as i64;
        let wb = cfg.word_bases() as i64;
        let mut tasks = Vec::new();
        let mut pair_state = Vec::with_capacity(pairs.len());
        let mut expected = 0u64;
        for (pi, p) in pairs.iter().enumerate() {
            let lo = p.phi as i64;
            let hi = lo + p.read_len() as i64;
            let mut words: Vec<(i64, Vec<usize>)> = Vec::new();
            if hi > lo {
                for w in lo.div_euclid(b)..=(hi - 1).div_euclid(b) {
                    let bgs: Vec<usize> = (0..cfg.n_bank_groups)
                        .filter(|&g| {
                            let s = w * b + g as i64 * wb;
                            s < hi && s + wb > lo
                        })
                        .collect();
                    words.push((w, bgs));
                }
            }
            let n_groups: usize = words.iter().map(|(_, g)| g.len()).sum();
            expected += (n_groups * sets.len()) as u64;
            for set in 0..sets.len() {
                for (w, bgs) in &words {
                    for chunk in bgs.chunks(cfg.wpb) {
                        tasks.push(Task {
                            pair: pi,
                            set,
                            wordset: *w,
                            bank_groups: chunk.to_vec(),
                        });
                    }
                }
            }
            pair_state.push(PairState {
                groups_left: n_groups,
                misses: 0,
                started: false,
            });
        }
        let n_sa = cfg.n_subarrays();
        let mut subarray_busy = Vec::with_capacity(n_sa);
        for bg in 0..cfg.n_bank_groups {
            for bank in 0..cfg.n_banks_per_group {
                for subarray in 0..cfg.n_subarrays_per_bank {
                    subarray_busy.push(SubarrayStats {
                        bank_group: bg,
                        bank,
                        subarray,
                        busy_cycles: 0,
                        jobs: 0,
                    });
                }
            }
        }
        let mut verdicts = BTreeMap::new();
        for (p, st) in pairs.iter().zip(&pair_state) {
            if st.groups_left == 0 {
                verdicts.insert(p.id, true);
            }
        }
        Self {
            pairs,
            cfg,
            t: params.segment_len,
            threshold: params.threshold as u64,
            sets,
            layout,
            tcam,
            tracing,
            trace: Vec::new(),
            tasks,
            next_task: 0,
            rank: RankState::Idle,
            subarrays: (0..n_sa)
                .map(|_| SubArray {
                    fifo: VecDeque::new(),
                    state: SaState::Idle,
                    busy: 0,
                    jobs: 0,
                })
                .collect(),
            buses: (0..cfg.n_bank_groups * cfg.n_banks_per_group)
                .map(|_| Bus { inflight: None, next: 0 })
                .collect(),
            groups: HashMap::new(),
            pair_state,
            id_slots: vec![None; 1 << cfg.id_lsb_bits],
            stats: SimStats {
                total_cycles: 0,
                total_ns: 0.0,
                jobs_dispatched: 0,
                jobs_expected: expected,
                stall_count: 0,
                id_stall_cycles: 0,
                fifo_full_events: 0,
                max_fifo_occupancy: 0,
                and_buffer_updates: 0,
                peak_active_subarrays: 0,
                subarray_busy,
                verdicts,
            },
            busy_now: 0,
        }
    }

    fn subarray_index(&self, bank_group: usize, bank: usize, subarray: usize) -> usize {
        (bank_group * self.cfg.n_banks_per_group + bank) * self.cfg.n_subarrays_per_bank + subarray
    }

    fn id_lsb(&self, pair: usize) -> usize {
        (self.pairs[pair].id & ((1u64 << self.cfg.id_lsb_bits) - 1)) as usize
    }

    fn job_cost(&self, set: usize) -> u64 {
        let tm = &self.cfg.timing;
        tm.tile_write + self.sets[set].size as u64 * tm.tile_xor + tm.subarray_pipeline
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(
        &mut self,
        cycle: u64,
        kind: TraceKind,
        subarray: Option<usize>,
        pair: Option<usize>,
        group: Option<(i64, usize)>,
        shift_set: Option<usize>,
        value: u64,
    ) {
        if kind == TraceKind::AndBufferUpdate {
            self.stats.and_buffer_updates += 1;
        }
        if self.tracing {
            self.trace.push(TraceEvent {
                cycle,
                kind,
                subarray,
                pair_id: pair.map(|p| self.pairs[p].id),
                wordset: group.map(|g| g.0),
                bank_group: group.map(|g| g.1),
                shift_set,
                value,
            });
        }
    }

    fn job_event(&mut self, cycle: u64, kind: TraceKind, job: &Job, value: u64) {
        self.emit(
            cycle,
            kind,
            Some(job.target),
            Some(job.pair),
            Some((job.wordset, job.bank_group)),
            Some(job.set),
            value,
        );
    }

    /// Functional execution of one job on the tiles of its home sub-array.
    fn run_job(&mut self, job: &Job) -> Result<(u64, u64), SimError> {
        let g = self.layout.geometry();
        let pair = &self.pairs[job.pair];
        let set = self.sets[job.set];
        let t = self.t;
        let n = g.n;
        let phi = pair.phi as i64;
        let end = phi + pair.read_len() as i64;
        let (win_lo, win_hi) = self.layout.pairs()[job.pair].window;
        let word_lo = job.wordset * g.wordset_bases + job.bank_group as i64 * g.word_bases;
        let slots = g.word_bases as usize / t;

        let mut masks = vec![0u64; slots];
        let mut active = 0u64;
        for (s, m) in masks.iter_mut().enumerate() {
            for k in 0..t {
                let x = word_lo + (s * t + k) as i64;
                if x >= phi && x < end {
                    *m |= 1 << k;
                }
            }
            if *m != 0 {
                active |= 1 << s;
            }
        }

        let missing = |base: i64| SimError::Internal(format!(
            "pair {}: column {base} has no stored word-set",
            pair.id
        ));

        // displaced read into the query rows
        let mut writes: Vec<(TileAddr, usize, u64)> = Vec::new();
        for x in word_lo.max(phi)..(word_lo + g.word_bases).min(end) {
            let code = pair.read.code((x - phi) as usize);
            let c = x + set.base;
            for h in 0..2 {
                let rb = RefBit { pair: job.pair, base: c, bit: h, row: usize::MAX };
                let cell = self.layout.locate(rb).ok_or_else(|| missing(c))?;
                let chunk = cell.col / n * n;
                let bit = ((code >> (1 - h)) & 1) as u64;
                match writes.iter_mut().find(|w| w.0 == cell.tile && w.1 == chunk) {
                    Some(w) => w.2 |= bit << (cell.col - chunk),
                    None => writes.push((cell.tile, chunk, bit << (cell.col - chunk))),
                }
            }
        }
        for &(tile, chunk, data) in &writes {
            tile_op(self.layout.tile_mut(tile), TileInstr::Write, QUERY_ROW, chunk, data)?;
        }

        let mut matched = 0u64;
        let mut sensed: Vec<(TileAddr, usize, usize, u64)> = Vec::new();
        for r in 0..set.size {
            sensed.clear();
            for (s, &mask) in masks.iter().enumerate() {
                if mask == 0 {
                    continue;
                }
                let mut operand = 0u128;
                let mut invalid = 0u64;
                for k in (0..t).filter(|k| mask >> k & 1 == 1) {
                    let c = word_lo + (s * t + k) as i64 + set.base;
                    let src = c + r as i64;
                    if src < win_lo || src >= win_hi {
                        invalid |= 1 << k;
                    }
                    for h in 0..2 {
                        let rb = RefBit { pair: job.pair, base: c, bit: h, row: r };
                        let cell = self.layout.locate(rb).ok_or_else(|| missing(c))?;
                        let chunk = cell.col / n * n;
                        let v = match sensed
                            .iter()
                            .find(|e| e.0 == cell.tile && e.1 == cell.row && e.2 == chunk)
                        {
                            Some(e) => e.3,
                            None => {
                                let v = tile_op(self.layout.tile_mut(cell.tile), TileInstr::Xor, cell.row, chunk, 0)?
                                    .unwrap_or(0);
                                sensed.push((cell.tile, cell.row, chunk, v));
                                v
                            }
                        };
                        operand |= (((v >> (cell.col - chunk)) & 1) as u128) << (2 * k + h);
                    }
                }
                let input = StepInput {
                    operand,
                    invalid,
                    mask,
                    id: job.lsb,
                };
                if subarray_step(input, t, &self.tcam).0 {
                    matched |= 1 << s;
                }
            }
        }
        Ok((active & !matched, active))
    }

    fn deliver(&mut self, now: u64, out: Outcome) {
        let job = out.job;
        // re-associate the full id from the rank-side slot
        let pair = self.id_slots[job.lsb as usize].expect("id slot held while jobs are in flight");
        debug_assert_eq!(pair, job.pair);
        self.job_event(now, TraceKind::Deliver, &job, out.miss);
        let n_sets = self.sets.len();
        let key = (pair, job.wordset, job.bank_group);
        let acc = self.groups.entry(key).or_insert(GroupAcc {
            and_miss: u64::MAX,
            arrivals: 0,
        });
        acc.and_miss &= out.miss;
        acc.arrivals += 1;
        let (and_miss, arrivals) = (acc.and_miss, acc.arrivals);
        self.job_event(now, TraceKind::AndBufferUpdate, &job, and_miss & out.active);
        if arrivals < n_sets {
            return;
        }
        self.groups.remove(&key);
        let slots = self.cfg.word_bases() / self.t;
        let count = count_misses(and_miss & out.active, slots, &self.tcam) as u64;
        let done = now + self.cfg.timing.tcam_query;
        self.emit(done, TraceKind::GroupDone, None, Some(pair), Some((job.wordset, job.bank_group)), None, count);
        let st = &mut self.pair_state[pair];
        st.misses += count;
        st.groups_left -= 1;
        if st.groups_left == 0 {
            let misses = st.misses;
            self.stats.verdicts.insert(self.pairs[pair].id, misses <= self.threshold);
            self.id_slots[job.lsb as usize] = None;
            self.stats.total_cycles = self.stats.total_cycles.max(done);
            self.emit(done, TraceKind::PairDone, None, Some(pair), None, None, misses);
        }
    }

    /// Advances the rank and starts idle sub-arrays until nothing changes.
    fn settle(&mut self, now: u64) -> Result<(), SimError> {
        loop {
            let mut progressed = false;
            match std::mem::replace(&mut self.rank, RankState::Idle) {
                RankState::Loading { until } if until == now => {
                    let task = &self.tasks[self.next_task - 1];
                    let pl = self
                        .layout
                        .placement(task.pair, task.wordset)
                        .expect("read word-sets are stored");
                    let lsb = self.id_lsb(task.pair) as u32;
                    let jobs = task
                        .bank_groups
                        .iter()
                        .map(|&bg| Job {
                            pair: task.pair,
                            lsb,
                            wordset: task.wordset,
                            bank_group: bg,
                            set: task.set,
                            target: self.subarray_index(bg, pl.bank, pl.subarray),
                        })
                        .collect();
                    self.rank = RankState::Pushing { jobs };
                    progressed = true;
                }
                loading @ RankState::Loading { .. } => self.rank = loading,
                RankState::Pushing { mut jobs } => {
                    let depth = self.cfg.fifo_depth;
                    while let Some(&job) = jobs.front() {
                        let fifo = &mut self.subarrays[job.target].fifo;
                        if fifo.len() >= depth {
                            break;
                        }
                        fifo.push_back(job);
                        let occ = fifo.len();
                        jobs.pop_front();
                        progressed = true;
                        self.stats.jobs_dispatched += 1;
                        self.stats.max_fifo_occupancy = self.stats.max_fifo_occupancy.max(occ);
                        if occ == depth {
                            self.stats.fifo_full_events += 1;
                        }
                        self.job_event(now, TraceKind::Dispatch, &job, occ as u64);
                    }
                    if jobs.is_empty() {
                        progressed = true;
                    } else {
                        self.rank = RankState::Pushing { jobs };
                    }
                }
                RankState::Idle => {
                    if let Some(task) = self.tasks.get(self.next_task) {
                        let pair = task.pair;
                        let slot = self.id_lsb(pair);
                        if self.id_slots[slot].is_none_or(|p| p == pair) {
                            self.id_slots[slot] = Some(pair);
                            self.pair_state[pair].started = true;
                            let words = task.bank_groups.len() as u64;
                            let until = now + words * self.cfg.timing.rank_dispatch;
                            let set = task.set;
                            self.next_task += 1;
                            self.rank = RankState::Loading { until };
                            self.emit(now, TraceKind::Load, None, Some(pair), None, Some(set), words);
                            progressed = true;
                        }
                    }
                }
            }
            for i in 0..self.subarrays.len() {
                if !matches!(self.subarrays[i].state, SaState::Idle) {
                    continue;
                }
                let Some(job) = self.subarrays[i].fifo.pop_front() else {
                    continue;
                };
                let (miss, active) = self.run_job(&job)?;
                let cost = self.job_cost(job.set);
                let sa = &mut self.subarrays[i];
                sa.state = SaState::Busy {
                    until: now + cost,
                    out: Outcome { job, miss, active },
                };
                sa.busy += cost;
                sa.jobs += 1;
                self.busy_now += 1;
                self.job_event(now, TraceKind::Start, &job, 0);
                progressed = true;
            }
            self.stats.peak_active_subarrays = self.stats.peak_active_subarrays.max(self.busy_now);
            if !progressed {
                return Ok(());
            }
        }
    }

    fn grant_buses(&mut self, now: u64) {
        let per_bank = self.cfg.n_subarrays_per_bank;
        for b in 0..self.buses.len() {
            if self.buses[b].inflight.is_some() {
                continue;
            }
            let first = b * per_bank;
            let start = self.buses[b].next;
            for k in 0..per_bank {
                let s = (start + k) % per_bank;
                let i = first + s;
                if let SaState::WaitBus { out } = self.subarrays[i].state {
                    self.subarrays[i].state = SaState::Transferring;
                    self.buses[b].inflight = Some((now + self.cfg.timing.bus_transfer, i, out));
                    self.buses[b].next = (s + 1) % per_bank;
                    self.job_event(now, TraceKind::BusGrant, &out.job, 0);
                    break;
                }
            }
        }
    }

    fn idle(&self) -> bool {
        self.next_task == self.tasks.len()
            && matches!(self.rank, RankState::Idle)
            && self.buses.iter().all(|b| b.inflight.is_none())
            && self
                .subarrays
                .iter()
                .all(|s| s.fifo.is_empty() && matches!(s.state, SaState::Idle))
    }

    fn run(mut self) -> Result<SimRun, SimError> {
        let mut now = 0u64;
        let mut blocked_since_stall = false;
        loop {
            for b in 0..self.buses.len() {
                if let Some((end, i, out)) = self.buses[b].inflight {
                    if end == now {
                        self.buses[b].inflight = None;
                        self.subarrays[i].state = SaState::Idle;
                        self.deliver(now, out);
                    }
                }
            }
            for i in 0..self.subarrays.len() {
                if let SaState::Busy { until, out } = self.subarrays[i].state {
                    if until == now {
                        self.subarrays[i].state = SaState::WaitBus { out };
                        self.busy_now -= 1;
                        self.job_event(now, TraceKind::Finish, &out.job, out.miss);
                    }
                }
            }
            self.settle(now)?;
            self.grant_buses(now);

            if self.idle() {
                break;
            }
            let fifo_block = match &self.rank {
                RankState::Pushing { jobs } => jobs.front().copied(),
                _ => None,
            };
            let id_block = matches!(self.rank, RankState::Idle) && self.next_task < self.tasks.len();
            if let Some(job) = fifo_block {
                if !blocked_since_stall {
                    let occ = self.subarrays[job.target].fifo.len() as u64;
                    self.job_event(now, TraceKind::Stall, &job, occ);
                }
            }
            blocked_since_stall = fifo_block.is_some();

            let mut next: Option<u64> = None;
            let mut consider = |t: u64| next = Some(next.map_or(t, |n: u64| n.min(t)));
            for b in &self.buses {
                if let Some((end, _, _)) = b.inflight {
                    consider(end);
                }
            }
            for s in &self.subarrays {
                if let SaState::Busy { until, .. } = s.state {
                    consider(until);
                }
            }
            if let RankState::Loading { until } = self.rank {
                consider(until);
            }
            let Some(t) = next else {
                return Err(SimError::DeadlockDetected { cycle: now });
            };
            if fifo_block.is_some() {
                self.stats.stall_count += t - now;
            } else if id_block {
                self.stats.id_stall_cycles += t - now;
            }
            now = t;
        }

        for (st, sa) in self.stats.subarray_busy.iter_mut().zip(&self.subarrays) {
            st.busy_cycles = sa.busy;
            st.jobs = sa.jobs;
        }
        self.stats.total_ns = self.stats.total_cycles as f64 * self.cfg.clock_ns;
        debug_assert!(self.pair_state.iter().all(|p| p.groups_left == 0 && (p.started || p.misses == 0)));
        Ok(SimRun {
            stats: self.stats,
            trace: self.trace,
        })
    }
}
