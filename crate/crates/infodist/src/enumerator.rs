//! Exhaustive enumeration of halting programs up to a length and step
//! bound, yielding exact bounded complexity tables.
//!
//! The search explores the demand-driven program tree: run the machine,
//! and whenever it requests a program bit that has not been supplied,
//! fork on 0 and 1. Every prefix-free branch is visited exactly once, so
//! the result equals testing all `2^L` strings at a fraction of the
//! cost. Absent entries always mean `K > L`, never "unknown".

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::machine::{encode_condition, EnumRun, MachineId, MachineSpec, RunOutcome};

/// Bounds and resource limits for one enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationConfig {
    /// L: maximum program length in bits (at most 32).
    pub max_program_len: u32,
    /// T: step budget per run.
    pub step_budget: u64,
    /// Outputs longer than this are still counted as halting programs
    /// (they matter for the Kraft sum) but get no table entry.
    pub max_output_len: u32,
    /// Hard cap on fork-tree nodes; exceeding it is a reported error,
    /// never a silent truncation.
    pub node_cap: u64,
    /// Worker threads; any value produces identical results.
    pub workers: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            max_program_len: 22,
            step_budget: 4096,
            max_output_len: 8,
            node_cap: 100_000_000,
            workers: 1,
        }
    }
}

impl EnumerationConfig {
    fn validate(&self) -> Result<()> {
        if self.max_program_len > 32 {
            return Err(Error::InvalidInput(format!(
                "max program length {} exceeds the supported 32 bits",
                self.max_program_len
            )));
        }
        if self.max_output_len > 63 {
            return Err(Error::InvalidInput(format!(
                "max output length {} exceeds the supported 63 bits",
                self.max_output_len
            )));
        }
        Ok(())
    }
}

/// Exact bounded complexities for one condition: the minimum consumed
/// length per output, plus the multiset of halting-program lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSlice {
    condition: BitString,
    entries: BTreeMap<BitString, u32>,
    length_hist: BTreeMap<u32, u64>,
}

impl ConditionSlice {
    pub fn condition(&self) -> &BitString {
        &self.condition
    }

    /// Output → exact `K_{L,T}` value, for outputs within the configured
    /// length cap.
    pub fn entries(&self) -> &BTreeMap<BitString, u32> {
        &self.entries
    }

    /// Halting-program length → number of halting programs of that
    /// length (all halting programs, regardless of output length).
    pub fn length_hist(&self) -> &BTreeMap<u32, u64> {
        &self.length_hist
    }
}

/// Bounded complexity values `K_{L,T}(y|x)` on one machine, keyed by
/// condition and output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    machine: MachineId,
    max_program_len: u32,
    step_budget: u64,
    slices: BTreeMap<BitString, ConditionSlice>,
}

/// Result of the incompressibility counting check: fewer than `2^n`
/// outputs may have complexity below `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingCheck {
    pub n: u32,
    pub count: u64,
    pub bound: u64,
    pub pass: bool,
}

impl ComplexityTable {
    pub fn new(machine: MachineId, max_program_len: u32, step_budget: u64) -> Self {
        ComplexityTable {
            machine,
            max_program_len,
            step_budget,
            slices: BTreeMap::new(),
        }
    }

    pub fn machine(&self) -> MachineId {
        self.machine
    }

    pub fn max_program_len(&self) -> u32 {
        self.max_program_len
    }

    pub fn step_budget(&self) -> u64 {
        self.step_budget
    }

    pub fn conditions(&self) -> impl Iterator<Item = &BitString> {
        self.slices.keys()
    }

    pub fn slice(&self, condition: &BitString) -> Option<&ConditionSlice> {
        self.slices.get(condition)
    }

    /// Insert or replace the slice for its condition.
    pub fn insert_slice(&mut self, slice: ConditionSlice) {
        self.slices.insert(slice.condition.clone(), slice);
    }

    fn require_slice(&self, condition: &BitString) -> Result<&ConditionSlice> {
        self.slices
            .get(condition)
            .ok_or_else(|| Error::ConditionNotEnumerated(condition.to_text()))
    }

    /// `K_{L,T}(x)`: lookup under the empty condition. `Ok(None)` means
    /// the one-sided bound `K > L`.
    pub fn k_plain(&self, x: &BitString) -> Result<Option<u32>> {
        self.k_cond(x, &BitString::new())
    }

    /// `K_{L,T}(y|x)`. `Ok(None)` means the one-sided bound `K > L`.
    pub fn k_cond(&self, y: &BitString, x: &BitString) -> Result<Option<u32>> {
        Ok(self.require_slice(x)?.entries.get(y).copied())
    }

    /// Sum of `2^-|p|` over the distinct halting programs recorded for
    /// `condition`; at most 1 by the prefix property.
    pub fn kraft_sum(&self, condition: &BitString) -> Result<f64> {
        let slice = self.require_slice(condition)?;
        Ok(slice
            .length_hist
            .iter()
            .map(|(&len, &count)| count as f64 * 2f64.powi(-(len as i32)))
            .sum())
    }

    /// Count outputs with plain complexity below `n` against the `2^n`
    /// incompressibility bound.
    pub fn counting_check(&self, n: u32) -> Result<CountingCheck> {
        if n >= 64 {
            return Err(Error::InvalidInput(format!("counting bound 2^{n} exceeds u64")));
        }
        let slice = self.require_slice(&BitString::new())?;
        let count = slice.entries.values().filter(|&&k| k < n).count() as u64;
        let bound = 1u64 << n;
        Ok(CountingCheck {
            n,
            count,
            bound,
            pass: count < bound,
        })
    }
}

/// True if no string in the set is a proper prefix of another.
pub fn is_prefix_free(programs: &[BitString]) -> bool {
    let mut sorted: Vec<&BitString> = programs.iter().collect();
    sorted.sort_by(|a, b| a.bits().cmp(b.bits()));
    sorted
        .windows(2)
        .all(|w| !w[0].is_prefix_of(w[1]) || w[0] == w[1])
}

// ---------------------------------------------------------------------------
// Search internals
// ---------------------------------------------------------------------------

struct NodeBudget<'a> {
    counter: &'a AtomicU64,
    cap: u64,
}

impl NodeBudget<'_> {
    fn charge(&self, n: u64) -> Result<()> {
        let prev = self.counter.fetch_add(n, Ordering::Relaxed);
        if prev + n > self.cap {
            Err(Error::ResourceLimit { cap: self.cap })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone)]
struct Accum {
    entries: BTreeMap<BitString, u32>,
    hist: BTreeMap<u32, u64>,
    programs: Option<Vec<BitString>>,
}

impl Accum {
    fn new(keep_programs: bool) -> Self {
        Accum {
            entries: BTreeMap::new(),
            hist: BTreeMap::new(),
            programs: keep_programs.then(Vec::new),
        }
    }

    fn record_halt(&mut self, run: &EnumRun, max_output_len: u32) {
        let len = u32::from(run.program_len());
        *self.hist.entry(len).or_insert(0) += 1;
        if run.output_len() <= max_output_len {
            let output = run
                .output_bits()
                .expect("outputs within the cap fit the recorder");
            self.entries
                .entry(output)
                .and_modify(|k| *k = (*k).min(len))
                .or_insert(len);
        }
        if let Some(programs) = &mut self.programs {
            programs.push(run.program_bits());
        }
    }

    fn merge(&mut self, other: Accum) {
        for (output, k) in other.entries {
            self.entries
                .entry(output)
                .and_modify(|cur| *cur = (*cur).min(k))
                .or_insert(k);
        }
        for (len, count) in other.hist {
            *self.hist.entry(len).or_insert(0) += count;
        }
        if let (Some(mine), Some(theirs)) = (&mut self.programs, other.programs) {
            mine.extend(theirs);
        }
    }
}

/// Advance `run`; on a bit demand fork onto `sink`, otherwise record.
fn step_and_fork(
    run: &mut EnumRun,
    spec: &MachineSpec,
    tape: &[bool],
    cfg: &EnumerationConfig,
    budget: &NodeBudget<'_>,
    accum: &mut Accum,
    mut sink: impl FnMut(EnumRun),
) -> Result<()> {
    match run.advance(spec, tape, cfg.step_budget) {
        RunOutcome::NeedBit => {
            if u32::from(run.program_len()) >= cfg.max_program_len {
                return Ok(()); // the bound L prunes this branch
            }
            budget.charge(2)?;
            let mut zero = *run;
            zero.push_program_bit(false);
            run.push_program_bit(true);
            sink(zero);
            sink(*run);
        }
        RunOutcome::Halted => accum.record_halt(run, cfg.max_output_len),
        RunOutcome::Invalid | RunOutcome::OutOfBudget => {}
    }
    Ok(())
}

fn dfs(
    seed: EnumRun,
    spec: &MachineSpec,
    tape: &[bool],
    cfg: &EnumerationConfig,
    budget: &NodeBudget<'_>,
    accum: &mut Accum,
) -> Result<()> {
    let mut stack = vec![seed];
    while let Some(mut run) = stack.pop() {
        step_and_fork(&mut run, spec, tape, cfg, budget, accum, |child| {
            stack.push(child)
        })?;
    }
    Ok(())
}

/// Breadth-first expansion until the frontier is wide enough to split
/// across workers; terminal runs met on the way are recorded in `accum`.
fn bfs_expand(
    spec: &MachineSpec,
    tape: &[bool],
    cfg: &EnumerationConfig,
    target: usize,
    budget: &NodeBudget<'_>,
    accum: &mut Accum,
) -> Result<Vec<EnumRun>> {
    let mut frontier: VecDeque<EnumRun> = VecDeque::from([EnumRun::new()]);
    while frontier.len() < target {
        let Some(mut run) = frontier.pop_front() else {
            break;
        };
        step_and_fork(&mut run, spec, tape, cfg, budget, accum, |child| {
            frontier.push_back(child)
        })?;
    }
    Ok(frontier.into())
}

fn explore_condition(
    spec: &MachineSpec,
    condition: &BitString,
    cfg: &EnumerationConfig,
    keep_programs: bool,
    budget: &NodeBudget<'_>,
    pool: Option<&rayon::ThreadPool>,
) -> Result<(ConditionSlice, Option<Vec<BitString>>)> {
    let tape: Vec<bool> = encode_condition(condition).iter().collect();
    let mut accum = Accum::new(keep_programs);

    match pool {
        None => dfs(EnumRun::new(), spec, &tape, cfg, budget, &mut accum)?,
        Some(pool) => {
            let target = pool.current_num_threads().max(1) * 32;
            let frontier = bfs_expand(spec, &tape, cfg, target, budget, &mut accum)?;
            let partials: Vec<Accum> = pool.install(|| {
                frontier
                    .into_par_iter()
                    .map(|seed| {
                        let mut part = Accum::new(keep_programs);
                        dfs(seed, spec, &tape, cfg, budget, &mut part)?;
                        Ok(part)
                    })
                    .collect::<Result<Vec<Accum>>>()
            })?;
            for part in partials {
                accum.merge(part);
            }
        }
    }

    let programs = accum.programs.map(|mut p| {
        p.sort();
        p
    });
    Ok((
        ConditionSlice {
            condition: condition.clone(),
            entries: accum.entries,
            length_hist: accum.hist,
        },
        programs,
    ))
}

fn make_pool(workers: usize) -> Result<Option<rayon::ThreadPool>> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| Error::InvalidInput(format!("cannot build worker pool: {e}")))
}

/// Enumerate all halting programs for one condition.
pub fn enumerate(
    spec: &MachineSpec,
    condition: &BitString,
    cfg: &EnumerationConfig,
) -> Result<ConditionSlice> {
    cfg.validate()?;
    let counter = AtomicU64::new(0);
    let budget = NodeBudget {
        counter: &counter,
        cap: cfg.node_cap,
    };
    let pool = make_pool(cfg.workers)?;
    let (slice, _) = explore_condition(spec, condition, cfg, false, &budget, pool.as_ref())?;
    Ok(slice)
}

/// Like [`enumerate`], additionally returning the full halting-program
/// set (sorted shortlex) for prefix-property inspection.
pub fn enumerate_with_programs(
    spec: &MachineSpec,
    condition: &BitString,
    cfg: &EnumerationConfig,
) -> Result<(ConditionSlice, Vec<BitString>)> {
    cfg.validate()?;
    let counter = AtomicU64::new(0);
    let budget = NodeBudget {
        counter: &counter,
        cap: cfg.node_cap,
    };
    let pool = make_pool(cfg.workers)?;
    let (slice, programs) = explore_condition(spec, condition, cfg, true, &budget, pool.as_ref())?;
    Ok((slice, programs.expect("programs were requested")))
}

/// Enumerate every condition into one table. The node cap applies per
/// condition, matching [`enumerate`]. Results are identical for every
/// worker count.
pub fn build_table(
    spec: &MachineSpec,
    conditions: &[BitString],
    cfg: &EnumerationConfig,
) -> Result<ComplexityTable> {
    cfg.validate()?;
    let pool = make_pool(cfg.workers)?;
    let mut table = ComplexityTable::new(spec.id(), cfg.max_program_len, cfg.step_budget);
    for condition in conditions {
        if table.slices.contains_key(condition) {
            continue;
        }
        let counter = AtomicU64::new(0);
        let budget = NodeBudget {
            counter: &counter,
            cap: cfg.node_cap,
        };
        let (slice, _) = explore_condition(spec, condition, cfg, false, &budget, pool.as_ref())?;
        table.insert_slice(slice);
    }
    Ok(table)
}

// ---------------------------------------------------------------------------
// Persistence: bit-exact CSV cache files
// ---------------------------------------------------------------------------

const TABLE_FORMAT: &str = "#FORMAT complexity-table v1";

impl ComplexityTable {
    /// Serialize to the cache format: `#` metadata lines, entry rows,
    /// then a `#HIST` section. Identical tables produce byte-identical
    /// files.
    pub fn to_cache_string(&self, config_note: Option<&str>) -> String {
        let mut out = String::new();
        out.push_str(TABLE_FORMAT);
        out.push('\n');
        let _ = writeln!(out, "#MACHINE {}", self.machine);
        let _ = writeln!(out, "#L {}", self.max_program_len);
        let _ = writeln!(out, "#T {}", self.step_budget);
        if let Some(note) = config_note {
            let _ = writeln!(out, "#CONFIG {note}");
        }
        let conditions: Vec<String> = self.slices.keys().map(BitString::to_text).collect();
        let _ = writeln!(out, "#CONDITIONS {}", conditions.join(","));
        out.push_str("#ENTRIES condition,output,k\n");
        for (condition, slice) in &self.slices {
            for (output, k) in &slice.entries {
                let _ = writeln!(out, "{},{},{}", condition.to_text(), output.to_text(), k);
            }
        }
        out.push_str("#HIST condition,length,count\n");
        for (condition, slice) in &self.slices {
            for (len, count) in &slice.length_hist {
                let _ = writeln!(out, "{},{},{}", condition.to_text(), len, count);
            }
        }
        out.push_str("#END\n");
        out
    }

    pub fn save(&self, path: &Path, config_note: Option<&str>) -> Result<()> {
        std::fs::write(path, self.to_cache_string(config_note))?;
        Ok(())
    }

    pub fn from_cache_string(text: &str, path: &Path) -> Result<Self> {
        let malformed = |detail: &str| Error::MalformedFile {
            path: path.to_path_buf(),
            detail: detail.to_string(),
        };
        let mut lines = text.lines();
        if lines.next() != Some(TABLE_FORMAT) {
            return Err(malformed("missing or unsupported format line"));
        }

        let mut machine: Option<MachineId> = None;
        let mut l: Option<u32> = None;
        let mut t: Option<u64> = None;
        let mut conditions: Option<Vec<BitString>> = None;
        let mut section = Section::Header;
        let mut slices: BTreeMap<BitString, ConditionSlice> = BTreeMap::new();
        let mut saw_end = false;

        #[derive(PartialEq)]
        enum Section {
            Header,
            Entries,
            Hist,
        }

        for line in lines {
            if saw_end {
                return Err(malformed("content after #END"));
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(id) = rest.strip_prefix("MACHINE ") {
                    machine = Some(id.parse()?);
                } else if let Some(v) = rest.strip_prefix("L ") {
                    l = Some(v.parse().map_err(|_| malformed("bad #L value"))?);
                } else if let Some(v) = rest.strip_prefix("T ") {
                    t = Some(v.parse().map_err(|_| malformed("bad #T value"))?);
                } else if let Some(v) = rest.strip_prefix("CONDITIONS") {
                    let v = v.trim();
                    let mut list = Vec::new();
                    if !v.is_empty() {
                        for item in v.split(',') {
                            list.push(BitString::parse_text(item).map_err(|_| {
                                malformed(&format!("bad condition {item:?} in #CONDITIONS"))
                            })?);
                        }
                    }
                    conditions = Some(list);
                } else if rest.starts_with("ENTRIES") {
                    let list = conditions
                        .as_ref()
                        .ok_or_else(|| malformed("#ENTRIES before #CONDITIONS"))?;
                    for condition in list {
                        slices.insert(
                            condition.clone(),
                            ConditionSlice {
                                condition: condition.clone(),
                                entries: BTreeMap::new(),
                                length_hist: BTreeMap::new(),
                            },
                        );
                    }
                    section = Section::Entries;
                } else if rest.starts_with("HIST") {
                    if section != Section::Entries {
                        return Err(malformed("#HIST before #ENTRIES"));
                    }
                    section = Section::Hist;
                } else if rest.starts_with("END") {
                    if section != Section::Hist {
                        return Err(malformed("#END before #HIST"));
                    }
                    saw_end = true;
                }
                // other # lines (e.g. #CONFIG) are informational
                continue;
            }

            let fields: Vec<&str> = line.split(',').collect();
            match section {
                Section::Header => return Err(malformed("data row before #ENTRIES")),
                Section::Entries => {
                    if fields.len() != 3 {
                        return Err(malformed("entry row must have 3 fields"));
                    }
                    let condition = BitString::parse_text(fields[0])
                        .map_err(|_| malformed("bad condition in entry row"))?;
                    let output = BitString::parse_text(fields[1])
                        .map_err(|_| malformed("bad output in entry row"))?;
                    let k: u32 = fields[2].parse().map_err(|_| malformed("bad k in entry row"))?;
                    if let Some(max) = l {
                        if k > max {
                            return Err(malformed("entry k exceeds L"));
                        }
                    }
                    let slice = slices
                        .get_mut(&condition)
                        .ok_or_else(|| malformed("entry row for unlisted condition"))?;
                    if slice.entries.insert(output, k).is_some() {
                        return Err(malformed("duplicate entry row"));
                    }
                }
                Section::Hist => {
                    if fields.len() != 3 {
                        return Err(malformed("hist row must have 3 fields"));
                    }
                    let condition = BitString::parse_text(fields[0])
                        .map_err(|_| malformed("bad condition in hist row"))?;
                    let len: u32 = fields[1].parse().map_err(|_| malformed("bad length in hist row"))?;
                    let count: u64 =
                        fields[2].parse().map_err(|_| malformed("bad count in hist row"))?;
                    let slice = slices
                        .get_mut(&condition)
                        .ok_or_else(|| malformed("hist row for unlisted condition"))?;
                    if slice.length_hist.insert(len, count).is_some() {
                        return Err(malformed("duplicate hist row"));
                    }
                }
            }
        }

        if !saw_end {
            return Err(malformed("truncated file: missing #END"));
        }
        Ok(ComplexityTable {
            machine: machine.ok_or_else(|| malformed("missing #MACHINE"))?,
            max_program_len: l.ok_or_else(|| malformed("missing #L"))?,
            step_budget: t.ok_or_else(|| malformed("missing #T"))?,
            slices,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_cache_string(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{execute, ExecStatus};
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        BitString::from_bits_str(s).unwrap()
    }

    fn eps() -> BitString {
        BitString::new()
    }

    /// Independent oracle: test every program of length 1..=L directly
    /// on the reference interpreter. A string is a valid program exactly
    /// when the run halts having consumed all of it.
    fn brute_force(
        spec: &MachineSpec,
        condition: &BitString,
        l: u32,
        t: u64,
        max_out: u32,
    ) -> (BTreeMap<BitString, u32>, BTreeMap<u32, u64>, Vec<BitString>) {
        let mut entries = BTreeMap::new();
        let mut hist = BTreeMap::new();
        let mut programs = Vec::new();
        for len in 1..=l {
            for v in 0u64..(1 << len) {
                let mut p = BitString::new();
                for k in 0..len {
                    p.push(v & (1 << k) != 0);
                }
                let out = execute(spec, &p, condition, t);
                if out.status == ExecStatus::Halted && out.consumed_program == p {
                    *hist.entry(len).or_insert(0u64) += 1;
                    programs.push(p.clone());
                    if out.output.len() as u32 <= max_out {
                        entries
                            .entry(out.output)
                            .and_modify(|cur: &mut u32| *cur = (*cur).min(len))
                            .or_insert(len);
                    }
                }
            }
        }
        programs.sort();
        (entries, hist, programs)
    }

    fn cfg(l: u32, t: u64) -> EnumerationConfig {
        EnumerationConfig {
            max_program_len: l,
            step_budget: t,
            max_output_len: 8,
            node_cap: 100_000_000,
            workers: 1,
        }
    }

    #[test]
    fn matches_brute_force_oracle() {
        let spec = MachineSpec::upm1();
        for condition in [eps(), bs("1"), bs("01")] {
            let (entries, hist, programs) = brute_force(&spec, &condition, 12, 128, 8);
            let (slice, enum_programs) =
                enumerate_with_programs(&spec, &condition, &cfg(12, 128)).unwrap();
            assert_eq!(slice.entries(), &entries, "entries for {condition}");
            assert_eq!(slice.length_hist(), &hist, "hist for {condition}");
            assert_eq!(enum_programs, programs, "programs for {condition}");
        }
    }

    #[test]
    fn matches_brute_force_oracle_upm2() {
        let spec = MachineSpec::upm2();
        let (entries, hist, programs) = brute_force(&spec, &eps(), 12, 128, 8);
        let (slice, enum_programs) = enumerate_with_programs(&spec, &eps(), &cfg(12, 128)).unwrap();
        assert_eq!(slice.entries(), &entries);
        assert_eq!(slice.length_hist(), &hist);
        assert_eq!(enum_programs, programs);
    }

    #[test]
    fn six_bit_table_is_exact() {
        // Frozen from the brute-force oracle: the only outputs reachable
        // within 6 program bits are the empty string (HALT, 3 bits) and
        // the two single-bit strings (OUT then HALT, 6 bits).
        let slice = enumerate(&MachineSpec::upm1(), &eps(), &cfg(6, 100)).unwrap();
        let expected: BTreeMap<BitString, u32> =
            [(eps(), 3), (bs("0"), 6), (bs("1"), 6)].into_iter().collect();
        assert_eq!(slice.entries(), &expected);
    }

    #[test]
    fn three_bit_table_only_halt() {
        let slice = enumerate(&MachineSpec::upm1(), &eps(), &cfg(3, 100)).unwrap();
        let expected: BTreeMap<BitString, u32> = [(eps(), 3)].into_iter().collect();
        assert_eq!(slice.entries(), &expected);
        let hist: BTreeMap<u32, u64> = [(3, 1)].into_iter().collect();
        assert_eq!(slice.length_hist(), &hist);
    }

    #[test]
    fn two_bit_table_is_empty() {
        for id in [MachineId::Upm1, MachineId::Upm2] {
            let slice = enumerate(&MachineSpec::new(id), &bs("01"), &cfg(2, 100)).unwrap();
            assert!(slice.entries().is_empty());
            assert!(slice.length_hist().is_empty());
        }
    }

    #[test]
    fn kraft_examples() {
        let spec = MachineSpec::upm1();
        let table = build_table(&spec, &[eps()], &cfg(3, 100)).unwrap();
        assert_eq!(table.kraft_sum(&eps()).unwrap(), 0.125);

        let empty = build_table(&spec, &[eps()], &cfg(2, 100)).unwrap();
        assert_eq!(empty.kraft_sum(&eps()).unwrap(), 0.0);

        let full = build_table(&spec, &[eps()], &cfg(14, 256)).unwrap();
        let kraft = full.kraft_sum(&eps()).unwrap();
        assert!(kraft <= 1.0, "kraft {kraft} exceeds 1");
        assert!(kraft > 0.125);
    }

    #[test]
    fn lookup_examples() {
        let spec = MachineSpec::upm1();
        let table = build_table(&spec, &[eps(), bs("1")], &cfg(6, 100)).unwrap();
        assert_eq!(table.k_plain(&eps()).unwrap(), Some(3));
        assert_eq!(table.k_plain(&bs("0")).unwrap(), Some(6));
        // The READ-free program OUT1;HALT works under every condition.
        let k = table.k_cond(&bs("1"), &bs("1")).unwrap();
        assert!(k.is_some() && k.unwrap() <= 6);
        // Absent entry is the one-sided bound K > L.
        let small = build_table(&spec, &[eps()], &cfg(3, 100)).unwrap();
        assert_eq!(small.k_plain(&bs("0")).unwrap(), None);
        // Unknown condition is an error, not an absence.
        assert!(matches!(
            table.k_cond(&bs("1"), &bs("0000")),
            Err(Error::ConditionNotEnumerated(_))
        ));
    }

    #[test]
    fn counting_check_examples() {
        let table = build_table(&MachineSpec::upm1(), &[eps()], &cfg(12, 256)).unwrap();
        let c1 = table.counting_check(1).unwrap();
        assert_eq!((c1.count, c1.pass), (0, true));
        let c4 = table.counting_check(4).unwrap();
        assert_eq!(c4.count, 1); // only the empty output has K = 3 < 4
        assert!(c4.pass);
        let c8 = table.counting_check(8).unwrap();
        assert!(c8.pass);
    }

    #[test]
    fn prefix_free_detection() {
        assert!(is_prefix_free(&[bs("00"), bs("01"), bs("1")]));
        assert!(!is_prefix_free(&[bs("0"), bs("01")]));
        assert!(is_prefix_free(&[]));
        assert!(is_prefix_free(&[eps()]));
        assert!(!is_prefix_free(&[eps(), bs("0")]));
    }

    #[test]
    fn enumerated_programs_are_prefix_free() {
        let spec = MachineSpec::upm1();
        for condition in [eps(), bs("101")] {
            let (_, programs) = enumerate_with_programs(&spec, &condition, &cfg(13, 256)).unwrap();
            assert!(!programs.is_empty());
            assert!(is_prefix_free(&programs));
        }
    }

    #[test]
    fn node_cap_is_a_hard_error() {
        let mut config = cfg(14, 256);
        config.node_cap = 10;
        let err = enumerate(&MachineSpec::upm1(), &eps(), &config).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { cap: 10 }));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let spec = MachineSpec::upm1();
        let conditions = [eps(), bs("0"), bs("1"), bs("10")];
        let base = build_table(&spec, &conditions, &cfg(13, 256)).unwrap();
        for workers in [2usize, 5] {
            let mut config = cfg(13, 256);
            config.workers = workers;
            let other = build_table(&spec, &conditions, &config).unwrap();
            assert_eq!(base, other, "workers={workers}");
        }
    }

    #[test]
    fn upper_semicomputability_small() {
        // (L, T) vs (L+1, 2T): shared keys agree or decrease.
        let spec = MachineSpec::upm1();
        for condition in [eps(), bs("11")] {
            let small = enumerate(&spec, &condition, &cfg(11, 64)).unwrap();
            let large = enumerate(&spec, &condition, &cfg(12, 128)).unwrap();
            for (output, &k) in small.entries() {
                let better = large.entries().get(output).copied();
                assert!(better.is_some_and(|b| b <= k), "{output} regressed");
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let spec = MachineSpec::upm1();
        let conditions = [eps(), bs("0"), bs("01")];
        let table = build_table(&spec, &conditions, &cfg(9, 64)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.csv");
        table.save(&path, Some("machine=UPM-1 L=9 T=64")).unwrap();
        let loaded = ComplexityTable::load(&path).unwrap();
        assert_eq!(table, loaded);
        // byte-exactness: saving the loaded table reproduces the file
        let again = dir.path().join("again.csv");
        loaded.save(&again, Some("machine=UPM-1 L=9 T=64")).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&again).unwrap()
        );
    }

    #[test]
    fn cache_round_trip_preserves_empty_slices() {
        // L = 2 has no halting programs at all; the enumerated condition
        // must survive the round trip as an empty slice.
        let table = build_table(&MachineSpec::upm1(), &[bs("01")], &cfg(2, 64)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        table.save(&path, None).unwrap();
        let loaded = ComplexityTable::load(&path).unwrap();
        assert_eq!(table, loaded);
        assert!(loaded.slice(&bs("01")).is_some());
    }

    #[test]
    fn cache_rejects_unknown_machine() {
        let table = build_table(&MachineSpec::upm1(), &[eps()], &cfg(6, 64)).unwrap();
        let text = table.to_cache_string(None).replace("UPM-1", "UPM-9");
        let err = ComplexityTable::from_cache_string(&text, Path::new("x.csv")).unwrap_err();
        assert!(matches!(err, Error::UnknownMachine(id) if id == "UPM-9"));
    }

    #[test]
    fn cache_rejects_truncation() {
        let table = build_table(&MachineSpec::upm1(), &[eps()], &cfg(6, 64)).unwrap();
        let text = table.to_cache_string(None);
        for cut in [text.len() / 3, text.len() - 6] {
            let err =
                ComplexityTable::from_cache_string(&text[..cut], Path::new("x.csv")).unwrap_err();
            assert!(matches!(err, Error::MalformedFile { .. }), "cut at {cut}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn enumeration_matches_oracle_on_random_conditions(
            cond_bits in proptest::collection::vec(any::<bool>(), 0..5),
            l in 6u32..11,
        ) {
            let spec = MachineSpec::upm1();
            let condition = BitString::from_bools(cond_bits);
            let (entries, hist, programs) = brute_force(&spec, &condition, l, 64, 8);
            let (slice, enum_programs) =
                enumerate_with_programs(&spec, &condition, &cfg(l, 64)).unwrap();
            prop_assert_eq!(slice.entries(), &entries);
            prop_assert_eq!(slice.length_hist(), &hist);
            prop_assert_eq!(enum_programs, programs);
        }
    }
}
