//! The fixed reference universal prefix machine.
//!
//! Two unbounded counters `A` and `B`, an input tape holding the encoded
//! condition, an append-only output, and a program stream consumed left
//! to right strictly on demand: a bit is read only when the instruction
//! pointer reaches an index that has not been decoded yet. A valid
//! program is the exact consumed bit sequence of a halting run, which
//! makes the set of valid programs prefix-free by construction.
//!
//! `UPM-1` decodes opcodes as `000 HALT, 001 OUT0, 010 OUT1, 011 READ,
//! 100 INC, 101 DEC, 110 JNZ, 111 SWP`, with an Elias gamma operand
//! after `JNZ`. `UPM-2` uses the reversed opcode table (`000 SWP` ...
//! `111 HALT`) and Elias delta operands, so the two machines assign
//! genuinely different lengths to loop-bearing programs.

use std::fmt;
use std::str::FromStr;

use crate::bits::{gamma_encode, BitString};
use crate::error::{Error, Result};

/// Identifier of one of the two frozen reference machines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MachineId {
    Upm1,
    Upm2,
}

impl MachineId {
    pub fn as_str(&self) -> &'static str {
        match self {
            MachineId::Upm1 => "UPM-1",
            MachineId::Upm2 => "UPM-2",
        }
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MachineId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "UPM-1" => Ok(MachineId::Upm1),
            "UPM-2" => Ok(MachineId::Upm2),
            other => Err(Error::UnknownMachine(other.to_string())),
        }
    }
}

/// The eight instructions of the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Opcode {
    /// Stop; the run is a halting run.
    Halt,
    /// Append 0 to the output.
    Out0,
    /// Append 1 to the output.
    Out1,
    /// Read the next input-tape bit v and set A := 2A + v; runtime
    /// failure if the tape is exhausted.
    Read,
    /// A := A + 1.
    Inc,
    /// A := max(A - 1, 0).
    Dec,
    /// Self-delimiting operand d decoded once, at instruction-decode
    /// time; if A != 0 jump back d instructions (failure if the target
    /// index would be negative).
    Jnz,
    /// Swap A and B.
    Swp,
}

/// Which self-delimiting integer code follows a `JNZ` opcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperandCode {
    Gamma,
    Delta,
}

const UPM1_TABLE: [Opcode; 8] = [
    Opcode::Halt,
    Opcode::Out0,
    Opcode::Out1,
    Opcode::Read,
    Opcode::Inc,
    Opcode::Dec,
    Opcode::Jnz,
    Opcode::Swp,
];

/// A frozen reference machine: the id determines the opcode table and
/// operand code completely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    id: MachineId,
    opcode_table: [Opcode; 8],
    jump_operand_code: OperandCode,
}

impl MachineSpec {
    pub fn new(id: MachineId) -> Self {
        match id {
            MachineId::Upm1 => MachineSpec {
                id,
                opcode_table: UPM1_TABLE,
                jump_operand_code: OperandCode::Gamma,
            },
            MachineId::Upm2 => {
                let mut table = UPM1_TABLE;
                table.reverse();
                MachineSpec {
                    id,
                    opcode_table: table,
                    jump_operand_code: OperandCode::Delta,
                }
            }
        }
    }

    pub fn upm1() -> Self {
        Self::new(MachineId::Upm1)
    }

    pub fn upm2() -> Self {
        Self::new(MachineId::Upm2)
    }

    pub fn id(&self) -> MachineId {
        self.id
    }

    pub fn opcode_table(&self) -> &[Opcode; 8] {
        &self.opcode_table
    }

    pub fn jump_operand_code(&self) -> OperandCode {
        self.jump_operand_code
    }
}

/// Input-tape convention for conditional runs: the tape for condition
/// `x` holds `gamma(|x| + 1)` followed by the bits of `x`, so programs
/// can decode how many condition bits follow.
pub fn encode_condition(x: &BitString) -> BitString {
    gamma_encode(x.len() as u64 + 1).concat(x)
}

/// Terminal status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecStatus {
    /// Reached HALT within budget with no runtime failure.
    Halted,
    /// Runtime failure: tape exhausted on READ, or a taken jump past the
    /// start of the program.
    Invalid,
    /// The step budget ran out before the run terminated.
    BudgetExhausted,
    /// The run demanded a program bit beyond the supplied bits.
    NeedsProgramBit,
}

/// Result of running a program on a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionOutcome {
    pub status: ExecStatus,
    /// Output bits; meaningful only when `status` is `Halted`.
    pub output: BitString,
    /// For halting runs, exactly the bits read; no further bits would be
    /// read by this run.
    pub consumed_program: BitString,
    pub steps_used: u64,
}

#[derive(Debug, Clone, Copy)]
struct Instr {
    op: Opcode,
    /// Jump distance for JNZ; saturated at `u64::MAX` if the encoded
    /// operand overflows, which can only make a taken jump invalid.
    arg: u64,
}

/// Decode one self-delimiting integer from `fetch(pos)`, `fetch(pos+1)`,
/// ... Returns the value (saturating) and bits consumed, or `None` if
/// the bits run out first.
fn decode_operand<F: FnMut(usize) -> Option<bool>>(
    code: OperandCode,
    fetch: &mut F,
    pos: usize,
) -> Option<(u64, usize)> {
    let gamma = |fetch: &mut F, pos: usize| -> Option<(u64, usize)> {
        let mut zeros = 0usize;
        while !fetch(pos + zeros)? {
            zeros += 1;
        }
        let mut n: u64 = 1;
        for k in 0..zeros {
            let bit = fetch(pos + zeros + 1 + k)?;
            n = n.saturating_mul(2).saturating_add(u64::from(bit));
        }
        Some((n, 2 * zeros + 1))
    };
    match code {
        OperandCode::Gamma => gamma(fetch, pos),
        OperandCode::Delta => {
            let (width, used) = gamma(fetch, pos)?;
            let mut n: u64 = 1;
            let extra = usize::try_from(width.saturating_sub(1)).unwrap_or(usize::MAX);
            for k in 0..extra {
                let bit = fetch(pos + used + k)?;
                n = n.saturating_mul(2).saturating_add(u64::from(bit));
            }
            Some((n, used + extra))
        }
    }
}

/// Run `program` on `machine` under `condition` with the given step
/// budget. Deterministic; all failure modes are reported in-band through
/// the outcome's status.
///
/// Counters saturate at `u64::MAX`, which is observationally equivalent
/// to unbounded counters for any budget below 2^63: a counter that large
/// cannot be drained back to zero within the remaining steps, and only
/// zero-ness is ever branched on.
pub fn execute(
    machine: &MachineSpec,
    program: &BitString,
    condition: &BitString,
    step_budget: u64,
) -> ExecutionOutcome {
    let tape = encode_condition(condition);
    let mut tape_pos = 0usize;
    let mut a: u64 = 0;
    let mut b: u64 = 0;
    let mut instrs: Vec<Instr> = Vec::new();
    let mut ip = 0usize;
    let mut consumed = 0usize;
    let mut output = BitString::new();
    let mut steps: u64 = 0;

    let finish = |status: ExecStatus, output: BitString, consumed: usize, steps: u64| {
        ExecutionOutcome {
            status,
            output,
            consumed_program: program.prefix(consumed),
            steps_used: steps,
        }
    };

    loop {
        if ip == instrs.len() {
            // Decode the instruction at `ip` from the program stream.
            let mut code = 0usize;
            for k in 0..3 {
                match program.get(consumed + k) {
                    Some(bit) => code = (code << 1) | usize::from(bit),
                    None => return finish(ExecStatus::NeedsProgramBit, output, consumed, steps),
                }
            }
            let op = machine.opcode_table[code];
            let mut used = 3usize;
            let mut arg = 0u64;
            if op == Opcode::Jnz {
                let mut fetch = |i: usize| program.get(i);
                match decode_operand(machine.jump_operand_code, &mut fetch, consumed + 3) {
                    Some((d, n)) => {
                        arg = d;
                        used += n;
                    }
                    None => return finish(ExecStatus::NeedsProgramBit, output, consumed, steps),
                }
            }
            instrs.push(Instr { op, arg });
            consumed += used;
        }

        if steps == step_budget {
            return finish(ExecStatus::BudgetExhausted, output, consumed, steps);
        }
        steps += 1;

        let instr = instrs[ip];
        match instr.op {
            Opcode::Halt => return finish(ExecStatus::Halted, output, consumed, steps),
            Opcode::Out0 => {
                output.push(false);
                ip += 1;
            }
            Opcode::Out1 => {
                output.push(true);
                ip += 1;
            }
            Opcode::Read => match tape.get(tape_pos) {
                Some(v) => {
                    a = a.saturating_mul(2).saturating_add(u64::from(v));
                    tape_pos += 1;
                    ip += 1;
                }
                None => return finish(ExecStatus::Invalid, output, consumed, steps),
            },
            Opcode::Inc => {
                a = a.saturating_add(1);
                ip += 1;
            }
            Opcode::Dec => {
                a = a.saturating_sub(1);
                ip += 1;
            }
            Opcode::Jnz => {
                if a != 0 {
                    if instr.arg > ip as u64 {
                        return finish(ExecStatus::Invalid, output, consumed, steps);
                    }
                    ip -= instr.arg as usize;
                } else {
                    ip += 1;
                }
            }
            Opcode::Swp => {
                std::mem::swap(&mut a, &mut b);
                ip += 1;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Compact resumable run used by the enumerator
// ---------------------------------------------------------------------------

/// Largest program length the enumerator supports; keeps [`EnumRun`]
/// fixed-size and `Copy` so fork-tree nodes never touch the heap.
pub(crate) const MAX_ENUM_PROGRAM_BITS: u8 = 32;
const MAX_ENUM_INSTRS: usize = MAX_ENUM_PROGRAM_BITS as usize / 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RunOutcome {
    Halted,
    Invalid,
    OutOfBudget,
    /// The next program bit is demanded; fork on 0 and 1.
    NeedBit,
}

#[derive(Debug, Clone, Copy)]
struct EnumInstr {
    op: Opcode,
    arg: u64,
}

/// A machine state that can be suspended at a program-bit demand, copied
/// cheaply, and resumed with either bit appended. Output bits are
/// recorded exactly up to 64 bits together with the true output length,
/// which is all the enumerator needs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EnumRun {
    program: u32,
    prog_len: u8,
    consumed: u8,
    instrs: [EnumInstr; MAX_ENUM_INSTRS],
    n_instrs: u8,
    ip: u8,
    a: u64,
    b: u64,
    tape_pos: u8,
    out_bits: u64,
    out_len: u32,
    steps: u64,
}

impl EnumRun {
    pub(crate) fn new() -> Self {
        EnumRun {
            program: 0,
            prog_len: 0,
            consumed: 0,
            instrs: [EnumInstr { op: Opcode::Halt, arg: 0 }; MAX_ENUM_INSTRS],
            n_instrs: 0,
            ip: 0,
            a: 0,
            b: 0,
            tape_pos: 0,
            out_bits: 0,
            out_len: 0,
            steps: 0,
        }
    }

    pub(crate) fn push_program_bit(&mut self, bit: bool) {
        debug_assert!(self.prog_len < MAX_ENUM_PROGRAM_BITS);
        if bit {
            self.program |= 1 << self.prog_len;
        }
        self.prog_len += 1;
    }

    pub(crate) fn program_len(&self) -> u8 {
        self.prog_len
    }

    /// The consumed program as a bit string (valid after `Halted`, when
    /// every supplied bit was demanded).
    pub(crate) fn program_bits(&self) -> BitString {
        let mut out = BitString::new();
        for i in 0..self.prog_len {
            out.push(self.program & (1 << i) != 0);
        }
        out
    }

    pub(crate) fn output_len(&self) -> u32 {
        self.out_len
    }

    /// The output, exact only while `output_len() <= 64`.
    pub(crate) fn output_bits(&self) -> Option<BitString> {
        if self.out_len > 64 {
            return None;
        }
        let mut out = BitString::new();
        for i in 0..self.out_len {
            out.push(self.out_bits & (1 << i) != 0);
        }
        Some(out)
    }

    fn program_bit(&self, i: usize) -> Option<bool> {
        if i < self.prog_len as usize {
            Some(self.program & (1 << i) != 0)
        } else {
            None
        }
    }

    /// Detect loops that provably never terminate: a taken backward jump
    /// whose body consists only of OUT0/OUT1/INC cannot change control
    /// flow, cannot decrease A, and demands no program bits, so A stays
    /// nonzero and the jump is taken forever.
    fn jump_cycle_cannot_halt(&self, target: usize) -> bool {
        self.instrs[target..self.ip as usize]
            .iter()
            .all(|i| matches!(i.op, Opcode::Out0 | Opcode::Out1 | Opcode::Inc))
    }

    /// Run until the machine halts, fails, runs out of budget, or
    /// demands a program bit beyond those supplied.
    pub(crate) fn advance(&mut self, spec: &MachineSpec, tape: &[bool], budget: u64) -> RunOutcome {
        loop {
            if self.ip == self.n_instrs {
                if self.n_instrs as usize == MAX_ENUM_INSTRS {
                    // cannot decode further within the supported length
                    return RunOutcome::NeedBit;
                }
                let start = self.consumed as usize;
                let mut code = 0usize;
                for k in 0..3 {
                    match self.program_bit(start + k) {
                        Some(bit) => code = (code << 1) | usize::from(bit),
                        None => return RunOutcome::NeedBit,
                    }
                }
                let op = spec.opcode_table[code];
                let mut used = 3usize;
                let mut arg = 0u64;
                if op == Opcode::Jnz {
                    let mut fetch = |i: usize| self.program_bit(i);
                    match decode_operand(spec.jump_operand_code, &mut fetch, start + 3) {
                        Some((d, n)) => {
                            arg = d;
                            used += n;
                        }
                        None => return RunOutcome::NeedBit,
                    }
                }
                self.instrs[self.n_instrs as usize] = EnumInstr { op, arg };
                self.n_instrs += 1;
                self.consumed += used as u8;
            }

            if self.steps == budget {
                return RunOutcome::OutOfBudget;
            }
            self.steps += 1;

            let instr = self.instrs[self.ip as usize];
            match instr.op {
                Opcode::Halt => return RunOutcome::Halted,
                Opcode::Out0 => {
                    self.out_len += 1;
                    self.ip += 1;
                }
                Opcode::Out1 => {
                    if self.out_len < 64 {
                        self.out_bits |= 1 << self.out_len;
                    }
                    self.out_len += 1;
                    self.ip += 1;
                }
                Opcode::Read => match tape.get(self.tape_pos as usize) {
                    Some(&v) => {
                        self.a = self.a.saturating_mul(2).saturating_add(u64::from(v));
                        self.tape_pos += 1;
                        self.ip += 1;
                    }
                    None => return RunOutcome::Invalid,
                },
                Opcode::Inc => {
                    self.a = self.a.saturating_add(1);
                    self.ip += 1;
                }
                Opcode::Dec => {
                    self.a = self.a.saturating_sub(1);
                    self.ip += 1;
                }
                Opcode::Jnz => {
                    if self.a != 0 {
                        if instr.arg > u64::from(self.ip) {
                            return RunOutcome::Invalid;
                        }
                        let target = self.ip as usize - instr.arg as usize;
                        if self.jump_cycle_cannot_halt(target) {
                            // burn the remaining budget without stepping
                            self.steps = budget;
                            return RunOutcome::OutOfBudget;
                        }
                        self.ip = target as u8;
                    } else {
                        self.ip += 1;
                    }
                }
                Opcode::Swp => {
                    std::mem::swap(&mut self.a, &mut self.b);
                    self.ip += 1;
                }
            }
        }
    }
}
