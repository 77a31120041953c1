"""Register-machine language: parser, numbering, and step-budgeted interpreter.

The language has one register ``Y`` (the output), input registers ``X1, X2,
...`` and scratch registers ``Z1, Z2, ...``, all holding naturals.  Programs
are lists of instructions, optionally labelled from the cycle ``A1, B1, C1,
E1, A2, ...`` (written ``A``, ``B``, ... when the index is 1):

    [A] X <- X + 1
        X <- X - 1
        Y <- Y
        IF X != 0 GOTO A
        GOTO E

``GOTO L`` is sugar: it increments a scratch register that appears nowhere
else in the program and jumps on it.  Everything else is primitive.  Control
falling off the end, or jumping to a label no instruction carries, halts the
machine; the value of ``Y`` is the output.

Instructions and programs number into naturals through ``codec.pair`` and
``codec.encode_list``; both directions are exposed.  A quadruple Turing
machine runner (unary input convention) rounds out the module.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .codec import decode_list, encode_list, pair, unpair

__all__ = [
    "Var",
    "Label",
    "Instruction",
    "Program",
    "Halted",
    "OutOfBudget",
    "ProgramSyntaxError",
    "parse_program",
    "godel_instruction",
    "instruction_from_number",
    "godel_program",
    "program_from_number",
    "run",
    "stp",
    "TuringMachine",
    "tm_run",
]

LABEL_LETTERS = "ABCE"

NOOP, INC, DEC, IFGOTO = "noop", "inc", "dec", "ifgoto"


@dataclass(frozen=True)
class Var:
    kind: str  # "Y", "X" or "Z"
    index: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("Y", "X", "Z"):
            raise ValueError(f"unknown register kind {self.kind!r}")
        if self.index < 1 or (self.kind == "Y" and self.index != 1):
            raise ValueError(f"bad register index {self.index}")

    @property
    def number(self) -> int:
        # Y, X1, Z1, X2, Z2, ... numbered from 1
        if self.kind == "Y":
            return 1
        return 2 * self.index + (1 if self.kind == "Z" else 0)

    @classmethod
    def from_number(cls, n: int) -> "Var":
        if n < 1:
            raise ValueError("register numbers start at 1")
        if n == 1:
            return cls("Y")
        if n % 2 == 0:
            return cls("X", n // 2)
        return cls("Z", (n - 1) // 2)

    def __str__(self) -> str:
        if self.kind == "Y":
            return "Y"
        return f"{self.kind}{self.index}" if self.index > 1 else self.kind


@dataclass(frozen=True)
class Label:
    letter: str
    index: int = 1

    def __post_init__(self) -> None:
        if self.letter not in LABEL_LETTERS or self.index < 1:
            raise ValueError(f"bad label {self.letter}{self.index}")

    @property
    def number(self) -> int:
        # A1, B1, C1, E1, A2, ... numbered from 1
        return 4 * (self.index - 1) + LABEL_LETTERS.index(self.letter) + 1

    @classmethod
    def from_number(cls, n: int) -> "Label":
        if n < 1:
            raise ValueError("label numbers start at 1")
        q, r = divmod(n - 1, 4)
        return cls(LABEL_LETTERS[r], q + 1)

    def __str__(self) -> str:
        return f"{self.letter}{self.index}" if self.index > 1 else self.letter


@dataclass(frozen=True)
class Instruction:
    op: str
    var: Var
    label: Optional[Label] = None
    target: Optional[Label] = None

    def __post_init__(self) -> None:
        if self.op not in (NOOP, INC, DEC, IFGOTO):
            raise ValueError(f"unknown op {self.op!r}")
        if (self.op == IFGOTO) != (self.target is not None):
            raise ValueError("exactly the conditional jumps carry a target")

    def __str__(self) -> str:
        prefix = f"[{self.label}] " if self.label else ""
        v = self.var
        if self.op == NOOP:
            return f"{prefix}{v} <- {v}"
        if self.op == INC:
            return f"{prefix}{v} <- {v} + 1"
        if self.op == DEC:
            return f"{prefix}{v} <- {v} - 1"
        return f"{prefix}IF {v} != 0 GOTO {self.target}"


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        if self.instructions and godel_instruction(self.instructions[-1]) == 0:
            raise ValueError(
                "programs must not end with an unlabelled no-op on Y "
                "(its number is 0 and would vanish from the list encoding)"
            )

    def __len__(self) -> int:
        return len(self.instructions)

    def __str__(self) -> str:
        return "\n".join(str(i) for i in self.instructions)


@dataclass(frozen=True)
class Halted:
    output: int
    steps: int


@dataclass(frozen=True)
class OutOfBudget:
    steps: int


Outcome = Halted | OutOfBudget


# ---------------------------------------------------------------------------
# Numbering
# ---------------------------------------------------------------------------

_BODY_CODE = {NOOP: 0, INC: 1, DEC: 2}


def godel_instruction(instr: Instruction) -> int:
    """Number an instruction as pair(a, pair(b, c))."""
    a = instr.label.number if instr.label else 0
    if instr.op == IFGOTO:
        b = instr.target.number + 2
    else:
        b = _BODY_CODE[instr.op]
    c = instr.var.number - 1
    return pair(a, pair(b, c))


def instruction_from_number(n: int) -> Instruction:
    """Invert :func:`godel_instruction`; every natural decodes."""
    a, rest = unpair(n)
    b, c = unpair(rest)
    label = Label.from_number(a) if a else None
    var = Var.from_number(c + 1)
    if b <= 2:
        op = (NOOP, INC, DEC)[b]
        return Instruction(op, var, label)
    return Instruction(IFGOTO, var, label, Label.from_number(b - 2))


def godel_program(p: Program) -> int:
    return encode_list([godel_instruction(i) for i in p.instructions])


def program_from_number(n: int) -> Program:
    return Program(tuple(instruction_from_number(k) for k in decode_list(n)))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class ProgramSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_LABEL_RE = re.compile(r"\[\s*([ABCE])([0-9]*)\s*\]")
_VAR_RE = re.compile(r"(Y|[XZ])([0-9]*)")
_TARGET_RE = re.compile(r"([ABCE])([0-9]*)")


class _LineParser:
    """Hand-rolled scanner so errors can point at a line and column."""

    def __init__(self, text: str, lineno: int) -> None:
        self.text = text
        self.lineno = lineno
        self.pos = 0

    def fail(self, message: str) -> "ProgramSyntaxError":
        return ProgramSyntaxError(message, self.lineno, self.pos + 1)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def eat(self, literal: str, what: str) -> None:
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            raise self.fail(f"expected {what}")
        self.pos += len(literal)

    def take(self, regex: re.Pattern, what: str) -> re.Match:
        self.skip_ws()
        m = regex.match(self.text, self.pos)
        if not m:
            raise self.fail(f"expected {what}")
        self.pos = m.end()
        return m

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def var(self) -> Var:
        m = self.take(_VAR_RE, "a register (Y, Xk or Zk)")
        kind, digits = m.group(1), m.group(2)
        if kind == "Y" and digits:
            raise self.fail("Y takes no index")
        index = int(digits) if digits else 1
        if index < 1:
            raise self.fail("register indices start at 1")
        return Var(kind, index)

    def label(self, regex: re.Pattern, what: str) -> Label:
        m = self.take(regex, what)
        letter, digits = m.group(1), m.group(2)
        index = int(digits) if digits else 1
        if index < 1:
            raise self.fail("label indices start at 1")
        return Label(letter, index)


# Parsed surface statements; Goto is sugar resolved after the scan.
@dataclass(frozen=True)
class _Goto:
    label: Optional[Label]
    target: Label


def _parse_line(parser: _LineParser, label: Optional[Label]):
    text = parser.text
    parser.skip_ws()
    if text.startswith("IF", parser.pos):
        parser.pos += 2
        var = parser.var()
        parser.skip_ws()
        if text.startswith("!=", parser.pos):
            parser.pos += 2
        elif text.startswith("≠", parser.pos):
            parser.pos += 1
        else:
            raise parser.fail("expected !=")
        parser.eat("0", "0")
        parser.eat("GOTO", "GOTO")
        target = parser.label(_TARGET_RE, "a label")
        return Instruction(IFGOTO, var, label, target)
    if text.startswith("GOTO", parser.pos):
        parser.pos += 4
        return _Goto(label, parser.label(_TARGET_RE, "a label"))

    var = parser.var()
    parser.skip_ws()
    if text.startswith("<-", parser.pos):
        parser.pos += 2
    elif text.startswith("←", parser.pos):
        parser.pos += 1
    else:
        raise parser.fail("expected <-")
    rhs = parser.var()
    if rhs != var:
        raise parser.fail("assignment source must equal its target register")
    parser.skip_ws()
    if parser.at_end():
        return Instruction(NOOP, var, label)
    if text.startswith("+", parser.pos):
        parser.pos += 1
        parser.eat("1", "1")
        return Instruction(INC, var, label)
    if text.startswith("-", parser.pos):
        parser.pos += 1
        parser.eat("1", "1")
        return Instruction(DEC, var, label)
    raise parser.fail("expected + 1, - 1 or end of line")


def parse_program(text: str) -> Program:
    """Parse program text (one instruction per line) and expand GOTO sugar.

    Blank lines and ``#`` comments are ignored.  The sugar's scratch register
    is the lowest-indexed Z that appears nowhere in the surface text, shared
    by every GOTO in the program.
    """
    statements = []
    used_z: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        parser = _LineParser(line, lineno)
        label = None
        parser.skip_ws()
        if line.startswith("[", parser.pos):
            label = parser.label(_LABEL_RE, "a label in brackets")
        stmt = _parse_line(parser, label)
        if not parser.at_end():
            raise parser.fail("trailing characters after instruction")
        if isinstance(stmt, Instruction) and stmt.var.kind == "Z":
            used_z.add(stmt.var.index)
        statements.append(stmt)

    fresh = 1
    while fresh in used_z:
        fresh += 1
    scratch = Var("Z", fresh)

    instructions: list[Instruction] = []
    for stmt in statements:
        if isinstance(stmt, _Goto):
            instructions.append(Instruction(INC, scratch, stmt.label))
            instructions.append(Instruction(IFGOTO, scratch, None, stmt.target))
        else:
            instructions.append(stmt)
    return Program(tuple(instructions))


# ---------------------------------------------------------------------------
# Interpreter
# ---------------------------------------------------------------------------

def run(p: Program, inputs: Sequence[int] = (), budget: int = 10**6) -> Outcome:
    """Execute ``p`` with X1..Xn holding ``inputs``; all other registers 0.

    One step is one executed instruction.  Halting at exactly ``budget``
    steps still counts as halting.
    """
    instrs = p.instructions
    size = len(instrs)

    # Dense register file: slot per distinct register, Y in slot 0.
    slots: dict[Var, int] = {Var("Y"): 0}
    for instr in instrs:
        slots.setdefault(instr.var, len(slots))
    for i in range(len(inputs)):
        slots.setdefault(Var("X", i + 1), len(slots))
    regs = [0] * len(slots)
    for i, value in enumerate(inputs):
        if value < 0:
            raise ValueError("inputs must be naturals")
        regs[slots[Var("X", i + 1)]] = value

    # Jump table: label -> first instruction carrying it; jumps to missing
    # labels are compiled as jumps past the end, i.e. halts.
    first_at: dict[int, int] = {}
    for idx, instr in enumerate(instrs):
        if instr.label is not None:
            first_at.setdefault(instr.label.number, idx)

    compiled = []
    for instr in instrs:
        slot = slots[instr.var]
        if instr.op == IFGOTO:
            compiled.append((IFGOTO, slot, first_at.get(instr.target.number, size)))
        else:
            compiled.append((instr.op, slot, 0))

    pc = 0
    steps = 0
    while True:
        if pc >= size:
            return Halted(regs[0], steps)
        if steps >= budget:
            return OutOfBudget(steps)
        op, slot, target = compiled[pc]
        steps += 1
        if op == IFGOTO:
            pc = target if regs[slot] != 0 else pc + 1
        else:
            if op == INC:
                regs[slot] += 1
            elif op == DEC and regs[slot] > 0:
                regs[slot] -= 1
            pc += 1


def stp(inputs: Sequence[int], program_number: int, t: int) -> bool:
    """Does program number ``program_number`` halt on ``inputs`` within t steps?"""
    outcome = run(program_from_number(program_number), inputs, t)
    return isinstance(outcome, Halted)


# ---------------------------------------------------------------------------
# Quadruple Turing machines
# ---------------------------------------------------------------------------

LEFT, RIGHT, PRINT_ONE, ERASE = "L", "R", "1", "0"


@dataclass(frozen=True)
class TuringMachine:
    """Deterministic quadruple machine over tape alphabet {0, 1}.

    Quadruples are (state, symbol, action, next_state) with integer states
    (0 = start) and actions 'L', 'R', '1' (print 1) or '0' (erase).
    """

    quadruples: tuple[tuple[int, int, str, int], ...]

    def __post_init__(self) -> None:
        seen = set()
        for state, symbol, action, _next in self.quadruples:
            if symbol not in (0, 1) or action not in (LEFT, RIGHT, PRINT_ONE, ERASE):
                raise ValueError(f"bad quadruple ({state},{symbol},{action},{_next})")
            if (state, symbol) in seen:
                raise ValueError(f"two quadruples for state {state} reading {symbol}")
            seen.add((state, symbol))


def tm_run(m: TuringMachine, input_n: int, budget: int) -> Outcome:
    """Run on n+1 ones with the head at the leftmost one; output = ones left."""
    table = {(q, s): (a, n) for q, s, a, n in m.quadruples}
    ones = set(range(input_n + 1))
    head = 0
    state = 0
    steps = 0
    while True:
        symbol = 1 if head in ones else 0
        move = table.get((state, symbol))
        if move is None:
            return Halted(len(ones), steps)
        if steps >= budget:
            return OutOfBudget(steps)
        steps += 1
        action, state = move
        if action == LEFT:
            head -= 1
        elif action == RIGHT:
            head += 1
        elif action == PRINT_ONE:
            ones.add(head)
        else:
            ones.discard(head)
