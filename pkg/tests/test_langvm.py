import random
from pathlib import Path

import pytest

from kxchain.codec import encode_list
from kxchain.langvm import (
    Halted,
    Instruction,
    Label,
    OutOfBudget,
    Program,
    ProgramSyntaxError,
    TuringMachine,
    Var,
    godel_instruction,
    godel_program,
    instruction_from_number,
    parse_program,
    program_from_number,
    run,
    stp,
    tm_run,
)

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

ADDITION = (PROGRAMS / "add.vm").read_text()
TIGHT_LOOP = (PROGRAMS / "tight_loop.vm").read_text()


# ---------------------------------------------------------------------------
# Numbering
# ---------------------------------------------------------------------------

def test_variable_numbering():
    assert Var("Y").number == 1
    assert Var("X", 1).number == 2
    assert Var("Z", 1).number == 3
    assert Var("X", 2).number == 4
    assert Var("Z", 2).number == 5
    for n in range(1, 20):
        assert Var.from_number(n).number == n


def test_label_numbering():
    assert [Label(c).number for c in "ABCE"] == [1, 2, 3, 4]
    assert Label("A", 2).number == 5
    for n in range(1, 40):
        assert Label.from_number(n).number == n


def test_instruction_numbers_match_hand_assembly():
    inc_x = Instruction("inc", Var("X", 1), label=Label("A"))
    assert godel_instruction(inc_x) == 21
    jump = Instruction("ifgoto", Var("X", 1), target=Label("A"))
    assert godel_instruction(jump) == 46
    assert instruction_from_number(0) == Instruction("noop", Var("Y"))


def test_instruction_round_trip_small_sweep():
    for var_idx in range(1, 9):
        for label_idx in [None] + list(range(1, 9)):
            label = Label.from_number(label_idx) if label_idx else None
            for op in ("noop", "inc", "dec"):
                instr = Instruction(op, Var.from_number(var_idx), label)
                assert instruction_from_number(godel_instruction(instr)) == instr
            for target_idx in range(1, 9):
                instr = Instruction(
                    "ifgoto",
                    Var.from_number(var_idx),
                    label,
                    Label.from_number(target_idx),
                )
                assert instruction_from_number(godel_instruction(instr)) == instr


def test_two_instruction_program_number():
    program = parse_program(TIGHT_LOOP)
    assert [godel_instruction(i) for i in program.instructions] == [21, 46]
    assert godel_program(program) == 2**21 * 3**46 - 1
    assert godel_program(program) == encode_list([21, 46])


def _random_program(rng):
    # Instruction numbers become exponents in the program encoding, so keep
    # the register/label indices small to keep the numbers manageable.
    ops = ("noop", "inc", "dec", "ifgoto")
    instructions = []
    for _ in range(rng.randint(1, 6)):
        op = rng.choice(ops)
        var = Var.from_number(rng.randint(1, 5))
        label = Label.from_number(rng.randint(1, 4)) if rng.random() < 0.5 else None
        target = Label.from_number(rng.randint(1, 4)) if op == "ifgoto" else None
        instructions.append(Instruction(op, var, label, target))
    if godel_instruction(instructions[-1]) == 0:
        instructions[-1] = Instruction("inc", Var("Y"))
    return Program(tuple(instructions))


def test_program_number_round_trip():
    assert program_from_number(0) == Program(())
    rng = random.Random(5)
    for _ in range(1000):
        p = _random_program(rng)
        assert program_from_number(godel_program(p)) == p


def test_program_rejects_trailing_zero_instruction():
    with pytest.raises(ValueError):
        Program((Instruction("noop", Var("Y")),))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def test_parse_empty_text():
    assert parse_program("") == Program(())


def test_parse_rejects_add_two():
    with pytest.raises(ProgramSyntaxError) as err:
        parse_program("X <- X + 2")
    assert err.value.line == 1


def test_parse_rejects_mismatched_assignment():
    with pytest.raises(ProgramSyntaxError):
        parse_program("Y <- X1")


def test_parse_reports_position():
    with pytest.raises(ProgramSyntaxError) as err:
        parse_program("X <- X + 1\n[A] X <- X +")
    assert err.value.line == 2


def test_parse_accepts_unicode_arrows():
    assert parse_program("X ← X + 1") == parse_program("X <- X + 1")
    assert parse_program("IF X ≠ 0 GOTO A") == parse_program("IF X != 0 GOTO A")


def test_goto_sugar_uses_fresh_scratch_register():
    program = parse_program("[A] Z <- Z + 1\nGOTO A")
    assert program.instructions[1] == Instruction("inc", Var("Z", 2))
    assert program.instructions[2] == Instruction(
        "ifgoto", Var("Z", 2), target=Label("A")
    )


def test_goto_sugar_carries_the_label():
    program = parse_program("[B] GOTO A\nX <- X + 1")
    assert program.instructions[0].label == Label("B")
    assert program.instructions[0].op == "inc"


def test_addition_program_expands_goto_sugar():
    program = parse_program(ADDITION)
    assert len(program) == 11  # 8 surface lines, 3 of them GOTO sugar


def test_parse_rejects_trailing_noop_on_y():
    with pytest.raises(ValueError):
        parse_program("X <- X + 1\nY <- Y")


# ---------------------------------------------------------------------------
# Interpreter
# ---------------------------------------------------------------------------

def test_addition_program_small_cases():
    program = parse_program(ADDITION)
    for x, y in [(3, 4), (0, 0), (0, 9), (9, 0), (25, 25)]:
        outcome = run(program, (x, y), budget=10**5)
        assert outcome == Halted(x + y, outcome.steps)


def test_empty_program_halts_immediately():
    assert run(Program(()), (5, 6), budget=0) == Halted(0, 0)


def test_tight_loop_never_halts_within_budget():
    program = parse_program(TIGHT_LOOP)
    outcome = run(program, (0,), budget=10**4)
    assert outcome == OutOfBudget(10**4)


def test_dec_on_zero_stays_zero():
    program = parse_program("Y <- Y - 1\nY <- Y - 1\nY <- Y + 1")
    assert run(program, (), budget=10) == Halted(1, 3)


def test_budget_boundary_counts_as_halting():
    program = parse_program("Y <- Y + 1")
    assert run(program, (), budget=1) == Halted(1, 1)
    assert run(program, (), budget=0) == OutOfBudget(0)


def test_jump_to_unused_label_halts():
    program = parse_program("X <- X + 1\nIF X != 0 GOTO E\nY <- Y + 1")
    outcome = run(program, (), budget=100)
    assert outcome == Halted(0, 2)  # the jump consumed the second step


def test_jump_targets_first_occurrence_of_label():
    text = "X <- X + 1\nIF X != 0 GOTO A\n[A] Y <- Y + 1\n[A] Y <- Y + 1"
    outcome = run(parse_program(text), (), budget=100)
    assert outcome == Halted(2, 4)


def test_run_is_deterministic():
    program = parse_program(ADDITION)
    outcomes = {run(program, (7, 5), budget=10**4) for _ in range(5)}
    assert outcomes == {Halted(12, next(iter(outcomes)).steps)}


# ---------------------------------------------------------------------------
# STP
# ---------------------------------------------------------------------------

def test_stp_addition_program():
    number = godel_program(parse_program(ADDITION))
    assert stp((1, 1), number, 10**4)


def test_stp_loop_program_false():
    number = 2**21 * 3**46 - 1
    for t in (0, 1, 10, 1000):
        assert not stp((0,), number, t)


def test_stp_monotone_and_agrees_with_run():
    rng = random.Random(13)
    for _ in range(1000):
        number = rng.randrange(0, 10**5)
        inputs = (rng.randrange(0, 50),)
        t = rng.randrange(0, 1000)
        program = program_from_number(number)
        outcome = run(program, inputs, t)
        assert stp(inputs, number, t) == isinstance(outcome, Halted)
        if isinstance(outcome, Halted):
            assert stp(inputs, number, t + 17)


# ---------------------------------------------------------------------------
# Turing machines
# ---------------------------------------------------------------------------

def test_tm_no_quadruples_outputs_input_plus_one():
    machine = TuringMachine(())
    assert tm_run(machine, 5, budget=10) == Halted(6, 0)


def test_tm_single_erase_halts_after_one_step():
    # Trace on input 2 (tape 1 1 1): erase under the head, stay put, then
    # read 0 with no quadruple for it -> halt with two ones left.
    machine = TuringMachine(((0, 1, "0", 0),))
    assert tm_run(machine, 2, budget=100) == Halted(2, 1)


def test_tm_budget_zero_with_applicable_quadruple():
    machine = TuringMachine(((0, 1, "0", 0),))
    assert tm_run(machine, 2, budget=0) == OutOfBudget(0)


def test_tm_rejects_nondeterminism():
    with pytest.raises(ValueError):
        TuringMachine(((0, 1, "L", 0), (0, 1, "R", 0)))


def test_tm_right_scan_erases_everything():
    # Erase a one, step right, repeat; halts past the right end of the block.
    machine = TuringMachine(((0, 1, "0", 1), (1, 0, "R", 0)))
    outcome = tm_run(machine, 4, budget=100)
    assert outcome == Halted(0, 10)
