"""The function zoo: reference oracles plus instrumented programs.

Each function ships as an independent slow oracle and one or more
charged programs (direct, step, enumerator, shortcut).  Program/oracle
agreement on the declared ranges is part of the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

from .automata import eca_row_fn, life_alive_count, life_config
from .combinators import incremental_enumerator, interleave_trivial, restart_enumerator
from .costvm import Meter
from .programs import Oracle, ProgramHandle, Registry, cost_handle, tm_handle
from .trace import final_value
from .turing import MachineSpec, parse_machine, run_machine

# -- machine files ---------------------------------------------------------

BUILTIN_MACHINES = ("emit1", "increment", "palindrome1", "palindrome2")


def builtin_machine(name: str) -> MachineSpec:
    if name not in BUILTIN_MACHINES:
        raise KeyError(f"no builtin machine {name!r}")
    text = resources.files("steplab.machines").joinpath(f"{name}.tm").read_text()
    return parse_machine(text)


def builtin_pattern(name: str) -> frozenset:
    from .automata import parse_pattern

    text = resources.files("steplab.patterns").joinpath(f"{name}.txt").read_text()
    return parse_pattern(text)


def tm_word_decider(spec: MachineSpec):
    """Word predicate backed by a decider machine (final record 1/0)."""

    def pred(word) -> bool:
        text = "".join(str(b) for b in word)
        return final_value(run_machine(spec, text)) == 1

    return pred


# -- word enumeration and deciders ------------------------------------------


def word_at_index(i: int) -> tuple[int, ...]:
    """The i-th word of {0,1}* in length-increasing lexicographic order.

    w_1 is the empty word; dropping the leading 1 of i's binary form
    yields exactly this enumeration.
    """
    if i < 1:
        raise ValueError("word index starts at 1")
    return tuple(int(ch) for ch in format(i, "b")[1:])


def is_palindrome_word(word) -> bool:
    return tuple(word) == tuple(reversed(word))


def has_equal_zeros_ones(word) -> bool:
    return sum(word) * 2 == len(word)


def always_true(word) -> bool:
    return True


def oracle_langcount(decider, n: int) -> int:
    """Count the words among w_1..w_n accepted by the decider."""
    return sum(1 for i in range(1, n + 1) if decider(word_at_index(i)))


def _costed_palindrome(m: Meter, word) -> int:
    lo, hi = 0, len(word) - 1
    while lo < hi:
        m.tick()
        if m.cmp(m.load(word[lo]), m.load(word[hi])) != 0:
            return 0
        lo += 1
        hi -= 1
    m.tick()
    return 1


def _costed_eq01(m: Meter, word) -> int:
    ones = m.store(0)
    for b in word:
        m.tick()
        ones = m.add(ones, m.load(b))
    doubled = m.shl(ones, 1)
    return 1 if m.cmp(doubled, len(word)) == 0 else 0


def _costed_true(m: Meter, word) -> int:
    m.tick()
    return 1


DECIDERS = {
    "palindrome": (is_palindrome_word, _costed_palindrome),
    "eq01": (has_equal_zeros_ones, _costed_eq01),
    "always-true": (always_true, _costed_true),
}


# -- number-theoretic oracles ------------------------------------------------


def bit_from_lsb(value: int, k: int) -> int:
    """k-th bit counting from the least significant, starting at 1."""
    return (value >> (k - 1)) & 1


def bit_from_msb(value: int, k: int) -> int:
    """k-th bit counting from the most significant, starting at 1."""
    width = value.bit_length()
    if k > width:
        return 0
    return (value >> (width - k)) & 1


def oracle_bitsum3(n: int) -> int:
    """Least significant bit of sum over k <= n of the k-th bit of 3**k.

    Bits are indexed from the least significant end starting at 1, and
    "first bit" of the sum is its parity; both conventions are stated
    here because nothing else pins them down, and the MSB-indexed
    variant is registered separately as bitsum3_msb.
    """
    return sum(bit_from_lsb(3**k, k) for k in range(1, n + 1)) & 1


def oracle_bitsum3_msb(n: int) -> int:
    return sum(bit_from_msb(3**k, k) for k in range(1, n + 1)) & 1


# -- charged program bodies ---------------------------------------------------


def _factorial_scaled_direct(scale: int):
    def body(m: Meter, n):
        m.tick()
        acc = m.store(scale)
        for i in m.count(2, n):
            acc = m.mul(acc, i)
        m.emit_record(acc)
        return int(acc)

    return body


def _factorial_step_body(m: Meter, i, prev):
    return m.mul(prev, i)


def _pow3_direct_body(m: Meter, n):
    m.tick()
    acc = m.store(1)
    for _ in m.count(1, n):
        acc = m.mul(acc, 3)
    m.emit_record(acc)
    return int(acc)


def _pow3_step_body(m: Meter, i, prev):
    return m.mul(prev, 3)


def _pow3_shortcut_body(m: Meter, n):
    """Square-and-multiply over the bits of n, high bit first."""
    m.tick()
    acc = m.store(1)
    for ch in format(int(n), "b"):
        m.tick()
        acc = m.mul(acc, acc)
        if ch == "1":
            acc = m.mul(acc, 3)
    m.emit_record(acc)
    return int(acc)


def _bitsum3_body(m: Meter, n):
    m.tick()
    power = m.store(1)
    parity = m.store(0)
    for k in m.count(1, n):
        power = m.mul(power, 3)
        shifted = m.shr(power, k - 1)
        _, bit = m.divmod(shifted, 2)
        _, parity = m.divmod(m.add(parity, bit), 2)
        m.emit_record(parity)
    return int(parity)


def _bitsum3_msb_body(m: Meter, n):
    m.tick()
    power = m.store(1)
    parity = m.store(0)
    for k in m.count(1, n):
        power = m.mul(power, 3)
        width = int(m.load(power)).bit_length()
        bit = m.shr(power, width - k) if k <= width else m.store(0)
        _, bit = m.divmod(bit, 2)
        _, parity = m.divmod(m.add(parity, bit), 2)
        m.emit_record(parity)
    return int(parity)


def _identity_body(m: Meter, n):
    m.tick()
    v = m.load(n)
    m.emit_record(v)
    return int(v)


def _one_direct_body(m: Meter, n):
    m.tick()
    m.emit_record(1)
    return 1


def _one_enumerator_body(m: Meter, n):
    m.tick()
    for _ in m.count(1, n):
        m.emit_record(1)
    return 1


def _increment_body(m: Meter, n):
    m.tick()
    v = m.add(n, 1)
    m.emit_record(v)
    return int(v)


def _langcount_body(decider_name: str, emit_all: bool):
    _, costed = DECIDERS[decider_name]

    def body(m: Meter, n):
        m.tick()
        count = m.store(0)
        for i in m.count(1, n):
            word = word_at_index(i)
            for _ in word:
                m.tick()
            count = m.add(count, costed(m, word))
            if emit_all:
                m.emit_record(count)
        if not emit_all:
            m.emit_record(count)
        return int(count)

    return body


def _eca_body(rule: int):
    table = {
        (a, b, c): (rule >> (a * 4 + b * 2 + c)) & 1
        for a in (0, 1)
        for b in (0, 1)
        for c in (0, 1)
    }

    def body(m: Meter, n):
        n = int(n)
        m.tick()
        row = [1]
        for _ in m.count(1, n):
            prev = [0, 0] + row + [0, 0]
            new = []
            for j in range(len(row) + 2):
                left = int(m.load(prev[j]))
                mid = int(m.load(prev[j + 1]))
                right = int(m.load(prev[j + 2]))
                m.tick()
                new.append(int(m.store(table[(left, mid, right)])))
            row = new
        value = int("".join(str(x) for x in row), 2)
        m.emit_record(value)
        return value

    return body


def _life_direct_body(m: Meter, n):
    from .automata import _NEIGHBORS

    n = int(n)
    m.tick()
    alive = m.store(0)
    for index in m.count(1, n):
        cells = life_config(index)
        for _ in range(max(1, len(cells))):
            m.tick()
        for _ in m.count(1, n):
            if not cells:
                continue
            counts: dict[tuple[int, int], int] = {}
            for (x, y) in sorted(cells):
                m.load(1)
                for dx, dy in _NEIGHBORS:
                    m.tick()
                    q = (x + dx, y + dy)
                    counts[q] = counts.get(q, 0) + 1
            new = set()
            for p in sorted(counts):
                m.tick()
                c = counts[p]
                if c == 3 or (c == 2 and p in cells):
                    m.store(1)
                    new.add(p)
            cells = frozenset(new)
        m.tick()
        alive = m.add(alive, 1 if cells else 0)
    m.emit_record(alive)
    return int(alive)


# -- registry assembly --------------------------------------------------------


def _add_factorial_family(reg: Registry, function: str, scale: int) -> None:
    reg.add_oracle(Oracle(function, lambda n, s=scale: s * math.factorial(n)))
    direct = cost_handle(
        "direct", function, "direct", _factorial_scaled_direct(scale),
        purpose=f"compute {function}(n) by one product sweep",
    )
    step = cost_handle(
        "step", function, "step", _factorial_step_body, arity=2,
        purpose=f"compute {function}(i) from (i, {function}(i-1))",
    )
    reg.add_program(direct, checked_n_max=20)
    reg.add_program(step, checked_n_max=20)
    reg.add_program(
        incremental_enumerator(scale, step, function, name="incremental"),
        checked_n_max=20,
    )
    reg.add_program(
        restart_enumerator(direct, name="restart"), checked_n_max=12
    )


def build_registry() -> Registry:
    """All zoo functions, their oracles, and their named programs."""
    reg = Registry()

    _add_factorial_family(reg, "factorial", 1)
    _add_factorial_family(reg, "factorial2", 2)
    _add_factorial_family(reg, "factorial4", 4)

    reg.add_oracle(Oracle("pow3", lambda n: 3**n))
    pow3_direct = cost_handle("direct", "pow3", "direct", _pow3_direct_body)
    pow3_step = cost_handle("step", "pow3", "step", _pow3_step_body, arity=2)
    reg.add_program(pow3_direct, checked_n_max=48)
    reg.add_program(pow3_step, checked_n_max=48)
    reg.add_program(
        incremental_enumerator(3, pow3_step, "pow3", name="incremental"),
        checked_n_max=48,
    )
    reg.add_program(restart_enumerator(pow3_direct, name="restart"), checked_n_max=12)
    reg.add_program(
        cost_handle(
            "shortcut", "pow3", "shortcut", _pow3_shortcut_body,
            purpose="square-and-multiply exponentiation",
        ),
        checked_n_max=48,
    )

    reg.add_oracle(Oracle("bitsum3", oracle_bitsum3))
    reg.add_program(
        cost_handle("enumerator", "bitsum3", "enumerator", _bitsum3_body),
        checked_n_max=64,
    )
    reg.add_oracle(Oracle("bitsum3_msb", oracle_bitsum3_msb))
    reg.add_program(
        cost_handle("enumerator", "bitsum3_msb", "enumerator", _bitsum3_msb_body),
        checked_n_max=32,
    )

    reg.add_oracle(
        Oracle("palcount", lambda n: oracle_langcount(is_palindrome_word, n))
    )
    reg.add_program(
        cost_handle(
            "enumerator", "palcount", "enumerator", _langcount_body("palindrome", True),
            purpose="count palindromes among the first n words, emitting every count",
        ),
        checked_n_max=1024,
    )
    reg.add_program(
        cost_handle(
            "direct", "palcount", "direct", _langcount_body("palindrome", False),
            purpose="count palindromes among the first n words",
        ),
        checked_n_max=64,
    )

    reg.add_oracle(Oracle("eca30", lambda n: eca_row_fn(30, n)))
    reg.add_program(
        cost_handle("direct", "eca30", "direct", _eca_body(30)), checked_n_max=24
    )
    reg.add_oracle(Oracle("eca110", lambda n: eca_row_fn(110, n)))
    reg.add_program(
        cost_handle("direct", "eca110", "direct", _eca_body(110)), checked_n_max=24
    )

    reg.add_oracle(Oracle("life", life_alive_count))
    life_direct = cost_handle("direct", "life", "direct", _life_direct_body)
    reg.add_program(life_direct, checked_n_max=8)
    reg.add_program(restart_enumerator(life_direct, name="restart"), checked_n_max=6)

    reg.add_oracle(Oracle("identity", lambda n: n))
    identity_direct = cost_handle("direct", "identity", "direct", _identity_body)
    reg.add_program(identity_direct, checked_n_max=64)
    reg.add_program(
        restart_enumerator(identity_direct, name="restart"), checked_n_max=32
    )

    reg.add_oracle(Oracle("one", lambda n: 1))
    reg.add_program(
        cost_handle("direct", "one", "direct", _one_direct_body), checked_n_max=64
    )
    reg.add_program(
        cost_handle("enumerator", "one", "enumerator", _one_enumerator_body),
        checked_n_max=64,
    )

    reg.add_oracle(Oracle("increment", lambda n: n + 1))
    reg.add_program(
        cost_handle("cost", "increment", "direct", _increment_body),
        checked_n_max=200,
    )
    reg.add_program(
        tm_handle("tm", "increment", "direct", builtin_machine("increment")),
        checked_n_max=200,
    )

    # the interleave of factorial: odd positions follow factorial, even are 1
    fact_inc = reg.program("factorial.incremental")
    fact_oracle = reg.oracle("factorial")
    reg.add_oracle(
        Oracle(
            "interleave_factorial",
            lambda n: fact_oracle((n + 1) // 2) if n % 2 else 1,
        )
    )
    g_enum, g_shortcut = interleave_trivial(fact_inc, function="interleave_factorial")
    reg.add_program(
        ProgramHandle(
            name="enumerator", function="interleave_factorial", kind="enumerator",
            backend="cost", program=g_enum.program,
        ),
        checked_n_max=24,
    )
    reg.add_program(
        ProgramHandle(
            name="even_shortcut", function="interleave_factorial", kind="shortcut",
            backend="cost", program=g_shortcut.program,
        ),
        checked_n_max=24,
    )

    # named helpers, addressable from witness manifests
    def _pass_body(m: Meter, n, i, r):
        m.tick()
        return int(r)

    def _halve_body(m: Meter, n, i, r):
        q, _ = m.divmod(r, 2)
        return int(q)

    reg.add_program(
        cost_handle("pass", "helper", "helper", _pass_body, arity=3,
                    purpose="return the designated record unchanged")
    )
    reg.add_program(
        cost_handle("halve", "helper", "helper", _halve_body, arity=3,
                    purpose="halve the designated record")
    )

    def _odd_direct_body(m: Meter, n):
        m.tick()
        _, r = m.divmod(n, 2)
        if int(r) != 1:
            raise ValueError("odd inputs only")
        half = m.shr(m.add(n, 1), 1)
        return int(_factorial_scaled_direct(1)(m, int(half)))

    reg.add_program(
        cost_handle(
            "odd_direct", "interleave_factorial", "direct", _odd_direct_body,
            purpose="compute the interleave at odd arguments via one factorial",
            domain=lambda v: v % 2 == 1, domain_label="odd",
        ),
        checked_n_max=24,
    )

    return reg


# -- zoo summary for the agreement tests --------------------------------------

_ZOO_NOTES = {
    "bitsum3": "single-bit values; no obvious route from f(n-1) back to n",
    "bitsum3_msb": "alternate bit-indexing convention, neither privileged",
    "eca30": "row cost grows with the square of the generation count",
    "eca110": "second elementary rule, same cost shape",
    "factorial": "value growth forces the n log n output floor",
    "factorial2": "doubled twin used by witness and analogy corpora",
    "factorial4": "second doubling, closes the analogy chain",
    "identity": "cheapest nontrivial function; restart demo",
    "increment": "implemented on both backends for the agreement check",
    "interleave_factorial": "trivial at even arguments, enumeration-bound at odd",
    "life": "survivor counts over the indexed configuration enumeration",
    "one": "constant values break the growth-floor premise",
    "palcount": "word counting over the length-lexicographic order",
    "pow3": "has a square-and-multiply route skipping most values",
}


@dataclass(frozen=True)
class ZooEntry:
    """A function with its oracle and instrumented programs."""

    name: str
    oracle: Oracle
    programs: tuple[tuple[ProgramHandle, int], ...]  # (handle, checked n_max)
    notes: str


def zoo_entries(reg: Registry) -> list[ZooEntry]:
    out = []
    for function in reg.functions():
        programs = []
        for handle in reg.programs_for(function):
            key = f"{function}.{handle.name}"
            programs.append((handle, reg.checked_n_max.get(key, 8)))
        out.append(
            ZooEntry(
                name=function,
                oracle=reg.oracle(function),
                programs=tuple(programs),
                notes=_ZOO_NOTES.get(function, ""),
            )
        )
    return out
