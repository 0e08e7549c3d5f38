"""Shared trace model for both execution backends.

Every run, whether on the Turing machine interpreter or on the cost VM,
produces an ExecutionTrace: the ordered list of symbols emitted on the
append-only output tape together with the step index of each emission.
Emitted output is a sequence of records, each opened by '#' and followed
by the binary digits of a natural number (most significant bit first, no
leading zeros, zero written as "0").
"""

from __future__ import annotations

from dataclasses import dataclass

ZERO = "0"
ONE = "1"
HASH = "#"
BLANK = "_"

EMITTABLE = (ZERO, ONE, HASH)
TAPE_SYMBOLS = (ZERO, ONE, HASH, BLANK)

DEFAULT_BUDGET = 10**8


class RecordStructureError(Exception):
    """The emitted symbol stream violates the record discipline."""


def encode_natural(value: int) -> str:
    """Canonical binary encoding: MSB first, no leading zeros, 0 -> "0"."""
    if value < 0:
        raise ValueError(f"cannot encode negative value {value}")
    return format(value, "b")


def decode_bits(bits: str) -> int:
    """Decode an MSB-first bit string; the empty string is invalid."""
    if not bits:
        raise RecordStructureError("cannot decode an empty bit sequence")
    if any(b not in (ZERO, ONE) for b in bits):
        raise RecordStructureError(f"non-bit symbol in record: {bits!r}")
    return int(bits, 2)


@dataclass(frozen=True)
class ExecutionTrace:
    """Full record of one run's output-tape emissions.

    events are (step, symbol) pairs with strictly increasing steps.  If
    halted is False the run was cut off by its step budget and
    total_steps equals that budget.
    """

    input: object
    events: tuple[tuple[int, str], ...]
    total_steps: int
    halted: bool

    def emitted(self) -> str:
        """The raw emitted symbol sequence, in order."""
        return "".join(sym for _, sym in self.events)


@dataclass(frozen=True)
class OutputRecord:
    """One '#'-opened record of the output stream.

    A record is closed once a following '#' was emitted or the machine
    halted; a closed record with no bits is a structural violation.
    """

    index: int
    open_step: int
    bits: str
    bit_steps: tuple[int, ...]
    closed: bool

    def value(self) -> int:
        return decode_bits(self.bits)


def split_records(trace: ExecutionTrace) -> list[OutputRecord]:
    """Partition the emitted stream into records.

    Concatenating '#' + bits over the result reproduces the emitted
    sequence exactly.  Raises RecordStructureError on bits emitted before
    the first '#' or on any closed record with empty bits.
    """
    records: list[OutputRecord] = []
    open_step = None
    bits: list[str] = []
    bit_steps: list[int] = []

    def close(closed: bool) -> None:
        if open_step is None:
            return
        if closed and not bits:
            raise RecordStructureError(
                f"record {len(records) + 1} closed with empty bits"
            )
        records.append(
            OutputRecord(
                index=len(records) + 1,
                open_step=open_step,
                bits="".join(bits),
                bit_steps=tuple(bit_steps),
                closed=closed,
            )
        )

    for step, sym in trace.events:
        if sym == HASH:
            close(True)
            open_step = step
            bits = []
            bit_steps = []
        elif sym in (ZERO, ONE):
            if open_step is None:
                raise RecordStructureError(
                    f"bit emitted at step {step} before any record separator"
                )
            bits.append(sym)
            bit_steps.append(step)
        else:
            raise RecordStructureError(f"illegal emitted symbol {sym!r}")
    close(trace.halted)
    return records


def final_value(trace: ExecutionTrace) -> int:
    """Decoded value of the last record; the run's result by convention."""
    records = split_records(trace)
    if not records:
        raise RecordStructureError("trace has no output records")
    return records[-1].value()
