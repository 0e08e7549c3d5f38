"""steplab: a desk-scale laboratory for step-exact machine experiments.

Two execution backends share one trace model: a deterministic multi-tape
Turing machine interpreter with an append-only output tape, and a cost
VM that charges host procedures against a declared per-primitive table.
On top of them sit verifiers for enumerator machines, approximation and
analogy witnesses, machine combinators, a zoo of instrumented functions,
and an empirical asymptotics engine.
"""

from .analogy import (
    AnalogyViolation,
    AnalogyWitness,
    ClassLedger,
    builtin_witnesses,
    compose_witness,
    lift_approximation,
    reflexive_witness,
    timing_audit,
    verify_analogy,
)
from .analysis import (
    FitReport,
    PreconditionError,
    ThetaComparison,
    TimingSeries,
    convex_sum_bound,
    fit_powerlaw,
    measure,
    registry_best,
    theta_compare,
)
from .approximation import (
    ApproximationViolation,
    ApproximationWitness,
    FinalRecordSoFar,
    RecordByIndex,
    RecordTable,
    based_machine,
    cir_falsifier,
    identity_witness,
    parse_witness_manifest,
    verify_approximation,
)
from .automata import (
    EcaRow,
    eca_row_fn,
    eca_step,
    life_alive_count,
    life_config,
    life_step,
    parse_pattern,
)
from .bounds import Bound
from .combinators import (
    compose_serial,
    daughter_interleave_costs,
    daughter_machine,
    incremental_enumerator,
    interleave_trivial,
    restart_enumerator,
)
from .costvm import (
    AuditReport,
    BudgetExceeded,
    CostedProgram,
    Meter,
    charge_audit,
    run_costed,
)
from .enumeration import (
    EnumerationProfile,
    EnumerationViolation,
    commit_steps,
    halt_slack,
    nlogn_evidence,
    profile_independence,
    profiles_to_csv,
    verify_enumerator,
)
from .programs import Oracle, ProgramHandle, Registry, cost_handle, tm_handle
from .trace import (
    DEFAULT_BUDGET,
    ExecutionTrace,
    OutputRecord,
    RecordStructureError,
    decode_bits,
    encode_natural,
    final_value,
    split_records,
)
from .turing import (
    MachineSpec,
    MachineError,
    parse_machine,
    run_machine,
    step_through,
)
from .zoo import (
    ZooEntry,
    build_registry,
    builtin_machine,
    builtin_pattern,
    oracle_bitsum3,
    oracle_langcount,
    word_at_index,
    zoo_entries,
)

__version__ = "0.1.0"
