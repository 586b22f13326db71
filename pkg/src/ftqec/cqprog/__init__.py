"""Classical-quantum programs: syntax, static checks and a concrete interpreter."""

from .ast import (
    CONSERVATIVE,
    MEMORYLESS,
    Assign,
    BinOp,
    Const,
    Gate,
    IfElse,
    Index,
    Init,
    Measure,
    Not,
    OracleCall,
    OracleSpec,
    Program,
    Repeat,
    Stmt,
    Var,
    decoder_spec,
    majority_spec,
    table_spec,
)
from .analysis import (
    check_conservative_structure,
    check_memoryless,
    check_well_formed,
    output_qubits,
    transversality_report,
)
from .interp import (
    Fault,
    Run,
    Script,
    enumerate_pauli_fault_runs,
    ideal_branches,
    replay,
    run_ideal,
)
from .parser import ParseError, parse, pretty
from .stabsim import ConcreteState
