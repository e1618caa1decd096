"""Synthesis of applicative terms from intersection-typed combinator
repositories: subtyping, grammar construction, SMT translation, and
solver-driven enumeration.
"""

from .errors import (
    ClssmtError,
    ConstraintError,
    CoverLimitError,
    GrammarFormatError,
    MalformedTreeError,
    NonterminalLimitError,
    RepositoryError,
    SolverNotFoundError,
    SolverProtocolError,
    SubstitutionError,
    TableError,
    TermSyntaxError,
    TypeArityError,
    TypeSyntaxError,
)
from .filters import evaluate, satisfies_all
from .grammar import (
    RuleRhs,
    Term,
    TreeGrammar,
    delayout,
    enumerate_words,
    from_json,
    layout,
    member,
    parse_term,
    print_term,
    print_term_functional,
    prune,
    term_depth,
    term_to_dot,
    to_json,
)
from .inhabitation import InhabitationRequest, inhabit, verify_grammar
from .maze import Maze, generate_maze, goal_type_text, maze_to_repository, parse_layout
from .repository import Repository, parse_repository, substitutions, validate
from .smt import (
    Finitized,
    Forbid,
    ForbidCompose,
    LeafArgument,
    NeverApplied,
    Quantified,
    Raw,
    SmtScript,
    UseCount,
    assign_tables,
    compile_constraint,
    parse_constraints,
    translate_combinator,
    translate_grammar,
    translate_production_rule,
)
from .solver import (
    Decoded,
    EnumerationResult,
    Rejected,
    Sat,
    SolverConfig,
    Unknown,
    Unsat,
    decode_and_verify,
    default_solver_command,
    enumerate_solutions,
    solve,
)
from .tables import CombinatorTable, NonterminalTable
from .types import (
    Arrow,
    Constant,
    Constructor,
    Intersection,
    Taxonomy,
    Type,
    Variable,
    canonical,
    equivalent,
    parse_type,
    paths,
    print_type,
    subtype,
)

__version__ = "0.1.0"
