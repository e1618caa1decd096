"""Drive an external SMT-LIB solver process over stdin/stdout: check
satisfiability, extract models as vertex layouts, decode layouts into
terms, verify grammar membership, and enumerate distinct solutions via
blocking clauses.

Finitized scripts leave vertices outside the decoded walk unconstrained,
so decoding ignores junk there and blocking clauses mention occupied
vertices only.  Models that decode to non-words or to terms exceeding
the finitization depth are counted as boundary artifacts, blocked, and
skipped.
"""

from __future__ import annotations

import os
import select
import shlex
import shutil
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SolverNotFoundError, SolverProtocolError
from .grammar import Term, TreeGrammar, member
from .smt import Finitized, SmtScript, StructuralConstraint, UseCount
from .tables import CombinatorTable, NonterminalTable


@dataclass(frozen=True)
class SolverConfig:
    command: tuple[str, ...]
    timeout_seconds: float = 120.0
    value_query_batch: int = 64
    # re-send the whole script per model by default (works with any solver);
    # incremental keeps one session alive and only re-asserts blocking clauses
    incremental: bool = False

    def __post_init__(self) -> None:
        if self.timeout_seconds <= 0:
            raise ValueError("timeout must be positive")
        if self.value_query_batch < 1:
            raise ValueError("value query batch must be positive")


@dataclass(frozen=True)
class Sat:
    layout: dict[int, int]
    ty: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str


@dataclass(frozen=True)
class SolverError:
    message: str


SolveOutcome = Sat | Unsat | Unknown | SolverError


@dataclass(frozen=True)
class Decoded:
    term: Term
    occupied: dict[int, int]


@dataclass(frozen=True)
class Rejected:
    reason: str
    occupied: dict[int, int]


@dataclass
class EnumerationResult:
    terms: list[Term]
    rejected_artifacts: int
    stopped_because: str  # "limit" | "unsat" | "unknown" | "error"
    detail: str = ""
    solver_seconds: float = 0.0


def default_solver_command() -> tuple[str, ...]:
    """Locate a solver: the CLSSMT_SOLVER environment variable, a z3 or
    cvc5 binary on PATH, then the bundled node-based z3 shim.
    """
    override = os.environ.get("CLSSMT_SOLVER")
    if override:
        return tuple(shlex.split(override))
    if shutil.which("z3"):
        return ("z3", "-in")
    if shutil.which("cvc5"):
        return ("cvc5", "--incremental")
    node = shutil.which("node")
    shim = Path(__file__).parent / "solver_shims" / "z3_wasm_server.js"
    if node and shim.exists():
        return (node, str(shim))
    raise SolverNotFoundError(
        "no SMT solver found: set CLSSMT_SOLVER, install z3 or cvc5, "
        "or install node with the z3-solver npm package for the bundled shim"
    )


class SolverTimeout(Exception):
    pass


class SolverSession:
    """One solver process speaking SMT-LIB over pipes.  Reads are
    balanced-s-expression aware because responses (notably get-value)
    may span lines.
    """

    def __init__(self, config: SolverConfig):
        self.config = config
        self._buffer = b""
        try:
            self._proc = subprocess.Popen(
                config.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
            )
        except OSError as exc:
            raise SolverNotFoundError(
                f"cannot start solver {' '.join(config.command)}: {exc}"
            ) from None

    def __enter__(self) -> "SolverSession":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.write(b"(exit)\n")
                self._proc.stdin.close()
            except (BrokenPipeError, OSError):
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def send(self, text: str) -> None:
        if self._proc.poll() is not None:
            raise SolverProtocolError(self._stderr_excerpt("solver exited"))
        try:
            self._proc.stdin.write(text.encode())
            self._proc.stdin.flush()
        except BrokenPipeError:
            raise SolverProtocolError(self._stderr_excerpt("solver closed stdin"))

    def read_unit(self) -> str:
        """One response unit: a bare word or a balanced s-expression."""
        deadline = time.monotonic() + self.config.timeout_seconds
        while True:
            unit, self._buffer = _take_unit(self._buffer)
            if unit is not None:
                text = unit.decode()
                if text.startswith("(error"):
                    raise SolverProtocolError(f"solver error: {text}")
                return text
            self._fill(deadline)

    def _fill(self, deadline: float) -> None:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise SolverTimeout()
        fd = self._proc.stdout.fileno()
        ready, _, _ = select.select([fd], [], [], remaining)
        if not ready:
            raise SolverTimeout()
        chunk = os.read(fd, 65536)
        if not chunk:
            raise SolverProtocolError(self._stderr_excerpt("solver closed stdout"))
        self._buffer += chunk

    def _stderr_excerpt(self, prefix: str) -> str:
        try:
            err = self._proc.stderr.read() or b""
        except (ValueError, OSError):
            err = b""
        excerpt = err.decode(errors="replace").strip()[:500]
        return f"{prefix}: {excerpt}" if excerpt else prefix

    def check_sat_response(self) -> str:
        word = self.read_unit()
        if word not in ("sat", "unsat", "unknown"):
            raise SolverProtocolError(f"unexpected check-sat response {word!r}")
        return word

    def get_values(self, exprs: list[str]) -> list[int]:
        """Query expression values in batches, returned positionally."""
        values: list[int] = []
        batch = self.config.value_query_batch
        for base in range(0, len(exprs), batch):
            chunk = exprs[base : base + batch]
            self.send("(get-value (" + " ".join(chunk) + "))\n")
            response = _parse_sexpr(self.read_unit())
            if not isinstance(response, list) or len(response) != len(chunk):
                raise SolverProtocolError(f"bad get-value response for {chunk}")
            for pair in response:
                if not isinstance(pair, list) or len(pair) != 2:
                    raise SolverProtocolError(f"bad get-value pair {pair!r}")
                values.append(_decode_int(pair[1]))
        return values


def _take_unit(buffer: bytes) -> tuple[bytes | None, bytes]:
    """Split one complete unit off the buffer, or (None, buffer)."""
    i = 0
    while i < len(buffer) and buffer[i : i + 1].isspace():
        i += 1
    if i == len(buffer):
        return None, b""
    if buffer[i : i + 1] != b"(":
        end = i
        while end < len(buffer) and not buffer[end : end + 1].isspace():
            end += 1
        if end == len(buffer):
            return None, buffer[i:]  # atom may continue in the next chunk
        return buffer[i:end], buffer[end:]
    depth = 0
    in_string = False
    for j in range(i, len(buffer)):
        ch = buffer[j : j + 1]
        if in_string:
            if ch == b'"':
                in_string = False
        elif ch == b'"':
            in_string = True
        elif ch == b"(":
            depth += 1
        elif ch == b")":
            depth -= 1
            if depth == 0:
                return buffer[i : j + 1], buffer[j + 1 :]
    return None, buffer[i:]


def _parse_sexpr(text: str):
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise SolverProtocolError(f"truncated s-expression {text!r}")
        token = tokens[pos]
        pos += 1
        if token == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise SolverProtocolError(f"unbalanced s-expression {text!r}")
            pos += 1
            return items
        return token

    result = parse()
    if pos != len(tokens):
        raise SolverProtocolError(f"trailing tokens in {text!r}")
    return result


def _decode_int(value) -> int:
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise SolverProtocolError(f"non-integer value {value!r}")
    if isinstance(value, list) and len(value) == 2 and value[0] == "-":
        return -_decode_int(value[1])
    raise SolverProtocolError(f"non-integer value {value!r}")


def solve(
    script: SmtScript,
    config: SolverConfig | None = None,
    probe_range: tuple[int, ...] | None = None,
) -> SolveOutcome:
    """Single check-sat round trip.  On sat, extract inhabitant and ty
    over the script's finitized vertex set (or a caller-supplied probe
    range for quantified scripts).
    """
    cfg = config or SolverConfig(default_solver_command())
    vertices = list(script.vertices) if script.vertices else list(probe_range or ())
    try:
        with SolverSession(cfg) as session:
            session.send(script.text())
            status = session.check_sat_response()
            if status == "unsat":
                return Unsat()
            if status == "unknown":
                return Unknown("solver reported unknown")
            if not vertices:
                return Sat({}, {})
            labels = session.get_values([f"(inhabitant {v})" for v in vertices])
            tys = session.get_values([f"(ty {v})" for v in vertices])
            return Sat(dict(zip(vertices, labels)), dict(zip(vertices, tys)))
    except SolverTimeout:
        return Unknown("timeout")
    except SolverProtocolError as exc:
        return SolverError(str(exc))


def decode_and_verify(
    outcome: Sat,
    g: TreeGrammar,
    goal: str,
    tables: tuple[CombinatorTable, NonterminalTable],
) -> Decoded | Rejected:
    """Walk the layout from vertex 1 along the application structure,
    ignoring junk at unvisited vertices, and accept only words of the
    grammar at the goal nonterminal.
    """
    combinator_table, _ = tables
    layout = outcome.layout
    occupied: dict[int, int] = {}

    def walk(v: int) -> Term:
        spine: list[int] = []
        cursor = v
        while layout.get(cursor) == 0:
            occupied[cursor] = 0
            spine.append(cursor)
            cursor = 2 * cursor
        if cursor not in layout:
            raise _Artifact(f"address {cursor} outside the modelled region")
        label = layout[cursor]
        occupied[cursor] = label
        if not 1 <= label <= len(combinator_table):
            raise _Artifact(f"vertex {cursor} holds unknown label {label}")
        n = len(spine)
        args = [walk(2 * spine[n - k] + 1) for k in range(1, n + 1)]
        return Term(combinator_table.name_of(label), tuple(args))

    try:
        term = walk(1)
    except _Artifact as exc:
        return Rejected(str(exc), occupied)
    except RecursionError:
        return Rejected("layout walk does not terminate", occupied)
    if goal not in g.rules or not member(g, goal, term):
        return Rejected("decoded term is not a word of the grammar", occupied)
    return Decoded(term, occupied)


class _Artifact(Exception):
    pass


def enumerate_solutions(
    script: SmtScript,
    g: TreeGrammar,
    goal: str,
    tables: tuple[CombinatorTable, NonterminalTable],
    config: SolverConfig | None = None,
    k: int = 10,
    constraints: tuple[StructuralConstraint, ...] = (),
) -> EnumerationResult:
    """Enumerate up to k distinct verified terms from a finitized script
    by repeatedly blocking the occupied region of each model.
    """
    if not isinstance(script.mode, Finitized):
        raise SolverProtocolError("enumeration requires a finitized script")
    cfg = config or SolverConfig(default_solver_command())
    depth_bound = 2 ** (script.mode.depth + 1) - 1
    use_counts = [c for c in constraints if isinstance(c, UseCount)]

    terms: list[Term] = []
    rejected = 0
    blocks: list[str] = []
    started = time.monotonic()

    def finish(reason: str, detail: str = "") -> EnumerationResult:
        return EnumerationResult(
            terms, rejected, reason, detail, time.monotonic() - started
        )

    if k <= 0:
        return finish("limit")

    session: SolverSession | None = None
    try:
        while True:
            if cfg.incremental:
                if session is None:
                    session = SolverSession(cfg)
                    session.send(script.text())
                else:
                    session.send(blocks[-1] + "\n(check-sat)\n")
            else:
                if session is not None:
                    session.close()
                session = SolverSession(cfg)
                session.send(script.text()[: -len("(check-sat)\n")])
                for clause in blocks:
                    session.send(clause + "\n")
                session.send("(check-sat)\n")

            status = session.check_sat_response()
            if status == "unsat":
                return finish("unsat")
            if status == "unknown":
                return finish("unknown", "solver reported unknown")

            vertices = list(script.vertices)
            labels = session.get_values([f"(inhabitant {v})" for v in vertices])
            outcome = Sat(dict(zip(vertices, labels)))
            result = decode_and_verify(outcome, g, goal, tables)

            if isinstance(result, Decoded):
                over_depth = any(v > depth_bound for v in result.occupied)
                miscounted = any(
                    not _within_use_bounds(result.term, c) for c in use_counts
                )
                if over_depth:
                    rejected += 1
                elif miscounted:
                    rejected += 1
                elif result.term in terms:
                    return finish(
                        "error", f"blocking failed to exclude {result.term}"
                    )
                else:
                    terms.append(result.term)
            else:
                rejected += 1

            blocks.append(_blocking_clause(result.occupied))
            if len(terms) >= k:
                return finish("limit")
    except SolverTimeout:
        return finish("unknown", "timeout")
    except SolverProtocolError as exc:
        return finish("error", str(exc))
    finally:
        if session is not None:
            session.close()


def _blocking_clause(occupied: dict[int, int]) -> str:
    parts = [f"(= (inhabitant {v}) {occupied[v]})" for v in sorted(occupied)]
    if not parts:
        return "(assert false)"
    if len(parts) == 1:
        return f"(assert (not {parts[0]}))"
    return "(assert (not (and " + " ".join(parts) + ")))"


def _within_use_bounds(term: Term, c: UseCount) -> bool:
    # junk vertices can satisfy a use-count lower bound spuriously, so
    # re-check the bounds on the decoded term itself
    def count(t: Term) -> int:
        return (t.combinator == c.combinator) + sum(count(a) for a in t.args)

    uses = count(term)
    return uses >= c.at_least and (c.at_most is None or uses <= c.at_most)
