"""CDCL satisfiability solver with incremental assumptions.

Textbook architecture: two watched literals, first-UIP conflict learning,
VSIDS-style variable activity with phase saving, Luby restarts, lazy
learned-clause deletion.  No internal randomness: given the same clauses
and assumptions the search is identical, which the reports rely on.  The
`seed` parameter is accepted for interface stability and ignored.

The solver object is incremental: clauses may be added between `solve`
calls and learned clauses are kept (they are implied by the database, so
they stay valid when assumptions change).
"""

from __future__ import annotations

import os
import shutil
import subprocess
import time
from dataclasses import dataclass
from heapq import heappop, heappush

from .errors import ParseError, SemiformError


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    RESTART_BASE = 128
    VAR_DECAY = 1.0 / 0.95
    CLA_DECAY = 1.0 / 0.999

    def __init__(self):
        self.clauses: list[list[int]] = []
        self.deleted: set[int] = set()
        self.watches: list[list[int]] = [[], []]  # indexed by encoded literal
        self.assign: list[int] = [0]  # 0 unassigned, 1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[int] = [-1]  # clause index
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [0]
        self.seen: list[bool] = [False]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.cla_act: dict[int, float] = {}
        self.ok = True
        self.n_conflicts = 0
        self.n_propagations = 0
        self.n_learnts = 0
        self._model: list[int] = []

    # -- variables and clauses ----------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.assign) - 1

    def new_var(self) -> int:
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(-1)
        self.activity.append(0.0)
        self.phase.append(0)
        self.seen.append(False)
        self.watches.append([])
        self.watches.append([])
        v = len(self.assign) - 1
        heappush(self.heap, (0.0, v))
        return v

    def ensure_vars(self, n: int):
        while self.num_vars < n:
            self.new_var()

    def _enc(self, lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def lit_value(self, lit: int) -> int:
        a = self.assign[abs(lit)]
        return a if lit > 0 else -a

    def add_clause(self, lits) -> bool:
        """Add a clause.  Returns False once the DB is UNSAT."""
        if not self.ok:
            return False
        self._cancel_until(0)
        out = []
        seen = set()
        for lit in lits:
            self.ensure_vars(abs(lit))
            if -lit in seen:
                return True  # tautology
            if lit in seen:
                continue
            v = self.lit_value(lit)
            if v == 1:
                return True  # already satisfied at level 0
            if v == -1:
                continue  # already false at level 0
            seen.add(lit)
            out.append(lit)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], -1)
            if self._propagate() is not None:
                self.ok = False
                return False
            return True
        ci = len(self.clauses)
        self.clauses.append(out)
        self.watches[self._enc(out[0])].append(ci)
        self.watches[self._enc(out[1])].append(ci)
        return True

    # -- trail ----------------------------------------------------------------

    def _enqueue(self, lit: int, reason_ci: int):
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason_ci
        self.trail.append(lit)

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        bound = self.trail_lim[lvl]
        for i in range(len(self.trail) - 1, bound - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.assign[v] = 0
            self.reason[v] = -1
            heappush(self.heap, (-self.activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    # -- propagation -----------------------------------------------------------

    def _propagate(self) -> list[int] | None:
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            wl = self.watches[self._enc(false_lit)]
            i = j = 0
            n = len(wl)
            while i < n:
                ci = wl[i]
                i += 1
                if ci in self.deleted:
                    continue
                c = self.clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if self.lit_value(first) == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    if self.lit_value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self.watches[self._enc(c[1])].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if self.lit_value(first) == -1:
                    while i < n:
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    self.qhead = len(self.trail)
                    return c
                self._enqueue(first, ci)
            del wl[j:]
            self.n_propagations += n
        return None

    # -- learning ---------------------------------------------------------------

    def _bump_var(self, v: int):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for i in range(1, len(self.activity)):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100

    def _bump_clause(self, ci: int):
        # only learnt clauses live in cla_act; originals are never deletable,
        # which matters with incremental add_clause interleaved between solves
        act = self.cla_act.get(ci)
        if act is None:
            return
        self.cla_act[ci] = act + self.cla_inc
        if self.cla_act[ci] > 1e20:
            for k in self.cla_act:
                self.cla_act[k] *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl: list[int]) -> tuple[list[int], int]:
        learnt = [0]
        counter = 0
        p = 0
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        touched = []
        c = confl
        while True:
            for q in c:
                if q == p:
                    continue
                v = abs(q)
                if not self.seen[v] and self.level[v] > 0:
                    self.seen[v] = True
                    touched.append(v)
                    self._bump_var(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not self.seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = abs(p)
            self.seen[v] = False
            counter -= 1
            if counter == 0:
                break
            ci = self.reason[v]
            self._bump_clause(ci)
            c = self.clauses[ci]
        learnt[0] = -p
        for v in touched:
            self.seen[v] = False
        if len(learnt) == 1:
            bt = 0
        else:
            # move the second-highest-level literal to position 1
            mi = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = self.level[abs(learnt[1])]
        return learnt, bt

    def _record_learnt(self, learnt: list[int]):
        if len(learnt) == 1:
            self._enqueue(learnt[0], -1)
            return
        ci = len(self.clauses)
        self.clauses.append(learnt)
        self.n_learnts += 1
        self.cla_act[ci] = self.cla_inc
        self.watches[self._enc(learnt[0])].append(ci)
        self.watches[self._enc(learnt[1])].append(ci)
        self._enqueue(learnt[0], ci)

    def _reduce_db(self):
        locked = {self.reason[abs(lit)] for lit in self.trail}
        cand = [ci for ci in self.cla_act
                if ci not in self.deleted and ci not in locked
                and len(self.clauses[ci]) > 2]
        if len(cand) < 2000:
            return
        cand.sort(key=lambda ci: self.cla_act[ci])
        for ci in cand[: len(cand) // 2]:
            self.deleted.add(ci)
            del self.cla_act[ci]

    # -- search -------------------------------------------------------------------

    def _decide(self) -> int | None:
        # lazy heap: entries may carry stale priorities, which only skews
        # pick order, never correctness or determinism
        while self.heap:
            _, v = heappop(self.heap)
            if self.assign[v] == 0:
                return v
        for v in range(1, len(self.assign)):
            if self.assign[v] == 0:
                return v
        return None

    def solve(self, assumptions=(), deadline: float | None = None) -> str:
        """Returns 'sat', 'unsat', or 'timeout'."""
        if not self.ok:
            return "unsat"
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return "unsat"
        assumptions = list(assumptions)
        conflicts_here = 0
        decisions = 0
        restart_n = 1
        limit = _luby(restart_n) * self.RESTART_BASE
        check_mask = 63
        while True:
            confl = self._propagate()
            if confl is not None:
                self.n_conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    self.ok = False
                    return "unsat"
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                self._record_learnt(learnt)
                self.var_inc *= self.VAR_DECAY
                self.cla_inc *= self.CLA_DECAY
                if self.n_learnts and self.n_learnts % 8192 == 0:
                    self._reduce_db()
                if (conflicts_here & check_mask) == 0 and deadline is not None \
                        and time.perf_counter() > deadline:
                    self._cancel_until(0)
                    return "timeout"
                continue
            if conflicts_here >= limit:
                conflicts_here = 0
                restart_n += 1
                limit = _luby(restart_n) * self.RESTART_BASE
                self._cancel_until(0)
                if deadline is not None and time.perf_counter() > deadline:
                    return "timeout"
                continue
            if len(self.trail_lim) < len(assumptions):
                a = assumptions[len(self.trail_lim)]
                self.ensure_vars(abs(a))
                v = self.lit_value(a)
                if v == 1:
                    self.trail_lim.append(len(self.trail))
                    continue
                if v == -1:
                    self._cancel_until(0)
                    return "unsat"
                self.trail_lim.append(len(self.trail))
                self._enqueue(a, -1)
                continue
            v = self._decide()
            if v is None:
                self._verify_model(assumptions)
                self._model = self.assign.copy()
                return "sat"
            decisions += 1
            if (decisions & 1023) == 0 and deadline is not None \
                    and time.perf_counter() > deadline:
                self._cancel_until(0)
                return "timeout"
            lit = v if self.phase[v] >= 0 else -v
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def _verify_model(self, assumptions):
        for lit in assumptions:
            if self.lit_value(lit) != 1:
                raise SemiformError("model does not satisfy an assumption")
        for ci, c in enumerate(self.clauses):
            if ci in self.deleted:
                continue
            if all(self.lit_value(lit) == -1 for lit in c):
                raise SemiformError(f"model leaves clause {ci} unsatisfied")

    def model_value(self, lit: int) -> bool:
        """Value of `lit` in the most recent satisfying assignment."""
        v = abs(lit)
        a = self._model[v] if v < len(self._model) else 0
        return (a == 1) if lit > 0 else (a != 1)  # unassigned vars read false


# ---------------------------------------------------------------------------
# one-shot interface


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for c in self.clauses:
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")


@dataclass(frozen=True)
class SolveOutcome:
    status: str  # "SAT" | "UNSAT" | "TIMEOUT"
    model: dict[int, bool] | None
    elapsed: float


def solve(cnf: Cnf, assumptions=(), budget: float | None = None,
          seed: int = 0) -> SolveOutcome:
    """Solve a CNF; `seed` is accepted for interface parity and unused."""
    start = time.perf_counter()
    ext = os.environ.get("SEMIFORM_SAT_CMD")
    if ext:
        return _solve_external(cnf, assumptions, budget, ext, start)
    s = Solver()
    s.ensure_vars(cnf.num_vars)
    for c in cnf.clauses:
        if not s.add_clause(list(c)):
            return SolveOutcome("UNSAT", None, time.perf_counter() - start)
    deadline = None if budget is None else start + budget
    res = s.solve(assumptions, deadline)
    elapsed = time.perf_counter() - start
    if res == "sat":
        model = {v: s.model_value(v) for v in range(1, cnf.num_vars + 1)}
        return SolveOutcome("SAT", model, elapsed)
    return SolveOutcome("UNSAT" if res == "unsat" else "TIMEOUT", None, elapsed)


def _solve_external(cnf, assumptions, budget, cmd, start) -> SolveOutcome:
    """Shell out to a DIMACS solver; SAT models are re-verified locally."""
    text = export_dimacs(Cnf(cnf.num_vars, cnf.clauses + tuple(
        (a,) for a in assumptions)))
    argv = [cmd] if shutil.which(cmd) else cmd.split()
    try:
        proc = subprocess.run(argv, input=text, capture_output=True,
                              text=True, timeout=budget)
    except subprocess.TimeoutExpired:
        return SolveOutcome("TIMEOUT", None, time.perf_counter() - start)
    out = proc.stdout
    if "UNSAT" in out.upper():
        return SolveOutcome("UNSAT", None, time.perf_counter() - start)
    model: dict[int, bool] = {}
    for tok in out.split():
        try:
            lit = int(tok)
        except ValueError:
            continue
        if lit != 0 and abs(lit) <= cnf.num_vars:
            model[abs(lit)] = lit > 0
    for v in range(1, cnf.num_vars + 1):
        model.setdefault(v, False)
    for c in cnf.clauses:
        if not any(model[abs(lit)] == (lit > 0) for lit in c):
            raise SemiformError("external solver returned an invalid model")
    for a in assumptions:
        if model[abs(a)] != (a > 0):
            raise SemiformError("external solver violated an assumption")
    return SolveOutcome("SAT", model, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# DIMACS


def export_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for c in cnf.clauses:
        lines.append(" ".join(str(lit) for lit in c) + " 0")
    return "\n".join(lines) + "\n"


def import_dimacs(text: str) -> Cnf:
    num_vars = None
    expected = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad DIMACS header {line!r}", ln, 1)
            try:
                num_vars, expected = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"bad DIMACS header {line!r}", ln, 1) from None
            continue
        if num_vars is None:
            raise ParseError("clause before DIMACS header", ln, 1)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", ln, 1) from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                if abs(lit) > num_vars:
                    raise ParseError(f"literal {lit} out of range", ln, 1)
                cur.append(lit)
    if num_vars is None:
        raise ParseError("missing DIMACS header", 1, 1)
    if cur:
        clauses.append(tuple(cur))
    if expected is not None and len(clauses) != expected:
        raise ParseError(
            f"header declares {expected} clauses, found {len(clauses)}", 1, 1)
    return Cnf(num_vars, tuple(clauses))
