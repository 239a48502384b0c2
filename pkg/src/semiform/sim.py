"""Three-valued cycle-accurate simulation of a FlatModel.

The simulator drives an ESW transaction script through the design's bus
decoder description, watching for points of interest (script statements
that touch ranked registers) and capturing fully-known register values.
Values are 0/1/X with pessimistic X-propagation (see kernels).

Bus model: one statement per cycle.  A write forces the matched range's
address/data/enable nets for that cycle; all other ranges idle at zero.
Nets forced this way override their hardware drivers for the cycle, the
usual testbench force semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BusDecodeError, UnknownRegister
from .frontend import EswScript, RegisterMap
from .netlist import Design, FlatModel

X = 2


@dataclass(frozen=True)
class SimState:
    cycle: int
    values: np.ndarray  # uint8 per net, post-latch
    script_pc: int


@dataclass(frozen=True)
class PoiSet:
    watched: tuple[tuple[int, int, str], ...]  # (statement index, address, register)

    def statement_indices(self) -> frozenset[int]:
        return frozenset(i for i, _, _ in self.watched)


@dataclass(frozen=True)
class CapturedValues:
    values: dict[str, int]  # register -> concrete value, X registers omitted
    cycle: int


@dataclass(frozen=True)
class Triggered:
    state: SimState
    poi: tuple[int, int, str]


@dataclass(frozen=True)
class ScriptEnded:
    state: SimState


def set_pois(regmap: RegisterMap, ranked: list[str], script: EswScript) -> PoiSet:
    """Watch every script access whose address maps to a ranked register."""
    known = set(regmap.registers())
    for r in ranked:
        if r not in known:
            raise UnknownRegister(f"{r} is not in the register map")
    ranked_set = set(ranked)
    watched = []
    for i, _, addr in script.accesses():
        reg = regmap.register_at(addr)
        if reg in ranked_set:
            watched.append((i, addr, reg))
    return PoiSet(tuple(watched))


class Simulator:
    """Stateful simulation session over one immutable model."""

    def __init__(self, model: FlatModel, design: Design | None = None,
                 script: EswScript | None = None, trace_path=None):
        self.model = model
        self.design = design
        self.script = script
        self.cm = model.compile()
        self.values = np.full(self.cm.n_nets, X, dtype=np.uint8)
        self.frame = self.values.copy()  # pre-latch snapshot of last cycle
        self.locked = np.zeros(self.cm.n_nets, dtype=bool)
        self.cycle = 0
        self.script_pc = 0
        self.warnings: list = []
        self._trace_path = trace_path
        self._trace_file = None
        self._trace_last = None
        self.values[self.cm.const_idx] = self.cm.const_val
        self.values[self.cm.dff_q] = self.cm.dff_init
        self._ranges = self._resolve_ranges() if design is not None else []
        self._reset_bits = None
        if design is not None and design.bus.reset:
            self._reset_bits = self._resolve_ref(design.bus.reset, 1)

    # -- bus plumbing --------------------------------------------------------

    def _resolve_ref(self, ref: str, width_hint: int | None = None):
        """Net indices for a bus ref ('inst.port' or top port), LSB first.

        Returns None when the ref does not resolve in this model (for
        example the bus master is not part of a subsystem); such ranges
        are simply not driven.
        """
        try:
            bits = self.model.signal_bits(ref)
        except UnknownRegister:
            return None
        idx = []
        for b in bits:
            c = self.model.resolve(b)
            if c not in self.cm.index:
                return None
            idx.append(self.cm.index[c])
        return idx

    def _resolve_ranges(self):
        out = []
        for r in self.design.bus.ranges:
            addr = self._resolve_ref(r.addr_ref)
            wdata = self._resolve_ref(r.wdata_ref)
            we = self._resolve_ref(r.we_ref)
            if addr is None or wdata is None or we is None:
                out.append((r, None))
            else:
                out.append((r, (addr, wdata, we)))
        return out

    # -- core stepping -------------------------------------------------------

    def step(self, drive: dict[str, int] | None = None):
        """One cycle: force nets, settle combinational logic, latch flops.

        Returns the settled pre-latch frame (shared buffer; copy to keep).
        """
        idx_drive = {}
        if drive:
            for net, val in drive.items():
                idx_drive[self.cm.index[self.model.resolve(net)]] = val
        return self._step_indices(idx_drive)

    def _bus_drive(self, stmt) -> dict[str, int]:
        drive: dict[int, int] = {}

        def put(indices, value, width):
            for i, idx in enumerate(indices):
                drive[idx] = (value >> i) & 1 if i < width else 0

        rst = 1 if stmt[0] == "reset" else 0
        if self._reset_bits:
            put(self._reset_bits, rst, 1)
        target = None
        if stmt[0] in ("write", "read"):
            target = self.design.bus.range_for(stmt[1])
            if target is None:
                self.warnings.append(BusDecodeError(
                    f"access to 0x{stmt[1]:x} hits no bus range (cycle {self.cycle})"))
        for r, nets in self._ranges:
            if nets is None:
                continue
            addr_i, wdata_i, we_i = nets
            if target is not None and r is target:
                offset = stmt[1] - r.base
                put(addr_i, offset, len(addr_i))
                if stmt[0] == "write":
                    put(wdata_i, stmt[2], len(wdata_i))
                    put(we_i, 1, 1)
                else:
                    put(wdata_i, 0, len(wdata_i))
                    put(we_i, 0, 1)
            else:
                put(addr_i, 0, len(addr_i))
                put(wdata_i, 0, len(wdata_i))
                put(we_i, 0, 1)
        return drive

    def _step_indices(self, drive: dict[int, int]):
        cm = self.cm
        self.locked[:] = False
        for idx, val in drive.items():
            self.values[idx] = val
            self.locked[idx] = True
        kernels.eval_comb(cm.kinds, cm.i0, cm.i1, cm.i2, cm.outs,
                          cm.level_ptr, self.values, self.locked)
        np.copyto(self.frame, self.values)
        if self._trace_path is not None:
            self._dump_trace_cycle()
        self.values[cm.dff_q] = self.values[cm.dff_d]
        self.cycle += 1
        return self.frame

    def run_statement(self):
        """Execute script statement at pc (1..n cycles); advances pc."""
        stmt = self.script.statements[self.script_pc]
        cycles = stmt[1] if stmt[0] in ("reset", "wait") else 1
        drive = self._bus_drive(stmt)
        for _ in range(cycles):
            self._step_indices(drive)
        self.script_pc += 1

    def state(self) -> SimState:
        return SimState(self.cycle, self.values.copy(), self.script_pc)

    def restore(self, state: SimState):
        self.cycle = state.cycle
        self.script_pc = state.script_pc
        np.copyto(self.values, state.values)

    # -- observation ---------------------------------------------------------

    def net_value(self, net: str) -> int:
        return int(self.frame[self.cm.index[self.model.resolve(net)]])

    def register_value(self, register: str):
        """Concrete register value from current state, or None if any bit X."""
        reg = self.model.registers.get(register)
        if reg is None:
            raise UnknownRegister(f"no register {register}")
        v = 0
        for i, b in enumerate(reg.bits):
            bit = int(self.values[self.cm.index[self.model.resolve(b)]])
            if bit == X:
                return None
            v |= bit << i
        return v

    def _dump_trace_cycle(self):
        if self._trace_file is None:
            self._trace_file = open(self._trace_path, "w")
            self._trace_last = np.full_like(self.frame, 255)
        changed = np.nonzero(self.frame != self._trace_last)[0]
        for i in changed:
            v = self.frame[i]
            self._trace_file.write(
                f"{self.cycle} {self.cm.net_names[i]} {'x' if v == X else v}\n")
        np.copyto(self._trace_last, self.frame)

    def close(self):
        if self._trace_file is not None:
            self._trace_file.close()
            self._trace_file = None


def run_until_poi(sim: Simulator, pois: PoiSet,
                  from_state: SimState | None = None):
    """Advance statement by statement until a PoI completes or script ends."""
    if from_state is not None:
        sim.restore(from_state)
    watch = pois.statement_indices()
    by_stmt = {i: (i, a, r) for i, a, r in pois.watched}
    while sim.script_pc < len(sim.script.statements):
        pc = sim.script_pc
        sim.run_statement()
        if pc in watch:
            return Triggered(sim.state(), by_stmt[pc])
    return ScriptEnded(sim.state())


def collect_sim_values(sim: Simulator, registers: list[str]) -> CapturedValues:
    """Fully-known register values at the current pause point."""
    out = {}
    for r in registers:
        v = sim.register_value(r)
        if v is not None:
            out[r] = v
    return CapturedValues(values=out, cycle=sim.cycle)


# ---------------------------------------------------------------------------
# three-valued property evaluation over a frame of net values


def _bits3(model: FlatModel, cm, frame, e):
    sig, idx = e[1], e[2]
    bits = model.signal_bits(sig)
    if idx is not None:
        bits = (bits[idx],)
    return [int(frame[cm.index[model.resolve(b)]]) for b in bits]


_AND = kernels.AND3
_OR = kernels.OR3
_NOT = kernels.NOT3
_XOR = kernels.XOR3


def eval_expr3(model: FlatModel, frame, expr) -> int:
    """Evaluate a property expression to 0, 1, or X on one cycle's values."""
    cm = model.compile()

    def ev(e) -> int:
        k = e[0]
        if k == "int":
            return e[1]
        if k == "sig":
            return _bits3(model, cm, frame, e)[0]
        if k == "not":
            return int(_NOT[ev(e[1])])
        if k == "and":
            return int(_AND[ev(e[1]), ev(e[2])])
        if k == "or":
            return int(_OR[ev(e[1]), ev(e[2])])
        if k == "imp":
            return int(_OR[_NOT[ev(e[1])], ev(e[2])])
        if k in ("eq", "ne"):
            a, b = e[1], e[2]
            if a[0] == "int":
                a, b = b, a
            abits = _bits3(model, cm, frame, a)
            if b[0] == "int":
                bbits = [(b[1] >> i) & 1 for i in range(len(abits))]
            else:
                bbits = _bits3(model, cm, frame, b)
            acc = 1
            for x, y in zip(abits, bbits):
                acc = int(_AND[acc, _NOT[int(_XOR[x, y])]])
            return acc if k == "eq" else int(_NOT[acc])
        raise AssertionError(k)

    return ev(expr)


def violated_at(model: FlatModel, frame, prop, cycle: int) -> bool:
    """A property is violated only when it evaluates to a definite 0."""
    if prop.kind == "xprop":
        if cycle < (prop.settle or 0):
            return False
        reg = model.registers.get(prop.register)
        if reg is None:
            return False
        cm = model.compile()
        return any(int(frame[cm.index[model.resolve(b)]]) == X for b in reg.bits)
    return eval_expr3(model, frame, prop.expr) == 0
