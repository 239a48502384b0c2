"""Register ranking by structural fan-out influence.

Scores each software-visible register by how much downstream logic its
value can steer: a weighted sum of the distinct combinational paths
leaving the register and the logic elements inside its fan-out cone.
Path weight dominates element weight (100:1 by default) so a register
feeding many separate control decisions outranks one feeding a single
wide datapath blob.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExhaustedRegisters, UnknownRegister
from .netlist import FanoutCone, FlatModel, fanout_cone


@dataclass(frozen=True)
class CorScore:
    register: str
    paths: int
    elements: int
    score: int


@dataclass(frozen=True)
class RankedRegisters:
    """Registers in descending influence order; scores alongside."""

    order: tuple[str, ...]
    scores: tuple[CorScore, ...]

    def top(self, n: int) -> tuple[str, ...]:
        return self.order[:n]


def cor(model: FlatModel, register: str, w_paths: int = 100,
        w_elements: int = 1) -> CorScore:
    """Cone-of-influence score for one register of the flat model."""
    cone: FanoutCone = fanout_cone(model, register)
    score = w_paths * cone.paths + w_elements * len(cone.elements)
    return CorScore(register, cone.paths, len(cone.elements), score)


def do_sra(model: FlatModel, mapped: tuple[str, ...] | list[str],
           w_paths: int = 100, w_elements: int = 1) -> RankedRegisters:
    """Rank the mapped (software-writable) registers of `model`.

    Highest score first; ties broken by register name so the order is
    reproducible.  Every name in `mapped` must be a register of the
    model (UnknownRegister otherwise).
    """
    known = set(model.registers)
    scores = []
    for name in mapped:
        if name not in known:
            raise UnknownRegister(f"not a register of this model: {name}")
        scores.append(cor(model, name, w_paths, w_elements))
    scores.sort(key=lambda s: (-s.score, s.register))
    return RankedRegisters(tuple(s.register for s in scores), tuple(scores))


def combine_regs(ranked: RankedRegisters, n: int,
                 already: tuple[str, ...] = ()) -> tuple[str, ...]:
    """Next `n` registers to pin, skipping ones already constrained.

    Raises ExhaustedRegisters when the ranking has nothing left to give,
    which is the caller's signal to stop iterating on this block.
    """
    taken = set(already)
    fresh = [r for r in ranked.order if r not in taken]
    if not fresh:
        raise ExhaustedRegisters(
            f"all {len(ranked.order)} ranked registers already constrained")
    return tuple(fresh[:n])
