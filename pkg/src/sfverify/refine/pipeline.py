"""End-to-end verification: relation synthesis, derivation, simplification,
structural matching, and co-simulation, aggregated into one verdict.

Structural matching and co-simulation are independent checks: a match
failure does not stop co-simulation, which can still produce a concrete
counterexample trace (or, conversely, evidence that the mismatch is
behaviourally invisible on the sampled traces). A conformance failure —
the program does not fit the architectural pattern the relation needs —
stops the pipeline, since nothing downstream is defined without it.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..chart.model import ChartDef
from ..impl.ir import ImplProgram, check_program
from ..impl.stepbuilder import UnsupportedFeature
from ..retrieve import ConformanceError, synthesize
from .cosim import CosimConfig, CosimReport, cosimulate
from .derive import PhaseEntry, derive_step
from .match import Divergence, MatchResult, structure_match
from .simplify import simplify


@dataclass(frozen=True)
class Verdict:
    outcome: str  # PASS | FAIL | NONCONFORMANT
    mode: str
    matched_functions: dict[str, str]
    first_divergence: Divergence | None
    assumptions: tuple[str, ...]
    normalizations: tuple[str, ...]
    phase_log: tuple[PhaseEntry, ...]
    cosim: CosimReport | None
    nonconformance: tuple[str, str] | None  # (phase, message)

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "mode": self.mode,
            "matched_functions": dict(self.matched_functions),
            "first_divergence": self.first_divergence.as_dict() if self.first_divergence else None,
            "assumptions": list(self.assumptions),
            "normalizations": list(self.normalizations),
            "phase_log": [list(e) for e in self.phase_log],
            "cosim": self.cosim.as_dict() if self.cosim else None,
            "nonconformance": list(self.nonconformance) if self.nonconformance else None,
        }


def _nonconformant(phase: str, message: str) -> Verdict:
    return Verdict(
        outcome="NONCONFORMANT",
        mode="",
        matched_functions={},
        first_divergence=None,
        assumptions=(),
        normalizations=(),
        phase_log=(),
        cosim=None,
        nonconformance=(phase, message),
    )


def verify(
    c: ChartDef,
    p: ImplProgram,
    cfg: CosimConfig = CosimConfig(),
    mode: str = "normalized",
    depth: int = 64,
    machine_factory=None,
) -> Verdict:
    """PASS iff the structural match is total and co-simulation is clean."""
    if machine_factory is None:
        from ..kernel import machine_for as machine_factory
    problems = check_program(p)
    if problems:
        return _nonconformant("structuring", "; ".join(problems))
    try:
        r = synthesize(c, p)
    except ConformanceError as e:
        return _nonconformant("data-refinement", str(e))
    try:
        d = simplify(derive_step(c, r), r)
    except UnsupportedFeature as e:
        return _nonconformant("normalisation", str(e))

    m: MatchResult = structure_match(d, p, mode, depth)
    rep: CosimReport = cosimulate(c, p, r, cfg, machine_factory)
    outcome = "PASS" if (m.outcome == "PASS" and rep.ok) else "FAIL"
    return Verdict(
        outcome=outcome,
        mode=m.mode,
        matched_functions=m.matched_functions,
        first_divergence=m.first_divergence,
        assumptions=m.assumptions,
        normalizations=m.normalizations,
        phase_log=m.phase_log,
        cosim=rep,
        nonconformance=None,
    )
