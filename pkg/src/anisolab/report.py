"""Structured verdicts for sampled condition checks."""

from __future__ import annotations

from dataclasses import dataclass, field


PASS = "pass"
FAIL = "fail"
INDETERMINATE = "indeterminate"


@dataclass
class ConditionReport:
    """Outcome of a sampled structural-condition check.

    A failing report always carries a witness: the concrete input realizing
    the worst violation.  ``indeterminate`` means every sample fell inside the
    exclusion band, so the check saw no informative data.
    """

    condition_id: str
    verdict: str
    max_violation: float
    tolerance: float
    witness: tuple | None = None
    samples_skipped: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, INDETERMINATE):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("failing report requires a witness")

    @property
    def passed(self):
        return self.verdict == PASS

    def summary(self):
        lines = [
            f"condition : {self.condition_id}",
            f"verdict   : {self.verdict}",
            f"violation : {self.max_violation:.6e} (tolerance {self.tolerance:.1e})",
            f"skipped   : {self.samples_skipped}",
        ]
        if self.witness is not None:
            lines.append(f"witness   : {self.witness}")
        for key, value in self.details.items():
            lines.append(f"{key:<10}: {value}")
        return "\n".join(lines)
