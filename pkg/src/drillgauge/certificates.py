"""Machine-readable verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .constants import CONSTANTS_VERSION


class Verdict(str, Enum):
    CERTIFIED_HYPERBOLIC = "CertifiedHyperbolic"
    IN_HDS_REGION = "InHDSRegion"
    DRILLABLE = "Drillable"
    INCONCLUSIVE = "Inconclusive"

    @property
    def positive(self) -> bool:
        return self is not Verdict.INCONCLUSIVE


@dataclass
class Certificate:
    """A verdict with the thresholds and measured numbers that justify it.

    ``numbers`` holds measured or derived values, ``thresholds`` the constants
    they were compared against, ``enclosures`` optional interval data such as
    a cone-family summary.  Only ``Inconclusive`` is ever a negative outcome.
    """

    verdict: Verdict
    subject: dict = field(default_factory=dict)
    numbers: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    enclosures: dict = field(default_factory=dict)
    provenance: list = field(default_factory=list)
    constants_version: str = CONSTANTS_VERSION

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "subject": self.subject,
            "numbers": self.numbers,
            "thresholds": self.thresholds,
            "enclosures": self.enclosures,
            "provenance": list(self.provenance),
            "paper_constants_version": self.constants_version,
        }
