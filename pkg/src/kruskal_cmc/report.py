"""Verification report data structures."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    """One verification check: a measured worst case against a tolerance."""

    name: str
    passed: bool
    worst_value: float
    worst_location: str
    tolerance: float

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed,
                "worst_value": self.worst_value,
                "worst_location": self.worst_location,
                "tolerance": self.tolerance}


@dataclass
class VerificationReport:
    """A bundle of check records; passes iff every record passes."""

    records: list[CheckRecord] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(rec.passed for rec in self.records)

    def add(self, name: str, passed: bool, worst_value: float,
            worst_location: str, tolerance: float) -> CheckRecord:
        rec = CheckRecord(name=name, passed=bool(passed),
                          worst_value=float(worst_value),
                          worst_location=str(worst_location),
                          tolerance=float(tolerance))
        self.records.append(rec)
        return rec

    def extend(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)

    def as_dict(self) -> dict:
        return {"overall_pass": self.overall_pass,
                "checks": [rec.as_dict() for rec in self.records]}
