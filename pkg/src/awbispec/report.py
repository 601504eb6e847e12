"""Machine-readable check reports.

Every report stores enough to recompute its own pass flag: exact checks
compare the observed/expected strings, numeric checks compare parsed
floats against the stored absolute tolerance.  Formatting is canonical
(rationals as fraction strings, floats with 17 significant digits) so
that equal runs serialize byte-identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

__all__ = ["CheckReport", "fmt_float", "digest_inputs"]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def digest_inputs(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class CheckReport:
    name: str
    inputs: str  # digest of the canonical inputs JSON
    observed: str
    expected: str
    tolerance: float | None  # None means exact comparison
    passed: bool

    @classmethod
    def exact(cls, name: str, inputs_obj, observed: str, expected: str) -> "CheckReport":
        return cls(
            name=name,
            inputs=digest_inputs(inputs_obj),
            observed=str(observed),
            expected=str(expected),
            tolerance=None,
            passed=str(observed) == str(expected),
        )

    @classmethod
    def numeric(
        cls, name: str, inputs_obj, observed: float, expected: float, tolerance: float
    ) -> "CheckReport":
        return cls(
            name=name,
            inputs=digest_inputs(inputs_obj),
            observed=fmt_float(observed),
            expected=fmt_float(expected),
            tolerance=float(tolerance),
            passed=abs(float(observed) - float(expected)) <= float(tolerance),
        )

    def recomputed_pass(self) -> bool:
        if self.tolerance is None:
            return self.observed == self.expected
        return abs(float(self.observed) - float(self.expected)) <= self.tolerance

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "observed": self.observed,
            "expected": self.expected,
            "exact": self.tolerance is None,
            "tolerance": None if self.tolerance is None else fmt_float(self.tolerance),
            "pass": self.passed,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CheckReport":
        return cls(
            name=obj["name"],
            inputs=obj["inputs"],
            observed=obj["observed"],
            expected=obj["expected"],
            tolerance=None if obj["exact"] else float(obj["tolerance"]),
            passed=bool(obj["pass"]),
        )
