"""Verification reports: plain values carrying a verdict and witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    check: str
    ok: bool = True
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def fail(self, what: str, **witness):
        self.ok = False
        self.failures.append({"what": what, **witness})

    def merge(self, other: "Report", prefix: str = ""):
        for f in other.failures:
            self.fail(prefix + f["what"], **{k: v for k, v in f.items() if k != "what"})
        if other.details:
            self.details[other.check] = other.details
        return self

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"check": self.check, "ok": self.ok, "failures": self.failures,
                "details": self.details}
