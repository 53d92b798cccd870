"""Comparison verdicts shared by the production comparator and the oracle."""

from __future__ import annotations

from enum import Enum


class Verdict(Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"
    UNKNOWN = "Unknown"

    @classmethod
    def from_sign(cls, s: int) -> "Verdict":
        return cls.LESS if s < 0 else cls.GREATER if s > 0 else cls.EQUAL

    def sign(self) -> int:
        if self is Verdict.UNKNOWN:
            raise ValueError("Unknown has no sign")
        return {Verdict.LESS: -1, Verdict.EQUAL: 0, Verdict.GREATER: 1}[self]

    def flip(self) -> "Verdict":
        return {Verdict.LESS: Verdict.GREATER, Verdict.GREATER: Verdict.LESS}.get(self, self)

    def __str__(self) -> str:
        return self.value
