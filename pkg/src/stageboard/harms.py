"""Stage-centered harm evaluations and the sociotechnical rating rubric.

Evaluations are free-text problem descriptions attached to plan blocks.
Ratings score severity and likelihood on a 4-point scale under a fixed
harm taxonomy; the rubric's per-row ranges are advisory, not hard limits.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path

from .errors import OutOfRange, TaxonomyMismatch, UnknownSpecificHarm
from .plan import StageKind
from .textrecords import parse_records

RATING_MIN = 1
RATING_MAX = 4


class HarmType(str, Enum):
    REPRESENTATIONAL = "Representational"
    ALLOCATIVE = "Allocative"
    INTERPERSONAL = "Interpersonal"
    SOCIAL_SYSTEM = "SocialSystem"

    @property
    def display_name(self) -> str:
        names = {
            HarmType.REPRESENTATIONAL: "Representational Harms",
            HarmType.ALLOCATIVE: "Allocative Harms",
            HarmType.INTERPERSONAL: "Interpersonal Harms",
            HarmType.SOCIAL_SYSTEM: "Social System Harms",
        }
        return names[self]


@dataclass(frozen=True)
class HarmRating:
    severity: int
    likelihood: int
    harm_type: HarmType
    specific_harm: str

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "likelihood": self.likelihood,
            "harm_type": self.harm_type.value,
            "specific_harm": self.specific_harm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HarmRating":
        return cls(
            severity=int(d["severity"]),
            likelihood=int(d["likelihood"]),
            harm_type=HarmType(d["harm_type"]),
            specific_harm=d["specific_harm"],
        )


@dataclass(frozen=True)
class HarmEvaluation:
    eval_id: str
    block_id: str
    author: str
    text: str
    created_at: str
    rating: HarmRating | None = None

    def with_rating(self, rating: HarmRating) -> "HarmEvaluation":
        return replace(self, rating=rating)

    def to_dict(self) -> dict:
        return {
            "eval_id": self.eval_id,
            "block_id": self.block_id,
            "author": self.author,
            "text": self.text,
            "created_at": self.created_at,
            "rating": self.rating.to_dict() if self.rating else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HarmEvaluation":
        rating = d.get("rating")
        return cls(
            eval_id=d["eval_id"],
            block_id=d["block_id"],
            author=d["author"],
            text=d["text"],
            created_at=d["created_at"],
            rating=HarmRating.from_dict(rating) if rating else None,
        )


@dataclass(frozen=True)
class RubricEntry:
    harm_type: HarmType
    specific_harm: str
    severity_range: tuple[int, int]  # inclusive
    likelihood_range: tuple[int, int]
    example: str

    def to_dict(self) -> dict:
        return {
            "harm_type": self.harm_type.value,
            "specific_harm": self.specific_harm,
            "severity_range": list(self.severity_range),
            "likelihood_range": list(self.likelihood_range),
            "example": self.example,
        }


@dataclass(frozen=True)
class RubricAdvisory:
    """Non-blocking guidance from check_against_rubric."""

    in_range: bool
    warnings: tuple[str, ...]
    severity_range: tuple[int, int]
    likelihood_range: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "in_range": self.in_range,
            "warnings": list(self.warnings),
            "severity_range": list(self.severity_range),
            "likelihood_range": list(self.likelihood_range),
        }


def _parse_range(text: str) -> tuple[int, int]:
    if "-" in text:
        lo, hi = (int(part) for part in text.split("-", 1))
    else:
        lo = hi = int(text)
    if not (RATING_MIN <= lo <= hi <= RATING_MAX):
        raise ValueError(f"rubric range {text!r} outside {RATING_MIN}..{RATING_MAX}")
    return (lo, hi)


class Rubric:
    def __init__(self, entries: list[RubricEntry], version: str):
        self.entries = list(entries)
        self.version = version
        self._by_label: dict[str, RubricEntry] = {}
        for e in entries:
            if e.specific_harm in self._by_label:
                raise ValueError(f"duplicate rubric label {e.specific_harm!r}")
            self._by_label[e.specific_harm] = e

    @classmethod
    def from_text(cls, text: str, source: str = "<string>") -> "Rubric":
        parsed = parse_records(text, source=source)
        entries = [
            RubricEntry(
                harm_type=HarmType(rec["harm_type"]),
                specific_harm=rec["specific_harm"],
                severity_range=_parse_range(rec["severity"]),
                likelihood_range=_parse_range(rec["likelihood"]),
                example=rec["example"],
            )
            for rec in parsed.records
        ]
        return cls(entries, version=parsed.meta.get("rubric-version", "0"))

    @classmethod
    def from_file(cls, path: str | Path) -> "Rubric":
        p = Path(path)
        return cls.from_text(p.read_text(encoding="utf-8"), source=str(p))

    def entry(self, specific_harm: str) -> RubricEntry:
        try:
            return self._by_label[specific_harm]
        except KeyError:
            raise UnknownSpecificHarm(f"no rubric row for {specific_harm!r}")

    def labels_for(self, harm_type: HarmType) -> list[str]:
        return [e.specific_harm for e in self.entries if e.harm_type == harm_type]

    def validate_rating(self, rating: HarmRating) -> None:
        """Hard validation applied at write time: scale bounds and taxonomy."""
        for field_name, value in (("severity", rating.severity), ("likelihood", rating.likelihood)):
            if not (RATING_MIN <= value <= RATING_MAX):
                raise OutOfRange(
                    f"{field_name} must be in {RATING_MIN}..{RATING_MAX}, got {value}"
                )
        entry = self._by_label.get(rating.specific_harm)
        if entry is None or entry.harm_type != rating.harm_type:
            raise TaxonomyMismatch(
                f"{rating.specific_harm!r} is not a {rating.harm_type.display_name} label"
            )

    def check_against_rubric(self, rating: HarmRating) -> RubricAdvisory:
        """Advisory range check; out-of-range values warn but never block."""
        entry = self.entry(rating.specific_harm)
        warnings = []
        slo, shi = entry.severity_range
        llo, lhi = entry.likelihood_range
        if not (slo <= rating.severity <= shi):
            expected = str(slo) if slo == shi else f"{slo}-{shi}"
            warnings.append(
                f"severity {rating.severity} outside the rubric range {expected} for {entry.specific_harm!r}"
            )
        if not (llo <= rating.likelihood <= lhi):
            expected = str(llo) if llo == lhi else f"{llo}-{lhi}"
            warnings.append(
                f"likelihood {rating.likelihood} outside the rubric range {expected} for {entry.specific_harm!r}"
            )
        return RubricAdvisory(
            in_range=not warnings,
            warnings=tuple(warnings),
            severity_range=entry.severity_range,
            likelihood_range=entry.likelihood_range,
        )


def evaluations_sorted(evaluations) -> list[HarmEvaluation]:
    """Stable listing order: creation time, then id."""
    return sorted(evaluations, key=lambda e: (e.created_at, e.eval_id))


def default_rubric_path() -> Path:
    return Path(resources.files("stageboard") / "data" / "harm_rubric.txt")


_default: Rubric | None = None


def default_rubric() -> Rubric:
    global _default
    if _default is None:
        _default = Rubric.from_file(default_rubric_path())
    return _default
