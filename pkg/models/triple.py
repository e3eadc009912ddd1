from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Triple:
    """One task instance: does `attribute` tell `term1` apart from `term2`?"""

    term1: str
    term2: str
    attribute: str
    label: Optional[int] = None  # 1 = discriminative, 0 = not, None = unlabeled

    def __post_init__(self):
        for name in ("term1", "term2", "attribute"):
            if not getattr(self, name).strip():
                raise ValueError(f"Triple.{name} must be non-empty")
        if self.label not in (None, 0, 1):
            raise ValueError(f"Triple.label must be 0, 1 or None, got {self.label!r}")

    @property
    def key(self) -> tuple:
        """Identity used to align predictions with gold rows."""
        return (self.term1, self.term2, self.attribute)

    @property
    def is_labeled(self) -> bool:
        return self.label is not None

    def swapped(self) -> "Triple":
        """Same triple with term1 and term2 exchanged (label dropped)."""
        return Triple(self.term2, self.term1, self.attribute)

    def __str__(self) -> str:
        label_str = "" if self.label is None else f" -> {self.label}"
        return f"({self.term1}, {self.term2}, {self.attribute}){label_str}"


@dataclass(frozen=True)
class PredictionRecord:
    """Classifier output for one triple."""

    triple: Triple
    predicted: int
    decision_score: float

    def __post_init__(self):
        if (self.decision_score > 0) != (self.predicted == 1):
            raise ValueError(
                f"Decision score {self.decision_score} inconsistent with prediction {self.predicted}"
            )

    def as_row(self) -> list:
        """CSV row: term1, term2, attribute, predicted."""
        return [self.triple.term1, self.triple.term2, self.triple.attribute, str(self.predicted)]
