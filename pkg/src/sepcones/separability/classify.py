"""Which semidefinite cone describes the separable cone of a tensor product space."""
from __future__ import annotations

from dataclasses import dataclass

SPACES = ("SS", "HH", "HS", "QS")
ANSWERS = ("PSD", "PPT", "N")
SPACE_NAMES = {
    "SS": "S+(m) (x) S+(n)",
    "HH": "H+(m) (x) H+(n)",
    "HS": "H+(m) (x) S+(n)",
    "QS": "Q+(m) (x) S+(n)",
}

# rows m = 2, 3, >=4; columns n = 2, 3, >=4
TABLES = {
    "SS": (("PSD", "PSD", "PSD"), ("PSD", "N", "N"), ("PSD", "N", "N")),
    "HH": (("PPT", "PPT", "N"), ("PPT", "N", "N"), ("N", "N", "N")),
    "HS": (("PSD", "PSD", "N"), ("PSD", "N", "N"), ("PSD", "N", "N")),
    "QS": (("PSD", "PPT", "N"), ("PSD", "N", "N"), ("PSD", "N", "N")),
}
LABELS = ("2", "3", ">=4")


@dataclass(frozen=True)
class ClassificationEntry:
    space: str
    m: int
    n: int
    answer: str


def classify(space: str, m: int, n: int) -> str:
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if min(m, n) == 1:
        return "PSD"
    if space == "SS":
        return "PSD" if min(m, n) <= 2 else "N"
    if space == "HH":
        return "PPT" if m + n <= 5 else "N"
    if space == "HS":
        return "PSD" if n <= 2 or m + n <= 5 else "N"
    if n <= 2:
        return "PSD"
    return "PPT" if m <= 2 and m + n <= 5 else "N"


def entry(space: str, m: int, n: int) -> ClassificationEntry:
    return ClassificationEntry(space, m, n, classify(space, m, n))


def render(space: str, source: str = "rules") -> str:
    """The 3x3 table for space, from the stored cells or from classify."""
    corner = "m\\n"
    rows = [f"{corner:>4} | " + " | ".join(f"{c:>4}" for c in LABELS)]
    rows.append("-" * len(rows[0]))
    for i, ml in enumerate(LABELS):
        cells = TABLES[space][i] if source == "stored" else tuple(
            classify(space, i + 2, j + 2) for j in range(3))
        rows.append(f"{ml:>4} | " + " | ".join(f"{c:>4}" for c in cells))
    return SPACE_NAMES[space] + "\n" + "\n".join(rows)


def diff(max_mn: int = 8) -> list[str]:
    """Cells where classify disagrees with the stored tables (the >=4 cells checked up to max_mn)."""
    out = []
    for space in SPACES:
        for m in range(1, max_mn + 1):
            for n in range(1, max_mn + 1):
                want = "PSD" if min(m, n) == 1 else TABLES[space][min(m, 4) - 2][min(n, 4) - 2]
                got = classify(space, m, n)
                if got != want:
                    out.append(f"{space} ({m},{n}): table {want}, classify {got}")
    return out
