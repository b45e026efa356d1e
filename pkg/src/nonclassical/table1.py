"""Published generalized-binomial-state witness table and its reproduction."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .states import make_gbs
from .witnesses import hoa_d, hos_shm, hosps_dh

COLUMNS = (("hoa", 3), ("hoa", 5), ("hosps", 3), ("hosps", 5), ("hos", 4), ("hos", 6))

# (alpha, beta, N) -> printed values in column order.  One entry is printed
# as "-3.46.43"; it is read as -346.43.
PUBLISHED = {
    (5.0, 30.0, 30): ("346.68", "2.4e4", "97.69", "6.4e3", "1.18", "2.16"),
    (30.0, 5.0, 30): ("-6.5e4", "-9e7", "-1.7e3", "-2.4e5", "39.54", "2724.10"),
    (5.0, 5.0, 5): ("-27.98", "-244.14", "-14.96", "-361", "1.39", "20.03"),
    (30.0, 30.0, 30): ("-5.57e3", "-3e6", "-3.46.43", "-3.9e4", "-0.47", "-0.59"),
}
TYPO_READINGS = {"-3.46.43": "-346.43"}


def significant_digits(text: str) -> int:
    mantissa = text.lstrip("+-").lower().split("e")[0]
    digits = mantissa.replace(".", "").lstrip("0")
    return len(digits)


def tolerance_for(text: str) -> float:
    """Relative tolerance scaled to printed precision: 1%, 2% or 5%."""
    digits = significant_digits(text)
    if digits >= 3:
        return 0.01
    if digits == 2:
        return 0.02
    return 0.05


def truncates_to(value: float, text: str) -> bool:
    """Whether ``value`` cut (not rounded) to the printed digits gives the printed number."""
    printed = float(text)
    digits = significant_digits(text)
    if printed == 0 or value == 0 or math.copysign(1, value) != math.copysign(1, printed):
        return False
    scale = 10 ** (math.floor(math.log10(abs(printed))) - digits + 1)
    return math.isclose(math.trunc(value / scale) * scale, printed, rel_tol=1e-9)


@dataclass(frozen=True)
class Table1Entry:
    alpha: float
    beta: float
    N: int
    witness: str
    order: int
    printed: str
    published_value: float
    computed: float
    tolerance: float
    typo: bool

    @property
    def column(self) -> str:
        return {"hoa": "d", "hosps": "dh", "hos": "SHM"}[self.witness] + f"({self.order})"

    @property
    def rel_deviation(self) -> float:
        return abs(self.computed - self.published_value) / abs(self.published_value)

    @property
    def passed(self) -> bool:
        return self.rel_deviation <= self.tolerance

    @property
    def truncation_consistent(self) -> bool:
        return truncates_to(self.computed, self.published_text)

    @property
    def published_text(self) -> str:
        return TYPO_READINGS.get(self.printed, self.printed)


_EVALUATORS = {"hoa": hoa_d, "hosps": hosps_dh, "hos": hos_shm}


def reproduce_table1() -> list[Table1Entry]:
    entries = []
    for (alpha, beta, N), printed_row in PUBLISHED.items():
        state = make_gbs(alpha, beta, N)
        for (witness, order), printed in zip(COLUMNS, printed_row):
            text = TYPO_READINGS.get(printed, printed)
            entries.append(
                Table1Entry(
                    alpha, beta, N, witness, order, printed, float(text),
                    _EVALUATORS[witness](state, order), tolerance_for(text),
                    printed in TYPO_READINGS,
                )
            )
    return entries


def format_table(entries: list[Table1Entry]) -> str:
    header = (
        f"{'alpha':>6} {'beta':>5} {'N':>3}  {'col':<7} {'published':>10} {'computed':>14} "
        f"{'rel.dev':>8} {'tol':>5}  status"
    )
    lines = [header, "-" * len(header)]
    for e in entries:
        status = "ok" if e.passed else "MISMATCH"
        if not e.passed and e.truncation_consistent:
            status += " (published value is the computed one truncated)"
        if e.typo:
            status += f" [typo in published table: printed {e.printed!r}, read as {e.published_text}]"
        lines.append(
            f"{e.alpha:>6g} {e.beta:>5g} {e.N:>3d}  {e.column:<7} {e.published_text:>10} "
            f"{e.computed:>14.6g} {100 * e.rel_deviation:>7.2f}% {100 * e.tolerance:>4.0f}%  {status}"
        )
    return "\n".join(lines)
