"""Reconciliation of printed ledger identities against the definition.

Every row compares a printed formula with the value forced by

    C(m+2,3) + (k+1) a_{m,k} + b_{m,k} = C(k+3,3),  0 <= b_{m,k} <= k

over a range of m, and records the first disagreement if there is one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .postnum import ab, binom, closed_form

M_MAX = 60


@dataclass
class Row:
    label: str
    printed: str
    derived: str
    checked: str
    first_mismatch: str | None = None

    @property
    def consistent(self) -> bool:
        return self.first_mismatch is None

    @property
    def verdict(self) -> str:
        if self.consistent:
            return f"consistent for {self.checked}"
        return f"printed form inconsistent at {self.first_mismatch}"

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "printed": self.printed,
            "derived": self.derived,
            "checked": self.checked,
            "consistent": self.consistent,
            "verdict": self.verdict,
        }


def _scan(ms, printed: Callable[[int], object], derived: Callable[[int], object]) -> str | None:
    for m in ms:
        pv, dv = printed(m), derived(m)
        if pv != dv:
            return f"m={m}: {_fmt(pv)} vs {_fmt(dv)}"
    return None


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(str(x) for x in v) + ")"
    return str(v)


def _printed_ledger(m: int, k: int) -> tuple[int, int]:
    """(a, b) when the fat point term is read as C(m+1,3)."""
    rest = binom(k + 3, 3) - binom(m + 1, 3)
    return divmod(rest, k + 1)


def _cell(m: int, k: int) -> tuple[int, int]:
    c = ab(m, k)
    return c.a, c.b


def _eq2_lhs(m: int, k: int, b_index: int) -> int:
    c, c2 = ab(m, k), ab(m, k - 2)
    return 2 * c2.a + (k + 1) * (c.a - c2.a) + c.b - ab(m, b_index).b


def build_rows(m_max: int = M_MAX) -> list[Row]:
    ms = range(0, m_max + 1)
    ms1 = range(1, m_max + 1)
    rows: list[Row] = []

    first = None
    for m in ms:
        for k in range(max(m, 1), m + 41):
            if _printed_ledger(m, k) != _cell(m, k):
                first = f"m={m}, k={k}: {_fmt(_printed_ledger(m, k))} vs {_fmt(_cell(m, k))}"
                break
        if first:
            break
    rows.append(Row("ledger fat point term", "C(m+1,3)", "C(m+2,3)", f"m<={m_max}", first))

    first = None
    for m in range(0, 21):
        for k in range(m + 2, m + 41):
            got = _eq2_lhs(m, k, k + 1)
            if got != (k + 1) ** 2:
                first = f"m={m}, k={k}: {got} vs {(k + 1) ** 2}"
                break
        if first:
            break
    rows.append(Row("two-step recurrence, last b index", "b_{m,k+1}", "b_{m,k-2}", "m<=20, k<=m+40", first))

    def eq3(m: int, a_index: int) -> int:
        c, c1 = ab(m, m + 2), ab(m - 1, m + 1)
        return c1.a + (m + 3) * (c.a - ab(m - 1, a_index).a) + c.b - c1.b

    rows.append(
        Row(
            "shifted recurrence, second a index",
            "a_{m-1,m+2}",
            "a_{m-1,m+1}",
            f"1<=m<={m_max}",
            _scan(ms1, lambda m: eq3(m, m + 2), lambda m: 3 * m + 6),
        )
    )

    def eq4_lhs(m: int) -> int:
        c = ab(m, m + 2)
        return (m + 3) * c.a + c.b

    rows.append(
        Row(
            "(m+3)a_{m,m+2}+b_{m,m+2}",
            "(3m^2+15m+30)/2",
            "(3m^2+15m+20)/2",
            f"1<=m<={m_max}",
            _scan(ms1, lambda m: (3 * m * m + 15 * m + 30) // 2, eq4_lhs),
        )
    )

    rows.append(
        Row(
            "C(m+6,3)-C(m+2,3)",
            "2m^2+12m+10",
            "2m^2+12m+20",
            f"m<={m_max}",
            _scan(ms, lambda m: 2 * m * m + 12 * m + 10, lambda m: binom(m + 6, 3) - binom(m + 2, 3)),
        )
    )
    rows.append(
        Row(
            "C(m+7,3)-C(m+2,3)",
            "(5m^2+35m+70)/2",
            "same",
            f"m<={m_max}",
            _scan(ms, lambda m: (5 * m * m + 35 * m + 70) // 2, lambda m: binom(m + 7, 3) - binom(m + 2, 3)),
        )
    )

    rows.append(
        Row(
            "(a,b)_{m,m+1}",
            "(m+2,0)",
            "ab(m,m+1)",
            f"m<={m_max}",
            _scan(ms, lambda m: closed_form(m, 1), lambda m: _cell(m, m + 1)),
        )
    )
    evens = [m for m in ms if m % 2 == 0]
    odds = [m for m in ms if m % 2 == 1]
    rows.append(
        Row(
            "(a,b)_{m,m+2}, m even",
            "(3m/2+3,1)",
            "ab(m,m+2)",
            f"even m<={m_max}",
            _scan(evens, lambda m: closed_form(m, 2), lambda m: _cell(m, m + 2)),
        )
    )
    rows.append(
        Row(
            "(a,b)_{m,m+2}, m odd",
            "(3m/2+5/2,m/2+5/2)",
            "ab(m,m+2)",
            f"odd m<={m_max}",
            _scan(odds, lambda m: closed_form(m, 2), lambda m: _cell(m, m + 2)),
        )
    )
    rows.append(
        Row(
            "a_{m,m+2}-a_{m-1,m+1}",
            "2 (m even), 1 (m odd)",
            "ledger difference",
            f"3<=m<={m_max}",
            _scan(range(3, m_max + 1), lambda m: 2 if m % 2 == 0 else 1, lambda m: ab(m, m + 2).a - ab(m - 1, m + 1).a),
        )
    )
    rows.append(
        Row(
            "a_{m-1,m+1} > m",
            "true",
            "ledger",
            f"3<=m<={m_max}",
            _scan(range(3, m_max + 1), lambda m: True, lambda m: ab(m - 1, m + 1).a > m),
        )
    )
    rows.append(
        Row(
            "(a,b)_{m,m+3}, m>=1",
            "(2m+4,4)",
            "ab(m,m+3)",
            f"1<=m<={m_max}",
            _scan(ms1, lambda m: closed_form(m, 3), lambda m: _cell(m, m + 3)),
        )
    )
    rows.append(Row("(a,b)_{0,3}", "(6,2)", "ab(0,3)", "m=0", _scan([0], lambda m: (6, 2), lambda m: _cell(0, 3))))

    branches = [
        ("(a,b)_{m,m+4}, m even >= 6", "(5m/2+5,10)", [m for m in evens if m >= 6]),
        ("(a,b)_{m,m+4}, m in {2,4}", "(5m/2+6,5-m)", [2, 4]),
        ("(a,b)_{m,m+4}, m odd >= 17", "(5m/2+9/2,(m+25)/2)", [m for m in odds if m >= 17]),
        ("(a,b)_{m,m+4}, m odd 3..15", "(5m/2+11/2,(15-m)/2)", [m for m in odds if 3 <= m <= 15]),
    ]
    for label, printed, sel in branches:
        sel = [m for m in sel if m <= m_max]
        rows.append(
            Row(label, printed, "ab(m,m+4)", f"{len(sel)} values of m",
                _scan(sel, lambda m: closed_form(m, 4), lambda m: _cell(m, m + 4)))
        )

    def b0(x: int) -> int:
        return (x + 1) // 3 if x % 3 == 2 else 0

    xs = range(0, 3 * m_max + 1)
    rows.append(
        Row("b_{0,x} by residue mod 3", "0 or (x+1)/3", "ab(0,x)", f"x<={3 * m_max}",
            _scan(xs, b0, lambda x: ab(0, x).b))
    )
    return rows


def mismatches(rows: list[Row] | None = None) -> list[Row]:
    return [r for r in (rows if rows is not None else build_rows()) if not r.consistent]


def render_markdown(rows: list[Row]) -> str:
    out = ["| identity | printed | derived | verdict |", "|---|---|---|---|"]
    for r in rows:
        out.append(f"| {r.label} | {r.printed} | {r.derived} | {r.verdict} |")
    return "\n".join(out)
