"""Formal asymptotic-expansion assembly and rendering.

Terms have the shape c * i^k * (D^d1 X^b1 s1)(D^d2 X^b2 s2) where D is the
difference operator attached to the reflected canonical polynomials and X
the left-invariant derivative; symbols s1, s2, s*, s are opaque
identifiers.  Products of difference operators arising in the composition
expansion are normalized on the spot: D^a D^b is rewritten through the
exact expansion of qtilde_a * qtilde_b in the reflected basis, so every
stored factor carries a single difference multi-index.  Terms are grouped
by their homogeneous order (the sum of the weighted lengths of the X
multi-indices) and merged exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .group import GroupLaw
from .invariant import CanonicalBasis, MultiIndex, zero_index
from .poly import Polynomial
from .taucalc import (
    CoefficientTable,
    QuantizingFunction,
    adjoint_coeffs,
    change_coeffs,
    composition_coeffs,
    is_symmetric,
    poisson_bracket_spec,
    validate_hp,
)


class ExpansionMismatchError(ValueError):
    """Expansions that must agree term-for-term do not."""

    def __init__(self, message: str, offending: list):
        super().__init__(message)
        self.offending = offending


@dataclass(frozen=True, order=True)
class Factor:
    """One symbol factor (sym, difference multi-index, derivative multi-index)."""

    sym: str
    delta: MultiIndex
    deriv: MultiIndex


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    factors: tuple[Factor, ...]
    i_power: int = 0  # power of the imaginary unit attached to the coefficient

    def order(self, weights: Sequence[int]) -> int:
        return sum(
            sum(v * d for v, d in zip(weights, f.deriv)) for f in self.factors
        )

    def key(self):
        return tuple((f.sym, f.delta, f.deriv) for f in self.factors) + (self.i_power,)


@dataclass(frozen=True)
class Expansion:
    kind: str
    tau_name: str
    max_order: int
    weights: tuple[int, ...]
    orders: Mapping[int, tuple[Term, ...]]

    def order_terms(self, j: int) -> tuple[Term, ...]:
        return self.orders.get(j, ())


def _normalize(t: Term) -> Term:
    """Fold even powers of i into the sign so i_power is 0 or 1."""
    k = t.i_power % 4
    coeff = t.coeff
    if k >= 2:
        coeff = -coeff
        k -= 2
    return Term(coeff, t.factors, k)


def _merge(terms: Iterable[Term], weights: Sequence[int], max_order: int) -> dict[int, tuple[Term, ...]]:
    acc: dict[tuple, Fraction] = {}
    meta: dict[tuple, Term] = {}
    for raw in terms:
        t = _normalize(raw)
        if not t.coeff:
            continue
        k = t.key()
        acc[k] = acc.get(k, Fraction(0)) + t.coeff
        meta[k] = t
    grouped: dict[int, list[Term]] = {}
    for k, c in acc.items():
        if not c:
            continue
        t = meta[k]
        merged = Term(c, t.factors, t.i_power)
        grouped.setdefault(merged.order(weights), []).append(merged)
    return {
        j: tuple(sorted(ts, key=Term.key))
        for j, ts in sorted(grouped.items())
        if j <= max_order
    }


def _qtilde_product(
    basis: CanonicalBasis, a: MultiIndex, b: MultiIndex
) -> dict[MultiIndex, Fraction]:
    """Expand qtilde_a * qtilde_b in the reflected basis at joint weight."""
    n = basis.law.dim
    if not any(a):
        return {tuple(b): Fraction(1)}
    if not any(b):
        return {tuple(a): Fraction(1)}
    w = basis.weight(a) + basis.weight(b)
    product = basis.qtilde(a) * basis.qtilde(b)
    coeffs = basis.coeffs_in_qtilde(product, "x", w)
    basis.verify_one_block(product, "x", coeffs)
    return coeffs


def compose_expansion(
    tau: QuantizingFunction,
    max_order: int,
    basis: CanonicalBasis | None = None,
    tables: tuple[CoefficientTable, CoefficientTable] | None = None,
) -> Expansion:
    """Asymptotic expansion of the composite symbol, grouped by order.

    Order-j terms are assembled from the two composition tables as

        c1(alpha; a1, a2) * c2(beta; b1, b2)
            * (D^{a2} D^{b1} X^alpha s1) (D^{b2} D^{a1} X^beta s2)

    over [alpha] + [beta] = j, with each product of difference operators
    reduced to single multi-indices in the reflected basis.
    """
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_order)
    if tables is None:
        tables = composition_coeffs(tau, max_order, basis)
    t1, t2 = tables
    n = law.dim
    raw: list[Term] = []
    zero = zero_index(n)
    by_weight_1: dict[int, list[tuple]] = {}
    by_weight_2: dict[int, list[tuple]] = {}
    for key, c in t1.entries.items():
        by_weight_1.setdefault(basis.weight(key[0]), []).append((key, c))
    for key, c in t2.entries.items():
        by_weight_2.setdefault(basis.weight(key[0]), []).append((key, c))
    for wa in sorted(by_weight_1):
        for wb in sorted(by_weight_2):
            if wa + wb > max_order:
                continue
            for (alpha, a1, a2), c1 in by_weight_1[wa]:
                for (beta, b1, b2), c2 in by_weight_2[wb]:
                    c = c1 * c2
                    if not c:
                        continue
                    d1 = _qtilde_product(basis, a2, b1)
                    d2 = _qtilde_product(basis, b2, a1)
                    for g1, e1 in d1.items():
                        for g2, e2 in d2.items():
                            raw.append(
                                Term(
                                    c * e1 * e2,
                                    (
                                        Factor("s1", g1, tuple(alpha)),
                                        Factor("s2", g2, tuple(beta)),
                                    ),
                                )
                            )
    return Expansion(
        "compose",
        tau.name,
        max_order,
        law.weights,
        _merge(raw, law.weights, max_order),
    )


def adjoint_expansion(
    tau: QuantizingFunction,
    max_order: int,
    basis: CanonicalBasis | None = None,
    table: CoefficientTable | None = None,
) -> Expansion:
    """Expansion of the adjoint symbol over the single symbol s*."""
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_order)
    if table is None:
        table = adjoint_coeffs(tau, max_order, basis)
    raw = [
        Term(c, (Factor("s*", tuple(ap), tuple(alpha)),))
        for (ap, alpha), c in table.entries.items()
        if basis.weight(alpha) <= max_order
    ]
    return Expansion(
        "adjoint", tau.name, max_order, law.weights, _merge(raw, law.weights, max_order)
    )


def change_expansion(
    tau: QuantizingFunction,
    direction: str,
    max_order: int,
    basis: CanonicalBasis | None = None,
) -> Expansion:
    """Change-of-quantization expansion over the single symbol s."""
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_order)
    table = change_coeffs(tau, direction, max_order, basis)
    raw = [
        Term(c, (Factor("s", tuple(ap), tuple(alpha)),))
        for (ap, alpha), c in table.entries.items()
        if basis.weight(alpha) <= max_order
    ]
    return Expansion(
        f"change_{direction}",
        tau.name,
        max_order,
        law.weights,
        _merge(raw, law.weights, max_order),
    )


def poisson_check(law: GroupLaw, tau: QuantizingFunction) -> tuple[bool, list]:
    """Check the first-order term of the composition expansion.

    For an admissible symmetric tau on a stratified group the order-1 term
    must equal, per first-stratum index j,

        -1/2 (X^{e_j} s1)(D^{e_j} s2)  +  1/2 (D^{e_j} s1)(X^{e_j} s2),

    i.e. one half of the antisymmetric first-stratum bracket combination
    with the sign fixed by the defining coefficient equations (the sign is
    validated end to end by the dense-operator composition oracle in the
    numeric module).  Returns (ok, offending-term list).
    """
    spec = poisson_bracket_spec(law)
    if not validate_hp(tau).ok:
        raise ValueError("tau does not satisfy the admissibility condition")
    if not is_symmetric(tau)[0]:
        raise ValueError("tau is not symmetric")
    n = law.dim
    exp = compose_expansion(tau, 1)
    zero = zero_index(n)
    expected: dict[tuple, Fraction] = {}
    for j in spec.first_stratum:
        e_j = tuple(1 if i == j else 0 for i in range(n))
        t_plus = Term(Fraction(-1, 2), (Factor("s1", zero, e_j), Factor("s2", e_j, zero)))
        t_minus = Term(Fraction(1, 2), (Factor("s1", e_j, zero), Factor("s2", zero, e_j)))
        expected[t_plus.key()] = t_plus.coeff
        expected[t_minus.key()] = t_minus.coeff
    got = {t.key(): t.coeff for t in exp.order_terms(1)}
    offending = []
    for k in set(expected) | set(got):
        if expected.get(k, Fraction(0)) != got.get(k, Fraction(0)):
            offending.append((k, got.get(k), expected.get(k)))
    return (not offending, sorted(offending))


# -- rendering ------------------------------------------------------------------


def _format_index(idx: MultiIndex) -> str:
    parts = []
    for i, e in enumerate(idx):
        if e == 1:
            parts.append(f"e{i + 1}")
        elif e > 1:
            parts.append(f"{e}e{i + 1}")
    return "+".join(parts) if parts else "0"


def _render_term(t: Term) -> str:
    """Magnitude and factors of a term; the caller prints the sign."""
    bits = []
    for f in t.factors:
        inner = []
        if any(f.delta):
            inner.append(f"D^{{{_format_index(f.delta)}}}")
        if any(f.deriv):
            inner.append(f"X^{{{_format_index(f.deriv)}}}")
        inner.append(f.sym)
        bits.append("(" + " ".join(inner) + ")")
    body = "".join(bits)
    if t.i_power % 2:
        body = "i " + body
    mag = abs(t.coeff)
    if mag != 1:
        body = f"{mag} {body}"
    return body


def render(expansion: Expansion, fmt: str = "text") -> str:
    """Serialize an expansion deterministically as text or JSON."""
    if fmt == "json":
        orders = []
        for j in sorted(expansion.orders):
            terms = [
                {
                    "c": str(t.coeff),
                    "i_power": t.i_power,
                    "factors": [
                        {"sym": f.sym, "delta": list(f.delta), "X": list(f.deriv)}
                        for f in t.factors
                    ],
                }
                for t in expansion.orders[j]
            ]
            orders.append({"j": j, "terms": terms})
        return json.dumps(
            {
                "kind": expansion.kind,
                "tau": expansion.tau_name,
                "max_order": expansion.max_order,
                "weights": list(expansion.weights),
                "orders": orders,
            },
            indent=2,
            sort_keys=True,
        )
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    if not expansion.orders:
        return "0"
    lines = []
    for j in sorted(expansion.orders):
        rendered = []
        for t in expansion.orders[j]:
            piece = _render_term(t)
            if not rendered:
                rendered.append(piece if t.coeff > 0 else "- " + piece)
            else:
                rendered.append(("+ " if t.coeff > 0 else "- ") + piece)
        lines.append(f"order {j}: " + " ".join(rendered))
    return "\n".join(lines)


def expansion_from_json(data: Mapping | str) -> Expansion:
    if isinstance(data, str):
        data = json.loads(data)
    orders: dict[int, tuple[Term, ...]] = {}
    for entry in data["orders"]:
        terms = tuple(
            Term(
                Fraction(str(t["c"])),
                tuple(
                    Factor(f["sym"], tuple(f["delta"]), tuple(f["X"]))
                    for f in t["factors"]
                ),
                int(t.get("i_power", 0)),
            )
            for t in entry["terms"]
        )
        orders[int(entry["j"])] = terms
    return Expansion(
        data["kind"],
        data["tau"],
        int(data["max_order"]),
        tuple(data["weights"]),
        orders,
    )
