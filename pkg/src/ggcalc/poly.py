"""Exact sparse polynomial arithmetic over named variable blocks.

A polynomial is a finite sum of monomials with ``fractions.Fraction``
coefficients.  Variables are (block, index) pairs: a block is a short tag
like ``"x"`` or ``"y"`` naming a tuple of coordinates (one group point),
so a single polynomial can mix up to a handful of group points, e.g. the
group-law components R_j(x, y) or three-point identities in (x, y, z).

Representation:

    Monomial = tuple[(block, exponents), ...]   sorted by block tag,
                                                blocks with all-zero
                                                exponents omitted
    terms    = dict[Monomial, Fraction]         no zero coefficients

The empty monomial ``()`` is the constant term.  All operations are exact;
there are no floating-point coefficients anywhere in this module.
Instances are treated as immutable: no method mutates ``self``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Exponents = tuple[int, ...]
Monomial = tuple[tuple[str, Exponents], ...]
Scalar = Union[Fraction, int]


class BlockMismatchError(ValueError):
    """Two polynomials disagree about the dimension of a shared block."""


class UnboundVariableError(ValueError):
    """A substitution or evaluation left some block unbound."""


class ParseError(ValueError):
    """Input does not conform to the polynomial text grammar."""


class _WeightSentinel:
    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name


#: Weight reported for the zero polynomial (homogeneous of every weight).
ZERO_WEIGHT = _WeightSentinel("ZERO")
#: Reported when a polynomial has monomials of differing weighted degree.
NON_HOMOGENEOUS = _WeightSentinel("NON_HOMOGENEOUS")


def _merge_blocks(a: Mapping[str, int], b: Mapping[str, int]) -> dict[str, int]:
    out = dict(a)
    for tag, dim in b.items():
        if out.setdefault(tag, dim) != dim:
            raise BlockMismatchError(
                f"block {tag!r} has dimension {out[tag]} vs {dim}"
            )
    return out


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc: dict[str, list[int]] = {}
    for tag, exps in m1 + m2:
        if tag in acc:
            cur = acc[tag]
            for i, e in enumerate(exps):
                cur[i] += e
        else:
            acc[tag] = list(exps)
    return tuple(sorted((tag, tuple(e)) for tag, e in acc.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(sum(exps) for _, exps in m)


def _mono_sort_key(m: Monomial):
    # Graded order: total degree first, then block tag, then exponent
    # vectors with earlier variables ranked higher (x1 y2 before x2 y1).
    return (
        _mono_degree(m),
        tuple((tag, tuple(-e for e in exps)) for tag, exps in m),
    )


class Polynomial:
    """Immutable exact multivariate polynomial over named blocks."""

    __slots__ = ("blocks", "terms")

    def __init__(self, blocks: Mapping[str, int], terms: Mapping[Monomial, Scalar]):
        self.blocks = dict(blocks)
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in terms.items():
            c = Fraction(coeff)
            if c:
                clean[mono] = c
        self.terms = clean

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero() -> Polynomial:
        return Polynomial({}, {})

    @staticmethod
    def const(value: Scalar) -> Polynomial:
        return Polynomial({}, {(): Fraction(value)})

    @staticmethod
    def var(tag: str, index: int, dim: int) -> Polynomial:
        """The coordinate variable ``<tag><index+1>`` of a dim-``dim`` block."""
        if not 0 <= index < dim:
            raise IndexError(f"variable index {index} outside block of dim {dim}")
        exps = tuple(1 if i == index else 0 for i in range(dim))
        return Polynomial({tag: dim}, {((tag, exps),): Fraction(1)})

    @staticmethod
    def coerce(value: Polynomial | Scalar) -> Polynomial:
        if isinstance(value, Polynomial):
            return value
        return Polynomial.const(value)

    # -- basic queries ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(_mono_degree(m) for m in self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return not self.terms
            return self.terms == {(): other}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: Polynomial | Scalar) -> Polynomial:
        other = Polynomial.coerce(other)
        blocks = _merge_blocks(self.blocks, other.blocks)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return Polynomial(blocks, terms)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.blocks, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Polynomial | Scalar) -> Polynomial:
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other: Scalar) -> Polynomial:
        return Polynomial.coerce(other) - self

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Polynomial.zero()
            return Polynomial(self.blocks, {m: k * c for m, k in self.terms.items()})
        blocks = _merge_blocks(self.blocks, other.blocks)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return Polynomial(blocks, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def scale(self, c: Scalar) -> Polynomial:
        return self * Fraction(c)

    # -- calculus and composition ------------------------------------------

    def derivative(self, tag: str, index: int) -> Polynomial:
        """Exact partial derivative with respect to variable (tag, index)."""
        terms: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            for pos, (t, exps) in enumerate(mono):
                if t != tag:
                    continue
                e = exps[index]
                if e == 0:
                    break
                new_exps = exps[:index] + (e - 1,) + exps[index + 1:]
                rest = mono[:pos] + mono[pos + 1:]
                if any(new_exps):
                    new_mono = tuple(sorted(rest + ((tag, new_exps),)))
                else:
                    new_mono = rest
                terms[new_mono] = terms.get(new_mono, Fraction(0)) + coeff * e
                break
        return Polynomial(self.blocks, terms)

    def substitute(
        self, bindings: Mapping[str, Sequence[Polynomial | Scalar]]
    ) -> Polynomial:
        """Compose with coordinate maps: every block must be bound.

        ``bindings[tag]`` is the tuple of replacement polynomials, one per
        coordinate of the block.
        """
        for tag, dim in self.blocks.items():
            if self._uses_block(tag):
                if tag not in bindings:
                    raise UnboundVariableError(f"block {tag!r} not bound")
                if len(bindings[tag]) != dim:
                    raise UnboundVariableError(
                        f"block {tag!r} needs {dim} replacements, "
                        f"got {len(bindings[tag])}"
                    )
        out = Polynomial.zero()
        cache: dict[tuple[str, int, int], Polynomial] = {}

        def power(tag: str, i: int, e: int) -> Polynomial:
            key = (tag, i, e)
            if key not in cache:
                cache[key] = Polynomial.coerce(bindings[tag][i]) ** e
            return cache[key]

        for mono, coeff in self.terms.items():
            factor = Polynomial.const(coeff)
            for tag, exps in mono:
                for i, e in enumerate(exps):
                    if e:
                        factor = factor * power(tag, i, e)
            out = out + factor
        return out

    def rename_block(self, old: str, new: str) -> Polynomial:
        if old == new:
            return self
        if new in self.blocks:
            raise BlockMismatchError(f"target block {new!r} already present")
        if old not in self.blocks:
            return self
        dim = self.blocks[old]
        blocks = {t: d for t, d in self.blocks.items() if t != old}
        blocks[new] = dim
        terms = {}
        for mono, coeff in self.terms.items():
            renamed = tuple(
                sorted((new if t == old else t, e) for t, e in mono)
            )
            terms[renamed] = coeff
        return Polynomial(blocks, terms)

    def evaluate(self, assignments: Mapping[str, Sequence[Scalar]]) -> Fraction:
        """Exact evaluation at rational points, all used blocks bound."""
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            val = coeff
            for tag, exps in mono:
                if tag not in assignments:
                    raise UnboundVariableError(f"block {tag!r} not bound")
                point = assignments[tag]
                for i, e in enumerate(exps):
                    if e:
                        val *= Fraction(point[i]) ** e
            total += val
        return total

    def _uses_block(self, tag: str) -> bool:
        return any(t == tag for mono in self.terms for t, _ in mono)

    # -- weighted-degree bookkeeping -----------------------------------------

    def monomial_weight(self, mono: Monomial, weights: Sequence[int]) -> int:
        w = 0
        for tag, exps in mono:
            if len(exps) != len(weights):
                raise BlockMismatchError(
                    f"block {tag!r} has dim {len(exps)}, weights have {len(weights)}"
                )
            w += sum(v * e for v, e in zip(weights, exps))
        return w

    # -- printing ------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))

    def __repr__(self) -> str:
        return f"Polynomial({render_poly(self)!r})"


def homogeneous_weight(p: Polynomial, weights: Sequence[int]):
    """Weighted degree of ``p`` if homogeneous.

    Returns the common weight of all monomials, ``ZERO_WEIGHT`` for the zero
    polynomial (homogeneous of every weight), or ``NON_HOMOGENEOUS``.
    """
    if any(v <= 0 for v in weights):
        raise ValueError("weights must be strictly positive")
    if p.is_zero:
        return ZERO_WEIGHT
    seen = None
    for mono in p.terms:
        w = p.monomial_weight(mono, weights)
        if seen is None:
            seen = w
        elif seen != w:
            return NON_HOMOGENEOUS
    return seen


def monomials_of_weight(weights: Sequence[int], target: int) -> list[Exponents]:
    """All exponent vectors with weighted degree ``target``, descending lex."""
    if target < 0:
        raise ValueError("weight must be non-negative")
    n = len(weights)
    out: list[Exponents] = []

    def rec(pos: int, remaining: int, prefix: tuple[int, ...]):
        if pos == n:
            if remaining == 0:
                out.append(prefix)
            return
        v = weights[pos]
        for e in range(remaining // v, -1, -1):
            rec(pos + 1, remaining - e * v, prefix + (e,))

    rec(0, target, ())
    return out


def multi_weight(alpha: Sequence[int], weights: Sequence[int]) -> int:
    """Weighted length [alpha] = sum v_j alpha_j of a multi-index."""
    if len(alpha) != len(weights):
        raise BlockMismatchError("multi-index and weights have different lengths")
    return sum(v * a for v, a in zip(weights, alpha))


# -- text grammar -------------------------------------------------------------
#
# expression = term (("+"|"-") term)*
# term       = rational? (var ("^" uint)?)*
# rational   = int ("/" uint)?
# var        = blocktag uint          e.g. "x1", "y12"
#
# Whitespace-separated factors denote multiplication: "1/2 x3 + 1/24 x1 x2".

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z]+\d+)|(?P<op>[+^-])|(?P<bad>\S))"
)


def parse_poly(text: str, dims: Mapping[str, int] | None = None) -> Polynomial:
    """Parse the polynomial text grammar.

    When ``dims`` is given, every block must appear there and indices are
    validated against it; otherwise dimensions are inferred from the largest
    index used per block.
    """
    tokens: list[tuple[str, str]] = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}")
        tokens.append((kind, m.group(kind)))
    if not tokens:
        raise ParseError("empty polynomial")

    # Infer block dimensions up front when not supplied.
    var_ids: list[tuple[str, int]] = []
    for kind, tok in tokens:
        if kind == "var":
            tag = tok.rstrip("0123456789")
            idx = int(tok[len(tag):])
            if idx < 1:
                raise ParseError(f"variable index must be >= 1 in {tok!r}")
            var_ids.append((tag, idx))
    if dims is None:
        inferred: dict[str, int] = {}
        for tag, idx in var_ids:
            inferred[tag] = max(inferred.get(tag, 0), idx)
        dims = inferred
    else:
        for tag, idx in var_ids:
            if tag not in dims:
                raise ParseError(f"unknown block {tag!r}")
            if idx > dims[tag]:
                raise ParseError(f"index {idx} exceeds dim {dims[tag]} of block {tag!r}")

    pos = 0
    result = Polynomial.zero()
    sign = 1
    while pos < len(tokens):
        kind, tok = tokens[pos]
        if kind == "op":
            if tok == "+":
                sign = 1
            elif tok == "-":
                sign = -1
            else:
                raise ParseError("misplaced '^'")
            pos += 1
            kind, tok = tokens[pos] if pos < len(tokens) else (None, None)
            if kind not in ("num", "var"):
                raise ParseError("dangling sign")
        term = Polynomial.const(sign)
        sign = 1
        saw_factor = False
        while pos < len(tokens):
            kind, tok = tokens[pos]
            if kind == "num":
                term = term * Fraction(tok)
                pos += 1
                saw_factor = True
            elif kind == "var":
                tag = tok.rstrip("0123456789")
                idx = int(tok[len(tag):]) - 1
                exp = 1
                if pos + 2 < len(tokens) and tokens[pos + 1] == ("op", "^"):
                    kind2, tok2 = tokens[pos + 2]
                    if kind2 != "num" or "/" in tok2:
                        raise ParseError("exponent must be an unsigned integer")
                    exp = int(tok2)
                    pos += 2
                term = term * Polynomial.var(tag, idx, dims[tag]) ** exp
                pos += 1
                saw_factor = True
            else:
                break
        if not saw_factor:
            raise ParseError("expected a term")
        result = result + term
    return result


def _format_coeff(c: Fraction) -> str:
    return str(c)


def render_poly(p: Polynomial) -> str:
    """Deterministic text form, inverse of :func:`parse_poly`."""
    if p.is_zero:
        return "0"
    parts: list[str] = []
    for mono, coeff in p.sorted_terms():
        factors: list[str] = []
        for tag, exps in mono:
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"{tag}{i + 1}")
                elif e > 1:
                    factors.append(f"{tag}{i + 1}^{e}")
        mag = abs(coeff)
        body = " ".join(factors)
        if not factors:
            body = _format_coeff(mag)
        elif mag != 1:
            body = f"{_format_coeff(mag)} {body}"
        if not parts:
            parts.append(body if coeff > 0 else f"- {body}")
        else:
            parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(parts)
