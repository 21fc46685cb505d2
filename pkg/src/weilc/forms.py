"""Differential forms in coordinate normal form, with Cartan calculus.

A degree-p form is stored as a map from strictly increasing index tuples
(i1 < ... < ip, 0-based) to coefficient expressions; the degree-0 case has
the single key ().  The coordinate normal form is faithful here because
the differential is fixed by the Leibniz rule together with its values on
the coordinate functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .algebra import WeilAlgebra, WeilElement
from .errors import AlgebraMismatch, DegreeError, DimensionMismatch
from .expr import (
    AFunction,
    ConstA,
    Expr,
    ZERO,
    add,
    contains_consta,
    diff,
    eval_weil,
    mul,
    neg,
)
from .prolongation import AVectorField

Index = tuple[int, ...]


@dataclass(frozen=True)
class CoordForm:
    """Sum of phi_I dx_I over strictly increasing index tuples I."""

    degree: int
    dim: int
    algebra: WeilAlgebra
    coeffs: Mapping[Index, Expr] = field(default_factory=dict)

    def __post_init__(self):
        for idx in self.coeffs:
            if len(idx) != self.degree:
                raise DegreeError(f"index tuple {idx} in a degree-{self.degree} form")
            if any(not 0 <= i < self.dim for i in idx):
                raise DimensionMismatch(f"index tuple {idx} off the chart")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise DegreeError(f"index tuple {idx} is not strictly increasing")

    def coefficient(self, idx: Index) -> Expr:
        return self.coeffs.get(tuple(idx), ZERO)

    def terms(self) -> Iterator[tuple[Index, Expr]]:
        return iter(sorted(self.coeffs.items()))

    def evaluate(self, point) -> dict[Index, WeilElement]:
        """All coefficients at a point, absent tuples evaluating to zero."""
        return {
            idx: eval_weil(c, point, self.algebra) for idx, c in self.coeffs.items()
        }

    def as_afunction(self) -> AFunction:
        if self.degree != 0:
            raise DegreeError("only a degree-0 form is a function")
        return AFunction(self.coefficient(()), self.dim, self.algebra)

    def __add__(self, other: "CoordForm") -> "CoordForm":
        _check_pair(self, other)
        if other.degree != self.degree:
            raise DegreeError("cannot add forms of different degree")
        acc = _Accumulator()
        for idx, c in self.coeffs.items():
            acc.put(idx, c)
        for idx, c in other.coeffs.items():
            acc.put(idx, c)
        return CoordForm(self.degree, self.dim, self.algebra, acc.build())

    def __neg__(self) -> "CoordForm":
        return CoordForm(
            self.degree,
            self.dim,
            self.algebra,
            {idx: neg(c) for idx, c in self.coeffs.items()},
        )

    def __sub__(self, other: "CoordForm") -> "CoordForm":
        return self + (-other)

    def scale(self, phi: AFunction | Expr | WeilElement | float) -> "CoordForm":
        """Module action phi * omega."""
        if isinstance(phi, AFunction):
            if phi.algebra is not self.algebra:
                raise AlgebraMismatch("scalar over a different algebra")
            phi = phi.expr
        elif isinstance(phi, WeilElement):
            if phi.algebra is not self.algebra:
                raise AlgebraMismatch("scalar over a different algebra")
            phi = ConstA(phi)
        elif isinstance(phi, (int, float)):
            from .expr import ConstR

            phi = ConstR(float(phi))
        return CoordForm(
            self.degree,
            self.dim,
            self.algebra,
            {idx: mul(phi, c) for idx, c in self.coeffs.items()},
        )

    def to_dict(self) -> dict:
        """Machine-readable coefficient dump, in the report string format."""
        from .expr import to_string

        return {
            "degree": self.degree,
            "dim": self.dim,
            "terms": {
                "^".join(f"dx{i + 1}" for i in idx) or "1": to_string(c)
                for idx, c in self.terms()
            },
        }

    def __repr__(self):
        if not self.coeffs:
            return f"CoordForm(0, degree={self.degree})"
        parts = []
        for idx, c in self.terms():
            basis = "^".join(f"dx{i + 1}" for i in idx)
            parts.append(f"({c!r}) {basis}".strip())
        return " + ".join(parts)


class _Accumulator:
    """Coefficient accumulation that drops cancelled and zero terms."""

    def __init__(self):
        self.terms: dict[Index, list[tuple[int, Expr]]] = {}

    def put(self, idx: Index, expr: Expr, sign: int = 1):
        if expr == ZERO:
            return
        bucket = self.terms.setdefault(idx, [])
        for k, (s, e) in enumerate(bucket):
            if s == -sign and e == expr:
                del bucket[k]
                return
        bucket.append((sign, expr))

    def build(self) -> dict[Index, Expr]:
        out = {}
        for idx, bucket in self.terms.items():
            total = None
            for s, e in bucket:
                signed = e if s > 0 else neg(e)
                total = signed if total is None else add(total, signed)
            if total is not None and total != ZERO:
                out[idx] = total
        return out


def _check_pair(a: CoordForm, b: CoordForm):
    if a.algebra is not b.algebra:
        raise AlgebraMismatch("forms over different algebras")
    if a.dim != b.dim:
        raise DimensionMismatch("forms over different charts")


def zero_form(degree: int, dim: int, algebra: WeilAlgebra) -> CoordForm:
    return CoordForm(degree, dim, algebra, {})


def function_form(fn: AFunction) -> CoordForm:
    """Wrap a function as a degree-0 form."""
    coeffs = {} if fn.expr == ZERO else {(): fn.expr}
    return CoordForm(0, fn.dim, fn.algebra, coeffs)


def delta(fn: AFunction) -> CoordForm:
    """The canonical differential: sum_i (dfn/dx_i) dx_i.

    Algebra-linear because constants die under the partials, and Leibniz
    by the product rule.
    """
    acc = _Accumulator()
    for i in range(fn.dim):
        acc.put((i,), diff(fn.expr, i))
    return CoordForm(1, fn.dim, fn.algebra, acc.build())


def _merge_indices(left: Index, right: Index) -> tuple[int, Index] | None:
    """Sort the concatenation, returning (sign, tuple); None on a repeat."""
    merged = list(left)
    sign = 1
    for i in right:
        pos = len(merged)
        while pos > 0 and merged[pos - 1] > i:
            pos -= 1
        if pos > 0 and merged[pos - 1] == i:
            return None
        sign *= (-1) ** (len(merged) - pos)
        merged.insert(pos, i)
    return sign, tuple(merged)


def wedge(a: CoordForm, b: CoordForm) -> CoordForm:
    """Exterior product; graded commutative and associative."""
    _check_pair(a, b)
    acc = _Accumulator()
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            merged = _merge_indices(ia, ib)
            if merged is None:
                continue
            sign, idx = merged
            acc.put(idx, mul(ca, cb), sign)
    return CoordForm(a.degree + b.degree, a.dim, a.algebra, acc.build())


def dform(w: CoordForm) -> CoordForm:
    """Degree +1 derivation: d(phi dx_I) = sum_i (dphi/dx_i) dx_i ^ dx_I."""
    acc = _Accumulator()
    for idx, c in w.coeffs.items():
        for i in range(w.dim):
            if i in idx:
                continue
            dc = diff(c, i)
            if dc == ZERO:
                continue
            pos = sum(1 for j in idx if j < i)
            inserted = idx[:pos] + (i,) + idx[pos:]
            acc.put(inserted, dc, (-1) ** pos)
    return CoordForm(w.degree + 1, w.dim, w.algebra, acc.build())


def _field_components(field_: AVectorField, w: CoordForm) -> tuple[Expr, ...]:
    if field_.algebra is not w.algebra:
        raise AlgebraMismatch("field and form live over different algebras")
    if field_.dim != w.dim:
        raise DimensionMismatch("field and form live over different charts")
    return field_.components


def interior(field_: AVectorField, w: CoordForm) -> CoordForm:
    """First-slot contraction; a derivation of degree -1 against wedge."""
    if w.degree == 0:
        raise DegreeError("interior product needs degree >= 1")
    comps = _field_components(field_, w)
    acc = _Accumulator()
    for idx, c in w.coeffs.items():
        for k, i in enumerate(idx):
            rest = idx[:k] + idx[k + 1 :]
            acc.put(rest, mul(comps[i], c), (-1) ** k)
    return CoordForm(w.degree - 1, w.dim, w.algebra, acc.build())


def contract(field_: AVectorField, w: CoordForm) -> AFunction:
    """Pair a degree-1 form with a field: sum_i D_i * phi_i."""
    if w.degree != 1:
        raise DegreeError("contraction needs a degree-1 form")
    return interior(field_, w).as_afunction()


def lie_derivative(field_: AVectorField, w: CoordForm) -> CoordForm:
    """Cartan's formula i_D d + d i_D; on degree 0 only the first term
    applies and reduces to D acting on the coefficient."""
    first = interior(field_, dform(w))
    if w.degree == 0:
        return first
    return first + dform(interior(field_, w))


def prolong_form(w: CoordForm, algebra: WeilAlgebra) -> CoordForm:
    """Reinterpret a ConstA-free form over another algebra."""
    for c in w.coeffs.values():
        if contains_consta(c):
            raise AlgebraMismatch("only ConstA-free forms can be prolonged")
    return CoordForm(w.degree, w.dim, algebra, dict(w.coeffs))
