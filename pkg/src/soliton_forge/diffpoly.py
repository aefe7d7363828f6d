"""Exact differential-polynomial rings and linear differential operator algebra.

Everything symbolic in the package is built on :class:`BasePoly`: polynomials
in the x-derivatives of one or more dependent variables, with exact
coefficients (``fractions.Fraction`` for the single-variable ring used by the
KdV side).  Floating point enters only through jet evaluation.

A monomial is stored as a sorted tuple ``(((var, k), e), ...)`` meaning the
product of ``var^(k)`` raised to ``e``; the empty tuple is the monomial 1.
A polynomial is a mapping from monomials to nonzero coefficients, so equality
is structural.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import JetTooShort, NotExact

Monomial = tuple[tuple[tuple[str, int], int], ...]

_SUFFIX = {0: "", 1: "'", 2: "''", 3: "'''"}


def _mono_insert(factors: dict[tuple[str, int], int], key: tuple[str, int], e: int) -> None:
    new = factors.get(key, 0) + e
    if new:
        factors[key] = new
    else:
        factors.pop(key, None)


def _mono_from_dict(factors: Mapping[tuple[str, int], int]) -> Monomial:
    return tuple(sorted(factors.items()))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    factors = dict(a)
    for key, e in b:
        _mono_insert(factors, key, e)
    return _mono_from_dict(factors)


class BasePoly:
    """Differential polynomial with exact coefficients.

    Subclasses fix the dependent variables (:attr:`VARS`), the scaling weight
    of each variable (:attr:`WEIGHTS`, the weight of ``var^(k)`` being
    ``k + WEIGHTS[var]``) and the coefficient arithmetic via :meth:`coerce`.
    Instances are immutable; all operations are pure.
    """

    VARS: tuple[str, ...] = ()
    WEIGHTS: dict[str, int] = {}

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, object] = {}
        if terms:
            for mono, c in terms.items():
                mono = _mono_from_dict(dict(mono))
                new = clean.get(mono, 0) + self.coerce(c)
                if new:
                    clean[mono] = new
                else:
                    clean.pop(mono, None)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- coefficient arithmetic -------------------------------------------

    @classmethod
    def coerce(cls, c) -> Fraction:
        return c if isinstance(c, Fraction) else Fraction(c)

    @classmethod
    def _to_number(cls, c):
        """Coefficient as a Python number usable in float/complex evaluation."""
        return c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def constant(cls, c):
        return cls({(): c})

    @classmethod
    def gen(cls, var: str, k: int = 0, power: int = 1):
        """The single monomial ``var^(k)`` raised to ``power``."""
        if var not in cls.VARS:
            raise ValueError(f"unknown variable {var!r}")
        if k < 0 or power < 1:
            raise ValueError("derivative order must be >= 0 and power >= 1")
        return cls({(((var, k), power),): 1})

    # -- ring operations ---------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, BasePoly):
            return type(self) is type(other) and self.terms == other.terms
        try:
            return self.terms == type(self).constant(other).terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._as_poly(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            new = out.get(mono, 0) + c
            if new:
                out[mono] = new
            else:
                out.pop(mono, None)
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return self._as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, BasePoly):
            out: dict[Monomial, object] = {}
            for ma, ca in self.terms.items():
                for mb, cb in other.terms.items():
                    mono = _mono_mul(ma, mb)
                    new = out.get(mono, 0) + ca * cb
                    if new:
                        out[mono] = new
                    else:
                        out.pop(mono, None)
            return type(self)(out)
        c = self.coerce(other)
        return type(self)({m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not in the ring")
        out = type(self).constant(1)
        for _ in range(n):
            out = out * self
        return out

    def _as_poly(self, other):
        return other if isinstance(other, BasePoly) else type(self).constant(other)

    # -- calculus ----------------------------------------------------------

    def diff(self, times: int = 1):
        """Total x-derivative (Leibniz rule, ``var^(k) -> var^(k+1)``)."""
        p = self
        for _ in range(times):
            out: dict[Monomial, object] = {}
            for mono, c in p.terms.items():
                for i, ((v, k), e) in enumerate(mono):
                    factors = dict(mono)
                    _mono_insert(factors, (v, k), -1)
                    _mono_insert(factors, (v, k + 1), 1)
                    new_mono = _mono_from_dict(factors)
                    new = out.get(new_mono, 0) + c * e
                    if new:
                        out[new_mono] = new
                    else:
                        out.pop(new_mono, None)
            p = type(self)(out)
        return p

    def partial(self, var: str, k: int):
        """Partial derivative with respect to the jet variable ``var^(k)``."""
        out: dict[Monomial, object] = {}
        key = (var, k)
        for mono, c in self.terms.items():
            factors = dict(mono)
            e = factors.get(key)
            if not e:
                continue
            _mono_insert(factors, key, -1)
            out[_mono_from_dict(factors)] = c * e
        return type(self)(out)

    def euler(self, var: str):
        """Variational derivative sum((-D)^k d/d var^(k)); kills total derivatives."""
        orders = [k for mono in self.terms for (v, k), _ in mono if v == var]
        out = type(self).zero()
        for k in range(max(orders, default=-1) + 1):
            term = self.partial(var, k).diff(k)
            out = out + term if k % 2 == 0 else out - term
        return out

    def max_order(self, var: str | None = None) -> int:
        """Highest derivative order present (-1 for a constant)."""
        orders = [
            k for mono in self.terms for (v, k), _ in mono if var is None or v == var
        ]
        return max(orders, default=-1)

    def weight_components(self) -> dict[int, "BasePoly"]:
        """Split into scaling-weight homogeneous parts."""
        buckets: dict[int, dict[Monomial, object]] = {}
        for mono, c in self.terms.items():
            w = sum(e * (k + self.WEIGHTS[v]) for (v, k), e in mono)
            buckets.setdefault(w, {})[mono] = c
        return {w: type(self)(t) for w, t in sorted(buckets.items())}

    def is_homogeneous(self) -> bool:
        return len(self.weight_components()) <= 1

    @classmethod
    def monomials_of_weight(cls, w: int) -> list[Monomial]:
        """All monomials of scaling weight exactly ``w`` (weight 0: the monomial 1)."""
        if w < 0:
            return []
        gens = []
        for v in cls.VARS:
            off = cls.WEIGHTS[v]
            gens.extend(((v, k), k + off) for k in range(w - off + 1))
        out: list[Monomial] = []

        def rec(i: int, left: int, acc: list[tuple[tuple[str, int], int]]):
            if left == 0:
                out.append(tuple(acc))
                return
            for j in range(i, len(gens)):
                key, wt = gens[j]
                e = 1
                while e * wt <= left:
                    acc.append((key, e))
                    rec(j + 1, left - e * wt, acc)
                    acc.pop()
                    e += 1

        rec(0, w, [])
        return [_mono_from_dict(dict(m)) for m in out]

    def integral(self):
        """Formal antiderivative with all integration constants fixed to zero.

        Found by an exact linear solve over the ansatz of every monomial whose
        scaling weight is one less than the integrand component's weight.
        Raises :class:`NotExact` when the variational derivative test fails or
        a constant term is present (its antiderivative leaves the ring).
        """
        if () in self.terms:
            raise NotExact("constant term has no antiderivative in the ring")
        for v in self.VARS:
            if self.euler(v):
                raise NotExact(f"variational derivative in {v} does not vanish")
        result = type(self).zero()
        for w, part in self.weight_components().items():
            candidates = [m for m in type(self).monomials_of_weight(w - 1) if m != ()]
            derivs = [type(self)({m: 1}).diff() for m in candidates]
            rows: dict[Monomial, int] = {}
            for d in derivs:
                for mono in d.terms:
                    rows.setdefault(mono, len(rows))
            for mono in part.terms:
                rows.setdefault(mono, len(rows))
            a = [[self.coerce(0)] * len(candidates) for _ in rows]
            b = [self.coerce(0)] * len(rows)
            for j, d in enumerate(derivs):
                for mono, c in d.terms.items():
                    a[rows[mono]][j] = c
            for mono, c in part.terms.items():
                b[rows[mono]] = c
            sol = _solve_exact(a, b)
            if sol is None:
                raise NotExact("no polynomial antiderivative exists")
            result = result + type(self)(
                {m: c for m, c in zip(candidates, sol) if c}
            )
        if result.diff() != self:
            raise NotExact("antiderivative verification failed")
        return result

    # -- evaluation ---------------------------------------------------------

    def evaluate_jets(self, jets: Mapping[str, Sequence]):
        """Substitute per-variable jets (index k = derivative order)."""
        total = 0
        for mono, c in self.terms.items():
            val = self._to_number(c)
            for (v, k), e in mono:
                jet = jets[v]
                if k >= len(jet):
                    raise JetTooShort(
                        f"{v}^({k}) required but jet has {len(jet)} entries"
                    )
                val = val * jet[k] ** e
            total = total + val
        return total

    # -- rendering -----------------------------------------------------------

    @staticmethod
    def _factor_text(v: str, k: int, e: int) -> str:
        base = v + _SUFFIX.get(k, f"^({k})")
        if e == 1:
            return base
        return (f"({base})" if k >= 1 else base) + f"^{e}"

    @staticmethod
    def _factor_latex(v: str, k: int, e: int) -> str:
        base = v + (_SUFFIX[k] if k in _SUFFIX else f"^{{({k})}}")
        if e == 1:
            return base
        return (f"\\left({base}\\right)" if k >= 1 else base) + f"^{{{e}}}"

    def _sorted_terms(self):
        def key(item):
            mono, _ = item
            degree = sum(e for _, e in mono)
            orders = tuple(sorted(((k, v) for (v, k), e in mono for _ in range(e)), reverse=True))
            return (degree, tuple(-o[0] for o in orders), orders)

        return sorted(self.terms.items(), key=key)

    @classmethod
    def _coeff_str(cls, c, latex: bool) -> str:
        if latex and isinstance(c, Fraction) and c.denominator != 1:
            sign = "-" if c < 0 else ""
            return f"{sign}\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
        return str(c)

    def _render(self, latex: bool) -> str:
        if not self.terms:
            return "0"
        factor = self._factor_latex if latex else self._factor_text
        pieces = []
        for mono, c in self._sorted_terms():
            body = " ".join(factor(v, k, e) for (v, k), e in mono) if latex else "".join(
                factor(v, k, e) for (v, k), e in mono
            )
            cs = self._coeff_str(c, latex)
            if not mono:
                text = cs
            elif cs == "1":
                text = body
            elif cs == "-1":
                text = "-" + body
            else:
                text = cs + body if not latex else cs + " " + body
            pieces.append(text)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_text(self) -> str:
        return self._render(latex=False)

    def to_latex(self) -> str:
        return self._render(latex=True)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()})"

    def _mono_json_key(self, key: tuple[str, int]) -> str:
        v, k = key
        return str(k) if len(self.VARS) == 1 else f"{v}:{k}"

    def to_json_obj(self) -> dict:
        terms = []
        for mono, c in self._sorted_terms():
            entry = {
                "mono": {self._mono_json_key(key): e for key, e in mono},
                "num": c.numerator,
                "den": c.denominator,
            }
            terms.append(entry)
        return {"terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _solve_exact(a: list[list], b: list):
    """Solve A x = b exactly by Gaussian elimination; None when inconsistent.

    Entries must support exact field arithmetic.  A unique solution is assumed
    when consistent (free columns are returned as zero).
    """
    rows, cols = len(a), len(a[0]) if a else 0
    a = [row[:] + [rhs] for row, rhs in zip(a, b)]
    pivot_of_col: dict[int, int] = {}
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = a[r][c]
        a[r] = [x / inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivot_of_col[c] = r
        r += 1
    for i in range(r, rows):
        if a[i][cols]:
            return None
    zero = b[0] * 0 if b else Fraction(0)
    x = [zero] * cols
    for c, i in pivot_of_col.items():
        x[c] = a[i][cols]
    return x


class DiffPoly(BasePoly):
    """Differential polynomial in the single dependent variable ``q``.

    Coefficients are exact rationals with arbitrary-precision integer
    numerator and denominator.  The scaling weight of ``q^(k)`` is ``k + 2``.
    """

    VARS = ("q",)
    WEIGHTS = {"q": 2}

    @classmethod
    def q(cls, k: int = 0) -> "DiffPoly":
        """The generator ``q^(k)``."""
        return cls.gen("q", k)

    def evaluate(self, jet: Sequence):
        """Substitute the jet ``(q, q', q'', ...)``; exact when the jet is rational."""
        return self.evaluate_jets({"q": jet})

    def weight(self) -> int | None:
        """Scaling weight when homogeneous, ``None`` otherwise (0 for the zero poly)."""
        parts = self.weight_components()
        if len(parts) > 1:
            return None
        return next(iter(parts), 0)


def total_derivative(p: DiffPoly, times: int = 1) -> DiffPoly:
    """Total x-derivative of a differential polynomial."""
    return p.diff(times)


def apply_B(p: BasePoly) -> BasePoly:
    """Third-order recursion operator: ``p''' + 4 q p' + 2 q' p``."""
    q = type(p).gen("q")
    return p.diff(3) + 4 * q * p.diff() + 2 * q.diff() * p


def euler_operator(p: DiffPoly) -> DiffPoly:
    """Variational derivative in ``q``; zero iff ``p`` is a total x-derivative
    up to an additive constant."""
    return p.euler("q")


def formal_integral(p: BasePoly) -> BasePoly:
    """Antiderivative ``h`` with ``h' = p`` and zero integration constants."""
    return p.integral()


def evaluate(p: DiffPoly, jet: Sequence):
    """Numeric (or exact rational) substitution of a jet into ``p``."""
    return p.evaluate(jet)


class LambdaPoly:
    """Polynomial in the spectral parameter with differential-polynomial coefficients.

    ``coeffs[i]`` multiplies the i-th power of the spectral parameter.  The
    element type is any :class:`BasePoly` subclass; the KdV side uses
    :class:`DiffPoly`, the NLS side its two-variable ring.
    """

    __slots__ = ("coeffs", "_elem")

    def __init__(self, coeffs: Iterable[BasePoly], elem=DiffPoly):
        coeffs = list(coeffs)
        self._elem = next((type(c) for c in coeffs if isinstance(c, BasePoly)), elem)
        coeffs = [c if isinstance(c, BasePoly) else self._elem.constant(c) for c in coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def zero(cls, elem=DiffPoly):
        return cls([], elem=elem)

    @classmethod
    def lam(cls, elem=DiffPoly):
        """The bare spectral parameter as a degree-1 polynomial."""
        return cls([elem.zero(), elem.constant(1)], elem=elem)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> BasePoly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self._elem.zero()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LambdaPoly):
            return self.coeffs == other.coeffs
        return self.coeffs == LambdaPoly([self._elem.constant(other)]).coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __add__(self, other):
        other = self._as_lpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(
            [self.coeff(i) + other.coeff(i) for i in range(n)], elem=self._elem
        )

    __radd__ = __add__

    def __neg__(self):
        return LambdaPoly([-c for c in self.coeffs], elem=self._elem)

    def __sub__(self, other):
        return self + (-self._as_lpoly(other))

    def __rsub__(self, other):
        return self._as_lpoly(other) - self

    def __mul__(self, other):
        if isinstance(other, LambdaPoly):
            out = [self._elem.zero()] * (len(self.coeffs) + len(other.coeffs))
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return LambdaPoly(out, elem=self._elem)
        return LambdaPoly([c * other for c in self.coeffs], elem=self._elem)

    __rmul__ = __mul__

    def shift(self, k: int = 1) -> "LambdaPoly":
        """Multiply by the k-th power of the spectral parameter."""
        return LambdaPoly([self._elem.zero()] * k + self.coeffs, elem=self._elem)

    def diff(self, times: int = 1) -> "LambdaPoly":
        """Coefficient-wise total x-derivative."""
        return LambdaPoly([c.diff(times) for c in self.coeffs], elem=self._elem)

    def map(self, f) -> "LambdaPoly":
        return LambdaPoly([f(c) for c in self.coeffs], elem=self._elem)

    def _as_lpoly(self, other):
        if isinstance(other, LambdaPoly):
            return other
        if isinstance(other, BasePoly):
            return LambdaPoly([other])
        return LambdaPoly([self._elem.constant(other)], elem=self._elem)

    def _render(self, latex: bool, symbol: str) -> str:
        if not self.coeffs:
            return "0"
        pieces = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            body = c.to_latex() if latex else c.to_text()
            if i == 0:
                pieces.append(body)
                continue
            power = symbol if i == 1 else (f"{symbol}^{{{i}}}" if latex else f"{symbol}^{i}")
            if len(c.terms) == 1:
                ((mono, coeff),) = c.terms.items()
                if mono == ():
                    prefix = "" if body == "1" else ("-" if body == "-1" else body)
                    pieces.append(prefix + power)
                    continue
                pieces.append(body + (" " if latex else "") + power)
            else:
                pieces.append(f"({body}){power}")
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_text(self, symbol: str = "λ") -> str:
        return self._render(latex=False, symbol=symbol)

    def to_latex(self) -> str:
        return self._render(latex=True, symbol="\\lambda")

    def __repr__(self):
        return f"LambdaPoly({self.to_text()})"

    def to_json_obj(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [c.to_json_obj() for c in self.coeffs],
        }


class LinDiffOp:
    """Linear differential operator ``sum_i c_i(x) D^i`` with DiffPoly coefficients.

    Composition follows the formal rule ``D^n f = sum_i C(n, i) f^(n-i) D^i``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[DiffPoly, int]] = ()):
        merged: dict[int, DiffPoly] = {}
        for c, n in terms:
            if not isinstance(c, BasePoly):
                c = DiffPoly.constant(c)
            if n < 0:
                raise ValueError("derivative order must be >= 0")
            merged[n] = merged.get(n, DiffPoly.zero()) + c
        self.terms = tuple(
            (c, n) for n, c in sorted(merged.items(), reverse=True) if c
        )

    @classmethod
    def D(cls, n: int = 1) -> "LinDiffOp":
        return cls([(DiffPoly.constant(1), n)])

    @classmethod
    def mul(cls, p: DiffPoly) -> "LinDiffOp":
        """Multiplication operator by a differential polynomial."""
        return cls([(p, 0)])

    def __eq__(self, other):
        return isinstance(other, LinDiffOp) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        return LinDiffOp(self.terms + other.terms)

    def __neg__(self):
        return LinDiffOp([(-c, n) for c, n in self.terms])

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "LinDiffOp") -> "LinDiffOp":
        """Operator composition ``self ∘ other``."""
        out: list[tuple[DiffPoly, int]] = []
        for ca, n in self.terms:
            for cb, m in other.terms:
                for i in range(n + 1):
                    out.append((ca * cb.diff(n - i) * comb(n, i), i + m))
        return LinDiffOp(out)

    def apply(self, p: DiffPoly) -> DiffPoly:
        """Apply the operator to a differential polynomial."""
        out = DiffPoly.zero()
        for c, n in self.terms:
            out = out + c * p.diff(n)
        return out

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, n in self.terms:
            d = "" if n == 0 else ("D" if n == 1 else f"D^{n}")
            body = c.to_text()
            if not d:
                parts.append(body)
            elif body == "1":
                parts.append(d)
            elif body == "-1":
                parts.append("-" + d)
            elif len(c.terms) == 1:
                parts.append(body + d)
            else:
                parts.append(f"({body}){d}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"LinDiffOp({self.to_text()})"


def op_commutator(a: LinDiffOp, b: LinDiffOp) -> LinDiffOp:
    """Commutator ``a ∘ b - b ∘ a`` of two linear differential operators."""
    return (a @ b) - (b @ a)
