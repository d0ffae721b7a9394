"""Exact differential-polynomial ring.

Every determining equation, compatibility condition and ODE in the package is a
:class:`DPoly`: a sparse map from monomials to exact coefficients.  Monomials
are products of interned symbols (base variables, the formal constant ``hbar``,
parameters and jet symbols standing for derivatives of unknown functions).

Coefficients are :class:`fractions.Fraction` when real and :class:`GaussRat`
when an imaginary part is present, so real algebra never pays for complex
arithmetic.  Parameter and base-variable exponents may be negative (Laurent
monomials); this is how division by a leading coefficient such as ``hbar^4``
or ``z0^2`` stays exact without rational functions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "GaussRat", "gauss", "Symbol", "DPoly", "OdeRelation", "ReductionError",
    "sym", "base", "hbar_symbol", "param", "jet", "var", "const", "HBAR", "I",
    "differentiate", "reduce_mod_ode", "integrate_by_parts", "collect",
    "binom", "register_function", "function_deps",
]


def binom(n: int, k: int) -> int:
    """Binomial coefficient that vanishes whenever an argument is negative."""
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussRat:
    """Exact complex number ``re + im*i`` with rational parts.

    Instances are only created for genuinely complex values; use :func:`gauss`
    which collapses to ``Fraction`` when the imaginary part is zero.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _parts(o):
        if isinstance(o, GaussRat):
            return o.re, o.im
        if isinstance(o, (int, Fraction, Rational)):
            return Fraction(o), Fraction(0)
        return None

    def __add__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        return gauss(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        return gauss(self.re - p[0], self.im - p[1])

    def __rsub__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        return gauss(p[0] - self.re, p[1] - self.im)

    def __mul__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return gauss(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        c, d = p
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        a, b = self.re, self.im
        return gauss((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        return GaussRat(*p) / self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __eq__(self, o):
        p = self._parts(o)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def conjugate(self):
        return gauss(self.re, -self.im)

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"


Coeff = Union[Fraction, GaussRat]


def gauss(re, im=0) -> Coeff:
    """Return ``re + im*i``, as a plain ``Fraction`` when ``im == 0``."""
    im = Fraction(im)
    if im == 0:
        return Fraction(re)
    return GaussRat(re, im)


def conj(c: Coeff) -> Coeff:
    return c.conjugate() if isinstance(c, GaussRat) else c


def is_real_coeff(c: Coeff) -> bool:
    return not isinstance(c, GaussRat)


# --------------------------------------------------------------------------
# Symbols

KIND_ORDER = {"base": 0, "formal": 1, "param": 2, "jet": 3}


@dataclass(frozen=True)
class Symbol:
    """A generator of the ring.

    ``index`` and ``deps`` are only meaningful for jets: ``deps`` lists the base
    variables the dependent function depends on and ``index`` gives the
    derivative order along each of them.  Negative orders denote formal
    antiderivatives.
    """

    kind: str
    name: str
    index: Tuple[int, ...] = ()
    deps: Tuple[str, ...] = ()

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.name, self.index)

    @property
    def order(self) -> int:
        return sum(self.index)

    def text(self) -> str:
        if self.kind != "jet":
            return self.name
        if all(i == 0 for i in self.index):
            return self.name
        return f"{self.name}^({','.join(str(i) for i in self.index)})"


_LOCK = threading.Lock()
_SYMBOLS: List[Symbol] = []
_IDS: Dict[Symbol, int] = {}


def sym(s: Symbol) -> int:
    """Intern ``s`` and return its integer id."""
    sid = _IDS.get(s)
    if sid is not None:
        return sid
    with _LOCK:
        sid = _IDS.get(s)
        if sid is None:
            sid = len(_SYMBOLS)
            _SYMBOLS.append(s)
            _IDS[s] = sid
    return sid


def symbol_of(sid: int) -> Symbol:
    return _SYMBOLS[sid]


# dependency table for named functions; extended by register_function
_FUNCTION_DEPS: Dict[str, Tuple[str, ...]] = {
    "V1": ("x",), "V2": ("y",),
    "F1": ("x",), "F2": ("y",),
    "U1": ("x",), "U2": ("y",),
    "F": ("z",), "U": ("z",), "P1": ("z",), "V": ("z",),
}


def register_function(name: str, deps: Sequence[str]) -> None:
    with _LOCK:
        _FUNCTION_DEPS[name] = tuple(deps)


def function_deps(name: str) -> Optional[Tuple[str, ...]]:
    if name in _FUNCTION_DEPS:
        return _FUNCTION_DEPS[name]
    if name.startswith("f_") or name.startswith("C_"):
        return ("x", "y")
    return None


Monomial = Tuple[Tuple[int, int], ...]
ONE_MONO: Monomial = ()


@lru_cache(maxsize=None)
def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        n = d.get(s, 0) + e
        if n:
            d[s] = n
        else:
            del d[s]
    return tuple(sorted(d.items()))


@lru_cache(maxsize=None)
def _lift(sid: int, v: str) -> Optional[int]:
    """Jet id obtained by differentiating jet ``sid`` once along ``v``."""
    s = _SYMBOLS[sid]
    if v not in s.deps:
        return None
    k = s.deps.index(v)
    idx = list(s.index)
    idx[k] += 1
    return sym(Symbol("jet", s.name, tuple(idx), s.deps))


# --------------------------------------------------------------------------
# DPoly


def _c(x) -> Coeff:
    if isinstance(x, (Fraction, GaussRat)):
        return x
    return Fraction(x)


class DPoly:
    """Sparse exact polynomial over Gaussian rationals.

    Treated as immutable: every operation returns a new instance.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Coeff]] = None):
        self.terms: Dict[Monomial, Coeff] = {}
        if terms:
            for m, c in terms.items():
                if c != 0:
                    self.terms[m] = c
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Coeff]) -> "DPoly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # construction helpers
    @classmethod
    def constant(cls, c) -> "DPoly":
        c = _c(c)
        return cls._raw({ONE_MONO: c} if c != 0 else {})

    @classmethod
    def from_symbol(cls, s: Symbol, exp: int = 1) -> "DPoly":
        return cls._raw({((sym(s), exp),): Fraction(1)})

    # arithmetic
    def __add__(self, other) -> "DPoly":
        if not isinstance(other, DPoly):
            other = DPoly.constant(other)
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for m, c in b.items():
            n = out.get(m)
            if n is None:
                out[m] = c
            else:
                n = n + c
                if n == 0:
                    del out[m]
                else:
                    out[m] = n
        return DPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "DPoly":
        return DPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "DPoly":
        if not isinstance(other, DPoly):
            other = DPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "DPoly":
        return (-self) + other

    def __mul__(self, other) -> "DPoly":
        if not isinstance(other, DPoly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return DPoly._raw({})
        out: Dict[Monomial, Coeff] = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                n = get(m)
                out[m] = c1 * c2 if n is None else n + c1 * c2
        return DPoly._raw({m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def scale(self, k) -> "DPoly":
        k = _c(k)
        if k == 0:
            return DPoly._raw({})
        if k == 1:
            return self
        return DPoly._raw({m: c * k for m, c in self.terms.items()})

    def __truediv__(self, k) -> "DPoly":
        if isinstance(k, DPoly):
            return self.div_exact(k)
        return self.scale(Fraction(1) / _c(k) if not isinstance(k, GaussRat) else 1 / k)

    def __pow__(self, n: int) -> "DPoly":
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial")
            (m, c), = self.terms.items()
            return DPoly._raw({tuple((s, e * n) for s, e in m): Fraction(1) / c ** (-n) if not isinstance(c, GaussRat) else 1 / _gpow(c, -n)})
        result = DPoly.constant(1)
        b = self
        while n:
            if n & 1:
                result = result * b
            n >>= 1
            if n:
                b = b * b
        return result

    def div_exact(self, d: "DPoly") -> "DPoly":
        """Divide by a single-term divisor (Laurent monomial division)."""
        if len(d.terms) != 1:
            raise ValueError("can only divide by a monomial")
        (m, c), = d.terms.items()
        inv_m = tuple((s, -e) for s, e in m)
        inv_c = Fraction(1) / c if not isinstance(c, GaussRat) else 1 / c
        return DPoly._raw({mono_mul(mm, inv_m): cc * inv_c for mm, cc in self.terms.items()})

    # comparisons
    def __eq__(self, other) -> bool:
        if isinstance(other, DPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussRat)):
            return self.terms == DPoly.constant(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get(ONE_MONO, Fraction(0))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Coeff]]:
        return iter(self.terms.items())

    # inspection
    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(_SYMBOLS[s])
        return out

    def jets(self, name: Optional[str] = None) -> set:
        return {s for s in self.symbols() if s.kind == "jet" and (name is None or s.name == name)}

    def degree(self, s: Symbol) -> int:
        sid = sym(s)
        return max((dict(m).get(sid, 0) for m in self.terms), default=0)

    def is_real(self) -> bool:
        return all(not isinstance(c, GaussRat) for c in self.terms.values())

    def conjugate(self) -> "DPoly":
        return DPoly._raw({m: conj(c) for m, c in self.terms.items()})

    def real_part(self) -> "DPoly":
        return DPoly({m: (c.re if isinstance(c, GaussRat) else c) for m, c in self.terms.items()})

    def imag_part(self) -> "DPoly":
        return DPoly({m: (c.im if isinstance(c, GaussRat) else Fraction(0)) for m, c in self.terms.items()})

    def hbar_grades(self) -> Dict[int, "DPoly"]:
        """Split by power of ``hbar``."""
        h = sym(HBAR_SYM)
        out: Dict[int, Dict[Monomial, Coeff]] = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(h, 0)
            out.setdefault(e, {})[tuple(sorted(d.items()))] = c
        return {e: DPoly._raw(t) for e, t in out.items()}

    # substitution
    def subs(self, mapping: Mapping[Symbol, Union["DPoly", int, Fraction]]) -> "DPoly":
        """Substitute symbols by polynomials (non-negative powers only for non-monomials)."""
        ids = {sym(s): (v if isinstance(v, DPoly) else DPoly.constant(v)) for s, v in mapping.items()}
        out = DPoly._raw({})
        cache: Dict[Tuple[int, int], DPoly] = {}
        acc: Dict[Monomial, Coeff] = {}
        for m, c in self.terms.items():
            keep = []
            factor = None
            for s, e in m:
                if s in ids:
                    key = (s, e)
                    if key not in cache:
                        cache[key] = ids[s] ** e
                    factor = cache[key] if factor is None else factor * cache[key]
                else:
                    keep.append((s, e))
            if factor is None:
                acc[m] = acc.get(m, 0) + c
            else:
                out = out + factor * DPoly._raw({tuple(keep): c})
        return out + DPoly(acc)

    def subs_function(self, name: str, replacement: "DPoly") -> "DPoly":
        """Replace every jet of ``name`` by the matching derivative of ``replacement``."""
        mapping = {}
        for s in self.jets(name):
            r = replacement
            for v, k in zip(s.deps, s.index):
                if k < 0:
                    raise ValueError(f"cannot substitute into antiderivative jet {s.text()}")
                for _ in range(k):
                    r = differentiate(r, v)
            mapping[s] = r
        return self.subs(mapping) if mapping else self

    def coeff(self, mono: "DPoly") -> "DPoly":
        """Coefficient of an exact monomial (other symbols kept)."""
        (m, _), = mono.terms.items()
        md = dict(m)
        out: Dict[Monomial, Coeff] = {}
        for mm, c in self.terms.items():
            d = dict(mm)
            ok = True
            for s, e in md.items():
                if d.get(s, 0) != e:
                    ok = False
                    break
                del d[s]
            if ok:
                out[tuple(sorted(d.items()))] = c
        return DPoly._raw(out)

    def map_coeffs(self, f) -> "DPoly":
        return DPoly({m: f(c) for m, c in self.terms.items()})

    def primitive(self) -> Tuple[Fraction, "DPoly"]:
        """Split off a positive rational content so the result has integer coprime coefficients."""
        if not self.terms or not self.is_real():
            return Fraction(1), self
        from math import gcd
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        content = Fraction(num, den)
        lead = self.terms[min(self.terms, key=_mono_sort_key)]
        if lead < 0:
            content = -content
        return content, self.scale(1 / content)

    def __repr__(self) -> str:
        return f"DPoly({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)


def _gpow(c: GaussRat, n: int):
    r = Fraction(1)
    for _ in range(n):
        r = c * r
    return r


# --------------------------------------------------------------------------
# named constructors

HBAR_SYM = Symbol("formal", "hbar")


def base(name: str) -> Symbol:
    return Symbol("base", name)


def hbar_symbol() -> Symbol:
    return HBAR_SYM


def param(name: str) -> Symbol:
    return Symbol("param", name)


def jet(name: str, index: Union[int, Sequence[int]] = 0, deps: Optional[Sequence[str]] = None) -> Symbol:
    if deps is None:
        deps = function_deps(name)
        if deps is None:
            raise KeyError(f"unknown function {name!r}")
    if isinstance(index, int):
        index = (index,) + (0,) * (len(deps) - 1)
    index = tuple(index)
    if len(index) != len(deps):
        raise ValueError("multi-index length does not match dependency list")
    return Symbol("jet", name, index, tuple(deps))


def var(s: Union[Symbol, str], exp: int = 1) -> DPoly:
    """DPoly for a symbol; strings name base variables, hbar or parameters."""
    if isinstance(s, str):
        s = _symbol_from_name(s)
    return DPoly.from_symbol(s, exp)


def const(c) -> DPoly:
    return DPoly.constant(c)


def _symbol_from_name(name: str) -> Symbol:
    if name in ("x", "y", "z"):
        return base(name)
    if name == "hbar":
        return HBAR_SYM
    return param(name)


HBAR = DPoly.from_symbol(HBAR_SYM)
I = DPoly.constant(GaussRat(0, 1))


# --------------------------------------------------------------------------
# core operations


def differentiate(p: DPoly, v: str, times: int = 1) -> DPoly:
    """Total derivative along base variable ``v``; jets lift their multi-index."""
    for _ in range(times):
        p = _diff_once(p, v)
    return p


def _diff_once(p: DPoly, v: str) -> DPoly:
    vid = sym(base(v))
    out: Dict[Monomial, Coeff] = {}
    for m, c in p.terms.items():
        for i, (s, e) in enumerate(m):
            if s == vid:
                rest = m[:i] + ((s, e - 1),) + m[i + 1:] if e != 1 else m[:i] + m[i + 1:]
                key = rest
                out[key] = out.get(key, 0) + c * e
                continue
            lifted = _lift(s, v) if _SYMBOLS[s].kind == "jet" else None
            if lifted is None:
                continue
            rest = m[:i] + ((s, e - 1),) + m[i + 1:] if e != 1 else m[:i] + m[i + 1:]
            key = mono_mul(rest, ((lifted, 1),))
            out[key] = out.get(key, 0) + c * e
    return DPoly._raw({m: c for m, c in out.items() if c != 0})


def _mono_sort_key(m: Monomial):
    return tuple((_SYMBOLS[s].sort_key, e) for s, e in sorted(m, key=lambda t: _SYMBOLS[t[0]].sort_key))


def collect(p: DPoly, targets: Iterable[Symbol]) -> Dict[DPoly, DPoly]:
    """Group ``p`` by monomials in ``targets``: ``p == sum(k * v for k, v in result)``."""
    tids = {sym(t) for t in targets}
    groups: Dict[Monomial, Dict[Monomial, Coeff]] = {}
    for m, c in p.terms.items():
        key = tuple((s, e) for s, e in m if s in tids)
        rest = tuple((s, e) for s, e in m if s not in tids)
        groups.setdefault(key, {})[rest] = c
    return {DPoly._raw({k: Fraction(1)}): DPoly._raw(v) for k, v in groups.items()}


class ReductionError(ValueError):
    pass


class OdeRelation:
    """``dep^(n) = rhs`` obtained by solving a defining polynomial for its highest derivative."""

    def __init__(self, dep: str, indep: str, defining: DPoly):
        self.dep = dep
        self.indep = indep
        self.defining = defining
        jets = [s for s in defining.jets(dep)]
        if not jets:
            raise ReductionError(f"relation does not involve {dep}")
        top = max(jets, key=lambda s: s.order)
        self.order = top.order
        self.leading = top
        if defining.degree(top) != 1:
            raise ReductionError(f"highest derivative {top.text()} does not appear linearly")
        lead = defining.coeff(DPoly.from_symbol(top))
        if len(lead.terms) != 1 or any(_SYMBOLS[s].kind == "jet" for m in lead.terms for s, _ in m):
            raise ReductionError(
                f"leading coefficient {to_text(lead)} of {top.text()} is not an invertible monomial")
        rest = defining - lead * DPoly.from_symbol(top)
        self.rhs = (-rest).div_exact(lead)

    def __repr__(self):
        return f"OdeRelation({self.leading.text()} = {to_text(self.rhs)})"


def reduce_mod_ode(p: DPoly, rels: Sequence[OdeRelation]) -> DPoly:
    """Rewrite every jet at or above a relation's order using the relation and its derivatives."""
    for _ in range(64):
        changed = False
        for rel in rels:
            high = [s for s in p.jets(rel.dep) if s.order >= rel.order]
            if not high:
                continue
            table = _derivative_table(rel, max(s.order for s in high), rels)
            p = p.subs({s: table[s.order] for s in high})
            changed = True
        if not changed:
            return p
    raise ReductionError("reduction did not terminate")


def _derivative_table(rel: OdeRelation, top: int, rels: Sequence[OdeRelation]) -> Dict[int, DPoly]:
    table = {rel.order: rel.rhs}
    cur = rel.rhs
    for k in range(rel.order + 1, top + 1):
        cur = differentiate(cur, rel.indep)
        sub = {s: table[s.order] for s in cur.jets(rel.dep) if s.order >= rel.order}
        if sub:
            cur = cur.subs(sub)
        table[k] = cur
    return table


def integrate_by_parts(p: DPoly, v: str, fresh: bool = False) -> Tuple[DPoly, DPoly]:
    """Heuristic antiderivative along ``v``.

    Returns ``(A, R)`` with ``differentiate(A, v) + R == p``.  Polynomial terms
    in ``v`` integrate directly; terms linear in the highest jet are absorbed
    by integrating their coefficient with respect to the next-lower jet.
    Whatever cannot be absorbed is returned in ``R``.  With ``fresh=True`` the
    residual order-zero jets are absorbed too by introducing antiderivative
    jets of negative order (``V1^(-1)``).
    """
    vid = sym(base(v))
    anti = DPoly._raw({})
    resid = DPoly._raw({})
    work = p
    for _ in range(10_000):
        if work.is_zero():
            break
        jets = [s for s in work.jets() if v in s.deps]
        if not jets:
            # polynomial in v
            out = {}
            for m, c in work.terms.items():
                d = dict(m)
                e = d.get(vid, 0)
                if e == -1:
                    resid = resid + DPoly._raw({m: c})
                    continue
                d[vid] = e + 1
                out[tuple(sorted(d.items()))] = c / (e + 1)
            anti = anti + DPoly(out)
            break
        top = max(jets, key=lambda s: (s.order, s.sort_key))
        tid = sym(top)
        linear: Dict[Monomial, Coeff] = {}
        other: Dict[Monomial, Coeff] = {}
        for m, c in work.terms.items():
            d = dict(m)
            if d.get(tid, 0) == 1:
                del d[tid]
                linear[tuple(sorted(d.items()))] = c
            else:
                other[m] = c
        g = DPoly._raw(linear)
        k = top.deps.index(v)
        lower_idx = list(top.index)
        lower_idx[k] -= 1
        lower = Symbol("jet", top.name, tuple(lower_idx), top.deps)
        bad_higher = any(_SYMBOLS[s].name == top.name and _SYMBOLS[s].order >= top.order
                         for m in g.terms for s, _ in m)
        if bad_higher or g.is_zero() or (lower_idx[k] < 0 and not fresh):
            # nonlinear in top, or nothing below: residual for this whole block
            block = {m: c for m, c in work.terms.items() if dict(m).get(tid, 0) >= 1}
            resid = resid + DPoly._raw(block)
            work = DPoly._raw({m: c for m, c in work.terms.items() if dict(m).get(tid, 0) == 0})
            continue
        G = _integrate_in_symbol(g, lower)
        anti = anti + G
        work = DPoly._raw(other) + (g * DPoly.from_symbol(top) - differentiate(G, v))
    else:
        raise RuntimeError("integration heuristic did not terminate")
    return anti, resid


def _integrate_in_symbol(g: DPoly, s: Symbol) -> DPoly:
    sid = sym(s)
    out = {}
    for m, c in g.terms.items():
        d = dict(m)
        e = d.get(sid, 0)
        d[sid] = e + 1
        out[tuple(sorted(d.items()))] = c / (e + 1)
    return DPoly(out)


# --------------------------------------------------------------------------
# printing


def _coeff_text(c: Coeff) -> str:
    if isinstance(c, GaussRat):
        re, im = c.re, c.im
        imt = "i" if im == 1 else ("-i" if im == -1 else f"{im}*i")
        if re == 0:
            return imt
        sign = "+" if im > 0 else "-"
        imabs = -im if im < 0 else im
        imt = "i" if imabs == 1 else f"{imabs}*i"
        return f"({re} {sign} {imt})"
    return str(c)


def _factor_text(s: Symbol, e: int, pretty: bool) -> str:
    t = s.text()
    if pretty and s.kind == "formal":
        t = "ħ"
    if e == 1:
        return t
    return f"{t}^{e}"


def to_text(p: DPoly, pretty: bool = False) -> str:
    """Canonical printer; output parses back to an equal DPoly."""
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda t: _mono_sort_key(t[0]))
    parts = []
    for m, c in items:
        fs = sorted(m, key=lambda t: _SYMBOLS[t[0]].sort_key)
        ftxt = "*".join(_factor_text(_SYMBOLS[s], e, pretty) for s, e in fs)
        neg = False
        if (c.re == 0 and c.im < 0) if isinstance(c, GaussRat) else c < 0:
            neg = True
            c = -c
        ct = _coeff_text(c)
        if ftxt:
            body = ftxt if c == 1 else f"{ct}*{ftxt}"
        else:
            body = ct
        parts.append(("-" if neg else "+", body))
    out = ("-" + parts[0][1]) if parts[0][0] == "-" else parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out
