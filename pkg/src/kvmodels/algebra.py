"""Exact Laurent polynomials and formal quotients of them.

Everything is integer-coefficient and sparse: a :class:`LaurentPoly` maps
exponent tuples (one slot per variable, negative exponents allowed) to
nonzero Python ints.  A :class:`RationalFunction` is a numerator /
denominator pair compared by cross multiplication; it is never reduced by
a general gcd, only by exact division against a short list of pivots.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Union

__all__ = [
    "VariableSet",
    "LaurentPoly",
    "RationalFunction",
    "VariableMismatch",
    "try_exact_divide",
    "substitute",
    "pivots_for",
    "kv_constants",
    "loop_factor_j",
    "quantum_integer",
]


class VariableMismatch(ValueError):
    """Operands live over different variable sets."""


class VariableSet(tuple):
    """Ordered tuple of distinct variable names."""

    def __new__(cls, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names!r}")
        return super().__new__(cls, names)

    def index(self, name: str) -> int:  # type: ignore[override]
        try:
            return tuple.index(self, name)
        except ValueError:
            raise KeyError(f"variable {name!r} not in {tuple(self)!r}") from None


def _vars(v) -> VariableSet:
    return v if isinstance(v, VariableSet) else VariableSet(v)


class LaurentPoly:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables, terms: Mapping[tuple, int] | None = None):
        self.variables = _vars(variables)
        n = len(self.variables)
        clean = {}
        if terms:
            for exp, c in terms.items():
                if c:
                    if len(exp) != n:
                        raise ValueError(f"exponent {exp} does not match {n} variables")
                    clean[tuple(exp)] = c
        self.terms: dict[tuple, int] = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, variables, c: int) -> "LaurentPoly":
        variables = _vars(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def monomial(cls, variables, powers: Mapping[str, int] | None = None, c: int = 1) -> "LaurentPoly":
        variables = _vars(variables)
        exp = [0] * len(variables)
        for name, e in (powers or {}).items():
            exp[variables.index(name)] += e
        return cls(variables, {tuple(exp): c})

    @classmethod
    def var(cls, variables, name: str, power: int = 1) -> "LaurentPoly":
        return cls.monomial(variables, {name: power})

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> int:
        return self.terms.get((0,) * len(self.variables), 0)

    def _check(self, other: "LaurentPoly") -> None:
        if self.variables != other.variables:
            raise VariableMismatch(f"{tuple(self.variables)} vs {tuple(other.variables)}")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly.constant(self.variables, other)
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial Laurent polynomial")
            (e, c), = self.terms.items()
            if c not in (1, -1):
                raise ValueError("negative power of a non-unit monomial")
            return LaurentPoly(self.variables, {tuple(-x * -k for x in e): c ** (-k)})
        result = LaurentPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, exp: tuple) -> "LaurentPoly":
        """Multiply by the monomial with exponent tuple ``exp``."""
        return LaurentPoly(
            self.variables, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()}
        )

    def min_exponents(self) -> tuple:
        return tuple(min(col) for col in zip(*self.terms)) if self.terms else (0,) * len(self.variables)

    def max_exponents(self) -> tuple:
        return tuple(max(col) for col in zip(*self.terms)) if self.terms else (0,) * len(self.variables)

    def embed(self, variables) -> "LaurentPoly":
        """Reinterpret over a superset of variables (missing slots get exponent 0)."""
        variables = _vars(variables)
        pos = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            new = [0] * len(variables)
            for p, x in zip(pos, e):
                new[p] = x
            out[tuple(new)] = c
        return LaurentPoly(variables, out)

    # comparison / hashing -----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(self.variables, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.variables), frozenset(self.terms.items())))
        return self._hash

    # rendering ----------------------------------------------------------
    def render(self) -> str:
        """Canonical text form, e.g. ``1*q^-2 + 1 + 1*q^2``."""
        if not self.terms:
            return "0"
        parts = []
        for i, e in enumerate(sorted(self.terms)):
            c = self.terms[e]
            factors = [f"{name}^{x}" for name, x in zip(self.variables, e) if x]
            body = "*".join([str(abs(c))] + factors) if factors else str(abs(c))
            if i == 0:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"LaurentPoly({tuple(self.variables)}, {self.render()!r})"


def _to_poly(p: LaurentPoly) -> tuple[LaurentPoly, tuple]:
    shift = tuple(-m for m in p.min_exponents())
    return p.shift(shift), shift


def try_exact_divide(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly | None:
    """Return ``p / d`` when ``d`` divides ``p`` in the Laurent ring, else ``None``."""
    p._check(d)
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    if d.is_monomial():
        (e, c), = d.terms.items()
        if any(v % c for v in p.terms.values()):
            return None
        neg = tuple(-x for x in e)
        return LaurentPoly(p.variables, {tuple(a + b for a, b in zip(k, neg)): v // c for k, v in p.terms.items()})
    # d' has no monomial factor, so Laurent divisibility equals polynomial divisibility
    dp, dshift = _to_poly(d)
    pp, pshift = _to_poly(p)
    lead_e = max(dp.terms)
    lead_c = dp.terms[lead_e]
    rem = dict(pp.terms)
    quot: dict[tuple, int] = {}
    n = len(p.variables)
    while rem:
        e = max(rem)
        c = rem[e]
        qe = tuple(a - b for a, b in zip(e, lead_e))
        if any(x < 0 for x in qe) or c % lead_c:
            return None
        qc = c // lead_c
        quot[qe] = qc
        for de, dc in dp.terms.items():
            k = tuple(a + b for a, b in zip(qe, de))
            v = rem.get(k, 0) - qc * dc
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    back = tuple(ds - ps for ds, ps in zip(dshift, pshift)) if n else ()
    return LaurentPoly(p.variables, quot).shift(back)


# ---------------------------------------------------------------------------


def pivots_for(variables) -> list[LaurentPoly]:
    """Fixed divisors tried when simplifying quotients over ``variables``."""
    variables = _vars(variables)
    out = []
    if "A" in variables and "B" in variables:
        out.append(LaurentPoly.var(variables, "A") - LaurentPoly.var(variables, "B"))
    if "q" in variables:
        q = LaurentPoly.var(variables, "q")
        out.append(q - q ** -1)
        if "a" in variables:
            a = LaurentPoly.var(variables, "a")
            out.append(q * a ** -1 + q ** -1 * a)
    if "z" in variables:
        out.append(LaurentPoly.var(variables, "z"))
    return out


Scalar = Union[int, LaurentPoly, "RationalFunction"]


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None, *, simplify: bool = True):
        if den is None:
            den = LaurentPoly.constant(num.variables, 1)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if simplify:
            num, den = _simplify(num, den)
        self.num = num
        self.den = den

    @property
    def variables(self) -> VariableSet:
        return self.num.variables

    @classmethod
    def constant(cls, variables, c: int) -> "RationalFunction":
        return cls(LaurentPoly.constant(variables, c))

    @classmethod
    def var(cls, variables, name: str, power: int = 1) -> "RationalFunction":
        return cls(LaurentPoly.var(variables, name, power))

    @classmethod
    def parse(cls, variables, text: str) -> "RationalFunction":
        """Parse a small arithmetic expression (``+ - * / ^``, ints, variable names)."""
        return _ExprParser(_vars(variables), text).parse()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.variables != self.variables:
                raise VariableMismatch(f"{tuple(self.variables)} vs {tuple(other.variables)}")
            return other
        if isinstance(other, LaurentPoly):
            self.num._check(other)
            return RationalFunction(other, simplify=False)
        if isinstance(other, int):
            return RationalFunction.constant(self.variables, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        f = try_exact_divide(self.den, other.den)
        if f is not None:
            return RationalFunction(self.num + other.num * f, self.den)
        f = try_exact_divide(other.den, self.den)
        if f is not None:
            return RationalFunction(self.num * f + other.num, other.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, simplify=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k)

    def equals(self, other) -> bool:
        other = self._coerce(other)
        return self.num * other.den == other.num * self.den

    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly, RationalFunction)):
            return self.equals(other)
        return NotImplemented

    __hash__ = None  # equality is by cross multiplication

    def as_laurent(self) -> LaurentPoly | None:
        """The value as a Laurent polynomial, or ``None`` if it is not one."""
        return try_exact_divide(self.num, self.den)

    def render(self) -> str:
        if self.den == LaurentPoly.constant(self.variables, 1):
            return self.num.render()
        return f"({self.num.render()})/({self.den.render()})"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"RationalFunction({tuple(self.variables)}, {self.render()!r})"


def _simplify(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if num.is_zero():
        return num, LaurentPoly.constant(num.variables, 1)
    if not den.is_monomial():
        for piv in pivots_for(num.variables):
            while not den.is_monomial():
                dq = try_exact_divide(den, piv)
                if dq is None:
                    break
                nq = try_exact_divide(num, piv)
                if nq is None:
                    break
                num, den = nq, dq
        if not den.is_monomial():
            q = try_exact_divide(num, den)
            if q is not None:
                return q, LaurentPoly.constant(num.variables, 1)
    # normalize the unit part of the denominator
    if den.is_monomial():
        (e, c), = den.terms.items()
        if c in (1, -1):
            return num.shift(tuple(-x for x in e)) * c, LaurentPoly.constant(num.variables, 1)
    lead = min(den.terms)
    shift = tuple(-x for x in den.min_exponents())
    sign = 1 if den.terms[lead] > 0 else -1
    return num.shift(shift) * sign, den.shift(shift) * sign


# ---------------------------------------------------------------------------


def _as_rf(x, variables) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction(x)
    if isinstance(x, int):
        return RationalFunction.constant(variables, x)
    raise TypeError(f"cannot bind to {x!r}")


def _subst_laurent(p: LaurentPoly, bindings: dict, target: VariableSet) -> RationalFunction:
    """Ring-homomorphic image of ``p``; denominators are cleared per variable."""
    one = LaurentPoly.constant(target, 1)
    if p.is_zero():
        return RationalFunction(LaurentPoly(target, {}))
    lo = p.min_exponents()
    hi = p.max_exponents()
    plan = []  # per variable: (num, den, num_unit, den_unit, clear_num, clear_den)
    den_total = one
    for idx, name in enumerate(p.variables):
        b = bindings[name]
        n, d = b.num, b.den
        nu, du = n.is_monomial() and abs(next(iter(n.terms.values()))) == 1, d.is_monomial() and abs(
            next(iter(d.terms.values()))
        ) == 1
        if lo[idx] < 0 and n.is_zero():
            raise ZeroDivisionError(f"variable {name!r} bound to zero but appears with a negative exponent")
        # exponents of n and d used for a term with exponent e are e+cn and cd-e
        cn = 0 if nu else max(0, -lo[idx])
        cd = 0 if du else max(0, hi[idx])
        den_total = den_total * (n ** cn if cn else one) * (d ** cd if cd else one)
        plan.append((n, d, nu, du, cn, cd, {}, {}))

    def power(cache, base, k):
        if k not in cache:
            cache[k] = base ** k
        return cache[k]

    num_total = LaurentPoly(target, {})
    acc: dict[tuple, int] = {}
    for e, c in p.terms.items():
        term = LaurentPoly.constant(target, c)
        for (n, d, nu, du, cn, cd, ncache, dcache), x in zip(plan, e):
            if x == 0 and cn == 0 and cd == 0:
                continue
            term = term * power(ncache, n, x + cn) * power(dcache, d, cd - x)
        for k, v in term.terms.items():
            acc[k] = acc.get(k, 0) + v
    num_total = LaurentPoly(target, acc)
    return RationalFunction(num_total, den_total)


def substitute(p, bindings: Mapping[str, Scalar], target=None) -> RationalFunction:
    """Apply the ring homomorphism sending each variable of ``p`` to its binding.

    ``bindings`` values may be ints, :class:`LaurentPoly` or
    :class:`RationalFunction`; all non-int bindings must share one variable
    set, which becomes the result's (``target`` overrides / is required when
    every binding is an int).
    """
    if isinstance(p, RationalFunction):
        src = p.variables
    else:
        src = p.variables
    if target is None:
        for v in bindings.values():
            if isinstance(v, (LaurentPoly, RationalFunction)):
                target = v.variables
                break
        else:
            raise ValueError("target variable set required for constant bindings")
    target = _vars(target)
    missing = [v for v in src if v not in bindings]
    if missing:
        raise KeyError(f"unbound variables {missing}")
    rb = {}
    for name, v in bindings.items():
        r = _as_rf(v, target)
        if r.variables != target:
            raise VariableMismatch(f"binding for {name!r} is over {tuple(r.variables)}")
        rb[name] = r
    if isinstance(p, RationalFunction):
        return _subst_laurent(p.num, rb, target) / _subst_laurent(p.den, rb, target)
    return _subst_laurent(p, rb, target)


# ---------------------------------------------------------------------------


class _ExprParser:
    """Recursive-descent parser for coefficient expressions."""

    def __init__(self, variables: VariableSet, text: str, symbols: Mapping[str, RationalFunction] | None = None):
        import re

        self.vars = variables
        self.symbols = dict(symbols or {})
        self.toks = re.findall(r"\d+|[A-Za-z_][A-Za-z_0-9]*|[-+*/^()]", text)
        if "".join(self.toks) != re.sub(r"\s+", "", text):
            raise ValueError(f"unparseable expression {text!r}")
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, tok=None):
        t = self.peek()
        if tok is not None and t != tok:
            raise ValueError(f"expected {tok!r}, got {t!r}")
        self.i += 1
        return t

    def parse(self) -> RationalFunction:
        v = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.peek()!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek() in ("*", "/"):
            op = self.take()
            w = self.unary()
            v = v * w if op == "*" else v / w
        return v

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            k = self.take()
            if not k or not k.isdigit():
                raise ValueError("exponent must be an integer")
            return base ** (sign * int(k))
        return base

    def atom(self):
        t = self.take()
        if t is None:
            raise ValueError("unexpected end of expression")
        if t == "(":
            v = self.expr()
            self.take(")")
            return v
        if t.isdigit():
            return RationalFunction.constant(self.vars, int(t))
        if t in self.symbols:
            return self.symbols[t]
        if t in self.vars:
            return RationalFunction.var(self.vars, t)
        raise ValueError(f"unknown symbol {t!r}")


# ---------------------------------------------------------------------------
# named constants of the graphical calculi


ABa = VariableSet(("A", "B", "a"))
QA = VariableSet(("q", "a"))
ZA = VariableSet(("z", "a"))


def kv_constants(variables=ABa) -> dict[str, RationalFunction]:
    """delta, lambda, theta, eta, mu, o, gamma, xi over ``{A, B, a}``."""
    v = _vars(variables)
    A, B, a = (RationalFunction.var(v, x) for x in ("A", "B", "a"))
    ai = a ** -1
    d = A - B
    delta = (a - ai) / d
    lam = (A * ai - B * a) / d
    theta = (B * B * a - A * A * ai) / d
    eta = (B ** 3 * a - A ** 3 * ai) / d
    return {
        "delta": delta,
        "lambda": lam,
        "theta": theta,
        "eta": eta,
        "mu": delta + 1,
        "o": lam - (A + B),
        "gamma": theta + A * B,
        "xi": eta,
    }


def loop_factor_j(variables=QA) -> RationalFunction:
    """``1 / (q a^-1 + q^-1 a)``."""
    v = _vars(variables)
    q, a = RationalFunction.var(v, "q"), RationalFunction.var(v, "a")
    return (q / a + a / q).inverse()


def quantum_integer(n: int, variables=("q",)) -> RationalFunction:
    v = _vars(variables)
    q = RationalFunction.var(v, "q")
    return (q ** n - q ** -n) / (q - q ** -1)
