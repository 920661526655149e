# Copyright 2025 The dtools.projective Contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""### Module dtools.projective.symexpr - symbolic scalar expressions

Immutable expression trees over chart coordinates and named parameters.

- *class* `Expr`: base of the node classes
  - `Const`: exact rational constant
  - `Var`: coordinate or parameter name
  - `Sum`, `Product`: n-ary nodes
  - `Neg`, `Quotient`, `Power` (integer exponent)
  - `Call`: one of the unary functions in `FUNCTIONS`
- *function* `parse`: text to `Expr`, LALR grammar built with lark
- *function* `to_text`: `Expr` to text, `parse(to_text(e)) == e` for parsed
  and simplified trees
- *function* `diff`: exact symbolic derivative, result simplified
- *function* `simplify`: constant folding, 0/1 identities, collection of
  identical terms and factors, no factorization
- *function* `evaluate`: IEEE double value at a full assignment
- *function* `lambdify`: compiled evaluator for repeated numeric use
- *function* `substitute`: replace variables by expressions

Grammar: identifiers `[A-Za-z][A-Za-z0-9_]*`, integer and decimal literals,
binary `+ - * / ^` with the usual precedence (`^` binds tightest and is right
associative, its exponent must be an integer literal), unary minus,
parentheses and calls `f(e)`.

"""

from __future__ import annotations

__all__ = [
    'Expr', 'Const', 'Var', 'Sum', 'Neg', 'Product', 'Quotient', 'Power', 'Call',
    'FUNCTIONS', 'ZERO', 'ONE',
    'ExprSyntaxError', 'UnknownIdentifierError', 'EvalDomainError',
    'MissingVariableError',
    'as_expr', 'parse', 'to_text', 'diff', 'simplify', 'evaluate',
    'lambdify', 'substitute', 'free_variables',
]

import logging
import math
from collections.abc import Callable, Collection, Mapping, Sequence
from fractions import Fraction
from functools import lru_cache
from typing import Final, Never

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

log = logging.getLogger(__name__)

FUNCTIONS: Final[frozenset[str]] = frozenset(
    {'sin', 'cos', 'sinh', 'cosh', 'exp', 'log', 'sqrt'}
)


class ExprSyntaxError(ValueError):
    """Text does not conform to the expression grammar."""

    def __init__(self, msg: str, offset: int) -> None:
        super().__init__(f'{msg} (byte offset {offset})')
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    """Identifier is neither an allowed variable nor a known function."""

    def __init__(self, name: str, offset: int) -> None:
        super().__init__(f'unknown identifier {name!r}', offset)
        self.name = name


class EvalDomainError(ArithmeticError):
    """Evaluation left the domain: zero denominator, log of non-positive, ..."""


class MissingVariableError(LookupError):
    """Assignment does not cover every free variable."""


# -- Nodes ---------------------------------------------------------------------


class Expr:
    """Base of the immutable expression node classes.

    - structural equality, cached hash
    - arithmetic operators build raw (unsimplified) trees
    - `str()` gives the text form accepted by `parse`

    """

    __slots__ = ('_hash',)

    def _key(self) -> tuple[object, ...]:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        assert isinstance(other, Expr)
        if self._hash != other._hash:
            return False
        return self._key() == other._key()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __str__(self) -> str:
        return to_text(self)

    def __add__(self, other: Expr | int | Fraction) -> Expr:
        return Sum((self, as_expr(other)))

    def __radd__(self, other: int | Fraction) -> Expr:
        return Sum((as_expr(other), self))

    def __sub__(self, other: Expr | int | Fraction) -> Expr:
        return Sum((self, Neg(as_expr(other))))

    def __rsub__(self, other: int | Fraction) -> Expr:
        return Sum((as_expr(other), Neg(self)))

    def __mul__(self, other: Expr | int | Fraction) -> Expr:
        return Product((self, as_expr(other)))

    def __rmul__(self, other: int | Fraction) -> Expr:
        return Product((as_expr(other), self))

    def __truediv__(self, other: Expr | int | Fraction) -> Expr:
        return Quotient(self, as_expr(other))

    def __rtruediv__(self, other: int | Fraction) -> Expr:
        return Quotient(as_expr(other), self)

    def __neg__(self) -> Expr:
        return Neg(self)

    def __pow__(self, exponent: int) -> Expr:
        return Power(self, exponent)


class Const(Expr):
    __slots__ = ('value',)
    __match_args__ = ('value',)

    def __init__(self, value: Fraction | int) -> None:
        self.value = Fraction(value)
        self._hash = hash(('Const', self.value))

    def _key(self) -> tuple[object, ...]:
        return (self.value,)

    def __repr__(self) -> str:
        return f'Const({self.value})'


class Var(Expr):
    __slots__ = ('name',)
    __match_args__ = ('name',)

    def __init__(self, name: str) -> None:
        self.name = name
        self._hash = hash(('Var', name))

    def _key(self) -> tuple[object, ...]:
        return (self.name,)

    def __repr__(self) -> str:
        return f'Var({self.name})'


class Sum(Expr):
    __slots__ = ('terms',)
    __match_args__ = ('terms',)

    def __init__(self, terms: Sequence[Expr]) -> None:
        self.terms = tuple(terms)
        self._hash = hash(('Sum', self.terms))

    def _key(self) -> tuple[object, ...]:
        return self.terms

    def __repr__(self) -> str:
        return 'Sum(' + ', '.join(map(repr, self.terms)) + ')'


class Neg(Expr):
    __slots__ = ('arg',)
    __match_args__ = ('arg',)

    def __init__(self, arg: Expr) -> None:
        self.arg = arg
        self._hash = hash(('Neg', arg))

    def _key(self) -> tuple[object, ...]:
        return (self.arg,)

    def __repr__(self) -> str:
        return f'Neg({self.arg!r})'


class Product(Expr):
    __slots__ = ('factors',)
    __match_args__ = ('factors',)

    def __init__(self, factors: Sequence[Expr]) -> None:
        self.factors = tuple(factors)
        self._hash = hash(('Product', self.factors))

    def _key(self) -> tuple[object, ...]:
        return self.factors

    def __repr__(self) -> str:
        return 'Product(' + ', '.join(map(repr, self.factors)) + ')'


class Quotient(Expr):
    __slots__ = ('num', 'den')
    __match_args__ = ('num', 'den')

    def __init__(self, num: Expr, den: Expr) -> None:
        self.num = num
        self.den = den
        self._hash = hash(('Quotient', num, den))

    def _key(self) -> tuple[object, ...]:
        return (self.num, self.den)

    def __repr__(self) -> str:
        return f'Quotient({self.num!r}, {self.den!r})'


class Power(Expr):
    __slots__ = ('base', 'exponent')
    __match_args__ = ('base', 'exponent')

    def __init__(self, base: Expr, exponent: int) -> None:
        self.base = base
        self.exponent = int(exponent)
        self._hash = hash(('Power', base, self.exponent))

    def _key(self) -> tuple[object, ...]:
        return (self.base, self.exponent)

    def __repr__(self) -> str:
        return f'Power({self.base!r}, {self.exponent})'


class Call(Expr):
    __slots__ = ('func', 'arg')
    __match_args__ = ('func', 'arg')

    def __init__(self, func: str, arg: Expr) -> None:
        if func not in FUNCTIONS:
            msg = f'Call: unknown function {func!r}'
            raise ValueError(msg)
        self.func = func
        self.arg = arg
        self._hash = hash(('Call', func, arg))

    def _key(self) -> tuple[object, ...]:
        return (self.func, self.arg)

    def __repr__(self) -> str:
        return f'Call({self.func}, {self.arg!r})'


ZERO: Final[Const] = Const(0)
ONE: Final[Const] = Const(1)


def as_expr(x: Expr | int | float | Fraction | str) -> Expr:
    """Coerce numbers and names to expressions.

    - floats convert through their shortest decimal repr, `0.3` is `3/10`
    - strings are parsed

    """
    match x:
        case Expr():
            return x
        case bool():
            msg = 'as_expr: booleans are not expressions'
            raise TypeError(msg)
        case int() | Fraction():
            return Const(x)
        case float():
            if not math.isfinite(x):
                msg = f'as_expr: non-finite constant {x}'
                raise ValueError(msg)
            return Const(Fraction(repr(x)))
        case str():
            return parse(x)
    msg = f'as_expr: cannot convert {type(x).__name__}'
    raise TypeError(msg)


def _negate(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    return Neg(e)


# -- Parsing -------------------------------------------------------------------

_GRAMMAR = r"""
?start: sum

?sum: product
    | sum "+" product   -> add
    | sum "-" product   -> sub

?product: unary
    | product "*" unary -> mul
    | product "/" unary -> div

?unary: power
    | "-" unary         -> neg
    | "+" unary         -> pos

?power: atom
    | atom "^" unary    -> pow

?atom: number
    | name
    | call
    | group

number: NUMBER
name: NAME
call: NAME "(" sum ")"
group: "(" sum ")"

NUMBER: /[0-9]+(\.[0-9]+)?/
NAME: /[A-Za-z][A-Za-z0-9_]*/

%import common.WS
%ignore WS
"""

_PARSER: Final[Lark] = Lark(_GRAMMAR, parser='lalr', propagate_positions=True)


class _Group:
    """Parenthesized subtree, kept apart so it is not flattened."""

    __slots__ = ('expr',)

    def __init__(self, expr: Expr) -> None:
        self.expr = expr


def _u(x: Expr | _Group) -> Expr:
    return x.expr if isinstance(x, _Group) else x


class _ToExpr(Transformer[Token, Expr | _Group]):
    def __init__(
        self,
        text: str,
        allowed: Collection[str] | None,
        aliases: Mapping[str, str],
    ) -> None:
        super().__init__()
        self._text = text
        self._allowed = allowed
        self._aliases = aliases

    def _offset(self, pos: int) -> int:
        return len(self._text[:pos].encode('utf-8'))

    def number(self, items: list[Token]) -> Expr:
        return Const(Fraction(str(items[0])))

    def name(self, items: list[Token]) -> Expr:
        tok = items[0]
        ident = self._aliases.get(str(tok), str(tok))
        if ident in FUNCTIONS or (self._allowed is not None and ident not in self._allowed):
            raise UnknownIdentifierError(str(tok), self._offset(tok.start_pos or 0))
        return Var(ident)

    def call(self, items: list[Token | Expr | _Group]) -> Expr:
        tok = items[0]
        assert isinstance(tok, Token)
        if str(tok) not in FUNCTIONS:
            raise UnknownIdentifierError(str(tok), self._offset(tok.start_pos or 0))
        arg = items[1]
        assert not isinstance(arg, Token)
        return Call(str(tok), _u(arg))

    def group(self, items: list[Expr | _Group]) -> _Group:
        return _Group(_u(items[0]))

    def add(self, items: list[Expr | _Group]) -> Expr:
        left, right = items
        if isinstance(left, Sum):
            return Sum(left.terms + (_u(right),))
        return Sum((_u(left), _u(right)))

    def sub(self, items: list[Expr | _Group]) -> Expr:
        left, right = items
        if isinstance(left, Sum):
            return Sum(left.terms + (_negate(_u(right)),))
        return Sum((_u(left), _negate(_u(right))))

    def mul(self, items: list[Expr | _Group]) -> Expr:
        left, right = items
        if isinstance(left, Product):
            return Product(left.factors + (_u(right),))
        return Product((_u(left), _u(right)))

    def div(self, items: list[Expr | _Group]) -> Expr:
        num, den = _u(items[0]), _u(items[1])
        if isinstance(num, Const) and isinstance(den, Const) and den.value != 0:
            return Const(num.value / den.value)
        return Quotient(num, den)

    def neg(self, items: list[Expr | _Group]) -> Expr:
        return _negate(_u(items[0]))

    def pos(self, items: list[Expr | _Group]) -> Expr:
        return _u(items[0])

    @v_args(meta=True)
    def pow(self, meta: object, items: list[Expr | _Group]) -> Expr:
        base, exponent = _u(items[0]), _u(items[1])
        if not (isinstance(exponent, Const) and exponent.value.denominator == 1):
            pos = getattr(meta, 'end_pos', 0) or 0
            raise ExprSyntaxError('exponent must be an integer literal', self._offset(pos))
        return Power(base, int(exponent.value))


def parse(
    text: str,
    allowed: Collection[str] | None = None,
    aliases: Mapping[str, str] | None = None,
) -> Expr | Never:
    """Parse expression text.

    - `allowed`: when given, the only identifiers accepted as variables
    - `aliases`: identifier renames applied first, charts map `x0..x9` to
      their coordinate names this way
    - raises `ExprSyntaxError` or `UnknownIdentifierError` with a byte offset

    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        pos = getattr(exc, 'pos_in_stream', None)
        if pos is None or pos < 0:
            pos = len(text)
        offset = len(text[:pos].encode('utf-8'))
        raise ExprSyntaxError(f'syntax error in {text!r}', offset) from None
    try:
        result = _ToExpr(text, allowed, aliases or {}).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, ExprSyntaxError):
            raise exc.orig_exc from None
        raise
    return _u(result)


# -- Printing ------------------------------------------------------------------


def _is_atomic(e: Expr) -> bool:
    match e:
        case Var() | Call():
            return True
        case Const(value):
            return value.denominator == 1 and value >= 0
    return False


def _paren(e: Expr) -> str:
    return '(' + to_text(e) + ')'


def _const_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


@lru_cache(maxsize=1 << 16)
def to_text(e: Expr) -> str:
    """Text form of an expression, accepted back by `parse`."""
    match e:
        case Const(value):
            return _const_text(value)
        case Var(name):
            return name
        case Call(func, arg):
            return f'{func}({to_text(arg)})'
        case Power(base, exponent):
            base_text = to_text(base) if _is_atomic(base) else _paren(base)
            return f'{base_text}^{exponent}'
        case Neg(arg):
            if _is_atomic(arg) and not isinstance(arg, Const) or isinstance(arg, Power):
                return '-' + to_text(arg)
            return '-' + _paren(arg)
        case Sum(terms):
            if not terms:
                return '0'
            first = terms[0]
            parts = [_paren(first) if isinstance(first, Sum) else to_text(first)]
            for term in terms[1:]:
                match term:
                    case Neg(arg):
                        parts.append(' - ' + (_paren(arg) if isinstance(arg, Sum) else to_text(arg)))
                    case Const(value) if value < 0:
                        parts.append(' - ' + _const_text(-value))
                    case Sum():
                        parts.append(' + ' + _paren(term))
                    case _:
                        parts.append(' + ' + to_text(term))
            return ''.join(parts)
        case Product(factors):
            if not factors:
                return '1'
            first = factors[0]
            parts = [_paren(first) if isinstance(first, (Sum, Product)) else to_text(first)]
            for factor in factors[1:]:
                if _is_atomic(factor) or isinstance(factor, Power):
                    parts.append(to_text(factor))
                else:
                    parts.append(_paren(factor))
            return '*'.join(parts)
        case Quotient(num, den):
            num_text = _paren(num) if isinstance(num, Sum) else to_text(num)
            if _is_atomic(den) or isinstance(den, Power):
                return f'{num_text}/{to_text(den)}'
            return f'{num_text}/{_paren(den)}'
    msg = f'to_text: unknown node {e!r}'
    raise TypeError(msg)


# -- Variables and substitution ------------------------------------------------


@lru_cache(maxsize=1 << 16)
def free_variables(e: Expr) -> frozenset[str]:
    """Names of the variables occurring in `e`."""
    match e:
        case Const():
            return frozenset()
        case Var(name):
            return frozenset({name})
        case Sum(items) | Product(items):
            return frozenset().union(*map(free_variables, items))
        case Neg(arg) | Call(_, arg) | Power(arg, _):
            return free_variables(arg)
        case Quotient(num, den):
            return free_variables(num) | free_variables(den)
    msg = f'free_variables: unknown node {e!r}'
    raise TypeError(msg)


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace variables by expressions, the result is not simplified."""
    if not mapping:
        return e
    seen: dict[Expr, Expr] = {}

    def walk(node: Expr) -> Expr:
        if node in seen:
            return seen[node]
        if free_variables(node).isdisjoint(mapping):
            result = node
        else:
            match node:
                case Var(name):
                    result = mapping.get(name, node)
                case Sum(terms):
                    result = Sum(tuple(map(walk, terms)))
                case Product(factors):
                    result = Product(tuple(map(walk, factors)))
                case Neg(arg):
                    result = Neg(walk(arg))
                case Quotient(num, den):
                    result = Quotient(walk(num), walk(den))
                case Power(base, exponent):
                    result = Power(walk(base), exponent)
                case Call(func, arg):
                    result = Call(func, walk(arg))
                case _:
                    result = node
        seen[node] = result
        return result

    return walk(e)


# -- Simplification ------------------------------------------------------------

_RANK: Final[dict[type, int]] = {Const: 0, Var: 1, Power: 2, Call: 3, Sum: 4}


def _order_key(e: Expr) -> tuple[int, str]:
    return _RANK.get(type(e), 5), to_text(e)


class _Factors:
    """Rational coefficient times a product of integer powers of bases."""

    __slots__ = ('coef', 'exps')

    def __init__(self) -> None:
        self.coef = Fraction(1)
        self.exps: dict[Expr, int] = {}

    def absorb(self, e: Expr, mult: int) -> None:
        match e:
            case Const(value):
                if value == 0 and mult < 0:
                    self._base(e, mult)
                else:
                    self.coef *= value**mult
            case Neg(arg):
                if mult % 2:
                    self.coef = -self.coef
                self.absorb(arg, mult)
            case Product(factors):
                for factor in factors:
                    self.absorb(factor, mult)
            case Quotient(num, den):
                if den == ZERO:
                    self._base(e, mult)
                else:
                    self.absorb(num, mult)
                    self.absorb(den, -mult)
            case Power(base, exponent):
                if base == ZERO and exponent * mult < 0:
                    self._base(e, 1)
                else:
                    self.absorb(base, mult * exponent)
            case _:
                self._base(e, mult)

    def _base(self, e: Expr, mult: int) -> None:
        self.exps[e] = self.exps.get(e, 0) + mult

    def assemble(self) -> Expr:
        if self.coef == 0:
            return ZERO
        bases = sorted((b for b, k in self.exps.items() if k != 0), key=_order_key)
        num = [_raise(b, self.exps[b]) for b in bases if self.exps[b] > 0]
        den = [_raise(b, -self.exps[b]) for b in bases if self.exps[b] < 0]
        if not num and not den:
            return Const(self.coef)
        core: Expr
        if den:
            core = Quotient(_product_of(num) if num else ONE, _product_of(den))
        else:
            core = _product_of(num)
        return _scale(self.coef, core)


def _raise(base: Expr, exponent: int) -> Expr:
    return base if exponent == 1 else Power(base, exponent)


def _product_of(factors: list[Expr]) -> Expr:
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


def _scale(coef: Fraction, core: Expr) -> Expr:
    if coef == 1:
        return core
    if coef == -1:
        return Neg(core)
    if isinstance(core, Product):
        return Product((Const(coef),) + core.factors)
    return Product((Const(coef), core))


def _split_coef(e: Expr) -> tuple[Fraction, Expr]:
    match e:
        case Neg(arg):
            coef, rest = _split_coef(arg)
            return -coef, rest
        case Product(factors) if factors and isinstance(factors[0], Const):
            head = factors[0]
            assert isinstance(head, Const)
            rest = factors[1] if len(factors) == 2 else Product(factors[1:])
            return head.value, rest
    return Fraction(1), e


def _build_sum(terms: Sequence[Expr]) -> Expr:
    constant = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}

    def add(term: Expr, scale: Fraction) -> None:
        nonlocal constant
        match term:
            case Const(value):
                constant += scale * value
                return
            case Sum(inner):
                for item in inner:
                    add(item, scale)
                return
        coef, rest = _split_coef(term)
        if isinstance(rest, Sum):
            for item in rest.terms:
                add(item, scale * coef)
        elif isinstance(rest, Const):
            constant += scale * coef * rest.value
        else:
            coeffs[rest] = coeffs.get(rest, Fraction(0)) + scale * coef

    for term in terms:
        add(term, Fraction(1))

    items: list[Expr] = [Const(constant)] if constant != 0 else []
    for rest in sorted((r for r, c in coeffs.items() if c != 0), key=_order_key):
        items.append(_scale(coeffs[rest], rest))
    if not items:
        return ZERO
    if len(items) == 1:
        return items[0]
    return Sum(tuple(items))


_EXACT_CALLS: Final[dict[tuple[str, Fraction], Fraction]] = {
    ('sin', Fraction(0)): Fraction(0),
    ('cos', Fraction(0)): Fraction(1),
    ('sinh', Fraction(0)): Fraction(0),
    ('cosh', Fraction(0)): Fraction(1),
    ('exp', Fraction(0)): Fraction(1),
    ('log', Fraction(1)): Fraction(0),
    ('sqrt', Fraction(0)): Fraction(0),
    ('sqrt', Fraction(1)): Fraction(1),
}


@lru_cache(maxsize=1 << 17)
def simplify(e: Expr) -> Expr:
    """Canonical form under constant folding and term/factor collection.

    - idempotent: `simplify(simplify(e)) == simplify(e)`
    - sums and products are flattened and ordered, numeric coefficients
      of identical terms are added, exponents of identical factors are added
    - a zero result is exactly `ZERO`

    """
    match e:
        case Const() | Var():
            return e
        case Sum(terms):
            return _build_sum([simplify(t) for t in terms])
        case Call(func, arg):
            inner = simplify(arg)
            if isinstance(inner, Const) and (func, inner.value) in _EXACT_CALLS:
                return Const(_EXACT_CALLS[func, inner.value])
            return Call(func, inner)
    acc = _Factors()
    match e:
        case Neg(arg):
            acc.coef = Fraction(-1)
            acc.absorb(simplify(arg), 1)
        case Product(factors):
            for factor in factors:
                acc.absorb(simplify(factor), 1)
        case Quotient(num, den):
            den_s = simplify(den)
            if den_s == ZERO:
                return Quotient(simplify(num), ZERO)
            acc.absorb(simplify(num), 1)
            acc.absorb(den_s, -1)
        case Power(base, exponent):
            if exponent == 0:
                return ONE
            acc.absorb(simplify(base), exponent)
        case _:
            msg = f'simplify: unknown node {e!r}'
            raise TypeError(msg)
    return acc.assemble()


# -- Differentiation -----------------------------------------------------------


def _d(e: Expr, v: str) -> Expr:
    if v not in free_variables(e):
        return ZERO
    match e:
        case Var(name):
            return ONE if name == v else ZERO
        case Sum(terms):
            return Sum(tuple(_d(t, v) for t in terms))
        case Neg(arg):
            return Neg(_d(arg, v))
        case Product(factors):
            terms: list[Expr] = []
            for ii, factor in enumerate(factors):
                df = _d(factor, v)
                if df != ZERO:
                    terms.append(Product(factors[:ii] + (df,) + factors[ii + 1:]))
            return Sum(tuple(terms))
        case Quotient(num, den):
            top = Sum((Product((_d(num, v), den)), Neg(Product((num, _d(den, v))))))
            return Quotient(top, Power(den, 2))
        case Power(base, exponent):
            return Product((Const(exponent), Power(base, exponent - 1), _d(base, v)))
        case Call(func, arg):
            da = _d(arg, v)
            match func:
                case 'sin':
                    return Product((Call('cos', arg), da))
                case 'cos':
                    return Neg(Product((Call('sin', arg), da)))
                case 'sinh':
                    return Product((Call('cosh', arg), da))
                case 'cosh':
                    return Product((Call('sinh', arg), da))
                case 'exp':
                    return Product((e, da))
                case 'log':
                    return Quotient(da, arg)
                case 'sqrt':
                    return Quotient(da, Product((Const(2), e)))
    msg = f'diff: unknown node {e!r}'
    raise TypeError(msg)


@lru_cache(maxsize=1 << 16)
def diff(e: Expr, v: str) -> Expr:
    """Exact derivative of `e` with respect to the variable `v`, simplified."""
    return simplify(_d(e, v))


# -- Numeric evaluation --------------------------------------------------------

_MATH: Final[dict[str, Callable[[float], float]]] = {
    name: getattr(math, name) for name in FUNCTIONS
}


def evaluate(e: Expr, assignment: Mapping[str, float]) -> float | Never:
    """IEEE double value of `e` at a full variable assignment.

    - raises `MissingVariableError` for an unassigned free variable
    - raises `EvalDomainError` on zero denominators, log or sqrt outside
      their domain, overflow

    """

    def walk(node: Expr) -> float:
        match node:
            case Const(value):
                return float(value)
            case Var(name):
                if name not in assignment:
                    msg = f'no value for variable {name!r}'
                    raise MissingVariableError(msg)
                return float(assignment[name])
            case Sum(terms):
                return math.fsum(walk(t) for t in terms)
            case Neg(arg):
                return -walk(arg)
            case Product(factors):
                acc = 1.0
                for factor in factors:
                    acc *= walk(factor)
                return acc
            case Quotient(num, den):
                return walk(num) / walk(den)
            case Power(base, exponent):
                return walk(base) ** exponent
            case Call(func, arg):
                return _MATH[func](walk(arg))
        msg = f'evaluate: unknown node {node!r}'
        raise TypeError(msg)

    try:
        result = walk(e)
    except (ZeroDivisionError, ValueError, OverflowError) as exc:
        msg = f'evaluate: {exc} in {to_text(e)}'
        raise EvalDomainError(msg) from exc
    if not math.isfinite(result):
        msg = f'evaluate: non-finite value in {to_text(e)}'
        raise EvalDomainError(msg)
    return result


def _source(e: Expr, slot: Mapping[str, int]) -> str:
    match e:
        case Const(value):
            return f'({float(value)!r})'
        case Var(name):
            return f'_v[{slot[name]}]'
        case Sum(terms):
            return '(' + ' + '.join(_source(t, slot) for t in terms) + ')' if terms else '0.0'
        case Neg(arg):
            return '(-' + _source(arg, slot) + ')'
        case Product(factors):
            return '(' + ' * '.join(_source(f, slot) for f in factors) + ')' if factors else '1.0'
        case Quotient(num, den):
            return '(' + _source(num, slot) + ' / ' + _source(den, slot) + ')'
        case Power(base, exponent):
            return '(' + _source(base, slot) + f' ** {exponent})'
        case Call(func, arg):
            return f'_m.{func}(' + _source(arg, slot) + ')'
    msg = f'lambdify: unknown node {e!r}'
    raise TypeError(msg)


@lru_cache(maxsize=1 << 14)
def lambdify(e: Expr, names: tuple[str, ...]) -> Callable[[Sequence[float]], float]:
    """Compile `e` into a function of a value sequence ordered like `names`.

    - raises `MissingVariableError` when a free variable is not in `names`
    - the returned function raises `EvalDomainError` like `evaluate`

    """
    missing = free_variables(e) - set(names)
    if missing:
        msg = f'no value for variables {sorted(missing)}'
        raise MissingVariableError(msg)
    slot = {name: ii for ii, name in enumerate(names)}
    raw: Callable[[Sequence[float]], float]
    try:
        code = compile('lambda _v: ' + _source(e, slot), '<symexpr>', 'eval')
        raw = eval(code, {'_m': math})  # noqa: S307
    except (SyntaxError, RecursionError, MemoryError):
        log.debug('lambdify: falling back to tree walking for a deep expression')

        def raw(values: Sequence[float]) -> float:
            return evaluate(e, dict(zip(names, values)))

    def compiled(values: Sequence[float]) -> float:
        try:
            result = float(raw(values))
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            msg = f'evaluate: {exc}'
            raise EvalDomainError(msg) from exc
        if not math.isfinite(result):
            msg = 'evaluate: non-finite value'
            raise EvalDomainError(msg)
        return result

    return compiled
