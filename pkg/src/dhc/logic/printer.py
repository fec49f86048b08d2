from __future__ import annotations

from . import formula as F

# binding strength; larger binds tighter
_CHOP, _OR, _AND, _UNARY = 1, 2, 3, 4


def _prec(f: F.Formula) -> int:
    if isinstance(f, F.Chop):
        return _CHOP
    if isinstance(f, F.Or):
        return _OR
    if isinstance(f, F.And):
        return _AND
    return _UNARY


def _wrap(f: F.Formula, need_parens: bool) -> str:
    s = pretty(f)
    return f"({s})" if need_parens else s


def pretty(f: F.Formula) -> str:
    """Render ``f`` in concrete syntax; ``parse_formula(pretty(f)) == f``."""
    if isinstance(f, F.TrueF):
        return "true"
    if isinstance(f, F.FalseF):
        return "false"
    if isinstance(f, F.Free):
        return "free"
    if isinstance(f, F.Cs):
        return "cs"
    if isinstance(f, F.Re):
        return f"re({f.car})"
    if isinstance(f, F.Sg):
        return f"sg({f.car})"
    if isinstance(f, F.Pc):
        return f"pc({f.car})"
    if isinstance(f, F.Pa):
        return f"pa({f.car})"
    if isinstance(f, F.Ob):
        return f"ob({f.kind})"
    if isinstance(f, F.LengthGE):
        return f"l >= {f.bound}"
    if isinstance(f, F.Not):
        return "not " + _wrap(f.arg, _prec(f.arg) < _UNARY)
    if isinstance(f, F.Somewhere):
        return f"<<{pretty(f.arg)}>>"
    if isinstance(f, (F.Exists, F.Forall)):
        q = "exists" if isinstance(f, F.Exists) else "forall"
        return f"{q} {f.var} : " + _wrap(f.body, _prec(f.body) < _UNARY)
    if isinstance(f, F.Chop):
        # right-associative; and/or operands are bracketed for readability
        left = _wrap(f.left, _prec(f.left) < _UNARY)
        right = _wrap(f.right, _prec(f.right) not in (_CHOP, _UNARY))
        return f"{left} chop {right}"
    if isinstance(f, (F.And, F.Or)):
        p = _prec(f)
        op = "and" if isinstance(f, F.And) else "or"
        # left-associative; a different binary operator underneath is bracketed
        left = _wrap(f.left, _prec(f.left) not in (p, _UNARY))
        right = _wrap(f.right, _prec(f.right) < _UNARY)
        return f"{left} {op} {right}"
    raise TypeError(f"not a formula: {f!r}")
