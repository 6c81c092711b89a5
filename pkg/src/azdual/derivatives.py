"""Derivative operators on signed symmetric multisegments.

A twist derivative at x removes the final coefficient of every unprotected
copy ending at x together with the first coefficient of the dual copies,
where protection is decided by a greedy best matching against the copies
ending one lower.  Good lines carry sign bookkeeping and a sign-dependent
exceptional case; bad lines instead drop one protection edge when the count
of a boundary value is odd.  The zero-chunk derivative removes the symmetric
degree sitting at the origin once all strictly negative twists vanish.
"""
from __future__ import annotations

from dataclasses import dataclass

from .segments import (
    BAD,
    GOOD,
    GRID_INT,
    UGLY,
    DomainError,
    HalfInt,
    InvariantError,
    Line,
    Segment,
    half,
    seg_dual,
    seg_lt,
    seg_trunc,
)
from .langdata import (
    Multisegment,
    SignedSymMultisegment,
    from_counter,
    require_valid,
    validate,
)


@dataclass(frozen=True)
class MatchingResult:
    """Outcome of a greedy protection matching: the matched sources ``x0``
    with their targets ``f``, and the leftovers on both sides."""

    x0: tuple
    f: tuple  # pairs (x, y), in x order
    xc: tuple
    y0: tuple
    yc: tuple

    def target_of(self, x):
        for a, b in self.f:
            if a == x:
                return b
        raise KeyError(x)


def best_matching(xs, ys, rel, drop=None) -> MatchingResult:
    """Greedy matching of sources to the targets they point at.

    ``xs`` and ``ys`` are sequences in ascending order; ``rel(y, x)`` says y
    points at x.  Requires the staircase condition: whenever x1 >= x2 and
    y1 >= y2 with y1, y2 both pointing at x1 and y2 pointing at x2, y1 must
    point at x2 as well (checked; violation is an error).  Sources are
    matched from the largest down, each taking the smallest unused target.
    ``drop``, when given, is a single (y, x) pair barred from matching on
    top of an otherwise staircase relation, so it skips the check.
    """
    xs = list(xs)
    ys = list(ys)
    r = [[bool(rel(y, x)) for y in ys] for x in xs]
    for i1 in range(len(xs)):
        for i2 in range(i1 + 1):
            for j1 in range(len(ys)):
                for j2 in range(j1 + 1):
                    if r[i1][j1] and r[i1][j2] and r[i2][j2] and not r[i2][j1]:
                        raise DomainError(
                            "matching relation violates the staircase condition"
                        )
    if drop is not None:
        for i, x in enumerate(xs):
            if x == drop[1]:
                for j, y in enumerate(ys):
                    if y == drop[0]:
                        r[i][j] = False
    used = set()
    f = {}
    for i in range(len(xs) - 1, -1, -1):
        for j in range(len(ys)):
            if j not in used and r[i][j]:
                used.add(j)
                f[i] = j
                break
    x0 = tuple(xs[i] for i in sorted(f))
    pairs = tuple((xs[i], ys[f[i]]) for i in sorted(f))
    xc = tuple(xs[i] for i in range(len(xs)) if i not in f)
    y0 = tuple(ys[j] for j in sorted(used))
    yc = tuple(ys[j] for j in range(len(ys)) if j not in used)
    return MatchingResult(x0, pairs, xc, y0, yc)


@dataclass(frozen=True)
class DerivativeResult:
    """The derived multisegment and the order of vanishing witnessed.

    ``k`` is 0 exactly when the input was already reduced at this operator,
    in which case ``result`` equals the input.
    """

    result: SignedSymMultisegment
    k: int


def _line_counters(s: SignedSymMultisegment, ln: Line):
    cnt: dict = {}
    for d in s.m:
        if d.line == ln:
            cnt[d] = cnt.get(d, 0) + 1
    minus = {d for d in s.minus if d.line == ln}
    return cnt, minus


def _replace_line(s, ln, new_cnt, new_minus):
    entries = [d for d in s.m if d.line != ln]
    for d, k in new_cnt.items():
        entries.extend([d] * k)
    minus = {d for d in s.minus if d.line != ln} | set(new_minus)
    return SignedSymMultisegment(Multisegment(entries), minus=minus)


def _copies_ending(cnt, e2, side=None):
    """Copies (segment, index) ending at e2, ascending."""
    out = []
    for d in sorted(cnt, key=lambda d: d.b.twice):
        if d.e.twice != e2:
            continue
        if side is not None and d.side != side:
            continue
        out.extend((d, i) for i in range(cnt[d]))
    return out


def _seg_le_items(y_item, x_item):
    return x_item[0] == y_item[0] or seg_lt(x_item[0], y_item[0])


def _sub(cnt, d, k=1):
    cnt[d] = cnt.get(d, 0) - k
    if cnt[d] < 0:
        raise InvariantError(f"correction consumed an absent copy of {d}")


def _addk(cnt, d, k=1):
    cnt[d] = cnt.get(d, 0) + k


def _unprotected_counts(yc):
    u: dict = {}
    for d, _ in yc:
        u[d] = u.get(d, 0) + 1
    return u


def _deriv_good(cnt, minus, ln: Line, x2: int):
    def eps(v):
        return -1 if v in minus else 1

    def mk(b2, e2):
        return Segment(ln, HalfInt.from_twice(b2), HalfInt.from_twice(e2))

    V = mk(-x2, x2) if x2 > 0 else None
    W = mk(-x2 + 2, x2 - 2) if x2 > 1 else None
    half_case = x2 == 1
    toff = cnt.get(mk(-x2, x2 - 2), 0) if x2 >= 1 else 0
    mV = cnt.get(V, 0) if V else 0
    mW = cnt.get(W, 0) if W else (1 if half_case else 0)
    epsW = eps(W) if W else 1
    star = (
        x2 > 0
        and mV > 0
        and mW > 0
        and eps(V) * epsW == (-1 if toff % 2 == 0 else 1)
    )

    ends_x = _copies_ending(cnt, x2)
    ends_xm1 = _copies_ending(cnt, x2 - 2)
    if star:
        ends_x = [it for it in ends_x if it != (V, 0)]
        if W is not None:
            ends_xm1 = [it for it in ends_xm1 if it != (W, 0)]

    match = best_matching(ends_xm1, ends_x, _seg_le_items)
    unprot = _unprotected_counts(match.yc)
    k = len(match.yc)
    c = unprot.get(V, 0) if V else 0

    new_cnt = dict(cnt)
    for val, u in unprot.items():
        if V is not None and val == V:
            _sub(new_cnt, V, u)
            t = seg_trunc(V, "both")
            if not t.is_empty:
                _addk(new_cnt, t, u)
        else:
            _sub(new_cnt, val, u)
            t = seg_trunc(val, "end")
            if not t.is_empty:
                _addk(new_cnt, t, u)
            dv = seg_dual(val)
            _sub(new_cnt, dv, u)
            t = seg_trunc(dv, "begin")
            if not t.is_empty:
                _addk(new_cnt, t, u)

    eps_new = {}
    for v, count in new_cnt.items():
        if count <= 0 or not v.is_centered:
            continue
        if v in cnt:
            eps_new[v] = eps(v)
        else:
            if v != W:
                raise InvariantError(f"unexpected new centered value {v}")
            eps_new[v] = (1 if toff % 2 == 0 else -1) * eps(V)

    upper = mk(-x2 + 2, x2) if x2 > 0 else None  # [-x+1, x]
    lower = mk(-x2, x2 - 2) if x2 > 0 else None  # [-x, x-1]
    if not star and c % 2 == 1 and toff >= 1:
        _sub(new_cnt, upper)
        _sub(new_cnt, lower)
        _addk(new_cnt, V)
        eps_new[V] = eps(V)
        if W is not None:
            _addk(new_cnt, W)
            if W not in eps_new:
                eps_new[W] = eps(W) if W in cnt else (1 if toff % 2 == 0 else -1) * eps(V)
    elif star and c % 2 == 1:
        _sub(new_cnt, V)
        if new_cnt[V] == 0:
            eps_new.pop(V, None)
        if W is not None:
            _sub(new_cnt, W)
            if new_cnt[W] == 0:
                eps_new.pop(W, None)
        _addk(new_cnt, upper)
        _addk(new_cnt, lower)

    new_cnt = {d: n for d, n in new_cnt.items() if n}
    new_minus = {v for v, sg in eps_new.items() if sg == -1 and v in new_cnt}
    return new_cnt, new_minus, k


def _deriv_bad(cnt, ln: Line, x2: int):
    def mk(b2, e2):
        return Segment(ln, HalfInt.from_twice(b2), HalfInt.from_twice(e2))

    V = mk(-x2, x2) if x2 > 0 else None
    W = mk(-x2 + 2, x2 - 2) if x2 > 1 else None
    toff = cnt.get(mk(-x2, x2 - 2), 0) if x2 >= 1 else 0

    ends_x = _copies_ending(cnt, x2)
    ends_xm1 = _copies_ending(cnt, x2 - 2)
    # A copy may not protect its own mirror.  The t mirror pairs between the
    # two boundary values can dodge that ban pairwise only when t is even;
    # for odd t one pair is stuck, and the greedy scan meets it at the last
    # copy of the upper value against the first copy of the lower one.
    drop = None
    if toff % 2:
        drop = ((mk(-x2 + 2, x2), toff - 1), (mk(-x2, x2 - 2), 0))

    match = best_matching(ends_xm1, ends_x, _seg_le_items, drop=drop)
    unprot = _unprotected_counts(match.yc)
    k = len(match.yc)
    c = unprot.get(V, 0) if V else 0

    new_cnt = dict(cnt)
    for val, u in unprot.items():
        if V is not None and val == V:
            _sub(new_cnt, V, u)
            t = seg_trunc(V, "both")
            if not t.is_empty:
                _addk(new_cnt, t, u)
        else:
            _sub(new_cnt, val, u)
            t = seg_trunc(val, "end")
            if not t.is_empty:
                _addk(new_cnt, t, u)
            dv = seg_dual(val)
            _sub(new_cnt, dv, u)
            t = seg_trunc(dv, "begin")
            if not t.is_empty:
                _addk(new_cnt, t, u)

    if c % 2 == 1:
        if W is not None:
            _sub(new_cnt, W)
        _sub(new_cnt, V)
        _addk(new_cnt, mk(-x2, x2 - 2))
        _addk(new_cnt, mk(-x2 + 2, x2))

    new_cnt = {d: n for d, n in new_cnt.items() if n}
    return new_cnt, k


def _deriv_ugly(cnt, ln: Line, x2: int):
    ends_x = _copies_ending(cnt, x2, side=0)
    ends_xm1 = _copies_ending(cnt, x2 - 2, side=0)
    match = best_matching(ends_xm1, ends_x, _seg_le_items)
    unprot = _unprotected_counts(match.yc)
    k = len(match.yc)
    new_cnt = dict(cnt)
    for val, u in unprot.items():
        _sub(new_cnt, val, u)
        t = seg_trunc(val, "end")
        if not t.is_empty:
            _addk(new_cnt, t, u)
        dv = seg_dual(val)
        _sub(new_cnt, dv, u)
        t = seg_trunc(dv, "begin")
        if not t.is_empty:
            _addk(new_cnt, t, u)
    new_cnt = {d: n for d, n in new_cnt.items() if n}
    return new_cnt, k


def derivative(s: SignedSymMultisegment, ln: Line, x) -> DerivativeResult:
    """The twist derivative at x != 0 on one line; other lines pass through.

    On ugly lines this is the thin GL-style variant: unprotected end removal
    on the primary side mirrored by beginning removal on the partner side.
    """
    require_valid(s)
    x = half(x)
    if x.twice == 0:
        raise DomainError("twist derivatives need x != 0; use the zero-chunk form")
    if not ln.grid_ok(x):
        raise DomainError(f"x = {x} is off the {ln.grid} grid of line {ln.id}")
    cnt, minus = _line_counters(s, ln)
    if not cnt:
        return DerivativeResult(s, 0)
    if ln.cls == GOOD:
        new_cnt, new_minus, k = _deriv_good(cnt, minus, ln, x.twice)
    elif ln.cls == BAD:
        new_cnt, k = _deriv_bad(cnt, ln, x.twice)
        new_minus = set()
    elif ln.cls == UGLY:
        new_cnt, k = _deriv_ugly(cnt, ln, x.twice)
        new_minus = set()
    else:
        raise DomainError(f"unknown line class {ln.cls!r}")
    if k == 0:
        return DerivativeResult(s, 0)
    result = _replace_line(s, ln, new_cnt, new_minus)
    report = validate(result)
    if report:
        raise InvariantError(
            "derivative left the symmetric class:\n  " + "\n  ".join(report)
        )
    return DerivativeResult(result, k)


def derivative_L(s: SignedSymMultisegment, ln: Line) -> DerivativeResult:
    """The zero-chunk derivative on an integral-grid good or bad line.

    Requires every strictly negative twist derivative on the line to vanish
    (checked; error otherwise).  Segments touching the origin retreat by a
    full chunk of two coefficients, and matched chunk pairs through the
    origin are suppressed; signs are untouched.
    """
    require_valid(s)
    if ln.cls not in (GOOD, BAD):
        raise DomainError("zero-chunk derivative needs a good or bad line")
    if ln.grid != GRID_INT:
        raise DomainError("zero-chunk derivative needs an integral grid")
    cnt, minus = _line_counters(s, ln)
    if not cnt:
        return DerivativeResult(s, 0)
    emax2 = max(d.e.twice for d in cnt)
    for y2 in range(-emax2 + 2, 0, 2):
        if derivative(s, ln, HalfInt.from_twice(y2)).k != 0:
            raise DomainError(
                f"zero-chunk derivative undefined: not reduced at {HalfInt.from_twice(y2)}"
            )

    def mk(b2, e2):
        return Segment(ln, HalfInt.from_twice(b2), HalfInt.from_twice(e2))

    zero, m10, z01 = mk(0, 0), mk(-2, 0), mk(0, 2)
    q = max(cnt.get(m10, 0) - cnt.get(mk(-4, -4), 0) + cnt.get(mk(-2, -2), 0), 0)
    if q > cnt.get(m10, 0):
        raise DomainError(
            f"zero-chunk derivative undefined: suppression needs {q} copies "
            f"of {m10} but found {cnt.get(m10, 0)}"
        )
    new_cnt: dict = {}
    for v, n in cnt.items():
        if v.e.twice == 0 and v not in (zero, m10):
            nv = seg_trunc(v, "end2")
        elif v.b.twice == 0 and v not in (zero, z01):
            nv = seg_trunc(v, "begin2")
        else:
            nv = v
        if not nv.is_empty:
            _addk(new_cnt, nv, n)
    if q:
        _sub(new_cnt, m10, q)
        _sub(new_cnt, z01, q)
    new_cnt = {d: n for d, n in new_cnt.items() if n}
    for v in minus:
        if v not in new_cnt:
            raise InvariantError(f"zero-chunk derivative dropped signed value {v}")
    removed = sum(d.length * n for d, n in cnt.items()) - sum(
        d.length * n for d, n in new_cnt.items()
    )
    if removed % 4:
        raise InvariantError("zero-chunk removal is not a whole number of chunk pairs")
    k = removed // 4
    if k == 0:
        return DerivativeResult(s, 0)
    result = _replace_line(s, ln, new_cnt, minus)
    report = validate(result)
    if report:
        raise InvariantError(
            "zero-chunk derivative left the symmetric class:\n  " + "\n  ".join(report)
        )
    return DerivativeResult(result, k)


def reduced_report(s: SignedSymMultisegment) -> dict:
    """Vanishing orders of every applicable derivative, per good/bad line.

    For each line: the order at every grid twist x != 0 within the end
    range, whether all vanish, the zero-chunk order when its hypotheses
    hold (None otherwise), and the combined verdict.
    """
    require_valid(s)
    report: dict = {}
    overall = True
    for ln in s.lines():
        if ln.cls not in (GOOD, BAD):
            continue
        cnt, _ = _line_counters(s, ln)
        emax2 = max((d.e.twice for d in cnt), default=0)
        orders = {}
        xs = [x2 for x2 in range(-emax2, emax2 + 1, 2) if x2 != 0]
        for x2 in xs:
            orders[str(HalfInt.from_twice(x2))] = derivative(
                s, ln, HalfInt.from_twice(x2)
            ).k
        x_reduced = all(v == 0 for v in orders.values())
        l_order = None
        if ln.grid == GRID_INT:
            try:
                l_order = derivative_L(s, ln).k
            except DomainError:
                l_order = None
        if ln.grid == GRID_INT:
            line_reduced = x_reduced and l_order == 0
        else:
            line_reduced = x_reduced
        overall = overall and line_reduced
        report[ln.id] = {
            "orders": orders,
            "x_reduced": x_reduced,
            "zero_chunk_order": l_order,
            "reduced": line_reduced,
        }
    report["reduced"] = overall
    return report
