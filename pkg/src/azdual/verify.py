"""Enumeration of inputs, closed-form duals for recognized families,
inverse derivative search, and the property-checking harness.

Everything here is an oracle or a stress harness for the core algorithm:
independent enumeration, pattern-matched closed forms, and properties that
any claimed dual must satisfy.
"""
from __future__ import annotations

import random
from itertools import combinations_with_replacement, product

from .segments import (
    BAD,
    GOOD,
    GRID_HALF,
    GRID_INT,
    UGLY,
    DomainError,
    HalfInt,
    InvariantError,
    Line,
    Segment,
    seg_dual,
)
from .langdata import (
    LanglandsData,
    Multisegment,
    PhiComponent,
    SignedSymMultisegment,
    from_counter,
    line_project,
    plus_product,
    require_valid,
    sign_product,
    transfer,
    untransfer,
    validate,
)
from .mw_gl import mw_transpose
from .ad_core import ad_data, ad_step, ad_symm
from .derivatives import derivative


def _mk(ln, b2, e2, side=None):
    return Segment(ln, HalfInt.from_twice(b2), HalfInt.from_twice(e2), side)


def _grid_range(ln: Line, lo2: int, hi2: int):
    par = 0 if ln.grid == GRID_INT else 1
    start = lo2 + ((par - lo2) % 2)
    return range(start, hi2 + 1, 2)


def _pair_values(ln: Line, n: int):
    """Values parameterizing dual pairs: negative-center segments on
    good/bad lines, arbitrary primary-side segments on ugly lines."""
    out = []
    for b2 in _grid_range(ln, -2 * n, 2 * n):
        for e2 in range(b2, 2 * n + 1, 2):
            if ln.cls == UGLY:
                out.append(_mk(ln, b2, e2, 0))
            elif b2 + e2 < 0:
                out.append(_mk(ln, b2, e2))
    return out


def _centered_values(ln: Line, n: int):
    if ln.cls == UGLY:
        return []
    return [_mk(ln, -y2, y2) for y2 in _grid_range(ln, 0, 2 * n)]


def enumerate_symm(
    ln: Line,
    n: int,
    max_pairs: int,
    max_centered: int,
    max_degree=None,
    with_signs: bool = True,
):
    """All valid signed symmetric multisegments on one line with coefficients
    in [-n, n], at most max_pairs dual pairs and max_centered centered
    copies, optionally capped in degree.  Deterministic and duplicate-free.
    """
    pv = _pair_values(ln, n)
    cv = _centered_values(ln, n)
    for npair in range(max_pairs + 1):
        for pc in combinations_with_replacement(pv, npair):
            base = []
            for d in pc:
                base.append(d)
                base.append(seg_dual(d))
            base_deg = sum(d.length for d in base)
            if max_degree is not None and base_deg > max_degree:
                continue
            if ln.cls == BAD:
                for t in range(max_centered // 2 + 1):
                    for cc in combinations_with_replacement(cv, t):
                        entries = base + [d for d in cc for _ in range(2)]
                        if max_degree is not None and sum(
                            d.length for d in entries
                        ) > max_degree:
                            continue
                        yield SignedSymMultisegment(Multisegment(entries))
            elif ln.cls == GOOD:
                for t in range(max_centered + 1):
                    for cc in combinations_with_replacement(cv, t):
                        entries = base + list(cc)
                        if max_degree is not None and sum(
                            d.length for d in entries
                        ) > max_degree:
                            continue
                        m = Multisegment(entries)
                        distinct = sorted(set(cc), key=lambda d: d.e.twice)
                        if not with_signs:
                            yield SignedSymMultisegment(m)
                            continue
                        for signs in product((1, -1), repeat=len(distinct)):
                            minus = {
                                v for v, sg in zip(distinct, signs) if sg == -1
                            }
                            yield SignedSymMultisegment(m, minus=minus)
            else:
                yield SignedSymMultisegment(Multisegment(base))


def _block_sizes(ln: Line, n: int):
    par = 0 if ln.grid == GRID_INT else 1
    return [a for a in range(1, 2 * n + 2) if (a - 1) % 2 == par]


def _negative_values(ln: Line, n: int):
    out = []
    sides = (0, 1) if ln.cls == UGLY else (None,)
    for side in sides:
        for b2 in _grid_range(ln, -2 * n, 2 * n):
            for e2 in range(b2, 2 * n + 1, 2):
                if b2 + e2 < 0:
                    out.append(_mk(ln, b2, e2, side))
    return out


def enumerate_data(
    n: int,
    k_m: int,
    k_phi: int,
    lines,
    mode: str = "exhaustive",
    count=None,
    seed=None,
):
    """Valid parameter data within the given bounds.

    Exhaustive mode yields, per line, every datum with at most k_m segments
    and k_phi tempered blocks and coefficients in [-n, n], deterministically
    and without duplicates.  Sampled mode draws ``count`` data from the
    seeded scheme: each of the k_m slots draws an end uniformly on the grid
    and then a beginning uniform among those making the center negative
    (slots with no room are skipped); each block slot draws a size uniformly
    (drawn in mirrored pairs on bad lines); signs are uniform per distinct
    good block.
    """
    lines = sorted(lines, key=lambda ln: ln.id)
    if mode == "exhaustive":
        for ln in lines:
            yield from _enumerate_data_line(ln, n, k_m, k_phi)
    elif mode == "sampled":
        if count is None:
            raise DomainError("sampled enumeration needs a count")
        if not lines:
            raise DomainError("sampled enumeration needs at least one line")
        rng = random.Random(seed)
        for _ in range(count):
            ln = lines[rng.randrange(len(lines))]
            grid = list(_grid_range(ln, -2 * n, 2 * n))
            entries = []
            for _ in range(k_m):
                e2 = rng.choice(grid)
                hi2 = min(e2, -e2 - 2)
                cand = [b2 for b2 in grid if b2 <= hi2]
                if not cand:
                    continue
                b2 = rng.choice(cand)
                side = rng.choice((0, 1)) if ln.cls == UGLY else None
                entries.append(_mk(ln, b2, e2, side))
            sizes = _block_sizes(ln, n)
            blocks = []
            draws = k_phi // 2 if ln.cls == BAD else k_phi
            for _ in range(draws):
                a = rng.choice(sizes)
                blocks.append(PhiComponent(ln, a))
                if ln.cls == BAD:
                    blocks.append(PhiComponent(ln, a))
            eta_minus = set()
            if ln.cls == GOOD:
                for p in sorted(set(blocks), key=lambda p: p.a):
                    if rng.choice((1, -1)) == -1:
                        eta_minus.add(p)
            yield LanglandsData(Multisegment(entries), blocks, eta_minus=eta_minus)
    else:
        raise DomainError(f"unknown enumeration mode {mode!r}")


def _enumerate_data_line(ln: Line, n: int, k_m: int, k_phi: int):
    nv = _negative_values(ln, n)
    sizes = _block_sizes(ln, n)
    for km in range(k_m + 1):
        for ncombo in combinations_with_replacement(nv, km):
            m = Multisegment(ncombo)
            if ln.cls == BAD:
                for t in range(k_phi // 2 + 1):
                    for pc in combinations_with_replacement(sizes, t):
                        blocks = [PhiComponent(ln, a) for a in pc for _ in range(2)]
                        yield LanglandsData(m, blocks)
            elif ln.cls == GOOD:
                for kp in range(k_phi + 1):
                    for pc in combinations_with_replacement(sizes, kp):
                        blocks = [PhiComponent(ln, a) for a in pc]
                        distinct = sorted(set(blocks), key=lambda p: p.a)
                        for signs in product((1, -1), repeat=len(distinct)):
                            eta_minus = {
                                p for p, sg in zip(distinct, signs) if sg == -1
                            }
                            yield LanglandsData(m, blocks, eta_minus=eta_minus)
            else:
                for kp in range(k_phi + 1):
                    for pc in combinations_with_replacement(sizes, kp):
                        blocks = [PhiComponent(ln, a) for a in pc]
                        yield LanglandsData(m, blocks)


def standard_sweep(n: int = 2, max_pairs: int = 3, max_centered: int = 3):
    """The default verification sweep: one good and one bad line per grid."""
    lns = [
        Line("g", GOOD, GRID_INT),
        Line("gh", GOOD, GRID_HALF),
        Line("b", BAD, GRID_INT),
        Line("bh", BAD, GRID_HALF),
    ]
    for ln in lns:
        yield from enumerate_symm(ln, n, max_pairs, max_centered)


# ---------------------------------------------------------------------------
# Closed-form duals
# ---------------------------------------------------------------------------


def _line_cnt(s: SignedSymMultisegment, ln: Line):
    cnt: dict = {}
    for d in s.m:
        cnt[d] = cnt.get(d, 0) + 1
    return cnt


def _build(ln, cnt, eps_map):
    minus = {v for v, sg in eps_map.items() if sg == -1 and cnt.get(v, 0) > 0}
    out = SignedSymMultisegment(from_counter(cnt), minus=minus)
    report = validate(out)
    if report:
        raise InvariantError("closed form built an invalid dual:\n  " + "\n  ".join(report))
    return out


def _alternating_up(cnt, minus, ln, lowest2, top2):
    """Signs alternate between consecutive centered segments from lowest2."""
    for y2 in range(lowest2 + 2, top2 + 1, 2):
        a = _mk(ln, -y2, y2)
        b = _mk(ln, -(y2 - 2), y2 - 2)
        ea = -1 if a in minus else 1
        eb = -1 if b in minus else 1
        if ea * eb != -1:
            return False
    return True


def _cf_good_int_zero_tower(cnt, minus, ln):
    """All-centered tower over [0,0]: n0 copies of [0,0] plus one [-y,y]
    for each 1 <= y <= y0, signs alternating."""
    zero = _mk(ln, 0, 0)
    n0 = cnt.get(zero, 0)
    if n0 < 1:
        return None
    y0_2 = 0
    for v, k in cnt.items():
        if v == zero:
            continue
        if not v.is_centered or k != 1:
            return None
        y0_2 = max(y0_2, v.e.twice)
    for y2 in range(2, y0_2 + 1, 2):
        if cnt.get(_mk(ln, -y2, y2), 0) != 1:
            return None
    if sum(cnt.values()) != n0 + y0_2 // 2:
        return None
    if not _alternating_up(cnt, minus, ln, 0, y0_2):
        return None
    eps = lambda v: -1 if v in minus else 1
    if y0_2 == 0:
        sgn = (-1 if (n0 + 1) % 2 else 1) * eps(zero)
        return _build(ln, dict(cnt), {zero: sgn})
    if n0 % 2 == 1:
        return _build(ln, dict(cnt), {v: eps(v) for v in cnt if v.is_centered})
    top = _mk(ln, -y0_2, y0_2)
    new_cnt = dict(cnt)
    new_cnt[zero] -= 1
    new_cnt[top] -= 1
    for d in (_mk(ln, -y0_2, 0), _mk(ln, 0, y0_2)):
        new_cnt[d] = new_cnt.get(d, 0) + 1
    eps_map = {}
    for v in cnt:
        if v.is_centered and new_cnt.get(v, 0) > 0:
            eps_map[v] = -eps(v)
    return _build(ln, new_cnt, eps_map)


def _cf_good_half_tower(cnt, minus, ln):
    """Pure tower of centered segments on the half grid with the forced
    alternating signs starting at -1: a fixed point."""
    if not cnt:
        return None
    y0_2 = 0
    for v, k in cnt.items():
        if not v.is_centered or k != 1:
            return None
        y0_2 = max(y0_2, v.e.twice)
    for y2 in range(1, y0_2 + 1, 2):
        if cnt.get(_mk(ln, -y2, y2), 0) != 1:
            return None
    if _mk(ln, -1, 1) not in minus:
        return None
    if not _alternating_up(cnt, minus, ln, 1, y0_2):
        return None
    return _build(ln, dict(cnt), {v: (-1 if v in minus else 1) for v in cnt})


def _cf_good_half_low(cnt, minus, ln):
    """Ends at most 1/2 on a good half-integral line: c copies of the
    centered segment plus n singleton pairs."""
    hc = _mk(ln, -1, 1)
    hp = _mk(ln, 1, 1)
    hm = _mk(ln, -1, -1)
    if any(v not in (hc, hp, hm) for v in cnt):
        return None
    c = cnt.get(hc, 0)
    nn = cnt.get(hp, 0)
    if c == 0 and nn == 0:
        return None
    eps = -1 if hc in minus else 1
    star = c != 0 and eps == (-1 if (nn + 1) % 2 else 1)
    if star:
        c2, n2 = nn + 1, c - 1
    else:
        c2, n2 = nn, c
    eps2 = -1 if c % 2 else 1
    new_cnt = {hc: c2, hp: n2, hm: n2}
    return _build(ln, new_cnt, {hc: eps2})


def _f4_low_params(cnt, ln):
    zero = _mk(ln, 0, 0)
    c1v = _mk(ln, -2, 2)
    t1 = _mk(ln, -2, 0)
    t2 = _mk(ln, 0, 2)
    n1 = _mk(ln, -2, -2)
    n2 = _mk(ln, 2, 2)
    allowed = (zero, c1v, t1, t2, n1, n2)
    if any(v not in allowed for v in cnt):
        return None
    return (
        cnt.get(zero, 0),
        cnt.get(c1v, 0),
        cnt.get(t1, 0),
        cnt.get(n1, 0),
        (zero, c1v, t1, t2, n1, n2),
    )


def _cf_good_int_low(cnt, minus, ln):
    """Ends at most 1 on a good integral line."""
    params = _f4_low_params(cnt, ln)
    if params is None:
        return None
    c0, c1, t, nn, (zero, c1v, t1, t2, n1v, n2v) = params
    if c0 + c1 + t + nn == 0:
        return None
    e0 = -1 if zero in minus else 1
    e1 = -1 if c1v in minus else 1
    star = c0 != 0 and c1 != 0 and e0 * e1 == (-1 if t % 2 == 0 else 1)
    sflip = -1 if (c0 + c1 + 1) % 2 else 1
    if nn > c0 or nn == c0:
        c0n, c1n, tn = c1, c0, t
        nnn = (nn - c0 + c1) if nn > c0 else c1
        en0, en1 = e1 * sflip, e0 * sflip
    elif not star and ((c0 - nn) % 2 == 0 or t == 0):
        c0n, c1n, tn, nnn = c0 + c1 - nn, nn, t, c1
        en0 = e0 * (-1 if (c0 + c1 + t + 1) % 2 else 1)
        en1 = e0 * sflip
    elif not star:
        c0n, c1n, tn, nnn = c0 + c1 - nn + 1, nn + 1, t - 1, c1
        en0 = e0 * (-1 if (c0 + c1 + t + 1) % 2 else 1)
        en1 = e0 * sflip
    elif (c0 - nn) % 2 == 0:
        c0n, c1n, tn, nnn = c0 + c1 - nn - 2, nn, t + 1, c1 - 1
        en0 = e0 * (-1 if (t + c0 + c1) % 2 else 1)
        en1 = e0 * sflip
    else:
        c0n, c1n, tn, nnn = c0 + c1 - nn - 1, nn + 1, t, c1 - 1
        en0 = e0 * (-1 if (t + c0 + c1) % 2 else 1)
        en1 = e0 * sflip
    new_cnt = {zero: c0n, c1v: c1n, t1: tn, t2: tn, n1v: nnn, n2v: nnn}
    return _build(ln, new_cnt, {zero: en0, c1v: en1})


def _cf_good_int_high(cnt, minus, ln):
    """The tall integral family: matched singleton towers, one centered
    segment per level, and the forced chunk count."""
    emax2 = max((v.e.twice for v in cnt), default=0)
    if emax2 < 4:
        return None
    ne = cnt.get(_mk(ln, emax2, emax2), 0)
    for y2 in range(4, emax2 + 1, 2):
        if cnt.get(_mk(ln, y2, y2), 0) != ne:
            return None
    nn1 = cnt.get(_mk(ln, 2, 2), 0)
    t0 = cnt.get(_mk(ln, -2, 0), 0)
    n0 = cnt.get(_mk(ln, 0, 0), 0)
    if t0 != ne - nn1 or nn1 > ne or n0 < nn1 + 1:
        return None
    expected: dict = {}
    for y2 in range(4, emax2 + 1, 2):
        if ne:
            expected[_mk(ln, y2, y2)] = ne
            expected[_mk(ln, -y2, -y2)] = ne
    if nn1:
        expected[_mk(ln, 2, 2)] = nn1
        expected[_mk(ln, -2, -2)] = nn1
    expected[_mk(ln, 0, 0)] = n0
    if t0:
        expected[_mk(ln, -2, 0)] = t0
        expected[_mk(ln, 0, 2)] = t0
    for y2 in range(2, emax2 + 1, 2):
        expected[_mk(ln, -y2, y2)] = expected.get(_mk(ln, -y2, y2), 0) + 1
    if expected != {v: k for v, k in cnt.items() if k}:
        return None
    eps = lambda v: -1 if v in minus else 1
    zero = _mk(ln, 0, 0)
    if eps(zero) * eps(_mk(ln, -2, 2)) != (-1 if t0 % 2 == 0 else 1):
        return None
    if not _alternating_up(cnt, minus, ln, 2, emax2):
        return None
    top = _mk(ln, -emax2, emax2)
    half_lo = _mk(ln, -emax2, 0)
    half_hi = _mk(ln, 0, emax2)
    new_cnt: dict = {}
    eps_map: dict = {}
    e_top = (-1 if (n0 + emax2 // 2 + 1) % 2 else 1) * eps(zero)
    if (n0 - nn1) % 2 == 1:
        new_cnt[top] = nn1 + 1
        new_cnt[half_lo] = new_cnt[half_hi] = ne - nn1
        new_cnt[zero] = n0 - nn1
        eps_map[zero] = (-1 if ne % 2 else 1) * eps(zero)
        flip = -1 if nn1 % 2 else 1
    else:
        new_cnt[top] = nn1
        new_cnt[half_lo] = new_cnt[half_hi] = ne - nn1 + 1
        new_cnt[zero] = n0 - nn1 - 1
        eps_map[zero] = (-1 if (ne + 1) % 2 else 1) * eps(zero)
        flip = -1 if (nn1 + 1) % 2 else 1
    eps_map[top] = e_top
    for y2 in range(2, emax2, 2):
        v = _mk(ln, -y2, y2)
        new_cnt[v] = 1
        eps_map[v] = flip * eps(v)
    new_cnt = {v: k for v, k in new_cnt.items() if k}
    return _build(ln, new_cnt, eps_map)


def _cf_good_half_high(cnt, minus, ln):
    """The tall half-integral family: equal singleton towers at every level
    plus the full centered tower with forced signs."""
    emax2 = max((v.e.twice for v in cnt), default=0)
    if emax2 < 3:
        return None
    ne = cnt.get(_mk(ln, emax2, emax2), 0)
    expected: dict = {}
    for y2 in range(1, emax2 + 1, 2):
        if ne:
            expected[_mk(ln, y2, y2)] = ne
            expected[_mk(ln, -y2, -y2)] = ne
        expected[_mk(ln, -y2, y2)] = expected.get(_mk(ln, -y2, y2), 0) + 1
    if expected != {v: k for v, k in cnt.items() if k}:
        return None
    eps = lambda v: -1 if v in minus else 1
    if eps(_mk(ln, -1, 1)) != (-1 if (ne + 1) % 2 else 1):
        return None
    if not _alternating_up(cnt, minus, ln, 1, emax2):
        return None
    top = _mk(ln, -emax2, emax2)
    new_cnt = {top: ne + 1}
    eps_map = {top: (-1 if ((emax2 + 1) // 2) % 2 else 1)}
    for u2 in range(1, emax2, 2):
        v = _mk(ln, -u2, u2)
        new_cnt[v] = 1
        eps_map[v] = (-1 if ne % 2 else 1) * eps(v)
    return _build(ln, new_cnt, eps_map)


def _cf_bad_half_low(cnt, minus, ln):
    hc = _mk(ln, -1, 1)
    hp = _mk(ln, 1, 1)
    hm = _mk(ln, -1, -1)
    if any(v not in (hc, hp, hm) for v in cnt):
        return None
    c = cnt.get(hc, 0)
    nn = cnt.get(hp, 0)
    if c == 0 and nn == 0:
        return None
    if nn % 2 == 0:
        c2, n2 = nn, c
    else:
        c2, n2 = nn - 1, c + 1
    return _build(ln, {hc: c2, hp: n2, hm: n2}, {})


def _cf_bad_int_low(cnt, minus, ln):
    params = _f4_low_params(cnt, ln)
    if params is None:
        return None
    c0, c1, t, nn, (zero, c1v, t1, t2, n1v, n2v) = params
    if c0 + c1 + t + nn == 0:
        return None
    if nn > c0:
        c0n, c1n, tn, nnn = c1, c0, t, nn - c0 + c1
    elif nn % 2 == 0 and t % 2 == 0:
        c0n, c1n, tn, nnn = c0 - nn + c1, nn, t, c1
    elif nn % 2 == 0:
        c0n, c1n, tn, nnn = c0 - nn + c1 + 2, nn, t - 1, c1 + 1
    elif t % 2 == 0:
        c0n, c1n, tn, nnn = c0 - nn - 1 + c1, nn - 1, t + 1, c1
    else:
        c0n, c1n, tn, nnn = c0 - nn + c1 + 1, nn - 1, t, c1 + 1
    new_cnt = {zero: c0n, c1v: c1n, t1: tn, t2: tn, n1v: nnn, n2v: nnn}
    return _build(ln, new_cnt, {})


_CF_MATCHERS = {
    (GOOD, GRID_INT): (_cf_good_int_zero_tower, _cf_good_int_low, _cf_good_int_high),
    (GOOD, GRID_HALF): (_cf_good_half_tower, _cf_good_half_low, _cf_good_half_high),
    (BAD, GRID_HALF): (_cf_bad_half_low,),
    (BAD, GRID_INT): (_cf_bad_int_low,),
}


def closed_form_dual(s: SignedSymMultisegment):
    """Dual via pattern-matched closed forms; None when no family matches.

    Only single-line inputs are matched.
    """
    require_valid(s)
    lines = s.lines()
    if len(lines) != 1:
        return None
    ln = lines[0]
    cnt = _line_cnt(s, ln)
    for matcher in _CF_MATCHERS.get((ln.cls, ln.grid), ()):
        out = matcher(cnt, s.minus, ln)
        if out is not None:
            return out
    return None


def closed_form_instances(bound: int = 6):
    """Every instance of the eight recognized families with all counters
    at most ``bound``.  Deterministic."""
    gi = Line("g", GOOD, GRID_INT)
    gh = Line("gh", GOOD, GRID_HALF)
    bi = Line("b", BAD, GRID_INT)
    bh = Line("bh", BAD, GRID_HALF)

    def mk(ln, b2, e2):
        return _mk(ln, b2, e2)

    # zero tower (good integral)
    for n0 in range(1, bound + 1):
        for y0 in range(0, bound + 1):
            for e0 in (1, -1):
                entries = [mk(gi, 0, 0)] * n0
                minus = set()
                sign = e0
                if sign == -1:
                    minus.add(mk(gi, 0, 0))
                for y in range(1, y0 + 1):
                    sign = -sign
                    entries.append(mk(gi, -2 * y, 2 * y))
                    if sign == -1:
                        minus.add(mk(gi, -2 * y, 2 * y))
                yield SignedSymMultisegment(Multisegment(entries), minus=minus)
    # half tower (good half-integral)
    for y0_2 in range(1, 2 * bound, 2):
        entries = []
        minus = set()
        sign = 1
        for y2 in range(1, y0_2 + 1, 2):
            sign = -sign
            entries.append(mk(gh, -y2, y2))
            if sign == -1:
                minus.add(mk(gh, -y2, y2))
        yield SignedSymMultisegment(Multisegment(entries), minus=minus)
    # low half-integral (good)
    for c in range(bound + 1):
        for nn in range(bound + 1):
            if c == 0 and nn == 0:
                continue
            for e in ((1, -1) if c else (1,)):
                entries = [mk(gh, -1, 1)] * c + [mk(gh, 1, 1)] * nn + [mk(gh, -1, -1)] * nn
                minus = {mk(gh, -1, 1)} if (c and e == -1) else set()
                yield SignedSymMultisegment(Multisegment(entries), minus=minus)
    # low integral (good)
    for c0 in range(bound + 1):
        for c1 in range(bound + 1):
            for t in range(bound + 1):
                for nn in range(bound + 1):
                    if c0 + c1 + t + nn == 0:
                        continue
                    for e0 in ((1, -1) if c0 else (1,)):
                        for e1 in ((1, -1) if c1 else (1,)):
                            entries = (
                                [mk(gi, 0, 0)] * c0
                                + [mk(gi, -2, 2)] * c1
                                + [mk(gi, -2, 0)] * t
                                + [mk(gi, 0, 2)] * t
                                + [mk(gi, -2, -2)] * nn
                                + [mk(gi, 2, 2)] * nn
                            )
                            minus = set()
                            if e0 == -1:
                                minus.add(mk(gi, 0, 0))
                            if e1 == -1:
                                minus.add(mk(gi, -2, 2))
                            yield SignedSymMultisegment(
                                Multisegment(entries), minus=minus
                            )
    # tall integral (good)
    for emax in range(2, 5):
        for ne in range(bound + 1):
            for nn1 in range(ne + 1):
                for n0 in range(nn1 + 1, bound + 1):
                    for e0 in (1, -1):
                        t0 = ne - nn1
                        entries = [mk(gi, 0, 0)] * n0
                        entries += [mk(gi, -2, 0)] * t0 + [mk(gi, 0, 2)] * t0
                        entries += [mk(gi, 2, 2)] * nn1 + [mk(gi, -2, -2)] * nn1
                        for y in range(2, emax + 1):
                            entries += [mk(gi, 2 * y, 2 * y)] * ne
                            entries += [mk(gi, -2 * y, -2 * y)] * ne
                        minus = set()
                        if e0 == -1:
                            minus.add(mk(gi, 0, 0))
                        sign = e0 * (-1 if t0 % 2 == 0 else 1)
                        for y in range(1, emax + 1):
                            entries.append(mk(gi, -2 * y, 2 * y))
                            if sign == -1:
                                minus.add(mk(gi, -2 * y, 2 * y))
                            sign = -sign
                        yield SignedSymMultisegment(Multisegment(entries), minus=minus)
    # tall half-integral (good)
    for emax2 in range(3, 10, 2):
        for ne in range(bound + 1):
            entries = []
            minus = set()
            sign = -1 if (ne + 1) % 2 else 1
            for y2 in range(1, emax2 + 1, 2):
                entries += [mk(gh, y2, y2)] * ne + [mk(gh, -y2, -y2)] * ne
                entries.append(mk(gh, -y2, y2))
                if sign == -1:
                    minus.add(mk(gh, -y2, y2))
                sign = -sign
            yield SignedSymMultisegment(Multisegment(entries), minus=minus)
    # low half-integral (bad)
    for c in range(0, bound + 1, 2):
        for nn in range(bound + 1):
            if c == 0 and nn == 0:
                continue
            entries = [mk(bh, -1, 1)] * c + [mk(bh, 1, 1)] * nn + [mk(bh, -1, -1)] * nn
            yield SignedSymMultisegment(Multisegment(entries))
    # low integral (bad)
    for c0 in range(0, bound + 1, 2):
        for c1 in range(0, bound + 1, 2):
            for t in range(bound + 1):
                for nn in range(bound + 1):
                    if c0 + c1 + t + nn == 0:
                        continue
                    entries = (
                        [mk(bi, 0, 0)] * c0
                        + [mk(bi, -2, 2)] * c1
                        + [mk(bi, -2, 0)] * t
                        + [mk(bi, 0, 2)] * t
                        + [mk(bi, -2, -2)] * nn
                        + [mk(bi, 2, 2)] * nn
                    )
                    yield SignedSymMultisegment(Multisegment(entries))


# ---------------------------------------------------------------------------
# Inverse derivative search
# ---------------------------------------------------------------------------


def inverse_derivative_search(
    target: SignedSymMultisegment, ln: Line, x, k: int, bound: int
):
    """The unique preimage s with derivative (target, k) at x, searching all
    candidates with coefficients within the bound; None when there is none,
    an error when several exist (k=0 returns the target itself)."""
    require_valid(target)
    if k < 0:
        raise DomainError("derivative order must be nonnegative")
    if k == 0:
        return target
    part_deg = line_project(target, ln).degree + 2 * k
    hits = []
    for cand_part in enumerate_symm(
        ln,
        bound,
        max_pairs=part_deg // 2,
        max_centered=part_deg,
        max_degree=part_deg,
    ):
        if cand_part.degree != part_deg:
            continue
        entries = [d for d in target.m if d.line != ln] + list(cand_part.m)
        minus = {d for d in target.minus if d.line != ln} | set(cand_part.minus)
        cand = SignedSymMultisegment(Multisegment(entries), minus=minus)
        res = derivative(cand, ln, x)
        if res.k == k and res.result == target:
            hits.append(cand)
            if len(hits) > 1:
                raise DomainError("multiple preimages within the bound")
    return hits[0] if hits else None


# ---------------------------------------------------------------------------
# Property harness
# ---------------------------------------------------------------------------


def _pair_properties(s, d):
    """Named checks a claimed dual d of s must pass.  Evaluated in order."""
    checks = []
    d_valid = not validate(d)
    checks.append(("membership", d_valid))
    checks.append(("degree", d.degree == s.degree))
    em_s = s.max_end()
    em_d = d.max_end()
    checks.append(
        ("emax", (em_s is None) == (em_d is None) and (em_s is None or em_s == em_d))
    )
    sign_ok = True
    if d_valid:
        for ln in s.lines():
            if ln.cls == GOOD:
                if sign_product(s, ln) != sign_product(d, ln):
                    sign_ok = False
        if plus_product(s) != plus_product(d):
            sign_ok = False
    checks.append(("sign_product", sign_ok))
    longest_ok = True
    for ln in s.lines():
        if ln.cls not in (GOOD, BAD):
            continue
        part = line_project(s, ln)
        if not part.m:
            continue
        m1, _ = ad_step(part)
        etop = max(x.e.twice for x in m1.m)
        l1 = max(x.length for x in m1.m if x.e.twice == etop)
        for x in d.m:
            if x.line == ln and x.e.twice == etop and x.length > l1:
                longest_ok = False
    checks.append(("longest_first", longest_ok))
    checks.append(("involution", d_valid and ad_symm(d) == s))
    return checks


def _corruptions(d: SignedSymMultisegment):
    """Deterministic single-sign and single-coefficient corruptions of a
    claimed dual; each must be caught by some property."""
    out = []
    for v in sorted({x for x in d.m if x.is_centered and x.line.cls == GOOD},
                    key=lambda x: (x.line.id, x.e.twice)):
        flipped = set(d.minus) ^ {v}
        out.append(("sign_flip", SignedSymMultisegment(d.m, minus=flipped)))
        break
    if d.m:
        first = d.m.entries[0]
        entries = list(d.m.entries)
        entries.remove(first)
        stretched = Segment(
            first.line,
            first.b,
            HalfInt.from_twice(first.e.twice + 2),
            first.side,
        )
        out.append(
            (
                "coeff_stretch",
                SignedSymMultisegment(
                    Multisegment(entries + [stretched]),
                    minus={v for v in d.minus if v != first},
                ),
            )
        )
        out.append(
            (
                "copy_drop",
                SignedSymMultisegment(
                    Multisegment(entries), minus={v for v in d.minus if v != first}
                ),
            )
        )
    return out


def _suite_involution(s):
    d = ad_symm(s)
    return ad_symm(d) == s, None


def _suite_preservation(s):
    d = ad_symm(s)
    for name, ok in _pair_properties(s, d):
        if not ok:
            return False, name
    return True, None


def _suite_commutation(s):
    d = ad_symm(s)
    for ln in s.lines():
        if ln.cls not in (GOOD, BAD):
            continue
        part = line_project(s, ln)
        if not part.m:
            continue
        emax2 = max(x.e.twice for x in part.m)
        for x2 in range(-emax2, emax2 + 1, 2):
            if x2 == 0:
                continue
            x = HalfInt.from_twice(x2)
            res = derivative(s, ln, x)
            if res.k == 0:
                continue
            lhs = ad_symm(res.result)
            rhs = derivative(d, ln, -x)
            if rhs.k != res.k or lhs != rhs.result:
                return False, f"x={x} on {ln.id}"
    return True, None


def _suite_roundtrip(s):
    if transfer(untransfer(s)) != s:
        return False, "transfer of untransfer"
    return True, None


def _suite_closed_form(s):
    cf = closed_form_dual(s)
    if cf is None:
        return True, None
    return cf == ad_symm(s), "closed form disagrees"


def _suite_ugly_reduction(s):
    for ln in s.lines():
        if ln.cls != UGLY:
            continue
        part = line_project(s, ln)
        side0 = Multisegment([d for d in part.m if d.side == 0])
        mt = mw_transpose(side0)
        if ad_symm(part) != SignedSymMultisegment(mt + mt.dual()):
            return False, f"line {ln.id}"
    return True, None


def _suite_fault_injection(s):
    d = ad_symm(s)
    for name, bad_dual in _corruptions(d):
        if bad_dual == d:
            continue
        caught = any(not ok for _, ok in _pair_properties(s, bad_dual))
        if not caught:
            return False, f"corruption {name} undetected"
    return True, None


SUITES = {
    "involution": _suite_involution,
    "preservation": _suite_preservation,
    "commutation": _suite_commutation,
    "roundtrip": _suite_roundtrip,
    "closed_form": _suite_closed_form,
    "ugly_reduction": _suite_ugly_reduction,
    "fault_injection": _suite_fault_injection,
}


def run_properties(stream, suites=None) -> dict:
    """Run the selected property suites over a stream of signed symmetric
    multisegments.  Machine-readable report with the first counterexample
    per suite."""
    if suites is None:
        suites = list(SUITES)
    unknown = [name for name in suites if name not in SUITES]
    if unknown:
        raise DomainError(f"unknown suites: {', '.join(unknown)}")
    report = {
        name: {"pass": True, "checked": 0, "counterexample": None}
        for name in suites
    }
    for s in stream:
        for name in suites:
            entry = report[name]
            if entry["counterexample"] is not None:
                continue
            entry["checked"] += 1
            ok, detail = SUITES[name](s)
            if not ok:
                entry["pass"] = False
                entry["counterexample"] = str(s) + (f" [{detail}]" if detail else "")
    return {"suites": report, "pass": all(v["pass"] for v in report.values())}


# ---------------------------------------------------------------------------
# Observed statistics
# ---------------------------------------------------------------------------


def first_start_prediction(d: LanglandsData, dual: LanglandsData = None):
    """(observed, predicted) lowest beginning in the dual's symmetric form.

    The prediction is the minimum over the datum's own beginnings and the
    beginnings of its blocks' centered segments; that quantity is expected
    to be preserved by the duality.  None when the datum is empty.
    """
    s = transfer(d)
    if not s.m:
        return None
    if dual is None:
        dual = ad_data(d)
    observed = min(x.b.twice for x in transfer(dual).m)
    predicted = min(x.b.twice for x in s.m)
    return HalfInt.from_twice(observed), HalfInt.from_twice(predicted)
