"""The duality algorithm on signed symmetric multisegments.

Each step extracts a chain of copies with strictly descending ends from the
canonical descending enumeration, emits an initial piece (a dual pair, or a
single centered segment when the chain hits a terminal form), and shortens
the chain copies and their dual copies.  Iterating per line until nothing is
left computes the dual; conjugating by the data transfer computes the dual
of parameter data.

Good lines run on the labeled section with sign bookkeeping; bad lines run
on plain copies with a multiplicity guard forbidding a copy and its own dual
from chaining simultaneously; ugly lines run the GL chain on the primary
side and mirror it on the partner side.
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
    seg_dual,
    seg_sort_key,
    seg_trunc,
)
from .langdata import (
    LabeledSeg,
    LanglandsData,
    Multisegment,
    SignedSymMultisegment,
    from_counter,
    require_valid,
    transfer,
    untransfer,
    validate,
)


@dataclass(frozen=True)
class InitialSequence:
    """The chain extracted by one step, with its positions and outcome sign.

    ``enumeration`` is the canonical descending list of copies (labeled on
    good lines, plain elsewhere); ``segments`` the picked entries in chain
    order; ``idx`` / ``idx_dual`` the 0-based positions of the picked copies
    and of their dual copies inside ``enumeration``; ``eps0`` is -1 exactly
    when the chain stopped on a terminal form.
    """

    line: Line
    enumeration: tuple
    segments: tuple
    idx: tuple
    idx_dual: tuple
    eps0: int


def _c2(d: Segment) -> int:
    return d.b.twice + d.e.twice


def _labeled_dual_t(d: Segment, lab: int):
    dd = seg_dual(d)
    c2 = _c2(d)
    if c2 != 0:
        return (dd, 1 if c2 < 0 else -1)
    return (dd, 0 if lab == 0 else 1)


def _desc_key_t(item):
    d, lab = item
    b2, e2 = d.b.twice, d.e.twice
    tail = (-e2, 0) if lab == 0 else (-b2, e2)
    return (-lab,) + tail


def _section_entries(cnt):
    """Labeled copies of one line's counter, canonical descending order."""
    entries = []
    for d, mult in cnt.items():
        c2 = _c2(d)
        if c2 > 0:
            entries.extend([(d, 1)] * mult)
        elif c2 < 0:
            entries.extend([(d, -1)] * mult)
        else:
            h = mult // 2
            entries.extend([(d, -1)] * h)
            entries.extend([(d, 1)] * h)
            if mult % 2:
                entries.append((d, 0))
    entries.sort(key=_desc_key_t)
    return entries


def _plain_entries(cnt):
    entries = []
    for d, mult in cnt.items():
        entries.extend([d] * mult)
    entries.sort(
        key=lambda d: (-d.b.twice, d.e.twice, d.side if d.side is not None else -1)
    )
    return entries


def _sign_parity(cnt, minus) -> int:
    flips = sum(cnt.get(d, 0) for d in minus)
    return -1 if flips % 2 else 1


def _add(cnt, d, k=1):
    cnt[d] = cnt.get(d, 0) + k


# ---------------------------------------------------------------------------
# Good lines
# ---------------------------------------------------------------------------


def _good_step(cnt, minus, ln: Line):
    same_type = ln.grid == GRID_INT

    def eps(v):
        return -1 if v in minus else 1

    labeled = _section_entries(cnt)
    emax2 = max(d.e.twice for d, _ in labeled)

    chain = []
    target = emax2
    start = 0
    prev = None
    terminal = False
    while not terminal:
        found = None
        for p in range(start, len(labeled)):
            d, lab = labeled[p]
            if d.e.twice != target:
                continue
            if (
                prev is not None
                and _c2(d) == 0
                and _c2(prev[0]) == 0
                and eps(d) != -eps(prev[0])
            ):
                continue
            found = p
            break
        if found is None:
            break
        chain.append(found)
        prev = labeled[found]
        start = found + 1
        target -= 2
        d, lab = prev
        if same_type:
            terminal = d.b.twice == 0 and d.e.twice == 0 and lab >= 0
        else:
            terminal = (d.b.twice == 1 and d.e.twice == 1) or (
                d.b.twice == -1 and d.e.twice == 1 and lab >= 0 and eps(d) == -1
            )

    eps0 = -1 if terminal else 1
    e1 = labeled[chain[0]][0].e.twice
    el = labeled[chain[-1]][0].e.twice

    m1_cnt: dict = {}
    m1_minus = set()
    if terminal:
        top = Segment(ln, HalfInt.from_twice(-e1), HalfInt.from_twice(e1))
        m1_cnt[top] = 1
        n0 = sum(mult for v, mult in cnt.items() if _c2(v) == 0)
        if same_type:
            zero = Segment(ln, HalfInt.from_twice(0), HalfInt.from_twice(0))
            s1 = (-1 if (n0 + 1) % 2 else 1) * eps(zero)
        else:
            s1 = -1 if n0 % 2 else 1
        if s1 == -1:
            m1_minus.add(top)
    else:
        if e1 + el == 0:
            raise InvariantError("open chain produced a centered initial pair")
        lo = Segment(ln, HalfInt.from_twice(el), HalfInt.from_twice(e1))
        m1_cnt[lo] = 1
        _add(m1_cnt, seg_dual(lo))

    last_d, last_lab = labeled[chain[-1]]
    if (last_d.b.twice == 0 and last_d.e.twice == 0 and last_lab == 1) or (
        last_d.b.twice == 1 and last_d.e.twice == 1
    ):
        for j, p in enumerate(chain):
            d = labeled[p][0]
            want = emax2 - 2 * j
            if d.b.twice != want or d.e.twice != want:
                raise InvariantError("chain into the corner is not a staircase")

    idx = tuple(chain)
    idx_dual = []
    for p in chain:
        dual_entry = _labeled_dual_t(*labeled[p])
        try:
            q = labeled.index(dual_entry)
        except ValueError:
            raise InvariantError(f"dual copy {dual_entry} missing from the section")
        idx_dual.append(q)
    idx_dual = tuple(idx_dual)

    in_i = set(idx)
    in_ip = set(idx_dual)

    def transform(p):
        d, lab = labeled[p]
        if p in in_i and p in in_ip:
            return seg_trunc(d, "both")
        if p in in_i:
            return seg_trunc(d, "end")
        if p in in_ip:
            return seg_trunc(d, "begin")
        return d

    new_cnt: dict = {}
    for p in range(len(labeled)):
        t = transform(p)
        if not t.is_empty:
            _add(new_cnt, t)

    trans_at = []
    for p in idx:
        t = transform(p)
        trans_at.append(None if t.is_empty else t)

    new_minus = set()
    for v in new_cnt:
        if _c2(v) != 0:
            continue
        js = [j for j, t in enumerate(trans_at) if t == v]
        if len(js) > 1:
            raise InvariantError(f"two chain copies collapsed onto centered {v}")
        if js:
            dj = labeled[idx[js[0]]][0]
            cj2 = _c2(dj)
            if cj2 == 0:
                s = eps0 * eps(dj)
            elif cj2 == 2:
                s = eps0 * (-eps(v) if v in cnt else 1)
            else:
                raise InvariantError(f"chain copy with center {cj2}/2 became centered")
        else:
            if v not in cnt:
                raise InvariantError(f"centered {v} appeared without a chain source")
            s = eps0 * eps(v)
        if s == -1:
            new_minus.add(v)

    if _sign_parity(cnt, minus) != _sign_parity(m1_cnt, m1_minus) * _sign_parity(
        new_cnt, new_minus
    ):
        raise InvariantError("sign product not preserved across the step")

    seq = (labeled, idx, idx_dual, eps0)
    return m1_cnt, m1_minus, new_cnt, new_minus, seq


# ---------------------------------------------------------------------------
# Bad lines
# ---------------------------------------------------------------------------


def _bad_step(cnt, ln: Line):
    entries = _plain_entries(cnt)
    emax2 = max(d.e.twice for d in entries)
    chain = []
    chain_vals = []
    target = emax2
    prev_b = None
    for p, d in enumerate(entries):
        if d.e.twice != target:
            continue
        if prev_b is not None and d.b.twice >= prev_b:
            continue
        dv = seg_dual(d)
        if dv in chain_vals and cnt.get(d, 0) < 2:
            continue
        chain.append(p)
        chain_vals.append(d)
        prev_b = d.b.twice
        target -= 2

    e1 = chain_vals[0].e.twice
    el = chain_vals[-1].e.twice
    m1_cnt: dict = {}
    lo = Segment(ln, HalfInt.from_twice(el), HalfInt.from_twice(e1))
    _add(m1_cnt, lo)
    _add(m1_cnt, seg_dual(lo))

    new_cnt = dict(cnt)
    for d in chain_vals:
        new_cnt[d] -= 1
        dv = seg_dual(d)
        new_cnt[dv] = new_cnt.get(dv, 0) - 1
    if any(k < 0 for k in new_cnt.values()):
        raise InvariantError("chain consumed more copies than available")
    for d in chain_vals:
        t = seg_trunc(d, "end")
        if not t.is_empty:
            _add(new_cnt, t)
        t = seg_trunc(seg_dual(d), "begin")
        if not t.is_empty:
            _add(new_cnt, t)
    new_cnt = {d: k for d, k in new_cnt.items() if k}

    idx, idx_dual = _distinct_positions(entries, chain_vals)
    seq = (entries, idx, idx_dual, 1)
    return m1_cnt, new_cnt, seq


def _distinct_positions(entries, chain_vals):
    used = set()
    idx = []
    for v in chain_vals:
        p = _first_unused(entries, v, used)
        idx.append(p)
        used.add(p)
    idx_dual = []
    for v in chain_vals:
        p = _first_unused(entries, seg_dual(v), used)
        idx_dual.append(p)
        used.add(p)
    return tuple(idx), tuple(idx_dual)


def _first_unused(entries, value, used):
    for p, d in enumerate(entries):
        if p not in used and d == value:
            return p
    raise InvariantError(f"no unused copy of {value} in the enumeration")


# ---------------------------------------------------------------------------
# Ugly lines
# ---------------------------------------------------------------------------


def _ugly_step(cnt, ln: Line):
    side0 = {d: k for d, k in cnt.items() if d.side == 0}
    if not side0:
        raise InvariantError("ugly step with an empty primary side")
    entries0 = _plain_entries(side0)
    emax2 = max(d.e.twice for d in entries0)
    chain_vals = []
    target = emax2
    prev_b = None
    for d in entries0:
        if d.e.twice != target:
            continue
        if prev_b is not None and d.b.twice >= prev_b:
            continue
        chain_vals.append(d)
        prev_b = d.b.twice
        target -= 2

    e1 = chain_vals[0].e.twice
    el = chain_vals[-1].e.twice
    m1_cnt: dict = {}
    _add(m1_cnt, Segment(ln, HalfInt.from_twice(el), HalfInt.from_twice(e1), 0))
    _add(m1_cnt, Segment(ln, HalfInt.from_twice(-e1), HalfInt.from_twice(-el), 1))

    new_cnt = dict(cnt)
    for d in chain_vals:
        new_cnt[d] -= 1
        dv = seg_dual(d)
        new_cnt[dv] = new_cnt.get(dv, 0) - 1
    if any(k < 0 for k in new_cnt.values()):
        raise InvariantError("mirror copies missing on the partner side")
    for d in chain_vals:
        t = seg_trunc(d, "end")
        if not t.is_empty:
            _add(new_cnt, t)
        t = seg_trunc(seg_dual(d), "begin")
        if not t.is_empty:
            _add(new_cnt, t)
    new_cnt = {d: k for d, k in new_cnt.items() if k}

    entries = _plain_entries(cnt)
    idx, idx_dual = _distinct_positions(entries, chain_vals)
    seq = (entries, idx, idx_dual, 1)
    return m1_cnt, new_cnt, seq


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def _counters_of(s: SignedSymMultisegment, ln: Line):
    cnt = {}
    for d in s.m:
        if d.line == ln:
            cnt[d] = cnt.get(d, 0) + 1
    minus = {d for d in s.minus if d.line == ln}
    return cnt, minus


def _step_counters(cnt, minus, ln: Line):
    if ln.cls == GOOD:
        m1c, m1m, nc, nm, seq = _good_step(cnt, minus, ln)
    elif ln.cls == BAD:
        m1c, nc, seq = _bad_step(cnt, ln)
        m1m, nm = set(), set()
    elif ln.cls == UGLY:
        m1c, nc, seq = _ugly_step(cnt, ln)
        m1m, nm = set(), set()
    else:
        raise DomainError(f"unknown line class {ln.cls!r}")
    deg = lambda c: sum(d.length * k for d, k in c.items())
    if deg(m1c) + deg(nc) != deg(cnt):
        raise InvariantError("degree not preserved across the step")
    return m1c, m1m, nc, nm, seq


def _single_line(s: SignedSymMultisegment) -> Line:
    lines = s.lines()
    if len(lines) != 1:
        raise DomainError("this operation needs data supported on exactly one line")
    return lines[0]


def ad_step(s: SignedSymMultisegment):
    """One extraction step on a single-line signed symmetric multisegment.
    Returns (initial part, remaining part) as signed symmetric multisegments."""
    require_valid(s)
    if not s.m:
        raise DomainError("ad_step on the zero multisegment")
    ln = _single_line(s)
    cnt, minus = _counters_of(s, ln)
    m1c, m1m, nc, nm, _ = _step_counters(cnt, minus, ln)
    return (
        SignedSymMultisegment(from_counter(m1c), minus=m1m),
        SignedSymMultisegment(from_counter(nc), minus=nm),
    )


def ad_initial_sequence(s: SignedSymMultisegment) -> InitialSequence:
    """The chain data of the first step on a single-line input."""
    require_valid(s)
    if not s.m:
        raise DomainError("ad_initial_sequence on the zero multisegment")
    ln = _single_line(s)
    cnt, minus = _counters_of(s, ln)
    _, _, _, _, seq = _step_counters(cnt, minus, ln)
    enumeration, idx, idx_dual, eps0 = seq
    if ln.cls == GOOD:
        enum = tuple(LabeledSeg(d, lab) for d, lab in enumeration)
        picked = tuple(LabeledSeg(*enumeration[p]) for p in idx)
    else:
        enum = tuple(enumeration)
        picked = tuple(enumeration[p] for p in idx)
    return InitialSequence(ln, enum, picked, idx, idx_dual, eps0)


def ad_symm(s: SignedSymMultisegment) -> SignedSymMultisegment:
    """The dual of a signed symmetric multisegment (an involution)."""
    require_valid(s)
    out_cnt: dict = {}
    out_minus = set()
    for ln in s.lines():
        cnt, minus = _counters_of(s, ln)
        degree = sum(d.length * k for d, k in cnt.items())
        while cnt:
            m1c, m1m, cnt, minus, _ = _step_counters(cnt, minus, ln)
            for d, k in m1c.items():
                _add(out_cnt, d, k)
            out_minus |= m1m
            new_degree = sum(d.length * k for d, k in cnt.items())
            if new_degree >= degree:
                raise InvariantError("degree failed to decrease across a step")
            degree = new_degree
    result = SignedSymMultisegment(from_counter(out_cnt), minus=out_minus)
    report = validate(result)
    if report:
        raise InvariantError("dual left the symmetric class:\n  " + "\n  ".join(report))
    return result


def ad_data(d: LanglandsData) -> LanglandsData:
    """The dual of parameter data, via transfer conjugation."""
    return untransfer(ad_symm(transfer(d)))
