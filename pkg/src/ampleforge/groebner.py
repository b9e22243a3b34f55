"""Groebner machinery: bases, normal forms, syzygies, Hilbert data, saturation.

Module elements are sparse vectors {slot: Polynomial} over a graded free
module.  The term order is position-over-term: lower slot index first, then
degrevlex within a slot.  Buchberger runs with full history (every basis
element is tracked as a combination of the original columns) and processes
every pair, so the recorded zero-reductions generate the entire syzygy
module of the input columns (Schreyer's theorem transported through the
history matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from . import linalg
from .modules import FreeModule, GradedMap, PresentedModule
from .ring import (
    GradedRing,
    Polynomial,
    RingError,
    mono_cmp,
    mono_degree,
    mono_div,
    mono_divides,
    mono_key,
    mono_lcm,
    mono_mul,
)


class NonHomogeneousError(ValueError):
    """The graded engine only accepts homogeneous input."""


# ---------------------------------------------------------------------------
# Sparse module vectors: {slot: Polynomial}, zero polys never stored.
# ---------------------------------------------------------------------------


def vp_is_zero(v: dict) -> bool:
    return not v


def vp_scale(v: dict, c: int, p: int) -> dict:
    c %= p
    if c == 0:
        return {}
    return {s: f.scalar_mul(c) for s, f in v.items()}


def vp_term_mul(v: dict, exps, c: int) -> dict:
    return {s: f.term_mul(exps, c) for s, f in v.items()}


def vp_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for s, f in b.items():
        g = out.get(s)
        h = f if g is None else g + f
        if h.is_zero():
            out.pop(s, None)
        else:
            out[s] = h
    return out


def vp_sub(a: dict, b: dict) -> dict:
    p = None
    for f in b.values():
        p = f.ring.p
        break
    if p is None:
        return dict(a)
    return vp_add(a, vp_scale(b, p - 1, p))


def vp_lead(v: dict):
    """Leading term (slot, exps, coeff) for position-over-term order."""
    s = min(v)
    exps, c = v[s].lead()
    return s, exps, c


def vp_degree(v: dict, twists) -> int:
    """Degree of a homogeneous vector; raises if not homogeneous."""
    degs = set()
    for s, f in v.items():
        for e, _ in f.terms:
            degs.add(mono_degree(e) + twists[s])
    if len(degs) != 1:
        raise NonHomogeneousError(f"vector is not homogeneous: degrees {sorted(degs)}")
    return degs.pop()


def _work_from_vp(v: dict) -> dict:
    return {s: dict(f.terms) for s, f in v.items()}


def _vp_from_work(ring: GradedRing, w: dict) -> dict:
    out = {}
    for s, terms in w.items():
        if terms:
            out[s] = Polynomial.from_dict(ring, terms)
    return out


def _work_lead(w: dict):
    live = [s for s, t in w.items() if t]
    if not live:
        return None
    s = min(live)
    exps = max(w[s], key=mono_key)
    return s, exps, w[s][exps]


def _work_sub_scaled(w: dict, v: dict, exps, c: int, p: int) -> None:
    """w -= c * x^exps * v, in place."""
    for s, f in v.items():
        slot = w.setdefault(s, {})
        for e, k in f.terms:
            key = mono_mul(e, exps)
            r = (slot.get(key, 0) - c * k) % p
            if r:
                slot[key] = r
            else:
                slot.pop(key, None)


def vp_divide(v: dict, basis: list, ring: GradedRing, track: bool = False):
    """Divide v by basis (monic vectors); returns (quotients, remainder).

    quotients[k] is a term dict {exps: coeff} with
    v = sum_k quotients[k] * basis[k] + remainder and no remainder term
    divisible by any basis lead.  Deterministic: first matching basis
    element in list order wins.
    """
    p = ring.p
    leads = [vp_lead(g) for g in basis]
    by_slot: dict = {}
    for k, (s, m, _) in enumerate(leads):
        by_slot.setdefault(s, []).append((k, m))
    work = _work_from_vp(v)
    rem: dict = {}
    quot = [dict() for _ in basis] if track else None
    while True:
        lead = _work_lead(work)
        if lead is None:
            break
        s, exps, c = lead
        hit = None
        for k, m in by_slot.get(s, ()):
            if mono_divides(m, exps):
                hit = (k, m)
                break
        if hit is None:
            rem.setdefault(s, {})[exps] = c
            del work[s][exps]
            continue
        k, m = hit
        f = mono_div(exps, m)
        _work_sub_scaled(work, basis[k], f, c, p)
        if track:
            quot[k][f] = (quot[k].get(f, 0) + c) % p
    return quot, _vp_from_work(ring, rem)


# ---------------------------------------------------------------------------
# Buchberger with history.
# ---------------------------------------------------------------------------


@dataclass
class ModuleGB:
    """Groebner data for the submodule spanned by ``columns`` of ``free``."""

    free: FreeModule
    columns: list
    col_degrees: list
    gb: list = field(default_factory=list)          # monic vectors
    history: list = field(default_factory=list)     # gb[t] = sum history[t][i]*col[i]
    syzygies: list = field(default_factory=list)    # vectors over column indices
    reduced: list = field(default_factory=list)     # canonical reduced basis

    @property
    def ring(self) -> GradedRing:
        return self.free.ring

    def normal_form_vec(self, v: dict) -> dict:
        _, r = vp_divide(v, self.gb, self.ring) if self.gb else (None, dict(v))
        return r

    def contains(self, v: dict) -> bool:
        return vp_is_zero(self.normal_form_vec(v))

    def express(self, v: dict):
        """Write v as {column index: Polynomial}, or None if outside."""
        if not self.gb:
            return {} if vp_is_zero(v) else None
        quot, r = vp_divide(v, self.gb, self.ring, track=True)
        if not vp_is_zero(r):
            return None
        out: dict = {}
        for t, q in enumerate(quot):
            if not q:
                continue
            qp = Polynomial.from_dict(self.ring, q)
            for i, h in self.history[t].items():
                g = qp * h
                cur = out.get(i)
                g = g if cur is None else cur + g
                if g.is_zero():
                    out.pop(i, None)
                else:
                    out[i] = g
        return out


def _expr_sub_scaled(expr: dict, other: dict, exps, c: int, ring: GradedRing) -> dict:
    out = dict(expr)
    for i, h in other.items():
        delta = h.term_mul(exps, c)
        cur = out.get(i)
        g = -delta if cur is None else cur - delta
        if g.is_zero():
            out.pop(i, None)
        else:
            out[i] = g
    return out


def buchberger_module(columns, free: FreeModule, want_syzygies: bool = False) -> ModuleGB:
    """Run Buchberger on homogeneous columns of a graded free module.

    Pair selection: minimal (degree of S-pair, i, j).  All pairs with leads
    in the same slot are processed, with zero reductions recorded as
    syzygies of the original columns.
    """
    ring = free.ring
    p = ring.p
    degrees = []
    for v in columns:
        degrees.append(vp_degree(v, free.twists) if v else None)

    data = ModuleGB(free=free, columns=list(columns), col_degrees=degrees)
    pairs: list = []

    def push_pairs(t_new: int) -> None:
        s_new, m_new, _ = vp_lead(data.gb[t_new])
        for t in range(t_new):
            s, m, _ = vp_lead(data.gb[t])
            if s != s_new:
                continue
            deg = mono_degree(mono_lcm(m, m_new)) + free.twists[s]
            pairs.append((deg, t, t_new))

    def add_element(v: dict, expr: dict) -> None:
        c = vp_lead(v)[2]
        inv = ring.inv(c)
        data.gb.append(vp_scale(v, inv, p))
        data.history.append(
            {i: h.scalar_mul(inv) for i, h in expr.items()}
        )
        push_pairs(len(data.gb) - 1)

    for i, v in enumerate(columns):
        if vp_is_zero(v):
            if want_syzygies:
                data.syzygies.append({i: ring.one()})
            continue
        add_element(v, {i: ring.one()})

    while pairs:
        pairs.sort()
        _, ti, tj = pairs.pop(0)
        gi, gj = data.gb[ti], data.gb[tj]
        si, mi, _ = vp_lead(gi)
        _, mj, _ = vp_lead(gj)
        lcm = mono_lcm(mi, mj)
        fi, fj = mono_div(lcm, mi), mono_div(lcm, mj)
        s_vec = vp_sub(vp_term_mul(gi, fi, 1), vp_term_mul(gj, fj, 1))
        expr = _expr_sub_scaled(
            {k: h.term_mul(fi, 1) for k, h in data.history[ti].items()},
            data.history[tj],
            fj,
            1,
            ring,
        )
        quot, rem = vp_divide(s_vec, data.gb, ring, track=True)
        for t, q in enumerate(quot):
            if q:
                for exps, c in q.items():
                    expr = _expr_sub_scaled(expr, data.history[t], exps, c, ring)
        if vp_is_zero(rem):
            if want_syzygies and expr:
                data.syzygies.append(expr)
        else:
            add_element(rem, expr)

    data.reduced = _reduce_basis(data.gb, ring)
    return data


def _reduce_basis(gb: list, ring: GradedRing) -> list:
    """Unique reduced basis: minimal leads, tails fully reduced, sorted."""
    if not gb:
        return []
    order = sorted(
        range(len(gb)),
        key=lambda t: (vp_lead(gb[t])[0], mono_key(vp_lead(gb[t])[1])),
    )
    kept: list = []
    seen_leads: list = []
    for t in order:
        s, m, _ = vp_lead(gb[t])
        if any(ss == s and mono_divides(mm, m) for ss, mm in seen_leads):
            continue
        kept.append(gb[t])
        seen_leads.append((s, m))
    out = []
    for k, g in enumerate(kept):
        others = kept[:k] + kept[k + 1 :]
        if others:
            _, r = vp_divide(g, others, ring)
        else:
            r = g
        out.append(r)
    def canonical_key(g):
        s, m, _ = vp_lead(g)
        # slot ascending, then lead monomial descending in degrevlex
        return (s, -mono_degree(m), tuple(reversed(m)))

    out.sort(key=canonical_key)
    return out


def syzygy_columns(columns, free: FreeModule):
    """Generating syzygies of the columns, as vectors over column indices.

    Returns (syzygy vectors, their degrees).  Output order is the engine's
    deterministic discovery order.
    """
    data = buchberger_module(columns, free, want_syzygies=True)
    degs = []
    for s in data.syzygies:
        d = None
        for i, h in s.items():
            d = h.degree() + data.col_degrees[i]
            break
        degs.append(d)
    return data.syzygies, degs


def minimal_generators(columns, free: FreeModule):
    """Subset of the columns generating the same submodule minimally.

    Greedy by ascending degree: a column enters only if it is not in the
    submodule generated by the already-kept ones.
    """
    items = sorted(
        (i for i, v in enumerate(columns) if not vp_is_zero(v)),
        key=lambda i: (vp_degree(columns[i], free.twists), i),
    )
    kept: list = []
    gbdata: ModuleGB | None = None
    for i in items:
        v = columns[i]
        if gbdata is not None and gbdata.contains(v):
            continue
        kept.append(v)
        gbdata = buchberger_module(kept, free)
    return kept


# ---------------------------------------------------------------------------
# Ideal-level public surface.
# ---------------------------------------------------------------------------


class GroebnerBasis:
    """Reduced Groebner basis of a homogeneous ideal (monic generators)."""

    __slots__ = ("ring", "generators", "source_ideal", "_data")

    def __init__(self, ring, generators, source_ideal, data: ModuleGB):
        self.ring = ring
        self.generators = tuple(generators)
        self.source_ideal = tuple(source_ideal)
        self._data = data

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators)
        return f"GroebnerBasis({gens})"


def _rank1(ring: GradedRing) -> FreeModule:
    return FreeModule(ring, (0,))


def _poly_to_vec(f: Polynomial) -> dict:
    return {} if f.is_zero() else {0: f}


def buchberger(gens) -> GroebnerBasis:
    """Reduced Groebner basis of the homogeneous ideal spanned by gens."""
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator list")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingError("generators live in different rings")
        if not g.is_homogeneous():
            raise NonHomogeneousError(f"non-homogeneous generator: {g}")
    cols = [_poly_to_vec(g) for g in gens]
    data = buchberger_module(cols, _rank1(ring))
    reduced = [v[0] for v in data.reduced]
    return GroebnerBasis(ring, reduced, gens, data)


def normal_form(f: Polynomial, basis) -> Polynomial:
    """Remainder of f modulo a Groebner basis (or explicit monic list)."""
    if isinstance(basis, GroebnerBasis):
        polys = list(basis.generators)
        ring = basis.ring
    else:
        polys = [g for g in basis if not g.is_zero()]
        ring = f.ring
        polys = [g.monic() for g in polys]
    if f.ring != ring:
        raise RingError("polynomial and basis rings differ")
    if not polys:
        return f
    cols = [_poly_to_vec(g) for g in polys]
    _, r = vp_divide(_poly_to_vec(f), cols, ring)
    return r.get(0, ring.zero())


def syzygies(basis_or_gens, degrees=None) -> PresentedModule:
    """Module generated by the given ordered elements, presented by its
    first syzygies.

    Accepts a GroebnerBasis (uses its source ideal) or an explicit list of
    homogeneous polynomials.  The result carries ambient-embedding metadata
    so saturation can work with honest global sections.
    """
    if isinstance(basis_or_gens, GroebnerBasis):
        gens = list(basis_or_gens.source_ideal)
    else:
        gens = list(basis_or_gens)
    if not gens:
        raise ValueError("empty generator list")
    ring = gens[0].ring
    free = _rank1(ring)
    cols = [_poly_to_vec(g) for g in gens]
    return submodule_presentation(cols, free, degrees=degrees)


def submodule_presentation(columns, ambient: FreeModule, degrees=None, name: str = "") -> PresentedModule:
    """Present the submodule generated by columns of the ambient free module.

    Relations are a minimal generating set of the first syzygy module; the
    ambient embedding rides along in metadata so saturation stays exact."""
    ring = ambient.ring
    if degrees is None:
        degrees = [
            0 if vp_is_zero(v) else vp_degree(v, ambient.twists) for v in columns
        ]
    gens = FreeModule(ring, degrees)
    syz, _ = syzygy_columns(columns, ambient)
    syz = minimal_generators(syz, gens)
    syzdegs = [vp_degree(v, gens.twists) for v in syz]
    srcfree = FreeModule(ring, syzdegs)
    rel = GradedMap.from_columns(srcfree, gens, syz)
    mod = PresentedModule(gens, rel, name=name)
    mod.metadata["ambient"] = (ambient, [dict(v) for v in columns])
    return mod


def relations_gb(M: PresentedModule) -> ModuleGB:
    """Cached Groebner data of the relation submodule."""
    return M.cached(
        "relgb", lambda: buchberger_module(M.relations.columns(), M.generators)
    )


# ---------------------------------------------------------------------------
# Hilbert data via the lead-term module's exact series numerator.
# ---------------------------------------------------------------------------


def _minimalize_monos(gens) -> tuple:
    gens = sorted(set(gens), key=lambda m: (mono_degree(m), m))
    out = []
    for g in gens:
        if not any(mono_divides(h, g) for h in out):
            out.append(g)
    return tuple(out)


_NUMERATOR_MEMO: dict = {}


def hilbert_numerator(gens) -> dict:
    """Numerator N(t) of the series of S/(monomial ideal), as {exponent: coeff}.

    Hilbert series = N(t) / (1-t)^nvars; computed by the short exact
    sequence S/(I:m)(-deg m) -> S/I -> S/(I+m), pivoting on a frequent
    variable.
    """
    gens = _minimalize_monos(gens)
    return dict(_numerator_rec(gens))


def _numerator_rec(gens: tuple) -> dict:
    hit = _NUMERATOR_MEMO.get(gens)
    if hit is not None:
        return hit
    if not gens:
        out = {0: 1}
    elif any(mono_degree(g) == 0 for g in gens):
        out = {}
    else:
        counts = [0] * len(gens[0])
        for g in gens:
            for v, e in enumerate(g):
                if e:
                    counts[v] += 1
        if max(counts) <= 1:
            # pairwise coprime: product of (1 - t^deg)
            out = {0: 1}
            for g in gens:
                d = mono_degree(g)
                new: dict = {}
                for k, c in out.items():
                    new[k] = new.get(k, 0) + c
                    new[k + d] = new.get(k + d, 0) - c
                out = {k: c for k, c in new.items() if c}
        else:
            v = max(range(len(counts)), key=lambda i: counts[i])
            pivot = tuple(1 if i == v else 0 for i in range(len(counts)))
            plus = _minimalize_monos(gens + (pivot,))
            colon = _minimalize_monos(
                tuple(
                    tuple(e - 1 if i == v and e > 0 else e for i, e in enumerate(g))
                    for g in gens
                )
            )
            out = dict(_numerator_rec(plus))
            for k, c in _numerator_rec(colon).items():
                out[k + 1] = out.get(k + 1, 0) + c
            out = {k: c for k, c in out.items() if c}
    _NUMERATOR_MEMO[gens] = out
    return out


def lead_term_ideals(M: PresentedModule) -> list:
    """Per generator slot, the minimal monomial generators of the lead
    module of the relation submodule."""
    data = relations_gb(M)
    per_slot: list = [[] for _ in range(M.generators.rank)]
    for g in data.reduced:
        s, m, _ = vp_lead(g)
        per_slot[s].append(m)
    return [_minimalize_monos(ms) for ms in per_slot]


def module_numerator(M: PresentedModule) -> dict:
    """Combined numerator: dim M_d = sum_k N[k] * C(d - k + n, n)."""

    def build():
        out: dict = {}
        for twist, monos in zip(M.generators.twists, lead_term_ideals(M)):
            for k, c in hilbert_numerator(monos).items():
                kk = k + twist
                out[kk] = out.get(kk, 0) + c
        return {k: c for k, c in out.items() if c}

    return M.cached("numerator", build)


def hilbert_value(M: PresentedModule, d: int) -> int:
    nv = M.ring.nvars
    total = 0
    for k, c in module_numerator(M).items():
        if d >= k:
            total += c * comb(d - k + nv - 1, nv - 1)
    return total


def hilbert_polynomial(M: PresentedModule) -> tuple:
    """Exact Hilbert polynomial coefficients (ascending, Fractions)."""

    def build():
        from .ring import binomial_poly

        nv = M.ring.nvars
        acc = [Fraction(0)] * nv
        for k, c in module_numerator(M).items():
            for i, a in enumerate(binomial_poly(nv - 1 - k, nv - 1)):
                acc[i] += c * a
        while acc and acc[-1] == 0:
            acc.pop()
        return tuple(acc)

    return M.cached("hilbert_poly", build)


def hilbert_poly_eval(coeffs, d: int) -> int:
    v = Fraction(0)
    for i, c in enumerate(coeffs):
        v += c * d**i
    assert v.denominator == 1
    return int(v)


def hilbert_stabilization(M: PresentedModule) -> int:
    """Least d0 with hilbert_value(d) = polynomial(d) for all d >= d0."""

    def build():
        num = module_numerator(M)
        coeffs = hilbert_polynomial(M)
        if not num:
            return 0
        nv = M.ring.nvars
        top = max(num) - nv + 1
        floor = min(num) - nv - 2
        d = top
        while d - 1 >= floor and hilbert_value(M, d - 1) == hilbert_poly_eval(
            coeffs, d - 1
        ):
            d -= 1
        return d

    return M.cached("hilbert_stab", build)


@dataclass
class HilbertData:
    values: dict
    polynomial: tuple | None
    stabilization_degree: int | None
    window: tuple


def hilbert(M: PresentedModule, window) -> HilbertData:
    """Graded dimensions over the window plus the exact Hilbert polynomial."""
    lo, hi = window
    values = {d: hilbert_value(M, d) for d in range(lo, hi + 1)}
    return HilbertData(
        values=values,
        polynomial=hilbert_polynomial(M),
        stabilization_degree=hilbert_stabilization(M),
        window=(lo, hi),
    )


def support_dim(M: PresentedModule) -> int:
    """Dimension of the support of the sheaf in P^n; -1 for the zero sheaf.

    Equals the degree of the exact Hilbert polynomial (finite-length junk
    contributes nothing)."""
    coeffs = hilbert_polynomial(M)
    return len(coeffs) - 1


# ---------------------------------------------------------------------------
# Quotients, saturation, annihilators.
# ---------------------------------------------------------------------------


def quotient_by_irrelevant(columns, free: FreeModule):
    """Generators of U : (x0..xn) for U spanned by the columns."""
    ring = free.ring
    nv = ring.nvars
    r = free.rank
    big = FreeModule(ring, tuple(free.twists[s] for _ in range(nv) for s in range(r)))

    def slot(i: int, s: int) -> int:
        return i * r + s

    cols = []
    for j in range(r):
        v = {}
        for i in range(nv):
            v[slot(i, j)] = ring.variable(i)
        cols.append(v)
    for u in columns:
        for i in range(nv):
            cols.append({slot(i, s): f for s, f in u.items()})
    syz, _ = syzygy_columns(cols, big)
    out = []
    for s in syz:
        v = {j: s[j] for j in range(r) if j in s}
        if v:
            out.append(v)
    return out


def saturate(M: PresentedModule) -> PresentedModule:
    """Saturation with respect to the irrelevant ideal.

    Submodule-presented input (ambient metadata): enlarges the submodule to
    its full section module; graded pieces equal h^0 of every twist.
    Cokernel input: kills the torsion of the relation submodule; pieces
    equal h^0 from metadata['h0_agrees_from'] on.
    """

    def build():
        ambient = M.metadata.get("ambient")
        if ambient is not None:
            amb_free, cols = ambient
            cols = _saturate_columns(cols, amb_free)
            mod = submodule_presentation(cols, amb_free, name=M.name)
            mod.metadata["h0_agrees_from"] = None  # exact in all degrees
            return mod
        cols = _saturate_columns(M.relations.columns(), M.generators)
        degs = [vp_degree(v, M.generators.twists) for v in cols]
        rel = GradedMap.from_columns(
            FreeModule(M.ring, degs), M.generators, cols
        )
        mod = PresentedModule(M.generators, rel, name=M.name)
        from .resolve import module_regularity

        mod.metadata["h0_agrees_from"] = module_regularity(mod)
        return mod

    return M.cached("saturation", build)


def _saturate_columns(columns, free: FreeModule):
    cur = [v for v in columns if not vp_is_zero(v)]
    data = buchberger_module(cur, free)
    while True:
        bigger = quotient_by_irrelevant(data.reduced, free)
        if all(data.contains(v) for v in bigger):
            return data.reduced
        data = buchberger_module(bigger, free)


def colon_into_slot(columns, free: FreeModule, s: int):
    """Ideal {f : f*e_s in U}, U spanned by columns."""
    ring = free.ring
    cols = [{s: ring.one()}] + [dict(v) for v in columns]
    syz, _ = syzygy_columns(cols, free)
    out = []
    for v in syz:
        f = v.get(0)
        if f is not None and not f.is_zero():
            out.append(f)
    return out


def ideal_intersection(gens1, gens2, ring: GradedRing):
    """Intersection of two homogeneous ideals."""
    if not gens1 or not gens2:
        return []
    big = FreeModule(ring, (0, 0))
    cols = [{0: ring.one(), 1: ring.one()}]
    cols += [{0: g} for g in gens1]
    cols += [{1: g} for g in gens2]
    syz, _ = syzygy_columns(cols, big)
    out = []
    for v in syz:
        f = v.get(0)
        if f is not None and not f.is_zero():
            out.append(f)
    return out


def annihilator(M: PresentedModule):
    """Generators of ann(M); the unit ideal for the zero module."""
    r = M.generators.rank
    ring = M.ring
    if r == 0:
        return [ring.one()]
    data = relations_gb(M)
    acc = None
    for s in range(r):
        gens = colon_into_slot(data.reduced, M.generators, s)
        if not gens:
            return []
        if acc is None:
            acc = gens
        else:
            acc = ideal_intersection(acc, gens, ring)
            if not acc:
                return []
    ideal_gb = buchberger(acc) if acc else None
    return list(ideal_gb.generators) if ideal_gb else []


# ---------------------------------------------------------------------------
# Graded pieces of a presented module: standard-monomial coordinates.
# ---------------------------------------------------------------------------


def iter_monomials(nvars: int, degree: int):
    """Deterministic generator of exponent tuples of the given total degree."""
    if degree < 0:
        return
    if nvars == 1:
        yield (degree,)
        return
    for e in range(degree, -1, -1):
        for rest in iter_monomials(nvars - 1, degree - e):
            yield (e,) + rest


def count_monomials(nvars: int, degree: int) -> int:
    if degree < 0:
        return 0
    return comb(degree + nvars - 1, nvars - 1)


class GradedPieces:
    """Standard-monomial bases of a presented module's graded pieces.

    Coordinates come from normal forms against the relation GB, so they are
    canonical and multiplication maps are exact.
    """

    def __init__(self, M: PresentedModule):
        self.M = M
        self.data = relations_gb(M)
        self.leads = lead_term_ideals(M)
        self._basis_cache: dict = {}

    def basis(self, d: int) -> list:
        """Keys (slot, exps) of the degree-d piece, deterministic order."""
        hit = self._basis_cache.get(d)
        if hit is not None:
            return hit
        keys = []
        for s, twist in enumerate(self.M.generators.twists):
            e = d - twist
            if e < 0:
                continue
            gens = self.leads[s]
            for exps in iter_monomials(self.M.ring.nvars, e):
                if not any(mono_divides(g, exps) for g in gens):
                    keys.append((s, exps))
        self._basis_cache[d] = keys
        return keys

    def dim(self, d: int) -> int:
        return hilbert_value(self.M, d)

    def coords(self, v: dict) -> dict:
        """Sparse coordinates {(slot, exps): coeff} of a vector's class."""
        r = self.data.normal_form_vec(v)
        out = {}
        for s, f in r.items():
            for exps, c in f.terms:
                out[(s, exps)] = c
        return out

    def element(self, key) -> dict:
        s, exps = key
        return {s: Polynomial(self.M.ring, ((exps, 1),))}
