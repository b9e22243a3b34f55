"""Sheaf-level constructions: twists, symmetric and Frobenius powers,
hyperplane restriction, standard bundles, the non-locally-free locus, and
global generation."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

from . import linalg
from .groebner import (
    GradedPieces,
    hilbert_stabilization,
    hilbert_value,
    saturate,
    support_dim,
    syzygy_columns,
    vp_degree,
    vp_is_zero,
)
from .modules import FreeModule, GradedMap, PresentedModule, line_bundle, structure_sheaf
from .resolve import ext_module, module_regularity, tensor_module
from .ring import ExponentOverflowError, GradedRing, Polynomial, RingError, mono_mul


class PushforwardWindowError(RuntimeError):
    """The degreewise window missed generators or relations (Hilbert mismatch)."""


def twist(M: PresentedModule, a: int) -> PresentedModule:
    """M~(a): every generator and relation twist drops by a."""
    out = PresentedModule(
        M.generators.shifted(a),
        M.relations.shifted(a),
        name=f"{M.name}({a:+d})" if M.name else "",
    )
    amb = M.metadata.get("ambient")
    if amb is not None:
        amb_free, cols = amb
        out.metadata["ambient"] = (amb_free.shifted(a), cols)
    return out


def sym_power(E: PresentedModule, k: int) -> PresentedModule:
    """Sym^k of a presented module.

    Generators are degree-k multisets of E's generators; relations come from
    rel_E (x) Sym^(k-1)(gens).  Faithful for locally free E; the caller is
    trusted on that (recorded in metadata)."""
    if k < 0:
        raise ValueError("negative symmetric power")
    ring = E.ring
    r = E.generators.rank
    if k == 0:
        return structure_sheaf(ring)
    if k == 1:
        out = PresentedModule(E.generators, E.relations, name=E.name)
        out.metadata["sym_of"] = (E.name, 1)
        return out
    multisets = list(combinations_with_replacement(range(r), k))
    index = {m: i for i, m in enumerate(multisets)}
    gen_twists = [sum(E.generators.twists[a] for a in m) for m in multisets]
    gens = FreeModule(ring, gen_twists)
    cols = []
    degs = []
    smaller = list(combinations_with_replacement(range(r), k - 1))
    for c in range(E.relations.source.rank):
        col = E.relations.column(c)
        if not col:
            continue
        for m in smaller:
            v: dict = {}
            for a, f in col.items():
                key = tuple(sorted(m + (a,)))
                slot = index[key]
                cur = v.get(slot)
                g = f if cur is None else cur + f
                if g.is_zero():
                    v.pop(slot, None)
                else:
                    v[slot] = g
            if v:
                cols.append(v)
                degs.append(
                    E.relations.source.twists[c]
                    + sum(E.generators.twists[a] for a in m)
                )
    rel = GradedMap.from_columns(FreeModule(ring, degs), gens, cols)
    out = PresentedModule(gens, rel, name=f"Sym^{k}({E.name or 'E'})")
    out.metadata["sym_of"] = (E.name, k)
    return out


def frobenius_pullback(M: PresentedModule, iterations: int = 1) -> PresentedModule:
    """Bracket construction for F^* (flat on smooth P^n, so exact on
    presentations): twists scale by p, matrix entries get exponents times p.
    Overflow past 16-bit exponents raises."""
    if iterations < 0:
        raise ValueError("negative Frobenius iteration count")
    out = M
    p = M.ring.p
    for _ in range(iterations):
        q = p
        gens = FreeModule(out.ring, tuple(q * t for t in out.generators.twists))
        src = FreeModule(out.ring, tuple(q * t for t in out.relations.source.twists))
        matrix = [
            [
                None if e is None else e.bracket_power(q)
                for e in row
            ]
            for row in out.relations.matrix
        ]
        rel = GradedMap(src, gens, matrix, check=False)
        out = PresentedModule(gens, rel, name=f"F*({out.name})" if out.name else "")
    return out


# ---------------------------------------------------------------------------
# Frobenius pushforward: restriction of scalars along x -> x^p, recovered
# degreewise over a window and re-presented.
# ---------------------------------------------------------------------------


def frobenius_pushforward(M: PresentedModule, window: tuple | None = None) -> PresentedModule:
    """Presentation of F_* M: graded pieces (F_* M)_e = M_(p e), variables
    acting through their p-th powers.

    Works over a target-degree window (default [-(n+2), reg + n + 2],
    widened when the generator twists demand it); a Hilbert mismatch over
    the extended check range raises PushforwardWindowError."""
    ring = M.ring
    p = ring.p
    n = ring.projective_dim
    margin = n + 2
    if window is None:
        from .sentinel import NEG_INF

        reg = module_regularity(M)
        reg = 0 if reg is NEG_INF else max(reg, 0)
        tmin = min(M.generators.twists) if M.generators.rank else 0
        lo = min(-(n + 2), -(-tmin // p) - 1)  # floor-protect low generators
        hi = reg + n + 2
    else:
        lo, hi = window
    GP = GradedPieces(M)

    def basis(e: int):
        return GP.basis(p * e)

    # generator hunt: elements of N_e outside x_i * N_(e-1)
    gen_elems: list = []   # (degree, vecpoly in M's cover)
    span_prev: list = []   # spanning vectors of the generated submodule, degree e-1
    xs = [ring.variable(i) for i in range(ring.nvars)]
    xps = [x.bracket_power(p) for x in xs]
    for e in range(lo, hi + 1):
        keys = basis(e)
        if not keys:
            span_prev = []
            continue
        ech = linalg.Echelon(ring.p)
        span_cur: list = []

        def push(vec):
            coords = GP.coords(vec)
            if not coords:
                return
            if ech.add(coords) is None:
                span_cur.append(vec)

        for vec in span_prev:
            for xp in xps:
                push({s: f * xp for s, f in vec.items()})
        for key in keys:
            elem = GP.element(key)
            coords = GP.coords(elem)
            if ech.add(coords) is None:
                span_cur.append(elem)
                gen_elems.append((e, elem))
        span_prev = span_cur

    gen_twists = [e for e, _ in gen_elems]
    gens = FreeModule(ring, gen_twists)

    # relation hunt, degreewise kernels of the evaluation map
    rel_cols: list = []
    rel_degs: list = []
    from .groebner import iter_monomials

    def eval_gen(gidx: int, nu) -> dict:
        e0, vec = gen_elems[gidx]
        mono = tuple(p * a for a in nu)
        return {s: f.term_mul(mono, 1) for s, f in vec.items()}

    for e in range(lo, hi + 1):
        fkeys = []
        for gidx, (e0, _) in enumerate(gen_elems):
            if e - e0 < 0:
                continue
            for nu in iter_monomials(ring.nvars, e - e0):
                fkeys.append((gidx, nu))
        if not fkeys:
            continue
        cols = [GP.coords(eval_gen(gidx, nu)) for gidx, nu in fkeys]
        kernel = linalg.kernel_basis(cols, ring.p)
        if not kernel:
            continue
        ech = linalg.Echelon(ring.p)
        for rc in rel_cols:
            # degree-e slice of the span of the known relations
            rdeg = vp_degree(rc, gens.twists)
            if e - rdeg < 0:
                continue
            for lam in iter_monomials(ring.nvars, e - rdeg):
                coords = {}
                for slot, f in rc.items():
                    for mexp, c in f.terms:
                        coords[(slot, mono_mul(mexp, lam))] = c
                ech.add(coords)
        for combo in kernel:
            coords = {}
            vec: dict = {}
            for idx, c in combo.items():
                gidx, nu = fkeys[idx]
                coords[(gidx, nu)] = c
                cur = vec.get(gidx)
                term = Polynomial(ring, ((nu, c),))
                term = term if cur is None else cur + term
                if term.is_zero():
                    vec.pop(gidx, None)
                else:
                    vec[gidx] = term
            if ech.add(coords) is None and vec:
                rel_cols.append(vec)
                rel_degs.append(e)

    rel = GradedMap.from_columns(FreeModule(ring, rel_degs), gens, rel_cols)
    out = PresentedModule(gens, rel, name=f"F_*({M.name})" if M.name else "")
    out.metadata["pushforward_window"] = (lo, hi)
    for e in range(lo, hi + margin + 1):
        if hilbert_value(out, e) != GP.dim(p * e):
            raise PushforwardWindowError(
                f"window ({lo},{hi}) too small: mismatch at target degree {e}"
            )
    return out


def restrict_hyperplane(M: PresentedModule, form: Polynomial | None = None) -> PresentedModule:
    """M (x) S/(form) re-expressed over the polynomial ring of the hyperplane.

    The degrevlex-leading variable of the form is eliminated; the default
    form is the last variable (kept fixed in suites for deterministic golden
    files)."""
    ring = M.ring
    nv = ring.nvars
    if nv <= 2:
        raise RingError("restriction would leave fewer than 2 variables")
    if form is None:
        form = ring.variable(nv - 1)
    if form.is_zero() or form.degree() != 1 or not form.is_homogeneous():
        raise ValueError("hyperplane form must be a nonzero linear form")
    coeffs = {e.index(1): c for e, c in form.terms}
    lead = min(coeffs)  # degrevlex-largest variable has the smallest index
    keep = [i for i in range(nv) if i != lead]
    new_names = tuple(ring.names[i] for i in keep)
    small = GradedRing(ring.p, nv - 1, new_names)
    inv = ring.inv(coeffs[lead])
    # x_lead = -inv * sum(other coefficients * their variables)
    repl = small.zero()
    for i, c in coeffs.items():
        if i == lead:
            continue
        repl = repl + small.variable(keep.index(i)).scalar_mul((-c * inv) % ring.p)

    pow_cache = {0: small.one()}

    def repl_pow(k: int) -> Polynomial:
        if k not in pow_cache:
            pow_cache[k] = repl_pow(k - 1) * repl
        return pow_cache[k]

    def substitute(f: Polynomial) -> Polynomial:
        acc = small.zero()
        for exps, c in f.terms:
            mono = tuple(exps[i] for i in keep)
            term = Polynomial(small, ((mono, c),))
            k = exps[lead]
            acc = acc + (term * repl_pow(k) if k else term)
        return acc

    gens = FreeModule(small, M.generators.twists)
    src = FreeModule(small, M.relations.source.twists)
    matrix = [
        [None if e is None else substitute(e) for e in row]
        for row in M.relations.matrix
    ]
    rel = GradedMap(src, gens, matrix, check=False)
    name = f"{M.name}|H" if M.name else ""
    return PresentedModule(gens, rel, name=name)


def nlf_locus_dim(M: PresentedModule) -> int:
    """Dimension of the non-locally-free locus; -1 when locally free.

    P^n is smooth, so local freeness at a point is vanishing of all higher
    Ext sheaves there; finite-length discrepancies between M and its
    saturation have Hilbert polynomial zero and cannot move the answer."""

    def build():
        best = -1
        for j in range(1, M.ring.nvars + 1):
            best = max(best, support_dim(ext_module(M, j, 0)))
        return best

    return M.cached("nlf", build)


def globally_generated(M: PresentedModule) -> bool:
    """Does H^0 (x) O surject onto the sheaf?

    Certified by Hilbert equality between the saturation and the submodule
    its degree-0 piece generates, over [0, stabilization + n + 1]."""

    def build():
        sat = saturate(M)
        n = M.ring.projective_dim
        GP = GradedPieces(sat)
        zero_piece = [GP.element(k) for k in GP.basis(0)]
        rel_cols = [c for c in sat.relations.columns() if not vp_is_zero(c)]
        cols = rel_cols + zero_piece
        degs = [vp_degree(c, sat.generators.twists) for c in cols]
        quot = PresentedModule(
            sat.generators,
            GradedMap.from_columns(
                FreeModule(M.ring, degs), sat.generators, cols
            ),
        )
        hi = hilbert_stabilization(sat) + n + 1
        return all(hilbert_value(quot, d) == 0 for d in range(0, hi + 1))

    return M.cached("globgen", build)


# ---------------------------------------------------------------------------
# Standard bundles.
# ---------------------------------------------------------------------------


@dataclass
class BundleCatalog:
    name: str              # structure | tangent | cotangent | canonical
    space: int             # projective dimension n
    d: int = 0             # twist, for structure(d)


def make_bundle(catalog: BundleCatalog, ring: GradedRing) -> PresentedModule:
    """Catalog presentations: structure(d) = O(d); canonical = O(-n-1);
    tangent = coker of the twisted Euler column; cotangent = the Koszul
    cokernel presentation."""
    n = ring.projective_dim
    if catalog.space != n:
        raise ValueError("catalog space does not match the ring")
    kind = catalog.name
    if kind == "structure":
        return line_bundle(ring, catalog.d)
    if kind == "canonical":
        return line_bundle(ring, -n - 1)
    if kind == "tangent":
        gens = FreeModule(ring, tuple(-1 for _ in range(n + 1)))
        src = FreeModule(ring, (0,))
        col = {i: ring.variable(i) for i in range(n + 1)}
        rel = GradedMap.from_columns(src, gens, [col])
        return PresentedModule(gens, rel, name=f"T_P{n}")
    if kind == "cotangent":
        pairs = list(combinations(range(n + 1), 2))
        index = {pr: i for i, pr in enumerate(pairs)}
        gens = FreeModule(ring, tuple(2 for _ in pairs))
        cols = []
        for (i, j, k) in combinations(range(n + 1), 3):
            col = {
                index[(j, k)]: ring.variable(i),
                index[(i, k)]: ring.variable(j).scalar_mul(ring.p - 1),
                index[(i, j)]: ring.variable(k),
            }
            cols.append(col)
        src = FreeModule(ring, tuple(3 for _ in cols))
        rel = GradedMap.from_columns(src, gens, cols)
        return PresentedModule(gens, rel, name=f"Omega_P{n}")
    raise ValueError(f"unknown bundle {kind!r}")


def direct_sum(*mods: PresentedModule) -> PresentedModule:
    ring = mods[0].ring
    gen_twists: list = []
    cols: list = []
    degs: list = []
    offset = 0
    for M in mods:
        if M.ring != ring:
            raise RingError("direct sum across rings")
        gen_twists.extend(M.generators.twists)
        for j in range(M.relations.source.rank):
            col = M.relations.column(j)
            cols.append({offset + s: f for s, f in col.items()})
            degs.append(M.relations.source.twists[j])
        offset += M.generators.rank
    gens = FreeModule(ring, gen_twists)
    rel = GradedMap.from_columns(FreeModule(ring, degs), gens, cols)
    name = "(+)".join(m.name or "M" for m in mods)
    return PresentedModule(gens, rel, name=name)


def dual_bundle(M: PresentedModule) -> PresentedModule:
    """Hom(M, O) for locally free M (Ext^0 of the presentation)."""
    return ext_module(M, 0, 0)


def ideal_of_point(ring: GradedRing, coords: tuple | None = None) -> PresentedModule:
    """Saturated ideal of a coordinate point (default [0:..:0:1])."""
    from .groebner import syzygies

    n = ring.projective_dim
    gens = [ring.variable(i) for i in range(n)]
    out = syzygies(gens)
    out.name = "I_p"
    return out
