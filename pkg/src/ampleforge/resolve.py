"""Minimal free resolutions, Betti tables, tensor, Ext, Tor.

Resolutions are built by iterated syzygies with unit-pivot cancellation
after every step, so the finished complex is the minimal one and Betti
numbers are canonical.  Homology of free complexes is presented exactly:
kernels are syzygies of the map's columns, images are lifted through a
history-tracked Groebner basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from . import linalg
from .groebner import (
    GradedPieces,
    buchberger_module,
    count_monomials,
    hilbert_polynomial,
    hilbert_value,
    iter_monomials,
    submodule_presentation,
    support_dim,
    syzygy_columns,
    vp_add,
    vp_degree,
    vp_is_zero,
    vp_sub,
)
from .modules import FreeModule, GradedMap, PresentedModule
from .ring import Polynomial, RingError, mono_mul
from .sentinel import NEG_INF


class ResolutionError(RuntimeError):
    """Internal resolution invariant broke (e.g. length past nvars)."""


def _vp_mul_poly(v: dict, q: Polynomial) -> dict:
    out = {}
    for s, f in v.items():
        g = f * q
        if not g.is_zero():
            out[s] = g
    return out


def _cancel_pair(prev_cols, new_cols, new_degs, tgt_twists, ring):
    """Remove unit pivots from new_cols, mirroring base changes into prev_cols.

    new_cols are columns over the slots listed by tgt_twists; prev_cols (or
    None at the presentation step) is the list of previous-map columns
    indexed by those same slots.  Splitting off a trivial S(-d) = S(-d)
    summand never changes homology, so exactness is preserved.
    """
    new_cols = [dict(v) for v in new_cols]
    new_degs = list(new_degs)
    tgt_twists = list(tgt_twists)
    prev_cols = None if prev_cols is None else [dict(v) for v in prev_cols]

    while True:
        pivot = None
        for j, col in enumerate(new_cols):
            for i in sorted(col):
                if col[i].degree() == 0:
                    pivot = (i, j, col[i].lead_coeff())
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j, u = pivot
        uinv = ring.inv(u)
        colj = new_cols[j]
        for l, col in enumerate(new_cols):
            if l != j and i in col:
                new_cols[l] = vp_sub(col, _vp_mul_poly(colj, col[i].scalar_mul(uinv)))
        if prev_cols is not None:
            for m, f in colj.items():
                if m == i:
                    continue
                prev_cols[i] = vp_add(
                    prev_cols[i], _vp_mul_poly(prev_cols[m], f.scalar_mul(uinv))
                )
            if not vp_is_zero(prev_cols[i]):
                raise ResolutionError("pivot column failed to cancel")
            del prev_cols[i]
        # drop slot i and column j, renumbering slots above i
        del new_cols[j], new_degs[j]
        del tgt_twists[i]
        renumbered = []
        for col in new_cols:
            renumbered.append(
                {(s - 1 if s > i else s): f for s, f in col.items() if s != i}
            )
        new_cols = renumbered

    keep = [k for k, v in enumerate(new_cols) if not vp_is_zero(v)]
    new_cols = [new_cols[k] for k in keep]
    new_degs = [new_degs[k] for k in keep]
    return prev_cols, new_cols, new_degs, tgt_twists


@dataclass
class Resolution:
    """Chain of graded free maps; maps[k]: F_{k+1} -> F_k, F_0 = f0."""

    module: PresentedModule
    f0: FreeModule
    maps: list
    minimal: bool = True
    degenerate: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.maps)

    def free(self, i: int) -> FreeModule:
        if i == 0:
            return self.f0
        return self.maps[i - 1].source

    def free_modules(self) -> list:
        return [self.free(i) for i in range(self.length + 1)]

    def validate(self, window=None) -> None:
        """Exact checks: compositions vanish; optional Hilbert accounting."""
        for k in range(1, self.length):
            comp = self.maps[k - 1].compose(self.maps[k])
            if not comp.is_zero():
                raise ResolutionError(f"maps {k} and {k+1} do not compose to zero")
        if window is not None:
            lo, hi = window
            nv = self.module.ring.nvars
            for d in range(lo, hi + 1):
                alt = 0
                for i, F in enumerate(self.free_modules()):
                    dim = sum(count_monomials(nv, d - t) for t in F.twists)
                    alt += dim if i % 2 == 0 else -dim
                if alt != hilbert_value(self.module, d):
                    raise ResolutionError(
                        f"Hilbert accounting fails in degree {d}"
                    )

    def has_unit_entries(self) -> bool:
        for m in self.maps:
            for row in m.matrix:
                for e in row:
                    if e is not None and e.degree() == 0:
                        return True
        return False


def min_free_resolution(M: PresentedModule) -> Resolution:
    """Minimal graded free resolution by iterated syzygies + cancellation."""

    def build():
        ring = M.ring
        f0 = list(M.generators.twists)
        cols0 = [v for v in M.relations.columns() if not vp_is_zero(v)]
        degs0 = [vp_degree(v, tuple(f0)) for v in cols0]
        _, cols0, degs0, f0 = _cancel_pair(None, cols0, degs0, f0, ring)

        levels = [f0]
        chain: list = []
        if cols0:
            levels.append(degs0)
            chain.append(cols0)

        while chain:
            if len(chain) > ring.nvars + 4:
                raise ResolutionError("resolution refuses to terminate")
            target = FreeModule(ring, tuple(levels[len(chain) - 1]))
            syz, syzdegs = syzygy_columns(chain[-1], target)
            syz = [v for v in syz if not vp_is_zero(v)]
            syzdegs = syzdegs[: len(syz)] if len(syzdegs) != len(syz) else syzdegs
            if not syz:
                break
            prev, syz, syzdegs, twists = _cancel_pair(
                chain[-1], syz, syzdegs, levels[-1], ring
            )
            chain[-1] = prev
            levels[-1] = twists
            if not syz:
                # cancellation may strand empty trailing maps
                while chain and not chain[-1]:
                    chain.pop()
                    levels.pop()
                break
            levels.append(syzdegs)
            chain.append(syz)

        while chain and not chain[-1]:
            chain.pop()
            levels.pop()

        if len(chain) > ring.nvars:
            raise ResolutionError(
                f"minimal resolution longer than nvars={ring.nvars}"
            )
        maps = []
        for k, cols in enumerate(chain):
            src = FreeModule(ring, tuple(levels[k + 1]))
            tgt = FreeModule(ring, tuple(levels[k]))
            maps.append(GradedMap.from_columns(src, tgt, cols))
        res = Resolution(module=M, f0=FreeModule(ring, tuple(levels[0])), maps=maps)
        if res.has_unit_entries():
            raise ResolutionError("resolution not minimal after cancellation")
        res.validate()
        return res

    return M.cached("minres", build)


@dataclass
class BettiTable:
    entries: dict  # (homological index i, internal degree j) -> multiplicity

    @property
    def reg0(self):
        """Module-level regularity: max(j - i) over nonzero entries."""
        if not self.entries:
            return NEG_INF
        return max(j - i for (i, j) in self.entries)

    def projective_dimension(self) -> int:
        if not self.entries:
            return -1
        return max(i for (i, _) in self.entries)

    def to_tsv(self) -> str:
        """Macaulay-style grid: rows j-i, columns i."""
        if not self.entries:
            return "empty\n"
        cols = sorted({i for (i, _) in self.entries})
        rows = sorted({j - i for (i, j) in self.entries})
        lines = ["\t".join([""] + [str(i) for i in cols])]
        for r in rows:
            cells = [str(r)]
            for i in cols:
                cells.append(str(self.entries.get((i, i + r), "")))
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"


def betti(res: Resolution) -> BettiTable:
    """Betti numbers of a minimal resolution (minimality re-checked)."""
    if res.has_unit_entries():
        raise ValueError("betti requires a minimal resolution")
    entries: dict = {}
    for i, F in enumerate(res.free_modules()):
        for t in F.twists:
            entries[(i, t)] = entries.get((i, t), 0) + 1
    return BettiTable(entries=entries)


def module_regularity(M: PresentedModule):
    """max(j - i) over the minimal Betti table; NEG_INF for the zero module."""
    return M.cached("modreg", lambda: betti(min_free_resolution(M)).reg0)


# ---------------------------------------------------------------------------
# Tensor products.
# ---------------------------------------------------------------------------


def tensor_module(M: PresentedModule, N: PresentedModule, minimalize: bool = False) -> PresentedModule:
    """Presentation of M (x) N.

    Generators are pairwise twist sums; relations are rel_M (x) gens_N plus
    gens_M (x) rel_N.  Not minimalized unless asked (tensor presentations
    can be large)."""
    if M.ring != N.ring:
        raise RingError("tensor across different rings")
    ring = M.ring
    rm, rn = M.generators.rank, N.generators.rank
    gen_twists = [
        M.generators.twists[a] + N.generators.twists[b]
        for a in range(rm)
        for b in range(rn)
    ]

    def pair(a: int, b: int) -> int:
        return a * rn + b

    cols = []
    degs = []
    for c in range(M.relations.source.rank):
        col = M.relations.column(c)
        for b in range(rn):
            v = {pair(a, b): f for a, f in col.items()}
            if v:
                cols.append(v)
                degs.append(M.relations.source.twists[c] + N.generators.twists[b])
    for d in range(N.relations.source.rank):
        col = N.relations.column(d)
        for a in range(rm):
            v = {pair(a, b): f for b, f in col.items()}
            if v:
                cols.append(v)
                degs.append(M.generators.twists[a] + N.relations.source.twists[d])

    if minimalize:
        _, cols, degs, gen_twists = _cancel_pair(None, cols, degs, gen_twists, ring)
    gens = FreeModule(ring, gen_twists)
    rel = GradedMap.from_columns(FreeModule(ring, degs), gens, cols)
    name = f"{M.name or 'M'}(x){N.name or 'N'}"
    return PresentedModule(gens, rel, name=name)


# ---------------------------------------------------------------------------
# Duals, Ext, homology of free complexes.
# ---------------------------------------------------------------------------


def dual_free(F: FreeModule, a: int) -> FreeModule:
    """Hom(F, S(a)): generator degrees flip and shift by -a."""
    return FreeModule(F.ring, tuple(-a - t for t in F.twists))


def dual_complex(M: PresentedModule, a: int) -> list:
    """Duals of the resolution differentials; psis[k]: D(F_k) -> D(F_{k+1})."""

    def build():
        res = min_free_resolution(M)
        psis = []
        for phi in res.maps:
            src = dual_free(phi.target, a)
            tgt = dual_free(phi.source, a)
            matrix = [
                [phi.matrix[j][i] for j in range(phi.target.rank)]
                for i in range(phi.source.rank)
            ]
            psis.append(GradedMap(src, tgt, matrix, check=False))
        return psis

    return M.cached(("dualcx", a), build)


def free_complex_homology(B: GradedMap | None, A: GradedMap | None, F: FreeModule) -> PresentedModule:
    """ker(A)/im(B) at F, presented exactly.

    Kernel generators are the syzygies of A's columns; relations are the
    lifts of B's columns through the kernel's tracked Groebner basis plus
    the kernel generators' own syzygies."""
    ring = F.ring
    if A is None or A.is_zero():
        kgens = [{s: ring.one()} for s in range(F.rank)]
        kdegs = list(F.twists)
    else:
        kgens, kdegs = syzygy_columns(A.columns(), A.target)
    if not kgens:
        return PresentedModule(FreeModule(ring, ()), None)
    kdata = buchberger_module(kgens, F, want_syzygies=True)
    rel_cols = []
    rel_degs = []
    if B is not None:
        for j in range(B.source.rank):
            col = B.column(j)
            if not col:
                continue
            expr = kdata.express(col)
            if expr is None:
                raise ResolutionError("image column escapes the kernel")
            if expr:
                rel_cols.append(expr)
                rel_degs.append(B.source.twists[j])
    for s in kdata.syzygies:
        d = None
        for i, h in s.items():
            d = h.degree() + kdegs[i]
            break
        rel_cols.append(s)
        rel_degs.append(d)
    gens = FreeModule(ring, kdegs)
    rel = GradedMap.from_columns(FreeModule(ring, rel_degs), gens, rel_cols)
    return PresentedModule(gens, rel)


def ext_module(M: PresentedModule, j: int, a: int) -> PresentedModule:
    """Ext^j_S(M, S(a)) as the j-th homology of the dualized resolution."""
    nvars = M.ring.nvars
    if not (0 <= j <= nvars):
        raise ValueError(f"ext index {j} out of [0, {nvars}]")

    def build():
        res = min_free_resolution(M)
        if j > res.length:
            return PresentedModule(FreeModule(M.ring, ()), None)
        psis = dual_complex(M, a)
        F = dual_free(res.free(j), a)
        A = psis[j] if j < res.length else None
        B = psis[j - 1] if j >= 1 else None
        out = free_complex_homology(B, A, F)
        out.metadata["window"] = None  # presentation is exact, no staleness
        return out

    return M.cached(("ext", j, a), build)


def _map_piece_columns(phi: GradedMap, e: int) -> list:
    """Sparse columns of the degree-e piece of a graded map."""
    ring = phi.ring
    p = ring.p
    nv = ring.nvars
    if all(e - t < 0 for t in phi.target.twists):
        return []
    cols = []
    for j, tau in enumerate(phi.source.twists):
        dd = e - tau
        if dd < 0:
            continue
        entries = [
            (i, phi.matrix[i][j])
            for i in range(phi.target.rank)
            if phi.matrix[i][j] is not None
        ]
        if not entries:
            continue
        for mu in iter_monomials(nv, dd):
            col: dict = {}
            for i, f in entries:
                for mexp, c in f.terms:
                    key = (i, mono_mul(mexp, mu))
                    v = (col.get(key, 0) + c) % p
                    if v:
                        col[key] = v
                    else:
                        col.pop(key, None)
            if col:
                cols.append(col)
    return cols


def map_piece_rank(phi: GradedMap, e: int) -> int:
    return linalg.rank(_map_piece_columns(phi, e), phi.ring.p)


def ext_piece_dim(M: PresentedModule, j: int, a: int, e: int) -> int:
    """dim of the degree-e piece of Ext^j(M, S(a)), by degreewise ranks."""
    if j < 0:
        return 0

    def build():
        res = min_free_resolution(M)
        if j > res.length:
            return 0
        F = dual_free(res.free(j), a)
        nv = M.ring.nvars
        dim = sum(count_monomials(nv, e - t) for t in F.twists)
        if dim == 0:
            return 0
        psis = dual_complex(M, a)
        r_out = _dual_rank(M, a, j, e, psis) if j < res.length else 0
        r_in = _dual_rank(M, a, j - 1, e, psis) if j >= 1 else 0
        return dim - r_out - r_in

    return M.cached(("extdim", j, a, e), build)


def _dual_rank(M: PresentedModule, a: int, k: int, e: int, psis) -> int:
    return M.cached(("dualrank", a, k, e), lambda: map_piece_rank(psis[k], e))


# ---------------------------------------------------------------------------
# Tor via the tensored resolution, degreewise.
# ---------------------------------------------------------------------------


class TorDims:
    """Graded dimensions of Tor_i(M, N) over a window, plus its support."""

    def __init__(self, M, N, i, dims):
        self._M = M
        self._N = N
        self._i = i
        self.dims = dims

    @property
    def support_dim(self) -> int:
        if not hasattr(self, "_support"):
            self._support = support_dim(tor_module(self._M, self._N, self._i))
        return self._support


def _tensor_piece_basis(F: FreeModule, GP: GradedPieces, d: int) -> list:
    keys = []
    for fslot, t in enumerate(F.twists):
        for nk in GP.basis(d - t):
            keys.append((fslot, nk))
    return keys


def _tensor_map_rank(phi: GradedMap, GP: GradedPieces, d: int) -> int:
    """Rank of (phi tensor N) in degree d, in standard-monomial coordinates."""
    ring = phi.ring
    p = ring.p
    cols = []
    for j, tau in enumerate(phi.source.twists):
        entries = [
            (i, phi.matrix[i][j])
            for i in range(phi.target.rank)
            if phi.matrix[i][j] is not None
        ]
        if not entries:
            continue
        for s, exps in GP.basis(d - tau):
            col: dict = {}
            for i, f in entries:
                vec = {s: f.term_mul(exps, 1)}
                for key, c in GP.coords(vec).items():
                    v = (col.get((i, key), 0) + c) % p
                    if v:
                        col[(i, key)] = v
                    else:
                        col.pop((i, key), None)
            if col:
                cols.append(col)
    return linalg.rank(cols, p)


def tor_dims(M: PresentedModule, N: PresentedModule, i: int, window) -> TorDims:
    """Graded dims of Tor_i(M, N) over the window (resolve M, tensor, rank)."""
    if i < 0:
        raise ValueError("negative Tor index")
    lo, hi = window
    res = min_free_resolution(M)
    if i > res.length:
        return TorDims(M, N, i, {d: 0 for d in range(lo, hi + 1)})
    GP = GradedPieces(N)
    nv = M.ring.nvars
    dims = {}
    for d in range(lo, hi + 1):
        Fi = res.free(i)
        dim_mid = sum(GP.dim(d - t) for t in Fi.twists)
        r_outgoing = _tensor_map_rank(res.maps[i - 1], GP, d) if i >= 1 else 0
        r_incoming = _tensor_map_rank(res.maps[i], GP, d) if i < res.length else 0
        dims[d] = dim_mid - r_outgoing - r_incoming
    return TorDims(M, N, i, dims)


def _free_tensor(F: FreeModule, N: PresentedModule) -> PresentedModule:
    """F (x) N as a presented module (block sum of twisted copies of N)."""
    ring = F.ring
    rn = N.generators.rank
    gen_twists = [t + u for t in F.twists for u in N.generators.twists]
    cols = []
    degs = []
    for fslot, t in enumerate(F.twists):
        for c in range(N.relations.source.rank):
            col = N.relations.column(c)
            v = {fslot * rn + b: f for b, f in col.items()}
            if v:
                cols.append(v)
                degs.append(t + N.relations.source.twists[c])
    gens = FreeModule(ring, gen_twists)
    rel = GradedMap.from_columns(FreeModule(ring, degs), gens, cols)
    return PresentedModule(gens, rel)


def _tensor_map_columns(phi: GradedMap, N: PresentedModule) -> list:
    """Columns of phi (x) id_N over the generator cover of target (x) N."""
    rn = N.generators.rank
    cols = []
    for j in range(phi.source.rank):
        col = phi.column(j)
        for b in range(rn):
            cols.append({i * rn + b: f for i, f in col.items()})
    return cols


def presented_map_kernel(A_cols, src_free: FreeModule, tgt: PresentedModule):
    """Kernel generators of the induced map src_free -> tgt (a presented
    module), as columns over src_free."""
    combined = list(A_cols) + tgt.relations.columns()
    syz, _ = syzygy_columns(combined, tgt.generators)
    n = len(A_cols)
    out = []
    for s in syz:
        v = {j: s[j] for j in range(n) if j in s}
        if v:
            out.append(v)
    return out


def presented_homology(B_cols, B_degs, mid: PresentedModule, A_cols, nxt: PresentedModule | None) -> PresentedModule:
    """H = ker(mid -> nxt) / im(B) for maps of presented modules.

    B_cols are columns over mid's generator cover; A_cols are the columns of
    the outgoing map (indexed by mid's generator slots, over nxt's cover)."""
    ring = mid.ring
    F1 = mid.generators
    if A_cols is None or nxt is None:
        kgens = [{s: ring.one()} for s in range(F1.rank)]
    else:
        kgens = presented_map_kernel(A_cols, F1, nxt)
    if not kgens:
        return PresentedModule(FreeModule(ring, ()), None)
    kdegs = [vp_degree(v, F1.twists) for v in kgens]
    kdata = buchberger_module(kgens, F1, want_syzygies=True)
    rel_cols = []
    rel_degs = []
    to_lift = []
    if B_cols:
        to_lift += list(zip(B_cols, B_degs))
    to_lift += [
        (col, vp_degree(col, F1.twists))
        for col in mid.relations.columns()
        if not vp_is_zero(col)
    ]
    for col, deg in to_lift:
        expr = kdata.express(col)
        if expr is None:
            raise ResolutionError("column to kill is outside the kernel")
        if expr:
            rel_cols.append(expr)
            rel_degs.append(deg)
    for s in kdata.syzygies:
        d = None
        for idx, h in s.items():
            d = h.degree() + kdegs[idx]
            break
        rel_cols.append(s)
        rel_degs.append(d)
    gens = FreeModule(ring, kdegs)
    rel = GradedMap.from_columns(FreeModule(ring, rel_degs), gens, rel_cols)
    return PresentedModule(gens, rel)


def linear_resolution(M: PresentedModule, m: int, length: int) -> Resolution:
    """Resolution with i-th term a sum of copies of S(-m-i), built by
    repeatedly surjecting from the twisted global sections (needs M to be
    m-regular; on P^n the step size is 1 since reg(O) = 0).

    A sheaf that dies after saturation yields the zero resolution, flagged
    degenerate."""
    from .groebner import GradedPieces, relations_gb, saturate
    from .sheafcoh import h_dim

    ring = M.ring
    n = ring.projective_dim
    for i in range(1, n + 1):
        bad = h_dim(M, i, m - i)
        if bad:
            raise ValueError(
                f"module is not {m}-regular: H^{i}(twist {m - i}) = {bad}"
            )
    sat = saturate(M)
    GP = GradedPieces(sat)
    keys = GP.basis(m)
    if not keys:
        res = Resolution(
            module=M, f0=FreeModule(ring, ()), maps=[], minimal=False,
            degenerate=True,
        )
        res.metadata["linear"] = True
        return res

    # step 0: term_0 = S(-m)^(h^0), mapping onto the saturation
    term = FreeModule(ring, tuple(m for _ in keys))
    sigma_cols = [GP.element(k) for k in keys]
    # kernel inside term_0: preimage of the saturation's relations
    combined = sigma_cols + sat.relations.columns()
    kernel, _ = syzygy_columns(combined, sat.generators)
    kcols = []
    for v in kernel:
        w = {j: v[j] for j in range(len(sigma_cols)) if j in v}
        if w:
            kcols.append(w)

    f0 = term
    maps = []
    prev_term = term
    cur_kernel = kcols
    for step in range(1, length + 1):
        d = m + step
        # basis of the kernel's degree-d piece, inside prev_term
        ech = linalg.Echelon(ring.p)
        chosen = []
        for col in cur_kernel:
            cdeg = vp_degree(col, prev_term.twists)
            if d - cdeg < 0:
                continue
            for mu in iter_monomials(ring.nvars, d - cdeg):
                vec = {s: f.term_mul(mu, 1) for s, f in col.items()}
                coords = {}
                for s, f in vec.items():
                    for exps, c in f.terms:
                        coords[(s, exps)] = c
                if ech.add(coords) is None:
                    chosen.append(vec)
        if not chosen:
            break
        new_term = FreeModule(ring, tuple(d for _ in chosen))
        maps.append(GradedMap.from_columns(new_term, prev_term, chosen))
        # next kernel: plain syzygies of the chosen columns
        nxt, _ = syzygy_columns(chosen, prev_term)
        cur_kernel = [v for v in nxt if not vp_is_zero(v)]
        prev_term = new_term
        if not cur_kernel:
            break
    res = Resolution(module=M, f0=f0, maps=maps, minimal=False)
    res.metadata["linear"] = True
    res.metadata["sigma0"] = sigma_cols
    res.validate()
    return res


def tor_module(M: PresentedModule, N: PresentedModule, i: int) -> PresentedModule:
    """Exact presentation of Tor_i(M, N) (homology of the tensored resolution).

    At position i the outgoing map is maps[i-1] (x) N into F_{i-1} (x) N and
    the incoming one is maps[i] (x) N."""
    res = min_free_resolution(M)
    if i > res.length or i < 0:
        return PresentedModule(FreeModule(M.ring, ()), None)
    mid = _free_tensor(res.free(i), N)
    if i < res.length:
        B_phi = res.maps[i]
        B_cols = _tensor_map_columns(B_phi, N)
        B_degs = [t + u for t in B_phi.source.twists for u in N.generators.twists]
    else:
        B_cols, B_degs = [], []
    if i >= 1:
        A_cols = _tensor_map_columns(res.maps[i - 1], N)
        nxt = _free_tensor(res.free(i - 1), N)
    else:
        A_cols, nxt = None, None
    return presented_homology(B_cols, B_degs, mid, A_cols, nxt)
