"""Reproducible instance generation for the verification suites.

Same seed + config gives a bit-identical stream; instance k draws from its
own derived seed, so any failure replays by index alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .groebner import minimal_generators, syzygies, vp_is_zero
from .modules import FreeModule, GradedMap, PresentedModule
from .ring import GradedRing, Polynomial

SHAPES = ("monomial_ideal", "binomial_ideal", "quotient", "direct_sum")


@dataclass(frozen=True)
class FuzzConfig:
    seed: int
    count: int
    nvars: int
    p: int
    max_gen_degree: int = 3
    max_gens: int = 3
    shape: str = "monomial_ideal"

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 bits")


def _instance_rng(cfg: FuzzConfig, index: int) -> random.Random:
    return random.Random((cfg.seed * 1000003 + index) & (2**64 - 1))


def _random_monomial(rng: random.Random, ring: GradedRing, degree: int) -> tuple:
    exps = [0] * ring.nvars
    for _ in range(degree):
        exps[rng.randrange(ring.nvars)] += 1
    return tuple(exps)


def _random_monomials(rng, ring, cfg, allow_empty: bool = False) -> list:
    lo = 0 if allow_empty else 1
    k = rng.randint(lo, max(lo, cfg.max_gens))
    out = []
    for _ in range(k):
        d = rng.randint(1, cfg.max_gen_degree)
        out.append(_random_monomial(rng, ring, d))
    return sorted(set(out))


def _mono_poly(ring: GradedRing, exps: tuple, c: int = 1) -> Polynomial:
    return Polynomial(ring, ((exps, c % ring.p),)) if c % ring.p else ring.zero()


def _random_binomials(rng, ring, cfg, allow_empty: bool = False) -> list:
    lo = 0 if allow_empty else 1
    k = rng.randint(lo, max(lo, cfg.max_gens))
    out = []
    for _ in range(k):
        d = rng.randint(1, cfg.max_gen_degree)
        m1 = _random_monomial(rng, ring, d)
        m2 = _random_monomial(rng, ring, d)
        c = rng.randint(1, ring.p - 1)
        f = _mono_poly(ring, m1) + _mono_poly(ring, m2, (-c) % ring.p)
        if f.is_zero():
            f = _mono_poly(ring, m1)
        out.append(f)
    return out


def _quotient(ring: GradedRing, polys, name: str) -> PresentedModule:
    polys = [f for f in polys if not f.is_zero()]
    gens = FreeModule(ring, (0,))
    cols = [{0: f} for f in polys]
    cols = minimal_generators(cols, gens)
    degs = [c[0].degree() for c in cols]
    rel = GradedMap.from_columns(FreeModule(ring, degs), gens, cols)
    return PresentedModule(gens, rel, name=name)


def make_instance(cfg: FuzzConfig, index: int) -> PresentedModule:
    rng = _instance_rng(cfg, index)
    ring = GradedRing(cfg.p, cfg.nvars)
    tag = f"fuzz-{cfg.shape}-{cfg.seed}-{index}"
    if cfg.shape == "monomial_ideal":
        monos = _random_monomials(rng, ring, cfg)
        mod = syzygies([_mono_poly(ring, m) for m in monos])
        mod.name = tag
        return mod
    if cfg.shape == "binomial_ideal":
        polys = _random_binomials(rng, ring, cfg)
        mod = syzygies(polys)
        mod.name = tag
        return mod
    if cfg.shape == "quotient":
        allow_empty = cfg.max_gens == 0
        if rng.random() < 0.75:
            polys = [
                _mono_poly(ring, m)
                for m in _random_monomials(rng, ring, cfg, allow_empty)
            ]
        else:
            polys = _random_binomials(rng, ring, cfg, allow_empty)
        return _quotient(ring, polys, tag)
    # direct_sum: two quotient-by-monomials summands with twists
    from .functors import direct_sum, twist

    parts = []
    for _ in range(2):
        polys = [_mono_poly(ring, m) for m in _random_monomials(rng, ring, cfg)]
        part = _quotient(ring, polys, "part")
        parts.append(twist(part, rng.randint(-2, 2)))
    mod = direct_sum(*parts)
    mod.name = tag
    return mod


def fuzz_stream(cfg: FuzzConfig):
    """Deterministic iterator of presented modules."""
    for index in range(cfg.count):
        yield make_instance(cfg, index)
