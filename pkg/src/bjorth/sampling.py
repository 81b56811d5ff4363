"""Random module elements from named ensembles."""
from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .module import ModuleElement, ModuleSpace

KINDS = ("ginibre", "positive", "unitary-column", "quasi-enriched")
ELEMENT_KINDS = ("ginibre", "positive", "unitary-column")


def _ginibre(rng, m, n):
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)


def _isometry(rng, m, n):
    g = _ginibre(rng, max(m, n), min(m, n))
    if g.shape[1] == 1:
        q = g / np.linalg.norm(g)
        return q if m >= n else q.conj().T
    q, r = np.linalg.qr(g)
    # fix the phase so the factor is Haar distributed
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q if m >= n else q.conj().T


def kind_applies(space: ModuleSpace, kind: str) -> bool:
    if kind == "positive":
        return space.is_algebra
    return kind in KINDS


def sample_element(rng: np.random.Generator, space: ModuleSpace, kind: str = "ginibre") -> ModuleElement:
    """Draw one element; deterministic given the generator state.

    ``positive`` draws ``g* g`` scaled to norm one and needs square blocks;
    ``unitary-column`` takes the isometric factor of a QR decomposition.
    """
    if kind == "ginibre":
        blocks = [_ginibre(rng, m, n) for m, n in space.shapes]
    elif kind == "positive":
        if not space.is_algebra:
            raise ConfigError("kind 'positive' needs square blocks (the algebra as a module)")
        blocks = []
        for m, n in space.shapes:
            g = _ginibre(rng, n, n)
            blocks.append(g.conj().T @ g)
        scale = max(np.linalg.norm(b, 2) for b in blocks)
        blocks = [b / scale for b in blocks]
    elif kind == "unitary-column":
        blocks = [_isometry(rng, m, n) for m, n in space.shapes]
    else:
        raise ConfigError(f"unknown element kind {kind!r}; choose from {ELEMENT_KINDS}")
    return ModuleElement(space, blocks)


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``key`` under the master ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) % (1 << 64), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
