"""Synthetic data for tests and benchmarks.

Every generator takes a ``seed`` and is deterministic for a given seed.
"""

from __future__ import annotations

import numpy as np


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_triples(nx: int, ysize: int, nz: int, n: int, seed=0) -> np.ndarray:
    """Up to ``n`` distinct uniform triples ``(x, y, z)``, sorted."""
    rng = _rng(seed)
    if n == 0 or min(nx, ysize, nz) == 0:
        return np.zeros((0, 3), dtype=np.int64)
    arr = np.stack([rng.integers(0, nx, n), rng.integers(0, ysize, n), rng.integers(0, nz, n)], axis=1)
    return np.unique(arr, axis=0)


def _power_law(rng, n: int, size: int, exponent: float) -> np.ndarray:
    """Ids in ``[0, n)`` with probability proportional to ``rank ** -exponent``,
    ranks shuffled over the id space."""
    weights = np.arange(1, n + 1, dtype=np.float64) ** -exponent
    weights /= weights.sum()
    ranks = rng.choice(n, size=size, p=weights)
    return rng.permutation(n)[ranks]


def rdf_like(n_terms: int, n_predicates: int, n_triples: int, seed=0,
             subject_skew: float = 0.8, predicate_skew: float = 1.0,
             object_skew: float = 1.1, hub_fraction: float = 0.3) -> np.ndarray:
    """Id triples ``(s, p, o)`` shaped like an RDF graph.

    Subjects and predicates follow power laws.  A ``hub_fraction`` of the
    objects is drawn from a steep power law (classes, popular resources)
    and the rest uniformly.  Subjects and objects share the id space.
    """
    rng = _rng(seed)
    s = _power_law(rng, n_terms, n_triples, subject_skew)
    p = _power_law(rng, n_predicates, n_triples, predicate_skew)
    hub = rng.random(n_triples) < hub_fraction
    o = rng.integers(0, n_terms, n_triples)
    o[hub] = _power_law(rng, n_terms, int(hub.sum()), object_skew)
    return np.unique(np.stack([s, p, o], axis=1), axis=0)


def rdf_lines(triples: np.ndarray) -> list[str]:
    """Render id triples as text lines with readable term names."""
    return [f"<r{s}> <p{p}> <r{o}>" for s, p, o in triples.tolist()]


def evolving_graph(n_nodes: int, n_instants: int, change_rate: float, seed=0,
                   density: float = 0.05) -> np.ndarray:
    """Change log ``(x, z, t)`` of a random evolving graph.

    The snapshot at ``t = 0`` has about ``density * n_nodes**2`` edges; every
    later instant toggles about ``change_rate`` times that many random cells.
    """
    rng = _rng(seed)
    cells = n_nodes * n_nodes
    base = max(1, int(round(density * cells)))
    per_step = max(1, int(round(change_rate * base)))
    parts = [np.stack([rng.integers(0, n_nodes, base), rng.integers(0, n_nodes, base),
                       np.zeros(base, dtype=np.int64)], axis=1)]
    if n_instants > 1:
        m = per_step * (n_instants - 1)
        parts.append(np.stack([rng.integers(0, n_nodes, m), rng.integers(0, n_nodes, m),
                               np.repeat(np.arange(1, n_instants), per_step)], axis=1))
    return np.unique(np.concatenate(parts), axis=0)


def commnet_like(n_nodes: int = 1000, n_instants: int = 10_000, n_contacts: int = 250_000,
                 seed=0, mean_duration: float = 20.0, skew: float = 0.9) -> np.ndarray:
    """Change log of a communication network.

    Each contact switches an edge on at a random instant and off again after a
    short geometric duration, so most changes come in on/off pairs.  Callers
    follow a power law.  Overlapping contacts on the same edge cancel out,
    which keeps every ``(x, z, t)`` unique as the change log requires.
    """
    rng = _rng(seed)
    x = _power_law(rng, n_nodes, n_contacts, skew)
    z = _power_law(rng, n_nodes, n_contacts, skew)
    start = rng.integers(0, n_instants, n_contacts)
    stop = start + rng.geometric(1.0 / mean_duration, n_contacts)
    on = np.stack([x, z, start], axis=1)
    off = np.stack([x, z, stop], axis=1)[stop < n_instants]
    events = np.concatenate([on, off])
    # a toggle recorded twice at the same instant is no change at all
    uniq, counts = np.unique(events, axis=0, return_counts=True)
    return uniq[counts % 2 == 1]
