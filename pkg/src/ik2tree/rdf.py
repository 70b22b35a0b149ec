"""RDF front end: string dictionaries and the eight triple patterns.

Subjects and objects share one dictionary, so the X and Z axes of the index
are the same id space and the matrix is square.  Predicates get their own
dictionary and become the partitioning dimension Y.  Terms are plain
non-whitespace tokens; there is no N-Triples or SPARQL parsing.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError, NotFoundError, ParseError
from .ik2tree import MODE_RDF, Any, Fixed, IK2Tree, TriplePattern
from .layout import LevelSchedule

DEFAULT_LAZY_THRESHOLD = 64

EAGER = "eager"
LAZY = "lazy"


class Dictionary:
    """Sorted unique terms; a term's id is its rank in that order."""

    def __init__(self, terms: Iterable[str] = ()):
        self.terms = sorted(set(terms))
        self._ids = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def __eq__(self, other) -> bool:
        return isinstance(other, Dictionary) and self.terms == other.terms

    __hash__ = None

    def encode(self, term: str) -> int:
        try:
            return self._ids[term]
        except KeyError:
            raise NotFoundError(f"unknown term {term!r}") from None

    def get(self, term: str) -> int | None:
        return self._ids.get(term)

    def decode(self, i: int) -> str:
        if not 0 <= i < len(self.terms):
            raise NotFoundError(f"id {i} outside [0, {len(self.terms)})")
        return self.terms[i]

    def encode_many(self, terms: Sequence[str]) -> np.ndarray:
        return np.fromiter((self._ids[t] for t in terms), dtype=np.int64, count=len(terms))

    def to_text(self) -> str:
        return "".join(t + "\n" for t in self.terms)

    @classmethod
    def from_text(cls, text: str) -> Dictionary:
        terms = text.split("\n")
        if terms and terms[-1] == "":
            terms.pop()
        if any(not t or t.split() != [t] for t in terms):
            raise FormatError("dictionary terms must be non-empty tokens")
        if any(a >= b for a, b in zip(terms, terms[1:])):
            raise FormatError("dictionary is not sorted and duplicate-free")
        d = cls.__new__(cls)
        d.terms = terms
        d._ids = {t: i for i, t in enumerate(terms)}
        return d


@dataclass
class RdfDataset:
    so_dict: Dictionary
    p_dict: Dictionary
    index: IK2Tree

    def __len__(self) -> int:
        return len(self.index)

    def triples(self) -> list[tuple[str, str, str]]:
        return _decode(self, self.index.triples())

    def save(self, path) -> None:
        path = Path(path)
        path.write_bytes(self.index.to_bytes(MODE_RDF))
        Path(f"{path}.so.dict").write_text(self.so_dict.to_text(), encoding="utf-8")
        Path(f"{path}.p.dict").write_text(self.p_dict.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> RdfDataset:
        path = Path(path)
        index, mode = IK2Tree.from_bytes(path.read_bytes())
        if mode != MODE_RDF:
            raise FormatError(f"index mode {mode} is not rdf")
        so = Dictionary.from_text(Path(f"{path}.so.dict").read_text(encoding="utf-8"))
        p = Dictionary.from_text(Path(f"{path}.p.dict").read_text(encoding="utf-8"))
        if len(so) != index.nx or len(so) != index.nz or len(p) != index.ysize:
            raise FormatError("dictionary sizes disagree with the index dimensions")
        return cls(so, p, index)


def parse_triples(lines: Iterable[str]) -> list[tuple[str, str, str]]:
    """Three whitespace-separated tokens per line; blank lines are skipped."""
    out = []
    for lineno, line in enumerate(lines, 1):
        toks = line.split()
        if not toks:
            continue
        if len(toks) != 3:
            raise ParseError(f"expected 3 terms, got {len(toks)}", lineno)
        out.append((toks[0], toks[1], toks[2]))
    return out


def ingest(lines: Iterable[str], schedule: LevelSchedule | None = None) -> RdfDataset:
    rows = sorted(set(parse_triples(lines)))
    so = Dictionary([r[0] for r in rows] + [r[2] for r in rows])
    p = Dictionary(r[1] for r in rows)
    n = len(so)
    if rows:
        s_ids = so.encode_many([r[0] for r in rows])
        p_ids = p.encode_many([r[1] for r in rows])
        o_ids = so.encode_many([r[2] for r in rows])
        ids = np.stack([s_ids, p_ids, o_ids], axis=1)
    else:
        ids = np.zeros((0, 3), dtype=np.int64)
    if schedule is None:
        schedule = LevelSchedule.hybrid(max(n, 1))
    index = IK2Tree.build(ids, n, len(p), n, schedule)
    return RdfDataset(so, p, index)


def read_triples(path, schedule: LevelSchedule | None = None) -> RdfDataset:
    with open(path, encoding="utf-8") as fh:
        return ingest(fh, schedule)


def _is_var(tok) -> bool:
    return tok is None or tok is Any or (isinstance(tok, str) and tok.startswith("?"))


def parse_pattern(pattern) -> tuple:
    """A pattern string ``"s ? o"`` or a 3-sequence; ``?`` and ``?name`` are variables."""
    if isinstance(pattern, str):
        toks = pattern.split()
    else:
        try:
            toks = list(pattern)
        except TypeError:
            raise InputError(f"malformed pattern {pattern!r}") from None
    if len(toks) != 3:
        raise InputError(f"a triple pattern needs 3 slots, got {len(toks)}")
    out = []
    for tok in toks:
        if _is_var(tok):
            out.append(None)
        elif isinstance(tok, str) and tok:
            out.append(tok)
        else:
            raise InputError(f"bad pattern slot {tok!r}")
    return tuple(out)


def pattern_class(pattern) -> str:
    """Like ``'(S,?,O)'``: bound slots by letter, variables as ``?``."""
    return "({},{},{})".format(*("?" if tok is None else letter
                                 for tok, letter in zip(parse_pattern(pattern), "SPO")))


def choose_strategy(pattern, ysize: int, threshold: int = DEFAULT_LAZY_THRESHOLD) -> str:
    """Lazy only when the predicate is unbounded, at least one of subject or
    object is unbounded too (many branches), and there are enough predicates."""
    if isinstance(pattern, TriplePattern):
        s_free, p_free, o_free = (pattern.x is Any, pattern.y is Any, pattern.z is Any)
    else:
        s, p, o = parse_pattern(pattern)
        s_free, p_free, o_free = s is None, p is None, o is None
    if p_free and (s_free or o_free) and ysize >= threshold:
        return LAZY
    return EAGER


def _decode(ds: RdfDataset, id_triples) -> list[tuple[str, str, str]]:
    """Decode ``(x, y, z)`` id triples and order them by ``(s, p, o)``."""
    rows = sorted((x, y, z) for x, y, z in id_triples)
    so, p = ds.so_dict.terms, ds.p_dict.terms
    return [(so[x], p[y], so[z]) for x, y, z in rows]


def encode_pattern(ds: RdfDataset, pattern) -> TriplePattern | None:
    """Id-level pattern, or ``None`` when a bound term is not in the dataset."""
    s, p, o = parse_pattern(pattern)
    ids = []
    for term, d in ((s, ds.so_dict), (p, ds.p_dict), (o, ds.so_dict)):
        if term is None:
            ids.append(Any)
            continue
        i = d.get(term)
        if i is None:
            return None
        ids.append(Fixed(i))
    return TriplePattern(*ids)


def evaluate(ds: RdfDataset, pattern, strategy: str = "auto",
             threshold: int = DEFAULT_LAZY_THRESHOLD) -> list[tuple[str, str, str]]:
    """Answer a triple pattern with string terms, sorted by ``(s, p, o)``.

    ``strategy`` is ``"auto"``, ``"eager"`` or ``"lazy"``.  A bound term that
    does not occur in the dataset gives an empty result.
    """
    if strategy not in ("auto", EAGER, LAZY):
        raise InputError(f"unknown strategy {strategy!r}")
    tp = encode_pattern(ds, pattern)
    if tp is None or len(ds.index) == 0:
        return []
    if strategy == "auto":
        strategy = choose_strategy(tp, ds.index.ysize, threshold)
    return _decode(ds, ds.index.query(tp, strategy))
