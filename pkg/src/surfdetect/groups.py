"""Finite presentations, permutation representations, Schreier coset
machinery and block-monomial induced representations.

Words are tuples of nonzero ints: ``k`` stands for generator ``k - 1`` and
``-k`` for its inverse.  Permutations act on the right (monodromy
convention): ``j^(xy) = (j^x)^y``.  Points are 0-based internally and
1-based in files and reports.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .building import Matrix
from .funcfield import ZERO, RatFunc, monomial

Word = tuple


class GroupError(ValueError):
    """Invalid presentation, permutation representation or subgroup word."""


# -- words -------------------------------------------------------------------


def reduce_word(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*ws: Word) -> Word:
    return reduce_word(x for w in ws for x in w)


def cyclic_reduce(w: Word) -> Word:
    w = reduce_word(w)
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return w


def format_word(w: Word, names: Sequence[str]) -> str:
    if not w:
        return "1"
    parts = []
    for x in w:
        name = names[abs(x) - 1]
        parts.append(name if x > 0 else f"{name}^-1")
    return " ".join(parts)


def parse_word(text: str, names: Sequence[str]) -> Word:
    index = {n: i + 1 for i, n in enumerate(names)}
    out: list[int] = []
    for tok in text.split():
        if tok == "1":
            continue
        m = re.fullmatch(r"([A-Za-z_][\w.]*)(?:\^(-?\d+))?", tok)
        if not m or m.group(1) not in index:
            raise GroupError(f"unknown token {tok!r} in word {text!r}")
        g = index[m.group(1)]
        e = int(m.group(2) or 1)
        out.extend([g if e > 0 else -g] * abs(e))
    return reduce_word(out)


# -- presentations -----------------------------------------------------------


@dataclass
class Presentation:
    names: list
    relators: list = field(default_factory=list)

    def __post_init__(self):
        self.relators = [cyclic_reduce(r) for r in self.relators]
        self.relators = [r for r in self.relators if r]

    @property
    def ngens(self) -> int:
        return len(self.names)

    def format(self) -> str:
        lines = ["gens: " + " ".join(self.names)]
        lines += ["rel: " + format_word(r, self.names) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Presentation":
        names = None
        rels = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, rest = line.partition(":")
            key = key.strip()
            if key == "gens" and names is None:
                names = rest.split()
                if len(set(names)) != len(names):
                    raise GroupError(f"line {lineno}: duplicate generator names")
            elif key == "rel" and names is not None:
                rels.append(parse_word(rest, names))
            else:
                raise GroupError(f"line {lineno}: unexpected {line!r}")
        if names is None:
            raise GroupError("missing 'gens:' line")
        return cls(names, rels)


def _integer_invariants(rows: list[list[int]], ncols: int) -> tuple[int, list[int]]:
    """(rank, nonunit invariant factors) of an integer matrix."""
    m = [list(r) for r in rows if any(r)]
    invariants = []
    k = 0
    nrows = len(m)
    while True:
        entries = [(abs(m[i][j]), i, j) for i in range(k, nrows) for j in range(k, ncols) if m[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        m[k], m[pi] = m[pi], m[k]
        for row in m:
            row[k], row[pj] = row[pj], row[k]
        while True:
            p = m[k][k]
            done = True
            for i in range(k + 1, nrows):
                q = m[i][k] // p
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[k])]
                if m[i][k]:
                    done = False
            for j in range(k + 1, ncols):
                q = m[k][j] // p
                if q:
                    for row in m:
                        row[j] -= q * row[k]
                if m[k][j]:
                    done = False
            if done:
                # divisibility of the remaining block
                bad = next(
                    ((i, j) for i in range(k + 1, nrows) for j in range(k + 1, ncols) if m[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                m[k] = [a + b for a, b in zip(m[k], m[bad[0]])]
                continue
            # move the smallest remaining entry of row/col k to the pivot
            cand = [(abs(m[i][k]), i, k) for i in range(k, nrows) if m[i][k]]
            cand += [(abs(m[k][j]), k, j) for j in range(k, ncols) if m[k][j]]
            _, ci, cj = min(cand)
            m[k], m[ci] = m[ci], m[k]
            for row in m:
                row[k], row[cj] = row[cj], row[k]
        invariants.append(abs(m[k][k]))
        k += 1
    return k, [d for d in invariants if d != 1]


def abelianization(p: Presentation) -> tuple[int, list[int]]:
    """(free rank, torsion coefficients) of the abelianized group."""
    rows = []
    for r in p.relators:
        row = [0] * p.ngens
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    rank, torsion = _integer_invariants(rows, p.ngens)
    return p.ngens - rank, sorted(torsion)


# -- permutation representations ---------------------------------------------


def perm_inverse(p: Sequence[int]) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def format_cycles(p: Sequence[int]) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            seen.add(i)
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = p[j]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


@dataclass
class PermRep:
    """Right action of a finitely presented group on {0..d-1}."""

    degree: int
    perms: list  # one tuple per generator: perms[g][j] = j^g

    def act(self, j: int, w: Word) -> int:
        for x in w:
            p = self.perms[abs(x) - 1]
            j = p[j] if x > 0 else self._inv[abs(x) - 1][j]
        return j

    @property
    def _inv(self) -> list:
        inv = getattr(self, "_inv_cache", None)
        if inv is None:
            inv = [perm_inverse(p) for p in self.perms]
            object.__setattr__(self, "_inv_cache", inv)
        return inv

    def word_perm(self, w: Word) -> tuple:
        return tuple(self.act(j, w) for j in range(self.degree))

    @classmethod
    def trivial(cls, ngens: int) -> "PermRep":
        return cls(1, [(0,)] * ngens)

    def validate(self, p: Presentation) -> None:
        if len(self.perms) != p.ngens:
            raise GroupError(f"{len(self.perms)} permutations for {p.ngens} generators")
        for g, perm in enumerate(self.perms):
            if sorted(perm) != list(range(self.degree)):
                raise GroupError(f"image of {p.names[g]} is not a permutation of 1..{self.degree}")
        for r in p.relators:
            if self.word_perm(r) != tuple(range(self.degree)):
                raise GroupError(f"relator {format_word(r, p.names)} is not killed")
        orbit = {0}
        queue = deque([0])
        while queue:
            j = queue.popleft()
            for perm, inv in zip(self.perms, self._inv):
                for k in (perm[j], inv[j]):
                    if k not in orbit:
                        orbit.add(k)
                        queue.append(k)
        if len(orbit) != self.degree:
            raise GroupError("action is not transitive")

    def format(self, names: Sequence[str]) -> str:
        lines = [f"degree {self.degree}"]
        for n, perm in zip(names, self.perms):
            lines.append(f"perm {n}: " + " ".join(str(j + 1) for j in perm))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, names: Sequence[str]) -> "PermRep":
        """``perm a: 2 1`` lines; unlisted generators act trivially."""
        index = {n: i for i, n in enumerate(names)}
        degree = None
        given: dict[int, tuple] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"degree\s+(\d+)", line)
            if m:
                degree = int(m.group(1))
                continue
            m = re.fullmatch(r"perm\s+(\S+)\s*:\s*([\d\s]+)", line)
            if not m:
                raise GroupError(f"line {lineno}: cannot parse {line!r}")
            if m.group(1) not in index:
                raise GroupError(f"line {lineno}: unknown generator {m.group(1)!r}")
            images = tuple(int(x) - 1 for x in m.group(2).split())
            given[index[m.group(1)]] = images
            if degree is None:
                degree = len(images)
        if degree is None:
            degree = 1
        for g, images in given.items():
            if len(images) != degree:
                raise GroupError(f"permutation for {names[g]} has length {len(images)}, expected {degree}")
        ident = tuple(range(degree))
        return cls(degree, [given.get(g, ident) for g in range(len(names))])


# -- Schreier machinery -------------------------------------------------------


@dataclass
class CosetStructure:
    """Breadth-first Schreier tree for the stabilizer of point 0.

    ``reps[i]`` is a word with ``0^reps[i] == i``; ``reps[0]`` is empty.
    Schreier generator ``(i, g)`` is ``reps[i] g reps[i^g]^-1``; it is stored
    at index ``i * ngens + g``.
    """

    presentation: Presentation
    rep: PermRep
    reps: list
    schreier_words: list

    @property
    def degree(self) -> int:
        return self.rep.degree

    def schreier_name(self, k: int) -> str:
        i, g = divmod(k, self.presentation.ngens)
        return f"s{i + 1}_{self.presentation.names[g]}"

    def schreier_index(self, name: str) -> int:
        m = re.fullmatch(r"s(\d+)_(.+)", name)
        if not m:
            raise GroupError(f"bad Schreier generator name {name!r}")
        i = int(m.group(1)) - 1
        names = self.presentation.names
        if not 0 <= i < self.degree or m.group(2) not in names:
            raise GroupError(f"unknown Schreier generator {name!r}")
        return i * len(names) + names.index(m.group(2))

    def nontrivial(self) -> list[int]:
        return [k for k, w in enumerate(self.schreier_words) if w]

    def subgroup_relators(self) -> list:
        """Rewritten conjugates reps[i] r reps[i]^-1 of every relator."""
        out = []
        for r in self.presentation.relators:
            for i in range(self.degree):
                w = concat(self.reps[i], r, inverse_word(self.reps[i]))
                out.append(rewrite_subgroup_word(w, self))
        return out


def schreier(p: Presentation, rep: PermRep) -> CosetStructure:
    rep.validate(p)
    d = rep.degree
    reps: list[Optional[Word]] = [None] * d
    reps[0] = ()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g in range(p.ngens):
            for sign in (1, -1):
                j = rep.act(i, (sign * (g + 1),))
                if reps[j] is None:
                    reps[j] = reps[i] + (sign * (g + 1),)
                    queue.append(j)
    words = []
    for i in range(d):
        for g in range(p.ngens):
            j = rep.act(i, (g + 1,))
            words.append(concat(reps[i], (g + 1,), inverse_word(reps[j])))
    return CosetStructure(p, rep, list(reps), words)


def rewrite_subgroup_word(w: Word, c: CosetStructure) -> Word:
    """Reidemeister-Schreier rewrite of a stabilizer word.

    Returns a word in Schreier generators (letter ``k + 1`` is generator k).
    """
    ngens = c.presentation.ngens
    cur = 0
    out = []
    for x in w:
        g = abs(x) - 1
        if x > 0:
            out.append(cur * ngens + g + 1)
            cur = c.rep.act(cur, (x,))
        else:
            cur = c.rep.act(cur, (x,))
            out.append(-(cur * ngens + g + 1))
    if cur != 0:
        raise GroupError(f"word does not stabilize coset 1 (ends at coset {cur + 1})")
    return reduce_word(x for x in out if c.schreier_words[abs(x) - 1])


def expand_schreier_word(sw: Word, c: CosetStructure) -> Word:
    """Inverse of the rewrite: the group word a Schreier word stands for."""
    parts = []
    for x in sw:
        w = c.schreier_words[abs(x) - 1]
        parts.append(w if x > 0 else inverse_word(w))
    return concat(*parts)


@dataclass
class PsiMap:
    """Homomorphism from the stabilizer subgroup to Z, by its values on the
    Schreier generators."""

    values: list

    def eval_schreier(self, sw: Word) -> int:
        return sum(self.values[abs(x) - 1] * (1 if x > 0 else -1) for x in sw)

    def validate(self, c: CosetStructure) -> list:
        """Return a list of failures (empty when consistent)."""
        fails = []
        for k, w in enumerate(c.schreier_words):
            if not w and self.values[k]:
                fails.append(("trivial_generator", c.schreier_name(k), self.values[k]))
        for i, sw in enumerate(c.subgroup_relators()):
            v = self.eval_schreier(sw)
            if v:
                r, coset = divmod(i, c.degree)
                fails.append(("relator", format_word(c.presentation.relators[r], c.presentation.names), coset + 1, v))
        return fails

    def is_surjective(self) -> bool:
        return math.gcd(*[abs(v) for v in self.values]) == 1 if any(self.values) else False

    def format(self, c: CosetStructure) -> str:
        lines = ["psi v1"]
        for k, v in enumerate(self.values):
            lines.append(f"{c.schreier_name(k)} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str, c: CosetStructure) -> "PsiMap":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or lines[0] != "psi v1":
            raise GroupError("psi file must start with 'psi v1'")
        values = [0] * len(c.schreier_words)
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise GroupError(f"cannot parse psi line {ln!r}")
            values[c.schreier_index(parts[0])] = int(parts[1])
        return cls(values)


def psi_eval(psi: PsiMap, w: Word, c: CosetStructure) -> int:
    return psi.eval_schreier(rewrite_subgroup_word(w, c))


# -- block-monomial representations ------------------------------------------


@dataclass(frozen=True)
class MonomialRep:
    """Block matrix with diag(t^e_i, t^-e_i) in block row sigma[i], column i."""

    sigma: tuple
    exps: tuple

    @property
    def degree(self) -> int:
        return len(self.sigma)

    @classmethod
    def identity(cls, d: int) -> "MonomialRep":
        return cls(tuple(range(d)), (0,) * d)

    def __mul__(self, other: "MonomialRep") -> "MonomialRep":
        sigma = tuple(self.sigma[other.sigma[i]] for i in range(self.degree))
        exps = tuple(other.exps[i] + self.exps[other.sigma[i]] for i in range(self.degree))
        return MonomialRep(sigma, exps)

    def inverse(self) -> "MonomialRep":
        inv = perm_inverse(self.sigma)
        return MonomialRep(inv, tuple(-self.exps[inv[j]] for j in range(self.degree)))

    def act_exponents(self, heights: Sequence[int]) -> tuple:
        """Image of the diagonal lattice with block exponents ``heights``."""
        out = [0] * self.degree
        for i, s in enumerate(self.sigma):
            out[s] = heights[i] + self.exps[i]
        return tuple(out)

    def __str__(self) -> str:
        return f"sigma={format_cycles(self.sigma)} e={list(self.exps)}"


def induced_rep(w: Word, c: CosetStructure, psi: PsiMap) -> MonomialRep:
    """Image of ``w`` under the representation induced from psi.

    With left coset representatives beta_i = reps[i]^-1 one has
    w beta_i = beta_sigma(i) delta_i, i.e. sigma(i) = i^(w^-1) and
    delta_i = reps[sigma(i)] w reps[i]^-1.
    """
    d = c.degree
    winv = inverse_word(w)
    sigma = tuple(c.rep.act(i, winv) for i in range(d))
    exps = []
    for i in range(d):
        delta = concat(c.reps[sigma[i]], w, inverse_word(c.reps[i]))
        exps.append(psi_eval(psi, delta, c))
    return MonomialRep(sigma, tuple(exps))


def delta_words(w: Word, c: CosetStructure) -> list:
    winv = inverse_word(w)
    out = []
    for i in range(c.degree):
        s = c.rep.act(i, winv)
        out.append(concat(c.reps[s], w, inverse_word(c.reps[i])))
    return out


def monomial_to_matrix(m: MonomialRep) -> Matrix:
    n = 2 * m.degree
    out = [[ZERO] * n for _ in range(n)]
    for i, s in enumerate(m.sigma):
        e = m.exps[i]
        out[2 * s][2 * i] = monomial(e)
        out[2 * s + 1][2 * i + 1] = monomial(-e)
    return out


def trace_poly(m: MonomialRep) -> dict:
    """Trace as a Laurent polynomial in z: {exponent: integer coefficient}."""
    out: dict[int, int] = {}
    for i, s in enumerate(m.sigma):
        if s == i:
            e = m.exps[i]
            out[e] = out.get(e, 0) + 1
            out[-e] = out.get(-e, 0) + 1
    return {k: v for k, v in sorted(out.items()) if v}


def matrix_trace(a: Matrix) -> RatFunc:
    acc = ZERO
    for i in range(len(a)):
        acc = acc + a[i][i]
    return acc


# -- Laurent polynomials in z -------------------------------------------------


def laurent_valuation(p: dict) -> float:
    return min(p) if p else math.inf


def is_symmetric(p: dict) -> bool:
    return all(p.get(-k, 0) == v for k, v in p.items())


def rewrite_in_w(p: dict) -> list:
    """Coefficients (ascending) of the polynomial q with q(z + 1/z) = p(z).

    Raises ValueError when p is not symmetric.
    """
    if not is_symmetric(p):
        raise ValueError("Laurent polynomial is not symmetric under z <-> 1/z")
    top = max((abs(k) for k in p), default=0)
    # chebyshev-like basis: c_k(w) = z^k + z^-k (c_0 = 2 halved)
    basis = [[1]]  # 1
    if top >= 1:
        basis.append([0, 1])  # z + 1/z = w
    for k in range(2, top + 1):
        prev, prev2 = basis[k - 1], basis[k - 2]
        nxt = [0] + prev
        for i, c in enumerate(prev2):
            nxt[i] -= c * (2 if k == 2 else 1)
        basis.append(nxt)
    # basis[k] represents z^k + z^-k for k >= 1, 1 for k = 0
    q = [0] * (top + 1)
    for k in range(top + 1):
        coeff = p.get(k, 0)
        if not coeff:
            continue
        for i, c in enumerate(basis[k]):
            q[i] += coeff * c
    while len(q) > 1 and q[-1] == 0:
        q.pop()
    return q


def expand_w(q: Sequence[int]) -> dict:
    """Laurent polynomial of q(z + 1/z)."""
    out: dict[int, int] = {0: 0}
    power = {0: 1}
    for i, c in enumerate(q):
        if i:
            nxt: dict[int, int] = {}
            for k, v in power.items():
                nxt[k + 1] = nxt.get(k + 1, 0) + v
                nxt[k - 1] = nxt.get(k - 1, 0) + v
            power = nxt
        if c:
            for k, v in power.items():
                out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in sorted(out.items()) if v}


def format_laurent(p: dict, var: str = "z") -> str:
    if not p:
        return "0"
    parts = []
    for k, v in sorted(p.items()):
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono:
            body = mono if abs(v) == 1 else f"{abs(v)}*{mono}"
        else:
            body = str(abs(v))
        if not parts:
            parts.append(f"-{body}" if v < 0 else body)
        else:
            parts.append(f" - {body}" if v < 0 else f" + {body}")
    return "".join(parts)


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")
