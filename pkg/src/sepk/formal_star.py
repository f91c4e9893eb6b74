"""Symbolic calculus for short words in edges and edge-adjoints.

Expressions are integer combinations of normal words: a vertex v, an edge e,
an adjoint e*, or the length-2 words e f* (same source) and e* f (same
range).  Reduction applies exactly the defining relations of the graph
algebra: vertex words act as mutually orthogonal units, e* f collapses to
delta_{e,f} s(e) when e and f share a group, and a complete sum of e e* over
a group rewrites to the group's range vertex.  Nothing else is ever applied;
in particular e* f across two groups of the same vertex is kept as an
irreducible atom.

Words are capped at length 2: a product whose reduced form would be longer
raises UnsupportedWordError instead of guessing a reduction.

The module also builds the labeled generator matrices realizing the K_1
class of a kernel element (a row per unit of positive coefficient, a column
per arrow occurrence) and verifies, by formal matrix arithmetic, that they
multiply to the expected vertex diagonals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .graph_model import GroupKey, SeparatedGraph, group_label
from .ktheory import (
    incidence,
    negative_part,
    positive_part,
    require_kernel_element,
)
from .transform import PreconditionError, ensure_valid


class MalformedExpressionError(ValueError):
    """A word refers to unknown ids or composes edges at mismatched vertices."""


class UnsupportedWordError(ValueError):
    """A product left an irreducible word longer than the supported length."""


# Words are tagged tuples:
#   ("v", v)       vertex unit
#   ("e", e)       edge
#   ("a", e)       edge adjoint e*
#   ("ea", e, f)   e f*   (s(e) == s(f))
#   ("ae", e, f)   e* f   (r(e) == r(f), groups differ after normalization)
Word = tuple


def word_str(word: Word) -> str:
    tag = word[0]
    if tag == "v":
        return word[1]
    if tag == "e":
        return word[1]
    if tag == "a":
        return f"{word[1]}*"
    if tag == "ea":
        return f"{word[1]}{word[2]}*"
    if tag == "ae":
        return f"{word[1]}*{word[2]}"
    raise ValueError(f"unknown word tag {tag!r}")


@dataclass(frozen=True)
class FormalExpr:
    """An integer combination of words; zero coefficients are dropped."""

    terms: dict[Word, int]

    @classmethod
    def of(cls, items: Mapping[Word, int]) -> "FormalExpr":
        return cls({w: c for w, c in items.items() if c})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FormalExpr") -> "FormalExpr":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return FormalExpr.of(out)

    def __sub__(self, other: "FormalExpr") -> "FormalExpr":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) - c
        return FormalExpr.of(out)

    def __rmul__(self, scalar: int) -> "FormalExpr":
        return FormalExpr.of({w: scalar * c for w, c in self.terms.items()})

    def star(self) -> "FormalExpr":
        flipped = {}
        for w, c in self.terms.items():
            tag = w[0]
            if tag == "v":
                flipped[w] = c
            elif tag == "e":
                flipped[("a", w[1])] = c
            elif tag == "a":
                flipped[("e", w[1])] = c
            elif tag == "ea":
                flipped[("ea", w[2], w[1])] = c
            elif tag == "ae":
                flipped[("ae", w[2], w[1])] = c
        return FormalExpr(flipped)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda it: (it[0][0], it[0][1:]))
        parts = []
        for i, (w, c) in enumerate(items):
            sign = "-" if c < 0 else ("+" if i else "")
            mag = abs(c)
            body = word_str(w) if mag == 1 else f"{mag} {word_str(w)}"
            parts.append(f"{sign} {body}".strip() if i else f"{sign}{body}")
        return " ".join(parts)


ZERO = FormalExpr({})


class StarContext:
    """Reduction rules of a fixed separated graph.

    Per group, the diagonal word of the last member is the eliminated
    representative of the complete-sum relation, so normal forms are unique
    and normalization is a linear projection.
    """

    def __init__(self, g: SeparatedGraph):
        ensure_valid(g)
        self.graph = g
        self.group_of: dict[str, GroupKey] = {}
        for key in g.group_keys():
            for eid in g.group(key):
                self.group_of[eid] = key

    # constructors ----------------------------------------------------------

    def vertex(self, v: str) -> FormalExpr:
        if v not in set(self.graph.vertices):
            raise MalformedExpressionError(f"unknown vertex {v!r}")
        return FormalExpr({("v", v): 1})

    def edge(self, e: str) -> FormalExpr:
        self._known_edge(e)
        return FormalExpr({("e", e): 1})

    def adjoint(self, e: str) -> FormalExpr:
        self._known_edge(e)
        return FormalExpr({("a", e): 1})

    def _known_edge(self, e: str):
        if not self.graph.has_edge(e):
            raise MalformedExpressionError(f"unknown edge {e!r}")

    # word plumbing ----------------------------------------------------------

    def _dom(self, word: Word) -> str:
        tag = word[0]
        g = self.graph
        if tag == "v":
            return word[1]
        if tag == "e":
            return g.edge(word[1]).src
        if tag == "a":
            return g.edge(word[1]).dst
        if tag == "ea":
            return g.edge(word[2]).dst
        return g.edge(word[2]).src  # "ae"

    def _cod(self, word: Word) -> str:
        tag = word[0]
        g = self.graph
        if tag == "v":
            return word[1]
        if tag == "e":
            return g.edge(word[1]).dst
        if tag == "a":
            return g.edge(word[1]).src
        if tag == "ea":
            return g.edge(word[1]).dst
        return g.edge(word[1]).src  # "ae"

    def _check_word(self, word: Word):
        tag = word[0]
        g = self.graph
        if tag == "v":
            if word[1] not in set(g.vertices):
                raise MalformedExpressionError(f"unknown vertex {word[1]!r}")
            return
        for e in word[1:]:
            self._known_edge(e)
        if tag == "ea" and g.edge(word[1]).src != g.edge(word[2]).src:
            raise MalformedExpressionError(
                f"{word_str(word)}: sources differ, word is not composable"
            )
        if tag == "ae" and g.edge(word[1]).dst != g.edge(word[2]).dst:
            raise MalformedExpressionError(
                f"{word_str(word)}: ranges differ, word is not composable"
            )

    def _letters(self, word: Word) -> list[tuple[str, str]]:
        tag = word[0]
        if tag == "v":
            return []
        if tag == "e":
            return [("E", word[1])]
        if tag == "a":
            return [("A", word[1])]
        if tag == "ea":
            return [("E", word[1]), ("A", word[2])]
        return [("A", word[1]), ("E", word[2])]

    def _reduce_letters(self, letters: list[tuple[str, str]]):
        # Apply e* f = delta s(e) inside a group; cross-group pairs stand.
        i = 0
        while i + 1 < len(letters):
            (t1, e1), (t2, e2) = letters[i], letters[i + 1]
            if t1 == "A" and t2 == "E" and self.group_of[e1] == self.group_of[e2]:
                if e1 != e2:
                    return None  # distinct edges of one group annihilate
                del letters[i : i + 2]
                i = max(i - 1, 0)
            else:
                i += 1
        return letters

    def _word_of_letters(self, letters: list[tuple[str, str]], anchor: str) -> Word:
        if not letters:
            return ("v", anchor)
        if len(letters) == 1:
            tag, e = letters[0]
            return ("e", e) if tag == "E" else ("a", e)
        if len(letters) == 2:
            (t1, e1), (t2, e2) = letters
            if (t1, t2) == ("E", "A"):
                return ("ea", e1, e2)
            if (t1, t2) == ("A", "E"):
                return ("ae", e1, e2)
        raise UnsupportedWordError(
            "irreducible word of length > 2: "
            + " ".join(e + ("" if t == "E" else "*") for t, e in letters)
        )

    # public operations -------------------------------------------------------

    def normalize(self, expr: FormalExpr) -> FormalExpr:
        """Canonical form: SCK1 on each word, then complete-sum elimination.

        Idempotent and linear; raises MalformedExpressionError on words that
        do not compose.
        """
        acc: dict[Word, int] = {}

        def put(word: Word, coef: int):
            if coef:
                acc[word] = acc.get(word, 0) + coef

        for word, coef in expr.terms.items():
            self._check_word(word)
            if word[0] == "ae":
                e, f = word[1], word[2]
                if self.group_of[e] == self.group_of[f]:
                    if e == f:
                        put(("v", self.graph.edge(e).src), coef)
                    continue  # distinct edges of one group: zero
            put(word, coef)

        # Complete-sum elimination: the diagonal word of the last member of
        # each group rewrites to the range vertex minus the other diagonals.
        for word in list(acc):
            if word[0] != "ea" or word[1] != word[2]:
                continue
            e = word[1]
            key = self.group_of[e]
            members = self.graph.group(key)
            if e != members[-1]:
                continue
            coef = acc.pop(word)
            if not coef:
                continue
            put(("v", key[0]), coef)
            for other in members[:-1]:
                put(("ea", other, other), -coef)

        return FormalExpr.of(acc)

    def mul(self, a: FormalExpr, b: FormalExpr) -> FormalExpr:
        """Product in the algebra, normalized."""
        acc: dict[Word, int] = {}
        for w1, c1 in a.terms.items():
            for w2, c2 in b.terms.items():
                if self._dom(w1) != self._cod(w2):
                    continue
                letters = self._letters(w1) + self._letters(w2)
                reduced = self._reduce_letters(letters)
                if reduced is None:
                    continue
                word = self._word_of_letters(reduced, self._dom(w2))
                acc[word] = acc.get(word, 0) + c1 * c2
        return self.normalize(FormalExpr.of(acc))

    def equal(self, a: FormalExpr, b: FormalExpr) -> bool:
        return self.normalize(a).terms == self.normalize(b).terms


# formal matrices -------------------------------------------------------------


@dataclass(frozen=True)
class FormalMatrix:
    """A labeled matrix of formal expressions; absent entries are zero."""

    rows: tuple
    cols: tuple
    entries: dict[tuple[int, int], FormalExpr] = field(repr=False)

    def entry(self, i: int, j: int) -> FormalExpr:
        return self.entries.get((i, j), ZERO)

    def star(self) -> "FormalMatrix":
        return FormalMatrix(
            self.cols,
            self.rows,
            {(j, i): expr.star() for (i, j), expr in self.entries.items()},
        )

    def format_grid(self) -> str:
        cells = [
            [str(self.entry(i, j)) for j in range(len(self.cols))]
            for i in range(len(self.rows))
        ]
        col_heads = [_label_str(c) for c in self.cols]
        row_heads = [_label_str(r) for r in self.rows]
        widths = [
            max([len(col_heads[j])] + [len(cells[i][j]) for i in range(len(cells))])
            for j in range(len(self.cols))
        ]
        head_w = max([len(h) for h in row_heads] + [0])
        lines = [" " * head_w + "  " + "  ".join(h.rjust(w) for h, w in zip(col_heads, widths))]
        for rh, row in zip(row_heads, cells):
            lines.append(rh.rjust(head_w) + "  " + "  ".join(c.rjust(w) for c, w in zip(row, widths)))
        return "\n".join(lines)


def _label_str(label) -> str:
    if isinstance(label, tuple) and len(label) == 2 and isinstance(label[0], tuple):
        key, t = label
        return f"({group_label(key)},{t})"
    if isinstance(label, tuple) and len(label) == 4:
        key, t, w, s = label
        return f"({group_label(key)},{t},{w},{s})"
    return str(label)


def matmul(ctx: StarContext, a: FormalMatrix, b: FormalMatrix) -> FormalMatrix:
    if len(a.cols) != len(b.rows):
        raise ValueError("inner dimensions do not match")
    by_row: dict[int, list[tuple[int, FormalExpr]]] = {}
    for (k, j), expr in b.entries.items():
        by_row.setdefault(k, []).append((j, expr))
    acc: dict[tuple[int, int], FormalExpr] = {}
    for (i, k), left in a.entries.items():
        for j, right in by_row.get(k, ()):
            prod = ctx.mul(left, right)
            if prod.is_zero:
                continue
            pos = (i, j)
            acc[pos] = acc[pos] + prod if pos in acc else prod
    entries = {}
    for pos, expr in acc.items():
        norm = ctx.normalize(expr)
        if not norm.is_zero:
            entries[pos] = norm
    return FormalMatrix(a.rows, b.cols, entries)


def matrices_equal(ctx: StarContext, a: FormalMatrix, b: FormalMatrix):
    """None when equal, else (position, difference) of the first mismatch."""
    if len(a.rows) != len(b.rows) or len(a.cols) != len(b.cols):
        return ((-1, -1), ZERO)
    for pos in sorted(set(a.entries) | set(b.entries)):
        diff = ctx.normalize(a.entry(*pos) - b.entry(*pos))
        if not diff.is_zero:
            return (pos, diff)
    return None


# generator matrices -----------------------------------------------------------

RowLabel = tuple  # (group key, t)
ColLabel = tuple  # (group key, t, source vertex, s)


@dataclass(frozen=True)
class GeneratorMatrices:
    """The labeled matrices realizing the K_1 class of a kernel element.

    z collects the positive part (one row per unit of coefficient, one
    column per arrow occurrence; each column holds a single edge), t the
    negative part.  sigma1 and sigma2 are the row and column bijections,
    restricting per range vertex and per source vertex respectively;
    sigma_t is t pulled back along them, and u = z sigma(t)* is the partial
    unitary whose class generates the image of the element.
    """

    graph: SeparatedGraph
    element: dict[GroupKey, int]
    z: FormalMatrix
    t: FormalMatrix
    sigma1: dict[RowLabel, RowLabel]
    sigma2: dict[ColLabel, ColLabel]
    sigma_t: FormalMatrix
    u: FormalMatrix


def _side_labels(g: SeparatedGraph, part: Mapping[GroupKey, int]):
    """Row and column labels of one side, plus the edge of each column."""
    rows: list[RowLabel] = []
    for u in g.layer0:
        for i in range(len(g.groups_at(u))):
            for t in range(1, part.get((u, i), 0) + 1):
                rows.append(((u, i), t))
    cols: list[ColLabel] = []
    col_edge: dict[ColLabel, str] = {}
    for w in g.layer1:
        for u in g.layer0:
            for i in range(len(g.groups_at(u))):
                n = part.get((u, i), 0)
                if not n:
                    continue
                arrows = [eid for eid in g.group((u, i)) if g.edge(eid).src == w]
                for t in range(1, n + 1):
                    for s, eid in enumerate(arrows, start=1):
                        label = ((u, i), t, w, s)
                        cols.append(label)
                        col_edge[label] = eid
    return rows, cols, col_edge


def _side_matrix(ctx: StarContext, rows, cols, col_edge) -> FormalMatrix:
    rindex = {r: i for i, r in enumerate(rows)}
    entries = {}
    for j, col in enumerate(cols):
        key, t = col[0], col[1]
        entries[(rindex[(key, t)], j)] = ctx.edge(col_edge[col])
    return FormalMatrix(tuple(rows), tuple(cols), entries)


def _blocks(labels, block_of):
    out: dict = {}
    for lbl in labels:
        out.setdefault(block_of(lbl), []).append(lbl)
    return out


def _pair_blocks(left, right, block_of, what, rng=None):
    """Blockwise bijection from left to right labels, order-preserving or seeded."""
    lb = _blocks(left, block_of)
    rb = _blocks(right, block_of)
    if set(lb) != set(rb) or any(len(lb[k]) != len(rb[k]) for k in lb):
        raise PreconditionError(f"{what} blocks do not match; element is not balanced")
    out = {}
    for k, ls in lb.items():
        rs = list(rb[k])
        if rng is not None:
            rng.shuffle(rs)
        out.update(zip(ls, rs))
    return out


def assemble_generator_matrices(
    g: SeparatedGraph,
    x: Mapping[GroupKey, int],
    sigma1: dict[RowLabel, RowLabel],
    sigma2: dict[ColLabel, ColLabel],
) -> GeneratorMatrices:
    """Build the matrices for explicitly chosen bijections (testing hook)."""
    ctx = StarContext(g)
    pos = positive_part(x)
    neg = negative_part(x)
    rows1, cols1, col_edge1 = _side_labels(g, pos)
    rows2, cols2, col_edge2 = _side_labels(g, neg)
    z = _side_matrix(ctx, rows1, cols1, col_edge1)
    t = _side_matrix(ctx, rows2, cols2, col_edge2)

    r2index = {r: i for i, r in enumerate(rows2)}
    c2index = {c: i for i, c in enumerate(cols2)}
    t_entries_by_pos = {}
    for (i2, j2), expr in t.entries.items():
        t_entries_by_pos[(i2, j2)] = expr
    entries = {}
    r1list = list(rows1)
    c1list = list(cols1)
    for i1, r1 in enumerate(r1list):
        i2 = r2index[sigma1[r1]]
        for j1, c1 in enumerate(c1list):
            j2 = c2index[sigma2[c1]]
            expr = t_entries_by_pos.get((i2, j2))
            if expr is not None:
                entries[(i1, j1)] = expr
    sigma_t = FormalMatrix(tuple(rows1), tuple(cols1), entries)
    u = matmul(ctx, z, sigma_t.star())
    return GeneratorMatrices(g, dict(x), z, t, dict(sigma1), dict(sigma2), sigma_t, u)


def build_generator_matrices(
    g: SeparatedGraph, x: Mapping[GroupKey, int], seed: int | None = None
) -> GeneratorMatrices:
    """Generator matrices of a nonzero kernel element on a bipartite graph.

    The row bijection pairs the positive and negative units over each range
    vertex, the column bijection pairs arrow occurrences over each source
    vertex; by default both are order-preserving on the canonically sorted
    labels, and a seed requests a random (but still blockwise) choice, which
    must leave all verification identities intact.
    """
    ensure_valid(g)
    if g.bipartite is None:
        raise PreconditionError("generator matrices require a bipartite graph")
    require_kernel_element(incidence(g), x)
    if not any(x.values()):
        raise PreconditionError("the zero element has no generator")
    pos = positive_part(x)
    neg = negative_part(x)
    rows1, cols1, _ = _side_labels(g, pos)
    rows2, cols2, _ = _side_labels(g, neg)
    rng = random.Random(seed) if seed is not None else None
    sigma1 = _pair_blocks(rows1, rows2, lambda r: r[0][0], "row", rng)
    sigma2 = _pair_blocks(cols1, cols2, lambda c: c[2], "column", rng)
    return assemble_generator_matrices(g, x, sigma1, sigma2)


# verification -----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def __str__(self) -> str:
        return ("ok   " if self.ok else "FAIL ") + self.name + (
            f": {self.detail}" if self.detail else ""
        )


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]
    range_class: dict[str, int]
    source_class: dict[str, int]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.checks)


def _vertex_diag(ctx: StarContext, labels, vertex_of) -> FormalMatrix:
    entries = {
        (i, i): ctx.vertex(vertex_of(lbl)) for i, lbl in enumerate(labels)
    }
    return FormalMatrix(tuple(labels), tuple(labels), entries)


def _class_counts(labels, vertex_of) -> dict[str, int]:
    out: dict[str, int] = {}
    for lbl in labels:
        v = vertex_of(lbl)
        out[v] = out.get(v, 0) + 1
    return out


def verify_partial_unitary(gm: GeneratorMatrices) -> VerificationReport:
    """Check the defining identities of the generator matrices symbolically.

    All products are reduced with the graph relations only; each check
    reports the first offending position and its irreducible residue.
    """
    ctx = StarContext(gm.graph)
    z, t, st, u = gm.z, gm.t, gm.sigma_t, gm.u

    def range_of_row(r):
        return r[0][0]

    def source_of_col(c):
        return c[2]

    zz = matmul(ctx, z, z.star())
    zsz = matmul(ctx, z.star(), z)
    tt = matmul(ctx, t, t.star())
    tst = matmul(ctx, t.star(), t)
    ss = matmul(ctx, st, st.star())
    sst = matmul(ctx, st.star(), st)
    uu = matmul(ctx, u, u.star())
    usu = matmul(ctx, u.star(), u)

    checks = []

    def add_equality(name, a, b):
        mismatch = matrices_equal(ctx, a, b)
        if mismatch is None:
            checks.append(Check(name, True))
        else:
            (i, j), diff = mismatch
            pos = "shape" if i < 0 else f"({_label_str(a.rows[i])}, {_label_str(a.cols[j])})"
            checks.append(Check(name, False, f"at {pos}: residue {diff}"))

    add_equality("ZZ* is the range-vertex diagonal", zz, _vertex_diag(ctx, zz.rows, range_of_row))
    add_equality("Z*Z is the source-vertex diagonal", zsz, _vertex_diag(ctx, zsz.rows, source_of_col))
    add_equality("TT* is the range-vertex diagonal", tt, _vertex_diag(ctx, tt.rows, range_of_row))
    add_equality("T*T is the source-vertex diagonal", tst, _vertex_diag(ctx, tst.rows, source_of_col))
    add_equality("ZZ* = sig(T)sig(T)*", zz, ss)
    add_equality("Z*Z = sig(T)*sig(T)", zsz, sst)
    # u is square over the rows of z; both uu* and u*u must collapse to the
    # same range-vertex diagonal, witnessing a formal partial unitary.
    add_equality("UU* = ZZ*", uu, zz)
    add_equality("U*U = UU*", usu, uu)

    # Classwise agreement of the two sides (same multiset of diagonal
    # vertices per block), which is what the row/column balance asserts.
    range_class = _class_counts(z.rows, range_of_row)
    source_class = _class_counts(z.cols, source_of_col)
    t_range = _class_counts(t.rows, range_of_row)
    t_source = _class_counts(t.cols, source_of_col)
    checks.append(
        Check(
            "TT* class matches ZZ* class",
            t_range == range_class,
            "" if t_range == range_class else f"{t_range} != {range_class}",
        )
    )
    checks.append(
        Check(
            "T*T class matches Z*Z class",
            t_source == source_class,
            "" if t_source == source_class else f"{t_source} != {source_class}",
        )
    )

    return VerificationReport(tuple(checks), range_class, source_class)
