"""MOOS validation, error-type partition, and the Z2^ell error algebra.

A control set is valid when every operator is unitary Hermitian, every pair
either commutes or anticommutes, and no operator is (up to a unimodular
phase) a product of the others.  Against such a set a Hamiltonian splits
into 2^ell parts, one per bit vector recording anticommutation with each
control operator; the parts multiply like the group Z2^ell.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping

from gmpy2 import mpc, mpfr

from . import mpcore
from .mpcore import CMatrix, identity, kron, matmul, tol

ErrorVector = tuple[int, ...]


class _Mixed:
    __slots__ = ()

    def __repr__(self):
        return "MIXED"


MIXED = _Mixed()


class MoosError(ValueError):
    """A control-operator set failed one of the MOOS invariants."""


# -- Pauli helpers ----------------------------------------------------------

_PAULI_ENTRIES = {
    "i": ((1, 0), (0, 1)),
    "x": ((0, 1), (1, 0)),
    "y": ((0, -1j), (1j, 0)),
    "z": ((1, 0), (0, -1)),
}

_PAULI_ORDER = "ixyz"


def pauli(symbol: str) -> CMatrix:
    """Single-qubit Pauli matrix; symbol in {i, x, y, z} (case-insensitive)."""
    try:
        rows = _PAULI_ENTRIES[symbol.lower()]
    except KeyError:
        raise ValueError(f"unknown Pauli symbol {symbol!r}") from None
    return CMatrix(rows, hermitian=True)


def pauli_string(symbols: str) -> CMatrix:
    """Tensor product of single-qubit Paulis, e.g. 'zx' -> sigma_z (x) sigma_x."""
    if not symbols:
        raise ValueError("empty Pauli string")
    out = pauli(symbols[0])
    for s in symbols[1:]:
        out = kron(out, pauli(s))
    return out


def pauli_label(op: CMatrix) -> str | None:
    """Name of the Pauli string proportional to op, or None.

    Phase-insensitive; used only to render generator tables readably.
    """
    import math

    n = op.rows
    nq = int(round(math.log2(n)))
    if 2 ** nq != n or op.cols != n:
        return None
    limit = tol(10) * max(op.maxabs(), mpfr(1))
    for symbols in product(_PAULI_ORDER, repeat=nq):
        cand = pauli_string("".join(symbols))
        # match up to the phase fixed at the largest candidate entry
        pos = None
        for i in range(n):
            for j in range(n):
                if abs(cand[i, j]) > mpfr("0.5"):
                    pos = (i, j)
                    break
            if pos:
                break
        ph = op[pos] / cand[pos]
        if abs(abs(ph) - 1) > mpfr("1e-6"):
            continue
        if (op - ph * cand).maxabs() <= limit:
            name = "".join(
                {"i": "I", "x": "X", "y": "Y", "z": "Z"}[s] for s in symbols
            )
            return name
    return None


def embed_system(op: CMatrix, dB: int) -> CMatrix:
    """System operator extended with a trivial bath factor (op (x) I_dB)."""
    if dB == 1:
        return op
    return kron(op, identity(dB))


# -- MOOS -------------------------------------------------------------------


@dataclass(frozen=True)
class Moos:
    """Validated mutually orthogonal operation set.

    operators are stored fully embedded (bath factor already attached when
    relevant); relations[i][j] is +1 when operators i and j commute and -1
    when they anticommute.
    """

    operators: tuple[CMatrix, ...]
    relations: tuple[tuple[int, ...], ...]

    @property
    def ell(self) -> int:
        return len(self.operators)

    @property
    def dim(self) -> int:
        return self.operators[0].rows


def validate_moos(ops: list[CMatrix]) -> Moos:
    """Check the MOOS invariants and fill the commutation table.

    Raises MoosError naming the operator (or pair) and the invariant that
    failed: square/equal dimensions, unitary-Hermitian, commute-or-
    anticommute, and independence (no operator is a phase times a product
    of the others).
    """
    if not ops:
        raise MoosError("empty control-operator list")
    dim = ops[0].rows
    for i, op in enumerate(ops):
        if op.rows != op.cols or op.rows != dim:
            raise MoosError(f"operator {i + 1} is not square of dimension {dim}")
    lim = tol(8) * max(max(op.maxabs() for op in ops), mpfr(1))
    ident = identity(dim)
    for i, op in enumerate(ops):
        if (op - op.dagger()).maxabs() > lim:
            raise MoosError(f"operator {i + 1} is not Hermitian")
        if (matmul(op, op) - ident).maxabs() > lim:
            raise MoosError(f"operator {i + 1} is not unitary (op^2 != I)")

    ell = len(ops)
    rel = [[1] * ell for _ in range(ell)]
    for i, j in combinations(range(ell), 2):
        ab = matmul(ops[i], ops[j])
        ba = matmul(ops[j], ops[i])
        if (ab - ba).maxabs() <= lim:
            rel[i][j] = rel[j][i] = 1
        elif (ab + ba).maxabs() <= lim:
            rel[i][j] = rel[j][i] = -1
        else:
            raise MoosError(
                f"operators {i + 1} and {j + 1} neither commute nor anticommute"
            )

    for i in range(ell):
        others = [ops[j] for j in range(ell) if j != i]
        for mask in range(2 ** len(others)):
            prod = ident
            for b, op in enumerate(others):
                if mask >> b & 1:
                    prod = matmul(prod, op)
            if _proportional(ops[i], prod, lim):
                raise MoosError(
                    f"operator {i + 1} is not independent: it equals a "
                    "phase times a product of the others"
                )

    return Moos(operators=tuple(ops), relations=tuple(tuple(r) for r in rel))


def _proportional(a: CMatrix, b: CMatrix, lim: mpfr) -> bool:
    # phase fixed from the largest entry of b
    pos, best = None, mpfr(0)
    for i in range(b.rows):
        for j in range(b.cols):
            v = abs(b[i, j])
            if v > best:
                best, pos = v, (i, j)
    if pos is None:
        return False
    ph = a[pos] / b[pos]
    if abs(abs(ph) - 1) > mpfr("0.5"):
        return False
    return (a - ph * b).maxabs() <= lim


# -- error-type partition ---------------------------------------------------


@dataclass(frozen=True)
class ErrorDecomposition:
    """The 2^ell half-sum projection parts of a Hamiltonian."""

    parts: Mapping[ErrorVector, CMatrix]

    def __getitem__(self, r: ErrorVector) -> CMatrix:
        return self.parts[tuple(r)]

    def total(self) -> CMatrix:
        it = iter(self.parts.values())
        out = next(it)
        for m in it:
            out = out + m
        return out


def partition(h: CMatrix, moos: Moos) -> ErrorDecomposition:
    """Split h into its 2^ell (anti)commutation parts against the MOOS.

    h and the MOOS operators must act on the same (already embedded) space;
    each part satisfies Omega_i part Omega_i = (-1)^{r_i} part.
    """
    if h.rows != moos.dim or h.cols != moos.dim:
        raise ValueError(
            f"Hamiltonian dimension {h.rows}x{h.cols} does not match the "
            f"MOOS dimension {moos.dim}"
        )
    half = mpfr(1) / 2
    pieces: dict[ErrorVector, CMatrix] = {(): h}
    for om in moos.operators:
        nxt: dict[ErrorVector, CMatrix] = {}
        for r, m in pieces.items():
            conj = matmul(om, matmul(m, om))
            nxt[r + (0,)] = half * (m + conj)
            nxt[r + (1,)] = half * (m - conj)
        pieces = nxt
    return ErrorDecomposition(parts=pieces)


def classify(op: CMatrix, moos: Moos):
    """The unique error vector of a pure-type operator, or MIXED.

    A partition part counts as zero when its largest entry is below
    10**(-digits/2) relative to the largest entry of op.
    """
    scale = op.maxabs()
    if scale == 0:
        return tuple([0] * moos.ell)
    cut = mpfr(10) ** (-(mpcore.get_precision() // 2)) * scale
    dec = partition(op, moos)
    found = None
    for r, part in dec.parts.items():
        if part.maxabs() > cut:
            if found is not None:
                return MIXED
            found = r
    return found if found is not None else MIXED


def xor(a: ErrorVector, b: ErrorVector) -> ErrorVector:
    """Componentwise addition mod 2."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return tuple((x + y) % 2 for x, y in zip(a, b))


def all_error_vectors(ell: int) -> list[ErrorVector]:
    """All 2^ell bit vectors, in binary counting order (r_1 fastest)."""
    out = []
    for mask in range(2 ** ell):
        out.append(tuple(mask >> i & 1 for i in range(ell)))
    return out


def unit_vector(ell: int, i: int) -> ErrorVector:
    """e_i: anticommutes with layer i only (1-based)."""
    return tuple(1 if k == i - 1 else 0 for k in range(ell))


def generator_table(
    moos: Moos, generators: Mapping[ErrorVector, CMatrix]
) -> dict[ErrorVector, CMatrix]:
    """All 2^ell error-type representatives from the ell unit-vector generators.

    generators maps each e_i to a pure operator classifying to e_i; entries
    of the result are products in ascending layer order and classify to
    their key (phases are ignored by classification).
    """
    ell = moos.ell
    gens = []
    for i in range(1, ell + 1):
        e = unit_vector(ell, i)
        try:
            g = generators[e]
        except KeyError:
            raise ValueError(f"missing generator for unit vector {e}") from None
        got = classify(g, moos)
        if got != e:
            raise ValueError(
                f"generator for {e} classifies to {got}, not {e}"
            )
        gens.append(g)

    table: dict[ErrorVector, CMatrix] = {}
    for r in all_error_vectors(ell):
        prod = identity(moos.dim)
        for i in range(ell):
            if r[i]:
                prod = matmul(prod, gens[i])
        got = classify(prod, moos)
        if got != r:
            raise ValueError(f"product for {r} classifies to {got}")
        table[r] = prod
    return table


# -- table rendering (the 4x4 layout used for 4-layer sets) ------------------

_ROW_BITS = ((0, 0), (1, 0), (0, 1), (1, 1))


def _cell_label(op: CMatrix) -> str:
    name = pauli_label(op)
    if name is None:
        return "?"
    return "(x)".join(name)


def generator_table_markdown(table: Mapping[ErrorVector, CMatrix]) -> str:
    """Markdown rendering; 4-layer tables use the 4x4 row/column layout."""
    ell = len(next(iter(table)))
    if ell == 4:
        header = ["r1r2 \\ r3r4"] + [f"({a},{b})" for a, b in _ROW_BITS]
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "---|" * len(header)]
        for r12 in _ROW_BITS:
            cells = [f"({r12[0]},{r12[1]})"]
            for r34 in _ROW_BITS:
                r = (r12[0], r12[1], r34[0], r34[1])
                cells.append(_cell_label(table[r]))
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    lines = ["| r | operator |", "|---|---|"]
    for r in sorted(table):
        lines.append(f"| {r} | {_cell_label(table[r])} |")
    return "\n".join(lines) + "\n"


def generator_table_csv(table: Mapping[ErrorVector, CMatrix]) -> str:
    lines = ["r,operator"]
    for r in sorted(table):
        lines.append(
            '"' + ",".join(str(b) for b in r) + '",' + _cell_label(table[r])
        )
    return "\n".join(lines) + "\n"
