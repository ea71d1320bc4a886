"""Finite-dimensional algebras given by structure constants over Q(i).

An :class:`Algebra` is a structure-constant tensor c[i][j][k] (0-based
internally, 1-based in the file format), with the multiplication
e_i e_j = sum_k c[i][j][k] e_k.  Everything here is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .exactmath import (
    ZERO,
    ONE,
    ExactMatrix,
    GaussianRational,
    grat,
    kernel_basis_sparse,
    nullity_mod_p,
    rank_sparse,
    MODP_PRIMES,
)

__all__ = [
    "Algebra",
    "algebra_from_entries",
    "product",
    "IDENTITY_KINDS",
    "IdentityReport",
    "check_identity",
    "annihilator",
    "PowerFiltration",
    "power_filtration",
    "derivations",
    "derivation_dimension",
    "orbit_dimension",
    "change_basis",
    "check_isomorphism",
    "Fingerprint",
    "fingerprint",
    "direct_sum",
    "zero_algebra",
    "span_dimension",
]


@dataclass(frozen=True)
class Algebra:
    dim: int
    c: tuple  # c[i][j][k] : GaussianRational, all 0-based
    label: str = ""
    params: tuple = ()  # ((symbol, value), ...) when instantiated from a family

    def basis_product(self, i: int, j: int) -> tuple:
        return self.c[i][j]

    def entries(self):
        """Yield nonzero entries as 1-based (i, j, k, coeff)."""
        for i in range(self.dim):
            for j in range(self.dim):
                for k, v in enumerate(self.c[i][j]):
                    if v:
                        yield (i + 1, j + 1, k + 1, v)

    def __eq__(self, other):
        return isinstance(other, Algebra) and self.dim == other.dim and self.c == other.c

    def __hash__(self):
        return hash((self.dim, self.c))

    def __repr__(self):
        tag = self.label or "?"
        return f"Algebra({tag}, dim={self.dim})"


def algebra_from_entries(dim: int, entries: Iterable, label: str = "", params=()) -> Algebra:
    """Build an algebra from 1-based (i, j, k, coeff) entries; omitted = 0."""
    c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for i, j, k, v in entries:
        if not (1 <= i <= dim and 1 <= j <= dim and 1 <= k <= dim):
            raise ValueError(f"entry ({i},{j},{k}) out of range for dim {dim}")
        c[i - 1][j - 1][k - 1] = c[i - 1][j - 1][k - 1] + grat(v)
    frozen = tuple(tuple(tuple(row) for row in plane) for plane in c)
    return Algebra(dim, frozen, label=label, params=tuple(params))


def product(A: Algebra, x: Sequence, y: Sequence) -> tuple:
    """Product of two coordinate vectors, as a coordinate vector."""
    n = A.dim
    out = [ZERO] * n
    for i in range(n):
        xi = grat(x[i])
        if not xi:
            continue
        plane = A.c[i]
        for j in range(n):
            yj = grat(y[j])
            if not yj:
                continue
            f = xi * yj
            for k, ck in enumerate(plane[j]):
                if ck:
                    out[k] = out[k] + f * ck
    return tuple(out)


# ---------------------------------------------------------------------------
# multilinear identities
# ---------------------------------------------------------------------------

# a term is (coeff, bracketing, permutation); bracketing "LR" means
# (x_p0 x_p1) x_p2, "RL" means x_p0 (x_p1 x_p2), "P" is the binary x_p0 x_p1.
_ZINBIEL = [([(1, "LR", (0, 1, 2))], [(1, "RL", (0, 1, 2)), (1, "RL", (0, 2, 1))])]
IDENTITY_KINDS = {
    "zinbiel": _ZINBIEL,
    "symmetric-zinbiel": _ZINBIEL
    + [([(1, "RL", (0, 1, 2))], [(1, "LR", (0, 1, 2)), (1, "LR", (1, 0, 2))])],
    "two-step-nilpotent": [
        ([(1, "LR", (0, 1, 2))], []),
        ([(1, "RL", (0, 1, 2))], []),
    ],
    "skew-cyclic-left": [([(1, "LR", (0, 1, 2))], [(-1, "RL", (1, 2, 0))])],
    "skew-cyclic-right": [([(1, "LR", (0, 1, 2))], [(-1, "RL", (2, 1, 0))])],
    "associative": [([(1, "LR", (0, 1, 2))], [(1, "RL", (0, 1, 2))])],
    "commutative": [([(1, "P", (0, 1))], [(1, "P", (1, 0))])],
    "anticommutative": [([(1, "P", (0, 1))], [(-1, "P", (1, 0))])],
}


@dataclass(frozen=True)
class IdentityReport:
    kind: str
    ok: bool
    witness: Optional[tuple] = None  # 1-based basis indices of first violation
    lhs: Optional[tuple] = None
    rhs: Optional[tuple] = None

    def __bool__(self):
        return self.ok


def _eval_terms(A: Algebra, terms, idx) -> tuple:
    n = A.dim
    out = [ZERO] * n
    for coeff, kind, perm in terms:
        a = idx[perm[0]]
        b = idx[perm[1]]
        if kind == "P":
            vec = A.c[a][b]
        else:
            z = idx[perm[2]]
            if kind == "LR":
                inner = A.c[a][b]
                vec = [ZERO] * n
                for k, u in enumerate(inner):
                    if u:
                        for m, w in enumerate(A.c[k][z]):
                            if w:
                                vec[m] = vec[m] + u * w
            else:  # RL
                inner = A.c[b][z]
                vec = [ZERO] * n
                for k, u in enumerate(inner):
                    if u:
                        for m, w in enumerate(A.c[a][k]):
                            if w:
                                vec[m] = vec[m] + u * w
        for m in range(n):
            if vec[m]:
                out[m] = out[m] + coeff * vec[m]
    return tuple(out)


def check_identity(A: Algebra, kind: str) -> IdentityReport:
    """Check a multilinear identity on all basis tuples.

    Returns the first violating tuple (1-based) together with both sides.
    """
    if kind not in IDENTITY_KINDS:
        raise ValueError(f"unknown identity kind {kind!r}")
    n = A.dim
    for lhs_terms, rhs_terms in IDENTITY_KINDS[kind]:
        arity = 2 if lhs_terms[0][1] == "P" else 3
        tuples = (
            ((i, j) for i in range(n) for j in range(n))
            if arity == 2
            else ((i, j, k) for i in range(n) for j in range(n) for k in range(n))
        )
        for idx in tuples:
            lhs = _eval_terms(A, lhs_terms, idx)
            rhs = _eval_terms(A, rhs_terms, idx)
            if lhs != rhs:
                return IdentityReport(
                    kind,
                    False,
                    witness=tuple(i + 1 for i in idx),
                    lhs=lhs,
                    rhs=rhs,
                )
    return IdentityReport(kind, True)


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def annihilator(A: Algebra):
    """Basis of { x : x A = A x = 0 }, RREF-canonical row vectors."""
    n = A.dim
    rows = []
    for j in range(n):
        for k in range(n):
            row = {}
            for i in range(n):
                v = A.c[i][j][k]
                if v:
                    row[i] = v
            if row:
                rows.append(row)
            row = {}
            for m in range(n):
                v = A.c[j][m][k]
                if v:
                    row[m] = v
            if row:
                rows.append(row)
    return kernel_basis_sparse(rows, n)


def span_dimension(vectors) -> int:
    """Dimension of the span of coordinate row vectors."""
    vecs = [v for v in vectors if any(grat(x) for x in v)]
    if not vecs:
        return 0
    return ExactMatrix(vecs).rank()


def _span_basis(vectors, n):
    if not vectors:
        return []
    red, piv = ExactMatrix(vectors).rref()
    return [red.rows[r] for r in range(len(piv))]


@dataclass(frozen=True)
class PowerFiltration:
    dims: tuple  # dims of A^1, A^2, ... until 0 or stabilization
    nilpotent: bool
    index: Optional[int]  # smallest k with A^(k+1) = 0


def power_filtration(A: Algebra) -> PowerFiltration:
    """Dims of the power filtration A^k = sum_{p+q=k} A^p A^q."""
    n = A.dim
    basis = [tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)]
    powers = [basis]  # powers[k] is a basis of A^(k+1)
    dims = [n]
    while True:
        k = len(powers) + 1  # computing A^k
        prods = []
        for p in range(1, k):
            q = k - p
            for u in powers[p - 1]:
                for v in powers[q - 1]:
                    w = product(A, u, v)
                    if any(w):
                        prods.append(w)
        new_basis = _span_basis(prods, n)
        d = len(new_basis)
        if d == 0:
            dims.append(0)
            return PowerFiltration(tuple(dims), True, len(dims) - 1)
        if d == dims[-1]:
            dims.append(d)
            return PowerFiltration(tuple(dims), False, None)
        dims.append(d)
        powers.append(new_basis)


def _derivation_rows(A: Algebra):
    """Sparse rows of the Leibniz system in unknowns D[r][s] -> col r*n+s."""
    n = A.dim
    rows = []
    for i in range(n):
        for j in range(n):
            plane = A.c[i][j]
            for m in range(n):
                row = {}
                for k in range(n):
                    v = plane[k]
                    if v:
                        col = k * n + m
                        row[col] = row.get(col, ZERO) + v
                for p in range(n):
                    v = A.c[p][j][m]
                    if v:
                        col = i * n + p
                        row[col] = row.get(col, ZERO) - v
                for q in range(n):
                    v = A.c[i][q][m]
                    if v:
                        col = j * n + q
                        row[col] = row.get(col, ZERO) - v
                row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
    return rows


def derivations(A: Algebra):
    """Basis of the derivation algebra, as ExactMatrix objects.

    Convention: D(e_i) = sum_j D[i][j] e_j, i.e. rows are images.
    """
    n = A.dim
    vecs = kernel_basis_sparse(_derivation_rows(A), n * n)
    return [
        ExactMatrix([[v[r * n + s] for s in range(n)] for r in range(n)])
        for v in vecs
    ]


def derivation_dimension(A: Algebra, method: str = "exact") -> int:
    n = A.dim
    rows = _derivation_rows(A)
    if method == "modular":
        return _modular_nullity(rows, n * n)
    return n * n - rank_sparse(rows, n * n)


def _modular_nullity(rows, ncols):
    for p in MODP_PRIMES:
        try:
            return nullity_mod_p(rows, ncols, p)
        except ZeroDivisionError:
            continue
    return ncols - rank_sparse(rows, ncols)


def orbit_dimension(A: Algebra) -> int:
    """dim GL(V) - dim of the stabilizer = n^2 - dim Der(A)."""
    return A.dim * A.dim - derivation_dimension(A)


# ---------------------------------------------------------------------------
# basis changes
# ---------------------------------------------------------------------------


def change_basis(A: Algebra, P: ExactMatrix) -> Algebra:
    """Structure constants in the basis f_i = sum_j P[i][j] e_j."""
    n = A.dim
    if P.nrows != n or P.ncols != n:
        raise ValueError("basis matrix has wrong shape")
    pinv = P.inverse()  # raises on singular P
    new_c = []
    for i in range(n):
        plane = []
        for j in range(n):
            w = product(A, P.rows[i], P.rows[j])
            # express w in the f basis: solve row . P = w
            coords = [
                sum((w[m] * pinv.rows[m][k] for m in range(n)), ZERO)
                for k in range(n)
            ]
            plane.append(tuple(coords))
        new_c.append(tuple(plane))
    return Algebra(n, tuple(new_c), label=A.label, params=A.params)


def check_isomorphism(A: Algebra, B: Algebra, P: ExactMatrix) -> bool:
    """Does the invertible map f_i = sum_j P[i][j] e_j carry A onto B?"""
    if A.dim != B.dim:
        return False
    return change_basis(A, P).c == B.c


# ---------------------------------------------------------------------------
# fingerprints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    power_dims: tuple  # dims of A^2, A^3, A^4, A^5
    ann_dim: int
    der_dim: int
    z2_dim: int
    h2_dim: int

    def as_tuple(self):
        return (
            self.dim,
            self.power_dims,
            self.ann_dim,
            self.der_dim,
            self.z2_dim,
            self.h2_dim,
        )


def fingerprint(A: Algebra, method: str = "exact") -> Fingerprint:
    """Isomorphism-invariant summary of an algebra.

    method="modular" computes the two large ranks (derivations, cocycles)
    mod p; that path is Monte Carlo and meant for bulk screening only —
    callers compare against an exact recomputation before trusting a
    mismatch.
    """
    from .cohomology import _cocycle_rows, coboundary_dimension

    n = A.dim
    pf = power_filtration(A)
    pdims = []
    for k in range(2, 6):
        if k - 1 < len(pf.dims):
            pdims.append(pf.dims[k - 1])
        else:
            pdims.append(pf.dims[-1])
    ann = len(annihilator(A))
    der = derivation_dimension(A, method=method)
    crows = _cocycle_rows(A)
    if method == "modular":
        z2 = _modular_nullity(crows, n * n)
    else:
        z2 = n * n - rank_sparse(crows, n * n)
    b2 = coboundary_dimension(A)
    return Fingerprint(n, tuple(pdims), ann, der, z2, z2 - b2)


def direct_sum(A: Algebra, B: Algebra) -> Algebra:
    n, m = A.dim, B.dim
    dim = n + m
    c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c[i][j][k] = A.c[i][j][k]
    for i in range(m):
        for j in range(m):
            for k in range(m):
                c[n + i][n + j][n + k] = B.c[i][j][k]
    label = f"{A.label}+{B.label}" if A.label or B.label else ""
    return Algebra(dim, tuple(tuple(tuple(r) for r in p) for p in c), label=label)


def zero_algebra(dim: int, label: str = "") -> Algebra:
    return algebra_from_entries(dim, [], label=label or f"C^{dim}")
