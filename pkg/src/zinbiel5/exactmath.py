"""Exact arithmetic over Q(i) and exact linear algebra.

Everything downstream (structure constants, cocycle solving, series
coefficients) runs on :class:`GaussianRational`, a pair of
``fractions.Fraction`` components.  Matrices are small and dense
(``ExactMatrix``), but the big homogeneous systems that show up when solving
for derivations/cocycles are handled by a sparse row-dict eliminator
(:func:`kernel_basis_sparse`) plus an optional Monte-Carlo mod-p rank
(:func:`nullity_mod_p`) for bulk property checks.  The mod-p path can only
*underestimate* rank, and callers always fall back to the exact eliminator on
any disagreement.
"""
from __future__ import annotations

from fractions import Fraction

__all__ = [
    "GaussianRational",
    "grat",
    "ZERO",
    "ONE",
    "I",
    "ExactMatrix",
    "kernel_basis_sparse",
    "rank_sparse",
    "nullity_mod_p",
    "MODP_PRIMES",
]


class GaussianRational:
    """A number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("GaussianRational is immutable")

    # -- construction ------------------------------------------------------

    @staticmethod
    def parse(text: str) -> "GaussianRational":
        """Parse strings like ``3``, ``-1/2``, ``i``, ``2*i``, ``1/2-3/4*i``.

        This is the little closed format used in the data files; general
        expressions (parameters, t) go through the expression parser instead.
        """
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        # split into signed terms at top level (format has no parentheses)
        terms = []
        start = 0
        for k in range(1, len(s)):
            if s[k] in "+-" and s[k - 1] not in "+-*/eE":
                terms.append(s[start:k])
                start = k
        terms.append(s[start:])
        re = Fraction(0)
        im = Fraction(0)
        for term in terms:
            if term in ("i", "+i"):
                im += 1
            elif term == "-i":
                im -= 1
            elif term.endswith("*i"):
                im += Fraction(term[:-2])
            elif term.endswith("i"):
                im += Fraction(term[:-1] or "1")
            else:
                re += Fraction(term)
        return GaussianRational(re, im)

    # -- predicates --------------------------------------------------------

    def is_rational(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = grat(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = grat(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return grat(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = grat(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = grat(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return grat(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers on GaussianRational")
        if k < 0:
            return ONE / (self ** (-k))
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        try:
            other = grat(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- rendering ---------------------------------------------------------

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.im == 1:
            itxt = "i"
        elif self.im == -1:
            itxt = "-i"
        else:
            itxt = f"{self.im}*i"
        if self.re == 0:
            return itxt
        sign = "+" if not itxt.startswith("-") else ""
        return f"{self.re}{sign}{itxt}"

    def __repr__(self):
        return f"GaussianRational({self})"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def grat(x) -> GaussianRational:
    """Coerce ints, Fractions and strings into GaussianRational."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, str):
        return GaussianRational.parse(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


# ---------------------------------------------------------------------------
# dense matrices
# ---------------------------------------------------------------------------


class ExactMatrix:
    """Dense matrix over Q(i); rows are tuples of GaussianRational."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = tuple(tuple(grat(x) for x in row) for row in rows)
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged rows")

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix(
            [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(m: int, n: int) -> "ExactMatrix":
        return ExactMatrix([[ZERO] * n for _ in range(m)])

    def __eq__(self, other):
        return isinstance(other, ExactMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return ExactMatrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ]
        )

    def __sub__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return ExactMatrix(
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ]
        )

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = list(zip(*other.rows))
            return ExactMatrix(
                [
                    [sum((a * b for a, b in zip(row, col)), ZERO) for col in cols]
                    for row in self.rows
                ]
            )
        c = grat(other)
        return ExactMatrix([[c * x for x in row] for row in self.rows])

    __rmul__ = __mul__

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self.rows)))

    def scale(self, c) -> "ExactMatrix":
        return self * grat(c)

    def rref(self):
        """Reduced row echelon form.  Returns (matrix, pivot column tuple)."""
        m = [list(row) for row in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            pr = next((k for k in range(r, self.nrows) if m[k][c]), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = ONE / m[r][c]
            m[r] = [x * inv for x in m[r]]
            for k in range(self.nrows):
                if k != r and m[k][c]:
                    f = m[k][c]
                    m[k] = [a - f * b for a, b in zip(m[k], m[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return ExactMatrix(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self):
        """RREF-canonical basis of the right kernel, as row vectors."""
        red, pivots = self.rref()
        pivset = set(pivots)
        free = [c for c in range(self.ncols) if c not in pivset]
        basis = []
        for f in free:
            v = [ZERO] * self.ncols
            v[f] = ONE
            for r, p in enumerate(pivots):
                v[p] = -red.rows[r][f]
            basis.append(tuple(v))
        return basis

    def solve(self, b):
        """One exact solution of A x = b, or None if inconsistent."""
        if len(b) != self.nrows:
            raise ValueError("rhs length mismatch")
        aug = ExactMatrix(
            [list(row) + [grat(x)] for row, x in zip(self.rows, b)]
        )
        red, pivots = aug.rref()
        if self.ncols in pivots:  # pivot in the augmented column
            return None
        x = [ZERO] * self.ncols
        for r, p in enumerate(pivots):
            x[p] = red.rows[r][self.ncols]
        return tuple(x)

    def det(self) -> GaussianRational:
        if self.nrows != self.ncols:
            raise ValueError("det of non-square matrix")
        m = [list(row) for row in self.rows]
        n = self.nrows
        out = ONE
        for c in range(n):
            pr = next((k for k in range(c, n) if m[k][c]), None)
            if pr is None:
                return ZERO
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                out = -out
            out = out * m[c][c]
            inv = ONE / m[c][c]
            for k in range(c + 1, n):
                if m[k][c]:
                    f = m[k][c] * inv
                    m[k] = [a - f * b for a, b in zip(m[k], m[c])]
        return out

    def inverse(self) -> "ExactMatrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        aug = ExactMatrix(
            [
                list(row) + [ONE if i == j else ZERO for j in range(n)]
                for i, row in enumerate(self.rows)
            ]
        )
        red, pivots = aug.rref()
        if pivots != tuple(range(n)):
            raise ValueError("matrix is singular")
        return ExactMatrix([row[n:] for row in red.rows])

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def __repr__(self):
        body = "; ".join(
            "[" + ", ".join(str(x) for x in row) + "]" for row in self.rows
        )
        return f"ExactMatrix({body})"


# ---------------------------------------------------------------------------
# sparse homogeneous systems
# ---------------------------------------------------------------------------


def _reduce_against(row: dict, pivots: dict) -> dict:
    """Reduce a sparse row (col -> coeff) against normalized pivot rows."""
    row = dict(row)
    # iterate until no pivot column remains in the row
    changed = True
    while changed:
        changed = False
        for c in sorted(row):
            if c in pivots:
                f = row[c]
                for cc, v in pivots[c].items():
                    nv = row.get(cc, ZERO) - f * v
                    if nv:
                        row[cc] = nv
                    else:
                        row.pop(cc, None)
                changed = True
                break
    return row


def _sparse_rref(rows, ncols):
    """Online RREF of sparse rows.  Returns dict pivot_col -> row dict."""
    pivots: dict[int, dict] = {}
    for row in rows:
        red = _reduce_against(row, pivots)
        if not red:
            continue
        lead = min(red)
        inv = ONE / red[lead]
        norm = {c: v * inv for c, v in red.items()}
        # eliminate the new pivot column from existing pivot rows
        for pc, prow in pivots.items():
            if lead in prow:
                f = prow[lead]
                for cc, v in norm.items():
                    nv = prow.get(cc, ZERO) - f * v
                    if nv:
                        prow[cc] = nv
                    else:
                        prow.pop(cc, None)
        pivots[lead] = norm
    return pivots


def rank_sparse(rows, ncols: int) -> int:
    """Rank of a sparse system given as iterables of {col: coeff} rows."""
    return len(_sparse_rref(rows, ncols))


def kernel_basis_sparse(rows, ncols: int):
    """Kernel basis of a sparse homogeneous system, RREF-canonical.

    ``rows`` is an iterable of {col: GaussianRational} dicts.  Returns a list
    of dense tuple vectors of length ncols, one per free column, ordered by
    free column index.
    """
    pivots = _sparse_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for p, prow in pivots.items():
            if f in prow:
                v[p] = -prow[f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# Monte-Carlo mod-p rank (fast path; exact fallback is the caller's job)
# ---------------------------------------------------------------------------

# NTT-style primes, all = 1 mod 4 so that i has a square root mod p.
MODP_PRIMES = (2013265921, 998244353, 469762049)


def _sqrt_minus_one(p: int) -> int:
    for a in range(2, 100):
        r = pow(a, (p - 1) // 4, p)
        if r * r % p == p - 1:
            return r
    raise ValueError(f"no sqrt(-1) mod {p}")  # pragma: no cover


_IMOD_CACHE: dict[int, int] = {}


def _grat_mod(x: GaussianRational, p: int) -> int:
    imod = _IMOD_CACHE.get(p)
    if imod is None:
        imod = _IMOD_CACHE[p] = _sqrt_minus_one(p)
    dre, dim = x.re.denominator % p, x.im.denominator % p
    if dre == 0 or dim == 0:
        raise ZeroDivisionError("denominator divisible by p")
    a = x.re.numerator % p * pow(dre, p - 2, p) % p
    b = x.im.numerator % p * pow(dim, p - 2, p) % p
    return (a + b * imod) % p


def nullity_mod_p(rows, ncols: int, p: int = MODP_PRIMES[0]) -> int:
    """Nullity of the system with entries reduced mod p.

    Specialization can only lower rank, so this is an *upper bound* on the
    true nullity; with the default 31-bit prime it is almost surely exact.
    Raises ZeroDivisionError if a denominator vanishes mod p (retry with
    another prime from MODP_PRIMES).
    """
    import numpy as np

    mat_rows = []
    for row in rows:
        if not row:
            continue
        dense = [0] * ncols
        for c, v in row.items():
            dense[c] = _grat_mod(v, p)
        mat_rows.append(dense)
    if not mat_rows:
        return ncols
    m = np.array(mat_rows, dtype=np.int64) % p
    nrows = m.shape[0]
    r = 0
    for c in range(ncols):
        piv = None
        for k in range(r, nrows):
            if m[k, c]:
                piv = k
                break
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[r + 1 :, c]
        if col.any():
            m[r + 1 :] = (m[r + 1 :] - np.outer(col, m[r])) % p
        r += 1
        if r == nrows:
            break
    return ncols - r
