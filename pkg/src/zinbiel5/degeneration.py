"""Degeneration certificates, necessary conditions, and R-set membership.

A certificate names a source family (optionally with a parametrized index
f(t)), a target algebra, and an n x n grid of basis expressions E_i(t).
Verification transports the source structure constants into that basis and
takes t -> 0: exact tier over Puiseux series first, arbitrary-precision
numerics with Richardson extrapolation when an expression leaves the exact
coefficient field.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import mpmath

from .algebra import (
    Algebra,
    annihilator,
    change_basis,
    derivation_dimension,
    power_filtration,
)
from .exactmath import ExactMatrix, GaussianRational, ONE, ZERO
from .series import (
    DEFAULT_TRUNCATION,
    NonExpandable,
    PuiseuxSeries,
    Radical,
    TExpression,
    collect_sqrt_keys,
    evaluate_numeric,
    evaluate_scalar,
    expand_series,
    expression_symbols,
    infer_ramification,
    parse_expression,
)

__all__ = [
    "FamilyTensor",
    "DegenerationCertificate",
    "DegenerationReport",
    "RSet",
    "NecessaryReport",
    "transported_constants",
    "verify_certificate",
    "necessary_conditions",
    "rset_membership",
    "NUMERIC_LADDER",
    "NUMERIC_TOLERANCE",
]

NUMERIC_LADDER = tuple(f"1e-{k}" for k in range(2, 10))
NUMERIC_TOLERANCE = "1e-10"
NUMERIC_PRECISION_BITS = 256


@dataclass(frozen=True)
class FamilyTensor:
    """Structure constants whose entries may involve parameter symbols."""

    dim: int
    entries: tuple  # ((i, j, k, TExpression), ...) 1-based
    symbols: tuple = ()
    label: str = ""

    @staticmethod
    def from_entries(dim: int, entries: Iterable, label: str = "") -> "FamilyTensor":
        parsed = []
        symbols = set()
        for i, j, k, expr in entries:
            node = parse_expression(expr)
            symbols |= expression_symbols(node)
            parsed.append((i, j, k, node))
        return FamilyTensor(dim, tuple(parsed), tuple(sorted(symbols)), label)

    @staticmethod
    def from_algebra(A: Algebra, label: str = "") -> "FamilyTensor":
        entries = tuple(
            (i, j, k, TExpressionConst(v)) for i, j, k, v in A.entries()
        )
        return FamilyTensor(A.dim, entries, (), label or A.label)

    def instantiate(self, params: Dict[str, GaussianRational], label: str = "") -> Algebra:
        from .algebra import algebra_from_entries

        vals = [
            (i, j, k, _eval_entry_scalar(e, params)) for i, j, k, e in self.entries
        ]
        tag = tuple(sorted((s, params[s]) for s in self.symbols)) if self.symbols else ()
        return algebra_from_entries(
            self.dim, vals, label=label or self.label, params=tag
        )


@dataclass(frozen=True)
class TExpressionConst(TExpression):
    """A pre-evaluated Gaussian-rational constant wrapped as an expression."""

    value: GaussianRational


def _eval_entry_scalar(e, params):
    if isinstance(e, TExpressionConst):
        return e.value
    return evaluate_scalar(e, params)


def _eval_entry_series(e, params, ram, trunc, branch):
    if isinstance(e, TExpressionConst):
        return PuiseuxSeries.scalar(e.value, ram)
    return expand_series(e, ram=ram, trunc=trunc, params=params, branch=branch)


def _eval_entry_numeric(e, tval, params, branch):
    if isinstance(e, TExpressionConst):
        v = e.value
        return mpmath.mpc(
            mpmath.mpf(v.re.numerator) / v.re.denominator,
            mpmath.mpf(v.im.numerator) / v.im.denominator,
        )
    return evaluate_numeric(e, tval, params=params, branch=branch)


@dataclass(frozen=True)
class DegenerationCertificate:
    source: object  # FamilyTensor or catalog id string
    target: object  # Algebra or catalog id string
    basis: tuple  # n x n grid of expression strings/nodes
    source_index: Optional[object] = None  # f(t) bound to the source parameter
    source_params: tuple = ()  # ((symbol, expr), ...) fixed scalar bindings
    target_params: tuple = ()  # ((symbol, expr), ...) for parametric targets
    target_pad: int = 0  # extra zero summands to match the source dimension
    samples: tuple = ()  # ({symbol: expr}, ...) bindings for free symbols
    label: str = ""


@dataclass(frozen=True)
class SampleResult:
    params: tuple
    verdict: str
    mode: str
    branch: tuple
    max_residual: str
    failures: tuple
    det_valuation: Optional[Fraction]

    def as_dict(self):
        return {
            "params": {k: str(v) for k, v in self.params},
            "verdict": self.verdict,
            "mode": self.mode,
            "branch": dict(self.branch),
            "max_residual": self.max_residual,
            "failures": list(self.failures),
            "det_valuation": None
            if self.det_valuation is None
            else str(self.det_valuation),
        }


@dataclass(frozen=True)
class DegenerationReport:
    verdict: str  # verified | failed | inconclusive
    mode: str  # exact | numeric | mixed
    samples: tuple
    label: str = ""

    def as_dict(self):
        return {
            "label": self.label,
            "verdict": self.verdict,
            "mode": self.mode,
            "samples": [s.as_dict() for s in self.samples],
        }

    def __bool__(self):
        return self.verdict == "verified"


# ---------------------------------------------------------------------------
# exact transport
# ---------------------------------------------------------------------------


def _series_matrix_inverse(rows: List[List[PuiseuxSeries]], trunc: int):
    """Gauss-Jordan inverse over the series field with min-valuation pivots.

    Returns (inverse, det) where det is the series determinant.
    """
    n = len(rows)
    work = [list(r) for r in rows]
    ident = [
        [
            PuiseuxSeries.scalar(ONE if i == j else ZERO)
            for j in range(n)
        ]
        for i in range(n)
    ]
    det = PuiseuxSeries.scalar(ONE)
    for col in range(n):
        pivot_row = None
        pivot_val = None
        for r in range(col, n):
            s = work[r][col]
            if s.known_zero:
                continue
            v = s.valuation()
            if pivot_val is None or v < pivot_val:
                pivot_row, pivot_val = r, v
        if pivot_row is None:
            exact_col = all(work[r][col].is_exact for r in range(col, n))
            if exact_col:
                raise ZeroDivisionError("basis matrix is singular")
            raise NonExpandable("pivot hidden below truncation in basis matrix")
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            ident[col], ident[pivot_row] = ident[pivot_row], ident[col]
            det = -det
        pivot = work[col][col]
        det = det * pivot
        inv = pivot.inverse(trunc)
        work[col] = [x * inv for x in work[col]]
        ident[col] = [x * inv for x in ident[col]]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f.known_zero:
                continue
            work[r] = [a - f * b for a, b in zip(work[r], work[col])]
            ident[r] = [a - f * b for a, b in zip(ident[r], ident[col])]
    return ident, det


def transported_constants(
    dim: int,
    entries: Sequence,
    basis: Sequence,
    *,
    params=None,
    trunc: int = DEFAULT_TRUNCATION,
    branch=None,
):
    """Structure constants of the source in the parametrized basis.

    entries are 1-based (i, j, k, expression); basis is a dim x dim grid of
    expressions; params binds parameter symbols to scalars or series.
    Returns (grid, det) with grid[i][j][k] a PuiseuxSeries and det the basis
    determinant series.
    """
    flat = [basis[i][j] for i in range(dim) for j in range(dim)]
    ram = infer_ramification(
        [e for e in flat if not isinstance(e, TExpressionConst)]
    )
    E = [
        [
            _eval_entry_series(basis[i][j], params, ram, trunc, branch)
            for j in range(dim)
        ]
        for i in range(dim)
    ]
    inv, det = _series_matrix_inverse(E, trunc)
    zero = PuiseuxSeries.zero()
    w = [[[zero for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
    for (a, b, k, expr) in entries:
        cval = _eval_entry_series(expr, params, ram, trunc, branch)
        if cval.known_zero and cval.is_exact:
            continue
        for i in range(dim):
            Eia = E[i][a - 1]
            if Eia.known_zero and Eia.is_exact:
                continue
            for j in range(dim):
                Ejb = E[j][b - 1]
                if Ejb.known_zero and Ejb.is_exact:
                    continue
                w[i][j][k - 1] = w[i][j][k - 1] + Eia * Ejb * cval
    grid = []
    for i in range(dim):
        plane = []
        for j in range(dim):
            coords = []
            for k in range(dim):
                acc = zero
                for m in range(dim):
                    wm = w[i][j][m]
                    if wm.known_zero and wm.is_exact:
                        continue
                    acc = acc + wm * inv[m][k]
                coords.append(acc)
            plane.append(tuple(coords))
        grid.append(tuple(plane))
    return tuple(grid), det


def _limit_status(s: PuiseuxSeries):
    """('value', Radical) if lim t->0 exists and is known, else ('diverges'|'unknown', None)."""
    const = Radical(())
    for k, c in s.coeffs:
        if k < 0:
            return ("diverges", None)
        if k == 0:
            const = c
    if s.prec is not None and s.prec <= 0:
        return ("unknown", None)
    return ("value", const)


# ---------------------------------------------------------------------------
# certificate verification
# ---------------------------------------------------------------------------


def _resolve_source(source) -> FamilyTensor:
    if isinstance(source, FamilyTensor):
        return source
    if isinstance(source, Algebra):
        return FamilyTensor.from_algebra(source)
    from .catalog import family_tensor

    return family_tensor(source)


def _resolve_target(target, params: Dict[str, GaussianRational], pad: int) -> Algebra:
    from .algebra import direct_sum, zero_algebra

    if isinstance(target, Algebra):
        out = target
    else:
        from .catalog import instantiate

        out = instantiate(target, params)
    if pad:
        out = direct_sum(out, zero_algebra(pad))
    return out


def _sample_bindings(cert: DegenerationCertificate):
    samples = cert.samples if cert.samples else ({},)
    out = []
    for raw in samples:
        bound = {}
        for name, expr in dict(raw).items():
            bound[name] = evaluate_scalar(expr)
        out.append(bound)
    return out


def _branch_assignments(keys):
    if not keys:
        yield {}
        return
    for signs in itertools.product((1, -1), repeat=len(keys)):
        yield dict(zip(keys, signs))


def _format_radical(r: Radical) -> str:
    return str(r)


def _exact_attempt(source, basis_grid, target, scalar_params, series_params, branch, trunc):
    """One exact verification pass; returns (status, failures, det_valuation).

    status: 'verified' | 'failed' | 'unknown'; failures lists (i,j,k,limit).
    """
    dim = source.dim
    grid, det = transported_constants(
        dim,
        source.entries,
        basis_grid,
        params=series_params,
        trunc=trunc,
        branch=branch,
    )
    if det.known_zero:
        if det.is_exact:
            raise ZeroDivisionError("basis matrix is singular")
        raise NonExpandable("determinant zero to truncation")
    det_val = det.valuation()
    failures = []
    unknown = False
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                status, limit = _limit_status(grid[i][j][k])
                if status == "unknown":
                    unknown = True
                    continue
                if status == "diverges":
                    failures.append((i + 1, j + 1, k + 1, "diverges"))
                    continue
                expect = Radical.from_gaussian(target.c[i][j][k])
                if limit != expect:
                    failures.append(
                        (i + 1, j + 1, k + 1, _format_radical(limit - expect))
                    )
    if failures:
        return "failed", tuple(failures), det_val
    if unknown:
        return "unknown", (), det_val
    return "verified", (), det_val


def _neville_at_zero(xs, ys):
    """Neville extrapolation of (xs, ys) to x = 0."""
    n = len(xs)
    tab = list(ys)
    for level in range(1, n):
        new = []
        for k in range(n - level):
            x0, x1 = xs[k], xs[k + level]
            val = (x1 * tab[k] - x0 * tab[k + 1]) / (x1 - x0)
            new.append(val)
        tab = new
    return tab[0]


def _numeric_attempt(source, basis_grid, target, scalar_params, index_expr, branch):
    """Numeric transport along the t-ladder with Richardson extrapolation."""
    dim = source.dim
    flat = [basis_grid[i][j] for i in range(dim) for j in range(dim)]
    try:
        ram = infer_ramification([e for e in flat if not isinstance(e, TExpressionConst)])
    except NonExpandable:
        ram = 12
    num_params = {
        name: mpmath.mpc(
            mpmath.mpf(v.re.numerator) / v.re.denominator,
            mpmath.mpf(v.im.numerator) / v.im.denominator,
        )
        for name, v in scalar_params.items()
    }
    tol = mpmath.mpf(NUMERIC_TOLERANCE)
    # a finer ramification spreads the ladder in s = t^(1/ram); deepen it so
    # the Neville product error stays well under the tolerance
    ladder = (
        NUMERIC_LADDER
        if ram <= 3
        else tuple(f"1e-{k}" for k in range(2, 14))
    )
    samples = []
    dets = []
    for tstr in ladder:
        tval = mpmath.mpf(tstr)
        params_t = dict(num_params)
        if index_expr is not None:
            params_t[source.symbols[0]] = evaluate_numeric(
                index_expr, tval, params=num_params, branch=branch
            )
        B = mpmath.matrix(dim, dim)
        for i in range(dim):
            for j in range(dim):
                B[i, j] = _eval_entry_numeric(basis_grid[i][j], tval, params_t, branch)
        det = mpmath.det(B)
        if abs(det) == 0:
            return "inconclusive", (), None, str(mpmath.mpf(1))
        dets.append((tval, det))
        Binv = B**-1
        w = [[[mpmath.mpc(0) for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
        for (a, b, k, expr) in source.entries:
            cval = _eval_entry_numeric(expr, tval, params_t, branch)
            if cval == 0:
                continue
            for i in range(dim):
                Eia = B[i, a - 1]
                if Eia == 0:
                    continue
                for j in range(dim):
                    Ejb = B[j, b - 1]
                    if Ejb == 0:
                        continue
                    w[i][j][k - 1] += Eia * Ejb * cval
        grid_t = [
            [
                [
                    sum(w[i][j][m] * Binv[m, k] for m in range(dim))
                    for k in range(dim)
                ]
                for j in range(dim)
            ]
            for i in range(dim)
        ]
        samples.append((tval, grid_t))
    xs = [mpmath.power(tval, mpmath.mpf(1) / ram) for tval, _ in samples]
    failures = []
    worst = mpmath.mpf(0)
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                ys = [g[i][j][k] for _, g in samples]
                limit = _neville_at_zero(xs, ys)
                tv = target.c[i][j][k]
                tnum = mpmath.mpc(
                    mpmath.mpf(tv.re.numerator) / tv.re.denominator,
                    mpmath.mpf(tv.im.numerator) / tv.im.denominator,
                )
                err = abs(limit - tnum) / max(1, abs(tnum))
                worst = max(worst, err)
                if err > tol:
                    failures.append((i + 1, j + 1, k + 1, mpmath.nstr(err, 5)))
    # slope of log|det| against log t estimates the determinant valuation
    (t1, d1), (t2, d2) = dets[-2], dets[-1]
    slope = (mpmath.log(abs(d1)) - mpmath.log(abs(d2))) / (
        mpmath.log(t1) - mpmath.log(t2)
    )
    det_val = Fraction(round(float(slope) * ram), ram)
    status = "verified" if not failures else "inconclusive"
    return status, tuple(failures), det_val, mpmath.nstr(worst, 5)


def verify_certificate(
    cert: DegenerationCertificate,
    mode: str = "auto",
    trunc: int = DEFAULT_TRUNCATION,
    precision: int = None,
) -> DegenerationReport:
    """Verify a degeneration certificate.

    mode: 'exact' (no fallback), 'numeric', or 'auto' (exact first, numeric
    when an expression cannot be expanded exactly).  Exact failures are
    definite; numeric mismatches are reported as inconclusive.  precision
    overrides the working precision (in bits) of the numeric tier.
    """
    if mode not in ("auto", "exact", "numeric"):
        raise ValueError(f"unknown mode {mode!r}")
    if precision is None:
        precision = NUMERIC_PRECISION_BITS
    source = _resolve_source(cert.source)
    dim = source.dim
    basis_grid = [
        [parse_expression(cert.basis[i][j]) for j in range(dim)] for i in range(dim)
    ]
    index_expr = None if cert.source_index is None else parse_expression(cert.source_index)
    if index_expr is not None and not source.symbols:
        raise ValueError("certificate has an index but the source is not parametric")
    branch_targets = [e for row in basis_grid for e in row if not isinstance(e, TExpressionConst)]
    if index_expr is not None:
        branch_targets.append(index_expr)
    keys = collect_sqrt_keys(branch_targets)

    results = []
    for sample in _sample_bindings(cert):
        scalar_params = dict(sample)
        for name, expr in cert.source_params:
            scalar_params[name] = evaluate_scalar(expr, scalar_params)
        target_params = {
            name: evaluate_scalar(expr, scalar_params)
            for name, expr in cert.target_params
        }
        target = _resolve_target(cert.target, target_params, cert.target_pad)
        if target.dim != dim:
            raise ValueError(
                f"target dimension {target.dim} != source dimension {dim}"
            )
        result = None
        if mode in ("auto", "exact"):
            result = _verify_exact_sample(
                source, basis_grid, target, scalar_params, index_expr, keys, trunc
            )
        if result is None and mode in ("auto", "numeric"):
            result = _verify_numeric_sample(
                source, basis_grid, target, scalar_params, index_expr, keys,
                precision,
            )
        if result is None:
            result = SampleResult(
                tuple(sorted((k, v) for k, v in sample.items())),
                "inconclusive",
                "exact",
                (),
                "n/a",
                (("non-expandable",),),
                None,
            )
        results.append(
            SampleResult(
                tuple(sorted((k, str(v)) for k, v in scalar_params.items())),
                result.verdict,
                result.mode,
                result.branch,
                result.max_residual,
                result.failures,
                result.det_valuation,
            )
        )
    verdicts = [r.verdict for r in results]
    if all(v == "verified" for v in verdicts):
        verdict = "verified"
    elif any(v == "failed" for v in verdicts):
        verdict = "failed"
    else:
        verdict = "inconclusive"
    modes = {r.mode for r in results}
    overall_mode = modes.pop() if len(modes) == 1 else "mixed"
    return DegenerationReport(verdict, overall_mode, tuple(results), label=cert.label)


@dataclass(frozen=True)
class _Attempt:
    verdict: str
    mode: str
    branch: tuple
    max_residual: str
    failures: tuple
    det_valuation: Optional[Fraction]


def _verify_exact_sample(source, basis_grid, target, scalar_params, index_expr, keys, trunc):
    """Try every branch exactly; None means fall back to numerics."""
    best_failed = None
    saw_unknown = False
    for branch in _branch_assignments(keys):
        series_params = {k: v for k, v in scalar_params.items()}
        for attempt_trunc in (trunc, 2 * trunc):
            try:
                params = dict(series_params)
                if index_expr is not None:
                    params[source.symbols[0]] = expand_series(
                        index_expr,
                        trunc=attempt_trunc,
                        params=series_params,
                        branch=branch,
                    )
                status, failures, det_val = _exact_attempt(
                    source, basis_grid, target, scalar_params, params, branch, attempt_trunc
                )
            except NonExpandable:
                return None
            except ZeroDivisionError:
                status, failures, det_val = "failed", (("basis", "singular"),), None
            if status == "verified":
                return _Attempt(
                    "verified",
                    "exact",
                    tuple(sorted(branch.items())),
                    "0",
                    (),
                    det_val,
                )
            if status == "failed":
                best_failed = _Attempt(
                    "failed",
                    "exact",
                    tuple(sorted(branch.items())),
                    "n/a",
                    failures,
                    det_val,
                )
                break  # doubling truncation will not undo an exact mismatch
            saw_unknown = True
    if saw_unknown:
        return _Attempt("inconclusive", "exact", (), "n/a", (), None)
    return best_failed


def _verify_numeric_sample(
    source, basis_grid, target, scalar_params, index_expr, keys,
    precision=NUMERIC_PRECISION_BITS,
):
    with mpmath.workprec(precision):
        best = None
        for branch in _branch_assignments(keys):
            status, failures, det_val, worst = _numeric_attempt(
                source, basis_grid, target, scalar_params, index_expr, branch
            )
            attempt = _Attempt(
                status,
                "numeric",
                tuple(sorted(branch.items())),
                worst,
                failures,
                det_val,
            )
            if status == "verified":
                return attempt
            if best is None:
                best = attempt
        return best


# ---------------------------------------------------------------------------
# necessary conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NecessaryReport:
    der_strictly_smaller: bool
    power_dims_dominate: bool
    ann_not_larger: bool
    details: tuple

    @property
    def ok(self) -> bool:
        return (
            self.der_strictly_smaller
            and self.power_dims_dominate
            and self.ann_not_larger
        )

    def __bool__(self):
        return self.ok


def necessary_conditions(A: Algebra, B: Algebra) -> NecessaryReport:
    """Standard necessary conditions for a proper degeneration A -> B."""
    if A.dim != B.dim:
        raise ValueError("degeneration requires equal dimensions")
    der_a = derivation_dimension(A)
    der_b = derivation_dimension(B)
    pa = power_filtration(A).dims
    pb = power_filtration(B).dims
    power_ok = True
    details = [("der", der_a, der_b)]
    for k in range(2, A.dim + 1):
        da = pa[k - 1] if k - 1 < len(pa) else pa[-1]
        db = pb[k - 1] if k - 1 < len(pb) else pb[-1]
        details.append((f"power{k}", da, db))
        if da < db:
            power_ok = False
    ann_a = len(annihilator(A))
    ann_b = len(annihilator(B))
    details.append(("ann", ann_a, ann_b))
    return NecessaryReport(der_a < der_b, power_ok, ann_a <= ann_b, tuple(details))


# ---------------------------------------------------------------------------
# R-sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RSet:
    """A Borel-stable constraint set on structure constants.

    containments: (p, q, r) meaning A_p A_q ⊆ A_r with A_m = span(e_m..e_n);
    equations: expressions over symbols c<i><j><k> that must vanish;
    relabel: permutation sigma (1-based) applied first, f_i = e_sigma(i).
    """

    containments: tuple = ()
    equations: tuple = ()
    relabel: Optional[tuple] = None
    label: str = ""


def _apply_relabel(S: Algebra, relabel) -> Algebra:
    n = S.dim
    rows = [[ONE if j == relabel[i] - 1 else ZERO for j in range(n)] for i in range(n)]
    return change_basis(S, ExactMatrix(rows))


def rset_membership(S: Algebra, R: RSet):
    """(member?, witness) — witness names the first violated constraint."""
    work = _apply_relabel(S, R.relabel) if R.relabel else S
    n = work.dim
    for (p, q, r) in R.containments:
        for i in range(p - 1, n):
            for j in range(q - 1, n):
                for k in range(r - 1):
                    if work.c[i][j][k]:
                        return False, (
                            f"A_{p}A_{q} ⊆ A_{r} fails: c[{i+1}][{j+1}]^{k+1} = "
                            f"{work.c[i][j][k]}"
                        )
    if R.equations:
        bindings = {
            f"c{i}{j}{k}": work.c[i - 1][j - 1][k - 1]
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            for k in range(1, n + 1)
        }
        for eq in R.equations:
            val = evaluate_scalar(eq, bindings)
            if val:
                return False, f"{eq} = {val} ≠ 0"
    return True, None
