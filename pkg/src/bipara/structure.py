"""Almost biparacomplex structures: validation, fixtures, generation, classification.

A structure is a pair (F, P) of anticommuting involutive (1,1)-tensor fields.
Validation checks every defining identity exactly and derives the almost
complex structure J = F o P, the four eigenprojectors, and (optionally) an
adapted frame {X_1..X_n, Y_1..Y_n} with F X_i = X_i, F Y_i = -Y_i,
P X_i = Y_i.

Three named fixtures ship as built-ins:

* ``flat_structure``       -- the integrable flat model (both backends),
* ``heisenberg_structure`` -- [X1, X2] = Y1: non-integrable, torsion present
  but with vanishing difference tensor,
* ``affine_structure``     -- [X1, X2] = X1: non-integrable with a nonzero
  difference tensor.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .geometry import (
    POLYNOMIAL_CHART,
    ContextMismatch,
    EndoField,
    FrameContext,
    GeometryError,
    PolyMap,
    VectorField,
    algebra_context,
    basis_fields,
    chart_context,
    pushforward_endo,
    pushforward_vector,
)
from .linalg import PolyMatrix, rat_inverse, rat_matmul, rat_rank
from .poly import MultiPoly

__all__ = [
    "BiparaStructure",
    "Projectors",
    "StructureError",
    "TRIPLE_KINDS",
    "adapted_basis",
    "affine_structure",
    "classify_triple",
    "delta_gl_algebra_membership",
    "delta_gl_membership",
    "flat_structure",
    "heisenberg_structure",
    "pushforward_structure",
    "random_structure",
    "random_unipotent_map",
    "structure_from_alpha",
]


class StructureError(ValueError):
    """Validation failure; ``failures`` lists each broken identity separately."""

    def __init__(self, failures: list[dict]):
        self.failures = failures
        super().__init__("; ".join(f["name"] for f in failures))


@dataclass(frozen=True)
class Projectors:
    """Eigenprojectors (Id +- F)/2 and (Id +- P)/2 of a validated structure."""

    f_plus: EndoField
    f_minus: EndoField
    p_plus: EndoField
    p_minus: EndoField


def _first_nonzero_entry(matrix: PolyMatrix):
    for i in range(matrix.rows):
        for j in range(matrix.cols):
            entry = matrix.get(i, j)
            if not entry.is_zero:
                return {"row": i, "col": j, "value": str(entry)}
    return None


class BiparaStructure:
    """A validated almost biparacomplex structure (F, P) with derived data."""

    __slots__ = ("context", "F", "P", "J", "projectors", "adapted_frame", "__dict__")

    def __init__(self, context, F, P, J, projectors, adapted_frame):
        self.context = context
        self.F = F
        self.P = P
        self.J = J
        self.projectors = projectors
        self.adapted_frame = adapted_frame

    @property
    def dim(self) -> int:
        return self.context.dim

    @property
    def n(self) -> int:
        return self.context.dim // 2

    @cached_property
    def basis(self) -> tuple[VectorField, ...]:
        return basis_fields(self.context)

    @classmethod
    def validate(
        cls,
        F: EndoField,
        P: EndoField,
        adapted_frame: PolyMatrix | None = None,
    ) -> "BiparaStructure":
        """Check every defining identity exactly; collect all failures."""
        if F.context != P.context:
            raise ContextMismatch("F and P live in different frame contexts")
        ctx = F.context
        failures: list[dict] = []
        if ctx.dim % 2 != 0:
            failures.append({"name": "dimension is odd", "witness": {"dim": ctx.dim}})
        identity = PolyMatrix.identity(ctx.dim, ctx.variables)

        def check(name: str, matrix: PolyMatrix):
            if not matrix.is_zero:
                failures.append({"name": name, "witness": _first_nonzero_entry(matrix)})

        check("F^2 != Id", (F.matrix @ F.matrix) - identity)
        check("P^2 != Id", (P.matrix @ P.matrix) - identity)
        check("F∘P + P∘F != 0", (F.matrix @ P.matrix) + (P.matrix @ F.matrix))
        if not F.matrix.trace().is_zero:
            failures.append({"name": "trace(F) != 0", "witness": {"value": str(F.matrix.trace())}})
        if not P.matrix.trace().is_zero:
            failures.append({"name": "trace(P) != 0", "witness": {"value": str(P.matrix.trace())}})

        J = F.compose(P)
        if not failures:
            # J^2 = -Id follows from the identities above; a failure here
            # would mean the checks themselves are broken.
            assert ((J.matrix @ J.matrix) + identity).is_zero

        frame_endo = None
        if adapted_frame is not None:
            frame_endo = EndoField(ctx, adapted_frame)
            n = ctx.dim // 2
            for i in range(n):
                x_i = frame_endo.column_field(i)
                y_i = frame_endo.column_field(n + i)
                if F.apply(x_i) != x_i:
                    failures.append({"name": f"F*X_{i + 1} != X_{i + 1}", "witness": None})
                if F.apply(y_i) != y_i.scale(-1):
                    failures.append({"name": f"F*Y_{i + 1} != -Y_{i + 1}", "witness": None})
                if P.apply(x_i) != y_i:
                    failures.append({"name": f"P*X_{i + 1} != Y_{i + 1}", "witness": None})
                if P.apply(y_i) != x_i:
                    failures.append({"name": f"P*Y_{i + 1} != X_{i + 1}", "witness": None})

        if failures:
            raise StructureError(failures)

        half = Fraction(1, 2)
        eye = EndoField.identity(ctx)
        projectors = Projectors(
            f_plus=(eye + F).scale(half),
            f_minus=(eye - F).scale(half),
            p_plus=(eye + P).scale(half),
            p_minus=(eye - P).scale(half),
        )
        return cls(ctx, F, P, J, projectors, adapted_frame)

    # -- adapted frame access --------------------------------------------------

    def frame_field(self, index: int) -> VectorField:
        if self.adapted_frame is None:
            raise StructureError([{"name": "missing adapted frame", "witness": None}])
        return VectorField(self.context, self.adapted_frame.column(index))

    def x_field(self, i: int) -> VectorField:
        return self.frame_field(i)

    def y_field(self, i: int) -> VectorField:
        return self.frame_field(self.n + i)


# ---------------------------------------------------------------------------
# Built-in fixtures
# ---------------------------------------------------------------------------


def _flat_chart_matrices(n: int, variables):
    dim = 2 * n
    zero = MultiPoly.zero(variables)
    one = MultiPoly.const(variables, 1)
    f_rows = [[zero] * dim for _ in range(dim)]
    p_rows = [[zero] * dim for _ in range(dim)]
    for i in range(n):
        f_rows[n + i][i] = one          # F(dx_i) = dy_i
        f_rows[i][n + i] = one          # F(dy_i) = dx_i
        p_rows[i][i] = one              # P(dx_i) = dx_i
        p_rows[n + i][n + i] = -one     # P(dy_i) = -dy_i
    return PolyMatrix.from_rows(f_rows), PolyMatrix.from_rows(p_rows)


def flat_structure(n: int, backend: str = POLYNOMIAL_CHART) -> BiparaStructure:
    """The integrable flat model on R^{2n}.

    Chart backend: F swaps the x/y coordinate blocks and P is diag(I, -I);
    the adapted frame is X_i = dx_i + dy_i, Y_i = dx_i - dy_i.  Constant
    backend: the abelian Lie algebra in adapted presentation (F = diag(I, -I),
    P the block swap, frame = standard basis).
    """
    dim = 2 * n
    if backend == POLYNOMIAL_CHART:
        variables = tuple(f"x{i + 1}" for i in range(n)) + tuple(f"y{i + 1}" for i in range(n))
        ctx = chart_context(variables)
        f_mat, p_mat = _flat_chart_matrices(n, variables)
        zero = MultiPoly.zero(variables)
        one = MultiPoly.const(variables, 1)
        frame_rows = [[zero] * dim for _ in range(dim)]
        for i in range(n):
            frame_rows[i][i] = one
            frame_rows[n + i][i] = one       # X_i = dx_i + dy_i
            frame_rows[i][n + i] = one
            frame_rows[n + i][n + i] = -one  # Y_i = dx_i - dy_i
        frame = PolyMatrix.from_rows(frame_rows)
        return BiparaStructure.validate(
            EndoField(ctx, f_mat), EndoField(ctx, p_mat), adapted_frame=frame
        )
    ctx = algebra_context(dim, {})
    return BiparaStructure.validate(*_adapted_constant_endos(ctx), adapted_frame=PolyMatrix.identity(dim, ()))


def _adapted_constant_endos(ctx: FrameContext) -> tuple[EndoField, EndoField]:
    """F = diag(I, -I) and P = block swap w.r.t. an adapted constant frame."""
    dim = ctx.dim
    n = dim // 2
    zero = MultiPoly.zero(())
    one = MultiPoly.const((), 1)
    f_rows = [[zero] * dim for _ in range(dim)]
    p_rows = [[zero] * dim for _ in range(dim)]
    for i in range(n):
        f_rows[i][i] = one
        f_rows[n + i][n + i] = -one
        p_rows[n + i][i] = one
        p_rows[i][n + i] = one
    return EndoField(ctx, PolyMatrix.from_rows(f_rows)), EndoField(ctx, PolyMatrix.from_rows(p_rows))


def heisenberg_structure() -> BiparaStructure:
    """Constant-frame fixture with [X1, X2] = Y1 (dim 4, adapted frame)."""
    ctx = algebra_context(4, {(0, 1): (0, 0, 1, 0)})
    f, p = _adapted_constant_endos(ctx)
    return BiparaStructure.validate(f, p, adapted_frame=PolyMatrix.identity(4, ()))


def affine_structure() -> BiparaStructure:
    """Constant-frame fixture with [X1, X2] = X1 (dim 4, adapted frame)."""
    ctx = algebra_context(4, {(0, 1): (1, 0, 0, 0)})
    f, p = _adapted_constant_endos(ctx)
    return BiparaStructure.validate(f, p, adapted_frame=PolyMatrix.identity(4, ()))


# ---------------------------------------------------------------------------
# Derived bases and the alpha-structure correspondence
# ---------------------------------------------------------------------------


def adapted_basis(
    s: BiparaStructure, xs: Sequence[VectorField]
) -> tuple[list[VectorField], list[VectorField], list[VectorField]]:
    """From a basis {X_i} of T_F^+, return bases of T_F^-, T_P^+ and T_P^-.

    Outputs {P X_i}, {X_i + P X_i} and {X_i - P X_i}.  Inputs must satisfy
    F X_i = X_i exactly and be independent at the evaluation point (the
    origin on the chart backend).
    """
    n = s.n
    if len(xs) != n:
        raise StructureError([{"name": f"expected {n} fields, got {len(xs)}", "witness": None}])
    for k, x in enumerate(xs):
        if x.context != s.context:
            raise ContextMismatch("input field lives in a different frame context")
        if s.F.apply(x) != x:
            raise StructureError(
                [{"name": f"input {k + 1} is not in T_F^+ (F*X != X)", "witness": None}]
            )
    if s.context.backend == POLYNOMIAL_CHART:
        origin = [Fraction(0)] * s.dim
        columns = [[c.evaluate(origin) for c in x.components] for x in xs]
    else:
        columns = [[c.constant_value() for c in x.components] for x in xs]
    if rat_rank([list(col) for col in zip(*columns)]) != n:
        raise StructureError(
            [{"name": "inputs are dependent at the evaluation point", "witness": None}]
        )
    p_images = [s.P.apply(x) for x in xs]
    sums = [x + px for x, px in zip(xs, p_images)]
    diffs = [x - px for x, px in zip(xs, p_images)]
    return p_images, sums, diffs


def structure_from_alpha(
    v1: Sequence[VectorField], v2: Sequence[VectorField], v3: Sequence[VectorField]
) -> BiparaStructure:
    """The unique structure with T_F^+ = span(v1), T_F^- = span(v2), T_P^+ = span(v3).

    Constant-coefficient inputs only: the graph-map solve is plain linear
    algebra.  The identity T_P^- = F(span v3) is a consequence and is
    re-verified, not assumed.
    """
    ctx = v1[0].context
    for field in list(v1) + list(v2) + list(v3):
        if field.context != ctx:
            raise ContextMismatch("alpha-structure inputs live in different contexts")
        for c in field.components:
            if not c.is_constant:
                raise StructureError(
                    [{"name": "alpha-structure inputs must be constant fields", "witness": None}]
                )
    dim = ctx.dim
    n = dim // 2
    if not (len(v1) == len(v2) == len(v3) == n):
        raise StructureError([{"name": "each distribution needs n spanning fields", "witness": None}])

    def columns(fields):
        return [[c.constant_value() for c in f.components] for f in fields]

    c1, c2, c3 = columns(v1), columns(v2), columns(v3)

    def stack(*col_groups):
        cols = [col for group in col_groups for col in group]
        return [[cols[j][i] for j in range(len(cols))] for i in range(dim)]

    for name, pair in (("V1+V2", (c1, c2)), ("V1+V3", (c1, c3)), ("V2+V3", (c2, c3))):
        if rat_rank(stack(*pair)) != dim:
            raise StructureError([{"name": f"transversality failure: {name} != TM", "witness": None}])

    b12 = stack(c1, c2)
    b12_inv = rat_inverse(b12)
    sign = [[Fraction(1 if i == j and i < n else (-1 if i == j else 0)) for j in range(dim)] for i in range(dim)]
    f_rows = rat_matmul(rat_matmul(b12, sign), b12_inv)

    # Decompose each V3 spanning vector as a_k + b_k with a_k in V1, b_k in V2;
    # P swaps the graph: P a_k = b_k, P b_k = a_k.
    a_cols, b_cols = [], []
    for w in c3:
        coeffs = rat_matmul(b12_inv, [[v] for v in w])
        a = [sum((c1[t][i] * coeffs[t][0] for t in range(n)), Fraction(0)) for i in range(dim)]
        b = [sum((c2[t][i] * coeffs[n + t][0] for t in range(n)), Fraction(0)) for i in range(dim)]
        a_cols.append(a)
        b_cols.append(b)
    ab = stack(a_cols, b_cols)
    if rat_rank(ab) != dim:
        raise StructureError([{"name": "transversality failure: degenerate graph map", "witness": None}])
    ba = stack(b_cols, a_cols)
    p_rows = rat_matmul(ba, rat_inverse(ab))

    f_endo = EndoField(ctx, PolyMatrix.from_rational_rows(f_rows, ctx.variables))
    p_endo = EndoField(ctx, PolyMatrix.from_rational_rows(p_rows, ctx.variables))
    s = BiparaStructure.validate(
        f_endo, p_endo, adapted_frame=PolyMatrix.from_rational_rows(ab, ctx.variables)
    )
    # T_P^- = F(V3): every F w with w in V3 must be a (-1)-eigenvector of P.
    for w in c3:
        fw = [sum((f_rows[i][t] * w[t] for t in range(dim)), Fraction(0)) for i in range(dim)]
        pfw = [sum((p_rows[i][t] * fw[t] for t in range(dim)), Fraction(0)) for i in range(dim)]
        if pfw != [-v for v in fw]:
            raise StructureError(
                [{"name": "derived identity T_P^- = F(V3) failed", "witness": None}]
            )
    return s


# ---------------------------------------------------------------------------
# Triple-structure classification
# ---------------------------------------------------------------------------

TRIPLE_KINDS = (
    "biparacomplex-type",
    "hyperproduct-type",
    "bicomplex-type",
    "hypercomplex-type",
    "none",
)


def classify_triple(F: EndoField, P: EndoField) -> str:
    """Classify (F, P) by the signs of F^2, P^2 and (anti)commutation."""
    if F.context != P.context:
        raise ContextMismatch("F and P live in different frame contexts")
    ctx = F.context
    identity = PolyMatrix.identity(ctx.dim, ctx.variables)
    f2 = F.matrix @ F.matrix
    p2 = P.matrix @ P.matrix
    fp = F.matrix @ P.matrix
    pf = P.matrix @ F.matrix
    anticommute = (fp + pf).is_zero
    commute = (fp - pf).is_zero
    if (f2 - identity).is_zero and (p2 - identity).is_zero:
        if anticommute:
            return "biparacomplex-type"
        if commute:
            return "hyperproduct-type"
    if (f2 + identity).is_zero and (p2 + identity).is_zero:
        if commute:
            return "bicomplex-type"
        if anticommute:
            return "hypercomplex-type"
    return "none"


# ---------------------------------------------------------------------------
# Block-diagonal structure group membership
# ---------------------------------------------------------------------------


def _delta_blocks(m: PolyMatrix):
    if m.rows != m.cols or m.rows % 2 != 0:
        return None
    if not m.is_constant:
        raise StructureError([{"name": "membership test needs constant entries", "witness": None}])
    n = m.rows // 2
    rows = m.constant_rows()
    for i in range(n):
        for j in range(n):
            if rows[i][n + j] != 0 or rows[n + i][j] != 0:
                return None
            if rows[i][j] != rows[n + i][n + j]:
                return None
    return [row[:n] for row in rows[:n]]


def delta_gl_algebra_membership(m: PolyMatrix) -> bool:
    """True iff m = diag(A, A) for some n x n block A."""
    return _delta_blocks(m) is not None


def delta_gl_membership(m: PolyMatrix) -> bool:
    """True iff m = diag(A, A) with A invertible."""
    block = _delta_blocks(m)
    if block is None:
        return False
    return rat_rank(block) == len(block)


# ---------------------------------------------------------------------------
# Pushforward of whole structures
# ---------------------------------------------------------------------------


def pushforward_structure(m: PolyMap, s: BiparaStructure) -> BiparaStructure:
    """Transport a structure along a diffeomorphism; output is re-validated."""
    if s.context != m.source:
        raise ContextMismatch("structure does not live on the map source")
    f_new = pushforward_endo(m, s.F)
    p_new = pushforward_endo(m, s.P)
    frame_new = None
    if s.adapted_frame is not None:
        cols = [
            pushforward_vector(m, VectorField(s.context, s.adapted_frame.column(j)))
            for j in range(s.dim)
        ]
        frame_new = PolyMatrix.from_rows(
            [[cols[j].components[i] for j in range(s.dim)] for i in range(s.dim)]
        )
    return BiparaStructure.validate(f_new, p_new, adapted_frame=frame_new)


# ---------------------------------------------------------------------------
# Random generation
# ---------------------------------------------------------------------------


def _random_coeff(rng: random.Random) -> Fraction:
    return rng.choice(
        [Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2), Fraction(3)]
    )


def random_unipotent_map(
    ctx: FrameContext, degree: int, rng: random.Random, max_terms: int = 2
) -> PolyMap:
    """A random unipotent chart change: v_i -> v_i + p_i(v_1 .. v_{i-1}).

    The triangular shape guarantees a polynomial inverse, computed by
    back-substitution.
    """
    if ctx.backend != POLYNOMIAL_CHART:
        raise GeometryError("unipotent maps are chart-backend objects")
    variables = ctx.variables
    dim = ctx.dim
    budget = max(1, max_terms) if degree > 0 else 0  # degree 0: the identity
    forward = []
    for i in range(dim):
        expr = MultiPoly.var(variables, variables[i])
        if i > 0 and budget > 0 and rng.random() < 0.7:
            total_degree = rng.randint(1, degree)
            exps = [0] * dim
            for _ in range(total_degree):
                exps[rng.randrange(i)] += 1
            expr = expr + MultiPoly(variables, {tuple(exps): _random_coeff(rng)})
            budget -= 1
        forward.append(expr)
    inverse: list[MultiPoly] = []
    for i in range(dim):
        correction = forward[i] - MultiPoly.var(variables, variables[i])
        sub = {variables[k]: (inverse[k] if k < i else MultiPoly.var(variables, variables[k])) for k in range(dim)}
        inverse.append(MultiPoly.var(variables, variables[i]) - correction.substitute(sub))
    return PolyMap(ctx, ctx, forward=forward, inverse=inverse)


def _random_constant_automorphism(dim: int, rng: random.Random, shears: int = 3):
    """A random integer matrix with exact inverse, built from elementary ops."""
    eye = [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)]
    mat = [row[:] for row in eye]
    inv = [row[:] for row in eye]
    for _ in range(shears):
        i = rng.randrange(dim)
        j = rng.randrange(dim)
        if i == j:
            continue
        c = Fraction(rng.choice([-2, -1, 1, 2]))
        # row op on mat: R_i += c R_j ; inverse gets the opposite column op
        mat[i] = [a + c * b for a, b in zip(mat[i], mat[j])]
        for row in inv:
            row[j] -= c * row[i]
    return mat, inv


def _random_bracket_table(n: int, rng: random.Random) -> dict[tuple[int, int], tuple]:
    """Random structure constants that satisfy Jacobi by construction."""
    dim = 2 * n
    family = rng.choice(["abelian", "nilpotent", "nilpotent", "affine", "solvable"])
    table: dict[tuple[int, int], tuple] = {}
    if family == "nilpotent":
        # Two-step nilpotent: [X_i, X_j] lands in the central Y-span.
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.8:
                    coeffs = [Fraction(0)] * dim
                    coeffs[n + rng.randrange(n)] = _random_coeff(rng)
                    table[(i, j)] = tuple(coeffs)
    elif family == "affine" and n >= 2:
        # [X_1, X_j] = c_j X_1 for j >= 2; pairwise Jacobi terms cancel.
        for j in range(1, n):
            if rng.random() < 0.9:
                coeffs = [Fraction(0)] * dim
                coeffs[0] = _random_coeff(rng)
                table[(0, j)] = tuple(coeffs)
    elif family == "solvable":
        # Mixed block [X_1, Y_1] = a X_1 + b Y_1 with everything else abelian:
        # the bracket image commutes with all generators, so Jacobi holds.
        # These give integrable structures whose connection coefficients are
        # nonzero, unlike the purely nilpotent families.
        coeffs = [Fraction(0)] * dim
        coeffs[0] = _random_coeff(rng)
        if rng.random() < 0.5:
            coeffs[n] = _random_coeff(rng)
        table[(0, n)] = tuple(coeffs)
    return table


def random_structure(
    n: int,
    backend: str = POLYNOMIAL_CHART,
    degree: int = 2,
    seed: int = 0,
    conjugate: bool | None = None,
) -> BiparaStructure:
    """A random validated structure carrying an adapted frame.

    Chart backend: the flat model conjugated by a random unipotent map, hence
    integrable by construction.  Constant backend: a Jacobi-valid random
    bracket table in adapted presentation, optionally transported along a
    random constant isomorphism; mixed brackets generally make it
    non-integrable.
    """
    rng = random.Random(seed)
    if backend == POLYNOMIAL_CHART:
        base = flat_structure(n, POLYNOMIAL_CHART)
        m = random_unipotent_map(base.context, degree, rng)
        return pushforward_structure(m, base)
    table = _random_bracket_table(n, rng)
    ctx = algebra_context(2 * n, table)
    f, p = _adapted_constant_endos(ctx)
    s = BiparaStructure.validate(f, p, adapted_frame=PolyMatrix.identity(2 * n, ()))
    if conjugate is None:
        conjugate = rng.random() < 0.5
    if not conjugate:
        return s
    mat, inv = _random_constant_automorphism(2 * n, rng)
    # Transport the bracket itself so the conjugating matrix is an isomorphism
    # onto the new context; Jacobi is preserved exactly by transport.
    new_table: dict[tuple[int, int], tuple] = {}
    dim = 2 * n
    cols_inv = [[inv[r][c] for r in range(dim)] for c in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            pre = ctx._vector_bracket(cols_inv[i], cols_inv[j])
            image = [
                sum((mat[r][t] * pre[t] for t in range(dim)), Fraction(0)) for r in range(dim)
            ]
            if any(image):
                new_table[(i, j)] = tuple(image)
    new_ctx = algebra_context(dim, new_table)
    m = PolyMap(ctx, new_ctx, matrix=mat, matrix_inverse=inv)
    return pushforward_structure(m, s)
