"""Invariant exterior calculus on the three torus-bundle Lie algebra models.

The models are the solvable 4-dimensional Lie algebras underlying orientable
T^2-bundles over T^2, described by a fixed coframe ``e^1..e^4`` and structure
equations encoded in the usual shorthand:

* ``Nil3xR``   <-> (0,0,0,12)      de4 = e1^e2
* ``Nil4``     <-> (0,13,0,12)     de2 = e1^e3, de4 = e1^e2
* ``Sol3xR``   <-> (0,0,13,41)     de3 = e1^e3, de4 = e4^e1

An :class:`InvariantForm` has one coefficient per strictly increasing
multi-index; coefficients are constants or :class:`~cytorus.fields.TorusField`
samples on the declared base 2-torus of the model's fibration.  Constants act
through the structure equations, fields additionally through the Leibniz rule
with the base chart supplying the differentials of the base coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import InvarianceError, ValidationError
from .fields import TorusField

NIL3XR = "Nil3xR"
NIL4 = "Nil4"
SOL3XR = "Sol3xR"

Coefficient = Union[float, complex, TorusField]

_GENERATORS = (1, 2, 3, 4)


# ---------------------------------------------------------------------------
# models


@dataclass(frozen=True)
class BaseChart:
    """Base coordinates of a fibration and their differentials.

    ``diffs[i]`` is the component vector of ``d(coords[i])`` in the e-basis;
    the rows must be closed combinations so that d(d coord) = 0.
    """

    coords: tuple
    diffs: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diffs, dtype=float)
        d.flags.writeable = False
        object.__setattr__(self, "diffs", d)
        object.__setattr__(self, "coords", tuple(self.coords))


@dataclass(frozen=True)
class LieModel:
    """One of the three algebra models with a chosen fibration chart.

    ``d_gen[i-1]`` maps multi-indices (j,k), j<k, to the coefficient of
    ``e^{jk}`` in ``d(e^i)``.
    """

    tag: str
    d_gen: tuple
    chart: BaseChart
    coframe_realization: tuple
    lam: float = None

    @property
    def d_matrix(self):
        return self.d_gen

    def describe(self):
        parts = []
        for i, dg in enumerate(self.d_gen, start=1):
            if not dg:
                parts.append("0")
            else:
                parts.append("+".join(f"{v:g}*{j}{k}" for (j, k), v in sorted(dg.items())))
        return "(" + ",".join(parts) + ")"


def _chart(coords, rows):
    return BaseChart(coords, np.array(rows, dtype=float))


def nil3xr(fibration="xy"):
    """Nil3 x R with coframe e1 = dy, e2 = dx, e3 = dt, e4 = dz - x dy.

    ``fibration="xy"`` projects to the (x, y) base (the bilagrangian torus
    fibration of the Kodaira-Thurston surface); ``"yt"`` projects to (y, t).
    """
    d_gen = ({}, {}, {}, {(1, 2): 1.0})
    if fibration == "xy":
        chart = _chart(("x", "y"), [[0, 1, 0, 0], [1, 0, 0, 0]])
    elif fibration == "yt":
        chart = _chart(("y", "t"), [[1, 0, 0, 0], [0, 0, 1, 0]])
    else:
        raise ValidationError("Nil3xR fibrations: 'xy' or 'yt'")
    return LieModel(NIL3XR, d_gen, chart,
                    ("dy", "dx", "dt", "dz - x dy"), lam=0.0)


def kodaira_thurston():
    return nil3xr("xy")


def nil4():
    """Nil4 with coframe e1 = -dt, e2 = dy - t dz, e3 = dz, e4 = dx - t dy + t^2/2 dz."""
    d_gen = ({}, {(1, 3): 1.0}, {}, {(1, 2): 1.0})
    chart = _chart(("z", "t"), [[0, 0, 1, 0], [-1, 0, 0, 0]])
    return LieModel(NIL4, d_gen, chart,
                    ("-dt", "dy - t dz", "dz", "dx - t dy + t^2/2 dz"), lam=1.0)


def sol3xr():
    """Sol3 x R with coframe e1 = dt, e2 = dz, e3 = e^t dx, e4 = e^-t dy."""
    d_gen = ({}, {}, {(1, 3): 1.0}, {(1, 4): -1.0})
    chart = _chart(("z", "t"), [[0, 1, 0, 0], [1, 0, 0, 0]])
    return LieModel(SOL3XR, d_gen, chart,
                    ("dt", "dz", "e^t dx", "e^-t dy"))


def nil_family(lam):
    """One-parameter family de2 = lam e1^e3, de4 = e1^e2 over the (y, t) base.

    lam = 1 is a relabelled Nil4, lam = 0 degenerates to Nil3xR over pi_yt;
    the chart (dy = -e1, dt = e3) is lambda-independent so adapted frames of a
    fixed metric/symplectic pair vary only through k ~ lam.
    """
    lam = float(lam)
    d_gen = ({}, {(1, 3): lam} if lam != 0.0 else {}, {}, {(1, 2): 1.0})
    chart = _chart(("y", "t"), [[-1, 0, 0, 0], [0, 0, 1, 0]])
    tag = NIL3XR if lam == 0.0 else NIL4
    return LieModel(tag, d_gen, chart, ("family coframe, de2 = lam e13",), lam=lam)


# ---------------------------------------------------------------------------
# forms


def _validate_index(idx, degree):
    idx = tuple(int(i) for i in idx)
    if len(idx) != degree:
        raise ValidationError(f"multi-index {idx} has wrong length for degree {degree}")
    if any(i not in _GENERATORS for i in idx):
        raise ValidationError(f"multi-index {idx} out of range 1..4")
    if any(idx[s] >= idx[s + 1] for s in range(len(idx) - 1)):
        raise ValidationError(f"multi-index {idx} must be strictly increasing")
    return idx


def _is_zero_coeff(c):
    if isinstance(c, TorusField):
        return False
    return c == 0


class InvariantForm:
    """Differential form with constant or base-field coefficients.

    coeffs maps strictly increasing multi-indices to coefficients; ``base``
    names the chart coordinates any field coefficients are sampled on.
    """

    __slots__ = ("degree", "coeffs", "base")

    def __init__(self, degree: int, coeffs: Mapping = None, base=None):
        if degree < 0 or degree > 4:
            raise ValidationError("form degree must be 0..4")
        self.degree = int(degree)
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = _validate_index(idx, degree)
            if isinstance(c, TorusField):
                if base is None:
                    raise ValidationError("field coefficients need a declared base")
            elif isinstance(c, (int, float)):
                c = float(c)
            elif not isinstance(c, complex):
                raise ValidationError(f"unsupported coefficient type {type(c)}")
            if not _is_zero_coeff(c):
                clean[idx] = c
        self.coeffs = clean
        self.base = tuple(base) if base is not None else None

    # -- constructors ------

    @staticmethod
    def zero(degree, base=None):
        return InvariantForm(degree, {}, base)

    @staticmethod
    def monomial(*idx, coeff=1.0, base=None):
        return InvariantForm(len(idx), {tuple(idx): coeff}, base)

    @staticmethod
    def one_form(components, base=None):
        comps = list(components)
        return InvariantForm(1, {(i,): comps[i - 1] for i in _GENERATORS
                                 if not _is_zero_coeff(comps[i - 1])}, base)

    # -- queries ------

    def coefficient(self, *idx):
        return self.coeffs.get(tuple(idx), 0.0)

    def has_fields(self):
        return any(isinstance(c, TorusField) for c in self.coeffs.values())

    def max_abs(self):
        worst = 0.0
        for c in self.coeffs.values():
            worst = max(worst, c.max_abs() if isinstance(c, TorusField) else abs(c))
        return worst

    def __repr__(self):
        if not self.coeffs:
            return f"InvariantForm(0; degree {self.degree})"
        bits = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            name = "e" + "".join(str(i) for i in idx) if idx else "1"
            bits.append(f"<field>*{name}" if isinstance(c, TorusField)
                        else f"{c:+g}*{name}")
        return f"InvariantForm({' '.join(bits)})"

    # -- algebra ------

    def _merge_base(self, other):
        if self.base is not None and other.base is not None and self.base != other.base:
            raise InvarianceError(
                f"cannot combine forms over bases {self.base} and {other.base}")
        return self.base if self.base is not None else other.base

    def __add__(self, other):
        if not isinstance(other, InvariantForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValidationError("degree mismatch in form addition")
        base = self._merge_base(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            acc = out.get(idx, 0.0) + c
            if _is_zero_coeff(acc):
                out.pop(idx, None)
            else:
                out[idx] = acc
        return InvariantForm(self.degree, out, base)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return InvariantForm(self.degree,
                             {i: -c for i, c in self.coeffs.items()}, self.base)

    def scaled(self, factor):
        """Multiply every coefficient by a scalar or a base field."""
        base = self.base
        if isinstance(factor, TorusField) and base is None:
            raise ValidationError("scaling by a field needs a declared base")
        return InvariantForm(self.degree,
                             {i: factor * c if not isinstance(c, TorusField) else c * factor
                              for i, c in self.coeffs.items()}, base)

    def __mul__(self, factor):
        return self.scaled(factor)

    __rmul__ = __mul__

    def conjugate(self):
        return InvariantForm(self.degree,
                             {i: (c.conj() if isinstance(c, TorusField) else np.conj(c))
                              for i, c in self.coeffs.items()}, self.base)

    def real(self):
        return InvariantForm(self.degree,
                             {i: (c.real() if isinstance(c, TorusField) else float(np.real(c)))
                              for i, c in self.coeffs.items()}, self.base)

    def imag(self):
        return InvariantForm(self.degree,
                             {i: (c.imag() if isinstance(c, TorusField) else float(np.imag(c)))
                              for i, c in self.coeffs.items()}, self.base)


def _merge_sign(idx_a, idx_b):
    """Sorted merge of disjoint increasing tuples with the wedge sign."""
    inversions = 0
    for i in idx_a:
        for j in idx_b:
            if i > j:
                inversions += 1
    merged = tuple(sorted(idx_a + idx_b))
    return merged, (-1.0) ** inversions


def _coeff_mul(a, b):
    if isinstance(a, TorusField) or isinstance(b, TorusField):
        return a * b
    return a * b


def wedge(a: InvariantForm, b: InvariantForm) -> InvariantForm:
    """Graded-anticommutative product with pointwise coefficient products."""
    if a.degree + b.degree > 4:
        return InvariantForm.zero(4, a.base or b.base)
    base = a._merge_base(b)
    out = {}
    for ia, ca in a.coeffs.items():
        sa = set(ia)
        for ib, cb in b.coeffs.items():
            if sa & set(ib):
                continue
            merged, sign = _merge_sign(ia, ib)
            term = _coeff_mul(ca, cb)
            if sign < 0:
                term = -term
            acc = out.get(merged, 0.0) + term
            if _is_zero_coeff(acc):
                out.pop(merged, None)
            else:
                out[merged] = acc
    return InvariantForm(a.degree + b.degree, out, base)


def wedge_all(*forms):
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def _d_generator(i, model):
    """d(e^i) as a constant 2-form."""
    return InvariantForm(2, dict(model.d_gen[i - 1]))


def _d_monomial(idx, model):
    """d(e^{i1...ik}) from the structure constants (graded Leibniz)."""
    out = InvariantForm.zero(len(idx) + 1)
    for s, i in enumerate(idx):
        dei = _d_generator(i, model)
        if not dei.coeffs:
            continue
        term = dei
        if idx[:s]:
            term = wedge(InvariantForm.monomial(*idx[:s]), term)
        if idx[s + 1:]:
            term = wedge(term, InvariantForm.monomial(*idx[s + 1:]))
        if s % 2 == 1:
            term = -term
        out = out + term
    return out


def exterior_derivative(form: InvariantForm, model: LieModel) -> InvariantForm:
    """d on invariant forms: structure constants plus base Leibniz terms.

    Field coefficients must be sampled on the model's declared base chart;
    anything else is an invariance violation and is rejected.
    """
    if form.degree >= 4:
        raise ValidationError("exterior_derivative expects degree <= 3")
    if form.base is not None and form.base != model.chart.coords:
        raise InvarianceError(
            f"form coefficients live on {form.base}, but the model's fibration "
            f"base is {model.chart.coords}; invariant forms may only depend on "
            "the base coordinates")
    out = InvariantForm.zero(form.degree + 1, form.base)
    for idx, c in form.coeffs.items():
        dmono = _d_monomial(idx, model)
        if isinstance(c, TorusField):
            out = out + dmono.scaled(c)
            dc = InvariantForm.zero(1, form.base)
            for axis in range(2):
                dcoord = InvariantForm.one_form(model.chart.diffs[axis])
                dc = dc + dcoord.scaled(c.derivative(axis + 1, 1))
            if idx:
                out = out + wedge(dc, InvariantForm.monomial(*idx))
            else:
                out = out + dc
        else:
            out = out + dmono.scaled(c)
    return out


def change_basis(form: InvariantForm, matrix) -> InvariantForm:
    """Rewrite a form under ``old^i = sum_j matrix[i, j] new^j``.

    Coefficients ride along unchanged; each old monomial is expanded as a
    wedge of the matrix rows in the new basis.
    """
    M = np.asarray(matrix, dtype=float)
    out = InvariantForm.zero(form.degree, form.base)
    for idx, c in form.coeffs.items():
        if not idx:
            out = out + InvariantForm(0, {(): c}, form.base)
            continue
        mono = InvariantForm.one_form(M[idx[0] - 1])
        for i in idx[1:]:
            mono = wedge(mono, InvariantForm.one_form(M[i - 1]))
        out = out + mono.scaled(c)
    return out


def form_difference(a: InvariantForm, b: InvariantForm) -> float:
    """Worst absolute coefficient difference (fields compared pointwise)."""
    worst = 0.0
    for idx in set(a.coeffs) | set(b.coeffs):
        ca, cb = a.coeffs.get(idx, 0.0), b.coeffs.get(idx, 0.0)
        diff = ca - cb if not isinstance(cb, TorusField) else -(cb - ca)
        worst = max(worst, diff.max_abs() if isinstance(diff, TorusField)
                    else abs(diff))
    return worst


def closed_two_forms(model: LieModel):
    """Basis of the invariant 2-forms used for cohomology pairings.

    Nil3xR: the full 5-dimensional kernel of d; Nil4: the 4-dimensional
    kernel; Sol3xR: representatives of H^2 (e12 and e34).
    """
    if model.tag == SOL3XR:
        idxs = [(1, 2), (3, 4)]
    elif model.tag == NIL3XR or (model.lam is not None and model.lam == 0.0):
        idxs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]
    else:
        idxs = [(1, 2), (1, 3), (1, 4), (2, 3)]
    return [InvariantForm.monomial(*i) for i in idxs]


def two_form_matrix(form: InvariantForm):
    """Antisymmetric 4x4 coefficient matrix of a constant 2-form."""
    M = np.zeros((4, 4))
    for (i, j), c in form.coeffs.items():
        if isinstance(c, TorusField):
            raise ValidationError("two_form_matrix expects constant coefficients")
        M[i - 1, j - 1] = c
        M[j - 1, i - 1] = -c
    return M


def matrix_two_form(M, base=None):
    M = np.asarray(M, dtype=float)
    coeffs = {}
    for i in range(4):
        for j in range(i + 1, 4):
            if M[i, j] != 0.0:
                coeffs[(i + 1, j + 1)] = M[i, j]
    return InvariantForm(2, coeffs, base)


def random_invariant_form(model, rng, n=16):
    """Random form of random degree <= 3 mixing constant and field coefficients."""
    from . import fields as _f
    degree = int(rng.integers(0, 4))
    idxs = [tuple(sorted(c)) for c in _combinations(degree)]
    coeffs = {}
    base = None
    for idx in idxs:
        kind = rng.integers(0, 3)
        if kind == 0:
            continue
        if kind == 1:
            coeffs[idx] = float(rng.normal())
        else:
            base = model.chart.coords
            coeffs[idx] = _f.random_smooth(n, kmax=3, amplitude=1.0,
                                           seed=int(rng.integers(0, 2**31)))
    if not coeffs and degree > 0:
        coeffs[idxs[0]] = 1.0
    return InvariantForm(degree, coeffs, base)


def _combinations(degree):
    from itertools import combinations
    return list(combinations(_GENERATORS, degree))
