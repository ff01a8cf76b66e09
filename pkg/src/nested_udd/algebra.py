"""Operator-subspace analysis predicting which layer orderings keep working.

A nested decoupling layer does its job when three things hold for the current
generating algebra: the control is an involution, conjugation by it splits the
algebra into commuting and anticommuting parts without leaving the algebra,
and the commuting part is closed under multiplication. This module turns those
conditions into computable checks on subspaces of the 16-dimensional two-qubit
operator space and chains them layer by layer, innermost first.

Subspace arithmetic happens in the orthonormal Pauli-product (R) coordinate
system via Hilbert-Schmidt projection; boxes are reported as the Y labels with
nonzero overlap, which is how the effective Hamiltonians are conventionally
written even when the true span is smaller than its label set (pairs of Y
elements can be locked into fixed combinations).

Splits are evaluated on the exact span first. If the exact span is not
conjugation-invariant, the split is retried on the span's Y-label lift (the
span of every Y element with nonzero overlap): an effective Hamiltonian is an
arbitrary combination of its labels, so a split valid label-by-label is still
a valid separation even when the exact span mixes under conjugation. Only when
the label lift is not invariant either does the layer fail outright.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iproduct

import numpy as np

from nested_udd.operators import BasisConvention, ControlOperator, build_basis, build_control

ZERO_TOL = 1e-9


def _orthonormal_rows(rows: np.ndarray) -> np.ndarray:
    if rows.size == 0:
        return np.zeros((0, 16), dtype=complex)
    _, s, vh = np.linalg.svd(rows, full_matrices=False)
    return vh[s > ZERO_TOL]


@dataclass(frozen=True)
class AlgebraSpan:
    """A subspace of two-qubit operator space in R coordinates.

    `coords` holds orthonormal row vectors; `family` names the label family
    used for reporting (the Y operators by default).
    """

    coords: np.ndarray
    convention: BasisConvention
    family: str = "Y"

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def projector(self) -> np.ndarray:
        return self.coords.T @ self.coords.conj()

    def residual(self, vec: np.ndarray) -> float:
        return float(np.linalg.norm(vec - self.projector() @ vec))

    def contains(self, mat: np.ndarray) -> bool:
        vec = _coords_of(mat)
        norm = np.linalg.norm(vec)
        if norm == 0:
            return True
        return self.residual(vec / norm) <= ZERO_TOL

    def report_labels(self) -> tuple:
        """1-based indices of family elements with nonzero overlap."""
        fam = build_basis(self.family, self.convention)
        proj = self.projector()
        out = []
        for i in range(1, 17):
            vec = _coords_of(fam.element(i))
            vec = vec / np.linalg.norm(vec)
            if np.linalg.norm(proj @ vec) > ZERO_TOL:
                out.append(i)
        return tuple(out)

    def label_names(self) -> tuple:
        return tuple(f"{self.family}{i}" for i in self.report_labels())

    def label_lift(self) -> "AlgebraSpan":
        """Span of every family element overlapping this span (a superset)."""
        return span_from_labels(self.report_labels(), self.convention, self.family)

    def equals(self, other: "AlgebraSpan", tol: float = ZERO_TOL) -> bool:
        if self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        proj = other.projector()
        res = self.coords.T - proj @ self.coords.T
        return float(np.abs(res).max()) <= tol


_R_STACK = None


def _r_stack() -> np.ndarray:
    global _R_STACK
    if _R_STACK is None:
        _R_STACK = np.stack(build_basis("R").elements)
    return _R_STACK


def _coords_of(mat: np.ndarray) -> np.ndarray:
    # c_j = Tr(R_j A) / 4, the Hilbert-Schmidt projection onto R_j
    return np.einsum("kij,ji->k", _r_stack(), np.asarray(mat, dtype=complex)) / 4


def _mat_of(vec: np.ndarray) -> np.ndarray:
    return np.tensordot(vec, _r_stack(), axes=1)


def span_from_operators(mats, convention: BasisConvention, family: str = "Y") -> AlgebraSpan:
    rows = np.stack([_coords_of(m) for m in mats])
    return AlgebraSpan(_orthonormal_rows(rows), convention, family)


def span_from_labels(labels, convention: BasisConvention, family: str = "Y") -> AlgebraSpan:
    fam = build_basis(family, convention)
    return span_from_operators([fam.element(i) for i in labels], convention, family)


def full_span(convention: BasisConvention | None = None, family: str = "Y") -> AlgebraSpan:
    conv = convention if convention is not None else BasisConvention.default()
    return AlgebraSpan(np.eye(16, dtype=complex), conv, family)


def identity_span(convention: BasisConvention | None = None, family: str = "Y") -> AlgebraSpan:
    conv = convention if convention is not None else BasisConvention.default()
    return span_from_operators([np.eye(4, dtype=complex)], conv, family)


def _conjugation_map(x_mat: np.ndarray) -> np.ndarray:
    """16x16 matrix of A -> XAX in R coordinates."""
    r = _r_stack()
    cols = [_coords_of(x_mat @ r[k] @ x_mat) for k in range(16)]
    return np.stack(cols, axis=1)


def _control_matrix(x) -> np.ndarray:
    m = x.sys_matrix if isinstance(x, ControlOperator) else np.asarray(x, dtype=complex)
    if np.abs(m @ m - np.eye(m.shape[0])).max() > 1e-12:
        raise ValueError("control operator must be involutory")
    return m


@dataclass(frozen=True)
class SplitResult:
    invariant: bool
    commutant: AlgebraSpan
    anticommutant: AlgebraSpan
    witnesses: tuple
    lifted: bool
    split_space: AlgebraSpan


def conjugation_split(span: AlgebraSpan, x) -> SplitResult:
    """Split a span into commuting/anticommuting parts under conjugation by x.

    Tries the exact span first, then its label lift; see the module docstring
    for why the lift is a legitimate fallback. When neither is invariant the
    result carries the witnesses (label elements whose split parts leave the
    lifted span) and the parts are still returned for diagnostics.
    """
    m = _conjugation_map(_control_matrix(x))

    def images(s: AlgebraSpan) -> np.ndarray:
        return (m @ s.coords.T).T

    def is_invariant(s: AlgebraSpan) -> bool:
        if s.dim == 0:
            return True
        img = images(s).T
        res = img - s.projector() @ img
        return float(np.abs(res).max()) <= ZERO_TOL

    lifted = False
    base = span
    if not is_invariant(base):
        lift = span.label_lift()
        lifted = True
        base = lift
    invariant = is_invariant(base)

    img = images(base)
    plus = _orthonormal_rows((base.coords + img) / 2)
    minus = _orthonormal_rows((base.coords - img) / 2)
    commutant = AlgebraSpan(plus, span.convention, span.family)
    anticommutant = AlgebraSpan(minus, span.convention, span.family)

    witnesses = []
    if not invariant:
        fam = build_basis(span.family, span.convention)
        proj = base.projector()
        for i in base.report_labels():
            vec = _coords_of(fam.element(i))
            vec = vec / np.linalg.norm(vec)
            img_v = m @ vec
            for part in ((vec + img_v) / 2, (vec - img_v) / 2):
                if np.linalg.norm(part - proj @ part) > ZERO_TOL:
                    witnesses.append(f"{span.family}{i}")
                    break
    return SplitResult(
        invariant=invariant,
        commutant=commutant,
        anticommutant=anticommutant,
        witnesses=tuple(witnesses),
        lifted=lifted,
        split_space=base,
    )


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    closure: AlgebraSpan
    new_elements: tuple


def multiplicative_closure(span: AlgebraSpan) -> ClosureResult:
    """Extend a span by pairwise products until it stops growing."""
    current = span
    while True:
        mats = [_mat_of(v) for v in current.coords]
        rows = list(current.coords)
        for a, b in _iproduct(mats, mats):
            rows.append(_coords_of(a @ b))
        grown = AlgebraSpan(
            _orthonormal_rows(np.stack(rows)), span.convention, span.family
        )
        if grown.dim == current.dim:
            break
        current = grown
    closed = current.dim == span.dim
    before = set(span.report_labels())
    new = tuple(
        f"{span.family}{i}" for i in current.report_labels() if i not in before
    )
    return ClosureResult(closed=closed, closure=current, new_elements=new)


@dataclass(frozen=True)
class ChainStep:
    control: str
    input: AlgebraSpan
    outcome: str  # reduced | breakdown_non_invariant | breakdown_closure
    output: AlgebraSpan | None
    witnesses: tuple
    new_elements: tuple


@dataclass(frozen=True)
class ReductionChain:
    """Layer-by-layer reduction record for one ordering, innermost first."""

    ordering: tuple
    steps: tuple

    @property
    def completed(self) -> bool:
        return all(s.outcome != "breakdown_non_invariant" for s in self.steps)

    @property
    def final_span(self) -> AlgebraSpan | None:
        if not self.completed or not self.steps:
            return None
        return self.steps[-1].output

    @property
    def outcome_class(self) -> str:
        if not self.completed:
            return "breakdown_non_invariant"
        if any(s.outcome == "breakdown_closure" for s in self.steps):
            return "breakdown_closure"
        return "reduced"

    def report(self) -> str:
        """Chart-style text: one box per line, arrows naming the layer between."""

        def box(span: AlgebraSpan) -> str:
            names = ",".join(span.label_names())
            return f"{{{names}}}  (dim {span.dim})"

        lines = [box(self.steps[0].input)] if self.steps else []
        for step in self.steps:
            lines.append(f"⇓ {step.control}")
            if step.outcome == "breakdown_non_invariant":
                lines.append(
                    "breakdown: non-invariant, witnesses {" + ",".join(step.witnesses) + "}"
                )
            elif step.outcome == "breakdown_closure":
                lines.append(
                    "breakdown: closure regenerates {"
                    + ",".join(step.new_elements)
                    + "}, continuing with the closure"
                )
                lines.append(box(step.output))
            else:
                lines.append(box(step.output))
        return "\n".join(lines)


def predict_chain(
    ordering,
    basis: BasisConvention | None = None,
    start: AlgebraSpan | None = None,
) -> ReductionChain:
    """Predict the reduction chain for an outer-to-inner layer ordering.

    Layers are evaluated innermost first, matching the physical nesting. A
    non-invariant breakdown terminates the chain; a closure breakdown records
    the regenerated elements and continues with the closure as the next span.
    """
    conv = basis if basis is not None else BasisConvention.default()
    span = start if start is not None else full_span(conv)
    steps = []
    for name in reversed(tuple(ordering)):
        x = build_control(name, conv)
        sp = conjugation_split(span, x)
        if not sp.invariant:
            steps.append(
                ChainStep(name, span, "breakdown_non_invariant", None, sp.witnesses, ())
            )
            break
        clo = multiplicative_closure(sp.commutant)
        if clo.closed:
            steps.append(ChainStep(name, span, "reduced", sp.commutant, (), ()))
            span = sp.commutant
        else:
            steps.append(
                ChainStep(name, span, "breakdown_closure", clo.closure, (), clo.new_elements)
            )
            span = clo.closure
    return ReductionChain(ordering=tuple(ordering), steps=tuple(steps))


def ordering_exchangeable(a, b, subspace: AlgebraSpan | None = None) -> bool:
    """Whether two controls commute or anticommute (restricted to a subspace).

    Restriction uses the support of the subspace's operators: both products
    are compressed by the projector onto the states those operators touch.
    """
    am = _control_matrix(a)
    bm = _control_matrix(b)
    if subspace is None or subspace.dim == 0:
        q = np.eye(am.shape[0], dtype=complex)
    else:
        mats = [_mat_of(v) for v in subspace.coords]
        m = sum(x @ x.conj().T + x.conj().T @ x for x in mats)
        w, v = np.linalg.eigh(m)
        cols = v[:, w > ZERO_TOL]
        q = cols @ cols.conj().T
    comm = q @ (am @ bm - bm @ am) @ q
    anti = q @ (am @ bm + bm @ am) @ q
    return min(np.abs(comm).max(), np.abs(anti).max()) <= 1e-12
