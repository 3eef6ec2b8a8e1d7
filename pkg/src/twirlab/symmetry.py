"""Finite group actions, group averaging, and the laws the average obeys.

A GroupAction is a finite list of labeled invertible real matrices acting
on one system, verified to be closed under multiplication.  The twirl of
the action is the uniform average of its elements; because the element
set is an honest finite group this average is an idempotent that absorbs
every element from either side, exactly, not just in a limit.

Compact groups enter through certified finite realizations: a finite
subgroup whose uniform average reproduces the compact group's invariant
average on a bounded number of collective tensor factors.  The bound
travels with the action and is enforced when a projector is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .errors import (
    CertificationError,
    DimensionMismatch,
    LabelMismatch,
    NotAGroup,
    UnsupportedSize,
)

DEFAULT_TOL = 1e-9

# above this dimension, projector invariants are spot-checked on seeded
# probe vectors instead of full matrix products
_EXACT_CHECK_DIM = 400


@dataclass(frozen=True)
class Certification:
    """Validity certificate for a finite realization of a compact group.

    max_factors: largest number of collective tensor factors for which
    the finite average equals the compact one.  None means the action is
    an exact finite symmetry with no such limit.
    """

    realizes: str | None = None
    max_factors: int | None = None
    note: str = ""


@dataclass(frozen=True)
class GroupAction:
    """Labeled finite set of invertible matrices closed under product."""

    labels: tuple
    elements: np.ndarray  # (n, dim, dim)
    certification: Certification = field(default_factory=Certification)
    n_factors: int = 1

    def __post_init__(self):
        el = np.array(self.elements, dtype=float)
        if el.ndim != 3 or el.shape[1] != el.shape[2]:
            raise DimensionMismatch("elements must be a stack of square matrices")
        if len(self.labels) != el.shape[0]:
            raise LabelMismatch("one label per element required")
        if len(set(self.labels)) != len(self.labels):
            raise LabelMismatch("duplicate element labels")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def order(self) -> int:
        return self.elements.shape[0]

    def is_trivial(self, tol: float = DEFAULT_TOL) -> bool:
        eye = np.eye(self.dim)
        return all(np.max(np.abs(m - eye)) <= tol for m in self.elements)


def build_finite_action(labels, matrices, tol: float = DEFAULT_TOL,
                        certification: Certification | None = None) -> GroupAction:
    """Validate a labeled matrix list as a finite group action.

    Checks invertibility of every element, closure of pairwise products
    within the list, presence of an identity, and an inverse for each
    element (read off the closure table).
    """
    mats = np.array(matrices, dtype=float)
    if mats.ndim != 3:
        raise DimensionMismatch("matrices must be a list of square matrices")
    n, d, d2 = mats.shape
    if d != d2:
        raise DimensionMismatch("matrices must be square")
    labels = tuple(labels)
    if len(labels) != n:
        raise LabelMismatch(f"{len(labels)} labels for {n} matrices")

    for lab, m in zip(labels, mats):
        if abs(np.linalg.det(m)) < 1e-12:
            raise NotAGroup(f"element {lab!r} is singular")

    def find(m: np.ndarray) -> int:
        for k in range(n):
            if np.max(np.abs(mats[k] - m)) <= tol:
                return k
        return -1

    id_idx = find(np.eye(d))
    if id_idx < 0:
        raise NotAGroup("no identity element in the list")

    table = np.empty((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            k = find(mats[i] @ mats[j])
            if k < 0:
                raise NotAGroup(
                    f"product of {labels[i]!r} and {labels[j]!r} is not in the list")
            table[i, j] = k

    for i in range(n):
        if not np.any(table[i] == id_idx):
            raise NotAGroup(f"element {labels[i]!r} has no inverse in the list")

    return GroupAction(labels=labels, elements=mats,
                       certification=certification or Certification())


def collective_action(parts: list[GroupAction], tol: float = DEFAULT_TOL) -> GroupAction:
    """Same group acting on a tensor product, element by element.

    Element g of the collective action is the Kronecker product of the
    parts' matrices for g; labels must agree across parts in order.
    Closure follows from the parts and is not re-tabulated.
    """
    if not parts:
        raise LabelMismatch("need at least one part")
    labels = parts[0].labels
    for p in parts[1:]:
        if p.labels != labels:
            raise LabelMismatch("element labels differ across parts")
    mats = parts[0].elements
    for p in parts[1:]:
        mats = np.stack([np.kron(a, b) for a, b in zip(mats, p.elements)])

    certs = [p.certification for p in parts]
    realizes = certs[0].realizes
    max_f = None
    lims = [c.max_factors for c in certs if c.max_factors is not None]
    if lims:
        max_f = min(lims)
    nf = sum(p.n_factors for p in parts)
    return GroupAction(labels=labels, elements=mats,
                       certification=Certification(realizes, max_f),
                       n_factors=nf)


@dataclass(frozen=True)
class TwirlProjector:
    """Uniform group average, verified idempotent and element-absorbing."""

    matrix: np.ndarray
    action: GroupAction
    idempotence_residual: float
    commutation_residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def twirl_projector(a: GroupAction, tol: float = DEFAULT_TOL) -> TwirlProjector:
    """Average of the element matrices in listed order.

    Raises CertificationError when a design-realized action is averaged
    over more collective factors than its certificate covers.
    """
    cert = a.certification
    if cert.max_factors is not None and a.n_factors > cert.max_factors:
        raise CertificationError(
            f"finite realization of {cert.realizes or 'a compact group'} is certified "
            f"for at most {cert.max_factors} collective factors, got {a.n_factors}")

    p = np.zeros((a.dim, a.dim))
    for m in a.elements:  # fixed summation order, then one division
        p = p + m
    p = p / a.order

    idem = float(np.max(np.abs(p @ p - p)))
    if a.dim <= _EXACT_CHECK_DIM:
        comm = 0.0
        for m in a.elements:
            comm = max(comm, float(np.max(np.abs(m @ p - p))),
                       float(np.max(np.abs(p @ m - p))))
    else:
        rng = np.random.default_rng(0)
        probes = rng.standard_normal((a.dim, 8))
        px = p @ probes
        comm = 0.0
        for m in a.elements:
            comm = max(comm, float(np.max(np.abs(m @ px - px))),
                       float(np.max(np.abs(p @ (m @ probes) - px))))
    if idem > tol or comm > tol:
        raise NotAGroup(
            f"group average failed projector checks (idempotence {idem:.3e}, "
            f"absorption {comm:.3e}); element list is not a group at this tolerance")
    p.setflags(write=False)
    return TwirlProjector(matrix=p, action=a, idempotence_residual=idem,
                          commutation_residual=comm)


def twirl_state(p: TwirlProjector, omega: np.ndarray) -> np.ndarray:
    return p.matrix @ omega


def twirl_effect(p: TwirlProjector, e: np.ndarray) -> np.ndarray:
    return e @ p.matrix


def twirl(p: TwirlProjector, x: np.ndarray, kind: str = "state") -> np.ndarray:
    """Average a state (acts on the left) or an effect (acts on the right)."""
    x = np.asarray(x, dtype=float)
    if x.shape[0 if kind == "state" else -1] != p.dim:
        raise DimensionMismatch("vector does not match projector dimension")
    if kind == "state":
        return twirl_state(p, x)
    if kind == "effect":
        return twirl_effect(p, x)
    raise ValueError(f"kind must be 'state' or 'effect', got {kind!r}")


@dataclass
class LawReport:
    """Max residuals of the averaging identities over random probes."""

    trials: int
    left_invariance: float
    right_invariance: float
    idempotence: float
    consistency: dict

    @property
    def max_residual(self) -> float:
        vals = [self.left_invariance, self.right_invariance, self.idempotence]
        vals += list(self.consistency.values())
        return max(vals)


def verify_twirl_laws(parts: list[GroupAction], trials: int = 200,
                      seed: int = 42, tol: float = DEFAULT_TOL) -> LawReport:
    """Exercise the averaging identities on random vectors.

    Single part: absorption from both sides and idempotence.  Two parts:
    additionally the identities tying the local averages G1 (x) G2 to the
    collective average G over the joint action, evaluated pointwise:

      (G1 (x) G2) G = G1 (x) G2 = G (G1 (x) G2)
      (1 (x) G2) G = G (1 (x) G2)   and the mirror image
      G2 G(partial) variants reduced to the joint space.
    """
    rng = np.random.default_rng(seed)
    if not parts:
        raise LabelMismatch("need at least one action")

    if len(parts) == 1:
        a = parts[0]
        p = twirl_projector(a, tol).matrix
        li = ri = idem = 0.0
        x = rng.standard_normal((a.dim, trials))
        px = p @ x
        idem = float(np.max(np.abs(p @ px - px)))
        for m in a.elements:
            li = max(li, float(np.max(np.abs(p @ (m @ x) - px))))
            ri = max(ri, float(np.max(np.abs(m @ px - px))))
        return LawReport(trials, li, ri, idem, {})

    if len(parts) != 2:
        raise UnsupportedSize("law suite covers one or two parts")

    a1, a2 = parts
    joint = collective_action([a1, a2], tol)
    p1 = twirl_projector(a1, tol).matrix
    p2 = twirl_projector(a2, tol).matrix
    pj = twirl_projector(joint, tol).matrix
    p12 = np.kron(p1, p2)
    i1 = np.eye(a1.dim)
    i2 = np.eye(a2.dim)
    one_p2 = np.kron(i1, p2)
    p1_one = np.kron(p1, i2)

    d = joint.dim
    x = rng.standard_normal((d, trials))
    px = pj @ x
    p12x = p12 @ x

    li = ri = 0.0
    for m in joint.elements:
        li = max(li, float(np.max(np.abs(pj @ (m @ x) - px))))
        ri = max(ri, float(np.max(np.abs(m @ px - px))))
    idem = float(np.max(np.abs(pj @ px - px)))

    def gap(y):
        return float(np.max(np.abs(y - p12x)))

    # each expression below must coincide with the product of local averages
    cons = {
        "second_local_after_joint": gap(one_p2 @ px),
        "joint_after_second_local": gap(pj @ (one_p2 @ x)),
        "first_local_after_joint": gap(p1_one @ px),
        "joint_after_first_local": gap(pj @ (p1_one @ x)),
        "both_locals_after_joint": gap(p12 @ px),
        "joint_after_both_locals": gap(pj @ p12x),
    }
    return LawReport(trials, li, ri, idem, cons)


def _proper_signed_permutations() -> list[tuple[str, np.ndarray]]:
    """The 24 rotation matrices permuting signed coordinate axes."""
    out = []
    for perm in permutations(range(3)):
        pm = np.zeros((3, 3))
        for r, c in enumerate(perm):
            pm[r, c] = 1.0
        psign = np.linalg.det(pm)
        for signs in product((1.0, -1.0), repeat=3):
            if psign * signs[0] * signs[1] * signs[2] > 0:
                m = np.diag(signs) @ pm
                lab = "".join(str(c) for c in perm) + "".join(
                    "+" if s > 0 else "-" for s in signs)
                out.append((lab, m))
    return out


def qubit_octahedral_action() -> GroupAction:
    """The 24-element qubit symmetry group in Hermitian-basis form.

    Each element acts as the identity on the trace component and as a
    proper signed permutation on the three traceless components; this is
    exactly the adjoint form of the 24-element unitary subgroup whose
    uniform average matches the full-group invariant average on up to
    three collective factors (it is a unitary 3-design).
    """
    labs, mats = [], []
    for lab, r in _proper_signed_permutations():
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        m[1:, 1:] = r
        labs.append(lab)
        mats.append(m)
    order = np.argsort(labs)
    labs = [labs[i] for i in order]
    mats = [mats[i] for i in order]
    return build_finite_action(
        labs, mats,
        certification=Certification(realizes="SU(2)", max_factors=3,
                                    note="unitary 3-design subgroup"))


def su2_collective_twirl(n: int, tol: float = DEFAULT_TOL) -> TwirlProjector:
    """Collective rotation average on n spin-1/2 factors, n <= 3.

    Realized by the uniform average over the 24-element subgroup acting
    identically on every factor; the result equals the full-group average
    exactly for up to three factors.
    """
    if not 1 <= n <= 3:
        raise UnsupportedSize(
            "collective rotation average certified for 1 to 3 factors only")
    local = qubit_octahedral_action()
    act = collective_action([local] * n) if n > 1 else local
    return twirl_projector(act, tol)
