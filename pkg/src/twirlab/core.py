"""Finite-dimensional generalized probabilistic theories over real vector spaces.

Conventions, used everywhere downstream:

* states are column vectors, stored as the columns of a (dim, n) array;
* effects are row functionals, stored as the rows of an (m, dim) array;
* the pairing is the plain matrix product, so ``effects @ states`` is the
  full table of outcome probabilities;
* composites live on the Kronecker product with the left factor major:
  the product state of column i and column j sits at column i * n_b + j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimensionMismatch,
    InconsistentWorlds,
    RangeViolation,
    ValidationFailure,
)
from . import hermitian

DEFAULT_TOL = 1e-9

# decimal places used when hashing generator vectors for dedup / lookup
_KEY_DECIMALS = 10


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    if not np.all(np.isfinite(out)):
        raise ValidationFailure("non-finite entry in generator data")
    out.setflags(write=False)
    return out


def _vec_key(v: np.ndarray) -> bytes:
    r = np.round(np.asarray(v, dtype=float), _KEY_DECIMALS)
    r[r == 0.0] = 0.0  # normalize -0.0
    return r.tobytes()


@dataclass(frozen=True)
class SystemSpec:
    """A single GPT system given by explicit generator lists.

    state_generators: (dim, n_states), columns are normalized states.
    effect_generators: (n_effects, dim), rows are effect functionals.
    unit_effect: (dim,) row functional with value 1 on every state.
    hilbert_dims: set for quantum systems; enables positive-semidefinite
        cone tests on the underlying operators (the listed generators then
        only span the state space linearly rather than generate its cone).
    parts: set by compose_systems; local structure used by steering checks.
    """

    id: str
    dim: int
    state_generators: np.ndarray
    effect_generators: np.ndarray
    unit_effect: np.ndarray
    transformations: tuple = ()
    hilbert_dims: tuple | None = None
    parts: tuple | None = None

    def __post_init__(self):
        s = _freeze(np.atleast_2d(self.state_generators))
        e = _freeze(np.atleast_2d(self.effect_generators))
        u = _freeze(np.asarray(self.unit_effect).ravel())
        if s.shape[0] != self.dim:
            raise DimensionMismatch(
                f"{self.id}: state generators have dim {s.shape[0]}, expected {self.dim}")
        if e.shape[1] != self.dim:
            raise DimensionMismatch(
                f"{self.id}: effect generators have dim {e.shape[1]}, expected {self.dim}")
        if u.shape[0] != self.dim:
            raise DimensionMismatch(f"{self.id}: unit effect has wrong dimension")
        if s.shape[1] == 0 or e.shape[0] == 0:
            raise ValidationFailure(f"{self.id}: empty generator list")
        if self.hilbert_dims is not None:
            hd = tuple(int(d) for d in self.hilbert_dims)
            if int(np.prod([d * d for d in hd])) != self.dim:
                raise DimensionMismatch(
                    f"{self.id}: hilbert_dims {hd} inconsistent with dim {self.dim}")
            object.__setattr__(self, "hilbert_dims", hd)
        object.__setattr__(self, "state_generators", s)
        object.__setattr__(self, "effect_generators", e)
        object.__setattr__(self, "unit_effect", u)

    @property
    def n_states(self) -> int:
        return self.state_generators.shape[1]

    @property
    def n_effects(self) -> int:
        return self.effect_generators.shape[0]

    def states_iter(self):
        return (self.state_generators[:, i] for i in range(self.n_states))

    def effects_iter(self):
        return (self.effect_generators[i] for i in range(self.n_effects))


@dataclass(frozen=True)
class CompositeSpec:
    """Recipe for a bipartite composite.

    Extra generators live on the joint space and are appended after the
    products: extra states e.g. entangled/nonproduct states, extra effects
    e.g. coarse-grainings that are not products of local outcomes.
    """

    part_a: SystemSpec
    part_b: SystemSpec
    id: str = ""
    extra_state_generators: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    extra_effect_generators: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        if not self.id:
            object.__setattr__(self, "id", self.part_a.id + self.part_b.id)


def apply_effect(e: np.ndarray, omega: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Pairing of one effect with one state; raises outside [0,1] + tol."""
    e = np.asarray(e, dtype=float).ravel()
    omega = np.asarray(omega, dtype=float).ravel()
    if e.shape[0] != omega.shape[0]:
        raise DimensionMismatch(
            f"effect has dim {e.shape[0]}, state has dim {omega.shape[0]}")
    p = float(e @ omega)
    if p < -tol or p > 1.0 + tol:
        raise RangeViolation(f"pairing value {p} outside [0, 1]")
    return p


def tensor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kronecker product of two states, two effects, or two maps."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != y.ndim:
        raise DimensionMismatch("tensor operands must both be vectors or both matrices")
    return np.kron(x, y)


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class ValidationReport:
    system_id: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def worst(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)


@dataclass
class MembershipResult:
    """Outcome of a convex-hull membership test with certificate.

    On membership, weights is a nonnegative vector summing to one that
    reconstructs the point within tolerance.  Otherwise separator is a
    functional f with f(x) > max_i f(g_i) by at least margin.
    """

    member: bool
    distance: float
    weights: np.ndarray | None = None
    separator: np.ndarray | None = None
    margin: float = 0.0


def convex_membership(x: np.ndarray, generators: np.ndarray,
                      tol: float = DEFAULT_TOL) -> MembershipResult:
    """Test x in conv{rows of generators} by linear feasibility.

    Solved as min_t over the weight simplex of the sup-norm gap
    |G w - x|_inf <= t; membership iff the optimum is <= tol.  On failure
    a second program produces a separating functional (bounded in sup
    norm) with a strictly positive margin.
    """
    x = np.asarray(x, dtype=float).ravel()
    gens = np.atleast_2d(np.asarray(generators, dtype=float))
    if gens.shape[1] != x.shape[0]:
        raise DimensionMismatch("generator dimension does not match point")
    n, d = gens.shape
    g_cols = gens.T  # (d, n)

    # phase 1: distance program over the simplex
    c = np.zeros(n + 1)
    c[-1] = 1.0
    a_ub = np.block([[g_cols, -np.ones((d, 1))], [-g_cols, -np.ones((d, 1))]])
    b_ub = np.concatenate([x, -x])
    a_eq = np.concatenate([np.ones(n), [0.0]])[None, :]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * n + [(0, None)], method="highs")
    if not res.success:
        raise ValidationFailure(f"membership LP failed: {res.message}")
    dist = float(res.x[-1])
    if dist <= tol:
        w = np.clip(res.x[:n], 0.0, None)
        w = w / w.sum()
        return MembershipResult(member=True, distance=dist, weights=w)

    # phase 2: separating functional, sup-norm bounded
    c2 = np.concatenate([-x, [1.0]])
    a_ub2 = np.hstack([gens, -np.ones((n, 1))])
    res2 = linprog(c2, A_ub=a_ub2, b_ub=np.zeros(n),
                   bounds=[(-1, 1)] * d + [(None, None)], method="highs")
    if not res2.success:
        raise ValidationFailure(f"separation LP failed: {res2.message}")
    f = res2.x[:d]
    margin = float(f @ x - np.max(gens @ f))
    return MembershipResult(member=False, distance=dist,
                            separator=f, margin=margin)


def _scaled_matches(rows: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best scalar fit of v against each row: coefficients and sup-norm residuals."""
    rows = np.atleast_2d(rows)
    norms = np.einsum("ij,ij->i", rows, rows)
    coefs = np.zeros(rows.shape[0])
    nz = norms > 0.0
    coefs[nz] = (rows[nz] @ v) / norms[nz]
    resid = np.max(np.abs(v[None, :] - coefs[:, None] * rows), axis=1)
    return coefs, resid


def in_state_cone(s: SystemSpec, v: np.ndarray, tol: float = DEFAULT_TOL,
                  subnormalized: bool = False) -> tuple[bool, float]:
    """Is v a valid (sub)normalized state of s?  Returns (ok, residual).

    Hull systems: membership in conv(state generators), with the zero
    vector adjoined when subnormalized.  Quantum systems: positivity of
    the encoded operator plus the right unit value.
    """
    v = np.asarray(v, dtype=float).ravel()
    if s.hilbert_dims is not None:
        lam = hermitian.min_eigenvalue(v, s.hilbert_dims)
        uval = float(s.unit_effect @ v)
        bad = max(0.0, -lam)
        if subnormalized:
            bad = max(bad, uval - 1.0 - 0.0, -uval)
        else:
            bad = max(bad, abs(uval - 1.0))
        return bad <= tol, bad
    gens = s.state_generators.T
    if subnormalized:
        gens = np.vstack([gens, np.zeros(s.dim)])
    # cheap exit: exact multiple of a single listed generator
    coefs, resid = _scaled_matches(s.state_generators.T, v)
    hit = resid <= tol
    if subnormalized:
        hit &= (coefs >= -tol) & (coefs <= 1.0 + tol)
    else:
        hit &= np.abs(coefs - 1.0) <= tol
    if np.any(hit):
        return True, 0.0
    r = convex_membership(v, gens, tol)
    return r.member, r.distance


def in_effect_set(s: SystemSpec, f: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Is f a valid effect of s (in the hull of its effect generators)?"""
    f = np.asarray(f, dtype=float).ravel()
    if s.hilbert_dims is not None:
        bad = hermitian.operator_interval_residual(f, s.hilbert_dims)
        return bad <= tol, bad
    coefs, resid = _scaled_matches(s.effect_generators, f)
    # a strict scaling c*g with c < 1 is a mixture of g with the zero
    # functional, so it is only conclusive when the list holds a zero row
    has_zero = bool(np.any(np.max(np.abs(s.effect_generators), axis=1) <= tol))
    hit = (resid <= tol) & (np.abs(coefs - 1.0) <= tol)
    if has_zero:
        hit |= (resid <= tol) & (coefs >= -tol) & (coefs <= 1.0 + tol)
    if np.any(hit):
        return True, 0.0
    r = convex_membership(f, s.effect_generators, tol)
    return r.member, r.distance


def validate_system(s: SystemSpec, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Structural checks: unit normalization, pairing range, complement
    closure of the effect list, and presence of the zero effect."""
    checks = []

    uvals = s.unit_effect @ s.state_generators
    res_u = float(np.max(np.abs(uvals - 1.0))) if uvals.size else 0.0
    checks.append(CheckResult("unit_normalization", res_u <= tol, res_u))

    table = s.effect_generators @ s.state_generators
    res_rng = float(max(0.0, -table.min(initial=0.0), table.max(initial=0.0) - 1.0))
    checks.append(CheckResult("pairing_range", res_rng <= tol, res_rng,
                              detail="effect(state) within [0,1] for all generators"))

    keys = {_vec_key(e) for e in s.effect_generators}
    comp_res = 0.0
    comp_ok = True
    comp_detail = ""
    for idx, e in enumerate(s.effects_iter()):
        comp = s.unit_effect - e
        if _vec_key(comp) in keys:
            continue
        ok, dist = in_effect_set(s, comp, tol)
        if not ok:
            comp_ok = False
            comp_res = max(comp_res, dist)
            if not comp_detail:
                comp_detail = f"complement of effect generator {idx} is not a valid effect"
    checks.append(CheckResult("complement_closure", comp_ok, comp_res, comp_detail))

    zero = np.zeros(s.dim)
    if _vec_key(zero) in keys:
        checks.append(CheckResult("zero_effect", True, 0.0))
    else:
        ok, dist = in_effect_set(s, zero, tol)
        checks.append(CheckResult("zero_effect", ok, 0.0 if ok else dist,
                                  "" if ok else "zero functional missing from effect hull"))
    return ValidationReport(s.id, checks)


def _complement_complete(effects: np.ndarray, unit: np.ndarray) -> np.ndarray:
    """Append u - e for every listed effect not already present."""
    rows = [np.asarray(e, dtype=float) for e in effects]
    seen = {_vec_key(e) for e in rows}
    for e in list(rows):
        comp = unit - e
        k = _vec_key(comp)
        if k not in seen:
            rows.append(comp)
            seen.add(k)
    return np.array(rows)


def compose_systems(c: CompositeSpec, tol: float = DEFAULT_TOL,
                    validate: bool = True) -> SystemSpec:
    """Build the bipartite composite from products plus declared extras.

    Product generators come first (left factor major), then extra states
    and extra effects, then complements of any effects still missing them.
    Extra generators are checked against the generated duals and rejected
    if any pairing leaves [0, 1].
    """
    a, b = c.part_a, c.part_b
    dim = a.dim * b.dim
    states = np.kron(a.state_generators, b.state_generators)
    effects = np.kron(a.effect_generators, b.effect_generators)
    unit = np.kron(a.unit_effect, b.unit_effect)

    es = np.asarray(c.extra_state_generators, dtype=float)
    if es.size:
        es = np.atleast_2d(es)
        if es.shape[1] != dim:
            raise DimensionMismatch(
                f"extra state generators have dim {es.shape[1]}, expected {dim}")
        vals = effects @ es.T
        uvals = unit @ es.T
        if np.any(vals < -tol) or np.any(vals > 1.0 + tol) or np.any(np.abs(uvals - 1.0) > tol):
            worst = float(max(np.max(vals), np.max(1.0 - vals)))
            raise ValidationFailure(
                f"extra state generator violates the [0,1] range against product "
                f"effects (worst value {worst})")
        states = np.hstack([states, es.T])

    ee = np.asarray(c.extra_effect_generators, dtype=float)
    if ee.size:
        ee = np.atleast_2d(ee)
        if ee.shape[1] != dim:
            raise DimensionMismatch(
                f"extra effect generators have dim {ee.shape[1]}, expected {dim}")
        vals = ee @ states
        if np.any(vals < -tol) or np.any(vals > 1.0 + tol):
            raise ValidationFailure(
                "extra effect generator violates the [0,1] range on composite states")
        effects = np.vstack([effects, ee])

    effects = _complement_complete(effects, unit)

    hd = None
    if a.hilbert_dims is not None and b.hilbert_dims is not None:
        hd = a.hilbert_dims + b.hilbert_dims

    out = SystemSpec(id=c.id, dim=dim, state_generators=states,
                     effect_generators=effects, unit_effect=unit,
                     hilbert_dims=hd, parts=(a, b))
    if validate:
        rep = validate_system(out, tol)
        if not rep.passed:
            bad = [ck.name for ck in rep.checks if not ck.passed]
            raise ValidationFailure(f"composite {out.id} failed validation: {bad}")
    return out


@dataclass
class SteeringReport:
    system_id: str
    n_state_checks: int
    n_effect_checks: int
    max_state_residual: float
    max_effect_residual: float
    passed: bool


def _steered_marginals(omega: np.ndarray, dim_a: int, dim_b: int):
    w = omega.reshape(dim_a, dim_b)
    return w  # contract with effect on either side


def check_steering_closure(world: SystemSpec, tol: float = DEFAULT_TOL,
                           invariance_projectors: tuple | None = None) -> SteeringReport:
    """Steered marginals of joint states land in the local state hulls.

    For every joint state generator omega and local effect e the vector
    (id (x) e)(omega) must be a subnormalized local state, i.e. a member
    of conv[local states U {0}]; symmetrically for effects steered by
    local states.  For twirled quantum worlds membership in the invariant
    positive cone is tested as positivity plus invariance, with the
    projectors supplied by the caller.
    """
    if world.parts is None:
        raise InconsistentWorlds("steering closure needs a composite with parts")
    a, b = world.parts
    if a.dim * b.dim != world.dim:
        raise InconsistentWorlds("parts do not multiply up to the composite dim")

    max_sres = 0.0
    n_schecks = 0
    proj_a = proj_b = None
    if invariance_projectors is not None:
        proj_a, proj_b = invariance_projectors

    for omega in world.states_iter():
        w = omega.reshape(a.dim, b.dim)
        # steer A by B-side effects, and B by A-side effects
        marg_a = w @ b.effect_generators.T  # (dim_a, n_eff_b)
        marg_b = (a.effect_generators @ w).T  # (dim_b, n_eff_a) columns on B
        for part, proj, margs in ((a, proj_a, marg_a.T), (b, proj_b, marg_b.T)):
            for m in margs:
                n_schecks += 1
                ok, res = _subnorm_state_check(part, m, proj, tol)
                if not ok:
                    max_sres = max(max_sres, res)

    max_eres = 0.0
    n_echecks = 0
    for e in world.effects_iter():
        emat = e.reshape(a.dim, b.dim)
        steered_on_a = emat @ b.state_generators  # columns: effects on A
        steered_on_b = (emat.T @ a.state_generators)
        for part, steered in ((a, steered_on_a.T), (b, steered_on_b.T)):
            for f in steered:
                n_echecks += 1
                ok, res = in_effect_set(part, f, tol)
                if not ok:
                    max_eres = max(max_eres, res)

    passed = max_sres <= tol and max_eres <= tol
    return SteeringReport(world.id, n_schecks, n_echecks, max_sres, max_eres, passed)


def _subnorm_state_check(part: SystemSpec, v: np.ndarray, proj: np.ndarray | None,
                         tol: float) -> tuple[bool, float]:
    if part.hilbert_dims is not None:
        lam = hermitian.min_eigenvalue(v, part.hilbert_dims)
        uval = float(part.unit_effect @ v)
        bad = max(0.0, -lam, uval - 1.0, -uval)
        if proj is not None:
            bad = max(bad, float(np.max(np.abs(proj @ v - v))))
        return bad <= tol, bad
    return in_state_cone(part, v, tol, subnormalized=True)


def numerical_rank(m: np.ndarray, rank_tol: float = 1e-8) -> int:
    """Singular values above rank_tol times the largest one."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rank_tol * sv[0]))


def orthonormal_range(m: np.ndarray, rank_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (columns) of the column span of m."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    u, sv, _ = np.linalg.svd(m, full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((m.shape[0], 0))
    k = int(np.sum(sv > rank_tol * sv[0]))
    return u[:, :k]
