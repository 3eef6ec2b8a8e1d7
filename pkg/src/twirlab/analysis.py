"""Twirled worlds and the certification of tomographic-locality failure.

Restricting a world to its symmetric (group-averaged) states, effects and
transformations yields another valid world.  The analysis here counts the
parameters of the restricted worlds (numerical rank of the averaged
generator matrices) and compares K_AB with K_A * K_B: a strict excess
certifies that joint invariant states are not fixed by local invariant
statistics.  Alongside the counting criterion the definitional check is
run directly, and explicit witness pairs are produced: two invariant
joint states that agree on every product of invariant local effects yet
are separated by an invariant joint effect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import (
    DEFAULT_TOL,
    SystemSpec,
    ValidationReport,
    in_state_cone,
    numerical_rank,
    orthonormal_range,
    validate_system,
)
from .errors import (
    ActionNotPhysical,
    DimensionMismatch,
    InconsistentWorlds,
    NotSeparable,
    TrivialAction,
)
from .symmetry import GroupAction, TwirlProjector, collective_action, twirl_projector

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class TwirledWorld:
    """A system restricted to its invariant states and effects."""

    base: SystemSpec
    action: GroupAction
    projector: TwirlProjector
    world: SystemSpec
    invariant_state_basis: np.ndarray   # (dim, K) orthonormal columns
    invariant_effect_basis: np.ndarray  # (K_eff, dim) orthonormal rows
    K: int
    fixed_point_residual: float
    validation: ValidationReport


def build_twirled_world(s: SystemSpec, a: GroupAction, tol: float = DEFAULT_TOL,
                        rank_tol: float = DEFAULT_RANK_TOL) -> TwirledWorld:
    """Average every generator of s over the action and repackage.

    Each element must be a physical transformation of s: it preserves the
    unit effect and maps every state generator back into the state cone.
    The averaged generator lists are re-validated as a system in their own
    right; the unit effect is untouched by the average, so complements of
    averaged effects are averages of complements and closure survives.
    """
    if a.dim != s.dim:
        raise DimensionMismatch(
            f"action dimension {a.dim} does not match system {s.id} ({s.dim})")

    for lab, m in zip(a.labels, a.elements):
        ur = float(np.max(np.abs(s.unit_effect @ m - s.unit_effect)))
        if ur > tol:
            raise ActionNotPhysical(
                f"element {lab!r} moves the unit effect (residual {ur:.3e})")
    gen_keys = {_round_key(g) for g in s.state_generators.T}
    for lab, m in zip(a.labels, a.elements):
        moved = m @ s.state_generators
        for i in range(moved.shape[1]):
            v = moved[:, i]
            if _round_key(v) in gen_keys:
                continue
            ok, res = in_state_cone(s, v, tol)
            if not ok:
                raise ActionNotPhysical(
                    f"element {lab!r} maps state generator {i} outside the state "
                    f"space (residual {res:.3e})")

    p = twirl_projector(a, tol)
    tw_states = p.matrix @ s.state_generators
    tw_effects = s.effect_generators @ p.matrix

    fp = float(np.max(np.abs(p.matrix @ tw_states - tw_states))) if tw_states.size else 0.0

    world = SystemSpec(id=s.id + "~", dim=s.dim, state_generators=tw_states,
                       effect_generators=tw_effects, unit_effect=s.unit_effect,
                       hilbert_dims=s.hilbert_dims, parts=s.parts)
    rep = validate_system(world, tol)

    sbasis = orthonormal_range(tw_states, rank_tol)
    ebasis = orthonormal_range(tw_effects.T, rank_tol).T
    return TwirledWorld(base=s, action=a, projector=p, world=world,
                        invariant_state_basis=sbasis, invariant_effect_basis=ebasis,
                        K=sbasis.shape[1], fixed_point_residual=fp, validation=rep)


def _round_key(v: np.ndarray) -> bytes:
    r = np.round(np.asarray(v, dtype=float), 10)
    r[r == 0.0] = 0.0
    return r.tobytes()


def count_parameters(w: TwirledWorld, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of independent parameters of the invariant state family."""
    return numerical_rank(w.world.state_generators, rank_tol)


def rank_stability(w: TwirledWorld, thresholds=(1e-10, 1e-9, 1e-8, 1e-7)) -> bool:
    counts = {count_parameters(w, t) for t in thresholds}
    return len(counts) == 1


@dataclass
class Witness:
    state_1: np.ndarray
    state_2: np.ndarray
    product_effect_discrepancy: float
    separating_effect: np.ndarray
    separating_gap: float
    separating_index: int


@dataclass
class LocalityVerdict:
    k_a: int
    k_b: int
    k_ab: int
    criterion_fails_locality: bool
    pairing_rank: int
    direct_check_fails: bool
    methods_agree: bool
    witness: Witness | None


def locality_verdict(wa: TwirledWorld, wb: TwirledWorld, wab: TwirledWorld,
                     tol: float = DEFAULT_TOL,
                     rank_tol: float = DEFAULT_RANK_TOL) -> LocalityVerdict:
    """Parameter-counting criterion plus the direct definitional check.

    The direct check pairs the span of products of invariant local
    effects against the invariant joint states; a nontrivial null space
    means some invariant state difference is invisible to all local
    invariant statistics, and is turned into an explicit witness pair.
    """
    if wab.world.dim != wa.world.dim * wb.world.dim:
        raise InconsistentWorlds("joint world is not the composite of the parts")
    ka = count_parameters(wa, rank_tol)
    kb = count_parameters(wb, rank_tol)
    kab = count_parameters(wab, rank_tol)
    criterion = kab > ka * kb

    fa = wa.invariant_effect_basis
    fb = wb.invariant_effect_basis
    sab = wab.invariant_state_basis
    prod_effects = np.kron(fa, fb)  # rows span the invariant product effects
    pairing = prod_effects @ sab
    prank = numerical_rank(pairing, rank_tol)
    direct_fails = prank < kab

    witness = None
    if direct_fails:
        witness = _build_witness(wab, pairing, sab, tol)
    return LocalityVerdict(k_a=ka, k_b=kb, k_ab=kab,
                           criterion_fails_locality=criterion,
                           pairing_rank=prank, direct_check_fails=direct_fails,
                           methods_agree=(criterion == direct_fails),
                           witness=witness)


def _build_witness(wab: TwirledWorld, pairing: np.ndarray, sab: np.ndarray,
                   tol: float) -> Witness:
    # invisible direction: right singular vector of the pairing with the
    # smallest singular value, lifted back to the joint space
    _, _, vt = np.linalg.svd(pairing)
    direction = sab @ vt[-1]
    direction = direction / np.max(np.abs(direction))

    gens = wab.world.state_generators
    center = gens.mean(axis=1)
    dplus = _max_step(center, direction, gens)
    dminus = _max_step(center, -direction, gens)
    delta = 0.5 * min(dplus, dminus)
    if delta <= tol:
        raise NotSeparable(
            "invariant state family is degenerate along the invisible direction")
    s1 = center + delta * direction
    s2 = center - delta * direction

    sep = find_separating_invariant_effect(
        s1, s2, wab.base.effect_generators, wab.projector, tol)
    # discrepancy on products of invariant local effects is filled in by the
    # caller via verify_local_indistinguishability
    return Witness(state_1=s1, state_2=s2, product_effect_discrepancy=float("nan"),
                   separating_effect=sep[0], separating_gap=sep[1],
                   separating_index=sep[2])


def _max_step(center: np.ndarray, direction: np.ndarray, gens: np.ndarray) -> float:
    """Largest t with center + t * direction still in conv(columns of gens)."""
    d, n = gens.shape
    # variables: weights (n), t; maximize t subject to G w - t*dir = center
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_eq = np.hstack([gens, -direction[:, None]])
    a_eq = np.vstack([a_eq, np.concatenate([np.ones(n), [0.0]])])
    b_eq = np.concatenate([center, [1.0]])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * n + [(0, None)], method="highs")
    if not res.success:
        return 0.0
    return float(res.x[-1])


def verify_local_indistinguishability(s1: np.ndarray, s2: np.ndarray,
                                      wa: TwirledWorld, wb: TwirledWorld) -> float:
    """Max pairing of s1 - s2 against products of invariant local effects.

    Evaluated on orthonormal bases of the invariant local effect spans;
    by bilinearity a zero here is a zero on all products of invariant
    local effects.
    """
    fa = wa.invariant_effect_basis
    fb = wb.invariant_effect_basis
    delta = (np.asarray(s1, dtype=float) - np.asarray(s2, dtype=float)).reshape(
        wa.world.dim, wb.world.dim)
    table = fa @ delta @ fb.T
    return float(np.max(np.abs(table))) if table.size else 0.0


def find_separating_invariant_effect(s1: np.ndarray, s2: np.ndarray,
                                     base_effects: np.ndarray, p: TwirlProjector,
                                     tol: float = DEFAULT_TOL):
    """Invariant effect with the largest gap between two invariant states.

    Averages every base effect generator and scans the pairings with
    s1 - s2, returning the first effect achieving the maximal absolute
    gap.  Raises NotSeparable when even the best gap is below tolerance.
    """
    inv = np.asarray(base_effects, dtype=float) @ p.matrix
    gaps = inv @ (np.asarray(s1, dtype=float) - np.asarray(s2, dtype=float))
    idx = int(np.argmax(np.abs(gaps)))
    gap = float(gaps[idx])
    if abs(gap) <= tol:
        raise NotSeparable(f"no invariant effect separates the pair (best {gap:.3e})")
    return inv[idx], gap, idx


@dataclass
class UbiquityWitness:
    seed: np.ndarray
    moving_label: str
    product_state: np.ndarray     # local averages applied factor-wise
    correlated_state: np.ndarray  # collective average of the product seed
    separation: float             # sup-norm distance between the two


def ubiquity_witnesses(a: GroupAction, seed: np.ndarray, tol: float = DEFAULT_TOL,
                       b: GroupAction | None = None,
                       seed_b: np.ndarray | None = None) -> UbiquityWitness:
    """Build the canonical pair of distinct invariant joint states.

    With a seed moved by at least one element, the factor-wise average of
    seed (x) seed and the collective average of the same product differ:
    the first carries no correlation, the second remembers that both
    factors were displaced together.  A second action/seed may be given
    when the two sides of the split are of different shapes.
    """
    seed = np.asarray(seed, dtype=float).ravel()
    if b is None:
        b = a
    if seed_b is None:
        seed_b = seed
    seed_b = np.asarray(seed_b, dtype=float).ravel()

    moving = None
    for lab, m in zip(a.labels, a.elements):
        if np.max(np.abs(m @ seed - seed)) > tol:
            moving = lab
            break
    if moving is None:
        raise TrivialAction("every element fixes the seed state")

    pa = twirl_projector(a, tol)
    pb = twirl_projector(b, tol)
    joint = collective_action([a, b], tol)
    pj = twirl_projector(joint, tol)

    prod = np.kron(pa.matrix @ seed, pb.matrix @ seed_b)
    corr = pj.matrix @ np.kron(seed, seed_b)
    sep = float(np.max(np.abs(corr - prod)))
    return UbiquityWitness(seed=seed, moving_label=moving, product_state=prod,
                           correlated_state=corr, separation=sep)


@dataclass
class CompletenessReport:
    system_id: str
    K: int
    k_effects: int
    pairing_rank: int
    passed: bool


def check_tomographic_completeness(w: TwirledWorld,
                                   rank_tol: float = DEFAULT_RANK_TOL) -> CompletenessReport:
    """Invariant effects fix invariant states, and vice versa.

    The pairing of the invariant effect basis with the invariant state
    basis must have full rank on both sides: no invariant state
    difference is invisible to invariant effects, and no invariant effect
    difference is invisible on invariant states.
    """
    pairing = w.invariant_effect_basis @ w.invariant_state_basis
    r = numerical_rank(pairing, rank_tol)
    ke = w.invariant_effect_basis.shape[0]
    return CompletenessReport(system_id=w.world.id, K=w.K, k_effects=ke,
                              pairing_rank=r, passed=(r == w.K and r == ke))


@dataclass
class TransformationPairWitness:
    local_residual: float        # identity vs average on invariant local states
    global_gap: float            # the two maps disagree on the correlated state
    maps_to_product_residual: float


def transformation_pair_witness(wa: TwirledWorld, wb: TwirledWorld,
                                corr: np.ndarray, prod: np.ndarray) -> TransformationPairWitness:
    """Identity and local average agree locally yet differ on a joint state.

    On every invariant state of the first part the local average acts as
    the identity; applied to one side of the correlated invariant state
    it nevertheless produces the uncorrelated product state.
    """
    pa = wa.projector.matrix
    sb = wa.invariant_state_basis
    local = float(np.max(np.abs(pa @ sb - sb))) if sb.size else 0.0
    lifted = np.kron(pa, np.eye(wb.world.dim))
    mapped = lifted @ np.asarray(corr, dtype=float)
    gap = float(np.max(np.abs(mapped - np.asarray(corr, dtype=float))))
    to_prod = float(np.max(np.abs(mapped - np.asarray(prod, dtype=float))))
    return TransformationPairWitness(local_residual=local, global_gap=gap,
                                     maps_to_product_residual=to_prod)


def sector_block_residual(op: np.ndarray, projectors: list[np.ndarray],
                          scalar_sectors: list[bool] | None = None) -> float:
    """Deviation of an operator from the known invariant block form.

    projectors: orthogonal projectors onto the symmetry sectors of the
    underlying Hilbert space.  Cross-sector blocks of an invariant
    operator must vanish; sectors flagged in scalar_sectors additionally
    force the within-sector block to be a multiple of the projector
    (irreducible sector with trivial multiplicity).
    """
    res = 0.0
    for i, pi in enumerate(projectors):
        for j, pj in enumerate(projectors):
            if i == j:
                continue
            res = max(res, float(np.max(np.abs(pi @ op @ pj))))
    if scalar_sectors:
        for flag, pi in zip(scalar_sectors, projectors):
            if not flag:
                continue
            d = np.trace(pi).real
            if d <= 0:
                continue
            c = np.trace(pi @ op).real / d
            res = max(res, float(np.max(np.abs(pi @ op @ pi - c * pi))))
    return res
