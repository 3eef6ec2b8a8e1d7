"""End-to-end analysis of a symmetric world.

run_analysis drives the whole sequence on a WorldBundle: validate the
systems, exercise the averaging laws, build the twirled worlds, count
invariant parameters, decide the locality question by both routes, build
the witness pairs, and check completeness, steering closure and (for
quantum worlds with a known sector structure) the block form of the
invariants.  The result is a plain-dict report with a canonical byte
serialization, identical across repeated runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .analysis import (
    LocalityVerdict,
    TwirledWorld,
    build_twirled_world,
    check_tomographic_completeness,
    count_parameters,
    find_separating_invariant_effect,
    locality_verdict,
    rank_stability,
    sector_block_residual,
    transformation_pair_witness,
    ubiquity_witnesses,
    verify_local_indistinguishability,
)
from .catalog import WorldBundle, bosonic_parameter_counts
from .core import (
    DEFAULT_TOL,
    SteeringReport,
    SystemSpec,
    check_steering_closure,
    validate_system,
)
from .errors import NotSeparable, TrivialAction
from .hermitian import unvectorize_dims
from .model import canonical_bytes
from .symmetry import LawReport, verify_twirl_laws

REPORT_SCHEMA = "twirlab-report/1"


@dataclass
class Options:
    tol: float = DEFAULT_TOL
    rank_tol: float = 1e-8
    seed: int = 42
    trials: int = 200

    def as_dict(self) -> dict:
        return {"tol": self.tol, "rank_tol": self.rank_tol,
                "seed": self.seed, "trials": self.trials}


@dataclass
class AnalysisReport:
    data: dict
    bundle: WorldBundle
    twirled: dict = field(default_factory=dict)  # system id -> TwirledWorld
    laws: LawReport | None = None
    verdict: LocalityVerdict | None = None

    def to_bytes(self) -> bytes:
        return canonical_bytes(self.data)


def _validation_dict(rep) -> dict:
    return {
        "passed": rep.passed,
        "worst_residual": float(rep.worst()),
        "checks": [{"name": c.name, "passed": c.passed,
                    "residual": float(c.residual)} for c in rep.checks],
    }


def _laws_dict(rep: LawReport) -> dict:
    return {
        "trials": rep.trials,
        "left_invariance": float(rep.left_invariance),
        "right_invariance": float(rep.right_invariance),
        "idempotence": float(rep.idempotence),
        "consistency": {k: float(v) for k, v in sorted(rep.consistency.items())},
        "max_residual": float(rep.max_residual),
    }


def _steering_dict(rep: SteeringReport) -> dict:
    return {
        "passed": rep.passed,
        "state_checks": rep.n_state_checks,
        "effect_checks": rep.n_effect_checks,
        "max_state_residual": float(rep.max_state_residual),
        "max_effect_residual": float(rep.max_effect_residual),
    }


def _first_moved_state(s: SystemSpec, action, tol: float):
    """First listed state generator displaced by some group element."""
    for i in range(s.n_states):
        v = s.state_generators[:, i]
        for m in action.elements:
            if float(np.max(np.abs(m @ v - v))) > tol:
                return v, i
    return None, -1


def _twirled_composite_view(twab: TwirledWorld, twa: TwirledWorld,
                            twb: TwirledWorld) -> SystemSpec:
    """The twirled composite with the twirled locals as its parts.

    Steered marginals of invariant joint states must be (subnormalized)
    invariant local states, so steering closure of the twirled world is
    judged against the twirled local systems, not the base ones.
    """
    w = twab.world
    return SystemSpec(id=w.id, dim=w.dim, state_generators=w.state_generators,
                      effect_generators=w.effect_generators,
                      unit_effect=w.unit_effect, hilbert_dims=w.hilbert_dims,
                      parts=(twa.world, twb.world))


def _sector_residuals(bundle: WorldBundle, twirled: dict) -> dict:
    out = {}
    for sid, oracle in bundle.sectors.items():
        tw = twirled.get(sid)
        if tw is None:
            continue
        worst = 0.0
        gens = tw.world.state_generators
        for i in range(gens.shape[1]):
            op = unvectorize_dims(gens[:, i], oracle.hilbert_dims)
            worst = max(worst, sector_block_residual(
                op, oracle.projectors, oracle.scalar_sectors))
        effs = tw.world.effect_generators
        for i in range(effs.shape[0]):
            op = unvectorize_dims(effs[i], oracle.hilbert_dims)
            worst = max(worst, sector_block_residual(
                op, oracle.projectors, oracle.scalar_sectors))
        out[sid] = float(worst)
    return out


def run_analysis(bundle: WorldBundle, options: Options | None = None,
                 model_digest: str | None = None) -> AnalysisReport:
    """Full verification and analysis pass over one world."""
    opt = options or Options()
    tol, rank_tol = opt.tol, opt.rank_tol

    data = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "model": {"name": bundle.name, "kind": bundle.kind,
                  "params": dict(bundle.params)},
        "options": opt.as_dict(),
    }
    if model_digest is not None:
        data["model"]["digest"] = model_digest
    if bundle.notes:
        data["model"]["notes"] = bundle.notes

    # 1. base systems are valid worlds
    systems = {}
    for part in bundle.parts:
        systems[part.id] = {
            "dim": part.dim, "n_states": part.n_states, "n_effects": part.n_effects,
            "validation": _validation_dict(validate_system(part, tol)),
        }
    if bundle.bipartite:
        comp = bundle.composite
        systems[comp.id] = {
            "dim": comp.dim, "n_states": comp.n_states, "n_effects": comp.n_effects,
            "validation": _validation_dict(validate_system(comp, tol)),
        }
    data["systems"] = systems

    # 2. the averaging identities hold on random probes
    laws = verify_twirl_laws(list(bundle.part_actions), trials=opt.trials,
                             seed=opt.seed, tol=tol)
    data["twirl_laws"] = _laws_dict(laws)

    # 3. twirled worlds
    twirled = {}
    for part, action in zip(bundle.parts, bundle.part_actions):
        twirled[part.id] = build_twirled_world(part, action, tol, rank_tol)
    if bundle.bipartite:
        twirled[bundle.composite.id] = build_twirled_world(
            bundle.composite, bundle.collective, tol, rank_tol)

    tw_section = {}
    for sid, tw in twirled.items():
        comp_rep = check_tomographic_completeness(tw, rank_tol)
        tw_section[sid] = {
            "K": tw.K,
            "fixed_point_residual": float(tw.fixed_point_residual),
            "rank_stable": rank_stability(tw),
            "validation": _validation_dict(tw.validation),
            "completeness": {
                "K": comp_rep.K, "invariant_effect_rank": comp_rep.k_effects,
                "pairing_rank": comp_rep.pairing_rank, "passed": comp_rep.passed,
            },
        }
    data["twirled"] = tw_section

    report = AnalysisReport(data=data, bundle=bundle, twirled=twirled, laws=laws)

    if not bundle.bipartite:
        sec = _sector_residuals(bundle, twirled)
        if sec:
            data["sector_blocks"] = sec
        return report

    part_a, part_b = bundle.parts
    twa, twb = twirled[part_a.id], twirled[part_b.id]
    twab = twirled[bundle.composite.id]

    # 4. parameter counting and the locality verdict, both routes
    verdict = locality_verdict(twa, twb, twab, tol, rank_tol)
    if verdict.witness is not None:
        verdict.witness.product_effect_discrepancy = verify_local_indistinguishability(
            verdict.witness.state_1, verdict.witness.state_2, twa, twb)
    counts = {
        "K_A": verdict.k_a, "K_B": verdict.k_b, "K_AB": verdict.k_ab,
        "K_A_times_K_B": verdict.k_a * verdict.k_b,
    }
    if bundle.name == "bosonic_u1" and bundle.params.get("modes") == 2:
        counts["occupation_sectors"] = bosonic_parameter_counts(
            int(bundle.params["N"]), rank_tol)
    data["counts"] = counts

    loc = {
        "criterion_fails_locality": verdict.criterion_fails_locality,
        "pairing_rank": verdict.pairing_rank,
        "direct_check_fails": verdict.direct_check_fails,
        "methods_agree": verdict.methods_agree,
    }
    if verdict.witness is not None:
        w = verdict.witness
        loc["witness"] = {
            "state_1": w.state_1.tolist(),
            "state_2": w.state_2.tolist(),
            "product_effect_discrepancy": float(w.product_effect_discrepancy),
            "separating_gap": float(w.separating_gap),
            "separating_index": w.separating_index,
            "separating_effect": w.separating_effect.tolist(),
        }
    data["locality"] = loc
    report.verdict = verdict

    # 5. the two canonical invariant states that share local statistics
    data["ubiquity"] = _ubiquity_section(bundle, twa, twb, twab, tol)

    # 6. steering closure of the twirled composite
    view = _twirled_composite_view(twab, twa, twb)
    projs = None
    if view.hilbert_dims is not None:
        projs = (twa.projector.matrix, twb.projector.matrix)
    data["steering"] = {"twirled": _steering_dict(
        check_steering_closure(view, tol, invariance_projectors=projs))}

    # 7. known sector structure, when the recipe ships one
    sec = _sector_residuals(bundle, twirled)
    if sec:
        data["sector_blocks"] = sec
    return report


def _ubiquity_section(bundle: WorldBundle, twa: TwirledWorld, twb: TwirledWorld,
                      twab: TwirledWorld, tol: float) -> dict:
    part_a, part_b = bundle.parts
    act_a, act_b = bundle.part_actions
    seed_a, idx_a = _first_moved_state(part_a, act_a, tol)
    seed_b, idx_b = _first_moved_state(part_b, act_b, tol)
    if seed_a is None or seed_b is None:
        return {"trivial_action": True}

    try:
        uw = ubiquity_witnesses(act_a, seed_a, tol, b=act_b, seed_b=seed_b)
    except TrivialAction:
        return {"trivial_action": True}

    out = {
        "trivial_action": False,
        "seed_state_indices": [idx_a, idx_b],
        "moving_element": uw.moving_label,
        "separation": float(uw.separation),
        "local_indistinguishability": float(verify_local_indistinguishability(
            uw.correlated_state, uw.product_state, twa, twb)),
        "product_state": uw.product_state.tolist(),
        "correlated_state": uw.correlated_state.tolist(),
    }
    try:
        eff, gap, idx = find_separating_invariant_effect(
            uw.correlated_state, uw.product_state,
            twab.base.effect_generators, twab.projector, tol)
        out["separating_gap"] = float(gap)
        out["separating_index"] = idx
        out["separating_effect"] = eff.tolist()
        out["separated"] = True
    except NotSeparable:
        out["separated"] = False

    tp = transformation_pair_witness(twa, twb, uw.correlated_state, uw.product_state)
    out["transformation_pair"] = {
        "local_residual": float(tp.local_residual),
        "global_gap": float(tp.global_gap),
        "maps_to_product_residual": float(tp.maps_to_product_residual),
    }
    return out


# ------------------------------------------------------------ text rendering


def _flag(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def render_text(data: dict) -> str:
    """Terminal summary of a report dict, one line per verified fact."""
    lines = []
    model = data.get("model", {})
    params = model.get("params") or {}
    ptxt = ", ".join(f"{k}={v}" for k, v in sorted(params.items()))
    head = f"world: {model.get('name', '?')}"
    if ptxt:
        head += f" ({ptxt})"
    lines.append(head)
    if model.get("notes"):
        lines.append(f"  note: {model['notes']}")
    if "digest" in model:
        lines.append(f"  model digest: {model['digest']}")

    for sid, sec in sorted(data.get("systems", {}).items()):
        v = sec["validation"]
        lines.append(f"[{_flag(v['passed'])}] system {sid}: valid world "
                     f"(dim {sec['dim']}, worst residual {v['worst_residual']:.2e})")

    laws = data.get("twirl_laws")
    if laws:
        lines.append(f"[{_flag(laws['max_residual'] <= data['options']['tol'])}] "
                     f"averaging laws on {laws['trials']} probes "
                     f"(max residual {laws['max_residual']:.2e})")

    for sid, sec in sorted(data.get("twirled", {}).items()):
        ok = sec["validation"]["passed"] and sec["completeness"]["passed"]
        lines.append(f"[{_flag(ok)}] twirled {sid}: valid world, K = {sec['K']}, "
                     f"invariant tomography "
                     f"{'complete' if sec['completeness']['passed'] else 'INCOMPLETE'}"
                     f"{'' if sec['rank_stable'] else ', RANK UNSTABLE'}")

    counts = data.get("counts")
    if counts:
        lines.append(f"  parameters: K_A = {counts['K_A']}, K_B = {counts['K_B']}, "
                     f"K_AB = {counts['K_AB']} vs K_A*K_B = {counts['K_A_times_K_B']}")
        occ = counts.get("occupation_sectors")
        if occ:
            lines.append(f"  occupation sectors: restricted {occ['restricted']} "
                         f"(formula {occ['restricted_formula']}), "
                         f"full {occ['full']} (formula {occ['full_formula']})")

    loc = data.get("locality")
    if loc:
        fails = loc["criterion_fails_locality"]
        lines.append(f"[{_flag(loc['methods_agree'])}] locality verdict: "
                     f"{'FAILS tomographic locality' if fails else 'locally tomographic'} "
                     f"(counting and direct pairing agree: {loc['methods_agree']})")
        w = loc.get("witness")
        if w:
            lines.append(f"  witness pair: agree on products of invariant local "
                         f"effects to {w['product_effect_discrepancy']:.2e}, "
                         f"separated by invariant effect {w['separating_index']} "
                         f"with gap {w['separating_gap']:.6g}")

    ub = data.get("ubiquity")
    if ub:
        if ub.get("trivial_action"):
            lines.append("[skip] invariant-pair construction: the action fixes "
                         "every listed state")
        else:
            lines.append(f"  invariant pair from seed states {ub['seed_state_indices']} "
                         f"(moved by element {ub['moving_element']!r}): "
                         f"separation {ub['separation']:.6g}, local statistics agree "
                         f"to {ub['local_indistinguishability']:.2e}")
            if ub.get("separated"):
                lines.append(f"[pass] invariant effect {ub['separating_index']} "
                             f"separates the pair (gap {ub['separating_gap']:.6g})")
            tp = ub.get("transformation_pair")
            if tp:
                lines.append(f"  transformation pair: local action within "
                             f"{tp['local_residual']:.2e} of the identity, joint gap "
                             f"{tp['global_gap']:.6g}, lands on the product state "
                             f"to {tp['maps_to_product_residual']:.2e}")

    st = data.get("steering", {}).get("twirled")
    if st:
        lines.append(f"[{_flag(st['passed'])}] steering closure of the twirled "
                     f"composite ({st['state_checks']} marginal checks, "
                     f"{st['effect_checks']} steered-effect checks)")

    sec = data.get("sector_blocks")
    if sec:
        worst = max(sec.values())
        lines.append(f"[{_flag(worst <= 1e-9)}] invariants respect the known "
                     f"sector blocks (worst off-block residual {worst:.2e})")
    return "\n".join(lines)
