"""Independent oracles the tests check the library against.

Everything here is deliberately written without the library's own linear
algebra helpers: exact rational rank by Gaussian elimination, group
averages in the complex operator picture, and the 24-element qubit
subgroup generated from scratch by breadth-first closure.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def exact_rank(rows) -> int:
    """Rank over the rationals by Gaussian elimination, no tolerance anywhere.

    rows: iterable of vectors whose entries are Fractions or floats that
    are exact binary rationals (integers, halves, quarters).
    """
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return 0
    rank = 0
    for col in range(len(mat[0])):
        pivot = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        mat[rank] = [x / pv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def brute_force_invariant_rank(state_columns: np.ndarray, elements) -> int:
    """Exact rank of the group-averaged state list.

    The averaging itself is redone here in Fraction arithmetic, so the
    result is untouched by floating point; requires exactly representable
    states and group elements.
    """
    mats = [[[Fraction(float(x)) for x in row] for row in np.asarray(m)]
            for m in elements]
    n = Fraction(len(mats))
    rows = []
    for i in range(state_columns.shape[1]):
        v = [Fraction(float(x)) for x in state_columns[:, i]]
        acc = [Fraction(0)] * len(v)
        for m in mats:
            for r in range(len(v)):
                acc[r] += sum(m[r][c] * v[c] for c in range(len(v)))
        rows.append([a / n for a in acc])
    return exact_rank(rows)


# --------------------------------------------------- qubit subgroup by BFS

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)

_PAULI = [np.array([[1, 0], [0, 1]], dtype=complex),
          np.array([[0, 1], [1, 0]], dtype=complex),
          np.array([[0, -1j], [1j, 0]], dtype=complex),
          np.array([[1, 0], [0, -1]], dtype=complex)]


def _adjoint(u: np.ndarray) -> np.ndarray:
    """4x4 real action of conjugation by u on the Pauli coordinates."""
    out = np.zeros((4, 4))
    for b in range(4):
        img = u @ _PAULI[b] @ u.conj().T
        for a in range(4):
            out[a, b] = (np.trace(_PAULI[a].conj().T @ img) / 2.0).real
    return out


def _phase_canonical(u: np.ndarray) -> np.ndarray:
    """Divide out the global phase: pivot entry made positive real.

    The pivot is the first entry within 1e-6 of the largest modulus, so
    modulus ties are broken by position, not by float noise.
    """
    flat = u.ravel()
    mods = np.abs(flat)
    piv = flat[int(np.argmax(mods >= mods.max() - 1e-6))]
    return u * (abs(piv) / piv)


def qubit_symmetry_group_unitaries() -> list[np.ndarray]:
    """The group generated by H and S, modulo global phase, by closure.

    Breadth-first search over words in the generators with phase-fixed
    representatives; closes at 24 elements.
    """
    gens = [_H, _S]
    eye = np.eye(2, dtype=complex)

    def key(u):
        # + 0.0 flushes negative zeros so byte keys are well defined
        return (np.round(u, 6) + 0.0).tobytes()

    seen = {key(eye): eye}
    frontier = [eye]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                c = _phase_canonical(g @ m)
                k = key(c)
                if k not in seen:
                    seen[k] = c
                    nxt.append(c)
        frontier = nxt
    out = list(seen.values())
    assert len(out) == 24, f"qubit subgroup closure found {len(out)} elements"
    return out


def qubit_symmetry_group_adjoint() -> list[np.ndarray]:
    """Adjoint (Pauli-coordinate) images of the H,S group: 24 rotations.

    Entries are snapped to exact integers; the snap residual is asserted
    tiny, so the returned matrices are exact signed permutations.
    """
    out = []
    for u in qubit_symmetry_group_unitaries():
        m = _adjoint(u)
        snapped = np.round(m) + 0.0
        assert np.max(np.abs(m - snapped)) < 1e-9
        out.append(snapped)
    return out


def unitary_group_fixed_space_dim(unitaries, n_factors: int) -> int:
    """Dimension of operators commuting with every u^(x n), by eigencount.

    Builds the operator-picture average T = avg kron(U, conj(U)) with
    U = u^(x n) and counts eigenvalues at 1.  T is a projector onto the
    commutant of the represented set, so the count is exact up to
    rounding.
    """
    terms = []
    for u in unitaries:
        big = u
        for _ in range(n_factors - 1):
            big = np.kron(big, u)
        terms.append(np.kron(big, big.conj()))
    t = sum(terms) / len(terms)
    ev = np.linalg.eigvals(t)
    return int(np.sum(np.abs(ev - 1.0) < 1e-8))


def phase_unitaries(N: int, order: int) -> list[np.ndarray]:
    d = N + 1
    return [np.diag(np.exp(-2.0j * np.pi * k * np.arange(d) / order))
            for k in range(order)]


def two_mode_phase_commutant_dim(N: int) -> int:
    """Eigencount oracle for the collective-phase commutant on two modes."""
    unis = phase_unitaries(N, 2 * N + 1)
    return unitary_group_fixed_space_dim(unis, 2)


def two_mode_phase_commutant_formula(N: int) -> int:
    """Count pairs |jk><lm| with j+k = l+m directly."""
    d = N + 1
    count = 0
    for j in range(d):
        for k in range(d):
            for l in range(d):
                for m in range(d):
                    if j + k == l + m:
                        count += 1
    return count


# ------------------------------------------------------ cyclic-orbit oracle


def cyclic_orbit_count(n: int) -> int:
    """Distinct orbits of simultaneous shift on pairs (i, j) mod n."""
    seen = set()
    for i in range(n):
        for j in range(n):
            orbit = frozenset(((i + k) % n, (j + k) % n) for k in range(n))
            seen.add(orbit)
    return len(seen)


def z2_reflection_projector_3() -> np.ndarray:
    """Analytic average of {identity, x-flip} on the square system."""
    return np.diag([0.0, 1.0, 1.0])


def z2_joint_reflection_projector_9() -> np.ndarray:
    r = np.diag([-1.0, 1.0, 1.0])
    return (np.eye(9) + np.kron(r, r)) / 2.0
