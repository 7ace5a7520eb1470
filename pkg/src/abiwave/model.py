"""Admissible data: the electromagnetic lift and constraint-satisfying
perturbations.

Absolute fields obtained from the lift

    h = sqrt(1 + B^2 + D^2 + |D ^ B|^2),
    tau = 1/h, v = tau (D ^ B), b = tau B, d = tau D

lie pointwise on the algebraic manifold tau^2+v^2+b^2+d^2 = 1,
tau v = d ^ b and, as long as B and D are divergence free, satisfy the
three constraint equations.  Subtracting the lift of the constant part
of (B, D) yields an admissible perturbation of that background.
"""
from __future__ import annotations

import numpy as np

from .fields import EMField, StateField
from .grid import Grid
from .state import AdmissibilityError, ConstantState, bi_lift_constant


def _philox(seed: int) -> np.random.Generator:
    """All randomness flows from one 64-bit seed through Philox."""
    return np.random.Generator(np.random.Philox(np.uint64(seed)))


def band_profile(grid: Grid, k0: float, width: float) -> np.ndarray:
    """Gaussian band |k| ~ k0, hard-cut at the dealiasing boundary."""
    kn = grid.k_norm
    prof = np.exp(-0.5 * ((kn - k0) / width) ** 2)
    kcut = 2.0 * np.pi * (grid.N // 3) / grid.L
    prof *= kn <= kcut
    prof *= grid.nyquist_mask
    prof[0, 0, 0] = 0.0
    return prof


def solenoidal_pair(grid: Grid, seed: int, amplitude: float,
                    k0: float, width: float) -> EMField:
    """Random divergence-free (B, D) pair, normalized to the requested sup.

    Deterministic in (seed, amplitude, k0, width); spectral divergence
    vanishes to round-off.
    """
    rng = _philox(seed)
    prof = band_profile(grid, k0, width)
    out = []
    for _ in range(2):
        vh = (rng.normal(size=(3,) + prof.shape)
              + 1j * rng.normal(size=(3,) + prof.shape)) * prof
        vh = grid.solenoidal_project(vh)
        v = grid.inv(vh).real  # real part enforces Hermitian symmetry
        sup = np.max(np.abs(v))
        if sup > 0:
            v *= amplitude / sup
        out.append(v)
    return EMField(grid, B=out[0], D=out[1])


def abi_from_bi(B: EMField | np.ndarray, D: np.ndarray | None = None,
                grid: Grid | None = None) -> StateField:
    """Lift electromagnetic fields to absolute ten-component variables.

    Accepts an EMField pair or two (3,N,N,N) arrays with a grid.  The
    output satisfies the manifold identities pointwise by construction
    and tau > 0 everywhere (h >= 1).
    """
    if isinstance(B, EMField):
        grid, Barr, Darr = B.grid, B.B, B.D
        if D is not None:
            raise TypeError("pass either an EMField or two arrays")
    else:
        if D is None or grid is None:
            raise TypeError("array form needs B, D and grid")
        Barr, Darr = np.asarray(B, float), np.asarray(D, float)
    if not (np.all(np.isfinite(Barr)) and np.all(np.isfinite(Darr))):
        raise ValueError("non-finite electromagnetic input")
    V = np.cross(Darr, Barr, axis=0)
    h = np.sqrt(1.0 + np.sum(Barr ** 2, axis=0) + np.sum(Darr ** 2, axis=0)
                + np.sum(V ** 2, axis=0))
    tau = 1.0 / h
    data = np.empty((10,) + tau.shape)
    data[0] = tau
    data[1:4] = tau * V
    data[4:7] = tau * Barr
    data[7:10] = tau * Darr
    return StateField(grid, data)


def manifold_state(B0, D0) -> ConstantState:
    """Background on the algebraic manifold, lifted from constant (B0, D0)."""
    return bi_lift_constant(B0, D0)


def state_em_constants(state: ConstantState) -> tuple[np.ndarray, np.ndarray]:
    """(B0, D0) whose lift reproduces the state; error if there is none.

    Only manifold backgrounds are reachable by the lift; for them
    B0 = b0/tau0 and D0 = d0/tau0.
    """
    B0 = state.b0 / state.tau0
    D0 = state.d0 / state.tau0
    ref = bi_lift_constant(B0, D0)
    err = max(abs(ref.tau0 - state.tau0), np.max(np.abs(ref.v0 - state.v0)),
              np.max(np.abs(ref.b0 - state.b0)), np.max(np.abs(ref.d0 - state.d0)))
    if err > 1e-10 * max(1.0, state.tau0):
        raise AdmissibilityError(
            "state is not on the lift manifold; admissible data generation "
            "supports manifold backgrounds (or the chaplygin mode)")
    return B0, D0


def admissible_perturbation(seed: int, amplitude: float, state: ConstantState,
                            grid: Grid, k0: float | None = None,
                            width: float | None = None,
                            kind: str = "bi_lift") -> StateField:
    """Constraint-satisfying perturbation of a background.

    ``bi_lift``: band-limited divergence-free fluctuations are added to
    the constant (B0, D0) corresponding to the state, lifted, and the
    lifted constant subtracted.  Constraints hold to spectral accuracy
    and tau0 + tau > 0 is automatic.

    ``chaplygin``: b = d = 0, v a gradient and an independent random
    tau; exact for backgrounds with b0 = d0 = 0.

    Deterministic given (seed, amplitude, profile).
    """
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    k0 = 3.0 * 2.0 * np.pi / grid.L if k0 is None else k0
    width = 0.75 * 2.0 * np.pi / grid.L if width is None else width
    if amplitude == 0.0:
        return StateField.zeros(grid)

    if kind == "bi_lift":
        B0, D0 = state_em_constants(state)
        em = solenoidal_pair(grid, seed, amplitude, k0, width)
        full = abi_from_bi(em.B + B0.reshape(3, 1, 1, 1),
                           em.D + D0.reshape(3, 1, 1, 1), grid=grid)
        const = bi_lift_constant(B0, D0).as_vector()
        pert = full.data - const.reshape(10, 1, 1, 1)
        if np.min(state.tau0 + pert[0]) <= 0:
            raise AdmissibilityError("perturbation drives tau nonpositive")
        return StateField(grid, pert)

    if kind == "chaplygin":
        if np.max(np.abs(state.b0)) > 0 or np.max(np.abs(state.d0)) > 0:
            raise AdmissibilityError("chaplygin data needs b0 = d0 = 0")
        rng = _philox(seed)
        prof = band_profile(grid, k0, width)
        psih = (rng.normal(size=prof.shape)
                + 1j * rng.normal(size=prof.shape)) * prof
        tauh = (rng.normal(size=prof.shape)
                + 1j * rng.normal(size=prof.shape)) * prof
        data = np.zeros((10,) + prof.shape)
        for j in range(3):
            data[1 + j] = grid.inv(grid.deriv(psih, j)).real
        data[0] = grid.inv(tauh).real
        sup = max(np.max(np.abs(data[0])), np.max(np.abs(data[1:4])))
        if sup > 0:
            data *= amplitude / sup
        if np.min(state.tau0 + data[0]) <= 0:
            raise AdmissibilityError("perturbation drives tau nonpositive")
        return StateField(grid, data)

    raise ValueError(f"unknown perturbation kind {kind!r}")


def galilean_shift(field: StateField, v0, t: float) -> StateField:
    """Frame transport: sample the field at x + v0 t (whole cells only).

    The shift v0 t must be an integer number of cells along each axis;
    fractional shifts are rejected rather than interpolated.
    """
    v0 = np.asarray(v0, dtype=float)
    grid = field.grid
    cells = v0 * t / grid.dx
    icells = np.rint(cells).astype(int)
    if np.max(np.abs(cells - icells)) > 1e-9:
        raise ValueError(f"shift {cells} is not a whole number of cells")
    out = field.data
    for axis in range(3):
        if icells[axis] % grid.N:
            # f(x + s) on a periodic grid is a roll by -s cells
            out = np.roll(out, -icells[axis], axis=1 + axis)
    return StateField(grid, out.copy() if out is field.data else out)
