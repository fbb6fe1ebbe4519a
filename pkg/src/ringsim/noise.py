"""Noise channels and gate models for a superconducting qubit ring.

All channels are expressed as Pauli transfer matrices acting on the coefficient
vector c_P = Tr(P rho), with the basis ordered I, X, Y, Z per qubit.  Times are
nanoseconds at the channel level; relaxation times in :class:`NoiseParams` are
microseconds, matching how they are usually quoted.

Gates with a microwave pulse pick up three imperfections: amplitude damping and
pure dephasing during the pulse (split into two idle halves around the instant
rotation), a weak depolarizing channel, and Gaussian jitter on the rotation
angles.  The jittered rotations are averaged in closed form, so the returned
PTMs are deterministic; sampling-based trajectory code draws the angles itself
and uses the exact rotations instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import pauli

# Fixed readout order for the (declared bit, post-measurement bit) pair; index
# 0 <-> outcome +1 <-> bit 0.  Cumulative sampling walks this order.
OUTCOME_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))

# Declared-vs-actual readout statistics for the transmon readout model:
# row i is the true projected state, entries are P(m, o | i) flattened in
# OUTCOME_ORDER.
READOUT_TABLE = np.array(
    [
        [[0.9985, 0.0000], [0.0015, 0.0000]],
        [[0.0050, 0.0015], [0.0149, 0.9786]],
    ]
)

PREP_LABELS = ("I", "X", "H", "ZH", "SH", "ZSH")

PREP_STATES = {
    "I": "0",
    "X": "1",
    "H": "+",
    "ZH": "-",
    "SH": "i+",
    "ZSH": "i-",
}

# Bloch axis (unit vector) prepared by each prep gate.
PREP_BLOCH = {
    "I": (0.0, 0.0, 1.0),
    "X": (0.0, 0.0, -1.0),
    "H": (1.0, 0.0, 0.0),
    "ZH": (-1.0, 0.0, 0.0),
    "SH": (0.0, 1.0, 0.0),
    "ZSH": (0.0, -1.0, 0.0),
}


@dataclass(frozen=True)
class MeasurementErrorTable:
    """Conditional probabilities P(declared, post | projected) for readout.

    ``eps[i, m, o]`` is the probability of declaring bit ``m`` and leaving the
    qubit in ``|o>`` given that the pre-readout projection gave ``|i>``.  Rows
    must be normalized per ``i``.
    """

    eps: np.ndarray = field(default_factory=lambda: READOUT_TABLE.copy())

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        if eps.shape != (2, 2, 2):
            raise ValueError(f"readout table must be (2, 2, 2), got {eps.shape}")
        if np.any(eps < 0):
            raise ValueError("readout table entries must be non-negative")
        sums = eps.reshape(2, 4).sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-6):
            raise ValueError(f"readout rows must sum to 1, got {sums}")
        object.__setattr__(self, "eps", eps)

    @classmethod
    def ideal(cls) -> "MeasurementErrorTable":
        eps = np.zeros((2, 2, 2))
        eps[0, 0, 0] = 1.0
        eps[1, 1, 1] = 1.0
        return cls(eps)

    def declare_one_prob(self, i: int) -> float:
        """P(declared bit = 1 | projected state i), marginal over o."""
        return float(self.eps[i, 1, :].sum())

    def sample(self, i: int, u: float) -> tuple[int, int]:
        """Map a uniform draw to a (declared, post) bit pair given state i."""
        cum = np.cumsum(self.eps[i].reshape(4))
        idx = int(np.searchsorted(cum, u * cum[-1]))
        return OUTCOME_ORDER[min(idx, 3)]


@dataclass(frozen=True)
class NoiseParams:
    """Device parameters for the ring simulation.

    Relaxation times are microseconds; durations are nanoseconds.  The pure
    dephasing time is derived from 1/T2 = 1/(2 T1) + 1/T_phi, so T2 may not
    exceed 2 T1.
    """

    t1: float = 30.0
    t2: float = 40.0
    tau1: float = 20.0
    tau2: float = 40.0
    t_m: float = 300.0
    t_r: float = 300.0
    p_axis: float = 1e-4
    p_plane: float = 5e-4
    phi_rms: float = 0.01
    sigma_zeta: float | None = None

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("relaxation times must be positive")
        if self.t2 > 2.0 * self.t1:
            raise ValueError(f"T2 = {self.t2} exceeds 2 T1 = {2 * self.t1}")
        for name in ("tau1", "tau2", "t_m", "t_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("p_axis", "p_plane"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")
        if self.phi_rms < 0:
            raise ValueError("phi_rms must be non-negative")
        if self.sigma_zeta is None:
            object.__setattr__(self, "sigma_zeta", self.phi_rms / 2.0)
        elif self.sigma_zeta < 0:
            raise ValueError("sigma_zeta must be non-negative")

    @classmethod
    def ideal(cls) -> "NoiseParams":
        """Noiseless parameters: infinite coherence, exact pulses."""
        return cls(t1=math.inf, t2=math.inf, p_axis=0.0, p_plane=0.0, phi_rms=0.0, sigma_zeta=0.0)

    @property
    def t1_ns(self) -> float:
        return self.t1 * 1e3

    @property
    def t2_ns(self) -> float:
        return self.t2 * 1e3

    @property
    def t_phi_ns(self) -> float:
        """Pure dephasing time in ns from 1/T2 = 1/(2 T1) + 1/T_phi."""
        rate = 1.0 / self.t2_ns - 0.5 / self.t1_ns
        if rate <= 0:
            return math.inf
        return 1.0 / rate

    def gamma1(self, t: float) -> float:
        """Excited-state decay probability over t ns."""
        if math.isinf(self.t1_ns):
            return 0.0
        return -math.expm1(-t / self.t1_ns)

    def gamma_phi(self, t: float) -> float:
        """Pure dephasing strength over t ns."""
        tphi = self.t_phi_ns
        if math.isinf(tphi):
            return 0.0
        return -math.expm1(-2.0 * t / tphi)

    @property
    def cycle_time(self) -> float:
        """Syndrome cycle duration in ns: four two-qubit and four single-qubit
        layers plus measurement and reset of the ancillas."""
        return 4.0 * self.tau2 + 4.0 * self.tau1 + self.t_m + self.t_r


def amplitude_damping_ptm(gamma: float) -> np.ndarray:
    s = math.sqrt(1.0 - gamma)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, 0.0],
            [0.0, 0.0, s, 0.0],
            [gamma, 0.0, 0.0, 1.0 - gamma],
        ]
    )


def phase_damping_ptm(gamma_phi: float) -> np.ndarray:
    s = math.sqrt(1.0 - gamma_phi)
    return np.diag([1.0, s, s, 1.0])


def idle_ptm(t: float, params: NoiseParams) -> np.ndarray:
    """Decoherence over t ns of free evolution: damping then dephasing.

    The two factors commute, so the order is a convention.  The combined map
    shrinks the transverse components by exactly exp(-t / T2).
    """
    return amplitude_damping_ptm(params.gamma1(t)) @ phase_damping_ptm(params.gamma_phi(t))


def depolarization_ptm(p_plane: float, p_axis: float) -> np.ndarray:
    """Anisotropic depolarizing channel squeezing the Bloch ball.

    The in-plane (X, Z) components shrink by 1 - p_plane and the Y component
    by 1 - p_axis, reflecting stronger leakage-induced scrambling transverse
    to the rotation axis of the pulse.
    """
    return np.diag([1.0, 1.0 - p_plane, 1.0 - p_axis, 1.0 - p_plane])


_AXIS_CYCLE = {"x": (1, 2, 3), "y": (2, 3, 1), "z": (3, 1, 2)}


def rotation_ptm(axis: str, angle: float) -> np.ndarray:
    """Exact PTM of exp(-i * angle * P_axis / 2)."""
    return noisy_rotation_ptm(axis, angle, 0.0)


def noisy_rotation_ptm(axis: str, angle: float, sigma: float) -> np.ndarray:
    """Gaussian-averaged rotation about a Pauli axis.

    Averaging exp(i phi) over phi ~ N(angle, sigma^2) gives
    exp(i angle) exp(-sigma^2 / 2), so the oscillatory entries of the PTM are
    damped by exp(-sigma^2 / 2) while the axis components are untouched.
    """
    try:
        a, b, c = _AXIS_CYCLE[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}") from None
    damp = math.exp(-0.5 * sigma * sigma)
    cos = damp * math.cos(angle)
    sin = damp * math.sin(angle)
    r = np.zeros((4, 4))
    r[0, 0] = 1.0
    r[a, a] = 1.0
    r[b, b] = cos
    r[c, b] = sin
    r[b, c] = -sin
    r[c, c] = cos
    return r


def gh_points(mean: float, sigma: float, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes and weights for averaging over N(mean, sigma^2)."""
    x, w = np.polynomial.hermite.hermgauss(n_nodes)
    return mean + math.sqrt(2.0) * sigma * x, w / math.sqrt(math.pi)


def noisy_rotation_ptm_quadrature(
    axis: str, angle: float, sigma: float, n_nodes: int = 64
) -> np.ndarray:
    """Quadrature route for the averaged rotation, used as a cross-check."""
    phis, w = gh_points(angle, sigma, n_nodes)
    r = np.zeros((4, 4))
    for phi, weight in zip(phis, w):
        r += weight * noisy_rotation_ptm(axis, phi, 0.0)
    return r


def _pulsed_gate_ptm(axis: str, angle: float, params: NoiseParams) -> np.ndarray:
    """Idle halves around a jittered pulse followed by depolarization."""
    half = idle_ptm(params.tau1 / 2.0, params)
    dep = depolarization_ptm(params.p_plane, params.p_axis)
    rot = noisy_rotation_ptm(axis, angle, params.phi_rms)
    return half @ dep @ rot @ half


def hadamard_ptm(params: NoiseParams) -> np.ndarray:
    """Hadamard as a virtual Z after a -pi/2 Y pulse.

    Only the microwave Y pulse carries angle jitter and depolarization; the
    frame change Z is exact and free.
    """
    half = idle_ptm(params.tau1 / 2.0, params)
    dep = depolarization_ptm(params.p_plane, params.p_axis)
    ry = noisy_rotation_ptm("y", -math.pi / 2.0, params.phi_rms)
    return half @ dep @ rotation_ptm("z", math.pi) @ ry @ half


def x_gate_ptm(params: NoiseParams) -> np.ndarray:
    """Pi pulse about X with the standard idle/depolarization dressing."""
    return _pulsed_gate_ptm("x", math.pi, params)


def ry_gate_ptm(angle: float, params: NoiseParams) -> np.ndarray:
    """Y rotation pulse with the standard idle/depolarization dressing."""
    return _pulsed_gate_ptm("y", angle, params)


def prep_gate_ptm(label: str, params: NoiseParams) -> np.ndarray:
    """Preparation gate P in {I, X, H, ZH, SH, ZSH} acting on |0>.

    I is a pure idle of one pulse duration (no pulse, so no depolarization or
    jitter).  The Z and S factors are virtual phase updates applied after the
    physical pulse.
    """
    if label not in PREP_LABELS:
        raise ValueError(f"unknown prep gate {label!r}")
    if label == "I":
        return idle_ptm(params.tau1, params)
    if label == "X":
        return x_gate_ptm(params)
    r = hadamard_ptm(params)
    if label == "ZH":
        r = rotation_ptm("z", math.pi) @ r
    elif label == "SH":
        r = rotation_ptm("z", math.pi / 2.0) @ r
    elif label == "ZSH":
        r = rotation_ptm("z", 3.0 * math.pi / 2.0) @ r
    return r


def basis_gate_ptm(label: str, params: NoiseParams) -> np.ndarray:
    """Inverse preparation gate, rotating the prep axis onto Z for readout.

    The adjoint reverses the order: virtual phases first, then the self-adjoint
    pulse.  For I and X the gate is its own inverse.
    """
    if label not in PREP_LABELS:
        raise ValueError(f"unknown prep gate {label!r}")
    if label == "I":
        return idle_ptm(params.tau1, params)
    if label == "X":
        return x_gate_ptm(params)
    r = hadamard_ptm(params)
    if label == "ZH":
        return r @ rotation_ptm("z", -math.pi)
    if label == "SH":
        return r @ rotation_ptm("z", -math.pi / 2.0)
    if label == "ZSH":
        return r @ rotation_ptm("z", -3.0 * math.pi / 2.0)
    return r


def u_two_qubit(theta: float, eta: float, zeta: float) -> np.ndarray:
    """Unitary of the flux-pulsed two-qubit interaction.

    theta = pi, zeta = 0 gives iSWAP; theta = 0, zeta = pi gives CZ.
    """
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1.0
    u[1, 1] = c
    u[2, 2] = c
    u[1, 2] = 1j * s * np.exp(1j * eta)
    u[2, 1] = 1j * s * np.exp(-1j * eta)
    u[3, 3] = np.exp(1j * zeta)
    return u


_TWO_QUBIT_MEANS = {
    "iswap": (math.pi, 0.0, 0.0),
    "cz": (0.0, 0.0, math.pi),
}


def _two_qubit_sigmas(kind: str, params: NoiseParams) -> tuple[float, float, float]:
    if kind == "iswap":
        return (params.phi_rms, params.phi_rms, params.sigma_zeta)
    if kind == "cz":
        return (0.0, 0.0, params.sigma_zeta)
    raise ValueError(f"unknown two-qubit gate {kind!r}")


def _ptm_batch_2q(us: np.ndarray) -> np.ndarray:
    """PTMs of a stack of two-qubit unitaries via one einsum pipeline."""
    basis = _basis_stack_2q()
    conj = np.einsum("nab,jbc,ndc->najd", us, basis, us.conj())
    return np.einsum("iab,nbja->nij", basis, conj).real / 4.0


_BASIS_2Q = None


def _basis_stack_2q() -> np.ndarray:
    global _BASIS_2Q
    if _BASIS_2Q is None:
        _BASIS_2Q = np.stack([pauli.string_matrix(s) for s in pauli.all_strings(2)])
    return _BASIS_2Q


def bare_two_qubit_ptm(kind: str, params: NoiseParams, n_nodes: int = 16) -> np.ndarray:
    """Gaussian-averaged PTM of the two-qubit unitary, without idle dressing.

    The average over the jittered angles is a tensor-product Gauss-Hermite
    quadrature with n_nodes per noisy parameter.  A zero sigma collapses that
    axis onto its mean, so the ideal-parameter limit is exact.
    """
    means = _TWO_QUBIT_MEANS[kind]
    sigmas = _two_qubit_sigmas(kind, params)
    grids = [gh_points(m, s, n_nodes if s > 0 else 1) for m, s in zip(means, sigmas)]
    thetas, eta_g, zeta_g = np.meshgrid(*[g[0] for g in grids], indexing="ij")
    weights = np.einsum(
        "i,j,k->ijk", grids[0][1], grids[1][1], grids[2][1]
    ).ravel()
    us = np.stack(
        [
            u_two_qubit(th, et, ze)
            for th, et, ze in zip(thetas.ravel(), eta_g.ravel(), zeta_g.ravel())
        ]
    )
    return np.einsum("n,nij->ij", weights, _ptm_batch_2q(us))


def bare_two_qubit_ptm_harmonic(kind: str, params: NoiseParams) -> np.ndarray:
    """Closed-form route for the averaged two-qubit PTM.

    Each PTM entry is a trigonometric polynomial with harmonics up to order 2
    in theta/2 and eta and order 1 in zeta, so a 5 x 5 x 3 DFT grid recovers
    the Fourier coefficients exactly and the Gaussian average damps harmonic k
    by exp(-k^2 sigma^2 / 2).  Serves as an independent check on the
    quadrature route.
    """
    theta0, eta0, zeta0 = _TWO_QUBIT_MEANS[kind]
    s_th, s_eta, s_ze = _two_qubit_sigmas(kind, params)
    n = (5, 5, 3)
    omegas = 2.0 * math.pi * np.arange(n[0]) / n[0]
    etas = 2.0 * math.pi * np.arange(n[1]) / n[1]
    zetas = 2.0 * math.pi * np.arange(n[2]) / n[2]
    us = np.stack(
        [
            u_two_qubit(2.0 * om, et, ze)
            for om in omegas
            for et in etas
            for ze in zetas
        ]
    )
    ptms = _ptm_batch_2q(us).reshape(n + (16, 16))
    out = np.zeros((16, 16), dtype=complex)
    for ko in range(-2, 3):
        for ke in range(-2, 3):
            for kz in range(-1, 2):
                phase = np.einsum(
                    "i,j,k->ijk",
                    np.exp(-1j * ko * omegas),
                    np.exp(-1j * ke * etas),
                    np.exp(-1j * kz * zetas),
                ) / float(np.prod(n))
                coeff = np.einsum("ijk,ijkab->ab", phase, ptms)
                damp = math.exp(
                    -0.5
                    * (
                        ko * ko * (s_th / 2.0) ** 2
                        + ke * ke * s_eta * s_eta
                        + kz * kz * s_ze * s_ze
                    )
                )
                out += coeff * damp * np.exp(
                    1j * (ko * theta0 / 2.0 + ke * eta0 + kz * zeta0)
                )
    if np.max(np.abs(out.imag)) > 1e-12:
        raise AssertionError("harmonic reconstruction left an imaginary part")
    return out.real


def two_qubit_ptm(kind: str, params: NoiseParams, n_nodes: int = 16) -> np.ndarray:
    """Full two-qubit gate: idle halves on both qubits around the interaction."""
    half1 = idle_ptm(params.tau2 / 2.0, params)
    half = np.kron(half1, half1)
    return half @ bare_two_qubit_ptm(kind, params, n_nodes) @ half


def gate_fidelity(r_ideal: np.ndarray, r: np.ndarray) -> float:
    """Average gate fidelity between a channel and an ideal unitary PTM."""
    if r_ideal.shape != r.shape or r_ideal.ndim != 2 or r_ideal.shape[0] != r_ideal.shape[1]:
        raise ValueError(f"PTM shape mismatch: {r_ideal.shape} vs {r.shape}")
    d = math.isqrt(r_ideal.shape[0])
    if d * d != r_ideal.shape[0]:
        raise ValueError(f"PTM dimension {r_ideal.shape[0]} is not a square")
    return float((np.trace(r_ideal.T @ r) + d) / (d * (d + 1)))


def amplitude_damping_kraus(gamma: float) -> list[np.ndarray]:
    s = math.sqrt(1.0 - gamma)
    return [
        np.array([[1.0, 0.0], [0.0, s]], dtype=complex),
        np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex),
    ]


def phase_damping_kraus(gamma_phi: float) -> list[np.ndarray]:
    s = math.sqrt(1.0 - gamma_phi)
    return [
        np.array([[1.0, 0.0], [0.0, s]], dtype=complex),
        np.array([[0.0, 0.0], [0.0, math.sqrt(gamma_phi)]], dtype=complex),
    ]


def idle_kraus(t: float, params: NoiseParams) -> list[np.ndarray]:
    """Operator-sum form of the idle channel (damping composed with dephasing)."""
    ad = amplitude_damping_kraus(params.gamma1(t))
    pd = phase_damping_kraus(params.gamma_phi(t))
    return [a @ p for a in ad for p in pd]


def pauli_channel_probs(p_plane: float, p_axis: float) -> np.ndarray:
    """(pI, pX, pY, pZ) of the Pauli channel matching depolarization_ptm."""
    px = p_axis / 4.0
    py = (2.0 * p_plane - p_axis) / 4.0
    probs = np.array([1.0 - 2.0 * px - py, px, py, px])
    if np.any(probs < -1e-12):
        raise ValueError(
            f"p_axis = {p_axis} > 2 p_plane = {2 * p_plane} is not a Pauli channel"
        )
    return np.clip(probs, 0.0, 1.0)
