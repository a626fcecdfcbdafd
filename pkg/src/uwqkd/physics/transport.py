"""Polarized photon transport through seawater.

Photons leave the origin along +z carrying a BB84 Stokes vector. Each
history alternates exponential free paths with particle interactions:
an absorb-or-scatter draw against the survival weight, a particle
diameter drawn from the size distribution, scattering angles drawn by
rejection from the polarization-dependent phase function, and a
Stokes and direction update. A history ends when its path crosses the
receiver plane ``z = L`` (received or lost), when it is absorbed, or at
the event guard.

Every history draws from its own counter-based stream, and histories are
tallied in fixed-size chunks merged in photon order, so a run's tallies
depend only on ``(seed, n_photons)`` and never on the worker count.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from uwqkd.base.errors import EnvelopeError
from uwqkd.base.streams import photon_generator, stream_key
from uwqkd.constants import MAX_SCATTER_EVENTS, PSD_BINS, THETA_POINTS
from uwqkd.physics.medium import WaterOptics, sample_diameter
from uwqkd.physics.mie import MieTable, MieTableSet, table_set
from uwqkd.physics.polarization import (
    BB84State,
    EnsemblePolarization,
    StokesVector,
    apply_mueller,
    measurement_error_probability,
    rotation,
    scatter_once,
)
from uwqkd.types import PhotonOutcomeKind

logger = logging.getLogger(__name__)

Vector3 = tuple[float, float, float]
FloatArray = NDArray[np.float64]

CHUNK_SIZE = 2048
"""Photons per tally chunk; fixed so merges never depend on scheduling."""

THETA_BINS = 180
PHI_BINS = 72

MIN_BATCH = 16
MAX_BATCH = 65536
ENVELOPE_RTOL = 1e-9
DEGENERATE_NORM = 1e-9

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, kw_only=True)
class ReceiverGeometry:
    """Receiver aperture on the plane ``z = distance``.

    The field of view is the half-angle of the acceptance cone about +z.
    """

    distance: float
    """Link length L in metres."""

    aperture: float
    """Aperture diameter A in metres."""

    fov: float
    """Field-of-view half-angle in radians."""

    def __post_init__(self) -> None:
        """Validate the geometry."""
        if self.distance <= 0:
            raise ValueError(f"distance must be positive, got {self.distance}")
        if self.aperture <= 0:
            raise ValueError(f"aperture must be positive, got {self.aperture}")
        if not 0 < self.fov <= 0.5 * math.pi:
            raise ValueError(f"fov must lie in (0, pi/2], got {self.fov}")

    @property
    def radius(self) -> float:
        """Aperture radius in metres."""
        return 0.5 * self.aperture

    @property
    def acceptance(self) -> float:
        """Smallest accepted direction cosine with +z."""
        return math.cos(self.fov)


@dataclass(slots=True)
class PhotonState:
    """Mutable state of one photon history."""

    position: Vector3
    direction: Vector3
    reference: Vector3
    """Unit vector spanning the Stokes reference plane with ``direction``."""

    stokes: StokesVector
    scatter_count: int = 0
    path_length: float = 0.0

    @classmethod
    def launch(cls, stokes: StokesVector) -> PhotonState:
        """Photon at the origin heading along +z with the x-z reference plane."""
        return cls(
            position=(0.0, 0.0, 0.0),
            direction=(0.0, 0.0, 1.0),
            reference=(1.0, 0.0, 0.0),
            stokes=stokes,
        )


@dataclass(frozen=True)
class PhotonOutcome:
    """How one photon history ended."""

    kind: PhotonOutcomeKind
    stokes: StokesVector | None = None
    """Normalized Stokes vector in the receiver's frame, for received photons only."""

    scatter_count: int = 0
    angles: tuple[tuple[float, float], ...] = ()
    """``(theta, phi)`` of every scattering event, in order."""

    @property
    def received(self) -> bool:
        """True for ballistic and scattered receptions."""
        return self.kind in (PhotonOutcomeKind.RECEIVED_BALLISTIC, PhotonOutcomeKind.RECEIVED_SCATTERED)


def _zeros(n: int) -> tuple[int, ...]:
    return (0,) * n


@dataclass(frozen=True, kw_only=True)
class TransportTallies:
    """Counts and accumulators of a transport run."""

    launched: int = 0
    received_ballistic: int = 0
    received_scattered: int = 0
    absorbed: int = 0
    lost: int = 0
    scatter_events: int = 0
    """Total scattering events over all histories."""

    scattered_ensemble: EnsemblePolarization = field(default_factory=EnsemblePolarization)
    """Normalized Stokes sums of received scattered photons."""

    scatter_error_sum: float = 0.0
    """Sum of wrong-bit probabilities over received scattered photons."""

    theta_histogram: tuple[int, ...] = field(default_factory=lambda: _zeros(THETA_BINS))
    """Scattering-angle counts on equal bins over [0, pi]."""

    phi_histogram: tuple[int, ...] = field(default_factory=lambda: _zeros(PHI_BINS))
    """Azimuth counts on equal bins over [0, 2 pi)."""

    def __post_init__(self) -> None:
        """Check the outcome partition."""
        counts = (self.received_ballistic, self.received_scattered, self.absorbed, self.lost)
        if min(counts) < 0:
            raise ValueError("tally counts must be non-negative")
        if sum(counts) != self.launched:
            raise ValueError(f"outcome counts {counts} do not add up to launched={self.launched}")

    @property
    def received(self) -> int:
        """Photons accepted by the receiver."""
        return self.received_ballistic + self.received_scattered

    @property
    def received_fraction(self) -> float:
        """Fraction of launched photons received."""
        return self.received / self.launched if self.launched else 0.0

    @classmethod
    def from_outcomes(cls, prepared: BB84State, outcomes: Iterable[PhotonOutcome]) -> TransportTallies:
        """Tally a sequence of outcomes in order."""
        counts = dict.fromkeys(PhotonOutcomeKind, 0)
        vectors: list[Vector3] = []
        error_sum = 0.0
        thetas: list[float] = []
        phis: list[float] = []
        for outcome in outcomes:
            counts[outcome.kind] += 1
            for theta, phi in outcome.angles:
                thetas.append(theta)
                phis.append(phi)
            if outcome.kind is PhotonOutcomeKind.RECEIVED_SCATTERED and outcome.stokes is not None:
                bloch = outcome.stokes.bloch()
                vectors.append(bloch)
                error_sum += measurement_error_probability(prepared, bloch)

        theta_counts, _ = np.histogram(thetas, bins=THETA_BINS, range=(0.0, math.pi))
        phi_counts, _ = np.histogram(phis, bins=PHI_BINS, range=(0.0, TWO_PI))
        ensemble = (
            EnsemblePolarization.from_vectors(np.asarray(vectors, dtype=np.float64))
            if vectors
            else EnsemblePolarization()
        )
        return cls(
            launched=sum(counts.values()),
            received_ballistic=counts[PhotonOutcomeKind.RECEIVED_BALLISTIC],
            received_scattered=counts[PhotonOutcomeKind.RECEIVED_SCATTERED],
            absorbed=counts[PhotonOutcomeKind.ABSORBED],
            lost=counts[PhotonOutcomeKind.LOST],
            scatter_events=len(thetas),
            scattered_ensemble=ensemble,
            scatter_error_sum=error_sum,
            theta_histogram=tuple(int(c) for c in theta_counts),
            phi_histogram=tuple(int(c) for c in phi_counts),
        )

    def merge(self, other: TransportTallies) -> TransportTallies:
        """Sum two tallies, ``self`` first."""
        return TransportTallies(
            launched=self.launched + other.launched,
            received_ballistic=self.received_ballistic + other.received_ballistic,
            received_scattered=self.received_scattered + other.received_scattered,
            absorbed=self.absorbed + other.absorbed,
            lost=self.lost + other.lost,
            scatter_events=self.scatter_events + other.scatter_events,
            scattered_ensemble=self.scattered_ensemble.merge(other.scattered_ensemble),
            scatter_error_sum=self.scatter_error_sum + other.scatter_error_sum,
            theta_histogram=tuple(a + b for a, b in zip(self.theta_histogram, other.theta_histogram, strict=True)),
            phi_histogram=tuple(a + b for a, b in zip(self.phi_histogram, other.phi_histogram, strict=True)),
        )


def sample_free_path(mu_e: float, eta: float) -> float:
    """Free path ``-ln(eta) / mu_e`` for a uniform deviate ``eta`` in (0, 1]."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if mu_e <= 0:
        raise ValueError(f"extinction must be positive, got {mu_e}")
    return -math.log(eta) / mu_e


def survival_weight(mu_s_p: float, mu_a_p: float, mu_m: float, dl: float) -> float:
    """Probability that a photon survives an interaction after a step ``dl``.

    ``W = mu_s_p / (mu_s_p + mu_a_p) * exp(-mu_m * dl)``.
    """
    if min(mu_s_p, mu_a_p, mu_m, dl) < 0:
        raise ValueError("coefficients and step length must be non-negative")
    particle = mu_s_p + mu_a_p
    if particle <= 0:
        raise ValueError("survival weight needs a positive particle coefficient")
    return mu_s_p / particle * math.exp(-mu_m * dl)


def _batch_size(envelope: float, table: MieTable) -> int:
    expected = 1.5 * envelope / table.m1_mean if table.m1_mean > 0 else MAX_BATCH
    return int(min(max(math.ceil(expected), MIN_BATCH), MAX_BATCH))


def sample_scattering_angles(
    s: StokesVector, table: MieTable, rng: np.random.Generator
) -> tuple[float, float]:
    """Draw ``(theta, phi)`` for one scattering event by rejection.

    The target density over ``(cos theta, phi)`` is
    ``m1 I + m2 (cos 2phi Q + sin 2phi U)`` for the normalized incident
    Stokes vector. Proposals are uniform in ``(cos theta, phi)`` under the
    constant envelope ``max(m1 + |m2| p)`` with ``p`` the linear
    polarization; they are drawn in vectorized batches and the first
    accepted proposal is returned.

    Raises:
        EnvelopeError: If a proposal's density exceeds the envelope.
    """
    n = s.normalized()
    envelope = table.envelope(math.hypot(n.q, n.u))
    batch = _batch_size(envelope, table)
    limit = envelope * (1.0 + ENVELOPE_RTOL)
    while True:
        mu = rng.uniform(-1.0, 1.0, batch)
        phi = rng.uniform(0.0, TWO_PI, batch)
        level = rng.uniform(0.0, envelope, batch)
        theta = np.arccos(mu)
        m1, m2 = table.density(theta)
        density = m1 + m2 * (np.cos(2.0 * phi) * n.q + np.sin(2.0 * phi) * n.u)
        if np.any(density > limit):
            worst = float(np.max(density))
            raise EnvelopeError(
                f"phase-function density {worst} exceeds envelope {envelope} "
                f"for the table at x={table.x:.6g}"
            )
        hits = np.flatnonzero(level < density)
        if hits.size:
            k = int(hits[0])
            return float(theta[k]), float(phi[k])


def _cross(a: Vector3, b: Vector3) -> Vector3:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a: Vector3, b: Vector3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _unit(a: Vector3) -> tuple[Vector3, float]:
    norm = math.sqrt(_dot(a, a))
    if norm == 0.0:
        return a, 0.0
    return (a[0] / norm, a[1] / norm, a[2] / norm), norm


def _rebuild_reference(d: Vector3) -> Vector3:
    axis: Vector3 = (0.0, 1.0, 0.0) if abs(d[0]) >= 0.9 else (1.0, 0.0, 0.0)
    proj = _dot(axis, d)
    e1, _ = _unit((axis[0] - proj * d[0], axis[1] - proj * d[1], axis[2] - proj * d[2]))
    return e1


def update_direction(d: Vector3, frame: Vector3, theta: float, phi: float) -> tuple[Vector3, Vector3]:
    """Turn a propagation direction by a scattering event.

    The reference vector ``frame`` is first rotated about ``d`` by ``phi``;
    the direction then tilts by ``theta`` towards it, and the new reference
    vector is the rotated one tilted along, so it lies in the scattering
    plane. Both results are renormalized. A reference vector that collapses
    (norm below 1e-9) is rebuilt by projecting the x axis, or the y axis
    when the direction is within about 25 degrees of x, off the direction.

    Args:
        d: Unit propagation direction.
        frame: Unit reference vector orthogonal to ``d``.
        theta: Scattering angle in radians.
        phi: Azimuth in radians, measured from the reference plane.

    Returns:
        ``(d', frame')``.
    """
    cp, sp = math.cos(phi), math.sin(phi)
    e2 = _cross(d, frame)
    e1 = (cp * frame[0] + sp * e2[0], cp * frame[1] + sp * e2[1], cp * frame[2] + sp * e2[2])
    ct, st = math.cos(theta), math.sin(theta)
    new_d, _ = _unit((ct * d[0] + st * e1[0], ct * d[1] + st * e1[1], ct * d[2] + st * e1[2]))
    raw = (ct * e1[0] - st * d[0], ct * e1[1] - st * d[1], ct * e1[2] - st * d[2])
    proj = _dot(raw, new_d)
    new_e1, norm = _unit((raw[0] - proj * new_d[0], raw[1] - proj * new_d[1], raw[2] - proj * new_d[2]))
    if norm < DEGENERATE_NORM:
        new_e1 = _rebuild_reference(new_d)
    return new_d, new_e1


def receiver_frame_angle(d: Vector3, frame: Vector3) -> float:
    """Angle from the reference vector ``frame`` to the receiver's x axis.

    The receiver measures polarization against the lab x axis projected
    off the arrival direction ``d``. The angle is signed towards
    ``d x frame``, the convention of `rotation`, so ``rotation(psi)``
    carries a Stokes vector from the photon's frame into the receiver's.
    When ``d`` is nearly parallel to x the projected axis falls back as in
    `update_direction`.
    """
    proj = d[0]
    lab, norm = _unit((1.0 - proj * d[0], -proj * d[1], -proj * d[2]))
    if norm < DEGENERATE_NORM:
        lab = _rebuild_reference(d)
    e2 = _cross(d, frame)
    return math.atan2(_dot(lab, e2), _dot(lab, frame))


def to_receiver_frame(state: PhotonState) -> StokesVector:
    """Normalized Stokes vector of ``state`` in the receiver's frame."""
    psi = receiver_frame_angle(state.direction, state.reference)
    return apply_mueller(rotation(psi), state.stokes).normalized()


def propagate_photon(
    prepared: BB84State,
    optics: WaterOptics,
    recv: ReceiverGeometry,
    rng: np.random.Generator,
    tables: MieTableSet | None = None,
    *,
    max_events: int = MAX_SCATTER_EVENTS,
) -> PhotonOutcome:
    """Follow one photon history to its end.

    A free path that reaches the receiver plane ends the history there:
    the photon is received when it lands inside the aperture within the
    field of view and lost otherwise. Scattered photons must also survive
    water absorption over that final partial step; ballistic photons are
    classified on the free-path draw alone. Received Stokes vectors are
    reported in the receiver's frame (see `to_receiver_frame`).

    Args:
        prepared: BB84 state the photon was prepared in.
        optics: Calibrated water.
        recv: Receiver geometry.
        rng: The photon's own random stream.
        tables: Mueller tables of the particle population; required when
            the water scatters.
        max_events: Scattering events after which the photon counts as lost.
    """
    if tables is None and optics.mu_s_p > 0:
        raise ValueError("scattering water needs Mueller tables")
    state = PhotonState.launch(prepared.stokes.normalized())
    particle = optics.mu_s_p + optics.mu_a_p
    angles: list[tuple[float, float]] = []

    while True:
        eta = 1.0 - rng.random()
        step = sample_free_path(optics.mu_e, eta) if optics.mu_e > 0 else math.inf
        x, y, z = state.position
        dx, dy, dz = state.direction

        if dz > 0.0:
            to_plane = (recv.distance - z) / dz
            if to_plane <= step:
                if (
                    state.scatter_count > 0
                    and optics.mu_m > 0.0
                    and rng.random() >= math.exp(-optics.mu_m * to_plane)
                ):
                    return PhotonOutcome(PhotonOutcomeKind.ABSORBED, None, state.scatter_count, tuple(angles))
                r = math.hypot(x + to_plane * dx, y + to_plane * dy)
                if r <= recv.radius and dz >= recv.acceptance:
                    kind = (
                        PhotonOutcomeKind.RECEIVED_SCATTERED
                        if state.scatter_count
                        else PhotonOutcomeKind.RECEIVED_BALLISTIC
                    )
                    return PhotonOutcome(kind, to_receiver_frame(state), state.scatter_count, tuple(angles))
                return PhotonOutcome(PhotonOutcomeKind.LOST, None, state.scatter_count, tuple(angles))

        if math.isinf(step):
            return PhotonOutcome(PhotonOutcomeKind.LOST, None, state.scatter_count, tuple(angles))

        state.position = (x + step * dx, y + step * dy, z + step * dz)
        state.path_length += step

        if particle <= 0.0:
            # only water left to interact with
            return PhotonOutcome(PhotonOutcomeKind.ABSORBED, None, state.scatter_count, tuple(angles))
        weight = survival_weight(optics.mu_s_p, optics.mu_a_p, optics.mu_m, step)
        if rng.random() > weight:
            return PhotonOutcome(PhotonOutcomeKind.ABSORBED, None, state.scatter_count, tuple(angles))
        if state.scatter_count >= max_events:
            return PhotonOutcome(PhotonOutcomeKind.LOST, None, state.scatter_count, tuple(angles))

        assert tables is not None
        table = tables.select(sample_diameter(optics.psd, rng.random()))
        theta, phi = sample_scattering_angles(state.stokes, table, rng)
        scattered = scatter_once(state.stokes, phi, table.elements(theta))
        state.stokes = scattered.normalized()
        state.direction, state.reference = update_direction(state.direction, state.reference, theta, phi)
        state.scatter_count += 1
        angles.append((theta, phi))


@dataclass(frozen=True, eq=False)
class _RunContext:
    prepared: BB84State
    optics: WaterOptics
    recv: ReceiverGeometry
    tables: MieTableSet | None
    key: int
    max_events: int


_WORKER_CONTEXT: _RunContext | None = None


def _init_worker(context: _RunContext) -> None:
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = context


def _run_chunk(context: _RunContext, start: int, stop: int) -> TransportTallies:
    outcomes = (
        propagate_photon(
            context.prepared,
            context.optics,
            context.recv,
            photon_generator(context.key, index),
            context.tables,
            max_events=context.max_events,
        )
        for index in range(start, stop)
    )
    return TransportTallies.from_outcomes(context.prepared, outcomes)


def _run_chunk_in_worker(bounds: tuple[int, int]) -> TransportTallies:
    if _WORKER_CONTEXT is None:
        raise RuntimeError("transport worker used before initialization")
    return _run_chunk(_WORKER_CONTEXT, *bounds)


def _chunks(n_photons: int, chunk_size: int) -> list[tuple[int, int]]:
    return [(start, min(start + chunk_size, n_photons)) for start in range(0, n_photons, chunk_size)]


def tables_for(
    optics: WaterOptics, *, bins: int = PSD_BINS, points: int = THETA_POINTS
) -> MieTableSet | None:
    """Mueller tables for a water body, or None when it does not scatter."""
    if optics.mu_s_p <= 0:
        return None
    return table_set(optics.psd, optics.wavelength, optics.particle_index, optics.n_medium, bins, points)


def run_transport(
    prepared: BB84State,
    optics: WaterOptics,
    recv: ReceiverGeometry,
    n_photons: int,
    seed: int,
    workers: int = 1,
    *,
    state_index: int = 0,
    tables: MieTableSet | None = None,
    max_events: int = MAX_SCATTER_EVENTS,
    chunk_size: int = CHUNK_SIZE,
) -> TransportTallies:
    """Run ``n_photons`` histories and merge their tallies.

    Args:
        prepared: BB84 state every photon is prepared in.
        optics: Calibrated water.
        recv: Receiver geometry.
        n_photons: Number of histories, at least one.
        seed: 64-bit run seed.
        workers: Worker processes; 1 runs in-process.
        state_index: Stream family, so different prepared states draw
            independent streams under the same seed.
        tables: Precomputed Mueller tables; built from ``optics`` if omitted.
        max_events: Event guard per history.
        chunk_size: Photons per tally chunk.

    Returns:
        Tallies identical for identical ``(seed, state_index, n_photons)``
        whatever the worker count.
    """
    if n_photons < 1:
        raise ValueError(f"n_photons must be at least 1, got {n_photons}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if tables is None:
        tables = tables_for(optics)
    context = _RunContext(prepared, optics, recv, tables, stream_key(seed, state_index), max_events)
    bounds = _chunks(n_photons, chunk_size)
    logger.info(
        "transport: %d photons in state %s, L=%.4g m, A=%.4g m, fov=%.4g rad, %d worker(s)",
        n_photons,
        prepared.label.value,
        recv.distance,
        recv.aperture,
        recv.fov,
        workers,
    )

    if workers == 1 or len(bounds) == 1:
        parts: Sequence[TransportTallies] = [_run_chunk(context, start, stop) for start, stop in bounds]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(context,)
        ) as executor:
            parts = list(executor.map(_run_chunk_in_worker, bounds))

    tallies = TransportTallies()
    for part in parts:
        tallies = tallies.merge(part)
    logger.info(
        "transport done: %d ballistic, %d scattered, %d absorbed, %d lost",
        tallies.received_ballistic,
        tallies.received_scattered,
        tallies.absorbed,
        tallies.lost,
    )
    return tallies


@dataclass(frozen=True)
class AngleHistograms:
    """Sampled scattering-angle histograms next to their expected bin probabilities."""

    theta_edges: FloatArray
    phi_edges: FloatArray
    theta_counts: NDArray[np.int64]
    phi_counts: NDArray[np.int64]
    theta_expected: FloatArray
    """Probability of each theta bin."""

    phi_expected: FloatArray
    """Probability of each phi bin."""


def _sin_weighted_cumulative(theta: FloatArray, values: FloatArray) -> FloatArray:
    """Running integral of ``values(theta) sin(theta)`` with ``values`` linear between nodes.

    Exact for the piecewise-linear interpolant the angle sampler draws from.
    """
    t0, t1 = theta[:-1], theta[1:]
    f0 = values[:-1]
    slope = np.diff(values) / np.diff(theta)
    segment = f0 * (np.cos(t0) - np.cos(t1)) + slope * (
        np.sin(t1) - np.sin(t0) - (t1 - t0) * np.cos(t1)
    )
    return np.concatenate(([0.0], np.cumsum(segment)))


def angle_oracle(
    tables: MieTableSet,
    stokes: StokesVector,
    theta_edges: FloatArray,
    phi_edges: FloatArray,
) -> tuple[FloatArray, FloatArray]:
    """Bin probabilities of the size-mixed sampling density.

    Each table contributes ``m1 sin(theta)`` to the theta marginal and
    ``1 + (B/A)(cos 2phi Q + sin 2phi U)`` to the phi marginal, where ``A``
    and ``B`` are the sin-weighted integrals of m1 and m2; tables are mixed
    by their size-distribution weight. Theta edges off the table grid are
    placed by linear interpolation of the running integral.

    Returns:
        ``(theta_probabilities, phi_probabilities)``.
    """
    n = stokes.normalized()
    theta_p = np.zeros(theta_edges.shape[0] - 1)
    phi_p = np.zeros(phi_edges.shape[0] - 1)
    lo, hi = phi_edges[:-1], phi_edges[1:]
    width = hi - lo
    cos_term = 0.5 * (np.sin(2.0 * hi) - np.sin(2.0 * lo))
    sin_term = -0.5 * (np.cos(2.0 * hi) - np.cos(2.0 * lo))
    for table, weight in zip(tables.tables, tables.weights, strict=True):
        cumulative = _sin_weighted_cumulative(table.theta, table.m1)
        a = float(cumulative[-1])
        theta_p += weight * np.diff(np.interp(theta_edges, table.theta, cumulative)) / a
        b = float(_sin_weighted_cumulative(table.theta, table.m2)[-1])
        phi_p += weight * (width + (b / a) * (cos_term * n.q + sin_term * n.u)) / TWO_PI
    total = float(sum(tables.weights))
    return theta_p / total, phi_p / total


def sample_angle_histograms(
    stokes: StokesVector,
    optics: WaterOptics,
    tables: MieTableSet,
    n_draws: int,
    seed: int,
    *,
    family: int = 0,
    theta_bins: int = THETA_BINS,
    phi_bins: int = PHI_BINS,
) -> AngleHistograms:
    """Draw single-event scattering angles for a fixed incident state.

    Every draw picks a fresh diameter from the size distribution, exactly
    as a transport event does, so the histograms can be checked against
    `angle_oracle`.
    """
    if n_draws < 1:
        raise ValueError(f"n_draws must be at least 1, got {n_draws}")
    rng = photon_generator(stream_key(seed, family), 0)
    thetas = np.empty(n_draws)
    phis = np.empty(n_draws)
    for k in range(n_draws):
        table = tables.select(sample_diameter(optics.psd, rng.random()))
        thetas[k], phis[k] = sample_scattering_angles(stokes, table, rng)
    theta_edges = np.linspace(0.0, math.pi, theta_bins + 1)
    phi_edges = np.linspace(0.0, TWO_PI, phi_bins + 1)
    theta_counts, _ = np.histogram(thetas, bins=theta_edges)
    phi_counts, _ = np.histogram(phis, bins=phi_edges)
    theta_expected, phi_expected = angle_oracle(tables, stokes, theta_edges, phi_edges)
    return AngleHistograms(
        theta_edges=theta_edges,
        phi_edges=phi_edges,
        theta_counts=theta_counts.astype(np.int64),
        phi_counts=phi_counts.astype(np.int64),
        theta_expected=theta_expected,
        phi_expected=phi_expected,
    )


__all__ = [
    "CHUNK_SIZE",
    "AngleHistograms",
    "PhotonOutcome",
    "PhotonState",
    "ReceiverGeometry",
    "TransportTallies",
    "angle_oracle",
    "propagate_photon",
    "receiver_frame_angle",
    "run_transport",
    "sample_angle_histograms",
    "sample_free_path",
    "sample_scattering_angles",
    "survival_weight",
    "tables_for",
    "to_receiver_frame",
    "update_direction",
]
