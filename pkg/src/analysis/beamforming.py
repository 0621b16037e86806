"""Per-alliance linear beamforming over time extensions and numerical decodability checks.

Every message of alliance a is sent along the same vector V_a. Receiver i
decodes iff its desired direction h_ii V_a stays outside the span of the
interference directions it hears.
"""

import logging
from fractions import Fraction

import numpy as np
from scipy import linalg

from abstract.alliance_spec import AllianceSpec, GeneralizedAllianceSpec
from abstract.beamforming_plan import BeamformingPlan, DecodeReport, ReceiverDecode
from abstract.config_container import WorkbenchConfig
from abstract.errors import ChannelSamplingError, SpecMismatchError, WorkbenchError
from abstract.topology import TopologyMatrix
from analysis.alliance_construction import derived_masks
from analysis.generalized import compute_e_max, derived_generalized_masks, lift
from analysis.graph_analysis import alignment_components

logger = logging.getLogger(__name__)

# coefficients smaller than this count as a missing link
_DEGENERATE = 1e-12


def build_vectors(n: int, l: int) -> np.ndarray:
    """Row m is the moment-curve point (1, x, ..., x^(l-1)) at x = m + 1."""
    return np.vander(np.arange(1, n + 1, dtype=float), l, increasing=True)


def sample_channel(t: TopologyMatrix, rng: np.random.Generator, config: WorkbenchConfig) -> np.ndarray:
    """Nonzero coefficients on links only: magnitude uniform in [low, high], random sign."""
    links = np.array(t.entries, dtype=bool)
    for attempt in range(config.sampling_retries):
        magnitude = rng.uniform(config.channel_low, config.channel_high, size=links.shape)
        sign = rng.choice([-1.0, 1.0], size=links.shape)
        channel = np.where(links, magnitude * sign, 0.0)
        if np.all(np.abs(channel[links]) > _DEGENERATE):
            return channel
        logger.debug("degenerate channel on attempt %d, resampling", attempt + 1)
    raise ChannelSamplingError(f"no usable channel after {config.sampling_retries} attempts")


def build_plan(
    t: TopologyMatrix, assignment: list[int], extension: int, rng: np.random.Generator, config: WorkbenchConfig
) -> BeamformingPlan:
    n = max(assignment) + 1
    return BeamformingPlan(
        n_alliances=n,
        extension=extension,
        vectors=build_vectors(n, extension),
        channel=sample_channel(t, rng, config),
    )


def simulate_receive(
    t: TopologyMatrix, assignment: list[int], plan: BeamformingPlan, receiver: int
) -> tuple[np.ndarray, np.ndarray]:
    """Desired direction and the stacked interference directions (one per row) at `receiver`."""
    if len(assignment) != t.k:
        raise SpecMismatchError(f"assignment covers {len(assignment)} messages, topology has {t.k}")
    for j in t.heard_by(receiver):
        if not (0 <= assignment[j] < plan.n_alliances):
            raise SpecMismatchError(f"transmitter {j + 1} heard by receiver {receiver + 1} has no beamformer")

    desired = plan.channel[receiver, receiver] * plan.vectors[assignment[receiver]]
    heard = t.heard_by(receiver)
    interference = np.array(
        [plan.channel[receiver, j] * plan.vectors[assignment[j]] for j in heard], dtype=float
    ).reshape(len(heard), plan.extension)
    return desired, interference


def separation_margin(desired: np.ndarray, interference: np.ndarray) -> tuple[float, int]:
    """Smallest singular value of [Q | d]: Q an orthonormal basis of the interference
    span, d the unit desired direction. Zero when d lies in that span."""
    d = desired / np.linalg.norm(desired)
    if interference.size == 0 or not np.any(interference):
        return 1.0, 0
    q = linalg.orth(interference.T)
    if q.shape[1] >= d.shape[0]:
        return 0.0, q.shape[1]
    stacked = np.column_stack([q, d])
    return float(linalg.svdvals(stacked).min()), q.shape[1]


def alliance_assignment(
    t: TopologyMatrix, spec: AllianceSpec | GeneralizedAllianceSpec | None
) -> tuple[list[int], int]:
    """Message -> alliance index, and the number of slots the scheme needs."""
    if spec is None:
        labels = alignment_components(t.masks)
        roots = sorted(set(labels))
        return [roots.index(label) for label in labels], 2 if t.k > 1 else 1

    if isinstance(spec, AllianceSpec):
        masks, generalized = derived_masks(spec), lift(spec)
    else:
        masks, generalized = derived_generalized_masks(spec), spec
    if spec.k != t.k or TopologyMatrix.from_masks(masks) != t:
        raise SpecMismatchError("the spec does not derive this topology")

    owner = generalized.alliance_of()
    return [owner[m] for m in range(t.k)], max(compute_e_max(generalized), 1) + 1 if t.k > 1 else 1


def verify_decodability(
    t: TopologyMatrix,
    spec: AllianceSpec | GeneralizedAllianceSpec | None = None,
    trials: int | None = None,
    seed: int | None = None,
    tol: float | None = None,
    extension: int | None = None,
    config: WorkbenchConfig | None = None,
) -> DecodeReport:
    """Sample channels `trials` times and check every receiver can separate its message.

    Without a spec the alignment sets serve as alliances and two slots are used
    (one for a single user).
    `extension` overrides the slot count.
    """
    config = config or WorkbenchConfig()
    trials = config.trials if trials is None else trials
    seed = config.seed if seed is None else seed
    tol = config.tol if tol is None else tol

    if trials < 1:
        raise WorkbenchError(f"trials must be at least 1, got {trials}")
    if extension is not None and extension < 1:
        raise WorkbenchError(f"extension must be at least 1 slot, got {extension}")
    if tol <= 0:
        raise WorkbenchError(f"tolerance must be positive, got {tol}")

    assignment, slots = alliance_assignment(t, spec)
    slots = slots if extension is None else extension
    rng = np.random.default_rng(seed)

    worst = [np.inf] * t.k
    dims = [0] * t.k
    for trial in range(trials):
        plan = build_plan(t, assignment, slots, rng, config)
        for i in range(t.k):
            margin, dim = separation_margin(*simulate_receive(t, assignment, plan, i))
            worst[i] = min(worst[i], margin)
            dims[i] = max(dims[i], dim)
        logger.debug("trial %d: worst margin %.3g", trial + 1, min(worst))

    receivers = tuple(
        ReceiverDecode(receiver=i, separable=bool(worst[i] > tol), margin=float(worst[i]), interference_dim=dims[i])
        for i in range(t.k)
    )
    passed = all(r.separable for r in receivers)
    return DecodeReport(
        extension=slots, trials=trials, tol=tol, receivers=receivers, dof=Fraction(1, slots) if passed else None
    )
