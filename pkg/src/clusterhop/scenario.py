"""Scenario ingestion: beam grid, demands, clustering, adjacency, system constants.

A scenario is a single JSON document (see ``load_scenario``) describing the
beam layout in angular u/v coordinates, per-beam demands in bps, a strict
partition of beams into clusters, an optional explicit cluster adjacency
matrix, and the system constants. Everything is validated on load and
immutable afterwards.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Beam:
    """One spot beam: 1-based id, angular center (u, v) and demand in bps."""

    id: int
    u: float
    v: float
    demand_bps: float


@dataclass(frozen=True)
class ClusterMap:
    """Strict partition of beams into clusters.

    ``members[j]`` holds the 0-based beam indices of cluster j, in file order.
    """

    members: tuple[tuple[int, ...], ...]

    @property
    def n_clusters(self) -> int:
        return len(self.members)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.members)

    def assignment(self) -> dict[int, int]:
        """Map 0-based beam index -> cluster index."""
        return {b: j for j, ms in enumerate(self.members) for b in ms}


@dataclass(frozen=True)
class ClusterAdjacency:
    """Symmetric 0/1 cluster adjacency matrix with zero diagonal."""

    matrix: np.ndarray

    @property
    def n_clusters(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SystemConfig:
    p_t_w: float
    b_w_hz: float
    carrier_hz: float
    rolloff: float
    t_slot_s: float
    n_slot: int
    n_p: int
    dual_polarization: bool
    gain_peak_dbi: float
    beamwidth_3db_deg: float
    t_sys_k: float
    seed: int

    @property
    def hopping_window_s(self) -> float:
        return self.n_slot * self.t_slot_s


@dataclass(frozen=True)
class Scenario:
    beams: tuple[Beam, ...]
    clusters: ClusterMap
    adjacency: ClusterAdjacency
    system: SystemConfig
    centers: np.ndarray  # (N_B, 2) u/v in degrees, row order = beam index
    demands: np.ndarray  # (N_B,) bps

    @property
    def n_beams(self) -> int:
        return len(self.beams)

    @property
    def n_clusters(self) -> int:
        return self.clusters.n_clusters


_SYSTEM_KEYS = {
    "P_T_W": "p_t_w",
    "B_W_Hz": "b_w_hz",
    "carrier_Hz": "carrier_hz",
    "rolloff": "rolloff",
    "T_slot_s": "t_slot_s",
    "N_slot": "n_slot",
    "N_P": "n_p",
    "dual_polarization": "dual_polarization",
    "gain_peak_dBi": "gain_peak_dbi",
    "beamwidth_3dB_deg": "beamwidth_3db_deg",
    "T_sys_K": "t_sys_k",
    "seed": "seed",
}


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file.

    Raises ParseError on malformed JSON and ValidationError with the name of
    the violated invariant otherwise.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a validated Scenario from an already-parsed JSON document."""
    if not isinstance(doc, dict):
        raise ValidationError("scenario document must be a JSON object")
    for key in ("beams", "clusters", "system"):
        if key not in doc:
            raise ValidationError(f"missing top-level key '{key}'")

    beams = _parse_beams(doc["beams"])
    n_b = len(beams)
    clusters = _parse_clusters(doc["clusters"], n_b)
    system = _parse_system(doc["system"])

    centers = np.array([[b.u, b.v] for b in beams], dtype=float)
    demands = np.array([b.demand_bps for b in beams], dtype=float)

    if "adjacency" in doc and doc["adjacency"] is not None:
        adjacency = _parse_adjacency(doc["adjacency"], clusters.n_clusters)
    else:
        adjacency = derive_adjacency(centers, clusters)

    if system.n_p > clusters.n_clusters:
        raise ValidationError(
            f"N_P={system.n_p} exceeds the cluster count {clusters.n_clusters}"
        )

    centers.flags.writeable = False
    demands.flags.writeable = False
    return Scenario(
        beams=beams,
        clusters=clusters,
        adjacency=adjacency,
        system=system,
        centers=centers,
        demands=demands,
    )


def _parse_beams(raw) -> tuple[Beam, ...]:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("'beams' must be a non-empty array")
    beams = []
    for entry in raw:
        try:
            beam = Beam(
                id=int(entry["id"]),
                u=float(entry["u"]),
                v=float(entry["v"]),
                demand_bps=float(entry["demand_bps"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed beam entry {entry!r}: {exc}") from exc
        if beam.demand_bps < 0:
            raise ValidationError(f"beam {beam.id}: demand must be >= 0")
        beams.append(beam)
    ids = [b.id for b in beams]
    if len(set(ids)) != len(ids):
        raise ValidationError("beam ids are not unique")
    if sorted(ids) != list(range(1, len(ids) + 1)):
        raise ValidationError("beam ids must be contiguous 1..N_B")
    beams.sort(key=lambda b: b.id)
    return tuple(beams)


def _parse_clusters(raw, n_beams: int) -> ClusterMap:
    if not isinstance(raw, list) or not raw:
        raise ValidationError("'clusters' must be a non-empty array of beam-id arrays")
    seen: dict[int, int] = {}
    members = []
    for j, group in enumerate(raw):
        if not isinstance(group, list) or not group:
            raise ValidationError(f"cluster {j} is empty")
        idxs = []
        for bid in group:
            if not isinstance(bid, int) or not (1 <= bid <= n_beams):
                raise ValidationError(f"cluster {j}: unknown beam id {bid!r}")
            if bid in seen:
                raise ValidationError(
                    f"beam {bid} assigned to clusters {seen[bid]} and {j}; "
                    "clustering must be a partition"
                )
            seen[bid] = j
            idxs.append(bid - 1)
        members.append(tuple(idxs))
    missing = set(range(1, n_beams + 1)) - set(seen)
    if missing:
        raise ValidationError(f"beams {sorted(missing)} belong to no cluster")
    return ClusterMap(members=tuple(members))


def _parse_adjacency(raw, n_clusters: int) -> ClusterAdjacency:
    try:
        a = np.array(raw, dtype=int)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"adjacency is not a numeric matrix: {exc}") from exc
    return _validated_adjacency(a, n_clusters)


def _validated_adjacency(a: np.ndarray, n_clusters: int) -> ClusterAdjacency:
    if a.shape != (n_clusters, n_clusters):
        raise ValidationError(
            f"adjacency must be {n_clusters}x{n_clusters}, got {a.shape}"
        )
    if not np.isin(a, (0, 1)).all():
        raise ValidationError("adjacency entries must be 0 or 1")
    if (a != a.T).any():
        raise ValidationError("adjacency matrix is not symmetric")
    if np.diag(a).any():
        raise ValidationError("adjacency diagonal must be zero")
    a = a.astype(np.uint8)
    a.flags.writeable = False
    return ClusterAdjacency(matrix=a)


def _parse_system(raw) -> SystemConfig:
    if not isinstance(raw, dict):
        raise ValidationError("'system' must be an object")
    kwargs = {}
    for file_key, field in _SYSTEM_KEYS.items():
        if file_key not in raw:
            raise ValidationError(f"system: missing key '{file_key}'")
        kwargs[field] = raw[file_key]
    cfg = SystemConfig(
        p_t_w=float(kwargs["p_t_w"]),
        b_w_hz=float(kwargs["b_w_hz"]),
        carrier_hz=float(kwargs["carrier_hz"]),
        rolloff=float(kwargs["rolloff"]),
        t_slot_s=float(kwargs["t_slot_s"]),
        n_slot=int(kwargs["n_slot"]),
        n_p=int(kwargs["n_p"]),
        dual_polarization=bool(kwargs["dual_polarization"]),
        gain_peak_dbi=float(kwargs["gain_peak_dbi"]),
        beamwidth_3db_deg=float(kwargs["beamwidth_3db_deg"]),
        t_sys_k=float(kwargs["t_sys_k"]),
        seed=int(kwargs["seed"]),
    )
    for name in ("p_t_w", "b_w_hz", "carrier_hz", "t_slot_s", "t_sys_k",
                 "gain_peak_dbi", "beamwidth_3db_deg"):
        if getattr(cfg, name) <= 0:
            raise ValidationError(f"system: {name} must be > 0")
    if not 0 <= cfg.rolloff < 1:
        raise ValidationError("system: rolloff must be in [0, 1)")
    if cfg.n_slot < 1:
        raise ValidationError("system: N_slot must be >= 1")
    if cfg.n_p < 1:
        raise ValidationError("system: N_P must be >= 1")
    return cfg


def nominal_pitch(centers: np.ndarray) -> float:
    """Smallest nonzero pairwise center distance (the lattice pitch)."""
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    nz = dist[dist > 0]
    if nz.size == 0:
        raise ValidationError("all beam centers coincide; no pitch defined")
    return float(nz.min())


def beam_adjacency(centers: np.ndarray, threshold: float | None = None) -> np.ndarray:
    """0/1 beam adjacency: centers within ``threshold`` of each other.

    Default threshold is 1.1x the nominal pitch.
    """
    n = centers.shape[0]
    if threshold is None:
        if n < 2:
            return np.zeros((n, n), dtype=np.uint8)
        threshold = 1.1 * nominal_pitch(centers)
    if threshold <= 0:
        raise ValidationError("beam spacing threshold must be > 0")
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    adj = (dist <= threshold).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return adj


def derive_adjacency(
    centers: np.ndarray,
    clusters: ClusterMap,
    threshold: float | None = None,
) -> ClusterAdjacency:
    """Cluster adjacency from beam geometry.

    Clusters j != l are adjacent iff some beam of j lies within ``threshold``
    of some beam of l.
    """
    badj = beam_adjacency(centers, threshold)
    n_c = clusters.n_clusters
    a = np.zeros((n_c, n_c), dtype=np.uint8)
    idx = [np.array(m, dtype=int) for m in clusters.members]
    for j in range(n_c):
        for l in range(j + 1, n_c):
            if badj[np.ix_(idx[j], idx[l])].any():
                a[j, l] = a[l, j] = 1
    a.flags.writeable = False
    return ClusterAdjacency(matrix=a)


def aggregate_and_scale_demands(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster demand d (bps) and window demand m = T_H * d (bits)."""
    d = np.array(
        [scenario.demands[list(ms)].sum() for ms in scenario.clusters.members],
        dtype=float,
    )
    m = scenario.system.hopping_window_s * d
    return d, m


def cluster_demand_vector(scenario: Scenario) -> np.ndarray:
    d, _ = aggregate_and_scale_demands(scenario)
    return d


def scenario_summary(scenario: Scenario) -> dict:
    """Small JSON-friendly digest used by the CLI validate command."""
    d, m = aggregate_and_scale_demands(scenario)
    return {
        "n_beams": scenario.n_beams,
        "n_clusters": scenario.n_clusters,
        "cluster_sizes": list(scenario.clusters.sizes),
        "total_demand_bps": float(scenario.demands.sum()),
        "window_demand_bits": [float(x) for x in m],
        "n_p": scenario.system.n_p,
        "n_slot": scenario.system.n_slot,
    }
