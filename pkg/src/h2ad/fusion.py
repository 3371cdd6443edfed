"""Candidate fusion: pick the A true directions out of the ambiguous set.

True directions appear once per group while pseudo-solutions of coprime
groups never coincide, so support across groups separates them.  Three
fusers implement that idea:

* ``omc_fuse`` -- online micro-clustering: candidates stream one at a time
  into lightweight clusters (weighted centroid, exponentially decaying
  weight, eviction floor); at stream end nearby clusters merge and the A
  heaviest centroids win.  Decay is applied lazily through the last_update
  stamp, which is algebraically identical to decaying every non-target
  cluster on each arrival.
* ``wgmd_fuse`` -- exhaustive search over one-candidate-per-group
  combinations scored by weighted pairwise distance (global minimum).
* ``wlmd_fuse`` -- localized variant: each first-group candidate recruits
  only the nearest candidate of every other group.

All angular arithmetic runs on sin(theta), which is uniform with respect to
the ambiguity lattice; degrees appear only in reported results.

``op_count_`` after a fuse counts angular-distance evaluations, the dominant
primitive shared by all three methods.  The streaming fuser finds its nearest
cluster by bisection on centroids kept in sorted order, so its count stays
linear in the number of candidates.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin
from .exceptions import InsufficientSupportError

__all__ = ["MicroCluster", "FusionResult", "OmcDoaFuser", "WgmdFuser",
           "WlmdFuser", "omc_fuse", "wgmd_fuse", "wlmd_fuse",
           "accuracy_and_rmse"]


@dataclass
class MicroCluster:
    """Streaming cluster state; centroid tracked in the sin domain."""

    centroid_sin: float
    weight: float
    member_count: int
    last_update: int

    @property
    def centroid(self) -> float:
        return math.asin(min(max(self.centroid_sin, -1.0), 1.0))


@dataclass(frozen=True)
class FusionResult:
    """A estimated directions (radians, ascending) with per-angle support."""

    angles: tuple[float, ...]
    support: tuple[float, ...]
    method: str

    def angles_deg(self) -> np.ndarray:
        return np.degrees(self.angles)


def _sines(candidates) -> np.ndarray:
    return np.array([math.sin(c.angle) for c in candidates])


def _group_sines(candidates) -> dict[int, np.ndarray]:
    groups: dict[int, list[float]] = {}
    for c in candidates:
        groups.setdefault(c.group, []).append(math.sin(c.angle))
    return {g: np.array(v) for g, v in sorted(groups.items())}


class OmcDoaFuser(ParamsMixin):
    """Online micro-clustering fuser.

    radius_deg:     capture radius around a centroid (broadside-equivalent
                    degrees).  It must exceed ESPRIT jitter at the working
                    SNRs, but cross-group pseudo-solutions of coprime lattices
                    can fall within ~0.5 deg of each other (only pairs, never
                    all Q groups), so the radius stays at 0.5 deg and the
                    gentle decay keeps a Q-member true cluster ahead of any
                    pseudo pair.
    decay:          per-arrival weight decay of every non-target cluster
    eviction_floor: clusters below this weight are dropped
    merge_deg:      post-stream merge threshold between neighboring centroids
                    (re-joins jitter-split true clusters; kept below the
                    smallest pseudo gaps that survive streaming)
    """

    def __init__(self, radius_deg: float = 0.5, decay: float = 0.995,
                 eviction_floor: float = 0.05, merge_deg: float = 0.3):
        self.radius_deg = radius_deg
        self.decay = decay
        self.eviction_floor = eviction_floor
        self.merge_deg = merge_deg

    # -- streaming core -----------------------------------------------------

    def fuse(self, candidates, num_sources: int) -> FusionResult:
        candidates = list(candidates)
        if not candidates:
            raise InsufficientSupportError("empty candidate stream")
        if num_sources < 1:
            raise ValueError("num_sources must be >= 1")
        radius = math.sin(math.radians(self.radius_deg))
        keys: list[float] = []          # sorted centroid sines
        clusters: list[MicroCluster] = []  # parallel to keys
        ops = 0

        for stamp, cand in enumerate(candidates, start=1):
            s = math.sin(cand.angle)
            while True:
                pos = bisect.bisect_left(keys, s)
                best, best_dist = -1, math.inf
                for idx in (pos - 1, pos):
                    if 0 <= idx < len(keys):
                        dist = abs(keys[idx] - s)
                        ops += 1
                        if dist < best_dist:
                            best, best_dist = idx, dist
                if best >= 0 and best_dist <= radius:
                    cl = clusters[best]
                    decayed = cl.weight * self.decay ** (stamp - 1 - cl.last_update)
                    if decayed < self.eviction_floor:
                        del keys[best], clusters[best]
                        continue  # zombie removed; rescan for a live neighbor
                    del keys[best], clusters[best]
                    cl.centroid_sin = (decayed * cl.centroid_sin + s) / (decayed + 1.0)
                    cl.weight = decayed + 1.0
                    cl.member_count += 1
                    cl.last_update = stamp
                    ins = bisect.bisect_left(keys, cl.centroid_sin)
                    keys.insert(ins, cl.centroid_sin)
                    clusters.insert(ins, cl)
                else:
                    ins = bisect.bisect_left(keys, s)
                    keys.insert(ins, s)
                    clusters.insert(ins, MicroCluster(s, 1.0, 1, stamp))
                break

        # trailing decay for arrivals after each cluster's last absorption
        final_stamp = len(candidates)
        survivors = []
        for cl in clusters:
            cl.weight *= self.decay ** (final_stamp - cl.last_update)
            if cl.weight >= self.eviction_floor:
                survivors.append(cl)

        merged, merge_ops = self._merge(survivors)
        ops += merge_ops
        self.op_count_ = ops
        if len(merged) < num_sources:
            raise InsufficientSupportError(
                f"only {len(merged)} clusters survived for {num_sources} "
                "sources; retry with a larger radius")
        merged.sort(key=lambda c: (-c.weight, abs(c.centroid_sin)))
        top = sorted(merged[:num_sources], key=lambda c: c.centroid_sin)
        return FusionResult(tuple(c.centroid for c in top),
                            tuple(float(c.member_count) for c in top), "omc")

    def _merge(self, clusters: list[MicroCluster]):
        """Chain-merge neighbors closer than the merge threshold."""
        threshold = math.sin(math.radians(self.merge_deg))
        clusters = sorted(clusters, key=lambda c: c.centroid_sin)
        merged: list[MicroCluster] = []
        ops = 0
        for cl in clusters:
            if merged:
                ops += 1
            if merged and cl.centroid_sin - merged[-1].centroid_sin < threshold:
                prev = merged[-1]
                total = prev.weight + cl.weight
                prev.centroid_sin = (prev.weight * prev.centroid_sin
                                     + cl.weight * cl.centroid_sin) / total
                prev.weight = total
                prev.member_count += cl.member_count
                prev.last_update = max(prev.last_update, cl.last_update)
            else:
                merged.append(cl)
        return merged, ops


class WgmdFuser(ParamsMixin):
    """Weighted global minimum distance: exhaustive combination search."""

    def __init__(self, weights: dict[int, np.ndarray] | None = None):
        self.weights = weights  # per-group candidate weights; default 1

    def fuse(self, candidates, num_sources: int) -> FusionResult:
        groups = _group_sines(candidates)
        sizes = {g: v.size for g, v in groups.items()}
        if len(groups) == 1:
            return _single_group_result(groups, num_sources, "wgmd", self)
        gids = list(groups)
        sines = [groups[g] for g in gids]
        wts = [self._weight_vector(g, groups[g].size) for g in gids]
        shape = tuple(v.size for v in sines)
        if min(shape) < 1 or np.prod([float(s) for s in shape]) < num_sources:
            raise InsufficientSupportError("not enough candidates to combine")

        score = np.zeros(shape)
        pair_count = 0
        for i in range(len(sines)):
            for j in range(i + 1, len(sines)):
                si = sines[i].reshape([-1 if k == i else 1 for k in range(len(shape))])
                sj = sines[j].reshape([-1 if k == j else 1 for k in range(len(shape))])
                wi = wts[i].reshape(si.shape)
                wj = wts[j].reshape(sj.shape)
                score = score + wi * wj * np.abs(si - sj)
                pair_count += 1
        self.op_count_ = int(pair_count * np.prod(shape))

        picks = []
        masked = score.copy()
        for _ in range(num_sources):
            if not np.isfinite(masked).any():
                raise InsufficientSupportError("combinations exhausted")
            flat = int(np.argmin(masked))
            combo = np.unravel_index(flat, shape)
            picks.append((combo, float(score[combo])))
            for axis, idx in enumerate(combo):
                sl = [slice(None)] * len(shape)
                sl[axis] = idx
                masked[tuple(sl)] = np.inf

        return self._to_result(picks, sines, wts, "wgmd")

    def _weight_vector(self, group: int, size: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(size)
        return np.asarray(self.weights[group], dtype=np.float64)

    def _to_result(self, picks, sines, wts, tag) -> FusionResult:
        entries = []
        for combo, score in picks:
            member_sines = np.array([sines[g][i] for g, i in enumerate(combo)])
            member_w = np.array([wts[g][i] for g, i in enumerate(combo)])
            centroid = float(np.average(member_sines, weights=member_w))
            entries.append((math.asin(min(max(centroid, -1.0), 1.0)),
                            1.0 / (1.0 + score)))
        entries.sort()
        return FusionResult(tuple(a for a, _ in entries),
                            tuple(s for _, s in entries), tag)


class WlmdFuser(WgmdFuser):
    """Weighted local minimum distance: nearest-per-group combinations only."""

    def fuse(self, candidates, num_sources: int) -> FusionResult:
        groups = _group_sines(candidates)
        if len(groups) == 1:
            return _single_group_result(groups, num_sources, "wlmd", self)
        gids = list(groups)
        sines = [groups[g] for g in gids]
        wts = [self._weight_vector(g, groups[g].size) for g in gids]
        ops = 0

        combos = []
        for i, seed_sin in enumerate(sines[0]):
            combo = [i]
            for other in sines[1:]:
                dists = np.abs(other - seed_sin)
                ops += dists.size
                combo.append(int(np.argmin(dists)))
            member_sines = np.array([sines[g][idx] for g, idx in enumerate(combo)])
            member_w = np.array([wts[g][idx] for g, idx in enumerate(combo)])
            score = 0.0
            for a in range(len(combo)):
                for b in range(a + 1, len(combo)):
                    score += member_w[a] * member_w[b] * abs(
                        member_sines[a] - member_sines[b])
                    ops += 1
            combos.append((tuple(combo), score))
        self.op_count_ = ops

        combos.sort(key=lambda cs: cs[1])
        picks, used = [], [set() for _ in sines]
        for combo, score in combos:
            if any(idx in used[g] for g, idx in enumerate(combo)):
                continue
            picks.append((combo, score))
            for g, idx in enumerate(combo):
                used[g].add(idx)
            if len(picks) == num_sources:
                break
        if len(picks) < num_sources:
            raise InsufficientSupportError(
                f"only {len(picks)} disjoint combinations for "
                f"{num_sources} sources")
        return self._to_result(picks, sines, wts, "wlmd")


def _single_group_result(groups, num_sources, tag, fuser) -> FusionResult:
    warnings.warn(f"{tag}: single group cannot cross-validate candidates; "
                  "result is low-confidence", stacklevel=3)
    sines = next(iter(groups.values()))
    if sines.size < num_sources:
        raise InsufficientSupportError("not enough candidates")
    fuser.op_count_ = 0
    chosen = np.sort(sines[:num_sources])
    return FusionResult(tuple(math.asin(min(max(s, -1.0), 1.0)) for s in chosen),
                        tuple(1.0 for _ in range(num_sources)), tag)


def omc_fuse(candidates, num_sources: int, radius_deg: float = 0.5,
             decay: float = 0.995, eviction_floor: float = 0.05,
             merge_deg: float = 0.3) -> FusionResult:
    return OmcDoaFuser(radius_deg, decay, eviction_floor, merge_deg).fuse(
        candidates, num_sources)


def wgmd_fuse(candidates, num_sources: int, weights=None) -> FusionResult:
    return WgmdFuser(weights).fuse(candidates, num_sources)


def wlmd_fuse(candidates, num_sources: int, weights=None) -> FusionResult:
    return WlmdFuser(weights).fuse(candidates, num_sources)


def accuracy_and_rmse(estimates, truth, gate_deg: float = 1.0):
    """Per-angle accuracy and RMSE over trials.

    ``estimates``: one angle array (radians) per trial; ``truth``: the true
    angles (radians).  A trial scores correct on angle i when some estimate
    falls within the gate; RMSE pools the matched errors of correct trials.
    """
    truth = np.atleast_1d(np.asarray(truth, dtype=np.float64))
    errors: list[list[float]] = [[] for _ in truth]
    hits = np.zeros(truth.size, dtype=int)
    total = 0
    for est in estimates:
        est = np.atleast_1d(np.asarray(est, dtype=np.float64))
        total += 1
        if est.size == 0:
            continue
        for i, t in enumerate(truth):
            err_deg = np.degrees(np.abs(est - t)).min()
            if err_deg <= gate_deg:
                hits[i] += 1
                errors[i].append(err_deg)
    if total == 0:
        raise ValueError("no trials")
    rmse = np.array([math.sqrt(np.mean(np.square(e))) if e else math.nan
                     for e in errors])
    return {"accuracy": hits / total, "rmse_deg": rmse, "trials": total}
