"""Training-instance generation for the four coreference models and the
anaphoricity classifier.

Classification instances carry labels in {+1, -1}; ranking instances carry
rank values in {1, 2} where 2 marks the correct choice within a group.
Groups are keyed by ``doc_id#k`` so a ranker never forms pairs across
different active mentions.

Training-time candidate clusters are gold prefix clusters: each gold
cluster intersected with the mentions preceding the active one.  Test-time
clusters are system-built and live in the resolver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from . import feats
from .corpus import Document

CLASSIFY = "CLASSIFY"
RANK = "RANK"

NULL_CANDIDATE = "NULL"


@dataclass
class Instance:
    vec: dict[str, float]
    label: float
    group: str
    meta: tuple


@dataclass
class TrainSet:
    instances: list[Instance]
    feature_vocab: list[str]
    kind: str

    @classmethod
    def build(cls, instances: list[Instance], kind: str) -> "TrainSet":
        vocab: dict[str, None] = {}
        for inst in instances:
            for name in inst.vec:
                vocab.setdefault(name)
        return cls(instances, list(vocab), kind)

    def groups(self) -> dict[str, list[Instance]]:
        out: dict[str, list[Instance]] = {}
        for inst in self.instances:
            out.setdefault(inst.group, []).append(inst)
        return out


def merge(train_sets: Iterable[TrainSet]) -> TrainSet:
    sets = list(train_sets)
    if not sets:
        raise ValueError("cannot merge zero train sets")
    kinds = {ts.kind for ts in sets}
    if len(kinds) != 1:
        raise ValueError(f"cannot merge train sets of different kinds: {kinds}")
    instances = [inst for ts in sets for inst in ts.instances]
    return TrainSet.build(instances, kinds.pop())


def _group_id(doc: Document, k: int) -> str:
    return f"{doc.doc_id}#{k}"


def _closest_antecedent(doc: Document, k: int) -> int | None:
    cluster = doc.gold_partition.cluster_of(k)
    earlier = [m for m in cluster if m < k]
    return max(earlier) if earlier else None


def _prefix_clusters(doc: Document, k: int) -> list[tuple[int, ...]]:
    """Gold clusters restricted to mentions preceding k, empty ones dropped."""
    out = []
    for cluster in doc.gold_partition.clusters:
        prefix = tuple(m for m in cluster if m < k)
        if prefix:
            out.append(prefix)
    return out


def gen_mention_pair(doc: Document, fs: str) -> TrainSet:
    """One positive instance per anaphoric mention and its closest antecedent,
    one negative per intervening mention."""
    instances = []
    for k in range(len(doc.mentions)):
        j = _closest_antecedent(doc, k)
        if j is None:
            continue
        group = _group_id(doc, k)
        for t in range(j, k):
            label = 1.0 if t == j else -1.0
            instances.append(
                Instance(feats.pair_features(doc, t, k, fs), label, group, (doc.doc_id, k, t))
            )
    return TrainSet.build(instances, CLASSIFY)


def gen_entity_mention(doc: Document, fs: str) -> TrainSet:
    """Positive instance against the anaphor's own gold prefix cluster,
    negatives against every prefix cluster whose last mention lies between
    the anaphor and its closest antecedent."""
    instances = []
    for k in range(len(doc.mentions)):
        j = _closest_antecedent(doc, k)
        if j is None:
            continue
        group = _group_id(doc, k)
        own = tuple(m for m in doc.gold_partition.cluster_of(k) if m < k)
        for cluster in _prefix_clusters(doc, k):
            if cluster == own:
                label = 1.0
            elif j < max(cluster) < k:
                label = -1.0
            else:
                continue
            instances.append(
                Instance(
                    feats.cluster_features(doc, cluster, k, fs),
                    label,
                    group,
                    (doc.doc_id, k, cluster),
                )
            )
    return TrainSet.build(instances, CLASSIFY)


def gen_mention_ranking(doc: Document, fs: str, joint: bool = False) -> TrainSet:
    """Rank candidate antecedents: 2 for the closest antecedent, 1 otherwise.

    Without the joint option the candidate set is identical to the
    mention-pair one.  With it, every mention contributes a group over all
    preceding mentions plus a new-cluster instance ranked 2 iff the mention
    is non-anaphoric.
    """
    instances = []
    for k in range(len(doc.mentions)):
        j = _closest_antecedent(doc, k)
        group = _group_id(doc, k)
        if not joint:
            if j is None:
                continue
            candidates = range(j, k)
        else:
            candidates = range(k)
        for t in candidates:
            label = 2.0 if t == j else 1.0
            instances.append(
                Instance(feats.pair_features(doc, t, k, fs), label, group, (doc.doc_id, k, t))
            )
        if joint:
            label = 2.0 if j is None else 1.0
            instances.append(
                Instance(
                    feats.null_option(doc, k, fs), label, group, (doc.doc_id, k, NULL_CANDIDATE)
                )
            )
    return TrainSet.build(instances, RANK)


def gen_cluster_ranking(doc: Document, fs: str, joint: bool = False) -> TrainSet:
    """Rank all gold prefix clusters: 2 for the cluster the anaphor belongs
    to, 1 otherwise; the joint option adds the new-cluster instance."""
    instances = []
    for k in range(len(doc.mentions)):
        anaphoric = _closest_antecedent(doc, k) is not None
        if not joint and not anaphoric:
            continue
        group = _group_id(doc, k)
        own = tuple(m for m in doc.gold_partition.cluster_of(k) if m < k)
        for cluster in _prefix_clusters(doc, k):
            label = 2.0 if cluster == own else 1.0
            instances.append(
                Instance(
                    feats.cluster_features(doc, cluster, k, fs),
                    label,
                    group,
                    (doc.doc_id, k, cluster),
                )
            )
        if joint:
            label = 1.0 if anaphoric else 2.0
            instances.append(
                Instance(
                    feats.null_option(doc, k, fs), label, group, (doc.doc_id, k, NULL_CANDIDATE)
                )
            )
    return TrainSet.build(instances, RANK)


def gen_anaphoricity(doc: Document) -> TrainSet:
    """One instance per mention, positive iff it has a coreferent predecessor."""
    instances = []
    for k in range(len(doc.mentions)):
        label = 1.0 if doc.anaphoric(k) else -1.0
        instances.append(
            Instance(feats.anaphoricity(doc, k), label, _group_id(doc, k), (doc.doc_id, k, None))
        )
    return TrainSet.build(instances, CLASSIFY)


def dump_instances(ts: TrainSet, path: str) -> None:
    """Write one record per instance for debugging and golden tests."""
    with open(path, "w", encoding="utf-8") as fh:
        for inst in ts.instances:
            rec = {
                "group": inst.group,
                "label": inst.label,
                "features": sorted(inst.vec.items()),
            }
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
