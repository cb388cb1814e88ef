"""Annotated corpus model.

A corpus is a UTF-8 file with one JSON document record per line.  Each
record carries the tokenized sentences, the annotated mentions with their
linguistic attributes, and the gold coreference partition.  All linguistic
information that feature extraction needs (mention type, number, gender,
semantic class, NE tag, grammatical flags) travels in the record; nothing
is computed from external resources beyond the bundled pronoun lexicon.

Documents are immutable after load: every operation that changes mention
state (such as the UNSEEN replacement protocol) returns new documents.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from . import pronouns

MENTION_TYPES = ("PRONOUN", "PROPER", "COMMON")
NUMBER_VALUES = ("SINGULAR", "PLURAL", "UNKNOWN")
GENDER_VALUES = ("MALE", "FEMALE", "NEUTER", "UNKNOWN")
SEMCLASS_VALUES = (
    "PERSON",
    "LOCATION",
    "ORGANIZATION",
    "DATE",
    "TIME",
    "MONEY",
    "PERCENT",
    "OBJECT",
    "OTHERS",
    "UNKNOWN",
)
ANIMACY_VALUES = ("Y", "N", "UNKNOWN")
NE_VALUES = ("PERSON", "LOCATION", "ORGANIZATION", "NONE")
SOURCES = ("BN", "BC", "NW", "WL", "UN", "CTS", "OTHER")


class CorpusError(ValueError):
    """Raised on malformed corpus files or documents violating an invariant."""

    def __init__(self, message: str, *, doc_id: str | None = None, line: int | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if doc_id is not None:
            parts.append(f"doc {doc_id!r}")
        prefix = " ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.doc_id = doc_id
        self.line = line


class Partition:
    """A set of disjoint, non-empty mention-id clusters.

    Clusters are stored normalized (each cluster sorted, clusters ordered
    by their smallest member) so two partitions compare equal iff they
    contain the same clusters.
    """

    __slots__ = ("clusters",)

    def __init__(self, clusters: Iterable[Iterable[int]]):
        normalized = sorted(tuple(sorted(c)) for c in clusters)
        self.clusters: tuple[tuple[int, ...], ...] = tuple(normalized)

    def universe(self) -> frozenset[int]:
        return frozenset(m for c in self.clusters for m in c)

    def as_sets(self) -> set[frozenset[int]]:
        return {frozenset(c) for c in self.clusters}

    def cluster_of(self, mention_id: int) -> tuple[int, ...]:
        for c in self.clusters:
            if mention_id in c:
                return c
        raise KeyError(mention_id)

    def mention_to_cluster(self) -> dict[int, tuple[int, ...]]:
        return {m: c for c in self.clusters for m in c}

    def validate(self, universe: Iterable[int], doc_id: str | None = None) -> None:
        seen: set[int] = set()
        for c in self.clusters:
            if not c:
                raise CorpusError("invariant 'clusters non-empty' violated", doc_id=doc_id)
            overlap = seen.intersection(c)
            if overlap:
                raise CorpusError(
                    f"invariant 'clusters pairwise disjoint' violated on mentions {sorted(overlap)}",
                    doc_id=doc_id,
                )
            seen.update(c)
        expected = set(universe)
        if seen != expected:
            raise CorpusError(
                "invariant 'clusters cover the mention universe' violated "
                f"(missing {sorted(expected - seen)}, extra {sorted(seen - expected)})",
                doc_id=doc_id,
            )

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.clusters == other.clusters

    def __hash__(self) -> int:
        return hash(self.clusters)

    def __repr__(self) -> str:
        return f"Partition({list(map(list, self.clusters))})"


@dataclass(eq=False)
class Mention:
    """An annotated noun-phrase span.

    Token offsets are sentence-local with an exclusive end.  ``head_start``
    and ``head_end`` are either both present or both absent; when absent the
    head defaults to the last token of the span (the full span for proper
    names).  ``unseen`` is set by the replacement protocol, never by hand.
    """

    id: int
    sent: int
    start: int
    end: int
    mtype: str
    head_start: int | None = None
    head_end: int | None = None
    number: str = "UNKNOWN"
    gender: str = "UNKNOWN"
    semclass: str = "UNKNOWN"
    animacy: str = "UNKNOWN"
    ne_tag: str = "NONE"
    subject: bool = False
    nested: bool = False
    embedded: bool = False
    indefinite: bool = False
    definite: bool = False
    demonstrative: bool = False
    quantified: bool = False
    appositive_with: int | None = None
    copular_with: int | None = None
    maximalnp_group: int | None = None
    unseen: bool = False


@dataclass(eq=False)
class Document:
    doc_id: str
    source: str
    sentences: list[list[str]]
    mentions: list[Mention]
    gold_partition: Partition

    def mention_tokens(self, m: Mention) -> list[str]:
        return self.sentences[m.sent][m.start : m.end]

    def raw_text(self, m: Mention) -> str:
        return " ".join(self.mention_tokens(m))

    def text(self, m: Mention) -> str:
        """Lowercased full surface string of a mention."""
        return self.raw_text(m).lower()

    def spans(self) -> dict[int, tuple[int, int, int]]:
        return {m.id: (m.sent, m.start, m.end) for m in self.mentions}

    def anaphoric(self, mention_id: int) -> bool:
        """True iff the mention has a coreferent predecessor in the gold partition."""
        return min(self.gold_partition.cluster_of(mention_id)) < mention_id

    def token_offset(self, m: Mention) -> int:
        """Document-global token offset of the mention start."""
        return sum(len(s) for s in self.sentences[: m.sent]) + m.start

    def validate(self) -> None:
        did = self.doc_id
        if self.source not in SOURCES:
            raise CorpusError(f"invariant 'source is a known value' violated: {self.source!r}", doc_id=did)
        order_key = None
        for i, m in enumerate(self.mentions):
            if m.id != i:
                raise CorpusError(
                    f"invariant 'mention ids are 0..n-1 in document order' violated at index {i}",
                    doc_id=did,
                )
            key = (m.sent, m.start, m.end)
            if order_key is not None and key < order_key:
                raise CorpusError(
                    f"invariant 'mention ids are 0..n-1 in document order' violated at mention {m.id}",
                    doc_id=did,
                )
            order_key = key
            if not 0 <= m.sent < len(self.sentences):
                raise CorpusError(f"invariant 'span within sentence' violated at mention {m.id}", doc_id=did)
            if not 0 <= m.start < m.end <= len(self.sentences[m.sent]):
                raise CorpusError(f"invariant 'span within sentence' violated at mention {m.id}", doc_id=did)
            if (m.head_start is None) != (m.head_end is None):
                raise CorpusError(f"invariant 'head span fully given or absent' violated at mention {m.id}", doc_id=did)
            if m.head_start is not None:
                if not m.start <= m.head_start < m.head_end <= m.end:
                    raise CorpusError(
                        f"invariant 'head span inside mention span' violated at mention {m.id}", doc_id=did
                    )
            for attr, values in (
                ("mtype", MENTION_TYPES),
                ("number", NUMBER_VALUES),
                ("gender", GENDER_VALUES),
                ("semclass", SEMCLASS_VALUES),
                ("animacy", ANIMACY_VALUES),
                ("ne_tag", NE_VALUES),
            ):
                if getattr(m, attr) not in values:
                    raise CorpusError(
                        f"invariant '{attr} is a known value' violated at mention {m.id}: {getattr(m, attr)!r}",
                        doc_id=did,
                    )
            flags = [m.indefinite, m.definite, m.demonstrative, m.quantified]
            if sum(flags) > 1:
                raise CorpusError(
                    f"invariant 'at most one determiner flag' violated at mention {m.id}", doc_id=did
                )
            for attr in ("appositive_with", "copular_with"):
                other = getattr(m, attr)
                if other is not None:
                    if not 0 <= other < len(self.mentions) or other == m.id:
                        raise CorpusError(
                            f"invariant '{attr} references another mention' violated at mention {m.id}",
                            doc_id=did,
                        )
                    if self.mentions[other].sent != m.sent:
                        raise CorpusError(
                            f"invariant '{attr} partner in same sentence' violated at mention {m.id}",
                            doc_id=did,
                        )
        self.gold_partition.validate(range(len(self.mentions)), doc_id=did)


@dataclass
class PartitionDoc:
    """A partition-only record (key or response side) used for scoring."""

    doc_id: str
    spans: dict[int, tuple[int, int, int]]
    partition: Partition

    def validate(self) -> None:
        self.partition.validate(self.spans.keys(), doc_id=self.doc_id)


def head_of(doc: Document, m: Mention) -> str:
    """Lowercased head string of a mention.

    Proper names use the entire span; pronouns and common nouns use the
    last token of the annotated head span when present, otherwise the last
    token of the mention span.
    """
    if m.mtype == "PROPER":
        return doc.text(m)
    end = m.head_end if m.head_end is not None else m.end
    return doc.sentences[m.sent][end - 1].lower()


def pronoun_entry(doc: Document, m: Mention) -> pronouns.PronounEntry | None:
    if m.mtype != "PRONOUN":
        return None
    return pronouns.lookup(doc.text(m))


# --------------------------------------------------------------------------
# UNSEEN replacement protocol
# --------------------------------------------------------------------------


def surface_vocab(docs: Sequence[Document]) -> set[str]:
    """Surface strings of mentions that survived training-side replacement."""
    return {doc.text(m) for doc in docs for m in doc.mentions if not m.unseen}


def _with_unseen(docs: Sequence[Document], marked: set[str]) -> list[Document]:
    out = []
    for doc in docs:
        mentions = [replace(m, unseen=doc.text(m) in marked) for m in doc.mentions]
        out.append(
            Document(doc.doc_id, doc.source, doc.sentences, mentions, doc.gold_partition)
        )
    return out


def unseen_train(docs: Sequence[Document], rate: float, seed: int) -> list[Document]:
    """Mark roughly ``rate`` of the common-noun mentions as out-of-vocabulary.

    Replacement is closed under surface-string equality across the whole
    corpus: once any mention with a given string is drawn, every mention
    sharing that string (of any type) is marked too.  Deterministic for a
    fixed seed.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    commons = [doc.text(m) for doc in docs for m in doc.mentions if m.mtype == "COMMON"]
    common_count: dict[str, int] = {}
    for text in commons:
        common_count[text] = common_count.get(text, 0) + 1
    target = rate * len(commons)
    order = list(commons)
    random.Random(seed).shuffle(order)
    marked: set[str] = set()
    marked_count = 0
    for text in order:
        if marked_count >= target:
            break
        if text in marked:
            continue
        marked.add(text)
        marked_count += common_count[text]
    return _with_unseen(docs, marked)


def unseen_test(docs: Sequence[Document], train_vocab: set[str]) -> list[Document]:
    """Mark every mention whose surface string was not seen in training."""
    out = []
    for doc in docs:
        mentions = [replace(m, unseen=doc.text(m) not in train_vocab) for m in doc.mentions]
        out.append(
            Document(doc.doc_id, doc.source, doc.sentences, mentions, doc.gold_partition)
        )
    return out


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

_MENTION_DEFAULTS = {
    "head_start": None,
    "head_end": None,
    "number": "UNKNOWN",
    "gender": "UNKNOWN",
    "semclass": "UNKNOWN",
    "animacy": "UNKNOWN",
    "ne_tag": "NONE",
    "subject": False,
    "nested": False,
    "embedded": False,
    "indefinite": False,
    "definite": False,
    "demonstrative": False,
    "quantified": False,
    "appositive_with": None,
    "copular_with": None,
    "maximalnp_group": None,
    "unseen": False,
}


def mention_to_record(m: Mention) -> dict:
    rec = {"id": m.id, "sent": m.sent, "start": m.start, "end": m.end, "mtype": m.mtype}
    for key, default in _MENTION_DEFAULTS.items():
        value = getattr(m, key)
        if value != default:
            rec[key] = value
    return rec


def mention_from_record(rec: dict) -> Mention:
    kwargs = {k: rec[k] for k in ("id", "sent", "start", "end", "mtype")}
    for key in _MENTION_DEFAULTS:
        if key in rec:
            kwargs[key] = rec[key]
    return Mention(**kwargs)


def doc_to_record(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "source": doc.source,
        "sentences": doc.sentences,
        "mentions": [mention_to_record(m) for m in doc.mentions],
        "clusters": [list(c) for c in doc.gold_partition.clusters],
    }


def doc_from_record(rec: dict) -> Document:
    try:
        doc = Document(
            doc_id=rec["doc_id"],
            source=rec.get("source", "OTHER"),
            sentences=[list(s) for s in rec["sentences"]],
            mentions=[mention_from_record(m) for m in rec["mentions"]],
            gold_partition=Partition(rec["clusters"]),
        )
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"malformed document record: {exc}", doc_id=rec.get("doc_id")) from exc
    doc.validate()
    return doc


def load_corpus(path: str) -> list[Document]:
    """Load a line-delimited corpus file, validating every document."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"parse error: {exc.msg}", line=lineno) from exc
            try:
                docs.append(doc_from_record(rec))
            except CorpusError as exc:
                raise CorpusError(str(exc), line=lineno) from exc
    return docs


def save_corpus(docs: Sequence[Document], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc_to_record(doc), ensure_ascii=False) + "\n")


def partition_doc_to_record(pd: PartitionDoc) -> dict:
    mentions = [
        {"id": mid, "sent": s, "start": a, "end": b}
        for mid, (s, a, b) in sorted(pd.spans.items())
    ]
    return {
        "doc_id": pd.doc_id,
        "mentions": mentions,
        "clusters": [list(c) for c in pd.partition.clusters],
    }


def partition_doc_from_record(rec: dict) -> PartitionDoc:
    try:
        spans = {m["id"]: (m["sent"], m["start"], m["end"]) for m in rec["mentions"]}
        pd = PartitionDoc(rec["doc_id"], spans, Partition(rec["clusters"]))
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"malformed partition record: {exc}", doc_id=rec.get("doc_id")) from exc
    pd.validate()
    return pd


def key_partition_doc(doc: Document) -> PartitionDoc:
    return PartitionDoc(doc.doc_id, doc.spans(), doc.gold_partition)


def response_partition_doc(doc: Document, partition: Partition) -> PartitionDoc:
    return PartitionDoc(doc.doc_id, doc.spans(), partition)


def load_partition_file(path: str) -> list[PartitionDoc]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"parse error: {exc.msg}", line=lineno) from exc
            try:
                out.append(partition_doc_from_record(rec))
            except CorpusError as exc:
                raise CorpusError(str(exc), line=lineno) from exc
    return out


def save_partition_file(pds: Sequence[PartitionDoc], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pd in pds:
            fh.write(json.dumps(partition_doc_to_record(pd), ensure_ascii=False) + "\n")
