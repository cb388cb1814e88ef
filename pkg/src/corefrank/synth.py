"""Seeded synthetic corpora.

Documents are built from a fixed inventory of entities.  Every entity has
a proper name, a definite common-noun alias tied to its semantic class,
and (when its gender is unambiguous within the document) a pronoun.
Mentions of the same entity therefore share surface strings, heads, or
agreement attributes in a way a resolver can learn exactly, which makes
these corpora suitable for oracle tests and end-to-end learnability
checks.  All randomness flows from the seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import Document, Mention, Partition

_SOURCES = ("BN", "BC", "NW", "WL", "UN", "CTS")

_PERSON_NAMES = (
    "Alvarez", "Okafor", "Ibrahim", "Kowalski", "Tanaka", "Haddad", "Novak",
    "Petrov", "Mburu", "Lindgren", "Moreau", "Castillo", "Naidoo", "Berg",
    "Farrell", "Dubois", "Keller", "Osman", "Varga", "Quinn",
)
_ORG_NAMES = (
    "Aurora Systems", "Beacon Group", "Cobalt Labs", "Dynamo Media",
    "Equinox Partners", "Fairway Trust", "Granite Works", "Horizon Air",
    "Ironwood Capital", "Juniper Telecom", "Keystone Energy", "Lumen Press",
)
_LOC_NAMES = (
    "Valmont", "Greenfield", "Northgate", "Eastmere", "Silverton",
    "Westbrook", "Oakridge", "Harborview", "Millbrook", "Stonehaven",
)
_PERSON_NOUNS = ("director", "chairman", "analyst", "witness", "organizer", "spokesman")
_ORG_NOUNS = ("company", "firm", "agency", "network", "group", "carrier")
_LOC_NOUNS = ("city", "town", "region", "district", "port", "village")

_VERBS = ("visited", "praised", "criticized", "contacted", "joined", "left", "backed")
_TAILS = ("yesterday", "today", "quietly", "again", "early", "recently")


@dataclass
class _Entity:
    key: int
    name: str
    noun: str
    semclass: str
    gender: str
    mentioned: int = 0


def _entity_inventory() -> list[tuple[str, str, str, str]]:
    inventory = []
    for i, name in enumerate(_PERSON_NAMES):
        gender = "MALE" if i % 2 == 0 else "FEMALE"
        inventory.append((name, _PERSON_NOUNS[i % len(_PERSON_NOUNS)], "PERSON", gender))
    for i, name in enumerate(_ORG_NAMES):
        inventory.append((name, _ORG_NOUNS[i % len(_ORG_NOUNS)], "ORGANIZATION", "NEUTER"))
    for i, name in enumerate(_LOC_NAMES):
        inventory.append((name, _LOC_NOUNS[i % len(_LOC_NOUNS)], "LOCATION", "NEUTER"))
    return inventory


_PRONOUN_FOR_GENDER = {"MALE": "he", "FEMALE": "she", "NEUTER": "it"}


def synth_corpus(
    n_docs: int,
    seed: int,
    *,
    mentions_low: int = 6,
    mentions_high: int = 12,
    pronoun_rate: float = 0.15,
    alias_rate: float = 0.2,
    same_sentence_rate: float = 0.35,
) -> list[Document]:
    """Generate ``n_docs`` documents with deterministic gold coreference.

    ``pronoun_rate`` and ``alias_rate`` control how often a repeat mention
    of an entity surfaces as a pronoun or as its definite common-noun
    alias instead of a name repeat; zero for both yields corpora where
    string equality and gold coreference coincide exactly.
    """
    rng = random.Random(seed)
    inventory = _entity_inventory()
    docs = []
    for d in range(n_docs):
        source = _SOURCES[d % len(_SOURCES)]
        n_mentions = rng.randint(mentions_low, mentions_high)
        n_entities = max(2, rng.randint(max(2, n_mentions // 4), max(3, n_mentions // 2)))
        chosen = rng.sample(inventory, k=min(n_entities, len(inventory)))
        entities = [
            _Entity(i, name, noun, semclass, gender)
            for i, (name, noun, semclass, gender) in enumerate(chosen)
        ]
        gender_counts: dict[str, int] = {}
        for e in entities:
            gender_counts[e.gender] = gender_counts.get(e.gender, 0) + 1
        pronoun_ok = {e.key: gender_counts[e.gender] == 1 for e in entities}

        # Plan the mention sequence: introduce each entity once, then fill
        # with repeats of random entities.
        plan = [e.key for e in entities]
        while len(plan) < n_mentions:
            plan.append(rng.choice(entities).key)

        sentences: list[list[str]] = []
        raw_mentions: list[tuple[int, int, int, dict]] = []  # sent, start, end, attrs
        sent_tokens: list[str] = []
        mentions_in_sentence = 0

        def flush_sentence():
            nonlocal sent_tokens, mentions_in_sentence
            if sent_tokens:
                sent_tokens.append(".")
                sentences.append(sent_tokens)
            sent_tokens = []
            mentions_in_sentence = 0

        for key in plan:
            entity = entities[key]
            first = entity.mentioned == 0
            entity.mentioned += 1
            if first:
                form = "name"
            else:
                roll = rng.random()
                if roll < pronoun_rate and pronoun_ok[key]:
                    form = "pronoun"
                elif roll < pronoun_rate + alias_rate:
                    form = "alias"
                else:
                    form = "name"
            if mentions_in_sentence >= 2 or (
                mentions_in_sentence == 1 and rng.random() > same_sentence_rate
            ):
                flush_sentence()
            if mentions_in_sentence == 0:
                subject = True
            else:
                sent_tokens.append(rng.choice(_VERBS))
                subject = False
            start = len(sent_tokens)
            if form == "name":
                tokens = entity.name.split()
                attrs = {
                    "mtype": "PROPER",
                    "ne_tag": entity.semclass,
                    "definite": False,
                }
            elif form == "alias":
                tokens = ["the", entity.noun]
                attrs = {"mtype": "COMMON", "ne_tag": "NONE", "definite": True}
            else:
                pronoun = _PRONOUN_FOR_GENDER[entity.gender]
                tokens = [pronoun.capitalize() if start == 0 else pronoun]
                attrs = {"mtype": "PRONOUN", "ne_tag": "NONE", "definite": False}
            sent_tokens.extend(tokens)
            attrs.update(
                {
                    "entity": key,
                    "number": "SINGULAR",
                    "gender": entity.gender,
                    "semclass": entity.semclass,
                    "animacy": "Y" if entity.semclass == "PERSON" else "N",
                    "subject": subject,
                }
            )
            raw_mentions.append((len(sentences), start, start + len(tokens), attrs))
            mentions_in_sentence += 1
            if rng.random() < 0.5:
                sent_tokens.append(rng.choice(_TAILS))
        flush_sentence()

        order = sorted(range(len(raw_mentions)), key=lambda i: raw_mentions[i][:3])
        mentions = []
        cluster_map: dict[int, list[int]] = {}
        for new_id, old_id in enumerate(order):
            sent, start, end, attrs = raw_mentions[old_id]
            entity_key = attrs.pop("entity")
            mentions.append(Mention(id=new_id, sent=sent, start=start, end=end, **attrs))
            cluster_map.setdefault(entity_key, []).append(new_id)
        doc = Document(
            doc_id=f"synth-{seed}-{d:04d}",
            source=source,
            sentences=sentences,
            mentions=mentions,
            gold_partition=Partition(cluster_map.values()),
        )
        doc.validate()
        docs.append(doc)
    return docs


def synth_common_corpus(n_mentions: int, seed: int, n_strings: int = 400) -> list[Document]:
    """A corpus of bare common-noun mentions for replacement-protocol tests.

    Surface strings repeat (drawn from ``n_strings`` distinct nouns), so
    string closure is exercised; every mention is a singleton.
    """
    rng = random.Random(seed)
    strings = [f"widget{i}" for i in range(n_strings)]
    docs = []
    per_doc = 50
    doc_index = 0
    remaining = n_mentions
    while remaining > 0:
        count = min(per_doc, remaining)
        remaining -= count
        sentences = []
        mentions = []
        for i in range(count):
            word = strings[rng.randrange(n_strings)]
            sentences.append(["the", word, "arrived", "."])
            mentions.append(
                Mention(
                    id=i,
                    sent=i,
                    start=0,
                    end=2,
                    mtype="COMMON",
                    number="SINGULAR",
                    semclass="OBJECT",
                    definite=True,
                )
            )
        doc = Document(
            doc_id=f"common-{seed}-{doc_index:04d}",
            source="OTHER",
            sentences=sentences,
            mentions=mentions,
            gold_partition=Partition([[m.id] for m in mentions]),
        )
        doc.validate()
        docs.append(doc)
        doc_index += 1
    return docs
