import pytest

from corefrank.corpus import Document, Mention, Partition


@pytest.fixture
def fig1():
    """The running nomination example: six mentions, four gold clusters."""
    sentences = [
        "Barack Obama nominated Hillary Rodham Clinton as his secretary of state on Monday .".split(),
        "He said .".split(),
    ]
    mentions = [
        Mention(id=0, sent=0, start=0, end=2, mtype="PROPER", number="SINGULAR",
                gender="MALE", semclass="PERSON", animacy="Y", ne_tag="PERSON", subject=True),
        Mention(id=1, sent=0, start=3, end=6, mtype="PROPER", number="SINGULAR",
                gender="FEMALE", semclass="PERSON", animacy="Y", ne_tag="PERSON"),
        Mention(id=2, sent=0, start=7, end=8, mtype="PRONOUN", number="SINGULAR",
                gender="MALE", semclass="PERSON", animacy="Y", nested=True),
        Mention(id=3, sent=0, start=7, end=11, mtype="COMMON", number="SINGULAR",
                semclass="PERSON", animacy="Y"),
        Mention(id=4, sent=0, start=12, end=13, mtype="COMMON", number="SINGULAR",
                semclass="DATE", animacy="N"),
        Mention(id=5, sent=1, start=0, end=1, mtype="PRONOUN", number="SINGULAR",
                gender="MALE", semclass="PERSON", animacy="Y", subject=True),
    ]
    doc = Document("fig1", "NW", sentences, mentions, Partition([[0, 2, 5], [1], [3], [4]]))
    doc.validate()
    return doc


def make_doc(doc_id, mention_specs, clusters=None, source="NW"):
    """Build a one-mention-per-sentence document from light specs.

    Each spec is (tokens, mtype, extra_attrs); clusters defaults to all
    singletons.
    """
    sentences = []
    mentions = []
    for i, (tokens, mtype, extra) in enumerate(mention_specs):
        words = tokens.split() if isinstance(tokens, str) else list(tokens)
        sentences.append(words + ["."])
        mentions.append(Mention(id=i, sent=i, start=0, end=len(words), mtype=mtype, **extra))
    if clusters is None:
        clusters = [[i] for i in range(len(mentions))]
    doc = Document(doc_id, source, sentences, mentions, Partition(clusters))
    doc.validate()
    return doc
