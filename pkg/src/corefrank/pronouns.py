"""Closed-class pronoun lexicon.

Maps a lowercase pronoun string to its person, gender, number, and
nominative-case form.  This table is the single source of truth for
pronoun attributes during feature extraction: annotated gender/number on
a pronoun mention is overridden by the lexicon entry.

wh-pronouns (who, whom, whose, ...) are deliberately absent: a pronoun
mention whose string is not in this table has no nominative form and
falls into the catch-all anaphoric-pronoun resolution class.
"""

from __future__ import annotations

from dataclasses import dataclass

MALE = "MALE"
FEMALE = "FEMALE"
NEUTER = "NEUTER"
UNKNOWN = "UNKNOWN"
SINGULAR = "SINGULAR"
PLURAL = "PLURAL"


@dataclass(frozen=True)
class PronounEntry:
    person: int  # 1, 2 or 3
    gender: str
    number: str
    nominative: str


def _series(nominative, person, gender, number, forms, numbers=None):
    numbers = numbers or {}
    return {
        form: PronounEntry(person, gender, numbers.get(form, number), nominative)
        for form in forms
    }


PRONOUNS: dict[str, PronounEntry] = {}
PRONOUNS.update(_series("i", 1, UNKNOWN, SINGULAR, ["i", "me", "my", "mine", "myself"]))
PRONOUNS.update(_series("we", 1, UNKNOWN, PLURAL, ["we", "us", "our", "ours", "ourselves"]))
PRONOUNS.update(
    _series(
        "you",
        2,
        UNKNOWN,
        UNKNOWN,
        ["you", "your", "yours", "yourself", "yourselves"],
        numbers={"yourself": SINGULAR, "yourselves": PLURAL},
    )
)
PRONOUNS.update(_series("thou", 2, UNKNOWN, SINGULAR, ["thou", "thee", "thy", "thine", "thyself"]))
PRONOUNS.update(_series("ye", 2, UNKNOWN, PLURAL, ["ye"]))
PRONOUNS.update(_series("y'all", 2, UNKNOWN, PLURAL, ["y'all"]))
PRONOUNS.update(_series("he", 3, MALE, SINGULAR, ["he", "him", "his", "himself", "hisself"]))
PRONOUNS.update(_series("she", 3, FEMALE, SINGULAR, ["she", "her", "hers", "herself"]))
PRONOUNS.update(_series("it", 3, NEUTER, SINGULAR, ["it", "its", "itself"]))
PRONOUNS.update(
    _series(
        "they",
        3,
        UNKNOWN,
        PLURAL,
        ["they", "them", "their", "theirs", "themselves", "themself", "'em"],
    )
)
PRONOUNS.update(_series("one", 3, UNKNOWN, SINGULAR, ["one", "oneself", "one's"]))

# Indefinite pronouns are their own nominative form.
for _form in ["everybody", "everyone", "somebody", "someone", "anybody", "anyone", "nobody"]:
    PRONOUNS[_form] = PronounEntry(3, UNKNOWN, SINGULAR, _form)
for _form in ["everything", "something", "anything", "nothing"]:
    PRONOUNS[_form] = PronounEntry(3, NEUTER, SINGULAR, _form)
PRONOUNS["none"] = PronounEntry(3, UNKNOWN, UNKNOWN, "none")
PRONOUNS["no one"] = PronounEntry(3, UNKNOWN, SINGULAR, "no one")

# Quantifiers used pronominally.
for _form in ["each", "either", "neither", "much"]:
    PRONOUNS[_form] = PronounEntry(3, UNKNOWN, SINGULAR, _form)
for _form in ["both", "few", "many", "several"]:
    PRONOUNS[_form] = PronounEntry(3, UNKNOWN, PLURAL, _form)
for _form in ["all", "some", "any", "most"]:
    PRONOUNS[_form] = PronounEntry(3, UNKNOWN, UNKNOWN, _form)

# Reciprocals.
PRONOUNS["each other"] = PronounEntry(3, UNKNOWN, UNKNOWN, "each other")
PRONOUNS["one another"] = PronounEntry(3, UNKNOWN, UNKNOWN, "one another")


def lookup(text: str) -> PronounEntry | None:
    """Look up a pronoun by its lowercase surface string."""
    return PRONOUNS.get(text.lower())
