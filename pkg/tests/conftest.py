import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from klmrc.bench import random_kb
from klmrc.kb import TOP, Conditional, Kind, KnowledgeBase, Literal, classical, defeasible

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

K1 = KnowledgeBase((
    defeasible("man", "mortal"),
    classical("socrates", "man"),
    classical("socrates", "-mortal"),
))
PENGUIN = KnowledgeBase((
    defeasible("bird", "fly"),
    defeasible("penguin", "bird"),
    defeasible("penguin", "-fly"),
))
CONTRADICTION = [
    (Literal("a", True), Literal("b")),
    (Literal("a", True), Literal("b", True)),
    (Literal("a"), Literal("b")),
    (Literal("a"), Literal("b", True)),
]


@pytest.fixture
def k1():
    return K1


@pytest.fixture
def penguin():
    return PENGUIN


def seeded_kbs(count, seed=20241014, **kw):
    rng = random.Random(seed)
    return [random_kb(rng, **kw) for _ in range(count)]


def all_literals(atoms):
    out = [TOP]
    for a in sorted(atoms):
        out += [Literal(a), Literal(a, True)]
    return out


ATOMS = ["a", "b", "c", "d", "e"]


def literals(atoms=ATOMS, top=False):
    lit = st.builds(Literal, st.sampled_from(atoms), st.booleans())
    return st.one_of(st.just(TOP), lit) if top else lit


def pairs(atoms=ATOMS):
    return st.tuples(literals(atoms), literals(atoms))


def conditionals(atoms=ATOMS):
    return st.builds(Conditional, literals(atoms), literals(atoms), st.sampled_from(list(Kind)))


def kbs(atoms=ATOMS, max_size=8):
    return st.lists(conditionals(atoms), max_size=max_size).map(lambda cs: KnowledgeBase(tuple(cs)))
