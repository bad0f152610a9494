from collections import deque

import pytest
from hypothesis import settings

from fenchel.maps import InvolutionSystem
from fenchel.perm import Perm
from fenchel.search import SearchContext

settings.register_profile("fenchel", max_examples=40, derandomize=True, deadline=None)
settings.load_profile("fenchel")


@pytest.fixture
def ctx():
    return SearchContext(seed=0)


def closure(generators, degree):
    """Every element of the group, by breadth-first multiplication."""
    identity = Perm.identity(degree)
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = g * s
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


def odd_identity_exists(involutions):
    """Whether (identity, odd) is reachable in the parity-tracking Cayley graph."""
    degree = involutions[0].degree
    start = (Perm.identity(degree), 0)
    seen = {start}
    queue = deque([start])
    while queue:
        g, parity = queue.popleft()
        for c in involutions:
            state = (g * c, 1 - parity)
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return (Perm.identity(degree), 1) in seen


@pytest.fixture(scope="session")
def closure_oracle():
    return closure


@pytest.fixture(scope="session")
def parity_oracle():
    return odd_identity_exists


def cyc(text, degree=4):
    return Perm.from_cycles(text, degree)


@pytest.fixture
def s3_system():
    return InvolutionSystem.create([cyc("(1 2)", 3), cyc("(2 3)", 3), cyc("(1 3)", 3)], [3, 3, 3])


@pytest.fixture
def s4_system():
    # product orders (C0 C1, C1 C2, C2 C0) = (2, 3, 4)
    return InvolutionSystem.create([cyc("(1 2)(3 4)"), cyc("(1 2)"), cyc("(2 3)")], [2, 3, 4])


@pytest.fixture
def klein_system():
    u, v = cyc("(1 2)(3 4)"), cyc("(1 3)(2 4)")
    return InvolutionSystem.create([u, v, u * v], [2, 2, 2])
