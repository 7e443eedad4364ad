import numpy as np
import pytest

from rfuncds.expr import And, Leaf, Not, Or, eval_arrays


def boolean_oracle(tree, env):
    """Combine leaf-region signs with plain Boolean logic (inside iff >= 0)."""
    if isinstance(tree, Leaf):
        return eval_arrays(tree.region.expr, env) >= 0.0
    if isinstance(tree, And):
        out = boolean_oracle(tree.children[0], env)
        for child in tree.children[1:]:
            out = out & boolean_oracle(child, env)
        return out
    if isinstance(tree, Or):
        out = boolean_oracle(tree.children[0], env)
        for child in tree.children[1:]:
            out = out | boolean_oracle(child, env)
        return out
    if isinstance(tree, Not):
        return ~boolean_oracle(tree.child, env)
    raise TypeError(type(tree))


def grid_env(bounds, resolution):
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in
            zip(bounds, np.broadcast_to(resolution, (len(bounds),)))]
    mesh = np.meshgrid(*axes, indexing="ij")
    names = ("x", "y", "z")[: len(bounds)]
    return {name: g for name, g in zip(names, mesh)}


@pytest.fixture
def rng():
    # fresh per test so draws do not depend on execution order
    return np.random.default_rng(20240817)
