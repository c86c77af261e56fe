"""The thirteen acceptance criteria, each run at its stated tolerance and budget."""
import pytest

from fsic.experiments import REGISTRY

from conftest import ACCEPTANCE

CRITERIA = list(enumerate(REGISTRY, 1))


@pytest.mark.parametrize("num,key", CRITERIA, ids=[k for _, k in CRITERIA])
def test_criterion(num, key):
    exp = REGISTRY[key]
    outcome, wall = exp.run()
    failed = [c for c in outcome.checks if not c.passed]
    line = (f"criterion {num:2d} {key:<22s} {'PASS' if outcome.passed else 'FAIL'}  "
            f"({len(outcome.checks) - len(failed)}/{len(outcome.checks)} checks, {wall:.2f} s)")
    ACCEPTANCE[num] = line
    print(line)
    for c in failed:
        print(f"    failed: {c.name} value={c.value!r} target={c.target!r} tol={c.tol!r}")
    assert not failed, "; ".join(c.name for c in failed)


def test_registry_covers_every_criterion():
    assert len(REGISTRY) == 13
    assert all(e.anchor for e in REGISTRY.values())
