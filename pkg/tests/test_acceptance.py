"""Acceptance gate: every criterion runs at its stated tolerance.

The heavy example-4 sweep is shared across criteria through a
session-scoped context. One pass/fail line per criterion is printed by
the `verify` runner, exercised here as well.
"""

import io

import pytest

from isacmac.acceptance import (
    CRITERIA,
    AcceptanceContext,
    run_criterion,
    run_verify,
)
from isacmac.channels import build_example4_variant
from isacmac.errors import ArgumentError
from isacmac.inner import Example4Grid


@pytest.fixture(scope="session")
def ctx():
    return AcceptanceContext()


@pytest.mark.parametrize(
    "cid,title,fn", CRITERIA, ids=[c[0] for c in CRITERIA]
)
def test_criterion(cid, title, fn, ctx):
    checker = fn(ctx)
    detail = "\n".join(checker.lines)
    print(f"\n[{cid}] {title}\n{detail}")
    assert checker.ok, detail


def test_verify_runner_output_and_filter():
    out = io.StringIO()
    ok = run_verify(only=["constants"], stream=out)
    text = out.getvalue()
    assert ok and "PASS" in text and "constants" in text
    with pytest.raises(ArgumentError):
        run_verify(only=["nope"], stream=io.StringIO())


def test_perturbed_channel_fails_example4_checks():
    # nudging the echo-noise bias must break the frozen frontier anchors
    perturbed = AcceptanceContext(
        channel4=build_example4_variant(p_n=0.31),
        ex4_grid=Example4Grid(
            p_u=(0.0,), p_s1=(0.0, 0.4, 0.5), p_s2=(0.0,),
            p_t1=(0.0, 0.5), p_t2=(0.5,), zoom=10,
        ),
    )
    result = run_criterion("ex4-inner", perturbed)
    assert not result.passed
