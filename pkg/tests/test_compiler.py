import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_symplectic, random_unitary
from cvloop import gaussian as g
from cvloop import program as pg
from cvloop.compiler import (
    CompileError,
    InsufficientAncillaError,
    compile_cubic,
    compile_gaussian,
    compile_single_mode,
    cubic_ancilla_gamma,
    squeeze_settings,
)
from cvloop.decomp import EulerForm, unitary_to_passive_symplectic
from cvloop.validation import validate

seeds = st.integers(0, 2**32 - 1)


# --- mutations ---------------------------------------------------------------


def drop_first_measure_tick(prog):
    tick = prog.of_kind(pg.MEASURE)[0].tick
    return prog.replace(events=[ev for ev in prog.events if ev.tick != tick])


def shrink_tau_prime(prog):
    return prog.replace(tau_prime=prog.tau_prime - 1)


def feedforward_at_measure_tick(prog):
    measured = {ev.args["label"]: ev.tick for ev in prog.of_kind(pg.MEASURE)}
    events = list(prog.events)
    for k, ev in enumerate(events):
        if ev.kind == pg.FEEDFORWARD and ev.dynamic.sources:
            events[k] = pg.Event(measured[ev.dynamic.sources[0]], ev.kind, ev.args)
            break
    else:
        raise AssertionError("no feedforward reads a measurement")
    return prog.replace(events=events)


MUTATIONS = [
    (drop_first_measure_tick, "feedforward-source"),
    (shrink_tau_prime, "outer-loop-capacity"),
    (feedforward_at_measure_tick, "feedforward-delay"),
]


def _programs():
    rng = np.random.default_rng(7)
    progs = [compile_single_mode(EulerForm(0.4, 0.6, -1.1)), compile_cubic(0.1), compile_cubic(0.2, anti_squeeze=True)]
    for n in (1, 2, 3, 4):
        progs.append(compile_gaussian(random_symplectic(n, rng)))
    return progs


@pytest.mark.parametrize("mutate,rule", MUTATIONS, ids=[r for _, r in MUTATIONS])
@pytest.mark.parametrize("prog", _programs(), ids=["euler", "cubic", "cubic-anti", "n1", "n2", "n3", "n4"])
def test_mutation_produces_named_violation(prog, mutate, rule):
    assert validate(prog).ok
    report = validate(mutate(prog))
    assert not report.ok
    assert rule in report.rules


# --- layout ------------------------------------------------------------------


def test_squeeze_settings():
    T0, gain = squeeze_settings(0.5)
    assert T0 == pytest.approx(1 - np.exp(-1.0))
    assert gain == pytest.approx(np.sqrt(T0 / np.exp(-1.0)))


def test_single_mode_layout():
    prog = compile_single_mode(EulerForm(np.pi / 3, 0.5, np.pi / 6))
    assert (prog.n, prog.m, prog.tau_prime) == (1, 1, 2)
    T = [ev.args["T"] for ev in prog.of_kind(pg.VBS)]
    assert T == pytest.approx([1.0, 1 - np.exp(-1.0), 1.0])
    (meas,) = prog.of_kind(pg.MEASURE)
    (ff,) = prog.of_kind(pg.FEEDFORWARD)
    assert meas.args["angle"] == pytest.approx(np.pi / 2)
    assert ff.tick == meas.tick + 1 and ff.args["quadrature"] == "p"
    assert ff.dynamic({meas.args["label"]: 1.0}) == pytest.approx(squeeze_settings(0.5)[1])
    assert [ev.args["theta"] for ev in prog.of_kind(pg.PHASE1)] == pytest.approx([np.pi / 6, np.pi / 3])


def test_pure_rotation_uses_no_ancilla():
    prog = compile_gaussian(g.rotation(0.7).matrix)
    assert prog.m == 0 and prog.tau_prime == 1
    assert not prog.of_kind(pg.MEASURE)


def test_compile_is_deterministic(rng):
    S = random_symplectic(3, rng)
    assert compile_gaussian(S).to_json() == compile_gaussian(S).to_json()


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 4))
def test_tau_prime_is_n_plus_m(seed, n):
    rng = np.random.default_rng(seed)
    prog = compile_gaussian(random_symplectic(n, rng))
    assert prog.m == n
    assert prog.tau_prime == prog.n + prog.m
    assert validate(prog).ok
    assert len(prog.of_kind(pg.MEASURE)) == prog.m


def test_partial_squeezing_uses_fewer_ancillae(rng):
    O1 = unitary_to_passive_symplectic(random_unitary(3, rng))
    O2 = unitary_to_passive_symplectic(random_unitary(3, rng))
    S = O2 @ g.squeezer(0.3, mode=2, n_modes=3).matrix @ O1
    prog = compile_gaussian(S, m=1)
    assert prog.m == 1 and prog.tau_prime == 4
    # a larger budget does not consume more ancillae
    assert compile_gaussian(S, m=3).m == 1


def test_mesh_element_count_is_bounded(rng):
    n = 4
    O = unitary_to_passive_symplectic(random_unitary(n, rng))
    prog = compile_gaussian(O, m=0)
    mixing = [ev for ev in prog.of_kind(pg.VBS) if 0.0 < ev.args["T"] < 1.0]
    # two meshes, each at most n(n-1)/2 elements
    assert len(mixing) <= n * (n - 1)


def test_insufficient_ancillae(rng):
    S = random_symplectic(3, rng)
    with pytest.raises(InsufficientAncillaError):
        compile_gaussian(S, m=2)
    with pytest.raises(InsufficientAncillaError):
        compile_gaussian(g.squeezer(0.2).matrix, m=0)


def test_budget_above_n_rejected(rng):
    with pytest.raises(CompileError):
        compile_gaussian(random_symplectic(2, rng), m=3)


def test_validator_limits_gaussian_ancillae():
    prog = compile_single_mode(EulerForm(0.0, 0.4, 0.0))
    extra = prog.replace(
        ancilla_schedule=list(prog.ancilla_schedule) + [pg.Ancilla(2)], tau_prime=3
    )
    assert "ancilla-bound" in validate(extra).rules


def test_cubic_layout():
    prog = compile_cubic(0.1)
    assert (prog.m, prog.tau_prime) == (2, 3)
    cubic = [a for a in prog.ancilla_schedule if a.kind == pg.CUBIC]
    assert cubic[0].gamma == pytest.approx(cubic_ancilla_gamma(0.1)) == pytest.approx(0.2 * np.sqrt(2))
    labels = [ev.args["label"] for ev in prog.of_kind(pg.MEASURE)]
    assert labels == ["q", "y"]
    assert compile_cubic(0.1, anti_squeeze=True).tau_prime == 4
