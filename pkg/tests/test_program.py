import json

import numpy as np
import pytest

from cvloop import program as pg
from cvloop.compiler import compile_cubic, compile_gaussian
from cvloop.decomp import EulerForm
from cvloop.compiler import compile_single_mode
from cvloop.schemas import check


def test_affine_evaluates_and_serializes():
    fn = pg.Affine.of({"a": 2.0, "b": -0.5}, offset=1.0)
    assert fn({"a": 1.0, "b": 4.0}) == pytest.approx(1.0)
    assert fn.sources == ("a", "b")
    data = fn.to_dict()
    assert data == {"fn": "affine", "gains": {"a": 2.0, "b": -0.5}, "offset": 1.0}
    assert pg.fn_from_dict(data)({"a": 1.0, "b": 4.0}) == pytest.approx(1.0)
    assert pg.is_affine(fn)


def test_nonlinear_functions():
    at = pg.ArctanScaled(3.0, "q")
    assert at({"q": 0.2}) == pytest.approx(np.arctan(0.6))
    sec = pg.SecScaled(np.sqrt(2.0), ("y", "phi"))
    assert sec({"y": 0.5, "phi": 0.3}) == pytest.approx(np.sqrt(2.0) * 0.5 / np.cos(0.3))
    assert not pg.is_affine(at)
    for fn in (at, sec):
        again = pg.fn_from_dict(json.loads(json.dumps(fn.to_dict())))
        assert again.to_dict() == fn.to_dict()


def test_sec_scaled_rejects_singular_angle():
    with pytest.raises(pg.SingularFeedforwardError):
        pg.SecScaled(1.0)({"y": 1.0, "phi": np.pi / 2})


def test_missing_label_raises():
    with pytest.raises(pg.UnrecordedLabelError):
        pg.Affine.of({"m0": 1.0})({})


def test_unknown_event_kind():
    with pytest.raises(pg.ProgramError):
        pg.Event(0, "SWITCH3")
    with pytest.raises(pg.ProgramError):
        pg.feedforward(1, 0, "z", pg.Affine.of())


def test_events_sort_by_tick_then_phase():
    evs = [pg.measure(0, "a", 0.0), pg.vbs(0, 0.5), pg.feedforward(1, 0, "p", pg.Affine.of({"a": 1.0})), pg.admit(0, 0)]
    prog = pg.ControlProgram(1, 1, (), evs)
    assert [e.kind for e in prog.events] == ["SWITCH1", "VBS", "MEASURE", "FEEDFORWARD"]
    assert prog.n_ticks == 2


@pytest.mark.parametrize(
    "prog",
    [
        compile_single_mode(EulerForm(0.3, 0.5, -0.2)),
        compile_gaussian(np.eye(4)),
        compile_cubic(0.1),
        compile_cubic(0.05, anti_squeeze=True),
    ],
    ids=["euler", "identity", "cubic", "cubic-anti"],
)
def test_program_json_round_trip(prog):
    text = prog.to_json()
    check(json.loads(text))
    again = pg.ControlProgram.from_json(text)
    assert again.to_json() == text
    assert again.is_gaussian == prog.is_gaussian


def test_cubic_program_is_not_gaussian():
    assert not compile_cubic(0.1).is_gaussian
    assert compile_gaussian(np.eye(2)).is_gaussian


def test_from_dict_checks_format_and_m():
    data = compile_single_mode(EulerForm(0.0, 0.4, 0.0)).to_dict()
    with pytest.raises(pg.ProgramError):
        pg.ControlProgram.from_dict({**data, "format": "other/1"})
    with pytest.raises(pg.ProgramError):
        pg.ControlProgram.from_dict({**data, "m": 5})


def test_replace_keeps_other_fields():
    prog = compile_single_mode(EulerForm(0.0, 0.4, 0.0))
    smaller = prog.replace(tau_prime=1)
    assert smaller.tau_prime == 1 and smaller.events == prog.events and smaller.n == prog.n
