import dataclasses

import numpy as np
import pytest

from mimo_interference.errors import ConfigError
from mimo_interference.reductions import (
    SpecialCase,
    special_case_scenario,
    validate_special_case,
)
from mimo_interference.waveform import make_codes


@pytest.mark.parametrize("mode", list(SpecialCase))
def test_reductions_hold_k16(mode):
    rep = validate_special_case(mode, special_case_scenario(mode, 16, np.random.default_rng(5)))
    assert rep.passed, rep
    assert rep.max_rel_deviation <= 1e-6


def test_phased_rows_identical():
    from mimo_interference.processing import range_doppler_decode
    from mimo_interference.signal_chain import simulate_interference

    sc = special_case_scenario(SpecialCase.PHASED, 16, np.random.default_rng(2))
    cube = range_doppler_decode(simulate_interference(sc.victim, sc.geom, sc.intf), sc.codes, sc.fft_sizes)
    Y = cube.data
    assert np.abs(Y - Y[:1]).max() <= 1e-9 * np.abs(Y).max()


def test_coherent_precondition_violation():
    sc = special_case_scenario(SpecialCase.COHERENT, 16)
    bad = dataclasses.replace(sc, intf=dataclasses.replace(sc.intf, tau_syn=1e-6))
    with pytest.raises(ConfigError):
        validate_special_case(SpecialCase.COHERENT, bad)


def test_phased_precondition_violation():
    sc = special_case_scenario(SpecialCase.PHASED, 16)
    with pytest.raises(ConfigError):
        validate_special_case("PHASED", dataclasses.replace(sc, codes=make_codes("TDM", 16, 4)))


def test_tdm_precondition_violation():
    sc = special_case_scenario(SpecialCase.TDM, 16)
    with pytest.raises(ConfigError):
        validate_special_case("TDM", dataclasses.replace(sc, codes=make_codes("DDM_HADAMARD", 16, 4)))


def test_report_failure_flag():
    from mimo_interference.reductions import ReductionReport

    assert not ReductionReport(SpecialCase.TDM, 1e-3).passed
