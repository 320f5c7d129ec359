"""Acceptance suite: every shipped criterion at its stated tolerance.

Each test prints the one-line verdict for its criterion and asserts it.
Two criteria are known red and marked strict-xfail below; the reasons
are mechanical, not statistical, so they must not silently start
passing.
"""

import pytest

from siclab import acceptance, cli

MASTER_SEED = 0

_BY_INDEX = {index: (name, fn) for index, name, fn in acceptance._CRITERIA}


def check(index: int) -> None:
    name, fn = _BY_INDEX[index]
    passed, detail = fn(MASTER_SEED, False)
    line = acceptance.format_result(
        acceptance.CriterionResult(index, name, passed, detail))
    print(line)
    assert passed, line


def test_criterion_01_interference_invariance():
    check(1)


def test_criterion_02_final_error_variance_law():
    check(2)


def test_criterion_03_constant_transmit_power():
    check(3)


def test_criterion_04_distortion_identity():
    check(4)


@pytest.mark.xfail(
    strict=True,
    reason="quantizer interval truncation is amplified through the "
           "feedback prediction chain, so measured distortion grows "
           "with block length instead of approaching the limit")
def test_criterion_05_feedforward_distortion_limit():
    check(5)


def test_criterion_06_index_offset_robustness():
    check(6)


def test_criterion_07_state_writing_end_to_end():
    check(7)


@pytest.mark.xfail(
    strict=True,
    reason="the planned 27-symbol second block needs 2^27 sequence "
           "enumerations, above the 2^22 exhaustive-search budget")
def test_criterion_08_feedforward_end_to_end():
    check(8)


def test_criterion_09_schedule_arithmetic():
    check(9)


def test_criterion_10_codec_properties():
    check(10)


def test_criterion_11_one_sided_sanity_bounds():
    check(11)


def test_criterion_12_determinism():
    check(12)


def test_accept_cli_is_repeatable(tmp_path):
    # two quick runs, same seed: same exit code, bit-identical csv
    out1, out2 = tmp_path / "a1", tmp_path / "a2"
    code1 = cli.main(["accept", "--quick", "--seed", "3",
                      "--out", str(out1)])
    code2 = cli.main(["accept", "--quick", "--seed", "3",
                      "--out", str(out2)])
    # the two known-red criteria drive the nonzero exit
    assert code1 == code2 == 2
    csv1 = (out1 / "criteria.csv").read_bytes()
    assert csv1 == (out2 / "criteria.csv").read_bytes()
    assert (out1 / "criteria.png").stat().st_size > 0
    assert (out1 / "meta.txt").is_file()
