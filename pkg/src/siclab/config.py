"""Experiment configuration: key=value files with section headers.

An experiment file has an ``[experiment]`` section (scheme, trials,
master_seed, out), a ``[params]`` section whose keys depend on the
scheme, and an optional ``[sweep]`` section (axis, values).  The two
finite-alphabet schemes reference their probability law by file path;
law files hold whitespace-separated matrix rows under a ``[law]``
section, one row per line.
"""

import configparser
import dataclasses
import os

import numpy as np

from . import finite_info as fi


class ConfigError(ValueError):
    """Raised with section/field (and, for syntax, line) diagnostics."""


SCHEMES = ("dirty-paper", "wz-gaussian", "gp-finite", "wz-finite")

# per-scheme parameter schema: key -> (type, required)
PARAM_SCHEMA = {
    "dirty-paper": {
        "power_p": (float, True),
        "noise_var": (float, True),
        "interference_var": (float, False),
        "horizon_n": (int, True),
        "rate_r": (float, True),
    },
    "wz-gaussian": {
        "block_len_l": (int, True),
        "rate_r": (float, True),
        "epsilon": (float, True),
        "source_var": (float, True),
        "si_var": (float, False),
    },
    "gp-finite": {
        "law": (str, True),
        "message_bits": (int, True),
        "iterations": (int, True),
        "eps_invert": (float, True),
        "eps_encode": (float, True),
        "min_block": (int, True),
        "term_factor": (int, True),
        "delta_invert": (float, True),
        "delta_decode": (float, True),
    },
    "wz-finite": {
        "law": (str, True),
        "base_len": (int, True),
        "iterations": (int, True),
        "eps_shape": (float, True),
        "eps_encode": (float, True),
        "delta_shape": (float, True),
        "delta_decode": (float, True),
    },
}

LAW_KINDS = {"gp-finite": "gp", "wz-finite": "wz"}


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    scheme: str
    params: dict
    trials: int
    master_seed: int
    out_dir: str
    sweep: SweepSpec | None
    law: object
    workers: int
    raw_text: str


def _convert(text: str, kind, section: str, key: str):
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key}: expected {kind.__name__}, got {text!r}"
        ) from None
    return text


def _parse_matrix(text: str, key: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(cell) for cell in line.split()])
        except ValueError:
            raise ConfigError(f"[law] {key}: non-numeric cell in {line!r}") from None
    if not rows:
        raise ConfigError(f"[law] {key}: empty table")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ConfigError(f"[law] {key}: ragged rows")
    return np.array(rows)


def _read_sections(path: str) -> tuple[configparser.ConfigParser, str]:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        # configparser syntax errors already carry line numbers
        raise ConfigError(str(exc)) from exc
    return parser, text


def load_law(path: str, expected_kind: str):
    """Load a finite-alphabet law file and build the matching law object."""
    parser, _ = _read_sections(path)
    if not parser.has_section("law"):
        raise ConfigError(f"{path}: missing [law] section")
    section = parser["law"]
    kind = section.get("kind", "").strip()
    if kind != expected_kind:
        raise ConfigError(
            f"[law] kind: expected {expected_kind!r}, got {kind!r}")

    def table(key: str) -> np.ndarray:
        if key not in section:
            raise ConfigError(f"[law] {key}: missing table")
        return _parse_matrix(section[key], key)

    try:
        if kind == "gp":
            p_state = table("p_state").reshape(-1)
            chan = table("p_y_given_xs")
            num_s = p_state.size
            if chan.shape[0] % num_s != 0:
                raise ConfigError(
                    "[law] p_y_given_xs: row count must be num_x * num_s "
                    "(rows in x-major order)")
            chan = chan.reshape(chan.shape[0] // num_s, num_s, chan.shape[1])
            return fi.GpLaw(
                p_state=p_state,
                p_u_given_s=table("p_u_given_s"),
                f_us=table("f_us").astype(np.int64),
                p_y_given_xs=chan,
            )
        rho = _parse_matrix(section["rho"], "rho") if "rho" in section else None
        return fi.WzLaw(
            p_xy=table("p_xy"),
            p_u_given_x=table("p_u_given_x"),
            f_uy=table("f_uy").astype(np.int64),
            rho=rho,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def _format_rows(mat: np.ndarray, as_int: bool = False) -> str:
    lines = []
    for row in np.atleast_2d(mat):
        cells = (str(int(v)) if as_int else repr(float(v)) for v in row)
        lines.append("    " + " ".join(cells))
    return "\n" + "\n".join(lines)


def format_law(law) -> str:
    """Render a law object as law-file text (the loader's inverse)."""
    if isinstance(law, fi.GpLaw):
        chan = law.p_y_given_xs.reshape(-1, law.p_y_given_xs.shape[2])
        body = [
            "[law]", "kind = gp",
            "p_state =" + _format_rows(law.p_state),
            "p_u_given_s =" + _format_rows(law.p_u_given_s),
            "f_us =" + _format_rows(law.f_us, as_int=True),
            "p_y_given_xs =" + _format_rows(chan),
        ]
    else:
        body = [
            "[law]", "kind = wz",
            "p_xy =" + _format_rows(law.p_xy),
            "p_u_given_x =" + _format_rows(law.p_u_given_x),
            "f_uy =" + _format_rows(law.f_uy, as_int=True),
            "rho =" + _format_rows(law.rho),
        ]
    return "\n".join(body) + "\n"


def parse_sweep_values(text: str, value_type) -> tuple:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    if not parts:
        raise ConfigError("[sweep] values: empty list")
    return tuple(_convert(p, value_type, "sweep", "values") for p in parts)


def parse_config(path: str) -> ExperimentConfig:
    parser, text = _read_sections(path)
    if not parser.has_section("experiment"):
        raise ConfigError(f"{path}: missing [experiment] section")
    exp = parser["experiment"]

    scheme = exp.get("scheme", "").strip()
    if scheme not in SCHEMES:
        raise ConfigError(
            f"[experiment] scheme: unknown scheme {scheme!r}; "
            f"expected one of {', '.join(SCHEMES)}")
    trials = _convert(exp.get("trials", "0"), int, "experiment", "trials")
    if trials < 0:
        raise ConfigError(f"[experiment] trials: must be >= 0, got {trials}")
    master_seed = _convert(exp.get("master_seed", "0"), int,
                           "experiment", "master_seed")
    if master_seed < 0:
        raise ConfigError("[experiment] master_seed: must be >= 0")
    workers = _convert(exp.get("workers", "1"), int, "experiment", "workers")
    if workers < 1:
        raise ConfigError("[experiment] workers: must be >= 1")
    out_dir = exp.get("out", "results").strip()

    schema = PARAM_SCHEMA[scheme]
    raw_params = parser["params"] if parser.has_section("params") else {}
    params = {}
    for key, value in raw_params.items():
        if key not in schema:
            raise ConfigError(f"[params] {key}: unknown key for {scheme}")
        params[key] = _convert(value.strip(), schema[key][0], "params", key)
    for key, (_, required) in schema.items():
        if required and key not in params:
            raise ConfigError(f"[params] {key}: required for {scheme}")
    params.setdefault("interference_var", 0.0)
    params.setdefault("si_var", 0.0)

    law = None
    if scheme in LAW_KINDS:
        law_path = params["law"]
        if not os.path.isabs(law_path):
            law_path = os.path.join(os.path.dirname(os.path.abspath(path)),
                                    law_path)
        law = load_law(law_path, LAW_KINDS[scheme])

    sweep = None
    if parser.has_section("sweep"):
        sw = parser["sweep"]
        axis = sw.get("axis", "").strip()
        if axis not in schema or axis == "law":
            raise ConfigError(f"[sweep] axis: {axis!r} is not a numeric "
                              f"parameter of {scheme}")
        values = parse_sweep_values(sw.get("values", ""), schema[axis][0])
        sweep = SweepSpec(axis, values)

    return ExperimentConfig(
        scheme=scheme, params=params, trials=trials,
        master_seed=master_seed, out_dir=out_dir, sweep=sweep, law=law,
        workers=workers, raw_text=text)
