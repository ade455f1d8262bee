"""Python interface to the robest C++ core."""

import json as _json

from ._core import (
    NumericalError,
    PreconditionError,
    decay_integrals,
    expm,
    expm_param_derivative,
    gramian_finite,
    log_norm,
    lyap_observability,
    norm2,
    preset_names,
    robustness_distance,
    robustness_metric,
    spectral_abscissa,
    sym_eig_max,
    theorem1_constants,
)

__all__ = [
    "NumericalError",
    "PreconditionError",
    "analyze",
    "decay_integrals",
    "expm",
    "expm_param_derivative",
    "gramian_finite",
    "log_norm",
    "lyap_observability",
    "norm2",
    "preset_names",
    "robustness_distance",
    "robustness_metric",
    "run",
    "spectral_abscissa",
    "sym_eig_max",
    "theorem1_constants",
]


def analyze(scenario, mode="precond", theorem2_strict=True):
    """Analyze one scenario and return the report as a dict.

    `scenario` is a preset name such as "affine" (or "preset:affine") or a scenario dict in the
    config-file format.
    """
    from ._core import _analyze

    return _json.loads(_analyze(_json.dumps(scenario), mode, theorem2_strict))


def run(config, out_dir=None):
    """Run a full configuration (dict) and return the written file paths."""
    from ._core import _run

    return _run(_json.dumps(config), "" if out_dir is None else str(out_dir))
