"""Persistence of fractional Brownian motion with multidimensional time."""

import json as _json

from ._core import (
    CapExceededError,
    ConfigError,
    CovarianceModel,
    Domain,
    NumericalError,
    __version__,
    build_curve,
    estimate_EM,
    estimate_p,
    fit_exponent,
    net_points,
    record_trace,
    sample,
    validate_curve,
)
from . import _core


def lemma2_check(*args, **kwargs):
    return _json.loads(_core.lemma2_check(*args, **kwargs))


def corollary3_sweep(*args, **kwargs):
    return _json.loads(_core.corollary3_sweep(*args, **kwargs))


def chain_report(*args, **kwargs):
    return _json.loads(_core.chain_report(*args, **kwargs))


__all__ = [
    "CapExceededError",
    "ConfigError",
    "CovarianceModel",
    "Domain",
    "NumericalError",
    "build_curve",
    "chain_report",
    "corollary3_sweep",
    "estimate_EM",
    "estimate_p",
    "fit_exponent",
    "lemma2_check",
    "net_points",
    "record_trace",
    "sample",
    "validate_curve",
]
