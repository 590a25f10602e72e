"""Echo state network identification with scenario-based performance certificates."""

import json

import numpy as np

from . import _esncert
from ._esncert import (
    EsnModel,
    NumericalError,
    fit_index,
    ph_from_state,
    required_scenarios,
    rmse,
    steady_state,
    tight_required_scenarios,
)

__all__ = [
    "EsnModel",
    "NumericalError",
    "certify",
    "experiment_config",
    "fit_index",
    "gen_data",
    "generate_mprs",
    "ph_from_state",
    "report",
    "required_scenarios",
    "rmse",
    "run_campaign",
    "simulate",
    "steady_state",
    "tight_required_scenarios",
    "train",
    "violation_test",
]


def _dump(config):
    return json.dumps(config or {})


def _column(a):
    a = np.asarray(a, dtype=float)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def generate_mprs(**config):
    """MPRS input sequence; keyword arguments override the default excitation."""
    return _esncert.generate_mprs(_dump(config))


def simulate(u, d, **config):
    """Sampled plant response to flow sequences `u` (base) and `d` (buffer)."""
    u = np.asarray(u, dtype=float).ravel()
    d = np.broadcast_to(np.asarray(d, dtype=float), u.shape).copy()
    return _esncert.simulate(u, d, _dump(config))


def train(u, y, seed=0, **config):
    """Trains one network; returns (model, fit diagnostics)."""
    return _esncert.train(_column(u), _column(y), _dump(config), seed)


def run_campaign(train_data, validation_data, n_delta=0, epsilon=0.05, beta=1e-7, seed=0,
                 mode="free_run", workers=1, m=0, test_seed=1, **config):
    """Scenario campaign on (u, y) pairs. n_delta=0 uses the certified count.

    With m > 0 the result also carries a violation test on m fresh instances.
    """
    tu, ty = train_data
    vu, vy = validation_data
    out = _esncert.run_campaign(_column(tu), _column(ty), _column(vu), _column(vy), _dump(config),
                                n_delta, epsilon, beta, seed, mode, workers, m, test_seed)
    return json.loads(out)


def experiment_config(**config):
    return json.loads(_esncert.experiment_config(_dump(config)))


def gen_data(**config):
    return _esncert.gen_data(_dump(config))


def certify(order, **config):
    return json.loads(_esncert.certify(_dump(config), order))


def violation_test(order, m, **config):
    return json.loads(_esncert.violation_test(_dump(config), order, m))


def report(out):
    rows, missing = _esncert.report(str(out))
    return rows, missing
